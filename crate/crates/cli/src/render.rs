//! JSON, CSV and text renderings of the reports.

use std::fmt::Write;

use serde::Serialize;
use spectra_core::two_interval::{TwoIntervalCase, Verdict};

use crate::commands::{CheckReport, FullReport, SpectrumReport, TranslateReport};
use crate::config::Format;

pub trait Render: Serialize {
    fn csv(&self) -> String;
    fn text(&self) -> String;

    fn json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.json(),
            Format::Csv => self.csv(),
            Format::Text => self.text(),
        }
    }
}

impl Render for SpectrumReport {
    fn csv(&self) -> String {
        let mut s = String::from("lambda,multiplicity\n");
        for p in &self.points {
            let _ = writeln!(s, "{},{}", p.lambda, p.multiplicity);
        }
        s
    }

    fn text(&self) -> String {
        let mut s = format!(
            "{} point(s) of the spectrum in [{}, {}) (grid step {}{})\n",
            self.count,
            self.window.0,
            self.window.1,
            self.grid_step,
            if self.refined { ", refined" } else { "" }
        );
        for p in &self.points {
            let _ = writeln!(s, "  {:>22.15}  multiplicity {}", p.lambda, p.multiplicity);
        }
        s
    }
}

impl Render for CheckReport {
    fn csv(&self) -> String {
        let mut s = String::from("key,value\n");
        let _ = writeln!(s, "passed,{}", self.passed);
        if let Some(v) = &self.verification {
            let _ = writeln!(s, "gram_defect,{}", v.gram_defect);
            let _ = writeln!(s, "density_estimate,{}", v.density_estimate);
            let _ = writeln!(s, "measure,{}", v.measure);
            for (k, d) in &v.parseval_defects {
                let _ = writeln!(s, "parseval_{k},{d}");
            }
        }
        s
    }

    fn text(&self) -> String {
        let mut s = format!("check ({:?}): {}\n", self.mode, if self.passed { "PASS" } else { "FAIL" });
        if let Some(sp) = &self.spectrum {
            let _ = writeln!(s, "  spectrum {:?} + {}Z", sp.reps(), sp.period());
        }
        if let Some(v) = &self.verification {
            let _ = writeln!(s, "  gram defect {:e} over {} points", v.gram_defect, v.gram_truncation);
            let _ = writeln!(s, "  density {} vs |Ω| = {}", v.density_estimate, v.measure);
            for e in &v.parseval_curves {
                let _ = writeln!(s, "  parseval {:<20} {:?} {}", e.label, e.defects, if e.decays { "ok" } else { "no decay" });
            }
        }
        if let Some(r) = &self.reason {
            let _ = writeln!(s, "  reason: {r:?}");
        }
        for d in &self.diagnostics {
            let _ = writeln!(s, "  {d}");
        }
        s
    }
}

impl Render for TwoIntervalCase<f64> {
    fn csv(&self) -> String {
        let mut s = String::from("case,k,rep0,rep1,period\n");
        match &self.verdict {
            Verdict::CaseI { spectrum, .. } => {
                let _ = writeln!(s, "I,,{},,{}", spectrum.reps()[0], spectrum.period());
            }
            Verdict::CaseII { spectra, .. } => {
                for c in spectra {
                    let _ = writeln!(s, "II,{},{},{},{}", c.k, c.spectrum.reps()[0], c.spectrum.reps()[1], c.spectrum.period());
                }
            }
            Verdict::NotSpectral => s.push_str("none,,,,\n"),
        }
        s
    }

    fn text(&self) -> String {
        let mut s = format!("w = {}, rho = {}: ", self.w, self.rho);
        match &self.verdict {
            Verdict::CaseI { .. } => s.push_str("spectral (case I), spectrum Z, B = (0 1; 1 0)\n"),
            Verdict::CaseII { l, spectra } => {
                let _ = writeln!(s, "spectral (case II), l = {l}");
                for c in spectra {
                    let _ = writeln!(s, "  k = {}: {{0, {}}} + 2Z, xi = {}", c.k, c.spectrum.reps()[1], c.xi);
                }
            }
            Verdict::NotSpectral => s.push_str("not spectral\n"),
        }
        if let Some(n) = &self.normalization {
            let _ = writeln!(s, "  normalized by (x - {}) * {}", n.shift, n.scale);
        }
        if let Some(w) = &self.warning {
            let _ = writeln!(s, "  warning: {w}");
        }
        s
    }
}

impl Render for TranslateReport {
    fn csv(&self) -> String {
        let mut s = String::from("x,re_before,im_before,re_after,im_after\n");
        for ((x, b), a) in self.x.iter().zip(&self.before).zip(&self.after) {
            let _ = writeln!(s, "{x},{},{},{},{}", b[0], b[1], a[0], a[1]);
        }
        let _ = writeln!(s, "# local_translation_defect={} margin={} t={}", self.local_translation_defect, self.margin, self.t);
        s
    }

    fn text(&self) -> String {
        format!(
            "U({}) on {} samples (h = {}, p = {}), local translation defect {:e} at margin {}\n",
            self.t,
            self.x.len(),
            self.h,
            self.p,
            self.local_translation_defect,
            self.margin
        )
    }
}

impl Render for FullReport {
    /// Plot-ready eigenphase tracks when available, else the spectrum table.
    fn csv(&self) -> String {
        if let Some(tr) = &self.eigenphases {
            let mut s = String::from("lambda");
            for k in 0..tr.phases.len() {
                let _ = write!(s, ",phase_{k}");
            }
            s.push('\n');
            for (g, x) in tr.grid.iter().enumerate() {
                let _ = write!(s, "{x}");
                for p in &tr.phases {
                    let _ = write!(s, ",{}", p[g]);
                }
                s.push('\n');
            }
            return s;
        }
        self.spectrum.as_ref().map_or_else(String::new, |r| r.csv())
    }

    fn text(&self) -> String {
        let mut s = String::new();
        if let Some(c) = &self.classification {
            s.push_str(&c.text());
        }
        if let Some(r) = &self.spectrum {
            s.push_str(&r.text());
        }
        if let Some(c) = &self.check {
            s.push_str(&c.text());
        }
        if let Some(t) = &self.eigenphases {
            let _ = writeln!(s, "eigenphase tracks: {} x {} nodes", t.phases.len(), t.grid.len());
        }
        s
    }
}
