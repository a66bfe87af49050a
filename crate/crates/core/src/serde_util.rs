//! Serde adapters: complex matrices as row-major nested arrays of `[re, im]`.

use num_complex::Complex;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::scalar::{CMat, CVec, Real};

pub fn to_rows<T: Real>(m: &CMat<T>) -> Vec<Vec<[T; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn from_rows<T: Real>(rows: &[Vec<[T; 2]>]) -> Result<CMat<T>, String> {
    let n = rows.len();
    let c = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != c) {
        return Err("ragged matrix rows".into());
    }
    Ok(CMat::from_fn(n, c, |i, j| Complex::new(rows[i][j][0], rows[i][j][1])))
}

pub mod cmat {
    use super::*;

    pub fn serialize<T: Real, S: Serializer>(m: &CMat<T>, s: S) -> Result<S::Ok, S::Error> {
        to_rows(m).serialize(s)
    }

    pub fn deserialize<'de, T: Real, D: Deserializer<'de>>(d: D) -> Result<CMat<T>, D::Error> {
        let rows = Vec::<Vec<[T; 2]>>::deserialize(d)?;
        from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

pub mod cvecs {
    use super::*;

    pub fn serialize<T: Real, S: Serializer>(v: &[CVec<T>], s: S) -> Result<S::Ok, S::Error> {
        let out: Vec<Vec<[T; 2]>> = v.iter().map(|c| c.iter().map(|z| [z.re, z.im]).collect()).collect();
        out.serialize(s)
    }

    pub fn deserialize<'de, T: Real, D: Deserializer<'de>>(d: D) -> Result<Vec<CVec<T>>, D::Error> {
        let raw = Vec::<Vec<[T; 2]>>::deserialize(d)?;
        Ok(raw
            .into_iter()
            .map(|c| CVec::from_iterator(c.len(), c.into_iter().map(|p| Complex::new(p[0], p[1]))))
            .collect())
    }
}

pub mod cvec {
    use super::*;

    pub fn serialize<T: Real, S: Serializer>(v: &CVec<T>, s: S) -> Result<S::Ok, S::Error> {
        let out: Vec<[T; 2]> = v.iter().map(|z| [z.re, z.im]).collect();
        out.serialize(s)
    }

    pub fn deserialize<'de, T: Real, D: Deserializer<'de>>(d: D) -> Result<CVec<T>, D::Error> {
        let raw = Vec::<[T; 2]>::deserialize(d)?;
        Ok(CVec::from_iterator(raw.len(), raw.into_iter().map(|p| Complex::new(p[0], p[1]))))
    }
}
