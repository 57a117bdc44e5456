//! Wire formats: operators as `[{re, im, create, annih}]`, matrices as a
//! `{modes, cutoff}` header plus a column-major complex array, in JSON or a
//! little-endian binary layout.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{FockMatrix, FockSpace, OperatorWord};
use crate::error::{Error, Result};
use crate::poly::MultiIndex;
use crate::NormalForm;

const MAGIC: &[u8; 4] = b"FKMX";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordJson {
    pub re: f64,
    pub im: f64,
    pub create: Vec<u32>,
    pub annih: Vec<u32>,
}

impl NormalForm {
    pub fn to_json(&self) -> String {
        let words: Vec<WordJson> = self
            .words()
            .map(|w| WordJson {
                re: w.coeff.re,
                im: w.coeff.im,
                create: w.create.as_slice().to_vec(),
                annih: w.annih.as_slice().to_vec(),
            })
            .collect();
        serde_json::to_string(&words).expect("operator JSON is always encodable")
    }

    /// Parses the word list. The mode count is taken from the words, or
    /// `modes` for an empty list.
    pub fn from_json(text: &str, modes: usize) -> Result<Self> {
        let words: Vec<WordJson> = serde_json::from_str(text)?;
        let n = words.first().map_or(modes, |w| w.create.len());
        let mut out = Vec::with_capacity(words.len());
        for w in words {
            if w.create.len() != n || w.annih.len() != n {
                return Err(Error::Serialization("ragged operator word".into()));
            }
            out.push(OperatorWord {
                coeff: Complex64::new(w.re, w.im),
                create: MultiIndex::from(w.create),
                annih: MultiIndex::from(w.annih),
            });
        }
        Ok(NormalForm::from_words(n, out))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FockMatrixJson {
    pub modes: usize,
    pub cutoff: usize,
    /// Column-major `[re, im]` pairs.
    pub data: Vec<[f64; 2]>,
}

impl FockMatrix {
    pub fn to_json(&self) -> String {
        let j = FockMatrixJson {
            modes: self.space.modes(),
            cutoff: self.space.cutoff(),
            data: self.data.iter().map(|z| [z.re, z.im]).collect(),
        };
        serde_json::to_string(&j).expect("matrix JSON is always encodable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: FockMatrixJson = serde_json::from_str(text)?;
        let space = FockSpace::new(j.modes, j.cutoff)?;
        let d = space.dim();
        if j.data.len() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                found: j.data.len(),
            });
        }
        let data = DMatrix::from_iterator(d, d, j.data.iter().map(|&[re, im]| Complex64::new(re, im)));
        FockMatrix::from_data(&space, data)
    }

    /// `FKMX`, `u32` modes, `u32` cutoff, then column-major `f64` pairs, all
    /// little-endian.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(12 + 16 * self.data.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(self.space.modes() as u32).to_le_bytes());
        out.extend_from_slice(&(self.space.cutoff() as u32).to_le_bytes());
        for z in self.data.iter() {
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 12 || &bytes[..4] != MAGIC {
            return Err(Error::Serialization("missing FKMX header".into()));
        }
        let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap()) as usize;
        let space = FockSpace::new(word(4), word(8))?;
        let d = space.dim();
        let body = &bytes[12..];
        if body.len() != 16 * d * d {
            return Err(Error::DimensionMismatch {
                expected: 16 * d * d,
                found: body.len(),
            });
        }
        let f = |i: usize| f64::from_le_bytes(body[8 * i..8 * i + 8].try_into().unwrap());
        let data = DMatrix::from_iterator(d, d, (0..d * d).map(|k| Complex64::new(f(2 * k), f(2 * k + 1))));
        FockMatrix::from_data(&space, data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::poly_to_normal_form;
    use crate::poly::{parse_poly, Bindings};

    #[test]
    fn operator_round_trip() {
        let op = poly_to_normal_form(&parse_poly("phi1*pi2 + pi1^3", &Bindings::new()).unwrap()).unwrap();
        let back = NormalForm::from_json(&op.to_json(), 2).unwrap();
        assert_eq!(back, op);
    }

    #[test]
    fn matrix_round_trips() {
        let s = FockSpace::new(2, 3).unwrap();
        let mut m = s.annihilator(0);
        m.data_mut()[(4, 7)] = Complex64::new(0.25, -3.5);
        assert_eq!(FockMatrix::from_json(&m.to_json()).unwrap(), m);
        let bytes = m.to_bytes();
        assert_eq!(bytes.len(), 12 + 16 * 81);
        assert_eq!(FockMatrix::from_bytes(&bytes).unwrap(), m);
        // column-major: entry (1, 0) is the second pair
        let j: FockMatrixJson = serde_json::from_str(&m.to_json()).unwrap();
        assert_eq!(j.data[9 * 7 + 4], [0.25, -3.5]);
    }
}
