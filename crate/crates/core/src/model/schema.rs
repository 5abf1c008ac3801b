//! Versioned JSON layout for ensembles, observations and signals.
//! Matrix entries and measurements are hex-float strings so that files
//! round-trip bit-exactly; hand-written files may use plain numbers.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{MatrixPayload, MeasurementEnsemble, MeasurementMatrix, Mode, Observation, Signal};
use crate::{hexfloat, Error, Result};

pub const SCHEMA: &str = "phasealg/instance@1";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HexF64(pub f64);

impl Serialize for HexF64 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&hexfloat::format(self.0))
    }
}

impl<'de> Deserialize<'de> for HexF64 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = HexF64;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a hex-float string or a number")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<HexF64, E> {
                Ok(HexF64(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<HexF64, E> {
                Ok(HexF64(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<HexF64, E> {
                Ok(HexF64(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<HexF64, E> {
                hexfloat::parse(v)
                    .or_else(|| v.trim().parse().ok())
                    .map(HexF64)
                    .ok_or_else(|| E::custom(format!("invalid float literal {v:?}")))
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixRecord {
    Real { a: Vec<HexF64> },
    Split { b: Vec<HexF64>, c: Vec<HexF64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignalRecord {
    pub re: Vec<HexF64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<HexF64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub schema: String,
    pub mode: Mode,
    pub n: usize,
    pub k: usize,
    pub r: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projector: Option<String>,
    pub matrices: Vec<MatrixRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<HexF64>>,
    #[serde(default)]
    pub sigma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clean: Option<Vec<HexF64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signal: Option<SignalRecord>,
}

fn row_major(m: &DMatrix<f64>) -> Vec<HexF64> {
    let n = m.ncols();
    (0..m.nrows() * n).map(|i| HexF64(m[(i / n, i % n)])).collect()
}

fn from_row_major(n: usize, data: &[HexF64]) -> Result<DMatrix<f64>> {
    if data.len() != n * n {
        return Err(Error::Schema(format!("matrix has {} entries, expected {}", data.len(), n * n)));
    }
    Ok(DMatrix::from_row_iterator(n, n, data.iter().map(|h| h.0)))
}

fn vector(data: &[HexF64]) -> DVector<f64> {
    DVector::from_iterator(data.len(), data.iter().map(|h| h.0))
}

fn hex(v: &DVector<f64>) -> Vec<HexF64> {
    v.iter().copied().map(HexF64).collect()
}

impl InstanceFile {
    pub fn new(ensemble: &MeasurementEnsemble, obs: Option<&Observation>, signal: Option<&Signal>) -> Self {
        let matrices = ensemble
            .matrices()
            .iter()
            .map(|m| match m.payload() {
                MatrixPayload::Real(a) => MatrixRecord::Real { a: row_major(a) },
                MatrixPayload::Split { b, c } => MatrixRecord::Split { b: row_major(b), c: row_major(c) },
            })
            .collect();
        Self {
            schema: SCHEMA.to_string(),
            mode: ensemble.mode(),
            n: ensemble.n(),
            k: ensemble.k(),
            r: ensemble.rank_bound(),
            seed: ensemble.seed,
            projector: ensemble.projector.as_ref().map(|p| p.label()),
            matrices,
            b: obs.map(|o| hex(&o.b)),
            sigma: obs.map_or(0.0, |o| o.noise_sigma),
            clean: obs.and_then(|o| o.clean.as_ref()).map(hex),
            signal: signal.map(|s| match s {
                Signal::Real(z) => SignalRecord { re: hex(z), im: None },
                Signal::ComplexSplit { re, im } => SignalRecord { re: hex(re), im: Some(hex(im)) },
            }),
        }
    }

    pub fn ensemble(&self) -> Result<MeasurementEnsemble> {
        if self.schema != SCHEMA {
            return Err(Error::Schema(format!("unsupported schema {:?}", self.schema)));
        }
        if self.matrices.len() != self.k {
            return Err(Error::Schema(format!("k = {} but {} matrices", self.k, self.matrices.len())));
        }
        let matrices = self
            .matrices
            .iter()
            .map(|rec| match (rec, self.mode) {
                (MatrixRecord::Real { a }, Mode::Real) => MeasurementMatrix::real(from_row_major(self.n, a)?, self.r),
                (MatrixRecord::Split { b, c }, Mode::ComplexSplit) => {
                    MeasurementMatrix::split(from_row_major(self.n, b)?, from_row_major(self.n, c)?, self.r)
                }
                _ => Err(Error::Schema("matrix record does not match the declared mode".into())),
            })
            .collect::<Result<Vec<_>>>()?;
        let mut ensemble = MeasurementEnsemble::new(matrices)?;
        ensemble.seed = self.seed;
        Ok(ensemble)
    }

    pub fn observation(&self) -> Result<Option<Observation>> {
        let Some(b) = &self.b else { return Ok(None) };
        if b.len() != self.k {
            return Err(Error::Schema(format!("b has {} entries, expected {}", b.len(), self.k)));
        }
        let clean = match &self.clean {
            Some(c) if c.len() != self.k => {
                return Err(Error::Schema(format!("clean has {} entries, expected {}", c.len(), self.k)))
            }
            Some(c) => Some(vector(c)),
            None if self.sigma == 0.0 => Some(vector(b)),
            None => None,
        };
        Ok(Some(Observation { b: vector(b), noise_sigma: self.sigma, clean }))
    }

    pub fn signal(&self) -> Result<Option<Signal>> {
        let Some(rec) = &self.signal else { return Ok(None) };
        if rec.re.len() != self.n {
            return Err(Error::Schema(format!("signal has {} entries, expected {}", rec.re.len(), self.n)));
        }
        let signal = match (&rec.im, self.mode) {
            (None, Mode::Real) => Signal::real(vector(&rec.re))?,
            (Some(im), Mode::ComplexSplit) => Signal::complex(vector(&rec.re), vector(im))?,
            (None, Mode::ComplexSplit) => Signal::complex(vector(&rec.re), DVector::zeros(self.n))?,
            (Some(_), Mode::Real) => return Err(Error::Schema("imaginary part given for a real instance".into())),
        };
        Ok(Some(signal))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
