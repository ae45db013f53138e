//! JSON file formats for measures, networks and reports. Numbers are written
//! as shortest round-trip decimals.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::check_dim;
use crate::measure::{
    canonicalize_full, AffineTail, EuclideanEntry, EuclideanMeasure, Representation, RidgeAtom,
};
use crate::network::{FiniteNetwork, Unit};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailFile {
    pub a0: Vec<f64>,
    #[serde(default)]
    pub b0: f64,
}

/// `{dim, c0, atoms, particles, tail}`. Directions need not be unit or
/// canonical on input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureFile {
    pub dim: usize,
    #[serde(default)]
    pub c0: f64,
    #[serde(default)]
    pub atoms: Vec<EuclideanEntry>,
    #[serde(default)]
    pub particles: Vec<EuclideanEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<TailFile>,
}

impl MeasureFile {
    /// Canonical form of the file's function: the entries are normalized,
    /// folded and merged, and the file tail is added to the folded tail.
    pub fn canonicalize(&self) -> Result<Representation> {
        let t = EuclideanMeasure {
            dim: self.dim,
            atoms: self.atoms.clone(),
            particles: self.particles.clone(),
        };
        let (measure, mut tail) = canonicalize_full(&t, self.c0)?;
        if let Some(ft) = &self.tail {
            check_dim(self.dim, ft.a0.len())?;
            if ft.a0.iter().any(|v| !v.is_finite()) || !ft.b0.is_finite() {
                return Err(Error::NonFinite("tail"));
            }
            for (a, b) in tail.a0.iter_mut().zip(&ft.a0) {
                *a += b;
            }
            tail.b0 += ft.b0;
        }
        Ok(Representation { measure, tail })
    }

    /// Serializable form of an already canonical representation.
    pub fn from_representation(rep: &Representation) -> Self {
        let entry = |e: &RidgeAtom| EuclideanEntry::new(e.dir.coords().to_vec(), e.b, e.w);
        Self {
            dim: rep.dim(),
            c0: rep.tail.c0,
            atoms: rep.measure.atoms().iter().map(entry).collect(),
            particles: rep.measure.particles().iter().map(entry).collect(),
            tail: Some(TailFile {
                a0: rep.tail.a0.clone(),
                b0: rep.tail.b0,
            }),
        }
    }
}

impl From<&AffineTail> for TailFile {
    fn from(t: &AffineTail) -> Self {
        Self {
            a0: t.a0.clone(),
            b0: t.b0,
        }
    }
}

pub fn parse_measure(text: &str) -> Result<Representation> {
    serde_json::from_str::<MeasureFile>(text)?.canonicalize()
}

pub fn measure_to_string(rep: &Representation) -> Result<String> {
    Ok(serde_json::to_string_pretty(
        &MeasureFile::from_representation(rep),
    )?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkFile {
    pub dim: usize,
    #[serde(default)]
    pub c0: f64,
    #[serde(default)]
    pub units: Vec<Unit>,
}

impl NetworkFile {
    pub fn into_network(self) -> Result<FiniteNetwork> {
        FiniteNetwork::new(self.dim, self.c0, self.units)
    }
}

impl From<&FiniteNetwork> for NetworkFile {
    fn from(n: &FiniteNetwork) -> Self {
        Self {
            dim: n.dim(),
            c0: n.c0(),
            units: n.units().to_vec(),
        }
    }
}

pub fn parse_network(text: &str) -> Result<FiniteNetwork> {
    serde_json::from_str::<NetworkFile>(text)?.into_network()
}

pub fn network_to_string(net: &FiniteNetwork) -> Result<String> {
    Ok(serde_json::to_string_pretty(&NetworkFile::from(net))?)
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

pub fn read_measure(path: impl AsRef<Path>) -> Result<Representation> {
    parse_measure(&read(path.as_ref())?)
}

pub fn read_network(path: impl AsRef<Path>) -> Result<FiniteNetwork> {
    parse_network(&read(path.as_ref())?)
}
