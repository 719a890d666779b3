//! Single-particle data: masses, charge conjugation and the mass shell.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Masses, conjugation and charge tags of the particle species.
///
/// Indices are 0-based here; [`SpectrumDescriptor`] carries the 1-based
/// JSON form.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleSpectrum {
    dim_k: usize,
    masses: Vec<f64>,
    conj: Vec<usize>,
    charges: Vec<String>,
}

impl ParticleSpectrum {
    /// Builds and validates a spectrum. `charges` defaults to one tag per index.
    pub fn new(masses: Vec<f64>, conj: Vec<usize>, charges: Option<Vec<String>>) -> Result<Self> {
        let dim_k = masses.len();
        let charges = charges.unwrap_or_else(|| (0..dim_k).map(|a| format!("q{}", a + 1)).collect());
        let spec = Self { dim_k, masses, conj, charges };
        spec.validate()?;
        Ok(spec)
    }

    /// `dim_k` neutral species of common mass `m`.
    pub fn neutral(dim_k: usize, m: f64) -> Result<Self> {
        Self::new(vec![m; dim_k], (0..dim_k).collect(), Some(vec!["q".into(); dim_k]))
    }

    /// Checks every invariant and returns the mass gap.
    pub fn validate(&self) -> Result<f64> {
        if self.dim_k == 0 {
            return Err(Error::Spectrum("dim_k must be positive".into()));
        }
        if self.conj.len() != self.dim_k || self.charges.len() != self.dim_k {
            return Err(Error::Spectrum(format!(
                "length mismatch: {} masses, {} conj entries, {} charges",
                self.dim_k,
                self.conj.len(),
                self.charges.len()
            )));
        }
        for (a, &m) in self.masses.iter().enumerate() {
            if !(m > 0.0 && m.is_finite()) {
                return Err(Error::Spectrum(format!("non-positive mass {m} at index {}", a + 1)));
            }
        }
        for a in 0..self.dim_k {
            let b = self.conj[a];
            if b >= self.dim_k {
                return Err(Error::Spectrum(format!("conj({}) = {} out of range", a + 1, b + 1)));
            }
            if self.conj[b] != a {
                return Err(Error::Spectrum(format!("conj is not an involution at index {}", a + 1)));
            }
            if self.masses[a] != self.masses[b] {
                return Err(Error::Spectrum(format!(
                    "mass mismatch under conjugation: m[{}] = {} but m[{}] = {}",
                    a + 1,
                    self.masses[a],
                    b + 1,
                    self.masses[b]
                )));
            }
        }
        for a in 0..self.dim_k {
            for b in a + 1..self.dim_k {
                if self.charges[a] == self.charges[b] && self.masses[a] != self.masses[b] {
                    return Err(Error::Spectrum(format!(
                        "indices {} and {} share charge {:?} but have different masses",
                        a + 1,
                        b + 1,
                        self.charges[a]
                    )));
                }
            }
        }
        Ok(self.mass_gap())
    }

    pub fn dim_k(&self) -> usize {
        self.dim_k
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn charges(&self) -> &[String] {
        &self.charges
    }

    pub fn mass(&self, alpha: usize) -> f64 {
        self.masses[alpha]
    }

    pub fn conj(&self, alpha: usize) -> usize {
        self.conj[alpha]
    }

    pub fn conj_map(&self) -> &[usize] {
        &self.conj
    }

    pub fn is_neutral(&self) -> bool {
        self.conj.iter().enumerate().all(|(a, &b)| a == b)
    }

    /// Smallest mass.
    pub fn mass_gap(&self) -> f64 {
        self.masses.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// On-shell momentum `m (cosh θ, sinh θ)` of species `alpha`.
    pub fn momentum(&self, alpha: usize, theta: f64) -> Result<[f64; 2]> {
        if alpha >= self.dim_k {
            return Err(Error::Index { index: alpha, dim: self.dim_k });
        }
        let m = self.masses[alpha];
        Ok([m * theta.cosh(), m * theta.sinh()])
    }

    /// Stable fingerprint used in state export headers.
    pub fn fingerprint(&self) -> String {
        let mut s = format!("d{}", self.dim_k);
        for a in 0..self.dim_k {
            s.push_str(&format!(";{:e},{},{}", self.masses[a], self.conj[a], self.charges[a]));
        }
        s
    }
}

/// A charge tag as it may appear in JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChargeTag {
    Text(String),
    Number(i64),
}

/// JSON form `{"dim_k":N,"masses":[...],"conj":[...],"charges":[...]}` with
/// 1-based `conj` entries.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumDescriptor {
    pub dim_k: usize,
    pub masses: Vec<f64>,
    #[serde(default)]
    pub conj: Option<Vec<usize>>,
    #[serde(default)]
    pub charges: Option<Vec<ChargeTag>>,
}

impl SpectrumDescriptor {
    pub fn build(&self) -> Result<ParticleSpectrum> {
        if self.masses.len() != self.dim_k {
            return Err(Error::Spectrum(format!(
                "dim_k = {} but {} masses given",
                self.dim_k,
                self.masses.len()
            )));
        }
        let conj = match &self.conj {
            None => (0..self.dim_k).collect(),
            Some(c) => c
                .iter()
                .map(|&b| {
                    if b == 0 {
                        Err(Error::Spectrum("conj entries are 1-based".into()))
                    } else {
                        Ok(b - 1)
                    }
                })
                .collect::<Result<Vec<_>>>()?,
        };
        let charges = self.charges.as_ref().map(|cs| {
            cs.iter()
                .map(|c| match c {
                    ChargeTag::Text(s) => s.clone(),
                    ChargeTag::Number(n) => n.to_string(),
                })
                .collect()
        });
        ParticleSpectrum::new(self.masses.clone(), conj, charges)
    }

    pub fn from_spectrum(spec: &ParticleSpectrum) -> Self {
        Self {
            dim_k: spec.dim_k(),
            masses: spec.masses().to_vec(),
            conj: Some(spec.conj_map().iter().map(|b| b + 1).collect()),
            charges: Some(spec.charges().iter().cloned().map(ChargeTag::Text).collect()),
        }
    }
}
