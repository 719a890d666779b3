//! Two-particle S-matrices: evaluation on the strip, axiom residuals,
//! strip norm and analyticity sampling.

pub mod axioms;
pub mod gamma;
pub mod scattering;
pub mod sigma;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{flip, CMat, ONE};
use crate::spectrum::ParticleSpectrum;
use crate::C64;

pub use axioms::{analyticity_residual, check_axioms, norm_kappa, symmetry_unitaries, AxiomReport, AxiomResidual, NormKappa};
pub use scattering::ScatteringFn;

/// Component `S^{αβ}_{γδ}` of a two-site matrix.
#[inline]
pub fn comp(s: &CMat, d: usize, a: usize, b: usize, g: usize, e: usize) -> C64 {
    s[(a * d + b, g * d + e)]
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    ConstantFlip { sign: f64 },
    /// `S^{αβ}_{γδ}(ζ) = ω_{αβ}(ζ) δ^α_δ δ^β_γ`.
    Diagonal { omega: Vec<Vec<ScatteringFn>> },
    SigmaModelON { n: usize, layout: SigmaLayout },
}

/// Placement of the sigma-model coefficients on the invariant tensors
/// `K` (trace pairing), `1` and `F`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaLayout {
    /// `σ₁K + σ₂F + σ₃1`: satisfies every axiom, `S(0) = −1`.
    #[default]
    Axiomatic,
    /// `σ₁K + σ₂1 + σ₃F`: `S(0) = −F`, but violates Yang-Baxter and crossing.
    AsPrinted,
}

#[derive(Debug, Clone)]
pub struct SMatrixModel {
    spectrum: ParticleSpectrum,
    kind: ModelKind,
    kappa: f64,
    norm_kappa_cached: Option<f64>,
}

impl SMatrixModel {
    pub fn flip(spectrum: ParticleSpectrum, sign: f64) -> Result<Self> {
        if sign != 1.0 && sign != -1.0 {
            return Err(Error::Model(format!("flip sign must be ±1, got {sign}")));
        }
        Ok(Self { spectrum, kind: ModelKind::ConstantFlip { sign }, kappa: 0.45 * PI, norm_kappa_cached: Some(1.0) })
    }

    pub fn diagonal(spectrum: ParticleSpectrum, omega: Vec<Vec<ScatteringFn>>, kappa: Option<f64>) -> Result<Self> {
        let d = spectrum.dim_k();
        if omega.len() != d || omega.iter().any(|row| row.len() != d) {
            return Err(Error::Model(format!("omega table must be {d}×{d}")));
        }
        let mut margin = f64::INFINITY;
        let mut default = 0.45 * PI;
        for w in omega.iter().flatten() {
            w.validate()?;
            margin = margin.min(w.pole_margin());
            default = default.min(w.default_kappa());
        }
        let kappa = kappa.unwrap_or(default);
        if !(kappa > 0.0 && kappa < PI / 2.0) || kappa >= margin {
            return Err(Error::Model(format!(
                "kappa = {kappa} must lie in (0, π/2) and below the nearest coefficient pole at distance {margin}"
            )));
        }
        let norm = omega
            .iter()
            .flatten()
            .all(|w| matches!(w, ScatteringFn::Const { .. }))
            .then_some(1.0);
        Ok(Self { spectrum, kind: ModelKind::Diagonal { omega }, kappa, norm_kappa_cached: norm })
    }

    /// O(N) sigma model on `N` neutral species of mass `m`.
    pub fn sigma_on(n: usize, m: f64, kappa: Option<f64>) -> Result<Self> {
        Self::sigma_on_with_layout(n, m, kappa, SigmaLayout::Axiomatic)
    }

    pub fn sigma_on_with_layout(n: usize, m: f64, kappa: Option<f64>, layout: SigmaLayout) -> Result<Self> {
        if n < 3 {
            return Err(Error::Model(format!("sigma model needs N ≥ 3, got {n}")));
        }
        let spectrum = ParticleSpectrum::neutral(n, m)?;
        let kappa = kappa.unwrap_or_else(|| sigma::default_kappa(n));
        if !(kappa > 0.0 && kappa < PI / 2.0) || kappa >= sigma::pole_margin(n) {
            return Err(Error::Model(format!("kappa = {kappa} outside the analytic strip of the O({n}) model")));
        }
        Ok(Self { spectrum, kind: ModelKind::SigmaModelON { n, layout }, kappa, norm_kappa_cached: None })
    }

    pub fn spectrum(&self) -> &ParticleSpectrum {
        &self.spectrum
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn dim_k(&self) -> usize {
        self.spectrum.dim_k()
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn norm_kappa_cached(&self) -> Option<f64> {
        self.norm_kappa_cached
    }

    pub fn set_norm_kappa(&mut self, value: f64) {
        self.norm_kappa_cached = Some(value);
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self.kind, ModelKind::Diagonal { .. })
    }

    pub fn omega(&self) -> Option<&[Vec<ScatteringFn>]> {
        match &self.kind {
            ModelKind::Diagonal { omega } => Some(omega),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        match &self.kind {
            ModelKind::ConstantFlip { sign } => format!("flip({sign:+})"),
            ModelKind::Diagonal { .. } => format!("diagonal(dim_k={})", self.dim_k()),
            ModelKind::SigmaModelON { n, layout: SigmaLayout::Axiomatic } => format!("sigma_on(N={n})"),
            ModelKind::SigmaModelON { n, layout: SigmaLayout::AsPrinted } => format!("sigma_on(N={n}, as_printed)"),
        }
    }

    /// `S(ζ)` for `−κ ≤ Im ζ ≤ π+κ`.
    pub fn eval(&self, zeta: C64) -> Result<CMat> {
        let (lo, hi) = (-self.kappa, PI + self.kappa);
        if !(zeta.im >= lo - 1e-12 && zeta.im <= hi + 1e-12) || !zeta.re.is_finite() {
            return Err(Error::OutsideStrip { re: zeta.re, im: zeta.im, lo, hi });
        }
        let s = self.eval_raw(zeta)?;
        if s.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Numerical(format!("non-finite S-matrix entry at ζ = {zeta}")));
        }
        Ok(s)
    }

    pub fn eval_real(&self, theta: f64) -> Result<CMat> {
        self.eval(C64::new(theta, 0.0))
    }

    fn eval_raw(&self, zeta: C64) -> Result<CMat> {
        let d = self.dim_k();
        match &self.kind {
            ModelKind::ConstantFlip { sign } => Ok(flip(d) * C64::new(*sign, 0.0)),
            ModelKind::Diagonal { omega } => {
                let mut s = CMat::zeros(d * d, d * d);
                for a in 0..d {
                    for b in 0..d {
                        s[(a * d + b, b * d + a)] = omega[a][b].eval(zeta);
                    }
                }
                Ok(s)
            }
            ModelKind::SigmaModelON { n, layout } => {
                let [s1, s2, s3] = sigma::sigma_coefficients(*n, zeta)?;
                let (on_identity, on_flip) = match layout {
                    SigmaLayout::Axiomatic => (s3, s2),
                    SigmaLayout::AsPrinted => (s2, s3),
                };
                let mut s = CMat::zeros(d * d, d * d);
                for a in 0..d {
                    for c in 0..d {
                        s[(a * d + a, c * d + c)] += s1;
                    }
                    for b in 0..d {
                        s[(a * d + b, a * d + b)] += on_identity;
                        s[(a * d + b, b * d + a)] += on_flip;
                    }
                }
                Ok(s)
            }
        }
    }

    /// For diagonal models, `s_{αβ} = ω_{αβ}(0)`; otherwise the signed-flip
    /// form of `S(0)` when it has one.
    pub fn zero_point_signs(&self) -> Option<Vec<Vec<f64>>> {
        let d = self.dim_k();
        let s0 = self.eval_raw(C64::new(0.0, 0.0)).ok()?;
        let mut signs = vec![vec![0.0; d]; d];
        for a in 0..d {
            for b in 0..d {
                for g in 0..d {
                    for e in 0..d {
                        let v = comp(&s0, d, a, b, g, e);
                        let on_flip = a == e && b == g;
                        if on_flip {
                            if (v - ONE).norm() < 1e-12 {
                                signs[a][b] = 1.0;
                            } else if (v + ONE).norm() < 1e-12 {
                                signs[a][b] = -1.0;
                            } else {
                                return None;
                            }
                        } else if v.norm() > 1e-12 {
                            return None;
                        }
                    }
                }
            }
        }
        Some(signs)
    }
}

/// JSON model descriptor.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelDescriptor {
    Flip {
        sign: f64,
    },
    Diagonal {
        omega: Vec<Vec<ScatteringFn>>,
        #[serde(default)]
        kappa: Option<f64>,
    },
    SigmaOn {
        #[serde(rename = "N")]
        n: usize,
        #[serde(default)]
        kappa: Option<f64>,
        #[serde(default)]
        layout: SigmaLayout,
    },
}

impl ModelDescriptor {
    /// Builds the model. The sigma model brings its own neutral spectrum
    /// when none is given.
    pub fn build(&self, spectrum: Option<ParticleSpectrum>) -> Result<SMatrixModel> {
        match self {
            ModelDescriptor::Flip { sign } => {
                let spec = spectrum.ok_or_else(|| Error::Config("flip model needs a spectrum".into()))?;
                SMatrixModel::flip(spec, *sign)
            }
            ModelDescriptor::Diagonal { omega, kappa } => {
                let spec = spectrum.ok_or_else(|| Error::Config("diagonal model needs a spectrum".into()))?;
                SMatrixModel::diagonal(spec, omega.clone(), *kappa)
            }
            ModelDescriptor::SigmaOn { n, kappa, layout } => {
                let m = match &spectrum {
                    None => 1.0,
                    Some(s) => {
                        if s.dim_k() != *n || !s.is_neutral() || s.masses().iter().any(|&x| x != s.mass(0)) {
                            return Err(Error::Config(format!(
                                "sigma_on N={n} needs {n} neutral species of equal mass"
                            )));
                        }
                        s.mass(0)
                    }
                };
                SMatrixModel::sigma_on_with_layout(*n, m, *kappa, *layout)
            }
        }
    }
}
