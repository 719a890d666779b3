//! JSON run configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::fields::TestFunction;
use crate::fock::grid::RapidityGrid;
use crate::nuclearity::{KernelGrid, Profile};
use crate::smatrix::{ModelDescriptor, SMatrixModel, ScatteringFn};
use crate::spectrum::{ParticleSpectrum, SpectrumDescriptor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    Axioms,
    Fock,
    Diagrams,
    Bounds,
    Smin,
    Intertwiner,
    Wedge,
}

impl CheckName {
    pub const ALL: [CheckName; 7] = [
        CheckName::Axioms,
        CheckName::Fock,
        CheckName::Diagrams,
        CheckName::Bounds,
        CheckName::Smin,
        CheckName::Intertwiner,
        CheckName::Wedge,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::Axioms => "axioms",
            CheckName::Fock => "fock",
            CheckName::Diagrams => "diagrams",
            CheckName::Bounds => "bounds",
            CheckName::Smin => "smin",
            CheckName::Intertwiner => "intertwiner",
            CheckName::Wedge => "wedge",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown check {s:?}; expected one of {}", Self::names())))
    }

    fn names() -> String {
        Self::ALL.map(|c| c.as_str()).join(", ")
    }

    pub fn default_tolerance(self) -> f64 {
        match self {
            CheckName::Axioms => 1e-8,
            CheckName::Fock => 1e-11,
            CheckName::Diagrams => 1e-10,
            CheckName::Bounds => 1e-12,
            CheckName::Smin => 1e-6,
            CheckName::Intertwiner => 1e-12,
            CheckName::Wedge => 1e-6,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WedgeConfig {
    pub f: TestFunction,
    pub g: TestFunction,
    pub shift: [f64; 2],
    pub rapidity: RapidityGrid,
    /// A pair both inside the right wedge, whose commutator must not vanish.
    pub control: Option<[TestFunction; 2]>,
}

impl Default for WedgeConfig {
    fn default() -> Self {
        Self {
            f: TestFunction::new([0.0, 3.0], [1.0, 1.0], 1),
            g: TestFunction::new([0.0, -3.0], [1.0, 1.0], 1),
            shift: [0.0, 0.0],
            rapidity: RapidityGrid::default(),
            control: Some([
                TestFunction::new([-1.5, 4.0], [1.0, 1.0], 1),
                TestFunction::new([2.0, 4.5], [1.0, 1.0], 1),
            ]),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelCase {
    pub profile: Profile,
    pub b: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Grids {
    pub axiom_samples: usize,
    pub sample_range: f64,
    pub norm_resolution: usize,
    pub fock_n_max: usize,
    pub fock_samples: usize,
    pub confluence_expressions: usize,
    pub diagrams_n_max: usize,
    pub combinatorial_n_max: usize,
    pub diagram_words: usize,
    pub reidemeister_samples: usize,
    /// Shift parameter for the bound table; `None` uses `2·s_min`.
    pub bounds_s: Option<f64>,
    pub bounds_n_max: usize,
    /// Points for the series check; empty uses `2·s_min`.
    pub smin_s_values: Vec<f64>,
    pub kernel: KernelGrid,
    pub kernel_cases: Vec<KernelCase>,
    pub intertwiner_n_max: usize,
    pub intertwiner_samples: usize,
    pub gamma_resolution: usize,
    pub wedge: WedgeConfig,
}

impl Default for Grids {
    fn default() -> Self {
        Self {
            axiom_samples: 100,
            sample_range: 3.0,
            norm_resolution: 2001,
            fock_n_max: 4,
            fock_samples: 10,
            confluence_expressions: 200,
            diagrams_n_max: 4,
            combinatorial_n_max: 8,
            diagram_words: 6,
            reidemeister_samples: 5,
            bounds_s: None,
            bounds_n_max: 30,
            smin_s_values: Vec::new(),
            kernel: KernelGrid::default(),
            kernel_cases: vec![
                KernelCase { profile: Profile::Gaussian { sigma: 1.0 }, b: 1.0 },
                KernelCase { profile: Profile::Gaussian { sigma: 0.7 }, b: -2.5 },
                KernelCase { profile: Profile::Sech, b: 0.5 },
            ],
            intertwiner_n_max: 4,
            intertwiner_samples: 5,
            gamma_resolution: 401,
            wedge: WedgeConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub csv: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("zlab-out"), csv: true }
    }
}

/// Missing fields take their defaults; a diagonal model without a spectrum
/// gets neutral unit-mass particles.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub spectrum: Option<SpectrumDescriptor>,
    #[serde(default = "default_model")]
    pub model: ModelDescriptor,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_checks")]
    pub checks: Vec<CheckName>,
    #[serde(default)]
    pub tolerances: BTreeMap<CheckName, f64>,
    #[serde(default)]
    pub grids: Grids,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_model() -> ModelDescriptor {
    ModelDescriptor::Diagonal { omega: vec![vec![ScatteringFn::constant(-1.0)]], kappa: None }
}

fn default_seed() -> u64 {
    42
}

fn default_checks() -> Vec<CheckName> {
    CheckName::ALL.to_vec()
}

impl Default for RunConfig {
    /// The scalar model `ω ≡ −1` with every check enabled.
    fn default() -> Self {
        Self {
            spectrum: None,
            model: default_model(),
            seed: default_seed(),
            checks: default_checks(),
            tolerances: BTreeMap::new(),
            grids: Grids::default(),
            output: OutputConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(format!("config: {e}")))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn tolerance(&self, check: CheckName) -> f64 {
        self.tolerances.get(&check).copied().unwrap_or(check.default_tolerance())
    }

    /// Parses `name=value` and stores it.
    pub fn set_tolerance(&mut self, spec: &str) -> Result<()> {
        let (name, value) =
            spec.split_once('=').ok_or_else(|| Error::Config(format!("tolerance {spec:?} is not name=value")))?;
        let check = CheckName::parse(name.trim())?;
        let v: f64 = value.trim().parse().map_err(|_| Error::Config(format!("tolerance value {value:?} is not a number")))?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Config(format!("tolerance for {name} must be positive, got {v}")));
        }
        self.tolerances.insert(check, v);
        Ok(())
    }

    pub fn build_model(&self) -> Result<SMatrixModel> {
        let mut spec = self.spectrum.as_ref().map(|s| s.build()).transpose()?;
        if let (None, ModelDescriptor::Diagonal { omega, .. }) = (&spec, &self.model) {
            spec = Some(ParticleSpectrum::neutral(omega.len(), 1.0)?);
        }
        self.model.build(spec)
    }

    /// Checks the grid parameters and the model; every error maps to exit code 2.
    pub fn validate(&self) -> Result<SMatrixModel> {
        let g = &self.grids;
        let positive = [
            ("axiom_samples", g.axiom_samples),
            ("norm_resolution", g.norm_resolution.saturating_sub(1)),
            ("fock_samples", g.fock_samples),
            ("confluence_expressions", g.confluence_expressions),
            ("diagram_words", g.diagram_words),
            ("reidemeister_samples", g.reidemeister_samples),
            ("intertwiner_samples", g.intertwiner_samples),
            ("gamma_resolution", g.gamma_resolution.saturating_sub(1)),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::Config(format!("grids.{name} is too small")));
            }
        }
        if !(g.sample_range > 0.0) {
            return Err(Error::Config("grids.sample_range must be positive".into()));
        }
        if g.fock_n_max > 5 || g.diagrams_n_max > 6 || g.combinatorial_n_max > 10 || g.intertwiner_n_max > 6 {
            return Err(Error::Config(
                "grid caps: fock_n_max ≤ 5, diagrams_n_max ≤ 6, combinatorial_n_max ≤ 10, intertwiner_n_max ≤ 6".into(),
            ));
        }
        if g.bounds_s.is_some_and(|s| !(s > 0.0)) || g.smin_s_values.iter().any(|&s| !(s > 0.0)) {
            return Err(Error::Config("shift parameters s must be positive".into()));
        }
        g.wedge.rapidity.validate()?;
        let model = self.build_model()?;
        g.wedge.f.validate(model.spectrum())?;
        g.wedge.g.validate(model.spectrum())?;
        for h in g.wedge.control.iter().flatten() {
            h.validate(model.spectrum())?;
        }
        Ok(model)
    }
}
