//! The nuclear-norm bound chain: the Cauchy-type trace-class kernel, the
//! Hardy-to-L² map bound, the Hardy constants `υ(s,n)`, the per-`n` bounds
//! with and without the Pauli improvement, `s_min` and the bound series.

use std::f64::consts::{E, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, CMat};
use crate::smatrix::{norm_kappa, SMatrixModel};
use crate::C64;

/// Tube base `λ_{π/2} + (−c_n, c_n)^n` around `λ_{π/2} = −(π/2, …, π/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardyDomainSpec {
    pub n: usize,
    pub half_width: f64,
    pub kappa: f64,
}

impl HardyDomainSpec {
    /// The small cube with `c_n = κ/(2n)`.
    pub fn small_cube(n: usize, kappa: f64) -> Result<Self> {
        let spec = HardyDomainSpec { n, half_width: kappa / (2.0 * n.max(1) as f64), kappa };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let c = self.half_width;
        if !(c > 0.0 && c < PI / 2.0) {
            return Err(Error::Config(format!("cube half-width {c} must lie in (0, π/2)")));
        }
        if !(self.kappa > 0.0) {
            return Err(Error::Config(format!("κ = {} must be positive", self.kappa)));
        }
        Ok(())
    }

    pub fn center(&self) -> Vec<f64> {
        vec![-PI / 2.0; self.n]
    }

    /// Whether `Im ζ` lies in the open cube.
    pub fn contains(&self, imag: &[f64]) -> bool {
        imag.len() == self.n && imag.iter().all(|&y| (y + PI / 2.0).abs() < self.half_width)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub mass_gap: f64,
    pub dim_k: usize,
    pub kappa: f64,
    pub s_norm: f64,
    pub gamma: Option<f64>,
    pub gamma_tilde: Option<f64>,
}

impl BoundInputs {
    /// Mass gap, `dim 𝒦`, `κ` and the grid value of `‖S‖_κ` from a model.
    pub fn from_model(model: &SMatrixModel, resolution: usize) -> Result<Self> {
        let norm = norm_kappa(model, resolution)?;
        Ok(BoundInputs {
            mass_gap: model.spectrum().mass_gap(),
            dim_k: model.dim_k(),
            kappa: model.kappa(),
            s_norm: norm.value,
            gamma: None,
            gamma_tilde: None,
        })
    }

    pub fn with_intertwiner(mut self, gamma: f64, gamma_tilde: f64) -> Self {
        self.gamma = Some(gamma);
        self.gamma_tilde = Some(gamma_tilde);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass_gap > 0.0 && self.mass_gap.is_finite()) {
            return Err(Error::Config(format!("mass gap {} must be positive", self.mass_gap)));
        }
        if self.dim_k == 0 {
            return Err(Error::Config("dim 𝒦 must be positive".into()));
        }
        if !(self.kappa > 0.0 && self.kappa < PI / 2.0) {
            return Err(Error::Config(format!("κ = {} must lie in (0, π/2)", self.kappa)));
        }
        if !(self.s_norm > 0.0 && self.s_norm.is_finite()) {
            return Err(Error::Config(format!("‖S‖_κ = {} must be positive and finite", self.s_norm)));
        }
        Ok(())
    }

    pub fn pauli_factor(&self) -> Result<f64> {
        match (self.gamma, self.gamma_tilde) {
            (Some(g), Some(gt)) if g > 0.0 && gt > 0.0 => Ok(2.0 * g * gt),
            (Some(_), Some(_)) => Err(Error::Config("γ and γ̃ must be positive".into())),
            _ => Err(Error::Precondition("the Pauli-improved bound needs γ and γ̃ from an intertwiner".into())),
        }
    }
}

fn check_s(s: f64) -> Result<()> {
    if s > 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("splitting distance s = {s} must be positive")))
    }
}

/// Closed-form bound on the nuclear norm of the Hardy-to-L² map.
pub fn x_nuclear_bound(inputs: &BoundInputs, c_n: f64, s: f64, n: usize) -> Result<f64> {
    check_s(s)?;
    if !(c_n > 0.0 && c_n < PI / 2.0) {
        return Err(Error::Config(format!("c_n = {c_n} must lie in (0, π/2)")));
    }
    let m = inputs.mass_gap;
    let cos = c_n.cos();
    let bracket = inputs.dim_k as f64 / (0.5 * PI * m).sqrt() * (-0.5 * s * m * cos).exp() / (c_n * (s * cos).sqrt());
    Ok(bracket.powi(n as i32))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Upsilon {
    pub value: f64,
    /// `a(s,κ) = √(2/κ)·e^{−s m sin κ}/(π m s sin κ)^{1/4}`.
    pub a: f64,
}

pub fn upsilon_bound(inputs: &BoundInputs, s: f64, n: usize) -> Result<Upsilon> {
    check_s(s)?;
    inputs.validate()?;
    let (m, k) = (inputs.mass_gap, inputs.kappa);
    let a = (2.0 / k).sqrt() * (-s * m * k.sin()).exp() / (PI * m * s * k.sin()).powf(0.25);
    let growth = inputs.s_norm.powi(n as i32) * (inputs.dim_k as f64).powf(n as f64 / 2.0);
    Ok(Upsilon { value: f64::max(1.0, a * growth), a })
}

/// `C₁(s)`, `C₂`, `C₃` of the `n`-th power form, with `C₂` also in its
/// Pauli-improved version `2γγ̃·C₂` when intertwiner constants are known.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c2_pauli: Option<f64>,
    pub derivation: Vec<String>,
}

pub fn bound_constants(inputs: &BoundInputs, s: f64) -> Result<BoundConstants> {
    let ups = upsilon_bound(inputs, s, 0)?;
    let (m, d, k) = (inputs.mass_gap, inputs.dim_k as f64, inputs.kappa);
    let q = f64::max(1.0, inputs.s_norm * d.sqrt());
    let c1 = f64::max(1.0, ups.a);
    let c2 = q * d * (2.0 / (PI * m)).sqrt() * 2f64.powf(0.25) * 2.0 / k;
    let c3 = m / (2.0 * SQRT_2);
    let c2_pauli = inputs.pauli_factor().ok().map(|f| f * c2);
    let derivation = vec![
        "c_n = κ/(2n) ≤ π/4, so cos c_n ≥ 1/√2".to_string(),
        "X bound ≤ [dim𝒦·√(2/(π m))·2^{1/4}·(2/κ)·e^{−s m/(2√2)}/√s]^n · n^n".to_string(),
        "υ(s,n) ≤ max{1, a(s,κ)}·max{1, ‖S‖_κ √dim𝒦}^n".to_string(),
        format!("C₁(s) = max{{1, a(s,κ)}} = {c1:e}"),
        format!("C₂ = max{{1, ‖S‖_κ √dim𝒦}}·dim𝒦·√(2/(π m))·2^{{1/4}}·2/κ = {c2:e}"),
        format!("C₃ = m/(2√2) = {c3:e}"),
        "Pauli form: C₂ → 2γγ̃·C₂ and n^n → n^n/n!".to_string(),
    ];
    Ok(BoundConstants { c1, c2, c3, c2_pauli, derivation })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XiBounds {
    /// `υ(s,n)·X(κ/2n)`.
    pub plain: f64,
    /// `C₁(s)(C₂e^{−C₃s}/√s)^n·n^n`.
    pub corollary: f64,
    /// The corollary form times `(2γγ̃)^n/n!`.
    pub pauli: Option<f64>,
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

fn corollary_ln(c: &BoundConstants, c2: f64, s: f64, n: usize) -> f64 {
    let q = c2 * (-c.c3 * s).exp() / s.sqrt();
    let nn = if n == 0 { 0.0 } else { n as f64 * (n as f64).ln() };
    c.c1.ln() + n as f64 * q.ln() + nn
}

pub fn xi_bounds(inputs: &BoundInputs, s: f64, n: usize) -> Result<XiBounds> {
    if n == 0 {
        let pauli = inputs.pauli_factor().ok().map(|_| 1.0);
        return Ok(XiBounds { plain: 1.0, corollary: 1.0, pauli });
    }
    let spec = HardyDomainSpec::small_cube(n, inputs.kappa)?;
    let plain = upsilon_bound(inputs, s, n)?.value * x_nuclear_bound(inputs, spec.half_width, s, n)?;
    let c = bound_constants(inputs, s)?;
    let corollary = corollary_ln(&c, c.c2, s, n).exp();
    let pauli = match inputs.pauli_factor() {
        Ok(f) => Some(corollary * pauli_ratio(f, n)),
        Err(_) => None,
    };
    Ok(XiBounds { plain, corollary, pauli })
}

/// `f^n/n!`, as a running product.
pub fn pauli_ratio(f: f64, n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, j| acc * f / j as f64)
}

/// Root of `e·C₂·e^{−C₃s}/√s = 1` by bisection.
pub fn s_min(c2: f64, c3: f64) -> Result<f64> {
    if !(c2 > 0.0 && c3 > 0.0) {
        return Err(Error::Config(format!("C₂ = {c2} and C₃ = {c3} must be positive")));
    }
    let f = |s: f64| 1.0 + c2.ln() - c3 * s - 0.5 * s.ln();
    let (mut lo, mut hi) = (1e-3 / c3, 1e3 / c3);
    let mut expansions = 0;
    while !(f(lo) > 0.0 && f(hi) < 0.0) {
        if expansions == 6 {
            return Err(Error::Numerical(format!(
                "no sign change of ln(e C₂) − C₃ s − ½ ln s on [{lo:e}, {hi:e}]: f(lo) = {:e}, f(hi) = {:e}",
                f(lo),
                f(hi)
            )));
        }
        lo /= 10.0;
        hi *= 10.0;
        expansions += 1;
    }
    while hi - lo > 1e-10 * lo.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesReport {
    pub s: f64,
    /// `e·C₂e^{−C₃s}/√s` with the Pauli-improved `C₂`.
    pub ratio: f64,
    pub convergent: bool,
    pub terms: Vec<f64>,
    pub partial_sums: Vec<f64>,
    pub tail_bound: Option<f64>,
}

impl SeriesReport {
    pub fn verdict(&self) -> &'static str {
        if self.convergent {
            "convergent"
        } else {
            "bound inconclusive"
        }
    }
}

/// Partial sums of the Pauli-improved bound series, extended until the
/// Stirling tail `C₁(eq)^{N+1}/((1−eq)√(2π))` drops below `tail_tol` or
/// `n_max` terms are reached.
pub fn series_at(inputs: &BoundInputs, s: f64, tail_tol: f64, n_max: usize) -> Result<SeriesReport> {
    check_s(s)?;
    let c = bound_constants(inputs, s)?;
    let c2 = c.c2 * inputs.pauli_factor()?;
    let q = c2 * (-c.c3 * s).exp() / s.sqrt();
    let ratio = E * q;
    let convergent = ratio < 1.0;
    let mut terms = vec![1.0];
    let mut partial_sums = vec![1.0];
    let mut tail_bound = None;
    for n in 1..=n_max {
        let t = (corollary_ln(&c, c2, s, n) - ln_factorial(n)).exp();
        terms.push(t);
        partial_sums.push(partial_sums[n - 1] + t);
        if convergent {
            let tail = c.c1 * ratio.powi(n as i32 + 1) / ((1.0 - ratio) * (2.0 * PI).sqrt());
            if tail < tail_tol {
                tail_bound = Some(tail);
                break;
            }
        }
    }
    Ok(SeriesReport { s, ratio, convergent, terms, partial_sums, tail_bound })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SminReport {
    pub constants: BoundConstants,
    pub s_min: f64,
    pub series: Vec<SeriesReport>,
}

/// `s_min` from the Pauli-improved constants, and the series at each `s`.
pub fn smin_and_series(inputs: &BoundInputs, s_values: &[f64], tail_tol: f64) -> Result<SminReport> {
    let constants = bound_constants(inputs, 1.0)?;
    let c2 = constants.c2 * inputs.pauli_factor()?;
    let s_min = s_min(c2, constants.c3)?;
    let series = s_values.iter().map(|&s| series_at(inputs, s, tail_tol, 2000)).collect::<Result<_>>()?;
    Ok(SminReport { constants, s_min, series })
}

/// Smallest `n₀ ≤ n_max` with `pauli(n) ≤ plain(n)` for all `n₀ ≤ n ≤ n_max`.
pub fn pauli_crossover(inputs: &BoundInputs, s: f64, n_max: usize) -> Result<Option<usize>> {
    let mut n0 = None;
    for n in (1..=n_max).rev() {
        let b = xi_bounds(inputs, s, n)?;
        if b.pauli.ok_or_else(|| Error::Precondition("γ, γ̃ missing".into()))? <= b.plain {
            n0 = Some(n);
        } else {
            break;
        }
    }
    Ok(n0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRow {
    pub n: usize,
    pub upsilon: f64,
    pub x1: f64,
    pub xi1: f64,
    pub xi1_corollary: f64,
    pub xi1_pauli: Option<f64>,
    pub partial_sum: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub inputs: BoundInputs,
    pub s: f64,
    pub rows: Vec<BoundRow>,
    pub constants: BoundConstants,
    pub s_min: Option<f64>,
    pub verdict: Option<String>,
    pub notes: Vec<String>,
}

pub fn bound_report(inputs: &BoundInputs, s: f64, n_max: usize) -> Result<BoundReport> {
    inputs.validate()?;
    let constants = bound_constants(inputs, s)?;
    let mut rows = Vec::new();
    let mut sum = 0.0;
    for n in 0..=n_max {
        let xi = xi_bounds(inputs, s, n)?;
        let (upsilon, x1) = if n == 0 {
            (1.0, 1.0)
        } else {
            let c = HardyDomainSpec::small_cube(n, inputs.kappa)?.half_width;
            (upsilon_bound(inputs, s, n)?.value, x_nuclear_bound(inputs, c, s, n)?)
        };
        let partial_sum = xi.pauli.map(|p| {
            sum += p;
            sum
        });
        rows.push(BoundRow { n, upsilon, x1, xi1: xi.plain, xi1_corollary: xi.corollary, xi1_pauli: xi.pauli, partial_sum });
    }
    let (s_min_value, verdict) = match constants.c2_pauli {
        Some(c2) => {
            let sm = s_min(c2, constants.c3)?;
            let ratio = E * c2 * (-constants.c3 * s).exp() / s.sqrt();
            (Some(sm), Some(if ratio < 1.0 { "convergent" } else { "bound inconclusive" }.to_string()))
        }
        None => (None, None),
    };
    let notes = vec![
        "υ(s,n) bounds the map A ↦ (U_{s/2}AΩ)_n; the Hardy-property definition writes the same constant as υ(2s,n)"
            .to_string(),
        "only the small-cube tubes c_n = κ/(2n) are used".to_string(),
    ];
    Ok(BoundReport { inputs: *inputs, s, rows, constants, s_min: s_min_value, verdict, notes })
}

/// Square-integrable profiles `g` for the kernel, with their exact `‖g‖₂²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    /// `exp(−θ²/(2σ²))`.
    Gaussian { sigma: f64 },
    /// `exp(−θ²/(2σ²) + ikθ)`.
    GaussianPhase { sigma: f64, k: f64 },
    /// `(1+θ)·exp(−θ²/2)`.
    GaussianLinear,
    /// `sech θ`.
    Sech,
    /// `exp(−r|θ|)`.
    ExpAbs { rate: f64 },
}

impl Profile {
    pub fn value(&self, t: f64) -> C64 {
        match *self {
            Profile::Gaussian { sigma } => C64::new((-t * t / (2.0 * sigma * sigma)).exp(), 0.0),
            Profile::GaussianPhase { sigma, k } => C64::from_polar((-t * t / (2.0 * sigma * sigma)).exp(), k * t),
            Profile::GaussianLinear => C64::new((1.0 + t) * (-t * t / 2.0).exp(), 0.0),
            Profile::Sech => C64::new(1.0 / t.cosh(), 0.0),
            Profile::ExpAbs { rate } => C64::new((-rate * t.abs()).exp(), 0.0),
        }
    }

    pub fn norm_sq(&self) -> f64 {
        match *self {
            Profile::Gaussian { sigma } | Profile::GaussianPhase { sigma, .. } => sigma * PI.sqrt(),
            Profile::GaussianLinear => 1.5 * PI.sqrt(),
            Profile::Sech => 2.0,
            Profile::ExpAbs { rate } => 1.0 / rate,
        }
    }

    pub fn reflected(&self) -> Reflected {
        Reflected(*self)
    }
}

/// `g₋(θ) = g(−θ)`.
#[derive(Debug, Clone, Copy)]
pub struct Reflected(pub Profile);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelGrid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Default for KernelGrid {
    fn default() -> Self {
        KernelGrid { lo: -10.0, hi: 10.0, points: 801 }
    }
}

impl KernelGrid {
    pub fn refined(&self) -> Self {
        KernelGrid { points: 2 * self.points - 1, ..*self }
    }

    fn nodes(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        if self.points < 3 || !(self.hi > self.lo) {
            return Err(Error::Config(format!("kernel grid {self:?} needs hi > lo and at least 3 points")));
        }
        let h = (self.hi - self.lo) / (self.points - 1) as f64;
        let x: Vec<f64> = (0..self.points).map(|i| self.lo + h * i as f64).collect();
        let mut w = vec![h; self.points];
        w[0] = h / 2.0;
        w[self.points - 1] = h / 2.0;
        Ok((x, w))
    }
}

fn kernel_matrix(g: impl Fn(f64) -> C64, b: f64, grid: &KernelGrid) -> Result<CMat> {
    if b == 0.0 || !b.is_finite() {
        return Err(Error::Config(format!("kernel shift b = {b} must be nonzero")));
    }
    let (x, w) = grid.nodes()?;
    let gv: Vec<C64> = x.iter().map(|&t| g(t)).collect();
    let pre = C64::new(-b.signum(), 0.0) / C64::new(0.0, 2.0 * PI);
    let n = x.len();
    Ok(CMat::from_fn(n, n, |i, j| {
        pre * gv[i].conj() * gv[j] / C64::new(x[j] - x[i], b) * (w[i] * w[j]).sqrt()
    }))
}

/// Symmetrically weighted discretisation of `R_{g,b}` on the grid.
pub fn r_kernel_matrix(g: &Profile, b: f64, grid: &KernelGrid) -> Result<CMat> {
    kernel_matrix(|t| g.value(t), b, grid)
}

/// Trapezoid trace `Σ w|g|²/(2π|b|)`.
pub fn r_kernel_trace(g: &Profile, b: f64, grid: &KernelGrid) -> Result<f64> {
    if b == 0.0 {
        return Err(Error::Config("kernel shift b must be nonzero".into()));
    }
    let (x, w) = grid.nodes()?;
    Ok(x.iter().zip(&w).map(|(&t, &wt)| wt * g.value(t).norm_sqr()).sum::<f64>() / (2.0 * PI * b.abs()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RKernelReport {
    pub b: f64,
    pub trace: f64,
    pub refined_trace: f64,
    pub exact_trace_norm: f64,
    pub min_eigenvalue: f64,
    pub eigen_trace: f64,
}

/// Trace, smallest eigenvalue and exact trace norm `‖g‖₂²/(2π|b|)`.
pub fn r_kernel(g: &Profile, b: f64, grid: &KernelGrid, tol: f64) -> Result<RKernelReport> {
    let trace = r_kernel_trace(g, b, grid)?;
    let refined_trace = r_kernel_trace(g, b, &grid.refined())?;
    if (trace - refined_trace).abs() > tol {
        return Err(Error::Numerical(format!(
            "kernel grid too coarse: trace {trace:e} vs {refined_trace:e} on the refined grid"
        )));
    }
    let eig = hermitian_eigenvalues(&r_kernel_matrix(g, b, grid)?);
    Ok(RKernelReport {
        b,
        trace,
        refined_trace,
        exact_trace_norm: g.norm_sq() / (2.0 * PI * b.abs()),
        min_eigenvalue: eig.iter().copied().fold(f64::INFINITY, f64::min),
        eigen_trace: eig.iter().sum(),
    })
}

/// Sorted spectra of `R_{g,b}` and `R_{g₋,−b}`.
pub fn sign_flip_spectra(g: &Profile, b: f64, grid: &KernelGrid) -> Result<(Vec<f64>, Vec<f64>)> {
    let sort = |mut v: Vec<f64>| {
        v.sort_by(f64::total_cmp);
        v
    };
    let a = sort(hermitian_eigenvalues(&r_kernel_matrix(g, b, grid)?));
    let flipped = g.reflected();
    let m = kernel_matrix(|t| flipped.0.value(-t), -b, grid)?;
    Ok((a, sort(hermitian_eigenvalues(&m))))
}

/// `e_n` of the eigenvalues from the power sums `Tr Z^k` by Newton's
/// identities, checked against `e_n ≤ (Tr Z)^n/n!`.
pub fn antisym_trace(z: &CMat, n: usize) -> Result<f64> {
    if n == 0 {
        return Ok(1.0);
    }
    if !z.is_square() {
        return Err(Error::Config("antisymmetric trace needs a square matrix".into()));
    }
    let eig = hermitian_eigenvalues(z);
    let scale = eig.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -1e-10 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Precondition(format!("matrix is not positive semidefinite: eigenvalue {min:e}")));
    }
    let mut power = CMat::identity(z.nrows(), z.ncols());
    let mut p = Vec::with_capacity(n);
    for _ in 0..n {
        power = &power * z;
        p.push(power.trace().re);
    }
    let mut e = vec![1.0];
    for k in 1..=n {
        let s: f64 = (1..=k).map(|i| if i % 2 == 1 { 1.0 } else { -1.0 } * e[k - i] * p[i - 1]).sum();
        e.push(s / k as f64);
    }
    let en = e[n].max(0.0);
    let bound = pauli_ratio(p[0], n);
    if en > bound * (1.0 + 1e-9) + 1e-12 * scale.powi(n as i32) {
        return Err(Error::Numerical(format!("e_{n} = {en:e} exceeds (Tr Z)^{n}/{n}! = {bound:e}")));
    }
    Ok(if e[n].abs() <= 1e-12 * scale.powi(n as i32).max(f64::MIN_POSITIVE) { 0.0 } else { en })
}

/// `e_n(λ)` by expanding `Π(1 + λ_i t)`.
pub fn elementary_symmetric(values: &[f64], n: usize) -> f64 {
    let mut c = vec![0.0; n + 1];
    c[0] = 1.0;
    for &x in values {
        for j in (1..=n).rev() {
            c[j] += x * c[j - 1];
        }
    }
    c[n]
}
