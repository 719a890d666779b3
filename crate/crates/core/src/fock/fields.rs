//! Test functions, their on-shell Fourier transforms, the fields `φ`, `φ′`
//! on grid states, and the wedge commutator `[φ′(f), φ(g)]Ω`.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::grid::{GridSTable, GridState, RapidityGrid};
use crate::smatrix::SMatrixModel;
use crate::spectrum::ParticleSpectrum;
use crate::C64;

/// Gauss-Legendre nodes per axis (per panel).
pub const QUAD_NODES: usize = 128;

/// Allowed disagreement between the base and doubled quadrature.
pub const QUAD_TOL: f64 = 1e-10;

/// Slack for the number bounds, relative to the right-hand side.
const BOUND_SLACK: f64 = 1e-12;

fn bump(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - u * u)).exp()
    }
}

fn default_component() -> usize {
    1
}

fn default_amplitude() -> [f64; 2] {
    [1.0, 0.0]
}

/// `f(x⁰, x¹) = A · bump((x⁰−c⁰)/r⁰) · bump((x¹−c¹)/r¹) · e_α`, supported in
/// the closed box `[c⁰ ± r⁰] × [c¹ ± r¹]`. `component` is 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub center: [f64; 2],
    pub radius: [f64; 2],
    #[serde(default = "default_component")]
    pub component: usize,
    #[serde(default = "default_amplitude")]
    pub amplitude: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wedge {
    Right,
    Left,
}

impl TestFunction {
    pub fn new(center: [f64; 2], radius: [f64; 2], component: usize) -> Self {
        TestFunction { center, radius, component, amplitude: default_amplitude() }
    }

    pub fn index(&self) -> usize {
        self.component - 1
    }

    pub fn amp(&self) -> C64 {
        C64::new(self.amplitude[0], self.amplitude[1])
    }

    pub fn validate(&self, spec: &ParticleSpectrum) -> Result<()> {
        if self.component == 0 || self.component > spec.dim_k() {
            return Err(Error::Config(format!("test function component {} out of range", self.component)));
        }
        if !(self.radius[0] > 0.0 && self.radius[1] > 0.0) || self.center.iter().any(|c| !c.is_finite()) {
            return Err(Error::Config(format!("bad test function box {self:?}")));
        }
        Ok(())
    }

    /// The nonzero component `f^α(x)`, `α = self.index()`.
    pub fn value(&self, x: [f64; 2]) -> C64 {
        self.amp() * bump((x[0] - self.center[0]) / self.radius[0]) * bump((x[1] - self.center[1]) / self.radius[1])
    }

    /// `(f*)^α(x) = conj f^{ᾱ}(x)`.
    pub fn star(&self, spec: &ParticleSpectrum) -> Self {
        TestFunction {
            component: spec.conj(self.index()) + 1,
            amplitude: [self.amplitude[0], -self.amplitude[1]],
            ..*self
        }
    }

    /// Translated by `a`.
    pub fn shifted(&self, a: [f64; 2]) -> Self {
        TestFunction { center: [self.center[0] + a[0], self.center[1] + a[1]], ..*self }
    }

    /// Whether the support lies in `W_R + a` (`x¹ − a¹ > |x⁰ − a⁰|`) or `W_L + a`.
    pub fn inside(&self, wedge: Wedge, a: [f64; 2]) -> bool {
        let spread = (self.center[0] - a[0]).abs() + self.radius[0];
        let dist = match wedge {
            Wedge::Right => self.center[1] - a[1] - self.radius[1],
            Wedge::Left => a[1] - self.center[1] - self.radius[1],
        };
        dist > spread
    }

    /// Whether the supports of `self` and `other` are spacelike separated.
    pub fn spacelike_to(&self, other: &TestFunction) -> bool {
        let dx0 = (self.center[0] - other.center[0]).abs() + self.radius[0] + other.radius[0];
        let dx1 = (self.center[1] - other.center[1]).abs() - self.radius[1] - other.radius[1];
        dx1 > dx0
    }
}

/// `∫_{−1}^{1} cos(k u) bump(u) du` by composite Gauss-Legendre quadrature,
/// with panels added as `|k|` grows.
struct BumpTransform {
    rule: GaussLegendre,
    nodes: usize,
}

impl BumpTransform {
    fn new(nodes: usize) -> Self {
        BumpTransform { rule: GaussLegendre::new(NonZeroUsize::new(nodes).unwrap()), nodes }
    }

    fn eval(&self, k: f64) -> f64 {
        // About 0.4 node per radian of oscillation keeps each panel well resolved.
        let panels = 1 + (k.abs() / (0.4 * self.nodes as f64)).ceil() as usize;
        let w = 1.0 / panels as f64;
        (0..panels)
            .map(|p| {
                let (a, b) = (p as f64 * w, (p + 1) as f64 * w);
                self.rule.integrate(a, b, |u| (k * u).cos() * bump(u))
            })
            .sum::<f64>()
            * 2.0
    }
}

/// `f^{±,α}(θ_i)` on a grid, at `i·d + α`.
#[derive(Debug, Clone)]
pub struct Transforms {
    pub plus: Vec<C64>,
    pub minus: Vec<C64>,
    /// Largest change when the quadrature is doubled.
    pub quad_delta: f64,
}

fn transforms_with(f: &TestFunction, spec: &ParticleSpectrum, grid: &RapidityGrid, nodes: usize) -> Result<(Vec<C64>, Vec<C64>)> {
    f.validate(spec)?;
    let d = spec.dim_k();
    let bt = BumpTransform::new(nodes);
    let alpha = f.index();
    let (r0, r1) = (f.radius[0], f.radius[1]);
    let pref = f.amp() * r0 * r1 / (2.0 * std::f64::consts::PI);
    let mut plus = vec![C64::new(0.0, 0.0); grid.points * d];
    let mut minus = plus.clone();
    for i in 0..grid.points {
        let p = spec.momentum(alpha, grid.theta(i))?;
        // Each axis integral factorises: ∫ e^{±i p⁰x⁰} bump((x⁰−c⁰)/r⁰) dx⁰
        // = r⁰ e^{±i p⁰c⁰} B(p⁰r⁰), and B is even and real.
        let mag = bt.eval(p[0] * r0) * bt.eval(p[1] * r1);
        let phase = p[0] * f.center[0] - p[1] * f.center[1];
        plus[i * d + alpha] = pref * mag * C64::new(0.0, phase).exp();
        minus[i * d + alpha] = pref * mag * C64::new(0.0, -phase).exp();
    }
    Ok((plus, minus))
}

/// `f^±(θ) = (1/2π) ∫ d²x e^{±i p(θ)·x} f(x)` with `p·x = p⁰x⁰ − p¹x¹`,
/// checked against the doubled quadrature.
pub fn transforms(f: &TestFunction, spec: &ParticleSpectrum, grid: &RapidityGrid) -> Result<Transforms> {
    let (plus, minus) = transforms_with(f, spec, grid, QUAD_NODES)?;
    let (p2, m2) = transforms_with(f, spec, grid, 2 * QUAD_NODES)?;
    let delta = plus.iter().zip(&p2).chain(minus.iter().zip(&m2)).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    if delta > QUAD_TOL {
        return Err(Error::Numerical(format!(
            "Fourier quadrature did not converge: base and doubled rules differ by {delta:e}"
        )));
    }
    Ok(Transforms { plus, minus, quad_delta: delta })
}

/// `(Jψ)^α(θ) = conj ψ^{ᾱ}(θ)` on one-particle grid data.
pub fn pct_one(spec: &ParticleSpectrum, psi: &[C64]) -> Vec<C64> {
    let d = spec.dim_k();
    let mut out = vec![C64::new(0.0, 0.0); psi.len()];
    for (i, chunk) in out.chunks_mut(d).enumerate() {
        for (a, z) in chunk.iter_mut().enumerate() {
            *z = psi[i * d + spec.conj(a)].conj();
        }
    }
    out
}

fn one_norm(grid: &RapidityGrid, psi: &[C64]) -> f64 {
    (psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.step()).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    Phi,
    PhiPrime,
}

/// Field operators of one model on one grid.
pub struct FieldContext<'a> {
    model: &'a SMatrixModel,
    grid: RapidityGrid,
    table: GridSTable,
}

impl<'a> FieldContext<'a> {
    pub fn new(model: &'a SMatrixModel, grid: RapidityGrid) -> Result<Self> {
        grid.validate()?;
        Ok(FieldContext { model, grid, table: GridSTable::new(model, &grid)? })
    }

    pub fn grid(&self) -> &RapidityGrid {
        &self.grid
    }

    pub fn table(&self) -> &GridSTable {
        &self.table
    }

    pub fn spectrum(&self) -> &ParticleSpectrum {
        self.model.spectrum()
    }

    /// `z†(φ)Ψ`, checking `‖z†(φ)Ψ‖ ≤ ‖φ‖‖(N+1)^{1/2}Ψ‖`.
    pub fn create(&self, phi: &[C64], psi: &GridState) -> Result<GridState> {
        let out = psi.create(&self.table, phi)?;
        let bound = one_norm(&self.grid, phi) * psi.number_half_norm(1.0);
        check_bound("z†", out.norm(), bound)?;
        Ok(out)
    }

    /// `z(φ)Ψ`, checking `‖z(φ)Ψ‖ ≤ ‖φ‖‖N^{1/2}Ψ‖`.
    pub fn annihilate(&self, phi: &[C64], psi: &GridState) -> Result<GridState> {
        let out = psi.annihilate(phi)?;
        let bound = one_norm(&self.grid, phi) * psi.number_half_norm(0.0);
        check_bound("z", out.norm(), bound)?;
        Ok(out)
    }

    /// `φ(f)Ψ = z†(f⁺)Ψ + z(Jf⁻)Ψ`, or
    /// `φ′(f)Ψ = J z†(Jf⁺) JΨ + J z(f⁻) JΨ`.
    pub fn apply(&self, which: Field, tf: &Transforms, psi: &GridState) -> Result<GridState> {
        let spec = self.spectrum();
        match which {
            Field::Phi => {
                let a = self.create(&tf.plus, psi)?;
                let b = self.annihilate(&pct_one(spec, &tf.minus), psi)?;
                a.add(&b)
            }
            Field::PhiPrime => {
                let j = psi.pct(spec)?;
                let a = self.create(&pct_one(spec, &tf.plus), &j)?;
                let b = self.annihilate(&tf.minus, &j)?;
                a.add(&b)?.pct(spec)
            }
        }
    }

    pub fn field(&self, which: Field, f: &TestFunction, psi: &GridState) -> Result<GridState> {
        let tf = transforms(f, self.spectrum(), &self.grid)?;
        self.apply(which, &tf, psi)
    }
}

fn check_bound(op: &str, lhs: f64, rhs: f64) -> Result<()> {
    if lhs > rhs * (1.0 + BOUND_SLACK) + 1e-300 {
        return Err(Error::Numerical(format!("number bound violated for {op}: {lhs:e} > {rhs:e}")));
    }
    Ok(())
}

/// Norms of `([φ′(f), φ(g)]Ω)_n` for `n = 0, 2` on one grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CommutatorNorms {
    pub n0: f64,
    pub n2: f64,
    /// Scale of the individual terms, for judging the residuals.
    pub scale: f64,
}

/// `[φ′(f), φ(g)]Ω` through the grid field operators.
pub fn commutator_on_vacuum(model: &SMatrixModel, f: &TestFunction, g: &TestFunction, grid: RapidityGrid) -> Result<CommutatorNorms> {
    let ctx = FieldContext::new(model, grid)?;
    let spec = model.spectrum();
    let tf = transforms(f, spec, &grid)?;
    let tg = transforms(g, spec, &grid)?;
    let omega = GridState::vacuum(grid, spec.dim_k(), 2)?;
    let a = ctx.apply(Field::PhiPrime, &tf, &ctx.apply(Field::Phi, &tg, &omega)?)?;
    let b = ctx.apply(Field::Phi, &tg, &ctx.apply(Field::PhiPrime, &tf, &omega)?)?;
    let c = a.sub(&b)?;
    Ok(CommutatorNorms {
        n0: c.sector_norm_sq(0).sqrt(),
        n2: c.sector_norm_sq(2).sqrt(),
        scale: a.sector_norm_sq(0).sqrt().max(a.sector_norm_sq(2).sqrt()),
    })
}

/// `Σ_α ∫ [f^{−,α} g^{+,ᾱ} − g^{−,ᾱ} f^{+,α}] dθ`, the vacuum component of the
/// commutator written out by hand.
pub fn vacuum_commutator_closed(spec: &ParticleSpectrum, f: &TestFunction, g: &TestFunction, grid: RapidityGrid) -> Result<C64> {
    let tf = transforms(f, spec, &grid)?;
    let tg = transforms(g, spec, &grid)?;
    let d = spec.dim_k();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..grid.points {
        for a in 0..d {
            let b = spec.conj(a);
            acc += tf.minus[i * d + a] * tg.plus[i * d + b] - tg.minus[i * d + b] * tf.plus[i * d + a];
        }
    }
    Ok(acc * grid.step())
}

#[derive(Debug, Clone, Serialize)]
pub struct WedgeResidual {
    pub coarse: CommutatorNorms,
    pub fine: CommutatorNorms,
    /// `max(|n0_coarse − n0_fine|, |n2_coarse − n2_fine|)`.
    pub resolution_delta: f64,
    pub quad_delta: f64,
}

impl WedgeResidual {
    pub fn max_residual(&self) -> f64 {
        self.coarse.n0.max(self.coarse.n2).max(self.fine.n0).max(self.fine.n2)
    }
}

fn two_resolution(model: &SMatrixModel, f: &TestFunction, g: &TestFunction, grid: RapidityGrid) -> Result<WedgeResidual> {
    let spec = model.spectrum();
    let coarse = commutator_on_vacuum(model, f, g, grid)?;
    let fine = commutator_on_vacuum(model, f, g, grid.refined())?;
    let quad_delta = transforms(f, spec, &grid)?.quad_delta.max(transforms(g, spec, &grid)?.quad_delta);
    Ok(WedgeResidual {
        resolution_delta: (coarse.n0 - fine.n0).abs().max((coarse.n2 - fine.n2).abs()),
        coarse,
        fine,
        quad_delta,
    })
}

/// Residuals of `[φ′(f), φ(g)]Ω` for `f` in `W_R + a` and `g` in `W_L + a`,
/// on `grid` and on the refined grid.
pub fn wedge_commutator_residual(
    model: &SMatrixModel,
    f: &TestFunction,
    g: &TestFunction,
    a: [f64; 2],
    grid: RapidityGrid,
) -> Result<WedgeResidual> {
    if !f.inside(Wedge::Right, a) {
        return Err(Error::Precondition(format!("support of f {f:?} is not inside the right wedge at {a:?}")));
    }
    if !g.inside(Wedge::Left, a) {
        return Err(Error::Precondition(format!("support of g {g:?} is not inside the left wedge at {a:?}")));
    }
    two_resolution(model, f, g, grid)
}

/// Same computation without the support check, for controls.
pub fn commutator_residual_unchecked(
    model: &SMatrixModel,
    f: &TestFunction,
    g: &TestFunction,
    grid: RapidityGrid,
) -> Result<WedgeResidual> {
    two_resolution(model, f, g, grid)
}
