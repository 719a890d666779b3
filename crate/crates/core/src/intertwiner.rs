//! Analytic intertwiners for diagonal S-matrices,
//! `I_n(ζ) = diag Π_{l<r} ε_{α_lα_r} √ρ_{α_lα_r}(ζ_l − ζ_r)`, with
//! `ω_{αβ} = ε_{αβ} ρ_{αβ}`, `ε = ω(0) = ±1`.
//!
//! `√ρ` is `exp(½ log ρ)` with `log ρ` continued from `log ρ(0) = 0` along the
//! straight segment from `0`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::perm::{all_perms, permute_tuple};
use crate::fock::OrbitSpace;
use crate::linalg::{embed_two_site, norm2, op_norm, CMat};
use crate::smatrix::{ScatteringFn, SMatrixModel};
use crate::spectrum::ParticleSpectrum;
use crate::C64;

const ZERO_TOL: f64 = 1e-10;

/// Half-length of the real range used for strip sampling.
pub const STRIP_RE: f64 = 10.0;

#[derive(Debug, Clone, Serialize)]
pub struct DiagonalCoefficients {
    pub omega: Vec<Vec<ScatteringFn>>,
    pub epsilon: Vec<Vec<f64>>,
    pub kappa: f64,
    pub symmetric: bool,
    /// Largest deviation from `conj ω(θ) = ω(θ)^{−1} = ω_{βα}(−θ)` on sampled real `θ`.
    pub unitarity_residual: f64,
}

fn real_samples() -> Vec<f64> {
    (0..=200).map(|i| -STRIP_RE + 2.0 * STRIP_RE * i as f64 / 200.0).collect()
}

/// `(zeros − poles)` of `f` inside the rectangle `[−R, R] × [y0, y1]`, by
/// the argument principle, together with `min |f|` on the boundary.
pub fn winding_count(f: impl Fn(C64) -> C64, y0: f64, y1: f64, per_side: usize) -> (i64, f64) {
    let r = STRIP_RE;
    let corners = [C64::new(-r, y0), C64::new(r, y0), C64::new(r, y1), C64::new(-r, y1)];
    let mut total = 0.0;
    let mut min_abs = f64::INFINITY;
    for side in 0..4 {
        let (a, b) = (corners[side], corners[(side + 1) % 4]);
        let mut prev = f(a);
        min_abs = min_abs.min(prev.norm());
        for j in 1..=per_side {
            let z = a + (b - a) * (j as f64 / per_side as f64);
            let v = f(z);
            min_abs = min_abs.min(v.norm());
            total += (v / prev).arg();
            prev = v;
        }
    }
    ((total / (2.0 * PI)).round() as i64, min_abs)
}

/// Splits `ω = ε ρ` and checks that `ρ` has neither zeros nor poles in the
/// closed strip `|Im ζ| ≤ κ`.
pub fn split_epsilon_rho(omega: &[Vec<ScatteringFn>], kappa: f64) -> Result<DiagonalCoefficients> {
    let d = omega.len();
    if d == 0 || omega.iter().any(|row| row.len() != d) {
        return Err(Error::Model("omega table must be square and nonempty".into()));
    }
    let inapplicable = |msg: String| Error::Precondition(format!("intertwiner construction inapplicable: {msg}"));
    let mut epsilon = vec![vec![0.0; d]; d];
    let mut unitarity_residual: f64 = 0.0;
    let thetas = real_samples();
    for a in 0..d {
        for b in 0..d {
            let w = &omega[a][b];
            let w0 = w.eval(C64::new(0.0, 0.0));
            let eps = if (w0 - 1.0).norm() <= ZERO_TOL {
                1.0
            } else if (w0 + 1.0).norm() <= ZERO_TOL {
                -1.0
            } else {
                return Err(inapplicable(format!("ω_{{{}{}}}(0) = {w0} is not ±1", a + 1, b + 1)));
            };
            epsilon[a][b] = eps;
            for &t in &thetas {
                let v = w.eval(C64::new(t, 0.0));
                let back = omega[b][a].eval(C64::new(-t, 0.0));
                unitarity_residual = unitarity_residual.max((v.conj() - v.inv()).norm()).max((v.inv() - back).norm());
            }
            for (y0, y1) in [(0.0, kappa), (-kappa, 0.0)] {
                let (count, min_abs) = winding_count(|z| w.eval(z), y0, y1, 4000);
                if count != 0 || min_abs < 1e-8 {
                    return Err(inapplicable(format!(
                        "ρ_{{{}{}}} has zeros or poles in the strip {y0} ≤ Im ζ ≤ {y1} (index {count}, min |ρ| on the boundary {min_abs:e})",
                        a + 1,
                        b + 1
                    )));
                }
            }
        }
    }
    let symmetric = (0..d).all(|a| (0..d).all(|b| omega[a][b] == omega[b][a]));
    Ok(DiagonalCoefficients { omega: omega.to_vec(), epsilon, kappa, symmetric, unitarity_residual })
}

impl DiagonalCoefficients {
    pub fn from_model(model: &SMatrixModel) -> Result<Self> {
        let omega = model
            .omega()
            .ok_or_else(|| Error::Precondition("intertwiners are built only for diagonal models".into()))?;
        split_epsilon_rho(omega, model.kappa())
    }

    pub fn dim_k(&self) -> usize {
        self.omega.len()
    }

    pub fn rho(&self, a: usize, b: usize, z: C64) -> C64 {
        self.omega[a][b].eval(z) / self.epsilon[a][b]
    }

    /// `√ρ_{ab}(z)` along the segment `[0, z]`, halving steps until every
    /// increment of `arg ρ` is below `0.1`.
    pub fn sqrt_rho(&self, a: usize, b: usize, z: C64) -> C64 {
        let mut steps = 16;
        'refine: loop {
            let mut log = C64::new(0.0, 0.0);
            let mut prev = C64::new(1.0, 0.0);
            for j in 1..=steps {
                let v = self.rho(a, b, z * (j as f64 / steps as f64));
                let inc = (v / prev).ln();
                if inc.im.abs() > 0.1 && steps < 1 << 20 {
                    steps *= 2;
                    continue 'refine;
                }
                log += inc;
                prev = v;
            }
            return (0.5 * log).exp();
        }
    }

    /// The S-matrix `S^{ab}_{ge} = ω_{ab} δ_{ae} δ_{bg}` from the table.
    pub fn s_matrix(&self, z: C64) -> CMat {
        let d = self.dim_k();
        let mut s = CMat::zeros(d * d, d * d);
        for a in 0..d {
            for b in 0..d {
                s[(a * d + b, b * d + a)] = self.omega[a][b].eval(z);
            }
        }
        s
    }

    /// `S(0)` as the signed flip model with signs `ε`.
    pub fn zero_model(&self) -> Result<SMatrixModel> {
        let d = self.dim_k();
        let omega = self.epsilon.iter().map(|row| row.iter().map(|&e| ScatteringFn::constant(e)).collect()).collect();
        SMatrixModel::diagonal(ParticleSpectrum::neutral(d, 1.0)?, omega, None)
    }
}

/// Anything evaluating a candidate `I_n(ζ)` on `K^{⊗n}`.
pub trait IntertwinerCandidate {
    fn dim_k(&self) -> usize;
    fn eval(&self, zeta: &[C64]) -> Result<CMat>;
}

/// The diagonal construction, restricted to its tube.
pub struct DiagonalIntertwiner<'c> {
    pub coeffs: &'c DiagonalCoefficients,
    /// Tube check on `|Im ζ_j + π/2| < κ/(2n)`; off for the real-shifted
    /// evaluation, which sits at the centre anyway.
    pub check_tube: bool,
}

impl IntertwinerCandidate for DiagonalIntertwiner<'_> {
    fn dim_k(&self) -> usize {
        self.coeffs.dim_k()
    }

    fn eval(&self, zeta: &[C64]) -> Result<CMat> {
        intertwiner_eval(self.coeffs, zeta, self.check_tube)
    }
}

/// `I_n(ζ)` as a diagonal matrix on `K^{⊗n}`.
pub fn intertwiner_eval(coeffs: &DiagonalCoefficients, zeta: &[C64], check_tube: bool) -> Result<CMat> {
    let n = zeta.len();
    let d = coeffs.dim_k();
    if check_tube && n > 0 {
        let c = coeffs.kappa / (2.0 * n as f64);
        if let Some(z) = zeta.iter().find(|z| (z.im + PI / 2.0).abs() >= c) {
            return Err(Error::Precondition(format!(
                "ζ = {z} lies outside the tube |Im ζ + π/2| < κ/(2n) = {c}"
            )));
        }
    }
    let dim = d.pow(n as u32);
    // Pair factors depend only on (α_l, α_r, l, r).
    let mut pair = vec![C64::new(0.0, 0.0); n * n * d * d];
    for l in 0..n {
        for r in l + 1..n {
            for a in 0..d {
                for b in 0..d {
                    pair[((l * n + r) * d + a) * d + b] =
                        coeffs.epsilon[a][b] * coeffs.sqrt_rho(a, b, zeta[l] - zeta[r]);
                }
            }
        }
    }
    let mut m = CMat::zeros(dim, dim);
    for idx in 0..dim {
        let mut alpha = vec![0; n];
        let mut rest = idx;
        for slot in (0..n).rev() {
            alpha[slot] = rest % d;
            rest /= d;
        }
        let mut v = C64::new(1.0, 0.0);
        for l in 0..n {
            for r in l + 1..n {
                v *= pair[((l * n + r) * d + alpha[l]) * d + alpha[r]];
            }
        }
        m[(idx, idx)] = v;
    }
    Ok(m)
}

fn shifted(theta: &[f64]) -> Vec<C64> {
    theta.iter().map(|&t| C64::new(t, -PI / 2.0)).collect()
}

/// `‖I(θ+iλ) S(θ_{k+1}−θ_k)_{n,k} − S(0)_{n,k} I(…θ_{k+1},θ_k…+iλ)‖` for a
/// candidate and an S-matrix function.
pub fn candidate_residual(
    candidate: &dyn IntertwinerCandidate,
    s_of: &dyn Fn(f64) -> Result<CMat>,
    theta: &[f64],
    k: usize,
) -> Result<f64> {
    let n = theta.len();
    if k + 1 >= n {
        return Err(Error::Config(format!("transposition index k = {} needs 1 ≤ k ≤ n−1 = {}", k + 1, n - 1)));
    }
    let d = candidate.dim_k();
    let mut swapped = theta.to_vec();
    swapped.swap(k, k + 1);
    let lhs = candidate.eval(&shifted(theta))? * embed_two_site(&s_of(theta[k + 1] - theta[k])?, d, n, k);
    let rhs = embed_two_site(&s_of(0.0)?, d, n, k) * candidate.eval(&shifted(&swapped))?;
    Ok(op_norm(&(lhs - rhs)))
}

#[derive(Debug, Clone, Serialize)]
pub struct IntertwiningResidual {
    pub residual: f64,
    pub symmetric: bool,
    pub message: Option<String>,
}

/// The intertwining identity at `θ` for the transposition `τ_k` (0-based).
pub fn intertwining_residual(coeffs: &DiagonalCoefficients, theta: &[f64], k: usize) -> Result<IntertwiningResidual> {
    let cand = DiagonalIntertwiner { coeffs, check_tube: false };
    let s_of = |t: f64| Ok(coeffs.s_matrix(C64::new(t, 0.0)));
    let residual = candidate_residual(&cand, &s_of, theta, k)?;
    let message = (!coeffs.symmetric).then(|| "symmetry precondition violated: ω_{αβ} ≠ ω_{βα}".to_string());
    Ok(IntertwiningResidual { residual, symmetric: coeffs.symmetric, message })
}

/// `‖(1 − P^{S(0)}) I P^S v‖ / ‖v‖` on orbit functions at `θ`.
pub fn subspace_residual(model: &SMatrixModel, coeffs: &DiagonalCoefficients, theta: &[f64], v: &[C64]) -> Result<f64> {
    let zero = coeffs.zero_model()?;
    let space = OrbitSpace::new(model, theta)?;
    let space0 = OrbitSpace::new(&zero, theta)?;
    if v.len() != space.len() {
        return Err(Error::Config(format!("orbit function has length {}, expected {}", v.len(), space.len())));
    }
    let p = space.project(v);
    let block = coeffs.dim_k().pow(theta.len() as u32);
    let mut w = Vec::with_capacity(p.len());
    for (j, sigma) in all_perms(theta.len()).iter().enumerate() {
        let i = intertwiner_eval(coeffs, &shifted(&permute_tuple(theta, sigma)), false)?;
        for (x, y) in i.diagonal().iter().zip(&p[j * block..(j + 1) * block]) {
            w.push(x * y);
        }
    }
    let pw = space0.project(&w);
    let diff: Vec<C64> = w.iter().zip(&pw).map(|(a, b)| a - b).collect();
    Ok(norm2(&diff) / norm2(v).max(f64::MIN_POSITIVE))
}

#[derive(Debug, Clone, Serialize)]
pub struct GammaBounds {
    pub gamma: f64,
    pub gamma_tilde: f64,
    pub refined_gamma: f64,
    pub resolution: usize,
}

fn strip_sup(coeffs: &DiagonalCoefficients, resolution: usize) -> f64 {
    let d = coeffs.dim_k();
    let half = coeffs.kappa / 2.0;
    let lines = [-half, -half / 2.0, 0.0, half / 2.0, half];
    let mut sup: f64 = 1.0;
    for a in 0..d {
        for b in 0..d {
            for &y in &lines {
                for i in 0..resolution {
                    let x = -STRIP_RE + 2.0 * STRIP_RE * i as f64 / (resolution - 1) as f64;
                    sup = sup.max(coeffs.sqrt_rho(a, b, C64::new(x, y)).norm());
                }
            }
        }
    }
    sup
}

/// `γ` as the grid supremum of `|√ρ|` on `|Im| ≤ κ/2` (at least 1), checked
/// against twice the resolution; `γ̃ = 1` because `I_n` is unitary on the
/// real-shifted line.
///
/// The pair differences in the tube have `|Im| < κ/n`, and log-convexity of
/// the sup of `|ρ|` over horizontal lines gives `|√ρ| ≤ γ^{2/n}` there, so
/// the `n(n−1)/2` factors stay below `γ^n`.
pub fn gamma_bounds(coeffs: &DiagonalCoefficients, resolution: usize) -> Result<GammaBounds> {
    if resolution < 2 {
        return Err(Error::Config("γ grid needs at least 2 points".into()));
    }
    let gamma = strip_sup(coeffs, resolution);
    let refined_gamma = strip_sup(coeffs, 2 * resolution - 1);
    if (gamma - refined_gamma).abs() > 1e-3 * refined_gamma {
        return Err(Error::Numerical(format!(
            "γ grid supremum not converged: {gamma} vs {refined_gamma} at doubled resolution"
        )));
    }
    Ok(GammaBounds { gamma: gamma.max(refined_gamma), gamma_tilde: 1.0, refined_gamma, resolution })
}

/// Random points of the tube `ℝ^n + i(λ_{π/2} + (−κ/2n, κ/2n)^n)`.
pub fn tube_points(seed: u64, n: usize, kappa: f64, count: usize) -> Vec<Vec<C64>> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let c = 0.999 * kappa / (2.0 * n as f64);
    (0..count)
        .map(|_| (0..n).map(|_| C64::new(rng.gen_range(-3.0..3.0), -PI / 2.0 + rng.gen_range(-c..c))).collect())
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct IntertwinerReport {
    pub gamma: GammaBounds,
    pub max_residual: f64,
    pub max_subspace_residual: f64,
    pub max_unitarity_defect: f64,
    pub max_norm_ratio: f64,
    pub symmetric: bool,
    pub passed_bound: bool,
    pub passed_inverse: bool,
    pub passed_intertwining: bool,
    pub message: Option<String>,
}

/// All checks for a diagonal model, `n ≤ n_max`, with `samples` random
/// tuples per `n`.
pub fn intertwiner_report(
    model: &SMatrixModel,
    n_max: usize,
    samples: usize,
    seed: u64,
    resolution: usize,
    tol: f64,
) -> Result<IntertwinerReport> {
    let coeffs = DiagonalCoefficients::from_model(model)?;
    let gamma = gamma_bounds(&coeffs, resolution)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut max_residual: f64 = 0.0;
    let mut max_subspace: f64 = 0.0;
    let mut max_unitarity: f64 = 0.0;
    let mut max_ratio: f64 = 0.0;
    let d = coeffs.dim_k();
    for n in 2..=n_max {
        for _ in 0..samples {
            let th: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
            for k in 0..n - 1 {
                max_residual = max_residual.max(intertwining_residual(&coeffs, &th, k)?.residual);
            }
            let i = intertwiner_eval(&coeffs, &shifted(&th), false)?;
            let u = i.adjoint() * &i - CMat::identity(i.nrows(), i.ncols());
            max_unitarity = max_unitarity.max(u.iter().fold(0.0f64, |m, z| m.max(z.norm())));
        }
        if n <= 4 {
            let th: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let len = all_perms(n).len() * d.pow(n as u32);
            let v: Vec<C64> = (0..len).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            max_subspace = max_subspace.max(subspace_residual(model, &coeffs, &th, &v)?);
        }
        for z in tube_points(rng.gen(), n, coeffs.kappa, samples) {
            let i = intertwiner_eval(&coeffs, &z, true)?;
            let norm = i.diagonal().iter().fold(0.0f64, |m, x| m.max(x.norm()));
            max_ratio = max_ratio.max(norm / gamma.gamma.powi(n as i32));
        }
    }
    let message = (!coeffs.symmetric).then(|| "symmetry precondition violated: ω_{αβ} ≠ ω_{βα}".to_string());
    Ok(IntertwinerReport {
        gamma,
        max_residual,
        max_subspace_residual: max_subspace,
        max_unitarity_defect: max_unitarity,
        max_norm_ratio: max_ratio,
        symmetric: coeffs.symmetric,
        passed_bound: max_ratio <= 1.0 + 1e-9,
        passed_inverse: max_unitarity <= tol,
        passed_intertwining: coeffs.symmetric && max_residual <= tol && max_subspace <= 10.0 * tol,
        message,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn neutral(d: usize) -> ParticleSpectrum {
        ParticleSpectrum::neutral(d, 1.0).unwrap()
    }

    fn minus_one() -> SMatrixModel {
        SMatrixModel::diagonal(neutral(1), vec![vec![ScatteringFn::constant(-1.0)]], None).unwrap()
    }

    fn sinh_gordon_two() -> SMatrixModel {
        let a = ScatteringFn::sinh_blaschke(0.4, 1.0);
        let b = ScatteringFn::sinh_blaschke(0.3, 1.0);
        let c = ScatteringFn::constant(-1.0);
        SMatrixModel::diagonal(neutral(2), vec![vec![a.clone(), b.clone()], vec![b, c]], None).unwrap()
    }

    fn non_symmetric() -> DiagonalCoefficients {
        let a = ScatteringFn::sinh_blaschke(0.4, 1.0);
        let c = ScatteringFn::constant(-1.0);
        split_epsilon_rho(&[vec![c.clone(), a], vec![c.clone(), c]], 0.2 * PI).unwrap()
    }

    #[test]
    fn epsilon_rho_split() {
        let c = DiagonalCoefficients::from_model(&minus_one()).unwrap();
        assert_eq!(c.epsilon, vec![vec![-1.0]]);
        assert_eq!(c.sqrt_rho(0, 0, C64::new(0.3, 0.2)), C64::new(1.0, 0.0));
        let plus = split_epsilon_rho(&[vec![ScatteringFn::constant(1.0)]], 0.3).unwrap();
        assert_eq!(plus.epsilon, vec![vec![1.0]]);
        let sg = split_epsilon_rho(&[vec![ScatteringFn::sinh_blaschke(0.4, 1.0)]], 0.2 * PI).unwrap();
        assert_eq!(sg.epsilon, vec![vec![-1.0]]);
        assert!((sg.rho(0, 0, C64::new(0.0, 0.0)) - 1.0).norm() < 1e-15);
        assert!(sg.unitarity_residual < 1e-10);
    }

    #[test]
    fn zero_location_of_sinh_gordon() {
        // The zero of ρ sits at iπB, its pole at −iπB.
        let b = 0.4;
        let w = ScatteringFn::sinh_blaschke(b, 1.0);
        assert!(w.eval(C64::new(0.0, PI * b)).norm() < 1e-12);
        let (up, _) = winding_count(|z| w.eval(z), 0.0, 1.1 * PI * b, 4000);
        let (down, _) = winding_count(|z| w.eval(z), -1.1 * PI * b, 0.0, 4000);
        assert_eq!((up, down), (1, -1));
        assert!(split_epsilon_rho(&[vec![w.clone()]], 0.9 * PI * b).is_ok());
        let e = split_epsilon_rho(&[vec![w]], 1.1 * PI * b).unwrap_err();
        assert!(e.to_string().contains("inapplicable"));
    }

    #[test]
    fn sqrt_branch_squares_back() {
        let c = DiagonalCoefficients::from_model(&sinh_gordon_two()).unwrap();
        for z in [C64::new(2.5, 0.3), C64::new(-7.0, -0.2), C64::new(0.01, 0.1)] {
            for (a, b) in [(0, 0), (0, 1), (1, 1)] {
                let r = c.sqrt_rho(a, b, z);
                assert!((r * r - c.rho(a, b, z)).norm() < 1e-12);
            }
        }
        // Continuity: a short step moves √ρ only a little.
        let a = c.sqrt_rho(0, 0, C64::new(3.0, 0.2));
        let b = c.sqrt_rho(0, 0, C64::new(3.0 + 1e-6, 0.2));
        assert!((a - b).norm() < 1e-5);
    }

    #[test]
    fn small_n_values() {
        let c = DiagonalCoefficients::from_model(&sinh_gordon_two()).unwrap();
        let one = intertwiner_eval(&c, &[C64::new(0.3, -PI / 2.0)], true).unwrap();
        assert_eq!(one, CMat::identity(2, 2));
        assert_eq!(intertwiner_eval(&c, &[], true).unwrap(), CMat::identity(1, 1));
        let m = DiagonalCoefficients::from_model(&minus_one()).unwrap();
        for n in 1..5 {
            let z = &tube_points(3, n, m.kappa, 1)[0];
            let i = intertwiner_eval(&m, z, true).unwrap();
            let sign = if (n * (n - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(i, CMat::identity(1, 1) * C64::new(sign, 0.0));
        }
        let off = [C64::new(0.0, -PI / 2.0), C64::new(0.0, -PI / 2.0 + m.kappa)];
        assert!(intertwiner_eval(&m, &off, true).is_err());
    }

    #[test]
    fn unitary_on_the_shifted_line() {
        let c = DiagonalCoefficients::from_model(&sinh_gordon_two()).unwrap();
        let i = intertwiner_eval(&c, &shifted(&[0.4, -1.3, 2.2]), false).unwrap();
        let inv = i.clone().try_inverse().unwrap();
        assert!((op_norm(&i) - 1.0).abs() < 1e-12);
        assert!((op_norm(&inv) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn intertwining_identity() {
        let m = DiagonalCoefficients::from_model(&minus_one()).unwrap();
        assert_eq!(intertwining_residual(&m, &[0.3, -0.8, 1.1], 1).unwrap().residual, 0.0);
        let c = DiagonalCoefficients::from_model(&sinh_gordon_two()).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let th: Vec<f64> = (0..3).map(|_| rng.gen_range(-3.0..3.0)).collect();
            for k in 0..2 {
                let r = intertwining_residual(&c, &th, k).unwrap();
                assert!(r.residual <= 1e-12 && r.message.is_none());
            }
        }
        let bad = non_symmetric();
        assert!(!bad.symmetric);
        let r = intertwining_residual(&bad, &[0.9, -0.4], 0).unwrap();
        assert!(r.residual > 0.1, "{}", r.residual);
        assert!(r.message.unwrap().contains("symmetry precondition violated"));
    }

    #[test]
    fn maps_into_the_zero_point_subspace() {
        let model = sinh_gordon_two();
        let c = DiagonalCoefficients::from_model(&model).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for n in 2..=3 {
            let th: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let len = all_perms(n).len() * 2usize.pow(n as u32);
            let v: Vec<C64> = (0..len).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            assert!(subspace_residual(&model, &c, &th, &v).unwrap() <= 1e-11);
        }
    }

    #[test]
    fn analytic_in_the_tube() {
        let c = DiagonalCoefficients::from_model(&sinh_gordon_two()).unwrap();
        let h = 1e-5;
        for z in tube_points(5, 3, c.kappa, 10) {
            for j in 0..3 {
                let at = |dz: C64| {
                    let mut w = z.clone();
                    w[j] += dz;
                    intertwiner_eval(&c, &w, false).unwrap()
                };
                let dx = (at(C64::new(h, 0.0)) - at(C64::new(-h, 0.0))) / C64::new(2.0 * h, 0.0);
                let dy = (at(C64::new(0.0, h)) - at(C64::new(0.0, -h))) / C64::new(2.0 * h, 0.0);
                let cr = dx + dy * C64::new(0.0, 1.0);
                assert!(cr.iter().all(|x| x.norm() <= 1e-6));
            }
        }
    }

    #[test]
    fn gamma_values() {
        let m = DiagonalCoefficients::from_model(&minus_one()).unwrap();
        let g = gamma_bounds(&m, 101).unwrap();
        assert_eq!((g.gamma, g.gamma_tilde), (1.0, 1.0));
        let sg = split_epsilon_rho(&[vec![ScatteringFn::sinh_blaschke(0.4, 1.0)]], 0.2 * PI).unwrap();
        let a = gamma_bounds(&sg, 401).unwrap();
        let b = gamma_bounds(&sg, 801).unwrap();
        assert!(a.gamma > 1.0);
        assert!((a.gamma - b.gamma).abs() <= 5e-4 * b.gamma);
        for n in 1..=4 {
            for z in tube_points(n as u64, n, sg.kappa, 100) {
                let i = intertwiner_eval(&sg, &z, true).unwrap();
                let norm = i.diagonal().iter().fold(0.0f64, |m, x| m.max(x.norm()));
                assert!(norm <= a.gamma.powi(n as i32) * (1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn report_flags() {
        let r = intertwiner_report(&sinh_gordon_two(), 4, 5, 2, 201, 1e-12).unwrap();
        assert!(r.passed_bound && r.passed_inverse && r.passed_intertwining, "{r:?}");
        let sigma = SMatrixModel::sigma_on(3, 1.0, None).unwrap();
        assert!(intertwiner_report(&sigma, 3, 2, 0, 101, 1e-12).is_err());
    }

    #[test]
    fn user_candidate_hook() {
        // The identity intertwines the O(3) S-matrix only at coinciding rapidities.
        struct Ident;
        impl IntertwinerCandidate for Ident {
            fn dim_k(&self) -> usize {
                3
            }
            fn eval(&self, zeta: &[C64]) -> Result<CMat> {
                Ok(CMat::identity(3usize.pow(zeta.len() as u32), 3usize.pow(zeta.len() as u32)))
            }
        }
        let sigma = SMatrixModel::sigma_on(3, 1.0, None).unwrap();
        let s_of = |t: f64| sigma.eval_real(t);
        let r = candidate_residual(&Ident, &s_of, &[0.5, -0.5], 0).unwrap();
        assert!(r > 0.1);
        let r0 = candidate_residual(&Ident, &s_of, &[0.5, 0.5], 0).unwrap();
        assert!(r0 < 1e-12);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]

        #[test]
        fn symmetric_models_intertwine(
            b1 in 0.1f64..0.9,
            b2 in 0.1f64..0.9,
            th in proptest::collection::vec(-3.0f64..3.0, 2..=4),
            seed in 0u64..1000,
        ) {
            let a = ScatteringFn::sinh_blaschke(b1, 1.0);
            let b = ScatteringFn::sinh_blaschke(b2, 1.0);
            let model = SMatrixModel::diagonal(neutral(2), vec![vec![a.clone(), b.clone()], vec![b, a]], None).unwrap();
            let c = DiagonalCoefficients::from_model(&model).unwrap();
            for k in 0..th.len() - 1 {
                proptest::prop_assert!(intertwining_residual(&c, &th, k).unwrap().residual <= 1e-12);
            }
            let g = gamma_bounds(&c, 401).unwrap();
            for z in tube_points(seed, th.len(), c.kappa, 10) {
                let norm = op_norm(&intertwiner_eval(&c, &z, true).unwrap());
                proptest::prop_assert!(norm <= g.gamma.powi(th.len() as i32) * (1.0 + 1e-9));
            }
        }
    }
}
