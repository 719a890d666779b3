//! Numerical residuals of the S-matrix axioms, the strip norm `‖S‖_κ` and
//! a Cauchy-Riemann analyticity probe.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{comp, ModelKind, SMatrixModel};
use crate::error::{Error, Result};
use crate::linalg::{identity, kron, max_abs, op_norm, CMat};
use crate::C64;

pub const AXIOMS: [&str; 7] =
    ["unitarity", "hermitian_analyticity", "yang_baxter", "crossing", "pct", "translational", "gauge"];

#[derive(Debug, Clone, Serialize)]
pub struct AxiomResidual {
    pub axiom: String,
    pub residual: f64,
    /// Sample pair at which the maximum was attained.
    pub argmax: Option<(f64, f64)>,
    pub skipped: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    pub model: String,
    pub samples: usize,
    pub residuals: Vec<AxiomResidual>,
}

impl AxiomReport {
    pub fn get(&self, axiom: &str) -> Option<&AxiomResidual> {
        self.residuals.iter().find(|r| r.axiom == axiom)
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().filter(|r| !r.skipped).map(|r| r.residual).fold(0.0, f64::max)
    }
}

/// Seeded rapidity pairs, uniform in `[−range, range]²`.
pub fn sample_pairs(seed: u64, count: usize, range: f64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| (rng.gen_range(-range..range), rng.gen_range(-range..range))).collect()
}

pub fn unitarity_residual(s: &CMat) -> f64 {
    op_norm(&(s.adjoint() * s - identity(s.nrows())))
}

pub fn hermitian_analyticity_residual(model: &SMatrixModel, theta: f64) -> Result<f64> {
    let s = model.eval_real(theta)?;
    let sm = model.eval_real(-theta)?;
    Ok(op_norm(&(s * sm - identity(model.dim_k().pow(2)))))
}

pub fn yang_baxter_residual(model: &SMatrixModel, theta: f64, theta_p: f64) -> Result<f64> {
    let d = model.dim_k();
    let one = identity(d);
    let a = model.eval_real(theta)?;
    let b = model.eval_real(theta + theta_p)?;
    let c = model.eval_real(theta_p)?;
    let lhs = kron(&a, &one) * kron(&one, &b) * kron(&c, &one);
    let rhs = kron(&one, &c) * kron(&b, &one) * kron(&one, &a);
    Ok(op_norm(&(lhs - rhs)))
}

/// Largest deviation of `S^{αβ}_{γδ}(iπ−θ) = S^{βδ̄}_{ᾱγ}(θ)` over all components.
pub fn crossing_residual(model: &SMatrixModel, theta: f64) -> Result<f64> {
    let d = model.dim_k();
    let spec = model.spectrum();
    let crossed = model.eval(C64::new(-theta, PI))?;
    let s = model.eval_real(theta)?;
    let mut r: f64 = 0.0;
    for a in 0..d {
        for b in 0..d {
            for g in 0..d {
                for e in 0..d {
                    let lhs = comp(&crossed, d, a, b, g, e);
                    let rhs = comp(&s, d, b, spec.conj(e), spec.conj(a), g);
                    r = r.max((lhs - rhs).norm());
                }
            }
        }
    }
    Ok(r)
}

/// `(Γ⊗Γ) F S F (Γ⊗Γ)` in components: `conj S^{b̄ā}_{δ̄γ̄}`.
pub fn pct_transform(model: &SMatrixModel, s: &CMat) -> CMat {
    let d = model.dim_k();
    let spec = model.spectrum();
    CMat::from_fn(d * d, d * d, |row, col| {
        let (a, b) = (row / d, row % d);
        let (g, e) = (col / d, col % d);
        comp(s, d, spec.conj(b), spec.conj(a), spec.conj(e), spec.conj(g)).conj()
    })
}

pub fn pct_residual(model: &SMatrixModel, theta: f64) -> Result<f64> {
    let s = model.eval_real(theta)?;
    let sm = model.eval_real(-theta)?;
    Ok(op_norm(&(pct_transform(model, &s) - sm)))
}

/// Largest entry coupling unequal masses: `S^{αβ}_{γδ}` must vanish unless
/// `m_α = m_δ` and `m_β = m_γ`.
pub fn translational_residual(model: &SMatrixModel, s: &CMat) -> f64 {
    let d = model.dim_k();
    let m = model.spectrum().masses();
    let mut r: f64 = 0.0;
    for a in 0..d {
        for b in 0..d {
            for g in 0..d {
                for e in 0..d {
                    if m[a] != m[e] || m[b] != m[g] {
                        r = r.max(comp(s, d, a, b, g, e).norm());
                    }
                }
            }
        }
    }
    r
}

pub fn gauge_residual(s: &CMat, v: &CMat) -> f64 {
    let vv = kron(v, v);
    op_norm(&(s * &vv - &vv * s))
}

fn sample_residuals(model: &SMatrixModel, theta: f64, theta_p: f64, gauge: &[CMat]) -> Result<[f64; 7]> {
    let s = model.eval_real(theta)?;
    let gauge_r = gauge.iter().map(|v| gauge_residual(&s, v)).fold(0.0, f64::max);
    Ok([
        unitarity_residual(&s),
        hermitian_analyticity_residual(model, theta)?,
        yang_baxter_residual(model, theta, theta_p)?,
        crossing_residual(model, theta)?,
        pct_residual(model, theta)?,
        translational_residual(model, &s),
        gauge_r,
    ])
}

/// Per-axiom maximum residual over the sample pairs. Gauge invariance is
/// skipped when no unitaries are supplied.
pub fn check_axioms(model: &SMatrixModel, samples: &[(f64, f64)], gauge: &[CMat]) -> Result<AxiomReport> {
    if samples.is_empty() {
        return Err(Error::Config("check_axioms needs at least one sample pair".into()));
    }
    let d = model.dim_k();
    for v in gauge {
        if v.nrows() != d || v.ncols() != d {
            return Err(Error::Config(format!("gauge unitary must be {d}×{d}")));
        }
    }
    let rows: Vec<[f64; 7]> = samples
        .par_iter()
        .map(|&(t, tp)| {
            sample_residuals(model, t, tp, gauge)
                .map_err(|e| Error::Numerical(format!("at sample (θ, θ′) = ({t}, {tp}): {e}")))
        })
        .collect::<Result<_>>()?;
    let residuals = AXIOMS
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let mut best = (0.0, None);
            for (row, &pair) in rows.iter().zip(samples) {
                if best.1.is_none() || row[i] > best.0 {
                    best = (row[i], Some(pair));
                }
            }
            let skipped = *name == "gauge" && gauge.is_empty();
            AxiomResidual {
                axiom: name.to_string(),
                residual: if skipped { 0.0 } else { best.0 },
                argmax: if skipped { None } else { best.1 },
                skipped,
            }
        })
        .collect();
    Ok(AxiomReport { model: model.label(), samples: samples.len(), residuals })
}

/// Seeded unitaries from each model's symmetry group: all of `U(d)` for
/// the flip, diagonal phases for diagonal models, `O(N)` for the sigma model.
pub fn symmetry_unitaries(model: &SMatrixModel, seed: u64, count: usize) -> Vec<CMat> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = model.dim_k();
    let mut random = |complex: bool| -> CMat {
        CMat::from_fn(d, d, |_, _| {
            let im = if complex { rng.gen_range(-1.0..1.0) } else { 0.0 };
            C64::new(rng.gen_range(-1.0..1.0), im)
        })
    };
    (0..count)
        .map(|_| match model.kind() {
            ModelKind::ConstantFlip { .. } => random(true).qr().q(),
            ModelKind::SigmaModelON { .. } => random(false).qr().q().map(|z| C64::new(z.re, 0.0)),
            ModelKind::Diagonal { .. } => {
                let g = random(false);
                CMat::from_fn(d, d, |i, j| if i == j { C64::from_polar(1.0, PI * g[(i, 0)].re) } else { C64::new(0.0, 0.0) })
            }
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct NormKappa {
    pub value: f64,
    pub boundary_max: f64,
    pub interior_max: f64,
    pub re_range: (f64, f64),
    pub resolution: usize,
}

pub const NORM_RE_RANGE: (f64, f64) = (-10.0, 10.0);

/// Grid supremum of `‖S(ζ)‖` on the closed strip `−κ ≤ Im ζ ≤ π+κ`.
///
/// The two boundary lines carry `resolution` points each on the truncated
/// real range; a coarser set of interior lines guards against
/// mis-declared strips.
pub fn norm_kappa(model: &SMatrixModel, resolution: usize) -> Result<NormKappa> {
    if resolution < 2 {
        return Err(Error::Config("norm_kappa resolution must be at least 2".into()));
    }
    let kappa = model.kappa();
    let (lo, hi) = NORM_RE_RANGE;
    let line = |im: f64, count: usize| -> Vec<C64> {
        (0..count).map(|i| C64::new(lo + (hi - lo) * i as f64 / (count - 1) as f64, im)).collect()
    };
    let boundary: Vec<C64> = [line(-kappa, resolution), line(PI + kappa, resolution)].concat();
    let coarse = (resolution / 8).max(2);
    let interior: Vec<C64> = [-kappa / 2.0, 0.0, PI / 2.0, PI, PI + kappa / 2.0]
        .iter()
        .flat_map(|&im| line(im, coarse))
        .collect();
    let sup = |points: &[C64]| -> Result<f64> {
        let norms: Vec<f64> = points
            .par_iter()
            .map(|&z| {
                let s = model.eval(z).map_err(|e| {
                    Error::Numerical(format!("{e}; the declared κ = {kappa} reaches a singularity"))
                })?;
                let n = op_norm(&s);
                if n.is_finite() {
                    Ok(n)
                } else {
                    Err(Error::Numerical(format!("non-finite ‖S‖ at ζ = {z}; κ = {kappa} is mis-declared")))
                }
            })
            .collect::<Result<_>>()?;
        Ok(norms.into_iter().fold(0.0, f64::max))
    };
    let boundary_max = sup(&boundary)?;
    let interior_max = sup(&interior)?;
    Ok(NormKappa {
        value: boundary_max.max(interior_max),
        boundary_max,
        interior_max,
        re_range: NORM_RE_RANGE,
        resolution,
    })
}

/// Seeded interior points of the extended strip, kept `h`-away from its edges.
pub fn interior_points(seed: u64, count: usize, kappa: f64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| C64::new(rng.gen_range(-4.0..4.0), rng.gen_range(-0.9 * kappa..PI + 0.9 * kappa)))
        .collect()
}

pub const CR_STEP: f64 = 1e-4;

/// Largest `‖∂_y S − i ∂_x S‖_max / max(1, ‖∂_x S‖_max)` by central
/// differences.
pub fn analyticity_residual(model: &SMatrixModel, points: &[C64]) -> Result<f64> {
    let h = CR_STEP;
    let vals: Vec<f64> = points
        .par_iter()
        .map(|&z| {
            let dx = (model.eval(z + h)? - model.eval(z - h)?) / C64::new(2.0 * h, 0.0);
            let dy = (model.eval(z + C64::new(0.0, h))? - model.eval(z - C64::new(0.0, h))?) / C64::new(2.0 * h, 0.0);
            Ok(max_abs(&(&dy - &dx * C64::new(0.0, 1.0))) / max_abs(&dx).max(1.0))
        })
        .collect::<Result<_>>()?;
    Ok(vals.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smatrix::{ScatteringFn, SigmaLayout};
    use crate::spectrum::ParticleSpectrum;

    fn sinh_gordon(b: f64) -> SMatrixModel {
        let spec = ParticleSpectrum::neutral(1, 1.0).unwrap();
        SMatrixModel::diagonal(spec, vec![vec![ScatteringFn::sinh_blaschke(b, 1.0)]], None).unwrap()
    }

    fn phase(t: f64) -> C64 {
        C64::new(t.cos(), t.sin())
    }

    #[test]
    fn flips_satisfy_all_axioms_exactly() {
        let spec = ParticleSpectrum::new(vec![1.0, 1.0, 2.0], vec![1, 0, 2], None).unwrap();
        let v = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![phase(0.3), phase(-0.3), phase(1.0)]));
        for sign in [1.0, -1.0] {
            let m = SMatrixModel::flip(spec.clone(), sign).unwrap();
            let rep = check_axioms(&m, &sample_pairs(1, 20, 4.0), &[v.clone()]).unwrap();
            assert_eq!(rep.max_residual(), 0.0, "{rep:?}");
        }
    }

    #[test]
    fn sinh_gordon_axioms() {
        let m = sinh_gordon(0.4);
        let rep = check_axioms(&m, &sample_pairs(7, 100, 5.0), &[]).unwrap();
        assert!(rep.max_residual() <= 1e-12, "{rep:?}");
        assert!(rep.get("gauge").unwrap().skipped);
    }

    #[test]
    fn sigma_axioms() {
        for n in [3, 4] {
            let m = SMatrixModel::sigma_on(n, 1.0, None).unwrap();
            let c = (0.4f64).cos();
            let s = (0.4f64).sin();
            let mut rot = identity(n);
            rot[(0, 0)] = C64::new(c, 0.0);
            rot[(0, 1)] = C64::new(-s, 0.0);
            rot[(1, 0)] = C64::new(s, 0.0);
            rot[(1, 1)] = C64::new(c, 0.0);
            let rep = check_axioms(&m, &sample_pairs(3, 40, 4.0), &[rot]).unwrap();
            for r in &rep.residuals {
                let tol = if r.axiom == "crossing" { 1e-8 } else { 1e-10 };
                assert!(r.residual <= tol, "N = {n}: {r:?}");
            }
        }
    }

    #[test]
    fn symmetry_unitaries_are_symmetries() {
        let charged = ParticleSpectrum::new(vec![1.0, 1.0, 2.0], vec![1, 0, 2], None).unwrap();
        let models = [
            SMatrixModel::flip(charged.clone(), -1.0).unwrap(),
            SMatrixModel::diagonal(
                charged,
                vec![vec![ScatteringFn::sinh_blaschke(0.3, 1.0); 3]; 3],
                None,
            )
            .unwrap(),
            SMatrixModel::sigma_on(4, 1.0, None).unwrap(),
        ];
        for m in &models {
            let vs = symmetry_unitaries(m, 11, 3);
            for v in &vs {
                assert!(max_abs(&(v.adjoint() * v - identity(m.dim_k()))) < 1e-13);
            }
            let rep = check_axioms(m, &sample_pairs(2, 10, 3.0), &vs).unwrap();
            assert!(rep.get("gauge").unwrap().residual < 1e-12, "{}", m.label());
        }
        // A generic unitary is not a symmetry of the sigma model.
        let m = &models[2];
        let generic = symmetry_unitaries(&models[0], 1, 1).pop().unwrap();
        let mut big = identity(4);
        big.view_mut((0, 0), (3, 3)).copy_from(&generic);
        let rep = check_axioms(m, &sample_pairs(2, 4, 3.0), &[big]).unwrap();
        assert!(rep.get("gauge").unwrap().residual > 1e-3);
    }

    #[test]
    fn printed_sigma_layout_breaks_yang_baxter() {
        let m = SMatrixModel::sigma_on_with_layout(3, 1.0, None, SigmaLayout::AsPrinted).unwrap();
        let rep = check_axioms(&m, &sample_pairs(3, 10, 4.0), &[]).unwrap();
        assert!(rep.get("yang_baxter").unwrap().residual > 1e-3);
        assert!(rep.get("crossing").unwrap().residual > 1e-3);
        assert!(rep.get("unitarity").unwrap().residual < 1e-10);
    }

    #[test]
    fn non_symmetric_mass_coupling_detected() {
        let spec = ParticleSpectrum::new(vec![1.0, 2.0], vec![0, 1], None).unwrap();
        let m = SMatrixModel::flip(spec, 1.0).unwrap();
        let mut s = m.eval_real(0.0).unwrap();
        s[(1, 1)] = C64::new(0.5, 0.0);
        assert_eq!(translational_residual(&m, &s), 0.5);
    }

    #[test]
    fn strip_norms() {
        let spec = ParticleSpectrum::neutral(1, 1.0).unwrap();
        let m = SMatrixModel::flip(spec.clone(), -1.0).unwrap();
        assert!((norm_kappa(&m, 64).unwrap().value - 1.0).abs() < 1e-12);
        let m = SMatrixModel::diagonal(spec, vec![vec![ScatteringFn::constant(-1.0)]], None).unwrap();
        assert!((norm_kappa(&m, 64).unwrap().value - 1.0).abs() < 1e-12);
        let sg = SMatrixModel::diagonal(
            ParticleSpectrum::neutral(1, 1.0).unwrap(),
            vec![vec![ScatteringFn::sinh_blaschke(0.4, 1.0)]],
            Some(0.2 * PI),
        )
        .unwrap();
        let a = norm_kappa(&sg, 2048).unwrap().value;
        let b = norm_kappa(&sg, 4096).unwrap().value;
        assert!(a > 1.0);
        assert!((a - b).abs() / b < 5e-4, "{a} vs {b}");
        // Independent oracle: |ω| on Im ζ = −κ peaks at Re ζ = 0.
        let w = ScatteringFn::sinh_blaschke(0.4, 1.0).eval(C64::new(0.0, -0.2 * PI)).norm();
        assert!(a <= w * (1.0 + 1e-12) && (w - a) / w < 1e-3, "{a} vs {w}");
    }

    #[test]
    fn analyticity_of_models() {
        let pts = interior_points(11, 30, sinh_gordon(0.4).kappa());
        assert!(analyticity_residual(&sinh_gordon(0.4), &pts).unwrap() <= 1e-6);
        let m = SMatrixModel::sigma_on(4, 1.0, None).unwrap();
        let pts = interior_points(12, 30, m.kappa());
        assert!(analyticity_residual(&m, &pts).unwrap() <= 1e-6);
    }
}
