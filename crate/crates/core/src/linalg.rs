//! Dense complex helpers on tensor powers of the one-particle space.
//!
//! A vector on `K^{⊗n}` is stored with the first tensor slot most
//! significant: the multi-index `(a_1, ..., a_n)` sits at
//! `a_1 d^{n-1} + ... + a_n`. Two-site matrices use row `(α, β)` for the
//! upper indices and column `(γ, δ)` for the lower ones of `S^{αβ}_{γδ}`.

use nalgebra::{DMatrix, DVector};

use crate::C64;

pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn identity(dim: usize) -> CMat {
    CMat::identity(dim, dim)
}

/// The flip `F(u ⊗ v) = v ⊗ u` on `K ⊗ K`.
pub fn flip(d: usize) -> CMat {
    let mut f = CMat::zeros(d * d, d * d);
    for a in 0..d {
        for b in 0..d {
            f[(a * d + b, b * d + a)] = ONE;
        }
    }
    f
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// `d^n`, or `None` on overflow.
pub fn tensor_dim(d: usize, n: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..n {
        acc = acc.checked_mul(d)?;
    }
    Some(acc)
}

/// `1_{k} ⊗ M ⊗ 1_{n-k-2}` for a two-site `M`, with `k` the 0-based first slot.
pub fn embed_two_site(m: &CMat, d: usize, n: usize, k: usize) -> CMat {
    let left = identity(tensor_dim(d, k).unwrap());
    let right = identity(tensor_dim(d, n - k - 2).unwrap());
    kron(&kron(&left, m), &right)
}

/// In-place `v ← M_{n,k} v` for a two-site matrix acting on slots `k, k+1`.
pub fn apply_two_site(m: &CMat, d: usize, n: usize, k: usize, v: &mut [C64]) {
    let inner = tensor_dim(d, n - k - 2).unwrap();
    let outer = tensor_dim(d, k).unwrap();
    let block = d * d * inner;
    let mut buf = vec![ZERO; d * d];
    for o in 0..outer {
        for i in 0..inner {
            let base = o * block + i;
            for (p, b) in buf.iter_mut().enumerate() {
                *b = v[base + p * inner];
            }
            for r in 0..d * d {
                let mut acc = ZERO;
                for c in 0..d * d {
                    let x = m[(r, c)];
                    if x != ZERO {
                        acc += x * buf[c];
                    }
                }
                v[base + r * inner] = acc;
            }
        }
    }
}

/// `M_{n,k} · A` for a square matrix `A` on `K^{⊗n}`.
pub fn left_mul_two_site(m: &CMat, d: usize, n: usize, k: usize, a: &CMat) -> CMat {
    let mut out = a.clone();
    let rows = a.nrows();
    let mut col = vec![ZERO; rows];
    for j in 0..a.ncols() {
        for r in 0..rows {
            col[r] = a[(r, j)];
        }
        apply_two_site(m, d, n, k, &mut col);
        for r in 0..rows {
            out[(r, j)] = col[r];
        }
    }
    out
}

/// Hermitian inner product, antilinear in the first slot.
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm2(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub const POWER_TOL: f64 = 1e-12;
pub const POWER_MAX_ITER: usize = 10_000;

/// Largest singular value of a linear map given by `apply` and `apply_adj`,
/// by power iteration on `A* A`.
pub fn op_norm_with<F, G>(dim: usize, apply: F, apply_adj: G) -> f64
where
    F: Fn(&[C64]) -> Vec<C64>,
    G: Fn(&[C64]) -> Vec<C64>,
{
    op_norm_iter(dim, apply, apply_adj, POWER_MAX_ITER)
}

/// As [`op_norm_with`] with an explicit iteration cap. Stops early once the
/// estimate falls below `1e-15`, where only rounding noise is left.
pub fn op_norm_iter<F, G>(dim: usize, apply: F, apply_adj: G, max_iter: usize) -> f64
where
    F: Fn(&[C64]) -> Vec<C64>,
    G: Fn(&[C64]) -> Vec<C64>,
{
    if dim == 0 {
        return 0.0;
    }
    // Deterministic start vector with no special symmetry.
    let mut v: Vec<C64> = (0..dim)
        .map(|i| {
            let t = i as f64 + 1.0;
            C64::new(1.0 + 0.37 * (t * 0.713).sin(), 0.29 * (t * 1.911).cos())
        })
        .collect();
    let nv = norm2(&v);
    v.iter_mut().for_each(|z| *z /= nv);
    let mut est = 0.0;
    for _ in 0..max_iter {
        let w = apply_adj(&apply(&v));
        let lam = norm2(&w);
        if lam == 0.0 || !lam.is_finite() {
            return if lam.is_finite() { 0.0 } else { f64::INFINITY };
        }
        v = w.into_iter().map(|z| z / lam).collect();
        let converged = (lam - est).abs() <= POWER_TOL * lam || lam < 1e-30;
        est = lam;
        if converged {
            break;
        }
    }
    est.sqrt()
}

/// Operator norm of a dense matrix.
pub fn op_norm(m: &CMat) -> f64 {
    if m.iter().all(|z| *z == ZERO) {
        return 0.0;
    }
    let mh = m.adjoint();
    op_norm_with(
        m.ncols(),
        |v| (m * CVec::from_column_slice(v)).as_slice().to_vec(),
        |v| (&mh * CVec::from_column_slice(v)).as_slice().to_vec(),
    )
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flip_swaps_slots() {
        let d = 3;
        let f = flip(d);
        let u = CVec::from_fn(d, |i, _| C64::new(i as f64 + 1.0, 0.5));
        let w = CVec::from_fn(d, |i, _| C64::new(0.0, i as f64 - 1.0));
        let uw = u.kronecker(&w);
        let wu = w.kronecker(&u);
        assert!((f * uw - wu).norm() < 1e-15);
    }

    #[test]
    fn two_site_application_matches_embedding() {
        let d = 2;
        let n = 4;
        let m = CMat::from_fn(4, 4, |r, c| C64::new((r * 4 + c) as f64 * 0.1, (r as f64 - c as f64) * 0.2));
        let dim = tensor_dim(d, n).unwrap();
        for k in 0..n - 1 {
            let mut v: Vec<C64> = (0..dim).map(|i| C64::new(i as f64, 1.0 / (i as f64 + 1.0))).collect();
            let dense = embed_two_site(&m, d, n, k) * CVec::from_column_slice(&v);
            apply_two_site(&m, d, n, k, &mut v);
            let diff: f64 = v.iter().zip(dense.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(diff < 1e-12);
        }
    }

    #[test]
    fn op_norm_of_known_matrices() {
        let f = flip(3);
        assert!((op_norm(&f) - 1.0).abs() < 1e-12);
        let mut m = CMat::zeros(3, 3);
        m[(0, 1)] = C64::new(3.0, 4.0);
        m[(2, 2)] = C64::new(1.0, 0.0);
        assert!((op_norm(&m) - 5.0).abs() < 1e-10);
        assert_eq!(op_norm(&CMat::zeros(2, 2)), 0.0);
    }
}
