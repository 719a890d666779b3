//! Permutations in one-line notation and the cocycle tensors `S_n^π(θ)`.
//!
//! A permutation is a `Vec<usize>` with `p[i] = π(i)` (0-based), composed
//! as `(πσ)(i) = π(σ(i))`. The adjacent transposition `τ_k` swaps `k` and
//! `k+1`.

use crate::error::{Error, Result};
use crate::linalg::{identity, left_mul_two_site, tensor_dim, CMat};
use crate::smatrix::SMatrixModel;

pub type Perm = Vec<usize>;

/// Default cap on matrix entries of a dense cocycle tensor.
pub const ENTRY_CAP: usize = 1_000_000;

pub fn identity_perm(n: usize) -> Perm {
    (0..n).collect()
}

pub fn compose(p: &[usize], q: &[usize]) -> Perm {
    q.iter().map(|&i| p[i]).collect()
}

pub fn inverse(p: &[usize]) -> Perm {
    let mut inv = vec![0; p.len()];
    for (i, &j) in p.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

pub fn transposition(n: usize, k: usize) -> Perm {
    let mut p = identity_perm(n);
    p.swap(k, k + 1);
    p
}

pub fn inversions(p: &[usize]) -> usize {
    let mut c = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                c += 1;
            }
        }
    }
    c
}

pub fn is_perm(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    for &x in p {
        if x >= p.len() || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    true
}

/// All permutations of `0..n` in lexicographic order.
pub fn all_perms(n: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    let mut p = identity_perm(n);
    loop {
        out.push(p.clone());
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).unwrap();
        p.swap(i, j);
        p[i + 1..].reverse();
    }
    out
}

/// Position of `p` in [`all_perms`] (Lehmer code).
pub fn perm_rank(p: &[usize]) -> usize {
    let n = p.len();
    let mut rank = 0;
    let mut fact = 1;
    for i in (0..n).rev() {
        let smaller = p[i + 1..].iter().filter(|&&x| x < p[i]).count();
        rank += smaller * fact;
        fact *= n - i;
    }
    rank
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// A reduced word `[k₁, …, k_m]` with `π = τ_{k₁}⋯τ_{k_m}`, found by
/// repeatedly splitting off `τ_i` on the right at the leftmost (or
/// rightmost) descent `π(i) > π(i+1)`.
pub fn reduced_word(p: &[usize], rightmost: bool) -> Vec<usize> {
    let mut q = p.to_vec();
    let mut word = Vec::new();
    loop {
        let mut descents = (0..q.len().saturating_sub(1)).filter(|&i| q[i] > q[i + 1]);
        let next = if rightmost { descents.last() } else { descents.next() };
        match next {
            None => break,
            Some(i) => {
                q.swap(i, i + 1);
                word.push(i);
            }
        }
    }
    word.reverse();
    word
}

pub fn word_to_perm(n: usize, word: &[usize]) -> Perm {
    word.iter().fold(identity_perm(n), |acc, &k| compose(&acc, &transposition(n, k)))
}

/// `θ_π = (θ_{π(1)}, …, θ_{π(n)})`.
pub fn permute_tuple<T: Copy>(theta: &[T], p: &[usize]) -> Vec<T> {
    p.iter().map(|&i| theta[i]).collect()
}

fn check_cap(d: usize, n: usize, cap: usize) -> Result<usize> {
    let dim = tensor_dim(d, n).ok_or_else(|| Error::Cap(format!("dim_k^n overflows for d = {d}, n = {n}")))?;
    if dim.checked_mul(dim).map_or(true, |e| e > cap) {
        return Err(Error::Cap(format!(
            "S_n^π on K^⊗{n} has {dim}² entries, above the cap of {cap}; lower n or raise the cap"
        )));
    }
    Ok(dim)
}

/// `S_n^w(θ)` for a word `w` of adjacent transpositions, multiplied factor
/// by factor according to the cocycle rule.
pub fn cocycle_tensor_word(model: &SMatrixModel, word: &[usize], theta: &[f64], cap: usize) -> Result<CMat> {
    let n = theta.len();
    let d = model.dim_k();
    let dim = check_cap(d, n, cap)?;
    if let Some(&k) = word.iter().find(|&&k| k + 1 >= n) {
        return Err(Error::Config(format!("transposition τ_{} out of range for n = {n}", k + 1)));
    }
    let mut factors = Vec::with_capacity(word.len());
    let mut th = theta.to_vec();
    for &k in word {
        factors.push((k, model.eval_real(th[k + 1] - th[k])?));
        th.swap(k, k + 1);
    }
    let mut m = identity(dim);
    for (k, s) in factors.iter().rev() {
        m = left_mul_two_site(s, d, n, *k, &m);
    }
    Ok(m)
}

/// `S_n^π(θ)` through the leftmost-descent reduced word of `π`.
pub fn cocycle_tensor(model: &SMatrixModel, p: &[usize], theta: &[f64]) -> Result<CMat> {
    cocycle_tensor_capped(model, p, theta, ENTRY_CAP)
}

pub fn cocycle_tensor_capped(model: &SMatrixModel, p: &[usize], theta: &[f64], cap: usize) -> Result<CMat> {
    if p.len() != theta.len() || !is_perm(p) {
        return Err(Error::Config(format!("{p:?} is not a permutation of {} elements", theta.len())));
    }
    cocycle_tensor_word(model, &reduced_word(p, false), theta, cap)
}
