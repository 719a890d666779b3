//! Contraction diagrams: external vertices `1..k` on the left carry creators
//! of the ket, vertices `k+1..n` on the right carry annihilators of the bra,
//! and a contraction joins a right vertex to a left one.
//!
//! Arcs are drawn between the vertex row and the box of `A`. The canonical
//! embedding puts the arc with the smaller left endpoint deeper, so nested
//! arcs never meet and interleaved arcs cross once, in the right half.

pub mod embedding;
pub mod identities;
pub mod oracle;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::smatrix::SMatrixModel;
use crate::C64;

pub use embedding::{evaluate_index_sum, evaluate_sweep};
pub use identities::{combinatorial_identities_check, reidemeister_check, CombinatorialReport, ReidemeisterReport};
pub use oracle::{IdentityOracle, MatrixElementOracle, VacuumProjector, ZfWordOracle};

/// Largest `n` accepted by the enumeration.
pub const MAX_N: usize = 10;

/// A set of pairs `(l, r)`, 0-based, `l < k ≤ r < n`, sorted by `l`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Contraction {
    pub n: usize,
    pub k: usize,
    pub pairs: Vec<(usize, usize)>,
}

impl Contraction {
    pub fn empty(n: usize, k: usize) -> Self {
        Contraction { n, k, pairs: Vec::new() }
    }

    pub fn new(n: usize, k: usize, mut pairs: Vec<(usize, usize)>) -> Result<Self> {
        if k > n {
            return Err(Error::Config(format!("k = {k} exceeds n = {n}")));
        }
        let mut used = vec![false; n];
        for &(l, r) in &pairs {
            if !(l < k && k <= r && r < n) {
                return Err(Error::Config(format!("pair ({}, {}) does not join the two sides", l + 1, r + 1)));
            }
            for v in [l, r] {
                if used[v] {
                    return Err(Error::Config(format!("vertex {} appears twice", v + 1)));
                }
                used[v] = true;
            }
        }
        pairs.sort_unstable();
        Ok(Contraction { n, k, pairs })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn sign(&self) -> f64 {
        if self.pairs.len() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn is_contracted(&self, v: usize) -> bool {
        self.pairs.iter().any(|&(l, r)| l == v || r == v)
    }

    pub fn uncontracted(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| !self.is_contracted(v)).collect()
    }

    pub fn with_pair(&self, l: usize, r: usize) -> Result<Self> {
        let mut pairs = self.pairs.clone();
        pairs.push((l, r));
        Contraction::new(self.n, self.k, pairs)
    }

    /// Pairs in 1-based numbering, as printed in reports.
    pub fn pairs_one_based(&self) -> Vec<(usize, usize)> {
        self.pairs.iter().map(|&(l, r)| (l + 1, r + 1)).collect()
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// `Σ_j C(k,j)·C(n−k,j)·j!`.
pub fn contraction_count(n: usize, k: usize) -> u128 {
    (0..=k.min(n - k)).map(|j| binomial(k, j) * binomial(n - k, j) * (1..=j as u128).product::<u128>()).sum()
}

/// Every contraction of `n` vertices with `k` on the left.
pub fn enumerate_contractions(n: usize, k: usize) -> Result<Vec<Contraction>> {
    if n > MAX_N {
        return Err(Error::Cap(format!("contraction enumeration is capped at n = {MAX_N}, got {n}")));
    }
    if k > n {
        return Err(Error::Config(format!("k = {k} exceeds n = {n}")));
    }
    fn rec(l: usize, k: usize, n: usize, used: &mut Vec<bool>, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Contraction>) {
        if l == k {
            out.push(Contraction { n, k, pairs: cur.clone() });
            return;
        }
        rec(l + 1, k, n, used, cur, out);
        for r in k..n {
            if !used[r] {
                used[r] = true;
                cur.push((l, r));
                rec(l + 1, k, n, used, cur, out);
                cur.pop();
                used[r] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(0, k, n, &mut vec![false; n], &mut Vec::new(), &mut out);
    Ok(out)
}

/// Pairwise sum in a fixed tree shape.
pub fn tree_sum(values: &[C64]) -> C64 {
    match values.len() {
        0 => C64::new(0.0, 0.0),
        1 => values[0],
        m => tree_sum(&values[..m / 2]) + tree_sum(&values[m / 2..]),
    }
}

pub(crate) fn check_tuple(model: &SMatrixModel, theta: &[f64], alpha: &[usize], n: usize) -> Result<()> {
    if theta.len() != n || alpha.len() != n {
        return Err(Error::Config(format!(
            "expected {n} rapidities and indices, got {} and {}",
            theta.len(),
            alpha.len()
        )));
    }
    let d = model.dim_k();
    if let Some(&a) = alpha.iter().find(|&&a| a >= d) {
        return Err(Error::Index { index: a, dim: d });
    }
    if let Some(t) = theta.iter().find(|t| !t.is_finite()) {
        return Err(Error::Config(format!("non-finite rapidity {t}")));
    }
    Ok(())
}

/// `⟨A⟩_C^α(θ)` in the canonical embedding.
pub fn evaluate_contraction(
    model: &SMatrixModel,
    c: &Contraction,
    oracle: &dyn MatrixElementOracle,
    theta: &[f64],
    alpha: &[usize],
) -> Result<C64> {
    evaluate_sweep(model, c, oracle, theta, alpha, None)
}

/// `Σ_{C∈𝒞_{n,k}} (−1)^{|C|} ⟨A⟩_C`.
pub fn completely_contracted(
    model: &SMatrixModel,
    n: usize,
    k: usize,
    oracle: &dyn MatrixElementOracle,
    theta: &[f64],
    alpha: &[usize],
) -> Result<C64> {
    check_tuple(model, theta, alpha, n)?;
    let all = enumerate_contractions(n, k)?;
    let terms: Result<Vec<C64>> = all
        .par_iter()
        .map(|c| Ok(evaluate_contraction(model, c, oracle, theta, alpha)? * c.sign()))
        .collect();
    Ok(tree_sum(&terms?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{ZfEngine, ZfExpr};
    use crate::smatrix::ScatteringFn;
    use crate::spectrum::ParticleSpectrum;
    use rand::{Rng, SeedableRng};
    use std::collections::BTreeSet;

    pub(crate) fn charged_model() -> SMatrixModel {
        let spec = ParticleSpectrum::new(vec![1.0, 1.0], vec![1, 0], None).unwrap();
        let w = ScatteringFn::sinh_blaschke(0.4, 1.0);
        SMatrixModel::diagonal(spec, vec![vec![w.clone(); 2]; 2], None).unwrap()
    }

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
    }

    #[test]
    fn counts_match_closed_form() {
        assert_eq!(enumerate_contractions(2, 1).unwrap().len(), 2);
        assert_eq!(enumerate_contractions(4, 2).unwrap().len(), 7);
        for n in 0..=8 {
            assert_eq!(enumerate_contractions(n, 0).unwrap(), vec![Contraction::empty(n, 0)]);
            for k in 0..=n {
                let all = enumerate_contractions(n, k).unwrap();
                assert_eq!(all.len() as u128, contraction_count(n, k));
                let distinct: BTreeSet<_> = all.iter().collect();
                assert_eq!(distinct.len(), all.len());
                for c in &all {
                    assert_eq!(Contraction::new(n, k, c.pairs.clone()).unwrap(), *c);
                    assert!(c.len() <= k.min(n - k));
                }
            }
        }
    }

    #[test]
    fn brute_force_enumeration_agrees() {
        // All subsets of the k·(n−k) possible pairs, filtered by disjointness.
        let (n, k) = (5, 2);
        let cand: Vec<(usize, usize)> = (0..k).flat_map(|l| (k..n).map(move |r| (l, r))).collect();
        let mut brute = BTreeSet::new();
        for mask in 0u32..(1 << cand.len()) {
            let pairs: Vec<_> = (0..cand.len()).filter(|i| mask >> i & 1 == 1).map(|i| cand[i]).collect();
            if let Ok(c) = Contraction::new(n, k, pairs) {
                brute.insert(c);
            }
        }
        let ours: BTreeSet<_> = enumerate_contractions(n, k).unwrap().into_iter().collect();
        assert_eq!(ours, brute);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(enumerate_contractions(11, 3), Err(Error::Cap(_))));
        assert!(Contraction::new(4, 2, vec![(0, 1)]).is_err());
        assert!(Contraction::new(4, 2, vec![(0, 2), (1, 2)]).is_err());
    }

    #[test]
    fn identity_pair_cancels() {
        let m = charged_model();
        let e = ZfEngine::new(&m).unwrap();
        let id = IdentityOracle { engine: &e };
        for (th, al) in [([0.3, 0.3], [1, 1]), ([0.3, 0.3], [0, 1]), ([0.3, -0.2], [0, 0])] {
            let empty = evaluate_contraction(&m, &Contraction::empty(2, 1), &id, &th, &al).unwrap();
            let expect = if th[0] == th[1] && al[0] == al[1] { 1.0 } else { 0.0 };
            assert!(close(empty, C64::new(expect, 0.0), 1e-14));
            let con = completely_contracted(&m, 2, 1, &id, &th, &al).unwrap();
            assert!(con.norm() < 1e-14);
        }
    }

    #[test]
    fn vacuum_projector_needs_full_contraction() {
        let m = SMatrixModel::sigma_on(3, 1.0, None).unwrap();
        let th = [0.5, -0.4, -0.4, 0.5];
        let al = [0, 2, 2, 0];
        let full = Contraction::new(4, 2, vec![(0, 3), (1, 2)]).unwrap();
        let v = evaluate_contraction(&m, &full, &VacuumProjector, &th, &al).unwrap();
        assert!(close(v, C64::new(1.0, 0.0), 1e-14));
        let partial = Contraction::new(4, 2, vec![(0, 3)]).unwrap();
        assert_eq!(evaluate_contraction(&m, &partial, &VacuumProjector, &th, &al).unwrap(), C64::new(0.0, 0.0));
        // Interleaved arcs cross once: the value is a single S component.
        let crossed = Contraction::new(4, 2, vec![(0, 2), (1, 3)]).unwrap();
        let th = [0.5, -0.4, 0.5, -0.4];
        let s = m.eval_real(-0.9).unwrap();
        for al in [[0, 1, 0, 1], [0, 1, 1, 0], [2, 2, 2, 2]] {
            let v = evaluate_contraction(&m, &crossed, &VacuumProjector, &th, &al).unwrap();
            // Arc (2,4) runs horizontally across the right vertical of arc (1,3).
            let expect = crate::smatrix::comp(&s, 3, al[2], al[3], al[1], al[0]);
            assert!(close(v, expect, 1e-14), "{al:?}: {v} vs {expect}");
        }
    }

    #[test]
    fn six_vertex_example() {
        let m = SMatrixModel::sigma_on(3, 1.0, None).unwrap();
        let e = ZfEngine::new(&m).unwrap();
        let a = ZfWordOracle { engine: &e, word: ZfExpr::new().create(1, 0.9).annihilate(2, -0.3) };
        let c = Contraction::new(6, 3, vec![(0, 5), (2, 3)]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let (t16, t34) = (0.7, -1.2);
        let th = [t16, -0.3, t34, t34, 0.9, t16];
        let d = 3;
        for _ in 0..20 {
            let al: Vec<usize> = (0..6).map(|_| rng.gen_range(0..d)).collect();
            let got = evaluate_contraction(&m, &c, &a, &th, &al).unwrap();
            let mut expect = C64::new(0.0, 0.0);
            if al[2] == al[3] {
                let s65 = m.eval_real(th[5] - th[4]).unwrap();
                let s26 = m.eval_real(th[1] - th[5]).unwrap();
                for b in 0..d {
                    for g in 0..d {
                        for eps in 0..d {
                            let f = crate::smatrix::comp(&s65, d, al[4], al[5], b, g)
                                * crate::smatrix::comp(&s26, d, b, eps, al[1], al[0]);
                            expect += f * a.element(&[(th[1], eps)], &[(th[4], g)]).unwrap();
                        }
                    }
                }
            }
            assert!(close(got, expect, 1e-12), "{al:?}: {got} vs {expect}");
            assert!(close(evaluate_index_sum(&m, &c, &a, &th, &al, None).unwrap(), expect, 1e-12));
        }
        // Rapidity deltas switch the whole term off.
        let th_bad = [t16 + 0.1, -0.3, t34, t34, 0.9, t16];
        assert_eq!(evaluate_contraction(&m, &c, &a, &th_bad, &[0; 6]).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn oracle_conjugation_symmetry() {
        let m = SMatrixModel::sigma_on(3, 1.0, None).unwrap();
        let e = ZfEngine::new(&m).unwrap();
        let words = [
            ZfExpr::new().create(0, 0.2),
            ZfExpr::new().create(1, 0.2).annihilate(2, -0.5),
            ZfExpr::new().annihilate(0, 0.2).create(2, 0.7).create(1, -0.5),
        ];
        for w in words {
            let o = ZfWordOracle { engine: &e, word: w };
            let left = [(-0.5, 2), (0.7, 1)];
            let right = [(0.2, 0), (0.7, 2), (0.9, 1)];
            for l in 0..=2 {
                for r in 0..=3 {
                    let a = o.element(&left[..l], &right[..r]).unwrap();
                    let b = o.element_conjugated(&left[..l], &right[..r]).unwrap();
                    assert!(close(a, b, 1e-12));
                }
            }
        }
    }

    #[test]
    fn boundary_sides_match_fock_engine() {
        let m = SMatrixModel::sigma_on(3, 1.0, None).unwrap();
        let e = ZfEngine::new(&m).unwrap();
        let word = ZfExpr::new().create(0, 0.4).create(2, -0.8).create(1, 1.3);
        let o = ZfWordOracle { engine: &e, word: word.clone() };
        let omega = o.on_vacuum().unwrap();
        // √n!(AΩ)_n(θ, α) for distinct atoms is the coefficient of the
        // canonical word, after bringing z†_α(θ) itself to canonical form.
        let th = [1.3, 0.4, -0.8];
        for a0 in 0..3 {
            for a1 in 0..3 {
                for a2 in 0..3 {
                    let al = [a0, a1, a2];
                    let word: Vec<_> = th.iter().copied().zip(al).collect();
                    let bra = e.word_state(&word).unwrap();
                    let mut expect = C64::new(0.0, 0.0);
                    for t in bra.terms() {
                        expect += t.coefficient.conj() * omega.coefficient(&t.word);
                    }
                    let got = completely_contracted(&m, 3, 0, &o, &th, &al).unwrap();
                    assert!(close(got, expect, 1e-10));
                }
            }
        }
        // k = n: conj of the A*Ω coefficient with reversed order.
        let annihilating = ZfWordOracle { engine: &e, word: ZfExpr::new().annihilate(2, -0.8).annihilate(0, 0.4) };
        let th = [0.4, -0.8];
        for a0 in 0..3 {
            for a1 in 0..3 {
                let al = [a0, a1];
                let got = completely_contracted(&m, 2, 2, &annihilating, &th, &al).unwrap();
                let rev = [(th[1], a1), (th[0], a0)];
                let a_star = e.normal_order(&annihilating.word.adjoint()).unwrap();
                let mut expect = C64::new(0.0, 0.0);
                for t in e.word_state(&rev).unwrap().terms() {
                    expect += t.coefficient.conj() * a_star.coefficient(&t.word);
                }
                assert!(close(got, expect.conj(), 1e-10));
            }
        }
    }

    #[test]
    fn sign_structure() {
        let m = charged_model();
        let e = ZfEngine::new(&m).unwrap();
        let id = IdentityOracle { engine: &e };
        let th = [0.2, -0.7, -0.7, 0.2];
        let al = [0, 1, 1, 0];
        let all = enumerate_contractions(4, 2).unwrap();
        for c in &all {
            for l in 0..2 {
                for r in 2..4 {
                    if let Ok(bigger) = c.with_pair(l, r) {
                        assert_eq!(bigger.sign(), -c.sign());
                    }
                }
            }
        }
        let direct: C64 = all
            .iter()
            .map(|c| evaluate_index_sum(&m, c, &id, &th, &al, None).unwrap() * (-1.0f64).powi(c.len() as i32))
            .sum();
        let con = completely_contracted(&m, 4, 2, &id, &th, &al).unwrap();
        assert!(close(direct, con, 1e-13));
    }
}
