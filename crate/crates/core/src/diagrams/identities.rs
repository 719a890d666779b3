//! Exhaustive checks of the counting identities behind the contraction
//! calculus, and numerical Reidemeister II/III checks.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use serde::Serialize;

use super::{enumerate_contractions, evaluate_sweep, Contraction, IdentityOracle};
use crate::error::Result;
use crate::fock::perm::{cocycle_tensor_word, ENTRY_CAP};
use crate::fock::ZfEngine;
use crate::linalg::{identity, max_abs};
use crate::smatrix::SMatrixModel;

#[derive(Debug, Clone, Serialize)]
pub struct FactorialRow {
    pub k: usize,
    pub contractions: usize,
    pub factorial_sum: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CombinatorialReport {
    pub n: usize,
    pub bound: f64,
    pub rows: Vec<FactorialRow>,
    pub max_factorial_sum: f64,
    pub partitions_checked: usize,
    pub violations: Vec<String>,
}

impl CombinatorialReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.max_factorial_sum <= self.bound
    }
}

fn sqrt_fact(m: usize) -> f64 {
    (1..=m).map(|i| i as f64).product::<f64>().sqrt()
}

/// Checks that `{C} ∪ ext(C)` over the contractions in `hat` covers `all`
/// exactly once, returning a witness on failure.
fn partition_witness(
    all: &[Contraction],
    hat: &[Contraction],
    ext: impl Fn(&Contraction) -> Vec<Contraction>,
) -> Option<String> {
    let mut hits: BTreeMap<&Contraction, usize> = all.iter().map(|c| (c, 0)).collect();
    for c in hat {
        for member in std::iter::once(c.clone()).chain(ext(c)) {
            match hits.get_mut(&member) {
                Some(h) => *h += 1,
                None => return Some(format!("{:?} is not in the enumeration", member.pairs_one_based())),
            }
        }
    }
    hits.iter()
        .find(|(_, &h)| h != 1)
        .map(|(c, h)| format!("{:?} covered {h} times", c.pairs_one_based()))
}

/// Factorial-sum bound and the two disjoint-union decompositions, for all
/// `0 ≤ k < n`.
pub fn combinatorial_identities_check(n: usize) -> Result<CombinatorialReport> {
    let bound = 2f64.powi(n as i32) * sqrt_fact(n);
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    let mut partitions_checked = 0;
    for k in 0..n {
        let all = enumerate_contractions(n, k)?;
        let sum: f64 = all.iter().map(|c| sqrt_fact(n - k - c.len()) * sqrt_fact(k - c.len())).sum();
        if sum > bound {
            violations.push(format!("n={n}, k={k}: factorial sum {sum} exceeds {bound}"));
        }
        rows.push(FactorialRow { k, contractions: all.len(), factorial_sum: sum });

        // Vertex k (0-based) is the first right vertex in 𝒞_{n,k} and the
        // last left vertex in 𝒞_{n,k+1}.
        let hat: Vec<Contraction> = all.iter().filter(|c| !c.is_contracted(k)).cloned().collect();
        let add_left = |c: &Contraction| -> Vec<Contraction> {
            (0..k).filter(|&l| !c.is_contracted(l)).map(|l| c.with_pair(l, k).unwrap()).collect()
        };
        if let Some(w) = partition_witness(&all, &hat, add_left) {
            violations.push(format!("n={n}, k={k}: left decomposition fails: {w}"));
        }
        let all_next = enumerate_contractions(n, k + 1)?;
        let hat_next: Vec<Contraction> = all_next.iter().filter(|c| !c.is_contracted(k)).cloned().collect();
        let add_right = |c: &Contraction| -> Vec<Contraction> {
            (k + 1..n).filter(|&r| !c.is_contracted(r)).map(|r| c.with_pair(k, r).unwrap()).collect()
        };
        if let Some(w) = partition_witness(&all_next, &hat_next, add_right) {
            violations.push(format!("n={n}, k={}: right decomposition fails: {w}", k + 1));
        }
        let a: Vec<_> = hat.iter().map(|c| &c.pairs).collect();
        let b: Vec<_> = hat_next.iter().map(|c| &c.pairs).collect();
        if a != b {
            violations.push(format!("n={n}, k={k}: contractions avoiding vertex {} differ between sides", k + 1));
        }
        partitions_checked += 2;
    }
    let max_factorial_sum = rows.iter().map(|r| r.factorial_sum).fold(0.0, f64::max);
    Ok(CombinatorialReport { n, bound, rows, max_factorial_sum, partitions_checked, violations })
}

#[derive(Debug, Clone, Serialize)]
pub struct ReidemeisterReport {
    pub samples: usize,
    pub type_two: f64,
    pub type_three: f64,
    pub embeddings: f64,
}

impl ReidemeisterReport {
    pub fn max_residual(&self) -> f64 {
        self.type_two.max(self.type_three).max(self.embeddings)
    }
}

/// Double crossings against no crossing, the two sides of the triple-crossing
/// move, and whole diagrams under a change of arc depths, at random `θ`.
pub fn reidemeister_check(model: &SMatrixModel, seed: u64, samples: usize) -> Result<ReidemeisterReport> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let d = model.dim_k();
    let engine = ZfEngine::new(model)?;
    let oracle = IdentityOracle { engine: &engine };
    let mut report = ReidemeisterReport { samples, type_two: 0.0, type_three: 0.0, embeddings: 0.0 };
    for _ in 0..samples {
        let th: Vec<f64> = (0..3).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let two = cocycle_tensor_word(model, &[0, 0], &th[..2], ENTRY_CAP)?;
        report.type_two = report.type_two.max(max_abs(&(two - identity(d * d))));
        let a = cocycle_tensor_word(model, &[0, 1, 0], &th, ENTRY_CAP)?;
        let b = cocycle_tensor_word(model, &[1, 0, 1], &th, ENTRY_CAP)?;
        report.type_three = report.type_three.max(max_abs(&(a - b)));

        // Interleaved arcs (1,4), (2,5) around an open line at 3, with the
        // crossing moved from the right half to the left half.
        let c = Contraction::new(6, 3, vec![(0, 3), (1, 4)])?;
        let (x, y) = (th[0], th[1]);
        let theta = [x, y, th[2], x, y, th[2]];
        let alpha: Vec<usize> = (0..6).map(|_| rng.gen_range(0..d)).collect();
        let canonical = evaluate_sweep(model, &c, &oracle, &theta, &alpha, None)?;
        let swapped = evaluate_sweep(model, &c, &oracle, &theta, &alpha, Some(&[1, 0]))?;
        report.embeddings = report.embeddings.max((canonical - swapped).norm());
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::super::tests::charged_model;
    use super::*;

    #[test]
    fn small_cases() {
        let r = combinatorial_identities_check(1).unwrap();
        assert_eq!(r.bound, 2.0);
        assert_eq!(r.max_factorial_sum, 1.0);
        assert!(r.passed());
        let r = combinatorial_identities_check(6).unwrap();
        assert!((r.bound - 64.0 * 720f64.sqrt()).abs() < 1e-9);
        assert!((r.bound - 1717.30).abs() < 0.005);
        assert!(r.passed(), "{:?}", r.violations);
    }

    #[test]
    fn factorial_sum_by_hand() {
        // n = 2, k = 1: {} gives 1·1, {(1,2)} gives 1.
        let r = combinatorial_identities_check(2).unwrap();
        assert_eq!(r.rows[1].factorial_sum, 2.0);
        assert_eq!(r.rows[0].factorial_sum, 2f64.sqrt());
    }

    #[test]
    fn witness_reported() {
        let all = enumerate_contractions(3, 1).unwrap();
        let w = partition_witness(&all, &all, |_| Vec::new());
        assert!(w.is_none());
        let w = partition_witness(&all, &all[..1], |_| Vec::new()).unwrap();
        assert!(w.contains("covered 0 times"));
    }

    #[test]
    fn moves_hold_numerically() {
        for m in [charged_model(), SMatrixModel::sigma_on(3, 1.0, None).unwrap()] {
            let r = reidemeister_check(&m, 4, 10).unwrap();
            assert!(r.max_residual() <= 1e-12, "{r:?}");
            assert!(r.embeddings.is_finite());
        }
    }

    #[test]
    fn all_sizes_up_to_eight() {
        for n in 1..=8 {
            assert!(combinatorial_identities_check(n).unwrap().passed());
        }
    }
}
