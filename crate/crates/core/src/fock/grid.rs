//! Fock-space vectors sampled on a uniform rapidity grid.
//!
//! Sector `n` stores `Ψ_n^{α₁…α_n}(θ_{i₁},…,θ_{i_n})` at flat position
//! `(i₁⋯i_n)·dⁿ + (α₁⋯α_n)`, both multi-indices read with the first slot
//! most significant. Integrals are Riemann sums with weight `Δθ` per
//! rapidity, so `δ(θ−θ′)` corresponds to `1/Δθ` on a single cell.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::perm::factorial;
use crate::linalg::{apply_two_site, tensor_dim, CMat, ZERO};
use crate::smatrix::SMatrixModel;
use crate::spectrum::ParticleSpectrum;
use crate::C64;

/// Largest number of complex entries allowed in one sector.
pub const ENTRY_CAP: usize = 200_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RapidityGrid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Default for RapidityGrid {
    fn default() -> Self {
        RapidityGrid { lo: -8.0, hi: 8.0, points: 257 }
    }
}

impl RapidityGrid {
    pub fn new(lo: f64, hi: f64, points: usize) -> Result<Self> {
        let g = RapidityGrid { lo, hi, points };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.hi > self.lo && self.points >= 2) {
            return Err(Error::Config(format!("bad rapidity grid {self:?}")));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.points - 1) as f64
    }

    pub fn theta(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.step()
    }

    pub fn thetas(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.theta(i)).collect()
    }

    /// The same range with twice the resolution.
    pub fn refined(&self) -> Self {
        RapidityGrid { points: 2 * self.points - 1, ..*self }
    }
}

/// `S(θ_j − θ_i)` for all grid differences, indexed by `j − i + G − 1`.
pub struct GridSTable {
    g: usize,
    mats: Vec<CMat>,
}

impl GridSTable {
    pub fn new(model: &SMatrixModel, grid: &RapidityGrid) -> Result<Self> {
        let g = grid.points;
        let h = grid.step();
        let mats = (0..2 * g - 1)
            .into_par_iter()
            .map(|k| model.eval_real((k as f64 - (g - 1) as f64) * h))
            .collect::<Result<Vec<_>>>()?;
        Ok(GridSTable { g, mats })
    }

    /// `S(θ_j − θ_i)`.
    pub fn get(&self, i: usize, j: usize) -> &CMat {
        &self.mats[j + self.g - 1 - i]
    }
}

fn unflatten(mut flat: usize, base: usize, n: usize, out: &mut [usize]) {
    for k in (0..n).rev() {
        out[k] = flat % base;
        flat /= base;
    }
}

fn flatten(idx: &[usize], base: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * base + i)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    grid: RapidityGrid,
    d: usize,
    sectors: Vec<Vec<C64>>,
}

fn sector_len(grid: &RapidityGrid, d: usize, n: usize) -> Result<usize> {
    let len = tensor_dim(grid.points, n)
        .and_then(|a| tensor_dim(d, n).and_then(|b| a.checked_mul(b)))
        .filter(|&l| l <= ENTRY_CAP);
    len.ok_or_else(|| {
        Error::Cap(format!(
            "sector n = {n} with {} grid points and dim_k = {d} exceeds {ENTRY_CAP} entries; use a coarser grid or lower N_max",
            grid.points
        ))
    })
}

impl GridState {
    pub fn zero(grid: RapidityGrid, d: usize, n_max: usize) -> Result<Self> {
        grid.validate()?;
        let sectors = (0..=n_max).map(|n| sector_len(&grid, d, n).map(|l| vec![ZERO; l])).collect::<Result<_>>()?;
        Ok(GridState { grid, d, sectors })
    }

    pub fn vacuum(grid: RapidityGrid, d: usize, n_max: usize) -> Result<Self> {
        let mut s = Self::zero(grid, d, n_max)?;
        s.sectors[0][0] = C64::new(1.0, 0.0);
        Ok(s)
    }

    /// A one-particle state from its grid samples `ψ^α(θ_i)` at `i·d + α`.
    pub fn one_particle(grid: RapidityGrid, d: usize, n_max: usize, psi: &[C64]) -> Result<Self> {
        let mut s = Self::zero(grid, d, n_max.max(1))?;
        if psi.len() != s.sectors[1].len() {
            return Err(Error::Config(format!("one-particle data has length {}, expected {}", psi.len(), s.sectors[1].len())));
        }
        s.sectors[1].copy_from_slice(psi);
        Ok(s)
    }

    pub fn grid(&self) -> &RapidityGrid {
        &self.grid
    }

    pub fn dim_k(&self) -> usize {
        self.d
    }

    pub fn n_max(&self) -> usize {
        self.sectors.len() - 1
    }

    pub fn sector(&self, n: usize) -> &[C64] {
        &self.sectors[n]
    }

    pub fn sector_mut(&mut self, n: usize) -> &mut [C64] {
        &mut self.sectors[n]
    }

    fn same_shape(&self, other: &GridState) -> Result<()> {
        if self.grid != other.grid || self.d != other.d || self.sectors.len() != other.sectors.len() {
            return Err(Error::Config("grid states of different shape".into()));
        }
        Ok(())
    }

    pub fn sector_norm_sq(&self, n: usize) -> f64 {
        let w = self.grid.step().powi(n as i32);
        self.sectors[n].iter().map(|z| z.norm_sqr()).sum::<f64>() * w
    }

    pub fn norm(&self) -> f64 {
        (0..self.sectors.len()).map(|n| self.sector_norm_sq(n)).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &GridState) -> Result<C64> {
        self.same_shape(other)?;
        let h = self.grid.step();
        Ok(self
            .sectors
            .iter()
            .zip(&other.sectors)
            .enumerate()
            .map(|(n, (a, b))| a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<C64>() * h.powi(n as i32))
            .sum())
    }

    pub fn add(&self, other: &GridState) -> Result<GridState> {
        self.combine(other, C64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &GridState) -> Result<GridState> {
        self.combine(other, C64::new(-1.0, 0.0))
    }

    fn combine(&self, other: &GridState, s: C64) -> Result<GridState> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (a, b) in out.sectors.iter_mut().zip(&other.sectors) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += s * y);
        }
        Ok(out)
    }

    pub fn scale(&self, s: C64) -> GridState {
        let mut out = self.clone();
        out.sectors.iter_mut().flatten().for_each(|z| *z *= s);
        out
    }

    /// `N Ψ`, multiplying sector `n` by `n`.
    pub fn number(&self) -> GridState {
        let mut out = self.clone();
        for (n, s) in out.sectors.iter_mut().enumerate() {
            s.iter_mut().for_each(|z| *z *= n as f64);
        }
        out
    }

    /// `‖(N + shift)^{1/2} Ψ‖`.
    pub fn number_half_norm(&self, shift: f64) -> f64 {
        (0..self.sectors.len()).map(|n| (n as f64 + shift) * self.sector_norm_sq(n)).sum::<f64>().sqrt()
    }

    /// `D_n(τ_k)` on sector `n`: `S(θ_{k+1}−θ_k)_{n,k} Ψ(…θ_{k+1},θ_k…)`.
    pub fn apply_tau(&self, table: &GridSTable, n: usize, k: usize, data: &[C64]) -> Vec<C64> {
        let g = self.grid.points;
        let d = self.d;
        let block = tensor_dim(d, n).unwrap();
        let mut out = vec![ZERO; data.len()];
        out.par_chunks_mut(block).enumerate().for_each(|(flat, dst)| {
            let mut idx = vec![0; n];
            unflatten(flat, g, n, &mut idx);
            let (i, j) = (idx[k], idx[k + 1]);
            idx.swap(k, k + 1);
            let src = flatten(&idx, g);
            dst.copy_from_slice(&data[src * block..(src + 1) * block]);
            apply_two_site(table.get(i, j), d, n, k, dst);
        });
        out
    }

    /// `‖Ψ_n − D_n(τ_k)Ψ_n‖` for every sector `n ≥ 2` and `k`.
    pub fn symmetry_residuals(&self, table: &GridSTable) -> Vec<Vec<f64>> {
        let h = self.grid.step();
        (0..self.sectors.len())
            .map(|n| {
                (0..n.saturating_sub(1))
                    .map(|k| {
                        let t = self.apply_tau(table, n, k, &self.sectors[n]);
                        let s: f64 = self.sectors[n].iter().zip(&t).map(|(a, b)| (a - b).norm_sqr()).sum();
                        (s * h.powi(n as i32)).sqrt()
                    })
                    .collect()
            })
            .collect()
    }

    /// `P_n` on every sector through the coset factorisation of `Σ_{𝔖_n}`.
    pub fn project(&self, table: &GridSTable) -> GridState {
        let mut out = self.clone();
        for n in 2..self.sectors.len() {
            let mut r = self.sectors[n].clone();
            for m in (2..=n).rev() {
                let x = r.clone();
                for i in 1..m {
                    let t = self.apply_tau(table, n, i - 1, &r);
                    r = x.iter().zip(&t).map(|(a, b)| a + b).collect();
                }
            }
            let s = 1.0 / factorial(n) as f64;
            r.iter_mut().for_each(|z| *z *= s);
            out.sectors[n] = r;
        }
        out
    }

    /// `J Ψ`: complex conjugation, charge conjugation of every index, and
    /// reversal of slots and rapidities.
    pub fn pct(&self, spec: &ParticleSpectrum) -> Result<GridState> {
        if spec.dim_k() != self.d {
            return Err(Error::Config("spectrum does not match the state".into()));
        }
        let g = self.grid.points;
        let d = self.d;
        let mut out = self.clone();
        for n in 0..self.sectors.len() {
            let block = tensor_dim(d, n).unwrap();
            let src = &self.sectors[n];
            out.sectors[n].par_chunks_mut(block).enumerate().for_each(|(flat, dst)| {
                let mut idx = vec![0; n];
                unflatten(flat, g, n, &mut idx);
                idx.reverse();
                let sflat = flatten(&idx, g);
                let mut al = vec![0; n];
                for (a, z) in dst.iter_mut().enumerate() {
                    unflatten(a, d, n, &mut al);
                    let bar: Vec<usize> = al.iter().rev().map(|&x| spec.conj(x)).collect();
                    *z = src[sflat * block + flatten(&bar, d)].conj();
                }
            });
        }
        Ok(out)
    }

    /// `U(a, t) Ψ`: phase `exp(i Σ p(θ_k)·a)` with `p·a = p⁰a⁰ − p¹a¹`, and all
    /// rapidities shifted by `2πt`, which must be a whole number of grid steps.
    /// Values shifted in from outside the range are zero.
    pub fn poincare(&self, spec: &ParticleSpectrum, a: [f64; 2], t: f64) -> Result<GridState> {
        let h = self.grid.step();
        let shift = 2.0 * std::f64::consts::PI * t / h;
        let s = shift.round();
        if (shift - s).abs() > 1e-9 {
            return Err(Error::Precondition(format!(
                "boost shift 2πt = {} is not a multiple of the grid step {h}",
                2.0 * std::f64::consts::PI * t
            )));
        }
        let s = s as i64;
        let g = self.grid.points;
        let d = self.d;
        let thetas = self.grid.thetas();
        // phase[i·d + α] = exp(i p_α(θ_i)·a)
        let mut phase = Vec::with_capacity(g * d);
        for &th in &thetas {
            for al in 0..d {
                let p = spec.momentum(al, th)?;
                let x = p[0] * a[0] - p[1] * a[1];
                phase.push(C64::new(x.cos(), x.sin()));
            }
        }
        let mut out = self.clone();
        for n in 0..self.sectors.len() {
            let block = tensor_dim(d, n).unwrap();
            let src = &self.sectors[n];
            out.sectors[n].par_chunks_mut(block).enumerate().for_each(|(flat, dst)| {
                let mut idx = vec![0; n];
                unflatten(flat, g, n, &mut idx);
                let mut sidx = vec![0; n];
                for k in 0..n {
                    let j = idx[k] as i64 - s;
                    if j < 0 || j >= g as i64 {
                        dst.iter_mut().for_each(|z| *z = ZERO);
                        return;
                    }
                    sidx[k] = j as usize;
                }
                let sflat = flatten(&sidx, g);
                let mut al = vec![0; n];
                for (ai, z) in dst.iter_mut().enumerate() {
                    unflatten(ai, d, n, &mut al);
                    let ph: C64 = (0..n).map(|k| phase[idx[k] * d + al[k]]).product();
                    *z = ph * src[sflat * block + ai];
                }
            });
        }
        Ok(out)
    }

    /// `z†(φ)Ψ` by the explicit sum over `S_n^{σ_k}(θ)(φ(θ_k) ⊗ Ψ_{n−1}(…θ̂_k…))`
    /// with `σ_k = τ_{k−1}⋯τ₁`. The top sector of `Ψ` must vanish.
    pub fn create(&self, table: &GridSTable, phi: &[C64]) -> Result<GridState> {
        let g = self.grid.points;
        let d = self.d;
        if phi.len() != g * d {
            return Err(Error::Config("one-particle vector has the wrong length".into()));
        }
        let top = self.n_max();
        if self.sectors[top].iter().any(|z| *z != ZERO) {
            return Err(Error::Cap(format!("creation from the top sector n = {top} would exceed N_max")));
        }
        let mut out = GridState::zero(self.grid, d, top)?;
        for n in 1..=top {
            let block = tensor_dim(d, n).unwrap();
            let sub = tensor_dim(d, n - 1).unwrap();
            let prev = &self.sectors[n - 1];
            let norm = 1.0 / (n as f64).sqrt();
            out.sectors[n].par_chunks_mut(block).enumerate().for_each(|(flat, dst)| {
                let mut idx = vec![0; n];
                unflatten(flat, g, n, &mut idx);
                let mut v = vec![ZERO; block];
                let mut rest = Vec::with_capacity(n);
                for k in 0..n {
                    rest.clear();
                    rest.extend(idx.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, &i)| i));
                    let p = &prev[flatten(&rest, g) * sub..][..sub];
                    let f = &phi[idx[k] * d..][..d];
                    for (a, fa) in f.iter().enumerate() {
                        for (b, pb) in p.iter().enumerate() {
                            v[a * sub + b] = fa * pb;
                        }
                    }
                    // Factors of τ_{k}⋯τ₁ (1-based) applied right to left,
                    // evaluated at the successively permuted rapidities.
                    let word: Vec<usize> = (0..k).rev().collect();
                    let mut th = idx.clone();
                    let mut facs = Vec::with_capacity(word.len());
                    for &w in &word {
                        facs.push((w, th[w], th[w + 1]));
                        th.swap(w, w + 1);
                    }
                    for &(w, i, j) in facs.iter().rev() {
                        apply_two_site(table.get(i, j), d, n, w, &mut v);
                    }
                    dst.iter_mut().zip(&v).for_each(|(o, x)| *o += norm * x);
                }
            });
        }
        Ok(out)
    }

    /// `z(φ)Ψ`: `√(n+1) ∫dθ′ conj φ^β(θ′) Ψ_{n+1}^{β α}(θ′, θ)`.
    pub fn annihilate(&self, phi: &[C64]) -> Result<GridState> {
        let g = self.grid.points;
        let d = self.d;
        if phi.len() != g * d {
            return Err(Error::Config("one-particle vector has the wrong length".into()));
        }
        let h = self.grid.step();
        let top = self.n_max();
        let mut out = GridState::zero(self.grid, d, top)?;
        for n in 0..top {
            let block = tensor_dim(d, n).unwrap();
            let gn = tensor_dim(g, n).unwrap();
            let src = &self.sectors[n + 1];
            let c = ((n + 1) as f64).sqrt() * h;
            out.sectors[n].par_chunks_mut(block).enumerate().for_each(|(flat, dst)| {
                for ip in 0..g {
                    let base = (ip * gn + flat) * d * block;
                    for (b, f) in phi[ip * d..][..d].iter().enumerate() {
                        let fc = f.conj() * c;
                        if fc == ZERO {
                            continue;
                        }
                        for (a, o) in dst.iter_mut().enumerate() {
                            *o += fc * src[base + b * block + a];
                        }
                    }
                }
            });
        }
        Ok(out)
    }

    /// Writes `<stem>.json` (shape, grid, spectrum fingerprint) and
    /// `<stem>.bin` (little-endian `f64` pairs, sector by sector).
    pub fn export(&self, spec: &ParticleSpectrum, stem: &Path) -> Result<()> {
        let header = serde_json::json!({
            "format": "zlab-grid-state",
            "dim_k": self.d,
            "n_max": self.n_max(),
            "grid": self.grid,
            "sector_lengths": self.sectors.iter().map(|s| s.len()).collect::<Vec<_>>(),
            "layout": "per sector: rapidity multi-index major, index multi-index minor; re, im as f64 LE",
            "spectrum": spec.fingerprint(),
        });
        std::fs::write(stem.with_extension("json"), serde_json::to_string_pretty(&header)?)?;
        let mut f = std::io::BufWriter::new(std::fs::File::create(stem.with_extension("bin"))?);
        for z in self.sectors.iter().flatten() {
            f.write_all(&z.re.to_le_bytes())?;
            f.write_all(&z.im.to_le_bytes())?;
        }
        f.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smatrix::ScatteringFn;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn charged() -> SMatrixModel {
        let spec = ParticleSpectrum::new(vec![1.0, 1.0], vec![1, 0], None).unwrap();
        let sb = |b| ScatteringFn::sinh_blaschke(b, 1.0);
        SMatrixModel::diagonal(spec, vec![vec![sb(0.4), sb(0.3)], vec![sb(0.3), sb(0.4)]], None).unwrap()
    }

    fn random_state(rng: &mut ChaCha8Rng, grid: RapidityGrid, d: usize, n_max: usize) -> GridState {
        let mut s = GridState::zero(grid, d, n_max).unwrap();
        for n in 0..=n_max {
            for z in s.sector_mut(n) {
                *z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        s
    }

    #[test]
    fn memory_guard() {
        let g = RapidityGrid::default();
        assert!(matches!(GridState::zero(g, 1, 4), Err(Error::Cap(_))));
        assert_eq!(sector_len(&g, 1, 3).unwrap(), 257usize.pow(3));
        assert!(sector_len(&g, 2, 3).is_ok() && sector_len(&g, 3, 3).is_err());
    }

    #[test]
    fn pct_is_an_involution() {
        let m = charged();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let grid = RapidityGrid::new(-2.0, 2.0, 9).unwrap();
        let s = random_state(&mut rng, grid, 2, 3);
        let j = s.pct(m.spectrum()).unwrap();
        assert_eq!(j.pct(m.spectrum()).unwrap(), s);
        assert_eq!(j.sector(0)[0], s.sector(0)[0].conj());
        // One particle: (Jψ)^α(θ) = conj ψ^{ᾱ}(θ).
        for i in 0..9 {
            assert_eq!(j.sector(1)[i * 2], s.sector(1)[i * 2 + 1].conj());
        }
        let v = GridState::vacuum(grid, 2, 2).unwrap();
        assert_eq!(v.pct(m.spectrum()).unwrap(), v);
    }

    #[test]
    fn poincare_identity_boost_and_translation() {
        let m = charged();
        let spec = m.spectrum();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let grid = RapidityGrid::new(-2.0, 2.0, 17).unwrap();
        let h = grid.step();
        let s = random_state(&mut rng, grid, 2, 2);
        assert_eq!(s.poincare(spec, [0.0, 0.0], 0.0).unwrap(), s);
        // Boost by three grid steps: values move, phases untouched.
        let t = 3.0 * h / (2.0 * std::f64::consts::PI);
        let b = s.poincare(spec, [0.0, 0.0], t).unwrap();
        for i in 0..17 {
            for a in 0..2 {
                let expect = if i >= 3 { s.sector(1)[(i - 3) * 2 + a] } else { ZERO };
                assert_eq!(b.sector(1)[i * 2 + a], expect);
            }
        }
        assert!(s.poincare(spec, [0.0, 0.0], 0.3 * h).is_err());
        // Translation by (0, s): phase e^{−i m s sinh θ}.
        let x = s.poincare(spec, [0.0, 0.7], 0.0).unwrap();
        for i in 0..17 {
            let th = grid.theta(i);
            let ph = C64::new(0.0, -0.7 * th.sinh()).exp();
            assert!((x.sector(1)[i * 2] - ph * s.sector(1)[i * 2]).norm() < 1e-14);
        }
        assert!((x.norm() - s.norm()).abs() < 1e-12);
    }

    #[test]
    fn imaginary_time_convention() {
        // Formally rotating a = (0, s) to a = (i s, 0) turns e^{i p·a} into the
        // damping factor e^{−m s cosh θ}.
        let (mass, s, th) = (1.3, 0.8, 0.45);
        let p = [mass * f64::cosh(th), mass * f64::sinh(th)];
        let a = [C64::new(0.0, s), C64::new(0.0, 0.0)];
        let phase = (C64::new(0.0, 1.0) * (a[0] * p[0] - a[1] * p[1])).exp();
        assert!((phase.re - (-mass * s * th.cosh()).exp()).abs() < 1e-15 && phase.im.abs() < 1e-15);
    }

    #[test]
    fn grid_projection_symmetrises() {
        let m = SMatrixModel::sigma_on(3, 1.0, None).unwrap();
        let grid = RapidityGrid::new(-1.5, 1.5, 7).unwrap();
        let table = GridSTable::new(&m, &grid).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = random_state(&mut rng, grid, 3, 3).project(&table);
        for r in s.symmetry_residuals(&table).iter().flatten() {
            assert!(*r < 1e-12, "{r}");
        }
        let again = s.project(&table);
        assert!(again.sub(&s).unwrap().norm() < 1e-12 * s.norm());
    }

    #[test]
    fn creation_and_annihilation_are_adjoint_on_symmetric_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for m in [charged(), SMatrixModel::sigma_on(3, 1.0, None).unwrap()] {
            let d = m.dim_k();
            let grid = RapidityGrid::new(-1.5, 1.5, 6).unwrap();
            let table = GridSTable::new(&m, &grid).unwrap();
            let mut psi = random_state(&mut rng, grid, d, 3).project(&table);
            psi.sector_mut(3).iter_mut().for_each(|z| *z = ZERO);
            let phi_state = random_state(&mut rng, grid, d, 3).project(&table);
            let f: Vec<C64> =
                (0..grid.points * d).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let l = psi.create(&table, &f).unwrap().inner(&phi_state).unwrap();
            let r = psi.inner(&phi_state.annihilate(&f).unwrap()).unwrap();
            assert!((l - r).norm() < 1e-11 * l.norm().max(1.0), "{}: {l} vs {r}", m.label());
            // Created states are S-symmetric.
            let c = psi.create(&table, &f).unwrap();
            for x in c.symmetry_residuals(&table).iter().flatten() {
                assert!(*x < 1e-11 * c.norm());
            }
        }
    }

    #[test]
    fn created_pair_matches_explicit_formula() {
        let m = charged();
        let grid = RapidityGrid::new(-1.0, 1.0, 5).unwrap();
        let table = GridSTable::new(&m, &grid).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let f: Vec<C64> = (0..10).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let p: Vec<C64> = (0..10).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let one = GridState::one_particle(grid, 2, 2, &p).unwrap();
        let two = one.create(&table, &f).unwrap();
        // (1/√2)[φ(θ₁)⊗ψ(θ₂) + S(θ₂−θ₁)(φ(θ₂)⊗ψ(θ₁))]
        for i in 0..5 {
            for j in 0..5 {
                let mut v = vec![ZERO; 4];
                for a in 0..2 {
                    for b in 0..2 {
                        v[a * 2 + b] = f[j * 2 + a] * p[i * 2 + b];
                    }
                }
                let sv = m.eval_real(grid.theta(j) - grid.theta(i)).unwrap() * nalgebra::DVector::from_vec(v);
                for a in 0..2 {
                    for b in 0..2 {
                        let e = (f[i * 2 + a] * p[j * 2 + b] + sv[a * 2 + b]) / 2f64.sqrt();
                        assert!((two.sector(2)[(i * 5 + j) * 4 + a * 2 + b] - e).norm() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn export_writes_header_and_payload() {
        let dir = tempfile::tempdir().unwrap();
        let grid = RapidityGrid::new(-1.0, 1.0, 3).unwrap();
        let s = GridState::vacuum(grid, 1, 2).unwrap();
        let spec = ParticleSpectrum::neutral(1, 1.0).unwrap();
        s.export(&spec, &dir.path().join("state")).unwrap();
        let bin = std::fs::read(dir.path().join("state.bin")).unwrap();
        assert_eq!(bin.len(), (1 + 3 + 9) * 16);
        let header: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("state.json")).unwrap()).unwrap();
        assert_eq!(header["sector_lengths"], serde_json::json!([1, 3, 9]));
    }
}
