//! Coefficient functions of the O(N) nonlinear sigma-model S-matrix.
//!
//! With `ν = 1/(N−2)` and `w = −iζ/2π` the three coefficients are
//! `σ₂ = w·T(w)`, `σ₃ = −ν·T(w)` and `σ₁ = −ν·w·T(w)/(½−w)`, where
//! `T(w) = Γ(ν+w)Γ(½+w)Γ(½+ν−w)Γ(1−w) / [Γ(½+ν+w)Γ(1+w)Γ(1+ν−w)Γ(½−w)]`.
//! The `1/(½−w)` in `σ₁` is absorbed into `Γ(3/2−w)`, so nothing blows up
//! at `ζ = iπ`.

use std::f64::consts::PI;

use crate::error::Result;
use crate::smatrix::gamma::ln_gamma;
use crate::C64;

fn is_gamma_pole(z: C64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// `Π Γ(num) / Π Γ(den)` through log-Γ sums. A pole in `den` gives zero; a
/// pole in `num` is an error.
pub fn gamma_ratio(num: &[C64], den: &[C64]) -> Result<C64> {
    let mut acc = C64::new(0.0, 0.0);
    for &z in num {
        acc += ln_gamma(z)?;
    }
    for &z in den {
        if is_gamma_pole(z) {
            return Ok(C64::new(0.0, 0.0));
        }
        acc -= ln_gamma(z)?;
    }
    Ok(acc.exp())
}

fn w_of(zeta: C64) -> C64 {
    C64::new(0.0, -1.0) * zeta / (2.0 * PI)
}

/// `T(w)` from the module docs.
pub fn t_factor(n: usize, zeta: C64) -> Result<C64> {
    let nu = 1.0 / (n as f64 - 2.0);
    let w = w_of(zeta);
    gamma_ratio(
        &[nu + w, 0.5 + w, 0.5 + nu - w, 1.0 - w],
        &[0.5 + nu + w, 1.0 + w, 1.0 + nu - w, 0.5 - w],
    )
}

/// `[σ₁(ζ), σ₂(ζ), σ₃(ζ)]`.
pub fn sigma_coefficients(n: usize, zeta: C64) -> Result<[C64; 3]> {
    let nu = 1.0 / (n as f64 - 2.0);
    let w = w_of(zeta);
    let t = t_factor(n, zeta)?;
    let s1 = -nu
        * w
        * gamma_ratio(
            &[nu + w, 0.5 + w, 0.5 + nu - w, 1.0 - w],
            &[0.5 + nu + w, 1.0 + w, 1.0 + nu - w, 1.5 - w],
        )?;
    Ok([s1, w * t, -nu * t])
}

/// Nearest singularity distance below the real axis; the physical strip is
/// analytic for `κ` strictly below this.
pub fn pole_margin(n: usize) -> f64 {
    let nu = 1.0 / (n as f64 - 2.0);
    (2.0 * PI * nu).min(PI)
}

/// Declared default `κ = π/(2(N−2))`, clipped at `0.45π`.
pub fn default_kappa(n: usize) -> f64 {
    (PI / (2.0 * (n as f64 - 2.0))).min(0.45 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn n3_is_rational() {
        // For N = 3 the Γ-quotient collapses to (½−w)/((½+w)(1−w)).
        for &(re, im) in &[(0.3, 0.0), (-1.7, 0.4), (2.2, 2.5), (0.0, 1.0)] {
            let z = c(re, im);
            let w = w_of(z);
            let expect = (0.5 - w) / ((0.5 + w) * (1.0 - w));
            let t = t_factor(3, z).unwrap();
            assert!((t - expect).norm() < 1e-12 * expect.norm().max(1.0), "z = {z}");
        }
    }

    #[test]
    fn fermionic_at_zero() {
        for n in 3..8 {
            let [s1, s2, s3] = sigma_coefficients(n, c(0.0, 0.0)).unwrap();
            assert!(s1.norm() < 1e-14 && s2.norm() < 1e-14);
            assert!((s3 + 1.0).norm() < 1e-12, "N = {n}: {s3}");
        }
    }

    #[test]
    fn finite_at_i_pi() {
        for n in 3..7 {
            let s = sigma_coefficients(n, c(0.0, PI)).unwrap();
            assert!(s.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
            assert_eq!(s[2], c(0.0, 0.0));
        }
    }

    #[test]
    fn default_kappa_inside_analytic_strip() {
        for n in 3..12 {
            assert!(default_kappa(n) < pole_margin(n));
        }
        assert!((default_kappa(3) - 0.45 * PI).abs() < 1e-15);
        assert!((default_kappa(4) - PI / 4.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn sigma3_is_crossed_sigma1(theta in -6.0f64..6.0, n in 3usize..7) {
            let s3 = sigma_coefficients(n, c(theta, 0.0)).unwrap()[2];
            let s1x = sigma_coefficients(n, c(-theta, PI)).unwrap()[0];
            prop_assert!((s3 - s1x).norm() < 1e-10);
        }

        #[test]
        fn sigma1_matches_closed_relation(theta in 0.1f64..6.0, n in 3usize..7) {
            // σ₁(θ) = −(2πi/(N−2))·σ₂(θ)/(iπ−θ), checked off θ = iπ.
            let [s1, s2, _] = sigma_coefficients(n, c(theta, 0.0)).unwrap();
            let rhs = c(0.0, -2.0 * PI / (n as f64 - 2.0)) * s2 / (c(0.0, PI) - theta);
            prop_assert!((s1 - rhs).norm() < 1e-11);
        }
    }
}
