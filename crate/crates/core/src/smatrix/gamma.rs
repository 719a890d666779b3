//! Complex Gamma function by the Lanczos approximation (g = 7, 9 terms)
//! with the reflection formula on the left half plane.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::C64;

const G: f64 = 7.0;
const COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

fn is_pole(z: C64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// `ln Γ(z)` on the principal sheet for `Re z >= 0.5`, by Lanczos.
fn ln_gamma_right(z: C64) -> C64 {
    let z = z - 1.0;
    let mut x = C64::new(COEFFS[0], 0.0);
    for (i, &c) in COEFFS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + G + 0.5;
    LN_SQRT_2PI + (z + 0.5) * t.ln() - t + x.ln()
}

/// `ln sin(πz)` up to a multiple of `2πi`, without overflow for large `|Im z|`.
fn ln_sin_pi(z: C64) -> C64 {
    let w = z * PI;
    if w.im.abs() < 20.0 {
        return w.sin().ln();
    }
    // sin w = (e^{iw} - e^{-iw}) / 2i; keep the dominant exponential.
    let i = C64::new(0.0, 1.0);
    if w.im > 0.0 {
        -i * w - (2.0 * i).ln() + (1.0 - (2.0 * i * w).exp()).ln()
    } else {
        i * w - (-2.0 * i).ln() + (1.0 - (-2.0 * i * w).exp()).ln()
    }
}

/// `ln Γ(z)` modulo `2πi`. Poles are reported as errors.
pub fn ln_gamma(z: C64) -> Result<C64> {
    if is_pole(z) {
        return Err(Error::GammaPole(z.re));
    }
    if z.re >= 0.5 {
        Ok(ln_gamma_right(z))
    } else {
        Ok(C64::new(PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma_right(1.0 - z))
    }
}

/// `Γ(z)`. Poles are reported as errors.
pub fn gamma(z: C64) -> Result<C64> {
    if is_pole(z) {
        return Err(Error::GammaPole(z.re));
    }
    if z.re >= 0.5 {
        let zm = z - 1.0;
        let mut x = C64::new(COEFFS[0], 0.0);
        for (i, &c) in COEFFS.iter().enumerate().skip(1) {
            x += c / (zm + i as f64);
        }
        let t = zm + G + 0.5;
        if z.norm() < 100.0 {
            return Ok((2.0 * PI).sqrt() * t.powc(zm + 0.5) * (-t).exp() * x);
        }
        return Ok(ln_gamma_right(z).exp());
    }
    let s = (z * PI).sin();
    Ok(PI / (s * gamma(1.0 - z)?))
}

/// `1/Γ(z)`, entire; exactly zero at the poles of `Γ`.
pub fn rgamma(z: C64) -> C64 {
    if is_pole(z) {
        return C64::new(0.0, 0.0);
    }
    (-ln_gamma(z).expect("non-pole")).exp()
}
