//! Scalar scattering functions used as coefficients of diagonal S-matrices.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// JSON grammar: `{"type":"const","value":-1}` or
/// `{"type":"sinh_blaschke","B":0.4,"sign":-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ScatteringFn {
    Const { value: f64 },
    SinhBlaschke {
        #[serde(rename = "B")]
        b: f64,
        #[serde(default = "plus_one")]
        sign: f64,
    },
}

fn plus_one() -> f64 {
    1.0
}

impl ScatteringFn {
    pub fn constant(value: f64) -> Self {
        ScatteringFn::Const { value }
    }

    /// `sign · (sinh ζ − i sin πB) / (sinh ζ + i sin πB)`.
    pub fn sinh_blaschke(b: f64, sign: f64) -> Self {
        ScatteringFn::SinhBlaschke { b, sign }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ScatteringFn::Const { value } => {
                if value != 1.0 && value != -1.0 {
                    return Err(Error::Model(format!("constant coefficient must be ±1, got {value}")));
                }
            }
            ScatteringFn::SinhBlaschke { b, sign } => {
                if !(b > 0.0 && b < 1.0) {
                    return Err(Error::Model(format!("sinh_blaschke needs 0 < B < 1, got {b}")));
                }
                if sign != 1.0 && sign != -1.0 {
                    return Err(Error::Model(format!("sinh_blaschke sign must be ±1, got {sign}")));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, z: C64) -> C64 {
        match *self {
            ScatteringFn::Const { value } => C64::new(value, 0.0),
            ScatteringFn::SinhBlaschke { b, sign } => {
                let s = C64::new(0.0, (PI * b).sin());
                let sh = z.sinh();
                sign * (sh - s) / (sh + s)
            }
        }
    }

    /// Distance from the real line to the nearest pole below it, which by
    /// crossing symmetry equals the distance above `Im = π`.
    pub fn pole_margin(&self) -> f64 {
        match *self {
            ScatteringFn::Const { .. } => f64::INFINITY,
            ScatteringFn::SinhBlaschke { b, .. } => PI * b.min(1.0 - b),
        }
    }

    /// Strip half-width a model declares by default for this coefficient.
    pub fn default_kappa(&self) -> f64 {
        match self {
            ScatteringFn::Const { .. } => 0.45 * PI,
            ScatteringFn::SinhBlaschke { .. } => (0.9 * self.pole_margin()).min(0.45 * PI),
        }
    }
}
