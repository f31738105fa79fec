//! Solutions around the orbifold point `ψ = 0`.
//!
//! `2πi·ϖ₁(ψ) = Σ_{3∤n} Γ(n/3)/(n!·Γ(1−n/3)²)·(3ψ)ⁿ` and `ϖ₂(ψ) = ϖ₁(e^{2πi/3}ψ)`.
//! By the reflection formula the coefficient of `ψⁿ` is
//! `(3/4π²)·3ⁿ·Γ(n/3)³/n!`, so consecutive coefficients in a residue class
//! mod 3 have the rational ratio `n³/((n+1)(n+2)(n+3))`. Only `Γ(1/3)` and
//! `Γ(2/3)` are needed.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;

use crate::error::{invalid, Result};
use crate::mirror::series::Jet;

pub const GAMMA_ONE_THIRD: f64 = 2.678_938_534_707_747_6;
pub const GAMMA_TWO_THIRDS: f64 = 1.354_117_939_426_400_4;

/// Coefficients of `2πi·ϖ₁` in powers of ψ.
#[derive(Clone, Debug)]
pub struct PsiTable {
    order: usize,
    coef: Vec<f64>,
}

/// Rational factors `R_n` with coefficient `= R_n · (coefficient of ψ^{n mod 3})`.
pub fn psi_ratios_exact(order: usize) -> Vec<Option<BigRational>> {
    let mut out: Vec<Option<BigRational>> = vec![None; order + 1];
    for n in 1..=order {
        if n % 3 == 0 {
            continue;
        }
        out[n] = Some(if n < 3 {
            BigRational::from_integer(1.into())
        } else {
            let m = (n - 3) as i64;
            let prev = out[n - 3].clone().expect("same residue class");
            prev * BigRational::new(BigInt::from(m * m * m), BigInt::from((m + 1) * (m + 2) * (m + 3)))
        });
    }
    out
}

pub fn build_psi(order: usize) -> Result<PsiTable> {
    if order < 2 {
        return invalid("ψ-series order must be at least 2");
    }
    let mut coef = vec![0.0; order + 1];
    coef[1] = 3.0 * GAMMA_ONE_THIRD / (GAMMA_TWO_THIRDS * GAMMA_TWO_THIRDS);
    coef[2] = 9.0 * GAMMA_TWO_THIRDS / (2.0 * GAMMA_ONE_THIRD * GAMMA_ONE_THIRD);
    for n in 4..=order {
        if n % 3 == 0 {
            continue;
        }
        let m = (n - 3) as f64;
        coef[n] = coef[n - 3] * (m * m * m) / ((m + 1.0) * (m + 2.0) * (m + 3.0));
    }
    Ok(PsiTable { order, coef })
}

impl PsiTable {
    pub fn order(&self) -> usize {
        self.order
    }

    /// Coefficient of `ψⁿ` in `2πi·ϖ₁`.
    pub fn coefficient(&self, n: usize) -> f64 {
        self.coef[n]
    }

    /// θ_ψ-jet of `ϖ₁` at ψ.
    pub fn varpi1_jet(&self, psi: Complex64) -> Jet {
        let mut out = [Complex64::new(0.0, 0.0); 4];
        let mut pw = Complex64::new(1.0, 0.0);
        for n in 1..=self.order {
            pw *= psi;
            let cf = self.coef[n];
            if cf == 0.0 {
                continue;
            }
            let nf = n as f64;
            let t = pw * cf;
            out[0] += t;
            out[1] += t * nf;
            out[2] += t * nf * nf;
            out[3] += t * nf * nf * nf;
        }
        let tau = Complex64::new(0.0, 2.0 * PI);
        out.map(|x| x / tau)
    }

    /// θ_ψ-jet of `ϖ_j` for `j ∈ {1, 2}`.
    pub fn varpi_jet(&self, j: usize, psi: Complex64) -> Jet {
        if j == 2 {
            self.varpi1_jet(psi * Complex64::from_polar(1.0, 2.0 * PI / 3.0))
        } else {
            self.varpi1_jet(psi)
        }
    }

    pub fn varpi(&self, j: usize, psi: Complex64) -> Complex64 {
        self.varpi_jet(j, psi)[0]
    }

    /// θ_ψ-jets of `a = ϖ₁ − 1/2` and `b = (ϖ₁ − ϖ₂ − 1)/3`.
    pub fn ab_jets(&self, psi: Complex64) -> (Jet, Jet) {
        let v1 = self.varpi_jet(1, psi);
        let v2 = self.varpi_jet(2, psi);
        let mut a = v1;
        a[0] -= 0.5;
        let mut b = [Complex64::new(0.0, 0.0); 4];
        for k in 0..4 {
            b[k] = (v1[k] - v2[k]) / 3.0;
        }
        b[0] -= 1.0 / 3.0;
        (a, b)
    }
}

/// Converts a θ_ψ-jet into a θ_z-jet using `θ_z = −θ_ψ/3`.
pub fn psi_jet_to_z(j: Jet) -> Jet {
    let mut f = 1.0;
    let mut out = j;
    for x in out.iter_mut() {
        *x *= f;
        f *= -1.0 / 3.0;
    }
    out
}
