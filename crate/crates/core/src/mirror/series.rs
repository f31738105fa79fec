//! Frobenius basis `ω₀, ω₁, ω₂` of the Picard–Fuchs equation
//! `θ³ + 3zθ(3θ+1)(3θ+2)` around the large volume point `z = 0`.
//!
//! With `c_n = (3n−1)!/n!³` the basis is
//! `2πi·ω₁ = ln z + 3Σ c_n(−z)ⁿ` and
//! `(2πi)²·ω₂ = (ln z)² + 6 ln z Σ c_n(−z)ⁿ + Σ l_n zⁿ`.
//! The `l_n` are computed exactly through `u_n = n!³·l_n`, which satisfies
//! the integer recursion
//! `u_n = −[(3n−1)(3n−2)(3n−3)u_{n−1} + 18(−1)ⁿ(3n−1)!/n − 18(−1)ⁿ(3n−4)!(27n²−36n+11)]`
//! for `n ≥ 2`, with `u_1 = l_1 = −18` fixed by the `z¹` coefficient of the
//! equation. Floating point tables store `c_n/27ⁿ` and `l_n/27ⁿ`, each
//! rounded once from the exact value.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::error::{invalid, Result};

/// Coefficients of the z-chart solutions up to order `N`.
#[derive(Clone, Debug)]
pub struct SeriesTable {
    order: usize,
    c: Vec<f64>,
    l: Vec<f64>,
}

/// Exact coefficients `c_n`, `l_n` for `1 ≤ n ≤ N` (index 0 is zero).
#[derive(Clone, Debug)]
pub struct ExactSeries {
    pub c: Vec<BigRational>,
    pub l: Vec<BigRational>,
}

/// Iterates `(n, (3n−1)!, u_n, n!³)` for `n ≥ 1`.
struct Recursion {
    n: u64,
    fact3n1: BigInt,
    u: BigInt,
    cube: BigInt,
}

impl Recursion {
    fn new() -> Self {
        Recursion {
            n: 0,
            fact3n1: BigInt::one(),
            u: BigInt::from(0),
            cube: BigInt::one(),
        }
    }

    fn advance(&mut self) {
        self.n += 1;
        let n = self.n;
        if n == 1 {
            self.fact3n1 = BigInt::from(2);
            self.u = BigInt::from(-18);
            self.cube = BigInt::one();
            return;
        }
        let prev_fact = std::mem::take(&mut self.fact3n1);
        let fact = &prev_fact * ((3 * n - 3) * (3 * n - 2) * (3 * n - 1));
        let sign: i64 = if n.is_multiple_of(2) { 1 } else { -1 };
        let t1 = &self.u * ((3 * n - 1) * (3 * n - 2) * (3 * n - 3));
        let t2 = (&fact / n) * (18 * sign);
        let t3 = &prev_fact * (18 * sign * (27 * n as i64 * n as i64 - 36 * n as i64 + 11));
        self.u = -(t1 + t2 - t3);
        self.fact3n1 = fact;
        self.cube *= n * n * n;
    }
}

fn ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    BigRational::new_raw(num.clone(), den.clone())
        .to_f64()
        .unwrap_or(f64::NAN)
}

/// Tables of `c_n/27ⁿ` and `l_n/27ⁿ` for `1 ≤ n ≤ order`.
pub fn build_series(order: usize) -> Result<SeriesTable> {
    if order < 2 {
        return invalid("series order must be at least 2");
    }
    let mut rec = Recursion::new();
    let mut scale = BigInt::one();
    let mut c = vec![0.0; order + 1];
    let mut l = vec![0.0; order + 1];
    for n in 1..=order {
        rec.advance();
        scale *= 27;
        let den = &rec.cube * &scale;
        c[n] = ratio_to_f64(&rec.fact3n1, &den);
        l[n] = ratio_to_f64(&rec.u, &den);
    }
    Ok(SeriesTable { order, c, l })
}

/// Exact rational coefficients `c_n` and `l_n`.
pub fn build_series_exact(order: usize) -> ExactSeries {
    let mut rec = Recursion::new();
    let zero = BigRational::from_integer(0.into());
    let mut c = vec![zero.clone(); order + 1];
    let mut l = vec![zero; order + 1];
    for n in 1..=order {
        rec.advance();
        c[n] = BigRational::new(rec.fact3n1.clone(), rec.cube.clone());
        l[n] = BigRational::new(rec.u.clone(), rec.cube.clone());
    }
    ExactSeries { c, l }
}

/// `(Π, θΠ, θ²Π, θ³Π)` at a point.
pub type Jet = [Complex64; 4];

/// θ-jet of `Σ_j L^j A_j` from the θ-jets of the `A_j`, using `θL = 1`.
pub(crate) fn log_jet(l: Complex64, parts: &[Jet]) -> Jet {
    const BINOM: [[f64; 4]; 4] = [
        [1.0, 0.0, 0.0, 0.0],
        [1.0, 1.0, 0.0, 0.0],
        [1.0, 2.0, 1.0, 0.0],
        [1.0, 3.0, 3.0, 1.0],
    ];
    let mut out = [Complex64::new(0.0, 0.0); 4];
    for (j, a) in parts.iter().enumerate() {
        for (k, slot) in out.iter_mut().enumerate() {
            let mut falling = 1.0;
            for i in 0..=k.min(j) {
                let lp = l.powu((j - i) as u32);
                *slot += a[k - i] * lp * (BINOM[k][i] * falling);
                falling *= (j - i) as f64;
            }
        }
    }
    out
}

/// `ln z + 2πi·sheet`, with the negative real axis on the `arg = π` side.
pub fn log_branch(z: Complex64, sheet: i32) -> Complex64 {
    let arg = if z.im == 0.0 && z.re < 0.0 {
        PI
    } else {
        z.im.atan2(z.re)
    };
    Complex64::new(z.norm().ln(), arg + 2.0 * PI * sheet as f64)
}

impl SeriesTable {
    pub fn order(&self) -> usize {
        self.order
    }

    /// `c_n / 27ⁿ`.
    pub fn c_scaled(&self, n: usize) -> f64 {
        self.c[n]
    }

    /// `l_n / 27ⁿ`.
    pub fn l_scaled(&self, n: usize) -> f64 {
        self.l[n]
    }

    /// `Σ_{n≤N} c_n / 27ⁿ`.
    pub fn sum_c(&self) -> f64 {
        self.c[1..].iter().rev().sum()
    }

    /// `Σ_{n≤N} |l_n| / 27ⁿ`.
    pub fn sum_abs_l(&self) -> f64 {
        self.l[1..].iter().rev().map(|x| x.abs()).sum()
    }

    /// θ-jets of `g = Σ c_n(−z)ⁿ` and `h = Σ l_n zⁿ`.
    fn power_jets(&self, z: Complex64) -> (Jet, Jet) {
        let w = -27.0 * z;
        let mut g = [Complex64::new(0.0, 0.0); 4];
        let mut h = [Complex64::new(0.0, 0.0); 4];
        let mut pw = Complex64::new(1.0, 0.0);
        for n in 1..=self.order {
            pw *= w;
            let nf = n as f64;
            let tg = pw * self.c[n];
            let th = if n % 2 == 0 { pw * self.l[n] } else { -pw * self.l[n] };
            let mut mul = 1.0;
            for k in 0..4 {
                g[k] += tg * mul;
                h[k] += th * mul;
                mul *= nf;
            }
        }
        (g, h)
    }

    /// `(2πi·ω₁, (2πi)²·ω₂)` θ-jets at `z` on the given log sheet.
    fn scaled_jets(&self, z: Complex64, sheet: i32) -> (Jet, Jet) {
        let l = log_branch(z, sheet);
        let (g, h) = self.power_jets(z);
        let one: Jet = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ];
        let g3 = g.map(|x| x * 3.0);
        let g6 = g.map(|x| x * 6.0);
        (log_jet(l, &[g3, one]), log_jet(l, &[h, g6, one]))
    }

    /// θ-jet of `ω_k`, without domain checks.
    pub fn omega_jet(&self, k: usize, z: Complex64, sheet: i32) -> Jet {
        let tau = Complex64::new(0.0, 2.0 * PI);
        match k {
            0 => [
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
            1 => self.scaled_jets(z, sheet).0.map(|x| x / tau),
            _ => self.scaled_jets(z, sheet).1.map(|x| x / (tau * tau)),
        }
    }

    /// θ-jets of `(ω₁, ω₂)`.
    pub fn omega12_jets(&self, z: Complex64, sheet: i32) -> (Jet, Jet) {
        let tau = Complex64::new(0.0, 2.0 * PI);
        let (w1, w2) = self.scaled_jets(z, sheet);
        (w1.map(|x| x / tau), w2.map(|x| x / (tau * tau)))
    }

    /// θ-jets of `a = ω₁ − 1/2` and `b = −ω₂/2 + ω₁/2 − 1/4`.
    pub fn ab_jets(&self, z: Complex64, sheet: i32) -> (Jet, Jet) {
        let (w1, w2) = self.omega12_jets(z, sheet);
        let mut a = w1;
        a[0] -= 0.5;
        let mut b = [Complex64::new(0.0, 0.0); 4];
        for k in 0..4 {
            b[k] = -w2[k] / 2.0 + w1[k] / 2.0;
        }
        b[0] -= 0.25;
        (a, b)
    }
}
