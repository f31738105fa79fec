//! Local Frobenius solutions at the conifold point `z = −1/27`.
//!
//! With `w = z + 1/27`, the derivative `u = dΠ/dz` satisfies
//! `w(1−27w)²u'' + (1−27w)(1−108w)u' + (1620w − 33)u = 0`,
//! whose exponents at `w = 0` are `0, 0`. On monomials the operator acts as
//! `wᵐ ↦ m²w^{m−1} − (54m²+81m+33)wᵐ + 81(3m+4)(3m+5)w^{m+1}`.
//! A solution known at a nearby point is matched against the analytic
//! solution `u₁ = Σ a_k w^k` and the logarithmic solution
//! `u₂ = u₁ log w + Σ b_k w^k`, then integrated back to `w = 0`.

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::mirror::ode::{State, CONIFOLD};

fn f(m: f64) -> f64 {
    m * m
}
fn g(m: f64) -> f64 {
    -(54.0 * m * m + 81.0 * m + 33.0)
}
fn h(m: f64) -> f64 {
    81.0 * (3.0 * m + 4.0) * (3.0 * m + 5.0)
}
fn df(m: f64) -> f64 {
    2.0 * m
}
fn dg(m: f64) -> f64 {
    -(108.0 * m + 81.0)
}
fn dh(m: f64) -> f64 {
    81.0 * (18.0 * m + 27.0)
}

/// Frobenius coefficients scaled by `27^k`, i.e. in the variable `W = 27w`.
#[derive(Clone, Debug)]
pub struct ConifoldSeries {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

pub fn conifold_series(order: usize) -> ConifoldSeries {
    let mut a = vec![0.0; order + 1];
    let mut b = vec![0.0; order + 1];
    a[0] = 1.0;
    for k in 1..=order {
        let kf = k as f64;
        let (a1, b1) = (a[k - 1] / 27.0, b[k - 1] / 27.0);
        let (a2, b2) = if k >= 2 {
            (a[k - 2] / 729.0, b[k - 2] / 729.0)
        } else {
            (0.0, 0.0)
        };
        let m1 = kf - 1.0;
        let m2 = kf - 2.0;
        a[k] = -(g(m1) * a1 + h(m2) * a2) / f(kf);
        b[k] = -(df(kf) * a[k] + dg(m1) * a1 + g(m1) * b1 + dh(m2) * a2 + h(m2) * b2) / f(kf);
    }
    ConifoldSeries { a, b }
}

struct Local {
    u1: Complex64,
    du1: Complex64,
    u2: Complex64,
    du2: Complex64,
    int1: Complex64,
    int2: Complex64,
}

impl ConifoldSeries {
    fn local(&self, w: Complex64) -> Local {
        let big_w = w * 27.0;
        let log_w = w.ln();
        let zero = Complex64::new(0.0, 0.0);
        let (mut u1, mut du1, mut pb, mut dpb, mut int1, mut ia_log, mut ia_sq, mut ib) =
            (zero, zero, zero, zero, zero, zero, zero, zero);
        let mut pw = Complex64::new(1.0, 0.0);
        for k in 0..self.a.len() {
            let kf = k as f64;
            let (ak, bk) = (self.a[k], self.b[k]);
            let next = pw * big_w;
            u1 += pw * ak;
            pb += pw * bk;
            if k > 0 {
                du1 += pw * (ak * kf) / w;
                dpb += pw * (bk * kf) / w;
            }
            let prim = next / (27.0 * (kf + 1.0));
            int1 += prim * ak;
            ia_log += prim * ak;
            ia_sq += prim * (ak / (kf + 1.0));
            ib += prim * bk;
            pw = next;
        }
        let u2 = u1 * log_w + pb;
        let du2 = du1 * log_w + u1 / w + dpb;
        let int2 = ia_log * log_w - ia_sq + ib;
        Local {
            u1,
            du1,
            u2,
            du2,
            int1,
            int2,
        }
    }
}

/// `Π(−1/27)` from `(Π, θΠ, θ²Π)` at `z` near the conifold.
pub fn conifold_value(z: Complex64, y: State, series: &ConifoldSeries) -> Result<Complex64> {
    let w = z - CONIFOLD;
    if !(w.norm() < 0.5 / 27.0) || w.norm() == 0.0 {
        return invalid("matching point must satisfy 0 < |z + 1/27| < 1/54");
    }
    let u = y[1] / z;
    let du = (y[2] - y[1]) / (z * z);
    let loc = series.local(w);
    let det = loc.u1 * loc.du2 - loc.u2 * loc.du1;
    let alpha = (u * loc.du2 - loc.u2 * du) / det;
    let beta = (loc.u1 * du - u * loc.du1) / det;
    Ok(y[0] - alpha * loc.int1 - beta * loc.int2)
}
