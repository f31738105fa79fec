//! Transport of solutions along polylines in the z-plane.
//!
//! The equation is written for `Y = (Π, θΠ, θ²Π)` as
//! `dY/dz = (θΠ/z, θ²Π/z, −(27θ²Π + 6θΠ)/(1 + 27z))`
//! and integrated segment by segment with an adaptive Dormand–Prince 5(4)
//! scheme in the real segment parameter.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CONIFOLD: f64 = -1.0 / 27.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OdeOptions {
    /// Local error tolerance (relative and absolute).
    pub tol: f64,
    /// Minimal distance of the path from `0` and `−1/27`.
    pub clearance: f64,
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            tol: 1e-10,
            clearance: 1e-3,
            min_step: 1e-12,
            max_steps: 1_000_000,
        }
    }
}

pub type State = [Complex64; 3];

fn rhs(z: Complex64, y: &State) -> State {
    [y[1] / z, y[2] / z, -(y[2] * 27.0 + y[1] * 6.0) / (z * 27.0 + 1.0)]
}

fn segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    let s = if len2 == 0.0 {
        0.0
    } else {
        (((p - a) * d.conj()).re / len2).clamp(0.0, 1.0)
    };
    (a + d * s - p).norm()
}

fn axpy(y: &State, h: f64, ks: &[(&State, f64)]) -> State {
    let mut out = *y;
    for (k, c) in ks {
        for i in 0..3 {
            out[i] += k[i] * (h * c);
        }
    }
    out
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn integrate_segment(
    z0: Complex64,
    z1: Complex64,
    mut y: State,
    opts: &OdeOptions,
    steps: &mut usize,
) -> Result<State> {
    let dz = z1 - z0;
    let f = |s: f64, y: &State| rhs(z0 + dz * s, y).map(|v| v * dz);
    let mut s = 0.0;
    let mut h: f64 = 0.05;
    let mut k1 = f(0.0, &y);
    while s < 1.0 {
        if *steps >= opts.max_steps {
            return Err(Error::Integration("step budget exhausted".into()));
        }
        h = h.min(1.0 - s);
        let k2 = f(s + C2 * h, &axpy(&y, h, &[(&k1, A21)]));
        let k3 = f(s + C3 * h, &axpy(&y, h, &[(&k1, A31), (&k2, A32)]));
        let k4 = f(s + C4 * h, &axpy(&y, h, &[(&k1, A41), (&k2, A42), (&k3, A43)]));
        let k5 = f(
            s + C5 * h,
            &axpy(&y, h, &[(&k1, A51), (&k2, A52), (&k3, A53), (&k4, A54)]),
        );
        let k6 = f(
            s + h,
            &axpy(&y, h, &[(&k1, A61), (&k2, A62), (&k3, A63), (&k4, A64), (&k5, A65)]),
        );
        let y_new = axpy(&y, h, &[(&k1, B1), (&k3, B3), (&k4, B4), (&k5, B5), (&k6, B6)]);
        let k7 = f(s + h, &y_new);
        let mut err: f64 = 0.0;
        for i in 0..3 {
            let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
            let scale = opts.tol * (1.0 + y[i].norm().max(y_new[i].norm()));
            err = err.max(e.norm() / scale);
        }
        *steps += 1;
        if err <= 1.0 {
            s += h;
            y = y_new;
            k1 = k7;
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
        if h < opts.min_step && s < 1.0 {
            return Err(Error::Integration("step size underflow".into()));
        }
    }
    Ok(y)
}

/// Transports `(Π, θΠ, θ²Π)` along the polyline `path`.
pub fn ode_transport(path: &[Complex64], init: State, opts: &OdeOptions) -> Result<State> {
    if path.len() < 2 {
        return Ok(init);
    }
    for w in path.windows(2) {
        for sing in [Complex64::new(0.0, 0.0), Complex64::new(CONIFOLD, 0.0)] {
            if segment_distance(sing, w[0], w[1]) < opts.clearance {
                return Err(Error::Integration(format!(
                    "segment {} → {} passes within {} of the singular point {}",
                    w[0], w[1], opts.clearance, sing.re
                )));
            }
        }
    }
    let mut y = init;
    let mut steps = 0;
    for w in path.windows(2) {
        y = integrate_segment(w[0], w[1], y, opts, &mut steps)?;
    }
    Ok(y)
}

/// Closed counterclockwise polygon with `segments` sides around `center`
/// through `start`.
pub fn circle_path(center: Complex64, start: Complex64, segments: usize) -> Vec<Complex64> {
    let rel = start - center;
    (0..=segments)
        .map(|k| {
            if k == segments {
                start
            } else {
                center + rel * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / segments as f64)
            }
        })
        .collect()
}
