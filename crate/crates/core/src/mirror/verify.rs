//! Mirror-side verification: the random chamber sweep, the two series
//! constants, the conifold value of `b`, closed-loop monodromies and the
//! gluing of the two charts.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chamber::{ChargeParams, GeometricChamber, DEFAULT_TOL};
use crate::error::Result;
use crate::mirror::conifold::{conifold_series, conifold_value};
use crate::mirror::ode::{circle_path, ode_transport, OdeOptions, State, CONIFOLD};
use crate::mirror::series::{Jet, SeriesTable};
use crate::mirror::{psi, psi_from_z, Chart, Mirror, MirrorPoint};

/// Step-3 threshold `Δ_{−1/2} = 3/8`.
pub const STEP3_BOUND: f64 = 3.0 / 8.0;

/// Outcome for a single sampled point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleCheck {
    pub chart: Chart,
    pub coord: Complex64,
    pub params: ChargeParams,
    pub big_b: f64,
    pub upper_half: bool,
    pub im_a: bool,
    pub b_range: bool,
    pub step3: bool,
    pub step3_margin: f64,
    pub chamber: bool,
    pub chamber_margin: f64,
}

impl SampleCheck {
    pub fn passed(&self) -> bool {
        self.im_a && self.b_range && self.step3 && self.chamber
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub samples: usize,
    pub seed: u64,
    pub depth: u32,
    pub im_a_pass: usize,
    pub b_range_pass: usize,
    pub step3_pass_upper: usize,
    pub step3_total_upper: usize,
    pub step3_pass_lower: usize,
    pub step3_total_lower: usize,
    pub chamber_pass: usize,
    pub worst_im_a: f64,
    pub worst_step3_upper: f64,
    pub worst_step3_lower: f64,
    pub worst_chamber_margin: f64,
    pub failures: Vec<SampleCheck>,
}

impl SweepReport {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// `−Re b − B·Re a + B²/2`.
pub fn step3_value(p: &ChargeParams, big_b: f64) -> f64 {
    -p.b.re - big_b * p.a.re + big_b * big_b / 2.0
}

/// Uniform samples from both chart disks, alternating z and ψ.
pub fn sample_points(samples: usize, seed: u64, z_max: f64, psi_max: f64) -> Vec<MirrorPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(samples);
    while out.len() < samples {
        if out.len() % 2 == 0 {
            let r = z_max * rng.gen::<f64>().sqrt();
            let t = PI * (2.0 * rng.gen::<f64>() - 1.0);
            if r == 0.0 || t <= -PI {
                continue;
            }
            out.push(MirrorPoint::z(Complex64::from_polar(r, t)));
        } else {
            let r = psi_max * rng.gen::<f64>().sqrt();
            let t = PI * (2.0 / 3.0 + 2.0 / 3.0 * rng.gen::<f64>());
            if r == 0.0 || t <= 2.0 * PI / 3.0 || t >= 4.0 * PI / 3.0 {
                continue;
            }
            out.push(MirrorPoint::psi(Complex64::from_polar(r, t)));
        }
    }
    out
}

fn upper_half(pt: &MirrorPoint) -> bool {
    match pt.chart {
        Chart::Z => pt.coord.im >= 0.0,
        Chart::Psi => pt.coord.arg().rem_euclid(2.0 * PI) <= PI,
    }
}

/// Sweep checks at a single point.
pub fn check_point(m: &Mirror, chamber: &GeometricChamber, pt: &MirrorPoint) -> Result<SampleCheck> {
    let p = m.mirror_ab(pt)?;
    let bb = p.big_b();
    let upper = upper_half(pt);
    let b_range = if upper {
        (-0.5..0.0).contains(&bb)
    } else {
        bb > -1.0 && bb <= -0.5
    };
    let ends = if upper { [-0.5, 0.0] } else { [-1.0, -0.5] };
    let worst = ends
        .iter()
        .map(|&x| step3_value(&p, x))
        .fold(f64::NEG_INFINITY, f64::max);
    let step3_margin = STEP3_BOUND - worst;
    let verdict = chamber.verdict(&p);
    Ok(SampleCheck {
        chart: pt.chart,
        coord: pt.coord,
        params: p,
        big_b: bb,
        upper_half: upper,
        im_a: p.a.im > 0.0,
        b_range,
        step3: step3_margin > 0.0,
        step3_margin,
        chamber: verdict.member,
        chamber_margin: verdict.margin,
    })
}

/// Random sweep over both charts.
pub fn verify_appendix_c(samples: usize, seed: u64, depth: u32, m: &Mirror) -> Result<SweepReport> {
    let chamber = GeometricChamber::new(depth, DEFAULT_TOL);
    let points = sample_points(samples, seed, m.z_max, m.psi_max);
    let checks: Vec<SampleCheck> = points
        .par_iter()
        .map(|pt| check_point(m, &chamber, pt))
        .collect::<Result<_>>()?;
    let mut rep = SweepReport {
        samples,
        seed,
        depth,
        im_a_pass: 0,
        b_range_pass: 0,
        step3_pass_upper: 0,
        step3_total_upper: 0,
        step3_pass_lower: 0,
        step3_total_lower: 0,
        chamber_pass: 0,
        worst_im_a: f64::INFINITY,
        worst_step3_upper: f64::INFINITY,
        worst_step3_lower: f64::INFINITY,
        worst_chamber_margin: f64::INFINITY,
        failures: Vec::new(),
    };
    for c in &checks {
        rep.im_a_pass += c.im_a as usize;
        rep.b_range_pass += c.b_range as usize;
        rep.chamber_pass += c.chamber as usize;
        rep.worst_im_a = rep.worst_im_a.min(c.params.a.im);
        rep.worst_chamber_margin = rep.worst_chamber_margin.min(c.chamber_margin);
        if c.upper_half {
            rep.step3_total_upper += 1;
            rep.step3_pass_upper += c.step3 as usize;
            rep.worst_step3_upper = rep.worst_step3_upper.min(c.step3_margin);
        } else {
            rep.step3_total_lower += 1;
            rep.step3_pass_lower += c.step3 as usize;
            rep.worst_step3_lower = rep.worst_step3_lower.min(c.step3_margin);
        }
        if !c.passed() {
            rep.failures.push(c.clone());
        }
    }
    Ok(rep)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesConstants {
    pub order: usize,
    /// `Σ c_n / 27ⁿ`.
    pub sum_c: f64,
    /// `Σ |l_n| / 27ⁿ`.
    pub sum_abs_l: f64,
    /// Value of `Σ |l_n| / 27ⁿ` forced by `b(−1/27) = 0` given `sum_c`.
    pub sum_abs_l_implied: f64,
}

/// The two series constants at the table order.
pub fn series_constants(tbl: &SeriesTable) -> SeriesConstants {
    let s1 = tbl.sum_c();
    let lambda = -3.0 * 3f64.ln() + 3.0 * s1;
    SeriesConstants {
        order: tbl.order(),
        sum_c: s1,
        sum_abs_l: tbl.sum_abs_l(),
        sum_abs_l_implied: PI * PI - lambda * lambda + 9.0 * s1 * s1,
    }
}

/// `b(−1/27)` from the z-series evaluated on the boundary circle, `arg z = π`.
pub fn conifold_b_series(tbl: &SeriesTable) -> Complex64 {
    tbl.ab_jets(Complex64::new(CONIFOLD, 0.0), 0).1[0]
}

fn jet3(j: &Jet) -> State {
    [j[0], j[1], j[2]]
}

/// Base point in the upper half plane used for conifold computations.
pub fn conifold_base() -> Complex64 {
    Complex64::new(-0.5, 0.3) / 27.0
}

/// `b(−1/27)` by ODE transport to `(−1 + 0.3i)/27` and local Frobenius matching.
pub fn conifold_b_ode(m: &Mirror, opts: &OdeOptions) -> Result<Complex64> {
    let start = conifold_base();
    let target = Complex64::new(-1.0, 0.3) / 27.0;
    let (_, b) = m.ab_jets(&MirrorPoint::z(start))?;
    let y = ode_transport(&[start, target], jet3(&b), opts)?;
    conifold_value(target, y, &conifold_series(200))
}

/// Values of `(a, b)` before and after transport around a closed loop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopReport {
    pub base: Complex64,
    pub before: ChargeParams,
    pub after: ChargeParams,
    pub predicted: ChargeParams,
    pub error: f64,
}

fn loop_transport(
    m: &Mirror,
    base: Complex64,
    center: Complex64,
    segments: usize,
    opts: &OdeOptions,
) -> Result<(ChargeParams, ChargeParams)> {
    let (a, b) = m.ab_jets(&MirrorPoint::z(base))?;
    let path = circle_path(center, base, segments);
    let a1 = ode_transport(&path, jet3(&a), opts)?;
    let b1 = ode_transport(&path, jet3(&b), opts)?;
    Ok((ChargeParams::new(a[0], b[0]), ChargeParams::new(a1[0], b1[0])))
}

fn param_error(x: &ChargeParams, y: &ChargeParams) -> f64 {
    (x.a - y.a).norm().max((x.b - y.b).norm())
}

/// Counterclockwise loop around `z = −1/27`, compared with `Z ∘ ST_O⁻¹`:
/// `(a, b) ↦ (a + 3b, b)`.
pub fn conifold_loop(m: &Mirror, segments: usize, opts: &OdeOptions) -> Result<LoopReport> {
    let base = conifold_base();
    let (before, after) = loop_transport(m, base, Complex64::new(CONIFOLD, 0.0), segments, opts)?;
    let predicted = ChargeParams::new(before.a + before.b * 3.0, before.b);
    Ok(LoopReport {
        base,
        before,
        after,
        predicted,
        error: param_error(&after, &predicted),
    })
}

/// Counterclockwise loop around `z = 0`, compared with `(a + 1, b − a − 1/2)`.
pub fn large_volume_loop(m: &Mirror, segments: usize, opts: &OdeOptions) -> Result<LoopReport> {
    let base = Complex64::from_polar(0.5 / 27.0, PI / 4.0);
    let (before, after) = loop_transport(m, base, Complex64::new(0.0, 0.0), segments, opts)?;
    let predicted = before.tensor_shift();
    Ok(LoopReport {
        base,
        before,
        after,
        predicted,
        error: param_error(&after, &predicted),
    })
}

/// Comparison of the ψ-chart with the z-chart continued along an ODE path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartGlue {
    pub z_start: Complex64,
    pub z_end: Complex64,
    pub psi_end: Complex64,
    pub transported: ChargeParams,
    pub psi_chart: ChargeParams,
    pub error: f64,
}

/// Transports `(a, b)` from `z_start` to `z_end` and compares with the ψ-series.
pub fn chart_glue(m: &Mirror, z_start: Complex64, z_end: Complex64, opts: &OdeOptions) -> Result<ChartGlue> {
    let (a, b) = m.ab_jets(&MirrorPoint::z(z_start))?;
    let path = [z_start, z_end];
    let a1 = ode_transport(&path, jet3(&a), opts)?;
    let b1 = ode_transport(&path, jet3(&b), opts)?;
    let psi_end = psi_from_z(z_end);
    let (pa, pb) = m.ab_jets(&MirrorPoint::psi(psi_end))?;
    let transported = ChargeParams::new(a1[0], b1[0]);
    let psi_chart = ChargeParams::new(pa[0], pb[0]);
    let mut error = param_error(&transported, &psi_chart);
    for k in 1..3 {
        error = error.max((a1[k] - pa[k]).norm()).max((b1[k] - pb[k]).norm());
    }
    Ok(ChartGlue {
        z_start,
        z_end,
        psi_end,
        transported,
        psi_chart,
        error,
    })
}

/// Picard–Fuchs residual `(1+27z)θ³Π + 27zθ²Π + 6zθΠ` of a z-jet.
pub fn residual_z(z: Complex64, j: &Jet) -> Complex64 {
    j[3] * (1.0 + 27.0 * z) + (j[2] * 27.0 + j[1] * 6.0) * z
}

/// Residual `ψ³θ³Π − θ(θ−1)(θ−2)Π` of a θ_ψ-jet.
pub fn residual_psi(psi: Complex64, j: &Jet) -> Complex64 {
    let falling = j[3] - j[2] * 3.0 + j[1] * 2.0;
    psi * psi * psi * j[3] - falling
}

pub use psi::psi_jet_to_z;
