//! Central charges `Z_{a,b}(E) = −c(E) + a·d(E) + b·r(E)` and the geometric
//! chamber of stability conditions on local P².
//!
//! Strict inequalities are evaluated through signed margins: a rule holds
//! when its margin exceeds `tol`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::exceptional::{find_exceptional, DpBoundary, ExceptionalSlope};
use crate::ktheory::{ChernClass, CollectionTriple};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_GRID: usize = 2048;

/// Parameters `(a, b)` of the central charge `Z_{a,b}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChargeParams {
    pub a: Complex64,
    pub b: Complex64,
}

impl ChargeParams {
    pub fn new(a: Complex64, b: Complex64) -> Self {
        ChargeParams { a, b }
    }

    /// `B = −Im b / Im a`.
    pub fn big_b(&self) -> f64 {
        -self.b.im / self.a.im
    }

    /// Parameters of `Z ∘ (− ⊗ O(−1))`: `(a + 1, b − a − 1/2)`.
    pub fn tensor_shift(&self) -> Self {
        ChargeParams {
            a: self.a + 1.0,
            b: self.b - self.a - 0.5,
        }
    }
}

pub fn central_charge(p: &ChargeParams, x: ChernClass) -> Complex64 {
    -x.c_f64() + p.a * x.d as f64 + p.b * x.r as f64
}

/// `(a, b)` of `Z^{t,m} = −∫ e^{−(t+im)h} ch`.
pub fn params_from_tm(t: f64, m: f64) -> Result<ChargeParams> {
    if !(m > 0.0) {
        return invalid(format!("m must be positive, got {m}"));
    }
    let a = Complex64::new(t, m);
    Ok(ChargeParams { a, b: -a * a / 2.0 })
}

/// Simplest rational in `[x − tol, x + tol]`.
pub fn rational_within(x: f64, tol: f64) -> Option<BigRational> {
    let lo = BigRational::from_float(x - tol)?;
    let hi = BigRational::from_float(x + tol)?;
    Some(simplest_between(lo, hi))
}

fn simplest_between(lo: BigRational, hi: BigRational) -> BigRational {
    let fl = lo.floor();
    if fl == lo {
        return fl;
    }
    let next = &fl + BigRational::one();
    if next <= hi {
        return next;
    }
    let inner = simplest_between((&hi - &fl).recip(), (&lo - &fl).recip());
    fl + inner.recip()
}

/// Exceptional slope matching `x` after rational reconstruction.
pub fn match_exceptional(x: f64, depth: u32, tol: f64) -> Option<ExceptionalSlope> {
    if !x.is_finite() {
        return None;
    }
    rational_within(x, tol).and_then(|q| find_exceptional(&q, depth))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailedRule {
    ImA,
    GenericSlope,
    ExceptionalSlope,
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChamberVerdict {
    pub member: bool,
    pub failed_rule: FailedRule,
    pub witness: Option<ExceptionalSlope>,
    /// Signed slack of the tightest (or the failed) inequality.
    pub margin: f64,
    /// `|margin| < tol`: the verdict is not resolved at this depth and tolerance.
    pub undecided: bool,
    /// Margin of the exceptional rule at the exceptional slope nearest to `B`
    /// when `B` itself is not exceptional.
    pub nearest_exceptional_margin: Option<f64>,
}

/// Membership test for the geometric chamber with fixed depth and tolerance.
#[derive(Clone)]
pub struct GeometricChamber {
    dp: DpBoundary,
    tol: f64,
}

impl GeometricChamber {
    pub fn new(depth: u32, tol: f64) -> Self {
        GeometricChamber {
            dp: DpBoundary::new(depth),
            tol,
        }
    }

    pub fn boundary(&self) -> &DpBoundary {
        &self.dp
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Checks `Im a > 0`, then the exceptional rule when `B` is an
    /// exceptional slope, then the generic rule. At exceptional `B` the
    /// exceptional rule implies the generic one, so it is reported first.
    pub fn verdict(&self, p: &ChargeParams) -> ChamberVerdict {
        let tol = self.tol;
        let im_a = p.a.im;
        if !(im_a > tol) {
            return ChamberVerdict {
                member: false,
                failed_rule: FailedRule::ImA,
                witness: None,
                margin: im_a,
                undecided: im_a.abs() < tol,
                nearest_exceptional_margin: None,
            };
        }
        let bb = p.big_b();
        let base = p.b.re + bb * p.a.re - bb * bb / 2.0;
        let dp = self.dp.eval(bb);
        let generic = base + dp.value;
        let exc = match_exceptional(bb, self.dp.depth(), tol);
        let mut margin = im_a.min(generic);
        let mut nearest = None;
        if let Some(e) = &exc {
            let m = base + e.disc_f64();
            if !(m > tol) {
                return ChamberVerdict {
                    member: false,
                    failed_rule: FailedRule::ExceptionalSlope,
                    witness: exc,
                    margin: m,
                    undecided: m.abs() < tol,
                    nearest_exceptional_margin: None,
                };
            }
            margin = margin.min(m);
        } else if let Some(e) = self.nearest_exceptional(bb) {
            nearest = Some(base + e.1);
        }
        if !(generic > tol) {
            return ChamberVerdict {
                member: false,
                failed_rule: FailedRule::GenericSlope,
                witness: Some(dp.witness),
                margin: generic,
                undecided: generic.abs() < tol,
                nearest_exceptional_margin: nearest,
            };
        }
        ChamberVerdict {
            member: true,
            failed_rule: FailedRule::None,
            witness: exc,
            margin,
            undecided: margin.abs() < tol,
            nearest_exceptional_margin: nearest,
        }
    }

    /// `(α, Δ_α)` of the enumerated slope closest to `x`.
    fn nearest_exceptional(&self, x: f64) -> Option<(f64, f64)> {
        let n = x.floor();
        let f = x - n;
        self.dp
            .window()
            .iter()
            .map(|s| (s.alpha_f64(), s.disc_f64()))
            .min_by(|a, b| (a.0 - f).abs().total_cmp(&(b.0 - f).abs()))
            .map(|(a, d)| (a + n, d))
    }
}

/// Membership in the geometric chamber at the given depth and default tolerance.
pub fn in_geometric_chamber(p: &ChargeParams, depth: u32) -> ChamberVerdict {
    GeometricChamber::new(depth, DEFAULT_TOL).verdict(p)
}

/// `Im a > 0` and `Re b > −B·Re a + B²/2`.
pub fn in_stab_g(p: &ChargeParams) -> bool {
    if !(p.a.im > 0.0) {
        return false;
    }
    let bb = p.big_b();
    p.b.re > -bb * p.a.re + bb * bb / 2.0
}

/// Point `γ_{a,b}(t)` of the boundary path.
pub fn gamma_path_point_with(p: &ChargeParams, t: f64, dp: &DpBoundary) -> Complex64 {
    let x = p.b.re + p.a.re * p.a.re / 2.0 + dp.value(t) - (t - p.a.re).powi(2) / 2.0;
    let y = p.a.im * t + p.b.im;
    Complex64::new(x, y)
}

pub fn gamma_path_point(p: &ChargeParams, t: f64, depth: u32) -> Complex64 {
    gamma_path_point_with(p, t, &DpBoundary::new(depth))
}

/// Whether `z` lies on or to the right of `γ_{a,b}`.
pub fn in_s_ab(p: &ChargeParams, z: Complex64, depth: u32) -> Result<bool> {
    if p.a.im == 0.0 {
        return invalid("Im a = 0");
    }
    let t = (z.im - p.b.im) / p.a.im;
    Ok(z.re >= gamma_path_point(p, t, depth).re)
}

/// Estimate of `S_min = min(γ_min, E_min)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SMin {
    pub value: f64,
    pub gamma_min: f64,
    pub t_star: f64,
    pub e_min: f64,
    pub e_witness: Option<f64>,
    pub depth: u32,
    pub grid: usize,
}

fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Grid-plus-golden-section estimate of `S_min` for chamber parameters.
pub fn s_min(p: &ChargeParams, depth: u32, grid: usize) -> Result<SMin> {
    let chamber = GeometricChamber::new(depth, DEFAULT_TOL);
    if !chamber.verdict(p).member {
        return invalid("parameters are not in the geometric chamber");
    }
    if grid < 2 {
        return invalid("grid must have at least two points");
    }
    let dp = chamber.boundary();
    let im_a = p.a.im;
    let bb = p.big_b();
    let gabs = |t: f64| gamma_path_point_with(p, t, dp).norm();

    let mut t_star = bb;
    let mut inc = gabs(bb);
    let reach = 2.0 * (inc + p.b.re + p.a.re * p.a.re / 2.0 + 1.0);
    if reach > 0.0 {
        let r = reach.sqrt();
        let lo = (bb - inc / im_a).max(p.a.re - r);
        let hi = (bb + inc / im_a).min(p.a.re + r);
        if lo < hi {
            let h = (hi - lo) / (grid - 1) as f64;
            let (mut best_k, mut best) = (0, f64::INFINITY);
            for k in 0..grid {
                let v = gabs(lo + h * k as f64);
                if v < best {
                    best = v;
                    best_k = k;
                }
            }
            let a = lo + h * best_k.saturating_sub(1) as f64;
            let b = (lo + h * (best_k + 1) as f64).min(hi);
            let (t, v) = golden_min(gabs, a, b);
            for (tt, vv) in [(lo + h * best_k as f64, best), (t, v)] {
                if vv < inc {
                    inc = vv;
                    t_star = tt;
                }
            }
        }
    }
    let gamma_min = inc;

    let mut e_min = f64::INFINITY;
    let mut e_witness = None;
    let radius = gamma_min / im_a;
    let (lo, hi) = (bb - radius, bb + radius);
    let w = dp.window();
    for n in (lo.floor() as i64)..=(hi.floor() as i64) {
        for s in w.iter().take(w.len() - 1) {
            let alpha = s.alpha_f64() + n as f64;
            if alpha < lo || alpha > hi || im_a * (alpha - bb).abs() >= e_min {
                continue;
            }
            let z = -(alpha * alpha / 2.0 - s.disc_f64()) + p.a * alpha + p.b;
            let dist = if z.re <= 0.0 { z.im.abs() } else { z.norm() };
            if dist < e_min {
                e_min = dist;
                e_witness = Some(alpha);
            }
        }
    }
    Ok(SMin {
        value: gamma_min.min(e_min),
        gamma_min,
        t_star,
        e_min,
        e_witness,
        depth,
        grid,
    })
}

/// `‖M(a,b)⁻¹‖_∞` for `M = [[1,0,0],[Im b, Im a, 0],[Re b, Re a, −1]]`.
pub fn matrix_norm_n(p: &ChargeParams) -> Result<f64> {
    let q = p.a.im;
    if q == 0.0 {
        return invalid("M(a, b) is singular for Im a = 0");
    }
    let (pp, s, u) = (p.b.im, p.b.re, p.a.re);
    let rows = [[1.0, 0.0, 0.0], [-pp / q, 1.0 / q, 0.0], [s - u * pp / q, u / q, -1.0]];
    Ok(rows
        .iter()
        .map(|r| r.iter().map(|x: &f64| x.abs()).sum::<f64>())
        .fold(0.0, f64::max))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportConstant {
    pub s_min: SMin,
    pub norm: f64,
    pub constant: f64,
    pub deformation_radius: f64,
}

/// `min(S_min, 1)/N(a,b)` and the deformation radius `sin(π/8)` times it.
pub fn support_constant(p: &ChargeParams, depth: u32, grid: usize) -> Result<SupportConstant> {
    let sm = s_min(p, depth, grid)?;
    let norm = matrix_norm_n(p)?;
    let constant = sm.value.min(1.0) / norm;
    let deformation_radius = (std::f64::consts::PI / 8.0).sin() * constant;
    Ok(SupportConstant {
        s_min: sm,
        norm,
        constant,
        deformation_radius,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WallSide {
    Plus,
    Minus,
    Degenerate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WallReport {
    pub on_wall: bool,
    pub slope: Option<ExceptionalSlope>,
    pub side: Option<WallSide>,
    pub jh_sub: Option<ChernClass>,
    pub jh_quot: Option<ChernClass>,
    /// `−Re b − B·Re a + B²/2`.
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Chern triple of the exceptional bundle with slope α.
pub fn exceptional_class(e: &ExceptionalSlope) -> Result<ChernClass> {
    let r = &e.rank;
    let d: BigInt = (&e.alpha * BigRational::from_integer(r.clone())).to_integer();
    let c2 = (&d * &d + BigInt::one() - r * r) / r;
    match (r.to_i64(), d.to_i64(), c2.to_i64()) {
        (Some(r), Some(d), Some(c2)) => Ok(ChernClass::from_twice(r, d, c2)),
        _ => invalid("exceptional rank too large for a machine-word Chern class"),
    }
}

/// Jordan–Hölder factors of `k(x)` on the wall of `E`.
pub fn jh_factors(e: ChernClass, side: WallSide) -> Option<(ChernClass, ChernClass)> {
    let re = e.r * e;
    match side {
        WallSide::Plus => Some((re, ChernClass::SKYSCRAPER - re)),
        WallSide::Minus => Some((ChernClass::SKYSCRAPER - re, re)),
        WallSide::Degenerate => None,
    }
}

/// Side from the sign of `Im Z(E)` when `b` is moved by `eta·db`.
pub fn wall_side_towards(p: &ChargeParams, e: ChernClass, db: Complex64, eta: f64) -> WallSide {
    let q = ChargeParams {
        a: p.a,
        b: p.b + db * eta,
    };
    let im = central_charge(&q, e).im;
    if im > 0.0 {
        WallSide::Plus
    } else if im < 0.0 {
        WallSide::Minus
    } else {
        WallSide::Degenerate
    }
}

/// Boundary wall test at `(a, b)`.
///
/// The side is read from the sign of `Im Z(E)`, which is `r·Im a·(α − B)`:
/// positive (plus) when `B < α`, negative (minus) when `B > α`; when `B = α`
/// to working precision the upward perturbation `b + i·tol·Im a` decides,
/// which gives plus.
pub fn wall_test(p: &ChargeParams, depth: u32, tol: f64) -> Result<WallReport> {
    if !(p.a.im > 0.0) {
        return invalid("wall test requires Im a > 0");
    }
    let bb = p.big_b();
    let value = -p.b.re - bb * p.a.re + bb * bb / 2.0;
    let dp = DpBoundary::new(depth);
    let upper = dp.value(bb);
    let mut report = WallReport {
        on_wall: false,
        slope: None,
        side: None,
        jh_sub: None,
        jh_quot: None,
        value,
        lower: f64::NAN,
        upper,
    };
    let Some(e) = match_exceptional(bb, depth, tol) else {
        return Ok(report);
    };
    report.lower = e.disc_f64();
    report.on_wall = report.lower + tol < value && value < upper - tol;
    if report.on_wall {
        let class = exceptional_class(&e)?;
        let side = if p.a.im < tol && p.b.im.abs() < tol {
            WallSide::Degenerate
        } else {
            let s = e.alpha_f64() - bb;
            if s.abs() > 4.0 * f64::EPSILON * (1.0 + bb.abs()) {
                if s > 0.0 {
                    WallSide::Plus
                } else {
                    WallSide::Minus
                }
            } else {
                wall_side_towards(p, class, Complex64::i(), tol * p.a.im)
            }
        };
        if let Some((sub, quot)) = jh_factors(class, side) {
            report.jh_sub = Some(sub);
            report.jh_quot = Some(quot);
        }
        report.side = Some(side);
    }
    report.slope = Some(e);
    Ok(report)
}

/// Open semicircle `{(t, m) : (t − C)² + m² < ρ, m > 0}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Semicircle {
    pub center: BigRational,
    pub rho: BigRational,
}

impl Semicircle {
    pub fn radius(&self) -> f64 {
        self.rho.to_f64().unwrap_or(f64::NAN).sqrt()
    }

    pub fn center_f64(&self) -> f64 {
        self.center.to_f64().unwrap_or(f64::NAN)
    }

    pub fn contains(&self, t: f64, m: f64) -> bool {
        let c = self.center_f64();
        m > 0.0 && (t - c).powi(2) + m * m < self.rho.to_f64().unwrap_or(f64::NAN)
    }
}

fn big(x: num_rational::Rational64) -> BigRational {
    BigRational::new((*x.numer()).into(), (*x.denom()).into())
}

/// Semicircle attached to a collection `(E₀, E₁, E₂)` with `μ₀ ≠ μ₂`.
pub fn semicircle(coll: &CollectionTriple) -> Result<Semicircle> {
    let Some(e) = coll.bundle_data else {
        return invalid("collection has no bundle data");
    };
    let (mu0, mu2) = (
        big(e[0].slope().expect("rank > 0")),
        big(e[2].slope().expect("rank > 0")),
    );
    let (d0, d2) = (
        big(e[0].discriminant().expect("rank > 0")),
        big(e[2].discriminant().expect("rank > 0")),
    );
    let gap = &mu2 - &mu0;
    if gap.is_zero() {
        return invalid("μ₀ = μ₂");
    }
    let two = BigRational::from_integer(2.into());
    let q = (&d0 - &d2) / &gap;
    let center = (&mu0 + &mu2) / &two + &q;
    let rho = &q * &q + &gap * &gap / BigRational::from_integer(4.into()) - (d0 + d2);
    Ok(Semicircle { center, rho })
}
