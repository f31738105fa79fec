//! Exceptional slopes on P² and the Drézet–Le Potier boundary.
//!
//! Slopes are produced by the ε-recursion on dyadic rationals. Ranks grow
//! doubly exponentially with the dyadic level, so all slope arithmetic is
//! done in [`BigRational`]. The fundamental window `[0, 1]` is computed once
//! per depth and cached; other windows are integer translates.
//!
//! For the boundary δ we use `P(−t) = P(−(3 − t))`: a slope at distance
//! `t > 3/2` from μ contributes exactly what its translate by ±3 contributes
//! at distance `3 − t`. Together with the bound `p_n(μ) ≥ P(−1/2) = 3/8` for
//! the nearest integer `n`, only slopes within `1/2` of μ can attain the
//! supremum.

use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Dyadic rational `p / 2^q` in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dyadic {
    pub p: i64,
    pub q: u32,
}

impl Dyadic {
    /// Reduces `p / 2^q`.
    pub fn new(mut p: i64, mut q: u32) -> Self {
        while q > 0 && p % 2 == 0 {
            p /= 2;
            q -= 1;
        }
        Dyadic { p, q }
    }

    pub fn integer(n: i64) -> Self {
        Dyadic { p: n, q: 0 }
    }

    pub fn floor(&self) -> i64 {
        self.p.div_euclid(1 << self.q)
    }

    pub fn to_f64(&self) -> f64 {
        self.p as f64 / (1u64 << self.q) as f64
    }

    fn translate(&self, n: i64) -> Self {
        Dyadic {
            p: self.p + (n << self.q),
            q: self.q,
        }
    }
}

/// An exceptional slope α together with its rank, discriminant and ε-preimage.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionalSlope {
    pub alpha: BigRational,
    pub rank: BigInt,
    pub disc: BigRational,
    pub index: Dyadic,
}

fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

fn ratio_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

impl ExceptionalSlope {
    /// Packages a slope known to be exceptional.
    pub fn from_alpha(alpha: BigRational, index: Dyadic) -> Self {
        let rank = alpha.denom().clone();
        let r2 = &rank * &rank;
        let disc = (BigRational::one() - BigRational::new(BigInt::one(), r2)) * half();
        ExceptionalSlope {
            alpha,
            rank,
            disc,
            index,
        }
    }

    pub fn integer(n: i64) -> Self {
        Self::from_alpha(BigRational::from_integer(n.into()), Dyadic::integer(n))
    }

    pub fn alpha_f64(&self) -> f64 {
        ratio_f64(&self.alpha)
    }

    pub fn disc_f64(&self) -> f64 {
        ratio_f64(&self.disc)
    }

    /// `ε(x + n) = ε(x) + n`.
    pub fn translate(&self, n: i64) -> Self {
        ExceptionalSlope {
            alpha: &self.alpha + BigRational::from_integer(n.into()),
            rank: self.rank.clone(),
            disc: self.disc.clone(),
            index: self.index.translate(n),
        }
    }
}

/// `α.β = (α+β)/2 + (Δ_β − Δ_α)/(3 + α − β)`.
pub fn dot(a: &ExceptionalSlope, b: &ExceptionalSlope) -> Result<BigRational> {
    let den = BigRational::from_integer(3.into()) + &a.alpha - &b.alpha;
    if den.is_zero() {
        return invalid("3 + α − β vanishes");
    }
    Ok((&a.alpha + &b.alpha) * half() + (&b.disc - &a.disc) / den)
}

/// `P(X) = 1 + 3X/2 + X²/2` evaluated at `X = −t`.
fn p_poly(t: f64) -> f64 {
    1.0 - 1.5 * t + 0.5 * t * t
}

fn p_poly_exact(t: &BigRational) -> BigRational {
    let three_halves = BigRational::new(3.into(), 2.into());
    BigRational::one() - three_halves * t + t * t * half()
}

/// `p_α(x) = p(x − α) − Δ_α`.
pub fn p_alpha(a: &ExceptionalSlope, x: f64) -> f64 {
    p_alpha_raw(a.alpha_f64(), a.disc_f64(), x)
}

fn p_alpha_raw(alpha: f64, disc: f64, x: f64) -> f64 {
    let t = (x - alpha).abs();
    if t < 3.0 {
        p_poly(t) - disc
    } else {
        -disc
    }
}

/// Exact `p_α(x)` for rational `x`.
pub fn p_alpha_exact(a: &ExceptionalSlope, x: &BigRational) -> BigRational {
    let t = (x - &a.alpha).abs();
    if t < BigRational::from_integer(3.into()) {
        p_poly_exact(&t) - &a.disc
    } else {
        -a.disc.clone()
    }
}

/// ε-image of a dyadic rational.
pub fn epsilon(x: Dyadic) -> ExceptionalSlope {
    let n = x.floor();
    let frac = x.p - (n << x.q);
    let w = window(x.q);
    w.get(frac as usize).translate(n)
}

/// ε-image of the dyadic rationals of level `≤ depth` in `[0, 1]`.
struct WindowData {
    depth: u32,
    slopes: Vec<ExceptionalSlope>,
    alpha: Vec<f64>,
    disc: Vec<f64>,
    monotone: bool,
}

impl WindowData {
    fn base() -> Self {
        let slopes = vec![ExceptionalSlope::integer(0), ExceptionalSlope::integer(1)];
        WindowData {
            depth: 0,
            slopes,
            alpha: vec![0.0, 1.0],
            disc: vec![0.0, 0.0],
            monotone: true,
        }
    }

    fn refine(&self) -> Self {
        let q = self.depth + 1;
        let n = self.slopes.len();
        let mut slopes = Vec::with_capacity(2 * n - 1);
        for k in 0..n {
            slopes.push(self.slopes[k].clone());
            if k + 1 < n {
                let mid = dot(&self.slopes[k], &self.slopes[k + 1]).expect("adjacent slopes differ by < 3");
                slopes.push(ExceptionalSlope::from_alpha(mid, Dyadic::new(2 * k as i64 + 1, q)));
            }
        }
        let monotone = self.monotone && slopes.windows(2).all(|w| w[0].alpha < w[1].alpha);
        let alpha = slopes.iter().map(ExceptionalSlope::alpha_f64).collect();
        let disc = slopes.iter().map(ExceptionalSlope::disc_f64).collect();
        WindowData {
            depth: q,
            slopes,
            alpha,
            disc,
            monotone,
        }
    }
}

fn cache() -> &'static Mutex<Arc<WindowData>> {
    static CACHE: OnceLock<Mutex<Arc<WindowData>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(Arc::new(WindowData::base())))
}

/// Strided view of the cached window at a given depth.
#[derive(Clone)]
pub struct Window {
    data: Arc<WindowData>,
    stride: usize,
    len: usize,
}

/// Window of ε-values of level `≤ depth` in `[0, 1]`, in dyadic order.
pub fn window(depth: u32) -> Window {
    let data = {
        let mut guard = cache().lock().expect("exceptional cache poisoned");
        while guard.depth < depth {
            let next = guard.refine();
            *guard = Arc::new(next);
        }
        Arc::clone(&guard)
    };
    let stride = 1usize << (data.depth - depth);
    Window {
        data,
        stride,
        len: (1usize << depth) + 1,
    }
}

impl Window {
    pub fn depth(&self) -> u32 {
        self.data.depth - self.stride.trailing_zeros()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Slope with dyadic index `k / 2^depth`.
    pub fn get(&self, k: usize) -> &ExceptionalSlope {
        &self.data.slopes[k * self.stride]
    }

    fn alpha(&self, k: usize) -> f64 {
        self.data.alpha[k * self.stride]
    }

    fn disc(&self, k: usize) -> f64 {
        self.data.disc[k * self.stride]
    }

    /// Whether ε is strictly increasing on the cached levels.
    pub fn is_monotone(&self) -> bool {
        self.data.monotone
    }

    pub fn iter(&self) -> impl Iterator<Item = &ExceptionalSlope> + '_ {
        (0..self.len).map(move |k| self.get(k))
    }

    /// Index range of slopes with f64 value in `[lo, hi]`.
    fn range_f64(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        if !self.data.monotone {
            return 0..self.len;
        }
        let first = partition(self.len, |k| self.alpha(k) < lo);
        let last = partition(self.len, |k| self.alpha(k) <= hi);
        first..last.max(first)
    }

    /// Exact lookup of a slope in `[0, 1]`.
    fn find(&self, x: &BigRational) -> Option<&ExceptionalSlope> {
        if self.data.monotone {
            let k = partition(self.len, |k| &self.get(k).alpha < x);
            (k < self.len && &self.get(k).alpha == x).then(|| self.get(k))
        } else {
            self.iter().find(|s| &s.alpha == x)
        }
    }
}

fn partition(len: usize, pred: impl Fn(usize) -> bool) -> usize {
    let (mut lo, mut hi) = (0, len);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if pred(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

fn floor_big(x: &BigRational) -> i64 {
    x.floor().to_integer().to_i64().expect("slope window out of i64 range")
}

/// All `ε(p/2^q)` with `q ≤ depth` and slope in `[lo, hi]`, sorted by slope.
pub fn enumerate_exceptional(lo: &BigRational, hi: &BigRational, depth: u32) -> Result<Vec<ExceptionalSlope>> {
    if lo > hi {
        return invalid("empty slope window");
    }
    let w = window(depth);
    let mut out = Vec::new();
    for n in floor_big(lo)..=floor_big(hi) {
        let shift = BigRational::from_integer(n.into());
        for k in 0..w.len() - 1 {
            let s = w.get(k);
            let a = &s.alpha + &shift;
            if &a >= lo && &a <= hi {
                out.push(s.translate(n));
            }
        }
    }
    let top = BigRational::from_integer((floor_big(hi) + 1).into());
    if &top <= hi {
        out.push(ExceptionalSlope::integer(floor_big(hi) + 1));
    }
    if !w.is_monotone() {
        out.sort_by(|a, b| a.alpha.cmp(&b.alpha));
    }
    Ok(out)
}

/// Exceptional slope equal to `x`, if it occurs at level `≤ depth`.
pub fn find_exceptional(x: &BigRational, depth: u32) -> Option<ExceptionalSlope> {
    let n = floor_big(x);
    let frac = x - BigRational::from_integer(n.into());
    window(depth).find(&frac).map(|s| s.translate(n))
}

/// Value of the truncated boundary and a slope attaining it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DpValue<T> {
    pub value: T,
    pub witness: ExceptionalSlope,
}

/// Truncation of δ∞^DP to the slopes of level `≤ depth`.
#[derive(Clone)]
pub struct DpBoundary {
    window: Window,
}

const WINDOW_SLACK: f64 = 1e-12;

impl DpBoundary {
    pub fn new(depth: u32) -> Self {
        DpBoundary { window: window(depth) }
    }

    pub fn depth(&self) -> u32 {
        self.window.depth()
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    /// `(value, shift, index)` of the maximising slope, smallest slope on ties.
    fn argmax(&self, frac: f64) -> (f64, i64, usize) {
        let mut best = (f64::NEG_INFINITY, 0i64, 0usize);
        for shift in -1i64..=1 {
            let s = shift as f64;
            let lo = frac - s - 0.5 - WINDOW_SLACK;
            let hi = frac - s + 0.5 + WINDOW_SLACK;
            for k in self.window.range_f64(lo, hi) {
                let v = p_alpha_raw(self.window.alpha(k) + s, self.window.disc(k), frac);
                if v > best.0 {
                    best = (v, shift, k);
                }
            }
        }
        best
    }

    /// Boundary value at a real slope.
    pub fn value(&self, mu: f64) -> f64 {
        let n = mu.floor();
        self.argmax(mu - n).0
    }

    /// Boundary value and witness at a real slope.
    pub fn eval(&self, mu: f64) -> DpValue<f64> {
        let n = mu.floor();
        let (value, shift, k) = self.argmax(mu - n);
        DpValue {
            value,
            witness: self.window.get(k).translate(shift + n as i64),
        }
    }

    /// Exact boundary value at a rational slope.
    ///
    /// Candidates are screened in f64 and the survivors compared exactly.
    pub fn eval_exact(&self, mu: &BigRational) -> DpValue<BigRational> {
        let n = floor_big(mu);
        let frac = mu - BigRational::from_integer(n.into());
        let ff = ratio_f64(&frac);
        let best = self.argmax(ff).0;
        let mut out: Option<DpValue<BigRational>> = None;
        for shift in -1i64..=1 {
            let s = shift as f64;
            for k in self.window.range_f64(ff - s - 0.5 - 1e-9, ff - s + 0.5 + 1e-9) {
                let approx = p_alpha_raw(self.window.alpha(k) + s, self.window.disc(k), ff);
                if approx < best - 1e-9 {
                    continue;
                }
                let cand = self.window.get(k).translate(shift);
                let v = p_alpha_exact(&cand, &frac);
                let better = match &out {
                    None => true,
                    Some(cur) => v > cur.value || (v == cur.value && cand.alpha < cur.witness.alpha),
                };
                if better {
                    out = Some(DpValue {
                        value: v,
                        witness: cand,
                    });
                }
            }
        }
        let out = out.expect("nearest integer is always a candidate");
        DpValue {
            value: out.value,
            witness: out.witness.translate(n),
        }
    }
}

/// `max p_α(μ)` over slopes of level `≤ depth`, with the smallest maximising slope.
pub fn delta_dp(mu: f64, depth: u32) -> DpValue<f64> {
    DpBoundary::new(depth).eval(mu)
}

/// Exact version of [`delta_dp`] for rational μ.
pub fn delta_dp_exact(mu: &BigRational, depth: u32) -> DpValue<BigRational> {
    DpBoundary::new(depth).eval_exact(mu)
}

/// Existence of a slope-stable sheaf with rank `r`, slope μ and discriminant Δ.
///
/// Condition (2) is checked against every exceptional slope of rank `< r`
/// within distance 3 of μ. The ε-tree is searched below `depth` as well and
/// pruned once ranks reach `r`, since ranks strictly increase from parents
/// to children.
pub fn dp_existence(r: i64, mu: &BigRational, delta: &BigRational, _depth: u32) -> Result<bool> {
    if r <= 0 {
        return invalid(format!("rank must be positive, got {r}"));
    }
    let rq = BigRational::from_integer(r.into());
    let p_mu = p_poly_exact(&-mu.clone());
    if !(&rq * mu).is_integer() || !(&rq * (p_mu - delta)).is_integer() {
        return Ok(false);
    }
    let rank_bound = BigInt::from(r);
    let three = BigRational::from_integer(3.into());
    let lo = mu - &three;
    let hi = mu + &three;
    let violates = |s: &ExceptionalSlope| (&s.alpha - mu).abs() < three && &p_alpha_exact(s, mu) > delta;

    let n0 = floor_big(mu);
    let mut stack = Vec::new();
    for n in (n0 - 3)..=(n0 + 4) {
        let s = ExceptionalSlope::integer(n);
        if r > 1 && violates(&s) {
            return Ok(false);
        }
        if n < n0 + 4 {
            stack.push((s, ExceptionalSlope::integer(n + 1)));
        }
    }
    while let Some((a, b)) = stack.pop() {
        if b.alpha <= lo || a.alpha >= hi {
            continue;
        }
        let mid = ExceptionalSlope::from_alpha(dot(&a, &b)?, midpoint(a.index, b.index));
        if mid.rank >= rank_bound {
            continue;
        }
        if violates(&mid) {
            return Ok(false);
        }
        stack.push((a, mid.clone()));
        stack.push((mid, b));
    }
    Ok(true)
}

fn midpoint(a: Dyadic, b: Dyadic) -> Dyadic {
    let q = a.q.max(b.q) + 1;
    let pa = a.p << (q - a.q);
    let pb = b.p << (q - b.q);
    Dyadic::new((pa + pb) / 2, q)
}
