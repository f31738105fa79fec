//! Exact arithmetic on K-classes of D₀ = D^b_{P²}(local P²).
//!
//! A class is stored as its Chern triple `(r, d, c)` with `c ∈ ½ℤ`, kept
//! internally as the integer `2c`. Everything here is exact.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Chern triple `(r, d, c)` of a K-class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChernClass {
    pub r: i64,
    pub d: i64,
    c2: i64,
}

impl ChernClass {
    /// Class of a skyscraper sheaf `k(x)`.
    pub const SKYSCRAPER: ChernClass = ChernClass { r: 0, d: 0, c2: 2 };
    pub const ZERO: ChernClass = ChernClass { r: 0, d: 0, c2: 0 };

    /// Builds `(r, d, c2/2)`.
    pub const fn from_twice(r: i64, d: i64, c2: i64) -> Self {
        ChernClass { r, d, c2 }
    }

    /// Builds `(r, d, c)`, rejecting `c` whose denominator does not divide 2.
    pub fn new(r: i64, d: i64, c: Rational64) -> Result<Self> {
        let twice = c * 2;
        if !twice.is_integer() {
            return invalid(format!("c = {c} is not a half-integer"));
        }
        Ok(ChernClass {
            r,
            d,
            c2: *twice.numer(),
        })
    }

    pub fn c(&self) -> Rational64 {
        Rational64::new(self.c2, 2)
    }

    pub fn c_twice(&self) -> i64 {
        self.c2
    }

    pub fn c_f64(&self) -> f64 {
        self.c2 as f64 / 2.0
    }

    /// `d/r`, defined for `r ≠ 0`.
    pub fn slope(&self) -> Option<Rational64> {
        (self.r != 0).then(|| Rational64::new(self.d, self.r))
    }

    /// `d²/2r² − c/r`, defined for `r ≠ 0`.
    pub fn discriminant(&self) -> Option<Rational64> {
        (self.r != 0).then(|| {
            let r = self.r;
            Rational64::new(self.d * self.d, 2 * r * r) - Rational64::new(self.c2, 2 * r)
        })
    }

    /// The representative of `±self` with non-negative rank.
    pub fn positive_rank(self) -> Self {
        if self.r < 0 {
            -self
        } else {
            self
        }
    }
}

impl fmt::Display for ChernClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.r, self.d, self.c())
    }
}

impl Add for ChernClass {
    type Output = ChernClass;
    fn add(self, o: ChernClass) -> ChernClass {
        ChernClass::from_twice(self.r + o.r, self.d + o.d, self.c2 + o.c2)
    }
}

impl Sub for ChernClass {
    type Output = ChernClass;
    fn sub(self, o: ChernClass) -> ChernClass {
        ChernClass::from_twice(self.r - o.r, self.d - o.d, self.c2 - o.c2)
    }
}

impl Neg for ChernClass {
    type Output = ChernClass;
    fn neg(self) -> ChernClass {
        ChernClass::from_twice(-self.r, -self.d, -self.c2)
    }
}

impl Mul<ChernClass> for i64 {
    type Output = ChernClass;
    fn mul(self, x: ChernClass) -> ChernClass {
        ChernClass::from_twice(self * x.r, self * x.d, self * x.c2)
    }
}

/// `ch(O(n)) = (1, n, n²/2)`.
pub fn ch_line_bundle(n: i64) -> ChernClass {
    ChernClass::from_twice(1, n, n * n)
}

/// `x ⊗ O(n)`: `(r, d + nr, c + nd + n²r/2)`.
pub fn tensor_line(x: ChernClass, n: i64) -> ChernClass {
    ChernClass::from_twice(x.r, x.d + n * x.r, x.c2 + 2 * n * x.d + n * n * x.r)
}

/// `x ⊗ O(1)`.
pub fn tensor_o1(x: ChernClass) -> ChernClass {
    tensor_line(x, 1)
}

/// The shift `[k]`, acting by `(−1)^k`.
pub fn shift(x: ChernClass, k: i64) -> ChernClass {
    if k.rem_euclid(2) == 0 {
        x
    } else {
        -x
    }
}

/// Euler pairing on P² via Riemann–Roch.
pub fn euler_p2(x: ChernClass, y: ChernClass) -> Rational64 {
    let twice = euler_twice(x, y);
    Rational64::new(i64::try_from(twice).expect("Euler pairing exceeds i64"), 2)
}

fn euler_twice(x: ChernClass, y: ChernClass) -> i128 {
    let [xr, xd, xc, yr, yd, yc] = [x.r, x.d, x.c2, y.r, y.d, y.c2].map(i128::from);
    xr * yc + yr * xc - 2 * xd * yd + 3 * (xr * yd - yr * xd) + 2 * xr * yr
}

/// Euler form of D₀, `3(r_x d_y − r_y d_x)`.
pub fn euler_skew(x: ChernClass, y: ChernClass) -> i64 {
    3 * (x.r * y.d - y.r * x.d)
}

/// K-class action of the spherical twist `ST_s` on `m`.
pub fn spherical_twist_k(s: ChernClass, m: ChernClass) -> ChernClass {
    m - euler_skew(s, m) * s
}

/// K-class action of `ST_s⁻¹` on `m`.
pub fn spherical_twist_inv_k(s: ChernClass, m: ChernClass) -> ChernClass {
    m + euler_skew(s, m) * s
}

/// `ST_O ∘ (− ⊗ O(1))` on K-classes: `(−2r−3d, d+r, c+d+r/2)`.
pub fn phi_composite_k(x: ChernClass) -> ChernClass {
    spherical_twist_k(ch_line_bundle(0), tensor_o1(x))
}

pub type Mat2 = [[i64; 2]; 2];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GammaLetter {
    S,
    T,
    SInv,
    TInv,
}

impl GammaLetter {
    pub fn matrix(self) -> Mat2 {
        match self {
            GammaLetter::S => [[1, 0], [-3, 1]],
            GammaLetter::T => [[1, 1], [0, 1]],
            GammaLetter::SInv => [[1, 0], [3, 1]],
            GammaLetter::TInv => [[1, -1], [0, 1]],
        }
    }
}

/// Word over `{S, T, S⁻¹, T⁻¹}`. Parsed from e.g. `"STST'S"` where `'`
/// marks an inverse; whitespace is ignored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaWord(pub Vec<GammaLetter>);

impl FromStr for GammaWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut out: Vec<GammaLetter> = Vec::new();
        for ch in s.chars().filter(|c| !c.is_whitespace()) {
            match ch {
                'S' => out.push(GammaLetter::S),
                'T' => out.push(GammaLetter::T),
                '\'' => {
                    let last = out
                        .pop()
                        .ok_or_else(|| Error::Parse("inverse mark without a letter".into()))?;
                    out.push(match last {
                        GammaLetter::S => GammaLetter::SInv,
                        GammaLetter::T => GammaLetter::TInv,
                        _ => return Err(Error::Parse("double inverse mark".into())),
                    });
                }
                other => return Err(Error::Parse(format!("letter {other:?} not in {{S, T}}"))),
            }
        }
        Ok(GammaWord(out))
    }
}

pub fn mat2_mul(x: &Mat2, y: &Mat2) -> Mat2 {
    [
        [
            x[0][0] * y[0][0] + x[0][1] * y[1][0],
            x[0][0] * y[0][1] + x[0][1] * y[1][1],
        ],
        [
            x[1][0] * y[0][0] + x[1][1] * y[1][0],
            x[1][0] * y[0][1] + x[1][1] * y[1][1],
        ],
    ]
}

/// Product of the generator matrices in word order.
pub fn gamma13_matrix(w: &GammaWord) -> Mat2 {
    w.0.iter().fold([[1, 0], [0, 1]], |acc, l| mat2_mul(&acc, &l.matrix()))
}

/// Membership in Γ₁(3): determinant 1, `a ≡ d ≡ 1` and `c ≡ 0 (mod 3)`.
pub fn in_gamma1_3(m: &Mat2) -> bool {
    m[0][0] * m[1][1] - m[0][1] * m[1][0] == 1
        && m[0][0].rem_euclid(3) == 1
        && m[1][1].rem_euclid(3) == 1
        && m[1][0].rem_euclid(3) == 0
}

/// Letters of B₃ together with the rotation `r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BraidLetter {
    Tau { j: u8, inverse: bool },
    R,
}

/// Word over `{τ₀^{±1}, τ₁^{±1}, τ₂^{±1}, r}`.
///
/// Syntax: `t0 t1' t2 r`, with `'` for inverses; `r'` is shorthand for
/// `r r`. Whitespace is optional. The word acts as a group element, so the
/// rightmost letter is applied first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BraidWord(pub Vec<BraidLetter>);

impl FromStr for BraidWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut out = Vec::new();
        let mut chars = s.chars().filter(|c| !c.is_whitespace()).peekable();
        while let Some(ch) = chars.next() {
            match ch {
                't' => {
                    let j = match chars.next() {
                        Some(d @ '0'..='2') => d as u8 - b'0',
                        other => {
                            return Err(Error::Parse(format!(
                                "expected index 0, 1 or 2 after 't', found {other:?}"
                            )))
                        }
                    };
                    let inverse = chars.next_if_eq(&'\'').is_some();
                    out.push(BraidLetter::Tau { j, inverse });
                }
                'r' => {
                    out.push(BraidLetter::R);
                    if chars.next_if_eq(&'\'').is_some() {
                        out.push(BraidLetter::R);
                    }
                }
                other => return Err(Error::Parse(format!("unexpected character {other:?}"))),
            }
        }
        Ok(BraidWord(out))
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|l| match l {
                BraidLetter::Tau { j, inverse: false } => format!("t{j}"),
                BraidLetter::Tau { j, inverse: true } => format!("t{j}'"),
                BraidLetter::R => "r".to_string(),
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Ordered triple `(K₀, K₁, K₂)` of K-classes, optionally with the P²
/// bundles `(E₀, E₁, E₂)` such that `(K₀, K₁, K₂) = (E₂, −E₁, E₀)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CollectionTriple {
    pub classes: [ChernClass; 3],
    pub bundle_data: Option<[ChernClass; 3]>,
}

fn is_exceptional_class(e: ChernClass) -> bool {
    euler_twice(e, e) == 2
}

fn is_exceptional_collection(e: &[ChernClass; 3]) -> bool {
    e.iter().all(|&x| x.r > 0 && is_exceptional_class(x))
        && (0..3).all(|i| (i + 1..3).all(|j| euler_twice(e[j], e[i]) == 0))
}

impl CollectionTriple {
    /// `𝔈₁ = (O(−1), Ω(1), O)`.
    pub fn standard() -> Self {
        let omega1 = ChernClass::from_twice(2, -1, -1);
        Self::from_bundles([ch_line_bundle(-1), omega1, ch_line_bundle(0)]).expect("standard collection is exceptional")
    }

    /// Triple attached to an exceptional collection `(E₀, E₁, E₂)` on P².
    pub fn from_bundles(e: [ChernClass; 3]) -> Result<Self> {
        if !is_exceptional_collection(&e) {
            return invalid("not an exceptional collection of positive-rank classes");
        }
        Ok(CollectionTriple {
            classes: [e[2], -e[1], e[0]],
            bundle_data: Some(e),
        })
    }

    /// Triple of bare classes, recovering bundle data where possible: each
    /// class is normalised to positive rank and the result is kept when it
    /// is an exceptional collection.
    pub fn from_classes(classes: [ChernClass; 3]) -> Self {
        let bundle_data = if classes.iter().any(|k| k.r == 0) {
            None
        } else {
            let e = [
                classes[2].positive_rank(),
                classes[1].positive_rank(),
                classes[0].positive_rank(),
            ];
            is_exceptional_collection(&e).then_some(e)
        };
        CollectionTriple { classes, bundle_data }
    }
}

fn apply_letter(l: BraidLetter, s: [ChernClass; 3]) -> [ChernClass; 3] {
    match l {
        BraidLetter::R => [s[2], s[0], s[1]],
        BraidLetter::Tau { j, inverse } => {
            let hi = j as usize;
            let lo = (hi + 2) % 3;
            let mut t = s;
            if inverse {
                let sj = -s[lo];
                t[hi] = sj;
                t[lo] = spherical_twist_inv_k(sj, s[hi]);
            } else {
                t[lo] = -s[hi];
                t[hi] = spherical_twist_k(s[hi], s[lo]);
            }
            t
        }
    }
}

/// K-level action of a braid word; the rightmost letter acts first.
pub fn braid_act(g: &BraidWord, t: &CollectionTriple) -> CollectionTriple {
    let classes = g.0.iter().rev().fold(t.classes, |acc, &l| apply_letter(l, acc));
    CollectionTriple::from_classes(classes)
}

/// Generators `t0 t1 t2 t0' t1' t2' r` in the order used by [`braid_orbit`].
pub const BRAID_GENERATORS: [BraidLetter; 7] = [
    BraidLetter::Tau { j: 0, inverse: false },
    BraidLetter::Tau { j: 1, inverse: false },
    BraidLetter::Tau { j: 2, inverse: false },
    BraidLetter::Tau { j: 0, inverse: true },
    BraidLetter::Tau { j: 1, inverse: true },
    BraidLetter::Tau { j: 2, inverse: true },
    BraidLetter::R,
];

/// Distinct triples reachable from `start` by words of length `≤ max_len`,
/// in breadth-first order, each with the first word found for it.
pub fn braid_orbit(start: &CollectionTriple, max_len: usize) -> Vec<(BraidWord, CollectionTriple)> {
    let mut seen = std::collections::HashSet::new();
    seen.insert(start.classes);
    let mut out = vec![(BraidWord(Vec::new()), start.clone())];
    let mut frontier = 0;
    for _ in 0..max_len {
        let end = out.len();
        for k in frontier..end {
            for &l in &BRAID_GENERATORS {
                let classes = apply_letter(l, out[k].1.classes);
                if seen.insert(classes) {
                    let mut word = vec![l];
                    word.extend_from_slice(&out[k].0 .0);
                    out.push((BraidWord(word), CollectionTriple::from_classes(classes)));
                }
            }
        }
        frontier = end;
    }
    out
}
