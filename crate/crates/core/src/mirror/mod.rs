//! Mirror map `z ↦ (a(z), b(z))` of local P² and its verification.
//!
//! Around `z = 0`: `a = ω₁ − 1/2`, `b = −ω₂/2 + ω₁/2 − 1/4`.
//! Around `ψ = 0`, with `z = −1/(27ψ³)` and `2π/3 < arg ψ < 4π/3`:
//! `a = ϖ₁ − 1/2`, `b = (ϖ₁ − ϖ₂ − 1)/3`.

pub mod conifold;
pub mod ode;
pub mod psi;
pub mod series;
pub mod verify;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chamber::ChargeParams;
use crate::error::{Error, Result};

pub use conifold::{conifold_series, conifold_value, ConifoldSeries};
pub use ode::{circle_path, ode_transport, OdeOptions};
pub use psi::{build_psi, PsiTable};
pub use series::{build_series, build_series_exact, ExactSeries, Jet, SeriesTable};

pub const DEFAULT_Z_MAX: f64 = 0.95 / 27.0;
pub const DEFAULT_PSI_MAX: f64 = 0.95;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Chart {
    Z,
    Psi,
}

/// A point of the mirror moduli space in one of the two charts.
///
/// `sheet` selects the branch `ln z + 2πi·sheet` in the z-chart; the
/// ψ-chart series are single valued.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MirrorPoint {
    pub chart: Chart,
    pub coord: Complex64,
    pub sheet: i32,
}

impl MirrorPoint {
    pub fn z(coord: Complex64) -> Self {
        MirrorPoint {
            chart: Chart::Z,
            coord,
            sheet: 0,
        }
    }

    pub fn psi(coord: Complex64) -> Self {
        MirrorPoint {
            chart: Chart::Psi,
            coord,
            sheet: 0,
        }
    }

    pub fn with_sheet(self, sheet: i32) -> Self {
        MirrorPoint { sheet, ..self }
    }
}

/// `z = −1/(27ψ³)`.
pub fn z_from_psi(psi: Complex64) -> Complex64 {
    -1.0 / (psi * psi * psi * 27.0)
}

/// ψ with `|ψ| = (27|z|)^{−1/3}` and `arg ψ = π − arg(z)/3`.
pub fn psi_from_z(z: Complex64) -> Complex64 {
    let arg = series::log_branch(z, 0).im;
    Complex64::from_polar((27.0 * z.norm()).powf(-1.0 / 3.0), PI - arg / 3.0)
}

/// Series tables for both charts together with the chart radii.
#[derive(Clone, Debug)]
pub struct Mirror {
    pub z: SeriesTable,
    pub psi: PsiTable,
    pub z_max: f64,
    pub psi_max: f64,
}

impl Mirror {
    pub fn new(order: usize) -> Result<Self> {
        Ok(Mirror {
            z: build_series(order)?,
            psi: build_psi(order)?,
            z_max: DEFAULT_Z_MAX,
            psi_max: DEFAULT_PSI_MAX,
        })
    }

    pub fn check(&self, pt: &MirrorPoint) -> Result<()> {
        let r = pt.coord.norm();
        match pt.chart {
            Chart::Z if pt.coord == Complex64::new(0.0, 0.0) => Err(Error::Domain("z = 0".into())),
            Chart::Z if !(r <= self.z_max) => Err(Error::Domain(format!("|z| = {r} exceeds {}", self.z_max))),
            Chart::Psi if !(r <= self.psi_max) => Err(Error::Domain(format!("|ψ| = {r} exceeds {}", self.psi_max))),
            _ => Ok(()),
        }
    }

    /// θ_z-jets of `a` and `b` at a point.
    pub fn ab_jets(&self, pt: &MirrorPoint) -> Result<(Jet, Jet)> {
        self.check(pt)?;
        Ok(match pt.chart {
            Chart::Z => self.z.ab_jets(pt.coord, pt.sheet),
            Chart::Psi => {
                let (a, b) = self.psi.ab_jets(pt.coord);
                (psi::psi_jet_to_z(a), psi::psi_jet_to_z(b))
            }
        })
    }

    /// `(a, b)` at a point.
    pub fn mirror_ab(&self, pt: &MirrorPoint) -> Result<ChargeParams> {
        let (a, b) = self.ab_jets(pt)?;
        Ok(ChargeParams::new(a[0], b[0]))
    }
}

/// θ-jet of `ω_k` at `z` (`k ∈ {0, 1, 2}`).
pub fn eval_omega(k: usize, z: Complex64, tbl: &SeriesTable, z_max: f64) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) || !(z.norm() <= z_max) {
        return Err(Error::Domain(format!("z = {z} outside 0 < |z| ≤ {z_max}")));
    }
    if k > 2 {
        return Err(Error::InvalidArgument(format!("ω index {k} not in 0..=2")));
    }
    Ok(tbl.omega_jet(k, z, 0)[0])
}

/// `ϖ_j(ψ)` for `j ∈ {1, 2}` using `order` terms.
pub fn eval_varpi(j: usize, psi: Complex64, order: usize) -> Result<Complex64> {
    if !(1..=2).contains(&j) {
        return Err(Error::InvalidArgument(format!("ϖ index {j} not in 1..=2")));
    }
    Ok(build_psi(order)?.varpi(j, psi))
}

/// Monodromy of `(ω₀, ω₁, ω₂)` around `z = 0` (counterclockwise).
pub fn monodromy_z0(v: [Complex64; 3]) -> [Complex64; 3] {
    [v[0], v[1] + v[0], v[2] + v[1] * 2.0 + v[0]]
}

/// Monodromy of `(1, ϖ₁, ϖ₂)` under `ψ ↦ e^{2πi/3}ψ`.
pub fn monodromy_inf(v: [Complex64; 3]) -> [Complex64; 3] {
    [v[0], v[2], -v[1] - v[2]]
}

/// `(a, b)` from `(ω₁, ω₂)`.
pub fn ab_from_omega(w1: Complex64, w2: Complex64) -> ChargeParams {
    ChargeParams::new(w1 - 0.5, -w2 / 2.0 + w1 / 2.0 - 0.25)
}

/// `(a, b)` from `(ϖ₁, ϖ₂)`.
pub fn ab_from_varpi(v1: Complex64, v2: Complex64) -> ChargeParams {
    ChargeParams::new(v1 - 0.5, (v1 - v2 - 1.0) / 3.0)
}
