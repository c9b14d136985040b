//! Binary witnesses, Helstrom matrices and closed-form witness thresholds.
//!
//! For a 2×2 correlation with Cartesian coordinates `(x, y)` the diagonal
//! witness scores `½(1 + y + ωx)` and the anti-diagonal one `½(1 − y − ωx)`.
//! Every threshold here has the form `½(1 + N(ω))` for a channel-dependent
//! discrimination norm `N`; it does not depend on the witness sign.

use serde::Serialize;

use crate::channels::{D2Canonical, SpectralPairs};
use crate::correlation::Correlation;
use crate::error::{Error, Result};
use crate::numerics::{CMatrix, Vec3};

/// Tolerance used to accept a root of `|ω| = Δ(ω)`.
const CROSSING_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Sign {
    /// Diagonal witness, rewarding `j = i`.
    Plus,
    /// Anti-diagonal witness, rewarding `j ≠ i`.
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text.trim() {
            "+" | "plus" | "+1" => Ok(Sign::Plus),
            "-" | "−" | "minus" | "-1" => Ok(Sign::Minus),
            other => Err(Error::Parse(format!("witness sign must be + or -, got {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub sign: Sign,
    pub omega: f64,
}

impl Witness {
    pub fn new(sign: Sign, omega: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&omega) {
            return Err(Error::Parse(format!("witness weight ω = {omega} must lie in [-1, 1]")));
        }
        Ok(Witness { sign, omega })
    }

    pub fn plus(omega: f64) -> Self {
        Witness {
            sign: Sign::Plus,
            omega: omega.clamp(-1.0, 1.0),
        }
    }

    pub fn minus(omega: f64) -> Self {
        Witness {
            sign: Sign::Minus,
            omega: omega.clamp(-1.0, 1.0),
        }
    }

    /// Entries `w[i][j]` (input `i`, output `j`).
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        let hi = (1.0 + self.omega) / 2.0;
        let lo = (1.0 - self.omega) / 2.0;
        match self.sign {
            Sign::Plus => [[hi, 0.0], [0.0, lo]],
            Sign::Minus => [[0.0, hi], [lo, 0.0]],
        }
    }

    pub fn matrix_rows(&self) -> Vec<Vec<f64>> {
        self.matrix().iter().map(|r| r.to_vec()).collect()
    }

    /// `p·w`.
    pub fn score(&self, p: &Correlation) -> f64 {
        let (x, y) = p.xy();
        self.score_xy(x, y)
    }

    pub fn score_xy(&self, x: f64, y: f64) -> f64 {
        0.5 * (1.0 + self.sign.factor() * (y + self.omega * x))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Ignore the channel and always guess the heavier outcome.
    TrivialGuess,
    /// Send an orthonormal pair and measure the positive part of the Helstrom image.
    Helstrom,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThresholdResult {
    pub value: f64,
    pub strategy: Strategy,
    /// Bloch vector of the first encoding state; the second is its antipode.
    pub optimal_bloch: Option<Vec3>,
}

impl ThresholdResult {
    /// `½(1 + max(|ω|, norm))`.
    pub fn from_norm(omega: f64, norm: f64, optimal_bloch: Option<Vec3>) -> Self {
        let trivial = omega.abs() >= norm;
        ThresholdResult {
            value: 0.5 * (1.0 + omega.abs().max(norm)),
            strategy: if trivial {
                Strategy::TrivialGuess
            } else {
                Strategy::Helstrom
            },
            optimal_bloch: if trivial { None } else { optimal_bloch },
        }
    }
}

/// `(1+ω)/2 ρ₀ − (1−ω)/2 ρ₁`.
pub fn helstrom(omega: f64, rho0: &CMatrix, rho1: &CMatrix) -> Result<CMatrix> {
    if rho0.rows() != rho1.rows() || rho0.cols() != rho1.cols() {
        return Err(Error::DimensionMismatch {
            expected: rho0.rows(),
            found: rho1.rows(),
        });
    }
    if !(-1.0..=1.0).contains(&omega) {
        return Err(Error::Parse(format!("ω = {omega} must lie in [-1, 1]")));
    }
    Ok(&rho0.scale_real((1.0 + omega) / 2.0) - &rho1.scale_real((1.0 - omega) / 2.0))
}

fn gap(can: &D2Canonical) -> f64 {
    can.d2 * can.d2 - can.d3 * can.d3
}

/// Whether the curved branch of the farthest-point problem is active.
fn on_curved_branch(omega: f64, can: &D2Canonical) -> bool {
    let k = gap(can);
    can.c3 > 0.0 && k > 0.0 && (can.d3 == 0.0 || omega.abs() < k / (can.d3 * can.c3))
}

/// Largest distance from `ω c` to the canonical output ellipsoid.
pub fn delta_closed(omega: f64, can: &D2Canonical) -> Result<f64> {
    can.check_conventions()?;
    Ok(delta_unchecked(omega, can))
}

pub(crate) fn delta_unchecked(omega: f64, can: &D2Canonical) -> f64 {
    if can.c3 == 0.0 {
        return can.d2.max(can.d3);
    }
    if on_curved_branch(omega, can) {
        can.d2 * (1.0 + can.c3 * can.c3 * omega * omega / gap(can)).sqrt()
    } else {
        can.d3 + can.c3 * omega.abs()
    }
}

/// Point `y` of the canonical ellipsoid attaining the largest distance.
pub fn farthest_ellipsoid_point(omega: f64, can: &D2Canonical) -> Vec3 {
    if can.c3 == 0.0 && can.d2 > can.d3 {
        return [0.0, can.d2, 0.0];
    }
    if on_curved_branch(omega, can) {
        let k = gap(can);
        let t = can.c3 * can.d3 * omega / k;
        let y2 = can.d2 * (1.0 - t * t).max(0.0).sqrt();
        let y3 = can.c3 * can.d3 * can.d3 * omega / (can.d3 * can.d3 - can.d2 * can.d2);
        [0.0, y2, y3]
    } else {
        let s = if omega < 0.0 { 1.0 } else { -1.0 };
        [0.0, 0.0, s * can.d3]
    }
}

/// Threshold of a D2-covariant qubit channel.
pub fn qubit_threshold(can: &D2Canonical, w: &Witness) -> Result<ThresholdResult> {
    let delta = delta_closed(w.omega, can)?;
    let y = farthest_ellipsoid_point(w.omega, can);
    Ok(ThresholdResult::from_norm(w.omega, delta, Some(can.input_bloch_for(&y))))
}

/// Threshold of a universally covariant channel: `½(1 + Σ|α_k ω + β_k|)`.
pub fn covariant_threshold(sp: &SpectralPairs, w: &Witness) -> ThresholdResult {
    let norm = sp.helstrom_norm(w.omega);
    let mut r = ThresholdResult::from_norm(w.omega, norm, None);
    r.value = 0.5 * (1.0 + norm);
    r
}

/// `β_k/α_k` for every non-degenerate pair, restricted to `[−1, 1]`.
pub fn gamma_kinks(sp: &SpectralPairs) -> Vec<f64> {
    sp.pairs()
        .filter(|(a, _)| a.abs() > 1e-12)
        .map(|(a, b)| b / a)
        .filter(|g| (-1.0 - 1e-12..=1.0 + 1e-12).contains(g))
        .map(|g| g.clamp(-1.0, 1.0))
        .collect()
}

/// Candidate `ω` at which the curved and linear pieces meet, for one slope sign.
pub fn tangent_omega(can: &D2Canonical, slope: f64) -> Option<f64> {
    if can.c3 == 0.0 {
        return None;
    }
    let k = gap(can);
    let radicand = can.c3 * can.c3 * can.d2 * can.d2 - k * slope * slope;
    if radicand <= 0.0 {
        return None;
    }
    let w = k * slope / (can.c3 * radicand.sqrt());
    w.is_finite().then_some(w)
}

/// Positive solutions of `ω = Δ(ω)`, where trivial guessing stops losing.
pub fn crossing_omegas(can: &D2Canonical) -> Vec<f64> {
    if can.c3 == 0.0 {
        return vec![can.d2.max(can.d3)];
    }
    let k = gap(can);
    let d2sq = can.d2 * can.d2;
    let mut candidates = Vec::new();
    if k > d2sq * can.c3 * can.c3 {
        candidates.push((d2sq * k / (k - d2sq * can.c3 * can.c3)).sqrt());
    }
    if can.c3 < 1.0 {
        candidates.push(can.d3 / (1.0 - can.c3));
    }
    candidates
        .into_iter()
        .filter(|w| w.is_finite() && (w - delta_unchecked(*w, can)).abs() <= CROSSING_TOL)
        .collect()
}

/// The crossing point chosen by the textbook case split on `d2² − d3²`
/// against `d2² c3`. Kept for comparison with [`crossing_omegas`].
pub fn crossing_omega_by_case_split(can: &D2Canonical) -> Option<f64> {
    let k = gap(can);
    let d2sq = can.d2 * can.d2;
    if k > d2sq * can.c3 {
        let den = k - d2sq * can.c3 * can.c3;
        (den > 0.0).then(|| (d2sq * k / den).sqrt())
    } else if can.c3 < 1.0 {
        Some(can.d3 / (1.0 - can.c3))
    } else {
        None
    }
}

/// The finite set of witness weights that decides membership for a
/// D2-covariant qubit channel: `0`, `±1`, the tangent points for both slope
/// signs and the crossings `±ω` with `|ω| = Δ(ω)`.
pub fn critical_omegas(can: &D2Canonical, p: &Correlation) -> Result<Vec<f64>> {
    can.check_conventions()?;
    p.require_binary()?;
    let (x, _) = p.xy();
    let mut out = vec![0.0, 1.0, -1.0];
    for s in [x, -x] {
        out.extend(tangent_omega(can, s));
    }
    for w in crossing_omegas(can) {
        out.push(w);
        out.push(-w);
    }
    Ok(normalize_omegas(out))
}

/// Drops values outside `[−1, 1]` and duplicates, sorted ascending.
pub fn normalize_omegas(mut v: Vec<f64>) -> Vec<f64> {
    v.retain(|w| w.is_finite() && w.abs() <= 1.0 + 1e-12);
    for w in v.iter_mut() {
        *w = w.clamp(-1.0, 1.0) + 0.0;
    }
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    v
}
