//! Membership decisions for observed correlations.
//!
//! A 2×2 correlation `(x, y)` is compatible with a channel iff
//! `±(y + ωx) ≤ N(ω)` for every `ω ∈ [−1, 1]`, where `½(1 + N(ω))` is the
//! witness threshold. Each [`ThresholdModel`] supplies `N` and a finite set
//! of weights that is enough to decide membership.

use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{canonicalize_d2, spectral_pairs, to_affine, ChannelSpec, D2Canonical, Family, SpectralPairs};
use crate::correlation::Correlation;
use crate::error::{Error, Result};
use crate::oracle::numeric_threshold;
use crate::polytope::{fw_vertices, hull_membership, trace_class_vertices, Membership};
use crate::witness::{
    covariant_threshold, critical_omegas, delta_unchecked, gamma_kinks, normalize_omegas, qubit_threshold, Sign,
    ThresholdResult, Witness,
};

/// A correlation is compatible when its margin is at most this.
pub const COMPAT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub compatible: bool,
    /// Largest `p·w − W` over the witnesses tested; `≤ COMPAT_TOL` iff compatible.
    pub margin: f64,
    /// Binary witness attaining the margin, when one was tested.
    pub worst_witness: Option<Witness>,
    /// Separating witness for general `m × n` correlations.
    pub certificate: Option<Vec<Vec<f64>>>,
}

impl Verdict {
    fn from_margin(margin: f64, worst_witness: Option<Witness>) -> Self {
        Verdict {
            compatible: margin <= COMPAT_TOL,
            margin,
            worst_witness,
            certificate: None,
        }
    }
}

/// How a channel's discrimination norm `N(ω)` is computed.
#[derive(Clone, Debug)]
pub enum ThresholdModel {
    /// D2-covariant qubit channel in canonical form.
    Qubit(D2Canonical),
    /// Universally covariant channel via its spectral pairs.
    Covariant(SpectralPairs),
    /// Output independent of the input: `N(ω) = |ω|`.
    TraceClass,
    /// Perfect transmission of a bit: `N(ω) = 1`.
    Perfect,
}

impl ThresholdModel {
    pub fn for_channel(spec: &ChannelSpec) -> Result<Self> {
        if spec.input_dim() < 2 {
            return Ok(ThresholdModel::TraceClass);
        }
        match spec.family() {
            Family::Erasure | Family::Depolarizing | Family::Cloning | Family::Transposition => {
                Ok(ThresholdModel::Covariant(spectral_pairs(spec)?))
            }
            Family::Unitary | Family::Dephasing => Ok(ThresholdModel::Perfect),
            Family::TraceClass => Ok(ThresholdModel::TraceClass),
            Family::Pauli | Family::AmpDamp | Family::CustomAffine | Family::CustomKraus => {
                if spec.input_dim() != 2 || spec.output_dim() != 2 {
                    return Err(Error::Unsupported(format!(
                        "no exact threshold for a custom {} → {} channel",
                        spec.input_dim(),
                        spec.output_dim()
                    )));
                }
                let can = canonicalize_d2(&to_affine(spec)?);
                can.check_conventions()?;
                Ok(ThresholdModel::Qubit(can))
            }
        }
    }

    /// `N(ω)`, so that the threshold is `½(1 + N(ω))`.
    pub fn norm(&self, omega: f64) -> f64 {
        let n = match self {
            ThresholdModel::Qubit(can) => delta_unchecked(omega, can),
            ThresholdModel::Covariant(sp) => sp.helstrom_norm(omega),
            ThresholdModel::TraceClass => 0.0,
            ThresholdModel::Perfect => 1.0,
        };
        n.max(omega.abs())
    }

    pub fn threshold(&self, w: &Witness) -> Result<ThresholdResult> {
        match self {
            ThresholdModel::Qubit(can) => qubit_threshold(can, w),
            ThresholdModel::Covariant(sp) => Ok(covariant_threshold(sp, w)),
            _ => Ok(ThresholdResult::from_norm(w.omega, self.norm(w.omega), None)),
        }
    }

    /// Weights that decide membership of `p`.
    pub fn decisive_omegas(&self, p: &Correlation) -> Result<Vec<f64>> {
        p.require_binary()?;
        let mut v = vec![0.0, 1.0, -1.0];
        match self {
            ThresholdModel::Qubit(can) => return critical_omegas(can, p),
            ThresholdModel::Covariant(sp) => {
                for g in gamma_kinks(sp) {
                    v.push(g);
                    v.push(-g);
                }
            }
            ThresholdModel::TraceClass | ThresholdModel::Perfect => {}
        }
        Ok(normalize_omegas(v))
    }

    /// Largest witness margin over the given weights, both signs.
    pub fn evaluate(&self, p: &Correlation, omegas: &[f64]) -> Result<Verdict> {
        p.require_binary()?;
        let (x, y) = p.xy();
        Ok(evaluate_with(x, y, omegas, |w| self.norm(w)))
    }

    pub fn check(&self, p: &Correlation) -> Result<Verdict> {
        self.evaluate(p, &self.decisive_omegas(p)?)
    }
}

fn evaluate_with(x: f64, y: f64, omegas: &[f64], norm: impl Fn(f64) -> f64) -> Verdict {
    let mut best: Option<(f64, Witness)> = None;
    for &omega in omegas {
        let n = norm(omega);
        for sign in [Sign::Plus, Sign::Minus] {
            let m = 0.5 * (sign.factor() * (y + omega * x) - n);
            if best.is_none_or(|(b, _)| m > b) {
                best = Some((m, Witness { sign, omega }));
            }
        }
    }
    let (margin, w) = best.expect("at least one weight");
    Verdict::from_margin(margin, Some(w))
}

/// Membership for a D2-covariant qubit channel from its finite weight set.
pub fn check_qubit_d2(can: &D2Canonical, p: &Correlation) -> Result<Verdict> {
    can.check_conventions()?;
    ThresholdModel::Qubit(*can).check(p)
}

/// Membership for a universally covariant channel: endpoints, `ω = 0` and
/// the kinks `±γ_k`.
pub fn check_covariant(sp: &SpectralPairs, p: &Correlation) -> Result<Verdict> {
    ThresholdModel::Covariant(sp.clone()).check(p)
}

/// Width of the `|y|` band and slope of the `|y| + r|x| ≤ r` wedge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BandWedge {
    pub band: Option<f64>,
    pub wedge: Option<f64>,
}

/// Band and wedge parameters of the families whose regions are polygons.
pub fn band_wedge(spec: &ChannelSpec) -> Option<BandWedge> {
    let bw = |band, wedge| Some(BandWedge { band, wedge });
    match *spec {
        ChannelSpec::Pauli { probs } => {
            let r = (1..4)
                .map(|k| (2.0 * (probs[0] + probs[k]) - 1.0).abs())
                .fold(0.0, f64::max);
            bw(None, Some(r))
        }
        ChannelSpec::Erasure { d, lambda } if d >= 2 => bw(Some(lambda), None),
        ChannelSpec::Cloning { d } if d >= 2 => bw(Some(d as f64 / (d as f64 + 1.0)), None),
        ChannelSpec::Depolarizing { d, lambda } if d >= 2 => {
            let df = d as f64;
            bw(Some(lambda), Some(df * lambda / (2.0 - 2.0 * lambda + df * lambda)))
        }
        ChannelSpec::Transposition { d } if d >= 2 => bw(Some(1.0 / (d as f64 + 1.0)), Some(1.0 / 3.0)),
        _ => None,
    }
}

/// `(√(p12 p21) − √(p11 p22))²` with `p_ji = p(j|i)`.
pub fn amp_damp_statistic(p: &Correlation) -> f64 {
    let off = (p.get(1, 0) * p.get(0, 1)).max(0.0).sqrt();
    let diag = (p.get(0, 0) * p.get(1, 1)).max(0.0).sqrt();
    (off - diag).powi(2)
}

/// Membership from the family's explicit inequalities.
///
/// Margins are in witness units for the polygonal families. For amplitude
/// damping the margin is `statistic − λ` and no witness is reported.
pub fn check_closed_form(spec: &ChannelSpec, p: &Correlation) -> Result<Verdict> {
    p.require_binary()?;
    if let ChannelSpec::AmpDamp { lambda } = *spec {
        return Ok(Verdict::from_margin(amp_damp_statistic(p) - lambda, None));
    }
    let bw = band_wedge(spec).ok_or_else(|| {
        Error::Unsupported(format!("no closed form for family {}", spec.family().name()))
    })?;
    let (x, y) = p.xy();
    let s = if y >= 0.0 { Sign::Plus } else { Sign::Minus };
    let sx = if x >= 0.0 { 1.0 } else { -1.0 };
    let mut best = (f64::NEG_INFINITY, Witness::plus(0.0));
    if let Some(b) = bw.band {
        best = (0.5 * (y.abs() - b), Witness { sign: s, omega: 0.0 });
    }
    if let Some(r) = bw.wedge {
        let m = 0.5 * (y.abs() + r * x.abs() - r);
        if m > best.0 {
            best = (
                m,
                Witness {
                    sign: s,
                    omega: (r * s.factor() * sx).clamp(-1.0, 1.0),
                },
            );
        }
    }
    Ok(Verdict::from_margin(best.0, Some(best.1)))
}

/// Membership for any supported channel and correlation shape.
pub fn check(spec: &ChannelSpec, p: &Correlation) -> Result<Verdict> {
    if p.is_binary() {
        return ThresholdModel::for_channel(spec)?.check(p);
    }
    let vs = match spec.family() {
        _ if spec.input_dim() < 2 => trace_class_vertices(p.inputs(), p.outputs())?,
        Family::TraceClass => trace_class_vertices(p.inputs(), p.outputs())?,
        Family::Unitary | Family::Dephasing => fw_vertices(p.inputs(), p.outputs(), spec.input_dim())?,
        other => {
            return Err(Error::Unsupported(format!(
                "{}×{} correlations are decided only for unitary, dephasing and trace-class channels, not {}",
                p.inputs(),
                p.outputs(),
                other.name()
            )))
        }
    };
    Ok(match hull_membership(&vs, p)? {
        Membership::Inside { .. } => Verdict {
            compatible: true,
            margin: 0.0,
            worst_witness: None,
            certificate: None,
        },
        Membership::Outside { witness, violation } => Verdict {
            compatible: false,
            margin: violation,
            worst_witness: None,
            certificate: Some(witness),
        },
    })
}

/// Scans both witness signs over an even ω grid plus the decisive weights.
///
/// Channels without an exact threshold fall back to the numerical ascent.
pub fn max_violation(spec: &ChannelSpec, p: &Correlation, omega_grid: usize) -> Result<Verdict> {
    p.require_binary()?;
    let steps = omega_grid.max(1);
    let mut omegas: Vec<f64> = (0..=steps).map(|k| -1.0 + 2.0 * k as f64 / steps as f64).collect();
    let (x, y) = p.xy();
    match ThresholdModel::for_channel(spec) {
        Ok(model) => {
            omegas.extend(model.decisive_omegas(p)?);
            Ok(evaluate_with(x, y, &omegas, |w| model.norm(w)))
        }
        Err(Error::Unsupported(_)) | Err(Error::NotD2Covariant { .. }) => {
            let norms: Vec<f64> = omegas
                .par_iter()
                .map(|&w| numeric_threshold(spec, &Witness::plus(w), 8, 0).map(|t| 2.0 * t - 1.0))
                .collect::<Result<_>>()?;
            let lookup = |w: f64| {
                let k = omegas.iter().position(|&o| o == w).expect("weight from grid");
                norms[k]
            };
            Ok(evaluate_with(x, y, &omegas, lookup))
        }
        Err(e) => Err(e),
    }
}

/// A grid point compatible with `b` but not with `a`, if any.
pub fn inclusion_counterexample(a: &ChannelSpec, b: &ChannelSpec, grid: usize) -> Result<Option<(f64, f64)>> {
    let ma = ThresholdModel::for_channel(a)?;
    let mb = ThresholdModel::for_channel(b)?;
    let grid = grid.max(2);
    let coord = |k: usize| -1.0 + 2.0 * k as f64 / (grid - 1) as f64;
    let found = (0..grid)
        .into_par_iter()
        .map(|i| -> Result<Option<(f64, f64)>> {
            let x = coord(i);
            for j in 0..grid {
                let y = coord(j);
                if x.abs() + y.abs() > 1.0 + 1e-12 {
                    continue;
                }
                let p = Correlation::from_xy(x.clamp(-1.0, 1.0), y)?;
                if mb.check(&p)?.compatible && !ma.check(&p)?.compatible {
                    return Ok(Some((x, y)));
                }
            }
            Ok(None)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(found.into_iter().flatten().next())
}

/// Whether every grid correlation achievable through `b` is achievable through `a`.
pub fn region_inclusion(a: &ChannelSpec, b: &ChannelSpec, grid: usize) -> Result<bool> {
    Ok(inclusion_counterexample(a, b, grid)?.is_none())
}
