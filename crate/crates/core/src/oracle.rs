//! Brute-force numerical references: sampled correlation clouds, local
//! ascent over encoding frames, and a direct search for the farthest point
//! of an ellipsoid cross-section.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{canonicalize_d2, spectral_pairs, to_affine, ChannelSpec, D2Canonical, LinearChannel};
use crate::correlation::Correlation;
use crate::error::{Error, Result};
use crate::numerics::{positive_part_projector, trace_norm, CMatrix, C64};
use crate::sampling::{haar_state, haar_unitary, random_effect, random_hermitian, rng_from, sub_seed, unitary_exp};
use crate::witness::{crossing_omegas, gamma_kinks, helstrom, Witness};

/// Points drawn per independently seeded chunk.
const CHUNK: usize = 1024;
/// Evenly spaced witness weights in the boundary sweep.
pub const SWEEP_GRID: usize = 401;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleMode {
    /// Haar-random pure pairs and random binary measurements.
    Random,
    /// Orthonormal pairs measured with the optimal Helstrom projector over an ω sweep.
    Boundary,
}

impl std::str::FromStr for SampleMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(SampleMode::Random),
            "boundary" => Ok(SampleMode::Boundary),
            other => Err(Error::Parse(format!("unknown sampling mode {other:?}"))),
        }
    }
}

/// Achievable correlations in Cartesian coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleCloud {
    pub points: Vec<(f64, f64)>,
    pub seed: u64,
    pub count: usize,
}

impl SampleCloud {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y\n");
        for (x, y) in &self.points {
            writeln!(out, "{x:.16e},{y:.16e}").unwrap();
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn max_abs_y(&self) -> f64 {
        self.points.iter().map(|p| p.1.abs()).fold(0.0, f64::max)
    }

    /// `max |y| / (1 − |x|)` over points with `|x| < 1 − 1e-9`.
    pub fn max_wedge_ratio(&self) -> f64 {
        self.points
            .iter()
            .filter(|p| p.0.abs() < 1.0 - 1e-9)
            .map(|p| p.1.abs() / (1.0 - p.0.abs()))
            .fold(0.0, f64::max)
    }
}

/// Tuning for the frame ascent.
#[derive(Clone, Copy, Debug)]
pub struct AscentOptions {
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for AscentOptions {
    fn default() -> Self {
        AscentOptions {
            restarts: 20,
            iterations: 200,
            seed: 0,
        }
    }
}

/// Best pair found by [`ascend_pair`].
#[derive(Clone, Debug)]
pub struct PairOptimum {
    pub value: f64,
    pub phi0: Vec<C64>,
    pub phi1: Vec<C64>,
}

/// `½(1 + ‖X(H(ω; ρ₀, ρ₁))‖₁)`: success of the best measurement for a fixed encoding.
pub fn helstrom_success(map: &LinearChannel, omega: f64, rho0: &CMatrix, rho1: &CMatrix) -> f64 {
    let h = helstrom(omega, rho0, rho1).expect("encoding states share a dimension");
    0.5 * (1.0 + trace_norm(&map.apply_linear(&h)).expect("channel images are Hermitian"))
}

/// Discrimination objective for the pure pair `φ₀, φ₁`.
pub fn pair_objective(map: &LinearChannel, omega: f64, phi0: &[C64], phi1: &[C64]) -> f64 {
    helstrom_success(map, omega, &CMatrix::projector(phi0), &CMatrix::projector(phi1))
}

fn frame_objective(map: &LinearChannel, omega: f64, u: &CMatrix) -> f64 {
    pair_objective(map, omega, &u.column(0), &u.column(1))
}

/// Local ascent from one starting frame, rotating it by `exp(iεH)` for
/// random unit Hermitian `H`. Steps grow on success and halve when neither
/// direction helps.
fn ascend_from(map: &LinearChannel, omega: f64, start: CMatrix, iterations: usize, seed: u64) -> (f64, CMatrix) {
    let mut rng = rng_from(seed);
    let d = start.dim();
    let mut u = start;
    let mut best = frame_objective(map, omega, &u);
    let mut step = 0.5;
    for _ in 0..iterations {
        if step < 1e-9 {
            break;
        }
        let h = random_hermitian(d, &mut rng);
        let h = h.scale_real(1.0 / h.frobenius_norm().max(1e-300));
        let mut moved = false;
        for dir in [step, -step] {
            let cand = &u * &unitary_exp(&h, dir);
            let v = frame_objective(map, omega, &cand);
            if v > best {
                best = v;
                u = cand;
                moved = true;
                break;
            }
        }
        step = if moved { (step * 1.5).min(1.0) } else { step * 0.5 };
    }
    (best, u)
}

/// Multi-start ascent over orthonormal pure pairs. Restart 0 starts from the
/// computational basis, the others from Haar-random frames.
pub fn ascend_pair(spec: &ChannelSpec, omega: f64, opts: AscentOptions) -> Result<PairOptimum> {
    let d = spec.input_dim();
    if d < 2 {
        return Err(Error::Unsupported("discrimination needs input dimension at least 2".into()));
    }
    let map = spec.compile()?;
    let restarts = opts.restarts.max(1);
    let runs: Vec<(f64, CMatrix)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let s = sub_seed(opts.seed, r as u64);
            let start = if r == 0 {
                CMatrix::identity(d)
            } else {
                haar_unitary(d, &mut rng_from(s))
            };
            ascend_from(&map, omega, start, opts.iterations, sub_seed(s, 1))
        })
        .collect();
    let (value, u) = runs
        .into_iter()
        .reduce(|a, b| if b.0 > a.0 { b } else { a })
        .unwrap();
    Ok(PairOptimum {
        value,
        phi0: u.column(0),
        phi1: u.column(1),
    })
}

/// Numerical witness threshold over orthonormal pure encodings.
pub fn numeric_threshold(spec: &ChannelSpec, w: &Witness, restarts: usize, seed: u64) -> Result<f64> {
    if spec.input_dim() < 2 {
        // a single input state cannot carry information
        return Ok(0.5 * (1.0 + w.omega.abs()));
    }
    let opts = AscentOptions {
        restarts,
        seed,
        ..AscentOptions::default()
    };
    Ok(ascend_pair(spec, w.omega, opts)?.value)
}

/// Weights where the boundary bends for the supported closed-form families.
fn sweep_critical_points(spec: &ChannelSpec) -> Vec<f64> {
    let mut out = Vec::new();
    if let Ok(sp) = spectral_pairs(spec) {
        for g in gamma_kinks(&sp) {
            out.push(g);
            out.push(-g);
        }
    } else if spec.input_dim() == 2 && spec.output_dim() == 2 {
        if let Ok(aff) = to_affine(spec) {
            let can = canonicalize_d2(&aff);
            if can.check_conventions().is_ok() {
                for w in crossing_omegas(&can) {
                    out.push(w);
                    out.push(-w);
                }
            }
        }
    }
    out.retain(|w| w.abs() <= 1.0);
    out
}

/// The ordered ω sweep: kinks and crossings, then 0 and ±1, then an even grid.
pub fn omega_sweep(spec: &ChannelSpec) -> Vec<f64> {
    let mut out = sweep_critical_points(spec);
    out.extend([0.0, 1.0, -1.0]);
    out.extend((0..SWEEP_GRID).map(|k| -1.0 + 2.0 * k as f64 / (SWEEP_GRID - 1) as f64));
    out
}

fn correlation_point(map: &LinearChannel, rho0: &CMatrix, rho1: &CMatrix, effect: &CMatrix) -> (f64, f64) {
    let p11 = map.apply_linear(rho0).trace_product_re(effect);
    let p12 = map.apply_linear(rho1).trace_product_re(effect);
    (p11 + p12 - 1.0, p11 - p12)
}

fn helstrom_point(map: &LinearChannel, omega: f64, phi0: &[C64], phi1: &[C64]) -> (f64, f64) {
    let r0 = CMatrix::projector(phi0);
    let r1 = CMatrix::projector(phi1);
    let h = helstrom(omega, &r0, &r1).expect("same dimension");
    let effect = positive_part_projector(&map.apply_linear(&h)).expect("Hermitian image");
    correlation_point(map, &r0, &r1, &effect)
}

/// Samples achievable 2×2 correlations.
///
/// Deterministic for a given seed regardless of thread count: work is split
/// into fixed-size chunks, each with its own sub-seed.
pub fn sample_correlations(spec: &ChannelSpec, count: usize, seed: u64, mode: SampleMode) -> Result<SampleCloud> {
    if count == 0 {
        return Err(Error::Parse("sample count must be at least 1".into()));
    }
    let map = spec.compile()?;
    let d_in = spec.input_dim();
    let d_out = spec.output_dim();
    let points = match mode {
        SampleMode::Random => {
            let chunks = count.div_ceil(CHUNK);
            let per_chunk: Vec<Vec<(f64, f64)>> = (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let mut rng = rng_from(sub_seed(seed, c as u64));
                    let n = CHUNK.min(count - c * CHUNK);
                    (0..n)
                        .map(|_| {
                            let r0 = CMatrix::projector(&haar_state(d_in, &mut rng));
                            let r1 = CMatrix::projector(&haar_state(d_in, &mut rng));
                            let e = random_effect(d_out, &mut rng);
                            correlation_point(&map, &r0, &r1, &e)
                        })
                        .collect()
                })
                .collect();
            per_chunk.into_iter().flatten().collect()
        }
        SampleMode::Boundary => {
            if d_in < 2 {
                vec![(1.0, 0.0), (-1.0, 0.0)].into_iter().cycle().take(count).collect()
            } else {
                boundary_points(spec, &map, count, seed)?
            }
        }
    };
    Ok(SampleCloud { points, seed, count })
}

fn boundary_points(spec: &ChannelSpec, map: &LinearChannel, count: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    let sweep = omega_sweep(spec);
    let pairs = count.div_ceil(2);
    let d_in = spec.input_dim();
    let optimized = pairs.min(sweep.len());
    let opts = |k: usize| AscentOptions {
        restarts: 4,
        iterations: 200,
        seed: sub_seed(seed, k as u64),
    };
    let raw: Vec<Result<[(f64, f64); 2]>> = (0..pairs)
        .into_par_iter()
        .map(|k| {
            let omega = sweep[k % sweep.len()];
            let (phi0, phi1) = if k < optimized {
                let best = ascend_pair(spec, omega, opts(k))?;
                (best.phi0, best.phi1)
            } else {
                let mut rng = rng_from(sub_seed(seed ^ 0x5EED, k as u64));
                let u = haar_unitary(d_in, &mut rng);
                (u.column(0), u.column(1))
            };
            let (x, y) = helstrom_point(map, omega, &phi0, &phi1);
            Ok([(x, y), (-x, -y)])
        })
        .collect();
    let mut out = Vec::with_capacity(count);
    for r in raw {
        out.extend(r?);
    }
    out.truncate(count);
    Ok(out)
}

/// Distance from `ωc` to the point of the ellipse section at height `z`.
fn section_distance(can: &D2Canonical, omega: f64, z: f64) -> f64 {
    let r = if can.d3 > 0.0 { 1.0 - (z / can.d3).powi(2) } else { 1.0 };
    (can.d2 * can.d2 * r.max(0.0) + (z - omega * can.c3).powi(2)).sqrt()
}

/// Golden-section maximization of a unimodal function on `[lo, hi]`.
pub fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > tol {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = f(a);
        }
    }
    let candidates = [(lo, f(lo)), (hi, f(hi)), (a, fa), (b, fb)];
    candidates
        .into_iter()
        .reduce(|p, q| if q.1 > p.1 { q } else { p })
        .unwrap()
}

/// Farthest distance by scanning the section height `z ∈ [−d3, d3]` on a
/// grid and refining the best cell by golden-section search.
pub fn numeric_delta(can: &D2Canonical, omega: f64, grid: usize) -> f64 {
    if can.d3 == 0.0 {
        return section_distance(can, omega, 0.0);
    }
    let grid = grid.max(2);
    let z_at = |k: usize| -can.d3 + 2.0 * can.d3 * k as f64 / grid as f64;
    let best_k = (0..=grid)
        .max_by(|&i, &j| {
            section_distance(can, omega, z_at(i)).total_cmp(&section_distance(can, omega, z_at(j)))
        })
        .unwrap();
    let lo = z_at(best_k.saturating_sub(1));
    let hi = z_at((best_k + 1).min(grid));
    golden_max(|z| section_distance(can, omega, z), lo, hi, 1e-13).1
}

/// `((√(p11 p22) − √(p12 p21))², (√(p11 p22) + √(p12 p21))²)` with `p12 = p(1|2)`.
pub fn amp_damp_roots(p: &Correlation) -> Result<(f64, f64)> {
    p.require_binary()?;
    let diag = (p.get(0, 0) * p.get(1, 1)).max(0.0).sqrt();
    let off = (p.get(1, 0) * p.get(0, 1)).max(0.0).sqrt();
    Ok(((diag - off).powi(2), (diag + off).powi(2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::random_mixed_state;
    use crate::witness::delta_closed;
    use rand::Rng;

    #[test]
    fn identity_reaches_perfect_corners() {
        let cloud = sample_correlations(&ChannelSpec::identity(2).unwrap(), 500, 1, SampleMode::Boundary).unwrap();
        for target in [(0.0, 1.0), (0.0, -1.0)] {
            let closest = cloud
                .points
                .iter()
                .map(|p| ((p.0 - target.0).powi(2) + (p.1 - target.1).powi(2)).sqrt())
                .fold(f64::INFINITY, f64::min);
            assert!(closest < 1e-6, "{closest}");
        }
    }

    #[test]
    fn trace_class_points_lie_on_segment() {
        for mode in [SampleMode::Random, SampleMode::Boundary] {
            let cloud = sample_correlations(&ChannelSpec::trace_class(2).unwrap(), 300, 2, mode).unwrap();
            assert!(cloud.points.iter().all(|p| p.1.abs() < 1e-9));
        }
    }

    #[test]
    fn cloning_boundary_reaches_bound() {
        let cloud = sample_correlations(&ChannelSpec::cloning(2).unwrap(), 10_000, 3, SampleMode::Boundary).unwrap();
        assert!((cloud.max_abs_y() - 2.0 / 3.0).abs() < 1e-3);
    }

    #[test]
    fn clouds_stay_in_square_and_repeat() {
        let spec = ChannelSpec::amp_damp(0.4).unwrap();
        for mode in [SampleMode::Random, SampleMode::Boundary] {
            let a = sample_correlations(&spec, 2000, 9, mode).unwrap();
            let b = sample_correlations(&spec, 2000, 9, mode).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.points.len(), 2000);
            assert!(a.points.iter().all(|p| p.0.abs() + p.1.abs() <= 1.0 + 1e-9));
        }
    }

    #[test]
    fn numeric_threshold_examples() {
        let id = numeric_threshold(&ChannelSpec::identity(2).unwrap(), &Witness::plus(0.0), 4, 1).unwrap();
        assert!((id - 1.0).abs() < 1e-9);
        let dep = numeric_threshold(&ChannelSpec::depolarizing(2, 0.5).unwrap(), &Witness::plus(0.0), 4, 1).unwrap();
        assert!((dep - 0.75).abs() < 1e-6);
        let amp = numeric_threshold(&ChannelSpec::amp_damp(0.36).unwrap(), &Witness::plus(0.0), 20, 1).unwrap();
        assert!((amp - 0.8).abs() < 1e-4, "{amp}");
    }

    #[test]
    fn numeric_delta_examples() {
        let flat = D2Canonical::from_parts(0.0, 0.5, 0.8, 0.0);
        assert!((numeric_delta(&flat, 0.3, 200) - 0.8).abs() < 1e-12);
        let sphere = D2Canonical::from_parts(0.5, 0.5, 0.5, 0.2);
        assert!((numeric_delta(&sphere, 0.5, 200) - 0.6).abs() < 1e-12);
        let wide = D2Canonical::from_parts(0.1, 0.9, 0.4, 0.3);
        assert!((numeric_delta(&wide, 0.0, 200) - 0.9).abs() < 1e-12);
    }

    #[test]
    fn numeric_delta_agrees_with_closed_form() {
        let mut rng = rng_from(17);
        let mut worst: f64 = 0.0;
        for _ in 0..200 {
            let c3: f64 = if rng.random_bool(0.1) { 0.0 } else { rng.random_range(0.0..1.0) };
            let d2: f64 = rng.random_range(0.0..1.0);
            let d3: f64 = if c3 == 0.0 { rng.random_range(d2..=1.0) } else { rng.random_range(0.0..1.0) };
            let can = D2Canonical::from_parts(0.0, d2, d3, c3);
            for _ in 0..50 {
                let omega: f64 = rng.random_range(-1.0..=1.0);
                worst = worst.max((numeric_delta(&can, omega, 64) - delta_closed(omega, &can).unwrap()).abs());
            }
        }
        assert!(worst <= 1e-10, "{worst}");
    }

    #[test]
    fn roots_examples() {
        let (lm, lp) = amp_damp_roots(&Correlation::binary(0.5, 0.5, 0.5, 0.5).unwrap()).unwrap();
        assert!(lm.abs() < 1e-15 && (lp - 1.0).abs() < 1e-15);
        let (lm, lp) = amp_damp_roots(&Correlation::binary(1.0, 0.0, 0.0, 1.0).unwrap()).unwrap();
        assert_eq!((lm, lp), (1.0, 1.0));
        let (lm, _) = amp_damp_roots(&Correlation::binary(1.0, 0.0, 1.0, 0.0).unwrap()).unwrap();
        assert_eq!(lm, 0.0);
    }

    #[test]
    fn upper_root_dominates_distance_from_perfect() {
        let mut rng = rng_from(23);
        for _ in 0..10_000 {
            let x: f64 = rng.random_range(-1.0..1.0);
            let y: f64 = rng.random_range(-1.0..1.0);
            if (x + y).abs() > 1.0 || (x - y).abs() > 1.0 {
                continue;
            }
            let p = Correlation::from_xy(x, y).unwrap();
            let (_, lp) = amp_damp_roots(&p).unwrap();
            assert!(1.0 - x.abs() <= lp + 1e-12);
        }
    }

    #[test]
    fn pure_orthonormal_pairs_beat_mixed_pairs() {
        let mut rng = rng_from(99);
        for _ in 0..5 {
            let kraus = crate::sampling::random_kraus(2, 2, 2, &mut rng);
            let spec = ChannelSpec::custom_kraus(kraus).unwrap();
            let map = spec.compile().unwrap();
            let omega: f64 = rng.random_range(-1.0..1.0);
            let pure = numeric_threshold(&spec, &Witness::plus(omega), 8, 5).unwrap();
            let mixed = (0..2000)
                .map(|_| {
                    let r0 = random_mixed_state(2, &mut rng);
                    let r1 = random_mixed_state(2, &mut rng);
                    helstrom_success(&map, omega, &r0, &r1)
                })
                .fold(0.0, f64::max);
            assert!(pure >= mixed - 1e-7, "pure {pure} mixed {mixed}");
        }
    }

    #[test]
    fn golden_section_finds_interior_and_edge_maxima() {
        let (x, v) = golden_max(|t| -(t - 0.3).powi(2), -1.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-6 && v.abs() < 1e-12);
        let (x, _) = golden_max(|t| t, -1.0, 1.0, 1e-12);
        assert!((x - 1.0).abs() < 1e-12);
    }

    #[test]
    fn csv_has_header_and_full_precision() {
        let cloud = SampleCloud {
            points: vec![(0.1, -0.2)],
            seed: 0,
            count: 1,
        };
        let csv = cloud.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("x,y"));
        let row = lines.next().unwrap();
        let parsed: Vec<f64> = row.split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(parsed, vec![0.1, -0.2]);
    }
}
