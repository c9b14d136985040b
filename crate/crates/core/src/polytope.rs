//! Correlation polytopes of channels whose compatible sets are spanned by
//! deterministic maps, with convex-hull membership by a phase-one simplex.

use crate::correlation::Correlation;
use crate::error::{Error, Result};

/// Upper bound on the number of maps `[m] → [n]` we are willing to enumerate.
pub const ENUMERATION_LIMIT: u128 = 1_000_000;
/// Phase-one objective at or below which the point is accepted.
pub const FEASIBILITY_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-12;

/// Deterministic maps `[m] → [n]`; `maps[k][i]` is the output for input `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexSet {
    pub m: usize,
    pub n: usize,
    pub maps: Vec<Vec<usize>>,
}

impl VertexSet {
    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    /// The `k`-th vertex as a 0/1 correlation matrix.
    pub fn vertex(&self, k: usize) -> Vec<Vec<f64>> {
        self.maps[k]
            .iter()
            .map(|&j| (0..self.n).map(|c| if c == j { 1.0 } else { 0.0 }).collect())
            .collect()
    }

    pub fn vertices(&self) -> Vec<Correlation> {
        (0..self.len())
            .map(|k| Correlation::new(self.vertex(k)).expect("deterministic rows are stochastic"))
            .collect()
    }

    /// `max_q q·w` over the vertices, the threshold of the polytope for witness `w`.
    pub fn max_score(&self, w: &[Vec<f64>]) -> f64 {
        self.maps
            .iter()
            .map(|map| map.iter().enumerate().map(|(i, &j)| w[i][j]).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn check_shape(m: usize, n: usize) -> Result<()> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidCorrelation(format!(
            "need at least one input and one output, got m = {m}, n = {n}"
        )));
    }
    Ok(())
}

/// Deterministic maps whose image has at most `d` elements: the vertices of
/// the correlations achievable through a `d`-level system.
pub fn fw_vertices(m: usize, n: usize, d: usize) -> Result<VertexSet> {
    check_shape(m, n)?;
    if d == 0 {
        return Err(Error::InvalidChannel("dimension must be at least 1".into()));
    }
    let count = (0..m).try_fold(1u128, |acc, _| acc.checked_mul(n as u128));
    match count {
        Some(c) if c <= ENUMERATION_LIMIT => {}
        _ => {
            return Err(Error::EnumerationGuard {
                count: count.unwrap_or(u128::MAX),
                limit: ENUMERATION_LIMIT,
            })
        }
    }
    let mut maps = Vec::new();
    let mut current = vec![0usize; m];
    let mut used = vec![0usize; n];
    loop {
        used.iter_mut().for_each(|u| *u = 0);
        for &j in &current {
            used[j] += 1;
        }
        if used.iter().filter(|&&u| u > 0).count() <= d {
            maps.push(current.clone());
        }
        // odometer increment, last input fastest
        let mut pos = m;
        loop {
            if pos == 0 {
                return Ok(VertexSet { m, n, maps });
            }
            pos -= 1;
            current[pos] += 1;
            if current[pos] < n {
                break;
            }
            current[pos] = 0;
        }
    }
}

/// Constant maps: the vertices of a channel that ignores its input.
pub fn trace_class_vertices(m: usize, n: usize) -> Result<VertexSet> {
    check_shape(m, n)?;
    Ok(VertexSet {
        m,
        n,
        maps: (0..n).map(|j| vec![j; m]).collect(),
    })
}

/// `max_j Σ_i w_ij`.
pub fn trace_class_threshold(w: &[Vec<f64>]) -> f64 {
    let n = w.first().map_or(0, |r| r.len());
    (0..n)
        .map(|j| w.iter().map(|r| r[j]).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Outcome of a hull membership test.
#[derive(Clone, Debug)]
pub enum Membership {
    /// Convex weights over the vertices reproducing the point.
    Inside { weights: Vec<f64> },
    /// A witness `w` with `p·w − max_q q·w = violation > 0`.
    Outside { witness: Vec<Vec<f64>>, violation: f64 },
}

impl Membership {
    pub fn is_inside(&self) -> bool {
        matches!(self, Membership::Inside { .. })
    }
}

/// Decides whether `p` is a convex combination of the vertices.
pub fn hull_membership(vs: &VertexSet, p: &Correlation) -> Result<Membership> {
    if p.inputs() != vs.m || p.outputs() != vs.n {
        return Err(Error::DimensionMismatch {
            expected: vs.m * vs.n,
            found: p.inputs() * p.outputs(),
        });
    }
    let rows = vs.m * vs.n + 1;
    let k = vs.len();
    let mut a = vec![vec![0.0; k]; rows];
    for (col, map) in vs.maps.iter().enumerate() {
        for (i, &j) in map.iter().enumerate() {
            a[i * vs.n + j][col] = 1.0;
        }
        a[rows - 1][col] = 1.0;
    }
    let mut b: Vec<f64> = p.rows().iter().flatten().copied().collect();
    b.push(1.0);

    let sol = phase_one(&a, &b);
    if sol.infeasibility <= FEASIBILITY_TOL {
        let total: f64 = sol.x.iter().sum();
        let weights = sol.x.iter().map(|v| v / total).collect();
        return Ok(Membership::Inside { weights });
    }
    // dual ray: y·A_k ≤ 0 for every vertex while y·b > 0
    let scale = sol.dual[..rows - 1]
        .iter()
        .fold(0.0f64, |s, v| s.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let witness: Vec<Vec<f64>> = (0..vs.m)
        .map(|i| (0..vs.n).map(|j| sol.dual[i * vs.n + j] / scale).collect())
        .collect();
    let violation = p.dot(&witness) - vs.max_score(&witness);
    Ok(Membership::Outside { witness, violation })
}

struct PhaseOne {
    x: Vec<f64>,
    infeasibility: f64,
    dual: Vec<f64>,
}

/// Minimizes the total artificial slack for `A x = b, x ≥ 0` with Bland's rule.
fn phase_one(a: &[Vec<f64>], b: &[f64]) -> PhaseOne {
    let rows = a.len();
    let k = a[0].len();
    let cols = k + rows;
    let mut sign = vec![1.0; rows];
    let mut t = vec![vec![0.0; cols + 1]; rows];
    for r in 0..rows {
        if b[r] < 0.0 {
            sign[r] = -1.0;
        }
        for c in 0..k {
            t[r][c] = sign[r] * a[r][c];
        }
        t[r][k + r] = 1.0;
        t[r][cols] = sign[r] * b[r];
    }
    let cost: Vec<f64> = (0..cols).map(|c| if c < k { 0.0 } else { 1.0 }).collect();
    let mut basis: Vec<usize> = (k..cols).collect();

    let max_iter = 50 * (rows + cols);
    for _ in 0..max_iter {
        let reduced = |c: usize, t: &[Vec<f64>], basis: &[usize]| {
            cost[c] - (0..rows).map(|r| cost[basis[r]] * t[r][c]).sum::<f64>()
        };
        let entering = (0..cols).find(|&c| !basis.contains(&c) && reduced(c, &t, &basis) < -PIVOT_TOL);
        let Some(e) = entering else { break };
        let mut leave: Option<(usize, f64)> = None;
        for r in 0..rows {
            if t[r][e] > PIVOT_TOL {
                let ratio = t[r][cols] / t[r][e];
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((lr, lratio)) => {
                        if ratio < lratio - 1e-15 || (ratio <= lratio + 1e-15 && basis[r] < basis[lr]) {
                            Some((r, ratio))
                        } else {
                            Some((lr, lratio))
                        }
                    }
                };
            }
        }
        let Some((l, _)) = leave else { break };
        let piv = t[l][e];
        for v in t[l].iter_mut() {
            *v /= piv;
        }
        let pivot_row = t[l].clone();
        for (r, row) in t.iter_mut().enumerate() {
            if r != l && row[e] != 0.0 {
                let f = row[e];
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
            }
        }
        basis[l] = e;
    }

    let mut x = vec![0.0; k];
    let mut infeasibility = 0.0;
    for r in 0..rows {
        let val = t[r][cols].max(0.0);
        if basis[r] < k {
            x[basis[r]] = val;
        } else {
            infeasibility += val;
        }
    }
    let dual = (0..rows)
        .map(|r| sign[r] * (0..rows).map(|s| cost[basis[s]] * t[s][k + r]).sum::<f64>())
        .collect();
    PhaseOne {
        x,
        infeasibility,
        dual,
    }
}
