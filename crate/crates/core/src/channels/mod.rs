//! Channel families, their Kraus realizations and evaluation on states.
//!
//! A [`ChannelSpec`] is a validated description of one of the supported
//! families. [`ChannelRecord`] is its JSON wire form (see the README for the
//! schema); [`ChannelSpec::from_record`] performs all invariant checks.

mod affine;
mod spectral;

pub use affine::{bloch_state, bloch_vector, canonicalize_d2, pauli_matrices, to_affine, D2Canonical, QubitAffine};
pub use spectral::{
    commutator_norm, spectral_pairs, spectral_pairs_of, verify_commutativity_preserving, SpectralPairs,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{herm_eig, CMatrix, C64};

/// Tolerance for Kraus completeness `Σ K†K = 𝟙`.
pub const KRAUS_TOL: f64 = 1e-10;
/// Tolerance for probability vectors summing to one.
pub const PROB_SUM_TOL: f64 = 1e-12;
/// Tolerance for validating input density matrices.
pub const STATE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Pauli,
    AmpDamp,
    Erasure,
    Depolarizing,
    Cloning,
    Transposition,
    Unitary,
    Dephasing,
    TraceClass,
    CustomKraus,
    CustomAffine,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Pauli => "pauli",
            Family::AmpDamp => "amp_damp",
            Family::Erasure => "erasure",
            Family::Depolarizing => "depolarizing",
            Family::Cloning => "cloning",
            Family::Transposition => "transposition",
            Family::Unitary => "unitary",
            Family::Dephasing => "dephasing",
            Family::TraceClass => "trace_class",
            Family::CustomKraus => "custom_kraus",
            Family::CustomAffine => "custom_affine",
        }
    }
}

/// A validated channel description.
#[derive(Clone, Debug)]
pub enum ChannelSpec {
    /// `ρ → λ₀ρ + Σ_k λ_k σ_k ρ σ_k`.
    Pauli { probs: [f64; 4] },
    /// Kraus `|0⟩⟨0| + √λ|1⟩⟨1|` and `√(1−λ)|0⟩⟨1|`; `λ = 1` is the identity.
    AmpDamp { lambda: f64 },
    /// `λρ ⊕ (1−λ)|e⟩⟨e|` on a `(d+1)`-dimensional output.
    Erasure { d: usize, lambda: f64 },
    /// `λρ + (1−λ)𝟙/d`.
    Depolarizing { d: usize, lambda: f64 },
    /// Universal optimal 1→2 cloner, `ρ → 2/(d+1) P_S(ρ⊗𝟙)P_S`.
    Cloning { d: usize },
    /// Universal transposer, `ρ → (ρᵀ + 𝟙)/(d+1)`.
    Transposition { d: usize },
    Unitary { u: CMatrix },
    /// `λρ + (1−λ)Σ_k ⟨k|ρ|k⟩|k⟩⟨k|`.
    Dephasing { d: usize, lambda: f64 },
    /// `ρ → σ` with `σ = |s⟩⟨s|`.
    TraceClass { sigma: Vec<C64> },
    CustomKraus { kraus: Vec<CMatrix> },
    CustomAffine(QubitAffine),
}

/// Untagged scalar-or-vector parameter.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum LambdaField {
    Scalar(f64),
    Vector(Vec<f64>),
}

/// JSON form of a channel, e.g. `{"family":"depolarizing","d":3,"lambda":0.5}`.
///
/// Complex entries are `[re, im]` pairs; matrices are lists of rows.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ChannelRecord {
    pub family: Option<Family>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<LambdaField>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_state: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kraus: Option<Vec<Vec<Vec<[f64; 2]>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<[[f64; 3]; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<[f64; 3]>,
}

fn check_unit_interval(name: &str, lambda: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&lambda) || lambda.is_nan() {
        return Err(Error::InvalidChannel(format!(
            "{name}: lambda = {lambda} must lie in [0, 1]"
        )));
    }
    Ok(lambda)
}

fn check_dim(name: &str, d: usize) -> Result<usize> {
    if d == 0 {
        return Err(Error::InvalidChannel(format!("{name}: d must be at least 1")));
    }
    Ok(d)
}

fn matrix_from_pairs(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix> {
    let rows: Vec<Vec<C64>> = rows
        .iter()
        .map(|r| r.iter().map(|&[re, im]| C64::new(re, im)).collect())
        .collect();
    CMatrix::from_rows(&rows)
}

fn check_completeness(kraus: &[CMatrix]) -> Result<()> {
    let d_in = kraus[0].cols();
    let d_out = kraus[0].rows();
    if let Some(bad) = kraus.iter().find(|k| k.cols() != d_in || k.rows() != d_out) {
        return Err(Error::InvalidChannel(format!(
            "Kraus operators must share one shape ({d_out}x{d_in}), found {}x{}",
            bad.rows(),
            bad.cols()
        )));
    }
    let mut sum = CMatrix::zeros(d_in, d_in);
    for k in kraus {
        sum = &sum + &(&k.adjoint() * k);
    }
    let defect = sum.max_abs_diff(&CMatrix::identity(d_in));
    if defect > KRAUS_TOL {
        return Err(Error::InvalidChannel(format!(
            "Kraus completeness violated: max |ΣK†K − 𝟙| = {defect:.3e}"
        )));
    }
    Ok(())
}

impl ChannelSpec {
    pub fn pauli(probs: [f64; 4]) -> Result<Self> {
        if let Some((k, &p)) = probs.iter().enumerate().find(|(_, &p)| p < 0.0 || p.is_nan()) {
            return Err(Error::InvalidChannel(format!(
                "pauli: lambda[{k}] = {p} is negative"
            )));
        }
        let s: f64 = probs.iter().sum();
        if (s - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidChannel(format!(
                "pauli: lambda sums to {s}, expected 1"
            )));
        }
        Ok(ChannelSpec::Pauli { probs })
    }

    pub fn amp_damp(lambda: f64) -> Result<Self> {
        Ok(ChannelSpec::AmpDamp {
            lambda: check_unit_interval("amp_damp", lambda)?,
        })
    }

    pub fn erasure(d: usize, lambda: f64) -> Result<Self> {
        Ok(ChannelSpec::Erasure {
            d: check_dim("erasure", d)?,
            lambda: check_unit_interval("erasure", lambda)?,
        })
    }

    pub fn depolarizing(d: usize, lambda: f64) -> Result<Self> {
        Ok(ChannelSpec::Depolarizing {
            d: check_dim("depolarizing", d)?,
            lambda: check_unit_interval("depolarizing", lambda)?,
        })
    }

    pub fn dephasing(d: usize, lambda: f64) -> Result<Self> {
        Ok(ChannelSpec::Dephasing {
            d: check_dim("dephasing", d)?,
            lambda: check_unit_interval("dephasing", lambda)?,
        })
    }

    pub fn cloning(d: usize) -> Result<Self> {
        Ok(ChannelSpec::Cloning {
            d: check_dim("cloning", d)?,
        })
    }

    pub fn transposition(d: usize) -> Result<Self> {
        Ok(ChannelSpec::Transposition {
            d: check_dim("transposition", d)?,
        })
    }

    pub fn identity(d: usize) -> Result<Self> {
        Self::unitary(CMatrix::identity(check_dim("unitary", d)?))
    }

    pub fn unitary(u: CMatrix) -> Result<Self> {
        if !u.is_square() || u.rows() == 0 {
            return Err(Error::InvalidChannel("unitary: matrix must be square".into()));
        }
        let defect = (&u.adjoint() * &u).max_abs_diff(&CMatrix::identity(u.rows()));
        if defect > KRAUS_TOL {
            return Err(Error::InvalidChannel(format!(
                "unitary: U†U deviates from identity by {defect:.3e}"
            )));
        }
        Ok(ChannelSpec::Unitary { u })
    }

    /// Trace-class channel onto `|0⟩⟨0|`.
    pub fn trace_class(d: usize) -> Result<Self> {
        let d = check_dim("trace_class", d)?;
        let mut s = vec![C64::new(0.0, 0.0); d];
        s[0] = C64::new(1.0, 0.0);
        Ok(ChannelSpec::TraceClass { sigma: s })
    }

    pub fn trace_class_onto(state: Vec<C64>) -> Result<Self> {
        let n: f64 = state.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if state.is_empty() || (n - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidChannel(format!(
                "trace_class: fixed_state must be a unit vector (norm {n})"
            )));
        }
        Ok(ChannelSpec::TraceClass { sigma: state })
    }

    pub fn custom_kraus(kraus: Vec<CMatrix>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::InvalidChannel("custom_kraus: empty Kraus list".into()));
        }
        check_completeness(&kraus)?;
        Ok(ChannelSpec::CustomKraus { kraus })
    }

    pub fn custom_affine(a: [[f64; 3]; 3], b: [f64; 3]) -> Result<Self> {
        Ok(ChannelSpec::CustomAffine(QubitAffine::new(a, b)?))
    }

    /// Validates a wire record.
    pub fn from_record(rec: &ChannelRecord) -> Result<Self> {
        let family = rec
            .family
            .ok_or_else(|| Error::InvalidChannel("missing field `family`".into()))?;
        let name = family.name();
        let scalar = |rec: &ChannelRecord| -> Result<f64> {
            match &rec.lambda {
                Some(LambdaField::Scalar(x)) => Ok(*x),
                Some(LambdaField::Vector(_)) => Err(Error::InvalidChannel(format!(
                    "{name}: field `lambda` must be a number"
                ))),
                None => Err(Error::InvalidChannel(format!("{name}: missing field `lambda`"))),
            }
        };
        let dim = |rec: &ChannelRecord| -> Result<usize> {
            rec.d
                .ok_or_else(|| Error::InvalidChannel(format!("{name}: missing field `d`")))
        };
        let reject = |field: &str, present: bool| -> Result<()> {
            if present {
                Err(Error::InvalidChannel(format!(
                    "{name}: field `{field}` is not accepted by this family"
                )))
            } else {
                Ok(())
            }
        };
        if family != Family::TraceClass {
            reject("fixed_state", rec.fixed_state.is_some())?;
        }
        if family != Family::CustomAffine {
            reject("a", rec.a.is_some())?;
            reject("b", rec.b.is_some())?;
        }

        match family {
            Family::Pauli => match &rec.lambda {
                Some(LambdaField::Vector(v)) if v.len() == 4 => {
                    Self::pauli([v[0], v[1], v[2], v[3]])
                }
                _ => Err(Error::InvalidChannel(
                    "pauli: field `lambda` must be a list of 4 probabilities".into(),
                )),
            },
            Family::AmpDamp => Self::amp_damp(scalar(rec)?),
            Family::Erasure => Self::erasure(dim(rec)?, scalar(rec)?),
            Family::Depolarizing => Self::depolarizing(dim(rec)?, scalar(rec)?),
            Family::Dephasing => Self::dephasing(dim(rec)?, scalar(rec)?),
            Family::Cloning => Self::cloning(dim(rec)?),
            Family::Transposition => Self::transposition(dim(rec)?),
            Family::Unitary => match &rec.kraus {
                Some(ks) if ks.len() == 1 => {
                    let u = matrix_from_pairs(&ks[0])?;
                    if let Some(d) = rec.d {
                        if d != u.rows() {
                            return Err(Error::InvalidChannel(format!(
                                "unitary: d = {d} but matrix is {}x{}",
                                u.rows(),
                                u.cols()
                            )));
                        }
                    }
                    Self::unitary(u)
                }
                Some(_) => Err(Error::InvalidChannel(
                    "unitary: field `kraus` must hold exactly one matrix".into(),
                )),
                None => Self::identity(dim(rec)?),
            },
            Family::TraceClass => match &rec.fixed_state {
                Some(v) => {
                    let s: Vec<C64> = v.iter().map(|&[re, im]| C64::new(re, im)).collect();
                    if let Some(d) = rec.d {
                        if d != s.len() {
                            return Err(Error::InvalidChannel(format!(
                                "trace_class: d = {d} but fixed_state has {} entries",
                                s.len()
                            )));
                        }
                    }
                    Self::trace_class_onto(s)
                }
                None => Self::trace_class(dim(rec)?),
            },
            Family::CustomKraus => {
                let ks = rec.kraus.as_ref().ok_or_else(|| {
                    Error::InvalidChannel("custom_kraus: missing field `kraus`".into())
                })?;
                let kraus = ks
                    .iter()
                    .map(|m| matrix_from_pairs(m))
                    .collect::<Result<Vec<_>>>()?;
                if let (Some(d), Some(k)) = (rec.d, kraus.first()) {
                    if d != k.cols() {
                        return Err(Error::InvalidChannel(format!(
                            "custom_kraus: d = {d} but operators act on dimension {}",
                            k.cols()
                        )));
                    }
                }
                Self::custom_kraus(kraus)
            }
            Family::CustomAffine => {
                let a = rec
                    .a
                    .ok_or_else(|| Error::InvalidChannel("custom_affine: missing field `a`".into()))?;
                let b = rec.b.unwrap_or([0.0; 3]);
                Self::custom_affine(a, b)
            }
        }
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        let rec: ChannelRecord =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("channel record: {e}")))?;
        Self::from_record(&rec)
    }

    pub fn family(&self) -> Family {
        match self {
            ChannelSpec::Pauli { .. } => Family::Pauli,
            ChannelSpec::AmpDamp { .. } => Family::AmpDamp,
            ChannelSpec::Erasure { .. } => Family::Erasure,
            ChannelSpec::Depolarizing { .. } => Family::Depolarizing,
            ChannelSpec::Cloning { .. } => Family::Cloning,
            ChannelSpec::Transposition { .. } => Family::Transposition,
            ChannelSpec::Unitary { .. } => Family::Unitary,
            ChannelSpec::Dephasing { .. } => Family::Dephasing,
            ChannelSpec::TraceClass { .. } => Family::TraceClass,
            ChannelSpec::CustomKraus { .. } => Family::CustomKraus,
            ChannelSpec::CustomAffine(_) => Family::CustomAffine,
        }
    }

    pub fn input_dim(&self) -> usize {
        match self {
            ChannelSpec::Pauli { .. } | ChannelSpec::AmpDamp { .. } | ChannelSpec::CustomAffine(_) => 2,
            ChannelSpec::Erasure { d, .. }
            | ChannelSpec::Depolarizing { d, .. }
            | ChannelSpec::Cloning { d }
            | ChannelSpec::Transposition { d }
            | ChannelSpec::Dephasing { d, .. } => *d,
            ChannelSpec::Unitary { u } => u.rows(),
            ChannelSpec::TraceClass { sigma } => sigma.len(),
            ChannelSpec::CustomKraus { kraus } => kraus[0].cols(),
        }
    }

    pub fn output_dim(&self) -> usize {
        match self {
            ChannelSpec::Erasure { d, .. } => d + 1,
            ChannelSpec::Cloning { d } => d * d,
            ChannelSpec::CustomKraus { kraus } => kraus[0].rows(),
            other => other.input_dim(),
        }
    }

    /// Compiles the spec into a map that can be applied repeatedly.
    pub fn compile(&self) -> Result<LinearChannel> {
        match self {
            ChannelSpec::CustomAffine(aff) => Ok(LinearChannel::Affine(*aff)),
            _ => Ok(LinearChannel::Kraus {
                d_in: self.input_dim(),
                d_out: self.output_dim(),
                ops: build_kraus(self)?,
            }),
        }
    }

    pub fn to_record(&self) -> ChannelRecord {
        let pairs = |m: &CMatrix| -> Vec<Vec<[f64; 2]>> {
            (0..m.rows())
                .map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                .collect()
        };
        let mut rec = ChannelRecord {
            family: Some(self.family()),
            ..Default::default()
        };
        match self {
            ChannelSpec::Pauli { probs } => rec.lambda = Some(LambdaField::Vector(probs.to_vec())),
            ChannelSpec::AmpDamp { lambda } => rec.lambda = Some(LambdaField::Scalar(*lambda)),
            ChannelSpec::Erasure { d, lambda }
            | ChannelSpec::Depolarizing { d, lambda }
            | ChannelSpec::Dephasing { d, lambda } => {
                rec.d = Some(*d);
                rec.lambda = Some(LambdaField::Scalar(*lambda));
            }
            ChannelSpec::Cloning { d } | ChannelSpec::Transposition { d } => rec.d = Some(*d),
            ChannelSpec::Unitary { u } => {
                rec.d = Some(u.rows());
                rec.kraus = Some(vec![pairs(u)]);
            }
            ChannelSpec::TraceClass { sigma } => {
                rec.d = Some(sigma.len());
                rec.fixed_state = Some(sigma.iter().map(|z| [z.re, z.im]).collect());
            }
            ChannelSpec::CustomKraus { kraus } => {
                rec.d = Some(kraus[0].cols());
                rec.kraus = Some(kraus.iter().map(pairs).collect());
            }
            ChannelSpec::CustomAffine(aff) => {
                rec.a = Some(aff.a);
                rec.b = Some(aff.b);
            }
        }
        rec
    }
}

/// Kraus operators of the channel (`d_out × d_in` matrices).
pub fn build_kraus(spec: &ChannelSpec) -> Result<Vec<CMatrix>> {
    let c = |re: f64| C64::new(re, 0.0);
    let ops = match spec {
        ChannelSpec::Pauli { probs } => {
            let [x, y, z] = pauli_matrices();
            let paulis = [CMatrix::identity(2), x, y, z];
            probs
                .iter()
                .zip(paulis)
                .filter(|(&p, _)| p > 0.0)
                .map(|(&p, s)| s.scale_real(p.sqrt()))
                .collect()
        }
        ChannelSpec::AmpDamp { lambda } => {
            let a0 = CMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, lambda.sqrt()]);
            let a1 = CMatrix::from_real(2, 2, &[0.0, (1.0 - lambda).sqrt(), 0.0, 0.0]);
            vec![a0, a1]
        }
        ChannelSpec::Erasure { d, lambda } => {
            let d = *d;
            let embed = CMatrix::from_fn(d + 1, d, |i, j| if i == j { c(lambda.sqrt()) } else { c(0.0) });
            let mut ops = vec![embed];
            let flag = (1.0 - lambda).sqrt();
            for j in 0..d {
                let mut k = CMatrix::zeros(d + 1, d);
                k[(d, j)] = c(flag);
                ops.push(k);
            }
            ops
        }
        ChannelSpec::Depolarizing { d, lambda } => {
            let d = *d;
            let mut ops = vec![CMatrix::identity(d).scale_real(lambda.sqrt())];
            let w = ((1.0 - lambda) / d as f64).sqrt();
            for i in 0..d {
                for j in 0..d {
                    let mut k = CMatrix::zeros(d, d);
                    k[(i, j)] = c(w);
                    ops.push(k);
                }
            }
            ops
        }
        ChannelSpec::Dephasing { d, lambda } => {
            let d = *d;
            let mut ops = vec![CMatrix::identity(d).scale_real(lambda.sqrt())];
            let w = (1.0 - lambda).sqrt();
            for k in 0..d {
                ops.push(CMatrix::basis_projector(d, k).scale_real(w));
            }
            ops
        }
        ChannelSpec::Cloning { d } => {
            let d = *d;
            let ps = symmetric_projector(d);
            let w = (2.0 / (d as f64 + 1.0)).sqrt();
            (0..d)
                .map(|i| {
                    // P_S (𝟙 ⊗ |i⟩) as a d² × d matrix
                    let embed = CMatrix::from_fn(d * d, d, |r, col| {
                        if r == col * d + i {
                            c(1.0)
                        } else {
                            c(0.0)
                        }
                    });
                    (&ps * &embed).scale_real(w)
                })
                .collect()
        }
        ChannelSpec::Transposition { d } => {
            let d = *d;
            let norm = 1.0 / (d as f64 + 1.0);
            let mut ops = Vec::new();
            for i in 0..d {
                let mut k = CMatrix::zeros(d, d);
                k[(i, i)] = c((2.0 * norm).sqrt());
                ops.push(k);
                for j in (i + 1)..d {
                    let mut k = CMatrix::zeros(d, d);
                    k[(i, j)] = c(norm.sqrt());
                    k[(j, i)] = c(norm.sqrt());
                    ops.push(k);
                }
            }
            ops
        }
        ChannelSpec::Unitary { u } => vec![u.clone()],
        ChannelSpec::TraceClass { sigma } => {
            let d = sigma.len();
            (0..d)
                .map(|j| CMatrix::from_fn(d, d, |r, col| if col == j { sigma[r] } else { c(0.0) }))
                .collect()
        }
        ChannelSpec::CustomKraus { kraus } => kraus.clone(),
        ChannelSpec::CustomAffine(aff) => kraus_from_affine(aff)?,
    };
    check_completeness(&ops)?;
    Ok(ops)
}

/// `(𝟙 + SWAP)/2` on `C^d ⊗ C^d`.
pub fn symmetric_projector(d: usize) -> CMatrix {
    CMatrix::from_fn(d * d, d * d, |r, col| {
        let (a, b) = (r / d, r % d);
        let mut v = 0.0;
        if r == col {
            v += 0.5;
        }
        if col == b * d + a {
            v += 0.5;
        }
        C64::new(v, 0.0)
    })
}

/// Kraus decomposition of an affine qubit map via its Choi matrix.
fn kraus_from_affine(aff: &QubitAffine) -> Result<Vec<CMatrix>> {
    let map = LinearChannel::Affine(*aff);
    let mut choi = CMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            let mut e = CMatrix::zeros(2, 2);
            e[(i, j)] = C64::new(1.0, 0.0);
            let img = map.apply_linear(&e);
            for a in 0..2 {
                for b in 0..2 {
                    choi[(i * 2 + a, j * 2 + b)] = img[(a, b)];
                }
            }
        }
    }
    let es = herm_eig(&choi)?;
    let min = es.values.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -KRAUS_TOL {
        return Err(Error::InvalidChannel(format!(
            "custom_affine: map is not completely positive (Choi eigenvalue {min:.3e})"
        )));
    }
    Ok(es
        .values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > KRAUS_TOL)
        .map(|(k, &v)| {
            let s = v.sqrt();
            CMatrix::from_fn(2, 2, |a, i| es.vectors[(i * 2 + a, k)] * s)
        })
        .collect())
}

/// A channel prepared for repeated evaluation.
#[derive(Clone, Debug)]
pub enum LinearChannel {
    Kraus {
        d_in: usize,
        d_out: usize,
        ops: Vec<CMatrix>,
    },
    Affine(QubitAffine),
}

impl LinearChannel {
    pub fn input_dim(&self) -> usize {
        match self {
            LinearChannel::Kraus { d_in, .. } => *d_in,
            LinearChannel::Affine(_) => 2,
        }
    }

    pub fn output_dim(&self) -> usize {
        match self {
            LinearChannel::Kraus { d_out, .. } => *d_out,
            LinearChannel::Affine(_) => 2,
        }
    }

    /// Evaluates the linear extension of the channel on any square matrix.
    pub fn apply_linear(&self, m: &CMatrix) -> CMatrix {
        match self {
            LinearChannel::Kraus { d_out, ops, .. } => {
                let mut out = CMatrix::zeros(*d_out, *d_out);
                for k in ops {
                    out = &out + &k.sandwich(m);
                }
                out
            }
            LinearChannel::Affine(aff) => {
                // m = ½(t𝟙 + v·σ) with complex t, v
                let t = m.trace();
                let paulis = pauli_matrices();
                let v: Vec<C64> = paulis.iter().map(|s| trace_prod(s, m)).collect();
                let mut out = CMatrix::identity(2).scale(t * 0.5);
                for (i, s) in paulis.iter().enumerate() {
                    let mut coeff = t * aff.b[i];
                    for (j, vj) in v.iter().enumerate() {
                        coeff += vj * aff.a[i][j];
                    }
                    out = &out + &s.scale(coeff * 0.5);
                }
                out
            }
        }
    }
}

fn trace_prod(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.rows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

fn validate_state(rho: &CMatrix, dim: usize) -> Result<()> {
    if !rho.is_square() || rho.rows() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: rho.rows(),
        });
    }
    let defect = rho.hermitian_defect();
    if defect > STATE_TOL {
        return Err(Error::InvalidState(format!("not Hermitian (defect {defect:.3e})")));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
        return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
    }
    let es = herm_eig(&rho.hermitian_part())?;
    let min = es.values.last().copied().unwrap_or(0.0);
    if min < -STATE_TOL {
        return Err(Error::InvalidState(format!(
            "not positive semidefinite (eigenvalue {min:.3e})"
        )));
    }
    Ok(())
}

/// Applies the channel to a density matrix, validating the input state.
pub fn apply(spec: &ChannelSpec, rho: &CMatrix) -> Result<CMatrix> {
    validate_state(rho, spec.input_dim())?;
    Ok(spec.compile()?.apply_linear(rho))
}
