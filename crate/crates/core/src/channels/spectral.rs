use crate::error::{Error, Result};
use crate::numerics::{herm_eig, CMatrix, C64};

use super::{ChannelSpec, Family};

/// Max-abs commutator norm at or below which two outputs count as commuting.
pub const COMMUTATOR_TOL: f64 = 1e-10;

/// Eigenvalue pairs of a channel on two orthogonal pure inputs.
///
/// With `μ_k`, `ν_k` the eigenvalues of `X(|0⟩⟨0|)` and `X(|1⟩⟨1|)` on a
/// shared eigenvector, `alphas[k] = (μ_k + ν_k)/2` and
/// `betas[k] = (μ_k − ν_k)/2`, so the Helstrom image has eigenvalues
/// `α_k ω + β_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralPairs {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl SpectralPairs {
    pub fn new(alphas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        if alphas.len() != betas.len() {
            return Err(Error::DimensionMismatch {
                expected: alphas.len(),
                found: betas.len(),
            });
        }
        let sa: f64 = alphas.iter().sum();
        let sb: f64 = betas.iter().sum();
        if (sa - 1.0).abs() > 1e-10 || sb.abs() > 1e-10 {
            return Err(Error::InvalidChannel(format!(
                "spectral pairs are not trace preserving (Σα = {sa}, Σβ = {sb})"
            )));
        }
        Ok(SpectralPairs { alphas, betas })
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.alphas.iter().copied().zip(self.betas.iter().copied())
    }

    /// `Σ_k |α_k ω + β_k|`, the trace norm of the Helstrom image.
    pub fn helstrom_norm(&self, omega: f64) -> f64 {
        self.pairs().map(|(a, b)| (a * omega + b).abs()).sum()
    }

    /// Pairs sorted lexicographically, for order-independent comparison.
    pub fn sorted(&self) -> Vec<(f64, f64)> {
        let mut v: Vec<(f64, f64)> = self.pairs().collect();
        let key = |x: f64| (x * 1e9).round() as i64;
        v.sort_by_key(|&(a, b)| (key(a), key(b)));
        v
    }
}

fn basis_images(spec: &ChannelSpec) -> Result<Option<(CMatrix, CMatrix)>> {
    let d = spec.input_dim();
    if d < 2 {
        return Ok(None);
    }
    let map = spec.compile()?;
    Ok(Some((
        map.apply_linear(&CMatrix::basis_projector(d, 0)),
        map.apply_linear(&CMatrix::basis_projector(d, 1)),
    )))
}

/// Max-abs norm of `[X(|0⟩⟨0|), X(|1⟩⟨1|)]`.
pub fn commutator_norm(spec: &ChannelSpec) -> Result<f64> {
    Ok(match basis_images(spec)? {
        Some((x0, x1)) => x0.commutator(&x1).max_abs(),
        None => 0.0,
    })
}

/// Whether the outputs on `|0⟩⟨0|` and `|1⟩⟨1|` commute.
pub fn verify_commutativity_preserving(spec: &ChannelSpec) -> Result<bool> {
    Ok(commutator_norm(spec)? <= COMMUTATOR_TOL)
}

/// Spectral pairs of a covariant family, read off a common eigenbasis.
pub fn spectral_pairs(spec: &ChannelSpec) -> Result<SpectralPairs> {
    match spec.family() {
        Family::Erasure | Family::Depolarizing | Family::Cloning | Family::Transposition => {}
        other => {
            return Err(Error::Unsupported(format!(
                "spectral pairs are defined for erasure, depolarizing, cloning and transposition, not {}",
                other.name()
            )))
        }
    }
    let (x0, x1) = basis_images(spec)?.ok_or_else(|| {
        Error::Unsupported("spectral pairs need input dimension at least 2".into())
    })?;
    spectral_pairs_of(&x0, &x1)
}

/// Spectral pairs of two commuting Hermitian outputs.
pub fn spectral_pairs_of(x0: &CMatrix, x1: &CMatrix) -> Result<SpectralPairs> {
    let norm = x0.commutator(x1).max_abs();
    if norm > COMMUTATOR_TOL {
        return Err(Error::NotCommutativityPreserving { norm });
    }
    // a generic combination separates every joint eigenspace
    let t = std::f64::consts::SQRT_2 - 1.0;
    let mix = x0 + &x1.scale(C64::new(t, 0.0));
    let es = herm_eig(&mix)?;
    let n = x0.dim();
    let mut alphas = Vec::with_capacity(n);
    let mut betas = Vec::with_capacity(n);
    let mut r0 = CMatrix::zeros(n, n);
    let mut r1 = CMatrix::zeros(n, n);
    for k in 0..n {
        let v = es.vector(k);
        let p = CMatrix::projector(&v);
        let mu = p.trace_product_re(x0);
        let nu = p.trace_product_re(x1);
        r0 = &r0 + &p.scale_real(mu);
        r1 = &r1 + &p.scale_real(nu);
        alphas.push(0.5 * (mu + nu));
        betas.push(0.5 * (mu - nu));
    }
    let defect = r0.max_abs_diff(x0).max(r1.max_abs_diff(x1));
    if defect > 1e-9 {
        return Err(Error::NotCommutativityPreserving { norm: defect });
    }
    SpectralPairs::new(alphas, betas)
}
