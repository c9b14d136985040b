//! Seeded random draws: Haar unitaries, pure states, binary POVMs and
//! random channels. All generators take an explicit RNG so results are
//! reproducible bit-for-bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::numerics::{herm_eig, CMatrix, C64};

pub type SeededRng = ChaCha8Rng;

/// Derives an independent stream from a base seed and a worker index.
pub fn sub_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 finalizer over the combined value
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_from(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Haar-distributed unitary via Gram–Schmidt on complex Gaussian columns.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<C64> = (0..dim).map(|_| complex_normal(rng)).collect();
        for prev in &cols {
            let proj = inner(prev, &v);
            for (x, p) in v.iter_mut().zip(prev) {
                *x -= proj * p;
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n < 1e-10 {
            continue;
        }
        cols.push(v.into_iter().map(|z| z / n).collect());
    }
    CMatrix::from_fn(dim, dim, |i, j| cols[j][i])
}

pub fn haar_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..dim).map(|_| complex_normal(rng)).collect();
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-10 {
            return v.into_iter().map(|z| z / n).collect();
        }
    }
}

/// Two orthonormal pure states: the first two columns of a Haar unitary.
pub fn orthonormal_pair<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> (Vec<C64>, Vec<C64>) {
    let u = haar_unitary(dim, rng);
    (u.column(0), u.column(1))
}

/// Gaussian Hermitian matrix (GUE-like), unnormalized.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| complex_normal(rng));
    let gd = g.adjoint();
    CMatrix::from_fn(dim, dim, |i, j| (g[(i, j)] + gd[(i, j)]) * 0.5)
}

/// Random effect `0 ≤ E ≤ 𝟙`: Haar eigenbasis with uniform eigenvalues.
pub fn random_effect<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let u = haar_unitary(dim, rng);
    let eig: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
    &(&u * &CMatrix::diag_real(&eig)) * &u.adjoint()
}

/// Random mixed state from a Ginibre draw `G G† / Tr`.
pub fn random_mixed_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| complex_normal(rng));
    let rho = &g * &g.adjoint();
    let tr = rho.trace().re;
    rho.scale_real(1.0 / tr)
}

/// Kraus operators of a random channel obtained from a Haar isometry
/// `C^d_in → C^d_out ⊗ C^env`.
pub fn random_kraus<R: Rng + ?Sized>(
    d_in: usize,
    d_out: usize,
    env: usize,
    rng: &mut R,
) -> Vec<CMatrix> {
    let big = d_out * env;
    assert!(big >= d_in);
    let u = haar_unitary(big, rng);
    (0..env)
        .map(|e| CMatrix::from_fn(d_out, d_in, |i, j| u[(i * env + e, j)]))
        .collect()
}

/// `exp(i t H)` for Hermitian `H`.
pub fn unitary_exp(h: &CMatrix, t: f64) -> CMatrix {
    let es = herm_eig(h).expect("generator must be Hermitian");
    let phases: Vec<C64> = es
        .values
        .iter()
        .map(|&v| C64::from_polar(1.0, t * v))
        .collect();
    let n = h.dim();
    let scaled = CMatrix::from_fn(n, n, |i, j| es.vectors[(i, j)] * phases[j]);
    &scaled * &es.vectors.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = rng_from(7);
        for d in 1..6 {
            let u = haar_unitary(d, &mut rng);
            let g = &u.adjoint() * &u;
            assert!(g.max_abs_diff(&CMatrix::identity(d)) < 1e-12);
        }
    }

    #[test]
    fn random_kraus_is_complete() {
        let mut rng = rng_from(11);
        let ks = random_kraus(2, 3, 2, &mut rng);
        let mut sum = CMatrix::zeros(2, 2);
        for k in &ks {
            sum = &sum + &(&k.adjoint() * k);
        }
        assert!(sum.max_abs_diff(&CMatrix::identity(2)) < 1e-12);
    }

    #[test]
    fn sub_seeds_differ_and_repeat() {
        assert_eq!(sub_seed(3, 4), sub_seed(3, 4));
        assert_ne!(sub_seed(3, 4), sub_seed(3, 5));
        assert_ne!(sub_seed(3, 4), sub_seed(4, 4));
    }

    #[test]
    fn exponential_of_hermitian_is_unitary() {
        let mut rng = rng_from(5);
        let h = random_hermitian(3, &mut rng);
        let u = unitary_exp(&h, 0.37);
        assert!((&u.adjoint() * &u).max_abs_diff(&CMatrix::identity(3)) < 1e-12);
    }
}
