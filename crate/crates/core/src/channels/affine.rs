use crate::error::{Error, Result};
use crate::numerics::{
    mat3_mul, mat3_transpose, mat3_vec, polar_3x3, vec3_norm, CMatrix, Mat3, Vec3, C64,
    IDENTITY3,
};

use super::ChannelSpec;

/// Slack allowed when checking that the Bloch ball maps into itself.
pub const BALL_TOL: f64 = 1e-9;
/// Off-axis displacement below which a qubit channel counts as D2-covariant.
pub const COVARIANCE_TOL: f64 = 1e-10;

pub fn pauli_matrices() -> [CMatrix; 3] {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    [
        CMatrix::from_rows(&[vec![z, one], vec![one, z]]).unwrap(),
        CMatrix::from_rows(&[vec![z, -i], vec![i, z]]).unwrap(),
        CMatrix::from_rows(&[vec![one, z], vec![z, -one]]).unwrap(),
    ]
}

/// `½(𝟙 + r·σ)`.
pub fn bloch_state(r: &Vec3) -> CMatrix {
    let [x, y, z] = pauli_matrices();
    let mut m = CMatrix::identity(2);
    m = &m + &x.scale_real(r[0]);
    m = &m + &y.scale_real(r[1]);
    m = &m + &z.scale_real(r[2]);
    m.scale_real(0.5)
}

/// `r_i = Tr[σ_i ρ]`.
pub fn bloch_vector(rho: &CMatrix) -> Vec3 {
    let s = pauli_matrices();
    [
        s[0].trace_product_re(rho),
        s[1].trace_product_re(rho),
        s[2].trace_product_re(rho),
    ]
}

/// Points spread quasi-uniformly over the unit sphere (Fibonacci lattice).
pub(crate) fn sphere_points(n: usize) -> Vec<Vec3> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let z = 1.0 - 2.0 * (k as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * k as f64;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

/// Bloch-ball action `x ↦ A x + b` of a qubit channel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitAffine {
    pub a: Mat3,
    pub b: Vec3,
}

impl QubitAffine {
    /// Validates that the unit sphere lands inside the ball.
    pub fn new(a: Mat3, b: Vec3) -> Result<Self> {
        let aff = QubitAffine { a, b };
        if a.iter().flatten().chain(b.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidChannel("affine map has non-finite entries".into()));
        }
        let worst = sphere_points(2000)
            .iter()
            .map(|x| vec3_norm(&aff.apply(x)))
            .fold(0.0, f64::max);
        if worst > 1.0 + BALL_TOL {
            return Err(Error::InvalidChannel(format!(
                "affine map sends a pure state outside the Bloch ball (|Ax+b| = {worst:.6})"
            )));
        }
        Ok(aff)
    }

    pub fn apply(&self, x: &Vec3) -> Vec3 {
        let ax = mat3_vec(&self.a, x);
        [ax[0] + self.b[0], ax[1] + self.b[1], ax[2] + self.b[2]]
    }

    /// `A x + ω b`, the Bloch part of the image of `½(ω𝟙 + x·σ)`.
    pub fn apply_weighted(&self, x: &Vec3, omega: f64) -> Vec3 {
        let ax = mat3_vec(&self.a, x);
        [
            ax[0] + omega * self.b[0],
            ax[1] + omega * self.b[1],
            ax[2] + omega * self.b[2],
        ]
    }

    /// Composition `self ∘ first`.
    pub fn after(&self, first: &QubitAffine) -> QubitAffine {
        let b = self.apply(&first.b);
        QubitAffine {
            a: mat3_mul(&self.a, &first.a),
            b,
        }
    }
}

/// `A_ij = ½Tr[σ_i X(σ_j)]`, `b_i = ½Tr[σ_i X(𝟙)]`.
pub fn to_affine(spec: &ChannelSpec) -> Result<QubitAffine> {
    if let ChannelSpec::CustomAffine(aff) = spec {
        return Ok(*aff);
    }
    if spec.input_dim() != 2 || spec.output_dim() != 2 {
        return Err(Error::Unsupported(format!(
            "affine form needs a qubit channel, got {} → {} dimensions",
            spec.input_dim(),
            spec.output_dim()
        )));
    }
    let map = spec.compile()?;
    let s = pauli_matrices();
    let image_of_identity = map.apply_linear(&CMatrix::identity(2));
    let mut a = [[0.0; 3]; 3];
    let mut b = [0.0; 3];
    for j in 0..3 {
        let img = map.apply_linear(&s[j]);
        for i in 0..3 {
            a[i][j] = 0.5 * s[i].trace_product_re(&img);
        }
    }
    for i in 0..3 {
        b[i] = 0.5 * s[i].trace_product_re(&image_of_identity);
    }
    Ok(QubitAffine { a, b })
}

/// Diagonal form of a qubit channel with the displacement on the third axis.
///
/// `d1 ≤ d2`, `c3 ≥ 0`, and with no displacement the axes are sorted so
/// that `d3` is the largest. `input_frame` maps original Bloch vectors to
/// canonical ones.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct D2Canonical {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub c3: f64,
    pub is_d2_covariant: bool,
    /// Largest displacement component left off the third axis.
    pub offaxis_residual: f64,
    pub input_frame: Mat3,
}

impl D2Canonical {
    /// A canonical form given directly, with identity frame.
    pub fn from_parts(d1: f64, d2: f64, d3: f64, c3: f64) -> Self {
        D2Canonical {
            d1,
            d2,
            d3,
            c3,
            is_d2_covariant: true,
            offaxis_residual: 0.0,
            input_frame: IDENTITY3,
        }
    }

    /// Checks the ordering the closed forms rely on.
    pub fn check_conventions(&self) -> Result<()> {
        if !self.is_d2_covariant {
            return Err(Error::NotD2Covariant {
                residual: self.offaxis_residual,
            });
        }
        let tol = 1e-12;
        if self.d1 < -tol || self.d2 < -tol || self.d3 < -tol {
            return Err(Error::ConventionViolation("singular values must be nonnegative".into()));
        }
        if self.d2 + tol < self.d1 {
            return Err(Error::ConventionViolation(format!(
                "need d2 ≥ d1, got d1 = {}, d2 = {}",
                self.d1, self.d2
            )));
        }
        if self.c3 < 0.0 {
            return Err(Error::ConventionViolation(format!("need c3 ≥ 0, got {}", self.c3)));
        }
        if self.c3 == 0.0 && self.d3 + tol < self.d2 {
            return Err(Error::ConventionViolation(format!(
                "with c3 = 0 need d3 ≥ d2, got d2 = {}, d3 = {}",
                self.d2, self.d3
            )));
        }
        Ok(())
    }

    pub fn singular_values(&self) -> Vec3 {
        [self.d1, self.d2, self.d3]
    }

    /// Input Bloch vector whose image is the canonical ellipsoid point `y`.
    ///
    /// Zero singular directions get weight 0 from the pseudoinverse; any
    /// remaining length is put along such a direction so the result is pure.
    pub fn input_bloch_for(&self, y: &Vec3) -> Vec3 {
        let d = self.singular_values();
        let mut x = [0.0; 3];
        for i in 0..3 {
            if d[i] > 0.0 {
                x[i] = y[i] / d[i];
            }
        }
        let n = vec3_norm(&x);
        if n > 1.0 {
            x = x.map(|v| v / n);
        } else if let Some(free) = (0..3).find(|&i| d[i] == 0.0) {
            x[free] = (1.0 - n * n).max(0.0).sqrt();
        }
        mat3_vec(&mat3_transpose(&self.input_frame), &x)
    }

    /// The affine map in canonical coordinates: `A = diag(d)`, `b = −c`.
    pub fn canonical_affine(&self) -> QubitAffine {
        QubitAffine {
            a: [[self.d1, 0.0, 0.0], [0.0, self.d2, 0.0], [0.0, 0.0, self.d3]],
            b: [0.0, 0.0, -self.c3],
        }
    }
}

/// Brings a qubit channel into the diagonal form used by the closed forms.
///
/// Uses `A = V D U`, the displacement `c = −Vᵀb`, and then the signed axis
/// permutation that puts `c` on the third axis with `c3 ≥ 0` and `d2 ≥ d1`.
pub fn canonicalize_d2(aff: &QubitAffine) -> D2Canonical {
    let polar = polar_3x3(&aff.a);
    let vt = mat3_transpose(&polar.v);
    let c = mat3_vec(&vt, &aff.b).map(|v| -v);
    let d = polar.d;

    let (perm, signs, c3, residual) = if c.iter().all(|v| v.abs() <= COVARIANCE_TOL) {
        let mut order = [0usize, 1, 2];
        order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
        (order, [1.0; 3], 0.0, c.iter().fold(0.0f64, |m, v| m.max(v.abs())))
    } else {
        let axis = (0..3)
            .max_by(|&i, &j| c[i].abs().total_cmp(&c[j].abs()))
            .unwrap();
        let mut rest: Vec<usize> = (0..3).filter(|&i| i != axis).collect();
        rest.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
        let residual = rest.iter().fold(0.0f64, |m, &i| m.max(c[i].abs()));
        let s3 = if c[axis] < 0.0 { -1.0 } else { 1.0 };
        ([rest[0], rest[1], axis], [1.0, 1.0, s3], c[axis].abs(), residual)
    };

    let frame: Mat3 = std::array::from_fn(|i| polar.u[perm[i]].map(|v| signs[i] * v));
    D2Canonical {
        d1: d[perm[0]],
        d2: d[perm[1]],
        d3: d[perm[2]],
        c3,
        is_d2_covariant: residual <= COVARIANCE_TOL,
        offaxis_residual: residual,
        input_frame: frame,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{haar_state, rng_from};
    use rand::Rng;

    fn random_bloch(rng: &mut impl Rng) -> Vec3 {
        let psi = haar_state(2, rng);
        let r: f64 = rng.random();
        bloch_vector(&CMatrix::projector(&psi)).map(|v| v * r)
    }

    #[test]
    fn pauli_affine_is_diagonal() {
        let spec = ChannelSpec::pauli([0.7, 0.1, 0.1, 0.1]).unwrap();
        let aff = to_affine(&spec).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { 0.6 } else { 0.0 };
                assert!((aff.a[i][j] - expected).abs() < 1e-14);
            }
            assert!(aff.b[i].abs() < 1e-14);
        }
    }

    #[test]
    fn amplitude_damping_affine() {
        let lambda: f64 = 0.36;
        let aff = to_affine(&ChannelSpec::amp_damp(lambda).unwrap()).unwrap();
        let expected_a = [[0.6, 0.0, 0.0], [0.0, 0.6, 0.0], [0.0, 0.0, 0.36]];
        assert!(crate::numerics::mat3_max_abs_diff(&aff.a, &expected_a) < 1e-14);
        assert!((aff.b[2] - (1.0 - lambda)).abs() < 1e-14);
        assert!(aff.b[0].abs() < 1e-14 && aff.b[1].abs() < 1e-14);
    }

    #[test]
    fn identity_unitary_affine() {
        let aff = to_affine(&ChannelSpec::identity(2).unwrap()).unwrap();
        assert!(crate::numerics::mat3_max_abs_diff(&aff.a, &IDENTITY3) < 1e-15);
        assert!(vec3_norm(&aff.b) < 1e-15);
    }

    #[test]
    fn affine_reproduces_kraus_action() {
        let mut rng = rng_from(31);
        let specs = vec![
            ChannelSpec::amp_damp(0.3).unwrap(),
            ChannelSpec::pauli([0.4, 0.3, 0.2, 0.1]).unwrap(),
            ChannelSpec::unitary(crate::sampling::haar_unitary(2, &mut rng)).unwrap(),
            ChannelSpec::custom_kraus(crate::sampling::random_kraus(2, 2, 3, &mut rng)).unwrap(),
        ];
        for spec in specs {
            let aff = to_affine(&spec).unwrap();
            let map = spec.compile().unwrap();
            for _ in 0..100 {
                let x = random_bloch(&mut rng);
                let direct = map.apply_linear(&bloch_state(&x));
                let via = bloch_state(&aff.apply(&x));
                assert!(direct.max_abs_diff(&via) < 1e-9);
            }
        }
    }

    #[test]
    fn non_qubit_has_no_affine_form() {
        assert!(to_affine(&ChannelSpec::depolarizing(3, 0.5).unwrap()).is_err());
        assert!(to_affine(&ChannelSpec::erasure(2, 0.5).unwrap()).is_err());
    }

    #[test]
    fn canonical_pauli() {
        let probs = [0.5, 0.1, 0.15, 0.25];
        let aff = to_affine(&ChannelSpec::pauli(probs).unwrap()).unwrap();
        let can = canonicalize_d2(&aff);
        let largest = (1..4)
            .map(|k| (2.0 * (probs[0] + probs[k]) - 1.0).abs())
            .fold(0.0, f64::max);
        assert!(can.is_d2_covariant);
        assert_eq!(can.c3, 0.0);
        assert!((can.d3 - largest).abs() < 1e-12);
        assert!(can.d3 >= can.d2 && can.d2 >= can.d1);
        can.check_conventions().unwrap();
    }

    #[test]
    fn canonical_amplitude_damping() {
        let aff = to_affine(&ChannelSpec::amp_damp(0.36).unwrap()).unwrap();
        let can = canonicalize_d2(&aff);
        assert!(can.is_d2_covariant);
        assert!((can.d1 - 0.6).abs() < 1e-12);
        assert!((can.d2 - 0.6).abs() < 1e-12);
        assert!((can.d3 - 0.36).abs() < 1e-12);
        assert!((can.c3 - 0.64).abs() < 1e-12);
    }

    #[test]
    fn skewed_displacement_is_not_covariant() {
        let aff = QubitAffine::new(
            [[0.5, 0.0, 0.0], [0.0, 0.5, 0.0], [0.0, 0.0, 0.5]],
            [0.1, 0.0, 0.2],
        )
        .unwrap();
        let can = canonicalize_d2(&aff);
        assert!(!can.is_d2_covariant);
        assert!(matches!(can.check_conventions(), Err(Error::NotD2Covariant { .. })));
    }

    #[test]
    fn rotated_channel_keeps_canonical_form() {
        // conjugating by unitaries rotates A and b but leaves (d, c3) intact
        let mut rng = rng_from(12);
        let base = to_affine(&ChannelSpec::amp_damp(0.5).unwrap()).unwrap();
        let u_in = to_affine(&ChannelSpec::unitary(crate::sampling::haar_unitary(2, &mut rng)).unwrap()).unwrap();
        let u_out = to_affine(&ChannelSpec::unitary(crate::sampling::haar_unitary(2, &mut rng)).unwrap()).unwrap();
        let rotated = u_out.after(&base.after(&u_in));
        let can = canonicalize_d2(&rotated);
        assert!(can.is_d2_covariant, "residual {}", can.offaxis_residual);
        assert!((can.d2 - 0.5f64.sqrt()).abs() < 1e-10);
        assert!((can.d3 - 0.5).abs() < 1e-10);
        assert!((can.c3 - 0.5).abs() < 1e-10);
    }

    #[test]
    fn canonical_frame_maps_distances() {
        // |A x + ω b| = |D (F x) − ω c| for every input x
        let mut rng = rng_from(13);
        let base = to_affine(&ChannelSpec::amp_damp(0.3).unwrap()).unwrap();
        let u_in = to_affine(&ChannelSpec::unitary(crate::sampling::haar_unitary(2, &mut rng)).unwrap()).unwrap();
        let u_out = to_affine(&ChannelSpec::unitary(crate::sampling::haar_unitary(2, &mut rng)).unwrap()).unwrap();
        let aff = u_out.after(&base.after(&u_in));
        let can = canonicalize_d2(&aff);
        let canon = can.canonical_affine();
        for _ in 0..50 {
            let x = random_bloch(&mut rng);
            let omega: f64 = rng.random_range(-1.0..1.0);
            let lhs = vec3_norm(&aff.apply_weighted(&x, omega));
            let fx = mat3_vec(&can.input_frame, &x);
            let rhs = vec3_norm(&canon.apply_weighted(&fx, omega));
            assert!((lhs - rhs).abs() < 1e-10);
        }
    }

    #[test]
    fn outside_ball_rejected() {
        assert!(QubitAffine::new(IDENTITY3, [0.1, 0.0, 0.0]).is_err());
    }

    #[test]
    fn bloch_round_trip() {
        let r = [0.3, -0.2, 0.5];
        let back = bloch_vector(&bloch_state(&r));
        assert!((0..3).all(|i| (r[i] - back[i]).abs() < 1e-15));
    }
}
