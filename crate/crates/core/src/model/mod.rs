//! Channel and uncertainty data types for the cognitive-radio downlink.
//!
//! Channels are complex vectors of length `N` (one entry per transmit
//! antenna). Every nominal channel carries a Euclidean uncertainty ball of
//! vector radius `δ`; the designers work with the lifted matrix ball
//! `‖Δ‖_F ≤ ε` where `Δ = h̃a† + ah̃† + aa†`, and `ε = δ² + 2δ‖h̃‖` bounds it.

mod scenario;

pub use scenario::{RadiusSpec, ScenarioConfig, Threshold};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::conic::{embed_hermitian, jacobi_eigensym, SymEigen};
use crate::error::{invalid, Error, Result};

/// Entrywise tolerance for the Hermitian check, relative to the largest entry.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Complex column vector of channel gains or beamforming weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVec(DVector<Complex64>);

impl ComplexVec {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return invalid("complex vector must have at least one entry");
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return invalid("complex vector entries must be finite");
        }
        Ok(Self(DVector::from_vec(entries)))
    }

    pub fn zeros(len: usize) -> Self {
        Self(DVector::zeros(len))
    }

    pub fn from_dvector(v: DVector<Complex64>) -> Self {
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_dvector(&self) -> &DVector<Complex64> {
        &self.0
    }

    pub fn as_slice(&self) -> &[Complex64] {
        self.0.as_slice()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn norm_squared(&self) -> f64 {
        self.0.norm_squared()
    }

    /// `self† · other`
    pub fn inner(&self, other: &ComplexVec) -> Complex64 {
        self.0.dotc(&other.0)
    }

    /// `|self† · other|²`, the received power through channel `other`.
    pub fn gain_through(&self, channel: &ComplexVec) -> f64 {
        self.inner(channel).norm_sqr()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self(self.0.map(|z| z * factor))
    }

    pub fn add(&self, other: &ComplexVec) -> Self {
        Self(&self.0 + &other.0)
    }
}

/// Complex Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMat(DMatrix<Complex64>);

impl HermitianMat {
    /// Validates Hermitian symmetry; the stored matrix is symmetrized exactly.
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return invalid(format!(
                "Hermitian matrix must be square and non-empty, got {}x{}",
                m.nrows(),
                m.ncols()
            ));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return invalid("Hermitian matrix entries must be finite");
        }
        let scale = 1.0 + m.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let n = m.nrows();
        for i in 0..n {
            for j in 0..=i {
                if (m[(i, j)] - m[(j, i)].conj()).norm() > HERMITIAN_TOL * scale {
                    return invalid(format!("matrix is not Hermitian at ({i}, {j})"));
                }
            }
        }
        Ok(Self::symmetrized(m))
    }

    fn symmetrized(m: DMatrix<Complex64>) -> Self {
        let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        Self(h)
    }

    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn from_real_diagonal(d: &[f64]) -> Self {
        let n = d.len();
        Self(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(d[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `Tr(self · other)`, real for Hermitian arguments.
    pub fn trace_product(&self, other: &HermitianMat) -> f64 {
        // Tr(AB) = Σ_ij A_ij B_ji = Σ_ij A_ij conj(B_ij)
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a * b.conj()).re)
            .sum()
    }

    /// `v† · self · v`
    pub fn quadratic_form(&self, v: &ComplexVec) -> f64 {
        let mv = &self.0 * v.as_dvector();
        v.as_dvector().dotc(&mv).re
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self(&self.0 * Complex64::new(factor, 0.0))
    }

    pub fn add(&self, other: &HermitianMat) -> Self {
        Self(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &HermitianMat) -> Self {
        Self(&self.0 - &other.0)
    }

    /// Eigen-decomposition via the real symmetric embedding. Eigenvalues are
    /// ascending; column `i` of the returned matrix is a unit eigenvector.
    pub fn eigen(&self) -> (Vec<f64>, DMatrix<Complex64>) {
        let n = self.dim();
        let emb = embed_hermitian(self).expect("stored matrix is Hermitian");
        let SymEigen { values, vectors } =
            jacobi_eigensym(&emb).expect("embedding is symmetric");
        // Every eigenvalue appears twice in the embedding, with eigenvectors
        // [a; b] and [-b; a] that map to the same complex direction up to a
        // phase. Greedy deflation picks one representative per complex
        // dimension.
        let mut chosen: Vec<DVector<Complex64>> = Vec::with_capacity(n);
        let mut chosen_vals = Vec::with_capacity(n);
        for idx in (0..2 * n).rev() {
            if chosen.len() == n {
                break;
            }
            let col = vectors.column(idx);
            let mut v = DVector::from_fn(n, |i, _| Complex64::new(col[i], col[i + n]));
            for u in &chosen {
                let proj = u.dotc(&v);
                v -= u * proj;
            }
            let nv = v.norm();
            if nv > 0.5 {
                chosen.push(v / Complex64::new(nv, 0.0));
                chosen_vals.push(values[idx]);
            }
        }
        chosen.reverse();
        chosen_vals.reverse();
        let vecs = DMatrix::from_columns(&chosen);
        (chosen_vals, vecs)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let emb = embed_hermitian(self).expect("stored matrix is Hermitian");
        jacobi_eigensym(&emb).expect("embedding is symmetric").values[0]
    }
}

/// Uncertainty ball around one nominal channel: vector radius `δ` and the
/// lifted matrix radius `ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyBall {
    pub vector_radius: f64,
    pub matrix_radius: f64,
}

impl UncertaintyBall {
    pub fn none() -> Self {
        Self {
            vector_radius: 0.0,
            matrix_radius: 0.0,
        }
    }

    pub fn from_vector_radius(delta: f64, nominal: &ComplexVec) -> Result<Self> {
        Ok(Self {
            vector_radius: delta,
            matrix_radius: lift_radius(delta, nominal)?,
        })
    }

    pub fn from_matrix_radius(eps: f64, nominal: &ComplexVec) -> Result<Self> {
        Ok(Self {
            vector_radius: unlift_radius(eps, nominal)?,
            matrix_radius: eps,
        })
    }
}

/// Half-wavelength ULA steering vector; entry `i` is `exp(jπ·i·cos θ)`.
pub fn ula_steering(theta_degrees: f64, n_antennas: usize) -> Result<ComplexVec> {
    if n_antennas == 0 {
        return invalid("n_antennas must be positive");
    }
    if !theta_degrees.is_finite() {
        return invalid("steering angle must be finite");
    }
    let phase = std::f64::consts::PI * theta_degrees.to_radians().cos();
    let entries = (0..n_antennas)
        .map(|i| Complex64::from_polar(1.0, phase * i as f64))
        .collect();
    ComplexVec::new(entries)
}

/// Matrix-ball radius covering every lifted perturbation of a vector ball:
/// `ε = δ² + 2δ‖h̃‖`.
pub fn lift_radius(vector_radius: f64, nominal: &ComplexVec) -> Result<f64> {
    if !(vector_radius >= 0.0) || !vector_radius.is_finite() {
        return invalid(format!("vector radius must be finite and >= 0, got {vector_radius}"));
    }
    Ok(vector_radius * vector_radius + 2.0 * vector_radius * nominal.norm())
}

/// Inverse of [`lift_radius`]: the nonnegative root of `δ² + 2δ‖h̃‖ = ε`.
pub fn unlift_radius(matrix_radius: f64, nominal: &ComplexVec) -> Result<f64> {
    if !(matrix_radius >= 0.0) || !matrix_radius.is_finite() {
        return invalid(format!("matrix radius must be finite and >= 0, got {matrix_radius}"));
    }
    let r = nominal.norm();
    // ε / (r + sqrt(r² + ε)) is the cancellation-free form of sqrt(r² + ε) - r.
    let denom = r + (r * r + matrix_radius).sqrt();
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(matrix_radius / denom)
}

/// Rank-one Hermitian matrix `v v†`.
pub fn outer_product(v: &ComplexVec) -> HermitianMat {
    let d = v.as_dvector();
    HermitianMat(d * d.adjoint())
}

/// The lifted matrix perturbation `h̃a† + ah̃† + aa†`.
pub fn lifted_perturbation(nominal: &ComplexVec, a: &ComplexVec) -> HermitianMat {
    let h = nominal.as_dvector();
    let a = a.as_dvector();
    HermitianMat(h * a.adjoint() + a * h.adjoint() + a * a.adjoint())
}

/// Draws perturbation vectors from a complex Euclidean ball.
#[derive(Debug, Clone, Copy)]
pub struct PerturbationSampler {
    /// Probability that a draw lies exactly on the sphere `‖a‖ = δ`.
    pub boundary_fraction: f64,
}

impl Default for PerturbationSampler {
    fn default() -> Self {
        Self {
            boundary_fraction: 0.5,
        }
    }
}

impl PerturbationSampler {
    pub fn new(boundary_fraction: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&boundary_fraction) {
            return invalid("boundary fraction must lie in [0, 1]");
        }
        Ok(Self { boundary_fraction })
    }

    pub fn sample<R: Rng + ?Sized>(&self, radius: f64, dim: usize, rng: &mut R) -> Result<ComplexVec> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return invalid(format!("perturbation radius must be finite and >= 0, got {radius}"));
        }
        if dim == 0 {
            return invalid("perturbation dimension must be positive");
        }
        if radius == 0.0 {
            return Ok(ComplexVec::zeros(dim));
        }
        let on_boundary = rng.random::<f64>() < self.boundary_fraction;
        sample_ball(radius, dim, on_boundary, rng)
    }

    /// Draws from the sphere `‖a‖ = δ` only.
    pub fn sample_boundary<R: Rng + ?Sized>(&self, radius: f64, dim: usize, rng: &mut R) -> Result<ComplexVec> {
        if !(radius >= 0.0) || dim == 0 {
            return invalid("radius must be >= 0 and dimension positive");
        }
        if radius == 0.0 {
            return Ok(ComplexVec::zeros(dim));
        }
        sample_ball(radius, dim, true, rng)
    }
}

fn sample_ball<R: Rng + ?Sized>(radius: f64, dim: usize, on_boundary: bool, rng: &mut R) -> Result<ComplexVec> {
    let mut v: DVector<Complex64> = DVector::from_fn(dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let mut n = v.norm();
    while n == 0.0 {
        v = DVector::from_fn(dim, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        n = v.norm();
    }
    // Uniform in a 2·dim real ball: radius scales as U^(1/(2 dim)).
    let r = if on_boundary {
        radius
    } else {
        radius * rng.random::<f64>().powf(1.0 / (2.0 * dim as f64))
    };
    let mut out = v * Complex64::new(r / n, 0.0);
    let actual = out.norm();
    if actual > radius {
        out *= Complex64::new(radius / actual, 0.0);
    }
    Ok(ComplexVec(out))
}

/// One perturbation draw from a seeded generator with the default 50/50 mix.
pub fn sample_perturbation(vector_radius: f64, dim: usize, seed: u64) -> Result<ComplexVec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PerturbationSampler::default().sample(vector_radius, dim, &mut rng)
}

pub(crate) fn check_dim(what: &str, got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::DimensionMismatch(format!(
            "{what} has length {got}, expected {want}"
        )));
    }
    Ok(())
}
