use core::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Column 2-vector. Index 0 is the ground state `|g⟩ = |0⟩`, index 1 the
/// excited state `|e⟩ = |1⟩`.
pub type Ket = [Complex64; 2];

/// Hermiticity tolerance accepted by the spectral routines.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalue gap below which a matrix is treated as degenerate.
pub const DEGENERATE_GAP: f64 = 1e-14;
/// Eigenvalues within this band (relative to the spectral radius, floored at 1)
/// are roundoff zeros for square roots.
pub const SPECTRAL_ZERO: f64 = 1e-14;
/// Most negative eigenvalue tolerated under a square root.
pub const NEGATIVE_EIG_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// General 2×2 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix2 {
    pub m: [[Complex64; 2]; 2],
}

impl Matrix2 {
    pub const ZERO: Matrix2 = Matrix2 { m: [[ZERO, ZERO], [ZERO, ZERO]] };
    pub const IDENTITY: Matrix2 = Matrix2 { m: [[ONE, ZERO], [ZERO, ONE]] };

    pub const fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Matrix2 { m: [[a, b], [c, d]] }
    }

    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Matrix2::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn diag(a: f64, d: f64) -> Self {
        Matrix2::from_real(a, 0.0, 0.0, d)
    }

    pub fn pauli_x() -> Self {
        Matrix2::from_real(0.0, 1.0, 1.0, 0.0)
    }

    pub fn pauli_y() -> Self {
        Matrix2::new(ZERO, Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0), ZERO)
    }

    pub fn pauli_z() -> Self {
        Matrix2::diag(1.0, -1.0)
    }

    /// `|u⟩⟨v|`
    pub fn outer(u: &Ket, v: &Ket) -> Self {
        Matrix2::new(
            u[0] * v[0].conj(),
            u[0] * v[1].conj(),
            u[1] * v[0].conj(),
            u[1] * v[1].conj(),
        )
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.m[i][j]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.m;
        Matrix2::new(m[0][0].conj(), m[1][0].conj(), m[0][1].conj(), m[1][1].conj())
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_c(&self, s: Complex64) -> Self {
        self.map(|z| z * s)
    }

    fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        let m = &self.m;
        Matrix2::new(f(m[0][0]), f(m[0][1]), f(m[1][0]), f(m[1][1]))
    }

    fn zip(&self, o: &Matrix2, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        let (a, b) = (&self.m, &o.m);
        Matrix2::new(
            f(a[0][0], b[0][0]),
            f(a[0][1], b[0][1]),
            f(a[1][0], b[1][0]),
            f(a[1][1], b[1][1]),
        )
    }

    pub fn entries(&self) -> [Complex64; 4] {
        [self.m[0][0], self.m[0][1], self.m[1][0], self.m[1][1]]
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries().iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &Matrix2) -> f64 {
        (*self - *other).max_abs()
    }

    /// `max |M - M†|`
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// `(M + M†) / 2`
    pub fn hermitian_part(&self) -> Self {
        (*self + self.adjoint()).scale(0.5)
    }

    /// Diagonal part in the computational basis.
    pub fn dephased(&self) -> Self {
        Matrix2::new(self.m[0][0], ZERO, ZERO, self.m[1][1])
    }

    /// Hilbert-Schmidt (Frobenius) norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sqr().sqrt()
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.entries().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn apply(&self, v: &Ket) -> Ket {
        let m = &self.m;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    /// `⟨u|M|v⟩`
    pub fn sandwich(&self, u: &Ket, v: &Ket) -> Complex64 {
        let mv = self.apply(v);
        u[0].conj() * mv[0] + u[1].conj() * mv[1]
    }

    /// `Tr(A B)` without forming the product.
    pub fn trace_product(&self, other: &Matrix2) -> Complex64 {
        let (a, b) = (&self.m, &other.m);
        a[0][0] * b[0][0] + a[0][1] * b[1][0] + a[1][0] * b[0][1] + a[1][1] * b[1][1]
    }
}

impl Add for Matrix2 {
    type Output = Matrix2;
    fn add(self, o: Matrix2) -> Matrix2 {
        self.zip(&o, |a, b| a + b)
    }
}

impl AddAssign for Matrix2 {
    fn add_assign(&mut self, o: Matrix2) {
        *self = *self + o;
    }
}

impl Sub for Matrix2 {
    type Output = Matrix2;
    fn sub(self, o: Matrix2) -> Matrix2 {
        self.zip(&o, |a, b| a - b)
    }
}

impl Neg for Matrix2 {
    type Output = Matrix2;
    fn neg(self) -> Matrix2 {
        self.map(|z| -z)
    }
}

impl Mul for Matrix2 {
    type Output = Matrix2;
    fn mul(self, o: Matrix2) -> Matrix2 {
        let (a, b) = (&self.m, &o.m);
        Matrix2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl Mul<f64> for Matrix2 {
    type Output = Matrix2;
    fn mul(self, s: f64) -> Matrix2 {
        self.scale(s)
    }
}

/// Eigen-decomposition of a Hermitian 2×2 matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralDecomposition {
    /// Eigenvalues, descending.
    pub values: [f64; 2],
    /// Orthonormal eigenvectors, `vectors[i]` belongs to `values[i]`.
    pub vectors: [Ket; 2],
}

impl SpectralDecomposition {
    pub fn reconstruct(&self) -> Matrix2 {
        self.map(|x| x)
    }

    /// `Σ f(λᵢ) |vᵢ⟩⟨vᵢ|`
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix2 {
        let [v0, v1] = &self.vectors;
        Matrix2::outer(v0, v0).scale(f(self.values[0])) + Matrix2::outer(v1, v1).scale(f(self.values[1]))
    }

    pub fn min(&self) -> f64 {
        self.values[1]
    }

    pub fn max(&self) -> f64 {
        self.values[0]
    }
}

/// Closed-form eigensolver for Hermitian 2×2 matrices.
///
/// The eigenvalue of larger magnitude comes from the trace/discriminant
/// formula; the other one from `det / λ`, which keeps small eigenvalues of
/// nearly pure states accurate. Degenerate spectra return the computational
/// basis.
pub fn eig_hermitian(m: &Matrix2) -> Result<SpectralDecomposition> {
    let defect = m.hermiticity_defect();
    if !(defect <= HERMITIAN_TOL) {
        return Err(Error::NotHermitian(defect));
    }
    Ok(eig_hermitian_unchecked(m))
}

pub(crate) fn eig_hermitian_unchecked(m: &Matrix2) -> SpectralDecomposition {
    let a = m.m[0][0].re;
    let d = m.m[1][1].re;
    let b = (m.m[0][1] + m.m[1][0].conj()) * 0.5;
    let mean = 0.5 * (a + d);
    let delta = 0.5 * (a - d);
    let r = delta.hypot(b.norm());
    let det = a * d - b.norm_sqr();

    let (hi, lo) = if mean >= 0.0 {
        let hi = mean + r;
        let lo = if hi != 0.0 { det / hi } else { mean - r };
        (hi, lo)
    } else {
        let lo = mean - r;
        (det / lo, lo)
    };

    if 2.0 * r < DEGENERATE_GAP {
        return SpectralDecomposition {
            values: [hi, lo],
            vectors: [[ONE, ZERO], [ZERO, ONE]],
        };
    }

    let v = if delta >= 0.0 {
        [Complex64::from(delta + r), b.conj()]
    } else {
        [b, Complex64::from(r - delta)]
    };
    let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    let v0 = [v[0] / norm, v[1] / norm];
    let v1 = [-v0[1].conj(), v0[0].conj()];
    SpectralDecomposition { values: [hi, lo], vectors: [v0, v1] }
}

/// Scalar maps that [`matrix_function`] lifts to Hermitian matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarMap {
    Sqrt,
    Log,
}

/// Applies `f` to the spectrum of a Hermitian matrix.
///
/// For `Log` the eigenvalues are clamped below at `floor` first. For `Sqrt`,
/// eigenvalues inside the roundoff band around zero are set to zero.
pub fn matrix_function(m: &Matrix2, f: ScalarMap, floor: f64) -> Result<Matrix2> {
    let eig = eig_hermitian(m)?;
    match f {
        ScalarMap::Sqrt => {
            if eig.min() < -NEGATIVE_EIG_TOL {
                return Err(Error::NegativeEigenvalue(eig.min()));
            }
            Ok(sqrt_spectrum(&eig))
        }
        ScalarMap::Log => {
            if !(floor > 0.0) {
                return Err(Error::InvalidFloor(floor));
            }
            Ok(eig.map(|x| x.max(floor).ln()))
        }
    }
}

/// Square root of a spectrum known to be positive semidefinite up to roundoff.
pub(crate) fn sqrt_spectrum(eig: &SpectralDecomposition) -> Matrix2 {
    let zero = SPECTRAL_ZERO * eig.max().abs().max(1.0);
    eig.map(|x| if x <= zero { 0.0 } else { x.sqrt() })
}

/// `Tr √M` for a positive semidefinite Hermitian matrix.
pub(crate) fn trace_sqrt(m: &Matrix2) -> f64 {
    let eig = eig_hermitian_unchecked(m);
    let zero = SPECTRAL_ZERO * eig.max().abs().max(1.0);
    eig.values.iter().map(|&x| if x <= zero { 0.0 } else { x.sqrt() }).sum()
}

/// Singular values `s₁ ≥ s₂` of a general 2×2 matrix.
pub fn singular_values(a: &Matrix2) -> [f64; 2] {
    let hs2 = a.frobenius_norm_sqr();
    let det = a.det().norm();
    // s1² + s2² = |A|²_F, s1·s2 = |det A|
    let disc = ((hs2 - 2.0 * det) * (hs2 + 2.0 * det)).max(0.0).sqrt();
    let s1 = (0.5 * (hs2 + disc)).sqrt();
    let s2 = if s1 > 0.0 { det / s1 } else { 0.0 };
    [s1, s2]
}

/// Operator, trace and Hilbert-Schmidt norms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchattenNorms {
    pub op: f64,
    pub tr: f64,
    pub hs: f64,
}

pub fn schatten_norms(a: &Matrix2) -> SchattenNorms {
    let [s1, s2] = singular_values(a);
    SchattenNorms { op: s1, tr: s1 + s2, hs: a.frobenius_norm() }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_half_is_degenerate() {
        let e = eig_hermitian(&Matrix2::IDENTITY.scale(0.5)).unwrap();
        assert_eq!(e.values, [0.5, 0.5]);
        assert!(e.reconstruct().max_abs_diff(&Matrix2::IDENTITY.scale(0.5)) < 1e-15);
    }

    #[test]
    fn diagonal_sorted_descending_with_basis_vectors() {
        let e = eig_hermitian(&Matrix2::diag(0.3, 0.7)).unwrap();
        assert!((e.values[0] - 0.7).abs() < 1e-15 && (e.values[1] - 0.3).abs() < 1e-15);
        assert!((e.vectors[0][1].norm() - 1.0).abs() < 1e-15);
        assert!((e.vectors[1][0].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pure_state_has_unit_and_zero_eigenvalues() {
        let psi = [c(3f64.sqrt() / 2.0, 0.0), c(0.5, 0.0)];
        let rho = Matrix2::outer(&psi, &psi);
        let e = eig_hermitian(&rho).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-15);
        assert!(e.values[1].abs() < 1e-15);
        assert!(e.reconstruct().max_abs_diff(&rho) < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = Matrix2::new(c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn sqrt_of_identity_and_projector() {
        let s = matrix_function(&Matrix2::IDENTITY, ScalarMap::Sqrt, 0.0).unwrap();
        assert!(s.max_abs_diff(&Matrix2::IDENTITY) < 1e-15);
        let g = Matrix2::diag(1.0, 0.0);
        let s = matrix_function(&g, ScalarMap::Sqrt, 0.0).unwrap();
        assert!(s.max_abs_diff(&g) < 1e-15);
    }

    #[test]
    fn sqrt_rejects_negative_eigenvalue() {
        let m = Matrix2::diag(1.0, -1e-6);
        assert!(matches!(
            matrix_function(&m, ScalarMap::Sqrt, 0.0),
            Err(Error::NegativeEigenvalue(_))
        ));
    }

    #[test]
    fn log_of_gibbs_populations() {
        let m = Matrix2::diag(0.73106, 0.26894);
        let l = matrix_function(&m, ScalarMap::Log, 1e-12).unwrap();
        // ln 0.73106 = -0.31325974..., ln 0.26894 = -1.31326697...
        assert!((l.m[0][0].re - (-0.313_259_743)).abs() < 1e-9);
        assert!((l.m[1][1].re - (-1.313_266_973)).abs() < 1e-9);
        assert!(l.m[0][1].norm() < 1e-15);
    }

    #[test]
    fn log_clamps_at_floor_and_rejects_bad_floor() {
        let l = matrix_function(&Matrix2::diag(1.0, 0.0), ScalarMap::Log, 1e-12).unwrap();
        assert!((l.m[1][1].re - 1e-12f64.ln()).abs() < 1e-12);
        assert!(matches!(
            matrix_function(&Matrix2::IDENTITY, ScalarMap::Log, 0.0),
            Err(Error::InvalidFloor(_))
        ));
    }

    #[test]
    fn norms_of_known_matrices() {
        let n = schatten_norms(&Matrix2::pauli_x());
        assert!((n.op - 1.0).abs() < 1e-15 && (n.tr - 2.0).abs() < 1e-15);
        assert!((n.hs - 2f64.sqrt()).abs() < 1e-15);
        let a = -2.5;
        let n = schatten_norms(&Matrix2::diag(a, -a));
        assert!((n.op - 2.5).abs() < 1e-15 && (n.tr - 5.0).abs() < 1e-15);
        assert!((n.hs - 2f64.sqrt() * 2.5).abs() < 1e-14);
    }

    #[test]
    fn traceless_hermitian_norms_from_eigenvalue_formula() {
        let (a, off) = (0.3, c(0.1, -0.4));
        let m = Matrix2::new(c(a, 0.0), off, off.conj(), c(-a, 0.0));
        let s = (a * a + off.norm_sqr()).sqrt();
        let n = schatten_norms(&m);
        assert!((n.op - s).abs() < 1e-15);
        assert!((n.tr - 2.0 * s).abs() < 1e-15);
        assert!((n.hs - 2f64.sqrt() * s).abs() < 1e-15);
    }

    #[test]
    fn zero_matrix_norms() {
        let n = schatten_norms(&Matrix2::ZERO);
        assert_eq!((n.op, n.tr, n.hs), (0.0, 0.0, 0.0));
    }
}
