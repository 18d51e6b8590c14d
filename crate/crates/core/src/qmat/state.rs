use num_complex::Complex64;

use super::matrix::{eig_hermitian_unchecked, Ket, Matrix2, SpectralDecomposition};
use crate::error::{Error, Result};

/// Tolerance on the density-matrix invariants (Hermiticity, trace, positivity).
pub const STATE_TOL: f64 = 1e-12;

/// Single-qubit density matrix in the `{|g⟩, |e⟩}` basis.
///
/// Always Hermitian with unit trace and eigenvalues `≥ -1e-12`; the
/// constructor refuses anything else.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitState {
    rho: Matrix2,
}

impl QubitState {
    pub fn new(rho: Matrix2) -> Result<Self> {
        if !rho.is_finite() {
            return Err(Error::InvalidState("non-finite entries"));
        }
        if rho.hermiticity_defect() > STATE_TOL {
            return Err(Error::InvalidState("not Hermitian"));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState("trace differs from 1"));
        }
        let rho = rho.hermitian_part();
        if eig_hermitian_unchecked(&rho).min() < -STATE_TOL {
            return Err(Error::InvalidState("negative eigenvalue"));
        }
        Ok(QubitState { rho })
    }

    /// Pure state `c_g|g⟩ + c_e|e⟩`; amplitudes must be normalized to 1e-12.
    pub fn from_amplitudes(c_g: Complex64, c_e: Complex64) -> Result<Self> {
        let norm = c_g.norm_sqr() + c_e.norm_sqr();
        if !((norm - 1.0).abs() <= STATE_TOL) {
            return Err(Error::InvalidState("amplitudes are not normalized"));
        }
        let psi: Ket = [c_g, c_e];
        Self::new(Matrix2::outer(&psi, &psi))
    }

    /// `diag(p_g, p_e)`
    pub fn diagonal(p_g: f64, p_e: f64) -> Result<Self> {
        Self::new(Matrix2::diag(p_g, p_e))
    }

    pub fn ground() -> Self {
        QubitState { rho: Matrix2::diag(1.0, 0.0) }
    }

    pub fn excited() -> Self {
        QubitState { rho: Matrix2::diag(0.0, 1.0) }
    }

    pub fn maximally_mixed() -> Self {
        QubitState { rho: Matrix2::diag(0.5, 0.5) }
    }

    /// `|+⟩⟨+|`
    pub fn plus() -> Self {
        QubitState { rho: Matrix2::from_real(0.5, 0.5, 0.5, 0.5) }
    }

    /// Builds a state from Bloch coordinates; `|r| ≤ 1` is required.
    pub fn from_bloch(x: f64, y: f64, z: f64) -> Result<Self> {
        let half = 0.5;
        Self::new(Matrix2::new(
            Complex64::new(half * (1.0 + z), 0.0),
            Complex64::new(half * x, -half * y),
            Complex64::new(half * x, half * y),
            Complex64::new(half * (1.0 - z), 0.0),
        ))
    }

    /// Trusted constructor for states assembled from closed forms.
    pub(crate) fn from_parts(p_gg: f64, p_ee: f64, eg: Complex64) -> Self {
        QubitState { rho: Matrix2::new(p_gg.into(), eg.conj(), eg, p_ee.into()) }
    }

    /// Trusted constructor for matrices that are states by construction.
    pub(crate) fn from_matrix_unchecked(rho: Matrix2) -> Self {
        QubitState { rho: rho.hermitian_part() }
    }

    pub fn matrix(&self) -> &Matrix2 {
        &self.rho
    }

    /// `(ρ_gg, ρ_ee)`
    pub fn populations(&self) -> (f64, f64) {
        (self.rho.m[0][0].re, self.rho.m[1][1].re)
    }

    /// `ρ_eg = ⟨e|ρ|g⟩`
    pub fn coherence(&self) -> Complex64 {
        self.rho.m[1][0]
    }

    pub fn spectrum(&self) -> SpectralDecomposition {
        eig_hermitian_unchecked(&self.rho)
    }

    /// Diagonal part in the computational basis.
    pub fn dephased(&self) -> QubitState {
        QubitState { rho: self.rho.dephased() }
    }

    /// `(x, y, z)` with `ρ = (I + r·σ)/2`.
    pub fn bloch(&self) -> (f64, f64, f64) {
        let eg = self.coherence();
        let (gg, ee) = self.populations();
        (2.0 * eg.re, 2.0 * eg.im, gg - ee)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_valid_and_rejects_invalid() {
        assert!(QubitState::diagonal(0.7, 0.3).is_ok());
        assert!(matches!(QubitState::diagonal(0.7, 0.4), Err(Error::InvalidState(_))));
        assert!(matches!(QubitState::diagonal(1.2, -0.2), Err(Error::InvalidState(_))));
        let m = Matrix2::from_real(0.5, 0.3, 0.1, 0.5);
        assert!(matches!(QubitState::new(m), Err(Error::InvalidState(_))));
        assert!(QubitState::from_bloch(0.0, 0.0, 1.1).is_err());
    }

    #[test]
    fn amplitudes_must_be_normalized() {
        let h = Complex64::new(0.5, 0.0);
        assert!(QubitState::from_amplitudes(h, h).is_err());
        let s = QubitState::from_amplitudes(Complex64::new(3f64.sqrt() / 2.0, 0.0), h).unwrap();
        let (gg, ee) = s.populations();
        assert!((gg - 0.75).abs() < 1e-15 && (ee - 0.25).abs() < 1e-15);
        assert!((s.coherence().re - 3f64.sqrt() / 4.0).abs() < 1e-15);
    }

    #[test]
    fn bloch_round_trip() {
        let s = QubitState::from_bloch(0.3, -0.2, 0.5).unwrap();
        let (x, y, z) = s.bloch();
        assert!((x - 0.3).abs() < 1e-15 && (y + 0.2).abs() < 1e-15 && (z - 0.5).abs() < 1e-15);
    }
}
