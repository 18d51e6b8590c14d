//! Work content of a qubit battery: passive and Gibbs states, ergotropy and
//! its incoherent/coherent split, charging power.

mod power;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::qmat::{
    relative_entropies, state_functionals, eig_hermitian, FloorPolicy, Ket, Matrix2, QubitState,
};

pub use power::{power_series, PowerSeries};

/// Radicands in `[-RADICAND_TOL, 0)` are clamped to zero, anything lower is an error.
pub const RADICAND_TOL: f64 = 1e-12;

/// Hermitian system Hamiltonian with its spectrum sorted ascending.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hamiltonian2 {
    matrix: Matrix2,
    energies: [f64; 2],
    basis: [Ket; 2],
}

impl Hamiltonian2 {
    pub fn new(matrix: Matrix2) -> Result<Self> {
        let eig = eig_hermitian(&matrix)?;
        Ok(Hamiltonian2 {
            matrix: matrix.hermitian_part(),
            energies: [eig.values[1], eig.values[0]],
            basis: [eig.vectors[1], eig.vectors[0]],
        })
    }

    /// `ω₀ σ₊σ₋ = diag(0, ω₀)`
    pub fn qubit(omega0: f64) -> Self {
        let zero = num_complex::Complex64::new(0.0, 0.0);
        let one = num_complex::Complex64::new(1.0, 0.0);
        let (energies, basis) = if omega0 >= 0.0 {
            ([0.0, omega0], [[one, zero], [zero, one]])
        } else {
            ([omega0, 0.0], [[zero, one], [one, zero]])
        };
        Hamiltonian2 { matrix: Matrix2::diag(0.0, omega0), energies, basis }
    }

    pub fn matrix(&self) -> &Matrix2 {
        &self.matrix
    }

    /// Ascending.
    pub fn energies(&self) -> [f64; 2] {
        self.energies
    }

    /// `basis()[i]` is the eigenvector of `energies()[i]`.
    pub fn basis(&self) -> [Ket; 2] {
        self.basis
    }

    pub fn gap(&self) -> f64 {
        self.energies[1] - self.energies[0]
    }

    /// `Tr(ρH)`
    pub fn energy(&self, rho: &QubitState) -> f64 {
        rho.matrix().trace_product(&self.matrix).re
    }

    /// `Σ pᵢ |εᵢ⟩⟨εᵢ|`
    fn diagonal_state(&self, p: [f64; 2]) -> QubitState {
        let [e0, e1] = &self.basis;
        let m = Matrix2::outer(e0, e0).scale(p[0]) + Matrix2::outer(e1, e1).scale(p[1]);
        QubitState::from_matrix_unchecked(m)
    }
}

/// Thermal state together with its partition function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GibbsState {
    pub state: QubitState,
    /// `Z = Tr e^{−βH}`
    pub z: f64,
}

pub fn gibbs_state(h: &Hamiltonian2, temperature: f64) -> Result<GibbsState> {
    if !(temperature > 0.0) {
        return Err(Error::InvalidParams("temperature must be > 0"));
    }
    let beta = 1.0 / temperature;
    let [e0, e1] = h.energies();
    // shifted by the ground energy so the weights cannot overflow
    let w1 = (-beta * (e1 - e0)).exp();
    let norm = 1.0 + w1;
    let state = h.diagonal_state([1.0 / norm, w1 / norm]);
    Ok(GibbsState { state, z: (-beta * e0).exp() * norm })
}

/// Eigenvalues of `ρ` in descending order placed on ascending energies.
pub fn passive_state(rho: &QubitState, h: &Hamiltonian2) -> QubitState {
    h.diagonal_state(rho.spectrum().values)
}

/// `Σ_{j,i} r_j ε_i (|⟨r_j|ε_i⟩|² − δ_ij)`.
pub fn ergotropy(rho: &QubitState, h: &Hamiltonian2) -> f64 {
    let eig = rho.spectrum();
    let e = h.energies();
    let basis = h.basis();
    let mut w = 0.0;
    for j in 0..2 {
        for i in 0..2 {
            let overlap = (basis[i][0].conj() * eig.vectors[j][0]
                + basis[i][1].conj() * eig.vectors[j][1])
                .norm_sqr();
            let delta = if i == j { 1.0 } else { 0.0 };
            w += eig.values[j] * e[i] * (overlap - delta);
        }
    }
    w.max(0.0)
}

/// `Tr(ρH) − Tr(ρ_passive H)`.
pub fn ergotropy_by_energy(rho: &QubitState, h: &Hamiltonian2) -> f64 {
    h.energy(rho) - h.energy(&passive_state(rho, h))
}

/// Lowest-energy state with the same off-diagonal elements as `ρ`: the
/// populations are ordered so the excited level holds the smaller one.
pub fn coherence_invariant_state(rho: &QubitState) -> Result<QubitState> {
    let (gg, ee) = rho.populations();
    let eg = rho.coherence();
    let m = Matrix2::new(gg.max(ee).into(), eg.conj(), eg, gg.min(ee).into());
    QubitState::new(m).map_err(|_| Error::NotAState)
}

/// Ergotropy with its incoherent and coherent parts, plus two independent
/// evaluations of the coherent part for cross-checking.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErgotropyBreakdown {
    pub w: f64,
    pub w_i: f64,
    pub w_c: f64,
    /// `[C(ρ) + S(E(σ)‖ρ_eq) − D(ρ‖ρ_eq)] / β`
    pub w_c_eq16: f64,
    /// `(ω₀/2)[√(2F−1) − √(2F−1−C_l1²)]` with `F = Tr ρ²`
    pub w_c_eq18_minus: f64,
    /// Same with the `+` sign.
    pub w_c_eq18_plus: f64,
}

pub fn ergotropy_breakdown(
    rho: &QubitState,
    h: &Hamiltonian2,
    temperature: f64,
    floor: f64,
) -> Result<ErgotropyBreakdown> {
    let gibbs = gibbs_state(h, temperature)?;
    let beta = 1.0 / temperature;
    let w = ergotropy(rho, h);
    let sigma = coherence_invariant_state(rho)?;
    let w_i = (rho.matrix().trace_product(h.matrix()) - sigma.matrix().trace_product(h.matrix())).re;
    let w_c = w - w_i;

    let f = state_functionals(rho);
    let to_sigma = relative_entropies(&sigma.dephased(), &gibbs.state, floor, FloorPolicy::Clamp)?;
    let to_rho = relative_entropies(rho, &gibbs.state, floor, FloorPolicy::Clamp)?;
    let w_c_eq16 = (f.rel_ent_coherence + to_sigma.quantum - to_rho.classical) / beta;

    let outer = clamped_sqrt(2.0 * f.purity - 1.0)?;
    let inner = clamped_sqrt(2.0 * f.purity - 1.0 - f.l1_coherence * f.l1_coherence)?;
    let half_gap = 0.5 * h.gap();
    Ok(ErgotropyBreakdown {
        w,
        w_i,
        w_c,
        w_c_eq16,
        w_c_eq18_minus: half_gap * (outer - inner),
        w_c_eq18_plus: half_gap * (outer + inner),
    })
}

fn clamped_sqrt(x: f64) -> Result<f64> {
    if x >= 0.0 {
        Ok(x.sqrt())
    } else if x >= -RADICAND_TOL {
        Ok(0.0)
    } else {
        Err(Error::NumericalDomain(x))
    }
}
