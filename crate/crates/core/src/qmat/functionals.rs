#[allow(unused_imports)]
use num_traits::Float;

use super::matrix::{sqrt_spectrum, trace_sqrt, Matrix2};
use super::state::QubitState;
use crate::error::{Error, Result};

/// Default eigenvalue floor applied before every logarithm.
pub const LOG_FLOOR: f64 = 1e-12;

/// `-x ln x` with `0 ln 0 = 0`.
#[inline]
pub(crate) fn entropy_term(x: f64) -> f64 {
    if x > 0.0 {
        -x * x.ln()
    } else {
        0.0
    }
}

/// Uhlmann fidelity `{Tr √(√ρ₀ ρ_t √ρ₀)}²`.
pub fn fidelity(rho0: &QubitState, rho_t: &QubitState) -> f64 {
    let s = sqrt_spectrum(&rho0.spectrum());
    let inner = (s * *rho_t.matrix() * s).hermitian_part();
    let tr = trace_sqrt(&inner);
    (tr * tr).clamp(0.0, 1.0)
}

/// Wigner-Yanase affinity `Tr(√ρ₀ √ρ_t)`.
pub fn affinity(rho0: &QubitState, rho_t: &QubitState) -> f64 {
    let a = sqrt_spectrum(&rho0.spectrum());
    let b = sqrt_spectrum(&rho_t.spectrum());
    a.trace_product(&b).re.clamp(0.0, 1.0)
}

/// von Neumann entropy in nats.
pub fn von_neumann_entropy(rho: &QubitState) -> f64 {
    rho.spectrum().values.iter().map(|&x| entropy_term(x)).sum()
}

/// Scalar functionals of a single state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateFunctionals {
    /// `Tr ρ²`
    pub purity: f64,
    /// von Neumann entropy (nats)
    pub entropy: f64,
    pub dephased: QubitState,
    /// `Σ_{i≠j} |ρ_ij|`
    pub l1_coherence: f64,
    /// `S(ρ^D) − S(ρ)`
    pub rel_ent_coherence: f64,
}

pub fn state_functionals(rho: &QubitState) -> StateFunctionals {
    let m = rho.matrix();
    let purity = m.trace_product(m).re;
    let entropy = von_neumann_entropy(rho);
    let (gg, ee) = rho.populations();
    let dephased_entropy = entropy_term(gg) + entropy_term(ee);
    StateFunctionals {
        purity,
        entropy,
        dephased: rho.dephased(),
        l1_coherence: 2.0 * rho.coherence().norm(),
        rel_ent_coherence: (dephased_entropy - entropy).max(0.0),
    }
}

/// How a reference state with eigenvalues below the floor is treated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FloorPolicy {
    Reject,
    Clamp,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelativeEntropies {
    /// `S(ρ‖σ) = Tr ρ ln ρ − Tr ρ ln σ`
    pub quantum: f64,
    /// `D(p‖s) = Σ pᵢ ln(pᵢ/sᵢ)` over descending eigenvalue lists.
    pub classical: f64,
}

pub fn relative_entropies(
    rho: &QubitState,
    sigma: &QubitState,
    floor: f64,
    policy: FloorPolicy,
) -> Result<RelativeEntropies> {
    if !(floor > 0.0) {
        return Err(Error::InvalidFloor(floor));
    }
    let er = rho.spectrum();
    let es = sigma.spectrum();
    if policy == FloorPolicy::Reject && es.min() < floor {
        return Err(Error::SingularReference(es.min()));
    }
    let ln_s = |x: f64| x.max(floor).ln();

    let neg_entropy: f64 = -er.values.iter().map(|&x| entropy_term(x)).sum::<f64>();
    let cross: f64 = (0..2)
        .map(|j| {
            let v = &es.vectors[j];
            rho.matrix().sandwich(v, v).re * ln_s(es.values[j])
        })
        .sum();
    let classical: f64 = (0..2)
        .map(|i| {
            let p = er.values[i];
            if p > 0.0 {
                p * (p.ln() - ln_s(es.values[i]))
            } else {
                0.0
            }
        })
        .sum();
    Ok(RelativeEntropies { quantum: neg_entropy - cross, classical })
}

/// `ln ρ` with eigenvalues clamped at `floor`.
pub fn log_state(rho: &QubitState, floor: f64) -> Matrix2 {
    rho.spectrum().map(|x| x.max(floor).ln())
}
