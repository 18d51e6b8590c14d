use num_complex::Complex64;
use proptest::prelude::*;
use qslbattery_core::qmat::{
    affinity, eig_hermitian, fidelity, matrix_function, schatten_norms, singular_values, Matrix2,
    QubitState, ScalarMap,
};

fn entry() -> impl Strategy<Value = Complex64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn matrix() -> impl Strategy<Value = Matrix2> {
    (entry(), entry(), entry(), entry()).prop_map(|(a, b, c, d)| Matrix2::new(a, b, c, d))
}

fn state() -> impl Strategy<Value = QubitState> {
    (0.0..1.0f64, 0.0..core::f64::consts::PI, 0.0..core::f64::consts::TAU).prop_map(
        |(u, theta, phi)| {
            let r = u.cbrt();
            QubitState::from_bloch(
                r * theta.sin() * phi.cos(),
                r * theta.sin() * phi.sin(),
                r * theta.cos(),
            )
            .unwrap()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn norm_ordering(m in matrix()) {
        let n = schatten_norms(&m);
        prop_assert!(n.op <= n.hs * (1.0 + 1e-12) + 1e-15);
        prop_assert!(n.hs <= n.tr * (1.0 + 1e-12) + 1e-15);
        prop_assert!(n.tr <= 2f64.sqrt() * n.hs * (1.0 + 1e-12) + 1e-15);
    }

    #[test]
    fn singular_values_match_gram_spectrum(m in matrix()) {
        let gram = m.adjoint() * m;
        let e = eig_hermitian(&gram).unwrap();
        let [s1, s2] = singular_values(&m);
        let scale = e.max().max(1.0);
        prop_assert!((s1 * s1 - e.values[0]).abs() <= 1e-10 * scale);
        prop_assert!((s2 * s2 - e.values[1]).abs() <= 1e-10 * scale);
    }

    #[test]
    fn eigendecomposition_reconstructs(m in matrix()) {
        let h = m.hermitian_part();
        let e = eig_hermitian(&h).unwrap();
        prop_assert!(e.values[0] >= e.values[1]);
        prop_assert!(e.reconstruct().max_abs_diff(&h) <= 1e-12 * h.max_abs().max(1.0));
    }

    #[test]
    fn sqrt_squares_back(s in state()) {
        let r = matrix_function(s.matrix(), ScalarMap::Sqrt, 1e-12).unwrap();
        prop_assert!((r * r).max_abs_diff(s.matrix()) <= 1e-12);
    }

    #[test]
    fn fidelity_symmetric_and_bounded(a in state(), b in state()) {
        let f = fidelity(&a, &b);
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert!((f - fidelity(&b, &a)).abs() <= 1e-10);
        let x = affinity(&a, &b);
        prop_assert!((x - affinity(&b, &a)).abs() <= 1e-12);
        // A² ≤ F for qubits
        prop_assert!(x * x <= f + 1e-10);
    }

    #[test]
    fn fidelity_of_state_with_itself(a in state()) {
        prop_assert!((fidelity(&a, &a) - 1.0).abs() <= 1e-10);
    }
}
