//! Randomized invariants. Each suite runs standalone with
//! `cargo test -p graphstate --test properties`.

use graphstate::entanglement::{
    certify_zero_tangle, ckw_terms, concurrence, hyperdeterminant_tangle, lemma1_decomposition, member_tangles,
    theorem1_superoperator, three_tangle_pure, CertifyOptions, Decomposition, IorZ,
};
use graphstate::graphs::{local_complement, parse_graph6, to_graph6};
use graphstate::linalg::{CMatrix, CVector};
use graphstate::qstate::{
    build_graph_state, build_graph_state_in_order, lc_unitary, partial_trace, states_equal_up_to_phase, LocalUnitary,
};
use graphstate::{DensityMatrix, Graph, StateVector, VertexSet};
use nalgebra::Matrix2;
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let pairs = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)));
            let edges: Vec<_> = pairs.zip(bits).filter(|(_, on)| *on).map(|(e, _)| e).collect();
            Graph::from_edges(n, &edges).unwrap()
        })
    })
}

fn complex_vec(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len)
        .prop_map(|v| v.into_iter().map(|(re, im)| c(re, im)).collect())
}

fn pure_state(n: usize) -> impl Strategy<Value = StateVector> {
    complex_vec(1 << n)
        .prop_filter("nonzero", |v| v.iter().map(|a| a.norm_sqr()).sum::<f64>() > 1e-3)
        .prop_map(move |v| StateVector::normalized(n, v).unwrap().0)
}

/// Generic SU(2) element with a global phase, from Euler angles.
fn unitary2() -> impl Strategy<Value = Matrix2<Complex64>> {
    let angle = -std::f64::consts::PI..std::f64::consts::PI;
    (angle.clone(), angle.clone(), angle.clone(), angle).prop_map(|(alpha, beta, gamma, delta)| {
        let e = |t: f64| Complex64::from_polar(1.0, t);
        let (s, co) = ((gamma / 2.0).sin(), (gamma / 2.0).cos());
        Matrix2::new(
            e(alpha - (beta + delta) / 2.0) * co,
            -e(alpha - (beta - delta) / 2.0) * s,
            e(alpha + (beta - delta) / 2.0) * s,
            e(alpha + (beta + delta) / 2.0) * co,
        )
    })
}

/// Mixture of `k` random pure states on `n` qubits.
fn mixed_state(n: usize, k: usize) -> impl Strategy<Value = DensityMatrix> {
    let dim = 1usize << n;
    (proptest::collection::vec(complex_vec(dim), k), proptest::collection::vec(0.05f64..1.0, k)).prop_map(
        move |(vecs, weights)| {
            let mut m = CMatrix::zeros(dim, dim);
            for (v, w) in vecs.iter().zip(&weights) {
                let v = CVector::from_vec(v.clone());
                let v = &v / c(v.norm(), 0.0);
                m += &v * v.adjoint() * c(*w, 0.0);
            }
            let tr = m.trace();
            DensityMatrix::new((0..n).collect(), m / tr).unwrap()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn cz_order_independence(g in graph_strategy(7), rot in 0usize..64, rev in any::<bool>()) {
        let mut order = g.edges();
        if !order.is_empty() {
            let k = rot % order.len();
            order.rotate_left(k);
        }
        if rev {
            order.reverse();
        }
        let a = build_graph_state(&g).unwrap();
        let b = build_graph_state_in_order(&g, &order).unwrap();
        let diff = a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(diff < 1e-15);
    }

    #[test]
    fn graph6_round_trip(g in graph_strategy(9)) {
        let text = to_graph6(&g);
        prop_assert_eq!(parse_graph6(&text).unwrap(), g);
    }

    #[test]
    fn local_complement_is_an_involution(g in graph_strategy(8), a in 0usize..8) {
        let a = a % g.n();
        let once = local_complement(&g, a).unwrap();
        prop_assert_eq!(local_complement(&once, a).unwrap(), g);
    }

    #[test]
    fn lc_unitary_maps_graph_states(g in graph_strategy(6), a in 0usize..6) {
        let a = a % g.n();
        let u = lc_unitary(&g, a).unwrap();
        let image = u.apply(&build_graph_state(&g).unwrap()).unwrap();
        let target = build_graph_state(&local_complement(&g, a).unwrap()).unwrap();
        prop_assert!(states_equal_up_to_phase(&image, &target).unwrap());
    }

    #[test]
    fn concurrence_is_local_unitary_invariant(
        rho in (1usize..=4).prop_flat_map(|k| mixed_state(2, k)),
        u in unitary2(),
        v in unitary2(),
    ) {
        let before = concurrence(&rho).unwrap();
        let after = concurrence(&LocalUnitary::from_factors(vec![u, v]).conjugate(&rho)).unwrap();
        prop_assert!((before - after).abs() < 1e-10, "{before} vs {after}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn ckw_monogamy(s in pure_state(3)) {
        let t = ckw_terms(&s).unwrap();
        prop_assert!(t.residual() >= -1e-12, "{t:?}");
        // the residual and 4|hyperdeterminant| are the same quantity
        let tau = three_tangle_pure(&s).unwrap();
        prop_assert!((tau - hyperdeterminant_tangle(s.amplitudes())).abs() < 1e-10);
        prop_assert!((tau - t.residual()).abs() < 1e-10);
        prop_assert!(tau <= 1.0 + 1e-12);
    }

    #[test]
    fn rank_two_decompositions_reconstruct(rho in mixed_state(3, 2)) {
        prop_assume!(rho.rank(1e-10) == 2);
        let d = lemma1_decomposition(&rho).unwrap();
        prop_assert!(d.reconstruction_error(&rho) < 1e-9);
        prop_assert!(d.validate(&rho).is_ok());
        let w: f64 = d.weights.iter().sum();
        prop_assert!((w - 1.0).abs() < 1e-9);
    }

    #[test]
    fn isometry_decompositions_reconstruct(rho in mixed_state(3, 2), phases in proptest::collection::vec(-3.0f64..3.0, 6)) {
        prop_assume!(rho.rank(1e-10) == 2);
        // columns of a 3x3 Fourier matrix, with row and column phases
        let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        let u = CMatrix::from_fn(3, 2, |i, j| {
            w.powu((i * j) as u32) * Complex64::from_polar(1.0 / 3f64.sqrt(), phases[i] + phases[3 + j])
        });
        let d = Decomposition::from_isometry(&rho, u).unwrap();
        prop_assert!(d.reconstruction_error(&rho) < 1e-9);
    }
}

/// Applies `Z` to every qubit position flagged in `zs`.
fn apply_z(s: &StateVector, zs: [IorZ; 3]) -> StateVector {
    let amps = s
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let flips = (0..3).filter(|&q| zs[q] == IorZ::Z && i >> (2 - q) & 1 == 1).count();
            if flips % 2 == 0 {
                *a
            } else {
                -*a
            }
        })
        .collect();
    StateVector::from_amplitudes(3, amps).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// rho -> rho/2 + U rho U^dag/2 with U a product of I and Z: the
    /// certified ensemble of rho and its image under U together decompose
    /// the output with the same average tangle, so the bound cannot grow.
    #[test]
    fn superoperator_does_not_raise_certified_tangle(
        g in graph_strategy(6).prop_filter("connected, n >= 4", |g| g.n() >= 4 && g.is_connected()),
        pick in 0usize..20,
        zs in proptest::array::uniform3(prop_oneof![Just(IorZ::I), Just(IorZ::Z)]),
    ) {
        let triples: Vec<VertexSet> = VertexSet::subsets_of_size(g.n(), 3).collect();
        let s = triples[pick % triples.len()];
        let rho = partial_trace(&build_graph_state(&g).unwrap(), s).unwrap();
        let out = certify_zero_tangle(&rho, &CertifyOptions::default()).unwrap();
        let cert = out.certificate.expect("graph-state triples certify");
        let d = &cert.decomposition;

        let image = theorem1_superoperator(&rho, zs).unwrap();
        let mut weights: Vec<f64> = d.weights.iter().map(|w| w / 2.0).collect();
        weights.extend(weights.clone());
        let mut members = d.members.clone();
        members.extend(d.members.iter().map(|m| apply_z(m, zs)));
        let mixed = Decomposition::from_members(&image, weights, members).unwrap();
        prop_assert!(mixed.reconstruction_error(&image) < 1e-9);
        let before: f64 = d.weights.iter().zip(member_tangles(d).unwrap()).map(|(w, t)| w * t).sum();
        let after: f64 = mixed.weights.iter().zip(member_tangles(&mixed).unwrap()).map(|(w, t)| w * t).sum();
        prop_assert!(after <= before + 1e-12, "{after} > {before}");
    }
}
