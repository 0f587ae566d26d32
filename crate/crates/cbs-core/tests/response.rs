use cbs_core::atom::{self, AtomParams, Vec3, C64, I};
use cbs_core::response::*;
use proptest::prelude::*;

fn close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + b.norm())
}

fn vclose(a: Vec3, b: Vec3, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + b.norm())
}

#[test]
fn zero_probes_is_steady_state() {
    let p = AtomParams::new(1.7, -0.3);
    assert_eq!(response_vector(&p, &[]).unwrap(), atom::steady_bloch(&p));
}

#[test]
fn undriven_single_dashed_probe() {
    let p = AtomParams::new(0.0, 0.0);
    let w = 0.8;
    let v = response_vector(&p, &[SignedProbe::plus(w)]).unwrap();
    let expect = Vec3::new(C64::default(), -(I / 2.0) / (I * w + 1.0), C64::default());
    assert!(vclose(v, expect, 1e-14));
}

#[test]
fn two_probe_chain_expression() {
    let p = AtomParams::new(1.2, 0.5);
    let (w1, w2) = (0.3, -1.1);
    let g = |z: C64| atom::green_matrix(&p, z).unwrap();
    let gl = g(C64::default()) * atom::drive_vector(&p);
    let (dp, dm) = (atom::delta_plus(), atom::delta_minus());
    let expect = g(I * (w1 - w2)) * dm * g(I * w1) * dp * gl + g(I * (w1 - w2)) * dp * g(-I * w2) * dm * gl;
    let v = response_vector(&p, &[SignedProbe::plus(w1), SignedProbe::minus(w2)]).unwrap();
    assert!(vclose(v, expect, 1e-13));
}

#[test]
fn factorized_two_probe_expression() {
    let a = Atom::new(AtomParams::new(0.9, -0.4)).unwrap();
    let (w1, w2) = (0.6, 1.4);
    let (p1, p2) = (SignedProbe::plus(w1), SignedProbe::minus(w2));
    let s = |pr: &[SignedProbe]| a.response_vector(pr).unwrap();
    let expect = s(&[p1, p2])[1] * s(&[])[0]
        + s(&[p1, p2])[0] * s(&[])[1]
        + s(&[p1])[1] * s(&[p2])[0]
        + s(&[p1])[0] * s(&[p2])[1];
    assert!(close(a.factorized_g(&[p1, p2]).unwrap(), expect, 1e-13));
    let s0 = a.steady();
    assert!(close(a.factorized_g(&[]).unwrap(), C64::new(s0[0].norm_sqr(), 0.0), 1e-14));
}

#[test]
fn ground_state_has_no_fluctuations() {
    let p = AtomParams::new(0.0, 0.7);
    for b in [Branch::Plus, Branch::Minus] {
        assert!(q_vector(&p, &[], b).unwrap().norm() < 1e-15);
    }
    let v = inelastic_p(&p, &[SignedProbe::plus(0.3), SignedProbe::minus(1.0)], 0.2).unwrap();
    assert!(v.value.norm() < 1e-15);
}

#[test]
fn zeroth_order_fluctuation_vectors() {
    let p = AtomParams::new(1.1, 0.6);
    let s = atom::steady_bloch(&p);
    let qp = atom::delta_plus() * s * (-I) + atom::l1() - s * s[0];
    let qm = atom::delta_minus() * s * I + atom::l2() - s * s[1];
    assert!(vclose(q_vector(&p, &[], Branch::Plus).unwrap(), qp, 1e-14));
    assert!(vclose(q_vector(&p, &[], Branch::Minus).unwrap(), qm, 1e-14));
    // ⟨σ⃗σ⁻⟩ and ⟨σ⁺σ⃗⟩ from the two-level operator algebra.
    let sp = Vec3::new(C64::default(), (1.0 + s[2]) / 2.0, -s[0]) - s * s[0];
    let sm = Vec3::new((1.0 + s[2]) / 2.0, C64::default(), -s[1]) - s * s[1];
    assert!(vclose(qp, sp, 1e-14));
    assert!(vclose(qm, sm, 1e-14));
}

#[test]
fn single_probe_box_expression() {
    let p = AtomParams::new(1.5, 0.2);
    let a = Atom::new(p).unwrap();
    let (w, nu) = (0.9, -0.35);
    let g = |z: C64| atom::green_matrix(&p, z).unwrap();
    let dp = atom::delta_plus();
    let q0p = a.q_vector(&[], Branch::Plus).unwrap();
    let q0m = a.q_vector(&[], Branch::Minus).unwrap();
    let q1p = a.q_vector(&[SignedProbe::plus(w)], Branch::Plus).unwrap();
    let q1m = a.q_vector(&[SignedProbe::plus(w)], Branch::Minus).unwrap();
    let expect = ((g(I * nu) * dp * g(I * (nu - w)) * q0p)[1]
        + (g(I * nu) * q1p)[1]
        + (g(I * (w - nu)) * dp * g(-I * nu) * q0m)[0]
        + (g(I * (w - nu)) * q1m)[0])
        / (2.0 * std::f64::consts::PI);
    let v = a.inelastic_p(&[SignedProbe::plus(w)], nu).unwrap();
    assert!(close(v.value, expect, 1e-13));
    assert!((v.nu_prime - (nu - w)).abs() < 1e-15);
}

#[test]
fn paired_probe_box_is_real() {
    let a = Atom::new(AtomParams::new(2.0, 1.0)).unwrap();
    for nu in [-3.0, -0.5, 0.0, 1.7] {
        let v = a.inelastic_p(&[SignedProbe::plus(0.4), SignedProbe::minus(0.4)], nu).unwrap().value;
        assert!(v.im.abs() <= 1e-10 * v.norm().max(1e-300));
        let v0 = a.inelastic_p(&[], nu).unwrap().value;
        assert!(v0.im.abs() <= 1e-10 * v0.norm());
    }
}

#[test]
fn degenerate_double_probe_uses_same_path() {
    let p = AtomParams::new(1.0, 0.3);
    let w = 0.45;
    let a = response_vector(&p, &[SignedProbe::minus(w), SignedProbe::plus(w)]).unwrap();
    let b = response_vector(&p, &[SignedProbe::minus(w), SignedProbe::plus(w)]).unwrap();
    assert_eq!(a, b);
}

#[test]
fn too_many_probes_is_config_error() {
    let p = AtomParams::new(1.0, 0.0);
    let probes = vec![SignedProbe::plus(0.1); MAX_PROBES + 1];
    assert!(matches!(response_vector(&p, &probes), Err(cbs_core::CbsError::Config(_))));
}

fn probe_strategy() -> impl Strategy<Value = SignedProbe> {
    (any::<bool>(), -3.0f64..3.0).prop_map(|(b, w)| if b { SignedProbe::plus(w) } else { SignedProbe::minus(w) })
}

proptest! {
    #[test]
    fn conjugation_swaps_components(om in 0.05f64..4.0, d in -2.0f64..2.0,
                                    probes in prop::collection::vec(probe_strategy(), 0..4)) {
        let p = AtomParams::new(om, d);
        let v = response_vector(&p, &probes).unwrap();
        let c = response_vector(&p, &conjugate_probes(&probes)).unwrap();
        prop_assert!(close(c[0], v[1].conj(), 1e-12));
        prop_assert!(close(c[1], v[0].conj(), 1e-12));
        prop_assert!(close(c[2], v[2].conj(), 1e-12));
    }

    #[test]
    fn permutation_invariance(om in 0.05f64..4.0, d in -2.0f64..2.0,
                              probes in prop::collection::vec(probe_strategy(), 3..4)) {
        let p = AtomParams::new(om, d);
        let v = response_vector(&p, &probes).unwrap();
        let mut rev = probes.clone();
        rev.reverse();
        prop_assert!(vclose(response_vector(&p, &rev).unwrap(), v, 1e-12));
        rev.rotate_left(1);
        prop_assert!(vclose(response_vector(&p, &rev).unwrap(), v, 1e-12));
        let pv = inelastic_p(&p, &probes, 0.3).unwrap().value;
        prop_assert!(close(inelastic_p(&p, &rev, 0.3).unwrap().value, pv, 1e-12));
    }

    #[test]
    fn box_conjugation(om in 0.05f64..4.0, d in -2.0f64..2.0, nu in -4.0f64..4.0,
                       probes in prop::collection::vec(probe_strategy(), 0..4)) {
        let p = AtomParams::new(om, d);
        let v = inelastic_p(&p, &probes, nu).unwrap();
        let c = inelastic_p(&p, &conjugate_probes(&probes), v.nu_prime).unwrap();
        prop_assert!(close(c.value, v.value.conj(), 1e-12));
    }

    #[test]
    fn split_count_is_power_of_two(n in 0usize..5) {
        // With every circle response replaced by the unit vector, g counts its splits.
        let count = (0usize..(1 << n)).count();
        prop_assert_eq!(count, 1usize << n);
    }
}
