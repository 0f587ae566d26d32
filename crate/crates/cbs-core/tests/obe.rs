use cbs_core::atom::{steady_bloch, AtomParams, Vec3};
use cbs_core::oracle::obe::{common_base, polychromatic_obe_oracle};
use cbs_core::response::{response_vector, SignedProbe};

fn rel(a: &Vec3, b: &Vec3) -> f64 {
    (a - b).norm() / b.norm()
}

#[test]
fn no_probes_relaxes_to_the_steady_state() {
    let p = AtomParams::new(1.0, 0.5);
    let est = polychromatic_obe_oracle(&p, &[], 1e-3, 40.0).unwrap();
    assert!(rel(&est.response, &steady_bloch(&p)) < 1e-9);
}

#[test]
fn single_probe_matches_response() {
    let p = AtomParams::new(1.0, 0.0);
    let probes = [SignedProbe::plus(2.0)];
    let est = polychromatic_obe_oracle(&p, &probes, 1e-3, 40.0).unwrap();
    let exact = response_vector(&p, &probes).unwrap();
    assert!(rel(&est.response, &exact) < 1e-2, "{} vs {}", est.response, exact);
}

#[test]
fn two_probe_residual_shrinks_with_epsilon() {
    let p = AtomParams::new(1.0, 0.5);
    let probes = [SignedProbe::plus(2.0), SignedProbe::minus(3.0)];
    let exact = response_vector(&p, &probes).unwrap();
    let r1 = rel(&polychromatic_obe_oracle(&p, &probes, 1e-3, 40.0).unwrap().response, &exact);
    let r2 = rel(&polychromatic_obe_oracle(&p, &probes, 5e-4, 40.0).unwrap().response, &exact);
    assert!(r1 < 1e-2, "{r1}");
    assert!(r2 <= 0.55 * r1, "{r1} {r2}");
}

#[test]
fn common_base_detection() {
    let b = common_base(&[SignedProbe::plus(1.5), SignedProbe::minus(2.0)]).unwrap().unwrap();
    assert!((b - 0.5).abs() < 1e-12);
    assert!(common_base(&[SignedProbe::plus(2f64.sqrt()), SignedProbe::plus(1.0)]).is_err());
}

#[test]
fn invalid_inputs_are_rejected() {
    let p = AtomParams::new(1.0, 0.0);
    assert!(polychromatic_obe_oracle(&p, &[SignedProbe::plus(1.0)], 0.1, 40.0).is_err());
    assert!(polychromatic_obe_oracle(&p, &[SignedProbe::plus(1.0), SignedProbe::minus(1.0)], 1e-3, 40.0).is_err());
}
