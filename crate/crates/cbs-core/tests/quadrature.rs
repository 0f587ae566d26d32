use std::f64::consts::PI;

use cbs_core::atom::C64;
use cbs_core::quadrature::{integrate_interval, integrate_line, QuadOptions};

#[test]
fn lorentzian_over_the_line() {
    let opts = QuadOptions { rel_tol: 1e-12, ..Default::default() };
    let out = integrate_line(|x| Ok(C64::new(1.0 / (1.0 + x * x), 0.0)), &[], 1.0, &opts).unwrap();
    assert!((out.value.re - PI).abs() < 1e-11, "{out:?}");
}

#[test]
fn narrow_offset_peaks_with_breaks() {
    // Two width-0.05 Lorentzians at ±7 plus a dispersive part that integrates to zero.
    let w: f64 = 0.05;
    let f = |x: f64| {
        let l = |c: f64| w / ((x - c).powi(2) + w * w);
        Ok(C64::new(l(7.0) + l(-7.0), (x - 7.0) / ((x - 7.0).powi(2) + 1.0) / (1.0 + x * x)))
    };
    let opts = QuadOptions { rel_tol: 1e-10, ..Default::default() };
    let out = integrate_line(f, &[-7.0, 7.0], 3.0, &opts).unwrap();
    assert!((out.value.re - 2.0 * PI).abs() < 1e-8, "{out:?}");
    // Closed form of the imaginary part by residues.
    assert!((out.value.im + 7.0 * PI / 53.0).abs() < 1e-9, "{out:?}");
}

#[test]
fn budget_exhaustion_is_reported() {
    let opts = QuadOptions { rel_tol: 1e-14, abs_tol: 0.0, max_intervals: 3 };
    let res = integrate_interval(|x| Ok(C64::new((1.0 / x).sin(), 0.0)), 1e-3, 1.0, &[], &opts);
    assert!(res.is_err());
}

#[test]
fn gaussian_moments() {
    let opts = QuadOptions { rel_tol: 1e-12, ..Default::default() };
    let out = integrate_line(|x| Ok(C64::new(x * x * (-x * x).exp(), 0.0)), &[0.0], 1.0, &opts).unwrap();
    assert!((out.value.re - PI.sqrt() / 2.0).abs() < 1e-11);
}
