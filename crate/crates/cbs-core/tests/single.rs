use cbs_core::atom::AtomParams;
use cbs_core::oracle::single::{inelastic_power, single_atom_spectrum_oracle};
use cbs_core::quadrature::{integrate_line, QuadOptions};
use cbs_core::response::inelastic_p;
use cbs_core::spectra::uniform_grid;

#[test]
fn matches_box_without_probes() {
    let grid = uniform_grid(-12.0, 12.0, 97);
    for rabi in [0.1, 1.0, 5.0] {
        for delta in [0.0, 1.0] {
            let p = AtomParams::new(rabi, delta);
            let oracle = single_atom_spectrum_oracle(&p, &grid).unwrap();
            for (nu, o) in grid.iter().zip(&oracle) {
                let b = inelastic_p(&p, &[], *nu).unwrap().value;
                assert!(b.im.abs() <= 1e-12 * o.abs().max(1e-300) + 1e-16, "imaginary part {b}");
                assert!((b.re - o).abs() <= 1e-8 * o.abs(), "Ω={rabi} δ={delta} ν={nu}: {} vs {o}", b.re);
            }
        }
    }
}

#[test]
fn normalization_is_the_inelastic_power() {
    for rabi in [0.1, 1.0, 5.0] {
        for delta in [0.0, 1.0] {
            let p = AtomParams::new(rabi, delta);
            let opts = QuadOptions { rel_tol: 1e-11, ..Default::default() };
            let g = p.generalized_rabi();
            let total = integrate_line(
                |nu| Ok(single_atom_spectrum_oracle(&p, &[nu]).unwrap()[0].into()),
                &[0.0, g, -g],
                1.0f64.max(g),
                &opts,
            )
            .unwrap();
            let want = inelastic_power(&p);
            assert!((total.value.re - want).abs() <= 1e-6 * want, "{} vs {want}", total.value.re);
        }
    }
}

#[test]
fn strong_drive_mollow_triplet() {
    let p = AtomParams::new(5.0, 0.0);
    let s = single_atom_spectrum_oracle(&p, &[0.0, 5.0, -5.0, 2.5]).unwrap();
    let ratio = s[0] / s[1];
    assert!((s[1] - s[2]).abs() < 1e-12 * s[1]);
    assert!(s[3] < s[1]);
    // Center to sideband height tends to 3 when Ω ≫ γ.
    assert!((ratio - 3.0).abs() < 0.3, "{ratio}");
}

#[test]
fn undriven_atom_has_no_spectrum() {
    let s = single_atom_spectrum_oracle(&AtomParams::new(0.0, 0.3), &[-1.0, 0.0, 2.0]).unwrap();
    assert!(s.iter().all(|x| *x == 0.0));
}
