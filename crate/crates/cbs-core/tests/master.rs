use cbs_core::atom::{AtomParams, C64, I};
use cbs_core::oracle::master::*;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};

mod common;
use common::random_config;

type Op = DMatrix<C64>;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Single-atom operators in the (|e⟩, |g⟩) basis, index 0 = identity.
fn single_ops() -> [Op; 4] {
    let z = C64::default();
    let o = c(1.0, 0.0);
    [
        Op::from_row_slice(2, 2, &[o, z, z, o]),
        Op::from_row_slice(2, 2, &[z, z, o, z]),
        Op::from_row_slice(2, 2, &[z, o, z, z]),
        Op::from_row_slice(2, 2, &[o, z, z, -o]),
    ]
}

fn embed(t: [usize; 3]) -> Op {
    let s = single_ops();
    s[t[0]].kronecker(&s[t[1]]).kronecker(&s[t[2]])
}

fn on_atom(k: usize, atom: usize) -> Op {
    let mut t = [0; 3];
    t[atom - 1] = k;
    embed(t)
}

fn comm(a: &Op, b: &Op) -> Op {
    a * b - b * a
}

/// Coefficients of X in the 64 product operators; index 0 is the identity.
fn expand(x: &Op) -> Vec<C64> {
    let norms = [2.0, 1.0, 1.0, 2.0];
    let mut out = vec![C64::default(); 64];
    for a in 0..4 {
        for b in 0..4 {
            for cc in 0..4 {
                let bk = embed([a, b, cc]);
                let n = norms[a] * norms[b] * norms[cc];
                out[a * 16 + b * 4 + cc] = (bk.adjoint() * x).trace() / n;
            }
        }
    }
    out
}

/// Adjoint generator restricted to the 63 layout; returns (matrix, constant column).
fn restrict(gen: impl Fn(&Op) -> Op) -> (DMatrix<C64>, Vec<C64>) {
    let triples = layout_triples();
    let mut m = DMatrix::zeros(DIM, DIM);
    let mut lam = vec![C64::default(); DIM];
    for (row, t) in triples.iter().enumerate() {
        let coef = expand(&gen(&embed(*t)));
        for a in 0..4 {
            for b in 0..4 {
                for cc in 0..4 {
                    let v = coef[a * 16 + b * 4 + cc];
                    match layout_index([a, b, cc]) {
                        Some(col) => m[(row, col)] += v,
                        None => lam[row] += v,
                    }
                }
            }
        }
    }
    (m, lam)
}

fn free_generator(cfg: &ThreeAtomConfig, q: &Op) -> Op {
    let mut out = Op::zeros(8, 8);
    for (k, p) in cfg.atoms.iter().enumerate() {
        let a = k + 1;
        let (sm, sp, sz) = (on_atom(1, a), on_atom(2, a), on_atom(3, a));
        let h = &sz * c(-p.detuning / 2.0, 0.0) - &sp * (p.rabi / 2.0) - &sm * (p.rabi.conj() / 2.0);
        out += comm(&h, q) * I;
        let n = &sp * &sm;
        out += (&sp * q * &sm * c(2.0, 0.0) - &n * q - q * &n) * c(p.gamma, 0.0);
    }
    out
}

#[test]
fn free_matrix_matches_operator_algebra() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let cfg = random_config(&mut rng);
    let (a, lam) = build_a_and_lambda(&cfg);
    let (m, l) = restrict(|q| free_generator(&cfg, q));
    assert!((a - m).norm() < 1e-12);
    for k in 0..DIM {
        assert!((lam[k] - l[k]).norm() < 1e-12);
    }
    for k in 9..DIM {
        assert_eq!(lam[k], C64::default());
    }
}

#[test]
fn interaction_identities_match_operator_algebra() {
    // The two-atom identities equal the Heisenberg dipole-dipole term with the
    // coupling sign reversed; every path carries four factors, so the
    // fourth-order results are unaffected.
    let mut cfg = ThreeAtomConfig::uniform(AtomParams::new(1.0, 0.0));
    let t = c(0.3, 0.7);
    for v in cfg.couplings.values_mut() {
        *v = t;
    }
    for label in InteractionLabel::all() {
        let (l, m) = (label.lambda, label.mu);
        let (spl, smm) = (on_atom(2, l), on_atom(1, m));
        let (expect, _) = if label.conjugated {
            restrict(|q| comm(&spl, &(q * &smm)) * (-t.conj()))
        } else {
            restrict(|q| comm(&(&spl * q), &smm) * (-t))
        };
        let got = interaction_matrix(label, &cfg).unwrap();
        assert!((got - expect).norm() < 1e-12, "label {label:?}");
    }
}

#[test]
fn identity_example_top_block() {
    let cfg = ThreeAtomConfig::uniform(AtomParams::new(1.0, 0.0));
    let mut v = StateVector63::zeros();
    v.data[layout_index([2, 1, 0]).unwrap()] = c(1.0, 0.0);
    let out = apply_interaction(InteractionLabel::v(1, 2), &v, &cfg).unwrap();
    assert_eq!(out.bloch(2)[2], c(2.0, 0.0));
    assert_eq!(out.bloch(2)[0], C64::default());
    assert_eq!(out.bloch(1).norm(), 0.0);
}

#[test]
fn interaction_is_linear() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let cfg = random_config(&mut rng);
    let mut v = StateVector63::zeros();
    for k in 0..DIM {
        v.data[k] = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    }
    let alpha = c(0.4, -1.3);
    for label in InteractionLabel::all() {
        let a = apply_interaction(label, &v, &cfg).unwrap().data * alpha;
        let mut w = v.clone();
        w.data *= alpha;
        let b = apply_interaction(label, &w, &cfg).unwrap().data;
        assert!((a - &b).norm() < 1e-13 * b.norm().max(1.0));
    }
}

#[test]
fn interaction_block_sparsity() {
    let cfg = ThreeAtomConfig::uniform(AtomParams::new(1.0, 0.0));
    let v = build_v(&cfg).unwrap();
    for r in 0..DIM {
        for col in 0..DIM {
            let zero_block = (r < 9 && col < 9) || (r < 9 && col >= 36) || (r >= 36 && col < 9);
            if zero_block {
                assert_eq!(v[(r, col)], C64::default());
            }
        }
    }
    assert!(v.view((0, 9), (9, 27)).norm() > 0.0);
    assert!(v.view((36, 9), (27, 27)).norm() > 0.0);
}

#[test]
fn free_green_single_block_is_direct_sum() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let cfg = random_config(&mut rng);
    let a = build_a(&cfg);
    let g_plus = -a.view((0, 0), (9, 9)).into_owned().try_inverse().unwrap();
    for (block, atom) in [(0, 3), (1, 2), (2, 1)] {
        let g = cbs_core::atom::green_matrix(&cfg.atoms[atom - 1], C64::default()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((g_plus[(3 * block + i, 3 * block + j)] - g[(i, j)]).norm() < 1e-12);
            }
        }
    }
    // Block lower triangular and independent of the couplings.
    assert_eq!(a.view((0, 9), (9, 54)).norm(), 0.0);
    assert_eq!(a.view((9, 36), (27, 27)).norm(), 0.0);
    let mut other = cfg.clone();
    for t in other.couplings.values_mut() {
        *t = c(5.0, 1.0);
    }
    assert_eq!(build_a(&other), a);
}

#[test]
fn zeroth_order_intensities_factorize() {
    let p = AtomParams::new(1.3, 0.4);
    let oracle = MasterOracle::new(ThreeAtomConfig::uniform(p)).unwrap();
    let s = oracle.steady();
    let b = cbs_core::atom::steady_bloch(&p);
    let bg = extract_intensity(&s, IntensityKind::Background(2)).unwrap();
    assert!((bg - (1.0 + b[2]) / 2.0).norm() < 1e-13);
    let it = extract_intensity(&s, IntensityKind::Interference(1, 3)).unwrap();
    assert!((it - b[1] * b[0]).norm() < 1e-13);
    assert!(extract_intensity(&s, IntensityKind::Interference(2, 2)).is_err());
}

#[test]
fn path_terms_sum_to_full_fourth_order() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let cfg = random_config(&mut rng);
    let oracle = MasterOracle::new(cfg).unwrap();
    let labels = InteractionLabel::all();
    let mut total = nalgebra::DVector::<C64>::zeros(DIM);
    let n = labels.len();
    for a in 0..n {
        for b in a..n {
            for cc in b..n {
                for d in cc..n {
                    let set = [labels[a], labels[b], labels[cc], labels[d]];
                    total += oracle.path_term(&set).unwrap().data;
                }
            }
        }
    }
    let direct = oracle.fourth_order().data;
    assert!((total - &direct).norm() < 1e-10 * direct.norm());
}

#[test]
fn path_term_is_multilinear_in_couplings() {
    let p = AtomParams::new(0.8, 0.2);
    let base = MasterOracle::new(ThreeAtomConfig::uniform(p)).unwrap();
    let mut cfg = ThreeAtomConfig::uniform(p);
    cfg.couplings.insert((1, 2), c(2.5, 0.0));
    let scaled = MasterOracle::new(cfg).unwrap();
    let labels = [
        InteractionLabel::v_star(2, 1),
        InteractionLabel::v_star(3, 2),
        InteractionLabel::v(1, 2),
        InteractionLabel::v(2, 3),
    ];
    let a = base.path_term(&labels).unwrap().data;
    let b = scaled.path_term(&labels).unwrap().data;
    assert!((b - &a * c(6.25, 0.0)).norm() < 1e-12 * a.norm());
    let mut zero = ThreeAtomConfig::uniform(p);
    zero.couplings.insert((2, 3), C64::default());
    let z = MasterOracle::new(zero).unwrap().path_term(&labels).unwrap();
    assert_eq!(z.data.norm(), 0.0);
}

#[test]
fn conjugate_labels_conjugate_background() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    let p = AtomParams::new(1.1, -0.6);
    let oracle = MasterOracle::new(ThreeAtomConfig::uniform(p)).unwrap();
    let all = InteractionLabel::all();
    for _ in 0..5 {
        let set: Vec<_> = (0..4).map(|_| all[rng.gen_range(0..all.len())]).collect();
        let conj: Vec<_> = set.iter().map(|l| l.conjugate()).collect();
        for atom in 1..=3 {
            let a = extract_intensity(&oracle.path_term(&set).unwrap(), IntensityKind::Background(atom)).unwrap();
            let b = extract_intensity(&oracle.path_term(&conj).unwrap(), IntensityKind::Background(atom)).unwrap();
            assert!((a.conj() - b).norm() < 1e-12 * (1.0 + a.norm()));
        }
    }
    let ladder = [
        InteractionLabel::v_star(2, 1),
        InteractionLabel::v_star(3, 2),
        InteractionLabel::v(1, 2),
        InteractionLabel::v(2, 3),
    ];
    let l = extract_intensity(&oracle.path_term(&ladder).unwrap(), IntensityKind::Background(3)).unwrap();
    assert!(l.im.abs() < 1e-12 * l.norm());
}

#[test]
fn coupled_evolution_is_stable() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
    for _ in 0..20 {
        let cfg = random_config(&mut rng);
        let a = build_a(&cfg) + build_v(&cfg).unwrap();
        let eig = a.schur().eigenvalues().expect("complex Schur form yields eigenvalues");
        assert!(eig.iter().all(|e| e.re < 0.0));
    }
}

#[test]
fn appendix_sum_rules_hold() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
    for _ in 0..20 {
        let cfg = random_config(&mut rng);
        let r = sum_rule_check(&cfg).unwrap();
        assert!(r.y_deviation < 1e-10 && r.z_deviation < 1e-10, "{r:?}");
    }
    let r = sum_rule_check(&ThreeAtomConfig::uniform(AtomParams::new(0.0, 0.0))).unwrap();
    assert_eq!(r.y_deviation, 0.0);
    assert_eq!(r.z_deviation, 0.0);
}
