use cbs_core::diagrams::{
    assign_frequencies, detect_closed_loop, enumerate_type, expand_block, find_term, forbidden_labels, raw_terms,
    BlockId, ContributionType, TermKind,
};

mod common;
use common::{C1_FORBIDDEN, C2_FORBIDDEN};

#[test]
fn block_expansion_sizes() {
    let sizes = [(BlockId::A, 2), (BlockId::B, 5), (BlockId::C, 3), (BlockId::D, 3), (BlockId::E, 17), (BlockId::F, 5), (BlockId::G, 9)];
    for (id, n) in sizes {
        let block = expand_block(id);
        assert_eq!(block.terms.len(), n, "{id:?}");
        assert_eq!(block.terms.last().unwrap().kind, TermKind::Box);
        assert_eq!(block.terms.iter().filter(|t| t.kind == TermKind::Box).count(), 1);
        // Each split appears exactly once.
        let mut masks: Vec<u8> = block.terms.iter().filter_map(|t| if let TermKind::Split(m) = t.kind { Some(m) } else { None }).collect();
        masks.sort();
        masks.dedup();
        assert_eq!(masks.len(), n - 1);
    }
}

#[test]
fn raw_and_allowed_counts() {
    let expect = [(ContributionType::L1, 50, 50), (ContributionType::L2, 68, 68), (ContributionType::C1, 45, 32), (ContributionType::C2, 54, 46)];
    for (ty, raw, allowed) in expect {
        assert_eq!(raw_terms(ty).len(), raw, "{ty:?}");
        assert_eq!(enumerate_type(ty).unwrap().len(), allowed, "{ty:?}");
    }
}

#[test]
fn forbidden_lists_match_fixtures() {
    let mut c1 = forbidden_labels(ContributionType::C1);
    c1.sort();
    let mut want: Vec<String> = C1_FORBIDDEN.iter().map(|s| s.to_string()).collect();
    want.sort();
    assert_eq!(c1, want);
    let mut c2 = forbidden_labels(ContributionType::C2);
    c2.sort();
    let mut want: Vec<String> = C2_FORBIDDEN.iter().map(|s| s.to_string()).collect();
    want.sort();
    assert_eq!(c2, want);
    assert!(forbidden_labels(ContributionType::L1).is_empty());
    assert!(forbidden_labels(ContributionType::L2).is_empty());
}

#[test]
fn feedback_through_a_box_is_allowed() {
    // Amplitude circulates between atoms 1 and 2 but leaks to the detector through the box.
    let ty = ContributionType::C1;
    for label in ["(c2)(f5)(d1)", "(c2)(f5)(d3)"] {
        let blocks = raw_terms(ty).into_iter().find(|b| cbs_core::diagrams::label_of(b) == label).unwrap();
        assert!(!detect_closed_loop(ty, &blocks), "{label}");
    }
}

#[test]
fn all_circle_terms_are_elastic() {
    for ty in ContributionType::ALL {
        for term in enumerate_type(ty).unwrap() {
            if !term.has_box() {
                assert!(term.elastic, "{}", term.label());
                assert_eq!(term.n_vars, 0, "{}", term.label());
                assert!(term.arrow_freqs.iter().all(|f| f.is_zero()), "{}", term.label());
            }
        }
    }
}

#[test]
fn single_box_spectral_terms_have_no_integration() {
    let t = find_term(ContributionType::L1, "(a1)(b3)(b5)").unwrap();
    assert!(!t.elastic);
    assert_eq!(t.n_vars, 0);
}

#[test]
fn integration_dimension_of_box_chains() {
    // One free variable per box beyond the detected one.
    let t = find_term(ContributionType::C2, "(a2)(g9)(d1)").unwrap();
    assert!(!t.elastic);
    assert_eq!(t.n_vars, 1);
    assert!(t.describe().contains("P("), "{}", t.describe());
    for (ty, label) in [
        (ContributionType::L1, "(a2)(b5)(b5)"),
        (ContributionType::L2, "(a2)(e17)(a2)"),
        (ContributionType::C1, "(c3)(f5)(d3)"),
        (ContributionType::C2, "(a2)(g9)(d3)"),
    ] {
        let t = find_term(ty, label).unwrap();
        assert!(!t.elastic, "{label}");
        assert_eq!(t.n_vars, 2, "{label}");
    }
}

#[test]
fn detected_frequency_forced_to_zero_through_feedback() {
    // The detected arrow leaves an elastic circle fed only by laser-frequency light.
    let t = find_term(ContributionType::L1, "(a2)(b1)(b3)").unwrap();
    assert!(t.elastic);
    assert_eq!(t.n_vars, 1);
}

#[test]
fn unknown_label_is_a_config_error() {
    assert!(find_term(ContributionType::L1, "(z9)").is_err());
}

#[test]
fn frequency_forms_respect_conservation() {
    // Every circle conserves frequency and every box shifts its solid output by Σsω.
    for ty in ContributionType::ALL {
        let topo = ty.topology();
        for blocks in raw_terms(ty).into_iter().filter(|b| !detect_closed_loop(ty, b)) {
            let t = assign_frequencies(ty, blocks).unwrap();
            let nu = 0.37;
            let vars = [0.11, -0.29, 0.53];
            let f = |k: usize| t.arrow_freqs[k].eval(if t.elastic { 0.0 } else { nu }, &vars);
            for (a, ports) in topo.atoms.iter().enumerate() {
                let s = |k: usize| if topo.arrows[k].character == cbs_core::diagrams::Character::Dashed { 1.0 } else { -1.0 };
                match blocks[a].kind {
                    TermKind::Split(mask) => {
                        let plus: f64 = ports.incoming.iter().enumerate().filter(|(j, _)| mask >> j & 1 == 1).map(|(_, k)| s(*k) * f(*k)).sum();
                        let minus: f64 = ports.incoming.iter().enumerate().filter(|(j, _)| mask >> j & 1 == 0).map(|(_, k)| s(*k) * f(*k)).sum();
                        assert!((f(ports.dashed_out) - plus).abs() < 1e-12, "{}", t.label());
                        assert!((f(ports.solid_out) + minus).abs() < 1e-12, "{}", t.label());
                    }
                    TermKind::Box => {
                        let total: f64 = ports.incoming.iter().map(|k| s(*k) * f(*k)).sum();
                        assert!((f(ports.dashed_out) - f(ports.solid_out) - total).abs() < 1e-12, "{}", t.label());
                    }
                }
            }
        }
    }
}
