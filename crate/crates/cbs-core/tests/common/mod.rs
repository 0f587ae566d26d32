//! Fixtures shared by several integration tests.

#![allow(dead_code)]

use cbs_core::atom::{AtomParams, C64};
use cbs_core::oracle::master::ThreeAtomConfig;
use rand::Rng;

/// Identifiers of the terms removed for containing closed loops.
pub const C1_FORBIDDEN: [&str; 13] = [
    "(c1)(f1)(d2)",
    "(c1)(f4)(d2)",
    "(c2)(f1)(d2)",
    "(c2)(f2)(d1)",
    "(c2)(f2)(d2)",
    "(c2)(f2)(d3)",
    "(c2)(f3)(d2)",
    "(c2)(f4)(d1)",
    "(c2)(f4)(d2)",
    "(c2)(f4)(d3)",
    "(c2)(f5)(d2)",
    "(c3)(f1)(d2)",
    "(c3)(f4)(d2)",
];

pub const C2_FORBIDDEN: [&str; 8] = [
    "(a1)(g4)(d2)",
    "(a1)(g5)(d2)",
    "(a1)(g6)(d2)",
    "(a1)(g8)(d2)",
    "(a2)(g4)(d2)",
    "(a2)(g5)(d2)",
    "(a2)(g6)(d2)",
    "(a2)(g8)(d2)",
];

/// Three atoms with independent random drives, detunings, widths and weak couplings.
pub fn random_config(rng: &mut impl Rng) -> ThreeAtomConfig {
    let mut cfg = ThreeAtomConfig::uniform(AtomParams::new(1.0, 0.0));
    for a in cfg.atoms.iter_mut() {
        *a = AtomParams {
            rabi: C64::new(rng.gen_range(0.1..3.0), rng.gen_range(-1.0..1.0)),
            detuning: rng.gen_range(-2.0..2.0),
            gamma: rng.gen_range(0.5..1.5),
        };
    }
    for t in cfg.couplings.values_mut() {
        *t = C64::new(rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1));
    }
    cfg
}
