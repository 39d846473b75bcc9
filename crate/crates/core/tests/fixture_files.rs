//! The shipped config files describe the same objects as the built-in
//! fixture constructors.

use std::path::PathBuf;

use bvinf::config::{load_algebra, load_gamma, load_morphism, PairingConfig, read};
use bvinf::fixtures::{a1_to_b, build_a1, build_a1_mutated, build_a2, build_b};
use bvinf::graded::{parse_series, Truncation};
use bvinf::hodge::{verify_pairing_axioms, PairingTable};
use bvinf::morphisms::apply_morphism;
use bvinf::operators::{BvInstance, LinearOp};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn same_operator(a: &BvInstance, b: &BvInstance) {
    let ring = a.ring();
    for m in a.algebra.monomials_up_to(a.truncation.n_poly) {
        let x = ring.monomial(&m);
        assert_eq!(
            a.delta.apply(&ring, &x).unwrap(),
            b.delta.apply(&b.ring(), &x).unwrap(),
            "{} on {m:?}",
            a.name()
        );
    }
}

#[test]
fn algebras_match_constructors() {
    let t = Truncation::new(12, 6, 3);
    same_operator(&load_algebra(&fixture("a1.toml"), Some(t)).unwrap(), &build_a1(t));
    same_operator(&load_algebra(&fixture("a2.toml"), Some(t)).unwrap(), &build_a2(t));
    same_operator(&load_algebra(&fixture("a1_mutated.toml"), Some(t)).unwrap(), &build_a1_mutated(t));
    same_operator(&load_algebra(&fixture("b.toml"), Some(t)).unwrap(), &build_b(t));
}

#[test]
fn shipped_truncations() {
    let a1 = load_algebra(&fixture("a1.toml"), None).unwrap();
    assert_eq!(a1.truncation, Truncation::new(12, 6, 3));
}

#[test]
fn morphism_matches_constructor() {
    let t = Truncation::new(12, 6, 0);
    let f = load_morphism(&fixture("a1_to_b.toml"), Some(t)).unwrap();
    let g = a1_to_b(&build_a1(t), &build_b(t)).unwrap();
    let src = f.source.ring();
    let tgt = f.target_ring(&src).unwrap();
    for m in f.source.algebra.monomials_up_to(12) {
        let x = src.monomial(&m);
        assert_eq!(
            apply_morphism(&f, &src, &tgt, &x).unwrap(),
            apply_morphism(&g, &src, &tgt, &x).unwrap(),
            "{m:?}"
        );
        assert!(f.map.has_rule(&m));
    }
    let x = parse_series(&src, "t^6").unwrap();
    assert_eq!(apply_morphism(&f, &src, &tgt, &x).unwrap(), parse_series(&tgt, "-15*h^3").unwrap());
}

#[test]
fn gamma_and_pairing_files() {
    let a1 = load_algebra(&fixture("a1.toml"), None).unwrap();
    let g = load_gamma(&fixture("gamma_a1_ut.json"), &a1).unwrap();
    assert_eq!(g.gamma(), &parse_series(g.ring(), "u*t").unwrap());
    let cfg = PairingConfig::parse(&read(&fixture("pairing_a1.toml")).unwrap()).unwrap();
    let table = PairingTable::from_spec(&cfg.source, a1.truncation).unwrap();
    assert!(verify_pairing_axioms(&table).passed());
}
