//! Classical values, computed independently of the engine where possible.

use nilops::gf2::Gf2Vector;
use nilops::modules::{FiniteUnstableAlgebra, ModuleElement, StructuredModule};
use nilops::nilfilt::{filtration_layer, is_reduced, rs_layer};
use nilops::parser::{load_module, load_structured, save_module};
use nilops::steenrod::{basis_dim, binom2, normalize_word, subalgebra_basis, AdmissibleSum};
use nilops::tor::bar_tor;

/// Partitions of `d` into parts `2^i - 1`: the Milnor basis count.
fn milnor_count(d: usize) -> usize {
    let parts: Vec<usize> = (1..).map(|i| (1usize << i) - 1).take_while(|&p| p <= d.max(1)).collect();
    let mut ways = vec![0usize; d + 1];
    ways[0] = 1;
    for p in parts {
        for n in p..=d {
            ways[n] += ways[n - p];
        }
    }
    ways[d]
}

#[test]
fn admissible_basis_matches_milnor_count() {
    for d in 0..=40 {
        assert_eq!(basis_dim(d), milnor_count(d), "degree {d}");
    }
}

#[test]
fn finite_subalgebras_have_classical_sizes() {
    // dim A(n) = 2^{(n+1)(n+2)/2}; A(2) tops out in degree 23
    assert_eq!(subalgebra_basis(0, 1).total_dim(), 2);
    assert_eq!(subalgebra_basis(1, 6).total_dim(), 8);
    let a2 = subalgebra_basis(2, 23);
    assert_eq!(a2.total_dim(), 64);
    assert_eq!(a2.in_degree(23).len(), 1);
}

#[test]
fn adem_relations_of_low_degree() {
    let cases: &[(&[usize], &str)] = &[
        (&[1, 1], "0"),
        (&[1, 2], "Sq3"),
        (&[2, 2], "Sq3 Sq1"),
        (&[2, 3], "Sq5 + Sq4 Sq1"),
        (&[3, 2], "0"),
        (&[2, 4], "Sq6 + Sq5 Sq1"),
        (&[4, 4], "Sq7 Sq1 + Sq6 Sq2"),
        (&[1, 2, 1], "Sq3 Sq1"),
    ];
    for (w, expect) in cases {
        assert_eq!(normalize_word(w).to_string(), *expect, "{w:?}");
    }
}

#[test]
fn rp_infinity_action_is_binomial() {
    let rp = StructuredModule::RpInfinity;
    for k in 1..=20 {
        let x = ModuleElement::basis(k, 1, 0);
        for i in 1..=k {
            let y = rp.act(&AdmissibleSum::sq(i), &x).unwrap();
            assert_eq!(!y.is_zero(), binom2(k, i), "Sq{i} u^{k}");
        }
    }
}

#[test]
fn free_module_on_one_generator() {
    let f = StructuredModule::free(1, 64);
    for d in 0..=64 {
        assert_eq!(f.dim(d).unwrap(), usize::from(d.is_power_of_two()), "degree {d}");
    }
    // F(1) is reduced and lies entirely in layer 0
    assert!(is_reduced(&f, 64).unwrap());
    let r0 = rs_layer(&f, 0, 64, 16).unwrap();
    for d in 0..=64 {
        assert_eq!(r0.dim(d), usize::from(d.is_power_of_two()));
    }
    let m1 = filtration_layer(&f, 1, 64, 16).unwrap();
    assert!(m1.values().all(Vec::is_empty));
}

#[test]
fn suspension_shifts_the_filtration() {
    // Sigma F(1) is 1-nilpotent but not 2-nilpotent
    let m = StructuredModule::free(1, 32).suspend(1);
    let m1 = filtration_layer(&m, 1, 33, 16).unwrap();
    let m2 = filtration_layer(&m, 2, 33, 16).unwrap();
    assert_eq!(m1.values().map(Vec::len).sum::<usize>(), 6);
    assert!(m2.values().all(Vec::is_empty));
}

#[test]
fn tor_of_truncated_polynomial() {
    let a = match load_module(include_str!("../../../data/poly4.json")).unwrap() {
        nilops::parser::Document::Algebra(a) => a,
        _ => panic!("poly4.json is an algebra"),
    };
    let page = bar_tor(&a, 4, 10).unwrap();
    let nonzero: Vec<(usize, usize)> = page
        .entries
        .iter()
        .filter(|(_, e)| e.dim() > 0)
        .map(|(&k, _)| k)
        .collect();
    assert_eq!(nonzero, vec![(0, 0), (1, 1), (2, 4), (3, 5), (4, 8)]);
}

#[test]
fn exterior_algebra_page() {
    let page = bar_tor(&FiniteUnstableAlgebra::exterior(3), 4, 12).unwrap();
    for s in 0..=4 {
        for t in 0..=12 {
            assert_eq!(page.dim(s, t), usize::from(t == 3 * s), "(-{s},{t})");
        }
    }
}

#[test]
fn documents_round_trip() {
    for name in ["rp2.json", "exterior3.json", "poly4.json"] {
        let text = std::fs::read_to_string(format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap();
        let doc = load_module(&text).unwrap();
        assert_eq!(load_module(&save_module(&doc)).unwrap(), doc, "{name}");
    }
    let m = load_structured(r#"{"shape": "rp_infinity"}"#).unwrap();
    assert_eq!(m, StructuredModule::RpInfinity);
    let x = ModuleElement::homogeneous(3, Gf2Vector::unit(1, 0));
    assert!(m.contains(&x).is_ok());
}
