use proptest::prelude::*;

use nilops::gf2::{solve, Gf2Matrix, Gf2Vector, QuotientSpace, Subspace};
use nilops::laws::module_corpus;
use nilops::modules::{make_finite, StructuredModule};
use nilops::nilfilt::filtration_layer;
use nilops::oracle::{sums_agree, word_agrees_with};
use nilops::parser::parse_sum;
use nilops::steenrod::{
    adem_normalize, binom2, conjugate, multiply, normalize_by_rewriting, normalize_word, AdmissibleSum,
    SteenrodExpression,
};

fn vector(len: usize) -> impl Strategy<Value = Gf2Vector> {
    prop::collection::vec(0u8..2, len).prop_map(|bits| Gf2Vector::from_bits(&bits))
}

fn matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = Gf2Matrix> {
    (0..=max_rows, 0..=max_cols).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(0u8..2, c), r)
            .prop_map(move |rows| Gf2Matrix::from_bits(c, &rows).unwrap())
    })
}

fn word(max_len: usize, max_index: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1..=max_index, 1..=max_len)
}

fn element() -> impl Strategy<Value = AdmissibleSum> {
    prop::collection::vec(word(3, 6), 0..4).prop_map(|ws| {
        let mut x = AdmissibleSum::zero();
        for w in ws {
            x.add_assign(&normalize_word(&w));
        }
        x
    })
}

fn pascal(rows: usize) -> Vec<Vec<bool>> {
    let mut t = vec![vec![true]];
    for n in 1..rows {
        let prev = &t[n - 1];
        let row = (0..=n)
            .map(|k| (k > 0 && prev[k - 1]) ^ (k < n && prev[k]))
            .collect();
        t.push(row);
    }
    t
}

#[test]
fn lucas_agrees_with_pascal() {
    let t = pascal(128);
    for (n, row) in t.iter().enumerate() {
        for (k, &b) in row.iter().enumerate() {
            assert_eq!(binom2(n, k), b, "C({n},{k})");
        }
        assert!(!binom2(n, n + 1));
    }
}

proptest! {
    #[test]
    fn rank_equals_rank_of_transpose(m in matrix(12, 12)) {
        prop_assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn rank_nullity(m in matrix(12, 12)) {
        let kernel = m.kernel();
        prop_assert_eq!(m.rank() + kernel.len(), m.cols());
        for z in &kernel {
            prop_assert!(m.mul_vec(z).is_zero());
        }
        prop_assert_eq!(Subspace::spanned_by(m.cols(), &kernel).dim(), kernel.len());
    }

    #[test]
    fn product_transposes(a in matrix(6, 6), seed in any::<u64>()) {
        // b has as many rows as a has columns
        let rows: Vec<Vec<u8>> = (0..a.cols())
            .map(|i| (0..5).map(|j| ((seed >> ((i * 5 + j) % 64)) & 1) as u8).collect())
            .collect();
        let b = Gf2Matrix::from_bits(5, &rows).unwrap();
        prop_assert_eq!(a.mul(&b).transpose(), b.transpose().mul(&a.transpose()));
    }

    // brute force over all x in F_2^c
    #[test]
    fn solve_matches_exhaustive_search((m, b) in matrix(4, 4).prop_flat_map(|m| {
        let r = m.rows();
        (Just(m), vector(r))
    })) {
        let c = m.cols();
        let exists = (0u32..1 << c).any(|bits| {
            let x = Gf2Vector::from_indices(c, (0..c).filter(|i| bits >> i & 1 == 1));
            m.mul_vec(&x) == b
        });
        let x = solve(&m, &b).unwrap();
        prop_assert_eq!(x.is_some(), exists);
        if let Some(x) = x {
            prop_assert_eq!(m.mul_vec(&x), b);
        }
    }

    #[test]
    fn quotient_dim_is_order_independent(
        gens in prop::collection::vec(vector(8), 0..6),
        picks in prop::collection::vec(any::<bool>(), 6),
        rotate in 0usize..6,
    ) {
        let rels: Vec<Gf2Vector> = gens.iter().zip(&picks).filter(|(_, &p)| p).map(|(g, _)| g.clone()).collect();
        let q = QuotientSpace::new(8, 0, &gens, &rels).unwrap();
        let mut g2 = gens.clone();
        g2.reverse();
        let mut r2 = rels.clone();
        if !r2.is_empty() {
            let k = rotate % r2.len();
            r2.rotate_left(k);
        }
        let q2 = QuotientSpace::new(8, 0, &g2, &r2).unwrap();
        let span = |v: &[Gf2Vector]| Subspace::spanned_by(8, v).dim();
        prop_assert_eq!(q.dim(), q2.dim());
        prop_assert_eq!(q.dim(), span(&gens) - span(&rels));
        for g in &gens {
            prop_assert_eq!(q.project(g).unwrap().is_zero(), q.relations().contains(g));
        }
    }

    #[test]
    fn normal_form_is_independent_of_rewriting_order(w in word(4, 8), seed in any::<u64>()) {
        let e = SteenrodExpression::monomial(w.clone()).unwrap();
        let mut state = seed;
        let mut choose = |c: &[usize]| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) as usize % c.len()
        };
        prop_assert_eq!(normalize_by_rewriting(&e, &mut choose), adem_normalize(&e));
        prop_assert_eq!(normalize_by_rewriting(&e, &mut |_| 0), normalize_word(&w));
    }

    #[test]
    fn normal_form_agrees_with_evaluation(w in word(4, 5)) {
        prop_assert!(word_agrees_with(&w, &normalize_word(&w)));
    }

    #[test]
    fn multiplication_is_associative(a in element(), b in element(), c in element()) {
        prop_assert_eq!(multiply(&multiply(&a, &b), &c), multiply(&a, &multiply(&b, &c)));
    }

    #[test]
    fn conjugation_laws(a in element(), b in element()) {
        prop_assert_eq!(conjugate(&conjugate(&a)), a.clone());
        prop_assert_eq!(conjugate(&multiply(&a, &b)), multiply(&conjugate(&b), &conjugate(&a)));
        prop_assert_eq!(conjugate(&a.sum(&b)), conjugate(&a).sum(&conjugate(&b)));
    }

    #[test]
    fn conjugate_agrees_with_evaluation(w in word(3, 4)) {
        // chi(Sq^a Sq^b) computed two ways
        let x = normalize_word(&w);
        let via_product = w.iter().rev().fold(AdmissibleSum::one(), |acc, &i| {
            multiply(&acc, &conjugate(&AdmissibleSum::sq(i)))
        });
        let degree = w.iter().sum();
        prop_assert!(sums_agree(&conjugate(&x), &via_product, degree));
    }

    #[test]
    fn printed_sums_read_back(x in element()) {
        prop_assert_eq!(parse_sum(&x.to_string()).unwrap(), x);
    }

    #[test]
    fn corpus_modules_are_valid_and_filtered(seed in 0u64..1000) {
        for m in module_corpus(seed, 3, 8, 3) {
            let again = make_finite(&m.description()).unwrap();
            prop_assert_eq!(&again, &m);
            let s = StructuredModule::from(m.clone());
            let top = m.top_degree();
            let mut previous: Option<Vec<usize>> = None;
            for level in 0..=top + 1 {
                let layer = filtration_layer(&s, level, top, 16).unwrap();
                let dims: Vec<usize> = (0..=top).map(|d| layer[&d].len()).collect();
                if let Some(p) = &previous {
                    prop_assert!(dims.iter().zip(p).all(|(a, b)| a <= b));
                }
                previous = Some(dims);
            }
        }
    }
}
