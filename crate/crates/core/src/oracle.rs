//! Evaluation of Steenrod operations on `u_1 u_2 ... u_n` in
//! `F_2[u_1, ..., u_n]`, independent of the Adem rewriting engine.
//!
//! The action on polynomials is determined by `Sq(u) = u + u^2` and the
//! Cartan formula, so `Sq^i(u^e) = binom(e, i) u^{e+i}`. Everything reachable
//! from the product of all variables is symmetric, so polynomials are kept
//! in the monomial symmetric basis: a term is a multiset of exponents,
//! stored as sorted `(exponent, multiplicity)` pairs summing to `n`.
//!
//! Degree-`d` elements of the algebra are detected faithfully on
//! `u_1 ... u_n` whenever `n >= d`, which makes this an equality oracle for
//! the admissible normal form.

use std::collections::{BTreeMap, BTreeSet};

use crate::steenrod::AdmissibleSum;

/// A symmetric polynomial over GF(2) in the monomial symmetric basis.
pub type SymmetricPoly = BTreeSet<Vec<(usize, usize)>>;

/// `u_1 u_2 ... u_n`.
pub fn product_of_variables(n: usize) -> SymmetricPoly {
    if n == 0 {
        return BTreeSet::from([Vec::new()]);
    }
    BTreeSet::from([vec![(1, n)]])
}

fn toggle(poly: &mut SymmetricPoly, term: Vec<(usize, usize)>) {
    if !poly.remove(&term) {
        poly.insert(term);
    }
}

/// `Sq^i` applied to a symmetric polynomial.
pub fn apply_sq(i: usize, poly: &SymmetricPoly) -> SymmetricPoly {
    let mut out = SymmetricPoly::new();
    for term in poly {
        for image in sq_on_symmetric_monomial(i, term) {
            toggle(&mut out, image);
        }
    }
    out
}

// The coefficient of m_mu in Sq^i(m_lambda) counts assignments of a source
// exponent to every variable of u^mu. Grouping variables by (target, source)
// gives a product of multinomial coefficients, one per target exponent; such
// a multinomial is odd iff its parts have pairwise disjoint binary digits.
fn sq_on_symmetric_monomial(i: usize, lambda: &[(usize, usize)]) -> Vec<Vec<(usize, usize)>> {
    let mut results = Vec::new();
    let mut targets: BTreeMap<usize, usize> = BTreeMap::new();
    distribute_group(lambda, 0, i, &mut targets, &mut results);
    results
}

fn distribute_group(
    lambda: &[(usize, usize)],
    group: usize,
    remaining: usize,
    targets: &mut BTreeMap<usize, usize>,
    out: &mut Vec<Vec<(usize, usize)>>,
) {
    if group == lambda.len() {
        if remaining == 0 {
            out.push(targets.iter().map(|(&t, &c)| (t, c)).collect());
        }
        return;
    }
    let (e, count) = lambda[group];
    // binom(e, delta) is odd iff delta is a binary submask of e
    let deltas: Vec<usize> = (0..=e).filter(|&d| d & !e == 0).collect();
    split_count(lambda, group, &deltas, 0, count, remaining, targets, out);
}

#[allow(clippy::too_many_arguments)]
fn split_count(
    lambda: &[(usize, usize)],
    group: usize,
    deltas: &[usize],
    k: usize,
    left: usize,
    remaining: usize,
    targets: &mut BTreeMap<usize, usize>,
    out: &mut Vec<Vec<(usize, usize)>>,
) {
    let e = lambda[group].0;
    if k + 1 == deltas.len() {
        let delta = deltas[k];
        let cost = delta * left;
        if cost > remaining {
            return;
        }
        with_part(targets, e + delta, left, |targets| {
            distribute_group(lambda, group + 1, remaining - cost, targets, out)
        });
        return;
    }
    let delta = deltas[k];
    for part in 0..=left {
        let cost = delta * part;
        if cost > remaining {
            break;
        }
        with_part(targets, e + delta, part, |targets| {
            split_count(lambda, group, deltas, k + 1, left - part, remaining - cost, targets, out)
        });
    }
}

/// Adds `part` variables at exponent `t` for the duration of `f`, skipping
/// `f` entirely when the multinomial coefficient would become even.
fn with_part(
    targets: &mut BTreeMap<usize, usize>,
    t: usize,
    part: usize,
    f: impl FnOnce(&mut BTreeMap<usize, usize>),
) {
    if part == 0 {
        f(targets);
        return;
    }
    let current = targets.get(&t).copied().unwrap_or(0);
    if current & part != 0 {
        return;
    }
    targets.insert(t, current | part);
    f(targets);
    if current == 0 {
        targets.remove(&t);
    } else {
        targets.insert(t, current);
    }
}

/// `Sq^{w_1} ... Sq^{w_k} (u_1 ... u_n)`; the rightmost factor acts first.
pub fn evaluate_word(word: &[usize], n: usize) -> SymmetricPoly {
    let mut p = product_of_variables(n);
    for &i in word.iter().rev() {
        if i > 0 {
            p = apply_sq(i, &p);
        }
    }
    p
}

pub fn evaluate_sum(sum: &AdmissibleSum, n: usize) -> SymmetricPoly {
    let mut out = SymmetricPoly::new();
    for m in sum.terms() {
        for t in evaluate_word(m.indices(), n) {
            toggle(&mut out, t);
        }
    }
    out
}

/// Whether `word` and `sum` act identically on `u_1 ... u_n` with `n` the
/// degree of the word; this decides equality in the algebra.
pub fn word_agrees_with(word: &[usize], sum: &AdmissibleSum) -> bool {
    let n: usize = word.iter().sum();
    evaluate_word(word, n) == evaluate_sum(sum, n)
}

/// Whether two homogeneous elements of degree `degree` are equal.
pub fn sums_agree(a: &AdmissibleSum, b: &AdmissibleSum, degree: usize) -> bool {
    evaluate_sum(a, degree) == evaluate_sum(b, degree)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sq1_on_one_variable_squares_it() {
        let p = apply_sq(1, &product_of_variables(1));
        assert_eq!(p, BTreeSet::from([vec![(2, 1)]]));
    }

    #[test]
    fn sq1_sq1_vanishes() {
        assert!(evaluate_word(&[1, 1], 2).is_empty());
    }

    #[test]
    fn sq1_on_two_variables() {
        // Sq^1(u1 u2) = u1^2 u2 + u1 u2^2 = m_(2,1)
        let p = apply_sq(1, &product_of_variables(2));
        assert_eq!(p, BTreeSet::from([vec![(1, 1), (2, 1)]]));
    }

    #[test]
    fn top_square_is_the_square() {
        // Sq^n(u1...un) = u1^2...un^2
        for n in 1..8 {
            assert_eq!(apply_sq(n, &product_of_variables(n)), BTreeSet::from([vec![(2, n)]]));
        }
    }

    #[test]
    fn brute_force_agrees_on_three_variables() {
        // expand Sq^2 Sq^1 (u1 u2 u3) by hand over explicit exponent vectors
        fn sq_poly(i: usize, p: &BTreeSet<Vec<usize>>) -> BTreeSet<Vec<usize>> {
            let mut out = BTreeSet::new();
            for m in p {
                let mut stack = vec![(0usize, i, m.clone())];
                while let Some((j, left, cur)) = stack.pop() {
                    if j == m.len() {
                        if left == 0 && !out.remove(&cur) {
                            out.insert(cur);
                        }
                        continue;
                    }
                    for d in 0..=left.min(m[j]) {
                        if d & !m[j] == 0 {
                            let mut next = cur.clone();
                            next[j] += d;
                            stack.push((j + 1, left - d, next));
                        }
                    }
                }
            }
            out
        }
        let start = BTreeSet::from([vec![1, 1, 1]]);
        let brute = sq_poly(2, &sq_poly(1, &start));
        let sym = evaluate_word(&[2, 1], 3);
        // orbit sizes must add up to the brute-force count of monomials
        let mut count = 0;
        for term in &sym {
            let mut orbit = 6;
            for &(_, c) in term {
                orbit /= (1..=c).product::<usize>();
            }
            count += orbit;
        }
        assert_eq!(count, brute.len());
    }
}
