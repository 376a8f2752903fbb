//! The shipped test operads: the zero operad, the associative algebras ℚ
//! and n₃ (strictly upper-triangular 3x3 matrices), and nonunital Ass and
//! Com truncated at a given arity.

use super::TruncatedOperad;
use crate::linalg::{qi, GroupAction, Perm, QMatrix};

/// The zero operad (no operations at all), with a generous knowledge
/// horizon so truncation never bites.
pub fn zero() -> TruncatedOperad {
    TruncatedOperad::new("zero", 8)
}

/// The associative algebra ℚ, placed in arity 1. Every other arity is known
/// to vanish, so the horizon is generous.
pub fn assoc_q() -> TruncatedOperad {
    let mut o = TruncatedOperad::new("assoc_Q", 8);
    o.insert_space(1, GroupAction::trivial(1, 1, 1));
    o.insert_composition(1, 1, 1, QMatrix::identity(1));
    o
}

/// The strictly upper-triangular 3x3 matrices span{e12, e23, e13} with
/// e12·e23 = e13 and all other products zero, placed in arity 1.
pub fn n3() -> TruncatedOperad {
    let mut o = TruncatedOperad::new("n3", 8);
    o.insert_space(1, GroupAction::trivial(3, 1, 1));
    let mut mat = QMatrix::zero(3, 9);
    // column a·3+b holds the product e_a · e_b; only e12·e23 = e13 survives
    mat.set(2, 1, qi(1));
    o.insert_composition(1, 1, 1, mat);
    o
}

/// Nonunital associative operad truncated at `max_arity`:
/// Ass(n) = ℚS_n with basis the words x_{w(1)}···x_{w(n)}, compositions by
/// word substitution.
pub fn ass_truncated(max_arity: usize) -> TruncatedOperad {
    let mut o = TruncatedOperad::new(format!("ass_le{max_arity}"), max_arity);
    let basis: Vec<Vec<Perm>> = (0..=max_arity).map(Perm::all).collect();
    for k in 1..=max_arity {
        let dim = basis[k].len();
        // letter relabeling is left multiplication on words
        let gens: Vec<QMatrix> = (0..k.saturating_sub(1))
            .map(|i| {
                let s = Perm::transposition(k, i, i + 1);
                let mut mat = QMatrix::zero(dim, dim);
                for (col, w) in basis[k].iter().enumerate() {
                    let target = s.compose(w);
                    let row = basis[k].binary_search_by(|p| p.0.cmp(&target.0)).unwrap();
                    mat.set(row, col, qi(1));
                }
                mat
            })
            .collect();
        o.insert_space(k, GroupAction::new(dim, k, 1, gens, vec![]));
    }
    for m in 1..=max_arity {
        for n in 1..=max_arity {
            if m + n - 1 > max_arity {
                continue;
            }
            for i in 1..=m {
                let mut mat = QMatrix::zero(basis[m + n - 1].len(), basis[m].len() * basis[n].len());
                for (a, wf) in basis[m].iter().enumerate() {
                    for (b, wg) in basis[n].iter().enumerate() {
                        let word = substitute_word(wf, i, wg);
                        let row = basis[m + n - 1].binary_search_by(|p| p.0.cmp(&word.0)).unwrap();
                        mat.set(row, a * basis[n].len() + b, qi(1));
                    }
                }
                o.insert_composition(m, i, n, mat);
            }
        }
    }
    o
}

/// Substitutes the word `g` for the letter `i` (1-based) of the word `f`,
/// with the standard relabeling of the remaining letters.
fn substitute_word(f: &Perm, i: usize, g: &Perm) -> Perm {
    let n = g.n();
    let mut out = Vec::with_capacity(f.n() + n - 1);
    for pos in 0..f.n() {
        let letter = f.apply(pos) + 1;
        if letter < i {
            out.push(letter - 1);
        } else if letter > i {
            out.push(letter + n - 2);
        } else {
            for gpos in 0..n {
                out.push(i - 1 + g.apply(gpos));
            }
        }
    }
    Perm(out)
}

/// Nonunital commutative operad truncated at `max_arity`: Com(n) = ℚ with
/// the trivial action, all compositions the canonical isomorphism.
pub fn com_truncated(max_arity: usize) -> TruncatedOperad {
    let mut o = TruncatedOperad::new(format!("com_le{max_arity}"), max_arity);
    for k in 1..=max_arity {
        o.insert_space(k, GroupAction::trivial(1, k, 1));
    }
    for m in 1..=max_arity {
        for n in 1..=max_arity {
            if m + n - 1 > max_arity {
                continue;
            }
            for i in 1..=m {
                o.insert_composition(m, i, n, QMatrix::identity(1));
            }
        }
    }
    o
}

/// All shipped operads in a fixed order.
pub fn shipped() -> Vec<TruncatedOperad> {
    vec![zero(), assoc_q(), n3(), ass_truncated(3), com_truncated(3)]
}
