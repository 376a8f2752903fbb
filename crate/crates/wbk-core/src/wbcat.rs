//! Morphism calculus of the upward/downward walled Brauer categories and
//! their twisted linearizations: normal forms, composition, degrees, signs.
//!
//! A morphism (m,n) → (p,q) is a pair of injections m ↪ p, n ↪ q together
//! with a perfect pairing of the two complements. Labels are 1-based
//! throughout. The normal form keeps both injections order-preserving and
//! the pairing list sorted by its second component; re-sorting a pairing
//! list costs the sign of the permutation in the twisted setting.

use crate::linalg::Perm;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WbError {
    #[error("objects do not compose: {0}")]
    Composition(String),
    #[error("invalid morphism data: {0}")]
    Invalid(String),
    #[error("index out of range: {0}")]
    IndexRange(String),
}

/// A morphism of the upward walled Brauer category in explicit form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WalledMorphism {
    pub src: (usize, usize),
    pub tgt: (usize, usize),
    /// Images of 1..=m in 1..=p.
    pub left_inj: Vec<usize>,
    /// Images of 1..=n in 1..=q.
    pub right_inj: Vec<usize>,
    /// Pairs (x ∈ 1..=p, y ∈ 1..=q) covering both complements bijectively.
    pub pairing: Vec<(usize, usize)>,
}

impl WalledMorphism {
    pub fn new(
        src: (usize, usize),
        tgt: (usize, usize),
        left_inj: Vec<usize>,
        right_inj: Vec<usize>,
        pairing: Vec<(usize, usize)>,
    ) -> Result<Self, WbError> {
        let f = WalledMorphism { src, tgt, left_inj, right_inj, pairing };
        f.check()?;
        Ok(f)
    }

    fn check(&self) -> Result<(), WbError> {
        let (m, n) = self.src;
        let (p, q) = self.tgt;
        if self.left_inj.len() != m || self.right_inj.len() != n {
            return Err(WbError::Invalid("injection length mismatch".into()));
        }
        let r = self.pairing.len();
        if p != m + r || q != n + r {
            return Err(WbError::Invalid(format!(
                "degree mismatch: {} pairs between ({m},{n}) and ({p},{q})",
                r
            )));
        }
        let mut seen_p = vec![false; p + 1];
        let mut seen_q = vec![false; q + 1];
        for &v in &self.left_inj {
            if v == 0 || v > p || seen_p[v] {
                return Err(WbError::Invalid("left injection not injective into target".into()));
            }
            seen_p[v] = true;
        }
        for &v in &self.right_inj {
            if v == 0 || v > q || seen_q[v] {
                return Err(WbError::Invalid("right injection not injective into target".into()));
            }
            seen_q[v] = true;
        }
        for &(x, y) in &self.pairing {
            if x == 0 || x > p || seen_p[x] {
                return Err(WbError::Invalid("pairing does not exhaust the left complement".into()));
            }
            if y == 0 || y > q || seen_q[y] {
                return Err(WbError::Invalid("pairing does not exhaust the right complement".into()));
            }
            seen_p[x] = true;
            seen_q[y] = true;
        }
        Ok(())
    }

    pub fn identity(m: usize, n: usize) -> Self {
        WalledMorphism {
            src: (m, n),
            tgt: (m, n),
            left_inj: (1..=m).collect(),
            right_inj: (1..=n).collect(),
            pairing: Vec::new(),
        }
    }

    /// Degree-0 morphism given by a pair of permutations of the source.
    pub fn from_perms(sigma: &Perm, tau: &Perm) -> Self {
        WalledMorphism {
            src: (sigma.n(), tau.n()),
            tgt: (sigma.n(), tau.n()),
            left_inj: (0..sigma.n()).map(|i| sigma.apply(i) + 1).collect(),
            right_inj: (0..tau.n()).map(|i| tau.apply(i) + 1).collect(),
            pairing: Vec::new(),
        }
    }

    pub fn degree(&self) -> usize {
        self.pairing.len()
    }

    /// Normal form: order-preserving injections, pairing sorted by the
    /// second component.
    pub fn is_normal_form(&self) -> bool {
        self.left_inj.windows(2).all(|w| w[0] < w[1])
            && self.right_inj.windows(2).all(|w| w[0] < w[1])
            && self.pairing.windows(2).all(|w| w[0].1 < w[1].1)
    }

    /// Writes `self = normal ∘ (σ, τ)` with `normal` in normal form and
    /// (σ, τ) automorphisms of the source (0-based `Perm`s). Also returns
    /// the sign of sorting the pairing list, which is the twisted-category
    /// normalization sign.
    pub fn normalize(&self) -> (WalledMorphism, Perm, Perm, i64) {
        let (m, n) = self.src;
        let sort_rank = |inj: &[usize]| -> (Vec<usize>, Perm) {
            let mut sorted = inj.to_vec();
            sorted.sort_unstable();
            let perm = Perm(inj.iter().map(|v| sorted.binary_search(v).unwrap()).collect());
            (sorted, perm)
        };
        let (left_sorted, sigma) = sort_rank(&self.left_inj);
        let (right_sorted, tau) = sort_rank(&self.right_inj);
        let mut order: Vec<usize> = (0..self.pairing.len()).collect();
        order.sort_by_key(|&i| self.pairing[i].1);
        let sort_perm = Perm({
            let mut img = vec![0; order.len()];
            for (new_pos, &old_pos) in order.iter().enumerate() {
                img[old_pos] = new_pos;
            }
            img
        });
        let pairing: Vec<(usize, usize)> = order.iter().map(|&i| self.pairing[i]).collect();
        let normal = WalledMorphism {
            src: (m, n),
            tgt: self.tgt,
            left_inj: left_sorted,
            right_inj: right_sorted,
            pairing,
        };
        debug_assert!(normal.is_normal_form());
        (normal, sigma, tau, sort_perm.sign())
    }
}

/// A walled morphism with a sign relative to the sorted-pairing normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedMorphism {
    pub morphism: WalledMorphism,
    pub sign: i64,
}

impl SignedMorphism {
    pub fn plus(morphism: WalledMorphism) -> Self {
        SignedMorphism { morphism, sign: 1 }
    }
}

/// Composition g ∘ f. In the untwisted category the sign is always +1; in
/// the twisted category the sign records the re-sorting of the merged
/// pairing list (f's transported pairs first, then g's own pairs).
pub fn compose(g: &SignedMorphism, f: &SignedMorphism, twisted: bool) -> Result<SignedMorphism, WbError> {
    let (gm, fm) = (&g.morphism, &f.morphism);
    if fm.tgt != gm.src {
        return Err(WbError::Composition(format!("target {:?} != source {:?}", fm.tgt, gm.src)));
    }
    let left_inj: Vec<usize> = fm.left_inj.iter().map(|&v| gm.left_inj[v - 1]).collect();
    let right_inj: Vec<usize> = fm.right_inj.iter().map(|&v| gm.right_inj[v - 1]).collect();
    let mut pairing: Vec<(usize, usize)> =
        fm.pairing.iter().map(|&(x, y)| (gm.left_inj[x - 1], gm.right_inj[y - 1])).collect();
    pairing.extend_from_slice(&gm.pairing);
    let raw = WalledMorphism { src: fm.src, tgt: gm.tgt, left_inj, right_inj, pairing };
    raw.check()?;
    // sort the merged pairing by y; the injections are whatever they are
    // (the ambient category does not require normal form for composition)
    let mut order: Vec<usize> = (0..raw.pairing.len()).collect();
    order.sort_by_key(|&i| raw.pairing[i].1);
    let sort_perm = Perm({
        let mut img = vec![0; order.len()];
        for (new_pos, &old_pos) in order.iter().enumerate() {
            img[old_pos] = new_pos;
        }
        img
    });
    let pairing: Vec<(usize, usize)> = order.iter().map(|&i| raw.pairing[i]).collect();
    let sort_sign = if twisted { sort_perm.sign() } else { 1 };
    Ok(SignedMorphism {
        morphism: WalledMorphism { pairing, ..raw },
        sign: g.sign * f.sign * sort_sign,
    })
}

/// All m·n elementary pairs (x, y) ∈ {1..m} x {1..n}, x-major order.
pub fn pair1(m: usize, n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(m * n);
    for x in 1..=m {
        for y in 1..=n {
            out.push((x, y));
        }
    }
    out
}

/// The elementary degree-1 morphism (m-1, n-1) → (m, n) determined by the
/// pair (x, y): order-preserving injections onto the complements, pairing
/// [(x, y)].
pub fn iota(x: usize, y: usize, m: usize, n: usize) -> Result<WalledMorphism, WbError> {
    if x == 0 || x > m || y == 0 || y > n {
        return Err(WbError::IndexRange(format!("iota({x},{y}) out of range for ({m},{n})")));
    }
    Ok(WalledMorphism {
        src: (m - 1, n - 1),
        tgt: (m, n),
        left_inj: (1..=m).filter(|&v| v != x).collect(),
        right_inj: (1..=n).filter(|&v| v != y).collect(),
        pairing: vec![(x, y)],
    })
}

/// Complete irredundant list of normal-form morphisms (m,n) → (p,q): the
/// section of the free right Aut(m,n)-action on the full hom set. Empty
/// when the degrees do not match. Deterministic order.
pub fn hom_basis(src: (usize, usize), tgt: (usize, usize)) -> Vec<WalledMorphism> {
    let (m, n) = src;
    let (p, q) = tgt;
    if p < m || q < n || p - m != q - n {
        return Vec::new();
    }
    let r = p - m;
    let mut out = Vec::new();
    for xset in subsets(p, r) {
        for yset in subsets(q, r) {
            // yset is ascending; assign each y the x of the chosen permutation
            for perm in Perm::all(r) {
                let pairing: Vec<(usize, usize)> = (0..r).map(|k| (xset[perm.apply(k)], yset[k])).collect();
                let left_inj: Vec<usize> = (1..=p).filter(|v| !xset.contains(v)).collect();
                let right_inj: Vec<usize> = (1..=q).filter(|v| !yset.contains(v)).collect();
                out.push(WalledMorphism { src, tgt, left_inj, right_inj, pairing });
            }
        }
    }
    out
}

/// |uwb((m,n),(p,q))| = p!·q!/r! when r = p-m = q-n ≥ 0 and 0 otherwise.
pub fn hom_count(src: (usize, usize), tgt: (usize, usize)) -> usize {
    let (m, n) = src;
    let (p, q) = tgt;
    if p < m || q < n || p - m != q - n {
        return 0;
    }
    let r = p - m;
    crate::linalg::factorial(p) * crate::linalg::factorial(q) / crate::linalg::factorial(r)
}

/// Ascending r-subsets of {1..n} in lexicographic order.
pub fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for v in start..=n {
            if n - v + 1 < r - cur.len() {
                break;
            }
            cur.push(v);
            rec(v + 1, n, r, cur, out);
            cur.pop();
        }
    }
    rec(1, n, r, &mut cur, &mut out);
    out
}

/// Peels the pairing pair with the largest y off a normal-form morphism:
/// returns ((x, y), rest) with `self = iota(x, y, p, q) ∘ rest` exactly (no
/// sign, no normalization needed). `None` in degree 0.
pub fn peel_top_pair(e: &WalledMorphism) -> Option<((usize, usize), WalledMorphism)> {
    debug_assert!(e.is_normal_form());
    let &(x, y) = e.pairing.last()?;
    let (p, q) = e.tgt;
    let relabel = |v: usize, removed: usize| if v > removed { v - 1 } else { v };
    let rest = WalledMorphism {
        src: e.src,
        tgt: (p - 1, q - 1),
        left_inj: e.left_inj.iter().map(|&v| relabel(v, x)).collect(),
        right_inj: e.right_inj.iter().map(|&v| relabel(v, y)).collect(),
        pairing: e.pairing[..e.pairing.len() - 1]
            .iter()
            .map(|&(a, b)| (relabel(a, x), relabel(b, y)))
            .collect(),
    };
    debug_assert!(rest.check().is_ok());
    Some(((x, y), rest))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hom_basis_identity_object() {
        // one morphism (1,1)→(1,1): the identity pair
        let b = hom_basis((1, 1), (1, 1));
        assert_eq!(b.len(), 1);
        assert_eq!(b[0], WalledMorphism::identity(1, 1));
    }

    #[test]
    fn hom_basis_two_matchings() {
        // (0,0)→(2,2): the two perfect matchings; 2!·2!/2! = 2
        let b = hom_basis((0, 0), (2, 2));
        assert_eq!(b.len(), 2);
        assert_eq!(hom_count((0, 0), (2, 2)), 2);
    }

    #[test]
    fn hom_basis_degree_one() {
        // (1,0)→(2,1): 2!·1!/1! = 2
        let b = hom_basis((1, 0), (2, 1));
        assert_eq!(b.len(), 2);
        assert_eq!(hom_count((1, 0), (2, 1)), 2);
    }

    #[test]
    fn hom_count_formula_window() {
        // free right action: |hom| = |normal forms| · m! · n!
        for m in 0..4usize {
            for n in 0..4usize {
                for p in 0..4usize {
                    for q in 0..4usize {
                        let forms = hom_basis((m, n), (p, q)).len();
                        let full = forms * crate::linalg::factorial(m) * crate::linalg::factorial(n);
                        assert_eq!(full, hom_count((m, n), (p, q)), "({m},{n})->({p},{q})");
                    }
                }
            }
        }
    }

    #[test]
    fn pair1_examples() {
        assert_eq!(pair1(2, 1), vec![(1, 1), (2, 1)]);
        assert_eq!(pair1(0, 3), vec![]);
        assert_eq!(pair1(2, 2).len(), 4);
    }

    #[test]
    fn iota_examples() {
        let i11 = iota(1, 1, 1, 1).unwrap();
        assert_eq!(i11.src, (0, 0));
        assert_eq!(i11.tgt, (1, 1));
        assert_eq!(i11.pairing, vec![(1, 1)]);

        let i21 = iota(2, 1, 2, 1).unwrap();
        assert_eq!(i21.left_inj, vec![1]);
        assert_eq!(i21.right_inj, Vec::<usize>::new());
        assert_eq!(i21.pairing, vec![(2, 1)]);

        let i12 = iota(1, 2, 3, 2).unwrap();
        assert_eq!(i12.left_inj, vec![2, 3]);
        assert_eq!(i12.right_inj, vec![1]);
        assert_eq!(i12.pairing, vec![(1, 2)]);

        assert!(iota(3, 1, 2, 1).is_err());
    }

    #[test]
    fn identity_composition() {
        let f = SignedMorphism::plus(iota(2, 1, 2, 2).unwrap());
        let id = SignedMorphism::plus(WalledMorphism::identity(2, 2));
        let c = compose(&id, &f, true).unwrap();
        assert_eq!(c, f);
    }

    #[test]
    fn iota_composite_normal_form() {
        // ι_{1,1}:(1,1)→(2,2) after ι_{1,1}:(0,0)→(1,1) lands on the
        // matching {(1,1),(2,2)} wait: transported pair of the inner iota is
        // (left_inj[0], right_inj[0]) of the outer = (2,2); outer pair (1,1).
        let outer = SignedMorphism::plus(iota(1, 1, 2, 2).unwrap());
        let inner = SignedMorphism::plus(iota(1, 1, 1, 1).unwrap());
        let c = compose(&outer, &inner, false).unwrap();
        assert_eq!(c.sign, 1);
        assert_eq!(c.morphism.src, (0, 0));
        assert_eq!(c.morphism.tgt, (2, 2));
        assert_eq!(c.morphism.pairing, vec![(1, 1), (2, 2)]);

        // twisted: the same composite with pairing listed out of order
        // carries sign -1 after normalization
        let unsorted = WalledMorphism {
            src: (0, 0),
            tgt: (2, 2),
            left_inj: vec![],
            right_inj: vec![],
            pairing: vec![(2, 2), (1, 1)],
        };
        let (_, _, _, sign) = unsorted.normalize();
        assert_eq!(sign, -1);
    }

    #[test]
    fn degree_additivity() {
        let f = SignedMorphism::plus(hom_basis((1, 1), (2, 2))[1].clone());
        let g = SignedMorphism::plus(hom_basis((2, 2), (4, 4))[7].clone());
        let c = compose(&g, &f, true).unwrap();
        assert_eq!(c.morphism.degree(), f.morphism.degree() + g.morphism.degree());
    }

    /// Brute-force oracle: |uwb((m,n),(p,q))| by enumerating pairs of
    /// bijections (m ⊔ r → p, n ⊔ r → q) modulo the diagonal S_r action.
    fn brute_force_count(m: usize, n: usize, p: usize, q: usize) -> usize {
        if p < m || q < n || p - m != q - n {
            return 0;
        }
        let r = p - m;
        let mut orbits = std::collections::BTreeSet::new();
        for f in Perm::all(p) {
            for g in Perm::all(q) {
                // canonical representative of the diagonal S_r orbit
                let mut best: Option<(Vec<usize>, Vec<usize>)> = None;
                for rho in Perm::all(r) {
                    let fv: Vec<usize> =
                        (0..m).map(|i| f.apply(i)).chain((0..r).map(|k| f.apply(m + rho.apply(k)))).collect();
                    let gv: Vec<usize> =
                        (0..n).map(|i| g.apply(i)).chain((0..r).map(|k| g.apply(n + rho.apply(k)))).collect();
                    let cand = (fv, gv);
                    if best.as_ref().is_none_or(|b| cand < *b) {
                        best = Some(cand);
                    }
                }
                orbits.insert(best.unwrap());
            }
        }
        orbits.len()
    }

    #[test]
    fn counting_vs_brute_force() {
        for m in 0..=3usize {
            for n in 0..=3usize {
                for p in 0..=3usize {
                    for q in 0..=3usize {
                        assert_eq!(
                            hom_count((m, n), (p, q)),
                            brute_force_count(m, n, p, q),
                            "({m},{n})->({p},{q})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn quadratic_relations_exhaustive() {
        // disjoint elementary pairs commute untwisted and anticommute
        // twisted, for all bidegrees ≤ (3,3)
        for m in 2..=3usize {
            for n in 2..=3usize {
                for &(x, y) in &pair1(m, n) {
                    for &(xp, yp) in &pair1(m, n) {
                        if x == xp || y == yp {
                            continue;
                        }
                        let shift = |v: usize, removed: usize| if v > removed { v - 1 } else { v };
                        let a = compose(
                            &SignedMorphism::plus(iota(x, y, m, n).unwrap()),
                            &SignedMorphism::plus(iota(shift(xp, x), shift(yp, y), m - 1, n - 1).unwrap()),
                            false,
                        )
                        .unwrap();
                        let b = compose(
                            &SignedMorphism::plus(iota(xp, yp, m, n).unwrap()),
                            &SignedMorphism::plus(iota(shift(x, xp), shift(y, yp), m - 1, n - 1).unwrap()),
                            false,
                        )
                        .unwrap();
                        assert_eq!(a.morphism, b.morphism);
                        assert_eq!(a.sign, b.sign);

                        let at = compose(
                            &SignedMorphism::plus(iota(x, y, m, n).unwrap()),
                            &SignedMorphism::plus(iota(shift(xp, x), shift(yp, y), m - 1, n - 1).unwrap()),
                            true,
                        )
                        .unwrap();
                        let bt = compose(
                            &SignedMorphism::plus(iota(xp, yp, m, n).unwrap()),
                            &SignedMorphism::plus(iota(shift(x, xp), shift(y, yp), m - 1, n - 1).unwrap()),
                            true,
                        )
                        .unwrap();
                        assert_eq!(at.morphism, bt.morphism);
                        assert_eq!(at.sign, -bt.sign, "twisted composites must anticommute");
                    }
                }
            }
        }
    }

    #[test]
    fn peel_reconstructs() {
        for e in hom_basis((1, 1), (3, 3)) {
            let ((x, y), rest) = peel_top_pair(&e).unwrap();
            let again = compose(
                &SignedMorphism::plus(iota(x, y, 3, 3).unwrap()),
                &SignedMorphism::plus(rest),
                true,
            )
            .unwrap();
            assert_eq!(again.morphism, e);
            assert_eq!(again.sign, 1);
        }
    }

    proptest! {
        #[test]
        fn compose_associative(seed in 0u64..500) {
            // pseudo-random triple of composable morphisms out of small hom sets
            let pick = |v: &[WalledMorphism], s: u64| v[(s as usize) % v.len()].clone();
            let f = pick(&hom_basis((1, 0), (2, 1)), seed);
            let g = pick(&hom_basis((2, 1), (3, 2)), seed / 7 + 1);
            let h = pick(&hom_basis((3, 2), (4, 3)), seed / 13 + 2);
            for twisted in [false, true] {
                let f = SignedMorphism::plus(f.clone());
                let g = SignedMorphism::plus(g.clone());
                let h = SignedMorphism::plus(h.clone());
                let left = compose(&h, &compose(&g, &f, twisted).unwrap(), twisted).unwrap();
                let right = compose(&compose(&h, &g, twisted).unwrap(), &f, twisted).unwrap();
                prop_assert_eq!(left, right);
            }
        }
    }
}
