//! Truncated operads via partial compositions, their wheeled component, and
//! the construction of the downward walled Brauer modules they induce.

mod build;
pub mod examples;

pub use build::{build_ltfb, build_stfb, BuildError, BuildOptions, Config, LamFactor, WheeledModule, WhlFactor};

use crate::fbfb::{FbFbModule, Window};
use crate::linalg::{GroupAction, Perm, QMatrix, Quotient};
use std::collections::BTreeMap;

/// An operad in ℚ-vector spaces truncated at a maximal arity: one S_k-space
/// per arity with partial composition matrices
/// ∘_i : 𝒪(m) ⊗ 𝒪(n) → 𝒪(m+n-1) wherever the truncation admits them.
#[derive(Clone, Debug)]
pub struct TruncatedOperad {
    pub name: String,
    pub max_arity: usize,
    /// Arity k space with its S_k action (right factor trivial); absent
    /// means zero. Arity 0 is representable but rejected by the module
    /// builders.
    spaces: BTreeMap<usize, GroupAction>,
    /// (m, i, n) → matrix of ∘_i, columns indexed by a·dim𝒪(n)+b.
    compositions: BTreeMap<(usize, usize, usize), QMatrix>,
    /// Optional marked unit vector in 𝒪(1).
    pub unit: Option<Vec<crate::linalg::Q>>,
}

#[derive(Clone, Debug, Default)]
pub struct OperadReport {
    pub failures: Vec<String>,
}

impl OperadReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    fn push(&mut self, msg: String) {
        if self.failures.len() < 32 {
            self.failures.push(msg);
        }
    }
}

impl TruncatedOperad {
    pub fn new(name: impl Into<String>, max_arity: usize) -> Self {
        TruncatedOperad {
            name: name.into(),
            max_arity,
            spaces: BTreeMap::new(),
            compositions: BTreeMap::new(),
            unit: None,
        }
    }

    pub fn insert_space(&mut self, arity: usize, action: GroupAction) {
        assert!(arity <= self.max_arity, "arity beyond truncation");
        assert_eq!(action.m(), arity);
        assert_eq!(action.n(), 1);
        if action.dim() > 0 {
            self.spaces.insert(arity, action);
        }
    }

    pub fn insert_composition(&mut self, m: usize, i: usize, n: usize, mat: QMatrix) {
        assert!(1 <= i && i <= m, "slot out of range");
        assert!(m + n - 1 <= self.max_arity, "composite arity beyond truncation");
        assert_eq!(mat.nrows(), self.dim(m + n - 1));
        assert_eq!(mat.ncols(), self.dim(m) * self.dim(n));
        self.compositions.insert((m, i, n), mat);
    }

    pub fn dim(&self, arity: usize) -> usize {
        self.spaces.get(&arity).map_or(0, |a| a.dim())
    }

    pub fn action(&self, arity: usize) -> Option<&GroupAction> {
        self.spaces.get(&arity)
    }

    pub fn arities(&self) -> impl Iterator<Item = usize> + '_ {
        self.spaces.keys().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.spaces.is_empty()
    }

    /// ∘_i matrix, zero when any participating space vanishes.
    pub fn composition(&self, m: usize, i: usize, n: usize) -> QMatrix {
        assert!(m + n >= 1 && m + n - 1 <= self.max_arity, "composition beyond truncation");
        self.compositions
            .get(&(m, i, n))
            .cloned()
            .unwrap_or_else(|| QMatrix::zero(self.dim(m + n - 1), self.dim(m) * self.dim(n)))
    }

    /// Composite of two basis vectors as a vector in 𝒪(m+n-1).
    pub fn compose_basis(&self, m: usize, i: usize, n: usize, a: usize, b: usize) -> Vec<crate::linalg::Q> {
        self.composition(m, i, n).column(a * self.dim(n) + b)
    }

    /// Validates the Coxeter relations of every space, equivariance of all
    /// partial compositions, and the sequential/parallel associativity
    /// axioms, within the truncation.
    pub fn validate(&self) -> OperadReport {
        let mut report = OperadReport::default();
        for (k, act) in &self.spaces {
            if let Err(e) = act.validate() {
                report.push(format!("arity {k} space: {e}"));
            }
        }
        if !report.ok() {
            return report;
        }
        self.check_equivariance(&mut report);
        self.check_sequential(&mut report);
        self.check_parallel(&mut report);
        if let Some(u) = &self.unit {
            self.check_unit(u, &mut report);
        }
        report
    }

    fn check_equivariance(&self, report: &mut OperadReport) {
        for (&(m, i, n), mat) in &self.compositions {
            let (dm, dn) = (self.dim(m), self.dim(n));
            if dm == 0 || dn == 0 {
                continue;
            }
            let target = self.action(m + n - 1);
            // outer generators s_j ∈ S_m
            for j in 0..m.saturating_sub(1) {
                let sigma = Perm::transposition(m, j, j + 1);
                let rho_m = self.action(m).unwrap().matrix_of(&sigma, &Perm::identity(1));
                let si = sigma.apply(i - 1) + 1;
                let lhs = self.composition(m, si, n).mul(&rho_m.kron(&QMatrix::identity(dn)));
                let big = block_perm(&sigma, i, &Perm::identity(n));
                let rhs = match target {
                    Some(t) => t.matrix_of(&big, &Perm::identity(1)).mul(mat),
                    None => QMatrix::zero(0, mat.ncols()),
                };
                if lhs != rhs {
                    report.push(format!("equivariance of ∘ fails at (m,i,n)=({m},{i},{n}), outer generator {j}"));
                    return;
                }
            }
            // inner generators s_j ∈ S_n
            for j in 0..n.saturating_sub(1) {
                let tau = Perm::transposition(n, j, j + 1);
                let rho_n = self.action(n).unwrap().matrix_of(&tau, &Perm::identity(1));
                let lhs = mat.mul(&QMatrix::identity(dm).kron(&rho_n));
                let big = block_perm(&Perm::identity(m), i, &tau);
                let rhs = match target {
                    Some(t) => t.matrix_of(&big, &Perm::identity(1)).mul(mat),
                    None => QMatrix::zero(0, mat.ncols()),
                };
                if lhs != rhs {
                    report.push(format!("equivariance of ∘ fails at (m,i,n)=({m},{i},{n}), inner generator {j}"));
                    return;
                }
            }
        }
    }

    /// (f ∘_i g) ∘_{i-1+j} h = f ∘_i (g ∘_j h)
    fn check_sequential(&self, report: &mut OperadReport) {
        let arities: Vec<usize> = self.arities().collect();
        for &a in &arities {
            for &b in &arities {
                for &c in &arities {
                    if a + b + c < 2 || a + b + c - 2 > self.max_arity || a == 0 || b == 0 {
                        continue;
                    }
                    let (da, dc) = (self.dim(a), self.dim(c));
                    for i in 1..=a {
                        for j in 1..=b {
                            // lhs: (f ∘_i g) then insert h at slot i-1+j
                            let first = self.composition(a, i, b);
                            let lhs = self.composition(a + b - 1, i - 1 + j, c).mul(&first.kron(&QMatrix::identity(dc)));
                            let inner = self.composition(b, j, c);
                            let rhs = self.composition(a, i, b + c - 1).mul(&QMatrix::identity(da).kron(&inner));
                            if lhs != rhs {
                                report.push(format!(
                                    "sequential axiom fails for arities ({a},{b},{c}) at slots (i,j)=({i},{j})"
                                ));
                                return;
                            }
                        }
                    }
                }
            }
        }
    }

    /// (f ∘_i g) ∘_{i'+b-1} h = (f ∘_{i'} h) ∘_i g for i < i'
    fn check_parallel(&self, report: &mut OperadReport) {
        let arities: Vec<usize> = self.arities().collect();
        for &a in &arities {
            for &b in &arities {
                for &c in &arities {
                    if a + b + c < 2 || a + b + c - 2 > self.max_arity || a == 0 {
                        continue;
                    }
                    let (da, db, dc) = (self.dim(a), self.dim(b), self.dim(c));
                    if da == 0 || db == 0 || dc == 0 {
                        continue;
                    }
                    for i in 1..=a {
                        for ip in i + 1..=a {
                            let lhs = self
                                .composition(a + b - 1, ip + b - 1, c)
                                .mul(&self.composition(a, i, b).kron(&QMatrix::identity(dc)));
                            // rhs acts on 𝒪(a)⊗𝒪(c)⊗𝒪(b) after swapping the g,h factors
                            let rhs_raw = self
                                .composition(a + c - 1, i, b)
                                .mul(&self.composition(a, ip, c).kron(&QMatrix::identity(db)));
                            // reorder columns: (f,g,h) → (f,h,g)
                            let mut swap = QMatrix::zero(da * dc * db, da * db * dc);
                            for fa in 0..da {
                                for gb in 0..db {
                                    for hc in 0..dc {
                                        swap.set(
                                            fa * dc * db + hc * db + gb,
                                            fa * db * dc + gb * dc + hc,
                                            crate::linalg::qi(1),
                                        );
                                    }
                                }
                            }
                            let rhs = rhs_raw.mul(&swap);
                            if lhs != rhs {
                                report.push(format!(
                                    "parallel axiom fails for arities ({a},{b},{c}) at slots (i,i')=({i},{ip})"
                                ));
                                return;
                            }
                        }
                    }
                }
            }
        }
    }

    /// With a marked unit e ∈ 𝒪(1): its wheel class must vanish.
    fn check_unit(&self, u: &[crate::linalg::Q], report: &mut OperadReport) {
        if self.dim(1) != u.len() {
            report.push("unit vector dimension mismatch".into());
            return;
        }
        let wheel = self.wheeled_component();
        if let Some(space) = wheel.space(0) {
            let coords = space.quotient.project.mul_vec(u);
            if coords.iter().any(|c| !num::Zero::is_zero(c)) {
                report.push("marked unit has nonzero wheel class".into());
            }
        }
    }

    /// The wheeled component |δ₁₁𝒪|: arity-k part is 𝒪(k+1) modulo the
    /// S_k-orbit closure of all commutators of the marked-slot product.
    pub fn wheeled_component(&self) -> WheeledComponent {
        let mut spaces = BTreeMap::new();
        for k in 0..self.max_arity {
            let ambient = self.dim(k + 1);
            if ambient == 0 {
                continue;
            }
            let mut relations: Vec<Vec<crate::linalg::Q>> = Vec::new();
            for s in 0..=k {
                let t = k - s;
                if self.dim(s + 1) == 0 || self.dim(t + 1) == 0 || s + t + 1 > self.max_arity {
                    continue;
                }
                for a in 0..self.dim(s + 1) {
                    for b in 0..self.dim(t + 1) {
                        // μ̄(a,b) = a ∘_{s+1} b (marked slot stays last)
                        let ab = self.compose_basis(s + 1, s + 1, t + 1, a, b);
                        let ba = self.compose_basis(t + 1, t + 1, s + 1, b, a);
                        // relabel ba so that a's inputs are 1..s again; the
                        // marked last slot stays put
                        let beta = extend_fixing_last(&block_swap_perm(s, t), k + 1);
                        let ba_mat = self
                            .action(k + 1)
                            .unwrap()
                            .matrix_of(&beta, &Perm::identity(1))
                            .mul_vec(&ba);
                        let rel: Vec<crate::linalg::Q> =
                            ab.iter().zip(ba_mat.iter()).map(|(x, y)| x - y).collect();
                        relations.push(rel);
                    }
                }
            }
            // close under the S_k action (fixing the marked last slot)
            let act = self.action(k + 1).unwrap();
            let mut closed: Vec<Vec<crate::linalg::Q>> = Vec::new();
            for rho in Perm::all(k) {
                let ext = extend_fixing_last(&rho, k + 1);
                let mat = act.matrix_of(&ext, &Perm::identity(1));
                for rel in &relations {
                    closed.push(mat.mul_vec(rel));
                }
            }
            let span = QMatrix::from_columns(ambient, &closed);
            let quotient = Quotient::by_subspace(ambient, &span);
            if quotient.dim() == 0 {
                continue;
            }
            let descend = |g: &QMatrix| quotient.project.mul(&g.mul(&quotient.section));
            let gens: Vec<QMatrix> = (0..k.saturating_sub(1))
                .map(|i| {
                    let ext = extend_fixing_last(&Perm::transposition(k, i, i + 1), k + 1);
                    descend(&act.matrix_of(&ext, &Perm::identity(1)))
                })
                .collect();
            let action = GroupAction::new(quotient.dim(), k, 0, gens, vec![]);
            spaces.insert(k, WheelSpace { quotient, action });
        }
        WheeledComponent { spaces }
    }

    /// 𝒪 as an FB x FB module supported at (k, 1): complete for m ≤ the
    /// truncation arity.
    pub fn as_fbfb(&self) -> FbFbModule {
        let mut out = FbFbModule::new(Window { m: Some(self.max_arity), n: None });
        for (&k, act) in &self.spaces {
            out.insert(k, 1, act.clone());
        }
        out
    }
}

/// One graded piece of the wheeled component: a quotient of 𝒪(k+1) with its
/// induced S_k action.
#[derive(Clone, Debug)]
pub struct WheelSpace {
    pub quotient: Quotient,
    pub action: GroupAction,
}

#[derive(Clone, Debug)]
pub struct WheeledComponent {
    spaces: BTreeMap<usize, WheelSpace>,
}

impl WheeledComponent {
    pub fn dim(&self, k: usize) -> usize {
        self.spaces.get(&k).map_or(0, |s| s.quotient.dim())
    }

    pub fn space(&self, k: usize) -> Option<&WheelSpace> {
        self.spaces.get(&k)
    }

    pub fn is_zero(&self) -> bool {
        self.spaces.is_empty()
    }

    /// |δ₁₁𝒪| as an FB x FB module supported at (k, 0).
    pub fn as_fbfb(&self, max_arity: usize) -> FbFbModule {
        let mut out = FbFbModule::new(Window { m: Some(max_arity.saturating_sub(1)), n: None });
        for (&k, sp) in &self.spaces {
            let mut act = sp.action.clone();
            act = GroupAction::new(
                act.dim(),
                k,
                0,
                (0..k.saturating_sub(1)).map(|i| act.left_gen(i).clone()).collect(),
                vec![],
            );
            out.insert(k, 0, act);
        }
        out
    }
}

/// The block substitution permutation σ ∘_i τ ∈ S_{m+n-1} (0-based perms,
/// 1-based slot i): relabels the inputs of a composite f∘_i g when f is
/// relabeled by σ and g by τ.
pub fn block_perm(sigma: &Perm, i: usize, tau: &Perm) -> Perm {
    let m = sigma.n();
    let n = tau.n();
    let si = sigma.apply(i - 1) + 1; // 1-based new slot of the substitution
    let mut img = Vec::with_capacity(m + n - 1);
    let f_slot_new = |j: usize| -> usize {
        // 1-based f-slot j ≠ i of the composite-with-slot-σ(i)
        let sj = sigma.apply(j - 1) + 1;
        if sj < si {
            sj
        } else {
            sj + n - 1
        }
    };
    for p in 1..=(m + n - 1) {
        let target = if p < i {
            f_slot_new(p)
        } else if p < i + n {
            // g-input j = p - i + 1
            si - 1 + (tau.apply(p - i) + 1)
        } else {
            f_slot_new(p - n + 1)
        };
        img.push(target - 1);
    }
    Perm(img)
}

/// The permutation of S_{s+t} exchanging the first t labels block with the
/// following s labels block (b-labels move after a-labels).
fn block_swap_perm(s: usize, t: usize) -> Perm {
    let mut img = Vec::with_capacity(s + t);
    for p in 0..t {
        img.push(s + p);
    }
    for p in 0..s {
        img.push(p);
    }
    Perm(img)
}

/// Extends ρ ∈ S_k to S_{k+1} fixing the last point.
pub fn extend_fixing_last(rho: &Perm, total: usize) -> Perm {
    let mut img: Vec<usize> = rho.0.clone();
    while img.len() < total {
        img.push(img.len());
    }
    Perm(img)
}

#[cfg(test)]
mod tests {
    use super::examples;
    use super::*;
    use crate::linalg::qi;

    #[test]
    fn assoc_q_validates() {
        let o = examples::assoc_q();
        let rep = o.validate();
        assert!(rep.ok(), "{:?}", rep.failures);
    }

    #[test]
    fn ass3_validates() {
        let o = examples::ass_truncated(3);
        let rep = o.validate();
        assert!(rep.ok(), "{:?}", rep.failures);
    }

    #[test]
    fn com3_validates() {
        let o = examples::com_truncated(3);
        let rep = o.validate();
        assert!(rep.ok(), "{:?}", rep.failures);
    }

    #[test]
    fn n3_validates() {
        let o = examples::n3();
        let rep = o.validate();
        assert!(rep.ok(), "{:?}", rep.failures);
    }

    #[test]
    fn perturbed_operad_fails() {
        let mut o = examples::ass_truncated(3);
        let mut mat = o.composition(2, 1, 2);
        let v = mat.get(0, 0) + qi(1);
        mat.set(0, 0, v);
        o.insert_composition(2, 1, 2, mat);
        let rep = o.validate();
        assert!(!rep.ok());
        assert!(rep.failures[0].contains("(2,"), "violated triple reported: {:?}", rep.failures);
    }

    #[test]
    fn ass_hand_checked_composition() {
        // arity (2,2,3): in Ass, x1x2 ∘_1 x1x2 = x1x2x3 and ∘_2 gives the
        // other bracketing; both equal the flat word by associativity
        let o = examples::ass_truncated(3);
        // basis of Ass(2): words [1,2] and [2,1] in lex order of perms
        let c = o.compose_basis(2, 1, 2, 0, 0);
        // (x1x2)∘_1(x1x2) = x1x2x3: identity permutation, index 0 of S_3
        assert_eq!(c[0], qi(1));
        assert!(c.iter().skip(1).all(|v| num::Zero::is_zero(v)));
        // (x2x1)∘_2(x1x2): substitute into slot 2 of [2,1]: block (2,3) after 1
        // word: [2,3,1]
        let c2 = o.compose_basis(2, 2, 2, 1, 0);
        let target = Perm::all(3).into_iter().position(|p| p.0 == vec![1, 2, 0]).unwrap();
        assert_eq!(c2[target], qi(1));
    }

    #[test]
    fn wheel_of_commutative_point() {
        // A = ℚ with commutative product: no commutators, |A| = A
        let o = examples::assoc_q();
        let w = o.wheeled_component();
        assert_eq!(w.dim(0), 1);
    }

    #[test]
    fn wheel_of_n3() {
        // strictly upper-triangular 3x3: [A,A] = span{e13}, so |A| has dim 2
        let o = examples::n3();
        let w = o.wheeled_component();
        assert_eq!(w.dim(0), 2);
    }

    #[test]
    fn wheel_of_zero() {
        let o = examples::zero();
        let w = o.wheeled_component();
        assert!(w.is_zero());
    }

    #[test]
    fn unit_kill_flags_marked_unit() {
        // ℚ with its unit marked: the wheel class of 1 is nonzero, so the
        // validator must flag it
        let mut o = examples::assoc_q();
        o.unit = Some(vec![qi(1)]);
        let rep = o.validate();
        assert!(!rep.ok());
        assert!(rep.failures[0].contains("unit"));
    }

    #[test]
    fn block_perm_identity() {
        let id2 = Perm::identity(2);
        let id3 = Perm::identity(3);
        assert_eq!(block_perm(&id2, 1, &id3), Perm::identity(4));
        // swap in S_2, substitute at slot 1 with block of size 2:
        // f-inputs {1,2}, σ = (12): slot 1 → 2; composite slots:
        // [g1,g2,f2] → [f2→1? ...]
        let swap = Perm(vec![1, 0]);
        let bp = block_perm(&swap, 1, &Perm::identity(2));
        // g block moves to positions 2..3, f-slot 2 moves to 1
        assert_eq!(bp, Perm(vec![1, 2, 0]));
    }
}
