//! Modules over the (twisted) downward walled Brauer category, represented
//! by an FB x FB module plus one contraction matrix per elementary pair,
//! with a validator for the defining relations and the induced action of
//! arbitrary downward morphisms.

use crate::fbfb::FbFbModule;
use crate::linalg::{Perm, QMatrix};
use crate::wbcat::{pair1, SignedMorphism, WalledMorphism, WbError};
use std::collections::BTreeMap;

/// An FB x FB module together with contraction maps
/// c_{x,y}: M(m,n) → M(m-1,n-1), one for each (x,y) ∈ pair1(m,n).
/// Missing matrices are treated as zero. `twisted` selects the sign form
/// of the quadratic relation.
#[derive(Clone, Debug)]
pub struct DwbTwModule {
    pub underlying: FbFbModule,
    contractions: BTreeMap<((usize, usize), (usize, usize)), QMatrix>,
    pub twisted: bool,
    /// Upper bound on m-n below which the module is exact (None: no bound).
    /// Spaces above the bound may be truncations of the intended object.
    pub diag_bound: Option<usize>,
}

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub failures: Vec<String>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    fn push(&mut self, msg: String) {
        if self.failures.len() < 32 {
            self.failures.push(msg);
        }
    }
}

impl DwbTwModule {
    pub fn new(
        underlying: FbFbModule,
        contractions: BTreeMap<((usize, usize), (usize, usize)), QMatrix>,
        twisted: bool,
    ) -> Self {
        DwbTwModule { underlying, contractions, twisted, diag_bound: None }
    }

    /// Module with every contraction zero (positive-degree morphisms act
    /// trivially).
    pub fn with_zero_contractions(underlying: FbFbModule, twisted: bool) -> Self {
        DwbTwModule { underlying, contractions: BTreeMap::new(), twisted, diag_bound: None }
    }

    /// True when the space at (m,n) is exact rather than a truncation.
    pub fn complete(&self, m: usize, n: usize) -> bool {
        if m < n {
            return true;
        }
        self.underlying.window().contains(m, n) && self.diag_bound.is_none_or(|d| m - n <= d)
    }

    pub fn dim(&self, m: usize, n: usize) -> usize {
        self.underlying.dim(m, n)
    }

    pub fn contraction(&self, m: usize, n: usize, x: usize, y: usize) -> QMatrix {
        self.contractions
            .get(&((m, n), (x, y)))
            .cloned()
            .unwrap_or_else(|| QMatrix::zero(self.dim(m.wrapping_sub(1), n.wrapping_sub(1)), self.dim(m, n)))
    }

    pub fn set_contraction(&mut self, m: usize, n: usize, x: usize, y: usize, mat: QMatrix) {
        assert_eq!(mat.ncols(), self.dim(m, n));
        assert_eq!(mat.nrows(), self.dim(m - 1, n - 1));
        if !mat.is_zero() {
            self.contractions.insert(((m, n), (x, y)), mat);
        }
    }

    /// The equivalence with the untwisted side: same spaces, output action
    /// twisted by sign, contraction at (x,y) scaled by (-1)^{y-1}.
    pub fn sign_twist(&self) -> Self {
        let underlying = self.underlying.sign_twist(crate::fbfb::TwistSide::Right);
        let contractions = self
            .contractions
            .iter()
            .map(|(&(mn, (x, y)), mat)| {
                let scaled = if y % 2 == 0 { mat.neg() } else { mat.clone() };
                ((mn, (x, y)), scaled)
            })
            .collect();
        DwbTwModule { underlying, contractions, twisted: !self.twisted, diag_bound: self.diag_bound }
    }

    /// Checks dimensions, equivariance of every contraction against the
    /// Coxeter generators, and the (anti)commutation of disjoint
    /// contractions.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        if let Err(e) = self.underlying.validate() {
            report.push(format!("underlying module: {e}"));
            return report;
        }
        for (&((m, n), (x, y)), mat) in &self.contractions {
            if m == 0 || n == 0 || x == 0 || x > m || y == 0 || y > n {
                report.push(format!("contraction index ({x},{y}) out of range at ({m},{n})"));
                continue;
            }
            if mat.ncols() != self.dim(m, n) || mat.nrows() != self.dim(m - 1, n - 1) {
                report.push(format!(
                    "contraction ({x},{y}) at ({m},{n}) has shape {}x{}, expected {}x{}",
                    mat.nrows(),
                    mat.ncols(),
                    self.dim(m - 1, n - 1),
                    self.dim(m, n)
                ));
            }
        }
        if !report.ok() {
            return report;
        }
        let support: Vec<(usize, usize)> = self.underlying.support().collect();
        for &(m, n) in &support {
            if m == 0 || n == 0 {
                continue;
            }
            self.check_equivariance(m, n, &mut report);
            self.check_quadratic(m, n, &mut report);
            if !report.ok() {
                return report;
            }
        }
        report
    }

    fn check_equivariance(&self, m: usize, n: usize, report: &mut ValidationReport) {
        let Some(act) = self.underlying.action(m, n) else { return };
        // generators of S_m x S_n: (s_i, id) and (id, s_j)
        let mut gens: Vec<(Perm, Perm)> = Vec::new();
        for i in 0..m.saturating_sub(1) {
            gens.push((Perm::transposition(m, i, i + 1), Perm::identity(n)));
        }
        for j in 0..n.saturating_sub(1) {
            gens.push((Perm::identity(m), Perm::transposition(n, j, j + 1)));
        }
        for (sigma, tau) in gens {
            let rho = act.matrix_of(&sigma, &tau);
            for (x, y) in pair1(m, n) {
                let sx = sigma.apply(x - 1) + 1;
                let ty = tau.apply(y - 1) + 1;
                let lhs = self.contraction(m, n, sx, ty).mul(&rho);
                let rhs = if self.dim(m - 1, n - 1) == 0 {
                    QMatrix::zero(0, self.dim(m, n))
                } else {
                    let restricted = self
                        .underlying
                        .action(m - 1, n - 1)
                        .expect("nonzero space")
                        .matrix_of(&sigma.remove_point(x - 1), &tau.remove_point(y - 1));
                    restricted.mul(&self.contraction(m, n, x, y))
                };
                if lhs != rhs {
                    report.push(format!(
                        "equivariance fails at ({m},{n}), pair ({x},{y}), generator ({:?},{:?})",
                        sigma, tau
                    ));
                    return;
                }
            }
        }
    }

    fn check_quadratic(&self, m: usize, n: usize, report: &mut ValidationReport) {
        if m < 2 || n < 2 {
            return;
        }
        let shift = |v: usize, removed: usize| if v > removed { v - 1 } else { v };
        for (x, y) in pair1(m, n) {
            for (xp, yp) in pair1(m, n) {
                if x == xp || y == yp {
                    continue;
                }
                let first = self
                    .contraction(m - 1, n - 1, shift(xp, x), shift(yp, y))
                    .mul(&self.contraction(m, n, x, y));
                let second = self
                    .contraction(m - 1, n - 1, shift(x, xp), shift(y, yp))
                    .mul(&self.contraction(m, n, xp, yp));
                let rhs = if self.twisted { second.neg() } else { second };
                if first != rhs {
                    report.push(format!(
                        "quadratic relation fails at ({m},{n}) for pairs ({x},{y}) and ({xp},{yp})"
                    ));
                    return;
                }
            }
        }
    }

    /// Action of a downward morphism (the opposite of the stored upward
    /// `f.morphism`) as a matrix M(target of f) → M(source of f): the
    /// degree-0 part acts through the group action (inverted), then the
    /// contractions apply in pairing order, times the stored sign when
    /// twisted.
    pub fn act_matrix(&self, f: &SignedMorphism) -> Result<QMatrix, WbError> {
        let (m, n) = f.morphism.tgt;
        let (sm, sn) = f.morphism.src;
        if self.dim(m, n) == 0 || self.dim(sm, sn) == 0 {
            return Ok(QMatrix::zero(self.dim(sm, sn), self.dim(m, n)));
        }
        let (normal, sigma, tau, sort_sign) = f.morphism.normalize();
        // peel elementary pairs off the top and contract one at a time
        let mut mat = QMatrix::identity(self.dim(m, n));
        let mut cur = normal;
        while let Some(((x, y), rest)) = crate::wbcat::peel_top_pair(&cur) {
            let (cm, cn) = cur.tgt;
            mat = self.contraction(cm, cn, x, y).mul(&mat);
            cur = rest;
        }
        // degree-0 part: (σ,τ)^op acts as ρ((σ,τ)^{-1})
        let deg0 = self
            .underlying
            .action(sm, sn)
            .expect("nonzero source space")
            .matrix_of(&sigma.inverse(), &tau.inverse());
        mat = deg0.mul(&mat);
        let mut sign = f.sign;
        if self.twisted {
            sign *= sort_sign;
        }
        Ok(if sign < 0 { mat.neg() } else { mat })
    }
}

/// The one-dimensional module k at (0,0) with zero contractions.
pub fn unit_module(twisted: bool) -> DwbTwModule {
    DwbTwModule::with_zero_contractions(FbFbModule::unit(), twisted)
}

/// The regular degree-zero module on a window: ℚ(S_m x S_n) at every (m,n)
/// inside, all positive-degree morphisms acting as zero.
pub fn regular_k0(max_m: usize, max_n: usize, twisted: bool) -> DwbTwModule {
    let mut module = FbFbModule::new(crate::fbfb::Window::up_to(max_m, max_n));
    for m in 0..=max_m {
        for n in 0..=max_n {
            module.insert(m, n, regular_action(m, n));
        }
    }
    DwbTwModule::with_zero_contractions(module, twisted)
}

/// The left regular representation of S_m x S_n on its group algebra.
pub fn regular_action(m: usize, n: usize) -> crate::linalg::GroupAction {
    let perms_m = Perm::all(m);
    let perms_n = Perm::all(n);
    let index = |s: &Perm, t: &Perm| -> usize {
        let i = perms_m.binary_search_by(|p| p.0.cmp(&s.0)).unwrap();
        let j = perms_n.binary_search_by(|p| p.0.cmp(&t.0)).unwrap();
        i * perms_n.len() + j
    };
    let dim = perms_m.len() * perms_n.len();
    let mut left = Vec::new();
    for i in 0..m.saturating_sub(1) {
        let s = Perm::transposition(m, i, i + 1);
        let mut mat = QMatrix::zero(dim, dim);
        for pm in &perms_m {
            for pn in &perms_n {
                mat.set(index(&s.compose(pm), pn), index(pm, pn), crate::linalg::qi(1));
            }
        }
        left.push(mat);
    }
    let mut right = Vec::new();
    for j in 0..n.saturating_sub(1) {
        let t = Perm::transposition(n, j, j + 1);
        let mut mat = QMatrix::zero(dim, dim);
        for pm in &perms_m {
            for pn in &perms_n {
                mat.set(index(pm, &t.compose(pn)), index(pm, pn), crate::linalg::qi(1));
            }
        }
        right.push(mat);
    }
    crate::linalg::GroupAction::new(dim, m, n, left, right)
}

/// Convenience for tests: the opposite of ι_{x,y} as a signed morphism.
pub fn iota_op(x: usize, y: usize, m: usize, n: usize) -> SignedMorphism {
    SignedMorphism::plus(crate::wbcat::iota(x, y, m, n).expect("valid iota"))
}

#[allow(unused)]
fn _assert_types(f: &WalledMorphism) -> (usize, usize) {
    f.src
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fbfb::{random_module, FbFbModule};
    use crate::wbcat::{compose, hom_basis};

    #[test]
    fn zero_module_passes() {
        let m = DwbTwModule::with_zero_contractions(FbFbModule::zero(), true);
        assert!(m.validate().ok());
    }

    #[test]
    fn zero_contractions_pass() {
        for twisted in [false, true] {
            let m = DwbTwModule::with_zero_contractions(random_module(5, 2, 2), twisted);
            let rep = m.validate();
            assert!(rep.ok(), "{:?}", rep.failures);
        }
    }

    #[test]
    fn identity_act_is_identity() {
        let m = regular_k0(2, 2, true);
        let id = SignedMorphism::plus(WalledMorphism::identity(2, 2));
        let mat = m.act_matrix(&id).unwrap();
        assert_eq!(mat, QMatrix::identity(m.dim(2, 2)));
    }

    #[test]
    fn iota_op_matches_contraction() {
        let m = regular_k0(2, 2, true);
        let f = iota_op(1, 2, 2, 2);
        let mat = m.act_matrix(&f).unwrap();
        assert_eq!(mat, m.contraction(2, 2, 1, 2));
    }

    #[test]
    fn act_functorial_on_zero_contraction_module() {
        // with zero contractions only degree-0 morphisms act nontrivially;
        // functoriality over all degree ≤ 2 composites in a (3,3) window
        let m = regular_k0(3, 3, true);
        for tgt_m in 1..=3usize {
            for tgt_n in 1..=3usize {
                for d1 in 0..=1usize {
                    for d2 in 0..=1usize {
                        if tgt_m < d1 + d2 || tgt_n < d1 + d2 {
                            continue;
                        }
                        let mid = (tgt_m - d1, tgt_n - d1);
                        let src = (tgt_m - d1 - d2, tgt_n - d1 - d2);
                        for g in hom_basis(mid, (tgt_m, tgt_n)).into_iter().take(3) {
                            for f in hom_basis(src, mid).into_iter().take(3) {
                                let g = SignedMorphism::plus(g.clone());
                                let f = SignedMorphism::plus(f);
                                let gf = compose(&g, &f, true).unwrap();
                                let lhs = m.act_matrix(&gf).unwrap();
                                let rhs = m.act_matrix(&f).unwrap().mul(&m.act_matrix(&g).unwrap());
                                assert_eq!(lhs, rhs);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn sign_twist_involution() {
        let m = regular_k0(2, 2, false);
        let tw = m.sign_twist();
        assert!(tw.twisted);
        let back = tw.sign_twist();
        assert!(!back.twisted);
        for mm in 0..=2 {
            for nn in 0..=2 {
                assert_eq!(m.dim(mm, nn), back.dim(mm, nn));
            }
        }
    }
}
