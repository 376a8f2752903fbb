use std::collections::BTreeMap;
use wbk_core::dwbtw::DwbTwModule;
use wbk_core::fbfb::{FbFbModule, Window};
use wbk_core::koszul::koszul_down;
use wbk_core::linalg::{GroupAction, Perm, QMatrix};
use wbk_core::wbcat::{compose, hom_basis, SignedMorphism, WalledMorphism};

fn full_hom(src: (usize, usize), tgt: (usize, usize)) -> Vec<WalledMorphism> {
    let mut out = Vec::new();
    for e in hom_basis(src, tgt) {
        for sigma in Perm::all(src.0) {
            for tau in Perm::all(src.1) {
                let perm = SignedMorphism::plus(WalledMorphism::from_perms(&sigma, &tau));
                out.push(compose(&SignedMorphism::plus(e.clone()), &perm, false).unwrap().morphism);
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

fn free_module(gen: (usize, usize), twisted: bool) -> DwbTwModule {
    let mut underlying = FbFbModule::new(Window::up_to(gen.0, gen.1));
    let mut bases: BTreeMap<(usize, usize), Vec<WalledMorphism>> = BTreeMap::new();
    for m in 0..=gen.0 {
        for n in 0..=gen.1 {
            let basis = full_hom((m, n), gen);
            if basis.is_empty() { continue; }
            let index: BTreeMap<WalledMorphism, usize> =
                basis.iter().cloned().enumerate().map(|(i, f)| (f, i)).collect();
            let act_gen = |sigma: Perm, tau: Perm| -> QMatrix {
                let mut mat = QMatrix::zero(basis.len(), basis.len());
                let pm = SignedMorphism::plus(WalledMorphism::from_perms(&sigma.inverse(), &tau.inverse()));
                for (col, f) in basis.iter().enumerate() {
                    let c = compose(&SignedMorphism::plus(f.clone()), &pm, twisted).unwrap();
                    mat.add_to(index[&c.morphism], col, &wbk_core::linalg::qi(c.sign));
                }
                mat
            };
            let left: Vec<QMatrix> =
                (0..m.saturating_sub(1)).map(|i| act_gen(Perm::transposition(m, i, i + 1), Perm::identity(n))).collect();
            let right: Vec<QMatrix> =
                (0..n.saturating_sub(1)).map(|i| act_gen(Perm::identity(m), Perm::transposition(n, i, i + 1))).collect();
            underlying.insert(m, n, GroupAction::new(basis.len(), m, n, left, right));
            bases.insert((m, n), basis);
        }
    }
    let mut module = DwbTwModule::with_zero_contractions(underlying, twisted);
    for (&(m, n), basis) in &bases {
        if m == 0 || n == 0 { continue; }
        let Some(tgt) = bases.get(&(m - 1, n - 1)) else { continue };
        let tgt_index: BTreeMap<WalledMorphism, usize> =
            tgt.iter().cloned().enumerate().map(|(i, f)| (f, i)).collect();
        for (x, y) in wbk_core::wbcat::pair1(m, n) {
            let iota = SignedMorphism::plus(wbk_core::wbcat::iota(x, y, m, n).unwrap());
            let mut mat = QMatrix::zero(tgt.len(), basis.len());
            for (col, f) in basis.iter().enumerate() {
                let c = compose(&SignedMorphism::plus(f.clone()), &iota, twisted).unwrap();
                mat.add_to(tgt_index[&c.morphism], col, &wbk_core::linalg::qi(c.sign));
            }
            module.set_contraction(m, n, x, y, mat);
        }
    }
    module
}

fn main() {
    let m = free_module((2, 2), true);
    assert!(m.validate().ok());
    let down = koszul_down(&m, 0, 0);
    for k in 1..=2i64 {
        println!("deg {k}: dim {} d = {:?}", down.dim(k), down.differential(k));
    }
    println!("d1*d2 = {:?}", down.differential(1).mul(&down.differential(2)));
}
