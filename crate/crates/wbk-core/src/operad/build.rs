//! Construction of the downward walled Brauer modules of an operad: the
//! untwisted symmetric-power module and its sign twist, with explicit
//! monomial bases.
//!
//! A basis monomial at bidegree (m,n) is a configuration: n operad factors
//! (each owning a set of input labels and one output label), wheel factors
//! (each owning a nonempty set of input labels), and a multiset of
//! zero-arity wheel generators. Contractions act by the three structure
//! maps: operad composition when the labels sit in distinct operad
//! factors, the wheel action when the input label sits in a wheel, and the
//! marked contraction into the wheel when both labels share a factor.

use super::{extend_fixing_last, TruncatedOperad, WheeledComponent};
use crate::dwbtw::DwbTwModule;
use crate::fbfb::{FbFbModule, Window};
use crate::linalg::{GroupAction, Perm, QMatrix, Q};
use num::Zero;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("operad has a nonzero arity-0 part; the module builders require minimum arity 1")]
    NullaryOperations,
    #[error("operad validation failed: {0}")]
    InvalidOperad(String),
    #[error("the ℚ[u] form needs a zero-arity wheel space of dimension ≤ 1, found {0}")]
    UPolyRank(usize),
}

#[derive(Clone, Copy, Debug)]
pub struct BuildOptions {
    pub max_m: usize,
    pub max_n: usize,
    /// Bound on the number of zero-arity wheel factors per monomial; the
    /// part above the bound is a module quotient (contractions never
    /// decrease the count).
    pub zero_wheel_bound: usize,
    /// When false, every wheel factor is killed: the quotient Λ*𝒪.
    pub wheels: bool,
}

impl BuildOptions {
    pub fn window(max_m: usize, max_n: usize) -> Self {
        BuildOptions { max_m, max_n, zero_wheel_bound: 1, wheels: true }
    }

    pub fn with_zero_wheel_bound(mut self, u: usize) -> Self {
        self.zero_wheel_bound = u;
        self
    }

    pub fn without_wheels(mut self) -> Self {
        self.wheels = false;
        self.zero_wheel_bound = 0;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LamFactor {
    pub inputs: Vec<usize>,
    pub output: usize,
    pub vec: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct WhlFactor {
    pub inputs: Vec<usize>,
    pub vec: usize,
}

/// A basis monomial. Factor lists are kept sorted by their input label
/// sets (which partition {1..m}), the zero-wheel multiset ascending.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Config {
    pub lam: Vec<LamFactor>,
    pub whl: Vec<WhlFactor>,
    pub u: Vec<usize>,
}

impl Config {
    fn normalized(mut self) -> Self {
        self.lam.sort_by(|a, b| (&a.inputs, a.output).cmp(&(&b.inputs, b.output)));
        self.whl.sort_by(|a, b| a.inputs.cmp(&b.inputs));
        self.u.sort_unstable();
        self
    }

    /// Owner of input label x: Ok(lam index) or Err(wheel index).
    fn input_owner(&self, x: usize) -> Result<usize, usize> {
        if let Some(i) = self.lam.iter().position(|f| f.inputs.contains(&x)) {
            return Ok(i);
        }
        Err(self.whl.iter().position(|f| f.inputs.contains(&x)).expect("label owned"))
    }

    fn output_owner(&self, y: usize) -> usize {
        self.lam.iter().position(|f| f.output == y).expect("output owned")
    }

    /// Order-preserving global relabeling after removing input x and output
    /// y.
    fn relabel_after(mut self, x: usize, y: usize) -> Self {
        let fix_in = |v: usize| if v > x { v - 1 } else { v };
        let fix_out = |v: usize| if v > y { v - 1 } else { v };
        for f in &mut self.lam {
            for lab in &mut f.inputs {
                *lab = fix_in(*lab);
            }
            f.output = fix_out(f.output);
        }
        for f in &mut self.whl {
            for lab in &mut f.inputs {
                *lab = fix_in(*lab);
            }
        }
        self.normalized()
    }
}

/// The built module together with its monomial bases and the wheel data
/// needed to interpret graph decorations.
#[derive(Clone, Debug)]
pub struct WheeledModule {
    pub module: DwbTwModule,
    pub bases: BTreeMap<(usize, usize), Vec<Config>>,
    index: BTreeMap<(usize, usize), BTreeMap<Config, usize>>,
    pub wheel: WheeledComponent,
    pub opts: BuildOptions,
}

impl WheeledModule {
    pub fn index_of(&self, m: usize, n: usize, config: &Config) -> Option<usize> {
        self.index.get(&(m, n))?.get(config).copied()
    }

    pub fn dim(&self, m: usize, n: usize) -> usize {
        self.module.dim(m, n)
    }

    /// The sign twist on the whole package (spaces unchanged).
    pub fn sign_twist(&self) -> Self {
        WheeledModule {
            module: self.module.sign_twist(),
            bases: self.bases.clone(),
            index: self.index.clone(),
            wheel: self.wheel.clone(),
            opts: self.opts,
        }
    }
}

/// Set partitions of {1..m} into nonempty blocks, each block ascending,
/// blocks ordered by least element.
fn set_partitions(m: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    fn rec(next: usize, m: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if next > m {
            out.push(blocks.clone());
            return;
        }
        for k in 0..blocks.len() {
            blocks[k].push(next);
            rec(next + 1, m, blocks, out);
            blocks[k].pop();
        }
        blocks.push(vec![next]);
        rec(next + 1, m, blocks, out);
        blocks.pop();
    }
    rec(1, m, &mut blocks, &mut out);
    out
}

/// Ascending multisets over {0..k-1} of size ≤ bound.
fn multisets(k: usize, bound: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut cur = Vec::new();
    fn rec(start: usize, k: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            return;
        }
        for v in start..k {
            cur.push(v);
            out.push(cur.clone());
            rec(v, k, left - 1, cur, out);
            cur.pop();
        }
    }
    rec(0, k, bound, &mut cur, &mut out);
    out.sort();
    out.dedup();
    out
}

/// All k-subsets of 0..len-1.
fn index_subsets(len: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, len: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..len {
            if len - v < k - cur.len() {
                break;
            }
            cur.push(v);
            rec(v + 1, len, k, cur, out);
            cur.pop();
        }
    }
    rec(0, len, k, &mut cur, &mut out);
    out
}

struct Builder<'a> {
    operad: &'a TruncatedOperad,
    wheel: WheeledComponent,
    opts: BuildOptions,
}

impl<'a> Builder<'a> {
    fn enumerate_configs(&self, m: usize, n: usize) -> Vec<Config> {
        let mut out = Vec::new();
        if n > m {
            return out;
        }
        for partition in set_partitions(m) {
            let blocks = partition.len();
            if blocks < n {
                continue;
            }
            if !self.opts.wheels && blocks != n {
                continue;
            }
            for lam_choice in index_subsets(blocks, n) {
                let lam_blocks: Vec<&Vec<usize>> = lam_choice.iter().map(|&i| &partition[i]).collect();
                let whl_blocks: Vec<&Vec<usize>> =
                    (0..blocks).filter(|i| !lam_choice.contains(i)).map(|i| &partition[i]).collect();
                if lam_blocks.iter().any(|b| self.operad.dim(b.len()) == 0) {
                    continue;
                }
                if whl_blocks.iter().any(|b| self.wheel.dim(b.len()) == 0) {
                    continue;
                }
                for output_assignment in Perm::all(n) {
                    // factor owning lam_blocks[j] gets output assignment(j)+1
                    let mut vec_dims: Vec<usize> = lam_blocks.iter().map(|b| self.operad.dim(b.len())).collect();
                    vec_dims.extend(whl_blocks.iter().map(|b| self.wheel.dim(b.len())));
                    let mut inner = vec![0usize; vec_dims.len()];
                    loop {
                        let lam: Vec<LamFactor> = lam_blocks
                            .iter()
                            .enumerate()
                            .map(|(j, b)| LamFactor {
                                inputs: (*b).clone(),
                                output: output_assignment.apply(j) + 1,
                                vec: inner[j],
                            })
                            .collect();
                        let whl: Vec<WhlFactor> = whl_blocks
                            .iter()
                            .enumerate()
                            .map(|(j, b)| WhlFactor { inputs: (*b).clone(), vec: inner[n + j] })
                            .collect();
                        for u in multisets(self.wheel.dim(0), if self.opts.wheels { self.opts.zero_wheel_bound } else { 0 })
                        {
                            out.push(
                                Config { lam: lam.clone(), whl: whl.clone(), u }.normalized(),
                            );
                        }
                        // odometer over inner basis indices
                        let mut i = vec_dims.len();
                        loop {
                            if i == 0 {
                                break;
                            }
                            i -= 1;
                            inner[i] += 1;
                            if inner[i] < vec_dims[i] {
                                break;
                            }
                            inner[i] = 0;
                        }
                        if inner.iter().all(|&v| v == 0) {
                            break;
                        }
                    }
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// Matrix of the left Coxeter generator swapping input labels (i, i+1).
    fn left_gen(&self, basis: &[Config], index: &BTreeMap<Config, usize>, i: usize) -> QMatrix {
        let mut mat = QMatrix::zero(basis.len(), basis.len());
        for (col, cfg) in basis.iter().enumerate() {
            let a = cfg.input_owner(i);
            let b = cfg.input_owner(i + 1);
            if a == b {
                // inner adjacent transposition inside one factor
                match a {
                    Ok(l) => {
                        let f = &cfg.lam[l];
                        let k = f.inputs.len();
                        let p = f.inputs.binary_search(&i).unwrap();
                        let gen = self.operad.action(k).unwrap().left_gen(p);
                        for row_inner in 0..self.operad.dim(k) {
                            let coeff = gen.get(row_inner, f.vec);
                            if coeff.is_zero() {
                                continue;
                            }
                            let mut target = cfg.clone();
                            target.lam[l].vec = row_inner;
                            mat.add_to(index[&target.normalized()], col, &coeff);
                        }
                    }
                    Err(w) => {
                        let f = &cfg.whl[w];
                        let k = f.inputs.len();
                        let p = f.inputs.binary_search(&i).unwrap();
                        let gen_mat = self.wheel.space(k).unwrap().action.left_gen(p).clone();
                        for row_inner in 0..self.wheel.dim(k) {
                            let coeff = gen_mat.get(row_inner, f.vec);
                            if coeff.is_zero() {
                                continue;
                            }
                            let mut target = cfg.clone();
                            target.whl[w].vec = row_inner;
                            mat.add_to(index[&target.normalized()], col, &coeff);
                        }
                    }
                }
            } else {
                let mut target = cfg.clone();
                let swap_in = |inputs: &mut Vec<usize>, from: usize, to: usize| {
                    let p = inputs.binary_search(&from).unwrap();
                    inputs[p] = to;
                    inputs.sort_unstable();
                };
                match a {
                    Ok(l) => swap_in(&mut target.lam[l].inputs, i, i + 1),
                    Err(w) => swap_in(&mut target.whl[w].inputs, i, i + 1),
                }
                match b {
                    Ok(l) => swap_in(&mut target.lam[l].inputs, i + 1, i),
                    Err(w) => swap_in(&mut target.whl[w].inputs, i + 1, i),
                }
                mat.add_to(index[&target.normalized()], col, &Q::from(num::BigInt::from(1)));
            }
        }
        mat
    }

    /// Matrix of the right Coxeter generator swapping output labels (j, j+1).
    fn right_gen(&self, basis: &[Config], index: &BTreeMap<Config, usize>, j: usize) -> QMatrix {
        let mut mat = QMatrix::zero(basis.len(), basis.len());
        for (col, cfg) in basis.iter().enumerate() {
            let mut target = cfg.clone();
            for f in &mut target.lam {
                if f.output == j {
                    f.output = j + 1;
                } else if f.output == j + 1 {
                    f.output = j;
                }
            }
            mat.add_to(index[&target.normalized()], col, &Q::from(num::BigInt::from(1)));
        }
        mat
    }

    /// Contraction column: the image of one monomial under c_{x,y}, as a
    /// list of (target config at (m-1,n-1), coefficient), untwisted.
    fn contract_config(&self, cfg: &Config, x: usize, y: usize) -> Vec<(Config, Q)> {
        let owner_x = cfg.input_owner(x);
        let owner_y = cfg.output_owner(y);
        let mut out: Vec<(Config, Q)> = Vec::new();
        match owner_x {
            Ok(lx) if lx == owner_y => {
                // marked contraction into the wheel
                let f = &cfg.lam[lx];
                let k = f.inputs.len();
                if !self.opts.wheels {
                    return out;
                }
                let p = f.inputs.binary_search(&x).unwrap();
                let rot = Perm((0..k).map(|j| if j < p { j } else if j == p { k - 1 } else { j - 1 }).collect());
                let v = self
                    .operad
                    .action(k)
                    .unwrap()
                    .matrix_of(&rot, &Perm::identity(1))
                    .column(f.vec);
                let Some(space) = self.wheel.space(k - 1) else { return out };
                let coords = space.quotient.project.mul_vec(&v);
                for (b, coeff) in coords.iter().enumerate() {
                    if coeff.is_zero() {
                        continue;
                    }
                    let mut target = cfg.clone();
                    target.lam.remove(lx);
                    if k - 1 == 0 {
                        if target.u.len() >= self.opts.zero_wheel_bound {
                            continue;
                        }
                        target.u.push(b);
                    } else {
                        let mut inputs = f.inputs.clone();
                        inputs.remove(p);
                        target.whl.push(WhlFactor { inputs, vec: b });
                    }
                    out.push((target.relabel_after(x, y), coeff.clone()));
                }
            }
            Ok(lx) => {
                // operad composition: plug owner_y's output into slot x
                let fx = &cfg.lam[lx];
                let fy = &cfg.lam[owner_y];
                let (ka, kb) = (fx.inputs.len(), fy.inputs.len());
                let p = fx.inputs.binary_search(&x).unwrap();
                let composite = self.operad.compose_basis(ka, p + 1, kb, fx.vec, fy.vec);
                if composite.iter().all(|c| c.is_zero()) {
                    return out;
                }
                let mut labels: Vec<usize> = fx.inputs[..p].to_vec();
                labels.extend_from_slice(&fy.inputs);
                labels.extend_from_slice(&fx.inputs[p + 1..]);
                let mut sorted = labels.clone();
                sorted.sort_unstable();
                let merge = Perm(labels.iter().map(|l| sorted.binary_search(l).unwrap()).collect());
                let v = self
                    .operad
                    .action(ka + kb - 1)
                    .unwrap()
                    .matrix_of(&merge, &Perm::identity(1))
                    .mul_vec(&composite);
                let output = fx.output;
                for (b, coeff) in v.iter().enumerate() {
                    if coeff.is_zero() {
                        continue;
                    }
                    let mut target = cfg.clone();
                    let (hi, lo) = (lx.max(owner_y), lx.min(owner_y));
                    target.lam.remove(hi);
                    target.lam.remove(lo);
                    target.lam.push(LamFactor { inputs: sorted.clone(), output, vec: b });
                    out.push((target.relabel_after(x, y), coeff.clone()));
                }
            }
            Err(wx) => {
                // wheel action: plug owner_y's output into the wheel slot x
                let w = &cfg.whl[wx];
                let fy = &cfg.lam[owner_y];
                let (kw, kb) = (w.inputs.len(), fy.inputs.len());
                let p = w.inputs.binary_search(&x).unwrap();
                let lift = self.wheel.space(kw).unwrap().quotient.section.column(w.vec);
                let dim_b = self.operad.dim(kb);
                let mut composite = vec![Q::zero(); self.operad.dim(kw + kb)];
                let comp_mat = self.operad.composition(kw + 1, p + 1, kb);
                for (a, la) in lift.iter().enumerate() {
                    if la.is_zero() {
                        continue;
                    }
                    let col = comp_mat.column(a * dim_b + fy.vec);
                    for (r, c) in col.iter().enumerate() {
                        if !c.is_zero() {
                            composite[r] += la * c;
                        }
                    }
                }
                if composite.iter().all(|c| c.is_zero()) {
                    return out;
                }
                let mut labels: Vec<usize> = w.inputs[..p].to_vec();
                labels.extend_from_slice(&fy.inputs);
                labels.extend_from_slice(&w.inputs[p + 1..]);
                let mut sorted = labels.clone();
                sorted.sort_unstable();
                let merge = Perm(labels.iter().map(|l| sorted.binary_search(l).unwrap()).collect());
                let big = extend_fixing_last(&merge, kw + kb);
                let v = self
                    .operad
                    .action(kw + kb)
                    .unwrap()
                    .matrix_of(&big, &Perm::identity(1))
                    .mul_vec(&composite);
                let Some(space) = self.wheel.space(kw + kb - 1) else { return out };
                let coords = space.quotient.project.mul_vec(&v);
                for (b, coeff) in coords.iter().enumerate() {
                    if coeff.is_zero() {
                        continue;
                    }
                    let mut target = cfg.clone();
                    target.lam.remove(owner_y);
                    target.whl.remove(wx);
                    target.whl.push(WhlFactor { inputs: sorted.clone(), vec: b });
                    out.push((target.relabel_after(x, y), coeff.clone()));
                }
            }
        }
        out
    }
}

/// Builds the untwisted module S*(𝒪 ⊕ |δ₁₁𝒪|) on the requested window,
/// restricted to the diagonals the truncation determines exactly.
pub fn build_stfb(operad: &TruncatedOperad, opts: BuildOptions) -> Result<WheeledModule, BuildError> {
    if operad.dim(0) != 0 {
        return Err(BuildError::NullaryOperations);
    }
    let report = operad.validate();
    if !report.ok() {
        return Err(BuildError::InvalidOperad(report.failures.join("; ")));
    }
    let wheel = operad.wheeled_component();
    let builder = Builder { operad, wheel: wheel.clone(), opts };
    let diag_bound = if operad.is_zero() { None } else { Some(operad.max_arity - 1) };

    let mut bases = BTreeMap::new();
    let mut index = BTreeMap::new();
    let mut underlying = FbFbModule::new(Window::up_to(opts.max_m, opts.max_n));
    for m in 0..=opts.max_m {
        for n in 0..=opts.max_n.min(m) {
            if diag_bound.is_some_and(|d| m - n > d) {
                continue;
            }
            let basis = builder.enumerate_configs(m, n);
            if basis.is_empty() {
                continue;
            }
            let idx: BTreeMap<Config, usize> = basis.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
            let left = (1..m).map(|i| builder.left_gen(&basis, &idx, i)).collect();
            let right = (1..n).map(|j| builder.right_gen(&basis, &idx, j)).collect();
            underlying.insert(m, n, GroupAction::new(basis.len(), m, n, left, right));
            bases.insert((m, n), basis);
            index.insert((m, n), idx);
        }
    }

    let mut module = DwbTwModule::with_zero_contractions(underlying, false);
    module.diag_bound = diag_bound;
    for (&(m, n), basis) in &bases {
        if m == 0 || n == 0 {
            continue;
        }
        let Some(tgt_index) = index.get(&(m - 1, n - 1)) else { continue };
        for (x, y) in crate::wbcat::pair1(m, n) {
            let mut mat = QMatrix::zero(tgt_index.len(), basis.len());
            for (col, cfg) in basis.iter().enumerate() {
                for (target, coeff) in builder.contract_config(cfg, x, y) {
                    let row = *tgt_index.get(&target).expect("contraction target in basis");
                    mat.add_to(row, col, &coeff);
                }
            }
            module.set_contraction(m, n, x, y, mat);
        }
    }

    Ok(WheeledModule { module, bases, index, wheel, opts })
}

/// The sign-twisted module Λ*𝒪 ⊛ S*|δ₁₁𝒪|: same monomial spaces, output
/// action twisted by sign, contraction at (x,y) scaled by (-1)^{y-1}.
pub fn build_ltfb(operad: &TruncatedOperad, opts: BuildOptions) -> Result<WheeledModule, BuildError> {
    Ok(build_stfb(operad, opts)?.sign_twist())
}

/// The twisted module in ℚ[u]-form: u-degree-zero monomials with the
/// contraction split as c0 + u·c1 (only meaningful when the zero-arity
/// wheel space is at most a line).
#[derive(Clone, Debug)]
pub struct UPolyModule {
    pub core: WheeledModule,
    /// u-raising contraction components ((m,n),(x,y)) → matrix between
    /// u-degree-zero bases.
    pub u_raise: BTreeMap<((usize, usize), (usize, usize)), QMatrix>,
}

pub fn build_ltfb_upoly(operad: &TruncatedOperad, max_m: usize, max_n: usize) -> Result<UPolyModule, BuildError> {
    let full = build_ltfb(operad, BuildOptions { max_m, max_n, zero_wheel_bound: 1, wheels: true })?;
    let w0 = full.wheel.dim(0);
    if w0 > 1 {
        return Err(BuildError::UPolyRank(w0));
    }
    // split every basis into u-free and u-degree-one parts
    let mut core_bases = BTreeMap::new();
    let mut core_index = BTreeMap::new();
    let mut positions: BTreeMap<(usize, usize), (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for (&(m, n), basis) in &full.bases {
        let free: Vec<usize> = basis.iter().enumerate().filter(|(_, c)| c.u.is_empty()).map(|(i, _)| i).collect();
        let one: Vec<usize> = basis.iter().enumerate().filter(|(_, c)| !c.u.is_empty()).map(|(i, _)| i).collect();
        let cfgs: Vec<Config> = free.iter().map(|&i| basis[i].clone()).collect();
        let idx: BTreeMap<Config, usize> = cfgs.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        core_bases.insert((m, n), cfgs);
        core_index.insert((m, n), idx);
        positions.insert((m, n), (free, one));
    }
    let select = |mat: &QMatrix, rows: &[usize], cols: &[usize]| -> QMatrix {
        let mut out = QMatrix::zero(rows.len(), cols.len());
        for (rr, &r) in rows.iter().enumerate() {
            for (cc, &c) in cols.iter().enumerate() {
                let v = mat.get(r, c);
                if !v.is_zero() {
                    out.set(rr, cc, v);
                }
            }
        }
        out
    };
    let mut underlying = FbFbModule::new(Window::up_to(max_m, max_n));
    for (&(m, n), (free, _)) in &positions {
        if free.is_empty() {
            continue;
        }
        let act = full.module.underlying.action(m, n).unwrap();
        let left = (0..m.saturating_sub(1)).map(|i| select(act.left_gen(i), free, free)).collect();
        let right = (0..n.saturating_sub(1)).map(|i| select(act.right_gen(i), free, free)).collect();
        underlying.insert(m, n, GroupAction::new(free.len(), m, n, left, right));
    }
    let mut core_module = DwbTwModule::with_zero_contractions(underlying, true);
    core_module.diag_bound = full.module.diag_bound;
    let mut u_raise = BTreeMap::new();
    for (&(m, n), (free, _)) in &positions {
        if m == 0 || n == 0 {
            continue;
        }
        let Some((tgt_free, tgt_one)) = positions.get(&(m - 1, n - 1)) else { continue };
        for (x, y) in crate::wbcat::pair1(m, n) {
            let c = full.module.contraction(m, n, x, y);
            let c0 = select(&c, tgt_free, free);
            if !c0.is_zero() {
                core_module.set_contraction(m, n, x, y, c0);
            }
            let c1 = select(&c, tgt_one, free);
            if !c1.is_zero() {
                // u-degree-one targets are (u-free config, single u); reindex
                // rows through the u-free basis of the target
                let tgt_cfgs = &full.bases[&(m - 1, n - 1)];
                let tgt_core_idx = &core_index[&(m - 1, n - 1)];
                let mut rows = QMatrix::zero(tgt_free.len(), free.len());
                for (rr, &r) in tgt_one.iter().enumerate() {
                    let mut cfg = tgt_cfgs[r].clone();
                    cfg.u.clear();
                    let target_row = tgt_core_idx[&cfg];
                    for cc in 0..free.len() {
                        let v = c1.get(rr, cc);
                        if !v.is_zero() {
                            rows.add_to(target_row, cc, &v);
                        }
                    }
                }
                u_raise.insert(((m, n), (x, y)), rows);
            }
        }
    }
    Ok(UPolyModule {
        core: WheeledModule {
            module: core_module,
            bases: core_bases,
            index: core_index,
            wheel: full.wheel.clone(),
            opts: full.opts,
        },
        u_raise,
    })
}

impl UPolyModule {
    pub fn u_raise_matrix(&self, m: usize, n: usize, x: usize, y: usize) -> QMatrix {
        self.u_raise
            .get(&((m, n), (x, y)))
            .cloned()
            .unwrap_or_else(|| QMatrix::zero(self.core.dim(m.wrapping_sub(1), n.wrapping_sub(1)), self.core.dim(m, n)))
    }
}

#[cfg(test)]
mod tests {
    use super::super::examples;
    use super::*;
    use crate::linalg::qi;

    #[test]
    fn zero_operad_module_is_unit() {
        let m = build_ltfb(&examples::zero(), BuildOptions::window(3, 3)).unwrap();
        assert_eq!(m.dim(0, 0), 1);
        for mm in 0..=3 {
            for nn in 0..=3 {
                if (mm, nn) != (0, 0) {
                    assert_eq!(m.dim(mm, nn), 0, "({mm},{nn})");
                }
            }
        }
        assert!(m.module.validate().ok());
    }

    #[test]
    fn assoc_q_dims() {
        // Λ^t A at (t,t) has dimension t!·(dim A)^t = t!, plus wheel powers
        let m = build_ltfb(&examples::assoc_q(), BuildOptions::window(3, 3).with_zero_wheel_bound(0)).unwrap();
        assert_eq!(m.dim(1, 1), 1);
        assert_eq!(m.dim(2, 2), 2);
        assert_eq!(m.dim(3, 3), 6);
        assert_eq!(m.dim(2, 1), 0);
    }

    #[test]
    fn assoc_q_contraction_example() {
        // the identity-pairing monomial contracts into a ⊗ ā (marked
        // contraction into the wheel); the cross-pairing monomial contracts
        // through the product a·a
        let wm = build_stfb(&examples::assoc_q(), BuildOptions::window(2, 2)).unwrap();
        let basis = &wm.bases[&(2, 2)];
        assert_eq!(basis.len(), 2 * 2); // two pairings x u ∈ {0,1}
        let e_id_pos = basis
            .iter()
            .position(|c| c.u.is_empty() && c.lam[0].output == 1 && c.lam[1].output == 2)
            .unwrap();
        let e_cross_pos = basis
            .iter()
            .position(|c| c.u.is_empty() && c.lam[0].output == 2 && c.lam[1].output == 1)
            .unwrap();
        let c22 = wm.module.contraction(2, 2, 2, 2);
        // image of e_id: a ⊗ ā = the (1,1) config with one u factor
        let tgt = &wm.bases[&(1, 1)];
        let col = c22.column(e_id_pos);
        let au_pos = tgt.iter().position(|c| c.u.len() == 1).unwrap();
        assert_eq!(col[au_pos], qi(1));
        // image of e_cross: the product a·a, no wheel factor
        let col = c22.column(e_cross_pos);
        let aa_pos = tgt.iter().position(|c| c.u.is_empty()).unwrap();
        assert_eq!(col[aa_pos], qi(1));
    }

    #[test]
    fn stfb_validates_untwisted_small() {
        for operad in [examples::assoc_q(), examples::ass_truncated(2)] {
            let m = build_stfb(&operad, BuildOptions::window(2, 2).with_zero_wheel_bound(2)).unwrap();
            let rep = m.module.validate();
            assert!(rep.ok(), "{}: {:?}", operad.name, rep.failures);
            assert!(!m.module.twisted);
        }
    }

    #[test]
    fn ltfb_validates_twisted_small() {
        for operad in [examples::assoc_q(), examples::ass_truncated(2), examples::n3()] {
            let m = build_ltfb(&operad, BuildOptions::window(2, 2).with_zero_wheel_bound(2)).unwrap();
            let rep = m.module.validate();
            assert!(rep.ok(), "{}: {:?}", operad.name, rep.failures);
            assert!(m.module.twisted);
        }
    }

    #[test]
    fn act_functorial_with_contractions() {
        use crate::wbcat::{compose, hom_basis, SignedMorphism};
        let m = build_ltfb(&examples::assoc_q(), BuildOptions::window(3, 3)).unwrap().module;
        for d1 in 0..=1usize {
            for d2 in 0..=2usize {
                if d1 + d2 > 2 {
                    continue;
                }
                let tgt = (3, 3);
                let mid = (3 - d1, 3 - d1);
                let src = (3 - d1 - d2, 3 - d1 - d2);
                for g in hom_basis(mid, tgt) {
                    for f in hom_basis(src, mid) {
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

    #[test]
    fn upoly_split_consistent() {
        let up = build_ltfb_upoly(&examples::assoc_q(), 2, 2).unwrap();
        // c(2,2): u-free part maps cross-pairing through the product,
        // u-raising part maps identity-pairing to the empty config
        let c0 = up.core.module.contraction(2, 2, 2, 2);
        let c1 = up.u_raise_matrix(2, 2, 2, 2);
        assert_eq!(c0.ncols(), 2);
        assert!(!c1.is_zero());
        assert!(up.core.module.validate().ok());
    }

    #[test]
    fn nullary_rejected() {
        let mut o = TruncatedOperad::new("bad", 2);
        o.insert_space(0, GroupAction::trivial(1, 0, 1));
        assert!(matches!(build_stfb(&o, BuildOptions::window(2, 2)), Err(BuildError::NullaryOperations)));
    }
}
