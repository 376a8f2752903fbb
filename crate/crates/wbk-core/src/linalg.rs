//! Exact rational sparse linear algebra and finite-group averaging.
//!
//! Everything downstream (module validation, Koszul complexes, homology,
//! resolutions) reduces to rank/kernel/image computations over ℚ done here.
//! No floating point anywhere: ranks decide homology dimensions and any
//! rounding would falsify them.

use num::{BigInt, BigRational, One, Zero};
use thiserror::Error;

pub type Q = BigRational;

/// Shorthand for a rational from an integer pair.
pub fn q(num: i64, den: i64) -> Q {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(num: i64) -> Q {
    BigRational::from(BigInt::from(num))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("malformed group action: {0}")]
    MalformedAction(String),
    #[error("inconsistent linear system")]
    Inconsistent,
}

/// Sparse matrix over ℚ, row-major, each row sorted by column index.
///
/// Entries are kept reduced by `BigRational`'s invariants; zero entries are
/// never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct QMatrix {
    nrows: usize,
    ncols: usize,
    rows: Vec<Vec<(usize, Q)>>,
}

impl std::fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "QMatrix {}x{} [", self.nrows, self.ncols)?;
        for r in 0..self.nrows.min(12) {
            let mut line = String::new();
            for c in 0..self.ncols.min(12) {
                line.push_str(&format!("{} ", self.get(r, c)));
            }
            writeln!(f, "  {line}")?;
        }
        write!(f, "]")
    }
}

impl QMatrix {
    pub fn zero(nrows: usize, ncols: usize) -> Self {
        QMatrix { nrows, ncols, rows: vec![Vec::new(); nrows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.rows[i].push((i, Q::one()));
        }
        m
    }

    pub fn from_dense(entries: Vec<Vec<Q>>) -> Self {
        let nrows = entries.len();
        let ncols = entries.first().map_or(0, |r| r.len());
        let mut m = Self::zero(nrows, ncols);
        for (i, row) in entries.into_iter().enumerate() {
            assert_eq!(row.len(), ncols, "ragged rows");
            for (j, v) in row.into_iter().enumerate() {
                if !v.is_zero() {
                    m.rows[i].push((j, v));
                }
            }
        }
        m
    }

    pub fn from_i64(entries: &[&[i64]]) -> Self {
        Self::from_dense(entries.iter().map(|r| r.iter().map(|&x| qi(x)).collect()).collect())
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, r: usize) -> &[(usize, Q)] {
        &self.rows[r]
    }

    pub fn get(&self, r: usize, c: usize) -> Q {
        match self.rows[r].binary_search_by_key(&c, |e| e.0) {
            Ok(k) => self.rows[r][k].1.clone(),
            Err(_) => Q::zero(),
        }
    }

    pub fn set(&mut self, r: usize, c: usize, v: Q) {
        assert!(r < self.nrows && c < self.ncols, "index out of range");
        match self.rows[r].binary_search_by_key(&c, |e| e.0) {
            Ok(k) => {
                if v.is_zero() {
                    self.rows[r].remove(k);
                } else {
                    self.rows[r][k].1 = v;
                }
            }
            Err(k) => {
                if !v.is_zero() {
                    self.rows[r].insert(k, (c, v));
                }
            }
        }
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: &Q) {
        if v.is_zero() {
            return;
        }
        let cur = self.get(r, c);
        self.set(r, c, cur + v);
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.is_empty())
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(self.ncols, self.nrows);
        for (i, row) in self.rows.iter().enumerate() {
            for (j, v) in row {
                t.rows[*j].push((i, v.clone()));
            }
        }
        t
    }

    pub fn scale(&self, s: &Q) -> Self {
        if s.is_zero() {
            return Self::zero(self.nrows, self.ncols);
        }
        let mut m = self.clone();
        for row in &mut m.rows {
            for e in row.iter_mut() {
                e.1 = &e.1 * s;
            }
        }
        m
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut m = Self::zero(self.nrows, self.ncols);
        for i in 0..self.nrows {
            m.rows[i] = merge_rows(&self.rows[i], &other.rows[i], false);
        }
        m
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut m = Self::zero(self.nrows, self.ncols);
        for i in 0..self.nrows {
            m.rows[i] = merge_rows(&self.rows[i], &other.rows[i], true);
        }
        m
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Q::one())
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows, "mul dimension mismatch");
        let mut m = Self::zero(self.nrows, other.ncols);
        for i in 0..self.nrows {
            let mut acc: Vec<(usize, Q)> = Vec::new();
            for (k, a) in &self.rows[i] {
                for (j, b) in &other.rows[*k] {
                    let v = a * b;
                    match acc.binary_search_by_key(j, |e| e.0) {
                        Ok(p) => {
                            acc[p].1 += v;
                        }
                        Err(p) => acc.insert(p, (*j, v)),
                    }
                }
            }
            acc.retain(|e| !e.1.is_zero());
            m.rows[i] = acc;
        }
        m
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(self.ncols, v.len());
        let mut out = vec![Q::zero(); self.nrows];
        for i in 0..self.nrows {
            for (j, a) in &self.rows[i] {
                if !v[*j].is_zero() {
                    out[i] += a * &v[*j];
                }
            }
        }
        out
    }

    pub fn column(&self, c: usize) -> Vec<Q> {
        (0..self.nrows).map(|r| self.get(r, c)).collect()
    }

    pub fn from_columns(nrows: usize, cols: &[Vec<Q>]) -> Self {
        let mut m = Self::zero(nrows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), nrows);
            for (i, v) in col.iter().enumerate() {
                if !v.is_zero() {
                    m.rows[i].push((j, v.clone()));
                }
            }
        }
        for row in &mut m.rows {
            row.sort_by_key(|e| e.0);
        }
        m
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.nrows, other.nrows);
        let mut m = Self::zero(self.nrows, self.ncols + other.ncols);
        for i in 0..self.nrows {
            m.rows[i] = self.rows[i].clone();
            for (j, v) in &other.rows[i] {
                m.rows[i].push((self.ncols + j, v.clone()));
            }
        }
        m
    }

    /// Row echelon data: returns (pivot columns, echelon rows) without
    /// mutating `self`. Rows are fully reduced (RREF).
    fn rref(&self) -> (Vec<usize>, Vec<Vec<(usize, Q)>>) {
        let mut work: Vec<Vec<(usize, Q)>> = self.rows.iter().filter(|r| !r.is_empty()).cloned().collect();
        let mut pivots: Vec<usize> = Vec::new();
        let mut done: Vec<Vec<(usize, Q)>> = Vec::new();
        while !work.is_empty() {
            // pick the sparsest row among those with the leftmost leading column
            let lead = work.iter().map(|r| r[0].0).min().unwrap();
            let mut best = usize::MAX;
            let mut best_len = usize::MAX;
            for (k, r) in work.iter().enumerate() {
                if r[0].0 == lead && r.len() < best_len {
                    best = k;
                    best_len = r.len();
                }
            }
            let mut piv = work.swap_remove(best);
            let inv = piv[0].1.clone();
            if !inv.is_one() {
                for e in piv.iter_mut() {
                    e.1 = &e.1 / &inv;
                }
            }
            for r in work.iter_mut() {
                if r[0].0 == lead {
                    let c = r[0].1.clone();
                    *r = axpy(r, &piv, &-c);
                }
            }
            work.retain(|r| !r.is_empty());
            // reduce previously finished rows against the new pivot
            for r in done.iter_mut() {
                if let Ok(k) = r.binary_search_by_key(&lead, |e| e.0) {
                    let c = r[k].1.clone();
                    *r = axpy(r, &piv, &-c);
                }
            }
            pivots.push(lead);
            done.push(piv);
        }
        (pivots, done)
    }

    pub fn rank(&self) -> usize {
        self.rref().0.len()
    }

    /// Exact rank, a column basis of the kernel, and a column basis of the
    /// image (original matrix columns at the pivot positions).
    pub fn rank_kernel_image(&self) -> (usize, QMatrix, QMatrix) {
        let (pivots, rows) = self.rref();
        let rank = pivots.len();
        // kernel: for each non-pivot column f, vector with 1 at f and
        // -coefficient at each pivot column.
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let free: Vec<usize> = (0..self.ncols).filter(|c| !pivot_set.contains(c)).collect();
        let mut kernel = QMatrix::zero(self.ncols, free.len());
        for (kcol, f) in free.iter().enumerate() {
            kernel.set(*f, kcol, Q::one());
            for (prow, pcol) in pivots.iter().enumerate() {
                let coeff = lookup(&rows[prow], *f);
                if !coeff.is_zero() {
                    kernel.set(*pcol, kcol, -coeff);
                }
            }
        }
        let image_cols: Vec<Vec<Q>> = pivots.iter().map(|&c| self.column(c)).collect();
        let image = QMatrix::from_columns(self.nrows, &image_cols);
        (rank, kernel, image)
    }

    /// Solves `self * X = B` exactly. Returns `None` if inconsistent.
    pub fn solve(&self, b: &QMatrix) -> Option<QMatrix> {
        assert_eq!(self.nrows, b.nrows);
        let aug = self.hstack(b);
        let (pivots, rows) = aug.rref();
        if pivots.iter().any(|&p| p >= self.ncols) {
            return None;
        }
        let mut x = QMatrix::zero(self.ncols, b.ncols);
        for (prow, pcol) in pivots.iter().enumerate() {
            for (c, v) in &rows[prow] {
                if *c >= self.ncols {
                    x.set(*pcol, c - self.ncols, v.clone());
                }
            }
        }
        Some(x)
    }

    /// Basis of the column space as a `nrows x rank` matrix.
    pub fn column_space_basis(&self) -> QMatrix {
        self.rank_kernel_image().2
    }

    /// Kronecker product: (A ⊗ B)(ia·nb+ib, ja·mb+jb) = A(ia,ja)·B(ib,jb).
    pub fn kron(&self, other: &Self) -> QMatrix {
        let mut out = QMatrix::zero(self.nrows * other.nrows, self.ncols * other.ncols);
        for ia in 0..self.nrows {
            for (ja, a) in &self.rows[ia] {
                for ib in 0..other.nrows {
                    for (jb, b) in &other.rows[ib] {
                        out.set(ia * other.nrows + ib, ja * other.ncols + jb, a * b);
                    }
                }
            }
        }
        out
    }

    /// True if each column of `v` lies in the column span of `self`.
    pub fn spans(&self, v: &QMatrix) -> bool {
        self.solve(v).is_some()
    }
}

fn lookup(row: &[(usize, Q)], col: usize) -> Q {
    match row.binary_search_by_key(&col, |e| e.0) {
        Ok(k) => row[k].1.clone(),
        Err(_) => Q::zero(),
    }
}

fn merge_rows(a: &[(usize, Q)], b: &[(usize, Q)], subtract: bool) -> Vec<(usize, Q)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            let v = if subtract { -&b[j].1 } else { b[j].1.clone() };
            if !v.is_zero() {
                out.push((b[j].0, v));
            }
            j += 1;
        } else {
            let v = if subtract { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// `row + c * piv`, sparse.
fn axpy(row: &[(usize, Q)], piv: &[(usize, Q)], c: &Q) -> Vec<(usize, Q)> {
    let scaled: Vec<(usize, Q)> = piv.iter().map(|(j, v)| (*j, v * c)).collect();
    merge_rows(row, &scaled, false)
}

// ---------------------------------------------------------------------------
// permutations

/// A permutation of {0,..,n-1} stored as the image list: `p[i]` is where `i`
/// goes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Perm(pub Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n).collect())
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    /// `self` after `other`: (self ∘ other)(i) = self(other(i)).
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.n(), other.n());
        Perm(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.n()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Perm(inv)
    }

    pub fn transposition(n: usize, i: usize, j: usize) -> Perm {
        let mut p = Perm::identity(n);
        p.0.swap(i, j);
        p
    }

    pub fn sign(&self) -> i64 {
        let mut seen = vec![false; self.n()];
        let mut sgn = 1i64;
        for i in 0..self.n() {
            if seen[i] {
                continue;
            }
            let mut j = i;
            let mut len = 0;
            while !seen[j] {
                seen[j] = true;
                j = self.0[j];
                len += 1;
            }
            if len % 2 == 0 {
                sgn = -sgn;
            }
        }
        sgn
    }

    /// Decomposition into adjacent transpositions (s_i = (i, i+1), 0-based),
    /// leftmost factor applied first.
    pub fn adjacent_word(&self) -> Vec<usize> {
        // bubble-sort the image list to the identity; swapping positions
        // (i, i+1) is precomposition by s_i, so self = s_{w_k} ∘ ... ∘ s_{w_1}
        // for the recorded word w (first entry applied first).
        let mut word = Vec::new();
        let mut cur = self.0.clone();
        loop {
            let mut swapped = false;
            for i in 0..cur.len().saturating_sub(1) {
                if cur[i] > cur[i + 1] {
                    cur.swap(i, i + 1);
                    word.push(i);
                    swapped = true;
                }
            }
            if !swapped {
                break;
            }
        }
        word
    }

    /// The permutation of n-1 points induced on the complement of `i` after
    /// the order-preserving relabeling of both source and target.
    pub fn remove_point(&self, i: usize) -> Perm {
        let pi = self.0[i];
        let mut img = Vec::with_capacity(self.n() - 1);
        for (j, &pj) in self.0.iter().enumerate() {
            if j == i {
                continue;
            }
            img.push(if pj > pi { pj - 1 } else { pj });
        }
        Perm(img)
    }

    /// All permutations of n in lexicographic order of their image lists.
    pub fn all(n: usize) -> Vec<Perm> {
        if n == 0 {
            return vec![Perm(Vec::new())];
        }
        let mut out = Vec::new();
        let mut cur = (0..n).collect::<Vec<_>>();
        loop {
            out.push(Perm(cur.clone()));
            // next lexicographic permutation
            let mut i = n - 1;
            while i > 0 && cur[i - 1] >= cur[i] {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            let mut j = n - 1;
            while cur[j] <= cur[i - 1] {
                j -= 1;
            }
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
        out
    }

    /// Permutation matrix: column i has a 1 in row `self(i)` (so that
    /// M(e_i) = e_{σ(i)}).
    pub fn matrix(&self) -> QMatrix {
        let mut m = QMatrix::zero(self.n(), self.n());
        for (i, &j) in self.0.iter().enumerate() {
            m.set(j, i, Q::one());
        }
        m
    }
}

// ---------------------------------------------------------------------------
// group actions

/// A linear action of S_m x S_n given by the matrices of the Coxeter
/// generators (adjacent transpositions) of both factors.
#[derive(Clone, Debug)]
pub struct GroupAction {
    dim: usize,
    m: usize,
    n: usize,
    left_gens: Vec<QMatrix>,
    right_gens: Vec<QMatrix>,
}

impl GroupAction {
    pub fn new(dim: usize, m: usize, n: usize, left_gens: Vec<QMatrix>, right_gens: Vec<QMatrix>) -> Self {
        assert_eq!(left_gens.len(), m.saturating_sub(1), "S_m needs m-1 Coxeter generators");
        assert_eq!(right_gens.len(), n.saturating_sub(1), "S_n needs n-1 Coxeter generators");
        GroupAction { dim, m, n, left_gens, right_gens }
    }

    /// Trivial action of S_m x S_n on a space of dimension `dim`.
    pub fn trivial(dim: usize, m: usize, n: usize) -> Self {
        GroupAction {
            dim,
            m,
            n,
            left_gens: vec![QMatrix::identity(dim); m.saturating_sub(1)],
            right_gens: vec![QMatrix::identity(dim); n.saturating_sub(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn left_gen(&self, i: usize) -> &QMatrix {
        &self.left_gens[i]
    }

    pub fn right_gen(&self, i: usize) -> &QMatrix {
        &self.right_gens[i]
    }

    pub fn group_order(&self) -> usize {
        factorial(self.m()) * factorial(self.n())
    }

    /// Multiply the right-factor generators by -1 (the sign twist on the
    /// second factor).
    pub fn twist_right_by_sign(&self) -> Self {
        GroupAction {
            dim: self.dim,
            m: self.m,
            n: self.n,
            left_gens: self.left_gens.clone(),
            right_gens: self.right_gens.iter().map(|g| g.neg()).collect(),
        }
    }

    pub fn twist_left_by_sign(&self) -> Self {
        GroupAction {
            dim: self.dim,
            m: self.m,
            n: self.n,
            left_gens: self.left_gens.iter().map(|g| g.neg()).collect(),
            right_gens: self.right_gens.clone(),
        }
    }

    /// Checks the Coxeter presentations of both factors and that the two
    /// factors commute.
    pub fn validate(&self) -> Result<(), LinalgError> {
        let id = QMatrix::identity(self.dim);
        for gens in [&self.left_gens, &self.right_gens] {
            for (i, g) in gens.iter().enumerate() {
                if g.nrows() != self.dim || g.ncols() != self.dim {
                    return Err(LinalgError::MalformedAction(format!(
                        "generator {i} has shape {}x{}, expected {0}x{0}",
                        g.nrows(),
                        g.ncols()
                    )));
                }
                if g.mul(g) != id {
                    return Err(LinalgError::MalformedAction(format!("generator {i} is not an involution")));
                }
            }
            for i in 0..gens.len() {
                for j in i + 1..gens.len() {
                    let a = &gens[i];
                    let b = &gens[j];
                    if j == i + 1 {
                        let ab = a.mul(b);
                        if ab.mul(&ab).mul(&ab) != id {
                            return Err(LinalgError::MalformedAction(format!(
                                "braid relation fails for generators {i},{j}"
                            )));
                        }
                    } else if a.mul(b) != b.mul(a) {
                        return Err(LinalgError::MalformedAction(format!(
                            "distant generators {i},{j} do not commute"
                        )));
                    }
                }
            }
        }
        for a in &self.left_gens {
            for b in &self.right_gens {
                if a.mul(b) != b.mul(a) {
                    return Err(LinalgError::MalformedAction("left and right factors do not commute".into()));
                }
            }
        }
        Ok(())
    }

    /// Matrix of a single factor element, by its adjacent-transposition word.
    fn factor_matrix(&self, p: &Perm, gens: &[QMatrix]) -> QMatrix {
        let mut m = QMatrix::identity(self.dim);
        for s in p.adjacent_word() {
            m = gens[s].mul(&m);
        }
        m
    }

    /// Matrix of the element (sigma, tau) ∈ S_m x S_n.
    pub fn matrix_of(&self, sigma: &Perm, tau: &Perm) -> QMatrix {
        assert_eq!(sigma.n(), self.m());
        assert_eq!(tau.n(), self.n());
        self.factor_matrix(sigma, &self.left_gens).mul(&self.factor_matrix(tau, &self.right_gens))
    }

    /// The Reynolds idempotent (1/|G|) Σ_g ρ(g) for the full S_m x S_n.
    pub fn reynolds(&self) -> QMatrix {
        let left = Perm::all(self.m());
        let right = Perm::all(self.n());
        // average over each factor separately, then multiply: cheaper and equal
        let avg = |perms: &[Perm], gens: &[QMatrix]| {
            let mut sum = QMatrix::zero(self.dim, self.dim);
            for p in perms {
                sum = sum.add(&self.factor_matrix(p, gens));
            }
            sum.scale(&Q::new(BigInt::one(), BigInt::from(perms.len() as i64)))
        };
        avg(&left, &self.left_gens).mul(&avg(&right, &self.right_gens))
    }
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

// ---------------------------------------------------------------------------
// quotients / coinvariants

/// A quotient space of an ambient ℚ^n presented by a projection and a
/// section.
///
/// `project` maps ambient coordinates to quotient coordinates; `section`
/// picks representative vectors (project ∘ section = identity).
#[derive(Clone, Debug)]
pub struct Quotient {
    pub project: QMatrix,
    pub section: QMatrix,
}

impl Quotient {
    pub fn dim(&self) -> usize {
        self.project.nrows()
    }

    pub fn ambient_dim(&self) -> usize {
        self.project.ncols()
    }

    /// Identity presentation (quotient by 0).
    pub fn full(n: usize) -> Self {
        Quotient { project: QMatrix::identity(n), section: QMatrix::identity(n) }
    }

    /// Quotient of ℚ^ambient by the column span of `subspace`.
    pub fn by_subspace(ambient: usize, subspace: &QMatrix) -> Self {
        assert_eq!(subspace.nrows(), ambient);
        let (pivots, rows) = subspace.transpose().rref();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let free: Vec<usize> = (0..ambient).filter(|c| !pivot_set.contains(c)).collect();
        // reducer: v ↦ v - Σ_t v[j_t] * r_t  (kills the subspace)
        let mut project = QMatrix::zero(free.len(), ambient);
        for (qrow, fc) in free.iter().enumerate() {
            project.set(qrow, *fc, Q::one());
            for (t, &jt) in pivots.iter().enumerate() {
                let coeff = lookup(&rows[t], *fc);
                if !coeff.is_zero() {
                    project.set(qrow, jt, -coeff);
                }
            }
        }
        let mut section = QMatrix::zero(ambient, free.len());
        for (qrow, fc) in free.iter().enumerate() {
            section.set(*fc, qrow, Q::one());
        }
        Quotient { project, section }
    }

    /// Presentation of the image of an idempotent P (e.g. a Reynolds
    /// averaging operator): in characteristic zero the image of P maps
    /// isomorphically onto the coinvariant quotient.
    pub fn of_idempotent(p: &QMatrix) -> Self {
        let basis = p.column_space_basis();
        // coordinates: solve basis * X = P, giving the coordinate map
        let coords = basis.solve(p).expect("idempotent image must span its own columns");
        Quotient { project: coords, section: basis }
    }
}

/// Coinvariants of a validated group action: quotient presentation plus the
/// Reynolds projection onto representatives.
pub fn coinvariants(action: &GroupAction) -> Result<(Quotient, QMatrix), LinalgError> {
    action.validate()?;
    let p = action.reynolds();
    debug_assert_eq!(p.mul(&p), p, "Reynolds operator must be idempotent");
    Ok((Quotient::of_idempotent(&p), p))
}

/// Average of an explicit list of matrices (Reynolds over a subgroup or a
/// finite automorphism group, possibly with signs premultiplied).
pub fn average(mats: &[QMatrix]) -> QMatrix {
    assert!(!mats.is_empty());
    let mut sum = QMatrix::zero(mats[0].nrows(), mats[0].ncols());
    for m in mats {
        sum = sum.add(m);
    }
    sum.scale(&Q::new(BigInt::one(), BigInt::from(mats.len() as i64)))
}

// ---------------------------------------------------------------------------
// univariate polynomials over ℚ and Smith normal form over ℚ[u]

/// Dense univariate polynomial over ℚ; coefficient k is the u^k coefficient.
#[derive(Clone, PartialEq, Eq)]
pub struct QPoly(Vec<Q>);

impl std::fmt::Debug for QPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format!("{c}"),
                1 => format!("{c}*u"),
                _ => format!("{c}*u^{k}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl QPoly {
    pub fn zero() -> Self {
        QPoly(Vec::new())
    }

    pub fn constant(c: Q) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            QPoly(vec![c])
        }
    }

    pub fn u() -> Self {
        QPoly(vec![Q::zero(), Q::one()])
    }

    pub fn from_coeffs(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        QPoly(coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        assert!(!self.is_zero(), "degree of zero polynomial");
        self.0.len() - 1
    }

    pub fn is_unit(&self) -> bool {
        self.0.len() == 1
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        let mut coeffs = vec![Q::zero(); n];
        for (k, c) in self.0.iter().enumerate() {
            coeffs[k] = c.clone();
        }
        for (k, c) in other.0.iter().enumerate() {
            coeffs[k] += c;
        }
        Self::from_coeffs(coeffs)
    }

    pub fn neg(&self) -> Self {
        QPoly(self.0.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Q::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self::from_coeffs(coeffs)
    }

    /// Division with remainder: self = q * div + r with deg r < deg div.
    pub fn divmod(&self, div: &Self) -> (Self, Self) {
        assert!(!div.is_zero(), "division by zero polynomial");
        let mut rem = self.0.clone();
        let dd = div.degree();
        let lead = div.0[dd].clone();
        let mut quot = vec![Q::zero(); self.0.len().saturating_sub(dd)];
        while rem.len() > dd || (rem.len() == dd + 1 && dd == 0 && !rem.is_empty()) {
            while rem.last().is_some_and(|c| c.is_zero()) {
                rem.pop();
            }
            if rem.len() <= dd {
                break;
            }
            let k = rem.len() - 1 - dd;
            let f = &rem[rem.len() - 1] / &lead;
            quot[k] = f.clone();
            let rl = rem.len();
            for (j, c) in div.0.iter().enumerate() {
                let idx = k + j;
                let delta = &f * c;
                rem[idx] -= delta;
            }
            debug_assert!(rem[rl - 1].is_zero());
            rem.pop();
        }
        (Self::from_coeffs(quot), Self::from_coeffs(rem))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let lead = self.0.last().unwrap().clone();
        QPoly(self.0.iter().map(|c| c / &lead).collect())
    }
}

/// Dense matrix over ℚ[u].
#[derive(Clone, Debug)]
pub struct PolyMatrix {
    pub nrows: usize,
    pub ncols: usize,
    entries: Vec<QPoly>,
}

impl PolyMatrix {
    pub fn zero(nrows: usize, ncols: usize) -> Self {
        PolyMatrix { nrows, ncols, entries: vec![QPoly::zero(); nrows * ncols] }
    }

    /// `const_part + u * linear_part`.
    pub fn from_linear(const_part: &QMatrix, linear_part: &QMatrix) -> Self {
        assert_eq!((const_part.nrows(), const_part.ncols()), (linear_part.nrows(), linear_part.ncols()));
        let mut m = Self::zero(const_part.nrows(), const_part.ncols());
        for r in 0..const_part.nrows() {
            for (c, v) in const_part.row(r) {
                m.entries[r * m.ncols + c] = QPoly::constant(v.clone());
            }
            for (c, v) in linear_part.row(r) {
                let cur = &m.entries[r * m.ncols + c];
                m.entries[r * m.ncols + c] = cur.add(&QPoly::from_coeffs(vec![Q::zero(), v.clone()]));
            }
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> &QPoly {
        &self.entries[r * self.ncols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: QPoly) {
        self.entries[r * self.ncols + c] = v;
    }

    /// Nonunit invariant factors (monic) and the rank over ℚ(u), via the
    /// Smith normal form over the PID ℚ[u].
    pub fn smith_invariants(&self) -> (usize, Vec<QPoly>) {
        let mut m = self.clone();
        let mut invariants = Vec::new();
        let mut top = 0usize;
        while top < m.nrows && top < m.ncols {
            // find the nonzero entry of minimal degree in the submatrix
            let mut best: Option<(usize, usize, usize)> = None;
            for r in top..m.nrows {
                for c in top..m.ncols {
                    let e = m.get(r, c);
                    if !e.is_zero() {
                        let d = e.degree();
                        if best.is_none() || d < best.unwrap().2 {
                            best = Some((r, c, d));
                        }
                    }
                }
            }
            let Some((pr, pc, _)) = best else { break };
            m.swap_rows(top, pr);
            m.swap_cols(top, pc);
            // clear row and column by division with remainder; repeat until clean
            loop {
                let mut dirty = false;
                for r in top + 1..m.nrows {
                    if !m.get(r, top).is_zero() {
                        let (q, _) = m.get(r, top).divmod(m.get(top, top));
                        m.row_axpy(r, top, &q.neg());
                        if !m.get(r, top).is_zero() {
                            // remainder has smaller degree: swap up and restart
                            m.swap_rows(top, r);
                            dirty = true;
                        }
                    }
                }
                for c in top + 1..m.ncols {
                    if !m.get(top, c).is_zero() {
                        let (q, _) = m.get(top, c).divmod(m.get(top, top));
                        m.col_axpy(c, top, &q.neg());
                        if !m.get(top, c).is_zero() {
                            m.swap_cols(top, c);
                            dirty = true;
                        }
                    }
                }
                if !dirty {
                    break;
                }
            }
            // ensure divisibility of the remaining block by the pivot
            let mut fixed = true;
            for r in top + 1..m.nrows {
                for c in top + 1..m.ncols {
                    if !m.get(r, c).is_zero() {
                        let (_, rem) = m.get(r, c).divmod(m.get(top, top));
                        if !rem.is_zero() {
                            // add row r to row top and redo this pivot
                            m.row_add(top, r);
                            fixed = false;
                            break;
                        }
                    }
                }
                if !fixed {
                    break;
                }
            }
            if !fixed {
                continue;
            }
            invariants.push(m.get(top, top).monic());
            top += 1;
        }
        let rank = invariants.len();
        let nonunit: Vec<QPoly> = invariants.into_iter().filter(|p| !p.is_unit()).collect();
        (rank, nonunit)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.ncols {
            self.entries.swap(a * self.ncols + c, b * self.ncols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.nrows {
            self.entries.swap(r * self.ncols + a, r * self.ncols + b);
        }
    }

    /// row[r] += q * row[src]
    fn row_axpy(&mut self, r: usize, src: usize, q: &QPoly) {
        for c in 0..self.ncols {
            let v = self.get(r, c).add(&q.mul(self.get(src, c)));
            self.set(r, c, v);
        }
    }

    fn row_add(&mut self, r: usize, src: usize) {
        for c in 0..self.ncols {
            let v = self.get(r, c).add(self.get(src, c));
            self.set(r, c, v);
        }
    }

    /// col[c] += q * col[src]
    fn col_axpy(&mut self, c: usize, src: usize, q: &QPoly) {
        for r in 0..self.nrows {
            let v = self.get(r, c).add(&q.mul(self.get(r, src)));
            self.set(r, c, v);
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows);
        let mut out = Self::zero(self.nrows, other.ncols);
        for r in 0..self.nrows {
            for k in 0..self.ncols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.ncols {
                    let b = other.get(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.get(r, c).add(&a.mul(b));
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }
}

/// ℚ-dimension of a finitely generated ℚ[u]-module presented as
/// free rank + invariant factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyModuleDim {
    pub free_rank: usize,
    pub torsion_dim: usize,
}

impl PolyModuleDim {
    pub fn finite(&self) -> Option<usize> {
        (self.free_rank == 0).then_some(self.torsion_dim)
    }
}

/// Homology at the middle of `C_in --d_in--> C_mid --d_out--> C_out` for a
/// complex of free ℚ[u]-modules: H = ker(d_out)/im(d_in), returned as free
/// rank and total ℚ-dimension of the torsion part.
pub fn poly_homology(d_out: &PolyMatrix, d_in: &PolyMatrix) -> PolyModuleDim {
    assert_eq!(d_in.nrows, d_out.ncols, "composability");
    debug_assert!(d_out.mul(d_in).is_zero(), "d² ≠ 0 over ℚ[u]");
    let (rank_out, _) = d_out.smith_invariants();
    let (rank_in, invs) = d_in.smith_invariants();
    let z = d_out.ncols - rank_out;
    PolyModuleDim {
        free_rank: z - rank_in,
        torsion_dim: invs.iter().map(|p| p.degree()).sum(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_matrix_rank() {
        let m = QMatrix::zero(0, 0);
        let (rank, ker, im) = m.rank_kernel_image();
        assert_eq!(rank, 0);
        assert_eq!(ker.ncols(), 0);
        assert_eq!(im.ncols(), 0);
    }

    #[test]
    fn identity_rank() {
        let m = QMatrix::identity(3);
        let (rank, ker, _) = m.rank_kernel_image();
        assert_eq!(rank, 3);
        assert_eq!(ker.ncols(), 0);
    }

    #[test]
    fn rank_one_kernel() {
        // row reduce by hand: [[1,2],[2,4]] has rank 1, kernel spanned by (-2,1)
        let m = QMatrix::from_i64(&[&[1, 2], &[2, 4]]);
        let (rank, ker, im) = m.rank_kernel_image();
        assert_eq!(rank, 1);
        assert_eq!(ker.ncols(), 1);
        let v = ker.column(0);
        // kernel vector proportional to (-2, 1)
        assert_eq!(&v[0] * qi(1), &v[1] * qi(-2));
        assert!(m.mul(&ker).is_zero());
        assert_eq!(im.ncols(), 1);
    }

    #[test]
    fn rank_nullity() {
        let m = QMatrix::from_i64(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]);
        let (rank, ker, _) = m.rank_kernel_image();
        assert_eq!(rank + ker.ncols(), m.ncols());
        assert!(m.mul(&ker).is_zero());
    }

    #[test]
    fn solve_consistent() {
        let a = QMatrix::from_i64(&[&[2, 0], &[0, 3]]);
        let b = QMatrix::from_i64(&[&[4], &[9]]);
        let x = a.solve(&b).unwrap();
        assert_eq!(a.mul(&x), b);
    }

    #[test]
    fn solve_inconsistent() {
        let a = QMatrix::from_i64(&[&[1, 1], &[1, 1]]);
        let b = QMatrix::from_i64(&[&[1], &[2]]);
        assert!(a.solve(&b).is_none());
    }

    #[test]
    fn trivial_group_coinvariants() {
        let act = GroupAction::trivial(2, 1, 1);
        let (quot, p) = coinvariants(&act).unwrap();
        assert_eq!(quot.dim(), 2);
        assert_eq!(p, QMatrix::identity(2));
    }

    #[test]
    fn swap_coinvariants() {
        // S₂ swapping coordinates of ℚ²: quotient dim 1
        let swap = QMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        let act = GroupAction::new(2, 2, 1, vec![swap], vec![]);
        let (quot, p) = coinvariants(&act).unwrap();
        assert_eq!(quot.dim(), 1);
        assert_eq!(p.mul(&p), p);
    }

    #[test]
    fn swap_sign_coinvariants() {
        // average the two group elements: S₂ by swap⊗sign has coinvariants
        // spanned by (1,-1)
        let swap_sign = QMatrix::from_i64(&[&[0, -1], &[-1, 0]]);
        let act = GroupAction::new(2, 2, 1, vec![swap_sign], vec![]);
        let (quot, p) = coinvariants(&act).unwrap();
        assert_eq!(quot.dim(), 1);
        let rep = quot.section.column(0);
        assert_eq!(&rep[0] + &rep[1], Q::zero());
        assert_eq!(p.mul(&p), p);
    }

    #[test]
    fn malformed_action_rejected() {
        let notinv = QMatrix::from_i64(&[&[1, 1], &[0, 0]]);
        let act = GroupAction::new(2, 2, 1, vec![notinv], vec![]);
        assert!(matches!(coinvariants(&act), Err(LinalgError::MalformedAction(_))));
    }

    #[test]
    fn perm_roundtrip() {
        for p in Perm::all(4) {
            let mut m = Perm::identity(4);
            for s in p.adjacent_word() {
                m = Perm::transposition(4, s, s + 1).compose(&m);
            }
            assert_eq!(m, p);
            assert_eq!(p.compose(&p.inverse()), Perm::identity(4));
        }
    }

    #[test]
    fn perm_sign() {
        assert_eq!(Perm::identity(3).sign(), 1);
        assert_eq!(Perm::transposition(3, 0, 1).sign(), -1);
        assert_eq!(Perm(vec![1, 2, 0]).sign(), 1);
    }

    #[test]
    fn poly_divmod() {
        // (u² - 1) / (u - 1) = u + 1 rem 0
        let a = QPoly::from_coeffs(vec![qi(-1), qi(0), qi(1)]);
        let b = QPoly::from_coeffs(vec![qi(-1), qi(1)]);
        let (q_, r) = a.divmod(&b);
        assert_eq!(q_, QPoly::from_coeffs(vec![qi(1), qi(1)]));
        assert!(r.is_zero());
    }

    #[test]
    fn smith_single_u() {
        // d = (u): rank 1, invariant u
        let mut d = PolyMatrix::zero(1, 1);
        d.set(0, 0, QPoly::u());
        let (rank, invs) = d.smith_invariants();
        assert_eq!(rank, 1);
        assert_eq!(invs.len(), 1);
        assert_eq!(invs[0].degree(), 1);
    }

    #[test]
    fn poly_homology_two_term() {
        // C₁ = ℚ[u] --u--> C₀ = ℚ[u]: H₀ = ℚ[u]/(u) (dim 1), H₁ = 0
        let mut d1 = PolyMatrix::zero(1, 1);
        d1.set(0, 0, QPoly::u());
        let d0 = PolyMatrix::zero(0, 1);
        let d2 = PolyMatrix::zero(1, 0);
        let h0 = poly_homology(&d0, &d1);
        assert_eq!(h0, PolyModuleDim { free_rank: 0, torsion_dim: 1 });
        let h1 = poly_homology(&d1, &d2);
        assert_eq!(h1, PolyModuleDim { free_rank: 0, torsion_dim: 0 });
    }
}
