//! Exact integer linear algebra: Smith normal form with transforms, kernels,
//! cokernels and lattice quotients. This is the computational substrate for
//! every cohomology group in the crate, so everything here is total, exact
//! and deterministic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Dense matrix over `Z` with arbitrary-precision entries, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.at(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Self {
        assert_eq!(
            entries.len(),
            rows * cols,
            "entry count must match dimensions"
        );
        IntMatrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Self {
        Self::new(
            rows,
            cols,
            entries.iter().map(|&x| BigInt::from(x)).collect(),
        )
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        Self::new(rows, cols, vec![BigInt::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, cols: Vec<Vec<BigInt>>) -> Self {
        let ncols = cols.len();
        let mut m = Self::zero(rows, ncols);
        for (j, col) in cols.into_iter().enumerate() {
            assert_eq!(col.len(), rows, "column length must match row count");
            for (i, v) in col.into_iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j {
                        self.at(i, j).is_one()
                    } else {
                        self.at(i, j).is_zero()
                    }
                })
            })
    }

    /// True for a square 0/1 matrix with exactly one 1 per row and column.
    pub fn is_permutation(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let mut col_seen = vec![false; self.cols];
        for i in 0..self.rows {
            let mut row_ones = 0usize;
            for (j, seen) in col_seen.iter_mut().enumerate() {
                let e = self.at(i, j);
                if e.is_one() {
                    row_ones += 1;
                    if *seen {
                        return false;
                    }
                    *seen = true;
                } else if !e.is_zero() {
                    return false;
                }
            }
            if row_ones != 1 {
                return false;
            }
        }
        true
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut m = Self::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.at(i, j).clone());
            }
        }
        m
    }

    pub fn mul(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in matrix product");
        let mut out = Self::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.at(i, j) + a * b;
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self::new(
            self.rows,
            self.cols,
            self.entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self::new(
            self.rows,
            self.cols,
            self.entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    /// Stacks matrices side by side (same row count).
    pub fn hstack(parts: &[&IntMatrix]) -> IntMatrix {
        assert!(!parts.is_empty());
        let rows = parts[0].rows;
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = Self::zero(rows, cols);
        let mut off = 0;
        for m in parts {
            assert_eq!(m.rows, rows);
            for i in 0..rows {
                for j in 0..m.cols {
                    out.set(i, off + j, m.at(i, j).clone());
                }
            }
            off += m.cols;
        }
        out
    }

    /// Stacks matrices on top of each other (same column count).
    pub fn vstack(parts: &[&IntMatrix]) -> IntMatrix {
        assert!(!parts.is_empty());
        let cols = parts[0].cols;
        let rows = parts.iter().map(|m| m.rows).sum();
        let mut out = Self::zero(rows, cols);
        let mut off = 0;
        for m in parts {
            assert_eq!(m.cols, cols);
            for i in 0..m.rows {
                for j in 0..cols {
                    out.set(off + i, j, m.at(i, j).clone());
                }
            }
            off += m.rows;
        }
        out
    }

    pub fn block_diag(parts: &[&IntMatrix]) -> IntMatrix {
        let rows = parts.iter().map(|m| m.rows).sum();
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = Self::zero(rows, cols);
        let (mut ro, mut co) = (0, 0);
        for m in parts {
            for i in 0..m.rows {
                for j in 0..m.cols {
                    out.set(ro + i, co + j, m.at(i, j).clone());
                }
            }
            ro += m.rows;
            co += m.cols;
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.at(i, j) * &v[j]).sum())
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] -= q * row[src]
    fn row_submul(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = self.at(dst, j) - q * self.at(src, j);
            self.set(dst, j, v);
        }
    }

    /// col[dst] -= q * col[src]
    fn col_submul(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = self.at(i, dst) - q * self.at(i, src);
            self.set(i, dst, v);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -self.at(r, j);
            self.set(r, j, v);
        }
    }

    /// Determinant by fraction-free (Bareiss) elimination. Square only.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = 1i32;
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a.at(k, k).is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a.at(i, k).is_zero()) else {
                    return BigInt::zero();
                };
                a.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.at(i, j) * a.at(k, k) - a.at(i, k) * a.at(k, j)) / &prev;
                    a.set(i, j, v);
                }
                a.set(i, k, BigInt::zero());
            }
            prev = a.at(k, k).clone();
        }
        let d = a.at(n - 1, n - 1).clone();
        if sign < 0 {
            -d
        } else {
            d
        }
    }
}

/// Smith decomposition `U * M * V = S` with `S` diagonal, `d_i | d_{i+1}`,
/// and `U`, `V` unimodular.
#[derive(Clone, Debug)]
pub struct NormalFormResult {
    pub s: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl NormalFormResult {
    /// Nonzero diagonal entries, in chain order.
    pub fn diagonal(&self) -> Vec<BigInt> {
        let n = self.s.rows().min(self.s.cols());
        (0..n)
            .map(|i| self.s.at(i, i).clone())
            .take_while(|d| !d.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().len()
    }
}

fn rounded_div(x: &BigInt, y: &BigInt) -> BigInt {
    // nearest-integer quotient; keeps intermediate entries small
    let (q, r) = x.div_rem(y);
    if (&r * 2i32).abs() > y.abs() {
        if r.is_positive() == y.is_positive() {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// Smith normal form. Pivot selection is the smallest nonzero absolute value
/// in the remaining block, ties broken row-major, so the output transforms
/// are deterministic for a given input.
pub fn smith_normal_form(m: &IntMatrix) -> NormalFormResult {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let mut t = 0;
    while t < rows && t < cols {
        // pivot: smallest |entry| in a[t.., t..]
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if a.at(i, j).is_zero() {
                    continue;
                }
                match pivot {
                    None => pivot = Some((i, j)),
                    Some((pi, pj)) => {
                        if a.at(i, j).abs() < a.at(pi, pj).abs() {
                            pivot = Some((i, j));
                        }
                    }
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        a.swap_rows(t, pi);
        u.swap_rows(t, pi);
        a.swap_cols(t, pj);
        v.swap_cols(t, pj);

        loop {
            // clear column t by Euclidean steps
            let mut stable = true;
            for i in t + 1..rows {
                if a.at(i, t).is_zero() {
                    continue;
                }
                let q = rounded_div(a.at(i, t), a.at(t, t));
                a.row_submul(i, t, &q);
                u.row_submul(i, t, &q);
                if !a.at(i, t).is_zero() {
                    // remainder became the smaller pivot
                    a.swap_rows(t, i);
                    u.swap_rows(t, i);
                    stable = false;
                }
            }
            for j in t + 1..cols {
                if a.at(t, j).is_zero() {
                    continue;
                }
                let q = rounded_div(a.at(t, j), a.at(t, t));
                a.col_submul(j, t, &q);
                v.col_submul(j, t, &q);
                if !a.at(t, j).is_zero() {
                    a.swap_cols(t, j);
                    v.swap_cols(t, j);
                    stable = false;
                }
            }
            let col_clear = (t + 1..rows).all(|i| a.at(i, t).is_zero());
            let row_clear = (t + 1..cols).all(|j| a.at(t, j).is_zero());
            if !(col_clear && row_clear) {
                continue;
            }
            if !stable {
                continue;
            }
            // enforce the divisibility chain: pivot must divide the block
            let mut fixed = true;
            'scan: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !(a.at(i, j) % a.at(t, t)).is_zero() {
                        // fold the offending row into row t and re-eliminate
                        for jj in 0..cols {
                            let w = a.at(t, jj) + a.at(i, jj);
                            a.set(t, jj, w);
                        }
                        for jj in 0..rows {
                            let w = u.at(t, jj) + u.at(i, jj);
                            u.set(t, jj, w);
                        }
                        fixed = false;
                        break 'scan;
                    }
                }
            }
            if fixed {
                break;
            }
        }
        if a.at(t, t).is_negative() {
            a.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    NormalFormResult { s: a, u, v }
}

/// Basis of the integer kernel of `M`, as columns. The kernel of an integer
/// matrix is automatically saturated; each basis vector is additionally
/// divided by its content and sign-normalized so the output is canonical.
pub fn kernel_basis(m: &IntMatrix) -> IntMatrix {
    let nf = smith_normal_form(m);
    let rank = nf.rank();
    let cols = m.cols();
    let mut basis: Vec<Vec<BigInt>> = Vec::with_capacity(cols - rank);
    for j in rank..cols {
        let mut col = nf.v.column(j);
        let content = col
            .iter()
            .filter(|x| !x.is_zero())
            .fold(BigInt::zero(), |g, x| g.gcd(x));
        if content > BigInt::one() {
            for x in col.iter_mut() {
                *x = &*x / &content;
            }
        }
        if let Some(first) = col.iter().find(|x| !x.is_zero()) {
            if first.is_negative() {
                for x in col.iter_mut() {
                    *x = -&*x;
                }
            }
        }
        basis.push(col);
    }
    IntMatrix::from_columns(cols, basis)
}

/// Finitely generated abelian group in invariant-factor form: the factors
/// are each >= 2 and each divides the next.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FiniteAbelianGroup {
    pub invariant_factors: Vec<BigInt>,
    pub free_rank: usize,
}

impl FiniteAbelianGroup {
    pub fn new(invariant_factors: Vec<BigInt>, free_rank: usize) -> Self {
        for w in invariant_factors.windows(2) {
            debug_assert!(
                (&w[1] % &w[0]).is_zero(),
                "invariant factors must form a chain"
            );
        }
        debug_assert!(invariant_factors.iter().all(|d| *d >= BigInt::from(2)));
        FiniteAbelianGroup {
            invariant_factors,
            free_rank,
        }
    }

    pub fn trivial() -> Self {
        FiniteAbelianGroup {
            invariant_factors: vec![],
            free_rank: 0,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty() && self.free_rank == 0
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Group order; `None` when the free rank is positive.
    pub fn order(&self) -> Option<BigInt> {
        if self.free_rank > 0 {
            return None;
        }
        Some(self.invariant_factors.iter().product())
    }

    /// `Z/n` for n >= 2.
    pub fn cyclic(n: u64) -> Self {
        assert!(n >= 2);
        FiniteAbelianGroup {
            invariant_factors: vec![BigInt::from(n)],
            free_rank: 0,
        }
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "trivial");
        }
        let mut parts: Vec<String> = self
            .invariant_factors
            .iter()
            .map(|d| format!("Z/{}", d))
            .collect();
        if self.free_rank == 1 {
            parts.push("Z".to_string());
        } else if self.free_rank > 1 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

/// Cokernel of `M : Z^cols -> Z^rows`, from the SNF diagonal.
pub fn cokernel(m: &IntMatrix) -> FiniteAbelianGroup {
    let nf = smith_normal_form(m);
    let diag = nf.diagonal();
    let factors: Vec<BigInt> = diag.into_iter().filter(|d| *d > BigInt::one()).collect();
    let free_rank = m.rows() - nf.rank();
    FiniteAbelianGroup::new(factors, free_rank)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeError {
    /// A column of the purported sublattice is not contained in the span of
    /// the ambient generators.
    ContainmentViolation { witness_column: usize },
}

impl fmt::Display for LatticeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeError::ContainmentViolation { witness_column } => write!(
                f,
                "column {} is not contained in the span of the ambient generators",
                witness_column
            ),
        }
    }
}

impl std::error::Error for LatticeError {}

/// A basis for the lattice spanned by the columns of `m`, computed from the
/// Smith transforms: the span of the columns equals the span of
/// `U^{-1} * S`, and `U^{-1}` is recovered from the SNF of `U` itself.
pub fn column_basis(m: &IntMatrix) -> IntMatrix {
    let nf = smith_normal_form(m);
    let rank = nf.rank();
    let uinv = inverse_unimodular(&nf.u);
    let mut cols = Vec::with_capacity(rank);
    for j in 0..rank {
        let d = nf.s.at(j, j);
        cols.push((0..m.rows()).map(|i| uinv.at(i, j) * d).collect());
    }
    IntMatrix::from_columns(m.rows(), cols)
}

/// Inverse of a unimodular matrix, via its Smith decomposition:
/// `U m V = 1` forces `m^{-1} = V U`.
pub fn inverse_unimodular(m: &IntMatrix) -> IntMatrix {
    assert_eq!(m.rows(), m.cols());
    let nf = smith_normal_form(m);
    assert!(
        nf.s.is_identity(),
        "matrix is not unimodular (SNF diagonal is not all ones)"
    );
    nf.v.mul(&nf.u)
}

/// Integer coordinates `C` with `basis * C = targets`, where `basis` has
/// independent columns. Fails with the first offending target column when a
/// target is not in the Z-span of the basis.
pub fn solve_in_basis(basis: &IntMatrix, targets: &IntMatrix) -> Result<IntMatrix, LatticeError> {
    assert_eq!(basis.rows(), targets.rows());
    let nf = smith_normal_form(basis);
    let rank = nf.rank();
    assert_eq!(rank, basis.cols(), "basis columns must be independent");
    // basis * c = t  <=>  S * (V^{-1} c) = U t ; y_i = (Ut)_i / d_i
    let vt = nf.v;
    let mut coords = Vec::with_capacity(targets.cols());
    for j in 0..targets.cols() {
        let t = targets.column(j);
        let ut = nf.u.mul_vec(&t);
        let mut y = vec![BigInt::zero(); rank];
        for (i, yi) in y.iter_mut().enumerate() {
            let d = nf.s.at(i, i);
            let (q, r) = ut[i].div_rem(d);
            if !r.is_zero() {
                return Err(LatticeError::ContainmentViolation { witness_column: j });
            }
            *yi = q;
        }
        for item in ut.iter().skip(rank) {
            if !item.is_zero() {
                return Err(LatticeError::ContainmentViolation { witness_column: j });
            }
        }
        coords.push(vt.mul_vec(&y));
    }
    Ok(IntMatrix::from_columns(basis.cols(), coords))
}

/// Quotient of the lattice spanned by `generators` by the lattice spanned by
/// `subgenerators`, both inside `Z^ambient_rank`.
pub fn sublattice_quotient(
    ambient_rank: usize,
    generators: &IntMatrix,
    subgenerators: &IntMatrix,
) -> Result<FiniteAbelianGroup, LatticeError> {
    assert_eq!(generators.rows(), ambient_rank);
    assert_eq!(subgenerators.rows(), ambient_rank);
    let basis = column_basis(generators);
    if basis.cols() == 0 {
        // trivial ambient lattice; the sublattice must be zero
        for j in 0..subgenerators.cols() {
            if subgenerators.column(j).iter().any(|x| !x.is_zero()) {
                return Err(LatticeError::ContainmentViolation { witness_column: j });
            }
        }
        return Ok(FiniteAbelianGroup::trivial());
    }
    let coords = solve_in_basis(&basis, subgenerators)?;
    Ok(cokernel(&coords))
}

/// Whether the columns of `m` span exactly the lattice spanned by
/// `target_basis` (index 1). Containment failures are errors.
pub fn is_surjective_onto(m: &IntMatrix, target_basis: &IntMatrix) -> Result<bool, LatticeError> {
    assert_eq!(m.rows(), target_basis.rows());
    let basis = column_basis(target_basis);
    if basis.cols() == 0 {
        for j in 0..m.cols() {
            if m.column(j).iter().any(|x| !x.is_zero()) {
                return Err(LatticeError::ContainmentViolation { witness_column: j });
            }
        }
        return Ok(true);
    }
    let coords = solve_in_basis(&basis, m)?;
    Ok(cokernel(&coords).is_trivial())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: usize, cols: usize, e: &[i64]) -> IntMatrix {
        IntMatrix::from_i64(rows, cols, e)
    }

    fn check_snf_contract(a: &IntMatrix) -> NormalFormResult {
        let nf = smith_normal_form(a);
        assert_eq!(nf.u.mul(a).mul(&nf.v), nf.s, "U*M*V = S violated");
        assert!(nf.u.det().abs().is_one(), "U not unimodular");
        assert!(nf.v.det().abs().is_one(), "V not unimodular");
        let n = nf.s.rows().min(nf.s.cols());
        for i in 0..nf.s.rows() {
            for j in 0..nf.s.cols() {
                if i != j {
                    assert!(nf.s.at(i, j).is_zero(), "S not diagonal");
                }
            }
        }
        let diag: Vec<BigInt> = (0..n).map(|i| nf.s.at(i, i).clone()).collect();
        let mut seen_zero = false;
        for w in diag.windows(2) {
            if w[0].is_zero() {
                seen_zero = true;
            }
            if seen_zero {
                assert!(w[1].is_zero(), "zeros must trail");
            } else if !w[1].is_zero() {
                assert!((&w[1] % &w[0]).is_zero(), "divisibility chain violated");
            }
        }
        assert!(diag.iter().all(|d| !d.is_negative()));
        nf
    }

    #[test]
    fn snf_examples() {
        let nf = check_snf_contract(&m(2, 2, &[2, 4, 6, 8]));
        assert_eq!(nf.diagonal(), vec![BigInt::from(2), BigInt::from(4)]);

        let nf = check_snf_contract(&IntMatrix::identity(3));
        assert!(nf.s.is_identity());

        let nf = check_snf_contract(&IntMatrix::zero(2, 3));
        assert!(nf.s.is_zero());
    }

    #[test]
    fn snf_determinism() {
        let a = m(3, 3, &[4, -2, 7, 0, 5, 5, -3, 3, 3]);
        let n1 = smith_normal_form(&a);
        let n2 = smith_normal_form(&a);
        assert_eq!(n1.u, n2.u);
        assert_eq!(n1.v, n2.v);
        assert_eq!(n1.s, n2.s);
    }

    #[test]
    fn kernel_examples() {
        let k = kernel_basis(&m(1, 2, &[2, -1]));
        assert_eq!(k, m(2, 1, &[1, 2]));

        let k = kernel_basis(&IntMatrix::identity(2));
        assert_eq!(k.cols(), 0);

        let k = kernel_basis(&m(2, 2, &[1, 1, 1, 1]));
        assert_eq!(k.cols(), 1);
        // sign-normalized: (1, -1)
        assert_eq!(k, m(2, 1, &[1, -1]));
    }

    #[test]
    fn kernel_is_primitive() {
        // basis vectors of the kernel have SNF diagonal all ones
        let a = m(2, 4, &[2, 4, 6, 8, 1, 3, 5, 7]);
        let k = kernel_basis(&a);
        assert_eq!(k.cols(), 2);
        assert!(a.mul(&k).is_zero());
        let nf = smith_normal_form(&k);
        assert!(nf.diagonal().iter().all(|d| d.is_one()));
    }

    #[test]
    fn cokernel_examples() {
        assert_eq!(cokernel(&m(1, 1, &[2])), FiniteAbelianGroup::cyclic(2));
        assert!(cokernel(&IntMatrix::identity(3)).is_trivial());
        let g = cokernel(&m(2, 2, &[2, 0, 0, 4]));
        assert_eq!(g.invariant_factors, vec![BigInt::from(2), BigInt::from(4)]);
        assert_eq!(g.free_rank, 0);
    }

    #[test]
    fn cokernel_free_rank() {
        // Z^2 <- Z : image rank 1
        let g = cokernel(&m(2, 1, &[1, 0]));
        assert_eq!(g.free_rank, 1);
        assert!(g.invariant_factors.is_empty());
        assert_eq!(g.order(), None);
    }

    #[test]
    fn sublattice_quotient_examples() {
        // Z^2 / 2Z^2 = (Z/2)^2
        let g = sublattice_quotient(2, &IntMatrix::identity(2), &m(2, 2, &[2, 0, 0, 2])).unwrap();
        assert_eq!(g.invariant_factors, vec![BigInt::from(2), BigInt::from(2)]);

        let g = sublattice_quotient(1, &IntMatrix::identity(1), &IntMatrix::identity(1)).unwrap();
        assert!(g.is_trivial());

        // span{(1,1)} / span{(3,3)} = Z/3
        let g = sublattice_quotient(2, &m(2, 1, &[1, 1]), &m(2, 1, &[3, 3])).unwrap();
        assert_eq!(g, FiniteAbelianGroup::cyclic(3));
    }

    #[test]
    fn sublattice_quotient_containment_witness() {
        let err = sublattice_quotient(2, &m(2, 1, &[1, 1]), &m(2, 2, &[3, 1, 3, 0])).unwrap_err();
        assert_eq!(
            err,
            LatticeError::ContainmentViolation { witness_column: 1 }
        );
    }

    #[test]
    fn surjectivity_examples() {
        assert!(!is_surjective_onto(&m(1, 1, &[2]), &IntMatrix::identity(1)).unwrap());
        assert!(is_surjective_onto(&IntMatrix::identity(2), &IntMatrix::identity(2)).unwrap());
        // columns (1,0,0),(0,2,0) onto span{e1, 2e2}
        let image = m(3, 2, &[1, 0, 0, 2, 0, 0]);
        let target = m(3, 2, &[1, 0, 0, 2, 0, 0]);
        assert!(is_surjective_onto(&image, &target).unwrap());
    }

    #[test]
    fn inverse_unimodular_roundtrip() {
        let u = m(3, 3, &[1, 2, 3, 0, 1, 4, 0, 0, 1]);
        let ui = inverse_unimodular(&u);
        assert!(u.mul(&ui).is_identity());
        assert!(ui.mul(&u).is_identity());
    }

    #[test]
    fn det_bareiss() {
        assert_eq!(m(2, 2, &[2, 4, 6, 8]).det(), BigInt::from(-8));
        assert_eq!(IntMatrix::identity(4).det(), BigInt::one());
        assert_eq!(m(3, 3, &[1, 2, 3, 4, 5, 6, 7, 8, 9]).det(), BigInt::zero());
    }

    // deterministic xorshift for the randomized contract suite
    struct Rng(u64);
    impl Rng {
        fn next(&mut self) -> u64 {
            self.0 ^= self.0 >> 12;
            self.0 ^= self.0 << 25;
            self.0 ^= self.0 >> 27;
            self.0.wrapping_mul(0x2545_F491_4F6C_DD1D)
        }
        fn int_in(&mut self, lo: i64, hi: i64) -> i64 {
            lo + (self.next() % (hi - lo + 1) as u64) as i64
        }
    }

    fn minor_gcd(a: &IntMatrix, k: usize) -> BigInt {
        // gcd of all k x k minors, by direct enumeration (independent oracle)
        fn combos(n: usize, k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            if n < k {
                return vec![];
            }
            let mut out = combos(n - 1, k);
            for mut c in combos(n - 1, k - 1) {
                c.push(n - 1);
                out.push(c);
            }
            out
        }
        let mut g = BigInt::zero();
        for ri in combos(a.rows(), k) {
            for ci in combos(a.cols(), k) {
                let sub = IntMatrix::new(
                    k,
                    k,
                    ri.iter()
                        .flat_map(|&i| ci.iter().map(move |&j| a.at(i, j).clone()))
                        .collect(),
                );
                g = g.gcd(&sub.det());
            }
        }
        g
    }

    #[test]
    fn snf_random_contract_with_determinant_divisors() {
        let mut rng = Rng(0x5eed_1234);
        for _ in 0..60 {
            let a = IntMatrix::from_i64(
                4,
                4,
                &(0..16).map(|_| rng.int_in(-9, 9)).collect::<Vec<_>>(),
            );
            let nf = check_snf_contract(&a);
            let diag = nf.diagonal();
            let mut prod = BigInt::one();
            for (i, d) in diag.iter().enumerate() {
                prod *= d;
                assert_eq!(prod, minor_gcd(&a, i + 1), "determinant divisor mismatch");
            }
        }
    }

    #[test]
    fn cokernel_order_matches_enumeration() {
        // independent oracle: a simple column-Hermite reduction followed by
        // residue counting through the diagonal
        #[allow(clippy::explicit_counter_loop)]
        fn hnf_order(a: &IntMatrix) -> Option<BigInt> {
            let mut w = a.clone();
            let mut diag = Vec::new();
            let mut pivot_col = 0usize;
            for row in 0..w.rows() {
                let mut j = pivot_col;
                while j < w.cols() && w.at(row, j).is_zero() {
                    j += 1;
                }
                if j == w.cols() {
                    return None; // column rank < rows: infinite quotient
                }
                w.swap_cols(pivot_col, j);
                for j2 in pivot_col + 1..w.cols() {
                    while !w.at(row, j2).is_zero() {
                        let q = rounded_div(w.at(row, j2), w.at(row, pivot_col));
                        w.col_submul(j2, pivot_col, &q);
                        if !w.at(row, j2).is_zero() {
                            w.swap_cols(pivot_col, j2);
                        }
                    }
                }
                diag.push(w.at(row, pivot_col).abs());
                pivot_col += 1;
            }
            Some(diag.iter().product())
        }
        let mut rng = Rng(0xfeed_beef);
        let mut checked = 0;
        while checked < 40 {
            let a =
                IntMatrix::from_i64(3, 3, &(0..9).map(|_| rng.int_in(-4, 4)).collect::<Vec<_>>());
            let g = cokernel(&a);
            match hnf_order(&a) {
                Some(order) if order <= BigInt::from(200) => {
                    assert_eq!(g.order(), Some(order));
                    checked += 1;
                }
                Some(_) => {}
                None => {
                    assert!(g.free_rank > 0);
                    checked += 1;
                }
            }
        }
    }
}
