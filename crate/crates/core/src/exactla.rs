//! Exact linear algebra over the integers.
//!
//! Every routine works on unbounded integers. The Smith and Hermite normal
//! forms use a fixed pivot rule (smallest nonzero absolute value, ties broken
//! by row-major position) so repeated runs produce identical transforms.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::abgroup::FgAbGroup;
use crate::error::{Error, Result};

/// Dense matrix of unbounded integers, stored row-major.
///
/// Matrices with zero rows or zero columns are legal and stand for the zero
/// map into or out of the trivial group.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(IntMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from row vectors. `cols` is required so that a matrix
    /// with no rows still has a well-defined shape.
    pub fn from_rows(rows: Vec<Vec<BigInt>>, cols: usize) -> Result<Self> {
        let n_rows = rows.len();
        let mut data = Vec::with_capacity(n_rows * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Ok(IntMatrix {
            rows: n_rows,
            cols,
            data,
        })
    }

    /// Builds a matrix from column vectors of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<BigInt>]) -> Result<Self> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::DimensionMismatch(format!(
                    "column {j} has {} entries, expected {rows}",
                    c.len()
                )));
            }
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        Ok(m)
    }

    /// Convenience constructor from small integers. Panics on ragged input;
    /// an empty slice gives the 0x0 matrix.
    pub fn from_i64<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let rows = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        Self::from_rows(rows, cols).expect("ragged matrix literal")
    }

    pub fn column_vector(v: &[BigInt]) -> Self {
        IntMatrix {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hcat(&self, other: &IntMatrix) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "hcat of {} and {} rows",
                self.rows, other.rows
            )));
        }
        let mut m = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                m[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        Ok(m)
    }

    /// Vertical concatenation, `self` on top.
    pub fn vcat(&self, other: &IntMatrix) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "vcat of {} and {} columns",
                self.cols, other.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(IntMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        IntMatrix {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        let mut m = Self::zeros(self.rows, idx.len());
        for i in 0..self.rows {
            for (k, &j) in idx.iter().enumerate() {
                m[(i, k)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn checked_mul(&self, rhs: &IntMatrix) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "product of {}x{} and {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(BigInt::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    pub fn rank(&self) -> usize {
        smith_normal_form(self).rank()
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[target] += k * row[src]
    pub(crate) fn add_row_multiple(&mut self, target: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let s = &self.data[src * self.cols + j] * k;
            self.data[target * self.cols + j] += s;
        }
    }

    /// col[target] += k * col[src]
    pub(crate) fn add_col_multiple(&mut self, target: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let s = &self.data[i * self.cols + src] * k;
            self.data[i * self.cols + target] += s;
        }
    }

    pub(crate) fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let x = &mut self.data[i * self.cols + j];
            *x = -std::mem::take(x);
        }
    }

    pub(crate) fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let x = &mut self.data[i * self.cols + j];
            *x = -std::mem::take(x);
        }
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;

    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;

    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        self.checked_mul(rhs).expect("matrix dimensions")
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix({}x{}, {})", self.rows, self.cols, self)
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// `D = U·A·V` with `U`, `V` unimodular and `D` diagonal with
/// `d_1 | d_2 | ... | d_r`, all positive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SmithDecomposition {
    pub fn rank(&self) -> usize {
        (0..self.d.rows().min(self.d.cols()))
            .take_while(|&i| !self.d[(i, i)].is_zero())
            .count()
    }

    /// The nonzero diagonal entries, in divisibility order.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.rank()).map(|i| self.d[(i, i)].clone()).collect()
    }
}

/// Smith decomposition together with the inverse of the row transform.
pub(crate) struct SmithFull {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub rank: usize,
}

fn smallest_nonzero(a: &IntMatrix, from: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in from..a.rows() {
        for j in from..a.cols() {
            let x = &a[(i, j)];
            if x.is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if a[(bi, bj)].abs() <= x.abs() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

pub(crate) fn smith_full(a: &IntMatrix) -> SmithFull {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut u_inv = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);

    let mut t = 0;
    while t < m.min(n) {
        let Some((pi, pj)) = smallest_nonzero(&d, t) else {
            break;
        };
        d.swap_rows(pi, t);
        u.swap_rows(pi, t);
        u_inv.swap_cols(pi, t);
        d.swap_cols(pj, t);
        v.swap_cols(pj, t);

        let mut dirty = false;
        for i in t + 1..m {
            if d[(i, t)].is_zero() {
                continue;
            }
            let q = d[(i, t)].div_floor(&d[(t, t)]);
            let neg_q = -&q;
            d.add_row_multiple(i, t, &neg_q);
            u.add_row_multiple(i, t, &neg_q);
            u_inv.add_col_multiple(t, i, &q);
            if !d[(i, t)].is_zero() {
                dirty = true;
            }
        }
        for j in t + 1..n {
            if d[(t, j)].is_zero() {
                continue;
            }
            let q = d[(t, j)].div_floor(&d[(t, t)]);
            let neg_q = -&q;
            d.add_col_multiple(j, t, &neg_q);
            v.add_col_multiple(j, t, &neg_q);
            if !d[(t, j)].is_zero() {
                dirty = true;
            }
        }
        if dirty {
            continue;
        }

        let pivot = d[(t, t)].clone();
        let offender = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d[(i, j)].is_multiple_of(&pivot)));
        if let Some(i) = offender {
            let one = BigInt::one();
            d.add_row_multiple(t, i, &one);
            u.add_row_multiple(t, i, &one);
            u_inv.add_col_multiple(i, t, &-one);
            continue;
        }

        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
            u_inv.negate_col(t);
        }
        t += 1;
    }

    SmithFull {
        u,
        u_inv,
        d,
        v,
        rank: t,
    }
}

/// Smith normal form with transforms. Deterministic for a fixed input.
pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let s = smith_full(a);
    SmithDecomposition {
        u: s.u,
        d: s.d,
        v: s.v,
    }
}

/// Row-style Hermite normal form: returns `(H, U)` with `H = U·A`, `U`
/// unimodular, `H` in row echelon form with positive pivots, entries above
/// each pivot reduced into `[0, pivot)` and zero rows at the bottom.
pub fn hermite_normal_form(a: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let (m, n) = (a.rows(), a.cols());
    let mut h = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut r = 0;

    for j in 0..n {
        if r == m {
            break;
        }
        let mut found = false;
        loop {
            let mut best: Option<usize> = None;
            for i in r..m {
                if h[(i, j)].is_zero() {
                    continue;
                }
                match best {
                    Some(b) if h[(b, j)].abs() <= h[(i, j)].abs() => {}
                    _ => best = Some(i),
                }
            }
            let Some(p) = best else {
                break;
            };
            found = true;
            h.swap_rows(p, r);
            u.swap_rows(p, r);
            let mut clean = true;
            for i in r + 1..m {
                if h[(i, j)].is_zero() {
                    continue;
                }
                let q = -h[(i, j)].div_floor(&h[(r, j)]);
                h.add_row_multiple(i, r, &q);
                u.add_row_multiple(i, r, &q);
                if !h[(i, j)].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if !found {
            continue;
        }
        if h[(r, j)].is_negative() {
            h.negate_row(r);
            u.negate_row(r);
        }
        for i in 0..r {
            let q = -h[(i, j)].div_floor(&h[(r, j)]);
            h.add_row_multiple(i, r, &q);
            u.add_row_multiple(i, r, &q);
        }
        r += 1;
    }
    (h, u)
}

/// Some `x` with `A·x = b`, or `None` when `b` is not in the integer column
/// image of `A`.
pub fn solve_in_image(a: &IntMatrix, b: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side of length {} for {} rows",
            b.len(),
            a.rows()
        )));
    }
    let s = smith_full(a);
    let c = s.u.mul_vec(b)?;
    let mut y = vec![BigInt::zero(); a.cols()];
    for (i, ci) in c.iter().enumerate() {
        if i < s.rank {
            let (q, r) = ci.div_rem(&s.d[(i, i)]);
            if !r.is_zero() {
                return Ok(None);
            }
            y[i] = q;
        } else if !ci.is_zero() {
            return Ok(None);
        }
    }
    Ok(Some(s.v.mul_vec(&y)?))
}

/// Columns freely generating `{x : A·x = 0}`, in Hermite-reduced form.
pub fn kernel_basis(a: &IntMatrix) -> IntMatrix {
    let s = smith_full(a);
    let idx: Vec<usize> = (s.rank..a.cols()).collect();
    let k = s.v.select_cols(&idx);
    lattice_basis(&k)
}

/// Hermite-reduced basis of the lattice spanned by the columns of `gens`.
pub(crate) fn lattice_basis(gens: &IntMatrix) -> IntMatrix {
    let (h, _) = hermite_normal_form(&gens.transpose());
    let nonzero: Vec<usize> = (0..h.rows()).filter(|&i| h.row(i).iter().any(|x| !x.is_zero())).collect();
    h.select_rows(&nonzero).transpose()
}

/// Cokernel data: canonical group, projection onto canonical coordinates and
/// lifts of the canonical generators.
pub(crate) struct CokernelData {
    pub group: FgAbGroup,
    /// rows = canonical coordinates (free first, then torsion), columns = `Z^rows(A)`
    pub projection: IntMatrix,
    /// column k lifts canonical generator k back to `Z^rows(A)`
    pub lift: IntMatrix,
}

pub(crate) fn cokernel_full(a: &IntMatrix) -> CokernelData {
    let m = a.rows();
    let s = smith_full(a);
    let mut free_idx: Vec<usize> = (s.rank..m).collect();
    let mut torsion_idx = Vec::new();
    let mut torsion = Vec::new();
    for i in 0..s.rank {
        let di = &s.d[(i, i)];
        if !di.is_one() {
            torsion_idx.push(i);
            torsion.push(di.clone());
        }
    }
    let free_rank = free_idx.len();
    let mut rows_idx = std::mem::take(&mut free_idx);
    rows_idx.extend(torsion_idx.iter().copied());

    let mut projection = s.u.select_rows(&rows_idx);
    for (k, d) in torsion.iter().enumerate() {
        let r = free_rank + k;
        for j in 0..m {
            projection[(r, j)] = projection[(r, j)].mod_floor(d);
        }
    }
    let lift = s.u_inv.select_cols(&rows_idx);
    let group = FgAbGroup::new(free_rank, torsion).expect("smith diagonal is a divisibility chain");
    CokernelData {
        group,
        projection,
        lift,
    }
}

/// Canonical form of `Z^rows(A) / im(A)` together with the projection onto
/// canonical coordinates.
pub fn cokernel(a: &IntMatrix) -> (FgAbGroup, IntMatrix) {
    let c = cokernel_full(a);
    (c.group, c.projection)
}

/// Presentation matrix reduced to a diagonal form without enforcing the
/// divisibility chain. Relators are processed in column order, so a block
/// presentation keeps its blocks' orders in sequence.
pub(crate) struct DiagonalForm {
    /// nonunit orders, in the order their relators were processed
    pub orders: Vec<BigInt>,
    pub free_rank: usize,
    /// rows = coordinates (free first, then the cyclic factors of `orders`)
    pub projection: IntMatrix,
}

pub(crate) fn diagonal_form(a: &IntMatrix) -> DiagonalForm {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut used = vec![false; m];
    let mut pivots: Vec<(usize, BigInt)> = Vec::new();

    for j in 0..n {
        loop {
            let mut best: Option<usize> = None;
            for i in (0..m).filter(|&i| !used[i]) {
                if d[(i, j)].is_zero() {
                    continue;
                }
                match best {
                    Some(b) if d[(b, j)].abs() <= d[(i, j)].abs() => {}
                    _ => best = Some(i),
                }
            }
            let Some(p) = best else {
                break;
            };
            let mut clean = true;
            for i in (0..m).filter(|&i| !used[i] && i != p) {
                if d[(i, j)].is_zero() {
                    continue;
                }
                let q = -d[(i, j)].div_floor(&d[(p, j)]);
                d.add_row_multiple(i, p, &q);
                u.add_row_multiple(i, p, &q);
                if !d[(i, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // Column j now has a single entry among unused rows; fold the
            // pivot row's later entries into column j by gcd steps.
            let mut settled = true;
            for k in j + 1..n {
                if d[(p, k)].is_zero() {
                    continue;
                }
                let (x, y) = (d[(p, j)].clone(), d[(p, k)].clone());
                let e = x.extended_gcd(&y);
                if y.is_multiple_of(&x) {
                    let q = -(&y / &x);
                    d.add_col_multiple(k, j, &q);
                } else {
                    // [x y] -> [g 0] via a unimodular 2x2 column transform
                    let (xg, yg) = (&x / &e.gcd, &y / &e.gcd);
                    for i in 0..m {
                        let cj = d[(i, j)].clone();
                        let ck = d[(i, k)].clone();
                        d[(i, j)] = &e.x * &cj + &e.y * &ck;
                        d[(i, k)] = &xg * &ck - &yg * &cj;
                    }
                    settled = false;
                }
            }
            if settled {
                used[p] = true;
                pivots.push((p, d[(p, j)].abs()));
                break;
            }
        }
    }

    let free_rows: Vec<usize> = (0..m).filter(|&i| !used[i]).collect();
    let mut orders = Vec::new();
    let mut tors_rows = Vec::new();
    for (p, v) in pivots {
        if !v.is_one() {
            tors_rows.push(p);
            orders.push(v);
        }
    }
    let free_rank = free_rows.len();
    let mut idx = free_rows;
    idx.extend(tors_rows);
    let mut projection = u.select_rows(&idx);
    for (k, o) in orders.iter().enumerate() {
        for c in 0..m {
            projection[(free_rank + k, c)] = projection[(free_rank + k, c)].mod_floor(o);
        }
    }
    DiagonalForm {
        orders,
        free_rank,
        projection,
    }
}
