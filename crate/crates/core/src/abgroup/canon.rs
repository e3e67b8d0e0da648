//! Canonical representatives of maps into a canonical group, up to
//! automorphisms of that group.
//!
//! A matrix whose columns are elements of `Z^r ⊕ T` is normalized in three
//! steps: the free rows are put in Hermite form, each torsion row is reduced
//! modulo the free row space plus `d_j·Z^n` (this absorbs every automorphism
//! that adds free coordinates into torsion ones), and finally the torsion
//! rows are minimized lexicographically over `Aut(T)`. The last step is an
//! exhaustive search with pruning; past [`SEARCH_BUDGET`] it falls back to
//! scaling each row by a unit, and the result is flagged as not exact.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::FgAbGroup;
use crate::exactla::{hermite_normal_form, IntMatrix};

/// Number of surjectivity checks allowed in the automorphism search.
pub const SEARCH_BUDGET: usize = 400_000;

const MAX_ORDER: i64 = 1 << 30;
const MAX_ROW_CANDIDATES: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    pub matrix: IntMatrix,
    /// false when the automorphism search was cut short
    pub exact: bool,
}

/// Canonical representative of `m` (rows = coordinates of `target`) under
/// automorphisms of `target`.
pub fn canonical_matrix(target: &FgAbGroup, m: &IntMatrix) -> CanonicalForm {
    assert_eq!(m.rows(), target.num_generators(), "matrix rows must match group generators");
    let r = target.free_rank();
    let prep = prepare(r, target.torsion(), m);
    let Some(prep) = prep else {
        return CanonicalForm {
            matrix: fallback_bigint(r, target.torsion(), m),
            exact: false,
        };
    };
    let (rows, exact) = match full_search(&prep) {
        Some(rows) => (rows, true),
        None => (unit_scaling(&prep), false),
    };
    CanonicalForm {
        matrix: assemble(&prep.free, &rows, m.cols()),
        exact,
    }
}

/// Normal form for a diagonal decomposition whose orders need not form a
/// divisibility chain: free rows in Hermite form, torsion rows reduced and
/// scaled by units only.
pub(crate) fn display_matrix(free_rank: usize, orders: &[BigInt], m: &IntMatrix) -> IntMatrix {
    match prepare(free_rank, orders, m) {
        Some(prep) => assemble(&prep.free, &unit_scaling(&prep), m.cols()),
        None => fallback_bigint(free_rank, orders, m),
    }
}

struct Prepared {
    free: IntMatrix,
    orders: Vec<i64>,
    /// torsion rows reduced mod their order
    rows: Vec<Vec<i64>>,
    /// per torsion row: Hermite basis of (free row space + order·Z^n)
    lattices: Vec<Vec<Vec<i64>>>,
}

fn free_hermite(free_rank: usize, m: &IntMatrix) -> IntMatrix {
    let free = m.select_rows(&(0..free_rank).collect::<Vec<_>>());
    hermite_normal_form(&free).0
}

fn prepare(free_rank: usize, orders: &[BigInt], m: &IntMatrix) -> Option<Prepared> {
    let n = m.cols();
    let free = free_hermite(free_rank, m);
    let mut small_orders = Vec::with_capacity(orders.len());
    for o in orders {
        let o = o.to_i64().filter(|&o| o <= MAX_ORDER)?;
        small_orders.push(o);
    }
    let mut rows = Vec::new();
    let mut lattices = Vec::new();
    for (k, ob) in orders.iter().enumerate() {
        let row = (0..n)
            .map(|c| m[(free_rank + k, c)].mod_floor(ob).to_i64().expect("reduced below order"))
            .collect();
        rows.push(row);
        let mut gens = free.clone();
        let mut scaled = IntMatrix::identity(n);
        for i in 0..n {
            scaled[(i, i)] = ob.clone();
        }
        gens = gens.vcat(&scaled).expect("same width");
        let (h, _) = hermite_normal_form(&gens);
        // Full-rank Hermite basis: pivots on the diagonal dividing the
        // order, every other entry reduced below its column's pivot.
        let basis = (0..n)
            .map(|i| {
                h.row(i)
                    .iter()
                    .map(|x| x.to_i64().expect("bounded by the order"))
                    .collect::<Vec<i64>>()
            })
            .collect::<Vec<_>>();
        lattices.push(basis);
    }
    Some(Prepared {
        free,
        orders: small_orders,
        rows,
        lattices,
    })
}

fn reduce_row(row: &mut [i64], basis: &[Vec<i64>]) {
    for (p, b) in basis.iter().enumerate() {
        let h = b[p];
        let q = row[p].div_euclid(h);
        if q != 0 {
            for (x, y) in row.iter_mut().zip(b).skip(p) {
                *x -= q * y;
            }
        }
    }
}

/// Row `j` of `τ·rows`, reduced, for coefficient vector `c`.
fn combined_row(prep: &Prepared, j: usize, c: &[i64]) -> Vec<i64> {
    let n = prep.rows.first().map_or(0, |r| r.len());
    let o = prep.orders[j] as i128;
    let mut row = vec![0i64; n];
    for (col, x) in row.iter_mut().enumerate() {
        let mut acc: i128 = 0;
        for (i, ci) in c.iter().enumerate() {
            if *ci != 0 {
                acc = (acc + (*ci as i128) * (prep.rows[i][col] as i128)).rem_euclid(o);
            }
        }
        *x = acc as i64;
    }
    reduce_row(&mut row, &prep.lattices[j]);
    row
}

fn unit_scaling(prep: &Prepared) -> Vec<Vec<i64>> {
    let k = prep.orders.len();
    (0..k)
        .map(|j| {
            let o = prep.orders[j];
            let mut best: Option<Vec<i64>> = None;
            let mut c = vec![0i64; k];
            for u in (1..o).filter(|u| u.gcd(&o) == 1) {
                c[j] = u;
                let v = combined_row(prep, j, &c);
                if best.as_ref().is_none_or(|b| v < *b) {
                    best = Some(v);
                }
            }
            best.unwrap_or_else(|| {
                c[j] = 1;
                combined_row(prep, j, &c)
            })
        })
        .collect()
}

fn prime_factors(mut x: i64) -> Vec<i64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= x {
        if x % p == 0 {
            out.push(p);
            while x % p == 0 {
                x /= p;
            }
        }
        p += 1;
    }
    if x > 1 {
        out.push(x);
    }
    out
}

/// Is the partial map given by coefficient rows `c[0..l]` onto
/// `⊕_{j<l} Z/o_j`? Checked prime by prime on `T/pT -> A/pA`.
fn partial_surjective(orders: &[i64], primes: &[i64], coeffs: &[&[i64]]) -> bool {
    let l = coeffs.len();
    for &p in primes {
        let rows: Vec<usize> = (0..l).filter(|&j| orders[j] % p == 0).collect();
        if rows.is_empty() {
            continue;
        }
        let cols: Vec<usize> = (0..orders.len()).filter(|&i| orders[i] % p == 0).collect();
        let mut mat: Vec<Vec<i64>> = rows
            .iter()
            .map(|&j| cols.iter().map(|&i| coeffs[j][i].rem_euclid(p)).collect())
            .collect();
        if rank_mod_p(&mut mat, p) < rows.len() {
            return false;
        }
    }
    true
}

fn rank_mod_p(m: &mut [Vec<i64>], p: i64) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| m[r][c] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = mod_inverse(m[rank][c], p);
        for x in m[rank].iter_mut() {
            *x = (*x * inv).rem_euclid(p);
        }
        for r in 0..rows {
            if r != rank && m[r][c] != 0 {
                let f = m[r][c];
                for cc in 0..cols {
                    m[r][cc] = (m[r][cc] - f * m[rank][cc]).rem_euclid(p);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn mod_inverse(a: i64, p: i64) -> i64 {
    let e = a.extended_gcd(&p);
    e.x.rem_euclid(p)
}

/// Candidate τ-rows for coordinate `j`, grouped by the row they produce and
/// sorted ascending.
fn row_candidates(prep: &Prepared, j: usize) -> Option<Vec<(Vec<i64>, Vec<Vec<i64>>)>> {
    let k = prep.orders.len();
    let oj = prep.orders[j];
    let choices: Vec<(i64, i64)> = (0..k)
        .map(|i| {
            let g = prep.orders[i].gcd(&oj);
            (g, oj / g)
        })
        .collect();
    let total = choices
        .iter()
        .try_fold(1usize, |acc, (g, _)| acc.checked_mul(*g as usize))?;
    if total > MAX_ROW_CANDIDATES {
        return None;
    }
    let mut all: Vec<(Vec<i64>, Vec<i64>)> = Vec::with_capacity(total);
    let mut idx = vec![0i64; k];
    loop {
        let c: Vec<i64> = idx.iter().zip(&choices).map(|(t, (_, step))| t * step).collect();
        // the coordinate function must itself be onto Z/o_j
        let g = c.iter().fold(oj, |acc, x| acc.gcd(x));
        if g == 1 {
            all.push((combined_row(prep, j, &c), c));
        }
        let mut pos = 0;
        loop {
            if pos == k {
                break;
            }
            idx[pos] += 1;
            if idx[pos] < choices[pos].0 {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
        if pos == k {
            break;
        }
    }
    all.sort();
    let mut grouped: Vec<(Vec<i64>, Vec<Vec<i64>>)> = Vec::new();
    for (v, c) in all {
        match grouped.last_mut() {
            Some((last, cs)) if *last == v => cs.push(c),
            _ => grouped.push((v, vec![c])),
        }
    }
    Some(grouped)
}

fn full_search(prep: &Prepared) -> Option<Vec<Vec<i64>>> {
    let k = prep.orders.len();
    if k == 0 {
        return Some(Vec::new());
    }
    let mut levels = Vec::with_capacity(k);
    for j in 0..k {
        levels.push(row_candidates(prep, j)?);
    }
    let mut primes: Vec<i64> = prep.orders.iter().flat_map(|&o| prime_factors(o)).collect();
    primes.sort_unstable();
    primes.dedup();
    let mut budget = SEARCH_BUDGET;
    let mut chosen = Vec::with_capacity(k);
    match descend(prep, &levels, &primes, vec![Vec::new()], &mut chosen, &mut budget) {
        Ok(true) => Some(chosen),
        _ => None,
    }
}

struct Exhausted;

fn descend(
    prep: &Prepared,
    levels: &[Vec<(Vec<i64>, Vec<Vec<i64>>)>],
    primes: &[i64],
    partials: Vec<Vec<Vec<i64>>>,
    chosen: &mut Vec<Vec<i64>>,
    budget: &mut usize,
) -> Result<bool, Exhausted> {
    let level = chosen.len();
    if level == levels.len() {
        return Ok(!partials.is_empty());
    }
    for (value, coeffs) in &levels[level] {
        let mut next = Vec::new();
        for p in &partials {
            for c in coeffs {
                if *budget == 0 {
                    return Err(Exhausted);
                }
                *budget -= 1;
                let mut ext = p.clone();
                ext.push(c.clone());
                let refs: Vec<&[i64]> = ext.iter().map(|r| r.as_slice()).collect();
                if partial_surjective(&prep.orders, primes, &refs) {
                    next.push(ext);
                }
            }
        }
        if next.is_empty() {
            continue;
        }
        chosen.push(value.clone());
        if descend(prep, levels, primes, next, chosen, budget)? {
            return Ok(true);
        }
        chosen.pop();
    }
    Ok(false)
}

fn assemble(free: &IntMatrix, rows: &[Vec<i64>], n: usize) -> IntMatrix {
    let tors = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let tors = IntMatrix::from_rows(tors, n).expect("row width");
    free.vcat(&tors).expect("same width")
}

/// Orders too large for the small-integer search: Hermite free rows and
/// torsion rows reduced modulo the free row space only.
fn fallback_bigint(free_rank: usize, orders: &[BigInt], m: &IntMatrix) -> IntMatrix {
    let n = m.cols();
    let free = free_hermite(free_rank, m);
    let mut out = free.clone();
    for (k, o) in orders.iter().enumerate() {
        let mut gens = free.clone();
        let mut scaled = IntMatrix::identity(n);
        for i in 0..n {
            scaled[(i, i)] = o.clone();
        }
        gens = gens.vcat(&scaled).expect("same width");
        let (h, _) = hermite_normal_form(&gens);
        let mut row: Vec<BigInt> = m.row(free_rank + k).to_vec();
        for p in 0..n {
            let piv = &h[(p, p)];
            if piv.is_zero() {
                continue;
            }
            let q = row[p].div_floor(piv);
            for c in p..n {
                row[c] -= &q * &h[(p, c)];
            }
        }
        let r = IntMatrix::from_rows(vec![row], n).expect("row width");
        out = out.vcat(&r).expect("same width");
    }
    out
}
