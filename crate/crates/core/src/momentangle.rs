//! Cohomology of the coordinate arrangement complement `Z = C^n \ V` with
//! `Z/m` coefficients, through the full-subcomplex decomposition
//!
//! ```text
//! H^p(Z; Z/m) = ⊕_{J ⊆ [n]} H̃^{p-|J|-1}(K_J; Z/m)
//! ```
//!
//! where `K` is the fan's underlying simplicial complex and `K_J` the full
//! subcomplex on `J`. Reduced cohomology uses the augmented chain complex, so
//! the empty complex has `H̃^{-1} = Z/m`; the `J = ∅` term is what gives
//! `H^0(Z) = Z/m`. Faces are `u64` vertex masks.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::abgroup::FgAbGroup;
use crate::error::{Error, Result};
use crate::exactla::{smith_normal_form, IntMatrix};
use crate::stackyfan::{codim_v, for_each_subset, mask_of, set_of, Codim, Fan};

pub const DEFAULT_MAX_VERTICES: usize = 14;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    n: usize,
    facets: Vec<Vec<usize>>,
}

impl SimplicialComplex {
    /// Drops facets contained in others and sorts each facet.
    pub fn new(n: usize, facets: Vec<Vec<usize>>) -> Result<Self> {
        if n > 64 {
            return Err(Error::SizeBound { n, max: 64 });
        }
        let mut masks: Vec<u64> = Vec::new();
        for f in &facets {
            if let Some(&v) = f.iter().find(|&&v| v >= n) {
                return Err(Error::Input(format!("vertex {v} out of range for {n} vertices")));
            }
            masks.push(mask_of(f));
        }
        masks.sort_unstable();
        masks.dedup();
        let maximal: Vec<u64> = masks
            .iter()
            .copied()
            .filter(|&m| !masks.iter().any(|&o| o != m && m & !o == 0))
            .collect();
        let mut facets: Vec<Vec<usize>> = maximal.into_iter().map(set_of).collect();
        facets.sort();
        Ok(SimplicialComplex { n, facets })
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn facets(&self) -> &[Vec<usize>] {
        &self.facets
    }

    fn facet_masks(&self) -> Vec<u64> {
        self.facets.iter().map(|f| mask_of(f)).collect()
    }

    /// Nonempty faces inside `support`, grouped by dimension.
    fn faces_within(&self, support: u64) -> Vec<Vec<u64>> {
        let mut seen = std::collections::BTreeSet::new();
        for f in self.facet_masks() {
            let top = f & support;
            // all subsets of top
            let mut s = top;
            loop {
                if s != 0 {
                    seen.insert(s);
                }
                if s == 0 {
                    break;
                }
                s = (s - 1) & top;
            }
        }
        let mut by_dim: Vec<Vec<u64>> = Vec::new();
        for s in seen {
            let d = s.count_ones() as usize - 1;
            if by_dim.len() <= d {
                by_dim.resize(d + 1, Vec::new());
            }
            by_dim[d].push(s);
        }
        by_dim
    }
}

pub fn underlying_complex(fan: &Fan) -> Result<SimplicialComplex> {
    fan.require_valid()?;
    SimplicialComplex::new(fan.n_rays(), fan.max_cones().to_vec())
}

/// Chain groups of the augmented complex: index 0 holds the empty face,
/// index `i + 1` the `i`-faces.
struct Chains {
    faces: Vec<Vec<u64>>,
}

impl Chains {
    fn new(k: &SimplicialComplex, support: u64) -> Self {
        let mut faces = vec![vec![0u64]];
        faces.extend(k.faces_within(support));
        Chains { faces }
    }

    fn count(&self, dim: i64) -> usize {
        usize::try_from(dim + 1)
            .ok()
            .and_then(|i| self.faces.get(i))
            .map_or(0, Vec::len)
    }

    /// `∂: C_dim -> C_{dim-1}`; rows index `(dim-1)`-faces.
    fn boundary(&self, dim: i64) -> IntMatrix {
        let rows = self.count(dim - 1);
        let cols = self.count(dim);
        let mut m = IntMatrix::zeros(rows, cols);
        if rows == 0 || cols == 0 {
            return m;
        }
        let lower = &self.faces[dim as usize];
        let index: HashMap<u64, usize> = lower.iter().enumerate().map(|(i, &f)| (f, i)).collect();
        for (c, &face) in self.faces[dim as usize + 1].iter().enumerate() {
            for (pos, v) in set_of(face).into_iter().enumerate() {
                let r = index[&(face & !(1u64 << v))];
                m[(r, c)] = if pos % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            }
        }
        m
    }
}

/// Free rank and torsion of `H̃_dim`.
fn reduced_homology(chains: &Chains, dim: i64) -> (usize, Vec<BigInt>) {
    if dim < -1 {
        return (0, Vec::new());
    }
    let out = smith_normal_form(&chains.boundary(dim));
    let into = smith_normal_form(&chains.boundary(dim + 1));
    let rank_out = out.rank();
    let rank_in = into.rank();
    let free = chains.count(dim) - rank_out - rank_in;
    let torsion = into.invariant_factors().into_iter().filter(|d| !d.is_one()).collect();
    (free, torsion)
}

/// `H̃^i(k; Z/m)` by universal coefficients:
/// `Hom(H̃_i, Z/m) ⊕ Ext(H̃_{i-1}, Z/m)`.
pub fn reduced_cohomology(k: &SimplicialComplex, m: &BigInt, i: i64) -> Result<FgAbGroup> {
    let support = if k.n == 64 { u64::MAX } else { (1u64 << k.n) - 1 };
    reduced_cohomology_on(k, support, m, i)
}

fn reduced_cohomology_on(k: &SimplicialComplex, support: u64, m: &BigInt, i: i64) -> Result<FgAbGroup> {
    if *m < BigInt::from(2) {
        return Err(Error::Input(format!("coefficient modulus must be at least 2, got {m}")));
    }
    if i < -1 {
        return Ok(FgAbGroup::trivial());
    }
    let chains = Chains::new(k, support);
    let mut orders = Vec::new();
    let (free, torsion) = reduced_homology(&chains, i);
    orders.extend(std::iter::repeat_n(m.clone(), free));
    orders.extend(torsion.iter().map(|t| t.gcd(m)));
    let (_, torsion_below) = reduced_homology(&chains, i - 1);
    orders.extend(torsion_below.iter().map(|t| t.gcd(m)));
    Ok(FgAbGroup::from_orders(0, &orders))
}

/// `H^p(Z; Z/m)` for the complement of the arrangement cut out by `k`.
pub fn complement_cohomology(k: &SimplicialComplex, m: &BigInt, p: usize, max_n: usize) -> Result<FgAbGroup> {
    if k.n > max_n {
        return Err(Error::SizeBound { n: k.n, max: max_n });
    }
    if *m < BigInt::from(2) {
        return Err(Error::Input(format!("coefficient modulus must be at least 2, got {m}")));
    }
    let mut orders: Vec<BigInt> = Vec::new();
    // only |J| <= p reaches degree >= -1
    for size in 0..=p.min(k.n) {
        let mut failure = None;
        for_each_subset(k.n, size, &mut |j| {
            if failure.is_some() {
                return;
            }
            let degree = p as i64 - size as i64 - 1;
            match reduced_cohomology_on(k, j, m, degree) {
                Ok(g) => orders.extend(g.torsion().iter().cloned()),
                Err(e) => failure = Some(e),
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
    }
    orders.retain(|o| !o.is_zero());
    Ok(FgAbGroup::from_orders(0, &orders))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaReport {
    pub codim: Codim,
    pub modulus: BigInt,
    pub h1: FgAbGroup,
    pub h2: FgAbGroup,
    pub pass: bool,
}

/// `H^1(Z; Z/m) = H^2(Z; Z/m) = 0`?
pub fn verify_lemma(fan: &Fan, m: &BigInt, max_n: usize) -> Result<LemmaReport> {
    let k = underlying_complex(fan)?;
    let codim = codim_v(fan)?;
    let h1 = complement_cohomology(&k, m, 1, max_n)?;
    let h2 = complement_cohomology(&k, m, 2, max_n)?;
    Ok(LemmaReport {
        pass: h1.is_trivial() && h2.is_trivial(),
        codim,
        modulus: m.clone(),
        h1,
        h2,
    })
}

/// Runs [`verify_lemma`] once per invariant factor of a finite `ν`.
pub fn verify_lemma_for_group(fan: &Fan, nu: &FgAbGroup, max_n: usize) -> Result<Vec<LemmaReport>> {
    if !nu.is_finite() {
        return Err(Error::InvalidGroup(format!("coefficients {nu} are not finite")));
    }
    nu.torsion().iter().map(|m| verify_lemma(fan, m, max_n)).collect()
}
