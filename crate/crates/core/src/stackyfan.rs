//! Fans, stacky fans and the quotient presentation `[Z/G]`.
//!
//! Rays are implicit: ray `i` is spanned by the image of `b_i` in `N`
//! modulo torsion. Ray index sets are 0-based and stored sorted; set
//! arithmetic uses `u64` masks, which bounds fans at 64 rays.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;

use crate::abgroup::{canonical_matrix, cokernel_of_hom, dual_descriptor, DiagGroup, FgAbGroup, GroupHom};
use crate::error::{Error, Result};
use crate::exactla::{kernel_basis, IntMatrix};
use crate::galedual::{gale_dual, GaleDualResult};

pub const MAX_RAYS: usize = 64;

/// Simplicial fan given by its maximal cones on rays `0..n_rays`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Fan {
    n_rays: usize,
    max_cones: Vec<Vec<usize>>,
}

impl Fan {
    /// Stores the cones sorted and deduplicated; call [`Fan::check`] for
    /// well-formedness.
    pub fn new(n_rays: usize, cones: Vec<Vec<usize>>) -> Self {
        let max_cones = cones
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c.dedup();
                c
            })
            .collect();
        Fan { n_rays, max_cones }
    }

    /// Complete fan of the projective line: cones `{0}` and `{1}`.
    pub fn projective_line() -> Self {
        Fan::new(2, vec![vec![0], vec![1]])
    }

    /// Fan of `P^{n-1}` style combinatorics: all `(n-1)`-subsets of `n` rays.
    pub fn simplex_boundary(n: usize) -> Self {
        let cones = (0..n).map(|skip| (0..n).filter(|&i| i != skip).collect()).collect();
        Fan::new(n, cones)
    }

    pub fn n_rays(&self) -> usize {
        self.n_rays
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    pub fn check(&self) -> Vec<FanDiagnostic> {
        let mut diags = Vec::new();
        if self.n_rays > MAX_RAYS {
            diags.push(FanDiagnostic::TooManyRays { n: self.n_rays });
            return diags;
        }
        for (c, cone) in self.max_cones.iter().enumerate() {
            for &i in cone {
                if i >= self.n_rays {
                    diags.push(FanDiagnostic::IndexOutOfRange { cone: c, index: i });
                }
            }
        }
        if !diags.is_empty() {
            return diags;
        }
        let masks = self.cone_masks();
        for a in 0..masks.len() {
            for b in 0..masks.len() {
                if a == b {
                    continue;
                }
                let (ma, mb) = (masks[a], masks[b]);
                let nested = ma & !mb == 0;
                // identical cones are reported once, as (earlier, later)
                if nested && (ma != mb || a > b) {
                    diags.push(FanDiagnostic::NestedCones { inner: a, outer: b });
                }
            }
        }
        let covered = masks.iter().fold(0u64, |acc, m| acc | m);
        for ray in 0..self.n_rays {
            if covered & (1 << ray) == 0 {
                diags.push(FanDiagnostic::UnusedRay { ray });
            }
        }
        diags
    }

    pub(crate) fn require_valid(&self) -> Result<()> {
        let diags = self.check();
        if diags.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidFan(diags))
        }
    }

    pub(crate) fn cone_masks(&self) -> Vec<u64> {
        self.max_cones.iter().map(|c| mask_of(c)).collect()
    }

    /// Is `set` contained in some cone?
    pub fn is_face(&self, set: &[usize]) -> bool {
        let m = mask_of(set);
        self.cone_masks().iter().any(|c| m & !c == 0)
    }
}

pub(crate) fn mask_of(set: &[usize]) -> u64 {
    set.iter().fold(0u64, |acc, &i| acc | (1u64 << i))
}

pub(crate) fn set_of(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask & (1u64 << i) != 0).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FanDiagnostic {
    TooManyRays { n: usize },
    IndexOutOfRange { cone: usize, index: usize },
    NestedCones { inner: usize, outer: usize },
    UnusedRay { ray: usize },
    InfiniteCokernel { coker: String },
    ZeroReducedRay { ray: usize },
    DependentCone { cone: usize },
    NotAFace { a: usize, b: usize },
}

impl fmt::Display for FanDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FanDiagnostic::TooManyRays { n } => write!(f, "{n} rays exceeds the limit of {MAX_RAYS}"),
            FanDiagnostic::IndexOutOfRange { cone, index } => {
                write!(f, "cone {cone} uses ray index {index}, which is out of range")
            }
            FanDiagnostic::NestedCones { inner, outer } => {
                write!(f, "cone {inner} is contained in cone {outer}; cones must be maximal")
            }
            FanDiagnostic::UnusedRay { ray } => write!(f, "ray {ray} lies in no cone"),
            FanDiagnostic::InfiniteCokernel { coker } => {
                write!(f, "Coker(β) = {coker} is infinite")
            }
            FanDiagnostic::ZeroReducedRay { ray } => {
                write!(f, "b_{ray} is zero modulo torsion")
            }
            FanDiagnostic::DependentCone { cone } => {
                write!(f, "the rays of cone {cone} are linearly dependent")
            }
            FanDiagnostic::NotAFace { a, b } => {
                write!(f, "cones {a} and {b} do not meet in a common face")
            }
        }
    }
}

impl FanDiagnostic {
    /// Short machine-readable tag.
    pub fn code(&self) -> &'static str {
        match self {
            FanDiagnostic::TooManyRays { .. } => "too_many_rays",
            FanDiagnostic::IndexOutOfRange { .. } => "index_out_of_range",
            FanDiagnostic::NestedCones { .. } => "nested_cones",
            FanDiagnostic::UnusedRay { .. } => "unused_ray",
            FanDiagnostic::InfiniteCokernel { .. } => "infinite_cokernel",
            FanDiagnostic::ZeroReducedRay { .. } => "zero_reduced_ray",
            FanDiagnostic::DependentCone { .. } => "dependent_cone",
            FanDiagnostic::NotAFace { .. } => "not_a_face",
        }
    }
}

/// The triple `(N, Σ, β)`; `β` has source `Z^n` and column `i` is `b_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StackyFan {
    group: FgAbGroup,
    fan: Fan,
    beta: GroupHom,
}

impl StackyFan {
    /// `beta` has one column per ray, in `N`'s coordinates.
    pub fn new(group: FgAbGroup, fan: Fan, beta: IntMatrix) -> Result<Self> {
        if beta.cols() != fan.n_rays() {
            return Err(Error::DimensionMismatch(format!(
                "{} vectors b_i for {} rays",
                beta.cols(),
                fan.n_rays()
            )));
        }
        let beta = GroupHom::new(FgAbGroup::free(fan.n_rays()), group.clone(), beta)?;
        Ok(StackyFan { group, fan, beta })
    }

    pub fn group(&self) -> &FgAbGroup {
        &self.group
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn beta(&self) -> &GroupHom {
        &self.beta
    }

    pub fn n_rays(&self) -> usize {
        self.fan.n_rays()
    }

    /// `d = rank(N)`.
    pub fn rank(&self) -> usize {
        self.group.free_rank()
    }

    /// The vectors `b̄_i` in `N ⊗ Q` (free rows of `β`).
    pub fn reduced_rays(&self) -> IntMatrix {
        let rows: Vec<usize> = (0..self.rank()).collect();
        self.beta.matrix().select_rows(&rows)
    }

    /// Same stacky fan with `β` replaced by its canonical representative
    /// under automorphisms of `N`.
    pub fn canonical(&self) -> StackyFan {
        let m = canonical_matrix(&self.group, self.beta.matrix()).matrix;
        StackyFan::new(self.group.clone(), self.fan.clone(), m).expect("shape unchanged")
    }

    /// Equality of canonical forms.
    pub fn canonically_equal(&self, other: &StackyFan) -> bool {
        self.group == other.group && self.fan == other.fan && self.canonical().beta == other.canonical().beta
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub diagnostics: Vec<FanDiagnostic>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.diagnostics.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidFan(self.diagnostics))
        }
    }
}

/// Checks fan well-formedness, finiteness of `Coker(β)` and simpliciality.
/// With `strict` the pairwise face condition is also checked.
pub fn validate_stacky_fan(x: &StackyFan, strict: bool) -> ValidationReport {
    let mut diagnostics = x.fan.check();
    if !diagnostics.is_empty() {
        return ValidationReport { diagnostics };
    }
    match cokernel_of_hom(&x.beta) {
        Ok((c, _)) if !c.is_finite() => diagnostics.push(FanDiagnostic::InfiniteCokernel { coker: c.to_string() }),
        Ok(_) => {}
        Err(e) => unreachable!("maps out of a free group are well defined: {e}"),
    }
    let rays = x.reduced_rays();
    let zero_rays: BTreeSet<usize> = (0..x.n_rays())
        .filter(|&i| rays.column(i).iter().all(|v| v == &BigInt::from(0)))
        .collect();
    diagnostics.extend(zero_rays.iter().map(|&ray| FanDiagnostic::ZeroReducedRay { ray }));
    for (c, cone) in x.fan.max_cones.iter().enumerate() {
        if cone.iter().any(|i| zero_rays.contains(i)) {
            continue;
        }
        if rays.select_cols(cone).rank() < cone.len() {
            diagnostics.push(FanDiagnostic::DependentCone { cone: c });
        }
    }
    if strict && diagnostics.is_empty() {
        let cones = &x.fan.max_cones;
        for a in 0..cones.len() {
            for b in a + 1..cones.len() {
                if !meet_in_common_face(&rays, &cones[a], &cones[b]) {
                    diagnostics.push(FanDiagnostic::NotAFace { a, b });
                }
            }
        }
    }
    ValidationReport { diagnostics }
}

/// For simplicial cones `σ`, `τ`: is `σ ∩ τ = cone(σ ∩ τ)`?
///
/// Every point of `σ ∩ τ` gives `Σ a_i v_i = Σ b_j v_j` with `a, b ≥ 0`. The
/// solution cone is pointed, so it is generated by its extreme rays, which
/// are the sign-consistent circuits of `[V_σ | -V_τ]`. The intersection is a
/// common face iff no extreme ray uses a ray outside `σ ∩ τ`.
fn meet_in_common_face(rays: &IntMatrix, sigma: &[usize], tau: &[usize]) -> bool {
    let d = rays.rows();
    let mut cols: Vec<(usize, bool)> = sigma.iter().map(|&i| (i, true)).collect();
    cols.extend(tau.iter().map(|&j| (j, false)));
    let k = cols.len();
    let mut a = IntMatrix::zeros(d, k);
    for (c, &(ray, from_sigma)) in cols.iter().enumerate() {
        for r in 0..d {
            let v = rays[(r, ray)].clone();
            a[(r, c)] = if from_sigma { v } else { -v };
        }
    }
    let outside = |c: usize| {
        let (ray, from_sigma) = cols[c];
        if from_sigma {
            !tau.contains(&ray)
        } else {
            !sigma.contains(&ray)
        }
    };
    for support in 1u64..(1u64 << k) {
        let idx = set_of(support);
        let sub = a.select_cols(&idx);
        let ker = kernel_basis(&sub);
        if ker.cols() != 1 {
            continue;
        }
        let v = ker.column(0);
        let zero = BigInt::from(0);
        if v.contains(&zero) {
            continue;
        }
        let positive = v.iter().all(|x| *x > zero);
        let negative = v.iter().all(|x| *x < zero);
        if (positive || negative) && idx.iter().any(|&c| outside(c)) {
            return false;
        }
    }
    true
}

/// One generator per maximal cone: the rays not in it.
pub fn irrelevant_ideal(fan: &Fan) -> Result<Vec<Vec<usize>>> {
    fan.require_valid()?;
    let full = if fan.n_rays == 64 { u64::MAX } else { (1u64 << fan.n_rays) - 1 };
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for m in fan.cone_masks() {
        let comp = full & !m;
        if seen.insert(comp) {
            out.push(set_of(comp));
        }
    }
    Ok(out)
}

/// Minimal ray sets that lie in no single cone, by size then lexicographic.
pub fn primitive_collections(fan: &Fan) -> Result<Vec<Vec<usize>>> {
    fan.require_valid()?;
    let masks = fan.cone_masks();
    let is_face = |s: u64| masks.iter().any(|c| s & !c == 0);
    let max_cone = fan.max_cones.iter().map(Vec::len).max().unwrap_or(0);
    let mut out = Vec::new();
    // a minimal non-face has all its facets as faces, so its size is at
    // most one more than the largest cone
    for size in 1..=(max_cone + 1).min(fan.n_rays) {
        for_each_subset(fan.n_rays, size, &mut |s| {
            if !is_face(s) && set_of(s).iter().all(|&i| is_face(s & !(1u64 << i))) {
                out.push(set_of(s));
            }
        });
    }
    Ok(out)
}

/// Calls `f` on every `size`-subset of `0..n` as a mask, in lexicographic
/// order of the sorted index lists.
pub(crate) fn for_each_subset(n: usize, size: usize, f: &mut dyn FnMut(u64)) {
    fn rec(start: usize, n: usize, left: usize, acc: u64, f: &mut dyn FnMut(u64)) {
        if left == 0 {
            f(acc);
            return;
        }
        for i in start..=n - left {
            rec(i + 1, n, left - 1, acc | (1u64 << i), f);
        }
    }
    if size <= n {
        rec(0, n, size, 0, f);
    }
}

/// Complex codimension of the excluded locus `V`; infinite when `V` is empty.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Codim {
    Finite(usize),
    Infinite,
}

impl fmt::Display for Codim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Codim::Finite(c) => write!(f, "{c}"),
            Codim::Infinite => write!(f, "∞"),
        }
    }
}

pub fn codim_v(fan: &Fan) -> Result<Codim> {
    Ok(primitive_collections(fan)?
        .iter()
        .map(Vec::len)
        .min()
        .map_or(Codim::Infinite, Codim::Finite))
}

/// `[Z/G]` with explicit weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientPresentation {
    pub g: DiagGroup,
    /// rows: torus parameters then cyclic parameters of `G`; columns: rays
    pub weight_matrix: IntMatrix,
    pub mu: DiagGroup,
    pub torus_rank_t: usize,
    pub excluded_codim: Codim,
    pub ideal_generators: Vec<Vec<usize>>,
    pub gale: GaleDualResult,
}

impl QuotientPresentation {
    /// The action in the form `(λ,ζ)·(z_1,...) = (λ^3 z_1, ...)`, 1-based
    /// coordinate names.
    pub fn action_formula(&self) -> String {
        let r = self.g.torus_rank;
        let k = self.g.cyclic_orders.len();
        let mut params: Vec<String> = if r == 1 {
            vec!["λ".into()]
        } else {
            (1..=r).map(|t| format!("λ{t}")).collect()
        };
        if k == 1 {
            params.push("ζ".into());
        } else {
            params.extend((1..=k).map(|j| format!("ζ{j}")));
        }
        let n = self.weight_matrix.cols();
        let coords: Vec<String> = (1..=n).map(|i| format!("z{i}")).collect();
        let images: Vec<String> = (0..n)
            .map(|i| {
                let mut factors = Vec::new();
                for (row, p) in params.iter().enumerate() {
                    let w = &self.weight_matrix[(row, i)];
                    if *w == BigInt::from(0) {
                        continue;
                    }
                    if *w == BigInt::from(1) {
                        factors.push(p.clone());
                    } else {
                        factors.push(format!("{p}^{w}"));
                    }
                }
                factors.push(coords[i].clone());
                factors.join("·")
            })
            .collect();
        let lhs = if params.len() == 1 {
            params[0].clone()
        } else {
            format!("({})", params.join(","))
        };
        format!("{lhs}·({}) = ({})", coords.join(","), images.join(", "))
    }
}

pub fn quotient_presentation(x: &StackyFan) -> Result<QuotientPresentation> {
    validate_stacky_fan(x, false).into_result()?;
    let gale = gale_dual(&x.beta)?;
    Ok(QuotientPresentation {
        g: dual_descriptor(&gale.dg),
        weight_matrix: gale.beta_vee.matrix().clone(),
        mu: gale.mu(),
        torus_rank_t: x.rank(),
        excluded_codim: codim_v(&x.fan)?,
        ideal_generators: irrelevant_ideal(&x.fan)?,
        gale,
    })
}
