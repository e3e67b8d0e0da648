//! Finitely generated abelian groups and homomorphisms between them.
//!
//! Groups are kept in canonical form `Z^r ⊕ Z/d_1 ⊕ ... ⊕ Z/d_k` with
//! `d_1 | d_2 | ... | d_k`. Element coordinates list the free part first and
//! torsion coordinates are reduced into `[0, d_i)`. Homomorphisms carry an
//! integer matrix acting on generator lifts; well-definedness is a separate
//! check because the Gale dual construction produces raw matrices first.

mod canon;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactla::{self, IntMatrix};

pub use canon::{canonical_matrix, CanonicalForm};
pub(crate) use canon::display_matrix;

/// Canonical form of a finitely generated abelian group.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FgAbGroup {
    free_rank: usize,
    torsion: Vec<BigInt>,
}

impl FgAbGroup {
    /// Fails unless every torsion factor is at least 2 and each divides the
    /// next.
    pub fn new(free_rank: usize, torsion: Vec<BigInt>) -> Result<Self> {
        if let Some(t) = torsion.iter().find(|t| *t < &BigInt::from(2)) {
            return Err(Error::InvalidGroup(format!("torsion factor {t} is below 2")));
        }
        for w in torsion.windows(2) {
            if !w[1].is_multiple_of(&w[0]) {
                return Err(Error::InvalidGroup(format!(
                    "torsion factors {} and {} are not a divisibility chain",
                    w[0], w[1]
                )));
            }
        }
        Ok(FgAbGroup { free_rank, torsion })
    }

    pub fn free(rank: usize) -> Self {
        FgAbGroup {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    pub fn trivial() -> Self {
        Self::free(0)
    }

    /// `Z/m`; `m = 1` gives the trivial group and `m = 0` gives `Z`.
    pub fn cyclic(m: impl Into<BigInt>) -> Self {
        let m: BigInt = m.into();
        if m.is_zero() {
            Self::free(1)
        } else if m.abs().is_one() {
            Self::trivial()
        } else {
            FgAbGroup {
                free_rank: 0,
                torsion: vec![m.abs()],
            }
        }
    }

    /// Canonical form of `Z^r ⊕ Z/o_1 ⊕ ... ⊕ Z/o_k` for arbitrary orders
    /// (zero means a free factor, one is dropped).
    pub fn from_orders(free_rank: usize, orders: &[BigInt]) -> Self {
        let n = free_rank + orders.len();
        let mut rel = IntMatrix::zeros(n, orders.len());
        for (k, o) in orders.iter().enumerate() {
            rel[(free_rank + k, k)] = o.clone();
        }
        exactla::cokernel(&rel).0
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn num_generators(&self) -> usize {
        self.free_rank + self.torsion.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.num_generators() == 0
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Group order, or `None` for an infinite group.
    pub fn order(&self) -> Option<BigInt> {
        self.is_finite()
            .then(|| self.torsion.iter().fold(BigInt::one(), |acc, t| acc * t))
    }

    /// Relation matrix on the generators: the torsion factors embedded
    /// diagonally below the free block.
    pub fn relation_matrix(&self) -> IntMatrix {
        let mut q = IntMatrix::zeros(self.num_generators(), self.torsion.len());
        for (k, t) in self.torsion.iter().enumerate() {
            q[(self.free_rank + k, k)] = t.clone();
        }
        q
    }

    pub fn presentation(&self) -> PresentedGroup {
        PresentedGroup {
            generators: self.num_generators(),
            relations: self.relation_matrix(),
        }
    }

    /// Reduces torsion coordinates into `[0, d)`.
    pub fn reduce(&self, v: &mut [BigInt]) {
        for (k, t) in self.torsion.iter().enumerate() {
            let x = &mut v[self.free_rank + k];
            *x = x.mod_floor(t);
        }
    }

    pub fn reduced(&self, v: &[BigInt]) -> Vec<BigInt> {
        let mut out = v.to_vec();
        self.reduce(&mut out);
        out
    }

    /// Reduces every column of `m`, read as elements of this group.
    pub fn reduce_columns(&self, m: &mut IntMatrix) {
        for (k, t) in self.torsion.iter().enumerate() {
            let i = self.free_rank + k;
            for j in 0..m.cols() {
                m[(i, j)] = m[(i, j)].mod_floor(t);
            }
        }
    }

    pub fn is_zero_element(&self, v: &[BigInt]) -> bool {
        v.len() == self.num_generators()
            && v[..self.free_rank].iter().all(Zero::is_zero)
            && self.torsion.iter().enumerate().all(|(k, t)| v[self.free_rank + k].is_multiple_of(t))
    }

    pub fn elements_equal(&self, a: &[BigInt], b: &[BigInt]) -> bool {
        a.len() == b.len() && self.reduced(a) == self.reduced(b)
    }

    /// Torsion-free quotient `Z^r`.
    pub fn free_part(&self) -> FgAbGroup {
        Self::free(self.free_rank)
    }
}

impl fmt::Display for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        format_group(f, self.free_rank, &self.torsion)
    }
}

pub(crate) fn format_group(f: &mut impl fmt::Write, free_rank: usize, torsion: &[BigInt]) -> fmt::Result {
    let mut parts = Vec::new();
    match free_rank {
        0 => {}
        1 => parts.push("ℤ".to_string()),
        r => parts.push(format!("ℤ^{r}")),
    }
    parts.extend(torsion.iter().map(|t| format!("ℤ/{t}")));
    if parts.is_empty() {
        write!(f, "0")
    } else {
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

/// `Z^generators / column-image(relations)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PresentedGroup {
    pub generators: usize,
    pub relations: IntMatrix,
}

/// Result of [`normalize`]: the canonical group plus mutually inverse
/// coordinate changes.
#[derive(Clone, Debug)]
pub struct Normalized {
    pub group: FgAbGroup,
    /// canonical coordinates of each presentation generator
    pub to_canonical: IntMatrix,
    /// presentation-coordinate lift of each canonical generator
    pub from_canonical: IntMatrix,
}

pub fn normalize(g: &PresentedGroup) -> Result<Normalized> {
    if g.relations.rows() != g.generators {
        return Err(Error::DimensionMismatch(format!(
            "relation matrix has {} rows for {} generators",
            g.relations.rows(),
            g.generators
        )));
    }
    let c = exactla::cokernel_full(&g.relations);
    Ok(Normalized {
        group: c.group,
        to_canonical: c.projection,
        from_canonical: c.lift,
    })
}

/// Homomorphism between canonical groups, given on generator lifts:
/// column `j` is the image of source generator `j` in target coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupHom {
    source: FgAbGroup,
    target: FgAbGroup,
    matrix: IntMatrix,
}

impl GroupHom {
    /// Checks dimensions only and reduces torsion coordinates; use
    /// [`hom_well_defined`] for the relation check.
    pub fn new(source: FgAbGroup, target: FgAbGroup, mut matrix: IntMatrix) -> Result<Self> {
        if matrix.rows() != target.num_generators() || matrix.cols() != source.num_generators() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for a map {} -> {}",
                matrix.rows(),
                matrix.cols(),
                source,
                target
            )));
        }
        target.reduce_columns(&mut matrix);
        Ok(GroupHom {
            source,
            target,
            matrix,
        })
    }

    /// Like [`GroupHom::new`] but rejects maps that do not respect relations.
    pub fn checked(source: FgAbGroup, target: FgAbGroup, matrix: IntMatrix) -> Result<Self> {
        let f = Self::new(source, target, matrix)?;
        if !hom_well_defined(&f)? {
            return Err(Error::IllDefinedHom(format!(
                "{} does not map the relations of {} into those of {}",
                f.matrix, f.source, f.target
            )));
        }
        Ok(f)
    }

    pub fn identity(g: &FgAbGroup) -> Self {
        GroupHom {
            source: g.clone(),
            target: g.clone(),
            matrix: IntMatrix::identity(g.num_generators()),
        }
    }

    pub fn zero(source: &FgAbGroup, target: &FgAbGroup) -> Self {
        GroupHom {
            source: source.clone(),
            target: target.clone(),
            matrix: IntMatrix::zeros(target.num_generators(), source.num_generators()),
        }
    }

    pub fn source(&self) -> &FgAbGroup {
        &self.source
    }

    pub fn target(&self) -> &FgAbGroup {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &[BigInt]) -> Result<Vec<BigInt>> {
        let mut y = self.matrix.mul_vec(x)?;
        self.target.reduce(&mut y);
        Ok(y)
    }

    /// `[matrix | target relations]`; its column image is the image of the
    /// map plus the target relations.
    fn image_lattice(&self) -> IntMatrix {
        self.matrix
            .hcat(&self.target.relation_matrix())
            .expect("row counts agree")
    }

    /// True when `y` (target coordinates) lies in the image.
    pub fn image_contains(&self, y: &[BigInt]) -> Result<bool> {
        Ok(exactla::solve_in_image(&self.image_lattice(), y)?.is_some())
    }

    /// Same map with the matrix replaced by its canonical representative
    /// under automorphisms of the target.
    pub fn canonicalized(&self) -> Self {
        let m = canonical_matrix(&self.target, &self.matrix).matrix;
        GroupHom {
            source: self.source.clone(),
            target: self.target.clone(),
            matrix: m,
        }
    }
}

pub fn hom_well_defined(f: &GroupHom) -> Result<bool> {
    let q_target = f.target.relation_matrix();
    let q_source = f.source.relation_matrix();
    let images = f.matrix.checked_mul(&q_source)?;
    for j in 0..images.cols() {
        if exactla::solve_in_image(&q_target, &images.column(j))?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `g ∘ f`: apply `f` first.
pub fn compose(f: &GroupHom, g: &GroupHom) -> Result<GroupHom> {
    if f.target != g.source {
        return Err(Error::GroupMismatch(format!(
            "cannot follow a map into {} by a map out of {}",
            f.target, g.source
        )));
    }
    let m = g.matrix.checked_mul(&f.matrix)?;
    GroupHom::new(f.source.clone(), g.target.clone(), m)
}

fn require_well_defined(f: &GroupHom) -> Result<()> {
    if hom_well_defined(f)? {
        Ok(())
    } else {
        Err(Error::IllDefinedHom(format!("{} : {} -> {}", f.matrix, f.source, f.target)))
    }
}

/// Canonical kernel and its inclusion into the source.
pub fn kernel_of_hom(f: &GroupHom) -> Result<(FgAbGroup, GroupHom)> {
    require_well_defined(f)?;
    let a = f.source.num_generators();
    // Lifts x with f(x) in the target relations.
    let k = exactla::kernel_basis(&f.image_lattice());
    let top: Vec<usize> = (0..a).collect();
    let x = exactla::lattice_basis(&k.select_rows(&top));
    // Relations among those lifts: z with x·z in the source relations.
    let q_a = f.source.relation_matrix();
    let rel_k = exactla::kernel_basis(&x.hcat(&q_a)?);
    let rel = rel_k.select_rows(&(0..x.cols()).collect::<Vec<_>>());
    let c = exactla::cokernel_full(&rel);
    let inclusion = x.checked_mul(&c.lift)?;
    let inc = GroupHom::new(c.group.clone(), f.source.clone(), inclusion)?;
    Ok((c.group, inc))
}

/// Canonical cokernel and the projection onto it.
pub fn cokernel_of_hom(f: &GroupHom) -> Result<(FgAbGroup, GroupHom)> {
    require_well_defined(f)?;
    let c = exactla::cokernel_full(&f.image_lattice());
    let proj = GroupHom::new(f.target.clone(), c.group.clone(), c.projection)?;
    Ok((c.group, proj))
}

/// True iff `image(f) = kernel(g)` inside the middle group.
pub fn is_exact_at(f: &GroupHom, g: &GroupHom) -> Result<bool> {
    if f.target != g.source {
        return Err(Error::GroupMismatch(format!(
            "sequence {} -> {} | {} -> {} does not meet",
            f.source, f.target, g.source, g.target
        )));
    }
    let gf = compose(f, g)?;
    for j in 0..gf.matrix.cols() {
        if !gf.target.is_zero_element(&gf.matrix.column(j)) {
            return Ok(false);
        }
    }
    let (_, inc) = kernel_of_hom(g)?;
    for j in 0..inc.matrix.cols() {
        if !f.image_contains(&inc.matrix.column(j))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff `f` is injective (exactness of `0 -> A -> B`).
pub fn is_injective(f: &GroupHom) -> Result<bool> {
    Ok(kernel_of_hom(f)?.0.is_trivial())
}

/// True iff `f` is surjective (exactness of `A -> B -> 0`).
pub fn is_surjective(f: &GroupHom) -> Result<bool> {
    Ok(cokernel_of_hom(f)?.0.is_trivial())
}

/// Descriptor of a diagonalizable group `Hom(A, C^×)`: a torus of
/// dimension `torus_rank` times cyclic groups `μ_m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DiagGroup {
    pub torus_rank: usize,
    pub cyclic_orders: Vec<BigInt>,
}

impl DiagGroup {
    pub fn order_of_finite_part(&self) -> BigInt {
        self.cyclic_orders.iter().fold(BigInt::one(), |acc, m| acc * m)
    }

    pub fn is_trivial(&self) -> bool {
        self.torus_rank == 0 && self.cyclic_orders.is_empty()
    }

    /// Character group this descriptor came from.
    pub fn character_group(&self) -> FgAbGroup {
        FgAbGroup::new(self.torus_rank, self.cyclic_orders.clone())
            .expect("descriptor orders form a divisibility chain")
    }
}

impl fmt::Display for DiagGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.torus_rank {
            0 => {}
            1 => parts.push("ℂ^×".to_string()),
            r => parts.push(format!("(ℂ^×)^{r}")),
        }
        parts.extend(self.cyclic_orders.iter().map(|m| format!("μ_{m}")));
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" × "))
        }
    }
}

/// Pontryagin-dual bookkeeping: `Hom(g, C^×)` as a descriptor.
pub fn dual_descriptor(g: &FgAbGroup) -> DiagGroup {
    DiagGroup {
        torus_rank: g.free_rank,
        cyclic_orders: g.torsion.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn grp(rank: usize, torsion: &[i64]) -> FgAbGroup {
        FgAbGroup::new(rank, torsion.iter().map(|&t| bi(t)).collect()).unwrap()
    }

    fn hom(s: &FgAbGroup, t: &FgAbGroup, rows: &[&[i64]]) -> GroupHom {
        let m = if rows.is_empty() {
            IntMatrix::zeros(0, s.num_generators())
        } else {
            IntMatrix::from_i64(rows)
        };
        GroupHom::new(s.clone(), t.clone(), m).unwrap()
    }

    #[test]
    fn group_constructor_rejects_bad_torsion() {
        assert!(FgAbGroup::new(0, vec![bi(1)]).is_err());
        assert!(FgAbGroup::new(0, vec![bi(2), bi(3)]).is_err());
        assert!(FgAbGroup::new(1, vec![bi(2), bi(6)]).is_ok());
    }

    #[test]
    fn normalize_examples() {
        // Z^2 / <(0,3)>
        let g = PresentedGroup {
            generators: 2,
            relations: IntMatrix::from_i64(&[[0], [3]]),
        };
        let n = normalize(&g).unwrap();
        assert_eq!(n.group, grp(1, &[3]));

        // Z^3 / <3(e1+e2), 2 e3> = Z ⊕ Z/6
        let g = PresentedGroup {
            generators: 3,
            relations: IntMatrix::from_i64(&[[3, 0], [3, 0], [0, 2]]),
        };
        let n = normalize(&g).unwrap();
        assert_eq!(n.group, grp(1, &[6]));
        let round = &n.to_canonical * &n.from_canonical;
        let mut id = round.clone();
        n.group.reduce_columns(&mut id);
        assert_eq!(id, IntMatrix::identity(2));

        let g = PresentedGroup {
            generators: 3,
            relations: IntMatrix::zeros(3, 0),
        };
        assert_eq!(normalize(&g).unwrap().group, FgAbGroup::free(3));
    }

    #[test]
    fn well_definedness() {
        let z = FgAbGroup::free(1);
        let z3 = grp(0, &[3]);
        let z2 = grp(0, &[2]);
        assert!(hom_well_defined(&hom(&z, &z3, &[&[1]])).unwrap());
        assert!(!hom_well_defined(&hom(&z2, &z, &[&[1]])).unwrap());
        let n = grp(1, &[3]);
        let beta = hom(&FgAbGroup::free(2), &n, &[&[1, -1], &[0, 1]]);
        assert!(hom_well_defined(&beta).unwrap());
    }

    #[test]
    fn compose_examples() {
        let z = FgAbGroup::free(1);
        let z2 = FgAbGroup::free(2);
        let bv = hom(&z2, &z, &[&[3, 3]]);
        let p = hom(&z, &z, &[&[2]]);
        assert_eq!(compose(&bv, &p).unwrap().matrix(), &IntMatrix::from_i64(&[[6, 6]]));

        assert_eq!(compose(&bv, &GroupHom::identity(&z)).unwrap(), bv);

        let zz2 = grp(1, &[2]);
        let p = hom(&z, &zz2, &[&[1], &[0]]);
        assert_eq!(
            compose(&bv, &p).unwrap().matrix(),
            &IntMatrix::from_i64(&[[3, 3], [0, 0]])
        );
        assert!(matches!(compose(&p, &bv), Err(Error::GroupMismatch(_))));
    }

    #[test]
    fn kernel_examples() {
        let z = FgAbGroup::free(1);
        let (k, _) = kernel_of_hom(&GroupHom::identity(&z)).unwrap();
        assert!(k.is_trivial());
        let (k, inc) = kernel_of_hom(&GroupHom::zero(&z, &z)).unwrap();
        assert_eq!(k, z);
        assert_eq!(inc.matrix(), &IntMatrix::from_i64(&[[1]]));

        // Z ⊕ Z/6 --(free coordinate)--> Z has kernel Z/6
        let g = grp(1, &[6]);
        let (k, inc) = kernel_of_hom(&hom(&g, &z, &[&[1, 0]])).unwrap();
        assert_eq!(k, grp(0, &[6]));
        assert!(hom_well_defined(&inc).unwrap());

        // Z/4 --x2--> Z/4 has kernel Z/2
        let z4 = grp(0, &[4]);
        let (k, _) = kernel_of_hom(&hom(&z4, &z4, &[&[2]])).unwrap();
        assert_eq!(k, grp(0, &[2]));

        let z2 = grp(0, &[2]);
        assert!(matches!(
            kernel_of_hom(&hom(&z2, &z, &[&[1]])),
            Err(Error::IllDefinedHom(_))
        ));
    }

    #[test]
    fn cokernel_examples() {
        let z = FgAbGroup::free(1);
        let bv = hom(&FgAbGroup::free(2), &z, &[&[3, 3]]);
        assert_eq!(cokernel_of_hom(&bv).unwrap().0, grp(0, &[3]));

        let surj = hom(&FgAbGroup::free(2), &z, &[&[2, 3]]);
        assert!(cokernel_of_hom(&surj).unwrap().0.is_trivial());

        // beta of the Z ⊕ Z/3 example is surjective: (1,0)+(-1,1) = (0,1)
        let n = grp(1, &[3]);
        let beta = hom(&FgAbGroup::free(2), &n, &[&[1, -1], &[0, 1]]);
        assert!(cokernel_of_hom(&beta).unwrap().0.is_trivial());
    }

    #[test]
    fn exactness_examples() {
        let z = FgAbGroup::free(1);
        let z3 = grp(0, &[3]);
        let f = hom(&z, &z, &[&[3]]);
        let g = hom(&z, &z3, &[&[1]]);
        assert!(is_exact_at(&f, &g).unwrap());

        let f = hom(&z, &z, &[&[0]]);
        let g = hom(&z, &z, &[&[1]]);
        assert!(is_exact_at(&f, &g).unwrap());
        let g = hom(&z, &z, &[&[0]]);
        assert!(!is_exact_at(&f, &g).unwrap());

        // image too small: Z -6-> Z -> Z/3
        let f = hom(&z, &z, &[&[6]]);
        let g = hom(&z, &z3, &[&[1]]);
        assert!(!is_exact_at(&f, &g).unwrap());
    }

    #[test]
    fn dual_descriptor_examples() {
        let d = dual_descriptor(&FgAbGroup::free(1));
        assert_eq!((d.torus_rank, d.cyclic_orders.len()), (1, 0));
        let d = dual_descriptor(&grp(0, &[3]));
        assert_eq!(d.cyclic_orders, vec![bi(3)]);
        assert_eq!(d.to_string(), "μ_3");
        assert!(dual_descriptor(&FgAbGroup::trivial()).is_trivial());
        let g = grp(2, &[2, 4]);
        assert_eq!(dual_descriptor(&g).character_group(), g);
    }

    #[test]
    fn display_forms() {
        assert_eq!(grp(1, &[6]).to_string(), "ℤ ⊕ ℤ/6");
        assert_eq!(FgAbGroup::free(3).to_string(), "ℤ^3");
        assert_eq!(FgAbGroup::trivial().to_string(), "0");
        assert_eq!(FgAbGroup::from_orders(1, &[bi(3), bi(2)]), grp(1, &[6]));
    }
}
