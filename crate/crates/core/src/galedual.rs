//! Gale duality for maps `β: Z^n -> N` out of a free group.
//!
//! `N` is presented by its canonical free resolution, `B` is the lift of `β`
//! and `Q` embeds the torsion factors diagonally. Then
//! `DG(β) = coker([B Q]^T)` and `β^∨` is `Z^n ⊂ Z^{n+ℓ}` followed by the
//! quotient map. The result is put in canonical form under automorphisms of
//! `DG(β)`; the Gale dual is only defined up to isomorphism, so equality of
//! two duals always means equality of these canonical forms.

use std::fmt;

use num_bigint::BigInt;

use crate::abgroup::{
    self, canonical_matrix, cokernel_of_hom, dual_descriptor, format_group, is_exact_at,
    is_injective, is_surjective, DiagGroup, FgAbGroup, GroupHom,
};
use crate::error::{Error, Result};
use crate::exactla::{self, IntMatrix};

/// A map written against a diagonal decomposition whose orders are kept in
/// the order they arose (`Z ⊕ Z/3 ⊕ Z/2` rather than `Z ⊕ Z/6`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DisplayMap {
    pub free_rank: usize,
    pub orders: Vec<BigInt>,
    /// rows = display coordinates, columns = source generators
    pub matrix: IntMatrix,
}

impl DisplayMap {
    pub fn group_string(&self) -> String {
        let mut s = String::new();
        format_group(&mut s, self.free_rank, &self.orders).expect("string write");
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaleDualResult {
    /// `DG(β)` in canonical form
    pub dg: FgAbGroup,
    /// `β^∨: Z^n -> DG(β)`, canonical matrix
    pub beta_vee: GroupHom,
    pub coker_beta_vee: FgAbGroup,
    /// rank of `N* = Hom(N, Z)`
    pub n_star_rank: usize,
    /// pre-merge form of `DG(β)` and `β^∨`
    pub display: DisplayMap,
    /// false if the canonical form hit the automorphism search budget
    pub canonical_exact: bool,
}

impl GaleDualResult {
    pub fn mu(&self) -> DiagGroup {
        dual_descriptor(&self.coker_beta_vee)
    }
}

pub fn gale_dual(beta: &GroupHom) -> Result<GaleDualResult> {
    let source = beta.source();
    if !source.torsion().is_empty() {
        return Err(Error::InvalidGroup(format!(
            "Gale dual needs a free source, got {source}"
        )));
    }
    let n = source.free_rank();
    let target = beta.target();
    let b_q = beta.matrix().hcat(&target.relation_matrix())?;
    let presentation = b_q.transpose();

    let coker = exactla::cokernel_full(&presentation);
    let first_n: Vec<usize> = (0..n).collect();
    let raw = coker.projection.select_cols(&first_n);
    let canon = canonical_matrix(&coker.group, &raw);
    let beta_vee = GroupHom::new(FgAbGroup::free(n), coker.group.clone(), canon.matrix)?;
    let (coker_beta_vee, _) = cokernel_of_hom(&beta_vee)?;

    let diag = exactla::diagonal_form(&presentation);
    let display_raw = diag.projection.select_cols(&first_n);
    let display = DisplayMap {
        free_rank: diag.free_rank,
        matrix: abgroup::display_matrix(diag.free_rank, &diag.orders, &display_raw),
        orders: diag.orders,
    };

    Ok(GaleDualResult {
        dg: coker.group,
        beta_vee,
        coker_beta_vee,
        n_star_rank: target.free_rank(),
        display,
        canonical_exact: canon.exact,
    })
}

/// Which four-term sequence a node belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GaleSequence {
    /// `0 -> DG(β)* -> Z^n -> N -> Coker(β) -> 0`
    Beta,
    /// `0 -> N* -> Z^n -> DG(β) -> Coker(β^∨) -> 0`
    BetaVee,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeCheck {
    pub sequence: GaleSequence,
    pub node: &'static str,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaleSequenceReport {
    pub nodes: Vec<NodeCheck>,
}

impl GaleSequenceReport {
    pub fn all_pass(&self) -> bool {
        self.nodes.iter().all(|n| n.pass)
    }
}

impl fmt::Display for GaleSequenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for n in &self.nodes {
            let seq = match n.sequence {
                GaleSequence::Beta => "β",
                GaleSequence::BetaVee => "β^∨",
            };
            writeln!(f, "{seq:>4} at {:<12} {}", n.node, if n.pass { "exact" } else { "FAIL" })?;
        }
        Ok(())
    }
}

/// Transpose of the free rows of `f`: the map `Hom(target, Z) -> Hom(Z^n, Z)`.
fn dual_of_free_part(f: &GroupHom) -> Result<GroupHom> {
    let r = f.target().free_rank();
    let n = f.source().num_generators();
    let rows: Vec<usize> = (0..r).collect();
    let m = f.matrix().select_rows(&rows).transpose();
    GroupHom::new(FgAbGroup::free(r), FgAbGroup::free(n), m)
}

fn four_term_checks(
    sequence: GaleSequence,
    names: [&'static str; 4],
    dual_in: &GroupHom,
    map: &GroupHom,
) -> Result<Vec<NodeCheck>> {
    let (_, proj) = cokernel_of_hom(map)?;
    Ok(vec![
        NodeCheck {
            sequence,
            node: names[0],
            pass: is_injective(dual_in)?,
        },
        NodeCheck {
            sequence,
            node: names[1],
            pass: is_exact_at(dual_in, map)?,
        },
        NodeCheck {
            sequence,
            node: names[2],
            pass: is_exact_at(map, &proj)?,
        },
        NodeCheck {
            sequence,
            node: names[3],
            pass: is_surjective(&proj)?,
        },
    ])
}

/// Checks both defining exact sequences node by node.
pub fn verify_gale_sequences(beta: &GroupHom, result: &GaleDualResult) -> Result<GaleSequenceReport> {
    if beta.source() != result.beta_vee.source() {
        return Err(Error::GroupMismatch(format!(
            "β has source {} but β^∨ has source {}",
            beta.source(),
            result.beta_vee.source()
        )));
    }
    let dg_star = dual_of_free_part(&result.beta_vee)?;
    let n_star = dual_of_free_part(beta)?;
    let mut nodes = four_term_checks(
        GaleSequence::Beta,
        ["DG(β)*", "Z^n", "N", "Coker(β)"],
        &dg_star,
        beta,
    )?;
    nodes.extend(four_term_checks(
        GaleSequence::BetaVee,
        ["N*", "Z^n", "DG(β)", "Coker(β^∨)"],
        &n_star,
        &result.beta_vee,
    )?);
    Ok(GaleSequenceReport { nodes })
}
