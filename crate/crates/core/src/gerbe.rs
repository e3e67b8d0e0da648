//! Gerbes from abelian central extensions `1 -> ν -> G̃ -> G -> 1`.
//!
//! Extensions are given on the character side as an injection
//! `p: DG(β) -> D̃` with finite cokernel; `ν` is dual to `Coker(p)`. The new
//! stacky fan is the Gale dual of `p ∘ β^∨`, on the same fan.

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::abgroup::{
    cokernel_of_hom, compose, dual_descriptor, hom_well_defined, is_exact_at, is_injective, is_surjective,
    DiagGroup, FgAbGroup, GroupHom,
};
use crate::error::{Error, Result};
use crate::exactla::{solve_in_image, IntMatrix};
use crate::galedual::{gale_dual, verify_gale_sequences, DisplayMap, GaleDualResult};
use crate::stackyfan::{validate_stacky_fan, StackyFan};

/// Dual form of a central extension: `p: DG(β) -> D̃`, `D̃` dual to `G̃`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionSpec {
    pub p: GroupHom,
}

impl ExtensionSpec {
    pub fn new(p: GroupHom) -> Self {
        ExtensionSpec { p }
    }

    /// The trivial extension of the fan's group `G`.
    pub fn identity(x: &StackyFan) -> Result<Self> {
        let gd = gale_dual(x.beta())?;
        Ok(ExtensionSpec::new(GroupHom::identity(&gd.dg)))
    }

    /// `matrix` has one column per canonical generator of `DG(β)`.
    pub fn for_fan(x: &StackyFan, target: FgAbGroup, matrix: IntMatrix) -> Result<Self> {
        let gd = gale_dual(x.beta())?;
        Ok(ExtensionSpec::new(GroupHom::new(gd.dg, target, matrix)?))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ExtensionError {
    #[error("extension starts at {found} but DG(β) = {expected}")]
    SourceMismatch { expected: String, found: String },
    #[error("p does not respect the relations of its source")]
    IllDefined,
    #[error("p is not injective (kernel {kernel})")]
    NotInjective { kernel: String },
    #[error("Coker(p) = {coker} is infinite, so ν is not finite")]
    InfiniteCokernel { coker: String },
}

impl From<ExtensionError> for Error {
    fn from(e: ExtensionError) -> Self {
        Error::InvalidExtension(e)
    }
}

fn check_extension(dg: &FgAbGroup, spec: &ExtensionSpec) -> Result<DiagGroup> {
    let p = &spec.p;
    if p.source() != dg {
        return Err(ExtensionError::SourceMismatch {
            expected: dg.to_string(),
            found: p.source().to_string(),
        }
        .into());
    }
    if !hom_well_defined(p)? {
        return Err(ExtensionError::IllDefined.into());
    }
    let (kernel, _) = crate::abgroup::kernel_of_hom(p)?;
    if !kernel.is_trivial() {
        return Err(ExtensionError::NotInjective {
            kernel: kernel.to_string(),
        }
        .into());
    }
    let (coker, _) = cokernel_of_hom(p)?;
    if !coker.is_finite() {
        return Err(ExtensionError::InfiniteCokernel {
            coker: coker.to_string(),
        }
        .into());
    }
    Ok(dual_descriptor(&coker))
}

/// Returns `ν`.
pub fn validate_extension(x: &StackyFan, spec: &ExtensionSpec) -> Result<DiagGroup> {
    let gd = gale_dual(x.beta())?;
    check_extension(&gd.dg, spec)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelSequenceReport {
    /// `|μ| = |Coker(β^∨)|`
    pub mu_order: BigInt,
    pub nu_order: BigInt,
    /// `|ker α̃| = |Coker(β̃^∨)|`
    pub kernel_order: BigInt,
    pub order_law: bool,
    /// `0 -> Coker(β^∨) -> Coker(β̃^∨) -> Coker(p) -> 0`, node by node
    pub injective: bool,
    pub exact_middle: bool,
    pub surjective: bool,
    pub fan_unchanged: bool,
    pub new_fan_valid: bool,
    pub gale_sequences_exact: bool,
}

impl KernelSequenceReport {
    pub fn all_pass(&self) -> bool {
        self.order_law
            && self.injective
            && self.exact_middle
            && self.surjective
            && self.fan_unchanged
            && self.new_fan_valid
            && self.gale_sequences_exact
    }
}

impl fmt::Display for KernelSequenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = |b: bool| if b { "ok" } else { "FAIL" };
        writeln!(
            f,
            "|ker α̃| = {} vs |ν|·|μ| = {}·{}: {}",
            self.kernel_order,
            self.nu_order,
            self.mu_order,
            mark(self.order_law)
        )?;
        writeln!(
            f,
            "0 -> Coker(β^∨) -> Coker(β̃^∨) -> Coker(p) -> 0: {} {} {}",
            mark(self.injective),
            mark(self.exact_middle),
            mark(self.surjective)
        )?;
        writeln!(f, "fan unchanged: {}", mark(self.fan_unchanged))?;
        writeln!(f, "new stacky fan valid: {}", mark(self.new_fan_valid))?;
        write!(f, "Gale sequences exact: {}", mark(self.gale_sequences_exact))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GerbeResult {
    /// `(Ñ, Σ, β̃)` with `Ñ` canonical
    pub stacky_fan: StackyFan,
    /// `Ñ` and `β̃` before invariant factors are merged
    pub display: DisplayMap,
    pub nu: DiagGroup,
    /// dual of `D̃`
    pub g_tilde: DiagGroup,
    /// canonical `β̃^∨`
    pub weights: GroupHom,
    pub extension: ExtensionSpec,
    pub report: KernelSequenceReport,
}

pub fn gerbe_stacky_fan(x: &StackyFan, spec: &ExtensionSpec) -> Result<GerbeResult> {
    validate_stacky_fan(x, false).into_result()?;
    let gd = gale_dual(x.beta())?;
    let nu = check_extension(&gd.dg, spec)?;
    let tilde_vee = compose(&gd.beta_vee, &spec.p)?;
    let dual = gale_dual(&tilde_vee)?;
    let stacky_fan = StackyFan::new(dual.dg.clone(), x.fan().clone(), dual.beta_vee.matrix().clone())?;
    let report = kernel_sequence(x, &gd, &stacky_fan, &tilde_vee, spec)?;
    if !report.new_fan_valid {
        return Err(Error::Internal(format!(
            "gerbe construction produced an invalid stacky fan: {:?}",
            validate_stacky_fan(&stacky_fan, false).diagnostics
        )));
    }
    Ok(GerbeResult {
        stacky_fan,
        display: dual.display,
        nu,
        g_tilde: dual_descriptor(spec.p.target()),
        weights: tilde_vee.canonicalized(),
        extension: spec.clone(),
        report,
    })
}

/// Recomputes the kernel sequence and order law for a finished result.
pub fn verify_kernel_sequence(x: &StackyFan, result: &GerbeResult) -> Result<KernelSequenceReport> {
    let gd = gale_dual(x.beta())?;
    let tilde_vee = compose(&gd.beta_vee, &result.extension.p)?;
    kernel_sequence(x, &gd, &result.stacky_fan, &tilde_vee, &result.extension)
}

fn kernel_sequence(
    x: &StackyFan,
    gd: &GaleDualResult,
    new_fan: &StackyFan,
    tilde_vee: &GroupHom,
    spec: &ExtensionSpec,
) -> Result<KernelSequenceReport> {
    let (mu, proj_mu) = cokernel_of_hom(&gd.beta_vee)?;
    let (ker_alpha, proj_ker) = cokernel_of_hom(tilde_vee)?;
    let (coker_p, proj_p) = cokernel_of_hom(&spec.p)?;
    let order = |g: &FgAbGroup| g.order().unwrap_or_else(|| BigInt::from(0));
    let (mu_order, kernel_order, nu_order) = (order(&mu), order(&ker_alpha), order(&coker_p));

    let first = induced_map(&proj_mu, &spec.p, &proj_ker)?;
    let second = induced_map(&proj_ker, &GroupHom::identity(spec.p.target()), &proj_p)?;

    let new_fan_valid = validate_stacky_fan(new_fan, false).is_valid();
    let gale_sequences_exact = new_fan_valid && {
        let back = gale_dual(new_fan.beta())?;
        verify_gale_sequences(new_fan.beta(), &back)?.all_pass()
    };
    Ok(KernelSequenceReport {
        order_law: mu.is_finite() && kernel_order == &nu_order * &mu_order,
        mu_order,
        nu_order,
        kernel_order,
        injective: is_injective(&first)?,
        exact_middle: is_exact_at(&first, &second)?,
        surjective: is_surjective(&second)?,
        fan_unchanged: new_fan.fan() == x.fan(),
        new_fan_valid,
        gale_sequences_exact,
    })
}

/// Map `Coker(f) -> Coker(g)` induced by `h` between the targets, with
/// `from`/`to` the projections onto the two cokernels.
fn induced_map(from: &GroupHom, h: &GroupHom, to: &GroupHom) -> Result<GroupHom> {
    let c = from.target();
    let lattice = from.matrix().hcat(&c.relation_matrix())?;
    let k = from.source().num_generators();
    let mut columns = Vec::with_capacity(c.num_generators());
    for j in 0..c.num_generators() {
        let mut e = vec![BigInt::from(0); c.num_generators()];
        e[j] = BigInt::from(1);
        let sol = solve_in_image(&lattice, &e)?
            .ok_or_else(|| Error::Internal("cokernel projection is not surjective".into()))?;
        let lifted = &sol[..k];
        columns.push(to.apply(&h.apply(lifted)?)?);
    }
    let m = IntMatrix::from_columns(to.target().num_generators(), &columns)?;
    GroupHom::new(c.clone(), to.target().clone(), m)
}

/// Underlying orbifold: `N` modulo torsion, same fan.
pub fn rigidify(x: &StackyFan) -> Result<StackyFan> {
    validate_stacky_fan(x, false).into_result()?;
    StackyFan::new(x.group().free_part(), x.fan().clone(), x.reduced_rays())
}

/// The injection `DG(β̄) -> DG(β)` dual to `G -> Ḡ`, as an extension of the
/// rigidified fan. Gerbing the rigidified fan with it gives back `x`.
pub fn rigidification_extension(x: &StackyFan) -> Result<ExtensionSpec> {
    let reduced = rigidify(x)?;
    let full = gale_dual(x.beta())?;
    let bar = gale_dual(reduced.beta())?;
    let w = full.beta_vee.matrix();
    let w_bar = bar.beta_vee.matrix();
    let rel_bar = bar.dg.relation_matrix();
    let g = bar.dg.num_generators();
    let n = x.n_rays();

    // row i of P solves  p·W̄ ≡ W_i  and  p·R̄ ≡ 0  modulo the i-th order
    let constraints = w_bar.hcat(&rel_bar)?.transpose();
    let free = full.dg.free_rank();
    let mut rows = Vec::with_capacity(full.dg.num_generators());
    for i in 0..full.dg.num_generators() {
        let mut b = w.row(i).to_vec();
        b.extend(std::iter::repeat_n(BigInt::from(0), rel_bar.cols()));
        let a = if i < free {
            constraints.clone()
        } else {
            let o = &full.dg.torsion()[i - free];
            let m = n + rel_bar.cols();
            let mut scaled = IntMatrix::zeros(m, m);
            for r in 0..m {
                scaled[(r, r)] = o.clone();
            }
            constraints.hcat(&scaled)?
        };
        let sol = solve_in_image(&a, &b)?
            .ok_or_else(|| Error::Internal("β̄^∨ does not factor β^∨".into()))?;
        rows.push(sol[..g].to_vec());
    }
    let p = IntMatrix::from_rows(rows, g)?;
    Ok(ExtensionSpec::new(GroupHom::checked(bar.dg, full.dg, p)?))
}
