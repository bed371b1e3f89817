//! Registry of every check the runner can emit.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, PartialOrd, Ord)]
#[serde(rename_all = "lowercase")]
pub enum Module {
    Algebra,
    Coupling,
    Core,
    Qm,
    Moyal,
    Fock,
    Wedge,
}

impl Module {
    pub const ALL: [Module; 7] = [Module::Algebra, Module::Coupling, Module::Core, Module::Qm, Module::Moyal, Module::Fock, Module::Wedge];

    pub fn name(self) -> &'static str {
        match self {
            Module::Algebra => "algebra",
            Module::Coupling => "coupling",
            Module::Core => "core",
            Module::Qm => "qm",
            Module::Moyal => "moyal",
            Module::Fock => "fock",
            Module::Wedge => "wedge",
        }
    }

    pub fn parse(s: &str) -> Option<Module> {
        Module::ALL.into_iter().find(|m| m.name() == s)
    }

    pub fn randomized(self) -> bool {
        !matches!(self, Module::Algebra | Module::Wedge)
    }

    pub fn needs_coupling(self) -> bool {
        self != Module::Algebra
    }

    pub fn needs_theta(self) -> bool {
        matches!(self, Module::Qm | Module::Moyal | Module::Fock | Module::Wedge)
    }
}

/// How a residual is compared with its tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// Pass iff `residual ≤ tolerance`.
    AtMost,
    /// Pass iff `residual ≥ tolerance`.
    AtLeast,
    /// No prediction exists; the record is inconclusive.
    Prediction,
}

#[derive(Clone, Copy, Debug)]
pub struct CheckSpec {
    pub id: &'static str,
    pub module: Module,
    pub anchor: &'static str,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub rationale: &'static str,
}

const fn spec(id: &'static str, module: Module, anchor: &'static str, tolerance: f64, comparison: Comparison, rationale: &'static str) -> CheckSpec {
    CheckSpec { id, module, anchor, tolerance, comparison, rationale }
}

use Comparison::*;
use Module::*;

pub static REGISTRY: &[CheckSpec] = &[
    spec("algebra.antisymmetry", Algebra, "structure constants are totally antisymmetric", 1e-12, AtMost, "exact in exact arithmetic; a few ulps of the O(1) entries"),
    spec("algebra.reconstruction", Algebra, "structure constants rebuild every generator commutator", 1e-12, AtMost, "products of O(1) matrices of size m ≤ 4"),
    spec("algebra.jacobi", Algebra, "Jacobi identity for the generator basis", 1e-12, AtMost, "double commutators of O(1) matrices"),
    spec("algebra.orthonormality", Algebra, "generators are trace-orthonormal with normalization one half", 1e-12, AtMost, "single traces of O(1) matrices"),
    spec("algebra.exponential", Algebra, "exponentials of the coupling direction are unitary", 1e-12, AtMost, "scaling-and-squaring exponential of a small hermitian matrix"),
    spec("coupling.projectors", Coupling, "spectral projectors of the coupling matrix are orthogonal and complete", 1e-12, AtMost, "eigenvectors from a hermitian solver are orthonormal to roundoff"),
    spec("coupling.reconstruction", Coupling, "coupling matrix equals the eigenvalue-weighted sum of its projectors", 1e-12, AtMost, "roundoff of an m × m reconstruction"),
    spec("coupling.zero_rejected", Coupling, "vanishing coupling is rejected as singular", 0.0, AtMost, "count of accepted zero couplings; any acceptance is a failure"),
    spec("coupling.eigenvalue_formula", Coupling, "two-by-two family eigenvalues are y3 plus or minus the modulus of (y1, y2)", 1e-12, AtMost, "closed form versus a hermitian eigensolver on 50 seeded draws"),
    spec("coupling.classification", Coupling, "family spectrum class follows the sign of y3 against the modulus of (y1, y2)", 0.0, AtMost, "number of misclassified draws"),
    spec("core.joint_spectrum", Core, "joint projectors resolve each commuting generator", 1e-11, AtMost, "simultaneous diagonalization of N ≤ 8 matrices with degenerate spectra"),
    spec("core.left_right", Core, "left and right spectral integrals give the same warped operator", 1e-11, AtMost, "max over the seeded instances, both metrics"),
    spec("core.decomposition", Core, "coupling-eigenspace decomposition equals the direct spectral sum", 1e-11, AtMost, "two routes through different block structures"),
    spec("core.rieffel_abelian", Core, "product of warped operators is the warped deformed product", 1e-11, AtMost, "triple spectral sums over N ≤ 8 points"),
    spec("core.rieffel_nonabelian", Core, "product of coupled warped operators is the coupled warp of the deformed product", 1e-11, AtMost, "as above on the enlarged space"),
    spec("core.symmetry", Core, "warping preserves hermiticity", 1e-11, AtMost, "adjoint mismatch of a sum of phase-weighted blocks"),
    spec("core.commutation_transfer", Core, "commuting opposite translates give commuting opposite warps", 1e-10, AtMost, "shift pair on a two-factor product space"),
    spec("core.strong_limit", Core, "regularized oscillatory integrals converge to the spectral sum", 1e-3, AtMost, "relative distance at the smallest cutoff scale, worst cutoff"),
    spec("core.cutoff_independence", Core, "two distinct cutoff profiles give the same limit", 2e-3, AtMost, "relative gap at the smallest cutoff scale"),
    spec("core.strong_limit_monotone", Core, "distance to the spectral sum shrinks as the cutoff is removed", 0.0, AtMost, "number of cutoff traces that fail to decrease"),
    spec("qm.field_jacobian", Qm, "declared Jacobian of the deforming field matches finite differences", 1e-6, AtMost, "central differences with step 1e-5 have O(1e-10) truncation error"),
    spec("qm.ccr", Qm, "grid position and momentum satisfy the canonical commutator on test vectors", 1e-10, AtMost, "spectral differentiation of well resolved Gaussians"),
    spec("qm.refinement", Qm, "doubling the grid shrinks the discretization residuals", 1.0, AtMost, "ratio of fine to coarse residual, worst of the tracked quantities"),
    spec("qm.momentum_paths", Qm, "warped momentum equals momentum plus the induced gauge potential", 1e-5, AtMost, "relative; bounded by Gaussian tails at the box edge"),
    spec("qm.bookkeeping", Qm, "induced potential equals minus charge times vector potential", 1e-5, AtMost, "same discretization as the momentum paths"),
    spec("qm.hamiltonian", Qm, "warped kinetic operator equals the minimally coupled Hamiltonian", 1e-5, AtMost, "relative; second derivatives amplify tail error"),
    spec("qm.quadratic_term", Qm, "minimal coupling carries a nonvanishing quadratic potential term", 1e-8, AtLeast, "relative norm, scales with the square of the deformation; far above roundoff; only emitted for nonzero deformation"),
    spec("qm.field_strength", Qm, "commutator of deformed momenta is the curl of the induced potential", 1e-5, AtMost, "worst of the spectral and closed-form routes"),
    spec("qm.quadratic_commutator", Qm, "potential self-commutator vanishes for a single coupling direction", 0.0, AtMost, "products of commuting scalars times one matrix; exact"),
    spec("moyal.coordinate_paths", Moyal, "warped coordinates equal coordinates shifted by deformed momenta", 1e-5, AtMost, "relative, momentum-space grid"),
    spec("moyal.commutator", Moyal, "warped coordinates commute to the deformation matrix times the coupling", 1e-5, AtMost, "worst of the spectral and closed-form routes"),
    spec("moyal.centrality", Moyal, "coordinate commutator is central", 1e-12, AtMost, "closed form is a scalar times a fixed matrix"),
    spec("moyal.selfadjoint", Moyal, "warped coordinates are self-adjoint", 1e-10, AtMost, "adjoint mismatch of the spectral warp rows"),
    spec("moyal.weyl_twist", Moyal, "warped Weyl operators compose up to a central twist phase", 1e-8, AtMost, "stepped Taylor exponentials on the grid"),
    spec("moyal.weyl_sign", Moyal, "opposite twist sign is detectably wrong", 1e-6, AtLeast, "only emitted for nonzero deformation"),
    spec("fock.ccr", Fock, "truncated ladder operators obey the canonical commutator below the cutoff", 1e-12, AtMost, "integer square roots"),
    spec("fock.creator_adjoint", Fock, "deformed creator is the adjoint of the deformed annihilator", 1e-12, AtMost, "closed-form creator against the adjoint"),
    spec("fock.vacuum_annihilated", Fock, "deformed annihilators kill every vacuum vector", 0.0, AtMost, "structural zeros; exact"),
    spec("fock.norm_equality", Fock, "deformed annihilators preserve the norms of undeformed ones", 1e-12, AtMost, "unit-modulus phases on basis vectors"),
    spec("fock.vacuum_invariance", Fock, "vacuum vectors are translation invariant", 1e-14, AtMost, "zero total momentum gives unit phase"),
    spec("fock.hermiticity", Fock, "deformed field of a conjugated test function is the adjoint field", 1e-11, AtMost, "sums over modes of phase-weighted ladders"),
    spec("fock.vacuum_action", Fock, "deformed and free fields agree on vacuum vectors", 1e-14, AtMost, "vacuum has zero momentum"),
    spec("fock.norm_bound", Fock, "field is bounded by the test-function norm times the root of number plus one", 0.0, AtLeast, "smallest slack over basis vectors below the cutoff"),
    spec("fock.power_bound", Fock, "field powers obey the factorial growth bound", 0.0, AtLeast, "smallest relative slack over basis vectors, powers up to three"),
    spec("fock.linearity", Fock, "deformed field is complex linear in the test function", 1e-13, AtMost, "linear combinations of ladder matrices"),
    spec("fock.twisted_symmetrization_2", Fock, "two deformed creators build the twisted symmetrized two-particle vector", 1e-10, AtMost, "explicit tensor sum over permutations"),
    spec("fock.twisted_symmetrization_3", Fock, "three deformed creators build the twisted symmetrized three-particle vector", 1e-10, AtMost, "explicit tensor sum over permutations"),
    spec("fock.twist_sign", Fock, "twist with the wrong sign is detectably wrong", 1e-6, AtLeast, "only emitted for nonzero deformation"),
    spec("wedge.boost_invariance", Wedge, "admissible deformation matrix is fixed by wedge-preserving boosts", 1e-10, AtMost, "two-by-two Lorentz conjugation"),
    spec("wedge.reflection", Wedge, "wedge reflection flips the sign of the deformation matrix", 1e-10, AtMost, "two-by-two Lorentz conjugation"),
    spec("wedge.transform_convergence", Wedge, "mass-shell transforms are converged in the inner quadrature", 1e-9, AtMost, "refined against unrefined composite rule"),
    spec("wedge.continuation", Wedge, "shifted-rapidity transform equals the analytic continuation into the strip", 1e-9, AtMost, "complex-momentum quadrature of a compact bump"),
    spec("wedge.covariance", Wedge, "commutator kernel integrand is boost covariant", 1e-8, AtMost, "relative, worst over rapidity nodes and samples"),
    spec("wedge.covariance_phase", Wedge, "deformation phase is boost covariant", 1e-10, AtMost, "phase difference of unit-modulus factors"),
    spec("wedge.tail", Wedge, "rapidity cutoff tail is negligible", 1e-8, AtMost, "largest integrand at the grid edge"),
    spec("wedge.locality", Wedge, "commutator kernel vanishes exactly for positive coupling spectra and not for mixed ones", 1e-6, Prediction, "local below 1e-6, nonlocal above 1e-3; no claim for negative spectra"),
];

pub fn find(id: &str) -> Option<&'static CheckSpec> {
    REGISTRY.iter().find(|s| s.id == id)
}

pub fn for_module(module: Module) -> impl Iterator<Item = &'static CheckSpec> {
    REGISTRY.iter().filter(move |s| s.module == module)
}
