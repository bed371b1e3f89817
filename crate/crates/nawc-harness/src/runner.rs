//! Scenario execution. Each module turns one scenario into check records.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use log::{debug, info, warn};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use nawc::coupling::{Coupling, CouplingSpec};
use nawc::expr::SmoothVectorField;
use nawc::fock_qft::{self, DeformedFock, FockBasis, ModeSet, SmearingFunction};
use nawc::linalg::{c, max_abs, random_hermitian, random_matrix, random_vector, CMat, CVec, C64};
use nawc::qm_gauge::{self, moyal, Basis, GaugeSetup, GridRep};
use nawc::sun_algebra::{self, build_su_basis};
use nawc::warped_core::strong_limit::{strong_limit_quadrature, StrongLimitReport, StrongLimitSettings};
use nawc::warped_core::{self, joint_spectrum, DeformationContext, Metric, Side};
use nawc::wedge::{self, AdmissibleTheta, KernelInput, KernelScan, Prediction, RapidityGrid, WedgeTestFunction};
use nawc::NawcError;

use crate::checks::{self, CheckSpec, Comparison, Module};
use crate::config::{CouplingKind, FieldPreset, ScenarioConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub id: String,
    pub anchor: String,
    pub scenario: String,
    pub residual: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip)]
    pub wall_ms: f64,
}

/// One kernel scan, flattened for CSV output.
#[derive(Clone, Debug)]
pub struct KernelTable {
    pub scenario: String,
    pub lambdas: Vec<f64>,
    /// `(z0, z1, r, value)` with `r` indexing `lambdas`.
    pub rows: Vec<([f64; 2], usize, C64)>,
}

impl KernelTable {
    fn from_scan(scenario: &str, scan: &KernelScan) -> Self {
        let rows = scan.points.iter().flat_map(|p| p.values.iter().enumerate().map(move |(r, v)| (p.z, r, *v))).collect();
        Self { scenario: scenario.to_string(), lambdas: scan.lambdas.clone(), rows }
    }
}

#[derive(Clone, Debug, Default)]
pub struct ScenarioOutput {
    pub records: Vec<CheckRecord>,
    pub kernels: Vec<KernelTable>,
}

enum Outcome {
    Residual(f64),
    /// A judged prediction: measured value, the threshold and direction it
    /// was held to, and whether it agreed (`None` when no claim exists).
    Judged { residual: f64, threshold: f64, comparison: Comparison, agrees: Option<bool>, note: Option<String> },
}

use Outcome::Residual;

fn judge(comparison: Comparison, residual: f64, tol: f64) -> Verdict {
    let ok = match comparison {
        Comparison::AtMost => residual <= tol,
        Comparison::AtLeast => residual >= tol,
        Comparison::Prediction => false,
    };
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn panic_message(p: Box<dyn std::any::Any + Send>) -> String {
    if let Some(s) = p.downcast_ref::<&str>() {
        s.to_string()
    } else if let Some(s) = p.downcast_ref::<String>() {
        s.clone()
    } else {
        "panic".to_string()
    }
}

struct Recorder<'a> {
    sc: &'a ScenarioConfig,
    out: ScenarioOutput,
    stop: &'a AtomicBool,
    fail_fast: bool,
}

impl Recorder<'_> {
    fn stopped(&self) -> bool {
        self.stop.load(Ordering::SeqCst)
    }

    fn tolerance(&self, spec: &CheckSpec) -> f64 {
        self.sc.tolerances.get(spec.id).copied().unwrap_or(spec.tolerance)
    }

    #[allow(clippy::too_many_arguments)]
    fn push_as(&mut self, spec: &CheckSpec, comparison: Comparison, residual: f64, tolerance: f64, verdict: Verdict, note: Option<String>, wall_ms: f64) {
        debug!("{} {}: {residual:e} vs {tolerance:e} -> {verdict:?}", self.sc.name, spec.id);
        if verdict == Verdict::Fail && self.fail_fast {
            self.stop.store(true, Ordering::SeqCst);
        }
        self.out.records.push(CheckRecord {
            id: spec.id.to_string(),
            anchor: spec.anchor.to_string(),
            scenario: self.sc.name.clone(),
            residual,
            tolerance,
            comparison,
            verdict,
            note,
            wall_ms,
        });
    }

    fn push(&mut self, spec: &CheckSpec, residual: f64, tolerance: f64, verdict: Verdict, note: Option<String>, wall_ms: f64) {
        self.push_as(spec, spec.comparison, residual, tolerance, verdict, note, wall_ms)
    }

    fn check(&mut self, id: &str, f: impl FnOnce() -> anyhow::Result<Outcome>) {
        if self.stopped() {
            return;
        }
        let spec = checks::find(id).unwrap_or_else(|| panic!("unregistered check {id}"));
        let tol = self.tolerance(spec);
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f));
        let ms = start.elapsed().as_secs_f64() * 1e3;
        match result {
            Ok(Ok(Residual(r))) => self.push(spec, r, tol, judge(spec.comparison, r, tol), None, ms),
            Ok(Ok(Outcome::Judged { residual, threshold, comparison, agrees, note })) => {
                let verdict = match agrees {
                    Some(true) => Verdict::Pass,
                    Some(false) => Verdict::Fail,
                    None => Verdict::Inconclusive,
                };
                self.push_as(spec, comparison, residual, threshold, verdict, note, ms)
            }
            Ok(Err(e)) => self.push(spec, f64::NAN, tol, Verdict::Fail, Some(format!("{e:#}")), ms),
            Err(p) => self.push(spec, f64::NAN, tol, Verdict::Fail, Some(format!("panicked: {}", panic_message(p))), ms),
        }
    }

    /// Records every not-yet-recorded check of `module` as failed.
    fn fail_remaining(&mut self, module: Module, note: &str) {
        for spec in checks::for_module(module) {
            let done = self.out.records.iter().any(|r| r.id == spec.id);
            if !done {
                let tol = self.tolerance(spec);
                self.push(spec, f64::NAN, tol, Verdict::Fail, Some(note.to_string()), 0.0);
            }
        }
    }
}

pub fn run_scenario(sc: &ScenarioConfig, stop: &AtomicBool, fail_fast: bool) -> ScenarioOutput {
    let mut rec = Recorder { sc, out: ScenarioOutput::default(), stop, fail_fast };
    for module in sc.module.modules() {
        if rec.stopped() {
            break;
        }
        info!("scenario {}: module {}", sc.name, module.name());
        let result = catch_unwind(AssertUnwindSafe(|| match module {
            Module::Algebra => run_algebra(sc, &mut rec),
            Module::Coupling => run_coupling(sc, &mut rec),
            Module::Core => run_core(sc, &mut rec),
            Module::Qm => run_qm(sc, &mut rec),
            Module::Moyal => run_moyal(sc, &mut rec),
            Module::Fock => run_fock(sc, &mut rec),
            Module::Wedge => run_wedge(sc, &mut rec),
        }));
        let failure = match result {
            Ok(Ok(())) => None,
            Ok(Err(e)) => Some(format!("setup failed: {e:#}")),
            Err(p) => Some(format!("setup panicked: {}", panic_message(p))),
        };
        if let Some(note) = failure {
            warn!("scenario {}: {note}", sc.name);
            if !rec.stopped() {
                rec.fail_remaining(module, &note);
            }
        }
    }
    rec.out
}

fn seed(sc: &ScenarioConfig) -> anyhow::Result<u64> {
    sc.seed.ok_or_else(|| anyhow!("missing seed"))
}

/// Independent stream per purpose so that adding a check never shifts the
/// draws of another.
fn stream(seed: u64, purpose: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(purpose);
    rng
}

fn build_coupling(sc: &ScenarioConfig) -> anyhow::Result<Coupling> {
    let cfg = sc.coupling.as_ref().context("missing [coupling]")?;
    let basis = build_su_basis(sc.m)?;
    let mut spec = match cfg.kind {
        CouplingKind::Vector => CouplingSpec::vector(cfg.y.clone()),
        CouplingKind::Family => CouplingSpec::diagonal_family(cfg.y[0], cfg.y[1], cfg.y[2], cfg.y[3]),
        CouplingKind::Matrix => {
            let mats = (0..cfg.re.len())
                .map(|k| {
                    CMat::from_fn(sc.m, sc.m, |i, j| {
                        let im = cfg.im.get(k).map_or(0.0, |mm| mm[i][j]);
                        c(cfg.re[k][i][j], im)
                    })
                })
                .collect();
            CouplingSpec::matrix(mats)
        }
    };
    if let Some(s) = cfg.scale {
        spec.scale = s;
    }
    Ok(Coupling::new(&spec, &basis)?)
}

fn lambda(sc: &ScenarioConfig) -> Option<f64> {
    sc.theta.as_ref().and_then(|t| t.lambda)
}

/// `Θ` from an explicit matrix, or `[[0, λ], [s·λ, 0]]`.
fn theta_matrix(sc: &ScenarioConfig, lower_sign: f64) -> anyhow::Result<DMatrix<f64>> {
    let t = sc.theta.as_ref().context("missing [theta]")?;
    if let Some(m) = &t.matrix {
        return Ok(DMatrix::from_row_slice(2, 2, &[m[0][0], m[0][1], m[1][0], m[1][1]]));
    }
    let l = t.lambda.context("theta.lambda missing")?;
    Ok(DMatrix::from_row_slice(2, 2, &[0.0, l, lower_sign * l, 0.0]))
}

fn deformed(theta: &DMatrix<f64>) -> bool {
    theta.iter().any(|v| *v != 0.0)
}

fn run_algebra(sc: &ScenarioConfig, rec: &mut Recorder) -> anyhow::Result<()> {
    let basis = build_su_basis(sc.m)?;
    let f = sun_algebra::structure_constants(&basis)?;
    rec.check("algebra.antisymmetry", || Ok(Residual(f.antisymmetry_residual())));
    rec.check("algebra.reconstruction", || Ok(Residual(sun_algebra::reconstruction_residual(&basis, &f))));
    rec.check("algebra.jacobi", || Ok(Residual(sun_algebra::jacobi_residual(&basis))));
    rec.check("algebra.orthonormality", || Ok(Residual(sun_algebra::basis_residual(&basis))));
    rec.check("algebra.exponential", || Ok(Residual(sun_algebra::exponential_residual(&basis, 0.7))));
    Ok(())
}

fn run_coupling(sc: &ScenarioConfig, rec: &mut Recorder) -> anyhow::Result<()> {
    let cp = build_coupling(sc)?;
    let seed = seed(sc)?;
    rec.check("coupling.projectors", || Ok(Residual(cp.eigen.projector_residual())));
    rec.check("coupling.reconstruction", || Ok(Residual(cp.eigen.reconstruction_residual(&cp.ytau))));
    rec.check("coupling.zero_rejected", || {
        let basis = build_su_basis(sc.m)?;
        let zero = CouplingSpec::vector(vec![0.0; basis.dim()]);
        let accepted = !matches!(Coupling::new(&zero, &basis), Err(NawcError::ZeroEigenvalue(_)));
        Ok(Residual(accepted as u8 as f64))
    });

    let basis2 = build_su_basis(2)?;
    let mut rng = stream(seed, 1);
    let mut draws = Vec::with_capacity(50);
    while draws.len() < 50 {
        let (y1, y2, y3): (f64, f64, f64) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-3.0..3.0));
        let root = (y1 * y1 + y2 * y2).sqrt();
        // keep away from the class boundary and the degenerate case
        if (y3.abs() - root).abs() > 1e-3 && root > 1e-3 {
            draws.push((y1, y2, y3, root));
        }
    }
    let mut families = Vec::with_capacity(draws.len());
    rec.check("coupling.eigenvalue_formula", || {
        let mut worst = 0.0_f64;
        for &(y1, y2, y3, root) in &draws {
            let cp = Coupling::new(&CouplingSpec::diagonal_family(y1, y2, y3, -y3), &basis2)?;
            let ev = &cp.eigen.eigenvalues;
            worst = worst.max((ev[0] - (y3 + root)).abs()).max((ev[1] - (y3 - root)).abs());
            families.push(cp);
        }
        Ok(Residual(worst))
    });
    rec.check("coupling.classification", || {
        if families.len() != draws.len() {
            bail!("eigenvalue draws unavailable");
        }
        let wrong = draws
            .iter()
            .zip(&families)
            .filter(|((_, _, y3, root), cp)| {
                let want = if *y3 > *root {
                    nawc::coupling::SpectrumClass::StrictlyPositive
                } else if *y3 < -*root {
                    nawc::coupling::SpectrumClass::StrictlyNegative
                } else {
                    nawc::coupling::SpectrumClass::Mixed
                };
                cp.class() != want
            })
            .count();
        Ok(Residual(wrong as f64))
    });
    Ok(())
}

struct CoreInstance {
    ctx: DeformationContext,
    gens: Vec<CMat>,
    a: CMat,
    f: CMat,
    h: CMat,
    s: f64,
}

fn run_core(sc: &ScenarioConfig, rec: &mut Recorder) -> anyhow::Result<()> {
    let cp = build_coupling(sc)?;
    let seed = seed(sc)?;
    let cfg = &sc.core;
    let scale = lambda(sc).unwrap_or(1.0);
    let mut rng = stream(seed, 2);
    let mut inst = Vec::with_capacity(cfg.instances);
    for i in 0..cfg.instances {
        let metric = if i % 2 == 0 { Metric::Euclidean } else { Metric::Minkowski };
        let (ctx, gens) = warped_core::random_instance(&mut rng, metric, cfg.max_n, scale, cp.eigen.clone())?;
        let n = ctx.n();
        let (a, f, h) = (random_matrix(&mut rng, n), random_matrix(&mut rng, n), random_hermitian(&mut rng, n));
        inst.push(CoreInstance { ctx, gens, a, f, h, s: rng.gen_range(-2.0..2.0) });
    }
    let worst = |g: &dyn Fn(&CoreInstance) -> f64| inst.iter().map(g).fold(0.0, f64::max);
    rec.check("core.joint_spectrum", || Ok(Residual(worst(&|i| i.ctx.spectrum.residual(&i.gens)))));
    rec.check("core.left_right", || {
        Ok(Residual(worst(&|i| max_abs(&(i.ctx.warp_abelian(&i.a, i.s, Side::Left) - i.ctx.warp_abelian(&i.a, i.s, Side::Right))))))
    });
    rec.check("core.decomposition", || Ok(Residual(worst(&|i| max_abs(&(i.ctx.warp_nonabelian(&i.a) - i.ctx.warp_nonabelian_direct(&i.a, 1.0)))))));
    rec.check("core.rieffel_abelian", || {
        Ok(Residual(worst(&|i| {
            let w = |x: &CMat| i.ctx.warp_abelian(x, i.s, Side::Left);
            max_abs(&(w(&i.a) * w(&i.f) - w(&i.ctx.rieffel_product(&i.a, &i.f, i.s))))
        })))
    });
    rec.check("core.rieffel_nonabelian", || {
        Ok(Residual(worst(&|i| {
            let lhs = i.ctx.warp_nonabelian(&i.a) * i.ctx.warp_nonabelian(&i.f);
            max_abs(&(lhs - i.ctx.warp_tau(&i.ctx.rieffel_product_nonabelian(&i.a, &i.f), 1.0)))
        })))
    });
    rec.check("core.symmetry", || Ok(Residual(worst(&|i| i.ctx.check_symmetry(&i.h)))));
    rec.check("core.commutation_transfer", || {
        let (gens, a, f) = warped_core::shift_pair_example(3, 4);
        let theta = DMatrix::from_row_slice(2, 2, &[0.0, scale, -scale, 0.0]);
        let ctx = DeformationContext::new(theta, Metric::Euclidean, joint_spectrum(&gens)?, cp.eigen.clone())?;
        let rep = ctx.check_commutation_transfer(&a, &f);
        if !rep.asserted {
            bail!("translates do not commute (hypothesis residual {:e})", rep.hypothesis);
        }
        Ok(Residual(rep.conclusion))
    });

    let mut limit: Option<StrongLimitReport> = None;
    rec.check("core.strong_limit", || {
        let mut rng = stream(seed, 3);
        let gens = warped_core::random_commuting_pair(&mut rng, 6);
        let t = cfg.strong_limit_theta;
        let theta = DMatrix::from_row_slice(2, 2, &[0.0, t, -t, 0.0]);
        let ctx = DeformationContext::new(theta, Metric::Euclidean, joint_spectrum(&gens)?, cp.eigen.clone())?;
        let a = random_matrix(&mut rng, ctx.n());
        let mut psi = random_vector(&mut rng, ctx.n() * ctx.m());
        psi /= c(psi.norm(), 0.0);
        let settings = StrongLimitSettings { epsilons: cfg.epsilons.clone(), hermite_nodes: cfg.hermite_nodes, ..Default::default() };
        let rep = strong_limit_quadrature(&ctx, &a, &psi, &settings);
        let d = rep.final_distance();
        limit = Some(rep);
        Ok(Residual(d))
    });
    let rep = limit.ok_or_else(|| anyhow!("strong-limit evaluation failed"));
    rec.check("core.cutoff_independence", || {
        let rep = rep.as_ref().map_err(|e| anyhow!("{e}"))?;
        let note = (!rep.diagnostics.is_empty()).then(|| rep.diagnostics.join("; "));
        if let Some(n) = note {
            warn!("strong limit diagnostics: {n}");
        }
        Ok(Residual(rep.cutoff_gap))
    });
    rec.check("core.strong_limit_monotone", || {
        let rep = rep.as_ref().map_err(|e| anyhow!("{e}"))?;
        Ok(Residual(rep.traces.iter().filter(|t| !t.monotone).count() as f64))
    });
    Ok(())
}

fn build_field(sc: &ScenarioConfig) -> anyhow::Result<SmoothVectorField> {
    let f = &sc.field;
    Ok(match f.preset {
        Some(FieldPreset::Identity) => SmoothVectorField::identity(2),
        Some(FieldPreset::Quadratic) => SmoothVectorField::quadratic(2, f.coefficient),
        None => SmoothVectorField::parse(&f.value, &f.jacobian)?,
    })
}

/// `fine / coarse`, with both floored at roundoff so that two converged
/// values do not read as a regression.
fn refinement_ratio(fine: f64, coarse: f64) -> f64 {
    fine.max(1e-13) / coarse.max(1e-13)
}

fn run_qm(sc: &ScenarioConfig, rec: &mut Recorder) -> anyhow::Result<()> {
    let cp = build_coupling(sc)?;
    let seed = seed(sc)?;
    let g = &sc.grid;
    let theta = theta_matrix(sc, -1.0)?;
    let field = build_field(sc)?;
    let m = sc.m;
    let setup = GaugeSetup::new(GridRep::new(g.points, g.half_length, Basis::Position)?, theta.clone(), field.clone(), cp.eigen.clone())?;
    let vs = qm_gauge::test_vectors(&setup.grid, g.width, m, seed)?;

    rec.check("qm.field_jacobian", || {
        let l = g.half_length;
        let samples: Vec<Vec<f64>> = (0..5).flat_map(|i| (0..5).map(move |j| vec![-l + 0.5 * l * i as f64, -l + 0.5 * l * j as f64])).collect();
        Ok(Residual(field.jacobian_residual(&samples)))
    });
    let ccr = |grid: &GridRep, vs: &[CVec]| vs.iter().map(|v| qm_gauge::ccr_residual(grid, v, m)).fold(0.0, f64::max);
    rec.check("qm.ccr", || Ok(Residual(ccr(&setup.grid, &vs))));

    let mut momentum = None;
    rec.check("qm.momentum_paths", || {
        let r = qm_gauge::deformed_momentum_check(&setup, &vs)?;
        momentum = Some(r.clone());
        Ok(Residual(r.closed_vs_spectral))
    });
    rec.check("qm.bookkeeping", || Ok(Residual(momentum.as_ref().context("momentum check failed")?.bookkeeping)));
    rec.check("qm.refinement", || {
        let fine = momentum.as_ref().context("momentum check failed")?;
        let coarse_grid = GridRep::new(g.points / 2, g.half_length, Basis::Position)?;
        let coarse = GaugeSetup::new(coarse_grid, theta.clone(), field.clone(), cp.eigen.clone())?;
        let cvs = qm_gauge::test_vectors(&coarse.grid, g.width, m, seed)?;
        let cm = qm_gauge::deformed_momentum_check(&coarse, &cvs)?;
        let ratio = refinement_ratio(fine.closed_vs_spectral, cm.closed_vs_spectral)
            .max(refinement_ratio(ccr(&setup.grid, &vs), ccr(&coarse.grid, &cvs)));
        Ok(Residual(ratio))
    });

    let mut ham = None;
    rec.check("qm.hamiltonian", || {
        let r = qm_gauge::deformed_hamiltonian_check(&setup, &vs)?;
        ham = Some(r.clone());
        Ok(Residual(r.uniqueness))
    });
    if deformed(&theta) {
        rec.check("qm.quadratic_term", || Ok(Residual(ham.as_ref().context("hamiltonian check failed")?.quadratic_norm)));
    }
    let mut strength = None;
    rec.check("qm.field_strength", || {
        let r = qm_gauge::field_strength_check(&setup, &vs)?;
        strength = Some(r.clone());
        Ok(Residual(r.spectral.max(r.closed)))
    });
    rec.check("qm.quadratic_commutator", || Ok(Residual(strength.as_ref().context("field strength check failed")?.quadratic)));
    Ok(())
}

fn run_moyal(sc: &ScenarioConfig, rec: &mut Recorder) -> anyhow::Result<()> {
    let cp = build_coupling(sc)?;
    let seed = seed(sc)?;
    let g = &sc.grid;
    let theta = theta_matrix(sc, -1.0)?;
    let setup = moyal::MoyalSetup::new(GridRep::new(g.points, g.half_length, Basis::Momentum)?, theta.clone(), cp.eigen.clone())?;
    let vs = qm_gauge::test_vectors(&setup.grid, g.width, sc.m, seed)?;
    let mut rep = None;
    rec.check("moyal.coordinate_paths", || {
        let r = moyal::moyal_weyl_check(&setup, &vs)?;
        rep = Some(r.clone());
        Ok(Residual(r.closed_vs_spectral))
    });
    let rep = rep.context("coordinate check failed");
    let get = |f: fn(&moyal::MoyalReport) -> f64| rep.as_ref().map(f).map_err(|e| anyhow!("{e}"));
    rec.check("moyal.commutator", || Ok(Residual(get(|r| r.commutator_spectral.max(r.commutator_closed))?)));
    rec.check("moyal.centrality", || Ok(Residual(get(|r| r.centrality)?)));
    rec.check("moyal.selfadjoint", || Ok(Residual(get(|r| r.selfadjoint)?)));
    let mut twist = None;
    rec.check("moyal.weyl_twist", || {
        let r = moyal::weyl_twist_check(&setup, [0.3, -0.2], [0.1, 0.4], &vs[1]);
        twist = Some(r.clone());
        Ok(Residual(r.residual))
    });
    if deformed(&theta) {
        rec.check("moyal.weyl_sign", || Ok(Residual(twist.as_ref().context("twist check failed")?.opposite_sign)));
    }
    Ok(())
}

fn random_coeffs(rng: &mut ChaCha8Rng, k: usize) -> Vec<C64> {
    (0..k).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

fn run_fock(sc: &ScenarioConfig, rec: &mut Recorder) -> anyhow::Result<()> {
    let cp = build_coupling(sc)?;
    let seed = seed(sc)?;
    let cfg = &sc.fock;
    let theta = theta_matrix(sc, 1.0)?;
    let modes = ModeSet::new(cfg.mass, cfg.modes.clone())?;
    let k = modes.len();
    let df = DeformedFock::new(FockBasis::new(modes, cfg.ncut), theta.clone(), cp.eigen.clone(), cfg.sigma)?;
    let m = df.m();

    rec.check("fock.ccr", || Ok(Residual(df.basis.ccr_residual())));
    let mut ladder = None;
    rec.check("fock.creator_adjoint", || {
        let r = fock_qft::ladder_check(&df);
        ladder = Some(r.clone());
        Ok(Residual(r.creator_adjoint_vs_closed))
    });
    let lad = |f: fn(&fock_qft::LadderReport) -> f64| ladder.as_ref().map(f).context("ladder check failed");
    rec.check("fock.vacuum_annihilated", || Ok(Residual(lad(|r| r.vacuum_annihilated)?)));
    rec.check("fock.norm_equality", || Ok(Residual(lad(|r| r.norm_preservation)?)));
    rec.check("fock.vacuum_invariance", || {
        let mut rng = stream(seed, 4);
        let e = random_coeffs(&mut rng, m);
        let om = df.vacuum_vector(&e);
        let mut worst = 0.0_f64;
        for _ in 0..4 {
            let x = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
            worst = worst.max((df.translation(x) * &om - &om).norm() / om.norm());
        }
        Ok(Residual(worst))
    });

    let mut rng = stream(seed, 5);
    let f = SmearingFunction { plus: random_coeffs(&mut rng, k), minus: random_coeffs(&mut rng, k) };
    let g2 = SmearingFunction { plus: random_coeffs(&mut rng, k), minus: random_coeffs(&mut rng, k) };
    let alpha = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let mut field = None;
    rec.check("fock.hermiticity", || {
        let r = fock_qft::field_check(&df, &f, &g2, alpha);
        field = Some(r.clone());
        Ok(Residual(r.hermiticity))
    });
    let fld = |f: fn(&fock_qft::FieldReport) -> f64| field.as_ref().map(f).context("field check failed");
    rec.check("fock.vacuum_action", || Ok(Residual(fld(|r| r.vacuum_action)?)));
    rec.check("fock.norm_bound", || Ok(Residual(fld(|r| r.bound_slack)?)));
    rec.check("fock.power_bound", || Ok(Residual(fld(|r| r.power_slack)?)));
    rec.check("fock.linearity", || Ok(Residual(fld(|r| r.linearity)?)));

    let mut rng = stream(seed, 6);
    let mut e = random_coeffs(&mut rng, m);
    let en = e.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    e.iter_mut().for_each(|z| *z /= en);
    let mut wrong_sign = f64::INFINITY;
    for (id, order) in [("fock.twisted_symmetrization_2", 2), ("fock.twisted_symmetrization_3", 3)] {
        if order > cfg.ncut {
            continue;
        }
        let fs: Vec<Vec<C64>> = (0..order).map(|_| random_coeffs(&mut rng, k)).collect();
        rec.check(id, || {
            let lhs = fock_qft::twisted_product_vector(&df, &fs, &e);
            let rhs = fock_qft::symmetrized_twisted_vector(&df, &fs, &e, -cfg.sigma)?;
            let wrong = fock_qft::symmetrized_twisted_vector(&df, &fs, &e, cfg.sigma)?;
            wrong_sign = wrong_sign.min((&lhs - wrong).norm() / lhs.norm());
            Ok(Residual((&lhs - rhs).norm() / lhs.norm()))
        });
    }
    if deformed(&theta) {
        rec.check("fock.twist_sign", || {
            if !wrong_sign.is_finite() {
                bail!("no symmetrization order available");
            }
            Ok(Residual(wrong_sign))
        });
    }
    Ok(())
}

fn run_wedge(sc: &ScenarioConfig, rec: &mut Recorder) -> anyhow::Result<()> {
    let cp = build_coupling(sc)?;
    let cfg = &sc.wedge;
    let t = sc.theta.as_ref().context("missing [theta]")?;
    let lam = t.lambda.context("theta.lambda missing")?;
    let theta = AdmissibleTheta::new(2, lam, t.eta)?;
    let th = theta.contravariant();
    let f = WedgeTestFunction::new(cfg.right.center, cfg.right.scale, wedge::Side::Right)?;
    let g = WedgeTestFunction::new(cfg.left.center, cfg.left.scale, wedge::Side::Left)?;
    let grid = RapidityGrid::new(cfg.theta_max, cfg.points)?;
    let zs = match &cfg.z_samples {
        Some(user) => {
            let mut zs = vec![[0.0, 0.0]];
            zs.extend(user.iter().filter(|z| **z != [0.0, 0.0]));
            zs
        }
        None => wedge::default_z_samples(),
    };

    rec.check("wedge.boost_invariance", || {
        let mut worst = 0.0_f64;
        for b in [cfg.beta, -cfg.beta, 1.5] {
            worst = worst.max((wedge::gamma_map(&wedge::boost(b), &th)? - &th).abs().max());
        }
        Ok(Residual(worst))
    });
    rec.check("wedge.reflection", || Ok(Residual((wedge::gamma_map(&wedge::reflection(2), &th)? + &th).abs().max())));
    rec.check("wedge.transform_convergence", || {
        Ok(Residual(wedge::transform_self_convergence(&f, cfg.mass, &grid).max(wedge::transform_self_convergence(&g, cfg.mass, &grid))))
    });
    rec.check("wedge.continuation", || {
        let ts = [0.5, -1.0, 3.0];
        Ok(Residual(wedge::continuation_residual(&f, cfg.mass, &ts).max(wedge::continuation_residual(&g, cfg.mass, &ts))))
    });
    let mut cov = None;
    rec.check("wedge.covariance", || {
        let (mut integrand, mut phase) = (0.0_f64, 0.0_f64);
        for lr in cp.eigen.lambdas() {
            let r = wedge::covariance_kernel_check(&f, &g, cfg.beta, cfg.mass, &theta, lr, &grid, &zs)?;
            integrand = integrand.max(r.integrand);
            phase = phase.max(r.phase);
        }
        cov = Some(phase);
        Ok(Residual(integrand))
    });
    rec.check("wedge.covariance_phase", || Ok(Residual(cov.context("covariance check failed")?)));

    let mut scan = None;
    rec.check("wedge.locality", || {
        let (ft, gt) = (wedge::mass_shell_transform(&f, cfg.mass, &grid, false), wedge::mass_shell_transform(&g, cfg.mass, &grid, false));
        let inp = KernelInput { f: &ft, g: &gt, grid: &grid, mass: cfg.mass, theta_contra: &th };
        let s = wedge::commutator_kernel(&inp, &cp.eigen, &zs);
        let v = wedge::wedge_locality_verdict(&s, cp.class(), lam);
        let (threshold, comparison) = match v.prediction {
            Prediction::Local => (wedge::LOCAL_TOL, Comparison::AtMost),
            Prediction::NotLocal => (wedge::NONLOCAL_TOL, Comparison::AtLeast),
            Prediction::None => (wedge::LOCAL_TOL, Comparison::Prediction),
        };
        let mut notes = vec![format!("{:?} spectrum, predicted {:?}, measured {:?}", v.class, v.prediction, v.verdict)];
        notes.extend(s.diagnostics.iter().cloned());
        scan = Some(s);
        Ok(Outcome::Judged { residual: v.max_kernel, threshold, comparison, agrees: v.agrees, note: Some(notes.join("; ")) })
    });
    rec.check("wedge.tail", || Ok(Residual(scan.as_ref().context("kernel scan failed")?.tail)));
    if let Some(s) = &scan {
        rec.out.kernels.push(KernelTable::from_scan(&sc.name, s));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn judge_respects_direction() {
        assert_eq!(judge(Comparison::AtMost, 1e-13, 1e-12), Verdict::Pass);
        assert_eq!(judge(Comparison::AtMost, 1e-11, 1e-12), Verdict::Fail);
        assert_eq!(judge(Comparison::AtMost, f64::NAN, 1.0), Verdict::Fail);
        assert_eq!(judge(Comparison::AtLeast, 0.5, 1e-3), Verdict::Pass);
        assert_eq!(judge(Comparison::AtLeast, -0.1, 0.0), Verdict::Fail);
    }

    #[test]
    fn panics_become_failed_records() {
        let sc = crate::config::parse_config("[[scenario]]\nname = \"a\"\nmodule = \"algebra\"\n", crate::config::Format::Toml, None).unwrap().remove(0);
        let stop = AtomicBool::new(false);
        let mut rec = Recorder { sc: &sc, out: ScenarioOutput::default(), stop: &stop, fail_fast: true };
        rec.check("algebra.jacobi", || panic!("boom"));
        rec.check("algebra.antisymmetry", || Ok(Residual(0.0)));
        assert_eq!(rec.out.records.len(), 1);
        let r = &rec.out.records[0];
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(r.note.as_deref().unwrap().contains("boom"));
        assert!(stop.load(Ordering::SeqCst));
    }

    #[test]
    fn setup_errors_fail_every_module_check() {
        let sc = crate::config::parse_config(
            "[[scenario]]\nname = \"w\"\nmodule = \"wedge\"\ncoupling = { kind = \"vector\", y = [0.6, 0.0, 0.8] }\ntheta = { lambda = 0.4 }\n[scenario.wedge]\nright = { center = [0.0, 0.5], scale = 1.0 }\n",
            crate::config::Format::Toml,
            None,
        )
        .unwrap()
        .remove(0);
        let out = run_scenario(&sc, &AtomicBool::new(false), false);
        assert_eq!(out.records.len(), checks::for_module(Module::Wedge).count());
        assert!(out.records.iter().all(|r| r.verdict == Verdict::Fail && r.note.as_deref().unwrap().contains("setup failed")));
    }
}
