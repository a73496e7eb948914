//! End-to-end verification suite: fourteen numbered criteria, each a set of
//! checks against independent oracles at fixed tolerances.
//!
//! Tolerances are multiplied by [`VerifyConfig::tolerance_scale`]; boolean
//! conditions (monotonicity, runtime budgets) are not scaled. Wall times are
//! kept in memory for the human summary but left out of serialized reports.

use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::{Matrix3, Matrix4};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{limit_suite, watson_first_order, weak_limit_integral, CylPoint, SweepResult};
use crate::covderiv::{cov_diff_z, fd_oracle, zrot_closed_form, zrot_derivative, Coframe};
use crate::cumulants::{cumulant_table, fn_expected, PowerSeries};
use crate::curvature::{self, beta_m_blocks, christoffel_riemann, hessian_sectional, metric};
use crate::error::{Error, Result};
use crate::model::{momenta, FlatPoint, GasParameters, GeneralizedTemperature};
use crate::partition;
use crate::poisson::{bracket, leaf_factor, ObservableFn};
use crate::quad::gauss_legendre;
use crate::rigidbody::{rb_dual_hessian_curvature, rb_metric, RigidBodyParams};
use crate::tensor::{Chart, CovTensor};

/// Settings for a verification run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    pub tolerance_scale: f64,
    /// Run only the criteria touching this module.
    pub only: Option<String>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { seed: curvature::DEFAULT_SEED, tolerance_scale: 1.0, only: None }
    }
}

/// One measured quantity against its tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub label: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub modules: Vec<String>,
    pub passed: bool,
    pub checks: Vec<Check>,
    /// Set when the criterion could not be evaluated at all.
    pub error: Option<String>,
    /// Wall time; not serialized so that reports are reproducible.
    #[serde(skip)]
    pub seconds: f64,
    pub budget_seconds: f64,
}

impl CriterionResult {
    /// Checks that failed, for diagnostics.
    pub fn failing(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let worst = self
            .checks
            .iter()
            .filter(|c| c.tolerance > 0.0)
            .max_by(|a, b| (a.value / a.tolerance).total_cmp(&(b.value / b.tolerance)));
        let detail = match (&self.error, worst) {
            (Some(e), _) => format!("error: {e}"),
            (None, Some(c)) => format!("worst {} = {:.3e} (tol {:.1e})", c.label, c.value, c.tolerance),
            (None, None) => String::new(),
        };
        format!("{verdict} [{:>2}] {:<34} {:>7.2}s  {}", self.id, self.name, self.seconds, detail)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub seed: u64,
    pub tolerance_scale: f64,
    pub criteria: Vec<CriterionResult>,
    #[serde(skip)]
    pub seconds: f64,
}

impl VerifyReport {
    pub fn failing_ids(&self) -> Vec<u8> {
        self.criteria.iter().filter(|c| !c.passed).map(|c| c.id).collect()
    }
}

/// Accumulates checks for one criterion, applying the tolerance scale.
struct Checks {
    scale: f64,
    list: Vec<Check>,
}

impl Checks {
    fn new(scale: f64) -> Self {
        Checks { scale, list: Vec::new() }
    }

    /// `value ≤ tolerance · scale`; NaN fails.
    fn at_most(&mut self, label: impl Into<String>, value: f64, tolerance: f64) {
        let tol = tolerance * self.scale;
        self.list.push(Check { label: label.into(), value, tolerance: tol, passed: value <= tol });
    }

    /// Unscaled boolean condition.
    fn holds(&mut self, label: impl Into<String>, ok: bool) {
        self.list.push(Check { label: label.into(), value: if ok { 0.0 } else { 1.0 }, tolerance: 0.0, passed: ok });
    }

    /// Keep only the worst value per label prefix to bound the report size.
    fn worst(&mut self, label: impl Into<String>, values: impl IntoIterator<Item = f64>, tolerance: f64) {
        let v = values.into_iter().fold(0.0f64, |m, x| if x.is_nan() || m.is_nan() { f64::NAN } else { m.max(x) });
        self.at_most(label, v, tolerance);
    }
}

type Runner = fn(&VerifyConfig, &mut ChaCha8Rng, &mut Checks) -> Result<()>;

struct Criterion {
    id: u8,
    name: &'static str,
    modules: &'static [&'static str],
    budget_seconds: f64,
    run: Runner,
}

const CRITERIA: &[Criterion] = &[
    Criterion { id: 1, name: "rigid-body hyperbolicity", modules: &["rigidbody", "curvature"], budget_seconds: 5.0, run: rigid_hyperbolicity },
    Criterion { id: 2, name: "dual Hessian constancy", modules: &["rigidbody"], budget_seconds: 5.0, run: dual_hessian_constancy },
    Criterion { id: 3, name: "partition cross-validation", modules: &["partition"], budget_seconds: 5.0, run: partition_cross_validation },
    Criterion { id: 4, name: "zero-rotation inertia", modules: &["partition"], budget_seconds: 2.0, run: zero_rotation_inertia },
    Criterion { id: 5, name: "Faa di Bruno vs finite differences", modules: &["covderiv"], budget_seconds: 60.0, run: faa_di_bruno_vs_fd },
    Criterion { id: 6, name: "order-4 closed forms", modules: &["covderiv"], budget_seconds: 5.0, run: order_four_closed_forms },
    Criterion { id: 7, name: "moment-cumulant duality", modules: &["cumulants"], budget_seconds: 10.0, run: moment_cumulant_duality },
    Criterion { id: 8, name: "scaling law", modules: &["partition", "model"], budget_seconds: 2.0, run: scaling_law },
    Criterion { id: 9, name: "mixed-chart block diagonality", modules: &["curvature", "model"], budget_seconds: 5.0, run: block_diagonality },
    Criterion { id: 10, name: "asymptotic limits", modules: &["asymptotics", "cumulants"], budget_seconds: 60.0, run: asymptotic_limits },
    Criterion { id: 11, name: "curvature limit", modules: &["asymptotics", "curvature"], budget_seconds: 60.0, run: curvature_limit },
    Criterion { id: 12, name: "weak limit of Gibbs measures", modules: &["asymptotics"], budget_seconds: 10.0, run: weak_limit },
    Criterion { id: 13, name: "Watson lemma", modules: &["asymptotics"], budget_seconds: 2.0, run: watson_lemma },
    Criterion { id: 14, name: "Poisson algebra", modules: &["poisson"], budget_seconds: 10.0, run: poisson_algebra },
];

/// Module names accepted by [`VerifyConfig::only`].
pub fn known_modules() -> Vec<&'static str> {
    let mut m: Vec<&str> = CRITERIA.iter().flat_map(|c| c.modules.iter().copied()).collect();
    m.sort_unstable();
    m.dedup();
    m
}

/// Runs a single criterion by number.
pub fn run_criterion(id: u8, cfg: &VerifyConfig) -> Result<CriterionResult> {
    let c = CRITERIA.iter().find(|c| c.id == id).ok_or_else(|| Error::Domain(format!("no criterion {id}")))?;
    Ok(execute(c, cfg))
}

/// Runs every criterion selected by `cfg.only`.
pub fn run_verification(cfg: &VerifyConfig) -> Result<VerifyReport> {
    if !(cfg.tolerance_scale > 0.0 && cfg.tolerance_scale.is_finite()) {
        return Err(Error::Domain(format!("tolerance scale must be positive, got {}", cfg.tolerance_scale)));
    }
    if let Some(m) = &cfg.only {
        if !known_modules().contains(&m.as_str()) {
            return Err(Error::Domain(format!("unknown module {m:?}; expected one of {}", known_modules().join(", "))));
        }
    }
    let start = Instant::now();
    let criteria: Vec<CriterionResult> = CRITERIA
        .iter()
        .filter(|c| cfg.only.as_deref().is_none_or(|m| c.modules.contains(&m)))
        .map(|c| execute(c, cfg))
        .collect();
    Ok(VerifyReport {
        passed: criteria.iter().all(|c| c.passed),
        seed: cfg.seed,
        tolerance_scale: cfg.tolerance_scale,
        criteria,
        seconds: start.elapsed().as_secs_f64(),
    })
}

fn execute(c: &Criterion, cfg: &VerifyConfig) -> CriterionResult {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(c.id as u64));
    let mut checks = Checks::new(cfg.tolerance_scale);
    let start = Instant::now();
    let outcome = (c.run)(cfg, &mut rng, &mut checks);
    let seconds = start.elapsed().as_secs_f64();
    checks.holds(format!("runtime under {} s", c.budget_seconds), seconds < c.budget_seconds);
    let error = outcome.err().map(|e| e.to_string());
    CriterionResult {
        id: c.id,
        name: c.name.to_string(),
        modules: c.modules.iter().map(|s| s.to_string()).collect(),
        passed: error.is_none() && checks.list.iter().all(|k| k.passed),
        checks: checks.list,
        error,
        seconds,
        budget_seconds: c.budget_seconds,
    }
}

fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn rel_tensor(a: &CovTensor, b: &CovTensor) -> Result<f64> {
    Ok(a.sub(b)?.frobenius() / b.frobenius().max(f64::MIN_POSITIVE))
}

/// `β ∈ [lo, hi]` log-uniform, `ω` uniform in the ball of radius `w_max`.
fn random_point(rng: &mut ChaCha8Rng, lo: f64, hi: f64, w_max: f64) -> Result<GeneralizedTemperature> {
    let beta = (rng.random_range(lo.ln()..hi.ln())).exp();
    loop {
        let w: [f64; 3] = std::array::from_fn(|_| rng.random_range(-w_max..w_max));
        if w.iter().map(|v| v * v).sum::<f64>() <= w_max * w_max {
            return GeneralizedTemperature::new(beta, w);
        }
    }
}

fn test_inertia() -> Matrix3<f64> {
    Matrix3::new(2.0, 0.3, -0.1, 0.3, 1.0, 0.2, -0.1, 0.2, 0.7)
}

fn rigid_hyperbolicity(_: &VerifyConfig, rng: &mut ChaCha8Rng, out: &mut Checks) -> Result<()> {
    for c in [0.5, 1.5, 3.0] {
        for (label, body) in [("spherical", RigidBodyParams::spherical(c, 1.3)?), ("general", RigidBodyParams::general(c, test_inertia())?)] {
            let target = -0.25 / c;
            let mut errs = Vec::new();
            for _ in 0..20 {
                let p = random_point(rng, 0.3, 3.0, 3.0)?;
                let field = |x: [f64; 4]| rb_metric(&body, &GeneralizedTemperature::new(x[0], [x[1], x[2], x[3]])?, Chart::BetaOmega)?.to_matrix();
                let x = [p.beta, p.omega[0], p.omega[1], p.omega[2]];
                let riem = christoffel_riemann(&field, x, [0.05 * p.beta, 0.05, 0.05, 0.05], Chart::BetaOmega)?;
                let g = rb_metric(&body, &p, Chart::BetaOmega)?;
                let seed = rng.random_range(0..u64::MAX);
                errs.extend(curvature::sectional_sample(&riem, &g, seed, 10)?.into_iter().map(|s| (s - target).abs()));
            }
            out.worst(format!("|K + 1/(4C)| C={c} {label}"), errs, 1e-8);
        }
    }
    Ok(())
}

fn random_symmetric(rng: &mut ChaCha8Rng) -> Matrix4<f64> {
    let a = Matrix4::from_fn(|_, _| rng.random_range(-1.0..1.0));
    (a + a.transpose()) * 0.5
}

fn dual_hessian_constancy(_: &VerifyConfig, rng: &mut ChaCha8Rng, out: &mut Checks) -> Result<()> {
    for c in [0.5, 1.5, 3.0] {
        let body = RigidBodyParams::spherical(c, 0.8)?;
        let mut errs = Vec::new();
        for _ in 0..20 {
            let p = random_point(rng, 0.3, 3.0, 3.0)?;
            let (k, g) = rb_dual_hessian_curvature(&body, &p)?;
            let h = random_symmetric(rng);
            errs.push((hessian_sectional(&k, &g, &h)? - 1.0 / c).abs());
        }
        out.worst(format!("|kappa - 1/C| C={c}"), errs, 1e-8);
    }
    Ok(())
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp()).collect()
}

fn partition_cross_validation(_: &VerifyConfig, _: &mut ChaCha8Rng, out: &mut Checks) -> Result<()> {
    let gp = GasParameters::unit();
    let (mut direct, mut marginal) = (Vec::new(), Vec::new());
    for theta in log_grid(1e-3, 1e5, 30) {
        let g = partition::z_rot_gamma(theta, &gp)?;
        direct.push(rel_diff(partition::z_rot_direct(theta, &gp)?, g));
        marginal.push(rel_diff(partition::z_rot(theta, &gp)?, g));
    }
    out.worst("direct quadrature vs incomplete gamma", direct, 1e-10);
    out.worst("radial marginal vs incomplete gamma", marginal, 1e-10);
    Ok(())
}

/// `E[m(x² + y²)]` for the uniform ball, in spherical coordinates with Gauss-Legendre
/// (the integrand is polynomial in `r` and `cos ϑ`, so the rule is exact).
fn uniform_ball_inertia(mass: f64, radius: f64) -> f64 {
    let (x, w) = gauss_legendre(8);
    let mut num = 0.0;
    let mut den = 0.0;
    for (xr, wr) in x.iter().zip(&w) {
        let r = 0.5 * radius * (xr + 1.0);
        for (c, wc) in x.iter().zip(&w) {
            let jac = r * r * 0.5 * radius * wr * wc;
            num += jac * r * r * (1.0 - c * c);
            den += jac;
        }
    }
    mass * num / den
}

fn zero_rotation_inertia(_: &VerifyConfig, _: &mut ChaCha8Rng, out: &mut Checks) -> Result<()> {
    for (m, r) in [(1.0, 1.0), (2.0, 1.5), (0.3, 0.7)] {
        let gp = GasParameters::new(m, r)?;
        let (i0, _) = partition::inertia(0.0, &gp)?;
        out.at_most(format!("|I(0) - oracle| m={m} R={r}"), (i0 - uniform_ball_inertia(m, r)).abs(), 1e-10);
    }
    out.at_most("oracle vs 2/5", (uniform_ball_inertia(1.0, 1.0) - 0.4).abs(), 1e-14);
    Ok(())
}

fn faa_di_bruno_vs_fd(_: &VerifyConfig, rng: &mut ChaCha8Rng, out: &mut Checks) -> Result<()> {
    let gp = GasParameters::unit();
    let mut errs = [Vec::new(), Vec::new(), Vec::new()];
    let mut sym = Vec::new();
    for _ in 0..10 {
        let p = random_point(rng, 0.5, 2.0, 3.0)?;
        for n in 2..=4 {
            let exact = cov_diff_z(n, &p, &gp, Chart::Flat)?;
            errs[n - 2].push(rel_tensor(&fd_oracle(n, &p, &gp)?, &exact)?);
            sym.push(exact.symmetry_defect() / exact.frobenius());
        }
    }
    let [e2, e3, e4] = errs;
    out.worst("D2z relative Frobenius", e2, 1e-5);
    out.worst("D3z relative Frobenius", e3, 1e-5);
    out.worst("D4z relative Frobenius", e4, 1e-3);
    out.worst("symmetry defect", sym, 1e-12);
    Ok(())
}

fn order_four_closed_forms(_: &VerifyConfig, rng: &mut ChaCha8Rng, out: &mut Checks) -> Result<()> {
    let gp = GasParameters::unit();
    let mut errs = Vec::new();
    for _ in 0..5 {
        let p = random_point(rng, 0.3, 3.0, 5.0)?;
        let table = cumulant_table(p.theta(), &gp, 4)?;
        for chart in [Chart::Flat, Chart::BetaOmega, Chart::UOmega, Chart::BetaM] {
            let frame = Coframe::new(&p, &gp, chart)?;
            for n in 1..=4 {
                errs.push(rel_tensor(&zrot_derivative(&frame, n, &table.c)?, &zrot_closed_form(&frame, n, &table.c)?)?);
            }
        }
    }
    out.worst("generic vs hand-expanded", errs, 1e-10);
    Ok(())
}

fn moment_cumulant_duality(_: &VerifyConfig, rng: &mut ChaCha8Rng, out: &mut Checks) -> Result<()> {
    let mut round = Vec::new();
    for _ in 0..50 {
        let mut c = vec![0.0];
        c.extend((0..8).map(|_| rng.random_range(-1.0..1.0)));
        let s = PowerSeries::new(c.clone())?;
        let back = s.exp()?.log()?;
        round.extend(c.iter().zip(&back.coeffs).map(|(a, b)| (a - b).abs()));
        let e = s.exp()?;
        let again = e.log()?.exp()?;
        round.extend(e.coeffs.iter().zip(&again.coeffs).map(|(a, b)| (a - b).abs() / a.abs().max(1.0)));
    }
    out.worst("exp/log round trip", round, 1e-12);
    let gp = GasParameters::unit();
    let mut errs = Vec::new();
    for theta in [0.0, 1.0, 10.0, 1e3] {
        let table = cumulant_table(theta, &gp, 6)?;
        for n in 1..=6 {
            errs.push(rel_diff(fn_expected(theta, &gp, n)?, table.get(n)));
        }
    }
    out.worst("E[f_n] vs c_n", errs, 1e-9);
    Ok(())
}

fn scaling_law(_: &VerifyConfig, rng: &mut ChaCha8Rng, out: &mut Checks) -> Result<()> {
    let gp = GasParameters::unit();
    let mut errs = Vec::new();
    for _ in 0..10 {
        let p = random_point(rng, 0.3, 3.0, 3.0)?;
        for eta in [0.5, 2.0, 10.0] {
            let lhs = partition::z(&GeneralizedTemperature::new(p.beta, p.omega.map(|w| eta * w))?, &gp)?;
            let rhs = 3.0 * f64::ln(eta) + partition::z(&GeneralizedTemperature::new(eta * eta * p.beta, p.omega)?, &gp)?;
            errs.push((lhs - rhs).abs() / lhs.abs().max(1.0));
        }
    }
    out.worst("z(beta, eta omega) - 3 ln eta - z(eta^2 beta, omega)", errs, 1e-10);
    Ok(())
}

fn block_diagonality(_: &VerifyConfig, rng: &mut ChaCha8Rng, out: &mut Checks) -> Result<()> {
    let mut cross = Vec::new();
    let mut blocks = Vec::new();
    for (m, r) in [(1.0, 1.0), (2.0, 0.5)] {
        let gp = GasParameters::new(m, r)?;
        for _ in 0..10 {
            let p = random_point(rng, 0.3, 3.0, 4.0)?;
            let g = metric(&p, &gp, Chart::BetaM)?.to_matrix()?;
            let scale = g.norm();
            cross.push((1..4).map(|a| g[(0, a)].abs().max(g[(a, 0)].abs())).fold(0.0, f64::max) / scale);
            let (g_bb, mm) = beta_m_blocks(&p, &gp)?;
            blocks.push(rel_diff(g[(0, 0)], g_bb));
            blocks.push((g.fixed_view::<3, 3>(1, 1) - mm).norm() / mm.norm());
        }
    }
    out.worst("cross block / |g|", cross, 1e-9);
    out.worst("diagonal blocks vs closed form", blocks, 1e-9);
    Ok(())
}

const LIMIT_GRID: [f64; 3] = [1e2, 1e3, 1e4];

fn sweep_check(out: &mut Checks, sweeps: &[SweepResult], quantity: &str, tolerance: f64) -> Result<()> {
    let s = sweeps.iter().find(|s| s.quantity == quantity).ok_or_else(|| Error::Domain(format!("missing sweep {quantity}")))?;
    if let Some((t, e)) = s.failures.first() {
        return Err(Error::Domain(format!("{quantity} failed at θ = {t}: {e}")));
    }
    let last = s.at(1e4).ok_or_else(|| Error::Domain(format!("{quantity} has no θ = 1e4 entry")))?;
    out.at_most(format!("{quantity} error at 1e4"), last.rel_error, tolerance);
    out.holds(format!("{quantity} error decreasing"), s.monotone);
    Ok(())
}

fn asymptotic_limits(_: &VerifyConfig, _: &mut ChaCha8Rng, out: &mut Checks) -> Result<()> {
    let sweeps = limit_suite(&GasParameters::unit(), &LIMIT_GRID)?;
    sweep_check(out, &sweeps, "cumulant_2", 0.05)?;
    sweep_check(out, &sweeps, "cumulant_3", 0.05)?;
    sweep_check(out, &sweeps, "inertia", 1e-3)?;
    sweep_check(out, &sweeps, "norm_du", 0.05)?;
    sweep_check(out, &sweeps, "norm_domega", 0.05)?;
    sweep_check(out, &sweeps, "heat_capacity", 0.05)?;
    Ok(())
}

fn curvature_limit(_: &VerifyConfig, _: &mut ChaCha8Rng, out: &mut Checks) -> Result<()> {
    let sweeps = limit_suite(&GasParameters::unit(), &LIMIT_GRID)?;
    sweep_check(out, &sweeps, "sectional", 0.05)?;
    sweep_check(out, &sweeps, "kn_deviation", 0.05)?;
    Ok(())
}

fn weak_limit(_: &VerifyConfig, _: &mut ChaCha8Rng, out: &mut Checks) -> Result<()> {
    let gp = GasParameters::unit();
    let p = GeneralizedTemperature::new(1.0, [0.0, 0.0, 100.0])?;
    let r2 = gp.radius * gp.radius;
    type Case = (&'static str, fn(CylPoint) -> f64, f64);
    let cases: [Case; 4] = [
        ("1", |_| 1.0, 1.0),
        ("rho^2", |q| q.rho * q.rho, r2),
        ("y^2", |q| q.y * q.y, r2),
        ("q_x^2", |q| (q.rho * q.phi.cos()).powi(2), r2),
    ];
    for (label, f, unit) in cases {
        let (integral, circle) = weak_limit_integral(&f, &p, &gp)?;
        out.at_most(format!("|E[{label}] - circle average|"), (integral - circle).abs() / unit, 0.01);
    }
    Ok(())
}

fn watson_lemma(_: &VerifyConfig, _: &mut ChaCha8Rng, out: &mut Checks) -> Result<()> {
    type Case = (&'static str, fn(f64) -> f64, f64);
    let cases: [Case; 3] = [("F=1 alpha=0", |_| 1.0, 0.0), ("F=1 alpha=1/2", |_| 1.0, 0.5), ("F=x alpha=1/2", |x| x, 0.5)];
    for (label, f, alpha) in cases {
        let s = watson_first_order(&f, alpha, 1.0, &[1e4])?;
        let p = s.last().ok_or_else(|| Error::Domain(format!("{label}: {:?}", s.failures)))?;
        out.at_most(format!("{label} relative error"), p.rel_error, 5e-3);
    }
    Ok(())
}

/// Smooth test observable `a·sin(b·x + c) + d·(x·x)` of the flat coordinates.
fn random_observable(rng: &mut ChaCha8Rng) -> ObservableFn {
    let a: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
    let b: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
    let c = rng.random_range(-PI..PI);
    let d: [f64; 4] = std::array::from_fn(|_| rng.random_range(-0.5..0.5));
    ObservableFn::new(move |x| {
        let lin: f64 = (0..4).map(|i| b[i] * x[i]).sum::<f64>() + c;
        let quad: f64 = (0..4).map(|i| d[i] * x[i] * x[i]).sum();
        Ok(a[0] * lin.sin() + a[1] * lin.cos() * x[0] + a[2] * quad + a[3] * x[1] * x[2])
    })
}

fn product(f: &ObservableFn, g: &ObservableFn) -> ObservableFn {
    let (f, g) = (f.clone(), g.clone());
    ObservableFn::new(move |x| Ok(f.eval(x)? * g.eval(x)?))
}

/// `φ(β, ‖M‖²)` with its exact differential `φ_β dβ + 2φ_s Σ M_a dM_a`; `phi`
/// returns the value and the two partials.
fn casimir(gp: GasParameters, phi: fn(f64, f64) -> (f64, [f64; 2])) -> ObservableFn {
    let parts = move |x: [f64; 4]| -> Result<(f64, [f64; 2], [f64; 3])> {
        let p = GeneralizedTemperature::from_flat(FlatPoint::from_array(x))?;
        let (_, m) = momenta(&p, &gp)?;
        let (v, d) = phi(x[0], m.iter().map(|c| c * c).sum());
        Ok((v, d, m))
    };
    ObservableFn::with_differential(
        move |x| Ok(parts(x)?.0),
        move |x| {
            let (_, [d_beta, d_s], m) = parts(x)?;
            let mut out = [d_beta, 0.0, 0.0, 0.0];
            for (a, ma) in m.iter().enumerate() {
                let dm = ObservableFn::momentum(a, gp).differential(x)?;
                for i in 0..4 {
                    out[i] += 2.0 * d_s * ma * dm[i];
                }
            }
            Ok(out)
        },
    )
}

fn poisson_algebra(_: &VerifyConfig, rng: &mut ChaCha8Rng, out: &mut Checks) -> Result<()> {
    let gp = GasParameters::unit();
    let mut anti = Vec::new();
    let mut leibniz = Vec::new();
    let mut algebra = Vec::new();
    let mut commuting = Vec::new();
    let mut leaf = Vec::new();
    let casimirs = [casimir(gp, |_, s| (s, [0.0, 1.0])), casimir(gp, |b, s| ((b * s).sin() + b.ln(), [s * (b * s).cos() + 1.0 / b, b * (b * s).cos()])), casimir(gp, |b, s| {
        let q = (1.0 + s).sqrt();
        (q * b * b, [2.0 * q * b, 0.5 * b * b / q])
    })];
    let omega: Vec<ObservableFn> = (0..3).map(|a| ObservableFn::new(move |x| Ok(-x[a + 1] / x[0]))).collect();
    let mom: Vec<ObservableFn> = (0..3).map(|a| ObservableFn::momentum(a, gp)).collect();
    for _ in 0..5 {
        let p = random_point(rng, 0.5, 2.0, 2.0)?;
        let (_, m) = momenta(&p, &gp)?;
        let f1 = random_observable(rng);
        let f2 = random_observable(rng);
        let h = random_observable(rng);
        let a = bracket(&f1, &h, &p, &gp)?;
        anti.push((a + bracket(&h, &f1, &p, &gp)?).abs());
        let lhs = bracket(&product(&f1, &f2), &h, &p, &gp)?;
        let x = p.to_flat().as_array();
        let rhs = f1.eval(x)? * bracket(&f2, &h, &p, &gp)? + f2.eval(x)? * a;
        leibniz.push((lhs - rhs).abs() / rhs.abs().max(1.0));
        for i in 0..3 {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            algebra.push((bracket(&mom[i], &mom[j], &p, &gp)? - m[k]).abs());
        }
        let factor = leaf_factor(&p, &gp)?;
        let inv_i = 1.0 / partition::inertia(p.theta(), &gp)?.0;
        leaf.push(rel_diff(factor, inv_i));
        leaf.push((bracket(&omega[0], &omega[1], &p, &gp)? - factor * p.omega[2]).abs());
    }
    for _ in 0..20 {
        let p = random_point(rng, 0.5, 2.0, 2.0)?;
        let h = random_observable(rng);
        for c in &casimirs {
            commuting.push(bracket(c, &h, &p, &gp)?.abs());
        }
    }
    out.worst("antisymmetry", anti, 1e-6);
    out.worst("Leibniz", leibniz, 1e-6);
    out.worst("{M_i, M_j} - M_k", algebra, 1e-6);
    out.worst("Casimir brackets", commuting, 1e-6);
    out.worst("leaf factor vs 1/I and {omega_x, omega_y}", leaf, 1e-6);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_ball_oracle_is_two_fifths() {
        assert!((uniform_ball_inertia(1.0, 1.0) - 0.4).abs() < 1e-15);
        assert!((uniform_ball_inertia(2.0, 3.0) - 0.4 * 18.0).abs() < 1e-12);
    }

    #[test]
    fn filter_and_validation() {
        let cfg = VerifyConfig { only: Some("nonsense".into()), ..Default::default() };
        assert!(run_verification(&cfg).is_err());
        let cfg = VerifyConfig { tolerance_scale: 0.0, ..Default::default() };
        assert!(run_verification(&cfg).is_err());
        assert!(run_criterion(99, &VerifyConfig::default()).is_err());
    }

    #[test]
    fn loose_checks_pass_and_nan_fails() {
        let mut c = Checks::new(2.0);
        c.at_most("a", 1.5, 1.0);
        c.at_most("b", f64::NAN, 1.0);
        c.worst("c", [0.1, f64::NAN], 1.0);
        assert!(c.list[0].passed);
        assert!(!c.list[1].passed);
        assert!(!c.list[2].passed);
    }
}
