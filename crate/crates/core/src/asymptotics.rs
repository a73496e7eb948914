//! High-angular-velocity limits: Watson's lemma, the weak limit of the Gibbs
//! measures, and convergence sweeps of every limit statement over a θ grid.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::covderiv::{cov_diff_z_upto, Coframe};
use crate::cumulants::{cumulant_limit, cumulant_table, moment_limit_constant};
use crate::curvature::{self, hessian_curvature_from, kn_deviation, metric_inverse, riemann_from_hessian};
use crate::error::{Error, Result};
use crate::model::{GasParameters, GeneralizedTemperature};
use crate::partition::{self, RadialMarginal};
use crate::quad::{self, gauss_legendre};
use crate::rigidbody::{rb_cov_diff, rigid_curvature_form, RigidBodyParams};
use crate::tensor::{Chart, CovTensor};

/// Relative errors below this are treated as round-off when judging monotonicity.
pub const NOISE_FLOOR: f64 = 1e-12;
/// Heat capacity of the limiting rigid body: 3/2 kinetic plus 3/2 from confinement.
pub const LIMIT_HEAT_CAPACITY: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub theta: f64,
    pub value: f64,
    pub limit: f64,
    pub rel_error: f64,
}

/// One quantity tracked across a θ (or λ) grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub quantity: String,
    pub points: Vec<SweepPoint>,
    /// Error non-increasing over the last three grid points, up to [`NOISE_FLOOR`].
    pub monotone: bool,
    /// Least-squares slope of `ln(error)` against `ln θ` over points above the noise floor.
    pub decay_exponent: Option<f64>,
    /// Grid points whose evaluation failed, with the reason.
    pub failures: Vec<(f64, String)>,
}

impl SweepResult {
    /// Builds a sweep from `(θ, value)` pairs against a fixed limit. With a zero
    /// limit the error is absolute.
    pub fn from_values(quantity: &str, limit: f64, values: Vec<(f64, Result<f64>)>) -> Self {
        let mut points = Vec::new();
        let mut failures = Vec::new();
        for (theta, v) in values {
            match v {
                Ok(value) => {
                    let err = if limit == 0.0 { value.abs() } else { ((value - limit) / limit).abs() };
                    points.push(SweepPoint { theta, value, limit, rel_error: err });
                }
                Err(e) => failures.push((theta, e.to_string())),
            }
        }
        let monotone = is_monotone(&points);
        let decay_exponent = fit_exponent(&points);
        SweepResult { quantity: quantity.to_string(), points, monotone, decay_exponent, failures }
    }

    pub fn last(&self) -> Option<&SweepPoint> {
        self.points.last()
    }

    pub fn at(&self, theta: f64) -> Option<&SweepPoint> {
        self.points.iter().find(|p| (p.theta / theta - 1.0).abs() < 1e-12)
    }
}

fn is_monotone(points: &[SweepPoint]) -> bool {
    let tail = &points[points.len().saturating_sub(3)..];
    tail.windows(2).all(|w| w[1].rel_error <= w[0].rel_error.max(NOISE_FLOOR))
}

fn fit_exponent(points: &[SweepPoint]) -> Option<f64> {
    let xy: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.rel_error > NOISE_FLOOR && p.theta > 0.0)
        .map(|p| (p.theta.ln(), p.rel_error.ln()))
        .collect();
    if xy.len() < 2 {
        return None;
    }
    let n = xy.len() as f64;
    let (sx, sy) = xy.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let sxx: f64 = xy.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// `λ^{α+1} e^{−λA} ∫₀^A F(x)(A − x)^α e^{λx} dx` over a λ grid, against `F(A)Γ(α+1)`.
///
/// Evaluated as `λ^{α+1} ∫ F(A − v²) v^{2α} e^{−λv²} 2v dv` so that half-integer
/// `α` gives a smooth integrand.
pub fn watson_first_order(f: &(dyn Fn(f64) -> f64 + Sync), alpha: f64, a: f64, lambdas: &[f64]) -> Result<SweepResult> {
    if !(alpha > -1.0) {
        return Err(Error::Domain(format!("α must exceed −1, got {alpha}")));
    }
    if !(a > 0.0) {
        return Err(Error::Domain(format!("A must be positive, got {a}")));
    }
    let limit = f(a) * gamma(alpha + 1.0);
    let values = lambdas
        .iter()
        .map(|&lam| {
            let v = (|| {
                let s = lam.sqrt().recip();
                let top = a.sqrt().min(40.0 * s);
                let breaks: Vec<f64> = [0.5, 1.0, 2.0, 4.0, 8.0, 16.0].iter().map(|c| c * s).filter(|&b| b < top).collect();
                let integrand = |v: f64| f(a - v * v) * v.powf(2.0 * alpha + 1.0) * 2.0 * (-lam * v * v).exp();
                let tol = quad::Tolerance { abs: 0.0, ..Default::default() };
                let est = quad::integrate(integrand, 0.0, top, &breaks, tol)?;
                Ok(lam.powf(alpha + 1.0) * est.value)
            })();
            (lam, v)
        })
        .collect();
    Ok(SweepResult::from_values("watson", limit, values))
}

/// Position in cylindrical coordinates aligned with ω: distance `rho` to the
/// axis, axial coordinate `y`, and azimuth `phi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylPoint {
    pub rho: f64,
    pub y: f64,
    pub phi: f64,
}

/// `∫ f dν_{β,ω}` over the ball, and the average of `f` over the equatorial circle
/// of radius `R` orthogonal to ω.
///
/// With `ρ = R√(1 − t²)` and `y = R t η` the measure is
/// `∝ t² e^{−λt²} dt dη dφ` on `[0, 1] × [−1, 1] × [0, 2π)`.
pub fn weak_limit_integral(
    f: &dyn Fn(CylPoint) -> f64,
    p: &GeneralizedTemperature,
    gp: &GasParameters,
) -> Result<(f64, f64)> {
    if p.omega_sq() == 0.0 {
        return Err(Error::Domain("the weak limit needs a rotation axis (ω ≠ 0)".into()));
    }
    let r = gp.radius;
    let rm = RadialMarginal::new(p.theta(), gp)?;
    let (eta, w_eta) = gauss_legendre(32);
    let n_phi = 64;
    let phis: Vec<f64> = (0..n_phi).map(|k| 2.0 * PI * k as f64 / n_phi as f64).collect();
    let slice = |t: f64| -> f64 {
        let rho = r * (1.0 - t * t).max(0.0).sqrt();
        let mut acc = 0.0;
        for (e, we) in eta.iter().zip(&w_eta) {
            let y = r * t * e;
            let ring: f64 = phis.iter().map(|&phi| f(CylPoint { rho, y, phi })).sum::<f64>() / n_phi as f64;
            acc += we * ring;
        }
        0.5 * acc
    };
    let integral = rm.expect(slice)?;
    let circle = phis.iter().map(|&phi| f(CylPoint { rho: r, y: 0.0, phi })).sum::<f64>() / n_phi as f64;
    Ok((integral, circle))
}

/// Default grid `θ ∈ {10⁰, 10¹, …, 10⁵}`.
pub fn default_grid() -> Vec<f64> {
    (0..=5).map(|k| 10f64.powi(k)).collect()
}

/// Everything the suite needs at one θ, evaluated at `β = 1`, `ω ∥ z`.
struct Snapshot {
    moments: Vec<f64>,
    cumulants: Vec<f64>,
    inertia: f64,
    norm_du: f64,
    norm_domega: f64,
    heat_capacity: f64,
    dnz: [f64; 3],
    hessian_curvature: f64,
    sectional_worst: f64,
    kn: f64,
}

fn snapshot(theta: f64, gp: &GasParameters) -> Result<Snapshot> {
    let p = GeneralizedTemperature::new(1.0, [0.0, 0.0, theta.sqrt()])?;
    let b = p.beta;
    let (_, central) = partition::central_moments(theta, gp, 4)?;
    let moments = (2..=4).map(|k| theta.powi(k as i32) * central[k]).collect();
    let table = cumulant_table(theta, gp, 4)?;
    let cumulants = (2..=4).map(|n| theta.powi(n as i32) * table.get(n)).collect();
    let (inertia, _) = partition::inertia(theta, gp)?;

    let chart = Chart::UOmega;
    let d = cov_diff_z_upto(4, &p, gp, chart)?;
    let g = &d[1];
    let g_inv = metric_inverse(g)?;
    let frame = Coframe::new(&p, gp, chart)?;
    // du = e⁰ and dω_a = e^{a+1} in this chart
    let norm_du = b * g_inv[(0, 0)];
    // so₃ forms measured with the Frobenius norm of the hat map (twice the Euclidean one)
    let norm_domega = b * 2.0 * (1..4).map(|a| g_inv[(a, a)]).sum::<f64>();
    let heat_capacity = g.get(&[0, 0]) / b;

    let i_inf = gp.inertia_limit();
    let rigid = RigidBodyParams::spherical(LIMIT_HEAT_CAPACITY, i_inf)?;
    let mut dnz = [0.0; 3];
    for n in 2..=4 {
        let lim = rb_cov_diff(&rigid, &p, n, chart)?;
        dnz[n - 2] = d[n - 1].sub(&lim)?.metric_norm(&g_inv) / lim.metric_norm(&g_inv);
    }
    let k = hessian_curvature_from(g, &d[2], &d[3])?;
    let k_lim = rigid_curvature_form(LIMIT_HEAT_CAPACITY, i_inf, b, &frame.du(), &frame.domega.comps)?;
    let hessian_curvature = k.sub(&k_lim)?.metric_norm(&g_inv) / k_lim.metric_norm(&g_inv);
    let riem = riemann_from_hessian(&k)?;
    let secs = curvature::sectional_sample(&riem, g, curvature::DEFAULT_SEED, curvature::RANDOM_PLANES)?;
    let target = -1.0 / (4.0 * LIMIT_HEAT_CAPACITY);
    let sectional_worst = secs.iter().copied().max_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs())).unwrap_or(f64::NAN);
    let kn = kn_deviation(&riem, g, &g_inv)?;
    Ok(Snapshot { moments, cumulants, inertia, norm_du, norm_domega, heat_capacity, dnz, hessian_curvature, sectional_worst, kn })
}

/// Deviation of `Dⁿz` from its rigid-body limit at one θ, all in the `(u, ω)` chart.
pub fn limit_tensor_deviation(theta: f64, gp: &GasParameters) -> Result<Vec<(String, CovTensor, CovTensor)>> {
    let p = GeneralizedTemperature::new(1.0, [0.0, 0.0, theta.sqrt()])?;
    let d = cov_diff_z_upto(4, &p, gp, Chart::UOmega)?;
    let rigid = RigidBodyParams::spherical(LIMIT_HEAT_CAPACITY, gp.inertia_limit())?;
    (2..=4).map(|n| Ok((format!("D{n}z"), d[n - 1].clone(), rb_cov_diff(&rigid, &p, n, Chart::UOmega)?))).collect()
}

/// Convergence sweeps of every high-velocity limit at `β = 1`. Grid entries are
/// evaluated in parallel; failures are recorded per entry.
pub fn limit_suite(gp: &GasParameters, grid: &[f64]) -> Result<Vec<SweepResult>> {
    if grid.is_empty() {
        return Err(Error::Domain("empty θ grid".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) || grid[0] <= 0.0 || *grid.last().unwrap() > 1e6 {
        return Err(Error::Domain("θ grid must be positive, strictly increasing and at most 1e6".into()));
    }
    let snaps: Vec<(f64, Result<Snapshot>)> = grid.par_iter().map(|&t| (t, snapshot(t, gp))).collect();
    let collect = |f: &dyn Fn(&Snapshot) -> f64| -> Vec<(f64, Result<f64>)> {
        snaps.iter().map(|(t, s)| (*t, s.as_ref().map(f).map_err(Clone::clone))).collect()
    };
    let mut out = Vec::new();
    for k in 2..=4 {
        out.push(SweepResult::from_values(&format!("moment_{k}"), moment_limit_constant(k), collect(&|s| s.moments[k - 2])));
    }
    for n in 2..=4 {
        out.push(SweepResult::from_values(&format!("cumulant_{n}"), cumulant_limit(n), collect(&|s| s.cumulants[n - 2])));
    }
    let i_inf = gp.inertia_limit();
    out.push(SweepResult::from_values("inertia", i_inf, collect(&|s| s.inertia)));
    out.push(SweepResult::from_values("norm_du", 1.0 / LIMIT_HEAT_CAPACITY, collect(&|s| s.norm_du)));
    out.push(SweepResult::from_values("norm_domega", 6.0 / i_inf, collect(&|s| s.norm_domega)));
    out.push(SweepResult::from_values("heat_capacity", LIMIT_HEAT_CAPACITY, collect(&|s| s.heat_capacity)));
    for n in 2..=4 {
        out.push(SweepResult::from_values(&format!("rigid_D{n}z"), 0.0, collect(&|s| s.dnz[n - 2])));
    }
    out.push(SweepResult::from_values("hessian_curvature", 0.0, collect(&|s| s.hessian_curvature)));
    out.push(SweepResult::from_values("sectional", -1.0 / 12.0, collect(&|s| s.sectional_worst)));
    out.push(SweepResult::from_values("kn_deviation", 0.0, collect(&|s| s.kn)));
    Ok(out)
}
