//! Metric, Hessian curvature, Riemann tensor and sectional curvatures.
//!
//! For a Hessian metric `g = D²φ` of a flat torsion-free connection `D`,
//!
//! ```text
//! K_abcd = ½ (D⁴φ_abcd − g^{ef} D³φ_ace D³φ_bdf)
//! R_abcd = ½ (K_abcd − K_bacd)
//! ```
//!
//! and the sectional curvature of the plane `u ∧ v` is
//! `R(u, v, u, v) / (|u|²|v|² − g(u, v)²)`. With this convention a Hessian
//! space form `K = (c/2)(g_ab g_cd + g_ad g_cb)` has Riemannian sectional
//! curvature `−c/4`, and a space of constant curvature `κ` has
//! `R = κ (g∧g)/2` where `((g∧g)/2)_abcd = g_ac g_bd − g_ad g_bc`.

use nalgebra::Matrix4;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::covderiv::{cov_diff_z_upto, Coframe};
use crate::error::{Error, Result};
use crate::model::{GasParameters, GeneralizedTemperature, KINETIC_HEAT_CAPACITY};
use crate::partition;
use crate::tensor::{Chart, CovTensor, DIM};

/// Default seed for plane sampling.
pub const DEFAULT_SEED: u64 = 0x5eed_cafe;
/// Number of random planes sampled per point, on top of the coordinate planes.
pub const RANDOM_PLANES: usize = 50;

/// Inverse of an order-2 tensor viewed as a matrix.
pub fn metric_inverse(g: &CovTensor) -> Result<Matrix4<f64>> {
    g.to_matrix()?
        .try_inverse()
        .ok_or_else(|| Error::ChartSingular("metric is not invertible".into()))
}

/// `K_abcd = ½(D⁴φ_abcd − g^{ef} D³φ_ace D³φ_bdf)`.
pub fn hessian_curvature_from(g: &CovTensor, d3: &CovTensor, d4: &CovTensor) -> Result<CovTensor> {
    if g.order() != 2 || d3.order() != 3 || d4.order() != 4 {
        return Err(Error::Arity("expected tensors of order 2, 3 and 4".into()));
    }
    let g_inv = metric_inverse(g)?;
    // raise the last slot: t_ac^f = D³φ_ace g^{ef}
    let raised = CovTensor::from_fn(3, d3.chart(), |i| (0..DIM).map(|e| d3.get(&[i[0], i[1], e]) * g_inv[(e, i[2])]).sum())?;
    let mut quad = CovTensor::zeros(4, d4.chart())?;
    for a in 0..DIM {
        for b in 0..DIM {
            for c in 0..DIM {
                for d in 0..DIM {
                    let v: f64 = (0..DIM).map(|f| d3.get(&[a, c, f]) * raised.get(&[b, d, f])).sum();
                    quad.set(&[a, b, c, d], v);
                }
            }
        }
    }
    Ok(d4.sub(&quad)?.scale(0.5))
}

/// `R_abcd = ½(K_abcd − K_bacd)`.
pub fn riemann_from_hessian(k: &CovTensor) -> Result<CovTensor> {
    Ok(k.sub(&k.permute(&[1, 0, 2, 3])?)?.scale(0.5))
}

/// `((g∧g)/2)_abcd = g_ac g_bd − g_ad g_bc`.
pub fn kulkarni_nomizu_half(g: &CovTensor) -> Result<CovTensor> {
    CovTensor::from_fn(4, g.chart(), |i| g.get(&[i[0], i[2]]) * g.get(&[i[1], i[3]]) - g.get(&[i[0], i[3]]) * g.get(&[i[1], i[2]]))
}

/// Largest violation of the algebraic Riemann symmetries (pair antisymmetry,
/// pair exchange, first Bianchi identity), relative to the largest component.
pub fn riemann_symmetry_defect(r: &CovTensor) -> f64 {
    let scale = r.max_abs().max(f64::MIN_POSITIVE);
    let mut worst: f64 = 0.0;
    for a in 0..DIM {
        for b in 0..DIM {
            for c in 0..DIM {
                for d in 0..DIM {
                    let v = r.get(&[a, b, c, d]);
                    worst = worst
                        .max((v + r.get(&[b, a, c, d])).abs())
                        .max((v + r.get(&[a, b, d, c])).abs())
                        .max((v - r.get(&[c, d, a, b])).abs())
                        .max((v + r.get(&[a, c, d, b]) + r.get(&[a, d, b, c])).abs());
                }
            }
        }
    }
    worst / scale
}

fn inner(g: &CovTensor, u: &[f64; 4], v: &[f64; 4]) -> f64 {
    g.eval(&[*u, *v]).expect("order-2 tensor")
}

/// Sectional curvature of the plane spanned by `u` and `v`.
pub fn sectional(riem: &CovTensor, g: &CovTensor, u: &[f64; 4], v: &[f64; 4]) -> Result<f64> {
    let (uu, vv, uv) = (inner(g, u, u), inner(g, v, v), inner(g, u, v));
    let gram = uu * vv - uv * uv;
    if !(gram > 1e-12 * uu * vv) {
        return Err(Error::DegeneratePlane);
    }
    Ok(riem.eval(&[*u, *v, *u, *v])? / gram)
}

/// Hessian sectional curvature `K_abcd h^{ac} h^{bd} / ‖h‖²` for a symmetric
/// contravariant 2-tensor `h`.
pub fn hessian_sectional(k: &CovTensor, g: &CovTensor, h: &Matrix4<f64>) -> Result<f64> {
    if (h - h.transpose()).norm() > 1e-12 * h.norm() {
        return Err(Error::Domain("h must be symmetric".into()));
    }
    let gm = g.to_matrix()?;
    let norm2 = (gm * h * gm * h).trace();
    if !(norm2 > 0.0) || h.norm() == 0.0 {
        return Err(Error::DegeneratePlane);
    }
    let mut acc = 0.0;
    for a in 0..DIM {
        for b in 0..DIM {
            for c in 0..DIM {
                for d in 0..DIM {
                    acc += k.get(&[a, b, c, d]) * h[(a, c)] * h[(b, d)];
                }
            }
        }
    }
    Ok(acc / norm2)
}

/// The 6 coordinate planes followed by `n` planes with random coefficients in a
/// `g`-orthonormal frame (fixed-seed ChaCha8).
pub fn sample_planes(g: &CovTensor, seed: u64, n: usize) -> Result<Vec<([f64; 4], [f64; 4])>> {
    let gm = g.to_matrix()?;
    let eig = gm.symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::Domain("metric is not positive-definite".into()));
    }
    // columns of `frame` are g-orthonormal
    let frame = eig.eigenvectors * Matrix4::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
    let mut planes = Vec::with_capacity(6 + n);
    for i in 0..DIM {
        for j in i + 1..DIM {
            let mut u = [0.0; 4];
            let mut v = [0.0; 4];
            u[i] = 1.0;
            v[j] = 1.0;
            planes.push((u, v));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while planes.len() < 6 + n {
        let a: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let b: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let u = frame * nalgebra::Vector4::from(a);
        let v = frame * nalgebra::Vector4::from(b);
        planes.push((u.into(), v.into()));
    }
    Ok(planes)
}

/// Sectional curvatures over [`sample_planes`], skipping degenerate planes.
pub fn sectional_sample(riem: &CovTensor, g: &CovTensor, seed: u64, n: usize) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (u, v) in sample_planes(g, seed, n)? {
        match sectional(riem, g, &u, &v) {
            Ok(s) => out.push(s),
            Err(Error::DegeneratePlane) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// `g = D²z` of the gas in `chart`.
pub fn metric(p: &GeneralizedTemperature, gp: &GasParameters, chart: Chart) -> Result<CovTensor> {
    Ok(cov_diff_z_upto(2, p, gp, chart)?.pop().expect("two differentials"))
}

/// `g = (3/2)dβ²/β² + βI⟨dω|dω⟩ + ½I′ dθ⊗dθ`, assembled from the inertia function.
pub fn metric_closed_form(p: &GeneralizedTemperature, gp: &GasParameters, chart: Chart) -> Result<CovTensor> {
    let (i, ip) = partition::inertia(p.theta(), gp)?;
    let frame = Coframe::new(p, gp, chart)?;
    let b = p.beta;
    let mut g = frame.dbeta.outer(&frame.dbeta)?.scale(KINETIC_HEAT_CAPACITY / (b * b));
    g.add_scaled(&frame.omega_pair()?, b * i)?;
    let dt = frame.dtheta()?;
    g.add_scaled(&dt.outer(&dt)?, 0.5 * ip)?;
    Ok(g)
}

/// Closed-form blocks of the metric in the `(β, M)` chart:
/// `g_ββ = (3/2 + ½ I I′ θ² / (I + 2θI′)) / β²` and `g_MM = β A⁻¹`, whose
/// eigenvalues are `β/(I + 2θI′)` along ω and `β/I` across it.
pub fn beta_m_blocks(p: &GeneralizedTemperature, gp: &GasParameters) -> Result<(f64, nalgebra::Matrix3<f64>)> {
    let (i, ip) = partition::inertia(p.theta(), gp)?;
    let th = p.theta();
    let radial = i + 2.0 * th * ip;
    let g_bb = (KINETIC_HEAT_CAPACITY + 0.5 * i * ip * th * th / radial) / (p.beta * p.beta);
    let w2 = p.omega_sq();
    let w = p.omega_vec();
    let proj = if w2 > 0.0 { w * w.transpose() / w2 } else { nalgebra::Matrix3::zeros() };
    let block = (nalgebra::Matrix3::identity() - proj) * (p.beta / i) + proj * (p.beta / radial);
    Ok((g_bb, block))
}

/// Riemann tensor from the Levi-Civita connection of a metric field, by finite
/// differences of `metric(x)` in whatever chart `x` lives in:
///
/// ```text
/// R^a_bcd = ∂_c Γ^a_db − ∂_d Γ^a_cb + Γ^a_ce Γ^e_db − Γ^a_de Γ^e_cb,  R_abcd = g_ae R^e_bcd
/// ```
///
/// Central differences with two Richardson levels (steps `h`, `h/2`, `h/4`).
pub fn christoffel_riemann(
    metric: &dyn Fn([f64; 4]) -> Result<Matrix4<f64>>,
    x: [f64; 4],
    h: [f64; 4],
    chart: Chart,
) -> Result<CovTensor> {
    let shifted = |steps: &[(usize, f64)]| -> Result<Matrix4<f64>> {
        let mut y = x;
        for &(i, s) in steps {
            y[i] += s;
        }
        metric(y)
    };
    let richardson = |f: &dyn Fn(f64) -> Result<Matrix4<f64>>| -> Result<Matrix4<f64>> {
        let (a, b, c) = (f(1.0)?, f(0.5)?, f(0.25)?);
        let r1 = (b * 4.0 - a) / 3.0;
        let r2 = (c * 4.0 - b) / 3.0;
        Ok((r2 * 16.0 - r1) / 15.0)
    };
    let g = metric(x)?;
    let g_inv = g.try_inverse().ok_or_else(|| Error::ChartSingular("metric is not invertible".into()))?;
    let mut dg = [Matrix4::zeros(); 4];
    for c in 0..DIM {
        dg[c] = richardson(&|s| {
            let hc = h[c] * s;
            Ok((shifted(&[(c, hc)])? - shifted(&[(c, -hc)])?) / (2.0 * hc))
        })?;
    }
    let mut ddg = [[Matrix4::zeros(); 4]; 4];
    for c in 0..DIM {
        for d in c..DIM {
            let m = richardson(&|s| {
                let (hc, hd) = (h[c] * s, h[d] * s);
                if c == d {
                    Ok((shifted(&[(c, hc)])? - g * 2.0 + shifted(&[(c, -hc)])?) / (hc * hc))
                } else {
                    let pp = shifted(&[(c, hc), (d, hd)])?;
                    let pm = shifted(&[(c, hc), (d, -hd)])?;
                    let mp = shifted(&[(c, -hc), (d, hd)])?;
                    let mm = shifted(&[(c, -hc), (d, -hd)])?;
                    Ok((pp - pm - mp + mm) / (4.0 * hc * hd))
                }
            })?;
            ddg[c][d] = m;
            ddg[d][c] = m;
        }
    }
    // Γ_{d,bc} (first kind) and its derivatives
    let first = |d: usize, b: usize, c: usize| 0.5 * (dg[b][(d, c)] + dg[c][(d, b)] - dg[d][(b, c)]);
    let d_first = |e: usize, d: usize, b: usize, c: usize| 0.5 * (ddg[e][b][(d, c)] + ddg[e][c][(d, b)] - ddg[e][d][(b, c)]);
    let mut gamma = [[[0.0; 4]; 4]; 4];
    for a in 0..DIM {
        for b in 0..DIM {
            for c in 0..DIM {
                gamma[a][b][c] = (0..DIM).map(|d| g_inv[(a, d)] * first(d, b, c)).sum();
            }
        }
    }
    // ∂_e Γ^a_bc = ∂_e g^{ad} Γ_{d,bc} + g^{ad} ∂_e Γ_{d,bc},  ∂_e g⁻¹ = −g⁻¹ (∂_e g) g⁻¹
    let dg_inv: Vec<Matrix4<f64>> = (0..DIM).map(|e| -(g_inv * dg[e] * g_inv)).collect();
    let d_gamma = |e: usize, a: usize, b: usize, c: usize| -> f64 {
        (0..DIM).map(|d| dg_inv[e][(a, d)] * first(d, b, c) + g_inv[(a, d)] * d_first(e, d, b, c)).sum()
    };
    let mut up = [[[[0.0; 4]; 4]; 4]; 4];
    for a in 0..DIM {
        for b in 0..DIM {
            for c in 0..DIM {
                for d in 0..DIM {
                    let mut v = d_gamma(c, a, d, b) - d_gamma(d, a, c, b);
                    for e in 0..DIM {
                        v += gamma[a][c][e] * gamma[e][d][b] - gamma[a][d][e] * gamma[e][c][b];
                    }
                    up[a][b][c][d] = v;
                }
            }
        }
    }
    CovTensor::from_fn(4, chart, |i| (0..DIM).map(|e| g[(i[0], e)] * up[e][i[1]][i[2]][i[3]]).sum())
}

/// Geometry of the gas at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub beta: f64,
    pub omega: [f64; 3],
    pub theta: f64,
    pub mass: f64,
    pub radius: f64,
    pub chart: Chart,
    /// Coordinate names; every tensor is row-major over these.
    pub index_order: Vec<String>,
    pub g: CovTensor,
    /// Inverse metric (contravariant components).
    pub g_inv: CovTensor,
    /// `Dg = D³z`.
    pub dg: CovTensor,
    /// `D²g = D⁴z`.
    pub d2g: CovTensor,
    pub k: CovTensor,
    pub riem: CovTensor,
    pub sectional_min: f64,
    pub sectional_max: f64,
    /// `‖R + (1/12)(g∧g)/2‖ / ‖R‖` with metric norms.
    pub kn_deviation: f64,
    pub riemann_symmetry_defect: f64,
}

impl CurvatureReport {
    pub fn compute(p: &GeneralizedTemperature, gp: &GasParameters, chart: Chart, seed: u64) -> Result<Self> {
        let d = cov_diff_z_upto(4, p, gp, chart)?;
        let g = d[1].clone();
        let g_inv = metric_inverse(&g)?;
        let k = hessian_curvature_from(&g, &d[2], &d[3])?;
        let riem = riemann_from_hessian(&k)?;
        let secs = sectional_sample(&riem, &g, seed, RANDOM_PLANES)?;
        let (lo, hi) = secs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &s| (lo.min(s), hi.max(s)));
        Ok(CurvatureReport {
            beta: p.beta,
            omega: p.omega,
            theta: p.theta(),
            mass: gp.mass,
            radius: gp.radius,
            chart,
            index_order: chart.coordinates().iter().map(|s| s.to_string()).collect(),
            kn_deviation: kn_deviation(&riem, &g, &g_inv)?,
            riemann_symmetry_defect: riemann_symmetry_defect(&riem),
            g_inv: CovTensor::from_matrix(&g_inv, chart),
            dg: d[2].clone(),
            d2g: d[3].clone(),
            g,
            k,
            riem,
            sectional_min: lo,
            sectional_max: hi,
        })
    }
}

/// `‖R + (1/12)(g∧g)/2‖ / ‖R‖`, both norms taken with the metric.
pub fn kn_deviation(riem: &CovTensor, g: &CovTensor, g_inv: &Matrix4<f64>) -> Result<f64> {
    let target = kulkarni_nomizu_half(g)?.scale(-1.0 / 12.0);
    Ok(riem.sub(&target)?.metric_norm(g_inv) / riem.metric_norm(g_inv))
}
