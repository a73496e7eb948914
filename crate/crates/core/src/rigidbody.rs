//! Closed-form geometry of the rotating rigid body.
//!
//! The Massieu potential in flat coordinates `(β, r = −βω)` is
//! `φ = C ln C − C − C ln β + ½ rᵀIr/β`, whose Hessian metric in `(β, ω)` is
//! `C dβ²/β² + β I(dω, dω)`. Under `ũ = 2√(C/β)`, `Ω̃ = √I ω` it becomes the
//! hyperbolic half-space metric `(4C/ũ²)(dũ² + |dΩ̃|²)` of curvature `−1/(4C)`.

use nalgebra::{Matrix3, Matrix4, Vector3};

use crate::covderiv::Coframe;
use crate::curvature;
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::model::{kinematic_jacobian, GeneralizedTemperature};
use crate::quad::gauss_legendre;
use crate::tensor::{Chart, CovTensor, MAX_ORDER};

/// Inertia of the body: a multiple of the identity, or a general SPD tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Inertia {
    Spherical(f64),
    General(Matrix3<f64>),
}

/// Heat capacity and inertia of a rigid body.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidBodyParams {
    pub heat_capacity: f64,
    pub inertia: Inertia,
}

impl RigidBodyParams {
    pub fn spherical(heat_capacity: f64, inertia: f64) -> Result<Self> {
        if !(heat_capacity > 0.0) {
            return Err(Error::Domain(format!("heat capacity must be positive, got {heat_capacity}")));
        }
        if !(inertia > 0.0) {
            return Err(Error::DegenerateBody(format!("inertia factor {inertia} is not positive")));
        }
        Ok(RigidBodyParams { heat_capacity, inertia: Inertia::Spherical(inertia) })
    }

    /// General body; the tensor must be symmetric positive-definite (non-planar body).
    pub fn general(heat_capacity: f64, inertia: Matrix3<f64>) -> Result<Self> {
        if !(heat_capacity > 0.0) {
            return Err(Error::Domain(format!("heat capacity must be positive, got {heat_capacity}")));
        }
        if (inertia - inertia.transpose()).norm() > 1e-12 * inertia.norm() {
            return Err(Error::DegenerateBody("inertia tensor is not symmetric".into()));
        }
        let min = inertia.symmetric_eigenvalues().min();
        if !(min > 1e-12 * inertia.norm()) {
            return Err(Error::DegenerateBody(format!("inertia tensor is singular (smallest eigenvalue {min})")));
        }
        Ok(RigidBodyParams { heat_capacity, inertia: Inertia::General(inertia) })
    }

    pub fn inertia_matrix(&self) -> Matrix3<f64> {
        match self.inertia {
            Inertia::Spherical(i) => Matrix3::identity() * i,
            Inertia::General(m) => m,
        }
    }

    fn spherical_factor(&self) -> Result<f64> {
        match self.inertia {
            Inertia::Spherical(i) => Ok(i),
            Inertia::General(_) => Err(Error::Unsupported("closed form is derived for spherical inertia only".into())),
        }
    }

    /// Symmetric square root `√I`.
    pub fn sqrt_inertia(&self) -> Matrix3<f64> {
        let e = self.inertia_matrix().symmetric_eigen();
        e.eigenvectors * Matrix3::from_diagonal(&e.eigenvalues.map(f64::sqrt)) * e.eigenvectors.transpose()
    }
}

fn quadratic(m: &Matrix3<f64>, w: &[f64; 3]) -> f64 {
    let v = Vector3::from(*w);
    v.dot(&(m * v))
}

/// Energy and angular momentum `E = C/β + ½ωᵀIω`, `M = Iω`.
pub fn rb_momenta(params: &RigidBodyParams, p: &GeneralizedTemperature) -> (f64, [f64; 3]) {
    let i = params.inertia_matrix();
    let e = params.heat_capacity / p.beta + 0.5 * quadratic(&i, &p.omega);
    (e, (i * Vector3::from(p.omega)).into())
}

/// Massieu potential `φ(β, r)` in flat coordinates.
pub fn rb_massieu_flat(params: &RigidBodyParams, x: [f64; 4]) -> Result<f64> {
    if !(x[0] > 0.0) {
        return Err(Error::Domain(format!("beta must be positive, got {}", x[0])));
    }
    let c = params.heat_capacity;
    let r = [x[1], x[2], x[3]];
    Ok(c * c.ln() - c - c * x[0].ln() + 0.5 * quadratic(&params.inertia_matrix(), &r) / x[0])
}

/// Entropy `S = C ln(E − ½MᵀI⁻¹M)` and Massieu potential `φ = S − C + ½βωᵀIω`.
pub fn rb_potentials(params: &RigidBodyParams, p: &GeneralizedTemperature) -> Result<(f64, f64)> {
    let (e, m) = rb_momenta(params, p);
    let s = rb_entropy(params, [e, m[0], m[1], m[2]])?;
    let phi = s - params.heat_capacity + 0.5 * p.beta * quadratic(&params.inertia_matrix(), &p.omega);
    Ok((s, phi))
}

/// `S(E, M) = C ln(E − ½MᵀI⁻¹M)`.
pub fn rb_entropy(params: &RigidBodyParams, y: [f64; 4]) -> Result<f64> {
    let inv = params.inertia_matrix().try_inverse().ok_or_else(|| Error::DegenerateBody("singular inertia".into()))?;
    let internal = y[0] - 0.5 * quadratic(&inv, &[y[1], y[2], y[3]]);
    if !(internal > 0.0) {
        return Err(Error::Domain(format!("internal energy {internal} is not positive")));
    }
    Ok(params.heat_capacity * internal.ln())
}

/// Jacobian `∂x/∂y` of the flat coordinates with respect to `chart`.
pub fn rb_jacobian(params: &RigidBodyParams, p: &GeneralizedTemperature, chart: Chart) -> Result<Matrix4<f64>> {
    match chart {
        Chart::Flat | Chart::BetaOmega | Chart::UOmega => kinematic_jacobian(p, chart),
        Chart::BetaM => {
            // r = −β I⁻¹M
            let inv = params.inertia_matrix().try_inverse().ok_or_else(|| Error::DegenerateBody("singular inertia".into()))?;
            let mut j = Matrix4::zeros();
            j[(0, 0)] = 1.0;
            for a in 0..3 {
                j[(a + 1, 0)] = -p.omega[a];
                for c in 0..3 {
                    j[(a + 1, c + 1)] = -p.beta * inv[(a, c)];
                }
            }
            Ok(j)
        }
        Chart::EnergyMomentum => {
            // (E, M) = −dφ, so ∂x/∂(E, M) = −g_flat⁻¹
            let g = rb_metric(params, p, Chart::Flat)?;
            Ok(-curvature::metric_inverse(&g)?)
        }
    }
}

/// `dβ`, `dω` of the rigid body written in `chart`.
pub fn rb_coframe(params: &RigidBodyParams, p: &GeneralizedTemperature, chart: Chart) -> Result<Coframe> {
    Coframe::from_jacobian(p.beta, p.omega, chart, &rb_jacobian(params, p, chart)?)
}

/// `g = Cβ du⊗du + β I_ab dω_a⊗dω_b`.
pub fn rb_metric(params: &RigidBodyParams, p: &GeneralizedTemperature, chart: Chart) -> Result<CovTensor> {
    let frame = if chart == Chart::EnergyMomentum {
        let g_flat = rb_metric(params, p, Chart::Flat)?;
        let jac = -curvature::metric_inverse(&g_flat)?;
        return Ok(g_flat.transport(&jac, chart));
    } else {
        rb_coframe(params, p, chart)?
    };
    let du = frame.du();
    let mut g = du.outer(&du)?.scale(params.heat_capacity * p.beta);
    let i = params.inertia_matrix();
    for a in 0..3 {
        for b in 0..3 {
            if i[(a, b)] != 0.0 {
                g.add_scaled(&frame.domega.comps[a].outer(&frame.domega.comps[b])?, p.beta * i[(a, b)])?;
            }
        }
    }
    Ok(g)
}

/// Half-space coordinates `(ũ, Ω̃) = (2√(C/β), √I ω)`.
pub fn half_space_coordinates(params: &RigidBodyParams, p: &GeneralizedTemperature) -> [f64; 4] {
    let w = params.sqrt_inertia() * Vector3::from(p.omega);
    [2.0 * (params.heat_capacity / p.beta).sqrt(), w[0], w[1], w[2]]
}

/// Pullback of `(4C/ũ²)(dũ² + |dΩ̃|²)` to the `(β, ω)` chart.
pub fn half_space_pullback(params: &RigidBodyParams, p: &GeneralizedTemperature) -> CovTensor {
    let c = params.heat_capacity;
    let u = half_space_coordinates(params, p)[0];
    let mut jac = Matrix4::zeros();
    jac[(0, 0)] = -c.sqrt() * p.beta.powf(-1.5);
    jac.fixed_view_mut::<3, 3>(1, 1).copy_from(&params.sqrt_inertia());
    let h = Matrix4::identity() * (4.0 * c / (u * u));
    CovTensor::from_matrix(&(jac.transpose() * h * jac), Chart::BetaOmega)
}

/// `Dⁿφ` in `chart`:
/// `C(n−1)! βⁿᐟ² duⁿ + ½ I_ab Dⁿ(βω_aω_b)` with
/// `D^{k+2}(βω_aω_b) = (−1)^k β^{1−k} dβ^{·k}·(dω_a·dω_b)`.
pub fn rb_cov_diff(params: &RigidBodyParams, p: &GeneralizedTemperature, n: usize, chart: Chart) -> Result<CovTensor> {
    if n == 0 || n > MAX_ORDER {
        return Err(Error::UnsupportedOrder { order: n, max: MAX_ORDER });
    }
    let frame = rb_coframe(params, p, chart)?;
    let c = params.heat_capacity;
    let b = p.beta;
    let du = frame.du();
    let mut t = CovTensor::scalar(1.0, chart);
    for _ in 0..n {
        t = t.outer(&du)?;
    }
    let fact: f64 = (1..n).map(|k| k as f64).product();
    let mut out = t.scale(c * fact * b.powf(n as f64 / 2.0));
    let i = params.inertia_matrix();
    let dw = &frame.domega.comps;
    if n == 1 {
        let iw = i * Vector3::from(p.omega);
        out.add_scaled(&frame.dbeta, 0.5 * quadratic(&i, &p.omega))?;
        for a in 0..3 {
            out.add_scaled(&dw[a], b * iw[a])?;
        }
        return Ok(out);
    }
    let k = n - 2;
    let mut power = CovTensor::scalar(1.0, chart);
    for _ in 0..k {
        power = power.sym_product(&frame.dbeta)?;
    }
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut pair = CovTensor::zeros(2, chart)?;
    for a in 0..3 {
        for c in 0..3 {
            if i[(a, c)] != 0.0 {
                pair.add_scaled(&dw[a].sym_product(&dw[c])?, 0.5 * i[(a, c)])?;
            }
        }
    }
    out.add_scaled(&power.sym_product(&pair)?, sign * b.powi(1 - k as i32))?;
    Ok(out)
}

/// Closed-form Hessian curvature of the spherical body on a coframe `(du, dω)`:
///
/// ```text
/// β⁻²K = C du⊗⁴ − ½(I²/C) dω_i⊗dω_j⊗dω^i⊗dω^j
///      + ½I (du⊗du⊗⟨dω|dω⟩ + dω_a⊗du⊗du⊗dω^a + du⊗⟨dω|dω⟩⊗du + ⟨dω|dω⟩⊗du⊗du)
/// ```
pub fn rigid_curvature_form(heat_capacity: f64, inertia: f64, beta: f64, du: &CovTensor, domega: &[CovTensor]) -> Result<CovTensor> {
    let chart = du.chart();
    let (c, i) = (heat_capacity, inertia);
    let u = du.data();
    let w: Vec<&[f64]> = domega.iter().map(|t| t.data()).collect();
    let wt = |x: usize, y: usize| -> f64 { (0..3).map(|a| w[a][x] * w[a][y]).sum() };
    CovTensor::from_fn(4, chart, |ix| {
        let [a, b, cc, d] = [ix[0], ix[1], ix[2], ix[3]];
        let quartic = c * u[a] * u[b] * u[cc] * u[d];
        let rot = -0.5 * i * i / c * wt(a, cc) * wt(b, d);
        let mixed = 0.5 * i * (u[a] * u[b] * wt(cc, d) + wt(a, d) * u[b] * u[cc] + u[a] * wt(b, cc) * u[d] + wt(a, b) * u[cc] * u[d]);
        beta * beta * (quartic + rot + mixed)
    })
}

/// Closed-form Hessian curvature of a spherical body in `chart`.
pub fn rb_hessian_curvature(params: &RigidBodyParams, p: &GeneralizedTemperature, chart: Chart) -> Result<CovTensor> {
    let i = params.spherical_factor()?;
    let frame = rb_coframe(params, p, chart)?;
    rigid_curvature_form(params.heat_capacity, i, p.beta, &frame.du(), &frame.domega.comps)
}

/// Hessian curvature through the generic pipeline from `D²φ, D³φ, D⁴φ`.
pub fn rb_hessian_curvature_generic(params: &RigidBodyParams, p: &GeneralizedTemperature, chart: Chart) -> Result<CovTensor> {
    let d: Vec<CovTensor> = (2..=4).map(|n| rb_cov_diff(params, p, n, chart)).collect::<Result<_>>()?;
    curvature::hessian_curvature_from(&d[0], &d[1], &d[2])
}

/// `D̃ⁿ(−S)` in the dual flat chart `(E, M)`, from the exact Taylor jet.
pub fn rb_entropy_cov_diff(params: &RigidBodyParams, y: [f64; 4], n: usize) -> Result<CovTensor> {
    rb_entropy(params, y)?;
    let inv = params.inertia_matrix().try_inverse().ok_or_else(|| Error::DegenerateBody("singular inertia".into()))?;
    let v = Jet::vars(y, n);
    let mut internal = v[0].clone();
    for a in 0..3 {
        for b in 0..3 {
            internal = internal.sub(&v[a + 1].mul(&v[b + 1]).scale(0.5 * inv[(a, b)]));
        }
    }
    internal.ln().scale(-params.heat_capacity).derivative(n, Chart::EnergyMomentum)
}

/// Hessian curvature of the dual (entropy) structure in `(E, M)`.
pub fn rb_dual_hessian_curvature(params: &RigidBodyParams, p: &GeneralizedTemperature) -> Result<(CovTensor, CovTensor)> {
    let (e, m) = rb_momenta(params, p);
    let y = [e, m[0], m[1], m[2]];
    let d: Vec<CovTensor> = (2..=4).map(|n| rb_entropy_cov_diff(params, y, n)).collect::<Result<_>>()?;
    Ok((curvature::hessian_curvature_from(&d[0], &d[1], &d[2])?, d[0].clone()))
}

/// Conformal factor `1/I` of the Poisson structure on the leaves.
pub fn rb_poisson_leaf_factor(params: &RigidBodyParams) -> Result<f64> {
    Ok(1.0 / params.spherical_factor()?)
}

/// Symplectic area of the leaf `‖ω‖ = ρ`, integrating the orbit form
/// `σ_M(ξ×M, η×M) = ⟨M, ξ×η⟩` of the sphere `‖M‖ = Iρ` over polar angles.
pub fn rb_leaf_area(params: &RigidBodyParams, rho: f64) -> Result<f64> {
    let s = params.spherical_factor()? * rho;
    let (x, wts) = gauss_legendre(40);
    let pi = std::f64::consts::PI;
    let mut area = 0.0;
    for (xi, wi) in x.iter().zip(&wts) {
        let th = 0.5 * pi * (xi + 1.0);
        for (xj, wj) in x.iter().zip(&wts) {
            let ph = pi * (xj + 1.0);
            let (st, ct, sp, cp) = (th.sin(), th.cos(), ph.sin(), ph.cos());
            let m = Vector3::new(st * cp, st * sp, ct) * s;
            let mt = Vector3::new(ct * cp, ct * sp, -st) * s;
            let mp = Vector3::new(-st * sp, st * cp, 0.0) * s;
            // tangent vector t = ξ×M with ξ = M×t/|M|²
            let xi_t = m.cross(&mt) / (s * s);
            let xi_p = m.cross(&mp) / (s * s);
            area += wi * wj * 0.5 * pi * pi * m.dot(&xi_t.cross(&xi_p));
        }
    }
    Ok(area)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covderiv::fd_derivative;

    fn rel(a: &CovTensor, b: &CovTensor) -> f64 {
        a.sub(b).unwrap().frobenius() / b.frobenius()
    }

    fn spd() -> Matrix3<f64> {
        Matrix3::new(2.0, 0.3, -0.1, 0.3, 1.0, 0.2, -0.1, 0.2, 0.7)
    }

    fn points() -> Vec<GeneralizedTemperature> {
        [(1.0, [0.0; 3]), (0.7, [0.4, -1.2, 0.3]), (2.5, [3.0, 0.5, -2.0]), (0.3, [0.0, 0.0, 5.0])]
            .into_iter()
            .map(|(b, w)| GeneralizedTemperature::new(b, w).unwrap())
            .collect()
    }

    #[test]
    fn metric_at_rest() {
        let rb = RigidBodyParams::spherical(1.5, 1.0).unwrap();
        let g = rb_metric(&rb, &GeneralizedTemperature::new(1.0, [0.0; 3]).unwrap(), Chart::BetaOmega).unwrap();
        assert_eq!(g.to_matrix().unwrap(), Matrix4::from_diagonal(&nalgebra::Vector4::new(1.5, 1.0, 1.0, 1.0)));
    }

    #[test]
    fn metric_is_hessian_of_massieu_potential() {
        for rb in [RigidBodyParams::spherical(0.5, 2.0).unwrap(), RigidBodyParams::general(3.0, spd()).unwrap()] {
            for p in points() {
                let rbc = rb;
                let f = move |x: [f64; 4]| rb_massieu_flat(&rbc, x);
                let x = p.to_flat().as_array();
                let fd = fd_derivative(&f, x, 2, [1e-3 * p.beta, 1e-3, 1e-3, 1e-3], Chart::Flat).unwrap();
                let g = rb_metric(&rb, &p, Chart::Flat).unwrap();
                assert!(rel(&g, &fd) < 1e-8, "{}", rel(&g, &fd));
                for n in 1..=4 {
                    let jet = rb_jet(&rb, x, n).derivative(n, Chart::Flat).unwrap();
                    assert!(rel(&rb_cov_diff(&rb, &p, n, Chart::Flat).unwrap(), &jet) < 1e-12, "n={n}");
                }
            }
        }
    }

    fn rb_jet(rb: &RigidBodyParams, x: [f64; 4], degree: usize) -> Jet {
        let v = Jet::vars(x, degree);
        let i = rb.inertia_matrix();
        let mut q = Jet::constant(0.0, degree);
        for a in 0..3 {
            for b in 0..3 {
                q = q.add(&v[a + 1].mul(&v[b + 1]).scale(0.5 * i[(a, b)]));
            }
        }
        let c = rb.heat_capacity;
        q.mul(&v[0].recip()).sub(&v[0].ln().scale(c)).add_const(c * c.ln() - c)
    }

    #[test]
    fn half_space_pullback_matches_metric() {
        for rb in [RigidBodyParams::spherical(1.5, 1.0).unwrap(), RigidBodyParams::general(0.5, spd()).unwrap()] {
            for p in points() {
                let a = half_space_pullback(&rb, &p);
                let b = rb_metric(&rb, &p, Chart::BetaOmega).unwrap();
                assert!(rel(&a, &b) < 1e-12);
            }
        }
        let rb = RigidBodyParams::general(3.0, spd()).unwrap();
        let p = points()[1];
        let g = rb_metric(&rb, &p, Chart::BetaOmega).unwrap().to_matrix().unwrap();
        let block = g.fixed_view::<3, 3>(1, 1).symmetric_eigenvalues();
        let expect = spd().symmetric_eigenvalues() * p.beta;
        let (mut a, mut b) = (block.as_slice().to_vec(), expect.as_slice().to_vec());
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form_curvature_matches_generic_pipeline() {
        for c in [0.5, 1.5, 3.0] {
            let rb = RigidBodyParams::spherical(c, 1.3).unwrap();
            for p in points() {
                for chart in [Chart::Flat, Chart::BetaOmega, Chart::UOmega, Chart::BetaM] {
                    let a = rb_hessian_curvature(&rb, &p, chart).unwrap();
                    let b = rb_hessian_curvature_generic(&rb, &p, chart).unwrap();
                    assert!(rel(&a, &b) < 1e-9, "C={c} {chart}: {}", rel(&a, &b));
                }
            }
        }
        let general = RigidBodyParams::general(1.0, spd()).unwrap();
        assert!(matches!(rb_hessian_curvature(&general, &points()[0], Chart::Flat), Err(Error::Unsupported(_))));
    }

    #[test]
    fn sectional_curvature_is_minus_quarter_over_c() {
        for rb in [RigidBodyParams::spherical(1.5, 1.0).unwrap(), RigidBodyParams::general(0.5, spd()).unwrap()] {
            let c = rb.heat_capacity;
            for p in points() {
                let g = rb_metric(&rb, &p, Chart::BetaOmega).unwrap();
                let k = rb_hessian_curvature_generic(&rb, &p, Chart::BetaOmega).unwrap();
                let r = curvature::riemann_from_hessian(&k).unwrap();
                for s in curvature::sectional_sample(&r, &g, 7, 20).unwrap() {
                    assert!((s + 0.25 / c).abs() < 1e-10, "{s}");
                }
            }
        }
    }

    #[test]
    fn entropy_hessian_is_dual_metric_and_has_constant_hessian_sectional() {
        let rb = RigidBodyParams::spherical(1.0, 1.0).unwrap();
        let p = GeneralizedTemperature::new(1.0, [0.0; 3]).unwrap();
        let (_, d2) = rb_dual_hessian_curvature(&rb, &p).unwrap();
        let g_dual = rb_metric(&rb, &p, Chart::EnergyMomentum).unwrap();
        assert!(rel(&d2, &g_dual) < 1e-12);
        assert!(rel(&d2, &CovTensor::from_matrix(&Matrix4::identity(), Chart::EnergyMomentum)) < 1e-12);
        let rb = RigidBodyParams::spherical(1.5, 0.8).unwrap();
        for p in points() {
            let (k, g) = rb_dual_hessian_curvature(&rb, &p).unwrap();
            let h = Matrix4::new(1.0, 0.2, -0.3, 0.0, 0.2, 0.5, 0.1, 0.4, -0.3, 0.1, 2.0, 0.0, 0.0, 0.4, 0.0, -1.0);
            let kappa = curvature::hessian_sectional(&k, &g, &h).unwrap();
            assert!((kappa - 1.0 / 1.5).abs() < 1e-10, "{kappa}");
        }
    }

    #[test]
    fn entropy_differential_and_potentials() {
        let rb = RigidBodyParams::spherical(1.5, 0.8).unwrap();
        for p in points() {
            let (e, m) = rb_momenta(&rb, &p);
            let y = [e, m[0], m[1], m[2]];
            let rbc = rb;
            let f = move |y: [f64; 4]| rb_entropy(&rbc, y);
            let ds = fd_derivative(&f, y, 1, [1e-4 * e; 4], Chart::EnergyMomentum).unwrap();
            assert!((ds.get(&[0]) - p.beta).abs() < 1e-8);
            for a in 0..3 {
                assert!((ds.get(&[a + 1]) + p.beta * p.omega[a]).abs() < 1e-8);
            }
            let (s, phi) = rb_potentials(&rb, &p).unwrap();
            assert!((phi - (s - 1.5 + 0.5 * p.beta * 0.8 * p.omega_sq())).abs() < 1e-14 * phi.abs().max(1.0));
            assert!((phi - rb_massieu_flat(&rb, p.to_flat().as_array()).unwrap()).abs() < 1e-12 * phi.abs().max(1.0));
        }
    }

    #[test]
    fn leaf_factor_and_area() {
        assert_eq!(rb_poisson_leaf_factor(&RigidBodyParams::spherical(1.0, 2.0).unwrap()).unwrap(), 0.5);
        assert_eq!(rb_poisson_leaf_factor(&RigidBodyParams::spherical(1.0, 1.0).unwrap()).unwrap(), 1.0);
        let rb = RigidBodyParams::spherical(1.0, 1.7).unwrap();
        let area = rb_leaf_area(&rb, 0.6).unwrap();
        assert!((area - 4.0 * std::f64::consts::PI * 1.7 * 0.6).abs() < 1e-10);
    }

    #[test]
    fn degenerate_bodies_rejected() {
        let planar = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, 0.0));
        assert!(matches!(RigidBodyParams::general(1.0, planar), Err(Error::DegenerateBody(_))));
        assert!(RigidBodyParams::spherical(0.0, 1.0).is_err());
        assert!(RigidBodyParams::spherical(1.0, -1.0).is_err());
    }
}
