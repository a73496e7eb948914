//! Log-partition functions, the inertia function and moments of the radial observable.
//!
//! With `ρ` the distance to the rotation axis, the positional factor of the
//! partition function is `∫_ball e^{½βmω²ρ²} d³q`. Writing `ρ² = R²(1 − t²)`
//! and `λ = ½mθR²` reduces it to
//!
//! ```text
//! Z_rot = 2πR³ e^λ ∫₀¹ 2t² e^{−λt²} dt
//! ```
//!
//! so `e^λ` is never formed and all moments of `ι = ½mρ²` become moments of
//! `t²` under the density `∝ t² e^{−λt²}` on `[0, 1]`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{GasParameters, GeneralizedTemperature};
use crate::quad;
use crate::special::ln_lower_gamma;

/// Largest moment order served by [`raw_moments`].
pub const MAX_MOMENT: usize = 8;

// Below this λ the direct y-integral switches to its power series.
const SERIES_LAMBDA: f64 = 1e-2;

/// `ζ_int = (3/2) ln(2πm/β)`, the velocity factor including the `m³` phase-space weight.
pub fn z_int(beta: f64, gp: &GasParameters) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("β must be positive, got {beta}")));
    }
    Ok(1.5 * (2.0 * PI * gp.mass / beta).ln())
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta >= 0.0 && theta.is_finite()) {
        return Err(Error::Domain(format!("θ = βω² must be finite and non-negative, got {theta}")));
    }
    Ok(())
}

/// Distribution of `t = √(1 − ρ²/R²)` with density `∝ t² e^{−λt²}` on `[0, 1]`.
#[derive(Debug, Clone)]
pub struct RadialMarginal {
    pub lambda: f64,
    pub gp: GasParameters,
    t_max: f64,
    breaks: Vec<f64>,
    norm: f64,
}

impl RadialMarginal {
    pub fn new(theta: f64, gp: &GasParameters) -> Result<Self> {
        check_theta(theta)?;
        let lambda = gp.lambda(theta);
        if lambda > 1e7 {
            return Err(Error::Domain(format!("λ = {lambda:e} exceeds the supported range")));
        }
        // Beyond t = 40/√λ the weight is below e^{-1600}.
        let (t_max, breaks) = if lambda > 1.0 {
            let s = lambda.sqrt().recip();
            let t_max = (40.0 * s).min(1.0);
            let breaks = [0.5, 1.0, 2.0, 3.0, 5.0, 8.0, 13.0, 20.0].iter().map(|c| c * s).filter(|&t| t < t_max).collect();
            (t_max, breaks)
        } else {
            (1.0, Vec::new())
        };
        let mut m = RadialMarginal { lambda, gp: *gp, t_max, breaks, norm: 1.0 };
        m.norm = m.integrate(|_| 1.0)?;
        Ok(m)
    }

    fn integrate(&self, g: impl Fn(f64) -> f64) -> Result<f64> {
        let lam = self.lambda;
        quad::integrate_default(|t| g(t) * t * t * (-lam * t * t).exp(), 0.0, self.t_max, &self.breaks)
    }

    /// `∫₀¹ 2t² e^{−λt²} dt`.
    pub fn reduced_partition(&self) -> f64 {
        2.0 * self.norm
    }

    /// Expectation of a function of `t`.
    pub fn expect(&self, g: impl Fn(f64) -> f64) -> Result<f64> {
        Ok(self.integrate(g)? / self.norm)
    }

    /// `E[t^{2k}]` for `k = 0..=max_k`.
    pub fn t_moments(&self, max_k: usize) -> Result<Vec<f64>> {
        (0..=max_k).map(|k| self.expect(|t| (t * t).powi(k as i32))).collect()
    }

    /// `½mR²`, the value of `ι` on the boundary circle.
    pub fn iota_max(&self) -> f64 {
        0.5 * self.gp.mass * self.gp.radius * self.gp.radius
    }
}

/// `ζ_rot(θ)` from the normalization of the radial marginal (primary path).
pub fn z_rot(theta: f64, gp: &GasParameters) -> Result<f64> {
    let rm = RadialMarginal::new(theta, gp)?;
    let r = gp.radius;
    Ok((2.0 * PI * r * r * r).ln() + rm.lambda + rm.reduced_partition().ln())
}

/// `ζ_rot(θ) = ln(2πR³/λ) + ln ∫₀¹ (e^{λ(1−y²)} − 1) dy`, integrating directly in `y`.
pub fn z_rot_direct(theta: f64, gp: &GasParameters) -> Result<f64> {
    check_theta(theta)?;
    let lam = gp.lambda(theta);
    let r = gp.radius;
    let prefactor = (2.0 * PI * r * r * r).ln();
    if lam < SERIES_LAMBDA {
        // Σ_{k≥1} λ^{k−1}/k! ∫₀¹(1−y²)^k dy with ∫₀¹(1−y²)^k dy = Π_{j≤k} 2j/(2j+1)
        let mut sum = 0.0;
        let mut a = 1.0;
        let mut lam_pow = 1.0;
        let mut fact = 1.0;
        for k in 1..40 {
            a *= 2.0 * k as f64 / (2.0 * k as f64 + 1.0);
            fact *= k as f64;
            let term = lam_pow * a / fact;
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
            lam_pow *= lam;
        }
        return Ok(prefactor + sum.ln());
    }
    let s = lam.sqrt().recip();
    let breaks: Vec<f64> = [1.0, 2.0, 4.0, 8.0].iter().map(|c| c * s).collect();
    let y_max = (40.0 * s).min(1.0);
    let j = quad::integrate_default(|y| (-lam * y * y).exp(), 0.0, y_max, &breaks)?;
    Ok(prefactor - lam.ln() + lam + (j - (-lam).exp()).ln())
}

/// `ζ_rot(θ) = ln(2πR³) + λ + ln γ(3/2, λ) − (3/2) ln λ` via the lower incomplete gamma function.
pub fn z_rot_gamma(theta: f64, gp: &GasParameters) -> Result<f64> {
    check_theta(theta)?;
    let lam = gp.lambda(theta);
    let r = gp.radius;
    let prefactor = (2.0 * PI * r * r * r).ln();
    if lam == 0.0 {
        return Ok(prefactor + (2.0f64 / 3.0).ln());
    }
    Ok(prefactor + lam + ln_lower_gamma(1.5, lam)? - 1.5 * lam.ln())
}

/// `ζ_rot` through the error-function form `∫₀¹ e^{−λy²} dy = γ(1/2, λ)/(2√λ)`.
pub fn z_rot_half_gamma(theta: f64, gp: &GasParameters) -> Result<f64> {
    check_theta(theta)?;
    let lam = gp.lambda(theta);
    if !(lam > 0.0) {
        return Err(Error::Domain("the error-function form is singular at θ = 0".into()));
    }
    let r = gp.radius;
    let j = (ln_lower_gamma(0.5, lam)? - (2.0 * lam.sqrt()).ln()).exp();
    Ok((2.0 * PI * r * r * r / lam).ln() + lam + (j - (-lam).exp()).ln())
}

/// Massieu potential `z = ζ_int(β) + ζ_rot(βω²)`.
pub fn z(p: &GeneralizedTemperature, gp: &GasParameters) -> Result<f64> {
    Ok(z_int(p.beta, gp)? + z_rot(p.theta(), gp)?)
}

/// `z` as a function of the flat coordinates `(β, r)`.
pub fn z_flat(x: [f64; 4], gp: &GasParameters) -> Result<f64> {
    let beta = x[0];
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("β must be positive, got {beta}")));
    }
    let theta = (x[1] * x[1] + x[2] * x[2] + x[3] * x[3]) / beta;
    Ok(z_int(beta, gp)? + z_rot(theta, gp)?)
}

/// `E[ι^k]` for `k = 0..=max_k`.
pub fn raw_moments(theta: f64, gp: &GasParameters, max_k: usize) -> Result<Vec<f64>> {
    if max_k > MAX_MOMENT {
        return Err(Error::UnsupportedOrder { order: max_k, max: MAX_MOMENT });
    }
    let rm = RadialMarginal::new(theta, gp)?;
    let a = rm.iota_max();
    (0..=max_k)
        .map(|k| Ok(a.powi(k as i32) * rm.expect(|t| (1.0 - t * t).powi(k as i32))?))
        .collect()
}

/// Mean `E[ι]` and central moments `E[(ι − E[ι])^k]` for `k = 0..=max_k`.
pub fn central_moments(theta: f64, gp: &GasParameters, max_k: usize) -> Result<(f64, Vec<f64>)> {
    let rm = RadialMarginal::new(theta, gp)?;
    let a = rm.iota_max();
    let mean_t2 = rm.expect(|t| t * t)?;
    let central = (0..=max_k)
        .map(|k| Ok((-a).powi(k as i32) * rm.expect(|t| (t * t - mean_t2).powi(k as i32))?))
        .collect::<Result<Vec<_>>>()?;
    Ok((a * (1.0 - mean_t2), central))
}

/// Moments of `ι − ½mR²` for `k = 0..=max_k`.
pub fn anchored_moments(theta: f64, gp: &GasParameters, max_k: usize) -> Result<Vec<f64>> {
    let rm = RadialMarginal::new(theta, gp)?;
    let a = rm.iota_max();
    Ok(rm.t_moments(max_k)?.into_iter().enumerate().map(|(k, m)| (-a).powi(k as i32) * m).collect())
}

/// Inertia `I = 2E[ι]` and its θ-derivative `I′ = 2 Var(ι)`.
pub fn inertia(theta: f64, gp: &GasParameters) -> Result<(f64, f64)> {
    let (mean, central) = central_moments(theta, gp, 2)?;
    Ok((2.0 * mean, 2.0 * central[2]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit() -> GasParameters {
        GasParameters::unit()
    }

    #[test]
    fn z_int_values() {
        assert!(z_int(2.0 * PI, &unit()).unwrap().abs() < 1e-15);
        assert!((z_int(1.0, &unit()).unwrap() - 1.5 * (2.0 * PI).ln()).abs() < 1e-15);
        let d = z_int(1.0, &unit()).unwrap() - z_int(2.0, &unit()).unwrap();
        assert!((d - 1.5 * 2f64.ln()).abs() < 1e-14);
        assert!(z_int(0.0, &unit()).is_err());
    }

    #[test]
    fn ball_volume_at_rest() {
        let v = (4.0 * PI / 3.0).ln();
        for f in [z_rot, z_rot_direct, z_rot_gamma] {
            assert!((f(0.0, &unit()).unwrap() - v).abs() < 1e-14);
        }
    }

    #[test]
    fn three_paths_agree() {
        let gp = GasParameters::new(1.3, 0.8).unwrap();
        for &theta in &[1e-3, 0.1, 1.0, 7.0, 100.0, 1e4, 1e5] {
            let a = z_rot(theta, &gp).unwrap();
            let b = z_rot_direct(theta, &gp).unwrap();
            let c = z_rot_gamma(theta, &gp).unwrap();
            assert!(((a - b) / a).abs() < 1e-10, "θ={theta}: {a} {b}");
            assert!(((a - c) / a).abs() < 1e-10, "θ={theta}: {a} {c}");
        }
    }

    #[test]
    fn error_function_form_needs_lambda_argument() {
        let gp = unit();
        for &theta in &[0.5, 5.0, 30.0] {
            let a = z_rot(theta, &gp).unwrap();
            assert!((z_rot_half_gamma(theta, &gp).unwrap() - a).abs() < 1e-12);
            // Using √λ as the argument gives a different value.
            let lam: f64 = gp.lambda(theta);
            let wrong = (ln_lower_gamma(0.5, lam.sqrt()).unwrap() - (2.0 * lam.sqrt()).ln()).exp();
            let wrong = (2.0 * PI / lam).ln() + lam + (wrong - (-lam).exp()).abs().ln();
            assert!((wrong - a).abs() > 1e-3);
        }
    }

    #[test]
    fn huge_lambda_is_finite() {
        let gp = unit();
        for &theta in &[1e5, 1e6, 2e6] {
            assert!(z_rot(theta, &gp).unwrap().is_finite());
            let (i, ip) = inertia(theta, &gp).unwrap();
            assert!(i.is_finite() && ip.is_finite() && ip >= 0.0);
        }
    }

    #[test]
    fn uniform_ball_moments() {
        let m = raw_moments(0.0, &unit(), 2).unwrap();
        assert!((m[0] - 1.0).abs() < 1e-15);
        assert!((m[1] - 0.2).abs() < 1e-14);
        // E[ρ⁴] = 8/35 ⇒ E[ι²] = 2/35
        assert!((m[2] - 2.0 / 35.0).abs() < 1e-14);
        let (mean, c) = central_moments(0.0, &unit(), 2).unwrap();
        assert!((mean - 0.2).abs() < 1e-14);
        assert!((c[2] - 3.0 / 175.0).abs() < 1e-15);
        let (i, ip) = inertia(0.0, &unit()).unwrap();
        assert!((i - 0.4).abs() < 1e-14 && (ip - 6.0 / 175.0).abs() < 1e-14);
    }

    #[test]
    fn fast_rotation_pushes_mass_to_the_rim() {
        let (i, _) = inertia(1e4, &unit()).unwrap();
        assert!(i > 0.999 && i < 1.0);
        let m = raw_moments(1e6, &unit(), 1).unwrap();
        assert!((m[1] - 0.5).abs() < 1e-5);
    }

    #[test]
    fn moments_bounded() {
        for &theta in &[0.0, 3.0, 1e3] {
            let m = raw_moments(theta, &unit(), MAX_MOMENT).unwrap();
            for (k, v) in m.iter().enumerate() {
                assert!(*v > 0.0 && *v <= 0.5f64.powi(k as i32) * (1.0 + 1e-14));
            }
        }
        assert!(raw_moments(1.0, &unit(), 9).is_err());
    }

    #[test]
    fn inertia_derivative_nonnegative_and_z_increasing() {
        let mut last = f64::NEG_INFINITY;
        for k in 0..50 {
            let theta = 10f64.powf(-3.0 + 8.0 * k as f64 / 49.0);
            let (_, ip) = inertia(theta, &unit()).unwrap();
            assert!(ip >= 0.0);
            let z = z_rot(theta, &unit()).unwrap();
            assert!(z > last);
            last = z;
        }
    }

    #[test]
    fn rejects_negative_theta() {
        assert!(z_rot(-1.0, &unit()).is_err());
        assert!(RadialMarginal::new(f64::NAN, &unit()).is_err());
    }

    proptest! {
        #[test]
        fn radius_scaling(beta in 0.3f64..3.0, w in proptest::array::uniform3(-3.0f64..3.0), r1 in 0.5f64..2.0) {
            // z(β, ω; ηR) = 3 ln η + z(η²β, ω; R)
            let eta = 2.0;
            let p = GeneralizedTemperature::new(beta, w).unwrap();
            let q = GeneralizedTemperature::new(eta * eta * beta, w).unwrap();
            let g1 = GasParameters::new(1.0, r1).unwrap();
            let g2 = GasParameters::new(1.0, eta * r1).unwrap();
            let lhs = z_rot(p.theta(), &g2).unwrap();
            let rhs = 3.0 * eta.ln() + z_rot(q.theta(), &g1).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0));
        }

        #[test]
        fn marginal_is_normalized(theta in 0.0f64..1e4) {
            let rm = RadialMarginal::new(theta, &unit()).unwrap();
            prop_assert!((rm.expect(|_| 1.0).unwrap() - 1.0).abs() < 1e-12);
        }
    }
}
