//! Physical parameters, points of the Gibbs set, charts and thermodynamic observables.

use nalgebra::{Matrix3, Matrix4, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition;
use crate::tensor::Chart;

/// Heat capacity of the translational degrees of freedom (k_B = 1).
pub const KINETIC_HEAT_CAPACITY: f64 = 1.5;

/// Mass of each particle and radius of the confining ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasParameters {
    pub mass: f64,
    pub radius: f64,
}

impl GasParameters {
    pub fn new(mass: f64, radius: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::Domain(format!("mass must be positive, got {mass}")));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Domain(format!("radius must be positive, got {radius}")));
        }
        Ok(GasParameters { mass, radius })
    }

    pub fn unit() -> Self {
        GasParameters { mass: 1.0, radius: 1.0 }
    }

    /// `I∞ = mR²`, the inertia of a thin equatorial ring.
    pub fn inertia_limit(&self) -> f64 {
        self.mass * self.radius * self.radius
    }

    /// `λ = ½ m θ R²`.
    pub fn lambda(&self, theta: f64) -> f64 {
        0.5 * self.mass * theta * self.radius * self.radius
    }
}

/// Inverse temperature and angular velocity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedTemperature {
    pub beta: f64,
    pub omega: [f64; 3],
}

/// Flat affine coordinates `(β, r)` with `r = −βω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlatPoint {
    pub beta: f64,
    pub r: [f64; 3],
}

impl GeneralizedTemperature {
    pub fn new(beta: f64, omega: [f64; 3]) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Domain(format!("β must be positive, got {beta}")));
        }
        if omega.iter().any(|w| !w.is_finite()) {
            return Err(Error::Domain("ω must be finite".into()));
        }
        Ok(GeneralizedTemperature { beta, omega })
    }

    pub fn omega_sq(&self) -> f64 {
        self.omega.iter().map(|w| w * w).sum()
    }

    /// `θ = βω²`.
    pub fn theta(&self) -> f64 {
        self.beta * self.omega_sq()
    }

    pub fn omega_vec(&self) -> Vector3<f64> {
        Vector3::from(self.omega)
    }

    pub fn to_flat(&self) -> FlatPoint {
        FlatPoint { beta: self.beta, r: self.omega.map(|w| -self.beta * w) }
    }

    pub fn from_flat(p: FlatPoint) -> Result<Self> {
        if !(p.beta > 0.0) {
            return Err(Error::Domain(format!("β must be positive, got {}", p.beta)));
        }
        GeneralizedTemperature::new(p.beta, p.r.map(|r| -r / p.beta))
    }

    /// `τ = −β`, the time component of the Lie-algebra element.
    pub fn tau(&self) -> f64 {
        -self.beta
    }
}

impl FlatPoint {
    pub fn as_array(&self) -> [f64; 4] {
        [self.beta, self.r[0], self.r[1], self.r[2]]
    }

    pub fn from_array(x: [f64; 4]) -> Self {
        FlatPoint { beta: x[0], r: [x[1], x[2], x[3]] }
    }
}

/// Partials of the flat coordinates with respect to another chart's coordinates.
///
/// `matrix[(i, a)] = ∂x^i/∂y^a` with `x = (β, r)`; row `i` is therefore the
/// covector `dx^i` written in the `y` chart.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartJacobian {
    pub chart: Chart,
    pub matrix: Matrix4<f64>,
    pub inverse: Matrix4<f64>,
}

/// `A = I·Id + 2βI′ωωᵀ`, the derivative of `M = I(θ)ω` with respect to `ω` at fixed β.
pub fn momentum_jacobian(p: &GeneralizedTemperature, inertia: f64, inertia_prime: f64) -> Matrix3<f64> {
    let w = p.omega_vec();
    Matrix3::identity() * inertia + w * w.transpose() * (2.0 * p.beta * inertia_prime)
}

/// Jacobian to the flat chart from a chart that does not depend on the gas:
/// flat, `(β, ω)` or `(u, ω)`.
pub fn kinematic_jacobian(p: &GeneralizedTemperature, chart: Chart) -> Result<Matrix4<f64>> {
    let b = p.beta;
    let db = match chart {
        Chart::Flat => return Ok(Matrix4::identity()),
        Chart::BetaOmega => 1.0,
        Chart::UOmega => -b.powf(1.5),
        other => return Err(Error::Unsupported(format!("{other} depends on the potential"))),
    };
    let mut j = Matrix4::zeros();
    j[(0, 0)] = db;
    for a in 0..3 {
        j[(a + 1, 0)] = -p.omega[a] * db;
        j[(a + 1, a + 1)] = -b;
    }
    Ok(j)
}

/// Jacobian from `chart` to the flat chart at `p`.
pub fn chart_jacobian(p: &GeneralizedTemperature, gp: &GasParameters, chart: Chart) -> Result<ChartJacobian> {
    let b = p.beta;
    let w = p.omega;
    let mut j = Matrix4::zeros();
    match chart {
        Chart::Flat | Chart::BetaOmega | Chart::UOmega => j = kinematic_jacobian(p, chart)?,
        Chart::BetaM => {
            let (i, ip) = partition::inertia(p.theta(), gp)?;
            let denom = i + 2.0 * p.theta() * ip;
            if !(denom > 0.0) {
                return Err(Error::ChartSingular(format!("I + 2θI′ = {denom} is not positive")));
            }
            let a_inv = momentum_jacobian(p, i, ip)
                .try_inverse()
                .ok_or_else(|| Error::ChartSingular("momentum map is not invertible".into()))?;
            j[(0, 0)] = 1.0;
            let ratio = (i + p.theta() * ip) / denom;
            for a in 0..3 {
                j[(a + 1, 0)] = -w[a] * ratio;
                for c in 0..3 {
                    j[(a + 1, c + 1)] = -b * a_inv[(a, c)];
                }
            }
        }
        Chart::EnergyMomentum => {
            return Err(Error::Unsupported("the E-M chart is only used for the rigid-body dual potential".into()))
        }
    }
    let inverse = j.try_inverse().ok_or_else(|| Error::ChartSingular(format!("{chart} Jacobian")))?;
    Ok(ChartJacobian { chart, matrix: j, inverse })
}

/// Coordinates of `p` in `chart`.
pub fn chart_coordinates(p: &GeneralizedTemperature, gp: &GasParameters, chart: Chart) -> Result<[f64; 4]> {
    let w = p.omega;
    Ok(match chart {
        Chart::Flat => p.to_flat().as_array(),
        Chart::BetaOmega => [p.beta, w[0], w[1], w[2]],
        Chart::UOmega => [2.0 / p.beta.sqrt(), w[0], w[1], w[2]],
        Chart::BetaM => {
            let (_, m) = momenta(p, gp)?;
            [p.beta, m[0], m[1], m[2]]
        }
        Chart::EnergyMomentum => {
            let (e, m) = momenta(p, gp)?;
            [e, m[0], m[1], m[2]]
        }
    })
}

/// Expected energy and angular momentum `(E, M) = −dz`.
pub fn momenta(p: &GeneralizedTemperature, gp: &GasParameters) -> Result<(f64, [f64; 3])> {
    let (i, _) = partition::inertia(p.theta(), gp)?;
    let e = KINETIC_HEAT_CAPACITY / p.beta + 0.5 * i * p.omega_sq();
    Ok((e, p.omega.map(|w| i * w)))
}

/// Entropy `s = z + βE + ⟨r, M⟩` and Massieu potential `z`.
pub fn entropy_and_massieu(p: &GeneralizedTemperature, gp: &GasParameters) -> Result<(f64, f64)> {
    let z = partition::z(p, gp)?;
    let (e, m) = momenta(p, gp)?;
    let flat = p.to_flat();
    let pairing = flat.beta * e + (0..3).map(|a| flat.r[a] * m[a]).sum::<f64>();
    Ok((z + pairing, z))
}
