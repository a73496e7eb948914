//! Poisson bracket on the Gibbs set.
//!
//! `{f₁, f₂} = ⟨Q, [grad f₁, grad f₂]⟩` with `grad f = g⁻¹ df` taken in the
//! flat chart `(β, r)` and the bracket of `ℝ × so₃` equal to `(0, cross product)`.
//! Only the `r` components of the gradients contribute, so
//! `{f₁, f₂} = M · (grad_r f₁ × grad_r f₂)`. With this orientation
//! `{M_x, M_y} = +M_z`.

use std::sync::Arc;

use nalgebra::{Vector3, Vector4};

use crate::covderiv::fd_steps;
use crate::curvature::{metric, metric_inverse};
use crate::error::Result;
use crate::model::{momenta, FlatPoint, GasParameters, GeneralizedTemperature};
use crate::partition;
use crate::tensor::Chart;

type Scalar = Arc<dyn Fn([f64; 4]) -> Result<f64> + Send + Sync>;
type Gradient = Arc<dyn Fn([f64; 4]) -> Result<[f64; 4]> + Send + Sync>;

/// Scalar function of the flat coordinates `(β, r)`, optionally with its differential.
#[derive(Clone)]
pub struct ObservableFn {
    value: Scalar,
    differential: Option<Gradient>,
}

impl ObservableFn {
    pub fn new(f: impl Fn([f64; 4]) -> Result<f64> + Send + Sync + 'static) -> Self {
        ObservableFn { value: Arc::new(f), differential: None }
    }

    pub fn with_differential(
        f: impl Fn([f64; 4]) -> Result<f64> + Send + Sync + 'static,
        df: impl Fn([f64; 4]) -> Result<[f64; 4]> + Send + Sync + 'static,
    ) -> Self {
        ObservableFn { value: Arc::new(f), differential: Some(Arc::new(df)) }
    }

    /// Component `a` of the expected angular momentum; `dM_a = −g(∂_{r_a}, ·)`.
    pub fn momentum(a: usize, gp: GasParameters) -> Self {
        ObservableFn::with_differential(
            move |x| Ok(momenta(&point(x)?, &gp)?.1[a]),
            move |x| {
                let g = metric(&point(x)?, &gp, Chart::Flat)?;
                Ok(std::array::from_fn(|i| -g.get(&[a + 1, i])))
            },
        )
    }

    pub fn eval(&self, x: [f64; 4]) -> Result<f64> {
        (self.value)(x)
    }

    /// Supplied differential if present, otherwise central differences with one
    /// Richardson level.
    pub fn differential(&self, x: [f64; 4]) -> Result<[f64; 4]> {
        match &self.differential {
            Some(df) => df(x),
            None => self.fd_differential(x),
        }
    }

    pub fn fd_differential(&self, x: [f64; 4]) -> Result<[f64; 4]> {
        let h = fd_steps(&point(x)?, 1);
        let mut out = [0.0; 4];
        for i in 0..4 {
            let central = |s: f64| -> Result<f64> {
                let (mut a, mut b) = (x, x);
                a[i] += s;
                b[i] -= s;
                Ok((self.eval(a)? - self.eval(b)?) / (2.0 * s))
            };
            out[i] = (4.0 * central(h[i] / 2.0)? - central(h[i])?) / 3.0;
        }
        Ok(out)
    }
}

fn point(x: [f64; 4]) -> Result<GeneralizedTemperature> {
    GeneralizedTemperature::from_flat(FlatPoint::from_array(x))
}

/// `grad f = g⁻¹ df` in the flat chart.
pub fn gradient(f: &ObservableFn, p: &GeneralizedTemperature, gp: &GasParameters) -> Result<Vector4<f64>> {
    let g_inv = metric_inverse(&metric(p, gp, Chart::Flat)?)?;
    Ok(g_inv * Vector4::from(f.differential(p.to_flat().as_array())?))
}

/// `{f₁, f₂}` at `p`.
pub fn bracket(f1: &ObservableFn, f2: &ObservableFn, p: &GeneralizedTemperature, gp: &GasParameters) -> Result<f64> {
    let x = p.to_flat().as_array();
    let g_inv = metric_inverse(&metric(p, gp, Chart::Flat)?)?;
    let v1 = g_inv * Vector4::from(f1.differential(x)?);
    let v2 = g_inv * Vector4::from(f2.differential(x)?);
    let r1 = Vector3::new(v1[1], v1[2], v1[3]);
    let r2 = Vector3::new(v2[1], v2[2], v2[3]);
    let (_, m) = momenta(p, gp)?;
    Ok(Vector3::from(m).dot(&r1.cross(&r2)))
}

/// `x ↦ {f₁, f₂}(x)` as an observable, for nested brackets.
pub fn bracket_observable(f1: &ObservableFn, f2: &ObservableFn, gp: GasParameters) -> ObservableFn {
    let (f1, f2) = (f1.clone(), f2.clone());
    ObservableFn::new(move |x| bracket(&f1, &f2, &point(x)?, &gp))
}

/// Conformal factor `1/I(βω²)` of the bracket on the leaves `{β, ‖M‖ constant}`.
pub fn leaf_factor(p: &GeneralizedTemperature, gp: &GasParameters) -> Result<f64> {
    Ok(1.0 / partition::inertia(p.theta(), gp)?.0)
}
