//! Iterated flat covariant differentials `Dⁿz` via the covariant Faà di Bruno formula.
//!
//! With `θ = βω² = r²/β` and `c_j = ∂^jζ_rot/∂θ^j`,
//!
//! ```text
//! Dⁿζ_rot = Σ_j c_j/j! · Sym/n! Σ_{k: Σk_i = n−j} n!/Π(k_i+1)! ⊗_i D^{k_i+1}θ
//! D^{n+2}θ = (−1)ⁿ β^{1−n} dβ^{·n}·⟨dω·dω⟩
//! Dⁿζ_int = (n−1)! (3/2) β^{n/2} du^{⊗n},   u = 2β^{−1/2}
//! ```
//!
//! The differentials are those of the flat connection of `(β, r)`. Components
//! are assembled directly in the requested chart from the covectors `dβ`, `dω`
//! written in that chart, which avoids the large cancelling terms that flat
//! components develop at high angular velocity.

use nalgebra::Vector3;

use crate::cumulants::cumulant_table;
use crate::error::{Error, Result};
use crate::model::{momentum_jacobian, GasParameters, GeneralizedTemperature, KINETIC_HEAT_CAPACITY};
use crate::partition;
use crate::tensor::{Chart, CovTensor, ValueSpace, VectorValuedForm, MAX_ORDER};

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// `dβ` and `dω_a` expressed in a chart at a point.
#[derive(Debug, Clone)]
pub struct Coframe {
    pub chart: Chart,
    pub beta: f64,
    pub omega: [f64; 3],
    pub dbeta: CovTensor,
    pub domega: VectorValuedForm,
}

impl Coframe {
    pub fn new(p: &GeneralizedTemperature, gp: &GasParameters, chart: Chart) -> Result<Self> {
        let b = p.beta;
        let w = p.omega;
        let e = |i| CovTensor::basis(i, chart);
        let (dbeta, domega): (CovTensor, Vec<CovTensor>) = match chart {
            Chart::Flat => {
                let db = e(0);
                let dw = (0..3).map(|a| e(a + 1).add(&db.scale(w[a])).map(|t| t.scale(-1.0 / b))).collect::<Result<_>>()?;
                (db, dw)
            }
            Chart::BetaOmega => (e(0), (1..4).map(e).collect()),
            Chart::UOmega => (e(0).scale(-b.powf(1.5)), (1..4).map(e).collect()),
            Chart::BetaM => {
                let (i, ip) = partition::inertia(p.theta(), gp)?;
                let a_inv = momentum_jacobian(p, i, ip)
                    .try_inverse()
                    .ok_or_else(|| Error::ChartSingular("momentum map is not invertible".into()))?;
                let wv = Vector3::from(w);
                let shift = a_inv * wv * (-ip * p.omega_sq());
                let dw = (0..3)
                    .map(|a| {
                        CovTensor::covector([shift[a], a_inv[(a, 0)], a_inv[(a, 1)], a_inv[(a, 2)]], chart)
                    })
                    .collect();
                (e(0), dw)
            }
            Chart::EnergyMomentum => {
                return Err(Error::Unsupported("gas differentials are not expressed in the E-M chart".into()))
            }
        };
        Ok(Coframe { chart, beta: b, omega: w, dbeta, domega: VectorValuedForm::new(ValueSpace::So3, domega)? })
    }

    /// Coframe from the Jacobian `jac[(i, a)] = ∂x^i/∂y^a` of the flat coordinates,
    /// using `dω = −(dr + ω dβ)/β`.
    pub fn from_jacobian(beta: f64, omega: [f64; 3], chart: Chart, jac: &nalgebra::Matrix4<f64>) -> Result<Self> {
        let row = |i: usize| CovTensor::covector([jac[(i, 0)], jac[(i, 1)], jac[(i, 2)], jac[(i, 3)]], chart);
        let dbeta = row(0);
        let domega = (0..3)
            .map(|a| row(a + 1).add(&dbeta.scale(omega[a])).map(|t| t.scale(-1.0 / beta)))
            .collect::<Result<_>>()?;
        Ok(Coframe { chart, beta, omega, dbeta, domega: VectorValuedForm::new(ValueSpace::So3, domega)? })
    }

    /// `du = −β^{−3/2} dβ`.
    pub fn du(&self) -> CovTensor {
        self.dbeta.scale(-self.beta.powf(-1.5))
    }

    /// `dθ = ω² dβ + 2β⟨ω, dω⟩`.
    pub fn dtheta(&self) -> Result<CovTensor> {
        let w2: f64 = self.omega.iter().map(|x| x * x).sum();
        let mut t = self.dbeta.scale(w2);
        for a in 0..3 {
            t.add_scaled(&self.domega.comps[a], 2.0 * self.beta * self.omega[a])?;
        }
        Ok(t)
    }

    /// `⟨dω|dω⟩ = Σ_a dω_a ⊗ dω_a`.
    pub fn omega_pair(&self) -> Result<CovTensor> {
        self.domega.contract(&self.domega)
    }

    /// `⟨dω·dω⟩ = 2⟨dω|dω⟩`.
    pub fn omega_product(&self) -> Result<CovTensor> {
        self.domega.sym_contract(&self.domega)
    }
}

/// `D^l θ` for `θ = βω²`.
pub fn theta_derivative(frame: &Coframe, l: usize) -> Result<CovTensor> {
    if l == 0 || l > MAX_ORDER {
        return Err(Error::UnsupportedOrder { order: l, max: MAX_ORDER });
    }
    if l == 1 {
        return frame.dtheta();
    }
    let n = l - 2;
    let mut power = CovTensor::scalar(1.0, frame.chart);
    for _ in 0..n {
        power = power.sym_product(&frame.dbeta)?;
    }
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(power.sym_product(&frame.omega_product()?)?.scale(sign * frame.beta.powi(1 - n as i32)))
}

/// `D^l(βω²)` at a point, in the given chart.
pub fn cov_deriv_theta(l: usize, p: &GeneralizedTemperature, gp: &GasParameters, chart: Chart) -> Result<CovTensor> {
    theta_derivative(&Coframe::new(p, gp, chart)?, l)
}

/// The composition sum of the order-`n` Faà di Bruno term with `j` factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionSum {
    pub n: usize,
    pub j: usize,
    /// Ordered compositions `k` with `Σk_i = n − j` and weight `n!/Π(k_i+1)!`.
    pub terms: Vec<(Vec<usize>, u64)>,
}

impl PartitionSum {
    pub fn new(n: usize, j: usize) -> Result<Self> {
        if j == 0 || j > n || n > MAX_ORDER {
            return Err(Error::UnsupportedOrder { order: n, max: MAX_ORDER });
        }
        let mut terms = Vec::new();
        let mut k = vec![0; j];
        compositions(n - j, 0, &mut k, &mut |k| {
            let denom: u64 = k.iter().map(|&ki| factorial(ki + 1)).product();
            terms.push((k.to_vec(), factorial(n) / denom));
        });
        Ok(PartitionSum { n, j, terms })
    }

    /// Non-increasing representatives with total weight (weight × number of orderings).
    pub fn sorted(&self) -> Vec<(Vec<usize>, u64)> {
        let mut out: Vec<(Vec<usize>, u64)> = Vec::new();
        for (k, w) in &self.terms {
            let mut s = k.clone();
            s.sort_unstable_by(|a, b| b.cmp(a));
            match out.iter_mut().find(|(r, _)| *r == s) {
                Some(entry) => entry.1 += w,
                None => out.push((s, *w)),
            }
        }
        out
    }
}

fn compositions(rest: usize, slot: usize, k: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
    if slot + 1 == k.len() {
        k[slot] = rest;
        visit(k);
        return;
    }
    for v in 0..=rest {
        k[slot] = v;
        compositions(rest - v, slot + 1, k, visit);
    }
}

/// `Dⁿζ_rot` from cumulants `c[j−1] = c_j` (at least `n` of them).
pub fn zrot_derivative(frame: &Coframe, n: usize, c: &[f64]) -> Result<CovTensor> {
    if n == 0 || n > MAX_ORDER {
        return Err(Error::UnsupportedOrder { order: n, max: MAX_ORDER });
    }
    if c.len() < n {
        return Err(Error::Arity(format!("order {n} needs {n} cumulants, got {}", c.len())));
    }
    let dth: Vec<CovTensor> = (1..=n).map(|l| theta_derivative(frame, l)).collect::<Result<_>>()?;
    let mut total = CovTensor::zeros(n, frame.chart)?;
    for j in 1..=n {
        let mut inner = CovTensor::zeros(n, frame.chart)?;
        for (k, w) in PartitionSum::new(n, j)?.sorted() {
            let mut prod = CovTensor::scalar(1.0, frame.chart);
            for ki in &k {
                prod = prod.outer(&dth[*ki])?;
            }
            inner.add_scaled(&prod, w as f64)?;
        }
        let coef = c[j - 1] / (factorial(j) as f64 * factorial(n) as f64);
        total.add_scaled(&inner.sym_unnormalized()?, coef)?;
    }
    Ok(total)
}

/// `Dⁿζ_int = (n−1)! (3/2) β^{n/2} du^{⊗n}`.
pub fn zint_derivative(frame: &Coframe, n: usize) -> Result<CovTensor> {
    if n == 0 || n > MAX_ORDER {
        return Err(Error::UnsupportedOrder { order: n, max: MAX_ORDER });
    }
    let du = frame.du();
    let mut t = CovTensor::scalar(1.0, frame.chart);
    for _ in 0..n {
        t = t.outer(&du)?;
    }
    Ok(t.scale(factorial(n - 1) as f64 * KINETIC_HEAT_CAPACITY * frame.beta.powf(n as f64 / 2.0)))
}

/// `Dⁿz` in `chart`.
pub fn cov_diff_z(n: usize, p: &GeneralizedTemperature, gp: &GasParameters, chart: Chart) -> Result<CovTensor> {
    Ok(cov_diff_z_upto(n, p, gp, chart)?.pop().expect("n ≥ 1"))
}

/// `Dz, D²z, …, Dⁿz` in `chart`, sharing one cumulant evaluation.
pub fn cov_diff_z_upto(n: usize, p: &GeneralizedTemperature, gp: &GasParameters, chart: Chart) -> Result<Vec<CovTensor>> {
    if n == 0 || n > MAX_ORDER {
        return Err(Error::UnsupportedOrder { order: n, max: MAX_ORDER });
    }
    let frame = Coframe::new(p, gp, chart)?;
    let table = cumulant_table(p.theta(), gp, n.max(2))?;
    (1..=n).map(|k| zint_derivative(&frame, k)?.add(&zrot_derivative(&frame, k, &table.c)?)).collect()
}

/// Hand-expanded `Dⁿζ_rot` for `n ≤ 4`, written with `P = ⟨dω·dω⟩`:
///
/// ```text
/// Dζ   = c₁ dθ
/// D²ζ  = c₂ dθ⊗dθ + c₁ βP
/// D³ζ  = c₃ dθ^{⊗3} + c₂ βP·dθ − c₁ dβ·P
/// D⁴ζ  = c₄ dθ^{⊗4} + c₃ βP·(dθ⊗dθ) + c₂(−dβ·P·dθ + ½β² P·P) + c₁ dβ·dβ·P/β
/// ```
pub fn zrot_closed_form(frame: &Coframe, n: usize, c: &[f64]) -> Result<CovTensor> {
    if c.len() < n {
        return Err(Error::Arity(format!("order {n} needs {n} cumulants")));
    }
    let b = frame.beta;
    let dt = frame.dtheta()?;
    let pp = frame.omega_product()?;
    let db = &frame.dbeta;
    let dt2 = dt.outer(&dt)?;
    let pow = |k: usize| -> Result<CovTensor> {
        let mut t = CovTensor::scalar(1.0, frame.chart);
        for _ in 0..k {
            t = t.outer(&dt)?;
        }
        Ok(t)
    };
    match n {
        1 => Ok(dt.scale(c[0])),
        2 => dt2.scale(c[1]).add(&pp.scale(c[0] * b)),
        3 => {
            let mut t = pow(3)?.scale(c[2]);
            t.add_scaled(&pp.sym_product(&dt)?, c[1] * b)?;
            t.add_scaled(&db.sym_product(&pp)?, -c[0])?;
            Ok(t)
        }
        4 => {
            let mut t = pow(4)?.scale(c[3]);
            t.add_scaled(&pp.sym_product(&dt2)?, c[2] * b)?;
            t.add_scaled(&db.sym_product(&pp)?.sym_product(&dt)?, -c[1])?;
            t.add_scaled(&pp.sym_product(&pp)?, 0.5 * c[1] * b * b)?;
            t.add_scaled(&db.sym_product(db)?.sym_product(&pp)?, c[0] / b)?;
            Ok(t)
        }
        _ => Err(Error::UnsupportedOrder { order: n, max: 4 }),
    }
}

// Central difference weights for the k-th derivative, offsets −m..=m.
fn stencil(k: usize) -> &'static [f64] {
    match k {
        0 => &[1.0],
        1 => &[-0.5, 0.0, 0.5],
        2 => &[1.0, -2.0, 1.0],
        3 => &[-0.5, 1.0, 0.0, -1.0, 0.5],
        4 => &[1.0, -4.0, 6.0, -4.0, 1.0],
        5 => &[-0.5, 2.0, -2.5, 0.0, 2.5, -2.0, 0.5],
        _ => unreachable!("derivative order is capped at 5"),
    }
}

fn mixed_partial(f: &dyn Fn([f64; 4]) -> Result<f64>, x: [f64; 4], counts: [usize; 4], h: [f64; 4]) -> Result<f64> {
    let mut total = 0.0;
    let sizes: Vec<usize> = counts.iter().map(|&k| stencil(k).len()).collect();
    let mut idx = [0usize; 4];
    loop {
        let mut w = 1.0;
        let mut y = x;
        for a in 0..4 {
            let s = stencil(counts[a]);
            w *= s[idx[a]];
            let offset = idx[a] as f64 - (s.len() / 2) as f64;
            y[a] += offset * h[a];
        }
        if w != 0.0 {
            total += w * f(y)?;
        }
        let mut a = 0;
        loop {
            if a == 4 {
                let scale: f64 = (0..4).map(|a| h[a].powi(counts[a] as i32)).product();
                return Ok(total / scale);
            }
            idx[a] += 1;
            if idx[a] < sizes[a] {
                break;
            }
            idx[a] = 0;
            a += 1;
        }
    }
}

/// Symmetric tensor of `n`-th partials of `f` at `x` by product central
/// differences with one Richardson level (steps `h` and `h/2`).
pub fn fd_derivative(f: &dyn Fn([f64; 4]) -> Result<f64>, x: [f64; 4], n: usize, h: [f64; 4], chart: Chart) -> Result<CovTensor> {
    if n == 0 || n > MAX_ORDER {
        return Err(Error::UnsupportedOrder { order: n, max: MAX_ORDER });
    }
    let half = h.map(|v| v / 2.0);
    let mut cache = std::collections::HashMap::new();
    let mut err = None;
    let t = CovTensor::from_fn(n, chart, |idx| {
        let mut counts = [0usize; 4];
        for &i in idx {
            counts[i] += 1;
        }
        if let Some(v) = cache.get(&counts) {
            return *v;
        }
        let v = match (mixed_partial(f, x, counts, h), mixed_partial(f, x, counts, half)) {
            (Ok(a), Ok(b)) => (4.0 * b - a) / 3.0,
            (Err(e), _) | (_, Err(e)) => {
                err = Some(e);
                f64::NAN
            }
        };
        cache.insert(counts, v);
        v
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(t),
    }
}

/// Finite-difference steps for the flat chart: proportional to `β` and to `max(1, ‖r‖)`.
pub fn fd_steps(p: &GeneralizedTemperature, n: usize) -> [f64; 4] {
    let x = p.to_flat();
    let r_norm = x.r.iter().map(|v| v * v).sum::<f64>().sqrt();
    let floor = f64::EPSILON.powf(1.0 / (n as f64 + 2.0));
    let hb = (1e-2 * x.beta).max(floor).min(0.1 * x.beta);
    let hr = (1e-2 * r_norm.max(1.0)).max(floor);
    [hb, hr, hr, hr]
}

/// `Dⁿz` in the flat chart by finite differences of `z(β, r)`.
pub fn fd_oracle(n: usize, p: &GeneralizedTemperature, gp: &GasParameters) -> Result<CovTensor> {
    let gp = *gp;
    let f = move |x: [f64; 4]| partition::z_flat(x, &gp);
    fd_derivative(&f, p.to_flat().as_array(), n, fd_steps(p, n), Chart::Flat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Jet;
    use crate::model::chart_jacobian;

    fn unit() -> GasParameters {
        GasParameters::unit()
    }

    fn rel(a: &CovTensor, b: &CovTensor) -> f64 {
        a.sub(b).unwrap().frobenius() / b.frobenius().max(1e-300)
    }

    fn theta_jet(p: &GeneralizedTemperature, degree: usize) -> Jet {
        let [b, x, y, z] = Jet::vars(p.to_flat().as_array(), degree);
        x.mul(&x).add(&y.mul(&y)).add(&z.mul(&z)).mul(&b.recip())
    }

    #[test]
    fn theta_hessian_at_rest() {
        let p = GeneralizedTemperature::new(1.0, [0.0; 3]).unwrap();
        let t = cov_deriv_theta(2, &p, &unit(), Chart::Flat).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i == j && i > 0 { 2.0 } else { 0.0 };
                assert!((t.get(&[i, j]) - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn theta_derivatives_match_exact_jet() {
        let p = GeneralizedTemperature::new(0.8, [0.4, -1.1, 0.7]).unwrap();
        let jet = theta_jet(&p, 5);
        for l in 1..=5 {
            let ours = cov_deriv_theta(l, &p, &unit(), Chart::Flat).unwrap();
            let exact = jet.derivative(l, Chart::Flat).unwrap();
            assert!(rel(&ours, &exact) < 1e-13, "l={l} {}", rel(&ours, &exact));
        }
    }

    #[test]
    fn theta_derivatives_match_finite_differences() {
        let p = GeneralizedTemperature::new(1.3, [0.5, 0.2, -0.9]).unwrap();
        let f = |x: [f64; 4]| Ok((x[1] * x[1] + x[2] * x[2] + x[3] * x[3]) / x[0]);
        let x = p.to_flat().as_array();
        let h2 = fd_derivative(&f, x, 2, [1e-2; 4], Chart::Flat).unwrap();
        assert!(rel(&h2, &cov_deriv_theta(2, &p, &unit(), Chart::Flat).unwrap()) < 1e-8);
        let h5 = fd_derivative(&f, x, 5, [2e-2; 4], Chart::Flat).unwrap();
        assert!(rel(&h5, &cov_deriv_theta(5, &p, &unit(), Chart::Flat).unwrap()) < 1e-4);
    }

    #[test]
    fn second_differential_of_omega() {
        // D²ω_a = −(1/β) dβ·dω_a, checked against the exact jet of −r_a/β
        let p = GeneralizedTemperature::new(0.6, [0.3, 1.2, -0.5]).unwrap();
        let frame = Coframe::new(&p, &unit(), Chart::Flat).unwrap();
        let [b, x, _, _] = Jet::vars(p.to_flat().as_array(), 2);
        let exact = x.mul(&b.recip()).scale(-1.0).derivative(2, Chart::Flat).unwrap();
        let ours = frame.dbeta.sym_product(&frame.domega.comps[0]).unwrap().scale(-1.0 / p.beta);
        assert!(rel(&ours, &exact) < 1e-14);
    }

    #[test]
    fn zint_derivatives_match_jet() {
        let p = GeneralizedTemperature::new(1.7, [0.0; 3]).unwrap();
        let frame = Coframe::new(&p, &unit(), Chart::Flat).unwrap();
        let [b, _, _, _] = Jet::vars(p.to_flat().as_array(), 4);
        let zint = b.ln().scale(-1.5);
        for n in 1..=4 {
            let exact = zint.derivative(n, Chart::Flat).unwrap();
            assert!(rel(&zint_derivative(&frame, n).unwrap(), &exact) < 1e-14, "n={n}");
        }
        // third differential written with du: 3β^{3/2} du⊗du⊗du
        let d3 = zint_derivative(&frame, 3).unwrap();
        let du = frame.du();
        let expect = du.outer(&du).unwrap().outer(&du).unwrap().scale(3.0 * p.beta.powf(1.5));
        assert!(rel(&d3, &expect) < 1e-15);
    }

    #[test]
    fn partition_sum_weights() {
        let s = PartitionSum::new(4, 2).unwrap();
        let sorted = s.sorted();
        assert_eq!(sorted, vec![(vec![2, 0], 8), (vec![1, 1], 6)]);
        let s3 = PartitionSum::new(4, 3).unwrap();
        assert_eq!(s3.sorted(), vec![(vec![1, 0, 0], 36)]);
        assert_eq!(PartitionSum::new(4, 4).unwrap().terms, vec![(vec![0, 0, 0, 0], 24)]);
        for n in 1..=5 {
            for j in 1..=n {
                let s = PartitionSum::new(n, j).unwrap();
                assert!(s.terms.iter().all(|(k, w)| *w > 0 && k.iter().sum::<usize>() == n - j));
            }
        }
    }

    #[test]
    fn composition_coefficients_at_order_four() {
        // (1/j!)(1/n!)·weight, as the coefficient multiplying Sym(⊗ D^{k_i+1}θ)
        let coef = |j: usize, k: &[usize]| {
            let s = PartitionSum::new(4, j).unwrap();
            let w: u64 = s.sorted().into_iter().find(|(r, _)| r == k).unwrap().1;
            w as f64 / (factorial(j) * factorial(4)) as f64
        };
        assert!((coef(2, &[2, 0]) - 1.0 / 6.0).abs() < 1e-15);
        assert!((coef(2, &[1, 1]) - 1.0 / 8.0).abs() < 1e-15);
        // Sym(D²θ⊗dθ⊗dθ) enters with 1/4, twice the 1/8 printed with the order-4 example.
        assert!((coef(3, &[1, 0, 0]) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn sorted_and_ordered_compositions_agree() {
        let p = GeneralizedTemperature::new(0.9, [0.3, -0.8, 0.5]).unwrap();
        let frame = Coframe::new(&p, &unit(), Chart::Flat).unwrap();
        let dth: Vec<CovTensor> = (1..=4).map(|l| theta_derivative(&frame, l).unwrap()).collect();
        for j in 1..=4 {
            let s = PartitionSum::new(4, j).unwrap();
            let build = |terms: &[(Vec<usize>, u64)]| {
                let mut acc = CovTensor::zeros(4, Chart::Flat).unwrap();
                for (k, w) in terms {
                    let mut prod = CovTensor::scalar(1.0, Chart::Flat);
                    for ki in k {
                        prod = prod.outer(&dth[*ki]).unwrap();
                    }
                    acc.add_scaled(&prod, *w as f64).unwrap();
                }
                acc.sym_unnormalized().unwrap()
            };
            let a = build(&s.terms);
            let b = build(&s.sorted());
            assert!(rel(&a, &b) < 1e-14);
        }
    }

    #[test]
    fn first_and_second_differentials_at_rest() {
        let p = GeneralizedTemperature::new(1.0, [0.0; 3]).unwrap();
        let d = cov_diff_z_upto(2, &p, &unit(), Chart::Flat).unwrap();
        assert!((d[0].get(&[0]) + 1.5).abs() < 1e-14);
        for a in 1..4 {
            assert!(d[0].get(&[a]).abs() < 1e-15);
        }
        let diag = [1.5, 0.4, 0.4, 0.4];
        for i in 0..4 {
            for j in 0..4 {
                let e = if i == j { diag[i] } else { 0.0 };
                assert!((d[1].get(&[i, j]) - e).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn generic_matches_closed_forms() {
        let gp = unit();
        let p = GeneralizedTemperature::new(1.0, [0.0, 0.0, 1.0]).unwrap();
        let table = cumulant_table(p.theta(), &gp, 4).unwrap();
        for chart in [Chart::Flat, Chart::BetaOmega] {
            let frame = Coframe::new(&p, &gp, chart).unwrap();
            for n in 1..=4 {
                let a = zrot_derivative(&frame, n, &table.c).unwrap();
                let b = zrot_closed_form(&frame, n, &table.c).unwrap();
                assert!(rel(&a, &b) < 1e-12, "n={n} {chart}: {}", rel(&a, &b));
            }
        }
    }

    #[test]
    fn chart_assembly_matches_transport() {
        let gp = unit();
        let p = GeneralizedTemperature::new(0.7, [0.9, -0.4, 1.3]).unwrap();
        let flat = cov_diff_z_upto(4, &p, &gp, Chart::Flat).unwrap();
        for chart in [Chart::BetaOmega, Chart::UOmega, Chart::BetaM] {
            let direct = cov_diff_z_upto(4, &p, &gp, chart).unwrap();
            let j = chart_jacobian(&p, &gp, chart).unwrap();
            for n in 0..4 {
                let moved = flat[n].transport(&j.matrix, chart);
                assert!(rel(&direct[n], &moved) < 1e-11, "{chart} n={}", n + 1);
            }
        }
    }

    #[test]
    fn fd_reproduces_momenta_and_kinetic_third() {
        let gp = unit();
        let p = GeneralizedTemperature::new(1.2, [0.3, 0.0, -0.6]).unwrap();
        let (e, m) = crate::model::momenta(&p, &gp).unwrap();
        let d1 = fd_oracle(1, &p, &gp).unwrap();
        assert!((d1.get(&[0]) + e).abs() < 1e-8 * e);
        for a in 0..3 {
            assert!((d1.get(&[a + 1]) + m[a]).abs() < 1e-8);
        }
        let f = |x: [f64; 4]| partition::z_int(x[0], &gp);
        let d3 = fd_derivative(&f, p.to_flat().as_array(), 3, fd_steps(&p, 3), Chart::Flat).unwrap();
        let frame = Coframe::new(&p, &gp, Chart::Flat).unwrap();
        assert!(rel(&d3, &zint_derivative(&frame, 3).unwrap()) < 1e-6);
    }

    #[test]
    fn differentials_symmetric_and_metric_positive() {
        let gp = unit();
        let p = GeneralizedTemperature::new(0.5, [1.5, -2.0, 0.3]).unwrap();
        let d = cov_diff_z_upto(4, &p, &gp, Chart::Flat).unwrap();
        for t in &d {
            assert!(t.symmetry_defect() <= 1e-12 * t.frobenius());
        }
        let g = d[1].to_matrix().unwrap();
        assert!(g.symmetric_eigenvalues().iter().all(|&l| l > 0.0));
    }
}
