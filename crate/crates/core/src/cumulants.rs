//! Cumulants of the radial observable `ι = ½mρ²` as functions of `θ = βω²`.
//!
//! `c_n = ∂ⁿζ_rot/∂θⁿ` are the cumulants of `ι` under the Gibbs measure. They
//! are computed from central moments through the formal power series identity
//! `Σ E[ι̂ⁿ] tⁿ/n! = exp(Σ_{n≥2} c_n tⁿ/n!)`, and cross-checked against the
//! polynomials `f₁ = ι`, `f₂ = ι̂²`, `f_{n+1} = ι̂ f_n + ∂f_n/∂θ`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::GasParameters;
use crate::partition;

/// Maximum truncation order of [`PowerSeries`].
pub const MAX_SERIES: usize = 12;
/// Highest cumulant order available from quadrature moments.
pub const MAX_CUMULANT: usize = 8;

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Truncated formal power series `a₀ + a₁t + … + a_N t^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    pub coeffs: Vec<f64>,
}

impl PowerSeries {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.len() > MAX_SERIES + 1 {
            return Err(Error::Arity(format!("series needs 1..={} coefficients", MAX_SERIES + 1)));
        }
        Ok(PowerSeries { coeffs })
    }

    /// Series with coefficients `values[n]/n!`.
    pub fn exponential_generating(values: &[f64]) -> Result<Self> {
        PowerSeries::new(values.iter().enumerate().map(|(n, v)| v / factorial(n)).collect())
    }

    /// Coefficients multiplied back by `n!`.
    pub fn egf_values(&self) -> Vec<f64> {
        self.coeffs.iter().enumerate().map(|(n, a)| a * factorial(n)).collect()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn mul(&self, other: &PowerSeries) -> PowerSeries {
        let n = self.coeffs.len().min(other.coeffs.len());
        let mut c = vec![0.0; n];
        for (i, a) in self.coeffs.iter().take(n).enumerate() {
            for (j, b) in other.coeffs.iter().take(n - i).enumerate() {
                c[i + j] += a * b;
            }
        }
        PowerSeries { coeffs: c }
    }

    /// `exp(S)` for a series without constant term.
    pub fn exp(&self) -> Result<PowerSeries> {
        if self.coeffs[0] != 0.0 {
            return Err(Error::Domain("exp needs a series with zero constant term".into()));
        }
        let b = &self.coeffs;
        let mut c = vec![0.0; b.len()];
        c[0] = 1.0;
        for n in 1..b.len() {
            let s: f64 = (1..=n).map(|k| k as f64 * b[k] * c[n - k]).sum();
            c[n] = s / n as f64;
        }
        Ok(PowerSeries { coeffs: c })
    }

    /// `log(A)` for a series with constant term 1.
    pub fn log(&self) -> Result<PowerSeries> {
        if self.coeffs[0] != 1.0 {
            return Err(Error::Domain("log needs a series with constant term 1".into()));
        }
        let a = &self.coeffs;
        let mut b = vec![0.0; a.len()];
        for n in 1..a.len() {
            let s: f64 = (1..n).map(|k| k as f64 * b[k] * a[n - k]).sum();
            b[n] = a[n] - s / n as f64;
        }
        Ok(PowerSeries { coeffs: b })
    }
}

/// Cumulants `c₁..c_n` with a-priori error estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CumulantTable {
    pub theta: Option<f64>,
    /// `c[k]` holds `c_{k+1}`.
    pub c: Vec<f64>,
    pub errors: Vec<f64>,
}

impl CumulantTable {
    /// `c_n` (1-based).
    pub fn get(&self, n: usize) -> f64 {
        self.c[n - 1]
    }
}

/// Cumulants from raw moments `raw[k] = E[ι^k]`, `raw[0] = 1`.
pub fn cumulants_from_moments(raw: &[f64]) -> Result<CumulantTable> {
    if raw.len() < 3 {
        return Err(Error::Arity(format!("need at least E[ι⁰..ι²], got {} moments", raw.len())));
    }
    if (raw[0] - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!("raw[0] must be 1, got {}", raw[0])));
    }
    let mu = raw[1];
    let central: Vec<f64> = (0..raw.len())
        .map(|k| (0..=k).map(|i| binomial(k, i) * raw[i] * (-mu).powi((k - i) as i32)).sum())
        .collect();
    cumulants_from_central(mu, &central)
}

/// Cumulants from the mean and central moments `central[k] = E[(ι − E[ι])^k]`.
pub fn cumulants_from_central(mean: f64, central: &[f64]) -> Result<CumulantTable> {
    if central.len() < 3 {
        return Err(Error::Arity(format!("need at least three central moments, got {}", central.len())));
    }
    let mut values = central.to_vec();
    values[0] = 1.0;
    values[1] = 0.0;
    let log = PowerSeries::exponential_generating(&values)?.log()?;
    let mut c = log.egf_values();
    c[1] = mean;
    let c: Vec<f64> = c.into_iter().skip(1).collect();
    let sigma = central[2].max(0.0).sqrt();
    let errors = (1..=c.len())
        .map(|n| if n == 1 { 1e-14 * mean.abs() } else { 1e-13 * factorial(n) * sigma.powi(n as i32) })
        .collect();
    Ok(CumulantTable { theta: None, c, errors })
}

/// `c₁..c_n` at `θ` from quadrature central moments.
pub fn cumulant_table(theta: f64, gp: &GasParameters, n: usize) -> Result<CumulantTable> {
    if n > MAX_CUMULANT {
        return Err(Error::UnsupportedOrder { order: n, max: MAX_CUMULANT });
    }
    let (mean, central) = partition::central_moments(theta, gp, n.max(2))?;
    let mut table = cumulants_from_central(mean, &central)?;
    table.c.truncate(n);
    table.errors.truncate(n);
    table.theta = Some(theta);
    Ok(table)
}

/// `(−1)ⁿ (3/2)(n−1)!`, the limit of `θⁿ c_n` as `θ → ∞`.
pub fn cumulant_limit(n: usize) -> f64 {
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * 1.5 * factorial(n - 1)
}

/// `Σ_{p+q=k} C(k,p) Γ(p+3/2)/Γ(3/2) (−1)^p (3/2)^q`, the limit of `θ^k E[ι̂^k]`.
pub fn moment_limit_constant(k: usize) -> f64 {
    let mut total = 0.0;
    for p in 0..=k {
        let rising: f64 = (0..p).map(|j| j as f64 + 1.5).product();
        let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
        total += binomial(k, p) * rising * sign * 1.5f64.powi((k - p) as i32);
    }
    total
}

// Exponent vector: slot 0 is the power of ι, slot j ≥ 1 the power of μ_j = E[ι^j].
type Monomial = Vec<u8>;

/// Polynomial in `ι` whose coefficients are polynomials in the moments `μ_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentPolynomial {
    width: usize,
    terms: BTreeMap<Monomial, i64>,
}

impl MomentPolynomial {
    fn zero(width: usize) -> Self {
        MomentPolynomial { width, terms: BTreeMap::new() }
    }

    fn single(width: usize, slot: usize, coef: i64) -> Self {
        let mut m = vec![0u8; width];
        m[slot] = 1;
        let mut p = MomentPolynomial::zero(width);
        p.terms.insert(m, coef);
        p
    }

    fn insert(&mut self, m: Monomial, c: i64) {
        if c == 0 {
            return;
        }
        let e = self.terms.entry(m.clone()).or_insert(0);
        *e += c;
        if *e == 0 {
            self.terms.remove(&m);
        }
    }

    fn add(&self, other: &MomentPolynomial) -> MomentPolynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), *c);
        }
        out
    }

    fn mul(&self, other: &MomentPolynomial) -> MomentPolynomial {
        let mut out = MomentPolynomial::zero(self.width);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let m: Monomial = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.insert(m, ca * cb);
            }
        }
        out
    }

    /// `∂/∂θ` using `dμ_j/dθ = μ_{j+1} − μ_j μ_1`; `ι` itself does not depend on θ.
    fn d_theta(&self) -> Result<MomentPolynomial> {
        let mut out = MomentPolynomial::zero(self.width);
        for (m, c) in &self.terms {
            for j in 1..self.width {
                let e = m[j];
                if e == 0 {
                    continue;
                }
                if j + 1 >= self.width {
                    return Err(Error::UnsupportedOrder { order: j + 1, max: self.width - 1 });
                }
                let mut base = m.clone();
                base[j] -= 1;
                let coef = c * e as i64;
                let mut up = base.clone();
                up[j + 1] += 1;
                out.insert(up, coef);
                let mut down = base;
                down[j] += 1;
                down[1] += 1;
                out.insert(down, -coef);
            }
        }
        Ok(out)
    }

    /// `f_n` from the recursion.
    pub fn f(n: usize) -> Result<MomentPolynomial> {
        if n == 0 || n > MAX_CUMULANT {
            return Err(Error::UnsupportedOrder { order: n, max: MAX_CUMULANT });
        }
        let width = n + 2;
        let x = MomentPolynomial::single(width, 0, 1);
        if n == 1 {
            return Ok(x);
        }
        let centered = x.add(&MomentPolynomial::single(width, 1, -1));
        let mut f = centered.mul(&centered);
        for _ in 2..n {
            f = centered.mul(&f).add(&f.d_theta()?);
        }
        Ok(f)
    }

    pub fn degree_in_iota(&self) -> usize {
        self.terms.keys().map(|m| m[0] as usize).max().unwrap_or(0)
    }

    /// `E[p]` given `moments[j] = E[ι^j]` (with `moments[0] = 1`).
    pub fn expectation(&self, moments: &[f64]) -> Result<f64> {
        let mut total = 0.0;
        for (m, c) in &self.terms {
            let mut v = *c as f64;
            let d = m[0] as usize;
            if d >= moments.len() {
                return Err(Error::Arity(format!("E[ι^{d}] is not available")));
            }
            v *= moments[d];
            for (j, &e) in m.iter().enumerate().skip(1) {
                if e > 0 {
                    if j >= moments.len() {
                        return Err(Error::Arity(format!("μ_{j} is not available")));
                    }
                    v *= moments[j].powi(e as i32);
                }
            }
            total += v;
        }
        Ok(total)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }
}

/// `E[f_n]` at `θ`, evaluated on moments of `ι − ½mR²`.
///
/// For `n ≥ 2` the value depends only on `ι̂` and so is unchanged by the shift,
/// which keeps the moments small at large `θ`.
pub fn fn_expected(theta: f64, gp: &GasParameters, n: usize) -> Result<f64> {
    let poly = MomentPolynomial::f(n)?;
    let moments = partition::anchored_moments(theta, gp, n)?;
    let value = poly.expectation(&moments)?;
    if n == 1 {
        Ok(value + 0.5 * gp.mass * gp.radius * gp.radius)
    } else {
        Ok(value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn point_mass_has_no_spread() {
        let a: f64 = 0.7;
        let raw: Vec<f64> = (0..7).map(|k| a.powi(k)).collect();
        let t = cumulants_from_moments(&raw).unwrap();
        assert!((t.get(1) - a).abs() < 1e-15);
        for n in 2..=6 {
            assert!(t.get(n).abs() < 1e-14, "c_{n} = {}", t.get(n));
        }
    }

    #[test]
    fn gaussian_cumulants() {
        let t = cumulants_from_moments(&[1.0, 0.0, 1.0, 0.0, 3.0]).unwrap();
        assert_eq!(t.c, vec![0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn too_few_moments() {
        assert!(matches!(cumulants_from_moments(&[1.0, 0.5]), Err(Error::Arity(_))));
    }

    #[test]
    fn uniform_ball_variance() {
        let raw = partition::raw_moments(0.0, &GasParameters::unit(), 4).unwrap();
        let t = cumulants_from_moments(&raw).unwrap();
        assert!((t.get(2) - 3.0 / 175.0).abs() < 1e-14);
        assert!((fn_expected(0.0, &GasParameters::unit(), 2).unwrap() - 3.0 / 175.0).abs() < 1e-14);
        assert!((fn_expected(0.0, &GasParameters::unit(), 1).unwrap() - 0.2).abs() < 1e-14);
    }

    #[test]
    fn limit_constants() {
        assert_eq!(moment_limit_constant(1), 0.0);
        assert!((moment_limit_constant(2) - 1.5).abs() < 1e-15);
        assert_eq!(cumulant_limit(2), 1.5);
        assert_eq!(cumulant_limit(3), -3.0);
        assert_eq!(cumulant_limit(4), 9.0);
        // Moments of −(G − 3/2) for G ~ Gamma(3/2): third central moment −3
        assert!((moment_limit_constant(3) + 3.0).abs() < 1e-13);
    }

    #[test]
    fn recursion_degrees() {
        for n in 1..=MAX_CUMULANT {
            assert_eq!(MomentPolynomial::f(n).unwrap().degree_in_iota(), n);
        }
        // f₃ = ι̂³ − 3μ̂₂ ι̂ + (μ₃ − 3μ₂μ₁ + 2μ₁³)… checked through its expectation
        let f3 = MomentPolynomial::f(3).unwrap();
        let raw = [1.0, 0.3, 0.2, 0.15, 0.12];
        let t = cumulants_from_moments(&raw).unwrap();
        assert!((f3.expectation(&raw).unwrap() - t.get(3)).abs() < 1e-14);
    }

    #[test]
    fn recursion_matches_log_series() {
        let gp = GasParameters::unit();
        for &theta in &[0.0, 1.0, 10.0, 1e3] {
            let table = cumulant_table(theta, &gp, 6).unwrap();
            for n in 1..=6 {
                let e = fn_expected(theta, &gp, n).unwrap();
                let c = table.get(n);
                assert!(((e - c) / c).abs() < 1e-9, "θ={theta} n={n}: {e} vs {c}");
            }
        }
    }

    #[test]
    fn cumulants_approach_gamma_limits() {
        let gp = GasParameters::unit();
        let t = cumulant_table(1e4, &gp, 4).unwrap();
        for n in 2..=4 {
            let scaled = t.get(n) * 1e4f64.powi(n as i32);
            assert!((scaled / cumulant_limit(n) - 1.0).abs() < 0.05, "n={n} {scaled}");
        }
        let e3 = fn_expected(1e4, &gp, 3).unwrap() * 1e12;
        assert!((e3 / -3.0 - 1.0).abs() < 0.05);
    }

    #[test]
    fn series_domain_errors() {
        let s = PowerSeries::new(vec![1.0, 2.0]).unwrap();
        assert!(s.exp().is_err());
        assert!(PowerSeries::new(vec![2.0, 1.0]).unwrap().log().is_err());
        assert!(PowerSeries::new(vec![0.0; 14]).is_err());
    }

    proptest! {
        #[test]
        fn exp_log_round_trip(c in proptest::collection::vec(-1.0f64..1.0, 8)) {
            let mut coeffs = vec![0.0];
            coeffs.extend(c);
            let s = PowerSeries::new(coeffs).unwrap();
            let back = s.exp().unwrap().log().unwrap();
            for (a, b) in s.coeffs.iter().zip(&back.coeffs) {
                prop_assert!((a - b).abs() < 1e-12);
            }
            let one_plus = s.exp().unwrap();
            let again = one_plus.log().unwrap().exp().unwrap();
            for (a, b) in one_plus.coeffs.iter().zip(&again.coeffs) {
                prop_assert!((a - b).abs() < 1e-12 * a.abs().max(1.0));
            }
        }

        #[test]
        fn variance_is_nonnegative(theta in 0.0f64..1e5) {
            let t = cumulant_table(theta, &GasParameters::unit(), 2).unwrap();
            prop_assert!(t.get(2) >= 0.0);
        }
    }
}
