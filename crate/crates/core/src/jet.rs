//! Truncated multivariate Taylor arithmetic in four variables.
//!
//! Exact derivatives of closed-form potentials up to a fixed total degree;
//! used as an independent reference for the analytic tensor formulas.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, Mutex};

use crate::error::Result;
use crate::tensor::{Chart, CovTensor, DIM};

type Exponent = [u8; DIM];

struct Basis {
    monomials: Vec<Exponent>,
    lookup: HashMap<Exponent, usize>,
    // (i, j, k): monomial i times monomial j is monomial k
    products: Vec<(usize, usize, usize)>,
}

fn basis(degree: usize) -> Arc<Basis> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Basis>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("jet basis cache poisoned");
    guard
        .entry(degree)
        .or_insert_with(|| {
            let mut monomials = Vec::new();
            for d in 0..=degree {
                for a in 0..=d {
                    for b in 0..=d - a {
                        for c in 0..=d - a - b {
                            monomials.push([a as u8, b as u8, c as u8, (d - a - b - c) as u8]);
                        }
                    }
                }
            }
            let lookup: HashMap<Exponent, usize> = monomials.iter().enumerate().map(|(i, e)| (*e, i)).collect();
            let mut products = Vec::new();
            for (i, a) in monomials.iter().enumerate() {
                for (j, b) in monomials.iter().enumerate() {
                    let s: Exponent = [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]];
                    if let Some(&k) = lookup.get(&s) {
                        products.push((i, j, k));
                    }
                }
            }
            Arc::new(Basis { monomials, lookup, products })
        })
        .clone()
}

/// Taylor polynomial of a function of four variables around a base point.
#[derive(Clone)]
pub struct Jet {
    degree: usize,
    basis: Arc<Basis>,
    coef: Vec<f64>,
}

impl std::fmt::Debug for Jet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Jet").field("degree", &self.degree).field("value", &self.value()).finish()
    }
}

impl Jet {
    pub fn constant(c: f64, degree: usize) -> Jet {
        let basis = basis(degree);
        let mut coef = vec![0.0; basis.monomials.len()];
        coef[0] = c;
        Jet { degree, basis, coef }
    }

    /// The coordinate function `x_i` expanded around `value`.
    pub fn var(i: usize, value: f64, degree: usize) -> Jet {
        let mut j = Jet::constant(value, degree);
        if degree > 0 {
            let mut e = [0u8; DIM];
            e[i] = 1;
            let k = j.basis.lookup[&e];
            j.coef[k] = 1.0;
        }
        j
    }

    /// The four coordinate jets at `point`.
    pub fn vars(point: [f64; 4], degree: usize) -> [Jet; 4] {
        std::array::from_fn(|i| Jet::var(i, point[i], degree))
    }

    pub fn value(&self) -> f64 {
        self.coef[0]
    }

    fn zip(&self, other: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        assert_eq!(self.degree, other.degree, "jets of different degree");
        Jet {
            degree: self.degree,
            basis: self.basis.clone(),
            coef: self.coef.iter().zip(&other.coef).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    pub fn add(&self, other: &Jet) -> Jet {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Jet) -> Jet {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet { degree: self.degree, basis: self.basis.clone(), coef: self.coef.iter().map(|a| a * s).collect() }
    }

    pub fn add_const(&self, c: f64) -> Jet {
        let mut j = self.clone();
        j.coef[0] += c;
        j
    }

    pub fn mul(&self, other: &Jet) -> Jet {
        assert_eq!(self.degree, other.degree, "jets of different degree");
        let mut coef = vec![0.0; self.coef.len()];
        for &(i, j, k) in &self.basis.products {
            coef[k] += self.coef[i] * other.coef[j];
        }
        Jet { degree: self.degree, basis: self.basis.clone(), coef }
    }

    /// `f(self)` given the Taylor coefficients `taylor[k] = f^{(k)}(a)/k!` at `a = self.value()`.
    pub fn compose(&self, taylor: &[f64]) -> Jet {
        let mut h = self.clone();
        h.coef[0] = 0.0;
        let mut out = Jet::constant(taylor[0], self.degree);
        let mut power = Jet::constant(1.0, self.degree);
        for c in taylor.iter().take(self.degree + 1).skip(1) {
            power = power.mul(&h);
            out = out.add(&power.scale(*c));
        }
        out
    }

    pub fn ln(&self) -> Jet {
        let a = self.value();
        let mut t = vec![a.ln()];
        for k in 1..=self.degree {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            t.push(sign / (k as f64 * a.powi(k as i32)));
        }
        self.compose(&t)
    }

    pub fn recip(&self) -> Jet {
        self.powf(-1.0)
    }

    pub fn powf(&self, p: f64) -> Jet {
        let a = self.value();
        let mut t = vec![a.powf(p)];
        let mut binom = 1.0;
        for k in 1..=self.degree {
            binom *= (p - (k as f64 - 1.0)) / k as f64;
            t.push(binom * a.powf(p - k as f64));
        }
        self.compose(&t)
    }

    pub fn exp(&self) -> Jet {
        let a = self.value();
        let mut t = vec![a.exp()];
        for k in 1..=self.degree {
            t.push(t[k - 1] / k as f64);
        }
        self.compose(&t)
    }

    /// The symmetric tensor of `n`-th partial derivatives at the base point.
    pub fn derivative(&self, n: usize, chart: Chart) -> Result<CovTensor> {
        assert!(n <= self.degree, "derivative order exceeds jet degree");
        CovTensor::from_fn(n, chart, |idx| {
            let mut e = [0u8; DIM];
            for &i in idx {
                e[i] += 1;
            }
            let weight: f64 = e.iter().map(|&k| (1..=k as u64).product::<u64>() as f64).product();
            self.coef[self.basis.lookup[&e]] * weight
        })
    }
}
