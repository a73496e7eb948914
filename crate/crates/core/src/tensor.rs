//! Dense covariant tensors on the 4-dimensional tangent space of the Gibbs set.
//!
//! Components are stored row-major over multi-indices in `{0,1,2,3}^k`; index 0
//! is the temperature-like coordinate and 1..3 the rotational ones. The
//! symmetrizer is unnormalized (`Sym(t) = Σ_σ σ·t`) and the symmetric product
//! of a `j`-form and a `k`-form is `Sym(a⊗b)/(j!k!)`, so `α·α = 2α⊗α`.

use std::fmt;
use std::sync::OnceLock;

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DIM: usize = 4;
pub const MAX_ORDER: usize = 5;

/// Coordinate systems in which tensor components may be expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Chart {
    /// Flat affine coordinates `(β, r)` with `r = −βω`.
    #[serde(rename = "flat")]
    Flat,
    #[serde(rename = "beta-omega")]
    BetaOmega,
    /// `(u, ω)` with `u = 2β^{-1/2}`.
    #[serde(rename = "u-omega")]
    UOmega,
    #[serde(rename = "beta-M")]
    BetaM,
    /// Dual flat coordinates `(E, M)` of the expected momentum.
    #[serde(rename = "E-M")]
    EnergyMomentum,
}

impl Chart {
    pub const ALL: [Chart; 5] = [Chart::Flat, Chart::BetaOmega, Chart::UOmega, Chart::BetaM, Chart::EnergyMomentum];

    pub fn label(self) -> &'static str {
        match self {
            Chart::Flat => "flat",
            Chart::BetaOmega => "beta-omega",
            Chart::UOmega => "u-omega",
            Chart::BetaM => "beta-M",
            Chart::EnergyMomentum => "E-M",
        }
    }

    /// Names of the four coordinates, in index order.
    pub fn coordinates(self) -> [&'static str; 4] {
        match self {
            Chart::Flat => ["beta", "r_x", "r_y", "r_z"],
            Chart::BetaOmega => ["beta", "omega_x", "omega_y", "omega_z"],
            Chart::UOmega => ["u", "omega_x", "omega_y", "omega_z"],
            Chart::BetaM => ["beta", "M_x", "M_y", "M_z"],
            Chart::EnergyMomentum => ["E", "M_x", "M_y", "M_z"],
        }
    }

    pub fn parse(s: &str) -> Result<Chart> {
        Chart::ALL
            .into_iter()
            .find(|c| c.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Domain(format!("unknown chart '{s}'")))
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn permutations(k: usize) -> &'static [Vec<usize>] {
    static TABLE: OnceLock<Vec<Vec<Vec<usize>>>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        (0..=MAX_ORDER)
            .map(|k| {
                let mut out = Vec::new();
                let mut items: Vec<usize> = (0..k).collect();
                heap_permute(k, &mut items, &mut out);
                out
            })
            .collect()
    });
    &table[k]
}

fn heap_permute(k: usize, items: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(items.clone());
        return;
    }
    for i in 0..k - 1 {
        heap_permute(k - 1, items, out);
        if k.is_multiple_of(2) {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
    heap_permute(k - 1, items, out);
}

/// Decomposes a flat storage index into its multi-index.
pub fn multi_index(mut flat: usize, order: usize) -> [usize; MAX_ORDER] {
    let mut idx = [0; MAX_ORDER];
    for slot in (0..order).rev() {
        idx[slot] = flat % DIM;
        flat /= DIM;
    }
    idx
}

fn flat_index(idx: &[usize]) -> usize {
    idx.iter().fold(0, |acc, &i| acc * DIM + i)
}

/// Totally covariant tensor with dense components in a declared chart.
///
/// Serializes as nested arrays (outermost array = first slot) together with
/// the chart label and the coordinate names in index order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TensorRepr", into = "TensorRepr")]
pub struct CovTensor {
    order: usize,
    chart: Chart,
    data: Vec<f64>,
}

impl CovTensor {
    pub fn zeros(order: usize, chart: Chart) -> Result<Self> {
        check_order(order)?;
        Ok(CovTensor { order, chart, data: vec![0.0; DIM.pow(order as u32)] })
    }

    pub fn scalar(value: f64, chart: Chart) -> Self {
        CovTensor { order: 0, chart, data: vec![value] }
    }

    pub fn covector(c: [f64; 4], chart: Chart) -> Self {
        CovTensor { order: 1, chart, data: c.to_vec() }
    }

    /// `e^i`, the `i`-th coordinate covector.
    pub fn basis(i: usize, chart: Chart) -> Self {
        let mut c = [0.0; 4];
        c[i] = 1.0;
        CovTensor::covector(c, chart)
    }

    pub fn from_matrix(m: &Matrix4<f64>, chart: Chart) -> Self {
        let mut data = vec![0.0; 16];
        for i in 0..4 {
            for j in 0..4 {
                data[i * 4 + j] = m[(i, j)];
            }
        }
        CovTensor { order: 2, chart, data }
    }

    pub fn from_data(order: usize, chart: Chart, data: Vec<f64>) -> Result<Self> {
        check_order(order)?;
        if data.len() != DIM.pow(order as u32) {
            return Err(Error::Arity(format!(
                "order-{order} tensor needs {} components, got {}",
                DIM.pow(order as u32),
                data.len()
            )));
        }
        Ok(CovTensor { order, chart, data })
    }

    pub fn from_fn(order: usize, chart: Chart, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let mut t = CovTensor::zeros(order, chart)?;
        for (flat, v) in t.data.iter_mut().enumerate() {
            let idx = multi_index(flat, order);
            *v = f(&idx[..order]);
        }
        Ok(t)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        debug_assert_eq!(idx.len(), self.order);
        self.data[flat_index(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        debug_assert_eq!(idx.len(), self.order);
        self.data[flat_index(idx)] = v;
    }

    /// Same components relabelled with another chart.
    pub fn relabel(mut self, chart: Chart) -> Self {
        self.chart = chart;
        self
    }

    pub fn to_matrix(&self) -> Result<Matrix4<f64>> {
        if self.order != 2 {
            return Err(Error::Arity(format!("expected an order-2 tensor, got order {}", self.order)));
        }
        Ok(Matrix4::from_fn(|i, j| self.data[i * 4 + j]))
    }

    fn same_chart(&self, other: &CovTensor) -> Result<()> {
        if self.chart != other.chart {
            return Err(Error::Contraction(format!("chart mismatch: {} vs {}", self.chart, other.chart)));
        }
        Ok(())
    }

    pub fn add(&self, other: &CovTensor) -> Result<CovTensor> {
        self.same_chart(other)?;
        if self.order != other.order {
            return Err(Error::Arity(format!("cannot add orders {} and {}", self.order, other.order)));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(CovTensor { order: self.order, chart: self.chart, data })
    }

    pub fn sub(&self, other: &CovTensor) -> Result<CovTensor> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> CovTensor {
        CovTensor { order: self.order, chart: self.chart, data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn add_scaled(&mut self, other: &CovTensor, s: f64) -> Result<()> {
        self.same_chart(other)?;
        if self.order != other.order {
            return Err(Error::Arity(format!("cannot add orders {} and {}", self.order, other.order)));
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
        Ok(())
    }

    pub fn outer(&self, other: &CovTensor) -> Result<CovTensor> {
        self.same_chart(other)?;
        let order = self.order + other.order;
        check_order(order)?;
        let mut data = Vec::with_capacity(self.data.len() * other.data.len());
        for a in &self.data {
            for b in &other.data {
                data.push(a * b);
            }
        }
        Ok(CovTensor { order, chart: self.chart, data })
    }

    /// Reorders slots: output slot `s` reads input slot `perm[s]`.
    pub fn permute(&self, perm: &[usize]) -> Result<CovTensor> {
        if perm.len() != self.order {
            return Err(Error::Arity(format!("permutation of length {} for order {}", perm.len(), self.order)));
        }
        let k = self.order;
        let mut out = vec![0.0; self.data.len()];
        let mut src = [0usize; MAX_ORDER];
        for (flat, v) in out.iter_mut().enumerate() {
            let idx = multi_index(flat, k);
            for s in 0..k {
                src[perm[s]] = idx[s];
            }
            *v = self.data[flat_index(&src[..k])];
        }
        Ok(CovTensor { order: k, chart: self.chart, data: out })
    }

    /// `Σ_{σ ∈ S_k} σ·t`.
    pub fn sym_unnormalized(&self) -> Result<CovTensor> {
        check_order(self.order)?;
        let k = self.order;
        let perms = permutations(k);
        let mut out = vec![0.0; self.data.len()];
        let mut src = [0usize; MAX_ORDER];
        for (flat, v) in out.iter_mut().enumerate() {
            let idx = multi_index(flat, k);
            let mut acc = 0.0;
            for p in perms {
                for s in 0..k {
                    src[s] = idx[p[s]];
                }
                acc += self.data[flat_index(&src[..k])];
            }
            *v = acc;
        }
        Ok(CovTensor { order: k, chart: self.chart, data: out })
    }

    /// Largest componentwise deviation under any slot permutation.
    pub fn symmetry_defect(&self) -> f64 {
        let k = self.order;
        let mut worst: f64 = 0.0;
        let mut src = [0usize; MAX_ORDER];
        for (flat, v) in self.data.iter().enumerate() {
            let idx = multi_index(flat, k);
            for p in permutations(k) {
                for s in 0..k {
                    src[s] = idx[p[s]];
                }
                worst = worst.max((v - self.data[flat_index(&src[..k])]).abs());
            }
        }
        worst
    }

    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        self.symmetry_defect() <= rel_tol * self.max_abs().max(f64::MIN_POSITIVE)
    }

    /// `a·b = Sym(a⊗b)/(j!k!)` for symmetric `a`, `b`.
    pub fn sym_product(&self, other: &CovTensor) -> Result<CovTensor> {
        for t in [self, other] {
            if !t.is_symmetric(1e-13) {
                return Err(Error::Convention(format!("order-{} factor is not symmetric", t.order)));
            }
        }
        let prod = self.outer(other)?;
        let norm = factorial(self.order) * factorial(other.order);
        Ok(prod.sym_unnormalized()?.scale(1.0 / norm))
    }

    /// Contracts slots `i` and `j` of `self` with the inverse metric.
    pub fn contract_metric(&self, g_inv: &Matrix4<f64>, i: usize, j: usize) -> Result<CovTensor> {
        let k = self.order;
        for s in [i, j] {
            if s >= k {
                return Err(Error::SlotOutOfRange { slot: s, order: k });
            }
        }
        if i == j {
            return Err(Error::Contraction("cannot contract a slot with itself".into()));
        }
        let rest: Vec<usize> = (0..k).filter(|&s| s != i && s != j).collect();
        let mut out = CovTensor::zeros(k - 2, self.chart)?;
        let mut src = [0usize; MAX_ORDER];
        for flat in 0..out.data.len() {
            let idx = multi_index(flat, k - 2);
            for (n, &s) in rest.iter().enumerate() {
                src[s] = idx[n];
            }
            let mut acc = 0.0;
            for e in 0..DIM {
                for f in 0..DIM {
                    let w = g_inv[(e, f)];
                    if w == 0.0 {
                        continue;
                    }
                    src[i] = e;
                    src[j] = f;
                    acc += w * self.data[flat_index(&src[..k])];
                }
            }
            out.data[flat] = acc;
        }
        Ok(out)
    }

    /// `Σ_{ef} a_{..e..} b_{..f..} g^{ef}`: contracts slot `i` of `a` with slot `j` of `b`.
    /// Remaining slots of `a` come first, then those of `b`.
    pub fn contract_pair(a: &CovTensor, i: usize, b: &CovTensor, j: usize, g_inv: &Matrix4<f64>) -> Result<CovTensor> {
        if i >= a.order {
            return Err(Error::SlotOutOfRange { slot: i, order: a.order });
        }
        if j >= b.order {
            return Err(Error::SlotOutOfRange { slot: j, order: b.order });
        }
        let joined = a.outer(b)?;
        joined.contract_metric(g_inv, i, a.order + j)
    }

    /// Components in the chart `y`, where `jac[(i, a)] = ∂x^i/∂y^a` and `x` is the current chart.
    pub fn transport(&self, jac: &Matrix4<f64>, target: Chart) -> CovTensor {
        let k = self.order;
        let mut cur = self.data.clone();
        for slot in 0..k {
            let mut next = vec![0.0; cur.len()];
            let stride = DIM.pow((k - 1 - slot) as u32);
            for (flat, v) in next.iter_mut().enumerate() {
                let a = (flat / stride) % DIM;
                let base = flat - a * stride;
                let mut acc = 0.0;
                for i in 0..DIM {
                    acc += cur[base + i * stride] * jac[(i, a)];
                }
                *v = acc;
            }
            cur = next;
        }
        CovTensor { order: k, chart: target, data: cur }
    }

    /// Multilinear evaluation on `order` tangent vectors.
    pub fn eval(&self, vectors: &[[f64; 4]]) -> Result<f64> {
        if vectors.len() != self.order {
            return Err(Error::Arity(format!("{} vectors for an order-{} tensor", vectors.len(), self.order)));
        }
        let k = self.order;
        let mut acc = 0.0;
        for (flat, v) in self.data.iter().enumerate() {
            if *v == 0.0 {
                continue;
            }
            let idx = multi_index(flat, k);
            let mut w = *v;
            for s in 0..k {
                w *= vectors[s][idx[s]];
            }
            acc += w;
        }
        Ok(acc)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Norm with every index raised by `g_inv`: `(T_{a..} T^{a..})^{1/2}`.
    pub fn metric_norm(&self, g_inv: &Matrix4<f64>) -> f64 {
        let raised = self.transport(g_inv, self.chart);
        self.data.iter().zip(&raised.data).map(|(a, b)| a * b).sum::<f64>().max(0.0).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m: f64, x| m.max(x.abs()))
    }
}

/// Nested-array form of tensor components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Nested {
    Leaf(f64),
    Node(Vec<Nested>),
}

impl Nested {
    fn build(data: &[f64], order: usize) -> Nested {
        if order == 0 {
            return Nested::Leaf(data[0]);
        }
        let stride = data.len() / DIM;
        Nested::Node(data.chunks(stride).map(|c| Nested::build(c, order - 1)).collect())
    }

    fn flatten(&self, order: usize, out: &mut Vec<f64>) -> Result<()> {
        match (self, order) {
            (Nested::Leaf(v), 0) => {
                out.push(*v);
                Ok(())
            }
            (Nested::Node(items), k) if k > 0 && items.len() == DIM => {
                items.iter().try_for_each(|n| n.flatten(k - 1, out))
            }
            _ => Err(Error::Arity(format!("nested components do not form an order-{order} tensor"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct TensorRepr {
    chart: Chart,
    order: usize,
    index_order: Vec<String>,
    components: Nested,
}

impl From<CovTensor> for TensorRepr {
    fn from(t: CovTensor) -> Self {
        TensorRepr {
            chart: t.chart,
            order: t.order,
            index_order: t.chart.coordinates().iter().map(|s| s.to_string()).collect(),
            components: Nested::build(&t.data, t.order),
        }
    }
}

impl TryFrom<TensorRepr> for CovTensor {
    type Error = Error;

    fn try_from(r: TensorRepr) -> Result<Self> {
        check_order(r.order)?;
        let mut data = Vec::with_capacity(DIM.pow(r.order as u32));
        r.components.flatten(r.order, &mut data)?;
        CovTensor::from_data(r.order, r.chart, data)
    }
}

fn check_order(order: usize) -> Result<()> {
    if order > MAX_ORDER {
        return Err(Error::UnsupportedOrder { order, max: MAX_ORDER });
    }
    Ok(())
}

/// Value space of a vector-valued form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ValueSpace {
    Scalar,
    So3,
    So3Dual,
}

/// Form with values in ℝ, so₃ or so₃*, stored as one covariant tensor per value component.
///
/// so₃ is identified with ℝ³ through the hat map, so the invariant inner
/// product is the Euclidean one and the dual pairing is the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorValuedForm {
    pub space: ValueSpace,
    pub comps: Vec<CovTensor>,
}

impl VectorValuedForm {
    pub fn new(space: ValueSpace, comps: Vec<CovTensor>) -> Result<Self> {
        let expected = if space == ValueSpace::Scalar { 1 } else { 3 };
        if comps.len() != expected {
            return Err(Error::Arity(format!("{space:?}-valued form needs {expected} components")));
        }
        let order = comps[0].order();
        if comps.iter().any(|c| c.order() != order || c.chart() != comps[0].chart()) {
            return Err(Error::Arity("components must share order and chart".into()));
        }
        Ok(VectorValuedForm { space, comps })
    }

    pub fn order(&self) -> usize {
        self.comps[0].order()
    }

    fn check_pairing(&self, other: &VectorValuedForm) -> Result<()> {
        let scalar = |s| s == ValueSpace::Scalar;
        if scalar(self.space) != scalar(other.space) {
            return Err(Error::Contraction(format!("cannot pair {:?} with {:?}", self.space, other.space)));
        }
        Ok(())
    }

    /// `⟨a|b⟩ = Σ_i a_i ⊗ b^i`.
    pub fn contract(&self, other: &VectorValuedForm) -> Result<CovTensor> {
        self.check_pairing(other)?;
        let mut acc = CovTensor::zeros(self.order() + other.order(), self.comps[0].chart())?;
        for (a, b) in self.comps.iter().zip(&other.comps) {
            acc.add_scaled(&a.outer(b)?, 1.0)?;
        }
        Ok(acc)
    }

    /// `⟨a·b⟩ = Σ_i a_i · b^i` with the symmetric product.
    pub fn sym_contract(&self, other: &VectorValuedForm) -> Result<CovTensor> {
        self.check_pairing(other)?;
        let mut acc = CovTensor::zeros(self.order() + other.order(), self.comps[0].chart())?;
        for (a, b) in self.comps.iter().zip(&other.comps) {
            acc.add_scaled(&a.sym_product(b)?, 1.0)?;
        }
        Ok(acc)
    }
}
