//! Integrands with explicit Fourier data, QMC application and convergence
//! runs.
//!
//! Every integrand here knows its exact integral and its exact norm, so
//! integration errors can be set against the worst-case error bounds with
//! nothing estimated.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{capacity, domain, Result};
use crate::exposums::Frequency;
use crate::pointsets::{composite_point_set, CompositePointSet, KorobovFamily};
use crate::wce::{wce_upper, weight};

/// Largest tensor expansion of a Weierstrass product.
pub const MAX_EXPANSION_TERMS: u128 = 10_000_000;

const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// A real-valued integrand on `[0,1)^d`.
pub trait Integrand {
    fn dim(&self) -> usize;

    /// Value at `x`; `x.len() == self.dim()` is the caller's responsibility.
    fn eval(&self, x: &[f64]) -> f64;
}

/// Error-free accumulation with Neumaier's variant of Kahan summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: CompensatedSum) {
        self.add(other.sum);
        self.add(other.compensation);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Fractional part of `k.x`.
fn phase(k: &[i64], x: &[f64]) -> f64 {
    let t: f64 = k.iter().zip(x).map(|(&kj, &xj)| kj as f64 * xj).sum();
    t - t.floor()
}

/// A finite Fourier series `sum_k c_k exp(2 pi i k.x)` with
/// `c_{-k} = conj(c_k)`, hence real-valued.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierPolynomial {
    d: usize,
    terms: BTreeMap<Frequency, Complex64>,
}

impl FourierPolynomial {
    /// Repeated frequencies are summed; zero coefficients are dropped.
    pub fn new(d: usize, terms: impl IntoIterator<Item = (Frequency, Complex64)>) -> Result<Self> {
        if d == 0 {
            return domain("dimension must be >= 1");
        }
        let mut map: BTreeMap<Frequency, Complex64> = BTreeMap::new();
        for (k, c) in terms {
            if k.dim() != d {
                return domain(format!(
                    "term frequency has dimension {}, expected {d}",
                    k.dim()
                ));
            }
            *map.entry(k).or_default() += c;
        }
        map.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        for (k, c) in &map {
            let partner = map.get(&k.negated()).copied().unwrap_or_default();
            if (partner - c.conj()).norm() > SYMMETRY_TOLERANCE * c.norm().max(1.0) {
                return domain(format!(
                    "coefficients at {:?} and its negation are not conjugate",
                    k.components()
                ));
            }
        }
        Ok(FourierPolynomial { d, terms: map })
    }

    pub fn constant(d: usize, value: f64) -> Result<Self> {
        Self::new(d, [(Frequency::zero(d), Complex64::new(value, 0.0))])
    }

    /// `amplitude * cos(2 pi k.x - shift)`.
    pub fn cosine(k: Frequency, amplitude: f64, shift: f64) -> Result<Self> {
        let d = k.dim();
        if k.is_zero() {
            return Self::constant(d, amplitude * shift.cos());
        }
        let c = Complex64::from_polar(amplitude / 2.0, -shift);
        let neg = k.negated();
        Self::new(d, [(k, c), (neg, c.conj())])
    }

    pub fn terms(&self) -> &BTreeMap<Frequency, Complex64> {
        &self.terms
    }

    pub fn coefficient(&self, k: &Frequency) -> Complex64 {
        self.terms.get(k).copied().unwrap_or_default()
    }

    /// The zeroth coefficient.
    pub fn integral(&self) -> f64 {
        self.coefficient(&Frequency::zero(self.d)).re
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.d {
            return domain(format!(
                "point has dimension {}, expected {}",
                x.len(),
                self.d
            ));
        }
        Ok(self.eval(x))
    }
}

impl Integrand for FourierPolynomial {
    fn dim(&self) -> usize {
        self.d
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut scale = 1.0f64;
        for (k, c) in &self.terms {
            acc += c * Complex64::cis(TAU * phase(k.components(), x));
            scale += c.norm();
        }
        debug_assert!(
            acc.im.abs() <= 1e-12 * scale,
            "imaginary residue {} too large",
            acc.im
        );
        acc.re
    }
}

/// `sum_k |c_k| max(1, log|k|_inf)`, accumulated from the largest
/// coefficient down.
pub fn norm_fd(f: &FourierPolynomial) -> f64 {
    let mut parts: Vec<(f64, f64)> = f.terms.iter().map(|(k, c)| (c.norm(), weight(k))).collect();
    parts.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut sum = CompensatedSum::default();
    for (modulus, w) in parts {
        sum.add(modulus * w);
    }
    sum.value()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeierstrassForm {
    /// `prod_j w(x_j)`, integral 0.
    ProductOfOmega,
    /// `prod_j (1 + w(x_j))`, integral 1.
    ProductOfOnePlusOmega,
}

/// Tensor product of the truncated Weierstrass function
/// `w(x) = sum_{l < L} 2^{-beta l} cos(2 pi 2^l x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeierstrassProduct {
    beta: f64,
    levels: u32,
    d: usize,
    form: WeierstrassForm,
}

impl WeierstrassProduct {
    pub fn new(beta: f64, levels: u32, d: usize, form: WeierstrassForm) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return domain(format!("beta must be positive, got {beta}"));
        }
        if levels == 0 || levels > 62 {
            return domain(format!("truncation level must be in 1..=62, got {levels}"));
        }
        if d == 0 {
            return domain("dimension must be >= 1");
        }
        Ok(WeierstrassProduct {
            beta,
            levels,
            d,
            form,
        })
    }

    pub fn form(&self) -> WeierstrassForm {
        self.form
    }

    pub fn integral(&self) -> f64 {
        match self.form {
            WeierstrassForm::ProductOfOmega => 0.0,
            WeierstrassForm::ProductOfOnePlusOmega => 1.0,
        }
    }

    /// The truncated one-dimensional factor `w(x)`.
    pub fn omega(&self, x: f64) -> f64 {
        (0..self.levels)
            .map(|l| {
                let scaled = x * (1u64 << l) as f64;
                (-self.beta * l as f64).exp2() * (TAU * (scaled - scaled.floor())).cos()
            })
            .sum()
    }

    /// Fourier coefficients `(frequency, coefficient)` of one factor.
    pub fn factor_coefficients(&self) -> Vec<(i64, f64)> {
        let mut out = Vec::with_capacity(2 * self.levels as usize + 1);
        if self.form == WeierstrassForm::ProductOfOnePlusOmega {
            out.push((0, 1.0));
        }
        for l in 0..self.levels {
            let c = 0.5 * (-self.beta * l as f64).exp2();
            let f = 1i64 << l;
            out.push((-f, c));
            out.push((f, c));
        }
        out.sort_by_key(|&(k, _)| k);
        out
    }

    fn expansion_size(&self) -> Result<u128> {
        let per = self.factor_coefficients().len() as u128;
        let total = per.checked_pow(self.d as u32).unwrap_or(u128::MAX);
        if total > MAX_EXPANSION_TERMS {
            return capacity(format!(
                "expansion has {total} terms (limit {MAX_EXPANSION_TERMS}); reduce L or d"
            ));
        }
        Ok(total)
    }

    /// Visits every tensor term as `(frequency, coefficient)`.
    fn for_each_term(&self, mut f: impl FnMut(&[i64], f64)) -> Result<()> {
        self.expansion_size()?;
        let factor = self.factor_coefficients();
        let mut idx = vec![0usize; self.d];
        let mut k = vec![0i64; self.d];
        loop {
            let mut c = 1.0;
            for (j, &i) in idx.iter().enumerate() {
                k[j] = factor[i].0;
                c *= factor[i].1;
            }
            f(&k, c);
            let mut j = self.d;
            loop {
                if j == 0 {
                    return Ok(());
                }
                j -= 1;
                idx[j] += 1;
                if idx[j] < factor.len() {
                    break;
                }
                idx[j] = 0;
            }
        }
    }

    pub fn to_fourier_polynomial(&self) -> Result<FourierPolynomial> {
        let mut terms = Vec::new();
        self.for_each_term(|k, c| {
            terms.push((Frequency::new(k.to_vec()), Complex64::new(c, 0.0)))
        })?;
        FourierPolynomial::new(self.d, terms)
    }
}

impl Integrand for WeierstrassProduct {
    fn dim(&self) -> usize {
        self.d
    }

    fn eval(&self, x: &[f64]) -> f64 {
        x.iter()
            .map(|&xj| {
                let w = self.omega(xj);
                match self.form {
                    WeierstrassForm::ProductOfOmega => w,
                    WeierstrassForm::ProductOfOnePlusOmega => 1.0 + w,
                }
            })
            .product()
    }
}

/// Exact norm of the truncated product from its full tensor expansion.
///
/// The weight uses the largest coordinate, so the result is generally not
/// the `d`-th power of the one-dimensional norm.
pub fn weierstrass_norm_bound(w: &WeierstrassProduct) -> Result<f64> {
    let mut sum = CompensatedSum::default();
    w.for_each_term(|k, c| {
        let inf = k.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0);
        let wt = if inf == 0 {
            1.0
        } else {
            (inf as f64).ln().max(1.0)
        };
        sum.add(c.abs() * wt);
    })?;
    Ok(sum.value())
}

/// `(1/N) sum f(x)` over the composite set, blocks ascending in `p`, with
/// compensated accumulation per block.
pub fn qmc_apply<F: Integrand + ?Sized>(cps: &CompositePointSet, f: &F) -> Result<f64> {
    if f.dim() != cps.dim() {
        return domain(format!(
            "integrand has dimension {}, point set has {}",
            f.dim(),
            cps.dim()
        ));
    }
    let mut total = CompensatedSum::default();
    let mut x = vec![0.0; cps.dim()];
    for block in cps.blocks() {
        let den = block.den();
        let mut partial = CompensatedSum::default();
        for row in block.residue_rows() {
            crate::pointsets::fill_unit_cube(row, den, &mut x);
            partial.add(f.eval(&x));
        }
        total.merge(partial);
    }
    Ok(total.value() / cps.total_count() as f64)
}

/// Serialized description of an integrand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum IntegrandSpec {
    #[serde(rename = "fourier_poly")]
    FourierPoly { d: usize, terms: Vec<TermSpec> },
    #[serde(rename = "weierstrass")]
    Weierstrass {
        d: usize,
        beta: f64,
        #[serde(rename = "L")]
        levels: u32,
        form: WeierstrassForm,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermSpec {
    pub k: Vec<i64>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl IntegrandSpec {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn build(&self) -> Result<TestFunction> {
        match self {
            IntegrandSpec::FourierPoly { d, terms } => {
                let terms = terms
                    .iter()
                    .map(|t| (Frequency::new(t.k.clone()), Complex64::new(t.re, t.im)));
                Ok(TestFunction::Fourier(FourierPolynomial::new(*d, terms)?))
            }
            IntegrandSpec::Weierstrass {
                d,
                beta,
                levels,
                form,
            } => Ok(TestFunction::Weierstrass(WeierstrassProduct::new(
                *beta, *levels, *d, *form,
            )?)),
        }
    }
}

/// Any integrand with known Fourier data.
#[derive(Clone, Debug, PartialEq)]
pub enum TestFunction {
    Fourier(FourierPolynomial),
    Weierstrass(WeierstrassProduct),
}

impl TestFunction {
    pub fn integral(&self) -> f64 {
        match self {
            TestFunction::Fourier(f) => f.integral(),
            TestFunction::Weierstrass(w) => w.integral(),
        }
    }

    pub fn norm(&self) -> Result<f64> {
        match self {
            TestFunction::Fourier(f) => Ok(norm_fd(f)),
            TestFunction::Weierstrass(w) => weierstrass_norm_bound(w),
        }
    }
}

impl Integrand for TestFunction {
    fn dim(&self) -> usize {
        match self {
            TestFunction::Fourier(f) => f.dim(),
            TestFunction::Weierstrass(w) => w.dim(),
        }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            TestFunction::Fourier(f) => f.eval(x),
            TestFunction::Weierstrass(w) => w.eval(x),
        }
    }
}

/// One line of a convergence run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub family: KorobovFamily,
    #[serde(rename = "M")]
    pub m: u64,
    pub d: usize,
    #[serde(rename = "N")]
    pub n: u64,
    pub abs_error: f64,
    /// Worst-case error bound in terms of `N`.
    pub bound: f64,
    pub norm: f64,
    /// `abs_error / (bound * norm)`.
    pub ratio: f64,
}

/// Integrates `f` with the composite rule for every `M` in `m_list`.
pub fn convergence_experiment<F: Integrand + ?Sized>(
    family: KorobovFamily,
    d: usize,
    m_list: &[u64],
    f: &F,
    exact_integral: f64,
    norm: f64,
    c_p: f64,
) -> Result<Vec<ConvergenceRow>> {
    if !m_list.windows(2).all(|w| w[0] < w[1]) {
        return domain("M list must be strictly ascending");
    }
    if !(norm >= 0.0 && norm.is_finite()) {
        return domain(format!("norm must be finite and non-negative, got {norm}"));
    }
    m_list
        .iter()
        .map(|&m| {
            let cps = composite_point_set(family, m, d)?;
            let estimate = qmc_apply(&cps, f)?;
            let abs_error = (estimate - exact_integral).abs();
            let bound = wce_upper(family, m, d, c_p)?.bound_in_n;
            let scale = bound * norm;
            let ratio = if scale > 0.0 {
                abs_error / scale
            } else if abs_error == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            Ok(ConvergenceRow {
                family,
                m,
                d,
                n: cps.total_count(),
                abs_error,
                bound,
                norm,
                ratio,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cos1() -> FourierPolynomial {
        FourierPolynomial::cosine(Frequency::new(vec![1]), 1.0, 0.0).unwrap()
    }

    #[test]
    fn evaluation_examples() {
        let f = cos1();
        assert_abs_diff_eq!(f.evaluate(&[0.0]).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.evaluate(&[0.25]).unwrap(), 0.0, epsilon = 1e-15);
        assert!(f.evaluate(&[0.1, 0.2]).is_err());

        let w = WeierstrassProduct::new(2.0, 2, 1, WeierstrassForm::ProductOfOmega).unwrap();
        assert_abs_diff_eq!(w.eval(&[0.0]), 1.25, epsilon = 1e-15);
    }

    #[test]
    fn norm_examples() {
        assert_abs_diff_eq!(norm_fd(&cos1()), 1.0, epsilon = 1e-15);
        let f3 = FourierPolynomial::cosine(Frequency::new(vec![3]), 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(norm_fd(&f3), 3f64.ln(), epsilon = 1e-15);
        assert_eq!(norm_fd(&FourierPolynomial::constant(1, 1.0).unwrap()), 1.0);
    }

    #[test]
    fn asymmetric_terms_rejected() {
        let bad = FourierPolynomial::new(1, [(Frequency::new(vec![1]), Complex64::new(0.5, 0.1))]);
        assert!(bad.is_err());
        let dim = FourierPolynomial::new(2, [(Frequency::new(vec![1]), Complex64::new(1.0, 0.0))]);
        assert!(dim.is_err());
    }

    #[test]
    fn weierstrass_norms() {
        let w = WeierstrassProduct::new(2.0, 1, 1, WeierstrassForm::ProductOfOmega).unwrap();
        assert_abs_diff_eq!(weierstrass_norm_bound(&w).unwrap(), 1.0, epsilon = 1e-15);
        let w = WeierstrassProduct::new(2.0, 2, 1, WeierstrassForm::ProductOfOmega).unwrap();
        assert_abs_diff_eq!(weierstrass_norm_bound(&w).unwrap(), 1.25, epsilon = 1e-15);

        let w = WeierstrassProduct::new(1.5, 4, 2, WeierstrassForm::ProductOfOnePlusOmega).unwrap();
        let via_poly = norm_fd(&w.to_fourier_polynomial().unwrap());
        assert_abs_diff_eq!(
            weierstrass_norm_bound(&w).unwrap(),
            via_poly,
            epsilon = 1e-12
        );

        let huge = WeierstrassProduct::new(1.0, 40, 5, WeierstrassForm::ProductOfOmega).unwrap();
        assert!(matches!(
            weierstrass_norm_bound(&huge),
            Err(crate::Error::Capacity(_))
        ));
        assert!(WeierstrassProduct::new(0.0, 2, 1, WeierstrassForm::ProductOfOmega).is_err());
    }

    #[test]
    fn weierstrass_expansion_evaluates_identically() {
        let w = WeierstrassProduct::new(1.5, 3, 2, WeierstrassForm::ProductOfOnePlusOmega).unwrap();
        let poly = w.to_fourier_polynomial().unwrap();
        assert_abs_diff_eq!(poly.integral(), 1.0, epsilon = 1e-15);
        for x in [[0.0, 0.0], [0.1, 0.7], [0.33, 0.999]] {
            assert_abs_diff_eq!(poly.eval(&x), w.eval(&x), epsilon = 1e-12);
        }
    }

    #[test]
    fn qmc_examples() {
        let one = FourierPolynomial::constant(1, 1.0).unwrap();
        let cps = composite_point_set(KorobovFamily::S, 4, 1).unwrap();
        assert_eq!(qmc_apply(&cps, &one).unwrap(), 1.0);
        assert_abs_diff_eq!(qmc_apply(&cps, &cos1()).unwrap(), 0.0, epsilon = 1e-15);
        let two = FourierPolynomial::constant(2, 1.0).unwrap();
        assert!(qmc_apply(&cps, &two).is_err());
    }

    #[test]
    fn compensated_sum_recovers_cancellation() {
        let mut s = CompensatedSum::default();
        for x in [1e16, 1.0, -1e16, 1.0] {
            s.add(x);
        }
        assert_eq!(s.value(), 2.0);
    }

    #[test]
    fn constant_convergence_has_zero_error() {
        let one = FourierPolynomial::constant(2, 1.0).unwrap();
        let rows =
            convergence_experiment(KorobovFamily::T, 2, &[8, 16], &one, 1.0, 1.0, 0.2).unwrap();
        assert!(rows.iter().all(|r| r.abs_error == 0.0 && r.ratio == 0.0));
        assert!(
            convergence_experiment(KorobovFamily::T, 2, &[16, 8], &one, 1.0, 1.0, 0.2).is_err()
        );
    }

    #[test]
    fn integrand_spec_json() {
        let text = r#"{"type":"weierstrass","d":2,"beta":1.5,"L":8,"form":"product_of_omega"}"#;
        let spec: IntegrandSpec = serde_json::from_str(text).unwrap();
        let f = spec.build().unwrap();
        assert_eq!(f.integral(), 0.0);
        assert_eq!(f.dim(), 2);

        let text = r#"{"type":"fourier_poly","d":1,"terms":[{"k":[1],"re":0.5},{"k":[-1],"re":0.5,"im":0.0}]}"#;
        let f = serde_json::from_str::<IntegrandSpec>(text)
            .unwrap()
            .build()
            .unwrap();
        assert_abs_diff_eq!(f.norm().unwrap(), 1.0, epsilon = 1e-15);
    }
}
