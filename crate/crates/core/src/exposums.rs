//! Normalized exponential sums `W(k) = (1/N) sum_x exp(2 pi i k.x)` over
//! Korobov blocks and composites, the single-prime and composite bounds on
//! them, and a verification harness.
//!
//! Phases are exact residues. For a block with modulus `m` (`p`, or `p^2`
//! for family T) the phase of point `n` is `f(n) mod m` with
//! `f(n) = k_1 n + ... + k_d n^d`. The first `d + 1` values are computed with
//! Horner's scheme in 128-bit intermediates; the remaining ones are walked
//! with a forward-difference table, which stays exact and needs only modular
//! additions. Floating point enters only through `exp(2 pi i r / m)`.

use std::collections::HashMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::pointsets::{korobov_block, CompositePointSet, KorobovBlock, KorobovFamily};
use crate::primes::{prime_band, PrimeBand};

/// Additive slack for every bound assertion.
pub const BOUND_SLACK: f64 = 1e-9;

/// Above this many box frequencies a scan falls back to sampling.
pub const EXHAUSTIVE_LIMIT: u128 = 1_000_000;

/// Sample size used when a box is too large and no size was requested.
pub const DEFAULT_SAMPLE: usize = 10_000;

/// Denominators up to this size get a precomputed table of unit roots.
const ROOT_TABLE_LIMIT: u64 = 1 << 22;

/// An integer frequency vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Frequency(Vec<i64>);

impl Frequency {
    pub fn new(k: Vec<i64>) -> Self {
        Frequency(k)
    }

    pub fn zero(d: usize) -> Self {
        Frequency(vec![0; d])
    }

    pub fn components(&self) -> &[i64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `max_j |k_j|`.
    pub fn inf_norm(&self) -> u64 {
        self.0.iter().map(|k| k.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&k| k == 0)
    }

    pub fn negated(&self) -> Frequency {
        Frequency(self.0.iter().map(|k| -k).collect())
    }

    /// True when `p` divides every component.
    pub fn divisible_by(&self, p: u64) -> bool {
        self.0.iter().all(|&k| k.unsigned_abs() % p == 0)
    }

    /// Components reduced into `[0, m)`.
    pub fn residues(&self, m: u64) -> Vec<u64> {
        self.0.iter().map(|&k| reduce(k, m)).collect()
    }
}

impl From<Vec<i64>> for Frequency {
    fn from(k: Vec<i64>) -> Self {
        Frequency(k)
    }
}

#[inline]
pub(crate) fn reduce(k: i64, m: u64) -> u64 {
    (k as i128).rem_euclid(m as i128) as u64
}

#[inline]
fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    let s = a + b;
    if s >= m {
        s - m
    } else {
        s
    }
}

#[inline]
fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + m - b
    }
}

/// `c_0 + c_1 x + ... + c_deg x^deg mod m` by Horner's scheme.
pub(crate) fn horner(coeffs: &[u64], x: u64, m: u64) -> u64 {
    let (m, x) = (m as u128, x as u128 % m as u128);
    coeffs
        .iter()
        .rev()
        .fold(0u128, |acc, &c| (acc * x + c as u128) % m) as u64
}

/// Walks `f(0), f(1), f(2), ... mod m` for a polynomial with reduced
/// coefficients, one modular addition per degree per step.
#[derive(Clone, Debug)]
pub(crate) struct ResidueWalk {
    diffs: Vec<u64>,
    m: u64,
}

impl ResidueWalk {
    pub(crate) fn new(coeffs: &[u64], m: u64) -> Self {
        let deg = coeffs.len().saturating_sub(1);
        let mut diffs: Vec<u64> = (0..=deg as u64).map(|x| horner(coeffs, x, m)).collect();
        for level in 1..=deg {
            for i in (level..=deg).rev() {
                diffs[i] = sub_mod(diffs[i], diffs[i - 1], m);
            }
        }
        ResidueWalk { diffs, m }
    }

    #[inline]
    pub(crate) fn current(&self) -> u64 {
        self.diffs[0]
    }

    #[inline]
    pub(crate) fn advance(&mut self) {
        for i in 0..self.diffs.len() - 1 {
            self.diffs[i] = add_mod(self.diffs[i], self.diffs[i + 1], self.m);
        }
    }
}

/// `exp(2 pi i r / m)`, tabulated for moderate `m`.
#[derive(Clone, Debug)]
pub(crate) struct UnitRoots {
    m: u64,
    table: Option<Vec<Complex64>>,
}

impl UnitRoots {
    pub(crate) fn new(m: u64) -> Self {
        let table = (m <= ROOT_TABLE_LIMIT).then(|| (0..m).map(|r| unit_root(r, m)).collect());
        UnitRoots { m, table }
    }

    #[inline]
    pub(crate) fn get(&self, r: u64) -> Complex64 {
        match &self.table {
            Some(t) => t[r as usize],
            None => unit_root(r, self.m),
        }
    }
}

/// `exp(2 pi i r / m)` for `0 <= r < m`.
pub fn unit_root(r: u64, m: u64) -> Complex64 {
    if r == 0 {
        return Complex64::new(1.0, 0.0);
    }
    // fold into [-1/2, 1/2] before scaling for a smaller argument
    let signed = if 2 * r > m {
        r as f64 - m as f64
    } else {
        r as f64
    };
    let (s, c) = (TAU * (signed / m as f64)).sin_cos();
    Complex64::new(c, s)
}

/// Phase polynomial coefficients `[0, k_1, ..., k_d] mod m`.
fn phase_coeffs(k: &Frequency, m: u64) -> Vec<u64> {
    std::iter::once(0).chain(k.residues(m)).collect()
}

/// A normalized exponential sum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeylSumResult {
    pub value: Complex64,
    pub count: u64,
}

impl WeylSumResult {
    pub fn modulus(&self) -> f64 {
        self.value.norm()
    }
}

/// Per-block state reused across many frequencies.
#[derive(Clone, Debug)]
pub struct BlockWeylEvaluator {
    family: KorobovFamily,
    p: u64,
    d: usize,
    roots: UnitRoots,
    scratch: Vec<u64>,
}

impl BlockWeylEvaluator {
    pub fn new(block: &KorobovBlock) -> Self {
        Self::for_parameters(block.family(), block.p(), block.dim())
    }

    fn for_parameters(family: KorobovFamily, p: u64, d: usize) -> Self {
        let m = family.denominator(p);
        BlockWeylEvaluator {
            family,
            p,
            d,
            roots: UnitRoots::new(m),
            scratch: Vec::new(),
        }
    }

    pub fn count(&self) -> u64 {
        self.family.block_size(self.p) as u64
    }

    /// Unnormalized `sum_x exp(2 pi i k.x)` over all points in enumeration
    /// order.
    pub fn raw_sum(&mut self, k: &Frequency) -> Result<Complex64> {
        if k.dim() != self.d {
            return domain(format!(
                "frequency has dimension {}, block has {}",
                k.dim(),
                self.d
            ));
        }
        let m = self.family.denominator(self.p);
        let mut walk = ResidueWalk::new(&phase_coeffs(k, m), m);
        let mut acc = Complex64::new(0.0, 0.0);
        match self.family {
            KorobovFamily::S | KorobovFamily::T => {
                for _ in 0..m {
                    acc += self.roots.get(walk.current());
                    walk.advance();
                }
            }
            KorobovFamily::U => {
                // point (a, n) has phase a * f(n) mod p; rows advance by f(n)
                let p = self.p;
                let step = &mut self.scratch;
                step.clear();
                for _ in 0..p {
                    step.push(walk.current());
                    walk.advance();
                }
                let mut phase = vec![0u64; p as usize];
                for _ in 0..p {
                    for (ph, &s) in phase.iter_mut().zip(step.iter()) {
                        acc += self.roots.get(*ph);
                        *ph = add_mod(*ph, s, p);
                    }
                }
            }
        }
        Ok(acc)
    }

    pub fn weyl_sum(&mut self, k: &Frequency) -> Result<WeylSumResult> {
        let raw = self.raw_sum(k)?;
        let count = self.count();
        Ok(WeylSumResult {
            value: raw / count as f64,
            count,
        })
    }
}

/// `(1/|block|) sum_x exp(2 pi i k.x)` over the block.
pub fn weyl_sum_block(block: &KorobovBlock, k: &Frequency) -> Result<WeylSumResult> {
    BlockWeylEvaluator::new(block).weyl_sum(k)
}

/// Composite counterpart of [`BlockWeylEvaluator`].
#[derive(Clone, Debug)]
pub struct CompositeWeylEvaluator {
    blocks: Vec<BlockWeylEvaluator>,
    total: u64,
    d: usize,
}

impl CompositeWeylEvaluator {
    pub fn new(cps: &CompositePointSet) -> Self {
        CompositeWeylEvaluator {
            blocks: cps.blocks().iter().map(BlockWeylEvaluator::new).collect(),
            total: cps.total_count(),
            d: cps.dim(),
        }
    }

    pub fn weyl_sum(&mut self, k: &Frequency) -> Result<WeylSumResult> {
        if k.dim() != self.d {
            return domain(format!(
                "frequency has dimension {}, point set has {}",
                k.dim(),
                self.d
            ));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for block in &mut self.blocks {
            acc += block.raw_sum(k)?;
        }
        Ok(WeylSumResult {
            value: acc / self.total as f64,
            count: self.total,
        })
    }
}

/// Count-weighted combination of the block sums, ascending in `p`.
pub fn weyl_sum_composite(cps: &CompositePointSet, k: &Frequency) -> Result<WeylSumResult> {
    CompositeWeylEvaluator::new(cps).weyl_sum(k)
}

fn require_nonzero(k: &Frequency) -> Result<()> {
    if k.is_zero() {
        return domain("frequency must be nonzero");
    }
    Ok(())
}

/// Single-prime bound: `(d-1)/sqrt(p)` for S, `(d-1)/p` for T and U when some
/// component of `k` is not divisible by `p`, and the trivial bound 1 otherwise.
pub fn lemma_bound(family: KorobovFamily, p: u64, d: usize, k: &Frequency) -> Result<f64> {
    require_nonzero(k)?;
    if d == 0 {
        return domain("dimension must be >= 1");
    }
    if k.divisible_by(p) {
        return Ok(1.0);
    }
    let numerator = (d - 1) as f64;
    Ok(match family {
        KorobovFamily::S => numerator / (p as f64).sqrt(),
        KorobovFamily::T | KorobovFamily::U => numerator / p as f64,
    })
}

/// `log |k|_inf` with the natural logarithm (0 at `|k|_inf = 1`).
pub fn log_inf_norm(k: &Frequency) -> f64 {
    (k.inf_norm() as f64).ln()
}

fn check_density_constant(c_p: f64) -> Result<()> {
    if !(c_p > 0.0 && c_p < 1.0) {
        return domain(format!("density constant must lie in (0, 1), got {c_p}"));
    }
    Ok(())
}

fn leading_term(family: KorobovFamily, m: u64, d: usize) -> f64 {
    let (mf, dm1) = (m as f64, (d - 1) as f64);
    match family {
        KorobovFamily::S => 2.0 * dm1 / mf.sqrt(),
        KorobovFamily::T | KorobovFamily::U => 4.0 * dm1 / mf,
    }
}

/// Composite bound with the density constant:
/// `2(d-1)/sqrt(M) + 4 log|k|/(c_P M)` for S and
/// `4(d-1)/M + 4 log|k|/(c_P M)` for T and U.
pub fn corollary_bound(
    family: KorobovFamily,
    m: u64,
    d: usize,
    k: &Frequency,
    c_p: f64,
) -> Result<f64> {
    require_nonzero(k)?;
    check_density_constant(c_p)?;
    if m < 2 || d == 0 {
        return domain("need M >= 2 and d >= 1");
    }
    Ok(leading_term(family, m, d) + 4.0 * log_inf_norm(k) / (c_p * m as f64))
}

/// Composite bound with the band size read off exactly instead of through
/// the density constant: the divisible primes contribute at most
/// `(2 log|k| / log(ceil(M/2)+1)) * M / |S|` (S) or
/// `(2 log|k| / log(ceil(M/2)+1)) * M^2 / |T|` (T, U).
pub fn corollary_exact_bound(
    family: KorobovFamily,
    band: &PrimeBand,
    d: usize,
    k: &Frequency,
) -> Result<f64> {
    require_nonzero(k)?;
    if d == 0 {
        return domain("dimension must be >= 1");
    }
    let m = band.m();
    let mf = m as f64;
    let divisor_count = 2.0 * log_inf_norm(k) / ((band.lower() + 1) as f64).ln();
    let size = family.composite_size(band) as f64;
    let scale = match family {
        KorobovFamily::S => mf,
        KorobovFamily::T | KorobovFamily::U => mf * mf,
    };
    Ok(leading_term(family, m, d) + divisor_count * scale / size)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundMode {
    #[serde(rename = "lemma")]
    Lemma,
    #[serde(rename = "corollary_cP")]
    CorollaryDensity,
    #[serde(rename = "corollary_exact")]
    CorollaryExact,
}

impl std::str::FromStr for BoundMode {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lemma" => Ok(BoundMode::Lemma),
            "corollary_cP" | "corollary_cp" => Ok(BoundMode::CorollaryDensity),
            "corollary_exact" => Ok(BoundMode::CorollaryExact),
            other => domain(format!("unknown verification mode {other:?}")),
        }
    }
}

/// Radius of the frequency box `[-K, K]^d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoxRadius {
    Fixed(u64),
    /// `K = p` for each prime (lemma mode) or `K = M` (composite modes).
    Parameter,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyRequest {
    pub family: KorobovFamily,
    pub mode: BoundMode,
    /// Primes for lemma mode, band parameters `M` for the composite modes.
    pub parameters: Vec<u64>,
    pub dims: Vec<usize>,
    pub radius: BoxRadius,
    pub sample: Option<usize>,
    pub seed: u64,
    pub c_p: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseId {
    #[serde(rename = "p_or_M")]
    pub p_or_m: u64,
    pub d: usize,
    pub k: Frequency,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub family: KorobovFamily,
    pub mode: BoundMode,
    pub cases_checked: u64,
    /// Largest `|W(k)| / max(bound, slack)`.
    pub max_ratio: f64,
    pub argmax: Option<CaseId>,
    pub passed: bool,
    pub violations: u64,
    pub first_violation: Option<CaseId>,
    pub notes: Vec<String>,
}

/// Which frequencies of a box get checked.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum FrequencyPlan {
    Exhaustive,
    Sampled(usize),
}

pub(crate) fn plan_scan(radius: u64, d: usize, sample: Option<usize>) -> FrequencyPlan {
    let nonzero = box_size(radius, d).saturating_sub(1);
    match sample {
        Some(s) if nonzero > s as u128 => FrequencyPlan::Sampled(s),
        Some(_) => FrequencyPlan::Exhaustive,
        None if nonzero < EXHAUSTIVE_LIMIT => FrequencyPlan::Exhaustive,
        None => FrequencyPlan::Sampled(DEFAULT_SAMPLE),
    }
}

pub(crate) fn box_size(radius: u64, d: usize) -> u128 {
    (2 * radius as u128 + 1).saturating_pow(d as u32)
}

/// Nonzero frequencies of `[-K, K]^d` in lexicographic order.
pub fn box_frequencies(radius: u64, d: usize) -> impl Iterator<Item = Frequency> {
    let r = radius as i64;
    let mut current = vec![-r; d];
    let mut done = d == 0;
    std::iter::from_fn(move || loop {
        if done {
            return None;
        }
        let out = current.clone();
        // odometer increment, last coordinate fastest
        let mut j = d;
        loop {
            if j == 0 {
                done = true;
                break;
            }
            j -= 1;
            if current[j] < r {
                current[j] += 1;
                break;
            }
            current[j] = -r;
        }
        if out.iter().any(|&c| c != 0) {
            return Some(Frequency(out));
        }
    })
}

/// `count` uniform nonzero frequencies from `[-K, K]^d`.
pub fn sample_frequencies(
    radius: u64,
    d: usize,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Frequency> {
    let r = radius as i64;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let k: Vec<i64> = (0..d).map(|_| rng.gen_range(-r..=r)).collect();
        if k.iter().any(|&c| c != 0) {
            out.push(Frequency(k));
        }
    }
    out
}

pub(crate) fn case_rng(seed: u64, parameter: u64, d: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((parameter << 8) ^ d as u64);
    rng
}

struct Tally {
    cases: u64,
    violations: u64,
    max_ratio: f64,
    argmax: Option<CaseId>,
    first_violation: Option<CaseId>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            cases: 0,
            violations: 0,
            max_ratio: f64::NEG_INFINITY,
            argmax: None,
            first_violation: None,
        }
    }

    fn record(&mut self, parameter: u64, d: usize, k: &Frequency, modulus: f64, bound: f64) {
        self.cases += 1;
        let ratio = modulus / bound.max(BOUND_SLACK);
        let id = || CaseId {
            p_or_m: parameter,
            d,
            k: k.clone(),
        };
        if modulus > bound + BOUND_SLACK {
            self.violations += 1;
            if self.first_violation.is_none() {
                self.first_violation = Some(id());
            }
        }
        let better = match &self.argmax {
            None => true,
            Some(best) => {
                ratio > self.max_ratio
                    || (ratio == self.max_ratio
                        && (parameter, d, k) < (best.p_or_m, best.d, &best.k))
            }
        };
        if better {
            self.max_ratio = ratio;
            self.argmax = Some(id());
        }
    }
}

/// Lemma-mode and composite-mode bound verification.
///
/// Each `(parameter, d)` case scans nonzero `k` in `[-K, K]^d`: exhaustively
/// when the box is small enough (at most `sample` frequencies if a sample
/// size is given, otherwise [`EXHAUSTIVE_LIMIT`]), otherwise on a seeded
/// uniform sample. At `d = 1` the S and U bounds collapse to 0 although
/// sums such as `U_{2,1}` at `k = 1` are nonzero; there the trivial bound 1
/// is checked instead and the substitution is noted in the report.
pub fn verify_bounds(req: &VerifyRequest) -> Result<VerificationReport> {
    if req.dims.contains(&0) {
        return domain("dimensions must be >= 1");
    }
    if req.mode == BoundMode::CorollaryDensity {
        check_density_constant(req.c_p)?;
    }
    let mut tally = Tally::new();
    let mut notes = Vec::new();

    for &param in &req.parameters {
        for &d in &req.dims {
            let radius = match req.radius {
                BoxRadius::Fixed(k) => k,
                BoxRadius::Parameter => param,
            };
            if radius == 0 {
                return domain("box radius must be >= 1");
            }
            let degenerate = d == 1 && matches!(req.family, KorobovFamily::S | KorobovFamily::U);
            if degenerate {
                notes.push(format!(
                    "{}={param}, d=1: trivial bound 1 checked in place of the degenerate zero bound",
                    if req.mode == BoundMode::Lemma { "p" } else { "M" }
                ));
            }
            let frequencies: Box<dyn Iterator<Item = Frequency>> =
                match plan_scan(radius, d, req.sample) {
                    FrequencyPlan::Exhaustive => Box::new(box_frequencies(radius, d)),
                    FrequencyPlan::Sampled(n) => {
                        let mut rng = case_rng(req.seed, param, d);
                        Box::new(sample_frequencies(radius, d, n, &mut rng).into_iter())
                    }
                };

            match req.mode {
                BoundMode::Lemma => {
                    let block = korobov_block(req.family, param, d)?;
                    let mut eval = BlockWeylEvaluator::new(&block);
                    let m = block.den();
                    // W depends only on k mod m, and |W(-k)| = |W(k)|
                    let mut cache: HashMap<Vec<u64>, f64> = HashMap::new();
                    for k in frequencies {
                        let key = {
                            let a = k.residues(m);
                            let b = k.negated().residues(m);
                            a.min(b)
                        };
                        let modulus = match cache.get(&key) {
                            Some(&v) => v,
                            None => {
                                let v = eval.weyl_sum(&k)?.modulus();
                                cache.insert(key, v);
                                v
                            }
                        };
                        let bound = if degenerate {
                            1.0
                        } else {
                            lemma_bound(req.family, param, d, &k)?
                        };
                        tally.record(param, d, &k, modulus, bound);
                    }
                }
                BoundMode::CorollaryDensity | BoundMode::CorollaryExact => {
                    let cps = crate::pointsets::composite_point_set(req.family, param, d)?;
                    let band = prime_band(param)?;
                    let mut eval = CompositeWeylEvaluator::new(&cps);
                    for k in frequencies {
                        let modulus = eval.weyl_sum(&k)?.modulus();
                        let bound = if degenerate {
                            1.0
                        } else if req.mode == BoundMode::CorollaryExact {
                            corollary_exact_bound(req.family, &band, d, &k)?
                        } else {
                            corollary_bound(req.family, param, d, &k, req.c_p)?
                        };
                        tally.record(param, d, &k, modulus, bound);
                    }
                }
            }
        }
    }

    Ok(VerificationReport {
        family: req.family,
        mode: req.mode,
        cases_checked: tally.cases,
        max_ratio: if tally.cases == 0 {
            0.0
        } else {
            tally.max_ratio
        },
        argmax: tally.argmax,
        passed: tally.violations == 0,
        violations: tally.violations,
        first_violation: tally.first_violation,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointsets::composite_point_set;
    use approx::assert_abs_diff_eq;

    fn freq(k: &[i64]) -> Frequency {
        Frequency::new(k.to_vec())
    }

    #[test]
    fn residue_walk_matches_horner() {
        let m = 10_201;
        let coeffs = [0, 5, 10_000, 77, 3];
        let mut walk = ResidueWalk::new(&coeffs, m);
        for n in 0..3 * m {
            assert_eq!(walk.current(), horner(&coeffs, n, m), "n = {n}");
            walk.advance();
        }
        let mut constant = ResidueWalk::new(&[4], 7);
        constant.advance();
        assert_eq!(constant.current(), 4);
    }

    #[test]
    fn frequency_basics() {
        let k = freq(&[3, -7, 0]);
        assert_eq!(k.inf_norm(), 7);
        assert!(!k.is_zero());
        assert!(Frequency::zero(2).is_zero());
        assert_eq!(k.residues(5), vec![3, 3, 0]);
        assert!(freq(&[3, -6]).divisible_by(3));
    }

    #[test]
    fn block_sum_examples() {
        let s32 = korobov_block(KorobovFamily::S, 3, 2).unwrap();
        let w = weyl_sum_block(&s32, &Frequency::zero(2)).unwrap();
        assert_eq!(w.value, Complex64::new(1.0, 0.0));
        assert_eq!(w.count, 3);

        let s31 = korobov_block(KorobovFamily::S, 3, 1).unwrap();
        let w = weyl_sum_block(&s31, &freq(&[1])).unwrap();
        assert!(w.modulus() < 1e-15);

        let w = weyl_sum_block(&s32, &freq(&[3, 3])).unwrap();
        assert_eq!(w.value, Complex64::new(1.0, 0.0));

        assert!(weyl_sum_block(&s32, &freq(&[1])).is_err());
    }

    #[test]
    fn u_block_d1_degenerate_value() {
        let u21 = korobov_block(KorobovFamily::U, 2, 1).unwrap();
        let w = weyl_sum_block(&u21, &freq(&[1])).unwrap();
        assert_abs_diff_eq!(w.value.re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(w.value.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn composite_examples() {
        let t = composite_point_set(KorobovFamily::T, 4, 1).unwrap();
        let w = weyl_sum_composite(&t, &freq(&[9])).unwrap();
        assert_abs_diff_eq!(w.value.re, 1.0, epsilon = 1e-15);
        let s = composite_point_set(KorobovFamily::S, 20, 1).unwrap();
        let w = weyl_sum_composite(&s, &freq(&[1])).unwrap();
        assert!(w.modulus() < 1e-15);
        let w = weyl_sum_composite(&s, &Frequency::zero(1)).unwrap();
        assert_eq!(w.value, Complex64::new(1.0, 0.0));
        assert_eq!(w.count, 60);
    }

    #[test]
    fn lemma_bound_examples() {
        let b = lemma_bound(KorobovFamily::S, 5, 3, &freq(&[1, 0, 0])).unwrap();
        assert_abs_diff_eq!(b, 2.0 / 5f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(b, 0.894_427_191, epsilon = 1e-9);
        let b = lemma_bound(KorobovFamily::T, 5, 3, &freq(&[1, 0, 0])).unwrap();
        assert_abs_diff_eq!(b, 0.4, epsilon = 1e-15);
        assert_eq!(
            lemma_bound(KorobovFamily::S, 3, 2, &freq(&[3, 6])).unwrap(),
            1.0
        );
        assert!(lemma_bound(KorobovFamily::S, 3, 2, &freq(&[0, 0])).is_err());
    }

    #[test]
    fn corollary_bound_examples() {
        let b = corollary_bound(KorobovFamily::S, 16, 2, &freq(&[3, 1]), 0.2).unwrap();
        assert_abs_diff_eq!(b, 0.5 + 4.0 * 3f64.ln() * 5.0 / 16.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b, 1.8733, epsilon = 1e-4);
        let b = corollary_bound(KorobovFamily::T, 16, 2, &freq(&[1, 1]), 0.2).unwrap();
        assert_abs_diff_eq!(b, 0.25, epsilon = 1e-15);
        let b = corollary_bound(KorobovFamily::U, 100, 1, &freq(&[1]), 0.2).unwrap();
        assert_eq!(b, 0.0);
        assert!(corollary_bound(KorobovFamily::U, 100, 1, &freq(&[1]), 1.0).is_err());
        assert!(corollary_bound(KorobovFamily::U, 100, 1, &freq(&[0]), 0.2).is_err());
    }

    #[test]
    fn exact_band_bound_formula() {
        let band = prime_band(20).unwrap();
        let k = freq(&[11 * 13, 0]);
        let b = corollary_exact_bound(KorobovFamily::S, &band, 2, &k).unwrap();
        let expected = 2.0 / 20f64.sqrt() + 2.0 * 143f64.ln() / 11f64.ln() * 20.0 / 60.0;
        assert_abs_diff_eq!(b, expected, epsilon = 1e-12);
    }

    #[test]
    fn box_enumeration_is_lexicographic() {
        let all: Vec<_> = box_frequencies(1, 2).collect();
        assert_eq!(all.len(), 8);
        assert_eq!(all[0], freq(&[-1, -1]));
        assert_eq!(all[7], freq(&[1, 1]));
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert!(!all.contains(&Frequency::zero(2)));
    }

    #[test]
    fn scan_plan_rules() {
        assert_eq!(plan_scan(101, 2, None), FrequencyPlan::Exhaustive);
        assert_eq!(
            plan_scan(101, 3, None),
            FrequencyPlan::Sampled(DEFAULT_SAMPLE)
        );
        assert_eq!(plan_scan(3, 3, Some(10_000)), FrequencyPlan::Exhaustive);
        assert_eq!(
            plan_scan(101, 3, Some(10_000)),
            FrequencyPlan::Sampled(10_000)
        );
    }

    #[test]
    fn seeded_sampling_is_reproducible() {
        let a = sample_frequencies(1_000_000, 3, 50, &mut case_rng(7, 16, 2));
        let b = sample_frequencies(1_000_000, 3, 50, &mut case_rng(7, 16, 2));
        let c = sample_frequencies(1_000_000, 3, 50, &mut case_rng(7, 32, 2));
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.iter().all(|k| !k.is_zero() && k.inf_norm() <= 1_000_000));
    }

    #[test]
    fn harness_flags_degenerate_dimension() {
        let report = verify_bounds(&VerifyRequest {
            family: KorobovFamily::U,
            mode: BoundMode::Lemma,
            parameters: vec![2],
            dims: vec![1],
            radius: BoxRadius::Fixed(1),
            sample: None,
            seed: 0,
            c_p: 0.2,
        })
        .unwrap();
        assert!(report.passed);
        assert_eq!(report.cases_checked, 2);
        assert_eq!(report.notes.len(), 1);
    }

    #[test]
    fn report_json_shape() {
        let report = verify_bounds(&VerifyRequest {
            family: KorobovFamily::S,
            mode: BoundMode::CorollaryExact,
            parameters: vec![8],
            dims: vec![2],
            radius: BoxRadius::Fixed(3),
            sample: None,
            seed: 0,
            c_p: 0.2,
        })
        .unwrap();
        let v = serde_json::to_value(&report).unwrap();
        assert_eq!(v["mode"], "corollary_exact");
        assert_eq!(v["family"], "S");
        assert_eq!(v["cases_checked"], 48);
        assert!(v["argmax"]["p_or_M"].is_u64());
        assert!(v["argmax"]["k"].is_array());
    }
}
