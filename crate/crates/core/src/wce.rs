//! Worst-case error of composite Korobov rules in the space of absolutely
//! convergent Fourier series with norm `sum_k |f^(k)| max(1, log|k|_inf)`.
//!
//! For an equal-weight rule the error on `f` is `sum_{k != 0} f^(k) W(k)`,
//! so the worst-case error is `sup_{k != 0} |W(k)| / weight(k)`. The
//! supremum is attained: the real cosine `cos(2 pi k.x - arg W(k)) / weight(k)`
//! has norm 1 and error exactly `|W(k)| / weight(k)`.
//!
//! [`wce_truncated`] evaluates that supremum over the box `0 < |k|_inf <= K`
//! for a lower bound. Outside the box `|W| <= 1` and `weight >= log K`, which
//! caps the remainder at `1 / log K` and gives a matching upper bound.

use serde::{Deserialize, Serialize};

use crate::error::{capacity, domain, Result};
use crate::exposums::{box_frequencies, case_rng, sample_frequencies, Frequency};
use crate::pointsets::{CompositePointSet, KorobovFamily};
use crate::primes::prime_band;
use crate::spectrum::SpectrumEvaluator;

/// Default cap on the number of half-box frequencies in one scan.
pub const DEFAULT_SCAN_BUDGET: u128 = 5_000_000;

/// `max(1, log |k|_inf)`, natural log; 1 at `k = 0`.
///
/// This is the only place the norm's weight is defined.
pub fn weight(k: &Frequency) -> f64 {
    let n = k.inf_norm();
    if n == 0 {
        1.0
    } else {
        (n as f64).ln().max(1.0)
    }
}

/// Worst-case error of the zero algorithm.
///
/// Equal to 1, so the absolute and normalized error criteria coincide.
pub fn initial_error() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WceBounds {
    pub family: KorobovFamily,
    #[serde(rename = "M")]
    pub m: u64,
    pub d: usize,
    pub c_p: f64,
    /// Number of points of the composite rule.
    #[serde(rename = "N")]
    pub n: u64,
    /// `8d/(c_P sqrt(M))` for S, `8d/(c_P M)` for T and U.
    #[serde(rename = "bound_in_M")]
    pub bound_in_m: f64,
    /// `8d/(c_P N^{1/4})` for S, `8d/(c_P N^{1/3})` for T and U.
    #[serde(rename = "bound_in_N")]
    pub bound_in_n: f64,
    pub initial_error: f64,
    /// Both bounds exceed the initial error.
    pub vacuous: bool,
}

pub fn wce_upper(family: KorobovFamily, m: u64, d: usize, c_p: f64) -> Result<WceBounds> {
    if m < 2 {
        return domain(format!("M must be >= 2, got {m}"));
    }
    if d == 0 {
        return domain("dimension must be >= 1");
    }
    if !(c_p > 0.0 && c_p < 1.0) {
        return domain(format!("density constant must lie in (0, 1), got {c_p}"));
    }
    let band = prime_band(m)?;
    let n = family.composite_size(&band) as u64;
    let scale = 8.0 * d as f64 / c_p;
    let (bound_in_m, bound_in_n) = match family {
        KorobovFamily::S => (scale / (m as f64).sqrt(), scale / (n as f64).powf(0.25)),
        KorobovFamily::T | KorobovFamily::U => (scale / m as f64, scale / (n as f64).cbrt()),
    };
    Ok(WceBounds {
        family,
        m,
        d,
        c_p,
        n,
        bound_in_m,
        bound_in_n,
        initial_error: initial_error(),
        vacuous: bound_in_m > 1.0 && bound_in_n > 1.0,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WceEstimate {
    /// `max |W(k)| / weight(k)` over the scanned frequencies.
    pub lower: f64,
    /// `max(lower, 1/log K)` for a full box; 1 when the box was sampled.
    pub upper: f64,
    #[serde(rename = "K")]
    pub k_radius: u64,
    pub argmax_k: Frequency,
    /// `lower >= 1/log K` on a full box, so `lower` is the exact value.
    pub exact: bool,
    pub sampled: bool,
    pub frequencies_checked: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanOptions {
    pub budget: u128,
    /// Sample this many frequencies (with this seed) instead of failing when
    /// the box exceeds the budget.
    pub sample: Option<(usize, u64)>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            budget: DEFAULT_SCAN_BUDGET,
            sample: None,
        }
    }
}

/// `k` is in the canonical half of the box: its first nonzero entry is
/// positive. `|W(-k)| = |W(k)|`, so only this half is scanned.
fn canonical(k: &Frequency) -> bool {
    k.components()
        .iter()
        .find(|&&c| c != 0)
        .is_some_and(|&c| c > 0)
}

/// Two-sided estimate of the worst-case error from the box `|k|_inf <= K`.
///
/// Frequencies are scanned in lexicographic order over the half box whose
/// first nonzero entry is positive; the reported maximizer is the
/// lexicographically smallest one there.
pub fn wce_truncated(
    cps: &CompositePointSet,
    radius: u64,
    opts: ScanOptions,
) -> Result<WceEstimate> {
    if radius < 3 {
        return domain(format!("box radius K must be >= 3, got {radius}"));
    }
    let d = cps.dim();
    let half = (2 * radius as u128 + 1)
        .checked_pow(d as u32)
        .map(|b| (b - 1) / 2)
        .unwrap_or(u128::MAX);

    let mut eval = SpectrumEvaluator::new(cps);
    let mut best: Option<(f64, Frequency)> = None;
    let mut checked = 0u64;
    let mut consider = |k: Frequency, eval: &mut SpectrumEvaluator| -> Result<()> {
        let ratio = eval.weyl_sum(&k)?.modulus() / weight(&k);
        checked += 1;
        let replace = match &best {
            None => true,
            Some((r, bk)) => ratio > *r || (ratio == *r && k < *bk),
        };
        if replace {
            best = Some((ratio, k));
        }
        Ok(())
    };

    let sampled = if half <= opts.budget {
        for k in box_frequencies(radius, d).filter(canonical) {
            consider(k, &mut eval)?;
        }
        false
    } else if let Some((count, seed)) = opts.sample {
        let mut rng = case_rng(seed, cps.m(), d);
        for k in sample_frequencies(radius, d, count, &mut rng) {
            let k = if canonical(&k) { k } else { k.negated() };
            consider(k, &mut eval)?;
        }
        true
    } else {
        return capacity(format!(
            "frequency box with K={radius}, d={d} has {half} canonical frequencies, over the budget of {}",
            opts.budget
        ));
    };

    let (lower, argmax_k) = best.expect("box with K >= 3 is nonempty");
    let cap = 1.0 / (radius as f64).ln();
    let upper = if sampled {
        initial_error()
    } else {
        lower.max(cap)
    };
    Ok(WceEstimate {
        lower,
        upper,
        k_radius: radius,
        argmax_k,
        exact: !sampled && lower >= cap,
        sampled,
        frequencies_checked: checked,
    })
}

/// `ceil((8/c_P)^3 eps^-3 d^3)`, points sufficient for worst-case error `eps`.
pub fn info_complexity_bound(eps: f64, d: usize, c_p: f64) -> Result<u64> {
    if !(eps > 0.0 && eps < 1.0) {
        return domain(format!("tolerance must lie in (0, 1), got {eps}"));
    }
    if d == 0 {
        return domain("dimension must be >= 1");
    }
    if !(c_p > 0.0 && c_p < 1.0) {
        return domain(format!("density constant must lie in (0, 1), got {c_p}"));
    }
    let x = (8.0 / c_p * d as f64 / eps).powi(3);
    if !x.is_finite() || x >= u64::MAX as f64 {
        return capacity(format!("complexity bound {x:e} does not fit in 64 bits"));
    }
    // absorb representation error of c_P and eps before rounding up
    let nearest = x.round();
    let n = if (x - nearest).abs() <= 1e-9 * x {
        nearest
    } else {
        x.ceil()
    };
    Ok(n as u64)
}

/// One line of a worst-case error sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WceSweepRow {
    pub family: KorobovFamily,
    #[serde(rename = "M")]
    pub m: u64,
    pub d: usize,
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "K")]
    pub k_radius: u64,
    pub lower: f64,
    pub upper: f64,
    #[serde(rename = "bound_in_M")]
    pub bound_in_m: f64,
    #[serde(rename = "bound_in_N")]
    pub bound_in_n: f64,
    pub c_p: f64,
}

impl WceSweepRow {
    pub fn new(estimate: &WceEstimate, bounds: &WceBounds) -> Self {
        WceSweepRow {
            family: bounds.family,
            m: bounds.m,
            d: bounds.d,
            n: bounds.n,
            k_radius: estimate.k_radius,
            lower: estimate.lower,
            upper: estimate.upper,
            bound_in_m: bounds.bound_in_m,
            bound_in_n: bounds.bound_in_n,
            c_p: bounds.c_p,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointsets::composite_point_set;
    use approx::assert_abs_diff_eq;

    #[test]
    fn weight_examples() {
        assert_eq!(weight(&Frequency::new(vec![1, 0])), 1.0);
        assert_eq!(weight(&Frequency::new(vec![2, -1])), 1.0);
        assert_abs_diff_eq!(
            weight(&Frequency::new(vec![9])),
            2.197_224_577,
            epsilon = 1e-9
        );
        assert_eq!(weight(&Frequency::zero(3)), 1.0);
    }

    #[test]
    fn upper_bound_examples() {
        let b = wce_upper(KorobovFamily::S, 16, 2, 0.2).unwrap();
        assert_abs_diff_eq!(b.bound_in_m, 20.0, epsilon = 1e-12);
        assert_eq!(b.n, 24);
        assert_abs_diff_eq!(b.bound_in_n, 80.0 / 24f64.powf(0.25), epsilon = 1e-12);
        assert!(b.vacuous);

        let b = wce_upper(KorobovFamily::T, 64, 3, 0.2).unwrap();
        assert_eq!(b.n, 17_119);
        assert_abs_diff_eq!(b.bound_in_n, 120.0 / 17_119f64.cbrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(b.bound_in_m, 120.0 / 64.0, epsilon = 1e-12);

        assert!(wce_upper(KorobovFamily::T, 1, 3, 0.2).is_err());
        assert!(wce_upper(KorobovFamily::T, 8, 0, 0.2).is_err());
        assert!(wce_upper(KorobovFamily::T, 8, 1, 1.5).is_err());
    }

    #[test]
    fn exact_single_block_case() {
        let cps = composite_point_set(KorobovFamily::T, 4, 1).unwrap();
        let est = wce_truncated(&cps, 20, ScanOptions::default()).unwrap();
        assert_abs_diff_eq!(est.lower, 1.0 / 9f64.ln(), epsilon = 1e-12);
        assert_eq!(est.upper, est.lower);
        assert!(est.exact);
        assert_eq!(est.argmax_k, Frequency::new(vec![9]));
        assert_eq!(est.frequencies_checked, 20);
    }

    #[test]
    fn tail_cap_only() {
        let cps = composite_point_set(KorobovFamily::S, 20, 1).unwrap();
        let est = wce_truncated(&cps, 10, ScanOptions::default()).unwrap();
        assert!(est.lower < 1e-15);
        assert_abs_diff_eq!(est.upper, 1.0 / 10f64.ln(), epsilon = 1e-15);
        assert!(!est.exact);
    }

    #[test]
    fn scan_errors() {
        let cps = composite_point_set(KorobovFamily::S, 8, 3).unwrap();
        assert!(matches!(
            wce_truncated(&cps, 2, ScanOptions::default()),
            Err(crate::Error::Domain(_))
        ));
        let tight = ScanOptions {
            budget: 10,
            sample: None,
        };
        assert!(matches!(
            wce_truncated(&cps, 5, tight),
            Err(crate::Error::Capacity(_))
        ));
        let sampled = wce_truncated(
            &cps,
            5,
            ScanOptions {
                budget: 10,
                sample: Some((50, 1)),
            },
        )
        .unwrap();
        assert!(sampled.sampled && !sampled.exact);
        assert_eq!(sampled.upper, 1.0);
        assert_eq!(sampled.frequencies_checked, 50);
    }

    #[test]
    fn complexity_examples() {
        assert_eq!(info_complexity_bound(0.5, 2, 0.2).unwrap(), 4_096_000);
        assert_eq!(info_complexity_bound(1.0 - 1e-12, 1, 0.2).unwrap(), 64_000);
        assert!(info_complexity_bound(1.0, 1, 0.2).is_err());
        assert!(info_complexity_bound(0.0, 1, 0.2).is_err());
        assert!(info_complexity_bound(0.5, 0, 0.2).is_err());
        assert!(matches!(
            info_complexity_bound(1e-300, 1, 0.2),
            Err(crate::Error::Capacity(_))
        ));
    }

    #[test]
    fn initial_error_is_one() {
        assert_eq!(initial_error(), 1.0);
    }
}
