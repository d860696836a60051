//! Prime sieving, the prime band `P_M = { p prime : ceil(M/2) < p <= M }`,
//! and an empirical scan of the band density `|P_M| log M / M`.
//!
//! The sieve is a segmented sieve of Eratosthenes over odd numbers. Base
//! primes up to `sqrt(limit)` are found with a plain sieve, then each segment
//! of [`SEGMENT_ODDS`] odd candidates is crossed off independently, so memory
//! stays at `O(sqrt(limit) + segment)` besides the output vector.

use serde::{Deserialize, Serialize};

use crate::error::{capacity, domain, Result};

/// Largest accepted sieve limit. The output vector alone is ~400 MB here.
pub const MAX_SIEVE_LIMIT: u64 = 1_000_000_000;

const SEGMENT_ODDS: usize = 1 << 17;

/// All primes `<= limit`, ascending.
pub fn sieve_primes(limit: u64) -> Result<Vec<u64>> {
    if limit < 2 {
        return domain(format!("sieve limit must be >= 2, got {limit}"));
    }
    if limit > MAX_SIEVE_LIMIT {
        return capacity(format!(
            "sieve limit {limit} exceeds supported maximum {MAX_SIEVE_LIMIT}"
        ));
    }

    let root = integer_sqrt(limit);
    let base = simple_odd_sieve(root);

    let mut primes = Vec::with_capacity(estimate_pi(limit));
    primes.push(2);

    // Segment [lo, hi) over odd numbers only; index i stands for lo + 2i.
    let mut composite = vec![false; SEGMENT_ODDS];
    let mut lo = 3u64;
    while lo <= limit {
        let hi = (lo + 2 * SEGMENT_ODDS as u64).min(limit + 1);
        let len = (hi - lo).div_ceil(2) as usize;
        composite[..len].iter_mut().for_each(|c| *c = false);

        for &q in &base {
            let sq = q * q;
            if sq >= hi {
                break;
            }
            // first odd multiple of q that is >= max(lo, q*q)
            let mut start = if sq >= lo { sq } else { lo.div_ceil(q) * q };
            if start % 2 == 0 {
                start += q;
            }
            let mut idx = ((start - lo) / 2) as usize;
            while idx < len {
                composite[idx] = true;
                idx += q as usize;
            }
        }

        primes.extend(
            composite[..len]
                .iter()
                .enumerate()
                .filter(|(_, &c)| !c)
                .map(|(i, _)| lo + 2 * i as u64)
                .filter(|&n| n <= limit),
        );
        lo = hi + hi.is_multiple_of(2) as u64;
    }
    Ok(primes)
}

/// Odd primes `<= limit` from a non-segmented sieve (used for base primes).
fn simple_odd_sieve(limit: u64) -> Vec<u64> {
    if limit < 3 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n / 2 + 1];
    let mut i = 3usize;
    while i * i <= n {
        if !composite[i / 2] {
            let mut j = i * i;
            while j <= n {
                composite[j / 2] = true;
                j += 2 * i;
            }
        }
        i += 2;
    }
    (1..=n / 2)
        .filter(|&h| 2 * h < n && !composite[h])
        .map(|h| (2 * h + 1) as u64)
        .collect()
}

fn integer_sqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn estimate_pi(n: u64) -> usize {
    let x = n as f64;
    (1.3 * x / x.ln().max(1.0)) as usize + 16
}

/// Deterministic Miller-Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &SMALL {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// The primes in `(ceil(M/2), M]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeBand {
    m: u64,
    primes: Vec<u64>,
}

impl PrimeBand {
    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn count(&self) -> usize {
        self.primes.len()
    }

    /// Exclusive lower end `ceil(M/2)` of the band.
    pub fn lower(&self) -> u64 {
        self.m.div_ceil(2)
    }

    /// `sum p` over the band, the size of the composite S set.
    pub fn sum_p(&self) -> u128 {
        self.primes.iter().map(|&p| p as u128).sum()
    }

    /// `sum p^2` over the band, the size of the composite T and U sets.
    pub fn sum_p_squared(&self) -> u128 {
        self.primes.iter().map(|&p| p as u128 * p as u128).sum()
    }
}

pub fn prime_band(m: u64) -> Result<PrimeBand> {
    if m < 2 {
        return domain(format!("band parameter M must be >= 2, got {m}"));
    }
    let lower = m.div_ceil(2);
    let primes = sieve_primes(m)?
        .into_iter()
        .filter(|&p| p > lower)
        .collect();
    Ok(PrimeBand { m, primes })
}

/// Extremes of `|P_M| log M / M` over `2 <= M <= m_max` and the constants
/// recommended from them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityCalibration {
    pub m_max: u64,
    pub min_ratio: f64,
    pub argmin_m: u64,
    pub max_ratio: f64,
    pub argmax_m: u64,
    /// Largest `1/n` (`n >= 2`) not exceeding `min_ratio`.
    #[serde(rename = "c_p")]
    pub lower_constant: f64,
    /// Smallest half-integer `> 1` not below `max_ratio`.
    #[serde(rename = "C_p")]
    pub upper_constant: f64,
}

/// Scan every `2 <= M <= m_max`. Ties keep the smallest `M`.
pub fn calibrate_density(m_max: u64) -> Result<DensityCalibration> {
    if m_max < 2 {
        return domain(format!("m_max must be >= 2, got {m_max}"));
    }
    let counts = band_counts(m_max)?;

    let mut min = (f64::INFINITY, 0u64);
    let mut max = (f64::NEG_INFINITY, 0u64);
    for m in 2..=m_max {
        let ratio = band_density_ratio(m, counts[m as usize]);
        if ratio < min.0 {
            min = (ratio, m);
        }
        if ratio > max.0 {
            max = (ratio, m);
        }
    }

    Ok(DensityCalibration {
        m_max,
        min_ratio: min.0,
        argmin_m: min.1,
        max_ratio: max.0,
        argmax_m: max.1,
        lower_constant: reciprocal_below(min.0),
        upper_constant: half_integer_above(max.0),
    })
}

/// `|P_M| log M / M` with the natural logarithm.
pub fn band_density_ratio(m: u64, count: u64) -> f64 {
    let mf = m as f64;
    count as f64 * mf.ln() / mf
}

/// `|P_M|` for every `0 <= M <= m_max` (entries 0 and 1 are zero), from one
/// sieve and the prime-counting prefix `pi(M) - pi(ceil(M/2))`.
pub fn band_counts(m_max: u64) -> Result<Vec<u64>> {
    let primes = sieve_primes(m_max.max(2))?;
    let n = m_max as usize;
    let mut pi = vec![0u64; n + 1];
    let mut next = primes.iter().peekable();
    let mut running = 0u64;
    for (x, slot) in pi.iter_mut().enumerate() {
        while next.next_if(|&&p| p as usize == x).is_some() {
            running += 1;
        }
        *slot = running;
    }
    Ok((0..=n)
        .map(|m| if m < 2 { 0 } else { pi[m] - pi[m.div_ceil(2)] })
        .collect())
}

fn reciprocal_below(x: f64) -> f64 {
    let mut n = (1.0 / x).ceil().max(2.0);
    while 1.0 / n > x {
        n += 1.0;
    }
    1.0 / n
}

fn half_integer_above(x: f64) -> f64 {
    let mut c = 1.5;
    while c < x {
        c += 0.5;
    }
    c
}
