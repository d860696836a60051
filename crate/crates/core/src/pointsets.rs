//! Korobov p-sets and their prime-band composites.
//!
//! For a prime `p` and dimension `d` the three families are
//!
//! * `S`: `x_n = ({n/p}, {n^2/p}, ..., {n^d/p})` for `0 <= n < p`,
//! * `T`: `x_n = ({n/p^2}, ..., {n^d/p^2})` for `0 <= n < p^2`,
//! * `U`: `x_{k,n} = ({k n/p}, ..., {k n^d/p})` for `0 <= k, n < p`.
//!
//! Points are kept as exact residues over a common denominator. A composite
//! set is the multiset union of one block per prime of the band `P_M`,
//! ascending in `p`; repeated points (the origin is in every block) are kept.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{capacity, domain, Error, Result};
use crate::primes::{is_prime, prime_band, PrimeBand};

/// Largest admissible prime (exclusive).
pub const MAX_PRIME: u64 = 1 << 31;

/// Upper limit on stored residues (`points * d`) across one point set.
pub const MAX_STORED_COORDINATES: u128 = 1 << 27;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum KorobovFamily {
    S,
    T,
    U,
}

impl KorobovFamily {
    pub const ALL: [KorobovFamily; 3] = [KorobovFamily::S, KorobovFamily::T, KorobovFamily::U];

    /// Number of points of the block for prime `p`.
    pub fn block_size(self, p: u64) -> u128 {
        match self {
            KorobovFamily::S => p as u128,
            KorobovFamily::T | KorobovFamily::U => p as u128 * p as u128,
        }
    }

    /// Common denominator of the block for prime `p`.
    pub fn denominator(self, p: u64) -> u64 {
        match self {
            KorobovFamily::S | KorobovFamily::U => p,
            KorobovFamily::T => p * p,
        }
    }

    /// Total size of the composite set over `band`.
    pub fn composite_size(self, band: &PrimeBand) -> u128 {
        match self {
            KorobovFamily::S => band.sum_p(),
            KorobovFamily::T | KorobovFamily::U => band.sum_p_squared(),
        }
    }
}

impl fmt::Display for KorobovFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            KorobovFamily::S => "S",
            KorobovFamily::T => "T",
            KorobovFamily::U => "U",
        };
        f.write_str(s)
    }
}

impl FromStr for KorobovFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "S" | "s" => Ok(KorobovFamily::S),
            "T" | "t" => Ok(KorobovFamily::T),
            "U" | "u" => Ok(KorobovFamily::U),
            other => domain(format!("unknown family {other:?}, expected S, T or U")),
        }
    }
}

/// A point `numerators / den` of `[0,1)^d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalPoint {
    pub numerators: Vec<u64>,
    pub den: u64,
}

impl RationalPoint {
    pub fn new(numerators: Vec<u64>, den: u64) -> Result<Self> {
        if den == 0 {
            return domain("denominator must be >= 1");
        }
        if let Some(&bad) = numerators.iter().find(|&&n| n >= den) {
            return domain(format!("numerator {bad} not below denominator {den}"));
        }
        Ok(RationalPoint { numerators, den })
    }

    pub fn to_unit_cube(&self) -> Vec<f64> {
        to_unit_cube(&self.numerators, self.den)
    }
}

/// Coordinates `numerators[j] / den` rounded to nearest, clamped below 1.
pub fn to_unit_cube(numerators: &[u64], den: u64) -> Vec<f64> {
    let mut out = vec![0.0; numerators.len()];
    fill_unit_cube(numerators, den, &mut out);
    out
}

pub(crate) fn fill_unit_cube(numerators: &[u64], den: u64, out: &mut [f64]) {
    // above 2^53 the quotient can round up to 1
    for (x, &n) in out.iter_mut().zip(numerators) {
        *x = (n as f64 / den as f64).min(PRED_ONE);
    }
}

const PRED_ONE: f64 = 1.0 - f64::EPSILON / 2.0;

/// One Korobov p-set, stored row-major as `count * d` residues.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KorobovBlock {
    family: KorobovFamily,
    p: u64,
    d: usize,
    numerators: Vec<u64>,
}

impl KorobovBlock {
    pub fn family(&self) -> KorobovFamily {
        self.family
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn den(&self) -> u64 {
        self.family.denominator(self.p)
    }

    pub fn count(&self) -> usize {
        self.numerators.len() / self.d
    }

    /// Residues of point `i` in enumeration order.
    pub fn coords(&self, i: usize) -> &[u64] {
        &self.numerators[i * self.d..(i + 1) * self.d]
    }

    pub fn point(&self, i: usize) -> RationalPoint {
        RationalPoint {
            numerators: self.coords(i).to_vec(),
            den: self.den(),
        }
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = RationalPoint> + '_ {
        let den = self.den();
        self.numerators
            .chunks_exact(self.d)
            .map(move |c| RationalPoint {
                numerators: c.to_vec(),
                den,
            })
    }

    pub fn residue_rows(&self) -> std::slice::ChunksExact<'_, u64> {
        self.numerators.chunks_exact(self.d)
    }
}

fn check_prime_and_dim(p: u64, d: usize) -> Result<()> {
    if d == 0 {
        return domain("dimension must be >= 1");
    }
    if p >= MAX_PRIME {
        return capacity(format!("prime {p} exceeds supported width (< 2^31)"));
    }
    if !is_prime(p) {
        return domain(format!("{p} is not prime"));
    }
    Ok(())
}

/// `n, n^2, ..., n^d` reduced mod `modulus` by repeated multiplication.
fn powers_into(n: u64, modulus: u64, out: &mut [u64]) {
    let base = n % modulus;
    let mut acc = base;
    for slot in out.iter_mut() {
        *slot = acc;
        acc = ((acc as u128 * base as u128) % modulus as u128) as u64;
    }
}

pub fn korobov_block(family: KorobovFamily, p: u64, d: usize) -> Result<KorobovBlock> {
    check_prime_and_dim(p, d)?;
    let count = family.block_size(p);
    if count * d as u128 > MAX_STORED_COORDINATES {
        return capacity(format!(
            "block {family}_{{{p},{d}}} would store {} residues (limit {MAX_STORED_COORDINATES})",
            count * d as u128
        ));
    }
    let count = count as usize;
    let mut numerators = vec![0u64; count * d];

    match family {
        KorobovFamily::S | KorobovFamily::T => {
            let den = family.denominator(p);
            for (n, row) in numerators.chunks_exact_mut(d).enumerate() {
                powers_into(n as u64, den, row);
            }
        }
        KorobovFamily::U => {
            let mut powers = vec![0u64; p as usize * d];
            for (n, row) in powers.chunks_exact_mut(d).enumerate() {
                powers_into(n as u64, p, row);
            }
            let p_usize = p as usize;
            for k in 0..p_usize {
                for n in 0..p_usize {
                    let row = &mut numerators[(k * p_usize + n) * d..(k * p_usize + n + 1) * d];
                    for (slot, &pw) in row.iter_mut().zip(&powers[n * d..(n + 1) * d]) {
                        *slot = (k as u64 * pw) % p;
                    }
                }
            }
        }
    }

    Ok(KorobovBlock {
        family,
        p,
        d,
        numerators,
    })
}

/// Union with multiplicity of the blocks over `P_M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompositePointSet {
    family: KorobovFamily,
    band: PrimeBand,
    d: usize,
    blocks: Vec<KorobovBlock>,
}

impl CompositePointSet {
    pub fn family(&self) -> KorobovFamily {
        self.family
    }

    pub fn m(&self) -> u64 {
        self.band.m()
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn band(&self) -> &PrimeBand {
        &self.band
    }

    pub fn blocks(&self) -> &[KorobovBlock] {
        &self.blocks
    }

    pub fn total_count(&self) -> u64 {
        self.blocks.iter().map(|b| b.count() as u64).sum()
    }

    /// Calls `f` on every point in `[0,1)^d`, blocks ascending in `p`.
    pub fn for_each_unit_point(&self, mut f: impl FnMut(&[f64])) {
        let mut x = vec![0.0; self.d];
        for block in &self.blocks {
            let den = block.den();
            for row in block.residue_rows() {
                fill_unit_cube(row, den, &mut x);
                f(&x);
            }
        }
    }

    /// Plain-text export: a header line then one point per line.
    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "# family={} M={} d={} count={}",
            self.family,
            self.m(),
            self.d,
            self.total_count()
        )?;
        let mut line = String::new();
        let mut result = Ok(());
        self.for_each_unit_point(|x| {
            if result.is_err() {
                return;
            }
            line.clear();
            for (j, &c) in x.iter().enumerate() {
                if j > 0 {
                    line.push(' ');
                }
                line.push_str(&format_17_significant(c));
            }
            line.push('\n');
            result = out.write_all(line.as_bytes());
        });
        result?;
        Ok(())
    }
}

pub fn composite_point_set(family: KorobovFamily, m: u64, d: usize) -> Result<CompositePointSet> {
    if d == 0 {
        return domain("dimension must be >= 1");
    }
    let band = prime_band(m)?;
    let total = family.composite_size(&band);
    if total * d as u128 > MAX_STORED_COORDINATES {
        return capacity(format!(
            "composite {family} set with M={m}, d={d} has {total} points; too large to store"
        ));
    }
    let blocks = band
        .primes()
        .iter()
        .map(|&p| korobov_block(family, p, d))
        .collect::<Result<Vec<_>>>()?;
    Ok(CompositePointSet {
        family,
        band,
        d,
        blocks,
    })
}

/// Positional decimal with 17 significant digits for `x` in `[0, 1)`.
pub fn format_17_significant(x: f64) -> String {
    if x == 0.0 {
        return "0.0000000000000000".to_string();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exponent) = sci.split_once('e').expect("exponent form");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    if exponent >= 0 {
        // only reachable for values rounding up to 1
        let (int, frac) = digits.split_at(exponent as usize + 1);
        return format!("{int}.{frac}");
    }
    let zeros = "0".repeat((-exponent - 1) as usize);
    format!("0.{zeros}{digits}")
}
