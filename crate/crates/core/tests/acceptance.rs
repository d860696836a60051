//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use korobov_qmc::config::DEFAULT_DENSITY_CONSTANT;
use korobov_qmc::exposums::{box_frequencies, sample_frequencies, BlockWeylEvaluator};
use korobov_qmc::primes::{band_density_ratio, sieve_primes};
use korobov_qmc::{
    calibrate_density, composite_point_set, convergence_experiment, info_complexity_bound,
    korobov_block, lemma_bound, prime_band, qmc_apply, verify_bounds, wce_truncated, wce_upper,
    weyl_sum_composite, BoundMode, BoxRadius, FourierPolynomial, Frequency, KorobovFamily,
    ScanOptions, VerifyRequest, WeierstrassForm, WeierstrassProduct,
};

const SEED: u64 = 20_240_601;
const LEMMA_SLACK: f64 = 1e-9;

type Outcome = Result<String, String>;

fn lemma_primes() -> Vec<u64> {
    sieve_primes(101)
        .unwrap()
        .into_iter()
        .filter(|&p| p >= 3)
        .collect()
}

/// Largest |W(k)| / bound over p | k excluded; violations listed.
fn lemma_suite(family: KorobovFamily) -> Outcome {
    let mut checked = 0u64;
    let mut worst = (0.0f64, String::new());
    let mut violations = Vec::new();
    for p in lemma_primes() {
        for d in [2usize, 3] {
            let block = korobov_block(family, p, d).unwrap();
            let m = block.den();
            let mut eval = BlockWeylEvaluator::new(&block);
            let frequencies: Vec<Frequency> = if d == 2 {
                box_frequencies(p, d).collect()
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ p);
                sample_frequencies(p, d, 10_000, &mut rng)
            };
            let mut cache: HashMap<Vec<u64>, f64> = HashMap::new();
            for k in frequencies {
                if k.divisible_by(p) {
                    continue;
                }
                let key = k.residues(m).min(k.negated().residues(m));
                let w = match cache.get(&key) {
                    Some(&w) => w,
                    None => {
                        let w = eval.weyl_sum(&k).unwrap().modulus();
                        cache.insert(key, w);
                        w
                    }
                };
                let bound = lemma_bound(family, p, d, &k).unwrap();
                checked += 1;
                let ratio = w / bound;
                if ratio > worst.0 {
                    worst = (
                        ratio,
                        format!(
                            "p={p} d={d} k={:?} |W|={w:.6} bound={bound:.6}",
                            k.components()
                        ),
                    );
                }
                if w > bound + LEMMA_SLACK {
                    violations.push(format!(
                        "p={p} d={d} k={:?} |W|={w:.6} > {bound:.6}",
                        k.components()
                    ));
                }
            }
        }
    }
    let summary = format!(
        "{checked} frequencies, max ratio {:.4} at {}",
        worst.0, worst.1
    );
    if violations.is_empty() {
        Ok(summary)
    } else {
        Err(format!(
            "{summary}; {} violations, first {}",
            violations.len(),
            violations[0]
        ))
    }
}

fn divisible_suite(family: KorobovFamily) -> Outcome {
    let mut worst = (0.0f64, String::new());
    let mut checked = 0;
    for p in lemma_primes() {
        for d in [2usize, 3] {
            let block = korobov_block(family, p, d).unwrap();
            let k = Frequency::new(vec![p as i64; d]);
            let w = BlockWeylEvaluator::new(&block).weyl_sum(&k).unwrap().value;
            let dev = (w - Complex64::new(1.0, 0.0)).norm();
            checked += 1;
            if dev > worst.0 || worst.1.is_empty() {
                worst = (dev, format!("p={p} d={d} W={w:.6}"));
            }
        }
    }
    let summary = format!(
        "{checked} cases, max |W - 1| = {:.3e} at {}",
        worst.0, worst.1
    );
    if worst.0 <= 1e-12 {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn corollary_suite(family: KorobovFamily) -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for mode in [BoundMode::CorollaryExact, BoundMode::CorollaryDensity] {
        let report = verify_bounds(&VerifyRequest {
            family,
            mode,
            parameters: vec![8, 16, 32, 64],
            dims: vec![2, 3],
            radius: BoxRadius::Fixed(1_000_000),
            sample: Some(1000),
            seed: SEED,
            c_p: DEFAULT_DENSITY_CONSTANT,
        })
        .unwrap();
        ok &= report.passed && report.cases_checked == 8 * 1000;
        lines.push(format!(
            "{mode:?}: {} cases, {} violations, max ratio {:.4}",
            report.cases_checked, report.violations, report.max_ratio
        ));
    }
    let summary = lines.join("; ");
    if ok {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn calibration() -> Outcome {
    let cal = calibrate_density(100_000).unwrap();
    let band10 = prime_band(10).unwrap();
    let ratio10 = band_density_ratio(10, band10.count() as u64);
    let expected = 10f64.ln() / 10.0;
    let summary = format!(
        "min_ratio {:.6} at M={}, c_P {}, |P_10| = {}, ratio(10) = {:.6}",
        cal.min_ratio,
        cal.argmin_m,
        DEFAULT_DENSITY_CONSTANT,
        band10.count(),
        ratio10
    );
    if cal.min_ratio >= DEFAULT_DENSITY_CONSTANT
        && band10.count() == 1
        && (ratio10 - expected).abs() <= 1e-6
    {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn sandwich() -> Outcome {
    let mut failures = Vec::new();
    let mut cases = 0;
    let mut tightest = f64::INFINITY;
    for family in KorobovFamily::ALL {
        for m in [8u64, 16, 32, 64] {
            for d in 1..=3usize {
                let cps = composite_point_set(family, m, d).unwrap();
                let est = wce_truncated(&cps, 64, ScanOptions::default()).unwrap();
                let bounds = wce_upper(family, m, d, DEFAULT_DENSITY_CONSTANT).unwrap();
                cases += 1;
                let cap = bounds.bound_in_m.min(1.0).min(bounds.bound_in_n);
                tightest = tightest.min(cap - est.lower);
                if est.lower > bounds.bound_in_m.min(1.0) + 1e-9
                    || est.lower > bounds.bound_in_n + 1e-9
                    || est.sampled
                {
                    failures.push(format!("{family} M={m} d={d} lower={}", est.lower));
                }
            }
        }
    }
    let summary = format!("{cases} cases, smallest margin {tightest:.4}");
    if failures.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{summary}; {}", failures.join(", ")))
    }
}

fn exact_case() -> Outcome {
    let cps = composite_point_set(KorobovFamily::T, 4, 1).unwrap();
    let est = wce_truncated(&cps, 20, ScanOptions::default()).unwrap();
    let target = 1.0 / 9f64.ln();
    let summary = format!(
        "lower {:.12}, upper {:.12}, argmax {:?}",
        est.lower,
        est.upper,
        est.argmax_k.components()
    );
    if (est.lower - target).abs() <= 1e-9
        && (est.upper - target).abs() <= 1e-9
        && est.argmax_k.components() == [9]
    {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn random_polynomial(rng: &mut ChaCha8Rng) -> FourierPolynomial {
    let d = rng.gen_range(1..=3usize);
    let pairs = rng.gen_range(1..=9usize);
    let mut terms = vec![(
        Frequency::zero(d),
        Complex64::new(rng.gen_range(-1.0..1.0), 0.0),
    )];
    for _ in 0..pairs {
        let k = Frequency::new((0..d).map(|_| rng.gen_range(-40i64..=40)).collect());
        if k.is_zero() {
            continue;
        }
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        terms.push((k.negated(), c.conj()));
        terms.push((k, c));
    }
    FourierPolynomial::new(d, terms).unwrap()
}

fn spectral_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    let mut cases = 0;
    for _ in 0..100 {
        let f = random_polynomial(&mut rng);
        assert!(f.terms().len() <= 20);
        let d = korobov_qmc::Integrand::dim(&f);
        for family in KorobovFamily::ALL {
            for m in [8u64, 16] {
                let cps = composite_point_set(family, m, d).unwrap();
                let err = (qmc_apply(&cps, &f).unwrap() - f.integral()).abs();
                let mut spectral = Complex64::new(0.0, 0.0);
                for (k, c) in f.terms() {
                    if !k.is_zero() {
                        spectral += c * weyl_sum_composite(&cps, k).unwrap().value;
                    }
                }
                worst = worst.max((err - spectral.norm()).abs());
                cases += 1;
            }
        }
    }
    let summary = format!("{cases} cases, max deviation {worst:.3e}");
    if worst <= 1e-10 {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn convergence() -> Outcome {
    let f = WeierstrassProduct::new(1.5, 8, 2, WeierstrassForm::ProductOfOmega).unwrap();
    let norm = korobov_qmc::weierstrass_norm_bound(&f).unwrap();
    let rows = convergence_experiment(
        KorobovFamily::T,
        2,
        &[8, 16, 32, 64, 128, 256],
        &f,
        f.integral(),
        norm,
        DEFAULT_DENSITY_CONSTANT,
    )
    .unwrap();
    let first = rows.first().unwrap().abs_error;
    let last = rows.last().unwrap().abs_error;
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let summary = format!(
        "{} rows, abs_error {first:.4e} -> {last:.4e}, max ratio {max_ratio:.4e}",
        rows.len()
    );
    if rows.len() == 6 && last < first && rows.iter().all(|r| r.ratio <= 1.0 + 1e-9) {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn complexity() -> Outcome {
    let n = info_complexity_bound(0.5, 2, DEFAULT_DENSITY_CONSTANT).unwrap();
    let eps = [0.1, 0.25, 0.5, 0.75, 0.9];
    let dims = [1usize, 2, 3, 4, 5];
    let grid: Vec<Vec<u64>> = dims
        .iter()
        .map(|&d| {
            eps.iter()
                .map(|&e| info_complexity_bound(e, d, DEFAULT_DENSITY_CONSTANT).unwrap())
                .collect()
        })
        .collect();
    let in_eps = grid.iter().all(|row| row.windows(2).all(|w| w[0] >= w[1]));
    let in_d = (0..eps.len()).all(|j| grid.windows(2).all(|w| w[0][j] <= w[1][j]));
    let summary = format!("N(0.5, 2) = {n}, monotone in eps: {in_eps}, in d: {in_d}");
    if n == 4_096_000 && in_eps && in_d {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn main() -> ExitCode {
    type Criterion = (&'static str, Box<dyn Fn() -> Outcome>);
    let criteria: Vec<Criterion> = vec![
        (
            "1 single-prime bound, S",
            Box::new(|| lemma_suite(KorobovFamily::S)),
        ),
        (
            "1 single-prime bound, T",
            Box::new(|| lemma_suite(KorobovFamily::T)),
        ),
        (
            "1 single-prime bound, U",
            Box::new(|| lemma_suite(KorobovFamily::U)),
        ),
        (
            "2 divisible frequency, S",
            Box::new(|| divisible_suite(KorobovFamily::S)),
        ),
        (
            "2 divisible frequency, T",
            Box::new(|| divisible_suite(KorobovFamily::T)),
        ),
        (
            "2 divisible frequency, U",
            Box::new(|| divisible_suite(KorobovFamily::U)),
        ),
        (
            "3 composite bounds, S",
            Box::new(|| corollary_suite(KorobovFamily::S)),
        ),
        (
            "3 composite bounds, T",
            Box::new(|| corollary_suite(KorobovFamily::T)),
        ),
        (
            "3 composite bounds, U",
            Box::new(|| corollary_suite(KorobovFamily::U)),
        ),
        ("4 density calibration", Box::new(calibration)),
        ("5 worst-case error sandwich", Box::new(sandwich)),
        ("6 exact worst-case error", Box::new(exact_case)),
        ("7 spectral identity", Box::new(spectral_identity)),
        ("8 convergence", Box::new(convergence)),
        ("9 information complexity", Box::new(complexity)),
    ];
    let mut failed = 0;
    for (name, run) in &criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  criterion {name} ({secs:.1}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  criterion {name} ({secs:.1}s): {detail}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
