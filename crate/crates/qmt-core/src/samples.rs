//! Built-in example theories and seeded random generators.
//!
//! Random theories use small rational entries drawn from a ChaCha stream, so
//! a (seed, n) pair always reproduces the same file. The matrix generator
//! emits mixtures of rank-one terms with positive rational weights, which
//! guarantees Hermiticity, unit total (after normalization), and
//! nonnegativity of the induced measure while still producing interference
//! and nonempty null structure.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::io::{MatrixData, NumberLit, TheoryFile, VectorData};
use crate::measure::HistoriesTheory;
use crate::scalar::{format_rational, Mode, Scalar};

fn rational_lit(r: &BigRational) -> NumberLit {
    NumberLit::Text(format_rational(r))
}

fn labels(n: usize) -> Vec<String> {
    const NAMES: [&str; 16] = [
        "a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l", "m", "n", "o", "p",
    ];
    NAMES[..n].iter().map(|s| s.to_string()).collect()
}

/// Two tosses of a fair coin: four histories, uniform diagonal matrix.
pub fn coin() -> TheoryFile {
    let q = BigRational::new(BigInt::from(1), BigInt::from(4));
    let re: Vec<Vec<NumberLit>> = (0..4)
        .map(|a| {
            (0..4)
                .map(|b| {
                    if a == b {
                        rational_lit(&q)
                    } else {
                        NumberLit::Text("0".into())
                    }
                })
                .collect()
        })
        .collect();
    TheoryFile {
        histories: vec!["hh".into(), "ht".into(), "th".into(), "tt".into()],
        mode: Mode::Exact,
        decoherence: Some(MatrixData { re, im: None }),
        amplitudes: None,
        observable: None,
        experiment: None,
        cap: None,
        tolerance: None,
    }
}

/// Three interfering paths with amplitudes (1, 1, -1).
pub fn three_path() -> TheoryFile {
    TheoryFile {
        histories: labels(3),
        mode: Mode::Exact,
        decoherence: None,
        amplitudes: Some(VectorData {
            re: vec![
                NumberLit::Text("1".into()),
                NumberLit::Text("1".into()),
                NumberLit::Text("-1".into()),
            ],
            im: None,
        }),
        observable: None,
        experiment: None,
        cap: None,
        tolerance: None,
    }
}

/// The one-history deterministic theory.
pub fn single() -> TheoryFile {
    TheoryFile {
        histories: labels(1),
        mode: Mode::Exact,
        decoherence: None,
        amplitudes: Some(VectorData {
            re: vec![NumberLit::Text("1".into())],
            im: None,
        }),
        observable: None,
        experiment: None,
        cap: None,
        tolerance: None,
    }
}

fn small_rational(rng: &mut ChaCha8Rng) -> BigRational {
    let numer = rng.random_range(-3i64..=3);
    let denom = rng.random_range(1i64..=3);
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

fn small_complex(rng: &mut ChaCha8Rng) -> Scalar {
    Scalar::exact(small_rational(rng), small_rational(rng))
}

fn exact_rational(s: &Scalar) -> (BigRational, BigRational) {
    let re = s.re().as_rational().expect("exact scalar").clone();
    let im = s.im().as_rational().expect("exact scalar").clone();
    (re, im)
}

/// A seeded random rank-one (amplitude) theory: complex rational amplitudes
/// rescaled so their sum is exactly one.
pub fn random_amplitudes(seed: u64, n: usize) -> TheoryFile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(2).wrapping_add(1));
    loop {
        let amps: Vec<Scalar> = (0..n).map(|_| small_complex(&mut rng)).collect();
        let mut sum = Scalar::zero(Mode::Exact);
        for a in &amps {
            sum = sum.add(a);
        }
        if sum.is_zero_within(0.0) {
            continue;
        }
        let scaled: Vec<Scalar> = amps
            .iter()
            .map(|a| a.div(&sum).expect("sum is nonzero"))
            .collect();
        let mut re = Vec::with_capacity(n);
        let mut im = Vec::with_capacity(n);
        for s in &scaled {
            let (r, i) = exact_rational(s);
            re.push(rational_lit(&r));
            im.push(rational_lit(&i));
        }
        return TheoryFile {
            histories: labels(n),
            mode: Mode::Exact,
            decoherence: None,
            amplitudes: Some(VectorData { re, im: Some(im) }),
            observable: None,
            experiment: None,
            cap: None,
            tolerance: None,
        };
    }
}

/// A seeded random decoherence-matrix theory: a positive mixture of rank-one
/// terms, normalized to unit total.
pub fn random(seed: u64, n: usize) -> TheoryFile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let terms = rng.random_range(1usize..=3);
        let weights: Vec<BigRational> = (0..terms)
            .map(|_| BigRational::new(BigInt::from(rng.random_range(1i64..=3)), BigInt::one()))
            .collect();
        let vectors: Vec<Vec<Scalar>> = (0..terms)
            .map(|_| (0..n).map(|_| small_complex(&mut rng)).collect())
            .collect();
        // M[a][b] = sum_j w_j v_j[a] conj(v_j[b])
        let mut rows = vec![vec![Scalar::zero(Mode::Exact); n]; n];
        for (w, v) in weights.iter().zip(&vectors) {
            let w = Scalar::exact(w.clone(), BigRational::zero());
            for a in 0..n {
                for b in 0..n {
                    let term = w.mul(&v[a].mul(&v[b].conj()));
                    rows[a][b] = rows[a][b].add(&term);
                }
            }
        }
        // normalize so the total is exactly one
        let mut total = Scalar::zero(Mode::Exact);
        for row in &rows {
            for s in row {
                total = total.add(s);
            }
        }
        if total.is_zero_within(0.0) {
            continue;
        }
        let mut re = Vec::with_capacity(n);
        let mut im = Vec::with_capacity(n);
        for row in &rows {
            let mut re_row = Vec::with_capacity(n);
            let mut im_row = Vec::with_capacity(n);
            for s in row {
                let scaled = s.div(&total).expect("total is nonzero");
                let (r, i) = exact_rational(&scaled);
                re_row.push(rational_lit(&r));
                im_row.push(rational_lit(&i));
            }
            re.push(re_row);
            im.push(im_row);
        }
        return TheoryFile {
            histories: labels(n),
            mode: Mode::Exact,
            decoherence: Some(MatrixData { re, im: Some(im) }),
            amplitudes: None,
            observable: None,
            experiment: None,
            cap: None,
            tolerance: None,
        };
    }
}

/// A seeded random probability theory: a diagonal matrix of nonnegative
/// rationals summing to one. Roughly a quarter of the entries are zero, so
/// null singletons occur.
pub fn random_probability(seed: u64, n: usize) -> TheoryFile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(3).wrapping_add(7));
    loop {
        let weights: Vec<BigRational> = (0..n)
            .map(|_| {
                let numer = if rng.random_range(0u8..4) == 0 {
                    0
                } else {
                    rng.random_range(1i64..=4)
                };
                BigRational::new(
                    BigInt::from(numer),
                    BigInt::from(rng.random_range(1i64..=3)),
                )
            })
            .collect();
        let total: BigRational = weights.iter().cloned().sum();
        if total.is_zero() {
            continue;
        }
        let re: Vec<Vec<NumberLit>> = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        if a == b {
                            rational_lit(&(&weights[a] / &total))
                        } else {
                            NumberLit::Text("0".into())
                        }
                    })
                    .collect()
            })
            .collect();
        return TheoryFile {
            histories: labels(n),
            mode: Mode::Exact,
            decoherence: Some(MatrixData { re, im: None }),
            amplitudes: None,
            observable: None,
            experiment: None,
            cap: None,
            tolerance: None,
        };
    }
}

/// Look up an example by CLI name.
pub fn by_name(name: &str, seed: u64, n: usize) -> Result<TheoryFile> {
    match name {
        "coin" => Ok(coin()),
        "three-path" => Ok(three_path()),
        "single" => Ok(single()),
        "random" => Ok(random(seed, n)),
        "random-probability" => Ok(random_probability(seed, n)),
        "random-amplitudes" => Ok(random_amplitudes(seed, n)),
        _ => Err(Error::UnknownExample {
            name: name.to_string(),
        }),
    }
}

/// Convenience: realize a generated file directly into a theory.
pub fn realize_theory(file: &TheoryFile) -> Result<HistoriesTheory> {
    Ok(crate::io::realize(file, None)?.theory)
}
