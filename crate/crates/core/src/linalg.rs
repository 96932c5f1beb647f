//! Exact rank and dependency computations.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::rational::Rational;

/// Rank over the rationals of an integer matrix, by fraction-free (Bareiss)
/// elimination. Every division is exact.
pub(crate) fn bareiss_rank(mut rows: Vec<Vec<BigInt>>) -> usize {
    let m = rows.len();
    if m == 0 {
        return 0;
    }
    let cols = rows[0].len();
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..cols {
        if rank == m {
            break;
        }
        let Some(pivot_row) = (rank..m).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot_row);
        let (top, rest) = rows.split_at_mut(rank + 1);
        let pivot = &top[rank];
        let pivot_value = pivot[col].clone();
        for row in rest.iter_mut() {
            let factor = std::mem::take(&mut row[col]);
            for c in col + 1..cols {
                let scaled = &pivot_value * &row[c];
                let value = if factor.is_zero() || pivot[c].is_zero() {
                    scaled
                } else {
                    scaled - &factor * &pivot[c]
                };
                row[c] = if prev.is_one() { value } else { value / &prev };
            }
        }
        prev = pivot_value;
        rank += 1;
    }
    rank
}

const PRIME: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64) -> u64 {
    let mut acc = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base);
        }
        base = mul_mod(base, base);
        exp >>= 1;
    }
    acc
}

pub(crate) fn to_residue(v: &BigInt) -> u64 {
    let p = BigInt::from(PRIME);
    let r = ((v % &p) + &p) % &p;
    u64::try_from(r).expect("residue fits")
}

/// Rank modulo the Mersenne prime `2^61 - 1`. This never exceeds the rank
/// over the rationals, so a full modular rank certifies full rational rank.
pub(crate) fn rank_mod_prime(mut rows: Vec<Vec<u64>>) -> usize {
    let m = rows.len();
    if m == 0 {
        return 0;
    }
    let cols = rows[0].len();
    let mut rank = 0;
    for col in 0..cols {
        if rank == m {
            break;
        }
        let Some(pivot_row) = (rank..m).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot_row);
        let inv = pow_mod(rows[rank][col], PRIME - 2);
        let (top, rest) = rows.split_at_mut(rank + 1);
        let pivot = &top[rank];
        for row in rest.iter_mut() {
            if row[col] == 0 {
                continue;
            }
            let f = mul_mod(row[col], inv);
            for c in col..cols {
                if pivot[c] != 0 {
                    row[c] = (row[c] + PRIME - mul_mod(f, pivot[c])) % PRIME;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Finds rational coefficients `c`, not all zero, with `Σ c_i v_i = 0`, or
/// `None` when the vectors are linearly independent.
///
/// Vectors are reduced in order against the echelon basis of the earlier
/// ones; the first vector that reduces to zero yields the dependency, with
/// coefficient one on itself and zero on everything after it.
pub(crate) fn find_dependency(vectors: &[Vec<Rational>]) -> Option<Vec<Rational>> {
    let m = vectors.len();
    struct Basis {
        pivot: usize,
        row: Vec<Rational>,
        combo: Vec<Rational>,
    }
    let mut basis: Vec<Basis> = Vec::new();
    for (k, v) in vectors.iter().enumerate() {
        let mut row = v.clone();
        let mut combo = vec![Rational::zero(); m];
        combo[k] = Rational::one();
        for b in &basis {
            if row[b.pivot].is_zero() {
                continue;
            }
            let f = &row[b.pivot] / &b.row[b.pivot];
            for (r, br) in row.iter_mut().zip(&b.row) {
                if !br.is_zero() {
                    *r -= &f * br;
                }
            }
            for (c, bc) in combo.iter_mut().zip(&b.combo) {
                if !bc.is_zero() {
                    *c -= &f * bc;
                }
            }
        }
        match row.iter().position(|r| !r.is_zero()) {
            Some(pivot) => basis.push(Basis { pivot, row, combo }),
            None => return Some(combo),
        }
    }
    None
}

/// Scales a row of rationals to integers (by the common denominator).
pub(crate) fn integer_row(values: &[Rational]) -> Vec<BigInt> {
    let d = crate::rational::common_denominator(values);
    values
        .iter()
        .map(|v| (v * Rational::from_integer(d.clone())).to_integer())
        .collect()
}
