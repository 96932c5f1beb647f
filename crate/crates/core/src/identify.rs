//! Identification by exact rank.
//!
//! A model is identified exactly when the vectors `p_≻` (the choice rule of a
//! single preference) are linearly independent, and equivalently when the
//! vectors `q_≻` (its Möbius inverse, the indicator of the preference's path
//! in the flow diagram) are. The q-route is the decision path because each
//! `q_≻` has only `n` nonzero coordinates.
//!
//! A negative answer always comes with a [`NullspaceCertificate`]: two
//! distributions with disjoint supports that induce the same rule.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::lattice::PairIndex;
use crate::limits::Limits;
use crate::linalg;
use crate::preference::{Model, Preference};
use crate::rational::Rational;
use crate::stochastic::{rule_from_distribution, PreferenceDistribution};
use crate::{Error, Result};

/// A vector over the contour-pair coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChoiceVector {
    index: Arc<PairIndex>,
    values: Vec<Rational>,
}

impl ChoiceVector {
    pub fn new(index: Arc<PairIndex>, values: Vec<Rational>) -> Result<Self> {
        if values.len() != index.len() {
            return Err(Error::WrongLength {
                expected: index.len(),
                found: values.len(),
            });
        }
        Ok(ChoiceVector { index, values })
    }

    pub fn index(&self) -> &Arc<PairIndex> {
        &self.index
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn coordinate_sum(&self) -> Rational {
        self.values.iter().sum()
    }

    pub fn nonzero_count(&self) -> usize {
        self.values.iter().filter(|v| !v.is_zero()).count()
    }
}

/// `q_≻(x, A) = 1` iff `≻ ∈ L(x, A)`.
pub fn q_vector(pref: &Preference, index: &Arc<PairIndex>) -> ChoiceVector {
    let mut values = vec![Rational::zero(); index.len()];
    for pair in pref.upper_contour_pairs() {
        values[index.position(pair)] = Rational::one();
    }
    ChoiceVector {
        index: index.clone(),
        values,
    }
}

/// `p_≻(x, A) = 1` iff `x` is the `≻`-best element of `A`.
pub fn p_vector(pref: &Preference, index: &Arc<PairIndex>) -> ChoiceVector {
    let values = index
        .pairs()
        .iter()
        .map(|pair| {
            if pref.best_in(pair.menu) == Some(pair.x) {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .collect();
    ChoiceVector {
        index: index.clone(),
        values,
    }
}

/// Exact rank over the rationals, by fraction-free elimination.
pub fn rank(vectors: &[ChoiceVector]) -> usize {
    linalg::bareiss_rank(
        vectors
            .iter()
            .map(|v| linalg::integer_row(&v.values))
            .collect(),
    )
}

/// `(n - 2)·2^(n-1) + 2`, the largest size of an identified model.
pub fn max_identified_size(n: usize) -> BigInt {
    assert!(n >= 1, "need at least one alternative");
    let pow: BigInt = BigInt::one() << (n - 1);
    (BigInt::from(n) - 2) * pow + 2
}

/// `n!` as a big integer.
pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// Fraction of all `n!` preferences an identified model can contain.
pub fn identified_fraction(n: usize) -> Rational {
    Rational::new(max_identified_size(n), factorial(n))
}

/// True iff appending a coordinate equal to one to every vector leaves the
/// rank unchanged. Requires every vector to have the same nonzero coordinate
/// sum, under which the answer is always yes.
pub fn append_one_preserves_rank(vectors: &[Vec<Rational>]) -> Result<bool> {
    let Some(first) = vectors.first() else {
        return Ok(true);
    };
    let sum: Rational = first.iter().sum();
    if sum.is_zero() {
        return Err(Error::Precondition(
            "coordinate sums must be nonzero".into(),
        ));
    }
    for (i, v) in vectors.iter().enumerate() {
        let s: Rational = v.iter().sum();
        if s != sum {
            return Err(Error::Precondition(format!(
                "vector {i} has coordinate sum {s}, expected {sum}"
            )));
        }
    }
    let plain = linalg::bareiss_rank(vectors.iter().map(|v| linalg::integer_row(v)).collect());
    let appended = linalg::bareiss_rank(
        vectors
            .iter()
            .map(|v| {
                let mut v = v.clone();
                v.push(Rational::one());
                linalg::integer_row(&v)
            })
            .collect(),
    );
    Ok(plain == appended)
}

/// Two distributions on a model with disjoint supports and identical rules,
/// built from a nonzero null combination of the q-vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NullspaceCertificate {
    /// Integer coefficients with `Σ c_≻ q_≻ = 0`, gcd one, zero entries omitted.
    pub coefficients: Vec<(Preference, Rational)>,
    /// Normalised positive part of the coefficients.
    pub first: PreferenceDistribution,
    /// Normalised negative part of the coefficients.
    pub second: PreferenceDistribution,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdentifyOptions {
    /// Confirm full rank modulo a large prime before falling back to exact
    /// elimination. Sound in one direction only: a full modular rank proves
    /// full rational rank, anything else is decided exactly.
    pub prescreen: bool,
    /// Also compute the rank of the p-vectors, which must agree.
    pub cross_check_p: bool,
    pub limits: Limits,
}

impl Default for IdentifyOptions {
    fn default() -> Self {
        IdentifyOptions {
            prescreen: true,
            cross_check_p: false,
            limits: Limits::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Identification {
    pub identified: bool,
    pub size: usize,
    /// Rank of the q-vectors.
    pub rank: usize,
    pub p_rank: Option<usize>,
    pub certificate: Option<NullspaceCertificate>,
}

pub fn is_identified(model: &Model) -> Result<Identification> {
    is_identified_with(model, &IdentifyOptions::default())
}

pub fn is_identified_with(model: &Model, options: &IdentifyOptions) -> Result<Identification> {
    options.limits.check_vectors(model.n())?;
    let index = PairIndex::new(model.n())?;
    let size = model.len();
    let q_rows: Vec<Vec<BigInt>> = model
        .preferences()
        .iter()
        .map(|p| linalg::integer_row(&q_vector(p, &index).values))
        .collect();

    let full_mod = options.prescreen && {
        let residues = q_rows
            .iter()
            .map(|r| r.iter().map(linalg::to_residue).collect())
            .collect();
        linalg::rank_mod_prime(residues) == size
    };
    let rank = if full_mod {
        size
    } else {
        linalg::bareiss_rank(q_rows)
    };
    let p_rank = options.cross_check_p.then(|| p_rank(model, &index));
    if let Some(pr) = p_rank {
        if pr != rank {
            return Err(Error::Precondition(format!(
                "p-vector rank {pr} disagrees with q-vector rank {rank}"
            )));
        }
    }
    let identified = rank == size;
    let certificate = if identified {
        None
    } else {
        Some(certificate(model, &index)?)
    };
    Ok(Identification {
        identified,
        size,
        rank,
        p_rank,
        certificate,
    })
}

/// Exact rank of the q-vectors of a model.
pub fn q_rank(model: &Model) -> Result<usize> {
    let index = PairIndex::new(model.n())?;
    Ok(linalg::bareiss_rank(
        model
            .preferences()
            .iter()
            .map(|p| linalg::integer_row(&q_vector(p, &index).values))
            .collect(),
    ))
}

fn p_rank(model: &Model, index: &Arc<PairIndex>) -> usize {
    linalg::bareiss_rank(
        model
            .preferences()
            .iter()
            .map(|p| linalg::integer_row(&p_vector(p, index).values))
            .collect(),
    )
}

/// Exact rank of the p-vectors of a model.
pub fn p_vector_rank(model: &Model) -> Result<usize> {
    Ok(p_rank(model, &PairIndex::new(model.n())?))
}

fn certificate(model: &Model, index: &Arc<PairIndex>) -> Result<NullspaceCertificate> {
    let vectors: Vec<Vec<Rational>> = model
        .preferences()
        .iter()
        .map(|p| q_vector(p, index).values)
        .collect();
    let combo = linalg::find_dependency(&vectors)
        .ok_or_else(|| Error::Precondition("rank deficient but no dependency found".into()))?;
    let ints = linalg::integer_row(&combo);
    let g = ints.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
    let ints: Vec<BigInt> = ints.into_iter().map(|v| v / &g).collect();

    let positive_total: BigInt = ints.iter().filter(|v| v.is_positive()).sum();
    let negative_total: BigInt = ints.iter().filter(|v| v.is_negative()).map(|v| -v).sum();
    let part = |keep: &dyn Fn(&BigInt) -> bool, total: &BigInt| -> Vec<Rational> {
        ints.iter()
            .map(|v| {
                if keep(v) {
                    Rational::new(v.abs(), total.clone())
                } else {
                    Rational::zero()
                }
            })
            .collect()
    };
    let first = PreferenceDistribution::new(
        model.clone(),
        part(&|v: &BigInt| v.is_positive(), &positive_total),
    )?;
    let second = PreferenceDistribution::new(
        model.clone(),
        part(&|v: &BigInt| v.is_negative(), &negative_total),
    )?;
    assert_eq!(
        rule_from_distribution(&first)?,
        rule_from_distribution(&second)?,
        "certificate distributions must induce the same rule"
    );
    let coefficients = model
        .preferences()
        .iter()
        .zip(&ints)
        .filter(|(_, c)| !c.is_zero())
        .map(|(p, c)| (p.clone(), Rational::from_integer(c.clone())))
        .collect();
    Ok(NullspaceCertificate {
        coefficients,
        first,
        second,
    })
}
