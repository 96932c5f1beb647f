//! Seeded random generation: sampled choice data, models and distributions.
//!
//! Everything is driven by `ChaCha8Rng`, so a seed reproduces its output on
//! every platform.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lattice::{PairIndex, PairTable};
use crate::preference::{ContourPair, Model, Preference, Universe};
use crate::rational::{common_denominator, Rational};
use crate::stochastic::{PreferenceDistribution, RandomChoiceRule};
use crate::{Error, Result};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Choice frequencies from independent draws of `ν`, `trials` per menu.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalRule {
    pub rule: RandomChoiceRule,
    pub counts: PairTable<u64>,
    pub trials: u64,
}

/// Draws a preference from `ν` for every trial at every menu (menus in
/// ascending bitmask order) and records the chosen alternative.
pub fn sample_empirical_rule(
    nu: &PreferenceDistribution,
    trials: u64,
    seed: u64,
) -> Result<EmpiricalRule> {
    if trials == 0 {
        return Err(Error::Precondition(
            "at least one trial per menu is needed".into(),
        ));
    }
    let universe = nu.model().universe().clone();
    let index = PairIndex::new(universe.len())?;
    let sampler = Sampler::new(nu);
    let mut rng = rng(seed);
    let mut counts = PairTable::from_fn(index.clone(), |_| 0u64);
    let mut menus: Vec<_> = index.menus().collect();
    menus.sort_by_key(|m| m.bits());
    for menu in menus {
        for _ in 0..trials {
            let pref = sampler.draw(&mut rng);
            let x = pref.best_in(menu).expect("menus are nonempty");
            *counts.get_mut(ContourPair { x, menu }) += 1;
        }
    }
    let denom = BigInt::from(trials);
    let table = counts.map(|_, &c| Rational::new(BigInt::from(c), denom.clone()));
    let rule = RandomChoiceRule::from_table(universe, table)?;
    Ok(EmpiricalRule {
        rule,
        counts,
        trials,
    })
}

/// Exact inverse-CDF sampling over integer weights.
struct Sampler<'a> {
    prefs: Vec<&'a Preference>,
    cumulative: Vec<BigUint>,
    total: BigUint,
}

impl<'a> Sampler<'a> {
    fn new(nu: &'a PreferenceDistribution) -> Self {
        let d = common_denominator(nu.masses());
        let mut prefs = Vec::new();
        let mut cumulative = Vec::new();
        let mut total = BigUint::zero();
        for (p, m) in nu.iter() {
            if m.is_zero() {
                continue;
            }
            let w = (m * Rational::from_integer(d.clone())).to_integer();
            total += w.to_biguint().expect("masses are nonnegative");
            prefs.push(p);
            cumulative.push(total.clone());
        }
        Sampler {
            prefs,
            cumulative,
            total,
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> &'a Preference {
        let u = rng.gen_biguint_below(&self.total);
        let i = self.cumulative.partition_point(|c| *c <= u);
        self.prefs[i]
    }
}

pub fn random_preference(n: usize, rng: &mut impl Rng) -> Result<Preference> {
    let mut r: Vec<usize> = (0..n).collect();
    r.shuffle(rng);
    Preference::from_ranking(r)
}

/// A model of `size` distinct uniformly drawn preferences.
pub fn random_model(universe: Arc<Universe>, size: usize, rng: &mut impl Rng) -> Result<Model> {
    let n = universe.len();
    let available = (1..=n).try_fold(1usize, |acc, k| acc.checked_mul(k));
    if size == 0 || available.is_some_and(|a| size > a) {
        return Err(Error::Precondition(format!(
            "cannot draw {size} distinct preferences over {n} alternatives"
        )));
    }
    let mut prefs = std::collections::BTreeSet::new();
    while prefs.len() < size {
        prefs.insert(random_preference(n, rng)?);
    }
    Model::new(universe, prefs.into_iter().collect())
}

/// Masses proportional to integer weights drawn from `1..=max_weight`, so
/// every member has positive mass.
pub fn random_distribution(
    model: &Model,
    max_weight: u64,
    rng: &mut impl Rng,
) -> Result<PreferenceDistribution> {
    if max_weight == 0 {
        return Err(Error::Precondition("max_weight must be positive".into()));
    }
    let weights: Vec<u64> = (0..model.len())
        .map(|_| rng.gen_range(1..=max_weight))
        .collect();
    let total: u64 = weights.iter().sum();
    let masses = weights
        .into_iter()
        .map(|w| Rational::new(w.into(), total.into()))
        .collect();
    PreferenceDistribution::new(model.clone(), masses)
}

/// Like [`random_distribution`] but some members may get zero mass (at
/// least one keeps a positive mass).
pub fn random_sparse_distribution(
    model: &Model,
    max_weight: u64,
    rng: &mut impl Rng,
) -> Result<PreferenceDistribution> {
    let mut weights: Vec<u64> = (0..model.len())
        .map(|_| rng.gen_range(0..=max_weight))
        .collect();
    if weights.iter().all(|&w| w == 0) {
        let i = rng.gen_range(0..weights.len());
        weights[i] = 1;
    }
    let total: u64 = weights.iter().sum();
    let masses = weights
        .into_iter()
        .map(|w| Rational::new(w.into(), total.into()))
        .collect();
    PreferenceDistribution::new(model.clone(), masses)
}

/// Empirical frequency of a pair as an `f64`, for reporting.
pub fn frequency(e: &EmpiricalRule, pair: ContourPair) -> f64 {
    e.rule.get(pair).to_f64().unwrap_or(f64::NAN)
}
