//! Single-crossing and Latin-square model families.

use std::sync::Arc;

use num_traits::Signed;

use crate::decompose::{recover_distribution, RecoveryStatus};
use crate::lattice::Menu;
use crate::preference::{permutations, ContourPair, Model, Preference, Universe};
use crate::rational::Rational;
use crate::stochastic::{mobius_inverse, MobiusInverse, PreferenceDistribution, RandomChoiceRule};
use crate::{Error, Result};

/// Largest universe for which [`scrum_order_exists`] tries every order.
pub const MAX_ORDER_SEARCH: usize = 8;

/// An exogenous linear order `⊳` on the alternatives, first is greatest.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExogenousOrder(pub Preference);

impl ExogenousOrder {
    pub fn identity(n: usize) -> Result<Self> {
        Ok(ExogenousOrder(Preference::identity(n)?))
    }

    pub fn parse(universe: &Universe, text: &str) -> Result<Self> {
        Ok(ExogenousOrder(Preference::parse(universe, text)?))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `x ⊳ y`.
    pub fn above(&self, x: usize, y: usize) -> bool {
        self.0.prefers(x, y)
    }

    pub fn preference(&self) -> &Preference {
        &self.0
    }

    /// Pairs `(x, y)` with `x ⊳ y`, by position in the order.
    fn ordered_pairs(&self) -> Vec<(usize, usize)> {
        let r: Vec<usize> = self.0.ranking().collect();
        let mut out = Vec::with_capacity(r.len() * r.len().saturating_sub(1) / 2);
        for i in 0..r.len() {
            for j in i + 1..r.len() {
                out.push((r[i], r[j]));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CrossingFailure {
    /// `x ⊳ y`, member `i` ranks `x` above `y`, but later member `j` does not.
    Reverts {
        x: usize,
        y: usize,
        i: usize,
        j: usize,
    },
    /// The members agreeing with `⊳` on `first` and on `second` are not
    /// nested, so no enumeration can make both suffixes.
    NotNested {
        first: (usize, usize),
        second: (usize, usize),
    },
    /// The enumeration is not a permutation of the model.
    NotAnEnumeration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SingleCrossing {
    Yes(Vec<Preference>),
    No(CrossingFailure),
}

impl SingleCrossing {
    pub fn holds(&self) -> bool {
        matches!(self, SingleCrossing::Yes(_))
    }
}

fn check_same_universe(model: &Model, order: &ExogenousOrder) -> Result<()> {
    if order.len() != model.n() {
        return Err(Error::UniverseMismatch {
            expected: model.n(),
            found: order.len(),
        });
    }
    Ok(())
}

/// Verifies a given enumeration, or decides whether one exists.
pub fn check_single_crossing(
    model: &Model,
    order: &ExogenousOrder,
    enumeration: Option<&[Preference]>,
) -> Result<SingleCrossing> {
    check_same_universe(model, order)?;
    match enumeration {
        Some(e) => {
            let mut sorted = e.to_vec();
            sorted.sort();
            if sorted != model.preferences() {
                return Ok(SingleCrossing::No(CrossingFailure::NotAnEnumeration));
            }
            Ok(verify_enumeration(e, order))
        }
        None => Ok(find_enumeration(model, order)),
    }
}

fn verify_enumeration(enumeration: &[Preference], order: &ExogenousOrder) -> SingleCrossing {
    for (x, y) in order.ordered_pairs() {
        if let Some(i) = enumeration.iter().position(|p| p.prefers(x, y)) {
            if let Some(j) = (i + 1..enumeration.len()).find(|&j| !enumeration[j].prefers(x, y)) {
                return SingleCrossing::No(CrossingFailure::Reverts { x, y, i, j });
            }
        }
    }
    SingleCrossing::Yes(enumeration.to_vec())
}

/// Each set `S_xy = {≻ : x ≻ y}` (for `x ⊳ y`) must be a suffix of the
/// enumeration, which is possible iff the sets form a chain. Members in more
/// sets go later.
fn find_enumeration(model: &Model, order: &ExogenousOrder) -> SingleCrossing {
    let prefs = model.preferences();
    let pairs = order.ordered_pairs();
    let sets: Vec<Vec<bool>> = pairs
        .iter()
        .map(|&(x, y)| prefs.iter().map(|p| p.prefers(x, y)).collect())
        .collect();
    for a in 0..sets.len() {
        for b in a + 1..sets.len() {
            let a_in_b = sets[a].iter().zip(&sets[b]).all(|(s, t)| !s || *t);
            let b_in_a = sets[a].iter().zip(&sets[b]).all(|(s, t)| *s || !t);
            if !a_in_b && !b_in_a {
                return SingleCrossing::No(CrossingFailure::NotNested {
                    first: pairs[a],
                    second: pairs[b],
                });
            }
        }
    }
    let depth = |i: usize| sets.iter().filter(|s| s[i]).count();
    let mut idx: Vec<usize> = (0..prefs.len()).collect();
    idx.sort_by_key(|&i| (depth(i), i));
    let enumeration: Vec<Preference> = idx.into_iter().map(|i| prefs[i].clone()).collect();
    let verdict = verify_enumeration(&enumeration, order);
    debug_assert!(verdict.holds());
    verdict
}

/// Tries every exogenous order. Returns the first (lexicographically) that
/// admits an enumeration, with the enumeration.
pub fn scrum_order_exists(model: &Model) -> Result<Option<(ExogenousOrder, Vec<Preference>)>> {
    let n = model.n();
    if n > MAX_ORDER_SEARCH {
        return Err(Error::CapExceeded {
            n,
            cap: MAX_ORDER_SEARCH,
            what: "searching every exogenous order",
        });
    }
    for r in permutations(n) {
        let order = ExogenousOrder(Preference::from_ranking(r)?);
        if let SingleCrossing::Yes(e) = find_enumeration(model, &order) {
            return Ok(Some((order, e)));
        }
    }
    Ok(None)
}

/// A largest single-crossing model for `order`, with its enumeration.
///
/// Starts at the reverse of `order`; for each alternative in turn, from the
/// top of `order` down, moves it up one place at a time until it reaches its
/// place in `order`. Every swap flips one pair into agreement with `order`,
/// so there are `n(n-1)/2 + 1` members.
pub fn max_scrum_model(
    universe: Arc<Universe>,
    order: &ExogenousOrder,
) -> Result<(Model, Vec<Preference>)> {
    let n = order.len();
    if n < 2 {
        return Err(Error::TooFewAlternatives { n, min: 2 });
    }
    if universe.len() != n {
        return Err(Error::UniverseMismatch {
            expected: universe.len(),
            found: n,
        });
    }
    let target: Vec<usize> = order.0.ranking().collect();
    let mut current: Vec<usize> = target.iter().rev().copied().collect();
    let mut enumeration = vec![Preference::from_ranking(current.clone())?];
    for (slot, &x) in target.iter().enumerate() {
        let mut pos = current.iter().position(|&y| y == x).unwrap();
        while pos > slot {
            current.swap(pos - 1, pos);
            pos -= 1;
            enumeration.push(Preference::from_ranking(current.clone())?);
        }
    }
    let model = Model::new(universe, enumeration.clone())?;
    Ok((model, enumeration))
}

/// The `n` cyclic rotations of `order`.
pub fn latin_square(universe: Arc<Universe>, order: &ExogenousOrder) -> Result<Model> {
    let n = order.len();
    if universe.len() != n {
        return Err(Error::UniverseMismatch {
            expected: universe.len(),
            found: n,
        });
    }
    let r: Vec<usize> = order.0.ranking().collect();
    let prefs = (0..n)
        .map(|m| Preference::from_ranking(r[m..].iter().chain(&r[..m]).copied()))
        .collect::<Result<Vec<_>>>()?;
    Model::new(universe, prefs)
}

/// True iff `pref` is a cyclic rotation of `order`.
pub fn respects(pref: &Preference, order: &ExogenousOrder) -> Result<bool> {
    let n = order.len();
    if pref.len() != n {
        return Err(Error::UniverseMismatch {
            expected: n,
            found: pref.len(),
        });
    }
    if n == 0 {
        return Ok(true);
    }
    let shift = order.0.position(pref.at(0));
    Ok((0..n).all(|i| pref.at(i) == order.0.at((shift + i) % n)))
}

/// Menus strictly between `∅` and `X` with more than one positive entry of `q`.
pub fn menus_with_split_flow(q: &MobiusInverse) -> Vec<Menu> {
    let index = q.table().index();
    let full = index.full_menu();
    index
        .menus()
        .filter(|&m| m != full)
        .filter(|&m| {
            m.iter()
                .filter(|&x| q.get(ContourPair { x, menu: m }).is_positive())
                .count()
                > 1
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CarumRecovery {
    /// Identified up to rotation; this is the member traced from the data.
    pub order: ExogenousOrder,
    pub model: Model,
    pub distribution: PreferenceDistribution,
}

/// Recovers a Latin-square model and its distribution from choice data.
pub fn carum_recover(rule: &RandomChoiceRule) -> Result<CarumRecovery> {
    let validation = rule.validate();
    if !validation.is_ok() {
        return Err(Error::InvalidRule(validation.describe(rule.universe())));
    }
    let universe = rule.universe().clone();
    let q = mobius_inverse(rule);
    let bad = menus_with_split_flow(&q);
    if let Some(&m) = bad.first() {
        return Err(Error::NotCarum(format!(
            "menu {} has more than one alternative with positive flow",
            universe.format_menu(m)
        )));
    }
    let full = universe.full_menu();
    let mut ranking = Vec::with_capacity(universe.len());
    let mut menu = full;
    while !menu.is_empty() {
        let Some(z) = menu
            .iter()
            .find(|&z| q.get(ContourPair { x: z, menu }).is_positive())
        else {
            return Err(Error::NotCarum(format!(
                "no positive flow leaves {}",
                universe.format_menu(menu)
            )));
        };
        ranking.push(z);
        menu = menu.without(z);
    }
    let order = ExogenousOrder(Preference::from_ranking(ranking)?);
    let model = latin_square(universe.clone(), &order)?;
    let report = recover_distribution(&model, rule, &Rational::default())?;
    match (&report.status, report.distribution()) {
        (RecoveryStatus::Exact, Some(distribution)) => Ok(CarumRecovery {
            order,
            model,
            distribution,
        }),
        (RecoveryStatus::Failed { reason }, _) => Err(Error::NotCarum(reason.clone())),
        _ => Err(Error::NotCarum(
            "the Latin square does not reproduce the data".into(),
        )),
    }
}
