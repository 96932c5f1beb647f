//! Edge decomposability, peeling recovery, and greedy extension.
//!
//! A model is edge decomposable when every nonempty submodel has a member
//! owning a contour pair that no other member of the submodel shares. Peeling
//! such members one at a time gives a sequential witness, and the same order
//! recovers the distribution from `q` by successive subtraction.

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};

use crate::lattice::PairIndex;
use crate::limits::Limits;
use crate::preference::{ContourPair, Model, Preference, Universe};
use crate::rational::{self, Rational};
use crate::stochastic::{
    mobius_forward, rule_from_weights, MobiusInverse, PreferenceDistribution, RandomChoiceRule,
};
use crate::{Error, Result};

/// Members in peeling order, each with a contour pair that it alone holds
/// among itself and everything after it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionWitness {
    pub steps: Vec<(Preference, ContourPair)>,
}

impl DecompositionWitness {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn describe(&self, universe: &Universe) -> Vec<String> {
        self.steps
            .iter()
            .map(|(p, pair)| {
                format!(
                    "{} via {}",
                    p.display(universe),
                    universe.format_pair(*pair)
                )
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decomposition {
    Decomposable(DecompositionWitness),
    /// The nonempty submodel in which no member owns a pair.
    Stuck(Model),
}

impl Decomposition {
    pub fn is_decomposable(&self) -> bool {
        matches!(self, Decomposition::Decomposable(_))
    }

    pub fn witness(&self) -> Option<&DecompositionWitness> {
        match self {
            Decomposition::Decomposable(w) => Some(w),
            Decomposition::Stuck(_) => None,
        }
    }
}

/// Scan direction for the greedy peel. The answer does not depend on it;
/// only the witness does.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum PeelOrder {
    #[default]
    Canonical,
    Reversed,
}

pub fn is_edge_decomposable(model: &Model) -> Decomposition {
    is_edge_decomposable_with(model, PeelOrder::Canonical)
}

/// Greedy peel: repeatedly remove the first member (in scan order) having a
/// pair of its path held by no other remaining member.
pub fn is_edge_decomposable_with(model: &Model, order: PeelOrder) -> Decomposition {
    let prefs = model.preferences();
    let paths: Vec<Vec<ContourPair>> = prefs.iter().map(|p| p.upper_contour_pairs()).collect();
    let mut counts: HashMap<ContourPair, usize> = HashMap::new();
    for path in &paths {
        for &pair in path {
            *counts.entry(pair).or_default() += 1;
        }
    }
    let mut alive = vec![true; prefs.len()];
    let mut steps = Vec::with_capacity(prefs.len());
    let scan: Vec<usize> = match order {
        PeelOrder::Canonical => (0..prefs.len()).collect(),
        PeelOrder::Reversed => (0..prefs.len()).rev().collect(),
    };
    while steps.len() < prefs.len() {
        let found = scan.iter().filter(|&&i| alive[i]).find_map(|&i| {
            let owned = match order {
                PeelOrder::Canonical => paths[i].iter().find(|p| counts[p] == 1),
                PeelOrder::Reversed => paths[i].iter().rev().find(|p| counts[p] == 1),
            };
            owned.map(|&pair| (i, pair))
        });
        let Some((i, pair)) = found else {
            let stuck = model
                .submodel((0..prefs.len()).filter(|&i| alive[i]))
                .expect("stuck set is nonempty");
            return Decomposition::Stuck(stuck);
        };
        alive[i] = false;
        for p in &paths[i] {
            *counts.get_mut(p).unwrap() -= 1;
        }
        steps.push((prefs[i].clone(), pair));
    }
    Decomposition::Decomposable(DecompositionWitness { steps })
}

/// Checks that each step's pair is held, among itself and the later steps,
/// by that step's preference alone.
pub fn validate_witness(model: &Model, witness: &DecompositionWitness) -> Result<bool> {
    let mut seen = vec![false; model.len()];
    for (p, _) in &witness.steps {
        let i = model.index_of(p).ok_or_else(|| {
            Error::WitnessCoverage(format!(
                "{} is not in the model",
                p.display(model.universe())
            ))
        })?;
        if std::mem::replace(&mut seen[i], true) {
            return Err(Error::WitnessCoverage(format!(
                "{} appears twice",
                p.display(model.universe())
            )));
        }
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(Error::WitnessCoverage(format!(
            "{} is missing",
            model.preferences()[i].display(model.universe())
        )));
    }
    for (k, (p, pair)) in witness.steps.iter().enumerate() {
        if !p.in_contour(*pair)? {
            return Ok(false);
        }
        for (later, _) in &witness.steps[k + 1..] {
            if later.in_contour(*pair)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RecoveryStatus {
    /// The recovered distribution reproduces the data exactly.
    Exact,
    /// Masses are valid and every choice probability is within tolerance.
    Approximate { max_deviation: Rational },
    /// The data cannot have come from this model.
    Failed { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecoveryReport {
    /// Masses assigned by the peel, in model order; possibly invalid.
    pub masses: Vec<(Preference, Rational)>,
    /// Nonzero entries of `q_data - q_recovered`, in coordinate order.
    pub residual: Vec<(ContourPair, Rational)>,
    /// Largest per-entry difference between the data and the recovered rule.
    pub max_deviation: Rational,
    pub status: RecoveryStatus,
    model: Model,
}

impl RecoveryReport {
    pub fn is_exact(&self) -> bool {
        self.status == RecoveryStatus::Exact
    }

    /// The recovered distribution, when the masses form one.
    pub fn distribution(&self) -> Option<PreferenceDistribution> {
        PreferenceDistribution::new(
            self.model.clone(),
            self.masses.iter().map(|(_, m)| m.clone()).collect(),
        )
        .ok()
    }
}

/// Recovers `ν` from a random choice rule. `tolerance` bounds the per-entry
/// deviation of the reconstructed rule; zero demands exact reproduction.
pub fn recover_distribution(
    model: &Model,
    rule: &RandomChoiceRule,
    tolerance: &Rational,
) -> Result<RecoveryReport> {
    let validation = rule.validate();
    if !validation.is_ok() {
        return Err(Error::InvalidRule(validation.describe(rule.universe())));
    }
    let q = crate::stochastic::mobius_inverse(rule);
    recover_with(model, &q, rule, tolerance)
}

/// As [`recover_distribution`], starting from a Möbius inverse.
pub fn recover_from_q(
    model: &Model,
    q: &MobiusInverse,
    tolerance: &Rational,
) -> Result<RecoveryReport> {
    let rule = mobius_forward(q);
    let validation = rule.validate();
    if !validation.is_ok() {
        return Err(Error::InvalidRule(validation.describe(rule.universe())));
    }
    recover_with(model, q, &rule, tolerance)
}

fn recover_with(
    model: &Model,
    q: &MobiusInverse,
    rule: &RandomChoiceRule,
    tolerance: &Rational,
) -> Result<RecoveryReport> {
    if q.universe().len() != model.n() {
        return Err(Error::UniverseMismatch {
            expected: model.n(),
            found: q.universe().len(),
        });
    }
    if tolerance.is_negative() {
        return Err(Error::Precondition("tolerance must be nonnegative".into()));
    }
    let witness = match is_edge_decomposable(model) {
        Decomposition::Decomposable(w) => w,
        Decomposition::Stuck(_) => return Err(Error::NotEdgeDecomposable),
    };

    let mut assigned: Vec<(&Preference, Rational)> = Vec::with_capacity(witness.len());
    for (pref, pair) in &witness.steps {
        let mut mass = q.get(*pair).clone();
        for (earlier, m) in &assigned {
            if earlier.lower_contour(pair.x) == pair.menu {
                mass -= m;
            }
        }
        assigned.push((pref, mass));
    }
    let mut masses: Vec<(Preference, Rational)> =
        assigned.into_iter().map(|(p, m)| (p.clone(), m)).collect();
    masses.sort_by(|a, b| a.0.cmp(&b.0));

    let index = q.table().index().clone();
    let residual = q_residual(&index, q, &masses);
    let recovered_rule =
        rule_from_weights(model.universe().clone(), masses.iter().map(|(p, m)| (p, m)))?;
    let max_deviation = rule.max_abs_difference(&recovered_rule);

    let out_of_range = masses
        .iter()
        .find(|(_, m)| m.is_negative() || *m > Rational::one());
    let status = if let Some((p, m)) = out_of_range {
        RecoveryStatus::Failed {
            reason: format!(
                "mass {} on {} is outside [0, 1]",
                rational::format(m),
                p.display(model.universe())
            ),
        }
    } else if residual.is_empty() {
        RecoveryStatus::Exact
    } else if max_deviation <= *tolerance {
        RecoveryStatus::Approximate {
            max_deviation: max_deviation.clone(),
        }
    } else {
        RecoveryStatus::Failed {
            reason: format!(
                "recovered rule deviates from the data by {}",
                rational::format(&max_deviation)
            ),
        }
    };
    Ok(RecoveryReport {
        masses,
        residual,
        max_deviation,
        status,
        model: model.clone(),
    })
}

fn q_residual(
    index: &PairIndex,
    q: &MobiusInverse,
    masses: &[(Preference, Rational)],
) -> Vec<(ContourPair, Rational)> {
    let mut explained = vec![Rational::zero(); index.len()];
    for (p, m) in masses {
        for pair in p.upper_contour_pairs() {
            explained[index.position(pair)] += m;
        }
    }
    index
        .pairs()
        .iter()
        .zip(explained)
        .filter_map(|(&pair, e)| {
            let r = q.get(pair) - e;
            (!r.is_zero()).then_some((pair, r))
        })
        .collect()
}

/// Grows an edge decomposable seed by covering every uncovered contour pair.
///
/// Pairs are visited in coordinate order. For an uncovered `(x, A)` the new
/// member ranks `X \ A` ascending, then `x`, then `A \ {x}` ascending, so it
/// lies in `L(x, A)` and owns that pair. Covering never undoes itself, so one
/// pass reaches the fixed point.
pub fn extend_edge_decomposable(seed: &Model) -> Result<Model> {
    extend_edge_decomposable_with(seed, &Limits::default())
}

pub fn extend_edge_decomposable_with(seed: &Model, limits: &Limits) -> Result<Model> {
    let n = seed.n();
    limits.check_lattice(n)?;
    if !is_edge_decomposable(seed).is_decomposable() {
        return Err(Error::NotEdgeDecomposable);
    }
    let index = PairIndex::new(n)?;
    let mut covered = vec![false; index.len()];
    for p in seed.preferences() {
        for pair in p.upper_contour_pairs() {
            covered[index.position(pair)] = true;
        }
    }
    let full = index.full_menu();
    let mut prefs = seed.preferences().to_vec();
    for k in 0..index.len() {
        if covered[k] {
            continue;
        }
        let ContourPair { x, menu } = index.pair(k);
        let above = (0..n).filter(|y| !menu.contains(*y));
        let below = menu.without(x).iter();
        let pref = Preference::from_ranking(above.chain([x]).chain(below))?;
        debug_assert_eq!(pref.lower_contour(x), menu);
        debug_assert!(menu.is_subset_of(full));
        for pair in pref.upper_contour_pairs() {
            covered[index.position(pair)] = true;
        }
        prefs.push(pref);
    }
    Model::new(seed.universe().clone(), prefs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::flowgraph::{preference_basis, spanning_tree, FlowDiagram};
    use crate::identify::{is_identified, max_identified_size};
    use crate::rational::{int, ratio};
    use crate::stochastic::{mobius_inverse, rule_from_distribution};
    use std::sync::Arc;

    fn model(labels: usize, rankings: &[&str]) -> Model {
        let u = Arc::new(Universe::lettered(labels).unwrap());
        let prefs = rankings
            .iter()
            .map(|r| Preference::parse(&u, r).unwrap())
            .collect();
        Model::new(u, prefs).unwrap()
    }

    #[test]
    fn unowned_peels() {
        let f = fixtures::unowned();
        let w = is_edge_decomposable(&f.model);
        let w = w.witness().expect("decomposable").clone();
        assert!(validate_witness(&f.model, &w).unwrap());
        // canonical scan reaches a>b>d>c first, which owns (d,{c,d})
        assert_eq!(w.steps[0].0, f.ordered[0]);
        assert_eq!(
            w.steps[0].1,
            ContourPair::new(3, Menu::from_indices([2, 3])).unwrap()
        );
        // the other route: b>a>c>d owns (b,X) outright
        let via_b = DecompositionWitness {
            steps: vec![
                (
                    f.ordered[1].clone(),
                    ContourPair::new(1, Menu::full(4)).unwrap(),
                ),
                (
                    f.ordered[0].clone(),
                    ContourPair::new(3, Menu::from_indices([2, 3])).unwrap(),
                ),
                (
                    f.ordered[2].clone(),
                    ContourPair::new(2, Menu::from_indices([2, 3])).unwrap(),
                ),
            ],
        };
        assert!(validate_witness(&f.model, &via_b).unwrap());
    }

    use crate::lattice::Menu;

    #[test]
    fn entangled_is_stuck_whole() {
        let f = fixtures::entangled();
        match is_edge_decomposable(&f.model) {
            Decomposition::Stuck(s) => assert_eq!(s, f.model),
            other => panic!("{other:?}"),
        }
        assert!(!is_edge_decomposable_with(&f.model, PeelOrder::Reversed).is_decomposable());
    }

    #[test]
    fn never_single_crossing_and_fishburn() {
        assert!(is_edge_decomposable(&fixtures::never_single_crossing().model).is_decomposable());
        assert!(!is_edge_decomposable(&fixtures::fishburn().model).is_decomposable());
    }

    #[test]
    fn witness_validation() {
        let f = fixtures::unowned();
        let w = is_edge_decomposable(&f.model).witness().unwrap().clone();
        let mut swapped = w.clone();
        swapped.steps.swap(0, 1);
        // (b, X) is not in the path of the member peeled second
        assert!(!validate_witness(&f.model, &swapped).unwrap());

        let mut short = w.clone();
        short.steps.pop();
        assert!(matches!(
            validate_witness(&f.model, &short),
            Err(Error::WitnessCoverage(_))
        ));
        let mut doubled = w.clone();
        doubled.steps[1] = doubled.steps[0].clone();
        assert!(matches!(
            validate_witness(&f.model, &doubled),
            Err(Error::WitnessCoverage(_))
        ));
    }

    #[test]
    fn shared_first_pair_swap_is_rejected() {
        // x>y>z and x>z>y share (x, X); peeling y-first pairs then swapping
        // puts a shared pair first.
        let m = model(3, &["a>b>c", "a>c>b"]);
        let pair = ContourPair::new(0, Menu::full(3)).unwrap();
        let w = DecompositionWitness {
            steps: vec![
                (Preference::parse(m.universe(), "a>b>c").unwrap(), pair),
                (
                    Preference::parse(m.universe(), "a>c>b").unwrap(),
                    ContourPair::new(2, Menu::from_indices([1, 2])).unwrap(),
                ),
            ],
        };
        assert!(!validate_witness(&m, &w).unwrap());
        let good = is_edge_decomposable(&m).witness().unwrap().clone();
        assert!(validate_witness(&m, &good).unwrap());
    }

    #[test]
    fn reversed_basis_is_a_witness() {
        for n in 2..=5 {
            let d = FlowDiagram::build(n, true).unwrap();
            let t = spanning_tree(&d).unwrap();
            let basis = preference_basis(&t, &d).unwrap();
            let u = Arc::new(Universe::numbered(n).unwrap());
            let m = Model::new(u, basis.iter().map(|b| b.preference.clone()).collect()).unwrap();
            let w = DecompositionWitness {
                steps: basis
                    .iter()
                    .rev()
                    .map(|b| (b.preference.clone(), b.witness))
                    .collect(),
            };
            assert!(validate_witness(&m, &w).unwrap(), "n = {n}");
            assert!(is_edge_decomposable(&m).is_decomposable());
        }
    }

    #[test]
    fn point_mass_recovery() {
        let f = fixtures::unowned();
        let nu = PreferenceDistribution::point_mass(f.model.clone(), &f.ordered[0]).unwrap();
        let p = rule_from_distribution(&nu).unwrap();
        let r = recover_distribution(&f.model, &p, &int(0)).unwrap();
        assert!(r.is_exact());
        assert_eq!(r.distribution().unwrap(), nu);
    }

    #[test]
    fn latin_square_recovery() {
        let m = model(3, &["a>b>c", "b>c>a", "c>a>b"]);
        let nu =
            PreferenceDistribution::new(m.clone(), vec![ratio(1, 2), ratio(1, 3), ratio(1, 6)])
                .unwrap();
        let p = rule_from_distribution(&nu).unwrap();
        let r = recover_distribution(&m, &p, &int(0)).unwrap();
        assert!(r.is_exact());
        assert!(r.residual.is_empty());
        assert_eq!(r.distribution().unwrap(), nu);
        let r = recover_from_q(&m, &mobius_inverse(&p), &int(0)).unwrap();
        assert_eq!(r.distribution().unwrap(), nu);
    }

    #[test]
    fn foreign_data_fails() {
        let m = model(4, &["a>b>c>d", "b>a>d>c", "c>d>a>b"]);
        let foreign = Preference::parse(m.universe(), "d>c>b>a").unwrap();
        let fm = Model::new(m.universe().clone(), vec![foreign.clone()]).unwrap();
        let nu = PreferenceDistribution::point_mass(fm, &foreign).unwrap();
        let p = rule_from_distribution(&nu).unwrap();
        let r = recover_distribution(&m, &p, &int(0)).unwrap();
        assert!(
            matches!(r.status, RecoveryStatus::Failed { .. }),
            "{:?}",
            r.status
        );
        assert!(!r.residual.is_empty());
    }

    #[test]
    fn tolerance_admits_small_noise() {
        let m = model(2, &["a>b", "b>a"]);
        let nu = PreferenceDistribution::uniform(m.clone());
        let mut p = rule_from_distribution(&nu).unwrap();
        let ab = ContourPair::new(0, Menu::full(2)).unwrap();
        let ba = ContourPair::new(1, Menu::full(2)).unwrap();
        p.set(ab, ratio(51, 100));
        p.set(ba, ratio(49, 100));
        // two members, two free coordinates: the peel still reproduces it
        let r = recover_distribution(&m, &p, &int(0)).unwrap();
        assert!(r.is_exact());
        assert_eq!(r.masses[0].1, ratio(51, 100));

        let m3 = model(3, &["a>b>c", "b>a>c"]);
        let nu = PreferenceDistribution::uniform(m3.clone());
        let mut p = rule_from_distribution(&nu).unwrap();
        let c_ac = ContourPair::new(2, Menu::from_indices([0, 2])).unwrap();
        let a_ac = ContourPair::new(0, Menu::from_indices([0, 2])).unwrap();
        p.set(a_ac, ratio(99, 100));
        p.set(c_ac, ratio(1, 100));
        let exact = recover_distribution(&m3, &p, &int(0)).unwrap();
        assert!(matches!(exact.status, RecoveryStatus::Failed { .. }));
        let loose = recover_distribution(&m3, &p, &ratio(1, 50)).unwrap();
        assert_eq!(
            loose.status,
            RecoveryStatus::Approximate {
                max_deviation: ratio(1, 100)
            }
        );
    }

    #[test]
    fn recovery_requires_decomposable_model() {
        let f = fixtures::fishburn();
        let p = rule_from_distribution(&f.nu1).unwrap();
        assert_eq!(
            recover_distribution(&f.model, &p, &int(0)),
            Err(Error::NotEdgeDecomposable)
        );
    }

    #[test]
    fn extension_from_single_preference() {
        let m = model(3, &["b>a>c"]);
        let e = extend_edge_decomposable(&m).unwrap();
        assert_eq!(e.len(), 6);

        let seed = model(4, &["a>b>c>d"]);
        let e = extend_edge_decomposable(&seed).unwrap();
        assert!(e.contains(&seed.preferences()[0]));
        assert!(e.len() <= 18);
        assert!(is_edge_decomposable(&e).is_decomposable());
        assert!(is_identified(&e).unwrap().identified);
    }

    #[test]
    fn extension_is_maximal_for_small_n() {
        for n in 2..=5 {
            let u = Arc::new(Universe::numbered(n).unwrap());
            let seed = Model::new(u, vec![Preference::identity(n).unwrap()]).unwrap();
            let e = extend_edge_decomposable(&seed).unwrap();
            assert!(is_edge_decomposable(&e).is_decomposable());
            assert!(e.len() as u64 <= u64::try_from(max_identified_size(n)).unwrap());
        }
    }

    #[test]
    fn extension_rejects_non_decomposable_seed() {
        assert_eq!(
            extend_edge_decomposable(&fixtures::entangled().model),
            Err(Error::NotEdgeDecomposable)
        );
    }
}
