//! Random choice rules, preference distributions and the Möbius inverse.
//!
//! A distribution `ν` over a model induces the rule
//! `p(x, A) = ν{≻ : x is ≻-best in A}`. Its Möbius inverse over the subset
//! lattice, `q(x, A) = Σ_{B ⊇ A} (-1)^{|B \ A|} p(x, B)`, equals the mass
//! `ν(L(x, A))` that `ν` places on the contour set of `(x, A)`.

use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::lattice::{Menu, PairIndex, PairTable};
use crate::preference::{ContourPair, Model, Preference, Universe};
use crate::rational::{self, Rational};
use crate::{Error, Result};

/// Choice probabilities indexed by `(x, A)`.
///
/// The type carries any rational table of the right shape; [`validate`]
/// checks the probability axioms.
///
/// [`validate`]: RandomChoiceRule::validate
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomChoiceRule {
    universe: Arc<Universe>,
    table: PairTable<Rational>,
}

impl RandomChoiceRule {
    pub fn from_table(universe: Arc<Universe>, table: PairTable<Rational>) -> Result<Self> {
        if table.n() != universe.len() {
            return Err(Error::UniverseMismatch {
                expected: universe.len(),
                found: table.n(),
            });
        }
        Ok(RandomChoiceRule { universe, table })
    }

    pub fn from_fn(
        universe: Arc<Universe>,
        f: impl FnMut(ContourPair) -> Rational,
    ) -> Result<Self> {
        let index = PairIndex::new(universe.len())?;
        Ok(RandomChoiceRule {
            universe,
            table: PairTable::from_fn(index, f),
        })
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn table(&self) -> &PairTable<Rational> {
        &self.table
    }

    pub fn get(&self, pair: ContourPair) -> &Rational {
        self.table.get(pair)
    }

    pub fn set(&mut self, pair: ContourPair, value: Rational) {
        self.table.set(pair, value);
    }

    pub fn validate(&self) -> RuleValidation {
        let mut report = RuleValidation::default();
        for (pair, v) in self.table.iter() {
            if v.is_negative() {
                report.negative.push((pair, v.clone()));
            }
        }
        for menu in self.table.index().menus() {
            let sum: Rational = menu
                .iter()
                .map(|x| self.table.get(ContourPair { x, menu }))
                .sum();
            if !sum.is_one() {
                report.bad_sums.push((menu, sum));
            }
        }
        report
    }

    /// Largest absolute entrywise difference to another rule.
    pub fn max_abs_difference(&self, other: &RandomChoiceRule) -> Rational {
        self.table
            .values()
            .iter()
            .zip(other.table.values())
            .map(|(a, b)| (a - b).abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

/// Violations of the random choice rule axioms.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RuleValidation {
    pub negative: Vec<(ContourPair, Rational)>,
    /// Menus whose probabilities do not sum to one, with the actual sum.
    pub bad_sums: Vec<(Menu, Rational)>,
}

impl RuleValidation {
    pub fn is_ok(&self) -> bool {
        self.negative.is_empty() && self.bad_sums.is_empty()
    }

    pub fn describe(&self, universe: &Universe) -> String {
        let mut parts = Vec::new();
        for (pair, v) in &self.negative {
            parts.push(format!(
                "p{} = {} is negative",
                universe.format_pair(*pair),
                rational::format(v)
            ));
        }
        for (menu, sum) in &self.bad_sums {
            parts.push(format!(
                "probabilities on {} sum to {}",
                universe.format_menu(*menu),
                rational::format(sum)
            ));
        }
        parts.join("; ")
    }
}

/// The Möbius inverse `q` of a rule (entries may be negative).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MobiusInverse {
    universe: Arc<Universe>,
    table: PairTable<Rational>,
}

impl MobiusInverse {
    pub fn from_table(universe: Arc<Universe>, table: PairTable<Rational>) -> Result<Self> {
        if table.n() != universe.len() {
            return Err(Error::UniverseMismatch {
                expected: universe.len(),
                found: table.n(),
            });
        }
        Ok(MobiusInverse { universe, table })
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn table(&self) -> &PairTable<Rational> {
        &self.table
    }

    pub fn get(&self, pair: ContourPair) -> &Rational {
        self.table.get(pair)
    }

    pub fn set(&mut self, pair: ContourPair, value: Rational) {
        self.table.set(pair, value);
    }

    pub fn negative_entries(&self) -> Vec<(ContourPair, Rational)> {
        self.table
            .iter()
            .filter(|(_, v)| v.is_negative())
            .map(|(p, v)| (p, v.clone()))
            .collect()
    }

    /// Flow conservation on the probability flow diagram: for every
    /// `∅ ≠ A ≠ X` the outflow `Σ_{x∈A} q(x, A)` equals the inflow
    /// `Σ_{y∉A} q(y, A ∪ {y})`, and the outflow of `X` is one.
    pub fn flow_conservation(&self) -> FlowReport {
        let full = self.table.index().full_menu();
        let out_of_full = self.outflow(full);
        let mut violations = Vec::new();
        for menu in self.table.index().menus() {
            if menu == full {
                continue;
            }
            let inflow: Rational = Menu::from_bits(full.bits() & !menu.bits())
                .iter()
                .map(|y| {
                    self.get(ContourPair {
                        x: y,
                        menu: menu.with(y),
                    })
                    .clone()
                })
                .sum();
            if self.outflow(menu) != inflow {
                violations.push(menu);
            }
        }
        FlowReport {
            holds: violations.is_empty() && out_of_full.is_one(),
            out_of_full,
            violations,
        }
    }

    fn outflow(&self, menu: Menu) -> Rational {
        menu.iter()
            .map(|x| self.get(ContourPair { x, menu }).clone())
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowReport {
    pub holds: bool,
    /// `Σ_x q(x, X)`.
    pub out_of_full: Rational,
    /// Menus where inflow and outflow differ.
    pub violations: Vec<Menu>,
}

/// Outcome of the `q ≥ 0` check, a necessary condition for the data to come
/// from some distribution over preferences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NecessaryCondition {
    pub holds: bool,
    pub negative: Vec<(ContourPair, Rational)>,
}

pub fn check_stochastic_rationality_necessary(q: &MobiusInverse) -> NecessaryCondition {
    let negative = q.negative_entries();
    NecessaryCondition {
        holds: negative.is_empty(),
        negative,
    }
}

/// A probability distribution over the members of a model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreferenceDistribution {
    model: Model,
    masses: Vec<Rational>,
}

impl PreferenceDistribution {
    /// `masses[i]` is the mass of `model.preferences()[i]`.
    pub fn new(model: Model, masses: Vec<Rational>) -> Result<Self> {
        if masses.len() != model.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} masses for a model of {} preferences",
                masses.len(),
                model.len()
            )));
        }
        if let Some((i, m)) = masses.iter().enumerate().find(|(_, m)| m.is_negative()) {
            return Err(Error::InvalidDistribution(format!(
                "negative mass {} on {}",
                rational::format(m),
                model.preferences()[i].display(model.universe())
            )));
        }
        let total: Rational = masses.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!(
                "masses sum to {}",
                rational::format(&total)
            )));
        }
        Ok(PreferenceDistribution { model, masses })
    }

    /// Masses given per preference; preferences left out get zero.
    pub fn from_pairs(model: Model, pairs: Vec<(Preference, Rational)>) -> Result<Self> {
        let mut masses = vec![Rational::zero(); model.len()];
        let mut seen = vec![false; model.len()];
        for (pref, mass) in pairs {
            let i = model.index_of(&pref).ok_or_else(|| {
                Error::InvalidDistribution(format!(
                    "{} is not in the model",
                    pref.display(model.universe())
                ))
            })?;
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::DuplicatePreference(
                    pref.display(model.universe()).to_string(),
                ));
            }
            masses[i] = mass;
        }
        PreferenceDistribution::new(model, masses)
    }

    pub fn point_mass(model: Model, pref: &Preference) -> Result<Self> {
        PreferenceDistribution::from_pairs(model, vec![(pref.clone(), Rational::one())])
    }

    pub fn uniform(model: Model) -> Self {
        let m = Rational::new(1.into(), (model.len() as u64).into());
        let masses = vec![m; model.len()];
        PreferenceDistribution { model, masses }
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn masses(&self) -> &[Rational] {
        &self.masses
    }

    pub fn mass(&self, pref: &Preference) -> Rational {
        self.model
            .index_of(pref)
            .map_or_else(Rational::zero, |i| self.masses[i].clone())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Preference, &Rational)> {
        self.model.preferences().iter().zip(&self.masses)
    }

    pub fn support(&self) -> Vec<&Preference> {
        self.iter()
            .filter(|(_, m)| !m.is_zero())
            .map(|(p, _)| p)
            .collect()
    }

    /// `ν(L(x, A))` by direct summation over the support.
    pub fn contour_mass(&self, pair: ContourPair) -> Rational {
        self.iter()
            .filter(|(p, m)| !m.is_zero() && p.lower_contour(pair.x) == pair.menu)
            .map(|(_, m)| m.clone())
            .sum()
    }
}

/// The rule induced by arbitrary (possibly signed) weights on preferences.
pub(crate) fn rule_from_weights<'a>(
    universe: Arc<Universe>,
    weights: impl IntoIterator<Item = (&'a Preference, &'a Rational)>,
) -> Result<RandomChoiceRule> {
    let index = PairIndex::new(universe.len())?;
    let mut table = PairTable::from_fn(index.clone(), |_| Rational::zero());
    for (pref, w) in weights {
        if w.is_zero() {
            continue;
        }
        for menu in index.menus() {
            let x = pref.best_in(menu).expect("menus are nonempty");
            *table.get_mut(ContourPair { x, menu }) += w;
        }
    }
    RandomChoiceRule::from_table(universe, table)
}

/// `p_ν(x, A) = Σ_≻ ν(≻)·1{x is ≻-best in A}`.
pub fn rule_from_distribution(nu: &PreferenceDistribution) -> Result<RandomChoiceRule> {
    rule_from_weights(nu.model.universe().clone(), nu.iter())
}

/// Möbius inverse by the recursive form, largest menus first:
/// `q(x, A) = p(x, A) - Σ_{B ⊋ A} q(x, B)`.
pub fn mobius_inverse(p: &RandomChoiceRule) -> MobiusInverse {
    let index = p.table.index().clone();
    let full = index.full_menu();
    let mut q = PairTable::from_fn(index.clone(), |_| Rational::zero());
    // The coordinate order visits larger menus first, so every superset is
    // final before it is read.
    for &pair in index.pairs() {
        let mut value = p.get(pair).clone();
        for sup in pair.menu.strict_supersets(full) {
            value -= q.get(ContourPair {
                x: pair.x,
                menu: sup,
            });
        }
        q.set(pair, value);
    }
    MobiusInverse {
        universe: p.universe.clone(),
        table: q,
    }
}

/// Möbius inverse by the alternating-sum form
/// `q(x, A) = Σ_{B ⊇ A} (-1)^{|B \ A|} p(x, B)`.
pub fn mobius_inverse_closed_form(p: &RandomChoiceRule) -> MobiusInverse {
    let index = p.table.index().clone();
    let full = index.full_menu();
    let table = PairTable::from_fn(index, |pair| {
        let mut value = p.get(pair).clone();
        for sup in pair.menu.strict_supersets(full) {
            let term = p.get(ContourPair {
                x: pair.x,
                menu: sup,
            });
            if (sup.len() - pair.menu.len()) % 2 == 0 {
                value += term;
            } else {
                value -= term;
            }
        }
        value
    });
    MobiusInverse {
        universe: p.universe.clone(),
        table,
    }
}

/// Recursive inverse, cross-checked entry for entry against the closed form.
pub fn mobius_inverse_checked(p: &RandomChoiceRule) -> Result<MobiusInverse> {
    let q = mobius_inverse(p);
    let closed = mobius_inverse_closed_form(p);
    if let Some(((pair, _), _)) = q
        .table
        .iter()
        .zip(closed.table.values())
        .find(|((_, a), b)| a != b)
    {
        return Err(Error::Precondition(format!(
            "Möbius forms disagree at {}",
            p.universe.format_pair(pair)
        )));
    }
    Ok(q)
}

/// `p(x, A) = q(x, A) + Σ_{B ⊋ A} q(x, B)`; the inverse of [`mobius_inverse`].
pub fn mobius_forward(q: &MobiusInverse) -> RandomChoiceRule {
    let index = q.table.index().clone();
    let full = index.full_menu();
    let table = PairTable::from_fn(index, |pair| {
        let mut value = q.get(pair).clone();
        for sup in pair.menu.strict_supersets(full) {
            value += q.get(ContourPair {
                x: pair.x,
                menu: sup,
            });
        }
        value
    });
    RandomChoiceRule {
        universe: q.universe.clone(),
        table,
    }
}

/// Checks `q(x, A) = ν(L(x, A))` for every pair, where `q` is computed from
/// the induced rule and the right side by direct summation.
pub fn verify_contour_mass_identity(nu: &PreferenceDistribution) -> Result<bool> {
    let q = mobius_inverse(&rule_from_distribution(nu)?);
    let holds = q.table.iter().all(|(pair, v)| *v == nu.contour_mass(pair));
    Ok(holds)
}

pub fn flow_conservation_check(q: &MobiusInverse) -> FlowReport {
    q.flow_conservation()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::{int, ratio};

    fn pair(u: &Universe, x: &str, menu: &[&str]) -> ContourPair {
        ContourPair::new(u.index_of(x).unwrap(), u.menu_from_labels(menu).unwrap()).unwrap()
    }

    fn point(n: usize, ranking: &str) -> PreferenceDistribution {
        let u = Arc::new(Universe::lettered(n).unwrap());
        let p = Preference::parse(&u, ranking).unwrap();
        let model = Model::new(u, vec![p.clone()]).unwrap();
        PreferenceDistribution::point_mass(model, &p).unwrap()
    }

    #[test]
    fn point_mass_rule() {
        let nu = point(3, "a>b>c");
        let u = nu.model().universe().clone();
        let p = rule_from_distribution(&nu).unwrap();
        assert_eq!(*p.get(pair(&u, "a", &["a", "b", "c"])), int(1));
        assert_eq!(*p.get(pair(&u, "b", &["b", "c"])), int(1));
        assert_eq!(*p.get(pair(&u, "b", &["a", "b"])), int(0));
        assert!(p.validate().is_ok());
    }

    #[test]
    fn fishburn_rules_coincide() {
        let f = fixtures::fishburn();
        let u = f.model.universe().clone();
        let p1 = rule_from_distribution(&f.nu1).unwrap();
        let p2 = rule_from_distribution(&f.nu2).unwrap();
        assert_eq!(*p1.get(pair(&u, "a", &["a", "b", "c", "d"])), ratio(1, 2));
        assert_eq!(p1.table().values().len(), 32);
        assert_eq!(p1, p2);
        assert_ne!(f.nu1, f.nu2);
    }

    #[test]
    fn validation_reports_sum_and_sign_violations() {
        let u = Arc::new(Universe::new(["x", "y"]).unwrap());
        let xy = u.menu_from_labels(&["x", "y"]).unwrap();
        let mut p = RandomChoiceRule::from_fn(u.clone(), |pair| {
            if pair.menu == xy {
                ratio(3, 4)
            } else {
                int(1)
            }
        })
        .unwrap();
        let report = p.validate();
        assert_eq!(report.bad_sums, vec![(xy, ratio(3, 2))]);
        assert!(report.negative.is_empty());

        p.set(pair(&u, "x", &["x", "y"]), ratio(5, 4));
        p.set(pair(&u, "y", &["x", "y"]), ratio(-1, 4));
        let report = p.validate();
        assert!(report.bad_sums.is_empty());
        assert_eq!(
            report.negative,
            vec![(pair(&u, "y", &["x", "y"]), ratio(-1, 4))]
        );
    }

    #[test]
    fn mobius_of_point_mass_is_path_indicator() {
        let u = Arc::new(Universe::new(["x", "y"]).unwrap());
        let pref = Preference::parse(&u, "x>y").unwrap();
        let model = Model::new(u.clone(), vec![pref.clone()]).unwrap();
        let nu = PreferenceDistribution::point_mass(model, &pref).unwrap();
        let q = mobius_inverse(&rule_from_distribution(&nu).unwrap());
        assert_eq!(*q.get(pair(&u, "x", &["x", "y"])), int(1));
        assert_eq!(*q.get(pair(&u, "y", &["y"])), int(1));
        assert_eq!(*q.get(pair(&u, "x", &["x"])), int(0));
        assert_eq!(*q.get(pair(&u, "y", &["x", "y"])), int(0));
    }

    #[test]
    fn fishburn_mobius_entries() {
        // ν1 puts 1/2 on a>b>c>d, the only member of ν1's support in
        // L(a, X) and in L(c, {c,d}).
        let f = fixtures::fishburn();
        let u = f.model.universe().clone();
        let q = mobius_inverse(&rule_from_distribution(&f.nu1).unwrap());
        assert_eq!(*q.get(pair(&u, "a", &["a", "b", "c", "d"])), ratio(1, 2));
        assert_eq!(*q.get(pair(&u, "c", &["c", "d"])), ratio(1, 2));
    }

    #[test]
    fn forward_of_single_path_is_point_mass_rule() {
        let nu = point(3, "b>c>a");
        let u = nu.model().universe().clone();
        let pref = nu.model().preferences()[0].clone();
        let index = PairIndex::new(3).unwrap();
        let on_path = pref.upper_contour_pairs();
        let q = MobiusInverse::from_table(
            u,
            PairTable::from_fn(
                index,
                |p| if on_path.contains(&p) { int(1) } else { int(0) },
            ),
        )
        .unwrap();
        assert_eq!(mobius_forward(&q), rule_from_distribution(&nu).unwrap());
    }

    /// Uniform choice on three alternatives is the rule of the uniform
    /// distribution over all six orders, so `q(x, A) = |L(x, A)| / 6`:
    /// 1/3 at X, 1/6 on pairs, 1/3 on singletons.
    #[test]
    fn uniform_rule_on_three_passes_necessary_condition() {
        let u = Arc::new(Universe::lettered(3).unwrap());
        let p =
            RandomChoiceRule::from_fn(u.clone(), |pair| ratio(1, pair.menu.len() as i64)).unwrap();
        let q = mobius_inverse(&p);
        for (pair, v) in q.table().iter() {
            let expected = match pair.menu.len() {
                3 => ratio(1, 3),
                2 => ratio(1, 6),
                _ => ratio(1, 3),
            };
            assert_eq!(*v, expected, "{pair:?}");
        }
        let check = check_stochastic_rationality_necessary(&q);
        assert!(check.holds && check.negative.is_empty());
    }

    #[test]
    fn injected_negative_entry_is_reported() {
        let nu = point(3, "a>b>c");
        let u = nu.model().universe().clone();
        let mut q = mobius_inverse(&rule_from_distribution(&nu).unwrap());
        let target = pair(&u, "c", &["a", "c"]);
        q.set(target, ratio(-1, 5));
        let check = check_stochastic_rationality_necessary(&q);
        assert!(!check.holds);
        assert_eq!(check.negative, vec![(target, ratio(-1, 5))]);
    }

    #[test]
    fn contour_mass_identity_on_point_mass_and_fishburn() {
        assert!(verify_contour_mass_identity(&point(4, "d>a>c>b")).unwrap());
        assert!(verify_contour_mass_identity(&fixtures::fishburn().nu1).unwrap());
    }

    #[test]
    fn perturbed_flow_is_detected() {
        let f = fixtures::fishburn();
        let u = f.model.universe().clone();
        let mut q = mobius_inverse(&rule_from_distribution(&f.nu2).unwrap());
        assert!(q.flow_conservation().holds);
        let target = pair(&u, "b", &["a", "b", "c"]);
        let bumped = q.get(target) + ratio(1, 7);
        q.set(target, bumped);
        let report = q.flow_conservation();
        assert!(!report.holds);
        assert!(report.violations.contains(&target.menu));
        assert!(report.violations.contains(&target.head()));
    }

    #[test]
    fn closed_form_cross_check_passes() {
        let f = fixtures::fishburn();
        let p = rule_from_distribution(&f.nu1).unwrap();
        assert_eq!(mobius_inverse_checked(&p).unwrap(), mobius_inverse(&p));
    }

    #[test]
    fn distribution_validation() {
        let f = fixtures::fishburn();
        let m = f.model.clone();
        assert!(PreferenceDistribution::new(m.clone(), vec![int(1); 4]).is_err());
        assert!(
            PreferenceDistribution::new(m.clone(), vec![int(2), int(-1), int(0), int(0)]).is_err()
        );
        assert!(PreferenceDistribution::new(m, vec![int(1)]).is_err());
    }
}
