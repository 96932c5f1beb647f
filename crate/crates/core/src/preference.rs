//! Alternatives, strict preferences and models.
//!
//! Alternatives are identified by their index `0..n`; labels only matter for
//! input and output. A [`Preference`] is a ranking of all `n` alternatives,
//! best first, and a [`Model`] is a nonempty set of distinct preferences kept
//! in lexicographic ranking order.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::lattice::Menu;
use crate::{Error, Result};

/// Hard limit imposed by the `u32` menu bitmask.
pub const MAX_ALTERNATIVES: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Universe {
    labels: Vec<String>,
}

impl Universe {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::EmptyUniverse);
        }
        if labels.len() > MAX_ALTERNATIVES {
            return Err(Error::TooManyAlternatives {
                n: labels.len(),
                max: MAX_ALTERNATIVES,
            });
        }
        let mut seen = HashSet::new();
        for label in &labels {
            if label.is_empty()
                || label.contains(['>', ','])
                || label.chars().any(char::is_whitespace)
            {
                return Err(Error::InvalidLabel(label.clone()));
            }
            if !seen.insert(label.as_str()) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(Universe { labels })
    }

    /// Alternatives labelled `1..=n`.
    pub fn numbered(n: usize) -> Result<Self> {
        Universe::new((1..=n).map(|i| i.to_string()))
    }

    /// Alternatives labelled `a`, `b`, ... (at most 26).
    pub fn lettered(n: usize) -> Result<Self> {
        if n > 26 {
            return Err(Error::TooManyAlternatives { n, max: 26 });
        }
        Universe::new((0..n).map(|i| char::from(b'a' + i as u8).to_string()))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn full_menu(&self) -> Menu {
        Menu::full(self.len())
    }

    /// Parses a menu given as labels; order is irrelevant, duplicates are not.
    pub fn menu_from_labels<S: AsRef<str>>(&self, labels: &[S]) -> Result<Menu> {
        let mut menu = Menu::EMPTY;
        for label in labels {
            let label = label.as_ref();
            let x = self
                .index_of(label)
                .ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
            if menu.contains(x) {
                return Err(Error::DuplicateLabel(label.to_string()));
            }
            menu = menu.with(x);
        }
        Ok(menu)
    }

    pub fn menu_labels(&self, menu: Menu) -> Vec<&str> {
        menu.iter().map(|x| self.label(x)).collect()
    }

    pub fn format_menu(&self, menu: Menu) -> String {
        format!("{{{}}}", self.menu_labels(menu).join(","))
    }

    pub fn format_pair(&self, pair: ContourPair) -> String {
        format!("({}, {})", self.label(pair.x), self.format_menu(pair.menu))
    }
}

/// An alternative together with a menu containing it.
///
/// The same index names two things: the set `L(x, A)` of preferences whose
/// weak lower contour set at `x` is exactly `A`, and the flow-diagram edge
/// `A -> A \ {x}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ContourPair {
    pub x: usize,
    pub menu: Menu,
}

impl ContourPair {
    pub fn new(x: usize, menu: Menu) -> Result<Self> {
        if !menu.contains(x) {
            return Err(Error::NotInMenu {
                x,
                menu: menu.bits(),
            });
        }
        Ok(ContourPair { x, menu })
    }

    /// Target node of the corresponding flow-diagram edge.
    pub fn head(&self) -> Menu {
        self.menu.without(self.x)
    }
}

/// A strict linear order, stored best first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Preference {
    ranking: Vec<u8>,
}

impl Preference {
    pub fn from_ranking<I: IntoIterator<Item = usize>>(ranking: I) -> Result<Self> {
        let ranking: Vec<usize> = ranking.into_iter().collect();
        let n = ranking.len();
        if n == 0 {
            return Err(Error::EmptyUniverse);
        }
        if n > MAX_ALTERNATIVES {
            return Err(Error::TooManyAlternatives {
                n,
                max: MAX_ALTERNATIVES,
            });
        }
        let mut seen = Menu::EMPTY;
        for &x in &ranking {
            if x >= n {
                return Err(Error::IndexOutOfRange { index: x, n });
            }
            if seen.contains(x) {
                return Err(Error::Precondition(format!(
                    "alternative {x} appears twice in the ranking"
                )));
            }
            seen = seen.with(x);
        }
        Ok(Preference {
            ranking: ranking.into_iter().map(|x| x as u8).collect(),
        })
    }

    pub fn from_labels<S: AsRef<str>>(universe: &Universe, labels: &[S]) -> Result<Self> {
        if labels.len() != universe.len() {
            return Err(Error::WrongLength {
                expected: universe.len(),
                found: labels.len(),
            });
        }
        let mut seen = Menu::EMPTY;
        let mut ranking = Vec::with_capacity(labels.len());
        for label in labels {
            let label = label.as_ref();
            let x = universe
                .index_of(label)
                .ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
            if seen.contains(x) {
                return Err(Error::DuplicateLabel(label.to_string()));
            }
            seen = seen.with(x);
            ranking.push(x as u8);
        }
        Ok(Preference { ranking })
    }

    /// Parses a `>`-separated ranking such as `a>b>c`.
    pub fn parse(universe: &Universe, text: &str) -> Result<Self> {
        let labels: Vec<&str> = text.split('>').map(str::trim).collect();
        Preference::from_labels(universe, &labels)
    }

    /// The order `0 > 1 > ... > n-1`.
    pub fn identity(n: usize) -> Result<Self> {
        Preference::from_ranking(0..n)
    }

    pub fn len(&self) -> usize {
        self.ranking.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranking.is_empty()
    }

    pub fn ranking(&self) -> impl ExactSizeIterator<Item = usize> + DoubleEndedIterator + '_ {
        self.ranking.iter().map(|&x| x as usize)
    }

    /// Alternative at rank `i` (0 is best).
    pub fn at(&self, i: usize) -> usize {
        self.ranking[i] as usize
    }

    pub fn position(&self, x: usize) -> usize {
        self.ranking
            .iter()
            .position(|&y| y as usize == x)
            .expect("alternative outside the universe")
    }

    pub fn prefers(&self, x: usize, y: usize) -> bool {
        self.position(x) < self.position(y)
    }

    /// Best alternative of a nonempty menu.
    pub fn best_in(&self, menu: Menu) -> Option<usize> {
        self.ranking().find(|&x| menu.contains(x))
    }

    /// The set of alternatives ranked at or below `x`.
    pub fn lower_contour(&self, x: usize) -> Menu {
        let pos = self.position(x);
        self.ranking[pos..]
            .iter()
            .fold(Menu::EMPTY, |m, &y| m.with(y as usize))
    }

    fn check_universe(&self, n: usize) -> Result<()> {
        if self.len() != n {
            return Err(Error::UniverseMismatch {
                expected: self.len(),
                found: n,
            });
        }
        Ok(())
    }

    /// Membership in `L(x, A)`: `x` is best in `A` and everything outside
    /// `A` is ranked above `x`.
    pub fn in_contour(&self, pair: ContourPair) -> Result<bool> {
        let n = self.len();
        if pair.x >= n || !pair.menu.is_subset_of(Menu::full(n)) {
            return Err(Error::UniverseMismatch {
                expected: n,
                found: pair
                    .menu
                    .highest()
                    .map_or(pair.x + 1, |h| h.max(pair.x) + 1),
            });
        }
        Ok(self.lower_contour(pair.x) == pair.menu)
    }

    /// The `n` pairs whose contour sets contain this preference, from the
    /// full menu down to the singleton of the worst alternative.
    pub fn upper_contour_pairs(&self) -> Vec<ContourPair> {
        let mut menu = Menu::full(self.len());
        let mut pairs = Vec::with_capacity(self.len());
        for x in self.ranking() {
            pairs.push(ContourPair { x, menu });
            menu = menu.without(x);
        }
        pairs
    }

    pub fn reverse(&self) -> Preference {
        let mut ranking = self.ranking.clone();
        ranking.reverse();
        Preference { ranking }
    }

    /// Renders the ranking as `a>b>c`.
    pub fn display<'a>(&'a self, universe: &'a Universe) -> DisplayPreference<'a> {
        DisplayPreference {
            pref: self,
            universe,
        }
    }

    pub fn labels<'a>(&'a self, universe: &'a Universe) -> Vec<&'a str> {
        self.ranking().map(|x| universe.label(x)).collect()
    }
}

pub struct DisplayPreference<'a> {
    pref: &'a Preference,
    universe: &'a Universe,
}

impl fmt::Display for DisplayPreference<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.pref.ranking().enumerate() {
            if i > 0 {
                f.write_str(">")?;
            }
            f.write_str(self.universe.label(x))?;
        }
        Ok(())
    }
}

/// A nonempty set of distinct preferences, sorted by ranking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    universe: Arc<Universe>,
    prefs: Vec<Preference>,
}

impl Model {
    pub fn new(universe: Arc<Universe>, prefs: Vec<Preference>) -> Result<Self> {
        if prefs.is_empty() {
            return Err(Error::EmptyModel);
        }
        for p in &prefs {
            p.check_universe(universe.len())?;
        }
        let mut prefs = prefs;
        prefs.sort();
        if let Some(w) = prefs.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicatePreference(
                w[0].display(&universe).to_string(),
            ));
        }
        Ok(Model { universe, prefs })
    }

    /// Builds a model from rankings written as label lists.
    pub fn from_label_rankings<S: AsRef<str>>(
        universe: Arc<Universe>,
        rankings: &[Vec<S>],
    ) -> Result<Self> {
        let prefs = rankings
            .iter()
            .map(|r| Preference::from_labels(&universe, r))
            .collect::<Result<Vec<_>>>()?;
        Model::new(universe, prefs)
    }

    /// Every preference over `n` alternatives.
    pub fn all_preferences(universe: Arc<Universe>) -> Result<Self> {
        let n = universe.len();
        if n > 9 {
            return Err(Error::CapExceeded {
                n,
                cap: 9,
                what: "enumerating every preference",
            });
        }
        let prefs = permutations(n)
            .into_iter()
            .map(Preference::from_ranking)
            .collect::<Result<Vec<_>>>()?;
        Model::new(universe, prefs)
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn n(&self) -> usize {
        self.universe.len()
    }

    pub fn preferences(&self) -> &[Preference] {
        &self.prefs
    }

    pub fn len(&self) -> usize {
        self.prefs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prefs.is_empty()
    }

    pub fn index_of(&self, pref: &Preference) -> Option<usize> {
        self.prefs.binary_search(pref).ok()
    }

    pub fn contains(&self, pref: &Preference) -> bool {
        self.index_of(pref).is_some()
    }

    /// `M ∩ L(x, A)`, in canonical order.
    pub fn contour_members(&self, pair: ContourPair) -> Vec<&Preference> {
        self.prefs
            .iter()
            .filter(|p| p.lower_contour(pair.x) == pair.menu)
            .collect()
    }

    /// The submodel on the given indices, or `None` when it would be empty.
    pub fn submodel(&self, indices: impl IntoIterator<Item = usize>) -> Option<Model> {
        let prefs: Vec<Preference> = indices.into_iter().map(|i| self.prefs[i].clone()).collect();
        Model::new(self.universe.clone(), prefs).ok()
    }

    pub fn with_preference(&self, pref: Preference) -> Result<Model> {
        let mut prefs = self.prefs.clone();
        prefs.push(pref);
        Model::new(self.universe.clone(), prefs)
    }
}

/// True iff no two members are reverses of each other.
///
/// This is equivalent to every pair of members agreeing on at least one
/// binary comparison.
pub fn check_minimal_mutual_agreement(model: &Model) -> Result<bool> {
    if model.n() < 2 {
        return Err(Error::TooFewAlternatives {
            n: model.n(),
            min: 2,
        });
    }
    Ok(model
        .preferences()
        .iter()
        .all(|p| !model.contains(&p.reverse())))
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut current: Vec<usize> = (0..n).collect();
    let mut out = vec![current.clone()];
    // Standard next-permutation walk.
    loop {
        let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).unwrap();
        current.swap(i - 1, j);
        current[i..].reverse();
        out.push(current.clone());
    }
}
