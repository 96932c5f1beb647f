//! Hard-coded worked examples.
//!
//! - `fishburn`: four orders on `{a,b,c,d}` carrying two distributions with
//!   disjoint supports and the same choice rule.
//! - `entangled`: eight orders on `{a,...,h}`, identified but not edge
//!   decomposable, with a closed-form recovery of the distribution.
//! - `unowned`: three orders on `{a,b,c,d}`, edge decomposable although one
//!   member owns no contour pair of its own.
//! - `never-single-crossing`: three orders on `{a,...,f}`, edge decomposable
//!   but not single-crossing for any order of the alternatives.

use std::sync::Arc;

use num_traits::Signed;

use crate::preference::{ContourPair, Model, Preference, Universe};
use crate::rational::{ratio, Rational};
use crate::stochastic::{MobiusInverse, PreferenceDistribution};
use crate::{Error, Result};

pub const NAMES: [&str; 4] = ["fishburn", "entangled", "unowned", "never-single-crossing"];

/// A fixture model with its members in their original numbering.
#[derive(Debug, Clone)]
pub struct Numbered {
    pub model: Model,
    /// `ordered[i]` is preference number `i + 1`.
    pub ordered: Vec<Preference>,
}

impl Numbered {
    fn new(labels: &[&str], rankings: &[&str]) -> Numbered {
        let universe = Arc::new(Universe::new(labels.iter().copied()).expect("fixture labels"));
        let ordered: Vec<Preference> = rankings
            .iter()
            .map(|r| Preference::parse(&universe, r).expect("fixture ranking"))
            .collect();
        let model = Model::new(universe, ordered.clone()).expect("fixture model");
        Numbered { model, ordered }
    }

    /// Member numbers (1-based) of `M ∩ L(x, A)`.
    pub fn contour_numbers(&self, x: &str, menu: &[&str]) -> Result<Vec<usize>> {
        let u = self.model.universe();
        let x = u
            .index_of(x)
            .ok_or_else(|| Error::UnknownLabel(x.to_string()))?;
        let pair = ContourPair::new(x, u.menu_from_labels(menu)?)?;
        Ok(self
            .ordered
            .iter()
            .enumerate()
            .filter(|(_, p)| p.lower_contour(pair.x) == pair.menu)
            .map(|(i, _)| i + 1)
            .collect())
    }
}

#[derive(Debug, Clone)]
pub struct Fishburn {
    pub model: Model,
    pub nu1: PreferenceDistribution,
    pub nu2: PreferenceDistribution,
}

pub fn fishburn() -> Fishburn {
    let Numbered { model, .. } = Numbered::new(
        &["a", "b", "c", "d"],
        &["a>b>c>d", "b>a>d>c", "a>b>d>c", "b>a>c>d"],
    );
    let u = model.universe().clone();
    let half = || ratio(1, 2);
    let p = |s: &str| Preference::parse(&u, s).expect("fixture ranking");
    let nu1 = PreferenceDistribution::from_pairs(
        model.clone(),
        vec![(p("a>b>c>d"), half()), (p("b>a>d>c"), half())],
    )
    .expect("fixture distribution");
    let nu2 = PreferenceDistribution::from_pairs(
        model.clone(),
        vec![(p("a>b>d>c"), half()), (p("b>a>c>d"), half())],
    )
    .expect("fixture distribution");
    Fishburn { model, nu1, nu2 }
}

const EIGHT: [&str; 8] = ["a", "b", "c", "d", "e", "f", "g", "h"];

/// Member 3 is `f>g>h>e>d>c>a>b`, the path drawn in the figure and the only
/// reading under which the recovery equations hold.
pub fn entangled() -> Numbered {
    Numbered::new(
        &EIGHT,
        &[
            "f>g>d>h>c>e>a>b",
            "h>g>e>f>b>d>a>c",
            "f>g>h>e>d>c>a>b",
            "h>g>f>d>c>e>b>a",
            "g>f>d>h>e>b>a>c",
            "g>h>f>d>e>b>c>a",
            "g>f>h>e>b>d>c>a",
            "g>h>e>f>d>c>b>a",
        ],
    )
}

/// Member 1 owns `(d, {c,d})` and member 2 owns `(b, X)`; member 3 owns
/// nothing on its own, yet the model peels. `M ∩ L(c,{c,d}) = {≻2, ≻3}`.
pub fn unowned() -> Numbered {
    Numbered::new(&["a", "b", "c", "d"], &["a>b>d>c", "b>a>c>d", "a>b>c>d"])
}

/// The same model with `c` and `d` exchanged in every ranking.
pub fn unowned_variant() -> Numbered {
    Numbered::new(&["a", "b", "c", "d"], &["a>b>c>d", "b>a>d>c", "a>b>d>c"])
}

pub fn never_single_crossing() -> Numbered {
    Numbered::new(
        &["a", "b", "c", "d", "e", "f"],
        &["a>b>c>d>f>e", "a>b>d>c>e>f", "b>a>c>d>e>f"],
    )
}

/// Closed-form recovery for [`entangled`]: three pair sums pin down members
/// 2, 4 and 8, and the remaining five follow one at a time.
pub fn entangled_closed_form(
    fixture: &Numbered,
    q: &MobiusInverse,
) -> Result<PreferenceDistribution> {
    let u = fixture.model.universe();
    let qv = |x: &str, menu: &[&str]| -> Result<Rational> {
        let x = u
            .index_of(x)
            .ok_or_else(|| Error::UnknownLabel(x.to_string()))?;
        Ok(q.get(ContourPair::new(x, u.menu_from_labels(menu)?)?)
            .clone())
    };
    let q_h = qv("h", &EIGHT)?;
    let q_e = qv("e", &["a", "b", "c", "d", "e", "f"])?;
    let q_b = qv("b", &["a", "b"])?;
    let two = ratio(2, 1);

    let nu2 = (&q_h + &q_e - &q_b) / &two;
    let nu4 = (&q_h - &q_e + &q_b) / &two;
    let nu8 = (-&q_h + &q_e + &q_b) / &two;

    let nu1 = qv("c", &["a", "b", "c", "e"])? - &nu4;
    let nu6 = qv("f", &["a", "b", "c", "d", "e", "f"])? - &nu4;
    let nu3 = qv("a", &["a", "b"])? - &nu1;
    let nu5 = qv("e", &["a", "b", "c", "e"])? - &nu6;
    let nu7 = qv("c", &["a", "c"])? - &nu6;

    let masses = [nu1, nu2, nu3, nu4, nu5, nu6, nu7, nu8];
    if let Some(i) = masses.iter().position(|m| m.is_negative()) {
        return Err(Error::InvalidDistribution(format!(
            "member {} gets negative mass; the data did not come from this model",
            i + 1
        )));
    }
    let pairs = fixture.ordered.iter().cloned().zip(masses).collect();
    PreferenceDistribution::from_pairs(fixture.model.clone(), pairs)
}
