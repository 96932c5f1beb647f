//! JSON documents for models, choice data and distributions.
//!
//! Every document carries `"kind"` and `"version"`. Rationals travel as
//! strings (`"2/3"`, or exact decimals such as `"0.25"`); bare JSON integers
//! are accepted, JSON floats are not. Saving is canonical: keys sorted,
//! rationals reduced, menus and preferences in canonical order, so
//! `save(load(save(x))) == save(x)` byte for byte.
//!
//! ```json
//! {"kind": "model", "version": 1,
//!  "alternatives": ["a", "b", "c"],
//!  "preferences": [["a", "b", "c"], ["b", "c", "a"]]}
//!
//! {"kind": "choice-data", "version": 1,
//!  "alternatives": ["a", "b"],
//!  "entries": [{"menu": ["a", "b"], "probabilities": {"a": "1/3", "b": "2/3"}},
//!              {"menu": ["a"], "probabilities": {"a": "1"}},
//!              {"menu": ["b"], "probabilities": {"b": "1"}}]}
//!
//! {"kind": "distribution", "version": 1,
//!  "alternatives": ["a", "b"],
//!  "masses": {"a>b": "1/2", "b>a": "1/2"}}
//! ```
//!
//! Choice entries may give `counts` (label to integer) with `trials` instead
//! of, or alongside, `probabilities`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use crate::lattice::{Menu, PairIndex, PairTable};
use crate::preference::{ContourPair, Model, Preference, Universe};
use crate::rational::{self, Rational};
use crate::sampling::EmpiricalRule;
use crate::stochastic::{PreferenceDistribution, RandomChoiceRule};
use crate::{Error, Result};

pub const VERSION: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Model,
    ChoiceData,
    Distribution,
}

impl Kind {
    pub fn tag(self) -> &'static str {
        match self {
            Kind::Model => "model",
            Kind::ChoiceData => "choice-data",
            Kind::Distribution => "distribution",
        }
    }
}

/// Choice data as loaded: the rule, plus counts when the file had them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChoiceData {
    pub rule: RandomChoiceRule,
    pub counts: Option<(PairTable<u64>, u64)>,
}

fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| {
        Error::document(
            format!("line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })
}

fn object<'a>(v: &'a Value, field: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| Error::document(field, "expected an object"))
}

fn array<'a>(v: &'a Value, field: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::document(field, "expected an array"))
}

fn string<'a>(v: &'a Value, field: &str) -> Result<&'a str> {
    v.as_str()
        .ok_or_else(|| Error::document(field, "expected a string"))
}

fn required<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::document(key, "missing field"))
}

fn number(v: &Value, field: &str) -> Result<Rational> {
    match v {
        Value::String(s) => rational::parse(s)
            .map_err(|_| Error::document(field, format!("{s:?} is not an exact rational"))),
        Value::Number(n) if n.is_i64() || n.is_u64() => {
            let i: BigInt = n.to_string().parse().expect("JSON integer");
            Ok(Rational::from_integer(i))
        }
        Value::Number(n) => Err(Error::document(
            field,
            format!(
                "floating-point value {n} is not allowed; write it as a string such as \"1/3\""
            ),
        )),
        _ => Err(Error::document(field, "expected a rational string")),
    }
}

fn count(v: &Value, field: &str) -> Result<u64> {
    v.as_u64()
        .ok_or_else(|| Error::document(field, "expected a nonnegative integer"))
}

fn header(v: &Value, kind: Kind) -> Result<&Map<String, Value>> {
    let obj = object(v, "document")?;
    let found = string(required(obj, "kind")?, "kind")?;
    if found != kind.tag() {
        return Err(Error::document(
            "kind",
            format!("expected {:?}, found {found:?}", kind.tag()),
        ));
    }
    let version = required(obj, "version")?
        .as_u64()
        .ok_or_else(|| Error::document("version", "expected an integer"))?;
    if version != VERSION {
        return Err(Error::document(
            "version",
            format!("unsupported version {version}; expected {VERSION}"),
        ));
    }
    Ok(obj)
}

fn universe(obj: &Map<String, Value>) -> Result<Arc<Universe>> {
    let labels = array(required(obj, "alternatives")?, "alternatives")?
        .iter()
        .enumerate()
        .map(|(i, v)| string(v, &format!("alternatives[{i}]")).map(str::to_string))
        .collect::<Result<Vec<_>>>()?;
    Universe::new(labels)
        .map(Arc::new)
        .map_err(|e| Error::document("alternatives", e.to_string()))
}

fn label_list(v: &Value, field: &str) -> Result<Vec<String>> {
    array(v, field)?
        .iter()
        .enumerate()
        .map(|(i, l)| string(l, &format!("{field}[{i}]")).map(str::to_string))
        .collect()
}

fn render(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("serializable");
    s.push('\n');
    s
}

fn labels_json(universe: &Universe) -> Value {
    Value::from(universe.labels().to_vec())
}

/// Which kind of document `text` holds.
pub fn detect_kind(text: &str) -> Result<Kind> {
    let v = parse_json(text)?;
    let obj = object(&v, "document")?;
    match string(required(obj, "kind")?, "kind")? {
        "model" => Ok(Kind::Model),
        "choice-data" => Ok(Kind::ChoiceData),
        "distribution" => Ok(Kind::Distribution),
        other => Err(Error::document("kind", format!("unknown kind {other:?}"))),
    }
}

pub fn load_model(text: &str) -> Result<Model> {
    let v = parse_json(text)?;
    let obj = header(&v, Kind::Model)?;
    let universe = universe(obj)?;
    let prefs = array(required(obj, "preferences")?, "preferences")?
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let field = format!("preferences[{i}]");
            let labels = label_list(r, &field)?;
            Preference::from_labels(&universe, &labels)
                .map_err(|e| Error::document(&field, e.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    Model::new(universe, prefs).map_err(|e| Error::document("preferences", e.to_string()))
}

pub fn save_model(model: &Model) -> String {
    let u = model.universe();
    let prefs: Vec<Value> = model
        .preferences()
        .iter()
        .map(|p| Value::from(p.labels(u)))
        .collect();
    render(json!({
        "kind": Kind::Model.tag(),
        "version": VERSION,
        "alternatives": labels_json(u),
        "preferences": prefs,
    }))
}

/// Loads choice data covering every nonempty menu exactly once.
pub fn load_choice_data(text: &str) -> Result<ChoiceData> {
    let v = parse_json(text)?;
    let obj = header(&v, Kind::ChoiceData)?;
    let universe = universe(obj)?;
    let index = PairIndex::new(universe.len())
        .map_err(|e| Error::document("alternatives", e.to_string()))?;
    let entries = array(required(obj, "entries")?, "entries")?;

    let mut probs: PairTable<Option<Rational>> = PairTable::from_fn(index.clone(), |_| None);
    let mut counts: PairTable<u64> = PairTable::from_fn(index.clone(), |_| 0);
    let mut seen = vec![false; 1 << universe.len()];
    let mut trials: Option<u64> = None;
    let mut any_counts = false;

    for (i, entry) in entries.iter().enumerate() {
        let at = |k: &str| format!("entries[{i}].{k}");
        let e = object(entry, &format!("entries[{i}]"))?;
        let menu_labels = label_list(
            required(e, "menu").map_err(|_| Error::document(at("menu"), "missing field"))?,
            &at("menu"),
        )?;
        let menu = universe
            .menu_from_labels(&menu_labels)
            .map_err(|err| Error::document(at("menu"), err.to_string()))?;
        if menu.is_empty() {
            return Err(Error::document(at("menu"), "menu must be nonempty"));
        }
        if std::mem::replace(&mut seen[menu.bits() as usize], true) {
            return Err(Error::document(
                at("menu"),
                format!("menu {} appears more than once", universe.format_menu(menu)),
            ));
        }
        let member = |label: &str, field: &str| -> Result<ContourPair> {
            let x = universe
                .index_of(label)
                .ok_or_else(|| Error::document(field, format!("unknown label {label:?}")))?;
            ContourPair::new(x, menu).map_err(|_| {
                Error::document(
                    field,
                    format!("{label:?} is not in menu {}", universe.format_menu(menu)),
                )
            })
        };
        if let Some(p) = e.get("probabilities") {
            for (label, value) in object(p, &at("probabilities"))? {
                let field = format!("{}.{label}", at("probabilities"));
                let pair = member(label, &field)?;
                probs.set(pair, Some(number(value, &field)?));
            }
        }
        match (e.get("counts"), e.get("trials")) {
            (Some(c), Some(t)) => {
                any_counts = true;
                let t = count(t, &at("trials"))?;
                if t == 0 {
                    return Err(Error::document(at("trials"), "must be positive"));
                }
                if *trials.get_or_insert(t) != t {
                    return Err(Error::document(
                        at("trials"),
                        "every menu must use the same number of trials",
                    ));
                }
                let mut total = 0u64;
                for (label, value) in object(c, &at("counts"))? {
                    let field = format!("{}.{label}", at("counts"));
                    let pair = member(label, &field)?;
                    let k = count(value, &field)?;
                    total += k;
                    counts.set(pair, k);
                }
                if total != t {
                    return Err(Error::document(
                        at("counts"),
                        format!("counts sum to {total}, not trials = {t}"),
                    ));
                }
            }
            (Some(_), None) => {
                return Err(Error::document(at("trials"), "counts need a trials field"))
            }
            (None, Some(_)) => {
                return Err(Error::document(at("counts"), "trials given without counts"))
            }
            (None, None) => {
                if e.get("probabilities").is_none() {
                    return Err(Error::document(at("probabilities"), "missing field"));
                }
            }
        }
    }
    if let Some(bits) = (1..seen.len()).find(|&b| !seen[b]) {
        return Err(Error::document(
            "entries",
            format!(
                "menu {} is missing; choice data must cover every nonempty menu",
                universe.format_menu(Menu::from_bits(bits as u32))
            ),
        ));
    }
    if any_counts && entries.iter().any(|e| e.get("counts").is_none()) {
        return Err(Error::document(
            "entries",
            "either every entry or none may give counts",
        ));
    }

    let trials_value = trials.map(BigInt::from);
    let mut table = PairTable::from_fn(index.clone(), |_| Rational::default());
    for &pair in index.pairs() {
        let from_counts = trials_value
            .as_ref()
            .map(|t| Rational::new(BigInt::from(*counts.get(pair)), t.clone()));
        let value = match (probs.get(pair), from_counts) {
            (Some(p), Some(c)) if *p != c => {
                return Err(Error::document(
                    "entries",
                    format!(
                        "probability of {} disagrees with its count",
                        universe.format_pair(pair)
                    ),
                ))
            }
            (Some(p), _) => p.clone(),
            (None, Some(c)) => c,
            (None, None) => Rational::default(),
        };
        table.set(pair, value);
    }
    let rule = RandomChoiceRule::from_table(universe.clone(), table)?;
    let validation = rule.validate();
    if !validation.is_ok() {
        return Err(Error::document("entries", validation.describe(&universe)));
    }
    Ok(ChoiceData {
        rule,
        counts: trials.map(|t| (counts, t)),
    })
}

/// Entries by descending menu size, then ascending bitmask.
fn choice_entries(rule: &RandomChoiceRule, counts: Option<(&PairTable<u64>, u64)>) -> Vec<Value> {
    let u = rule.universe();
    let index = rule.table().index();
    let mut menus: Vec<Menu> = index.menus().collect();
    menus.sort_by_key(|m| (std::cmp::Reverse(m.len()), m.bits()));
    menus
        .into_iter()
        .map(|menu| {
            let mut entry = Map::new();
            entry.insert("menu".into(), Value::from(u.menu_labels(menu)));
            let probs: Map<String, Value> = menu
                .iter()
                .map(|x| {
                    let v = rule.get(ContourPair { x, menu });
                    (u.label(x).to_string(), Value::from(rational::format(v)))
                })
                .collect();
            entry.insert("probabilities".into(), Value::Object(probs));
            if let Some((counts, trials)) = counts {
                let c: Map<String, Value> = menu
                    .iter()
                    .map(|x| {
                        (
                            u.label(x).to_string(),
                            Value::from(*counts.get(ContourPair { x, menu })),
                        )
                    })
                    .collect();
                entry.insert("counts".into(), Value::Object(c));
                entry.insert("trials".into(), Value::from(trials));
            }
            Value::Object(entry)
        })
        .collect()
}

pub fn save_choice_data(rule: &RandomChoiceRule) -> String {
    render(json!({
        "kind": Kind::ChoiceData.tag(),
        "version": VERSION,
        "alternatives": labels_json(rule.universe()),
        "entries": choice_entries(rule, None),
    }))
}

pub fn save_loaded_choice_data(data: &ChoiceData) -> String {
    let counts = data.counts.as_ref().map(|(c, t)| (c, *t));
    render(json!({
        "kind": Kind::ChoiceData.tag(),
        "version": VERSION,
        "alternatives": labels_json(data.rule.universe()),
        "entries": choice_entries(&data.rule, counts),
    }))
}

pub fn save_empirical(e: &EmpiricalRule) -> String {
    render(json!({
        "kind": Kind::ChoiceData.tag(),
        "version": VERSION,
        "alternatives": labels_json(e.rule.universe()),
        "entries": choice_entries(&e.rule, Some((&e.counts, e.trials))),
    }))
}

/// Loads a distribution; its model is the set of rankings listed.
pub fn load_distribution(text: &str) -> Result<PreferenceDistribution> {
    let v = parse_json(text)?;
    let obj = header(&v, Kind::Distribution)?;
    let universe = universe(obj)?;
    let masses = object(required(obj, "masses")?, "masses")?;
    let mut pairs = Vec::with_capacity(masses.len());
    for (key, value) in masses {
        let field = format!("masses.{key}");
        let pref = Preference::parse(&universe, key)
            .map_err(|e| Error::document(&field, e.to_string()))?;
        pairs.push((pref, number(value, &field)?));
    }
    let model = Model::new(universe, pairs.iter().map(|(p, _)| p.clone()).collect())
        .map_err(|e| Error::document("masses", e.to_string()))?;
    PreferenceDistribution::from_pairs(model, pairs)
        .map_err(|e| Error::document("masses", e.to_string()))
}

/// Loads a distribution and re-expresses it on `model`, which must contain
/// every ranking the document lists.
pub fn load_distribution_on(text: &str, model: &Model) -> Result<PreferenceDistribution> {
    let nu = load_distribution(text)?;
    if nu.model().universe().labels() != model.universe().labels() {
        return Err(Error::document(
            "alternatives",
            "distribution and model use different alternatives",
        ));
    }
    let pairs = nu.iter().map(|(p, m)| (p.clone(), m.clone())).collect();
    PreferenceDistribution::from_pairs(model.clone(), pairs)
        .map_err(|e| Error::document("masses", e.to_string()))
}

/// Members with zero mass are written too, so the model survives a roundtrip.
pub fn save_distribution(nu: &PreferenceDistribution) -> String {
    let u = nu.model().universe();
    let masses: BTreeMap<String, Value> = nu
        .iter()
        .map(|(p, m)| (p.display(u).to_string(), Value::from(rational::format(m))))
        .collect();
    render(json!({
        "kind": Kind::Distribution.tag(),
        "version": VERSION,
        "alternatives": labels_json(u),
        "masses": masses,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::ratio;
    use crate::sampling::sample_empirical_rule;
    use crate::stochastic::rule_from_distribution;

    #[test]
    fn model_roundtrip() {
        let u = Arc::new(Universe::lettered(3).unwrap());
        let m = Model::all_preferences(u).unwrap();
        let text = save_model(&m);
        let back = load_model(&text).unwrap();
        assert_eq!(back.len(), 6);
        assert_eq!(back, m);
        assert_eq!(save_model(&back), text);
        assert_eq!(detect_kind(&text).unwrap(), Kind::Model);
    }

    #[test]
    fn repeated_label_is_named() {
        let text = r#"{"kind":"model","version":1,"alternatives":["a","b","c"],
            "preferences":[["a","b","c"],["a","b","a"]]}"#;
        let err = load_model(text).unwrap_err().to_string();
        assert!(err.contains("preferences[1]"), "{err}");
        assert!(err.contains("\"a\""), "{err}");
    }

    #[test]
    fn model_errors_cite_fields() {
        let cases = [
            (
                r#"{"kind":"model","version":2,"alternatives":["a"],"preferences":[["a"]]}"#,
                "version",
            ),
            (r#"{"kind":"distribution","version":1}"#, "kind"),
            (
                r#"{"kind":"model","version":1,"alternatives":["a","a"],"preferences":[]}"#,
                "alternatives",
            ),
            (
                r#"{"kind":"model","version":1,"alternatives":["a","b"],"preferences":[["a"]]}"#,
                "preferences[0]",
            ),
            (
                r#"{"kind":"model","version":1,"alternatives":["a","b"],"preferences":[["a","b"],["a","b"]]}"#,
                "preferences",
            ),
            (
                r#"{"kind":"model","version":1,"alternatives":["a","b"]}"#,
                "preferences",
            ),
        ];
        for (text, field) in cases {
            match load_model(text) {
                Err(Error::Document { field: f, .. }) => assert_eq!(f, field, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
        match load_model("{\n  \"kind\": \n}") {
            Err(Error::Document { field, .. }) => assert!(field.starts_with("line 3"), "{field}"),
            other => panic!("{other:?}"),
        }
    }

    fn two_menu_text(ab_a: &str, ab_b: &str) -> String {
        format!(
            r#"{{"kind":"choice-data","version":1,"alternatives":["a","b"],"entries":[
                {{"menu":["a","b"],"probabilities":{{"a":{ab_a},"b":{ab_b}}}}},
                {{"menu":["a"],"probabilities":{{"a":1}}}},
                {{"menu":["b"],"probabilities":{{"b":"1"}}}}]}}"#
        )
    }

    #[test]
    fn decimals_are_exact() {
        let data = load_choice_data(&two_menu_text("\"0.25\"", "\"3/4\"")).unwrap();
        let a = ContourPair::new(0, Menu::full(2)).unwrap();
        assert_eq!(data.rule.get(a), &ratio(1, 4));
        let text = save_loaded_choice_data(&data);
        assert!(text.contains("\"1/4\""));
        assert_eq!(
            save_loaded_choice_data(&load_choice_data(&text).unwrap()),
            text
        );
    }

    #[test]
    fn floats_and_bad_rules_are_rejected() {
        let err = load_choice_data(&two_menu_text("0.25", "\"3/4\"")).unwrap_err();
        assert!(
            matches!(&err, Error::Document { field, .. } if field == "entries[0].probabilities.a"),
            "{err}"
        );
        let err = load_choice_data(&two_menu_text("\"1/4\"", "\"1/4\"")).unwrap_err();
        assert!(
            matches!(&err, Error::Document { field, .. } if field == "entries"),
            "{err}"
        );
        let err = load_choice_data(&two_menu_text("\"1e-1\"", "\"1/4\"")).unwrap_err();
        assert!(err.to_string().contains("exact rational"), "{err}");
    }

    #[test]
    fn missing_and_repeated_menus() {
        let missing = r#"{"kind":"choice-data","version":1,"alternatives":["a","b"],"entries":[
            {"menu":["a","b"],"probabilities":{"a":"1"}},
            {"menu":["a"],"probabilities":{"a":"1"}}]}"#;
        let err = load_choice_data(missing).unwrap_err().to_string();
        assert!(err.contains("{b} is missing"), "{err}");
        let repeated = r#"{"kind":"choice-data","version":1,"alternatives":["a"],"entries":[
            {"menu":["a"],"probabilities":{"a":"1"}},
            {"menu":["a"],"probabilities":{"a":"1"}}]}"#;
        let err = load_choice_data(repeated).unwrap_err();
        assert!(
            matches!(&err, Error::Document { field, .. } if field == "entries[1].menu"),
            "{err}"
        );
        let outside = r#"{"kind":"choice-data","version":1,"alternatives":["a","b"],"entries":[
            {"menu":["a"],"probabilities":{"b":"1"}}]}"#;
        let err = load_choice_data(outside).unwrap_err().to_string();
        assert!(err.contains("not in menu"), "{err}");
    }

    #[test]
    fn counts_roundtrip() {
        let f = fixtures::fishburn();
        let e = sample_empirical_rule(&f.nu1, 30, 5).unwrap();
        let text = save_empirical(&e);
        let data = load_choice_data(&text).unwrap();
        assert_eq!(data.rule, e.rule);
        assert_eq!(data.counts.as_ref().unwrap().1, 30);
        assert_eq!(save_loaded_choice_data(&data), text);

        let bad = text.replacen("\"trials\": 30", "\"trials\": 31", 1);
        assert!(load_choice_data(&bad).is_err());
    }

    #[test]
    fn distribution_roundtrip() {
        let f = fixtures::fishburn();
        let text = save_distribution(&f.nu1);
        let back = load_distribution_on(&text, &f.model).unwrap();
        assert_eq!(back, f.nu1);
        assert_eq!(save_distribution(&back), text);
        let own = load_distribution(&text).unwrap();
        assert_eq!(own.model(), &f.model);

        let bad = text.replace("\"1/2\"", "\"1/3\"");
        assert!(load_distribution(&bad).is_err());
    }

    #[test]
    fn rule_roundtrip() {
        let f = fixtures::unowned();
        let nu = PreferenceDistribution::uniform(f.model.clone());
        let p = rule_from_distribution(&nu).unwrap();
        let text = save_choice_data(&p);
        let back = load_choice_data(&text).unwrap();
        assert_eq!(back.rule, p);
        assert_eq!(back.counts, None);
        assert_eq!(save_choice_data(&back.rule), text);
    }
}
