//! `rumid`: command-line front end.
//!
//! Exit codes: 0 for an affirmative answer or success, 1 for a negative
//! determination (not identified, not decomposable, not single-crossing,
//! not Latin-square data, failed recovery), 2 for input errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use rumid::decompose::{
    extend_edge_decomposable_with, is_edge_decomposable, recover_distribution, Decomposition,
    RecoveryStatus,
};
use rumid::documents::{self, ChoiceData};
use rumid::families::{
    carum_recover, check_single_crossing, latin_square, max_scrum_model, menus_with_split_flow,
    scrum_order_exists, ExogenousOrder, SingleCrossing,
};
use rumid::flowgraph::{preference_basis, spanning_tree, FlowDiagram};
use rumid::identify::{factorial, is_identified_with, max_identified_size, IdentifyOptions};
use rumid::limits::Limits;
use rumid::rational::{self, Rational};
use rumid::sampling::sample_empirical_rule;
use rumid::stochastic::{
    check_stochastic_rationality_necessary, mobius_inverse, rule_from_distribution,
    PreferenceDistribution,
};
use rumid::{fixtures, Model, Preference, Universe};

#[derive(Parser)]
#[command(
    name = "rumid",
    version,
    about = "Exact identification of random utility models"
)]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Largest identified model size for n alternatives.
    Bound {
        #[arg(short)]
        n: usize,
    },
    /// Decide whether a model is identified.
    CheckIdentified {
        #[arg(long)]
        model: PathBuf,
        /// Show two distributions with the same choice rule when not identified.
        #[arg(long)]
        certificate: bool,
    },
    /// Decide whether a model is edge decomposable.
    CheckEdgeDecomposable {
        #[arg(long)]
        model: PathBuf,
        /// Show the peeling order.
        #[arg(long)]
        witness: bool,
    },
    /// Write a maximal identified model built from a spanning tree.
    MaxBasis {
        #[arg(short)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Grow an edge decomposable model until every contour pair is covered.
    Extend {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Möbius inverse of choice data.
    Mobius {
        #[arg(long)]
        data: PathBuf,
        /// Also check flow conservation at every menu.
        #[arg(long)]
        check_flow: bool,
    },
    /// Recover the distribution over an edge decomposable model.
    Recover {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Largest accepted per-entry deviation, e.g. 1/100 or 0.01.
        #[arg(long, default_value = "0")]
        tolerance: String,
    },
    /// Choice data induced by a distribution, exact or sampled.
    Generate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Draws per menu; omit for the exact rule.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write a largest single-crossing model.
    ScrumMax {
        #[arg(short)]
        n: usize,
        /// Exogenous order as comma-separated labels, greatest first.
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<String>>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decide whether a model is single-crossing.
    CheckSingleCrossing {
        #[arg(long)]
        model: PathBuf,
        /// Exogenous order as comma-separated labels; defaults to the listed
        /// order of the alternatives.
        #[arg(long, value_delimiter = ',', conflicts_with = "search_order")]
        order: Option<Vec<String>>,
        /// Try every exogenous order.
        #[arg(long)]
        search_order: bool,
    },
    /// Write the Latin-square model of an order.
    LatinSquare {
        #[arg(long, value_delimiter = ',', required = true)]
        order: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recover a Latin-square model and its distribution from choice data.
    CarumRecover {
        #[arg(long)]
        data: PathBuf,
        /// Write the recovered distribution here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write one of the built-in worked examples.
    Fixtures {
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(fixtures::NAMES))]
        name: String,
        #[arg(long)]
        out: PathBuf,
        /// For `fishburn`: write the first distribution here.
        #[arg(long)]
        nu1: Option<PathBuf>,
        /// For `fishburn`: write the second distribution here.
        #[arg(long)]
        nu2: Option<PathBuf>,
    },
}

/// A finished command: text and JSON renderings plus the exit status.
struct Report {
    text: String,
    json: Value,
    affirmative: bool,
}

impl Report {
    fn ok(text: String, json: Value) -> Self {
        Report {
            text,
            json,
            affirmative: true,
        }
    }
}

type Outcome = Result<Report, String>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(report) => {
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report.json).expect("json")
                );
            } else {
                print!("{}", report.text);
            }
            if report.affirmative {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Outcome {
    let limits = Limits::from_env().map_err(|e| e.to_string())?;
    match command {
        Command::Bound { n } => bound(n),
        Command::CheckIdentified { model, certificate } => {
            check_identified(&read_model(&model)?, certificate, &limits)
        }
        Command::CheckEdgeDecomposable { model, witness } => {
            check_decomposable(&read_model(&model)?, witness)
        }
        Command::MaxBasis { n, out } => max_basis(n, &out, &limits),
        Command::Extend { model, out } => extend(&read_model(&model)?, &out, &limits),
        Command::Mobius { data, check_flow } => mobius(&read_data(&data, &limits)?, check_flow),
        Command::Recover {
            model,
            data,
            tolerance,
        } => {
            let tolerance = rational::parse(&tolerance)
                .map_err(|_| format!("--tolerance: {tolerance:?} is not an exact rational"))?;
            recover(
                &read_model(&model)?,
                &read_data(&data, &limits)?,
                &tolerance,
            )
        }
        Command::Generate {
            model,
            dist,
            out,
            samples,
            seed,
        } => generate(&read_model(&model)?, &dist, &out, samples, seed, &limits),
        Command::ScrumMax { n, order, out } => scrum_max(n, order, &out),
        Command::CheckSingleCrossing {
            model,
            order,
            search_order,
        } => single_crossing(&read_model(&model)?, order, search_order),
        Command::LatinSquare { order, out } => latin(&order, &out),
        Command::CarumRecover { data, out } => carum(&read_data(&data, &limits)?, out.as_deref()),
        Command::Fixtures {
            name,
            out,
            nu1,
            nu2,
        } => write_fixture(&name, &out, nu1.as_deref(), nu2.as_deref()),
    }
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<(), String> {
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn read_model(path: &Path) -> Result<Model, String> {
    documents::load_model(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn read_data(path: &Path, limits: &Limits) -> Result<ChoiceData, String> {
    let data = documents::load_choice_data(&read(path)?)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    limits
        .check_lattice(data.rule.universe().len())
        .map_err(|e| e.to_string())?;
    Ok(data)
}

fn fmt(r: &Rational) -> String {
    rational::format(r)
}

fn pref_text(p: &Preference, u: &Universe) -> String {
    p.display(u).to_string()
}

fn distribution_json(nu: &PreferenceDistribution) -> Value {
    let u = nu.model().universe();
    Value::Object(
        nu.iter()
            .map(|(p, m)| (pref_text(p, u), Value::from(fmt(m))))
            .collect(),
    )
}

fn distribution_text(nu: &PreferenceDistribution, indent: &str) -> String {
    let u = nu.model().universe();
    nu.iter()
        .map(|(p, m)| format!("{indent}{}  {}\n", pref_text(p, u), fmt(m)))
        .collect()
}

fn bound(n: usize) -> Outcome {
    if n == 0 {
        return Err("-n: need at least one alternative".into());
    }
    let b = max_identified_size(n);
    let f = factorial(n);
    let ratio = Rational::new(b.clone(), f.clone());
    let text = format!(
        "n = {n}\nlargest identified model: {b}\npreferences: {f}\nfraction: {b}/{f} = {} (~{})\n",
        fmt(&ratio),
        rational::approx(&ratio, 6)
    );
    let json = json!({
        "n": n,
        "bound": b.to_string(),
        "preferences": f.to_string(),
        "ratio": format!("{b}/{f}"),
        "reduced_ratio": fmt(&ratio),
    });
    Ok(Report::ok(text, json))
}

fn check_identified(model: &Model, show_certificate: bool, limits: &Limits) -> Outcome {
    let options = IdentifyOptions {
        limits: *limits,
        ..Default::default()
    };
    let id = is_identified_with(model, &options).map_err(|e| e.to_string())?;
    let mut text = format!(
        "{}: {} preferences, rank {}\n",
        if id.identified {
            "identified"
        } else {
            "not identified"
        },
        id.size,
        id.rank
    );
    let mut json = json!({
        "identified": id.identified,
        "size": id.size,
        "rank": id.rank,
    });
    if let (Some(c), true) = (&id.certificate, show_certificate) {
        let u = model.universe();
        text.push_str("two distributions with the same choice rule:\n  first\n");
        text.push_str(&distribution_text(&c.first, "    "));
        text.push_str("  second\n");
        text.push_str(&distribution_text(&c.second, "    "));
        json["certificate"] = json!({
            "coefficients": c.coefficients.iter()
                .map(|(p, v)| json!([pref_text(p, u), fmt(v)]))
                .collect::<Vec<_>>(),
            "first": distribution_json(&c.first),
            "second": distribution_json(&c.second),
        });
    }
    Ok(Report {
        text,
        json,
        affirmative: id.identified,
    })
}

fn check_decomposable(model: &Model, show_witness: bool) -> Outcome {
    let u = model.universe();
    match is_edge_decomposable(model) {
        Decomposition::Decomposable(w) => {
            let mut text = format!("edge decomposable: {} preferences\n", model.len());
            let steps: Vec<Value> = w
                .steps
                .iter()
                .map(|(p, pair)| json!({"preference": pref_text(p, u), "pair": u.format_pair(*pair)}))
                .collect();
            if show_witness {
                text.push_str("peeling order:\n");
                for line in w.describe(u) {
                    text.push_str(&format!("  {line}\n"));
                }
            }
            let mut json = json!({"edge_decomposable": true, "size": model.len()});
            if show_witness {
                json["witness"] = Value::from(steps);
            }
            Ok(Report::ok(text, json))
        }
        Decomposition::Stuck(stuck) => {
            let mut text = format!(
                "not edge decomposable: {} of {} preferences share every contour pair\n",
                stuck.len(),
                model.len()
            );
            for p in stuck.preferences() {
                text.push_str(&format!("  {}\n", pref_text(p, u)));
            }
            let json = json!({
                "edge_decomposable": false,
                "size": model.len(),
                "stuck": stuck.preferences().iter().map(|p| pref_text(p, u)).collect::<Vec<_>>(),
            });
            Ok(Report {
                text,
                json,
                affirmative: false,
            })
        }
    }
}

fn max_basis(n: usize, out: &Path, limits: &Limits) -> Outcome {
    if n == 0 {
        return Err("-n: need at least one alternative".into());
    }
    let diagram = FlowDiagram::build_with(n, true, limits).map_err(|e| e.to_string())?;
    let tree = spanning_tree(&diagram).map_err(|e| e.to_string())?;
    let basis = preference_basis(&tree, &diagram).map_err(|e| e.to_string())?;
    let universe = Arc::new(Universe::numbered(n).map_err(|e| e.to_string())?);
    let model = Model::new(
        universe.clone(),
        basis.iter().map(|b| b.preference.clone()).collect(),
    )
    .map_err(|e| e.to_string())?;
    write(out, &documents::save_model(&model))?;
    let text = format!(
        "wrote {} preferences over {n} alternatives to {}\n",
        model.len(),
        out.display()
    );
    let json = json!({
        "n": n,
        "size": model.len(),
        "out": out.display().to_string(),
        "emission_order": basis.iter().map(|b| json!({
            "preference": pref_text(&b.preference, &universe),
            "pair": universe.format_pair(b.witness),
        })).collect::<Vec<_>>(),
    });
    Ok(Report::ok(text, json))
}

fn extend(seed: &Model, out: &Path, limits: &Limits) -> Outcome {
    let model = match extend_edge_decomposable_with(seed, limits) {
        Ok(m) => m,
        Err(rumid::Error::NotEdgeDecomposable) => {
            return Ok(Report {
                text: "seed model is not edge decomposable\n".into(),
                json: json!({"edge_decomposable": false}),
                affirmative: false,
            })
        }
        Err(e) => return Err(e.to_string()),
    };
    write(out, &documents::save_model(&model))?;
    let text = format!(
        "extended {} preferences to {}; wrote {}\n",
        seed.len(),
        model.len(),
        out.display()
    );
    let json =
        json!({"seed_size": seed.len(), "size": model.len(), "out": out.display().to_string()});
    Ok(Report::ok(text, json))
}

fn mobius(data: &ChoiceData, check_flow: bool) -> Outcome {
    let u = data.rule.universe();
    let q = mobius_inverse(&data.rule);
    let necessary = check_stochastic_rationality_necessary(&q);
    let mut text = String::from("q(x, A):\n");
    let mut entries = Vec::new();
    for (pair, v) in q.table().iter() {
        text.push_str(&format!("  {}  {}\n", u.format_pair(pair), fmt(v)));
        entries.push(json!([u.format_pair(pair), fmt(v)]));
    }
    if necessary.holds {
        text.push_str("all entries nonnegative\n");
    } else {
        text.push_str(&format!(
            "{} negative entries: no distribution over preferences generates this data\n",
            necessary.negative.len()
        ));
    }
    let mut json = json!({"q": entries, "nonnegative": necessary.holds});
    let mut affirmative = necessary.holds;
    if check_flow {
        let flow = q.flow_conservation();
        text.push_str(&format!(
            "flow out of X: {}\nflow conservation: {}\n",
            fmt(&flow.out_of_full),
            if flow.holds { "holds" } else { "violated" }
        ));
        for m in &flow.violations {
            text.push_str(&format!("  violated at {}\n", u.format_menu(*m)));
        }
        json["flow"] = json!({
            "holds": flow.holds,
            "out_of_full": fmt(&flow.out_of_full),
            "violations": flow.violations.iter().map(|m| u.format_menu(*m)).collect::<Vec<_>>(),
        });
        affirmative &= flow.holds;
    }
    Ok(Report {
        text,
        json,
        affirmative,
    })
}

fn recover(model: &Model, data: &ChoiceData, tolerance: &Rational) -> Outcome {
    if data.rule.universe().labels() != model.universe().labels() {
        return Err("model and data use different alternatives".into());
    }
    let report = match recover_distribution(model, &data.rule, tolerance) {
        Ok(r) => r,
        Err(rumid::Error::NotEdgeDecomposable) => {
            return Ok(Report {
                text: "model is not edge decomposable; use check-identified instead\n".into(),
                json: json!({"status": "failed", "reason": "model is not edge decomposable"}),
                affirmative: false,
            })
        }
        Err(e) => return Err(e.to_string()),
    };
    let u = model.universe();
    let (status, reason) = match &report.status {
        RecoveryStatus::Exact => ("exact".to_string(), None),
        RecoveryStatus::Approximate { max_deviation } => (
            format!("approximate (max deviation {})", fmt(max_deviation)),
            None,
        ),
        RecoveryStatus::Failed { reason } => ("failed".to_string(), Some(reason.clone())),
    };
    let mut text = format!("recovery: {status}\n");
    if let Some(r) = &reason {
        text.push_str(&format!("  {r}\n"));
    }
    for (p, m) in &report.masses {
        text.push_str(&format!("  {}  {}\n", pref_text(p, u), fmt(m)));
    }
    if !report.residual.is_empty() {
        text.push_str(&format!("residual at {} pairs\n", report.residual.len()));
    }
    let json = json!({
        "status": match report.status {
            RecoveryStatus::Exact => "exact",
            RecoveryStatus::Approximate { .. } => "approximate",
            RecoveryStatus::Failed { .. } => "failed",
        },
        "reason": reason,
        "max_deviation": fmt(&report.max_deviation),
        "masses": Value::Object(report.masses.iter().map(|(p, m)| (pref_text(p, u), Value::from(fmt(m)))).collect()),
        "residual": report.residual.iter().map(|(pair, v)| json!([u.format_pair(*pair), fmt(v)])).collect::<Vec<_>>(),
    });
    Ok(Report {
        text,
        json,
        affirmative: !matches!(report.status, RecoveryStatus::Failed { .. }),
    })
}

fn generate(
    model: &Model,
    dist: &Path,
    out: &Path,
    samples: Option<u64>,
    seed: u64,
    limits: &Limits,
) -> Outcome {
    limits.check_lattice(model.n()).map_err(|e| e.to_string())?;
    let nu = documents::load_distribution_on(&read(dist)?, model)
        .map_err(|e| format!("{}: {e}", dist.display()))?;
    let (doc, kind) = match samples {
        None => {
            let rule = rule_from_distribution(&nu).map_err(|e| e.to_string())?;
            (documents::save_choice_data(&rule), "exact".to_string())
        }
        Some(k) => {
            let e = sample_empirical_rule(&nu, k, seed).map_err(|e| e.to_string())?;
            (
                documents::save_empirical(&e),
                format!("{k} draws per menu, seed {seed}"),
            )
        }
    };
    write(out, &doc)?;
    let text = format!("wrote choice data ({kind}) to {}\n", out.display());
    let json = json!({"out": out.display().to_string(), "samples": samples, "seed": seed});
    Ok(Report::ok(text, json))
}

fn order_from_labels(labels: &[String]) -> Result<(Arc<Universe>, ExogenousOrder), String> {
    let universe =
        Arc::new(Universe::new(labels.iter().cloned()).map_err(|e| format!("--order: {e}"))?);
    let order = ExogenousOrder::identity(universe.len()).map_err(|e| e.to_string())?;
    Ok((universe, order))
}

fn scrum_max(n: usize, order: Option<Vec<String>>, out: &Path) -> Outcome {
    let (universe, order) = match order {
        Some(labels) => {
            if labels.len() != n {
                return Err(format!(
                    "--order lists {} alternatives but -n is {n}",
                    labels.len()
                ));
            }
            order_from_labels(&labels)?
        }
        None => (
            Arc::new(Universe::numbered(n).map_err(|e| e.to_string())?),
            ExogenousOrder::identity(n).map_err(|e| e.to_string())?,
        ),
    };
    let (model, enumeration) =
        max_scrum_model(universe.clone(), &order).map_err(|e| e.to_string())?;
    write(out, &documents::save_model(&model))?;
    let mut text = format!(
        "wrote {} preferences to {}\nenumeration:\n",
        model.len(),
        out.display()
    );
    for p in &enumeration {
        text.push_str(&format!("  {}\n", pref_text(p, &universe)));
    }
    let json = json!({
        "size": model.len(),
        "out": out.display().to_string(),
        "enumeration": enumeration.iter().map(|p| pref_text(p, &universe)).collect::<Vec<_>>(),
    });
    Ok(Report::ok(text, json))
}

fn single_crossing(model: &Model, order: Option<Vec<String>>, search: bool) -> Outcome {
    let u = model.universe();
    let found = if search {
        scrum_order_exists(model).map_err(|e| e.to_string())?
    } else {
        let order = match order {
            Some(labels) => ExogenousOrder(
                Preference::from_labels(u, &labels).map_err(|e| format!("--order: {e}"))?,
            ),
            None => ExogenousOrder::identity(model.n()).map_err(|e| e.to_string())?,
        };
        match check_single_crossing(model, &order, None).map_err(|e| e.to_string())? {
            SingleCrossing::Yes(e) => Some((order, e)),
            SingleCrossing::No(_) => None,
        }
    };
    match found {
        Some((order, enumeration)) => {
            let mut text = format!(
                "single-crossing with respect to {}\nenumeration:\n",
                pref_text(&order.0, u)
            );
            for p in &enumeration {
                text.push_str(&format!("  {}\n", pref_text(p, u)));
            }
            let json = json!({
                "single_crossing": true,
                "order": pref_text(&order.0, u),
                "enumeration": enumeration.iter().map(|p| pref_text(p, u)).collect::<Vec<_>>(),
            });
            Ok(Report::ok(text, json))
        }
        None => {
            let text = if search {
                "not single-crossing for any order of the alternatives\n".to_string()
            } else {
                "not single-crossing for this order\n".to_string()
            };
            Ok(Report {
                text,
                json: json!({"single_crossing": false}),
                affirmative: false,
            })
        }
    }
}

fn latin(labels: &[String], out: &Path) -> Outcome {
    let (universe, order) = order_from_labels(labels)?;
    let model = latin_square(universe.clone(), &order).map_err(|e| e.to_string())?;
    write(out, &documents::save_model(&model))?;
    let text = format!("wrote {} rotations to {}\n", model.len(), out.display());
    let json = json!({
        "size": model.len(),
        "out": out.display().to_string(),
        "preferences": model.preferences().iter().map(|p| pref_text(p, &universe)).collect::<Vec<_>>(),
    });
    Ok(Report::ok(text, json))
}

fn carum(data: &ChoiceData, out: Option<&Path>) -> Outcome {
    let u = data.rule.universe();
    match carum_recover(&data.rule) {
        Ok(r) => {
            if let Some(out) = out {
                write(out, &documents::save_distribution(&r.distribution))?;
            }
            let mut text = format!(
                "Latin square of {} (up to rotation)\n",
                pref_text(&r.order.0, u)
            );
            text.push_str(&distribution_text(&r.distribution, "  "));
            let json = json!({
                "carum": true,
                "order": pref_text(&r.order.0, u),
                "distribution": distribution_json(&r.distribution),
            });
            Ok(Report::ok(text, json))
        }
        Err(rumid::Error::NotCarum(reason)) => {
            let menus = menus_with_split_flow(&mobius_inverse(&data.rule));
            Ok(Report {
                text: format!("not Latin-square data: {reason}\n"),
                json: json!({
                    "carum": false,
                    "reason": reason,
                    "menus_with_two_positive_flows": menus.iter().map(|m| u.format_menu(*m)).collect::<Vec<_>>(),
                }),
                affirmative: false,
            })
        }
        Err(e) => Err(e.to_string()),
    }
}

fn write_fixture(name: &str, out: &Path, nu1: Option<&Path>, nu2: Option<&Path>) -> Outcome {
    let model = match name {
        "fishburn" => {
            let f = fixtures::fishburn();
            if let Some(p) = nu1 {
                write(p, &documents::save_distribution(&f.nu1))?;
            }
            if let Some(p) = nu2 {
                write(p, &documents::save_distribution(&f.nu2))?;
            }
            f.model
        }
        other => {
            if nu1.is_some() || nu2.is_some() {
                return Err("--nu1/--nu2 apply only to the fishburn fixture".into());
            }
            match other {
                "entangled" => fixtures::entangled().model,
                "unowned" => fixtures::unowned().model,
                "never-single-crossing" => fixtures::never_single_crossing().model,
                _ => return Err(format!("--name: unknown fixture {other:?}")),
            }
        }
    };
    write(out, &documents::save_model(&model))?;
    let text = format!(
        "wrote {name} ({} preferences) to {}\n",
        model.len(),
        out.display()
    );
    let json = json!({"name": name, "size": model.len(), "out": out.display().to_string()});
    Ok(Report::ok(text, json))
}
