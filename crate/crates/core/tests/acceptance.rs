//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs under `cargo test` (custom harness).

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand_chacha::ChaCha8Rng;

use rumid::decompose::{
    is_edge_decomposable, recover_distribution, validate_witness, Decomposition,
    DecompositionWitness,
};
use rumid::families::{
    carum_recover, check_single_crossing, latin_square, max_scrum_model, menus_with_split_flow,
    scrum_order_exists, ExogenousOrder,
};
use rumid::fixtures;
use rumid::flowgraph::{preference_basis, spanning_tree, FlowDiagram};
use rumid::identify::{factorial, is_identified, max_identified_size, p_vector_rank, q_rank};
use rumid::preference::permutations;
use rumid::rational::{int, ratio, Rational};
use rumid::sampling::{
    random_distribution, random_model, random_preference, random_sparse_distribution, rng,
};
use rumid::stochastic::{
    mobius_forward, mobius_inverse, mobius_inverse_closed_form, rule_from_distribution,
    verify_contour_mass_identity, PreferenceDistribution,
};
use rumid::{Model, Universe};

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn numbered(n: usize) -> Arc<Universe> {
    Arc::new(Universe::numbered(n).unwrap())
}

/// `(n - 2)·2^(n-1) + 2`, in signed arithmetic so that `n = 1` works.
fn closed_form_bound(n: usize) -> BigInt {
    (BigInt::from(n as i64) - 2) * (BigInt::one() << (n - 1)) + 2
}

fn c1_bound_agreement() -> Check {
    for n in 1..=10 {
        let graph = FlowDiagram::build(n, true)
            .map_err(|e| e.to_string())?
            .cyclomatic_number()
            .map_err(|e| e.to_string())?;
        let formula = closed_form_bound(n);
        ensure!(
            BigInt::from(graph) == formula && max_identified_size(n) == formula,
            "n = {n}: graph {graph}, formula {formula}, library {}",
            max_identified_size(n)
        );
    }
    Ok("E - N + 1 = (n-2)2^(n-1)+2 for n = 1..10".into())
}

fn c2_intro_ratios() -> Check {
    let b5 = max_identified_size(5);
    ensure!(b5 == BigInt::from(50), "bound(5) = {b5}");
    let r5 = Rational::new(b5, factorial(5));
    ensure!(r5 < ratio(1, 2), "50/120 is not below 1/2");
    let b9 = max_identified_size(9);
    ensure!(b9 == BigInt::from(1794), "bound(9) = {b9}");
    let r9 = Rational::new(b9, factorial(9));
    ensure!(r9 == ratio(1794, 362880), "ratio {r9}");
    ensure!(r9 < ratio(5, 1000), "1794/362880 is not below 0.005");
    Ok("bound(5)/5! = 50/120 < 1/2, bound(9)/9! = 1794/362880 < 1/200".into())
}

fn c3_maximal_basis() -> Check {
    for n in 2..=6 {
        let d = FlowDiagram::build(n, true).map_err(|e| e.to_string())?;
        let tree = spanning_tree(&d).map_err(|e| e.to_string())?;
        let basis = preference_basis(&tree, &d).map_err(|e| e.to_string())?;
        let bound = max_identified_size(n);
        ensure!(
            BigInt::from(basis.len()) == bound,
            "n = {n}: {} emitted",
            basis.len()
        );
        let model = Model::new(
            numbered(n),
            basis.iter().map(|b| b.preference.clone()).collect(),
        )
        .map_err(|e| format!("n = {n}: {e}"))?;
        ensure!(model.len() == basis.len(), "n = {n}: duplicates");
        let rank = q_rank(&model).map_err(|e| e.to_string())?;
        ensure!(BigInt::from(rank) == bound, "n = {n}: rank {rank}");
        ensure!(
            is_identified(&model).map_err(|e| e.to_string())?.identified,
            "n = {n}: not identified"
        );
        let witness = DecompositionWitness {
            steps: basis
                .iter()
                .rev()
                .map(|b| (b.preference.clone(), b.witness))
                .collect(),
        };
        ensure!(
            validate_witness(&model, &witness).map_err(|e| e.to_string())?,
            "n = {n}: reversed emission order is not a witness"
        );
    }
    Ok("n = 2..6 bases have bound(n) distinct members, full rank, valid witnesses".into())
}

fn c4_full_rank_of_all() -> Check {
    for n in 3..=5 {
        let all = Model::all_preferences(numbered(n)).map_err(|e| e.to_string())?;
        let rank = q_rank(&all).map_err(|e| e.to_string())?;
        ensure!(
            BigInt::from(rank) == max_identified_size(n),
            "n = {n}: rank {rank}"
        );
    }
    Ok("rank of all n! q-vectors = 6, 18, 50 for n = 3, 4, 5".into())
}

fn c5_fishburn() -> Check {
    let f = fixtures::fishburn();
    let p1 = rule_from_distribution(&f.nu1).map_err(|e| e.to_string())?;
    let p2 = rule_from_distribution(&f.nu2).map_err(|e| e.to_string())?;
    let pairs = p1.table().values().len();
    ensure!(pairs == 32, "{pairs} pairs");
    ensure!(p1.table().values() == p2.table().values(), "rules differ");
    ensure!(f.nu1 != f.nu2, "distributions coincide");
    let id = is_identified(&f.model).map_err(|e| e.to_string())?;
    ensure!(!id.identified, "identified");
    let c = id.certificate.ok_or("no certificate")?;
    for (p, m) in c.first.iter() {
        ensure!(
            m.is_zero() || c.second.mass(p).is_zero(),
            "supports overlap"
        );
    }
    let r1 = rule_from_distribution(&c.first).map_err(|e| e.to_string())?;
    let r2 = rule_from_distribution(&c.second).map_err(|e| e.to_string())?;
    ensure!(r1 == r2, "certificate rules differ");
    ensure!(
        !is_edge_decomposable(&f.model).is_decomposable(),
        "edge decomposable"
    );
    Ok("equal rules on 32 pairs, not identified, disjoint certificate, not decomposable".into())
}

fn c6_entangled() -> Check {
    let f = fixtures::entangled();
    match is_edge_decomposable(&f.model) {
        Decomposition::Stuck(s) => ensure!(s == f.model, "stuck set has {} members", s.len()),
        Decomposition::Decomposable(_) => return Err("edge decomposable".into()),
    }
    let id = is_identified(&f.model).map_err(|e| e.to_string())?;
    ensure!(id.identified && id.rank == 8, "rank {}", id.rank);
    let mut r = rng(4);
    for trial in 0..100 {
        let nu = random_distribution(&f.model, 1000, &mut r).map_err(|e| e.to_string())?;
        let q = mobius_inverse(&rule_from_distribution(&nu).map_err(|e| e.to_string())?);
        let back =
            fixtures::entangled_closed_form(&f, &q).map_err(|e| format!("trial {trial}: {e}"))?;
        ensure!(back == nu, "trial {trial}: closed form differs");
    }
    Ok("stuck on all 8, rank 8, closed form exact on 100 random distributions".into())
}

fn c7_unowned() -> Check {
    let f = fixtures::unowned();
    let x = ["a", "b", "c", "d"];
    let checks: [(&str, &[&str], Vec<usize>); 4] = [
        ("a", &x, vec![1, 3]),
        ("b", &["b", "c", "d"], vec![1, 3]),
        ("c", &["c", "d"], vec![2, 3]),
        ("d", &["d"], vec![2, 3]),
    ];
    for (y, menu, expected) in checks {
        let got = f.contour_numbers(y, menu).map_err(|e| e.to_string())?;
        ensure!(
            got == expected,
            "M ∩ L({y}, {menu:?}) = {got:?}, expected {expected:?}"
        );
    }
    ensure!(
        is_edge_decomposable(&f.model).is_decomposable(),
        "not edge decomposable"
    );
    Ok("four intersection lists match; edge decomposable".into())
}

fn c8_never_single_crossing() -> Check {
    let f = fixtures::never_single_crossing();
    ensure!(permutations(6).len() == 720, "order count");
    let found = scrum_order_exists(&f.model).map_err(|e| e.to_string())?;
    ensure!(
        found.is_none(),
        "single-crossing for {:?}",
        found.map(|(o, _)| o)
    );
    ensure!(
        is_edge_decomposable(&f.model).is_decomposable(),
        "not edge decomposable"
    );
    Ok("no order among 720 admits an enumeration; edge decomposable".into())
}

fn c9_scrum() -> Check {
    for n in 2..=8 {
        let order = ExogenousOrder::identity(n).map_err(|e| e.to_string())?;
        let (m, e) = max_scrum_model(numbered(n), &order).map_err(|e| e.to_string())?;
        ensure!(m.len() == n * (n - 1) / 2 + 1, "n = {n}: size {}", m.len());
        ensure!(
            check_single_crossing(&m, &order, Some(&e))
                .map_err(|e| e.to_string())?
                .holds(),
            "n = {n}: enumeration fails"
        );
        ensure!(
            is_edge_decomposable(&m).is_decomposable(),
            "n = {n}: not decomposable"
        );
        ensure!(
            is_identified(&m).map_err(|e| e.to_string())?.identified,
            "n = {n}: not identified"
        );
    }
    Ok("sizes C(n,2)+1 for n = 2..8; single-crossing, decomposable, identified".into())
}

fn c10_carum() -> Check {
    let mut r = rng(10);
    for n in 3..=7 {
        for trial in 0..50 {
            let order = ExogenousOrder(random_preference(n, &mut r).map_err(|e| e.to_string())?);
            let square = latin_square(numbered(n), &order).map_err(|e| e.to_string())?;
            let nu = if trial % 2 == 0 {
                random_distribution(&square, 60, &mut r)
            } else {
                random_sparse_distribution(&square, 60, &mut r)
            }
            .map_err(|e| e.to_string())?;
            let p = rule_from_distribution(&nu).map_err(|e| e.to_string())?;
            let bad = menus_with_split_flow(&mobius_inverse(&p));
            ensure!(
                bad.is_empty(),
                "n = {n}, trial {trial}: two positive flows at {bad:?}"
            );
            let rec = carum_recover(&p).map_err(|e| format!("n = {n}, trial {trial}: {e}"))?;
            ensure!(rec.model == square, "n = {n}, trial {trial}: wrong square");
            ensure!(
                rec.distribution == nu,
                "n = {n}, trial {trial}: wrong distribution"
            );
        }
    }
    let f = fixtures::fishburn();
    let p = rule_from_distribution(&f.nu1).map_err(|e| e.to_string())?;
    ensure!(carum_recover(&p).is_err(), "Fishburn data accepted");
    Ok("250 Latin-square recoveries exact, at most one positive flow per proper menu, Fishburn rejected".into())
}

/// Draws a random model and distribution at `n` with at most 10 members.
fn instance(n: usize, r: &mut ChaCha8Rng) -> (Model, PreferenceDistribution) {
    use rand::Rng;
    let size = r.gen_range(1..=10);
    let m = random_model(numbered(n), size, r).unwrap();
    let nu = random_sparse_distribution(&m, 20, r).unwrap();
    (m, nu)
}

fn c11_properties() -> Check {
    let mut r = rng(11);
    let mut decomposable_seen = [0usize; 2];
    for (slot, n) in [4usize, 5].into_iter().enumerate() {
        for trial in 0..100 {
            let (m, nu) = instance(n, &mut r);
            let at = || format!("n = {n}, trial {trial}");
            ensure!(
                verify_contour_mass_identity(&nu).map_err(|e| e.to_string())?,
                "{}: q differs from contour mass",
                at()
            );
            let p = rule_from_distribution(&nu).map_err(|e| e.to_string())?;
            let q = mobius_inverse(&p);
            ensure!(
                q == mobius_inverse_closed_form(&p),
                "{}: Möbius forms differ",
                at()
            );
            ensure!(
                mobius_forward(&q) == p,
                "{}: forward(inverse(p)) != p",
                at()
            );
            ensure!(
                mobius_inverse(&mobius_forward(&q)) == q,
                "{}: inverse(forward(q)) != q",
                at()
            );
            let flow = q.flow_conservation();
            ensure!(
                flow.holds && flow.out_of_full == int(1),
                "{}: flow conservation",
                at()
            );
            let (pr, qr) = (
                p_vector_rank(&m).map_err(|e| e.to_string())?,
                q_rank(&m).map_err(|e| e.to_string())?,
            );
            ensure!(pr == qr, "{}: rank p {pr} != rank q {qr}", at());
            if is_edge_decomposable(&m).is_decomposable() {
                decomposable_seen[slot] += 1;
                ensure!(
                    is_identified(&m).map_err(|e| e.to_string())?.identified,
                    "{}: decomposable but not identified",
                    at()
                );
                let rep =
                    recover_distribution(&m, &p, &Rational::zero()).map_err(|e| e.to_string())?;
                ensure!(
                    rep.distribution().as_ref() == Some(&nu),
                    "{}: recovery roundtrip",
                    at()
                );
            }
        }
    }
    // Top up so each n has at least 100 decomposable instances for the last
    // two properties, using submodels of the maximal basis.
    for (slot, n) in [4usize, 5].into_iter().enumerate() {
        let d = FlowDiagram::build(n, true).unwrap();
        let basis = preference_basis(&spanning_tree(&d).unwrap(), &d).unwrap();
        let full = Model::new(
            numbered(n),
            basis.into_iter().map(|b| b.preference).collect(),
        )
        .unwrap();
        let mut trial = 0;
        while decomposable_seen[slot] < 100 {
            use rand::seq::index::sample;
            use rand::Rng;
            let k = r.gen_range(1..=full.len());
            let m = full.submodel(sample(&mut r, full.len(), k)).unwrap();
            ensure!(
                is_edge_decomposable(&m).is_decomposable(),
                "n = {n}: basis submodel not decomposable"
            );
            ensure!(
                is_identified(&m).map_err(|e| e.to_string())?.identified,
                "n = {n}: basis submodel not identified"
            );
            let nu = random_sparse_distribution(&m, 20, &mut r).unwrap();
            let p = rule_from_distribution(&nu).unwrap();
            let rep = recover_distribution(&m, &p, &Rational::zero()).map_err(|e| e.to_string())?;
            ensure!(
                rep.distribution().as_ref() == Some(&nu),
                "n = {n}, top-up {trial}: recovery roundtrip"
            );
            decomposable_seen[slot] += 1;
            trial += 1;
        }
    }
    Ok("q = ν(L), Möbius roundtrips, flow, rank p = rank q on 100 instances each at n = 4, 5; decomposable => identified and recovery on >= 100 each".into())
}

type Criterion = (&'static str, fn() -> Check);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("bound agreement", c1_bound_agreement),
        ("intro ratios", c2_intro_ratios),
        ("maximal basis", c3_maximal_basis),
        ("all preferences span", c4_full_rank_of_all),
        ("fishburn", c5_fishburn),
        ("entangled model", c6_entangled),
        ("unowned member", c7_unowned),
        ("never single-crossing", c8_never_single_crossing),
        ("single-crossing", c9_scrum),
        ("latin square", c10_carum),
        ("property suites", c11_properties),
    ];
    let default_hook = panic::take_hook();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {:>2} {name}: {detail} ({secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL  {:>2} {name}: {why} ({secs:.2}s)", i + 1);
            }
        }
    }
    panic::set_hook(default_hook);
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
