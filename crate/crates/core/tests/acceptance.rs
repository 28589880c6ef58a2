//! The eight acceptance criteria, one line each on stdout. Lines are written
//! straight to the process stdout so they show up without `--nocapture`.

use std::io::Write;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::SeedableRng;

use realembed::embedding::suite::{
    run_algebra_suite, AlgebraReport, SuiteConfig, GROUP_CONTAMINATION, GROUP_GAMMA, GROUP_GLOBAL,
    GROUP_PHASE, GROUP_PROJECTOR,
};
use realembed::matrix::{validate, FactorShape, KrausSet};
use realembed::network::{
    bell_chsh, bilocal, check_independence, chsh_value, embed_network, triangle, verify_equivalence,
};
use realembed::protocol::{
    embed_protocol, embed_step, random_protocol, verify_protocol_equivalence, Operation,
};
use realembed::random;
use realembed::witness::{caves_report, run_witness};

type Row<'a> = (&'static str, u64, Box<dyn FnOnce() -> Verdict + 'a>);

struct Verdict {
    passed: bool,
    detail: String,
}

fn line(n: usize, name: &str, budget: Duration, elapsed: Duration, v: &Verdict) {
    let status = if v.passed { "PASS" } else { "FAIL" };
    let timing = if elapsed <= budget { "within" } else { "over" };
    // libtest prints the test name without a newline first
    let lead = if n == 1 { "\n" } else { "" };
    let text = format!(
        "{lead}criterion {n} [{status}] {name}: {} ({:.2} s, {timing} the {} s budget)\n",
        v.detail,
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes());
    let _ = out.flush();
}

fn timed(f: impl FnOnce() -> Verdict) -> (Verdict, Duration) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed())
}

fn suite() -> AlgebraReport {
    run_algebra_suite(&SuiteConfig::default()).expect("suite runs")
}

fn gamma_suite(r: &AlgebraReport) -> Verdict {
    let dev = r.group_deviation(GROUP_GAMMA);
    Verdict {
        passed: r.group_passes(GROUP_GAMMA) && dev <= 1e-10,
        detail: format!(
            "{} random pairs, worst relative deviation {dev:.2e}",
            r.config.pairs
        ),
    }
}

fn phase_suite(r: &AlgebraReport) -> Verdict {
    let groups = [GROUP_PHASE, GROUP_GLOBAL, GROUP_PROJECTOR];
    let dev = r
        .group_deviation(GROUP_PHASE)
        .max(r.group_deviation(GROUP_GLOBAL));
    Verdict {
        passed: groups.iter().all(|g| r.group_passes(g)) && dev <= 1e-12,
        detail: format!("n = 1 to {}, worst deviation {dev:.2e}", r.config.max_fold),
    }
}

fn contamination(r: &AlgebraReport) -> Verdict {
    let dev = r.group_deviation(GROUP_CONTAMINATION);
    Verdict {
        passed: r.group_passes(GROUP_CONTAMINATION) && dev <= 1e-10,
        detail: format!(
            "{} instances, worst relative deviation {dev:.2e}",
            r.config.instances
        ),
    }
}

fn networks() -> Verdict {
    let tsirelson = 2.0 * std::f64::consts::SQRT_2;
    let bell = bell_chsh();
    let (bell_real, _) = embed_network(&bell, 1e-9).unwrap();
    let s_qt = chsh_value(&bell).unwrap();
    let s_rqt = chsh_value(&bell_real).unwrap();
    let chsh_ok = (s_qt.abs() - tsirelson).abs() <= 1e-9 && (s_rqt.abs() - tsirelson).abs() <= 1e-9;
    let mut worst = verify_equivalence(&bell, &bell_real, 1e-10)
        .unwrap()
        .max_deviation;
    let mut all = chsh_ok;
    for qt in [bilocal(), triangle()] {
        let (real, _) = embed_network(&qt, 1e-9).unwrap();
        let r = verify_equivalence(&qt, &real, 1e-10).unwrap();
        all &= r.passes;
        worst = worst.max(r.max_deviation);
    }
    Verdict {
        passed: all && worst <= 1e-10,
        detail: format!("CHSH {s_qt:.12} (complex) vs {s_rqt:.12} (real); bell, bilocal, triangle max deviation {worst:.2e}"),
    }
}

fn protocols() -> Verdict {
    let mut rng = StdRng::seed_from_u64(2);
    let mut worst = 0.0f64;
    let mut valid = true;
    for k in 0..20 {
        let qt = random_protocol(&mut rng, 1 + k % 3, 1 + (k / 3) % 2);
        let (real, cert) = embed_protocol(&qt, 1e-10).unwrap();
        valid &= cert.validity.values().all(|r| r.is_valid());
        for step in &real.steps {
            let blocks = match &step.op {
                Operation::Channel(c) => &c.blocks,
                Operation::Instrument(m) => &m.blocks,
            };
            valid &= blocks
                .iter()
                .all(|ops| validate(&KrausSet::channel(ops.clone()), 1e-10).is_valid());
        }
        let r = verify_protocol_equivalence(&qt, &real, 1e-9).unwrap();
        worst = worst.max(r.max_deviation);
    }
    Verdict {
        passed: valid && worst <= 1e-9,
        detail: format!("20 protocols, max branch deviation {worst:.2e}, embedded channels and instruments valid: {valid}"),
    }
}

fn independence() -> Verdict {
    let mut rng = StdRng::seed_from_u64(3);
    let mut sweep = Vec::new();
    let mut ok = true;
    for alpha in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let r = caves_report(&mut rng, alpha, 20, 1e-10).unwrap();
        ok &= r.verdict.operational
            && r.verdict.product_state == (alpha == 0.0)
            && r.formula_deviation <= 1e-12;
        sweep.push(format!(
            "α={alpha}: {}/{}",
            r.verdict.product_state as u8, r.verdict.operational as u8
        ));
    }
    let mut violations = 0;
    for k in 0..100 {
        let s = FactorShape::new(vec![2, 2]).unwrap();
        let v = if k % 2 == 0 {
            check_independence(
                &random::real_density(&mut rng, &s),
                &[vec![0], vec![1]],
                1e-10,
            )
            .unwrap()
        } else {
            let a = random::real_density(&mut rng, &FactorShape::new(vec![2]).unwrap());
            let b = random::real_density(&mut rng, &FactorShape::new(vec![2]).unwrap());
            let p = realembed::matrix::kron(&a, &b).unwrap();
            check_independence(&p, &[vec![0], vec![1]], 1e-10).unwrap()
        };
        if v.product_state && !v.operational {
            violations += 1;
        }
    }
    Verdict {
        passed: ok && violations == 0,
        detail: format!("Caves sweep product/operational [{}]; product without operational on 100 states: {violations}", sweep.join(", ")),
    }
}

fn witness() -> Verdict {
    let r = run_witness(1e-12).unwrap();
    Verdict {
        passed: r.passes && (r.total_variation - 0.5).abs() <= 1e-12,
        detail: format!(
            "local deviation {:.2e} over {} pairs; Ψᴷ gives {:?}, Ψᴿ gives {:?}",
            r.local_max_deviation,
            r.local_pairs,
            r.kronecker_probabilities,
            r.r_product_probabilities
        ),
    }
}

fn componentwise() -> Verdict {
    let mut rng = StdRng::seed_from_u64(4);
    let a = random_protocol(&mut rng, 3, 2);
    let mut b = random_protocol(&mut rng, 3, 1);
    let mut ok = true;
    for step in a.steps.iter().take(2) {
        b.steps.push(step.clone());
    }
    let (ra, _) = embed_protocol(&a, 1e-9).unwrap();
    let (rb, _) = embed_protocol(&b, 1e-9).unwrap();
    let tail = &rb.steps[rb.steps.len() - 2..];
    ok &= tail == &ra.steps[..2];
    ok &= a.steps[..2]
        .iter()
        .zip(&ra.steps)
        .all(|(s, r)| embed_step(s).unwrap() == *r);
    Verdict {
        passed: ok,
        detail: "round 1 embedded alone, inside its own protocol and inside another one: bitwise identical".into(),
    }
}

#[test]
fn acceptance_criteria() {
    let mut results = Vec::new();
    let start = Instant::now();
    let report = suite();
    let shared = start.elapsed();

    let rows: [Row; 8] = [
        ("Γ property suite", 1, Box::new(|| gamma_suite(&report))),
        ("phase-rep suite", 5, Box::new(|| phase_suite(&report))),
        (
            "R-product contamination",
            2,
            Box::new(|| contamination(&report)),
        ),
        ("network statistics", 30, Box::new(networks)),
        ("adaptive protocols", 120, Box::new(protocols)),
        ("independence dichotomy", 10, Box::new(independence)),
        ("witness", 5, Box::new(witness)),
        ("componentwise embedding", 5, Box::new(componentwise)),
    ];
    for (i, (name, budget, f)) in rows.into_iter().enumerate() {
        let (v, mut elapsed) = timed(f);
        if i < 3 {
            // the three algebra criteria share one suite run
            elapsed += shared;
        }
        line(i + 1, name, Duration::from_secs(budget), elapsed, &v);
        results.push((name, v.passed));
    }
    let failed: Vec<_> = results
        .iter()
        .filter(|(_, ok)| !ok)
        .map(|(n, _)| *n)
        .collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
