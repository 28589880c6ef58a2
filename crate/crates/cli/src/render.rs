//! Plain-text tables for `--format text`.

use std::fmt::Write;

use realembed::embedding::suite::AlgebraReport;
use realembed::network::{EmbeddingCertificate, IndependenceVerdict};
use realembed::protocol::ProtocolCertificate;
use realembed::witness::WitnessReport;

use crate::{ProtocolVerification, ScenarioVerification};

fn status(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn verdict(v: &IndependenceVerdict) -> String {
    format!(
        "product-state {} (residual {:.2e}), operational {} (residual {:.2e})",
        v.product_state, v.product_residual, v.operational, v.operational_residual
    )
}

pub fn algebra(r: &AlgebraReport) -> String {
    let mut s = String::new();
    let width = r
        .checks
        .iter()
        .map(|c| c.identity.chars().count())
        .max()
        .unwrap_or(8);
    let _ = writeln!(
        s,
        "{:<28} {:<width$} {:>6} {:>10} {:>8}  status",
        "group", "identity", "n", "deviation", "bound"
    );
    for c in &r.checks {
        let _ = writeln!(
            s,
            "{:<28} {:<width$} {:>6} {:>10.2e} {:>8.0e}  {}",
            c.group,
            c.identity,
            c.instances,
            c.deviation,
            c.bound,
            status(c.passed)
        );
    }
    let _ = writeln!(s, "overall: {}", status(r.passes));
    s
}

pub fn certificate(c: &EmbeddingCertificate) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "embedded objects: {} (tolerance {:.1e})",
        c.validity.len(),
        c.tol
    );
    for (name, r) in &c.validity {
        if !r.is_valid() {
            let _ = writeln!(s, "  invalid {name}: {r}");
        }
    }
    if let Some(v) = &c.joint_independence {
        let _ = writeln!(s, "joint state: {}", verdict(v));
    }
    for (name, v) in &c.per_source_independence {
        let _ = writeln!(s, "{name}: {}", verdict(v));
    }
    if let Some(d) = c.r_product_fold_deviation {
        let _ = writeln!(s, "R-product fold deviation: {d:.2e}");
    }
    s
}

pub fn protocol_certificate(c: &ProtocolCertificate) -> String {
    let bad = c.validity.values().filter(|r| !r.is_valid()).count();
    format!(
        "embedded objects: {} (tolerance {:.1e}), invalid: {bad}\n",
        c.validity.len(),
        c.tol
    )
}

pub fn scenario(v: &ScenarioVerification) -> String {
    let eq = &v.equivalence;
    let mut s = String::new();
    let _ = writeln!(s, "{:<24} {:>9} {:>12}", "setting", "outcomes", "deviation");
    for (setting, c) in &eq.per_setting {
        let _ = writeln!(
            s,
            "{:<24} {:>9} {:>12.2e}",
            setting, c.outcomes, c.max_deviation
        );
    }
    s.push_str(&certificate(&v.certificate));
    let _ = writeln!(
        s,
        "max deviation: {:.3e} (tolerance {:.1e})",
        eq.max_deviation, eq.tol
    );
    let _ = writeln!(s, "overall: {}", status(eq.passes));
    s
}

pub fn protocol(v: &ProtocolVerification) -> String {
    let eq = &v.equivalence;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<20} {:>14} {:>14}",
        "outcome string", "complex", "real"
    );
    for (k, c) in &eq.full_strings {
        let _ = writeln!(s, "{:<20} {:>14.10} {:>14.10}", k, c.qt, c.rqt);
    }
    if let Some(c) = &v.certificate {
        s.push_str(&protocol_certificate(c));
    }
    let _ = writeln!(s, "full-string deviation: {:.3e}", eq.full_string_deviation);
    let _ = writeln!(s, "conditional deviation: {:.3e}", eq.conditional_deviation);
    let _ = writeln!(s, "conditional state deviation: {:.3e}", eq.state_deviation);
    let _ = writeln!(
        s,
        "max deviation: {:.3e} (tolerance {:.1e})",
        eq.max_deviation, eq.tol
    );
    let _ = writeln!(s, "overall: {}", status(eq.passes));
    s
}

pub fn witness(r: &WitnessReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<10} {:>12} {:>12}", "state", "p(ω=0)", "p(ω=1)");
    let [k0, k1] = r.kronecker_probabilities;
    let [r0, r1] = r.r_product_probabilities;
    let _ = writeln!(s, "{:<10} {:>12.9} {:>12.9}", "Ψᴷ", k0, k1);
    let _ = writeln!(s, "{:<10} {:>12.9} {:>12.9}", "Ψᴿ", r0, r1);
    let _ = writeln!(
        s,
        "local sweep: {} basis pairs, max deviation {:.2e}",
        r.local_pairs, r.local_max_deviation
    );
    let _ = writeln!(s, "total-variation distance: {:.9}", r.total_variation);
    let _ = writeln!(
        s,
        "‖Ψᴿ − marginals‖_F: {:.6}",
        r.r_product_marginal_distance
    );
    let _ = writeln!(s, "{}", r.statement);
    let _ = writeln!(s, "overall: {}", status(r.passes));
    s
}
