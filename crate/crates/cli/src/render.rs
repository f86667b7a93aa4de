use std::fmt::Write;

use serde_json::{Number, Value};

use crate::Report;

const SIGNIFICANT_DIGITS: usize = 12;

fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

/// Rounds every non-integer number to 12 significant digits. Rounding is
/// idempotent, so rendered reports parse back to themselves.
pub fn normalize_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            Number::from_f64(round_sig(x)).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(normalize_floats).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, normalize_floats(v))).collect()),
        other => other,
    }
}

fn num(v: &Value) -> String {
    match v.as_f64() {
        Some(x) => format!("{x:.6}"),
        None => "inf".to_string(),
    }
}

fn set(v: &Value) -> String {
    let items: Vec<String> = v.as_array().map(|a| a.iter().map(num).collect()).unwrap_or_default();
    if items.is_empty() {
        "{ }".to_string()
    } else {
        format!("{{ {} }}", items.join(", "))
    }
}

fn complex(v: &Value) -> String {
    // num-complex serializes as [re, im]
    let re = v.get(0).and_then(Value::as_f64).unwrap_or(f64::NAN);
    let im = v.get(1).and_then(Value::as_f64).unwrap_or(f64::NAN);
    format!("{re:+.6}{im:+.6}i")
}

fn index(p: &Value) -> String {
    match p["index"].as_u64() {
        Some(i) => format!("index {i}"),
        None if p["degenerate"].as_bool() == Some(true) => "degenerate".to_string(),
        None => "unclassified".to_string(),
    }
}

fn points(out: &mut String, pts: &Value) {
    let pts = pts.as_array().cloned().unwrap_or_default();
    let _ = writeln!(out, "critical points: {}", pts.len());
    for p in &pts {
        let _ = writeln!(
            out,
            "  z = {}  w = {}  theta = {}  {}",
            complex(&p["point"]["z"]),
            complex(&p["point"]["w"]),
            num(&p["theta"]),
            index(p)
        );
    }
}

fn oracle(out: &mut String, o: &Value) {
    if o.is_null() {
        return;
    }
    let clusters = o["clusters"].as_array().map_or(0, |c| c.len());
    let _ = writeln!(
        out,
        "oracle: {} clusters from {} candidate cells (grid {})",
        clusters, o["candidates"], o["resolution"]
    );
}

fn milnor(out: &mut String, cmd: &str, r: &Value) {
    match cmd {
        "milnor radii" => {
            let _ = writeln!(out, "m(F) = {}", num(&r["m_of_f"]));
            let _ = writeln!(out, "X(F) = {}", set(&r["radii"]));
            let _ = writeln!(out, "seeds converged: {}/{}", r["converged_seeds"], r["total_seeds"]);
        }
        "milnor crit" => {
            points(out, &r["points"]);
            let _ = writeln!(out, "seeds converged: {}/{}", r["converged_seeds"], r["total_seeds"]);
            oracle(out, &r["oracle"]);
        }
        "milnor trace" => {
            let _ = writeln!(out, "components: {}", r["components"]);
            for l in r["loops"].as_array().into_iter().flatten() {
                let _ = writeln!(
                    out,
                    "  {} length {}{}",
                    l["divisor"].as_str().unwrap_or("?"),
                    num(&l["length"]),
                    if l["closed"].as_bool() == Some(true) { "" } else { " (open)" }
                );
            }
        }
        _ => {
            let _ = writeln!(out, "verdict: {}", r["verdict"].as_str().unwrap_or("?"));
            let _ = writeln!(out, "radius: {}", num(&r["radius"]));
            let _ = writeln!(out, "m(F) = {}", num(&r["m_of_f"]));
            let _ = writeln!(out, "X(F) = {}", set(&r["critical_radii"]));
            points(out, &r["critical_points"]);
            let loci = r["degenerate_loci"].as_array().cloned().unwrap_or_default();
            if !loci.is_empty() {
                let _ = writeln!(out, "degenerate circles: {}", loci.len());
                for c in &loci {
                    let _ = writeln!(
                        out,
                        "  centre z = {} w = {}  radius {}  residual {:e}",
                        complex(&c["center"]["z"]),
                        complex(&c["center"]["w"]),
                        num(&c["radius"]),
                        c["residual"].as_f64().unwrap_or(f64::NAN)
                    );
                }
            }
            let _ = writeln!(out, "index balance: {}", if r["balance_ok"].as_bool() == Some(true) { "ok" } else { "no" });
            oracle(out, &r["oracle"]);
        }
    }
}

fn braid(out: &mut String, r: &Value) {
    let i = &r["invariants"];
    let _ = writeln!(out, "braid: {}", r["braid"].as_str().unwrap_or(""));
    let _ = writeln!(out, "strands: {}  crossings: {}", i["strand_count"], i["crossing_count"]);
    let _ = writeln!(out, "components: {}", i["closure_components"]);
    let _ = writeln!(out, "χ = {}", i["bennequin_chi"]);
    let pieces = i["surface_pieces"].as_u64().unwrap_or(1);
    if pieces == 1 {
        let _ = writeln!(out, "surface: connected");
    } else {
        let _ = writeln!(out, "surface: {pieces} pieces");
    }
    let _ = writeln!(out, "free_rank_upper: {}", i["free_rank_upper"]);
    let red = &r["reduced_invariants"];
    let _ = writeln!(
        out,
        "reduced: {}  (free_rank_upper {})",
        r["reduced"].as_str().unwrap_or(""),
        red["free_rank_upper"]
    );
}

fn calc(out: &mut String, r: &Value) {
    let word: Vec<&str> = r["word"]
        .as_array()
        .into_iter()
        .flatten()
        .map(|s| if s.as_str() == Some("minus") { "-" } else { "+" })
        .collect();
    let chis: Vec<String> = r["page_chis"].as_array().into_iter().flatten().map(|c| c.to_string()).collect();
    let _ = writeln!(out, "expression: {}", r["expression"].as_str().unwrap_or(""));
    let _ = writeln!(out, "word: ({})", word.join(","));
    let _ = writeln!(out, "mn_upper: {}", r["mn_upper"]);
    let _ = writeln!(out, "pages: {{{}}}", chis.join(", "));
    let _ = writeln!(out, "self-indexed: small chi {}, large chi {}", r["small_chi"], r["large_chi"]);
    let _ = writeln!(out, "binding: {}", r["binding"].as_str().unwrap_or(""));
    if let Some(mn) = r["exact_mn"].as_u64() {
        let _ = writeln!(out, "MN = {mn} (exact)");
    }
}

fn cert_line(c: &Value, subject: &str) -> String {
    format!(
        "MN({subject}) ≤ {} [{}]  ({})\n  tree: {}",
        c["value"],
        c["name"].as_str().unwrap_or("?").trim_end_matches("_double"),
        c["inputs_used"]["source"].as_str().unwrap_or("?"),
        c["tree"].as_str().unwrap_or("")
    )
}

fn bounds(out: &mut String, r: &Value, config: &Value) {
    if let Some(c) = r.get("bound") {
        let _ = writeln!(out, "MN(K) ≤ {} [{}]", c["value"], c["name"].as_str().unwrap_or("?"));
        let _ = writeln!(out, "  source: {}", c["inputs_used"]["source"].as_str().unwrap_or("?"));
        let _ = writeln!(out, "  tree: {}", c["tree"].as_str().unwrap_or(""));
        return;
    }
    let double = config["double"].as_str().unwrap_or("m:s").replace(':', ",");
    let subject = format!("D(K,{double})");
    for c in r["table"].as_array().into_iter().flatten() {
        let _ = writeln!(out, "{}", cert_line(c, &subject));
    }
    let b = &r["best"];
    let _ = writeln!(out, "best: {} [{}]", b["value"], b["name"].as_str().unwrap_or("?").trim_end_matches("_double"));
}

/// Human-readable rendering. The assumptions are always printed.
pub fn render_text(rep: &Report) -> String {
    let mut out = String::new();
    match rep.command.as_str() {
        c if c.starts_with("milnor") => milnor(&mut out, c, &rep.result),
        "braid" => braid(&mut out, &rep.result),
        "calc" => calc(&mut out, &rep.result),
        _ => bounds(&mut out, &rep.result, &rep.config),
    }
    if rep.assumptions.is_empty() {
        out.push_str("assumptions: none\n");
    } else {
        out.push_str("assumptions:\n");
        for a in &rep.assumptions {
            let _ = writeln!(out, "  - {a}");
        }
    }
    for w in &rep.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}
