use serde::Serialize;
use serde_json::{json, Value};
use sofic_dyck::constructions::{grammar_to_automaton, to_vpa, FtdFile, GrammarFile, VpaFile};
use sofic_dyck::oracle::{self, DEFAULT_WORD_CAP};
use sofic_dyck::reduction::{left_reduce, right_reduce};
use sofic_dyck::zeta::{self, ZetaReport};
use sofic_dyck::{DyckAutomaton, Error, Letter, Series, ZetaOptions};

use crate::input::{self, Input};
use crate::report::{Failure, Output};
use crate::{Method, Side};

pub type CmdResult = Result<Output<Value>, Failure>;

fn value(x: impl Serialize) -> Value {
    serde_json::to_value(x).expect("report values serialize")
}

fn automaton(inp: &Input) -> Result<DyckAutomaton, Failure> {
    DyckAutomaton::from_json(&inp.text).map_err(|e| match e {
        Error::InvalidAutomaton(diags) => {
            let lines: Vec<String> = diags.iter().map(|d| format!("  {d}")).collect();
            Failure::Input(format!("{} has {} problem(s):\n{}", inp.name, diags.len(), lines.join("\n")))
        }
        other => Failure::Input(format!("{}: {other}", inp.name)),
    })
}

fn word(a: &DyckAutomaton, text: &str) -> Result<Vec<Letter>, Failure> {
    Ok(a.parse_word(text)?.0)
}

fn pair_names(a: &DyckAutomaton, pairs: impl Iterator<Item = (usize, usize)>) -> Vec<(String, String)> {
    pairs.map(|(p, q)| (a.states()[p].clone(), a.states()[q].clone())).collect()
}

/// Writes `artifact` to `out` when given; otherwise prints it.
fn emit(lines: &mut Vec<String>, out: Option<&str>, artifact: &str) -> Result<(), Failure> {
    match out {
        Some(path) => {
            input::write(path, artifact)?;
            lines.push(format!("wrote {path}"));
        }
        None => lines.push(artifact.to_string()),
    }
    Ok(())
}

pub fn validate(inp: &Input) -> CmdResult {
    let a = automaton(inp)?;
    let (n, e, m) = (a.num_states(), a.edges().len(), a.matched().len());
    Ok(Output::new(
        vec![format!("valid: {n} states, {e} edges, {m} matched pairs")],
        json!({ "states": n, "edges": e, "matched": m }),
    ))
}

fn series_line(s: &Series) -> String {
    s.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
}

/// Largest `n ≤ max` whose word enumeration stays under the oracle cap.
fn feasible_oracle_n(a: &DyckAutomaton, max: usize) -> usize {
    let k = a.alphabet().len() as u128;
    (1..=max).take_while(|&n| k.checked_pow(n as u32).is_some_and(|s| s <= DEFAULT_WORD_CAP)).last().unwrap_or(0)
}

pub fn zeta(inp: &Input, order: usize, no_reduce: bool, cross_check: bool) -> CmdResult {
    let a = automaton(inp)?;
    let opts = ZetaOptions { reduce: !no_reduce, ..ZetaOptions::default() };
    let z = zeta::zeta(&a, order, &opts)?;
    let report = ZetaReport::from(&z);
    let mut lines = vec![format!("zeta (order {order}): {}", series_line(&z.zeta))];
    for (f, s) in &z.factors {
        lines.push(format!("  zeta_{:<5} {}", f.name(), series_line(s)));
    }
    lines.push(format!("p_n: {}", report.periodic.join(" ")));
    if z.caller_asserted {
        lines.push("note: computed without reduction; the determinism hypotheses are the caller's".into());
    }
    let mut out = Output::new(lines, Value::Null);
    let mut check = Value::Null;
    if cross_check {
        let upto = feasible_oracle_n(&a, order);
        let mut mismatches = Vec::new();
        let mut counts = Vec::new();
        for n in 1..=upto {
            let p = oracle::periodic_count(&a, n)?;
            counts.push(p);
            if z.periodic[n - 1] != sofic_dyck::Rational::from_integer(p.into()) {
                mismatches.push(format!("p_{n}: formula {} oracle {p}", z.periodic[n - 1]));
            }
        }
        if mismatches.is_empty() {
            out.lines.push(format!("cross-check: oracle agrees for n ≤ {upto}"));
        } else {
            out.lines.push(format!("cross-check: {} mismatch(es)", mismatches.len()));
            out.lines.extend(mismatches.iter().map(|m| format!("  {m}")));
            out.failure = Some(Failure::Mismatch(mismatches.join("; ")));
        }
        check = json!({ "oracle_n": upto, "oracle_p": counts, "mismatches": mismatches });
    }
    out.data = json!({ "zeta": report, "cross_check": check });
    Ok(out)
}

pub fn periodic(inp: &Input, max_n: usize, method: Method) -> CmdResult {
    let a = automaton(inp)?;
    let oracle_p: Option<Vec<u64>> = match method {
        Method::Oracle | Method::Both => {
            Some((1..=max_n).map(|n| oracle::periodic_count(&a, n)).collect::<Result<_, _>>()?)
        }
        Method::Formula => None,
    };
    let formula_p: Option<Vec<String>> = match method {
        Method::Formula | Method::Both if max_n > 0 => {
            let z = zeta::zeta(&a, max_n, &ZetaOptions::default())?;
            Some(z.periodic.iter().map(|p| p.to_string()).collect())
        }
        Method::Formula | Method::Both => Some(Vec::new()),
        Method::Oracle => None,
    };
    let mut lines = vec![format!("{:>4} {:>12} {:>12}", "n", "oracle", "formula")];
    let mut disagree = Vec::new();
    for n in 1..=max_n {
        let o = oracle_p.as_ref().map(|v| v[n - 1].to_string());
        let f = formula_p.as_ref().map(|v| v[n - 1].clone());
        if let (Some(o), Some(f)) = (&o, &f) {
            if o != f {
                disagree.push(n);
            }
        }
        let show = |x: Option<String>| x.unwrap_or_else(|| "-".into());
        lines.push(format!("{n:>4} {:>12} {:>12}", show(o), show(f)));
    }
    let mut out = Output::new(lines, json!({ "oracle": oracle_p, "formula": formula_p, "disagree": disagree }));
    if !disagree.is_empty() {
        out.lines.push(format!("methods disagree at n = {disagree:?}"));
        out.failure = Some(Failure::Mismatch(format!("p_n differs at n = {disagree:?}")));
    }
    Ok(out)
}

pub fn reduce(inp: &Input, side: Side, out_path: Option<&str>) -> CmdResult {
    let a = automaton(inp)?;
    let (r, role) = match side {
        Side::Left => (left_reduce(&a), "initial"),
        Side::Right => (right_reduce(&a), "final"),
    };
    let d = &r.automaton;
    let sidecar = r.sidecar(&a);
    let mut lines = vec![format!(
        "{} reduction: {} states, {} edges, {} matched pairs; {role} state {}",
        match side {
            Side::Left => "left",
            Side::Right => "right",
        },
        d.num_states(),
        d.edges().len(),
        d.matched().len(),
        d.states()[r.distinguished]
    )];
    for e in &sidecar {
        let s: Vec<String> = e.summary.iter().map(|[p, q]| format!("({p},{q})")).collect();
        let s = if s.is_empty() { "∅".to_string() } else { s.join(" ") };
        lines.push(format!("  {}: summary {s}; subset {{{}}}", e.name, e.subset.join(",")));
    }
    let sidecar_json = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
    emit(&mut lines, out_path, &d.to_json())?;
    if let Some(path) = out_path {
        let side_path = format!("{path}.states.json");
        input::write(&side_path, &sidecar_json)?;
        lines.push(format!("wrote {side_path}"));
    }
    Ok(Output::new(
        lines,
        json!({
            "states": d.num_states(),
            "distinguished": d.states()[r.distinguished],
            "sidecar": sidecar,
            "automaton": serde_json::from_str::<Value>(&d.to_json()).expect("valid json"),
        }),
    ))
}

pub fn rel(inp: &Input, text: &str) -> CmdResult {
    let a = automaton(inp)?;
    let w = word(&a, text)?;
    let pairs = pair_names(&a, a.rel(&w).iter());
    let shown = if pairs.is_empty() {
        "∅".to_string()
    } else {
        pairs.iter().map(|(p, q)| format!("({p},{q})")).collect::<Vec<_>>().join(" ")
    };
    Ok(Output::new(vec![shown], json!({ "word": a.alphabet().render(&w), "pairs": pairs })))
}

pub fn admissible(inp: &Input, text: &str) -> CmdResult {
    let a = automaton(inp)?;
    let w = word(&a, text)?;
    let ok = a.is_admissible_label(&w);
    let line = if ok { "admissible" } else { "not admissible" };
    Ok(Output::new(vec![line.into()], json!({ "word": a.alphabet().render(&w), "admissible": ok })))
}

pub fn vpa(inp: &Input, out_path: Option<&str>) -> CmdResult {
    let a = automaton(inp)?;
    let v = to_vpa(&a);
    let file = VpaFile::from(&v);
    let mut lines = vec![format!(
        "vpa: {} states, {} stack symbols, {} push, {} pop, {} local",
        v.states.len(),
        v.stack.len(),
        v.push.len(),
        v.pop.len(),
        v.local.len()
    )];
    emit(&mut lines, out_path, &file.to_json())?;
    Ok(Output::new(lines, value(&file)))
}

pub fn from_grammar(inp: &Input, out_path: Option<&str>) -> CmdResult {
    let g = GrammarFile::from_json(&inp.text)?.grammar()?;
    let a = grammar_to_automaton(&g)?;
    let mut lines = vec![format!("automaton: {} states, {} edges, {} matched pairs", a.num_states(), a.edges().len(), a.matched().len())];
    emit(&mut lines, out_path, &a.to_json())?;
    Ok(Output::new(lines, serde_json::from_str(&a.to_json()).expect("valid json")))
}

pub fn ftd(inp: &Input, out_path: Option<&str>) -> CmdResult {
    let (a, diags) = FtdFile::from_json(&inp.text)?.build()?;
    let mut lines = vec![format!("automaton: {} states, {} edges, {} matched pairs", a.num_states(), a.edges().len(), a.matched().len())];
    lines.extend(diags.iter().map(|d| format!("warning: {d}")));
    emit(&mut lines, out_path, &a.to_json())?;
    let warnings: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
    Ok(Output::new(
        lines,
        json!({ "warnings": warnings, "automaton": serde_json::from_str::<Value>(&a.to_json()).expect("valid json") }),
    ))
}

pub fn nonempty(inp: &Input, bound: usize) -> CmdResult {
    let a = automaton(inp)?;
    let k = a.alphabet().len();
    for n in 1..=bound {
        let size = (k as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if size > DEFAULT_WORD_CAP {
            return Err(Error::TooLarge { what: "witness search", size, cap: DEFAULT_WORD_CAP }.into());
        }
        let mut digits = vec![0usize; n];
        loop {
            let w: Vec<Letter> = digits.iter().map(|&d| Letter(d)).collect();
            if oracle::is_periodic_pattern(&a, &w)? {
                let shown = a.alphabet().render(&w);
                return Ok(Output::new(vec![format!("witness: {shown}")], json!({ "witness": shown })));
            }
            let Some(i) = digits.iter().rposition(|&d| d + 1 < k) else { break };
            digits[i] += 1;
            digits[i + 1..].fill(0);
        }
    }
    Ok(Output::new(vec![format!("no witness up to {bound}")], json!({ "witness": null, "bound": bound })))
}
