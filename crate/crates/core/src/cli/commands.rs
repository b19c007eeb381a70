use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use num_bigint::BigUint;
use serde::Deserialize;
use serde_json::{json, Value};

use super::presets::{self, Params};
use super::{CliError, CommandOutput, RunConfig, COMMANDS};
use crate::analysis::{
    absence_bound_check, check_kolmogorov, check_order_invariance, check_order_markov, check_rank_monotonicity,
    compactness_witness, crossed_absence_check, essentiality_test, estimate_event, simulate, CheckReport,
    InvarianceMode, Table,
};
use crate::exact::{Prob, ValueRecord};
use crate::families::{finite_restriction, label_stem, restrict_down_set, Causet, CausetRef, Exhaustion, FiniteCauset, Grid};
use crate::measures::grid::{cells_of, hook_count, partitions};
use crate::measures::{grid_finite_nu, limit_measure_eval, tree_marking_sampler, tree_measure, Measure, MeasureRef};
use crate::poset::{ElementId, FinitePoset};

const MAX_DEPTH: u64 = 12;
const MAX_REPLICAS: u64 = 10_000_000;
const T_STEPS_SHOWN: usize = 32;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

fn require<'a, T: ?Sized>(v: Option<&'a T>, what: &str, cmd: &str) -> Result<&'a T, CliError> {
    v.ok_or_else(|| usage(format!("{cmd} needs --{what}")))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PosetFile {
    elements: Vec<u64>,
    covers: Vec<[u64; 2]>,
    #[serde(default)]
    #[allow(dead_code)]
    family: Option<String>,
}

pub(crate) fn load_poset(path: &Path) -> Result<FinitePoset, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("poset {}: {e}", path.display())))?;
    let file: PosetFile = serde_json::from_str(&text).map_err(|e| usage(format!("poset {}: {e}", path.display())))?;
    let elements: Vec<ElementId> = file.elements.into_iter().map(ElementId).collect();
    let covers: Vec<(ElementId, ElementId)> = file.covers.into_iter().map(|[a, b]| (ElementId(a), ElementId(b))).collect();
    FinitePoset::new(&elements, &covers).map_err(domain)
}

struct Ctx<'a> {
    c: &'a RunConfig,
    cmd: &'a str,
    poset: Option<FinitePoset>,
}

impl<'a> Ctx<'a> {
    fn params(&self) -> &Params {
        &self.c.params
    }

    fn tol(&self, default: f64) -> Result<f64, CliError> {
        let t = self.c.tol.unwrap_or(default);
        if t > 0.0 && t < 1.0 {
            Ok(t)
        } else {
            Err(usage(format!("--tol {t} must lie in (0, 1)")))
        }
    }

    fn depth(&self, default: u64) -> Result<usize, CliError> {
        let d = self.c.depth.unwrap_or(default);
        if (1..=MAX_DEPTH).contains(&d) {
            Ok(d as usize)
        } else {
            Err(usage(format!("--depth {d} must lie in 1..={MAX_DEPTH}")))
        }
    }

    fn n(&self, default: Option<u64>) -> Result<usize, CliError> {
        let n = self.c.n.or(default).ok_or_else(|| usage(format!("{} needs --n", self.cmd)))?;
        if n == 0 {
            return Err(usage("--n must be positive"));
        }
        Ok(n as usize)
    }

    fn replicas(&self, default: u64) -> Result<usize, CliError> {
        let r = self.c.replicas.unwrap_or(default);
        if (1..=MAX_REPLICAS).contains(&r) {
            Ok(r as usize)
        } else {
            Err(usage(format!("--replicas {r} must lie in 1..={MAX_REPLICAS}")))
        }
    }

    fn seed(&self) -> u64 {
        self.c.seed.unwrap_or(0)
    }

    fn family(&self) -> Result<(String, CausetRef), CliError> {
        let name = match (&self.c.family, &self.poset) {
            (Some(f), _) => f.clone(),
            (None, Some(_)) => "file".into(),
            (None, None) => return Err(usage(format!("{} needs --family", self.cmd))),
        };
        Ok((name.clone(), presets::family(&name, self.params(), self.poset.as_ref())?))
    }

    fn measure(&self) -> Result<MeasureRef, CliError> {
        let name = require(self.c.measure.as_deref(), "measure", self.cmd)?;
        presets::measure(name, self.params(), self.poset.as_ref(), self.tol(1e-9)?)
    }

    fn stem(&self, o: &dyn Causet) -> Result<Vec<ElementId>, CliError> {
        presets::stem(o, self.c.stem.as_deref().unwrap_or(""))
    }

    fn exhaustion(&self) -> Exhaustion {
        Exhaustion::parse(self.c.exhaustion.as_deref().unwrap_or("prefix"))
    }

    /// The poset file, or the `n`-th stem of the family's exhaustion.
    fn finite(&self) -> Result<(String, FinitePoset, CausetRef), CliError> {
        if self.c.family.is_none() {
            if let Some(p) = &self.poset {
                return Ok(("file".into(), p.clone(), Arc::new(FiniteCauset::new(p.clone(), "file"))));
            }
        }
        let (name, o) = self.family()?;
        let n = self.n(None)?;
        let p = finite_restriction(o.as_ref(), &self.exhaustion(), n).map_err(domain)?;
        Ok((name, p, o))
    }
}

pub(crate) fn dispatch(c: &RunConfig) -> Result<CommandOutput, CliError> {
    let cmd = c.command.as_deref().ok_or_else(|| usage(format!("no command; expected one of {}", COMMANDS.join(", "))))?;
    let poset = c.poset.as_deref().map(load_poset).transpose()?;
    let ctx = Ctx { c, cmd, poset };
    match cmd {
        "count" => count(&ctx),
        "eval" => eval(&ctx),
        "limit" => limit(&ctx),
        "check" => check(&ctx),
        "simulate" => simulate_cmd(&ctx),
        "tree" => tree(&ctx),
        "grid" => grid(&ctx),
        other => Err(usage(format!("unknown command `{other}`; expected one of {}", COMMANDS.join(", ")))),
    }
}

fn strings<const N: usize>(v: [&str; N]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// `num, den, p, q, r, float` cells for a value, blanks where absent.
fn value_cells(p: &Prob) -> Vec<String> {
    let mut cells = match ValueRecord::from_prob(p) {
        ValueRecord::Rational { num, den } => vec![num, den, String::new(), String::new(), String::new()],
        ValueRecord::Quadratic { p, q, r, .. } => vec![String::new(), String::new(), p, q, r],
        ValueRecord::Float { .. } => vec![String::new(); 5],
    };
    cells.push(p.to_f64().to_string());
    cells
}

const VALUE_COLUMNS: [&str; 6] = ["num", "den", "p", "q", "r", "float"];

fn ok(value: Value, columns: Vec<String>, rows: Vec<Vec<String>>) -> CommandOutput {
    CommandOutput { passed: true, value, table: Table { columns, rows } }
}

fn count(ctx: &Ctx) -> Result<CommandOutput, CliError> {
    let (name, p, o) = ctx.finite()?;
    let total = p.count_linear_extensions().map_err(domain)?;
    let mut value = json!({
        "command": "count",
        "family": name,
        "n": p.len(),
        "count": total.to_string(),
    });
    let mut columns = strings(["family", "n", "count"]);
    let mut row = vec![name, p.len().to_string(), total.to_string()];
    if ctx.c.stem.is_some() {
        let stem = ctx.stem(o.as_ref())?;
        let with: BigUint = p.count_with_prefix(&stem).map_err(domain)?;
        value["stem"] = json!(label_stem(o.as_ref(), &stem));
        value["with_prefix"] = json!(with.to_string());
        columns.push("with_prefix".into());
        row.push(with.to_string());
    }
    Ok(ok(value, columns, vec![row]))
}

fn eval(ctx: &Ctx) -> Result<CommandOutput, CliError> {
    let (target, stem_label, p) = if ctx.c.measure.is_some() {
        let mu = ctx.measure()?;
        let stem = ctx.stem(mu.support().as_ref())?;
        let p = mu.prob(&stem).map_err(domain)?;
        (mu.name(), label_stem(mu.support().as_ref(), &stem), p)
    } else {
        let (name, poset, o) = ctx.finite()?;
        let stem = ctx.stem(o.as_ref())?;
        let v = poset.nu_uniform(&stem).map_err(domain)?;
        (format!("{name}[n={}]", poset.len()), label_stem(o.as_ref(), &stem), Prob::rational(v))
    };
    let value = json!({
        "command": "eval",
        "target": target,
        "stem": stem_label,
        "value": ValueRecord::from_prob(&p),
        "float": p.to_f64(),
        "grade": p.grade(),
    });
    let mut columns = strings(["target", "stem"]);
    columns.extend(strings(VALUE_COLUMNS));
    let mut row = vec![target, stem_label];
    row.extend(value_cells(&p));
    Ok(ok(value, columns, vec![row]))
}

fn limit(ctx: &Ctx) -> Result<CommandOutput, CliError> {
    let (name, o) = ctx.family()?;
    let stem = ctx.stem(o.as_ref())?;
    let n = ctx.n(Some(40))?;
    let tol = ctx.tol(1e-6)?;
    let r = limit_measure_eval(o.as_ref(), &ctx.exhaustion(), &stem, n, tol).map_err(domain)?;
    let rows = r.rows();
    let value = json!({
        "command": "limit",
        "family": name,
        "stem": label_stem(o.as_ref(), &stem),
        "exhaustion": r.exhaustion,
        "verdict": r.verdict,
        "rows": rows,
    });
    let table = rows.iter().map(|r| vec![r.n.to_string(), r.num.clone(), r.den.clone(), r.float.to_string()]).collect();
    Ok(ok(value, strings(["n", "num", "den", "float"]), table))
}

fn parse_k_grid(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',').map(|t| presets::parse_u64("k-grid", t).map(|k| k as usize)).collect()
}

fn element(ctx: &Ctx, o: &dyn Causet) -> Result<ElementId, CliError> {
    let label = require(ctx.c.element.as_deref(), "element", ctx.cmd)?;
    o.parse_label(label).ok_or_else(|| CliError::Domain(format!("unknown element label {label:?}")))
}

fn check(ctx: &Ctx) -> Result<CommandOutput, CliError> {
    let property = require(ctx.c.property.as_deref(), "property", "check")?;
    let report: CheckReport = match property {
        "kolmogorov" => check_kolmogorov(ctx.measure()?.as_ref(), ctx.depth(6)?).map_err(domain)?,
        "order-invariance" => {
            let mode = ctx.c.mode.as_deref().unwrap_or("full");
            let mode = InvarianceMode::parse(mode).ok_or_else(|| usage(format!("unknown mode `{mode}`; use full or adjacent")))?;
            check_order_invariance(ctx.measure()?.as_ref(), ctx.depth(5)?, mode).map_err(domain)?
        }
        "order-markov" => check_order_markov(ctx.measure()?.as_ref(), ctx.depth(5)?).map_err(domain)?,
        "essentiality" => {
            let mu = ctx.measure()?;
            let stem = ctx.stem(mu.support().as_ref())?;
            let grid = parse_k_grid(ctx.c.k_grid.as_deref().unwrap_or("10,25,50,100,200"))?;
            essentiality_test(mu.as_ref(), &stem, ctx.replicas(100)?, &grid, ctx.seed()).map_err(domain)?
        }
        "compactness" => {
            let (_, o) = ctx.family()?;
            let k = ctx.c.depth.unwrap_or(64) as usize;
            compactness_witness(o.as_ref(), ctx.n(Some(10_000))?, k)
        }
        "rank-monotonicity" => {
            let p = ctx.poset.as_ref().ok_or_else(|| usage("rank-monotonicity needs --poset"))?;
            let o = FiniteCauset::new(p.clone(), "file");
            check_rank_monotonicity(p, element(ctx, &o)?).map_err(domain)?
        }
        "absence" => {
            let (_, o) = ctx.family()?;
            let x = element(ctx, o.as_ref())?;
            let j = ctx.params().get("j").map_or(Ok(1), |s| presets::parse_u64("j", s))? as usize;
            absence_bound_check(o.as_ref(), x, j, ctx.n(None)?).map_err(domain)?
        }
        "crossed-absence" => crossed_absence_check(ctx.n(Some(2))? as u32).map_err(domain)?,
        other => return Err(usage(format!("unknown property `{other}`"))),
    };
    let mut value = serde_json::to_value(&report).expect("reports serialize");
    value["command"] = json!("check");
    let residual = match ValueRecord::from_prob(&report.residual) {
        ValueRecord::Rational { num, den } => format!("{num}/{den}"),
        _ => report.residual.to_f64().to_string(),
    };
    let row = vec![
        report.property.clone(),
        report.depth.to_string(),
        report.verdict().into(),
        report.grade.to_string(),
        residual,
        report.witnesses.join(" | "),
    ];
    Ok(CommandOutput {
        passed: report.passed,
        value,
        table: Table { columns: strings(["property", "depth", "verdict", "grade", "residual", "witnesses"]), rows: vec![row] },
    })
}

fn simulate_cmd(ctx: &Ctx) -> Result<CommandOutput, CliError> {
    let mu = ctx.measure()?;
    let o = mu.support().clone();
    if ctx.c.stem.is_some() {
        let stem = ctx.stem(o.as_ref())?;
        let e = estimate_event(mu.as_ref(), &stem, ctx.replicas(10_000)?, ctx.seed()).map_err(domain)?;
        let exact = mu.prob(&stem).map_err(domain)?;
        let value = json!({
            "command": "simulate",
            "measure": mu.name(),
            "stem": label_stem(o.as_ref(), &stem),
            "seed": ctx.seed(),
            "estimate": e,
            "exact": ValueRecord::from_prob(&exact),
            "float": exact.to_f64(),
            "within_band": e.contains(exact.to_f64()),
        });
        let row = vec![
            e.replicas.to_string(),
            e.hits.to_string(),
            e.estimate.to_string(),
            e.half_width.to_string(),
            exact.to_f64().to_string(),
        ];
        return Ok(ok(value, strings(["replicas", "hits", "estimate", "half_width", "exact"]), vec![row]));
    }
    let steps = ctx.n(Some(20))?;
    let t = simulate(mu.as_ref(), steps, ctx.seed()).map_err(domain)?;
    let labels: Vec<String> = t.seq.iter().map(|&x| o.label(x)).collect();
    let value = json!({
        "command": "simulate",
        "measure": t.measure,
        "seed": t.seed,
        "steps": steps,
        "trajectory": labels,
    });
    let rows = labels.iter().enumerate().map(|(i, l)| vec![(i + 1).to_string(), l.clone()]).collect();
    Ok(ok(value, strings(["step", "element"]), rows))
}

fn tree(ctx: &Ctx) -> Result<CommandOutput, CliError> {
    let spec = presets::tree_spec(ctx.params())?;
    let r = tree_measure(spec.clone(), ctx.tol(1e-9)?).map_err(domain)?;
    let tree = crate::families::DownTree::new(spec.clone());
    let t_sequences: Vec<Value> = r
        .t_sequences
        .iter()
        .map(|(x, ts)| {
            let steps: Vec<Value> = ts
                .iter()
                .take(T_STEPS_SHOWN)
                .map(|(u, t)| json!({"above": tree.label(*u), "num": t.numer().to_string(), "den": t.denom().to_string()}))
                .collect();
            json!({"element": tree.label(*x), "steps_total": ts.len(), "steps": steps})
        })
        .collect();
    let mut value = json!({
        "command": "tree",
        "spec": spec.name(),
        "exists": r.exists,
        "tail_sum_bound": if r.tail_sum_bound.is_finite() { json!(r.tail_sum_bound) } else { Value::Null },
        "t_sequences": t_sequences,
    });
    let mut columns = strings(["element"]);
    columns.extend(strings(VALUE_COLUMNS));
    let mut rows = Vec::new();
    if let Some(mu) = &r.measure {
        let t = mu.transition(&[], 16).map_err(domain)?;
        let mut law = Vec::new();
        for (x, p) in &t.weights {
            law.push(json!({"element": tree.label(*x), "value": ValueRecord::from_prob(p), "float": p.to_f64()}));
            let mut row = vec![tree.label(*x)];
            row.extend(value_cells(p));
            rows.push(row);
        }
        value["first_element"] = json!(law);
        value["first_element_slack"] = json!(t.slack);
        if let Some(n) = ctx.c.replicas {
            let n = ctx.replicas(n)?;
            let mut counts: BTreeMap<ElementId, usize> = BTreeMap::new();
            for s in 0..n as u64 {
                let x = tree_marking_sampler(&spec, ctx.seed().wrapping_add(s)).map_err(domain)?;
                *counts.entry(x).or_default() += 1;
            }
            let mut sampled = Vec::new();
            for ((x, p), row) in t.weights.iter().zip(rows.iter_mut()) {
                let k = counts.get(x).copied().unwrap_or(0);
                let f = k as f64 / n as f64;
                let sigma = ((f * (1.0 - f) + 1.0 / n as f64) / n as f64).sqrt();
                let within = (f - p.to_f64()).abs() <= crate::analysis::SIGMAS * sigma;
                sampled.push(json!({"element": tree.label(*x), "count": k, "frequency": f, "within_band": within}));
                row.push(f.to_string());
            }
            columns.push("frequency".into());
            value["sampler"] = json!({"replicas": n, "first_seed": ctx.seed(), "counts": sampled});
        }
    }
    Ok(ok(value, columns, rows))
}

fn shape_rows(shape: &[u64]) -> Result<(String, BigUint, BigUint), CliError> {
    let cells = cells_of(shape);
    let dp = restrict_down_set(&Grid, &cells).map_err(domain)?.count_linear_extensions().map_err(domain)?;
    let label = shape.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
    Ok((label, hook_count(shape), dp))
}

fn grid(ctx: &Ctx) -> Result<CommandOutput, CliError> {
    let shapes: Vec<Vec<u64>> = match (ctx.params().get("shape"), ctx.c.n) {
        (Some(s), _) => {
            let rows: Vec<u64> =
                s.split(',').map(|t| presets::parse_u64("shape", t)).collect::<Result<_, _>>()?;
            if rows.windows(2).any(|w| w[0] < w[1]) || rows.contains(&0) {
                return Err(usage(format!("shape {s} is not a partition")));
            }
            vec![rows]
        }
        (None, Some(n)) if (1..=40).contains(&n) => partitions(n),
        (None, Some(n)) => return Err(usage(format!("--n {n} must lie in 1..=40"))),
        (None, None) => return Err(usage("grid needs --param shape=ROWS or --n")),
    };
    let mut all_equal = true;
    let mut records = Vec::new();
    let mut rows = Vec::new();
    for shape in &shapes {
        let (label, hook, dp) = shape_rows(shape)?;
        all_equal &= hook == dp;
        records.push(json!({"shape": label, "hook": hook.to_string(), "dp": dp.to_string(), "equal": hook == dp}));
        rows.push(vec![label, hook.to_string(), dp.to_string(), (hook == dp).to_string()]);
    }
    let mut value = json!({"command": "grid", "shapes": records});
    if let (Some(_), [shape]) = (&ctx.c.stem, shapes.as_slice()) {
        let stem = ctx.stem(&Grid)?;
        let v = grid_finite_nu(&cells_of(shape), &stem).map_err(domain)?;
        value["stem"] = json!(label_stem(&Grid, &stem));
        value["value"] = json!(ValueRecord::from_prob(&Prob::rational(v)));
    }
    Ok(CommandOutput {
        passed: all_equal,
        value,
        table: Table { columns: strings(["shape", "hook", "dp", "equal"]), rows },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(command: &str, f: impl FnOnce(&mut RunConfig)) -> RunConfig {
        let mut c = RunConfig { command: Some(command.into()), ..Default::default() };
        f(&mut c);
        c
    }

    #[test]
    fn eval_ladder_phi() {
        let c = cfg("eval", |c| {
            c.measure = Some("ladder".into());
            c.stem = Some("a1".into());
        });
        let out = dispatch(&c).unwrap();
        assert_eq!(out.value["value"], json!({"p": "-1", "q": "1", "r": "2", "surd": 5}));
        assert!((out.value["float"].as_f64().unwrap() - 0.618034).abs() < 1e-6);
    }

    #[test]
    fn urn_invariance_passes() {
        let c = cfg("check", |c| {
            c.measure = Some("urn".into());
            c.property = Some("order-invariance".into());
            c.depth = Some(6);
        });
        let out = dispatch(&c).unwrap();
        assert!(out.passed);
        assert_eq!(out.value["verdict"], "pass");
    }

    #[test]
    fn grid_partitions_agree() {
        let c = cfg("grid", |c| c.n = Some(6));
        let out = dispatch(&c).unwrap();
        assert!(out.passed);
        assert_eq!(out.table.rows.len(), 11);
    }

    #[test]
    fn limit_rows() {
        let c = cfg("limit", |c| {
            c.family = Some("ladder".into());
            c.stem = Some("a1".into());
            c.n = Some(30);
        });
        let out = dispatch(&c).unwrap();
        assert_eq!(out.value["verdict"]["verdict"], "converged");
    }

    #[test]
    fn tree_reports_law() {
        let c = cfg("tree", |c| {
            c.params.insert("pendants".into(), "1,2".into());
        });
        let out = dispatch(&c).unwrap();
        assert_eq!(out.value["exists"], true);
        assert_eq!(out.value["first_element"][0]["value"], json!({"num": "3", "den": "8"}));
    }

    #[test]
    fn depth_is_validated() {
        let c = cfg("check", |c| {
            c.measure = Some("urn".into());
            c.property = Some("kolmogorov".into());
            c.depth = Some(99);
        });
        assert!(matches!(dispatch(&c), Err(CliError::Usage(_))));
    }
}
