use hecke_core::chebyshev_moments::{
    chebyshev, cosine_moment_sum, joint_cosine_product, moment_vector, JointMomentRequest,
};
use hecke_core::eichler_selberg::{dimension, trace, TraceRequest};
use hecke_core::equidistribution::{
    box_count, choose_m, et_bound, et_input_from_table, moment_deviation, rate_sweep,
};
use hecke_core::exact_arith::rat_to_f64;
use hecke_core::level_one_oracle::eigen_table;
use hecke_core::sato_tate_measure::{
    cdf, chebyshev_moment_of_measure, integrate_against, joint_weyl_limit, weyl_limit, JointBox, MeasureSpec,
};
use hecke_core::Error;
use serde_json::{json, Value};

use crate::args::Command;
use crate::output::{big, rat, rat_text, scaled, Table};
use crate::{verify, Failure, Payload, EXIT_CHECK_FAILED, EXIT_OK};

type Outcome = Result<Payload, Failure>;

fn ok(result: Value, table: Table) -> Outcome {
    Ok(Payload { result, table, exit: EXIT_OK })
}

fn f(x: f64) -> String {
    x.to_string()
}

pub(crate) fn dispatch(cmd: &Command) -> Outcome {
    match cmd {
        Command::Trace { level, weight, n, breakdown } => trace_cmd(*n, *level, *weight, *breakdown),
        Command::Dim { level, weight } => dim_cmd(*level, *weight),
        Command::Moments { prime, level, weight, max_m } => moments_cmd(*prime, *level, *weight, *max_m),
        Command::Measure { primes, bx, max_m } => measure_cmd(primes, bx.as_deref(), *max_m),
        Command::Eigen { weight, primes, seed } => eigen_cmd(*weight, primes, *seed),
        Command::Joint { primes, level, weight, max_m } => joint_cmd(primes, *level, *weight, *max_m),
        Command::Discrepancy { weight, weights, primes, bx, max_m, seed } => match (weight, weights) {
            (Some(k), _) => discrepancy_cmd(*k, primes, bx.as_deref(), *max_m, *seed),
            (None, Some(range)) => sweep_cmd(&parse_weights(range)?, primes, bx.as_deref(), *seed),
            (None, None) => Err(Failure::Usage("one of --weight or --weights is required".into())),
        },
        Command::Verify => verify_cmd(),
    }
}

/// `a..b` with step 2, both ends inclusive.
pub(crate) fn parse_weights(range: &str) -> Result<Vec<u32>, Failure> {
    let bad = || Failure::Usage(format!("--weights expects a range `a..b`, got `{range}`"));
    let (a, b) = range.split_once("..").ok_or_else(bad)?;
    let a: u32 = a.trim().parse().map_err(|_| bad())?;
    let b: u32 = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok((a..=b).step_by(2).collect())
}

fn parse_box(text: Option<&str>, r: usize) -> Result<JointBox, Failure> {
    let Some(text) = text else {
        return Ok(JointBox::full(r));
    };
    let endpoints = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| Failure::Usage(format!("--box expects comma-separated numbers, got `{text}`")))?;
    let bx = JointBox::from_endpoints(&endpoints)?;
    if bx.dim() != r {
        return Err(Error::InvalidBox(format!("box has {} axes but {r} primes were given", bx.dim())).into());
    }
    Ok(bx)
}

fn trace_cmd(n: u64, level: u64, weight: u32, breakdown: bool) -> Outcome {
    let b = trace(&TraceRequest::new(n, level, weight)?)?;
    let mut result = json!({"n": n, "level": level, "weight": weight, "total": big(&b.total)});
    let mut header = vec!["n", "level", "weight", "total"];
    let mut row = vec![n.to_string(), level.to_string(), weight.to_string(), b.total.to_string()];
    if breakdown {
        result["breakdown"] = json!({"a1": rat(&b.a1), "a2": rat(&b.a2), "a3": rat(&b.a3), "a4": rat(&b.a4)});
        header.extend(["a1", "a2", "a3", "a4"]);
        row.extend([&b.a1, &b.a2, &b.a3, &b.a4].map(rat_text));
    }
    let mut table = Table::new(&header);
    table.push(row);
    ok(result, table)
}

fn dim_cmd(level: u64, weight: u32) -> Outcome {
    let d = dimension(level, weight)?;
    let mut table = Table::new(&["level", "weight", "dimension"]);
    table.push(vec![level.to_string(), weight.to_string(), d.to_string()]);
    ok(json!({"level": level, "weight": weight, "dimension": d}), table)
}

fn moments_cmd(p: u64, level: u64, weight: u32, max_m: u32) -> Outcome {
    let mv = moment_vector(p, level, weight, max_m)?;
    let s = dimension(level, weight)?;
    let mut entries = Vec::new();
    let mut table = Table::new(&["m", "normalized_trace", "cosine_sum", "weyl_limit", "deviation"]);
    for (m, tr) in mv.entries.iter().enumerate() {
        let m32 = m as u32;
        let c = weyl_limit(p, m32)?.value;
        let (cos_json, cos_text) = if m == 0 {
            (json!(2 * s), (2 * s).to_string())
        } else {
            let cs = cosine_moment_sum(p, m32, level, weight)?;
            let text = f(cs.to_f64());
            (scaled(&cs), text)
        };
        let dev = moment_deviation(p, m32, level, weight)?;
        table.push(vec![m.to_string(), f(tr.to_f64()), cos_text, rat_text(&c), f(dev)]);
        entries.push(json!({
            "m": m,
            "normalized_trace": scaled(tr),
            "cosine_sum": cos_json,
            "weyl_limit": rat(&c),
            "deviation": dev,
        }));
    }
    ok(json!({"prime": p, "level": level, "weight": weight, "dimension": s, "entries": entries}), table)
}

fn measure_spec(text: &str) -> Result<MeasureSpec, Failure> {
    match text.trim() {
        "inf" | "infinity" => Ok(MeasureSpec::Infinity),
        t => {
            let p: u64 = t
                .parse()
                .map_err(|_| Failure::Usage(format!("--primes entries must be integers or `inf`, got `{t}`")))?;
            Ok(MeasureSpec::prime(p)?)
        }
    }
}

fn measure_cmd(primes: &[String], bx: Option<&str>, max_m: u32) -> Outcome {
    let specs = primes.iter().map(|p| measure_spec(p)).collect::<Result<Vec<_>, _>>()?;
    let finite: Vec<u64> = specs
        .iter()
        .filter_map(|s| match s {
            MeasureSpec::Prime(p) => Some(*p),
            MeasureSpec::Infinity => None,
        })
        .collect();
    hecke_core::exact_arith::validate_primes(&finite)?;
    let bx = parse_box(bx, specs.len())?;
    let mut table = Table::new(&["kind", "measure", "m", "alpha", "beta", "value"]);
    let mut axes = Vec::new();
    let mut total = 1.0;
    for (spec, &(a, b)) in specs.iter().zip(bx.intervals()) {
        let mass = cdf(*spec, a, b)?;
        total *= mass;
        let name = spec_name(spec);
        table.push(vec!["mass".into(), name.clone(), String::new(), f(a), f(b), f(mass)]);
        axes.push(json!({"measure": name, "interval": [a, b], "mass": mass}));
    }
    let mut limits = Vec::new();
    for spec in &specs {
        for m in 0..=max_m {
            let x_m = chebyshev(m as usize);
            let (c, moment) = match spec {
                MeasureSpec::Prime(p) => (
                    rat(&weyl_limit(*p, m)?.value),
                    rat_to_f64(&chebyshev_moment_of_measure(*p, m)?),
                ),
                // mu_inf: c_m = [m = 0], X_m integrates to [m = 0]
                MeasureSpec::Infinity => (json!({"num": ((m == 0) as u8).to_string(), "den": "1"}), (m == 0) as u8 as f64),
            };
            let quad = integrate_against(*spec, |x| x_m.eval(x), -2.0, 2.0)?;
            let name = spec_name(spec);
            table.push(vec!["weyl_limit".into(), name.clone(), m.to_string(), String::new(), String::new(), value_text(&c)]);
            table.push(vec!["chebyshev_moment".into(), name.clone(), m.to_string(), String::new(), String::new(), f(moment)]);
            limits.push(json!({
                "measure": name,
                "m": m,
                "weyl_limit": c,
                "chebyshev_moment": moment,
                "chebyshev_moment_quadrature": quad,
            }));
        }
    }
    table.push(vec!["box_measure".into(), String::new(), String::new(), String::new(), String::new(), f(total)]);
    ok(json!({"box_measure": total, "axes": axes, "moments": limits}), table)
}

fn value_text(r: &Value) -> String {
    let (n, d) = (r["num"].as_str().unwrap_or("0"), r["den"].as_str().unwrap_or("1"));
    if d == "1" {
        n.to_string()
    } else {
        format!("{n}/{d}")
    }
}

fn spec_name(spec: &MeasureSpec) -> String {
    match spec {
        MeasureSpec::Prime(p) => p.to_string(),
        MeasureSpec::Infinity => "inf".into(),
    }
}

fn eigen_cmd(weight: u32, primes: &[u64], seed: u64) -> Outcome {
    let t = eigen_table(weight, primes, seed)?;
    let mut header = vec!["row".to_string()];
    header.extend(primes.iter().map(|p| format!("a_{p}")));
    header.extend(primes.iter().map(|p| format!("theta_{p}")));
    let mut table = Table { header, rows: Vec::new() };
    for (i, row) in t.rows.iter().enumerate() {
        let mut r = vec![i.to_string()];
        r.extend(row.normalized.iter().map(|&x| f(x)));
        r.extend(row.angles.iter().map(|&x| f(x)));
        table.push(r);
    }
    let rows: Vec<Value> = t
        .rows
        .iter()
        .map(|r| json!({"normalized": r.normalized, "angles": r.angles}))
        .collect();
    ok(
        json!({
            "weight": t.weight,
            "primes": t.primes,
            "seed": t.seed,
            "combination": t.combination,
            "dimension": t.len(),
            "rows": rows,
        }),
        table,
    )
}

fn exponent_grid(r: usize, max_m: u32) -> Vec<Vec<u32>> {
    let mut grid = vec![Vec::new()];
    for _ in 0..r {
        grid = grid
            .into_iter()
            .flat_map(|v| {
                (1..=max_m).map(move |m| {
                    let mut w = v.clone();
                    w.push(m);
                    w
                })
            })
            .collect();
    }
    grid
}

fn joint_cmd(primes: &[u64], level: u64, weight: u32, max_m: u32) -> Outcome {
    if max_m == 0 {
        return Err(Error::ZeroArgument("max-m").into());
    }
    let s = dimension(level, weight)? as f64;
    let r = primes.len();
    let mut entries = Vec::new();
    let mut table = Table::new(&["m", "value", "expected", "deviation"]);
    for m in exponent_grid(r, max_m) {
        let req = JointMomentRequest { primes: primes.to_vec(), exponents: m.clone(), level, weight };
        let v = joint_cosine_product(&req)?;
        // sum of prod 2 cos(m_i theta_i) has limit 2^r s prod c_{m_i}
        let expected = 2f64.powi(r as i32) * s * rat_to_f64(&joint_weyl_limit(primes, &m)?);
        let dev = (v.to_f64() - expected).abs();
        let label = m.iter().map(u32::to_string).collect::<Vec<_>>().join(";");
        table.push(vec![label, f(v.to_f64()), f(expected), f(dev)]);
        entries.push(json!({"m": m, "value": scaled(&v), "expected": expected, "deviation": dev}));
    }
    ok(json!({"primes": primes, "level": level, "weight": weight, "dimension": s as u64, "entries": entries}), table)
}

fn discrepancy_cmd(k: u32, primes: &[u64], bx: Option<&str>, max_m: Option<u32>, seed: u64) -> Outcome {
    let bx = parse_box(bx, primes.len())?;
    let t = eigen_table(k, primes, seed)?;
    let report = box_count(&t, &bx)?;
    let big_m = max_m.unwrap_or_else(|| choose_m(primes, k, 1));
    let displayed = et_input_from_table(&t, &bx, big_m, false)?;
    let centered = et_input_from_table(&t, &bx, big_m, true)?;
    let (bound, bound_centered) = (et_bound(&displayed), et_bound(&centered));
    let mut table = Table::new(&[
        "weight", "size", "count", "expected", "discrepancy", "rate_predictor", "M", "et_bound", "et_bound_centered",
    ]);
    table.push(vec![
        k.to_string(),
        report.size.to_string(),
        report.count.to_string(),
        f(report.expected),
        f(report.discrepancy),
        f(report.rate_predictor),
        big_m.to_string(),
        f(bound),
        f(bound_centered),
    ]);
    ok(
        json!({
            "weight": k,
            "level": report.level,
            "primes": primes,
            "box": bx.intervals(),
            "size": report.size,
            "count": report.count,
            "expected": report.expected,
            "discrepancy": report.discrepancy,
            "rate_predictor": report.rate_predictor,
            "M": big_m,
            "et_bound": bound,
            "et_bound_centered": bound_centered,
            "single_deviations": displayed.single,
        }),
        table,
    )
}

fn sweep_cmd(weights: &[u32], primes: &[u64], bx: Option<&str>, seed: u64) -> Outcome {
    let bx = parse_box(bx, primes.len())?;
    let rows = rate_sweep(weights, primes, &bx, seed)?;
    let mut table = Table::new(&[
        "weight", "size", "count", "expected", "discrepancy", "relative", "rate_predictor", "ratio", "M",
    ]);
    let mut out = Vec::new();
    for r in &rows {
        let rep = &r.report;
        table.push(vec![
            rep.weight.to_string(),
            rep.size.to_string(),
            rep.count.to_string(),
            f(rep.expected),
            f(rep.discrepancy),
            f(rep.relative()),
            f(rep.rate_predictor),
            f(r.ratio),
            r.big_m.to_string(),
        ]);
        out.push(json!({
            "weight": rep.weight,
            "size": rep.size,
            "count": rep.count,
            "expected": rep.expected,
            "discrepancy": rep.discrepancy,
            "relative": rep.relative(),
            "rate_predictor": rep.rate_predictor,
            "ratio": r.ratio,
            "M": r.big_m,
        }));
    }
    ok(json!({"primes": primes, "box": bx.intervals(), "seed": seed, "rows": out}), table)
}

fn verify_cmd() -> Outcome {
    let checks = verify::run_checks();
    let passed = checks.iter().all(|c| c.passed);
    let mut table = Table::new(&["check", "status", "detail"]);
    let mut out = Vec::new();
    for c in &checks {
        let status = if c.passed { "pass" } else { "fail" };
        table.push(vec![c.name.to_string(), status.into(), c.detail.clone()]);
        out.push(json!({"check": c.name, "status": status, "detail": c.detail}));
    }
    Ok(Payload {
        result: json!({"passed": passed, "checks": out}),
        table,
        exit: if passed { EXIT_OK } else { EXIT_CHECK_FAILED },
    })
}
