use std::path::Path;

use harper_core::cocycle::lyapunov_curve;
use harper_core::model::family::FamilyParams;
use harper_core::model::{classify_region, jensen_log_integral_closed, sigma_dual, RegionTag, REGION_TOLERANCE};
use harper_core::spectrum::{dos_estimate, spectrum_samples};
use harper_core::verify::{closed_form_le, full_report, CheckRegistry, OutputFormat, VerificationConfig};
use harper_core::{Coupling, ErgodicFamily, FamilyRegistry, C64};
use serde_json::json;

use crate::config::parse_config;
use crate::output::{emit, json_document, render, Format, Table};
use crate::{DosArgs, Failure, LeArgs, ModelArgs, RegionsArgs, VerifyArgs};

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn compute(msg: impl std::fmt::Display) -> Failure {
    Failure::Compute(msg.to_string())
}

fn write(content: &str, path: Option<&Path>) -> Result<(), Failure> {
    emit(content, path).map_err(|e| compute(format!("cannot write output: {e}")))
}

fn lambdas(l1: Option<f64>, l2: Option<f64>, l3: Option<f64>) -> Result<(f64, f64, f64), Failure> {
    match (l1, l2, l3) {
        (Some(a), Some(b), Some(c)) => Ok((a, b, c)),
        _ => Err(usage("--l1, --l2 and --l3 are required")),
    }
}

fn build_family(m: &ModelArgs) -> Result<Box<dyn ErgodicFamily>, Failure> {
    if !(0.0..1.0).contains(&m.theta) {
        return Err(usage("--theta must lie in [0, 1)"));
    }
    let registry = FamilyRegistry::with_builtins();
    let lambda = if m.model == "harper" {
        lambdas(m.l1, m.l2, m.l3)?
    } else {
        (m.l1.unwrap_or(0.0), m.l2.unwrap_or(0.0), m.l3.unwrap_or(0.0))
    };
    if registry.names().all(|n| n != m.model) {
        let known: Vec<_> = registry.names().collect();
        return Err(usage(format!("unknown model `{}` (known: {})", m.model, known.join(", "))));
    }
    registry.build(&m.model, &FamilyParams { lambda, alpha: m.alpha }).map_err(|e| usage(e.to_string()))
}

fn model_json(m: &ModelArgs) -> serde_json::Value {
    json!({
        "model": m.model,
        "lambda1": m.l1,
        "lambda2": m.l2,
        "lambda3": m.l3,
        "alpha": m.alpha,
        "theta": m.theta,
    })
}

fn linspace(a: f64, b: f64, count: usize) -> Vec<f64> {
    match count {
        1 => vec![a],
        _ => (0..count).map(|k| a + (b - a) * k as f64 / (count - 1) as f64).collect(),
    }
}

fn parse_energies(spec: &str, family: &dyn ErgodicFamily, n: usize, m: usize) -> Result<Vec<f64>, Failure> {
    let bad = || usage(format!("malformed --energies `{spec}`"));
    let (kind, rest) = spec.split_once(':').unwrap_or(("list", spec));
    match kind {
        "spectrum" => {
            let count: usize = rest.parse().ok().filter(|&k| k > 0).ok_or_else(bad)?;
            spectrum_samples(family, n, m, count).map_err(|e| usage(e.to_string()))
        }
        "grid" => {
            let parts: Vec<&str> = rest.split(':').collect();
            let [a, b, c] = parts.as_slice() else { return Err(bad()) };
            let (a, b): (f64, f64) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
            let count: usize = c.parse().ok().filter(|&k| k > 0).ok_or_else(bad)?;
            Ok(linspace(a, b, count))
        }
        "list" => rest
            .split(',')
            .map(|s| s.trim().parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(bad))
            .collect(),
        _ => Err(bad()),
    }
}

pub fn le(a: &LeArgs) -> Result<(), Failure> {
    let family = build_family(&a.model)?;
    let energies = parse_energies(&a.energies, family.as_ref(), a.n, a.m)?;
    let member = family.member(a.model.theta);
    let zs: Vec<C64> = energies.iter().map(|&e| C64::new(e, 0.0)).collect();
    let mut table = Table::new(vec!["energy", "le", "stderr", "raw_le", "skipped"]);
    for (e, r) in energies.iter().zip(lyapunov_curve(member.as_ref(), &zs, a.steps)) {
        let r = r.map_err(|err| compute(format!("E = {e}: {err}")))?;
        table.push(vec![(*e).into(), r.le_estimate.into(), r.stderr_estimate.into(), r.raw_estimate.into(), r.skipped.into()]);
    }
    let mut config = model_json(&a.model);
    config["energies"] = json!(a.energies);
    config["steps"] = json!(a.steps);
    config["n"] = json!(a.n);
    config["m"] = json!(a.m);
    write(&render(&table, config, a.format), a.output.as_deref())
}

pub fn dos(a: &DosArgs) -> Result<(), Failure> {
    let family = build_family(&a.model)?;
    let d = dos_estimate(family.as_ref(), a.n, a.m, a.bins).map_err(compute)?;
    let mut table = Table::new(vec!["bin_left", "bin_right", "mass"]);
    for (k, mass) in d.masses.iter().enumerate() {
        table.push(vec![d.bin_edges[k].into(), d.bin_edges[k + 1].into(), (*mass).into()]);
    }
    let mut config = model_json(&a.model);
    config["n"] = json!(a.n);
    config["m"] = json!(a.m);
    config["bins"] = json!(a.bins);
    write(&render(&table, config.clone(), a.format), a.output.as_deref())?;
    if let Some(path) = &a.raw {
        let mut pool = Table::new(vec!["eigenvalue"]);
        for e in &d.eigenvalues {
            pool.push(vec![(*e).into()]);
        }
        write(&render(&pool, config, a.format), Some(path))?;
    }
    Ok(())
}

pub fn verify(a: &VerifyArgs) -> Result<(), Failure> {
    let registry = CheckRegistry::with_builtins();
    let mut cfg = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
            parse_config(&text, &registry).map_err(|e| usage(e.to_string()))?
        }
        None => VerificationConfig::default(),
    };
    if let Some(f) = a.format {
        cfg.format = match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        };
    }
    if let Some(p) = &a.output {
        cfg.output = Some(p.clone());
    }
    let reports = full_report(&cfg, &registry).map_err(|e| usage(e.to_string()))?;

    let content = match cfg.format {
        OutputFormat::Json => json_document(
            serde_json::to_value(&cfg).map_err(compute)?,
            serde_json::to_value(&reports).map_err(compute)?,
        ),
        OutputFormat::Csv => {
            let mut table = Table::new(vec![
                "name",
                "passed",
                "max_abs_residual",
                "tolerance",
                "runtime_seconds",
                "over_budget",
                "informational",
                "error",
            ]);
            for r in &reports {
                table.push(vec![
                    r.name.as_str().into(),
                    r.passed.into(),
                    r.max_abs_residual.into(),
                    r.tolerance.into(),
                    r.runtime_seconds.into(),
                    r.over_budget.into(),
                    r.informational.into(),
                    r.error.as_deref().into(),
                ]);
            }
            table.to_csv()
        }
    };
    write(&content, cfg.output.as_deref())?;

    for r in &reports {
        eprintln!(
            "{} {} residual {:.3e} tolerance {:.3e} ({:.2} s){}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.max_abs_residual,
            r.tolerance,
            r.runtime_seconds,
            if r.informational { " [informational]" } else { "" }
        );
    }
    let counted: Vec<_> = reports.iter().filter(|r| !r.informational).collect();
    let failed = counted.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        return Err(compute(format!("{failed} of {} checks failed", counted.len())));
    }
    Ok(())
}

struct RegionRow {
    coupling: Coupling,
    tag: RegionTag,
    on_boundary: bool,
    dual: Option<Coupling>,
    jensen: f64,
    le: Option<f64>,
}

fn region_row(c: Coupling) -> RegionRow {
    let region = classify_region(&c, REGION_TOLERANCE);
    RegionRow {
        coupling: c,
        tag: region.tag,
        on_boundary: region.on_boundary,
        dual: sigma_dual(&c).ok(),
        jensen: jensen_log_integral_closed(&c),
        le: closed_form_le(&c).ok(),
    }
}

fn region_text(r: &RegionRow) -> String {
    let dual = match r.dual {
        Some(d) => format!("({},{},{})", d.lambda1, d.lambda2, d.lambda3),
        None => "undefined".into(),
    };
    let le = match r.le {
        Some(x) => format!("LE={x}"),
        None => "no closed form (self-dual region)".into(),
    };
    format!("{}, dual={dual}, {le}\njensen={}\n", r.tag, r.jensen)
}

fn parse_axis(s: &str) -> Option<(f64, f64, usize)> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts.as_slice() else { return None };
    let n: usize = n.parse().ok().filter(|&k| k > 0)?;
    Some((a.parse().ok()?, b.parse().ok()?, n))
}

pub fn regions(a: &RegionsArgs) -> Result<(), Failure> {
    let rows: Vec<RegionRow> = match &a.grid {
        Some(spec) => {
            let bad = || usage(format!("malformed --grid `{spec}`, expected S0:S1:NS,L0:L1:NL"));
            let (sa, la) = spec.split_once(',').ok_or_else(bad)?;
            let (s0, s1, ns) = parse_axis(sa).ok_or_else(bad)?;
            let (l0, l1, nl) = parse_axis(la).ok_or_else(bad)?;
            let mut rows = Vec::with_capacity(ns * nl);
            for s in linspace(s0, s1, ns) {
                for l2 in linspace(l0, l1, nl) {
                    let c = Coupling::new(s / 2.0, l2, s / 2.0).map_err(|e| usage(e.to_string()))?;
                    rows.push(region_row(c));
                }
            }
            rows
        }
        None => {
            let (l1, l2, l3) = lambdas(a.l1, a.l2, a.l3)?;
            vec![region_row(Coupling::new(l1, l2, l3).map_err(|e| usage(e.to_string()))?)]
        }
    };
    let content = match (a.format, a.grid.is_some()) {
        (None, false) => region_text(&rows[0]),
        (format, _) => {
            let format = format.unwrap_or(Format::Csv);
            let mut table = Table::new(vec![
                "lambda1",
                "lambda2",
                "lambda3",
                "region",
                "on_boundary",
                "dual_lambda1",
                "dual_lambda2",
                "dual_lambda3",
                "jensen",
                "closed_form_le",
            ]);
            for r in &rows {
                table.push(vec![
                    r.coupling.lambda1.into(),
                    r.coupling.lambda2.into(),
                    r.coupling.lambda3.into(),
                    r.tag.to_string().into(),
                    r.on_boundary.into(),
                    r.dual.map(|d| d.lambda1).into(),
                    r.dual.map(|d| d.lambda2).into(),
                    r.dual.map(|d| d.lambda3).into(),
                    r.jensen.into(),
                    r.le.into(),
                ]);
            }
            let config = json!({ "grid": a.grid, "lambda1": a.l1, "lambda2": a.l2, "lambda3": a.l3 });
            render(&table, config, format)
        }
    };
    write(&content, a.output.as_deref())
}
