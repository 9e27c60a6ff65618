use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use zptower::analysis::{
    anumber_basic_p2, fit_periodic, kernel_level_one_p2, ramification_hypothesis, second_kernel_level_two_p2,
    BreakData, FitRow, HypothesisRow,
};
use zptower::tower::{classify_breaks, closed_form_basic, ramification_data, Monodromy, TowerSpec};

use crate::compute::{run_compute, ComputeOptions, DataDir};
use crate::spec_file::load_spec;
use crate::store::ResultRecord;
use crate::suites::{run_suite, SuiteReport, SUITES};

/// Command outcome mapped onto the process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    Mismatch,
}

/// 3 for internal-consistency failures, 2 for everything else.
pub fn error_exit_code(err: &anyhow::Error) -> u8 {
    let internal = err
        .chain()
        .any(|e| matches!(e.downcast_ref::<zptower::Error>(), Some(zptower::Error::InternalConsistency(_))));
    if internal {
        3
    } else {
        2
    }
}

fn read_spec(path: &Path) -> Result<TowerSpec> {
    let loaded = load_spec(path)?;
    for w in &loaded.warnings {
        eprintln!("warning: {w}");
    }
    Ok(loaded.spec)
}

#[derive(Debug, Serialize)]
pub struct InfoReport {
    pub name: String,
    pub spec_hash: String,
    pub p: u32,
    pub k: u32,
    pub canonical: String,
    pub d: Option<u64>,
    pub upper_breaks: Vec<u64>,
    pub lower_breaks: Vec<u64>,
    pub genus: Vec<u64>,
    pub monodromy: String,
    pub hypothesis: Vec<HypothesisRow>,
    /// Closed-form a-numbers for basic towers in characteristic two.
    pub predicted_a: Option<Vec<u64>>,
    /// `a^(r)` at level one for r = 1..=5, characteristic two.
    pub predicted_level_one: Option<Vec<u64>>,
    pub predicted_a2_level_two: Option<u64>,
}

pub fn info(spec: &TowerSpec, levels: usize) -> Result<InfoReport> {
    let ram = ramification_data(spec, levels)?;
    let monodromy = match classify_breaks(spec.p(), &ram.s)? {
        Monodromy::Stable { c, d, from_level } => format!("stable: s(n) = {d}*p^(n-1) + {c} from level {from_level}"),
        Monodromy::Periodic { m, c, d, from_level } => {
            let cs: Vec<String> = c.iter().map(|x| x.to_string()).collect();
            format!("periodic (m = {m}): s(n) = {d}*p^(n-1) + [{}] from level {from_level}", cs.join(", "))
        }
        Monodromy::Unclassified => "unclassified".to_string(),
    };
    let d = spec.basic_invariant();
    if let Some(d) = d {
        for n in 1..=levels {
            let cf = closed_form_basic(spec.p(), d, n as u32)?;
            if cf.genus != ram.g[n - 1] || cf.lower_break != ram.d[n - 1] {
                return Err(zptower::Error::InternalConsistency(format!(
                    "level {n}: ramification data disagrees with the basic closed form"
                ))
                .into());
            }
        }
    }
    let p2 = spec.p() == 2;
    let predicted_a = match (p2, d) {
        (true, Some(d)) => Some((1..=levels).map(|n| anumber_basic_p2(d, n)).collect::<zptower::Result<Vec<_>>>()?),
        _ => None,
    };
    let predicted_level_one =
        if p2 { Some((1..=5).map(|r| kernel_level_one_p2(&[ram.d[0]], r)).collect::<zptower::Result<Vec<_>>>()?) } else { None };
    let predicted_a2_level_two = match (p2, ram.d.get(1)) {
        (true, Some(&d2)) if d2 == 3 * ram.d[0] => Some(second_kernel_level_two_p2(&[ram.d[0]])?),
        _ => None,
    };
    Ok(InfoReport {
        name: spec.name.clone(),
        spec_hash: spec.spec_hash(),
        p: spec.p(),
        k: spec.field.k(),
        canonical: spec.normalize().canonical_string(),
        d,
        upper_breaks: ram.s.clone(),
        lower_breaks: ram.d.clone(),
        genus: ram.g.clone(),
        monodromy,
        hypothesis: ramification_hypothesis(&BreakData::from_ramification(spec.p(), &ram)),
        predicted_a,
        predicted_level_one,
        predicted_a2_level_two,
    })
}

pub fn cmd_info(path: &Path, levels: usize, json: bool, out: &mut dyn Write) -> Result<Outcome> {
    let spec = read_spec(path)?;
    let rep = info(&spec, levels)?;
    if json {
        writeln!(out, "{}", serde_json::to_string_pretty(&rep)?)?;
        return Ok(Outcome::Ok);
    }
    writeln!(out, "{} ({})", rep.name, rep.spec_hash)?;
    writeln!(out, "field GF({}^{}), {}", rep.p, rep.k, rep.canonical)?;
    if let Some(d) = rep.d {
        writeln!(out, "ramification invariant {d}")?;
    }
    writeln!(out, "level  upper  lower  genus  delta  trace-vanishing")?;
    for n in 0..rep.genus.len() {
        let h = &rep.hypothesis[n];
        writeln!(
            out,
            "{:>5} {:>6} {:>6} {:>6} {:>6}  {}",
            n + 1,
            rep.upper_breaks[n],
            rep.lower_breaks[n],
            rep.genus[n],
            h.delta,
            h.trace_vanishes
        )?;
    }
    writeln!(out, "monodromy: {}", rep.monodromy)?;
    if let Some(a) = &rep.predicted_a {
        writeln!(out, "closed-form a-numbers: {a:?}")?;
    }
    if let Some(a) = &rep.predicted_level_one {
        writeln!(out, "closed-form a^(1..5) at level 1: {a:?}")?;
    }
    if let Some(a) = rep.predicted_a2_level_two {
        writeln!(out, "closed-form a^(2) at level 2: {a}")?;
    }
    Ok(Outcome::Ok)
}

fn print_records(recs: &[ResultRecord], json: bool, out: &mut dyn Write) -> Result<()> {
    if json {
        for r in recs {
            writeln!(out, "{}", serde_json::to_string(r)?)?;
        }
        return Ok(());
    }
    writeln!(out, "level  genus  a^(1..R)")?;
    for r in recs {
        let ks: Vec<String> = r.kernels.iter().map(|k| k.to_string()).collect();
        writeln!(out, "{:>5} {:>6}  {}", r.level, r.genus, ks.join(" "))?;
    }
    Ok(())
}

pub fn cmd_compute(path: &Path, opts: &ComputeOptions, data: &DataDir, json: bool, out: &mut dyn Write) -> Result<Outcome> {
    let spec = read_spec(path)?;
    let recs = run_compute(&spec, opts, data)?;
    print_records(&recs, json, out)?;
    Ok(Outcome::Ok)
}

pub enum FitInput {
    Spec(PathBuf),
    Values { values: Vec<i64>, p: u32, d: u64 },
}

pub fn cmd_fit(input: FitInput, power: u32, data: &DataDir, json: bool, out: &mut dyn Write) -> Result<Outcome> {
    let (values, p, d) = match input {
        FitInput::Values { values, p, d } => (values, p, d),
        FitInput::Spec(path) => {
            let spec = read_spec(&path)?;
            let Some(d) = spec.basic_invariant() else {
                bail!("fitting needs a tower whose terms are all Teichmüller lifts");
            };
            let recs = data.store()?.for_spec(&spec.spec_hash())?;
            let mut values = Vec::new();
            for (i, r) in recs.iter().filter(|r| r.level >= 1).enumerate() {
                if r.level != i + 1 {
                    break;
                }
                match r.kernels.get(power as usize - 1) {
                    Some(&a) => values.push(a as i64),
                    None => break,
                }
            }
            if values.is_empty() {
                bail!("no stored results with power {power} for {}; run compute first", spec.name);
            }
            (values, spec.p(), d)
        }
    };
    let fit = fit_periodic(&values, d, p, power)?;
    if json {
        writeln!(out, "{}", serde_json::to_string_pretty(&FitRow::from(&fit))?)?;
    } else {
        writeln!(out, "{fit}")?;
        let shifted: Vec<String> = fit.shifted.iter().map(|c| c.to_string()).collect();
        writeln!(out, "normalized constant(s): [{}]", shifted.join(", "))?;
        writeln!(out, "discrepancies: {:?}", fit.discrepancies)?;
        if !fit.is_supported() {
            writeln!(out, "note: fewer than period + 1 levels agree with this formula")?;
        }
    }
    Ok(Outcome::Ok)
}

pub fn cmd_scan(dir: &Path, opts: &ComputeOptions, data: &DataDir, out: &mut dyn Write) -> Result<Outcome> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    paths.sort();
    // one shared store so appends are serialized
    let lines = Mutex::new(Vec::new());
    let failures: Vec<String> = paths
        .par_iter()
        .filter_map(|path| {
            let res = read_spec(path).and_then(|spec| run_compute(&spec, opts, data).map(|r| (spec, r)));
            match res {
                Ok((spec, recs)) => {
                    let last = recs.last().map(|r| format!("level {} genus {} a {:?}", r.level, r.genus, r.kernels));
                    lines.lock().expect("lock").push(format!("{}: {}", spec.name, last.unwrap_or_default()));
                    None
                }
                Err(e) => Some(format!("{}: {e:#}", path.display())),
            }
        })
        .collect();
    let mut lines = lines.into_inner().expect("lock");
    lines.sort();
    for l in &lines {
        writeln!(out, "{l}")?;
    }
    for f in &failures {
        writeln!(out, "error: {f}")?;
    }
    if failures.is_empty() {
        Ok(Outcome::Ok)
    } else {
        bail!("{} of {} specs failed", failures.len(), paths.len())
    }
}

pub fn cmd_verify(suite: &str, out: &mut dyn Write) -> Result<Outcome> {
    let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite] };
    let mut reports: Vec<SuiteReport> = Vec::new();
    for name in names {
        let rep = run_suite(name)?;
        write!(out, "{rep}")?;
        reports.push(rep);
    }
    Ok(if reports.iter().all(SuiteReport::passed) { Outcome::Ok } else { Outcome::Mismatch })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ExportFormat {
    Csv,
    Json,
}

pub fn cmd_export(format: ExportFormat, spec_hash: Option<&str>, data: &DataDir, out: &mut dyn Write) -> Result<Outcome> {
    let mut recs = data.store()?.latest()?;
    if let Some(h) = spec_hash {
        recs.retain(|r| r.spec_hash == h);
    }
    match format {
        ExportFormat::Json => writeln!(out, "{}", serde_json::to_string_pretty(&recs)?)?,
        ExportFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record([
                "spec_hash",
                "spec_name",
                "p",
                "k",
                "d",
                "level",
                "genus",
                "kernels",
                "wall_time",
                "tool_version",
                "timestamp",
            ])?;
            for r in &recs {
                let ks: Vec<String> = r.kernels.iter().map(|k| k.to_string()).collect();
                w.write_record([
                    r.spec_hash.clone(),
                    r.spec_name.clone(),
                    r.p.to_string(),
                    r.k.to_string(),
                    r.d.map(|d| d.to_string()).unwrap_or_default(),
                    r.level.to_string(),
                    r.genus.to_string(),
                    ks.join(";"),
                    format!("{:.6}", r.wall_time),
                    r.tool_version.clone(),
                    r.timestamp.to_string(),
                ])?;
            }
            w.flush()?;
        }
    }
    Ok(Outcome::Ok)
}
