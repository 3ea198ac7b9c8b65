//! The four verbs. Each returns `Ok(())` for exit code 0.

use std::path::{Path, PathBuf};

use log::info;
use serde::Serialize;
use serde_json::Value;

use scf_core::construction::run as run_construction;
use scf_core::verify::{log_law_sweep, report, Report, ReportInputs, SweepRow, SweepSpec};
use scf_core::{GroupFunction, IndexSet};

use crate::artifacts::{self, BFile, ComplexVec, Fields, SpectrumRow};
use crate::config::{demo_config, RunConfig};
use crate::error::{CliError, CliResult};

/// Absolute tolerance (scaled by magnitude above 1) for `verify`.
pub const VERIFY_TOL: f64 = 1e-8;
/// Share of sweep rows that have to succeed.
pub const SWEEP_MIN_OK: f64 = 0.75;

fn ensure_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}

fn out_dir(cli: Option<&Path>, config: &RunConfig, fallback: &str) -> PathBuf {
    cli.map(Path::to_path_buf).or_else(|| config.out.clone()).unwrap_or_else(|| PathBuf::from(fallback))
}

/// Runs the construction and writes report, `b`, spectrum table and plot, and raw fields.
pub fn run(config: &RunConfig, out: Option<&Path>) -> CliResult<PathBuf> {
    let dir = out_dir(out, config, "scf-out");
    let res = config.resolve()?;
    let result = run_construction(&res.a, &res.w, &res.pair, &res.basis, &res.schedules, &res.options)?;
    ensure_dir(&dir)?;
    let st = &result.state;
    info!("run finished after {} steps, |b| = {}", st.level, result.b.len());

    let rows = artifacts::spectrum_rows(&result.f_final, &st.k_set, &st.pair.r, &st.pair.s);
    let fields = Fields {
        config: config.clone(),
        a: st.a.to_vec(),
        w: st.w.real_parts(),
        f_final: ComplexVec::from_function(&result.f_final),
        f00: ComplexVec::from_function(&st.f00),
        k_set: st.k_set.to_vec(),
        r: st.pair.r.to_vec(),
        s: st.pair.s.to_vec(),
        t_final: result.t_final,
        epsilon: st.schedules.epsilon,
        iterations: st.level,
    };
    artifacts::write_json(&dir.join(artifacts::FIELDS), &fields)?;
    artifacts::write_json(&dir.join(artifacts::B), &BFile { orders: config.group.clone(), b: result.b.to_vec() })?;
    artifacts::write_atomic(&dir.join(artifacts::SPECTRUM_CSV), &artifacts::csv_bytes(&rows)?)?;
    let svg = artifacts::spectrum_svg(&rows, &st.k_set, &st.pair.r, &st.pair.s);
    artifacts::write_atomic(&dir.join(artifacts::SPECTRUM_SVG), svg.as_bytes())?;
    // the report goes last, so a complete report implies complete artifacts
    artifacts::write_json(&dir.join(artifacts::REPORT), &result.report)?;
    Ok(dir)
}

fn require(dir: &Path, name: &str) -> CliResult<PathBuf> {
    let p = dir.join(name);
    if p.is_file() {
        Ok(p)
    } else {
        Err(CliError::Io(format!("missing {}", p.display())))
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= VERIFY_TOL * a.abs().max(b.abs()).max(1.0) || (a.is_nan() && b.is_nan())
}

/// Field-by-field comparison of two JSON values; numbers within [`VERIFY_TOL`].
fn diff_values(path: &str, stored: &Value, fresh: &Value, out: &mut Vec<String>) {
    match (stored, fresh) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap_or(f64::NAN), y.as_f64().unwrap_or(f64::NAN));
            if !close(x, y) {
                out.push(format!("{path}: stored {x}, recomputed {y}"));
            }
        }
        (Value::Object(a), Value::Object(b)) => {
            let mut keys: Vec<&String> = a.keys().chain(b.keys()).collect();
            keys.sort();
            keys.dedup();
            for k in keys {
                let sub = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                match (a.get(k), b.get(k)) {
                    (Some(x), Some(y)) => diff_values(&sub, x, y, out),
                    (Some(_), None) => out.push(format!("{sub}: not recomputed")),
                    (None, Some(_)) => out.push(format!("{sub}: missing from stored report")),
                    (None, None) => {}
                }
            }
        }
        (Value::Array(a), Value::Array(b)) if a.len() == b.len() => {
            for (i, (x, y)) in a.iter().zip(b).enumerate() {
                diff_values(&format!("{path}[{i}]"), x, y, out);
            }
        }
        (x, y) if x == y => {}
        (x, y) => out.push(format!("{path}: stored {x}, recomputed {y}")),
    }
}

fn diff_spectrum(stored: &[SpectrumRow], fresh: &[SpectrumRow], out: &mut Vec<String>) {
    if stored.len() != fresh.len() {
        out.push(format!("spectrum.csv: {} rows, expected {}", stored.len(), fresh.len()));
        return;
    }
    for (s, f) in stored.iter().zip(fresh) {
        let same = s.char_index == f.char_index
            && close(s.abs_coeff, f.abs_coeff)
            && (s.in_k, s.in_r, s.in_s) == (f.in_k, f.in_r, f.in_s);
        if !same {
            out.push(format!("spectrum.csv: row for character {} differs", f.char_index));
        }
    }
}

/// Recomputes the report from the raw artifacts and compares it with `report.json`.
pub fn verify(dir: &Path) -> CliResult<Vec<String>> {
    let report_path = require(dir, artifacts::REPORT)?;
    let b_path = require(dir, artifacts::B)?;
    let csv_path = require(dir, artifacts::SPECTRUM_CSV)?;
    let fields_path = require(dir, artifacts::FIELDS)?;

    let stored: Value = artifacts::read_json(&report_path)?;
    let bfile: BFile = artifacts::read_json(&b_path)?;
    let fields: Fields = artifacts::read_json(&fields_path)?;
    let rows = artifacts::read_spectrum_csv(&csv_path)?;

    let res = fields.config.resolve()?;
    let g = &res.group;
    let n = g.len();
    if bfile.orders != fields.config.group {
        return Err(CliError::Config("b.json belongs to a different group".into()));
    }
    let set = |what: &str, v: &[usize]| -> CliResult<IndexSet> {
        match v.iter().find(|&&i| i >= n) {
            Some(i) => Err(CliError::Config(format!("{what}: index {i} out of range"))),
            None => Ok(IndexSet::from_indices(n, v.iter().copied())),
        }
    };
    let function = |what: &str, v: &ComplexVec| -> CliResult<GroupFunction> {
        let vals = v.to_values()?;
        if vals.len() != n {
            return Err(CliError::Config(format!("{what}: {} values for |G| = {n}", vals.len())));
        }
        Ok(GroupFunction::from_complex(g, vals))
    };
    if fields.w.len() != n {
        return Err(CliError::Config("fields.json: weight has the wrong length".into()));
    }
    let a = set("a", &fields.a)?;
    let b = set("b.json", &bfile.b)?;
    let k = set("K", &fields.k_set)?;
    let r = set("R", &fields.r)?;
    let s = set("S", &fields.s)?;
    let w = GroupFunction::from_real(g, &fields.w);
    let f_final = function("f_final", &fields.f_final)?;
    let f00 = function("f00", &fields.f00)?;

    let fresh: Report = report(&ReportInputs {
        a: &a,
        b: &b,
        w: &w,
        f_final: &f_final,
        f00: &f00,
        k_set: &k,
        r: &r,
        s: &s,
        basis: &res.basis,
        t_final: fields.t_final,
        epsilon: fields.epsilon,
        iterations: fields.iterations,
    })?;
    let fresh = serde_json::to_value(&fresh).map_err(|e| CliError::Io(e.to_string()))?;
    let mut diffs = Vec::new();
    diff_values("", &stored, &fresh, &mut diffs);
    diff_spectrum(&rows, &artifacts::spectrum_rows(&f_final, &k, &r, &s), &mut diffs);
    if diffs.is_empty() {
        Ok(diffs)
    } else {
        Err(CliError::Mismatch(diffs))
    }
}

#[derive(Serialize)]
struct SweepCsvRow<'a> {
    epsilon: f64,
    u_norm: Option<f64>,
    log_term: f64,
    ratio: Option<f64>,
    iterations: Option<usize>,
    runtime_ms: u64,
    error: &'a str,
}

impl<'a> From<&'a SweepRow> for SweepCsvRow<'a> {
    fn from(r: &'a SweepRow) -> Self {
        Self {
            epsilon: r.epsilon,
            u_norm: r.u_norm,
            log_term: r.log_term,
            ratio: r.ratio,
            iterations: r.iterations,
            runtime_ms: r.runtime_ms,
            error: r.error.as_deref().unwrap_or(""),
        }
    }
}

/// One construction per ε; writes `sweep.csv` and `fit.json`.
pub fn sweep(config: &RunConfig, out: Option<&Path>) -> CliResult<PathBuf> {
    let dir = out_dir(out, config, "scf-sweep");
    let eps = config
        .eps_list
        .clone()
        .ok_or_else(|| CliError::Config("sweep needs eps_list in the config".into()))?;
    let res = config.resolve()?;
    let spec = SweepSpec {
        a: &res.a,
        w: &res.w,
        pair: &res.pair,
        basis: &res.basis,
        n_max: res.schedules.n_max,
        g_tol: res.schedules.g_tol,
        options: &res.options,
    };
    let table = log_law_sweep(&spec, &eps).map_err(|e| match e {
        scf_core::Error::InvalidSchedule(m) => CliError::Config(m),
        other => CliError::Core(other),
    })?;
    ensure_dir(&dir)?;
    let rows: Vec<SweepCsvRow> = table.rows.iter().map(SweepCsvRow::from).collect();
    artifacts::write_atomic(&dir.join(artifacts::SWEEP_CSV), &artifacts::csv_bytes(&rows)?)?;
    artifacts::write_json(&dir.join(artifacts::FIT), &table.fit)?;

    let ok = table.rows.iter().filter(|r| r.error.is_none()).count();
    let total = table.rows.len();
    if ok == 0 {
        return Err(CliError::Sweep(format!("all {total} rows failed")));
    }
    let enough = ok as f64 >= SWEEP_MIN_OK * total as f64;
    let fit_ok = table.fit.passed || table.fit.status == "insufficient points";
    if enough && fit_ok {
        Ok(dir)
    } else if !enough {
        Err(CliError::Sweep(format!("only {ok} of {total} rows succeeded")))
    } else {
        Err(CliError::Sweep(format!("fit criterion failed ({})", table.fit.status)))
    }
}

/// Runs the built-in configuration and verifies the result.
pub fn demo(out: Option<&Path>, seed: Option<u64>, no_checks: bool) -> CliResult<PathBuf> {
    let config = demo_config().with_overrides(seed, no_checks);
    let dir = out.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("scf-demo"));
    ensure_dir(&dir)?;
    artifacts::write_json(&dir.join("config.json"), &config)?;
    run(&config, Some(&dir))?;
    verify(&dir)?;
    Ok(dir)
}
