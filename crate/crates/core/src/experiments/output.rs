use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::config::ExperimentId;
use super::runner::{ExperimentData, ExperimentResults, Metadata, Scheme, Variant};
use super::stats::Aggregate;

/// Metric names that may appear in [`ExperimentRecord::metric`]; per-variable
/// ranges appear as `range_min_<i>` and `range_max_<i>`.
pub const METRICS: [&str; 8] = [
    "error",
    "error_ba",
    "pressure",
    "penalty_residual",
    "lambda",
    "range_min_i",
    "range_max_i",
    "design_bits",
];

/// One metric value in long form.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRecord {
    pub experiment: ExperimentId,
    pub variant: String,
    pub run: usize,
    pub seed: u64,
    pub iteration: usize,
    pub metric: String,
    pub value: f64,
    pub meta: Metadata,
}

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub fn records(results: &ExperimentResults) -> Vec<ExperimentRecord> {
    let mut out = Vec::new();
    match &results.data {
        ExperimentData::ErrorVsBits(rows) => {
            for r in rows {
                let meta = Metadata {
                    num_bits: r.num_bits,
                    rho: 1.0,
                    num_reads: None,
                    range: crate::encoding::Interval { lo: f64::NAN, hi: f64::NAN },
                    solver: r.solver,
                };
                for (metric, value) in [("error", r.error), ("error_ba", r.error_ba)] {
                    out.push(ExperimentRecord {
                        experiment: results.id,
                        variant: format!("{}_N{}", r.solver, r.num_bits),
                        run: r.run,
                        seed: r.seed,
                        iteration: 0,
                        metric: metric.into(),
                        value,
                        meta: meta.clone(),
                    });
                }
            }
        }
        ExperimentData::History { variants, .. } => {
            for v in variants {
                for run in &v.runs {
                    for row in &run.rows {
                        let mut push = |metric: String, value: f64| {
                            out.push(ExperimentRecord {
                                experiment: results.id,
                                variant: v.label.clone(),
                                run: run.run,
                                seed: run.seed,
                                iteration: row.iteration,
                                metric,
                                value,
                                meta: v.meta.clone(),
                            })
                        };
                        push("error".into(), row.error);
                        if let Some(x) = row.error_ba {
                            push("error_ba".into(), x);
                        }
                        if let Some(x) = row.pressure {
                            push("pressure".into(), x);
                        }
                        if let Some(x) = row.penalty_residual {
                            push("penalty_residual".into(), x);
                        }
                        if let Some(x) = row.lambda {
                            push("lambda".into(), x);
                        }
                        for (i, r) in row.ranges.iter().enumerate() {
                            push(format!("range_min_{i}"), r.lo);
                            push(format!("range_max_{i}"), r.hi);
                        }
                        if let Some(x) = row.design_bits {
                            push("design_bits".into(), x as f64);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Writes a header and rows; an empty row set yields a header-only file.
pub fn write_csv(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(r).map_err(csv_err)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// Header of the error-vs-bits aggregate.
pub const ERROR_VS_BITS_HEADER: [&str; 7] = [
    "N",
    "error_ba_median",
    "error_median",
    "error_min",
    "error_max",
    "error_q25",
    "error_q75",
];

/// Header of an iteration-history aggregate.
pub const HISTORY_HEADER: [&str; 4] = ["iteration", "error_median", "error_q25", "error_q75"];

/// Iteration history of one variant: one row per iteration up to the
/// longest run, with stopped runs carried at their final error.
pub fn history_rows(v: &Variant) -> Result<Vec<Vec<String>>> {
    (0..v.max_iterations())
        .map(|k| {
            let a = Aggregate::from_values(&v.errors_at(k))?;
            Ok(vec![k.to_string(), fmt_f64(a.median), fmt_f64(a.q25), fmt_f64(a.q75)])
        })
        .collect()
}

fn run_rows(v: &Variant, scheme: Scheme) -> (Vec<String>, Vec<Vec<String>>) {
    let num_ranges = v
        .runs
        .iter()
        .flat_map(|r| r.rows.first())
        .map(|row| row.ranges.len())
        .max()
        .unwrap_or(0);
    let mut header = strings(&["run", "seed", "iteration", "error", "error_ba"]);
    match scheme {
        Scheme::Fsi => header.extend(strings(&["error_step", "pressure", "delta_u"])),
        Scheme::Penalty => header.extend(strings(&["penalty_residual", "lambda", "design_bits"])),
    }
    for i in 0..num_ranges {
        header.push(format!("range_min_{i}"));
        header.push(format!("range_max_{i}"));
    }
    let mut rows = Vec::new();
    for run in &v.runs {
        for row in &run.rows {
            let mut r = vec![
                run.run.to_string(),
                run.seed.to_string(),
                row.iteration.to_string(),
                fmt_f64(row.error),
                fmt_opt(row.error_ba),
            ];
            match scheme {
                Scheme::Fsi => r.extend([fmt_opt(row.error_step), fmt_opt(row.pressure), fmt_opt(row.delta_u)]),
                Scheme::Penalty => r.extend([
                    fmt_opt(row.penalty_residual),
                    fmt_opt(row.lambda),
                    row.design_bits.map(|b| b.to_string()).unwrap_or_default(),
                ]),
            }
            for range in &row.ranges {
                r.push(fmt_f64(range.lo));
                r.push(fmt_f64(range.hi));
            }
            rows.push(r);
        }
    }
    (header, rows)
}

fn summary_rows(variants: &[Variant], scheme: Scheme) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut header = strings(&[
        "variant",
        "runs",
        "converged_runs",
        "iterations_median",
        "final_error_median",
        "final_error_q25",
        "final_error_q75",
        "final_error_min",
        "final_error_max",
    ]);
    if scheme == Scheme::Penalty {
        header.push("optimal_design_runs".into());
    }
    let mut rows = Vec::new();
    for v in variants {
        let a = Aggregate::from_values(&v.final_errors())?;
        let iters: Vec<f64> = v.runs.iter().map(|r| r.rows.len() as f64).collect();
        let mut r = vec![
            v.label.clone(),
            v.runs.len().to_string(),
            v.runs.iter().filter(|r| r.converged).count().to_string(),
            fmt_f64(Aggregate::from_values(&iters)?.median),
            fmt_f64(a.median),
            fmt_f64(a.q25),
            fmt_f64(a.q75),
            fmt_f64(a.min),
            fmt_f64(a.max),
        ];
        if scheme == Scheme::Penalty {
            r.push(v.runs.iter().filter(|r| r.optimal_design == Some(true)).count().to_string());
        }
        rows.push(r);
    }
    Ok((header, rows))
}

fn record_rows(results: &ExperimentResults) -> (Vec<String>, Vec<Vec<String>>) {
    let header = strings(&[
        "experiment", "variant", "run", "seed", "iteration", "metric", "value", "num_bits", "rho", "num_reads",
        "range_min", "range_max", "solver",
    ]);
    let rows = records(results)
        .into_iter()
        .map(|r| {
            vec![
                r.experiment.as_str().to_string(),
                r.variant,
                r.run.to_string(),
                r.seed.to_string(),
                r.iteration.to_string(),
                r.metric,
                fmt_f64(r.value),
                r.meta.num_bits.to_string(),
                fmt_f64(r.meta.rho),
                r.meta.num_reads.map(|n| n.to_string()).unwrap_or_default(),
                if r.meta.range.lo.is_nan() { String::new() } else { fmt_f64(r.meta.range.lo) },
                if r.meta.range.hi.is_nan() { String::new() } else { fmt_f64(r.meta.range.hi) },
                r.meta.solver.to_string(),
            ]
        })
        .collect();
    (header, rows)
}

/// Writes every CSV of an experiment into `out_dir` and returns the paths
/// in the order written.
pub fn write_results(results: &ExperimentResults, out_dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir).map_err(|source| Error::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let prefix = results.id.as_str().to_lowercase();
    let mut written = Vec::new();
    let mut emit = |name: String, header: Vec<String>, rows: Vec<Vec<String>>| -> Result<()> {
        let path = out_dir.join(name);
        write_csv(&path, &header, &rows)?;
        written.push(path);
        Ok(())
    };
    match &results.data {
        ExperimentData::ErrorVsBits(rows) => {
            let mut solvers: Vec<_> = rows.iter().map(|r| r.solver).collect();
            solvers.sort();
            solvers.dedup();
            for solver in solvers {
                let mut bits: Vec<usize> = rows.iter().filter(|r| r.solver == solver).map(|r| r.num_bits).collect();
                bits.sort();
                bits.dedup();
                let table = bits
                    .into_iter()
                    .map(|n| {
                        let group: Vec<_> = rows.iter().filter(|r| r.solver == solver && r.num_bits == n).collect();
                        let e = Aggregate::from_values(&group.iter().map(|r| r.error).collect::<Vec<_>>())?;
                        let ba = Aggregate::from_values(&group.iter().map(|r| r.error_ba).collect::<Vec<_>>())?;
                        Ok(vec![
                            n.to_string(),
                            fmt_f64(ba.median),
                            fmt_f64(e.median),
                            fmt_f64(e.min),
                            fmt_f64(e.max),
                            fmt_f64(e.q25),
                            fmt_f64(e.q75),
                        ])
                    })
                    .collect::<Result<Vec<_>>>()?;
                emit(format!("{prefix}_{solver}.csv"), strings(&ERROR_VS_BITS_HEADER), table)?;
            }
            let run_table = rows
                .iter()
                .map(|r| {
                    vec![
                        r.solver.to_string(),
                        r.num_bits.to_string(),
                        r.run.to_string(),
                        r.seed.to_string(),
                        fmt_f64(r.error),
                        fmt_f64(r.error_ba),
                    ]
                })
                .collect();
            emit(
                format!("{prefix}_runs.csv"),
                strings(&["solver", "N", "run", "seed", "error", "error_ba"]),
                run_table,
            )?;
        }
        ExperimentData::History { scheme, variants } => {
            for v in variants {
                let (header, rows) = run_rows(v, *scheme);
                emit(format!("{prefix}_{}_runs.csv", v.label), header, rows)?;
                emit(format!("{prefix}_{}_history.csv", v.label), strings(&HISTORY_HEADER), history_rows(v)?)?;
            }
            let (header, rows) = summary_rows(variants, *scheme)?;
            emit(format!("{prefix}_summary.csv"), header, rows)?;
        }
    }
    let (header, rows) = record_rows(results);
    emit(format!("{prefix}_records.csv"), header, rows)?;
    Ok(written)
}
