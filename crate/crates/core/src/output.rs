//! CSV emitters.
//!
//! | file | columns |
//! |------|---------|
//! | track | `t,x,y` |
//! | bearings | `t,clean,noisy` |
//! | solver report | `solver,r,course,speed,cost,fevals` |
//! | GA inner runs | `run,x0,y0,course,speed,cost,fevals` |
//! | CMA trace | `generation,sigma,best_cost,mean_r0,mean_course,mean_speed` |
//! | Monte Carlo runs | `run,r,course,speed,cost,fevals` |
//! | summary | `label,noise_sigma,runs,stat,r,course,speed,total_fevals` |

use std::io::Write;

use crate::cma::TraceRow;
use crate::error::{Result, TmaError};
use crate::ga::{GaConfig, GaReport};
use crate::harness::{Comparison, MonteCarloSummary, RunRecord, SweepResult};
use crate::kinematics::{BearingSeries, Track};
use crate::solver::SolverReport;

fn fmt(v: f64) -> String {
    v.to_string()
}

pub fn write_track<W: Write>(track: &Track, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "x", "y"])?;
    for (t, p) in track.times.iter().zip(&track.positions) {
        w.write_record([fmt(*t), fmt(p.x), fmt(p.y)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_bearings<W: Write>(clean: &BearingSeries, noisy: &BearingSeries, out: W) -> Result<()> {
    if clean.len() != noisy.len() {
        return Err(TmaError::LengthMismatch {
            left: clean.len(),
            right: noisy.len(),
        });
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "clean", "noisy"])?;
    for ((t, c), n) in clean.times.iter().zip(&clean.bearings_deg).zip(&noisy.bearings_deg) {
        w.write_record([fmt(*t), fmt(*c), fmt(*n)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_solver_report<W: Write>(report: &SolverReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["solver", "r", "course", "speed", "cost", "fevals"])?;
    let e = report.estimate;
    w.write_record([
        report.kind.to_string(),
        fmt(e.r0),
        fmt(e.course),
        fmt(e.speed),
        fmt(report.cost),
        report.fevals.to_string(),
    ])?;
    w.flush()?;
    Ok(())
}

/// One row per inner run; `fevals` is that run's share.
pub fn write_ga_report<W: Write>(report: &GaReport, config: &GaConfig, out: W) -> Result<()> {
    let per_run = config.population_size * (config.narrowing_generations + config.main_generations);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["run", "x0", "y0", "course", "speed", "cost", "fevals"])?;
    for (i, r) in report.inner.iter().enumerate() {
        w.write_record([
            i.to_string(),
            fmt(r.best.x0),
            fmt(r.best.y0),
            fmt(r.best.course),
            fmt(r.best.speed),
            fmt(r.cost),
            per_run.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_cma_trace<W: Write>(trace: &[TraceRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in trace {
        w.serialize(row)?;
    }
    if trace.is_empty() {
        w.write_record(["generation", "sigma", "best_cost", "mean_r0", "mean_course", "mean_speed"])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_run_records<W: Write>(records: &[RunRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["run", "r", "course", "speed", "cost", "fevals"])?;
    for r in records {
        w.write_record([
            r.run.to_string(),
            fmt(r.r),
            fmt(r.course),
            fmt(r.speed),
            fmt(r.cost),
            r.fevals.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

const SUMMARY_HEADER: [&str; 8] = ["label", "noise_sigma", "runs", "stat", "r", "course", "speed", "total_fevals"];

fn summary_rows<W: Write>(w: &mut csv::Writer<W>, label: &str, s: &MonteCarloSummary) -> Result<()> {
    let [r, c, sp] = s.stats();
    for (stat, (a, b, d)) in [
        ("mu", (r.mean, c.mean, sp.mean)),
        ("sigma", (r.std, c.std, sp.std)),
        ("abs_dev", (r.abs_dev, c.abs_dev, sp.abs_dev)),
    ] {
        w.write_record([
            label.to_string(),
            fmt(s.noise_sigma),
            s.runs.to_string(),
            stat.to_string(),
            fmt(a),
            fmt(b),
            fmt(d),
            s.total_fevals.to_string(),
        ])?;
    }
    Ok(())
}

/// Three rows (`mu`, `sigma`, `abs_dev`) per summary.
pub fn write_summary<W: Write>(label: &str, summary: &MonteCarloSummary, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    summary_rows(&mut w, label, summary)?;
    w.flush()?;
    Ok(())
}

pub fn write_sweep<W: Write>(label: &str, sweep: &SweepResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for (_, s) in &sweep.rows {
        summary_rows(&mut w, label, s)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_comparison<W: Write>(cmp: &Comparison, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for row in &cmp.rows {
        summary_rows(&mut w, &row.label, &row.summary)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::Candidate;

    #[test]
    fn summary_has_table_shape() {
        let recs = vec![
            RunRecord {
                run: 0,
                r: 4000.0,
                course: 90.0,
                speed: 10.0,
                cost: 0.1,
                fevals: 50,
            },
            RunRecord {
                run: 1,
                r: 4012.0,
                course: 90.0,
                speed: 10.0,
                cost: 0.2,
                fevals: 50,
            },
        ];
        let s = MonteCarloSummary::from_records(recs.clone(), Candidate::new(4006.0, 90.0, 10.0), 0.5);
        let mut buf = Vec::new();
        write_summary("cma", &s, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[1], "cma,0.5,2,mu,4006,90,10,100");
        assert!(lines[2].starts_with("cma,0.5,2,sigma,8.48"));

        let mut buf = Vec::new();
        write_run_records(&recs, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "run,r,course,speed,cost,fevals");
    }

    #[test]
    fn trace_header_present() {
        let mut buf = Vec::new();
        write_cma_trace(
            &[TraceRow {
                generation: 1,
                sigma: 0.2,
                best_cost: 3.0,
                mean_r0: 1.0,
                mean_course: 2.0,
                mean_speed: 3.0,
            }],
            &mut buf,
        )
        .unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("generation,sigma,best_cost,mean_r0,mean_course,mean_speed\n1,0.2,3.0,"));
    }
}
