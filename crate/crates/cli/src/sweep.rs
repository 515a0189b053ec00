//! Parameter sweeps: a cartesian product of numeric axes applied to a base
//! config, executed on a bounded worker pool, one report per run plus a
//! summary CSV.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Mutex;

use anyhow::{bail, Context, Result};

use crate::config::RunConfig;
use crate::run::{exit_code, simulate};

/// One sweep axis: a config field and the values it takes.
#[derive(Debug, Clone)]
pub struct Axis {
    pub key: String,
    pub values: Vec<f64>,
}

/// Parses `key=v1,v2,v3` or `key=start:end:count` (inclusive linspace).
pub fn parse_axis(spec: &str) -> Result<Axis> {
    let (key, rest) = spec
        .split_once('=')
        .with_context(|| format!("axis {spec:?} must look like key=values"))?;
    let values = if rest.contains(':') {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            bail!("linspace axis must be start:end:count, got {rest:?}");
        }
        let start: f64 = parts[0].parse().context("axis start")?;
        let end: f64 = parts[1].parse().context("axis end")?;
        let count: usize = parts[2].parse().context("axis count")?;
        if count < 1 {
            bail!("axis count must be at least 1");
        }
        (0..count)
            .map(|i| {
                if count == 1 {
                    start
                } else {
                    start + (end - start) * i as f64 / (count - 1) as f64
                }
            })
            .collect()
    } else {
        rest.split(',')
            .map(|v| v.trim().parse::<f64>().with_context(|| format!("axis value {v:?}")))
            .collect::<Result<Vec<f64>>>()?
    };
    if values.is_empty() {
        bail!("axis {key:?} has no values");
    }
    Ok(Axis { key: key.to_string(), values })
}

/// Applies one axis value to a config; the key namespaces mirror the config
/// sections.
pub fn apply_axis(cfg: &mut RunConfig, key: &str, value: f64) -> Result<()> {
    use crate::config::IcConfig::*;
    match key {
        "params.alpha" | "params.beta" | "params.gamma" | "params.big_gamma" => {
            let p = cfg
                .params
                .as_mut()
                .context("axis addresses [params] but the config uses [rotation]")?;
            match key {
                "params.alpha" => p.alpha = value,
                "params.beta" => p.beta = value,
                "params.gamma" => p.gamma = value,
                _ => p.big_gamma = value,
            }
        }
        "rotation.omega" => {
            cfg.rotation
                .as_mut()
                .context("axis addresses [rotation] but the config uses [params]")?
                .omega = value;
        }
        "ic.amplitude" | "ic.width" | "ic.center" => {
            let (a, w, c) = match &mut cfg.ic {
                Gaussian { amplitude, width, center }
                | Sech2 { amplitude, width, center }
                | MomentumBump { amplitude, width, center }
                | MomentumOdd { amplitude, width, center } => (amplitude, width, center),
                Table { .. } => bail!("table initial data has no {key} to sweep"),
            };
            match key {
                "ic.amplitude" => *a = value,
                "ic.width" => *w = value,
                _ => *c = value,
            }
        }
        "time.t_end" => cfg.time.t_end = value,
        other => bail!("unknown sweep axis {other:?}"),
    }
    Ok(())
}

/// Worker count: `GCH_WORKERS` override, else available parallelism.
pub fn worker_count() -> usize {
    std::env::var("GCH_WORKERS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&v| v >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism().map(|p| p.get()).unwrap_or(1)
        })
}

struct SweepRow {
    index: usize,
    values: Vec<f64>,
    outcome: Result<(String, f64, bool, bool, bool, i32)>,
}

/// Runs the cartesian product, writes per-run artifacts into `out_dir` and
/// returns the summary CSV text.  Per-run failures are recorded and the
/// sweep continues.
pub fn run_sweep(base: &RunConfig, axes: &[Axis], out_dir: &Path) -> Result<String> {
    std::fs::create_dir_all(out_dir)?;
    let mut points: Vec<Vec<f64>> = vec![vec![]];
    for axis in axes {
        points = points
            .iter()
            .flat_map(|p| {
                axis.values.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    let queue: Mutex<VecDeque<(usize, Vec<f64>)>> =
        Mutex::new(points.into_iter().enumerate().collect());
    let rows: Mutex<Vec<SweepRow>> = Mutex::new(Vec::new());
    let workers = worker_count();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let Some((index, values)) = queue.lock().expect("queue").pop_front() else {
                    return;
                };
                let outcome = run_point(base, axes, &values, index, out_dir);
                rows.lock().expect("rows").push(SweepRow { index, values, outcome });
            });
        }
    });
    let mut rows = rows.into_inner().expect("rows");
    rows.sort_by_key(|r| r.index);

    let mut csv = String::from("run");
    for axis in axes {
        write!(csv, ",{}", axis.key)?;
    }
    csv.push_str(
        ",classification,t_stop,exit_code,breaking_holds,single_sign_holds,neg_then_pos_holds,note\n",
    );
    for row in &rows {
        write!(csv, "{}", row.index)?;
        for v in &row.values {
            write!(csv, ",{v}")?;
        }
        match &row.outcome {
            Ok((class, t_stop, brk, single, split, code)) => {
                writeln!(csv, ",{class},{t_stop},{code},{brk},{single},{split},")?;
            }
            Err(e) => {
                writeln!(csv, ",error,,,,,,\"{}\"", e.to_string().replace('"', "'"))?;
            }
        }
    }
    Ok(csv)
}

fn run_point(
    base: &RunConfig,
    axes: &[Axis],
    values: &[f64],
    index: usize,
    out_dir: &Path,
) -> Result<(String, f64, bool, bool, bool, i32)> {
    let mut cfg = base.clone();
    for (axis, &v) in axes.iter().zip(values) {
        apply_axis(&mut cfg, &axis.key, v)?;
    }
    cfg.validate()?;
    let (report, csv) = simulate(&cfg, false, false)?;
    std::fs::write(out_dir.join(format!("run_{index:04}.csv")), csv)?;
    std::fs::write(
        out_dir.join(format!("run_{index:04}.json")),
        serde_json::to_string_pretty(&report)?,
    )?;
    Ok((
        format!("{:?}", report.monitors.classification),
        report.t_stop,
        report.certificates.breaking.holds,
        report.certificates.global_single_sign.holds,
        report.certificates.global_neg_then_pos.holds,
        exit_code(report.monitors.classification),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_parsing_accepts_lists_and_linspace() {
        let a = parse_axis("ic.amplitude=0.1,0.2,0.3").unwrap();
        assert_eq!(a.values, vec![0.1, 0.2, 0.3]);
        let b = parse_axis("params.alpha=0:1:5").unwrap();
        assert_eq!(b.values, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(parse_axis("nonsense").is_err());
        assert!(parse_axis("params.alpha=0:1").is_err());
    }

    #[test]
    fn unknown_axis_key_is_rejected() {
        let cfg_text = r#"
            [grid]
            half_length = 20.0
            n = 256
            [time]
            t_end = 1.0
            [params]
            [ic]
            kind = "gaussian"
            amplitude = 0.2
            width = 1.0
        "#;
        let mut cfg = RunConfig::from_str(cfg_text).unwrap();
        assert!(apply_axis(&mut cfg, "grid.n", 512.0).is_err());
        assert!(apply_axis(&mut cfg, "rotation.omega", 0.5).is_err());
        apply_axis(&mut cfg, "params.alpha", 0.5).unwrap();
        assert_eq!(cfg.params.as_ref().unwrap().alpha, 0.5);
    }
}
