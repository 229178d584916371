//! Writing run artifacts.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::Resolved;
use crate::experiments::Outcome;

/// Everything needed to repeat a run. Deliberately free of timestamps so
/// that repeated runs produce identical bytes.
#[derive(Debug, Serialize)]
pub struct RunMeta {
    pub version: &'static str,
    pub experiment: &'static str,
    pub seed: u64,
    /// Resolved config without `out_dir`, so a replay may write elsewhere.
    pub config: crate::config::ExperimentConfig,
    pub discarded_trajectories: usize,
    pub files: Vec<String>,
}

fn pretty(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn gnuplot_script(csv: &str, header: &str) -> String {
    let stem = csv.trim_end_matches(".csv");
    let mut s = format!("set datafile separator ','\nset key off\nset term pngcairo size 800,600\nset output '{stem}.png'\n");
    let cols: Vec<&str> = header.split(',').collect();
    s.push_str(&format!(
        "set xlabel '{}'\nset ylabel '{}'\n",
        cols[0],
        cols.get(1).unwrap_or(&"")
    ));
    if cols.len() >= 3 {
        s.push_str(&format!(
            "plot '{csv}' every ::1 using 1:2:3 with points pt 7 ps 0.3 palette\n"
        ));
    } else {
        s.push_str(&format!("plot '{csv}' every ::1 using 1:2 with lines\n"));
    }
    s
}

/// Writes all artifacts of `outcome` into the run's output directory and
/// returns their paths.
pub fn write_outcome(
    resolved: &Resolved,
    outcome: &Outcome,
    gnuplot: bool,
) -> io::Result<Vec<PathBuf>> {
    let dir = resolved.out_dir();
    fs::create_dir_all(&dir)?;
    let mut written: Vec<(String, String)> = outcome.files.clone();
    if let Some(fit) = &outcome.fit {
        written.push(("fit.json".into(), pretty(fit)));
    }
    if let Some(sweep) = &outcome.sweep {
        written.push(("sweep.json".into(), pretty(sweep)));
    }
    if !outcome.summary.is_empty() {
        written.push(("summary.json".into(), pretty(&outcome.summary)));
    }
    let mut scripts: Vec<(String, String)> = Vec::new();
    if gnuplot {
        scripts = outcome
            .files
            .iter()
            .filter(|(name, _)| name.ends_with(".csv"))
            .map(|(name, body)| {
                let header = body.lines().next().unwrap_or("");
                (name.replace(".csv", ".gp"), gnuplot_script(name, header))
            })
            .collect();
    }
    // Plot scripts are optional extras and are not part of the record.
    let mut names: Vec<String> = written.iter().map(|(n, _)| n.clone()).collect();
    names.push("run_meta.json".into());
    let config = crate::config::ExperimentConfig {
        out_dir: None,
        ..resolved.config.clone()
    };
    let meta = RunMeta {
        version: env!("CARGO_PKG_VERSION"),
        experiment: resolved.experiment.name(),
        seed: resolved.seed(),
        config,
        discarded_trajectories: outcome.discarded,
        files: names,
    };
    written.push(("run_meta.json".into(), pretty(&meta)));
    written.extend(scripts);
    let mut paths = Vec::with_capacity(written.len());
    for (name, body) in written {
        let path = dir.join(&name);
        fs::write(&path, body)?;
        paths.push(path);
    }
    Ok(paths)
}

/// Machine-readable failure report.
pub fn error_json(kind: &str, messages: &[String]) -> Value {
    json!({ "error": kind, "messages": messages })
}

/// Puts the error report on stderr and, when possible, into `dir/error.json`.
pub fn report_error(dir: Option<&Path>, report: &Value) {
    let text = pretty(report);
    eprint!("{text}");
    if let Some(dir) = dir {
        if fs::create_dir_all(dir).is_ok() {
            let _ = fs::write(dir.join("error.json"), text);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scripts_pick_plot_style_by_columns() {
        assert!(gnuplot_script("hist_phi.csv", "bin_center,density").contains("with lines"));
        assert!(gnuplot_script("snapshots_10.csv", "phi,n,color_index").contains("palette"));
    }
}
