//! `twine vote`: plurality voting over saved variant counts.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::Args;
use rayon::prelude::*;
use twine::bench::Method;
use twine::noise::Counts;
use twine::vote::{vote, Distribution, VotingConfig};
use twine::Error;

use crate::bench::VariantIndex;
use crate::files::{read_json, write};
use crate::manifest::output_dir;
use crate::svg::{Chart, Series};
use crate::Usage;

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("input").required(true).args(["counts_dir", "files"]))]
pub struct VoteArgs {
    /// Directory written by `bench` with `variants` > 0.
    #[arg(long)]
    counts_dir: Option<PathBuf>,
    /// Variant index (default: COUNTS_DIR/index.json).
    #[arg(long, requires = "counts_dir")]
    manifest: Option<PathBuf>,
    /// Vote over these counts files directly and print the outcome.
    #[arg(long, num_args = 1..)]
    files: Option<Vec<PathBuf>>,
    /// Bitstring whose voted probability to report (files mode).
    #[arg(long, requires = "files")]
    target: Option<String>,
    /// Fixed threshold instead of the automatic choice.
    #[arg(long)]
    threshold: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(args: VoteArgs) -> anyhow::Result<()> {
    match (&args.counts_dir, &args.files) {
        (Some(dir), _) => run_dir(
            dir,
            args.manifest.as_deref(),
            args.threshold,
            args.out.as_deref(),
        ),
        (None, Some(files)) => run_files(files, args.target.as_deref(), args.threshold),
        (None, None) => Err(Usage::err("give --counts-dir or --files")),
    }
}

fn config(variants: Vec<Distribution>, threshold: Option<usize>) -> anyhow::Result<VotingConfig> {
    let mut c = VotingConfig::auto(variants);
    if let Some(t) = threshold {
        if t == 0 || t > c.variants.len() {
            return Err(Usage::err(format!(
                "threshold {t} outside 1..={}",
                c.variants.len()
            )));
        }
        c.threshold = t;
    }
    Ok(c)
}

fn run_files(
    files: &[PathBuf],
    target: Option<&str>,
    threshold: Option<usize>,
) -> anyhow::Result<()> {
    let counts: Vec<Counts> = files
        .iter()
        .map(|f| read_json(f))
        .collect::<anyhow::Result<_>>()?;
    let target = target
        .map(str::to_string)
        .or_else(|| counts[0].target.clone());
    let out = vote(&config(
        counts.iter().map(Counts::distribution).collect(),
        threshold,
    )?)?;
    let mut json = serde_json::to_value(&out)?;
    if let Some(t) = target {
        json["target"] = t.clone().into();
        json["success"] = out.success(&t).into();
    }
    println!("{}", serde_json::to_string_pretty(&json)?);
    Ok(())
}

struct CellScore {
    method: Method,
    n: usize,
    threshold: usize,
    raw: f64,
    voted: f64,
    rejected: f64,
}

fn run_dir(
    dir: &Path,
    manifest: Option<&Path>,
    threshold: Option<usize>,
    out: Option<&Path>,
) -> anyhow::Result<()> {
    let index_path = manifest
        .map(Path::to_path_buf)
        .unwrap_or_else(|| dir.join("index.json"));
    if !index_path.exists() {
        let empty = std::fs::read_dir(dir)
            .with_context(|| format!("reading {}", dir.display()))?
            .next()
            .is_none();
        anyhow::bail!(
            "{}: no variant index at {}",
            if empty {
                "empty counts directory"
            } else {
                "not a counts directory"
            },
            index_path.display()
        );
    }
    let index: VariantIndex = read_json(&index_path)?;
    if index.cells.is_empty() || index.variants == 0 {
        anyhow::bail!("{} lists no variants", index_path.display());
    }
    let mut missing = Vec::new();
    for cell in &index.cells {
        if cell.files.len() != index.variants {
            missing.push(format!(
                "{} n={} k={}: {} of {} variants listed",
                cell.method,
                cell.n,
                cell.k,
                cell.files.len(),
                index.variants
            ));
        }
        missing.extend(
            cell.files
                .iter()
                .filter(|f| !dir.join(f).is_file())
                .map(|f| f.display().to_string()),
        );
    }
    if !missing.is_empty() {
        anyhow::bail!("missing variant files:\n  {}", missing.join("\n  "));
    }

    let scores: Vec<CellScore> = index
        .cells
        .par_iter()
        .map(|cell| {
            let mut dists = Vec::with_capacity(cell.files.len());
            for f in &cell.files {
                let c: Counts = read_json(&dir.join(f))?;
                if c.n != cell.n {
                    return Err(Usage::err(format!(
                        "{}: {} qubits, index says {}",
                        f.display(),
                        c.n,
                        cell.n
                    )));
                }
                dists.push(c.distribution());
            }
            let raw = dists
                .iter()
                .map(|d| d.get(&cell.target).copied().unwrap_or(0.0))
                .sum::<f64>()
                / dists.len() as f64;
            let cfg = config(dists, threshold)?;
            let t = cfg.threshold;
            let (voted, rejected) = match vote(&cfg) {
                Ok(o) => (o.success(&cell.target), o.rejected_fraction),
                Err(Error::EmptyOutcome) => (0.0, 1.0),
                Err(e) => return Err(e.into()),
            };
            Ok(CellScore {
                method: cell.method,
                n: cell.n,
                threshold: t,
                raw,
                voted,
                rejected,
            })
        })
        .collect::<anyhow::Result<_>>()?;

    // (n, method) -> cells, in index order of first appearance per method
    let mut order: Vec<Method> = Vec::new();
    let mut groups: BTreeMap<(usize, usize), Vec<&CellScore>> = BTreeMap::new();
    for s in &scores {
        let pos = order
            .iter()
            .position(|&m| m == s.method)
            .unwrap_or_else(|| {
                order.push(s.method);
                order.len() - 1
            });
        groups.entry((s.n, pos)).or_default().push(s);
    }
    let mut csv = String::from(
        "n,method,variants,threshold,cells,raw_success,voted_success,rejected_fraction\n",
    );
    let mut series: BTreeMap<(usize, bool), Vec<(f64, f64)>> = BTreeMap::new();
    for (&(n, pos), cells) in &groups {
        let mean =
            |f: fn(&CellScore) -> f64| cells.iter().map(|c| f(c)).sum::<f64>() / cells.len() as f64;
        let (tmin, tmax) = cells.iter().fold((usize::MAX, 0), |(a, b), c| {
            (a.min(c.threshold), b.max(c.threshold))
        });
        let t = if tmin == tmax {
            tmin.to_string()
        } else {
            format!("{tmin}-{tmax}")
        };
        let (raw, voted) = (mean(|c| c.raw), mean(|c| c.voted));
        writeln!(
            csv,
            "{n},{},{},{t},{},{raw:.6},{voted:.6},{:.6}",
            order[pos],
            index.variants,
            cells.len(),
            mean(|c| c.rejected)
        )
        .unwrap();
        series
            .entry((pos, false))
            .or_default()
            .push((n as f64, raw));
        series
            .entry((pos, true))
            .or_default()
            .push((n as f64, voted));
    }
    let out_dir = output_dir(out, None);
    write(&out_dir.join("voted.csv"), &csv)?;
    let chart = Chart {
        title: format!(
            "Average result success probability, {} variants",
            index.variants
        ),
        x_label: "qubits n".into(),
        y_label: "success probability".into(),
        series: series
            .into_iter()
            .map(|((pos, voted), points)| Series {
                name: format!("{} {}", order[pos], if voted { "voted" } else { "raw" }),
                points,
            })
            .collect(),
        inset: None,
    };
    write(&out_dir.join("voted.svg"), &chart.render())?;
    print!("{csv}");
    Ok(())
}
