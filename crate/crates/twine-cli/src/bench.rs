//! `twine bench`: fan (n, method) cells out to the thread pool and collect
//! rows in a fixed order, so the CSV does not depend on scheduling.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc;
use std::time::Duration;

use anyhow::Context;
use clap::Args;
use serde::{Deserialize, Serialize};
use twine::bench::{
    derive_seed, fourier_state_prep, run_compiled, BenchConfig, ExperimentRecord, Method,
};
use twine::noise::sample_noisy;

use crate::files::write;
use crate::manifest::{output_dir, Manifest};
use crate::svg::{Chart, Series};

#[derive(Args, Debug, Default)]
pub struct BenchArgs {
    /// JSON run manifest; flags below override its keys.
    manifest: Option<PathBuf>,
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    /// Comma-separated, e.g. `ptn-cnot,fowler`.
    #[arg(long, value_delimiter = ',', value_parser = crate::parse_method)]
    methods: Option<Vec<Method>>,
    #[arg(long)]
    p2: Option<f64>,
    #[arg(long)]
    r_idle: Option<f64>,
    #[arg(long)]
    q_ro: Option<f64>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    variants: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl BenchArgs {
    fn manifest(&self) -> anyhow::Result<Manifest> {
        let mut m = match &self.manifest {
            Some(p) => Manifest::load(p)?,
            None => Manifest::default(),
        };
        macro_rules! take {
            ($($field:ident).+ <- $flag:ident) => {
                if let Some(v) = self.$flag.clone() {
                    m.$($field).+ = v;
                }
            };
        }
        take!(n_min <- n_min);
        take!(n_max <- n_max);
        take!(methods <- methods);
        take!(noise.p2 <- p2);
        take!(noise.r_idle <- r_idle);
        take!(noise.q_ro <- q_ro);
        take!(m <- m);
        take!(shots <- shots);
        take!(variants <- variants);
        take!(seed <- seed);
        m.validate()?;
        Ok(m)
    }
}

/// Index of the variant counts written for voting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariantIndex {
    pub variants: usize,
    pub cells: Vec<VariantCell>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariantCell {
    pub method: Method,
    pub n: usize,
    pub k: usize,
    pub target: String,
    pub files: Vec<PathBuf>,
}

struct CellOutput {
    record: ExperimentRecord,
    /// (relative path, JSON) per variant file
    variant_files: Vec<(PathBuf, String)>,
    variant_cells: Vec<VariantCell>,
}

fn run_cell(man: &Manifest, n: usize, method: Method) -> anyhow::Result<CellOutput> {
    let config = BenchConfig {
        n,
        method,
        m: man.m,
        shots: man.shots,
        seed: man.seed,
        noise: man.noise,
    };
    let compiled = method.compile(n)?;
    let record = run_compiled(&config, &compiled)?;
    let mut variant_files = Vec::new();
    let mut variant_cells = Vec::new();
    if man.variants > 0 {
        for (l, st) in record.states.iter().enumerate() {
            let prep = fourier_state_prep(n, st.k)?;
            let mut files = Vec::new();
            for v in 0..man.variants {
                let seed = derive_seed(derive_seed(man.seed, 10_000 + v as u64), l as u64);
                let mut counts =
                    sample_noisy(&compiled.circuit, &prep, man.noise, man.shots, seed)?;
                counts.target = Some(st.target.clone());
                let rel = PathBuf::from(format!("{method}/n{n}/k{}_v{v}.json", st.k));
                variant_files.push((rel.clone(), serde_json::to_string_pretty(&counts)? + "\n"));
                files.push(rel);
            }
            variant_cells.push(VariantCell {
                method,
                n,
                k: st.k,
                target: st.target.clone(),
                files,
            });
        }
    }
    Ok(CellOutput {
        record,
        variant_files,
        variant_cells,
    })
}

static INTERRUPTED: AtomicBool = AtomicBool::new(false);

extern "C" fn on_sigint(_: libc::c_int) {
    INTERRUPTED.store(true, Ordering::SeqCst);
}

fn catch_interrupts() {
    // SAFETY: the handler only stores to an atomic, which is signal-safe.
    unsafe {
        libc::signal(libc::SIGINT, on_sigint as *const () as libc::sighandler_t);
    }
}

pub fn run(args: BenchArgs, pool: &rayon::ThreadPool) -> anyhow::Result<()> {
    let man = args.manifest()?;
    let out = output_dir(args.out.as_deref(), man.out.as_deref());
    std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let cells: Vec<(usize, Method)> = (man.n_min..=man.n_max)
        .flat_map(|n| man.methods.iter().map(move |&m| (n, m)))
        .collect();

    let csv_path = out.join("results.csv");
    let mut csv = BufWriter::new(
        File::create(&csv_path).with_context(|| format!("creating {}", csv_path.display()))?,
    );
    writeln!(csv, "{}", ExperimentRecord::CSV_HEADER)?;
    csv.flush()?;

    catch_interrupts();
    let (tx, rx) = mpsc::channel();
    for (idx, &(n, method)) in cells.iter().enumerate() {
        let tx = tx.clone();
        let man = man.clone();
        pool.spawn(move || {
            let _ = tx.send((idx, run_cell(&man, n, method)));
        });
    }
    drop(tx);

    let mut pending = BTreeMap::new();
    let mut next = 0;
    let mut records = Vec::new();
    let mut index = VariantIndex {
        variants: man.variants,
        cells: Vec::new(),
    };
    while next < cells.len() {
        if INTERRUPTED.load(Ordering::SeqCst) {
            writeln!(csv, "# INTERRUPTED after {next} of {} rows", cells.len())?;
            csv.flush()?;
            anyhow::bail!("interrupted; partial results in {}", csv_path.display());
        }
        match rx.recv_timeout(Duration::from_millis(100)) {
            Ok((idx, res)) => {
                pending.insert(idx, res);
            }
            Err(mpsc::RecvTimeoutError::Timeout) => continue,
            Err(mpsc::RecvTimeoutError::Disconnected) => anyhow::bail!("worker pool stopped early"),
        }
        while let Some(res) = pending.remove(&next) {
            let (n, method) = cells[next];
            let cell = match res {
                Ok(c) => c,
                Err(e) => {
                    writeln!(csv, "# FAILED n={n} method={method}: {e}")?;
                    csv.flush()?;
                    return Err(e.context(format!("n={n} method={method}")));
                }
            };
            writeln!(csv, "{}", cell.record.csv_row())?;
            csv.flush()?;
            for (rel, json) in &cell.variant_files {
                write(&out.join("counts").join(rel), json)?;
            }
            index.cells.extend(cell.variant_cells);
            records.push(cell.record);
            next += 1;
        }
    }
    write(&out.join("fidelity.svg"), &plot(&man, &records))?;
    if man.variants > 0 {
        write(
            &out.join("counts").join("index.json"),
            &(serde_json::to_string_pretty(&index)? + "\n"),
        )?;
    }
    eprintln!("wrote {} rows to {}", records.len(), csv_path.display());
    Ok(())
}

fn plot(man: &Manifest, records: &[ExperimentRecord]) -> String {
    let series_for = |m: Method| Series {
        name: m.to_string(),
        points: records
            .iter()
            .filter(|r| r.config.method == m)
            .map(|r| (r.config.n as f64, r.f_proc))
            .collect(),
    };
    let series: Vec<Series> = man.methods.iter().map(|&m| series_for(m)).collect();
    let inset = man.methods.contains(&Method::Fowler).then(|| {
        let base: BTreeMap<usize, f64> = records
            .iter()
            .filter(|r| r.config.method == Method::Fowler)
            .map(|r| (r.config.n, r.f_proc))
            .collect();
        let ratios = man
            .methods
            .iter()
            .filter(|&&m| m != Method::Fowler)
            .map(|&m| Series {
                name: format!("{m}/fowler"),
                points: records
                    .iter()
                    .filter(|r| r.config.method == m)
                    .filter_map(|r| {
                        let b = base.get(&r.config.n).copied().filter(|&b| b > 0.0)?;
                        Some((r.config.n as f64, r.f_proc / b))
                    })
                    .collect(),
            })
            .collect();
        ("F ratio to fowler".to_string(), ratios)
    });
    Chart {
        title: format!(
            "QFT process fidelity (p2={}, r_idle={}, q_ro={}, m={}, shots={})",
            man.noise.p2, man.noise.r_idle, man.noise.q_ro, man.m, man.shots
        ),
        x_label: "qubits n".into(),
        y_label: "process fidelity".into(),
        series,
        inset,
    }
    .render()
}
