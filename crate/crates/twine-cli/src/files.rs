//! Single-shot commands that read or write circuit and counts files.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};
use twine::bench::{process_fidelity, Method};
use twine::noise::Counts;
use twine::sim::{bitstring, output_index};
use twine::{Circuit, CountMode, DepthMode, Gate, Native};

use crate::manifest::output_dir;
use crate::Usage;

pub fn write(path: &Path, contents: &str) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

pub fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn read_circuit(path: &Path) -> anyhow::Result<Circuit> {
    Circuit::parse(&read(path)?).map_err(|e| Usage::err(format!("{}: {e}", path.display())))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> anyhow::Result<T> {
    serde_json::from_str(&read(path)?).map_err(|e| Usage::err(format!("{}: {e}", path.display())))
}

pub fn compile(n: usize, method: Method, out: Option<&Path>) -> anyhow::Result<()> {
    let c = method.compile(n).map_err(|e| Usage::err(e.to_string()))?;
    let dir = output_dir(out, None);
    let stem = dir.join(format!("qft_{method}_n{n}"));
    write(&stem.with_extension("circ"), &c.circuit.to_text())?;
    write(&stem.with_extension("qasm"), &c.circuit.to_qasm())?;
    write(
        &stem.with_extension("placements.json"),
        &(c.placements_json() + "\n"),
    )?;
    println!("{}", c.stats_line());
    Ok(())
}

#[derive(Debug, Serialize)]
struct Stats {
    n: usize,
    gates: usize,
    native: &'static str,
    native_two_qubit: usize,
    cnot_equivalent: usize,
    iswap: usize,
    depth: usize,
    two_qubit_depth: usize,
}

fn stats(c: &Circuit) -> Stats {
    let native = if c.gates().iter().any(|g| matches!(g, Gate::Iswap(..))) {
        Native::Iswap
    } else {
        Native::Cnot
    };
    Stats {
        n: c.n(),
        gates: c.len(),
        native: match native {
            Native::Iswap => "iswap",
            Native::Cnot => "cnot",
        },
        native_two_qubit: c.two_qubit_count(CountMode::Native(native)),
        cnot_equivalent: c.two_qubit_count(CountMode::CnotEquivalent),
        iswap: c
            .gates()
            .iter()
            .filter(|g| matches!(g, Gate::Iswap(..)))
            .count(),
        depth: c.depth(DepthMode::AllGates),
        two_qubit_depth: c.depth(DepthMode::TwoQubitOnly),
    }
}

fn ratio(a: usize, b: usize) -> Option<f64> {
    (b > 0).then(|| a as f64 / b as f64)
}

pub fn report(file: &Path, baseline: Option<&Path>) -> anyhow::Result<()> {
    let s = stats(&read_circuit(file)?);
    let mut json = serde_json::to_value(&s)?;
    if let Some(b) = baseline {
        let b = stats(&read_circuit(b)?);
        json["baseline"] = serde_json::to_value(&b)?;
        json["ratio_native"] = serde_json::to_value(ratio(s.native_two_qubit, b.native_two_qubit))?;
        json["ratio_cnot_equivalent"] =
            serde_json::to_value(ratio(s.cnot_equivalent, b.cnot_equivalent))?;
        json["ratio_two_qubit_depth"] =
            serde_json::to_value(ratio(s.two_qubit_depth, b.two_qubit_depth))?;
    }
    println!("{}", serde_json::to_string_pretty(&json)?);
    Ok(())
}

pub fn export_qasm(file: &Path, output: Option<&Path>) -> anyhow::Result<()> {
    let qasm = read_circuit(file)?.to_qasm();
    match output {
        Some(p) => write(p, &qasm),
        None => {
            print!("{qasm}");
            Ok(())
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct IngestManifest {
    n: usize,
    #[serde(default)]
    label: Option<String>,
    states: Vec<IngestState>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct IngestState {
    file: PathBuf,
    k: usize,
    sigma: Vec<usize>,
}

#[derive(Debug, Serialize)]
struct IngestSummary {
    label: String,
    n: usize,
    m: usize,
    shots: u64,
    probabilities: Vec<f64>,
    f_proc: f64,
}

pub fn ingest(dir: &Path, manifest: &Path, out: Option<&Path>) -> anyhow::Result<()> {
    let man: IngestManifest = read_json(manifest)?;
    let n = man.n;
    if n == 0 || n >= 64 || man.states.len() < 2 {
        return Err(Usage::err(
            "ingest manifest needs n in 1..64 and at least two states",
        ));
    }
    let mut probabilities = Vec::new();
    let mut shots = 0;
    for st in &man.states {
        let distinct: BTreeSet<_> = st.sigma.iter().collect();
        if st.sigma.len() != n || distinct.len() != n || st.sigma.iter().any(|&p| p >= n) {
            return Err(Usage::err(format!(
                "{}: sigma is not a permutation of 0..{n}",
                st.file.display()
            )));
        }
        if st.k >> n != 0 {
            return Err(Usage::err(format!(
                "{}: k = {} needs more than {n} bits",
                st.file.display(),
                st.k
            )));
        }
        let counts: Counts = read_json(&dir.join(&st.file))?;
        if counts.n != n || counts.counts.keys().any(|b| b.len() != n) {
            return Err(Usage::err(format!(
                "{}: expected {n}-bit counts",
                st.file.display()
            )));
        }
        let total: u64 = counts.counts.values().sum();
        if total != counts.shots || total == 0 {
            return Err(Usage::err(format!(
                "{}: counts sum to {total}, shots = {}",
                st.file.display(),
                counts.shots
            )));
        }
        probabilities.push(counts.probability(&bitstring(output_index(st.k, &st.sigma), n)));
        shots += counts.shots;
    }
    let f_proc = process_fidelity(&probabilities)?;
    let summary = IngestSummary {
        label: man.label.clone().unwrap_or_else(|| "ingested".into()),
        n,
        m: probabilities.len(),
        shots,
        probabilities,
        f_proc,
    };
    let dir = output_dir(out, None);
    let csv = format!(
        "label,n,m,shots,F_proc\n{},{},{},{},{:.6}\n",
        summary.label, n, summary.m, shots, f_proc
    );
    write(&dir.join("ingest.csv"), &csv)?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}
