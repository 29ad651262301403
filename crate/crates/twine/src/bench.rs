//! Process-fidelity benchmark: prepare `m` states that the QFT maps to
//! basis states, run the compiled circuit, and score how often the
//! expected bitstring comes out.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, Purpose, Tag};
use crate::compiled::{CompiledQft, TargetSet};
use crate::fowler::compile_qft_fowler;
use crate::noise::{NoiseModel, NoisyProgram};
use crate::ptn::compile_qft_ptn;
use crate::sim::{bitstring, output_index};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "ptn-cnot")]
    PtnCnot,
    #[serde(rename = "ptn-iswap")]
    PtnIswap,
    #[serde(rename = "fowler")]
    Fowler,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::PtnCnot, Method::PtnIswap, Method::Fowler];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::PtnCnot => "ptn-cnot",
            Method::PtnIswap => "ptn-iswap",
            Method::Fowler => "fowler",
        }
    }

    pub fn compile(self, n: usize) -> Result<CompiledQft, Error> {
        match self {
            Method::PtnCnot => compile_qft_ptn(n, TargetSet::CnotBased),
            Method::PtnIswap => compile_qft_ptn(n, TargetSet::IswapBased),
            Method::Fowler => compile_qft_fowler(n),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown method `{s}`")))
    }
}

/// Single-qubit circuit preparing the state the QFT sends to `|k⟩`: an H
/// and a phase on each qubit.
pub fn fourier_state_prep(n: usize, k: usize) -> Result<Circuit, Error> {
    if n >= usize::BITS as usize || k >> n != 0 {
        return Err(Error::InvalidInput(format!(
            "k = {k} out of range for {n} qubits"
        )));
    }
    let mut c = Circuit::new(n);
    let prep = Tag::new(Purpose::Prep);
    for i in 0..n {
        c.push_tagged(Gate::H(i), prep)?;
        let period = 1usize << (i + 1);
        let phase = -2.0 * PI * (k % period) as f64 / period as f64;
        if phase != 0.0 {
            c.push_tagged(Gate::Rz(i, phase), prep)?;
        }
    }
    Ok(c)
}

/// `F = m/(m−1)·[(1/m)·Σ√p]² − Σp/(m(m−1))`.
pub fn process_fidelity(pr: &[f64]) -> Result<f64, Error> {
    let m = pr.len();
    if m < 2 {
        return Err(Error::InvalidInput(
            "need at least two probabilities".into(),
        ));
    }
    if let Some(p) = pr.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::InvalidInput(format!("{p} is not a probability")));
    }
    let m = m as f64;
    let root = pr.iter().map(|p| p.sqrt()).sum::<f64>() / m;
    let sum = pr.iter().sum::<f64>();
    Ok(m / (m - 1.0) * root * root - sum / (m * (m - 1.0)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub n: usize,
    pub method: Method,
    pub m: usize,
    pub shots: u64,
    pub seed: u64,
    pub noise: NoiseModel,
}

impl BenchConfig {
    pub fn new(n: usize, method: Method) -> Self {
        BenchConfig {
            n,
            method,
            m: 20,
            shots: 2000,
            seed: 0,
            noise: NoiseModel::ideal(),
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        self.noise.validate()?;
        if self.n == 0 || self.n > crate::sim::STATE_LIMIT {
            return Err(Error::InvalidInput(format!("n = {} out of range", self.n)));
        }
        if self.m < 2 {
            return Err(Error::InvalidInput(format!("m = {} is below 2", self.m)));
        }
        if self.shots == 0 {
            return Err(Error::InvalidInput("shots must be at least 1".into()));
        }
        Ok(())
    }

    /// Number of states actually used: `m`, capped at the `2^n` available.
    pub fn states(&self) -> usize {
        self.m.min(1 << self.n)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    /// QFT output value `k_l`.
    pub k: usize,
    /// Expected physical bitstring after the output permutation.
    pub target: String,
    /// Counts keyed by physical bitstring.
    pub counts: std::collections::BTreeMap<String, u64>,
    pub probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub config: BenchConfig,
    pub states: Vec<StateRecord>,
    pub f_proc: f64,
}

impl ExperimentRecord {
    pub const CSV_HEADER: &'static str = "n,method,m,shots,seed,p2,r_idle,q_ro,F_proc";

    /// The `m` column is the number of states scored.
    pub fn csv_row(&self) -> String {
        let c = &self.config;
        format!(
            "{},{},{},{},{},{},{},{},{:.6}",
            c.n,
            c.method,
            self.states.len(),
            c.shots,
            c.seed,
            c.noise.p2,
            c.noise.r_idle,
            c.noise.q_ro,
            self.f_proc
        )
    }
}

/// Mix a seed with a label so that related runs get unrelated streams.
pub fn derive_seed(seed: u64, label: u64) -> u64 {
    let mut z = seed ^ label.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `m` distinct output values, uniformly without replacement.
pub fn draw_targets(n: usize, m: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, n as u64));
    rand::seq::index::sample(&mut rng, 1 << n, m).into_vec()
}

pub fn run_benchmark(config: &BenchConfig) -> Result<ExperimentRecord, Error> {
    config.validate()?;
    let compiled = config.method.compile(config.n)?;
    run_compiled(config, &compiled)
}

/// As [`run_benchmark`] with an already compiled circuit.
pub fn run_compiled(
    config: &BenchConfig,
    compiled: &CompiledQft,
) -> Result<ExperimentRecord, Error> {
    config.validate()?;
    let n = config.n;
    let targets = draw_targets(n, config.states(), config.seed);
    let states = targets
        .par_iter()
        .enumerate()
        .map(|(l, &k)| {
            let prep = fourier_state_prep(n, k)?;
            let program = NoisyProgram::new(&compiled.circuit, &prep, config.noise)?;
            let hist = program.sample(config.shots, derive_seed(config.seed, 1000 + l as u64));
            let expect = output_index(k, &compiled.sigma);
            let hits = hist.get(&expect).copied().unwrap_or(0);
            Ok(StateRecord {
                k,
                target: bitstring(expect, n),
                counts: hist
                    .into_iter()
                    .map(|(i, c)| (bitstring(i, n), c))
                    .collect(),
                probability: hits as f64 / config.shots as f64,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let pr: Vec<f64> = states.iter().map(|s| s.probability).collect();
    let f_proc = process_fidelity(&pr)?;
    Ok(ExperimentRecord {
        config: config.clone(),
        states,
        f_proc,
    })
}
