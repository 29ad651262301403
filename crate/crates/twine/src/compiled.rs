//! Compiler output shared by the parity-network and swap-network compilers.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, CountMode, DepthMode, Native};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetSet {
    CnotBased,
    IswapBased,
}

impl TargetSet {
    pub fn native(self) -> Native {
        match self {
            TargetSet::CnotBased => Native::Cnot,
            TargetSet::IswapBased => Native::Iswap,
        }
    }
}

/// Where the interaction between logicals `pair.0 < pair.1` was applied:
/// a rotation on `qubit` at gate index `position`, when that qubit's label
/// was exactly the pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub pair: (usize, usize),
    pub qubit: usize,
    pub position: usize,
    pub angle: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompiledQft {
    pub circuit: Circuit,
    pub n: usize,
    /// `sigma[i]` is the physical qubit that ends up holding logical `i`.
    pub sigma: Vec<usize>,
    pub placements: Vec<Placement>,
    pub target: TargetSet,
}

impl CompiledQft {
    /// Two-qubit count in units of the target's native entangler.
    pub fn native_count(&self) -> usize {
        self.circuit
            .two_qubit_count(CountMode::Native(self.target.native()))
    }

    pub fn cnot_count(&self) -> usize {
        self.circuit.two_qubit_count(CountMode::CnotEquivalent)
    }

    pub fn two_qubit_depth(&self) -> usize {
        self.circuit.depth(DepthMode::TwoQubitOnly)
    }

    pub fn placements_json(&self) -> String {
        serde_json::to_string_pretty(&self.placements).expect("plain data")
    }

    pub fn stats_line(&self) -> String {
        format!(
            "n={} target={} native_2q={} cnot_equiv={} depth_2q={} sigma={:?}",
            self.n,
            match self.target {
                TargetSet::CnotBased => "cnot",
                TargetSet::IswapBased => "iswap",
            },
            self.native_count(),
            self.cnot_count(),
            self.two_qubit_depth(),
            self.sigma
        )
    }
}

/// Controlled-phase angle between logicals `i < j` in the QFT.
pub fn qft_angle(i: usize, j: usize) -> f64 {
    debug_assert!(i < j);
    PI / f64::powi(2.0, (j - i) as i32)
}
