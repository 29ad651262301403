//! Pauli-trajectory noise on top of the statevector simulator.
//!
//! Errors are attached to the circuit lowered to native gates: DCNOT is two
//! CNOTs and SWAP three, and each native two-qubit gate is followed by a
//! uniformly random non-identity two-qubit Pauli with probability `p2`.
//! Idle qubits in each two-qubit layer get a random single-qubit Pauli with
//! probability `r_idle`; every measured bit flips with probability `q_ro`.
//!
//! Shots that draw the same error pattern share one simulation. Each shot
//! has its own random streams derived from the seed, so results do not
//! depend on thread count or scheduling.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate};
use crate::sim::{bitstring, Pauli, StateVector, STATE_LIMIT};
use crate::Error;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    pub p2: f64,
    #[serde(default)]
    pub r_idle: f64,
    #[serde(default)]
    pub q_ro: f64,
}

impl NoiseModel {
    pub fn ideal() -> Self {
        NoiseModel::default()
    }

    pub fn depolarizing(p2: f64) -> Self {
        NoiseModel {
            p2,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        for (name, p) in [
            ("p2", self.p2),
            ("r_idle", self.r_idle),
            ("q_ro", self.q_ro),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidInput(format!(
                    "{name} = {p} is not a probability"
                )));
            }
        }
        Ok(())
    }
}

/// Measured counts plus the parameters that produced them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Counts {
    pub n: usize,
    pub shots: u64,
    pub seed: u64,
    pub noise: NoiseModel,
    pub counts: BTreeMap<String, u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
}

impl Counts {
    pub fn probability(&self, bits: &str) -> f64 {
        self.counts.get(bits).copied().unwrap_or(0) as f64 / self.shots as f64
    }

    /// Empirical distribution, keyed by bitstring.
    pub fn distribution(&self) -> BTreeMap<String, f64> {
        self.counts
            .iter()
            .map(|(k, &c)| (k.clone(), c as f64 / self.shots as f64))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Site {
    /// After a native two-qubit gate.
    Pair(usize, usize),
    /// An idle qubit during one two-qubit layer.
    Idle(usize),
}

/// A place where an error may strike: before lowered gate `before`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Location {
    pub before: usize,
    pub site: Site,
}

/// One error: location index and Pauli code (1..=15 for pairs, as
/// `4·first + second` with 0=I 1=X 2=Y 3=Z; 1..=3 for idles).
pub type Event = (u32, u8);

fn pauli_of(code: u8) -> Option<Pauli> {
    match code {
        1 => Some(Pauli::X),
        2 => Some(Pauli::Y),
        3 => Some(Pauli::Z),
        _ => None,
    }
}

/// A circuit prepared for repeated noisy execution.
pub struct NoisyProgram {
    n: usize,
    gates: Vec<Gate>,
    locations: Vec<Location>,
    noise: NoiseModel,
    /// Ideal states before gate `k·stride`.
    checkpoints: Vec<StateVector>,
    stride: usize,
}

fn lower(g: &Gate, out: &mut Vec<Gate>) {
    match *g {
        Gate::Dcnot(a, b) => out.extend([Gate::Cnot(a, b), Gate::Cnot(b, a)]),
        Gate::Swap(a, b) => out.extend([Gate::Cnot(a, b), Gate::Cnot(b, a), Gate::Cnot(a, b)]),
        g => out.push(g),
    }
}

impl NoisyProgram {
    /// `prep` runs noiselessly before `circuit`.
    pub fn new(circuit: &Circuit, prep: &Circuit, noise: NoiseModel) -> Result<Self, Error> {
        let n = circuit.n();
        if n > STATE_LIMIT {
            return Err(Error::TooLarge {
                n,
                limit: STATE_LIMIT,
            });
        }
        if prep.n() != n || prep.gates().iter().any(Gate::is_two_qubit) {
            return Err(Error::InvalidInput(
                "prep must be single-qubit gates on the same width".into(),
            ));
        }
        noise.validate()?;
        let mut gates: Vec<Gate> = prep.gates().to_vec();
        let body = gates.len();
        for g in circuit.gates() {
            lower(g, &mut gates);
        }
        let mut locations = Vec::new();
        if noise.p2 > 0.0 {
            for (k, g) in gates.iter().enumerate().skip(body) {
                if let (a, Some(b)) = g.qubits() {
                    locations.push(Location {
                        before: k + 1,
                        site: Site::Pair(a, b),
                    });
                }
            }
        }
        if noise.r_idle > 0.0 {
            locations.extend(idle_locations(n, &gates, body));
        }
        locations.sort_by_key(|l| l.before);

        let amps = 1usize << n;
        let budget = 1usize << 22;
        let slots = (budget / amps).max(1);
        let stride = gates.len().div_ceil(slots).max(1);
        let mut checkpoints = Vec::new();
        let mut s = StateVector::zero(n);
        for (k, g) in gates.iter().enumerate() {
            if k % stride == 0 {
                checkpoints.push(s.clone());
            }
            s.apply_unchecked(g);
        }
        if gates.len().is_multiple_of(stride) {
            checkpoints.push(s);
        }
        Ok(NoisyProgram {
            n,
            gates,
            locations,
            noise,
            checkpoints,
            stride,
        })
    }

    pub fn locations(&self) -> &[Location] {
        &self.locations
    }

    /// Final state with the given events applied. Events must be sorted by
    /// location index.
    pub fn run_pattern(&self, events: &[Event]) -> StateVector {
        let start = events
            .first()
            .map(|&(l, _)| self.locations[l as usize].before)
            .unwrap_or(self.gates.len());
        let cp = (start / self.stride).min(self.checkpoints.len() - 1);
        let mut s = self.checkpoints[cp].clone();
        let mut ev = events.iter().peekable();
        for k in cp * self.stride..=self.gates.len() {
            while let Some(&&(l, code)) = ev.peek() {
                let loc = self.locations[l as usize];
                if loc.before != k {
                    break;
                }
                match loc.site {
                    Site::Pair(a, b) => {
                        if let Some(p) = pauli_of(code >> 2) {
                            s.pauli(a, p);
                        }
                        if let Some(p) = pauli_of(code & 3) {
                            s.pauli(b, p);
                        }
                    }
                    Site::Idle(q) => s.pauli(q, pauli_of(code).expect("idle code")),
                }
                ev.next();
            }
            if let Some(g) = self.gates.get(k) {
                s.apply_unchecked(g);
            }
        }
        s
    }

    fn draw_events(&self, rng: &mut ChaCha8Rng) -> Vec<Event> {
        let mut events = Vec::new();
        for (i, loc) in self.locations.iter().enumerate() {
            let (p, codes) = match loc.site {
                Site::Pair(..) => (self.noise.p2, 15),
                Site::Idle(_) => (self.noise.r_idle, 3),
            };
            if rng.random::<f64>() < p {
                events.push((i as u32, rng.random_range(1..=codes)));
            }
        }
        events
    }

    /// Histogram of measured basis indices.
    pub fn sample(&self, shots: u64, seed: u64) -> BTreeMap<usize, u64> {
        let mut groups: HashMap<Vec<Event>, Vec<u64>> = HashMap::new();
        for shot in 0..shots {
            let mut rng = stream(seed, shot, 0);
            groups
                .entry(self.draw_events(&mut rng))
                .or_default()
                .push(shot);
        }
        let mut groups: Vec<_> = groups.into_iter().collect();
        groups.sort();
        let n = self.n;
        let q_ro = self.noise.q_ro;
        let per_group: Vec<Vec<usize>> = groups
            .par_iter()
            .map(|(events, shots)| {
                let mut cdf = self.run_pattern(events).probabilities();
                let mut acc = 0.0;
                for p in cdf.iter_mut() {
                    acc += *p;
                    *p = acc;
                }
                shots
                    .iter()
                    .map(|&shot| {
                        let mut rng = stream(seed, shot, 1);
                        let u = rng.random::<f64>() * acc;
                        let mut k = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
                        if q_ro > 0.0 {
                            for q in 0..n {
                                if rng.random::<f64>() < q_ro {
                                    k ^= 1 << (n - 1 - q);
                                }
                            }
                        }
                        k
                    })
                    .collect()
            })
            .collect();
        let mut hist = BTreeMap::new();
        for k in per_group.into_iter().flatten() {
            *hist.entry(k).or_insert(0) += 1;
        }
        hist
    }
}

/// Per-shot random stream: `kind` 0 draws errors, 1 draws the measurement.
fn stream(seed: u64, shot: u64, kind: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot.wrapping_mul(2).wrapping_add(kind));
    rng
}

/// Idle sites from the two-qubit-only layering of the gates after `body`.
/// An idle error on `q` in layer `L` lands just before `q`'s next two-qubit
/// gate after `L`, or at the end.
fn idle_locations(n: usize, gates: &[Gate], body: usize) -> Vec<Location> {
    let mut free = vec![0usize; n];
    let mut busy: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut depth = 0;
    for (k, g) in gates.iter().enumerate().skip(body) {
        if let (a, Some(b)) = g.qubits() {
            let layer = free[a].max(free[b]);
            free[a] = layer + 1;
            free[b] = layer + 1;
            busy[a].push((layer, k));
            busy[b].push((layer, k));
            depth = depth.max(layer + 1);
        }
    }
    let mut out = Vec::new();
    for (q, slots) in busy.iter().enumerate() {
        let mut next = 0;
        for layer in 0..depth {
            while next < slots.len() && slots[next].0 < layer {
                next += 1;
            }
            if next < slots.len() && slots[next].0 == layer {
                continue;
            }
            let before = slots.get(next).map_or(gates.len(), |&(_, k)| k);
            out.push(Location {
                before,
                site: Site::Idle(q),
            });
        }
    }
    out
}

/// Run `prep` then `circuit` `shots` times under `noise`.
pub fn sample_noisy(
    circuit: &Circuit,
    prep: &Circuit,
    noise: NoiseModel,
    shots: u64,
    seed: u64,
) -> Result<Counts, Error> {
    if shots == 0 {
        return Err(Error::InvalidInput("shots must be at least 1".into()));
    }
    let program = NoisyProgram::new(circuit, prep, noise)?;
    let n = circuit.n();
    let counts = program
        .sample(shots, seed)
        .into_iter()
        .map(|(k, c)| (bitstring(k, n), c))
        .collect();
    Ok(Counts {
        n,
        shots,
        seed,
        noise,
        counts,
        target: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn idle_sites_fill_gaps() {
        // layers: CNOT(0,1) at 0, CNOT(1,2) at 1; qubit 2 idles in layer 0,
        // qubit 0 in layer 1.
        let c = Circuit::from_gates(3, [Gate::Cnot(0, 1), Gate::Cnot(1, 2)]).unwrap();
        let noise = NoiseModel {
            r_idle: 0.5,
            ..Default::default()
        };
        let p = NoisyProgram::new(&c, &Circuit::new(3), noise).unwrap();
        let idles: Vec<_> = p.locations().to_vec();
        assert_eq!(
            idles,
            vec![
                Location {
                    before: 1,
                    site: Site::Idle(2)
                },
                Location {
                    before: 2,
                    site: Site::Idle(0)
                },
            ]
        );
    }

    #[test]
    fn pair_sites_follow_native_gates() {
        let c = Circuit::from_gates(2, [Gate::H(0), Gate::Dcnot(0, 1)]).unwrap();
        let p = NoisyProgram::new(&c, &Circuit::new(2), NoiseModel::depolarizing(0.1)).unwrap();
        let before: Vec<_> = p.locations().iter().map(|l| l.before).collect();
        assert_eq!(before, vec![2, 3]);
    }

    #[test]
    fn checkpoints_do_not_change_results() {
        let mut c = Circuit::new(3);
        for k in 0..40 {
            c.push(Gate::Rx(k % 3, 0.1 * k as f64)).unwrap();
            c.push(Gate::Cnot(k % 2, k % 2 + 1)).unwrap();
        }
        let p = NoisyProgram::new(&c, &Circuit::new(3), NoiseModel::depolarizing(0.1)).unwrap();
        let events = vec![(3, 7), (20, 13)];
        let a = p.run_pattern(&events);
        let mut s = StateVector::zero(3);
        let mut ev = events.iter().peekable();
        for (k, g) in p.gates.iter().enumerate() {
            while let Some(&&(l, code)) = ev.peek() {
                if p.locations[l as usize].before != k {
                    break;
                }
                let Site::Pair(x, y) = p.locations[l as usize].site else {
                    unreachable!()
                };
                if let Some(q) = pauli_of(code >> 2) {
                    s.pauli(x, q);
                }
                if let Some(q) = pauli_of(code & 3) {
                    s.pauli(y, q);
                }
                ev.next();
            }
            s.apply(g).unwrap();
        }
        let d: f64 = a
            .amplitudes()
            .iter()
            .zip(s.amplitudes())
            .map(|(x, y)| (x - y).norm())
            .sum();
        assert!(d < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let c = Circuit::new(2);
        assert!(sample_noisy(&c, &c, NoiseModel::ideal(), 0, 1).is_err());
        assert!(sample_noisy(&c, &c, NoiseModel::depolarizing(1.5), 1, 1).is_err());
        let big = Circuit::new(23);
        assert!(matches!(
            sample_noisy(&big, &big, NoiseModel::ideal(), 1, 1),
            Err(Error::TooLarge { .. })
        ));
    }
}
