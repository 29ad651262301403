//! Parity Twine Network compilation on a line.
//!
//! The network is a cascade of DCNOT sweeps. Sweep `s` starts at qubit 0
//! and walks a two-body label rightwards; at step `k` the brick
//! `DCNOT(k+1, k)` leaves the fresh parity `{s-1, s+k}` on qubit `k`. After
//! the last sweep the chain reads `{n-2,n-1}, …, {0,1}, {0}` and a CNOT
//! ladder from the right end makes every qubit pure again, with logical
//! `i` on qubit `n-1-i`.
//!
//! A Hadamard for logical `j` is applied on qubit 0 while its label is
//! `{j-1, j}`. Because `j` occurs in no other label, the physical H acts on
//! `j` alone up to a CZ with `j-1` on either side; the CZs are cancelled by
//! an S† on each side of the H and two `x_j` phases that are moved to the
//! start and the end of the circuit.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use crate::circuit::{Circuit, Gate, Purpose, Tag};
use crate::compiled::{qft_angle, CompiledQft, Placement, TargetSet};
use crate::local::{cnot_via_iswap, dcnot_via_iswap, dressing_error};
use crate::tracker::LabelTableau;
use crate::Error;

struct Builder {
    n: usize,
    gates: Vec<(Gate, Option<Tag>)>,
    tab: LabelTableau,
    placements: Vec<Placement>,
    /// Pair angles still to place, keyed by pair.
    wanted: BTreeMap<(usize, usize), f64>,
    /// Hadamard state per logical; `None` for diagonal layers.
    done_h: Option<Vec<bool>>,
    /// `x_i` phase applied at the start / end, per logical.
    pre: Vec<f64>,
    post: Vec<f64>,
}

impl Builder {
    fn new(n: usize, wanted: BTreeMap<(usize, usize), f64>, hadamards: bool) -> Self {
        Builder {
            n,
            gates: Vec::new(),
            tab: LabelTableau::new(n),
            placements: Vec::new(),
            wanted,
            done_h: hadamards.then(|| vec![false; n]),
            pre: vec![0.0; n],
            post: vec![0.0; n],
        }
    }

    fn rz(&mut self, q: usize, angle: f64, tag: Tag) -> usize {
        if let Some((Gate::Rz(p, a), _)) = self.gates.last_mut() {
            if *p == q {
                *a += angle;
                return self.gates.len() - 1;
            }
        }
        self.gates.push((Gate::Rz(q, angle), Some(tag)));
        self.gates.len() - 1
    }

    fn entangle(&mut self, g: Gate, sweep: u32) -> Result<(), Error> {
        self.tab.apply_gate(&g)?;
        self.gates
            .push((g, Some(Tag::sweep(Purpose::Twine, sweep))));
        let (a, b) = g.qubits();
        let b = b.expect("entanglers act on two qubits");
        for q in [a.min(b), a.max(b)] {
            self.place_pair(q);
            self.try_hadamard(q);
        }
        Ok(())
    }

    fn place_pair(&mut self, q: usize) {
        let label = self.tab.parity_label(q);
        let &[i, j] = label.as_slice() else { return };
        if let Some(done) = &self.done_h {
            if !done[i] || done[j] {
                return;
            }
        }
        let Some(theta) = self.wanted.remove(&(i, j)) else {
            return;
        };
        let position = match self.done_h {
            // CP(θ) = e^{iθ x_i x_j} = e^{iθ/2 x_i} e^{iθ/2 x_j} e^{-iθ/2 (x_i ⊕ x_j)}
            Some(_) => {
                self.pre[j] += theta / 2.0;
                self.post[i] += theta / 2.0;
                self.rz(q, -theta / 2.0, Tag::new(Purpose::Rotation))
            }
            // exp(-iθ/2 Z_i Z_j) ≅ e^{iθ (x_i ⊕ x_j)}
            None => self.rz(q, theta, Tag::new(Purpose::Rotation)),
        };
        self.placements.push(Placement {
            pair: (i, j),
            qubit: q,
            position,
            angle: theta,
        });
    }

    fn try_hadamard(&mut self, q: usize) {
        let Some(done) = &self.done_h else { return };
        let Some(j) = done.iter().position(|d| !d) else {
            return;
        };
        if self.tab.isolated(q) != Some(j) || self.wanted.keys().any(|&(_, b)| b == j) {
            return;
        }
        let label = self.tab.parity_label(q);
        let hadamard = Tag::new(Purpose::Hadamard);
        match label.len() {
            1 => self.gates.push((Gate::H(q), Some(hadamard))),
            2 => {
                // Physical H here is Z_c·CZ(c,j)·H_j·CZ(c,j) for the other
                // member c; the x_c parts of the two CZs and Z_c sum to 2π.
                self.pre[j] += FRAC_PI_2;
                self.post[j] += FRAC_PI_2;
                self.rz(q, -FRAC_PI_2, hadamard);
                self.gates.push((Gate::H(q), Some(hadamard)));
                self.rz(q, -FRAC_PI_2, hadamard);
            }
            _ => return,
        }
        self.done_h.as_mut().unwrap()[j] = true;
    }

    /// Sweeps followed by the purifying ladder.
    fn network(&mut self) -> Result<(), Error> {
        let n = self.n;
        self.try_hadamard(0);
        for s in 1..n {
            for k in 0..n - s {
                self.entangle(Gate::Dcnot(k + 1, k), s as u32)?;
            }
        }
        for t in 0..n.saturating_sub(1) {
            self.entangle(Gate::Cnot(n - 1 - t, n - 2 - t), n as u32)?;
        }
        Ok(())
    }

    fn finish(mut self, target: TargetSet) -> Result<CompiledQft, Error> {
        if let Some(&(i, j)) = self.wanted.keys().next() {
            return Err(Error::Unplaceable(i, j));
        }
        if let Some(done) = &self.done_h {
            if let Some(j) = done.iter().position(|d| !d) {
                return Err(Error::Unplaceable(j.saturating_sub(1), j));
            }
        }
        let sigma = self.tab.final_permutation()?;
        let phase = Some(Tag::new(Purpose::Rotation));
        let head: Vec<_> = (0..self.n)
            .filter(|&i| self.pre[i] != 0.0)
            .map(|i| (Gate::Rz(i, self.pre[i]), phase))
            .collect();
        for p in &mut self.placements {
            p.position += head.len();
        }
        let tail = (0..self.n)
            .filter(|&i| self.post[i] != 0.0)
            .map(|i| (Gate::Rz(sigma[i], self.post[i]), phase));
        let gates = head.into_iter().chain(self.gates).chain(tail);
        let circuit = Circuit::from_tagged(self.n, gates)?;
        Ok(CompiledQft {
            circuit,
            n: self.n,
            sigma,
            placements: self.placements,
            target,
        })
    }
}

fn qft_pairs(n: usize) -> BTreeMap<(usize, usize), f64> {
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| ((i, j), qft_angle(i, j))))
        .collect()
}

/// QFT on `n` qubits of a line.
pub fn compile_qft_ptn(n: usize, target: TargetSet) -> Result<CompiledQft, Error> {
    if n == 0 {
        return Err(Error::InvalidInput("QFT needs at least one qubit".into()));
    }
    let mut b = Builder::new(n, qft_pairs(n), true);
    b.network()?;
    let compiled = b.finish(TargetSet::CnotBased)?;
    match target {
        TargetSet::CnotBased => Ok(compiled),
        TargetSet::IswapBased => to_iswap(compiled),
    }
}

/// Diagonal layer `∏ exp(-iθ/2 Z_i Z_j)` over the given pairs.
pub fn compile_diagonal_ptn(
    n: usize,
    interactions: &[((usize, usize), f64)],
) -> Result<CompiledQft, Error> {
    let mut wanted = BTreeMap::new();
    for &((a, b), theta) in interactions {
        if a == b || a >= n || b >= n {
            return Err(Error::InvalidInput(format!(
                "bad pair ({a}, {b}) for {n} qubits"
            )));
        }
        if wanted.insert((a.min(b), a.max(b)), theta).is_some() {
            return Err(Error::InvalidInput(format!("duplicate pair ({a}, {b})")));
        }
    }
    let mut b = Builder::new(n, wanted, false);
    if !b.wanted.is_empty() {
        b.network()?;
    }
    b.finish(TargetSet::CnotBased)
}

fn iswap_expansion(g: &Gate, strict: bool) -> Result<Option<Vec<Gate>>, Error> {
    Ok(match *g {
        Gate::Dcnot(a, b) => Some(dcnot_via_iswap(a, b).to_vec()),
        Gate::Cnot(c, t) if !strict => Some(cnot_via_iswap(c, t).to_vec()),
        g if g.is_two_qubit() => {
            return Err(Error::Retarget(format!(
                "{} has no iSWAP dressing here",
                g.name()
            )))
        }
        _ => None,
    })
}

/// Rewrite every gate with [`iswap_expansion`]; returns the new circuit and,
/// per old gate, the index of its first replacement.
fn retarget(circuit: &Circuit, strict: bool) -> Result<(Circuit, Vec<usize>), Error> {
    let err = dressing_error();
    assert!(err < 1e-12, "iSWAP dressing is off by {err}");
    let mut out = Vec::new();
    let mut map = Vec::with_capacity(circuit.len());
    for (g, tag) in circuit.gates().iter().zip(circuit.tags()) {
        map.push(out.len());
        match iswap_expansion(g, strict)? {
            Some(seq) => out.extend(seq.into_iter().map(|h| (h, *tag))),
            None => out.push((*g, *tag)),
        }
    }
    let (gates, remap) = merge_single_qubit(&out);
    let map = map.into_iter().map(|i| remap[i]).collect();
    Ok((Circuit::from_tagged(circuit.n(), gates)?, map))
}

/// Replace each DCNOT by one iSWAP between single-qubit layers. Any other
/// two-qubit gate is an error.
pub fn retarget_dcnot_to_iswap(circuit: &Circuit) -> Result<Circuit, Error> {
    retarget(circuit, true).map(|(c, _)| c)
}

/// As [`retarget_dcnot_to_iswap`], and also lower lone CNOTs to two iSWAPs.
pub fn retarget_to_iswap(circuit: &Circuit) -> Result<Circuit, Error> {
    retarget(circuit, false).map(|(c, _)| c)
}

fn to_iswap(c: CompiledQft) -> Result<CompiledQft, Error> {
    let (circuit, map) = retarget(&c.circuit, false)?;
    let placements = c
        .placements
        .iter()
        .map(|p| Placement {
            position: map[p.position],
            ..*p
        })
        .collect();
    Ok(CompiledQft {
        circuit,
        placements,
        target: TargetSet::IswapBased,
        ..c
    })
}

fn inverse_pair(a: &Gate, b: &Gate) -> bool {
    use Gate::*;
    matches!(
        (a, b),
        (H(_), H(_)) | (X(_), X(_)) | (Z(_), Z(_)) | (S(_), Sdg(_)) | (Sdg(_), S(_))
    )
}

/// Cancel adjacent inverse Clifford pairs and fuse adjacent RZ/RZ and RX/RX
/// on the same qubit. Returns the gates and, per input gate, the index of
/// the gate that now stands for it.
fn merge_single_qubit(gates: &[(Gate, Option<Tag>)]) -> (Vec<(Gate, Option<Tag>)>, Vec<usize>) {
    let mut out: Vec<Option<(Gate, Option<Tag>)>> = Vec::new();
    let mut owner = Vec::with_capacity(gates.len());
    // Index into `out` of the last gate touching each qubit.
    let mut last: BTreeMap<usize, usize> = BTreeMap::new();
    for &(g, tag) in gates {
        let (a, b) = g.qubits();
        if b.is_none() {
            if let Some(&k) = last.get(&a) {
                if let Some((prev, ptag)) = out[k].as_mut() {
                    match (prev, g) {
                        (Gate::Rz(_, x), Gate::Rz(_, y)) | (Gate::Rx(_, x), Gate::Rx(_, y)) => {
                            *x += y;
                            if ptag.is_none() {
                                *ptag = tag;
                            }
                            owner.push(k);
                            continue;
                        }
                        (prev, g) if inverse_pair(prev, &g) => {
                            out[k] = None;
                            last.remove(&a);
                            owner.push(k);
                            continue;
                        }
                        _ => {}
                    }
                }
            }
        }
        out.push(Some((g, tag)));
        owner.push(out.len() - 1);
        last.insert(a, out.len() - 1);
        if let Some(b) = b {
            last.insert(b, out.len() - 1);
        }
    }
    // Compact, mapping removed gates onto the next surviving one.
    let mut new_index = vec![0; out.len() + 1];
    let mut kept = Vec::new();
    for (k, g) in out.iter().enumerate() {
        new_index[k] = kept.len();
        if let Some(g) = g {
            kept.push(*g);
        }
    }
    new_index[out.len()] = kept.len();
    let owner = owner.into_iter().map(|k| new_index[k]).collect();
    (kept, owner)
}
