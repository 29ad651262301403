//! Swap-network QFT on a line: every pair of logicals meets once in a
//! bubble-sort pattern, and each meeting is a controlled phase fused with a
//! SWAP, emitted as three CNOTs.

use crate::circuit::{Circuit, Gate, Purpose, Tag};
use crate::compiled::{qft_angle, CompiledQft, Placement, TargetSet};
use crate::Error;

pub fn compile_qft_fowler(n: usize) -> Result<CompiledQft, Error> {
    if n == 0 {
        return Err(Error::InvalidInput("QFT needs at least one qubit".into()));
    }
    let mut c = Circuit::new(n);
    // at[p] = logical currently on physical p
    let mut at: Vec<usize> = (0..n).collect();
    let mut placements = Vec::with_capacity(n * (n - 1) / 2);
    let rot = Tag::new(Purpose::Rotation);
    for i in 0..n {
        c.push_tagged(Gate::H(0), Tag::new(Purpose::Hadamard))?;
        for d in 0..n - 1 - i {
            let (a, b) = (at[d], at[d + 1]);
            let theta = qft_angle(a.min(b), a.max(b));
            let half = theta / 2.0;
            let sweep = Tag::sweep(Purpose::Twine, i as u32 + 1);
            c.push_tagged(Gate::Rz(d, half), rot)?;
            c.push_tagged(Gate::Cnot(d, d + 1), sweep)?;
            let position = c.push_tagged(Gate::Rz(d + 1, -half), rot)?;
            c.push_tagged(Gate::Cnot(d + 1, d), sweep)?;
            c.push_tagged(Gate::Cnot(d, d + 1), sweep)?;
            c.push_tagged(Gate::Rz(d, half), rot)?;
            placements.push(Placement {
                pair: (a.min(b), a.max(b)),
                qubit: d + 1,
                position,
                angle: theta,
            });
            at.swap(d, d + 1);
        }
    }
    let mut sigma = vec![0; n];
    for (p, &l) in at.iter().enumerate() {
        sigma[l] = p;
    }
    Ok(CompiledQft {
        circuit: c,
        n,
        sigma,
        placements,
        target: TargetSet::CnotBased,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::CountMode;

    #[test]
    fn closed_form_count() {
        for n in 1..=20 {
            let c = compile_qft_fowler(n).unwrap();
            assert_eq!(
                c.circuit.two_qubit_count(CountMode::CnotEquivalent),
                3 * n * (n - 1) / 2
            );
        }
        assert_eq!(
            compile_qft_fowler(1).unwrap().circuit.gates(),
            &[Gate::H(0)]
        );
    }

    #[test]
    fn every_pair_meets_once() {
        for n in 2..=64 {
            let c = compile_qft_fowler(n).unwrap();
            let mut seen = std::collections::BTreeSet::new();
            for p in &c.placements {
                assert!(seen.insert(p.pair), "pair {:?} met twice", p.pair);
            }
            assert_eq!(seen.len(), n * (n - 1) / 2);
            assert_eq!(c.sigma, (0..n).rev().collect::<Vec<_>>());
        }
    }
}
