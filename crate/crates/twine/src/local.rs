//! Two-qubit local equivalence: Makhlin invariants and the single-qubit
//! dressings that turn iSWAP into DCNOT and CNOT.

use std::f64::consts::FRAC_PI_2;
use std::sync::OnceLock;

use nalgebra::Matrix4;
use num_complex::Complex64 as C;

use crate::circuit::{Circuit, Gate};
use crate::sim::{circuit_unitary, equiv_up_to_phase};

pub type U4 = Matrix4<C>;

/// 4×4 unitary of gates acting on qubits 0 and 1 (qubit 0 most significant).
pub fn unitary4(gates: &[Gate]) -> U4 {
    let c = Circuit::from_gates(2, gates.iter().copied()).expect("two-qubit gate list");
    let u = circuit_unitary(&c).expect("two qubits");
    U4::from_fn(|r, k| u.get(r, k))
}

fn magic() -> U4 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let (o, z, i) = (C::new(s, 0.0), C::new(0.0, 0.0), C::new(0.0, s));
    U4::new(o, z, z, i, z, i, o, z, z, i, -o, z, o, z, z, -i)
}

/// `(G1, G2)`; equal invariants mean equal up to single-qubit gates.
pub fn makhlin(u: &U4) -> (C, f64) {
    let q = magic();
    let ub = q.adjoint() * u * q;
    let m = ub.transpose() * ub;
    let det = u.determinant();
    let tr = m.trace();
    let tr2 = (m * m).trace();
    let g1 = tr * tr / (det * 16.0);
    let g2 = (tr * tr - tr2) / (det * 4.0);
    (g1, g2.re)
}

/// Max deviation between the Makhlin invariants of two gates.
pub fn invariant_gap(u: &U4, v: &U4) -> f64 {
    let (a1, a2) = makhlin(u);
    let (b1, b2) = makhlin(v);
    (a1 - b1).norm().max((a2 - b2).abs())
}

/// `DCNOT(a,b)` as one iSWAP between single-qubit layers.
pub fn dcnot_via_iswap(a: usize, b: usize) -> [Gate; 5] {
    [
        Gate::H(a),
        Gate::Iswap(a, b),
        Gate::Sdg(a),
        Gate::H(b),
        Gate::Rx(b, -FRAC_PI_2),
    ]
}

/// `CNOT(c,t)` as two iSWAPs between single-qubit layers.
pub fn cnot_via_iswap(c: usize, t: usize) -> [Gate; 9] {
    [
        Gate::H(c),
        Gate::H(t),
        Gate::Iswap(c, t),
        Gate::H(t),
        Gate::Iswap(c, t),
        Gate::H(c),
        Gate::S(c),
        Gate::H(t),
        Gate::Rx(t, -FRAC_PI_2),
    ]
}

/// Worst deviation of both dressings from their targets, in both operand
/// orders. Computed once.
pub fn dressing_error() -> f64 {
    static ERR: OnceLock<f64> = OnceLock::new();
    *ERR.get_or_init(|| {
        let mut worst: f64 = 0.0;
        for (a, b) in [(0, 1), (1, 0)] {
            for (target, dressed) in [
                (vec![Gate::Dcnot(a, b)], dcnot_via_iswap(a, b).to_vec()),
                (vec![Gate::Cnot(a, b)], cnot_via_iswap(a, b).to_vec()),
            ] {
                let u = circuit_unitary(&Circuit::from_gates(2, target).unwrap()).unwrap();
                let v = circuit_unitary(&Circuit::from_gates(2, dressed).unwrap()).unwrap();
                worst = worst.max(equiv_up_to_phase(&v, &u).1);
            }
        }
        worst
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariant_classes() {
        let cnot = unitary4(&[Gate::Cnot(0, 1)]);
        let dcnot = unitary4(&[Gate::Dcnot(0, 1)]);
        let iswap = unitary4(&[Gate::Iswap(0, 1)]);
        let swap = unitary4(&[Gate::Swap(0, 1)]);
        let id = unitary4(&[]);
        assert!(invariant_gap(&dcnot, &iswap) < 1e-12);
        assert!(invariant_gap(&cnot, &dcnot) > 0.5);
        assert!(invariant_gap(&swap, &iswap) > 0.5);
        let (g1, g2) = makhlin(&id);
        assert!((g1 - C::new(1.0, 0.0)).norm() < 1e-12 && (g2 - 3.0).abs() < 1e-12);
        let (g1, g2) = makhlin(&cnot);
        assert!(g1.norm() < 1e-12 && (g2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn locals_do_not_move_invariants() {
        let u = unitary4(&[
            Gate::Rx(0, 0.3),
            Gate::Cnot(0, 1),
            Gate::Rz(1, 1.1),
            Gate::H(0),
        ]);
        let v = unitary4(&[Gate::Cnot(0, 1)]);
        assert!(invariant_gap(&u, &v) < 1e-12);
    }

    #[test]
    fn dressings_hold() {
        assert!(dressing_error() < 1e-12, "{}", dressing_error());
    }
}
