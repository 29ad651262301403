use std::collections::BTreeSet;
use std::f64::consts::PI;

use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twine::bench::{fourier_state_prep, Method};
use twine::circuit::Purpose;
use twine::fowler::compile_qft_fowler;
use twine::ptn::{
    compile_diagonal_ptn, compile_qft_ptn, retarget_dcnot_to_iswap, retarget_to_iswap,
};
use twine::sim::{circuit_unitary, equiv_up_to_phase, Matrix, StateVector};
use twine::{Circuit, CompiledQft, CountMode, Error, Gate, LabelTableau, Native, TargetSet};

/// Tableau after the first `upto` gates.
fn tableau_at(c: &Circuit, upto: usize) -> LabelTableau {
    let mut t = LabelTableau::new(c.n());
    for g in &c.gates()[..upto] {
        t.apply_gate(g).unwrap();
    }
    t
}

fn check_placements(c: &CompiledQft) {
    let n = c.n;
    let pairs: BTreeSet<_> = c.placements.iter().map(|p| p.pair).collect();
    assert_eq!(
        pairs.len(),
        n * (n - 1) / 2,
        "n={n}: every pair exactly once"
    );
    assert_eq!(c.placements.len(), pairs.len());
    for p in &c.placements {
        assert!(matches!(c.circuit.gates()[p.position], Gate::Rz(q, _) if q == p.qubit));
        let t = tableau_at(&c.circuit, p.position);
        assert!(
            t.label_is(p.qubit, &[p.pair.0, p.pair.1]),
            "n={n} {:?}: label {:?}",
            p,
            t.parity_label(p.qubit)
        );
        assert!((p.angle - PI / (1u64 << (p.pair.1 - p.pair.0)) as f64).abs() < 1e-15);
    }
}

/// Position of the Hadamard acting on each logical.
fn hadamard_positions(c: &Circuit) -> Vec<usize> {
    let mut at = vec![usize::MAX; c.n()];
    let mut t = LabelTableau::new(c.n());
    for (k, (g, tag)) in c.gates().iter().zip(c.tags()).enumerate() {
        if let (Gate::H(q), Some(tag)) = (g, tag) {
            if tag.purpose == Purpose::Hadamard {
                let j = t
                    .isolated(*q)
                    .expect("Hadamard on a qubit holding an isolated logical");
                assert_eq!(at[j], usize::MAX, "logical {j} got two Hadamards");
                at[j] = k;
            }
        }
        t.apply_gate(g).unwrap();
    }
    at
}

#[test]
fn placements_replay_on_the_tracker() {
    for n in 2..=24 {
        check_placements(&compile_qft_ptn(n, TargetSet::CnotBased).unwrap());
        check_placements(&compile_qft_fowler(n).unwrap());
    }
}

#[test]
fn rotations_sit_between_their_hadamards() {
    for n in 1..=16 {
        for c in [
            compile_qft_ptn(n, TargetSet::CnotBased).unwrap(),
            compile_qft_fowler(n).unwrap(),
        ] {
            let h = hadamard_positions(&c.circuit);
            assert!(
                h.iter().all(|&k| k != usize::MAX),
                "n={n}: missing Hadamard"
            );
            assert!(h.windows(2).all(|w| w[0] < w[1]));
            for p in &c.placements {
                let (i, j) = p.pair;
                assert!(
                    h[i] < p.position && p.position < h[j],
                    "n={n} pair {:?}",
                    p.pair
                );
            }
        }
    }
}

#[test]
fn count_closed_forms() {
    for n in 1..=64 {
        let ptn = compile_qft_ptn(n, TargetSet::CnotBased).unwrap();
        let isw = compile_qft_ptn(n, TargetSet::IswapBased).unwrap();
        let fow = compile_qft_fowler(n).unwrap();
        assert_eq!(ptn.cnot_count(), n * n - 1);
        assert_eq!(isw.native_count(), n * (n - 1) / 2 + 2 * (n - 1));
        assert_eq!(
            isw.circuit
                .two_qubit_count(CountMode::Native(Native::Iswap)),
            isw.native_count()
        );
        assert_eq!(fow.cnot_count(), 3 * n * (n - 1) / 2);
        assert!(ptn.two_qubit_depth() <= 4 * n + 4);
        assert_eq!(ptn.sigma, (0..n).rev().collect::<Vec<_>>());
    }
}

#[test]
fn leading_order_is_n_squared() {
    for n in [32, 48, 64] {
        let c = compile_qft_ptn(n, TargetSet::CnotBased)
            .unwrap()
            .cnot_count() as f64;
        let r = c / (n * n) as f64;
        assert!((0.9..=1.15).contains(&r), "n={n}: {r}");
    }
    let mut last = 0;
    for n in 1..=40 {
        let c = compile_qft_ptn(n, TargetSet::CnotBased)
            .unwrap()
            .cnot_count();
        assert!(c >= last);
        last = c;
    }
}

#[test]
fn zero_qubits_is_rejected() {
    assert!(matches!(
        compile_qft_ptn(0, TargetSet::CnotBased),
        Err(Error::InvalidInput(_))
    ));
    assert!(compile_qft_fowler(0).is_err());
}

/// Expected action of `∏ exp(-iθ/2 Z_a Z_b)` on basis state `x`.
fn zz_phase(n: usize, x: usize, terms: &[((usize, usize), f64)]) -> f64 {
    let z = |q: usize| {
        if (x >> (n - 1 - q)) & 1 == 1 {
            -1.0
        } else {
            1.0
        }
    };
    terms
        .iter()
        .map(|&((a, b), th)| -th / 2.0 * z(a) * z(b))
        .sum()
}

fn check_diagonal(n: usize, terms: &[((usize, usize), f64)]) -> CompiledQft {
    let c = compile_diagonal_ptn(n, terms).unwrap();
    let u = circuit_unitary(&c.circuit).unwrap();
    // Physical index for logical basis state x.
    let route = |x: usize| {
        (0..n)
            .map(|i| ((x >> (n - 1 - i)) & 1) << (n - 1 - c.sigma[i]))
            .sum::<usize>()
    };
    let want = Matrix::from_fn(1 << n, |r, x| {
        if r == route(x) {
            C::from_polar(1.0, zz_phase(n, x, terms))
        } else {
            C::new(0.0, 0.0)
        }
    });
    let dev = equiv_up_to_phase(&u, &want).1;
    assert!(dev < 1e-10, "n={n} {terms:?}: deviation {dev}");
    c
}

#[test]
fn single_pair_layer() {
    let c = check_diagonal(2, &[((0, 1), 0.7)]);
    let ents: Vec<_> = c
        .circuit
        .gates()
        .iter()
        .filter(|g| g.is_two_qubit())
        .collect();
    assert_eq!(ents, [&Gate::Dcnot(1, 0), &Gate::Cnot(1, 0)]);
    assert_eq!(c.placements.len(), 1);
}

#[test]
fn all_to_all_layer() {
    let n = 5;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let terms: Vec<_> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .map(|p| (p, rng.random_range(-PI..PI)))
        .collect();
    let c = check_diagonal(n, &terms);
    assert_eq!(c.placements.len(), 10);
    assert!(c.cnot_count() <= n * n + 2 * n);
}

#[test]
fn random_diagonal_layers() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..40 {
        let n = rng.random_range(2..=5);
        let mut terms = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.random_bool(0.5) {
                    let p = if rng.random_bool(0.5) { (a, b) } else { (b, a) };
                    terms.push((p, rng.random_range(-3.0..3.0)));
                }
            }
        }
        check_diagonal(n, &terms);
    }
    assert!(compile_diagonal_ptn(3, &[]).unwrap().circuit.is_empty());
}

#[test]
fn diagonal_input_errors() {
    assert!(compile_diagonal_ptn(3, &[((0, 0), 1.0)]).is_err());
    assert!(compile_diagonal_ptn(3, &[((0, 3), 1.0)]).is_err());
    assert!(compile_diagonal_ptn(3, &[((0, 1), 1.0), ((1, 0), 2.0)]).is_err());
}

#[test]
fn retargeting_keeps_the_unitary() {
    let c = compile_qft_ptn(6, TargetSet::CnotBased).unwrap().circuit;
    let r = retarget_to_iswap(&c).unwrap();
    assert!(r
        .gates()
        .iter()
        .all(|g| !g.is_two_qubit() || matches!(g, Gate::Iswap(..))));
    let dev = equiv_up_to_phase(&circuit_unitary(&r).unwrap(), &circuit_unitary(&c).unwrap()).1;
    assert!(dev < 1e-10, "{dev}");

    // The strict pass only accepts DCNOTs.
    assert!(matches!(
        retarget_dcnot_to_iswap(&c),
        Err(Error::Retarget(_))
    ));
    let d = Circuit::from_gates(
        3,
        [
            Gate::H(0),
            Gate::Dcnot(0, 1),
            Gate::Rz(2, 0.3),
            Gate::Dcnot(2, 1),
        ],
    )
    .unwrap();
    let r = retarget_dcnot_to_iswap(&d).unwrap();
    assert_eq!(r.two_qubit_count(CountMode::Native(Native::Iswap)), 2);
    let dev = equiv_up_to_phase(&circuit_unitary(&r).unwrap(), &circuit_unitary(&d).unwrap()).1;
    assert!(dev < 1e-10, "{dev}");
}

#[test]
fn iswap_placements_point_at_rotations() {
    for n in 2..=10 {
        let c = compile_qft_ptn(n, TargetSet::IswapBased).unwrap();
        for p in &c.placements {
            assert!(matches!(c.circuit.gates()[p.position], Gate::Rz(q, _) if q == p.qubit));
        }
    }
}

/// The prepared states are the columns of the inverse DFT, so the DFT maps
/// each one to a basis state.
#[test]
fn fourier_prep_lands_on_basis_states() {
    for n in 1..=8 {
        let d = 1usize << n;
        for k in 0..d {
            let mut s = StateVector::zero(n);
            s.run(&fourier_state_prep(n, k).unwrap()).unwrap();
            let a = s.amplitudes();
            let w = 2.0 * PI / d as f64;
            let out: C = (0..d)
                .map(|j| C::from_polar(1.0 / (d as f64).sqrt(), w * ((k * j) % d) as f64) * a[j])
                .sum();
            assert!(
                (out.norm() - 1.0).abs() < 1e-10,
                "n={n} k={k}: {}",
                out.norm()
            );
        }
    }
}

#[test]
fn compiled_circuits_send_prepared_states_home() {
    for m in Method::ALL {
        for n in 1..=6 {
            let c = m.compile(n).unwrap();
            for k in 0..1usize << n {
                let mut s = StateVector::zero(n);
                s.run(&fourier_state_prep(n, k).unwrap()).unwrap();
                s.run(&c.circuit).unwrap();
                let hit = twine::sim::output_index(k, &c.sigma);
                assert!(
                    (s.probabilities()[hit] - 1.0).abs() < 1e-10,
                    "{m} n={n} k={k}"
                );
            }
        }
    }
}
