//! Dense statevector simulation.
//!
//! Qubit 0 is the most significant bit of a basis index, so the bitstring
//! of index `i` written with qubit 0 first is just `i` in binary.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64 as C;
use rayon::prelude::*;

use crate::circuit::{Circuit, Gate};
use crate::Error;

/// Largest width accepted by [`circuit_unitary`].
pub const UNITARY_LIMIT: usize = 12;
/// Largest width accepted by the noisy sampler.
pub const STATE_LIMIT: usize = 22;

const I: C = C::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    X,
    Y,
    Z,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<C>,
}

impl StateVector {
    pub fn zero(n: usize) -> Self {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, k: usize) -> Self {
        let mut amps = vec![C::new(0.0, 0.0); 1 << n];
        amps[k] = C::new(1.0, 0.0);
        StateVector { n, amps }
    }

    pub fn from_amplitudes(n: usize, amps: Vec<C>) -> Self {
        assert_eq!(amps.len(), 1 << n);
        StateVector { n, amps }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    fn mask(&self, q: usize) -> usize {
        1 << (self.n - 1 - q)
    }

    pub fn apply(&mut self, g: &Gate) -> Result<(), Error> {
        let (a, b) = g.qubits();
        for q in std::iter::once(a).chain(b) {
            if q >= self.n {
                return Err(Error::QubitRange {
                    qubit: q,
                    n: self.n,
                });
            }
        }
        if b == Some(a) {
            return Err(Error::InvalidGate(format!(
                "{} on a single qubit",
                g.name()
            )));
        }
        self.apply_unchecked(g);
        Ok(())
    }

    pub(crate) fn apply_unchecked(&mut self, g: &Gate) {
        let h = C::new(FRAC_1_SQRT_2, 0.0);
        let one = C::new(1.0, 0.0);
        match *g {
            Gate::H(q) => self.one_qubit(q, [[h, h], [h, -h]]),
            Gate::X(q) => self.pauli(q, Pauli::X),
            Gate::Z(q) => self.pauli(q, Pauli::Z),
            Gate::S(q) => self.phase(q, I),
            Gate::Sdg(q) => self.phase(q, -I),
            Gate::Rz(q, t) => {
                let m = self.mask(q);
                let (lo, hi) = (C::from_polar(1.0, -t / 2.0), C::from_polar(1.0, t / 2.0));
                for (i, x) in self.amps.iter_mut().enumerate() {
                    *x *= if i & m == 0 { lo } else { hi };
                }
            }
            Gate::Rx(q, t) => {
                let (c, s) = ((t / 2.0).cos(), (t / 2.0).sin());
                let (c, s) = (C::new(c, 0.0), C::new(0.0, -s));
                self.one_qubit(q, [[c, s], [s, c]])
            }
            Gate::Cnot(c, t) => self.cnot(c, t),
            Gate::Cz(a, b) => {
                let m = self.mask(a) | self.mask(b);
                for (i, x) in self.amps.iter_mut().enumerate() {
                    if i & m == m {
                        *x = -*x;
                    }
                }
            }
            Gate::Dcnot(a, b) => {
                self.cnot(a, b);
                self.cnot(b, a);
            }
            Gate::Swap(a, b) | Gate::Iswap(a, b) => {
                let (ma, mb) = (self.mask(a), self.mask(b));
                let f = if matches!(g, Gate::Iswap(..)) { I } else { one };
                for i in 0..self.amps.len() {
                    if i & ma != 0 && i & mb == 0 {
                        let j = i ^ ma ^ mb;
                        let (x, y) = (self.amps[i], self.amps[j]);
                        self.amps[i] = f * y;
                        self.amps[j] = f * x;
                    }
                }
            }
        }
    }

    pub fn pauli(&mut self, q: usize, p: Pauli) {
        let m = self.mask(q);
        match p {
            Pauli::Z => self.phase(q, C::new(-1.0, 0.0)),
            Pauli::X | Pauli::Y => {
                for i in 0..self.amps.len() {
                    if i & m == 0 {
                        let j = i | m;
                        let (x, y) = (self.amps[i], self.amps[j]);
                        if p == Pauli::X {
                            self.amps[i] = y;
                            self.amps[j] = x;
                        } else {
                            self.amps[i] = -I * y;
                            self.amps[j] = I * x;
                        }
                    }
                }
            }
        }
    }

    fn phase(&mut self, q: usize, f: C) {
        let m = self.mask(q);
        for (i, x) in self.amps.iter_mut().enumerate() {
            if i & m != 0 {
                *x *= f;
            }
        }
    }

    fn one_qubit(&mut self, q: usize, u: [[C; 2]; 2]) {
        let m = self.mask(q);
        for i in 0..self.amps.len() {
            if i & m == 0 {
                let j = i | m;
                let (x, y) = (self.amps[i], self.amps[j]);
                self.amps[i] = u[0][0] * x + u[0][1] * y;
                self.amps[j] = u[1][0] * x + u[1][1] * y;
            }
        }
    }

    fn cnot(&mut self, c: usize, t: usize) {
        let (mc, mt) = (self.mask(c), self.mask(t));
        for i in 0..self.amps.len() {
            if i & mc != 0 && i & mt == 0 {
                self.amps.swap(i, i | mt);
            }
        }
    }

    pub fn run(&mut self, circuit: &Circuit) -> Result<(), Error> {
        if circuit.n() != self.n {
            return Err(Error::InvalidInput(format!(
                "{}-qubit circuit on a {}-qubit state",
                circuit.n(),
                self.n
            )));
        }
        for g in circuit.gates() {
            self.apply_unchecked(g);
        }
        Ok(())
    }
}

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<C>,
}

impl Matrix {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![C::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = C::new(1.0, 0.0);
        }
        Matrix { dim, data }
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> C) -> Self {
        let data = (0..dim * dim).map(|k| f(k / dim, k % dim)).collect();
        Matrix { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> C {
        self.data[r * self.dim + c]
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        Matrix::from_fn(d, |r, c| {
            (0..d).map(|k| self.get(r, k) * other.get(k, c)).sum()
        })
    }

    pub fn scale(&self, f: C) -> Matrix {
        Matrix {
            dim: self.dim,
            data: self.data.iter().map(|x| x * f).collect(),
        }
    }

    /// Reorder rows by a map on basis indices: row `r` moves to `f(r)`.
    pub fn permute_rows(&self, f: impl Fn(usize) -> usize) -> Matrix {
        let d = self.dim;
        let mut data = vec![C::new(0.0, 0.0); d * d];
        for r in 0..d {
            let to = f(r);
            data[to * d..(to + 1) * d].copy_from_slice(&self.data[r * d..(r + 1) * d]);
        }
        Matrix { dim: d, data }
    }
}

/// Column `k` is the circuit applied to basis state `k`.
pub fn circuit_unitary(circuit: &Circuit) -> Result<Matrix, Error> {
    let n = circuit.n();
    if n > UNITARY_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: UNITARY_LIMIT,
        });
    }
    let dim = 1usize << n;
    let cols: Vec<Vec<C>> = (0..dim)
        .into_par_iter()
        .map(|k| {
            let mut s = StateVector::basis(n, k);
            s.run(circuit).expect("width checked");
            s.into_amplitudes()
        })
        .collect();
    Ok(Matrix::from_fn(dim, |r, c| cols[c][r]))
}

/// Max entrywise distance between `u` and `e^{iφ}·v`, with `φ` read off the
/// largest entry of `v`.
pub fn equiv_up_to_phase(u: &Matrix, v: &Matrix) -> (bool, f64) {
    if u.dim != v.dim {
        return (false, f64::INFINITY);
    }
    let (k, _) = v
        .data
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm_sqr().total_cmp(&b.1.norm_sqr()))
        .expect("non-empty matrix");
    let ratio = u.data[k] / v.data[k];
    let phase = if ratio.norm() > 0.0 {
        ratio / ratio.norm()
    } else {
        C::new(1.0, 0.0)
    };
    let dev = u
        .data
        .iter()
        .zip(&v.data)
        .map(|(x, y)| (x - phase * y).norm())
        .fold(0.0, f64::max);
    (dev <= 1e-10, dev)
}

/// `F[j][k] = ω^{jk}/√N` with `ω = e^{2πi/N}`.
pub fn dft(n: usize) -> Matrix {
    let dim = 1usize << n;
    let s = 1.0 / (dim as f64).sqrt();
    Matrix::from_fn(dim, |j, k| {
        let e = (j * k) % dim;
        C::from_polar(s, 2.0 * PI * e as f64 / dim as f64)
    })
}

/// Basis index at which a QFT output value `k` is read when logical `i`
/// (carrying output weight `2^i`) ends on physical qubit `sigma[i]`.
pub fn output_index(k: usize, sigma: &[usize]) -> usize {
    let n = sigma.len();
    sigma
        .iter()
        .enumerate()
        .map(|(i, &p)| ((k >> i) & 1) << (n - 1 - p))
        .sum()
}

/// Undo the output placement `sigma`: row `r` moves to the output value it
/// encodes, so the result can be compared against the plain DFT matrix.
pub fn unpermute_outputs(u: &Matrix, sigma: &[usize]) -> Matrix {
    let n = sigma.len();
    u.permute_rows(|r| (0..n).map(|i| ((r >> (n - 1 - sigma[i])) & 1) << i).sum())
}

pub fn bitstring(index: usize, n: usize) -> String {
    (0..n)
        .map(|q| {
            if index >> (n - 1 - q) & 1 == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

pub fn parse_bitstring(s: &str) -> Option<usize> {
    if s.is_empty() || s.len() > 63 || !s.bytes().all(|b| b == b'0' || b == b'1') {
        return None;
    }
    usize::from_str_radix(s, 2).ok()
}
