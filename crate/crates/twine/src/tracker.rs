//! GF(2) bookkeeping of which logical parity each physical qubit holds
//! while CNOT-type gates run.
//!
//! Row `p` of `A` is the parity label of qubit `p`: its computational-basis
//! value is the XOR of the initial logical values in that row. Row `p` of
//! `B` is the X-side label: flipping physical qubit `p` flips exactly the
//! logical values in that row. `A·Bᵀ = I` throughout.

use std::fmt::Write as _;

use crate::circuit::{Circuit, Gate};
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelTableau {
    n: usize,
    words: usize,
    a: Vec<u64>,
    b: Vec<u64>,
}

impl LabelTableau {
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        let mut a = vec![0u64; n * words];
        for p in 0..n {
            a[p * words + p / 64] |= 1 << (p % 64);
        }
        LabelTableau {
            n,
            words,
            b: a.clone(),
            a,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn row<'a>(&self, m: &'a [u64], p: usize) -> &'a [u64] {
        &m[p * self.words..(p + 1) * self.words]
    }

    /// CNOT with control `c` and target `t`.
    pub fn apply_cnot(&mut self, c: usize, t: usize) -> Result<(), Error> {
        if c == t {
            return Err(Error::InvalidGate(format!(
                "CNOT control equals target ({c})"
            )));
        }
        if c >= self.n || t >= self.n {
            return Err(Error::QubitRange {
                qubit: c.max(t),
                n: self.n,
            });
        }
        let w = self.words;
        for k in 0..w {
            self.a[t * w + k] ^= self.a[c * w + k];
            self.b[c * w + k] ^= self.b[t * w + k];
        }
        debug_assert!(self.consistent_around(c, t));
        Ok(())
    }

    /// Replay one gate. Single-qubit gates and CZ leave labels alone;
    /// iSWAP has no label semantics and is refused.
    pub fn apply_gate(&mut self, g: &Gate) -> Result<(), Error> {
        match *g {
            Gate::Cnot(c, t) => self.apply_cnot(c, t),
            Gate::Dcnot(a, b) => {
                self.apply_cnot(a, b)?;
                self.apply_cnot(b, a)
            }
            Gate::Swap(a, b) => {
                self.apply_cnot(a, b)?;
                self.apply_cnot(b, a)?;
                self.apply_cnot(a, b)
            }
            Gate::Iswap(..) => Err(Error::InvalidGate("ISWAP cannot be label-tracked".into())),
            _ => Ok(()),
        }
    }

    pub fn replay(circuit: &Circuit) -> Result<Self, Error> {
        let mut t = LabelTableau::new(circuit.n());
        for g in circuit.gates() {
            t.apply_gate(g)?;
        }
        Ok(t)
    }

    fn singleton(&self, row: &[u64]) -> Option<usize> {
        let mut found = None;
        for (k, &w) in row.iter().enumerate() {
            if w == 0 {
                continue;
            }
            if found.is_some() || w.count_ones() != 1 {
                return None;
            }
            found = Some(k * 64 + w.trailing_zeros() as usize);
        }
        found
    }

    /// `Some(i)` iff qubit `p` holds exactly logical `i` in both bases.
    pub fn purity(&self, p: usize) -> Option<usize> {
        let i = self.singleton(self.row(&self.a, p))?;
        (self.singleton(self.row(&self.b, p)) == Some(i)).then_some(i)
    }

    /// `Some(j)` iff logical `j` occurs in the label of qubit `p` and in no
    /// other label. A Hadamard on `p` then acts on `j` alone, up to phases
    /// controlled by the other members of the label.
    pub fn isolated(&self, p: usize) -> Option<usize> {
        self.singleton(self.row(&self.b, p))
    }

    pub fn parity_label(&self, p: usize) -> Vec<usize> {
        bits(self.row(&self.a, p))
    }

    pub fn x_label(&self, p: usize) -> Vec<usize> {
        bits(self.row(&self.b, p))
    }

    pub fn label_is(&self, p: usize, logicals: &[usize]) -> bool {
        let mut want = vec![0u64; self.words];
        for &i in logicals {
            want[i / 64] ^= 1 << (i % 64);
        }
        self.row(&self.a, p) == want.as_slice()
    }

    /// `σ` with `σ[i] = p` iff qubit `p` is pure in logical `i`.
    pub fn final_permutation(&self) -> Result<Vec<usize>, Error> {
        let mut sigma = vec![usize::MAX; self.n];
        let mut impure = Vec::new();
        for p in 0..self.n {
            match self.purity(p) {
                Some(i) => sigma[i] = p,
                None => impure.push(p),
            }
        }
        if impure.is_empty() {
            Ok(sigma)
        } else {
            Err(Error::ImpureFinalState(impure))
        }
    }

    /// Rows of `A`, a blank line, rows of `B`; one `0`/`1` per logical.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for m in [&self.a, &self.b] {
            for p in 0..self.n {
                let row = self.row(m, p);
                for i in 0..self.n {
                    out.push(if row[i / 64] >> (i % 64) & 1 == 1 {
                        '1'
                    } else {
                        '0'
                    });
                }
                out.push('\n');
            }
            if std::ptr::eq(m, &self.a) {
                out.push('\n');
            }
        }
        out
    }

    fn dot(&self, ap: usize, bq: usize) -> bool {
        let (x, y) = (self.row(&self.a, ap), self.row(&self.b, bq));
        x.iter()
            .zip(y)
            .map(|(u, v)| (u & v).count_ones())
            .sum::<u32>()
            % 2
            == 1
    }

    /// `A·Bᵀ = I`, restricted to the rows a CNOT(c,t) can disturb.
    fn consistent_around(&self, c: usize, t: usize) -> bool {
        (0..self.n).all(|q| self.dot(t, q) == (t == q) && self.dot(q, c) == (q == c))
    }

    pub fn is_consistent(&self) -> bool {
        (0..self.n).all(|p| (0..self.n).all(|q| self.dot(p, q) == (p == q)))
    }
}

fn bits(row: &[u64]) -> Vec<usize> {
    let mut out = Vec::new();
    for (k, &w) in row.iter().enumerate() {
        let mut w = w;
        while w != 0 {
            out.push(k * 64 + w.trailing_zeros() as usize);
            w &= w - 1;
        }
    }
    out
}

impl std::fmt::Display for LabelTableau {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut s = String::new();
        for p in 0..self.n {
            write!(s, "{}:{:?} ", p, self.parity_label(p)).unwrap();
        }
        f.write_str(s.trim_end())
    }
}
