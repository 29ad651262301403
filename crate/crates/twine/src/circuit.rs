//! Gate-level circuits on a linear chain of qubits.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    H(usize),
    X(usize),
    Z(usize),
    S(usize),
    Sdg(usize),
    Rz(usize, f64),
    Rx(usize, f64),
    Cnot(usize, usize),
    Cz(usize, usize),
    /// `CNOT(a,b)` followed by `CNOT(b,a)`.
    Dcnot(usize, usize),
    Iswap(usize, usize),
    Swap(usize, usize),
}

impl Gate {
    pub fn name(&self) -> &'static str {
        match self {
            Gate::H(_) => "H",
            Gate::X(_) => "X",
            Gate::Z(_) => "Z",
            Gate::S(_) => "S",
            Gate::Sdg(_) => "SDG",
            Gate::Rz(..) => "RZ",
            Gate::Rx(..) => "RX",
            Gate::Cnot(..) => "CNOT",
            Gate::Cz(..) => "CZ",
            Gate::Dcnot(..) => "DCNOT",
            Gate::Iswap(..) => "ISWAP",
            Gate::Swap(..) => "SWAP",
        }
    }

    /// Qubits touched, first operand first.
    pub fn qubits(&self) -> (usize, Option<usize>) {
        match *self {
            Gate::H(q) | Gate::X(q) | Gate::Z(q) | Gate::S(q) | Gate::Sdg(q) => (q, None),
            Gate::Rz(q, _) | Gate::Rx(q, _) => (q, None),
            Gate::Cnot(a, b)
            | Gate::Cz(a, b)
            | Gate::Dcnot(a, b)
            | Gate::Iswap(a, b)
            | Gate::Swap(a, b) => (a, Some(b)),
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        self.qubits().1.is_some()
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            Gate::Rz(_, a) | Gate::Rx(_, a) => Some(a),
            _ => None,
        }
    }

    /// Layers this gate occupies when lowered to its native two-qubit gate
    /// (DCNOT is two CNOTs back to back, SWAP three).
    pub fn duration(&self) -> usize {
        match self {
            Gate::Dcnot(..) => 2,
            Gate::Swap(..) => 3,
            _ => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Native {
    Cnot,
    Iswap,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountMode {
    /// Count in units of the given native entangler.
    Native(Native),
    /// CNOT-equivalents: iSWAP and DCNOT count 2, SWAP 3.
    CnotEquivalent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DepthMode {
    AllGates,
    TwoQubitOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Purpose {
    Twine,
    Rotation,
    Hadamard,
    Prep,
}

impl Purpose {
    fn as_str(self) -> &'static str {
        match self {
            Purpose::Twine => "twine",
            Purpose::Rotation => "rotation",
            Purpose::Hadamard => "hadamard",
            Purpose::Prep => "prep",
        }
    }
}

impl FromStr for Purpose {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "twine" => Ok(Purpose::Twine),
            "rotation" => Ok(Purpose::Rotation),
            "hadamard" => Ok(Purpose::Hadamard),
            "prep" => Ok(Purpose::Prep),
            _ => Err(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Tag {
    pub purpose: Purpose,
    pub sweep: Option<u32>,
}

impl Tag {
    pub fn new(purpose: Purpose) -> Self {
        Tag {
            purpose,
            sweep: None,
        }
    }

    pub fn sweep(purpose: Purpose, sweep: u32) -> Self {
        Tag {
            purpose,
            sweep: Some(sweep),
        }
    }
}

/// An ordered gate list on `n` qubits. Every push is validated, so a
/// `Circuit` value is always well formed.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
    tags: Vec<Option<Tag>>,
}

impl Circuit {
    pub fn new(n: usize) -> Self {
        Circuit {
            n,
            gates: Vec::new(),
            tags: Vec::new(),
        }
    }

    pub fn from_gates(n: usize, gates: impl IntoIterator<Item = Gate>) -> Result<Self, Error> {
        let mut c = Circuit::new(n);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn from_tagged(
        n: usize,
        gates: impl IntoIterator<Item = (Gate, Option<Tag>)>,
    ) -> Result<Self, Error> {
        let mut c = Circuit::new(n);
        for (g, t) in gates {
            c.push_with(g, t)?;
        }
        Ok(c)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn tags(&self) -> &[Option<Tag>] {
        &self.tags
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, g: Gate) -> Result<usize, Error> {
        self.push_with(g, None)
    }

    pub fn push_tagged(&mut self, g: Gate, tag: Tag) -> Result<usize, Error> {
        self.push_with(g, Some(tag))
    }

    pub fn push_with(&mut self, g: Gate, tag: Option<Tag>) -> Result<usize, Error> {
        check_gate(self.n, &g)?;
        self.gates.push(g);
        self.tags.push(tag);
        Ok(self.gates.len() - 1)
    }

    /// Append all gates of `other` (same width).
    pub fn extend(&mut self, other: &Circuit) -> Result<(), Error> {
        if other.n != self.n {
            return Err(Error::Malformed(format!(
                "cannot join a {}-qubit circuit onto a {}-qubit one",
                other.n, self.n
            )));
        }
        self.gates.extend_from_slice(&other.gates);
        self.tags.extend_from_slice(&other.tags);
        Ok(())
    }

    pub fn two_qubit_count(&self, mode: CountMode) -> usize {
        self.gates.iter().map(|g| gate_cost(g, mode)).sum()
    }

    /// Greedy ASAP layering. DCNOT and SWAP occupy as many layers as their
    /// CNOT expansions.
    pub fn depth(&self, mode: DepthMode) -> usize {
        let mut free = vec![0usize; self.n];
        let mut depth = 0;
        for g in &self.gates {
            if mode == DepthMode::TwoQubitOnly && !g.is_two_qubit() {
                continue;
            }
            let (a, b) = g.qubits();
            let start = match b {
                Some(b) => free[a].max(free[b]),
                None => free[a],
            };
            let end = start + g.duration();
            free[a] = end;
            if let Some(b) = b {
                free[b] = end;
            }
            depth = depth.max(end);
        }
        depth
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("qubits {}\n", self.n);
        for (g, tag) in self.gates.iter().zip(&self.tags) {
            let (a, b) = g.qubits();
            write!(out, "{} {}", g.name(), a).unwrap();
            if let Some(b) = b {
                write!(out, " {}", b).unwrap();
            }
            if let Some(t) = g.angle() {
                write!(out, " {}", t).unwrap();
            }
            if let Some(tag) = tag {
                write!(out, " @{}", tag.purpose.as_str()).unwrap();
                if let Some(s) = tag.sweep {
                    write!(out, ":{}", s).unwrap();
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, Error> {
        let mut circuit: Option<Circuit> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |msg: String| Error::Syntax { line: line_no, msg };
            let mut toks: Vec<&str> = line.split_whitespace().collect();
            let c = match circuit.as_mut() {
                None => {
                    if toks.len() != 2 || toks[0] != "qubits" {
                        return Err(syntax("expected header `qubits N`".into()));
                    }
                    let n = toks[1]
                        .parse()
                        .map_err(|_| syntax(format!("bad qubit count `{}`", toks[1])))?;
                    circuit = Some(Circuit::new(n));
                    continue;
                }
                Some(c) => c,
            };
            let tag = match toks.last() {
                Some(t) if t.starts_with('@') => {
                    let t = toks.pop().unwrap();
                    Some(parse_tag(&t[1..]).ok_or_else(|| syntax(format!("bad tag `{}`", t)))?)
                }
                _ => None,
            };
            let gate = parse_gate(&toks).map_err(syntax)?;
            c.push_with(gate, tag).map_err(|e| match e {
                Error::Adjacency { .. } | Error::QubitRange { .. } => Error::Syntax {
                    line: line_no,
                    msg: e.to_string(),
                },
                other => other,
            })?;
        }
        circuit.ok_or(Error::Syntax {
            line: 0,
            msg: "missing header `qubits N`".into(),
        })
    }

    /// OpenQASM 2 text. DCNOT is written out as its two CNOTs.
    pub fn to_qasm(&self) -> String {
        let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
        if self.gates.iter().any(|g| matches!(g, Gate::Iswap(..))) {
            out.push_str("gate iswap a,b { s a; s b; h a; cx a,b; cx b,a; h b; }\n");
        }
        writeln!(out, "qreg q[{}];", self.n).unwrap();
        for g in &self.gates {
            match *g {
                Gate::H(q) => writeln!(out, "h q[{}];", q),
                Gate::X(q) => writeln!(out, "x q[{}];", q),
                Gate::Z(q) => writeln!(out, "z q[{}];", q),
                Gate::S(q) => writeln!(out, "s q[{}];", q),
                Gate::Sdg(q) => writeln!(out, "sdg q[{}];", q),
                Gate::Rz(q, t) => writeln!(out, "rz({}) q[{}];", t, q),
                Gate::Rx(q, t) => writeln!(out, "rx({}) q[{}];", t, q),
                Gate::Cnot(a, b) => writeln!(out, "cx q[{}],q[{}];", a, b),
                Gate::Cz(a, b) => writeln!(out, "cz q[{}],q[{}];", a, b),
                Gate::Dcnot(a, b) => {
                    writeln!(out, "cx q[{}],q[{}];\ncx q[{}],q[{}];", a, b, b, a)
                }
                Gate::Iswap(a, b) => writeln!(out, "iswap q[{}],q[{}];", a, b),
                Gate::Swap(a, b) => writeln!(out, "swap q[{}],q[{}];", a, b),
            }
            .unwrap();
        }
        out
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

pub fn gate_cost(g: &Gate, mode: CountMode) -> usize {
    match (mode, g) {
        (_, g) if !g.is_two_qubit() => 0,
        (CountMode::Native(Native::Iswap), Gate::Iswap(..) | Gate::Dcnot(..)) => 1,
        (CountMode::Native(Native::Iswap), Gate::Cnot(..) | Gate::Cz(..)) => 2,
        (_, Gate::Cnot(..) | Gate::Cz(..)) => 1,
        (_, Gate::Dcnot(..) | Gate::Iswap(..)) => 2,
        (_, Gate::Swap(..)) => 3,
        _ => unreachable!(),
    }
}

fn check_gate(n: usize, g: &Gate) -> Result<(), Error> {
    let (a, b) = g.qubits();
    for q in std::iter::once(a).chain(b) {
        if q >= n {
            return Err(Error::QubitRange { qubit: q, n });
        }
    }
    if let Some(b) = b {
        if a.abs_diff(b) != 1 {
            return Err(Error::Adjacency { a, b });
        }
    }
    if let Some(t) = g.angle() {
        if !t.is_finite() {
            return Err(Error::Malformed(format!(
                "non-finite angle in {}",
                g.name()
            )));
        }
    }
    Ok(())
}

fn parse_tag(s: &str) -> Option<Tag> {
    let (p, sweep) = match s.split_once(':') {
        Some((p, n)) => (p, Some(n.parse().ok()?)),
        None => (s, None),
    };
    Some(Tag {
        purpose: p.parse().ok()?,
        sweep,
    })
}

fn parse_gate(toks: &[&str]) -> Result<Gate, String> {
    let name = toks[0].to_ascii_uppercase();
    let args = &toks[1..];
    let q = |i: usize| -> Result<usize, String> {
        let t = args
            .get(i)
            .ok_or_else(|| format!("{} is missing an operand", name))?;
        t.parse().map_err(|_| format!("bad qubit index `{}`", t))
    };
    let angle = |i: usize| -> Result<f64, String> {
        let t = args
            .get(i)
            .ok_or_else(|| format!("{} is missing its angle", name))?;
        t.parse().map_err(|_| format!("bad angle `{}`", t))
    };
    let (gate, want) = match name.as_str() {
        "H" => (Gate::H(q(0)?), 1),
        "X" => (Gate::X(q(0)?), 1),
        "Z" => (Gate::Z(q(0)?), 1),
        "S" => (Gate::S(q(0)?), 1),
        "SDG" => (Gate::Sdg(q(0)?), 1),
        "RZ" => (Gate::Rz(q(0)?, angle(1)?), 2),
        "RX" => (Gate::Rx(q(0)?, angle(1)?), 2),
        "CNOT" | "CX" => (Gate::Cnot(q(0)?, q(1)?), 2),
        "CZ" => (Gate::Cz(q(0)?, q(1)?), 2),
        "DCNOT" => (Gate::Dcnot(q(0)?, q(1)?), 2),
        "ISWAP" => (Gate::Iswap(q(0)?, q(1)?), 2),
        "SWAP" => (Gate::Swap(q(0)?, q(1)?), 2),
        _ => return Err(format!("unknown gate `{}`", toks[0])),
    };
    if args.len() != want {
        return Err(format!(
            "{} takes {} operands, got {}",
            name,
            want,
            args.len()
        ));
    }
    Ok(gate)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        let c = Circuit::new(3);
        assert_eq!(c.two_qubit_count(CountMode::CnotEquivalent), 0);
        let c = Circuit::from_gates(2, [Gate::Dcnot(0, 1)]).unwrap();
        assert_eq!(c.two_qubit_count(CountMode::CnotEquivalent), 2);
        assert_eq!(c.two_qubit_count(CountMode::Native(Native::Iswap)), 1);
        let c = Circuit::from_gates(3, [Gate::Swap(0, 1), Gate::Cnot(1, 2)]).unwrap();
        assert_eq!(c.two_qubit_count(CountMode::CnotEquivalent), 4);
    }

    #[test]
    fn layering() {
        let c = Circuit::from_gates(4, [Gate::Cnot(0, 1), Gate::Cnot(2, 3)]).unwrap();
        assert_eq!(c.depth(DepthMode::AllGates), 1);
        let c = Circuit::from_gates(3, [Gate::Cnot(0, 1), Gate::Cnot(1, 2)]).unwrap();
        assert_eq!(c.depth(DepthMode::AllGates), 2);
        let c = Circuit::from_gates(2, [Gate::H(0), Gate::Cnot(0, 1)]).unwrap();
        assert_eq!(c.depth(DepthMode::TwoQubitOnly), 1);
        assert_eq!(c.depth(DepthMode::AllGates), 2);
        let c = Circuit::from_gates(3, [Gate::Dcnot(0, 1), Gate::Cnot(1, 2)]).unwrap();
        assert_eq!(c.depth(DepthMode::TwoQubitOnly), 3);
    }

    #[test]
    fn rejects_distant_pair() {
        let err = Circuit::parse("qubits 3\nCNOT 0 2\n").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 2, .. }), "{err}");
        assert!(matches!(
            Circuit::from_gates(3, [Gate::Cnot(0, 2)]),
            Err(Error::Adjacency { a: 0, b: 2 })
        ));
    }

    #[test]
    fn parse_errors_carry_line() {
        let err = Circuit::parse("# hi\nqubits 2\nH 0\nFOO 1\n").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 4, .. }));
        let err = Circuit::parse("qubits 2\nRZ 0\n").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 2, .. }));
        assert!(Circuit::parse("H 0\n").is_err());
    }

    #[test]
    fn empty_roundtrip() {
        let c = Circuit::parse("qubits 5\n").unwrap();
        assert_eq!(c.n(), 5);
        assert!(c.is_empty());
        assert_eq!(Circuit::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn tags_and_angles_survive() {
        let mut c = Circuit::new(2);
        c.push_tagged(Gate::Dcnot(1, 0), Tag::sweep(Purpose::Twine, 3))
            .unwrap();
        c.push_tagged(Gate::Rz(0, -0.1 - 0.2), Tag::new(Purpose::Rotation))
            .unwrap();
        c.push(Gate::Rx(1, -0.0)).unwrap();
        let back = Circuit::parse(&c.to_text()).unwrap();
        assert_eq!(back, c);
        assert!(back.gates()[2].angle().unwrap().is_sign_negative());
    }

    #[test]
    fn qasm_expands_dcnot() {
        let c = Circuit::from_gates(2, [Gate::Dcnot(0, 1)]).unwrap();
        let q = c.to_qasm();
        assert!(q.contains("qreg q[2];"));
        assert!(q.contains("cx q[0],q[1];\ncx q[1],q[0];"));
    }
}
