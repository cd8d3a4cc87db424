//! A small OpenQASM 2.0 subset: one `qreg`, the gates of [`Gate`], and
//! angle expressions over `pi`.
//!
//! `rz` here means `diag(1, e^{i theta})` (qelib1's `u1`), which differs
//! from qelib1's `rz` by a global phase; `u1` is accepted as an alias.

use num_rational::Rational64;
use num_traits::Zero;

use super::{Circuit, Gate};
use crate::phase::Phase;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}: {msg}")]
pub struct QasmError {
    pub line: usize,
    pub msg: String,
}

fn err<T>(line: usize, msg: impl Into<String>) -> Result<T, QasmError> {
    Err(QasmError { line, msg: msg.into() })
}

/// Statements with the line each one starts on; comments removed.
fn statements(text: &str) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut start = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split("//").next().unwrap_or("");
        for ch in line.chars() {
            if ch == ';' {
                out.push((start, cur.trim().to_string()));
                cur.clear();
            } else {
                if cur.trim().is_empty() && !ch.is_whitespace() {
                    start = i + 1;
                }
                cur.push(ch);
            }
        }
        cur.push(' ');
    }
    if !cur.trim().is_empty() {
        out.push((start, cur.trim().to_string()));
    }
    out
}

/// Value of an angle expression while it is being evaluated.
#[derive(Clone, Copy, Debug)]
enum Val {
    /// `r * pi`
    Pi(Rational64),
    Rat(Rational64),
    Float(f64),
}

impl Val {
    fn float(self) -> f64 {
        match self {
            Val::Pi(r) => *r.numer() as f64 / *r.denom() as f64 * std::f64::consts::PI,
            Val::Rat(r) => *r.numer() as f64 / *r.denom() as f64,
            Val::Float(x) => x,
        }
    }
}

struct ExprParser<'a> {
    toks: Vec<&'a str>,
    pos: usize,
}

fn tokenize(s: &str) -> Result<Vec<&str>, String> {
    let mut out = Vec::new();
    let b = s.as_bytes();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if b"+-*/()".contains(&c) {
            out.push(&s[i..i + 1]);
            i += 1;
        } else if c.is_ascii_alphanumeric() || c == b'.' {
            let j = i;
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'.') {
                i += 1;
            }
            out.push(&s[j..i]);
        } else {
            return Err(format!("unexpected character {:?} in angle", c as char));
        }
    }
    Ok(out)
}

impl<'a> ExprParser<'a> {
    fn peek(&self) -> Option<&'a str> {
        self.toks.get(self.pos).copied()
    }

    fn next(&mut self) -> Option<&'a str> {
        let t = self.peek();
        self.pos += 1;
        t
    }

    fn sum(&mut self) -> Result<Val, String> {
        let mut v = self.product()?;
        while let Some(op @ ("+" | "-")) = self.peek() {
            self.pos += 1;
            let r = self.product()?;
            let r = if op == "-" { neg(r) } else { r };
            v = match (v, r) {
                (Val::Pi(a), Val::Pi(b)) => Val::Pi(a + b),
                (Val::Rat(a), Val::Rat(b)) => Val::Rat(a + b),
                (a, b) => Val::Float(a.float() + b.float()),
            };
        }
        Ok(v)
    }

    fn product(&mut self) -> Result<Val, String> {
        let mut v = self.unary()?;
        while let Some(op @ ("*" | "/")) = self.peek() {
            self.pos += 1;
            let r = self.unary()?;
            v = match (op, v, r) {
                ("*", Val::Pi(a), Val::Rat(b)) | ("*", Val::Rat(b), Val::Pi(a)) => Val::Pi(a * b),
                ("*", Val::Rat(a), Val::Rat(b)) => Val::Rat(a * b),
                ("/", Val::Pi(a), Val::Rat(b)) if !b.is_zero() => Val::Pi(a / b),
                ("/", Val::Rat(a), Val::Rat(b)) if !b.is_zero() => Val::Rat(a / b),
                ("/", _, r) if r.float() == 0.0 => return Err("division by zero in angle".into()),
                ("*", a, b) => Val::Float(a.float() * b.float()),
                (_, a, b) => Val::Float(a.float() / b.float()),
            };
        }
        Ok(v)
    }

    fn unary(&mut self) -> Result<Val, String> {
        match self.peek() {
            Some("-") => {
                self.pos += 1;
                Ok(neg(self.unary()?))
            }
            Some("+") => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Val, String> {
        match self.next() {
            Some("(") => {
                let v = self.sum()?;
                if self.next() != Some(")") {
                    return Err("missing ')' in angle".into());
                }
                Ok(v)
            }
            Some("pi") => Ok(Val::Pi(Rational64::from_integer(1))),
            Some(t) if t.bytes().all(|c| c.is_ascii_digit()) => t
                .parse::<i64>()
                .map(|n| Val::Rat(Rational64::from_integer(n)))
                .map_err(|e| format!("bad integer {t:?}: {e}")),
            Some(t) => t.parse::<f64>().map(Val::Float).map_err(|_| format!("bad number {t:?}")),
            None => Err("unexpected end of angle".into()),
        }
    }
}

fn neg(v: Val) -> Val {
    match v {
        Val::Pi(a) => Val::Pi(-a),
        Val::Rat(a) => Val::Rat(-a),
        Val::Float(x) => Val::Float(-x),
    }
}

/// Parses an angle such as `pi/4`, `3*pi/2`, `-pi` or `0.3`. Rational
/// multiples of pi come back exact, anything else as radians.
pub fn parse_phase_expr(s: &str) -> Result<Phase, String> {
    let toks = tokenize(s)?;
    let mut p = ExprParser { toks, pos: 0 };
    let v = p.sum()?;
    if p.pos != p.toks.len() {
        return Err(format!("trailing input in angle {s:?}"));
    }
    Ok(match v {
        Val::Pi(r) => Phase::from_rational(r),
        Val::Rat(r) if r.is_zero() => Phase::zero(),
        v => Phase::real(v.float()),
    })
}

fn parse_qubit(arg: &str, reg: &str, size: usize, line: usize) -> Result<usize, QasmError> {
    let arg = arg.trim();
    let Some(rest) = arg.strip_prefix(reg).map(str::trim_start) else {
        return err(line, format!("unknown register in {arg:?}"));
    };
    let Some(idx) = rest.strip_prefix('[').and_then(|r| r.strip_suffix(']')) else {
        return err(line, format!("expected {reg}[i], got {arg:?}"));
    };
    let q: usize = idx.trim().parse().map_err(|_| QasmError { line, msg: format!("bad index {idx:?}") })?;
    if q >= size {
        return err(line, format!("index {q} out of range for {reg}[{size}]"));
    }
    Ok(q)
}

pub fn parse_qasm(text: &str) -> Result<Circuit, QasmError> {
    let mut reg: Option<(String, usize)> = None;
    let mut gates = Vec::new();
    for (idx, (line, st)) in statements(text).into_iter().enumerate() {
        if st.is_empty() {
            continue;
        }
        let (head, rest) = match st.find(|c: char| c.is_whitespace() || c == '(') {
            Some(i) => (&st[..i], st[i..].trim()),
            None => (st.as_str(), ""),
        };
        match head {
            "OPENQASM" => {
                if idx != 0 || rest != "2.0" {
                    return err(line, format!("malformed header {st:?}, expected OPENQASM 2.0"));
                }
                continue;
            }
            "include" => continue,
            "barrier" => continue,
            "qreg" => {
                if reg.is_some() {
                    return err(line, "only one qreg is supported");
                }
                let (name, size) = rest
                    .strip_suffix(']')
                    .and_then(|r| r.split_once('['))
                    .ok_or_else(|| QasmError { line, msg: format!("malformed qreg {st:?}") })?;
                let size: usize =
                    size.trim().parse().map_err(|_| QasmError { line, msg: format!("bad qreg size {size:?}") })?;
                reg = Some((name.trim().to_string(), size));
                continue;
            }
            "creg" | "measure" | "reset" | "if" | "gate" => {
                return err(line, format!("`{head}` is outside the supported subset"));
            }
            _ => {}
        }
        let Some((ref rname, size)) = reg else {
            return err(line, "gate before qreg declaration");
        };
        let (param, args) = if let Some(r) = rest.strip_prefix('(') {
            let close = r.find(')').ok_or_else(|| QasmError { line, msg: "missing ')'".into() })?;
            let p = parse_phase_expr(&r[..close]).map_err(|m| QasmError { line, msg: m })?;
            (Some(p), r[close + 1..].trim())
        } else {
            (None, rest)
        };
        let qs: Vec<usize> = if args.is_empty() {
            Vec::new()
        } else {
            args.split(',').map(|a| parse_qubit(a, rname, size, line)).collect::<Result<_, _>>()?
        };
        let want = match head {
            "h" | "x" | "y" | "z" | "s" | "sdg" | "t" | "tdg" | "rz" | "u1" | "rx" => 1,
            "cx" | "CX" | "cz" | "swap" => 2,
            "ccx" | "ccz" => 3,
            _ => return err(line, format!("unknown gate {head:?}")),
        };
        if qs.len() != want {
            return err(line, format!("{head} takes {want} qubit(s), got {}", qs.len()));
        }
        let takes_param = matches!(head, "rz" | "u1" | "rx");
        if takes_param != param.is_some() {
            return err(line, format!("{head}: wrong number of parameters"));
        }
        let mut sorted = qs.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != qs.len() {
            return err(line, format!("{head}: repeated qubit"));
        }
        let g = match head {
            "h" => Gate::H(qs[0]),
            "x" => Gate::X(qs[0]),
            "y" => Gate::Y(qs[0]),
            "z" => Gate::Z(qs[0]),
            "s" => Gate::S(qs[0]),
            "sdg" => Gate::Sdg(qs[0]),
            "t" => Gate::T(qs[0]),
            "tdg" => Gate::Tdg(qs[0]),
            "rz" | "u1" => Gate::RZ(qs[0], param.unwrap()),
            "rx" => Gate::RX(qs[0], param.unwrap()),
            "cx" | "CX" => Gate::CX(qs[0], qs[1]),
            "cz" => Gate::CZ(qs[0], qs[1]),
            "swap" => Gate::Swap(qs[0], qs[1]),
            "ccx" => Gate::CCX(qs[0], qs[1], qs[2]),
            _ => Gate::CCZ(qs[0], qs[1], qs[2]),
        };
        gates.push(g);
    }
    let Some((_, qubits)) = reg else {
        return err(1, "missing qreg declaration");
    };
    Ok(Circuit { qubits, gates })
}

fn phase_text(p: Phase) -> String {
    match p {
        Phase::Exact(r) if r.is_zero() => "0".into(),
        Phase::Exact(r) => match (*r.numer(), *r.denom()) {
            (1, 1) => "pi".into(),
            (n, 1) => format!("pi*{n}"),
            (1, d) => format!("pi/{d}"),
            (n, d) => format!("pi*{n}/{d}"),
        },
        Phase::Real(x) => format!("{x}"),
    }
}

/// Prints a circuit in the accepted subset. Phase gadgets become a CNOT
/// ladder around an `rz`.
pub fn emit_qasm(c: &Circuit) -> String {
    let mut s = format!("OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[{}];\n", c.qubits);
    let q = |i: &usize| format!("q[{i}]");
    for g in &c.gates {
        match g {
            Gate::RZ(i, p) | Gate::RX(i, p) => s += &format!("{}({}) {};\n", g.name(), phase_text(*p), q(i)),
            Gate::PhaseGadget(qs, p) => {
                let (&t, rest) = qs.split_last().expect("nonempty gadget");
                for a in rest {
                    s += &format!("cx {},{};\n", q(a), q(&t));
                }
                s += &format!("rz({}) {};\n", phase_text(*p), q(&t));
                for a in rest.iter().rev() {
                    s += &format!("cx {},{};\n", q(a), q(&t));
                }
            }
            _ => {
                let args: Vec<String> = g.qubits().iter().map(q).collect();
                s += &format!("{} {};\n", g.name(), args.join(","));
            }
        }
    }
    s
}
