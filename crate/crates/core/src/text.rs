//! Circuit text format.
//!
//! One instruction per line: `<GATE> <q0> [q1 ...] [@ <cond>]`. A leading
//! header `qubits N cbits M` declares register sizes, `#` begins a comment,
//! a `!noise` prefix marks the instruction noiseless, and `CKX(k)`/`CKZ(k)`
//! carry the control count. `MEASURE` takes the qubit followed by the
//! classical destination bit. Metadata round-trips through `# meta` comments.

use crate::circuit::{Circuit, Condition, Gate, Instruction};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Malformed { line, message: message.into() }
}

fn parse_gate(tok: &str, line: usize) -> Result<Gate, ParseError> {
    let up = tok.to_ascii_uppercase();
    Ok(match up.as_str() {
        "I" => Gate::I,
        "X" => Gate::X,
        "Y" => Gate::Y,
        "Z" => Gate::Z,
        "H" => Gate::H,
        "S" => Gate::S,
        "T" => Gate::T,
        "TDG" => Gate::Tdg,
        "CX" => Gate::Cx,
        "CZ" => Gate::Cz,
        "CCX" => Gate::Ccx,
        "CCZ" => Gate::Ccz,
        "RESET" => Gate::Reset,
        "MEASURE" => Gate::Measure,
        _ => {
            if let Some(rest) = up.strip_prefix("CKX(").and_then(|r| r.strip_suffix(')')) {
                let k: u8 = rest.parse().map_err(|_| err(line, "bad CKX control count"))?;
                Gate::Ckx(k)
            } else if let Some(rest) = up.strip_prefix("CKZ(").and_then(|r| r.strip_suffix(')')) {
                let k: u8 = rest.parse().map_err(|_| err(line, "bad CKZ control count"))?;
                Gate::Ckz(k)
            } else {
                return Err(err(line, format!("unknown gate `{tok}`")));
            }
        }
    })
}

fn parse_condition(text: &str, line: usize) -> Result<Condition, ParseError> {
    let mut cond = Condition::default();
    for part in text.split('&') {
        let part = part.trim();
        let (neg, lit) = match part.strip_prefix('!') {
            Some(rest) => (true, rest.trim()),
            None => (false, part),
        };
        let bit = lit
            .strip_prefix('c')
            .and_then(|n| n.parse::<u32>().ok())
            .ok_or_else(|| err(line, format!("bad condition literal `{part}`")))?;
        cond.literals.push((bit, !neg));
    }
    Ok(cond)
}

pub fn parse_text(text: &str) -> Result<Circuit, ParseError> {
    let mut circuit = Circuit::new(0, 0);
    let mut saw_header = false;
    let mut max_qubit: Option<u32> = None;
    let mut max_cbit: Option<u32> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(meta) = rest.strip_prefix("meta ") {
                if let Some((k, v)) = meta.split_once('=') {
                    circuit.metadata.insert(k.trim().to_string(), v.trim().to_string());
                }
            }
            continue;
        }
        let mut body = line;
        let mut noisy_override = None;
        if let Some(rest) = body.strip_prefix("!noise") {
            noisy_override = Some(false);
            body = rest.trim_start();
        }
        let mut toks: Vec<&str> = Vec::new();
        let mut cond_text = None;
        match body.split_once('@') {
            Some((head, cond)) => {
                toks.extend(head.split_whitespace());
                cond_text = Some(cond.trim());
            }
            None => toks.extend(body.split_whitespace()),
        }
        if toks.is_empty() {
            return Err(err(line_no, "empty instruction"));
        }
        if toks[0] == "qubits" {
            if saw_header || !circuit.instructions.is_empty() {
                return Err(err(line_no, "header must come first"));
            }
            if toks.len() != 4 || toks[2] != "cbits" {
                return Err(err(line_no, "header must be `qubits N cbits M`"));
            }
            circuit.num_qubits =
                toks[1].parse().map_err(|_| err(line_no, "bad qubit count"))?;
            circuit.num_cbits =
                toks[3].parse().map_err(|_| err(line_no, "bad cbit count"))?;
            saw_header = true;
            continue;
        }
        let gate = parse_gate(toks[0], line_no)?;
        let mut nums: Vec<u32> = Vec::with_capacity(toks.len() - 1);
        for t in &toks[1..] {
            nums.push(t.parse().map_err(|_| err(line_no, format!("bad operand `{t}`")))?);
        }
        let mut target_bit = None;
        if gate == Gate::Measure {
            if nums.len() != 2 {
                return Err(err(line_no, "MEASURE takes a qubit and a classical bit"));
            }
            target_bit = Some(nums.pop().unwrap());
        }
        for &q in &nums {
            max_qubit = Some(max_qubit.map_or(q, |m: u32| m.max(q)));
        }
        if let Some(c) = target_bit {
            max_cbit = Some(max_cbit.map_or(c, |m: u32| m.max(c)));
        }
        let mut instr = Instruction::new(gate, nums);
        instr.target_bit = target_bit;
        if let Some(cond) = cond_text {
            let cond = parse_condition(cond, line_no)?;
            for &(b, _) in &cond.literals {
                max_cbit = Some(max_cbit.map_or(b, |m: u32| m.max(b)));
            }
            instr.condition = Some(cond);
        }
        if let Some(noisy) = noisy_override {
            instr.noisy = noisy;
        }
        circuit.push(instr);
    }
    if !saw_header {
        circuit.num_qubits = max_qubit.map_or(0, |m| m + 1);
        circuit.num_cbits = max_cbit.map_or(0, |m| m + 1);
    }
    Ok(circuit)
}

pub fn serialize_text(circuit: &Circuit) -> String {
    let mut out = String::new();
    out.push_str(&format!("qubits {} cbits {}\n", circuit.num_qubits, circuit.num_cbits));
    for (k, v) in &circuit.metadata {
        out.push_str(&format!("# meta {k}={v}\n"));
    }
    for instr in &circuit.instructions {
        if !instr.noisy && instr.gate.is_unitary() {
            out.push_str("!noise ");
        }
        out.push_str(&instr.gate.name());
        for q in &instr.operands {
            out.push_str(&format!(" {q}"));
        }
        if let Some(c) = instr.target_bit {
            out.push_str(&format!(" {c}"));
        }
        if let Some(cond) = &instr.condition {
            out.push_str(&format!(" @ {cond}"));
        }
        out.push('\n');
    }
    out
}
