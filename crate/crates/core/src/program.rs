//! The CHP assembly language.
//!
//! One instruction per line, tokens separated by whitespace, `#` starts a
//! comment. Mnemonics are case-insensitive and qubits are 0-based:
//!
//! ```text
//! c 0 1        # CNOT, control 0, target 1
//! h 0          # Hadamard
//! p 1          # phase gate
//! m 1          # standard-basis measurement
//! u t 2        # named gate from a `gate` section
//! if 0 h 2     # run `h 2` when measurement record 0 read 1
//! ```
//!
//! Numeric sections describe initial product blocks and named gates:
//!
//! ```text
//! block 1      # density matrix of the next qubit, 2 rows of 2 entries
//! 0.5,0 0.5,0
//! 0.5,0 0.5,0
//! gate t 1     # 1-qubit gate named t
//! 1,0 0,0
//! 0,0 0.7071067811865476,0.7071067811865476
//! ```
//!
//! Entries are `re,im` (or a bare real). Within a `2^b`-dimensional matrix,
//! bit `l` of the row index belongs to the `l`-th qubit of the block or of
//! the gate's operand list. Blocks are laid out on consecutive qubits in
//! the order given. The gates `t` and `tdg` are built in.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gate::Gate;

#[derive(Debug, Clone, PartialEq)]
pub enum Instruction {
    Cnot(usize, usize),
    Hadamard(usize),
    Phase(usize),
    Measure(usize),
    Unitary { name: String, qubits: Vec<usize> },
    /// Runs the inner instruction when measurement record `record` (0-based,
    /// program order) came out 1.
    Conditional { record: usize, instruction: Box<Instruction> },
}

impl Instruction {
    pub fn as_gate(&self) -> Option<Gate> {
        match *self {
            Instruction::Cnot(a, b) => Some(Gate::cnot(a, b)),
            Instruction::Hadamard(a) => Some(Gate::Hadamard(a)),
            Instruction::Phase(a) => Some(Gate::Phase(a)),
            _ => None,
        }
    }

    fn qubits(&self) -> Vec<usize> {
        match self {
            Instruction::Cnot(a, b) => vec![*a, *b],
            Instruction::Hadamard(a) | Instruction::Phase(a) | Instruction::Measure(a) => vec![*a],
            Instruction::Unitary { qubits, .. } => qubits.clone(),
            Instruction::Conditional { instruction, .. } => instruction.qubits(),
        }
    }
}

impl From<Gate> for Instruction {
    fn from(g: Gate) -> Self {
        match g {
            Gate::Cnot { control, target } => Instruction::Cnot(control, target),
            Gate::Hadamard(a) => Instruction::Hadamard(a),
            Gate::Phase(a) => Instruction::Phase(a),
        }
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instruction::Cnot(a, b) => write!(f, "c {a} {b}"),
            Instruction::Hadamard(a) => write!(f, "h {a}"),
            Instruction::Phase(a) => write!(f, "p {a}"),
            Instruction::Measure(a) => write!(f, "m {a}"),
            Instruction::Unitary { name, qubits } => {
                write!(f, "u {name}")?;
                for q in qubits {
                    write!(f, " {q}")?;
                }
                Ok(())
            }
            Instruction::Conditional {
                record,
                instruction,
            } => write!(f, "if {record} {instruction}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CircuitProgram {
    n: usize,
    instructions: Vec<Instruction>,
    blocks: Vec<DMatrix<Complex64>>,
    gates: BTreeMap<String, DMatrix<Complex64>>,
}

fn builtin_gates() -> BTreeMap<String, DMatrix<Complex64>> {
    let w = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let mut m = BTreeMap::new();
    m.insert("t".to_string(), DMatrix::from_row_slice(2, 2, &[one, zero, zero, w]));
    m.insert("tdg".to_string(), DMatrix::from_row_slice(2, 2, &[one, zero, zero, w.conj()]));
    m
}

fn num_qubits_of(dim: usize) -> Option<usize> {
    (dim.is_power_of_two() && dim >= 2).then(|| dim.trailing_zeros() as usize)
}

impl CircuitProgram {
    /// A measurement-free program on `n` qubits.
    pub fn from_gates(n: usize, gates: &[Gate]) -> Result<Self> {
        let mut p = CircuitProgram {
            n,
            ..Default::default()
        };
        for g in gates {
            g.validate(n)?;
            p.instructions.push((*g).into());
        }
        Ok(p)
    }

    /// Builds a program from instructions; `n` is the larger of `min_qubits`
    /// and one past the highest qubit used.
    pub fn from_instructions(min_qubits: usize, instructions: Vec<Instruction>) -> Result<Self> {
        let mut p = CircuitProgram {
            n: min_qubits,
            instructions,
            ..Default::default()
        };
        p.n = p.n.max(p.instructions.iter().flat_map(|i| i.qubits()).map(|q| q + 1).max().unwrap_or(0));
        p.validate()?;
        Ok(p)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    /// Initial product blocks declared with `block`; empty means `|0…0⟩`.
    pub fn blocks(&self) -> &[DMatrix<Complex64>] {
        &self.blocks
    }

    /// Gates declared with `gate` sections (built-ins excluded).
    pub fn gate_definitions(&self) -> &BTreeMap<String, DMatrix<Complex64>> {
        &self.gates
    }

    /// Looks up a named gate, falling back to the built-ins.
    pub fn gate(&self, name: &str) -> Option<DMatrix<Complex64>> {
        self.gates
            .get(name)
            .cloned()
            .or_else(|| builtin_gates().remove(name))
    }

    pub fn measurement_count(&self) -> usize {
        self.instructions
            .iter()
            .filter(|i| matches!(i, Instruction::Measure(_)))
            .count()
    }

    pub fn has_named_unitaries(&self) -> bool {
        self.instructions.iter().any(|i| match i {
            Instruction::Unitary { .. } => true,
            Instruction::Conditional { instruction, .. } => {
                matches!(**instruction, Instruction::Unitary { .. })
            }
            _ => false,
        })
    }

    /// The gate list of a program made only of `c`, `h` and `p`.
    pub fn unitary_gates(&self) -> Result<Vec<Gate>> {
        self.instructions
            .iter()
            .map(|i| {
                i.as_gate().ok_or_else(|| {
                    Error::InvalidInput(format!(
                        "`{i}` is not a stabilizer gate; only c, h and p are allowed here"
                    ))
                })
            })
            .collect()
    }

    fn validate(&self) -> Result<()> {
        let mut measured = 0;
        for ins in &self.instructions {
            self.validate_one(ins, measured)?;
            if matches!(ins, Instruction::Measure(_)) {
                measured += 1;
            }
        }
        Ok(())
    }

    fn validate_one(&self, ins: &Instruction, measured: usize) -> Result<()> {
        match ins {
            Instruction::Cnot(a, b) => Gate::cnot(*a, *b).validate(self.n),
            Instruction::Hadamard(a) | Instruction::Phase(a) | Instruction::Measure(a) => {
                Error::check_qubit(*a, self.n)
            }
            Instruction::Unitary { name, qubits } => {
                let u = self
                    .gate(name)
                    .ok_or_else(|| Error::InvalidInput(format!("unknown gate `{name}`")))?;
                if num_qubits_of(u.nrows()) != Some(qubits.len()) {
                    return Err(Error::InvalidInput(format!(
                        "gate `{name}` acts on {} qubits, {} given",
                        num_qubits_of(u.nrows()).unwrap_or(0),
                        qubits.len()
                    )));
                }
                for (i, &q) in qubits.iter().enumerate() {
                    Error::check_qubit(q, self.n)?;
                    if qubits[..i].contains(&q) {
                        return Err(Error::InvalidInput(format!("qubit {q} repeated")));
                    }
                }
                Ok(())
            }
            Instruction::Conditional {
                record,
                instruction,
            } => {
                if *record >= measured {
                    return Err(Error::InvalidInput(format!(
                        "record {record} does not refer to an earlier measurement"
                    )));
                }
                if matches!(
                    **instruction,
                    Instruction::Measure(_) | Instruction::Conditional { .. }
                ) {
                    return Err(Error::InvalidInput(
                        "only gates can be conditioned on a record".into(),
                    ));
                }
                self.validate_one(instruction, measured)
            }
        }
    }

    /// Canonical text form; `parse(render(p)) == p`.
    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for CircuitProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let write_matrix = |f: &mut fmt::Formatter<'_>, m: &DMatrix<Complex64>| -> fmt::Result {
            for r in 0..m.nrows() {
                let row: Vec<String> = (0..m.ncols())
                    .map(|c| format!("{},{}", m[(r, c)].re, m[(r, c)].im))
                    .collect();
                writeln!(f, "{}", row.join(" "))?;
            }
            Ok(())
        };
        for b in &self.blocks {
            writeln!(f, "block {}", num_qubits_of(b.nrows()).unwrap_or(0))?;
            write_matrix(f, b)?;
        }
        for (name, u) in &self.gates {
            writeln!(f, "gate {name} {}", num_qubits_of(u.nrows()).unwrap_or(0))?;
            write_matrix(f, u)?;
        }
        for ins in &self.instructions {
            writeln!(f, "{ins}")?;
        }
        Ok(())
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_index(tok: &str, line: usize) -> Result<usize> {
    tok.parse::<usize>()
        .map_err(|_| parse_err(line, format!("`{tok}` is not a nonnegative integer")))
}

fn parse_entry(tok: &str, line: usize) -> Result<Complex64> {
    let bad = || parse_err(line, format!("`{tok}` is not a number or `re,im` pair"));
    let (re, im) = match tok.split_once(',') {
        Some((re, im)) => (re, im),
        None => (tok, "0"),
    };
    Ok(Complex64::new(
        re.trim().parse().map_err(|_| bad())?,
        im.trim().parse().map_err(|_| bad())?,
    ))
}

fn parse_instruction(tokens: &[&str], line: usize) -> Result<Instruction> {
    let op = tokens[0].to_ascii_lowercase();
    let args = &tokens[1..];
    let arity = |want: usize| {
        if args.len() == want {
            Ok(())
        } else {
            Err(parse_err(
                line,
                format!("`{op}` takes {want} operand(s), found {}", args.len()),
            ))
        }
    };
    match op.as_str() {
        "c" => {
            arity(2)?;
            let (a, b) = (parse_index(args[0], line)?, parse_index(args[1], line)?);
            if a == b {
                return Err(parse_err(line, format!("CNOT control and target are both {a}")));
            }
            Ok(Instruction::Cnot(a, b))
        }
        "h" => {
            arity(1)?;
            Ok(Instruction::Hadamard(parse_index(args[0], line)?))
        }
        "p" => {
            arity(1)?;
            Ok(Instruction::Phase(parse_index(args[0], line)?))
        }
        "m" => {
            arity(1)?;
            Ok(Instruction::Measure(parse_index(args[0], line)?))
        }
        "u" => {
            if args.len() < 2 {
                return Err(parse_err(line, "`u` needs a gate name and at least one qubit"));
            }
            let qubits = args[1..]
                .iter()
                .map(|t| parse_index(t, line))
                .collect::<Result<Vec<_>>>()?;
            Ok(Instruction::Unitary {
                name: args[0].to_ascii_lowercase(),
                qubits,
            })
        }
        "if" => {
            if args.len() < 2 {
                return Err(parse_err(line, "`if` needs a record index and an instruction"));
            }
            let record = parse_index(args[0], line)?;
            let inner = parse_instruction(&args[1..], line)?;
            Ok(Instruction::Conditional {
                record,
                instruction: Box::new(inner),
            })
        }
        other => Err(parse_err(line, format!("unknown instruction `{other}`"))),
    }
}

/// Parses CHP text. Errors carry 1-based line numbers.
pub fn parse(text: &str) -> Result<CircuitProgram> {
    let mut program = CircuitProgram::default();
    let mut lines: Vec<(usize, Vec<&str>)> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if !tokens.is_empty() {
            lines.push((k + 1, tokens));
        }
    }
    let mut measured = 0;
    let mut instruction_lines = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        let (line, ref tokens) = lines[i];
        i += 1;
        let head = tokens[0].to_ascii_lowercase();
        if head == "block" || head == "gate" {
            let (name, size_tok) = match (head.as_str(), tokens.len()) {
                ("block", 2) => (None, tokens[1]),
                ("gate", 3) => (Some(tokens[1].to_ascii_lowercase()), tokens[2]),
                _ => {
                    return Err(parse_err(
                        line,
                        "expected `block <b>` or `gate <name> <b>`",
                    ))
                }
            };
            let b = parse_index(size_tok, line)?;
            if b == 0 || b > 10 {
                return Err(parse_err(line, format!("block size {b} outside 1..=10")));
            }
            let dim = 1usize << b;
            let mut entries = Vec::with_capacity(dim * dim);
            for r in 0..dim {
                let Some((row_line, row)) = lines.get(i) else {
                    return Err(parse_err(line, format!("expected {dim} matrix rows, found {r}")));
                };
                if row.len() != dim {
                    return Err(parse_err(
                        *row_line,
                        format!("expected {dim} entries, found {}", row.len()),
                    ));
                }
                for tok in row {
                    entries.push(parse_entry(tok, *row_line)?);
                }
                i += 1;
            }
            let m = DMatrix::from_row_slice(dim, dim, &entries);
            match name {
                None => program.blocks.push(m),
                Some(name) => {
                    if program.gates.insert(name.clone(), m).is_some() {
                        return Err(parse_err(line, format!("gate `{name}` defined twice")));
                    }
                }
            }
            continue;
        }
        let ins = parse_instruction(tokens, line)?;
        if let Instruction::Conditional { record, .. } = &ins {
            if *record >= measured {
                return Err(parse_err(
                    line,
                    format!("record {record} does not refer to an earlier measurement"),
                ));
            }
        }
        if matches!(ins, Instruction::Measure(_)) {
            measured += 1;
        }
        instruction_lines.push(line);
        program.instructions.push(ins);
    }

    let block_qubits: usize = program
        .blocks
        .iter()
        .map(|b| num_qubits_of(b.nrows()).unwrap_or(0))
        .sum();
    let used = program
        .instructions
        .iter()
        .flat_map(|i| i.qubits())
        .map(|q| q + 1)
        .max()
        .unwrap_or(0);
    if !program.blocks.is_empty() && used > block_qubits {
        return Err(parse_err(
            instruction_lines.last().copied().unwrap_or(1),
            format!("blocks cover {block_qubits} qubits but qubit {} is used", used - 1),
        ));
    }
    program.n = used.max(block_qubits);
    let mut count = 0;
    for (ins, &line) in program.instructions.iter().zip(&instruction_lines) {
        program
            .validate_one(ins, count)
            .map_err(|e| parse_err(line, e.to_string()))?;
        if matches!(ins, Instruction::Measure(_)) {
            count += 1;
        }
    }
    Ok(program)
}

/// Teleports qubit 0 to qubit 2. The measured bits are copied to qubits 3
/// and 4, which then drive Bob's corrections as ordinary gates.
pub const TELEPORTATION: &str = "\
h 1
c 1 2
c 0 1
h 0
m 0
m 1
c 0 3
c 1 4
c 4 2
h 2
c 3 2
h 2
";

pub const GHZ: &str = "\
h 0
c 0 1
c 0 2
m 0
m 1
m 2
";

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn teleportation_listing() {
        let p = parse(TELEPORTATION).unwrap();
        assert_eq!(p.num_qubits(), 5);
        assert_eq!(p.instructions().len(), 12);
        assert_eq!(p.measurement_count(), 2);
    }

    #[test]
    fn small_program() {
        let p = parse("h 0\nm 0").unwrap();
        assert_eq!(p.instructions(), &[Instruction::Hadamard(0), Instruction::Measure(0)]);
        assert_eq!(p.num_qubits(), 1);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("c 3 3", 1),
            ("h 0\nx 1", 2),
            ("h 0\n\n# note\nh", 4),
            ("h -1", 1),
            ("m 0\nif 1 h 0", 2),
            ("if 0 h 0", 1),
            ("u t", 1),
            ("block 1\n1,0 0,0", 1),
            ("block 1\n1,0 0\n0,0 zz", 3),
            ("h 0\nm 0\nif 0 m 0", 3),
            ("u nope 0", 1),
            ("gate g 1\n1 0\n0 1\nu g 0 1", 4),
        ];
        for (text, line) in cases {
            match parse(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn comments_and_case() {
        let p = parse("H 0 # hadamard\n  C 0 1\n#m 1\nM 1").unwrap();
        assert_eq!(p.instructions().len(), 3);
        assert_eq!(p.num_qubits(), 2);
    }

    #[test]
    fn sections_and_round_trip() {
        let text = "\
block 1
0.5,0 0.5,0
0.5,0 0.5,0
block 1
1 0
0 0
gate sx 1
0.5,0.5 0.5,-0.5
0.5,-0.5 0.5,0.5
u sx 0
u t 1
m 0
if 0 c 0 1
m 1
";
        let p = parse(text).unwrap();
        assert_eq!(p.num_qubits(), 2);
        assert_eq!(p.blocks().len(), 2);
        assert!(p.gate("sx").is_some());
        assert!(p.gate("t").is_some());
        assert!(p.has_named_unitaries());
        let again = parse(&p.render()).unwrap();
        assert_eq!(again, p);
        assert!(p.unitary_gates().is_err());
    }

    #[test]
    fn render_round_trip_plain() {
        let p = parse(TELEPORTATION).unwrap();
        assert_eq!(parse(&p.render()).unwrap(), p);
    }

    #[test]
    fn from_gates_round_trip() {
        let gates = [Gate::Hadamard(0), Gate::cnot(0, 2), Gate::Phase(1)];
        let p = CircuitProgram::from_gates(3, &gates).unwrap();
        assert_eq!(p.unitary_gates().unwrap(), gates.to_vec());
        assert!(CircuitProgram::from_gates(2, &gates).is_err());
    }

    #[test]
    fn blocks_must_cover_used_qubits() {
        assert!(parse("block 1\n1 0\n0 0\nh 1").is_err());
    }
}
