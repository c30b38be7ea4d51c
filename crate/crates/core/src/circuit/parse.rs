//! Line-oriented circuit text format.
//!
//! ```text
//! wires 3;
//! H 0; T 1        # statements end at ';' or newline
//! CNOT 1 0 L=2
//! U 2 [0 1; 1 0]  # entries are real, imaginary ("2i") or "re+imi"
//! TOFFOLI 0 1 2
//! ```

use super::{validate_op, CircuitError, CircuitIR, GateOp, NamedGate};
use crate::gates::Mat2;
use crate::sparse::C64;

struct Statement {
    text: String,
    line: usize,
    col: usize,
}

fn split_statements(text: &str) -> Result<Vec<Statement>, CircuitError> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut start: Option<(usize, usize)> = None;
    let mut depth = 0usize;
    let mut line = 1;
    let mut col = 0;
    let mut in_comment = false;
    for ch in text.chars() {
        col += 1;
        if ch == '\n' {
            in_comment = false;
            if depth > 0 {
                return Err(CircuitError::Syntax { line, col, msg: "unterminated '['".into() });
            }
            flush(&mut cur, &mut start, &mut out);
            line += 1;
            col = 0;
            continue;
        }
        if in_comment {
            continue;
        }
        match ch {
            '#' => in_comment = true,
            '[' => {
                depth += 1;
                cur.push(ch);
            }
            ']' => {
                if depth == 0 {
                    return Err(CircuitError::Syntax { line, col, msg: "unmatched ']'".into() });
                }
                depth -= 1;
                cur.push(ch);
            }
            ';' if depth == 0 => flush(&mut cur, &mut start, &mut out),
            _ => {
                if start.is_none() && !ch.is_whitespace() {
                    start = Some((line, col));
                }
                cur.push(ch);
            }
        }
    }
    if depth > 0 {
        return Err(CircuitError::Syntax { line, col, msg: "unterminated '['".into() });
    }
    flush(&mut cur, &mut start, &mut out);
    Ok(out)
}

fn flush(cur: &mut String, start: &mut Option<(usize, usize)>, out: &mut Vec<Statement>) {
    let text = cur.trim().to_string();
    if !text.is_empty() {
        let (line, col) = start.unwrap_or((0, 0));
        out.push(Statement { text, line, col });
    }
    cur.clear();
    *start = None;
}

/// Parses `re`, `imi`, `re+imi` or `re-imi`.
pub(crate) fn parse_complex(s: &str) -> Option<C64> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().ok().map(|re| C64::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let parse_im = |t: &str| -> Option<f64> {
        match t {
            "" | "+" => Some(1.0),
            "-" => Some(-1.0),
            _ => t.parse::<f64>().ok(),
        }
    };
    match split {
        Some(k) => Some(C64::new(body[..k].parse::<f64>().ok()?, parse_im(&body[k..])?)),
        None => Some(C64::new(0.0, parse_im(body)?)),
    }
}

fn syntax(st: &Statement, msg: impl Into<String>) -> CircuitError {
    CircuitError::Syntax { line: st.line, col: st.col, msg: msg.into() }
}

fn parse_wire(st: &Statement, tok: Option<&str>) -> Result<usize, CircuitError> {
    let tok = tok.ok_or_else(|| syntax(st, "missing wire index"))?;
    tok.parse::<usize>().map_err(|_| syntax(st, format!("bad wire index '{tok}'")))
}

fn parse_length(st: &Statement, tok: Option<&str>) -> Result<Option<usize>, CircuitError> {
    match tok {
        None => Ok(None),
        Some(t) => {
            let v = t.strip_prefix("L=").ok_or_else(|| syntax(st, format!("unexpected token '{t}'")))?;
            match v.parse::<usize>() {
                Ok(l) if l >= 1 => Ok(Some(l)),
                _ => Err(syntax(st, format!("bad region length '{v}'"))),
            }
        }
    }
}

fn parse_matrix(st: &Statement, body: &str) -> Result<Mat2, CircuitError> {
    let inner = body
        .trim()
        .strip_prefix('[')
        .and_then(|b| b.strip_suffix(']'))
        .ok_or_else(|| syntax(st, "expected [a b; c d]"))?;
    let rows: Vec<&str> = inner.split(';').collect();
    if rows.len() != 2 {
        return Err(syntax(st, "matrix must have 2 rows"));
    }
    let mut m = [[C64::new(0.0, 0.0); 2]; 2];
    for (r, row) in rows.iter().enumerate() {
        let entries: Vec<&str> = row.split_whitespace().collect();
        if entries.len() != 2 {
            return Err(syntax(st, "matrix rows must have 2 entries"));
        }
        for (c, e) in entries.iter().enumerate() {
            m[r][c] = parse_complex(e).ok_or_else(|| syntax(st, format!("bad complex number '{e}'")))?;
        }
    }
    Ok(m)
}

fn parse_statement(st: &Statement, wire_count: usize) -> Result<GateOp, CircuitError> {
    let (head, rest) = match st.text.find('[') {
        Some(k) => (&st.text[..k], Some(&st.text[k..])),
        None => (st.text.as_str(), None),
    };
    let mut toks = head.split_whitespace();
    let name = toks.next().ok_or_else(|| syntax(st, "empty statement"))?;
    let upper = name.to_ascii_uppercase();
    let named = match upper.as_str() {
        "H" => Some(NamedGate::H),
        "X" => Some(NamedGate::X),
        "S" => Some(NamedGate::S),
        "T" => Some(NamedGate::T),
        "I" => Some(NamedGate::I),
        _ => None,
    };
    let op = if let Some(gate) = named {
        GateOp::Named { gate, wire: parse_wire(st, toks.next())? }
    } else {
        match upper.as_str() {
            "U" => {
                let wire = parse_wire(st, toks.next())?;
                let body = rest.ok_or_else(|| syntax(st, "U requires a matrix"))?;
                GateOp::Unitary { matrix: parse_matrix(st, body)?, wire }
            }
            "CNOT" => {
                let control = parse_wire(st, toks.next())?;
                let target = parse_wire(st, toks.next())?;
                GateOp::Cnot { control, target, length: parse_length(st, toks.next())? }
            }
            "TOFFOLI" => {
                let control_a = parse_wire(st, toks.next())?;
                let target = parse_wire(st, toks.next())?;
                let control_b = parse_wire(st, toks.next())?;
                GateOp::Toffoli { control_a, target, control_b, length: parse_length(st, toks.next())? }
            }
            other => return Err(syntax(st, format!("unknown gate '{other}'"))),
        }
    };
    if !matches!(op, GateOp::Unitary { .. }) && rest.is_some() {
        return Err(syntax(st, "unexpected matrix"));
    }
    if toks.next().is_some() {
        return Err(syntax(st, "trailing tokens"));
    }
    validate_op(&op, wire_count)?;
    Ok(op)
}

/// Parses the circuit text format into a [`CircuitIR`].
pub fn parse_circuit(text: &str) -> Result<CircuitIR, CircuitError> {
    let statements = split_statements(text)?;
    let mut iter = statements.iter();
    let header = iter.next().ok_or(CircuitError::Syntax { line: 1, col: 1, msg: "missing 'wires N' header".into() })?;
    let mut toks = header.text.split_whitespace();
    if toks.next() != Some("wires") {
        return Err(syntax(header, "expected 'wires N' header"));
    }
    let wire_count = match (toks.next().map(str::parse::<usize>), toks.next()) {
        (Some(Ok(n)), None) if n > 0 => n,
        _ => return Err(syntax(header, "bad wire count")),
    };
    let mut circuit = CircuitIR::new(wire_count);
    for st in iter {
        let op = parse_statement(st, wire_count)?;
        circuit.push(op)?;
    }
    Ok(circuit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates;

    #[test]
    fn example_program() {
        let c = parse_circuit("wires 3; H 0; T 1; CNOT 1 0").unwrap();
        assert_eq!(c.wire_count, 3);
        assert_eq!(c.gates.len(), 3);
        assert_eq!(c.gates.iter().map(|g| g.column).collect::<Vec<_>>(), vec![0, 0, 1]);
    }

    #[test]
    fn non_adjacent_rejected() {
        assert_eq!(parse_circuit("wires 3; CNOT 0 2").unwrap_err(), CircuitError::NonAdjacentOperands(vec![0, 2]));
    }

    #[test]
    fn non_unitary_rejected() {
        let err = parse_circuit("wires 1; U 0 [1 0; 0 1.1]").unwrap_err();
        assert!(matches!(err, CircuitError::NonUnitaryMatrix(_)));
    }

    #[test]
    fn complex_entries() {
        assert_eq!(parse_complex("1"), Some(C64::new(1.0, 0.0)));
        assert_eq!(parse_complex("-2.5i"), Some(C64::new(0.0, -2.5)));
        assert_eq!(parse_complex("i"), Some(C64::new(0.0, 1.0)));
        assert_eq!(parse_complex("-i"), Some(C64::new(0.0, -1.0)));
        assert_eq!(parse_complex("1e-3-2i"), Some(C64::new(1e-3, -2.0)));
        assert_eq!(parse_complex("0.5+1e+2i"), Some(C64::new(0.5, 100.0)));
        assert_eq!(parse_complex("abc"), None);
    }

    #[test]
    fn unitary_with_complex_entries() {
        let c = parse_circuit("wires 1\nU 0 [0 -i; i 0]  # Pauli Y").unwrap();
        let GateOp::Unitary { matrix, .. } = c.gates[0].op else { panic!() };
        assert_eq!(matrix[0][1], C64::new(0.0, -1.0));
        assert!(gates::unitarity_error(&matrix) < 1e-15);
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_circuit("wires 2\nH 0\nFOO 1").unwrap_err() {
            CircuitError::Syntax { line, col, .. } => assert_eq!((line, col), (3, 1)),
            e => panic!("unexpected {e:?}"),
        }
        assert!(matches!(parse_circuit("H 0").unwrap_err(), CircuitError::Syntax { .. }));
        assert!(matches!(parse_circuit("wires 2; H 0 1").unwrap_err(), CircuitError::Syntax { .. }));
        assert!(matches!(parse_circuit("wires 2; U 0 [1 0; 0 1").unwrap_err(), CircuitError::Syntax { .. }));
        assert!(matches!(parse_circuit("wires 2; H 5").unwrap_err(), CircuitError::WireOutOfRange { .. }));
    }

    #[test]
    fn long_cnot_suffix() {
        let c = parse_circuit("wires 2; CNOT 1 0 L=3").unwrap();
        assert_eq!(c.gates[0].op, GateOp::Cnot { control: 1, target: 0, length: Some(3) });
        assert!(parse_circuit("wires 2; CNOT 1 0 L=0").is_err());
    }

    #[test]
    fn comments_and_blank_lines() {
        let c = parse_circuit("# header\nwires 3 # three wires\n\nH 1 # hadamard\nTOFFOLI 0 1 2\n").unwrap();
        assert_eq!(c.gates.len(), 2);
    }
}
