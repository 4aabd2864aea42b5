use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;

use super::{Circuit, CircuitError, Gate, GateId};

enum Def {
    Input(usize),
    Const(BigInt),
    Add(Vec<String>),
    Mul(Vec<String>),
}

struct Line {
    no: usize,
    name: String,
    def: Def,
}

fn syntax(line: usize, msg: impl Into<String>) -> CircuitError {
    CircuitError::Syntax { line, msg: msg.into() }
}

/// Parses the line-based circuit format.
///
/// Definitions may appear in any order; they are sorted topologically. Gates
/// with more than two operands become left-associated chains.
pub fn parse_circuit(text: &str) -> Result<Circuit, CircuitError> {
    let mut nvars: Option<usize> = None;
    let mut defs: Vec<Line> = Vec::new();
    let mut by_name: HashMap<String, usize> = HashMap::new();
    let mut output: Option<(usize, String)> = None;

    for (i, raw) in text.lines().enumerate() {
        let no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "ninputs" => {
                if toks.len() != 2 {
                    return Err(syntax(no, "expected `ninputs <n>`"));
                }
                if nvars.is_some() {
                    return Err(syntax(no, "repeated `ninputs`"));
                }
                nvars = Some(toks[1].parse().map_err(|_| syntax(no, "bad input count"))?);
            }
            "output" => {
                if toks.len() != 2 {
                    return Err(syntax(no, "expected `output <name>`"));
                }
                if output.is_some() {
                    return Err(syntax(no, "repeated `output`"));
                }
                output = Some((no, toks[1].to_string()));
            }
            _ => {
                if toks.len() < 3 || toks[1] != "=" {
                    return Err(syntax(no, "expected `<name> = <op> ...`"));
                }
                let name = toks[0].to_string();
                let args = &toks[3..];
                let def = match toks[2] {
                    "input" => {
                        if args.len() != 1 {
                            return Err(syntax(no, "`input` takes one index"));
                        }
                        let idx: usize = args[0].parse().map_err(|_| syntax(no, "bad variable index"))?;
                        let n = nvars.ok_or_else(|| syntax(no, "`input` before `ninputs`"))?;
                        if idx == 0 || idx > n {
                            return Err(CircuitError::BadVariable { index: idx, nvars: n });
                        }
                        Def::Input(idx - 1)
                    }
                    "const" => {
                        if args.len() != 1 {
                            return Err(syntax(no, "`const` takes one integer"));
                        }
                        Def::Const(args[0].parse().map_err(|_| syntax(no, "bad constant"))?)
                    }
                    op @ ("add" | "mul") => {
                        if args.len() < 2 {
                            return Err(syntax(no, format!("`{op}` needs at least two operands")));
                        }
                        let a = args.iter().map(|s| s.to_string()).collect();
                        if op == "add" {
                            Def::Add(a)
                        } else {
                            Def::Mul(a)
                        }
                    }
                    other => return Err(syntax(no, format!("unknown operation `{other}`"))),
                };
                if by_name.insert(name.clone(), defs.len()).is_some() {
                    return Err(CircuitError::Duplicate { line: no, name });
                }
                defs.push(Line { no, name, def });
            }
        }
    }

    let nvars = nvars.ok_or_else(|| syntax(1, "missing `ninputs`"))?;
    let (out_line, out_name) = output.ok_or(CircuitError::MissingOutput)?;
    for d in &defs {
        if let Def::Add(args) | Def::Mul(args) = &d.def {
            if let Some(bad) = args.iter().find(|a| !by_name.contains_key(*a)) {
                return Err(CircuitError::Undefined { line: d.no, name: bad.clone() });
            }
        }
    }
    let out_idx = *by_name
        .get(&out_name)
        .ok_or(CircuitError::Undefined { line: out_line, name: out_name })?;

    // Iterative DFS in file order; a file that is already topological keeps its order.
    let mut gates: Vec<Gate> = Vec::new();
    let mut id_of: Vec<Option<GateId>> = vec![None; defs.len()];
    let mut on_stack = vec![false; defs.len()];
    for root in 0..defs.len() {
        if id_of[root].is_some() {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        on_stack[root] = true;
        while let Some(&mut (d, ref mut next)) = stack.last_mut() {
            let args: &[String] = match &defs[d].def {
                Def::Add(a) | Def::Mul(a) => a,
                _ => &[],
            };
            if *next < args.len() {
                let child = by_name[&args[*next]];
                *next += 1;
                if id_of[child].is_none() {
                    if on_stack[child] {
                        return Err(CircuitError::Cycle { name: defs[child].name.clone() });
                    }
                    on_stack[child] = true;
                    stack.push((child, 0));
                }
                continue;
            }
            stack.pop();
            on_stack[d] = false;
            let id = match &defs[d].def {
                Def::Input(i) => push(&mut gates, Gate::Input(*i)),
                Def::Const(c) => push(&mut gates, Gate::Const(c.clone())),
                Def::Add(a) | Def::Mul(a) => {
                    let is_add = matches!(defs[d].def, Def::Add(_));
                    let ids: Vec<GateId> = a.iter().map(|s| id_of[by_name[s]].expect("child placed")).collect();
                    let mut acc = ids[0];
                    for &b in &ids[1..] {
                        acc = push(&mut gates, if is_add { Gate::Add(acc, b) } else { Gate::Mul(acc, b) });
                    }
                    acc
                }
            };
            id_of[d] = Some(id);
        }
    }
    Circuit::new(nvars, gates, id_of[out_idx].expect("all placed"))
}

fn push(gates: &mut Vec<Gate>, g: Gate) -> GateId {
    gates.push(g);
    gates.len() - 1
}

/// Prints in the format read by [`parse_circuit`], naming gate `i` as `g<i>`.
impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ninputs {}", self.nvars())?;
        for (i, g) in self.gates().iter().enumerate() {
            match g {
                Gate::Input(v) => writeln!(f, "g{i} = input {}", v + 1)?,
                Gate::Const(c) => writeln!(f, "g{i} = const {c}")?,
                Gate::Add(a, b) => writeln!(f, "g{i} = add g{a} g{b}")?,
                Gate::Mul(a, b) => writeln!(f, "g{i} = mul g{a} g{b}")?,
            }
        }
        writeln!(f, "output g{}", self.output())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{brute_expand, Monomial, DEFAULT_TERM_CAP};

    #[test]
    fn parses_product_of_two_inputs() {
        let c = parse_circuit("ninputs 2\ng1 = input 1\ng2 = input 2\ng3 = mul g1 g2\noutput g3\n").unwrap();
        assert_eq!(c.gates(), &[Gate::Input(0), Gate::Input(1), Gate::Mul(0, 1)]);
        assert_eq!(c.output(), 2);
    }

    #[test]
    fn names_undefined_gate() {
        let err = parse_circuit("ninputs 2\ng1 = input 1\ng2 = input 2\ng3 = mul g1 g9\noutput g3\n").unwrap_err();
        assert_eq!(err, CircuitError::Undefined { line: 4, name: "g9".into() });
        assert!(err.to_string().contains("g9"));
    }

    #[test]
    fn reports_structural_errors() {
        assert_eq!(
            parse_circuit("ninputs 1\na = add b b\nb = mul a a\noutput a\n").unwrap_err(),
            CircuitError::Cycle { name: "a".into() }
        );
        assert_eq!(parse_circuit("ninputs 1\na = input 1\n").unwrap_err(), CircuitError::MissingOutput);
        assert!(matches!(
            parse_circuit("ninputs 1\na = input 1\na = input 1\noutput a\n"),
            Err(CircuitError::Duplicate { line: 3, .. })
        ));
        assert!(matches!(parse_circuit("ninputs 1\na = inpt 1\noutput a\n"), Err(CircuitError::Syntax { line: 2, .. })));
        assert!(matches!(parse_circuit("ninputs 2\na = input 3\noutput a\n"), Err(CircuitError::BadVariable { .. })));
    }

    #[test]
    fn forward_references_and_wide_gates() {
        let text = "# comment\nninputs 3\nout = mul p x3 x1\np = add x1 x2 x3\nx1 = input 1\nx2 = input 2\nx3 = input 3\noutput out\n";
        let c = parse_circuit(text).unwrap();
        let p = brute_expand(&c, None, DEFAULT_TERM_CAP).unwrap();
        assert_eq!(p.coeff(&Monomial::from_vars(&[2, 2, 0])), 1.into());
        assert_eq!(p.coeff(&Monomial::from_vars(&[0, 0, 2])), 1.into());
        assert_eq!(p.len(), 3);
        let words = crate::circuit::expand_words(&c, None, DEFAULT_TERM_CAP).unwrap();
        assert_eq!(words.coeff(&[1, 2, 0]), 1.into());
        assert_eq!(words.coeff(&[0, 2, 1]), 0.into());
    }

    #[test]
    fn print_parse_round_trip() {
        for seed in 0..20 {
            let c = crate::gen::random_circuit(&mut crate::gen::rng(seed), 5, 20, 3);
            let once = parse_circuit(&c.to_string()).unwrap();
            assert_eq!(once, c);
            assert_eq!(parse_circuit(&once.to_string()).unwrap().gates(), once.gates());
        }
    }
}
