//! Line-oriented machine descriptions.
//!
//! ```text
//! machine M1
//! start q0
//! q0 * => read done q1     # '*' stands for all of 0, 1 and _
//! q1 * => read e1 loop
//! e1 * => emit 1 done
//! done * => halt
//! loop * => spin
//! ```
//!
//! A rule is `<state> <sym> => <action>` with `sym` one of `0`, `1`, `_`
//! or `*`, and the action one of `write <b> <L|R> <next>`,
//! `read <next-on-0> <next-on-1>`, `emit <b> <next>`, `halt`, `spin`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write as _;

use super::table::{Action, Move, StateId, Symbol, Table};
use super::MachineError;

#[derive(Clone, Copy)]
enum RawAction<'a> {
    Write(bool, Move, &'a str),
    Read(&'a str, &'a str),
    Emit(bool, &'a str),
    Halt,
    Spin,
}

impl<'a> RawAction<'a> {
    fn targets(self) -> impl Iterator<Item = &'a str> {
        let (a, b) = match self {
            RawAction::Write(_, _, n) | RawAction::Emit(_, n) => (Some(n), None),
            RawAction::Read(z, o) => (Some(z), Some(o)),
            RawAction::Halt | RawAction::Spin => (None, None),
        };
        a.into_iter().chain(b)
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> MachineError {
    MachineError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_bit(line: usize, token: &str) -> Result<bool, MachineError> {
    match token {
        "0" => Ok(false),
        "1" => Ok(true),
        other => Err(parse_err(line, format!("expected bit 0 or 1, found {other:?}"))),
    }
}

fn parse_action<'a>(line: usize, tokens: &[&'a str]) -> Result<RawAction<'a>, MachineError> {
    let arity = |n: usize| {
        if tokens.len() == n {
            Ok(())
        } else {
            Err(parse_err(line, format!("`{}` takes {} argument(s)", tokens[0], n - 1)))
        }
    };
    match tokens.first().copied() {
        Some("write") => {
            arity(4)?;
            let dir = match tokens[2] {
                "L" => Move::Left,
                "R" => Move::Right,
                other => return Err(parse_err(line, format!("expected L or R, found {other:?}"))),
            };
            Ok(RawAction::Write(parse_bit(line, tokens[1])?, dir, tokens[3]))
        }
        Some("read") => {
            arity(3)?;
            Ok(RawAction::Read(tokens[1], tokens[2]))
        }
        Some("emit") => {
            arity(3)?;
            Ok(RawAction::Emit(parse_bit(line, tokens[1])?, tokens[2]))
        }
        Some("halt") => {
            arity(1)?;
            Ok(RawAction::Halt)
        }
        Some("spin") => {
            arity(1)?;
            Ok(RawAction::Spin)
        }
        Some(other) => Err(parse_err(line, format!("unknown action {other:?}"))),
        None => Err(parse_err(line, "missing action after `=>`")),
    }
}

/// Parses and validates a machine description.
pub fn parse_machine(text: &str) -> Result<Table, MachineError> {
    let mut name: Option<&str> = None;
    let mut start: Option<(&str, usize)> = None;
    let mut order: Vec<&str> = Vec::new();
    let mut rules: BTreeMap<&str, [Option<(RawAction<'_>, usize)>; 3]> = BTreeMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        if tokens.get(2) == Some(&"=>") {
            let state = tokens[0];
            let symbols: &[Symbol] = match tokens[1] {
                "0" => &[Symbol::Zero],
                "1" => &[Symbol::One],
                "_" => &[Symbol::Blank],
                "*" => &Symbol::ALL,
                other => {
                    return Err(parse_err(
                        line,
                        format!("expected symbol 0, 1, _ or *, found {other:?}"),
                    ))
                }
            };
            let action = parse_action(line, &tokens[3..])?;
            let row = rules.entry(state).or_insert_with(|| {
                order.push(state);
                [None; 3]
            });
            for &sym in symbols {
                if row[sym.index()].is_some() {
                    return Err(MachineError::Nondeterministic {
                        state: state.to_string(),
                        symbol: sym,
                        line,
                    });
                }
                row[sym.index()] = Some((action, line));
            }
            continue;
        }
        match tokens[0] {
            "machine" | "start" if tokens.len() != 2 => {
                return Err(parse_err(line, format!("`{}` takes exactly one argument", tokens[0])))
            }
            "machine" if name.is_some() => return Err(parse_err(line, "duplicate `machine` line")),
            "machine" => name = Some(tokens[1]),
            "start" if start.is_some() => return Err(parse_err(line, "duplicate `start` line")),
            "start" => start = Some((tokens[1], line)),
            _ => {
                return Err(parse_err(
                    line,
                    "expected `machine`, `start` or `<state> <sym> => <action>`",
                ))
            }
        }
    }

    let (start, start_line) = start.ok_or(MachineError::NoStart)?;
    if !rules.contains_key(start) {
        return Err(MachineError::Dangling {
            state: start.to_string(),
            line: Some(start_line),
        });
    }
    let ids: BTreeMap<&str, StateId> = order.iter().enumerate().map(|(i, &s)| (s, StateId(i as u32))).collect();

    let mut actions = Vec::with_capacity(order.len());
    for &state in &order {
        let row = &rules[state];
        let mut resolved = [Action::Spin; 3];
        for sym in Symbol::ALL {
            let (raw, line) = row[sym.index()].ok_or_else(|| MachineError::Missing {
                state: state.to_string(),
                symbol: sym,
            })?;
            if let Some(target) = raw.targets().find(|t| !ids.contains_key(t)) {
                return Err(MachineError::Dangling {
                    state: target.to_string(),
                    line: Some(line),
                });
            }
            resolved[sym.index()] = match raw {
                RawAction::Write(bit, dir, next) => Action::Write {
                    bit,
                    dir,
                    next: ids[next],
                },
                RawAction::Read(z, o) => Action::Read {
                    on_zero: ids[z],
                    on_one: ids[o],
                },
                RawAction::Emit(bit, next) => Action::Emit { bit, next: ids[next] },
                RawAction::Halt => Action::Halt,
                RawAction::Spin => Action::Spin,
            };
        }
        actions.push(resolved);
    }
    let names = order.iter().map(|s| s.to_string()).collect();
    Table::new(name.unwrap_or("unnamed"), names, ids[start], actions)
}

impl Table {
    /// Renders the table in the description language; [`parse_machine`]
    /// reads it back to an equal table.
    pub fn to_description(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "machine {}", self.name());
        let _ = writeln!(out, "start {}", self.state_name(self.start()));
        for (id, row) in self.rows() {
            let state = self.state_name(id);
            if row[0] == row[1] && row[1] == row[2] {
                let _ = writeln!(out, "{state} * => {}", self.render_action(row[0]));
            } else {
                for sym in Symbol::ALL {
                    let _ = writeln!(out, "{state} {sym} => {}", self.render_action(row[sym.index()]));
                }
            }
        }
        out
    }

    fn render_action(&self, action: Action) -> String {
        let bit = |b: bool| if b { '1' } else { '0' };
        match action {
            Action::Write { bit: b, dir, next } => {
                let d = if dir == Move::Left { 'L' } else { 'R' };
                format!("write {} {d} {}", bit(b), self.state_name(next))
            }
            Action::Read { on_zero, on_one } => {
                format!("read {} {}", self.state_name(on_zero), self.state_name(on_one))
            }
            Action::Emit { bit: b, next } => format!("emit {} {}", bit(b), self.state_name(next)),
            Action::Halt => "halt".into(),
            Action::Spin => "spin".into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const M1: &str = "machine M1\nstart q0\nq0 * => read done q1\nq1 * => read e1 loop\ne1 * => emit 1 done\ndone * => halt\nloop * => spin\n";

    #[test]
    fn parses_m1() {
        let t = parse_machine(M1).unwrap();
        assert_eq!(t.name(), "M1");
        assert_eq!(t.state_count(), 5);
        assert_eq!(t.state_name(t.start()), "q0");
    }

    #[test]
    fn description_roundtrip() {
        let t = parse_machine(M1).unwrap();
        assert_eq!(parse_machine(&t.to_description()).unwrap(), t);
    }

    #[test]
    fn per_symbol_rules_and_comments() {
        let text = "# counter\nstart a\na 0 => write 1 R a\na 1 => write 0 L a # flip\na _ => halt\n";
        let t = parse_machine(text).unwrap();
        assert_eq!(t.name(), "unnamed");
        assert_eq!(t.action(t.start(), Symbol::Blank), Action::Halt);
        assert_eq!(parse_machine(&t.to_description()).unwrap(), t);
    }

    #[test]
    fn empty_document_has_no_start() {
        assert_eq!(parse_machine(""), Err(MachineError::NoStart));
        assert_eq!(parse_machine("# nothing\n\n"), Err(MachineError::NoStart));
    }

    #[test]
    fn duplicate_rule_is_nondeterministic() {
        let text = "start a\na * => halt\na 1 => spin\n";
        assert_eq!(
            parse_machine(text),
            Err(MachineError::Nondeterministic {
                state: "a".into(),
                symbol: Symbol::One,
                line: 3
            })
        );
    }

    #[test]
    fn dangling_and_missing() {
        assert_eq!(
            parse_machine("start a\na * => read b a\n"),
            Err(MachineError::Dangling {
                state: "b".into(),
                line: Some(2)
            })
        );
        assert_eq!(
            parse_machine("start z\na * => halt\n"),
            Err(MachineError::Dangling {
                state: "z".into(),
                line: Some(1)
            })
        );
        assert_eq!(
            parse_machine("start a\na 0 => halt\na 1 => halt\n"),
            Err(MachineError::Missing {
                state: "a".into(),
                symbol: Symbol::Blank
            })
        );
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let cases = [
            ("start a\na * => jump a\n", 2),
            ("start a\na 2 => halt\n", 2),
            ("start a\na * => write 1 U a\n", 2),
            ("start a\na * => emit 1\n", 2),
            ("start a b\n", 1),
            ("bogus\n", 1),
        ];
        for (text, expected) in cases {
            match parse_machine(text) {
                Err(MachineError::Parse { line, .. }) => assert_eq!(line, expected, "{text:?}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
    }
}
