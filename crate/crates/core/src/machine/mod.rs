//! Self-delimiting machines.
//!
//! A machine pulls input bits one at a time on request. A program is in the
//! domain exactly when the machine halts having requested all of its bits
//! and no more, so the domain is prefix-free by construction.

mod builtin;
mod parse;
mod table;
pub mod universal;

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use core::fmt;

use sha2::{Digest, Sha256};

use crate::bits::BitString;

pub use builtin::{builtin, Catalog, BUILTIN_NAMES, GEOM_DESCRIPTION, M1_DESCRIPTION, OMEGA_DEMO_DESCRIPTION};
pub use parse::parse_machine;
pub use table::{Action, Move, StateId, Symbol, Table, TableConfig, Tape};
pub use universal::UniversalConfig;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MachineError {
    Parse {
        line: usize,
        message: String,
    },
    NoStart,
    Nondeterministic {
        state: String,
        symbol: Symbol,
        line: usize,
    },
    Missing {
        state: String,
        symbol: Symbol,
    },
    Dangling {
        state: String,
        line: Option<usize>,
    },
    Invalid(String),
    UnknownMachine(String),
    /// Only transition tables have a simulator prefix.
    NotTabular(String),
}

impl fmt::Display for MachineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MachineError::Parse { line, message } => write!(f, "line {line}: {message}"),
            MachineError::NoStart => f.write_str("no start state"),
            MachineError::Nondeterministic { state, symbol, line } => {
                write!(f, "line {line}: second rule for ({state}, {symbol})")
            }
            MachineError::Missing { state, symbol } => write!(f, "no rule for ({state}, {symbol})"),
            MachineError::Dangling {
                state,
                line: Some(line),
            } => {
                write!(f, "line {line}: state {state} has no rules")
            }
            MachineError::Dangling { state, line: None } => write!(f, "state {state} has no rules"),
            MachineError::Invalid(msg) => f.write_str(msg),
            MachineError::UnknownMachine(name) => write!(f, "unknown machine {name:?}"),
            MachineError::NotTabular(name) => write!(f, "machine {name} is not a transition table"),
        }
    }
}

impl core::error::Error for MachineError {}

/// A self-delimiting machine: a transition table, the universal
/// interpreter, or a machine behind a run of mandatory leading zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PrefixMachine {
    Table(Arc<Table>),
    Universal,
    Padded { zeros: usize, inner: Box<PrefixMachine> },
}

/// Mid-run state of any [`PrefixMachine`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Config {
    Table(TableConfig),
    Universal(UniversalConfig),
    Padded {
        remaining: usize,
        dead: bool,
        inner: Box<Config>,
    },
}

/// What the machine does next from a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Poll {
    /// Performed one internal transition.
    Moved,
    /// Performed one transition that appended a bit to the output.
    Emitted(bool),
    /// The next transition is an input request; call [`PrefixMachine::feed`].
    NeedsBit,
    /// The next transition halts.
    Halts,
    /// The machine is in a spin state and will never do anything else.
    Diverges,
}

impl From<Table> for PrefixMachine {
    fn from(table: Table) -> Self {
        PrefixMachine::Table(Arc::new(table))
    }
}

impl PrefixMachine {
    pub fn name(&self) -> String {
        match self {
            PrefixMachine::Table(t) => t.name().into(),
            PrefixMachine::Universal => "U".into(),
            PrefixMachine::Padded { zeros, inner } => format!("{}_pad{zeros}", inner.name()),
        }
    }

    pub fn as_table(&self) -> Option<&Table> {
        match self {
            PrefixMachine::Table(t) => Some(t),
            _ => None,
        }
    }

    /// Stable content hash (hex SHA-256) of the machine's behaviour-defining
    /// data; state names and the machine name do not contribute.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        self.feed_fingerprint(&mut hasher);
        hasher.finalize().iter().fold(String::with_capacity(64), |mut s, b| {
            let _ = fmt::Write::write_fmt(&mut s, format_args!("{b:02x}"));
            s
        })
    }

    fn feed_fingerprint(&self, hasher: &mut Sha256) {
        match self {
            PrefixMachine::Table(t) => {
                hasher.update(b"table:");
                hasher.update(universal::encode_payload(t).to_ascii().as_bytes());
            }
            PrefixMachine::Universal => hasher.update(b"universal:v1"),
            PrefixMachine::Padded { zeros, inner } => {
                hasher.update(format!("pad:{zeros}:").as_bytes());
                inner.feed_fingerprint(hasher);
            }
        }
    }

    pub fn initial_config(&self) -> Config {
        match self {
            PrefixMachine::Table(t) => Config::Table(TableConfig::initial(t)),
            PrefixMachine::Universal => Config::Universal(UniversalConfig::initial()),
            PrefixMachine::Padded { zeros, inner } => Config::Padded {
                remaining: *zeros,
                dead: false,
                inner: Box::new(inner.initial_config()),
            },
        }
    }

    /// Executes the next transition unless it is an input request, a halt
    /// or a spin, which are reported without changing `config`.
    pub fn poll(&self, config: &mut Config) -> Poll {
        match (self, config) {
            (PrefixMachine::Table(t), Config::Table(c)) => poll_table(t, c),
            (PrefixMachine::Universal, Config::Universal(c)) => match c {
                UniversalConfig::Header { .. } => Poll::NeedsBit,
                UniversalConfig::Simulating { table, inner } => poll_table(table, inner),
                UniversalConfig::Dead => Poll::Diverges,
            },
            (
                PrefixMachine::Padded { inner, .. },
                Config::Padded {
                    remaining,
                    dead,
                    inner: ic,
                },
            ) => {
                if *dead {
                    Poll::Diverges
                } else if *remaining > 0 {
                    Poll::NeedsBit
                } else {
                    inner.poll(ic)
                }
            }
            _ => unreachable!("configuration does not belong to this machine"),
        }
    }

    /// Executes a pending input request with `bit`. Must follow a
    /// [`Poll::NeedsBit`].
    pub fn feed(&self, config: &mut Config, bit: bool) {
        match (self, config) {
            (PrefixMachine::Table(t), Config::Table(c)) => feed_table(t, c, bit),
            (PrefixMachine::Universal, Config::Universal(c)) => match c {
                UniversalConfig::Simulating { table, inner } => feed_table(table, inner, bit),
                other => other.feed_header(bit),
            },
            (
                PrefixMachine::Padded { inner, .. },
                Config::Padded {
                    remaining,
                    dead,
                    inner: ic,
                },
            ) => {
                if *remaining > 0 {
                    *remaining -= 1;
                    *dead = bit;
                } else {
                    inner.feed(ic, bit)
                }
            }
            _ => unreachable!("configuration does not belong to this machine"),
        }
    }
}

fn poll_table(table: &Table, c: &mut TableConfig) -> Poll {
    match c.current_action(table) {
        Action::Write { bit, dir, next } => {
            c.tape.write(c.head, Symbol::from_bit(bit));
            c.head += if dir == Move::Left { -1 } else { 1 };
            c.state = next;
            Poll::Moved
        }
        Action::Emit { bit, next } => {
            c.state = next;
            Poll::Emitted(bit)
        }
        Action::Read { .. } => Poll::NeedsBit,
        Action::Halt => Poll::Halts,
        Action::Spin => Poll::Diverges,
    }
}

fn feed_table(table: &Table, c: &mut TableConfig, bit: bool) {
    match c.current_action(table) {
        Action::Read { on_zero, on_one } => c.state = if bit { on_one } else { on_zero },
        other => unreachable!("fed a bit while the next action is {other:?}"),
    }
}

/// Result of running a machine on a fixed program.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RunOutcome {
    /// Halted after requesting exactly the whole program.
    Halted { output: BitString, consumed: BitString },
    /// Halted after requesting only a proper prefix of the program.
    HaltedEarly { consumed: BitString },
    /// Requested a bit beyond the end of the program.
    NeedsMoreInput { consumed: BitString },
    /// Used up the step budget (including spinning forever).
    OutOfBudget { steps: u64 },
}

/// Runs `machine` on `program` for at most `budget` steps. Every transition
/// (write, read, emit, halt) costs one step.
pub fn run(machine: &PrefixMachine, program: &BitString, budget: u64) -> RunOutcome {
    let mut config = machine.initial_config();
    let mut output = BitString::empty();
    let mut consumed = 0usize;
    let mut steps = 0u64;
    loop {
        if steps >= budget {
            return RunOutcome::OutOfBudget { steps };
        }
        match machine.poll(&mut config) {
            Poll::Moved => {}
            Poll::Emitted(bit) => output.push(bit),
            Poll::NeedsBit => match program.get(consumed) {
                Some(bit) => {
                    machine.feed(&mut config, bit);
                    consumed += 1;
                }
                None => {
                    return RunOutcome::NeedsMoreInput {
                        consumed: program.clone(),
                    }
                }
            },
            Poll::Halts => {
                return if consumed == program.len() {
                    RunOutcome::Halted {
                        output,
                        consumed: program.clone(),
                    }
                } else {
                    RunOutcome::HaltedEarly {
                        consumed: program.prefix(consumed),
                    }
                };
            }
            Poll::Diverges => return RunOutcome::OutOfBudget { steps: budget },
        }
        steps += 1;
    }
}

/// The universal interpreter: reads a header (see [`universal`]) and then
/// simulates the encoded table on the rest of its input.
pub fn universal_machine() -> PrefixMachine {
    PrefixMachine::Universal
}

/// The header `p` with `U(p x) = C(x)` for every `x`.
pub fn simulator_prefix(machine: &PrefixMachine) -> Result<BitString, MachineError> {
    match machine {
        PrefixMachine::Table(t) => Ok(universal::header(t)),
        other => Err(MachineError::NotTabular(other.name())),
    }
}

/// `M'(0^k x) = M(x)`; any input not starting with `k` zeros spins.
pub fn pad_machine(machine: &PrefixMachine, k: usize) -> PrefixMachine {
    match machine {
        PrefixMachine::Table(t) => t.padded(k).into(),
        _ if k == 0 => machine.clone(),
        PrefixMachine::Padded { zeros, inner } => PrefixMachine::Padded {
            zeros: zeros + k,
            inner: inner.clone(),
        },
        other => PrefixMachine::Padded {
            zeros: k,
            inner: Box::new(other.clone()),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn m1() -> PrefixMachine {
        builtin("M1").unwrap()
    }

    #[test]
    fn m1_runs() {
        assert_eq!(
            run(&m1(), &bs("0"), 100),
            RunOutcome::Halted {
                output: BitString::empty(),
                consumed: bs("0")
            }
        );
        assert_eq!(
            run(&m1(), &bs("10"), 100),
            RunOutcome::Halted {
                output: bs("1"),
                consumed: bs("10")
            }
        );
        assert_eq!(
            run(&m1(), &bs("00"), 100),
            RunOutcome::HaltedEarly { consumed: bs("0") }
        );
        assert_eq!(
            run(&m1(), &bs("1"), 100),
            RunOutcome::NeedsMoreInput { consumed: bs("1") }
        );
        assert_eq!(run(&m1(), &bs("11"), 100), RunOutcome::OutOfBudget { steps: 100 });
    }

    #[test]
    fn step_budget_is_exact() {
        // "10": read, read, emit, halt
        assert_eq!(run(&m1(), &bs("10"), 3), RunOutcome::OutOfBudget { steps: 3 });
        assert!(matches!(run(&m1(), &bs("10"), 4), RunOutcome::Halted { .. }));
        assert_eq!(run(&m1(), &bs("0"), 1), RunOutcome::OutOfBudget { steps: 1 });
    }

    #[test]
    fn padding_table_machine() {
        let p2 = pad_machine(&m1(), 2);
        assert_eq!(
            run(&p2, &bs("000"), 100),
            RunOutcome::Halted {
                output: BitString::empty(),
                consumed: bs("000")
            }
        );
        assert_eq!(
            run(&p2, &bs("0010"), 100),
            RunOutcome::Halted {
                output: bs("1"),
                consumed: bs("0010")
            }
        );
        assert_eq!(run(&p2, &bs("010"), 100), RunOutcome::OutOfBudget { steps: 100 });
        assert_eq!(pad_machine(&m1(), 0), m1());
    }

    #[test]
    fn universal_simulates_m1() {
        let u = universal_machine();
        let p = simulator_prefix(&m1()).unwrap();
        assert_eq!(
            run(&u, &p.concat(&bs("0")), 1000),
            RunOutcome::Halted {
                output: BitString::empty(),
                consumed: p.concat(&bs("0"))
            }
        );
        assert_eq!(
            run(&u, &p.concat(&bs("10")), 1000),
            RunOutcome::Halted {
                output: bs("1"),
                consumed: p.concat(&bs("10"))
            }
        );
        // the header costs one step per bit
        let needed = p.len() as u64 + 4;
        assert!(matches!(
            run(&u, &p.concat(&bs("10")), needed),
            RunOutcome::Halted { .. }
        ));
        assert!(matches!(
            run(&u, &p.concat(&bs("10")), needed - 1),
            RunOutcome::OutOfBudget { .. }
        ));
    }

    #[test]
    fn universal_spins_on_malformed_header() {
        let u = universal_machine();
        assert_eq!(run(&u, &bs("10"), 50), RunOutcome::OutOfBudget { steps: 50 });
        // "01" ends an empty payload, which does not decode
        assert_eq!(run(&u, &bs("01"), 50), RunOutcome::OutOfBudget { steps: 50 });
        assert_eq!(simulator_prefix(&u), Err(MachineError::NotTabular("U".into())));
    }

    #[test]
    fn padded_universal() {
        let u0 = pad_machine(&universal_machine(), 3);
        let p = simulator_prefix(&m1()).unwrap();
        let prog = BitString::zeros(3).concat(&p).concat(&bs("10"));
        assert!(matches!(run(&u0, &prog, 1000), RunOutcome::Halted { ref output, .. } if *output == bs("1")));
        assert_eq!(pad_machine(&u0, 2), pad_machine(&universal_machine(), 5));
        assert_eq!(u0.name(), "U_pad3");
    }

    #[test]
    fn fingerprint_ignores_names() {
        let a = m1();
        let renamed: PrefixMachine = a.as_table().unwrap().clone().renamed("other").into();
        assert_eq!(a.fingerprint(), renamed.fingerprint());
        assert_ne!(a.fingerprint(), builtin("OMEGA_DEMO").unwrap().fingerprint());
        assert_ne!(
            universal_machine().fingerprint(),
            pad_machine(&universal_machine(), 1).fingerprint()
        );
        assert_eq!(a.fingerprint().len(), 64);
    }
}
