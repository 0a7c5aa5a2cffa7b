use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::{parse_machine, MachineError, PrefixMachine};

/// dom = {0, 10}; outputs λ and 1; Ω = 3/4.
pub const M1_DESCRIPTION: &str = "\
machine M1
start q0
q0 * => read done q1
q1 * => read e1 loop
e1 * => emit 1 done
done * => halt
loop * => spin
";

/// dom = {0, 100, 101, 110} with outputs 1, 11, 110, λ; Ω = 7/8.
pub const OMEGA_DEMO_DESCRIPTION: &str = "\
machine OMEGA_DEMO
start r
r * => read e1 r1
e1 * => emit 1 h
h * => halt
r1 * => read r10 r11
r10 * => read p100 p101
p100 * => emit 1 p100b
p100b * => emit 1 h
p101 * => emit 1 p101b
p101b * => emit 1 p101c
p101c * => emit 0 h
r11 * => read h stuck
stuck * => spin
";

/// dom = {1^n 0 : n ≥ 0}; on 1^n 0 outputs B(n).
///
/// The tape holds a binary counter with value n + 1. Cells 0 and 1 are a
/// `00` sentinel; digit i (least significant first) occupies cell 2 + 2i
/// (the bit) and 3 + 2i (a `1` marker). Between reads the head rests on
/// cell 1.
pub const GEOM_DESCRIPTION: &str = "\
machine GEOM
start init0
init0 * => write 0 R init1
init1 * => write 0 R init2
init2 * => write 1 R init3
init3 * => write 1 L ret_bit

# walk back to the sentinel, then ask for the next bit
ret_bit 0 => write 0 L ret_mark
ret_bit 1 => write 1 L ret_mark
ret_bit _ => spin
ret_mark 1 => write 1 L ret_bit
ret_mark 0 => read out inc
ret_mark _ => spin

# add one, carrying to the right
inc * => write 0 R inc_bit
inc_bit 0 => write 1 R ret_mark
inc_bit 1 => write 0 R inc_mark
inc_bit _ => write 1 R new_mark
inc_mark * => write 1 R inc_bit
new_mark * => write 1 L ret_bit

# print the counter below its leading 1, most significant digit first
out * => write 0 R seek_bit
seek_bit 0 => write 0 R seek_mark
seek_bit 1 => write 1 R seek_mark
seek_bit _ => write 0 L top_mark
seek_mark * => write 1 R seek_bit
top_mark * => write 1 L top_bit
top_bit * => write 1 L em_mark
em_mark 1 => write 1 L em_bit
em_mark 0 => halt
em_mark _ => spin
em_bit 0 => emit 0 em_move
em_bit 1 => emit 1 em_move
em_bit _ => spin
em_move 0 => write 0 L em_mark
em_move 1 => write 1 L em_mark
em_move _ => spin
";

pub const BUILTIN_NAMES: [&str; 3] = ["M1", "OMEGA_DEMO", "GEOM"];

/// A machine from the fixed catalog.
pub fn builtin(name: &str) -> Result<PrefixMachine, MachineError> {
    let text = match name {
        "M1" => M1_DESCRIPTION,
        "OMEGA_DEMO" => OMEGA_DEMO_DESCRIPTION,
        "GEOM" => GEOM_DESCRIPTION,
        other => return Err(MachineError::UnknownMachine(other.into())),
    };
    Ok(parse_machine(text).expect("built-in description is valid").into())
}

/// The built-ins plus machines registered at runtime.
#[derive(Debug, Clone, Default)]
pub struct Catalog {
    registered: BTreeMap<String, PrefixMachine>,
}

impl Catalog {
    pub fn new() -> Self {
        Catalog::default()
    }

    /// Registers under the machine's own name, replacing any earlier entry
    /// except a built-in, which cannot be shadowed.
    pub fn register(&mut self, machine: PrefixMachine) -> Result<(), MachineError> {
        let name = machine.name();
        if BUILTIN_NAMES.contains(&name.as_str()) {
            return Err(MachineError::Invalid(alloc::format!("{name} is a built-in name")));
        }
        self.registered.insert(name, machine);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<PrefixMachine, MachineError> {
        match self.registered.get(name) {
            Some(m) => Ok(m.clone()),
            None => builtin(name),
        }
    }

    pub fn names(&self) -> Vec<String> {
        BUILTIN_NAMES
            .iter()
            .map(|s| String::from(*s))
            .chain(self.registered.keys().cloned())
            .collect()
    }

    pub fn machines(&self) -> Vec<PrefixMachine> {
        self.names()
            .iter()
            .map(|n| self.get(n).expect("listed name resolves"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::{encode_b_u64, BitString};
    use crate::machine::{run, RunOutcome};

    #[test]
    fn unknown_name() {
        assert_eq!(builtin("nope"), Err(MachineError::UnknownMachine("nope".into())));
    }

    #[test]
    fn geom_counts_in_binary() {
        let geom = builtin("GEOM").unwrap();
        for n in 0..=40usize {
            let program = BitString::ones(n).with_bit(false);
            match run(&geom, &program, 100_000) {
                RunOutcome::Halted { output, .. } => {
                    assert_eq!(output, encode_b_u64(n as u64), "n = {n}")
                }
                other => panic!("n = {n}: {other:?}"),
            }
        }
    }

    #[test]
    fn omega_demo_outputs() {
        let m = builtin("OMEGA_DEMO").unwrap();
        for (p, out) in [("0", "1"), ("100", "11"), ("101", "110"), ("110", "")] {
            let p: BitString = p.parse().unwrap();
            assert_eq!(
                run(&m, &p, 100),
                RunOutcome::Halted {
                    output: out.parse().unwrap(),
                    consumed: p.clone()
                }
            );
        }
        assert!(matches!(
            run(&m, &"111".parse().unwrap(), 100),
            RunOutcome::OutOfBudget { .. }
        ));
    }

    #[test]
    fn catalog_registration() {
        let mut catalog = Catalog::new();
        let custom = crate::machine::parse_machine("machine X\nstart a\na * => halt\n").unwrap();
        catalog.register(custom.into()).unwrap();
        assert_eq!(catalog.names(), ["M1", "OMEGA_DEMO", "GEOM", "X"]);
        assert!(catalog.get("X").is_ok());
        let shadow = crate::machine::parse_machine("machine M1\nstart a\na * => halt\n").unwrap();
        assert!(catalog.register(shadow.into()).is_err());
    }
}
