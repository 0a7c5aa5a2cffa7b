//! Header code for the universal interpreter.
//!
//! A table is serialized to a payload bitstring, every payload bit is
//! doubled (`0 → 00`, `1 → 11`) and the header ends with `01`. The pair
//! `10` never occurs in a header.
//!
//! Payload layout, with `n` states and `w = ⌈log₂ n⌉` bits per state id
//! (the start state is renumbered to 0, the rest keep table order):
//!
//! ```text
//! payload := 1^L 0 B(n-1)          where L = |B(n-1)|
//!            state_0 … state_{n-1}
//! state   := 0 action              same action on 0, 1 and _
//!          | 1 action action action
//! action  := 000                   halt
//!          | 001                   spin
//!          | 010 id id             read (on 0, on 1)
//!          | 011 b id              emit b
//!          | 1 b d id              write b, move d (0 = L, 1 = R)
//! ```

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_traits::ToPrimitive;

use super::table::{Action, Move, StateId, Table, TableConfig};
use crate::bits::{decode_n, encode_b_u64, BitString};

fn id_width(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

fn push_id(out: &mut BitString, id: u32, width: usize) {
    out.extend_from(&BitString::from_u64(id as u64, width));
}

/// Serializes a table (without its name or state names).
pub fn encode_payload(table: &Table) -> BitString {
    let n = table.state_count();
    let width = id_width(n);
    // start first, others in table order
    let start = table.start().index();
    let mut order: Vec<usize> = Vec::with_capacity(n);
    order.push(start);
    order.extend((0..n).filter(|&i| i != start));
    let mut renumber = alloc::vec![0u32; n];
    for (new, &old) in order.iter().enumerate() {
        renumber[old] = new as u32;
    }
    let id = |s: StateId| renumber[s.index()];

    let mut out = BitString::empty();
    let count = encode_b_u64((n - 1) as u64);
    out.extend_from(&BitString::ones(count.len()));
    out.push(false);
    out.extend_from(&count);

    let push_action = |out: &mut BitString, action: Action| match action {
        Action::Halt => out.extend_from(&BitString::from_u64(0b000, 3)),
        Action::Spin => out.extend_from(&BitString::from_u64(0b001, 3)),
        Action::Read { on_zero, on_one } => {
            out.extend_from(&BitString::from_u64(0b010, 3));
            push_id(out, id(on_zero), width);
            push_id(out, id(on_one), width);
        }
        Action::Emit { bit, next } => {
            out.extend_from(&BitString::from_u64(0b011, 3));
            out.push(bit);
            push_id(out, id(next), width);
        }
        Action::Write { bit, dir, next } => {
            out.push(true);
            out.push(bit);
            out.push(dir == Move::Right);
            push_id(out, id(next), width);
        }
    };
    for &old in &order {
        let row = table.row(StateId(old as u32));
        if row[0] == row[1] && row[1] == row[2] {
            out.push(false);
            push_action(&mut out, row[0]);
        } else {
            out.push(true);
            for &action in row {
                push_action(&mut out, action);
            }
        }
    }
    out
}

struct Reader<'a> {
    bits: &'a [bool],
    pos: usize,
}

impl Reader<'_> {
    fn bit(&mut self) -> Option<bool> {
        let b = *self.bits.get(self.pos)?;
        self.pos += 1;
        Some(b)
    }

    fn uint(&mut self, width: usize) -> Option<u64> {
        (0..width).try_fold(0u64, |acc, _| Some((acc << 1) | self.bit()? as u64))
    }
}

/// Inverse of [`encode_payload`]; `None` for anything malformed, including
/// trailing bits and out-of-range state ids.
pub fn decode_payload(payload: &BitString) -> Option<Table> {
    let mut r = Reader {
        bits: payload.bits(),
        pos: 0,
    };
    let mut len = 0usize;
    while r.bit()? {
        len += 1;
        if len > 32 {
            return None;
        }
    }
    let count: BitString = (0..len).map(|_| r.bit()).collect::<Option<_>>()?;
    let n = decode_n(&count).to_usize()?.checked_add(1)?;
    // bounds the allocation below
    if n > payload.len() {
        return None;
    }
    let width = id_width(n);
    let id = |r: &mut Reader<'_>| -> Option<StateId> {
        let v = r.uint(width)?;
        (v < n as u64).then_some(StateId(v as u32))
    };
    let action = |r: &mut Reader<'_>| -> Option<Action> {
        if r.bit()? {
            let bit = r.bit()?;
            let dir = if r.bit()? { Move::Right } else { Move::Left };
            return Some(Action::Write { bit, dir, next: id(r)? });
        }
        Some(match r.uint(2)? {
            0b00 => Action::Halt,
            0b01 => Action::Spin,
            0b10 => Action::Read {
                on_zero: id(r)?,
                on_one: id(r)?,
            },
            _ => Action::Emit {
                bit: r.bit()?,
                next: id(r)?,
            },
        })
    };
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        if r.bit()? {
            rows.push([action(&mut r)?, action(&mut r)?, action(&mut r)?]);
        } else {
            rows.push([action(&mut r)?; 3]);
        }
    }
    if r.pos != payload.len() {
        return None;
    }
    let names = (0..n).map(|i| format!("s{i}")).collect();
    Table::new("decoded", names, StateId(0), rows).ok()
}

/// The self-delimiting header for `table`: doubled payload then `01`.
pub fn header(table: &Table) -> BitString {
    let payload = encode_payload(table);
    let mut out = BitString::empty();
    for b in payload.iter() {
        out.push(b);
        out.push(b);
    }
    out.push(false);
    out.push(true);
    out
}

/// Progress of the interpreter: still reading the header, simulating the
/// decoded table, or dead after a malformed header.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum UniversalConfig {
    Header { payload: BitString, half: Option<bool> },
    Simulating { table: Arc<Table>, inner: TableConfig },
    Dead,
}

impl UniversalConfig {
    pub fn initial() -> Self {
        UniversalConfig::Header {
            payload: BitString::empty(),
            half: None,
        }
    }

    /// Consumes one header bit. Only valid in the `Header` phase.
    pub(crate) fn feed_header(&mut self, bit: bool) {
        let UniversalConfig::Header { payload, half } = self else {
            unreachable!("header bit fed outside the header phase")
        };
        let Some(first) = half.take() else {
            *half = Some(bit);
            return;
        };
        match (first, bit) {
            (false, false) => payload.push(false),
            (true, true) => payload.push(true),
            (false, true) => {
                *self = match decode_payload(payload) {
                    Some(table) => {
                        let inner = TableConfig::initial(&table);
                        UniversalConfig::Simulating {
                            table: Arc::new(table),
                            inner,
                        }
                    }
                    None => UniversalConfig::Dead,
                }
            }
            (true, false) => *self = UniversalConfig::Dead,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::builtin;

    #[test]
    fn m1_payload_length_by_hand() {
        // 5 states, ids on 3 bits
        // count: B(4) = "01", so "11" "0" "01"           5 bits
        // q0 read (1+3+3+3), done halt (1+3), q1 read (10),
        // e1 emit (1+3+1+3), loop spin (4)               36 bits
        let m1 = builtin("M1").unwrap();
        let table = m1.as_table().unwrap();
        assert_eq!(encode_payload(table).len(), 41);
        assert_eq!(header(table).len(), 2 * 41 + 2);
    }

    #[test]
    fn payload_decodes_to_equivalent_table() {
        for name in ["M1", "OMEGA_DEMO", "GEOM"] {
            let m = builtin(name).unwrap();
            let table = m.as_table().unwrap();
            let decoded = decode_payload(&encode_payload(table)).unwrap();
            assert_eq!(decoded.state_count(), table.state_count());
            // re-encoding is stable
            assert_eq!(encode_payload(&decoded), encode_payload(table));
        }
    }

    #[test]
    fn malformed_payloads_are_rejected() {
        let m1 = builtin("M1").unwrap();
        let payload = encode_payload(m1.as_table().unwrap());
        let mut longer = payload.clone();
        longer.push(false);
        assert!(decode_payload(&longer).is_none());
        assert!(decode_payload(&payload.prefix(payload.len() - 1)).is_none());
        assert!(decode_payload(&BitString::empty()).is_none());
        // 3 states (count "1 0 1"), state 0 reads into id 3: out of range
        let bad: BitString = "101 0010 11 00 0000 0000".replace(' ', "").parse().unwrap();
        assert!(decode_payload(&bad).is_none());
    }

    #[test]
    fn smallest_machine_header() {
        let table = Table::new("h", alloc::vec!["h".into()], StateId(0), alloc::vec![[Action::Halt; 3]]).unwrap();
        // count "0", state "0" + "000"
        assert_eq!(encode_payload(&table).to_string(), "00000");
        assert_eq!(header(&table).to_string(), "000000000001");
    }
}
