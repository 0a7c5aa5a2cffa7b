//! Machines that compress sequences whose bits at positions `F(1), F(2), …`
//! are known in advance.
//!
//! Level `k` covers the `2^{F(k)-k}` strings `w` made of the free bits of
//! an `F(k)`-bit prefix. Each gets a Kraft-Chaitin codeword `z_w` of length
//! `F(k)` (the lengths of the level schedule), and the machine maps `z_w`
//! to `w₁ x_F(1) w₂ x_F(2) … w_k x_F(k)`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write as _;

use num_bigint::BigUint;

use crate::bits::{pow2, BitString};
use crate::enumerate::{complexity_indexed, enumerate, EnumerationCache, Extended};
use crate::kraft::{CodeAllocator, KraftError};
use crate::machine::{parse_machine, MachineError, PrefixMachine};
use crate::numbers::Dyadic;

pub const DEFAULT_CEILING: usize = 24;

/// The position map `F`, with `F(0) = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PositionMap {
    /// `F(k) = k`.
    Identity,
    /// `F(k) = 2k`.
    Double,
    /// `F(k) = k²`.
    Square,
    /// `F(1), F(2), …` listed explicitly.
    Table(Vec<usize>),
}

impl PositionMap {
    pub fn catalog_name(&self) -> Option<&'static str> {
        match self {
            PositionMap::Identity => Some("identity"),
            PositionMap::Double => Some("double"),
            PositionMap::Square => Some("square"),
            PositionMap::Table(_) => None,
        }
    }

    pub fn from_catalog(name: &str) -> Option<Self> {
        match name {
            "identity" | "k" => Some(PositionMap::Identity),
            "double" | "2k" => Some(PositionMap::Double),
            "square" | "k^2" => Some(PositionMap::Square),
            _ => None,
        }
    }

    /// `F(k)`, or `None` past the end of a table.
    pub fn at(&self, k: usize) -> Option<usize> {
        if k == 0 {
            return Some(0);
        }
        match self {
            PositionMap::Identity => Some(k),
            PositionMap::Double => k.checked_mul(2),
            PositionMap::Square => k.checked_mul(k),
            PositionMap::Table(values) => values.get(k - 1).copied(),
        }
    }

    pub fn label(&self) -> String {
        match self.catalog_name() {
            Some(name) => name.into(),
            None => "table".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScatterError {
    ZeroHorizon,
    /// The table stops before `k_max`.
    Undefined {
        k: usize,
    },
    NotIncreasing {
        k: usize,
    },
    BitCount {
        expected: usize,
        found: usize,
    },
    /// `F(k) - k` is above the ceiling.
    Ceiling {
        k: usize,
        free_bits: usize,
        ceiling: usize,
    },
    SequenceLength {
        expected: usize,
        found: usize,
    },
    /// `x` has the wrong bit at a fixed position (1-based).
    Inconsistent {
        position: usize,
    },
    Kraft(KraftError),
    Machine(MachineError),
}

impl fmt::Display for ScatterError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScatterError::ZeroHorizon => f.write_str("k_max must be at least 1"),
            ScatterError::Undefined { k } => write!(f, "F({k}) is not defined"),
            ScatterError::NotIncreasing { k } => {
                write!(f, "F is not strictly increasing at k = {k}")
            }
            ScatterError::BitCount { expected, found } => {
                write!(f, "expected {expected} fixed bits, found {found}")
            }
            ScatterError::Ceiling { k, free_bits, ceiling } => {
                write!(f, "level {k} has {free_bits} free bits, above the ceiling {ceiling}")
            }
            ScatterError::SequenceLength { expected, found } => {
                write!(f, "sequence must have {expected} bits, found {found}")
            }
            ScatterError::Inconsistent { position } => {
                write!(f, "sequence contradicts the fixed bit at position {position}")
            }
            ScatterError::Kraft(e) => write!(f, "{e}"),
            ScatterError::Machine(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for ScatterError {}

impl From<KraftError> for ScatterError {
    fn from(e: KraftError) -> Self {
        ScatterError::Kraft(e)
    }
}

impl From<MachineError> for ScatterError {
    fn from(e: MachineError) -> Self {
        ScatterError::Machine(e)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScatterSpec {
    f: PositionMap,
    /// `fixed[i - 1] = x_F(i)`.
    fixed: BitString,
    k_max: usize,
    ceiling: usize,
}

impl ScatterSpec {
    pub fn new(f: PositionMap, fixed: BitString, k_max: usize) -> Result<Self, ScatterError> {
        ScatterSpec::with_ceiling(f, fixed, k_max, DEFAULT_CEILING)
    }

    pub fn with_ceiling(f: PositionMap, fixed: BitString, k_max: usize, ceiling: usize) -> Result<Self, ScatterError> {
        if k_max == 0 {
            return Err(ScatterError::ZeroHorizon);
        }
        if fixed.len() != k_max {
            return Err(ScatterError::BitCount {
                expected: k_max,
                found: fixed.len(),
            });
        }
        let mut previous = 0;
        for k in 1..=k_max {
            let value = f.at(k).ok_or(ScatterError::Undefined { k })?;
            if value <= previous {
                return Err(ScatterError::NotIncreasing { k });
            }
            if value - k > ceiling {
                return Err(ScatterError::Ceiling {
                    k,
                    free_bits: value - k,
                    ceiling,
                });
            }
            previous = value;
        }
        Ok(ScatterSpec {
            f,
            fixed,
            k_max,
            ceiling,
        })
    }

    pub fn position_map(&self) -> &PositionMap {
        &self.f
    }

    pub fn fixed_bits(&self) -> &BitString {
        &self.fixed
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn ceiling(&self) -> usize {
        self.ceiling
    }

    /// `F(k)` for `k ≤ k_max`.
    pub fn f(&self, k: usize) -> usize {
        assert!(k <= self.k_max, "level {k} is past the horizon");
        self.f.at(k).expect("validated")
    }

    /// Number of free bits below `F(k)`, i.e. `|w|` at level `k`.
    pub fn free_bits(&self, k: usize) -> usize {
        self.f(k) - k
    }

    /// `2^{F(k)-k+1} - 1`.
    pub fn bound(&self, k: usize) -> BigUint {
        pow2(self.free_bits(k) + 1) - 1u32
    }

    pub fn name(&self) -> String {
        format!("SCATTER_{}_k{}", self.f.label(), self.k_max)
    }

    /// Longest program the machine runs on, in steps: every codeword bit is
    /// read, every output bit emitted, then one halt.
    pub fn enumeration_budget(&self) -> u64 {
        2 * self.f(self.k_max) as u64 + 1
    }

    /// Splits `w` into its blocks `w₁, …, w_k`, where `|w_j| = F(j) - F(j-1) - 1`.
    pub fn split(&self, w: &BitString, k: usize) -> Vec<BitString> {
        assert_eq!(w.len(), self.free_bits(k));
        let mut start = 0;
        (1..=k)
            .map(|j| {
                let len = self.f(j) - self.f(j - 1) - 1;
                let block = BitString::from(&w.bits()[start..start + len]);
                start += len;
                block
            })
            .collect()
    }

    pub fn join(blocks: &[BitString]) -> BitString {
        blocks.iter().fold(BitString::empty(), |acc, b| acc.concat(b))
    }

    /// `w₁ x_F(1) w₂ x_F(2) … w_k x_F(k)`.
    pub fn interleave(&self, w: &BitString, k: usize) -> BitString {
        let mut out = BitString::empty();
        for (j, block) in self.split(w, k).iter().enumerate() {
            out.extend_from(block);
            out.push(self.fixed.get(j).expect("bit per level"));
        }
        out
    }

    /// Drops the fixed positions from an `F(k)`-bit prefix.
    pub fn free_part(&self, x: &BitString, k: usize) -> BitString {
        let fixed: BTreeSet<usize> = (1..=k).map(|j| self.f(j)).collect();
        BitString::from_bits(
            x.iter()
                .take(self.f(k))
                .enumerate()
                .filter(|(i, _)| !fixed.contains(&(i + 1)))
                .map(|(_, b)| b)
                .collect(),
        )
    }

    /// An `F(k_max)`-bit sequence with the fixed bits in place and `fill`
    /// supplying the free positions in order.
    pub fn fill(&self, fill: &BitString) -> Result<BitString, ScatterError> {
        let free = self.free_bits(self.k_max);
        if fill.len() != free {
            return Err(ScatterError::SequenceLength {
                expected: free,
                found: fill.len(),
            });
        }
        Ok(self.interleave(fill, self.k_max))
    }

    pub fn check_sequence(&self, x: &BitString) -> Result<(), ScatterError> {
        let expected = self.f(self.k_max);
        if x.len() != expected {
            return Err(ScatterError::SequenceLength {
                expected,
                found: x.len(),
            });
        }
        for k in 1..=self.k_max {
            let position = self.f(k);
            if x.get(position - 1) != self.fixed.get(k - 1) {
                return Err(ScatterError::Inconsistent { position });
            }
        }
        Ok(())
    }
}

/// `2^{F(k)-k}` copies of `F(k)` for each level in turn.
pub fn length_schedule(spec: &ScatterSpec) -> Vec<usize> {
    (1..=spec.k_max())
        .flat_map(|k| core::iter::repeat_n(spec.f(k), 1usize << spec.free_bits(k)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codeword {
    pub level: usize,
    pub w: BitString,
    pub program: BitString,
    pub output: BitString,
}

#[derive(Debug, Clone)]
pub struct ScatterMachine {
    pub machine: PrefixMachine,
    pub description: String,
    pub codewords: Vec<Codeword>,
}

/// Allocates codewords level by level, `w` in lexicographic order, and
/// compiles the resulting read tree to a machine description.
pub fn build_machine(spec: &ScatterSpec) -> Result<ScatterMachine, ScatterError> {
    let mut allocator = CodeAllocator::new();
    let mut codewords = Vec::new();
    for k in 1..=spec.k_max() {
        for w in BitString::all_of_length(spec.free_bits(k)) {
            let program = allocator.assign_next(spec.f(k))?;
            let output = spec.interleave(&w, k);
            codewords.push(Codeword {
                level: k,
                w,
                program,
                output,
            });
        }
    }
    let description = describe(&spec.name(), &codewords);
    let machine = parse_machine(&description)?.into();
    Ok(ScatterMachine {
        machine,
        description,
        codewords,
    })
}

fn describe(name: &str, codewords: &[Codeword]) -> String {
    let inner: BTreeSet<BitString> = codewords
        .iter()
        .flat_map(|c| (0..c.program.len()).map(move |i| c.program.prefix(i)))
        .collect();
    let leaves: alloc::collections::BTreeMap<&BitString, &BitString> =
        codewords.iter().map(|c| (&c.program, &c.output)).collect();
    let node = |p: &BitString| -> String {
        if inner.contains(p) {
            format!("r{p}")
        } else if leaves.contains_key(p) {
            format!("e{p}_0")
        } else {
            "dead".into()
        }
    };
    let mut text = format!("machine {name}\nstart r\n");
    let mut dead = false;
    for p in &inner {
        let (zero, one) = (node(&p.with_bit(false)), node(&p.with_bit(true)));
        dead |= zero == "dead" || one == "dead";
        let _ = writeln!(text, "r{p} * => read {zero} {one}");
    }
    for (program, output) in &leaves {
        for (i, bit) in output.iter().enumerate() {
            let next = if i + 1 == output.len() {
                "h".into()
            } else {
                format!("e{program}_{}", i + 1)
            };
            let _ = writeln!(text, "e{program}_{i} * => emit {} {next}", u8::from(bit));
        }
    }
    text.push_str("h * => halt\n");
    if dead {
        text.push_str("dead * => spin\n");
    }
    text
}

pub fn enumerate_scatter(built: &ScatterMachine, spec: &ScatterSpec) -> EnumerationCache {
    enumerate(&built.machine, spec.enumeration_budget())
}

/// Halting programs of length `F(k)` for each level.
pub fn level_counts(cache: &EnumerationCache, spec: &ScatterSpec) -> Vec<usize> {
    (1..=spec.k_max())
        .map(|k| cache.halted.keys().filter(|p| p.len() == spec.f(k)).count())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundRow {
    pub k: usize,
    pub f_k: usize,
    pub prefix: BitString,
    pub h: Extended<usize>,
    pub nabla: Extended<BigUint>,
    pub delta_c: Extended<BigUint>,
    /// `2^{F(k)-k+1} - 1`.
    pub bound: BigUint,
    /// `∇_C(x₁…x_F(k)) ≤ bound`.
    pub pass: bool,
}

/// Checks `∇_C(x₁…x_F(k))` against `2^{F(k)-k+1} - 1` for every level.
pub fn verify_bound(
    cache: &EnumerationCache,
    spec: &ScatterSpec,
    x: &BitString,
) -> Result<Vec<BoundRow>, ScatterError> {
    spec.check_sequence(x)?;
    let index = cache.range_index();
    Ok((1..=spec.k_max())
        .map(|k| {
            let prefix = x.prefix(spec.f(k));
            let record = complexity_indexed(&index, &prefix, cache.exact);
            let bound = spec.bound(k);
            BoundRow {
                k,
                f_k: spec.f(k),
                pass: record.nabla.finite().is_some_and(|n| *n <= bound),
                prefix,
                h: record.h,
                nabla: record.nabla,
                delta_c: record.delta,
                bound,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContradictionRow {
    pub k: usize,
    pub f_k: usize,
    /// `ε₁ · 2^{F(k)}`.
    pub lower: Dyadic,
    /// `2^{|p_C|} · (2^{F(k)-k+1} - 1)`.
    pub upper: BigUint,
    /// `2^{|p_C|} · Δ_C(x₁…x_F(k))` where the level was enumerated.
    pub measured_upper: Option<Extended<BigUint>>,
}

impl ContradictionRow {
    pub fn crosses(&self) -> bool {
        self.lower > Dyadic::from_integer(self.upper.clone())
    }

    pub fn measured_crosses(&self) -> bool {
        match &self.measured_upper {
            Some(Extended::Finite(u)) => self.lower > Dyadic::from_integer(u.clone()),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContradictionReport {
    pub epsilon_line: Dyadic,
    pub lift_bits: usize,
    pub rows: Vec<ContradictionRow>,
    /// First `k` with `lower > upper`.
    pub crossing: Option<usize>,
    /// First `k` with `lower > measured_upper`.
    pub measured_crossing: Option<usize>,
    /// `ε₁ = 0`: the lower side is identically zero.
    pub vacuous: bool,
}

/// Compares the randomness lower bound with the construction's upper bound
/// for `k = 1..=horizon`.
///
/// Beyond the verified levels the upper bound is the closed form alone,
/// which needs only `F`; a table `F` stops where it ends.
pub fn contradiction_report(
    spec: &ScatterSpec,
    table: &[BoundRow],
    epsilon_line: &Dyadic,
    lift_bits: usize,
    horizon: usize,
) -> ContradictionReport {
    let lift = pow2(lift_bits);
    let mut rows = Vec::new();
    for k in 1..=horizon.max(spec.k_max()) {
        let Some(f_k) = spec.position_map().at(k) else {
            break;
        };
        let bound = pow2(f_k - k + 1) - 1u32;
        rows.push(ContradictionRow {
            k,
            f_k,
            lower: epsilon_line.scale_pow2(f_k as i64),
            upper: &lift * bound,
            measured_upper: table
                .iter()
                .find(|r| r.k == k)
                .map(|r| r.delta_c.clone().map(|d| &lift * d)),
        });
    }
    ContradictionReport {
        epsilon_line: epsilon_line.clone(),
        lift_bits,
        crossing: rows.iter().find(|r| r.crosses()).map(|r| r.k),
        measured_crossing: rows.iter().find(|r| r.measured_crosses()).map(|r| r.k),
        vacuous: epsilon_line.is_zero(),
        rows,
    }
}
