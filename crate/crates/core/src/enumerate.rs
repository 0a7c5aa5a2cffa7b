//! Dovetailed enumeration of a machine's domain.
//!
//! The search walks the tree of input requests rather than all bitstrings:
//! a node is a suspended run waiting for its next input bit, and it has one
//! child per bit value. Nodes are expanded breadth-first by the number of
//! bits consumed, `0` before `1`, and every root-to-leaf path gets the same
//! step budget. Each domain element is therefore found exactly once and the
//! result depends only on the machine, the root and the limits.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;

use crate::bits::{decode_n, pow2, BitString};
use crate::machine::{Config, Poll, PrefixMachine};
use crate::numbers::Dyadic;

/// A quantity that may be infinite, such as the complexity of a string no
/// program produces.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Extended<T> {
    Finite(T),
    Infinite,
}

impl<T> Extended<T> {
    pub fn finite(&self) -> Option<&T> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::Infinite)
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Extended<U> {
        match self {
            Extended::Finite(v) => Extended::Finite(f(v)),
            Extended::Infinite => Extended::Infinite,
        }
    }
}

impl<T: fmt::Display> fmt::Display for Extended<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(v) => v.fmt(f),
            Extended::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationLimits {
    /// Steps available along every root-to-leaf path.
    pub budget: u64,
    /// Maximum number of tree nodes expanded; the rest stay on the frontier.
    pub max_nodes: usize,
}

impl EnumerationLimits {
    pub const DEFAULT_MAX_NODES: usize = 1 << 22;

    pub fn new(budget: u64) -> Self {
        EnumerationLimits {
            budget,
            max_nodes: Self::DEFAULT_MAX_NODES,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FrontierReason {
    OutOfBudget,
    NodeLimit,
}

/// A request-tree node left unresolved.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FrontierNode {
    pub consumed: BitString,
    pub reason: FrontierReason,
}

/// The enumerated part of a machine's domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerationCache {
    pub machine_name: String,
    pub machine_hash: String,
    pub budget: u64,
    /// Only programs extending this prefix were explored.
    pub root: BitString,
    /// Halting programs and their outputs.
    pub halted: BTreeMap<BitString, BitString>,
    pub frontier: Vec<FrontierNode>,
    /// Paths that reached a spin state.
    pub diverged: u64,
    /// No unexplored node remains, so `halted` is the whole domain under
    /// `root`.
    pub exact: bool,
}

#[derive(Debug, Clone)]
struct Node {
    config: Config,
    output: BitString,
    consumed: BitString,
    steps: u64,
}

/// Incremental breadth-first explorer behind [`enumerate`]. It can be
/// split into independent explorers whose caches merge into the same
/// result the unsplit explorer would produce (node limits apart).
#[derive(Debug, Clone)]
pub struct Explorer<'m> {
    machine: &'m PrefixMachine,
    root: BitString,
    limits: EnumerationLimits,
    queue: VecDeque<Node>,
    halted: BTreeMap<BitString, BitString>,
    frontier: Vec<FrontierNode>,
    diverged: u64,
    expanded: usize,
}

impl<'m> Explorer<'m> {
    pub fn new(machine: &'m PrefixMachine, root: BitString, limits: EnumerationLimits) -> Self {
        let node = Node {
            config: machine.initial_config(),
            output: BitString::empty(),
            consumed: BitString::empty(),
            steps: 0,
        };
        Explorer {
            machine,
            root,
            limits,
            queue: VecDeque::from([node]),
            halted: BTreeMap::new(),
            frontier: Vec::new(),
            diverged: 0,
            expanded: 0,
        }
    }

    pub fn pending(&self) -> usize {
        self.queue.len()
    }

    /// Runs the next queued node up to its next branch point. Returns false
    /// when nothing is queued.
    pub fn expand_next(&mut self) -> bool {
        let Some(mut node) = self.queue.pop_front() else {
            return false;
        };
        if self.expanded >= self.limits.max_nodes {
            self.frontier.push(FrontierNode {
                consumed: node.consumed,
                reason: FrontierReason::NodeLimit,
            });
            return true;
        }
        self.expanded += 1;
        loop {
            if node.steps >= self.limits.budget {
                self.frontier.push(FrontierNode {
                    consumed: node.consumed,
                    reason: FrontierReason::OutOfBudget,
                });
                return true;
            }
            match self.machine.poll(&mut node.config) {
                Poll::Moved => {}
                Poll::Emitted(bit) => node.output.push(bit),
                Poll::NeedsBit => {
                    if let Some(bit) = self.root.get(node.consumed.len()) {
                        // still inside the root prefix: no branching
                        self.machine.feed(&mut node.config, bit);
                        node.consumed.push(bit);
                    } else {
                        let mut one = node.clone();
                        self.machine.feed(&mut node.config, false);
                        node.consumed.push(false);
                        node.steps += 1;
                        self.machine.feed(&mut one.config, true);
                        one.consumed.push(true);
                        one.steps += 1;
                        self.queue.push_back(node);
                        self.queue.push_back(one);
                        return true;
                    }
                }
                Poll::Halts => {
                    // a halt inside the root prefix lies outside the subtree
                    if node.consumed.len() >= self.root.len() {
                        self.halted.insert(node.consumed, node.output);
                    }
                    return true;
                }
                Poll::Diverges => {
                    self.diverged += 1;
                    return true;
                }
            }
            node.steps += 1;
        }
    }

    /// Splits off the queued nodes into `parts` explorers (round-robin); the
    /// returned first element keeps everything found so far.
    pub fn split(mut self, parts: usize) -> Vec<Explorer<'m>> {
        let parts = parts.max(1);
        let queue = core::mem::take(&mut self.queue);
        let remaining = self.limits.max_nodes.saturating_sub(self.expanded);
        let share = EnumerationLimits {
            budget: self.limits.budget,
            max_nodes: remaining.div_ceil(parts),
        };
        let mut out: Vec<Explorer<'m>> = (0..parts)
            .map(|_| Explorer {
                machine: self.machine,
                root: self.root.clone(),
                limits: share,
                queue: VecDeque::new(),
                halted: BTreeMap::new(),
                frontier: Vec::new(),
                diverged: 0,
                expanded: 0,
            })
            .collect();
        for (i, node) in queue.into_iter().enumerate() {
            out[i % parts].queue.push_back(node);
        }
        out[0].halted = self.halted;
        out[0].frontier = self.frontier;
        out[0].diverged = self.diverged;
        out
    }

    pub fn finish(mut self) -> EnumerationCache {
        while self.expand_next() {}
        self.frontier.sort();
        EnumerationCache {
            machine_name: self.machine.name(),
            machine_hash: self.machine.fingerprint(),
            budget: self.limits.budget,
            root: self.root,
            exact: self.frontier.is_empty(),
            halted: self.halted,
            frontier: self.frontier,
            diverged: self.diverged,
        }
    }
}

/// Enumerates the whole domain of `machine` within `budget` steps per path.
pub fn enumerate(machine: &PrefixMachine, budget: u64) -> EnumerationCache {
    enumerate_with(machine, &BitString::empty(), EnumerationLimits::new(budget))
}

/// Enumerates the programs extending `root`.
pub fn enumerate_with(machine: &PrefixMachine, root: &BitString, limits: EnumerationLimits) -> EnumerationCache {
    Explorer::new(machine, root.clone(), limits).finish()
}

/// Everything `program` produces, keyed by output.
pub type RangeIndex<'a> = BTreeMap<&'a BitString, Vec<&'a BitString>>;

/// `H_C(x)`, `∇_C(x)` and `Δ_C(x) = 2^{H_C(x)}` for one string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexityRecord {
    pub x: BitString,
    pub h: Extended<usize>,
    pub nabla: Extended<BigUint>,
    pub delta: Extended<BigUint>,
    /// The cache was exact, so these are true values rather than upper
    /// bounds from the programs found so far.
    pub exact: bool,
}

impl EnumerationCache {
    /// Combines caches of disjoint parts of the same tree.
    pub fn merge(mut parts: Vec<EnumerationCache>) -> Option<EnumerationCache> {
        let mut acc = parts.pop()?;
        for part in parts {
            debug_assert_eq!(part.machine_hash, acc.machine_hash);
            acc.halted.extend(part.halted);
            acc.frontier.extend(part.frontier);
            acc.diverged += part.diverged;
        }
        acc.frontier.sort();
        acc.exact = acc.frontier.is_empty();
        Some(acc)
    }

    pub fn range_index(&self) -> RangeIndex<'_> {
        let mut index: RangeIndex<'_> = BTreeMap::new();
        for (program, output) in &self.halted {
            index.entry(output).or_default().push(program);
        }
        index
    }

    /// Whether the recorded programs form a prefix-free set.
    pub fn is_prefix_free(&self) -> bool {
        // in lexicographic order a prefix sorts immediately before some
        // extension of it, so adjacent pairs suffice
        let mut programs: Vec<&[bool]> = self.halted.keys().map(|p| p.bits()).collect();
        programs.sort_unstable();
        programs.windows(2).all(|w| !w[1].starts_with(w[0]))
    }
}

/// `Σ 2^{-|p|}` over the halting programs found; equals `Ω_C` when the
/// cache is exact.
pub fn omega_lower_bound(cache: &EnumerationCache) -> Dyadic {
    cache.halted.keys().map(|p| Dyadic::pow2_neg(p.len() as u64)).sum()
}

/// `P_C(x) = Σ_{C(y)=x} 2^{-|y|}` over the programs found.
pub fn prob_string(cache: &EnumerationCache, x: &BitString) -> Dyadic {
    cache
        .halted
        .iter()
        .filter(|(_, out)| *out == x)
        .map(|(p, _)| Dyadic::pow2_neg(p.len() as u64))
        .sum()
}

/// `Ω_C^s = Σ_{|x|=s} P_C(x)`.
pub fn omega_s(cache: &EnumerationCache, s: usize) -> Dyadic {
    cache
        .halted
        .iter()
        .filter(|(_, out)| out.len() == s)
        .map(|(p, _)| Dyadic::pow2_neg(p.len() as u64))
        .sum()
}

pub fn complexity(cache: &EnumerationCache, x: &BitString) -> ComplexityRecord {
    let witnesses = cache.halted.iter().filter(|(_, out)| *out == x).map(|(p, _)| p);
    complexity_from(x, witnesses, cache.exact)
}

/// [`complexity`] through a prebuilt index, for many lookups on one cache.
pub fn complexity_indexed(index: &RangeIndex<'_>, x: &BitString, exact: bool) -> ComplexityRecord {
    let witnesses = index.get(x).into_iter().flatten().copied();
    complexity_from(x, witnesses, exact)
}

fn complexity_from<'a>(x: &BitString, witnesses: impl Iterator<Item = &'a BitString>, exact: bool) -> ComplexityRecord {
    // the length-lexicographically least witness is both shortest and
    // has the least N
    match witnesses.min() {
        Some(w) => ComplexityRecord {
            x: x.clone(),
            h: Extended::Finite(w.len()),
            nabla: Extended::Finite(decode_n(w)),
            delta: Extended::Finite(pow2(w.len())),
            exact,
        },
        None => ComplexityRecord {
            x: x.clone(),
            h: Extended::Infinite,
            nabla: Extended::Infinite,
            delta: Extended::Infinite,
            exact,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{builtin, pad_machine, simulator_prefix, universal_machine};

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    #[test]
    fn m1_exact_cache() {
        let cache = enumerate(&builtin("M1").unwrap(), 100);
        assert!(cache.exact);
        let expected: BTreeMap<_, _> = [(bs("0"), bs("")), (bs("10"), bs("1"))].into_iter().collect();
        assert_eq!(cache.halted, expected);
        assert_eq!(cache.diverged, 1);
        assert_eq!(omega_lower_bound(&cache), d("3/4"));
    }

    #[test]
    fn omega_demo_exact_cache() {
        let cache = enumerate(&builtin("OMEGA_DEMO").unwrap(), 100);
        assert!(cache.exact);
        assert_eq!(cache.halted.len(), 4);
        assert_eq!(omega_lower_bound(&cache), d("7/8"));
        assert_eq!(omega_s(&cache, 2), d("1/8"));
        assert_eq!(omega_s(&cache, 1), d("1/2"));
    }

    #[test]
    fn probabilities_and_levels() {
        let cache = enumerate(&builtin("M1").unwrap(), 100);
        assert_eq!(prob_string(&cache, &bs("")), d("1/2"));
        assert_eq!(prob_string(&cache, &bs("1")), d("1/4"));
        assert_eq!(prob_string(&cache, &bs("0")), Dyadic::zero());
        assert_eq!(omega_s(&cache, 1), d("1/4"));
        assert_eq!(omega_s(&cache, 3), Dyadic::zero());
    }

    #[test]
    fn m1_complexities() {
        let cache = enumerate(&builtin("M1").unwrap(), 100);
        let lambda = complexity(&cache, &bs(""));
        assert_eq!(lambda.h, Extended::Finite(1));
        assert_eq!(lambda.nabla, Extended::Finite(BigUint::from(1u32)));
        assert_eq!(lambda.delta, Extended::Finite(BigUint::from(2u32)));
        let one = complexity(&cache, &bs("1"));
        assert_eq!(one.h, Extended::Finite(2));
        // N("10") = 110₂ - 1
        assert_eq!(one.nabla, Extended::Finite(BigUint::from(5u32)));
        assert_eq!(one.delta, Extended::Finite(BigUint::from(4u32)));
        assert!(one.exact);
        assert!(complexity(&cache, &bs("0")).h.is_infinite());
    }

    #[test]
    fn empty_cache_has_zero_omega() {
        let spin = crate::machine::parse_machine("start a\na * => spin\n").unwrap().into();
        let cache = enumerate(&spin, 10);
        assert!(cache.exact);
        assert!(cache.halted.is_empty());
        assert_eq!(omega_lower_bound(&cache), Dyadic::zero());
    }

    #[test]
    fn geom_is_never_exact_and_grows() {
        let geom = builtin("GEOM").unwrap();
        let mut previous = enumerate(&geom, 50);
        assert!(!previous.exact);
        for budget in [100, 400, 1600] {
            let cache = enumerate(&geom, budget);
            assert!(!cache.exact);
            assert!(previous.halted.iter().all(|(p, o)| cache.halted.get(p) == Some(o)));
            assert!(cache.halted.len() > previous.halted.len());
            assert!(omega_lower_bound(&cache) > omega_lower_bound(&previous));
            previous = cache;
        }
    }

    #[test]
    fn exact_caches_are_stable() {
        for name in ["M1", "OMEGA_DEMO"] {
            let m = builtin(name).unwrap();
            let small = enumerate(&m, 100);
            let large = enumerate(&m, 1000);
            assert_eq!(small.halted, large.halted);
            assert_eq!(small.diverged, large.diverged);
        }
    }

    #[test]
    fn padding_divides_omega() {
        let m = builtin("OMEGA_DEMO").unwrap();
        let base = omega_lower_bound(&enumerate(&m, 100));
        for k in 0..=8 {
            let padded = enumerate(&pad_machine(&m, k), 100);
            assert!(padded.exact);
            assert_eq!(omega_lower_bound(&padded), base.scale_pow2(-(k as i64)));
        }
    }

    #[test]
    fn subtree_under_simulator_prefix() {
        let m1 = builtin("M1").unwrap();
        let p = simulator_prefix(&m1).unwrap();
        let cache = enumerate_with(&universal_machine(), &p, EnumerationLimits::new(p.len() as u64 + 100));
        assert!(cache.exact);
        let expected: BTreeMap<_, _> = [(p.concat(&bs("0")), bs("")), (p.concat(&bs("10")), bs("1"))]
            .into_iter()
            .collect();
        assert_eq!(cache.halted, expected);
    }

    #[test]
    fn node_limit_leaves_frontier() {
        let geom = builtin("GEOM").unwrap();
        let cache = enumerate_with(
            &geom,
            &BitString::empty(),
            EnumerationLimits {
                budget: 10_000,
                max_nodes: 5,
            },
        );
        assert!(!cache.exact);
        assert!(cache.frontier.iter().any(|f| f.reason == FrontierReason::NodeLimit));
    }

    #[test]
    fn split_then_merge_matches_sequential() {
        let u = universal_machine();
        let limits = EnumerationLimits::new(18);
        let sequential = enumerate_with(&u, &BitString::empty(), limits);
        let mut explorer = Explorer::new(&u, BitString::empty(), limits);
        while explorer.pending() < 7 && explorer.expand_next() {}
        let parts: Vec<_> = explorer.split(3).into_iter().map(Explorer::finish).collect();
        let merged = EnumerationCache::merge(parts).unwrap();
        assert_eq!(merged, sequential);
        assert!(!sequential.halted.is_empty());
    }

    #[test]
    fn prefix_free_check() {
        let mut cache = enumerate(&builtin("OMEGA_DEMO").unwrap(), 100);
        assert!(cache.is_prefix_free());
        cache.halted.insert(bs("1"), bs(""));
        assert!(!cache.is_prefix_free());
    }
}
