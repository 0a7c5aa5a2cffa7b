use std::thread;

use omegalab_core::enumerate::{EnumerationCache, EnumerationLimits, Explorer};
use omegalab_core::{BitString, PrefixMachine};

/// Breadth-first enumeration fanned out over `threads` workers.
///
/// The tree is expanded on one thread until the queue is wide enough, then
/// the queue is dealt out round-robin. Without a node limit the merged
/// cache equals the sequential one. With a limit each worker gets an equal
/// share of the remaining nodes, so which nodes end on the frontier can
/// differ from a sequential run.
pub fn enumerate_parallel(
    machine: &PrefixMachine,
    root: &BitString,
    limits: EnumerationLimits,
    threads: usize,
) -> EnumerationCache {
    let mut explorer = Explorer::new(machine, root.clone(), limits);
    if threads <= 1 {
        return explorer.finish();
    }
    let wide_enough = threads * 8;
    while explorer.pending() > 0 && explorer.pending() < wide_enough {
        explorer.expand_next();
    }
    let parts = explorer.split(threads);
    let caches: Vec<EnumerationCache> = thread::scope(|scope| {
        let handles: Vec<_> = parts
            .into_iter()
            .map(|part| scope.spawn(move || part.finish()))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("enumeration worker panicked"))
            .collect()
    });
    EnumerationCache::merge(caches).expect("at least one part")
}

#[cfg(test)]
mod tests {
    use super::*;
    use omegalab_core::enumerate::enumerate_with;
    use omegalab_core::machine::builtin;
    use omegalab_core::universal_machine;

    #[test]
    fn matches_sequential() {
        for (m, budget) in [
            (builtin("GEOM").unwrap(), 400),
            (builtin("OMEGA_DEMO").unwrap(), 50),
            (universal_machine(), 20),
        ] {
            let limits = EnumerationLimits::new(budget);
            let sequential = enumerate_with(&m, &BitString::empty(), limits);
            for threads in [2, 3, 8] {
                assert_eq!(enumerate_parallel(&m, &BitString::empty(), limits, threads), sequential);
            }
        }
    }
}
