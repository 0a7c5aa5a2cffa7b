//! Exact, desk-scale algorithmic information theory: self-delimiting
//! machines, halting probabilities, program-size complexity, the
//! Kraft-Chaitin code, and uncertainty products over them.
//!
//! Everything here is pure computation over owned values; the crate is
//! `no_std` and needs only `alloc`.

#![cfg_attr(not(test), no_std)]
extern crate alloc;

pub mod bits;
pub mod enumerate;
pub mod kraft;
pub mod lab;
pub mod machine;
pub mod numbers;
pub mod scatter;

pub use bits::{decode_n, encode_b, BitString};
pub use enumerate::{
    complexity, enumerate, enumerate_with, omega_lower_bound, omega_s, prob_string, ComplexityRecord, EnumerationCache,
    EnumerationLimits, Extended,
};
pub use kraft::{assign_all, kraft_sum, CodeAllocator, KraftError};
pub use lab::{
    delta_s, energy_expectation, epsilon_estimate, growth_check, observable_pair, omega_bits, stable_omega_bits,
    uncertainty_product, uncertainty_table, EnergyExpectation, EpsilonEstimate, GrowthTable, LabError, ObservablePair,
    OmegaBits, Provenance, UncertaintyReport,
};
pub use machine::{
    builtin, pad_machine, parse_machine, run, simulator_prefix, universal_machine, MachineError, PrefixMachine,
    RunOutcome,
};
pub use numbers::{dyadic_sum, rational_div, Dyadic, Rational};
pub use scatter::{
    build_machine, contradiction_report, length_schedule, verify_bound, ContradictionReport, PositionMap, ScatterError,
    ScatterMachine, ScatterSpec,
};
