use omegalab_core::machine::BUILTIN_NAMES;
use omegalab_core::scatter::{enumerate_scatter, level_counts};
use omegalab_core::{
    assign_all, build_machine, builtin, enumerate, kraft_sum, omega_bits, omega_lower_bound, pad_machine, run,
    simulator_prefix, uncertainty_table, universal_machine, BitString, Dyadic, PositionMap, RunOutcome, ScatterSpec,
};

fn bits(text: &str) -> BitString {
    text.parse().unwrap()
}

#[test]
fn halting_programs_rerun_to_their_outputs() {
    for name in BUILTIN_NAMES {
        let machine = builtin(name).unwrap();
        let cache = enumerate(&machine, 600);
        assert!(cache.is_prefix_free(), "{name}");
        for (program, output) in &cache.halted {
            match run(&machine, program, 600) {
                RunOutcome::Halted { output: o, .. } => assert_eq!(&o, output, "{name} {program}"),
                other => panic!("{name} {program}: {other:?}"),
            }
        }
    }
}

#[test]
fn omega_lengths_feed_the_kraft_allocator() {
    let cache = enumerate(&builtin("OMEGA_DEMO").unwrap(), 1000);
    let lengths: Vec<usize> = cache.halted.keys().map(BitString::len).collect();
    assert_eq!(kraft_sum(&lengths), omega_lower_bound(&cache));
    let code = assign_all(&lengths).unwrap();
    for (i, a) in code.iter().enumerate() {
        assert_eq!(a.len(), lengths[i]);
        for b in &code[i + 1..] {
            assert!(!a.is_prefix_of(b) && !b.is_prefix_of(a));
        }
    }
}

#[test]
fn padding_scales_omega() {
    let machine = builtin("M1").unwrap();
    let plain = omega_lower_bound(&enumerate(&machine, 1000));
    for k in 0..5 {
        let padded = omega_lower_bound(&enumerate(&pad_machine(&machine, k), 1000));
        assert_eq!(padded, plain.scale_pow2(-(k as i64)));
    }
}

#[test]
fn universal_machine_reproduces_m1() {
    let m1 = builtin("M1").unwrap();
    let header = simulator_prefix(&m1).unwrap();
    let u = universal_machine();
    for (program, output) in &enumerate(&m1, 100).halted {
        let full = header.concat(program);
        match run(&u, &full, 100_000) {
            RunOutcome::Halted { output: o, .. } => assert_eq!(&o, output),
            other => panic!("{program}: {other:?}"),
        }
    }
}

#[test]
fn m1_uncertainty_rows() {
    let cache = enumerate(&builtin("M1").unwrap(), 1000);
    let rows = uncertainty_table(&cache, &omega_bits(&cache, 2), 1..=2).unwrap();
    assert_eq!(rows[0].product.finite(), Some(&Dyadic::from_integer(2)));
    assert!(rows[1].product.is_infinite());
}

#[test]
fn scattered_machine_counts() {
    let spec = ScatterSpec::new(PositionMap::Double, bits("110"), 3).unwrap();
    let built = build_machine(&spec).unwrap();
    let cache = enumerate_scatter(&built, &spec);
    assert!(cache.exact);
    assert_eq!(level_counts(&cache, &spec), [2, 4, 8]);
    assert_eq!(omega_lower_bound(&cache), Dyadic::one() - Dyadic::pow2_neg(3));
}
