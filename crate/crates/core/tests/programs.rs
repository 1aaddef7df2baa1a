mod common;

use chp_core::program::{parse, Instruction, GHZ, TELEPORTATION};
use chp_core::run::{run_seeded, Engine, RunOptions};
use chp_core::synth::{canonical_synthesize, circuits_equivalent, tableau_of};
use chp_core::{CircuitProgram, Error};
use common::random_gates;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn opts() -> RunOptions {
    RunOptions::default()
}

#[test]
fn teleportation_listing_parses() {
    let p = parse(TELEPORTATION).unwrap();
    assert_eq!(p.num_qubits(), 5);
    assert_eq!(p.instructions().len(), 12);
    assert_eq!(p.measurement_count(), 2);
}

#[test]
fn trivial_programs() {
    let p = parse("h 0\nm 0").unwrap();
    assert_eq!((p.instructions().len(), p.num_qubits()), (2, 1));
    let e = parse("c 3 3").unwrap_err();
    assert!(matches!(e, Error::Parse { line: 1, .. }));
    let t = run_seeded(&parse("m 0").unwrap(), Engine::Tableau, 0, &opts()).unwrap();
    assert_eq!(t.bits(), "0");
}

#[test]
fn teleporting_zero_and_one() {
    for (prep, want) in [("", false), ("h 0\np 0\np 0\nh 0\n", true)] {
        let p = parse(&format!("{prep}{TELEPORTATION}m 2\n")).unwrap();
        for seed in 0..100 {
            for engine in [Engine::Tableau, Engine::Oracle] {
                let t = run_seeded(&p, engine, seed, &opts()).unwrap();
                let last = t.steps.last().unwrap().record;
                assert_eq!(last.outcome, want);
                assert!(last.deterministic);
            }
        }
    }
}

#[test]
fn teleportation_dense_and_tableau_agree() {
    let p = parse(&format!("h 0\np 0\n{TELEPORTATION}h 2\nm 2\n")).unwrap();
    for seed in 0..200 {
        let a = run_seeded(&p, Engine::Tableau, seed, &opts()).unwrap();
        let b = run_seeded(&p, Engine::Oracle, seed, &opts()).unwrap();
        assert_eq!(a.outcomes(), b.outcomes());
        for (x, y) in a.steps.iter().zip(&b.steps) {
            assert_eq!(x.record.deterministic, y.record.deterministic);
        }
    }
}

#[test]
fn ghz_distribution() {
    let p = parse(GHZ).unwrap();
    let mut ones = 0;
    for seed in 0..1000 {
        let t = run_seeded(&p, Engine::Tableau, seed, &opts()).unwrap();
        let bits = t.outcomes();
        assert!(bits.iter().all(|&b| b == bits[0]));
        ones += bits[0] as usize;
    }
    // Binomial(1000, 1/2): 6 standard deviations is about 95.
    assert!((ones as i64 - 500).abs() < 95, "{ones}");
}

#[test]
fn conditioned_correction_teleports() {
    // Teleport |+> using measurement-conditioned Pauli corrections.
    let text = "h 0\nh 1\nc 1 2\nc 0 1\nh 0\nm 0\nm 1\nif 1 h 2\nif 1 p 2\nif 1 p 2\nif 1 h 2\nif 0 p 2\nif 0 p 2\nh 2\nm 2\n";
    let p = parse(text).unwrap();
    for seed in 0..100 {
        let t = run_seeded(&p, Engine::Tableau, seed, &opts()).unwrap();
        assert!(!t.steps[2].record.outcome);
        assert!(t.steps[2].record.deterministic);
    }
}

#[test]
fn canonicalized_prefix_is_equivalent() {
    let prefix: String = TELEPORTATION
        .lines()
        .filter(|l| !l.trim_start().starts_with('m') && !l.trim().is_empty())
        .map(|l| format!("{l}\n"))
        .collect();
    let p = parse(&prefix).unwrap();
    let gates = p.unitary_gates().unwrap();
    let c = canonical_synthesize(&tableau_of(p.num_qubits(), &gates).unwrap()).unwrap();
    let q = CircuitProgram::from_gates(p.num_qubits(), &c.gates()).unwrap();
    assert!(circuits_equivalent(&p, &q).unwrap());
}

#[test]
fn named_gates_and_blocks() {
    let text = "block 1\n0.5,0 0.5,0\n0.5,0 0.5,0\nblock 1\n1 0\n0 0\nh 0\nm 0\nc 0 1\nm 1\n";
    let p = parse(text).unwrap();
    for seed in 0..20 {
        let a = run_seeded(&p, Engine::Beyond, seed, &opts()).unwrap();
        let b = run_seeded(&p, Engine::Oracle, seed, &opts()).unwrap();
        assert_eq!(a.outcomes(), b.outcomes());
        assert!(a.steps[0].record.deterministic);
    }
    assert!(matches!(
        run_seeded(&p, Engine::Tableau, 0, &opts()),
        Err(Error::EngineMismatch(_))
    ));
    let t = parse("h 0\nu t 0\nh 0\nm 0\n").unwrap();
    let mut zeros = 0;
    for seed in 0..2000 {
        let r = run_seeded(&t, Engine::Beyond, seed, &opts()).unwrap();
        let d = run_seeded(&t, Engine::Oracle, seed, &opts()).unwrap();
        assert_eq!(r.outcomes(), d.outcomes());
        let p0 = r.steps[0].probability_zero.unwrap();
        assert!((p0 - (2.0 + 2f64.sqrt()) / 4.0).abs() < 1e-10);
        zeros += !r.steps[0].record.outcome as usize;
    }
    assert!((zeros as f64 / 2000.0 - 0.8536).abs() < 0.05);
}

fn instruction(rng: &mut ChaCha8Rng, n: usize, measured: usize) -> Instruction {
    match rng.gen_range(0..6) {
        0 if n > 1 => {
            let a = rng.gen_range(0..n);
            Instruction::Cnot(a, (a + rng.gen_range(1..n)) % n)
        }
        1 => Instruction::Phase(rng.gen_range(0..n)),
        2 => Instruction::Measure(rng.gen_range(0..n)),
        3 => Instruction::Unitary {
            name: "t".into(),
            qubits: vec![rng.gen_range(0..n)],
        },
        4 if measured > 0 => Instruction::Conditional {
            record: rng.gen_range(0..measured),
            instruction: Box::new(Instruction::Hadamard(rng.gen_range(0..n))),
        },
        _ => Instruction::Hadamard(rng.gen_range(0..n)),
    }
}

proptest! {
    #[test]
    fn render_parse_round_trip(n in 1usize..=12, len in 0usize..40, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ins = Vec::new();
        let mut measured = 0;
        for _ in 0..len {
            let i = instruction(&mut rng, n, measured);
            if matches!(i, Instruction::Measure(_)) {
                measured += 1;
            }
            ins.push(i);
        }
        let p = CircuitProgram::from_instructions(n, ins).unwrap();
        // Width is inferred from the highest index, so compare the listing.
        let text = p.render();
        let back = parse(&text).unwrap();
        prop_assert_eq!(back.instructions(), p.instructions());
        prop_assert_eq!(back.render(), text);
    }

    #[test]
    fn transcripts_are_deterministic(n in 1usize..=6, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gates = random_gates(&mut rng, n, 20);
        let mut text: String = gates.iter().map(|g| format!("{g}\nm {}\n", rng.gen_range(0..n))).collect();
        text.push_str("m 0\n");
        let p = parse(&text).unwrap();
        let a = run_seeded(&p, Engine::Tableau, seed, &opts()).unwrap();
        prop_assert_eq!(&run_seeded(&p, Engine::Tableau, seed, &opts()).unwrap(), &a);
        prop_assert_eq!(run_seeded(&p, Engine::Oracle, seed, &opts()).unwrap().outcomes(), a.outcomes());
        prop_assert_eq!(run_seeded(&p, Engine::Beyond, seed, &opts()).unwrap().outcomes(), a.outcomes());
    }
}
