use std::path::PathBuf;
use std::process::{Command, Output};

use chp_core::program::{GHZ, TELEPORTATION};
use chp_core::synth::circuits_equivalent;

fn write_temp(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("chp-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn chp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chp")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn single_measurement() {
    let f = write_temp("m0.chp", "m 0\n");
    let o = chp(&["run", f.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "0\n");
}

#[test]
fn ghz_verbose_and_deterministic() {
    let f = write_temp("ghz.chp", GHZ);
    let path = f.to_str().unwrap();
    let a = chp(&["run", path, "--seed", "5", "-v"]);
    let b = chp(&["run", path, "--seed", "5", "-v"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let mut lines = text.lines();
    let bits = lines.next().unwrap();
    assert_eq!(bits.len(), 3);
    assert!(bits == "000" || bits == "111");
    let rest: Vec<&str> = lines.collect();
    assert_eq!(rest.len(), 3);
    assert!(rest[0].ends_with("(random)"));
    assert!(rest[1].ends_with("(determinate)"));
    assert!(rest[2].starts_with("m 2 -> "));
}

#[test]
fn engines_give_identical_transcripts() {
    let f = write_temp("ghz2.chp", GHZ);
    let path = f.to_str().unwrap();
    for seed in ["0", "1", "2", "3"] {
        let base = stdout(&chp(&["run", path, "--seed", seed]));
        for engine in ["mixed", "beyond", "oracle"] {
            let o = chp(&["run", path, "--seed", seed, "--engine", engine]);
            assert!(o.status.success(), "{engine}");
            assert_eq!(stdout(&o), base, "{engine}");
        }
    }
}

#[test]
fn teleporting_zero_reads_zero() {
    let f = write_temp("tele.chp", &format!("{TELEPORTATION}m 2\n"));
    for seed in 0..10 {
        let o = chp(&["run", f.to_str().unwrap(), "--seed", &seed.to_string()]);
        let bits = stdout(&o);
        assert_eq!(bits.trim().len(), 3);
        assert!(bits.trim().ends_with('0'));
    }
}

#[test]
fn parse_error_exit_code() {
    let f = write_temp("bad.chp", "c 3 3\n");
    let o = chp(&["run", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
}

#[test]
fn resource_cap_exit_code() {
    let f = write_temp("t.chp", "h 0\nu t 0\nm 0\n");
    let o = chp(&["run", f.to_str().unwrap(), "--engine", "beyond", "--term-cap", "1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn engine_mismatch_exit_code() {
    let f = write_temp("t2.chp", "u t 0\n");
    let o = chp(&["run", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn canonicalize_round_trips() {
    let text = "h 0\nc 0 1\np 1\nc 1 2\nh 2\np 0\nc 2 0\n";
    let f = write_temp("circ.chp", text);
    let o = chp(&["canonicalize", f.to_str().unwrap()]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("# round")).count(), 11);
    let a = chp_core::parse(text).unwrap();
    let mut b = chp_core::parse(&out).unwrap();
    if b.num_qubits() < a.num_qubits() {
        b = chp_core::CircuitProgram::from_gates(a.num_qubits(), &b.unitary_gates().unwrap()).unwrap();
    }
    assert!(circuits_equivalent(&a, &b).unwrap());

    let o = chp(&["minimize", f.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("# round")).count(), 11);
}

#[test]
fn innerprod_bell_and_zero() {
    let bell = write_temp("bell.chp", "h 0\nc 0 1\n");
    let zero = write_temp("zero.chp", "h 1\nh 1\n");
    let o = chp(&["innerprod", bell.to_str().unwrap(), zero.to_str().unwrap()]);
    assert_eq!(stdout(&o), "0.7071067811865476 (2^-1/2)\n");
    let one = write_temp("one.chp", "h 1\np 1\np 1\nh 1\n");
    let o = chp(&["innerprod", zero.to_str().unwrap(), one.to_str().unwrap()]);
    assert_eq!(stdout(&o), "0\n");
}

#[test]
fn count_states_output() {
    assert_eq!(stdout(&chp(&["count-states", "1"])), "formula: 6\nenumerated: 6\n");
    assert_eq!(stdout(&chp(&["count-states", "2"])), "formula: 60\nenumerated: 60\n");
    assert_eq!(stdout(&chp(&["count-states", "3"])), "formula: 1080\nenumerated: 1080\n");
    assert_eq!(stdout(&chp(&["count-states", "5"])), "formula: 2423520\n");
}

#[test]
fn bench_csv() {
    let o = chp(&["bench", "--beta", "1.2", "--n-min", "4", "--n-max", "8", "--step", "4", "--trials", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,beta,trial,seed,gates,total_meas_time,rowsums_per_meas,time_per_meas"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0][4], "9");
    assert!(rows.iter().all(|r| r[6].parse::<f64>().unwrap() > 0.0));

    let path = std::env::temp_dir().join(format!("chp-bench-{}.csv", std::process::id()));
    let o = chp(&["bench", "--beta", "0.6", "--n-min", "4", "--n-max", "4", "--csv", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 2);

    let o = chp(&["bench", "--beta", "0", "--n-min", "4", "--n-max", "4"]);
    assert_eq!(o.status.code(), Some(1));
}
