use std::collections::BTreeSet;
use std::process::Command;

use qgame_core::corpus::{all_fixtures, fixtures_dir, replay_args};
use qgame_core::{Instruction, Program};

#[test]
fn every_fixture_matches_its_golden() {
    let mut failures = Vec::new();
    for f in all_fixtures() {
        if let Err(problems) = f.verify() {
            failures.push(format!("{}: {}", f.name, problems.join("; ")));
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn output_is_byte_identical_across_runs() {
    for f in all_fixtures() {
        assert_eq!(f.replay(), f.replay(), "{}", f.name);
    }
}

#[test]
fn binary_agrees_with_in_process_runs() {
    for f in all_fixtures() {
        let golden = f.golden();
        let replay = replay_args(&golden.args, &fixtures_dir());
        let mut args = golden.args.clone();
        if let Some(last) = args.last_mut().filter(|a| !a.starts_with('-')) {
            *last = fixtures_dir().join(&*last).display().to_string();
        }
        let out = Command::new(env!("CARGO_BIN_EXE_qgame")).args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(replay.exit), "{}", f.name);
        assert_eq!(String::from_utf8(out.stdout).unwrap(), replay.stdout, "{}", f.name);
        assert_eq!(String::from_utf8(out.stderr).unwrap(), replay.stderr, "{}", f.name);
    }
}

#[test]
fn fixtures_cover_every_instruction() {
    let mut seen = BTreeSet::new();
    for f in all_fixtures() {
        let Some(file) = f.program_file else { continue };
        let text = std::fs::read_to_string(fixtures_dir().join(file)).unwrap();
        if let Ok(p) = Program::parse(&text) {
            p.visit(&mut |i: &Instruction| {
                seen.insert(i.name());
            });
        }
    }
    let all = [
        "QNOT", "CNOT", "SRN", "HADAMARD", "U-THETA", "U2", "CPHASE", "SWAP", "ORACLE", "MEASURE", "HALT", "PRINTAMPS",
    ];
    for name in all {
        assert!(seen.contains(name), "no fixture uses {name}");
    }
}

#[test]
fn grover_table_prints_expected_rows() {
    let f = all_fixtures().into_iter().find(|f| f.name == "grover_1000").unwrap();
    let out = f.replay().stdout;
    assert!(out.contains("Register  Amplitude  Probability\n"));
    assert!(out.contains("|000⟩  0.707  0.500\n"), "{out}");
    assert!(out.contains("|001⟩  -0.707  0.500\n"), "{out}");
}
