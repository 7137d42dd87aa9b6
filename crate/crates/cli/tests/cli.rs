use std::process::{Command, Output};

use clap::Parser;
use gcdseq_cli::render::read_bfile;
use gcdseq_cli::commands::TheoremViolation;
use gcdseq_cli::{exit_code, run, Cli};

fn output(args: &[&str]) -> String {
    let cli = Cli::try_parse_from(std::iter::once("gcdseq").chain(args.iter().copied())).unwrap();
    let mut buf = Vec::new();
    run(&cli, &mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

fn binary(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gcdseq"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split([',', ' ']).filter(|s| !s.is_empty()).map(String::from).collect())
        .collect()
}

#[test]
fn evolve_first_rows() {
    let out = output(&["evolve", "--mode", "naive", "--n-max", "6"]);
    let table = rows(&out);
    let col = |i: usize| table.iter().map(|r| r[i].as_str()).collect::<Vec<_>>();
    assert_eq!(col(0), ["1", "2", "3", "4", "5", "6"]);
    assert_eq!(col(1), ["-", "5", "5", "5", "5", "9"]);
    assert_eq!(col(2), ["-", "1", "1", "1", "5", "3"]);
    assert_eq!(col(3), ["7", "8", "9", "10", "15", "18"]);
    assert_eq!(col(4), ["7", "4", "3", "2.5", "3", "3"]);
}

#[test]
fn evolve_ratio_rendering() {
    let out = output(&["evolve", "--mode", "naive", "--n-max", "7", "--format", "csv"]);
    assert!(out.ends_with("7,11,1,19,2.71429\n"), "{out}");
    let exact = output(&["evolve", "--mode", "naive", "--n-max", "7", "--format", "csv", "--exact"]);
    assert!(exact.ends_with("7,11,1,19,19/7\n"), "{exact}");
}

#[test]
fn empty_horizon_prints_header_only() {
    assert_eq!(output(&["evolve", "--mode", "naive", "--n-max", "1", "--format", "csv"]), "n,delta,g,a,ratio\n");
    assert_eq!(output(&["evolve", "--n-max", "4", "--format", "csv"]), "n,delta,g,a,ratio\n");
}

#[test]
fn primes() {
    let out = output(&["primes", "--events", "10", "--format", "bfile"]);
    let g: Vec<String> = read_bfile(&out).unwrap().into_iter().map(|(_, v)| v.to_string()).collect();
    assert_eq!(g, ["5", "3", "11", "3", "23", "3", "47", "3", "5", "3"]);
    let out = output(&["primes", "--events", "19", "--format", "bfile"]);
    assert_eq!(out.lines().last(), Some("19 467"));
    assert_eq!(output(&["primes", "--events", "0", "--format", "bfile"]), "");
}

#[test]
fn diffs() {
    let out = output(&["diffs", "--count", "5", "--format", "bfile"]);
    assert_eq!(out, "2 1\n3 1\n4 1\n5 5\n6 3\n");
    assert_eq!(output(&["diffs", "--count", "0", "--format", "bfile"]), "");
    let out = output(&["diffs", "--seed-a", "8", "--count", "200", "--format", "bfile"]);
    let g: Vec<String> = out.lines().map(|l| l.split(' ').nth(1).unwrap().to_string()).collect();
    assert_eq!(g, naive_diffs(8, 200));
}

fn naive_diffs(a1: u64, count: usize) -> Vec<String> {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    let mut a = a1;
    (2..2 + count as u64)
        .map(|n| {
            let g = gcd(n, a);
            a += g;
            g.to_string()
        })
        .collect()
}

#[test]
fn plotdata() {
    let out = output(&["plotdata", "--kind", "clusters", "--n-max", "106"]);
    let pairs = rows(&out);
    assert_eq!(out.lines().next(), Some("j,n"));
    assert_eq!(pairs[..4], [["1", "5"], ["2", "6"], ["3", "11"], ["4", "12"]]);

    let out = output(&["plotdata", "--kind", "ratio", "--n-max", "1000"]);
    let pairs = rows(&out);
    assert!(pairs.iter().any(|r| r[0] == "47" && r[1] == "3"));
    assert!(pairs.iter().all(|r| r[1].parse::<f64>().unwrap() > 2.0));
}

#[test]
fn naive_and_shortcut_agree() {
    for seed in ["7", "8", "532", "801", "1000"] {
        for cmd in ["primes", "plotdata"] {
            let mut args = vec![cmd, "--seed-a", seed, "--n-max", "5000"];
            if cmd == "plotdata" {
                args.extend(["--kind", "clusters"]);
            }
            let shortcut = output(&args);
            args.extend(["--mode", "naive"]);
            assert_eq!(shortcut, output(&args), "{cmd} from a(1) = {seed}");
        }
    }
    let shortcut = output(&["primes", "--seed-n", "48", "--seed-a", "144", "--events", "30"]);
    let naive = output(&["primes", "--seed-n", "48", "--seed-a", "144", "--events", "30", "--mode", "naive"]);
    assert_eq!(shortcut, naive);
}

#[test]
fn bfile_round_trips() {
    let out = output(&["evolve", "--mode", "naive", "--n-max", "200", "--format", "bfile"]);
    let pairs = read_bfile(&out).unwrap();
    assert_eq!(pairs.len(), 200);
    assert!(pairs.windows(2).all(|w| w[0].0 < w[1].0));
    assert_eq!(pairs[105], (106.into(), 316.into()));
    let again: String = pairs.iter().map(|(i, v)| format!("{i} {v}\n")).collect();
    assert_eq!(again, out);
}

#[test]
fn unbounded_integers_match_fixed() {
    let fixed = output(&["primes", "--events", "60"]);
    let big = output(&["primes", "--events", "60", "--integers", "unbounded"]);
    assert_eq!(fixed, big);
}

#[test]
fn transience_lists_composite_event() {
    let out = output(&["--seed-a", "532", "analyze", "--analysis", "transience"]);
    assert!(out.contains("g(18) = 9"), "{out}");
    let json = output(&["--seed-a", "532", "--format", "json", "analyze", "--analysis", "transience"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["non_prime_events"][0]["n"], "18");
    assert_eq!(v["non_prime_events"][0]["g"], "9");
}

#[test]
fn persistence_report() {
    let out = output(&["analyze", "--analysis", "persistence", "--n1-range", "7727", "--r-range", "7"]);
    let line = out.lines().last().unwrap();
    let cells: Vec<&str> = line.split_whitespace().collect();
    assert_eq!(cells, ["7727", "7", "11", "7885"]);
}

#[test]
fn bounds_report() {
    let out = output(&["--n-max", "2000", "analyze", "--analysis", "bounds", "--seed-range", "4..60"]);
    assert!(!out.contains("VIOLATED"));
    assert_eq!(out.lines().count(), 1 + 57);
}

#[test]
fn exit_codes() {
    let ok = binary(&["primes", "--events", "3"], &[]);
    assert_eq!(ok.status.code(), Some(0));

    let bad_horizon = binary(&["--seed-n", "10", "--seed-a", "30", "--n-max", "5", "evolve"], &[]);
    assert_eq!(bad_horizon.status.code(), Some(2));
    let bad_flag = binary(&["evolve", "--bogus"], &[]);
    assert_eq!(bad_flag.status.code(), Some(2));
    let json_table = binary(&["--format", "json", "primes"], &[]);
    assert_eq!(json_table.status.code(), Some(2));

    // the 128-bit policy runs out long before 3000 events
    let overflow = binary(&["analyze", "--analysis", "coverage", "--events", "3000"], &[]);
    assert_eq!(overflow.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&overflow.stderr);
    assert!(stderr.contains("overflow") && stderr.contains("at n ="), "{stderr}");

    // the bounds are theorems, so a violation cannot be provoked from real input
    let clean = binary(&["analyze", "--analysis", "bounds"], &[]);
    assert_eq!(clean.status.code(), Some(0));
    let violation = anyhow::Error::from(TheoremViolation("x".into()));
    assert_eq!(exit_code(&violation), 4);
}

#[test]
fn env_vars_and_precedence() {
    let from_env = binary(&["primes", "--format", "bfile"], &[("GCDSEQ_EVENTS", "3")]);
    assert_eq!(String::from_utf8_lossy(&from_env.stdout), "1 5\n2 3\n3 11\n");
    let flag_wins = binary(&["primes", "--format", "bfile", "--events", "2"], &[("GCDSEQ_EVENTS", "3")]);
    assert_eq!(String::from_utf8_lossy(&flag_wins.stdout), "1 5\n2 3\n");
    let seed_env = binary(&["diffs", "--count", "3", "--format", "bfile"], &[("GCDSEQ_SEED_A", "8")]);
    let expected: String = naive_diffs(8, 3).iter().enumerate().map(|(i, g)| format!("{} {g}\n", i + 2)).collect();
    assert_eq!(String::from_utf8_lossy(&seed_env.stdout), expected);
}

#[test]
fn class_checkpoint_resumes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("classes.json");
    let path = path.to_str().unwrap();
    let args = ["analyze", "--analysis", "classes", "--seed-range", "4..1500", "--n-limit", "2^16"];
    let fresh = output(&args);
    assert!(fresh.contains("classes"));

    let mut with_ckpt = args.to_vec();
    with_ckpt.extend(["--checkpoint", path]);
    let first = output(&with_ckpt);
    assert_eq!(first, fresh);
    // resuming from a finished checkpoint reproduces the report
    assert_eq!(output(&with_ckpt), fresh);

    // a checkpoint from another range is refused
    let mut other = vec!["analyze", "--analysis", "classes", "--seed-range", "4..100", "--n-limit", "2^16"];
    other.extend(["--checkpoint", path]);
    let cli = Cli::try_parse_from(std::iter::once("gcdseq").chain(other)).unwrap();
    let err = run(&cli, &mut Vec::new()).unwrap_err();
    assert_eq!(gcdseq_cli::exit_code(&err), 2);
}

#[test]
fn worker_count_does_not_change_output() {
    let args = ["analyze", "--analysis", "classes", "--seed-range", "4..400", "--n-limit", "2^14"];
    let one = binary(&[&args[..], &["--workers", "1"]].concat(), &[]);
    let three = binary(&[&args[..], &["--workers", "3"]].concat(), &[]);
    assert_eq!(one.stdout, three.stdout);
    assert!(one.status.success());
}
