use std::net::TcpListener;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_q2pc"));
    c.env_remove("Q2PC_PROFILE");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn q2pc")
}

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Runs `args` twice with a file output at `flag`; stdout and file must be
/// byte-identical.
fn assert_deterministic(tag: &str, args: &[&str], flag: &str) -> (Output, Vec<u8>) {
    let mut outs = Vec::new();
    let path = tmp(&format!("{tag}.out"));
    for _ in 0..2 {
        let mut full: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        full.push(flag.into());
        full.push(path.display().to_string());
        let o = bin().args(&full).output().unwrap();
        let file = std::fs::read(&path).unwrap();
        outs.push((o, file));
    }
    let (a, b) = (&outs[0], &outs[1]);
    assert_eq!(a.1, b.1, "{tag}: file differs");
    assert_eq!(a.0.stdout, b.0.stdout, "{tag}: stdout differs");
    assert_eq!(a.0.status.code(), b.0.status.code());
    outs.remove(0)
}

#[test]
fn oqfe_example_run() {
    let (o, t) = assert_deterministic("oqfe", &["oqfe", "run", "--mode", "sh", "--b", "1", "--input", "plus", "--profile", "tiny", "--seed", "7"], "--transcript");
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.lines().any(|l| l == "alice.s_b: 0" || l == "alice.s_b: 1"), "{s}");
    assert!(s.contains("transcript: "));
    let text = String::from_utf8(t).unwrap();
    assert!(text.lines().next().unwrap().starts_with('{'));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn every_protocol_subcommand_is_deterministic() {
    let cases: &[(&str, &[&str])] = &[
        ("oqfe-mal", &["oqfe", "run", "--mode", "mal", "--b", "0", "--input", "random", "--seed", "3"]),
        ("q2pc", &["q2pc", "run", "--pattern", "brick", "--input", "plus,one", "--seed", "2"]),
        ("fullsim", &["compile", "fullsim", "--pattern", "hadamard", "--input", "iplus", "--seed", "5"]),
        ("zkpoqk", &["zkpoqk", "demo", "--rounds", "12", "--seed", "6"]),
    ];
    for (tag, args) in cases {
        let (o, _) = assert_deterministic(tag, args, "--transcript");
        assert_eq!(o.status.code(), Some(0), "{tag}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn every_experiment_is_deterministic() {
    let cases: &[(&str, &[&str])] = &[
        ("delta", &["experiment", "delta-uniformity", "--seed", "1"]),
        ("delta-sampling", &["experiment", "delta-uniformity", "--trials", "10000", "--seed", "1"]),
        ("simtv", &["experiment", "simulator-tv", "--profile", "tiny", "--seed", "1"]),
        ("backend", &["experiment", "backend-eq", "--profile", "tiny", "--seed", "1"]),
        ("backend-small", &["experiment", "backend-eq", "--profile", "small", "--trials", "500", "--seed", "1"]),
    ];
    for (tag, args) in cases {
        let (o, report) = assert_deterministic(tag, args, "--out");
        assert_eq!(o.status.code(), Some(0), "{tag}");
        let v: serde_json::Value = serde_json::from_slice(&report).unwrap();
        assert_eq!(v["pass"], true);
        assert!(v["method"]["kind"].is_string());
    }
}

#[test]
fn extractor_experiment_example() {
    let (o, report) = assert_deterministic("extractor", &["experiment", "extractor", "--trials", "100", "--seed", "1"], "--out");
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("correct: 100/100"));
    let v: serde_json::Value = serde_json::from_slice(&report).unwrap();
    assert_eq!(v["correct"], 100);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["oqfe", "run", "--b", "1", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["oqfe", "run", "--b", "2"]).status.code(), Some(2));
    assert_eq!(run(&["q2pc", "run", "--pattern", "no-such-pattern"]).status.code(), Some(2));
    assert_eq!(run(&["q2pc", "run", "--pattern", "brick", "--input", "plus"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn aborts_and_rejections_exit_1() {
    let o = run(&["oqfe", "run", "--mode", "mal", "--b", "1", "--deviation", "bad-key"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("alice.abort: oqfe.keygen"));
    let o = run(&["q2pc", "run", "--pattern", "brick", "--input", "zero,zero", "--deviation", "tamper-delta", "--site", "1,2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("q2pc.delta at (1,2)"));
    for d in ["wrong-description", "inconsistent-inner", "bad-opening"] {
        let o = run(&["compile", "fullsim", "--pattern", "identity", "--input", "zero", "--deviation", d, "--site", "0,1"]);
        assert_eq!(o.status.code(), Some(1), "{d}: {}", stdout(&o));
    }
    assert_eq!(run(&["zkpoqk", "demo", "--deviation", "no-witness"]).status.code(), Some(1));
}

#[test]
fn replay_matches_and_detects_seed_change() {
    let path = tmp("replay.ndjson");
    let args = ["q2pc", "run", "--pattern", "rz", "--input", "random", "--seed", "11"];
    let rec = bin().args(args).arg("--transcript").arg(&path).output().unwrap();
    assert_eq!(rec.status.code(), Some(0));
    let o = bin().args(args).arg("--replay").arg(&path).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("replay: identical"));

    // same file with the recorded seed changed
    let text = std::fs::read_to_string(&path).unwrap();
    let perturbed = tmp("replay-perturbed.ndjson");
    std::fs::write(&perturbed, text.replacen("\"seed\":11", "\"seed\":12", 1)).unwrap();
    let o = bin().args(args).arg("--replay").arg(&perturbed).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("replay: diverges at seq"));
}

#[test]
fn tcp_and_inproc_transcripts_agree() {
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let addr = format!("127.0.0.1:{port}");
    let base = ["oqfe", "run", "--mode", "mal", "--b", "1", "--input", "iplus", "--seed", "21"];
    let (ta, tb, ti) = (tmp("tcp-alice.ndjson"), tmp("tcp-bob.ndjson"), tmp("inproc.ndjson"));
    let mut bob = bin()
        .args(base)
        .args(["--transport", "tcp", "--role", "bob", "--listen", &addr, "--transcript"])
        .arg(&tb)
        .stdout(std::process::Stdio::null())
        .spawn()
        .unwrap();
    let alice = bin()
        .args(base)
        .args(["--transport", "tcp", "--role", "alice", "--connect", &addr, "--transcript"])
        .arg(&ta)
        .output()
        .unwrap();
    assert!(bob.wait().unwrap().success());
    assert_eq!(alice.status.code(), Some(0));
    let inproc = bin().args(base).arg("--transcript").arg(&ti).output().unwrap();
    assert_eq!(inproc.status.code(), Some(0));
    let frames = |p: &PathBuf| std::fs::read_to_string(p).unwrap().lines().skip(1).map(str::to_string).collect::<Vec<_>>();
    assert_eq!(frames(&ta), frames(&ti));
    assert_eq!(frames(&tb), frames(&ti));
    // both report the same s_b
    let sb = |o: &Output| stdout(o).lines().find(|l| l.starts_with("alice.s_b")).unwrap().to_string();
    assert_eq!(sb(&alice), sb(&inproc));
}

#[test]
fn pattern_export_round_trips() {
    let path = tmp("brick.json");
    assert!(run(&["pattern", "export", "brick", "--out", path.to_str().unwrap()]).status.success());
    let o = run(&["q2pc", "run", "--pattern", path.to_str().unwrap(), "--input", "zero,plus", "--seed", "1"]);
    let o2 = run(&["q2pc", "run", "--pattern", "brick", "--input", "zero,plus", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), stdout(&o2));
    assert!(stdout(&run(&["pattern", "list"])).contains("rx-teleport"));
}

#[test]
fn input_file_accepts_amplitudes() {
    let path = tmp("amps.json");
    std::fs::write(&path, "[[0.0, 0.0], [1.0, 0.0]]").unwrap();
    let o = bin().args(["oqfe", "run", "--b", "0", "--seed", "2", "--input-file"]).arg(&path).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    // |1⟩ measured in Z after Rx(0)
    assert!(stdout(&o).contains("alice.s_b: 1"));
}

#[test]
fn profile_env_sets_default() {
    let o = bin().env("Q2PC_PROFILE", "bogus").args(["oqfe", "run", "--b", "0"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&run(&["profile", "list"])).contains("tiny: n=1 m=6 q=32"));
}
