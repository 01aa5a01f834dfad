use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use q2pc_core::channel::{Endpoint, Transcript};
use q2pc_core::compilers::{
    fullsim_alice, fullsim_bob, zkpoqk_extract, zkpoqk_prover, zkpoqk_verifier, FullSimBobConfig, FullSimBobStrategy,
    ProverStrategy, StateDescription, ToyInstance,
};
use q2pc_core::harness::{
    backend_equivalence_experiment, delta_uniformity_experiment, extractor_experiment, simulator_tv_experiment, DeltaMode,
    SimulatorStrategy,
};
use q2pc_core::lattice::Profile;
use q2pc_core::mbqc::library;
use q2pc_core::primitives::CoinSource;
use q2pc_core::protocols::{
    oqfe_mal_alice, oqfe_mal_bob, oqfe_sh_alice, oqfe_sh_bob, q2pc_alice, q2pc_bob, AliceStrategy, BobStrategy,
    OqfeAliceConfig, OqfeBobConfig, Q2pcAliceConfig, Q2pcAliceStrategy, Q2pcBobConfig,
};
use q2pc_core::qsim::{Angle8, StateVector};
use q2pc_core::rsp::{BobBackend, SiblingSource};
use q2pc_core::zk::IdealZk;

use crate::inputs::{load_input, load_pattern};
use crate::session::{compare, header, load_transcript, run_session, session_id, Lines, RunOutcome, SessionArgs};

#[derive(Parser, Debug)]
#[command(name = "q2pc", version, about = "Two-party quantum computation between a classical Alice and a quantum Bob over a classical channel")]
pub struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Oblivious quantum function evaluation: Alice learns the Z outcome of Rx(−b·π/2) on Bob's qubit.
    #[command(subcommand)]
    Oqfe(OqfeCmd),
    /// Two-party evaluation of a measurement pattern on Bob's input, with blind remote state preparation.
    #[command(subcommand)]
    Q2pc(Q2pcCmd),
    /// Compiled protocols.
    #[command(subcommand)]
    Compile(CompileCmd),
    /// Zero-knowledge proof of quantum knowledge built from a classically verifiable one.
    #[command(subcommand)]
    Zkpoqk(ZkCmd),
    /// Simulator, extractor and distribution experiments; writes JSON reports.
    #[command(subcommand)]
    Experiment(ExperimentCmd),
    /// Measurement pattern library.
    #[command(subcommand)]
    Pattern(PatternCmd),
    /// Parameter profiles.
    #[command(subcommand)]
    Profile(ProfileCmd),
}

#[derive(Subcommand, Debug)]
enum OqfeCmd {
    /// Run one session (semi-honest or malicious-Alice variant).
    Run(OqfeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Sh,
    Mal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Backend {
    Quantum,
    Shortcut,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OqfeDeviation {
    Honest,
    MaskZero,
    MaskOne,
    BadKey,
    InconsistentCommitment,
    OddDelta,
}

#[derive(Args, Debug)]
struct OqfeArgs {
    #[arg(long, value_enum, default_value = "sh")]
    mode: Mode,
    /// Alice's choice bit.
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
    b: u8,
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value = "quantum")]
    backend: Backend,
    /// Scripted Alice deviation (mal mode).
    #[arg(long, value_enum, default_value = "honest")]
    deviation: OqfeDeviation,
    #[command(flatten)]
    session: SessionArgs,
}

#[derive(Args, Debug, Clone)]
struct InputArgs {
    /// Named input states, one per row: zero, one, plus, iplus, random.
    #[arg(long, default_value = "plus")]
    input: String,
    /// JSON list of [re, im] amplitudes; overrides --input.
    #[arg(long)]
    input_file: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Q2pcCmd {
    /// Run one session.
    Run(Q2pcArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Q2pcDeviation {
    Honest,
    TamperDelta,
    FalseProof,
}

#[derive(Args, Debug)]
struct Q2pcArgs {
    /// Library pattern name or pattern file.
    #[arg(long, default_value = "brick")]
    pattern: String,
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value = "quantum")]
    backend: Backend,
    #[arg(long, value_enum, default_value = "honest")]
    deviation: Q2pcDeviation,
    /// Site "row,col" the deviation targets.
    #[arg(long, default_value = "0,1")]
    site: String,
    #[command(flatten)]
    session: SessionArgs,
}

#[derive(Subcommand, Debug)]
enum CompileCmd {
    /// Pattern evaluation with full simulation against Bob.
    Fullsim(FullsimArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FullsimDeviation {
    Honest,
    WrongDescription,
    InconsistentInner,
    BadOpening,
}

#[derive(Args, Debug)]
struct FullsimArgs {
    #[arg(long, default_value = "brick")]
    pattern: String,
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value = "quantum")]
    backend: Backend,
    /// Scripted Bob deviation.
    #[arg(long, value_enum, default_value = "honest")]
    deviation: FullsimDeviation,
    #[arg(long, default_value = "0,1")]
    site: String,
    #[command(flatten)]
    session: SessionArgs,
}

#[derive(Subcommand, Debug)]
enum ZkCmd {
    /// Prove knowledge of a basis-state witness of a toy relation.
    Demo(ZkArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ZkDeviation {
    Honest,
    WrongKey,
    NoWitness,
}

#[derive(Args, Debug)]
struct ZkArgs {
    /// Verifier challenges.
    #[arg(long, default_value_t = 16)]
    rounds: u32,
    /// Witness width in qubits.
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u8).range(1..=16))]
    bits: u8,
    #[arg(long, value_enum, default_value = "honest")]
    deviation: ZkDeviation,
    #[command(flatten)]
    session: SessionArgs,
}

#[derive(Subcommand, Debug)]
enum ExperimentCmd {
    /// Law of δ under b = 0 and b = 1 (exact unless --trials is given).
    DeltaUniformity(ExpArgs),
    /// Exact TV between real and simulated semi-honest Alice views; --trials counts keys.
    SimulatorTv(ExpArgs),
    /// Extraction of a malicious Alice's input, plus scripted cheating runs.
    Extractor(ExpArgs),
    /// Quantum versus shortcut Bob transcript laws (exact at tiny; --trials counts keys there).
    BackendEq(ExpArgs),
}

#[derive(Args, Debug)]
struct ExpArgs {
    #[arg(long, env = "Q2PC_PROFILE", default_value = "tiny")]
    profile: Profile,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Simulator used by simulator-tv.
    #[arg(long, value_enum, default_value = "trapdoor-aware")]
    strategy: SimStrategy,
    /// Pin the mask r_A to 0 (delta-uniformity).
    #[arg(long)]
    force_mask_zero: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SimStrategy {
    TrapdoorAware,
    UniformMeasurement,
}

#[derive(Subcommand, Debug)]
enum PatternCmd {
    /// Names of the shipped patterns.
    List,
    /// Write a pattern as JSON.
    Export {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum ProfileCmd {
    /// Parameters of every profile.
    List,
}

fn print_lines(lines: &Lines) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    for (k, v) in lines {
        writeln!(out, "{k}: {v}")?;
    }
    Ok(())
}

fn bits(v: u64, n: usize) -> String {
    (0..n).map(|i| if (v >> i) & 1 == 1 { '1' } else { '0' }).collect()
}

fn parse_site(s: &str) -> anyhow::Result<(usize, usize)> {
    let (a, b) = s.split_once(',').context("--site takes row,col")?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}

fn bob_backend(b: Backend) -> BobBackend {
    match b {
        Backend::Quantum => BobBackend::Quantum,
        Backend::Shortcut => BobBackend::Shortcut(SiblingSource::Search),
    }
}

fn coins(seed: u64, party: &str) -> CoinSource {
    CoinSource::from_u64(seed, &format!("cli.{party}"))
}

/// Runs a protocol command: either a fresh run (with optional transcript)
/// or a replay against a recorded transcript.
fn protocol(s: &SessionArgs, mode: &str, argv: &[String], run: impl Fn(&SessionArgs) -> anyhow::Result<RunOutcome>) -> anyhow::Result<bool> {
    if let Some(path) = &s.replay {
        let recorded = load_transcript(path)?;
        let mut again = s.clone();
        again.seed = recorded.header.seed;
        again.transport = crate::session::TransportKind::Inproc;
        again.role = None;
        let fresh = run(&again)?;
        let (verdict, same) = compare(&recorded.messages, &fresh.messages);
        let mut lines = fresh.lines;
        lines.push(("replay".into(), verdict));
        print_lines(&lines)?;
        return Ok(same);
    }
    let out = run(s)?;
    let mut lines = out.lines;
    lines.push(("messages".into(), out.messages.len().to_string()));
    if let Some(path) = &s.transcript {
        let t = Transcript {
            header: header(s, mode, argv),
            messages: out.messages,
        };
        let mut f = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        t.write_to(&mut f)?;
        lines.push(("transcript".into(), path.display().to_string()));
    }
    print_lines(&lines)?;
    Ok(!out.rejected)
}

fn oqfe(a: &OqfeArgs, argv: &[String]) -> anyhow::Result<bool> {
    let psi = load_input(&a.input.input, a.input.input_file.as_ref(), a.session.seed, 1)?;
    let strategy = match a.deviation {
        OqfeDeviation::Honest => AliceStrategy::Honest,
        OqfeDeviation::MaskZero => AliceStrategy::FixedMask(false),
        OqfeDeviation::MaskOne => AliceStrategy::FixedMask(true),
        OqfeDeviation::BadKey => AliceStrategy::BadKey,
        OqfeDeviation::InconsistentCommitment => AliceStrategy::InconsistentCommitment,
        OqfeDeviation::OddDelta => AliceStrategy::TamperedDelta(Angle8::new(1)),
    };
    if a.mode == Mode::Sh && !matches!(strategy, AliceStrategy::Honest | AliceStrategy::FixedMask(_)) {
        bail!("--deviation {:?} needs --mode mal", a.deviation);
    }
    let mode = match a.mode {
        Mode::Sh => "oqfe-sh",
        Mode::Mal => "oqfe-mal",
    };
    protocol(&a.session, mode, argv, |s| {
        let params = s.profile.params();
        let acfg = OqfeAliceConfig { b: a.b == 1, params, strategy };
        let bcfg = OqfeBobConfig {
            psi_in: psi.clone(),
            backend: bob_backend(a.backend),
            strategy: BobStrategy::Honest,
        };
        let zk = IdealZk::new(&session_id(s.seed));
        let (za, zb) = (zk.clone(), zk);
        let (seed, mal) = (s.seed, a.mode == Mode::Mal);
        run_session(
            s,
            move |ep: &mut Endpoint| {
                let mut c = coins(seed, "alice");
                let out = if mal { oqfe_mal_alice(ep, &za, &acfg, &mut c)? } else { oqfe_sh_alice(ep, &acfg, &mut c)? };
                Ok(vec![
                    ("s_b".into(), (out.s_b as u8).to_string()),
                    ("theta".into(), out.theta.angle().value().to_string()),
                    ("delta".into(), out.delta.value().to_string()),
                ])
            },
            move |ep: &mut Endpoint| {
                let mut c = coins(seed, "bob");
                let out = if mal { oqfe_mal_bob(ep, &zb, &params, &bcfg, &mut c)? } else { oqfe_sh_bob(ep, &bcfg, &mut c)? };
                Ok(vec![
                    ("delta".into(), out.delta.value().to_string()),
                    ("m0".into(), (out.m0 as u8).to_string()),
                    ("s_bar".into(), (out.s_bar as u8).to_string()),
                ])
            },
        )
    })
}

fn q2pc(a: &Q2pcArgs, argv: &[String]) -> anyhow::Result<bool> {
    let pattern = load_pattern(&a.pattern)?;
    let input = load_input(&a.input.input, a.input.input_file.as_ref(), a.session.seed, pattern.n)?;
    let site = parse_site(&a.site)?;
    let strategy = match a.deviation {
        Q2pcDeviation::Honest => Q2pcAliceStrategy::Honest,
        Q2pcDeviation::TamperDelta => Q2pcAliceStrategy::TamperDelta(site),
        Q2pcDeviation::FalseProof => Q2pcAliceStrategy::FalseProof(site),
    };
    protocol(&a.session, "q2pc", argv, |s| {
        let params = s.profile.params();
        let acfg = Q2pcAliceConfig {
            pattern: pattern.clone(),
            params,
            strategy,
        };
        let bcfg = Q2pcBobConfig {
            input: input.clone(),
            params,
            backend: bob_backend(a.backend),
            lie_at: None,
        };
        let zk = IdealZk::new(&session_id(s.seed));
        let (za, zb) = (zk.clone(), zk);
        let (seed, n) = (s.seed, pattern.n);
        run_session(
            s,
            move |ep: &mut Endpoint| {
                let out = q2pc_alice(ep, &za, &acfg, &mut coins(seed, "alice"))?;
                Ok(vec![("output".into(), bits(out.output, n))])
            },
            move |ep: &mut Endpoint| {
                let out = q2pc_bob(ep, &zb, &bcfg, &mut coins(seed, "bob"))?;
                Ok(vec![("measured".into(), out.measured.len().to_string())])
            },
        )
    })
}

fn fullsim(a: &FullsimArgs, argv: &[String]) -> anyhow::Result<bool> {
    let pattern = load_pattern(&a.pattern)?;
    let input = load_input(&a.input.input, a.input.input_file.as_ref(), a.session.seed, pattern.n)?;
    let site = parse_site(&a.site)?;
    let strategy = match a.deviation {
        FullsimDeviation::Honest => FullSimBobStrategy::Honest,
        FullsimDeviation::WrongDescription => {
            let mut other: StateVector = input.clone();
            other.x(0)?;
            FullSimBobStrategy::WrongDescription(StateDescription::of(&other))
        }
        FullsimDeviation::InconsistentInner => FullSimBobStrategy::InconsistentInner(site),
        FullsimDeviation::BadOpening => FullSimBobStrategy::BadOpening,
    };
    protocol(&a.session, "fullsim", argv, |s| {
        let params = s.profile.params();
        let bcfg = FullSimBobConfig {
            description: StateDescription::of(&input),
            params,
            backend: bob_backend(a.backend),
            seed: coins(s.seed, "bob.inner").bytes32(),
            strategy: strategy.clone(),
        };
        let zk = IdealZk::new(&session_id(s.seed));
        let (za, zb) = (zk.clone(), zk);
        let (seed, n, p) = (s.seed, pattern.n, pattern.clone());
        run_session(
            s,
            move |ep: &mut Endpoint| {
                let out = fullsim_alice(ep, &za, &p, &params, &mut coins(seed, "alice"))?;
                Ok(vec![("output".into(), bits(out.output, n))])
            },
            move |ep: &mut Endpoint| {
                fullsim_bob(ep, &zb, &bcfg, &mut coins(seed, "bob"))?;
                Ok(vec![("done".into(), "true".into())])
            },
        )
    })
}

fn zkpoqk(a: &ZkArgs, argv: &[String]) -> anyhow::Result<bool> {
    let n = a.bits as usize;
    let witness = coins(a.session.seed, "witness").below(1 << n);
    let inst = ToyInstance::for_witness(n, witness);
    let strategy = match a.deviation {
        ZkDeviation::Honest => ProverStrategy::Honest,
        ZkDeviation::WrongKey => ProverStrategy::WrongKey,
        ZkDeviation::NoWitness => ProverStrategy::NoWitness,
    };
    protocol(&a.session, "zkpoqk", argv, |s| {
        let zk = IdealZk::new(&session_id(s.seed));
        let (za, zb) = (zk.clone(), zk);
        let (i1, i2) = (inst.clone(), inst.clone());
        let (seed, rounds) = (s.seed, a.rounds);
        let mut out = run_session(
            s,
            move |ep: &mut Endpoint| {
                let v = zkpoqk_verifier(ep, &za, &i1, rounds, &mut coins(seed, "alice"))?;
                let mut l = vec![("accept".into(), v.accept.to_string())];
                if let Some(ph) = &v.reject_phase {
                    l.push(("reject_phase".into(), ph.clone()));
                }
                // extraction needs the escrow, which only an in-process run shares
                if let Ok(w) = zkpoqk_extract(&za, &i1, &v) {
                    l.push(("extracted".into(), bits(w, n)));
                }
                Ok(l)
            },
            move |ep: &mut Endpoint| {
                let st = StateVector::basis(n, witness as usize)?;
                let p = zkpoqk_prover(ep, &zb, &i2, st, strategy, &mut coins(seed, "bob"))?;
                Ok(vec![("rounds".into(), p.plaintexts.len().to_string())])
            },
        )?;
        out.rejected |= out.lines.iter().any(|(k, v)| k == "alice.accept" && v == "false");
        Ok(out)
    })
}

fn experiment(cmd: &ExperimentCmd) -> anyhow::Result<bool> {
    let (name, a) = match cmd {
        ExperimentCmd::DeltaUniformity(a) => ("delta-uniformity", a),
        ExperimentCmd::SimulatorTv(a) => ("simulator-tv", a),
        ExperimentCmd::Extractor(a) => ("extractor", a),
        ExperimentCmd::BackendEq(a) => ("backend-eq", a),
    };
    let (json, pass, summary) = match cmd {
        ExperimentCmd::DeltaUniformity(_) => {
            let mode = a.trials.map_or(DeltaMode::Exact, DeltaMode::Sampling);
            let r = delta_uniformity_experiment(mode, a.force_mask_zero, a.seed)?;
            (r.to_json(), r.pass, format!("tv: {}\nthreshold: {}", r.tv, r.threshold))
        }
        ExperimentCmd::SimulatorTv(_) => {
            let strategy = match a.strategy {
                SimStrategy::TrapdoorAware => SimulatorStrategy::TrapdoorAware,
                SimStrategy::UniformMeasurement => SimulatorStrategy::UniformMeasurement,
            };
            let r = simulator_tv_experiment(a.profile, strategy, a.trials.unwrap_or(1) as usize, a.seed)?;
            (r.to_json(), r.pass, format!("tv: {}\nthreshold: {}", r.tv, r.threshold))
        }
        ExperimentCmd::Extractor(_) => {
            let r = extractor_experiment(a.profile, a.trials.unwrap_or(100), a.seed)?;
            let cheats: Vec<String> = r.cheating.iter().map(|(k, o)| format!("{k}: {}/{} stopped", o.aborted + o.flagged, o.runs)).collect();
            (r.to_json(), r.pass, format!("correct: {}/{}\n{}", r.correct, r.trials, cheats.join("\n")))
        }
        ExperimentCmd::BackendEq(_) => {
            let default = if a.profile.enumerable() { 1 } else { 10_000 };
            let r = backend_equivalence_experiment(a.profile, a.trials.unwrap_or(default), a.seed)?;
            (r.to_json(), r.pass, format!("tv: {}\nthreshold: {}", r.tv, r.threshold))
        }
    };
    println!("experiment: {name}\n{summary}\npass: {pass}");
    if let Some(path) = &a.out {
        std::fs::write(path, json + "\n").with_context(|| format!("writing {}", path.display()))?;
        println!("report: {}", path.display());
    }
    Ok(pass)
}

pub fn run(cli: Cli, argv: &[String]) -> anyhow::Result<bool> {
    match &cli.cmd {
        Cmd::Oqfe(OqfeCmd::Run(a)) => oqfe(a, argv),
        Cmd::Q2pc(Q2pcCmd::Run(a)) => q2pc(a, argv),
        Cmd::Compile(CompileCmd::Fullsim(a)) => fullsim(a, argv),
        Cmd::Zkpoqk(ZkCmd::Demo(a)) => zkpoqk(a, argv),
        Cmd::Experiment(e) => experiment(e),
        Cmd::Pattern(PatternCmd::List) => {
            for n in library::NAMES {
                println!("{n}");
            }
            Ok(true)
        }
        Cmd::Pattern(PatternCmd::Export { name, out }) => {
            let p = library::by_name(name).with_context(|| format!("no library pattern {name}"))?;
            match out {
                Some(path) => std::fs::write(path, p.to_json() + "\n")?,
                None => println!("{}", p.to_json()),
            }
            Ok(true)
        }
        Cmd::Profile(ProfileCmd::List) => {
            for p in Profile::ALL {
                let l = p.params();
                println!(
                    "{}: n={} m={} q={} sigma0={} sigma={} width={} enumerable={} quantum_bob={}",
                    p.name(),
                    l.n,
                    l.m,
                    l.q,
                    l.sigma0,
                    l.sigma,
                    l.preimage_width(),
                    p.enumerable(),
                    p.quantum_bob()
                );
            }
            Ok(true)
        }
    }
}
