use std::fs::File;
use std::io::BufReader;
use std::net::TcpListener;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, ValueEnum};
use q2pc_core::channel::{first_divergence, inproc_pair, tcp_accept, tcp_connect, Endpoint, Message, Transcript, TranscriptHeader};
use q2pc_core::lattice::Profile;
use q2pc_core::primitives::sha256;
use q2pc_core::protocols::ProtocolError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TransportKind {
    Inproc,
    Tcp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Role {
    Alice,
    Bob,
}

#[derive(Args, Clone, Debug)]
pub struct SessionArgs {
    /// Parameter profile.
    #[arg(long, env = "Q2PC_PROFILE", default_value = "tiny")]
    pub profile: Profile,
    /// Seed every coin of the run is derived from.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "inproc")]
    pub transport: TransportKind,
    /// Party this process plays over tcp.
    #[arg(long, value_enum)]
    pub role: Option<Role>,
    /// Bob's listening address (tcp).
    #[arg(long)]
    pub listen: Option<String>,
    /// Address Alice connects to (tcp).
    #[arg(long)]
    pub connect: Option<String>,
    /// Write the transcript here (ndjson).
    #[arg(long)]
    pub transcript: Option<PathBuf>,
    /// Rerun with the seed recorded in this transcript and compare.
    #[arg(long)]
    pub replay: Option<PathBuf>,
}

pub fn session_id(seed: u64) -> [u8; 16] {
    sha256(&[b"cli.session", &seed.to_le_bytes()])[..16].try_into().unwrap()
}

/// Result lines of one party.
pub type Lines = Vec<(String, String)>;

pub struct RunOutcome {
    pub lines: Lines,
    pub messages: Vec<Message>,
    /// The run ended in an abort or a rejection.
    pub rejected: bool,
}

fn party_lines(prefix: &str, r: Result<Lines, ProtocolError>) -> (Lines, bool) {
    match r {
        Ok(l) => (l.into_iter().map(|(k, v)| (format!("{prefix}.{k}"), v)).collect(), false),
        Err(e) => {
            let v = match e.abort() {
                Some(a) => format!("{}{} ({})", a.phase, a.site.map(|(i, j)| format!(" at ({i},{j})")).unwrap_or_default(), a.cause),
                None => e.to_string(),
            };
            (vec![(format!("{prefix}.abort"), v)], true)
        }
    }
}

/// Runs the two sides according to the transport flags.
pub fn run_session<FA, FB>(s: &SessionArgs, alice: FA, bob: FB) -> anyhow::Result<RunOutcome>
where
    FA: FnOnce(&mut Endpoint) -> Result<Lines, ProtocolError> + Send,
    FB: FnOnce(&mut Endpoint) -> Result<Lines, ProtocolError> + Send,
{
    let sid = session_id(s.seed);
    match (s.transport, s.role) {
        (TransportKind::Inproc, None) => {
            let (ea, eb) = inproc_pair(sid);
            let log = ea.log_handle();
            let (a, b) = std::thread::scope(|sc| {
                let mut eb = eb;
                let hb = sc.spawn(move || bob(&mut eb));
                let mut ea = ea;
                let a = alice(&mut ea);
                drop(ea);
                (a, hb.join().expect("bob thread"))
            });
            let (mut lines, ra) = party_lines("alice", a);
            let (lb, rb) = party_lines("bob", b);
            lines.extend(lb);
            let messages = log.lock().unwrap().clone();
            Ok(RunOutcome { lines, messages, rejected: ra || rb })
        }
        (TransportKind::Inproc, Some(_)) => bail!("--role needs --transport tcp"),
        (TransportKind::Tcp, Some(Role::Alice)) => {
            let addr = s.connect.clone().context("alice needs --connect host:port")?;
            let mut ep = tcp_connect(addr.as_str(), sid)?;
            let (lines, rejected) = party_lines("alice", alice(&mut ep));
            Ok(RunOutcome { lines, messages: ep.messages(), rejected })
        }
        (TransportKind::Tcp, Some(Role::Bob)) => {
            let addr = s.listen.clone().context("bob needs --listen host:port")?;
            let listener = TcpListener::bind(&addr).with_context(|| format!("binding {addr}"))?;
            let mut ep = tcp_accept(&listener, sid)?;
            let (lines, rejected) = party_lines("bob", bob(&mut ep));
            Ok(RunOutcome { lines, messages: ep.messages(), rejected })
        }
        (TransportKind::Tcp, None) => bail!("--transport tcp needs --role alice|bob"),
    }
}

pub fn header(s: &SessionArgs, mode: &str, argv: &[String]) -> TranscriptHeader {
    TranscriptHeader {
        session_id: hex::encode(session_id(s.seed)),
        profile: s.profile.name().into(),
        mode: mode.into(),
        command: argv.to_vec(),
        seed: s.seed,
    }
}

pub fn load_transcript(path: &PathBuf) -> anyhow::Result<Transcript> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(Transcript::read_from(BufReader::new(f))?)
}

/// Replay verdict line: identical, or the first differing seq.
pub fn compare(recorded: &[Message], fresh: &[Message]) -> (String, bool) {
    match first_divergence(recorded, fresh) {
        None => (format!("identical ({} messages)", fresh.len()), true),
        Some(seq) => (format!("diverges at seq {seq}"), false),
    }
}
