//! Ordered classical channel between Alice and Bob.
//!
//! Frame: 4-byte big-endian length, then session id (16 bytes), seq (u64
//! LE), sender (u8), msg_type (u32 LE length + UTF-8), payload (u32 LE
//! length + bytes). `seq` counts every message of the session in both
//! directions, so each endpoint knows the next expected value.

mod transcript;
mod transport;
mod wire;

pub use transcript::{first_divergence, Transcript, TranscriptHeader};
pub use transport::{inproc_pair, tcp_accept, tcp_connect, Transport};
pub use wire::{parse, Reader, Wire, Writer};

use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ChannelError {
    #[error("peer closed the channel")]
    PeerClosed,
    #[error("framing error: {0}")]
    Framing(String),
    #[error("sequence gap: expected {expected}, got {got}")]
    SeqGap { expected: u64, got: u64 },
    #[error("message from a different session")]
    SessionMismatch,
    #[error("message claims the wrong sender")]
    WrongSender,
    #[error("expected {expected}, got {got}")]
    UnexpectedType { expected: String, got: String },
    #[error("peer aborted: {0}")]
    PeerAborted(Abort),
    #[error("io: {0}")]
    Io(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Party {
    Alice,
    Bob,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::Alice => Party::Bob,
            Party::Bob => Party::Alice,
        }
    }
}

/// Abort notice sent before a party stops: where and why.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Abort {
    pub phase: String,
    pub site: Option<(u32, u32)>,
    pub cause: String,
}

impl std::fmt::Display for Abort {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.phase)?;
        if let Some((i, j)) = self.site {
            write!(f, " at site ({i},{j})")?;
        }
        write!(f, ": {}", self.cause)
    }
}

pub const ABORT: &str = "abort";

impl Abort {
    pub fn new(phase: &str, site: Option<(u32, u32)>, cause: impl Into<String>) -> Abort {
        Abort {
            phase: phase.to_string(),
            site,
            cause: cause.into(),
        }
    }

    pub fn to_payload(&self) -> Vec<u8> {
        let site = self.site.map(|(i, j)| vec![i, j]).unwrap_or_default();
        Writer::new().put(&self.phase.clone()).put(&site).put(&self.cause.clone()).finish()
    }

    pub fn from_payload(b: &[u8]) -> Result<Abort, ChannelError> {
        let (phase, site, cause): (String, Vec<u32>, String) = parse(b)?;
        let site = match site.as_slice() {
            [] => None,
            [i, j] => Some((*i, *j)),
            _ => return Err(ChannelError::Framing("bad abort site".into())),
        };
        Ok(Abort { phase, site, cause })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Message {
    pub session_id: [u8; 16],
    pub seq: u64,
    pub sender: Party,
    pub msg_type: String,
    pub payload: Vec<u8>,
}

impl Message {
    /// Framed bytes, including the length prefix.
    pub fn encode(&self) -> Vec<u8> {
        let mut body = Vec::with_capacity(37 + self.msg_type.len() + self.payload.len());
        body.extend_from_slice(&self.session_id);
        body.extend_from_slice(&self.seq.to_le_bytes());
        body.push(match self.sender {
            Party::Alice => 0,
            Party::Bob => 1,
        });
        body.extend_from_slice(&(self.msg_type.len() as u32).to_le_bytes());
        body.extend_from_slice(self.msg_type.as_bytes());
        body.extend_from_slice(&(self.payload.len() as u32).to_le_bytes());
        body.extend_from_slice(&self.payload);
        let mut out = (body.len() as u32).to_be_bytes().to_vec();
        out.extend(body);
        out
    }

    pub fn decode(frame: &[u8]) -> Result<Message, ChannelError> {
        let bad = |why: &str| ChannelError::Framing(why.to_string());
        if frame.len() < 4 {
            return Err(bad("short frame"));
        }
        let len = u32::from_be_bytes(frame[..4].try_into().unwrap()) as usize;
        if frame.len() != 4 + len {
            return Err(bad("length prefix mismatch"));
        }
        let mut r = Reader::new(&frame[4..]);
        let session_id: [u8; 16] = r.take()?;
        let seq: u64 = r.take()?;
        let sender = match r.take::<u8>()? {
            0 => Party::Alice,
            1 => Party::Bob,
            _ => return Err(bad("bad sender")),
        };
        let msg_type: String = r.take()?;
        let payload: Vec<u8> = r.take()?;
        r.done()?;
        Ok(Message {
            session_id,
            seq,
            sender,
            msg_type,
            payload,
        })
    }
}

/// One party's end of a session. Records every message it sends or
/// receives, so either end holds the full transcript.
pub struct Endpoint {
    party: Party,
    session_id: [u8; 16],
    seq: u64,
    transport: Box<dyn Transport>,
    log: Arc<Mutex<Vec<Message>>>,
}

impl Endpoint {
    pub fn new(party: Party, session_id: [u8; 16], transport: Box<dyn Transport>) -> Self {
        Endpoint {
            party,
            session_id,
            seq: 0,
            transport,
            log: Arc::new(Mutex::new(Vec::new())),
        }
    }

    /// Endpoint joining a session whose first `seq` messages already went
    /// over another transport.
    pub fn resume(party: Party, session_id: [u8; 16], seq: u64, transport: Box<dyn Transport>) -> Self {
        let mut ep = Endpoint::new(party, session_id, transport);
        ep.seq = seq;
        ep
    }

    pub fn party(&self) -> Party {
        self.party
    }

    pub fn session_id(&self) -> [u8; 16] {
        self.session_id
    }

    pub fn send(&mut self, msg_type: &str, payload: Vec<u8>) -> Result<(), ChannelError> {
        let msg = Message {
            session_id: self.session_id,
            seq: self.seq,
            sender: self.party,
            msg_type: msg_type.to_string(),
            payload,
        };
        self.send_raw(&msg)?;
        self.seq += 1;
        Ok(())
    }

    /// Sends `msg` exactly as given, bypassing sequencing. For tamper tests.
    pub fn send_raw(&mut self, msg: &Message) -> Result<(), ChannelError> {
        self.transport.send_frame(&msg.encode())?;
        self.log.lock().unwrap().push(msg.clone());
        Ok(())
    }

    pub fn recv(&mut self) -> Result<Message, ChannelError> {
        let frame = self.transport.recv_frame()?;
        let msg = Message::decode(&frame)?;
        if msg.session_id != self.session_id {
            return Err(ChannelError::SessionMismatch);
        }
        if msg.seq != self.seq {
            return Err(ChannelError::SeqGap {
                expected: self.seq,
                got: msg.seq,
            });
        }
        if msg.sender != self.party.other() {
            return Err(ChannelError::WrongSender);
        }
        self.seq += 1;
        self.log.lock().unwrap().push(msg.clone());
        Ok(msg)
    }

    /// Receives the next message, which must have type `msg_type`; an abort
    /// from the peer surfaces as `PeerAborted`.
    pub fn expect(&mut self, msg_type: &str) -> Result<Vec<u8>, ChannelError> {
        let msg = self.recv()?;
        if msg.msg_type == msg_type {
            return Ok(msg.payload);
        }
        if msg.msg_type == ABORT {
            return Err(ChannelError::PeerAborted(Abort::from_payload(&msg.payload)?));
        }
        Err(ChannelError::UnexpectedType {
            expected: msg_type.to_string(),
            got: msg.msg_type,
        })
    }

    pub fn send_abort(&mut self, abort: &Abort) -> Result<(), ChannelError> {
        self.send(ABORT, abort.to_payload())
    }

    pub fn messages(&self) -> Vec<Message> {
        self.log.lock().unwrap().clone()
    }

    /// Shared handle to the message log that stays valid after the endpoint
    /// moves into another thread.
    pub fn log_handle(&self) -> Arc<Mutex<Vec<Message>>> {
        self.log.clone()
    }
}
