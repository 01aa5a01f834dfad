use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{ChannelError, Message};

/// First line of a transcript file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptHeader {
    pub session_id: String,
    pub profile: String,
    pub mode: String,
    pub command: Vec<String>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transcript {
    pub header: TranscriptHeader,
    pub messages: Vec<Message>,
}

impl Transcript {
    /// JSON header line, then one hex-encoded frame per line.
    pub fn write_to(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "{}", serde_json::to_string(&self.header).expect("header serialises"))?;
        for m in &self.messages {
            writeln!(w, "{}", hex::encode(m.encode()))?;
        }
        Ok(())
    }

    pub fn render(&self) -> String {
        let mut out = Vec::new();
        self.write_to(&mut out).expect("write to memory");
        String::from_utf8(out).expect("ascii")
    }

    pub fn read_from(r: impl BufRead) -> Result<Transcript, ChannelError> {
        let mut lines = r.lines();
        let head = lines
            .next()
            .ok_or_else(|| ChannelError::Framing("empty transcript".into()))?
            .map_err(|e| ChannelError::Io(e.to_string()))?;
        let header: TranscriptHeader =
            serde_json::from_str(&head).map_err(|e| ChannelError::Framing(format!("header: {e}")))?;
        let mut messages = Vec::new();
        for line in lines {
            let line = line.map_err(|e| ChannelError::Io(e.to_string()))?;
            if line.is_empty() {
                continue;
            }
            let frame = hex::decode(line.trim()).map_err(|e| ChannelError::Framing(e.to_string()))?;
            messages.push(Message::decode(&frame)?);
        }
        Ok(Transcript { header, messages })
    }
}

/// Seq of the first message where the two logs differ (including one log
/// ending early), or `None` if they are identical.
pub fn first_divergence(a: &[Message], b: &[Message]) -> Option<u64> {
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        if x.encode() != y.encode() {
            return Some(x.seq.min(i as u64));
        }
    }
    (a.len() != b.len()).then(|| a.len().min(b.len()) as u64)
}
