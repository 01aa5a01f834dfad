use std::io::{Read, Write};
use std::net::{TcpListener, TcpStream, ToSocketAddrs};
use std::sync::mpsc::{channel, Receiver, Sender};

use super::{ChannelError, Endpoint, Party};

/// Moves whole frames between the two parties.
pub trait Transport: Send {
    fn send_frame(&mut self, frame: &[u8]) -> Result<(), ChannelError>;
    fn recv_frame(&mut self) -> Result<Vec<u8>, ChannelError>;
}

struct InProc {
    tx: Sender<Vec<u8>>,
    rx: Receiver<Vec<u8>>,
}

impl Transport for InProc {
    fn send_frame(&mut self, frame: &[u8]) -> Result<(), ChannelError> {
        self.tx.send(frame.to_vec()).map_err(|_| ChannelError::PeerClosed)
    }

    fn recv_frame(&mut self) -> Result<Vec<u8>, ChannelError> {
        self.rx.recv().map_err(|_| ChannelError::PeerClosed)
    }
}

/// Connected (Alice, Bob) endpoints over in-process queues.
pub fn inproc_pair(session_id: [u8; 16]) -> (Endpoint, Endpoint) {
    let (ta, rb) = channel();
    let (tb, ra) = channel();
    (
        Endpoint::new(Party::Alice, session_id, Box::new(InProc { tx: ta, rx: ra })),
        Endpoint::new(Party::Bob, session_id, Box::new(InProc { tx: tb, rx: rb })),
    )
}

struct Tcp(TcpStream);

impl Transport for Tcp {
    fn send_frame(&mut self, frame: &[u8]) -> Result<(), ChannelError> {
        self.0.write_all(frame).map_err(io_err)?;
        self.0.flush().map_err(io_err)
    }

    fn recv_frame(&mut self) -> Result<Vec<u8>, ChannelError> {
        let mut len = [0u8; 4];
        if let Err(e) = self.0.read_exact(&mut len) {
            return Err(match e.kind() {
                std::io::ErrorKind::UnexpectedEof => ChannelError::PeerClosed,
                _ => io_err(e),
            });
        }
        let n = u32::from_be_bytes(len) as usize;
        if n > 1 << 28 {
            return Err(ChannelError::Framing("frame too large".into()));
        }
        let mut frame = len.to_vec();
        frame.resize(4 + n, 0);
        self.0.read_exact(&mut frame[4..]).map_err(|_| ChannelError::PeerClosed)?;
        Ok(frame)
    }
}

fn io_err(e: std::io::Error) -> ChannelError {
    ChannelError::Io(e.to_string())
}

/// Bob's side: accept one connection on `listener`.
pub fn tcp_accept(listener: &TcpListener, session_id: [u8; 16]) -> Result<Endpoint, ChannelError> {
    let (stream, _) = listener.accept().map_err(io_err)?;
    stream.set_nodelay(true).map_err(io_err)?;
    Ok(Endpoint::new(Party::Bob, session_id, Box::new(Tcp(stream))))
}

/// Alice's side: connect to a listening Bob, retrying briefly while the
/// listener comes up.
pub fn tcp_connect(addr: impl ToSocketAddrs + Clone, session_id: [u8; 16]) -> Result<Endpoint, ChannelError> {
    let mut last = None;
    for _ in 0..50 {
        match TcpStream::connect(addr.clone()) {
            Ok(stream) => {
                stream.set_nodelay(true).map_err(io_err)?;
                return Ok(Endpoint::new(Party::Alice, session_id, Box::new(Tcp(stream))));
            }
            Err(e) => {
                last = Some(e);
                std::thread::sleep(std::time::Duration::from_millis(100));
            }
        }
    }
    Err(io_err(last.expect("at least one attempt")))
}
