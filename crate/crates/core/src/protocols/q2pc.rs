use serde::Serialize;

use super::{fail, ProtocolError, MSG_ZK};
use crate::channel::{parse, Endpoint, Writer};
use crate::lattice::{gen, LatticeParams};
use crate::mbqc::{
    accumulate_dependencies, compute_delta, compute_phi_prime, BlindClient, BlindServer, BrickworkPattern, OutcomeBoard, Site,
};
use crate::primitives::{commit, verify_commitment, CoinSource, Commitment, Opening};
use crate::qsim::{Angle8, BitString, StateVector};
use crate::rsp::{
    alice_merge, bob_merge, recv_key, recv_meas, recv_merge, rsp_alice_decode, rsp_bob, send_key, send_meas, send_merge,
    BobBackend, Rsp4Output,
};
use crate::zk::{key_coins, IdealZk, KeyDerivation, KeyDerivationStatement, KeyDerivationWitness, Relation, ZkSession};

pub const MSG_Q_COMMIT: &str = "q2pc.commit";
pub const MSG_Q_COIN: &str = "q2pc.coin";
pub const MSG_Q_DELTA: &str = "q2pc.delta";
pub const MSG_Q_OUTCOME: &str = "q2pc.outcome";

/// Public record of one four-state run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RspRecord {
    pub com_f: Commitment,
    pub r_b: [u8; 32],
    pub key: Vec<u8>,
    pub y: Vec<u32>,
    pub w: Vec<u8>,
    pub w_len: usize,
}

/// What Bob knows when he receives δ for `site`. Per-site vectors follow
/// the pattern's site order.
#[derive(Clone, Debug, Serialize)]
pub struct SiteStatement {
    pub site: Site,
    pub delta: Angle8,
    pub site_coms: Vec<Commitment>,
    pub rsp: Vec<(RspRecord, RspRecord)>,
    pub merges: Vec<bool>,
    /// Raw outcomes reported so far, input column included.
    pub outcomes: Vec<(Site, bool)>,
}

#[derive(Clone, Debug)]
pub struct SiteWitness {
    pub phi: Vec<Angle8>,
    pub r: Vec<bool>,
    pub decs: Vec<Opening>,
    pub r_a: Vec<([u8; 32], [u8; 32])>,
    pub dec_f: Vec<(Opening, Opening)>,
}

/// δ at the stated site was computed from the committed (φ, r), the θ that
/// the trapdoors of the tossed keys give for the RSP transcript, and the
/// flow corrections of the outcomes so far.
pub struct SiteConsistency {
    pub params: LatticeParams,
    pub shape: BrickworkPattern,
}

fn site_bytes(phi: Angle8, r: bool) -> [u8; 2] {
    [phi.value(), r as u8]
}

fn run_theta(params: &LatticeParams, rec: &RspRecord, r_a: &[u8; 32], dec_f: &Opening) -> Option<Rsp4Output> {
    if !verify_commitment(&rec.com_f, dec_f, r_a) {
        return None;
    }
    let kp = gen(params, &mut key_coins(r_a, &rec.r_b)).ok()?;
    if kp.public.to_bytes() != rec.key {
        return None;
    }
    let w = BitString::from_bytes(&rec.w, rec.w_len)?;
    rsp_alice_decode(&kp, &rec.y, &w).ok()
}

impl Relation for SiteConsistency {
    type Statement = SiteStatement;
    type Witness = SiteWitness;

    fn name(&self) -> &'static str {
        "rel.site"
    }

    fn holds(&self, x: &SiteStatement, w: &SiteWitness) -> bool {
        let sites: Vec<Site> = self.shape.sites().collect();
        let t = sites.len();
        if [x.site_coms.len(), x.rsp.len(), x.merges.len(), w.phi.len(), w.r.len(), w.decs.len(), w.r_a.len(), w.dec_f.len()]
            .iter()
            .any(|&l| l != t)
        {
            return false;
        }
        let Some(k) = sites.iter().position(|&s| s == x.site) else {
            return false;
        };
        for idx in 0..t {
            if !verify_commitment(&x.site_coms[idx], &w.decs[idx], &site_bytes(w.phi[idx], w.r[idx])) {
                return false;
            }
        }
        let (Some(a), Some(b)) = (
            run_theta(&self.params, &x.rsp[k].0, &w.r_a[k].0, &w.dec_f[k].0),
            run_theta(&self.params, &x.rsp[k].1, &w.r_a[k].1, &w.dec_f[k].1),
        ) else {
            return false;
        };
        let theta = alice_merge(a.angle(), b.theta1, b.theta2, x.merges[k]);
        let mut board = OutcomeBoard::new(self.shape.n, self.shape.m);
        for &(s, o) in &x.outcomes {
            let mask = match sites.iter().position(|&u| u == s) {
                Some(idx) => w.r[idx],
                None if s.1 == 0 && s.0 < self.shape.n => false,
                None => return false,
            };
            board.set(s, o, mask);
        }
        let Ok((sx, sz)) = accumulate_dependencies(&board, &self.shape, x.site) else {
            return false;
        };
        x.delta == compute_delta(compute_phi_prime(w.phi[k], sx, sz), theta, w.r[k])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Q2pcAliceStrategy {
    Honest,
    /// Sends δ + π/4 at the site together with the token for the honest δ.
    TamperDelta(Site),
    /// Sends δ + π/4 at the site and asks the functionality to prove it.
    FalseProof(Site),
}

#[derive(Clone, Debug)]
pub struct Q2pcAliceConfig {
    pub pattern: BrickworkPattern,
    pub params: LatticeParams,
    pub strategy: Q2pcAliceStrategy,
}

#[derive(Clone, Debug)]
pub struct Q2pcAliceOutput {
    /// Last-column corrected outcomes, bit i for row i.
    pub output: u64,
    /// θ and r indexed [row][column − 1].
    pub theta: Vec<Vec<Angle8>>,
    pub r: Vec<Vec<bool>>,
}

#[derive(Clone, Debug)]
pub struct Q2pcBobConfig {
    pub input: StateVector,
    pub params: LatticeParams,
    pub backend: BobBackend,
    /// Scripted deviation: report the flipped outcome at this site.
    pub lie_at: Option<Site>,
}

#[derive(Clone, Debug)]
pub struct Q2pcBobOutput {
    /// Prepared qubits in site order.
    pub prepared: Vec<StateVector>,
    /// Sites Bob measured, in order.
    pub measured: Vec<Site>,
}

fn site_tag((i, j): Site) -> Option<(u32, u32)> {
    Some((i as u32, j as u32))
}

pub fn q2pc_alice(ep: &mut Endpoint, zk: &IdealZk, cfg: &Q2pcAliceConfig, coins: &mut CoinSource) -> Result<Q2pcAliceOutput, ProtocolError> {
    let p = &cfg.pattern;
    p.validate()?;
    let sites: Vec<Site> = p.sites().collect();
    let phi: Vec<Angle8> = sites.iter().map(|&s| p.phi_at(s)).collect();
    let r: Vec<bool> = sites.iter().map(|_| coins.bit()).collect();
    let (site_coms, decs): (Vec<Commitment>, Vec<Opening>) =
        phi.iter().zip(&r).map(|(&f, &b)| commit(&site_bytes(f, b), coins)).unzip();
    let edges: Vec<(u32, u32, u32)> = p.edges.iter().map(|&(c, a, b)| (c as u32, a as u32, b as u32)).collect();
    ep.send(MSG_Q_COMMIT, Writer::new().put(&(p.n as u32)).put(&(p.m as u32)).put(&edges).put(&site_coms).finish())?;

    let rel_f = KeyDerivation { params: cfg.params };
    let mut rsp = Vec::with_capacity(sites.len());
    let mut merges = Vec::with_capacity(sites.len());
    let mut r_a_all = Vec::with_capacity(sites.len());
    let mut dec_f_all = Vec::with_capacity(sites.len());
    let mut theta = vec![vec![Angle8::ZERO; p.m]; p.n];
    for &(i, j) in &sites {
        let mut recs = Vec::with_capacity(2);
        let mut outs = Vec::with_capacity(2);
        let mut shares = Vec::with_capacity(2);
        let mut openings = Vec::with_capacity(2);
        for _ in 0..2 {
            let r_a = coins.bytes32();
            let (com_f, dec_f) = commit(&r_a, coins);
            ep.send(MSG_Q_COMMIT, Writer::new().put(&com_f).finish())?;
            let r_b: [u8; 32] = parse(&ep.expect(MSG_Q_COIN)?)?;
            let kp = gen(&cfg.params, &mut key_coins(&r_a, &r_b))?;
            send_key(ep, &kp.public)?;
            let stmt = KeyDerivationStatement {
                com_f,
                r_b,
                key: kp.public.to_bytes(),
            };
            let token = ZkSession::prover(&rel_f, stmt.clone()).prove(zk, KeyDerivationWitness { r_a, dec_f })?;
            ep.send(MSG_ZK, token.concat())?;
            let (y, w) = recv_meas(ep)?;
            let out = match rsp_alice_decode(&kp, &y, &w) {
                Ok(o) => o,
                Err(e) => return Err(fail(ep, "q2pc.rsp", site_tag((i, j)), &e.to_string())),
            };
            recs.push(RspRecord {
                com_f,
                r_b,
                key: stmt.key,
                y,
                w: w.to_bytes(),
                w_len: w.len(),
            });
            outs.push(out);
            shares.push(r_a);
            openings.push(dec_f);
        }
        let s = recv_merge(ep)?;
        theta[i][j - 1] = alice_merge(outs[0].angle(), outs[1].theta1, outs[1].theta2, s);
        merges.push(s);
        rsp.push((recs[0].clone(), recs[1].clone()));
        r_a_all.push((shares[0], shares[1]));
        dec_f_all.push((openings[0], openings[1]));
    }

    let r_grid: Vec<Vec<bool>> = (0..p.n).map(|i| (1..=p.m).map(|j| r[(j - 1) * p.n + i]).collect()).collect();
    let mut client = BlindClient::new(p, theta.clone(), r_grid.clone());
    let inputs: Vec<bool> = parse(&ep.expect(MSG_Q_OUTCOME)?)?;
    if inputs.len() != p.n {
        return Err(fail(ep, "q2pc.input", None, "wrong number of input outcomes"));
    }
    let mut outcomes = Vec::new();
    for (i, &s) in inputs.iter().enumerate() {
        client.record_input(i, s);
        outcomes.push(((i, 0), s));
    }
    let rel = SiteConsistency {
        params: cfg.params,
        shape: p.clone(),
    };
    let witness = SiteWitness {
        phi,
        r,
        decs,
        r_a: r_a_all,
        dec_f: dec_f_all,
    };
    for &site in &sites {
        let honest = client.angles(site)?.delta;
        let mut stmt = SiteStatement {
            site,
            delta: honest,
            site_coms: site_coms.clone(),
            rsp: rsp.clone(),
            merges: merges.clone(),
            outcomes: outcomes.clone(),
        };
        let mut sent = honest;
        match cfg.strategy {
            Q2pcAliceStrategy::TamperDelta(s) if s == site => sent = honest + Angle8::new(1),
            Q2pcAliceStrategy::FalseProof(s) if s == site => {
                sent = honest + Angle8::new(1);
                stmt.delta = sent;
            }
            _ => {}
        }
        let token = ZkSession::prover(&rel, stmt).prove(zk, witness.clone())?;
        ep.send(MSG_ZK, token.concat())?;
        ep.send(MSG_Q_DELTA, Writer::new().put(&sent).finish())?;
        let s: bool = parse(&ep.expect(MSG_Q_OUTCOME)?)?;
        client.record(site, s);
        outcomes.push((site, s));
    }
    Ok(Q2pcAliceOutput {
        output: client.output()?,
        theta,
        r: r_grid,
    })
}

pub fn q2pc_bob(ep: &mut Endpoint, zk: &IdealZk, cfg: &Q2pcBobConfig, coins: &mut CoinSource) -> Result<Q2pcBobOutput, ProtocolError> {
    let (n, m, edges, site_coms): (u32, u32, Vec<(u32, u32, u32)>, Vec<Commitment>) = parse(&ep.expect(MSG_Q_COMMIT)?)?;
    let (n, m) = (n as usize, m as usize);
    let edges = edges.into_iter().map(|(c, a, b)| (c as usize, a as usize, b as usize)).collect();
    let shape = match BrickworkPattern::new("shape", vec![vec![Angle8::ZERO; m]; n], edges) {
        Ok(s) => s,
        Err(e) => return Err(fail(ep, "q2pc.setup", None, &e.to_string())),
    };
    if site_coms.len() != n * m || cfg.input.num_qubits() != n {
        return Err(fail(ep, "q2pc.setup", None, "pattern shape does not match commitments or input"));
    }
    let sites: Vec<Site> = shape.sites().collect();
    let rel_f = KeyDerivation { params: cfg.params };
    let mut rsp = Vec::with_capacity(sites.len());
    let mut merges = Vec::with_capacity(sites.len());
    let mut prepared = Vec::with_capacity(sites.len());
    for &site in &sites {
        let mut recs = Vec::with_capacity(2);
        let mut states = Vec::with_capacity(2);
        for _ in 0..2 {
            let com_f: Commitment = parse(&ep.expect(MSG_Q_COMMIT)?)?;
            let r_b = coins.bytes32();
            ep.send(MSG_Q_COIN, Writer::new().put(&r_b).finish())?;
            let pk = recv_key(ep)?;
            let token = ep.expect(MSG_ZK)?;
            let stmt = KeyDerivationStatement {
                com_f,
                r_b,
                key: pk.to_bytes(),
            };
            if !ZkSession::verifier(&rel_f, stmt).verify(zk, &[token]).unwrap_or(false) {
                return Err(fail(ep, "q2pc.keygen", site_tag(site), "key derivation proof rejected"));
            }
            let out = rsp_bob(&pk, &cfg.backend, coins)?;
            send_meas(ep, &out.y, &out.w)?;
            recs.push(RspRecord {
                com_f,
                r_b,
                key: pk.to_bytes(),
                y: out.y,
                w: out.w.to_bytes(),
                w_len: out.w.len(),
            });
            states.push(out.state);
        }
        let (s, q) = bob_merge(&states[0], &states[1], coins)?;
        send_merge(ep, s)?;
        merges.push(s);
        prepared.push(q);
        rsp.push((recs[0].clone(), recs[1].clone()));
    }

    let mut server = BlindServer::new(&shape, &cfg.input, &prepared)?;
    let mut outcomes = Vec::new();
    let mut inputs = Vec::with_capacity(n);
    for i in 0..n {
        let s = server.measure((i, 0), Angle8::ZERO, coins)?;
        inputs.push(s);
        outcomes.push(((i, 0), s));
    }
    ep.send(MSG_Q_OUTCOME, Writer::new().put(&inputs).finish())?;
    let rel = SiteConsistency {
        params: cfg.params,
        shape: shape.clone(),
    };
    let mut measured = Vec::with_capacity(sites.len());
    for &site in &sites {
        let token = ep.expect(MSG_ZK)?;
        let delta: Angle8 = parse(&ep.expect(MSG_Q_DELTA)?)?;
        let stmt = SiteStatement {
            site,
            delta,
            site_coms: site_coms.clone(),
            rsp: rsp.clone(),
            merges: merges.clone(),
            outcomes: outcomes.clone(),
        };
        if !ZkSession::verifier(&rel, stmt).verify(zk, &[token]).unwrap_or(false) {
            return Err(fail(ep, "q2pc.delta", site_tag(site), "measurement angle proof rejected"));
        }
        let mut s = server.measure(site, delta, coins)?;
        if cfg.lie_at == Some(site) {
            s = !s;
        }
        measured.push(site);
        outcomes.push((site, s));
        ep.send(MSG_Q_OUTCOME, Writer::new().put(&s).finish())?;
    }
    Ok(Q2pcBobOutput { prepared, measured })
}
