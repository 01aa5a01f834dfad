use std::collections::BTreeMap;

use rand::Rng;

use super::{accumulate_dependencies, compute_phi_prime, BlindClient, BlindServer, BrickworkPattern, MbqcError, OutcomeBoard};
use crate::qsim::{Angle8, Basis, StateVector};

/// Output law keyed by the packed last-column bits (bit i = row i).
pub type Law = BTreeMap<u64, f64>;

/// Column-by-column evaluation with qubit recycling: at most two columns are
/// held at once. Each leaf of the returned list is a full history of
/// non-output outcomes with its probability and the conditional law of the
/// output column.
pub fn reference_conditional_laws(pattern: &BrickworkPattern, input: &StateVector) -> Result<Vec<(Vec<bool>, f64, Law)>, MbqcError> {
    check_input(pattern, input)?;
    let mut out = Vec::new();
    let board = OutcomeBoard::new(pattern.n, pattern.m);
    recurse(pattern, input.clone(), 0, 0, board, 1.0, &mut Vec::new(), &mut out)?;
    Ok(out)
}

/// Exact output law of the plain (non-blind) pattern.
pub fn reference_law(pattern: &BrickworkPattern, input: &StateVector) -> Result<Law, MbqcError> {
    let mut law = Law::new();
    for (_, p, cond) in reference_conditional_laws(pattern, input)? {
        for (k, v) in cond {
            *law.entry(k).or_insert(0.0) += p * v;
        }
    }
    Ok(law)
}

fn check_input(pattern: &BrickworkPattern, input: &StateVector) -> Result<(), MbqcError> {
    pattern.validate()?;
    if input.num_qubits() != pattern.n {
        return Err(MbqcError::InputWidth {
            expected: pattern.n,
            got: input.num_qubits(),
        });
    }
    Ok(())
}

fn angle(pattern: &BrickworkPattern, board: &OutcomeBoard, site: (usize, usize)) -> Result<Angle8, MbqcError> {
    if site.1 == 0 {
        return Ok(Angle8::ZERO);
    }
    let (sx, sz) = accumulate_dependencies(board, pattern, site)?;
    Ok(compute_phi_prime(pattern.phi_at(site), sx, sz))
}

/// Appends the next column in |+⟩ and entangles it with the current one.
fn grow(pattern: &BrickworkPattern, state: &StateVector, next: usize) -> Result<StateVector, MbqcError> {
    let n = pattern.n;
    let mut s = state.clone();
    for _ in 0..n {
        s = s.tensor(&StateVector::plus(Angle8::ZERO))?;
    }
    for i in 0..n {
        s.cz(i, n + i)?;
    }
    for (a, b) in pattern.column_edges(next) {
        s.cz(n + a, n + b)?;
    }
    Ok(s)
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    pattern: &BrickworkPattern,
    state: StateVector,
    col: usize,
    row: usize,
    board: OutcomeBoard,
    prob: f64,
    history: &mut Vec<bool>,
    out: &mut Vec<(Vec<bool>, f64, Law)>,
) -> Result<(), MbqcError> {
    let n = pattern.n;
    if col == pattern.m {
        // final column: the remaining n qubits are the output wires
        let mut law = Law::new();
        final_column(pattern, state, 0, board, 1.0, 0, &mut law)?;
        out.push((history.clone(), prob, law));
        return Ok(());
    }
    let state = if row == 0 { grow(pattern, &state, col + 1)? } else { state };
    let a = angle(pattern, &board, (row, col))?;
    for o in [false, true] {
        let (p, post) = state.project(0, Basis::Plane(a), o as u8)?;
        let Some(post) = post else { continue };
        let mut b = board.clone();
        b.set((row, col), o, false);
        history.push(o);
        let (nc, nr) = if row + 1 == n { (col + 1, 0) } else { (col, row + 1) };
        recurse(pattern, post, nc, nr, b, prob * p, history, out)?;
        history.pop();
    }
    Ok(())
}

fn final_column(
    pattern: &BrickworkPattern,
    state: StateVector,
    row: usize,
    board: OutcomeBoard,
    prob: f64,
    bits: u64,
    law: &mut Law,
) -> Result<(), MbqcError> {
    if row == pattern.n {
        *law.entry(bits).or_insert(0.0) += prob;
        return Ok(());
    }
    let a = angle(pattern, &board, (row, pattern.m))?;
    for o in [false, true] {
        let (p, post) = state.project(0, Basis::Plane(a), o as u8)?;
        let Some(post) = post else { continue };
        let mut b = board.clone();
        b.set((row, pattern.m), o, false);
        final_column(pattern, post, row + 1, b, prob * p, bits | (o as u64) << row, law)?;
    }
    Ok(())
}

/// One sampled run of the plain pattern.
pub fn reference_sample<R: Rng + ?Sized>(pattern: &BrickworkPattern, input: &StateVector, rng: &mut R) -> Result<u64, MbqcError> {
    check_input(pattern, input)?;
    let n = pattern.n;
    let mut board = OutcomeBoard::new(n, pattern.m);
    let mut state = input.clone();
    let mut bits = 0u64;
    for col in 0..=pattern.m {
        if col < pattern.m {
            state = grow(pattern, &state, col + 1)?;
        }
        for row in 0..n {
            let a = angle(pattern, &board, (row, col))?;
            let (o, post) = state.measure(0, Basis::Plane(a), rng)?;
            state = post;
            board.set((row, col), o == 1, false);
            if col == pattern.m {
                bits |= (o as u64) << row;
            }
        }
    }
    Ok(bits)
}

/// Circuit-model oracle: Z measurement of
/// Π_j (⊗_i H·Rz(−φ_{i,j}))·V_j applied to H^{⊗n}|ψ⟩.
pub fn circuit_law(pattern: &BrickworkPattern, input: &StateVector) -> Result<Law, MbqcError> {
    check_input(pattern, input)?;
    let mut s = input.clone();
    for i in 0..pattern.n {
        s.h(i)?;
    }
    for j in 1..=pattern.m {
        for (a, b) in pattern.column_edges(j) {
            s.cz(a, b)?;
        }
        for i in 0..pattern.n {
            s.rz(i, -pattern.phi_at((i, j)))?;
            s.h(i)?;
        }
    }
    Ok(s.z_probabilities().into_iter().enumerate().map(|(k, p)| (k as u64, p)).collect())
}

/// Exact output law of the blind protocol for fixed preparation angles θ and
/// masks r, enumerating Bob's measurement outcomes with the same client and
/// server logic the protocol uses.
pub fn blind_law(pattern: &BrickworkPattern, input: &StateVector, theta: &[Vec<Angle8>], r: &[Vec<bool>]) -> Result<Law, MbqcError> {
    check_input(pattern, input)?;
    let prepared: Vec<StateVector> = pattern.sites().map(|(i, j)| StateVector::plus(theta[i][j - 1])).collect();
    let server = BlindServer::new(pattern, input, &prepared)?;
    let client = BlindClient::new(pattern, theta.to_vec(), r.to_vec());
    let mut law = Law::new();
    blind_inputs(pattern, server, client, 0, 1.0, &mut law)?;
    Ok(law)
}

fn blind_inputs(
    pattern: &BrickworkPattern,
    server: BlindServer,
    client: BlindClient<'_>,
    row: usize,
    prob: f64,
    law: &mut Law,
) -> Result<(), MbqcError> {
    if row == pattern.n {
        let sites: Vec<_> = pattern.sites().collect();
        return blind_sites(&sites, server, client, prob, law);
    }
    for (o, p, next) in server.branches((row, 0), Angle8::ZERO)? {
        let mut c = client.clone();
        c.record_input(row, o);
        blind_inputs(pattern, next, c, row + 1, prob * p, law)?;
    }
    Ok(())
}

fn blind_sites(
    sites: &[(usize, usize)],
    server: BlindServer,
    client: BlindClient<'_>,
    prob: f64,
    law: &mut Law,
) -> Result<(), MbqcError> {
    let Some((&site, rest)) = sites.split_first() else {
        *law.entry(client.output()?).or_insert(0.0) += prob;
        return Ok(());
    };
    let delta = client.angles(site)?.delta;
    for (o, p, next) in server.branches(site, delta)? {
        let mut c = client.clone();
        c.record(site, o);
        blind_sites(rest, next, c, prob * p, law)?;
    }
    Ok(())
}
