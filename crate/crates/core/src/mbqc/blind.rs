use rand::Rng;

use super::{BrickworkPattern, MbqcError, Site};
use crate::qsim::{Angle8, Basis, StateVector};

/// φ′ = (−1)^{sX}·φ + sZ·π.
pub fn compute_phi_prime(phi: Angle8, sx: bool, sz: bool) -> Angle8 {
    phi.signed(sx) + Angle8::new(4 * sz as i64)
}

/// δ = φ′ + θ + r·π.
pub fn compute_delta(phi_prime: Angle8, theta: Angle8, r: bool) -> Angle8 {
    phi_prime + theta + Angle8::new(4 * r as i64)
}

/// Corrected outcomes s̄ (and raw s′) per site, column 0 included.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutcomeBoard {
    pub s_bar: Vec<Vec<Option<bool>>>,
    pub s_raw: Vec<Vec<Option<bool>>>,
}

impl OutcomeBoard {
    pub fn new(n: usize, m: usize) -> Self {
        OutcomeBoard {
            s_bar: vec![vec![None; m + 1]; n],
            s_raw: vec![vec![None; m + 1]; n],
        }
    }

    pub fn set(&mut self, (i, j): Site, raw: bool, mask: bool) -> bool {
        self.s_raw[i][j] = Some(raw);
        self.s_bar[i][j] = Some(raw ^ mask);
        raw ^ mask
    }

    pub fn get(&self, (i, j): Site) -> Option<bool> {
        self.s_bar.get(i).and_then(|r| r.get(j)).copied().flatten()
    }
}

/// (sX, sZ) for `site`: parities of the corrected outcomes in its
/// dependency sets.
pub fn accumulate_dependencies(board: &OutcomeBoard, pattern: &BrickworkPattern, (i, j): Site) -> Result<(bool, bool), MbqcError> {
    let fold = |deps: &[Site]| -> Result<bool, MbqcError> {
        deps.iter().try_fold(false, |acc, &d| {
            board.get(d).map(|v| acc ^ v).ok_or(MbqcError::Unmeasured(d))
        })
    };
    Ok((fold(&pattern.x_dep[i][j - 1])?, fold(&pattern.z_dep[i][j - 1])?))
}

/// Per-site angle bookkeeping for Alice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SiteAngles {
    pub sx: bool,
    pub sz: bool,
    pub phi_prime: Angle8,
    pub delta: Angle8,
}

/// Alice's classical side of a blind pattern run.
#[derive(Clone, Debug)]
pub struct BlindClient<'p> {
    pattern: &'p BrickworkPattern,
    theta: Vec<Vec<Angle8>>,
    r: Vec<Vec<bool>>,
    board: OutcomeBoard,
}

impl<'p> BlindClient<'p> {
    /// `theta` and `r` are indexed [row][column − 1].
    pub fn new(pattern: &'p BrickworkPattern, theta: Vec<Vec<Angle8>>, r: Vec<Vec<bool>>) -> Self {
        BlindClient {
            pattern,
            theta,
            r,
            board: OutcomeBoard::new(pattern.n, pattern.m),
        }
    }

    pub fn board(&self) -> &OutcomeBoard {
        &self.board
    }

    /// Input-column outcomes arrive unmasked.
    pub fn record_input(&mut self, row: usize, s: bool) {
        self.board.set((row, 0), s, false);
    }

    pub fn angles(&self, site: Site) -> Result<SiteAngles, MbqcError> {
        let (sx, sz) = accumulate_dependencies(&self.board, self.pattern, site)?;
        let phi_prime = compute_phi_prime(self.pattern.phi_at(site), sx, sz);
        let (i, j) = site;
        Ok(SiteAngles {
            sx,
            sz,
            phi_prime,
            delta: compute_delta(phi_prime, self.theta[i][j - 1], self.r[i][j - 1]),
        })
    }

    /// Records Bob's reported s′ and returns s̄ = s′ ⊕ r.
    pub fn record(&mut self, (i, j): Site, s_prime: bool) -> bool {
        let r = self.r[i][j - 1];
        self.board.set((i, j), s_prime, r)
    }

    /// Corrected outcomes of the last column, bit i for row i.
    pub fn output(&self) -> Result<u64, MbqcError> {
        let m = self.pattern.m;
        (0..self.pattern.n).try_fold(0u64, |acc, i| {
            self.board.get((i, m)).map(|v| acc | (v as u64) << i).ok_or(MbqcError::Unmeasured((i, m)))
        })
    }
}

/// Bob's side: the whole graph state held densely, qubits removed as they
/// are measured.
#[derive(Clone, Debug)]
pub struct BlindServer {
    state: StateVector,
    labels: Vec<Site>,
}

impl BlindServer {
    /// `prepared` holds one qubit per site in `pattern.sites()` order.
    pub fn new(pattern: &BrickworkPattern, input: &StateVector, prepared: &[StateVector]) -> Result<Self, MbqcError> {
        let n = pattern.n;
        if input.num_qubits() != n {
            return Err(MbqcError::InputWidth {
                expected: n,
                got: input.num_qubits(),
            });
        }
        if prepared.len() != n * pattern.m {
            return Err(MbqcError::InvalidPattern("one prepared qubit per site required".into()));
        }
        let mut state = input.clone();
        let mut labels: Vec<Site> = (0..n).map(|i| (i, 0)).collect();
        for (site, q) in pattern.sites().zip(prepared) {
            state = state.tensor(q)?;
            labels.push(site);
        }
        let mut server = BlindServer { state, labels };
        for i in 0..n {
            for j in 0..pattern.m {
                server.cz((i, j), (i, j + 1))?;
            }
        }
        for &(c, a, b) in &pattern.edges {
            server.cz((a, c), (b, c))?;
        }
        Ok(server)
    }

    fn index(&self, site: Site) -> Result<usize, MbqcError> {
        self.labels.iter().position(|&s| s == site).ok_or(MbqcError::Unmeasured(site))
    }

    fn cz(&mut self, a: Site, b: Site) -> Result<(), MbqcError> {
        let (ia, ib) = (self.index(a)?, self.index(b)?);
        Ok(self.state.cz(ia, ib)?)
    }

    pub fn num_qubits(&self) -> usize {
        self.state.num_qubits()
    }

    pub fn measure<R: Rng + ?Sized>(&mut self, site: Site, angle: Angle8, rng: &mut R) -> Result<bool, MbqcError> {
        let q = self.index(site)?;
        let (o, post) = self.state.measure(q, Basis::Plane(angle), rng)?;
        self.state = post;
        self.labels.remove(q);
        Ok(o == 1)
    }

    /// Both outcome branches: (outcome, probability, server after).
    pub fn branches(&self, site: Site, angle: Angle8) -> Result<Vec<(bool, f64, BlindServer)>, MbqcError> {
        let q = self.index(site)?;
        let mut out = Vec::with_capacity(2);
        for o in [false, true] {
            let (p, post) = self.state.project(q, Basis::Plane(angle), o as u8)?;
            if let Some(state) = post {
                let mut labels = self.labels.clone();
                labels.remove(q);
                out.push((o, p, BlindServer { state, labels }));
            }
        }
        Ok(out)
    }
}
