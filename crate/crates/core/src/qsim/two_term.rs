use num_complex::Complex64;
use rand::Rng;

use super::{BitString, QsimError, StateVector, DEFAULT_MAX_QUBITS};

const PHASE_TOL: f64 = 1e-12;
const DEGENERATE: f64 = 1e-12;

/// (|a⟩ + phase·|b⟩)/√2 over `a.len()` qubits, stored sparsely.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoTermState {
    a: BitString,
    b: BitString,
    phase: Complex64,
}

/// What remains after measuring a bit of a two-term state: either still two
/// terms, or (after interference) a single basis state with a phase.
#[derive(Clone, Debug, PartialEq)]
pub enum SparseState {
    Two(TwoTermState),
    Basis { bits: BitString, phase: Complex64 },
}

impl TwoTermState {
    pub fn new(a: BitString, b: BitString, phase: Complex64) -> Result<Self, QsimError> {
        if a.len() != b.len() {
            return Err(QsimError::WidthMismatch(a.len(), b.len()));
        }
        if a == b {
            return Err(QsimError::Degenerate);
        }
        if (phase.norm() - 1.0).abs() > PHASE_TOL {
            return Err(QsimError::NotUnitPhase);
        }
        Ok(TwoTermState { a, b, phase })
    }

    pub fn width(&self) -> usize {
        self.a.len()
    }

    pub fn basis_a(&self) -> &BitString {
        &self.a
    }

    pub fn basis_b(&self) -> &BitString {
        &self.b
    }

    pub fn relative_phase(&self) -> Complex64 {
        self.phase
    }

    /// Appends a fresh |0⟩ qubit at the highest index.
    pub fn push_zero(&mut self) {
        self.a.push(false);
        self.b.push(false);
    }

    pub fn cnot(&mut self, control: usize, target: usize) -> Result<(), QsimError> {
        self.check(control)?;
        self.check(target)?;
        if control == target {
            return Err(QsimError::DuplicateTarget(target));
        }
        for s in [&mut self.a, &mut self.b] {
            if s.get(control) {
                s.flip(target);
            }
        }
        Ok(())
    }

    fn check(&self, q: usize) -> Result<(), QsimError> {
        if q >= self.width() {
            Err(QsimError::IndexOutOfRange {
                index: q,
                num_qubits: self.width(),
            })
        } else {
            Ok(())
        }
    }

    /// Probability of X-basis outcome `o` on `q` and the state with `q` removed.
    pub fn project_x(&self, q: usize, o: u8) -> Result<(f64, Option<SparseState>), QsimError> {
        self.check(q)?;
        let sign = |x: bool| if o == 1 && x { -1.0 } else { 1.0 };
        let a2 = self.a.without(q);
        let b2 = self.b.without(q);
        let ca = sign(self.a.get(q));
        let cb = sign(self.b.get(q));
        if a2 != b2 {
            // amplitudes stay ca/2, cb·phase/2; renormalise by √2
            let phase = self.phase * (ca * cb);
            return Ok((
                0.5,
                Some(SparseState::Two(TwoTermState { a: a2, b: b2, phase })),
            ));
        }
        let amp = (Complex64::new(ca, 0.0) + self.phase * cb) * 0.5;
        let p = amp.norm_sqr();
        if p < DEGENERATE {
            return Ok((p, None));
        }
        Ok((
            p,
            Some(SparseState::Basis {
                bits: a2,
                phase: amp / amp.norm(),
            }),
        ))
    }

    /// Law of the outcome string when every qubit except `keep` is measured in
    /// the X basis (outcomes listed in increasing qubit order).
    pub fn x_law(&self, keep: usize) -> Result<XLaw, QsimError> {
        self.check(keep)?;
        let mask = self.a.xor(&self.b).without(keep);
        let width = self.width() - 1;
        if self.a.get(keep) != self.b.get(keep) || mask.is_zero() {
            return Ok(XLaw::uniform(width));
        }
        let p_even = (Complex64::new(1.0, 0.0) + self.phase).norm_sqr() / 4.0;
        Ok(XLaw { width, mask, p_even })
    }

    /// Qubit `keep` after the others are measured in X with outcomes `w`,
    /// or `None` if `w` has probability zero.
    pub fn residual_after_x(&self, keep: usize, w: &BitString) -> Result<Option<StateVector>, QsimError> {
        self.check(keep)?;
        if w.len() + 1 != self.width() {
            return Err(QsimError::WidthMismatch(w.len() + 1, self.width()));
        }
        let sa = if w.dot(&self.a.without(keep)) { -1.0 } else { 1.0 };
        let sb = if w.dot(&self.b.without(keep)) { -1.0 } else { 1.0 };
        let mut amps = [Complex64::new(0.0, 0.0); 2];
        amps[self.a.get(keep) as usize] += sa;
        amps[self.b.get(keep) as usize] += self.phase * sb;
        if amps.iter().map(|c| c.norm_sqr()).sum::<f64>() < DEGENERATE {
            return Ok(None);
        }
        StateVector::from_amplitudes(amps.to_vec()).map(Some)
    }

    pub fn to_dense(&self) -> Result<StateVector, QsimError> {
        two_term_to_dense(self)
    }
}

impl SparseState {
    pub fn width(&self) -> usize {
        match self {
            SparseState::Two(t) => t.width(),
            SparseState::Basis { bits, .. } => bits.len(),
        }
    }

    pub fn project_x(&self, q: usize, o: u8) -> Result<(f64, Option<SparseState>), QsimError> {
        match self {
            SparseState::Two(t) => t.project_x(q, o),
            SparseState::Basis { bits, phase } => {
                if q >= bits.len() {
                    return Err(QsimError::IndexOutOfRange {
                        index: q,
                        num_qubits: bits.len(),
                    });
                }
                let sign = if o == 1 && bits.get(q) { -1.0 } else { 1.0 };
                Ok((
                    0.5,
                    Some(SparseState::Basis {
                        bits: bits.without(q),
                        phase: phase * sign,
                    }),
                ))
            }
        }
    }

    /// Samples an X-basis measurement of `q`, removing it.
    pub fn measure_x<R: Rng + ?Sized>(&self, q: usize, rng: &mut R) -> Result<(u8, SparseState), QsimError> {
        let (p0, s0) = self.project_x(q, 0)?;
        let (_, s1) = self.project_x(q, 1)?;
        let u: f64 = rng.gen();
        match (s0, s1) {
            (Some(s0), Some(s1)) => Ok(if u < p0 { (0, s0) } else { (1, s1) }),
            (Some(s0), None) => Ok((0, s0)),
            (None, Some(s1)) => Ok((1, s1)),
            (None, None) => Err(QsimError::Degenerate),
        }
    }

    pub fn to_dense(&self) -> Result<StateVector, QsimError> {
        match self {
            SparseState::Two(t) => t.to_dense(),
            SparseState::Basis { bits, phase } => {
                check_dense_width(bits.len())?;
                let mut amps = vec![Complex64::new(0.0, 0.0); 1 << bits.len()];
                amps[bits.as_u64().unwrap_or(0) as usize] = *phase;
                StateVector::from_amplitudes(amps)
            }
        }
    }
}

fn check_dense_width(n: usize) -> Result<(), QsimError> {
    if n > DEFAULT_MAX_QUBITS {
        return Err(QsimError::TooManyQubits {
            requested: n,
            limit: DEFAULT_MAX_QUBITS,
        });
    }
    Ok(())
}

pub fn two_term_to_dense(t: &TwoTermState) -> Result<StateVector, QsimError> {
    let n = t.width();
    check_dense_width(n)?;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
    amps[t.a.as_u64().unwrap_or(0) as usize] += r;
    amps[t.b.as_u64().unwrap_or(0) as usize] += t.phase * r;
    StateVector::from_amplitudes(amps)
}

/// Law of an X-basis outcome string w of `width` bits:
/// Pr(w) = 2^{-(width-1)}·(p_even if w·mask = 0 else 1 − p_even).
/// A zero mask means uniform.
#[derive(Clone, Debug, PartialEq)]
pub struct XLaw {
    pub width: usize,
    pub mask: BitString,
    pub p_even: f64,
}

impl XLaw {
    pub fn uniform(width: usize) -> XLaw {
        XLaw {
            width,
            mask: BitString::zeros(width),
            p_even: 0.5,
        }
    }

    pub fn is_uniform(&self) -> bool {
        self.mask.is_zero() || (self.p_even - 0.5).abs() < 1e-15
    }

    pub fn prob(&self, w: &BitString) -> f64 {
        let base = 0.5f64.powi(self.width as i32);
        if self.is_uniform() {
            return base;
        }
        let p = if w.dot(&self.mask) { 1.0 - self.p_even } else { self.p_even };
        2.0 * base * p
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BitString {
        let mut w = BitString::zeros(0);
        for _ in 0..self.width {
            w.push(rng.gen::<bool>());
        }
        if self.is_uniform() {
            return w;
        }
        let odd = !rng.gen_bool(self.p_even.clamp(0.0, 1.0));
        if w.dot(&self.mask) != odd {
            let first = self.mask.ones().next().expect("nonzero mask");
            w.flip(first);
        }
        w
    }

    /// Exact total variation distance, computed over parity cells.
    pub fn tv(&self, other: &XLaw) -> f64 {
        assert_eq!(self.width, other.width, "laws over different widths");
        match (self.is_uniform(), other.is_uniform()) {
            (true, true) => 0.0,
            (false, true) => (self.p_even - 0.5).abs(),
            (true, false) => (other.p_even - 0.5).abs(),
            (false, false) if self.mask == other.mask => (self.p_even - other.p_even).abs(),
            (false, false) => {
                let p = [self.p_even, 1.0 - self.p_even];
                let q = [other.p_even, 1.0 - other.p_even];
                let mut s = 0.0;
                for pi in p {
                    for qj in q {
                        s += (pi - qj).abs();
                    }
                }
                s / 4.0
            }
        }
    }
}
