use num_complex::Complex64;
use rand::Rng;

use super::{Angle8, QsimError};

/// Largest register the dense simulator accepts unless told otherwise.
pub const DEFAULT_MAX_QUBITS: usize = 24;

const NORM_TOL: f64 = 1e-9;
const DEGENERATE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    H,
    X,
    Z,
    Cz,
    Rz(Angle8),
    Rx(Angle8),
}

impl Gate {
    fn arity(self) -> usize {
        match self {
            Gate::Cz => 2,
            _ => 1,
        }
    }

    fn matrix(self) -> [[Complex64; 2]; 2] {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            Gate::H => [[one * r, one * r], [one * r, -one * r]],
            Gate::X => [[zero, one], [one, zero]],
            Gate::Z => [[one, zero], [zero, -one]],
            Gate::Rz(a) => [[one, zero], [zero, Complex64::from_polar(1.0, a.radians())]],
            Gate::Rx(a) => {
                let e = Complex64::from_polar(1.0, a.radians());
                [[(one + e) * 0.5, (one - e) * 0.5], [(one - e) * 0.5, (one + e) * 0.5]]
            }
            Gate::Cz => unreachable!("two-qubit gate has no 2x2 matrix"),
        }
    }
}

/// Single-qubit measurement basis: computational, or the (X,Y)-plane basis
/// {|+_a⟩, |−_a⟩} with outcome 0 for |+_a⟩.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    Z,
    Plane(Angle8),
}

impl Basis {
    pub const X: Basis = Basis::Plane(Angle8::ZERO);
}

/// One leaf of a measurement plan.
#[derive(Clone, Debug)]
pub struct Branch {
    pub outcomes: Vec<u8>,
    pub probability: f64,
    /// `None` marks a zero-probability branch.
    pub residual: Option<StateVector>,
}

/// Dense state on `num_qubits` qubits. Qubit `k` is bit `k` of the amplitude
/// index (little-endian).
#[derive(Clone, Debug)]
pub struct StateVector {
    amps: Vec<Complex64>,
    num_qubits: usize,
}

impl StateVector {
    /// |0…0⟩.
    pub fn zero(num_qubits: usize) -> Result<Self, QsimError> {
        Self::basis(num_qubits, 0)
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<Self, QsimError> {
        check_width(num_qubits, DEFAULT_MAX_QUBITS)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        if index >= amps.len() {
            return Err(QsimError::IndexOutOfRange { index, num_qubits });
        }
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { amps, num_qubits })
    }

    /// Normalised copy of `amps`; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, QsimError> {
        Self::from_amplitudes_with_limit(amps, DEFAULT_MAX_QUBITS)
    }

    pub fn from_amplitudes_with_limit(mut amps: Vec<Complex64>, limit: usize) -> Result<Self, QsimError> {
        if amps.is_empty() || !amps.len().is_power_of_two() {
            return Err(QsimError::BadLength(amps.len()));
        }
        let num_qubits = amps.len().trailing_zeros() as usize;
        check_width(num_qubits, limit)?;
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < DEGENERATE {
            return Err(QsimError::Degenerate);
        }
        for a in &mut amps {
            *a /= norm;
        }
        Ok(StateVector { amps, num_qubits })
    }

    /// |+_a⟩ = (|0⟩ + e^{iaπ/4}|1⟩)/√2.
    pub fn plus(angle: Angle8) -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        StateVector {
            amps: vec![Complex64::new(r, 0.0), Complex64::from_polar(r, angle.radians())],
            num_qubits: 1,
        }
    }

    /// The zero-qubit state (scalar 1), what remains after measuring everything.
    pub fn empty() -> Self {
        StateVector {
            amps: vec![Complex64::new(1.0, 0.0)],
            num_qubits: 0,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `self ⊗ other` with `self` on the low qubit indices.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector, QsimError> {
        let n = self.num_qubits + other.num_qubits;
        check_width(n, DEFAULT_MAX_QUBITS)?;
        let mut amps = Vec::with_capacity(1 << n);
        for b in &other.amps {
            for a in &self.amps {
                amps.push(a * b);
            }
        }
        Ok(StateVector { amps, num_qubits: n })
    }

    pub fn apply(&mut self, gate: Gate, targets: &[usize]) -> Result<(), QsimError> {
        if targets.len() != gate.arity() {
            return Err(QsimError::Arity {
                expected: gate.arity(),
                got: targets.len(),
            });
        }
        for (i, &t) in targets.iter().enumerate() {
            if t >= self.num_qubits {
                return Err(QsimError::IndexOutOfRange {
                    index: t,
                    num_qubits: self.num_qubits,
                });
            }
            if targets[..i].contains(&t) {
                return Err(QsimError::DuplicateTarget(t));
            }
        }
        match gate {
            Gate::Cz => {
                let mask = (1 << targets[0]) | (1 << targets[1]);
                for (idx, a) in self.amps.iter_mut().enumerate() {
                    if idx & mask == mask {
                        *a = -*a;
                    }
                }
            }
            _ => self.apply_1q(gate.matrix(), targets[0]),
        }
        Ok(())
    }

    fn apply_1q(&mut self, m: [[Complex64; 2]; 2], q: usize) {
        let bit = 1 << q;
        for idx in 0..self.amps.len() {
            if idx & bit == 0 {
                let a0 = self.amps[idx];
                let a1 = self.amps[idx | bit];
                self.amps[idx] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[idx | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    pub fn h(&mut self, q: usize) -> Result<(), QsimError> {
        self.apply(Gate::H, &[q])
    }

    pub fn x(&mut self, q: usize) -> Result<(), QsimError> {
        self.apply(Gate::X, &[q])
    }

    pub fn z(&mut self, q: usize) -> Result<(), QsimError> {
        self.apply(Gate::Z, &[q])
    }

    pub fn cz(&mut self, a: usize, b: usize) -> Result<(), QsimError> {
        self.apply(Gate::Cz, &[a, b])
    }

    pub fn rz(&mut self, q: usize, a: Angle8) -> Result<(), QsimError> {
        self.apply(Gate::Rz(a), &[q])
    }

    pub fn rx(&mut self, q: usize, a: Angle8) -> Result<(), QsimError> {
        self.apply(Gate::Rx(a), &[q])
    }

    /// Rotates `q` so that the chosen basis becomes the computational one.
    fn rotate_into_z(&mut self, q: usize, basis: Basis) -> Result<(), QsimError> {
        if let Basis::Plane(a) = basis {
            self.rz(q, -a)?;
            self.h(q)?;
        }
        Ok(())
    }

    /// Probability of `outcome` and the renormalised state with `q` removed
    /// (`None` if the branch has probability below 1e-12).
    pub fn project(&self, q: usize, basis: Basis, outcome: u8) -> Result<(f64, Option<StateVector>), QsimError> {
        if q >= self.num_qubits {
            return Err(QsimError::IndexOutOfRange {
                index: q,
                num_qubits: self.num_qubits,
            });
        }
        let mut rotated = self.clone();
        rotated.rotate_into_z(q, basis)?;
        Ok(rotated.project_z(q, outcome))
    }

    fn project_z(&self, q: usize, outcome: u8) -> (f64, Option<StateVector>) {
        let bit = 1usize << q;
        let want = if outcome == 1 { bit } else { 0 };
        // kept indices come out in increasing order, which is exactly the
        // compressed index with q removed
        let amps: Vec<Complex64> = (0..self.amps.len())
            .filter(|idx| idx & bit == want)
            .map(|idx| self.amps[idx])
            .collect();
        let mut amps = amps;
        let p: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if p < DEGENERATE {
            return (p.max(0.0), None);
        }
        let s = p.sqrt();
        for a in &mut amps {
            *a /= s;
        }
        (
            p,
            Some(StateVector {
                amps,
                num_qubits: self.num_qubits - 1,
            }),
        )
    }

    /// Samples a measurement of `q` and removes it from the register.
    pub fn measure<R: Rng + ?Sized>(&self, q: usize, basis: Basis, rng: &mut R) -> Result<(u8, StateVector), QsimError> {
        let (p0, s0) = self.project(q, basis, 0)?;
        let (p1, s1) = self.project(q, basis, 1)?;
        if s0.is_none() && s1.is_none() {
            return Err(QsimError::Degenerate);
        }
        let u: f64 = rng.gen();
        let outcome = if u * (p0 + p1) < p0 { 0 } else { 1 };
        let post = if outcome == 0 { s0 } else { s1 };
        match post {
            Some(s) => Ok((outcome, s)),
            // u landed on a branch of probability < 1e-12; take the other one
            None => {
                let other = 1 - outcome;
                let (_, s) = self.project(q, basis, other)?;
                Ok((other, s.expect("one branch is non-degenerate")))
            }
        }
    }

    pub fn measure_z<R: Rng + ?Sized>(&self, q: usize, rng: &mut R) -> Result<(u8, StateVector), QsimError> {
        self.measure(q, Basis::Z, rng)
    }

    pub fn measure_in_plane<R: Rng + ?Sized>(&self, q: usize, angle: Angle8, rng: &mut R) -> Result<(u8, StateVector), QsimError> {
        self.measure(q, Basis::Plane(angle), rng)
    }

    /// All 2^|plan| outcome branches. Plan entries name qubits by their index
    /// in `self`; removal of earlier-measured qubits is accounted for.
    pub fn enumerate_branches(&self, plan: &[(usize, Basis)]) -> Result<Vec<Branch>, QsimError> {
        for (i, (q, _)) in plan.iter().enumerate() {
            if *q >= self.num_qubits {
                return Err(QsimError::IndexOutOfRange {
                    index: *q,
                    num_qubits: self.num_qubits,
                });
            }
            if plan[..i].iter().any(|(p, _)| p == q) {
                return Err(QsimError::DuplicateTarget(*q));
            }
        }
        let mut out = Vec::with_capacity(1 << plan.len());
        let mut prefix = Vec::with_capacity(plan.len());
        self.branch_rec(plan, 0, Some(self.clone()), 1.0, &mut prefix, &mut out)?;
        Ok(out)
    }

    fn branch_rec(
        &self,
        plan: &[(usize, Basis)],
        depth: usize,
        state: Option<StateVector>,
        prob: f64,
        prefix: &mut Vec<u8>,
        out: &mut Vec<Branch>,
    ) -> Result<(), QsimError> {
        if depth == plan.len() {
            out.push(Branch {
                outcomes: prefix.clone(),
                probability: if state.is_some() { prob } else { 0.0 },
                residual: state,
            });
            return Ok(());
        }
        let (orig, basis) = plan[depth];
        let shift = plan[..depth].iter().filter(|(p, _)| *p < orig).count();
        for outcome in 0..2u8 {
            let (p, next) = match &state {
                Some(s) => s.project(orig - shift, basis, outcome)?,
                None => (0.0, None),
            };
            prefix.push(outcome);
            self.branch_rec(plan, depth + 1, next, prob * p, prefix, out)?;
            prefix.pop();
        }
        Ok(())
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64, QsimError> {
        if self.num_qubits != other.num_qubits {
            return Err(QsimError::WidthMismatch(self.num_qubits, other.num_qubits));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// |⟨self|other⟩|².
    pub fn fidelity(&self, other: &StateVector) -> Result<f64, QsimError> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Equality up to global phase.
    pub fn approx_eq(&self, other: &StateVector, tol: f64) -> bool {
        self.inner(other).map(|c| (1.0 - c.norm()).abs() <= tol).unwrap_or(false)
    }

    /// Computational-basis probability of every index.
    pub fn z_probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOL
    }
}

fn check_width(n: usize, limit: usize) -> Result<(), QsimError> {
    if n > limit {
        Err(QsimError::TooManyQubits { requested: n, limit })
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hadamard_on_zero() {
        let mut s = StateVector::zero(1).unwrap();
        s.h(0).unwrap();
        assert!(s.approx_eq(&StateVector::plus(Angle8::ZERO), 1e-12));
    }

    #[test]
    fn cz_on_11() {
        let mut s = StateVector::basis(2, 3).unwrap();
        s.cz(0, 1).unwrap();
        assert!((s.amplitudes()[3] - c(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn rz_quarter_turn() {
        let mut s = StateVector::plus(Angle8::ZERO);
        s.rz(0, Angle8::new(2)).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let want = StateVector::from_amplitudes(vec![c(r, 0.0), c(0.0, r)]).unwrap();
        assert!(s.approx_eq(&want, 1e-12));
    }

    #[test]
    fn rx_is_conjugated_rz() {
        for a in Angle8::all() {
            let mut u = StateVector::from_amplitudes(vec![c(0.6, 0.1), c(0.3, -0.7)]).unwrap();
            let mut v = u.clone();
            u.rx(0, a).unwrap();
            v.h(0).unwrap();
            v.rz(0, a).unwrap();
            v.h(0).unwrap();
            assert!(u.approx_eq(&v, 1e-12));
        }
    }

    #[test]
    fn errors_are_typed() {
        let mut s = StateVector::zero(2).unwrap();
        assert!(matches!(s.apply(Gate::H, &[2]), Err(QsimError::IndexOutOfRange { .. })));
        assert!(matches!(s.apply(Gate::Cz, &[0]), Err(QsimError::Arity { .. })));
        assert!(matches!(s.apply(Gate::Cz, &[1, 1]), Err(QsimError::DuplicateTarget(1))));
        assert!(matches!(StateVector::zero(25), Err(QsimError::TooManyQubits { .. })));
    }

    #[test]
    fn measuring_one_is_certain() {
        let s = StateVector::basis(1, 1).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let (o, post) = s.measure_z(0, &mut rng).unwrap();
        assert_eq!(o, 1);
        assert_eq!(post.num_qubits(), 0);
    }

    #[test]
    fn plane_measurement_examples() {
        for d in Angle8::all() {
            let (p0, _) = StateVector::plus(d).project(0, Basis::Plane(d), 0).unwrap();
            assert!((p0 - 1.0).abs() < 1e-12);
        }
        let (p1, _) = StateVector::plus(Angle8::ZERO).project(0, Basis::Plane(Angle8::HALF), 1).unwrap();
        assert!((p1 - 1.0).abs() < 1e-12);
        let (p0, _) = StateVector::plus(Angle8::QUARTER).project(0, Basis::X, 0).unwrap();
        assert!((p0 - 0.5).abs() < 1e-12);
        let (p0, _) = StateVector::plus(Angle8::QUARTER).project(0, Basis::Z, 0).unwrap();
        assert!((p0 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn product_state_measurement_keeps_other_qubit() {
        let s = StateVector::plus(Angle8::ZERO).tensor(&StateVector::zero(1).unwrap()).unwrap();
        for o in 0..2 {
            let (p, post) = s.project(0, Basis::Z, o).unwrap();
            assert!((p - 0.5).abs() < 1e-12);
            assert!(post.unwrap().approx_eq(&StateVector::zero(1).unwrap(), 1e-12));
        }
    }

    #[test]
    fn enumeration_flags_impossible_branch() {
        let b = StateVector::zero(1).unwrap().enumerate_branches(&[(0, Basis::Z)]).unwrap();
        assert_eq!(b.len(), 2);
        assert!((b[0].probability - 1.0).abs() < 1e-12 && b[0].residual.is_some());
        assert_eq!(b[1].probability, 0.0);
        assert!(b[1].residual.is_none());
    }

    #[test]
    fn bell_correlations() {
        let mut s = StateVector::zero(2).unwrap();
        s.h(0).unwrap();
        s.h(1).unwrap();
        s.cz(0, 1).unwrap();
        s.h(1).unwrap();
        let b = s.enumerate_branches(&[(0, Basis::Z), (1, Basis::Z)]).unwrap();
        let probs: Vec<f64> = b.iter().map(|b| b.probability).collect();
        for (p, want) in probs.iter().zip([0.5, 0.0, 0.0, 0.5]) {
            assert!((p - want).abs() < 1e-12);
        }
    }

    #[test]
    fn plan_indices_refer_to_original_qubits() {
        // qubit 2 is |1>, others |0>; measure 0 first, then 2, then 1
        let s = StateVector::basis(3, 0b100).unwrap();
        let b = s
            .enumerate_branches(&[(0, Basis::Z), (2, Basis::Z), (1, Basis::Z)])
            .unwrap();
        let hit: Vec<_> = b.iter().filter(|b| b.probability > 0.5).collect();
        assert_eq!(hit.len(), 1);
        assert_eq!(hit[0].outcomes, vec![0, 1, 0]);
    }
}
