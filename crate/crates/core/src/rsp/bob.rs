use num_complex::Complex64;
use super::RspError;
use crate::lattice::{encode, eval_f, hardcore, search_preimages, Preimage, PublicKey, TrapdoorKeypair};
use crate::primitives::CoinSource;
use crate::qsim::{Angle8, BitString, SparseState, StateVector, TwoTermState, XLaw};

const MAX_DRAWS: u32 = 10_000;

/// How the classical-shortcut Bob learns the second preimage of y.
#[derive(Clone, Debug)]
pub enum SiblingSource {
    /// Exhaustive search over (s, c, d); small q^n only.
    Search,
    /// A trapdoor handed over for testing at large parameters.
    Trapdoor(Box<TrapdoorKeypair>),
}

#[derive(Clone, Debug)]
pub enum BobBackend {
    Quantum,
    Shortcut(SiblingSource),
}

#[derive(Clone, Debug)]
pub struct RspBobOutput {
    pub state: StateVector,
    pub y: Vec<u32>,
    pub w: BitString,
    /// Draws discarded because y had a number of preimages other than two.
    pub resamples: u32,
}

pub fn rsp_bob(pk: &PublicKey, backend: &BobBackend, coins: &mut CoinSource) -> Result<RspBobOutput, RspError> {
    match backend {
        BobBackend::Quantum => rsp_bob_quantum(pk, coins),
        BobBackend::Shortcut(src) => rsp_bob_shortcut(pk, src, coins),
    }
}

/// Draws domain points until y = f_k(z) has exactly two preimages.
fn sample_image(
    pk: &PublicKey,
    src: &SiblingSource,
    coins: &mut CoinSource,
) -> Result<(Vec<u32>, Preimage, Preimage, u32), RspError> {
    for draw in 0..MAX_DRAWS {
        let z = Preimage::sample(&pk.params, coins);
        let y = eval_f(pk, &z)?;
        let pre = match src {
            SiblingSource::Search => search_preimages(pk, &y).map_err(|_| RspError::NoSibling)?,
            SiblingSource::Trapdoor(kp) => kp.preimages(&y)?,
        };
        if let [a, b] = pre.as_slice() {
            return Ok((y, a.clone(), b.clone(), draw));
        }
    }
    Err(RspError::ResampleLimit(MAX_DRAWS))
}

/// (|x⟩|h(x)⟩ + |x′⟩|h(x′)⟩)/√2: the register after the CNOT from the d bit
/// onto a fresh target at index W.
fn entangled_register(pk: &PublicKey, x: &Preimage, x2: &Preimage) -> Result<TwoTermState, RspError> {
    let p = &pk.params;
    let mut t = TwoTermState::new(encode(p, x), encode(p, x2), Complex64::new(1.0, 0.0))?;
    let w = p.preimage_width();
    t.push_zero();
    t.cnot(w - 1, w)?;
    Ok(t)
}

fn correct(mut target: StateVector) -> Result<StateVector, RspError> {
    target.rz(0, Angle8::new(-2))?;
    target.h(0)?;
    Ok(target)
}

/// Simulated quantum Bob. The image register is collapsed classically, after
/// which only the two-term preimage superposition is held and measured
/// qubit by qubit.
pub fn rsp_bob_quantum(pk: &PublicKey, coins: &mut CoinSource) -> Result<RspBobOutput, RspError> {
    rsp_bob_quantum_with(pk, &SiblingSource::Search, coins)
}

/// Simulated quantum Bob whose image-register collapse is computed through
/// `src`; lets the simulation run where exhaustive search is too slow.
pub fn rsp_bob_quantum_with(pk: &PublicKey, src: &SiblingSource, coins: &mut CoinSource) -> Result<RspBobOutput, RspError> {
    let (y, x, x2, resamples) = sample_image(pk, src, coins)?;
    let mut state = SparseState::Two(entangled_register(pk, &x, &x2)?);
    let width = pk.params.preimage_width();
    let mut w = BitString::zeros(0);
    for _ in 0..width {
        // measured qubits are removed, so the next register qubit is always 0
        let (o, next) = state.measure_x(0, coins)?;
        w.push(o == 1);
        state = next;
    }
    Ok(RspBobOutput {
        state: correct(state.to_dense()?)?,
        y,
        w,
        resamples,
    })
}

/// Classical Bob with the same transcript law: w is drawn from the exact
/// outcome law of the X measurement and the target state is written down
/// from the closed form.
pub fn rsp_bob_shortcut(pk: &PublicKey, src: &SiblingSource, coins: &mut CoinSource) -> Result<RspBobOutput, RspError> {
    let (y, x, x2, resamples) = sample_image(pk, src, coins)?;
    let law = shortcut_w_law(pk, &x, &x2);
    let w = law.sample(coins);
    let reg = entangled_register(pk, &x, &x2)?;
    let target = reg
        .residual_after_x(pk.params.preimage_width(), &w)?
        .expect("sampled outcome has positive probability");
    Ok(RspBobOutput {
        state: correct(target)?,
        y,
        w,
        resamples,
    })
}

/// Law of w from the simulated register.
pub fn quantum_w_law(pk: &PublicKey, x: &Preimage, x2: &Preimage) -> Result<XLaw, RspError> {
    Ok(entangled_register(pk, x, x2)?.x_law(pk.params.preimage_width())?)
}

/// Law of w written down directly: uniform when the hardcore bits differ,
/// otherwise uniform on {w : ⟨w, x⊕x′⟩ = 0}.
pub fn shortcut_w_law(pk: &PublicKey, x: &Preimage, x2: &Preimage) -> XLaw {
    let p = &pk.params;
    if hardcore(x) != hardcore(x2) {
        return XLaw::uniform(p.preimage_width());
    }
    XLaw {
        width: p.preimage_width(),
        mask: encode(p, x).xor(&encode(p, x2)),
        p_even: 1.0,
    }
}

