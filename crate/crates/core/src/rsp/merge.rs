use rand::Rng;

use super::RspError;
use crate::qsim::{Angle8, Basis, StateVector};

/// Bob's merge of |+_α⟩ (first run) and |+_β⟩ (second run): returns the
/// reported bit s and the surviving qubit.
pub fn bob_merge<R: Rng + ?Sized>(
    first: &StateVector,
    second: &StateVector,
    rng: &mut R,
) -> Result<(bool, StateVector), RspError> {
    let mut st = first.tensor(second)?;
    // undo the H·Rz(−π/2) correction on the second qubit
    st.h(1)?;
    st.rz(1, Angle8::QUARTER)?;
    // CNOT(0 → 1) = H₁·CZ·H₁
    st.h(1)?;
    st.cz(0, 1)?;
    st.h(1)?;
    let (s, out) = st.measure(1, Basis::Plane(Angle8::new(1)), rng)?;
    Ok((s == 1, out))
}

/// Angle of the merged qubit, given the first run's even angle α, the
/// second run's bits and Bob's reported bit.
pub fn alice_merge(alpha: Angle8, t1: bool, t2: bool, s: bool) -> Angle8 {
    if t2 {
        alpha + Angle8::new(4 * t1 as i64)
    } else {
        let shift = if t1 { 1 } else { -1 };
        alpha + Angle8::new(shift + 4 * s as i64)
    }
}
