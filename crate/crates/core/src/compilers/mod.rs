//! Two generic compilers with runnable instantiations: one-sided to full
//! simulation (Bob commits to a classical description of his input and
//! proves his inner messages consistent with it), and the compiler that
//! turns a classically verifiable proof of quantum knowledge with
//! message-independent verifier into a zero-knowledge one (prover messages
//! travel encrypted under a committed key).

mod fullsim;
mod zkpoqk;

pub use fullsim::{
    fullsim_alice, fullsim_bob, FullSimBobConfig, FullSimBobStrategy, InnerConsistency, InnerStatement, InnerWitness,
    StateDescription, MSG_FS_COMMIT, MSG_FS_ZK,
};
pub use zkpoqk::{
    check_message_independence, toy_accepts, toy_extract, zkpoqk_extract, zkpoqk_prover, zkpoqk_verifier,
    AdaptiveMockVerifier, EncryptedTranscript, FinalStatement, ProverOutput, ProverStrategy, SeededVerifier, ToyInstance,
    ToyProver, ToyVerifier, VerifierOutput, MSG_COMSK, MSG_ENC, MSG_FINAL, MSG_VMSG, TOY_MSG_LEN,
};

#[cfg(test)]
mod tests;
