//! Trapdoor function family for remote state preparation.
//!
//! g(s, e, d) = K′s + e + d·(q/2)·u is injective with a gadget trapdoor
//! K′ = [Ā ; RᵀĀ + Gᵀ]; f_k(s, e, c, d) = g(s, e, d) + c·y0 with
//! y0 = g(s0, e0, d0) is two-to-one wherever both shifts keep e inside the
//! error box. Errors are uniform in an integer box, not Gaussian.

mod domain;
mod keys;
mod params;

pub use domain::{for_each_domain_point, image_census, pack_image, regularity, unpack_image, RegularityReport};
pub use keys::{
    decode, encode, eval_f, gen, hardcore, injectivity_margin, search_preimages, Preimage, PublicKey, Trapdoor,
    TrapdoorKeypair,
};
pub use params::{LatticeParams, Profile};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("dimension mismatch")]
    Dimension,
    #[error("{0} out of range")]
    OutOfRange(&'static str),
    #[error("not in the image of f_k")]
    NotInImage,
    #[error("expected two preimages, found {0}")]
    PreimageCount(usize),
    #[error("malformed key bytes")]
    Malformed,
    #[error("exhaustive search infeasible for these parameters")]
    SearchInfeasible,
}

#[cfg(test)]
mod tests;
