pub mod qsim;
pub mod primitives;
pub mod lattice;
pub mod zk;
pub mod channel;
pub mod rsp;
pub mod mbqc;
pub mod protocols;
pub mod compilers;
pub mod harness;
