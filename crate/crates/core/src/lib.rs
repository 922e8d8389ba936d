pub mod arith;
pub mod cli;
pub mod hypermatrix;
pub mod construction;
pub mod majority;
pub mod rng;
pub mod sim;
