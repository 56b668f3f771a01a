pub mod error;
pub mod fock;
pub mod modeset;
pub mod operator;
pub mod structured;
pub mod cfrd;
pub mod moments;
pub mod search;
pub mod cli;
