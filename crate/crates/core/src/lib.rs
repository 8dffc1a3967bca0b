pub mod abelian;
pub mod cli;
pub mod constructions;
pub mod derived;
pub mod format;
pub mod poset;
pub mod random;
pub mod sets;
