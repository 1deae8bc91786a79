pub mod algebra;
pub mod ck;
pub mod cli;
pub mod dsl;
mod lex;
pub mod poly;
pub mod rmatrix;
pub mod sparse;
pub mod ybe;
