pub mod classify;
pub mod cli;
pub mod coeffs;
pub mod compact;
pub mod dual;
pub mod error;
pub mod fracop;
pub mod limit;
pub mod matrix;
pub mod report;
pub mod spaces;
pub mod tolerance;
pub mod transform;
