//! Exact computational machinery for studying proximity gaps and
//! correlated agreement of random linear codes in the
//! parity-check-matrix model.
//!
//! Everything here is exact: field arithmetic in GF(q) for prime powers
//! q ≤ 2^16, Gaussian elimination, syndrome-ball membership with
//! re-verifiable witnesses, witness-matrix rank reduction with retained
//! column certificates, brute-force correlated-agreement deciders, and
//! explicit parameter planning at arbitrary precision. Randomized parts
//! (code sampling, Monte Carlo trials) are driven by seeded streams so
//! experiments reproduce bit-exactly.

pub mod adversarial;
pub mod agreement;
pub mod ball;
pub mod codes;
pub mod combin;
pub mod field;
pub mod geometry;
pub mod harness;
pub mod linalg;
pub mod planner;
pub mod seeds;
pub mod witness;

pub use codes::{Distance, LinearCode};
pub use field::Field;
pub use linalg::{Matrix, Vector};
