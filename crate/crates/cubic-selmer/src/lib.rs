//! Provable bounds on φ- and 3-Selmer groups of elliptic curves with a rational 3-isogeny.
//!
//! Two families are covered: `E_a: y² = x³ + a` and `E_{a,b}: y² = x³ + a(x - b)²`. Bounds
//! come from class groups of quadratic fields, computed here with binary quadratic forms,
//! together with finite sets of local primes. The [`cubesum`] module turns the resulting
//! Selmer dimensions into verdicts on whether `ℓ`, `2ℓ` or `ℓ²` is a sum of two rational cubes.

pub mod arith;
pub mod classgroup;
pub mod cubesum;
pub mod curves;
pub mod eisenstein;
pub mod error;
pub mod localdata;
pub mod selmer;

pub use error::{Error, Result};
