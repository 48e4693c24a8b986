pub mod claims;
pub mod classify;
pub mod closedform;
pub mod ffpoly;
pub mod newton;
pub mod qrat;
pub mod report;
pub mod ring;

pub use ring::{Modulus, PrimeModulus, RingError, TruncatedValuation};
