//! Lattice arithmetic, hyper-Kähler frames, period points and equivariant
//! spectral zeta functions for K3 surfaces with an involution.

pub mod hyperkahler;
pub mod lattice;
pub mod period;
pub mod spectral;

/// Coarse classification shared by every error type in the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed or out-of-contract input.
    Input,
    /// A requested accuracy could not be reached.
    Accuracy,
    /// A geometric or consistency condition failed on otherwise valid input.
    Geometry,
}
