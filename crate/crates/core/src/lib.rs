//! Sector-resolved exact diagonalisation and closed-form identities for the
//! spin-½ ferromagnetic XXZ chain with boundary fields.
//!
//! The crate builds the kink, antikink and droplet states of the chain from
//! their explicit q-geometric amplitudes, applies every Hamiltonian and
//! interval projector in a fixed-down-spin sector without storing matrices,
//! and checks the spectral statements about the droplet band numerically.
//!
//! Numerics are generic over the scalar type (anything implementing
//! [`Real`], i.e. `f32` or `f64`). The aliases at the crate root fix the
//! scalar to `f64`, which is what the verification harness and the CLI use.
//!
//! Module map:
//!
//! * [`qcore`]: q ↔ Δ conversion, boundary field A(Δ), gaps, Gaussian
//!   binomials and partition products.
//! * [`sector`]: fixed-magnetisation bases with ranking and unranking.
//! * [`operators`]: matrix-free Hamiltonians, translation, diagonal
//!   projectors and the double commutator.
//! * [`states`]: kink/droplet/ring states and the appendix closed forms.
//! * [`spectral`]: dense and Lanczos eigensolvers, Gram projectors,
//!   subspace distances.
//! * [`verify`]: named checks producing JSON-serialisable reports.

pub mod error;
pub mod linalg;
pub mod operators;
pub mod qcore;
pub mod scalar;
pub mod sector;
pub mod spectral;
pub mod states;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Real;
pub use sector::{Interval, SectorBasis, SectorVector, SpinConfiguration};

/// Anisotropy constants in double precision.
pub type Params = qcore::AnisotropyParams<f64>;
/// Hamiltonian handle in double precision.
pub type Hamiltonian = operators::Hamiltonian<f64>;
/// Sector amplitude vector in double precision.
pub type Vector = sector::SectorVector<f64>;
/// Dense matrix in double precision.
pub type Matrix = linalg::Matrix<f64>;
/// Eigensolver result in double precision.
pub type EigenResult = spectral::EigenResult<f64>;
/// Droplet family in double precision.
pub type DropletFamily = spectral::DropletFamily<f64>;
/// Orthogonal subspace projector in double precision.
pub type SubspaceProjector = spectral::SubspaceProjector<f64>;

/// Single-precision aliases, mostly useful for quick exploratory sweeps.
pub mod f32 {
    pub type Params = crate::qcore::AnisotropyParams<f32>;
    pub type Hamiltonian = crate::operators::Hamiltonian<f32>;
    pub type Vector = crate::sector::SectorVector<f32>;
    pub type Matrix = crate::linalg::Matrix<f32>;
}
