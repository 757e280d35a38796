//! Matrix-free Hamiltonians, translation, diagonal interval projectors and
//! the double commutator, all acting inside a fixed-magnetisation sector.

mod commutator;
mod hamiltonian;
mod projector;
mod translate;

pub use commutator::{double_commutator_apply, double_commutator_closed_form, flip_bond};
pub use hamiltonian::{
    assemble_dense, cut_identity_residual, dense_cap, Boundary, Field, Hamiltonian, SectorHamiltonian,
    DEFAULT_DENSE_CAP,
};
pub use projector::{apply_projector, Block, GeneralizedSectorProjector, Projector, Spin};
pub use translate::{translate, translate_by};
