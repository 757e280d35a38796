//! Kink, antikink, droplet and ring-droplet states, and the closed-form
//! norms, overlaps and projector expectations that describe them.
//!
//! States carry their raw q-power coefficients; normalisation happens at
//! the point of use.

mod droplet;
mod kink;
mod projform;
mod ring;
mod two_site;

pub use droplet::{
    build_droplet, droplet_overlap, droplet_overlap_closed, droplet_residual, pair_overlap_closed,
    pair_overlap_direct, pair_overlap_normalized_closed, split_projection_distance, DropletOverlap,
    DropletResidual, DropletSpec,
};
pub use kink::{
    build_kink, coproduct_check, kink_exponent, kink_norm_sq_closed, mixed_overlap_closed, KinkKind, KinkSpec,
};
pub use projform::{
    g_expectation_closed, g_expectation_direct, projform_direct, projform_expectation, projform_exponent,
};
pub use ring::{ring_droplet, ring_translation_overlap_closed, ring_translation_overlap_direct, RingDropletSpec};
pub use two_site::{two_site_table_closed, two_site_table_direct, TwoSiteEntry};
