//! Projective billiards.
//!
//! A projective billiard is a domain whose boundary carries, at every point,
//! a transverse line (the *frame*). A line hitting the boundary is reflected
//! by the unique projective involution of the pencil at the impact point that
//! fixes the tangent hyperplane and the frame line. Euclidean billiards are
//! the case where the frame is the normal line.
//!
//! Modules:
//!
//! * [`projective`]: homogeneous points, cross-ratios, harmonic quadruples,
//!   quadrics and polarity, isotropy of complex lines.
//! * [`reflect`]: the reflection law, frames (metric, central, quadric),
//!   billiard maps and orbits.
//! * [`caustics`]: exact Cayley-type polynomials whose roots are the
//!   parameters of confocal conics serving as `n`-periodic caustics,
//!   Joachimsthal invariant, Poncelet closure.
//! * [`polyref`]: projective polygon billiards whose every orbit is periodic.
//! * [`scene`]: JSON scene files describing framed tables.
//! * [`analysis`]: numerical verifiers (circumcenter loci, Birkhoff-type
//!   tangency, permitted hyperplanes, Chasles' theorem).

pub mod analysis;
pub mod caustics;
pub mod error;
pub mod linalg;
pub mod poly;
pub mod polyref;
pub mod projective;
pub mod reflect;
pub mod scene;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/projective.md")]
    mod projective {}
    #[doc = include_str!("../../../book/src/reflection.md")]
    mod reflection {}
    #[doc = include_str!("../../../book/src/caustics.md")]
    mod caustics {}
    #[doc = include_str!("../../../book/src/polygons.md")]
    mod polygons {}
    #[doc = include_str!("../../../book/src/analysis.md")]
    mod analysis {}
    #[doc = include_str!("../../../book/src/scenes.md")]
    mod scenes {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
