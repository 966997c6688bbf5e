//! Computational toolkit for linear symplectic geometry and convex-body
//! volume inequalities at desk scale (dimension 2n <= 8).
//!
//! The crate is organized around one pipeline: factor a volume-preserving
//! positioning map through the symplectic group (Williamson / WDS
//! decompositions), push a convex body through it, and read off a certified
//! upper bound on its linearized cylindrical capacity from the inradius of
//! `K + iK`. Around that sit the supporting pieces: exact and Monte Carlo
//! volumes, minimum-volume enclosing ellipsoids, M-position proxies, and a
//! batch experiment runner with reproducible seeded reports.

pub mod body;
pub(crate) mod eigen;
pub mod error;
pub mod experiments;
pub mod hull;
pub mod linprog;
pub mod pipeline;
pub mod positions;
pub mod rng;
pub mod symplectic;
pub mod tolerances;
pub mod volume;

pub use body::{ConvexBody, ContactCertificate, Ellipsoid, HPolytope, Halfspace, VPolytope};
pub use error::{Error, Result};
pub use pipeline::{CapacityBound, PipelineTrace, ViterboReport};
pub use symplectic::{PdMatrix, StandardStructure, WdsForm, WilliamsonForm};
pub use volume::VolumeEstimate;
