//! Minimal disks in ℍ³ from their data `(u, α)`: frame integration, Gauss
//! maps and their quasiconformal distortion, equidistant foliations.

pub mod beltrami;
pub mod equidistant;
pub mod frame;
pub mod gauss_map;
pub mod immersion;

pub use beltrami::{beltrami_estimate, beltrami_estimate_within, dilatation, jacobian_estimate, BeltramiEstimate};
pub use equidistant::{equidistant_metric, patch_fundamental_forms, EquidistantReport, MetricTensorField};
pub use frame::FramePoint;
pub use gauss_map::{gauss_map_patch, gauss_map_point, BoundaryField, Sign};
pub use immersion::{integrate_immersion, integrate_immersion_with, ImmersedPatch};
