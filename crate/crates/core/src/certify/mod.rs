//! Certified empty disks in the domain of discontinuity and the supporting
//! quasiconformal estimates.

pub mod certificate;
pub mod experiment;
pub mod koebe;

pub use certificate::{
    assemble_certificate, certified_radius, empty_radius_at_origin, flats_certificate, necessary_condition_check,
    Certificate, CertifyConfig, FlatsCertificate, NecessaryConditionReport, NecessaryVerdict, Verdict,
};
pub use experiment::{barrier_experiment, circle_empty_radius, dilation_family, ExperimentConfig, ExperimentReport, ExperimentRow};
pub use koebe::{astala_gehring_a, koebe_bounds_check, koebe_bounds_check_with_jacobian, KoebeReport};
