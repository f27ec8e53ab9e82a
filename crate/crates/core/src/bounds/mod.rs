//! Checkable forms of the comparison, moment and Szegő-type inequalities.

pub mod certificate;
pub mod moments;
pub mod szego;

pub use certificate::{
    theorem41_certificate, theorem43_certificate, CertificateRow, ComparisonCertificate,
    BOUNDARY_MASS_LIMIT, MARGIN_SLACK,
};
pub use moments::{
    lieb_thirring_constant, lt_bound_rhs, lt_sandwich_check, moment_sum, BoundKind, MomentReport,
    SandwichReport, MESH_SLACK_FACTOR,
};
pub use szego::{band_spectrum, szego_sum, BandSpectrum, SzegoReport};
