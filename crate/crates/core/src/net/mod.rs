//! Finite windows of point sets and their metric quantities.

mod certify;
mod density;
mod window;

pub use certify::{certify, certify_with, layer_gap, separation_of, CertifyOptions, NetCertificate};
pub use density::{
    counting_measure, counting_measure_discrepancy, dyadic_boxes, natural_density_curve,
    TargetMeasure,
};
pub use window::{integer_lattice_window, NetWindow};
