mod density_field;
mod examples;
mod patch;
mod radial;

pub use density_field::DensityField;
pub use examples::{halfspace_net, onedim_counterexample, OneDimExample};
pub use patch::{
    cube_covering_radius, dyadic_placement, patch_bijection, patch_counts, patched_net,
    point_set_separation, pot_fill, CellAllocation, Cube, CubeLayout, Placement,
};
pub use radial::{
    fit_schedule, radial_rescale, radial_rescale_to_window, rbar, rbar_for_reach, slope_bounds_check, RadialProfile,
    RadialRescale, Reference, SlopeEntry, SlopeReport,
};
