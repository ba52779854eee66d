//! Growth functions φ and the radius schedule built from them.

mod function;
mod schedule;

pub use function::{concave_majorant, ConcavityReport, GrowthFunction};
pub use schedule::{radius_schedule, radius_schedule_with_m, RadiusSchedule};
