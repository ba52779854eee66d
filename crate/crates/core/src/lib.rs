pub mod construct;
pub mod displacement;
pub mod error;
pub mod geom;
pub mod growth;
pub mod index;
pub mod io;
pub mod net;
pub mod suite;

pub use error::{NetError, Result};
