//! Energy and linear momentum of asymptotically flat initial data at spatial
//! infinity and of asymptotically hyperboloidal data at null infinity, plus
//! Bondi radiating spacetimes and their mass loss.

pub mod adm;
pub mod bondi;
pub mod dd;
pub mod dec;
pub mod dual;
pub mod error;
pub mod fit;
pub mod geometry;
pub mod linalg;
pub mod null;
pub mod spacetimes;
pub mod sphere;
pub mod synthetic;

pub use error::{Error, Result};
