//! Chain complexes over Bar-Natan's dotted cobordism categories.
//!
//! On top of them sit the quasi-idempotents `Q_n`, the truncated projectors
//! `P_n` and a colored sl2 link homology built from either.

pub mod cobordism;
pub mod colored_links;
pub mod complexes;
pub mod error;
pub mod homology;
pub mod io;
pub mod projectors;
pub mod series;
pub mod temperley_lieb;

pub use error::{Error, Result};
