pub mod bench;
pub mod error;
pub mod estimators;
pub mod geometry;
pub mod hull;
pub mod io;
mod linalg;
pub mod ppp;
pub mod rng;

pub use error::{Error, Result};
pub use hull::{classify_points, convex_hull, convex_hull_with, Facet, HullAlgorithm, HullSummary, PointCloud, PointLabel};
pub use estimators::{Estimate, EstimatorId};
pub use geometry::{Centre, ConvexBody, Polytope};
pub use ppp::{sample_ppp, PppConfig};
