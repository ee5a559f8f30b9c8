//! Discrete extremal search over λ-convex polygons.
//!
//! A λ-convex polygon whose arcs all have curvature λ is an intersection of
//! caps of radius `r = arccot λ` (a ball-polygon). [`CapSet`] builds such
//! polygons from cap centers; the linkage deformation, the diameter
//! symmetrization and the multistart minimizer work on top of it.

mod caps;
mod diameter;
mod linkage;
mod search;

pub use caps::{random_polygon, random_polygons, random_symmetric_polygon, regular_polygon, CapSet};
pub use diameter::{diameter, symmetrize, Diameter};
pub use linkage::{deform, deform_to_lune, four_bar_deform, DeformStep, DEFAULT_STEP};
pub use search::{minimize_area, OptimizerReport, DEFAULT_STARTS};
