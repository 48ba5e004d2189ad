//! Exact convex polytopes, cones and affine flats.

mod cone;
mod flat;
mod float;
pub(crate) mod hull;
mod polytope;

pub use cone::Cone;
pub use flat::{intersect_flat, project, AffineFlat};
pub use float::{hausdorff_distance, orthonormalize, FloatPolytope};
pub use polytope::{
    extreme_points, hull_volume, minkowski_sum_volume, Face, Halfspace, Hyperplane, Polytope, RelVolume,
};

/// Convex hull of a nonempty point set.
pub fn convex_hull(points: &[crate::num::QVec]) -> crate::error::Result<Polytope> {
    Polytope::from_points(points)
}
