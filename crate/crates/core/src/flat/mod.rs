//! The measured foliation of the flat torus by lines of slope `θ`:
//! polygonal rays, transverse-measure growth, leaf approximations and
//! exotic rays.

mod exotic;
mod geometry;
pub(crate) mod leaf;
mod ray;

pub use exotic::{
    assemble_exotic_ray, compare_ray_tails, sublinear_ray, ExoticRay, IndexMap, RayTailReport, SublinearFn,
    SublinearRay,
};
pub use geometry::{FlatPoint, Foliation, Measure, Segment, SegmentKind};
pub use leaf::{
    build_leaf_approx, classify_cesag, leaf_schedule, schedule_csv, CesagReport, ExactLeaf, Goodness, LeafApprox,
    MarkerCheck, ProductTerm, Separation, Verdict,
};
pub use ray::{
    crofton_estimate, growth_series, rational_direction, straight_ray, CroftonReport, GrowthSample, GrowthSeries,
    Marker, PolygonalRay,
};
