//! Boundary computations in the upper half-plane and half-space.

mod mobius;
mod radius;

pub use mobius::{cross_ratio, mobius_from_triple, MobiusMap, Point};
pub use radius::{
    bending_oracle, bent_plane_radius, bent_plane_radius_radical, crossing_radius_oracle, inclination_sin, lemma_map,
    meridian_geodesic_radius, peak_height, radius_after_crossing, radius_after_reverse_crossing, ridge_peak_height,
    single_bend_decay, BentRadius, Circle, CrossingRadius, DecayReport, DecaySample, GeodesicHalfCircle, PlaneSphere,
    ReverseCrossingRadius,
};
