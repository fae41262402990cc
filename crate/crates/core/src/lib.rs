//! Surface-area and volume estimation for excursion sets of isotropic random
//! fields observed on the nodes of a tessellation.
//!
//! A field is sampled at the nuclei of a honeycomb, thresholded at a level,
//! and the excursion set is approximated by the union of cells whose nucleus
//! exceeds the level. The facet measure between differing cells is a biased
//! surface estimate; dividing by the dimension bias factor removes the bias
//! for isotropic fields.

pub mod crofton;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod field_models;
pub mod geometry;
pub mod sampler;
pub mod seed;
pub mod stats;
pub mod tessellation;
