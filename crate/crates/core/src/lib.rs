//! Minimum generalized Manhattan connections.
//!
//! Given points and demand pairs, find few extra points so that every demand
//! pair is joined by a rectilinear path of length equal to its l1 distance.

pub mod approx;
pub mod bench;
pub mod bounds;
pub mod error;
pub mod exact;
pub mod generators;
pub mod io;
pub mod model;
pub mod sat;
pub mod special;
pub mod strips;
pub mod svg;
pub mod verify;

pub use error::{GmcError, Result};
pub use model::{Demand, DemandKind, Instance, Point, Pt, Rect, Solution};
