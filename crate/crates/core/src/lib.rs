//! Identification of a first-person camera wearer among the people masked
//! in a synchronized third-person video.
//!
//! The pipeline scores every candidate twice. Motion matching compares the
//! camera's own motion, measured from optical flow and depth, with the motion
//! predicted for each candidate. Appearance matching compares each person the
//! camera saw against every candidate; those candidates cannot be the wearer.
//! [`cbaf::fuse`] then lets the most confident source either commit to a
//! prediction or eliminate a candidate.
//!
//! [`simulator`] renders pinhole-camera scenes with known motion and produces
//! exact predictions, which makes every stage testable against ground truth.

pub mod appearance;
pub mod cbaf;
pub mod dataset;
pub mod ego_motion;
pub mod error;
pub mod io;
pub mod motion_match;
pub mod pipeline;
pub mod query;
pub mod rle;
pub mod simulator;
pub mod types;

pub use error::{Error, Result};
pub use pipeline::{identify, Identification, PipelineConfig};
pub use query::{load_query, save_query, QueryInstance};
