//! Standard-library companion to `kspec-core`: file formats, bundled
//! curve data, parallel spectrum drivers and the command-line surface.

pub mod cli;
pub mod data;
pub mod formats;
pub mod parallel;
pub mod poly;
