//! Exact-arithmetic engine for walled-Brauer Koszul homology of truncated
//! operads: twisted module construction, Koszul complexes, flow-graph and
//! resolution oracles, and the Chevalley-Eilenberg cross-check.

pub mod dwbtw;
pub mod fbfb;
pub mod koszul;
pub mod linalg;
pub mod operad;
pub mod wbcat;

pub use linalg::{Q, QMatrix};
