//! Explicit planar area-preserving maps: the disk-to-rectangles map `σ` and
//! the rectangle-to-disk squeeze.

mod rect_disk;
mod sigma;

pub use rect_disk::{rect_to_disk, RectToDisk};
pub use sigma::{phi_lambda_check, verify_sigma, PhiLambdaReport, SigmaMap, SigmaReport};
