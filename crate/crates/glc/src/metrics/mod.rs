//! Perceptual distortion: MS-SSIM, the DISTS aggregation, and their
//! weighted combination.

mod dists;
mod features;
mod image;
mod msssim;

pub use dists::{dists_score, DistsWeights, FeatureMap, FeatureStack};
pub use features::{
    feature_file_bytes, load_feature_file, parse_feature_file, save_feature_file, FEATURE_MAGIC,
    FEATURE_VERSION,
};
pub use image::ImageRaster;
pub use msssim::{
    min_side_for_scales, ms_ssim, ms_ssim_loss, MsSsimOptions, MSSSIM_SCALES, MSSSIM_WEIGHTS,
    WINDOW_SIGMA, WINDOW_SIZE,
};

use crate::error::{Error, Result};

/// Default MS-SSIM weight in the combined distortion: 765 * 2^-5.
pub const DEFAULT_K_MS: f64 = 765.0 / 32.0;
/// Default DISTS weight in the combined distortion.
pub const DEFAULT_K_DI: f64 = 1.0;

/// Weighted combination of the two distortion terms:
/// `k_ms * msssim_loss + k_di * dists`.
pub fn combined_distortion(msssim_loss: f64, dists: f64, k_ms: f64, k_di: f64) -> Result<f64> {
    if !msssim_loss.is_finite() || !dists.is_finite() {
        return Err(Error::Input(format!(
            "non-finite distortion inputs {msssim_loss}, {dists}"
        )));
    }
    if !(k_ms >= 0.0) || !(k_di >= 0.0) {
        return Err(Error::Parameter(format!(
            "distortion weights must be >= 0, got k_ms={k_ms} k_di={k_di}"
        )));
    }
    Ok(k_ms * msssim_loss + k_di * dists)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_constant_matches_published_value() {
        assert_eq!(DEFAULT_K_MS, 23.90625);
        assert_eq!(DEFAULT_K_DI, 1.0);
    }

    #[test]
    fn combination_arithmetic() {
        assert_eq!(combined_distortion(0.0, 0.0, DEFAULT_K_MS, 1.0).unwrap(), 0.0);
        let v = combined_distortion(0.1, 0.2, DEFAULT_K_MS, 1.0).unwrap();
        assert!((v - 2.590625).abs() < 1e-12);
    }

    #[test]
    fn linearity_by_superposition() {
        let f = |a, b| combined_distortion(a, b, 3.0, 2.0).unwrap();
        let lhs = f(0.1 + 0.25, 0.4 + 0.3);
        let rhs = f(0.1, 0.4) + f(0.25, 0.3);
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(combined_distortion(f64::NAN, 0.0, 1.0, 1.0).is_err());
        assert!(combined_distortion(0.0, 0.0, -1.0, 1.0).is_err());
    }
}
