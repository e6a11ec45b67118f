//! Multi-scale structural similarity on 8-bit RGB images: five dyadic
//! scales, an 11x11 Gaussian window with spread 1.5, per-channel scores
//! averaged over RGB, and the luminance term applied only at the coarsest
//! scale.

use crate::error::{Error, Result};
use crate::metrics::image::ImageRaster;

pub const MSSSIM_SCALES: usize = 5;
pub const MSSSIM_WEIGHTS: [f64; MSSSIM_SCALES] = [0.0448, 0.2856, 0.3001, 0.2363, 0.1333];
pub const WINDOW_SIZE: usize = 11;
pub const WINDOW_SIGMA: f64 = 1.5;
const DYNAMIC_RANGE: f64 = 255.0;
const K1: f64 = 0.01;
const K2: f64 = 0.03;

/// Options for undersized inputs. By default images smaller than
/// 11 * 2^(S-1) on a side are a hard error; opting in reduces the scale
/// count and renormalizes the weights instead.
#[derive(Debug, Clone, Copy, Default)]
pub struct MsSsimOptions {
    pub allow_scale_reduction: bool,
}

/// Minimum image side length required for `scales` dyadic scales.
pub fn min_side_for_scales(scales: usize) -> usize {
    WINDOW_SIZE << (scales - 1)
}

pub fn ms_ssim(x: &ImageRaster, y: &ImageRaster, opts: MsSsimOptions) -> Result<f64> {
    if x.width() != y.width() || x.height() != y.height() {
        return Err(Error::Shape(format!(
            "image sizes differ: {}x{} vs {}x{}",
            x.width(),
            y.width(),
            x.height(),
            y.height()
        )));
    }
    let min_side = x.width().min(x.height());
    let scales = if min_side >= min_side_for_scales(MSSSIM_SCALES) {
        MSSSIM_SCALES
    } else if opts.allow_scale_reduction {
        let mut s = 0;
        while s < MSSSIM_SCALES && min_side >= min_side_for_scales(s + 1) {
            s += 1;
        }
        if s == 0 {
            return Err(Error::Input(format!(
                "image side {min_side} below the {WINDOW_SIZE}px window"
            )));
        }
        s
    } else {
        return Err(Error::Input(format!(
            "image side {min_side} below {} required for {MSSSIM_SCALES} scales",
            min_side_for_scales(MSSSIM_SCALES)
        )));
    };
    let wsum: f64 = MSSSIM_WEIGHTS[..scales].iter().sum();
    let weights: Vec<f64> = MSSSIM_WEIGHTS[..scales].iter().map(|w| w / wsum).collect();

    let mut score = 0.0;
    for channel in 0..3 {
        let mut px = Plane {
            data: x.plane(channel),
            width: x.width(),
            height: x.height(),
        };
        let mut py = Plane {
            data: y.plane(channel),
            width: y.width(),
            height: y.height(),
        };
        let mut channel_score = 1.0;
        for (s, w) in weights.iter().enumerate() {
            let (luminance, contrast_structure) = ssim_terms(&px, &py);
            if s + 1 == scales {
                channel_score *= (luminance * contrast_structure).max(0.0).powf(*w);
            } else {
                channel_score *= contrast_structure.max(0.0).powf(*w);
                px = px.downsample2();
                py = py.downsample2();
            }
        }
        score += channel_score;
    }
    Ok(score / 3.0)
}

pub fn ms_ssim_loss(x: &ImageRaster, y: &ImageRaster, opts: MsSsimOptions) -> Result<f64> {
    Ok(1.0 - ms_ssim(x, y, opts)?)
}

struct Plane {
    data: Vec<f64>,
    width: usize,
    height: usize,
}

impl Plane {
    /// Dyadic downsampling by 2x2 mean pooling; a trailing odd row/column is
    /// dropped.
    fn downsample2(&self) -> Plane {
        let w = self.width / 2;
        let h = self.height / 2;
        let mut data = Vec::with_capacity(w * h);
        for r in 0..h {
            for c in 0..w {
                let i = 2 * r * self.width + 2 * c;
                data.push(
                    0.25 * (self.data[i]
                        + self.data[i + 1]
                        + self.data[i + self.width]
                        + self.data[i + self.width + 1]),
                );
            }
        }
        Plane {
            data,
            width: w,
            height: h,
        }
    }
}

fn gaussian_window() -> [f64; WINDOW_SIZE] {
    let mut w = [0.0; WINDOW_SIZE];
    let mid = (WINDOW_SIZE / 2) as f64;
    let mut sum = 0.0;
    for (i, v) in w.iter_mut().enumerate() {
        let d = i as f64 - mid;
        *v = (-d * d / (2.0 * WINDOW_SIGMA * WINDOW_SIGMA)).exp();
        sum += *v;
    }
    for v in w.iter_mut() {
        *v /= sum;
    }
    w
}

/// Valid-mode separable Gaussian blur; output is (w-10) x (h-10).
fn blur(p: &Plane) -> Plane {
    let k = gaussian_window();
    let ow = p.width - WINDOW_SIZE + 1;
    let oh = p.height - WINDOW_SIZE + 1;
    // horizontal pass
    let mut tmp = vec![0.0; ow * p.height];
    for r in 0..p.height {
        for c in 0..ow {
            let mut acc = 0.0;
            for (t, kv) in k.iter().enumerate() {
                acc += kv * p.data[r * p.width + c + t];
            }
            tmp[r * ow + c] = acc;
        }
    }
    // vertical pass
    let mut out = vec![0.0; ow * oh];
    for r in 0..oh {
        for c in 0..ow {
            let mut acc = 0.0;
            for (t, kv) in k.iter().enumerate() {
                acc += kv * tmp[(r + t) * ow + c];
            }
            out[r * ow + c] = acc;
        }
    }
    Plane {
        data: out,
        width: ow,
        height: oh,
    }
}

/// Mean luminance and contrast-structure terms of one scale.
fn ssim_terms(px: &Plane, py: &Plane) -> (f64, f64) {
    let c1 = (K1 * DYNAMIC_RANGE) * (K1 * DYNAMIC_RANGE);
    let c2 = (K2 * DYNAMIC_RANGE) * (K2 * DYNAMIC_RANGE);

    let mul = |a: &Plane, b: &Plane| Plane {
        data: a.data.iter().zip(&b.data).map(|(x, y)| x * y).collect(),
        width: a.width,
        height: a.height,
    };

    let mu_x = blur(px);
    let mu_y = blur(py);
    let xx = blur(&mul(px, px));
    let yy = blur(&mul(py, py));
    let xy = blur(&mul(px, py));

    let n = mu_x.data.len();
    let mut l_sum = 0.0;
    let mut cs_sum = 0.0;
    for i in 0..n {
        let mx = mu_x.data[i];
        let my = mu_y.data[i];
        let var_x = xx.data[i] - mx * mx;
        let var_y = yy.data[i] - my * my;
        let cov = xy.data[i] - mx * my;
        l_sum += (2.0 * mx * my + c1) / (mx * mx + my * my + c1);
        cs_sum += (2.0 * cov + c2) / (var_x + var_y + c2);
    }
    (l_sum / n as f64, cs_sum / n as f64)
}
