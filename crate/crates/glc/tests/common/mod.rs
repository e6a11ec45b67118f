//! Shared oracles for the integration tests: an adaptive-quadrature route
//! to the discretized mixture probabilities and a dense (non-separable)
//! MS-SSIM reference, both implemented independently of the library's
//! closed-form / separable code paths.

#![allow(dead_code)]

use glc::entropy::GllmmParams;
use glc::metrics::{ImageRaster, MSSSIM_SCALES, MSSSIM_WEIGHTS, WINDOW_SIGMA, WINDOW_SIZE};

// --- adaptive Simpson quadrature over the mixture density ---

/// Mixture probability density, written from the density formulas rather
/// than the CDFs the library integrates analytically.
pub fn mixture_pdf(p: &GllmmParams, x: f64) -> f64 {
    let [wg, wl, wo] = p.family_weights;
    let mut acc = 0.0;
    for c in &p.gaussian {
        // c.scale holds the variance for the Gaussian family
        let v = c.scale;
        let d = x - c.mean;
        acc += wg * c.weight * (-d * d / (2.0 * v)).exp() / (2.0 * std::f64::consts::PI * v).sqrt();
    }
    for c in &p.laplace {
        let t = (x - c.mean).abs() / c.scale;
        acc += wl * c.weight * (-t).exp() / (2.0 * c.scale);
    }
    for c in &p.logistic {
        let t = -((x - c.mean).abs() / c.scale);
        let e = t.exp();
        acc += wo * c.weight * e / (c.scale * (1.0 + e) * (1.0 + e));
    }
    acc
}

fn simpson(f: &impl Fn(f64) -> f64, a: f64, fa: f64, fm: f64, fb: f64, b: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(f, a, fa, flm, fm, m);
    let right = simpson(f, m, fm, frm, fb, b);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        left + right + delta / 15.0
    } else {
        adaptive(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1)
            + adaptive(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
    }
}

/// Adaptive Simpson integration of `f` over `[a, b]` to tolerance `eps`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(&f, a, fa, fm, fb, b);
    adaptive(&f, a, b, fa, fm, fb, whole, eps, 40)
}

/// Quadrature route to the mass of interior bin `k`.
pub fn bin_prob_by_quadrature(p: &GllmmParams, k: i32, eps: f64) -> f64 {
    integrate(|x| mixture_pdf(p, x), k as f64 - 0.5, k as f64 + 0.5, eps)
}

// --- dense MS-SSIM reference ---

fn window_2d() -> Vec<f64> {
    let mid = (WINDOW_SIZE / 2) as f64;
    let mut w = vec![0.0; WINDOW_SIZE * WINDOW_SIZE];
    let mut sum = 0.0;
    for r in 0..WINDOW_SIZE {
        for c in 0..WINDOW_SIZE {
            let dr = r as f64 - mid;
            let dc = c as f64 - mid;
            let v = (-(dr * dr + dc * dc) / (2.0 * WINDOW_SIGMA * WINDOW_SIGMA)).exp();
            w[r * WINDOW_SIZE + c] = v;
            sum += v;
        }
    }
    for v in w.iter_mut() {
        *v /= sum;
    }
    w
}

struct RefPlane {
    data: Vec<f64>,
    width: usize,
    height: usize,
}

impl RefPlane {
    fn downsample2(&self) -> RefPlane {
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
        RefPlane {
            data,
            width: w,
            height: h,
        }
    }
}

/// Mean luminance and contrast-structure terms at one scale, computed with
/// a dense 2-D window in a single pass over each neighborhood.
fn ssim_terms_dense(px: &RefPlane, py: &RefPlane, kernel: &[f64]) -> (f64, f64) {
    let c1 = (0.01 * 255.0) * (0.01 * 255.0);
    let c2 = (0.03 * 255.0) * (0.03 * 255.0);
    let ow = px.width - WINDOW_SIZE + 1;
    let oh = px.height - WINDOW_SIZE + 1;
    let mut l_sum = 0.0;
    let mut cs_sum = 0.0;
    for r in 0..oh {
        for c in 0..ow {
            let mut mx = 0.0;
            let mut my = 0.0;
            let mut xx = 0.0;
            let mut yy = 0.0;
            let mut xy = 0.0;
            for kr in 0..WINDOW_SIZE {
                let rowx = &px.data[(r + kr) * px.width + c..];
                let rowy = &py.data[(r + kr) * py.width + c..];
                let krow = &kernel[kr * WINDOW_SIZE..];
                for kc in 0..WINDOW_SIZE {
                    let (w, x, y) = (krow[kc], rowx[kc], rowy[kc]);
                    mx += w * x;
                    my += w * y;
                    xx += w * x * x;
                    yy += w * y * y;
                    xy += w * x * y;
                }
            }
            let var_x = xx - mx * mx;
            let var_y = yy - my * my;
            let cov = xy - mx * my;
            l_sum += (2.0 * mx * my + c1) / (mx * mx + my * my + c1);
            cs_sum += (2.0 * cov + c2) / (var_x + var_y + c2);
        }
    }
    let n = (ow * oh) as f64;
    (l_sum / n, cs_sum / n)
}

/// Dense reference MS-SSIM over all five scales (inputs must be large
/// enough; no scale reduction here).
pub fn ms_ssim_reference(x: &ImageRaster, y: &ImageRaster) -> f64 {
    assert_eq!(x.width(), y.width());
    assert_eq!(x.height(), y.height());
    let kernel = window_2d();
    // the published weights sum to 1.0001; normalize like the library does
    let wsum: f64 = MSSSIM_WEIGHTS.iter().sum();
    let weights: Vec<f64> = MSSSIM_WEIGHTS.iter().map(|w| w / wsum).collect();
    let mut score = 0.0;
    for channel in 0..3 {
        let mut px = RefPlane {
            data: x.plane(channel),
            width: x.width(),
            height: x.height(),
        };
        let mut py = RefPlane {
            data: y.plane(channel),
            width: y.width(),
            height: y.height(),
        };
        let mut channel_score = 1.0;
        for (s, w) in weights.iter().enumerate() {
            let (luminance, contrast_structure) = ssim_terms_dense(&px, &py, &kernel);
            if s + 1 == MSSSIM_SCALES {
                channel_score *= (luminance * contrast_structure).max(0.0).powf(*w);
            } else {
                channel_score *= contrast_structure.max(0.0).powf(*w);
                px = px.downsample2();
                py = py.downsample2();
            }
        }
        score += channel_score;
    }
    score / 3.0
}

// --- small deterministic image generator ---

pub struct XorShift(pub u64);

impl XorShift {
    pub fn next_u64(&mut self) -> u64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        self.0
    }

    pub fn next_byte(&mut self) -> u8 {
        (self.next_u64() >> 32) as u8
    }
}

/// Smooth-ish random image: low-frequency gradients plus pixel noise, so
/// the metric sees structure rather than pure white noise.
pub fn random_image(width: usize, height: usize, seed: u64) -> ImageRaster {
    let mut rng = XorShift(seed | 1);
    let fx = 0.5 + (rng.next_u64() % 100) as f64 / 25.0;
    let fy = 0.5 + (rng.next_u64() % 100) as f64 / 25.0;
    let phase = (rng.next_u64() % 628) as f64 / 100.0;
    let mut samples = Vec::with_capacity(width * height * 3);
    for r in 0..height {
        for c in 0..width {
            for ch in 0..3 {
                let base = 127.5
                    + 90.0
                        * ((fx * c as f64 / width as f64
                            + fy * r as f64 / height as f64
                            + phase
                            + ch as f64 * 0.7)
                            * std::f64::consts::TAU)
                            .sin();
                let noise = (rng.next_u64() % 41) as f64 - 20.0;
                samples.push((base + noise).clamp(0.0, 255.0) as u8);
            }
        }
    }
    ImageRaster::new(width, height, samples).unwrap()
}

/// Copy of `image` with uniform noise of the given spread added per sample.
pub fn add_noise(image: &ImageRaster, spread: i32, seed: u64) -> ImageRaster {
    let mut rng = XorShift(seed | 1);
    let samples = image
        .samples()
        .iter()
        .map(|&v| {
            let d = (rng.next_u64() % (2 * spread as u64 + 1)) as i32 - spread;
            (v as i32 + d).clamp(0, 255) as u8
        })
        .collect();
    ImageRaster::new(image.width(), image.height(), samples).unwrap()
}
