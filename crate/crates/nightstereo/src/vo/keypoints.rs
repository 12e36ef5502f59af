//! Difference-of-Gaussians keypoint detector over a Gaussian scale-space
//! pyramid, with contrast thresholding and edge rejection.

use crate::imaging::{gaussian_blur, to_grayscale, ImageBuf};
use crate::report::MetricsReport;

use super::VoError;

/// Scale-space detector parameters.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DogParams {
    pub octaves: usize,
    pub scales_per_octave: usize,
    pub sigma0: f32,
    /// Minimum |DoG| response at an extremum.
    pub contrast_threshold: f32,
    /// Edge rejection ratio r: keep when trace^2/det < (r+1)^2/r.
    pub edge_ratio: f32,
}

impl Default for DogParams {
    fn default() -> Self {
        Self {
            octaves: 3,
            scales_per_octave: 3,
            sigma0: 1.6,
            contrast_threshold: 0.03,
            edge_ratio: 10.0,
        }
    }
}

/// Scale-space extremum at sub-pixel base-image coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Keypoint {
    pub x: f32,
    pub y: f32,
    pub octave: usize,
    pub scale: usize,
    /// DoG contrast at the extremum (signed).
    pub response: f32,
}

/// Detects DoG scale-space extrema. Results are ordered row-major by base
/// coordinates, then by scale, so detection is fully deterministic.
pub fn dog_keypoints(img: &ImageBuf, params: &DogParams) -> Result<Vec<Keypoint>, VoError> {
    if img.width() < 32 || img.height() < 32 {
        return Err(VoError::ImageTooSmall(img.width(), img.height()));
    }
    let gray = to_grayscale(img);
    let k = 2f32.powf(1.0 / params.scales_per_octave as f32);
    let levels_per_octave = params.scales_per_octave + 3;

    let mut keypoints = Vec::new();
    let mut octave_base = gray;
    for octave in 0..params.octaves {
        if octave_base.width() < 8 || octave_base.height() < 8 {
            break;
        }
        // Gaussian levels at sigma0 * k^i, built incrementally.
        let mut gauss: Vec<ImageBuf> = Vec::with_capacity(levels_per_octave);
        let first = gaussian_blur(&octave_base, params.sigma0)
            .expect("sigma0 is positive by construction");
        gauss.push(first);
        for i in 1..levels_per_octave {
            let sig_prev = params.sigma0 * k.powi(i as i32 - 1);
            let sig_cur = params.sigma0 * k.powi(i as i32);
            let delta = (sig_cur * sig_cur - sig_prev * sig_prev).sqrt();
            let next = gaussian_blur(&gauss[i - 1], delta).expect("positive delta sigma");
            gauss.push(next);
        }
        let dog: Vec<Vec<f32>> = gauss
            .windows(2)
            .map(|w| {
                w[1].data()
                    .iter()
                    .zip(w[0].data())
                    .map(|(a, b)| a - b)
                    .collect()
            })
            .collect();

        let (w, h) = (octave_base.width(), octave_base.height());
        let scale_factor = (1usize << octave) as f32;
        for s in 1..=params.scales_per_octave {
            let below = &dog[s - 1];
            let cur = &dog[s];
            let above = &dog[s + 1];
            for y in 1..h - 1 {
                for x in 1..w - 1 {
                    let v = cur[y * w + x];
                    if v.abs() < params.contrast_threshold {
                        continue;
                    }
                    if !is_extremum_3x3x3(below, cur, above, w, x, y, v) {
                        continue;
                    }
                    if is_edge_like(cur, w, x, y, params.edge_ratio) {
                        continue;
                    }
                    let (ox, oy) = subpixel_offset(cur, w, x, y);
                    keypoints.push(Keypoint {
                        x: (x as f32 + ox) * scale_factor,
                        y: (y as f32 + oy) * scale_factor,
                        octave,
                        scale: s,
                        response: v,
                    });
                }
            }
        }

        // next octave: downsample the level with twice the base sigma
        let src = &gauss[params.scales_per_octave];
        octave_base = downsample_2x(src);
    }

    keypoints.sort_by(|a, b| {
        (a.y, a.x, a.octave, a.scale)
            .partial_cmp(&(b.y, b.x, b.octave, b.scale))
            .expect("keypoint coordinates are finite")
    });
    Ok(keypoints)
}

fn is_extremum_3x3x3(
    below: &[f32],
    cur: &[f32],
    above: &[f32],
    w: usize,
    x: usize,
    y: usize,
    v: f32,
) -> bool {
    let maximum = v > 0.0;
    for plane in [below, cur, above] {
        for dy in -1i32..=1 {
            for dx in -1i32..=1 {
                let idx = ((y as i32 + dy) as usize) * w + (x as i32 + dx) as usize;
                let n = plane[idx];
                if std::ptr::eq(plane, cur) && dx == 0 && dy == 0 {
                    continue;
                }
                if maximum {
                    if n >= v {
                        return false;
                    }
                } else if n <= v {
                    return false;
                }
            }
        }
    }
    true
}

fn is_edge_like(dog: &[f32], w: usize, x: usize, y: usize, r: f32) -> bool {
    let c = dog[y * w + x];
    let dxx = dog[y * w + x + 1] - 2.0 * c + dog[y * w + x - 1];
    let dyy = dog[(y + 1) * w + x] - 2.0 * c + dog[(y - 1) * w + x];
    let dxy = 0.25
        * (dog[(y + 1) * w + x + 1] - dog[(y + 1) * w + x - 1] - dog[(y - 1) * w + x + 1]
            + dog[(y - 1) * w + x - 1]);
    let tr = dxx + dyy;
    let det = dxx * dyy - dxy * dxy;
    if det <= 0.0 {
        return true;
    }
    tr * tr / det >= (r + 1.0) * (r + 1.0) / r
}

/// Per-axis parabola refinement on the DoG plane, clamped to +/-0.5.
fn subpixel_offset(dog: &[f32], w: usize, x: usize, y: usize) -> (f32, f32) {
    let c = dog[y * w + x];
    let ox = parabola_vertex(dog[y * w + x - 1], c, dog[y * w + x + 1]);
    let oy = parabola_vertex(dog[(y - 1) * w + x], c, dog[(y + 1) * w + x]);
    (ox, oy)
}

fn parabola_vertex(fm: f32, f0: f32, fp: f32) -> f32 {
    let denom = fm - 2.0 * f0 + fp;
    if denom.abs() < 1e-12 {
        return 0.0;
    }
    (0.5 * (fm - fp) / denom).clamp(-0.5, 0.5)
}

fn downsample_2x(img: &ImageBuf) -> ImageBuf {
    let (w, h) = (img.width(), img.height());
    let (nw, nh) = ((w + 1) / 2, (h + 1) / 2);
    let mut data = Vec::with_capacity(nw * nh);
    for y in 0..nh {
        for x in 0..nw {
            data.push(img.get((2 * x).min(w - 1), (2 * y).min(h - 1), 0));
        }
    }
    ImageBuf::from_vec(nw, nh, 1, data).expect("downsample preserves range")
}

/// Keypoint counts for a night/enhanced image pair of the same scene;
/// `delta = count(enhanced) - count(night)`.
pub fn keypoint_delta(
    night: &ImageBuf,
    enhanced: &ImageBuf,
    params: &DogParams,
) -> Result<MetricsReport, VoError> {
    let n = dog_keypoints(night, params)?.len();
    let e = dog_keypoints(enhanced, params)?.len();
    let mut report = MetricsReport::new("keypoint_delta");
    report.push("night_count", n as f64);
    report.push("enhanced_count", e as f64);
    report.push("delta", e as f64 - n as f64);
    Ok(report)
}
