//! Spatial filters: box blur, Gaussian blur and the 3x3 binomial smoother.
//!
//! All filters clamp to the edge and preserve constant images exactly.

use super::{ImageBuf, ImagingError};

/// Mean filter over a `(2r+1)^2` window with clamp-to-edge; radius 0 is the
/// identity. Uses sliding sums, one pass per axis.
pub fn box_blur(img: &ImageBuf, radius: usize) -> ImageBuf {
    if radius == 0 {
        return img.clone();
    }
    let horiz = box_pass(img, radius, true);
    box_pass(&horiz, radius, false)
}

fn box_pass(img: &ImageBuf, radius: usize, horizontal: bool) -> ImageBuf {
    let (w, h, ch) = (img.width(), img.height(), img.channels());
    let mut out = vec![0.0f32; w * h * ch];
    let r = radius as isize;
    let norm = 1.0 / (2 * radius + 1) as f64;
    let (outer, inner) = if horizontal { (h, w) } else { (w, h) };
    for o in 0..outer {
        for c in 0..ch {
            let fetch = |i: isize| -> f32 {
                if horizontal {
                    img.get_clamped(i, o as isize, c)
                } else {
                    img.get_clamped(o as isize, i, c)
                }
            };
            let mut acc = 0.0f64;
            for i in -r..=r {
                acc += fetch(i) as f64;
            }
            for i in 0..inner {
                let idx = if horizontal {
                    (o * w + i) * ch + c
                } else {
                    (i * w + o) * ch + c
                };
                out[idx] = ((acc * norm) as f32).clamp(0.0, 1.0);
                acc += fetch(i as isize + r + 1) as f64 - fetch(i as isize - r) as f64;
            }
        }
    }
    ImageBuf::from_vec_unchecked(w, h, ch, out)
}

/// Separable Gaussian blur. The kernel is truncated at `ceil(3*sigma)` taps
/// each side and renormalized to sum 1, so constants pass through exactly.
pub fn gaussian_blur(img: &ImageBuf, sigma: f32) -> Result<ImageBuf, ImagingError> {
    if !(sigma > 0.0) {
        return Err(ImagingError::NonPositiveSigma(sigma));
    }
    let half = (3.0 * sigma).ceil() as usize;
    let mut kernel = Vec::with_capacity(2 * half + 1);
    let inv2s2 = 1.0 / (2.0 * sigma as f64 * sigma as f64);
    for i in -(half as isize)..=(half as isize) {
        kernel.push((-(i * i) as f64 * inv2s2).exp());
    }
    let sum: f64 = kernel.iter().sum();
    let kernel: Vec<f32> = kernel.iter().map(|k| (k / sum) as f32).collect();
    let horiz = conv_pass(img, &kernel, true);
    Ok(conv_pass(&horiz, &kernel, false))
}

/// Single pass of the 3x3 binomial kernel `[1 2 1]/4` per axis.
pub fn binomial_smooth_3x3(img: &ImageBuf) -> ImageBuf {
    let kernel = [0.25, 0.5, 0.25];
    let horiz = conv_pass(img, &kernel, true);
    conv_pass(&horiz, &kernel, false)
}

fn conv_pass(img: &ImageBuf, kernel: &[f32], horizontal: bool) -> ImageBuf {
    let (w, h, ch) = (img.width(), img.height(), img.channels());
    let half = (kernel.len() / 2) as isize;
    let mut out = vec![0.0f32; w * h * ch];
    for y in 0..h {
        for x in 0..w {
            for c in 0..ch {
                let mut acc = 0.0f32;
                for (k, &kv) in kernel.iter().enumerate() {
                    let off = k as isize - half;
                    let v = if horizontal {
                        img.get_clamped(x as isize + off, y as isize, c)
                    } else {
                        img.get_clamped(x as isize, y as isize + off, c)
                    };
                    acc += kv * v;
                }
                out[(y * w + x) * ch + c] = acc.clamp(0.0, 1.0);
            }
        }
    }
    ImageBuf::from_vec_unchecked(w, h, ch, out)
}
