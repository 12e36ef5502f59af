//! Core image representation, PNM file I/O and resampling/filtering
//! primitives.
//!
//! Pixels live in `[0, 1]` as `f32`, row-major and channel-interleaved.
//! All filters use a clamp-to-edge border policy.

mod filter;
mod pnm;

pub use filter::{binomial_smooth_3x3, box_blur, gaussian_blur};
pub use pnm::{load_pnm, save_pnm};

use thiserror::Error;

/// Errors produced by imaging operations.
#[derive(Debug, Error)]
pub enum ImagingError {
    #[error("malformed PNM header at byte offset {offset}: {reason}")]
    MalformedHeader { offset: usize, reason: String },
    #[error("unsupported PNM maxval {maxval} at byte offset {offset} (expected 255 or 65535)")]
    UnsupportedMaxval { offset: usize, maxval: u32 },
    #[error("truncated PNM data at byte offset {offset}: expected {expected} payload bytes, found {found}")]
    TruncatedData {
        offset: usize,
        expected: usize,
        found: usize,
    },
    #[error("i/o failure on {path}: {source}")]
    IoFailure {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("zero output dimension {0}x{1}")]
    ZeroDimension(usize, usize),
    #[error("sigma must be positive, got {0}")]
    NonPositiveSigma(f32),
    #[error("unsupported channel count {0} (expected 1 or 3)")]
    BadChannelCount(usize),
}

/// Row-major float image in `[0, 1]`, 1 (gray) or 3 (RGB) interleaved
/// channels.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageBuf {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<f32>,
}

impl ImageBuf {
    /// Builds an image from raw samples, validating the buffer invariants:
    /// `data.len() == width * height * channels`, channels in `{1, 3}` and
    /// every sample finite in `[0, 1]`.
    pub fn from_vec(
        width: usize,
        height: usize,
        channels: usize,
        data: Vec<f32>,
    ) -> Result<Self, ImagingError> {
        if channels != 1 && channels != 3 {
            return Err(ImagingError::BadChannelCount(channels));
        }
        if data.len() != width * height * channels {
            return Err(ImagingError::ShapeMismatch(format!(
                "buffer has {} samples, expected {}x{}x{} = {}",
                data.len(),
                width,
                height,
                channels,
                width * height * channels
            )));
        }
        for (i, &v) in data.iter().enumerate() {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(ImagingError::ShapeMismatch(format!(
                    "sample {i} = {v} outside [0, 1]"
                )));
            }
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    /// Constant-valued image.
    pub fn splat(width: usize, height: usize, channels: usize, value: f32) -> Self {
        Self::from_vec(width, height, channels, vec![value; width * height * channels])
            .expect("splat value must lie in [0,1]")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    /// Sample at integer coordinates; `c` is the channel index.
    #[inline]
    pub fn get(&self, x: usize, y: usize, c: usize) -> f32 {
        self.data[(y * self.width + x) * self.channels + c]
    }

    #[inline]
    pub(crate) fn set(&mut self, x: usize, y: usize, c: usize, v: f32) {
        self.data[(y * self.width + x) * self.channels + c] = v;
    }

    /// Clamp-to-edge sample.
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize, c: usize) -> f32 {
        let xc = x.clamp(0, self.width as isize - 1) as usize;
        let yc = y.clamp(0, self.height as isize - 1) as usize;
        self.get(xc, yc, c)
    }

    /// Bilinear sample at continuous coordinates with clamp-to-edge.
    pub fn sample_bilinear(&self, x: f32, y: f32, c: usize) -> f32 {
        let x = x.clamp(0.0, (self.width - 1) as f32);
        let y = y.clamp(0.0, (self.height - 1) as f32);
        let x0 = x.floor() as usize;
        let y0 = y.floor() as usize;
        let x1 = (x0 + 1).min(self.width - 1);
        let y1 = (y0 + 1).min(self.height - 1);
        let fx = x - x0 as f32;
        let fy = y - y0 as f32;
        let top = self.get(x0, y0, c) * (1.0 - fx) + self.get(x1, y0, c) * fx;
        let bot = self.get(x0, y1, c) * (1.0 - fx) + self.get(x1, y1, c) * fx;
        top * (1.0 - fy) + bot * fy
    }

    /// Consumes the image, returning the raw sample vector.
    pub fn into_vec(self) -> Vec<f32> {
        self.data
    }

    pub(crate) fn from_vec_unchecked(
        width: usize,
        height: usize,
        channels: usize,
        data: Vec<f32>,
    ) -> Self {
        debug_assert_eq!(data.len(), width * height * channels);
        Self {
            width,
            height,
            channels,
            data,
        }
    }
}

/// ITU-R 601 luma weights used for all RGB-to-gray conversions.
pub const LUMA_WEIGHTS: [f32; 3] = [0.299, 0.587, 0.114];

/// Converts to a single-channel image using ITU-R 601 luma weights.
/// Identity for 1-channel input.
pub fn to_grayscale(img: &ImageBuf) -> ImageBuf {
    if img.channels == 1 {
        return img.clone();
    }
    let mut out = Vec::with_capacity(img.width * img.height);
    for px in img.data.chunks_exact(3) {
        let y = LUMA_WEIGHTS[0] * px[0] + LUMA_WEIGHTS[1] * px[1] + LUMA_WEIGHTS[2] * px[2];
        out.push(y.clamp(0.0, 1.0));
    }
    ImageBuf::from_vec_unchecked(img.width, img.height, 1, out)
}

/// Bilinear resize with half-pixel-center sample mapping and clamp-to-edge
/// borders.
pub fn resize_bilinear(img: &ImageBuf, w: usize, h: usize) -> Result<ImageBuf, ImagingError> {
    if w == 0 || h == 0 {
        return Err(ImagingError::ZeroDimension(w, h));
    }
    if w == img.width && h == img.height {
        return Ok(img.clone());
    }
    let sx = img.width as f32 / w as f32;
    let sy = img.height as f32 / h as f32;
    let mut out = vec![0.0f32; w * h * img.channels];
    for y in 0..h {
        let src_y = (y as f32 + 0.5) * sy - 0.5;
        for x in 0..w {
            let src_x = (x as f32 + 0.5) * sx - 0.5;
            for c in 0..img.channels {
                out[(y * w + x) * img.channels + c] =
                    img.sample_bilinear(src_x, src_y, c).clamp(0.0, 1.0);
            }
        }
    }
    Ok(ImageBuf::from_vec_unchecked(w, h, img.channels, out))
}

/// Peak signal-to-noise ratio in dB, capped at 99 dB (the zero-MSE
/// sentinel).
pub fn psnr(a: &ImageBuf, b: &ImageBuf) -> Result<f64, ImagingError> {
    if a.width != b.width || a.height != b.height || a.channels != b.channels {
        return Err(ImagingError::ShapeMismatch(format!(
            "{}x{}x{} vs {}x{}x{}",
            a.width, a.height, a.channels, b.width, b.height, b.channels
        )));
    }
    let mut acc = 0.0f64;
    for (&x, &y) in a.data.iter().zip(&b.data) {
        let d = (x - y) as f64;
        acc += d * d;
    }
    let mse = acc / a.data.len() as f64;
    if mse == 0.0 {
        return Ok(99.0);
    }
    Ok((10.0 * (1.0 / mse).log10()).min(99.0))
}
