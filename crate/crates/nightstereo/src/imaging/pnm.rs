//! Binary PNM (P5 gray / P6 RGB) reader and writer.
//!
//! Maxval 255 or 65535; 16-bit samples are big-endian per the PNM
//! convention. The writer never emits comments, the reader tolerates them.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::{ImageBuf, ImagingError};

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderCursor<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    /// Skips whitespace and `#` comments (which run to end of line).
    fn skip_separators(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn read_token(&mut self) -> Result<(usize, &'a [u8]), ImagingError> {
        self.skip_separators();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(ImagingError::MalformedHeader {
                offset: start,
                reason: "unexpected end of header".into(),
            });
        }
        Ok((start, &self.bytes[start..self.pos]))
    }

    fn read_number(&mut self) -> Result<(usize, u32), ImagingError> {
        let (offset, tok) = self.read_token()?;
        let s = std::str::from_utf8(tok).map_err(|_| ImagingError::MalformedHeader {
            offset,
            reason: "non-ASCII header token".into(),
        })?;
        let v = s.parse::<u32>().map_err(|_| ImagingError::MalformedHeader {
            offset,
            reason: format!("expected unsigned integer, got {s:?}"),
        })?;
        Ok((offset, v))
    }
}

/// Loads a binary PNM file (P5 or P6) into a float image. Samples are
/// divided by maxval, so the result lies in `[0, 1]`.
pub fn load_pnm<P: AsRef<Path>>(path: P) -> Result<ImageBuf, ImagingError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| ImagingError::IoFailure {
        path: path.display().to_string(),
        source,
    })?;
    decode_pnm(&bytes)
}

/// Decodes PNM bytes; split out so tests can exercise malformed inputs
/// without touching the filesystem.
pub(crate) fn decode_pnm(bytes: &[u8]) -> Result<ImageBuf, ImagingError> {
    let mut cur = HeaderCursor::new(bytes);
    let (magic_off, magic) = cur.read_token()?;
    let channels = match magic {
        b"P5" => 1,
        b"P6" => 3,
        other => {
            return Err(ImagingError::MalformedHeader {
                offset: magic_off,
                reason: format!(
                    "unsupported magic {:?} (expected P5 or P6)",
                    String::from_utf8_lossy(other)
                ),
            })
        }
    };
    let (woff, width) = cur.read_number()?;
    let (hoff, height) = cur.read_number()?;
    if width == 0 || height == 0 {
        return Err(ImagingError::MalformedHeader {
            offset: if width == 0 { woff } else { hoff },
            reason: "zero image dimension".into(),
        });
    }
    let (moff, maxval) = cur.read_number()?;
    if maxval != 255 && maxval != 65535 {
        return Err(ImagingError::UnsupportedMaxval {
            offset: moff,
            maxval,
        });
    }
    // exactly one whitespace byte separates header and payload
    if cur.pos >= bytes.len() || !bytes[cur.pos].is_ascii_whitespace() {
        return Err(ImagingError::MalformedHeader {
            offset: cur.pos,
            reason: "missing separator before pixel data".into(),
        });
    }
    let data_start = cur.pos + 1;

    let n_samples = width as usize * height as usize * channels;
    let bytes_per_sample = if maxval == 255 { 1 } else { 2 };
    let expected = n_samples * bytes_per_sample;
    let payload = &bytes[data_start.min(bytes.len())..];
    if payload.len() < expected {
        return Err(ImagingError::TruncatedData {
            offset: data_start + payload.len(),
            expected,
            found: payload.len(),
        });
    }

    let maxval_f = maxval as f32;
    let mut data = Vec::with_capacity(n_samples);
    if bytes_per_sample == 1 {
        data.extend(payload[..expected].iter().map(|&b| b as f32 / maxval_f));
    } else {
        for pair in payload[..expected].chunks_exact(2) {
            let v = u16::from_be_bytes([pair[0], pair[1]]);
            data.push(v as f32 / maxval_f);
        }
    }
    Ok(ImageBuf::from_vec_unchecked(
        width as usize,
        height as usize,
        channels,
        data,
    ))
}

/// Saves as binary P5 (1 channel) or P6 (3 channels) with the requested
/// bit depth. Quantization rounds half up, so a reloaded image differs from
/// the original by at most half a quantization step.
pub fn save_pnm<P: AsRef<Path>>(
    img: &ImageBuf,
    path: P,
    bitdepth: u8,
) -> Result<(), ImagingError> {
    let path = path.as_ref();
    let bytes = encode_pnm(img, bitdepth);
    let mut file = fs::File::create(path).map_err(|source| ImagingError::IoFailure {
        path: path.display().to_string(),
        source,
    })?;
    file.write_all(&bytes).map_err(|source| ImagingError::IoFailure {
        path: path.display().to_string(),
        source,
    })
}

pub(crate) fn encode_pnm(img: &ImageBuf, bitdepth: u8) -> Vec<u8> {
    assert!(bitdepth == 8 || bitdepth == 16, "bitdepth must be 8 or 16");
    let magic = if img.channels() == 1 { "P5" } else { "P6" };
    let maxval: u32 = if bitdepth == 8 { 255 } else { 65535 };
    let mut out = format!("{magic}\n{} {}\n{maxval}\n", img.width(), img.height()).into_bytes();
    if bitdepth == 8 {
        out.extend(img.data().iter().map(|&v| (v * 255.0).round() as u8));
    } else {
        for &v in img.data() {
            let q = (v * 65535.0).round() as u16;
            out.extend_from_slice(&q.to_be_bytes());
        }
    }
    out
}
