//! Binary PGM/PPM images and intensity-driven point sampling.

use std::io::Write;
use std::path::Path;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::point::DataPoint;

/// 8-bit raster, row-major, 1 (gray) or 3 (RGB) channels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<u8>,
}

impl Image {
    pub fn new_gray(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        Self::new(width, height, 1, data)
    }

    pub fn new_rgb(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        Self::new(width, height, 3, data)
    }

    fn new(width: usize, height: usize, channels: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 || data.len() != width * height * channels {
            return Err(Error::InvalidArgument(format!(
                "{width}x{height}x{channels} image needs {} bytes, got {}",
                width * height * channels,
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
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

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    /// RGB triple at column `x`, row `y` (gray images repeat the value).
    pub fn rgb(&self, x: usize, y: usize) -> [u8; 3] {
        let o = (y * self.width + x) * self.channels;
        if self.channels == 1 {
            [self.data[o]; 3]
        } else {
            [self.data[o], self.data[o + 1], self.data[o + 2]]
        }
    }

    /// Sampling weight of a pixel: its value for gray images, R+G+B for color.
    pub fn weight(&self, x: usize, y: usize) -> f64 {
        let o = (y * self.width + x) * self.channels;
        self.data[o..o + self.channels]
            .iter()
            .map(|&v| f64::from(v))
            .sum()
    }

    /// Row-major pixel weights.
    pub fn weights(&self) -> Vec<f64> {
        self.data
            .chunks_exact(self.channels)
            .map(|px| px.iter().map(|&v| f64::from(v)).sum())
            .collect()
    }

    /// Gray version: mean of the channels, rounded.
    pub fn to_gray(&self) -> Image {
        if self.channels == 1 {
            return self.clone();
        }
        let data = self
            .data
            .chunks_exact(3)
            .map(|p| ((u16::from(p[0]) + u16::from(p[1]) + u16::from(p[2]) + 1) / 3) as u8)
            .collect();
        Image {
            width: self.width,
            height: self.height,
            channels: 1,
            data,
        }
    }

    /// Box-filter reduction by an integer factor; trailing rows and columns
    /// that do not fill a block are dropped.
    pub fn downsample(&self, factor: usize) -> Result<Image> {
        let (w, h) = (self.width / factor.max(1), self.height / factor.max(1));
        if factor == 0 || w == 0 || h == 0 {
            return Err(Error::InvalidArgument(format!(
                "cannot reduce {}x{} by {factor}",
                self.width, self.height
            )));
        }
        let c = self.channels;
        let area = (factor * factor) as u32;
        let mut data = Vec::with_capacity(w * h * c);
        for by in 0..h {
            for bx in 0..w {
                for ch in 0..c {
                    let mut sum = 0u32;
                    for y in by * factor..(by + 1) * factor {
                        for x in bx * factor..(bx + 1) * factor {
                            sum += u32::from(self.data[(y * self.width + x) * c + ch]);
                        }
                    }
                    data.push(((sum + area / 2) / area) as u8);
                }
            }
        }
        Image::new(w, h, c, data)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::decode(&bytes).map_err(|message| Error::Format {
            path: path.to_path_buf(),
            message,
        })
    }

    /// Parses binary P5 (gray) or P6 (RGB) with maxval up to 255.
    pub fn decode(bytes: &[u8]) -> std::result::Result<Self, String> {
        let mut pos = 0usize;
        let magic = header_token(bytes, &mut pos).ok_or("missing magic number")?;
        let channels = match magic.as_str() {
            "P5" => 1,
            "P6" => 3,
            other => return Err(format!("unsupported format {other:?}; expected P5 or P6")),
        };
        let mut field = |name: &str| -> std::result::Result<usize, String> {
            let tok = header_token(bytes, &mut pos).ok_or(format!("missing {name}"))?;
            tok.parse::<usize>()
                .map_err(|_| format!("invalid {name} {tok:?}"))
        };
        let width = field("width")?;
        let height = field("height")?;
        let maxval = field("maxval")?;
        if maxval == 0 || maxval > 255 {
            return Err(format!("maxval {maxval} not supported (1..=255)"));
        }
        if width == 0 || height == 0 {
            return Err("empty image".into());
        }
        // exactly one whitespace byte separates the header from the raster
        pos += 1;
        let need = width
            .checked_mul(height)
            .and_then(|v| v.checked_mul(channels))
            .ok_or("image too large")?;
        let raster = bytes
            .get(pos..pos + need)
            .ok_or(format!("truncated raster: need {need} bytes"))?;
        let data = if maxval == 255 {
            raster.to_vec()
        } else {
            raster
                .iter()
                .map(|&v| ((u32::from(v) * 255 + maxval as u32 / 2) / maxval as u32).min(255) as u8)
                .collect()
        };
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    pub fn encode(&self) -> Vec<u8> {
        let magic = if self.channels == 1 { "P5" } else { "P6" };
        let mut out = format!("{magic}\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.data);
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(&self.encode()).map_err(|e| Error::io(path, e))
    }
}

fn header_token(bytes: &[u8], pos: &mut usize) -> Option<String> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() && bytes[*pos] != b'#' {
        *pos += 1;
    }
    (start < *pos).then(|| String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
}

/// Draws `n` points with per-pixel probability proportional to the pixel
/// weight, each jittered uniformly inside its pixel: pixel (column `i`,
/// row `j`) covers `[i, i+1) x [j, j+1)`. Ids run from 0.
pub fn sample_image(image: &Image, n: usize, seed: u64) -> Result<Vec<DataPoint>> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample count must be >= 1".into()));
    }
    let weights = image.weights();
    if weights.iter().all(|&w| w == 0.0) {
        return Err(Error::ZeroMeasure);
    }
    let dist = WeightedIndex::new(&weights).map_err(|_| Error::ZeroMeasure)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = image.width();
    Ok((0..n)
        .map(|id| {
            let px = dist.sample(&mut rng);
            let (i, j) = (px % w, px / w);
            let u: f64 = rng.random();
            let v: f64 = rng.random();
            DataPoint::new(id as u64, vec![i as f64 + u, j as f64 + v])
        })
        .collect())
}

/// Mean structural similarity of the gray versions of two equally sized
/// images, over 8x8 windows at stride 4 with the usual stabilizing
/// constants for 8-bit data.
pub fn ssim(a: &Image, b: &Image) -> Result<f64> {
    if (a.width, a.height) != (b.width, b.height) {
        return Err(Error::DimensionMismatch {
            expected: a.width * a.height,
            found: b.width * b.height,
        });
    }
    const WIN: usize = 8;
    const STRIDE: usize = 4;
    if a.width < WIN || a.height < WIN {
        return Err(Error::InvalidArgument("images must be at least 8x8".into()));
    }
    let (ga, gb) = (a.to_gray(), b.to_gray());
    let c1 = (0.01f64 * 255.0).powi(2);
    let c2 = (0.03f64 * 255.0).powi(2);
    let n = (WIN * WIN) as f64;
    let mut total = 0.0;
    let mut windows = 0usize;
    for y0 in (0..=a.height - WIN).step_by(STRIDE) {
        for x0 in (0..=a.width - WIN).step_by(STRIDE) {
            let (mut sa, mut sb, mut saa, mut sbb, mut sab) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for y in y0..y0 + WIN {
                for x in x0..x0 + WIN {
                    let i = y * a.width + x;
                    let (u, v) = (f64::from(ga.data[i]), f64::from(gb.data[i]));
                    sa += u;
                    sb += v;
                    saa += u * u;
                    sbb += v * v;
                    sab += u * v;
                }
            }
            let (ma, mb) = (sa / n, sb / n);
            let va = saa / n - ma * ma;
            let vb = sbb / n - mb * mb;
            let cov = sab / n - ma * mb;
            total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2))
                / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            windows += 1;
        }
    }
    Ok(total / windows as f64)
}
