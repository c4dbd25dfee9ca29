//! Pixel-level image operations: bilinear resize, channel truncation,
//! rotation/zoom with constant fill, bounded integer channel noise, and the
//! expansion of one image into its `b * (c + 1)` variants.
//!
//! Sampling convention, shared by resize and orient/zoom: pixel centers sit
//! at half-integer coordinates, output pixel (ox, oy) samples the source at
//! the inverse-mapped location with bilinear interpolation, and samples are
//! rounded half-up then clamped to [0, 255]. Positive rotation angles turn
//! the image content counterclockwise; rotation is about the geometric
//! center. Sample points falling outside the pixel-center hull by more than
//! 1e-9 take the constant fill value.

use crate::dataset_plan::AugmentationPlan;
use crate::error::{Error, Result};
use crate::rng::{chacha8_from_seed, splitmix64_stream, uniform_u64};

/// Largest absolute per-channel shift applied by [`perturb_noise`].
pub const MAX_NOISE_SHIFT: i16 = 2;

/// Row-major 8-bit image with 3 or 4 channels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    width: u32,
    height: u32,
    channels: u8,
    pixels: Vec<u8>,
}

impl Image {
    pub fn new(width: u32, height: u32, channels: u8, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyImage { width, height });
        }
        if channels != 3 && channels != 4 {
            return Err(Error::UnsupportedChannels {
                expected: "3 or 4",
                actual: channels,
            });
        }
        let expected = width as usize * height as usize * channels as usize;
        if pixels.len() != expected {
            return Err(Error::PixelBufferMismatch {
                width,
                height,
                channels,
                expected,
                actual: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            channels,
            pixels,
        })
    }

    /// Constant-valued image.
    pub fn filled(width: u32, height: u32, channels: u8, value: u8) -> Result<Self> {
        let len = width as usize * height as usize * channels as usize;
        Self::new(width, height, channels, vec![value; len])
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn channels(&self) -> u8 {
        self.channels
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    pub fn get(&self, x: u32, y: u32, channel: u8) -> u8 {
        debug_assert!(x < self.width && y < self.height && channel < self.channels);
        self.pixels[(y as usize * self.width as usize + x as usize) * self.channels as usize
            + channel as usize]
    }
}

/// Bilinear sample of one channel at continuous pixel coordinates, with edge
/// clamping of the four neighbours.
fn sample_bilinear(img: &Image, sx: f64, sy: f64, channel: u8) -> f64 {
    let max_x = img.width as i64 - 1;
    let max_y = img.height as i64 - 1;
    let x0 = sx.floor() as i64;
    let y0 = sy.floor() as i64;
    let fx = sx - x0 as f64;
    let fy = sy - y0 as f64;
    let clamp_x = |x: i64| x.clamp(0, max_x) as u32;
    let clamp_y = |y: i64| y.clamp(0, max_y) as u32;
    let v00 = img.get(clamp_x(x0), clamp_y(y0), channel) as f64;
    let v01 = img.get(clamp_x(x0 + 1), clamp_y(y0), channel) as f64;
    let v10 = img.get(clamp_x(x0), clamp_y(y0 + 1), channel) as f64;
    let v11 = img.get(clamp_x(x0 + 1), clamp_y(y0 + 1), channel) as f64;
    v00 * (1.0 - fx) * (1.0 - fy) + v01 * fx * (1.0 - fy) + v10 * (1.0 - fx) * fy + v11 * fx * fy
}

fn round_to_byte(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// Resize to `target_w x target_h` with bilinear interpolation. Channel
/// count is preserved; a same-size resize is byte-identical.
pub fn resize(img: &Image, target_w: u32, target_h: u32) -> Result<Image> {
    if target_w == 0 || target_h == 0 {
        return Err(Error::EmptyImage {
            width: target_w,
            height: target_h,
        });
    }
    if target_w == img.width && target_h == img.height {
        return Ok(img.clone());
    }
    let scale_x = img.width as f64 / target_w as f64;
    let scale_y = img.height as f64 / target_h as f64;
    let channels = img.channels;
    let mut pixels = Vec::with_capacity(target_w as usize * target_h as usize * channels as usize);
    for oy in 0..target_h {
        let sy = (oy as f64 + 0.5) * scale_y - 0.5;
        for ox in 0..target_w {
            let sx = (ox as f64 + 0.5) * scale_x - 0.5;
            for channel in 0..channels {
                pixels.push(round_to_byte(sample_bilinear(img, sx, sy, channel)));
            }
        }
    }
    Image::new(target_w, target_h, channels, pixels)
}

/// Keep only the first three channels, dropping the alpha plane of 4-channel
/// input. 3-channel input is returned unchanged.
pub fn truncate_channels(img: &Image) -> Result<Image> {
    match img.channels {
        3 => Ok(img.clone()),
        4 => {
            let mut pixels = Vec::with_capacity(img.width as usize * img.height as usize * 3);
            for chunk in img.pixels.chunks_exact(4) {
                pixels.extend_from_slice(&chunk[..3]);
            }
            Image::new(img.width, img.height, 3, pixels)
        }
        other => Err(Error::UnsupportedChannels {
            expected: "3 or 4",
            actual: other,
        }),
    }
}

/// Rotation angle, zoom factor, and out-of-frame fill for one orientation
/// variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientZoomSpec {
    pub rotation_degrees: f64,
    pub zoom: f64,
    pub fill: u8,
}

impl OrientZoomSpec {
    pub fn new(rotation_degrees: f64, zoom: f64, fill: u8) -> Result<Self> {
        if !rotation_degrees.is_finite() {
            return Err(Error::OutOfRange {
                what: "rotation_degrees".to_string(),
                value: rotation_degrees,
                min: f64::NEG_INFINITY,
                max: f64::INFINITY,
            });
        }
        if !zoom.is_finite() || zoom <= 0.0 {
            return Err(Error::NonPositiveZoom { zoom });
        }
        Ok(Self {
            rotation_degrees,
            zoom,
            fill,
        })
    }

    /// No rotation, no zoom, black fill.
    pub fn identity() -> Self {
        Self {
            rotation_degrees: 0.0,
            zoom: 1.0,
            fill: 0,
        }
    }
}

const FRAME_EPSILON: f64 = 1e-9;

/// Rotate about the image center and scale by `zoom`, resampling to the
/// original dimensions; source locations outside the input take `fill`.
/// Zoom above 1 magnifies the content, below 1 shrinks it into a filled
/// border. The identity spec is the identity on bytes.
pub fn orient_zoom(img: &Image, spec: &OrientZoomSpec) -> Result<Image> {
    let theta = spec.rotation_degrees.to_radians();
    let (sin, cos) = theta.sin_cos();
    let cx = img.width as f64 / 2.0;
    let cy = img.height as f64 / 2.0;
    let max_x = (img.width - 1) as f64;
    let max_y = (img.height - 1) as f64;
    let channels = img.channels;
    let mut pixels =
        Vec::with_capacity(img.width as usize * img.height as usize * channels as usize);
    for oy in 0..img.height {
        for ox in 0..img.width {
            let dx = ox as f64 + 0.5 - cx;
            let dy = oy as f64 + 0.5 - cy;
            // Inverse map: rotate the output offset by theta, undo the zoom.
            let sx = cx + (cos * dx - sin * dy) / spec.zoom - 0.5;
            let sy = cy + (sin * dx + cos * dy) / spec.zoom - 0.5;
            let outside = sx < -FRAME_EPSILON
                || sx > max_x + FRAME_EPSILON
                || sy < -FRAME_EPSILON
                || sy > max_y + FRAME_EPSILON;
            if outside {
                for _ in 0..channels {
                    pixels.push(spec.fill);
                }
            } else {
                for channel in 0..channels {
                    pixels.push(round_to_byte(sample_bilinear(img, sx, sy, channel)));
                }
            }
        }
    }
    Image::new(img.width, img.height, channels, pixels)
}

/// Seed for one noise variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoiseSpec {
    pub seed: u64,
}

/// Shift every channel value by an integer drawn uniformly from
/// {-2, ..., 2}, clamped to [0, 255]. Values are visited in row-major
/// order, one draw per channel value, so output is fully determined by
/// (image, seed).
pub fn perturb_noise(img: &Image, spec: &NoiseSpec) -> Result<Image> {
    if img.channels != 3 {
        return Err(Error::UnsupportedChannels {
            expected: "3",
            actual: img.channels,
        });
    }
    let mut rng = chacha8_from_seed(spec.seed);
    let span = (2 * MAX_NOISE_SHIFT + 1) as u64;
    let pixels = img
        .pixels
        .iter()
        .map(|&v| {
            let shift = uniform_u64(&mut rng, span) as i16 - MAX_NOISE_SHIFT;
            (v as i16 + shift).clamp(0, 255) as u8
        })
        .collect();
    Image::new(img.width, img.height, 3, pixels)
}

/// Evenly spaced default orientation variants: rotations across
/// [-15, +15] degrees paired with zooms across [0.9, 1.1]. A single
/// variant is the identity. Only the count `b` is contractual; callers
/// may pass any specs they like to [`augment_image`].
pub fn default_orient_specs(b: u64, fill: u8) -> Vec<OrientZoomSpec> {
    if b == 1 {
        return vec![OrientZoomSpec {
            fill,
            ..OrientZoomSpec::identity()
        }];
    }
    (0..b)
        .map(|i| {
            let t = i as f64 / (b - 1) as f64;
            OrientZoomSpec {
                rotation_degrees: -15.0 + 30.0 * t,
                zoom: 0.9 + 0.2 * t,
                fill,
            }
        })
        .collect()
}

/// Expand one image into `b * (c + 1)` variants: for each of the `b`
/// orientation specs, the oriented control followed by its `c` noise
/// variants. Per-variant noise seeds derive from `(seed, variant index)`,
/// so variants are independent and order-free to compute.
pub fn augment_image(
    img: &Image,
    plan: &AugmentationPlan,
    orient_specs: &[OrientZoomSpec],
    seed: u64,
) -> Result<Vec<Image>> {
    if orient_specs.len() as u64 != plan.b() {
        return Err(Error::OrientationSpecCount {
            expected: plan.b(),
            actual: orient_specs.len(),
        });
    }
    let factor = plan.replication_factor()?;
    let capacity = usize::try_from(factor).map_err(|_| Error::CountOverflow {
        what: format!("{factor} augmentation variants"),
    })?;
    let c = plan.c();
    let mut out = Vec::with_capacity(capacity);
    for (orient_index, spec) in orient_specs.iter().enumerate() {
        let oriented = orient_zoom(img, spec)?;
        for noise_index in 0..=c {
            if noise_index == 0 {
                out.push(oriented.clone());
            } else {
                let variant_index = orient_index as u64 * (c + 1) + noise_index;
                let noise_seed = splitmix64_stream(seed, variant_index);
                out.push(perturb_noise(&oriented, &NoiseSpec { seed: noise_seed })?);
            }
        }
    }
    Ok(out)
}
