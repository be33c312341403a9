//! Heat-layer rendering and fusion into the unified heatmap.
//!
//! Every detector output is rendered to an RGBA layer on one color scale.
//! Alpha 0 marks non-activated pixels. The four layers are composited with
//! source-over in finding order and median-filtered with a 5x5 kernel.

mod blend;
mod render;

pub use blend::{median_blur5, overlay_layers, unify_heatmaps, MEDIAN_KERNEL};
pub use render::{colorize_mask, render_box_ellipse, render_boxes, render_cam, render_study_layers, upsample_bilinear};

use crate::error::{Result, TrxError};

pub type Rgba = [u8; 4];

pub const TRANSPARENT: Rgba = [0, 0, 0, 0];

/// Row-major RGBA raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeatLayer {
    width: usize,
    height: usize,
    pixels: Vec<Rgba>,
}

impl HeatLayer {
    pub fn new(width: usize, height: usize, pixels: Vec<Rgba>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(TrxError::invalid("layer dimensions must be positive"));
        }
        if pixels.len() != width * height {
            return Err(TrxError::DimensionMismatch(format!(
                "{width}x{height} layer needs {} pixels, got {}",
                width * height,
                pixels.len()
            )));
        }
        Ok(HeatLayer { width, height, pixels })
    }

    pub fn transparent(width: usize, height: usize) -> Result<Self> {
        HeatLayer::new(width, height, vec![TRANSPARENT; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[Rgba] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> Rgba {
        self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, px: Rgba) {
        self.pixels[y * self.width + x] = px;
    }

    pub fn is_fully_transparent(&self) -> bool {
        self.pixels.iter().all(|p| p[3] == 0)
    }

    /// Flattened RGBA bytes, row-major, suitable for PNG encoding or a
    /// canvas `ImageData`.
    pub fn to_rgba_bytes(&self) -> Vec<u8> {
        self.pixels.iter().flatten().copied().collect()
    }

    fn same_dims(&self, other: &HeatLayer) -> bool {
        self.width == other.width && self.height == other.height
    }
}

/// Common color scale: a hue ramp from blue (0) through cyan, green and
/// yellow to red (1). Activations at or below `activation_floor` render
/// transparent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColorScale {
    pub activation_floor: f64,
}

impl Default for ColorScale {
    fn default() -> Self {
        ColorScale { activation_floor: 0.1 }
    }
}

impl ColorScale {
    pub fn new(activation_floor: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&activation_floor) {
            return Err(TrxError::invalid(format!(
                "activation floor {activation_floor} outside [0, 1]"
            )));
        }
        Ok(ColorScale { activation_floor })
    }

    /// RGB for an activation in `[0, 1]`; values outside are clamped.
    pub fn map(&self, activation: f64) -> [u8; 3] {
        let t = activation.clamp(0.0, 1.0);
        // Hue in sixths of the circle: 4 (blue) at t = 0, 0 (red) at t = 1.
        let h = 4.0 * (1.0 - t);
        let x = 1.0 - ((h % 2.0) - 1.0).abs();
        let (r, g, b) = match h {
            h if h < 1.0 => (1.0, x, 0.0),
            h if h < 2.0 => (x, 1.0, 0.0),
            h if h < 3.0 => (0.0, 1.0, x),
            _ => (0.0, x, 1.0),
        };
        [to_u8(r), to_u8(g), to_u8(b)]
    }

    /// Pixel for an activation: transparent at or below the floor, otherwise
    /// the ramp color with alpha proportional to the activation.
    pub fn pixel(&self, activation: f64) -> Rgba {
        if activation <= self.activation_floor {
            return TRANSPARENT;
        }
        let [r, g, b] = self.map(activation);
        [r, g, b, to_u8(activation)]
    }
}

/// Rounds a unit-interval value to a byte.
pub(crate) fn to_u8(unit: f64) -> u8 {
    (unit.clamp(0.0, 1.0) * 255.0).round() as u8
}
