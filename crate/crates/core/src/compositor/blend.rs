use crate::domain::FindingMap;
use crate::error::{Result, TrxError};

use super::{HeatLayer, Rgba, TRANSPARENT};

pub const MEDIAN_KERNEL: usize = 5;

/// Source-over composite of `layers` (first at the bottom) onto a fully
/// transparent canvas, with straight (non-premultiplied) alpha.
///
/// Accumulation runs in `f64` and rounds once per pixel. Pixels whose final
/// alpha is 0 come out as `[0, 0, 0, 0]`.
pub fn overlay_layers(layers: &[HeatLayer]) -> Result<HeatLayer> {
    let first = layers
        .first()
        .ok_or_else(|| TrxError::invalid("no layers to overlay"))?;
    if let Some(bad) = layers.iter().find(|l| !l.same_dims(first)) {
        return Err(TrxError::DimensionMismatch(format!(
            "layer {}x{} does not match {}x{}",
            bad.width, bad.height, first.width, first.height
        )));
    }
    let pixels = (0..first.pixels.len())
        .map(|i| composite_pixel(layers.iter().map(|l| l.pixels[i])))
        .collect();
    HeatLayer::new(first.width, first.height, pixels)
}

fn composite_pixel(stack: impl Iterator<Item = Rgba>) -> Rgba {
    let mut color = [0.0f64; 3];
    let mut alpha = 0.0f64;
    for src in stack {
        let sa = src[3] as f64 / 255.0;
        if sa == 0.0 {
            continue;
        }
        let out_a = sa + alpha * (1.0 - sa);
        for (c, &s) in color.iter_mut().zip(&src[..3]) {
            *c = (s as f64 * sa + *c * alpha * (1.0 - sa)) / out_a;
        }
        alpha = out_a;
    }
    let a = (alpha * 255.0).round() as u8;
    if a == 0 {
        return TRANSPARENT;
    }
    let [r, g, b] = color.map(|c| c.round().clamp(0.0, 255.0) as u8);
    [r, g, b, a]
}

/// 5x5 median per channel with edge replication at the borders.
pub fn median_blur5(layer: &HeatLayer) -> HeatLayer {
    let (w, h) = (layer.width, layer.height);
    let row = |y: usize| -> Vec<Rgba> { (0..w).map(|x| median_at(layer, x, y)).collect() };
    #[cfg(feature = "parallel")]
    let rows: Vec<Vec<Rgba>> = {
        use rayon::prelude::*;
        (0..h).into_par_iter().map(row).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<Vec<Rgba>> = (0..h).map(row).collect();
    HeatLayer::new(w, h, rows.concat()).expect("dimensions preserved")
}

fn median_at(layer: &HeatLayer, x: usize, y: usize) -> Rgba {
    let r = (MEDIAN_KERNEL / 2) as isize;
    let clamp = |v: isize, n: usize| v.clamp(0, n as isize - 1) as usize;
    let mut window = [[0u8; MEDIAN_KERNEL * MEDIAN_KERNEL]; 4];
    let mut k = 0;
    for dy in -r..=r {
        let yy = clamp(y as isize + dy, layer.height);
        for dx in -r..=r {
            let xx = clamp(x as isize + dx, layer.width);
            let px = layer.get(xx, yy);
            for ch in 0..4 {
                window[ch][k] = px[ch];
            }
            k += 1;
        }
    }
    let mid = MEDIAN_KERNEL * MEDIAN_KERNEL / 2;
    window.map(|mut vals| *vals.select_nth_unstable(mid).1)
}

/// The unified heatmap: per-finding layers composited in finding order, then
/// median-blurred.
pub fn unify_heatmaps(per_finding: &FindingMap<HeatLayer>) -> Result<HeatLayer> {
    let ordered: Vec<HeatLayer> = per_finding.values().cloned().collect();
    Ok(median_blur5(&overlay_layers(&ordered)?))
}
