use crate::domain::{FindingKind, FindingMap, RawOutput, ScoreGrid, ScoredBox, StudyOutputs};
use crate::error::{Result, TrxError};

use super::{overlay_layers, to_u8, ColorScale, HeatLayer, TRANSPARENT};

fn colorize_values(width: usize, height: usize, values: &[f64], scale: &ColorScale) -> Result<HeatLayer> {
    HeatLayer::new(width, height, values.iter().map(|&v| scale.pixel(v)).collect())
}

/// Per-pixel rendering of a segmentation score grid.
pub fn colorize_mask(grid: &ScoreGrid, scale: &ColorScale) -> HeatLayer {
    let values: Vec<f64> = grid.cells().iter().map(|&v| v as f64).collect();
    colorize_values(grid.width(), grid.height(), &values, scale).expect("grid dimensions are valid")
}

/// Bilinear resize with aligned corners: source corners land exactly on
/// target corners. Returns row-major values.
pub fn upsample_bilinear(grid: &ScoreGrid, target_w: usize, target_h: usize) -> Result<Vec<f64>> {
    if target_w == 0 || target_h == 0 {
        return Err(TrxError::invalid("target dimensions must be positive"));
    }
    let (w, h) = (grid.width(), grid.height());
    let coord = |i: usize, src: usize, dst: usize| -> (usize, usize, f64) {
        if dst == 1 || src == 1 {
            return (0, 0, 0.0);
        }
        let p = i as f64 * (src - 1) as f64 / (dst - 1) as f64;
        let lo = (p.floor() as usize).min(src - 2);
        (lo, lo + 1, p - lo as f64)
    };
    let mut out = Vec::with_capacity(target_w * target_h);
    for y in 0..target_h {
        let (y0, y1, fy) = coord(y, h, target_h);
        for x in 0..target_w {
            let (x0, x1, fx) = coord(x, w, target_w);
            let v = |xx: usize, yy: usize| grid.get(xx, yy) as f64;
            let top = v(x0, y0) * (1.0 - fx) + v(x1, y0) * fx;
            let bottom = v(x0, y1) * (1.0 - fx) + v(x1, y1) * fx;
            out.push(top * (1.0 - fy) + bottom * fy);
        }
    }
    Ok(out)
}

/// Upsamples a class activation map to the target raster and colorizes it.
pub fn render_cam(cam: &ScoreGrid, target_w: usize, target_h: usize, scale: &ColorScale) -> Result<HeatLayer> {
    if target_w < cam.width() || target_h < cam.height() {
        return Err(TrxError::invalid(format!(
            "target {target_w}x{target_h} is smaller than the {}x{} activation map",
            cam.width(),
            cam.height()
        )));
    }
    let values = upsample_bilinear(cam, target_w, target_h)?;
    colorize_values(target_w, target_h, &values, scale)
}

/// Fills the ellipse inscribed in `bbox` with a radial gradient: red at the
/// center fading to blue at the rim, alpha `confidence * (1 - r)` where `r`
/// is the normalized radius. Pixels are sampled at integer coordinates;
/// pixels outside the ellipse stay transparent.
pub fn render_box_ellipse(bbox: &ScoredBox, width: usize, height: usize) -> Result<HeatLayer> {
    let mut layer = HeatLayer::transparent(width, height)?;
    let (ax, ay) = ((bbox.x2() - bbox.x1()) / 2.0, (bbox.y2() - bbox.y1()) / 2.0);
    if ax <= 0.0 || ay <= 0.0 {
        return Ok(layer);
    }
    let (cx, cy) = ((bbox.x1() + bbox.x2()) / 2.0, (bbox.y1() + bbox.y2()) / 2.0);
    // Saturating casts clamp negative bounds to 0; r > 1 rejects the rest.
    let x_hi = bbox.x2().floor().min(width as f64 - 1.0);
    let y_hi = bbox.y2().floor().min(height as f64 - 1.0);
    if x_hi < 0.0 || y_hi < 0.0 {
        return Ok(layer);
    }
    for y in bbox.y1().ceil() as usize..=y_hi as usize {
        for x in bbox.x1().ceil() as usize..=x_hi as usize {
            let (dx, dy) = ((x as f64 - cx) / ax, (y as f64 - cy) / ay);
            let r = (dx * dx + dy * dy).sqrt();
            if r > 1.0 {
                continue;
            }
            let alpha = to_u8(bbox.confidence() * (1.0 - r));
            layer.set(x, y, [to_u8(1.0 - r), 0, to_u8(r), alpha]);
        }
    }
    Ok(layer)
}

/// All boxes of a detection list, composited in list order.
pub fn render_boxes(boxes: &[ScoredBox], width: usize, height: usize) -> Result<HeatLayer> {
    let layers = boxes
        .iter()
        .map(|b| render_box_ellipse(b, width, height))
        .collect::<Result<Vec<_>>>()?;
    if layers.is_empty() {
        return HeatLayer::transparent(width, height);
    }
    overlay_layers(&layers)
}

/// Per-finding layers for one study on the raster of its segmentation masks.
///
/// The opacity classifier only emits a softmax pair; its layer comes from
/// `cam` when an activation map is available and is transparent otherwise.
pub fn render_study_layers(
    outputs: &StudyOutputs,
    cam: Option<&ScoreGrid>,
    scale: &ColorScale,
) -> Result<FindingMap<HeatLayer>> {
    let (w, h) = match outputs.get(FindingKind::Pneumothorax) {
        RawOutput::MaskGrid(g) => (g.width(), g.height()),
        _ => unreachable!("kind binding enforced by StudyOutputs"),
    };
    let mut layers = Vec::with_capacity(4);
    for kind in FindingKind::ALL {
        let layer = match outputs.get(kind) {
            RawOutput::MaskGrid(g) => {
                if (g.width(), g.height()) != (w, h) {
                    return Err(TrxError::DimensionMismatch(format!(
                        "study {}: {kind} mask is {}x{}, expected {w}x{h}",
                        outputs.study_id(),
                        g.width(),
                        g.height()
                    )));
                }
                colorize_mask(g, scale)
            }
            RawOutput::SoftmaxPair(_) => match cam {
                Some(c) => render_cam(c, w, h, scale)?,
                None => HeatLayer::new(w, h, vec![TRANSPARENT; w * h])?,
            },
            RawOutput::BoxList(boxes) => render_boxes(boxes, w, h)?,
        };
        layers.push(layer);
    }
    let mut it = layers.into_iter();
    Ok(FindingMap::from_fn(|_| it.next().expect("four layers")))
}
