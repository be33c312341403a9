pub const RETINA_MIN_SIDE: u32 = 800;
pub const RETINA_MAX_SIDE: u32 = 1333;

/// Detector input size: scale the short side to `min_side` unless that
/// pushes the long side past `max_side`, in which case the long side is
/// scaled to `max_side`. Output dimensions are floored; the scale factor is
/// returned alongside.
pub fn retina_resize(w: u32, h: u32, min_side: u32, max_side: u32) -> (u32, u32, f64) {
    let (short, long) = (w.min(h).max(1) as u64, w.max(h).max(1) as u64);
    // Scale as an exact ratio so floored dimensions land on the bound.
    let (num, den) = if long * min_side as u64 > max_side as u64 * short {
        (max_side as u64, long)
    } else {
        (min_side as u64, short)
    };
    let apply = |side: u32| (side as u64 * num / den) as u32;
    (apply(w), apply(h), num as f64 / den as f64)
}
