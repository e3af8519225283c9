/// Chromaticity coordinates of a mean color. Neutral colors map to `(0, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UvColor {
    pub u: f64,
    pub v: f64,
    pub magnitude: f64,
}

/// Maps a mean RGB triple to `(u, v)` with `phi = (r + g + b) / 3`:
/// `u = (2 phi - g - b) / phi`, `v = max((phi - g) / phi, (phi - b) / phi)`.
///
/// Returns `None` for black (`phi <= 0`), which callers treat as non-neutral.
pub fn uv_transform(rgb: [f64; 3]) -> Option<UvColor> {
    let [_, g, b] = rgb;
    let phi = rgb.iter().sum::<f64>() / 3.0;
    if phi <= 0.0 {
        return None;
    }
    let u = (2.0 * phi - g - b) / phi;
    let v = ((phi - g) / phi).max((phi - b) / phi);
    Some(UvColor {
        u,
        v,
        magnitude: u.hypot(v),
    })
}
