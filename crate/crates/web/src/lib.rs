//! Browser bindings: circle-packing pictures, return-probability curves and
//! volume growth for small subdivision levels.

use snowlab_core::packing::{self, Packing, DEFAULT_TOL};
use snowlab_core::subdivision::{level_graph_guarded, BaseKind, SubdivisionComplex};
use snowlab_core::walk;
use snowlab_core::{Error, Result};
use wasm_bindgen::prelude::*;

/// Largest level the page will pack.
pub const MAX_PACK_LEVEL: u32 = 3;
/// Largest level for walks and balls.
pub const MAX_GRAPH_LEVEL: u32 = 4;
pub const MAX_STEPS: usize = 20_000;

fn complex(kind: &str, level: u32, max_level: u32) -> Result<(SubdivisionComplex, usize)> {
    let kind: BaseKind = kind.parse()?;
    let (c, base) = level_graph_guarded(kind, level, max_level)?;
    Ok((c, base.0))
}

pub fn packing_picture(kind: &str, level: u32) -> Result<String> {
    let (c, base) = complex(kind, level, MAX_PACK_LEVEL)?;
    let disk = snowlab_core::driver::disk_for(&c.graph, base)?;
    let p = Packing::compute(disk, 1.0, DEFAULT_TOL)?;
    Ok(packing::packing_svg(&p))
}

/// `(n, p_n + p_{n+1})` interleaved at about 60 log-spaced times, then the
/// fitted slope over the last decade.
pub fn return_curve(kind: &str, level: u32, steps: usize) -> Result<Vec<f64>> {
    if !(10..=MAX_STEPS).contains(&steps) {
        return Err(Error::InvalidInput(format!("steps must lie in 10..={MAX_STEPS}")));
    }
    let (c, base) = complex(kind, level, MAX_GRAPH_LEVEL)?;
    let hk = walk::heat_kernel_exact(&c.graph, base, steps, &[])?;
    let mut out = Vec::new();
    for n in walk::geometric_times(1, steps, 60) {
        if let Some(v) = hk.curve.value_at(n) {
            out.push(n as f64);
            out.push(v);
        }
    }
    let slope = hk.curve.fit((steps / 10).max(1), steps, 9).map_or(f64::NAN, |f| f.exponent);
    out.push(slope);
    Ok(out)
}

/// `(r, |B(p, r)|)` interleaved for `r = 1..=eccentricity + 1`, then the
/// fitted exponent over the dyadic radii.
pub fn volume_growth(kind: &str, level: u32) -> Result<Vec<f64>> {
    let (c, base) = complex(kind, level, MAX_GRAPH_LEVEL)?;
    let g = &c.graph;
    let ecc = g.eccentricity(base);
    let radii: Vec<u32> = (1..=ecc + 1).collect();
    let mut out = Vec::with_capacity(2 * radii.len() + 1);
    for (r, s) in radii.iter().zip(g.ball_sizes(base, &radii)) {
        out.push(*r as f64);
        out.push(s as f64);
    }
    let dyadic: Vec<u32> = (0..).map(|k| 2u32 << k).take_while(|&r| 2 * r <= ecc).collect();
    out.push(g.volume_growth_fit(base, &dyadic).map_or(f64::NAN, |f| f.exponent));
    Ok(out)
}

fn js(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(js_name = packingSvg)]
pub fn packing_svg(kind: &str, level: u32) -> std::result::Result<String, JsError> {
    packing_picture(kind, level).map_err(js)
}

#[wasm_bindgen(js_name = returnCurve)]
pub fn return_curve_js(kind: &str, level: u32, steps: usize) -> std::result::Result<Vec<f64>, JsError> {
    return_curve(kind, level, steps).map_err(js)
}

#[wasm_bindgen(js_name = volumeGrowth)]
pub fn volume_growth_js(kind: &str, level: u32) -> std::result::Result<Vec<f64>, JsError> {
    volume_growth(kind, level).map_err(js)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn svg_for_small_levels() {
        let svg = packing_picture("cube", 1).unwrap();
        assert!(svg.starts_with("<svg") && svg.contains("<circle"));
        assert!(packing_picture("dodecahedron", 0).is_ok());
        assert!(packing_picture("cube", MAX_PACK_LEVEL + 1).is_err());
        assert!(packing_picture("torus", 1).is_err());
    }

    #[test]
    fn return_curve_is_decreasing_pairs() {
        let v = return_curve("cube", 2, 400).unwrap();
        assert_eq!(v.len() % 2, 1);
        let slope = *v.last().unwrap();
        assert!(slope < 0.0, "{slope}");
        assert!(return_curve("cube", 2, 5).is_err());
    }

    #[test]
    fn volume_growth_reaches_everything() {
        let v = volume_growth("cube", 2).unwrap();
        let last_size = v[v.len() - 2];
        assert_eq!(last_size, 1016.0);
        assert!(v.last().unwrap().is_finite());
    }
}
