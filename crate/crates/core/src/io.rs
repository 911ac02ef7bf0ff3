//! Static SVG figures.

use std::fmt::Write as _;

use crate::hyperbolic::Circle;
use crate::{Error, Result};

const SIZE: f64 = 400.0;

fn header(out: &mut String, w: f64, h: f64) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}">"#
    );
}

/// The leaf `y = s + θx` folded into the unit square, run until it has
/// crossed `crossings` sides. Vertical sides are labelled `a`, horizontal `b`.
pub fn cutting_sequence_svg(theta: f64, s: f64, crossings: usize) -> Result<String> {
    if !(theta > 0.0 && theta.is_finite() && (0.0..1.0).contains(&s)) {
        return Err(Error::Precondition("need θ > 0 and 0 ≤ s < 1".into()));
    }
    let pad = 30.0;
    let mut out = String::new();
    header(&mut out, SIZE + 2.0 * pad, SIZE + 2.0 * pad + 30.0);
    let px = |x: f64| pad + x * SIZE;
    let py = |y: f64| pad + (1.0 - y) * SIZE;
    let _ = writeln!(
        out,
        r#"<rect x="{pad}" y="{pad}" width="{SIZE}" height="{SIZE}" fill="none" stroke="black" stroke-width="1.5"/>"#
    );
    let (mut x, mut y) = (0.0f64, s);
    let mut word = String::with_capacity(crossings);
    for _ in 0..crossings {
        // distance to the right side and to the top side along the leaf
        let tx = 1.0 - x;
        let ty = (1.0 - y) / theta;
        let t = tx.min(ty);
        let (x1, y1) = (x + t, y + theta * t);
        let _ = writeln!(
            out,
            r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="steelblue" stroke-width="1"/>"#,
            px(x),
            py(y),
            px(x1),
            py(y1.min(1.0))
        );
        if tx <= ty {
            word.push('a');
            x = 0.0;
            y = y1;
        } else {
            word.push('b');
            x = x1;
            y = 0.0;
        }
    }
    let _ = writeln!(
        out,
        r#"<text x="{pad}" y="{:.0}" font-family="monospace" font-size="12">θ = {theta:.6}, s = {s:.6}: {}</text>"#,
        SIZE + 2.0 * pad + 10.0,
        if word.len() > 48 { format!("{}…", &word[..48]) } else { word }
    );
    out.push_str("</svg>\n");
    Ok(out)
}

/// Places circles of the given radii along the real axis, each tangent to
/// the previous one.
pub fn chain_from_radii(radii: &[f64]) -> Vec<Circle> {
    let mut out = Vec::with_capacity(radii.len());
    let mut cx = 0.0;
    for (i, &r) in radii.iter().enumerate() {
        if i > 0 {
            cx += radii[i - 1] + r;
        }
        out.push(Circle { cx, cy: 0.0, r });
    }
    out
}

pub fn circle_chain_svg(circles: &[Circle]) -> Result<String> {
    if circles.is_empty() || circles.iter().any(|c| !(c.r > 0.0 && c.r.is_finite() && c.cx.is_finite())) {
        return Err(Error::Precondition("need finite circles with positive radius".into()));
    }
    let min_x = circles.iter().map(|c| c.cx - c.r).fold(f64::INFINITY, f64::min);
    let max_x = circles.iter().map(|c| c.cx + c.r).fold(f64::NEG_INFINITY, f64::max);
    let min_y = circles.iter().map(|c| c.cy - c.r).fold(f64::INFINITY, f64::min);
    let max_y = circles.iter().map(|c| c.cy + c.r).fold(f64::NEG_INFINITY, f64::max);
    let scale = (2.0 * SIZE) / (max_x - min_x).max(max_y - min_y);
    let pad = 10.0;
    let w = (max_x - min_x) * scale + 2.0 * pad;
    let h = (max_y - min_y) * scale + 2.0 * pad;
    let mut out = String::new();
    header(&mut out, w, h);
    for c in circles {
        let _ = writeln!(
            out,
            r#"<circle cx="{:.3}" cy="{:.3}" r="{:.3}" fill="none" stroke="firebrick" stroke-width="1"/>"#,
            pad + (c.cx - min_x) * scale,
            pad + (max_y - c.cy) * scale,
            (c.r * scale).max(0.2)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::QuadraticNumber;
    use crate::words::cutting_sequence;

    #[test]
    fn square_word_matches_exact_sequence() {
        let svg = cutting_sequence_svg(2f64.sqrt(), 0.1, 12).unwrap();
        assert_eq!(svg.matches("<line").count(), 12);
        let exact = cutting_sequence(&QuadraticNumber::sqrt(2), &QuadraticNumber::from_ratio(1, 10), 12).unwrap();
        assert!(svg.contains(&format!(": {exact}<")), "{exact}");
    }

    #[test]
    fn chain_is_tangent() {
        let c = chain_from_radii(&[1.0, 0.5, 0.25]);
        assert_eq!(c[1].cx, 1.5);
        assert_eq!(c[2].cx, 2.25);
        let svg = circle_chain_svg(&c).unwrap();
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(circle_chain_svg(&[]).is_err());
    }
}
