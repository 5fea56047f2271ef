//! Self-contained SVG overlay plots: the true contour (blue, dashed) and
//! its estimate (red, solid) as two closed polylines over plain axes.

use starshape::StarBoundary;

const CANVAS: f64 = 640.0;
const MARGIN: f64 = 40.0;

struct Mapper {
    min_x: f64,
    min_y: f64,
    span: f64,
}

impl Mapper {
    fn new(boundaries: &[&StarBoundary]) -> Mapper {
        let mut min_x = f64::INFINITY;
        let mut max_x = f64::NEG_INFINITY;
        let mut min_y = f64::INFINITY;
        let mut max_y = f64::NEG_INFINITY;
        for b in boundaries {
            for k in 0..b.len() {
                let p = b.point(k);
                min_x = min_x.min(p[0]);
                max_x = max_x.max(p[0]);
                min_y = min_y.min(p[1]);
                max_y = max_y.max(p[1]);
            }
        }
        // Keep the origin and a 5% pad in view; equal aspect.
        min_x = min_x.min(0.0);
        min_y = min_y.min(0.0);
        max_x = max_x.max(0.0);
        max_y = max_y.max(0.0);
        let span = (max_x - min_x).max(max_y - min_y).max(1e-9) * 1.1;
        let pad_x = (span - (max_x - min_x)) / 2.0;
        let pad_y = (span - (max_y - min_y)) / 2.0;
        Mapper {
            min_x: min_x - pad_x,
            min_y: min_y - pad_y,
            span,
        }
    }

    fn x(&self, x: f64) -> f64 {
        MARGIN + (x - self.min_x) / self.span * (CANVAS - 2.0 * MARGIN)
    }

    fn y(&self, y: f64) -> f64 {
        // SVG y grows downward.
        CANVAS - MARGIN - (y - self.min_y) / self.span * (CANVAS - 2.0 * MARGIN)
    }

    fn polyline_points(&self, b: &StarBoundary) -> String {
        let mut parts: Vec<String> = (0..b.len())
            .map(|k| {
                let p = b.point(k);
                format!("{:.3},{:.3}", self.x(p[0]), self.y(p[1]))
            })
            .collect();
        // Close the contour.
        if let Some(first) = parts.first().cloned() {
            parts.push(first);
        }
        parts.join(" ")
    }
}

/// Renders the truth/estimate overlay. The output contains exactly two
/// `<polyline>` elements (truth first) plus the two axis lines.
pub fn overlay_svg(truth: &StarBoundary, estimate: &StarBoundary, title: &str) -> String {
    let m = Mapper::new(&[truth, estimate]);
    let x0 = m.x(0.0);
    let y0 = m.y(0.0);
    let mut svg = String::new();
    svg.push_str(&format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{c}\" height=\"{c}\" \
         viewBox=\"0 0 {c} {c}\">\n",
        c = CANVAS
    ));
    svg.push_str(&format!(
        "  <text x=\"{:.1}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"16\">{}</text>\n",
        CANVAS / 2.0,
        xml_escape(title)
    ));
    // Axes through the origin.
    svg.push_str(&format!(
        "  <line x1=\"{:.1}\" y1=\"{y0:.3}\" x2=\"{:.1}\" y2=\"{y0:.3}\" \
         stroke=\"#999999\" stroke-width=\"1\"/>\n",
        MARGIN,
        CANVAS - MARGIN
    ));
    svg.push_str(&format!(
        "  <line x1=\"{x0:.3}\" y1=\"{:.1}\" x2=\"{x0:.3}\" y2=\"{:.1}\" \
         stroke=\"#999999\" stroke-width=\"1\"/>\n",
        MARGIN,
        CANVAS - MARGIN
    ));
    // Truth: blue, dashed.
    svg.push_str(&format!(
        "  <polyline fill=\"none\" stroke=\"#1f4fd6\" stroke-width=\"1.5\" \
         stroke-dasharray=\"8 5\" points=\"{}\"/>\n",
        m.polyline_points(truth)
    ));
    // Estimate: red, solid.
    svg.push_str(&format!(
        "  <polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\" \
         points=\"{}\"/>\n",
        m.polyline_points(estimate)
    ));
    svg.push_str("</svg>\n");
    svg
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use starshape::{gauge_triangle, make_sphere_grid, true_boundary};

    #[test]
    fn overlay_has_two_polylines_and_axes() {
        let grid = make_sphere_grid(2, 64).unwrap();
        let b = true_boundary(&gauge_triangle(), &grid).unwrap();
        let svg = overlay_svg(&b, &b, "test <overlay>");
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg.matches("<line").count(), 2);
        assert!(svg.contains("stroke-dasharray"));
        assert!(svg.contains("&lt;overlay&gt;"));
        assert!(svg.starts_with("<?xml"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }
}
