//! Self-contained SVG heatmap of a joint spectral intensity.

use std::fmt::Write as _;

use ndarray::Array2;

const VIRIDIS: [(f64, f64, f64); 9] = [
    (68.0, 1.0, 84.0),
    (71.0, 44.0, 122.0),
    (59.0, 81.0, 139.0),
    (44.0, 113.0, 142.0),
    (33.0, 145.0, 140.0),
    (39.0, 173.0, 129.0),
    (92.0, 200.0, 99.0),
    (170.0, 220.0, 50.0),
    (253.0, 231.0, 37.0),
];

/// Largest number of cells drawn along either axis; finer grids are block-averaged.
pub const MAX_CELLS: usize = 128;

const PLOT: f64 = 480.0;
const MARGIN: f64 = 70.0;

pub fn colormap(t: f64) -> (u8, u8, u8) {
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
    let x = t * (VIRIDIS.len() - 1) as f64;
    let k = (x.floor() as usize).min(VIRIDIS.len() - 2);
    let f = x - k as f64;
    let (a, b) = (VIRIDIS[k], VIRIDIS[k + 1]);
    let mix = |p: f64, q: f64| (p + f * (q - p)).round() as u8;
    (mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

fn block_average(values: &Array2<f64>, cells_i: usize, cells_s: usize) -> Array2<f64> {
    let (n_i, n_s) = values.dim();
    Array2::from_shape_fn((cells_i, cells_s), |(a, b)| {
        let (i0, i1) = (a * n_i / cells_i, ((a + 1) * n_i / cells_i).max(a * n_i / cells_i + 1));
        let (s0, s1) = (b * n_s / cells_s, ((b + 1) * n_s / cells_s).max(b * n_s / cells_s + 1));
        let block = values.slice(ndarray::s![i0..i1, s0..s1]);
        block.sum() / block.len() as f64
    })
}

/// Renders `intensity[(idler, signal)]`, normalized to unit peak, over the
/// detuning ranges `idler_range` and `signal_range`.
pub fn render_svg(intensity: &Array2<f64>, idler_range: (f64, f64), signal_range: (f64, f64), title: &str) -> String {
    let (n_i, n_s) = intensity.dim();
    let cells = block_average(intensity, n_i.min(MAX_CELLS), n_s.min(MAX_CELLS));
    let peak = cells.iter().copied().fold(0.0, f64::max);
    let (c_i, c_s) = cells.dim();
    let (w, h) = (PLOT / c_s as f64, PLOT / c_i as f64);
    let size = PLOT + 2.0 * MARGIN;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}" font-family="sans-serif" font-size="13">"#
    );
    let _ = writeln!(svg, r#"<rect width="{size}" height="{size}" fill="white"/>"#);
    let _ = writeln!(svg, r#"<g shape-rendering="crispEdges">"#);
    for ((a, b), &v) in cells.indexed_iter() {
        let (r, g, bl) = colormap(if peak > 0.0 { v / peak } else { 0.0 });
        // idler increases upward
        let x = MARGIN + b as f64 * w;
        let y = MARGIN + PLOT - (a + 1) as f64 * h;
        let _ = writeln!(
            svg,
            r##"<rect x="{x:.3}" y="{y:.3}" width="{:.3}" height="{:.3}" fill="#{r:02x}{g:02x}{bl:02x}"/>"##,
            w + 0.01,
            h + 0.01
        );
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{PLOT}" height="{PLOT}" fill="none" stroke="black"/>"#
    );
    let bottom = MARGIN + PLOT;
    for (frac, value) in [(0.0, signal_range.0), (0.5, 0.5 * (signal_range.0 + signal_range.1)), (1.0, signal_range.1)] {
        let x = MARGIN + frac * PLOT;
        let _ = writeln!(
            svg,
            r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            bottom + 18.0,
            tick(value)
        );
    }
    for (frac, value) in [(0.0, idler_range.0), (0.5, 0.5 * (idler_range.0 + idler_range.1)), (1.0, idler_range.1)] {
        let y = bottom - frac * PLOT;
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            MARGIN - 6.0,
            y + 4.0,
            tick(value)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">signal detuning / kappa_is</text>"#,
        MARGIN + PLOT / 2.0,
        bottom + 42.0
    );
    let _ = writeln!(
        svg,
        r#"<text transform="translate({:.1},{:.1}) rotate(-90)" text-anchor="middle">idler detuning / kappa_is</text>"#,
        MARGIN - 42.0,
        MARGIN + PLOT / 2.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        MARGIN + PLOT / 2.0,
        MARGIN - 20.0,
        escape(title)
    );
    svg.push_str("</svg>\n");
    svg
}

fn tick(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.to_string() }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colormap_endpoints() {
        assert_eq!(colormap(0.0), (68, 1, 84));
        assert_eq!(colormap(1.0), (253, 231, 37));
        assert_eq!(colormap(f64::NAN), (68, 1, 84));
    }

    #[test]
    fn cell_count_is_capped() {
        let values = Array2::from_shape_fn((513, 257), |(i, j)| (i + j) as f64);
        let svg = render_svg(&values, (-8.0, 8.0), (-8.0, 8.0), "test <jsi>");
        let cells = svg.matches("<rect x=").count() - 1;
        assert_eq!(cells, MAX_CELLS * MAX_CELLS);
        assert!(svg.contains("test &lt;jsi&gt;"));
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
    }

    #[test]
    fn block_average_preserves_mean() {
        let values = Array2::from_shape_fn((9, 9), |(i, j)| (i * 9 + j) as f64);
        let avg = block_average(&values, 3, 3);
        assert!((avg.mean().unwrap() - values.mean().unwrap()).abs() < 1e-12);
    }
}
