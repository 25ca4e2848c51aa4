//! Static SVG heatmaps of two-dimensional grid slices.

use std::fmt::Write as _;

use jointprob::GridFn;

const CELL: f64 = 3.0;
const MARGIN: f64 = 48.0;

/// Viridis-like ramp through five stops.
fn color(t: f64) -> String {
    const STOPS: [(f64, f64, f64); 5] = [
        (68.0, 1.0, 84.0),
        (59.0, 82.0, 139.0),
        (33.0, 145.0, 140.0),
        (94.0, 201.0, 98.0),
        (253.0, 231.0, 37.0),
    ];
    let t = t.clamp(0.0, 1.0) * (STOPS.len() - 1) as f64;
    let i = (t.floor() as usize).min(STOPS.len() - 2);
    let f = t - i as f64;
    let (a, b) = (STOPS[i], STOPS[i + 1]);
    let mix = |x: f64, y: f64| (x + f * (y - x)).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

/// Heatmap of a 2-D grid with axis 0 horizontal and axis 1 vertical.
pub fn heatmap(f: &GridFn<f64>, x_label: &str, y_label: &str, title: &str) -> String {
    let (ax, ay) = (f.axes()[0], f.axes()[1]);
    let (nx, ny) = (ax.count, ay.count);
    let (lo, hi) = f
        .values()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    let span = if hi > lo { hi - lo } else { 1.0 };
    let (w, h) = (nx as f64 * CELL, ny as f64 * CELL);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="sans-serif" font-size="11">"#,
        w + 2.0 * MARGIN,
        h + 2.0 * MARGIN
    );
    let _ = writeln!(s, r#"<text x="{MARGIN}" y="{}">{title}</text>"#, MARGIN / 2.0);
    let _ = writeln!(s, r#"<g transform="translate({MARGIN},{MARGIN})" shape-rendering="crispEdges">"#);
    for i in 0..nx {
        for j in 0..ny {
            let v = f.get(&[i, j]);
            let _ = writeln!(
                s,
                r#"<rect x="{}" y="{}" width="{CELL}" height="{CELL}" fill="{}"/>"#,
                i as f64 * CELL,
                (ny - 1 - j) as f64 * CELL,
                color((v - lo) / span)
            );
        }
    }
    let _ = writeln!(s, "</g>");
    let bottom = MARGIN + h;
    let _ = writeln!(s, r#"<text x="{MARGIN}" y="{}">{}</text>"#, bottom + 14.0, ax.min);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, MARGIN + w, bottom + 14.0, ax.max);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{x_label}</text>"#,
        MARGIN + w / 2.0,
        bottom + 30.0
    );
    let _ = writeln!(s, r#"<text x="{}" y="{bottom}" text-anchor="end">{}</text>"#, MARGIN - 4.0, ay.min);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, MARGIN - 4.0, MARGIN + 10.0, ay.max);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" transform="rotate(-90 {} {})">{y_label}</text>"#,
        MARGIN / 3.0,
        MARGIN + h / 2.0,
        MARGIN / 3.0,
        MARGIN + h / 2.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="end">range [{lo:.3e}, {hi:.3e}]</text>"#,
        MARGIN + w,
        MARGIN / 2.0
    );
    s.push_str("</svg>\n");
    s
}
