//! Minimal SVG renderings: the diagram raster and the periodic solution.

use std::fmt::Write as _;

use crate::analysis::{DiagramGrid, NumericStatus};
use crate::analysis::diagram::fmt_sig;

const CELL: f64 = 6.0;
const MARGIN_LEFT: f64 = 60.0;
const MARGIN_TOP: f64 = 20.0;
const MARGIN_BOTTOM: f64 = 50.0;
const LEGEND_WIDTH: f64 = 130.0;

pub fn status_color(s: NumericStatus) -> &'static str {
    match s {
        NumericStatus::Stable => "#2c7fb8",
        NumericStatus::Unstable => "#e34a33",
        NumericStatus::Marginal => "#fdae61",
        NumericStatus::Failed => "#969696",
    }
}

/// Cell edges around sorted axis values: midpoints inside, half-steps outside.
fn edges(axis: &[f64]) -> Vec<f64> {
    let n = axis.len();
    if n == 1 {
        return vec![axis[0] - 0.5, axis[0] + 0.5];
    }
    let mut out = Vec::with_capacity(n + 1);
    out.push(axis[0] - 0.5 * (axis[1] - axis[0]));
    for w in axis.windows(2) {
        out.push(0.5 * (w[0] + w[1]));
    }
    out.push(axis[n - 1] + 0.5 * (axis[n - 1] - axis[n - 2]));
    out
}

/// One rectangle per grid cell, `e` along x and `λ` upwards.
pub fn diagram(grid: &DiagramGrid) -> String {
    let (ne, nl) = (grid.e_axis.len(), grid.lambda_axis.len());
    let (ee, le) = (edges(&grid.e_axis), edges(&grid.lambda_axis));
    let plot_w = CELL * ne as f64;
    let plot_h = CELL * nl as f64;
    let width = MARGIN_LEFT + plot_w + LEGEND_WIDTH;
    let height = MARGIN_TOP + plot_h + MARGIN_BOTTOM;
    let sx = |e: f64| MARGIN_LEFT + plot_w * (e - ee[0]) / (ee[ne] - ee[0]);
    let sy = |l: f64| MARGIN_TOP + plot_h * (1.0 - (l - le[0]) / (le[nl] - le[0]));

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#,
        w = fmt_sig(width, 6),
        h = fmt_sig(height, 6)
    );
    let _ = writeln!(s, r#"<g id="cells" shape-rendering="crispEdges">"#);
    for il in 0..nl {
        for ie in 0..ne {
            let c = grid.cell(il, ie);
            let (x0, x1) = (sx(ee[ie]), sx(ee[ie + 1]));
            let (y0, y1) = (sy(le[il + 1]), sy(le[il]));
            let _ = writeln!(
                s,
                r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{}"><title>e={} λ={} {}</title></rect>"#,
                fmt_sig(x0, 6),
                fmt_sig(y0, 6),
                fmt_sig(x1 - x0, 6),
                fmt_sig(y1 - y0, 6),
                status_color(c.numeric_status),
                fmt_sig(c.e, 6),
                fmt_sig(c.lambda, 6),
                c.numeric_status.as_str()
            );
        }
    }
    let _ = writeln!(s, "</g>");
    let (x_lo, x_hi, y_top, y_bot) = (MARGIN_LEFT, MARGIN_LEFT + plot_w, MARGIN_TOP, MARGIN_TOP + plot_h);
    let _ = writeln!(
        s,
        r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        fmt_sig(x_lo, 6),
        fmt_sig(y_top, 6),
        fmt_sig(plot_w, 6),
        fmt_sig(plot_h, 6)
    );
    for (v, anchor) in [(grid.e_axis[0], "start"), (grid.e_axis[ne - 1], "end")] {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="{anchor}">{}</text>"#,
            fmt_sig(sx(v), 6),
            fmt_sig(y_bot + 16.0, 6),
            fmt_sig(v, 4)
        );
    }
    for v in [grid.lambda_axis[0], grid.lambda_axis[nl - 1]] {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            fmt_sig(x_lo - 6.0, 6),
            fmt_sig(sy(v) + 4.0, 6),
            fmt_sig(v, 4)
        );
    }
    let _ = writeln!(
        s,
        r#"<text id="x-label" x="{}" y="{}" text-anchor="middle">e</text>"#,
        fmt_sig(0.5 * (x_lo + x_hi), 6),
        fmt_sig(y_bot + 36.0, 6)
    );
    let _ = writeln!(
        s,
        r#"<text id="y-label" x="{}" y="{}" text-anchor="middle">λ</text>"#,
        fmt_sig(x_lo - 40.0, 6),
        fmt_sig(0.5 * (y_top + y_bot), 6)
    );
    let _ = writeln!(s, r#"<g id="legend">"#);
    let statuses = [
        NumericStatus::Stable,
        NumericStatus::Unstable,
        NumericStatus::Marginal,
        NumericStatus::Failed,
    ];
    for (i, st) in statuses.iter().enumerate() {
        let y = y_top + 20.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<rect x="{}" y="{}" width="12" height="12" fill="{}"/><text x="{}" y="{}">{}</text>"#,
            fmt_sig(x_hi + 16.0, 6),
            fmt_sig(y, 6),
            status_color(*st),
            fmt_sig(x_hi + 34.0, 6),
            fmt_sig(y + 10.0, 6),
            st.as_str()
        );
    }
    let _ = writeln!(s, "</g>\n</svg>");
    s
}

/// `Θ₁(t)` and `Θ₂(t)` over one period from `[t, Θ₁, Θ₂, ...]` samples.
pub fn periodic(samples: &[[f64; 5]]) -> String {
    let (w, h) = (640.0, 360.0);
    let (l, r, t, b) = (60.0, 20.0, 20.0, 50.0);
    let t_max = samples.last().map_or(1.0, |s| s[0]).max(f64::MIN_POSITIVE);
    let amp = samples
        .iter()
        .flat_map(|s| [s[1].abs(), s[2].abs()])
        .fold(0.0, f64::max);
    let amp = if amp > 0.0 { amp } else { 1.0 };
    let sx = |x: f64| l + (w - l - r) * x / t_max;
    let sy = |y: f64| t + (h - t - b) * 0.5 * (1.0 - y / amp);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - l - r,
        h - t - b
    );
    let _ = writeln!(
        s,
        r##"<line x1="{l}" y1="{y}" x2="{x2}" y2="{y}" stroke="#bbbbbb"/>"##,
        y = fmt_sig(sy(0.0), 6),
        x2 = w - r
    );
    for (k, color, label) in [(1, "#2c7fb8", "Θ₁"), (2, "#e34a33", "Θ₂")] {
        let pts: Vec<String> = samples
            .iter()
            .map(|p| format!("{},{}", fmt_sig(sx(p[0]), 7), fmt_sig(sy(p[k]), 7)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"><title>{label}</title></polyline>"#,
            pts.join(" ")
        );
        let ly = t + 14.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" fill="{color}">{label}</text>"#,
            w - r - 30.0,
            fmt_sig(ly, 6)
        );
    }
    let _ = writeln!(s, r#"<text x="{l}" y="{}" >0</text>"#, h - b + 16.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">2π</text>"#, w - r, h - b + 16.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">t</text>"#, 0.5 * (l + w - r), h - 14.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, l - 6.0, t + 4.0, fmt_sig(amp, 3));
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">-{}</text>"#, l - 6.0, h - b, fmt_sig(amp, 3));
    let _ = writeln!(s, "</svg>");
    s
}
