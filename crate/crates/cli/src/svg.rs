//! Minimal hand-rolled SVG output: hexagonal rasters as flat-top polygon
//! tilings and learning curves as polylines. One polygon per grid cell.

use hexgrid_core::HexTensor;

const SCALE: f64 = 26.0;
const MARGIN: f64 = 18.0;
const SQRT3: f64 = hexgrid_core::coords::SQRT3;

/// Renders one channel of a single-image tensor. Cell fill runs light to
/// dark over the channel's value range.
pub fn hex_image_svg(x: &HexTensor, batch: usize, channel: usize) -> String {
    let grid = x.grid();
    let r = SCALE * grid.pitch / SQRT3;

    let mut centers = Vec::with_capacity(grid.len());
    let (mut min_x, mut max_x) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut min_y, mut max_y) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in grid.iter() {
        let (px, py) = grid.pixel_center(p).expect("in-grid by construction");
        let (sx, sy) = (px * SCALE, -py * SCALE);
        min_x = min_x.min(sx);
        max_x = max_x.max(sx);
        min_y = min_y.min(sy);
        max_y = max_y.max(sy);
        centers.push((sx, sy, x.get(batch, channel, p)));
    }

    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(_, _, v) in &centers {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let span = if hi > lo { hi - lo } else { 1.0 };

    let width = max_x - min_x + 2.0 * (r + MARGIN);
    let height = max_y - min_y + 2.0 * (r + MARGIN);
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {width:.2} {height:.2}\">\n"
    );
    for (sx, sy, v) in centers {
        let cx = sx - min_x + r + MARGIN;
        let cy = sy - min_y + r + MARGIN;
        let mut points = String::new();
        for k in 0..6 {
            let ang = std::f64::consts::PI / 3.0 * k as f64;
            if k > 0 {
                points.push(' ');
            }
            points.push_str(&format!(
                "{:.2},{:.2}",
                cx + r * ang.cos(),
                cy + r * ang.sin()
            ));
        }
        let t = (v - lo) / span;
        let shade = (245.0 - 215.0 * t).round() as u8;
        out.push_str(&format!(
            "<polygon points=\"{points}\" fill=\"rgb({shade},{shade},{})\" \
             stroke=\"#777\" stroke-width=\"0.6\"/>\n",
            shade.saturating_add(8)
        ));
    }
    out.push_str("</svg>\n");
    out
}

pub struct CurveSeries {
    pub label: String,
    pub color: &'static str,
    /// (epoch, accuracy) pairs.
    pub points: Vec<(f64, f64)>,
}

/// Accuracy-versus-epoch plot; the y axis is fixed to [0, 1] with a dashed
/// chance line at 0.25.
pub fn curve_svg(series: &[CurveSeries], max_epoch: f64) -> String {
    let (w, h) = (640.0, 420.0);
    let (x0, y0, x1, y1) = (70.0, 30.0, w - 150.0, h - 50.0);
    let sx = |e: f64| x0 + (x1 - x0) * (e / max_epoch.max(1.0));
    let sy = |a: f64| y1 - (y1 - y0) * a.clamp(0.0, 1.0);

    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" \
         viewBox=\"0 0 {w:.0} {h:.0}\">\n<rect width=\"{w:.0}\" height=\"{h:.0}\" fill=\"white\"/>\n"
    );
    out.push_str(&format!(
        "<line x1=\"{x0}\" y1=\"{y1}\" x2=\"{x1}\" y2=\"{y1}\" stroke=\"black\"/>\n\
         <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>\n"
    ));
    for tick in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let y = sy(tick);
        out.push_str(&format!(
            "<line x1=\"{:.1}\" y1=\"{y:.1}\" x2=\"{x0}\" y2=\"{y:.1}\" stroke=\"black\"/>\n\
             <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"end\">{tick}</text>\n",
            x0 - 4.0,
            x0 - 7.0,
            y + 4.0
        ));
    }
    let chance = sy(0.25);
    out.push_str(&format!(
        "<line x1=\"{x0}\" y1=\"{chance:.1}\" x2=\"{x1}\" y2=\"{chance:.1}\" \
         stroke=\"#999\" stroke-dasharray=\"5,4\"/>\n"
    ));
    let step = if max_epoch > 50.0 { 25.0 } else { 10.0 };
    let mut e = 0.0;
    while e <= max_epoch + 0.5 {
        let x = sx(e);
        out.push_str(&format!(
            "<line x1=\"{x:.1}\" y1=\"{y1}\" x2=\"{x:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n\
             <text x=\"{x:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"middle\">{e:.0}</text>\n",
            y1 + 4.0,
            y1 + 18.0
        ));
        e += step;
    }
    out.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" text-anchor=\"middle\">epoch</text>\n\
         <text x=\"16\" y=\"{:.1}\" font-size=\"12\" text-anchor=\"middle\" \
         transform=\"rotate(-90 16 {:.1})\">training accuracy</text>\n",
        (x0 + x1) / 2.0,
        y1 + 38.0,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    ));

    let mut seen: Vec<&str> = Vec::new();
    for s in series {
        if s.points.is_empty() {
            continue;
        }
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&(e, a)| format!("{:.1},{:.1}", sx(e), sy(a)))
            .collect();
        out.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.2\" \
             stroke-opacity=\"0.55\"/>\n",
            pts.join(" "),
            s.color
        ));
        if !seen.contains(&s.label.as_str()) {
            let y = y0 + 16.0 * seen.len() as f64;
            out.push_str(&format!(
                "<line x1=\"{:.1}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" stroke=\"{}\" \
                 stroke-width=\"2\"/>\n<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\">{}</text>\n",
                x1 + 10.0,
                x1 + 30.0,
                s.color,
                x1 + 35.0,
                y + 4.0,
                s.label
            ));
            seen.push(&s.label);
        }
    }
    out.push_str("</svg>\n");
    out
}
