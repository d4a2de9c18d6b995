//! Deterministic SVG rendering without external dependencies: line plots,
//! color-mapped scatter panels, and heatmaps. Coordinates are written with
//! fixed precision and colors as rounded hex, so identical inputs yield
//! byte-identical documents — the plots are diffable golden files.

use std::fmt::Write;

/// One named curve.
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

pub struct LinePlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

/// One scatter facet: points carry `(x, y, color value)`.
pub struct ScatterPanel {
    pub heading: String,
    pub points: Vec<(f64, f64, f64)>,
}

pub struct ScatterPlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub color_label: String,
    pub panels: Vec<ScatterPanel>,
}

pub struct HeatmapPlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub row_labels: Vec<String>,
    /// Row-major values in `[0, 1]`.
    pub cells: Vec<Vec<f64>>,
    pub color_label: String,
}

pub enum Plot {
    Lines(LinePlot),
    Scatter(ScatterPlot),
    Heatmap(HeatmapPlot),
}

pub fn render(plot: &Plot) -> String {
    match plot {
        Plot::Lines(p) => render_lines(p),
        Plot::Scatter(p) => render_scatter(p),
        Plot::Heatmap(p) => render_heatmap(p),
    }
}

const FONT: &str = "Helvetica, Arial, sans-serif";
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

/// A perceptually ordered nine-stop gradient (dark violet to yellow).
const GRADIENT: [[f64; 3]; 9] = [
    [68.0, 1.0, 84.0],
    [71.0, 44.0, 122.0],
    [59.0, 81.0, 139.0],
    [44.0, 113.0, 142.0],
    [33.0, 144.0, 141.0],
    [39.0, 173.0, 129.0],
    [92.0, 200.0, 99.0],
    [170.0, 220.0, 50.0],
    [253.0, 231.0, 37.0],
];

fn color_map(t: f64) -> String {
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
    let scaled = t * (GRADIENT.len() - 1) as f64;
    let low = (scaled.floor() as usize).min(GRADIENT.len() - 2);
    let frac = scaled - low as f64;
    let channel = |c: usize| -> u8 {
        let v = GRADIENT[low][c] + frac * (GRADIENT[low + 1][c] - GRADIENT[low][c]);
        v.round() as u8
    };
    format!("#{:02x}{:02x}{:02x}", channel(0), channel(1), channel(2))
}

fn px(v: f64) -> String {
    format!("{v:.2}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Tick label: up to six decimals with trailing zeros trimmed.
fn fmt_tick(v: f64) -> String {
    if v.abs() < 1e-12 {
        return "0".to_string();
    }
    let s = format!("{v:.6}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Pad a data range so curves do not hug the border; widen degenerate
/// ranges so scaling stays well defined.
fn pad_range(min: f64, max: f64) -> (f64, f64) {
    if !min.is_finite() || !max.is_finite() {
        return (0.0, 1.0);
    }
    let span = max - min;
    if span <= 0.0 {
        (min - 1.0, max + 1.0)
    } else {
        (min - 0.05 * span, max + 0.05 * span)
    }
}

/// Round tick positions: a 1/2/5 step targeting about five intervals.
fn nice_ticks(min: f64, max: f64) -> Vec<f64> {
    let span = max - min;
    let magnitude = 10f64.powf((span / 5.0).log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * magnitude)
        .find(|s| span / s <= 6.0)
        .unwrap_or(10.0 * magnitude);
    let first = (min / step).ceil() as i64;
    let last = (max / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

/// Pixel frame plus the data ranges it displays.
struct Frame {
    left: f64,
    top: f64,
    width: f64,
    height: f64,
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        self.left + (v - self.x_min) / (self.x_max - self.x_min) * self.width
    }

    fn y(&self, v: f64) -> f64 {
        self.top + self.height - (v - self.y_min) / (self.y_max - self.y_min) * self.height
    }

    /// Border, ticks, and tick labels. `label_y` switches the y tick labels
    /// on (off for the inner panels of a faceted plot).
    fn draw_axes(&self, out: &mut String, label_y: bool) {
        let _ = write!(
            out,
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333333\"/>",
            px(self.left),
            px(self.top),
            px(self.width),
            px(self.height)
        );
        let bottom = self.top + self.height;
        for t in nice_ticks(self.x_min, self.x_max) {
            let x = self.x(t);
            let _ = write!(
                out,
                "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#333333\"/>\
                 <text x=\"{0}\" y=\"{3}\" font-family=\"{FONT}\" font-size=\"11\" \
                 text-anchor=\"middle\" fill=\"#333333\">{4}</text>",
                px(x),
                px(bottom),
                px(bottom + 5.0),
                px(bottom + 18.0),
                fmt_tick(t)
            );
        }
        for t in nice_ticks(self.y_min, self.y_max) {
            let y = self.y(t);
            let _ = write!(
                out,
                "<line x1=\"{0}\" y1=\"{2}\" x2=\"{1}\" y2=\"{2}\" stroke=\"#333333\"/>",
                px(self.left),
                px(self.left - 5.0),
                px(y),
            );
            if label_y {
                let _ = write!(
                    out,
                    "<text x=\"{}\" y=\"{}\" font-family=\"{FONT}\" font-size=\"11\" \
                     text-anchor=\"end\" fill=\"#333333\">{}</text>",
                    px(self.left - 8.0),
                    px(y + 4.0),
                    fmt_tick(t)
                );
            }
        }
    }
}

fn document(width: f64, height: f64, body: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
         viewBox=\"0 0 {w} {h}\">\n<rect width=\"{w}\" height=\"{h}\" fill=\"#ffffff\"/>\n\
         {body}\n</svg>\n",
        w = px(width),
        h = px(height),
    )
}

fn title_text(out: &mut String, width: f64, title: &str) {
    let _ = write!(
        out,
        "<text x=\"{}\" y=\"24\" font-family=\"{FONT}\" font-size=\"15\" \
         text-anchor=\"middle\" fill=\"#111111\">{}</text>",
        px(width / 2.0),
        escape(title)
    );
}

fn x_label_text(out: &mut String, frame: &Frame, label: &str, canvas_height: f64) {
    let _ = write!(
        out,
        "<text x=\"{}\" y=\"{}\" font-family=\"{FONT}\" font-size=\"13\" \
         text-anchor=\"middle\" fill=\"#111111\">{}</text>",
        px(frame.left + frame.width / 2.0),
        px(canvas_height - 12.0),
        escape(label)
    );
}

fn y_label_text(out: &mut String, frame: &Frame, label: &str) {
    let cx = frame.left - 48.0;
    let cy = frame.top + frame.height / 2.0;
    let _ = write!(
        out,
        "<text x=\"{x}\" y=\"{y}\" font-family=\"{FONT}\" font-size=\"13\" \
         text-anchor=\"middle\" fill=\"#111111\" transform=\"rotate(-90 {x} {y})\">{l}</text>",
        x = px(cx),
        y = px(cy),
        l = escape(label)
    );
}

/// Vertical gradient legend mapping `[v_min, v_max]` through the colormap.
fn color_bar(out: &mut String, x: f64, top: f64, height: f64, v_min: f64, v_max: f64, label: &str) {
    let steps = 48;
    let cell = height / steps as f64;
    for i in 0..steps {
        // Highest values on top.
        let t = 1.0 - (i as f64 + 0.5) / steps as f64;
        let _ = write!(
            out,
            "<rect x=\"{}\" y=\"{}\" width=\"14\" height=\"{}\" fill=\"{}\"/>",
            px(x),
            px(top + i as f64 * cell),
            px(cell + 0.5),
            color_map(t)
        );
    }
    let _ = write!(
        out,
        "<rect x=\"{}\" y=\"{}\" width=\"14\" height=\"{}\" fill=\"none\" stroke=\"#333333\"/>\
         <text x=\"{tx}\" y=\"{}\" font-family=\"{FONT}\" font-size=\"11\" fill=\"#333333\">{}</text>\
         <text x=\"{tx}\" y=\"{}\" font-family=\"{FONT}\" font-size=\"11\" fill=\"#333333\">{}</text>\
         <text x=\"{tx}\" y=\"{}\" font-family=\"{FONT}\" font-size=\"12\" fill=\"#111111\">{}</text>",
        px(x),
        px(top),
        px(height),
        px(top + 10.0),
        fmt_tick(v_max),
        px(top + height),
        fmt_tick(v_min),
        px(top - 14.0),
        escape(label),
        tx = px(x + 18.0),
    );
}

fn render_lines(plot: &LinePlot) -> String {
    let (width, height) = (840.0, 560.0);
    let frame_bounds = |get: fn(&(f64, f64)) -> f64| -> (f64, f64) {
        let values = plot.series.iter().flat_map(|s| s.points.iter().map(get));
        let min = values.clone().fold(f64::INFINITY, f64::min);
        let max = values.fold(f64::NEG_INFINITY, f64::max);
        pad_range(min, max)
    };
    let (x_min, x_max) = frame_bounds(|p| p.0);
    let (y_min, y_max) = frame_bounds(|p| p.1);
    let frame = Frame {
        left: 72.0,
        top: 56.0,
        width: width - 72.0 - 24.0,
        height: height - 56.0 - 64.0,
        x_min,
        x_max,
        y_min,
        y_max,
    };

    let mut body = String::new();
    title_text(&mut body, width, &plot.title);
    frame.draw_axes(&mut body, true);
    for (i, series) in plot.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        if series.points.len() == 1 {
            let (x, y) = series.points[0];
            let _ = write!(
                body,
                "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{color}\"/>",
                px(frame.x(x)),
                px(frame.y(y))
            );
        } else {
            let coords: Vec<String> = series
                .points
                .iter()
                .map(|&(x, y)| format!("{},{}", px(frame.x(x)), px(frame.y(y))))
                .collect();
            let _ = write!(
                body,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
                coords.join(" ")
            );
        }
    }
    // Legend in the top-right corner of the frame.
    for (i, series) in plot.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let y = frame.top + 16.0 + 18.0 * i as f64;
        let x = frame.left + frame.width - 150.0;
        let _ = write!(
            body,
            "<line x1=\"{}\" y1=\"{y0}\" x2=\"{}\" y2=\"{y0}\" stroke=\"{color}\" stroke-width=\"2\"/>\
             <text x=\"{}\" y=\"{}\" font-family=\"{FONT}\" font-size=\"12\" fill=\"#333333\">{}</text>",
            px(x),
            px(x + 22.0),
            px(x + 28.0),
            px(y + 4.0),
            escape(&series.label),
            y0 = px(y),
        );
    }
    x_label_text(&mut body, &frame, &plot.x_label, height);
    y_label_text(&mut body, &frame, &plot.y_label);
    document(width, height, &body)
}

fn render_scatter(plot: &ScatterPlot) -> String {
    let n_panels = plot.panels.len().max(1);
    let panel_width = 300.0;
    let gap = 40.0;
    let left = 72.0;
    let width = left + n_panels as f64 * panel_width + (n_panels - 1) as f64 * gap + 120.0;
    let height = 560.0;

    let all = || plot.panels.iter().flat_map(|p| p.points.iter());
    let (x_min, x_max) = pad_range(
        all().map(|p| p.0).fold(f64::INFINITY, f64::min),
        all().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max),
    );
    let (y_min, y_max) = pad_range(
        all().map(|p| p.1).fold(f64::INFINITY, f64::min),
        all().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max),
    );
    let v_min = all().map(|p| p.2).fold(f64::INFINITY, f64::min);
    let v_max = all().map(|p| p.2).fold(f64::NEG_INFINITY, f64::max);
    let (v_min, v_max) = if v_min.is_finite() && v_max > v_min {
        (v_min, v_max)
    } else {
        (0.0, 1.0)
    };

    let mut body = String::new();
    title_text(&mut body, width, &plot.title);
    let mut first_frame: Option<Frame> = None;
    for (i, panel) in plot.panels.iter().enumerate() {
        let frame = Frame {
            left: left + i as f64 * (panel_width + gap),
            top: 64.0,
            width: panel_width,
            height: height - 64.0 - 64.0,
            x_min,
            x_max,
            y_min,
            y_max,
        };
        frame.draw_axes(&mut body, i == 0);
        let _ = write!(
            body,
            "<text x=\"{}\" y=\"56\" font-family=\"{FONT}\" font-size=\"13\" \
             text-anchor=\"middle\" fill=\"#111111\">{}</text>",
            px(frame.left + frame.width / 2.0),
            escape(&panel.heading)
        );
        for &(x, y, v) in &panel.points {
            let t = (v - v_min) / (v_max - v_min);
            let _ = write!(
                body,
                "<circle cx=\"{}\" cy=\"{}\" r=\"2\" fill=\"{}\"/>",
                px(frame.x(x)),
                px(frame.y(y)),
                color_map(t)
            );
        }
        x_label_text(&mut body, &frame, &plot.x_label, height);
        if i == 0 {
            y_label_text(&mut body, &frame, &plot.y_label);
        }
        if first_frame.is_none() {
            first_frame = Some(frame);
        }
    }
    let bar_x = width - 96.0;
    color_bar(
        &mut body,
        bar_x,
        64.0,
        height - 64.0 - 64.0,
        v_min,
        v_max,
        &plot.color_label,
    );
    document(width, height, &body)
}

fn render_heatmap(plot: &HeatmapPlot) -> String {
    let n_rows = plot.cells.len().max(1);
    let n_cols = plot.cells.first().map_or(1, Vec::len).max(1);
    let cell_w = (600.0 / n_cols as f64).clamp(6.0, 24.0);
    let cell_h = (420.0 / n_rows as f64).clamp(6.0, 24.0);
    let left = 110.0;
    let top = 64.0;
    let grid_w = cell_w * n_cols as f64;
    let grid_h = cell_h * n_rows as f64;
    let width = left + grid_w + 130.0;
    let height = top + grid_h + 80.0;

    let mut body = String::new();
    title_text(&mut body, width, &plot.title);
    for (r, row) in plot.cells.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            let _ = write!(
                body,
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>",
                px(left + c as f64 * cell_w),
                px(top + r as f64 * cell_h),
                px(cell_w + 0.5),
                px(cell_h + 0.5),
                color_map(v)
            );
        }
    }
    let _ = write!(
        body,
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333333\"/>",
        px(left),
        px(top),
        px(grid_w),
        px(grid_h)
    );
    // Row labels (bare states), skipped when they would overlap.
    let label_stride = (12.0 / cell_h).ceil().max(1.0) as usize;
    for (r, label) in plot.row_labels.iter().enumerate() {
        if r % label_stride != 0 {
            continue;
        }
        let _ = write!(
            body,
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"10\" \
             text-anchor=\"end\" fill=\"#333333\">{}</text>",
            px(left - 6.0),
            px(top + (r as f64 + 0.5) * cell_h + 3.0),
            escape(label)
        );
    }
    // Column indices along the bottom, roughly eight labels.
    let col_stride = (n_cols as f64 / 8.0).ceil().max(1.0) as usize;
    for c in (0..n_cols).step_by(col_stride) {
        let _ = write!(
            body,
            "<text x=\"{}\" y=\"{}\" font-family=\"{FONT}\" font-size=\"11\" \
             text-anchor=\"middle\" fill=\"#333333\">{}</text>",
            px(left + (c as f64 + 0.5) * cell_w),
            px(top + grid_h + 16.0),
            c + 1
        );
    }
    let _ = write!(
        body,
        "<text x=\"{}\" y=\"{}\" font-family=\"{FONT}\" font-size=\"13\" \
         text-anchor=\"middle\" fill=\"#111111\">{}</text>",
        px(left + grid_w / 2.0),
        px(height - 16.0),
        escape(&plot.x_label)
    );
    let _ = write!(
        body,
        "<text x=\"{x}\" y=\"{y}\" font-family=\"{FONT}\" font-size=\"13\" text-anchor=\"middle\" \
         fill=\"#111111\" transform=\"rotate(-90 {x} {y})\">{l}</text>",
        x = px(18.0),
        y = px(top + grid_h / 2.0),
        l = escape(&plot.y_label)
    );
    color_bar(
        &mut body,
        left + grid_w + 36.0,
        top,
        grid_h,
        0.0,
        1.0,
        &plot.color_label,
    );
    document(width, height, &body)
}
