//! Minimal SVG line and box charts.

use std::fmt::Write;

use faircap::baselines::Method;

pub const WIDTH: f64 = 760.0;
pub const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 210.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;

const PALETTE: [&str; 7] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2",
];

/// Stable color for a method name; unknown names are grey.
pub fn color(method: &str) -> &'static str {
    Method::ALL
        .iter()
        .position(|m| m.name() == method)
        .map_or("#7f7f7f", |i| PALETTE[i])
}

pub fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Round tick values covering `[lo, hi]`, about `target` of them.
pub fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    if hi.partial_cmp(&lo) != Some(std::cmp::Ordering::Greater) {
        return vec![lo];
    }
    let raw = (hi - lo) / target.max(1) as f64;
    let exp = raw.log10().floor() as i32;
    let mag = 10f64.powi(exp);
    let mult = [1.0, 2.0, 2.5, 5.0, 10.0]
        .into_iter()
        .find(|m| m * mag >= raw)
        .unwrap_or(10.0);
    let step = mult * mag;
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    // dividing by an exact power of ten keeps ticks like 0.6 exact
    let tick = |i: i64| {
        if exp < 0 {
            i as f64 * mult / 10f64.powi(-exp)
        } else {
            i as f64 * step
        }
    };
    (first..=last).map(tick).collect()
}

/// Plot area with linear x and y scales.
pub struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    /// Degenerate ranges are widened so a single point still renders.
    pub fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        let widen = |(lo, hi): (f64, f64), pad: f64| {
            if hi > lo {
                (lo, hi)
            } else {
                (lo - pad, hi + pad)
            }
        };
        Self {
            x: widen(x, 1.0),
            y: widen(y, if y.0 == 0.0 { 1.0 } else { y.0.abs() * 0.1 }),
        }
    }

    pub fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - LEFT - RIGHT)
    }

    pub fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - TOP - BOTTOM)
    }

    pub fn plot_left(&self) -> f64 {
        LEFT
    }

    pub fn plot_right(&self) -> f64 {
        WIDTH - RIGHT
    }

    pub fn x_range(&self) -> (f64, f64) {
        self.x
    }
}

pub struct Svg {
    body: String,
}

impl Svg {
    pub fn new(title: &str) -> Self {
        let mut body = String::new();
        let _ = writeln!(
            body,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(body, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            body,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
            WIDTH / 2.0,
            escape(title)
        );
        Self { body }
    }

    pub fn raw(&mut self, s: &str) {
        self.body.push_str(s);
        self.body.push('\n');
    }

    /// Axes, tick labels and axis titles. `x_ticks` are drawn as given.
    pub fn axes(&mut self, frame: &Frame, x_ticks: &[(f64, String)], y_ticks: &[f64], x_label: &str, y_label: &str) {
        let (x0, x1) = (frame.plot_left(), frame.plot_right());
        let (ytop, ybot) = (TOP, HEIGHT - BOTTOM);
        self.raw(&format!(
            r##"<g class="axes" stroke="#333"><line x1="{x0}" y1="{ybot}" x2="{x1}" y2="{ybot}"/><line x1="{x0}" y1="{ytop}" x2="{x0}" y2="{ybot}"/></g>"##
        ));
        for (x, label) in x_ticks {
            let px = frame.px(*x);
            self.raw(&format!(
                r##"<line x1="{px:.2}" y1="{ybot}" x2="{px:.2}" y2="{:.2}" stroke="#333"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
                ybot + 5.0,
                ybot + 18.0,
                escape(label)
            ));
        }
        for &y in y_ticks {
            let py = frame.py(y);
            self.raw(&format!(
                r##"<line x1="{x0}" y1="{py:.2}" x2="{x1}" y2="{py:.2}" stroke="#eee"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
                x0 - 6.0,
                py + 4.0,
                tick_label(y)
            ));
        }
        self.raw(&format!(
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            (x0 + x1) / 2.0,
            HEIGHT - 15.0,
            escape(x_label)
        ));
        self.raw(&format!(
            r#"<text transform="translate(18 {:.2}) rotate(-90)" text-anchor="middle">{}</text>"#,
            (ytop + ybot) / 2.0,
            escape(y_label)
        ));
    }

    /// Legend entries in the right margin; `style` is an optional dash array.
    pub fn legend(&mut self, entries: &[(String, &str, Option<&str>)]) {
        let x = WIDTH - RIGHT + 15.0;
        for (i, (label, stroke, dash)) in entries.iter().enumerate() {
            let y = TOP + 10.0 + i as f64 * 18.0;
            let dash = dash.map(|d| format!(r#" stroke-dasharray="{d}""#)).unwrap_or_default();
            self.raw(&format!(
                r#"<g class="legend"><line x1="{x}" y1="{y}" x2="{:.2}" y2="{y}" stroke="{stroke}" stroke-width="2"{dash}/><text x="{:.2}" y="{:.2}">{}</text></g>"#,
                x + 22.0,
                x + 28.0,
                y + 4.0,
                escape(label)
            ));
        }
    }

    pub fn finish(mut self) -> String {
        self.body.push_str("</svg>\n");
        self.body
    }
}

fn tick_label(y: f64) -> String {
    if y == y.round() && y.abs() < 1e9 {
        format!("{}", y as i64)
    } else {
        let s = format!("{y:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}
