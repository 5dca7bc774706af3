//! Minimal static SVG figures: linear/log axes, line and point series,
//! error bars, legend. Output is a pure, deterministic function of the
//! figure description — no timestamps, no randomness — so replotting a
//! dataset always reproduces identical bytes.

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 500.0;
const MARGIN_L: f64 = 72.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 42.0;
const MARGIN_B: f64 = 58.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    /// (x, y) data; on a log axis nonpositive coordinates are skipped.
    pub points: Vec<(f64, f64)>,
    /// One-sigma vertical error bars, aligned with `points`.
    pub errors: Option<Vec<f64>>,
    pub line: bool,
    pub marks: bool,
}

impl Series {
    pub fn line(label: &str, points: Vec<(f64, f64)>) -> Self {
        Self {
            label: label.to_owned(),
            points,
            errors: None,
            line: true,
            marks: false,
        }
    }

    pub fn points(label: &str, points: Vec<(f64, f64)>, errors: Option<Vec<f64>>) -> Self {
        Self {
            label: label.to_owned(),
            points,
            errors,
            line: false,
            marks: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Figure {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_log: bool,
    pub y_log: bool,
    pub series: Vec<Series>,
}

impl Figure {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Self {
            title: title.to_owned(),
            x_label: x_label.to_owned(),
            y_label: y_label.to_owned(),
            x_log: false,
            y_log: false,
            series: Vec::new(),
        }
    }

    pub fn log_log(mut self) -> Self {
        self.x_log = true;
        self.y_log = true;
        self
    }

    pub fn log_y(mut self) -> Self {
        self.y_log = true;
        self
    }

    pub fn with(mut self, series: Series) -> Self {
        self.series.push(series);
        self
    }

    /// Render to a complete standalone SVG document.
    pub fn render(&self) -> String {
        let tx = |v: f64| if self.x_log { v.log10() } else { v };
        let ty = |v: f64| if self.y_log { v.log10() } else { v };
        let x_ok = |v: f64| v.is_finite() && (!self.x_log || v > 0.0);
        let y_ok = |v: f64| v.is_finite() && (!self.y_log || v > 0.0);

        // Data range in axis (possibly log) coordinates, error bars included.
        let mut xr = RangeAcc::new();
        let mut yr = RangeAcc::new();
        for s in &self.series {
            for (i, &(x, y)) in s.points.iter().enumerate() {
                if !x_ok(x) || !y_ok(y) {
                    continue;
                }
                xr.add(tx(x));
                yr.add(ty(y));
                if let Some(errs) = &s.errors {
                    let e = errs.get(i).copied().unwrap_or(0.0);
                    if y_ok(y + e) {
                        yr.add(ty(y + e));
                    }
                    if y_ok(y - e) {
                        yr.add(ty(y - e));
                    }
                }
            }
        }
        let (x_lo, x_hi) = xr.padded();
        let (y_lo, y_hi) = yr.padded();

        let px = |v: f64| MARGIN_L + (tx(v) - x_lo) / (x_hi - x_lo) * (WIDTH - MARGIN_L - MARGIN_R);
        let py =
            |v: f64| HEIGHT - MARGIN_B - (ty(v) - y_lo) / (y_hi - y_lo) * (HEIGHT - MARGIN_T - MARGIN_B);

        let mut svg = String::new();
        svg.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
             viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"Helvetica, Arial, sans-serif\">\n"
        ));
        svg.push_str(&format!(
            "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
        ));
        svg.push_str(&format!(
            "<clipPath id=\"plot\"><rect x=\"{MARGIN_L}\" y=\"{MARGIN_T}\" width=\"{}\" \
             height=\"{}\"/></clipPath>\n",
            WIDTH - MARGIN_L - MARGIN_R,
            HEIGHT - MARGIN_T - MARGIN_B
        ));

        // Grid and ticks.
        for t in ticks(x_lo, x_hi, self.x_log) {
            let x = MARGIN_L + (t.pos - x_lo) / (x_hi - x_lo) * (WIDTH - MARGIN_L - MARGIN_R);
            svg.push_str(&format!(
                "<line x1=\"{x:.2}\" y1=\"{MARGIN_T}\" x2=\"{x:.2}\" y2=\"{:.2}\" \
                 stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n",
                HEIGHT - MARGIN_B
            ));
            svg.push_str(&format!(
                "<text x=\"{x:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\" \
                 fill=\"#333\">{}</text>\n",
                HEIGHT - MARGIN_B + 18.0,
                t.label
            ));
        }
        for t in ticks(y_lo, y_hi, self.y_log) {
            let y = HEIGHT - MARGIN_B - (t.pos - y_lo) / (y_hi - y_lo) * (HEIGHT - MARGIN_T - MARGIN_B);
            svg.push_str(&format!(
                "<line x1=\"{MARGIN_L}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" \
                 stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n",
                WIDTH - MARGIN_R
            ));
            svg.push_str(&format!(
                "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"end\" \
                 fill=\"#333\">{}</text>\n",
                MARGIN_L - 8.0,
                y + 4.0,
                t.label
            ));
        }

        // Frame.
        svg.push_str(&format!(
            "<rect x=\"{MARGIN_L}\" y=\"{MARGIN_T}\" width=\"{}\" height=\"{}\" fill=\"none\" \
             stroke=\"#333\" stroke-width=\"1\"/>\n",
            WIDTH - MARGIN_L - MARGIN_R,
            HEIGHT - MARGIN_T - MARGIN_B
        ));

        // Series.
        for (si, s) in self.series.iter().enumerate() {
            let color = PALETTE[si % PALETTE.len()];
            let visible: Vec<(usize, f64, f64)> = s
                .points
                .iter()
                .enumerate()
                .filter(|(_, &(x, y))| x_ok(x) && y_ok(y))
                .map(|(i, &(x, y))| (i, px(x), py(y)))
                .collect();
            if s.line && visible.len() >= 2 {
                let path: Vec<String> = visible
                    .iter()
                    .map(|&(_, x, y)| format!("{x:.2},{y:.2}"))
                    .collect();
                svg.push_str(&format!(
                    "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" \
                     stroke-width=\"1.6\" clip-path=\"url(#plot)\"/>\n",
                    path.join(" ")
                ));
            }
            if let Some(errs) = &s.errors {
                for &(i, x, _) in &visible {
                    let (_, y) = s.points[i];
                    let e = errs.get(i).copied().unwrap_or(0.0);
                    if e <= 0.0 {
                        continue;
                    }
                    let hi = if y_ok(y + e) { py(y + e) } else { MARGIN_T };
                    let lo = if y_ok(y - e) {
                        py(y - e)
                    } else {
                        HEIGHT - MARGIN_B
                    };
                    svg.push_str(&format!(
                        "<line x1=\"{x:.2}\" y1=\"{hi:.2}\" x2=\"{x:.2}\" y2=\"{lo:.2}\" \
                         stroke=\"{color}\" stroke-width=\"1.2\" clip-path=\"url(#plot)\"/>\n"
                    ));
                    for yy in [hi, lo] {
                        svg.push_str(&format!(
                            "<line x1=\"{:.2}\" y1=\"{yy:.2}\" x2=\"{:.2}\" y2=\"{yy:.2}\" \
                             stroke=\"{color}\" stroke-width=\"1.2\" clip-path=\"url(#plot)\"/>\n",
                            x - 3.0,
                            x + 3.0
                        ));
                    }
                }
            }
            if s.marks {
                for &(_, x, y) in &visible {
                    svg.push_str(&format!(
                        "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3\" fill=\"{color}\" \
                         clip-path=\"url(#plot)\"/>\n"
                    ));
                }
            }
        }

        // Legend, top-right inside the frame.
        let lx = WIDTH - MARGIN_R - 230.0;
        let mut ly = MARGIN_T + 14.0;
        svg.push_str(&format!(
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"224\" height=\"{}\" fill=\"white\" \
             fill-opacity=\"0.85\" stroke=\"#ccc\"/>\n",
            lx - 6.0,
            MARGIN_T + 2.0,
            self.series.len() as f64 * 17.0 + 8.0
        ));
        for (si, s) in self.series.iter().enumerate() {
            let color = PALETTE[si % PALETTE.len()];
            if s.line {
                svg.push_str(&format!(
                    "<line x1=\"{lx:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" \
                     stroke=\"{color}\" stroke-width=\"1.6\"/>\n",
                    ly - 4.0,
                    lx + 18.0,
                    ly - 4.0
                ));
            } else {
                svg.push_str(&format!(
                    "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\"/>\n",
                    lx + 9.0,
                    ly - 4.0
                ));
            }
            svg.push_str(&format!(
                "<text x=\"{:.2}\" y=\"{ly:.2}\" font-size=\"12\" fill=\"#222\">{}</text>\n",
                lx + 24.0,
                escape(&s.label)
            ));
            ly += 17.0;
        }

        // Labels and title.
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"22\" font-size=\"15\" text-anchor=\"middle\" \
             fill=\"#111\">{}</text>\n",
            WIDTH / 2.0,
            escape(&self.title)
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\" \
             fill=\"#111\">{}</text>\n",
            (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
            HEIGHT - 14.0,
            escape(&self.x_label)
        ));
        svg.push_str(&format!(
            "<text x=\"18\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\" \
             transform=\"rotate(-90 18 {:.2})\" fill=\"#111\">{}</text>\n",
            (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
            (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
            escape(&self.y_label)
        ));

        svg.push_str("</svg>\n");
        svg
    }
}

struct RangeAcc {
    lo: f64,
    hi: f64,
}

impl RangeAcc {
    fn new() -> Self {
        Self {
            lo: f64::INFINITY,
            hi: f64::NEG_INFINITY,
        }
    }

    fn add(&mut self, v: f64) {
        if v.is_finite() {
            self.lo = self.lo.min(v);
            self.hi = self.hi.max(v);
        }
    }

    /// Range padded by 5% per side; degenerate or empty ranges widen to
    /// something drawable.
    fn padded(&self) -> (f64, f64) {
        if !self.lo.is_finite() || !self.hi.is_finite() {
            return (0.0, 1.0);
        }
        if self.lo == self.hi {
            return (self.lo - 0.5, self.hi + 0.5);
        }
        let pad = 0.05 * (self.hi - self.lo);
        (self.lo - pad, self.hi + pad)
    }
}

struct Tick {
    /// Position in axis coordinates (log10 of the value on log axes).
    pos: f64,
    label: String,
}

/// Tick positions over [lo, hi] in axis coordinates.
fn ticks(lo: f64, hi: f64, log: bool) -> Vec<Tick> {
    if log {
        let first = lo.ceil() as i64;
        let last = hi.floor() as i64;
        if last >= first && (last - first) >= 1 {
            return (first..=last)
                .map(|d| Tick {
                    pos: d as f64,
                    label: fmt_value(10f64.powi(d as i32)),
                })
                .collect();
        }
        // Under a decade of range: evenly spaced, labeled with the value.
        return (0..=4)
            .map(|i| {
                let pos = lo + (hi - lo) * i as f64 / 4.0;
                Tick {
                    pos,
                    label: fmt_value(10f64.powf(pos)),
                }
            })
            .collect();
    }
    let span = hi - lo;
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|&s| span / s <= 6.0)
        .unwrap_or(mag * 10.0);
    let first = (lo / step).ceil();
    let mut out = Vec::new();
    let mut k = first;
    while k * step <= hi + 1e-9 * span {
        let v = k * step;
        // Snap near-zero ticks produced by rounding.
        let v = if v.abs() < 1e-12 * span { 0.0 } else { v };
        out.push(Tick {
            pos: v,
            label: fmt_value(v),
        });
        k += 1.0;
    }
    out
}

/// Compact deterministic number formatting for tick labels.
fn fmt_value(v: f64) -> String {
    if v == 0.0 {
        return "0".to_owned();
    }
    let a = v.abs();
    if (1e-3..1e5).contains(&a) {
        let s = format!("{v:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_owned()
    } else {
        format!("{v:.1e}")
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
