//! Minimal SVG line charts with a logarithmic y axis. Output depends only
//! on the data, so repeated runs give identical files.

use std::fmt::Write as _;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];
const W: f64 = 640.0;
const H: f64 = 440.0;

#[derive(Clone, Debug)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Debug)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// Small second panel, e.g. a ratio between two series.
    pub inset: Option<(String, Vec<Series>)>,
}

struct Frame {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    xs: (f64, f64),
    /// log10 bounds
    ys: (f64, f64),
}

impl Frame {
    fn fit(x0: f64, y0: f64, w: f64, h: f64, series: &[Series]) -> Frame {
        let pts = || series.iter().flat_map(|s| s.points.iter());
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &(x, _) in pts() {
            lo = lo.min(x);
            hi = hi.max(x);
        }
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi <= lo {
            hi = lo + 1.0;
        }
        let positive: Vec<f64> = pts().map(|p| p.1).filter(|&y| y > 0.0).collect();
        let ymin = positive.iter().copied().fold(f64::INFINITY, f64::min);
        let ymax = positive.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (mut a, mut b) = if ymin.is_finite() {
            (ymin.log10().floor(), ymax.log10().ceil())
        } else {
            (-1.0, 0.0)
        };
        if b <= a {
            a -= 1.0;
            b += if b >= 0.0 { 0.0 } else { 1.0 };
            if b <= a {
                b = a + 1.0;
            }
        }
        Frame {
            x0,
            y0,
            w,
            h,
            xs: (lo, hi),
            ys: (a, b),
        }
    }

    fn px(&self, x: f64) -> f64 {
        self.x0 + (x - self.xs.0) / (self.xs.1 - self.xs.0) * self.w
    }

    /// Non-positive values sit on the bottom edge.
    fn py(&self, y: f64) -> f64 {
        let l = if y > 0.0 {
            y.log10().max(self.ys.0)
        } else {
            self.ys.0
        };
        self.y0 + self.h - (l - self.ys.0) / (self.ys.1 - self.ys.0) * self.h
    }

    fn axes(&self, out: &mut String, font: f64, ticks: bool) {
        writeln!(
            out,
            r##"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="white" stroke="#333"/>"##,
            self.x0, self.y0, self.w, self.h
        )
        .unwrap();
        for e in self.ys.0 as i32..=self.ys.1 as i32 {
            let y = self.py(10f64.powi(e));
            writeln!(
                out,
                r##"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/>"##,
                self.x0,
                self.x0 + self.w
            )
            .unwrap();
            writeln!(
                out,
                r#"<text x="{:.1}" y="{:.1}" font-size="{font}" text-anchor="end">1e{e}</text>"#,
                self.x0 - 4.0,
                y + font / 3.0
            )
            .unwrap();
        }
        if ticks {
            let (a, b) = (self.xs.0.ceil() as i64, self.xs.1.floor() as i64);
            let step = ((b - a) / 10).max(1);
            let mut x = a;
            while x <= b {
                writeln!(
                    out,
                    r#"<text x="{:.1}" y="{:.1}" font-size="{font}" text-anchor="middle">{x}</text>"#,
                    self.px(x as f64),
                    self.y0 + self.h + font + 2.0
                )
                .unwrap();
                x += step;
            }
        }
    }

    fn lines(&self, out: &mut String, series: &[Series], r: f64) {
        for (k, s) in series.iter().enumerate() {
            let colour = PALETTE[k % PALETTE.len()];
            let path: Vec<String> = s
                .points
                .iter()
                .map(|&(x, y)| format!("{:.1},{:.1}", self.px(x), self.py(y)))
                .collect();
            writeln!(
                out,
                r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
                path.join(" ")
            )
            .unwrap();
            for &(x, y) in &s.points {
                let fill = if y > 0.0 { colour } else { "white" };
                writeln!(
                    out,
                    r#"<circle cx="{:.1}" cy="{:.1}" r="{r}" fill="{fill}" stroke="{colour}"/>"#,
                    self.px(x),
                    self.py(y)
                )
                .unwrap();
            }
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

impl Chart {
    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif">"#
        )
        .unwrap();
        writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#).unwrap();
        writeln!(
            out,
            r#"<text x="{}" y="22" font-size="15" text-anchor="middle">{}</text>"#,
            W / 2.0,
            escape(&self.title)
        )
        .unwrap();
        let main = Frame::fit(70.0, 40.0, W - 100.0, H - 100.0, &self.series);
        main.axes(&mut out, 11.0, true);
        main.lines(&mut out, &self.series, 3.0);
        writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">{}</text>"#,
            main.x0 + main.w / 2.0,
            H - 18.0,
            escape(&self.x_label)
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="16" y="{:.1}" font-size="12" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
            main.y0 + main.h / 2.0,
            main.y0 + main.h / 2.0,
            escape(&self.y_label)
        )
        .unwrap();
        for (k, s) in self.series.iter().enumerate() {
            let y = main.y0 + main.h - 12.0 - 16.0 * (self.series.len() - 1 - k) as f64;
            let colour = PALETTE[k % PALETTE.len()];
            writeln!(
                out,
                r#"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="{colour}" stroke-width="2"/><text x="{:.1}" y="{:.1}" font-size="11">{}</text>"#,
                main.x0 + 10.0,
                main.x0 + 30.0,
                main.x0 + 35.0,
                y + 4.0,
                escape(&s.name)
            )
            .unwrap();
        }
        if let Some((label, inset)) = &self.inset {
            if inset.iter().any(|s| !s.points.is_empty()) {
                let f = Frame::fit(
                    main.x0 + main.w - 190.0,
                    main.y0 + 12.0,
                    175.0,
                    110.0,
                    inset,
                );
                f.axes(&mut out, 9.0, true);
                f.lines(&mut out, inset, 2.0);
                writeln!(
                    out,
                    r#"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="middle">{}</text>"#,
                    f.x0 + f.w / 2.0,
                    f.y0 - 3.0,
                    escape(label)
                )
                .unwrap();
            }
        }
        out.push_str("</svg>\n");
        out
    }
}
