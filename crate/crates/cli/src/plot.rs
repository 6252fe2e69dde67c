//! Minimal SVG charts rendered from exported CSV files.

use std::fmt::Write;

use crate::error::Failure;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const MARGIN: f64 = 64.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Lines,
    Stems,
    Points,
}

pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub style: Style,
    pub log_log: bool,
    pub series: Vec<Series>,
}

/// Parsed CSV: header plus numeric columns. `#` lines are comments.
pub struct Columns {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Columns {
    pub fn parse(text: &str) -> Result<Self, Failure> {
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let header = reader
            .headers()
            .map_err(|e| Failure::Validation(format!("csv header: {e}")))?
            .iter()
            .map(str::to_string)
            .collect();
        let rows = reader
            .records()
            .map(|r| r.map(|rec| rec.iter().map(str::to_string).collect()))
            .collect::<Result<_, _>>()
            .map_err(|e| Failure::Validation(format!("csv row: {e}")))?;
        Ok(Self { header, rows })
    }

    pub fn numeric(&self, name: &str) -> Result<Vec<f64>, Failure> {
        let col = self
            .header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Failure::Validation(format!("missing column {name}")))?;
        self.rows
            .iter()
            .map(|row| {
                row[col].parse::<f64>().map_err(|_| {
                    Failure::Validation(format!("column {name}: not a number: {}", row[col]))
                })
            })
            .collect()
    }

    fn has(&self, names: &[&str]) -> bool {
        names.iter().all(|n| self.header.iter().any(|h| h == n))
    }
}

/// Picks a chart from the columns of a known export.
pub fn chart_for(cols: &Columns) -> Result<Chart, Failure> {
    if cols.has(&["quality", "probability"]) {
        let points = cols
            .numeric("quality")?
            .into_iter()
            .zip(cols.numeric("probability")?)
            .collect();
        return Ok(Chart {
            title: "Probability by solution quality".into(),
            x_label: "quality".into(),
            y_label: "probability".into(),
            style: Style::Stems,
            log_log: false,
            series: vec![Series {
                name: "probability".into(),
                points,
            }],
        });
    }
    if cols.has(&["quality", "mean_amplification"]) {
        let points = cols
            .numeric("quality")?
            .into_iter()
            .zip(cols.numeric("mean_amplification")?)
            .collect();
        return Ok(Chart {
            title: "Mean amplification by solution quality".into(),
            x_label: "quality".into(),
            y_label: "amplification".into(),
            style: Style::Points,
            log_log: false,
            series: vec![Series {
                name: "amplification".into(),
                points,
            }],
        });
    }
    if cols.has(&["r", "qwoa_expectation", "classical_expected_best", "target"]) {
        let r = cols.numeric("r")?;
        let target = cols.numeric("target")?;
        let gap = |name: &str| -> Result<Vec<(f64, f64)>, Failure> {
            Ok(cols
                .numeric(name)?
                .into_iter()
                .zip(&r)
                .zip(&target)
                .filter(|((v, _), t)| v - *t > 0.0)
                .map(|((v, r), t)| (*r, v - t))
                .collect())
        };
        return Ok(Chart {
            title: "Gap to optimum versus depth".into(),
            x_label: "r".into(),
            y_label: "expected quality - optimum".into(),
            style: Style::Lines,
            log_log: true,
            series: vec![
                Series {
                    name: "QWOA".into(),
                    points: gap("qwoa_expectation")?,
                },
                Series {
                    name: "classical (2r samples)".into(),
                    points: gap("classical_expected_best")?,
                },
            ],
        });
    }
    if cols.has(&["r", "best_objective"]) {
        let points = cols
            .numeric("r")?
            .into_iter()
            .zip(cols.numeric("best_objective")?)
            .collect();
        return Ok(Chart {
            title: "Best objective versus depth".into(),
            x_label: "r".into(),
            y_label: "objective".into(),
            style: Style::Lines,
            log_log: false,
            series: vec![Series {
                name: "best objective".into(),
                points,
            }],
        });
    }
    if cols.has(&["index", "amplification"]) {
        let points = cols
            .numeric("index")?
            .into_iter()
            .zip(cols.numeric("amplification")?)
            .collect();
        return Ok(Chart {
            title: "Amplification by solution index".into(),
            x_label: "index".into(),
            y_label: "amplification".into(),
            style: Style::Points,
            log_log: false,
            series: vec![Series {
                name: "amplification".into(),
                points,
            }],
        });
    }
    Err(Failure::Validation(format!(
        "no chart for columns {}",
        cols.header.join(",")
    )))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    (0..=4).map(|k| lo + (hi - lo) * k as f64 / 4.0).collect()
}

fn fmt_tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

pub fn render(chart: &Chart) -> String {
    let tx = |v: f64| if chart.log_log { v.ln() } else { v };
    let all: Vec<(f64, f64)> = chart
        .series
        .iter()
        .flat_map(|s| s.points.iter().map(|&(x, y)| (tx(x), tx(y))))
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    let (mut x0, mut x1, mut y0, mut y1) = all.iter().fold(
        (
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        ),
        |(a, b, c, d), &(x, y)| (a.min(x), b.max(x), c.min(y), d.max(y)),
    );
    if all.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if chart.style == Style::Stems && !chart.log_log {
        y0 = y0.min(0.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let pad = (y1 - y0) * 0.05;
    y1 += pad;
    if chart.style != Style::Stems {
        y0 -= pad;
    }
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);
    let label = |v: f64| fmt_tick(if chart.log_log { v.exp() } else { v });

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(&chart.title)
    );
    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        svg,
        r#"<path d="M{left},{top} L{left},{bottom} L{right},{bottom}" stroke="black" fill="none"/>"#
    );
    for x in ticks(x0, x1) {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            px(x),
            bottom + 16.0,
            label(x)
        );
    }
    for y in ticks(y0, y1) {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            left - 6.0,
            py(y) + 4.0,
            label(y)
        );
    }
    let log_note = if chart.log_log { " (log)" } else { "" };
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{}{log_note}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 18.0,
        escape(&chart.x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{}{log_note}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(&chart.y_label)
    );

    for (k, series) in chart.series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let pts: Vec<(f64, f64)> = series
            .points
            .iter()
            .map(|&(x, y)| (tx(x), tx(y)))
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .collect();
        match chart.style {
            Style::Lines => {
                let path: Vec<String> = pts
                    .iter()
                    .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                    .collect();
                let _ = writeln!(
                    svg,
                    r#"<polyline points="{}" stroke="{color}" stroke-width="2" fill="none"/>"#,
                    path.join(" ")
                );
                for &(x, y) in &pts {
                    let _ = writeln!(
                        svg,
                        r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                        px(x),
                        py(y)
                    );
                }
            }
            Style::Stems => {
                for &(x, y) in &pts {
                    let _ = writeln!(
                        svg,
                        r#"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="{color}" stroke-width="2"/>"#,
                        px(x),
                        py(y0.max(0.0)),
                        py(y)
                    );
                }
            }
            Style::Points => {
                for &(x, y) in &pts {
                    let _ = writeln!(
                        svg,
                        r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                        px(x),
                        py(y)
                    );
                }
            }
        }
        let ly = top + 4.0 + 18.0 * k as f64;
        let _ = writeln!(
            svg,
            r#"<rect x="{:.2}" y="{:.2}" width="12" height="12" fill="{color}"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            right - 170.0,
            ly,
            right - 152.0,
            ly + 10.0,
            escape(&series.name)
        );
    }
    svg.push_str("</svg>\n");
    svg
}
