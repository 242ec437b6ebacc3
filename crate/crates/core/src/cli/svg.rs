//! Self-contained SVG line charts of CSV columns.

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlotError {
    #[error("csv: {0}")]
    Csv(String),
    #[error("csv has no data rows")]
    Empty,
    #[error("row {row}: `{value}` is not a number")]
    NotNumeric { row: usize, value: String },
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("log scale needs positive x values")]
    NonPositiveLogX,
}

/// Numeric table read from CSV; the first column is the x axis.
///
/// Text cells are stored as NaN and remembered, so a text column only fails
/// once it is asked to be plotted.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub columns: Vec<Vec<f64>>,
    first_text: Vec<Option<(usize, String)>>,
}

impl Table {
    /// Parses CSV with a header row. `NaN` cells are kept and plotted as gaps.
    pub fn from_csv(text: &str) -> Result<Self, PlotError> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let headers: Vec<String> = reader
            .headers()
            .map_err(|e| PlotError::Csv(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        if headers.is_empty() || headers.iter().all(String::is_empty) {
            return Err(PlotError::Empty);
        }
        let mut columns = vec![Vec::new(); headers.len()];
        let mut first_text = vec![None; headers.len()];
        for (i, record) in reader.records().enumerate() {
            let record = record.map_err(|e| PlotError::Csv(e.to_string()))?;
            for ((col, text), cell) in columns.iter_mut().zip(&mut first_text).zip(record.iter()) {
                let v = cell.parse::<f64>().unwrap_or_else(|_| {
                    text.get_or_insert((i + 2, cell.to_string()));
                    f64::NAN
                });
                col.push(v);
            }
        }
        if columns[0].is_empty() {
            return Err(PlotError::Empty);
        }
        let table = Self {
            headers,
            columns,
            first_text,
        };
        table.numeric(0)?;
        Ok(table)
    }

    fn numeric(&self, index: usize) -> Result<&[f64], PlotError> {
        match &self.first_text[index] {
            Some((row, value)) => Err(PlotError::NotNumeric {
                row: *row,
                value: value.clone(),
            }),
            None => Ok(&self.columns[index]),
        }
    }

    /// The named column, failing if it holds a non-numeric cell.
    pub fn column(&self, name: &str) -> Result<&[f64], PlotError> {
        let index = self
            .headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| PlotError::UnknownColumn(name.to_string()))?;
        self.numeric(index)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotOptions {
    pub width: f64,
    pub height: f64,
    pub title: Option<String>,
    pub log_x: bool,
}

impl Default for PlotOptions {
    fn default() -> Self {
        Self {
            width: 800.0,
            height: 480.0,
            title: None,
            log_x: false,
        }
    }
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;

/// Roughly five round tick values covering `[lo, hi]`.
fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= 6.0)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn fmt_tick(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 {
        "0".to_string()
    } else if !(1e-3..1e4).contains(&a) {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (-1.0, 1.0);
    }
    if hi - lo <= f64::EPSILON * lo.abs().max(1.0) {
        let pad = lo.abs().max(1.0) * 0.05;
        return (lo - pad, hi + pad);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

/// Renders `series` (column names) against the first column of `table`.
pub fn render(table: &Table, series: &[String], opts: &PlotOptions) -> Result<String, PlotError> {
    let xs_raw = &table.columns[0];
    if opts.log_x && xs_raw.iter().any(|&x| !(x > 0.0)) {
        return Err(PlotError::NonPositiveLogX);
    }
    let xs: Vec<f64> = if opts.log_x {
        xs_raw.iter().map(|x| x.log10()).collect()
    } else {
        xs_raw.clone()
    };
    let ys: Vec<&[f64]> = series
        .iter()
        .map(|name| table.column(name))
        .collect::<Result<_, _>>()?;

    let (x_lo, x_hi) = {
        let (lo, hi) = padded_range(xs.iter().copied());
        let (dlo, dhi) = (xs.iter().copied().fold(f64::INFINITY, f64::min), xs.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        if dhi > dlo { (dlo, dhi) } else { (lo, hi) }
    };
    let (y_lo, y_hi) = padded_range(ys.iter().flat_map(|c| c.iter().copied()));

    let plot_w = opts.width - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = opts.height - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |x: f64| MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |y: f64| MARGIN_TOP + (y_hi - y) / (y_hi - y_lo) * plot_h;

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#,
        w = opts.width,
        h = opts.height
    )
    .unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    if let Some(title) = &opts.title {
        writeln!(
            s,
            r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            MARGIN_LEFT + plot_w / 2.0,
            escape(title)
        )
        .unwrap();
    }

    // grid and ticks
    for t in nice_ticks(y_lo, y_hi) {
        let y = sy(t);
        writeln!(
            s,
            r##"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>"##,
            MARGIN_LEFT,
            MARGIN_LEFT + plot_w
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            MARGIN_LEFT - 6.0,
            y + 4.0,
            fmt_tick(t)
        )
        .unwrap();
    }
    let x_ticks = if opts.log_x {
        ((x_lo.ceil() as i64)..=(x_hi.floor() as i64)).map(|k| k as f64).collect()
    } else {
        nice_ticks(x_lo, x_hi)
    };
    for t in x_ticks {
        let x = sx(t);
        let label = if opts.log_x { fmt_tick(10f64.powf(t)) } else { fmt_tick(t) };
        writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#dddddd"/>"##,
            MARGIN_TOP,
            MARGIN_TOP + plot_h
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#,
            MARGIN_TOP + plot_h + 18.0
        )
        .unwrap();
    }

    // axes
    writeln!(
        s,
        r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        MARGIN_LEFT, MARGIN_TOP, plot_w, plot_h
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        opts.height - 10.0,
        escape(&table.headers[0])
    )
    .unwrap();

    // series, split into separate polylines at non-finite values
    for (i, (name, col)) in series.iter().zip(&ys).enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let mut segments: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
        for (x, y) in xs.iter().zip(col.iter()) {
            if y.is_finite() {
                segments.last_mut().unwrap().push((sx(*x), sy(*y)));
            } else if !segments.last().unwrap().is_empty() {
                segments.push(Vec::new());
            }
        }
        for seg in segments.iter().filter(|s| !s.is_empty()) {
            let points: Vec<String> = seg.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            writeln!(
                s,
                r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
                points.join(" ")
            )
            .unwrap();
        }

        let ly = MARGIN_TOP + 10.0 + 20.0 * i as f64;
        let lx = MARGIN_LEFT + plot_w + 15.0;
        writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{colour}" stroke-width="2"/>"#,
            lx + 25.0
        )
        .unwrap();
        writeln!(s, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, lx + 32.0, ly + 4.0, escape(name)).unwrap();
    }

    s.push_str("</svg>\n");
    Ok(s)
}
