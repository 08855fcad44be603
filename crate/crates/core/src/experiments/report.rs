use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::{ExperimentError, Summary};

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub name: String,
    pub summary: Summary,
}

/// One plotted line: `(x, mean, CI half-width)` points.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bar {
    pub label: String,
    pub value: f64,
    pub half_width: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub enum Chart {
    #[default]
    None,
    Lines {
        x_label: String,
        y_label: String,
        series: Vec<Series>,
    },
    Bars {
        y_label: String,
        bars: Vec<Bar>,
    },
}

/// Per-sample rows, aggregate statistics and a chart for one experiment run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentReport {
    pub name: String,
    /// Parameters the run was made with, in insertion order.
    pub config: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub aggregates: Vec<Aggregate>,
    pub chart: Chart,
}

impl ExperimentReport {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Default::default()
        }
    }

    pub fn with_config(mut self, key: &str, value: impl ToString) -> Self {
        self.config.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push_aggregate(&mut self, name: impl Into<String>, values: &[f64]) -> Summary {
        let summary = Summary::of(values);
        self.aggregates.push(Aggregate {
            name: name.into(),
            summary,
        });
        summary
    }

    pub fn aggregate(&self, name: &str) -> Option<&Summary> {
        self.aggregates
            .iter()
            .find(|a| a.name == name)
            .map(|a| &a.summary)
    }

    pub fn config_value(&self, key: &str) -> Option<&str> {
        self.config
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

/// Writes `<name>.csv`, `<name>_summary.csv`, `<name>_config.txt` and, when the
/// report has a chart, `<name>.svg` into `out_dir`. Returns the written paths.
pub fn emit_report(report: &ExperimentReport, out_dir: &Path) -> Result<Vec<PathBuf>, ExperimentError> {
    let io = |path: &Path, source| ExperimentError::Io {
        path: path.display().to_string(),
        source,
    };
    fs::create_dir_all(out_dir).map_err(|e| io(out_dir, e))?;
    let mut written = Vec::new();

    let rows_path = out_dir.join(format!("{}.csv", report.name));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&report.columns)?;
    for row in &report.rows {
        w.write_record(row)?;
    }
    write_file(&rows_path, &finish(w)?, &io)?;
    written.push(rows_path);

    let summary_path = out_dir.join(format!("{}_summary.csv", report.name));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["metric", "n", "mean", "std", "ci95", "ci99"])?;
    for a in &report.aggregates {
        let s = &a.summary;
        w.write_record([
            a.name.clone(),
            s.n.to_string(),
            s.mean.to_string(),
            s.std.to_string(),
            s.ci95.to_string(),
            s.ci99.to_string(),
        ])?;
    }
    write_file(&summary_path, &finish(w)?, &io)?;
    written.push(summary_path);

    let config_path = out_dir.join(format!("{}_config.txt", report.name));
    let config: String = report
        .config
        .iter()
        .map(|(k, v)| format!("{k} = {v}\n"))
        .collect();
    write_file(&config_path, config.as_bytes(), &io)?;
    written.push(config_path);

    if let Some(svg) = render_svg(report) {
        let svg_path = out_dir.join(format!("{}.svg", report.name));
        write_file(&svg_path, svg.as_bytes(), &io)?;
        written.push(svg_path);
    }
    Ok(written)
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>, ExperimentError> {
    w.into_inner()
        .map_err(|e| ExperimentError::Config(format!("csv buffer: {e}")))
}

fn write_file(
    path: &Path,
    bytes: &[u8],
    io: &impl Fn(&Path, std::io::Error) -> ExperimentError,
) -> Result<(), ExperimentError> {
    fs::write(path, bytes).map_err(|e| io(path, e))
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 160.0;
const TOP: f64 = 36.0;
const BOTTOM: f64 = 52.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Linear map from a data interval onto a pixel interval.
struct Axis {
    lo: f64,
    hi: f64,
    px_lo: f64,
    px_hi: f64,
}

impl Axis {
    fn new(lo: f64, hi: f64, px_lo: f64, px_hi: f64) -> Self {
        let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, lo + 0.5) };
        Self { lo, hi, px_lo, px_hi }
    }

    fn map(&self, v: f64) -> f64 {
        self.px_lo + (v - self.lo) / (self.hi - self.lo) * (self.px_hi - self.px_lo)
    }

    fn ticks(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=4).map(move |i| self.lo + (self.hi - self.lo) * i as f64 / 4.0)
    }
}

/// Y range: `[0, 1]` when the data fits, otherwise the data range.
fn y_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if lo >= 0.0 && hi <= 1.0 {
        (0.0, 1.0)
    } else {
        (lo.min(0.0), hi)
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn render_svg(report: &ExperimentReport) -> Option<String> {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + (WIDTH - LEFT - RIGHT) / 2.0,
        escape(&report.name)
    );
    let (px_x0, px_x1, px_y0, px_y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
    match &report.chart {
        Chart::None => return None,
        Chart::Lines {
            x_label,
            y_label,
            series,
        } => {
            let xs = series.iter().flat_map(|s| s.points.iter().map(|p| p.0));
            let (x_lo, x_hi) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
                (a.min(v), b.max(v))
            });
            let x_axis = if x_lo.is_finite() {
                Axis::new(x_lo, x_hi, px_x0, px_x1)
            } else {
                Axis::new(0.0, 1.0, px_x0, px_x1)
            };
            let ys = series
                .iter()
                .flat_map(|s| s.points.iter().flat_map(|p| [p.1 - p.2, p.1 + p.2]));
            let (y_lo, y_hi) = y_range(ys);
            let y_axis = Axis::new(y_lo, y_hi, px_y0, px_y1);
            draw_frame(&mut s, &x_axis, &y_axis, x_label, y_label);
            for (i, series) in series.iter().enumerate() {
                let color = PALETTE[i % PALETTE.len()];
                let pts: Vec<String> = series
                    .points
                    .iter()
                    .map(|&(x, y, _)| format!("{:.2},{:.2}", x_axis.map(x), y_axis.map(y)))
                    .collect();
                let _ = writeln!(
                    s,
                    r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                    pts.join(" ")
                );
                for &(x, y, hw) in series.points.iter().filter(|p| p.2 > 0.0) {
                    let px = x_axis.map(x);
                    let _ = writeln!(
                        s,
                        r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="{color}" stroke-opacity="0.5"/>"#,
                        y_axis.map(y - hw),
                        y_axis.map(y + hw)
                    );
                }
                legend(&mut s, i, color, &series.name);
            }
        }
        Chart::Bars { y_label, bars } => {
            let ys = bars
                .iter()
                .flat_map(|b| [b.value - b.half_width, b.value + b.half_width]);
            let (y_lo, y_hi) = y_range(ys);
            let y_axis = Axis::new(y_lo, y_hi, px_y0, px_y1);
            let slot = (px_x1 - px_x0) / bars.len().max(1) as f64;
            draw_y_axis(&mut s, &y_axis, y_label);
            let _ = writeln!(
                s,
                r#"<line x1="{px_x0}" y1="{px_y0}" x2="{px_x1}" y2="{px_y0}" stroke="black"/>"#
            );
            for (i, bar) in bars.iter().enumerate() {
                let color = PALETTE[0];
                let x = px_x0 + slot * i as f64 + slot * 0.15;
                let w = slot * 0.7;
                let top = y_axis.map(bar.value);
                let base = y_axis.map(y_lo.max(0.0));
                let _ = writeln!(
                    s,
                    r#"<rect x="{x:.2}" y="{:.2}" width="{w:.2}" height="{:.2}" fill="{color}" fill-opacity="0.7"/>"#,
                    top.min(base),
                    (base - top).abs()
                );
                let cx = x + w / 2.0;
                if bar.half_width > 0.0 {
                    let _ = writeln!(
                        s,
                        r#"<line x1="{cx:.2}" y1="{:.2}" x2="{cx:.2}" y2="{:.2}" stroke="black"/>"#,
                        y_axis.map(bar.value - bar.half_width),
                        y_axis.map(bar.value + bar.half_width)
                    );
                }
                let _ = writeln!(
                    s,
                    r#"<text x="{cx:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                    px_y0 + 16.0,
                    escape(&bar.label)
                );
            }
        }
    }
    s.push_str("</svg>\n");
    Some(s)
}

fn draw_frame(s: &mut String, x: &Axis, y: &Axis, x_label: &str, y_label: &str) {
    draw_y_axis(s, y, y_label);
    let _ = writeln!(
        s,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#,
        x.px_lo, y.px_lo, x.px_hi, y.px_lo
    );
    for t in x.ticks() {
        let px = x.map(t);
        let _ = writeln!(
            s,
            r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{t:.2}</text>"#,
            y.px_lo + 16.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        (x.px_lo + x.px_hi) / 2.0,
        y.px_lo + 36.0,
        escape(x_label)
    );
}

fn draw_y_axis(s: &mut String, y: &Axis, y_label: &str) {
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{:.2}" x2="{LEFT}" y2="{:.2}" stroke="black"/>"#,
        y.px_lo, y.px_hi
    );
    for t in y.ticks() {
        let py = y.map(t);
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{t:.2}</text>"#,
            LEFT - 6.0,
            py + 4.0
        );
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#dddddd"/>"##,
            WIDTH - RIGHT
        );
    }
    let _ = writeln!(
        s,
        r#"<text transform="translate(16 {:.2}) rotate(-90)" text-anchor="middle">{}</text>"#,
        (y.px_lo + y.px_hi) / 2.0,
        escape(y_label)
    );
}

fn legend(s: &mut String, i: usize, color: &str, name: &str) {
    let y = TOP + 12.0 + 18.0 * i as f64;
    let x = WIDTH - RIGHT + 12.0;
    let _ = writeln!(
        s,
        r#"<line x1="{x:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{color}" stroke-width="2"/>"#,
        x + 18.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
        x + 24.0,
        y + 4.0,
        escape(name)
    );
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sweep_like() -> ExperimentReport {
        let mut r = ExperimentReport::new("demo", &["alpha", "value"]).with_config("pairs", 2);
        r.rows.push(vec!["0".into(), "0.5".into()]);
        r.push_aggregate("value", &[0.5, 0.7]);
        let series = |name: &str| Series {
            name: name.into(),
            points: vec![(0.0, 0.5, 0.1), (1.0, 1.0, 0.0)],
        };
        r.chart = Chart::Lines {
            x_label: "alpha".into(),
            y_label: "similarity".into(),
            series: vec![series("a"), series("b"), series("c")],
        };
        r
    }

    #[test]
    fn empty_report_writes_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let r = ExperimentReport::new("empty", &["x", "y"]);
        let paths = emit_report(&r, dir.path()).unwrap();
        assert_eq!(fs::read_to_string(&paths[0]).unwrap(), "x,y\n");
        assert_eq!(paths.len(), 3, "no chart, no svg");
    }

    #[test]
    fn re_emit_is_byte_identical() {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let r = sweep_like();
        let pa = emit_report(&r, a.path()).unwrap();
        let pb = emit_report(&r, b.path()).unwrap();
        assert_eq!(pa.len(), 4);
        for (x, y) in pa.iter().zip(&pb) {
            assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap());
        }
        let config = fs::read_to_string(a.path().join("demo_config.txt")).unwrap();
        assert_eq!(config, "pairs = 2\n");
    }

    #[test]
    fn lines_chart_has_one_polyline_per_series() {
        let svg = render_svg(&sweep_like()).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 3);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(!svg.contains("href"), "self-contained");
    }

    #[test]
    fn unwritable_directory_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("plain");
        fs::write(&file, b"x").unwrap();
        assert!(emit_report(&sweep_like(), &file.join("sub")).is_err());
    }
}
