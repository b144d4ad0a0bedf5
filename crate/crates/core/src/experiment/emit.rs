use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::{ExperimentError, ExperimentResult, Rows};
use crate::lattice::Site;

/// Which files [`write_outputs`] produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutputFormats {
    pub csv: bool,
    pub json: bool,
    pub svg: bool,
}

impl OutputFormats {
    /// CSV and JSON unless some format was asked for explicitly.
    pub fn from_flags(csv: bool, json: bool, svg: bool) -> Self {
        if csv || json || svg {
            OutputFormats { csv, json, svg }
        } else {
            OutputFormats { csv: true, json: true, svg: false }
        }
    }
}

/// Fixed CSV header for the result's row schema.
pub fn csv_header(rows: &Rows, two_d: bool) -> &'static str {
    match (rows, two_d) {
        (Rows::Exact(_), false) => "i,p,k,prob,method",
        (Rows::Exact(_), true) => "i,j,p,k,prob,method",
        (Rows::Sites(_), false) => "site,freq_under_covered,ci_low,ci_high",
        (Rows::Sites(_), true) => "i,j,freq_under_covered,ci_low,ci_high",
        (Rows::Trials(_), _) => "trial,seed,last_under_covered,deficient_fraction",
        (Rows::Scan(_), _) => "param,value,statistic,mean,ci_low,ci_high",
        (Rows::Diagnose(_), _) => "n,partial_sum,growth_ratio,decay_exponent",
        (Rows::Continuum(_), _) => "lambda,trial,seed,points,statistic,clamp_count",
    }
}

fn site_cells(site: Site) -> String {
    match site {
        Site::Line(x) => x.to_string(),
        Site::Grid(i, j) => format!("{i},{j}"),
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

pub fn to_csv(result: &ExperimentResult) -> String {
    let two_d = result.spec.dimension.get() == 2;
    let mut out = String::new();
    out.push_str(csv_header(&result.rows, two_d));
    out.push('\n');
    let mut line = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    match &result.rows {
        Rows::Exact(rows) => rows.iter().for_each(|r| line(format!("{},{},{},{},{}", site_cells(r.site), r.p, r.k, r.prob, r.method))),
        Rows::Sites(rows) => rows.iter().for_each(|r| line(format!("{},{},{},{}", site_cells(r.site), r.freq_under_covered, r.ci_low, r.ci_high))),
        Rows::Trials(rows) => rows.iter().for_each(|r| line(format!("{},{},{},{}", r.trial, r.seed, opt(r.last_under_covered), r.deficient_fraction))),
        Rows::Scan(rows) => rows.iter().for_each(|r| line(format!("{},{},{},{},{},{}", r.param, r.value, r.statistic, r.mean, r.ci_low, r.ci_high))),
        Rows::Diagnose(rows) => rows.iter().for_each(|r| line(format!("{},{},{},{}", r.n, r.partial_sum, opt(r.growth_ratio), opt(r.decay_exponent)))),
        Rows::Continuum(rows) => {
            rows.iter().for_each(|r| line(format!("{},{},{},{},{},{}", r.lambda, r.trial, r.seed, r.points, r.statistic, r.clamp_count)))
        }
    }
    out
}

pub fn to_json(result: &ExperimentResult) -> String {
    let mut s = serde_json::to_string_pretty(result).expect("results serialise");
    s.push('\n');
    s
}

struct Series {
    x_label: &'static str,
    y_label: String,
    points: Vec<(f64, f64)>,
}

fn series(result: &ExperimentResult) -> Series {
    let first_coord = |s: Site| match s {
        Site::Line(x) | Site::Grid(x, _) => x as f64,
    };
    match &result.rows {
        Rows::Exact(rows) => {
            let method = rows[0].method;
            Series {
                x_label: "i",
                y_label: format!("P(fewer than k covers), {method}"),
                points: rows.iter().filter(|r| r.method == method).map(|r| (first_coord(r.site), r.prob)).collect(),
            }
        }
        Rows::Sites(rows) => Series {
            x_label: "site",
            y_label: "under-covered frequency".into(),
            points: rows.iter().map(|r| (first_coord(r.site), r.freq_under_covered)).collect(),
        },
        Rows::Trials(rows) => Series {
            x_label: "trial",
            y_label: "deficient fraction".into(),
            points: rows.iter().map(|r| (r.trial as f64, r.deficient_fraction)).collect(),
        },
        Rows::Scan(rows) => {
            let numeric = rows.iter().all(|r| r.value.parse::<f64>().is_ok());
            Series {
                x_label: if numeric { if rows[0].param == "p" { "p" } else { "lambda" } } else { "grid index" },
                y_label: format!("mean {}", rows[0].statistic),
                points: rows.iter().enumerate().map(|(ix, r)| (if numeric { r.value.parse().unwrap_or(0.0) } else { ix as f64 }, r.mean)).collect(),
            }
        }
        Rows::Diagnose(rows) => Series {
            x_label: "n",
            y_label: "partial sum S(n)".into(),
            points: rows.iter().map(|r| (r.n as f64, r.partial_sum)).collect(),
        },
        Rows::Continuum(rows) => Series {
            x_label: "trial",
            y_label: rows.first().map_or("statistic", |_| crate::continuum::statistic_name(result.spec.dimension)).to_string(),
            points: rows.iter().map(|r| (r.trial as f64, r.statistic)).collect(),
        },
    }
}

/// Single-series line plot with labelled axes and a caption.
pub fn to_svg(result: &ExperimentResult) -> String {
    const W: f64 = 640.0;
    const H: f64 = 420.0;
    const LEFT: f64 = 80.0;
    const RIGHT: f64 = 20.0;
    const TOP: f64 = 40.0;
    const BOTTOM: f64 = 70.0;
    let s = series(result);
    let range = |vals: &mut dyn Iterator<Item = f64>| {
        let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        if !lo.is_finite() {
            (0.0, 1.0)
        } else if hi - lo < 1e-300 {
            (lo - 0.5, hi + 0.5)
        } else {
            (lo, hi)
        }
    };
    let (x0, x1) = range(&mut s.points.iter().map(|p| p.0));
    let (y0, y1) = range(&mut s.points.iter().map(|p| p.1));
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * (W - LEFT - RIGHT);
    let py = |y: f64| H - BOTTOM - (y - y0) / (y1 - y0) * (H - TOP - BOTTOM);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let (ax, ay) = (LEFT, H - BOTTOM);
    let _ = writeln!(svg, r#"<line x1="{ax}" y1="{ay}" x2="{}" y2="{ay}" stroke="black"/>"#, W - RIGHT);
    let _ = writeln!(svg, r#"<line x1="{ax}" y1="{ay}" x2="{ax}" y2="{TOP}" stroke="black"/>"#);
    for t in 0..=4 {
        let f = t as f64 / 4.0;
        let xv = x0 + f * (x1 - x0);
        let yv = y0 + f * (y1 - y0);
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, px(xv), ay + 18.0, tick(xv));
        let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#, ax - 6.0, py(yv) + 4.0, tick(yv));
    }
    let _ = writeln!(svg, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, (LEFT + W - RIGHT) / 2.0, ay + 40.0, escape(s.x_label));
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">{}</text>"#,
        (TOP + ay) / 2.0,
        (TOP + ay) / 2.0,
        escape(&s.y_label)
    );
    let pts: Vec<String> = s.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
    let _ = writeln!(svg, r#"<polyline fill="none" stroke="steelblue" stroke-width="2" points="{}"/>"#, pts.join(" "));
    for &(x, y) in &s.points {
        let _ = writeln!(svg, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="steelblue"/>"#, px(x), py(y));
    }
    let caption = format!("{}: {} against {} (seed {})", result.spec.subcommand, s.y_label, s.x_label, result.spec.seed);
    let _ = writeln!(svg, r#"<text x="{:.1}" y="{}" text-anchor="middle">{}</text>"#, W / 2.0, H - 12.0, escape(&caption));
    svg.push_str("</svg>\n");
    svg
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e5 || v.abs() < 1e-3) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn with_suffix(stem: &Path, ext: &str) -> PathBuf {
    let mut s = OsString::from(stem.as_os_str());
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

/// Writes `<stem>.csv`, `<stem>.json` and `<stem>.svg` as selected and
/// returns the paths written.
pub fn write_outputs(result: &ExperimentResult, stem: &Path, formats: OutputFormats) -> Result<Vec<PathBuf>, ExperimentError> {
    let mut written = Vec::new();
    let jobs: [(bool, &str, fn(&ExperimentResult) -> String); 3] =
        [(formats.csv, "csv", to_csv), (formats.json, "json", to_json), (formats.svg, "svg", to_svg)];
    for (wanted, ext, render) in jobs {
        if !wanted {
            continue;
        }
        let path = with_suffix(stem, ext);
        std::fs::write(&path, render(result)).map_err(|source| ExperimentError::Io { path: path.clone(), source })?;
        written.push(path);
    }
    Ok(written)
}
