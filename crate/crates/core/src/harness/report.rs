use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::runner::ResultRecord;
use crate::error::{Error, Result};

/// Aggregate of one (benchmark, method, N_s, M_or_K) group.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub benchmark: String,
    pub method: String,
    pub n_reservoir: usize,
    #[serde(rename = "M_or_K")]
    pub m_or_k: usize,
    /// Rows in the group, diverged ones included.
    pub runs: usize,
    pub diverged: usize,
    pub test_nmse_mean: f64,
    pub test_nmse_std: f64,
    pub train_nmse_mean: f64,
    pub train_nmse_std: f64,
}

/// Mean and sample standard deviation; the std of a single value is 0.
/// Empty input gives NaN for both.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

type GroupKey = (String, String, usize, usize);

fn groups(records: &[ResultRecord]) -> BTreeMap<GroupKey, Vec<&ResultRecord>> {
    let mut map: BTreeMap<GroupKey, Vec<&ResultRecord>> = BTreeMap::new();
    for r in records {
        map.entry((r.benchmark.clone(), r.method.clone(), r.n_reservoir, r.m_or_k))
            .or_default()
            .push(r);
    }
    map
}

/// Per-group statistics over repetitions, ignoring diverged metrics. Rows
/// are sorted by benchmark, method, N_s, then M_or_K.
pub fn summarize(records: &[ResultRecord]) -> Vec<SummaryRow> {
    groups(records)
        .into_iter()
        .map(|((benchmark, method, n_reservoir, m_or_k), rows)| {
            let test: Vec<f64> = rows.iter().filter_map(|r| r.test_nmse.value()).collect();
            let train: Vec<f64> = rows.iter().filter_map(|r| r.train_nmse.value()).collect();
            let (test_nmse_mean, test_nmse_std) = mean_std(&test);
            let (train_nmse_mean, train_nmse_std) = mean_std(&train);
            SummaryRow {
                benchmark,
                method,
                n_reservoir,
                m_or_k,
                runs: rows.len(),
                diverged: rows.iter().filter(|r| r.is_diverged()).count(),
                test_nmse_mean,
                test_nmse_std,
                train_nmse_mean,
                train_nmse_std,
            }
        })
        .collect()
}

pub fn write_summary<W: Write>(rows: &[SummaryRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::data(format!("csv error: {e}")))?;
    }
    w.flush().map_err(|e| Error::data(format!("csv write failed: {e}")))
}

/// One curve of test NMSE against reservoir size.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub benchmark: String,
    pub method: String,
    pub m_or_k: usize,
    /// `(n_reservoir, mean test NMSE, std)` sorted by strictly increasing size.
    pub points: Vec<(usize, f64, f64)>,
}

impl Curve {
    pub fn label(&self) -> String {
        match self.method.as_str() {
            "boost" => format!("{} boost M={}", self.benchmark, self.m_or_k),
            "baseline" => format!("{} baseline K={}", self.benchmark, self.m_or_k),
            _ => format!("{} {}", self.benchmark, self.method),
        }
    }

    pub fn file_stem(&self) -> String {
        match self.method.as_str() {
            "boost" => format!("{}_boost_M{}", self.benchmark, self.m_or_k),
            "baseline" => format!("{}_baseline_K{}", self.benchmark, self.m_or_k),
            _ => format!("{}_{}", self.benchmark, self.method),
        }
    }
}

/// Curves per (benchmark, method, M_or_K). Groups whose every run diverged
/// are left out.
pub fn plot_curves(records: &[ResultRecord]) -> Vec<Curve> {
    let mut curves: BTreeMap<(String, String, usize), Curve> = BTreeMap::new();
    for row in summarize(records) {
        if row.test_nmse_mean.is_nan() {
            continue;
        }
        curves
            .entry((row.benchmark.clone(), row.method.clone(), row.m_or_k))
            .or_insert_with(|| Curve {
                benchmark: row.benchmark.clone(),
                method: row.method.clone(),
                m_or_k: row.m_or_k,
                points: Vec::new(),
            })
            .points
            .push((row.n_reservoir, row.test_nmse_mean, row.test_nmse_std));
    }
    // summary rows arrive sorted by n_reservoir within each key, one per size
    curves.into_values().collect()
}

/// Writes `<stem>.csv` per curve into `dir` and returns the paths.
pub fn write_plotdata(curves: &[Curve], dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut paths = Vec::with_capacity(curves.len());
    for c in curves {
        let path = dir.join(format!("{}.csv", c.file_stem()));
        let mut text = String::from("n_reservoir,test_nmse_mean,test_nmse_std\n");
        for (x, y, s) in &c.points {
            writeln!(text, "{x},{y},{s}").expect("write to String");
        }
        std::fs::write(&path, text).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
        paths.push(path);
    }
    Ok(paths)
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// Self-contained SVG line chart of the curves, NMSE on a log10 axis.
pub fn render_svg(curves: &[Curve], title: &str) -> String {
    let (w, h) = (720.0, 440.0);
    let (left, right, top, bottom) = (70.0, 200.0, 40.0, 50.0);
    let pw = w - left - right;
    let ph = h - top - bottom;

    let pts = curves.iter().flat_map(|c| c.points.iter());
    let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y, _) in pts {
        xmin = xmin.min(x as f64);
        xmax = xmax.max(x as f64);
        if y > 0.0 {
            ymin = ymin.min(y.log10());
            ymax = ymax.max(y.log10());
        }
    }
    if !xmin.is_finite() {
        (xmin, xmax) = (0.0, 1.0);
    }
    if !ymin.is_finite() {
        (ymin, ymax) = (-1.0, 0.0);
    }
    if xmax == xmin {
        xmax = xmin + 1.0;
    }
    ymin = ymin.floor();
    ymax = ymax.ceil().max(ymin + 1.0);
    let sx = |x: f64| left + (x - xmin) / (xmax - xmin) * pw;
    let sy = |ly: f64| top + (ymax - ly) / (ymax - ymin) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        left + pw / 2.0,
        escape(title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    let mut e = ymin as i32;
    while e <= ymax as i32 {
        let y = sy(e as f64);
        let _ = writeln!(
            s,
            r##"<line x1="{left}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/><text x="{:.1}" y="{:.1}" text-anchor="end">1e{e}</text>"##,
            left + pw,
            left - 6.0,
            y + 4.0
        );
        e += 1;
    }
    let mut xs: Vec<usize> = curves.iter().flat_map(|c| c.points.iter().map(|p| p.0)).collect();
    xs.sort_unstable();
    xs.dedup();
    let stride = xs.len().div_ceil(12).max(1);
    for x in xs.iter().step_by(stride) {
        let px = sx(*x as f64);
        let _ = writeln!(
            s,
            r#"<text x="{px:.1}" y="{:.1}" text-anchor="middle">{x}</text>"#,
            top + ph + 18.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">reservoir size</text>"#,
        left + pw / 2.0,
        h - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(16 {:.1}) rotate(-90)" text-anchor="middle">test NMSE</text>"#,
        top + ph / 2.0
    );

    for (i, c) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let coords: Vec<String> = c
            .points
            .iter()
            .filter(|p| p.1 > 0.0)
            .map(|&(x, y, _)| format!("{:.1},{:.1}", sx(x as f64), sy(y.log10())))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            coords.join(" ")
        );
        for p in &coords {
            let (px, py) = p.split_once(',').expect("formatted pair");
            let _ = writeln!(s, r#"<circle cx="{px}" cy="{py}" r="3" fill="{color}"/>"#);
        }
        let ly = top + 10.0 + 18.0 * i as f64;
        let lx = left + pw + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(&c.label())
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::runner::Metric;

    fn rec(method: &str, ns: usize, mk: usize, seed: u64, test: Option<f64>) -> ResultRecord {
        ResultRecord {
            run_id: format!("{method}-{ns}-{mk}-{seed}"),
            benchmark: "henon".into(),
            method: method.into(),
            n_reservoir: ns,
            m_or_k: mk,
            seed,
            train_nmse: Metric(test.map(|t| t / 2.0)),
            test_nmse: Metric(test),
            train_mse: Metric(test),
            test_mse: Metric(test),
            wall_ms: 1.0,
        }
    }

    #[test]
    fn single_row_summary_is_that_row() {
        let rows = summarize(&[rec("boost", 8, 3, 1, Some(0.125))]);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].test_nmse_mean, 0.125);
        assert_eq!(rows[0].test_nmse_std, 0.0);
        assert_eq!(rows[0].train_nmse_mean, 0.0625);
        assert_eq!(rows[0].runs, 1);
    }

    #[test]
    fn identical_repetitions_have_zero_std() {
        let rows = summarize(&[rec("boost", 8, 3, 1, Some(0.3)), rec("boost", 8, 3, 1, Some(0.3))]);
        assert_eq!(rows[0].test_nmse_std, 0.0);
        assert_eq!(rows[0].runs, 2);
    }

    #[test]
    fn sample_std() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn diverged_rows_counted_not_averaged() {
        let rows = summarize(&[rec("single", 8, 0, 1, Some(0.2)), rec("single", 8, 0, 2, None)]);
        assert_eq!((rows[0].runs, rows[0].diverged), (2, 1));
        assert_eq!(rows[0].test_nmse_mean, 0.2);
    }

    #[test]
    fn curves_sorted_unique() {
        let mut rs = Vec::new();
        for ns in [12, 6, 9, 6, 7] {
            for m in [3, 4] {
                rs.push(rec("boost", ns, m, ns as u64, Some(0.01 * ns as f64)));
            }
        }
        rs.push(rec("single", 7, 0, 1, Some(0.5)));
        let curves = plot_curves(&rs);
        assert_eq!(curves.len(), 3);
        for c in &curves {
            assert!(c.points.windows(2).all(|w| w[0].0 < w[1].0), "{c:?}");
        }
        assert_eq!(
            curves[0].points.iter().map(|p| p.0).collect::<Vec<_>>(),
            vec![6, 7, 9, 12]
        );

        let dir = tempfile::tempdir().unwrap();
        let paths = write_plotdata(&curves, dir.path()).unwrap();
        assert_eq!(paths.len(), 3);
        let text = std::fs::read_to_string(&paths[0]).unwrap();
        assert_eq!(text.lines().count(), 5);

        let svg = render_svg(&curves, "henon");
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 3);
    }
}
