//! SVG figures from the sweep aggregate and the fade trace.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use plotters::prelude::*;

/// (file stem, aggregate column, y-axis label)
pub const SWEEP_FIGURES: [(&str, &str, &str); 8] = [
    ("idle", "idle_rate", "idle slot rate"),
    ("pm", "mean_V", "mean Lyapunov V"),
    ("effort", "mean_efforts", "efforts until success"),
    ("delay", "mean_delay", "access delay (slots)"),
    ("power", "mean_power", "power per success (mW)"),
    ("dropping", "drop_rate", "dropping rate"),
    ("dmr", "dmr", "miss-detection ratio"),
    ("cr", "cr", "collision ratio"),
];
pub const FADE_FIGURE: &str = "temp";

const SIZE: (u32, u32) = (760, 480);
const PALETTE: [RGBColor; 7] = [
    RGBColor(31, 119, 180),
    RGBColor(255, 127, 14),
    RGBColor(44, 160, 44),
    RGBColor(214, 39, 40),
    RGBColor(148, 103, 189),
    RGBColor(140, 86, 75),
    RGBColor(227, 119, 194),
];

/// Header plus rows of a comma-separated file without quoting.
#[derive(Debug, Clone)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<String> = lines
            .next()
            .ok_or_else(|| anyhow!("empty table"))?
            .split(',')
            .map(str::to_string)
            .collect();
        let rows: Vec<Vec<String>> = lines
            .map(|l| l.split(',').map(str::to_string).collect())
            .collect();
        if let Some(i) = rows.iter().position(|r| r.len() != header.len()) {
            bail!(
                "row {} has {} fields, header has {}",
                i + 2,
                rows[i].len(),
                header.len()
            );
        }
        Ok(Self { header, rows })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("malformed {}", path.display()))
    }

    pub fn column(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| anyhow!("missing column `{name}`"))
    }

    /// Numeric column; empty fields become `None`.
    pub fn floats(&self, name: &str) -> Result<Vec<Option<f64>>> {
        let c = self.column(name)?;
        self.rows
            .iter()
            .map(|r| match r[c].as_str() {
                "" => Ok(None),
                s => s
                    .parse()
                    .map(Some)
                    .with_context(|| format!("bad number {s:?} in `{name}`")),
            })
            .collect()
    }
}

type Series = (String, Vec<(f64, f64)>);

/// One curve per (protocol, A); the fixed-back-off protocol ignores A, so it
/// keeps a single curve.
pub fn sweep_series(table: &Table, metric: &str) -> Result<Vec<Series>> {
    let (pc, nc, ac) = (
        table.column("protocol")?,
        table.column("N")?,
        table.column("A")?,
    );
    let mc = table.column(metric)?;
    let mut order: Vec<String> = Vec::new();
    let mut curves: HashMap<String, Vec<(f64, f64)>> = HashMap::new();
    let mut fixed_a: Option<&str> = None;
    for r in &table.rows {
        let label = if r[pc] == "FPFB" {
            if *fixed_a.get_or_insert(r[ac].as_str()) != r[ac] {
                continue;
            }
            r[pc].clone()
        } else {
            format!("{} A={}", r[pc], r[ac])
        };
        let x: f64 = r[nc]
            .parse()
            .with_context(|| format!("bad N {:?}", r[nc]))?;
        let y: f64 = r[mc]
            .parse()
            .with_context(|| format!("bad {metric} {:?}", r[mc]))?;
        if !curves.contains_key(&label) {
            order.push(label.clone());
        }
        if y.is_finite() {
            curves.entry(label).or_default().push((x, y));
        } else {
            curves.entry(label).or_default();
        }
    }
    Ok(order
        .into_iter()
        .map(|l| {
            let pts = curves.remove(&l).unwrap_or_default();
            (l, pts)
        })
        .collect())
}

fn bounds(series: &[Series]) -> ((f64, f64), (f64, f64)) {
    let pts = series.iter().flat_map(|s| s.1.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        return ((0.0, 1.0), (0.0, 1.0));
    }
    let pad = |lo: f64, hi: f64| {
        let span = if hi > lo { hi - lo } else { lo.abs().max(1.0) };
        (lo - 0.05 * span, hi + 0.05 * span)
    };
    (pad(x0, x1), pad(y0, y1))
}

fn draw_lines<DB: DrawingBackend>(
    area: &DrawingArea<DB, plotters::coord::Shift>,
    title: &str,
    x_desc: &str,
    y_desc: &str,
    series: &[Series],
    markers: bool,
) -> Result<()>
where
    DB::ErrorType: 'static,
{
    let ((x0, x1), (y0, y1)) = bounds(series);
    let mut chart = ChartBuilder::on(area)
        .caption(title, ("sans-serif", 20))
        .margin(12)
        .x_label_area_size(40)
        .y_label_area_size(64)
        .build_cartesian_2d(x0..x1, y0..y1)?;
    chart
        .configure_mesh()
        .x_desc(x_desc)
        .y_desc(y_desc)
        .draw()?;
    for (i, (label, pts)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        chart
            .draw_series(LineSeries::new(pts.iter().copied(), color.stroke_width(2)))?
            .label(label.as_str())
            .legend(move |(x, y)| {
                PathElement::new(vec![(x, y), (x + 18, y)], color.stroke_width(2))
            });
        if markers {
            chart.draw_series(pts.iter().map(|&p| Circle::new(p, 3, color.filled())))?;
        }
    }
    chart
        .configure_series_labels()
        .position(SeriesLabelPosition::UpperLeft)
        .background_style(WHITE.mix(0.85))
        .border_style(BLACK)
        .draw()?;
    Ok(())
}

/// Writes the eight sweep figures into `dir`.
pub fn plot_sweep(aggregate: &Table, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for (stem, metric, label) in SWEEP_FIGURES {
        let series = sweep_series(aggregate, metric)?;
        let path = dir.join(format!("{stem}.svg"));
        {
            let root = SVGBackend::new(&path, SIZE).into_drawing_area();
            root.fill(&WHITE)?;
            draw_lines(&root, label, "number of users N", label, &series, true)?;
            root.present()?;
        }
        written.push(path);
    }
    Ok(written)
}

/// Broadcast power and windowed miss-detection rate against the slot index.
pub fn plot_fade(trace: &Table, dir: &Path) -> Result<PathBuf> {
    let slots = trace.floats("slot")?;
    let power = trace.floats("p")?;
    let dmr = trace.floats("R_o")?;
    let pick = |ys: &[Option<f64>]| -> Vec<(f64, f64)> {
        slots
            .iter()
            .zip(ys)
            .filter_map(|(x, y)| Some(((*x)?, (*y)?)))
            .collect()
    };
    let path = dir.join(format!("{FADE_FIGURE}.svg"));
    {
        let root = SVGBackend::new(&path, (SIZE.0, SIZE.1 * 2)).into_drawing_area();
        root.fill(&WHITE)?;
        let (top, bottom) = root.split_vertically(SIZE.1);
        draw_lines(
            &top,
            "broadcast power level",
            "slot",
            "p* (mW)",
            &[("p*".into(), pick(&power))],
            false,
        )?;
        draw_lines(
            &bottom,
            "windowed miss-detection rate",
            "slot",
            "R_o",
            &[("R_o".into(), pick(&dmr))],
            false,
        )?;
        root.present()?;
    }
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    const AGG: &str = "protocol,N,A,runs,mean_V\n\
        FPFB,1,0.05,1,1.5\nFPFB,1,0.5,1,1.5\nFPFB,2,0.05,1,2.5\n\
        DPDB,1,0.05,1,1.2\nDPDB,2,0.05,1,NaN\nDPDB,1,0.5,1,1.1\n";

    #[test]
    fn one_curve_per_protocol_and_bound() {
        let t = Table::parse(AGG).unwrap();
        let s = sweep_series(&t, "mean_V").unwrap();
        let labels: Vec<&str> = s.iter().map(|x| x.0.as_str()).collect();
        assert_eq!(labels, ["FPFB", "DPDB A=0.05", "DPDB A=0.5"]);
        assert_eq!(s[0].1, vec![(1.0, 1.5), (2.0, 2.5)]);
        assert_eq!(s[1].1, vec![(1.0, 1.2)]);
    }

    #[test]
    fn table_errors() {
        assert!(Table::parse("").is_err());
        assert!(Table::parse("a,b\n1\n").is_err());
        let t = Table::parse("a,b\n1,\n").unwrap();
        assert_eq!(t.floats("b").unwrap(), vec![None]);
        assert!(t.column("c").is_err());
    }

    #[test]
    fn svg_is_standalone() {
        let dir = tempfile::tempdir().unwrap();
        let t = Table::parse(AGG).unwrap();
        let sweep = SWEEP_FIGURES.iter().map(|f| f.1).filter(|&m| m != "mean_V");
        assert!(sweep.count() > 0);
        let mut full = String::from("protocol,N,A,runs");
        for (_, m, _) in SWEEP_FIGURES {
            full.push(',');
            full.push_str(m);
        }
        full.push('\n');
        for r in &t.rows {
            full.push_str(&r[..4].join(","));
            for _ in SWEEP_FIGURES {
                full.push(',');
                full.push_str(&r[4]);
            }
            full.push('\n');
        }
        let files = plot_sweep(&Table::parse(&full).unwrap(), dir.path()).unwrap();
        assert_eq!(files.len(), 8);
        for f in files {
            let svg = fs::read_to_string(f).unwrap();
            assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
            assert!(svg.trim_end().ends_with("</svg>"));
            assert!(!svg.contains("href"));
        }
    }
}
