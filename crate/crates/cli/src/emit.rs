//! CSV and SVG emission.
//!
//! Both formats are deterministic text: identical rows produce identical
//! bytes. CSV cells carry 17 significant digits, enough to reproduce every
//! f64 bit-exactly on parse-back; absent values are empty cells. The SVG
//! renders each bound column as one polyline over the grid (negative lower
//! bounds are clamped to zero in the plot only; the CSV always carries raw
//! values).

use std::io::Write;
use std::path::Path;

use crate::fit::{FitModel, FitResult, XVar};
use crate::sweep::{SweepRow, VALUE_COLUMNS};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitFormat {
    Csv,
    Svg,
}

/// A fitted curve to overlay on the SVG.
#[derive(Debug, Clone)]
pub struct FitOverlay {
    pub result: FitResult,
    pub model: FitModel,
    pub column: String,
}

/// 17 significant digits: round-trips f64 exactly.
fn fmt_value(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_header() -> String {
    let mut header = String::from("t,m,seed");
    for name in VALUE_COLUMNS {
        header.push(',');
        header.push_str(name);
    }
    header
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = csv_header();
    out.push('\n');
    for row in rows {
        out.push_str(&format!("{},{},{}", row.t, row.m, row.seed));
        for name in VALUE_COLUMNS {
            out.push(',');
            if let Some(v) = row.get(name).expect("known column") {
                out.push_str(&fmt_value(v));
            }
        }
        out.push('\n');
    }
    out
}

/// Parses CSV produced by [`to_csv`], recovering every value bit-exactly.
pub fn parse_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Csv("empty input".to_string()))?;
    if header != csv_header() {
        return Err(Error::Csv(format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 3 + VALUE_COLUMNS.len() {
            return Err(Error::Csv(format!(
                "line {}: expected {} cells, got {}",
                lineno + 2,
                3 + VALUE_COLUMNS.len(),
                cells.len()
            )));
        }
        let parse_u64 = |cell: &str, what: &str| -> Result<u64> {
            cell.parse()
                .map_err(|_| Error::Csv(format!("line {}: bad {what} {cell:?}", lineno + 2)))
        };
        let mut row = SweepRow {
            t: parse_u64(cells[0], "t")?,
            m: parse_u64(cells[1], "m")?,
            seed: parse_u64(cells[2], "seed")?,
            ..SweepRow::default()
        };
        for (name, cell) in VALUE_COLUMNS.iter().zip(&cells[3..]) {
            let value =
                if cell.is_empty() {
                    None
                } else {
                    Some(cell.parse::<f64>().map_err(|_| {
                        Error::Csv(format!("line {}: bad value {cell:?}", lineno + 2))
                    })?)
                };
            row.set(name, value)?;
        }
        rows.push(row);
    }
    Ok(rows)
}

const SVG_WIDTH: f64 = 860.0;
const SVG_HEIGHT: f64 = 560.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 200.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 50.0;

const PALETTE: [&str; 9] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22",
];

/// Bound columns drawn by the SVG output, in palette order.
const PLOT_COLUMNS: [&str; 9] = [
    "UB_time",
    "UB_time_safe",
    "UB_molecules",
    "UB_molecules_safe",
    "UB_joint_entropy",
    "UB_joint_linear",
    "LB_schemeA",
    "LB_schemeB",
    "LB_schemeC",
];

fn fmt_coord(v: f64) -> String {
    format!("{v:.2}")
}

/// Renders every present bound column as a polyline over the grid's x
/// variable, with an optional fitted curve.
pub fn to_svg(rows: &[SweepRow], x: XVar, fit: Option<&FitOverlay>) -> String {
    let xs: Vec<f64> = rows.iter().map(|r| x.of(r)).collect();
    let x_min = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let x_max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let x_span = if x_max > x_min { x_max - x_min } else { 1.0 };

    // Series with plot-side clamping of negative lower bounds.
    let mut series: Vec<(&str, Vec<(f64, f64)>)> = Vec::new();
    for name in PLOT_COLUMNS {
        let points: Vec<(f64, f64)> = rows
            .iter()
            .filter_map(|row| {
                row.get(name)
                    .expect("known column")
                    .map(|v| (x.of(row), v.max(0.0)))
            })
            .collect();
        if !points.is_empty() {
            series.push((name, points));
        }
    }
    let mut y_max = series
        .iter()
        .flat_map(|(_, pts)| pts.iter().map(|&(_, y)| y))
        .fold(0.0f64, f64::max);
    if y_max <= 0.0 {
        y_max = 1.0;
    }

    let plot_w = SVG_WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = SVG_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |v: f64| MARGIN_LEFT + (v - x_min) / x_span * plot_w;
    let sy = |v: f64| MARGIN_TOP + (1.0 - v / y_max) * plot_h;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_WIDTH}\" height=\"{SVG_HEIGHT}\" \
         viewBox=\"0 0 {SVG_WIDTH} {SVG_HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    // Axes.
    let x0 = MARGIN_LEFT;
    let x1 = MARGIN_LEFT + plot_w;
    let y0 = MARGIN_TOP + plot_h;
    let y1 = MARGIN_TOP;
    svg.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        fmt_coord(x0),
        fmt_coord(y0),
        fmt_coord(x1),
        fmt_coord(y0)
    ));
    svg.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        fmt_coord(x0),
        fmt_coord(y0),
        fmt_coord(x0),
        fmt_coord(y1)
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
        fmt_coord((x0 + x1) / 2.0),
        fmt_coord(SVG_HEIGHT - 12.0),
        x.label()
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\" \
         transform=\"rotate(-90 16 {})\">bits</text>\n",
        fmt_coord((y0 + y1) / 2.0),
        fmt_coord((y0 + y1) / 2.0)
    ));
    // Extremal tick labels.
    for (v, xpix) in [(x_min, x0), (x_max, x1)] {
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
            fmt_coord(xpix),
            fmt_coord(y0 + 16.0),
            v
        ));
    }
    for (v, ypix) in [(0.0, y0), (y_max, y1)] {
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{:.3}</text>\n",
            fmt_coord(x0 - 6.0),
            fmt_coord(ypix + 4.0),
            v
        ));
    }

    for (idx, (name, points)) in series.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let coords: Vec<String> = points
            .iter()
            .map(|&(px, py)| format!("{},{}", fmt_coord(sx(px)), fmt_coord(sy(py))))
            .collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            coords.join(" ")
        ));
        let ly = MARGIN_TOP + 14.0 * idx as f64 + 10.0;
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{color}\" stroke-width=\"3\"/>\n",
            fmt_coord(x1 + 10.0),
            fmt_coord(ly - 4.0),
            fmt_coord(x1 + 30.0),
            fmt_coord(ly - 4.0)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\">{name}</text>\n",
            fmt_coord(x1 + 36.0),
            fmt_coord(ly)
        ));
    }

    if let Some(overlay) = fit {
        let samples = 64usize;
        let coords: Vec<String> = (0..=samples)
            .map(|i| {
                let v = x_min + x_span * i as f64 / samples as f64;
                let g = match overlay.model {
                    FitModel::Log2 => v.log2(),
                    FitModel::Linear => v,
                };
                let y = (overlay.result.a * g + overlay.result.b).clamp(0.0, y_max);
                format!("{},{}", fmt_coord(sx(v)), fmt_coord(sy(y)))
            })
            .collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1\" \
             stroke-dasharray=\"5,4\" points=\"{}\"/>\n",
            coords.join(" ")
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\">fit: {}</text>\n",
            fmt_coord(x1 + 36.0),
            fmt_coord(MARGIN_TOP + 14.0 * series.len() as f64 + 10.0),
            overlay.column
        ));
    }

    svg.push_str("</svg>\n");
    svg
}

/// Renders rows in the chosen format.
pub fn render(rows: &[SweepRow], x: XVar, fit: Option<&FitOverlay>, format: EmitFormat) -> String {
    match format {
        EmitFormat::Csv => to_csv(rows),
        EmitFormat::Svg => to_svg(rows, x, fit),
    }
}

/// Renders and writes to a file.
pub fn emit(
    rows: &[SweepRow],
    x: XVar,
    fit: Option<&FitOverlay>,
    format: EmitFormat,
    path: &Path,
) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Config("nothing to emit: no rows".to_string()));
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(render(rows, x, fit, format).as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_rows() -> Vec<SweepRow> {
        let spec = crate::config::SweepSpec {
            mode: crate::config::SweepMode::FixedMSweepT,
            grid: vec![(16, 1), (64, 1), (256, 1)],
            dist: crate::config::DistSpec::Geometric {
                rho: 0.5,
                n_max: 32,
            },
            scheme: crate::config::SchemeParams::default(),
            seed: 5,
            trials: 0,
            exact: false,
            tol: 1e-9,
        };
        crate::sweep::run_sweep(&spec).unwrap()
    }

    #[test]
    fn csv_has_header_plus_row_lines() {
        let rows = sample_rows();
        let csv = to_csv(&rows);
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.starts_with("t,m,seed,UB_time,"));
    }

    #[test]
    fn csv_round_trips_bit_exactly() {
        let rows = sample_rows();
        let parsed = parse_csv(&to_csv(&rows)).unwrap();
        assert_eq!(rows, parsed);
    }

    #[test]
    fn csv_rejects_malformed_input() {
        assert!(parse_csv("").is_err());
        assert!(parse_csv("a,b,c\n").is_err());
        let rows = sample_rows();
        let mut csv = to_csv(&rows);
        csv.push_str("1,2\n");
        assert!(parse_csv(&csv).is_err());
    }

    #[test]
    fn svg_draws_one_polyline_per_present_column() {
        let mut row = SweepRow {
            t: 4,
            m: 1,
            ..SweepRow::default()
        };
        row.lb_scheme_a = Some(1.0);
        let mut row2 = row.clone();
        row2.t = 16;
        row2.lb_scheme_a = Some(2.0);
        // Required columns are all zero: they clamp to a flat line at 0 and
        // still draw; so count polylines for exactly the present columns.
        let svg = to_svg(&[row, row2], XVar::T, None);
        let polylines = svg.matches("<polyline").count();
        assert_eq!(polylines, 7); // 6 required upper bounds + LB_schemeA
        assert!(svg.contains("LB_schemeA"));
        assert!(svg.contains(">t<"));
    }

    #[test]
    fn svg_is_deterministic_and_clamps_negatives() {
        let rows = sample_rows();
        let a = to_svg(&rows, XVar::T, None);
        let b = to_svg(&rows, XVar::T, None);
        assert_eq!(a, b);

        let mut row = SweepRow {
            t: 4,
            m: 1,
            ..SweepRow::default()
        };
        row.lb_scheme_a = Some(-2.0);
        let mut row2 = row.clone();
        row2.t = 9;
        let svg = to_svg(&[row.clone(), row2], XVar::T, None);
        // The clamped series sits on the x axis, no negative y coordinate.
        assert!(!svg.contains(",-"));
        // CSV keeps the raw negative value.
        let csv = to_csv(&[row]);
        assert!(csv.contains("-2.0000000000000000e0"));
    }

    #[test]
    fn fit_overlay_adds_a_dashed_line() {
        let rows = sample_rows();
        let fit = crate::fit::fit_rows(&rows, "LB_schemeA", XVar::T, FitModel::Log2).unwrap();
        let overlay = FitOverlay {
            result: fit,
            model: FitModel::Log2,
            column: "LB_schemeA".to_string(),
        };
        let with = to_svg(&rows, XVar::T, Some(&overlay));
        let without = to_svg(&rows, XVar::T, None);
        assert_eq!(
            with.matches("<polyline").count(),
            without.matches("<polyline").count() + 1
        );
        assert!(with.contains("stroke-dasharray"));
    }
}
