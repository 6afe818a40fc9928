use std::path::Path;

use anyhow::anyhow;
use coexist::engine::Policy;
use coexist::metrics::CollisionSummaryRow;
use plotters::prelude::*;

const SIZE: (u32, u32) = (800, 500);

fn colour(i: usize) -> RGBColor {
    [RED, BLUE, GREEN, MAGENTA][i % 4]
}

fn err<E: std::fmt::Display>(e: E) -> anyhow::Error {
    anyhow!("{e}")
}

/// Mean collisions against utilization, one line per policy.
pub fn collisions(path: &Path, rows: &[CollisionSummaryRow]) -> anyhow::Result<()> {
    let root = SVGBackend::new(path, SIZE).into_drawing_area();
    root.fill(&WHITE).map_err(err)?;
    let ymax = rows.iter().map(|r| r.mean + r.stderr).fold(1.0, f64::max) * 1.05;
    let mut chart = ChartBuilder::on(&root)
        .caption("Collisions per run", ("sans-serif", 20))
        .margin(10)
        .x_label_area_size(40)
        .y_label_area_size(60)
        .build_cartesian_2d(0.0..1.0, 0.0..ymax)
        .map_err(err)?;
    chart
        .configure_mesh()
        .x_desc("utilization")
        .y_desc("mean collisions")
        .draw()
        .map_err(err)?;
    for (i, policy) in Policy::ALL.iter().enumerate() {
        let pts: Vec<(f64, f64)> = rows.iter().filter(|r| r.policy == *policy).map(|r| (r.utilization, r.mean)).collect();
        if pts.is_empty() {
            continue;
        }
        let c = colour(i);
        chart
            .draw_series(LineSeries::new(pts.clone(), c.stroke_width(2)))
            .map_err(err)?
            .label(policy.as_str())
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], c));
        chart.draw_series(pts.into_iter().map(|p| Circle::new(p, 3, c.filled()))).map_err(err)?;
    }
    chart
        .configure_series_labels()
        .background_style(WHITE)
        .border_style(BLACK)
        .draw()
        .map_err(err)?;
    root.present().map_err(err)
}

/// Empirical CDFs drawn as step curves.
pub fn cdf(path: &Path, title: &str, curves: &[(&str, Vec<(f64, f64)>)]) -> anyhow::Result<()> {
    let root = SVGBackend::new(path, SIZE).into_drawing_area();
    root.fill(&WHITE).map_err(err)?;
    let xmax = curves
        .iter()
        .flat_map(|(_, c)| c.iter().map(|p| p.0))
        .fold(0.0, f64::max)
        .max(1e-9)
        * 1.02;
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 20))
        .margin(10)
        .x_label_area_size(40)
        .y_label_area_size(50)
        .build_cartesian_2d(0.0..xmax, 0.0..1.0)
        .map_err(err)?;
    chart
        .configure_mesh()
        .x_desc("sum rate [bit/s/Hz]")
        .y_desc("CDF")
        .draw()
        .map_err(err)?;
    for (i, (name, pts)) in curves.iter().enumerate() {
        let c = colour(i);
        let mut steps = Vec::with_capacity(pts.len() * 2);
        let mut last = 0.0;
        for &(x, f) in pts {
            steps.push((x, last));
            steps.push((x, f));
            last = f;
        }
        chart
            .draw_series(LineSeries::new(steps, c.stroke_width(2)))
            .map_err(err)?
            .label(*name)
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], c));
    }
    chart
        .configure_series_labels()
        .position(SeriesLabelPosition::LowerRight)
        .background_style(WHITE)
        .border_style(BLACK)
        .draw()
        .map_err(err)?;
    root.present().map_err(err)
}
