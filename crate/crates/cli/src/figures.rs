//! End-to-end reproductions of the nine standard figures. Each writes
//! `figN.svg` and the underlying `figN.csv`.

use std::path::{Path, PathBuf};

use dmaxwell::analysis::Series;
use dmaxwell::io::csv::{export_points_csv, export_series_csv};
use dmaxwell::io::plot::{render_line_plot, Curve, PlotMode, PlotSpec};
use dmaxwell::maxwell::{self, CouplingFactor, Field, FieldState, StepBackend, SQRT_ALPHA};
use dmaxwell::{Probe, PrunePolicy, Site};

use crate::error::CliError;

/// Iterations shown for the first wave.
pub const FIRST_WAVE_STEPS: u64 = 40;
/// Iterations shown for the long-term development.
pub const LONG_TERM_STEPS: u64 = 160;
/// Iterations before the spatial slice is taken.
pub const SLICE_STEPS: u64 = 150;

pub struct Figure {
    pub p: f64,
    pub steps: u64,
    pub title: &'static str,
}

pub fn figure(number: u8) -> Option<Figure> {
    let (p, steps, title) = match number {
        1 => (1.0 / 16.0, FIRST_WAVE_STEPS, "First wave, p = 1/16"),
        2 => (SQRT_ALPHA, FIRST_WAVE_STEPS, "First wave, p = sqrt(alpha) = 0.085424542921"),
        3 => (1.0 / 8.0, FIRST_WAVE_STEPS, "First wave, p = 1/8"),
        4 => (1.0 / 16.0, LONG_TERM_STEPS, "Long term development, p = 1/16"),
        5 => (SQRT_ALPHA, LONG_TERM_STEPS, "Long term development, p = sqrt(alpha)"),
        6 => (1.0 / 8.0, LONG_TERM_STEPS, "Long term development, p = 1/8"),
        7 => (SQRT_ALPHA, LONG_TERM_STEPS, "Ex(t,0,0,0) and Bz(t,0,1,0), p = sqrt(alpha)"),
        8 => (SQRT_ALPHA, LONG_TERM_STEPS, "Ex(t,0,0,0) against Bz(t,0,1,0), p = sqrt(alpha)"),
        9 => (SQRT_ALPHA, SLICE_STEPS, "Ex(150,x,0,0) after 150 iterations, p = sqrt(alpha)"),
        _ => return None,
    };
    Some(Figure {
        p,
        steps,
        title,
    })
}

fn origin_ex() -> Probe {
    Probe::new(Field::Ex.name(), Site::ORIGIN)
}

fn bz_probe() -> Probe {
    Probe::new(Field::Bz.name(), Site::new(0, 1, 0))
}

/// Runs figure `number` and returns the files written.
pub fn reproduce(number: u8, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let fig = figure(number)
        .ok_or_else(|| CliError::validation(format!("no figure {number}; expected 1 to 9")))?;
    std::fs::create_dir_all(out)?;
    let svg = out.join(format!("fig{number}.svg"));
    let csv = out.join(format!("fig{number}.csv"));
    let p = CouplingFactor::new(fig.p)?;
    let mut state = FieldState::canonical();
    let probes = [origin_ex(), bz_probe()];
    let record = maxwell::run(
        &mut state,
        p,
        StepBackend::Direct,
        fig.steps,
        &probes,
        PrunePolicy::disabled(),
    )?;
    let series = |i: usize| {
        Series::new(
            record.probes[i].probe.to_string(),
            record.probes[i].values.iter().map(|q| q.re).collect(),
        )
    };
    let ex = series(0);
    let bz = series(1);

    match number {
        1..=6 => {
            export_series_csv(std::slice::from_ref(&ex), &csv)?;
            let spec = PlotSpec::new(fig.title, "t", "Ex(t,0,0,0)");
            render_line_plot(&[Curve::from_series(&ex)], &svg, &spec)?;
        }
        7 => {
            export_series_csv(&[ex.clone(), bz.clone()], &csv)?;
            let spec = PlotSpec::new(fig.title, "t", "Ex(t,0,0,0), Bz(t,0,1,0)");
            render_line_plot(&[Curve::from_series(&ex), Curve::from_series(&bz)], &svg, &spec)?;
        }
        8 => {
            export_series_csv(&[ex.clone(), bz.clone()], &csv)?;
            let spec = PlotSpec::new(fig.title, "Bz(t,0,1,0)", "Ex(t,0,0,0)")
                .with_size(520, 520)
                .with_mode(PlotMode::Line);
            render_line_plot(&[Curve::xy(&bz, &ex)], &svg, &spec)?;
        }
        9 => {
            let r = fig.steps as i32;
            let lat = state.field(Field::Ex);
            let points: Vec<(f64, f64)> = (-r..=r)
                .map(|x| (x as f64, lat.get(Site::new(x, 0, 0)).re))
                .collect();
            export_points_csv(("x", "Ex(150,x,0,0)"), &points, &csv)?;
            let curve = Curve {
                label: "Ex(150,x,0,0)".into(),
                points,
            };
            let spec = PlotSpec::new(fig.title, "x", "Ex(150,x,0,0)");
            render_line_plot(&[curve], &svg, &spec)?;
        }
        _ => unreachable!(),
    }
    Ok(vec![svg, csv])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_figure_has_parameters() {
        for n in 1..=9 {
            let f = figure(n).unwrap();
            assert!(f.p > 0.0 && f.steps > 0);
        }
        assert!(figure(0).is_none());
        assert!(figure(10).is_none());
        assert_eq!(figure(2).unwrap().p, 0.085424542921);
        assert_eq!(figure(9).unwrap().steps, 150);
    }
}
