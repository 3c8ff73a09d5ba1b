//! Sweep data emission: yield surfaces over the angle plane and the two
//! loss-threshold curves, as CSV or JSON.

use serde::Serialize;

use vopq::analysis::{
    gamma0_curve, kmax_grid, loss_limit_curve, DetectionStrategy, GammaZeroPoint, KmaxGrid,
    LossLimitPoint,
};
use vopq::Result;

use crate::report::fmt_f64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Surface {
    /// Best-phase per-photon yield under projective detection.
    KmaxPvm,
    /// Best-phase per-photon yield under unambiguous discrimination.
    KmaxPovm,
    /// Loss ceiling and maximum fiber length over the state family.
    LossLimits,
    /// Loss threshold where the per-photon yield drops to one.
    Gamma0,
}

pub struct SweepSettings {
    pub surface: Surface,
    pub resolution: usize,
    pub cos2_theta0: f64,
    pub alpha_db_per_km: f64,
    pub range: (f64, f64),
}

fn opt_value(value: Option<f64>) -> String {
    value.map(fmt_f64).unwrap_or_else(|| "NA".into())
}

#[derive(Serialize)]
struct SweepJson {
    surface: &'static str,
    resolution: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    cos2_theta0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha_db_per_km: Option<f64>,
    columns: Vec<&'static str>,
    rows: Vec<Vec<Option<f64>>>,
}

fn grid_rows(grid: &KmaxGrid) -> Vec<Vec<Option<f64>>> {
    let mut rows = Vec::with_capacity(grid.resolution * grid.resolution);
    for i in 0..grid.resolution {
        for j in 0..grid.resolution {
            rows.push(vec![
                Some(grid.axis[i]),
                Some(grid.axis[j]),
                grid.value(i, j),
            ]);
        }
    }
    rows
}

fn grid_csv(grid: &KmaxGrid) -> String {
    let mut out = String::from("sin_theta0,sin_theta1,kmax\n");
    for i in 0..grid.resolution {
        for j in 0..grid.resolution {
            out.push_str(&fmt_f64(grid.axis[i]));
            out.push(',');
            out.push_str(&fmt_f64(grid.axis[j]));
            out.push(',');
            out.push_str(&opt_value(grid.value(i, j)));
            out.push('\n');
        }
    }
    out
}

fn loss_csv(points: &[LossLimitPoint]) -> String {
    let mut out = String::from("cos2_theta1,gamma_max,l_max_km\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{}\n",
            fmt_f64(p.cos2_theta1),
            fmt_f64(p.gamma_max),
            opt_value(p.l_max_km)
        ));
    }
    out
}

fn gamma0_csv(points: &[GammaZeroPoint]) -> String {
    let mut out = String::from("cos2_theta1,gamma0_pvm,gamma0_povm\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{}\n",
            fmt_f64(p.cos2_theta1),
            fmt_f64(p.gamma0_pvm),
            fmt_f64(p.gamma0_povm)
        ));
    }
    out
}

/// Runs the sweep and renders it in the requested format.
pub fn render(settings: &SweepSettings, json: bool) -> Result<String> {
    let output = match settings.surface {
        Surface::KmaxPvm | Surface::KmaxPovm => {
            let strategy = if settings.surface == Surface::KmaxPvm {
                DetectionStrategy::Pvm
            } else {
                DetectionStrategy::Povm
            };
            let grid = kmax_grid(settings.resolution, strategy)?;
            if json {
                to_json(SweepJson {
                    surface: surface_name(settings.surface),
                    resolution: settings.resolution,
                    cos2_theta0: None,
                    alpha_db_per_km: None,
                    columns: vec!["sin_theta0", "sin_theta1", "kmax"],
                    rows: grid_rows(&grid),
                })
            } else {
                grid_csv(&grid)
            }
        }
        Surface::LossLimits => {
            let points = loss_limit_curve(
                settings.cos2_theta0,
                settings.alpha_db_per_km,
                settings.resolution,
                settings.range,
                DetectionStrategy::Pvm,
            )?;
            if json {
                to_json(SweepJson {
                    surface: surface_name(settings.surface),
                    resolution: settings.resolution,
                    cos2_theta0: Some(settings.cos2_theta0),
                    alpha_db_per_km: Some(settings.alpha_db_per_km),
                    columns: vec!["cos2_theta1", "gamma_max", "l_max_km"],
                    rows: points
                        .iter()
                        .map(|p| vec![Some(p.cos2_theta1), Some(p.gamma_max), p.l_max_km])
                        .collect(),
                })
            } else {
                loss_csv(&points)
            }
        }
        Surface::Gamma0 => {
            let points =
                gamma0_curve(settings.cos2_theta0, settings.resolution, settings.range)?;
            if json {
                to_json(SweepJson {
                    surface: surface_name(settings.surface),
                    resolution: settings.resolution,
                    cos2_theta0: Some(settings.cos2_theta0),
                    alpha_db_per_km: None,
                    columns: vec!["cos2_theta1", "gamma0_pvm", "gamma0_povm"],
                    rows: points
                        .iter()
                        .map(|p| {
                            vec![Some(p.cos2_theta1), Some(p.gamma0_pvm), Some(p.gamma0_povm)]
                        })
                        .collect(),
                })
            } else {
                gamma0_csv(&points)
            }
        }
    };
    Ok(output)
}

fn surface_name(surface: Surface) -> &'static str {
    match surface {
        Surface::KmaxPvm => "kmax-pvm",
        Surface::KmaxPovm => "kmax-povm",
        Surface::LossLimits => "loss-limits",
        Surface::Gamma0 => "gamma0",
    }
}

fn to_json(value: SweepJson) -> String {
    let mut out = serde_json::to_string(&value).expect("sweep serializes");
    out.push('\n');
    out
}
