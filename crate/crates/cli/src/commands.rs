//! Subcommand implementations. Each returns the process exit code.

use crate::config::{build_operator, build_vector, ConfigError, ExperimentConfig, SUITES};
use crate::output::{
    boundary_csv, contour_svg, grid_csv, matrix_csv, pretty, region_json, trace_csv, write_text,
};
use crate::suites::run_suite;
use anyhow::Result;
use subspec_core::spectral::{
    generator_spectrum_region, local_radius_trace, map_region_resolvent, pseudospectrum_grid,
    semigroup_spectrum_region, GridBox,
};
use subspec_core::subordination::subordinate_matrix;
use subspec_core::{Complex64, SpectralRegion};

pub const BOUNDARY_SAMPLES: usize = 256;

fn config_err(e: subspec_core::Error) -> anyhow::Error {
    ConfigError(e.to_string()).into()
}

/// Spectral region of the generator, or of `C_{φ_t}` when `t` is given.
pub fn region(config: &ExperimentConfig) -> Result<i32> {
    let flow = config.flow()?;
    let p = config.p_or_2();
    let region = match config.t {
        Some(t) => semigroup_spectrum_region(&flow, p, t),
        None => generator_spectrum_region(&flow, p),
    }
    .map_err(config_err)?;
    let value = region_json(&region);
    let out = config.out_dir();
    write_text(&out.join("region.json"), &pretty(&value))?;
    write_text(&out.join("region_boundary.csv"), &boundary_csv(&region.boundary_sample(BOUNDARY_SAMPLES)))?;
    print!("{}", pretty(&value));
    Ok(0)
}

/// Closed-form spectrum of the operator, used as the SVG overlay.
fn overlay(config: &ExperimentConfig) -> Result<Option<SpectralRegion>> {
    let one = Complex64::new(1.0, 0.0);
    Ok(match config.operator.as_deref().unwrap_or("cesaro") {
        "cesaro" => {
            let sigma = generator_spectrum_region(&subspec_core::Semiflow::affine(), 2.0)?;
            Some(map_region_resolvent(&sigma, one)?)
        }
        "identity" => Some(SpectralRegion::Point(one)),
        "composition" => semigroup_spectrum_region(&config.flow()?, 2.0, config.t.unwrap_or(1.0)).ok(),
        _ => None,
    })
}

pub fn pseudospectrum(config: &ExperimentConfig) -> Result<i32> {
    let a = build_operator(config, 100)?;
    let [x0, x1, y0, y1] = config.bounds.unwrap_or([-0.5, 2.5, -1.5, 1.5]);
    let [nx, ny] = config.res.unwrap_or([200, 200]);
    let grid = pseudospectrum_grid(&a, GridBox { x0, x1, y0, y1 }, (nx, ny)).map_err(config_err)?;
    let out = config.out_dir();
    let csv = out.join("grid.csv");
    let svg = out.join("contour.svg");
    write_text(&csv, &grid_csv(&grid))?;
    write_text(&svg, &contour_svg(&grid, overlay(config)?.as_ref()))?;
    println!("{} ({} rows)", csv.display(), grid.values.len());
    println!("{}", svg.display());
    Ok(0)
}

/// Matrix of `∫ C_{φ_t} dν(t)`. Inadmissible measures exit 1 with the bound.
pub fn subordinate(config: &ExperimentConfig) -> Result<i32> {
    let flow = config.flow()?;
    let nu = config.measure()?;
    let order = config.order_or(8);
    let h = match subordinate_matrix(&flow, &nu, order, None) {
        Ok(h) => h,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(1);
        }
    };
    let path = config.out_dir().join("matrix.csv");
    write_text(&path, &matrix_csv(&h))?;
    println!("{} ({} entries)", path.display(), h.dim() * h.dim());
    Ok(0)
}

pub fn localradius(config: &ExperimentConfig) -> Result<i32> {
    let a = build_operator(config, 1024)?;
    let x = build_vector(config.x.as_deref().unwrap_or("e0"), a.order())?;
    let n_max = config.n_max.unwrap_or(30);
    if n_max == 0 {
        return Err(ConfigError("n_max must be positive".into()).into());
    }
    let trace = local_radius_trace(&a, &x, n_max)?;
    let path = config.out_dir().join("trace.csv");
    write_text(&path, &trace_csv(&trace.values))?;
    println!("{} ({} rows)", path.display(), trace.values.len());
    Ok(0)
}

/// Runs a suite, writes `report-<suite>.json` and echoes it to stdout.
pub fn verify(config: &ExperimentConfig, seed: u64) -> Result<i32> {
    let name = config
        .suite
        .clone()
        .ok_or_else(|| ConfigError(format!("no suite given; registered: {}", SUITES.join(", "))))?;
    let mut report = run_suite(&name, config, seed)?;
    let path = config.out_dir().join(format!("report-{name}.json"));
    report.artifacts.push(path.clone());
    let body = pretty(&report.to_json());
    write_text(&path, &body)?;
    print!("{body}");
    Ok(if report.passed() { 0 } else { 1 })
}
