//! Command execution: each run consumes a resolved [`RunConfig`], computes
//! through `soi-core`, and emits the config plus CSV/JSON artifacts named by
//! the config hash.

use std::path::PathBuf;

use soi_core::asymptotics::{asymptotics_report, TailWeighting};
use soi_core::coarse::{bin_cells, build_grid, observable_value, sample_simplex, Observable};
use soi_core::fidelity::{fidelity_closed, fidelity_soi_maximize, RotatedState};
use soi_core::spectrum::{normalized_linear, normalized_von_neumann, Spectrum};
use soi_core::stream::derive_seed;
use soi_core::unitary::UnitaryFamily;
use soi_core::volume::{
    closed_form_volume, monte_carlo_volume, normalized_volume, quadrature_volume, VolumeGroup,
    VolumeMethod, VolumeResult,
};

use crate::config::RunConfig;
use crate::emit::{write_artifact, write_config, Csv, CsvField, JsonObject};
use crate::error::CliError;

/// Execute one run; returns the emitted file paths (config last).
pub fn execute(config: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let mut paths = match config {
        RunConfig::Volume {
            group,
            spectrum,
            method,
            nodes,
            samples,
            seed,
            ..
        } => run_volume(config, group, spectrum, method, *nodes, *samples, *seed)?,
        RunConfig::Curves { group, grid, .. } => run_curves(config, group, *grid)?,
        RunConfig::CoarseGrain {
            ell,
            k,
            observables,
            weyl_filter,
            ..
        } => run_coarse_grain(config, *ell, *k, observables, *weyl_filter)?,
        RunConfig::So4Compare {
            count,
            samples,
            seed,
            ..
        } => run_so4_compare(config, *count, *samples, *seed)?,
        RunConfig::Asymptotics {
            n_list,
            level,
            weighting,
            ..
        } => run_asymptotics(config, n_list, *level, weighting)?,
        RunConfig::Fidelity {
            rho,
            sigma,
            rho_basis,
            sigma_basis,
            method,
            budget,
            seed,
            ..
        } => run_fidelity(
            config, rho, sigma, rho_basis, sigma_basis, method, *budget, *seed,
        )?,
    };
    paths.push(write_config(config)?);
    Ok(paths)
}

fn parse_spectrum(values: &[f64]) -> Result<Spectrum, CliError> {
    Spectrum::new(values.to_vec()).map_err(|e| CliError::Usage(e.to_string()))
}

/// Group names: `su2` or `so<N>`.
enum GroupSpec {
    Su2,
    So(usize),
}

fn parse_group(name: &str) -> Result<GroupSpec, CliError> {
    if name == "su2" {
        return Ok(GroupSpec::Su2);
    }
    if let Some(dim) = name.strip_prefix("so").and_then(|d| d.parse::<usize>().ok()) {
        if dim >= 2 {
            return Ok(GroupSpec::So(dim));
        }
    }
    Err(CliError::Usage(format!(
        "unknown group '{name}'; expected su2 or soN (e.g. so3)"
    )))
}

impl GroupSpec {
    fn volume_group(&self) -> VolumeGroup {
        match self {
            GroupSpec::Su2 => VolumeGroup::Su2,
            GroupSpec::So(2) => VolumeGroup::So2,
            GroupSpec::So(3) => VolumeGroup::So3,
            GroupSpec::So(_) => VolumeGroup::SoNProduct,
        }
    }

    fn family(&self) -> Result<UnitaryFamily, CliError> {
        Ok(match self {
            GroupSpec::Su2 => UnitaryFamily::su2(),
            GroupSpec::So(dim) => UnitaryFamily::so(*dim)?,
        })
    }
}

fn run_volume(
    config: &RunConfig,
    group: &str,
    spectrum: &[f64],
    method: &str,
    nodes: usize,
    samples: u64,
    seed: u64,
) -> Result<Vec<PathBuf>, CliError> {
    let spec = parse_spectrum(spectrum)?;
    let group = parse_group(group)?;
    let result: VolumeResult = match method {
        "closed" => closed_form_volume(group.volume_group(), &spec)?,
        "quadrature" => quadrature_volume(&spec, &group.family()?, nodes)?,
        "mc" => monte_carlo_volume(&spec, &group.family()?, samples, seed)?,
        other => {
            return Err(CliError::Usage(format!(
                "unknown method '{other}'; expected closed, quadrature, or mc"
            )))
        }
    };
    let method_name = match result.method {
        VolumeMethod::ClosedForm => "closed",
        VolumeMethod::Quadrature => "quadrature",
        VolumeMethod::MonteCarlo => "mc",
    };
    let group_name = match group {
        GroupSpec::Su2 => "su2".to_string(),
        GroupSpec::So(d) => format!("so{d}"),
    };
    let report = JsonObject::new()
        .string("command", "volume")
        .string("group", &group_name)
        .number_array("spectrum", spec.values())
        .string("method", method_name)
        .number("value", result.value)
        .number("std_error", result.std_error)
        .integer("samples_or_nodes", result.samples_or_nodes)
        .optional_integer("seed", result.seed)
        .finish();
    let path = write_artifact(config, "json", &report)?;
    println!("volume = {} (method {method_name})", result.value);
    println!("wrote {}", path.display());
    Ok(vec![path])
}

fn run_curves(config: &RunConfig, group: &str, grid: usize) -> Result<Vec<PathBuf>, CliError> {
    if grid < 2 {
        return Err(CliError::Usage("grid needs at least 2 points".into()));
    }
    let csv = match group {
        "su2" => {
            let mut csv = Csv::new(&["lambda1", "v_norm", "svn_norm", "sl_norm"]);
            for i in 0..grid {
                let l1 = i as f64 / (grid - 1) as f64;
                let s = parse_spectrum(&[l1, 1.0 - l1])?;
                csv.row(&[
                    CsvField::Float(l1),
                    CsvField::Float(normalized_volume(VolumeGroup::Su2, &s)?),
                    CsvField::Float(normalized_von_neumann(&s)),
                    CsvField::Float(normalized_linear(&s)),
                ]);
            }
            csv
        }
        "so3" => {
            let mut csv = Csv::new(&["lambda1", "lambda2", "v_norm", "svn_norm", "sl_norm"]);
            for i in 0..grid {
                let l1 = i as f64 / (grid - 1) as f64;
                for j in 0..grid {
                    let l2 = j as f64 / (grid - 1) as f64;
                    if l1 + l2 > 1.0 + 1e-12 {
                        continue;
                    }
                    let l3 = (1.0 - l1 - l2).max(0.0);
                    let s = parse_spectrum(&[l1, l2, l3])?;
                    csv.row(&[
                        CsvField::Float(l1),
                        CsvField::Float(l2),
                        CsvField::Float(normalized_volume(VolumeGroup::So3, &s)?),
                        CsvField::Float(normalized_von_neumann(&s)),
                        CsvField::Float(normalized_linear(&s)),
                    ]);
                }
            }
            csv
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown curves group '{other}'; expected su2 or so3"
            )))
        }
    };
    let path = write_artifact(config, "csv", &csv.into_string())?;
    println!("wrote {}", path.display());
    Ok(vec![path])
}

fn parse_observable(name: &str) -> Result<Observable, CliError> {
    match name {
        "volume" => Ok(Observable::Volume),
        "von-neumann" | "von_neumann" => Ok(Observable::VonNeumann),
        "linear" => Ok(Observable::Linear),
        other => Err(CliError::Usage(format!(
            "unknown observable '{other}'; expected volume, von-neumann, or linear"
        ))),
    }
}

fn observable_id(obs: Observable) -> &'static str {
    match obs {
        Observable::Volume => "volume",
        Observable::VonNeumann => "von_neumann",
        Observable::Linear => "linear",
    }
}

fn run_coarse_grain(
    config: &RunConfig,
    ell: usize,
    k: usize,
    observables: &[String],
    weyl_filter: bool,
) -> Result<Vec<PathBuf>, CliError> {
    if observables.is_empty() {
        return Err(CliError::Usage("need at least one observable".into()));
    }
    let observables: Vec<Observable> = observables
        .iter()
        .map(|name| parse_observable(name))
        .collect::<Result<_, _>>()?;
    let grid = build_grid(ell, weyl_filter)?;
    let binnings: Vec<_> = observables
        .iter()
        .map(|&obs| bin_cells(&grid, obs, k))
        .collect::<Result<_, _>>()?;

    // Per-cell file: geometry plus one (value, segment) pair per observable.
    let mut header: Vec<String> = ["cell", "eta1", "eta2", "lambda1", "lambda2", "lambda3"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for &obs in &observables {
        header.push(format!("{}_value", observable_id(obs)));
        header.push(format!("{}_segment", observable_id(obs)));
    }
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let mut cells_csv = Csv::new(&header_refs);
    for (row, cell) in grid.cells.iter().enumerate() {
        let mut fields = vec![
            CsvField::Integer(cell.id as u64),
            CsvField::Float(cell.eta[0]),
            CsvField::Float(cell.eta[1]),
            CsvField::Float(cell.lambda.values()[0]),
            CsvField::Float(cell.lambda.values()[1]),
            CsvField::Float(cell.lambda.values()[2]),
        ];
        for (obs, binning) in observables.iter().zip(&binnings) {
            fields.push(CsvField::Float(observable_value(*obs, &cell.lambda)?));
            fields.push(CsvField::Integer(binning.assignments[row].1 as u64));
        }
        cells_csv.row(&fields);
    }
    let cells_path = write_artifact(config, "cells.csv", &cells_csv.into_string())?;

    // Per-segment file: fractions and average entanglement entropy.
    let mut segments_csv = Csv::new(&["observable", "segment", "fraction", "avg_svn"]);
    for (obs, binning) in observables.iter().zip(&binnings) {
        for seg in 0..k {
            segments_csv.row(&[
                CsvField::Text(observable_id(*obs)),
                CsvField::Integer(seg as u64 + 1),
                CsvField::Float(binning.fractions[seg]),
                match binning.avg_svn[seg] {
                    Some(v) => CsvField::Float(v),
                    None => CsvField::Empty,
                },
            ]);
        }
    }
    let segments_path = write_artifact(config, "segments.csv", &segments_csv.into_string())?;
    println!(
        "coarse-grained {} cells (ell = {ell}, weyl_filter = {weyl_filter}) into k = {k} segments",
        grid.cells.len()
    );
    println!("wrote {}", cells_path.display());
    println!("wrote {}", segments_path.display());
    Ok(vec![cells_path, segments_path])
}

fn run_so4_compare(
    config: &RunConfig,
    count: usize,
    samples: u64,
    seed: u64,
) -> Result<Vec<PathBuf>, CliError> {
    if count == 0 {
        return Err(CliError::Usage("count must be positive".into()));
    }
    let spectra = sample_simplex(4, count, derive_seed(seed, 0))?;
    let family = UnitaryFamily::so(4)?;
    let mut rows: Vec<(f64, f64)> = Vec::with_capacity(count);
    for (i, s) in spectra.iter().enumerate() {
        let product = closed_form_volume(VolumeGroup::SoNProduct, s)?.value;
        let mc = monte_carlo_volume(s, &family, samples, derive_seed(seed, 1 + i as u64))?;
        rows.push((product, mc.value));
    }
    let product_max = rows.iter().map(|r| r.0).fold(f64::MIN, f64::max);
    let mc_max = rows.iter().map(|r| r.1).fold(f64::MIN, f64::max);
    let mut normalized: Vec<(f64, f64)> = rows
        .iter()
        .map(|&(p, m)| (p / product_max, m / mc_max))
        .collect();
    normalized.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("volumes are finite"));

    let mut csv = Csv::new(&["k", "v_norm_product", "v_norm_mc"]);
    for (rank, &(p, m)) in normalized.iter().enumerate() {
        csv.row(&[
            CsvField::Integer(rank as u64 + 1),
            CsvField::Float(p),
            CsvField::Float(m),
        ]);
    }
    let path = write_artifact(config, "csv", &csv.into_string())?;
    println!("compared product formula vs Monte Carlo on {count} spectra");
    println!("wrote {}", path.display());
    Ok(vec![path])
}

fn run_asymptotics(
    config: &RunConfig,
    n_list: &[usize],
    level: f64,
    weighting: &str,
) -> Result<Vec<PathBuf>, CliError> {
    if n_list.is_empty() {
        return Err(CliError::Usage("n-list must not be empty".into()));
    }
    let weighting = match weighting {
        "uniform" => TailWeighting::Uniform,
        "volume" => TailWeighting::Volume,
        other => {
            return Err(CliError::Usage(format!(
                "unknown weighting '{other}'; expected uniform or volume"
            )))
        }
    };
    let mut csv = Csv::new(&["N", "lambda1_star", "mass_ratio", "avg_svn"]);
    for &n in n_list {
        let report = asymptotics_report(n, level)?;
        let avg = match weighting {
            TailWeighting::Uniform => report.avg_svn_uniform,
            TailWeighting::Volume => report.avg_svn_volume_weighted,
        };
        csv.row(&[
            CsvField::Integer(n as u64),
            CsvField::Float(report.lambda1_star),
            CsvField::Float(report.mass_ratio),
            CsvField::Float(avg),
        ]);
    }
    let path = write_artifact(config, "csv", &csv.into_string())?;
    println!("wrote {}", path.display());
    Ok(vec![path])
}

fn rotated_state(
    label: &str,
    spectrum: &[f64],
    basis: &[f64],
) -> Result<RotatedState, CliError> {
    let spec = parse_spectrum(spectrum)?;
    if basis.is_empty() {
        return Ok(RotatedState::diagonal(spec));
    }
    let family = UnitaryFamily::u(spec.dim())?;
    if basis.len() != family.param_count() {
        return Err(CliError::Usage(format!(
            "{label} basis needs {} chart parameters for dimension {}, got {}",
            family.param_count(),
            spec.dim(),
            basis.len()
        )));
    }
    let rotation = family.realize(basis)?;
    Ok(RotatedState::new(spec, rotation)?)
}

#[allow(clippy::too_many_arguments)]
fn run_fidelity(
    config: &RunConfig,
    rho: &[f64],
    sigma: &[f64],
    rho_basis: &[f64],
    sigma_basis: &[f64],
    method: &str,
    budget: usize,
    seed: u64,
) -> Result<Vec<PathBuf>, CliError> {
    let rho = rotated_state("rho", rho, rho_basis)?;
    let sigma = rotated_state("sigma", sigma, sigma_basis)?;
    let report = match method {
        "closed" => {
            let value = fidelity_closed(&rho, &sigma)?;
            println!("fidelity = {value} (closed form)");
            JsonObject::new()
                .string("command", "fidelity")
                .string("method", "closed")
                .number("value", value)
                .finish()
        }
        "soi" => {
            let result = fidelity_soi_maximize(&rho, &sigma, budget, seed)?;
            println!("fidelity = {} (purification-family search)", result.value);
            JsonObject::new()
                .string("command", "fidelity")
                .string("method", "soi")
                .number("value", result.value)
                .integer("budget", budget as u64)
                .integer("seed", seed)
                .number_array("xi_rho", &result.xi_rho)
                .number_array("xi_sigma", &result.xi_sigma)
                .finish()
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown method '{other}'; expected closed or soi"
            )))
        }
    };
    let path = write_artifact(config, "json", &report)?;
    println!("wrote {}", path.display());
    Ok(vec![path])
}
