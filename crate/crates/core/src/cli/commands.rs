use super::config::{
    Format, HhdConfig, McConfig, PathsConfig, RhoConfig, RhoMethod, SweepConfig, SweepFamily,
    SweepMethod,
};
use super::error::CliError;
use super::table::{Cell, Table};
use crate::asymptotics::{limit_matern, limit_se, pade, AsymptoticsError, LimitBranch, PadeModel};
use crate::correlation::{
    model_correlation, rho_matern, rho_matern_lower_bound, rho_mixture_anisotropic,
    rho_se_anisotropic, rho_se_isotropic, rho_sigma_chi2, CorrelationResult,
};
use crate::graphflow::{
    generate_graph, hhd_decompose, read_edge_list, sample_graph_flow, validate_trait_performance,
    write_hhd_csv, EdgeFlow, FlowEnsembleReport, Graph, HhdResult,
};
use crate::kernels::{IsotropicKernel, KernelFamily, ProductKernel};
use crate::montecarlo::{
    estimate_rho_sigma, sample_matern_zoom, FlowModel, Modulation, RhoSigmaEstimate,
    TraitDistribution, TraitModel,
};
use crate::numerics::{Density, QuadratureSpec, RngStream};
use rayon::prelude::*;
use serde_json::json;
use std::path::PathBuf;

/// A rendered output and where it goes (`None` is standard output).
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub path: Option<PathBuf>,
    pub contents: String,
}

/// Seed, destination and format after command-line overrides.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

const RHO_COLUMNS: [&str; 9] = [
    "method", "r", "r2", "nu", "T", "rho", "sigma2", "error", "status",
];

fn method_name<T: serde::Serialize>(m: &T) -> String {
    serde_json::to_value(m)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

fn check_replicates(n: usize) -> Result<(), CliError> {
    if n < 64 {
        return Err(config_err(format!(
            "replicates must be at least 64, got {n}"
        )));
    }
    Ok(())
}

fn trait_scale(traits: &TraitDistribution) -> Option<f64> {
    match traits {
        TraitDistribution::Gaussian { sigma_x } => Some(*sigma_x),
        TraitDistribution::Laplace { scale } | TraitDistribution::StudentT { scale, .. } => {
            Some(*scale)
        }
        TraitDistribution::GaussianAnisotropic { .. } => None,
    }
}

fn mc_cells(est: &RhoSigmaEstimate) -> (Cell, Cell, Cell, Cell) {
    match est.rho {
        Some(r) => (
            r.mean.into(),
            est.sigma2.mean.into(),
            r.stderr.into(),
            "ok".into(),
        ),
        None => (
            Cell::Empty,
            est.sigma2.mean.into(),
            Cell::Empty,
            "degenerate_variance".into(),
        ),
    }
}

/// `rho`: one row per requested route for a single model.
pub fn cmd_rho(cfg: &RhoConfig, s: &Settings) -> Result<Vec<Output>, CliError> {
    cfg.traits.distribution.validate(cfg.dim)?;
    check_replicates(cfg.replicates)?;
    if cfg.methods.is_empty() {
        return Err(config_err("methods must not be empty"));
    }
    let spec = QuadratureSpec::default();
    let l = cfg.kernel.length_scale();
    let r = trait_scale(&cfg.traits.distribution).map(|v| v / l);
    let nu = cfg.kernel.shape();
    let mut table = Table::new(&RHO_COLUMNS);
    for (k, m) in cfg.methods.iter().enumerate() {
        let (rho, sigma2, err, status) = match m {
            RhoMethod::Model => {
                let c = model_correlation(&cfg.kernel, &cfg.traits, cfg.dim, &spec)?;
                (
                    c.rho.into(),
                    c.sigma2.into(),
                    c.error_estimate.into(),
                    "ok".into(),
                )
            }
            RhoMethod::Chi2Quadrature => {
                let TraitDistribution::Gaussian { sigma_x } = cfg.traits.distribution else {
                    return Err(config_err(
                        "chi2_quadrature needs isotropic Gaussian traits",
                    ));
                };
                let c = rho_sigma_chi2(&cfg.kernel, sigma_x, cfg.dim, &spec)?;
                (
                    c.rho.into(),
                    c.sigma2.into(),
                    c.error_estimate.into(),
                    "ok".into(),
                )
            }
            RhoMethod::MonteCarlo => {
                let model = FlowModel::new(cfg.kernel, cfg.traits.clone(), cfg.dim)?;
                let est = estimate_rho_sigma(
                    &model,
                    cfg.replicates,
                    Modulation::None,
                    RngStream::new(s.seed, k as u64),
                )?;
                mc_cells(&est)
            }
        };
        table.push(vec![
            method_name(m).into(),
            r.into(),
            Cell::Empty,
            nu.into(),
            cfg.dim.into(),
            rho,
            sigma2,
            err,
            status,
        ]);
    }
    Ok(vec![Output {
        path: s.out.clone(),
        contents: table.render(s.format),
    }])
}

#[derive(Debug, Clone, Copy)]
struct Point {
    r: f64,
    r2: Option<f64>,
    nu: Option<f64>,
    dim: usize,
}

fn validate_sweep(cfg: &SweepConfig) -> Result<(), CliError> {
    if cfg.methods.is_empty() {
        return Err(config_err("methods must not be empty"));
    }
    if cfg.dim.is_empty() || cfg.dim.contains(&0) {
        return Err(config_err("dim must list positive trait dimensions"));
    }
    let matern = cfg.family == SweepFamily::Matern;
    if matern && cfg.nu.is_none() {
        return Err(config_err("matern sweeps need a nu grid"));
    }
    if !matern && cfg.nu.is_some() {
        return Err(config_err("nu applies to matern sweeps only"));
    }
    if cfg.r2.is_some() {
        if matern {
            return Err(config_err("r2 applies to squared exponential sweeps only"));
        }
        if cfg.dim != [2] {
            return Err(config_err("sweeps with r2 have T = 2; set dim to [2]"));
        }
    }
    for m in &cfg.methods {
        let bad = match m {
            SweepMethod::ClosedForm => matern,
            SweepMethod::LowerBound => !matern,
            SweepMethod::Chi2Quadrature | SweepMethod::Pade => cfg.r2.is_some(),
            _ => false,
        };
        if bad {
            return Err(config_err(format!(
                "method {} does not apply to this sweep",
                method_name(m)
            )));
        }
    }
    if cfg.methods.contains(&SweepMethod::MonteCarlo) {
        check_replicates(cfg.replicates)?;
    }
    Ok(())
}

fn from_result(c: CorrelationResult) -> [Cell; 4] {
    [
        c.rho.into(),
        c.sigma2.into(),
        c.error_estimate.into(),
        "ok".into(),
    ]
}

fn from_limit(v: Result<f64, AsymptoticsError>) -> Result<[Cell; 4], CliError> {
    match v {
        Ok(rho) => Ok([rho.into(), Cell::Empty, Cell::Empty, "ok".into()]),
        Err(AsymptoticsError::Partition { .. }) => {
            Ok([Cell::Empty, Cell::Empty, Cell::Empty, "out_of_band".into()])
        }
        Err(AsymptoticsError::Domain(m)) => Ok([
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            format!("not_applicable: {m}").into(),
        ]),
        Err(e) => Err(e.into()),
    }
}

fn sweep_point(
    cfg: &SweepConfig,
    p: Point,
    index: usize,
    seed: u64,
) -> Result<Vec<Vec<Cell>>, CliError> {
    let spec = QuadratureSpec::default();
    let coefficients: Vec<f64> = match p.r2 {
        Some(r2) => vec![p.r, r2],
        None => vec![p.r; p.dim],
    };
    let kernel = match (cfg.family, p.nu) {
        (SweepFamily::Matern, Some(nu)) => IsotropicKernel::matern(nu, 1.0)?,
        _ => IsotropicKernel::squared_exponential(1.0)?,
    };
    let mut rows = Vec::with_capacity(cfg.methods.len());
    for (k, m) in cfg.methods.iter().enumerate() {
        let cells = match (m, p.nu) {
            (SweepMethod::ClosedForm, _) => match p.r2 {
                Some(_) => from_result(rho_se_anisotropic(&coefficients)?),
                None => from_result(rho_se_isotropic(p.r, p.dim)?),
            },
            (SweepMethod::Quadrature, Some(nu)) => from_result(rho_matern(nu, p.r, p.dim, &spec)?),
            (SweepMethod::Quadrature, None) => match p.r2 {
                Some(_) => from_result(rho_mixture_anisotropic(
                    &coefficients,
                    &Density::PointMass { value: 1.0 },
                    &spec,
                )?),
                None => from_result(rho_sigma_chi2(&kernel, p.r, p.dim, &spec)?),
            },
            (SweepMethod::Chi2Quadrature, _) => {
                from_result(rho_sigma_chi2(&kernel, p.r, p.dim, &spec)?)
            }
            (SweepMethod::LowerBound, Some(nu)) => {
                from_result(rho_matern_lower_bound(nu, p.r, p.dim, &spec)?)
            }
            (SweepMethod::Pade, nu) => {
                let model = match nu {
                    Some(nu) => PadeModel::Matern {
                        nu,
                        coefficient: cfg.pade_convention,
                    },
                    None => PadeModel::SquaredExponential,
                };
                from_limit(pade(&model, p.r, p.dim))?
            }
            (SweepMethod::LimitSmooth | SweepMethod::LimitRough, nu) => {
                let branch = if *m == SweepMethod::LimitSmooth {
                    LimitBranch::Smooth
                } else {
                    LimitBranch::Rough
                };
                match nu {
                    Some(nu) => {
                        from_limit(limit_matern(p.r, nu, p.dim, branch, cfg.rough_coefficient))?
                    }
                    None => from_limit(limit_se(&coefficients, branch).map(|v| v.rho))?,
                }
            }
            (SweepMethod::MonteCarlo, _) => {
                let law = match p.r2 {
                    Some(r2) => TraitDistribution::GaussianAnisotropic {
                        cov: vec![vec![p.r * p.r, 0.0], vec![0.0, r2 * r2]],
                    },
                    None => TraitDistribution::Gaussian { sigma_x: p.r },
                };
                let model = FlowModel::new(kernel, TraitModel::new(law), p.dim)?;
                let stream = RngStream::new(seed, (index * cfg.methods.len() + k) as u64);
                let (a, b, c, d) = mc_cells(&estimate_rho_sigma(
                    &model,
                    cfg.replicates,
                    Modulation::None,
                    stream,
                )?);
                [a, b, c, d]
            }
            (SweepMethod::LowerBound, None) => unreachable!("rejected by validate_sweep"),
        };
        let [rho, sigma2, err, status] = cells;
        rows.push(vec![
            method_name(m).into(),
            p.r.into(),
            p.r2.into(),
            p.nu.into(),
            p.dim.into(),
            rho,
            sigma2,
            err,
            status,
        ]);
    }
    Ok(rows)
}

/// `sweep`: routes evaluated over a grid, in grid order `T`, `nu`, `r`, `r2`.
pub fn cmd_sweep(cfg: &SweepConfig, s: &Settings) -> Result<Vec<Output>, CliError> {
    validate_sweep(cfg)?;
    let rs = cfg.r.values().map_err(config_err)?;
    let r2s: Vec<Option<f64>> = match &cfg.r2 {
        Some(g) => g
            .values()
            .map_err(config_err)?
            .into_iter()
            .map(Some)
            .collect(),
        None => vec![None],
    };
    let nus: Vec<Option<f64>> = match &cfg.nu {
        Some(g) => g
            .values()
            .map_err(config_err)?
            .into_iter()
            .map(Some)
            .collect(),
        None => vec![None],
    };
    let mut points = Vec::new();
    for &dim in &cfg.dim {
        for &nu in &nus {
            for &r in &rs {
                for &r2 in &r2s {
                    points.push(Point { r, r2, nu, dim });
                }
            }
        }
    }
    let rows: Vec<Vec<Vec<Cell>>> = points
        .par_iter()
        .enumerate()
        .map(|(i, &p)| sweep_point(cfg, p, i, s.seed))
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(&RHO_COLUMNS);
    rows.into_iter().flatten().for_each(|r| table.push(r));
    Ok(vec![Output {
        path: s.out.clone(),
        contents: table.render(s.format),
    }])
}

/// `mc`: Monte Carlo `rho` and `sigma2` next to the deterministic route.
pub fn cmd_mc(cfg: &McConfig, s: &Settings) -> Result<Vec<Output>, CliError> {
    check_replicates(cfg.replicates)?;
    let model = FlowModel::new(cfg.kernel, cfg.traits.clone(), cfg.dim)?;
    let est = estimate_rho_sigma(
        &model,
        cfg.replicates,
        cfg.modulation,
        RngStream::new(s.seed, 0),
    )?;
    let reference = model_correlation(
        &cfg.kernel,
        &cfg.traits,
        cfg.dim,
        &QuadratureSpec::default(),
    )
    .ok();
    let mut table = Table::new(&["quantity", "mean", "stderr", "replicates", "reference", "z"]);
    let z =
        |mean: f64, se: f64, r: Option<f64>| -> Cell { r.map(|r| (mean - r).abs() / se).into() };
    match est.rho {
        Some(rho) => {
            let r = reference.map(|c| c.rho);
            table.push(vec![
                "rho".into(),
                rho.mean.into(),
                rho.stderr.into(),
                cfg.replicates.into(),
                r.into(),
                z(rho.mean, rho.stderr, r),
            ]);
        }
        None => table.push(vec![
            "rho".into(),
            Cell::Empty,
            Cell::Empty,
            cfg.replicates.into(),
            Cell::Empty,
            Cell::Empty,
        ]),
    }
    let r = reference.map(|c| c.sigma2);
    table.push(vec![
        "sigma2".into(),
        est.sigma2.mean.into(),
        est.sigma2.stderr.into(),
        cfg.replicates.into(),
        r.into(),
        z(est.sigma2.mean, est.sigma2.stderr, r),
    ]);
    Ok(vec![Output {
        path: s.out.clone(),
        contents: table.render(s.format),
    }])
}

fn decomposition_json(g: &Graph, f: &EdgeFlow, h: &HhdResult) -> String {
    let edges: Vec<_> = g
        .edges()
        .iter()
        .enumerate()
        .map(|(k, &(i, j))| {
            json!({"edge_src": i, "edge_dst": j, "f": f.values[k], "f_t": h.transitive.values[k], "f_c": h.cyclic.values[k]})
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&json!({
        "vertices": g.vertex_count(),
        "edges": edges,
        "potential": h.potential,
        "transitive_norm2": h.transitive_norm2,
        "cyclic_norm2": h.cyclic_norm2,
    }))
    .expect("decomposition serializes");
    s.push('\n');
    s
}

fn report_output(rep: &FlowEnsembleReport, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(rep).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut t = Table::new(&["quantity", "empirical", "stderr", "predicted"]);
            for (q, m, se, p) in [
                (
                    "transitive_norm2",
                    rep.mean_transitive,
                    rep.stderr_transitive,
                    rep.predicted_transitive,
                ),
                (
                    "cyclic_norm2",
                    rep.mean_cyclic,
                    rep.stderr_cyclic,
                    rep.predicted_cyclic,
                ),
                (
                    "total_norm2",
                    rep.mean_total,
                    rep.stderr_total,
                    rep.predicted_total,
                ),
            ] {
                t.push(vec![q.into(), m.into(), se.into(), p.into()]);
            }
            t.to_csv()
        }
    }
}

/// `hhd`: decomposes a flow read from an edge list, a flow sampled on a
/// graph, or (with `replicates`) an ensemble of sampled flows.
pub fn cmd_hhd(cfg: &HhdConfig, s: &Settings) -> Result<Vec<Output>, CliError> {
    let (graph, given) = match (&cfg.input, &cfg.graph) {
        (Some(_), Some(_)) => return Err(config_err("give either input or graph, not both")),
        (None, None) => return Err(config_err("hhd needs an input edge list or a graph model")),
        (Some(path), None) => {
            let list = read_edge_list(path)?;
            (list.graph, list.flow)
        }
        (None, Some(model)) => {
            let mut rng = RngStream::new(s.seed, u64::MAX).rng();
            (generate_graph(model, &mut rng)?.graph, None)
        }
    };
    let sampler = || -> Result<(IsotropicKernel, TraitModel, usize), CliError> {
        match (&cfg.kernel, &cfg.traits, cfg.dim) {
            (Some(k), Some(t), Some(d)) => Ok((*k, t.clone(), d)),
            _ => Err(config_err("sampling flows needs kernel, traits and dim")),
        }
    };
    if let Some(replicates) = cfg.replicates {
        let (kernel, traits, dim) = sampler()?;
        let rep = validate_trait_performance(
            &graph,
            &kernel,
            &traits,
            dim,
            replicates,
            RngStream::new(s.seed, 0),
        )?;
        return Ok(vec![Output {
            path: s.out.clone(),
            contents: report_output(&rep, s.format),
        }]);
    }
    let flow = match given {
        Some(f) => f,
        None => {
            let (kernel, traits, dim) = sampler()?;
            let mut rng = RngStream::new(s.seed, 0).rng();
            sample_graph_flow(
                &graph,
                &ProductKernel::isotropic(kernel),
                &traits,
                dim,
                &mut rng,
            )?
        }
    };
    let h = hhd_decompose(&graph, &flow)?;
    let contents = match s.format {
        Format::Json => decomposition_json(&graph, &flow, &h),
        Format::Csv => {
            let mut buf = Vec::new();
            write_hhd_csv(&mut buf, &graph, &flow, &h)?;
            String::from_utf8(buf).expect("csv is utf-8")
        }
    };
    Ok(vec![Output {
        path: s.out.clone(),
        contents,
    }])
}

/// File name of one path view.
pub fn path_file_name(nu: f64, zoom: usize, format: Format) -> String {
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    format!("path_nu{nu}_zoom{zoom}.{ext}")
}

/// `paths`: one file per `(nu, zoom level)` in the output directory. Every
/// `nu` uses the same stream, so the paths share their normal draws.
pub fn cmd_paths(cfg: &PathsConfig, s: &Settings) -> Result<Vec<Output>, CliError> {
    if cfg.nu.is_empty() {
        return Err(config_err("nu must list at least one order"));
    }
    let dir = s
        .out
        .clone()
        .ok_or_else(|| config_err("paths writes several files; set out to a directory"))?;
    let stream = RngStream::new(s.seed, 0);
    let mut outputs = Vec::new();
    for &nu in &cfg.nu {
        IsotropicKernel::new(KernelFamily::Matern, cfg.l, Some(nu), 1.0)?;
        let levels = sample_matern_zoom(nu, cfg.l, &cfg.zoom, stream)?;
        for (k, level) in levels.iter().enumerate() {
            let contents = match s.format {
                Format::Csv => {
                    let mut t = Table::new(&["x", "value"]);
                    for (x, v) in level.grid.iter().zip(&level.values) {
                        t.push(vec![(*x).into(), (*v).into()]);
                    }
                    t.to_csv()
                }
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&json!({
                        "nu": nu,
                        "l": cfg.l,
                        "zoom": k,
                        "x": level.grid,
                        "value": level.values,
                        "jitter": level.jitter,
                    }))
                    .expect("path serializes");
                    s.push('\n');
                    s
                }
            };
            outputs.push(Output {
                path: Some(dir.join(path_file_name(nu, k, s.format))),
                contents,
            });
        }
    }
    Ok(outputs)
}
