//! One function per subcommand. Each returns a JSON report and a CSV table.

use std::path::Path;
use std::sync::Arc;

use korteweg_core::field::HalfSpace;
use korteweg_core::grid::BoxGrid;
use korteweg_core::half::{residual_reduced, solve_reduced};
use korteweg_core::io::{write_fields, Sidecar};
use korteweg_core::resolvent::{
    contraction_probe, residual_full, select_lambda0, solve_general, FullSolution, NeumannOptions,
};
use korteweg_core::scan::{
    certify_multiplier, empirical_sigma_star, scan_lower_bound, standard_memberships,
};
use korteweg_core::verification::{
    bump_pair, estimate_rbounds, homogeneous_pair, manufactured_data, random_data, relative_error, rng, BumpShape,
    RBoundConfig,
};
use korteweg_core::whole::{residual_whole, solve_whole, whole_operator, BoxSpace};
use korteweg_core::{
    derive_constants, validate, Complex64 as C, Error, HalfGrid, Model, NormalSamples, Sector, TangentialGrid,
};
use rand::Rng;
use serde_json::{json, Value};

use crate::config::{DataKind, Problem, ScenarioConfig};

pub struct Outcome {
    pub report: Value,
    pub csv: Vec<Vec<String>>,
}

#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Numerical(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) => Failure::Io(e.to_string()),
            Error::SingularLopatinskii { .. }
            | Error::NeumannDiverged { .. }
            | Error::ZeroDenominator
            | Error::DerivativeStepUnderflow(_)
            | Error::BranchCutHit { .. } => Failure::Numerical(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

fn model(cfg: &ScenarioConfig) -> Result<Model, Failure> {
    Ok(Model::new(cfg.params)?)
}

fn cell(v: f64) -> String {
    format!("{v:e}")
}

pub fn validate_scenario(cfg: &ScenarioConfig) -> Result<Outcome, Failure> {
    let verdict = validate(&cfg.params);
    let names: Vec<String> = verdict.failures.iter().map(|v| v.to_string()).collect();
    if !verdict.is_ok() {
        return Err(Failure::Validation(format!("inadmissible parameters: {}", names.join(", "))));
    }
    let d = derive_constants(&cfg.params)?;
    let report = json!({
        "scenario": "validate",
        "params": cfg.params,
        "admissible": true,
        "constants": d,
    });
    let csv = vec![
        vec!["eta_w".into(), "sigma_w".into(), "s1_re".into(), "s1_im".into(), "s2_re".into(), "s2_im".into()],
        vec![cell(d.eta_w), cell(d.sigma_w), cell(d.s1.re), cell(d.s1.im), cell(d.s2.re), cell(d.s2.im)],
    ];
    Ok(Outcome { report, csv })
}

pub fn scan_scenario(cfg: &ScenarioConfig) -> Result<Outcome, Failure> {
    let m = model(cfg)?;
    let s = &cfg.scan;
    let star = empirical_sigma_star(&m, s.sigma_star_threshold);
    let sector = cfg.sector.unwrap_or(Sector::new(star.sigma_star + 0.2, 0.0));
    let mut results = Vec::new();
    let mut csv = vec![vec!["target".into(), "constant".into(), "refined_constant".into(), "relative_change".into()]];
    for &target in &s.targets {
        let coarse = scan_lower_bound(target, &sector, &s.grid, &m)?;
        let refined = if s.refine { Some(scan_lower_bound(target, &sector, &s.grid.refined(), &m)?) } else { None };
        let change = refined.as_ref().map(|r| (coarse.constant - r.constant).abs() / coarse.constant);
        csv.push(vec![
            target.name().into(),
            cell(coarse.constant),
            refined.as_ref().map_or(String::new(), |r| cell(r.constant)),
            change.map_or(String::new(), cell),
        ]);
        results.push(json!({ "result": coarse, "refined": refined, "relative_change": change }));
    }
    let certificates = if s.certify {
        let sector = Sector::new(star.sigma_star + s.certificate_margin, 0.0);
        let certs = standard_memberships(&m)
            .iter()
            .map(|mb| certify_multiplier(&mb.id, &mb.symbol, mb.order, mb.kind, &sector, &s.certificate_grid))
            .collect::<Result<Vec<_>, _>>()?;
        Some(certs)
    } else {
        None
    };
    let report = json!({
        "scenario": "scan",
        "params": cfg.params,
        "sector": sector,
        "sigma_star": star,
        "scans": results,
        "certificates": certificates,
    });
    Ok(Outcome { report, csv })
}

fn random_c(r: &mut impl Rng) -> C {
    C::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
}

fn solve_whole_scenario(cfg: &ScenarioConfig, m: &Model, lambda: C) -> Result<Value, Failure> {
    let s = &cfg.solve;
    let space = BoxSpace::new(BoxGrid::cube(s.tangential_dim + 1, s.points, s.period)?);
    let n = space.dim();
    let len = space.grid.len();
    let mut r = rng(cfg.seed);
    let cutoff = (s.points as f64 / 8.0 * 2.0 * std::f64::consts::PI / s.period).powi(2);
    let mut band = || -> Vec<C> {
        (0..len).map(|f| if space.xi_sq(f) <= cutoff { random_c(&mut r) } else { C::default() }).collect()
    };
    let (d, f, exact): (Vec<C>, Vec<Vec<C>>, _) = match s.data {
        DataKind::Manufactured => {
            let rho_hat = band();
            let u_hat: Vec<Vec<C>> = (0..n).map(|_| band()).collect();
            let (d_hat, f_hat) = whole_operator(&space, &rho_hat, &u_hat, lambda, &m.params);
            let exact = (space.samples(&rho_hat), u_hat.iter().map(|c| space.samples(c)).collect::<Vec<_>>());
            (space.samples(&d_hat), f_hat.iter().map(|c| space.samples(c)).collect(), Some(exact))
        }
        DataKind::Random => {
            let d = space.samples(&band());
            let f = (0..n).map(|_| space.samples(&band())).collect();
            (d, f, None)
        }
    };
    let sol = solve_whole(&space, &d, &f, lambda, m)?;
    let residual = residual_whole(&space, &sol, &d, &f, lambda, &m.params);
    let error = exact.map(|(rho, u)| {
        let mut num = 0.0;
        let mut den = 0.0;
        for (a, b) in std::iter::once((&sol.rho, &rho)).chain(sol.u.iter().zip(&u)) {
            num += a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>();
            den += b.iter().map(|y| y.norm_sqr()).sum::<f64>();
        }
        (num / den).sqrt()
    });
    Ok(json!({ "residual": residual, "relative_error": error }))
}

fn solve_half_scenario(cfg: &ScenarioConfig, m: &Model, lambda: C) -> Result<Value, Failure> {
    let s = &cfg.solve;
    let grid = TangentialGrid::new(s.tangential_dim, s.points, s.period)?;
    let normal = NormalSamples::clustered(s.depth, s.normal_points);
    let mut r = rng(cfg.seed);
    let n = s.tangential_dim + 1;
    let g: Vec<Vec<C>> = (0..n).map(|_| (0..grid.modes()).map(|_| random_c(&mut r)).collect()).collect();
    let h: Vec<C> = (0..grid.modes()).map(|_| random_c(&mut r)).collect();
    let sol = solve_reduced(&g, &h, lambda, &grid, &normal, m)?;
    let residual = residual_reduced(&sol.modal, &g, &h, lambda, &normal, m);
    Ok(json!({ "residual": residual }))
}

fn half_space(dim: usize, points: usize, period: f64, depth: f64, box_points: usize) -> Result<Arc<HalfSpace>, Failure> {
    let t = TangentialGrid::new(dim, points, period)?;
    Ok(HalfSpace::new(HalfGrid::new(t, depth, box_points)?))
}

fn solve_full_scenario(cfg: &ScenarioConfig, m: &Model, lambda: C, out: Option<&Path>) -> Result<Value, Failure> {
    let s = &cfg.solve;
    let space = half_space(s.tangential_dim, s.points, s.period, s.depth, s.box_points)?;
    let shape = BumpShape { center: (0.4 * s.depth).min(3.0), ..BumpShape::default() };
    let mut r = rng(cfg.seed);
    let exact = match s.data {
        DataKind::Manufactured => {
            let mut pair = bump_pair(&space, shape, &mut r);
            let modes = [0, 1, space.grid.tangential.modes() - 1];
            let hom = homogeneous_pair(&space, &modes, lambda, m, &mut r)?;
            pair.rho.modal.add_assign(&hom.rho.modal, C::new(1.0, 0.0));
            for (a, b) in pair.u.iter_mut().zip(&hom.u) {
                a.modal.add_assign(&b.modal, C::new(1.0, 0.0));
            }
            Some(pair)
        }
        DataKind::Random => None,
    };
    let random = random_data(&space, shape, &mut r);
    let data_at = |l: C| exact.as_ref().map_or_else(|| random.clone(), |e| manufactured_data(e, l, &m.params));
    let (lambda, selection) = if s.auto_lambda && m.params.gamma != 0.0 {
        let sel = select_lambda0(&data_at(lambda), lambda.arg(), m, 0.5, 0.45, 3, 30)?;
        (sel.lambda, Some(sel))
    } else {
        (lambda, None)
    };
    let data = data_at(lambda);
    let (sol, state) = solve_general(&data, lambda, m, NeumannOptions { max_iter: s.max_iter, tol: s.tol })?;
    let residual = residual_full(&sol, &data, lambda, &m.params);
    let error = exact.as_ref().map(|e| relative_error(&sol, e));
    let fields = match (s.write_fields, out) {
        (true, Some(dir)) => Some(write_solution(dir, &space, &sol)?),
        _ => None,
    };
    Ok(json!({
        "lambda": [lambda.re, lambda.im],
        "lambda_selection": selection,
        "neumann": state,
        "residual": residual,
        "relative_error": error,
        "fields": fields,
    }))
}

fn write_solution(dir: &Path, space: &HalfSpace, sol: &FullSolution) -> Result<String, Failure> {
    let n = space.dim();
    let mut names = vec!["rho".to_string()];
    names.extend((1..=n).map(|j| format!("u{j}")));
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let sidecar = Sidecar::for_grid(&space.grid, &refs);
    let path = write_fields(dir, "solution", &sidecar, &sol.samples())?;
    Ok(path.file_name().map(|p| p.to_string_lossy().into_owned()).unwrap_or_default())
}

pub fn solve_scenario(cfg: &ScenarioConfig, out: Option<&Path>) -> Result<Outcome, Failure> {
    let m = model(cfg)?;
    let lambda = C::new(cfg.solve.lambda[0], cfg.solve.lambda[1]);
    let body = match cfg.solve.problem {
        Problem::Whole => solve_whole_scenario(cfg, &m, lambda)?,
        Problem::Half => solve_half_scenario(cfg, &m, lambda)?,
        Problem::Full => solve_full_scenario(cfg, &m, lambda, out)?,
    };
    let residual = &body["residual"];
    let mut csv = vec![vec!["row".into(), "max_abs".into(), "l2".into(), "data_l2".into()]];
    if let Some(rows) = residual["rows"].as_array() {
        for row in rows {
            csv.push(vec![
                row["row"].as_str().unwrap_or_default().to_string(),
                row["max_abs"].to_string(),
                row["l2"].to_string(),
                row["data_l2"].to_string(),
            ]);
        }
    }
    let problem = match cfg.solve.problem {
        Problem::Whole => "whole",
        Problem::Half => "half",
        Problem::Full => "full",
    };
    let report = json!({ "scenario": "solve", "problem": problem, "params": cfg.params, "seed": cfg.seed, "solution": body });
    Ok(Outcome { report, csv })
}

pub fn rbound_scenario(cfg: &ScenarioConfig) -> Result<Outcome, Failure> {
    let m = model(cfg)?;
    let s = &cfg.rbound;
    let config = RBoundConfig {
        sector: cfg.sector.unwrap_or(Sector::new(1.2, 0.5)),
        lambda_max: s.lambda_max,
        m_max: s.m_max,
        trials: s.trials,
        seed: cfg.seed,
        tangential_points: s.tangential_points,
        depth: s.depth,
        box_points: s.box_points,
        rel_step: s.rel_step,
    };
    let estimates = estimate_rbounds(&config, &m, &s.families)?;
    let mut csv = vec![vec!["family".into(), "trial".into(), "ratio".into()]];
    for e in &estimates {
        for (i, v) in e.per_trial.iter().enumerate() {
            csv.push(vec![e.family_id.clone(), i.to_string(), cell(*v)]);
        }
    }
    let report = json!({ "scenario": "rbound", "params": cfg.params, "config": config, "estimates": estimates });
    Ok(Outcome { report, csv })
}

pub fn probe_scenario(cfg: &ScenarioConfig) -> Result<Outcome, Failure> {
    let m = model(cfg)?;
    let s = &cfg.probe;
    let space = half_space(1, s.points, 2.0 * std::f64::consts::PI, s.depth, s.box_points)?;
    let mut r = rng(cfg.seed);
    let shape = BumpShape { center: 0.5 * s.depth, ..BumpShape::default() };
    let data = random_data(&space, shape, &mut r);
    let lambdas: Vec<C> = s.moduli.iter().map(|&v| C::from_polar(v, s.arg)).collect();
    let rows = contraction_probe(&data, &lambdas, &m)?;
    let mut csv = vec![vec!["lambda_abs".into(), "ratio".into()]];
    csv.extend(rows.iter().map(|row| vec![cell(row.lambda_abs), cell(row.ratio)]));
    let report = json!({ "scenario": "probe", "params": cfg.params, "seed": cfg.seed, "rows": rows });
    Ok(Outcome { report, csv })
}
