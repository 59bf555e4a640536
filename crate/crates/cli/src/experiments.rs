use std::collections::BTreeMap;

use qig::channels::{monotonicity_sweep, MONOTONE_VIOLATION_TOL};
use qig::connections::{christoffels, flatness_residual, Connection};
use qig::duality::{
    biorthogonality_check, dual_coords, duality_residuals, gradient_check, hessian_check, potential_phi,
    sample_points, transport_pairing_residual, uniqueness_scan,
};
use qig::manifold::{Chart, ExpChart, MixtureChart};
use qig::metrics::{bkm_forms, MeanKind, OperatorMonotoneFunction};
use qig::sample::{random_state, random_tangent, rng_for};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Command, RunConfig};
use crate::report::{Check, WitnessRow};

/// Index offset separating the transport samples from the scan samples.
const TRANSPORT_STREAM: u64 = 1 << 32;

/// Interpolation weights toward SLD for the trend check.
const TREND_STEPS: [f64; 6] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5];

/// Accumulates checks and witnesses for one experiment.
pub(crate) struct Collector<'a> {
    prefix: &'static str,
    tol: &'a BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub witnesses: BTreeMap<String, Value>,
    pub table: Vec<WitnessRow>,
}

impl<'a> Collector<'a> {
    pub fn new(command: Command, tol: &'a BTreeMap<String, f64>) -> Self {
        Self {
            prefix: command.as_str(),
            tol,
            checks: Vec::new(),
            witnesses: BTreeMap::new(),
            table: Vec::new(),
        }
    }

    fn tol(&self, key: &str) -> f64 {
        self.tol[key]
    }

    fn below(&mut self, name: &str, value: f64, key: &str) {
        let c = Check::below(format!("{}/{name}", self.prefix), value, self.tol(key));
        self.checks.push(c);
    }

    fn at_most(&mut self, name: &str, value: f64, key: &str) {
        let c = Check::at_most(format!("{}/{name}", self.prefix), value, self.tol(key));
        self.checks.push(c);
    }

    fn above(&mut self, name: &str, value: f64, key: &str) {
        let c = Check::above(format!("{}/{name}", self.prefix), value, self.tol(key));
        self.checks.push(c);
    }

    pub fn error(&mut self, message: String) {
        self.checks.push(Check::error(format!("{}/completed", self.prefix), message));
    }

    fn witness(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("witness is serializable");
        self.witnesses.insert(format!("{}/{key}", self.prefix), v);
    }

    fn row(&mut self, subject: &str, quantity: &str, value: f64) {
        self.table.push(WitnessRow {
            experiment: self.prefix.to_owned(),
            subject: subject.to_owned(),
            quantity: quantity.to_owned(),
            value,
        });
    }
}

fn max(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn argmax(values: &[f64]) -> usize {
    (0..values.len())
        .max_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap_or(0)
}

fn is_bkm_multiple(f: &OperatorMonotoneFunction) -> bool {
    matches!(f.kind(), MeanKind::Bkm)
}

pub(crate) fn run_experiment(command: Command, config: &RunConfig, out: &mut Collector) -> qig::Result<()> {
    match command {
        Command::BkmEquivalence => bkm_equivalence(config, out),
        Command::DualityScan => duality_scan(config, out),
        Command::Monotonicity => monotonicity(config, out),
        Command::Flatness => flatness(config, out),
        Command::Legendre => legendre(config, out),
        Command::All => unreachable!("expanded by the caller"),
    }
}

fn bkm_equivalence(config: &RunConfig, out: &mut Collector) -> qig::Result<()> {
    let samples = config.samples_for(Command::BkmEquivalence);
    let forms = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(config.seed, i as u64);
            let rho = random_state(&mut rng, config.dim);
            let a = random_tangent(&mut rng, &rho);
            let b = random_tangent(&mut rng, &rho);
            bkm_forms(&a, &b)
        })
        .collect::<qig::Result<Vec<_>>>()?;
    let devs: Vec<f64> = forms.iter().map(|f| f.relative_deviation).collect();
    let worst = argmax(&devs);
    out.below("max_relative_deviation", devs[worst], "bkm_relative");
    out.witness("worst_sample", json!({ "sample": worst, "forms": forms[worst] }));
    out.row("bkm", "max_relative_deviation", devs[worst]);
    out.row("bkm", "mean_relative_deviation", devs.iter().sum::<f64>() / devs.len() as f64);
    Ok(())
}

fn duality_scan(config: &RunConfig, out: &mut Collector) -> qig::Result<()> {
    let samples = config.samples_for(Command::DualityScan);
    let family = config.functions_for(Command::DualityScan);
    let chart = ExpChart::with_dim(config.dim)?;
    let reports = uniqueness_scan(&family, &chart, samples, config.seed)?;

    for r in &reports {
        let f = family.iter().find(|f| f.name() == r.f).expect("report names come from the family");
        let name = &r.f;
        if is_bkm_multiple(f) {
            out.below(&format!("{name}/duality_residual"), r.max_residual, "duality_pass");
            out.below(&format!("{name}/affine_constancy"), r.constancy_score, "affine_constancy");
            let off = r.fitted_off_diagonal.max(r.fitted_diagonal_spread) / r.fitted_scale.abs();
            out.below(&format!("{name}/affine_off_diagonal_relative"), off, "affine_off_diagonal");
        } else {
            out.above(&format!("{name}/duality_residual"), r.max_residual, "duality_reject");
            out.above(&format!("{name}/affine_constancy"), r.constancy_score, "constancy_reject");
        }
        out.row(name, "max_residual", r.max_residual);
        out.row(name, "mean_residual", r.mean_residual);
        out.row(name, "constancy_score", r.constancy_score);
        out.row(name, "fitted_scale", r.fitted_scale);
    }
    let first_other = reports
        .iter()
        .position(|r| !family.iter().any(|f| f.name() == r.f && is_bkm_multiple(f)))
        .unwrap_or(reports.len());
    let misranked = reports[first_other..]
        .iter()
        .filter(|r| family.iter().any(|f| f.name() == r.f && is_bkm_multiple(f)))
        .count();
    out.checks.push(Check::at_most("duality-scan/bkm_multiples_rank_first", misranked as f64, 0.0));
    out.witness("reports", &reports);

    let transport_samples = samples.max(2);
    let pairs: Vec<_> = (0..transport_samples)
        .map(|i| {
            let mut rng = rng_for(config.seed, TRANSPORT_STREAM | i as u64);
            let rho0 = random_state(&mut rng, config.dim);
            let rho1 = random_state(&mut rng, config.dim);
            let y = random_tangent(&mut rng, &rho0);
            let z = random_tangent(&mut rng, &rho0);
            (rho1, y, z)
        })
        .collect();
    let mut transport = BTreeMap::new();
    for f in &family {
        let worst = max(pairs
            .par_iter()
            .map(|(rho1, y, z)| transport_pairing_residual(f, rho1, y, z))
            .collect::<qig::Result<Vec<_>>>()?);
        if is_bkm_multiple(f) {
            out.below(&format!("{}/transport_residual", f.name()), worst, "transport");
        }
        out.row(f.name(), "transport_residual", worst);
        transport.insert(f.name().to_owned(), worst);
    }
    out.witness("transport_residuals", transport);

    let bkm = OperatorMonotoneFunction::bkm();
    let sld = OperatorMonotoneFunction::sld();
    let points = sample_points(&chart, samples.min(TREND_STEPS.len()).max(2), config.seed);
    let trend = TREND_STEPS
        .iter()
        .map(|&s| {
            let f = OperatorMonotoneFunction::interpolate(&bkm, &sld, s)?;
            let per_point = points
                .par_iter()
                .map(|x| duality_residuals(&f, &chart, x).map(|t| t.max().0))
                .collect::<qig::Result<Vec<_>>>()?;
            Ok(max(per_point))
        })
        .collect::<qig::Result<Vec<f64>>>()?;
    let non_increasing = trend.windows(2).filter(|w| w[1] <= w[0]).count();
    out.checks.push(Check::at_most(
        "duality-scan/interpolation_trend_non_increasing_steps",
        non_increasing as f64,
        0.0,
    ));
    for (s, r) in TREND_STEPS.iter().zip(&trend) {
        out.row(&format!("bkm~sld@{s}"), "max_residual", *r);
    }
    out.witness("interpolation_trend", json!({ "s": TREND_STEPS, "max_residual": trend }));
    Ok(())
}

fn monotonicity(config: &RunConfig, out: &mut Collector) -> qig::Result<()> {
    let mut sweeps = Vec::new();
    for f in config.functions_for(Command::Monotonicity) {
        let sweep = monotonicity_sweep(&f, config.dim, config.trials, config.seed)?;
        let name = f.name();
        if f.monotone_claim() {
            out.at_most(&format!("{name}/max_violation"), sweep.max_violation, "monotone_violation");
            out.at_most(
                &format!("{name}/max_extended_violation"),
                sweep.max_extended_violation,
                "monotone_violation",
            );
        } else {
            out.above(&format!("{name}/planted_violation"), sweep.max_violation, "planted_violation");
        }
        out.row(name, "max_violation", sweep.max_violation);
        out.row(name, "max_extended_violation", sweep.max_extended_violation);
        out.row(name, "violations_above_tol", sweep.violations_above_tol as f64);
        sweeps.push(sweep);
    }
    out.witness("sweeps", &sweeps);
    out.witness("violation_threshold", MONOTONE_VIOLATION_TOL);
    Ok(())
}

fn flatness(config: &RunConfig, out: &mut Collector) -> qig::Result<()> {
    let samples = config.samples_for(Command::Flatness);
    let exp = ExpChart::with_dim(config.dim)?;
    let mix = MixtureChart::new(exp.basis().clone());
    let grid = sample_points(&exp, samples, config.seed);
    let mix_grid = grid
        .iter()
        .map(|t| exp.state(t).map(|rho| mix.coords(&rho)))
        .collect::<qig::Result<Vec<_>>>()?;
    let bkm = OperatorMonotoneFunction::bkm();

    let gamma_max = |conn: Connection, chart: &dyn Chart, pts: &[Vec<f64>]| -> qig::Result<f64> {
        Ok(max(pts
            .par_iter()
            .map(|x| christoffels(conn, chart, &bkm, x).map(|g| g.max_abs()))
            .collect::<qig::Result<Vec<_>>>()?))
    };
    let exp_own = gamma_max(Connection::EXPONENTIAL, &exp, &grid)?;
    let mix_own = gamma_max(Connection::MIXTURE, &mix, &mix_grid)?;
    let mix_foreign = gamma_max(Connection::MIXTURE, &exp, &grid)?;
    out.below("exponential_christoffels_in_exp_chart", exp_own, "christoffel");
    out.below("mixture_christoffels_in_mixture_chart", mix_own, "christoffel");
    out.above("mixture_christoffels_in_exp_chart", mix_foreign, "christoffel_witness");

    let curvature = [
        ("exponential_curvature_in_exp_chart", Connection::EXPONENTIAL, &exp as &dyn Chart, &grid, "curvature_own"),
        ("mixture_curvature_in_mixture_chart", Connection::MIXTURE, &mix, &mix_grid, "curvature_own"),
        ("mixture_curvature_in_exp_chart", Connection::MIXTURE, &exp, &grid, "curvature_foreign"),
        ("exponential_curvature_in_mixture_chart", Connection::EXPONENTIAL, &mix, &mix_grid, "curvature_foreign"),
    ];
    let mut residuals = BTreeMap::new();
    for (name, conn, chart, pts, key) in curvature {
        let r = flatness_residual(conn, chart, pts)?;
        out.below(name, r, key);
        out.row(name, "curvature_max", r);
        residuals.insert(name, r);
    }
    let interior = flatness_residual(Connection::new(0.0)?, &exp, &grid)?;
    out.row("alpha=0", "curvature_max", interior);
    residuals.insert("alpha_zero_curvature_in_exp_chart", interior);
    out.witness("curvature", residuals);
    out.witness(
        "christoffels",
        json!({ "exp_own": exp_own, "mixture_own": mix_own, "mixture_in_exp_chart": mix_foreign }),
    );
    Ok(())
}

#[derive(Serialize)]
struct LegendrePoint {
    legendre: f64,
    eta_round_trip: f64,
    gradient: f64,
    hessian: f64,
    biorthogonality: f64,
    entropy: f64,
    newton_iterations: usize,
}

fn legendre(config: &RunConfig, out: &mut Collector) -> qig::Result<()> {
    let samples = config.samples_for(Command::Legendre);
    let chart = ExpChart::with_dim(config.dim)?;
    let bkm = OperatorMonotoneFunction::bkm();
    let points = sample_points(&chart, samples, config.seed);
    let results = points
        .par_iter()
        .map(|theta| {
            let eta = dual_coords(&chart, theta)?;
            let pair = potential_phi(&chart, &eta)?;
            let back = dual_coords(&chart, &pair.theta)?;
            let entropy = chart.state(theta)?.entropy();
            Ok(LegendrePoint {
                legendre: pair.legendre_residual(),
                eta_round_trip: max(back.iter().zip(&eta).map(|(a, b)| (a - b).abs())),
                gradient: gradient_check(&chart, theta)?,
                hessian: hessian_check(&chart, theta)?,
                biorthogonality: biorthogonality_check(&bkm, &chart, theta)?,
                entropy: (pair.phi + entropy).abs(),
                newton_iterations: pair.iterations,
            })
        })
        .collect::<qig::Result<Vec<_>>>()?;
    let pick = |f: fn(&LegendrePoint) -> f64| max(results.iter().map(f));
    let rows: [(&str, f64, &str); 6] = [
        ("legendre_identity", pick(|p| p.legendre), "legendre"),
        ("eta_round_trip", pick(|p| p.eta_round_trip), "eta_round_trip"),
        ("gradient_gap", pick(|p| p.gradient), "gradient"),
        ("hessian_gap", pick(|p| p.hessian), "hessian"),
        ("biorthogonality", pick(|p| p.biorthogonality), "biorthogonality"),
        ("phi_plus_entropy", pick(|p| p.entropy), "entropy"),
    ];
    for (name, value, key) in rows {
        out.below(name, value, key);
        out.row("bkm", name, value);
    }
    out.witness("points", &results);
    Ok(())
}
