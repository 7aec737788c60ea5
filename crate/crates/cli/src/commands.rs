use std::path::{Path, PathBuf};

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use voltype_core::canonical::{phi_jacobian_with, DEFAULT_CHART_FLOOR, DEFAULT_RANK_RTOL};
use voltype_core::geometry::{DEFAULT_DEGENERACY_TOL, DEFAULT_EQUIVALENCE_TOL};
use voltype_core::measure::counting::{DEFAULT_ROUNDING_DELTA, DEFAULT_TUPLE_BUDGET};
use voltype_core::measure::{
    box_count_volume_types_multi, chain_measure_estimate_multi, count_distinct_volume_types,
    lp_scaling_check, pair_count_statistic, sharpness_scaling, BoxCountReport, CountOptions,
    PairCountOptions, PairMap, SpectralOptions, TupleMode,
};
use voltype_core::rng::{self, Domain};
use voltype_core::sets::sample_configurations;
use voltype_core::subsets::{subset_label, subsets};
use voltype_core::{
    canonical::canonical_form_with_floor, fit_linear_map, recover_group_element, sample_points,
    volume_type, Configuration, Error, LatticeSpec,
};

use crate::config::{read_points, read_tuples, resolve, MeasureConfig, SetConfig};
use crate::output::{emit, envelope, f, i, write_csv, write_json, Table};
use crate::{
    BoxArgs, CanonicalArgs, Failure, GenSetArgs, OrbitArgs, PairArgs, SharpnessArgs, SpectralArgs,
    VoltypeArgs,
};

fn out_of(common: &crate::Common) -> (Option<&Path>, Option<&Path>) {
    (common.out.as_deref(), common.summary.as_deref())
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VoltypeConfig {
    points: PathBuf,
    k: Option<usize>,
    tuples: Option<String>,
    random: Option<usize>,
    #[serde(default)]
    seed: u64,
}

pub fn voltype(args: &VoltypeArgs) -> Result<(), Failure> {
    let cfg: VoltypeConfig = resolve(args.common.config.as_deref(), args)?;
    let points = read_points(&cfg.points)?;
    let d = points[0].len();
    let n = points.len();
    let k = cfg.k.unwrap_or(n);
    if k < d || k > n {
        return Err(Failure::Usage(format!(
            "k = {k} must lie in [d, #points] = [{d}, {n}]"
        )));
    }
    let tuples: Vec<Vec<usize>> = match (&cfg.tuples, cfg.random) {
        (Some(_), Some(_)) => {
            return Err(Failure::Usage(
                "give either tuples or random, not both".into(),
            ))
        }
        (Some(t), None) if t == "all" => subsets(n, k),
        (Some(t), None) => read_tuples(Path::new(t), k, n)?,
        (None, Some(count)) => {
            let mut rng = rng::stream(cfg.seed, Domain::TupleSelection, 0);
            (0..count)
                .map(|_| index::sample(&mut rng, n, k).into_vec())
                .collect()
        }
        (None, None) if k == n => vec![(0..n).collect()],
        (None, None) => {
            return Err(Failure::Usage(
                "k below the point count needs tuples or random".into(),
            ))
        }
    };

    let rows = tuples
        .par_iter()
        .map(|t| {
            let pts: Vec<Vec<f64>> = t.iter().map(|&j| points[j].clone()).collect();
            Configuration::new(d, &pts).map(|x| volume_type(&x).values.into_iter().map(f).collect())
        })
        .collect::<Result<Vec<Vec<String>>, Error>>()?;
    let labels: Vec<String> = subsets(k, d).iter().map(|s| subset_label(s)).collect();
    let table = Table {
        header: labels,
        rows,
    };
    let summary = envelope(
        "voltype",
        Some(cfg.seed),
        &cfg,
        json!({ "d": d, "k": k, "num_points": n, "num_tuples": tuples.len() }),
    );
    let (out, sum) = out_of(&args.common);
    // a summary is only written when asked for; stdout stays pure CSV
    write_csv(&table, out, true)?;
    if let Some(p) = crate::output::summary_path(sum, out) {
        write_json(&summary, Some(&p))?;
    }
    Ok(())
}

fn default_equivalence_tol() -> f64 {
    DEFAULT_EQUIVALENCE_TOL
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OrbitConfig {
    a: PathBuf,
    b: PathBuf,
    #[serde(default = "default_equivalence_tol")]
    tol: f64,
}

fn rows_of(matrix: &[f64], d: usize) -> Vec<Vec<f64>> {
    matrix.chunks_exact(d).map(|r| r.to_vec()).collect()
}

fn configuration(path: &Path) -> Result<Configuration, Failure> {
    let pts = read_points(path)?;
    Ok(Configuration::new(pts[0].len(), &pts)?)
}

pub fn orbit_check(args: &OrbitArgs) -> Result<(), Failure> {
    let cfg: OrbitConfig = resolve(args.config.as_deref(), args)?;
    let x = configuration(&cfg.a)?;
    let y = configuration(&cfg.b)?;
    let fit = fit_linear_map(&x, &y)?;
    let result = match recover_group_element(&x, &y, cfg.tol) {
        Ok(g) => json!({
            "equivalent": true,
            "reason": null,
            "g": rows_of(g.matrix(), g.d()),
            "det": fit.det,
            "residuals": fit.residuals,
        }),
        Err(Error::NotEquivalent(reason)) => json!({
            "equivalent": false,
            "reason": reason,
            "g": rows_of(&fit.matrix, fit.d),
            "det": fit.det,
            "residuals": fit.residuals,
        }),
        Err(e) => return Err(e.into()),
    };
    write_json(
        &envelope("orbit-check", None, &cfg, result),
        args.out.as_deref(),
    )
}

fn default_floor() -> f64 {
    DEFAULT_CHART_FLOOR
}

fn default_step() -> f64 {
    1e-6
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CanonicalConfig {
    points: PathBuf,
    #[serde(default = "default_floor")]
    floor: f64,
    #[serde(default = "default_step")]
    step: f64,
}

pub fn canonical(args: &CanonicalArgs) -> Result<(), Failure> {
    let cfg: CanonicalConfig = resolve(args.config.as_deref(), args)?;
    let x = configuration(&cfg.points)?;
    let c = canonical_form_with_floor(&x, DEFAULT_DEGENERACY_TOL, cfg.floor)?;
    let jac = phi_jacobian_with(&c, Some(cfg.step), cfg.floor, DEFAULT_RANK_RTOL)?;
    let vt = volume_type(&x);
    let z: Vec<Vec<f64>> = (c.d()..c.k()).map(|i| c.z_point(i).to_vec()).collect();
    let result = json!({
        "d": c.d(),
        "k": c.k(),
        "n": c.dim(),
        "t": c.t(),
        "z": z,
        "coordinates": c.to_vector(),
        "volume_type": { "labels": vt.labels(), "values": vt.values },
        "jacobian": {
            "singular_values": jac.singular_values,
            "rank": jac.rank,
            "full_rank": jac.full_rank,
        },
    });
    write_json(
        &envelope("canonical", None, &cfg, result),
        args.out.as_deref(),
    )
}

fn two() -> usize {
    2
}

fn default_delta() -> f64 {
    DEFAULT_ROUNDING_DELTA
}

fn default_budget() -> u64 {
    DEFAULT_TUPLE_BUDGET
}

fn exhaustive() -> String {
    "exhaustive".into()
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SharpnessConfig {
    q: Vec<u32>,
    s: f64,
    #[serde(default = "two")]
    d: usize,
    #[serde(default = "two")]
    k: usize,
    #[serde(default = "default_delta")]
    delta: f64,
    #[serde(default = "exhaustive")]
    mode: String,
    samples: Option<u64>,
    #[serde(default)]
    seed: u64,
    #[serde(default = "default_budget")]
    budget: u64,
    delta_sweep: Option<Vec<f64>>,
}

pub fn sharpness(args: &SharpnessArgs) -> Result<(), Failure> {
    let mut cfg: SharpnessConfig = resolve(args.common.config.as_deref(), args)?;
    let mode = match cfg.mode.as_str() {
        "exhaustive" => TupleMode::Exhaustive,
        "sampled" => TupleMode::Sampled {
            n: cfg
                .samples
                .ok_or_else(|| Failure::Usage("sampled mode needs samples".into()))?,
            seed: cfg.seed,
        },
        other => return Err(Failure::Usage(format!("unknown mode {other:?}"))),
    };
    let sweep = cfg
        .delta_sweep
        .get_or_insert_with(|| vec![1e-6, 1e-9, 1e-12])
        .clone();
    let opts = CountOptions {
        delta: cfg.delta,
        mode,
        budget: cfg.budget,
    };
    let report = sharpness_scaling(&cfg.q, cfg.s, cfg.d, cfg.k, &opts)?;

    let mut table = Table::new(&[
        "q",
        "s",
        "d",
        "k",
        "num_centers",
        "num_tuples",
        "distinct_count",
        "epsilon",
        "measure_upper_estimate",
    ]);
    for r in &report.reports {
        table.push(vec![
            i(r.q.unwrap_or(0)),
            f(cfg.s),
            i(r.d),
            i(r.k),
            i(r.num_centers),
            i(r.num_tuples_evaluated),
            i(r.distinct_count),
            f(r.epsilon),
            f(r.measure_upper_estimate),
        ]);
    }

    let smallest = *cfg.q.iter().min().expect("q list checked nonempty");
    let set = voltype_core::build_sharpness_set(&LatticeSpec::new(smallest, cfg.s, cfg.d)?);
    let sensitivity = sweep
        .iter()
        .map(|&delta| {
            let r = count_distinct_volume_types(&set, cfg.k, &CountOptions { delta, ..opts })?;
            Ok(json!({ "delta": delta, "distinct_count": r.distinct_count }))
        })
        .collect::<Result<Vec<Value>, Error>>()?;
    let stable = sensitivity
        .windows(2)
        .all(|w| w[0]["distinct_count"] == w[1]["distinct_count"]);
    let decreasing = report
        .reports
        .windows(2)
        .all(|w| w[1].measure_upper_estimate < w[0].measure_upper_estimate);
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let mut result = json!({
        "reference_exponent": report.reference_exponent,
        "exhaustive": report.reports.iter().all(|r| r.exhaustive),
        "measure_upper_estimate_decreasing": decreasing,
        "delta_sensitivity": { "q": smallest, "counts": sensitivity, "stable": stable },
        "warnings": report.warnings,
    });
    if let Some(slope) = report.slope {
        result["slope"] = json!(slope);
    }
    let summary = envelope("sharpness", Some(cfg.seed), &cfg, result);
    let (out, sum) = out_of(&args.common);
    emit(&table, &summary, out, sum)
}

fn default_samples() -> usize {
    100_000
}

fn default_box_eps() -> Vec<f64> {
    vec![0.125, 0.0625, 0.03125]
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoxConfig {
    set: SetConfig,
    #[serde(default = "two")]
    k: usize,
    #[serde(default = "default_samples")]
    samples: usize,
    #[serde(default)]
    seed: u64,
    #[serde(default = "default_box_eps")]
    epsilons: Vec<f64>,
}

#[derive(Clone, Copy)]
pub enum BoxMap {
    Chart,
    Chain,
}

pub fn box_count(args: &BoxArgs, map: BoxMap) -> Result<(), Failure> {
    let cfg: BoxConfig = resolve(args.common.config.as_deref(), args)?;
    let set = cfg.set.build()?;
    let samples = sample_configurations(&set, cfg.k, cfg.samples, cfg.seed)?;
    let (name, reports): (&str, Vec<BoxCountReport>) = match map {
        BoxMap::Chart => (
            "positivity",
            box_count_volume_types_multi(&samples, &cfg.epsilons)?,
        ),
        BoxMap::Chain => (
            "chain",
            chain_measure_estimate_multi(&samples, &cfg.epsilons)?,
        ),
    };
    let mut table = Table::new(&[
        "epsilon",
        "n",
        "num_samples",
        "occupied_boxes",
        "degenerate_boxes",
        "measure_estimate",
        "skipped_degenerate_fraction",
    ]);
    for r in &reports {
        table.push(vec![
            f(r.epsilon),
            i(r.n),
            i(r.num_samples),
            i(r.occupied_boxes),
            i(r.degenerate_boxes),
            f(r.measure_estimate),
            f(r.skipped_degenerate_fraction),
        ]);
    }
    let (lo, hi) = reports
        .iter()
        .map(|r| r.measure_estimate)
        .fold((f64::INFINITY, 0.0f64), |(a, b), v| (a.min(v), b.max(v)));
    let skipped = reports
        .first()
        .map_or(0.0, |r| r.skipped_degenerate_fraction);
    let summary = envelope(
        name,
        Some(cfg.seed),
        &cfg,
        json!({
            "set_size": set.len(),
            "radius": set.radius(),
            "min_measure_estimate": lo,
            "max_measure_estimate": hi,
            "spread": if lo > 0.0 { json!(hi / lo) } else { Value::Null },
            // positivity is only read off when nearly every sample is inside the chart
            "conclusive": skipped < 0.01,
        }),
    );
    let (out, sum) = out_of(&args.common);
    emit(&table, &summary, out, sum)
}

fn volume_chart() -> PairMap {
    PairMap::VolumeChart
}

fn default_pairs() -> u64 {
    1_000_000
}

fn default_pair_eps() -> Vec<f64> {
    (3..=8).map(|j| 2f64.powi(-j)).collect()
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairConfig {
    set: SetConfig,
    #[serde(default = "two")]
    k: usize,
    #[serde(default = "volume_chart")]
    map: PairMap,
    #[serde(default = "default_pair_eps")]
    epsilons: Vec<f64>,
    #[serde(default = "default_pairs")]
    pairs: u64,
    #[serde(default)]
    seed: u64,
}

pub fn pairstat(args: &PairArgs) -> Result<(), Failure> {
    let cfg: PairConfig = resolve(args.common.config.as_deref(), args)?;
    let set = cfg.set.build()?;
    let opts = PairCountOptions {
        k: cfg.k,
        map: cfg.map,
        epsilons: cfg.epsilons.clone(),
        num_pairs: cfg.pairs,
        seed: cfg.seed,
    };
    let reports = pair_count_statistic(&set, &opts)?;
    let mut table = Table::new(&[
        "epsilon",
        "n",
        "num_pairs",
        "skipped_pairs",
        "hits",
        "statistic",
        "standard_error",
    ]);
    for r in &reports {
        table.push(vec![
            f(r.epsilon),
            i(r.n),
            i(r.num_pairs),
            i(r.skipped_pairs),
            i(r.hits),
            f(r.statistic),
            f(r.standard_error),
        ]);
    }
    let (lo, hi) = reports
        .iter()
        .map(|r| r.statistic)
        .fold((f64::INFINITY, 0.0f64), |(a, b), v| (a.min(v), b.max(v)));
    let summary = envelope(
        "pairstat",
        Some(cfg.seed),
        &cfg,
        json!({
            "min_statistic": lo,
            "max_statistic": hi,
            "spread": if lo > 0.0 { json!(hi / lo) } else { Value::Null },
        }),
    );
    let (out, sum) = out_of(&args.common);
    emit(&table, &summary, out, sum)
}

fn default_grid() -> usize {
    1 << 16
}

fn default_j_min() -> u32 {
    4
}

fn default_j_max() -> u32 {
    12
}

fn default_period() -> f64 {
    2.0
}

fn default_tolerance() -> f64 {
    0.1
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectralConfig {
    measure: MeasureConfig,
    #[serde(default = "default_grid")]
    grid_size: usize,
    #[serde(default = "default_j_min")]
    j_min: u32,
    #[serde(default = "default_j_max")]
    j_max: u32,
    #[serde(default = "default_period")]
    period: f64,
    s: Option<f64>,
    #[serde(default = "default_tolerance")]
    tolerance: f64,
}

pub fn spectral(args: &SpectralArgs) -> Result<(), Failure> {
    let cfg: SpectralConfig = resolve(args.common.config.as_deref(), args)?;
    let measure = cfg.measure.build()?;
    let opts = SpectralOptions {
        grid_size: cfg.grid_size,
        j_min: cfg.j_min,
        j_max: cfg.j_max,
        period: cfg.period,
        s: cfg.s,
    };
    let r = lp_scaling_check(&measure, &opts)?;
    let mut table = Table::new(&["j", "sup_norm", "l2_norm"]);
    for ((j, sup), l2) in r.scales.iter().zip(&r.sup_norms).zip(&r.l2_norms) {
        table.push(vec![i(j), f(*sup), f(*l2)]);
    }
    let summary = envelope(
        "spectral",
        None,
        &cfg,
        json!({
            "d": r.d,
            "s": r.s,
            "target_exponent": r.target_exponent,
            "total_mass": r.total_mass,
            "fitted_slope_sup": r.fitted_slope_sup,
            "fitted_slope_l2": r.fitted_slope_l2,
            "within_bounds": r.within_bounds(cfg.tolerance),
        }),
    );
    let (out, sum) = out_of(&args.common);
    emit(&table, &summary, out, sum)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GenSetConfig {
    set: SetConfig,
    samples: Option<usize>,
    #[serde(default)]
    seed: u64,
}

pub fn gen_set(args: &GenSetArgs) -> Result<(), Failure> {
    let cfg: GenSetConfig = resolve(args.common.config.as_deref(), args)?;
    let set = cfg.set.build()?;
    let d = set.d();
    let flat = match cfg.samples {
        Some(n) => sample_points(&set, n, cfg.seed),
        None => set.centers().to_vec(),
    };
    let table = Table {
        header: Vec::new(),
        rows: flat
            .chunks_exact(d)
            .map(|p| p.iter().map(|&v| f(v)).collect())
            .collect(),
    };
    let (out, sum) = out_of(&args.common);
    // point files are headerless
    write_csv(&table, out, false)?;
    let summary = envelope(
        "gen-set",
        Some(cfg.seed),
        &cfg,
        json!({ "d": d, "num_centers": set.len(), "radius": set.radius(), "rows": table.rows.len() }),
    );
    if let Some(p) = crate::output::summary_path(sum, out) {
        write_json(&summary, Some(&p))?;
    }
    Ok(())
}
