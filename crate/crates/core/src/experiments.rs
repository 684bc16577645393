//! End-to-end runs: localization experiments, ratio curves, parameter
//! sweeps, scaling fits, and their CSV/JSON shapes.
//!
//! Everything here is deterministic: no clocks, no RNG, no iteration over
//! unordered containers, so identical configurations produce bit-identical
//! artifacts regardless of thread count.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{build_three_star, build_two_star, GraphFamily, StarChainGraph};
use crate::reduced::{derive_reduced_matrix, three_star_basis};
use crate::spectral::{self, PPlusReport};
use crate::tolerances;
use crate::walk::{self, GroupedWeights, StateVector};

/// Rounds to the nearest even integer; exact ties go down.
pub fn round_to_even(x: f64) -> usize {
    if x <= 0.0 {
        return 0;
    }
    let lower = 2.0 * (x / 2.0).floor();
    let upper = lower + 2.0;
    let chosen = if x - lower <= upper - x { lower } else { upper };
    chosen as usize
}

fn build_graph_for(
    family: GraphFamily,
    prongs: usize,
    shared: Option<usize>,
) -> Result<StarChainGraph> {
    match (family, shared) {
        (GraphFamily::TwoStar, None) => build_two_star(prongs),
        (GraphFamily::TwoStar, Some(_)) => Err(Error::invalid(
            "two-star graphs take no shared parameter (they always share 2 vertices)",
        )),
        (GraphFamily::ThreeStar, Some(m)) => build_three_star(prongs, m),
        (GraphFamily::ThreeStar, None) => Err(Error::invalid("three-star graphs need --shared")),
    }
}

/// Even step count at which measurement is predicted to localize the
/// walker: pi/gamma for two stars, 2 pi / sqrt(2 gamma_plus t) for three.
pub fn predicted_measurement_step(graph: &StarChainGraph) -> Result<usize> {
    let t = graph.transmission();
    let steps = match graph.family() {
        GraphFamily::TwoStar => {
            let gamma = t * (3.0 * (graph.prongs() as f64 - 3.0)).sqrt();
            std::f64::consts::PI / gamma
        }
        GraphFamily::ThreeStar => {
            let m = graph.shared_parameter().expect("three-star has m");
            let (gamma_plus, _) = spectral::gamma_pm(m)?;
            2.0 * std::f64::consts::PI / (2.0 * gamma_plus * t).sqrt()
        }
    };
    Ok(round_to_even(steps))
}

/// Parameters of a single localization run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExperimentConfig {
    pub family: GraphFamily,
    pub prongs: usize,
    pub shared: Option<usize>,
    /// Even cap on evolved steps; defaults to twice the predicted step and
    /// may not be set lower than that.
    pub max_steps: Option<usize>,
}

impl ExperimentConfig {
    pub fn two_star(prongs: usize) -> ExperimentConfig {
        ExperimentConfig {
            family: GraphFamily::TwoStar,
            prongs,
            shared: None,
            max_steps: None,
        }
    }

    pub fn three_star(prongs: usize, shared: usize) -> ExperimentConfig {
        ExperimentConfig {
            family: GraphFamily::ThreeStar,
            prongs,
            shared: Some(shared),
            max_steps: None,
        }
    }

    pub fn build_graph(&self) -> Result<StarChainGraph> {
        build_graph_for(self.family, self.prongs, self.shared)
    }
}

/// Path probability at one even step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub path_probability: f64,
}

/// Outcome of a localization run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub family: GraphFamily,
    pub prongs: usize,
    pub shared: Option<usize>,
    pub transmission: f64,
    pub predicted_step: usize,
    /// Argmax of path probability over the first 1.5 predicted periods.
    pub observed_step: usize,
    pub max_path_probability: f64,
    pub path_probability_at_predicted: f64,
    /// Grouped-state weights at the predicted step; three-star only.
    pub grouped_at_predicted: Option<GroupedWeights>,
    /// P(psi3)/P(psi2) at the predicted step; three-star only.
    pub r_plus: Option<f64>,
    /// Fast-branch weight of the initial state; three-star only.
    pub p_plus: Option<PPlusReport>,
    /// Path probability at every even step up to the cap.
    pub series: Vec<StepRecord>,
}

/// Evolves the canonical initial state and records path probability on the
/// even-step grid.
pub fn run_path_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let graph = config.build_graph()?;
    let predicted = predicted_measurement_step(&graph)?;
    let max_steps = match config.max_steps {
        None => 2 * predicted,
        Some(k) if k % 2 != 0 => {
            return Err(Error::invalid(format!("step cap must be even, got {k}")))
        }
        Some(k) if k < 2 * predicted => {
            return Err(Error::invalid(format!(
                "step cap {k} is below twice the predicted step {predicted}"
            )))
        }
        Some(k) => k,
    };
    let window = round_to_even(1.5 * predicted as f64).min(max_steps);

    let mut state = walk::initial_state(&graph);
    let mut scratch = StateVector::zeros(&graph);
    let mut series = Vec::with_capacity(max_steps / 2 + 1);
    series.push(StepRecord {
        step: 0,
        path_probability: walk::path_probability(&graph, &state),
    });
    let mut grouped_at_predicted = None;
    if predicted == 0 {
        grouped_at_predicted = walk::measure(&graph, &state)?.grouped;
    }
    for n in 1..=max_steps / 2 {
        for _ in 0..2 {
            walk::step_into(&graph, &state, &mut scratch);
            std::mem::swap(&mut state, &mut scratch);
        }
        let step = 2 * n;
        series.push(StepRecord {
            step,
            path_probability: walk::path_probability(&graph, &state),
        });
        if step == predicted {
            grouped_at_predicted = walk::measure(&graph, &state)?.grouped;
        }
    }
    let drift = (state.norm() - 1.0).abs();
    if drift > tolerances::NORM_DRIFT {
        return Err(Error::numeric(format!(
            "norm drifted by {drift:.3e} over {max_steps} steps"
        )));
    }
    for record in &series {
        if !record.path_probability.is_finite()
            || !(0.0..=1.0 + tolerances::PROBABILITY_SUM).contains(&record.path_probability)
        {
            return Err(Error::numeric(format!(
                "path probability {} at step {} is out of range",
                record.path_probability, record.step
            )));
        }
    }

    let (observed_step, max_path_probability) =
        series
            .iter()
            .take(window / 2 + 1)
            .fold((0usize, f64::MIN), |(bs, bp), r| {
                if r.path_probability > bp {
                    (r.step, r.path_probability)
                } else {
                    (bs, bp)
                }
            });
    let path_probability_at_predicted = series[predicted / 2].path_probability;

    let (r_plus, p_plus) = match graph.family() {
        GraphFamily::TwoStar => (None, None),
        GraphFamily::ThreeStar => {
            let grouped = grouped_at_predicted
                .ok_or_else(|| Error::numeric("three-star run lost its grouped snapshot"))?;
            let r = (grouped.psi2 > 0.0).then(|| grouped.psi3 / grouped.psi2);
            let basis = three_star_basis(&graph)?;
            let model = derive_reduced_matrix(&graph, &basis)?;
            let spectrum = spectral::exact_spectrum(&model)?;
            (r, spectrum.p_plus)
        }
    };

    Ok(ExperimentReport {
        family: graph.family(),
        prongs: graph.prongs(),
        shared: graph.shared_parameter(),
        transmission: graph.transmission(),
        predicted_step: predicted,
        observed_step,
        max_path_probability,
        path_probability_at_predicted,
        grouped_at_predicted,
        r_plus,
        p_plus,
        series,
    })
}

/// Full-state dump after a fixed number of steps (odd counts permitted).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationDump {
    pub family: GraphFamily,
    pub prongs: usize,
    pub shared: Option<usize>,
    pub steps: usize,
    pub path_probability: f64,
    pub total_probability: f64,
    pub grouped: Option<GroupedWeights>,
    pub edge_probabilities: Vec<f64>,
    /// (re, im) per directed state, canonical index order.
    pub amplitudes: Vec<(f64, f64)>,
}

pub fn run_simulation(
    family: GraphFamily,
    prongs: usize,
    shared: Option<usize>,
    steps: usize,
) -> Result<SimulationDump> {
    let graph = build_graph_for(family, prongs, shared)?;
    let state = walk::evolve(&graph, &walk::initial_state(&graph), steps)?;
    let reading = walk::measure(&graph, &state)?;
    Ok(SimulationDump {
        family,
        prongs,
        shared,
        steps,
        path_probability: reading.path_probability,
        total_probability: reading.total_probability,
        grouped: reading.grouped,
        edge_probabilities: reading.edge_probabilities,
        amplitudes: state.amplitudes().iter().map(|a| (a.re, a.im)).collect(),
    })
}

/// One point of the ratio-versus-sharing curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioPoint {
    pub shared: usize,
    pub r_plus: f64,
    pub psi2: f64,
    pub psi3: f64,
    pub psi4: f64,
}

/// Measures r_plus at the predicted step for every sharing parameter in
/// the inclusive range, at fixed prong count.
pub fn ratio_curve(prongs: usize, shared_range: (usize, usize)) -> Result<Vec<RatioPoint>> {
    let (lo, hi) = shared_range;
    if lo > hi {
        return Err(Error::invalid(format!("sharing range {lo}:{hi} is empty")));
    }
    let mut points = Vec::with_capacity(hi - lo + 1);
    for m in lo..=hi {
        let report = run_path_experiment(&ExperimentConfig::three_star(prongs, m))?;
        let grouped = report
            .grouped_at_predicted
            .expect("three-star reports carry grouped weights");
        let r_plus = report
            .r_plus
            .ok_or_else(|| Error::numeric("START/END weight vanished at the predicted step"))?;
        points.push(RatioPoint {
            shared: m,
            r_plus,
            psi2: grouped.psi2,
            psi3: grouped.psi3,
            psi4: grouped.psi4,
        });
    }
    Ok(points)
}

/// One configuration's observed optimum inside a scaling fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ScalingPoint {
    pub prongs: usize,
    pub predicted_step: usize,
    pub observed_step: usize,
}

/// Least-squares fit of log(observed step) against log(prongs).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    pub family: GraphFamily,
    pub shared: Option<usize>,
    pub exponent: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: Vec<ScalingPoint>,
}

/// Fits the growth exponent of the observed optimal step across sizes.
pub fn scaling_fit(
    family: GraphFamily,
    prongs_list: &[usize],
    shared: Option<usize>,
) -> Result<ScalingFit> {
    if prongs_list.len() < 2 {
        return Err(Error::InsufficientData {
            reason: format!(
                "scaling fit needs at least 2 sizes, got {}",
                prongs_list.len()
            ),
        });
    }
    let mut points = Vec::with_capacity(prongs_list.len());
    for &prongs in prongs_list {
        let report = run_path_experiment(&ExperimentConfig {
            family,
            prongs,
            shared,
            max_steps: None,
        })?;
        points.push(ScalingPoint {
            prongs,
            predicted_step: report.predicted_step,
            observed_step: report.observed_step,
        });
    }
    let mut optima: Vec<usize> = points.iter().map(|p| p.observed_step).collect();
    optima.sort_unstable();
    optima.dedup();
    if optima.len() < 3 {
        return Err(Error::InsufficientData {
            reason: format!(
                "scaling fit needs at least 3 distinct observed optima, got {}",
                optima.len()
            ),
        });
    }
    if points.iter().any(|p| p.observed_step == 0) {
        return Err(Error::InsufficientData {
            reason: "observed optimum at step 0 cannot enter a log fit".into(),
        });
    }

    let xs: Vec<f64> = points.iter().map(|p| (p.prongs as f64).ln()).collect();
    let ys: Vec<f64> = points
        .iter()
        .map(|p| (p.observed_step as f64).ln())
        .collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData {
            reason: "all sizes identical; slope is undefined".into(),
        });
    }
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (exponent * x + intercept)).powi(2))
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let r_squared = 1.0 - ss_res / ss_tot;
    Ok(ScalingFit {
        family,
        shared,
        exponent,
        intercept,
        r_squared,
        points,
    })
}

/// Parameter grid for a sweep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepConfig {
    pub family: GraphFamily,
    pub prongs_list: Vec<usize>,
    pub shared_list: Vec<usize>,
    /// Worker threads; None uses the global pool. Output bytes do not
    /// depend on this.
    pub jobs: Option<usize>,
}

/// Scalar results of one sweep cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepMetrics {
    pub transmission: f64,
    pub predicted_step: usize,
    pub observed_step: usize,
    pub max_path_probability: f64,
    pub path_probability_at_predicted: f64,
    pub p_plus: Option<f64>,
    pub r_plus: Option<f64>,
}

/// One row of the sweep table; failures keep their cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub stars: usize,
    pub prongs: usize,
    pub shared: Option<usize>,
    pub outcome: std::result::Result<SweepMetrics, String>,
}

/// Runs every (prongs, shared) cell, in parallel when allowed, returning
/// rows sorted by prongs then shared regardless of execution order.
pub fn sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    let mut cells: Vec<(usize, Option<usize>)> = match config.family {
        GraphFamily::TwoStar => {
            if !config.shared_list.is_empty() {
                return Err(Error::invalid("two-star sweeps take no shared list"));
            }
            config.prongs_list.iter().map(|&n| (n, None)).collect()
        }
        GraphFamily::ThreeStar => {
            if config.shared_list.is_empty() {
                return Err(Error::invalid("three-star sweeps need a shared list"));
            }
            config
                .prongs_list
                .iter()
                .flat_map(|&n| config.shared_list.iter().map(move |&m| (n, Some(m))))
                .collect()
        }
    };
    if cells.is_empty() {
        return Err(Error::invalid("sweep has no configurations"));
    }
    cells.sort_unstable();

    let stars = match config.family {
        GraphFamily::TwoStar => 2,
        GraphFamily::ThreeStar => 3,
    };
    let run_cell = |&(prongs, shared): &(usize, Option<usize>)| SweepRow {
        stars,
        prongs,
        shared,
        outcome: run_path_experiment(&ExperimentConfig {
            family: config.family,
            prongs,
            shared,
            max_steps: None,
        })
        .map(|r| SweepMetrics {
            transmission: r.transmission,
            predicted_step: r.predicted_step,
            observed_step: r.observed_step,
            max_path_probability: r.max_path_probability,
            path_probability_at_predicted: r.path_probability_at_predicted,
            p_plus: r.p_plus.map(|p| p.numeric),
            r_plus: r.r_plus,
        })
        .map_err(|e| e.to_string()),
    };
    let rows = match config.jobs {
        Some(jobs) => {
            if jobs == 0 {
                return Err(Error::invalid("worker count must be positive"));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| Error::numeric(format!("thread pool: {e}")))?;
            pool.install(|| cells.par_iter().map(run_cell).collect())
        }
        None => cells.par_iter().map(run_cell).collect(),
    };
    Ok(rows)
}

fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}

fn metadata_lines(command: &str, parameters: &str) -> String {
    let tolerances = tolerances::summary()
        .iter()
        .map(|(name, value)| format!("{name}={value:e}"))
        .collect::<Vec<_>>()
        .join(" ");
    format!(
        "# {}\n# command: {command}\n# parameters: {parameters}\n# tolerances: {tolerances}\n",
        crate::TOOL_VERSION
    )
}

fn join_list(values: &[usize]) -> String {
    values
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

/// Renders sweep rows as CSV: '#' metadata lines, a header, one line per
/// cell, 12 significant digits, '\n' line ends.
pub fn sweep_csv(config: &SweepConfig, rows: &[SweepRow]) -> String {
    let stars = match config.family {
        GraphFamily::TwoStar => 2,
        GraphFamily::ThreeStar => 3,
    };
    let parameters = format!(
        "stars={stars} prongs_list=[{}] shared_list=[{}]",
        join_list(&config.prongs_list),
        join_list(&config.shared_list)
    );
    let mut out = metadata_lines("sweep", &parameters);
    out.push_str(
        "stars,prongs,shared,transmission,predicted_step,observed_step,\
         max_path_probability,path_probability_at_predicted,p_plus,r_plus,error\n",
    );
    for row in rows {
        let shared = row.shared.map(|m| m.to_string()).unwrap_or_default();
        match &row.outcome {
            Ok(m) => {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},\n",
                    row.stars,
                    row.prongs,
                    shared,
                    fmt_float(m.transmission),
                    m.predicted_step,
                    m.observed_step,
                    fmt_float(m.max_path_probability),
                    fmt_float(m.path_probability_at_predicted),
                    m.p_plus.map(fmt_float).unwrap_or_default(),
                    m.r_plus.map(fmt_float).unwrap_or_default(),
                ));
            }
            Err(message) => {
                let clean = message.replace(['\n', '\r', ','], ";");
                out.push_str(&format!(
                    "{},{},{shared},,,,,,,,{clean}\n",
                    row.stars, row.prongs
                ));
            }
        }
    }
    out
}

/// Renders a ratio curve as CSV with the same conventions as `sweep_csv`.
pub fn ratio_csv(prongs: usize, shared_range: (usize, usize), points: &[RatioPoint]) -> String {
    let parameters = format!(
        "prongs={prongs} shared_range={}:{}",
        shared_range.0, shared_range.1
    );
    let mut out = metadata_lines("ratio-curve", &parameters);
    out.push_str("m,r_plus,p_psi2,p_psi3,p_psi4\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            p.shared,
            fmt_float(p.r_plus),
            fmt_float(p.psi2),
            fmt_float(p.psi3),
            fmt_float(p.psi4),
        ));
    }
    out
}

/// Metadata object embedded in every JSON artifact.
pub fn metadata_json(command: &str, parameters: serde_json::Value) -> serde_json::Value {
    let tolerances: serde_json::Map<String, serde_json::Value> = tolerances::summary()
        .iter()
        .map(|&(name, value)| (name.to_string(), serde_json::json!(value)))
        .collect();
    serde_json::json!({
        "tool": crate::TOOL_VERSION,
        "command": command,
        "parameters": parameters,
        "tolerances": tolerances,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_to_even_grid() {
        assert_eq!(round_to_even(9.21), 10);
        assert_eq!(round_to_even(26.9), 26);
        assert_eq!(round_to_even(27.0), 26); // tie goes down
        assert_eq!(round_to_even(2.0), 2);
        assert_eq!(round_to_even(3.0), 2);
        assert_eq!(round_to_even(3.01), 4);
        assert_eq!(round_to_even(0.4), 0);
    }

    #[test]
    fn predicted_steps_match_formulas() {
        let g = build_two_star(100).unwrap();
        assert_eq!(predicted_measurement_step(&g).unwrap(), 10);
        let g3 = build_three_star(1000, 3).unwrap();
        assert_eq!(predicted_measurement_step(&g3).unwrap(), 26);
    }

    #[test]
    fn predicted_step_scales_as_sqrt() {
        let mut last = None;
        for n in [100usize, 400, 1600] {
            let g = build_two_star(n).unwrap();
            let p = predicted_measurement_step(&g).unwrap() as f64;
            if let Some(prev) = last {
                let ratio: f64 = p / prev;
                assert!((1.8..=2.2).contains(&ratio), "ratio {ratio}");
            }
            last = Some(p);
        }
    }

    #[test]
    fn config_validation() {
        let mut c = ExperimentConfig::two_star(100);
        c.max_steps = Some(9);
        assert!(run_path_experiment(&c).is_err());
        c.max_steps = Some(2); // below twice the predicted step (20)
        assert!(run_path_experiment(&c).is_err());
        c.max_steps = Some(40);
        assert!(run_path_experiment(&c).is_ok());
        let mut odd = ExperimentConfig::two_star(100);
        odd.shared = Some(3);
        assert!(run_path_experiment(&odd).is_err());
        let mut missing = ExperimentConfig::three_star(100, 3);
        missing.shared = None;
        assert!(run_path_experiment(&missing).is_err());
    }

    #[test]
    fn two_star_experiment_localizes() {
        let report = run_path_experiment(&ExperimentConfig::two_star(100)).unwrap();
        assert_eq!(report.predicted_step, 10);
        assert_eq!(report.observed_step, 10);
        assert!(report.max_path_probability >= 0.9);
        assert!(report.path_probability_at_predicted >= 0.9);
        assert_eq!(report.series.len(), 11);
        assert!(report.r_plus.is_none() && report.p_plus.is_none());
        for r in &report.series {
            assert!((0.0..=1.0 + 1e-12).contains(&r.path_probability));
        }
    }

    #[test]
    fn three_star_experiment_localizes() {
        let report = run_path_experiment(&ExperimentConfig::three_star(400, 3)).unwrap();
        assert!(
            report.observed_step.abs_diff(report.predicted_step) <= 4,
            "predicted {} observed {}",
            report.predicted_step,
            report.observed_step
        );
        assert!(report.max_path_probability >= 0.97);
        let p = report.p_plus.unwrap();
        assert!((0.9..1.0).contains(&p.numeric));
        assert!(report.r_plus.unwrap() > 0.0);
    }

    #[test]
    fn single_frequency_case_localizes_sharply() {
        let report = run_path_experiment(&ExperimentConfig::three_star(1000, 2)).unwrap();
        assert_eq!(report.observed_step, report.predicted_step);
        assert!(report.max_path_probability >= 0.999);
    }

    #[test]
    fn reports_are_deterministic() {
        let config = ExperimentConfig::three_star(250, 3);
        let a = run_path_experiment(&config).unwrap();
        let b = run_path_experiment(&config).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn localization_improves_with_size() {
        let mut last = 0.0f64;
        for n in [250usize, 500, 1000] {
            let report = run_path_experiment(&ExperimentConfig::three_star(n, 3)).unwrap();
            assert!(
                report.max_path_probability >= last - 0.01,
                "N={n}: {} after {last}",
                report.max_path_probability
            );
            last = report.max_path_probability;
        }
    }

    #[test]
    fn ratio_curve_smoke() {
        let points = ratio_curve(200, (2, 4)).unwrap();
        assert_eq!(points.len(), 3);
        for p in &points {
            assert!(p.r_plus.is_finite() && p.r_plus > 0.0);
            assert!(p.psi2 > 0.0 && p.psi3 > 0.0);
        }
        assert!(ratio_curve(200, (4, 2)).is_err());
    }

    #[test]
    fn scaling_fit_two_star_exponent() {
        let fit = scaling_fit(GraphFamily::TwoStar, &[100, 400, 1600], None).unwrap();
        assert!(
            (fit.exponent - 0.5).abs() < 0.06,
            "exponent {}",
            fit.exponent
        );
        assert!(fit.r_squared > 0.99);
    }

    #[test]
    fn scaling_fit_rejects_degenerate_series() {
        let err = scaling_fit(GraphFamily::TwoStar, &[100, 100, 100], None).unwrap_err();
        assert!(matches!(err, Error::InsufficientData { .. }));
        assert!(scaling_fit(GraphFamily::TwoStar, &[100], None).is_err());
    }

    #[test]
    fn sweep_rows_sorted_with_partial_failures() {
        let config = SweepConfig {
            family: GraphFamily::ThreeStar,
            prongs_list: vec![400, 6],
            shared_list: vec![4, 3],
            jobs: Some(2),
        };
        let rows = sweep(&config).unwrap();
        let keys: Vec<(usize, Option<usize>)> = rows.iter().map(|r| (r.prongs, r.shared)).collect();
        assert_eq!(
            keys,
            vec![(6, Some(3)), (6, Some(4)), (400, Some(3)), (400, Some(4))]
        );
        assert!(rows[0].outcome.is_ok()); // N=6, m=3 is a valid graph
        assert!(rows[1].outcome.is_err()); // N=6, m=4 leaves no middle prong
        assert!(rows[2].outcome.is_ok() && rows[3].outcome.is_ok());
    }

    #[test]
    fn sweep_csv_bytes_do_not_depend_on_parallelism() {
        let base = SweepConfig {
            family: GraphFamily::ThreeStar,
            prongs_list: vec![120, 60],
            shared_list: vec![2, 3],
            jobs: None,
        };
        let serial = SweepConfig {
            jobs: Some(1),
            ..base.clone()
        };
        let a = sweep_csv(&base, &sweep(&base).unwrap());
        let b = sweep_csv(&serial, &sweep(&serial).unwrap());
        assert_eq!(a, b);
        assert!(a.starts_with("# "));
        assert_eq!(a.lines().count(), 4 + 1 + 4); // metadata + header + rows
    }

    #[test]
    fn sweep_validates_lists() {
        assert!(sweep(&SweepConfig {
            family: GraphFamily::TwoStar,
            prongs_list: vec![10],
            shared_list: vec![2],
            jobs: None,
        })
        .is_err());
        assert!(sweep(&SweepConfig {
            family: GraphFamily::ThreeStar,
            prongs_list: vec![10],
            shared_list: vec![],
            jobs: None,
        })
        .is_err());
        assert!(sweep(&SweepConfig {
            family: GraphFamily::TwoStar,
            prongs_list: vec![],
            shared_list: vec![],
            jobs: None,
        })
        .is_err());
    }

    #[test]
    fn simulation_dump_shapes() {
        let dump = run_simulation(GraphFamily::ThreeStar, 10, Some(3), 7).unwrap();
        assert_eq!(dump.edge_probabilities.len(), 30);
        assert_eq!(dump.amplitudes.len(), 60);
        assert!((dump.total_probability - 1.0).abs() < tolerances::PROBABILITY_SUM);
        assert!(dump.grouped.is_some());
        assert!(run_simulation(GraphFamily::TwoStar, 10, Some(3), 2).is_err());
    }
}
