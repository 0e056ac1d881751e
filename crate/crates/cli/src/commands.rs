use std::path::Path;

use serde_json::{json, Value};

use epiq_core::born::{effect_probability, effect_probability_trace, gleason_fit, mixture_check, transition_matrix, Effect};
use epiq_core::density::density_from_prior;
use epiq_core::hilbert::{enumerate_gcs, Tolerances};
use epiq_core::io::model_file::{load_model, model_hash};
use epiq_core::io::report::{complex_matrix_value, complex_vector_value, Table};
use epiq_core::io::{bundled, Report, ReportKind};
use epiq_core::linalg::MatrixNorm;
use epiq_core::measurement::StatisticalModel;
use epiq_core::qubit::{chsh, ChshMode, Direction};
use epiq_core::random::{random_density, random_effect, stream};
use epiq_core::reduction::{admissible_values, orbit_reduce, realized_restriction, reduce_model, WideParameter};
use epiq_core::simulate::{simulate_sequence, PlanStep};
use epiq_core::validate::validate_assumptions;
use epiq_core::{Error, ExperimentModel, HilbertSpace};

use crate::args::*;

/// Why a command did not produce a successful report.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or arguments; exit 2, nothing written.
    Usage(String),
    /// The model or a check failed; exit 1.
    Invalid(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_)
            | Error::UnknownExperiment(_)
            | Error::BadPrior(_)
            | Error::InvalidStatisticalModel(_)
            | Error::NoOrbitSelected
            | Error::Io(_) => Failure::Usage(e.to_string()),
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

/// A finished report; `passed` is false when the report documents a
/// validation failure.
pub struct Outcome {
    pub report: Report,
    pub passed: bool,
}

type Run = Result<Outcome, Failure>;

fn ok(report: Report) -> Run {
    Ok(Outcome { report, passed: true })
}

fn load(source: &ModelSource) -> Result<ExperimentModel, Failure> {
    match (&source.name, &source.model) {
        (_, Some(path)) => Ok(load_model(path)?),
        (Some(name), None) => {
            if bundled_name(name) {
                Ok(bundled(name)?)
            } else if Path::new(name).exists() {
                Ok(load_model(name)?)
            } else {
                Err(Failure::Usage(format!("`{name}` is neither a bundled model nor a file")))
            }
        }
        (None, None) => Err(Failure::Usage("a model is required (bundled name or --model PATH)".into())),
    }
}

fn bundled_name(name: &str) -> bool {
    epiq_core::io::bundled::BUNDLED_NAMES.contains(&name)
}

fn tolerances(source: &ModelSource) -> Result<Tolerances, Failure> {
    let mut tol = Tolerances::default();
    if let Some(x) = source.tolerance {
        if !(x > 0.0 && x.is_finite()) {
            return Err(Failure::Usage(format!("tolerance must be positive, got {x}")));
        }
        tol.structural = x;
    }
    Ok(tol)
}

fn require_seed(seed: Option<u64>, command: &str) -> Result<u64, Failure> {
    seed.ok_or_else(|| Failure::Usage(format!("`{command}` samples at random and needs --seed")))
}

fn stamp(report: &mut Report, model: &ExperimentModel, tol: &Tolerances) {
    report.metadata.model = Some(model.name().to_string());
    report.metadata.model_hash = Some(model_hash(model));
    report.metadata.tolerances = tol.as_map();
}

fn space<'m>(model: &'m ExperimentModel, tol: Tolerances) -> Result<HilbertSpace<'m>, Failure> {
    Ok(HilbertSpace::build(model, tol)?)
}

pub fn validate(args: &ModelOnly) -> Run {
    let model = load(&args.source)?;
    let tol = tolerances(&args.source)?;
    let v = validate_assumptions(&model);
    let mut report = Report::new(ReportKind::Validation);
    stamp(&mut report, &model, &tol);
    report.insert("validation", &v).insert("passed", v.passed());
    report.table(Table {
        name: "assumptions".into(),
        header: ["id", "status", "detail"].map(String::from).to_vec(),
        rows: v
            .assumptions
            .iter()
            .map(|c| vec![json!(c.id), serde_json::to_value(c.status).expect("status"), json!(c.detail)])
            .collect(),
    });
    Ok(Outcome { report, passed: v.passed() })
}

pub fn build(args: &ModelOnly) -> Run {
    let model = load(&args.source)?;
    let tol = tolerances(&args.source)?;
    let space = space(&model, tol)?;
    let w = space.representation();
    let group = model.group();
    let mut report = Report::new(ReportKind::Build);
    stamp(&mut report, &model, &tol);
    report.metadata.realization_mode = Some(space.mode().as_str().into());
    let elements: Vec<Value> = w
        .domain()
        .into_iter()
        .map(|g| {
            let word: Vec<Value> = w
                .word(g)
                .unwrap_or_default()
                .iter()
                .map(|&(a, h)| json!([model.experiment(a).label(), group.name(h)]))
                .collect();
            json!({
                "element": group.name(g),
                "word": word,
                "matrix": complex_matrix_value(w.matrix(g).expect("domain element")),
            })
        })
        .collect();
    report
        .insert("dim", space.dim())
        .insert("group_order", group.order())
        .insert("domain_order", w.domain().len())
        .insert("realization_mode", space.mode().as_str())
        .insert("representation", elements)
        .insert(
            "residuals",
            json!({
                "unitarity": w.unitarity_residual(MatrixNorm::Operator),
                "homomorphism": w.homomorphism_residual(&model, MatrixNorm::Operator),
                "word_consistency": w.consistency_residual(),
                "invariance": w.invariance_residual(),
                "orthonormality": space.orthonormality_residual(),
                "eigen": space.proposition_residual(),
            }),
        );
    report.table(Table {
        name: "representation".into(),
        header: ["element", "word_length"].map(String::from).to_vec(),
        rows: w
            .domain()
            .into_iter()
            .map(|g| vec![json!(group.name(g)), json!(w.word(g).map_or(0, <[_]>::len))])
            .collect(),
    });
    ok(report)
}

pub fn states(args: &ModelOnly) -> Run {
    let model = load(&args.source)?;
    let tol = tolerances(&args.source)?;
    let space = space(&model, tol)?;
    let mut report = Report::new(ReportKind::States);
    stamp(&mut report, &model, &tol);
    report.metadata.realization_mode = Some(space.mode().as_str().into());
    let mut experiments = Vec::new();
    let mut rows = Vec::new();
    for a in 0..space.experiment_count() {
        let t = space.observable(a);
        let states: Vec<Value> = space
            .states(a)
            .iter()
            .map(|s| {
                json!({
                    "value": s.value,
                    "eigenvalue": model.experiment(a).eigenvalues()[s.value_index],
                    "coords": complex_vector_value(s.vector()),
                    "realization_mode": s.mode.as_str(),
                })
            })
            .collect();
        for s in space.states(a) {
            let mut row = vec![json!(s.experiment), json!(s.value)];
            row.extend(s.vector().iter().flat_map(|z| [json!(z.re), json!(z.im)]));
            rows.push(row);
        }
        experiments.push(json!({
            "label": model.experiment(a).label(),
            "states": states,
            "observable": complex_matrix_value(&t.matrix),
            "eigen_residual": t.eigen_residual(space.states(a)),
        }));
    }
    report.insert("dim", space.dim()).insert("experiments", experiments);
    let mut header = vec!["experiment".to_string(), "value".to_string()];
    for i in 0..space.dim() {
        header.push(format!("re{i}"));
        header.push(format!("im{i}"));
    }
    report.table(Table { name: "states".into(), header, rows });
    ok(report)
}

pub fn born(args: &BornArgs) -> Run {
    let model = load(&args.source)?;
    let tol = tolerances(&args.source)?;
    let space = space(&model, tol)?;
    let pairs: Vec<(usize, usize)> = match (&args.from, &args.to) {
        (Some(a), Some(b)) => vec![(model.experiment_index(a)?, model.experiment_index(b)?)],
        _ => {
            let n = model.experiments().len();
            (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect()
        }
    };
    let mut report = Report::new(ReportKind::Born);
    stamp(&mut report, &model, &tol);
    let mut mode = space.representation().mode();
    let mut matrices = Vec::new();
    let mut rows = Vec::new();
    for (a, b) in pairs {
        let p = transition_matrix(&space, a, b);
        mode = mode.combine(p.mode);
        let (ea, eb) = (model.experiment(a), model.experiment(b));
        for (k, row) in p.rows().iter().enumerate() {
            for (i, x) in row.iter().enumerate() {
                rows.push(vec![json!(ea.label()), json!(ea.values()[k]), json!(eb.label()), json!(eb.values()[i]), json!(x)]);
            }
        }
        matrices.push(json!({
            "from": ea.label(),
            "to": eb.label(),
            "from_values": ea.values(),
            "to_values": eb.values(),
            "matrix": p.rows(),
            "row_sum_residual": p.row_sum_residual(),
            "column_sum_residual": p.column_sum_residual(),
            "permutation": p.is_permutation(0.0),
            "realization_mode": p.mode.as_str(),
        }));
    }
    report.metadata.realization_mode = Some(mode.as_str().into());
    if matrices.len() == 1 {
        let m = matrices.pop().expect("one matrix");
        for (k, v) in m.as_object().expect("object") {
            report.insert(k, v);
        }
    } else {
        report.insert("transitions", matrices);
    }
    report.table(Table {
        name: "transitions".into(),
        header: ["from", "from_value", "to", "to_value", "probability"].map(String::from).to_vec(),
        rows,
    });
    ok(report)
}

pub fn simulate(args: &SimulateArgs) -> Run {
    let seed = require_seed(args.seed, "simulate")?;
    let model = load(&args.source)?;
    let tol = tolerances(&args.source)?;
    let space = space(&model, tol)?;
    let from = match &args.from {
        Some(l) => model.experiment_index(l)?,
        None => model.reference(),
    };
    let n = model.experiment(from).value_count();
    let prior = if args.prior.is_empty() { vec![1.0 / n as f64; n] } else { args.prior.clone() };
    let rho = density_from_prior(&space, from, &prior)?;
    let targets: Vec<usize> = if args.to.is_empty() {
        vec![from]
    } else {
        args.to.iter().map(|l| model.experiment_index(l)).collect::<epiq_core::Result<_>>()?
    };
    let plan = targets
        .iter()
        .map(|&b| {
            let stat = if args.noise == 0.0 {
                StatisticalModel::perfect(&model, b)
            } else {
                StatisticalModel::symmetric_noise(&model, b, args.noise)?
            };
            Ok(PlanStep { experiment: b, stat })
        })
        .collect::<epiq_core::Result<Vec<_>>>()?;
    let trace = simulate_sequence(&space, &rho, &plan, args.runs, seed)?;

    let mut report = Report::new(ReportKind::Simulation);
    stamp(&mut report, &model, &tol);
    report.metadata.seed = Some(seed);
    report.metadata.realization_mode = Some(trace.mode.as_str().into());
    let mut rows = Vec::new();
    let steps: Vec<Value> = trace
        .steps
        .iter()
        .enumerate()
        .map(|(t, s)| {
            for (y, o) in s.outcomes.iter().enumerate() {
                rows.push(vec![
                    json!(t),
                    json!(s.experiment),
                    json!(o),
                    json!(s.observation_counts[y]),
                    json!(s.observation_frequencies()[y]),
                    json!(s.predicted_observations[y]),
                ]);
            }
            json!({
                "experiment": s.experiment,
                "values": s.values,
                "outcomes": s.outcomes,
                "value_counts": s.value_counts,
                "value_frequencies": s.value_frequencies(),
                "predicted_values": s.predicted_values,
                "observation_counts": s.observation_counts,
                "observation_frequencies": s.observation_frequencies(),
                "predicted_observations": s.predicted_observations,
                "observation_sigma_deviation": finite_or_null(s.observation_sigma_deviation()),
                "value_sigma_deviation": finite_or_null(s.value_sigma_deviation()),
                "bayes_weights": s.bayes_weights,
                "post_state": complex_matrix_value(s.post_state.matrix()),
            })
        })
        .collect();
    let sample: Vec<Value> = trace
        .sample
        .iter()
        .map(|r| json!({"run": r.run, "values": r.values, "observations": r.observations}))
        .collect();
    report
        .insert("runs", trace.runs)
        .insert("prior", json!({"experiment": model.experiment(from).label(), "weights": prior}))
        .insert("noise", args.noise)
        .insert("initial_state", complex_matrix_value(trace.initial.matrix()))
        .insert("steps", steps)
        .insert("transitions", &trace.transitions)
        .insert("sample", sample);
    report.table(Table {
        name: "observations".into(),
        header: ["step", "experiment", "outcome", "count", "frequency", "predicted"].map(String::from).to_vec(),
        rows,
    });
    ok(report)
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

/// Fit error threshold for `gleason-check` unless `--tolerance` is given.
const GLEASON_TOL: f64 = 1e-8;
const MIXTURE_PAIRS: u64 = 100;

pub fn gleason_check(args: &GleasonArgs) -> Run {
    let seed = require_seed(args.seed, "gleason-check")?;
    let model = load(&args.source)?;
    let tol = Tolerances::default();
    let threshold = match args.source.tolerance {
        Some(x) if x > 0.0 => x,
        Some(x) => return Err(Failure::Usage(format!("tolerance must be positive, got {x}"))),
        None => GLEASON_TOL,
    };
    let space = space(&model, tol)?;
    let d = space.dim();
    let mut trials = Vec::new();
    let mut rows = Vec::new();
    let mut worst_fit = 0.0f64;
    for i in 0..args.runs {
        let mut rng = stream(seed, i);
        let rho = random_density::<f64, _>(d, &mut rng);
        let sample: Vec<(Effect<f64>, f64)> = (0..3 * d * d)
            .map(|_| {
                let e = random_effect(d, &mut rng);
                let p = effect_probability(&rho, &e).expect("matching dimension");
                (e, p)
            })
            .collect();
        let fit = gleason_fit(&sample)?;
        let err = fit.recovered.frobenius_distance(&rho);
        worst_fit = worst_fit.max(err);
        rows.push(vec![json!(i), json!(err), json!(fit.residual), json!(fit.rank)]);
        trials.push(json!({
            "trial": i,
            "frobenius_error": err,
            "residual": fit.residual,
            "rank": fit.rank,
            "sample_size": fit.sample_size,
        }));
    }
    let mut worst_mixture = 0.0f64;
    let mut worst_decomposition = 0.0f64;
    for i in 0..MIXTURE_PAIRS {
        let mut rng = stream(seed, args.runs + i);
        let rho = random_density::<f64, _>(d, &mut rng);
        let e1 = random_effect(d, &mut rng);
        let e2 = random_effect(d, &mut rng);
        worst_mixture = worst_mixture.max(mixture_check(&e1, &e2, &rho)?);
        let p = effect_probability(&rho, &e1)?;
        let other = Effect::from_hermitian(e1.matrix())?;
        worst_decomposition = worst_decomposition
            .max((p - effect_probability(&rho, &other)?).abs())
            .max((p - effect_probability_trace(&rho, &e1)?).abs());
    }
    let passed = worst_fit < threshold && worst_mixture < 1e-10 && worst_decomposition < 1e-10;
    let mut report = Report::new(ReportKind::Gleason);
    stamp(&mut report, &model, &tol);
    report.metadata.tolerances.insert("fit".into(), threshold);
    report.metadata.seed = Some(seed);
    report.metadata.realization_mode = Some(space.mode().as_str().into());
    report
        .insert("dim", d)
        .insert("trials", trials)
        .insert("max_frobenius_error", worst_fit)
        .insert("mixture_pairs", MIXTURE_PAIRS)
        .insert("max_mixture_residual", worst_mixture)
        .insert("max_decomposition_difference", worst_decomposition)
        .insert("passed", passed);
    report.table(Table {
        name: "trials".into(),
        header: ["trial", "frobenius_error", "residual", "rank"].map(String::from).to_vec(),
        rows,
    });
    Ok(Outcome { report, passed })
}

pub fn bell(args: &BellArgs) -> Run {
    let angles: [f64; 4] = args
        .angles
        .as_slice()
        .try_into()
        .map_err(|_| Failure::Usage(format!("--angles needs four values, got {}", args.angles.len())))?;
    if angles.iter().any(|x| !x.is_finite()) {
        return Err(Failure::Usage("angles must be finite".into()));
    }
    let mode = ChshMode::from(args.mode);
    let seed = match mode {
        ChshMode::QuantumAnalytic => args.seed,
        _ => Some(require_seed(args.seed, "bell")?),
    };
    let dirs = angles.map(Direction::from_planar_degrees);
    let r = chsh(dirs, mode, args.runs, seed.unwrap_or(0))?;
    let mut report = Report::new(ReportKind::Bell);
    report.metadata.seed = seed;
    report.insert("angles", angles).insert("result", &r).insert("S", r.s);
    let labels = ["a,b", "a,b'", "a',b", "a',b'"];
    report.table(Table {
        name: "correlations".into(),
        header: ["pair", "correlation", "std_error"].map(String::from).to_vec(),
        rows: (0..4)
            .map(|i| vec![json!(labels[i]), json!(r.correlations[i]), json!(r.std_errors.map(|s| s[i]))])
            .collect(),
    });
    ok(report)
}

pub fn reduce(args: &ReduceArgs) -> Run {
    let model = load(&args.source)?;
    let tol = tolerances(&args.source)?;
    let a = model.experiment_index(&args.from)?;
    let wide = WideParameter::from_experiment(&model, a)?;
    let orbits = wide.range_orbits();
    let group = model.group();
    let mut report = Report::new(ReportKind::Reduce);
    stamp(&mut report, &model, &tol);
    let orbit_labels: Vec<Vec<&str>> =
        orbits.iter().map(|o| o.iter().map(|&v| wide.range()[v].as_str()).collect()).collect();
    report
        .insert("experiment", wide.experiment())
        .insert("range", wide.range())
        .insert("acting_elements", wide.elements().iter().map(|&g| group.name(g)).collect::<Vec<_>>())
        .insert("orbits", &orbit_labels);

    let realized = realized_restriction(&model)?;
    let psi: Vec<String> = realized.psi.iter().map(|&p| realized.total.label(p)).collect();
    let admissible: Vec<Value> = (0..model.experiments().len())
        .map(|b| {
            let vals = admissible_values(&realized.total, &realized.psi, b)?;
            let range = realized.total.factors()[b].range();
            Ok(json!({
                "experiment": model.experiment(b).label(),
                "values": vals.iter().map(|&v| range[v].as_str()).collect::<Vec<_>>(),
            }))
        })
        .collect::<epiq_core::Result<_>>()?;
    report.insert(
        "realized",
        json!({
            "cartesian_size": epiq_core::group::PermutationAction::point_count(&realized.total),
            "tuples": psi,
            "admissible": admissible,
            "natural": realized.naturality.natural,
        }),
    );

    let mut rows: Vec<Vec<Value>> = Vec::new();
    let mut passed = true;
    if !args.orbits.is_empty() {
        let red = orbit_reduce(&wide, &args.orbits)?;
        let natural = red.naturality();
        for (v, m) in red.value_map.iter().enumerate() {
            rows.push(vec![json!(wide.range()[v]), m.map_or(Value::Null, |i| json!(red.labels[i]))]);
        }
        report.insert(
            "reduction",
            json!({
                "selected_orbits": red.selected_orbits,
                "labels": red.labels,
                "natural": natural.natural,
            }),
        );
        match reduce_model(&model, a, &red) {
            Ok(reduced) => {
                // The reduced file has to load as a model of its own.
                reduced.clone().into_model()?;
                if let Some(path) = &args.emit_model {
                    std::fs::write(path, reduced.to_json()).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
                }
                report.insert("reduced_model", serde_json::to_value(&reduced).expect("model file serializes"));
            }
            Err(e @ Error::InvalidModel(_)) => {
                passed = false;
                report.insert("reduced_model", Value::Null).insert("error", e.to_string());
            }
            Err(e) => return Err(e.into()),
        }
        passed &= natural.natural;
    } else {
        for o in &orbit_labels {
            for v in o {
                rows.push(vec![json!(v), json!(o.join("|"))]);
            }
        }
    }
    report.insert("passed", passed);
    report.table(Table { name: "value_map".into(), header: ["value", "reduced"].map(String::from).to_vec(), rows });
    Ok(Outcome { report, passed })
}

pub fn gcs(args: &GcsArgs) -> Run {
    let model = load(&args.source)?;
    let tol = tolerances(&args.source)?;
    let space = space(&model, tol)?;
    let a = match &args.from {
        Some(l) => model.experiment_index(l)?,
        None => model.reference(),
    };
    let k = match &args.value {
        Some(v) => model
            .experiment(a)
            .value_index(v)
            .ok_or_else(|| Failure::Usage(format!("`{v}` is not a value of `{}`", model.experiment(a).label())))?,
        None => 0,
    };
    let seed_state = space.state(a, k);
    let set = enumerate_gcs(&space, seed_state);
    let group = model.group();
    let mut report = Report::new(ReportKind::Gcs);
    stamp(&mut report, &model, &tol);
    report.metadata.realization_mode = Some(space.mode().as_str().into());
    let vectors: Vec<Value> = set
        .vectors
        .iter()
        .map(|(g, v)| json!({"element": group.name(*g), "coords": complex_vector_value(v)}))
        .collect();
    report
        .insert("seed", json!({"experiment": seed_state.experiment, "value": seed_state.value}))
        .insert("domain_order", set.domain_size)
        .insert("distinct_states", set.vectors.len())
        .insert("vectors", vectors)
        .insert("missing", &set.missing)
        .insert("contains_all_states", set.contains_all_states());
    let mut header = vec!["element".to_string()];
    for i in 0..space.dim() {
        header.push(format!("re{i}"));
        header.push(format!("im{i}"));
    }
    report.table(Table {
        name: "gcs".into(),
        header,
        rows: set
            .vectors
            .iter()
            .map(|(g, v)| {
                let mut row = vec![json!(group.name(*g))];
                row.extend(v.iter().flat_map(|z| [json!(z.re), json!(z.im)]));
                row
            })
            .collect(),
    });
    ok(report)
}
