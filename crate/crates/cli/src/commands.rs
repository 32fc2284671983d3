use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use persivol::cubical::{random_pair_complex, ComplexBuilder, FilteredPairComplex};
use persivol::geometry::{exact_intrinsic_volumes, exact_steiner_value, ShapeSpec};
use persivol::montecarlo::{Estimator, EstimatorConfig, VolumeEstimate};
use persivol::persistence::{diagram_from_ranks, image_persistence, ORACLE_CELL_LIMIT};
use persivol::{Error, VERSION};
use serde::Serialize;
use serde_json::Value;

use crate::spec::ExperimentSpec;
use crate::{BaselineArgs, EstimateArgs, Failure, OracleArgs, Overrides, SweepArgs};

type CmdResult = Result<(), Failure>;

/// Loads the config (a spec, or a report embedding one) and applies flag overrides.
fn resolve(o: &Overrides) -> Result<ExperimentSpec, Failure> {
    let text = std::fs::read_to_string(&o.config)
        .map_err(|e| Failure::Config(format!("cannot read config {}: {e}", o.config.display())))?;
    let mut value: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::Config(format!("invalid JSON in {}: {e}", o.config.display())))?;
    if value.get("estimate").is_some() {
        if let Some(embedded) = value.get_mut("spec") {
            value = embedded.take();
        }
    }
    let mut spec: ExperimentSpec = serde_json::from_value(value)
        .map_err(|e| Failure::Config(format!("invalid config {}: {e}", o.config.display())))?;
    let est = &mut spec.estimator;
    if let Some(v) = o.seed {
        est.seed = v;
    }
    if let Some(v) = o.epsilon {
        est.epsilon = v;
    }
    if let Some(v) = o.grid_spacing {
        est.grid_spacing = v;
    }
    if let Some(v) = o.samples {
        est.mc_samples = v;
    }
    if let Some(v) = o.r_max {
        est.r_max = v;
    }
    if let Some(v) = o.sample_size {
        spec.sample_size = v;
    }
    spec.validate()?;
    Ok(spec)
}

fn check_output(path: &Path) -> CmdResult {
    let parent = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    if !parent.is_dir() {
        return Err(Failure::Config(format!(
            "output directory {} does not exist",
            parent.display()
        )));
    }
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CmdResult {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(Error::from)?;
    writeln!(w).and_then(|_| w.flush()).map_err(Error::from)?;
    Ok(())
}

/// Truth `V_i(X^{2ε})` for convex shapes.
fn truth_for(shape: &ShapeSpec, epsilon: f64) -> Result<Option<Vec<f64>>, Failure> {
    if !shape.is_convex() {
        return Ok(None);
    }
    Ok(Some(exact_intrinsic_volumes(shape, 2.0 * epsilon)?))
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct EstimateReport<'a> {
    spec_version: u32,
    version: &'static str,
    spec: &'a ExperimentSpec,
    estimate: &'a VolumeEstimate,
    #[serde(skip_serializing_if = "Option::is_none")]
    truth: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    abs_error: Option<Vec<f64>>,
}

pub fn estimate(a: &EstimateArgs) -> CmdResult {
    let spec = resolve(&a.common)?;
    check_output(&a.out)?;
    if let Some(t) = &a.trace {
        check_output(t)?;
    }
    let clean = spec.clean_cloud()?;
    let cloud = spec.noisy_cloud(&clean, spec.estimator.epsilon)?;
    let run = Estimator::new(&cloud, &spec.estimator)?.run(a.common.workers)?;
    let estimate = run.volume_estimate()?;
    let truth = truth_for(&spec.shape, spec.estimator.epsilon)?;
    let abs_error = truth.as_ref().map(|t| {
        t.iter()
            .zip(&estimate.values)
            .map(|(t, v)| (v - t).abs())
            .collect()
    });
    let report = EstimateReport {
        spec_version: crate::spec::SPEC_VERSION,
        version: VERSION,
        spec: &spec,
        estimate: &estimate,
        truth,
        abs_error,
    };
    write_json(&a.out, &report)?;
    if let Some(t) = &a.trace {
        run.write_trace(create(t)?)?;
    }
    for w in &estimate.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}

/// Least-squares slope of `ln y` against `ln x`; `None` if any `y` is zero.
fn log_log_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if ys.iter().any(|y| !(*y > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

pub fn sweep(a: &SweepArgs) -> CmdResult {
    let spec = resolve(&a.common)?;
    let eps = a.eps.clone().unwrap_or_else(|| spec.epsilons.clone());
    if eps.len() < 3 {
        return Err(Failure::Config(format!(
            "a sweep needs at least 3 noise levels, got {}",
            eps.len()
        )));
    }
    if let Some(e) = eps.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
        return Err(Failure::Config(format!(
            "noise levels must be positive, got {e}"
        )));
    }
    check_output(&a.out)?;
    let d = spec.estimator.dim;
    let convex = spec.shape.is_convex();
    let clean = spec.clean_cloud()?;

    let mut header = vec!["epsilon".to_string()];
    let cols = |name: &'static str| (0..=d).map(move |i| format!("{name}{i}"));
    header.extend(cols("v"));
    header.extend(cols("stderr"));
    if convex {
        header.extend(cols("truth"));
        header.extend(cols("abs_error"));
    }
    header.extend(cols("bound"));

    let mut rows = Vec::new();
    let mut errors: Vec<Vec<f64>> = vec![Vec::new(); d + 1];
    for &e in &eps {
        let config = EstimatorConfig {
            epsilon: e,
            ..spec.estimator.clone()
        };
        let cloud = spec.noisy_cloud(&clean, e)?;
        let est = Estimator::new(&cloud, &config)?
            .run(a.common.workers)?
            .volume_estimate()?;
        let mut row = vec![e.to_string()];
        row.extend(est.values.iter().map(f64::to_string));
        row.extend(est.stderr.iter().map(|s| {
            if s.is_finite() {
                s.to_string()
            } else {
                "inf".into()
            }
        }));
        if let Some(truth) = truth_for(&spec.shape, e)? {
            row.extend(truth.iter().map(f64::to_string));
            for i in 0..=d {
                let err = (est.values[i] - truth[i]).abs();
                errors[i].push(err);
                row.push(err.to_string());
            }
        }
        match &est.theoretical_bound {
            Some(b) => row.extend(b.iter().map(f64::to_string)),
            None => row.extend((0..=d).map(|_| String::new())),
        }
        rows.push(row);
    }
    if convex {
        let mut row = vec!["slope".to_string()];
        row.extend((0..3 * (d + 1)).map(|_| String::new()));
        row.extend(
            errors
                .iter()
                .map(|e| log_log_slope(&eps, e).map_or(String::new(), |s| s.to_string())),
        );
        row.extend((0..=d).map(|_| String::new()));
        rows.push(row);
    }

    let mut w = csv::Writer::from_writer(create(&a.out)?);
    w.write_record(&header).map_err(Error::from)?;
    for r in &rows {
        w.write_record(r).map_err(Error::from)?;
    }
    w.flush().map_err(Error::from)?;
    Ok(())
}

/// Two vertices of `A` joined by an edge of `B \ A`: bars `(0, 0, ∞)` and `(0, 1, 2)`.
fn hand_fixture() -> FilteredPairComplex {
    let mut b = ComplexBuilder::new(1);
    let u = b.cell(0, &[], true, true, 0.0);
    let v = b.cell(0, &[], true, true, 1.0);
    b.cell(1, &[u, v], false, true, 2.0);
    b.build()
}

fn compare(c: &FilteredPairComplex, label: &str) -> CmdResult {
    let fast = image_persistence(c)?;
    let oracle = diagram_from_ranks(c)?;
    if fast.same_bars(&oracle) {
        return Ok(());
    }
    Err(Failure::Check(format!(
        "mismatch on {label}\ncomplex:\n{}reduction:\n{}oracle:\n{}",
        c.dump(),
        fast.sorted().to_text(),
        oracle.sorted().to_text()
    )))
}

pub fn oracle_check(a: &OracleArgs) -> CmdResult {
    if a.max_cells > ORACLE_CELL_LIMIT {
        return Err(Failure::Config(format!(
            "--max-cells {} exceeds the oracle limit of {ORACLE_CELL_LIMIT}",
            a.max_cells
        )));
    }
    if a.count == 0 || a.max_cells == 0 {
        return Err(Failure::Config(
            "--count and --max-cells must be positive".into(),
        ));
    }
    if a.dim == 0 || a.dim > persivol::geometry::MAX_DIM {
        return Err(Failure::Config(format!(
            "--dim must be in 1..={}",
            persivol::geometry::MAX_DIM
        )));
    }
    compare(&hand_fixture(), "the two-vertex fixture")?;
    let mut cells = 0;
    for i in 0..a.count as u64 {
        let seed = a.seed.wrapping_add(i);
        let c = random_pair_complex(a.max_cells, a.dim, seed)?;
        cells += c.len();
        compare(&c, &format!("random complex with seed {seed}"))?;
    }
    println!(
        "PASS: {} random complexes ({cells} cells) and the fixture agree with the rank oracle",
        a.count
    );
    Ok(())
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct SteinerPoint {
    r: f64,
    value: f64,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct BaselineReport {
    version: &'static str,
    shape: ShapeSpec,
    offset: f64,
    intrinsic_volumes: Vec<f64>,
    steiner: Vec<SteinerPoint>,
}

fn baseline_shape(a: &BaselineArgs) -> Result<ShapeSpec, Failure> {
    let need = |v: Option<f64>, flag: &str| {
        v.ok_or_else(|| Failure::Config(format!("--shape {} needs --{flag}", a.shape)))
    };
    let shape = match a.shape.as_str() {
        "ball" => ShapeSpec::ball(a.dim, need(a.radius, "radius")?),
        "box" => {
            let sides = a
                .sides
                .clone()
                .ok_or_else(|| Failure::Config("--shape box needs --sides".into()))?;
            if sides.len() != a.dim {
                return Err(Failure::Config(format!(
                    "--sides has {} entries for dim {}",
                    sides.len(),
                    a.dim
                )));
            }
            ShapeSpec::cuboid(sides)
        }
        "segment" => ShapeSpec::segment(a.dim, need(a.length, "length")?),
        other => {
            return Err(Failure::Config(format!(
                "no closed-form baseline for shape `{other}`"
            )))
        }
    };
    shape.validate()?;
    Ok(shape)
}

pub fn baseline(a: &BaselineArgs) -> CmdResult {
    let shape = baseline_shape(a)?;
    if !(a.offset >= 0.0 && a.offset.is_finite()) {
        return Err(Failure::Config(format!(
            "--offset must be non-negative, got {}",
            a.offset
        )));
    }
    if let Some(r) = a.r.iter().find(|r| !(**r >= 0.0 && r.is_finite())) {
        return Err(Failure::Config(format!(
            "radii must be non-negative, got {r}"
        )));
    }
    let report = BaselineReport {
        version: VERSION,
        intrinsic_volumes: exact_intrinsic_volumes(&shape, a.offset)?,
        steiner: a
            .r
            .iter()
            .map(|&r| {
                Ok(SteinerPoint {
                    r,
                    value: exact_steiner_value(&shape, a.offset + r)?,
                })
            })
            .collect::<Result<_, Error>>()?,
        shape,
        offset: a.offset,
    };
    match &a.out {
        Some(path) => {
            check_output(path)?;
            write_json(path, &report)
        }
        None => {
            println!(
                "{}",
                serde_json::to_string_pretty(&report).map_err(Error::from)?
            );
            Ok(())
        }
    }
}
