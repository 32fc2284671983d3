//! Acceptance checks A1–A8. Prints one PASS/FAIL line per criterion. With
//! `ACCEPTANCE_STRICT=1` the process also exits non-zero when any criterion fails.

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use persivol::cubical::{build_pair_complex, random_pair_complex};
use persivol::geometry::{
    distance_field, exact_intrinsic_volumes, exact_steiner_value, generate_shape,
    perturb_hausdorff, point_distance_field, GridGeometry, PointCloud, ShapeSpec,
};
use persivol::montecarlo::{Estimator, EstimatorConfig, VolumeEstimate};
use persivol::persistence::{
    bottleneck_distance, count_bars, diagram_from_ranks, image_persistence, ordinary_persistence,
    Bar, PersistenceDiagram,
};
use persivol::steiner::{
    error_constant, legendre_basis, project_and_extract, unit_ball_volume, PolynomialR,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(id: &str, name: &str, o: &Outcome, failures: &mut Vec<String>) {
    println!(
        "{id} {} {name}: {}",
        if o.pass { "PASS" } else { "FAIL" },
        o.detail
    );
    if !o.pass {
        failures.push(id.to_string());
    }
}

fn a1_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut mismatches = Vec::new();
    let mut cells = 0;
    for seed in 0..50 {
        let c = random_pair_complex(100, 2, seed).unwrap();
        cells += c.len();
        let fast = image_persistence(&c).unwrap();
        let oracle = diagram_from_ranks(&c).unwrap();
        if !fast.same_bars(&oracle) {
            mismatches.push(seed);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        pass: mismatches.is_empty() && secs < 30.0,
        detail: format!("50 complexes ({cells} cells), mismatching seeds {mismatches:?}, {secs:.2} s (limit 30 s)"),
    }
}

/// The noisy disk of A2/A5/A8, seeds fixed up front.
fn noisy_disk() -> PointCloud {
    let x = generate_shape(&ShapeSpec::ball(2, 1.0), 4000, 1).unwrap();
    perturb_hausdorff(&x, 0.02, 2).unwrap()
}

fn disk_config() -> EstimatorConfig {
    EstimatorConfig::new(0.02, 0.01, 5000, 3, 2)
}

fn disk_estimate(cloud: &PointCloud, workers: usize) -> VolumeEstimate {
    Estimator::new(cloud, &disk_config())
        .unwrap()
        .run(Some(workers))
        .unwrap()
        .volume_estimate()
        .unwrap()
}

/// True if `[v − 3·se, v + 3·se]` meets `[truth·(1 − tol), truth·(1 + tol)]`.
fn bracket(v: f64, se: f64, truth: f64, tol: f64) -> bool {
    v + 3.0 * se >= truth * (1.0 - tol) && v - 3.0 * se <= truth * (1.0 + tol)
}

fn a2_disk(e: &VolumeEstimate, secs: f64) -> Outcome {
    let truth = exact_intrinsic_volumes(&ShapeSpec::ball(2, 1.0), 0.04).unwrap();
    let (v, se) = (&e.values, &e.stderr);
    let ok0 = (v[0] - 1.0).abs() <= 0.15;
    let ok1 = bracket(v[1], se[1], truth[1], 0.05);
    let ok2 = bracket(v[2], se[2], truth[2], 0.05);
    Outcome {
        pass: ok0 && ok1 && ok2 && secs <= 600.0,
        detail: format!(
            "V = [{:.4}, {:.4}, {:.4}] ± [{:.4}, {:.4}, {:.4}], truth [{:.4}, {:.4}, {:.4}]; \
             |V0−1| = {:.4} (≤ 0.15: {ok0}), V1 bracket {ok1}, V2 bracket {ok2}; {secs:.1} s",
            v[0],
            v[1],
            v[2],
            se[0],
            se[1],
            se[2],
            truth[0],
            truth[1],
            truth[2],
            (v[0] - 1.0).abs()
        ),
    }
}

fn noisy_square(eps: f64, n: usize) -> PointCloud {
    let x = generate_shape(&ShapeSpec::cuboid(vec![1.0, 1.0]), n, 11).unwrap();
    perturb_hausdorff(&x, eps, 12).unwrap()
}

fn a3_linear_rate() -> Outcome {
    let square = ShapeSpec::cuboid(vec![1.0, 1.0]);
    let mut errors = Vec::new();
    let mut floors = Vec::new();
    let mut rows = Vec::new();
    let eps_list = [0.04, 0.02, 0.01];
    for &eps in &eps_list {
        let h = eps / 2.0;
        let cloud = noisy_square(eps, 20_000);
        let mut cfg = EstimatorConfig::new(eps, h, 2000, 13, 2);
        cfg.r_max = 0.5;
        let e = Estimator::new(&cloud, &cfg)
            .unwrap()
            .run(None)
            .unwrap()
            .volume_estimate()
            .unwrap();
        let truth = exact_intrinsic_volumes(&square, 2.0 * eps).unwrap()[1];
        let err = (e.values[1] - truth).abs();
        let floor = 3.0 * e.stderr[1] + 10.0 * h;
        rows.push(format!(
            "ε={eps}: V1 {:.4} ± {:.4} vs {truth:.4}, |err| {err:.4}, floor {floor:.4}",
            e.values[1], e.stderr[1]
        ));
        errors.push(err);
        floors.push(floor);
    }
    let xs: Vec<f64> = eps_list.iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.max(1e-300).ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 3.0, ys.iter().sum::<f64>() / 3.0);
    let slope = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum::<f64>()
        / xs.iter().map(|x| (x - mx) * (x - mx)).sum::<f64>();
    let slope_ok = (0.7..=1.3).contains(&slope);
    let below_floor = errors.iter().zip(&floors).all(|(e, f)| e < f);
    Outcome {
        pass: slope_ok || below_floor,
        detail: format!(
            "{}; slope {slope:.3} (in [0.7, 1.3]: {slope_ok}), all below noise floor: {below_floor}",
            rows.join("; ")
        ),
    }
}

fn a4_kinematic() -> Outcome {
    let (eps, h) = (0.02, 0.01);
    let square = ShapeSpec::cuboid(vec![1.0, 1.0]);
    let cloud = noisy_square(eps, 20_000);
    let cfg = EstimatorConfig::new(eps, h, 2000, 14, 2);
    let run = Estimator::new(&cloud, &cfg).unwrap().run(None).unwrap();
    let probes = run.probe(&[0.0, 0.5, 1.0]).unwrap();
    let mut pass = true;
    let mut rows = Vec::new();
    for p in &probes {
        let truth = exact_steiner_value(&square, 2.0 * eps + p.r).unwrap();
        let tol = 3.0 * p.stderr + 10.0 * h;
        let ok = (p.value - truth).abs() <= tol;
        pass &= ok;
        rows.push(format!(
            "r={}: {:.4} ± {:.4} vs {truth:.4} (tol {tol:.4}) {ok}",
            p.r, p.value, p.stderr
        ));
    }
    Outcome {
        pass,
        detail: rows.join("; "),
    }
}

fn a5_stability(cloud: &PointCloud) -> Outcome {
    let (eps, h) = (0.02, 0.01);
    let (lo, hi) = cloud.bounding_box();
    let margin = 3.0 * eps + 2.0 * h;
    let geometry = GridGeometry::covering(&lo, &hi, margin, h).unwrap();
    let dy = distance_field(cloud, &geometry, margin).unwrap();
    let limit = 2.0 * eps + 2.0 * h * 2f64.sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let x = [rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5)];
        let dx = point_distance_field(&x, &geometry).unwrap();
        let diagram = image_persistence(&build_pair_complex(&dy, &dx, eps).unwrap()).unwrap();
        let birth = ((x[0] * x[0] + x[1] * x[1]).sqrt() - 1.0 - 2.0 * eps).max(0.0);
        let analytic = PersistenceDiagram::new(vec![Bar::infinite(0, birth)]);
        worst = worst.max(bottleneck_distance(&diagram, &analytic));
    }
    Outcome {
        pass: worst <= limit,
        detail: format!("max bottleneck over 20 points {worst:.5} (limit {limit:.5})"),
    }
}

fn a6_injection() -> Outcome {
    let mut violations = 0;
    let mut windows = 0;
    for seed in 0..200 {
        let c = random_pair_complex(100, 2, 1_000 + seed).unwrap();
        let image = image_persistence(&c).unwrap();
        let ordinary = ordinary_persistence(&c).unwrap();
        let mut values = c.values().to_vec();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for (i, &a) in values.iter().enumerate() {
            for &b in &values[i + 1..] {
                windows += 1;
                if count_bars(&image, a, b).unwrap() > count_bars(&ordinary, a, b).unwrap() {
                    violations += 1;
                }
            }
        }
    }
    Outcome {
        pass: violations == 0,
        detail: format!("{violations} violations over {windows} windows on 200 complexes"),
    }
}

fn binomial(n: u64, k: u64) -> BigInt {
    (0..k).fold(BigInt::from(1), |acc, i| {
        acc * BigInt::from(n - i) / BigInt::from(i + 1)
    })
}

fn a7_numerics() -> Outcome {
    let mut worst_ortho: f64 = 0.0;
    let mut worst_proj: f64 = 0.0;
    let mut constant_mismatch = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for d in 1..=3 {
        for r in [0.5, 1.0, 2.0] {
            let basis = legendre_basis(d, r).unwrap();
            for (j, p) in basis.iter().enumerate() {
                for (k, q) in basis.iter().enumerate() {
                    let ip = p.mul(q).integrate(0.0, r);
                    worst_ortho = worst_ortho.max((ip - f64::from(u8::from(j == k))).abs());
                }
            }
            for _ in 0..50 {
                let coeffs: Vec<f64> = (0..=d).map(|_| rng.random_range(-5.0..5.0)).collect();
                let poly = PolynomialR::new(coeffs.clone());
                let a: Vec<f64> = basis
                    .iter()
                    .map(|p| p.mul(&poly).integrate(0.0, r))
                    .collect();
                let v = project_and_extract(&a, r, d).unwrap();
                // V_{d−i} = m_i / ω_i.
                for i in 0..=d {
                    let m = v[d - i] * unit_ball_volume(i);
                    let rel = (m - coeffs[i]).abs()
                        / coeffs.iter().map(|c| c.abs()).fold(1e-300, f64::max);
                    worst_proj = worst_proj.max(rel);
                }
            }
        }
    }
    for d in 1..=6u64 {
        for i in 0..=d {
            let mut s = BigRational::from_integer(BigInt::from(0));
            for j in i..=d {
                s += BigRational::from_integer(
                    BigInt::from(2 * j + 1) * binomial(j, i) * binomial(i + j, i),
                );
            }
            let sum: f64 = s.to_integer().to_string().parse().unwrap();
            let exact = 4.0 * sum / unit_ball_volume((d - i) as usize);
            if error_constant(i as usize, d as usize).unwrap() != exact {
                constant_mismatch.push((i, d));
            }
        }
    }
    Outcome {
        pass: worst_ortho <= 1e-10 && worst_proj <= 1e-10 && constant_mismatch.is_empty(),
        detail: format!(
            "orthonormality error {worst_ortho:.2e}, projection relative error {worst_proj:.2e}, \
             P(i,d) mismatches {constant_mismatch:?}"
        ),
    }
}

fn a8_determinism(cloud: &PointCloud, reference: &str) -> Outcome {
    let mut same = Vec::new();
    for workers in [4, 8] {
        let json = serde_json::to_string(&disk_estimate(cloud, workers)).unwrap();
        same.push((workers, json == reference));
    }
    Outcome {
        pass: same.iter().all(|s| s.1),
        detail: format!(
            "workers 1 vs {:?}: byte-identical {:?}",
            [4, 8],
            same.iter().map(|s| s.1).collect::<Vec<_>>()
        ),
    }
}

fn main() {
    let mut failures = Vec::new();
    report(
        "A1",
        "oracle equivalence",
        &a1_oracle_equivalence(),
        &mut failures,
    );

    let disk = noisy_disk();
    let start = Instant::now();
    let estimate = disk_estimate(&disk, 1);
    let a2 = a2_disk(&estimate, start.elapsed().as_secs_f64());
    report("A2", "convex disk estimation", &a2, &mut failures);

    report("A3", "linear rate", &a3_linear_rate(), &mut failures);
    report("A4", "kinematic formula", &a4_kinematic(), &mut failures);
    report("A5", "stability", &a5_stability(&disk), &mut failures);
    report("A6", "bar injection", &a6_injection(), &mut failures);
    report("A7", "numerics", &a7_numerics(), &mut failures);

    let reference = serde_json::to_string(&estimate).unwrap();
    report(
        "A8",
        "determinism",
        &a8_determinism(&disk, &reference),
        &mut failures,
    );

    if failures.is_empty() {
        println!("acceptance: all criteria pass");
    } else {
        println!("acceptance: failing {failures:?}");
        if std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
            std::process::exit(1);
        }
    }
}
