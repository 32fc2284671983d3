//! Closed-form intrinsic volumes and Steiner values of convex shapes.

use std::f64::consts::PI;

use super::shape::{ShapeKind, ShapeSpec};
use crate::steiner::{binomial, unit_ball_volume};
use crate::{Error, Result};

fn check_convex(spec: &ShapeSpec) -> Result<()> {
    spec.validate()?;
    if spec.is_convex() {
        Ok(())
    } else {
        Err(Error::UnsupportedBaseline(spec.kind_name().into()))
    }
}

fn check_radius(name: &str, t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "{name} must be finite and non-negative, got {t}"
        )))
    }
}

/// Elementary symmetric polynomials `e_0..e_n` of `xs`.
fn elementary_symmetric(xs: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; xs.len() + 1];
    e[0] = 1.0;
    for (n, &x) in xs.iter().enumerate() {
        for k in (1..=n + 1).rev() {
            e[k] += e[k - 1] * x;
        }
    }
    e
}

/// Intrinsic volumes `V_0..V_d` of the convex shape itself.
fn intrinsic_volumes_of(spec: &ShapeSpec) -> Vec<f64> {
    let d = spec.dim;
    match &spec.kind {
        ShapeKind::Ball { radius, .. } => (0..=d)
            .map(|i| {
                binomial(d, i) * unit_ball_volume(d) / unit_ball_volume(d - i)
                    * radius.powi(i as i32)
            })
            .collect(),
        ShapeKind::Box { sides, .. } => elementary_symmetric(sides),
        ShapeKind::Segment { length, .. } => {
            let mut v = vec![0.0; d + 1];
            v[0] = 1.0;
            v[1] = *length;
            v
        }
        _ => unreachable!("checked convex"),
    }
}

/// Intrinsic volumes `V_0..V_d` of the offset `X^t` of a convex shape.
///
/// Offsets of convex bodies are convex, and expanding `Vol(X^{t+r})` in `r` gives
/// `ω_i V_{d−i}(X^t) = Σ_{m≥i} ω_m V_{d−m}(X) C(m,i) t^{m−i}`.
pub fn exact_intrinsic_volumes(spec: &ShapeSpec, t: f64) -> Result<Vec<f64>> {
    check_convex(spec)?;
    check_radius("offset", t)?;
    let d = spec.dim;
    let v = intrinsic_volumes_of(spec);
    let mut out = vec![0.0; d + 1];
    for i in 0..=d {
        let s: f64 = (i..=d)
            .map(|m| unit_ball_volume(m) * v[d - m] * binomial(m, i) * t.powi((m - i) as i32))
            .sum();
        out[d - i] = s / unit_ball_volume(i);
    }
    Ok(out)
}

/// `Vol(X^r)` for a convex shape, from direct geometric formulas.
///
/// For convex `X` every `X ∩ B(x, r)` is empty or contractible, so this is also the
/// kinematic integral `∫ χ(X ∩ B(x, r)) dx`.
pub fn exact_steiner_value(spec: &ShapeSpec, r: f64) -> Result<f64> {
    check_convex(spec)?;
    check_radius("radius", r)?;
    let d = spec.dim;
    let ball = |k: i32| unit_ball_volume(k as usize) * r.powi(k);
    Ok(match &spec.kind {
        ShapeKind::Ball { radius, .. } => unit_ball_volume(d) * (radius + r).powi(d as i32),
        ShapeKind::Box { sides, .. } => match d {
            1 => sides[0] + 2.0 * r,
            2 => {
                let (a, b) = (sides[0], sides[1]);
                // Rectangle, four edge strips and four quarter disks.
                a * b + 2.0 * r * (a + b) + PI * r * r
            }
            _ => {
                let (a, b, c) = (sides[0], sides[1], sides[2]);
                // Box, six face slabs, twelve quarter cylinders, eight ball octants.
                a * b * c + 2.0 * r * (a * b + b * c + c * a) + PI * r * r * (a + b + c) + ball(3)
            }
        },
        ShapeKind::Segment { length, .. } => match d {
            1 => length + 2.0 * r,
            // Stadium and capsule.
            2 => 2.0 * r * length + ball(2),
            _ => PI * r * r * length + ball(3),
        },
        _ => unreachable!("checked convex"),
    })
}
