//! From χ profiles to persistent intrinsic volumes.
//!
//! The persistent Steiner function `Q(r) = ∫ χ(D^x(r)) dx` is projected onto polynomials
//! of degree ≤ d in `L²([0, R])` using the orthonormal basis `P^R_j`. Reading the
//! monomial coefficient `m_i` of that projection gives `V_{d−i} = m_i / ω_i`, the same
//! correspondence as in the Steiner formula `Vol(X^r) = Σ_i ω_i V_{d−i}(X) r^i`.

mod polynomial;
mod profile;

pub use polynomial::PolynomialR;
pub use profile::{chi_profile, integrate_chi_poly, ChiProfile};

use crate::{Error, Result};

/// Highest degree accepted by [`legendre_basis`].
pub const MAX_LEGENDRE_DEGREE: usize = 10;

/// `C(n, k)` as an exact integer.
pub fn binomial_u128(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

pub fn binomial(n: usize, k: usize) -> f64 {
    binomial_u128(n, k) as f64
}

/// Volume `ω_i` of the unit ball in `R^i`, via `ω_i = ω_{i−2} · 2π / i`.
pub fn unit_ball_volume(i: usize) -> f64 {
    match i {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(i - 2) * 2.0 * std::f64::consts::PI / i as f64,
    }
}

/// Signed integer coefficient of `x^i` in the shifted Legendre polynomial `L_j` on [0, 1]:
/// `(−1)^{i+j} C(j, i) C(i+j, i)`.
pub fn shifted_legendre_coefficient(j: usize, i: usize) -> i128 {
    let magnitude = (binomial_u128(j, i) * binomial_u128(i + j, i)) as i128;
    if (i + j) % 2 == 0 {
        magnitude
    } else {
        -magnitude
    }
}

/// Orthonormal basis `P^R_0..P^R_d` of polynomials of degree ≤ d in `L²([0, R])`,
/// `P^R_j(r) = √((2j+1)/R) · L_j(r/R)`.
///
/// Integer coefficients are formed exactly and converted to floating point once.
pub fn legendre_basis(d: usize, r_max: f64) -> Result<Vec<PolynomialR>> {
    if d > MAX_LEGENDRE_DEGREE {
        return Err(Error::Argument(format!(
            "Legendre degree {d} exceeds the supported maximum {MAX_LEGENDRE_DEGREE}"
        )));
    }
    if !(r_max.is_finite() && r_max > 0.0) {
        return Err(Error::Argument(format!("R must be positive, got {r_max}")));
    }
    Ok((0..=d)
        .map(|j| {
            let norm = ((2 * j + 1) as f64 / r_max).sqrt();
            let coeffs = (0..=d)
                .map(|i| {
                    if i > j {
                        0.0
                    } else {
                        norm * shifted_legendre_coefficient(j, i) as f64 / r_max.powi(i as i32)
                    }
                })
                .collect();
            PolynomialR::new(coeffs)
        })
        .collect())
}

/// The linear map `(a_0..a_d) ↦ (V_0..V_d)`; row `k` gives `V_k`.
pub fn extraction_matrix(r_max: f64, d: usize) -> Result<Vec<Vec<f64>>> {
    let basis = legendre_basis(d, r_max)?;
    Ok((0..=d)
        .map(|k| {
            let i = d - k;
            basis
                .iter()
                .map(|p| p.coeffs[i] / unit_ball_volume(i))
                .collect()
        })
        .collect())
}

/// Projection `Σ_j a_j P^R_j` of a function with inner products `a_j = ⟨Q, P^R_j⟩`.
pub fn projection(inner_products: &[f64], r_max: f64) -> Result<PolynomialR> {
    let d = inner_products
        .len()
        .checked_sub(1)
        .ok_or_else(|| Error::Argument("no inner products".into()))?;
    let basis = legendre_basis(d, r_max)?;
    let mut out = PolynomialR::zero(d + 1);
    for (a, p) in inner_products.iter().zip(&basis) {
        out.add_scaled(p, *a);
    }
    Ok(out)
}

/// Persistent intrinsic volumes `V_0..V_d` from the Legendre inner products `a_0..a_d`.
pub fn project_and_extract(inner_products: &[f64], r_max: f64, d: usize) -> Result<Vec<f64>> {
    if inner_products.len() != d + 1 {
        return Err(Error::Argument(format!(
            "expected {} inner products, got {}",
            d + 1,
            inner_products.len()
        )));
    }
    let m = projection(inner_products, r_max)?;
    Ok((0..=d)
        .map(|k| m.coeffs[d - k] / unit_ball_volume(d - k))
        .collect())
}

/// The integer sum `Σ_{j=i}^d (2j+1) C(j,i) C(i+j,i)`.
pub fn error_constant_sum(i: usize, d: usize) -> Result<u128> {
    if i > d {
        return Err(Error::Argument(format!("index {i} out of range 0..={d}")));
    }
    Ok((i..=d)
        .map(|j| (2 * j + 1) as u128 * binomial_u128(j, i) * binomial_u128(i + j, i))
        .sum())
}

/// `P(i, d) = (4 / ω_{d−i}) Σ_{j=i}^d (2j+1) C(j,i) C(i+j,i)`.
pub fn error_constant(i: usize, d: usize) -> Result<f64> {
    Ok(4.0 * error_constant_sum(i, d)? as f64 / unit_ball_volume(d - i))
}

/// `ε · P(i,d) / (μ R^{i+1}) · (volume_term + mass_term)`.
///
/// `volume_term` and `mass_term` stand for `Vol(X^{2ε})` and the R-curvature mass of
/// `X^{2ε}`; both are supplied by the caller.
pub fn theoretical_bound(
    i: usize,
    d: usize,
    epsilon: f64,
    mu: f64,
    r_max: f64,
    volume_term: f64,
    mass_term: f64,
) -> Result<f64> {
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::Argument(format!("μ must lie in (0, 1], got {mu}")));
    }
    if !(r_max.is_finite() && r_max > 0.0) {
        return Err(Error::Argument(format!("R must be positive, got {r_max}")));
    }
    if !(epsilon >= 0.0) {
        return Err(Error::Argument(format!(
            "ε must be non-negative, got {epsilon}"
        )));
    }
    Ok(
        epsilon * error_constant(i, d)? / (mu * r_max.powi(i as i32 + 1))
            * (volume_term + mass_term),
    )
}

/// Bound on `|V_k − V_k(X^{2ε})|` for the volumes as returned by [`project_and_extract`].
///
/// `V_k` is built from the monomial coefficient of index `i = d − k` divided by `ω_i`,
/// while `P(i, d)` carries `1/ω_{d−i}`; the factor `ω_{d−i}/ω_i` converts between them.
pub fn volume_bound(
    k: usize,
    d: usize,
    epsilon: f64,
    mu: f64,
    r_max: f64,
    volume_term: f64,
    mass_term: f64,
) -> Result<f64> {
    if k > d {
        return Err(Error::Argument(format!("index {k} out of range 0..={d}")));
    }
    let i = d - k;
    Ok(
        theoretical_bound(i, d, epsilon, mu, r_max, volume_term, mass_term)? * unit_ball_volume(k)
            / unit_ball_volume(i),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn ball_volumes() {
        assert_eq!(unit_ball_volume(0), 1.0);
        assert_eq!(unit_ball_volume(1), 2.0);
        assert_eq!(unit_ball_volume(2), PI);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-15);
        assert!((unit_ball_volume(4) - PI * PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn low_degree_basis() {
        let b = legendre_basis(1, 1.0).unwrap();
        assert_eq!(b[0].coeffs, vec![1.0, 0.0]);
        let s3 = 3f64.sqrt();
        assert!((b[1].coeffs[0] + s3).abs() < 1e-15 && (b[1].coeffs[1] - 2.0 * s3).abs() < 1e-15);
        assert!(legendre_basis(11, 1.0).is_err());
    }

    #[test]
    fn coefficient_magnitudes() {
        for r in [0.5, 1.0, 2.0] {
            let b = legendre_basis(5, r).unwrap();
            for j in 0..=5 {
                for i in 0..=j {
                    let expect = r.powf(-(i as f64 + 0.5))
                        * ((2 * j + 1) as f64).sqrt()
                        * binomial(j, i)
                        * binomial(i + j, i);
                    let got = b[j].coeffs[i].abs();
                    assert!((got - expect).abs() <= 1e-12 * expect, "j={j} i={i} R={r}");
                }
            }
        }
    }

    #[test]
    fn disk_extraction() {
        // ⟨Q, P_j⟩ for Q(r) = π + 2πr + πr² on [0, 1].
        let q = PolynomialR::new(vec![PI, 2.0 * PI, PI]);
        let basis = legendre_basis(2, 1.0).unwrap();
        let a: Vec<f64> = basis.iter().map(|p| q.mul(p).integrate(0.0, 1.0)).collect();
        let v = project_and_extract(&a, 1.0, 2).unwrap();
        for (got, want) in v.iter().zip([1.0, PI, PI]) {
            assert!((got - want).abs() < 1e-12, "{v:?}");
        }
    }

    #[test]
    fn constant_extraction() {
        let c = 2.5;
        let basis = legendre_basis(2, 1.0).unwrap();
        let a: Vec<f64> = basis.iter().map(|p| p.integrate(0.0, 1.0) * c).collect();
        let v = project_and_extract(&a, 1.0, 2).unwrap();
        assert!(
            v[0].abs() < 1e-12 && v[1].abs() < 1e-12 && (v[2] - c).abs() < 1e-12,
            "{v:?}"
        );
        assert_eq!(
            project_and_extract(&[0.0; 3], 1.0, 2).unwrap(),
            vec![0.0; 3]
        );
    }

    #[test]
    fn extraction_matrix_agrees() {
        let a = [0.3, -1.2, 0.7, 2.0];
        let m = extraction_matrix(1.7, 3).unwrap();
        let v = project_and_extract(&a, 1.7, 3).unwrap();
        for k in 0..4 {
            let row: f64 = m[k].iter().zip(&a).map(|(x, y)| x * y).sum();
            assert!((row - v[k]).abs() <= 1e-12 * v[k].abs().max(1.0));
        }
    }

    #[test]
    fn error_constants() {
        assert_eq!(error_constant(0, 1).unwrap(), 8.0);
        assert_eq!(error_constant(1, 2).unwrap(), 72.0);
        assert_eq!(error_constant(0, 0).unwrap(), 4.0);
        assert!(error_constant(3, 2).is_err());
    }

    #[test]
    fn bounds() {
        assert_eq!(
            theoretical_bound(0, 1, 0.0, 1.0, 1.0, 1.0, 0.0).unwrap(),
            0.0
        );
        assert!((theoretical_bound(0, 1, 0.1, 1.0, 1.0, 0.5, 0.5).unwrap() - 0.8).abs() < 1e-15);
        let b1 = theoretical_bound(1, 2, 0.01, 0.5, 1.0, 3.0, 1.0).unwrap();
        let b2 = theoretical_bound(1, 2, 0.02, 0.5, 1.0, 3.0, 1.0).unwrap();
        assert!((b2 - 2.0 * b1).abs() < 1e-15);
        assert!(theoretical_bound(0, 1, 0.1, 0.0, 1.0, 1.0, 1.0).is_err());
        assert!(theoretical_bound(0, 1, 0.1, 1.5, 1.0, 1.0, 1.0).is_err());
        assert!(theoretical_bound(0, 1, 0.1, 1.0, -1.0, 1.0, 1.0).is_err());
    }
}
