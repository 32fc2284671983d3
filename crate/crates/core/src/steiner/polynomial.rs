use serde::{Deserialize, Serialize};

/// Real polynomial in monomial form, coefficients in ascending degree.
///
/// Coefficients are stored for every degree up to the declared arity, trailing zeros
/// included. Serializes as a bare JSON array.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PolynomialR {
    pub coeffs: Vec<f64>,
}

impl PolynomialR {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn zero(arity: usize) -> Self {
        Self {
            coeffs: vec![0.0; arity],
        }
    }

    pub fn constant(c: f64) -> Self {
        Self { coeffs: vec![c] }
    }

    /// Nominal degree: arity minus one, regardless of trailing zeros.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c)
    }

    /// Value at `r` of the antiderivative vanishing at 0.
    pub fn antiderivative_at(&self, r: f64) -> f64 {
        let inner = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .fold(0.0, |acc, (i, c)| acc * r + c / (i + 1) as f64);
        inner * r
    }

    /// `∫_a^b p(r) dr`.
    pub fn integrate(&self, a: f64, b: f64) -> f64 {
        self.antiderivative_at(b) - self.antiderivative_at(a)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::zero(0);
        }
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self { coeffs: out }
    }

    pub fn add_scaled(&mut self, other: &Self, s: f64) {
        if self.coeffs.len() < other.coeffs.len() {
            self.coeffs.resize(other.coeffs.len(), 0.0);
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += s * b;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_and_integrate() {
        let p = PolynomialR::new(vec![1.0, -2.0, 3.0]);
        assert_eq!(p.eval(2.0), 9.0);
        assert_eq!(p.integrate(0.0, 1.0), 1.0);
        assert_eq!(p.degree(), 2);
        assert_eq!(PolynomialR::new(vec![0.0, 2.0]).integrate(0.0, 1.0), 1.0);
    }

    #[test]
    fn product() {
        let p = PolynomialR::new(vec![1.0, 1.0]).mul(&PolynomialR::new(vec![-1.0, 1.0]));
        assert_eq!(p.coeffs, vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn json_is_coefficient_array() {
        let p = PolynomialR::new(vec![0.5, 0.0, 2.0]);
        assert_eq!(serde_json::to_string(&p).unwrap(), "[0.5,0.0,2.0]");
        assert_eq!(serde_json::from_str::<PolynomialR>("[0.5,0,2]").unwrap(), p);
    }
}
