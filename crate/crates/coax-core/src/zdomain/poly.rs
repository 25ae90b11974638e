//! Real-coefficient polynomials in z, ascending power order, plus the two
//! independent root solvers used by the stability analyzer.

use num_complex::Complex;

use crate::error::{CoaxError, Result};

/// Relative threshold below which a trailing coefficient is treated as a
/// cancellation residue and trimmed.
const TRIM_REL: f64 = 1e-14;

/// Residual bound for accepting a root set: |p(root)| / ||coeffs||.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-8;

/// Polynomial with real coefficients stored in ascending powers of z.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Builds a polynomial from ascending coefficients, trimming trailing
    /// entries that are negligible relative to the largest magnitude.
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    /// The zero polynomial.
    pub fn zero() -> Self {
        Self { coeffs: vec![0.0] }
    }

    /// The constant polynomial c.
    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// c * z^k.
    pub fn monomial(c: f64, k: usize) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    fn trim(&mut self) {
        let max_abs = self
            .coeffs
            .iter()
            .fold(0.0_f64, |acc, c| acc.max(c.abs()));
        if max_abs == 0.0 {
            self.coeffs = vec![0.0];
            return;
        }
        let cut = max_abs * TRIM_REL;
        while self.coeffs.len() > 1 && self.coeffs.last().unwrap().abs() <= cut {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Degree of the polynomial; zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0.0)
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0_f64, |acc, c| acc.max(c.abs()))
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Horner evaluation at a complex point.
    pub fn eval(&self, z: Complex<f64>) -> Complex<f64> {
        let mut acc = Complex::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Horner evaluation at a real point.
    pub fn eval_real(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// First derivative.
    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() <= 1 {
            return Polynomial::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * i as f64)
            .collect();
        Polynomial::new(coeffs)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![0.0; n];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        Polynomial::new(coeffs)
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Polynomial::new(coeffs)
    }

    /// Multiplies by z^k.
    pub fn shift_up(&self, k: usize) -> Polynomial {
        if self.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = vec![0.0; k];
        coeffs.extend_from_slice(&self.coeffs);
        Polynomial::new(coeffs)
    }
}

/// Roots plus the worst normalized residual |p(root)| / ||coeffs||.
#[derive(Debug, Clone)]
pub struct RootSet {
    pub roots: Vec<Complex<f64>>,
    pub max_residual: f64,
}

/// Roots via the companion-matrix eigenvalues of the monic polynomial,
/// followed by one Newton polish per root.
pub fn roots_companion(p: &Polynomial) -> Result<RootSet> {
    if p.is_zero() {
        return Err(CoaxError::InvalidParameter {
            name: "polynomial",
            value: 0.0,
            requirement: "nonzero for root finding",
        });
    }
    let n = p.degree();
    if n == 0 {
        return Ok(RootSet {
            roots: Vec::new(),
            max_residual: 0.0,
        });
    }
    let lead = p.coeffs[n];
    let mut companion = nalgebra::DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        companion[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        companion[(i, n - 1)] = -p.coeffs[i] / lead;
    }
    let eig = companion.complex_eigenvalues();
    let dp = p.derivative();
    let mut roots: Vec<Complex<f64>> = eig
        .iter()
        .map(|&z| {
            let d = dp.eval(z);
            if d.norm() > 0.0 {
                let step = p.eval(z) / d;
                if step.norm().is_finite() {
                    return z - step;
                }
            }
            z
        })
        .collect();
    sort_roots(&mut roots);
    let max_residual = residual(p, &roots);
    Ok(RootSet {
        roots,
        max_residual,
    })
}

/// Roots via simultaneous Durand-Kerner iteration. Independent of the
/// companion-matrix path; used as the cross-check oracle.
pub fn roots_durand_kerner(p: &Polynomial) -> Result<RootSet> {
    if p.is_zero() {
        return Err(CoaxError::InvalidParameter {
            name: "polynomial",
            value: 0.0,
            requirement: "nonzero for root finding",
        });
    }
    let n = p.degree();
    if n == 0 {
        return Ok(RootSet {
            roots: Vec::new(),
            max_residual: 0.0,
        });
    }
    let lead = p.coeffs[n];
    let monic: Vec<f64> = p.coeffs.iter().map(|c| c / lead).collect();
    let pm = Polynomial { coeffs: monic };

    let seed = Complex::new(0.4, 0.9);
    let mut w: Vec<Complex<f64>> = (0..n).map(|k| seed.powu(k as u32 + 1)).collect();
    for _ in 0..500 {
        let mut max_step = 0.0_f64;
        for k in 0..n {
            let mut denom = Complex::new(1.0, 0.0);
            for j in 0..n {
                if j != k {
                    denom *= w[k] - w[j];
                }
            }
            if denom.norm() == 0.0 {
                // Coincident iterates: nudge apart and continue.
                w[k] += Complex::new(1e-8, 1e-8);
                continue;
            }
            let step = pm.eval(w[k]) / denom;
            w[k] -= step;
            max_step = max_step.max(step.norm() / (1.0 + w[k].norm()));
        }
        if max_step < 1e-14 {
            break;
        }
    }
    sort_roots(&mut w);
    let max_residual = residual(p, &w);
    Ok(RootSet {
        roots: w,
        max_residual,
    })
}

fn residual(p: &Polynomial, roots: &[Complex<f64>]) -> f64 {
    let norm = p.norm().max(f64::MIN_POSITIVE);
    roots
        .iter()
        .map(|&r| p.eval(r).norm() / norm)
        .fold(0.0, f64::max)
}

/// Deterministic ordering: by real part, then imaginary part.
pub fn sort_roots(roots: &mut [Complex<f64>]) {
    roots.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn arithmetic_basics() {
        let a = Polynomial::new(vec![1.0, 2.0]); // 1 + 2z
        let b = Polynomial::new(vec![-1.0, 0.0, 1.0]); // z^2 - 1
        let prod = a.mul(&b);
        assert_eq!(prod.coeffs(), &[-1.0, -2.0, 1.0, 2.0]);
        assert_eq!(a.add(&b).coeffs(), &[0.0, 2.0, 1.0]);
        assert_eq!(a.shift_up(2).coeffs(), &[0.0, 0.0, 1.0, 2.0]);
        assert_relative_eq!(prod.eval_real(2.0), (1.0 + 4.0) * 3.0);
    }

    #[test]
    fn trim_keeps_legitimate_small_coeffs() {
        let p = Polynomial::new(vec![1.0, 0.0, 1e-6]);
        assert_eq!(p.degree(), 2);
        let q = Polynomial::new(vec![1.0, 0.0, 1e-20]);
        assert_eq!(q.degree(), 0);
    }

    #[test]
    fn quadratic_roots_exact() {
        // z^2 - 1 -> {-1, +1}
        let p = Polynomial::new(vec![-1.0, 0.0, 1.0]);
        let rs = roots_companion(&p).unwrap();
        assert_eq!(rs.roots.len(), 2);
        assert_relative_eq!(rs.roots[0].re, -1.0, epsilon = 1e-12);
        assert_relative_eq!(rs.roots[1].re, 1.0, epsilon = 1e-12);
        assert!(rs.max_residual < ROOT_RESIDUAL_TOL);
    }

    #[test]
    fn both_solvers_agree_on_random_polynomials() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let deg = rng.gen_range(2..=9);
            let coeffs: Vec<f64> = (0..=deg).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let p = Polynomial::new(coeffs);
            if p.degree() < 1 {
                continue;
            }
            let a = roots_companion(&p).unwrap();
            let b = roots_durand_kerner(&p).unwrap();
            assert_eq!(a.roots.len(), b.roots.len());
            // Conjugate pairs may swap order between solvers; match greedily.
            let mut used = vec![false; b.roots.len()];
            for ra in &a.roots {
                let (j, d) = b
                    .roots
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| !used[*j])
                    .map(|(j, rb)| (j, (ra - rb).norm()))
                    .min_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
                    .unwrap();
                used[j] = true;
                assert!(d < 1e-6, "root mismatch {ra} for {:?}", p.coeffs());
            }
        }
    }
}
