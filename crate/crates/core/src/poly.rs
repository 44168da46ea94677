//! Dense univariate polynomials over any numeric ring, plus a root finder
//! for complex coefficients (companion matrix eigenvalues, Newton polish).

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, Schur};
use num::complex::Complex64;
use num::{One, Zero};

use crate::error::NumericError;

/// Coefficient ring. Implemented for the concrete types in use rather than
/// through a blanket impl, which keeps trait resolution finite.
pub trait Coeff: Clone + Zero + One + PartialEq {
    fn add_ref(&self, o: &Self) -> Self;
    fn sub_ref(&self, o: &Self) -> Self;
    fn mul_ref(&self, o: &Self) -> Self;
}

macro_rules! coeff {
    ($($t:ty),*) => {$(
        impl Coeff for $t {
            fn add_ref(&self, o: &Self) -> Self { self + o }
            fn sub_ref(&self, o: &Self) -> Self { self - o }
            fn mul_ref(&self, o: &Self) -> Self { self * o }
        }
    )*};
}
coeff!(f64, Complex64, crate::Rational);

/// Coefficients in ascending order. Trailing exact zeros are trimmed.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T> Poly<T>
where
    T: Coeff,
{
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    /// `t - r`
    pub fn linear_root(r: &T) -> Self {
        Self::new(vec![T::zero().sub_ref(r), T::one()])
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[T]) -> Self {
        roots
            .iter()
            .fold(Self::constant(T::one()), |acc, r| &acc * &Self::linear_root(r))
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc.mul_ref(x).add_ref(c))
    }

    pub fn derivative(&self) -> Self {
        let mut k = T::zero();
        let mut out = Vec::with_capacity(self.coeffs.len().saturating_sub(1));
        for c in self.coeffs.iter().skip(1) {
            k = k.add_ref(&T::one());
            out.push(k.mul_ref(c));
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.mul_ref(c)).collect())
    }

    pub fn map<U, F>(&self, f: F) -> Poly<U>
    where
        U: Coeff,
        F: Fn(&T) -> U,
    {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    pub fn pow(&self, k: usize) -> Self {
        (0..k).fold(Self::constant(T::one()), |acc, _| &acc * self)
    }
}

impl<'a, T> Add<&'a Poly<T>> for &'a Poly<T>
where
    T: Coeff,
{
    type Output = Poly<T>;
    fn add(self, rhs: &'a Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let z = T::zero();
        Poly::new(
            (0..n)
                .map(|i| {
                    let a = self.coeffs.get(i).unwrap_or(&z);
                    let b = rhs.coeffs.get(i).unwrap_or(&z);
                    a.add_ref(b)
                })
                .collect(),
        )
    }
}

impl<'a, T> Sub<&'a Poly<T>> for &'a Poly<T>
where
    T: Coeff,
{
    type Output = Poly<T>;
    fn sub(self, rhs: &'a Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let z = T::zero();
        Poly::new(
            (0..n)
                .map(|i| {
                    let a = self.coeffs.get(i).unwrap_or(&z);
                    let b = rhs.coeffs.get(i).unwrap_or(&z);
                    a.sub_ref(b)
                })
                .collect(),
        )
    }
}

impl<'a, T> Mul<&'a Poly<T>> for &'a Poly<T>
where
    T: Coeff,
{
    type Output = Poly<T>;
    fn mul(self, rhs: &'a Poly<T>) -> Poly<T> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add_ref(&a.mul_ref(b));
            }
        }
        Poly::new(out)
    }
}

impl<T> Neg for &Poly<T>
where
    T: Coeff,
{
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        &Poly::zero() - self
    }
}

impl Poly<f64> {
    pub fn to_complex(&self) -> Poly<Complex64> {
        self.map(|c| Complex64::new(*c, 0.0))
    }

    /// Sum of absolute coefficient values.
    pub fn norm1(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }
}

impl Poly<Complex64> {
    pub fn norm1(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// Drop leading coefficients that are negligible next to the rest.
    fn numerically_trimmed(&self) -> Poly<Complex64> {
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut c = self.coeffs.clone();
        while c.last().is_some_and(|x| x.norm() <= 1e-14 * scale) {
            c.pop();
        }
        Poly::new(c)
    }

    /// All complex roots with multiplicity.
    pub fn roots(&self) -> Result<Vec<Complex64>, NumericError> {
        let p = self.numerically_trimmed();
        let n = match p.degree() {
            None => return Err(NumericError::ZeroPolynomial),
            Some(0) => return Ok(Vec::new()),
            Some(n) => n,
        };
        let lead = p.coeffs[n];
        if n == 1 {
            return Ok(vec![-p.coeffs[0] / lead]);
        }
        let mut comp = DMatrix::<Complex64>::zeros(n, n);
        for i in 1..n {
            comp[(i, i - 1)] = Complex64::one();
        }
        for i in 0..n {
            comp[(i, n - 1)] = -p.coeffs[i] / lead;
        }
        let schur = Schur::try_new(comp, 1e-15, 10_000)
            .ok_or(NumericError::NoConvergence("companion Schur iteration"))?;
        let (_, t) = schur.unpack();
        let dp = p.derivative();
        let roots = (0..n).map(|i| polish(&p, &dp, t[(i, i)])).collect();
        Ok(roots)
    }
}

/// A few Newton steps, kept only while they reduce the residual.
fn polish(p: &Poly<Complex64>, dp: &Poly<Complex64>, mut z: Complex64) -> Complex64 {
    let mut r = p.eval(&z).norm();
    for _ in 0..8 {
        let d = dp.eval(&z);
        if d.norm() == 0.0 {
            break;
        }
        let cand = z - p.eval(&z) / d;
        let rc = p.eval(&cand).norm();
        if !(rc < r) {
            break;
        }
        z = cand;
        r = rc;
        if r == 0.0 {
            break;
        }
    }
    z
}

/// Relative residual |p(z)| / sum |c_k| |z|^k, scale-free.
pub fn relative_residual(p: &Poly<Complex64>, z: Complex64) -> f64 {
    let a = z.norm();
    let denom: f64 = p
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| c.norm() * a.powi(k as i32))
        .sum();
    if denom == 0.0 {
        0.0
    } else {
        p.eval(&z).norm() / denom
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigRational;

    #[test]
    fn arithmetic_over_rationals() {
        let q = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        let p = Poly::from_roots(&[q(1, 2), q(-3, 1)]);
        assert_eq!(p.coeffs(), &[q(-3, 2), q(5, 2), q(1, 1)]);
        assert_eq!(p.eval(&q(1, 2)), q(0, 1));
        assert_eq!(p.derivative().coeffs(), &[q(5, 2), q(2, 1)]);
        let z = &p - &p;
        assert!(z.is_zero());
        assert_eq!(z.degree(), None);
    }

    #[test]
    fn roots_of_cubic() {
        let p = Poly::from_roots(&[1.0, -2.0, 0.5]).to_complex();
        let mut r: Vec<f64> = p.roots().unwrap().iter().map(|z| z.re).collect();
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in r.iter().zip([-2.0, 0.5, 1.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn complex_pair() {
        // t^2 + 1
        let p = Poly::new(vec![1.0, 0.0, 1.0]).to_complex();
        let r = p.roots().unwrap();
        assert!(r.iter().all(|z| (z.im.abs() - 1.0).abs() < 1e-12 && z.re.abs() < 1e-12));
    }

    #[test]
    fn clustered_roots_are_polished() {
        let roots = [3.0, 3.001, -1.0, 0.25, 7.5, -4.0];
        let p = Poly::from_roots(&roots).to_complex();
        for z in p.roots().unwrap() {
            assert!(relative_residual(&p, z) < 1e-13);
        }
    }
}
