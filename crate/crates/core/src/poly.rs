//! Sparse multivariate polynomials with scalar coefficients.
//!
//! Terms are kept in a `BTreeMap` keyed by exponent vector so construction
//! is deterministic; the path tracker flattens polynomials into plain term
//! lists before the hot loop.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use serde::Serialize;

use crate::scalar::Real;

/// A polynomial in `nvars` variables; exponents are `u8` (total degrees here
/// never exceed a dozen).
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<T> {
    nvars: usize,
    terms: BTreeMap<Vec<u8>, T>,
}

impl<T: Real> Poly<T> {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: T) -> Self {
        let mut p = Poly::zero(nvars);
        if c != T::zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        assert!(index < nvars);
        let mut exp = vec![0u8; nvars];
        exp[index] = 1;
        let mut p = Poly::zero(nvars);
        p.terms.insert(exp, T::one());
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree; zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&d| d as usize).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u8], &T)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn max_abs_coeff(&self) -> T {
        self.terms
            .values()
            .map(|c| c.abs())
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }

    fn insert(&mut self, exp: Vec<u8>, coeff: T) {
        if coeff == T::zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exp) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                let new = *o.get() + coeff;
                if new == T::zero() {
                    o.remove();
                } else {
                    *o.get_mut() = new;
                }
            }
        }
    }

    pub fn scale(&self, c: T) -> Self {
        if c == T::zero() {
            return Poly::zero(self.nvars);
        }
        let mut out = Poly::zero(self.nvars);
        for (e, v) in &self.terms {
            out.terms.insert(e.clone(), *v * c);
        }
        out
    }

    /// Partial derivative with respect to variable `index`.
    pub fn diff(&self, index: usize) -> Self {
        assert!(index < self.nvars);
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            let d = e[index];
            if d == 0 {
                continue;
            }
            let mut exp = e.clone();
            exp[index] = d - 1;
            out.insert(exp, *c * T::from_u8(d).unwrap());
        }
        out
    }

    pub fn eval_real(&self, x: &[T]) -> T {
        debug_assert_eq!(x.len(), self.nvars);
        let mut acc = T::zero();
        for (e, c) in &self.terms {
            let mut term = *c;
            for (v, &d) in e.iter().enumerate() {
                for _ in 0..d {
                    term = term * x[v];
                }
            }
            acc = acc + term;
        }
        acc
    }

    /// Sum of absolute term magnitudes at the componentwise magnitudes
    /// `x_abs`: the natural size of the evaluation, used to turn values into
    /// relative backward errors.
    pub fn eval_abs(&self, x_abs: &[T]) -> T {
        debug_assert_eq!(x_abs.len(), self.nvars);
        let mut acc = T::zero();
        for (e, c) in &self.terms {
            let mut term = c.abs();
            for (v, &d) in e.iter().enumerate() {
                for _ in 0..d {
                    term = term * x_abs[v];
                }
            }
            acc = acc + term;
        }
        acc
    }

    pub fn eval_complex(&self, x: &[Complex<T>]) -> Complex<T> {
        debug_assert_eq!(x.len(), self.nvars);
        let mut acc = Complex::new(T::zero(), T::zero());
        for (e, c) in &self.terms {
            let mut term = Complex::new(*c, T::zero());
            for (v, &d) in e.iter().enumerate() {
                for _ in 0..d {
                    term = term * x[v];
                }
            }
            acc = acc + term;
        }
        acc
    }

    /// Flat `(exponents, coefficient)` list in deterministic order.
    pub fn term_list(&self) -> Vec<(Vec<u8>, T)> {
        self.terms.iter().map(|(e, c)| (e.clone(), *c)).collect()
    }
}

impl<T: Real + Serialize> Poly<T> {
    /// Debug-friendly form: exponent vectors plus `[re, im]` coefficient
    /// pairs (imaginary parts are zero for systems built from real data).
    pub fn to_json_terms(&self) -> Vec<serde_json::Value> {
        self.terms
            .iter()
            .map(|(e, c)| {
                serde_json::json!({
                    "exp": e,
                    "coeff": [c, T::zero()],
                })
            })
            .collect()
    }
}

impl<T: Real> Add for &Poly<T> {
    type Output = Poly<T>;
    fn add(self, rhs: &Poly<T>) -> Poly<T> {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.insert(e.clone(), *c);
        }
        out
    }
}

impl<T: Real> Sub for &Poly<T> {
    type Output = Poly<T>;
    fn sub(self, rhs: &Poly<T>) -> Poly<T> {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.insert(e.clone(), -*c);
        }
        out
    }
}

impl<T: Real> Mul for &Poly<T> {
    type Output = Poly<T>;
    fn mul(self, rhs: &Poly<T>) -> Poly<T> {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = Poly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let exp: Vec<u8> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.insert(exp, *ca * *cb);
            }
        }
        out
    }
}

impl<T: Real> Neg for &Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        self.scale(-T::one())
    }
}
