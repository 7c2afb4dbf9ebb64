//! Truncated power series in one and two variables.

use std::ops::{Add, Mul};

/// `sum_{k <= order} c_k x^k`; products drop every term above `order`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    coeffs: Vec<f64>,
}

impl Series {
    pub fn zero(order: usize) -> Self {
        Series {
            coeffs: vec![0.0; order + 1],
        }
    }

    pub fn constant(c: f64, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// The monomial `x^power` (zero if `power > order`).
    pub fn monomial(power: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if power <= order {
            s.coeffs[power] = 1.0;
        }
        s
    }

    pub fn from_coeffs(mut coeffs: Vec<f64>, order: usize) -> Self {
        coeffs.resize(order + 1, 0.0);
        Series { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Derivative at `x` of the truncated polynomial.
    pub fn derivative_at(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (k, &c)| acc * x + k as f64 * c)
    }

    pub fn scale(mut self, a: f64) -> Self {
        self.coeffs.iter_mut().for_each(|c| *c *= a);
        self
    }

    /// Multiplies by `x^power`.
    pub fn shift(&self, power: usize) -> Self {
        let order = self.order();
        let mut out = Self::zero(order);
        for k in 0..=order.saturating_sub(power) {
            if k + power <= order {
                out.coeffs[k + power] = self.coeffs[k];
            }
        }
        out
    }

    /// `sum_k a_k h(x)^k` by Horner's rule; `outer[k] = a_k`.
    pub fn compose(outer: &[f64], inner: &Series) -> Series {
        let order = inner.order();
        let mut acc = Series::zero(order);
        // With no constant term in `inner` only the first order+1 outer
        // coefficients can reach the kept range.
        let limit = if inner.coeffs[0] == 0.0 {
            outer.len().min(order + 1)
        } else {
            outer.len()
        };
        for &a in outer[..limit].iter().rev() {
            acc = &acc * inner;
            acc.coeffs[0] += a;
        }
        acc
    }

    /// `exp(s)` via the recurrence `k e_k = sum_j j s_j e_{k-j}`.
    pub fn exp(&self) -> Series {
        let order = self.order();
        let mut e = Series::zero(order);
        e.coeffs[0] = self.coeffs[0].exp();
        for k in 1..=order {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * self.coeffs[j] * e.coeffs[k - j];
            }
            e.coeffs[k] = acc / k as f64;
        }
        e
    }

    pub fn powi(&self, n: usize) -> Series {
        let mut result = Series::constant(1.0, self.order());
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        result
    }
}

impl Add for &Series {
    type Output = Series;
    fn add(self, rhs: &Series) -> Series {
        let order = self.order().min(rhs.order());
        Series {
            coeffs: (0..=order)
                .map(|k| self.coeffs[k] + rhs.coeffs[k])
                .collect(),
        }
    }
}

impl Mul for &Series {
    type Output = Series;
    fn mul(self, rhs: &Series) -> Series {
        let order = self.order().min(rhs.order());
        let mut out = vec![0.0; order + 1];
        for (i, &a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate().take(order + 1 - i) {
                out[i + j] += a * b;
            }
        }
        Series { coeffs: out }
    }
}

/// Two-variable series `sum c[s][t] y^s x^t` truncated at total degree `order`.
#[derive(Debug, Clone, PartialEq)]
pub struct BiSeries {
    order: usize,
    coeffs: Vec<f64>,
}

impl BiSeries {
    pub fn zero(order: usize) -> Self {
        BiSeries {
            order,
            coeffs: vec![0.0; (order + 1) * (order + 1)],
        }
    }

    pub fn constant(c: f64, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    fn idx(&self, s: usize, t: usize) -> usize {
        s * (self.order + 1) + t
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Coefficient of `y^s x^t`.
    pub fn coeff(&self, s: usize, t: usize) -> f64 {
        if s + t > self.order {
            0.0
        } else {
            self.coeffs[self.idx(s, t)]
        }
    }

    pub fn set(&mut self, s: usize, t: usize, value: f64) {
        let i = self.idx(s, t);
        self.coeffs[i] = value;
    }

    /// Multiplies by `y^dy x^dx`.
    pub fn shift(&self, dy: usize, dx: usize) -> Self {
        let mut out = Self::zero(self.order);
        for s in 0..=self.order {
            for t in 0..=self.order - s {
                if s + dy + t + dx <= self.order {
                    out.set(s + dy, t + dx, self.coeff(s, t));
                }
            }
        }
        out
    }

    pub fn scale(mut self, a: f64) -> Self {
        self.coeffs.iter_mut().for_each(|c| *c *= a);
        self
    }

    pub fn add_constant(mut self, c: f64) -> Self {
        self.coeffs[0] += c;
        self
    }

    pub fn powi(&self, n: usize) -> Self {
        let mut result = Self::constant(1.0, self.order);
        for _ in 0..n {
            result = &result * self;
        }
        result
    }

    pub fn max_abs_diff(&self, other: &BiSeries) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Add for &BiSeries {
    type Output = BiSeries;
    fn add(self, rhs: &BiSeries) -> BiSeries {
        assert_eq!(self.order, rhs.order);
        BiSeries {
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Mul for &BiSeries {
    type Output = BiSeries;
    fn mul(self, rhs: &BiSeries) -> BiSeries {
        assert_eq!(self.order, rhs.order);
        let d = self.order;
        let mut out = BiSeries::zero(d);
        for s1 in 0..=d {
            for t1 in 0..=d - s1 {
                let a = self.coeff(s1, t1);
                if a == 0.0 {
                    continue;
                }
                for s2 in 0..=d - s1 - t1 {
                    for t2 in 0..=d - s1 - t1 - s2 {
                        let i = out.idx(s1 + s2, t1 + t2);
                        out.coeffs[i] += a * rhs.coeff(s2, t2);
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_matches_taylor() {
        let x = Series::monomial(1, 8).scale(2.0);
        let e = x.exp();
        let mut fact = 1.0;
        for k in 0..=8 {
            if k > 0 {
                fact *= k as f64;
            }
            assert!((e.coeff(k) - 2f64.powi(k as i32) / fact).abs() < 1e-12);
        }
    }

    #[test]
    fn compose_geometric() {
        // 1/(1-h) with h = x/2 -> coefficients 2^-k
        let h = Series::monomial(1, 10).scale(0.5);
        let outer = vec![1.0; 40];
        let c = Series::compose(&outer, &h);
        for k in 0..=10 {
            assert!((c.coeff(k) - 0.5f64.powi(k as i32)).abs() < 1e-15);
        }
    }

    #[test]
    fn bivariate_product() {
        let mut a = BiSeries::zero(4);
        a.set(0, 0, 1.0);
        a.set(1, 0, 1.0); // 1 + y
        let b = a.shift(0, 1); // x + xy
        let p = &a * &b; // x (1+y)^2
        assert_eq!(p.coeff(0, 1), 1.0);
        assert_eq!(p.coeff(1, 1), 2.0);
        assert_eq!(p.coeff(2, 1), 1.0);
        assert_eq!(p.coeff(3, 1), 0.0);
    }
}
