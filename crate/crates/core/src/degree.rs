//! Degree distributions and their generating functions.
//!
//! For a degree distribution `p_k` the vertex generating function is
//! `g_p(x) = sum_k p_k x^k` and the excess-degree distribution, the degree of
//! a vertex reached along an edge minus that edge, is
//! `r_k = (k + 1) p_{k+1} / <k>` with generating function
//! `g_r(x) = g_p'(x) / g_p'(1)`.
//!
//! Poisson and delta models use closed forms. Power-law-with-cutoff and
//! empirical models keep an explicit probability table and evaluate every
//! generating function and derivative by exact finite sums.

use std::fmt::Write as _;

use rand::Rng;

use crate::error::{check_domain, Error, Result};
use crate::graph::Graph;

/// Probability mass allowed beyond the truncation point of infinite supports.
pub const TAIL_TOLERANCE: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq)]
pub enum DegreeKind {
    Delta(usize),
    Poisson(f64),
    PowerLawCutoff {
        tau: f64,
        kappa: f64,
        k_min: usize,
        k_max: usize,
    },
    Empirical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeModel {
    kind: DegreeKind,
    /// `probs[k] = p_k`, truncated where the remaining tail is negligible.
    probs: Vec<f64>,
    cdf: Vec<f64>,
    mean: f64,
    /// Normalisation constant of the power-law family (1 otherwise).
    norm: f64,
}

impl DegreeModel {
    pub fn delta(k0: usize) -> Result<Self> {
        if k0 == 0 {
            return Err(Error::InvalidParameter(
                "delta degree must be at least 1".into(),
            ));
        }
        let mut probs = vec![0.0; k0 + 1];
        probs[k0] = 1.0;
        Ok(Self::from_table(DegreeKind::Delta(k0), probs, 1.0))
    }

    pub fn poisson(z: f64) -> Result<Self> {
        if !(z > 0.0 && z.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "poisson mean must be positive, got {z}"
            )));
        }
        let ln_z = z.ln();
        let mut probs = Vec::new();
        let mut ln_p = -z;
        let mut cumulative = 0.0;
        let mut k = 0usize;
        loop {
            let p = ln_p.exp();
            probs.push(p);
            cumulative += p;
            k += 1;
            if k as f64 > z && (1.0 - cumulative < TAIL_TOLERANCE || p < 1e-300) {
                break;
            }
            ln_p += ln_z - (k as f64).ln();
        }
        Ok(Self::from_table(DegreeKind::Poisson(z), probs, 1.0))
    }

    /// `p_k = C k^-tau exp(-k / kappa)` on `k_min..=k_max`. Without an explicit
    /// `k_max` the support is cut where the normalised tail drops below
    /// [`TAIL_TOLERANCE`].
    pub fn power_law_cutoff(
        tau: f64,
        kappa: f64,
        k_min: usize,
        k_max: Option<usize>,
    ) -> Result<Self> {
        if k_min == 0 {
            return Err(Error::InvalidParameter("k_min must be at least 1".into()));
        }
        if !tau.is_finite() || kappa.is_nan() || kappa <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "power law needs finite tau and kappa > 0, got tau={tau}, kappa={kappa}"
            )));
        }
        if kappa.is_infinite() && k_max.is_none() && tau <= 2.0 {
            return Err(Error::InvalidParameter(
                "a pure power law needs an explicit k_max".into(),
            ));
        }
        let weight = |k: usize| (k as f64).powf(-tau) * (-(k as f64) / kappa).exp();
        let mut weights = vec![0.0; k_min];
        let mut sum = 0.0;
        let k_max = match k_max {
            Some(k_max) => {
                if k_max < k_min {
                    return Err(Error::InvalidParameter("k_max < k_min".into()));
                }
                for k in k_min..=k_max {
                    let w = weight(k);
                    weights.push(w);
                    sum += w;
                }
                k_max
            }
            None => {
                let ratio = (-1.0 / kappa).exp();
                let mut k = k_min;
                loop {
                    let w = weight(k);
                    weights.push(w);
                    sum += w;
                    // Remaining terms are bounded by a geometric series once
                    // the power-law factor is non-increasing.
                    let next = weight(k + 1);
                    let tail_bound = if tau >= 0.0 && ratio < 1.0 {
                        next / (1.0 - ratio)
                    } else {
                        next * (k as f64)
                    };
                    if tail_bound < TAIL_TOLERANCE * sum || k > 1_000_000 {
                        break k;
                    }
                    k += 1;
                }
            }
        };
        if sum <= 0.0 {
            return Err(Error::InvalidParameter("power law has zero mass".into()));
        }
        let norm = 1.0 / sum;
        let probs = weights.into_iter().map(|w| w * norm).collect();
        Ok(Self::from_table(
            DegreeKind::PowerLawCutoff {
                tau,
                kappa,
                k_min,
                k_max,
            },
            probs,
            norm,
        ))
    }

    /// Empirical model from unnormalised weights indexed by degree.
    pub fn empirical(weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidParameter(
                "empirical weights must be finite and non-negative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidParameter(
                "empirical weights sum to zero".into(),
            ));
        }
        let mut probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
        while probs.len() > 1 && probs.last() == Some(&0.0) {
            probs.pop();
        }
        let m = Self::from_table(DegreeKind::Empirical, probs, 1.0);
        if m.mean <= 0.0 {
            return Err(Error::InvalidParameter(
                "empirical mean degree is zero".into(),
            ));
        }
        Ok(m)
    }

    /// Empirical model from `(degree, weight)` pairs.
    pub fn empirical_from_pairs(pairs: &[(usize, f64)]) -> Result<Self> {
        let k_max = pairs.iter().map(|p| p.0).max().unwrap_or(0);
        let mut weights = vec![0.0; k_max + 1];
        for &(k, w) in pairs {
            weights[k] += w;
        }
        Self::empirical(&weights)
    }

    /// Degree histogram of a graph.
    pub fn from_graph(g: &Graph) -> Result<Self> {
        let degrees = g.degrees();
        let k_max = degrees.iter().copied().max().unwrap_or(0);
        let mut counts = vec![0.0; k_max + 1];
        for d in degrees {
            counts[d] += 1.0;
        }
        Self::empirical(&counts)
    }

    fn from_table(kind: DegreeKind, probs: Vec<f64>, norm: f64) -> Self {
        let mut acc = 0.0;
        let cdf = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        let mean = probs.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
        let mean = match kind {
            DegreeKind::Poisson(z) => z,
            DegreeKind::Delta(k0) => k0 as f64,
            _ => mean,
        };
        DegreeModel {
            kind,
            probs,
            cdf,
            mean,
            norm,
        }
    }

    pub fn kind(&self) -> &DegreeKind {
        &self.kind
    }

    /// Probability table `p_0..=p_kmax` (truncated for infinite supports).
    pub fn table(&self) -> &[f64] {
        &self.probs
    }

    pub fn max_degree(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn normalization(&self) -> f64 {
        self.norm
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn pk(&self, k: usize) -> f64 {
        match self.kind {
            DegreeKind::Poisson(z) => {
                let ln_fact: f64 = (1..=k).map(|i| (i as f64).ln()).sum();
                (-z + k as f64 * z.ln() - ln_fact).exp()
            }
            _ => self.probs.get(k).copied().unwrap_or(0.0),
        }
    }

    pub fn rk(&self, k: usize) -> f64 {
        (k + 1) as f64 * self.pk(k + 1) / self.mean
    }

    fn check_x(x: f64) -> Result<()> {
        check_domain("x", x, (0.0..=1.0).contains(&x), "[0, 1]")
    }

    pub fn gp(&self, x: f64) -> Result<f64> {
        Self::check_x(x)?;
        Ok(self.gp_raw(x))
    }

    pub fn gr(&self, x: f64) -> Result<f64> {
        Self::check_x(x)?;
        Ok(self.gr_raw(x))
    }

    pub fn gp_prime(&self, x: f64) -> Result<f64> {
        Self::check_x(x)?;
        Ok(self.gp_prime_raw(x))
    }

    pub fn gr_prime(&self, x: f64) -> Result<f64> {
        Self::check_x(x)?;
        Ok(self.gr_prime_raw(x))
    }

    pub(crate) fn gp_raw(&self, x: f64) -> f64 {
        match self.kind {
            DegreeKind::Poisson(z) => (z * (x - 1.0)).exp(),
            DegreeKind::Delta(k0) => x.powi(k0 as i32),
            _ => horner(&self.probs, x),
        }
    }

    pub(crate) fn gp_prime_raw(&self, x: f64) -> f64 {
        match self.kind {
            DegreeKind::Poisson(z) => z * (z * (x - 1.0)).exp(),
            DegreeKind::Delta(k0) => k0 as f64 * x.powi(k0 as i32 - 1),
            _ => derivative_sum(&self.probs, x, 1),
        }
    }

    pub(crate) fn gr_raw(&self, x: f64) -> f64 {
        match self.kind {
            DegreeKind::Poisson(z) => (z * (x - 1.0)).exp(),
            DegreeKind::Delta(k0) => x.powi(k0 as i32 - 1),
            _ => derivative_sum(&self.probs, x, 1) / self.mean,
        }
    }

    pub(crate) fn gr_prime_raw(&self, x: f64) -> f64 {
        match self.kind {
            DegreeKind::Poisson(z) => z * (z * (x - 1.0)).exp(),
            DegreeKind::Delta(k0) => {
                if k0 < 2 {
                    0.0
                } else {
                    (k0 - 1) as f64 * x.powi(k0 as i32 - 2)
                }
            }
            _ => derivative_sum(&self.probs, x, 2) / self.mean,
        }
    }

    /// Mean excess degree `g_r'(1)`.
    pub fn excess_mean(&self) -> f64 {
        self.gr_prime_raw(1.0)
    }

    /// `<k^n>` by direct weighted summation.
    pub fn moment(&self, n: u32) -> f64 {
        match self.kind {
            DegreeKind::Delta(k0) => (k0 as f64).powi(n as i32),
            DegreeKind::Poisson(z) if n == 1 => z,
            DegreeKind::Poisson(z) if n == 2 => z + z * z,
            _ => self
                .probs
                .iter()
                .enumerate()
                .map(|(k, p)| (k as f64).powi(n as i32) * p)
                .sum(),
        }
    }

    /// Draws a degree by inverse-CDF lookup.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        if let DegreeKind::Delta(k0) = self.kind {
            return k0;
        }
        let total = *self.cdf.last().unwrap();
        let u: f64 = rng.gen::<f64>() * total;
        self.cdf
            .partition_point(|&c| c <= u)
            .min(self.probs.len() - 1)
    }

    /// Two-column `degree probability` text, zero rows omitted.
    pub fn to_histogram_text(&self) -> String {
        let mut out = String::new();
        for (k, p) in self.probs.iter().enumerate() {
            if *p > 0.0 {
                let _ = writeln!(out, "{k} {p:e}");
            }
        }
        out
    }

    pub fn from_histogram_text(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |message: &str| Error::Parse {
                line: i + 1,
                message: message.to_string(),
            };
            let mut it = line.split_whitespace();
            let k = it
                .next()
                .and_then(|t| t.parse::<usize>().ok())
                .ok_or_else(|| parse_err("expected integer degree"))?;
            let p = it
                .next()
                .and_then(|t| t.parse::<f64>().ok())
                .ok_or_else(|| parse_err("expected probability"))?;
            if it.next().is_some() {
                return Err(parse_err("expected two columns"));
            }
            pairs.push((k, p));
        }
        Self::empirical_from_pairs(&pairs)
    }
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// `d^order/dx^order sum_k c_k x^k` for order 1 or 2.
fn derivative_sum(coeffs: &[f64], x: f64, order: usize) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .skip(order)
        .rev()
        .fold(0.0, |acc, (k, &c)| {
            let factor = if order == 1 {
                k as f64
            } else {
                (k * (k - 1)) as f64
            };
            acc * x + factor * c
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn models() -> Vec<DegreeModel> {
        vec![
            DegreeModel::delta(3).unwrap(),
            DegreeModel::poisson(2.5).unwrap(),
            DegreeModel::power_law_cutoff(1.0, 4.0, 1, None).unwrap(),
            DegreeModel::empirical_from_pairs(&[(1, 0.5), (3, 0.5)]).unwrap(),
        ]
    }

    #[test]
    fn pk_examples() {
        let p = DegreeModel::poisson(1.0).unwrap();
        assert!((p.pk(0) - (-1.0f64).exp()).abs() < 1e-15);
        let d = DegreeModel::delta(3).unwrap();
        assert_eq!(d.pk(3), 1.0);
        assert_eq!(d.pk(2), 0.0);
        assert_eq!(d.pk(40), 0.0);
    }

    #[test]
    fn power_law_normalisation_matches_series() {
        // Independent long summation of sum_{k>=1} k^-1 e^{-k/4}.
        let mut s = 0.0;
        for k in 1..5000 {
            s += (-(k as f64) / 4.0).exp() / k as f64;
        }
        let m = DegreeModel::power_law_cutoff(1.0, 4.0, 1, None).unwrap();
        let expected_p1 = (-0.25f64).exp() / s;
        assert!((m.pk(1) - expected_p1).abs() < 1e-14);
        // closed form: sum_{k>=1} q^k/k = -ln(1-q)
        let closed = -(1.0 - (-0.25f64).exp()).ln();
        assert!((1.0 / m.normalization() - closed).abs() < 1e-13);
        assert_eq!(m.pk(0), 0.0);
    }

    #[test]
    fn excess_degree_examples() {
        let p = DegreeModel::poisson(1.7).unwrap();
        for k in 0..10 {
            assert!((p.rk(k) - p.pk(k)).abs() < 1e-14);
        }
        let d = DegreeModel::delta(3).unwrap();
        assert_eq!(d.rk(2), 1.0);
        assert_eq!(d.rk(1), 0.0);
        let e = DegreeModel::empirical_from_pairs(&[(1, 0.5), (3, 0.5)]).unwrap();
        assert_eq!(e.mean(), 2.0);
        assert!((e.rk(0) - 0.25).abs() < 1e-15);
        assert!((e.rk(2) - 0.75).abs() < 1e-15);
        assert_eq!(e.rk(1), 0.0);
    }

    #[test]
    fn generating_function_examples() {
        let p = DegreeModel::poisson(2.0).unwrap();
        assert!((p.gp(0.5).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        let d = DegreeModel::delta(3).unwrap();
        assert!((d.gr(0.3).unwrap() - 0.09).abs() < 1e-15);
        assert_eq!(d.gr_prime(1.0).unwrap(), 2.0);
        for m in models() {
            assert!((m.gp(1.0).unwrap() - 1.0).abs() < 1e-12);
            assert!((m.gr(1.0).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(p.gp(1.5).is_err());
        assert!(p.gr(-0.1).is_err());
    }

    #[test]
    fn gr_is_normalised_gp_prime() {
        for m in models() {
            let gp1 = m.gp_prime(1.0).unwrap();
            for x in [0.0, 0.3, 0.7, 1.0] {
                let lhs = m.gr(x).unwrap();
                let rhs = m.gp_prime(x).unwrap() / gp1;
                assert!((lhs - rhs).abs() < 1e-10, "{:?} x={x}", m.kind());
            }
            assert!((m.moment(1) - gp1).abs() < 1e-10);
            let rsum: f64 = (0..=m.max_degree() + 5).map(|k| m.rk(k)).sum();
            assert!((rsum - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn moment_examples() {
        assert_eq!(DegreeModel::poisson(2.5).unwrap().moment(1), 2.5);
        assert_eq!(DegreeModel::delta(3).unwrap().moment(2), 9.0);
        let e = DegreeModel::empirical_from_pairs(&[(1, 0.5), (3, 0.5)]).unwrap();
        assert_eq!(e.moment(2), 5.0);
        let p = DegreeModel::poisson(2.5).unwrap();
        let table_second: f64 = p
            .table()
            .iter()
            .enumerate()
            .map(|(k, q)| (k * k) as f64 * q)
            .sum();
        assert!((table_second - p.moment(2)).abs() < 1e-12);
    }

    #[test]
    fn sampling_means() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let d = DegreeModel::delta(3).unwrap();
        assert!((0..100).all(|_| d.sample(&mut rng) == 3));

        let p = DegreeModel::poisson(2.0).unwrap();
        let n = 1_000_000;
        let mean = (0..n).map(|_| p.sample(&mut rng) as f64).sum::<f64>() / n as f64;
        // 3 sigma = 3 sqrt(2 / 1e6) ~ 0.0042
        assert!((mean - 2.0).abs() < 0.005, "mean {mean}");

        let pl = DegreeModel::power_law_cutoff(1.0, 4.0, 1, None).unwrap();
        let n = 200_000;
        let draws: Vec<f64> = (0..n).map(|_| pl.sample(&mut rng) as f64).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = pl.moment(2) - pl.moment(1).powi(2);
        let sigma = (var / n as f64).sqrt();
        assert!((mean - pl.moment(1)).abs() < 3.0 * sigma);
    }

    #[test]
    fn empirical_from_graph_reproduces_mean_degree() {
        let g = Graph::new(5, &[(0, 1), (1, 2), (2, 3), (1, 3)]).unwrap();
        let m = DegreeModel::from_graph(&g).unwrap();
        assert_eq!(m.mean(), 8.0 / 5.0);
        assert_eq!(m.pk(0), 0.2);
    }

    #[test]
    fn histogram_text_round_trip() {
        let e = DegreeModel::empirical_from_pairs(&[(1, 0.25), (2, 0.25), (4, 0.5)]).unwrap();
        let text = e.to_histogram_text();
        let back = DegreeModel::from_histogram_text(&text).unwrap();
        assert_eq!(back.table(), e.table());
        assert!(DegreeModel::from_histogram_text("1 0.5 7").is_err());
    }

    #[test]
    fn invalid_parameters() {
        assert!(DegreeModel::delta(0).is_err());
        assert!(DegreeModel::poisson(0.0).is_err());
        assert!(DegreeModel::power_law_cutoff(1.0, -1.0, 1, None).is_err());
        assert!(DegreeModel::empirical(&[1.0]).is_err());
    }
}
