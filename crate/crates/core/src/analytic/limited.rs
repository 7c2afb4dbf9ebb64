use crate::degree::DegreeModel;
use crate::error::{check_domain, Result};
use crate::series::Series;

/// Default truncation order of limited-path size distributions.
pub const DEFAULT_S_MAX: usize = 200;

/// `<s_l> = 1 + g_p'(1) (1 - g_r'(1)^l) / (1 - g_r'(1))`, with the linear
/// limit at `g_r'(1) = 1`.
pub fn limited_avg_size(m: &DegreeModel, l: usize) -> f64 {
    if l == 0 {
        return 1.0;
    }
    let gp1 = m.mean();
    let gr1 = m.excess_mean();
    if (gr1 - 1.0).abs() < 1e-12 {
        return 1.0 + gp1 * l as f64;
    }
    1.0 + gp1 * (1.0 - gr1.powi(l as i32)) / (1.0 - gr1)
}

/// `P_s^(l)` for `s <= s_max`, with the probability beyond the truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitedDistribution {
    pub probs: Vec<f64>,
    pub tail: f64,
}

impl LimitedDistribution {
    fn from_series(h: &Series) -> Self {
        let probs = h.coeffs().to_vec();
        let tail = (1.0 - probs.iter().sum::<f64>()).max(0.0);
        LimitedDistribution { probs, tail }
    }

    pub fn mean_truncated(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(s, p)| s as f64 * p)
            .sum()
    }
}

/// Size distribution of the set reached within `l` hops, from
/// `h_P^(l) = x g_p(h_R^(l-1))`, `h_R^(l) = x g_r(h_R^(l-1))`, `h^(0) = x`,
/// iterated in truncated series arithmetic.
pub fn limited_gf_p(m: &DegreeModel, l: usize, s_max: usize) -> LimitedDistribution {
    let x = Series::monomial(1, s_max);
    if l == 0 {
        return LimitedDistribution::from_series(&x);
    }
    let p = m.table();
    let r: Vec<f64> = (0..p.len().saturating_sub(1))
        .map(|k| (k + 1) as f64 * p[k + 1] / m.mean())
        .collect();
    let mut h_r = x.clone();
    for _ in 1..l {
        h_r = Series::compose(&r, &h_r).shift(1);
    }
    LimitedDistribution::from_series(&Series::compose(p, &h_r).shift(1))
}

fn check_beta(beta: f64) -> Result<()> {
    check_domain("beta", beta, beta >= 0.0 && beta.is_finite(), "[0, inf)")
}

/// `<s_l>` on a small-world ring from
/// `<s_l> = <s_{l-1}> + 2 + 2 beta (<s_{l-1}> + <s_{l-2}>)`, `<s_0> = 1`,
/// `<s_-1> = 0`. Returns `<s_0>, ..., <s_l>`.
pub fn ws_limited_avg(beta: f64, l: usize) -> Result<Vec<f64>> {
    check_beta(beta)?;
    let mut out = vec![1.0];
    let mut prev2 = 0.0;
    for _ in 1..=l {
        let prev = *out.last().unwrap();
        out.push(prev + 2.0 + 2.0 * beta * (prev + prev2));
        prev2 = prev;
    }
    Ok(out)
}

/// `h_P^(l)(x) = x^(1+2l) exp(-2 beta [2l - 1 - h^(l-1) - 2 sum_{m<=l-2} h^(m)])`
/// truncated at `s_max`.
pub fn ws_limited_gf(beta: f64, l: usize, s_max: usize) -> Result<Series> {
    check_beta(beta)?;
    let mut levels: Vec<Series> = vec![Series::monomial(1, s_max)];
    for level in 1..=l {
        let mut bracket = Series::constant((2 * level) as f64 - 1.0, s_max);
        bracket = &bracket + &levels[level - 1].clone().scale(-1.0);
        for earlier in &levels[..level - 1] {
            bracket = &bracket + &earlier.clone().scale(-2.0);
        }
        let e = bracket.scale(-2.0 * beta).exp();
        levels.push(e.shift(1 + 2 * level));
    }
    Ok(levels.pop().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn average_examples() {
        let er2 = DegreeModel::poisson(2.0).unwrap();
        assert_eq!(limited_avg_size(&er2, 0), 1.0);
        assert!((limited_avg_size(&er2, 2) - 7.0).abs() < 1e-12);
        let critical = DegreeModel::poisson(1.0).unwrap();
        assert!((limited_avg_size(&critical, 5) - 6.0).abs() < 1e-9);
        let ring = DegreeModel::delta(2).unwrap();
        assert_eq!(limited_avg_size(&ring, 4), 9.0);
    }

    #[test]
    fn series_examples() {
        let ring = DegreeModel::delta(2).unwrap();
        assert_eq!(limited_gf_p(&ring, 0, 10).probs[1], 1.0);
        let d = limited_gf_p(&ring, 1, 10);
        assert!((d.probs[3] - 1.0).abs() < 1e-15);
        let d3 = limited_gf_p(&ring, 3, 10);
        assert!((d3.probs[7] - 1.0).abs() < 1e-15);

        let er1 = DegreeModel::poisson(1.0).unwrap();
        let d = limited_gf_p(&er1, 1, 30);
        for s in 1..=30 {
            assert!((d.probs[s] - er1.pk(s - 1)).abs() < 1e-14, "s={s}");
        }
    }

    #[test]
    fn series_mean_matches_closed_form() {
        let m = DegreeModel::poisson(1.5).unwrap();
        for l in 1..5 {
            let d = limited_gf_p(&m, l, 400);
            assert!(d.tail < 1e-10);
            assert!(
                (d.mean_truncated() - limited_avg_size(&m, l)).abs() < 1e-6,
                "l={l}"
            );
        }
    }

    #[test]
    fn ws_recurrence_examples() {
        let s = ws_limited_avg(0.2, 2).unwrap();
        assert!((s[1] - 3.4).abs() < 1e-12);
        assert!((s[2] - 7.16).abs() < 1e-12);
        let ring = ws_limited_avg(0.0, 6).unwrap();
        for (l, v) in ring.iter().enumerate() {
            assert_eq!(*v, 1.0 + 2.0 * l as f64);
        }
        assert!(ws_limited_avg(-0.1, 2).is_err());
    }

    #[test]
    fn ws_recurrence_first_form() {
        let beta = 0.3;
        let s = ws_limited_avg(beta, 12).unwrap();
        for l in 1..=12usize {
            let older: f64 = s[..l.saturating_sub(1)].iter().sum();
            let direct = 1.0 + 2.0 * l as f64 + 2.0 * beta * (s[l - 1] + 2.0 * older);
            assert!((s[l] - direct).abs() < 1e-9 * direct);
        }
    }

    #[test]
    fn ws_generating_function() {
        let pure = ws_limited_gf(0.0, 3, 20).unwrap();
        assert_eq!(pure.coeff(7), 1.0);
        assert!((pure.eval(1.0) - 1.0).abs() < 1e-15);
        for l in 1..=4 {
            let h = ws_limited_gf(0.2, l, 400).unwrap();
            assert!((h.eval(1.0) - 1.0).abs() < 1e-9, "l={l}");
            let avg = ws_limited_avg(0.2, l).unwrap()[l];
            assert!((h.derivative_at(1.0) - avg).abs() < 1e-7, "l={l}");
        }
    }
}
