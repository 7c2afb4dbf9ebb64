//! Generating-function solutions on locally tree-like networks: giant
//! components before and after q-swaps, percolation thresholds, gains, and
//! limited-path cluster sizes.
//!
//! The edge recursion at `x = 1` is a map `u -> F(u)` on `[0, 1]` that is a
//! power series in `u` with non-negative coefficients and `F(1) = 1`. It is
//! therefore convex, and Newton's method on `F(u) - u` started at `u = 0`
//! increases monotonically to the smallest root without overshooting it.

mod lambert;
mod limited;

use std::collections::BTreeMap;

pub use lambert::{er_s_lambert_w, lambert_w0};
pub use limited::{
    limited_avg_size, limited_gf_p, ws_limited_avg, ws_limited_gf, LimitedDistribution,
    DEFAULT_S_MAX,
};

use crate::degree::DegreeModel;
use crate::error::{check_domain, Error, Result};
use crate::links::phi2_unchecked;
use crate::qswap::SwapStrategy;

pub const FIXED_POINT_TOL: f64 = 1e-12;
pub const FIXED_POINT_MAX_ITER: usize = 1_000_000;
/// `u` must fall this far below 1 to count as percolating.
pub const THRESHOLD_EPS: f64 = 1e-8;
/// Width of the final bisection bracket.
pub const THRESHOLD_BRACKET: f64 = 1e-9;
/// Supercritical slopes `F'(1)` within this of 1 are treated as critical.
pub const CRITICAL_SLOPE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointResult {
    /// Probability that an edge leads to a finite component.
    pub u: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `|F(u) - u|` at the returned `u`.
    pub residual: f64,
}

/// Smallest root of `u = F(u)` on `[0, 1]`; `f` returns `(F(u), F'(u))`.
fn smallest_fixed_point(
    what: &'static str,
    f: impl Fn(f64) -> (f64, f64),
) -> Result<FixedPointResult> {
    let mut u = 0.0f64;
    for it in 1..=FIXED_POINT_MAX_ITER {
        let (fu, dfu) = f(u);
        let residual = fu - u;
        let slope = dfu - 1.0;
        let mut next = fu;
        if slope < 0.0 {
            next = next.max(u - residual / slope);
        }
        let mut next = next.clamp(0.0, 1.0);
        if 1.0 - next <= FIXED_POINT_TOL {
            next = 1.0;
        }
        let step = (next - u).abs();
        u = next;
        if step <= FIXED_POINT_TOL && residual.abs() <= FIXED_POINT_TOL {
            return Ok(FixedPointResult {
                u,
                iterations: it,
                converged: true,
                residual: (f(u).0 - u).abs(),
            });
        }
    }
    Err(Error::NoConvergence {
        what,
        iterations: FIXED_POINT_MAX_ITER,
    })
}

/// `u = 1 - phi2 + phi2 g_r(u)`.
pub fn solve_u(phi2: f64, m: &DegreeModel) -> Result<FixedPointResult> {
    check_domain("phi2", phi2, (0.0..=1.0).contains(&phi2), "[0, 1]")?;
    // F is convex with F(1) = 1, so F'(1) <= 1 leaves u = 1 as the smallest
    // root unless F is linear. Iterating there only resolves u to sqrt(eps).
    let curved = m.table().iter().skip(3).any(|&p| p > 0.0);
    let slope = phi2 * m.excess_mean();
    if slope < 1.0 || (curved && slope <= 1.0 + CRITICAL_SLOPE_TOL) {
        return Ok(FixedPointResult {
            u: 1.0,
            iterations: 0,
            converged: true,
            residual: 0.0,
        });
    }
    smallest_fixed_point("edge recursion", |u| {
        (1.0 - phi2 + phi2 * m.gr_raw(u), phi2 * m.gr_prime_raw(u))
    })
}

/// `S = 1 - g_p(u)`.
pub fn giant_s(phi2: f64, m: &DegreeModel) -> Result<f64> {
    let u = solve_u(phi2, m)?.u;
    Ok((1.0 - m.gp_raw(u)).max(0.0))
}

/// `1 / g_r'(1)`; values above 1 mean no percolation for any occupation.
pub fn critical_phi2(m: &DegreeModel) -> Result<f64> {
    let g = m.excess_mean();
    if g <= 0.0 {
        return Err(Error::DivisionByZero("critical_phi2"));
    }
    Ok(1.0 / g)
}

/// Coefficients of the cycle polynomial `C_q(y)`: the surviving arc of a
/// q-cycle through the arrival vertex has `l` further vertices.
fn cycle_coeffs(q: usize, phi1: f64) -> Vec<f64> {
    let mut c: Vec<f64> = (0..=q - 2)
        .map(|l| (l + 1) as f64 * phi1.powi(l as i32) * (1.0 - phi1).powi(2))
        .collect();
    c.push(q as f64 * phi1.powi(q as i32 - 1) * (1.0 - phi1) + phi1.powi(q as i32));
    c
}

fn poly_and_derivative(c: &[f64], y: f64) -> (f64, f64) {
    let mut v = 0.0;
    let mut d = 0.0;
    for &ck in c.iter().rev() {
        d = d * y + v;
        v = v * y + ck;
    }
    (v, d)
}

/// `C_q(y)` at a given `y`.
pub fn cycle_gf(q: usize, phi1: f64, y: f64) -> f64 {
    poly_and_derivative(&cycle_coeffs(q, phi1), y).0
}

struct SwapTerm {
    q: usize,
    /// `Pi_q r_{q-1}`
    weight: f64,
    cycle: Vec<f64>,
}

fn swap_terms(phi1: f64, m: &DegreeModel, strategy: &SwapStrategy) -> Vec<SwapTerm> {
    strategy
        .iter()
        .map(|(q, pi)| SwapTerm {
            q,
            weight: pi * m.rk(q - 1),
            cycle: cycle_coeffs(q, phi1),
        })
        .collect()
}

/// Right-hand side of the swapped edge recursion at `x = 1` and its slope.
fn swapped_map(phi2: f64, m: &DegreeModel, terms: &[SwapTerm], u: f64) -> (f64, f64) {
    let y = m.gr_raw(u);
    let dy = m.gr_prime_raw(u);
    let mut f = 1.0 - phi2 + phi2 * y;
    let mut df = phi2 * dy;
    for t in terms {
        let (c, dc) = poly_and_derivative(&t.cycle, y);
        let tail = u.powi(t.q as i32 - 1);
        let dtail = (t.q - 1) as f64 * u.powi(t.q as i32 - 2);
        f += t.weight * (phi2 - 1.0 - phi2 * tail + c);
        df += t.weight * (-phi2 * dtail + dc * dy);
    }
    (f, df)
}

/// Smallest root of the q-swapped edge recursion, with original edges at
/// `phi2(phi1)` and newborn cycle edges at `phi1`.
pub fn solve_u_tilde(
    phi1: f64,
    m: &DegreeModel,
    strategy: &SwapStrategy,
) -> Result<FixedPointResult> {
    check_domain("phi1", phi1, (0.0..=1.0).contains(&phi1), "[0, 1]")?;
    let phi2 = phi2_unchecked(phi1);
    let terms = swap_terms(phi1, m, strategy);
    smallest_fixed_point("swapped edge recursion", |u| {
        swapped_map(phi2, m, &terms, u)
    })
}

/// `S~ = 1 - g_p(u~) - sum_q Pi_q eta_q p_q (1 - u~^q)`.
pub fn giant_s_tilde(
    phi1: f64,
    m: &DegreeModel,
    strategy: &SwapStrategy,
    eta: &BTreeMap<usize, f64>,
) -> Result<f64> {
    let u = solve_u_tilde(phi1, m, strategy)?.u;
    let mut hp = m.gp_raw(u);
    for (q, pi) in strategy.iter() {
        let e = eta
            .get(&q)
            .copied()
            .ok_or_else(|| Error::InvalidParameter(format!("no eta given for q={q}")))?;
        check_domain("eta", e, (0.0..=1.0).contains(&e), "[0, 1]")?;
        hp += pi * e * m.pk(q) * (1.0 - u.powi(q as i32));
    }
    Ok((1.0 - hp).max(0.0))
}

/// Normalised giant component `S~ S_1 / S~_1`.
pub fn s_hat(s_tilde: f64, s1: f64, s_tilde1: f64) -> Result<f64> {
    if s_tilde1 <= 0.0 {
        return Err(Error::DivisionByZero("s_hat"));
    }
    Ok(s_tilde * s1 / s_tilde1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdKind {
    ClassicalPhi1,
    ClassicalPhi2,
    SwappedPhi1,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdResult {
    pub phi_star: f64,
    pub kind: ThresholdKind,
    pub bracket_width: f64,
}

/// Bisection on `phi1` for the onset of `u < 1 - eps`, optionally after q-swaps.
pub fn find_threshold(m: &DegreeModel, strategy: Option<&SwapStrategy>) -> Result<ThresholdResult> {
    find_threshold_with(m, strategy, THRESHOLD_BRACKET)
}

pub fn find_threshold_with(
    m: &DegreeModel,
    strategy: Option<&SwapStrategy>,
    bracket: f64,
) -> Result<ThresholdResult> {
    let strategy = strategy.filter(|s| !s.is_empty());
    let percolates = |phi1: f64| -> Result<bool> {
        let u = match strategy {
            Some(s) => solve_u_tilde(phi1, m, s)?.u,
            None => solve_u(phi2_unchecked(phi1), m)?.u,
        };
        Ok(u < 1.0 - THRESHOLD_EPS)
    };
    if !percolates(1.0)? {
        return Err(Error::NoTransition);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > bracket {
        let mid = 0.5 * (lo + hi);
        if percolates(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(ThresholdResult {
        phi_star: 0.5 * (lo + hi),
        kind: if strategy.is_some() {
            ThresholdKind::SwappedPhi1
        } else {
            ThresholdKind::ClassicalPhi1
        },
        bracket_width: hi - lo,
    })
}

/// Relative threshold change. `signed` is negative when the swap lowers the
/// threshold; `magnitude` is what is usually quoted as the gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gain {
    pub signed: f64,
    pub magnitude: f64,
}

pub fn gain(phi1_star: f64, phi1_star_tilde: f64) -> Result<Gain> {
    if phi1_star <= 0.0 {
        return Err(Error::DivisionByZero("gain"));
    }
    let signed = (phi1_star_tilde - phi1_star) / phi1_star;
    Ok(Gain {
        signed,
        magnitude: signed.abs(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimalStrategy {
    pub strategy: SwapStrategy,
    pub classical: ThresholdResult,
    pub swapped: ThresholdResult,
    pub gain: Gain,
}

/// Exhaustive search over all-or-nothing strategies on degrees `2..=q_max`
/// for the lowest swapped threshold.
pub fn optimal_strategy(m: &DegreeModel, q_max: usize) -> Result<OptimalStrategy> {
    if !(2..=16).contains(&q_max) {
        return Err(Error::InvalidParameter(format!(
            "q_max must lie in 2..=16, got {q_max}"
        )));
    }
    let classical = find_threshold(m, None)?;
    let candidates: Vec<usize> = (2..=q_max).filter(|&q| m.pk(q) > 0.0).collect();
    let mut best: Option<(SwapStrategy, ThresholdResult)> = None;
    for mask in 1u32..(1 << candidates.len()) {
        let degrees: Vec<usize> = candidates
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &q)| q)
            .collect();
        let strategy = SwapStrategy::all(&degrees)?;
        let t = match find_threshold(m, Some(&strategy)) {
            Ok(t) => t,
            Err(Error::NoTransition) => continue,
            Err(e) => return Err(e),
        };
        if best.as_ref().is_none_or(|(_, b)| t.phi_star < b.phi_star) {
            best = Some((strategy, t));
        }
    }
    let (strategy, swapped) = best.ok_or(Error::NoTransition)?;
    // a strategy that raises the threshold is never optimal
    let (strategy, swapped) = if swapped.phi_star < classical.phi_star {
        (strategy, swapped)
    } else {
        (SwapStrategy::none(), classical)
    };
    Ok(OptimalStrategy {
        gain: gain(classical.phi_star, swapped.phi_star)?,
        strategy,
        classical,
        swapped,
    })
}

/// `1 / (q - 1)` against the swapped critical condition on a Bethe lattice of
/// coordination `q` with every vertex swapped, written as
/// `(1 - phi1)^-1 {2 phi1 + phi1^q [phi1 (q - 1) - (q + 1)]} - 1 / (q - 1)`.
pub fn bethe_swap_residual(q: usize, phi1: f64) -> f64 {
    let qf = q as f64;
    (2.0 * phi1 + phi1.powi(q as i32) * (phi1 * (qf - 1.0) - (qf + 1.0))) / (1.0 - phi1)
        - 1.0 / (qf - 1.0)
}

/// Root of [`bethe_swap_residual`] in `(0, 1)` by bisection.
pub fn bethe_swap_threshold(q: usize) -> Result<f64> {
    if q < 3 {
        return Err(Error::NoTransition);
    }
    bisect(|p| bethe_swap_residual(q, p), 0.0, 1.0 - 1e-9, 1e-13)
}

/// Critical condition after 2-swaps on a Poisson graph:
/// `phi2 + e^-z [-phi2 + z (2 phi1 - phi1^2)] - 1/z`.
pub fn er_two_swap_residual(z: f64, phi1: f64) -> f64 {
    let phi2 = phi2_unchecked(phi1);
    phi2 + (-z).exp() * (-phi2 + z * (2.0 * phi1 - phi1 * phi1)) - 1.0 / z
}

/// Critical condition after 3-swaps on a Poisson graph:
/// `phi2 + z e^-z [-phi2 + z (phi1 + phi1^2 - phi1^3)] - 1/z`.
pub fn er_three_swap_residual(z: f64, phi1: f64) -> f64 {
    let phi2 = phi2_unchecked(phi1);
    phi2 + z * (-z).exp() * (-phi2 + z * (phi1 + phi1 * phi1 - phi1.powi(3))) - 1.0 / z
}

/// Sign-change bisection on `[lo, hi]`.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let flo = f(lo);
    if flo.signum() == f(hi).signum() {
        return Err(Error::NoTransition);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
