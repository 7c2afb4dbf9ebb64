use std::f64::consts::E;

use crate::error::{check_domain, Result};

const BRANCH_POINT: f64 = -1.0 / E;

/// Principal branch `W0(x)` for `x >= -1/e`, by Halley iteration.
pub fn lambert_w0(x: f64) -> Result<f64> {
    // arguments a rounding error below the branch point are taken as on it
    check_domain(
        "x",
        x,
        x.is_finite() && x >= BRANCH_POINT - 1e-15,
        "[-1/e, inf)",
    )?;
    if x <= BRANCH_POINT {
        return Ok(-1.0);
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let mut w = seed(x);
    for _ in 0..100 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1.abs() < 1e-300 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * (1.0 + w.abs()) {
            break;
        }
    }
    Ok(w)
}

fn seed(x: f64) -> f64 {
    if x < -0.25 {
        // expansion about the branch point
        let p = (2.0 * (E * x + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if x.abs() < 0.25 {
        x * (1.0 - x * (1.0 - 1.5 * x))
    } else {
        let l = x.ln_1p();
        l * (1.0 - (1.0 + l).ln() / (2.0 + l))
    }
}

/// Giant component of a Poisson graph with edge occupation `phi2`:
/// `S = 1 + W0(-a e^{-a}) / a`, `a = z phi2`.
pub fn er_s_lambert_w(z: f64, phi2: f64) -> Result<f64> {
    check_domain("phi2", phi2, (0.0..=1.0).contains(&phi2), "[0, 1]")?;
    let a = z * phi2;
    check_domain("z phi2", a, a > 0.0 && a.is_finite(), "(0, inf)")?;
    if a <= 1.0 {
        // the principal branch returns -a itself
        return Ok(0.0);
    }
    let w = lambert_w0(-a * (-a).exp())?;
    Ok((1.0 + w / a).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_relation() {
        for &x in &[
            -0.3678, -0.3, -0.1, -1e-6, 1e-8, 0.2, 1.0, 2.5, 10.0, 1e3, 1e10,
        ] {
            let w = lambert_w0(x).unwrap();
            assert!(
                (w * w.exp() - x).abs() <= 1e-13 * x.abs().max(1e-3),
                "x={x}"
            );
            assert!(w >= -1.0);
        }
        assert_eq!(lambert_w0(BRANCH_POINT).unwrap(), -1.0);
        assert!((lambert_w0(E).unwrap() - 1.0).abs() < 1e-15);
        assert!(lambert_w0(-0.4).is_err());
    }

    #[test]
    fn er_examples() {
        assert_eq!(er_s_lambert_w(2.0, 0.5).unwrap(), 0.0);
        assert_eq!(er_s_lambert_w(0.8, 1.0).unwrap(), 0.0);
        let s = er_s_lambert_w(2.0, 1.0).unwrap();
        assert!((s - (1.0 - (-2.0 * s).exp())).abs() < 1e-14);
        assert!((s - 0.7968).abs() < 1e-4);
        assert!((er_s_lambert_w(2.5, 1.0).unwrap() - 0.8926).abs() < 1e-4);
        assert!(er_s_lambert_w(0.0, 1.0).is_err());
    }
}
