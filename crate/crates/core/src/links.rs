//! Link-level quantities: singlet conversion probabilities of pure links and
//! the fidelity budget of Werner-state links.

use crate::error::{check_domain, Error, Result};

/// Pure two-qubit link; `lambda0` is the largest squared Schmidt coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureLink {
    pub lambda0: f64,
    pub copies: u32,
}

impl PureLink {
    pub fn new(lambda0: f64, copies: u32) -> Result<Self> {
        check_domain(
            "lambda0",
            lambda0,
            (0.5..=1.0).contains(&lambda0),
            "[1/2, 1]",
        )?;
        if !(1..=2).contains(&copies) {
            return Err(Error::InvalidParameter(format!(
                "only 1 or 2 copies per link are supported, got {copies}"
            )));
        }
        Ok(PureLink { lambda0, copies })
    }

    pub fn scp(&self) -> f64 {
        if self.copies == 1 {
            (2.0 * (1.0 - self.lambda0)).min(1.0)
        } else {
            (2.0 * (1.0 - self.lambda0 * self.lambda0)).min(1.0)
        }
    }
}

/// Singlet conversion probability of one copy.
pub fn scp_single(lambda0: f64) -> Result<f64> {
    Ok(PureLink::new(lambda0, 1)?.scp())
}

/// Singlet conversion probability of two copies.
pub fn scp_double(lambda0: f64) -> Result<f64> {
    Ok(PureLink::new(lambda0, 2)?.scp())
}

/// Two-copy SCP as a function of the one-copy SCP; saturates at 1 from
/// `phi1 = 2 - sqrt(2)` on.
pub fn phi2_of_phi1(phi1: f64) -> Result<f64> {
    check_domain("phi1", phi1, (0.0..=1.0).contains(&phi1), "[0, 1]")?;
    Ok(phi2_unchecked(phi1))
}

pub(crate) fn phi2_unchecked(phi1: f64) -> f64 {
    (2.0 * phi1 - 0.5 * phi1 * phi1).min(1.0)
}

/// Werner link with singlet fraction `F`; `alpha = (4F - 1) / 3` is the
/// weight of the singlet in the depolarised form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WernerLink {
    pub fidelity: f64,
    pub alpha: f64,
}

impl WernerLink {
    pub fn new(fidelity: f64) -> Result<Self> {
        Ok(WernerLink {
            fidelity,
            alpha: alpha_of_f(fidelity)?,
        })
    }
}

pub fn alpha_of_f(fidelity: f64) -> Result<f64> {
    check_domain(
        "F",
        fidelity,
        fidelity > 0.25 && fidelity <= 1.0,
        "(1/4, 1]",
    )?;
    Ok((4.0 * fidelity - 1.0) / 3.0)
}

/// Fidelity after teleporting across `l` Werner links.
pub fn fidelity_after_l(alpha: f64, l: u32) -> Result<f64> {
    check_domain("alpha", alpha, alpha > 0.0 && alpha <= 1.0, "(0, 1]")?;
    Ok(0.5 * (1.0 + alpha.powi(l as i32)))
}

/// Optimal teleportation fidelity for singlet fraction `F` in local dimension `d`.
pub fn teleport_fidelity(fidelity: f64, d: u32) -> Result<f64> {
    check_domain(
        "F",
        fidelity,
        fidelity > 0.25 && fidelity <= 1.0,
        "(1/4, 1]",
    )?;
    if d < 2 {
        return Err(Error::InvalidParameter(format!(
            "dimension must be >= 2, got {d}"
        )));
    }
    let d = f64::from(d);
    Ok((fidelity * d + 1.0) / (d + 1.0))
}

/// Longest admissible path for a required end-to-end fidelity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathBudget {
    Finite(u32),
    Infinite,
}

impl PathBudget {
    pub fn as_option(self) -> Option<usize> {
        match self {
            PathBudget::Finite(l) => Some(l as usize),
            PathBudget::Infinite => None,
        }
    }
}

/// `floor(ln(2 f_min - 1) / ln(alpha))`, the largest `l` with
/// `fidelity_after_l(alpha, l) >= f_min`.
pub fn max_path_length(f_min: f64, alpha: f64) -> Result<PathBudget> {
    check_domain("f_min", f_min, f_min > 0.5 && f_min < 1.0, "(1/2, 1)")?;
    check_domain("alpha", alpha, alpha > 0.0 && alpha <= 1.0, "(0, 1]")?;
    if alpha == 1.0 {
        return Ok(PathBudget::Infinite);
    }
    let ratio = (2.0 * f_min - 1.0).ln() / alpha.ln();
    if ratio >= f64::from(u32::MAX) {
        return Ok(PathBudget::Infinite);
    }
    let mut l = ratio.floor() as u32;
    // guard the floor against rounding at exact integer ratios
    if 0.5 * (1.0 + alpha.powi(l as i32)) < f_min && l > 0 {
        l -= 1;
    } else if 0.5 * (1.0 + alpha.powi(l as i32 + 1)) >= f_min {
        l += 1;
    }
    Ok(PathBudget::Finite(l))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scp_examples() {
        assert_eq!(scp_single(0.5).unwrap(), 1.0);
        assert_eq!(scp_double(0.5).unwrap(), 1.0);
        assert_eq!(scp_single(1.0).unwrap(), 0.0);
        assert_eq!(scp_double(1.0).unwrap(), 0.0);
        assert_eq!(scp_single(0.75).unwrap(), 0.5);
        assert_eq!(scp_double(0.75).unwrap(), 0.875);
        assert!(scp_single(0.4).is_err());
        assert!(PureLink::new(0.7, 3).is_err());
    }

    #[test]
    fn phi2_examples() {
        assert_eq!(phi2_of_phi1(0.0).unwrap(), 0.0);
        let knee = 2.0 - 2f64.sqrt();
        assert!((phi2_of_phi1(knee).unwrap() - 1.0).abs() < 1e-15);
        assert!((phi2_of_phi1(0.4).unwrap() - 0.72).abs() < 1e-15);
        // consistent with substituting lambda0 = 1 - phi1/2
        for phi1 in [0.1, 0.3, 0.5] {
            let via_lambda = scp_double(1.0 - phi1 / 2.0).unwrap();
            assert!((phi2_of_phi1(phi1).unwrap() - via_lambda).abs() < 1e-15);
        }
        assert_eq!(phi2_of_phi1(0.9).unwrap(), 1.0);
        assert!(phi2_of_phi1(1.1).is_err());
    }

    #[test]
    fn werner_examples() {
        assert_eq!(alpha_of_f(1.0).unwrap(), 1.0);
        for l in 0..10 {
            assert_eq!(fidelity_after_l(1.0, l).unwrap(), 1.0);
        }
        assert!((fidelity_after_l(0.9, 1).unwrap() - 0.95).abs() < 1e-15);
        assert_eq!(teleport_fidelity(1.0, 2).unwrap(), 1.0);
        assert!((teleport_fidelity(0.5, 2).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(alpha_of_f(0.2).is_err());
        assert!(teleport_fidelity(0.9, 1).is_err());
    }

    #[test]
    fn path_length_examples() {
        assert_eq!(
            max_path_length(2.0 / 3.0, 0.9).unwrap(),
            PathBudget::Finite(10)
        );
        assert_eq!(max_path_length(0.99, 0.5).unwrap(), PathBudget::Finite(0));
        assert_eq!(max_path_length(0.9, 1.0).unwrap(), PathBudget::Infinite);
        assert!(max_path_length(0.4, 0.9).is_err());
        assert!(max_path_length(0.9, 0.0).is_err());
    }

    #[test]
    fn path_length_sandwich_on_grid() {
        for i in 1..50 {
            let f_min = 0.5 + 0.5 * i as f64 / 50.0;
            for j in 1..50 {
                let alpha = j as f64 / 50.0;
                let PathBudget::Finite(l) = max_path_length(f_min, alpha).unwrap() else {
                    panic!("finite alpha gave infinite budget");
                };
                assert!(fidelity_after_l(alpha, l).unwrap() >= f_min);
                assert!(fidelity_after_l(alpha, l + 1).unwrap() < f_min);
            }
        }
    }

    #[test]
    fn fidelity_decreases_to_half() {
        let mut prev = fidelity_after_l(0.8, 0).unwrap();
        for l in 1..200 {
            let f = fidelity_after_l(0.8, l).unwrap();
            assert!(f < prev || (f - 0.5).abs() < 1e-15);
            prev = f;
        }
        assert!((prev - 0.5).abs() < 1e-15);
    }
}
