use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which half of the real line a utility function is active on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Gain,
    Loss,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UtilityKind {
    Identity,
    /// `|x|^exponent` on the active side.
    Power(f64),
}

/// A CPT utility: maps outcomes on its active side to a non-negative magnitude
/// and everything else to zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UtilityFunction {
    side: Side,
    kind: UtilityKind,
}

impl UtilityFunction {
    pub fn new(side: Side, kind: UtilityKind) -> Result<Self> {
        if let UtilityKind::Power(e) = kind {
            if !(e.is_finite() && e > 0.0) {
                return Err(Error::InvalidRiskSpec(format!(
                    "utility exponent must be a positive real, got {e}"
                )));
            }
        }
        Ok(Self { side, kind })
    }

    pub fn identity(side: Side) -> Self {
        Self {
            side,
            kind: UtilityKind::Identity,
        }
    }

    pub fn power(side: Side, exponent: f64) -> Result<Self> {
        Self::new(side, UtilityKind::Power(exponent))
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn kind(&self) -> UtilityKind {
        self.kind
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.kind, UtilityKind::Identity)
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let magnitude = match self.side {
            Side::Gain if x > 0.0 => x,
            Side::Loss if x < 0.0 => -x,
            _ => return 0.0,
        };
        match self.kind {
            UtilityKind::Identity => magnitude,
            UtilityKind::Power(e) => magnitude.powf(e),
        }
    }
}

/// Probability weighting (distortion) function on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightingFunction {
    Identity,
    /// `k^eta / (k^eta + (1 - k)^eta)^(1 / eta)`
    TverskyKahneman(f64),
    /// `exp(-(-ln k)^eta)`, extended by continuity with `w(0) = 0`.
    Prelec(f64),
}

impl WeightingFunction {
    pub fn tversky_kahneman(eta: f64) -> Result<Self> {
        let w = Self::TverskyKahneman(eta);
        w.validate()?;
        Ok(w)
    }

    pub fn prelec(eta: f64) -> Result<Self> {
        check_eta(eta)?;
        Ok(Self::Prelec(eta))
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Identity => Ok(()),
            Self::TverskyKahneman(eta) => {
                check_eta(eta)?;
                if eta < TK_MIN_ETA {
                    return Err(Error::InvalidRiskSpec(format!(
                        "tversky_kahneman weighting is not monotone for eta < {TK_MIN_ETA}, got {eta}"
                    )));
                }
                Ok(())
            }
            Self::Prelec(eta) => check_eta(eta),
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, Self::Identity)
    }

    /// Evaluates the weight of a cumulative probability. Arguments are
    /// clamped to `[0, 1]` so that rounding in callers cannot leave the domain.
    #[inline]
    pub fn eval(&self, kappa: f64) -> f64 {
        let k = kappa.clamp(0.0, 1.0);
        match *self {
            Self::Identity => k,
            Self::TverskyKahneman(eta) => {
                if k == 0.0 {
                    return 0.0;
                }
                if k == 1.0 {
                    return 1.0;
                }
                let num = k.powf(eta);
                num / (num + (1.0 - k).powf(eta)).powf(1.0 / eta)
            }
            Self::Prelec(eta) => {
                if k == 0.0 {
                    0.0
                } else {
                    (-(-k.ln()).powf(eta)).exp()
                }
            }
        }
    }
}

/// Below roughly 0.279 the Tversky-Kahneman form stops being monotone.
const TK_MIN_ETA: f64 = 0.28;

fn check_eta(eta: f64) -> Result<()> {
    if eta.is_finite() && eta > 0.0 && eta <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidRiskSpec(format!(
            "weighting parameter eta must lie in (0, 1], got {eta}"
        )))
    }
}

/// Utility and weighting functions that together define a CPT-value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CptSpec {
    pub u_plus: UtilityFunction,
    pub u_minus: UtilityFunction,
    pub w_plus: WeightingFunction,
    pub w_minus: WeightingFunction,
}

impl CptSpec {
    pub fn new(
        u_plus: UtilityFunction,
        u_minus: UtilityFunction,
        w_plus: WeightingFunction,
        w_minus: WeightingFunction,
    ) -> Result<Self> {
        if u_plus.side() != Side::Gain {
            return Err(Error::InvalidRiskSpec("u_plus must be a gain utility".into()));
        }
        if u_minus.side() != Side::Loss {
            return Err(Error::InvalidRiskSpec("u_minus must be a loss utility".into()));
        }
        w_plus.validate()?;
        w_minus.validate()?;
        Ok(Self {
            u_plus,
            u_minus,
            w_plus,
            w_minus,
        })
    }

    /// Identity utilities and weights: the CPT-value is then the mean.
    pub fn identity() -> Self {
        Self {
            u_plus: UtilityFunction::identity(Side::Gain),
            u_minus: UtilityFunction::identity(Side::Loss),
            w_plus: WeightingFunction::Identity,
            w_minus: WeightingFunction::Identity,
        }
    }

    /// Power utilities with Tversky-Kahneman weights on both sides.
    pub fn power_tversky_kahneman(
        gain_exponent: f64,
        loss_exponent: f64,
        eta_plus: f64,
        eta_minus: f64,
    ) -> Result<Self> {
        Self::new(
            UtilityFunction::power(Side::Gain, gain_exponent)?,
            UtilityFunction::power(Side::Loss, loss_exponent)?,
            WeightingFunction::tversky_kahneman(eta_plus)?,
            WeightingFunction::tversky_kahneman(eta_minus)?,
        )
    }

    /// The classic 1992 estimates: exponents 0.88, eta 0.61 for gains and
    /// 0.69 for losses. These are the parameters of the gridworld experiments.
    pub fn tversky_kahneman_1992() -> Self {
        Self::power_tversky_kahneman(0.88, 0.88, 0.61, 0.69).expect("constants are valid")
    }

    pub fn reduces_to_expectation(&self) -> bool {
        self.u_plus.is_identity()
            && self.u_minus.is_identity()
            && self.w_plus.is_identity()
            && self.w_minus.is_identity()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gain_utility_vanishes_off_side() {
        let u = UtilityFunction::power(Side::Gain, 0.88).unwrap();
        assert_eq!(u.eval(-3.0), 0.0);
        assert_eq!(u.eval(0.0), 0.0);
        assert!((u.eval(4.0) - 4f64.powf(0.88)).abs() < 1e-15);
    }

    #[test]
    fn loss_utility_is_nonnegative_magnitude() {
        let u = UtilityFunction::power(Side::Loss, 0.88).unwrap();
        assert_eq!(u.eval(2.0), 0.0);
        assert_eq!(u.eval(0.0), 0.0);
        assert!((u.eval(-4.0) - 4f64.powf(0.88)).abs() < 1e-15);
        assert!(u.eval(-5.0) > u.eval(-4.0));
        assert_eq!(UtilityFunction::identity(Side::Loss).eval(-2.5), 2.5);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(UtilityFunction::power(Side::Gain, 0.0).is_err());
        assert!(UtilityFunction::power(Side::Gain, f64::NAN).is_err());
        assert!(WeightingFunction::tversky_kahneman(0.0).is_err());
        assert!(WeightingFunction::prelec(1.5).is_err());
        assert!(WeightingFunction::tversky_kahneman(0.2).is_err());
        assert!(WeightingFunction::prelec(0.2).is_ok());
        assert!(CptSpec::new(
            UtilityFunction::identity(Side::Loss),
            UtilityFunction::identity(Side::Loss),
            WeightingFunction::Identity,
            WeightingFunction::Identity,
        )
        .is_err());
    }

    #[test]
    fn weighting_endpoints() {
        for w in [
            WeightingFunction::Identity,
            WeightingFunction::TverskyKahneman(0.61),
            WeightingFunction::TverskyKahneman(0.69),
            WeightingFunction::Prelec(0.65),
            WeightingFunction::TverskyKahneman(1.0),
        ] {
            assert_eq!(w.eval(0.0), 0.0, "{w:?}");
            assert!((w.eval(1.0) - 1.0).abs() < 1e-15, "{w:?}");
        }
    }

    #[test]
    fn tversky_kahneman_inverted_s() {
        let w = WeightingFunction::TverskyKahneman(0.61);
        // small probabilities inflated, large ones deflated
        assert!(w.eval(0.05) > 0.05);
        assert!(w.eval(0.9) < 0.9);
        let k: f64 = 0.1;
        let expected = k.powf(0.61) / (k.powf(0.61) + 0.9f64.powf(0.61)).powf(1.0 / 0.61);
        assert_eq!(w.eval(k), expected);
    }

    #[test]
    fn prelec_matches_formula() {
        let w = WeightingFunction::Prelec(0.5);
        let k: f64 = 0.3;
        assert!((w.eval(k) - (-(-k.ln()).sqrt()).exp()).abs() < 1e-15);
    }

    #[test]
    fn identity_flag() {
        assert!(CptSpec::identity().reduces_to_expectation());
        assert!(!CptSpec::tversky_kahneman_1992().reduces_to_expectation());
    }

    proptest::proptest! {
        #[test]
        fn weighting_is_monotone_in_unit_interval(
            a in 0.0f64..=1.0,
            b in 0.0f64..=1.0,
            eta in 0.28f64..=1.0,
        ) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            for w in [WeightingFunction::TverskyKahneman(eta), WeightingFunction::Prelec(eta)] {
                let (wl, wh) = (w.eval(lo), w.eval(hi));
                proptest::prop_assert!((0.0..=1.0).contains(&wl));
                proptest::prop_assert!((0.0..=1.0).contains(&wh));
                proptest::prop_assert!(wl <= wh + 1e-12, "{:?}: w({}) = {} > w({}) = {}", w, lo, wl, hi, wh);
            }
        }
    }
}
