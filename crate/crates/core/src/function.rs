//! Transforms of a standard Gaussian variable.
//!
//! A [`FunctionSpec`] is a catalog base function composed with an affine map:
//! `eval(z) = base(shift + scale * z)`. Every catalog entry stays square
//! integrable against the Gaussian measure under any finite shift and any
//! positive scale, which is what the expansion and scan machinery assumes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite::hermite_poly;

/// Base function of a spec, before the affine map is applied.
#[derive(Debug, Clone, PartialEq)]
pub enum BaseFunction {
    /// Ordinary polynomial, coefficients in ascending degree.
    Polynomial(Vec<f64>),
    /// Finite combination of probabilists' Hermite polynomials, coefficient
    /// `c_m` at index `m`.
    HermiteCombo(Vec<f64>),
    /// `|u|`.
    Abs,
    /// `exp(u)`.
    Exp,
    /// `sign(u) * |u|^p` with `p > 0`.
    SignedPower(f64),
    /// `1` when `u > threshold`, else `0`.
    Indicator(f64),
}

impl BaseFunction {
    fn eval(&self, u: f64) -> f64 {
        match self {
            BaseFunction::Polynomial(c) => c.iter().rev().fold(0.0, |acc, &ck| acc * u + ck),
            BaseFunction::HermiteCombo(c) => c
                .iter()
                .enumerate()
                .map(|(m, &cm)| if cm == 0.0 { 0.0 } else { cm * hermite_poly(m, u) })
                .sum(),
            BaseFunction::Abs => u.abs(),
            BaseFunction::Exp => u.exp(),
            BaseFunction::SignedPower(p) => {
                if u == 0.0 {
                    0.0
                } else {
                    u.signum() * u.abs().powf(*p)
                }
            }
            BaseFunction::Indicator(threshold) => {
                if u > *threshold {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match self {
            BaseFunction::Polynomial(c) | BaseFunction::HermiteCombo(c) => {
                if c.is_empty() {
                    return Err(Error::InvalidSpec("coefficient vector is empty".into()));
                }
                if !finite(c) {
                    return Err(Error::InvalidSpec("non-finite coefficient".into()));
                }
            }
            BaseFunction::SignedPower(p) => {
                if !(p.is_finite() && *p > 0.0) {
                    return Err(Error::InvalidSpec(format!(
                        "signed power exponent must be positive and finite, got {p}"
                    )));
                }
            }
            BaseFunction::Indicator(threshold) => {
                if !threshold.is_finite() {
                    return Err(Error::InvalidSpec("indicator threshold must be finite".into()));
                }
            }
            BaseFunction::Abs | BaseFunction::Exp => {}
        }
        Ok(())
    }
}

/// A base function composed with the affine map `z -> shift + scale * z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecRepr", into = "SpecRepr")]
pub struct FunctionSpec {
    base: BaseFunction,
    shift: f64,
    scale: f64,
}

impl FunctionSpec {
    pub fn new(base: BaseFunction, shift: f64, scale: f64) -> Result<Self> {
        base.validate()?;
        if !shift.is_finite() {
            return Err(Error::InvalidSpec("shift must be finite".into()));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "scale must be positive and finite, got {scale}"
            )));
        }
        Ok(Self { base, shift, scale })
    }

    /// Base function with identity affine map.
    pub fn from_base(base: BaseFunction) -> Result<Self> {
        Self::new(base, 0.0, 1.0)
    }

    /// Polynomial with the given ascending coefficients and identity affine map.
    pub fn polynomial(coefficients: &[f64]) -> Result<Self> {
        Self::from_base(BaseFunction::Polynomial(coefficients.to_vec()))
    }

    /// Hermite combination `sum c_m H_m` with identity affine map.
    pub fn hermite_combo(coefficients: &[f64]) -> Result<Self> {
        Self::from_base(BaseFunction::HermiteCombo(coefficients.to_vec()))
    }

    pub fn eval(&self, z: f64) -> f64 {
        self.base.eval(self.shift + self.scale * z)
    }

    pub fn base(&self) -> &BaseFunction {
        &self.base
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Same base with a replaced affine map.
    pub fn with_affine(&self, shift: f64, scale: f64) -> Result<Self> {
        Self::new(self.base.clone(), shift, scale)
    }

    /// Composition with a further affine map: the result evaluates
    /// `self(x + y * z)`.
    pub fn perturbed(&self, x: f64, y: f64) -> Result<Self> {
        Self::new(
            self.base.clone(),
            self.shift + self.scale * x,
            self.scale * y,
        )
    }

    /// True for polynomial bases (plain or Hermite form).
    pub fn is_polynomial(&self) -> bool {
        matches!(
            self.base,
            BaseFunction::Polynomial(_) | BaseFunction::HermiteCombo(_)
        )
    }

    /// Default quadrature resolution for this spec. Indicator bases get a much
    /// denser rule because the discontinuity slows quadrature convergence.
    pub fn default_node_count(&self) -> usize {
        match self.base {
            BaseFunction::Indicator(_) => 2000,
            _ => 200,
        }
    }
}

impl std::fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let base = match &self.base {
            BaseFunction::Polynomial(c) => format!("poly{c:?}"),
            BaseFunction::HermiteCombo(c) => format!("hermite{c:?}"),
            BaseFunction::Abs => "abs".into(),
            BaseFunction::Exp => "exp".into(),
            BaseFunction::SignedPower(p) => format!("signed_power({p})"),
            BaseFunction::Indicator(a) => format!("indicator(>{a})"),
        };
        if self.shift == 0.0 && self.scale == 1.0 {
            write!(f, "{base}")
        } else {
            write!(f, "{base} @ ({} + {} z)", self.shift, self.scale)
        }
    }
}

/// Reference catalog used by scans, experiments and tests: one entry per base
/// kind plus the polynomials that have closed-form expansions.
pub fn catalog() -> Vec<(&'static str, FunctionSpec)> {
    vec![
        ("identity", FunctionSpec::polynomial(&[0.0, 1.0]).unwrap()),
        ("square", FunctionSpec::polynomial(&[0.0, 0.0, 1.0]).unwrap()),
        ("cube", FunctionSpec::polynomial(&[0.0, 0.0, 0.0, 1.0]).unwrap()),
        (
            "quartic_well",
            FunctionSpec::polynomial(&[0.0, 0.0, -2.0, 0.0, 1.0]).unwrap(),
        ),
        ("hermite2", FunctionSpec::hermite_combo(&[0.0, 0.0, 1.0]).unwrap()),
        (
            "hermite3",
            FunctionSpec::hermite_combo(&[0.0, 0.0, 0.0, 1.0]).unwrap(),
        ),
        (
            "hermite4",
            FunctionSpec::hermite_combo(&[0.0, 0.0, 0.0, 0.0, 1.0]).unwrap(),
        ),
        ("abs", FunctionSpec::from_base(BaseFunction::Abs).unwrap()),
        ("exp", FunctionSpec::from_base(BaseFunction::Exp).unwrap()),
        (
            "signed_power_1_5",
            FunctionSpec::from_base(BaseFunction::SignedPower(1.5)).unwrap(),
        ),
        (
            "indicator_half",
            FunctionSpec::from_base(BaseFunction::Indicator(0.5)).unwrap(),
        ),
    ]
}

// --- JSON wire form -------------------------------------------------------
//
// {"base": {"kind": "poly", "params": [0, 0, 1]}, "shift": 0.0, "scale": 1.0}
//
// shift and scale default to 0 and 1 when omitted. Kinds: poly, hermite, abs,
// exp, signed_power, indicator.

#[derive(Serialize, Deserialize)]
struct SpecRepr {
    base: BaseRepr,
    #[serde(default)]
    shift: f64,
    #[serde(default = "default_scale")]
    scale: f64,
}

#[derive(Serialize, Deserialize)]
struct BaseRepr {
    kind: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    params: Vec<f64>,
}

fn default_scale() -> f64 {
    1.0
}

impl TryFrom<SpecRepr> for FunctionSpec {
    type Error = Error;

    fn try_from(repr: SpecRepr) -> Result<Self> {
        let BaseRepr { kind, params } = repr.base;
        let expect_one = |params: &[f64]| -> Result<f64> {
            if params.len() == 1 {
                Ok(params[0])
            } else {
                Err(Error::InvalidSpec(format!(
                    "kind '{kind}' takes exactly one parameter, got {}",
                    params.len()
                )))
            }
        };
        let base = match kind.as_str() {
            "poly" | "polynomial" => BaseFunction::Polynomial(params),
            "hermite" | "hermite_combo" => BaseFunction::HermiteCombo(params),
            "abs" | "exp" => {
                if !params.is_empty() {
                    return Err(Error::InvalidSpec(format!(
                        "kind '{kind}' takes no parameters"
                    )));
                }
                if kind == "abs" {
                    BaseFunction::Abs
                } else {
                    BaseFunction::Exp
                }
            }
            "signed_power" => BaseFunction::SignedPower(expect_one(&params)?),
            "indicator" => BaseFunction::Indicator(expect_one(&params)?),
            other => {
                return Err(Error::InvalidSpec(format!("unknown base kind '{other}'")));
            }
        };
        FunctionSpec::new(base, repr.shift, repr.scale)
    }
}

impl From<FunctionSpec> for SpecRepr {
    fn from(spec: FunctionSpec) -> Self {
        let base = match spec.base {
            BaseFunction::Polynomial(c) => BaseRepr {
                kind: "poly".into(),
                params: c,
            },
            BaseFunction::HermiteCombo(c) => BaseRepr {
                kind: "hermite".into(),
                params: c,
            },
            BaseFunction::Abs => BaseRepr {
                kind: "abs".into(),
                params: vec![],
            },
            BaseFunction::Exp => BaseRepr {
                kind: "exp".into(),
                params: vec![],
            },
            BaseFunction::SignedPower(p) => BaseRepr {
                kind: "signed_power".into(),
                params: vec![p],
            },
            BaseFunction::Indicator(a) => BaseRepr {
                kind: "indicator".into(),
                params: vec![a],
            },
        };
        SpecRepr {
            base,
            shift: spec.shift,
            scale: spec.scale,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_identity_matches_base() {
        let spec = FunctionSpec::polynomial(&[1.0, -2.0, 0.5]).unwrap();
        for z in [-2.3, -0.4, 0.0, 1.7] {
            let direct = 1.0 - 2.0 * z + 0.5 * z * z;
            assert!((spec.eval(z) - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn affine_composition() {
        let spec = FunctionSpec::new(BaseFunction::Abs, 0.5, 2.0).unwrap();
        let composed = spec.perturbed(0.3, 1.5).unwrap();
        for z in [-1.0, 0.2, 2.0] {
            assert!((composed.eval(z) - spec.eval(0.3 + 1.5 * z)).abs() < 1e-14);
        }
    }

    #[test]
    fn signed_power_is_odd_and_zero_at_zero() {
        let spec = FunctionSpec::from_base(BaseFunction::SignedPower(1.5)).unwrap();
        assert_eq!(spec.eval(0.0), 0.0);
        assert!((spec.eval(2.0) + spec.eval(-2.0)).abs() < 1e-14);
        assert!(spec.eval(2.0) > 0.0);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(FunctionSpec::polynomial(&[]).is_err());
        assert!(FunctionSpec::new(BaseFunction::Abs, 0.0, 0.0).is_err());
        assert!(FunctionSpec::new(BaseFunction::Abs, 0.0, -1.0).is_err());
        assert!(FunctionSpec::new(BaseFunction::Abs, f64::NAN, 1.0).is_err());
        assert!(FunctionSpec::from_base(BaseFunction::SignedPower(-2.0)).is_err());
    }

    #[test]
    fn json_wire_form_with_defaults() {
        let spec: FunctionSpec =
            serde_json::from_str(r#"{"base":{"kind":"poly","params":[0,0,1]}}"#).unwrap();
        assert_eq!(spec.shift(), 0.0);
        assert_eq!(spec.scale(), 1.0);
        assert!((spec.eval(2.0) - 4.0).abs() < 1e-15);

        let explicit: FunctionSpec = serde_json::from_str(
            r#"{"base":{"kind":"indicator","params":[0.5]},"shift":-0.25,"scale":2.0}"#,
        )
        .unwrap();
        assert_eq!(explicit.eval(1.0), 1.0);
        assert_eq!(explicit.eval(0.0), 0.0);
    }

    #[test]
    fn json_rejects_unknown_kind_and_bad_scale() {
        assert!(serde_json::from_str::<FunctionSpec>(r#"{"base":{"kind":"tanh"}}"#).is_err());
        assert!(serde_json::from_str::<FunctionSpec>(
            r#"{"base":{"kind":"abs"},"scale":-1.0}"#
        )
        .is_err());
    }
}
