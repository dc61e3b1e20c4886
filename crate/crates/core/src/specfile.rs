//! Strict JSON body and profile specs.
//!
//! Wire format (unknown keys are errors):
//!
//! ```json
//! {"type":"ball","dim":4,"capacity":1.0}
//! {"type":"ellipsoid","a":[1,2]}
//! {"type":"polydisc","a":[1,2]}
//! {"type":"box","half_widths":[1,1]}
//! {"type":"pproduct","p":1.5,"factors":[{"type":"ellipsoid","a":[1]}, ...]}
//! {"type":"toric","profile":{"type":"simplex","a":[1,2]}}
//! ```
//!
//! Profiles: `{"type":"simplex","a":[...]}`, `{"type":"box","a":[...]}`,
//! `{"type":"lp_orthant","power":s,"radii":[...]}`. The p exponent is a
//! number or the string `"inf"`.

use crate::bodies::{BodyError, BodyOracle, PProductSpec};
use crate::exponent::PExponent;
use crate::toric::{ProfileShape, ToricError, ToricProfile};
use serde::Deserialize;
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("spec is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("spec schema violation: {0}")]
    Schema(String),
    #[error("invalid body parameters: {0}")]
    Body(#[from] BodyError),
    #[error("invalid profile parameters: {0}")]
    Toric(#[from] ToricError),
    #[error("body failed invariant sampling at load: {0}")]
    Invariant(String),
}

/// A parsed spec: either a plain body, or a toric profile together with
/// the body it induces.
#[derive(Clone, Debug)]
pub enum ParsedBody {
    Body(BodyOracle),
    Toric { profile: ToricProfile, body: BodyOracle },
}

impl ParsedBody {
    pub fn body(&self) -> &BodyOracle {
        match self {
            ParsedBody::Body(b) => b,
            ParsedBody::Toric { body, .. } => body,
        }
    }

    pub fn profile(&self) -> Option<&ToricProfile> {
        match self {
            ParsedBody::Body(_) => None,
            ParsedBody::Toric { profile, .. } => Some(profile),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BallSpec {
    dim: usize,
    capacity: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AreasSpec {
    a: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BoxSpec {
    half_widths: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PProductJson {
    p: PExponent,
    factors: Vec<Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ToricJson {
    profile: Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LpOrthantJson {
    power: f64,
    radii: Vec<f64>,
}

/// Parses a JSON body spec and samples the oracle invariants at load
/// (100 points). Closed-form bodies are held to 1e-9; bodies whose
/// support comes from a boundary search get 1e-6.
pub fn parse_body_spec(input: &str) -> Result<ParsedBody, SpecError> {
    let value: Value = serde_json::from_str(input)?;
    let parsed = body_from_value(&value)?;
    let tolerance = match &parsed {
        ParsedBody::Toric { profile, .. } => match profile.shape() {
            ProfileShape::Simplex { .. } | ProfileShape::Box { .. } => 1e-9,
            _ => 1e-6,
        },
        ParsedBody::Body(_) => 1e-9,
    };
    parsed
        .body()
        .check_invariants(100, 0x00CA_91AB, tolerance)
        .map_err(|e| SpecError::Invariant(e.to_string()))?;
    Ok(parsed)
}

fn take_type(value: &Value, context: &str) -> Result<(String, Value), SpecError> {
    let obj = value
        .as_object()
        .ok_or_else(|| SpecError::Schema(format!("{context}: expected a JSON object")))?;
    let mut rest = obj.clone();
    let ty = rest
        .remove("type")
        .ok_or_else(|| SpecError::Schema(format!("{context}: missing \"type\" key")))?;
    let ty = ty
        .as_str()
        .ok_or_else(|| SpecError::Schema(format!("{context}: \"type\" must be a string")))?
        .to_string();
    Ok((ty, Value::Object(rest)))
}

fn body_from_value(value: &Value) -> Result<ParsedBody, SpecError> {
    let (ty, rest) = take_type(value, "body spec")?;
    match ty.as_str() {
        "ball" => {
            let spec: BallSpec = from_value(rest, "ball")?;
            Ok(ParsedBody::Body(BodyOracle::ball(spec.dim, spec.capacity)?))
        }
        "ellipsoid" => {
            let spec: AreasSpec = from_value(rest, "ellipsoid")?;
            Ok(ParsedBody::Body(BodyOracle::ellipsoid(&spec.a)?))
        }
        "polydisc" => {
            let spec: AreasSpec = from_value(rest, "polydisc")?;
            Ok(ParsedBody::Body(BodyOracle::polydisc(&spec.a)?))
        }
        "box" => {
            let spec: BoxSpec = from_value(rest, "box")?;
            Ok(ParsedBody::Body(BodyOracle::box_body(&spec.half_widths)?))
        }
        "pproduct" => {
            let spec: PProductJson = from_value(rest, "pproduct")?;
            if spec.factors.is_empty() {
                return Err(SpecError::Schema("pproduct: factors must be nonempty".into()));
            }
            let factors = spec
                .factors
                .iter()
                .map(|f| body_from_value(f).map(|p| p.body().clone()))
                .collect::<Result<Vec<_>, SpecError>>()?;
            let product = PProductSpec::new(spec.p, factors)?;
            Ok(ParsedBody::Body(product.to_body()))
        }
        "toric" => {
            let spec: ToricJson = from_value(rest, "toric")?;
            let profile = profile_from_value(&spec.profile)?;
            let body = profile.to_body();
            Ok(ParsedBody::Toric { profile, body })
        }
        other => Err(SpecError::Schema(format!("unknown body type {other:?}"))),
    }
}

/// Parses a profile spec (the `"profile"` payload of a toric body).
pub fn profile_from_value(value: &Value) -> Result<ToricProfile, SpecError> {
    let (ty, rest) = take_type(value, "profile spec")?;
    match ty.as_str() {
        "simplex" => {
            let spec: AreasSpec = from_value(rest, "simplex")?;
            Ok(ToricProfile::simplex(&spec.a)?)
        }
        "box" => {
            let spec: AreasSpec = from_value(rest, "box profile")?;
            Ok(ToricProfile::box_profile(&spec.a)?)
        }
        "lp_orthant" => {
            let spec: LpOrthantJson = from_value(rest, "lp_orthant")?;
            Ok(ToricProfile::lp_orthant(spec.power, &spec.radii)?)
        }
        other => Err(SpecError::Schema(format!("unknown profile type {other:?}"))),
    }
}

fn from_value<T: serde::de::DeserializeOwned>(value: Value, context: &str) -> Result<T, SpecError> {
    serde_json::from_value(value).map_err(|e| SpecError::Schema(format!("{context}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_standard_bodies() {
        let e = parse_body_spec(r#"{"type":"ellipsoid","a":[1,2]}"#).unwrap();
        assert_eq!(e.body().dim(), 4);
        assert!(e.profile().is_none());
        let b = parse_body_spec(r#"{"type":"ball","dim":4,"capacity":1.0}"#).unwrap();
        assert_eq!(b.body().dim(), 4);
        let p = parse_body_spec(r#"{"type":"polydisc","a":[1,2,3]}"#).unwrap();
        assert_eq!(p.body().dim(), 6);
        let x = parse_body_spec(r#"{"type":"box","half_widths":[1,1]}"#).unwrap();
        assert_eq!(x.body().closed_form_volume(), Some(4.0));
    }

    #[test]
    fn parses_products_and_toric() {
        let prod = parse_body_spec(
            r#"{"type":"pproduct","p":1.5,"factors":[
                {"type":"ellipsoid","a":[1]},{"type":"ellipsoid","a":[1]}]}"#,
        )
        .unwrap();
        assert!(prod.body().is_smooth());
        assert_eq!(prod.body().dim(), 4);
        let inf = parse_body_spec(
            r#"{"type":"pproduct","p":"inf","factors":[
                {"type":"ellipsoid","a":[1]},{"type":"box","half_widths":[0.5,0.5]}]}"#,
        )
        .unwrap();
        assert!(!inf.body().is_smooth());
        let toric = parse_body_spec(
            r#"{"type":"toric","profile":{"type":"simplex","a":[1,2]}}"#,
        )
        .unwrap();
        assert!(toric.profile().is_some());
        assert_eq!(toric.body().dim(), 4);
        let lp = parse_body_spec(
            r#"{"type":"toric","profile":{"type":"lp_orthant","power":2.0,"radii":[1,1]}}"#,
        )
        .unwrap();
        assert!(lp.profile().unwrap().convexity().is_convex());
    }

    #[test]
    fn rejects_bad_specs() {
        // Negative parameter.
        assert!(matches!(
            parse_body_spec(r#"{"type":"ellipsoid","a":[1,-2]}"#),
            Err(SpecError::Body(_))
        ));
        // Unknown keys are errors.
        assert!(matches!(
            parse_body_spec(r#"{"type":"ellipsoid","a":[1,2],"extra":3}"#),
            Err(SpecError::Schema(_))
        ));
        // Unknown type.
        assert!(matches!(
            parse_body_spec(r#"{"type":"pyramid","a":[1]}"#),
            Err(SpecError::Schema(_))
        ));
        // p below 1.
        assert!(matches!(
            parse_body_spec(r#"{"type":"pproduct","p":0.5,"factors":[{"type":"ellipsoid","a":[1]}]}"#),
            Err(SpecError::Schema(_))
        ));
        // Not JSON at all.
        assert!(matches!(parse_body_spec("ball of capacity 1"), Err(SpecError::Json(_))));
    }
}
