//! Serializable model specifications and the `family:key=value,…` shorthand.
//!
//! ```text
//! {"model": "jacobi", "kind": "constant", "params": {"a": 0.5, "b": 0}}
//! jacobi:a=0.5,b=0
//! verblunsky:kind=iid,atoms=0.3;-0.3,seed=7
//! ```

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::{json, Map, Value};

use super::{
    alexandrov, degenerate_pair, sample_jacobi, sample_verblunsky, strip,
    universal_circle_sequence, universal_jacobi_pair, DiscretePlanarMeasure, DistributionSpec,
    JacobiSequence, VerblunskySequence,
};
use crate::error::{invalid, Result};
use crate::hessenberg::HessenbergTruncation;

/// Which kind of measure a specification describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelFamily {
    /// Unit circle, via Verblunsky coefficients.
    Verblunsky,
    /// Real line, via Jacobi parameters.
    Jacobi,
    /// Finitely many weighted points in the plane.
    Discrete,
}

/// A complex number written as `[re, im]`, a bare real, or text like `0.3-0.1i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexValue {
    Pair([f64; 2]),
    Real(f64),
    Text(String),
}

impl ComplexValue {
    pub fn value(&self) -> Result<Complex64> {
        match self {
            ComplexValue::Pair([re, im]) => Ok(Complex64::new(*re, *im)),
            ComplexValue::Real(re) => Ok(Complex64::new(*re, 0.0)),
            ComplexValue::Text(s) => parse_complex(s),
        }
    }
}

impl From<Complex64> for ComplexValue {
    fn from(z: Complex64) -> Self {
        ComplexValue::Pair([z.re, z.im])
    }
}

/// Parses `2`, `-0.5i`, `i`, `2+0i`, `1e-3-2.5e-1i` (a trailing `j` also works).
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || invalid(format!("cannot parse '{text}' as a complex number"));
    let num = |t: &str| -> Result<f64> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => t.parse::<f64>().map_err(|_| bad()),
        }
    };
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix('i').or_else(|| s.strip_suffix('j')) else {
        return s
            .parse::<f64>()
            .map(|re| Complex64::new(re, 0.0))
            .map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&p| (bytes[p] == b'+' || bytes[p] == b'-') && !matches!(bytes[p - 1], b'e' | b'E'));
    match split {
        Some(p) => {
            let re = body[..p].parse::<f64>().map_err(|_| bad())?;
            Ok(Complex64::new(re, num(&body[p..])?))
        }
        None => Ok(Complex64::new(0.0, num(body)?)),
    }
}

fn one_or_many<'de, D, T>(d: D) -> std::result::Result<Vec<T>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany<T> {
        Many(Vec<T>),
        One(T),
    }
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::Many(v) => v,
        OneOrMany::One(x) => vec![x],
    })
}

fn complexes(values: &[ComplexValue]) -> Result<Vec<Complex64>> {
    values.iter().map(ComplexValue::value).collect()
}

fn one() -> f64 {
    1.0
}

fn two() -> f64 {
    2.0
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstantCircle {
    #[serde(alias = "alpha")]
    value: ComplexValue,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExplicitCircle {
    #[serde(deserialize_with = "one_or_many", alias = "alpha")]
    values: Vec<ComplexValue>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PeriodicCircle {
    #[serde(deserialize_with = "one_or_many")]
    period: Vec<ComplexValue>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Reciprocal {
    #[serde(default = "one")]
    numerator: f64,
    #[serde(default = "two")]
    offset: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Degenerate {
    #[serde(default)]
    twisted: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IidCircle {
    dist: DistributionSpec,
    #[serde(default)]
    length: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct UniversalCircle {
    #[serde(deserialize_with = "one_or_many")]
    base: Vec<ComplexValue>,
    #[serde(default)]
    length: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstantLine {
    a: f64,
    #[serde(default)]
    b: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ListsLine {
    #[serde(deserialize_with = "one_or_many")]
    a: Vec<f64>,
    #[serde(deserialize_with = "one_or_many")]
    b: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DecayingLine {
    a: f64,
    #[serde(default)]
    a_decay: f64,
    #[serde(default)]
    b: f64,
    #[serde(default)]
    b_decay: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IidLine {
    dist_a: DistributionSpec,
    dist_b: DistributionSpec,
    #[serde(default)]
    length: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct UniversalLine {
    #[serde(deserialize_with = "one_or_many")]
    base_a: Vec<f64>,
    #[serde(deserialize_with = "one_or_many")]
    base_b: Vec<f64>,
    #[serde(default)]
    length: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RootsOfUnity {
    count: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Points {
    #[serde(deserialize_with = "one_or_many")]
    points: Vec<ComplexValue>,
    #[serde(default)]
    weights: Option<Vec<f64>>,
}

/// A measure model as data: family, construction kind, parameters and the
/// optional Alexandrov twist / stripping applied afterwards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub model: ModelFamily,
    pub kind: String,
    #[serde(default = "empty_params")]
    pub params: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Multiplies every Verblunsky coefficient by this unit-modulus number.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alexandrov: Option<ComplexValue>,
    /// Drops this many leading coefficients.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strip: Option<usize>,
}

fn empty_params() -> Value {
    Value::Object(Map::new())
}

/// A constructed measure model.
#[derive(Debug, Clone)]
pub enum Model {
    Verblunsky(VerblunskySequence),
    Jacobi(JacobiSequence),
    Discrete(DiscretePlanarMeasure),
}

impl Model {
    pub fn family(&self) -> ModelFamily {
        match self {
            Model::Verblunsky(_) => ModelFamily::Verblunsky,
            Model::Jacobi(_) => ModelFamily::Jacobi,
            Model::Discrete(_) => ModelFamily::Discrete,
        }
    }

    /// `N×N` truncation: `ggt` for Verblunsky, `jacobi` for Jacobi and
    /// `arnoldi` for discrete models.
    pub fn truncation(&self, size: usize) -> Result<HessenbergTruncation> {
        match self {
            Model::Verblunsky(s) => HessenbergTruncation::ggt(s, size),
            Model::Jacobi(s) => HessenbergTruncation::jacobi(s, size),
            Model::Discrete(m) => HessenbergTruncation::arnoldi(m, size),
        }
    }

    /// Largest usable truncation size, if the model limits it.
    pub fn max_size(&self) -> Option<usize> {
        match self {
            Model::Verblunsky(s) => s.len(),
            Model::Jacobi(s) => s.len(),
            Model::Discrete(m) => Some(m.count() - 1),
        }
    }
}

impl ModelSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| invalid(format!("model spec: {e}")))
    }

    fn params<T: DeserializeOwned>(&self) -> Result<T> {
        serde_json::from_value(self.params.clone()).map_err(|e| {
            invalid(format!(
                "parameters of {} model kind '{}': {e}",
                family_name(self.model),
                self.kind
            ))
        })
    }

    fn seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| invalid(format!("model kind '{}' needs a seed", self.kind)))
    }

    /// Builds the model and applies any twist and stripping.
    pub fn build(&self) -> Result<Model> {
        let model = match self.model {
            ModelFamily::Verblunsky => Model::Verblunsky(self.build_circle()?),
            ModelFamily::Jacobi => Model::Jacobi(self.build_line()?),
            ModelFamily::Discrete => {
                if self.alexandrov.is_some() || self.strip.is_some() {
                    return Err(invalid(
                        "discrete models do not support alexandrov or strip",
                    ));
                }
                Model::Discrete(match self.kind.as_str() {
                    "roots_of_unity" => {
                        let p: RootsOfUnity = self.params()?;
                        DiscretePlanarMeasure::roots_of_unity(p.count)?
                    }
                    "points" => {
                        let p: Points = self.params()?;
                        let points = complexes(&p.points)?;
                        match p.weights {
                            Some(w) => DiscretePlanarMeasure::new(points, w)?,
                            None => DiscretePlanarMeasure::uniform(points)?,
                        }
                    }
                    other => return Err(unknown_kind(self.model, other)),
                })
            }
        };
        Ok(model)
    }

    fn build_circle(&self) -> Result<VerblunskySequence> {
        let seq = match self.kind.as_str() {
            "zero" | "free" => VerblunskySequence::zero(),
            "constant" => {
                VerblunskySequence::constant(self.params::<ConstantCircle>()?.value.value()?)?
            }
            "explicit" => VerblunskySequence::from_values(complexes(
                &self.params::<ExplicitCircle>()?.values,
            )?)?,
            "periodic" => {
                VerblunskySequence::periodic(complexes(&self.params::<PeriodicCircle>()?.period)?)?
            }
            "reciprocal" => {
                let p: Reciprocal = self.params()?;
                VerblunskySequence::reciprocal(p.numerator, p.offset)?
            }
            "degenerate" => {
                let p: Degenerate = self.params()?;
                let (mu, nu) = degenerate_pair(1)?;
                if p.twisted { nu } else { mu }.with_len(None)
            }
            "iid" => {
                let p: IidCircle = self.params()?;
                sample_verblunsky(&p.dist, p.length, self.seed()?)?
            }
            "universal" => {
                let p: UniversalCircle = self.params()?;
                universal_circle_sequence(&complexes(&p.base)?, p.length.unwrap_or(1))?
                    .with_len(p.length)
            }
            other => return Err(unknown_kind(self.model, other)),
        };
        let seq = match &self.alexandrov {
            Some(l) => alexandrov(&seq, l.value()?)?,
            None => seq,
        };
        match self.strip {
            Some(k) => strip(&seq, k),
            None => Ok(seq),
        }
    }

    fn build_line(&self) -> Result<JacobiSequence> {
        if self.alexandrov.is_some() {
            return Err(invalid(
                "the Alexandrov twist applies to Verblunsky models only",
            ));
        }
        let seq = match self.kind.as_str() {
            "constant" => {
                let p: ConstantLine = self.params()?;
                JacobiSequence::constant(p.a, p.b)?
            }
            "explicit" => {
                let p: ListsLine = self.params()?;
                JacobiSequence::from_values(p.a, p.b)?
            }
            "periodic" => {
                let p: ListsLine = self.params()?;
                JacobiSequence::periodic(p.a, p.b)?
            }
            "decaying" => {
                let p: DecayingLine = self.params()?;
                JacobiSequence::decaying(p.a, p.a_decay, p.b, p.b_decay)?
            }
            "iid" => {
                let p: IidLine = self.params()?;
                sample_jacobi(&p.dist_a, &p.dist_b, p.length, self.seed()?)?
            }
            "universal" => {
                let p: UniversalLine = self.params()?;
                universal_jacobi_pair(&p.base_a, &p.base_b, p.length.unwrap_or(1))?
                    .with_len(p.length)
            }
            other => return Err(unknown_kind(self.model, other)),
        };
        match self.strip {
            Some(k) => seq.strip(k),
            None => Ok(seq),
        }
    }

    /// Parses `family[:key=value,…]`.
    ///
    /// `kind`, `seed`, `strip` and `alexandrov` are top-level fields; every
    /// other key is a parameter. Lists are separated by `;`. For `kind=iid`
    /// the keys `atoms`, `probabilities`, `radius`, `low`, `high` (prefixed
    /// by `a_`/`b_` for Jacobi models) describe the distributions.
    pub fn parse_shorthand(text: &str) -> Result<Self> {
        let (head, rest) = match text.split_once(':') {
            Some((h, r)) => (h.trim(), r.trim()),
            None => (text.trim(), ""),
        };
        let model = match head {
            "verblunsky" | "circle" | "ggt" => ModelFamily::Verblunsky,
            "jacobi" | "line" => ModelFamily::Jacobi,
            "discrete" | "points" | "arnoldi" => ModelFamily::Discrete,
            other => return Err(invalid(format!("unknown model family '{other}'"))),
        };
        let mut kind = None;
        let mut seed = None;
        let mut strip_k = None;
        let mut twist = None;
        let mut params = Map::new();
        for item in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| invalid(format!("expected key=value, got '{item}'")))?;
            let (k, v) = (k.trim(), v.trim());
            let parse_err = |what: &str| invalid(format!("{k}: '{v}' is not {what}"));
            match k {
                "kind" => kind = Some(v.to_string()),
                "seed" => {
                    seed = Some(
                        v.parse::<u64>()
                            .map_err(|_| parse_err("an unsigned integer"))?,
                    )
                }
                "strip" => {
                    strip_k = Some(
                        v.parse::<usize>()
                            .map_err(|_| parse_err("an unsigned integer"))?,
                    )
                }
                "alexandrov" | "lambda" => twist = Some(ComplexValue::Text(v.to_string())),
                _ => {
                    if params.insert(k.to_string(), shorthand_value(v)).is_some() {
                        return Err(invalid(format!("key '{k}' given twice")));
                    }
                }
            }
        }
        let kind = kind.unwrap_or_else(|| {
            match model {
                ModelFamily::Discrete if params.contains_key("points") => "points",
                ModelFamily::Discrete => "roots_of_unity",
                ModelFamily::Verblunsky if params.is_empty() => "zero",
                _ => "constant",
            }
            .to_string()
        });
        if kind == "iid" {
            match model {
                ModelFamily::Verblunsky => {
                    let d = take_distribution(&mut params, "")?;
                    params.insert("dist".into(), d);
                }
                ModelFamily::Jacobi => {
                    let a = take_distribution(&mut params, "a_")?;
                    let b = take_distribution(&mut params, "b_")?;
                    params.insert("dist_a".into(), a);
                    params.insert("dist_b".into(), b);
                }
                ModelFamily::Discrete => {}
            }
        }
        Ok(ModelSpec {
            model,
            kind,
            params: Value::Object(params),
            seed,
            alexandrov: twist,
            strip: strip_k,
        })
    }
}

/// Reads a model from JSON (if the text starts with `{`) or shorthand.
impl std::str::FromStr for ModelSpec {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim_start().starts_with('{') {
            Self::from_json(s)
        } else {
            Self::parse_shorthand(s)
        }
    }
}

fn family_name(f: ModelFamily) -> &'static str {
    match f {
        ModelFamily::Verblunsky => "verblunsky",
        ModelFamily::Jacobi => "jacobi",
        ModelFamily::Discrete => "discrete",
    }
}

fn unknown_kind(f: ModelFamily, kind: &str) -> crate::error::Error {
    let known = match f {
        ModelFamily::Verblunsky => {
            "zero, constant, explicit, periodic, reciprocal, degenerate, iid, universal"
        }
        ModelFamily::Jacobi => "constant, explicit, periodic, decaying, iid, universal",
        ModelFamily::Discrete => "roots_of_unity, points",
    };
    invalid(format!(
        "unknown {} model kind '{kind}' (expected one of: {known})",
        family_name(f)
    ))
}

fn scalar_value(v: &str) -> Value {
    if let Ok(u) = v.parse::<u64>() {
        return json!(u);
    }
    if let Ok(i) = v.parse::<i64>() {
        return json!(i);
    }
    if let Ok(x) = v.parse::<f64>() {
        if x.is_finite() {
            return json!(x);
        }
    }
    match v {
        "true" => Value::Bool(true),
        "false" => Value::Bool(false),
        _ => Value::String(v.to_string()),
    }
}

fn shorthand_value(v: &str) -> Value {
    if v.contains(';') {
        Value::Array(
            v.split(';')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(scalar_value)
                .collect(),
        )
    } else {
        scalar_value(v)
    }
}

fn as_list(v: Value) -> Vec<Value> {
    match v {
        Value::Array(items) => items,
        other => vec![other],
    }
}

fn complex_json(v: &Value) -> Result<Value> {
    let c: ComplexValue =
        serde_json::from_value(v.clone()).map_err(|e| invalid(format!("atom {v}: {e}")))?;
    let z = c.value()?;
    Ok(json!([z.re, z.im]))
}

fn take_distribution(params: &mut Map<String, Value>, prefix: &str) -> Result<Value> {
    let mut take = |k: &str| params.remove(&format!("{prefix}{k}"));
    let atoms = take("atoms");
    let probabilities = take("probabilities");
    let radius = take("radius");
    let low = take("low");
    let high = take("high");
    match (atoms, radius, low, high) {
        (Some(atoms), None, None, None) => {
            let atoms = as_list(atoms)
                .iter()
                .map(complex_json)
                .collect::<Result<Vec<_>>>()?;
            let probabilities = match probabilities {
                Some(p) => Value::Array(as_list(p)),
                None => json!(vec![1.0 / atoms.len() as f64; atoms.len()]),
            };
            Ok(json!({"kind": "atomic", "atoms": atoms, "probabilities": probabilities}))
        }
        (None, Some(radius), None, None) if probabilities.is_none() => {
            Ok(json!({"kind": "uniform_disk", "radius": radius}))
        }
        (None, None, Some(low), Some(high)) if probabilities.is_none() => {
            Ok(json!({"kind": "uniform_interval", "low": low, "high": high}))
        }
        _ => Err(invalid(format!(
            "iid models need exactly one of {prefix}atoms[/{prefix}probabilities], {prefix}radius, \
             or {prefix}low with {prefix}high"
        ))),
    }
}
