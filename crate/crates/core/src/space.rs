//! Typed search spaces and their embedding in the unit cube.
//!
//! Continuous and integer parameters take one unit coordinate each, mapped
//! linearly in their (optionally logarithmic) transformed space. A
//! categorical parameter with `k` labels takes `k` dummy coordinates and
//! decodes to the arg max, lowest index on ties.

use std::fmt;
use std::path::Path;

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log2,
    Log10,
}

impl Scale {
    fn forward(self, v: f64) -> f64 {
        match self {
            Scale::Linear => v,
            Scale::Log2 => v.log2(),
            Scale::Log10 => v.log10(),
        }
    }

    fn inverse(self, t: f64) -> f64 {
        match self {
            Scale::Linear => t,
            Scale::Log2 => t.exp2(),
            Scale::Log10 => 10f64.powf(t),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParamKind {
    Continuous { lo: f64, hi: f64, scale: Scale },
    Integer { lo: i64, hi: i64, scale: Scale },
    Categorical { categories: Vec<String> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpec {
    pub name: String,
    pub kind: ParamKind,
}

impl ParamSpec {
    pub fn continuous(name: &str, lo: f64, hi: f64, scale: Scale) -> Result<Self> {
        let spec = Self {
            name: name.to_string(),
            kind: ParamKind::Continuous { lo, hi, scale },
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn integer(name: &str, lo: i64, hi: i64, scale: Scale) -> Result<Self> {
        let spec = Self {
            name: name.to_string(),
            kind: ParamKind::Integer { lo, hi, scale },
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn categorical(name: &str, categories: &[&str]) -> Result<Self> {
        let spec = Self {
            name: name.to_string(),
            kind: ParamKind::Categorical {
                categories: categories.iter().map(|c| c.to_string()).collect(),
            },
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Unit coordinates this parameter occupies.
    pub fn width(&self) -> usize {
        match &self.kind {
            ParamKind::Categorical { categories } => categories.len(),
            _ => 1,
        }
    }

    fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Space(format!("parameter '{}': {msg}", self.name)));
        if self.name.is_empty() {
            return Err(Error::Space("parameter name must not be empty".into()));
        }
        match &self.kind {
            ParamKind::Continuous { lo, hi, scale } => {
                if !(lo.is_finite() && hi.is_finite()) {
                    return fail("bounds must be finite".into());
                }
                if lo >= hi {
                    return fail(format!("lo ({lo}) must be < hi ({hi})"));
                }
                if *scale != Scale::Linear && *lo <= 0.0 {
                    return fail(format!("log scale needs lo > 0, got {lo}"));
                }
            }
            ParamKind::Integer { lo, hi, scale } => {
                if lo >= hi {
                    return fail(format!("lo ({lo}) must be < hi ({hi})"));
                }
                if *scale != Scale::Linear && *lo <= 0 {
                    return fail(format!("log scale needs lo > 0, got {lo}"));
                }
            }
            ParamKind::Categorical { categories } => {
                if categories.len() < 2 {
                    return fail("categorical parameters need at least 2 categories".into());
                }
                for (i, c) in categories.iter().enumerate() {
                    if categories[..i].contains(c) {
                        return fail(format!("duplicate category '{c}'"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Bounds in transformed (scale-applied) space.
pub fn bounds_transformed(spec: &ParamSpec) -> Result<(f64, f64)> {
    match &spec.kind {
        ParamKind::Continuous { lo, hi, scale } => Ok((scale.forward(*lo), scale.forward(*hi))),
        ParamKind::Integer { lo, hi, scale } => {
            Ok((scale.forward(*lo as f64), scale.forward(*hi as f64)))
        }
        ParamKind::Categorical { .. } => Err(Error::Space(format!(
            "parameter '{}' is categorical and has no bounds",
            spec.name
        ))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParamValue {
    Float(f64),
    Int(i64),
    Category(String),
}

impl ParamValue {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            ParamValue::Float(v) => Some(*v),
            ParamValue::Int(v) => Some(*v as f64),
            ParamValue::Category(_) => None,
        }
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Float(v) => write!(f, "{v}"),
            ParamValue::Int(v) => write!(f, "{v}"),
            ParamValue::Category(c) => f.write_str(c),
        }
    }
}

impl Serialize for ParamValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ParamValue::Float(v) => serializer.serialize_f64(*v),
            ParamValue::Int(v) => serializer.serialize_i64(*v),
            ParamValue::Category(c) => serializer.serialize_str(c),
        }
    }
}

/// A decoded configuration, in search-space order. Serializes as a JSON
/// object keyed by parameter name.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrialConfig {
    pub values: Vec<(String, ParamValue)>,
}

impl TrialConfig {
    pub fn get(&self, name: &str) -> Option<&ParamValue> {
        self.values.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    /// Numeric values in order; `None` if any parameter is categorical.
    pub fn numeric(&self) -> Option<Vec<f64>> {
        self.values.iter().map(|(_, v)| v.as_f64()).collect()
    }
}

impl Serialize for TrialConfig {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.values.len()))?;
        for (name, value) in &self.values {
            map.serialize_entry(name, value)?;
        }
        map.end()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    params: Vec<ParamSpec>,
}

impl SearchSpace {
    pub fn new(params: Vec<ParamSpec>) -> Result<Self> {
        if params.is_empty() {
            return Err(Error::Space("search space has no parameters".into()));
        }
        for (i, p) in params.iter().enumerate() {
            p.validate()
                .map_err(|e| Error::Space(format!("entry {i}: {e}")))?;
            if params[..i].iter().any(|o| o.name == p.name) {
                return Err(Error::Space(format!(
                    "entry {i}: duplicate parameter name '{}'",
                    p.name
                )));
            }
        }
        Ok(Self { params })
    }

    /// Continuous linear box, one parameter per dimension named `x1..xs`.
    pub fn unit_box(bounds: &[(f64, f64)]) -> Result<Self> {
        let params = bounds
            .iter()
            .enumerate()
            .map(|(i, &(lo, hi))| ParamSpec::continuous(&format!("x{}", i + 1), lo, hi, Scale::Linear))
            .collect::<Result<Vec<_>>>()?;
        Self::new(params)
    }

    pub fn params(&self) -> &[ParamSpec] {
        &self.params
    }

    /// Unit-cube dimension: one per numeric parameter, one per category.
    pub fn dimension(&self) -> usize {
        self.params.iter().map(ParamSpec::width).sum()
    }

    /// Maps a unit point to a typed configuration.
    pub fn decode(&self, unit: &[f64]) -> Result<TrialConfig> {
        let s = self.dimension();
        if unit.len() != s {
            return Err(Error::DimensionMismatch {
                expected: s,
                found: unit.len(),
            });
        }
        if let Some((i, &x)) = unit.iter().enumerate().find(|(_, x)| !(0.0..=1.0).contains(*x)) {
            return Err(Error::OutOfUnitCube {
                row: 0,
                column: i,
                value: x,
            });
        }
        let mut values = Vec::with_capacity(self.params.len());
        let mut offset = 0;
        for p in &self.params {
            let block = &unit[offset..offset + p.width()];
            offset += p.width();
            let value = match &p.kind {
                ParamKind::Continuous { lo, hi, scale } => {
                    let (tlo, thi) = (scale.forward(*lo), scale.forward(*hi));
                    let v = scale.inverse(tlo + block[0] * (thi - tlo));
                    ParamValue::Float(v.clamp(*lo, *hi))
                }
                ParamKind::Integer { lo, hi, scale } => {
                    // each integer owns a cell of equal width in transformed space
                    let tlo = scale.forward(*lo as f64 - 0.5);
                    let thi = scale.forward(*hi as f64 + 0.5);
                    let v = scale.inverse(tlo + block[0] * (thi - tlo));
                    let rounded = (v + 0.5).floor() as i64;
                    ParamValue::Int(rounded.clamp(*lo, *hi))
                }
                ParamKind::Categorical { categories } => {
                    let mut best = 0;
                    for (k, &x) in block.iter().enumerate() {
                        if x > block[best] {
                            best = k;
                        }
                    }
                    ParamValue::Category(categories[best].clone())
                }
            };
            values.push((p.name.clone(), value));
        }
        Ok(TrialConfig { values })
    }

    /// Unit image of a configuration. Integers map to the midpoint of their
    /// cell, categories to a one-hot block.
    pub fn encode(&self, config: &TrialConfig) -> Result<Vec<f64>> {
        let mut unit = Vec::with_capacity(self.dimension());
        for p in &self.params {
            let value = config
                .get(&p.name)
                .ok_or_else(|| Error::Space(format!("missing parameter '{}'", p.name)))?;
            match (&p.kind, value) {
                (ParamKind::Continuous { lo, hi, scale }, v) => {
                    let v = v.as_f64().ok_or_else(|| {
                        Error::Space(format!("parameter '{}' expects a number", p.name))
                    })?;
                    let (tlo, thi) = (scale.forward(*lo), scale.forward(*hi));
                    unit.push(((scale.forward(v) - tlo) / (thi - tlo)).clamp(0.0, 1.0));
                }
                (ParamKind::Integer { lo, hi, scale }, ParamValue::Int(v)) => {
                    let tlo = scale.forward(*lo as f64 - 0.5);
                    let thi = scale.forward(*hi as f64 + 0.5);
                    let mid = match scale {
                        Scale::Linear => *v as f64,
                        _ => scale.inverse(
                            0.5 * (scale.forward(*v as f64 - 0.5) + scale.forward(*v as f64 + 0.5)),
                        ),
                    };
                    unit.push(((scale.forward(mid) - tlo) / (thi - tlo)).clamp(0.0, 1.0));
                }
                (ParamKind::Categorical { categories }, ParamValue::Category(c)) => {
                    let idx = categories.iter().position(|x| x == c).ok_or_else(|| {
                        Error::Space(format!("'{c}' is not a category of '{}'", p.name))
                    })?;
                    unit.extend((0..categories.len()).map(|k| if k == idx { 1.0 } else { 0.0 }));
                }
                _ => {
                    return Err(Error::Space(format!(
                        "value of '{}' does not match its kind",
                        p.name
                    )))
                }
            }
        }
        Ok(unit)
    }

    /// Parses the JSON space definition. Syntax errors carry line and
    /// column; semantic errors name the entry index.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Vec<RawParam> = serde_json::from_str(text)
            .map_err(|e| Error::Space(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        let params = raw
            .into_iter()
            .enumerate()
            .map(|(i, r)| r.into_spec().map_err(|msg| Error::Space(format!("entry {i}: {msg}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(params)
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        let raw: Vec<RawParam> = self.params.iter().map(RawParam::from_spec).collect();
        serde_json::to_string(&raw).expect("space serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum RawKind {
    Continuous,
    Integer,
    Categorical,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParam {
    name: String,
    kind: RawKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lo: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scale: Option<Scale>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    categories: Option<Vec<String>>,
}

impl RawParam {
    fn into_spec(self) -> std::result::Result<ParamSpec, String> {
        let name = self.name;
        let bounds = || match (self.lo, self.hi) {
            (Some(lo), Some(hi)) => Ok((lo, hi)),
            _ => Err(format!("parameter '{name}' needs both 'lo' and 'hi'")),
        };
        let kind = match self.kind {
            RawKind::Continuous | RawKind::Integer if self.categories.is_some() => {
                return Err(format!("parameter '{name}': 'categories' is only valid for categorical"))
            }
            RawKind::Continuous => {
                let (lo, hi) = bounds()?;
                ParamKind::Continuous {
                    lo,
                    hi,
                    scale: self.scale.unwrap_or_default(),
                }
            }
            RawKind::Integer => {
                let (lo, hi) = bounds()?;
                if lo.fract() != 0.0 || hi.fract() != 0.0 {
                    return Err(format!("parameter '{name}': integer bounds must be whole numbers"));
                }
                ParamKind::Integer {
                    lo: lo as i64,
                    hi: hi as i64,
                    scale: self.scale.unwrap_or_default(),
                }
            }
            RawKind::Categorical => {
                if self.lo.is_some() || self.hi.is_some() || self.scale.is_some() {
                    return Err(format!(
                        "parameter '{name}': categorical parameters take only 'categories'"
                    ));
                }
                ParamKind::Categorical {
                    categories: self
                        .categories
                        .ok_or_else(|| format!("parameter '{name}' needs 'categories'"))?,
                }
            }
        };
        let spec = ParamSpec { name, kind };
        spec.validate().map_err(|e| e.to_string())?;
        Ok(spec)
    }

    fn from_spec(spec: &ParamSpec) -> Self {
        let mut raw = RawParam {
            name: spec.name.clone(),
            kind: RawKind::Continuous,
            lo: None,
            hi: None,
            scale: None,
            categories: None,
        };
        match &spec.kind {
            ParamKind::Continuous { lo, hi, scale } => {
                raw.lo = Some(*lo);
                raw.hi = Some(*hi);
                raw.scale = Some(*scale);
            }
            ParamKind::Integer { lo, hi, scale } => {
                raw.kind = RawKind::Integer;
                raw.lo = Some(*lo as f64);
                raw.hi = Some(*hi as f64);
                raw.scale = Some(*scale);
            }
            ParamKind::Categorical { categories } => {
                raw.kind = RawKind::Categorical;
                raw.categories = Some(categories.clone());
            }
        }
        raw
    }
}
