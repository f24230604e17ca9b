//! Scene files: a JSON document describing an orbital fuzzy IFS, its
//! initial fuzzy set, the stop rule and an optional render window.
//!
//! Every number may be a JSON number, a decimal string or a `"a/b"`
//! rational string. Values are kept as exact rationals regardless of the
//! numeric mode; float mode converts them when the system is built.
//!
//! ```json
//! {
//!   "dimension": 2,
//!   "numeric_mode": "exact",
//!   "maps": [{ "linear": [["1", "0"], ["0", "1/2"]], "offset": ["0", "0"] }],
//!   "grey_maps": [{ "knots": [["0", "0"], ["1", "1"]] }],
//!   "contraction_constant": "1/2",
//!   "initial": [{ "point": ["0", "0"], "level": "1" }],
//!   "stop": { "steps": 3 },
//!   "render": { "bbox": [["0", "0"], ["1", "1"]], "width": 64, "height": 64 }
//! }
//! ```
//!
//! A knot is `[t, value]` or `[t, left_limit, value]`. An optional
//! `"support_cap"` overrides the default limit on support size.

use std::path::Path;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::fuzzy::{FuzzySet, GreyLevelMap, Knot};
use crate::geometry::Point;
use crate::grid::BBox;
use crate::ifs::{AffineMap, IteratedFunctionSystem};
use crate::operator::{OrbitalFuzzySystem, Stop};
use crate::scalar::{parse_rational, Rational, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NumericMode {
    Exact,
    Float,
}

impl NumericMode {
    pub fn as_str(self) -> &'static str {
        match self {
            NumericMode::Exact => "exact",
            NumericMode::Float => "float",
        }
    }
}

impl std::str::FromStr for NumericMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(NumericMode::Exact),
            "float" => Ok(NumericMode::Float),
            other => Err(Error::Field {
                path: "numeric_mode".into(),
                message: format!("expected \"exact\" or \"float\", found {other:?}"),
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MapSpec {
    pub linear: Vec<Vec<Rational>>,
    pub offset: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KnotSpec {
    pub t: Rational,
    pub left: Option<Rational>,
    pub value: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GreySpec {
    pub knots: Vec<KnotSpec>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StopSpec {
    Steps(usize),
    Tolerance(Rational),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RenderSpec {
    pub lo: [Rational; 2],
    pub hi: [Rational; 2],
    pub width: usize,
    pub height: usize,
}

impl RenderSpec {
    pub fn bbox(&self) -> Result<BBox> {
        BBox::new(
            [self.lo[0].to_f64(), self.lo[1].to_f64()],
            [self.hi[0].to_f64(), self.hi[1].to_f64()],
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scene {
    pub dimension: usize,
    pub numeric_mode: NumericMode,
    pub maps: Vec<MapSpec>,
    pub grey_maps: Vec<GreySpec>,
    pub contraction_constant: Rational,
    pub initial: Vec<(Vec<Rational>, Rational)>,
    pub stop: StopSpec,
    pub render: Option<RenderSpec>,
    pub support_cap: Option<usize>,
}

struct Reader<'a> {
    path: String,
    value: &'a Value,
}

impl<'a> Reader<'a> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Field {
            path: if self.path.is_empty() {
                "<root>".into()
            } else {
                self.path.clone()
            },
            message: message.into(),
        }
    }

    fn field(&self, name: &str) -> Result<Reader<'a>> {
        self.opt_field(name)?
            .ok_or_else(|| self.err(format!("missing field \"{name}\"")))
    }

    fn opt_field(&self, name: &str) -> Result<Option<Reader<'a>>> {
        let obj = self
            .value
            .as_object()
            .ok_or_else(|| self.err("expected an object"))?;
        Ok(obj.get(name).filter(|v| !v.is_null()).map(|v| Reader {
            path: if self.path.is_empty() {
                name.to_string()
            } else {
                format!("{}.{name}", self.path)
            },
            value: v,
        }))
    }

    fn items(&self) -> Result<Vec<Reader<'a>>> {
        let arr = self
            .value
            .as_array()
            .ok_or_else(|| self.err("expected an array"))?;
        Ok(arr
            .iter()
            .enumerate()
            .map(|(i, v)| Reader {
                path: format!("{}[{i}]", self.path),
                value: v,
            })
            .collect())
    }

    fn number(&self) -> Result<Rational> {
        let text = match self.value {
            Value::Number(n) => n.to_string(),
            Value::String(s) => s.clone(),
            _ => return Err(self.err("expected a number or a numeric string")),
        };
        parse_rational(&text).map_err(|_| self.err(format!("invalid number {text:?}")))
    }

    fn numbers(&self) -> Result<Vec<Rational>> {
        self.items()?.iter().map(Reader::number).collect()
    }

    fn count(&self) -> Result<usize> {
        self.value
            .as_u64()
            .map(|n| n as usize)
            .ok_or_else(|| self.err("expected a nonnegative integer"))
    }

    fn text(&self) -> Result<&'a str> {
        self.value
            .as_str()
            .ok_or_else(|| self.err("expected a string"))
    }
}

impl Scene {
    pub fn load(path: impl AsRef<Path>) -> Result<Scene> {
        let text = std::fs::read_to_string(path)?;
        Scene::parse(&text)
    }

    /// Parses and validates. Syntax errors carry line and column; schema
    /// errors carry the field path; validation errors list every violation.
    pub fn parse(text: &str) -> Result<Scene> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let scene = Scene::from_value(&value)?;
        let violations = scene.validate();
        if violations.is_empty() {
            Ok(scene)
        } else {
            Err(Error::Validation(violations))
        }
    }

    fn from_value(value: &Value) -> Result<Scene> {
        let root = Reader {
            path: String::new(),
            value,
        };
        let dimension = match root.opt_field("dimension")? {
            Some(r) => r.count()?,
            None => 2,
        };
        let numeric_mode = match root.opt_field("numeric_mode")? {
            Some(r) => r.text()?.parse()?,
            None => NumericMode::Exact,
        };
        let maps = root
            .field("maps")?
            .items()?
            .iter()
            .map(|m| {
                Ok(MapSpec {
                    linear: m
                        .field("linear")?
                        .items()?
                        .iter()
                        .map(Reader::numbers)
                        .collect::<Result<_>>()?,
                    offset: m.field("offset")?.numbers()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let grey_maps = root
            .field("grey_maps")?
            .items()?
            .iter()
            .map(|g| {
                let knots = g
                    .field("knots")?
                    .items()?
                    .iter()
                    .map(|k| {
                        let v = k.numbers()?;
                        match v.as_slice() {
                            [t, value] => Ok(KnotSpec {
                                t: t.clone(),
                                left: None,
                                value: value.clone(),
                            }),
                            [t, left, value] => Ok(KnotSpec {
                                t: t.clone(),
                                left: Some(left.clone()),
                                value: value.clone(),
                            }),
                            _ => Err(k.err("a knot is [t, value] or [t, left, value]")),
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(GreySpec { knots })
            })
            .collect::<Result<Vec<_>>>()?;
        let contraction_constant = root.field("contraction_constant")?.number()?;
        let initial = root
            .field("initial")?
            .items()?
            .iter()
            .map(|e| Ok((e.field("point")?.numbers()?, e.field("level")?.number()?)))
            .collect::<Result<Vec<_>>>()?;
        let stop_r = root.field("stop")?;
        let stop = match (stop_r.opt_field("steps")?, stop_r.opt_field("tolerance")?) {
            (Some(s), None) => StopSpec::Steps(s.count()?),
            (None, Some(t)) => StopSpec::Tolerance(t.number()?),
            _ => return Err(stop_r.err("give exactly one of \"steps\" or \"tolerance\"")),
        };
        let render = match root.opt_field("render")? {
            None => None,
            Some(r) => {
                let corners = r.field("bbox")?.items()?;
                if corners.len() != 2 {
                    return Err(r.err("bbox is [[x0, y0], [x1, y1]]"));
                }
                let corner = |c: &Reader| -> Result<[Rational; 2]> {
                    let v = c.numbers()?;
                    match v.as_slice() {
                        [x, y] => Ok([x.clone(), y.clone()]),
                        _ => Err(c.err("expected [x, y]")),
                    }
                };
                Some(RenderSpec {
                    lo: corner(&corners[0])?,
                    hi: corner(&corners[1])?,
                    width: r.field("width")?.count()?,
                    height: r.field("height")?.count()?,
                })
            }
        };
        let support_cap = root
            .opt_field("support_cap")?
            .map(|r| r.count())
            .transpose()?;
        Ok(Scene {
            dimension,
            numeric_mode,
            maps,
            grey_maps,
            contraction_constant,
            initial,
            stop,
            render,
            support_cap,
        })
    }

    /// Every violation of the scene invariants; empty when valid.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        let d = self.dimension;
        if d == 0 {
            out.push("dimension must be at least 1".into());
        }
        if self.maps.is_empty() {
            out.push("at least one map is required".into());
        }
        for (i, m) in self.maps.iter().enumerate() {
            if m.offset.len() != d || m.linear.len() != d || m.linear.iter().any(|r| r.len() != d) {
                out.push(format!("maps[{i}] does not have dimension {d}"));
            }
        }
        let c = &self.contraction_constant;
        if *c < Rational::zero() || *c >= Rational::one() {
            out.push("contraction_constant out of range".into());
        }
        let mut greys = Vec::new();
        for (i, g) in self.grey_maps.iter().enumerate() {
            match g.build::<Rational>() {
                Ok(rho) => greys.push(rho),
                Err(e) => out.push(format!("grey_maps[{i}]: {e}")),
            }
        }
        if greys.len() == self.grey_maps.len() {
            // admissibility does not depend on the contraction constant
            let ifs = self
                .affine_maps::<Rational>()
                .and_then(|maps| IteratedFunctionSystem::new(maps, Rational::zero()));
            if let Ok(ifs) = ifs {
                let sys = OrbitalFuzzySystem::new_unchecked(ifs, greys);
                out.extend(sys.validate_admissible().iter().map(|v| v.to_string()));
            }
        } else if self.grey_maps.len() != self.maps.len() {
            out.push(format!(
                "{} maps but {} grey level maps",
                self.maps.len(),
                self.grey_maps.len()
            ));
        }
        if self.initial.is_empty() {
            out.push("initial fuzzy set is empty".into());
        }
        for (i, (p, l)) in self.initial.iter().enumerate() {
            if p.len() != d {
                out.push(format!("initial[{i}] does not have dimension {d}"));
            }
            if *l <= Rational::zero() || *l > Rational::one() {
                out.push(format!("initial[{i}] level outside (0, 1]"));
            }
        }
        if !self.initial.is_empty() && !self.initial.iter().any(|(_, l)| *l == Rational::one()) {
            out.push("initial fuzzy set not normal".into());
        }
        if self.support_cap == Some(0) {
            out.push("support_cap must be positive".into());
        }
        if let StopSpec::Tolerance(t) = &self.stop {
            if *t <= Rational::zero() {
                out.push("stop tolerance must be positive".into());
            }
        }
        if let Some(r) = &self.render {
            if d != 2 {
                out.push("render requires dimension 2".into());
            }
            if r.width == 0 || r.height == 0 {
                out.push("render resolution must be positive".into());
            }
            if r.bbox().is_err() {
                out.push("render bbox is degenerate".into());
            }
        }
        out
    }

    fn affine_maps<S: Scalar>(&self) -> Result<Vec<AffineMap<S>>> {
        let conv = |v: &[Rational]| v.iter().map(S::from_rational).collect::<Vec<S>>();
        self.maps
            .iter()
            .map(|m| AffineMap::new(m.linear.iter().map(|r| conv(r)).collect(), conv(&m.offset)))
            .collect()
    }

    pub fn ifs<S: Scalar>(&self) -> Result<IteratedFunctionSystem<S>> {
        IteratedFunctionSystem::new(
            self.affine_maps()?,
            S::from_rational(&self.contraction_constant),
        )
    }

    pub fn fuzzy_system<S: Scalar>(&self) -> Result<OrbitalFuzzySystem<S>> {
        let greys = self
            .grey_maps
            .iter()
            .map(GreySpec::build)
            .collect::<Result<Vec<_>>>()?;
        let sys = OrbitalFuzzySystem::new(self.ifs()?, greys)?;
        Ok(match self.support_cap {
            Some(cap) => sys.with_support_cap(cap),
            None => sys,
        })
    }

    pub fn initial_set<S: Scalar>(&self) -> Result<FuzzySet<S>> {
        FuzzySet::new(self.initial.iter().map(|(p, l)| {
            (
                Point::new(p.iter().map(S::from_rational).collect()),
                S::from_rational(l),
            )
        }))
    }

    pub fn stop_rule<S: Scalar>(&self) -> Stop<S> {
        match &self.stop {
            StopSpec::Steps(n) => Stop::Steps(*n),
            StopSpec::Tolerance(t) => Stop::Tolerance(S::from_rational(t)),
        }
    }

    /// Serializes with every number as an exact rational string.
    pub fn to_json(&self) -> String {
        let num = |r: &Rational| Value::String(r.format());
        let nums = |v: &[Rational]| Value::Array(v.iter().map(num).collect());
        let mut root = Map::new();
        root.insert("dimension".into(), json!(self.dimension));
        root.insert("numeric_mode".into(), json!(self.numeric_mode.as_str()));
        root.insert(
            "maps".into(),
            Value::Array(
                self.maps
                    .iter()
                    .map(|m| {
                        json!({
                            "linear": Value::Array(m.linear.iter().map(|r| nums(r)).collect()),
                            "offset": nums(&m.offset),
                        })
                    })
                    .collect(),
            ),
        );
        root.insert(
            "grey_maps".into(),
            Value::Array(
                self.grey_maps
                    .iter()
                    .map(|g| {
                        let knots: Vec<Value> = g
                            .knots
                            .iter()
                            .map(|k| match &k.left {
                                Some(l) => nums(&[k.t.clone(), l.clone(), k.value.clone()]),
                                None => nums(&[k.t.clone(), k.value.clone()]),
                            })
                            .collect();
                        json!({ "knots": knots })
                    })
                    .collect(),
            ),
        );
        root.insert(
            "contraction_constant".into(),
            num(&self.contraction_constant),
        );
        root.insert(
            "initial".into(),
            Value::Array(
                self.initial
                    .iter()
                    .map(|(p, l)| json!({ "point": nums(p), "level": num(l) }))
                    .collect(),
            ),
        );
        root.insert(
            "stop".into(),
            match &self.stop {
                StopSpec::Steps(n) => json!({ "steps": n }),
                StopSpec::Tolerance(t) => json!({ "tolerance": num(t) }),
            },
        );
        if let Some(r) = &self.render {
            root.insert(
                "render".into(),
                json!({
                    "bbox": [nums(&r.lo), nums(&r.hi)],
                    "width": r.width,
                    "height": r.height,
                }),
            );
        }
        if let Some(cap) = self.support_cap {
            root.insert("support_cap".into(), json!(cap));
        }
        serde_json::to_string_pretty(&Value::Object(root)).expect("serializable") + "\n"
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

impl GreySpec {
    pub fn build<S: Scalar>(&self) -> Result<GreyLevelMap<S>> {
        GreyLevelMap::new(
            self.knots
                .iter()
                .map(|k| {
                    let value = S::from_rational(&k.value);
                    Knot {
                        t: S::from_rational(&k.t),
                        left: k
                            .left
                            .as_ref()
                            .map_or_else(|| value.clone(), S::from_rational),
                        value,
                    }
                })
                .collect(),
        )
    }
}

/// The bundled scene for the two-map example: `[0,1] × {0}` sampled at
/// `x ∈ {0, 1/2, 1}`, window `[0,1]²`.
pub const EXAMPLE_SCENE: &str = include_str!("../scenes/example.json");
