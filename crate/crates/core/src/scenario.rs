//! The scenario file: one JSON document naming driving systems, point
//! spaces, systems, covers, measures, factor maps and random SFTs.
//! Rationals are `"p/q"` strings so values survive the round trip exactly.
//!
//! ```json
//! {
//!   "version": 1,
//!   "driving": { "D": { "prob": ["1/2", "1/2"], "theta": [1, 0] } },
//!   "spaces": { "X": { "points": ["a", "b", "c", "d"] } },
//!   "systems": {
//!     "A": { "driving": "D", "space": "X",
//!            "fibers": [["a", "b"], ["c", "d"]],
//!            "maps": [{ "a": "c", "b": "c" }, { "c": "a", "d": "b" }] },
//!     "AA": { "product": ["A", "A"] }
//!   },
//!   "covers": { "S": { "system": "A", "builtin": "singletons" } }
//! }
//! ```

use std::path::Path;

use indexmap::IndexMap;
use num::Zero;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::covers::RandomCover;
use crate::error::{Error, Result};
use crate::measures::FiberedMeasure;
use crate::model::{
    pair_system, product_system, BundleRds, DrivingSystem, FactorMap, MetricSpace, PairSystem,
    ProductSystem,
};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::symbolic::{RandomSft, SftComponent};

/// Current schema version.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub driving: IndexMap<String, DrivingSpec>,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub spaces: IndexMap<String, SpaceSpec>,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub systems: IndexMap<String, SystemSpec>,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub covers: IndexMap<String, CoverSpec>,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub measures: IndexMap<String, MeasureSpec>,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub factor_maps: IndexMap<String, FactorMapSpec>,
    #[serde(default, skip_serializing_if = "IndexMap::is_empty")]
    pub sfts: IndexMap<String, SftSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DrivingSpec {
    pub prob: Vec<String>,
    pub theta: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub points: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Vec<Vec<String>>>,
}

/// An explicit system or one derived from named systems.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SystemSpec {
    Explicit(ExplicitSystem),
    Product(ProductSpec),
    Pair(PairSpec),
    Power(PowerSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitSystem {
    pub driving: String,
    pub space: String,
    pub fibers: Vec<Vec<String>>,
    /// `maps[ω]`: point id ↦ image id.
    pub maps: Vec<IndexMap<String, String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductSpec {
    pub product: (String, String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub pair: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerSpec {
    pub power: (String, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverSpec {
    pub system: String,
    /// `elements[i][ω]`: point ids of the `i`-th element on fiber `ω`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<Vec<Vec<String>>>>,
    /// `singletons`, `trivial` or `fibers`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    /// Require pairwise disjoint elements.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub partition: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    pub system: String,
    /// `weights[ω]`: point id ↦ mass; missing points have mass 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<IndexMap<String, String>>>,
    /// `uniform`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorMapSpec {
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    /// `map[ω]`: source point id ↦ target point id.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<Vec<IndexMap<String, String>>>,
    /// `identity`, `project_left`, `project_right` (products) or
    /// `project_first`, `project_second` (pairs).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SftSpec {
    pub driving: String,
    pub components: Vec<ComponentSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComponentSpec {
    Explicit(SftComponent),
    Constant { constant: Vec<Vec<u8>> },
    FullShift { full_shift: usize },
    GoldenMean { golden_mean: bool },
}

/// How a loaded system was obtained.
#[derive(Debug, Clone)]
pub enum SystemKind {
    Explicit,
    Product(Box<ProductSystem>),
    Pair(Box<PairSystem>),
    Power { of: String, m: usize },
}

#[derive(Debug, Clone)]
pub struct LoadedSystem {
    pub rds: BundleRds,
    pub kind: SystemKind,
}

#[derive(Debug, Clone)]
pub struct NamedCover {
    pub system: String,
    pub cover: RandomCover,
}

#[derive(Debug, Clone)]
pub struct NamedMeasure {
    pub system: String,
    pub measure: FiberedMeasure,
}

#[derive(Debug, Clone)]
pub struct NamedFactorMap {
    pub source: String,
    pub target: String,
    pub map: FactorMap,
}

/// A fully resolved and validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub file: ScenarioFile,
    pub driving: IndexMap<String, DrivingSystem>,
    pub systems: IndexMap<String, LoadedSystem>,
    pub covers: IndexMap<String, NamedCover>,
    pub measures: IndexMap<String, NamedMeasure>,
    pub factor_maps: IndexMap<String, NamedFactorMap>,
    pub sfts: IndexMap<String, RandomSft>,
}

fn unknown(kind: &str, name: &str) -> Error {
    Error::UnknownName(format!("{kind} `{name}`"))
}

fn rational_at(s: &str, at: impl FnOnce() -> String) -> Result<Rational> {
    parse_rational(s).map_err(|e| match e {
        Error::Parse { msg, .. } => Error::Parse {
            at: at(),
            msg: format!("`{s}`: {msg}"),
        },
        other => other,
    })
}

fn in_context(what: String) -> impl FnOnce(Error) -> Error {
    move |e| match e {
        Error::Invalid(m) => Error::Invalid(format!("{what}: {m}")),
        Error::Domain(m) => Error::Domain(format!("{what}: {m}")),
        Error::Incompatible(m) => Error::Incompatible(format!("{what}: {m}")),
        Error::Precondition(m) => Error::Precondition(format!("{what}: {m}")),
        other => other,
    }
}

/// Reads and validates a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Scenario::from_json(&text)
}

impl ScenarioFile {
    /// Parses without resolving names; errors carry line and column.
    pub fn parse(text: &str) -> Result<Self> {
        let file: ScenarioFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            at: format!("line {}, column {}", e.line(), e.column()),
            msg: e.to_string(),
        })?;
        if file.version != SCHEMA_VERSION {
            return Err(Error::Parse {
                at: "version".into(),
                msg: format!("unsupported schema version {}", file.version),
            });
        }
        Ok(file)
    }

    pub fn new(name: Option<String>) -> Self {
        ScenarioFile {
            version: SCHEMA_VERSION,
            name,
            ..Default::default()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario files always serialize")
    }

    /// SHA-256 of the compact JSON form, in hex.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("scenario files always serialize");
        hex(&Sha256::digest(&bytes))
    }

    /// Adds `rds` as an explicit system with its own driving system
    /// (`<name>.base`) and point space (`<name>.points`).
    pub fn add_system(&mut self, name: &str, rds: &BundleRds) {
        let base = rds.base();
        let dname = format!("{name}.base");
        let sname = format!("{name}.points");
        self.driving.insert(
            dname.clone(),
            DrivingSpec {
                prob: base.probs().iter().map(format_rational).collect(),
                theta: base.thetas().to_vec(),
            },
        );
        let space = rds.space();
        self.spaces.insert(
            sname.clone(),
            SpaceSpec {
                points: space.names().to_vec(),
                metric: space.matrix().map(|m| {
                    m.iter()
                        .map(|row| row.iter().map(format_rational).collect())
                        .collect()
                }),
            },
        );
        let fibers = (0..rds.n_fibers())
            .map(|w| {
                (0..rds.fiber_len(w))
                    .map(|j| rds.point_name(w, j).to_string())
                    .collect()
            })
            .collect();
        let maps = (0..rds.n_fibers())
            .map(|w| {
                let t = base.theta(w);
                (0..rds.fiber_len(w))
                    .map(|j| {
                        (
                            rds.point_name(w, j).to_string(),
                            rds.point_name(t, rds.step(w, j)).to_string(),
                        )
                    })
                    .collect()
            })
            .collect();
        self.systems.insert(
            name.to_string(),
            SystemSpec::Explicit(ExplicitSystem {
                driving: dname,
                space: sname,
                fibers,
                maps,
            }),
        );
    }

    pub fn add_cover(&mut self, name: &str, system: &str, rds: &BundleRds, cover: &RandomCover) {
        self.covers.insert(
            name.to_string(),
            CoverSpec {
                system: system.to_string(),
                elements: Some(cover.to_names(rds)),
                builtin: None,
                partition: false,
            },
        );
    }

    pub fn add_measure(&mut self, name: &str, system: &str, rds: &BundleRds, mu: &FiberedMeasure) {
        let weights = (0..rds.n_fibers())
            .map(|w| {
                (0..rds.fiber_len(w))
                    .filter(|&j| !mu.weight(w, j).is_zero())
                    .map(|j| (rds.point_name(w, j).to_string(), format_rational(mu.weight(w, j))))
                    .collect()
            })
            .collect();
        self.measures.insert(
            name.to_string(),
            MeasureSpec {
                system: system.to_string(),
                weights: Some(weights),
                builtin: None,
            },
        );
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        Self::resolve(ScenarioFile::parse(text)?)
    }

    /// Resolves every name and validates every object.
    pub fn resolve(file: ScenarioFile) -> Result<Self> {
        let mut driving = IndexMap::new();
        for (name, d) in &file.driving {
            let prob = d
                .prob
                .iter()
                .enumerate()
                .map(|(i, p)| rational_at(p, || format!("driving.{name}.prob[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            let sys = DrivingSystem::new(prob, d.theta.clone())
                .map_err(in_context(format!("driving system `{name}`")))?;
            let v = sys.violations();
            if !v.is_empty() {
                let list: Vec<String> = v.iter().map(ToString::to_string).collect();
                return Err(Error::Invalid(format!(
                    "driving system `{name}`: {}",
                    list.join("; ")
                )));
            }
            driving.insert(name.clone(), sys);
        }
        let mut spaces = IndexMap::new();
        for (name, s) in &file.spaces {
            let space = match &s.metric {
                None => MetricSpace::unmetrized(s.points.iter().cloned()),
                Some(rows) => {
                    let dist = rows
                        .iter()
                        .enumerate()
                        .map(|(i, row)| {
                            row.iter()
                                .enumerate()
                                .map(|(j, v)| {
                                    rational_at(v, || format!("spaces.{name}.metric[{i}][{j}]"))
                                })
                                .collect::<Result<Vec<_>>>()
                        })
                        .collect::<Result<Vec<_>>>()?;
                    MetricSpace::with_metric(s.points.iter().cloned(), dist)
                }
            }
            .map_err(in_context(format!("space `{name}`")))?;
            let v = space.violations();
            if !v.is_empty() {
                let list: Vec<String> = v.iter().map(ToString::to_string).collect();
                return Err(Error::Invalid(format!("space `{name}`: {}", list.join("; "))));
            }
            spaces.insert(name.clone(), space);
        }
        let mut systems: IndexMap<String, LoadedSystem> = IndexMap::new();
        for (name, spec) in &file.systems {
            let ctx = || format!("system `{name}`");
            let get = |n: &str| -> Result<&BundleRds> {
                systems.get(n).map(|s| &s.rds).ok_or_else(|| unknown("system", n))
            };
            let loaded = match spec {
                SystemSpec::Explicit(e) => {
                    let base = driving
                        .get(&e.driving)
                        .ok_or_else(|| unknown("driving system", &e.driving))?
                        .clone();
                    let space = spaces
                        .get(&e.space)
                        .ok_or_else(|| unknown("space", &e.space))?
                        .clone();
                    let fibers: Vec<Vec<&str>> = e
                        .fibers
                        .iter()
                        .map(|f| f.iter().map(String::as_str).collect())
                        .collect();
                    let maps: Vec<Vec<(&str, &str)>> = e
                        .maps
                        .iter()
                        .map(|m| m.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect())
                        .collect();
                    let fib_refs: Vec<&[&str]> = fibers.iter().map(Vec::as_slice).collect();
                    let map_refs: Vec<&[(&str, &str)]> = maps.iter().map(Vec::as_slice).collect();
                    let rds = BundleRds::from_names(base, space, &fib_refs, &map_refs)
                        .map_err(in_context(ctx()))?;
                    LoadedSystem {
                        rds,
                        kind: SystemKind::Explicit,
                    }
                }
                SystemSpec::Product(p) => {
                    let prod = product_system(get(&p.product.0)?, get(&p.product.1)?)
                        .map_err(in_context(ctx()))?;
                    LoadedSystem {
                        rds: prod.system.clone(),
                        kind: SystemKind::Product(Box::new(prod)),
                    }
                }
                SystemSpec::Pair(p) => {
                    let pair = pair_system(get(&p.pair)?);
                    LoadedSystem {
                        rds: pair.system().clone(),
                        kind: SystemKind::Pair(Box::new(pair)),
                    }
                }
                SystemSpec::Power(p) => {
                    if p.power.1 == 0 {
                        return Err(Error::Domain(format!("{}: power must be positive", ctx())));
                    }
                    LoadedSystem {
                        rds: get(&p.power.0)?.power(p.power.1),
                        kind: SystemKind::Power {
                            of: p.power.0.clone(),
                            m: p.power.1,
                        },
                    }
                }
            };
            systems.insert(name.clone(), loaded);
        }
        let system = |n: &str| -> Result<&BundleRds> {
            systems.get(n).map(|s| &s.rds).ok_or_else(|| unknown("system", n))
        };
        let mut covers = IndexMap::new();
        for (name, c) in &file.covers {
            let rds = system(&c.system)?;
            let cover = match (&c.elements, c.builtin.as_deref()) {
                (Some(el), None) => RandomCover::from_names(rds, el)
                    .map_err(in_context(format!("cover `{name}`")))?,
                (None, Some("singletons")) => RandomCover::singletons(rds),
                (None, Some("trivial")) => RandomCover::trivial(rds),
                (None, Some("fibers")) => RandomCover::fibers(rds),
                (None, Some(other)) => return Err(unknown("builtin cover", other)),
                _ => {
                    return Err(Error::Invalid(format!(
                        "cover `{name}` needs exactly one of `elements` and `builtin`"
                    )))
                }
            }
            .with_label(name.clone());
            if c.partition && !cover.is_partition() {
                return Err(Error::Invalid(format!(
                    "cover `{name}` is declared a partition but has overlapping elements"
                )));
            }
            covers.insert(
                name.clone(),
                NamedCover {
                    system: c.system.clone(),
                    cover,
                },
            );
        }
        let mut measures = IndexMap::new();
        for (name, m) in &file.measures {
            let rds = system(&m.system)?;
            let measure = match (&m.weights, m.builtin.as_deref()) {
                (Some(ws), None) => {
                    let entries = ws
                        .iter()
                        .enumerate()
                        .map(|(w, f)| {
                            f.iter()
                                .map(|(p, v)| {
                                    Ok((
                                        p.clone(),
                                        rational_at(v, || {
                                            format!("measures.{name}.weights[{w}].{p}")
                                        })?,
                                    ))
                                })
                                .collect::<Result<Vec<_>>>()
                        })
                        .collect::<Result<Vec<_>>>()?;
                    FiberedMeasure::from_names(rds, &entries)
                        .map_err(in_context(format!("measure `{name}`")))?
                }
                (None, Some("uniform")) => FiberedMeasure::uniform(rds),
                (None, Some(other)) => return Err(unknown("builtin measure", other)),
                _ => {
                    return Err(Error::Invalid(format!(
                        "measure `{name}` needs exactly one of `weights` and `builtin`"
                    )))
                }
            };
            measures.insert(
                name.clone(),
                NamedMeasure {
                    system: m.system.clone(),
                    measure,
                },
            );
        }
        let mut factor_maps = IndexMap::new();
        for (name, f) in &file.factor_maps {
            let ctx = format!("factor map `{name}`");
            let src = systems
                .get(&f.source)
                .ok_or_else(|| unknown("system", &f.source))?;
            let (map, target) = match (&f.map, f.builtin.as_deref()) {
                (Some(rows), None) => {
                    let tname = f.target.clone().ok_or_else(|| {
                        Error::Invalid(format!("{ctx}: an explicit map needs a target"))
                    })?;
                    let tgt = system(&tname)?;
                    let pi = explicit_map(&src.rds, tgt, rows).map_err(in_context(ctx.clone()))?;
                    let map = FactorMap::new(src.rds.clone(), tgt.clone(), pi)
                        .map_err(in_context(ctx.clone()))?;
                    (map, tname)
                }
                (None, Some(b)) => {
                    let (map, tname) = builtin_map(&f.source, src, &file, b)?;
                    if let Some(t) = &f.target {
                        if t != &tname && system(t)? != map.target() {
                            return Err(Error::Incompatible(format!(
                                "{ctx}: `{b}` maps onto `{tname}`, not `{t}`"
                            )));
                        }
                    }
                    (map, f.target.clone().unwrap_or(tname))
                }
                _ => {
                    return Err(Error::Invalid(format!(
                        "{ctx} needs exactly one of `map` and `builtin`"
                    )))
                }
            };
            factor_maps.insert(
                name.clone(),
                NamedFactorMap {
                    source: f.source.clone(),
                    target,
                    map,
                },
            );
        }
        let mut sfts = IndexMap::new();
        for (name, s) in &file.sfts {
            let base = driving
                .get(&s.driving)
                .ok_or_else(|| unknown("driving system", &s.driving))?
                .clone();
            let k = base.size();
            let comps = s
                .components
                .iter()
                .map(|c| match c {
                    ComponentSpec::Explicit(c) => c.clone(),
                    ComponentSpec::Constant { constant } => {
                        SftComponent::constant(constant.clone(), k)
                    }
                    ComponentSpec::FullShift { full_shift } => {
                        SftComponent::full_shift(*full_shift, k)
                    }
                    ComponentSpec::GoldenMean { .. } => SftComponent::golden_mean(k),
                })
                .collect();
            let sft = RandomSft::new(base, comps).map_err(in_context(format!("sft `{name}`")))?;
            sfts.insert(name.clone(), sft);
        }
        Ok(Scenario {
            file,
            driving,
            systems,
            covers,
            measures,
            factor_maps,
            sfts,
        })
    }

    pub fn system(&self, name: &str) -> Result<&BundleRds> {
        self.systems
            .get(name)
            .map(|s| &s.rds)
            .ok_or_else(|| unknown("system", name))
    }

    pub fn cover(&self, name: &str) -> Result<&NamedCover> {
        self.covers.get(name).ok_or_else(|| unknown("cover", name))
    }

    pub fn measure(&self, name: &str) -> Result<&NamedMeasure> {
        self.measures.get(name).ok_or_else(|| unknown("measure", name))
    }

    pub fn factor_map(&self, name: &str) -> Result<&NamedFactorMap> {
        self.factor_maps
            .get(name)
            .ok_or_else(|| unknown("factor map", name))
    }

    pub fn sft(&self, name: &str) -> Result<&RandomSft> {
        self.sfts.get(name).ok_or_else(|| unknown("sft", name))
    }

    /// Covers that live on the same system, in file order.
    pub fn covers_on(&self, system: &str) -> Vec<&RandomCover> {
        self.covers
            .values()
            .filter(|c| c.system == system)
            .map(|c| &c.cover)
            .collect()
    }
}

fn explicit_map(
    src: &BundleRds,
    tgt: &BundleRds,
    rows: &[IndexMap<String, String>],
) -> Result<Vec<Vec<usize>>> {
    if rows.len() != src.n_fibers() {
        return Err(Error::Invalid(format!(
            "map lists {} fibers, source has {}",
            rows.len(),
            src.n_fibers()
        )));
    }
    (0..src.n_fibers())
        .map(|w| {
            (0..src.fiber_len(w))
                .map(|j| {
                    let x = src.point_name(w, j);
                    let y = rows[w]
                        .get(x)
                        .ok_or_else(|| Error::Invalid(format!("undefined at `{x}` on fiber {w}")))?;
                    tgt.local_index(w, y)
                        .ok_or_else(|| Error::Domain(format!("`{y}` is not a point of fiber {w}")))
                })
                .collect()
        })
        .collect()
}

fn builtin_map(
    source_name: &str,
    src: &LoadedSystem,
    file: &ScenarioFile,
    builtin: &str,
) -> Result<(FactorMap, String)> {
    let spec = file.systems.get(source_name);
    match (builtin, &src.kind, spec) {
        ("identity", _, _) => Ok((FactorMap::identity(&src.rds), source_name.to_string())),
        ("project_left", SystemKind::Product(p), Some(SystemSpec::Product(s))) => {
            Ok((p.project_left(), s.product.0.clone()))
        }
        ("project_right", SystemKind::Product(p), Some(SystemSpec::Product(s))) => {
            Ok((p.project_right(), s.product.1.clone()))
        }
        ("project_first", SystemKind::Pair(p), Some(SystemSpec::Pair(s))) => {
            Ok((p.project_first(), s.pair.clone()))
        }
        ("project_second", SystemKind::Pair(p), Some(SystemSpec::Pair(s))) => {
            Ok((p.project_second(), s.pair.clone()))
        }
        ("project_left" | "project_right" | "project_first" | "project_second", _, _) => {
            Err(Error::Incompatible(format!(
                "`{builtin}` does not apply to system `{source_name}`"
            )))
        }
        (other, _, _) => Err(unknown("builtin factor map", other)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::sys_a;

    const SYS_A: &str = r#"{
      "version": 1,
      "name": "sys-a",
      "driving": { "D": { "prob": ["1/2", "1/2"], "theta": [1, 0] } },
      "spaces": { "X": { "points": ["a", "b", "c", "d"],
                         "metric": [["0","1","2","2"],["1","0","2","2"],
                                    ["2","2","0","1"],["2","2","1","0"]] } },
      "systems": {
        "A": { "driving": "D", "space": "X", "fibers": [["a","b"],["c","d"]],
               "maps": [{"a":"c","b":"c"},{"c":"a","d":"b"}] },
        "AA": { "product": ["A", "A"] },
        "A2": { "pair": "A" },
        "Apow": { "power": ["A", 2] }
      },
      "covers": {
        "S": { "system": "A", "builtin": "singletons", "partition": true },
        "Q": { "system": "A", "elements": [[["a"],["c","d"]],[["b"],["c","d"]]] }
      },
      "measures": { "u": { "system": "A", "builtin": "uniform" },
                    "m": { "system": "A", "weights": [{"a":"1/2"},{"c":"1/2"}] } },
      "factor_maps": { "pi": { "source": "AA", "builtin": "project_right" } }
    }"#;

    #[test]
    fn canonical_file_loads() {
        let s = Scenario::from_json(SYS_A).unwrap();
        assert_eq!(s.system("A").unwrap(), &sys_a());
        assert_eq!(s.system("AA").unwrap().fiber_len(0), 4);
        assert_eq!(s.cover("Q").unwrap().cover.len(), 2);
        assert_eq!(s.factor_map("pi").unwrap().target, "A");
        assert!(matches!(s.system("B"), Err(Error::UnknownName(_))));
        // idempotent: a second load of the same text is identical
        let again = Scenario::from_json(SYS_A).unwrap();
        assert_eq!(again.file, s.file);
    }

    #[test]
    fn round_trip_through_builder() {
        let a = sys_a();
        let mut f = ScenarioFile::new(Some("rt".into()));
        f.add_system("A", &a);
        f.add_cover("S", "A", &a, &RandomCover::singletons(&a));
        f.add_measure("u", "A", &a, &FiberedMeasure::uniform(&a));
        let s = Scenario::from_json(&f.to_json()).unwrap();
        assert_eq!(s.system("A").unwrap(), &a);
        assert_eq!(s.measure("u").unwrap().measure, FiberedMeasure::uniform(&a));
        assert_eq!(f.digest(), ScenarioFile::parse(&f.to_json()).unwrap().digest());
    }

    #[test]
    fn non_invariant_driving_is_named() {
        let text = r#"{"version":1,"driving":{"D":{"prob":["2/3","1/3"],"theta":[1,0]}}}"#;
        let err = Scenario::from_json(text).unwrap_err().to_string();
        assert!(err.contains("theta-invariance"), "{err}");
    }

    #[test]
    fn empty_sections_load() {
        let s = Scenario::from_json(r#"{"version":1,"covers":{}}"#).unwrap();
        assert!(s.covers.is_empty());
    }

    #[test]
    fn parse_errors_have_positions() {
        let err = Scenario::from_json("{\n \"version\": 1,\n \"systems\": [}").unwrap_err();
        match err {
            Error::Parse { at, .. } => assert!(at.starts_with("line 3"), "{at}"),
            other => panic!("{other:?}"),
        }
        let err = Scenario::from_json(r#"{"version":1,"covers":{"Q":{"system":"Z","builtin":"trivial"}}}"#)
            .unwrap_err();
        assert!(matches!(err, Error::UnknownName(_)));
    }
}
