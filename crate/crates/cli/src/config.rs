//! Experiment configuration: a TOML document validated into typed inputs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use outspace::axes::DEFAULT_RANDOM_ROSES;
use outspace::currents::{base_current, normalize_against, RationalCurrent};
use outspace::free_group::{enumerate_conj_classes, Automorphism, Basis, ConjClass};
use outspace::outer_space::parse_marked_graph;
use outspace::walk::{default_l_grid, WalkCaps, WalkMeasure};
use outspace::{Current, MarkedGraph};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {message}")]
    Syntax { path: String, message: String },
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
}

fn field(name: impl Into<String>, message: impl std::fmt::Display) -> ConfigError {
    ConfigError::Field {
        field: name.into(),
        message: message.to_string(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Walk,
    Drift,
    NsDynamics,
    Lip,
    Axis,
    StripDensity,
    Census,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Walk => "walk",
            ExperimentKind::Drift => "drift",
            ExperimentKind::NsDynamics => "ns-dynamics",
            ExperimentKind::Lip => "lip",
            ExperimentKind::Axis => "axis",
            ExperimentKind::StripDensity => "strip-density",
            ExperimentKind::Census => "census",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: ExperimentKind,
    #[serde(default = "default_rank")]
    rank: usize,
    generators: Option<Vec<String>>,
    output: Option<PathBuf>,
    #[serde(default)]
    automorphisms: BTreeMap<String, RawAutomorphism>,
    measure: Option<RawMeasure>,
    #[serde(default)]
    parameters: RawParameters,
    lip: Option<RawLip>,
    axis: Option<RawAxis>,
    census: Option<RawCensus>,
}

fn default_rank() -> usize {
    2
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawAutomorphism {
    Images {
        images: Vec<String>,
        inverse: Vec<String>,
    },
    Compose {
        compose: Vec<String>,
    },
    Power {
        power: String,
        exponent: i64,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMeasure {
    name: Option<String>,
    atoms: Vec<RawAtom>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAtom {
    automorphism: String,
    probability: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParameters {
    n: Option<usize>,
    seeds: Option<usize>,
    seed_list: Option<Vec<u64>>,
    classes: Option<Vec<String>>,
    basepoint: Option<PathBuf>,
    basepoint_lengths: Option<Vec<f64>>,
    l_grid: Option<Vec<f64>>,
    random_roses: Option<usize>,
    probe_seed: Option<u64>,
    letter_cap: Option<usize>,
    atom_cap: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLip {
    source: PathBuf,
    target: PathBuf,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPair {
    /// `φ^{±n} η₀` normalized against the basepoint.
    proxy: Option<String>,
    proxy_n: Option<usize>,
    minus: Option<Vec<RawAtomCurrent>>,
    plus: Option<Vec<RawAtomCurrent>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAtomCurrent {
    class: String,
    #[serde(default = "one")]
    weight: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAxis {
    trees: Vec<PathBuf>,
    threshold: f64,
    pair: RawPair,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCensus {
    k_max: usize,
    threshold: Option<f64>,
    #[serde(default = "default_factor")]
    threshold_factor: f64,
    generators: Option<Vec<String>>,
    #[serde(default = "default_ball_budget")]
    ball_budget: usize,
    pair: RawPair,
}

fn default_factor() -> f64 {
    1.05
}

fn default_ball_budget() -> usize {
    1_000_000
}

/// Pair of currents with the automorphism whose powers give the points of
/// interest, when the pair is a proxy.
#[derive(Clone, Debug)]
pub struct CurrentPair {
    pub minus: Current,
    pub plus: Current,
    pub source: Option<(String, Automorphism, usize)>,
}

#[derive(Clone, Debug)]
pub struct AxisSpec {
    pub trees: Vec<(String, MarkedGraph)>,
    pub threshold: f64,
    pub pair: CurrentPair,
}

#[derive(Clone, Debug)]
pub struct CensusSpec {
    pub k_max: usize,
    pub threshold: Option<f64>,
    pub threshold_factor: f64,
    pub generators: Vec<Automorphism>,
    pub generator_names: Vec<String>,
    pub ball_budget: usize,
    pub pair: CurrentPair,
}

/// Validated configuration.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub basis: Basis,
    pub automorphisms: BTreeMap<String, Automorphism>,
    pub measure: Option<WalkMeasure>,
    pub n: usize,
    pub seed_count: usize,
    pub seed_list: Option<Vec<u64>>,
    pub classes: Vec<ConjClass>,
    pub basepoint: MarkedGraph,
    pub l_grid: Vec<f64>,
    pub random_roses: usize,
    pub probe_seed: u64,
    pub caps: WalkCaps,
    pub output: Option<PathBuf>,
    pub lip: Option<(MarkedGraph, MarkedGraph, Basis)>,
    pub axis: Option<AxisSpec>,
    pub census: Option<CensusSpec>,
}

impl ExperimentConfig {
    pub fn seeds(&self, seed_base: u64) -> Vec<u64> {
        match &self.seed_list {
            Some(s) => s.clone(),
            None => (0..self.seed_count as u64).map(|i| seed_base + i).collect(),
        }
    }

    pub fn measure(&self) -> &WalkMeasure {
        self.measure.as_ref().expect("validated: measure present")
    }
}

fn builtin(name: &str, rank: usize) -> Option<Automorphism> {
    match (name, rank) {
        ("identity", _) => Some(Automorphism::identity(rank)),
        ("fibonacci", 2) => Some(Automorphism::fibonacci()),
        ("swap", 2) => Some(Automorphism::swap()),
        _ => None,
    }
}

fn resolve(
    name: &str,
    defined: &BTreeMap<String, Automorphism>,
    rank: usize,
    at: &str,
) -> Result<Automorphism, ConfigError> {
    defined
        .get(name)
        .cloned()
        .or_else(|| builtin(name, rank))
        .ok_or_else(|| field(at, format!("automorphism {name:?} is not defined")))
}

fn load_tree(path: &Path, base_dir: &Path, at: &str) -> Result<(Basis, MarkedGraph), ConfigError> {
    let full = base_dir.join(path);
    let text = std::fs::read_to_string(&full)
        .map_err(|e| field(at, format!("{}: {e}", full.display())))?;
    parse_marked_graph::<f64>(&text).map_err(|e| field(at, format!("{}: {e}", full.display())))
}

fn parse_pair(
    raw: &RawPair,
    basis: &Basis,
    autos: &BTreeMap<String, Automorphism>,
    basepoint: &MarkedGraph,
    at: &str,
) -> Result<CurrentPair, ConfigError> {
    let parse_list = |list: &[RawAtomCurrent], which: &str| -> Result<Current, ConfigError> {
        let mut c = RationalCurrent::empty();
        for (i, a) in list.iter().enumerate() {
            let f = format!("{at}.{which}[{i}]");
            let w = basis.parse_word(&a.class).map_err(|e| field(&f, e))?;
            c.add_class(&ConjClass::of(&w), a.weight)
                .map_err(|e| field(&f, e))?;
        }
        if c.is_empty() {
            return Err(field(format!("{at}.{which}"), "current is empty"));
        }
        Ok(c)
    };
    match (&raw.proxy, &raw.minus, &raw.plus) {
        (Some(name), None, None) => {
            let a = resolve(name, autos, basis.rank(), &format!("{at}.proxy"))?;
            let n = raw.proxy_n.unwrap_or(20);
            let eta = base_current::<f64>(basis.rank());
            let norm = |g: &Automorphism| -> Result<Current, ConfigError> {
                let c = eta.act(g).map_err(|e| field(format!("{at}.proxy"), e))?;
                normalize_against(&c, basepoint).map_err(|e| field(format!("{at}.proxy"), e))
            };
            Ok(CurrentPair {
                minus: norm(&a.invert().pow(n))?,
                plus: norm(&a.pow(n))?,
                source: Some((name.clone(), a, n)),
            })
        }
        (None, Some(m), Some(p)) => Ok(CurrentPair {
            minus: parse_list(m, "minus")?,
            plus: parse_list(p, "plus")?,
            source: None,
        }),
        _ => Err(field(at, "give either `proxy` or both `minus` and `plus`")),
    }
}

/// Parses and validates; relative file paths resolve against `base_dir`.
pub fn parse_config(
    text: &str,
    origin: &str,
    base_dir: &Path,
) -> Result<ExperimentConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Syntax {
        path: origin.to_string(),
        message: e.to_string(),
    })?;
    if raw.rank < 2 {
        return Err(field("rank", "must be at least 2"));
    }
    let basis = match raw.generators {
        Some(names) => {
            if names.len() != raw.rank {
                return Err(field(
                    "generators",
                    format!("{} names for rank {}", names.len(), raw.rank),
                ));
            }
            Basis::new(names).map_err(|e| field("generators", e))?
        }
        None => Basis::standard(raw.rank),
    };
    let rank = raw.rank;

    // Definitions may refer to earlier ones, so resolve until stable.
    let mut autos: BTreeMap<String, Automorphism> = BTreeMap::new();
    let mut pending: Vec<(&String, &RawAutomorphism)> = raw.automorphisms.iter().collect();
    while !pending.is_empty() {
        let before = pending.len();
        let mut rest = Vec::new();
        let mut last_err = None;
        for (name, def) in pending {
            let at = format!("automorphisms.{name}");
            let built = match def {
                RawAutomorphism::Images { images, inverse } => {
                    let parse = |ws: &[String], key: &str| -> Result<Vec<_>, ConfigError> {
                        if ws.len() != rank {
                            return Err(field(
                                format!("{at}.{key}"),
                                format!("{} words for rank {rank}", ws.len()),
                            ));
                        }
                        ws.iter()
                            .enumerate()
                            .map(|(i, w)| {
                                basis
                                    .parse_word(w)
                                    .map_err(|e| field(format!("{at}.{key}[{i}]"), e))
                            })
                            .collect()
                    };
                    let a = Automorphism::new(parse(images, "images")?, parse(inverse, "inverse")?)
                        .map_err(|e| field(&at, e))?;
                    Ok(a)
                }
                RawAutomorphism::Compose { compose } => {
                    let mut a = Automorphism::identity(rank);
                    let mut res = Ok(());
                    for (i, f) in compose.iter().enumerate() {
                        match resolve(f, &autos, rank, &format!("{at}.compose[{i}]")) {
                            Ok(g) => a = a.compose(&g).map_err(|e| field(&at, e))?,
                            Err(e) => {
                                res = Err(e);
                                break;
                            }
                        }
                    }
                    res.map(|_| a)
                }
                RawAutomorphism::Power { power, exponent } => {
                    resolve(power, &autos, rank, &format!("{at}.power")).map(|g| {
                        if *exponent >= 0 {
                            g.pow(*exponent as usize)
                        } else {
                            g.invert().pow(exponent.unsigned_abs() as usize)
                        }
                    })
                }
            };
            match built {
                Ok(a) => {
                    if a.rank() != rank {
                        return Err(field(&at, format!("rank {} differs from {rank}", a.rank())));
                    }
                    autos.insert(name.clone(), a);
                }
                Err(e) => {
                    last_err = Some(e);
                    rest.push((name, def));
                }
            }
        }
        if rest.len() == before {
            return Err(last_err.expect("unresolved definitions carry an error"));
        }
        pending = rest;
    }

    let measure = match &raw.measure {
        None => None,
        Some(m) => {
            let mut support = Vec::new();
            for (i, a) in m.atoms.iter().enumerate() {
                let g = resolve(
                    &a.automorphism,
                    &autos,
                    rank,
                    &format!("measure.atoms[{i}].automorphism"),
                )?;
                support.push((g, a.probability));
            }
            let name = m.name.clone().unwrap_or_else(|| "mu".into());
            Some(WalkMeasure::new(name, support).map_err(|e| field("measure", e))?)
        }
    };

    let p = &raw.parameters;
    let caps = WalkCaps {
        letters: p.letter_cap.unwrap_or(WalkCaps::default().letters),
        atoms: p.atom_cap.unwrap_or(WalkCaps::default().atoms),
    };
    if caps.letters == 0 {
        return Err(field("parameters.letter_cap", "must be positive"));
    }
    if caps.atoms == 0 {
        return Err(field("parameters.atom_cap", "must be positive"));
    }
    let classes = match &p.classes {
        Some(list) => {
            if list.is_empty() {
                return Err(field("parameters.classes", "must be nonempty"));
            }
            list.iter()
                .enumerate()
                .map(|(i, w)| {
                    let at = format!("parameters.classes[{i}]");
                    let c = ConjClass::of(&basis.parse_word(w).map_err(|e| field(&at, e))?);
                    if c.is_trivial() {
                        return Err(field(&at, "class is trivial"));
                    }
                    Ok(c)
                })
                .collect::<Result<Vec<_>, _>>()?
        }
        None => enumerate_conj_classes(rank, 3, 1_000_000)
            .map_err(|e| field("parameters.classes", e))?,
    };
    let basepoint = match (&p.basepoint, &p.basepoint_lengths) {
        (Some(_), Some(_)) => {
            return Err(field(
                "parameters.basepoint",
                "give a tree file or rose lengths, not both",
            ));
        }
        (Some(path), None) => {
            let (_, t) = load_tree(path, base_dir, "parameters.basepoint")?;
            if t.rank() != rank {
                return Err(field(
                    "parameters.basepoint",
                    format!("tree has rank {}", t.rank()),
                ));
            }
            t
        }
        (None, Some(l)) => {
            if l.len() != rank {
                return Err(field(
                    "parameters.basepoint_lengths",
                    format!("{} lengths for rank {rank}", l.len()),
                ));
            }
            MarkedGraph::rose(l).map_err(|e| field("parameters.basepoint_lengths", e))?
        }
        (None, None) => MarkedGraph::unit_rose(rank).map_err(|e| field("rank", e))?,
    };
    let l_grid = p.l_grid.clone().unwrap_or_else(default_l_grid);
    if l_grid.is_empty() || l_grid.iter().any(|&l| !(l >= 1.0)) {
        return Err(field(
            "parameters.l_grid",
            "values must be ≥ 1 and the grid nonempty",
        ));
    }
    if let Some(list) = &p.seed_list {
        if list.is_empty() {
            return Err(field("parameters.seed_list", "must be nonempty"));
        }
    }
    let seed_count = p.seeds.unwrap_or(1);
    if seed_count == 0 {
        return Err(field("parameters.seeds", "must be positive"));
    }

    let needs_measure = matches!(
        raw.experiment,
        ExperimentKind::Walk
            | ExperimentKind::Drift
            | ExperimentKind::NsDynamics
            | ExperimentKind::StripDensity
    );
    if needs_measure {
        match &measure {
            None => {
                return Err(field(
                    "measure",
                    format!("required by the {} experiment", raw.experiment.name()),
                ))
            }
            Some(m) if m.rank() != rank => {
                return Err(field("measure", format!("measure has rank {}", m.rank())));
            }
            _ => {}
        }
    }
    let n = p.n.unwrap_or(20);
    if matches!(
        raw.experiment,
        ExperimentKind::Drift | ExperimentKind::StripDensity
    ) && n == 0
    {
        return Err(field("parameters.n", "must be at least 1"));
    }

    let lip = match (raw.experiment, &raw.lip) {
        (ExperimentKind::Lip, None) => return Err(field("lip", "section required")),
        (_, Some(l)) => {
            let (basis_a, a) = load_tree(&l.source, base_dir, "lip.source")?;
            let (_, b) = load_tree(&l.target, base_dir, "lip.target")?;
            if a.rank() != b.rank() {
                return Err(field(
                    "lip.target",
                    format!("rank {} differs from source rank {}", b.rank(), a.rank()),
                ));
            }
            Some((a, b, basis_a))
        }
        _ => None,
    };
    let axis = match (raw.experiment, &raw.axis) {
        (ExperimentKind::Axis, None) => return Err(field("axis", "section required")),
        (_, Some(ax)) => {
            if !(ax.threshold >= 1.0) {
                return Err(field("axis.threshold", "must be ≥ 1"));
            }
            if ax.trees.is_empty() {
                return Err(field("axis.trees", "must be nonempty"));
            }
            let trees = ax
                .trees
                .iter()
                .enumerate()
                .map(|(i, path)| {
                    let at = format!("axis.trees[{i}]");
                    let (_, t) = load_tree(path, base_dir, &at)?;
                    if t.rank() != rank {
                        return Err(field(&at, format!("tree has rank {}", t.rank())));
                    }
                    Ok((path.display().to_string(), t))
                })
                .collect::<Result<Vec<_>, _>>()?;
            Some(AxisSpec {
                trees,
                threshold: ax.threshold,
                pair: parse_pair(&ax.pair, &basis, &autos, &basepoint, "axis.pair")?,
            })
        }
        _ => None,
    };
    let census = match (raw.experiment, &raw.census) {
        (ExperimentKind::Census, None) => return Err(field("census", "section required")),
        (_, Some(c)) => {
            if let Some(t) = c.threshold {
                if !(t >= 1.0) {
                    return Err(field("census.threshold", "must be ≥ 1"));
                }
            }
            if !(c.threshold_factor >= 1.0) {
                return Err(field("census.threshold_factor", "must be ≥ 1"));
            }
            let pair = parse_pair(&c.pair, &basis, &autos, &basepoint, "census.pair")?;
            if c.threshold.is_none() && pair.source.is_none() {
                return Err(field(
                    "census.threshold",
                    "required unless the pair is a proxy",
                ));
            }
            let (generators, generator_names) = match &c.generators {
                None => (
                    Automorphism::nielsen_generators(rank),
                    vec!["nielsen".to_string()],
                ),
                Some(names) => (
                    names
                        .iter()
                        .enumerate()
                        .map(|(i, g)| resolve(g, &autos, rank, &format!("census.generators[{i}]")))
                        .collect::<Result<Vec<_>, _>>()?,
                    names.clone(),
                ),
            };
            if c.ball_budget == 0 {
                return Err(field("census.ball_budget", "must be positive"));
            }
            Some(CensusSpec {
                k_max: c.k_max,
                threshold: c.threshold,
                threshold_factor: c.threshold_factor,
                generators,
                generator_names,
                ball_budget: c.ball_budget,
                pair,
            })
        }
        _ => None,
    };

    Ok(ExperimentConfig {
        experiment: raw.experiment,
        basis,
        automorphisms: autos,
        measure,
        n,
        seed_count,
        seed_list: p.seed_list.clone(),
        classes,
        basepoint,
        l_grid,
        random_roses: p.random_roses.unwrap_or(DEFAULT_RANDOM_ROSES),
        probe_seed: p.probe_seed.unwrap_or(0),
        caps,
        output: raw.output,
        lip,
        axis,
        census,
    })
}
