//! Seeded parameter sweeps: a TOML experiment description, deployment of one
//! world per (sweep value, seed), scheduling with the chosen algorithms and
//! CSV output of the resulting records.
//!
//! Output bytes depend only on the spec. Points run in parallel, records are
//! sorted by (value, seed, algorithm) before emission, and wall times are
//! recorded as zero unless `timing` is switched on.

use std::fmt;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::{Jammer, JammerKind};
use crate::error::{Error, Result};
use crate::geometry::{sample_positions, Point, Rect, WorldModel};
use crate::greedy::greedy_schedule;
use crate::lifetime::{baseline_lifetime, infinite_lifetime_certificate, Verdict};
use crate::mrs::mrs_schedule;
use crate::schedule::Termination;
use crate::sinr::{active_count_bounds, ConstraintTable, NetworkConfig};

/// Square fence with its lower-left corner at the origin and a square storage
/// region centered inside it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometrySpec {
    pub fence_side: f64,
    pub storage_side: f64,
    /// Boundary discretization step.
    pub lambda: f64,
}

impl Default for GeometrySpec {
    fn default() -> Self {
        Self {
            fence_side: 100.0,
            storage_side: 25.0,
            lambda: 2.0,
        }
    }
}

impl GeometrySpec {
    pub fn fence(&self) -> Result<Rect> {
        Rect::new(0.0, 0.0, self.fence_side, self.fence_side)
    }

    pub fn storage(&self) -> Result<Rect> {
        let half = self.fence_side / 2.0;
        Rect::centered_square(Point::new(half, half), self.storage_side)
    }

    /// The empty world described by this geometry.
    pub fn world(&self) -> Result<WorldModel> {
        WorldModel::new(self.storage()?, self.fence()?, self.lambda)
    }
}

/// Physical-layer and energy parameters. The discretization step lives in
/// [`GeometrySpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NetworkSpec {
    pub p_t: f64,
    pub p_j: f64,
    pub gamma: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub c: u32,
    pub epsilon: f64,
}

impl Default for NetworkSpec {
    fn default() -> Self {
        let d = NetworkConfig::default();
        Self {
            p_t: d.p_t,
            p_j: d.p_j,
            gamma: d.gamma,
            delta1: d.delta1,
            delta2: d.delta2,
            c: d.c,
            epsilon: d.epsilon,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct JammerSpec {
    pub n: usize,
    /// Active slots a full battery funds; battery = capacity = `lifespan * c`.
    pub lifespan: u32,
    /// Fraction of rechargeable jammers. The first `round(eta * n)` deployed
    /// jammers are rechargeable.
    pub eta: f64,
}

impl Default for JammerSpec {
    fn default() -> Self {
        Self {
            n: 100,
            lifespan: 10,
            eta: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    N,
    PJ,
    Lifespan,
    Delta2,
    Eta,
    C,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            Self::N => "n",
            Self::PJ => "p_j",
            Self::Lifespan => "lifespan",
            Self::Delta2 => "delta2",
            Self::Eta => "eta",
            Self::C => "c",
        }
    }

    /// Range explored by the reference experiments. Values outside it need
    /// `extended = true`.
    pub fn reference_range(self) -> (f64, f64) {
        match self {
            Self::N => (30.0, 120.0),
            Self::PJ => (0.1, 20.0),
            Self::Lifespan => (1.0, 10.0),
            Self::Delta2 => (0.1, 0.9),
            Self::Eta => (0.0, 0.8),
            Self::C => (4.0, 20.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Greedy,
    Mrs,
    Baseline,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Self::Greedy => "greedy",
            Self::Mrs => "mrs",
            Self::Baseline => "baseline",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    /// Empty means a single point at the configured default.
    pub values: Vec<f64>,
    /// Seeds per point; point `s` deploys with seed `base_seed + s`, so every
    /// sweep value sees the same seeds.
    pub seeds: usize,
    pub base_seed: u64,
    pub algorithms: Vec<Algorithm>,
    pub max_slots: usize,
    /// Allow values outside the reference ranges.
    pub extended: bool,
    /// Record measured wall times instead of zeros. Makes output nondeterministic.
    pub timing: bool,
    /// Fail instead of flagging a point whose fully deployed set is unreliable.
    pub strict: bool,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            variable: SweepVariable::N,
            values: Vec::new(),
            seeds: 5,
            base_seed: 0,
            algorithms: vec![Algorithm::Greedy],
            max_slots: 10_000,
            extended: false,
            timing: false,
            strict: false,
        }
    }
}

/// A complete experiment description. Every field has a default, so an empty
/// document is the full-size profile with no sweep.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSpec {
    pub geometry: GeometrySpec,
    pub network: NetworkSpec,
    pub jammers: JammerSpec,
    pub sweep: SweepSpec,
}

impl ExperimentSpec {
    /// 100 m fence, 25 m storage, 100 jammers.
    pub fn paper() -> Self {
        Self::default()
    }

    /// Scaled-down profile: 40 m fence, 10 m storage, 30 jammers.
    ///
    /// With γ = 2 reliability is scale free, so 30 jammers on a small field
    /// behave like 30 jammers on the large one, which is too few to cover the
    /// fence at the large profile's power ratio. The desk profile lowers
    /// `p_t` to 1 (only `p_t / p_j` matters) and keeps jammers 2 m away from
    /// both boundaries, so the full deployment is reliable for typical seeds
    /// and the storage constraint starts to bind inside the usual `p_j` range.
    pub fn desk() -> Self {
        Self {
            geometry: GeometrySpec {
                fence_side: 40.0,
                storage_side: 10.0,
                lambda: 2.0,
            },
            network: NetworkSpec {
                p_t: 1.0,
                epsilon: 2.0,
                ..NetworkSpec::default()
            },
            jammers: JammerSpec {
                n: 30,
                ..JammerSpec::default()
            },
            sweep: SweepSpec {
                max_slots: 1_000,
                ..SweepSpec::default()
            },
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.geometry.world()?;
        self.network_config(&self.network).validate()?;
        self.check_jammers(&self.jammers)?;
        let sweep = &self.sweep;
        if sweep.seeds == 0 {
            return Err(Error::Config("seeds must be at least 1".into()));
        }
        if sweep.max_slots == 0 {
            return Err(Error::Config("max_slots must be at least 1".into()));
        }
        if sweep.algorithms.is_empty() {
            return Err(Error::Config("at least one algorithm is required".into()));
        }
        let (lo, hi) = sweep.variable.reference_range();
        for &v in &sweep.values {
            if !sweep.extended && !(lo..=hi).contains(&v) {
                return Err(Error::Config(format!(
                    "{} = {v} is outside [{lo}, {hi}]; set extended = true to allow it",
                    sweep.variable.name()
                )));
            }
            let (net, jam) = self.point(v)?;
            self.network_config(&net).validate()?;
            self.check_jammers(&jam)?;
        }
        Ok(())
    }

    fn check_jammers(&self, jam: &JammerSpec) -> Result<()> {
        if jam.n == 0 {
            return Err(Error::Config("n must be at least 1".into()));
        }
        if jam.lifespan == 0 {
            return Err(Error::Config("lifespan must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&jam.eta) {
            return Err(Error::Config(format!("eta must lie in [0, 1], got {}", jam.eta)));
        }
        Ok(())
    }

    fn network_config(&self, net: &NetworkSpec) -> NetworkConfig {
        NetworkConfig {
            p_t: net.p_t,
            p_j: net.p_j,
            gamma: net.gamma,
            delta1: net.delta1,
            delta2: net.delta2,
            c: net.c,
            lambda: self.geometry.lambda,
            epsilon: net.epsilon,
        }
    }

    /// Sweep values, or the variable's configured value when none are listed.
    pub fn values(&self) -> Vec<f64> {
        if !self.sweep.values.is_empty() {
            return self.sweep.values.clone();
        }
        let current = match self.sweep.variable {
            SweepVariable::N => self.jammers.n as f64,
            SweepVariable::PJ => self.network.p_j,
            SweepVariable::Lifespan => self.jammers.lifespan as f64,
            SweepVariable::Delta2 => self.network.delta2,
            SweepVariable::Eta => self.jammers.eta,
            SweepVariable::C => self.network.c as f64,
        };
        vec![current]
    }

    /// Network and jammer settings with the sweep variable set to `value`.
    fn point(&self, value: f64) -> Result<(NetworkSpec, JammerSpec)> {
        let mut net = self.network.clone();
        let mut jam = self.jammers.clone();
        let integer = |v: f64| -> Result<u64> {
            if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
                Ok(v as u64)
            } else {
                Err(Error::Config(format!(
                    "{} must take non-negative integer values, got {v}",
                    self.sweep.variable.name()
                )))
            }
        };
        match self.sweep.variable {
            SweepVariable::N => jam.n = integer(value)? as usize,
            SweepVariable::PJ => net.p_j = value,
            SweepVariable::Lifespan => jam.lifespan = integer(value)? as u32,
            SweepVariable::Delta2 => net.delta2 = value,
            SweepVariable::Eta => jam.eta = value,
            SweepVariable::C => net.c = integer(value)? as u32,
        }
        Ok((net, jam))
    }

    /// The world and config for sweep value `value` deployed with `seed`.
    pub fn deploy_at(&self, value: f64, seed: u64) -> Result<(WorldModel, NetworkConfig)> {
        let (net, jam) = self.point(value)?;
        self.deploy_with(&net, &jam, seed)
    }

    /// The world and config at the configured defaults, ignoring the sweep.
    pub fn deploy(&self, seed: u64) -> Result<(WorldModel, NetworkConfig)> {
        self.deploy_with(&self.network, &self.jammers, seed)
    }

    fn deploy_with(&self, net: &NetworkSpec, jam: &JammerSpec, seed: u64) -> Result<(WorldModel, NetworkConfig)> {
        let cfg = self.network_config(net);
        cfg.validate()?;
        self.check_jammers(jam)?;
        let world = self.geometry.world()?;
        let (positions, _) = sample_positions(&world.storage, &world.fence, jam.n, seed, cfg.epsilon)?;
        let capacity = jam
            .lifespan
            .checked_mul(cfg.c)
            .ok_or_else(|| Error::Config("lifespan * c overflows the battery type".into()))?;
        let rechargeable = (jam.eta * jam.n as f64).round() as usize;
        let jammers = positions
            .into_iter()
            .enumerate()
            .map(|(id, p)| {
                let kind = if id < rechargeable {
                    JammerKind::Rechargeable
                } else {
                    JammerKind::Unrechargeable
                };
                Jammer::new(id, p, kind, capacity)
            })
            .collect();
        Ok((world.with_jammers(jammers)?, cfg))
    }
}

/// A deployed world in a self-contained, editable form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub network: NetworkConfig,
    pub storage: Rect,
    pub fence: Rect,
    pub jammers: Vec<Jammer>,
}

impl Scenario {
    pub fn new(world: &WorldModel, network: NetworkConfig) -> Self {
        Self {
            network,
            storage: world.storage,
            fence: world.fence,
            jammers: world.jammers.clone(),
        }
    }

    /// Rebuilds and validates the world, discretizing with `network.lambda`.
    pub fn world(&self) -> Result<WorldModel> {
        self.network.validate()?;
        WorldModel::new(self.storage, self.fence, self.network.lambda)?.with_jammers(self.jammers.clone())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let scenario: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        scenario.world()?;
        Ok(scenario)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario fields always serialize")
    }
}

/// One scheduling run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub value: f64,
    pub seed: u64,
    pub algorithm: Algorithm,
    pub lifetime: usize,
    pub termination: Termination,
    /// All-active lifetime of the same world.
    pub baseline: usize,
    /// Seconds spent in the scheduler, or zero when timing is off.
    pub wall_time: f64,
    /// Label of the unbounded-lifetime verdict.
    pub certificate: String,
    /// Sizes of the round-robin plan's sets when the verdict is infinite.
    pub plan_sizes: Vec<usize>,
    pub l_jam: Option<usize>,
    pub lower_bound: usize,
    pub upper_bound: usize,
    /// Whether the fully deployed set was reliable at the start.
    pub feasible: bool,
}

/// Column names in output order.
pub const CSV_HEADER: [&str; 13] = [
    "value",
    "seed",
    "algorithm",
    "lifetime",
    "termination",
    "baseline",
    "wall_time",
    "certificate",
    "plan_sizes",
    "l_jam",
    "lower_bound",
    "upper_bound",
    "feasible",
];

pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ExperimentRecord>> {
    spec.validate()?;
    let points: Vec<(f64, u64)> = spec
        .values()
        .into_iter()
        .flat_map(|v| (0..spec.sweep.seeds as u64).map(move |s| (v, spec.sweep.base_seed + s)))
        .collect();
    let batches = points
        .par_iter()
        .map(|&(value, seed)| run_point(spec, value, seed))
        .collect::<Result<Vec<_>>>()?;
    let mut records: Vec<ExperimentRecord> = batches.into_iter().flatten().collect();
    records.sort_by(|a, b| {
        a.value
            .total_cmp(&b.value)
            .then(a.seed.cmp(&b.seed))
            .then(a.algorithm.cmp(&b.algorithm))
    });
    Ok(records)
}

fn run_point(spec: &ExperimentSpec, value: f64, seed: u64) -> Result<Vec<ExperimentRecord>> {
    let (world, cfg) = spec.deploy_at(value, seed)?;
    let all: Vec<usize> = (0..world.len()).collect();
    let feasible = ConstraintTable::new(&world, &cfg).is_reliable(&all)?;
    if spec.sweep.strict && !feasible {
        return Err(Error::InfeasibleStart { value, seed });
    }
    let max_slots = spec.sweep.max_slots;
    let baseline = baseline_lifetime(&world, &cfg, max_slots)?;
    let certificate = infinite_lifetime_certificate(&world, &cfg)?;
    let plan_sizes = match &certificate.verdict {
        Verdict::Infinite { plan } => plan.iter().map(Vec::len).collect(),
        _ => Vec::new(),
    };
    let bounds = active_count_bounds(&world, &cfg)?;

    let mut records = Vec::with_capacity(spec.sweep.algorithms.len());
    for &algorithm in &spec.sweep.algorithms {
        let start = Instant::now();
        let (lifetime, termination) = match algorithm {
            Algorithm::Greedy => {
                let s = greedy_schedule(&world, &cfg, max_slots)?;
                (s.lifetime, s.termination)
            }
            Algorithm::Mrs => (mrs_schedule(&world, &cfg)?.lifetime, Termination::Dead),
            Algorithm::Baseline => {
                let cap = if baseline >= max_slots {
                    Termination::SlotCapReached
                } else {
                    Termination::Dead
                };
                (baseline, cap)
            }
        };
        let elapsed = start.elapsed().as_secs_f64();
        records.push(ExperimentRecord {
            value,
            seed,
            algorithm,
            lifetime,
            termination,
            baseline,
            wall_time: if spec.sweep.timing { elapsed } else { 0.0 },
            certificate: certificate.label().to_string(),
            plan_sizes: plan_sizes.clone(),
            l_jam: certificate.l_jam,
            lower_bound: bounds.lower,
            upper_bound: bounds.upper,
            feasible,
        });
    }
    Ok(records)
}

/// Decimal rendering with nine significant digits and no exponent.
pub fn format_decimal(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{:.8}", if v.is_finite() { 0.0 } else { v });
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (8 - magnitude).max(0) as usize;
    let rounded = format!("{v:.decimals$}");
    // Rounding can carry into a new leading digit (9.99999999951 -> 10.00000000).
    let carried = rounded.trim_start_matches('-').split('.').next().map_or(0, str::len) as i32;
    if decimals > 0 && carried > magnitude.max(0) + 1 {
        let decimals = decimals - 1;
        format!("{v:.decimals$}")
    } else {
        rounded
    }
}

fn termination_label(t: Termination) -> &'static str {
    match t {
        Termination::Dead => "dead",
        Termination::SlotCapReached => "slot_cap",
    }
}

/// Writes a header and one line per record.
pub fn emit_csv<W: Write>(records: &[ExperimentRecord], sink: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(sink);
    let to_io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    out.write_record(CSV_HEADER).map_err(to_io)?;
    for r in records {
        let plan: Vec<String> = r.plan_sizes.iter().map(usize::to_string).collect();
        out.write_record([
            format_decimal(r.value),
            r.seed.to_string(),
            r.algorithm.name().to_string(),
            r.lifetime.to_string(),
            termination_label(r.termination).to_string(),
            r.baseline.to_string(),
            format_decimal(r.wall_time),
            r.certificate.clone(),
            plan.join(";"),
            r.l_jam.map_or_else(String::new, |l| l.to_string()),
            r.lower_bound.to_string(),
            r.upper_bound.to_string(),
            r.feasible.to_string(),
        ])
        .map_err(to_io)?;
    }
    out.flush()?;
    Ok(())
}
