//! Socio-cognitive mutation operators.
//!
//! After bit-flip mutation, an offspring can be pulled toward the best
//! individuals of the current population or pushed away from the worst ones:
//!
//! * **Follow Best** copies genes from one elite "teacher".
//! * **Follow Best Distinct** copies genes at positions chosen by a softmax
//!   over the per-position standard deviation of the elites.
//! * **Repel Worst Gravity** sets genes to the complement of one "repeller"
//!   drawn from the worst individuals.
//! * **Repel Worst Gravity Multistep** repeats that update once for every
//!   member of the worst set.
//!
//! Stages are chained in an [`OperatorPipeline`]; the nine benchmark
//! [`Variant`]s are the empty pipeline and the eight follow/repel
//! combinations.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::engine::{Individual, MutationMode};
use crate::error::{Error, Result};
use crate::labs::BitGenome;

/// Default size of the elite and worst groups.
pub const DEFAULT_GROUP_SIZE: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Operator {
    FollowBest,
    FollowBestDistinct,
    RepelWorstGravity,
    RepelWorstGravityMultistep,
}

impl Operator {
    fn is_follow(self) -> bool {
        matches!(self, Operator::FollowBest | Operator::FollowBestDistinct)
    }
}

/// The nine algorithm variants of the benchmark.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Base,
    Fb,
    Fbd,
    Rw,
    Rwm,
    FbRw,
    FbRwm,
    FbdRw,
    FbdRwm,
}

impl Variant {
    pub const ALL: [Variant; 9] = [
        Variant::Base,
        Variant::Fb,
        Variant::Fbd,
        Variant::Rw,
        Variant::Rwm,
        Variant::FbRw,
        Variant::FbRwm,
        Variant::FbdRw,
        Variant::FbdRwm,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Variant::Base => "base",
            Variant::Fb => "fb",
            Variant::Fbd => "fbd",
            Variant::Rw => "rw",
            Variant::Rwm => "rwm",
            Variant::FbRw => "fb+rw",
            Variant::FbRwm => "fb+rwm",
            Variant::FbdRw => "fbd+rw",
            Variant::FbdRwm => "fbd+rwm",
        }
    }

    pub fn stages(self) -> Vec<Operator> {
        use Operator::*;
        match self {
            Variant::Base => vec![],
            Variant::Fb => vec![FollowBest],
            Variant::Fbd => vec![FollowBestDistinct],
            Variant::Rw => vec![RepelWorstGravity],
            Variant::Rwm => vec![RepelWorstGravityMultistep],
            Variant::FbRw => vec![FollowBest, RepelWorstGravity],
            Variant::FbRwm => vec![FollowBest, RepelWorstGravityMultistep],
            Variant::FbdRw => vec![FollowBestDistinct, RepelWorstGravity],
            Variant::FbdRwm => vec![FollowBestDistinct, RepelWorstGravityMultistep],
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.id() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown variant {s:?}; expected one of {}",
                    Variant::ALL.map(Variant::id).join(", ")
                ))
            })
    }
}

macro_rules! serde_as_id {
    ($ty:ty) => {
        impl serde::Serialize for $ty {
            fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.serialize_str(self.id())
            }
        }

        impl<'de> serde::Deserialize<'de> for $ty {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let id = String::deserialize(d)?;
                id.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

serde_as_id!(Variant);
serde_as_id!(Mode);

/// How the socio-cognitive stages are applied in a benchmark cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    /// Per-gene rate 0.5.
    Rate05,
    /// One gene per operator application.
    Single,
}

impl Mode {
    pub const ALL: [Mode; 2] = [Mode::Rate05, Mode::Single];

    pub fn id(self) -> &'static str {
        match self {
            Mode::Rate05 => "rate05",
            Mode::Single => "single",
        }
    }

    pub fn mutation_mode(self) -> MutationMode {
        match self {
            Mode::Rate05 => MutationMode::PerGeneRate,
            Mode::Single => MutationMode::SingleGene,
        }
    }

    pub fn rate(self) -> f64 {
        0.5
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL.into_iter().find(|m| m.id() == s).ok_or_else(|| {
            Error::Config(format!("unknown mode {s:?}; expected rate05 or single"))
        })
    }
}

/// The lowest-energy members of a population, best first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliteSet {
    members: Vec<BitGenome>,
}

impl EliteSet {
    pub fn new(members: Vec<BitGenome>) -> Self {
        Self { members }
    }

    /// The `k` lowest-energy individuals; ties resolved by population index.
    pub fn from_population(population: &[Individual], k: usize) -> Result<Self> {
        let order = ranked(population, k)?;
        Ok(Self::new(
            order.iter().map(|&i| population[i].genome.clone()).collect(),
        ))
    }

    pub fn members(&self) -> &[BitGenome] {
        &self.members
    }
}

/// The highest-energy members of a population, worst first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WorstSet {
    members: Vec<BitGenome>,
}

impl WorstSet {
    pub fn new(members: Vec<BitGenome>) -> Self {
        Self { members }
    }

    /// The `k` highest-energy individuals, worst first; ties resolved by
    /// population index.
    pub fn from_population(population: &[Individual], k: usize) -> Result<Self> {
        check_group_size(population.len(), k)?;
        let mut order: Vec<usize> = (0..population.len()).collect();
        order.sort_by(|&a, &b| population[b].energy.cmp(&population[a].energy));
        Ok(Self::new(
            order[..k].iter().map(|&i| population[i].genome.clone()).collect(),
        ))
    }

    pub fn members(&self) -> &[BitGenome] {
        &self.members
    }
}

fn check_group_size(population: usize, k: usize) -> Result<()> {
    if k == 0 || k > population {
        return Err(Error::Config(format!(
            "group size K = {k} must lie in 1..={population} (population size)"
        )));
    }
    Ok(())
}

fn ranked(population: &[Individual], k: usize) -> Result<Vec<usize>> {
    check_group_size(population.len(), k)?;
    let mut order: Vec<usize> = (0..population.len()).collect();
    order.sort_by_key(|&i| population[i].energy);
    order.truncate(k);
    Ok(order)
}

fn check_group(x: &BitGenome, members: &[BitGenome], what: &str) -> Result<()> {
    if members.is_empty() {
        return Err(Error::Usage(format!("{what} set is empty")));
    }
    if let Some(m) = members.iter().find(|m| m.len() != x.len()) {
        return Err(Error::Usage(format!(
            "{what} genome has length {} but the offspring has length {}",
            m.len(),
            x.len()
        )));
    }
    Ok(())
}

fn check_rate(rate: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::Config(format!("operator rate must lie in [0, 1], got {rate}")));
    }
    Ok(())
}

/// Copies genes from `source` into `x`: every gene with probability `rate`,
/// or one uniformly chosen gene.
fn imitate<R: Rng + ?Sized>(
    x: &mut BitGenome,
    source: impl Fn(usize) -> u8,
    rate: f64,
    mode: MutationMode,
    rng: &mut R,
) {
    match mode {
        MutationMode::PerGeneRate => {
            for i in 0..x.len() {
                if rng.random_bool(rate) {
                    x.set(i, source(i));
                }
            }
        }
        MutationMode::SingleGene => {
            let i = rng.random_range(0..x.len());
            x.set(i, source(i));
        }
    }
}

/// Pulls `x` toward one uniformly drawn elite teacher.
pub fn follow_best<R: Rng + ?Sized>(
    x: &BitGenome,
    elites: &EliteSet,
    rate: f64,
    mode: MutationMode,
    rng: &mut R,
) -> Result<BitGenome> {
    check_group(x, elites.members(), "elite")?;
    check_rate(rate)?;
    let teacher = &elites.members()[rng.random_range(0..elites.members().len())];
    let mut out = x.clone();
    imitate(&mut out, |i| teacher.gene(i), rate, mode, rng);
    Ok(out)
}

/// Population standard deviation (divisor `K`) of every gene position across
/// the elites.
pub fn gene_std_devs(elites: &EliteSet) -> Result<Vec<f64>> {
    let members = elites.members();
    let first = members
        .first()
        .ok_or_else(|| Error::Usage("elite set is empty".into()))?;
    let k = members.len() as f64;
    Ok((0..first.len())
        .map(|i| {
            let mean = members.iter().map(|m| m.gene(i) as f64).sum::<f64>() / k;
            let var = members
                .iter()
                .map(|m| (m.gene(i) as f64 - mean).powi(2))
                .sum::<f64>()
                / k;
            var.sqrt()
        })
        .collect())
}

/// Numerically stable softmax.
pub fn softmax(values: &[f64]) -> Vec<f64> {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = values.iter().map(|v| (v - max).exp()).collect();
    let total: f64 = exp.iter().sum();
    exp.into_iter().map(|e| e / total).collect()
}

/// Number of positions Follow Best Distinct rewrites in per-gene-rate mode:
/// `round(length * rate)`, raised to 1 for any positive rate.
pub fn distinct_subset_size(length: usize, rate: f64) -> usize {
    let size = (length as f64 * rate).round() as usize;
    if rate > 0.0 {
        size.clamp(1, length)
    } else {
        0
    }
}

/// Draws `count` distinct indices, each step choosing among the remaining
/// indices with probability proportional to `weights`.
pub fn weighted_sample_without_replacement<R: Rng + ?Sized>(
    weights: &[f64],
    count: usize,
    rng: &mut R,
) -> Vec<usize> {
    let mut remaining = weights.to_vec();
    let mut picked = Vec::with_capacity(count);
    for _ in 0..count.min(weights.len()) {
        let total: f64 = remaining.iter().sum();
        let mut target = rng.random::<f64>() * total;
        let mut choice = None;
        for (i, &w) in remaining.iter().enumerate() {
            if w <= 0.0 {
                continue;
            }
            choice = Some(i);
            if target < w {
                break;
            }
            target -= w;
        }
        // Falls back to the last positive weight on rounding overshoot.
        let i = choice.expect("a positive weight remains");
        picked.push(i);
        remaining[i] = 0.0;
    }
    picked
}

/// Rewrites high-variance positions with genes from uniformly drawn elites.
///
/// The positions are sampled without replacement from the softmax of the
/// per-position standard deviations; each rewritten position draws its own
/// elite.
pub fn follow_best_distinct<R: Rng + ?Sized>(
    x: &BitGenome,
    elites: &EliteSet,
    rate: f64,
    mode: MutationMode,
    rng: &mut R,
) -> Result<BitGenome> {
    check_group(x, elites.members(), "elite")?;
    check_rate(rate)?;
    let weights = softmax(&gene_std_devs(elites)?);
    let count = match mode {
        MutationMode::PerGeneRate => distinct_subset_size(x.len(), rate),
        MutationMode::SingleGene => 1,
    };
    let positions = weighted_sample_without_replacement(&weights, count, rng);
    let members = elites.members();
    let mut out = x.clone();
    for i in positions {
        let teacher = &members[rng.random_range(0..members.len())];
        out.set(i, teacher.gene(i));
    }
    Ok(out)
}

/// Pushes `x` away from one uniformly drawn repeller.
pub fn repel_worst_gravity<R: Rng + ?Sized>(
    x: &BitGenome,
    worst: &WorstSet,
    rate: f64,
    mode: MutationMode,
    rng: &mut R,
) -> Result<BitGenome> {
    check_group(x, worst.members(), "worst")?;
    check_rate(rate)?;
    let repeller = &worst.members()[rng.random_range(0..worst.members().len())];
    let mut out = x.clone();
    imitate(&mut out, |i| repeller.gene(i) ^ 1, rate, mode, rng);
    Ok(out)
}

/// Repels `x` from every member of the worst set in turn, worst first.
pub fn repel_worst_gravity_multistep<R: Rng + ?Sized>(
    x: &BitGenome,
    worst: &WorstSet,
    rate: f64,
    mode: MutationMode,
    rng: &mut R,
) -> Result<BitGenome> {
    check_group(x, worst.members(), "worst")?;
    check_rate(rate)?;
    let mut out = x.clone();
    for repeller in worst.members() {
        imitate(&mut out, |i| repeller.gene(i) ^ 1, rate, mode, rng);
    }
    Ok(out)
}

/// Elite and worst groups of one generation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSets {
    pub elites: EliteSet,
    pub worst: WorstSet,
}

/// An ordered chain of at most one follow stage and one repel stage.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorPipeline {
    stages: Vec<Operator>,
    rate: f64,
    mode: MutationMode,
    group_size: usize,
}

impl OperatorPipeline {
    pub fn new(stages: Vec<Operator>, rate: f64, mode: MutationMode, group_size: usize) -> Result<Self> {
        check_rate(rate)?;
        if group_size == 0 {
            return Err(Error::Config("group size K must be at least 1".into()));
        }
        let follows = stages.iter().filter(|s| s.is_follow()).count();
        let repels = stages.len() - follows;
        let ordered = stages.windows(2).all(|w| w[0].is_follow() || !w[1].is_follow());
        if follows > 1 || repels > 1 || !ordered {
            return Err(Error::Config(format!(
                "pipeline {stages:?} must hold at most one follow stage followed by at most one repel stage"
            )));
        }
        Ok(Self {
            stages,
            rate,
            mode,
            group_size,
        })
    }

    /// The empty pipeline of the baseline algorithm.
    pub fn base() -> Self {
        Self {
            stages: Vec::new(),
            rate: 0.0,
            mode: MutationMode::PerGeneRate,
            group_size: 1,
        }
    }

    pub fn for_variant(variant: Variant, mode: Mode, group_size: usize) -> Result<Self> {
        Self::new(variant.stages(), mode.rate(), mode.mutation_mode(), group_size)
    }

    pub fn stages(&self) -> &[Operator] {
        &self.stages
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn mode(&self) -> MutationMode {
        self.mode
    }

    pub fn group_size(&self) -> usize {
        self.group_size
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    /// Errors when `K` exceeds the population size of a non-empty pipeline.
    pub fn check_population_size(&self, population: usize) -> Result<()> {
        if self.is_empty() {
            return Ok(());
        }
        check_group_size(population, self.group_size)
    }

    /// Elite and worst groups of `population`; both empty for the base pipeline.
    pub fn groups(&self, population: &[Individual]) -> Result<GroupSets> {
        if self.is_empty() {
            return Ok(GroupSets {
                elites: EliteSet::new(Vec::new()),
                worst: WorstSet::new(Vec::new()),
            });
        }
        Ok(GroupSets {
            elites: EliteSet::from_population(population, self.group_size)?,
            worst: WorstSet::from_population(population, self.group_size)?,
        })
    }

    pub fn apply<R: Rng + ?Sized>(&self, x: &BitGenome, groups: &GroupSets, rng: &mut R) -> Result<BitGenome> {
        let mut out = x.clone();
        for stage in &self.stages {
            out = match stage {
                Operator::FollowBest => follow_best(&out, &groups.elites, self.rate, self.mode, rng)?,
                Operator::FollowBestDistinct => {
                    follow_best_distinct(&out, &groups.elites, self.rate, self.mode, rng)?
                }
                Operator::RepelWorstGravity => {
                    repel_worst_gravity(&out, &groups.worst, self.rate, self.mode, rng)?
                }
                Operator::RepelWorstGravityMultistep => {
                    repel_worst_gravity_multistep(&out, &groups.worst, self.rate, self.mode, rng)?
                }
            };
        }
        Ok(out)
    }
}

/// Applies `pipeline` to `x` with groups taken from `population`.
pub fn apply_pipeline<R: Rng + ?Sized>(
    x: &BitGenome,
    population: &[Individual],
    pipeline: &OperatorPipeline,
    rng: &mut R,
) -> Result<BitGenome> {
    let groups = pipeline.groups(population)?;
    pipeline.apply(x, &groups, rng)
}
