//! Baseline genetic algorithm over [`BitGenome`]s.
//!
//! One generation pairs the current best individual with a uniformly drawn
//! partner, recombines the pair with single-point crossover, applies bit-flip
//! mutation and then the socio-cognitive [`OperatorPipeline`] to every
//! offspring, and finally keeps the `N` lowest-energy individuals of the
//! combined parent and offspring pool. The run stops once another generation
//! would exceed the evaluation budget.
//!
//! The pipeline's elite and worst groups come from the generation's mating
//! pool (the selected parents) by default; see [`GroupSource`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::labs::{energy, BitGenome, Energy};
use crate::operators::OperatorPipeline;

/// How many genes a mutation-style operator touches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MutationMode {
    /// Each gene is affected independently with the operator's rate.
    #[default]
    PerGeneRate,
    /// Exactly one uniformly chosen gene is affected; the rate is ignored.
    SingleGene,
}

/// Where the bit-flip mutation probability is applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MutationGate {
    /// The rate is a per-gene flip probability (or a single flip in
    /// [`MutationMode::SingleGene`]).
    #[default]
    PerGene,
    /// The rate is the probability that an offspring is mutated at all; a
    /// mutated offspring has one uniformly chosen gene flipped.
    PerIndividual,
}

/// The individuals the socio-cognitive groups are ranked from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupSource {
    /// The parents selected for this generation: the best individual once
    /// per pair plus each pair's partner.
    #[default]
    MatingPool,
    /// The whole current population.
    Population,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaParams {
    pub population_size: usize,
    /// Offspring per generation; produced in crossover pairs, so even.
    pub offspring_count: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub mutation_mode: MutationMode,
    pub mutation_gate: MutationGate,
    pub group_source: GroupSource,
    pub evaluation_budget: u64,
    pub seed: u64,
}

impl Default for GaParams {
    fn default() -> Self {
        Self {
            population_size: 20,
            offspring_count: 10,
            crossover_rate: 0.5,
            mutation_rate: 0.5,
            mutation_mode: MutationMode::PerGeneRate,
            mutation_gate: MutationGate::PerGene,
            group_source: GroupSource::MatingPool,
            evaluation_budget: 10_000,
            seed: 0,
        }
    }
}

impl GaParams {
    /// Number of individuals the socio-cognitive groups are ranked from.
    pub fn group_pool_size(&self) -> usize {
        match self.group_source {
            GroupSource::MatingPool => self.offspring_count,
            GroupSource::Population => self.population_size,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::Config(format!(
                "population size must be at least 2, got {}",
                self.population_size
            )));
        }
        if self.offspring_count < 2 || !self.offspring_count.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "offspring count must be even and at least 2, got {}",
                self.offspring_count
            )));
        }
        for (name, rate) in [
            ("crossover rate", self.crossover_rate),
            ("mutation rate", self.mutation_rate),
        ] {
            if !(0.0..=1.0).contains(&rate) {
                return Err(Error::Config(format!("{name} must lie in [0, 1], got {rate}")));
            }
        }
        if self.evaluation_budget < self.population_size as u64 {
            return Err(Error::Config(format!(
                "evaluation budget {} cannot cover the initial population of {}",
                self.evaluation_budget, self.population_size
            )));
        }
        Ok(())
    }
}

/// An evaluated genome.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Individual {
    pub genome: BitGenome,
    pub energy: Energy,
}

impl Individual {
    pub fn evaluate(genome: BitGenome) -> Self {
        let energy = energy(&genome);
        Self { genome, energy }
    }
}

/// Evaluations charged against a run's budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvaluationCounter {
    consumed: u64,
    budget: u64,
}

impl EvaluationCounter {
    pub fn new(budget: u64) -> Self {
        Self { consumed: 0, budget }
    }

    pub fn consumed(&self) -> u64 {
        self.consumed
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn can_afford(&self, evaluations: u64) -> bool {
        self.consumed + evaluations <= self.budget
    }

    fn charge(&mut self, evaluations: u64) {
        self.consumed += evaluations;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Population {
    members: Vec<Individual>,
}

impl Population {
    pub fn new(members: Vec<Individual>) -> Self {
        Self { members }
    }

    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn best(&self) -> Result<&Individual> {
        select_best(&self.members)
    }
}

pub fn initialize_population<R: Rng + ?Sized>(
    params: &GaParams,
    length: usize,
    counter: &mut EvaluationCounter,
    rng: &mut R,
) -> Result<Population> {
    params.validate()?;
    let members = (0..params.population_size)
        .map(|_| BitGenome::random(length, rng).map(Individual::evaluate))
        .collect::<Result<Vec<_>>>()?;
    counter.charge(members.len() as u64);
    Ok(Population::new(members))
}

/// The lowest-energy individual; ties go to the lowest index.
pub fn select_best(members: &[Individual]) -> Result<&Individual> {
    members
        .iter()
        .reduce(|best, x| if x.energy < best.energy { x } else { best })
        .ok_or_else(|| Error::Usage("cannot select from an empty population".into()))
}

/// Exchanges the tails of two parents after the first `cut` genes.
pub fn crossover_at(p1: &BitGenome, p2: &BitGenome, cut: usize) -> Result<(BitGenome, BitGenome)> {
    if p1.len() != p2.len() {
        return Err(Error::Usage(format!(
            "crossover parents differ in length ({} vs {})",
            p1.len(),
            p2.len()
        )));
    }
    if cut == 0 || cut >= p1.len() {
        return Err(Error::Domain {
            what: "crossover point",
            value: cut,
            range: format!("1..={}", p1.len() - 1),
        });
    }
    let (a, b) = (p1.genes(), p2.genes());
    let o1 = [&a[..cut], &b[cut..]].concat();
    let o2 = [&b[..cut], &a[cut..]].concat();
    Ok((BitGenome::new(o1)?, BitGenome::new(o2)?))
}

/// Single-point crossover with the cut drawn uniformly from `1..=L-1`.
pub fn single_point_crossover<R: Rng + ?Sized>(
    p1: &BitGenome,
    p2: &BitGenome,
    rng: &mut R,
) -> Result<(BitGenome, BitGenome)> {
    if p1.len() != p2.len() {
        return Err(Error::Usage(format!(
            "crossover parents differ in length ({} vs {})",
            p1.len(),
            p2.len()
        )));
    }
    let cut = rng.random_range(1..p1.len());
    crossover_at(p1, p2, cut)
}

pub fn bit_flip_mutation<R: Rng + ?Sized>(
    genome: &BitGenome,
    params: &GaParams,
    rng: &mut R,
) -> BitGenome {
    let mut out = genome.clone();
    match (params.mutation_gate, params.mutation_mode) {
        (MutationGate::PerGene, MutationMode::PerGeneRate) => {
            for i in 0..out.len() {
                if rng.random_bool(params.mutation_rate) {
                    out.flip(i);
                }
            }
        }
        (MutationGate::PerGene, MutationMode::SingleGene) => {
            let i = rng.random_range(0..out.len());
            out.flip(i);
        }
        (MutationGate::PerIndividual, _) => {
            if rng.random_bool(params.mutation_rate) {
                let i = rng.random_range(0..out.len());
                out.flip(i);
            }
        }
    }
    out
}

/// Advances the population by one generation, or returns `Ok(None)` when the
/// budget cannot pay for another batch of offspring.
pub fn run_generation<R: Rng + ?Sized>(
    population: &Population,
    params: &GaParams,
    pipeline: &OperatorPipeline,
    counter: &mut EvaluationCounter,
    rng: &mut R,
) -> Result<Option<Population>> {
    if !counter.can_afford(params.offspring_count as u64) {
        return Ok(None);
    }
    let members = population.members();
    let best = select_best(members)?;
    let partners: Vec<&Individual> = (0..params.offspring_count / 2)
        .map(|_| &members[rng.random_range(0..members.len())])
        .collect();
    let groups = match params.group_source {
        GroupSource::Population => pipeline.groups(members)?,
        GroupSource::MatingPool => {
            let mating_pool: Vec<Individual> = partners
                .iter()
                .flat_map(|&p| [best.clone(), p.clone()])
                .collect();
            pipeline.groups(&mating_pool)?
        }
    };

    let mut offspring = Vec::with_capacity(params.offspring_count);
    for partner in partners {
        let (o1, o2) = if rng.random_bool(params.crossover_rate) {
            single_point_crossover(&best.genome, &partner.genome, rng)?
        } else {
            (best.genome.clone(), partner.genome.clone())
        };
        for child in [o1, o2] {
            let child = bit_flip_mutation(&child, params, rng);
            let child = pipeline.apply(&child, &groups, rng)?;
            offspring.push(child);
        }
    }

    counter.charge(offspring.len() as u64);
    let mut pool: Vec<Individual> = members.to_vec();
    pool.extend(offspring.into_iter().map(Individual::evaluate));
    // Stable sort: parents precede offspring on equal energy.
    pool.sort_by_key(|ind| ind.energy);
    pool.truncate(params.population_size);
    Ok(Some(Population::new(pool)))
}

/// Best-energy history of one run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunTrace {
    /// Best energy after initialisation (index 0) and after each generation.
    pub best_energies: Vec<u64>,
    pub best: Individual,
    pub evaluations: u64,
}

impl RunTrace {
    pub fn generations(&self) -> usize {
        self.best_energies.len() - 1
    }

    pub fn final_energy(&self) -> u64 {
        self.best.energy.0
    }
}

/// Runs the algorithm to budget exhaustion with a stream seeded from
/// `params.seed`.
pub fn run(params: &GaParams, pipeline: &OperatorPipeline, length: usize) -> Result<RunTrace> {
    params.validate()?;
    pipeline.check_population_size(params.group_pool_size())?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut counter = EvaluationCounter::new(params.evaluation_budget);
    let mut population = initialize_population(params, length, &mut counter, &mut rng)?;
    let mut best_energies = vec![population.best()?.energy.0];
    while let Some(next) = run_generation(&population, params, pipeline, &mut counter, &mut rng)? {
        population = next;
        best_energies.push(population.best()?.energy.0);
    }
    Ok(RunTrace {
        best_energies,
        best: population.best()?.clone(),
        evaluations: counter.consumed(),
    })
}
