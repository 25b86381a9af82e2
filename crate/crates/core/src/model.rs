//! The evolutionary mating model: agents carry a single integer property and
//! an acceptance range for partners. Generations live for a fixed number of
//! random meetings; mutually accepted meetings each produce one child that
//! copies the same-gender parent's genotype verbatim. There is no mutation,
//! so genotype variety can only shrink.

use std::collections::HashSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// The deterministic random stream used by one realization. One instance is
/// confined to a single realization; every draw order is fixed (see `meet`
/// and `advance_generation`) so trajectories are bit-reproducible per seed.
pub type SimRng = ChaCha8Rng;

/// Build the per-realization random stream from a seed.
pub fn sim_rng(seed: u64) -> SimRng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gender {
    Female = 0,
    Male = 1,
}

impl Gender {
    pub fn opposite(self) -> Gender {
        match self {
            Gender::Female => Gender::Male,
            Gender::Male => Gender::Female,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Gender::Female => "female",
            Gender::Male => "male",
        }
    }
}

/// One agent: gender, own property value, and the closed acceptance range
/// `[accept_min, accept_max]` a partner's value must fall in.
///
/// Initialization orders the three drawn values so that females satisfy
/// `value <= accept_min` (they accept higher-valued partners) and males
/// satisfy `value >= accept_max`; inheritance copies genotypes verbatim, so
/// the rule holds in every generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Genotype {
    pub gender: Gender,
    pub value: u32,
    pub accept_min: u32,
    pub accept_max: u32,
}

impl Genotype {
    /// Place three draws from `{1..=r}` into a genotype. The draws are sorted
    /// internally; duplicates are fine. Females get the smallest value as
    /// their own and the upper two as the acceptance range; males get the
    /// largest value as their own and the lower two as the range.
    pub fn from_draws(gender: Gender, draws: [u32; 3]) -> Genotype {
        let mut d = draws;
        d.sort_unstable();
        let [lo, mid, hi] = d;
        match gender {
            Gender::Female => Genotype {
                gender,
                value: lo,
                accept_min: mid,
                accept_max: hi,
            },
            Gender::Male => Genotype {
                gender,
                value: hi,
                accept_min: lo,
                accept_max: mid,
            },
        }
    }

    /// Whether this agent accepts a partner with property value `value`.
    #[inline]
    pub fn accepts_value(&self, value: u32) -> bool {
        self.accept_min <= value && value <= self.accept_max
    }
}

/// Draw a fresh agent: three uniform values from `{1..=r}`, sorted and placed
/// by gender (see [`Genotype::from_draws`]).
pub fn init_agent(gender: Gender, r: u32, rng: &mut SimRng) -> Result<Genotype> {
    if r < 1 {
        return Err(Error::InvalidParameter {
            name: "r",
            reason: format!("value range maximum must be >= 1, got {r}"),
        });
    }
    let draws = [
        rng.random_range(1..=r),
        rng.random_range(1..=r),
        rng.random_range(1..=r),
    ];
    Ok(Genotype::from_draws(gender, draws))
}

/// Does agent `i` agree to mate with opposite-gender agent `j`? True iff
/// `j`'s property value lies in `i`'s acceptance range.
pub fn agrees(i: &Genotype, j: &Genotype) -> Result<bool> {
    if i.gender == j.gender {
        return Err(Error::ContractViolation(format!(
            "agrees() requires opposite genders, got two {} agents",
            i.gender.label()
        )));
    }
    Ok(i.accepts_value(j.value))
}

/// Both-sided agreement between a female and a male.
pub fn mutual_agreement(f: &Genotype, m: &Genotype) -> Result<bool> {
    if f.gender != Gender::Female || m.gender != Gender::Male {
        return Err(Error::ContractViolation(format!(
            "mutual_agreement() expects (female, male), got ({}, {})",
            f.gender.label(),
            m.gender.label()
        )));
    }
    Ok(f.accepts_value(m.value) && m.accepts_value(f.value))
}

/// Simulation parameters for one realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimParams {
    /// Per-gender population cap applied after each generation's meetings.
    pub population_cap: u32,
    /// Property values are drawn from `{1..=value_range}`.
    pub value_range: u32,
    /// Number of meetings that make up one generation's life span.
    pub meetings_per_generation: u32,
    /// Hard stop if neither convergence nor extinction happens first.
    pub max_generations: u32,
    /// Seed of the realization's random stream.
    pub seed: u64,
}

impl SimParams {
    pub fn validate(&self) -> Result<()> {
        if self.population_cap < 1 {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: format!("population cap must be >= 1, got {}", self.population_cap),
            });
        }
        if self.value_range < 1 {
            return Err(Error::InvalidParameter {
                name: "r",
                reason: format!("value range maximum must be >= 1, got {}", self.value_range),
            });
        }
        if self.max_generations < 1 {
            return Err(Error::InvalidParameter {
                name: "max-generations",
                reason: format!("must be >= 1, got {}", self.max_generations),
            });
        }
        Ok(())
    }
}

/// The agents alive in one generation, split by gender.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Population {
    pub females: Vec<Genotype>,
    pub males: Vec<Genotype>,
    pub generation_index: u32,
}

impl Population {
    /// Initialize generation 0: `population_cap` females then as many males,
    /// each drawn independently from the seeded stream.
    pub fn initialize(params: &SimParams, rng: &mut SimRng) -> Result<Population> {
        params.validate()?;
        let n = params.population_cap as usize;
        let mut females = Vec::with_capacity(n);
        let mut males = Vec::with_capacity(n);
        for _ in 0..n {
            females.push(init_agent(Gender::Female, params.value_range, rng)?);
        }
        for _ in 0..n {
            males.push(init_agent(Gender::Male, params.value_range, rng)?);
        }
        Ok(Population {
            females,
            males,
            generation_index: 0,
        })
    }

    /// A population is extinct when either gender has no members left.
    pub fn is_extinct(&self) -> bool {
        self.females.is_empty() || self.males.is_empty()
    }
}

/// Count of distinct genotype tuples across both genders. Gender is part of
/// the tuple, so any population with members of both genders counts >= 2.
pub fn genotype_variety(pop: &Population) -> usize {
    let mut seen: HashSet<Genotype> = HashSet::with_capacity(pop.females.len() + pop.males.len());
    seen.extend(pop.females.iter().copied());
    seen.extend(pop.males.iter().copied());
    seen.len()
}

/// Outcome of a single meeting: which pair met, and the child if both agreed.
#[derive(Debug, Clone, Copy)]
pub struct MeetingOutcome {
    pub female_index: usize,
    pub male_index: usize,
    pub child: Option<Genotype>,
}

/// Run one meeting: pick a female and a male uniformly (with replacement
/// across meetings; the same pair may meet again), and if both accept each
/// other produce one child. The child is female with probability one half and
/// copies the same-gender parent's genotype exactly.
///
/// Draw order per meeting is fixed: female index, male index, then the child
/// gender draw only when the pair agreed.
pub fn meet(pop: &Population, rng: &mut SimRng) -> Result<MeetingOutcome> {
    if pop.females.is_empty() {
        return Err(Error::EmptyGenderPool("female"));
    }
    if pop.males.is_empty() {
        return Err(Error::EmptyGenderPool("male"));
    }
    let female_index = rng.random_range(0..pop.females.len());
    let male_index = rng.random_range(0..pop.males.len());
    let f = &pop.females[female_index];
    let m = &pop.males[male_index];
    let child = if f.accepts_value(m.value) && m.accepts_value(f.value) {
        let parent = if rng.random_bool(0.5) { f } else { m };
        Some(*parent)
    } else {
        None
    };
    Ok(MeetingOutcome {
        female_index,
        male_index,
        child,
    })
}

/// Everything observable about one generation's life span.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationResult {
    /// `(female_index, male_index)` of every successful meeting, in meeting
    /// order, indexing into the parent population.
    pub mating_log: Vec<(usize, usize)>,
    /// The culled next generation.
    pub children: Population,
    /// Distinct genotypes among the children.
    pub variety: usize,
    /// True iff the children are missing one gender entirely.
    pub extinct: bool,
}

/// Run a full generation: exactly `meetings_per_generation` meetings, then
/// cull each gender independently down to the population cap by uniform
/// sampling without replacement. Genders below the cap are left as-is.
///
/// Random draws happen in meeting order, then the female culling sample, then
/// the male culling sample.
pub fn advance_generation(
    pop: &Population,
    params: &SimParams,
    rng: &mut SimRng,
) -> Result<GenerationResult> {
    if pop.females.is_empty() {
        return Err(Error::EmptyGenderPool("female"));
    }
    if pop.males.is_empty() {
        return Err(Error::EmptyGenderPool("male"));
    }

    let mut mating_log = Vec::new();
    let mut girls = Vec::new();
    let mut boys = Vec::new();
    for _ in 0..params.meetings_per_generation {
        let outcome = meet(pop, rng)?;
        if let Some(child) = outcome.child {
            mating_log.push((outcome.female_index, outcome.male_index));
            match child.gender {
                Gender::Female => girls.push(child),
                Gender::Male => boys.push(child),
            }
        }
    }

    let cap = params.population_cap as usize;
    let girls = cull(girls, cap, rng);
    let boys = cull(boys, cap, rng);

    let children = Population {
        females: girls,
        males: boys,
        generation_index: pop.generation_index + 1,
    };
    let variety = genotype_variety(&children);
    let extinct = children.is_extinct();
    Ok(GenerationResult {
        mating_log,
        children,
        variety,
        extinct,
    })
}

/// Keep a uniform without-replacement sample of `cap` members when the pool
/// exceeds it. Survivors keep their original relative order.
fn cull(candidates: Vec<Genotype>, cap: usize, rng: &mut SimRng) -> Vec<Genotype> {
    if candidates.len() <= cap {
        return candidates;
    }
    let mut keep: Vec<usize> = rand::seq::index::sample(rng, candidates.len(), cap).into_vec();
    keep.sort_unstable();
    keep.into_iter().map(|i| candidates[i]).collect()
}
