//! The low-autocorrelation binary sequence problem.
//!
//! Genomes are stored as `{0, 1}` genes. Energy evaluation maps each gene to a
//! spin `s_i = 2 x_i - 1` and sums the squared aperiodic autocorrelations
//!
//! ```text
//! C_k(S) = sum_{i=1}^{L-k} s_i s_{i+k}        E(S) = sum_{k=1}^{L-1} C_k(S)^2
//! ```
//!
//! All arithmetic is exact integer arithmetic.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};

/// Largest length accepted by [`exhaustive_optimum`].
pub const EXHAUSTIVE_MAX_LENGTH: usize = 20;

/// A fixed-length vector of binary genes.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitGenome {
    genes: Vec<u8>,
}

impl BitGenome {
    /// Builds a genome from explicit genes. Every gene must be 0 or 1 and
    /// there must be at least two of them.
    pub fn new(genes: Vec<u8>) -> Result<Self> {
        if genes.len() < 2 {
            return Err(Error::Domain {
                what: "genome length",
                value: genes.len(),
                range: "L >= 2".into(),
            });
        }
        if let Some(pos) = genes.iter().position(|&g| g > 1) {
            return Err(Error::Usage(format!(
                "gene at position {pos} is {}, expected 0 or 1",
                genes[pos]
            )));
        }
        Ok(Self { genes })
    }

    pub fn zeros(length: usize) -> Result<Self> {
        Self::new(vec![0; length])
    }

    pub fn ones(length: usize) -> Result<Self> {
        Self::new(vec![1; length])
    }

    /// Draws every gene independently and uniformly from `{0, 1}`.
    pub fn random<R: Rng + ?Sized>(length: usize, rng: &mut R) -> Result<Self> {
        Self::new((0..length).map(|_| rng.random_range(0..=1u8)).collect())
    }

    /// Builds a genome from spins. Every spin must be -1 or +1.
    pub fn from_spins(spins: &[i8]) -> Result<Self> {
        let genes = spins
            .iter()
            .map(|&s| match s {
                1 => Ok(1),
                -1 => Ok(0),
                other => Err(Error::Usage(format!("spin {other} is not -1 or +1"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::new(genes)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.genes.len()
    }

    /// Always false; genomes hold at least two genes.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }

    #[inline]
    pub fn genes(&self) -> &[u8] {
        &self.genes
    }

    #[inline]
    pub fn gene(&self, position: usize) -> u8 {
        self.genes[position]
    }

    /// Sets a gene. Panics if `position` is out of bounds or `value > 1`.
    #[inline]
    pub fn set(&mut self, position: usize, value: u8) {
        assert!(value <= 1, "gene value {value} is not binary");
        self.genes[position] = value;
    }

    #[inline]
    pub fn flip(&mut self, position: usize) {
        self.genes[position] ^= 1;
    }

    /// Bitwise complement of the whole genome.
    pub fn complement(&self) -> Self {
        Self {
            genes: self.genes.iter().map(|g| g ^ 1).collect(),
        }
    }

    /// Number of positions where the two genomes differ.
    pub fn hamming(&self, other: &Self) -> usize {
        self.genes
            .iter()
            .zip(&other.genes)
            .filter(|(a, b)| a != b)
            .count()
    }

    pub fn spins(&self) -> SpinView {
        SpinView {
            spins: self.genes.iter().map(|&g| 2 * g as i8 - 1).collect(),
        }
    }
}

impl fmt::Debug for BitGenome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitGenome({self})")
    }
}

impl fmt::Display for BitGenome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.genes {
            f.write_str(if *g == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitGenome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let genes = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::Data(format!("invalid gene character {other:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::new(genes)
    }
}

/// The `{-1, +1}` image of a [`BitGenome`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpinView {
    spins: Vec<i8>,
}

impl SpinView {
    pub fn as_slice(&self) -> &[i8] {
        &self.spins
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    pub fn to_genome(&self) -> BitGenome {
        BitGenome::from_spins(&self.spins).expect("a spin view always maps back to a valid genome")
    }
}

/// LABS energy: the sum of squared aperiodic autocorrelations. Lower is better.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Energy(pub u64);

impl Energy {
    #[inline]
    pub fn value(self) -> u64 {
        self.0
    }
}

impl fmt::Display for Energy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[inline]
fn lag_sum(spins: &[i8], k: usize) -> i64 {
    spins[..spins.len() - k]
        .iter()
        .zip(&spins[k..])
        .map(|(&a, &b)| (a * b) as i64)
        .sum()
}

/// Aperiodic autocorrelation `C_k` at lag `k`, for `1 <= k <= L - 1`.
pub fn autocorrelation(genome: &BitGenome, k: usize) -> Result<i64> {
    let len = genome.len();
    if k == 0 || k >= len {
        return Err(Error::Domain {
            what: "lag k",
            value: k,
            range: format!("1..={}", len - 1),
        });
    }
    Ok(lag_sum(genome.spins().as_slice(), k))
}

pub fn energy(genome: &BitGenome) -> Energy {
    let spins = genome.spins();
    let spins = spins.as_slice();
    let e = (1..spins.len())
        .map(|k| {
            let c = lag_sum(spins, k);
            (c * c) as u64
        })
        .sum();
    Energy(e)
}

/// All autocorrelations `C_1 ..= C_{L-1}` of one genome, indexed by `k - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrelationTable {
    correlations: Vec<i64>,
}

impl CorrelationTable {
    pub fn new(genome: &BitGenome) -> Self {
        let spins = genome.spins();
        let spins = spins.as_slice();
        Self {
            correlations: (1..spins.len()).map(|k| lag_sum(spins, k)).collect(),
        }
    }

    /// `C_k` for `1 <= k <= L - 1`. Panics outside that range.
    pub fn get(&self, k: usize) -> i64 {
        self.correlations[k - 1]
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.correlations
    }

    pub fn energy(&self) -> Energy {
        Energy(self.correlations.iter().map(|c| (c * c) as u64).sum())
    }

    /// Updates the table in O(L) for a flip of `position` in `genome`, where
    /// `genome` is the state *before* the flip.
    fn apply_flip(&mut self, genome: &BitGenome, position: usize) {
        let genes = genome.genes();
        let len = genes.len();
        let spin = |i: usize| 2 * genes[i] as i64 - 1;
        let sp = spin(position);
        for k in 1..len {
            let mut delta = 0;
            if position + k < len {
                delta += sp * spin(position + k);
            }
            if position >= k {
                delta += spin(position - k) * sp;
            }
            // Each product containing s_p changes sign.
            self.correlations[k - 1] -= 2 * delta;
        }
    }
}

/// Energy of `genome` with the gene at `position` flipped, computed from the
/// cached correlation table of the unflipped genome in O(L).
pub fn energy_after_flip(
    genome: &BitGenome,
    position: usize,
    cached: &CorrelationTable,
) -> Result<(Energy, CorrelationTable)> {
    if position >= genome.len() {
        return Err(Error::Domain {
            what: "flip position",
            value: position,
            range: format!("0..{}", genome.len()),
        });
    }
    if cached.correlations.len() + 1 != genome.len() {
        return Err(Error::Usage(format!(
            "correlation table has {} lags but the genome has length {}",
            cached.correlations.len(),
            genome.len()
        )));
    }
    let mut table = cached.clone();
    table.apply_flip(genome, position);
    Ok((table.energy(), table))
}

/// Minimum energy over all `2^L` genomes together with the first minimiser in
/// lexicographic order (gene 0 most significant).
pub fn exhaustive_optimum(length: usize) -> Result<(Energy, BitGenome)> {
    if !(2..=EXHAUSTIVE_MAX_LENGTH).contains(&length) {
        return Err(Error::Domain {
            what: "exhaustive search length",
            value: length,
            range: format!("2..={EXHAUSTIVE_MAX_LENGTH} (enumeration ceiling)"),
        });
    }
    let mut spins = vec![0i8; length];
    let mut best: Option<(u64, u64)> = None;
    for code in 0u64..(1u64 << length) {
        for (i, s) in spins.iter_mut().enumerate() {
            *s = if (code >> (length - 1 - i)) & 1 == 1 { 1 } else { -1 };
        }
        let mut e = 0u64;
        for k in 1..length {
            let c = lag_sum(&spins, k);
            e += (c * c) as u64;
            if best.is_some_and(|(b, _)| e >= b) {
                break;
            }
        }
        if best.is_none_or(|(b, _)| e < b) {
            best = Some((e, code));
        }
    }
    let (e, code) = best.expect("at least one genome is enumerated");
    let genes = (0..length)
        .map(|i| ((code >> (length - 1 - i)) & 1) as u8)
        .collect();
    Ok((Energy(e), BitGenome::new(genes)?))
}
