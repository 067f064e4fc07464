//! Brute-force Dempster-Shafer evidence over explicit finite frames.
//!
//! Focal sets are bitsets over the frame's worlds and mass functions are
//! sparse maps from focal set to mass. Everything is enumerated, so this is
//! a desk-scale verifier for the evidence layer rather than an engine: a
//! primitive frame holds at most [`MAX_FRAME_WORLDS`] worlds and a product
//! frame at most [`MAX_PRODUCT_WORLDS`].

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::evidence::{SupportPair, CONFLICT_EPSILON};

pub const MAX_FRAME_WORLDS: usize = 20;
pub const MAX_PRODUCT_WORLDS: usize = 1 << 14;

/// Tolerance on the total mass of a user-supplied mass function.
pub const MASS_SUM_TOLERANCE: f64 = 1e-12;

/// A subset of a frame's worlds.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WorldSet {
    words: Vec<u64>,
}

impl WorldSet {
    pub fn empty(worlds: usize) -> Self {
        WorldSet {
            words: alloc::vec![0; worlds.div_ceil(64)],
        }
    }

    pub fn full(worlds: usize) -> Self {
        let mut s = Self::empty(worlds);
        for i in 0..worlds {
            s.insert(i);
        }
        s
    }

    pub fn singleton(worlds: usize, world: usize) -> Self {
        let mut s = Self::empty(worlds);
        s.insert(world);
        s
    }

    pub fn from_worlds(worlds: usize, members: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(worlds);
        for w in members {
            s.insert(w);
        }
        s
    }

    pub fn insert(&mut self, world: usize) {
        self.words[world / 64] |= 1 << (world % 64);
    }

    pub fn contains(&self, world: usize) -> bool {
        self.words
            .get(world / 64)
            .is_some_and(|w| w & (1 << (world % 64)) != 0)
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn intersection(&self, other: &WorldSet) -> WorldSet {
        WorldSet {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    pub fn intersects(&self, other: &WorldSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn is_subset(&self, other: &WorldSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    /// Complement within a frame of `worlds` worlds.
    pub fn complement(&self, worlds: usize) -> WorldSet {
        let full = Self::full(worlds);
        WorldSet {
            words: self
                .words
                .iter()
                .zip(&full.words)
                .map(|(a, f)| !a & f)
                .collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            (0..64).filter(move |b| w & (1 << b) != 0).map(move |b| i * 64 + b)
        })
    }
}

/// An ordered list of mutually exclusive, exhaustive worlds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    worlds: Vec<String>,
}

impl Frame {
    pub fn new<S: Into<String>>(worlds: impl IntoIterator<Item = S>) -> Result<Self> {
        let worlds: Vec<String> = worlds.into_iter().map(Into::into).collect();
        let frame = Self::unchecked(worlds, MAX_FRAME_WORLDS)?;
        Ok(frame)
    }

    fn unchecked(worlds: Vec<String>, cap: usize) -> Result<Self> {
        if worlds.is_empty() {
            return Err(Error::InvalidFrame(String::from("a frame needs at least one world")));
        }
        if worlds.len() > cap {
            return Err(Error::FrameTooLarge {
                worlds: worlds.len(),
                cap,
            });
        }
        for (i, w) in worlds.iter().enumerate() {
            if worlds[..i].contains(w) {
                return Err(Error::InvalidFrame(format!("duplicate world {w}")));
            }
        }
        Ok(Frame { worlds })
    }

    pub fn len(&self) -> usize {
        self.worlds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.worlds.is_empty()
    }

    pub fn worlds(&self) -> &[String] {
        &self.worlds
    }

    pub fn index_of(&self, world: &str) -> Option<usize> {
        self.worlds.iter().position(|w| w == world)
    }

    pub fn full(&self) -> WorldSet {
        WorldSet::full(self.len())
    }
}

/// A basic probability assignment over a frame of `worlds` worlds.
#[derive(Debug, Clone, PartialEq)]
pub struct MassFunction {
    worlds: usize,
    focal: BTreeMap<WorldSet, f64>,
}

impl MassFunction {
    /// Validated constructor: focal sets non-empty and within the frame,
    /// masses finite and non-negative (zeros are dropped), total 1.
    pub fn new(worlds: usize, entries: impl IntoIterator<Item = (WorldSet, f64)>) -> Result<Self> {
        let mut focal = BTreeMap::new();
        let mut total = 0.0;
        let full = WorldSet::full(worlds);
        for (set, mass) in entries {
            if !mass.is_finite() || mass < 0.0 {
                return Err(Error::InvalidFrame(format!("mass {mass} is not a valid mass")));
            }
            if set.words.len() != full.words.len() || !set.is_subset(&full) {
                return Err(Error::InvalidFrame(String::from("focal set outside the frame")));
            }
            if mass == 0.0 {
                continue;
            }
            if set.is_empty() {
                return Err(Error::InvalidFrame(String::from("the empty set cannot carry mass")));
            }
            total += mass;
            *focal.entry(set).or_insert(0.0) += mass;
        }
        if (total - 1.0).abs() > MASS_SUM_TOLERANCE {
            return Err(Error::InvalidFrame(format!("masses sum to {total}, not 1")));
        }
        Ok(MassFunction { worlds, focal })
    }

    /// All mass on the whole frame.
    pub fn vacuous(worlds: usize) -> Self {
        Self::categorical(WorldSet::full(worlds), worlds)
    }

    /// All mass on `set`.
    pub fn categorical(set: WorldSet, worlds: usize) -> Self {
        let mut focal = BTreeMap::new();
        focal.insert(set, 1.0);
        MassFunction { worlds, focal }
    }

    pub fn worlds(&self) -> usize {
        self.worlds
    }

    pub fn focal(&self) -> impl Iterator<Item = (&WorldSet, f64)> {
        self.focal.iter().map(|(s, &m)| (s, m))
    }

    pub fn mass(&self, set: &WorldSet) -> f64 {
        self.focal.get(set).copied().unwrap_or(0.0)
    }

    /// Sum of masses of focal sets contained in `set`.
    pub fn belief(&self, set: &WorldSet) -> f64 {
        self.focal
            .iter()
            .filter(|(f, _)| f.is_subset(set))
            .map(|(_, m)| m)
            .sum()
    }

    /// Sum of masses of focal sets meeting `set`.
    pub fn plausibility(&self, set: &WorldSet) -> f64 {
        self.focal
            .iter()
            .filter(|(f, _)| f.intersects(set))
            .map(|(_, m)| m)
            .sum()
    }

    /// Dempster's rule of combination.
    pub fn dempster_combine(&self, other: &MassFunction) -> Result<MassFunction> {
        self.combine_reporting(other).map(|(m, _)| m)
    }

    /// Dempster's rule, also returning the conflict mass that was
    /// normalised away.
    pub fn combine_reporting(&self, other: &MassFunction) -> Result<(MassFunction, f64)> {
        if self.worlds != other.worlds {
            return Err(Error::InvalidFrame(format!(
                "cannot combine frames of {} and {} worlds",
                self.worlds, other.worlds
            )));
        }
        let mut focal: BTreeMap<WorldSet, f64> = BTreeMap::new();
        let mut conflict = 0.0;
        for (a, ma) in &self.focal {
            for (b, mb) in &other.focal {
                let c = a.intersection(b);
                let m = ma * mb;
                if c.is_empty() {
                    conflict += m;
                } else {
                    *focal.entry(c).or_insert(0.0) += m;
                }
            }
        }
        let k = 1.0 - conflict;
        if k <= CONFLICT_EPSILON {
            return Err(Error::TotalConflict);
        }
        for m in focal.values_mut() {
            *m /= k;
        }
        Ok((
            MassFunction {
                worlds: self.worlds,
                focal,
            },
            conflict,
        ))
    }

    /// Conditions on `allowed` (combination with a categorical mass).
    pub fn condition(&self, allowed: &WorldSet) -> Result<(MassFunction, f64)> {
        self.combine_reporting(&Self::categorical(allowed.clone(), self.worlds))
    }

    /// Cylindrical product with an independent mass function on another
    /// frame; world `(i, j)` maps to `i * other.worlds + j`.
    fn product(&self, other: &MassFunction) -> MassFunction {
        let worlds = self.worlds * other.worlds;
        let mut focal = BTreeMap::new();
        for (a, ma) in &self.focal {
            for (b, mb) in &other.focal {
                let mut set = WorldSet::empty(worlds);
                for i in a.iter() {
                    for j in b.iter() {
                        set.insert(i * other.worlds + j);
                    }
                }
                *focal.entry(set).or_insert(0.0) += ma * mb;
            }
        }
        MassFunction { worlds, focal }
    }
}

/// Simple support `[l, u]` for one world: `l` on `{world}`, `1 - u` on its
/// complement, the rest on the whole frame.
pub fn pair_to_mass(pair: SupportPair, world: usize, frame: &Frame) -> Result<MassFunction> {
    let n = frame.len();
    if world >= n {
        return Err(Error::InvalidFrame(format!("world #{world} not in frame")));
    }
    let hit = WorldSet::singleton(n, world);
    let rest = hit.complement(n);
    if rest.is_empty() && pair.against() > 0.0 {
        return Err(Error::InvalidFrame(String::from(
            "negative support on a one-world frame",
        )));
    }
    MassFunction::new(
        n,
        [
            (hit, pair.lower()),
            (rest, pair.against()),
            (WorldSet::full(n), pair.upper() - pair.lower()),
        ],
    )
}

/// Combines each frame's evidence with Dempster's rule, then forms the
/// product frame of independent frames. Product worlds are labelled by
/// joining component worlds with `,`, first frame most significant.
pub fn product_frame(frames: &[Frame], masses: &[Vec<MassFunction>]) -> Result<(Frame, MassFunction)> {
    if frames.is_empty() || frames.len() != masses.len() {
        return Err(Error::InvalidFrame(String::from(
            "need one evidence list per frame",
        )));
    }
    let total: usize = frames
        .iter()
        .try_fold(1usize, |acc, f| acc.checked_mul(f.len()))
        .unwrap_or(usize::MAX);
    if total > MAX_PRODUCT_WORLDS {
        return Err(Error::FrameTooLarge {
            worlds: total,
            cap: MAX_PRODUCT_WORLDS,
        });
    }
    let mut labels: Vec<String> = alloc::vec![String::new()];
    let mut joint: Option<MassFunction> = None;
    for (frame, list) in frames.iter().zip(masses) {
        let (first, rest) = list.split_first().ok_or_else(|| {
            Error::InvalidFrame(String::from("every frame needs at least one mass function"))
        })?;
        let mut m = first.clone();
        for other in rest {
            m = m.dempster_combine(other)?;
        }
        if m.worlds != frame.len() {
            return Err(Error::InvalidFrame(String::from(
                "mass function does not match its frame",
            )));
        }
        labels = labels
            .iter()
            .flat_map(|l| {
                frame.worlds().iter().map(move |w| {
                    if l.is_empty() {
                        w.clone()
                    } else {
                        format!("{l},{w}")
                    }
                })
            })
            .collect();
        joint = Some(match joint {
            None => m,
            Some(j) => j.product(&m),
        });
    }
    let frame = Frame::unchecked(labels, MAX_PRODUCT_WORLDS)?;
    Ok((frame, joint.expect("frames is non-empty")))
}
