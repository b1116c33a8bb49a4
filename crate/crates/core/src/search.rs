//! Breadth-first search for certificate words.
//!
//! Starting from `v_R`, each level applies `A, A⁻¹, B, B⁻¹` to the vectors
//! discovered on the previous level only, discards images with an entry
//! above the bound, and drops vectors already seen. Every vector remembers
//! its parent and the generator that produced it, so the word reaching it
//! can be read back by walking to the root.
//!
//! Vectors are kept in `i128`. A bounded search checks up front that no
//! product can overflow; an unbounded one reports overflow as an error.

use std::collections::HashMap;
use std::ops::Range;
use std::thread;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;
use thiserror::Error;

use crate::group::{Generators, GroupError, Letter, Word};
use crate::linalg::IntVector;

pub const DEFAULT_MAX_ENTRY: u64 = 1_000_000;
pub const DEFAULT_MAX_DEPTH: usize = 40;
/// Default cap on stored orbit vectors, roughly a gigabyte for `Sp(6)`.
pub const DEFAULT_MAX_NODES: usize = 4_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("bound {bound} is below the largest root entry {root_max}")]
    BoundBelowRoot { bound: u64, root_max: BigInt },
    #[error("bound {0} is too large for exact fixed-width orbit arithmetic")]
    BoundTooLarge(u64),
    #[error("orbit vector overflowed 128-bit arithmetic in an unbounded search")]
    Overflow,
    #[error("thread count must be positive")]
    NoThreads,
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    /// Largest allowed absolute entry; `None` disables pruning.
    pub max_entry: Option<u64>,
    pub max_depth: usize,
    /// Stop before a level whose expansion could push the number of stored
    /// vectors past this; `None` disables the cap.
    pub max_nodes: Option<usize>,
    /// Worker threads used to compute each level's images.
    pub threads: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            max_entry: Some(DEFAULT_MAX_ENTRY),
            max_depth: DEFAULT_MAX_DEPTH,
            max_nodes: Some(DEFAULT_MAX_NODES),
            threads: 1,
        }
    }
}

impl SearchConfig {
    /// Images are tried in this order within each parent.
    pub const GENERATOR_ORDER: [Letter; 4] = Letter::ALL;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitNode {
    pub vector: Box<[i128]>,
    pub parent: Option<usize>,
    pub generator: Option<Letter>,
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelStats {
    pub depth: usize,
    pub frontier: usize,
    pub visited: usize,
}

/// Breadth-first orbit of one vector under the four generators.
pub struct Orbit {
    mats: [Vec<i128>; 4],
    dim: usize,
    max_entry: Option<i128>,
    threads: usize,
    nodes: Vec<OrbitNode>,
    index: HashMap<Box<[i128]>, usize>,
    frontier: Range<usize>,
    levels: Vec<LevelStats>,
}

fn small_vector(v: &[BigInt]) -> Result<Vec<i128>, SearchError> {
    v.iter()
        .map(|e| e.to_i128().ok_or(SearchError::Overflow))
        .collect()
}

fn max_abs(values: impl IntoIterator<Item = BigInt>) -> BigInt {
    values
        .into_iter()
        .map(|v| v.abs())
        .max()
        .unwrap_or_default()
}

impl Orbit {
    /// Starts an orbit at `root`. `row_bound` is an extra row (such as
    /// `v_L`) whose products with orbit vectors must also stay exact.
    pub fn new(
        gens: &Generators,
        root: &[BigInt],
        row_bound: Option<&[BigInt]>,
        cfg: &SearchConfig,
    ) -> Result<Self, SearchError> {
        if cfg.threads == 0 {
            return Err(SearchError::NoThreads);
        }
        let dim = gens.dim();
        let root_max = max_abs(root.iter().cloned());
        let coeff_max = max_abs(
            Letter::ALL
                .iter()
                .flat_map(|&l| gens.matrix(l).entries().to_vec())
                .chain(row_bound.into_iter().flatten().cloned()),
        );
        if let Some(bound) = cfg.max_entry {
            if root_max > BigInt::from(bound) {
                return Err(SearchError::BoundBelowRoot { bound, root_max });
            }
            let worst = BigInt::from(dim) * &coeff_max * BigInt::from(bound);
            if worst > BigInt::from(i128::MAX) {
                return Err(SearchError::BoundTooLarge(bound));
            }
        }
        let [a, a_inv, b, b_inv] = Letter::ALL.map(|l| small_vector(gens.matrix(l).entries()));
        let mats = [a?, a_inv?, b?, b_inv?];
        let root: Box<[i128]> = small_vector(root)?.into_boxed_slice();
        let mut index = HashMap::new();
        index.insert(root.clone(), 0);
        Ok(Self {
            mats,
            dim,
            max_entry: cfg.max_entry.map(i128::from),
            threads: cfg.threads,
            nodes: vec![OrbitNode {
                vector: root,
                parent: None,
                generator: None,
                depth: 0,
            }],
            index,
            frontier: 0..1,
            levels: vec![LevelStats {
                depth: 0,
                frontier: 1,
                visited: 1,
            }],
        })
    }

    pub fn nodes(&self) -> &[OrbitNode] {
        &self.nodes
    }

    pub fn levels(&self) -> &[LevelStats] {
        &self.levels
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn contains(&self, v: &[i128]) -> bool {
        self.index.contains_key(v)
    }

    /// `None` means the image was pruned by the bound.
    fn image(&self, letter_idx: usize, v: &[i128]) -> Result<Option<Box<[i128]>>, SearchError> {
        let m = &self.mats[letter_idx];
        let mut out = Vec::with_capacity(self.dim);
        for i in 0..self.dim {
            let mut acc: i128 = 0;
            for (a, x) in m[i * self.dim..(i + 1) * self.dim].iter().zip(v) {
                acc = a
                    .checked_mul(*x)
                    .and_then(|p| acc.checked_add(p))
                    .ok_or(SearchError::Overflow)?;
            }
            if self.max_entry.is_some_and(|b| acc.abs() > b) {
                return Ok(None);
            }
            out.push(acc);
        }
        Ok(Some(out.into_boxed_slice()))
    }

    fn images_of(&self, parents: Range<usize>) -> Result<Vec<Option<Box<[i128]>>>, SearchError> {
        let mut out = Vec::with_capacity(parents.len() * 4);
        for p in parents {
            for li in 0..4 {
                out.push(self.image(li, &self.nodes[p].vector)?);
            }
        }
        Ok(out)
    }

    /// Expands the newest level and returns the range of new nodes.
    ///
    /// Images are merged by parent index, then generator order, whatever the
    /// thread count, so the node list does not depend on it.
    pub fn expand(&mut self) -> Result<Range<usize>, SearchError> {
        let frontier = self.frontier.clone();
        let images = if self.threads > 1 && frontier.len() >= 2 * self.threads {
            let chunk = frontier.len().div_ceil(self.threads);
            let ranges: Vec<Range<usize>> = (frontier.start..frontier.end)
                .step_by(chunk)
                .map(|s| s..(s + chunk).min(frontier.end))
                .collect();
            let this = &*self;
            let parts: Vec<Result<Vec<_>, SearchError>> = thread::scope(|scope| {
                let handles: Vec<_> = ranges
                    .into_iter()
                    .map(|r| scope.spawn(move || this.images_of(r)))
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("orbit worker panicked"))
                    .collect()
            });
            let mut all = Vec::with_capacity(frontier.len() * 4);
            for part in parts {
                all.extend(part?);
            }
            all
        } else {
            self.images_of(frontier.clone())?
        };

        let start = self.nodes.len();
        let depth = self.depth() + 1;
        for (k, image) in images.into_iter().enumerate() {
            let Some(vector) = image else { continue };
            if self.index.contains_key(&vector) {
                continue;
            }
            let parent = frontier.start + k / 4;
            self.index.insert(vector.clone(), self.nodes.len());
            self.nodes.push(OrbitNode {
                vector,
                parent: Some(parent),
                generator: Some(Letter::ALL[k % 4]),
                depth,
            });
        }
        self.frontier = start..self.nodes.len();
        self.levels.push(LevelStats {
            depth,
            frontier: self.frontier.len(),
            visited: self.nodes.len(),
        });
        Ok(self.frontier.clone())
    }

    /// The word `γ` with `γ · root = nodes[idx].vector`.
    pub fn word_to(&self, idx: usize) -> Word {
        reconstruct_word(&self.nodes, idx)
    }

    pub fn vector(&self, idx: usize) -> IntVector {
        self.nodes[idx]
            .vector
            .iter()
            .map(|&e| BigInt::from(e))
            .collect()
    }
}

/// Reads the word off the parent links from `idx` up to the root.
///
/// A node's vector is its generator applied to its parent's vector, so the
/// generators met on the way up are the word's letters from left to right.
pub fn reconstruct_word(nodes: &[OrbitNode], idx: usize) -> Word {
    let mut letters = Vec::with_capacity(nodes[idx].depth);
    let mut cur = idx;
    while let (Some(parent), Some(letter)) = (nodes[cur].parent, nodes[cur].generator) {
        letters.push(letter);
        cur = parent;
    }
    Word::new(letters)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    /// The certificate word and its image `γ · v_R`, if one was found.
    pub found: Option<(Word, IntVector)>,
    pub levels: Vec<LevelStats>,
    /// True when the search stopped at `max_nodes` rather than `max_depth`.
    pub truncated: bool,
}

/// Breadth-first search for the first orbit vector accepted by `accept`.
/// Each completed level is reported through `progress`.
pub fn find_in_orbit(
    gens: &Generators,
    root: &[BigInt],
    row_bound: Option<&[BigInt]>,
    cfg: &SearchConfig,
    mut accept: impl FnMut(&[i128]) -> Result<bool, SearchError>,
    progress: &mut dyn FnMut(&LevelStats),
) -> Result<SearchOutcome, SearchError> {
    let mut orbit = Orbit::new(gens, root, row_bound, cfg)?;
    progress(&orbit.levels()[0]);
    let mut truncated = false;
    for _ in 0..cfg.max_depth {
        let last = orbit.levels().last().expect("level recorded");
        if cfg
            .max_nodes
            .is_some_and(|cap| last.visited.saturating_add(4 * last.frontier) > cap)
        {
            truncated = true;
            break;
        }
        let fresh = orbit.expand()?;
        progress(orbit.levels().last().expect("level recorded"));
        for idx in fresh.clone() {
            if accept(&orbit.nodes()[idx].vector)? {
                return Ok(SearchOutcome {
                    found: Some((orbit.word_to(idx), orbit.vector(idx))),
                    levels: orbit.levels().to_vec(),
                    truncated: false,
                });
            }
        }
        if fresh.is_empty() {
            break;
        }
    }
    Ok(SearchOutcome {
        found: None,
        levels: orbit.levels().to_vec(),
        truncated,
    })
}

fn checked_dot(row: &[i128], v: &[i128]) -> Result<i128, SearchError> {
    row.iter().zip(v).try_fold(0i128, |acc, (a, b)| {
        a.checked_mul(*b)
            .and_then(|p| acc.checked_add(p))
            .ok_or(SearchError::Overflow)
    })
}

fn independent_i128(u: &[i128], v: &[i128]) -> Result<bool, SearchError> {
    let n = u.len();
    for i in 0..n {
        for j in i + 1..n {
            let l = u[i].checked_mul(v[j]).ok_or(SearchError::Overflow)?;
            let r = u[j].checked_mul(v[i]).ok_or(SearchError::Overflow)?;
            if l != r {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Searches for a word `γ` with `v_L · γ v_R = 0` and `v_R, γ v_R`
/// linearly independent, where `T = A⁻¹B = 1 + v_R v_L`.
pub fn search_certificate(
    gens: &Generators,
    cfg: &SearchConfig,
) -> Result<SearchOutcome, SearchError> {
    search_certificate_with_progress(gens, cfg, &mut |_| {})
}

pub fn search_certificate_with_progress(
    gens: &Generators,
    cfg: &SearchConfig,
    progress: &mut dyn FnMut(&LevelStats),
) -> Result<SearchOutcome, SearchError> {
    let t = gens.transvection()?;
    let v_r = small_vector(&t.v_r)?;
    let v_l = small_vector(&t.v_l)?;
    find_in_orbit(
        gens,
        &t.v_r,
        Some(&t.v_l),
        cfg,
        |w| Ok(checked_dot(&v_l, w)? == 0 && independent_i128(&v_r, w)?),
        progress,
    )
}
