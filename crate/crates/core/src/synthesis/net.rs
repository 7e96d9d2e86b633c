use std::collections::HashSet;

use super::unitary::{quaternion_distance, Unitary2};
use super::word::{GateWord, Symbol};
use crate::error::{Error, Result};

pub const MAX_NET_LENGTH: usize = 16;
pub const DEFAULT_NET_LENGTH: usize = 10;
/// Quantisation step of the global-phase-free deduplication key.
pub const KEY_RESOLUTION: f64 = 1e-6;

/// All canonical words up to a length, one per unitary modulo global phase.
///
/// Entries are stored in breadth-first order (shorter words first, then by
/// symbol order), which is also the tie-break order for nearest lookups.
#[derive(Clone, Debug)]
pub struct EpsilonNet {
    max_length: usize,
    words: Vec<GateWord>,
    matrices: Vec<Unitary2>,
    quaternions: Vec<[f64; 4]>,
}

fn key(q: &[f64; 4]) -> [i64; 4] {
    q.map(|v| (v / KEY_RESOLUTION).round() as i64)
}

impl EpsilonNet {
    pub fn build(max_length: usize) -> Result<Self> {
        if !(1..=MAX_NET_LENGTH).contains(&max_length) {
            return Err(Error::InvalidParameter(format!(
                "net length must lie in 1..={MAX_NET_LENGTH}, got {max_length}"
            )));
        }
        let mut net = Self { max_length, words: Vec::new(), matrices: Vec::new(), quaternions: Vec::new() };
        let mut seen: HashSet<[i64; 4]> = HashSet::new();
        let root = Unitary2::identity();
        seen.insert(key(&root.canonical_quaternion()));
        net.insert(GateWord::new(), root);

        let mut frontier: Vec<usize> = vec![0];
        for len in 1..=max_length {
            let mut next = Vec::new();
            for &idx in &frontier {
                for s in Symbol::ALL {
                    let word = net.words[idx].push(s);
                    if word.len() != len {
                        continue;
                    }
                    let m = s.matrix() * net.matrices[idx];
                    if seen.insert(key(&m.canonical_quaternion())) {
                        next.push(net.words.len());
                        net.insert(word, m);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        Ok(net)
    }

    fn insert(&mut self, word: GateWord, m: Unitary2) {
        self.quaternions.push(m.to_quaternion());
        self.matrices.push(m);
        self.words.push(word);
    }

    pub fn max_length(&self) -> usize {
        self.max_length
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&GateWord, &Unitary2)> {
        self.words.iter().zip(&self.matrices)
    }

    /// Closest entry to `target` in projective operator-norm distance; first index wins ties.
    pub fn nearest(&self, target: &Unitary2) -> (&GateWord, &Unitary2, f64) {
        let q = target.to_quaternion();
        let mut best = (0, f64::INFINITY);
        for (i, p) in self.quaternions.iter().enumerate() {
            let d = quaternion_distance(p, &q);
            if d < best.1 {
                best = (i, d);
            }
        }
        (&self.words[best.0], &self.matrices[best.0], best.1)
    }
}
