//! Braid words and the diagram-level quantities the Morse-Novikov bounds
//! need.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BraidError {
    #[error("malformed braid header: {0} (expected \"n: l1 l2 ...\")")]
    Header(String),
    #[error("bad letter {text:?} at position {index}")]
    Letter { index: usize, text: String },
    #[error("letter {letter} at position {index} out of range for {strands} strands")]
    OutOfRange { index: usize, letter: i32, strands: usize },
}

/// A word in the braid group on `strands` strings. Letter `±i` is the
/// generator `sigma_i^{±1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BraidWord {
    pub strands: usize,
    pub letters: Vec<i32>,
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<i32>) -> Result<Self, BraidError> {
        if strands == 0 {
            return Err(BraidError::Header("strand count must be at least 1".into()));
        }
        for (index, &letter) in letters.iter().enumerate() {
            if letter == 0 || letter.unsigned_abs() as usize >= strands {
                return Err(BraidError::OutOfRange { index, letter, strands });
            }
        }
        Ok(Self { strands, letters })
    }

    pub fn crossings(&self) -> usize {
        self.letters.len()
    }
}

impl std::fmt::Display for BraidWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:", self.strands)?;
        for l in &self.letters {
            write!(f, " {l}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for BraidWord {
    type Err = BraidError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_braid(s)
    }
}

/// Parses `"n: l1 l2 ... lc"`; letters may be separated by whitespace or
/// commas.
pub fn parse_braid(text: &str) -> Result<BraidWord, BraidError> {
    let (head, body) = text.split_once(':').ok_or_else(|| BraidError::Header(format!("no ':' in {text:?}")))?;
    let strands: usize =
        head.trim().parse().map_err(|_| BraidError::Header(format!("strand count {:?} is not a positive integer", head.trim())))?;
    let letters = body
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .enumerate()
        .map(|(index, t)| t.parse::<i32>().map_err(|_| BraidError::Letter { index, text: t.to_string() }))
        .collect::<Result<Vec<_>, _>>()?;
    BraidWord::new(strands, letters)
}

/// Strand permutation of the word, as images of `0..strands`.
fn permutation(b: &BraidWord) -> Vec<usize> {
    let mut pos: Vec<usize> = (0..b.strands).collect();
    for &l in &b.letters {
        let i = l.unsigned_abs() as usize - 1;
        pos.swap(i, i + 1);
    }
    pos
}

/// Number of components of the closure: cycles of the strand permutation.
pub fn closure_components(b: &BraidWord) -> usize {
    let perm = permutation(b);
    let mut seen = vec![false; b.strands];
    let mut cycles = 0;
    for s in 0..b.strands {
        if seen[s] {
            continue;
        }
        cycles += 1;
        let mut k = s;
        while !seen[k] {
            seen[k] = true;
            k = perm[k];
        }
    }
    cycles
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramInvariants {
    pub crossing_count: usize,
    pub strand_count: usize,
    pub closure_components: usize,
    /// Euler characteristic of the Seifert surface built from one disk per
    /// strand and one band per crossing.
    pub bennequin_chi: i64,
    /// Sum of first Betti numbers over the connected pieces of that surface.
    pub free_rank_upper: u64,
    pub connected_surface: bool,
    /// Connected pieces of the surface.
    pub surface_pieces: usize,
}

pub fn bennequin_invariants(b: &BraidWord) -> DiagramInvariants {
    // strands i and i+1 share a piece when letter ±(i+1) occurs
    let mut used = vec![false; b.strands.saturating_sub(1)];
    for &l in &b.letters {
        used[l.unsigned_abs() as usize - 1] = true;
    }
    let pieces = 1 + used.iter().filter(|u| !**u).count();
    let chi = b.strands as i64 - b.letters.len() as i64;
    // each piece is a disk-band surface, so b1 = 1 - chi per piece
    let free_rank_upper = (pieces as i64 - chi) as u64;
    DiagramInvariants {
        crossing_count: b.letters.len(),
        strand_count: b.strands,
        closure_components: closure_components(b),
        bennequin_chi: chi,
        free_rank_upper,
        connected_surface: pieces == 1,
        surface_pieces: pieces,
    }
}

/// Deletes one pair `s s^{-1}`, including the pair formed by the last and
/// first letters (a conjugation).
fn free_reduce_once(letters: &mut Vec<i32>) -> bool {
    if let Some(i) = letters.windows(2).position(|w| w[0] == -w[1]) {
        letters.drain(i..i + 2);
        return true;
    }
    if letters.len() >= 2 && letters[0] == -letters[letters.len() - 1] {
        letters.pop();
        letters.remove(0);
        return true;
    }
    false
}

/// Applies closure-preserving reductions until none applies: free
/// reduction (linear and cyclic) and Markov destabilization of a unique
/// occurrence of `sigma_{n-1}^{±1}`.
///
/// A strand that no letter touches is a split unknotted component, so it is
/// never removed.
pub fn greedy_destabilize(b: &BraidWord) -> BraidWord {
    let mut n = b.strands;
    let mut letters = b.letters.clone();
    loop {
        if free_reduce_once(&mut letters) {
            continue;
        }
        if n >= 2 {
            let top = (n - 1) as i32;
            let hits: Vec<usize> = letters.iter().enumerate().filter(|(_, l)| l.abs() == top).map(|(i, _)| i).collect();
            if hits.len() == 1 {
                letters.remove(hits[0]);
                n -= 1;
                continue;
            }
        }
        break;
    }
    BraidWord { strands: n, letters }
}
