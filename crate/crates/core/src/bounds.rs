//! Upper bounds on the Morse-Novikov number of a braid closure and of its
//! Whitehead doubles, each certified by a construction expression whose
//! critical-point count is the bound.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::braid::{bennequin_invariants, closure_components, greedy_destabilize, BraidWord};
use crate::calculus::{parse_expr, CalcError, Expr};

pub const ASSUME_FREE_BENNEQUIN: &str = "the braid-diagram Seifert surface is free";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("closure has {0} components; Whitehead double estimates need a knot")]
    NotAKnot(usize),
    #[error("braid-diagram surface has {0} pieces; give a free rank override or bound each component separately")]
    DisconnectedSurface(usize),
    #[error(transparent)]
    Calc(#[from] CalcError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundName {
    FreeRank,
    BraidIndexDouble,
    WrappingDouble,
    CrossingDouble,
}

impl std::fmt::Display for BoundName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BoundName::FreeRank => "free_rank",
            BoundName::BraidIndexDouble => "braid_index",
            BoundName::WrappingDouble => "wrapping",
            BoundName::CrossingDouble => "crossing",
        })
    }
}

/// User-supplied upper bounds that replace the diagram-derived ones when
/// smaller.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Overrides {
    pub braid_index: Option<u32>,
    pub crossing_number: Option<u32>,
    pub wrapping_genus: Option<u32>,
    pub layered_wrapping_genus: Option<u32>,
    pub free_rank: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnotInput {
    pub braid: BraidWord,
    /// Twisting `m` of the doubled annulus.
    pub double_twist: i64,
    /// Clasp sign of the Whitehead double.
    pub clasp_positive: bool,
    pub overrides: Overrides,
}

impl KnotInput {
    pub fn new(braid: BraidWord) -> Self {
        Self { braid, double_twist: 0, clasp_positive: true, overrides: Overrides::default() }
    }
}

/// Quantities a certificate was computed from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputsUsed {
    pub strands: usize,
    pub crossings: usize,
    pub components: usize,
    pub free_rank_upper: Option<u64>,
    pub wrap_upper: u64,
    pub wlap_upper: u64,
    /// Where the number feeding the estimate came from.
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub name: BoundName,
    pub value: u64,
    pub tree: String,
    pub assumptions: Vec<String>,
    pub inputs_used: InputsUsed,
}

impl BoundCertificate {
    /// Critical-point count of the certificate tree.
    pub fn evaluate_tree(&self) -> Result<usize, CalcError> {
        Ok(parse_expr(&self.tree)?.evaluate()?.mn_upper())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundTable {
    pub best: BoundCertificate,
    /// All estimates, ordered by name.
    pub table: Vec<BoundCertificate>,
}

fn min_override(internal: u64, user: Option<u32>) -> (u64, bool) {
    match user {
        Some(v) if (v as u64) < internal => (v as u64, true),
        _ => (internal, false),
    }
}

struct Reduced {
    word: BraidWord,
    components: usize,
}

fn reduce(input: &KnotInput) -> Reduced {
    let word = greedy_destabilize(&input.braid);
    Reduced { components: closure_components(&word), word }
}

fn base_inputs(r: &Reduced, free: Option<u64>, source: String) -> InputsUsed {
    let c = r.word.crossings() as u64;
    InputsUsed {
        strands: r.word.strands,
        crossings: r.word.crossings(),
        components: r.components,
        free_rank_upper: free,
        wrap_upper: c + 1,
        wlap_upper: c + 1,
        source,
    }
}

fn nest(mut e: Expr, times: u64, f: impl Fn(Expr) -> Expr) -> Expr {
    for _ in 0..times {
        e = f(e);
    }
    e
}

fn hopf_plumb(e: Expr, clasp_positive: bool) -> Expr {
    // the positive double plumbs A(O,-1), the positive Hopf annulus
    Expr::Msum { f0: Box::new(e), f1: Box::new(Expr::Hopf { positive: clasp_positive }), n: 2 }
}

fn certificate(
    name: BoundName,
    tree: Expr,
    mut assumptions: Vec<String>,
    inputs_used: InputsUsed,
) -> Result<BoundCertificate, BoundsError> {
    let model = tree.evaluate()?;
    for a in model.assumptions {
        if !assumptions.contains(&a) {
            assumptions.push(a);
        }
    }
    Ok(BoundCertificate { name, value: model.word.len() as u64, tree: tree.to_string(), assumptions, inputs_used })
}

/// `MN(L) <= 2 r` for a free Seifert surface of first Betti number `r`.
pub fn free_rank_bound(input: &KnotInput) -> Result<BoundCertificate, BoundsError> {
    let red = reduce(input);
    let inv = bennequin_invariants(&red.word);
    let internal = inv.connected_surface.then_some(inv.free_rank_upper);
    let (r, source) = match (internal, input.overrides.free_rank) {
        (Some(i), user) => {
            let (r, used) = min_override(i, user);
            (r, if used { "free rank override".to_string() } else { "braid-diagram surface".to_string() })
        }
        (None, Some(v)) => (v as u64, "free rank override".to_string()),
        (None, None) => return Err(BoundsError::DisconnectedSurface(inv.surface_pieces)),
    };
    let mut assumptions = Vec::new();
    if source == "braid-diagram surface" {
        assumptions.push(ASSUME_FREE_BENNEQUIN.to_string());
    }
    // fibered surface with b1 = r from Hopf plumbings, cut r times, then r
    // negative Hopf plumbings across the cuts
    let fiber = nest(Expr::O, r, |e| Expr::Msum { f0: Box::new(e), f1: Box::new(Expr::Hopf { positive: true }), n: 2 });
    let cuts = nest(fiber, r, |e| Expr::Cut { f: Box::new(e) });
    let tree = nest(cuts, r, |e| Expr::Msum { f0: Box::new(e), f1: Box::new(Expr::Torus { p: 2, q: -2 }), n: 2 });
    certificate(BoundName::FreeRank, tree, assumptions, base_inputs(&red, Some(r), source))
}

fn knot(input: &KnotInput) -> Result<Reduced, BoundsError> {
    let red = reduce(input);
    if red.components != 1 {
        return Err(BoundsError::NotAKnot(red.components));
    }
    Ok(red)
}

/// `MN(D(K, m, ±)) <= 4 n - 2` for `K` a closed `n`-braid.
pub fn braid_index_double_bound(input: &KnotInput) -> Result<BoundCertificate, BoundsError> {
    let red = knot(input)?;
    let (n, used) = min_override(red.word.strands as u64, input.overrides.braid_index);
    let source = if used { "braid index override" } else { "strands after reduction" };
    let spliced = Expr::Splice { f: Box::new(Expr::O), n: n as u32, k: input.double_twist };
    let cuts = nest(spliced, 2 * n - 1, |e| Expr::Cut { f: Box::new(e) });
    let tree = hopf_plumb(cuts, input.clasp_positive);
    certificate(BoundName::BraidIndexDouble, tree, vec![], base_inputs(&red, None, source.into()))
}

/// Connected sum of `g` copies of `o1`; `o` for `g = 0`.
fn o_g(g: u64) -> Expr {
    if g == 0 {
        return Expr::O;
    }
    nest(Expr::O1, g - 1, |e| Expr::Msum { f0: Box::new(e), f1: Box::new(Expr::O1), n: 1 })
}

fn wrapping_tree(g: u64, input: &KnotInput) -> Expr {
    let spliced = Expr::Splice { f: Box::new(o_g(g)), n: 1, k: input.double_twist - 1 };
    hopf_plumb(Expr::Cut { f: Box::new(spliced) }, input.clasp_positive)
}

/// `MN(D(K, m, ±)) <= 2 (wl(K) + 1) <= 2 (w(K) + 1)`, with `w(K) <= c + 1`
/// as the fallback.
pub fn wrapping_double_bound(input: &KnotInput) -> Result<BoundCertificate, BoundsError> {
    let red = knot(input)?;
    let fallback = red.word.crossings() as u64 + 1;
    let mut best = (fallback, "crossing count + 1");
    if let Some(w) = input.overrides.wrapping_genus {
        if (w as u64) < best.0 {
            best = (w as u64, "wrapping genus override");
        }
    }
    if let Some(w) = input.overrides.layered_wrapping_genus {
        if (w as u64) < best.0 {
            best = (w as u64, "layered wrapping genus override");
        }
    }
    let (g, source) = best;
    let mut used = base_inputs(&red, None, source.into());
    used.wrap_upper = input.overrides.wrapping_genus.map_or(fallback, |w| (w as u64).min(fallback));
    used.wlap_upper = g;
    certificate(BoundName::WrappingDouble, wrapping_tree(g, input), vec![], used)
}

/// `MN(D(K, m, ±)) <= 2 (c(K) + 2)`.
pub fn crossing_double_bound(input: &KnotInput) -> Result<BoundCertificate, BoundsError> {
    let red = knot(input)?;
    let (c, used) = min_override(red.word.crossings() as u64, input.overrides.crossing_number);
    let source = if used { "crossing number override" } else { "letters after reduction" };
    certificate(BoundName::CrossingDouble, wrapping_tree(c + 1, input), vec![], base_inputs(&red, None, source.into()))
}

/// All three Whitehead double estimates and the smallest of them; ties go
/// to the earlier name.
pub fn best_double_bound(input: &KnotInput) -> Result<BoundTable, BoundsError> {
    let table = vec![braid_index_double_bound(input)?, wrapping_double_bound(input)?, crossing_double_bound(input)?];
    let best = table.iter().min_by_key(|c| (c.value, c.name)).expect("three rows").clone();
    Ok(BoundTable { best, table })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::parse_braid;

    fn input(s: &str) -> KnotInput {
        KnotInput::new(parse_braid(s).unwrap())
    }

    fn check(c: &BoundCertificate) -> u64 {
        assert_eq!(c.evaluate_tree().unwrap() as u64, c.value, "{}", c.tree);
        c.value
    }

    #[test]
    fn free_rank() {
        assert_eq!(check(&free_rank_bound(&input("2: 1 1 1")).unwrap()), 4);
        assert_eq!(check(&free_rank_bound(&input("1:")).unwrap()), 0);
        assert_eq!(check(&free_rank_bound(&input("3: 1 1 2 2")).unwrap()), 4);
        assert_eq!(check(&free_rank_bound(&input("2: 1 -1 1")).unwrap()), 0);
        assert!(matches!(free_rank_bound(&input("2:")), Err(BoundsError::DisconnectedSurface(2))));
        let mut i = input("2:");
        i.overrides.free_rank = Some(0);
        assert_eq!(check(&free_rank_bound(&i).unwrap()), 0);
        assert!(free_rank_bound(&input("2: 1 1 1")).unwrap().assumptions.iter().any(|a| a == ASSUME_FREE_BENNEQUIN));
    }

    #[test]
    fn braid_index() {
        assert_eq!(check(&braid_index_double_bound(&input("2: 1 1 1")).unwrap()), 6);
        assert_eq!(check(&braid_index_double_bound(&input("3: 1 2")).unwrap()), 2);
        assert_eq!(check(&braid_index_double_bound(&input("3: 1 -2 1 -2")).unwrap()), 10);
        assert!(matches!(braid_index_double_bound(&input("2: 1 1")), Err(BoundsError::NotAKnot(2))));
    }

    #[test]
    fn wrapping_and_crossing() {
        let mut fig8 = input("3: 1 -2 1 -2");
        fig8.overrides.layered_wrapping_genus = Some(1);
        assert_eq!(check(&wrapping_double_bound(&fig8).unwrap()), 4);
        let mut tre = input("2: 1 1 1");
        assert_eq!(check(&wrapping_double_bound(&tre).unwrap()), 10);
        tre.overrides.wrapping_genus = Some(1);
        let w = wrapping_double_bound(&tre).unwrap();
        assert_eq!((check(&w), w.inputs_used.source.as_str()), (4, "wrapping genus override"));

        assert_eq!(check(&crossing_double_bound(&input("2: 1 1 1")).unwrap()), 10);
        assert_eq!(check(&crossing_double_bound(&input("1:")).unwrap()), 4);
        let mut big = input("1:");
        big.overrides.crossing_number = Some(8);
        // an override above the diagram bound is ignored
        assert_eq!(crossing_double_bound(&big).unwrap().value, 4);
        let mut eight = input("2: 1 1 1 1 1 1 1 1 1");
        eight.overrides.crossing_number = Some(8);
        assert_eq!(check(&crossing_double_bound(&eight).unwrap()), 20);
    }

    #[test]
    fn best() {
        let t = best_double_bound(&input("2: 1 1 1")).unwrap();
        let values: Vec<u64> = t.table.iter().map(|c| c.value).collect();
        assert_eq!((values, t.best.value, t.best.name), (vec![6, 10, 10], 6, BoundName::BraidIndexDouble));
        let o = best_double_bound(&input("1:")).unwrap();
        assert_eq!(o.table.iter().map(|c| c.value).collect::<Vec<_>>(), vec![2, 4, 4]);
        let mut w = input("2: 1 1 1");
        w.overrides.wrapping_genus = Some(1);
        let t = best_double_bound(&w).unwrap();
        assert_eq!(t.table.iter().map(|c| c.value).collect::<Vec<_>>(), vec![6, 4, 10]);
        assert_eq!((t.best.value, t.best.name), (4, BoundName::WrappingDouble));
    }
}
