//! Symbolic Morse maps to the circle and the constructions that combine
//! them, with exact bookkeeping of critical points and page Euler
//! characteristics.
//!
//! A model stores the cyclic sequence of critical values read from a marked
//! basepoint arc of the circle. Crossing an index-1 value (`Minus`) lowers
//! the page Euler characteristic by 2 and crossing an index-2 value (`Plus`)
//! raises it by 2. Primitives put the basepoint on their large page, so
//! their words read `(+, -)` from the basepoint.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn chi_step(self) -> i64 {
        match self {
            Sign::Minus => -2,
            Sign::Plus => 2,
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sign::Minus => "-",
            Sign::Plus => "+",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CalcError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown primitive {0:?}")]
    UnknownPrimitive(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub const ASSUME_TWIST: &str = "framing-0 unknot interior to a smooth page exists (twist)";
pub const ASSUME_ARC: &str = "proper arc on the designated page exists (cut / connected sum)";
pub const ASSUME_SELF_INDEX: &str =
    "self-indexing realizes the maximum-chi page of the input as the small page";
pub const ASSUME_BASKET_M: &str =
    "basket count m = #{k : k not in {+1,-1}}; a plumband with |k| = 2 is counted";

fn assume_braid(n: u32) -> String {
    format!("a closed {n}-string braid along the map exists as declared (splice)")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorseModel {
    /// Critical values in circle order, starting at the basepoint arc.
    pub word: Vec<Sign>,
    /// Euler characteristic of the page on the basepoint arc.
    pub chi_ref: i64,
    pub binding: String,
    /// Components of the binding, when the construction determines it.
    pub boundary_components: Option<u32>,
    pub assumptions: Vec<String>,
}

impl MorseModel {
    fn fibered(chi: i64, binding: impl Into<String>, boundary: u32) -> Self {
        Self { word: vec![], chi_ref: chi, binding: binding.into(), boundary_components: Some(boundary), assumptions: vec![] }
    }

    fn pair(large_chi: i64, binding: impl Into<String>, boundary: u32) -> Self {
        Self {
            word: vec![Sign::Plus, Sign::Minus],
            chi_ref: large_chi,
            binding: binding.into(),
            boundary_components: Some(boundary),
            assumptions: vec![],
        }
    }

    fn assume(mut self, a: impl Into<String>) -> Self {
        let a = a.into();
        if !self.assumptions.contains(&a) {
            self.assumptions.push(a);
        }
        self
    }

    fn inherit(mut self, other: &[String]) -> Self {
        for a in other {
            self = self.assume(a.clone());
        }
        self
    }

    pub fn mn_upper(&self) -> usize {
        self.word.len()
    }

    pub fn count(&self, s: Sign) -> usize {
        self.word.iter().filter(|w| **w == s).count()
    }

    /// Page Euler characteristic on each arc, starting with the basepoint
    /// arc; one entry per arc between consecutive critical values (a single
    /// entry for a fibration).
    pub fn page_chis(&self) -> Vec<i64> {
        let mut chi = self.chi_ref;
        let mut out = vec![chi];
        for s in self.word.iter().take(self.word.len().saturating_sub(1)) {
            chi += s.chi_step();
            out.push(chi);
        }
        out
    }

    /// Both the sign balance and the return of the walk to `chi_ref`.
    pub fn is_balanced(&self) -> bool {
        let total: i64 = self.word.iter().map(|s| s.chi_step()).sum();
        self.count(Sign::Minus) == self.count(Sign::Plus) && total == 0
    }

    pub fn small_chi(&self) -> i64 {
        *self.page_chis().iter().max().expect("at least one page")
    }

    pub fn large_chi(&self) -> i64 {
        *self.page_chis().iter().min().expect("at least one page")
    }
}

pub fn o() -> MorseModel {
    MorseModel::fibered(1, "O", 1)
}

pub fn o1() -> MorseModel {
    MorseModel::pair(-1, "O", 1)
}

pub fn u() -> MorseModel {
    MorseModel::pair(0, "U", 2)
}

/// Fibration of the Hopf link `O{2, ±2}`; the fiber is the positive or
/// negative Hopf annulus.
pub fn hopf(positive: bool) -> MorseModel {
    MorseModel::fibered(0, if positive { "O{2,2}" } else { "O{2,-2}" }, 2)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Fibration of the torus link `O{p, q}`; a negative `q` is the mirror.
pub fn torus(p: i64, q: i64) -> Result<MorseModel, CalcError> {
    if p == 0 || q == 0 {
        return Err(CalcError::InvalidArgument(format!("torus({p},{q}) needs nonzero p and q")));
    }
    let (a, b) = (p.abs(), q.abs());
    let chi = a + b - a * b;
    let comps = gcd(a as u64, b as u64) as u32;
    Ok(MorseModel::fibered(chi, format!("O{{{p},{q}}}"), comps))
}

/// The boundary of the `k`-twisted unknotted annulus: Hopf fibrations for
/// `k = ±1` (the positive Hopf annulus has `k = -1`), two critical points
/// otherwise.
pub fn annulus(k: i64) -> MorseModel {
    match k {
        -1 => hopf(true),
        1 => hopf(false),
        _ => MorseModel::pair(-2, format!("bd A(O,{k})"), 2),
    }
}

/// Murasugi sum along a `2n`-gon: `f1`'s critical values go into `f0`'s
/// basepoint arc and the pages are glued along a disk.
pub fn msum(f0: &MorseModel, f1: &MorseModel, n: u32) -> Result<MorseModel, CalcError> {
    if n == 0 {
        return Err(CalcError::InvalidArgument("Murasugi sum needs n >= 1".into()));
    }
    let mut word = f1.word.clone();
    word.extend_from_slice(&f0.word);
    // a connected sum of links; plumbings can merge or split components
    let boundary = match (n, f0.boundary_components, f1.boundary_components) {
        (1, Some(a), Some(b)) => Some(a + b - 1),
        _ => None,
    };
    let m = MorseModel {
        word,
        chi_ref: f0.chi_ref + f1.chi_ref - 1,
        binding: format!("msum({},{},{n})", f0.binding, f1.binding),
        boundary_components: boundary,
        assumptions: f0.assumptions.clone(),
    };
    Ok(m.inherit(&f1.assumptions))
}

/// Canonical self-indexed cycle: all index-2 values, then all index-1
/// values, read from the large page. The small page gets the largest page
/// Euler characteristic of the input.
pub fn self_index(f: &MorseModel) -> MorseModel {
    let nu = f.word.len() / 2;
    let mut word = vec![Sign::Plus; nu];
    word.extend(std::iter::repeat_n(Sign::Minus, nu));
    if word == f.word {
        return f.clone();
    }
    let small = f.small_chi();
    MorseModel { word, chi_ref: small - 2 * nu as i64, ..f.clone() }.assume(ASSUME_SELF_INDEX)
}

/// Twist along a framing-0 unknot lying on a page: nothing but the binding
/// changes.
pub fn twist0(f: &MorseModel, n: i64) -> MorseModel {
    MorseModel { binding: format!("twist0({},{n})", f.binding), ..f.clone() }.assume(ASSUME_TWIST)
}

/// Twist along an arbitrary unknot: connected sum with `o1` first.
pub fn twist_arbitrary(f: &MorseModel, n: i64) -> MorseModel {
    let summed = msum(f, &o1(), 1).expect("n = 1 is valid").assume(ASSUME_ARC);
    twist0(&summed, n)
}

/// Cut along a proper arc of a page: plumb `u` on its annulus page.
pub fn cut(f: &MorseModel) -> MorseModel {
    let mut m = msum(f, &u(), 2).expect("n = 2 is valid").assume(ASSUME_ARC);
    m.binding = format!("cut({})", f.binding);
    m
}

/// Splice along a declared closed `n`-string braid `B` with framing `k`.
/// Every page gains one plumbing square per string; the binding gains the
/// two boundary curves of the annulus around `B`.
pub fn splice(f: &MorseModel, n: u32, k: i64) -> Result<MorseModel, CalcError> {
    if n == 0 {
        return Err(CalcError::InvalidArgument("splice needs n >= 1".into()));
    }
    Ok(MorseModel {
        chi_ref: f.chi_ref - n as i64,
        binding: format!("splice({},{n},{k})", f.binding),
        boundary_components: f.boundary_components.map(|b| b + 2),
        ..f.clone()
    }
    .assume(assume_braid(n)))
}

/// Plumbing of unknotted annuli with framings `ks` onto a disk.
pub fn basket(ks: &[i64]) -> MorseModel {
    let mut m = o();
    for &k in ks {
        m = msum(&m, &annulus(k), 2).expect("n = 2 is valid");
    }
    if ks.iter().any(|k| k.abs() == 2) {
        m = m.assume(ASSUME_BASKET_M);
    }
    m
}

/// Parsed construction expression.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "op")]
pub enum Expr {
    O,
    O1,
    U,
    Hopf { positive: bool },
    Torus { p: i64, q: i64 },
    Annulus { k: i64 },
    Msum { f0: Box<Expr>, f1: Box<Expr>, n: u32 },
    SelfIndex { f: Box<Expr> },
    Twist0 { f: Box<Expr>, n: i64 },
    Twist { f: Box<Expr>, n: i64 },
    Cut { f: Box<Expr> },
    Splice { f: Box<Expr>, n: u32, k: i64 },
    Basket { ks: Vec<i64> },
}

impl std::fmt::Display for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Expr::O => write!(f, "o"),
            Expr::O1 => write!(f, "o1"),
            Expr::U => write!(f, "u"),
            Expr::Hopf { positive } => write!(f, "hopf({})", if *positive { '+' } else { '-' }),
            Expr::Torus { p, q } => write!(f, "torus({p},{q})"),
            Expr::Annulus { k } => write!(f, "annulus({k})"),
            Expr::Msum { f0, f1, n } => write!(f, "msum({f0},{f1},{n})"),
            Expr::SelfIndex { f: e } => write!(f, "selfindex({e})"),
            Expr::Twist0 { f: e, n } => write!(f, "twist0({e},{n})"),
            Expr::Twist { f: e, n } => write!(f, "twist({e},{n})"),
            Expr::Cut { f: e } => write!(f, "cut({e})"),
            Expr::Splice { f: e, n, k } => write!(f, "splice({e},{n},{k})"),
            Expr::Basket { ks } => {
                let parts: Vec<String> = ks.iter().map(|k| k.to_string()).collect();
                write!(f, "basket({})", parts.join(","))
            }
        }
    }
}

impl Expr {
    pub fn evaluate(&self) -> Result<MorseModel, CalcError> {
        Ok(match self {
            Expr::O => o(),
            Expr::O1 => o1(),
            Expr::U => u(),
            Expr::Hopf { positive } => hopf(*positive),
            Expr::Torus { p, q } => torus(*p, *q)?,
            Expr::Annulus { k } => annulus(*k),
            Expr::Msum { f0, f1, n } => msum(&f0.evaluate()?, &f1.evaluate()?, *n)?,
            Expr::SelfIndex { f } => self_index(&f.evaluate()?),
            Expr::Twist0 { f, n } => twist0(&f.evaluate()?, *n),
            Expr::Twist { f, n } => twist_arbitrary(&f.evaluate()?, *n),
            Expr::Cut { f } => cut(&f.evaluate()?),
            Expr::Splice { f, n, k } => splice(&f.evaluate()?, *n, *k)?,
            Expr::Basket { ks } => basket(ks),
        })
    }

    /// The Morse-Novikov number itself, for the primitives whose value is
    /// known: fibered ones, `u`, and `annulus(k)`.
    pub fn exact_mn(&self) -> Option<usize> {
        match self {
            Expr::O | Expr::Hopf { .. } | Expr::Torus { .. } => Some(0),
            Expr::U => Some(2),
            Expr::Annulus { k } => Some(if k.abs() == 1 { 0 } else { 2 }),
            _ => None,
        }
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, CalcError> {
        Err(CalcError::Syntax { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), CalcError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn ident(&mut self) -> Result<String, CalcError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_') {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a primitive or operation name");
        }
        Ok(String::from_utf8_lossy(&self.s[start..self.pos]).into_owned())
    }

    fn int(&mut self) -> Result<i64, CalcError> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.s.get(self.pos), Some(b'+') | Some(b'-')) {
            self.pos += 1;
        }
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii");
        text.parse().or_else(|_| {
            self.pos = start;
            self.err("expected an integer")
        })
    }

    fn positive(&mut self, what: &str) -> Result<u32, CalcError> {
        let at = self.pos;
        let v = self.int()?;
        match u32::try_from(v) {
            Ok(v) if v >= 1 => Ok(v),
            _ => {
                self.pos = at;
                self.err(format!("{what} must be a positive integer"))
            }
        }
    }

    fn expr(&mut self) -> Result<Expr, CalcError> {
        let at = {
            self.skip_ws();
            self.pos
        };
        let name = self.ident()?;
        let leaf = match name.as_str() {
            "o" => Some(Expr::O),
            "o1" => Some(Expr::O1),
            "u" => Some(Expr::U),
            _ => None,
        };
        if let Some(e) = leaf {
            return Ok(e);
        }
        self.expect(b'(')?;
        let e = match name.as_str() {
            "hopf" => {
                let positive = match self.peek() {
                    Some(b'+') => true,
                    Some(b'-') => false,
                    _ => return self.err("expected '+' or '-'"),
                };
                self.pos += 1;
                Expr::Hopf { positive }
            }
            "torus" => {
                let p = self.int()?;
                self.expect(b',')?;
                let q = self.int()?;
                Expr::Torus { p, q }
            }
            "annulus" => Expr::Annulus { k: self.int()? },
            "msum" => {
                let f0 = Box::new(self.expr()?);
                self.expect(b',')?;
                let f1 = Box::new(self.expr()?);
                self.expect(b',')?;
                Expr::Msum { f0, f1, n: self.positive("msum n")? }
            }
            "selfindex" => Expr::SelfIndex { f: Box::new(self.expr()?) },
            "twist0" | "twist" => {
                let f = Box::new(self.expr()?);
                self.expect(b',')?;
                let n = self.int()?;
                if name == "twist0" {
                    Expr::Twist0 { f, n }
                } else {
                    Expr::Twist { f, n }
                }
            }
            "cut" => Expr::Cut { f: Box::new(self.expr()?) },
            "splice" => {
                let f = Box::new(self.expr()?);
                self.expect(b',')?;
                let n = self.positive("splice n")?;
                self.expect(b',')?;
                Expr::Splice { f, n, k: self.int()? }
            }
            "basket" => {
                let mut ks = Vec::new();
                if self.peek() != Some(b')') {
                    ks.push(self.int()?);
                    while self.peek() == Some(b',') {
                        self.pos += 1;
                        ks.push(self.int()?);
                    }
                }
                Expr::Basket { ks }
            }
            _ => {
                self.pos = at;
                return Err(CalcError::UnknownPrimitive(name));
            }
        };
        self.expect(b')')?;
        Ok(e)
    }
}

pub fn parse_expr(text: &str) -> Result<Expr, CalcError> {
    let mut p = Parser { s: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    if let Expr::Torus { p: a, q: b } = e {
        torus(a, b)?;
    }
    Ok(e)
}

/// What the calculator reports for an expression.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub expression: String,
    pub word: Vec<Sign>,
    pub mn_upper: usize,
    /// Page Euler characteristics along the circle from the basepoint arc.
    pub page_chis: Vec<i64>,
    pub small_chi: i64,
    pub large_chi: i64,
    pub binding: String,
    pub boundary_components: Option<u32>,
    pub exact_mn: Option<usize>,
    pub assumptions: Vec<String>,
}

pub fn summarize(e: &Expr) -> Result<ModelSummary, CalcError> {
    let m = e.evaluate()?;
    let s = self_index(&m);
    let mut assumptions = m.assumptions.clone();
    if s != m && !assumptions.iter().any(|a| a == ASSUME_SELF_INDEX) {
        assumptions.push(ASSUME_SELF_INDEX.to_string());
    }
    Ok(ModelSummary {
        expression: e.to_string(),
        word: m.word.clone(),
        mn_upper: m.mn_upper(),
        page_chis: m.page_chis(),
        small_chi: s.small_chi(),
        large_chi: s.large_chi(),
        binding: m.binding.clone(),
        boundary_components: m.boundary_components,
        exact_mn: e.exact_mn(),
        assumptions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use Sign::{Minus, Plus};

    fn eval(s: &str) -> MorseModel {
        parse_expr(s).unwrap().evaluate().unwrap()
    }

    #[test]
    fn primitives() {
        assert_eq!(u().mn_upper(), 2);
        assert_eq!(u().page_chis(), vec![0, 2]);
        assert_eq!(o1().page_chis(), vec![-1, 1]);
        assert_eq!(o().page_chis(), vec![1]);
        assert_eq!(hopf(true).mn_upper(), 0);
        assert_eq!(hopf(true).chi_ref, 0);
        assert_eq!(torus(2, 3).unwrap().chi_ref, -1);
        assert_eq!(torus(2, -2).unwrap().chi_ref, 0);
        assert_eq!(torus(3, 6).unwrap().boundary_components, Some(3));
        assert_eq!(annulus(-1), hopf(true));
        assert_eq!(annulus(3).page_chis(), vec![-2, 0]);
    }

    #[test]
    fn plumbing_two_u() {
        let m = msum(&u(), &u(), 2).unwrap();
        assert_eq!(m.word, vec![Plus, Minus, Plus, Minus]);
        assert_eq!(m.chi_ref, -1);
        let mut chis = m.page_chis();
        chis.sort();
        assert_eq!(chis, vec![-1, -1, 1, 1]);
        let s = self_index(&m);
        assert_eq!((s.small_chi(), s.large_chi(), s.mn_upper()), (1, -3, 4));
        assert!(s.assumptions.iter().any(|a| a == ASSUME_SELF_INDEX));
    }

    #[test]
    fn self_index_fixes_canonical_models() {
        assert_eq!(self_index(&u()), u());
        assert_eq!(self_index(&o()), o());
    }

    #[test]
    fn msum_examples() {
        let f = eval("cut(o1)");
        let g = msum(&f, &hopf(false), 2).unwrap();
        assert_eq!((g.word.clone(), g.chi_ref), (f.word.clone(), f.chi_ref - 1));
        let oo = msum(&o(), &o(), 1).unwrap();
        assert_eq!((oo.mn_upper(), oo.chi_ref, oo.boundary_components), (0, 1, Some(1)));
        assert!(msum(&o(), &o(), 0).is_err());
    }

    #[test]
    fn twists_cuts_splices() {
        assert_eq!(twist0(&hopf(true), 7).mn_upper(), 0);
        assert_eq!(twist0(&u(), 5).mn_upper(), 2);
        let t0 = twist0(&u(), 0);
        assert_eq!((t0.word.clone(), t0.chi_ref), (u().word, u().chi_ref));
        assert_eq!(twist_arbitrary(&hopf(true), 4).mn_upper(), 2);
        assert_eq!(twist_arbitrary(&o(), 4).mn_upper(), 2);
        assert_eq!(twist_arbitrary(&u(), 4).mn_upper(), 4);

        let c = cut(&o());
        assert_eq!(c.page_chis(), vec![0, 2]);
        assert_eq!(cut(&hopf(true)).page_chis(), vec![-1, 1]);
        assert_eq!(cut(&cut(&o())).mn_upper(), 4);

        let s = splice(&o(), 1, 3).unwrap();
        assert_eq!((s.chi_ref, s.mn_upper(), s.boundary_components), (0, 0, Some(3)));
        assert_eq!(splice(&o(), 5, 0).unwrap().mn_upper(), 0);
        assert_eq!(splice(&o1(), 1, 0).unwrap().mn_upper(), 2);
        assert!(splice(&o(), 0, 0).is_err());
    }

    #[test]
    fn baskets() {
        assert_eq!(basket(&[-1, -1, -1]).mn_upper(), 0);
        assert_eq!(basket(&[0, 3]).mn_upper(), 4);
        assert_eq!(basket(&[]), o());
        assert!(basket(&[2]).assumptions.iter().any(|a| a == ASSUME_BASKET_M));
    }

    #[test]
    fn parser() {
        for s in [
            "o",
            "msum(u,u,2)",
            "selfindex(msum(u,o1,2))",
            "twist(hopf(+),5)",
            "twist0(hopf(-),-3)",
            "splice(o,2,-1)",
            "basket(0,3,-1)",
            "basket()",
            "torus(2,-3)",
            "annulus(-4)",
            "cut(cut(o))",
        ] {
            let e = parse_expr(s).unwrap();
            assert_eq!(e.to_string(), s);
            assert_eq!(parse_expr(&e.to_string()).unwrap(), e);
        }
        assert_eq!(parse_expr(" msum( u , u , 2 ) ").unwrap().to_string(), "msum(u,u,2)");
        assert!(matches!(parse_expr("msum(u,u)"), Err(CalcError::Syntax { .. })));
        assert!(matches!(parse_expr("msum(u,u,0)"), Err(CalcError::Syntax { .. })));
        assert!(matches!(parse_expr("hopf(x)"), Err(CalcError::Syntax { .. })));
        assert!(matches!(parse_expr("foo(o)"), Err(CalcError::UnknownPrimitive(_))));
        assert!(matches!(parse_expr("o o"), Err(CalcError::Syntax { .. })));
        assert!(matches!(parse_expr("torus(0,3)"), Err(CalcError::InvalidArgument(_))));
        assert_eq!(eval("msum(u,o1,2)").mn_upper(), 4);
    }

    #[test]
    fn summary() {
        let s = summarize(&parse_expr("msum(u,u,2)").unwrap()).unwrap();
        assert_eq!(s.page_chis, vec![-1, 1, -1, 1]);
        assert_eq!((s.small_chi, s.large_chi, s.mn_upper), (1, -3, 4));
        assert_eq!(summarize(&parse_expr("annulus(3)").unwrap()).unwrap().exact_mn, Some(2));
    }
}
