//! Randomized property suites shared by the property tests and the
//! acceptance run.
#![allow(dead_code)]

use morse_novikov::bounds::{
    best_double_bound, braid_index_double_bound, crossing_double_bound, free_rank_bound, wrapping_double_bound,
    KnotInput,
};
use morse_novikov::braid::{bennequin_invariants, closure_components, greedy_destabilize, BraidWord};
use morse_novikov::calculus::{cut, msum, self_index, splice, twist0, twist_arbitrary, Expr, MorseModel, Sign};
use morse_novikov::milnor::{dependence_residual, milnor_critical_points, morse_report, SolverConfig};
use morse_novikov::poly::{CPoint, CPoly2, RationalMap, C64};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

pub const CASES: u32 = 256;

fn runner() -> TestRunner {
    let config = Config { cases: CASES, max_global_rejects: 20 * CASES, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn run<S: Strategy>(strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String> {
    runner().run(&strategy, test).map_err(|e| e.to_string())
}

fn poly() -> impl Strategy<Value = CPoly2> {
    prop::collection::vec((0u32..=3, 0u32..=3, -3i32..=3, -2i32..=2), 1..=4).prop_map(|ts| {
        CPoly2::from_terms(ts.into_iter().map(|(a, b, re, im)| (a, b, C64::new(re as f64, im as f64))))
    })
}

fn rational() -> impl Strategy<Value = RationalMap> {
    (poly(), prop::option::of(poly())).prop_filter_map("constant or invalid map", |(p, q)| {
        let q = q.unwrap_or_else(|| CPoly2::constant(C64::new(1.0, 0.0)));
        RationalMap::new(p, q).ok()
    })
}

fn point(span: f64) -> impl Strategy<Value = CPoint> {
    prop::array::uniform4(-span..span).prop_map(CPoint::from_real)
}

/// `d/dx` of `F` along the real coordinate `c`, Richardson-extrapolated
/// central differences.
fn partial(f: &RationalMap, p: CPoint, c: usize, h: f64) -> Option<C64> {
    let at = |s: f64| {
        let mut x = p.to_real();
        x[c] += s;
        let y = CPoint::from_real(x);
        let q = f.denominator().eval(y);
        (q.norm() > 0.0).then(|| f.numerator().eval(y) / q)
    };
    let d = |h: f64| Some((at(h)? - at(-h)?) / (2.0 * h));
    Some((d(h / 2.0)? * 4.0 - d(h)?) / 3.0)
}

pub fn wirtinger_matches_differences() -> Result<(), String> {
    run((rational(), point(1.5)), |(f, p)| {
        let q = f.denominator();
        prop_assume!(q.eval(p).norm() > 1e-2 * q.abs_eval(p).max(1.0));
        let (fz, fw) = f.wirtinger_grad(p).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let scale = (fz.norm_sqr() + fw.norm_sqr()).sqrt();
        let value = (f.numerator().eval(p) / q.eval(p)).norm();
        prop_assume!(scale > 1e-6 * (1.0 + value));
        // stay well inside the distance to the nearest pole
        let jq = q.jet(p);
        let reach = jq.v.norm() / (jq.dz.norm_sqr() + jq.dw.norm_sqr()).sqrt().max(1e-300);
        let h = 1e-3 * (1.0 + p.norm()).min(reach);
        let i = C64::new(0.0, 1.0);
        let want = [fz, i * fz, fw, i * fw];
        for (c, want) in want.into_iter().enumerate() {
            let got = partial(&f, p, c, h).ok_or_else(|| TestCaseError::reject("stencil hit a pole"))?;
            let err = (got - want).norm() / scale;
            prop_assert!(err < 1e-6, "coordinate {c}: {got} vs {want} (rel {err:e})");
        }
        Ok(())
    })
}

pub fn critical_points_are_valid() -> Result<(), String> {
    run((rational(), 0.4f64..2.0), |(f, r)| {
        let cfg = SolverConfig { seed_count: 24, ..Default::default() };
        let Ok(s) = milnor_critical_points(&f, r, &cfg) else {
            return Err(TestCaseError::reject("repeated factor or irregular radius"));
        };
        for p in &s.points {
            prop_assert!((p.point.norm() - r).abs() <= 1e-9 * r, "off sphere: {:?}", p.point);
            prop_assert!(p.residual <= cfg.newton_tol);
            let dep = dependence_residual(&f, p.point).unwrap_or(f64::INFINITY);
            prop_assert!(dep < 1e-8, "dependence residual {dep:e}");
            prop_assert!((0.0..std::f64::consts::TAU).contains(&p.theta));
            if p.degenerate {
                prop_assert!(p.index.is_none());
            }
            if let Some(i) = p.index {
                let neg = p.hessian_eigenvalues.iter().filter(|e| **e < 0.0).count();
                prop_assert_eq!(i as usize, neg);
            }
        }
        Ok(())
    })
}

pub fn reports_are_deterministic() -> Result<(), String> {
    run((rational(), 0.4f64..2.0, any::<u64>()), |(f, r, seed)| {
        let cfg = SolverConfig { seed_count: 16, rng_seed: seed, assume_squarefree: true, ..Default::default() };
        let a = morse_report(&f, r, &cfg).map(|x| format!("{x:?}")).map_err(|e| e.to_string());
        let b = morse_report(&f, r, &cfg).map(|x| format!("{x:?}")).map_err(|e| e.to_string());
        prop_assert_eq!(a, b);
        Ok(())
    })
}

pub fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        Just(Expr::O),
        Just(Expr::O1),
        Just(Expr::U),
        any::<bool>().prop_map(|positive| Expr::Hopf { positive }),
        (1i64..5, prop_oneof![-5i64..=-1, 1i64..=5]).prop_map(|(p, q)| Expr::Torus { p, q }),
        (-3i64..=3).prop_map(|k| Expr::Annulus { k }),
        prop::collection::vec(-3i64..=3, 0..4).prop_map(|ks| Expr::Basket { ks }),
    ];
    leaf.prop_recursive(6, 20, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone(), 1u32..4).prop_map(|(a, b, n)| Expr::Msum {
                f0: Box::new(a),
                f1: Box::new(b),
                n
            }),
            inner.clone().prop_map(|f| Expr::SelfIndex { f: Box::new(f) }),
            (inner.clone(), -4i64..=4).prop_map(|(f, n)| Expr::Twist0 { f: Box::new(f), n }),
            (inner.clone(), -4i64..=4).prop_map(|(f, n)| Expr::Twist { f: Box::new(f), n }),
            inner.clone().prop_map(|f| Expr::Cut { f: Box::new(f) }),
            (inner, 1u32..4, -3i64..=3).prop_map(|(f, n, k)| Expr::Splice { f: Box::new(f), n, k }),
        ]
    })
}

fn model(e: &Expr) -> Result<MorseModel, TestCaseError> {
    e.evaluate().map_err(|err| TestCaseError::fail(format!("{e}: {err}")))
}

pub fn words_stay_balanced() -> Result<(), String> {
    run(expr(), |e| {
        let m = model(&e)?;
        prop_assert!(m.is_balanced(), "{e}: {:?}", m.word);
        prop_assert_eq!(m.mn_upper() % 2, 0);
        let chis = m.page_chis();
        prop_assert_eq!(chis.len(), m.word.len().max(1));
        // walking once around returns to the basepoint page
        let end = m.chi_ref + m.word.iter().map(|s| s.chi_step()).sum::<i64>();
        prop_assert_eq!(end, m.chi_ref);
        let s = self_index(&m);
        prop_assert_eq!(s.mn_upper(), m.mn_upper());
        prop_assert_eq!(s.small_chi() - s.large_chi(), m.mn_upper() as i64);
        Ok(())
    })
}

pub fn msum_adds_critical_points() -> Result<(), String> {
    run((expr(), expr(), 1u32..5), |(a, b, n)| {
        let (fa, fb) = (model(&a)?, model(&b)?);
        let m = msum(&fa, &fb, n).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(m.mn_upper(), fa.mn_upper() + fb.mn_upper());
        prop_assert_eq!(m.chi_ref, fa.chi_ref + fb.chi_ref - 1);
        Ok(())
    })
}

pub fn twist_and_splice_keep_the_word() -> Result<(), String> {
    run((expr(), -6i64..=6, 1u32..5, -3i64..=3), |(e, t, n, k)| {
        let f = model(&e)?;
        let a = twist0(&f, t);
        prop_assert_eq!(&a.word, &f.word);
        prop_assert_eq!(a.chi_ref, f.chi_ref);
        let b = splice(&f, n, k).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(&b.word, &f.word);
        prop_assert_eq!(b.chi_ref, f.chi_ref - n as i64);
        Ok(())
    })
}

pub fn cut_adds_one_pair() -> Result<(), String> {
    run((expr(), -6i64..=6), |(e, t)| {
        let f = model(&e)?;
        for g in [cut(&f), twist_arbitrary(&f, t)] {
            prop_assert_eq!(g.count(Sign::Minus), f.count(Sign::Minus) + 1);
            prop_assert_eq!(g.count(Sign::Plus), f.count(Sign::Plus) + 1);
            prop_assert_eq!(&g.word[2..], &f.word[..]);
        }
        // the arc across u's plus letter carries the cut page
        let c = cut(&f);
        prop_assert_eq!(c.page_chis()[1], f.chi_ref + 1);
        Ok(())
    })
}

pub fn braid() -> impl Strategy<Value = BraidWord> {
    (1usize..=5)
        .prop_flat_map(|n| {
            let letter = if n == 1 {
                Just(vec![]).boxed()
            } else {
                let m = (n - 1) as i32;
                prop::collection::vec(prop_oneof![-m..=-1, 1..=m], 0..=12).boxed()
            };
            (Just(n), letter)
        })
        .prop_map(|(n, letters)| BraidWord::new(n, letters).expect("letters in range"))
}

pub fn reduction_is_sound() -> Result<(), String> {
    run(braid(), |b| {
        let r = greedy_destabilize(&b);
        prop_assert!(r.strands <= b.strands && r.letters.len() <= b.letters.len());
        prop_assert_eq!(greedy_destabilize(&r), r.clone());
        prop_assert_eq!(closure_components(&r), closure_components(&b));
        let inv = bennequin_invariants(&b);
        prop_assert_eq!(inv.bennequin_chi + inv.crossing_count as i64, inv.strand_count as i64);
        if inv.connected_surface {
            prop_assert_eq!(inv.free_rank_upper as i64, 1 - inv.bennequin_chi);
        }
        Ok(())
    })
}

pub fn certificates_reevaluate() -> Result<(), String> {
    run((braid(), -3i64..=3, any::<bool>()), |(b, m, sign)| {
        let mut input = KnotInput::new(b);
        input.double_twist = m;
        input.clasp_positive = sign;
        let mut certs = Vec::new();
        if let Ok(c) = free_rank_bound(&input) {
            certs.push(c);
        }
        if let Ok(t) = best_double_bound(&input) {
            prop_assert!(t.table.iter().all(|c| c.value >= t.best.value));
            certs.extend(t.table);
        }
        for c in certs {
            prop_assert_eq!(c.value % 2, 0);
            let n = c.evaluate_tree().map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert_eq!(n as u64, c.value, "{}", c.tree);
        }
        Ok(())
    })
}

pub fn overrides_only_lower() -> Result<(), String> {
    run((braid(), 0u32..6), |(b, v)| {
        let plain = KnotInput::new(b);
        let mut over = plain.clone();
        over.overrides.braid_index = Some(v.max(1));
        over.overrides.crossing_number = Some(v);
        over.overrides.wrapping_genus = Some(v);
        over.overrides.layered_wrapping_genus = Some(v);
        over.overrides.free_rank = Some(v);
        let pairs = [
            (free_rank_bound(&plain).map(|c| c.value), free_rank_bound(&over).map(|c| c.value)),
            (braid_index_double_bound(&plain).map(|c| c.value), braid_index_double_bound(&over).map(|c| c.value)),
            (wrapping_double_bound(&plain).map(|c| c.value), wrapping_double_bound(&over).map(|c| c.value)),
            (crossing_double_bound(&plain).map(|c| c.value), crossing_double_bound(&over).map(|c| c.value)),
        ];
        for (a, b) in pairs {
            if let (Ok(a), Ok(b)) = (a, b) {
                prop_assert!(b <= a);
            }
        }
        Ok(())
    })
}

/// All suites, in the order the acceptance run reports them.
pub type Suite = (&'static str, fn() -> Result<(), String>);

pub fn suites() -> Vec<Suite> {
    vec![
        ("wirtinger gradient vs differences", wirtinger_matches_differences),
        ("critical point invariants", critical_points_are_valid),
        ("word balance and chi walk", words_stay_balanced),
        ("msum additivity", msum_adds_critical_points),
        ("twist0/splice keep the word", twist_and_splice_keep_the_word),
        ("cut adds (-,+)", cut_adds_one_pair),
        ("determinism under a fixed seed", reports_are_deterministic),
        ("braid reduction", reduction_is_sound),
        ("certificates re-evaluate", certificates_reevaluate),
        ("overrides only lower", overrides_only_lower),
    ]
}
