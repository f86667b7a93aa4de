//! Exit criteria. Each prints one PASS/FAIL line; the process fails if any
//! criterion does.

mod common;

use std::time::{Duration, Instant};

use morse_novikov::bounds::{best_double_bound, free_rank_bound, BoundName, KnotInput};
use morse_novikov::braid::parse_braid;
use morse_novikov::calculus::{basket, hopf, msum, self_index, twist_arbitrary, u};
use morse_novikov::milnor::{
    brute_force_oracle, critical_radii, detect_degenerate_locus, milnor_critical_points, morse_report, trace_link,
    SolverConfig, Verdict,
};
use morse_novikov::poly::parse_rational;

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome, u64);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)*) => {
        // a NaN comparison must fail the check, hence the negation
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !$cond {
            return Err(format!($($fmt)*));
        }
    };
}

fn map(text: &str) -> Result<morse_novikov::poly::RationalMap, String> {
    parse_rational(text).map_err(|e| format!("{text}: {e}"))
}

fn single_radius(text: &str, want: f64) -> Outcome {
    let x = critical_radii(&map(text)?, &SolverConfig::default()).map_err(|e| e.to_string())?;
    ensure!(x.radii.len() == 1 && (x.radii[0] - want).abs() < 1e-6, "X({text}) = {:?}, want {{{want}}}", x.radii);
    Ok(())
}

fn criterion_1() -> Outcome {
    let g0 = "z*w/(4*z-1)";
    single_radius(g0, 0.25)?;
    let f = map(g0)?;
    let cfg = SolverConfig::default();
    for r in [0.5, 1.0, 2.0] {
        let pts = milnor_critical_points(&f, r, &cfg).map_err(|e| e.to_string())?;
        ensure!(pts.points.is_empty() && !pts.incomplete, "r = {r}: {} critical points", pts.points.len());
        let oracle = brute_force_oracle(&f, r, &cfg).map_err(|e| e.to_string())?;
        ensure!(oracle.clusters.is_empty(), "r = {r}: oracle found {} clusters", oracle.clusters.len());
    }
    Ok(())
}

fn criterion_2() -> Outcome {
    let text = "4*w+3*(w^2+z^2)";
    single_radius(text, 4.0 / 3.0)?;
    let f = map(text)?;
    let cfg = SolverConfig::default();
    let pts = milnor_critical_points(&f, 1.0, &cfg).map_err(|e| e.to_string())?.points;
    ensure!(pts.len() == 2, "r = 1: {} critical points, want 2", pts.len());
    for p in &pts {
        let w = p.point.w;
        ensure!(p.point.z.norm() < 1e-6, "z = {} is not 0", p.point.z);
        ensure!((w.norm() - 1.0).abs() < 1e-6, "|w| = {}", w.norm());
        ensure!(((w + 1.0).norm() - 1.0 / 3.0).abs() < 1e-6, "|w + 1| = {}", (w + 1.0).norm());
    }
    let mut idx: Vec<Option<u8>> = pts.iter().map(|p| p.index).collect();
    idx.sort();
    ensure!(idx == [Some(1), Some(2)], "indices {idx:?}");

    // the circle {Re z = 0, Re w = -1/3} on the sphere of radius 2/3
    let r = 2.0 / 3.0;
    let loci = detect_degenerate_locus(&f, r, &cfg).map_err(|e| e.to_string())?;
    let want_radius = (r * r - 1.0 / 9.0f64).sqrt();
    let fits = loci.iter().any(|c| {
        let centre = c.center.to_real();
        let centre_ok = (centre[0].powi(2) + centre[1].powi(2) + (centre[2] + 1.0 / 3.0).powi(2) + centre[3].powi(2))
            .sqrt()
            < 1e-4;
        // the plane is spanned by Im z and Im w
        let plane_ok = c.axes.iter().all(|a| a[0].abs() < 1e-4 && a[2].abs() < 1e-4);
        centre_ok && plane_ok && (c.radius - want_radius).abs() < 1e-4 && c.residual < 1e-4
    });
    ensure!(fits, "r = 2/3: no degenerate circle {{Re z = 0, Re w = -1/3}} among {} fitted loci", loci.len());
    Ok(())
}

fn criterion_3() -> Outcome {
    let cfg = SolverConfig { oracle: true, ..Default::default() };
    let rep = morse_report(&map("(z^2+w^2)/(z^2-w^2)")?, 1.0, &cfg).map_err(|e| e.to_string())?;
    let c = rep.index_counts();
    let oracle = rep.oracle.as_ref().map_or(0, |o| o.clusters.len());
    ensure!(
        rep.verdict == Verdict::Morse,
        "verdict {} ({} points, {} degenerate, {} loci)",
        rep.verdict,
        rep.critical_points.len(),
        rep.critical_points.iter().filter(|p| p.degenerate).count(),
        rep.degenerate_loci.len()
    );
    ensure!(!rep.critical_points.is_empty(), "no critical points");
    ensure!(c[1] == c[2], "index counts {c:?}");
    ensure!(oracle == rep.critical_points.len(), "{oracle} oracle clusters vs {} Newton points", rep.critical_points.len());
    Ok(())
}

fn criterion_4() -> Outcome {
    let cfg = SolverConfig { oracle: true, ..Default::default() };
    let mut maps = vec!["z/w".to_string()];
    for p in 1..=3 {
        for q in 1..=3 {
            maps.push(format!("{p}*z^{p}+{q}*w^{q}"));
        }
    }
    for text in &maps {
        let rep = morse_report(&map(text)?, 1.0, &cfg).map_err(|e| format!("{text}: {e}"))?;
        ensure!(rep.verdict == Verdict::Fibration, "{text}: verdict {} {:?}", rep.verdict, rep.warnings);
    }
    Ok(())
}

fn criterion_5() -> Outcome {
    let cfg = SolverConfig::default();
    for (text, want) in [("z*w/(4*z-1)", 3), ("2*z^2+2*w^2", 2), ("w", 1)] {
        let t = trace_link(&map(text)?, 1.0, &cfg).map_err(|e| e.to_string())?;
        ensure!(t.components == want && !t.incomplete, "{text}: {} components (incomplete {})", t.components, t.incomplete);
    }
    Ok(())
}

fn criterion_6() -> Outcome {
    let rep = morse_report(&map("1-z^2+3*z^6+(0.01*w)^3-3*0.01*w")?, 1.0, &SolverConfig::default())
        .map_err(|e| e.to_string())?;
    ensure!(rep.critical_points.len() >= 2, "{} critical points", rep.critical_points.len());
    Ok(())
}

fn criterion_7() -> Outcome {
    ensure!(u().mn_upper() == 2, "mn_upper(u) = {}", u().mn_upper());
    let uu = msum(&u(), &u(), 2).map_err(|e| e.to_string())?;
    let mut pages = uu.page_chis();
    pages.sort();
    ensure!(uu.mn_upper() == 4 && pages == [-1, -1, 1, 1], "u*u: mn {} pages {pages:?}", uu.mn_upper());
    let s = self_index(&uu);
    ensure!((s.small_chi(), s.large_chi()) == (1, -3), "self-indexed u*u: {} / {}", s.small_chi(), s.large_chi());
    ensure!(basket(&[0, 3]).mn_upper() == 4, "basket(0,3)");
    ensure!(basket(&[-1, -1, -1]).mn_upper() == 0, "basket(-1,-1,-1)");
    for k in -5..=5 {
        ensure!(twist_arbitrary(&hopf(true), k).mn_upper() == 2, "twist(hopf(+), {k})");
    }
    Ok(())
}

fn criterion_8() -> Outcome {
    let input = KnotInput::new(parse_braid("2: 1 1 1").map_err(|e| e.to_string())?);
    let free = free_rank_bound(&input).map_err(|e| e.to_string())?;
    ensure!(free.value == 4, "free rank bound {}", free.value);
    let t = best_double_bound(&input).map_err(|e| e.to_string())?;
    let value = |n: BoundName| t.table.iter().find(|c| c.name == n).map(|c| c.value);
    ensure!(value(BoundName::BraidIndexDouble) == Some(6), "braid index {:?}", value(BoundName::BraidIndexDouble));
    ensure!(value(BoundName::CrossingDouble) == Some(10), "crossing {:?}", value(BoundName::CrossingDouble));
    ensure!(value(BoundName::WrappingDouble) == Some(10), "wrapping {:?}", value(BoundName::WrappingDouble));
    ensure!(t.best.value == 6, "best {}", t.best.value);
    for c in std::iter::once(&free).chain(&t.table) {
        let n = c.evaluate_tree().map_err(|e| e.to_string())?;
        ensure!(n as u64 == c.value, "{}: tree {} gives {n}", c.name, c.tree);
    }
    Ok(())
}

fn criterion_9() -> Outcome {
    for (name, suite) in common::suites() {
        suite().map_err(|e| format!("{name}: {e}"))?;
    }
    Ok(())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("G0 critical radii and empty critical sets", criterion_1, 5),
        ("4w+3(w^2+z^2) radii, points and degenerate circle", criterion_2, 10),
        ("(z^2+w^2)/(z^2-w^2) is Morse", criterion_3, 10),
        ("z/w and F_{p,q} fiber", criterion_4, 5),
        ("link component counts", criterion_5, 10),
        ("non-solvable example has critical points", criterion_6, 10),
        ("calculus regressions", criterion_7, 1),
        ("trefoil bound table", criterion_8, 1),
        ("property suites", criterion_9, 20),
    ];
    let mut failed = 0;
    for (k, (name, check, budget)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = check();
        let took = t.elapsed();
        let outcome = outcome.and_then(|()| {
            if took > Duration::from_secs(*budget) {
                Err(format!("took {took:.2?}, budget {budget} s"))
            } else {
                Ok(())
            }
        });
        match outcome {
            Ok(()) => println!("criterion {}: PASS  {name} [{took:.2?}]", k + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} [{took:.2?}]: {e}", k + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
