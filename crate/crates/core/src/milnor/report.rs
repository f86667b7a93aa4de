use serde::{Deserialize, Serialize};

use super::critical::{search, CriticalPoint};
use super::divisor::critical_radii;
use super::locus::{loci_from_points, FittedCircle};
use super::oracle::{scan, OracleScan};
use super::{check_preconditions, check_regular_radius, MilnorError, SolverConfig};
use crate::poly::RationalMap;

/// Oracle clusters farther than this many cell diameters from every Newton
/// point are unexplained.
const ORACLE_MATCH_CELLS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Fibration,
    Morse,
    Degenerate,
    Incomplete,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Fibration => "fibration",
            Verdict::Morse => "morse",
            Verdict::Degenerate => "degenerate",
            Verdict::Incomplete => "incomplete",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MilnorReport {
    pub radius: f64,
    pub m_of_f: f64,
    pub critical_radii: Vec<f64>,
    pub critical_points: Vec<CriticalPoint>,
    pub degenerate_loci: Vec<FittedCircle>,
    pub verdict: Verdict,
    /// Index-1 count equals index-2 count and every index is 1 or 2.
    pub balance_ok: bool,
    pub oracle_checked: bool,
    pub oracle: Option<OracleScan>,
    /// Every oracle cluster lies near a Newton point.
    pub oracle_consistent: Option<bool>,
    pub converged_seeds: usize,
    pub total_seeds: usize,
    pub warnings: Vec<String>,
}

impl MilnorReport {
    pub fn index_counts(&self) -> [usize; 4] {
        let mut c = [0; 4];
        for p in &self.critical_points {
            if let Some(i) = p.index {
                c[i as usize] += 1;
            }
        }
        c
    }
}

/// Full analysis of the Milnor map on the sphere of radius `r`.
pub fn morse_report(f: &RationalMap, r: f64, cfg: &SolverConfig) -> Result<MilnorReport, MilnorError> {
    check_preconditions(f, cfg)?;
    let trusted = SolverConfig { assume_squarefree: true, ..cfg.clone() };
    let radii = critical_radii(f, &trusted)?;
    check_regular_radius(r, &radii)?;
    let mut warnings = Vec::new();
    if radii.incomplete {
        warnings.push(format!(
            "critical radii search incomplete: {} of {} seeds converged",
            radii.converged_seeds, radii.total_seeds
        ));
    }

    let found = search(f, r, cfg);
    if found.incomplete {
        warnings.push(format!(
            "critical point search incomplete: {} of {} seeds converged, {} unclassified",
            found.converged_seeds, found.total_seeds, found.unclassified
        ));
    }
    let points = found.points;
    let loci = loci_from_points(&points, r);

    let oracle = cfg.oracle.then(|| scan(f, r, cfg.grid_resolution));
    let oracle_consistent = oracle.as_ref().map(|o| {
        o.clusters.iter().all(|c| {
            points.iter().any(|p| p.point.dist(c.center) <= ORACLE_MATCH_CELLS * o.cell_diameter)
        })
    });
    if oracle_consistent == Some(false) {
        warnings.push("oracle found near-critical cells away from every Newton solution".into());
    }

    let mut counts = [0usize; 4];
    for p in &points {
        if let Some(i) = p.index {
            counts[i as usize] += 1;
        }
    }
    let classified = points.iter().all(|p| p.index.is_some());
    let balance_ok = classified && counts[0] == 0 && counts[3] == 0 && counts[1] == counts[2];

    let any_degenerate = points.iter().any(|p| p.degenerate);
    let oracle_empty = oracle.as_ref().is_none_or(|o| o.clusters.is_empty());
    let oracle_matches = oracle.as_ref().is_none_or(|o| o.clusters.len() == points.len()) && oracle_consistent != Some(false);
    let verdict = if any_degenerate {
        Verdict::Degenerate
    } else if found.incomplete {
        Verdict::Incomplete
    } else if points.is_empty() && oracle_empty {
        Verdict::Fibration
    } else if !points.is_empty() && oracle_matches && balance_ok {
        Verdict::Morse
    } else {
        Verdict::Incomplete
    };
    if !points.is_empty() && !any_degenerate && !balance_ok {
        warnings.push(format!("index counts unbalanced: {counts:?}"));
    }

    Ok(MilnorReport {
        radius: r,
        m_of_f: radii.m_of_f,
        critical_radii: radii.radii,
        critical_points: points,
        degenerate_loci: loci,
        verdict,
        balance_ok,
        oracle_checked: oracle.is_some(),
        oracle,
        oracle_consistent,
        converged_seeds: found.converged_seeds,
        total_seeds: found.total_seeds,
        warnings,
    })
}
