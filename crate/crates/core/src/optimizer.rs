//! Exhaustive grid search over the scaling parameter `alpha`.
//!
//! The family is piecewise constant in `alpha`: each matrix entry only changes
//! where `alpha · |D·T|_{kn}` crosses a half-integer. The grid walk merges runs
//! of identical matrices into candidates, scores each distinct matrix once,
//! and marks Pareto dominance under simultaneous maximization of coding gain
//! and transform efficiency.

use std::collections::HashMap;

use num_rational::Ratio;
use serde::Serialize;

use crate::approx::{LowComplexityMatrix, ParametricFamily, ScaledApproximation, ALPHA_MAX};
use crate::error::{domain, Error, Result};
use crate::exec::Execution;
use crate::metrics::{coding_gain, transform_efficiency, MarkovModel};
use crate::transform::TchebichefBasis;

/// Snap a grid value to 12 decimals so decimal steps land on their
/// intended values (e.g. exactly 1.5).
fn snap(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Candidate {
    pub matrix: LowComplexityMatrix,
    /// First grid point producing this matrix.
    pub alpha_low: f64,
    /// First grid point after the run (exclusive).
    pub alpha_high: f64,
    /// Exact breakpoints `[low, high)` when refined.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_interval: Option<(String, String)>,
    pub coding_gain_db: f64,
    pub transform_efficiency: f64,
    pub dominated: bool,
}

impl Candidate {
    pub fn contains(&self, alpha: f64) -> bool {
        self.alpha_low <= alpha && alpha < self.alpha_high
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SearchGrid {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl SearchGrid {
    /// `0.001, 0.002, …, 2.499`.
    pub fn standard() -> Self {
        Self {
            min: 0.001,
            max: 2.499,
            step: 0.001,
        }
    }

    fn validate(&self) -> Result<usize> {
        if !(self.min > 0.0 && self.min <= self.max && self.max < ALPHA_MAX) {
            return Err(domain(format!(
                "grid [{}, {}] must satisfy 0 < min <= max < 5/2",
                self.min, self.max
            )));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(domain(format!("grid step {} must be positive", self.step)));
        }
        let count = ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1;
        if count == 0 {
            return Err(Error::Empty("alpha grid"));
        }
        Ok(count)
    }

    pub fn point(&self, i: usize) -> f64 {
        snap(self.min + i as f64 * self.step)
    }
}

/// Walks the grid and returns one candidate per run of identical,
/// non-degenerate matrices, with dominance already marked.
pub fn enumerate_candidates(
    size: usize,
    grid: SearchGrid,
    rho: f64,
    exec: Execution,
) -> Result<Vec<Candidate>> {
    let count = grid.validate()?;
    let family = ParametricFamily::new(size)?;
    let model = MarkovModel::new(size, rho)?;

    let matrices = exec
        .map_range(count, |i| family.at(grid.point(i)))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    // runs of identical matrices, in grid order
    let mut runs: Vec<(usize, usize)> = Vec::new();
    for i in 0..count {
        if matrices[i].is_degenerate() {
            continue;
        }
        match runs.last_mut() {
            Some((_, end)) if *end == i && matrices[i] == matrices[i - 1] => *end = i + 1,
            _ => runs.push((i, i + 1)),
        }
    }

    // score each distinct matrix once
    let mut distinct: Vec<&LowComplexityMatrix> = Vec::new();
    let mut index: HashMap<&LowComplexityMatrix, usize> = HashMap::new();
    for &(start, _) in &runs {
        let m = &matrices[start];
        if !index.contains_key(m) {
            index.insert(m, distinct.len());
            distinct.push(m);
        }
    }
    let scores = exec
        .map_slice(&distinct, |m| -> Result<(f64, f64)> {
            let dense = ScaledApproximation::new((*m).clone())?.dense();
            Ok((
                coding_gain(&dense, &model)?,
                transform_efficiency(&dense, &model)?,
            ))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let mut candidates: Vec<Candidate> = runs
        .iter()
        .map(|&(start, end)| {
            let (cg, eta) = scores[index[&matrices[start]]];
            Candidate {
                matrix: matrices[start].clone(),
                alpha_low: grid.point(start),
                alpha_high: grid.point(end),
                exact_interval: None,
                coding_gain_db: cg,
                transform_efficiency: eta,
                dominated: false,
            }
        })
        .collect();
    mark_dominated(&mut candidates);
    Ok(candidates)
}

fn dominates(a: &Candidate, b: &Candidate) -> bool {
    a.coding_gain_db >= b.coding_gain_db
        && a.transform_efficiency >= b.transform_efficiency
        && (a.coding_gain_db > b.coding_gain_db || a.transform_efficiency > b.transform_efficiency)
}

fn mark_dominated(candidates: &mut [Candidate]) {
    let flags: Vec<bool> = candidates
        .iter()
        .map(|c| candidates.iter().any(|o| dominates(o, c)))
        .collect();
    for (c, d) in candidates.iter_mut().zip(flags) {
        c.dominated = d;
    }
}

/// Non-dominated candidates sorted by coding gain, highest first.
pub fn pareto_select(candidates: &[Candidate]) -> Result<Vec<Candidate>> {
    if candidates.is_empty() {
        return Err(Error::Empty("candidate list"));
    }
    let mut front: Vec<Candidate> = candidates
        .iter()
        .filter(|c| !candidates.iter().any(|o| dominates(o, c)))
        .cloned()
        .map(|mut c| {
            c.dominated = false;
            c
        })
        .collect();
    front.sort_by(|a, b| {
        b.coding_gain_db
            .total_cmp(&a.coding_gain_db)
            .then(a.alpha_low.total_cmp(&b.alpha_low))
    });
    Ok(front)
}

/// Every `alpha` in `(0, 5/2)` at which some entry of the family changes:
/// `(m + 1/2) · peak_k / |t_k[n]|`, sorted and deduplicated.
pub fn exact_breakpoints(size: usize) -> Result<Vec<Ratio<i64>>> {
    ParametricFamily::new(size)?;
    let basis = TchebichefBasis::new(size)?;
    let limit = Ratio::new(5, 2);
    let mut points = Vec::new();
    for k in 0..size {
        let row: Vec<i64> = basis
            .values()
            .row(k)
            .iter()
            .map(|v| v.round() as i64)
            .collect();
        let peak = row.iter().map(|v| v.abs()).max().unwrap_or(0);
        for &t in row.iter().filter(|&&t| t != 0) {
            for m in 0.. {
                let b = Ratio::new((2 * m + 1) * peak, 2 * t.abs());
                if b >= limit {
                    break;
                }
                points.push(b);
            }
        }
    }
    points.sort();
    points.dedup();
    Ok(points)
}

fn ratio_f64(r: &Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Replaces grid-resolved endpoints with the exact breakpoints enclosing
/// each run: the largest breakpoint at or below its first grid point and the
/// smallest one above its last grid point (0 and 5/2 at the ends).
pub fn refine_exact(size: usize, grid: SearchGrid, candidates: &mut [Candidate]) -> Result<()> {
    let points = exact_breakpoints(size)?;
    for c in candidates.iter_mut() {
        let last = snap(c.alpha_high - grid.step);
        let low = points
            .iter()
            .rev()
            .find(|b| ratio_f64(b) <= c.alpha_low)
            .copied()
            .unwrap_or_else(|| Ratio::from_integer(0));
        let high = points
            .iter()
            .find(|b| ratio_f64(b) > last)
            .copied()
            .unwrap_or_else(|| Ratio::new(5, 2));
        c.exact_interval = Some((low.to_string(), high.to_string()));
    }
    Ok(())
}

/// CSV, one row per candidate.
pub fn candidates_csv(candidates: &[Candidate], precision: Option<usize>) -> String {
    let fmt = |v: f64| match precision {
        Some(p) => format!("{v:.p$}"),
        None => format!("{v}"),
    };
    let refined = candidates.iter().any(|c| c.exact_interval.is_some());
    let mut out =
        String::from("alpha_low,alpha_high,coding_gain_db,transform_efficiency,dominated,matrix");
    if refined {
        out.push_str(",exact_low,exact_high");
    }
    out.push('\n');
    for c in candidates {
        let matrix = serde_json::to_string(&c.matrix).expect("integers serialize");
        out.push_str(&format!(
            "{},{},{},{},{},\"{}\"",
            fmt(c.alpha_low),
            fmt(c.alpha_high),
            fmt(c.coding_gain_db),
            fmt(c.transform_efficiency),
            c.dominated,
            matrix
        ));
        if let Some((lo, hi)) = &c.exact_interval {
            out.push_str(&format!(",{lo},{hi}"));
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct FrontSummary {
    pub size: usize,
    pub correlation: f64,
    pub candidates: usize,
    pub unique_winner: bool,
    /// Index into `front` of the member containing `alpha = 2`, if any.
    pub alpha_two_member: Option<usize>,
    pub front: Vec<Candidate>,
}

pub fn front_summary(size: usize, rho: f64, candidates: &[Candidate]) -> Result<FrontSummary> {
    let front = pareto_select(candidates)?;
    Ok(FrontSummary {
        size,
        correlation: rho,
        candidates: candidates.len(),
        unique_winner: front.len() == 1,
        alpha_two_member: front.iter().position(|c| c.contains(2.0)),
        front,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cand(cg: f64, eta: f64) -> Candidate {
        Candidate {
            matrix: LowComplexityMatrix::identity(2),
            alpha_low: cg,
            alpha_high: cg + 0.1,
            exact_interval: None,
            coding_gain_db: cg,
            transform_efficiency: eta,
            dominated: false,
        }
    }

    #[test]
    fn single_candidate_front() {
        let front = pareto_select(&[cand(1.0, 2.0)]).unwrap();
        assert_eq!(front.len(), 1);
        assert!(!front[0].dominated);
    }

    #[test]
    fn dominated_candidate_dropped() {
        let front = pareto_select(&[cand(1.0, 2.0), cand(2.0, 3.0)]).unwrap();
        assert_eq!(front.len(), 1);
        assert_eq!(front[0].coding_gain_db, 2.0);
    }

    #[test]
    fn trade_off_keeps_both_sorted() {
        let front = pareto_select(&[cand(1.0, 3.0), cand(2.0, 1.0)]).unwrap();
        assert_eq!(front.len(), 2);
        assert_eq!(front[0].coding_gain_db, 2.0);
    }

    #[test]
    fn empty_inputs() {
        assert!(pareto_select(&[]).is_err());
        let bad = SearchGrid {
            min: 0.0,
            max: 1.0,
            step: 0.1,
        };
        assert!(enumerate_candidates(8, bad, 0.95, Execution::Sequential).is_err());
        let inverted = SearchGrid {
            min: 1.0,
            max: 0.5,
            step: 0.1,
        };
        assert!(enumerate_candidates(8, inverted, 0.95, Execution::Sequential).is_err());
    }

    #[test]
    fn all_degenerate_range_is_empty() {
        let grid = SearchGrid {
            min: 0.001,
            max: 0.3,
            step: 0.001,
        };
        assert!(enumerate_candidates(8, grid, 0.95, Execution::Sequential)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn grid_points_are_snapped() {
        let g = SearchGrid::standard();
        assert_eq!(g.point(1499), 1.5);
        assert_eq!(g.point(0), 0.001);
        assert_eq!(g.validate().unwrap(), 2499);
    }

    #[test]
    fn breakpoints_include_known_boundaries() {
        let b8 = exact_breakpoints(8).unwrap();
        assert!(b8.contains(&Ratio::new(23, 14)));
        assert!(b8.contains(&Ratio::new(69, 34)));
        let b4 = exact_breakpoints(4).unwrap();
        assert!(b4.contains(&Ratio::new(3, 2)));
        assert!(b4.iter().all(|b| *b < Ratio::new(5, 2)));
    }
}
