//! Printed closed forms versus oracle sums over a parameter grid.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::{criterion_all, Corollary, CriterionId, SpiralClassParams};
use crate::error::Result;
use crate::series::{PascalParams, RTauParams};

pub const DEFAULT_THRESHOLD: f64 = 1e-6;

/// Full grid of criterion parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionGrid {
    pub m: Vec<f64>,
    pub q: Vec<f64>,
    pub xi: Vec<f64>,
    pub gamma: Vec<f64>,
    pub rho: Vec<f64>,
}

impl Default for CriterionGrid {
    fn default() -> Self {
        let mut q = vec![0.05];
        q.extend((1..=9).map(|k| k as f64 / 10.0));
        Self {
            m: vec![1.0, 1.5, 2.0, 3.0, 5.0, 10.0],
            q,
            xi: vec![0.0, PI / 6.0, PI / 3.0],
            gamma: vec![0.0, 0.25, 0.5, 0.75],
            rho: vec![0.0, 0.3, 0.6],
        }
    }
}

impl CriterionGrid {
    /// Every `(p, c)` pair in lexicographic grid order.
    pub fn points(&self) -> Result<Vec<(PascalParams, SpiralClassParams)>> {
        let mut out = Vec::new();
        for &m in &self.m {
            for &q in &self.q {
                let p = PascalParams::new(m, q)?;
                for &xi in &self.xi {
                    for &gamma in &self.gamma {
                        for &rho in &self.rho {
                            out.push((p, SpiralClassParams::new(xi, gamma, rho)?));
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// The ρ = 0 slice, used for the corollaries.
    pub fn without_rho(&self) -> Self {
        Self { rho: vec![0.0], ..self.clone() }
    }
}

/// R^τ parameters used when none are given: τ = 1, ϑ = 1, δ = 1/2.
pub fn default_rtau() -> RTauParams {
    RTauParams::new(Complex64::new(1.0, 0.0), 1.0, 0.5).expect("valid constants")
}

/// A theorem or one of its ρ = 0 corollaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Subject {
    Theorem(CriterionId),
    Corollary(Corollary),
}

impl Subject {
    pub fn label(&self) -> &'static str {
        match self {
            Subject::Theorem(id) => id.label(),
            Subject::Corollary(c) => c.label(),
        }
    }

    pub fn all() -> Vec<Subject> {
        CriterionId::ALL
            .into_iter()
            .map(Subject::Theorem)
            .chain(Corollary::ALL.into_iter().map(Subject::Corollary))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyRow {
    pub subject: Subject,
    pub m: f64,
    pub q: f64,
    pub xi: f64,
    pub gamma: f64,
    pub rho: f64,
    pub paper_lhs: f64,
    pub rederived_lhs: f64,
    pub direct_lhs: f64,
    pub paper_gap: f64,
    pub rederived_gap: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubjectSummary {
    pub subject: Subject,
    pub points: usize,
    pub flagged: usize,
    pub max_paper_gap: f64,
    pub max_rederived_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyReport {
    pub rtau: RTauParams,
    pub threshold: f64,
    pub summaries: Vec<SubjectSummary>,
    /// Only rows whose printed form misses the direct sum by more than the
    /// threshold (relative to `max(1, |direct|)`).
    pub flagged_rows: Vec<DiscrepancyRow>,
}

fn subject_rows(subject: Subject, grid: &CriterionGrid, r: &RTauParams, threshold: f64) -> Result<Vec<DiscrepancyRow>> {
    let (id, grid) = match subject {
        Subject::Theorem(id) => (id, grid.clone()),
        Subject::Corollary(c) => (c.criterion(), grid.without_rho()),
    };
    grid.points()?
        .into_par_iter()
        .map(|(p, c)| {
            let set = criterion_all(id, &p, &c, Some(r))?;
            let scale = set.direct.lhs.abs().max(1.0);
            let paper_gap = (set.paper.lhs - set.direct.lhs).abs();
            Ok(DiscrepancyRow {
                subject,
                m: p.m(),
                q: p.q(),
                xi: c.xi(),
                gamma: c.gamma(),
                rho: c.rho(),
                paper_lhs: set.paper.lhs,
                rederived_lhs: set.rederived.lhs,
                direct_lhs: set.direct.lhs,
                paper_gap,
                rederived_gap: (set.rederived.lhs - set.direct.lhs).abs(),
                flagged: paper_gap > threshold * scale,
            })
        })
        .collect()
}

pub fn discrepancy_report(grid: &CriterionGrid, r: &RTauParams, threshold: f64) -> Result<DiscrepancyReport> {
    let mut summaries = Vec::new();
    let mut flagged_rows = Vec::new();
    for subject in Subject::all() {
        let rows = subject_rows(subject, grid, r, threshold)?;
        summaries.push(SubjectSummary {
            subject,
            points: rows.len(),
            flagged: rows.iter().filter(|row| row.flagged).count(),
            max_paper_gap: rows.iter().map(|row| row.paper_gap).fold(0.0, f64::max),
            max_rederived_gap: rows.iter().map(|row| row.rederived_gap).fold(0.0, f64::max),
        });
        flagged_rows.extend(rows.into_iter().filter(|row| row.flagged));
    }
    Ok(DiscrepancyReport { rtau: *r, threshold, summaries, flagged_rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_size() {
        let g = CriterionGrid::default();
        assert_eq!(g.points().unwrap().len(), 6 * 10 * 3 * 4 * 3);
        assert_eq!(g.without_rho().points().unwrap().len(), 6 * 10 * 3 * 4);
    }

    #[test]
    fn small_grid_flags_only_convex_printed_forms() {
        let grid = CriterionGrid {
            m: vec![1.0, 2.0],
            q: vec![0.1, 0.5],
            xi: vec![0.0, 0.5],
            gamma: vec![0.0, 0.5],
            rho: vec![0.0, 0.3],
        };
        let report = discrepancy_report(&grid, &default_rtau(), DEFAULT_THRESHOLD).unwrap();
        for s in &report.summaries {
            let expect_flags = matches!(s.subject.label(), "thm2" | "thm4" | "cor2" | "cor4");
            assert_eq!(s.flagged > 0, expect_flags, "{}", s.subject.label());
        }
        assert!(report.flagged_rows.iter().all(|r| r.flagged));
    }
}
