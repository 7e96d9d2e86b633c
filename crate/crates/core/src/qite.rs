//! Ancilla-heralded imaginary-time filtering of a phase-estimation result.
//!
//! The ancilla is rotated to `cos(e^{-pτ})|0> + sin(e^{-pτ})|1>` for register
//! value `p`, and the `|1>` branch is kept. Weights use the exact `sin²`, with
//! no small-angle approximation.

use std::collections::HashSet;
use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::export::fmt_float;
use crate::qpe::QpeResult;

/// Relative bracket width at which the threshold bisection stops.
pub const BISECTION_REL_TOL: f64 = 1e-6;

/// `sin²(e^{-pτ})` for every register value.
pub fn heralding_weights(register_size: usize, tau: f64) -> Vec<f64> {
    (0..register_size).map(|p| (-(p as f64) * tau).exp().sin().powi(2)).collect()
}

/// Post-selected state summary at one imaginary time.
#[derive(Clone, Debug, PartialEq)]
pub struct QiteOutcome {
    pub tau: f64,
    pub success_probability: f64,
    pub ground_overlap: f64,
    filter: Vec<f64>,
    register_distribution: Vec<f64>,
}

impl QiteOutcome {
    /// `sin²(e^{-pτ})` indexed by `p`.
    pub fn filter(&self) -> &[f64] {
        &self.filter
    }

    /// Register distribution after keeping the ancilla `|1>` branch.
    pub fn register_distribution(&self) -> &[f64] {
        &self.register_distribution
    }

    /// Post-selected joint weight of `(state, p)`; zero if the branch is empty.
    pub fn postselected_weight(&self, qpe: &QpeResult, state: u64, p: usize) -> f64 {
        if self.success_probability == 0.0 {
            return 0.0;
        }
        qpe.joint_weight(state, p) * self.filter[p] / self.success_probability
    }
}

/// Precomputed ground-set masses per level, reusable across many `τ`.
#[derive(Clone, Debug)]
pub struct QiteSweep<'a> {
    qpe: &'a QpeResult,
    ground_mass: Vec<f64>,
}

impl<'a> QiteSweep<'a> {
    pub fn new(qpe: &'a QpeResult, ground_set: &[u64]) -> Result<Self> {
        if ground_set.is_empty() {
            return Err(Error::EmptyGroundSet);
        }
        let ground: HashSet<u64> = ground_set.iter().copied().collect();
        let ground_mass = qpe
            .blocks()
            .iter()
            .map(|b| {
                b.states()
                    .iter()
                    .enumerate()
                    .filter(|(_, s)| ground.contains(s))
                    .map(|(idx, _)| b.state_probability(idx))
                    .sum()
            })
            .collect();
        Ok(Self { qpe, ground_mass })
    }

    /// Ground-set probability before any filtering.
    pub fn overlap_without_qite(&self) -> f64 {
        self.ground_mass.iter().sum()
    }

    pub fn at(&self, tau: f64) -> Result<QiteOutcome> {
        if !(tau >= 0.0) {
            return Err(Error::InvalidParameter(format!("tau must be non-negative, got {tau}")));
        }
        let filter = heralding_weights(self.qpe.config().size(), tau);
        let mut success = 0.0;
        let mut ground = 0.0;
        let mut register = vec![0.0; filter.len()];
        for (block, g) in self.qpe.blocks().iter().zip(&self.ground_mass) {
            let kept: f64 = block.register().iter().zip(&filter).map(|(w, f)| w * f).sum();
            success += block.mass() * kept;
            ground += g * kept;
            for ((acc, w), f) in register.iter_mut().zip(block.register()).zip(&filter) {
                *acc += block.mass() * w * f;
            }
        }
        let (ground_overlap, register_distribution) = if success > 0.0 {
            (ground / success, register.into_iter().map(|r| r / success).collect())
        } else {
            (0.0, register)
        };
        Ok(QiteOutcome { tau, success_probability: success, ground_overlap, filter, register_distribution })
    }

    /// Outcomes for each `τ`, in input order.
    pub fn sweep(&self, taus: &[f64]) -> Result<Vec<QiteOutcome>> {
        taus.par_iter().map(|&t| self.at(t)).collect()
    }
}

pub fn apply_qite(qpe: &QpeResult, ground_set: &[u64], tau: f64) -> Result<QiteOutcome> {
    QiteSweep::new(qpe, ground_set)?.at(tau)
}

/// Probability of the ground set with phase estimation alone.
pub fn overlap_without_qite(qpe: &QpeResult, ground_set: &[u64]) -> f64 {
    let ground: HashSet<u64> = ground_set.iter().copied().collect();
    qpe.blocks()
        .iter()
        .map(|b| {
            b.states()
                .iter()
                .enumerate()
                .filter(|(_, s)| ground.contains(s))
                .map(|(idx, _)| b.state_probability(idx))
                .sum::<f64>()
        })
        .sum()
}

/// `τ / (2^N - 1)`, the normalised imaginary time used for reporting.
pub fn normalized_tau(tau: f64, n_qubits: usize) -> f64 {
    tau / ((1u64 << n_qubits) - 1) as f64
}

#[derive(Clone, Debug, PartialEq)]
pub enum MinTau {
    Found { tau: f64, tau_normalized: f64, outcome: QiteOutcome },
    NotFound { max_overlap: f64 },
}

/// Smallest `τ` reaching `threshold` ground overlap: first bracketed on `grid`, then bisected.
pub fn min_tau(qpe: &QpeResult, ground_set: &[u64], threshold: f64, grid: &[f64]) -> Result<MinTau> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::InvalidParameter(format!("threshold must lie in (0, 1], got {threshold}")));
    }
    if grid.is_empty() || grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameter("tau grid must be non-empty and ascending".into()));
    }
    let sweep = QiteSweep::new(qpe, ground_set)?;
    let outcomes = sweep.sweep(grid)?;
    let Some(hit) = outcomes.iter().position(|o| o.ground_overlap >= threshold) else {
        let max_overlap = outcomes.iter().map(|o| o.ground_overlap).fold(0.0, f64::max);
        return Ok(MinTau::NotFound { max_overlap });
    };
    let found = |outcome: QiteOutcome| MinTau::Found {
        tau: outcome.tau,
        tau_normalized: normalized_tau(outcome.tau, qpe.n_qubits()),
        outcome,
    };
    if hit == 0 {
        return Ok(found(outcomes[0].clone()));
    }
    let (mut lo, mut hi) = (grid[hit - 1], grid[hit]);
    let mut best = outcomes[hit].clone();
    while hi - lo > BISECTION_REL_TOL * hi {
        let mid = 0.5 * (lo + hi);
        let o = sweep.at(mid)?;
        if o.ground_overlap >= threshold {
            hi = mid;
            best = o;
        } else {
            lo = mid;
        }
    }
    Ok(found(best))
}

/// One row of a `τ` sweep export.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub tau: f64,
    pub tau_normalized: f64,
    pub ground_overlap: f64,
    pub success_probability: f64,
    pub overlap_no_qite: f64,
}

pub const SWEEP_COLUMNS: [&str; 5] =
    ["tau", "tau_normalized", "ground_overlap", "success_probability", "overlap_no_qite"];

pub fn sweep_rows(qpe: &QpeResult, ground_set: &[u64], taus: &[f64]) -> Result<Vec<SweepRow>> {
    let sweep = QiteSweep::new(qpe, ground_set)?;
    let base = sweep.overlap_without_qite();
    Ok(sweep
        .sweep(taus)?
        .into_iter()
        .map(|o| SweepRow {
            tau: o.tau,
            tau_normalized: normalized_tau(o.tau, qpe.n_qubits()),
            ground_overlap: o.ground_overlap,
            success_probability: o.success_probability,
            overlap_no_qite: base,
        })
        .collect())
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W) -> Result<()> {
    writeln!(out, "{}", SWEEP_COLUMNS.join(","))?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_float(r.tau),
            fmt_float(r.tau_normalized),
            fmt_float(r.ground_overlap),
            fmt_float(r.success_probability),
            fmt_float(r.overlap_no_qite)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::{labs_energy_hamiltonian, DiagonalHamiltonian, ZMonomial};
    use crate::qpe::{run_qpe, run_qpe_uniform, InitialState, RegisterConfig};
    use crate::spectrum::enumerate_spectrum;

    fn labs_setup(n: usize, n_reg: usize) -> (QpeResult, Vec<u64>) {
        let h = labs_energy_hamiltonian(n).unwrap();
        let s = enumerate_spectrum(&h).unwrap();
        let cfg = RegisterConfig::new(n_reg, 1.0).unwrap();
        let r = run_qpe_uniform(&h.with_offset(s.ground_energy()), &cfg).unwrap();
        (r, s.ground_set().to_vec())
    }

    #[test]
    fn tau_zero_is_identity() {
        let (r, g) = labs_setup(4, 4);
        let o = apply_qite(&r, &g, 0.0).unwrap();
        assert!((o.success_probability - 1f64.sin().powi(2)).abs() < 1e-12);
        assert!((o.success_probability - 0.708073).abs() < 1e-6);
        for (a, b) in o.register_distribution().iter().zip(r.register_distribution()) {
            assert!((a - b).abs() < 1e-12);
        }
        for s in 0..16 {
            for p in 0..16 {
                assert!((o.postselected_weight(&r, s, p) - r.joint_weight(s, p)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn large_tau_projects_to_ground() {
        let (r, g) = labs_setup(5, 5);
        let o = apply_qite(&r, &g, 800.0).unwrap();
        assert!((o.register_distribution()[0] - 1.0).abs() < 1e-12);
        assert!((o.ground_overlap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn labs_three_sweep_is_monotone_and_converges() {
        let (r, g) = labs_setup(3, 4);
        let taus: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0 * 7.0).collect();
        let rows = sweep_rows(&r, &g, &taus).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].ground_overlap >= w[0].ground_overlap - 1e-15);
            assert!(w[1].success_probability <= w[0].success_probability + 1e-15);
        }
        assert!(rows.iter().any(|row| row.ground_overlap >= 0.999));
    }

    #[test]
    fn overlap_without_filtering() {
        let h = DiagonalHamiltonian::new(3, [ZMonomial::new(vec![0], 1.0).unwrap()]).unwrap();
        let cfg = RegisterConfig::new(2, 1.0).unwrap();
        let r = run_qpe(&h, &InitialState::uniform(3), &cfg).unwrap();
        assert!((overlap_without_qite(&r, &[0, 2, 4, 6]) - 0.5).abs() < 1e-15);
        let (r4, g4) = labs_setup(4, 4);
        assert_eq!(overlap_without_qite(&r4, &g4), g4.len() as f64 / 16.0);
        let r = run_qpe(&h, &InitialState::basis(3, 6), &cfg).unwrap();
        assert_eq!(overlap_without_qite(&r, &[6]), 1.0);
    }

    #[test]
    fn empty_ground_set_rejected() {
        let (r, _) = labs_setup(3, 3);
        assert_eq!(apply_qite(&r, &[], 1.0), Err(Error::EmptyGroundSet));
        assert!(apply_qite(&r, &[0], -1.0).is_err());
    }

    #[test]
    fn postselection_preserves_ratios_within_bin() {
        let h = labs_energy_hamiltonian(4).unwrap().with_offset(2.0);
        let cfg = RegisterConfig::new(4, 0.7).unwrap();
        let r = run_qpe_uniform(&h, &cfg).unwrap();
        let o = apply_qite(&r, &[1], 2.0).unwrap();
        for p in 0..16 {
            for (i, j) in [(0u64, 3u64), (5, 9), (2, 14)] {
                let (ji, jj) = (r.joint_weight(i, p), r.joint_weight(j, p));
                let (pi, pj) = (o.postselected_weight(&r, i, p), o.postselected_weight(&r, j, p));
                if jj > 1e-12 && pj > 1e-300 {
                    assert!((pi / pj - ji / jj).abs() < 1e-9 * (ji / jj).max(1.0));
                }
            }
        }
    }

    #[test]
    fn success_lower_bound() {
        let (r, g) = labs_setup(5, 5);
        let p0 = r.register_distribution()[0];
        for tau in [0.0, 0.5, 3.0, 40.0] {
            let o = apply_qite(&r, &g, tau).unwrap();
            assert!(o.success_probability >= p0 * 1f64.sin().powi(2) - 1e-15);
        }
    }

    #[test]
    fn min_tau_trivial_cases() {
        // One ground state, perfectly resolved, and nothing else.
        let h = DiagonalHamiltonian::zero(2).unwrap();
        let cfg = RegisterConfig::new(2, 1.0).unwrap();
        let r = run_qpe(&h, &InitialState::basis(2, 3), &cfg).unwrap();
        match min_tau(&r, &[3], 0.999, &[0.0, 1.0, 2.0]).unwrap() {
            MinTau::Found { tau, .. } => assert_eq!(tau, 0.0),
            other => panic!("unexpected {other:?}"),
        }
        let (r, g) = labs_setup(4, 4);
        assert!(matches!(min_tau(&r, &g, 1.0, &[0.0, 0.1, 0.2]).unwrap(), MinTau::NotFound { .. }));
        assert!(min_tau(&r, &g, 0.9, &[2.0, 1.0]).is_err());
        assert!(min_tau(&r, &g, 0.0, &[1.0]).is_err());
    }

    #[test]
    fn min_tau_bisection_brackets_threshold() {
        let (r, g) = labs_setup(5, 5);
        let grid: Vec<f64> = (0..=31).map(|i| i as f64).collect();
        let MinTau::Found { tau, tau_normalized, outcome } = min_tau(&r, &g, 0.999, &grid).unwrap() else {
            panic!("threshold not reached");
        };
        assert!(outcome.ground_overlap >= 0.999);
        assert!((tau_normalized - tau / 31.0).abs() < 1e-15);
        let below = apply_qite(&r, &g, tau * (1.0 - 2.0 * BISECTION_REL_TOL)).unwrap();
        assert!(below.ground_overlap < 0.999);
    }

    #[test]
    fn csv_columns() {
        let (r, g) = labs_setup(3, 3);
        let rows = sweep_rows(&r, &g, &[0.0, 1.0]).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "tau,tau_normalized,ground_overlap,success_probability,overlap_no_qite");
        assert!(lines.next().unwrap().starts_with("0,0,0.5,0.708073418274,0.5"));
    }
}
