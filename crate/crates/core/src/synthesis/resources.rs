//! Clifford+T cost of the full QPE-QITE circuit.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;

use super::multiplexor::multiplexor_angles;
use super::net::EpsilonNet;
use super::sk::{sk_chain, SynthesisResult};
use super::taylor::uar_taylor_order;
use super::unitary::{wrap_angle, Unitary2};
use crate::circuit::{ancilla_angles, Gate};
use crate::error::{Error, Result};
use crate::export::fmt_float;
use crate::fit::{power_law_fit, PowerLawFit};
use crate::hamiltonians::DiagonalHamiltonian;
use crate::qpe::RegisterConfig;

/// How the ancilla rotation stage is compiled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UarMode {
    /// Exact uniformly controlled rotation.
    Multiplexor,
    /// Truncated expansion of order 0 or 1.
    Taylor(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Axis {
    Z,
    Y,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StageReport {
    pub stage: String,
    pub rotations: usize,
    pub cnots: usize,
    pub t_count: usize,
    /// Largest synthesis error among the stage's rotations.
    pub eps_used: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResourceReport {
    pub qpe_rotations: usize,
    pub qft_rotations: usize,
    pub qft_hadamards: usize,
    pub uar_rotations: usize,
    pub t_total: usize,
    pub cnot_total: usize,
    /// Requested per-rotation error.
    pub eps: f64,
    /// Largest achieved per-rotation error.
    pub max_error: f64,
    /// False when some rotation could not be brought within `eps` at the configured depth.
    pub target_reached: bool,
    pub stages: Vec<StageReport>,
}

pub const RESOURCE_COLUMNS: &str = "stage,rotations,cnots,t_count,eps_used";

impl ResourceReport {
    /// One row per stage followed by a `total` row.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{RESOURCE_COLUMNS}")?;
        for s in &self.stages {
            writeln!(out, "{},{},{},{},{}", s.stage, s.rotations, s.cnots, s.t_count, fmt_float(s.eps_used))?;
        }
        let rotations: usize = self.stages.iter().map(|s| s.rotations).sum();
        writeln!(out, "total,{},{},{},{}", rotations, self.cnot_total, self.t_total, fmt_float(self.max_error))?;
        Ok(())
    }
}

struct Stage {
    name: &'static str,
    rotations: Vec<(Axis, f64)>,
    cnots: usize,
}

/// Key resolution for angle deduplication.
const ANGLE_RESOLUTION: f64 = 1e-12;

fn key(axis: Axis, theta: f64) -> (Axis, i64) {
    let steps = (wrap_angle(theta) / ANGLE_RESOLUTION).round() as i64;
    let half_turn = (PI / ANGLE_RESOLUTION).round() as i64;
    // -π and π are the same projective rotation.
    (axis, if steps == -half_turn { half_turn } else { steps })
}

fn target(axis: Axis, theta: f64) -> Unitary2 {
    match axis {
        Axis::Z => Unitary2::rz(theta),
        Axis::Y => Unitary2::ry(theta),
    }
}

/// First result along the depth chain meeting `eps`, else the best found.
fn synthesize(axis: Axis, theta: f64, eps: f64, net: &EpsilonNet, depth: usize) -> Result<SynthesisResult> {
    let chain = sk_chain(&target(axis, theta), depth, net)?;
    let pick = chain.iter().position(|r| r.error <= eps).unwrap_or(chain.len() - 1);
    Ok(chain[pick].clone())
}

fn stages(h: &DiagonalHamiltonian, cfg: &RegisterConfig, tau: f64, mode: UarMode) -> Result<Vec<Stage>> {
    let n_r = cfg.n_register();
    let m = cfg.size() as f64;

    let mut qpe = Stage { name: "qpe", rotations: Vec::new(), cnots: 0 };
    let mut offset = Stage { name: "offset", rotations: Vec::new(), cnots: 0 };
    let shift = h.constant() - h.alpha();
    for r in 0..n_r {
        let weight = 2.0 * PI * cfg.scale() * (1u64 << r) as f64 / m;
        for term in h.terms().iter().filter(|t| !t.is_constant()) {
            // Parity ladder there and back plus a two-CNOT controlled phase.
            qpe.cnots += 2 * (term.weight() - 1) + 2;
            qpe.rotations.push((Axis::Z, weight * term.coefficient()));
        }
        if shift != 0.0 {
            offset.rotations.push((Axis::Z, weight * shift));
        }
    }

    let mut qft = Stage { name: "qft", rotations: Vec::new(), cnots: 3 * (n_r / 2) };
    for j in 0..n_r {
        for s in 0..j {
            qft.cnots += 2;
            qft.rotations.push((Axis::Z, -2.0 * PI / (1u64 << (j - s + 1)) as f64));
        }
    }

    let uar = match mode {
        UarMode::Multiplexor => {
            let phis = multiplexor_angles(&ancilla_angles(cfg.size(), tau))?;
            Stage { name: "uar", cnots: phis.len(), rotations: phis.into_iter().map(|p| (Axis::Y, p)).collect() }
        }
        UarMode::Taylor(order) => {
            let c = uar_taylor_order(order, cfg, tau)?;
            let rotations = c
                .gates
                .iter()
                .filter_map(|g| match g {
                    Gate::Ry(_, t) => Some((Axis::Y, *t)),
                    _ => None,
                })
                .collect();
            Stage { name: "uar", rotations, cnots: c.cnots }
        }
    };
    Ok(vec![qpe, offset, qft, uar])
}

/// Counts rotations, CNOTs and T gates stage by stage, synthesising every
/// distinct rotation angle once.
pub fn resource_report(
    h: &DiagonalHamiltonian,
    cfg: &RegisterConfig,
    tau: f64,
    eps: f64,
    net: &EpsilonNet,
    depth: usize,
    mode: UarMode,
) -> Result<ResourceReport> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    if !(tau >= 0.0) {
        return Err(Error::InvalidParameter(format!("tau must be non-negative, got {tau}")));
    }
    let stages = stages(h, cfg, tau, mode)?;

    let mut unique: Vec<(Axis, f64)> = Vec::new();
    let mut index: HashMap<(Axis, i64), usize> = HashMap::new();
    for &(axis, theta) in stages.iter().flat_map(|s| &s.rotations) {
        index.entry(key(axis, theta)).or_insert_with(|| {
            unique.push((axis, theta));
            unique.len() - 1
        });
    }
    let results: Vec<SynthesisResult> =
        unique.par_iter().map(|&(axis, theta)| synthesize(axis, theta, eps, net, depth)).collect::<Result<_>>()?;

    let stage_reports: Vec<StageReport> = stages
        .iter()
        .map(|s| {
            let mut t_count = 0;
            let mut eps_used: f64 = 0.0;
            for &(axis, theta) in &s.rotations {
                let r = &results[index[&key(axis, theta)]];
                t_count += r.t_count;
                eps_used = eps_used.max(r.error);
            }
            StageReport { stage: s.name.to_string(), rotations: s.rotations.len(), cnots: s.cnots, t_count, eps_used }
        })
        .collect();

    let n_r = cfg.n_register();
    let max_error = stage_reports.iter().map(|s| s.eps_used).fold(0.0, f64::max);
    Ok(ResourceReport {
        qpe_rotations: stage_reports[0].rotations,
        qft_rotations: stage_reports[2].rotations,
        qft_hadamards: n_r,
        uar_rotations: stage_reports[3].rotations,
        t_total: stage_reports.iter().map(|s| s.t_count).sum(),
        cnot_total: stage_reports.iter().map(|s| s.cnots).sum(),
        eps,
        max_error,
        target_reached: max_error <= eps,
        stages: stage_reports,
    })
}

/// Fits `t = a · log(1/eps)^k` and reports `k` as the exponent.
pub fn fit_sk_exponent(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 4 {
        return Err(Error::NotEnoughPoints { needed: 4, got: points.len() });
    }
    let mut eps: Vec<f64> = points.iter().map(|p| p.0).collect();
    eps.sort_by(f64::total_cmp);
    if eps.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::DegenerateFit("eps values must be distinct".into()));
    }
    if points.iter().any(|&(e, _)| !(e > 0.0 && e < 1.0)) {
        return Err(Error::DegenerateFit("eps values must lie in (0, 1)".into()));
    }
    let transformed: Vec<(f64, f64)> = points.iter().map(|&(e, t)| ((1.0 / e).ln(), t)).collect();
    power_law_fit(&transformed, 4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::{labs_hamiltonian, ZMonomial};
    use std::sync::OnceLock;

    fn net() -> &'static EpsilonNet {
        static NET: OnceLock<EpsilonNet> = OnceLock::new();
        NET.get_or_init(|| EpsilonNet::build(6).unwrap())
    }

    fn report(h: &DiagonalHamiltonian, n_r: usize, mode: UarMode) -> ResourceReport {
        resource_report(h, &RegisterConfig::new(n_r, 1.0).unwrap(), 1.0, 0.1, net(), 1, mode).unwrap()
    }

    #[test]
    fn empty_hamiltonian_has_no_qpe_rotations() {
        let r = report(&DiagonalHamiltonian::zero(3).unwrap(), 3, UarMode::Multiplexor);
        assert_eq!(r.qpe_rotations, 0);
        assert_eq!(r.stages[0].cnots, 0);
        assert_eq!(r.qft_rotations, 3);
        assert_eq!(r.uar_rotations, 8);
    }

    #[test]
    fn labs_counts() {
        let h = labs_hamiltonian(8).unwrap();
        let terms = h.num_terms();
        let r5 = report(&h, 5, UarMode::Multiplexor);
        assert_eq!(r5.qpe_rotations, 5 * terms);
        assert_eq!(r5.qft_rotations, 10);
        assert_eq!(r5.uar_rotations, 32);
        let r10 = report(&h, 10, UarMode::Taylor(1));
        assert_eq!(r10.qpe_rotations, 2 * r5.qpe_rotations);
        assert_eq!(r10.uar_rotations, 21);
    }

    #[test]
    fn cnot_counts_follow_term_weights() {
        let h = DiagonalHamiltonian::new(
            4,
            [ZMonomial::new(vec![0, 1, 2, 3], 1.0).unwrap(), ZMonomial::new(vec![1], 0.5).unwrap()],
        )
        .unwrap();
        let r = report(&h, 2, UarMode::Taylor(0));
        assert_eq!(r.stages[0].cnots, 2 * (8 + 2));
        assert_eq!(r.stages[2].cnots, 3 + 2);
        assert_eq!(r.stages[3].cnots, 0);
        assert_eq!(r.uar_rotations, 1);
    }

    #[test]
    fn totals_are_additive() {
        let h = labs_hamiltonian(5).unwrap().with_offset(-3.0);
        let r = report(&h, 3, UarMode::Multiplexor);
        assert_eq!(r.t_total, r.stages.iter().map(|s| s.t_count).sum::<usize>());
        assert_eq!(r.cnot_total, r.stages.iter().map(|s| s.cnots).sum::<usize>());
        assert_eq!(r.stages[1].rotations, 3);
        assert_eq!(r.target_reached, r.max_error <= r.eps);
    }

    #[test]
    fn monotone_in_register_and_terms() {
        let small = labs_hamiltonian(5).unwrap();
        let large = labs_hamiltonian(7).unwrap();
        for n_r in 1..5 {
            let a = report(&small, n_r, UarMode::Multiplexor);
            let b = report(&small, n_r + 1, UarMode::Multiplexor);
            let c = report(&large, n_r, UarMode::Multiplexor);
            for (x, y) in [(&a, &b), (&a, &c)] {
                assert!(x.qpe_rotations <= y.qpe_rotations);
                assert!(x.cnot_total <= y.cnot_total);
            }
        }
    }

    #[test]
    fn csv_layout() {
        let r = report(&DiagonalHamiltonian::zero(2).unwrap(), 1, UarMode::Taylor(0));
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], RESOURCE_COLUMNS);
        assert_eq!(lines.len(), 6);
        assert!(lines[5].starts_with("total,1,0,"));
    }

    #[test]
    fn rejects_bad_eps() {
        let h = DiagonalHamiltonian::zero(2).unwrap();
        let cfg = RegisterConfig::new(2, 1.0).unwrap();
        assert!(resource_report(&h, &cfg, 0.0, 0.0, net(), 1, UarMode::Multiplexor).is_err());
    }

    #[test]
    fn equivalent_angles_share_a_key() {
        assert_eq!(key(Axis::Z, 0.3), key(Axis::Z, 0.3 + 2.0 * PI));
        assert_eq!(key(Axis::Y, PI), key(Axis::Y, -PI));
        assert_ne!(key(Axis::Y, 0.3), key(Axis::Z, 0.3));
    }

    #[test]
    fn sk_exponent_exact_models() {
        let eps = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5];
        let quartic: Vec<(f64, f64)> = eps.iter().map(|&e: &f64| (e, (1.0 / e).ln().powi(4))).collect();
        assert!((fit_sk_exponent(&quartic).unwrap().exponent - 4.0).abs() < 1e-6);
        let flat: Vec<(f64, f64)> = eps.iter().map(|&e| (e, 7.0)).collect();
        assert!(fit_sk_exponent(&flat).unwrap().exponent.abs() < 1e-12);
    }

    #[test]
    fn sk_exponent_degenerate_inputs() {
        assert!(fit_sk_exponent(&[(0.1, 1.0), (0.01, 2.0), (0.001, 3.0)]).is_err());
        assert!(fit_sk_exponent(&[(0.1, 1.0), (0.1, 2.0), (0.01, 3.0), (0.001, 4.0)]).is_err());
        assert!(fit_sk_exponent(&[(0.1, 0.0), (0.01, 2.0), (0.001, 3.0), (1e-4, 4.0)]).is_err());
    }
}
