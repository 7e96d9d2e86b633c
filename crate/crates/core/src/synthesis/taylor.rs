//! Truncated expansions of the register-controlled ancilla rotation.
//!
//! The ancilla angle `2 e^{-pτ}` is expanded as `2 (1 - pτ + ...)`. Order 0
//! keeps the constant rotation; order 1 adds the part linear in `p`, which
//! splits into one controlled `Ry(-2τ 2^r)` per register qubit.

use crate::circuit::Gate;
use crate::error::{Error, Result};
use crate::qpe::RegisterConfig;

#[derive(Clone, Debug, PartialEq)]
pub struct TaylorCircuit {
    pub order: usize,
    pub gates: Vec<Gate>,
    pub cnots: usize,
    pub rotations: usize,
}

/// Circuit for the order-`order` ancilla stage with explicit qubit placement.
pub fn uar_taylor_circuit(order: usize, tau: f64, register: &[usize], ancilla: usize) -> Result<TaylorCircuit> {
    if order > 1 {
        return Err(Error::UnsupportedOrder(order));
    }
    let mut gates = vec![Gate::Ry(ancilla, 2.0)];
    if order == 1 {
        for (r, &control) in register.iter().enumerate() {
            let phi = -2.0 * tau * (1u64 << r) as f64;
            gates.push(Gate::Ry(ancilla, phi / 2.0));
            gates.push(Gate::Cnot { control, target: ancilla });
            gates.push(Gate::Ry(ancilla, -phi / 2.0));
            gates.push(Gate::Cnot { control, target: ancilla });
        }
    }
    let cnots = gates.iter().filter(|g| matches!(g, Gate::Cnot { .. })).count();
    let rotations = gates.len() - cnots;
    Ok(TaylorCircuit { order, gates, cnots, rotations })
}

/// Order-0 or order-1 circuit with the register on qubits `0..N_R` and the ancilla on `N_R`.
pub fn uar_taylor_order(order: usize, cfg: &RegisterConfig, tau: f64) -> Result<TaylorCircuit> {
    let register: Vec<usize> = (0..cfg.n_register()).collect();
    uar_taylor_circuit(order, tau, &register, cfg.n_register())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Gate, Statevector};
    use crate::synthesis::multiplexor::decompose_multiplexed_ry;

    fn columns(gates: &[Gate], n: usize) -> Vec<Vec<num_complex::Complex64>> {
        (0..1usize << n)
            .map(|j| {
                let mut s = Statevector::basis(n, j).unwrap();
                s.apply_all(gates).unwrap();
                s.amplitudes().to_vec()
            })
            .collect()
    }

    fn max_diff(a: &[Vec<num_complex::Complex64>], b: &[Vec<num_complex::Complex64>]) -> f64 {
        a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn order_zero_is_one_rotation() {
        for n in 1..=6 {
            let c = uar_taylor_order(0, &RegisterConfig::new(n, 1.0).unwrap(), 0.7).unwrap();
            assert_eq!((c.rotations, c.cnots), (1, 0));
        }
    }

    #[test]
    fn order_one_counts() {
        for n in 1..=8 {
            let c = uar_taylor_order(1, &RegisterConfig::new(n, 1.0).unwrap(), 0.3).unwrap();
            assert_eq!(c.cnots, 2 * n);
            assert!(c.rotations - 1 <= 3 * n);
        }
        let c = uar_taylor_order(1, &RegisterConfig::new(4, 1.0).unwrap(), 0.3).unwrap();
        assert_eq!(c.cnots, 8);
    }

    #[test]
    fn order_one_is_linear_multiplexor() {
        let n = 3;
        let tau = 0.15;
        let c = uar_taylor_order(1, &RegisterConfig::new(n, 1.0).unwrap(), tau).unwrap();
        let angles: Vec<f64> = (0..1 << n).map(|p| 2.0 * (1.0 - p as f64 * tau)).collect();
        let reference = decompose_multiplexed_ry(&angles, &[0, 1, 2], 3).unwrap();
        assert!(max_diff(&columns(&c.gates, n + 1), &columns(&reference, n + 1)) < 1e-12);
    }

    #[test]
    fn order_one_at_zero_tau_matches_order_zero() {
        let cfg = RegisterConfig::new(3, 1.0).unwrap();
        let zero = uar_taylor_order(0, &cfg, 0.0).unwrap();
        let one = uar_taylor_order(1, &cfg, 0.0).unwrap();
        assert!(max_diff(&columns(&zero.gates, 4), &columns(&one.gates, 4)) < 1e-15);
    }

    #[test]
    fn higher_orders_rejected() {
        let cfg = RegisterConfig::new(3, 1.0).unwrap();
        assert_eq!(uar_taylor_order(2, &cfg, 0.1), Err(Error::UnsupportedOrder(2)));
    }
}
