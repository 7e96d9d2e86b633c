//! Uniformly controlled `Ry` rotations via the Gray-code CNOT sweep.
//!
//! For `k` controls the circuit is `Ry(φ_0) CNOT Ry(φ_1) CNOT ... Ry(φ_{2^k-1}) CNOT`,
//! where the CNOT after step `i` is controlled by the bit that flips between
//! Gray codes `g_i` and `g_{i+1}` (cyclically). Control value `x` then sees the
//! angle `Σ_i (-1)^{popcount(x & g_i)} φ_i`, a Walsh–Hadamard-type transform
//! that is inverted to obtain `φ`.

use crate::circuit::Gate;
use crate::error::{Error, Result};

fn gray(i: usize) -> usize {
    i ^ (i >> 1)
}

/// Step angles `φ` realising the per-control-value angles `θ`.
pub fn multiplexor_angles(angles: &[f64]) -> Result<Vec<f64>> {
    let n = angles.len();
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    Ok((0..n)
        .map(|i| {
            let g = gray(i);
            let sum: f64 =
                angles.iter().enumerate().map(|(x, &t)| if (x & g).count_ones() & 1 == 0 { t } else { -t }).sum();
            sum / n as f64
        })
        .collect())
}

/// Gates applying `Ry(angles[x])` to `target` when the controls (with
/// `controls[j]` as bit `j`) hold the value `x`.
pub fn decompose_multiplexed_ry(angles: &[f64], controls: &[usize], target: usize) -> Result<Vec<Gate>> {
    let n = angles.len();
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    if n != 1 << controls.len() {
        return Err(Error::LengthMismatch { expected: 1 << controls.len(), got: n });
    }
    if n == 1 {
        return Ok(vec![Gate::Ry(target, angles[0])]);
    }
    let phis = multiplexor_angles(angles)?;
    let mut gates = Vec::with_capacity(2 * n);
    for (i, &phi) in phis.iter().enumerate() {
        gates.push(Gate::Ry(target, phi));
        let flipped = gray(i) ^ gray((i + 1) % n);
        gates.push(Gate::Cnot { control: controls[flipped.trailing_zeros() as usize], target });
    }
    Ok(gates)
}

/// Drops rotations with `|θ| < 1e-12` and cancels CNOT pairs within runs of CNOTs sharing a target.
pub fn simplify(gates: &[Gate]) -> Vec<Gate> {
    let mut out: Vec<Gate> = Vec::new();
    let mut run: Vec<(usize, usize)> = Vec::new();
    let flush = |run: &mut Vec<(usize, usize)>, out: &mut Vec<Gate>| {
        let mut odd: Vec<(usize, usize)> = Vec::new();
        for &pair in run.iter() {
            if let Some(pos) = odd.iter().position(|&p| p == pair) {
                odd.remove(pos);
            } else {
                odd.push(pair);
            }
        }
        out.extend(odd.into_iter().map(|(control, target)| Gate::Cnot { control, target }));
        run.clear();
    };
    for g in gates {
        match g {
            Gate::Ry(_, t) | Gate::Rz(_, t) | Gate::Phase(_, t) if t.abs() < 1e-12 => {}
            Gate::Cnot { control, target } => {
                if run.last().is_some_and(|&(_, t)| t != *target) {
                    flush(&mut run, &mut out);
                }
                run.push((*control, *target));
            }
            other => {
                flush(&mut run, &mut out);
                out.push(other.clone());
            }
        }
    }
    flush(&mut run, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{ancilla_angles, Statevector};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};

    /// Unitary of `gates` on `n` qubits, column `j` = image of basis state `j`.
    fn unitary(gates: &[Gate], n: usize) -> Vec<Vec<Complex64>> {
        (0..1usize << n)
            .map(|j| {
                let mut s = Statevector::basis(n, j).unwrap();
                s.apply_all(gates).unwrap();
                s.amplitudes().to_vec()
            })
            .collect()
    }

    /// Block-diagonal target: `Ry(θ_x)` on the last qubit for control value `x`.
    fn target(angles: &[f64], k: usize) -> Vec<Vec<Complex64>> {
        let mut s = Vec::new();
        for j in 0..1usize << (k + 1) {
            let x = j & ((1 << k) - 1);
            let b = j >> k;
            let (sn, cs) = (angles[x] / 2.0).sin_cos();
            let mut col = vec![Complex64::new(0.0, 0.0); 1 << (k + 1)];
            let (c0, c1) = if b == 0 { (cs, sn) } else { (-sn, cs) };
            col[x] = Complex64::new(c0, 0.0);
            col[x | (1 << k)] = Complex64::new(c1, 0.0);
            s.push(col);
        }
        s
    }

    fn max_diff(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> f64 {
        a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn one_control_identity() {
        let gates = decompose_multiplexed_ry(&[0.8, -0.2], &[0], 1).unwrap();
        match gates.as_slice() {
            [Gate::Ry(1, a), Gate::Cnot { control: 0, target: 1 }, Gate::Ry(1, b), Gate::Cnot { control: 0, target: 1 }] =>
            {
                assert!((a - 0.3).abs() < 1e-15 && (b - 0.5).abs() < 1e-15);
            }
            other => panic!("unexpected gates {other:?}"),
        }
        assert!(max_diff(&unitary(&gates, 2), &target(&[0.8, -0.2], 1)) < 1e-14);
    }

    #[test]
    fn equal_angles_collapse() {
        for k in 1..=4 {
            let gates = decompose_multiplexed_ry(&vec![0.9; 1 << k], &(0..k).collect::<Vec<_>>(), k).unwrap();
            match simplify(&gates).as_slice() {
                [Gate::Ry(q, t)] => assert!(*q == k && (t - 0.9).abs() < 1e-14),
                other => panic!("not collapsed: {other:?}"),
            }
        }
    }

    #[test]
    fn gate_counts() {
        for k in 1..=5 {
            let gates = decompose_multiplexed_ry(&vec![0.1; 1 << k], &(0..k).collect::<Vec<_>>(), k).unwrap();
            assert_eq!(gates.iter().filter(|g| matches!(g, Gate::Cnot { .. })).count(), 1 << k);
            assert_eq!(gates.iter().filter(|g| matches!(g, Gate::Ry(..))).count(), 1 << k);
        }
    }

    #[test]
    fn ancilla_stage_reconstruction() {
        let angles = ancilla_angles(8, 1.0);
        let gates = decompose_multiplexed_ry(&angles, &[0, 1, 2], 3).unwrap();
        assert!(max_diff(&unitary(&gates, 4), &target(&angles, 3)) < 1e-10);
    }

    #[test]
    fn random_reconstruction() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for k in 1..=4 {
            let angles: Vec<f64> = (0..1 << k).map(|_| rng.gen_range(-6.0..6.0)).collect();
            let gates = decompose_multiplexed_ry(&angles, &(0..k).collect::<Vec<_>>(), k).unwrap();
            assert!(max_diff(&unitary(&gates, k + 1), &target(&angles, k)) < 1e-10);
        }
    }

    #[test]
    fn rejects_bad_lengths() {
        assert_eq!(decompose_multiplexed_ry(&[1.0, 2.0, 3.0], &[0, 1], 2), Err(Error::NotPowerOfTwo(3)));
        assert!(matches!(decompose_multiplexed_ry(&[1.0, 2.0], &[0, 1], 2), Err(Error::LengthMismatch { .. })));
    }
}
