//! Solovay–Kitaev refinement over a precomputed ε-net.

use std::fmt;

use super::net::EpsilonNet;
use super::unitary::Unitary2;
use super::word::GateWord;
use crate::error::{Error, Result};
use crate::export::fmt_float;

pub const MAX_DEPTH: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct SynthesisResult {
    pub word: GateWord,
    /// Product of `word`, recomputed from the symbols.
    pub realized: Unitary2,
    /// Projective operator-norm distance between `realized` and the target.
    pub error: f64,
    pub t_count: usize,
}

impl SynthesisResult {
    fn new(word: GateWord, target: &Unitary2) -> Self {
        let realized = word.matrix();
        let error = realized.distance(target);
        let t_count = word.t_count();
        Self { word, realized, error, t_count }
    }
}

impl fmt::Display for SynthesisResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.word)?;
        write!(f, "error={}, t_count={}", fmt_float(self.error), self.t_count)
    }
}

/// Balanced group commutator: `V W V† W† = Δ` up to global phase, with `V`, `W`
/// rotations by the same angle about axes conjugated onto the axis of `Δ`.
pub fn group_commutator(delta: &Unitary2) -> (Unitary2, Unitary2) {
    let (axis, theta) = delta.axis_angle();
    // sin(θ/2) = 2 sin²(φ/2) sqrt(1 - sin⁴(φ/2))
    let s = ((1.0 - (theta / 2.0).cos()) / 2.0).sqrt().sqrt();
    let phi = 2.0 * s.clamp(0.0, 1.0).asin();
    let v = Unitary2::rx(phi);
    let w = Unitary2::ry(phi);
    let comm = v * w * v.adjoint() * w.adjoint();
    let (comm_axis, _) = comm.axis_angle();
    let s = rotation_between(comm_axis, axis);
    (s * v * s.adjoint(), s * w * s.adjoint())
}

/// An SU(2) element whose rotation carries unit vector `from` onto `to`.
fn rotation_between(from: [f64; 3], to: [f64; 3]) -> Unitary2 {
    let cross =
        [from[1] * to[2] - from[2] * to[1], from[2] * to[0] - from[0] * to[2], from[0] * to[1] - from[1] * to[0]];
    let dot: f64 = from.iter().zip(&to).map(|(a, b)| a * b).sum();
    let norm = cross.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm < 1e-12 {
        if dot > 0.0 {
            return Unitary2::identity();
        }
        // Antiparallel: half turn about any axis orthogonal to `from`.
        let helper = if from[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let perp = [
            from[1] * helper[2] - from[2] * helper[1],
            from[2] * helper[0] - from[0] * helper[2],
            from[0] * helper[1] - from[1] * helper[0],
        ];
        let n = perp.iter().map(|x| x * x).sum::<f64>().sqrt();
        return Unitary2::rotation(perp.map(|x| x / n), std::f64::consts::PI);
    }
    Unitary2::rotation(cross.map(|x| x / norm), norm.atan2(dot))
}

fn recurse(target: &Unitary2, depth: usize, net: &EpsilonNet) -> GateWord {
    let base = net.nearest(target).0.clone();
    (1..=depth).fold(base, |approx, level| refine(target, &approx, level - 1, net))
}

/// One Solovay–Kitaev step: corrects `approx` towards `target` with a commutator
/// whose factors are approximated at `depth`.
fn refine(target: &Unitary2, approx: &GateWord, depth: usize, net: &EpsilonNet) -> GateWord {
    let delta = *target * approx.matrix().adjoint();
    let (v, w) = group_commutator(&delta);
    let v_word = recurse(&v, depth, net);
    let w_word = recurse(&w, depth, net);
    // Matrix V W V† W† U is applied in circuit order U, W†, V†, W, V.
    approx.then(&w_word.inverse()).then(&v_word.inverse()).then(&w_word).then(&v_word)
}

/// Approximates `target` over Clifford+T. Depth 0 is the nearest net entry;
/// each further level applies one commutator correction. The best word seen
/// along the chain is returned, so the error never grows with depth.
pub fn sk_synthesize(target: &Unitary2, depth: usize, net: &EpsilonNet) -> Result<SynthesisResult> {
    Ok(sk_chain(target, depth, net)?.pop().expect("chain includes depth 0"))
}

/// Results for every depth `0..=depth`, each the best found up to that depth.
pub fn sk_chain(target: &Unitary2, depth: usize, net: &EpsilonNet) -> Result<Vec<SynthesisResult>> {
    if depth > MAX_DEPTH {
        return Err(Error::InvalidParameter(format!("depth must lie in 0..={MAX_DEPTH}, got {depth}")));
    }
    let mut approx = net.nearest(target).0.clone();
    let mut best = SynthesisResult::new(approx.clone(), target);
    let mut chain = vec![best.clone()];
    for level in 1..=depth {
        approx = refine(target, &approx, level - 1, net);
        let candidate = SynthesisResult::new(approx.clone(), target);
        if candidate.error < best.error {
            best = candidate;
        }
        chain.push(best.clone());
    }
    Ok(chain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthesis::word::Symbol;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn generator_targets_are_exact() {
        let net = EpsilonNet::build(4).unwrap();
        for depth in 0..3 {
            let r = sk_synthesize(&Unitary2::h(), depth, &net).unwrap();
            assert!(r.error < 1e-15);
            assert_eq!(r.t_count, 0);
        }
        let tht = Symbol::T.matrix() * Symbol::H.matrix() * Symbol::T.matrix();
        let r = sk_synthesize(&tht.scale(num_complex::Complex64::from_polar(1.0, 0.4)), 0, &net).unwrap();
        assert!(r.error < 1e-12);
        assert_eq!(r.t_count, 2);
    }

    #[test]
    fn depth_bound() {
        let net = EpsilonNet::build(2).unwrap();
        assert!(sk_synthesize(&Unitary2::h(), MAX_DEPTH + 1, &net).is_err());
    }

    #[test]
    fn rz_errors_decrease() {
        let net = EpsilonNet::build(8).unwrap();
        let chain = sk_chain(&Unitary2::rz(0.1), 3, &net).unwrap();
        assert!(chain.iter().all(|r| r.error > 0.0));
        assert!(chain.windows(2).all(|w| w[1].error <= w[0].error));
        assert!(chain[3].error < chain[0].error);
        for r in &chain {
            assert!((r.word.matrix().distance(&Unitary2::rz(0.1)) - r.error).abs() < 1e-12);
            assert_eq!(r.t_count, r.word.t_count());
        }
    }

    #[test]
    fn display_format() {
        let net = EpsilonNet::build(2).unwrap();
        let r = sk_synthesize(&Symbol::T.matrix(), 0, &net).unwrap();
        assert_eq!(r.to_string(), "T\nerror=0, t_count=1");
    }

    #[test]
    fn antiparallel_axes() {
        let s = rotation_between([0.0, 0.0, 1.0], [0.0, 0.0, -1.0]);
        let (axis, angle) = s.axis_angle();
        assert!((angle - PI).abs() < 1e-12);
        assert!(axis[2].abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn commutator_reproduces_delta(x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0, theta in 0.0f64..3.1) {
            let n = (x * x + y * y + z * z).sqrt();
            prop_assume!(n > 1e-3);
            let delta = Unitary2::rotation([x / n, y / n, z / n], theta);
            let (v, w) = group_commutator(&delta);
            let comm = v * w * v.adjoint() * w.adjoint();
            prop_assert!(comm.distance(&delta) < 1e-10);
        }
    }
}
