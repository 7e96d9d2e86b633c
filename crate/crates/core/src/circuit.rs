//! Dense statevector simulation and the gate-level phase-estimation/imaginary-time circuit.
//!
//! Qubit `q` is bit `q` of the amplitude index. The circuit places the system
//! on qubits `0..N`, the register on `N..N+N_R` (register qubit `r` carries
//! weight `2^r` in `p`) and the ancilla on qubit `N+N_R`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::export::fmt_float;
use crate::hamiltonians::DiagonalHamiltonian;
use crate::qite::heralding_weights;
use crate::qpe::{run_qpe_uniform, RegisterConfig};
use crate::synthesis::multiplexor::decompose_multiplexed_ry;

pub const MAX_DENSE_QUBITS: usize = 22;

#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    H(usize),
    X(usize),
    Y(usize),
    Z(usize),
    S(usize),
    Sdg(usize),
    T(usize),
    Tdg(usize),
    Cnot {
        control: usize,
        target: usize,
    },
    Cz(usize, usize),
    /// `exp(-iθY/2)`.
    Ry(usize, f64),
    /// `exp(-iθZ/2)`.
    Rz(usize, f64),
    /// `diag(1, e^{iθ})`.
    Phase(usize, f64),
    CPhase {
        control: usize,
        target: usize,
        theta: f64,
    },
    McPhase {
        controls: Vec<usize>,
        target: usize,
        theta: f64,
    },
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        use Gate::*;
        match self {
            H(q) | X(q) | Y(q) | Z(q) | S(q) | Sdg(q) | T(q) | Tdg(q) | Ry(q, _) | Rz(q, _) | Phase(q, _) => vec![*q],
            Cnot { control, target } | CPhase { control, target, .. } => vec![*control, *target],
            Cz(a, b) => vec![*a, *b],
            McPhase { controls, target, .. } => controls.iter().copied().chain([*target]).collect(),
        }
    }

    pub fn name(&self) -> &'static str {
        use Gate::*;
        match self {
            H(_) => "H",
            X(_) => "X",
            Y(_) => "Y",
            Z(_) => "Z",
            S(_) => "S",
            Sdg(_) => "SDG",
            T(_) => "T",
            Tdg(_) => "TDG",
            Cnot { .. } => "CNOT",
            Cz(..) => "CZ",
            Ry(..) => "RY",
            Rz(..) => "RZ",
            Phase(..) => "PHASE",
            CPhase { .. } => "CPHASE",
            McPhase { .. } => "MCPHASE",
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match self {
            Gate::Ry(_, t) | Gate::Rz(_, t) | Gate::Phase(_, t) => Some(*t),
            Gate::CPhase { theta, .. } | Gate::McPhase { theta, .. } => Some(*theta),
            _ => None,
        }
    }

    fn validate(&self, n_qubits: usize) -> Result<()> {
        let qs = self.qubits();
        for (i, &q) in qs.iter().enumerate() {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { index: q, n_qubits });
            }
            if qs[..i].contains(&q) {
                return Err(Error::DuplicateQubit(q));
            }
        }
        Ok(())
    }

    /// 2×2 matrix of a single-qubit gate, row-major.
    fn single_matrix(&self) -> Option<[[Complex64; 2]; 2]> {
        let c = |re, im| Complex64::new(re, im);
        let (z, o) = (c(0.0, 0.0), c(1.0, 0.0));
        let diag = |phase: f64| Some([[o, z], [z, Complex64::from_polar(1.0, phase)]]);
        match self {
            Gate::H(_) => {
                let h = c(FRAC_1_SQRT_2, 0.0);
                Some([[h, h], [h, -h]])
            }
            Gate::X(_) => Some([[z, o], [o, z]]),
            Gate::Y(_) => Some([[z, c(0.0, -1.0)], [c(0.0, 1.0), z]]),
            Gate::Z(_) => diag(PI),
            Gate::S(_) => diag(PI / 2.0),
            Gate::Sdg(_) => diag(-PI / 2.0),
            Gate::T(_) => diag(PI / 4.0),
            Gate::Tdg(_) => diag(-PI / 4.0),
            Gate::Phase(_, t) => diag(*t),
            Gate::Ry(_, t) => {
                let (s, co) = (t / 2.0).sin_cos();
                Some([[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]])
            }
            Gate::Rz(_, t) => {
                Some([[Complex64::from_polar(1.0, -t / 2.0), z], [z, Complex64::from_polar(1.0, t / 2.0)]])
            }
            _ => None,
        }
    }
}

impl fmt::Display for Gate {
    /// Netlist line: `KIND q0 q1 ... [angle]`, controls before the target.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())?;
        for q in self.qubits() {
            write!(f, " {q}")?;
        }
        if let Some(a) = self.angle() {
            write!(f, " {}", fmt_float(a))?;
        }
        Ok(())
    }
}

/// Netlist text, one gate per line.
pub fn netlist(gates: &[Gate]) -> String {
    gates.iter().map(|g| format!("{g}\n")).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl Statevector {
    /// `|0...0>`.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits > MAX_DENSE_QUBITS {
            return Err(Error::TooManyQubits { n_qubits, cap: MAX_DENSE_QUBITS });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amplitudes })
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        if !amplitudes.len().is_power_of_two() {
            return Err(Error::NotPowerOfTwo(amplitudes.len()));
        }
        let n_qubits = amplitudes.len().trailing_zeros() as usize;
        if n_qubits > MAX_DENSE_QUBITS {
            return Err(Error::TooManyQubits { n_qubits, cap: MAX_DENSE_QUBITS });
        }
        Ok(Self { n_qubits, amplitudes })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        if let Some(m) = gate.single_matrix() {
            self.apply_single(gate.qubits()[0], &m);
            return Ok(());
        }
        match gate {
            Gate::Cnot { control, target } => {
                let (cm, tm) = (1 << control, 1 << target);
                for i in 0..self.amplitudes.len() {
                    if i & cm != 0 && i & tm == 0 {
                        self.amplitudes.swap(i, i | tm);
                    }
                }
            }
            Gate::Cz(a, b) => self.apply_controlled_phase((1 << a) | (1 << b), PI),
            Gate::CPhase { control, target, theta } => {
                self.apply_controlled_phase((1 << control) | (1 << target), *theta)
            }
            Gate::McPhase { controls, target, theta } => {
                let mask = controls.iter().fold(1 << target, |m, c| m | (1 << c));
                self.apply_controlled_phase(mask, *theta)
            }
            _ => unreachable!("single-qubit gates handled above"),
        }
        Ok(())
    }

    pub fn apply_all(&mut self, gates: &[Gate]) -> Result<()> {
        gates.iter().try_for_each(|g| self.apply(g))
    }

    fn apply_single(&mut self, q: usize, m: &[[Complex64; 2]; 2]) {
        let bit = 1 << q;
        for i in 0..self.amplitudes.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amplitudes[i], self.amplitudes[i | bit]);
                self.amplitudes[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amplitudes[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    fn apply_controlled_phase(&mut self, mask: usize, theta: f64) {
        let phase = Complex64::from_polar(1.0, theta);
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if i & mask == mask {
                *a *= phase;
            }
        }
    }

    /// Probability table over `qubits`, with `qubits[0]` as the least significant bit.
    pub fn marginal_distribution(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        for (i, &q) in qubits.iter().enumerate() {
            if q >= self.n_qubits {
                return Err(Error::QubitOutOfRange { index: q, n_qubits: self.n_qubits });
            }
            if qubits[..i].contains(&q) {
                return Err(Error::DuplicateQubit(q));
            }
        }
        let mut out = vec![0.0; 1 << qubits.len()];
        for (i, a) in self.amplitudes.iter().enumerate() {
            let key = qubits.iter().enumerate().fold(0, |k, (j, &q)| k | (((i >> q) & 1) << j));
            out[key] += a.norm_sqr();
        }
        Ok(out)
    }

    /// Projects `qubit` onto `outcome`, returning the renormalised state and the branch probability.
    pub fn project(&self, qubit: usize, outcome: bool) -> Result<(Statevector, f64)> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitOutOfRange { index: qubit, n_qubits: self.n_qubits });
        }
        let bit = 1 << qubit;
        let keep = |i: usize| (i & bit != 0) == outcome;
        let probability: f64 =
            self.amplitudes.iter().enumerate().filter(|(i, _)| keep(*i)).map(|(_, a)| a.norm_sqr()).sum();
        if probability < 1e-300 {
            return Err(Error::ZeroBranch(probability));
        }
        let scale = probability.sqrt().recip();
        let amplitudes = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| if keep(i) { a * scale } else { Complex64::new(0.0, 0.0) })
            .collect();
        Ok((Statevector { n_qubits: self.n_qubits, amplitudes }, probability))
    }
}

/// Qubit layout of the full circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layout {
    pub n_system: usize,
    pub n_register: usize,
}

impl Layout {
    pub fn system(&self) -> Vec<usize> {
        (0..self.n_system).collect()
    }

    pub fn register(&self) -> Vec<usize> {
        (self.n_system..self.n_system + self.n_register).collect()
    }

    pub fn ancilla(&self) -> usize {
        self.n_system + self.n_register
    }

    pub fn total(&self) -> usize {
        self.n_system + self.n_register + 1
    }
}

/// `exp(iθ Z_{qubits})` controlled on `control`: parity ladder, phase kick, ladder undone.
pub fn controlled_z_string(control: usize, qubits: &[usize], theta: f64) -> Vec<Gate> {
    let Some((&last, rest)) = qubits.split_last() else {
        return vec![Gate::Phase(control, theta)];
    };
    let ladder: Vec<Gate> = rest.iter().map(|&q| Gate::Cnot { control: q, target: last }).collect();
    let mut gates = ladder.clone();
    gates.push(Gate::Phase(control, theta));
    gates.push(Gate::CPhase { control, target: last, theta: -2.0 * theta });
    gates.extend(ladder.into_iter().rev());
    gates
}

/// Register transform `|y> -> 2^{-N_R/2} Σ_p e^{-2πi p y / 2^{N_R}} |p>`.
pub fn register_fourier(register: &[usize]) -> Vec<Gate> {
    // Forward transform with output reversal, then inverted gate by gate.
    let n = register.len();
    let mut forward = Vec::new();
    for j in (0..n).rev() {
        forward.push(Gate::H(register[j]));
        for s in (0..j).rev() {
            let theta = 2.0 * PI / (1u64 << (j - s + 1)) as f64;
            forward.push(Gate::CPhase { control: register[s], target: register[j], theta });
        }
    }
    for j in 0..n / 2 {
        let (a, b) = (register[j], register[n - 1 - j]);
        forward.push(Gate::Cnot { control: a, target: b });
        forward.push(Gate::Cnot { control: b, target: a });
        forward.push(Gate::Cnot { control: a, target: b });
    }
    forward
        .into_iter()
        .rev()
        .map(|g| match g {
            Gate::CPhase { control, target, theta } => Gate::CPhase { control, target, theta: -theta },
            other => other,
        })
        .collect()
}

/// Ancilla rotation angles `2 e^{-pτ}`, giving amplitudes `cos(e^{-pτ})`, `sin(e^{-pτ})`.
pub fn ancilla_angles(register_size: usize, tau: f64) -> Vec<f64> {
    (0..register_size).map(|p| 2.0 * (-(p as f64) * tau).exp()).collect()
}

/// The full circuit on `N + N_R + 1` qubits, starting from `|0...0>`.
pub fn build_qpe_qite_circuit(h: &DiagonalHamiltonian, cfg: &RegisterConfig, tau: f64) -> Result<Vec<Gate>> {
    let layout = Layout { n_system: h.n_qubits(), n_register: cfg.n_register() };
    if layout.total() > MAX_DENSE_QUBITS {
        return Err(Error::TooManyQubits { n_qubits: layout.total(), cap: MAX_DENSE_QUBITS });
    }
    if !(tau >= 0.0) {
        return Err(Error::InvalidParameter(format!("tau must be non-negative, got {tau}")));
    }
    let register = layout.register();
    let mut gates: Vec<Gate> = layout.system().into_iter().chain(register.iter().copied()).map(Gate::H).collect();

    let m = cfg.size() as f64;
    let offset = h.constant() - h.alpha();
    for (r, &control) in register.iter().enumerate() {
        let weight = 2.0 * PI * cfg.scale() * (1u64 << r) as f64 / m;
        for term in h.terms().iter().filter(|t| !t.is_constant()) {
            gates.extend(controlled_z_string(control, term.qubits(), weight * term.coefficient()));
        }
        if offset != 0.0 {
            gates.push(Gate::Phase(control, weight * offset));
        }
    }

    gates.extend(register_fourier(&register));
    gates.extend(decompose_multiplexed_ry(&ancilla_angles(cfg.size(), tau), &register, layout.ancilla())?);
    Ok(gates)
}

/// Runs the circuit and returns the final state.
pub fn simulate_qpe_qite(h: &DiagonalHamiltonian, cfg: &RegisterConfig, tau: f64) -> Result<Statevector> {
    let gates = build_qpe_qite_circuit(h, cfg, tau)?;
    let mut state = Statevector::zero(h.n_qubits() + cfg.n_register() + 1)?;
    state.apply_all(&gates)?;
    Ok(state)
}

/// Agreement between the gate-level circuit and the closed-form pipeline.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleComparison {
    /// Total variation distance of the register marginals before heralding.
    pub qpe_tv: f64,
    /// Total variation distance of the register marginals after keeping the ancilla `|1>` branch.
    pub heralded_tv: f64,
    /// `|P_circuit(ancilla = 1) - P_closed(ancilla = 1)|`.
    pub success_delta: f64,
}

impl OracleComparison {
    pub fn max_deviation(&self) -> f64 {
        self.qpe_tv.max(self.heralded_tv).max(self.success_delta)
    }
}

fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / 2.0
}

/// Runs both simulations from the uniform initial state and compares register statistics.
pub fn compare_with_closed_form(h: &DiagonalHamiltonian, cfg: &RegisterConfig, tau: f64) -> Result<OracleComparison> {
    let layout = Layout { n_system: h.n_qubits(), n_register: cfg.n_register() };
    let state = simulate_qpe_qite(h, cfg, tau)?;
    let closed = run_qpe_uniform(h, cfg)?;

    let qpe_tv = total_variation(&state.marginal_distribution(&layout.register())?, closed.register_distribution());

    let filter = heralding_weights(cfg.size(), tau);
    let success: f64 = closed.register_distribution().iter().zip(&filter).map(|(w, f)| w * f).sum();
    let (post, prob) = state.project(layout.ancilla(), true)?;
    let heralded: Vec<f64> = closed.register_distribution().iter().zip(&filter).map(|(w, f)| w * f / success).collect();
    let heralded_tv = total_variation(&post.marginal_distribution(&layout.register())?, &heralded);
    Ok(OracleComparison { qpe_tv, heralded_tv, success_delta: (prob - success).abs() })
}
