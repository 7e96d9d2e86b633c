//! Closed-form phase estimation for diagonal Hamiltonians.
//!
//! A computational basis state with (offset) energy `E` leaves the register in
//! `Σ_p a(E, p) |p> / 2^{N_R}` where `a(E, p) = Σ_y exp(2πi (lE - p) y / 2^{N_R})`.
//! Basis states are grouped by energy level so only one register profile is
//! computed per distinct level.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::export::fmt_float;
use crate::hamiltonians::DiagonalHamiltonian;
use crate::spectrum::{order_key, Spectrum, DEFAULT_ENUMERATION_CAP};

pub const MAX_REGISTER: usize = 20;
const NORM_TOL: f64 = 1e-12;
const BIN_TOL: f64 = 1e-10;

/// Register size `N_R` and energy scale `l`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegisterConfig {
    n_register: usize,
    scale: f64,
}

impl RegisterConfig {
    pub fn new(n_register: usize, scale: f64) -> Result<Self> {
        if !(1..=MAX_REGISTER).contains(&n_register) {
            return Err(Error::RegisterSize(n_register));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidScale(scale));
        }
        Ok(Self { n_register, scale })
    }

    pub fn n_register(&self) -> usize {
        self.n_register
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `2^{N_R}`, the number of register values.
    pub fn size(&self) -> usize {
        1 << self.n_register
    }
}

/// `a(E, p)` for one energy and one register value.
pub fn register_amplitude(energy: f64, p: usize, cfg: &RegisterConfig) -> Result<Complex64> {
    if p >= cfg.size() {
        return Err(Error::RegisterValue { p, n_register: cfg.n_register });
    }
    Ok(amplitude(cfg.scale * energy - p as f64, cfg.size() as f64))
}

fn amplitude(x: f64, m: f64) -> Complex64 {
    let mut r = x.rem_euclid(m);
    if r > m / 2.0 {
        r -= m;
    }
    if r.abs() < 1e-12 {
        return Complex64::new(m, 0.0);
    }
    let magnitude = (PI * r).sin() / (PI * r / m).sin();
    Complex64::from_polar(magnitude, PI * r * (m - 1.0) / m)
}

/// `|a(E, p)|² / 2^{2 N_R}` for every `p`: the register distribution of one eigenstate.
pub fn register_profile(energy: f64, cfg: &RegisterConfig) -> Vec<f64> {
    let m = cfg.size() as f64;
    (0..cfg.size()).map(|p| amplitude(cfg.scale * energy - p as f64, m).norm_sqr() / (m * m)).collect()
}

/// Amplitudes `b_i` of the system register in the computational basis.
#[derive(Clone, Debug, PartialEq)]
pub struct InitialState {
    amplitudes: Vec<Complex64>,
}

impl InitialState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL || !amplitudes.len().is_power_of_two() {
            return Err(Error::Unnormalized(norm));
        }
        Ok(Self { amplitudes })
    }

    /// The equal superposition `|+>^n`.
    pub fn uniform(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        Self { amplitudes: vec![Complex64::new((dim as f64).recip().sqrt(), 0.0); dim] }
    }

    /// A single computational basis state.
    pub fn basis(n_qubits: usize, bits: u64) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[bits as usize] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn n_qubits(&self) -> usize {
        self.amplitudes.len().trailing_zeros() as usize
    }
}

/// Configuration hazards detected while running phase estimation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum QpeWarning {
    /// `l · max(E - α)` reaches `2^{N_R}`, so high levels wrap onto low register values.
    Aliasing { max_scaled_energy: f64, register_size: usize },
    /// `α` exceeds the ground energy, so the ground level has negative offset energy.
    OffsetAboveGround { min_energy: f64 },
}

/// Basis states sharing one offset energy, with their total weight and register profile.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelBlock {
    energy: f64,
    states: Vec<u64>,
    probabilities: StateWeights,
    mass: f64,
    register: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
enum StateWeights {
    Uniform(f64),
    Explicit(Vec<f64>),
}

impl LevelBlock {
    /// Offset energy `E - α`.
    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn states(&self) -> &[u64] {
        &self.states
    }

    /// `|b_i|²` of the `idx`-th state in [`Self::states`].
    pub fn state_probability(&self, idx: usize) -> f64 {
        match &self.probabilities {
            StateWeights::Uniform(w) => *w,
            StateWeights::Explicit(ws) => ws[idx],
        }
    }

    /// `Σ |b_i|²` over the level.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Register distribution conditioned on this level; sums to 1.
    pub fn register(&self) -> &[f64] {
        &self.register
    }
}

/// Joint weights `|b_i|² |a_{i,p}|² / 2^{2N_R}` stored per level, plus the register marginal.
#[derive(Clone, Debug, PartialEq)]
pub struct QpeResult {
    n_qubits: usize,
    config: RegisterConfig,
    blocks: Vec<LevelBlock>,
    register_distribution: Vec<f64>,
    warnings: Vec<QpeWarning>,
}

impl QpeResult {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn config(&self) -> &RegisterConfig {
        &self.config
    }

    /// Levels in ascending energy order.
    pub fn blocks(&self) -> &[LevelBlock] {
        &self.blocks
    }

    /// `P(p)`.
    pub fn register_distribution(&self) -> &[f64] {
        &self.register_distribution
    }

    pub fn warnings(&self) -> &[QpeWarning] {
        &self.warnings
    }

    /// Joint weight of basis state `state` and register value `p`.
    pub fn joint_weight(&self, state: u64, p: usize) -> f64 {
        self.blocks
            .iter()
            .find_map(|b| b.states.iter().position(|&s| s == state).map(|idx| b.state_probability(idx) * b.register[p]))
            .unwrap_or(0.0)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "p,probability")?;
        for (p, prob) in self.register_distribution.iter().enumerate() {
            writeln!(out, "{},{}", p, fmt_float(*prob))?;
        }
        Ok(())
    }

    fn from_levels(
        n_qubits: usize,
        levels: BTreeMap<u64, (f64, Vec<u64>, StateWeights)>,
        extremes: (f64, f64),
        cfg: &RegisterConfig,
    ) -> Self {
        let blocks: Vec<LevelBlock> = levels
            .into_values()
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|(energy, states, probabilities)| {
                let mass = match &probabilities {
                    StateWeights::Uniform(w) => w * states.len() as f64,
                    StateWeights::Explicit(ws) => ws.iter().sum(),
                };
                LevelBlock { energy, register: register_profile(energy, cfg), states, probabilities, mass }
            })
            .collect();
        let mut register_distribution = vec![0.0; cfg.size()];
        for b in &blocks {
            for (acc, w) in register_distribution.iter_mut().zip(&b.register) {
                *acc += b.mass * w;
            }
        }
        let (min_energy, max_energy) = extremes;
        let mut warnings = Vec::new();
        if cfg.scale * max_energy >= cfg.size() as f64 {
            warnings
                .push(QpeWarning::Aliasing { max_scaled_energy: cfg.scale * max_energy, register_size: cfg.size() });
        }
        if min_energy < 0.0 {
            warnings.push(QpeWarning::OffsetAboveGround { min_energy });
        }
        Self { n_qubits, config: *cfg, blocks, register_distribution, warnings }
    }
}

fn check_size(h: &DiagonalHamiltonian) -> Result<()> {
    if h.n_qubits() > DEFAULT_ENUMERATION_CAP {
        return Err(Error::TooManyQubits { n_qubits: h.n_qubits(), cap: DEFAULT_ENUMERATION_CAP });
    }
    Ok(())
}

/// Phase estimation of `h` (energies include `-α`) from the initial state `b`.
pub fn run_qpe(h: &DiagonalHamiltonian, b: &InitialState, cfg: &RegisterConfig) -> Result<QpeResult> {
    check_size(h)?;
    if b.amplitudes.len() != 1 << h.n_qubits() {
        return Err(Error::LengthMismatch { expected: 1 << h.n_qubits(), got: b.amplitudes.len() });
    }
    let mut levels: BTreeMap<u64, (f64, Vec<u64>, Vec<f64>)> = BTreeMap::new();
    let mut extremes = (f64::INFINITY, f64::NEG_INFINITY);
    for (x, amp) in b.amplitudes.iter().enumerate() {
        let e = h.energy(x as u64);
        extremes = (extremes.0.min(e), extremes.1.max(e));
        let w = amp.norm_sqr();
        if w > 0.0 {
            let level = levels.entry(order_key(e)).or_insert_with(|| (e, Vec::new(), Vec::new()));
            level.1.push(x as u64);
            level.2.push(w);
        }
    }
    let levels = levels.into_iter().map(|(k, (e, s, w))| (k, (e, s, StateWeights::Explicit(w)))).collect();
    Ok(QpeResult::from_levels(h.n_qubits(), levels, extremes, cfg))
}

/// Phase estimation from `|+>^n` without materialising the amplitude vector.
pub fn run_qpe_uniform(h: &DiagonalHamiltonian, cfg: &RegisterConfig) -> Result<QpeResult> {
    check_size(h)?;
    let n = h.n_qubits();
    let energies: Vec<f64> = (0..1u64 << n).into_par_iter().map(|x| h.energy(x)).collect();
    let weight = 1.0 / (1u64 << n) as f64;
    let mut levels: BTreeMap<u64, (f64, Vec<u64>, StateWeights)> = BTreeMap::new();
    let mut extremes = (f64::INFINITY, f64::NEG_INFINITY);
    for (x, &e) in energies.iter().enumerate() {
        extremes = (extremes.0.min(e), extremes.1.max(e));
        levels.entry(order_key(e)).or_insert_with(|| (e, Vec::new(), StateWeights::Uniform(weight))).1.push(x as u64);
    }
    Ok(QpeResult::from_levels(n, levels, extremes, cfg))
}

/// One register outcome read as an energy estimate `p / l`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyEstimate {
    pub p: usize,
    pub probability: f64,
    pub energy: f64,
}

/// Register values with non-negligible probability, most likely first; ties go to smaller `p`.
pub fn energy_estimates(result: &QpeResult, cfg: &RegisterConfig) -> Vec<EnergyEstimate> {
    let mut out: Vec<EnergyEstimate> = result
        .register_distribution
        .iter()
        .enumerate()
        .filter(|(_, &prob)| prob > BIN_TOL)
        .map(|(p, &probability)| EnergyEstimate { p, probability, energy: p as f64 / cfg.scale })
        .collect();
    out.sort_by_key(|e| (std::cmp::Reverse((e.probability / BIN_TOL).round() as u64), e.p));
    out
}

/// Smallest register with `2^{N_R} > l (E_max - E_0)` (no aliasing), provided
/// the first gap is resolved (`l ΔE >= 1`). `None` when the gap is unresolved
/// or no register up to `MAX_REGISTER` suffices.
pub fn minimal_register_qubits(spectrum: &Spectrum, scale: f64) -> Option<usize> {
    if spectrum.gap().is_some_and(|g| scale * g < 1.0) {
        return None;
    }
    let range = scale * (spectrum.max_energy() - spectrum.ground_energy());
    (1..=MAX_REGISTER).find(|&n| (1u64 << n) as f64 > range)
}
