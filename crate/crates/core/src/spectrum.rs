//! Exhaustive spectra of diagonal Hamiltonians and the LABS optimum archive.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::export::{fmt_bits, fmt_float};
use crate::fit::{power_law_fit, PowerLawFit};
use crate::hamiltonians::DiagonalHamiltonian;

pub const DEFAULT_ENUMERATION_CAP: usize = 24;

/// Every basis-state energy together with the ground level and the level gap.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    n_qubits: usize,
    energies: Vec<f64>,
    ground_energy: f64,
    ground_set: Vec<u64>,
    gap: Option<f64>,
    max_energy: f64,
}

impl Spectrum {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Energies indexed by bitstring.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn ground_energy(&self) -> f64 {
        self.ground_energy
    }

    /// Bitstrings attaining the ground energy, ascending.
    pub fn ground_set(&self) -> &[u64] {
        &self.ground_set
    }

    /// Distance from the ground level to the next distinct level; `None` for a flat spectrum.
    pub fn gap(&self) -> Option<f64> {
        self.gap
    }

    pub fn max_energy(&self) -> f64 {
        self.max_energy
    }

    /// Distinct energy levels with their multiplicities, ascending.
    pub fn levels(&self) -> Vec<(f64, usize)> {
        let mut counts: BTreeMap<u64, (f64, usize)> = BTreeMap::new();
        for &e in &self.energies {
            counts.entry(order_key(e)).or_insert((e, 0)).1 += 1;
        }
        counts.into_values().collect()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "bitstring,energy")?;
        for (x, &e) in self.energies.iter().enumerate() {
            writeln!(out, "{},{}", fmt_bits(x as u64, self.n_qubits), fmt_float(e))?;
        }
        Ok(())
    }
}

/// Monotone map from finite `f64` to `u64`, so `BTreeMap` keys sort by value.
pub(crate) fn order_key(e: f64) -> u64 {
    let bits = (e + 0.0).to_bits();
    if bits >> 63 == 1 {
        !bits
    } else {
        bits | (1 << 63)
    }
}

pub fn enumerate_spectrum(h: &DiagonalHamiltonian) -> Result<Spectrum> {
    enumerate_spectrum_capped(h, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_spectrum_capped(h: &DiagonalHamiltonian, cap: usize) -> Result<Spectrum> {
    let n = h.n_qubits();
    if n > cap {
        return Err(Error::TooManyQubits { n_qubits: n, cap });
    }
    let energies: Vec<f64> = (0..1u64 << n).into_par_iter().map(|x| h.energy(x)).collect();
    let ground_energy = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let max_energy = energies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ground_set = energies.iter().enumerate().filter(|(_, &e)| e == ground_energy).map(|(x, _)| x as u64).collect();
    let first_excited = energies.iter().copied().filter(|&e| e > ground_energy).fold(f64::INFINITY, f64::min);
    let gap = first_excited.is_finite().then_some(first_excited - ground_energy);
    Ok(Spectrum { n_qubits: n, energies, ground_energy, ground_set, gap, max_energy })
}

/// A known optimal LABS energy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArchiveEntry {
    pub n: usize,
    pub optimal_energy: f64,
}

/// Parses `N E_opt` lines; `#` starts a comment. Entries come back sorted by `n`.
pub fn parse_archive(text: &str) -> Result<Vec<ArchiveEntry>> {
    let mut entries: BTreeMap<usize, ArchiveEntry> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |reason: &str| Error::ArchiveParse { line: line_no, reason: reason.to_string() };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(err("expected two fields `N energy`"));
        }
        let n: usize = fields[0].parse().map_err(|_| err("N is not an integer"))?;
        let optimal_energy: f64 = fields[1].parse().map_err(|_| err("energy is not a number"))?;
        if n < 2 {
            return Err(err("N must be at least 2"));
        }
        if !(optimal_energy >= 0.0) || !optimal_energy.is_finite() {
            return Err(err("energy must be finite and non-negative"));
        }
        if entries.insert(n, ArchiveEntry { n, optimal_energy }).is_some() {
            return Err(Error::ArchiveDuplicate(n));
        }
    }
    Ok(entries.into_values().collect())
}

pub fn load_archive(path: impl AsRef<Path>) -> Result<Vec<ArchiveEntry>> {
    parse_archive(&std::fs::read_to_string(path)?)
}

/// Fits `ΔE ≈ prefactor · N^exponent` from `(N, ΔE)` points.
pub fn fit_gap_exponent(points: &[(usize, f64)]) -> Result<PowerLawFit> {
    let pts: Vec<(f64, f64)> = points.iter().map(|&(n, g)| (n as f64, g)).collect();
    power_law_fit(&pts, 3)
}
