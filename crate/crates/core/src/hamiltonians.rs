//! LABS sidelobe energy and diagonal Hamiltonians built from Pauli-Z monomials.
//!
//! Bitstrings are `u64` values where bit `j` is qubit `j`. A bit `b` maps to
//! the spin `σ = 1 - 2b`, so `|0>` is spin `+1` (the `+1` eigenvector of `Z`).

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Largest qubit count representable by a `u64` bitstring.
pub const MAX_QUBITS: usize = 64;

/// A `±1` sequence of length at least 2.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpinSequence {
    spins: Vec<i8>,
}

impl SpinSequence {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if spins.len() < 2 {
            return Err(Error::SequenceTooShort(spins.len()));
        }
        if let Some(&bad) = spins.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::InvalidSpin(bad as i64));
        }
        Ok(Self { spins })
    }

    /// Sequence encoded by the low `n` bits of `bits`.
    pub fn from_bits(bits: u64, n: usize) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits { n_qubits: n, cap: MAX_QUBITS });
        }
        Self::new((0..n).map(|j| 1 - 2 * ((bits >> j) & 1) as i8).collect())
    }

    /// Parses a string of `+`/`-` characters.
    pub fn parse(s: &str) -> Result<Self> {
        let spins = s
            .chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                other => Err(Error::InvalidParameter(format!("unexpected spin character {other:?}"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        Self::new(spins)
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    pub fn to_bits(&self) -> u64 {
        self.spins.iter().enumerate().filter(|(_, &s)| s == -1).fold(0, |acc, (j, _)| acc | (1 << j))
    }

    pub fn flipped(&self) -> Self {
        Self { spins: self.spins.iter().map(|s| -s).collect() }
    }

    pub fn reversed(&self) -> Self {
        Self { spins: self.spins.iter().rev().copied().collect() }
    }
}

impl std::fmt::Display for SpinSequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &s in &self.spins {
            f.write_str(if s == 1 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

/// Aperiodic autocorrelation at lag `k`, `Σ_{i} σ_i σ_{i+k}`.
pub fn autocorrelation(seq: &SpinSequence, k: usize) -> Result<i64> {
    let n = seq.len();
    if k == 0 || k >= n {
        return Err(Error::LagOutOfRange { k, max: n - 1 });
    }
    let s = seq.spins();
    Ok((0..n - k).map(|i| (s[i] * s[i + k]) as i64).sum())
}

/// Sum of squared autocorrelations over every lag `1..N`.
pub fn sidelobe_energy(seq: &SpinSequence) -> i64 {
    (1..seq.len())
        .map(|k| {
            let a = autocorrelation(seq, k).expect("lag in range");
            a * a
        })
        .sum()
}

/// `Σ_{k=1}^{N-1} (N - k)`: the sidelobe energy minus the LABS operator, for every sequence.
pub fn labs_offset(n: usize) -> i64 {
    (n as i64) * (n as i64 - 1) / 2
}

/// A product of `Z` operators on a set of qubits with a real coefficient.
///
/// The empty set is the identity (a constant term).
#[derive(Clone, Debug, PartialEq)]
pub struct ZMonomial {
    qubits: Vec<usize>,
    coefficient: f64,
}

impl ZMonomial {
    /// Indices are sorted; duplicates are rejected since `Z_j Z_j = I` is never intended.
    pub fn new(mut qubits: Vec<usize>, coefficient: f64) -> Result<Self> {
        qubits.sort_unstable();
        if let Some(w) = qubits.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateQubit(w[0]));
        }
        Ok(Self { qubits, coefficient })
    }

    pub fn constant(coefficient: f64) -> Self {
        Self { qubits: Vec::new(), coefficient }
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn is_constant(&self) -> bool {
        self.qubits.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.qubits.len()
    }

    fn mask(&self) -> u64 {
        self.qubits.iter().fold(0, |m, &q| m | (1 << q))
    }
}

/// `Σ coeff · Π Z - alpha` on `n_qubits` qubits with canonical (merged) terms.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalHamiltonian {
    n_qubits: usize,
    terms: Vec<ZMonomial>,
    masks: Vec<(u64, f64)>,
    alpha: f64,
}

impl DiagonalHamiltonian {
    /// Merges monomials sharing an index set and drops those whose coefficients cancel.
    pub fn new(n_qubits: usize, terms: impl IntoIterator<Item = ZMonomial>) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits { n_qubits, cap: MAX_QUBITS });
        }
        let mut merged: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        for term in terms {
            if let Some(&q) = term.qubits.iter().find(|&&q| q >= n_qubits) {
                return Err(Error::QubitOutOfRange { index: q, n_qubits });
            }
            *merged.entry(term.qubits).or_insert(0.0) += term.coefficient;
        }
        // BTreeMap order: constant first, then lexicographic index sets.
        let terms: Vec<ZMonomial> = merged
            .into_iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|(qubits, coefficient)| ZMonomial { qubits, coefficient })
            .collect();
        let masks = terms.iter().map(|t| (t.mask(), t.coefficient)).collect();
        Ok(Self { n_qubits, terms, masks, alpha: 0.0 })
    }

    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::new(n_qubits, std::iter::empty())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[ZMonomial] {
        &self.terms
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `|H|`: the number of non-identity monomials.
    pub fn num_terms(&self) -> usize {
        self.terms.iter().filter(|t| !t.is_constant()).count()
    }

    /// Coefficient of the identity monomial (zero when absent). Does not include `alpha`.
    pub fn constant(&self) -> f64 {
        self.terms.iter().find(|t| t.is_constant()).map_or(0.0, |t| t.coefficient)
    }

    pub fn with_offset(&self, alpha: f64) -> Self {
        Self { alpha, ..self.clone() }
    }

    /// Energy of the computational basis state `bits` (bit `j` = qubit `j`).
    pub fn energy(&self, bits: u64) -> f64 {
        let sum: f64 =
            self.masks.iter().map(|&(mask, c)| if (bits & mask).count_ones() & 1 == 0 { c } else { -c }).sum();
        sum - self.alpha
    }

    /// Energy of a bitstring given as a slice of bits.
    pub fn evaluate(&self, bits: &[bool]) -> Result<f64> {
        if bits.len() != self.n_qubits {
            return Err(Error::LengthMismatch { expected: self.n_qubits, got: bits.len() });
        }
        let x = bits.iter().enumerate().fold(0u64, |x, (j, &b)| x | ((b as u64) << j));
        Ok(self.energy(x))
    }
}

/// The LABS operator: four-body terms `Z_i Z_{i+t} Z_{i+k} Z_{i+k+t}` (t < k) with
/// coefficient 4 and two-body terms `Z_i Z_{i+2k}` with coefficient 2, 0-based.
///
/// Its energy equals `sidelobe_energy - labs_offset(n)` on every bitstring.
pub fn labs_hamiltonian(n: usize) -> Result<DiagonalHamiltonian> {
    if n < 2 {
        return Err(Error::ProblemTooSmall(n));
    }
    let mut terms = Vec::new();
    // 1-based loop bounds; integer division floors the half-range limits.
    for i in 1..=n.saturating_sub(3) {
        for t in 1..=(n - i - 1) / 2 {
            for k in t + 1..=n - i - t {
                let q = vec![i - 1, i + t - 1, i + k - 1, i + k + t - 1];
                terms.push(ZMonomial::new(q, 4.0)?);
            }
        }
    }
    for i in 1..=n.saturating_sub(2) {
        for k in 1..=(n - i) / 2 {
            terms.push(ZMonomial::new(vec![i - 1, i + 2 * k - 1], 2.0)?);
        }
    }
    DiagonalHamiltonian::new(n, terms)
}

/// The LABS operator plus the constant `labs_offset(n)`, so energies are sidelobe energies.
pub fn labs_energy_hamiltonian(n: usize) -> Result<DiagonalHamiltonian> {
    let h = labs_hamiltonian(n)?;
    let terms = h.terms.into_iter().chain(std::iter::once(ZMonomial::constant(labs_offset(n) as f64)));
    DiagonalHamiltonian::new(n, terms)
}
