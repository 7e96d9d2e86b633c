//! Command-line runner for the QPE-QITE experiments.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qpe_qite::circuit::compare_with_closed_form;
use qpe_qite::export::fmt_bits;
use qpe_qite::fit::linear_fit;
use qpe_qite::hamiltonians::{
    labs_energy_hamiltonian, labs_hamiltonian, sidelobe_energy, DiagonalHamiltonian, SpinSequence,
};
use qpe_qite::qite::{min_tau, sweep_rows, MinTau, SWEEP_COLUMNS};
use qpe_qite::qpe::{minimal_register_qubits, run_qpe_uniform, QpeWarning, RegisterConfig};
use qpe_qite::spectrum::{enumerate_spectrum, load_archive, Spectrum, DEFAULT_ENUMERATION_CAP};
use qpe_qite::synthesis::{
    resource_report, sk_chain, EpsilonNet, SynthesisResult, UarMode, Unitary2, DEFAULT_NET_LENGTH, MAX_DEPTH,
};

use table::{Cell, Table};

const VALIDATE_TOLERANCE: f64 = 1e-10;

#[derive(Parser, Debug)]
#[command(
    name = "qpe-qite",
    version,
    about = "Ground-state estimation for LABS by phase estimation and imaginary-time filtering"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sidelobe and Hamiltonian energy of one spin sequence.
    Energy(EnergyArgs),
    /// Full spectrum of the LABS energy operator.
    Spectrum(SpectrumArgs),
    /// Register distribution after phase estimation from the uniform state.
    Qpe(QpeArgs),
    /// Ground overlap and success probability over an imaginary-time grid.
    QiteSweep(SweepArgs),
    /// Smallest imaginary time reaching a ground-overlap threshold.
    MinTau(MinTauArgs),
    /// Minimal register size per problem size, with a logarithmic fit.
    NrScaling(ScalingArgs),
    /// Clifford+T approximation of a single-qubit rotation.
    Synth(SynthArgs),
    /// Rotation, CNOT and T counts of the full circuit.
    Resources(ResourceArgs),
    /// Compares the gate-level circuit against the closed form.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct Output {
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args, Debug)]
struct Problem {
    /// Sequence length N.
    #[arg(long)]
    n: usize,
    /// Energy offset: a number, or `auto` for the optimal energy.
    #[arg(long, default_value = "auto")]
    alpha: String,
    /// File of `N energy` lines with known optimal energies.
    #[arg(long)]
    archive: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Register {
    /// Number of register qubits N_R.
    #[arg(long)]
    n_register: usize,
    /// Energy scale l.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
}

#[derive(Args, Debug)]
struct TauGrid {
    #[arg(long, default_value_t = 0.0)]
    tau_start: f64,
    #[arg(long, default_value_t = 1.0)]
    tau_stop: f64,
    #[arg(long, default_value_t = 101)]
    tau_steps: usize,
    /// Read the grid in units of 2^N - 1.
    #[arg(long)]
    normalized: bool,
}

#[derive(Args, Debug)]
struct EnergyArgs {
    /// Spin sequence written with `+` and `-`.
    #[arg(long)]
    sequence: String,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[arg(long)]
    n: usize,
    /// Energy offset subtracted from every level.
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct QpeArgs {
    #[command(flatten)]
    problem: Problem,
    #[command(flatten)]
    register: Register,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    problem: Problem,
    #[command(flatten)]
    register: Register,
    #[command(flatten)]
    grid: TauGrid,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct MinTauArgs {
    #[command(flatten)]
    problem: Problem,
    #[command(flatten)]
    register: Register,
    #[command(flatten)]
    grid: TauGrid,
    /// Required ground overlap.
    #[arg(long, default_value_t = 0.999)]
    threshold: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct ScalingArgs {
    #[arg(long, default_value_t = 4)]
    n_min: usize,
    #[arg(long, default_value_t = 16)]
    n_max: usize,
    /// Energy scale l.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Axis {
    X,
    Y,
    Z,
}

#[derive(Args, Debug)]
struct SynthArgs {
    /// Rotation axis of the target.
    #[arg(long, value_enum, default_value = "z")]
    axis: Axis,
    /// Rotation angle of the target.
    #[arg(long, conflicts_with = "uar_p", required_unless_present = "uar_p")]
    angle: Option<f64>,
    /// Synthesise the ancilla rotation Ry(2 e^{-p tau}) for this register value instead.
    #[arg(long)]
    uar_p: Option<usize>,
    /// Imaginary time for `--uar-p`.
    #[arg(long, default_value_t = 1.0, requires = "uar_p")]
    tau: f64,
    /// Recursion depth, 0..=8.
    #[arg(long, default_value_t = 3)]
    depth: usize,
    /// Stop at the first depth whose error is at most this.
    #[arg(long)]
    eps: Option<f64>,
    /// Longest word in the base net, 1..=16.
    #[arg(long, default_value_t = DEFAULT_NET_LENGTH)]
    net_length: usize,
    /// Emit one CSV/JSON row per depth instead of the final word.
    #[arg(long)]
    sweep: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum UarChoice {
    Multiplexor,
    Taylor0,
    Taylor1,
}

#[derive(Args, Debug)]
struct ResourceArgs {
    #[command(flatten)]
    problem: Problem,
    #[command(flatten)]
    register: Register,
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    /// Target error per rotation.
    #[arg(long, default_value_t = 1e-2)]
    eps: f64,
    #[arg(long, default_value_t = 3)]
    depth: usize,
    #[arg(long, default_value_t = DEFAULT_NET_LENGTH)]
    net_length: usize,
    /// How the ancilla rotation stage is compiled.
    #[arg(long, value_enum, default_value = "multiplexor")]
    uar: UarChoice,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[command(flatten)]
    problem: Problem,
    #[command(flatten)]
    register: Register,
    #[arg(long, default_value_t = 5.0)]
    tau: f64,
    #[command(flatten)]
    output: Output,
}

impl Output {
    fn setup(&self) -> Result<()> {
        if let Some(jobs) = self.jobs {
            if jobs == 0 {
                bail!("--jobs must be at least 1");
            }
            rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global()?;
        }
        Ok(())
    }

    fn emit(&self, table: &Table) -> Result<()> {
        let mut sink: Box<dyn Write> = match &self.out {
            Some(path) => Box::new(BufWriter::new(
                File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
            )),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        match self.format {
            Format::Csv => table.write_csv(&mut sink)?,
            Format::Json => table.write_json(&mut sink)?,
        }
        sink.flush()?;
        Ok(())
    }
}

impl Problem {
    fn hamiltonian(&self) -> Result<DiagonalHamiltonian> {
        Ok(labs_energy_hamiltonian(self.n)?)
    }

    /// Offset from `--alpha`; `auto` takes the archive value when given, else brute force.
    fn alpha(&self, spectrum: Option<&Spectrum>) -> Result<f64> {
        if self.alpha != "auto" {
            return self.alpha.parse().map_err(|_| anyhow!("--alpha must be a number or `auto`, got `{}`", self.alpha));
        }
        if let Some(path) = &self.archive {
            let entries = load_archive(path).with_context(|| format!("cannot read archive {}", path.display()))?;
            return entries
                .iter()
                .find(|e| e.n == self.n)
                .map(|e| e.optimal_energy)
                .ok_or_else(|| anyhow!("archive {} has no entry for N={}", path.display(), self.n));
        }
        if let Some(s) = spectrum {
            return Ok(s.ground_energy());
        }
        if self.n > DEFAULT_ENUMERATION_CAP {
            bail!("--alpha auto needs --archive for N above {DEFAULT_ENUMERATION_CAP}");
        }
        Ok(enumerate_spectrum(&self.hamiltonian()?)?.ground_energy())
    }
}

impl Register {
    fn config(&self) -> Result<RegisterConfig> {
        Ok(RegisterConfig::new(self.n_register, self.scale)?)
    }
}

impl TauGrid {
    fn values(&self, n: usize) -> Result<Vec<f64>> {
        if self.tau_steps == 0 {
            bail!("--tau-steps must be at least 1");
        }
        if !(self.tau_start >= 0.0 && self.tau_stop >= self.tau_start) {
            bail!("tau grid needs 0 <= --tau-start <= --tau-stop");
        }
        let unit = if self.normalized { ((1u64 << n) - 1) as f64 } else { 1.0 };
        let span = self.tau_stop - self.tau_start;
        let last = (self.tau_steps - 1).max(1) as f64;
        Ok((0..self.tau_steps).map(|i| unit * (self.tau_start + span * i as f64 / last)).collect())
    }
}

fn report_warnings(warnings: &[QpeWarning]) {
    for w in warnings {
        match w {
            QpeWarning::Aliasing { max_scaled_energy, register_size } => eprintln!(
                "warning: scaled energies up to {max_scaled_energy} exceed the register size {register_size} and alias"
            ),
            QpeWarning::OffsetAboveGround { min_energy } => {
                eprintln!("warning: alpha lies above the ground energy (lowest shifted energy {min_energy})")
            }
        }
    }
}

fn cmd_energy(args: &EnergyArgs) -> Result<Table> {
    let seq = SpinSequence::parse(&args.sequence)?;
    let h = labs_hamiltonian(seq.len())?;
    let mut t = Table::new(&["sequence", "bitstring", "sidelobe_energy", "hamiltonian_energy"]);
    t.push(vec![
        seq.to_string().into(),
        fmt_bits(seq.to_bits(), seq.len()).into(),
        sidelobe_energy(&seq).into(),
        h.energy(seq.to_bits()).into(),
    ]);
    Ok(t)
}

fn cmd_spectrum(args: &SpectrumArgs) -> Result<Table> {
    let h = labs_energy_hamiltonian(args.n)?.with_offset(args.alpha);
    let s = enumerate_spectrum(&h)?;
    eprintln!(
        "ground energy {}, degeneracy {}, gap {}",
        s.ground_energy(),
        s.ground_set().len(),
        s.gap().map_or("none".into(), |g| g.to_string())
    );
    let mut t = Table::new(&["bitstring", "energy"]);
    for (bits, &e) in s.energies().iter().enumerate() {
        t.push(vec![fmt_bits(bits as u64, args.n).into(), e.into()]);
    }
    Ok(t)
}

fn cmd_qpe(args: &QpeArgs) -> Result<Table> {
    let cfg = args.register.config()?;
    let h = args.problem.hamiltonian()?;
    let alpha = args.problem.alpha(None)?;
    let result = run_qpe_uniform(&h.with_offset(alpha), &cfg)?;
    report_warnings(result.warnings());
    let mut t = Table::new(&["p", "probability"]);
    for (p, &prob) in result.register_distribution().iter().enumerate() {
        t.push(vec![p.into(), prob.into()]);
    }
    Ok(t)
}

fn cmd_qite_sweep(args: &SweepArgs) -> Result<Table> {
    let cfg = args.register.config()?;
    let taus = args.grid.values(args.problem.n)?;
    let h = args.problem.hamiltonian()?;
    let spectrum = enumerate_spectrum(&h)?;
    let alpha = args.problem.alpha(Some(&spectrum))?;
    let qpe = run_qpe_uniform(&h.with_offset(alpha), &cfg)?;
    report_warnings(qpe.warnings());
    let mut t = Table::new(&SWEEP_COLUMNS);
    for r in sweep_rows(&qpe, spectrum.ground_set(), &taus)? {
        t.push(vec![
            r.tau.into(),
            r.tau_normalized.into(),
            r.ground_overlap.into(),
            r.success_probability.into(),
            r.overlap_no_qite.into(),
        ]);
    }
    Ok(t)
}

fn cmd_min_tau(args: &MinTauArgs) -> Result<Table> {
    let cfg = args.register.config()?;
    let taus = args.grid.values(args.problem.n)?;
    let h = args.problem.hamiltonian()?;
    let spectrum = enumerate_spectrum(&h)?;
    let alpha = args.problem.alpha(Some(&spectrum))?;
    let qpe = run_qpe_uniform(&h.with_offset(alpha), &cfg)?;
    report_warnings(qpe.warnings());
    let mut t = Table::new(&[
        "n",
        "n_register",
        "scale",
        "alpha",
        "found",
        "tau",
        "tau_normalized",
        "ground_overlap",
        "success_probability",
    ]);
    let head: Vec<Cell> = vec![args.problem.n.into(), cfg.n_register().into(), cfg.scale().into(), alpha.into()];
    let tail: Vec<Cell> = match min_tau(&qpe, spectrum.ground_set(), args.threshold, &taus)? {
        MinTau::Found { tau, tau_normalized, outcome } => vec![
            true.into(),
            tau.into(),
            tau_normalized.into(),
            outcome.ground_overlap.into(),
            outcome.success_probability.into(),
        ],
        MinTau::NotFound { max_overlap } => {
            eprintln!("threshold {} not reached on the grid; best overlap {max_overlap}", args.threshold);
            vec![false.into(), Cell::Empty, Cell::Empty, max_overlap.into(), Cell::Empty]
        }
    };
    t.push(head.into_iter().chain(tail).collect());
    Ok(t)
}

fn cmd_nr_scaling(args: &ScalingArgs) -> Result<Table> {
    if args.n_min < 2 || args.n_max < args.n_min {
        bail!("need 2 <= --n-min <= --n-max");
    }
    if args.n_max > DEFAULT_ENUMERATION_CAP {
        bail!("--n-max above {DEFAULT_ENUMERATION_CAP} needs first-excited energies, which brute force cannot supply");
    }
    if !(args.scale > 0.0) {
        bail!("--scale must be positive");
    }
    let mut t = Table::new(&["n", "ground_energy", "gap", "max_energy", "n_register"]);
    t.note(format!("minimal N_R: smallest N_R with 2^N_R > l (E_max - E_0), requiring l dE >= 1; l = {}", args.scale));
    let mut points = Vec::new();
    for n in args.n_min..=args.n_max {
        let s = enumerate_spectrum(&labs_energy_hamiltonian(n)?)?;
        let n_r = minimal_register_qubits(&s, args.scale);
        if let Some(r) = n_r {
            points.push(((n as f64).ln(), r as f64));
        }
        t.push(vec![
            n.into(),
            s.ground_energy().into(),
            s.gap().map_or(Cell::Empty, Cell::from),
            s.max_energy().into(),
            n_r.map_or(Cell::Empty, Cell::from),
        ]);
    }
    if points.len() >= 2 {
        let (xs, ys): (Vec<f64>, Vec<f64>) = points.into_iter().unzip();
        match linear_fit(&xs, &ys) {
            Ok(f) => eprintln!("fit: N_R = {:.6} + {:.6} ln N, rms residual {:.6}", f.intercept, f.slope, f.residual),
            Err(e) => eprintln!("fit unavailable: {e}"),
        }
    }
    Ok(t)
}

fn synth_target(args: &SynthArgs) -> Result<Unitary2> {
    if let Some(p) = args.uar_p {
        if !(args.tau >= 0.0) {
            bail!("--tau must be non-negative");
        }
        return Ok(Unitary2::ry(2.0 * (-(p as f64) * args.tau).exp()));
    }
    let theta = args.angle.expect("clap requires --angle without --uar-p");
    Ok(match args.axis {
        Axis::X => Unitary2::rx(theta),
        Axis::Y => Unitary2::ry(theta),
        Axis::Z => Unitary2::rz(theta),
    })
}

fn synth_chain(args: &SynthArgs) -> Result<Vec<SynthesisResult>> {
    if args.depth > MAX_DEPTH {
        bail!("--depth must lie in 0..={MAX_DEPTH}");
    }
    if args.eps.is_some_and(|e| !(e > 0.0)) {
        bail!("--eps must be positive");
    }
    let net = EpsilonNet::build(args.net_length)?;
    let mut chain = sk_chain(&synth_target(args)?, args.depth, &net)?;
    if let Some(eps) = args.eps {
        if let Some(hit) = chain.iter().position(|r| r.error <= eps) {
            chain.truncate(hit + 1);
        } else {
            eprintln!("warning: eps {eps} not reached by depth {}", args.depth);
        }
    }
    Ok(chain)
}

fn synth_table(chain: &[SynthesisResult]) -> Table {
    let mut t = Table::new(&["depth", "error", "t_count", "length"]);
    for (d, r) in chain.iter().enumerate() {
        t.push(vec![d.into(), r.error.into(), r.t_count.into(), r.word.len().into()]);
    }
    t
}

fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let chain = synth_chain(args)?;
    if args.sweep {
        return args.output.emit(&synth_table(&chain));
    }
    let best = chain.last().expect("chain includes depth 0");
    match args.output.format {
        Format::Json => {
            let mut t = Table::new(&["word", "error", "t_count"]);
            t.push(vec![best.word.to_string().into(), best.error.into(), best.t_count.into()]);
            args.output.emit(&t)
        }
        Format::Csv => {
            let text = format!("{best}\n");
            match &args.output.out {
                Some(path) => std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
                None => io::stdout().write_all(text.as_bytes()).map_err(Into::into),
            }
        }
    }
}

fn cmd_resources(args: &ResourceArgs) -> Result<Table> {
    let cfg = args.register.config()?;
    let h = args.problem.hamiltonian()?;
    let alpha = args.problem.alpha(None)?;
    if args.depth > MAX_DEPTH {
        bail!("--depth must lie in 0..={MAX_DEPTH}");
    }
    let mode = match args.uar {
        UarChoice::Multiplexor => UarMode::Multiplexor,
        UarChoice::Taylor0 => UarMode::Taylor(0),
        UarChoice::Taylor1 => UarMode::Taylor(1),
    };
    let net = EpsilonNet::build(args.net_length)?;
    let r = resource_report(&h.with_offset(alpha), &cfg, args.tau, args.eps, &net, args.depth, mode)?;
    eprintln!(
        "|H| = {}, qpe rotations {}, qft rotations {} (+{} Hadamards), uar rotations {}, T total {}",
        h.num_terms(),
        r.qpe_rotations,
        r.qft_rotations,
        r.qft_hadamards,
        r.uar_rotations,
        r.t_total
    );
    if !r.target_reached {
        eprintln!("warning: eps {} not reached at depth {}; worst rotation error {}", r.eps, args.depth, r.max_error);
    }
    let mut t = Table::new(&["stage", "rotations", "cnots", "t_count", "eps_used"]);
    for s in &r.stages {
        t.push(vec![s.stage.clone().into(), s.rotations.into(), s.cnots.into(), s.t_count.into(), s.eps_used.into()]);
    }
    let rotations: usize = r.stages.iter().map(|s| s.rotations).sum();
    t.push(vec![
        "total".to_string().into(),
        rotations.into(),
        r.cnot_total.into(),
        r.t_total.into(),
        r.max_error.into(),
    ]);
    Ok(t)
}

fn cmd_validate(args: &ValidateArgs) -> Result<Table> {
    let cfg = args.register.config()?;
    let h = args.problem.hamiltonian()?;
    let alpha = args.problem.alpha(None)?;
    let c = compare_with_closed_form(&h.with_offset(alpha), &cfg, args.tau)?;
    eprintln!("total variation distance {}", qpe_qite::export::fmt_float(c.heralded_tv));
    let mut t = Table::new(&["n", "n_register", "tau", "qpe_tv", "heralded_tv", "success_delta"]);
    t.push(vec![
        args.problem.n.into(),
        cfg.n_register().into(),
        args.tau.into(),
        c.qpe_tv.into(),
        c.heralded_tv.into(),
        c.success_delta.into(),
    ]);
    if c.max_deviation() > VALIDATE_TOLERANCE {
        args.output.emit(&t)?;
        bail!("circuit and closed form differ by {} (tolerance {VALIDATE_TOLERANCE})", c.max_deviation());
    }
    Ok(t)
}

fn run(cli: Cli) -> Result<()> {
    let output = match &cli.command {
        Command::Energy(a) => &a.output,
        Command::Spectrum(a) => &a.output,
        Command::Qpe(a) => &a.output,
        Command::QiteSweep(a) => &a.output,
        Command::MinTau(a) => &a.output,
        Command::NrScaling(a) => &a.output,
        Command::Synth(a) => &a.output,
        Command::Resources(a) => &a.output,
        Command::Validate(a) => &a.output,
    };
    output.setup()?;
    let table = match &cli.command {
        Command::Energy(a) => cmd_energy(a)?,
        Command::Spectrum(a) => cmd_spectrum(a)?,
        Command::Qpe(a) => cmd_qpe(a)?,
        Command::QiteSweep(a) => cmd_qite_sweep(a)?,
        Command::MinTau(a) => cmd_min_tau(a)?,
        Command::NrScaling(a) => cmd_nr_scaling(a)?,
        Command::Synth(a) => return cmd_synth(a),
        Command::Resources(a) => cmd_resources(a)?,
        Command::Validate(a) => cmd_validate(a)?,
    };
    output.emit(&table)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;
    use qpe_qite::qite::normalized_tau;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn tau_grid_endpoints() {
        let g = TauGrid { tau_start: 0.0, tau_stop: 1.0, tau_steps: 101, normalized: true };
        let v = g.values(3).unwrap();
        assert_eq!(v.len(), 101);
        assert_eq!(v[0], 0.0);
        assert!((v[100] - 7.0).abs() < 1e-12);
        assert!((normalized_tau(v[50], 3) - 0.5).abs() < 1e-12);
        let single = TauGrid { tau_start: 2.0, tau_stop: 2.0, tau_steps: 1, normalized: false };
        assert_eq!(single.values(3).unwrap(), vec![2.0]);
        assert!(TauGrid { tau_start: 1.0, tau_stop: 0.0, tau_steps: 3, normalized: false }.values(3).is_err());
    }
}
