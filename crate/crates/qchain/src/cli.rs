//! Command-line front end: config ingestion, pipeline orchestration,
//! verification suites, and CSV/JSON emission.
//!
//! Exit status contract: 0 all checks pass, 1 tolerance failure, 2 config or
//! argument parse failure, 3 chain validation failure.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::aba::BetheAnsatz;
use crate::chain::{self, build_chain, spectral_data, validate, ChainModel};
use crate::correlation::{correlation_data, entropy_profile, full_correlation, RegionSpec};
use crate::error::Error;
use crate::heun::{aw_constants, heun_operator, heun_spectrum, projector, verify_aw};
use crate::numerics::{commutator_residual, eig_sym_tridiag, Mat, DEFAULT_EIG_TOL};
use crate::qkernel::{self, ChainParams};
use crate::tq::{solve_tq, tq_residual};

pub const EXIT_OK: i32 = 0;
pub const EXIT_TOLERANCE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

const DEFAULT_SEED: u64 = 0x51c4_a1de;

#[derive(Parser)]
#[command(
    name = "qchain",
    about = "Entanglement entropy of inhomogeneous free-fermion chains built on q-Racah polynomials",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Print the chain validation report
    Validate(CommonArgs),
    /// Emit (k, omega_k) with numeric-vs-analytic residuals. Columns: k,
    /// omega_analytic, omega_numeric, rel_dev
    Spectrum(CommonArgs),
    /// Emit the (L, S_A) profile and the c_l list for the configured L.
    /// Columns: kind (entropy | mode), index, value
    Entropy(CommonArgs),
    /// Emit T_block eigenvalues and commutator residuals. Columns: kind
    /// (eigenvalue | residual), label, value
    Heun(CommonArgs),
    /// Run the full property suite, one pass/fail line per property.
    /// Columns: property, residual, tolerance, pass
    Verify(CommonArgs),
    /// Emit Bethe roots, defects, Lambda and c(u) per state (beta = delta =
    /// 0). Columns: kind (state | root), state, index, re, im
    Bethe(CommonArgs),
    /// Run the built-in reference configuration (N=49, L=9, K=24) and emit
    /// the three eigenvalue columns side by side. Columns: n, lambda_tq,
    /// minus_rho, lambda_block, dev_tq, dev_rho
    Table1(CommonArgs),
}

#[derive(Args)]
pub struct CommonArgs {
    /// JSON run configuration (required for every subcommand except table1)
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output path; overrides output.path from the config (default stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format; overrides output.format from the config
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// RNG seed for randomized checks; overrides seed from the config
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Copy, Clone, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: ParamsConfig,
    pub region: RegionConfig,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub output: Option<OutputConfig>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub q: f64,
    #[serde(default)]
    pub alpha: Option<f64>,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub n: usize,
    #[serde(default)]
    pub truncate_alpha: bool,
    #[serde(default = "default_hop_sign")]
    pub hop_sign: i8,
}

fn default_hop_sign() -> i8 {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionConfig {
    pub l: usize,
    pub k: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub format: FormatKind,
    #[serde(default)]
    pub path: Option<PathBuf>,
}

#[derive(Debug, Copy, Clone, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatKind {
    Csv,
    Json,
}

impl RunConfig {
    pub fn params(&self) -> Result<ChainParams, CliError> {
        let p = &self.params;
        let out = if p.truncate_alpha {
            ChainParams::truncated(p.q, p.beta, p.gamma, p.delta, p.n, p.hop_sign)
        } else {
            let alpha = p.alpha.ok_or_else(|| {
                CliError::parse("params.alpha is required unless truncate_alpha is set")
            })?;
            ChainParams::new(p.q, alpha, p.beta, p.gamma, p.delta, p.n, p.hop_sign)
        };
        out.map_err(CliError::from)
    }

    pub fn region(&self) -> RegionSpec {
        RegionSpec { l: self.region.l, k: self.region.k }
    }

    pub fn tol(&self, name: &str, default: f64) -> Result<f64, CliError> {
        match self.tolerances.get(name) {
            Some(&t) if t > 0.0 => Ok(t),
            Some(&t) => Err(CliError::parse(format!("tolerance {name} = {t} must be positive"))),
            None => Ok(default),
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn parse(msg: impl Into<String>) -> Self {
        CliError { code: EXIT_PARSE, message: msg.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError { code: EXIT_VALIDATION, message: e.to_string() }
    }
}

/// One emitted table: fixed column order, preformatted cells.
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

impl Table {
    fn new(columns: Vec<&'static str>) -> Self {
        Table { columns, rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let records: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = serde_json::Map::new();
                for (name, cell) in self.columns.iter().zip(row.iter()) {
                    obj.insert((*name).to_string(), serde_json::Value::String(cell.clone()));
                }
                serde_json::Value::Object(obj)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&records).expect("string-valued records");
        s.push('\n');
        s
    }
}

struct Outcome {
    table: Table,
    failures: Vec<String>,
}

/// Parses argv and runs; returns the process exit code.
pub fn run_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            // clap handles --help/--version by printing and signaling success
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli.command) {
        Ok((outcome, args, output)) => {
            if let Err(e) = emit(&outcome.table, args, output.as_ref()) {
                eprintln!("error: {}", e.message);
                return e.code;
            }
            if outcome.failures.is_empty() {
                EXIT_OK
            } else {
                for f in &outcome.failures {
                    eprintln!("check failed: {f}");
                }
                EXIT_TOLERANCE
            }
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

type Dispatched<'a> = (Outcome, &'a CommonArgs, Option<OutputConfig>);

fn dispatch(command: &Command) -> Result<Dispatched<'_>, CliError> {
    match command {
        Command::Validate(a) => {
            let mut cfg = load_config(a)?;
            Ok((cmd_validate(&cfg)?, a, cfg.output.take()))
        }
        Command::Spectrum(a) => {
            let mut cfg = load_config(a)?;
            Ok((cmd_spectrum(&cfg)?, a, cfg.output.take()))
        }
        Command::Entropy(a) => {
            let mut cfg = load_config(a)?;
            Ok((cmd_entropy(&cfg)?, a, cfg.output.take()))
        }
        Command::Heun(a) => {
            let mut cfg = load_config(a)?;
            Ok((cmd_heun(&cfg)?, a, cfg.output.take()))
        }
        Command::Verify(a) => {
            let mut cfg = load_config(a)?;
            let seed = a.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
            Ok((cmd_verify(&cfg, seed)?, a, cfg.output.take()))
        }
        Command::Bethe(a) => {
            let mut cfg = load_config(a)?;
            Ok((cmd_bethe(&cfg)?, a, cfg.output.take()))
        }
        Command::Table1(a) => Ok((cmd_table1()?, a, None)),
    }
}

fn load_config(args: &CommonArgs) -> Result<RunConfig, CliError> {
    let path = args
        .config
        .as_ref()
        .ok_or_else(|| CliError::parse("--config is required for this subcommand"))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::parse(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::parse(format!("invalid config {}: {e}", path.display())))
}

/// CLI flags win over the config output block; the fallback is CSV on stdout.
fn emit(table: &Table, args: &CommonArgs, output: Option<&OutputConfig>) -> Result<(), CliError> {
    let format = args
        .format
        .map(|f| match f {
            FormatArg::Csv => FormatKind::Csv,
            FormatArg::Json => FormatKind::Json,
        })
        .or(output.map(|o| o.format))
        .unwrap_or(FormatKind::Csv);
    let text = match format {
        FormatKind::Csv => table.to_csv(),
        FormatKind::Json => table.to_json(),
    };
    let path = args.out.as_ref().or_else(|| output.and_then(|o| o.path.as_ref()));
    match path {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::parse(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn build_validated(cfg: &RunConfig) -> Result<ChainModel, CliError> {
    let p = cfg.params()?;
    build_chain(&p).map_err(CliError::from)
}

fn cmd_validate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = cfg.params()?;
    let report = validate(&p);
    let mut table = Table::new(vec!["status", "detail"]);
    if report.is_valid() {
        table.push(vec!["valid".into(), String::new()]);
        Ok(Outcome { table, failures: Vec::new() })
    } else {
        for v in &report.violations {
            table.push(vec!["invalid".into(), v.clone()]);
        }
        // a validation failure is its own exit class, not a tolerance failure
        Err(CliError { code: EXIT_VALIDATION, message: report.to_string() })
    }
}

fn cmd_spectrum(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let m = build_validated(cfg)?;
    let tol = cfg.tol("spectrum", 1e-9)?;
    let p = &m.params;
    let dec = eig_sym_tridiag(&chain::hopping_matrix(&m), DEFAULT_EIG_TOL)?;
    let omegas: Vec<f64> = (0..=p.n).map(|k| qkernel::omega(p, k)).collect();
    let mut order: Vec<usize> = (0..=p.n).collect();
    order.sort_by(|&a, &b| omegas[a].total_cmp(&omegas[b]));

    let mut table = Table::new(vec!["k", "omega_analytic", "omega_numeric", "rel_dev"]);
    let mut failures = Vec::new();
    let mut rows: Vec<(usize, f64, f64, f64)> = Vec::new();
    for (pos, &k) in order.iter().enumerate() {
        let numeric = dec.values[pos];
        let dev = (numeric - omegas[k]).abs() / omegas[k].abs().max(1.0);
        rows.push((k, omegas[k], numeric, dev));
    }
    rows.sort_by_key(|r| r.0);
    for (k, omega, numeric, dev) in rows {
        if dev > tol {
            failures.push(format!("omega_{k} deviates by {dev:e} (tol {tol:e})"));
        }
        table.push(vec![k.to_string(), fmt_float(omega), fmt_float(numeric), fmt_float(dev)]);
    }
    Ok(Outcome { table, failures })
}

fn cmd_entropy(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let m = build_validated(cfg)?;
    let r = cfg.region();
    let mode_tol = cfg.tol("mode_interval", 1e-10)?;
    let s = spectral_data(&m)?;
    // K = N fills every mode; the Heun region bound K <= N-1 does not apply
    // to the entropy itself, so take blocks of the full (identity) projector
    let (profile, modes) = if r.k == m.params.n {
        let chat = full_correlation(&s, r.k);
        let mut profile = Vec::new();
        let mut modes = Vec::new();
        for l in 0..m.params.n {
            let block = crate::numerics::DenseSym::symmetrized(chat.mat().block(l + 1));
            let dec = crate::numerics::eig_dense_sym(&block, DEFAULT_EIG_TOL)?;
            profile.push((l, crate::correlation::entanglement_entropy(&dec.values)?));
            if l == r.l {
                modes = dec.values;
            }
        }
        (profile, modes)
    } else {
        let profile = entropy_profile(&s, r.k, 0..m.params.n)?;
        let data = correlation_data(&s, &r)?;
        (profile, data.c_eigs)
    };

    let mut table = Table::new(vec!["kind", "index", "value"]);
    let mut failures = Vec::new();
    for (l, entropy) in profile {
        if entropy < 0.0 {
            failures.push(format!("S_A < 0 at L = {l}: {entropy:e}"));
        }
        table.push(vec!["entropy".into(), l.to_string(), fmt_float(entropy)]);
    }
    for (i, &c) in modes.iter().enumerate() {
        if c < -mode_tol || c > 1.0 + mode_tol {
            failures.push(format!("c_{i} = {c:e} outside [0, 1] (tol {mode_tol:e})"));
        }
        table.push(vec!["mode".into(), i.to_string(), fmt_float(c)]);
    }
    Ok(Outcome { table, failures })
}

fn cmd_heun(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let m = build_validated(cfg)?;
    let r = cfg.region();
    let tol = cfg.tol("commutator", 1e-10)?;
    let s = spectral_data(&m)?;
    let h = heun_operator(&m, &r)?;
    let spec = heun_spectrum(&h)?;
    let data = correlation_data(&s, &r)?;

    let chat = full_correlation(&s, r.k);
    let res_proj = commutator_residual(&h.t, &projector(m.params.n + 1, r.l))?;
    let res_chat = commutator_residual(&h.t, chat.mat())?;
    let res_block = commutator_residual(h.t_block.mat(), data.c.mat())?;

    let mut table = Table::new(vec!["kind", "label", "value"]);
    let mut failures = Vec::new();
    for (i, v) in spec.eig.values.iter().enumerate() {
        table.push(vec!["eigenvalue".into(), i.to_string(), fmt_float(*v)]);
    }
    for (label, res) in [
        ("comm_T_projector", res_proj),
        ("comm_T_Chat", res_chat),
        ("comm_Tblock_C", res_block),
    ] {
        if res > tol {
            failures.push(format!("{label} = {res:e} (tol {tol:e})"));
        }
        table.push(vec!["residual".into(), label.into(), fmt_float(res)]);
    }
    Ok(Outcome { table, failures })
}

fn orthonormality_dev(phi: &Mat) -> f64 {
    let n = phi.size();
    let mut worst = 0.0f64;
    for transpose in [false, true] {
        for a in 0..n {
            for b in a..n {
                let dot: f64 = (0..n)
                    .map(|t| if transpose { phi[(t, a)] * phi[(t, b)] } else { phi[(a, t)] * phi[(b, t)] })
                    .sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
    }
    worst
}

fn cmd_verify(cfg: &RunConfig, seed: u64) -> Result<Outcome, CliError> {
    let m = build_validated(cfg)?;
    let r = cfg.region();
    let p = m.params;
    let s = spectral_data(&m)?;
    let h = heun_operator(&m, &r)?;
    let spec = heun_spectrum(&h)?;
    let data = correlation_data(&s, &r)?;
    let chat = full_correlation(&s, r.k);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut checks: Vec<(String, f64, f64)> = Vec::new();
    let tol_orth = cfg.tol("orthonormality", 1e-8)?;
    let tol_spec = cfg.tol("spectrum", 1e-9)?;
    let tol_comm = cfg.tol("commutator", 1e-10)?;
    let tol_aw = cfg.tol("askey_wilson", 1e-9)?;
    let tol_exch = cfg.tol("exchange", 1e-9)?;
    let tol_weight = cfg.tol("weight_sum", 1e-10)?;
    let tol_diag = cfg.tol("common_eigenbasis", 1e-9)?;
    let tol_tq = cfg.tol("tq_match", 1e-8)?;

    checks.push(("phi_orthonormality".into(), orthonormality_dev(&s.phi), tol_orth));

    let dec = eig_sym_tridiag(&chain::hopping_matrix(&m), DEFAULT_EIG_TOL)?;
    let mut sorted_omegas = s.omegas.clone();
    sorted_omegas.sort_by(f64::total_cmp);
    let spec_dev = dec
        .values
        .iter()
        .zip(sorted_omegas.iter())
        .map(|(v, w)| (v - w).abs() / w.abs().max(1.0))
        .fold(0.0f64, f64::max);
    checks.push(("spectrum_match".into(), spec_dev, tol_spec));

    let weight_sum: f64 = (0..=p.n)
        .map(|k| qkernel::weight(&p, k).map(|w| w.value()))
        .sum::<Result<f64, Error>>()?;
    checks.push(("weight_normalization".into(), (weight_sum - 1.0).abs(), tol_weight));

    checks.push((
        "comm_T_projector".into(),
        commutator_residual(&h.t, &projector(p.n + 1, r.l))?,
        tol_comm,
    ));
    checks.push(("comm_T_Chat".into(), commutator_residual(&h.t, chat.mat())?, tol_comm));
    checks.push((
        "comm_Tblock_C".into(),
        commutator_residual(h.t_block.mat(), data.c.mat())?,
        tol_comm,
    ));

    let a = chain::hopping_matrix(&m).to_mat();
    let astar = Mat::from_diag(&chain::astar_diagonal(&p, p.n));
    let (aw1, aw2) = verify_aw(&a, &astar, &aw_constants(&p), p.q);
    checks.push(("askey_wilson_1".into(), aw1, tol_aw));
    checks.push(("askey_wilson_2".into(), aw2, tol_aw));

    let ansatz = BetheAnsatz::new(m.clone(), r)?;
    let mut sample = || {
        C64::new(rng.gen_range(0.5..1.4), rng.gen_range(-0.5..0.5))
    };
    let mut dor1: f64 = 0.0;
    let mut dor2: Option<f64> = None;
    for _ in 0..3 {
        let (r1, r2) = ansatz.verify_exchange(sample(), sample(), 1)?;
        dor1 = dor1.max(r1);
        if let Some(r2) = r2 {
            dor2 = Some(dor2.unwrap_or(0.0).max(r2));
        }
    }
    checks.push(("exchange_dor1".into(), dor1, tol_exch));
    if let Some(d2) = dor2 {
        checks.push(("exchange_dor2".into(), d2, tol_exch));
        let (be4, _) = ansatz.heun_from_dyn_a(sample(), &h.t)?;
        checks.push(("heun_reconstruction".into(), be4, tol_exch));
    }

    // common eigenbasis: Heun block eigenvectors diagonalize C
    let dim = r.l + 1;
    let v = Mat::from_fn(dim, |i, j| spec.eig.vectors[j][i]);
    let vtcv = v.transpose().matmul(data.c.mat()).matmul(&v);
    let mut offdiag: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            if i != j {
                offdiag = offdiag.max(vtcv[(i, j)].abs());
            }
        }
    }
    checks.push(("common_eigenbasis".into(), offdiag, tol_diag));

    if p.beta == 0.0 && p.delta == 0.0 {
        let tq = solve_tq(&p, &r)?;
        let tq_dev = tq
            .lambdas
            .iter()
            .zip(spec.eig.values.iter())
            .map(|(a, b)| (a - b).abs() / b.abs().max(1.0))
            .fold(0.0f64, f64::max);
        checks.push(("tq_vs_heun_spectrum".into(), tq_dev, tol_tq));

        let samples: Vec<C64> = (0..20)
            .map(|_| C64::new(rng.gen_range(0.2..2.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let qdiff = tq
            .states
            .iter()
            .map(|st| tq_residual(&p, &r, st, &samples))
            .fold(0.0f64, f64::max);
        checks.push(("tq_functional_identity".into(), qdiff, tol_tq));
    }

    let mut table = Table::new(vec!["property", "residual", "tolerance", "pass"]);
    let mut failures = Vec::new();
    for (name, res, tol) in checks {
        let pass = res <= tol;
        if !pass {
            failures.push(format!("{name} = {res:e} (tol {tol:e})"));
        }
        table.push(vec![name, fmt_float(res), fmt_float(tol), pass.to_string()]);
    }
    Ok(Outcome { table, failures })
}

fn cmd_bethe(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let m = build_validated(cfg)?;
    let r = cfg.region();
    let p = m.params;
    let tol_defect = cfg.tol("bethe_defect", 1e-8)?;
    let s = spectral_data(&m)?;
    let ansatz = BetheAnsatz::new(m, r)?;
    let tq = solve_tq(&p, &r)?;
    // thermo comes in n order; states are sorted by ascending lambda
    let mut thermo = tq.thermo.clone();
    thermo.sort_by(f64::total_cmp);

    let mut table = Table::new(vec!["kind", "state", "index", "re", "im"]);
    let mut failures = Vec::new();
    for (i, state) in tq.states.iter().enumerate() {
        let defect = state.residuals.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        if defect > tol_defect {
            failures.push(format!("state {i}: Bethe defect {defect:e} (tol {tol_defect:e})"));
        }
        let c_val = ansatz.c_eigenvalue_beta0(state, &s)?;
        table.push(vec![
            "state".into(),
            i.to_string(),
            "lambda".into(),
            fmt_float(state.lambda.re),
            fmt_float(state.lambda.im),
        ]);
        table.push(vec![
            "state".into(),
            i.to_string(),
            "minus_rho".into(),
            fmt_float(thermo[i]),
            fmt_float(0.0),
        ]);
        table.push(vec![
            "state".into(),
            i.to_string(),
            "defect".into(),
            fmt_float(defect),
            fmt_float(0.0),
        ]);
        table.push(vec![
            "state".into(),
            i.to_string(),
            "c_eigenvalue".into(),
            fmt_float(c_val),
            fmt_float(0.0),
        ]);
        for (j, u) in state.u_big.iter().enumerate() {
            table.push(vec![
                "root".into(),
                i.to_string(),
                j.to_string(),
                fmt_float(u.re),
                fmt_float(u.im),
            ]);
        }
    }
    Ok(Outcome { table, failures })
}

fn cmd_table1() -> Result<Outcome, CliError> {
    let p = ChainParams::truncated(0.8, 0.0, 0.5, 0.0, 49, 1)?;
    let r = RegionSpec { l: 9, k: 24 };
    let m = build_chain(&p)?;
    let h = heun_operator(&m, &r)?;
    let spec = heun_spectrum(&h)?;
    let tq = solve_tq(&p, &r)?;
    let mut thermo = tq.thermo.clone();
    thermo.sort_by(f64::total_cmp);

    let mut table =
        Table::new(vec!["n", "lambda_tq", "minus_rho", "lambda_block", "dev_tq", "dev_rho"]);
    let mut failures = Vec::new();
    for n in 0..=r.l {
        let block = spec.eig.values[n];
        let dev_tq = (tq.lambdas[n] - block).abs() / block.abs().max(1.0);
        let dev_rho = (thermo[n] - block).abs() / block.abs().max(1.0);
        if dev_tq > 1e-4 {
            failures.push(format!("n = {n}: TQ root off by {dev_tq:e} (tol 1e-4)"));
        }
        if dev_rho > 5e-2 {
            failures.push(format!("n = {n}: -rho_n off by {dev_rho:e} (tol 5e-2)"));
        }
        table.push(vec![
            n.to_string(),
            fmt_float(tq.lambdas[n]),
            fmt_float(thermo[n]),
            fmt_float(block),
            fmt_float(dev_tq),
            fmt_float(dev_rho),
        ]);
    }
    Ok(Outcome { table, failures })
}
