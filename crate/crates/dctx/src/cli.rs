//! Command logic behind the `dctx` binary: scenario presets, validation
//! suites, time sweeps, `(t_l, t_r)` scans and CSV emission.
//!
//! All output is CSV (comma separator, `.` decimal, LF line endings, header
//! always present) with floating-point values printed to 12 significant
//! digits, so reruns with identical flags and seed are byte-identical.

use std::collections::HashMap;
use std::fmt;
use std::io::Write;
use std::path::Path;

use crate::evolution::{
    evolve_joint, evolve_sectors, joint_two_particle_kraus, lindblad_oracle,
    sector_deviation_accessible, single_particle_kraus, DecayParams, SectorLabel,
};
use crate::inequalities::{
    chsh_renormalized, dynamical_chsh, kcbs_decay_value, mermin3_decay, mp_decay_generic,
    optimal_cycle_signs, optimal_square_signs, ChshMode, ChshSettings, CriterionResult,
};
use crate::linalg::{bloch_projector, ComplexMatrix, ComplexVector};
use crate::observables::{magic_square, Pentagram, SignAssignment, VectorMode};
use crate::optimizer::{
    chsh_optimal_settings, kcbs_sweep, optimize_pentagram, OptimizerConfig, SignMode,
};
use crate::{Error, Result};

/// Initial-state presets, written in the mass basis `{|1>, |2>}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateLabel {
    PsiPlus,
    PsiMinus,
    PhiPlus,
    PhiMinus,
    Ghz,
    Custom,
}

impl StateLabel {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "psi-plus" => Ok(Self::PsiPlus),
            "psi-minus" => Ok(Self::PsiMinus),
            "phi-plus" => Ok(Self::PhiPlus),
            "phi-minus" => Ok(Self::PhiMinus),
            "ghz" => Ok(Self::Ghz),
            other => Err(Error::Usage(format!(
                "unknown state '{other}' (expected psi-plus|psi-minus|phi-plus|phi-minus|ghz)"
            ))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::PsiPlus => "psi-plus",
            Self::PsiMinus => "psi-minus",
            Self::PhiPlus => "phi-plus",
            Self::PhiMinus => "phi-minus",
            Self::Ghz => "ghz",
            Self::Custom => "custom",
        }
    }

    /// Density matrix of the preset.
    pub fn density_matrix(&self) -> Result<ComplexMatrix> {
        let s = 1.0 / 2f64.sqrt();
        let v = match self {
            Self::PsiPlus => ComplexVector::from_real(&[0.0, s, s, 0.0]),
            Self::PsiMinus => ComplexVector::from_real(&[0.0, s, -s, 0.0]),
            Self::PhiPlus => ComplexVector::from_real(&[s, 0.0, 0.0, s]),
            Self::PhiMinus => ComplexVector::from_real(&[s, 0.0, 0.0, -s]),
            Self::Ghz => {
                let mut e = vec![0.0; 8];
                e[0] = s;
                e[7] = s;
                ComplexVector::from_real(&e)
            }
            Self::Custom => {
                return Err(Error::Usage(
                    "custom states have no preset density matrix".into(),
                ))
            }
        };
        Ok(v.projector())
    }

    pub fn n_particles(&self) -> usize {
        match self {
            Self::Ghz => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A named run configuration: physical constants plus the initial state.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub params: DecayParams,
    pub initial_state: ComplexMatrix,
    pub state_label: StateLabel,
}

impl Scenario {
    pub fn preset(label: StateLabel, params: DecayParams) -> Result<Self> {
        Ok(Self {
            name: label.as_str().to_string(),
            params,
            initial_state: label.density_matrix()?,
            state_label: label,
        })
    }
}

/// Plain-text `key = value` configuration file. Unknown keys are hard
/// errors; flags override file values.
#[derive(Debug, Default, Clone)]
pub struct FileConfig {
    values: HashMap<String, String>,
}

const KNOWN_KEYS: &[&str] = &[
    "seed",
    "suite",
    "criterion",
    "state",
    "t-max",
    "steps",
    "optimize",
    "signs",
    "mode",
    "out",
    "projector",
    "grid",
    "gamma1",
    "gamma2",
    "delta-m",
    "restarts",
    "max-iterations",
    "penalty-weight",
    "tolerance",
    "pentagram-out",
];

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Usage(format!(
                    "config line {}: expected 'key = value', got '{line}'",
                    lineno + 1
                )));
            };
            let key = key.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(Error::Usage(format!(
                    "config line {}: unknown key '{key}'",
                    lineno + 1
                )));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Parse a typed value from the file.
    pub fn get_parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|e| {
                Error::Usage(format!("config key '{key}': bad value '{raw}': {e}"))
            }),
        }
    }
}

/// Seed fallback chain: explicit flag, config file, `DCTX_SEED`, then 0.
pub fn resolve_seed(flag: Option<u64>, config: &FileConfig) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Some(s) = config.get_parsed::<u64>("seed")? {
        return Ok(s);
    }
    match std::env::var("DCTX_SEED") {
        Ok(raw) => raw
            .parse::<u64>()
            .map_err(|e| Error::Usage(format!("DCTX_SEED: bad value '{raw}': {e}"))),
        Err(_) => Ok(0),
    }
}

/// 12-significant-digit scientific form used in every CSV cell.
pub fn fmt_sig(x: f64) -> String {
    format!("{:.11e}", x)
}

fn fmt_bool(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

/// Uniform grid of `steps >= 2` points over `[0, t_max]`.
pub fn time_grid(t_max: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(Error::Usage(format!("steps must be >= 2, got {steps}")));
    }
    if t_max < 0.0 {
        return Err(Error::Usage(format!("t-max must be >= 0, got {t_max}")));
    }
    Ok((0..steps)
        .map(|i| t_max * i as f64 / (steps - 1) as f64)
        .collect())
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

/// Validation suites runnable from the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidateSuite {
    Kraus,
    Lindblad,
    Signs,
    Square,
    All,
}

impl ValidateSuite {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "kraus" => Ok(Self::Kraus),
            "lindblad" => Ok(Self::Lindblad),
            "signs" => Ok(Self::Signs),
            "square" => Ok(Self::Square),
            "all" => Ok(Self::All),
            other => Err(Error::Usage(format!(
                "unknown suite '{other}' (expected kraus|lindblad|signs|square|all)"
            ))),
        }
    }
}

struct CheckReport {
    all_passed: bool,
}

fn report_check<W: Write + ?Sized>(
    out: &mut W,
    report: &mut CheckReport,
    name: &str,
    residual: f64,
    tol: f64,
) -> Result<()> {
    let passed = residual <= tol;
    report.all_passed &= passed;
    writeln!(
        out,
        "{} {} {:.3e}",
        if passed { "PASS" } else { "FAIL" },
        name,
        residual
    )
    .map_err(|e| Error::Usage(format!("write failed: {e}")))?;
    Ok(())
}

fn param_grid() -> Vec<DecayParams> {
    let mut grid = vec![DecayParams::kaon()];
    for &g1 in &[0.0, 0.4, 1.0, 2.5] {
        for &g2 in &[0.0, 1.0 / 600.0, 0.7] {
            for &dm in &[0.0, 0.5] {
                grid.push(DecayParams::new(g1, g2, dm).expect("nonnegative rates"));
            }
        }
    }
    grid
}

fn validate_kraus<W: Write + ?Sized>(out: &mut W, report: &mut CheckReport) -> Result<()> {
    let times = [0.0, 0.1, 0.8, 2.0, 5.0];
    let id2 = ComplexMatrix::identity(2);
    let id4 = ComplexMatrix::identity(4);
    let mut single: f64 = 0.0;
    let mut joint: f64 = 0.0;
    for p in param_grid() {
        for &t in &times {
            let (ks, kd) = single_particle_kraus(&p, t)?;
            let sum = ks.adjoint().mul(&ks).add(&kd.adjoint().mul(&kd));
            single = single.max(sum.max_abs_diff(&id2));
            let (kss, kdd) = joint_two_particle_kraus(&p, t)?;
            let sum = kss.adjoint().mul(&kss).add(&kdd.adjoint().mul(&kdd));
            joint = joint.max(sum.max_abs_diff(&id4));
        }
    }
    report_check(out, report, "kraus_completeness_single", single, 1e-12)?;
    report_check(out, report, "kraus_completeness_joint", joint, 1e-12)?;

    let psi = StateLabel::PsiMinus.density_matrix()?;
    let phi = StateLabel::PhiPlus.density_matrix()?;
    let p = DecayParams::kaon();
    let mut conservation: f64 = 0.0;
    let mut purity: f64 = 0.0;
    let mut monotonic: f64 = 0.0;
    for rho0 in [&psi, &phi] {
        let mut last = f64::INFINITY;
        for &t in &times {
            let st = evolve_sectors(rho0, &[p, p], &[t, t])?;
            let total: f64 = st.blocks().map(|(_, b)| b.trace().re).sum();
            conservation = conservation.max((total - 1.0).abs());
            let w = st.surviving_trace();
            if w > 1e-12 {
                let norm = st
                    .block(&SectorLabel::all_survived(2))
                    .scale(num_complex::Complex64::new(1.0 / w, 0.0));
                purity = purity.max((norm.mul(&norm).trace().re - 1.0).abs());
            }
            monotonic = monotonic.max(w - last);
            last = w;
        }
    }
    report_check(out, report, "sector_trace_conservation", conservation, 1e-10)?;
    report_check(out, report, "surviving_purity", purity, 1e-10)?;
    report_check(out, report, "decay_monotonicity", monotonic.max(0.0), 1e-12)?;
    Ok(())
}

fn validate_lindblad<W: Write + ?Sized>(out: &mut W, report: &mut CheckReport) -> Result<()> {
    let kaon = DecayParams::kaon();
    let other = DecayParams::new(0.9, 0.3, -0.6).expect("valid");
    let psi = StateLabel::PsiMinus.density_matrix()?;
    let single = ComplexVector::from_entries(vec![
        num_complex::Complex64::new(0.8, 0.1),
        num_complex::Complex64::new(-0.3, 0.5),
    ])
    .normalized(1e-12)
    .expect("nonzero")
    .projector();

    let mut dev_n1: f64 = 0.0;
    for p in [kaon, other] {
        for &t in &[0.5, 2.0] {
            let steps = crate::evolution::default_oracle_steps(t);
            let kraus = evolve_sectors(&single, &[p], &[t])?;
            let oracle = lindblad_oracle(&single, &[p], t, steps)?;
            dev_n1 = dev_n1.max(sector_deviation_accessible(&kraus, &oracle));
        }
    }
    report_check(out, report, "lindblad_vs_kraus_n1", dev_n1, 1e-8)?;

    let t = 1.0;
    let steps = crate::evolution::default_oracle_steps(t);
    let kraus = evolve_sectors(&psi, &[kaon, kaon], &[t, t])?;
    let oracle = lindblad_oracle(&psi, &[kaon, kaon], t, steps)?;
    let dev_n2 = sector_deviation_accessible(&kraus, &oracle);
    report_check(out, report, "lindblad_vs_kraus_n2", dev_n2, 1e-8)?;
    Ok(())
}

fn validate_signs<W: Write + ?Sized>(out: &mut W, report: &mut CheckReport) -> Result<()> {
    let (_, c3) = optimal_cycle_signs(3)?;
    let (_, c4) = optimal_cycle_signs(4)?;
    let (_, c5) = optimal_cycle_signs(5)?;
    report_check(out, report, "c_min(3)=-1", (c3 + 1) as f64, 0.0)?;
    report_check(out, report, "c_min(4)=-4", (c4 + 4) as f64, 0.0)?;
    report_check(out, report, "c_min(5)=-3", (c5 + 3) as f64, 0.0)?;
    let (_, best) = optimal_square_signs();
    report_check(out, report, "mp_sign_max=4", (best - 4) as f64, 0.0)?;
    Ok(())
}

fn validate_square<W: Write + ?Sized>(out: &mut W, report: &mut CheckReport) -> Result<()> {
    report_check(out, report, "magic_square_invariants", magic_square().verify(), 1e-12)
}

/// Run a validation suite, printing one `PASS/FAIL <name> <residual>` line
/// per check; returns process exit code (0 iff everything passed).
pub fn run_validate<W: Write + ?Sized>(suite: ValidateSuite, out: &mut W) -> Result<i32> {
    let mut report = CheckReport { all_passed: true };
    match suite {
        ValidateSuite::Kraus => validate_kraus(out, &mut report)?,
        ValidateSuite::Lindblad => validate_lindblad(out, &mut report)?,
        ValidateSuite::Signs => validate_signs(out, &mut report)?,
        ValidateSuite::Square => validate_square(out, &mut report)?,
        ValidateSuite::All => {
            validate_kraus(out, &mut report)?;
            validate_lindblad(out, &mut report)?;
            validate_signs(out, &mut report)?;
            validate_square(out, &mut report)?;
        }
    }
    Ok(if report.all_passed { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

/// Criteria available to the sweep command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    Kcbs,
    Mp,
    Mermin3,
    Chsh,
}

impl Criterion {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "kcbs" => Ok(Self::Kcbs),
            "mp" => Ok(Self::Mp),
            "mermin3" => Ok(Self::Mermin3),
            "chsh" => Ok(Self::Chsh),
            other => Err(Error::Usage(format!(
                "unknown criterion '{other}' (expected kcbs|mp|mermin3|chsh)"
            ))),
        }
    }
}

/// Whether the measurement configuration is re-optimized at every grid point
/// or frozen at its `t = 0` optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimizeMode {
    PerTime,
    Fixed,
}

impl OptimizeMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "per-time" => Ok(Self::PerTime),
            "fixed" => Ok(Self::Fixed),
            other => Err(Error::Usage(format!(
                "unknown optimize mode '{other}' (expected per-time|fixed)"
            ))),
        }
    }
}

/// Fully resolved sweep invocation.
#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub criterion: Criterion,
    pub scenario: Scenario,
    pub t_max: f64,
    pub steps: usize,
    pub optimize: OptimizeMode,
    pub sign_mode: SignMode,
    pub vector_mode: VectorMode,
    pub optimizer: OptimizerConfig,
    /// Persist the final grid point's optimized pentagram (kcbs only).
    pub pentagram_out: Option<std::path::PathBuf>,
}

fn write_sweep_row<W: Write + ?Sized>(
    out: &mut W,
    t: f64,
    res: &CriterionResult,
    extra: Option<(f64, &str)>,
) -> Result<()> {
    let mut line = format!(
        "{},{},{},{},{}",
        fmt_sig(t),
        fmt_sig(res.surviving_weight),
        fmt_sig(res.value),
        fmt_sig(res.classical_bound),
        fmt_bool(res.violated)
    );
    if let Some((naive, mode)) = extra {
        line.push_str(&format!(",{},{mode}", fmt_sig(naive)));
    }
    writeln!(out, "{line}").map_err(|e| Error::Usage(format!("write failed: {e}")))
}

/// Time sweep of one criterion; CSV to `out`.
pub fn run_sweep<W: Write + ?Sized>(opts: &SweepOptions, out: &mut W) -> Result<()> {
    let grid = time_grid(opts.t_max, opts.steps)?;
    let n = opts.scenario.state_label.n_particles();
    let two_particle = n == 2;
    match opts.criterion {
        Criterion::Kcbs | Criterion::Mp | Criterion::Chsh if !two_particle => {
            return Err(Error::Usage(format!(
                "criterion requires a two-particle state, got {}",
                opts.scenario.state_label
            )));
        }
        Criterion::Mermin3 if two_particle => {
            return Err(Error::Usage(
                "criterion mermin3 requires the ghz state".into(),
            ));
        }
        _ => {}
    }
    let rho0 = &opts.scenario.initial_state;
    let params = &opts.scenario.params;
    match opts.criterion {
        Criterion::Kcbs => {
            writeln!(
                out,
                "t,surviving_weight,value,classical_bound,violated,value_naive,optimizer_mode"
            )
            .map_err(|e| Error::Usage(format!("write failed: {e}")))?;
            let mut cfg = opts.optimizer.clone();
            cfg.mode = opts.vector_mode;
            let mode_name = opts.vector_mode.as_str();
            match opts.optimize {
                OptimizeMode::PerTime => {
                    let points = kcbs_sweep(rho0, params, &grid, &cfg, opts.sign_mode)?;
                    for pt in &points {
                        write_sweep_row(
                            out,
                            pt.time,
                            &pt.result,
                            Some((pt.value_naive, mode_name)),
                        )?;
                    }
                    if let Some(path) = &opts.pentagram_out {
                        persist_pentagram(path, &points.last().expect("grid nonempty").pentagram)?;
                    }
                }
                OptimizeMode::Fixed => {
                    let (pg, _) = optimize_pentagram(rho0, &cfg)?;
                    let optimal_signs = optimal_cycle_signs(5)?.0;
                    let naive_signs = SignAssignment::all_minus(5);
                    for &t in &grid {
                        let js = evolve_joint(rho0, params, t)?;
                        let optimal = kcbs_decay_value(&pg, &optimal_signs, &js)?;
                        let naive = kcbs_decay_value(&pg, &naive_signs, &js)?;
                        let primary = match opts.sign_mode {
                            SignMode::Optimal => &optimal,
                            SignMode::Naive => &naive,
                        };
                        write_sweep_row(out, t, primary, Some((naive.value, mode_name)))?;
                    }
                    if let Some(path) = &opts.pentagram_out {
                        persist_pentagram(path, &pg)?;
                    }
                }
            }
        }
        Criterion::Mp => {
            writeln!(out, "t,surviving_weight,value,classical_bound,violated")
                .map_err(|e| Error::Usage(format!("write failed: {e}")))?;
            let square = magic_square();
            let signs = optimal_square_signs().0;
            for &t in &grid {
                let js = evolve_joint(rho0, params, t)?;
                let res = mp_decay_generic(&square, &signs, &js)?;
                write_sweep_row(out, t, &res, None)?;
            }
        }
        Criterion::Mermin3 => {
            writeln!(out, "t,surviving_weight,value,classical_bound,violated")
                .map_err(|e| Error::Usage(format!("write failed: {e}")))?;
            for &t in &grid {
                let st = evolve_sectors(rho0, &[*params; 3], &[t; 3])?;
                let res = mermin3_decay(&st)?;
                write_sweep_row(out, t, &res, None)?;
            }
        }
        Criterion::Chsh => {
            writeln!(out, "t,surviving_weight,value,classical_bound,violated")
                .map_err(|e| Error::Usage(format!("write failed: {e}")))?;
            let fixed_settings = match opts.optimize {
                OptimizeMode::Fixed => Some(chsh_optimal_settings(rho0)?.0),
                OptimizeMode::PerTime => None,
            };
            let mut last_settings: Option<ChshSettings> = None;
            for &t in &grid {
                let js = evolve_joint(rho0, params, t)?;
                let settings = match (&fixed_settings, js.surviving_trace()) {
                    (Some(s), _) => s.clone(),
                    (None, w) if w > 1e-12 => {
                        let normalized = js
                            .rho_s()
                            .scale(num_complex::Complex64::new(1.0 / w, 0.0));
                        let s = chsh_optimal_settings(&normalized)?.0;
                        last_settings = Some(s.clone());
                        s
                    }
                    // Nothing left to optimize on; keep the last settings.
                    (None, _) => last_settings.clone().unwrap_or_else(ChshSettings::tsirelson),
                };
                let res = chsh_renormalized(&settings, &js)?;
                write_sweep_row(out, t, &res, None)?;
            }
        }
    }
    Ok(())
}

fn persist_pentagram(path: &Path, pg: &Pentagram) -> Result<()> {
    std::fs::write(path, pg.to_text())
        .map_err(|e| Error::Usage(format!("cannot write {}: {e}", path.display())))
}

// ---------------------------------------------------------------------------
// scan-chsh
// ---------------------------------------------------------------------------

/// Measurement projector specification for the scan command.
#[derive(Debug, Clone, Copy)]
pub enum ProjectorSpec {
    /// `(|1> + |2>)/sqrt(2)` in the mass basis (Bloch +x).
    Strangeness,
    /// Bloch angles `theta,phi` in radians.
    Bloch { theta: f64, phi: f64 },
}

impl ProjectorSpec {
    pub fn parse(s: &str) -> Result<Self> {
        if s == "strangeness" {
            return Ok(Self::Strangeness);
        }
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 2 {
            return Err(Error::NotAProjector(format!(
                "projector spec must be 'strangeness' or 'theta,phi', got '{s}'"
            )));
        }
        let theta = parts[0]
            .trim()
            .parse::<f64>()
            .map_err(|e| Error::NotAProjector(format!("bad theta '{}': {e}", parts[0])))?;
        let phi = parts[1]
            .trim()
            .parse::<f64>()
            .map_err(|e| Error::NotAProjector(format!("bad phi '{}': {e}", parts[1])))?;
        Ok(Self::Bloch { theta, phi })
    }

    pub fn matrix(&self) -> ComplexMatrix {
        match *self {
            Self::Strangeness => bloch_projector([1.0, 0.0, 0.0]),
            Self::Bloch { theta, phi } => bloch_projector([
                theta.sin() * phi.cos(),
                theta.sin() * phi.sin(),
                theta.cos(),
            ]),
        }
    }
}

/// Parse four decay signs like `"++-+"`.
pub fn parse_scan_signs(s: &str) -> Result<SignAssignment> {
    let signs = s
        .chars()
        .map(|ch| match ch {
            '+' => Ok(1i8),
            '-' => Ok(-1i8),
            other => Err(Error::Usage(format!("signs must be '+'/'-', got '{other}'"))),
        })
        .collect::<Result<Vec<_>>>()?;
    if signs.len() != 4 {
        return Err(Error::Usage(format!(
            "scan needs exactly 4 signs, got {}",
            signs.len()
        )));
    }
    SignAssignment::new(signs)
}

/// Fully resolved scan invocation.
#[derive(Debug, Clone)]
pub struct ScanOptions {
    pub scenario: Scenario,
    pub projector: ProjectorSpec,
    pub t_max: f64,
    pub grid: usize,
    pub signs: SignAssignment,
}

/// Maximum of the scan and where it occurred.
#[derive(Debug, Clone, Copy)]
pub struct ScanSummary {
    pub max_abs_value: f64,
    pub at: (f64, f64),
}

/// Dressed-observable CHSH over a `(t_l, t_r)` grid with fixed projectors;
/// CSV `t_l,t_r,value,violated` to `out`. A zero `t_max` degenerates to the
/// single point `(0, 0)`.
pub fn run_scan_chsh<W: Write + ?Sized>(opts: &ScanOptions, out: &mut W) -> Result<ScanSummary> {
    if opts.scenario.state_label.n_particles() != 2 {
        return Err(Error::Usage(
            "scan-chsh requires a two-particle state".into(),
        ));
    }
    if opts.grid < 2 {
        return Err(Error::Usage(format!(
            "grid must be >= 2, got {}",
            opts.grid
        )));
    }
    if opts.t_max < 0.0 {
        return Err(Error::Usage(format!(
            "t-max must be >= 0, got {}",
            opts.t_max
        )));
    }
    let times: Vec<f64> = if opts.t_max == 0.0 {
        vec![0.0]
    } else {
        (0..opts.grid)
            .map(|i| opts.t_max * i as f64 / (opts.grid - 1) as f64)
            .collect()
    };
    let p_op = opts.projector.matrix();
    let rho0 = &opts.scenario.initial_state;
    writeln!(out, "t_l,t_r,value,violated")
        .map_err(|e| Error::Usage(format!("write failed: {e}")))?;
    let mut summary = ScanSummary {
        max_abs_value: f64::NEG_INFINITY,
        at: (0.0, 0.0),
    };
    for &t_l in &times {
        for &t_r in &times {
            let res = dynamical_chsh(
                &p_op,
                &p_op,
                &p_op,
                &p_op,
                &opts.signs,
                &opts.scenario.params,
                t_l,
                t_r,
                rho0,
                ChshMode::LocalProduct,
            )?;
            if res.value.abs() > summary.max_abs_value {
                summary.max_abs_value = res.value.abs();
                summary.at = (t_l, t_r);
            }
            writeln!(
                out,
                "{},{},{},{}",
                fmt_sig(t_l),
                fmt_sig(t_r),
                fmt_sig(res.value),
                fmt_bool(res.violated)
            )
            .map_err(|e| Error::Usage(format!("write failed: {e}")))?;
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_labels_round_trip() {
        for s in ["psi-plus", "psi-minus", "phi-plus", "phi-minus", "ghz"] {
            assert_eq!(StateLabel::parse(s).unwrap().as_str(), s);
        }
        assert!(StateLabel::parse("bogus").is_err());
    }

    #[test]
    fn bell_states_are_normalized() {
        for label in [
            StateLabel::PsiPlus,
            StateLabel::PsiMinus,
            StateLabel::PhiPlus,
            StateLabel::PhiMinus,
            StateLabel::Ghz,
        ] {
            let rho = label.density_matrix().unwrap();
            assert!((rho.trace().re - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn config_rejects_unknown_keys() {
        assert!(FileConfig::parse("seed = 3\n").is_ok());
        let err = FileConfig::parse("sedd = 3\n").unwrap_err();
        assert!(matches!(err, Error::Usage(_)));
    }

    #[test]
    fn config_parses_comments_and_values() {
        let cfg = FileConfig::parse("# comment\n\nseed = 42\nt-max = 2.5\n").unwrap();
        assert_eq!(cfg.get_parsed::<u64>("seed").unwrap(), Some(42));
        assert_eq!(cfg.get_parsed::<f64>("t-max").unwrap(), Some(2.5));
    }

    #[test]
    fn time_grid_includes_endpoints() {
        let g = time_grid(5.0, 3).unwrap();
        assert_eq!(g.len(), 3);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[2], 5.0);
        assert!(time_grid(5.0, 1).is_err());
    }

    #[test]
    fn projector_specs() {
        let s = ProjectorSpec::parse("strangeness").unwrap().matrix();
        // (1 + sigma_x)/2
        assert!((s.get(0, 1).re - 0.5).abs() < 1e-15);
        let z = ProjectorSpec::parse("0,0").unwrap().matrix();
        assert!((z.get(0, 0).re - 1.0).abs() < 1e-12);
        assert!(ProjectorSpec::parse("a,b").is_err());
        assert!(ProjectorSpec::parse("1").is_err());
    }

    #[test]
    fn scan_signs_parse() {
        assert_eq!(parse_scan_signs("++--").unwrap().signs(), &[1, 1, -1, -1]);
        assert!(parse_scan_signs("++").is_err());
        assert!(parse_scan_signs("+*+-").is_err());
    }

    #[test]
    fn fmt_sig_is_twelve_significant_digits() {
        assert_eq!(fmt_sig(2.0 * 2f64.sqrt()), "2.82842712475e0");
        assert_eq!(fmt_sig(0.0), "0.00000000000e0");
    }
}
