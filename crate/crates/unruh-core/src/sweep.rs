//! Batch front end behind the CLI: acceleration sweeps producing
//! resource-decay tables, full verification bundles, oracle comparisons,
//! and the prior-map anomaly table.
//!
//! All outputs are deterministic functions of (config, seed): CSV output is
//! byte-identical across reruns, and every measure row carries the
//! truncation certificate (cutoff and tail bound) it was produced under.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::{
    apply_channel, kraus_multiparty, verify_cptp, AccelerationParam, ChannelSpec, KrausSet,
    DEFAULT_EPSILON,
};
use crate::counterexample::{side_by_side_report, AhnRow};
use crate::dilation::oracle_compare;
use crate::error::{Error, Result};
use crate::fock::{C64, CMatrix, DensityMatrix, DimSignature};
use crate::measures::{Quantifier, QUANTIFIER_NAMES};
use crate::report::PropertyReport;
use crate::resource::{
    composition_check, contraction_check, convex_mixture_check, dilation_freeness_check,
    geometry_check, monotonicity_check, nrng_check_on, tensor_composition_check,
    CompositionOrder, DistanceKind, FreeOpKind, FreeStatePredicate,
};
use crate::{sample, states};

/// Environment variable naming the default output directory (used only when
/// a command does not pass an explicit output path).
pub const OUTPUT_DIR_ENV: &str = "UNRUH_OUTPUT_DIR";

/// Output serialization format.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn name(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::InvalidArgument(format!(
                "unknown output format '{other}' (expected csv or json)"
            ))),
        }
    }
}

/// Package/version stamp embedded in JSON outputs.
#[derive(Clone, Debug, Serialize)]
pub struct Versions {
    pub package: &'static str,
    pub version: &'static str,
    /// Output schema revision.
    pub format: u32,
}

pub fn versions() -> Versions {
    Versions {
        package: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        format: 1,
    }
}

/// 12-significant-digit scientific notation: the fixed CSV cell format.
fn fmt_sig(x: f64) -> String {
    format!("{x:.11e}")
}

/// Resolve an output path: explicit paths win; otherwise the file goes into
/// the directory named by [`OUTPUT_DIR_ENV`] (created if missing), falling
/// back to the current directory.
pub fn resolve_output(explicit: Option<&Path>, default_name: &str) -> Result<PathBuf> {
    if let Some(p) = explicit {
        return Ok(p.to_path_buf());
    }
    let dir = std::env::var_os(OUTPUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    Ok(dir.join(default_name))
}

/// Serialize any output bundle as pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

/// Configuration for an acceleration sweep. Loadable from a JSON file with
/// these field names; command-line flags override file values.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// Input state: a preset name (see [`states::PRESET_NAMES`]) or a path
    /// to a JSON density-matrix file.
    pub state: String,
    /// Parties handed to accelerated observers (default: the last party).
    pub accelerated: Option<Vec<usize>>,
    /// r grid: `r_count` evenly spaced points on [r_min, r_max].
    pub r_min: f64,
    pub r_max: f64,
    pub r_count: usize,
    /// Optional Omega grid; when present it replaces the r grid and each
    /// point is mapped through the acceleration-frequency relation.
    pub omega_grid: Option<Vec<f64>>,
    /// Quantifier names to evaluate per grid point (see
    /// [`QUANTIFIER_NAMES`]).
    pub measures: Vec<String>,
    /// Truncation tail target for the certified cutoff.
    pub epsilon: f64,
    pub seed: u64,
    /// Output path; default resolved via [`resolve_output`].
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            state: "bell-phi-plus".into(),
            accelerated: None,
            r_min: 0.0,
            r_max: 2.0,
            r_count: 6,
            omega_grid: None,
            measures: vec![
                "l1-coherence".into(),
                "relative-entropy-coherence".into(),
                "negativity".into(),
            ],
            epsilon: DEFAULT_EPSILON,
            seed: 7,
            output: None,
            format: OutputFormat::Csv,
        }
    }
}

/// On-disk format for custom input states: party dimensions plus row-major
/// real/imaginary parts of a unit-trace density matrix.
#[derive(Deserialize)]
struct StateFile {
    dims: Vec<usize>,
    re: Vec<Vec<f64>>,
    #[serde(default)]
    im: Option<Vec<Vec<f64>>>,
}

/// Resolve a state argument: preset name first, then JSON file path.
pub fn resolve_state(name: &str) -> Result<DensityMatrix> {
    if states::PRESET_NAMES.contains(&name) {
        return states::preset(name);
    }
    let path = Path::new(name);
    if !path.exists() {
        return Err(Error::InvalidArgument(format!(
            "'{name}' is neither a preset ({}) nor an existing state file",
            states::PRESET_NAMES.join(", ")
        )));
    }
    let file: StateFile = serde_json::from_str(&fs::read_to_string(path)?)?;
    let sig = DimSignature::new(file.dims)?;
    let d = sig.total();
    let check_shape = |rows: &[Vec<f64>]| -> Result<()> {
        if rows.len() != d || rows.iter().any(|r| r.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: format!("{d}x{d} matrix"),
                got: format!("{} rows", rows.len()),
            });
        }
        Ok(())
    };
    check_shape(&file.re)?;
    if let Some(im) = &file.im {
        check_shape(im)?;
    }
    let m = CMatrix::from_fn(d, d, |i, j| {
        C64::new(file.re[i][j], file.im.as_ref().map_or(0.0, |im| im[i][j]))
    });
    DensityMatrix::new(sig, m)
}

impl SweepConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    /// The acceleration grid, validated against the budget limits.
    fn grid(&self) -> Result<Vec<AccelerationParam>> {
        if let Some(omegas) = &self.omega_grid {
            if omegas.is_empty() {
                return Err(Error::InvalidArgument("empty omega grid".into()));
            }
            return omegas
                .iter()
                .map(|&w| AccelerationParam::from_omega(w))
                .collect();
        }
        if self.r_count == 0 {
            return Err(Error::InvalidArgument("r_count must be at least 1".into()));
        }
        if !(self.r_min <= self.r_max) {
            return Err(Error::InvalidArgument(format!(
                "r grid must satisfy r_min <= r_max, got [{}, {}]",
                self.r_min, self.r_max
            )));
        }
        (0..self.r_count)
            .map(|i| {
                let r = if self.r_count == 1 {
                    self.r_min
                } else {
                    self.r_min
                        + (self.r_max - self.r_min) * i as f64 / (self.r_count - 1) as f64
                };
                AccelerationParam::from_r(r)
            })
            .collect()
    }

    /// Parse the measure list; negativity is taken across the
    /// inertial/accelerated bipartition.
    fn quantifiers(&self, accelerated: &[usize]) -> Result<Vec<Quantifier>> {
        self.measures
            .iter()
            .map(|name| match name.as_str() {
                "l1-coherence" => Ok(Quantifier::L1Coherence),
                "relative-entropy-coherence" => Ok(Quantifier::RelativeEntropyCoherence),
                "negativity" => Ok(Quantifier::Negativity {
                    transpose_parties: accelerated.to_vec(),
                }),
                "robustness" => Ok(Quantifier::RobustnessQubit),
                other => Err(Error::InvalidArgument(format!(
                    "unknown measure '{other}' (expected one of {})",
                    QUANTIFIER_NAMES.join(", ")
                ))),
            })
            .collect()
    }
}

/// One sweep grid point. `values` follows the configured measure order.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub r: f64,
    /// Rindler frequency, present when the grid was given in Omega.
    pub omega: Option<f64>,
    /// Largest per-party Kraus cutoff used at this grid point.
    pub cutoff: usize,
    /// Certified truncation tail bound for this grid point.
    pub tail_bound: f64,
    /// Trace deficit actually observed on the swept state.
    pub trace_deficit: f64,
    pub values: Vec<f64>,
}

/// Full sweep result, serializable as the JSON output schema.
#[derive(Debug, Serialize)]
pub struct SweepOutput {
    pub config: SweepConfig,
    pub rows: Vec<SweepRow>,
    pub versions: Versions,
    pub seed: u64,
}

/// Run the sweep: per grid point, certify a cutoff, push the state through
/// the channel, and evaluate each measure on the renormalized output.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutput> {
    let state = resolve_state(&cfg.state)?;
    let n_parties = state.sig().len();
    let accelerated = cfg
        .accelerated
        .clone()
        .unwrap_or_else(|| vec![n_parties - 1]);
    let quantifiers = cfg.quantifiers(&accelerated)?;

    let mut rows = Vec::new();
    for param in cfg.grid()? {
        let spec = ChannelSpec::certified(
            state.sig().dims().to_vec(),
            accelerated.clone(),
            vec![param.clone(); accelerated.len()],
            cfg.epsilon,
        )?;
        let ks = kraus_multiparty(&spec)?;
        let out = apply_channel(&ks, &state)?;
        let renorm = out.renormalized();
        let values = quantifiers
            .iter()
            .map(|q| q.evaluate(&renorm))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(SweepRow {
            r: param.r(),
            omega: param.omega(),
            cutoff: spec.cutoffs().iter().copied().max().unwrap_or(0),
            tail_bound: ks.tail_bound(),
            trace_deficit: out.trace_deficit(),
            values,
        });
    }
    Ok(SweepOutput {
        config: cfg.clone(),
        rows,
        versions: versions(),
        seed: cfg.seed,
    })
}

/// Render the sweep as CSV: fixed column order, 12 significant digits,
/// `\n` line ends. The omega cell is empty for r-specified grids.
pub fn sweep_csv(out: &SweepOutput) -> String {
    let mut s = String::new();
    s.push_str("r,omega,cutoff,tail_bound,trace_deficit");
    for m in &out.config.measures {
        let _ = write!(s, ",{m}");
    }
    s.push('\n');
    for row in &out.rows {
        let omega = row.omega.map(fmt_sig).unwrap_or_default();
        let _ = write!(
            s,
            "{},{},{},{},{}",
            fmt_sig(row.r),
            omega,
            row.cutoff,
            fmt_sig(row.tail_bound),
            fmt_sig(row.trace_deficit)
        );
        for v in &row.values {
            let _ = write!(s, ",{}", fmt_sig(*v));
        }
        s.push('\n');
    }
    s
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

/// Deliberate defect injected into the Kraus set before verification, used
/// to demonstrate that the suites catch broken channels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FaultInjection {
    /// No fault: the genuine channel.
    None,
    /// Remove the last Kraus operator (breaks trace preservation).
    DropKraus,
    /// Mix output levels 0 and 1 unitarily (stays CPTP, breaks freeness).
    RotateOutput,
}

impl FaultInjection {
    pub fn name(&self) -> &'static str {
        match self {
            FaultInjection::None => "none",
            FaultInjection::DropKraus => "drop-kraus",
            FaultInjection::RotateOutput => "rotate-output",
        }
    }
}

impl FromStr for FaultInjection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(FaultInjection::None),
            "drop-kraus" => Ok(FaultInjection::DropKraus),
            "rotate-output" => Ok(FaultInjection::RotateOutput),
            other => Err(Error::InvalidArgument(format!(
                "unknown fault '{other}' (expected none, drop-kraus or rotate-output)"
            ))),
        }
    }
}

/// Configuration for the verification bundle.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    /// Local dimensions, inertial and accelerated parties together.
    pub dims: Vec<usize>,
    /// Indices of accelerated parties.
    pub accelerated: Vec<usize>,
    /// Shared acceleration parameter for all accelerated parties.
    pub r: f64,
    pub epsilon: f64,
    /// Sample count per suite.
    pub samples: usize,
    pub seed: u64,
    pub fault: FaultInjection,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            dims: vec![2, 2],
            accelerated: vec![1],
            r: 0.6,
            epsilon: DEFAULT_EPSILON,
            samples: 40,
            seed: 7,
            fault: FaultInjection::None,
        }
    }
}

/// A config plus the reports it produced; the JSON output schema for the
/// verify and oracle commands.
#[derive(Debug, Serialize)]
pub struct ReportBundle<C: Serialize> {
    pub config: C,
    pub reports: Vec<PropertyReport>,
    /// True iff every assertable report passed.
    pub pass: bool,
    pub versions: Versions,
    pub seed: u64,
}

fn build_spec(dims: &[usize], accelerated: &[usize], r: f64, epsilon: f64) -> Result<ChannelSpec> {
    let param = AccelerationParam::from_r(r)?;
    ChannelSpec::certified(
        dims.to_vec(),
        accelerated.to_vec(),
        vec![param; accelerated.len()],
        epsilon,
    )
}

fn inject_fault(ks: KrausSet, fault: FaultInjection) -> Result<KrausSet> {
    match fault {
        FaultInjection::None => Ok(ks),
        FaultInjection::DropKraus => {
            let last = ks.ops().len() - 1;
            ks.with_operator_removed(last)
        }
        FaultInjection::RotateOutput => {
            let d = ks.output_sig().total();
            let mut u = CMatrix::identity(d, d);
            let h = std::f64::consts::FRAC_1_SQRT_2;
            u[(0, 0)] = C64::new(h, 0.0);
            u[(0, 1)] = C64::new(h, 0.0);
            u[(1, 0)] = C64::new(h, 0.0);
            u[(1, 1)] = C64::new(-h, 0.0);
            ks.with_output_rotation(&u)
        }
    }
}

/// Run every verification suite against one channel configuration.
///
/// Operator-level suites (CPTP, oracle, freeness of outputs) run on the
/// possibly fault-injected Kraus set; the structural suites rebuild the
/// genuine channel from the spec. Report-only entries never affect `pass`.
pub fn run_verify(cfg: &VerifyConfig) -> Result<ReportBundle<VerifyConfig>> {
    let spec = build_spec(&cfg.dims, &cfg.accelerated, cfg.r, cfg.epsilon)?;
    let ks = inject_fault(kraus_multiparty(&spec)?, cfg.fault)?;
    let n = cfg.samples.max(1);
    let seed = cfg.seed;
    let multiparty = cfg.dims.len() >= 2;
    let incoherent = FreeStatePredicate::incoherent();
    let ppt = FreeStatePredicate::ppt_separable(cfg.accelerated.clone());

    let mut reports: Vec<PropertyReport> = Vec::new();
    reports.extend(verify_cptp(&ks, n, seed)?.reports().map(|r| r.clone()));

    let mut rng = sample::rng(seed ^ 0x05ac1e);
    let oracle_states: Vec<DensityMatrix> = (0..n.min(20))
        .map(|_| sample::wishart_mixed(ks.input_sig(), &mut rng))
        .collect();
    let refs: Vec<&DensityMatrix> = oracle_states.iter().collect();
    reports.push(oracle_compare(&ks, &refs, seed)?);

    reports.push(nrng_check_on(&ks, &incoherent, n, seed)?);
    if multiparty {
        reports.push(nrng_check_on(&ks, &ppt, n, seed)?);
    }

    reports.push(dilation_freeness_check(&spec, &incoherent, n, seed)?);
    if multiparty {
        reports.push(dilation_freeness_check(&spec, &ppt, n.min(16), seed)?);
    }

    reports.push(geometry_check(&spec, &incoherent, n, seed)?);
    if multiparty {
        reports.push(geometry_check(&spec, &ppt, n, seed)?);
    }

    for (kind, order) in [
        (FreeOpKind::DiagonalUnitary, CompositionOrder::PreChannel),
        (FreeOpKind::Permutation, CompositionOrder::PreChannel),
        (FreeOpKind::FullDephasing, CompositionOrder::PostChannel),
    ] {
        reports.push(composition_check(&spec, kind, order, &incoherent, n, seed)?);
    }
    if multiparty {
        reports.push(composition_check(
            &spec,
            FreeOpKind::LocalFreeOp,
            CompositionOrder::PreChannel,
            &ppt,
            n,
            seed,
        )?);
    }

    for p in [0.0, 0.5, 1.0] {
        reports.push(convex_mixture_check(
            &spec,
            FreeOpKind::FullDephasing,
            p,
            &incoherent,
            n,
            seed,
        )?);
    }

    reports.push(tensor_composition_check(
        FreeOpKind::FullDephasing,
        2,
        &spec,
        &incoherent,
        n,
        seed,
    )?);
    reports.push(tensor_composition_check(
        FreeOpKind::LocalFreeOp,
        2,
        &spec,
        &FreeStatePredicate::ppt_separable(vec![0]),
        n,
        seed,
    )?);

    let negativity = Quantifier::Negativity {
        transpose_parties: cfg.accelerated.clone(),
    };
    reports.push(monotonicity_check(
        &spec,
        &Quantifier::L1Coherence,
        Some(FreeOpKind::DiagonalUnitary),
        n,
        seed,
    )?);
    reports.push(monotonicity_check(
        &spec,
        &Quantifier::RelativeEntropyCoherence,
        None,
        n,
        seed,
    )?);
    if multiparty {
        reports.push(monotonicity_check(&spec, &negativity, None, n, seed)?);
    }
    if spec.input_sig().total() == 2 {
        reports.push(monotonicity_check(
            &spec,
            &Quantifier::RobustnessQubit,
            None,
            n,
            seed,
        )?);
    } else {
        reports.push(PropertyReport::skipped(
            "monotonicity(robustness)",
            seed,
            "needs a single-qubit input; rerun with --dims 2 --accelerated 0",
        ));
    }

    for dist in [
        DistanceKind::Trace,
        DistanceKind::Bures,
        DistanceKind::RelativeEntropy,
        DistanceKind::HilbertSchmidt,
    ] {
        reports.push(contraction_check(&spec, dist, n, seed)?);
    }

    let pass = reports.iter().all(|r| r.pass);
    Ok(ReportBundle {
        config: cfg.clone(),
        reports,
        pass,
        versions: versions(),
        seed,
    })
}

// ---------------------------------------------------------------------------
// oracle
// ---------------------------------------------------------------------------

/// Configuration for a standalone Kraus-versus-dilation comparison.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    pub dims: Vec<usize>,
    pub accelerated: Vec<usize>,
    /// Per-accelerated-party acceleration parameters.
    pub r: Vec<f64>,
    pub epsilon: f64,
    pub samples: usize,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            dims: vec![2, 2],
            accelerated: vec![1],
            r: vec![0.5],
            epsilon: DEFAULT_EPSILON,
            samples: 50,
            seed: 7,
        }
    }
}

/// Compare the Kraus pipeline against the wedge-expansion dilation on
/// random mixed states.
pub fn run_oracle(cfg: &OracleConfig) -> Result<ReportBundle<OracleConfig>> {
    if cfg.r.len() != cfg.accelerated.len() {
        return Err(Error::InvalidArgument(format!(
            "need one r per accelerated party: {} parameters for {} parties",
            cfg.r.len(),
            cfg.accelerated.len()
        )));
    }
    let accel = cfg
        .r
        .iter()
        .map(|&r| AccelerationParam::from_r(r))
        .collect::<Result<Vec<_>>>()?;
    let spec = ChannelSpec::certified(
        cfg.dims.clone(),
        cfg.accelerated.clone(),
        accel,
        cfg.epsilon,
    )?;
    let ks = kraus_multiparty(&spec)?;
    let mut rng = sample::rng(cfg.seed);
    let states: Vec<DensityMatrix> = (0..cfg.samples.max(1))
        .map(|_| sample::wishart_mixed(ks.input_sig(), &mut rng))
        .collect();
    let refs: Vec<&DensityMatrix> = states.iter().collect();
    let report = oracle_compare(&ks, &refs, cfg.seed)?;
    let pass = report.pass;
    Ok(ReportBundle {
        config: cfg.clone(),
        reports: vec![report],
        pass,
        versions: versions(),
        seed: cfg.seed,
    })
}

// ---------------------------------------------------------------------------
// ahn
// ---------------------------------------------------------------------------

/// Configuration for the prior-map anomaly table.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AhnConfig {
    pub r_grid: Vec<f64>,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for AhnConfig {
    fn default() -> Self {
        Self {
            // includes the half-thermal point tanh^2 r = 1/2 where the
            // anomalous trace is exactly 5/4
            r_grid: vec![0.0, 0.5, 0.5f64.sqrt().atanh(), 1.5, 2.0],
            output: None,
            format: OutputFormat::Csv,
        }
    }
}

/// The anomaly table plus run metadata.
#[derive(Debug, Serialize)]
pub struct AhnOutput {
    pub config: AhnConfig,
    pub rows: Vec<AhnRow>,
    pub versions: Versions,
}

pub fn run_ahn(cfg: &AhnConfig) -> Result<AhnOutput> {
    if cfg.r_grid.is_empty() {
        return Err(Error::InvalidArgument("empty r grid".into()));
    }
    Ok(AhnOutput {
        config: cfg.clone(),
        rows: side_by_side_report(&cfg.r_grid)?,
        versions: versions(),
    })
}

/// Render the anomaly table as CSV (same cell conventions as the sweep).
pub fn ahn_csv(out: &AhnOutput) -> String {
    let mut s = String::from(
        "state,r,cutoff,prior_trace,formula_trace,trace_deviation,\
         amplifier_deficit,amplifier_tail_bound,amplifier_distance,non_trace_preserving\n",
    );
    for row in &out.rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            row.state,
            fmt_sig(row.r),
            row.cutoff,
            fmt_sig(row.prior_trace),
            fmt_sig(row.formula_trace),
            fmt_sig(row.trace_deviation),
            fmt_sig(row.amplifier_deficit),
            fmt_sig(row.amplifier_tail_bound),
            fmt_sig(row.amplifier_distance),
            row.non_trace_preserving
        );
    }
    s
}
