//! Command-line front end.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use framelab_core::frames::{self, FramePolicy, VectorFamily};
use framelab_core::gallery::{self, GallerySpec};
use framelab_core::measure::{self, NodePoint};
use framelab_core::numerics::RankPolicy;
use framelab_core::pairs::{self, PairPolicy};
use framelab_core::rkhs::{self, KernelTable};

use crate::error::{AppError, Result};
use crate::format::{
    BlowupDoc, FamilyDoc, FrameReportDoc, GalleryDoc, KernelDoc, MatrixDoc, ResolutionDoc, SplitDoc, TrendDoc,
};
use crate::output::{self, Format};

pub const RANK_TOL_VAR: &str = "FRAMELAB_RANK_TOL";

#[derive(Debug, Parser)]
#[command(name = "framelab", version, about = "Frames, reproducing pairs and kernels on discretized measure spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Node weights and member energies.
    Inspect(Common),
    /// Frame bounds, rank, redundancy and classification.
    Bounds(Common),
    /// A dual family.
    Dual {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = DualMethod::Canonical)]
        method: DualMethod,
    },
    /// The kernel of the analysis range, or the pair kernel with `--phi`.
    Kernel {
        #[command(flatten)]
        common: Common,
        /// Partner family (JSON) for the Φ-weighted pair kernel.
        #[arg(long)]
        phi: Option<PathBuf>,
    },
    /// Rank and redundancy of the analysis and synthesis operators.
    Redundancy(Common),
    /// Discrete and continuous parts of the family.
    Split {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1e-12)]
        row_tol: f64,
    },
    /// The mixed resolution operator of the input (Ψ) and `--phi`.
    PairCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        phi: PathBuf,
    },
    /// A reproducing partner for the input family.
    Partner(Common),
    /// Experiments over sequences of sizes.
    Experiment {
        #[command(subcommand)]
        which: Experiment,
    },
}

#[derive(Debug, Subcommand)]
pub enum Experiment {
    /// Kernel diagonal of the step basis on refined partitions of [0, 1].
    Blowup {
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Frame bounds across truncations of a gallery family.
    Trend(SizedCommon),
    /// Synthesis redundancy across truncations of a gallery family.
    Probe(SizedCommon),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DualMethod {
    Canonical,
    Corrected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GalleryKind {
    Orthonormal,
    Torus,
    Affine,
    Delta,
    DoubledOnb,
    AugmentedOnb,
    Mercedes,
    Random,
}

#[derive(Debug, Args)]
pub struct Common {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SizedCommon {
    #[command(flatten)]
    pub gallery: GalleryArgs,
    #[arg(long, value_delimiter = ',', required = true)]
    pub sizes: Vec<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Family file (JSON).
    #[arg(long = "in", value_name = "PATH")]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub gallery: GalleryArgs,
}

#[derive(Debug, Args)]
pub struct GalleryArgs {
    #[arg(long, value_enum)]
    pub gallery: Option<GalleryKind>,
    /// Gallery spec file (JSON).
    #[arg(long, value_name = "PATH")]
    pub gallery_spec: Option<PathBuf>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub cells: Option<usize>,
    #[arg(long)]
    pub size: Option<usize>,
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub power: u32,
    #[arg(long, default_value_t = 1.0)]
    pub rate: f64,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl OutputArgs {
    fn format(&self) -> Format {
        Format::resolve(self.format, self.out.as_deref())
    }

    fn path(&self) -> Option<&Path> {
        self.out.as_deref()
    }
}

fn required<T>(value: Option<T>, flag: &str, kind: &str) -> Result<T> {
    value.ok_or_else(|| AppError::invalid(format!("--gallery {kind} requires --{flag}")))
}

impl GalleryArgs {
    fn is_set(&self) -> bool {
        self.gallery.is_some() || self.gallery_spec.is_some()
    }

    fn spec(&self) -> Result<GallerySpec> {
        let spec = match (self.gallery, &self.gallery_spec) {
            (Some(_), Some(_)) => return Err(AppError::invalid("give either --gallery or --gallery-spec, not both")),
            (None, None) => return Err(AppError::invalid("no gallery given")),
            (None, Some(path)) => {
                let doc: GalleryDoc = read_json(path)?;
                GallerySpec::from(&doc)
            }
            (Some(kind), None) => {
                let name = kind.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
                let dim = || required(self.dim, "dim", &name);
                match kind {
                    GalleryKind::Orthonormal => GallerySpec::Orthonormal { dim: dim()? },
                    GalleryKind::Torus => {
                        GallerySpec::TorusUpperSemiframe { dim: dim()?, grid: required(self.grid, "grid", &name)? }
                    }
                    GalleryKind::Affine => GallerySpec::AffineCoherent {
                        cells: required(self.cells, "cells", &name)?,
                        grid: required(self.grid, "grid", &name)?,
                        power: self.power,
                        rate: self.rate,
                    },
                    GalleryKind::Delta => {
                        GallerySpec::DeltaCounterexample { size: required(self.size, "size", &name)? }
                    }
                    GalleryKind::DoubledOnb => GallerySpec::DoubledOnb { dim: dim()? },
                    GalleryKind::AugmentedOnb => GallerySpec::AugmentedOnb { dim: dim()? },
                    GalleryKind::Mercedes => GallerySpec::MercedesBenz,
                    GalleryKind::Random => GallerySpec::RandomFrame {
                        nodes: required(self.nodes, "nodes", &name)?,
                        dim: dim()?,
                        seed: required(self.seed, "seed", &name)?,
                    },
                }
            }
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Size-independent spec for truncation sequences; the size flags may be
    /// left out and default to 1.
    fn sequence_spec(&self) -> Result<GallerySpec> {
        if self.gallery.is_some() && self.gallery_spec.is_none() {
            let filled = GalleryArgs {
                dim: self.dim.or(Some(1)),
                size: self.size.or(Some(1)),
                cells: self.cells.or(Some(1)),
                grid: self.grid.or(self.cells).or(self.dim).or(Some(1)),
                nodes: self.nodes.or(self.dim).or(Some(1)),
                gallery: self.gallery,
                gallery_spec: None,
                seed: self.seed,
                power: self.power,
                rate: self.rate,
            };
            return filled.spec();
        }
        self.spec()
    }
}

impl InputArgs {
    fn family(&self) -> Result<VectorFamily> {
        match (&self.input, self.gallery.is_set()) {
            (Some(_), true) => Err(AppError::invalid("give exactly one input: --in, --gallery or --gallery-spec")),
            (None, false) => Err(AppError::invalid("no input given: use --in, --gallery or --gallery-spec")),
            (Some(path), false) => read_family(path),
            (None, true) => Ok(gallery::build(&self.gallery.spec()?)?),
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| AppError::Io { path: path.to_path_buf(), source })?;
    serde_json::from_str(&text).map_err(|source| AppError::Parse { path: path.to_path_buf(), source })
}

pub fn read_family(path: &Path) -> Result<VectorFamily> {
    read_json::<FamilyDoc>(path)?.to_family()
}

/// Rank policy from the environment, or the default.
pub fn rank_policy() -> Result<RankPolicy> {
    match std::env::var(RANK_TOL_VAR) {
        Err(_) => Ok(RankPolicy::default()),
        Ok(raw) => {
            let tol: f64 =
                raw.trim().parse().map_err(|_| AppError::invalid(format!("{RANK_TOL_VAR}={raw:?} is not a number")))?;
            RankPolicy::new(tol).map_err(|_| AppError::invalid(format!("{RANK_TOL_VAR} must be positive and finite")))
        }
    }
}

fn emit_json<T: Serialize>(output: &OutputArgs, value: &T, verb: &str) -> Result<()> {
    if output.format() == Format::Csv {
        return Err(AppError::invalid(format!("{verb} has no tabular form; use --format json")));
    }
    output::emit(output.path(), &output::to_json(value)?)
}

fn emit_table<T: Serialize, R: Serialize>(output: &OutputArgs, value: &T, rows: &[R]) -> Result<()> {
    let bytes = match output.format() {
        Format::Json => output::to_json(value)?,
        Format::Csv => output::to_csv(rows)?,
    };
    output::emit(output.path(), &bytes)
}

fn node_name(point: &NodePoint) -> String {
    match point {
        NodePoint::Real(x) => x.to_string(),
        NodePoint::Label(s) => s.clone(),
    }
}

#[derive(Serialize)]
struct NodeRow {
    node: String,
    weight: f64,
    energy: f64,
}

#[derive(Serialize)]
struct InspectDoc {
    nodes: usize,
    dim: usize,
    total_weight: f64,
    atoms: usize,
    cells: usize,
    energies: Vec<NodeRow>,
}

fn inspect(common: &Common) -> Result<()> {
    let family = common.input.family()?;
    let energies: Vec<NodeRow> = family
        .space()
        .nodes()
        .iter()
        .zip(frames::node_energies(&family))
        .map(|(n, energy)| NodeRow { node: node_name(&n.point), weight: n.weight, energy })
        .collect();
    let atoms = family.space().nodes().iter().filter(|n| n.provenance == measure::Provenance::Atom).count();
    let doc = InspectDoc {
        nodes: family.len(),
        dim: family.dim(),
        total_weight: family.space().total_weight(),
        atoms,
        cells: family.len() - atoms,
        energies,
    };
    emit_table(&common.output, &doc, &doc.energies)
}

fn bounds(common: &Common, rank: RankPolicy) -> Result<()> {
    let family = common.input.family()?;
    let report = frames::frame_bounds_with(&family, &FramePolicy::with_rank(rank));
    emit_json(&common.output, &FrameReportDoc::from(&report), "bounds")
}

#[derive(Serialize)]
struct CorrectedDualDoc {
    dual: FamilyDoc,
    theta_bessel_bound: f64,
    pinv_norm_squared: f64,
    dual_bessel_bound: f64,
    resolution_residual: f64,
}

fn dual(common: &Common, method: DualMethod) -> Result<()> {
    let family = common.input.family()?;
    match method {
        DualMethod::Canonical => {
            let dual = frames::canonical_dual(&family)?;
            emit_json(&common.output, &FamilyDoc::from_family(&dual), "dual")
        }
        DualMethod::Corrected => {
            let c = pairs::lower_semiframe_dual(&family)?;
            let s = pairs::resolution_operator(&family, &c.dual)?;
            let doc = CorrectedDualDoc {
                dual: FamilyDoc::from_family(&c.dual),
                theta_bessel_bound: c.theta_bessel_bound,
                pinv_norm_squared: c.pinv_norm_squared,
                dual_bessel_bound: c.dual_bessel_bound,
                resolution_residual: s
                    .operator
                    .max_abs_diff(&framelab_core::numerics::ComplexMatrix::identity(family.dim())),
            };
            emit_json(&common.output, &doc, "dual")
        }
    }
}

#[derive(Serialize)]
struct KernelRow {
    x: usize,
    y: usize,
    re: f64,
    im: f64,
}

fn kernel(common: &Common, phi: Option<&Path>) -> Result<()> {
    let family = common.input.family()?;
    let table: KernelTable = match phi {
        None => frames::kernel_matrix(&family)?,
        Some(p) => pairs::pair_kernel_k(&family, &read_family(p)?)?,
    };
    let n = table.len();
    let rows: Vec<KernelRow> = (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .map(|(x, y)| {
            let z = table.entries()[(x, y)];
            KernelRow { x, y, re: z.re, im: z.im }
        })
        .collect();
    emit_table(&common.output, &KernelDoc::from(&table), &rows)
}

#[derive(Serialize)]
struct RedundancyDoc {
    nodes: usize,
    dim: usize,
    rank: usize,
    redundancy: Option<usize>,
    synthesis_redundancy: usize,
}

fn redundancy(common: &Common, rank: RankPolicy) -> Result<()> {
    let family = common.input.family()?;
    let report = frames::frame_bounds_with(&family, &FramePolicy::with_rank(rank));
    let doc = RedundancyDoc {
        nodes: report.nodes,
        dim: report.dim,
        rank: report.rank,
        redundancy: FrameReportDoc::from(&report).redundancy,
        synthesis_redundancy: pairs::pair_redundancy_with(&family, &rank),
    };
    emit_json(&common.output, &doc, "redundancy")
}

fn split(common: &Common, row_tol: f64) -> Result<()> {
    if !(row_tol.is_finite() && row_tol >= 0.0) {
        return Err(AppError::invalid("--row-tol must be a non-negative number"));
    }
    let family = common.input.family()?;
    emit_json(&common.output, &SplitDoc::from(&frames::split(&family, row_tol)), "split")
}

#[derive(Serialize)]
struct PairCheckDoc {
    #[serde(flatten)]
    resolution: ResolutionDoc,
    phi_redundancy: usize,
}

fn pair_check(common: &Common, phi: &Path, rank: RankPolicy) -> Result<()> {
    let psi = common.input.family()?;
    let phi = read_family(phi)?;
    let policy = PairPolicy { rank, ..PairPolicy::default() };
    let report = pairs::resolution_operator_with(&psi, &phi, &policy)?;
    let doc = PairCheckDoc {
        resolution: ResolutionDoc::from(&report),
        phi_redundancy: pairs::pair_redundancy_with(&phi, &rank),
    };
    emit_json(&common.output, &doc, "pair-check")
}

#[derive(Serialize)]
struct PartnerDoc {
    partner: FamilyDoc,
    node_sums: Vec<f64>,
    resolution: MatrixDoc,
}

fn partner(common: &Common) -> Result<()> {
    let phi = common.input.family()?;
    let p = pairs::reproducing_partner(&phi)?;
    let s = pairs::resolution_operator(&p.partner, &phi)?;
    let doc = PartnerDoc {
        partner: FamilyDoc::from_family(&p.partner),
        node_sums: p.node_sums,
        resolution: MatrixDoc::from_matrix(&s.operator),
    };
    emit_json(&common.output, &doc, "partner")
}

fn check_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.is_empty() || sizes.contains(&0) || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(AppError::invalid("--sizes must be positive and strictly ascending"));
    }
    Ok(())
}

#[derive(Serialize)]
struct BlowupCsvRow {
    n: usize,
    max_diag: String,
}

#[derive(Serialize)]
struct BlowupReport {
    rows: Vec<BlowupDoc>,
    slope: f64,
}

fn blowup(sizes: &[usize], output: &OutputArgs) -> Result<()> {
    check_sizes(sizes)?;
    let rows = rkhs::blowup_experiment(sizes)?;
    let csv: Vec<BlowupCsvRow> =
        rows.iter().map(|r| BlowupCsvRow { n: r.n, max_diag: output::trimmed(r.max_diagonal, 10) }).collect();
    let report = BlowupReport { slope: rkhs::blowup_slope(&rows), rows: rows.iter().map(BlowupDoc::from).collect() };
    emit_table(output, &report, &csv)
}

#[derive(Serialize)]
struct SequenceReport<'a, R> {
    gallery: &'static str,
    rows: &'a [R],
}

fn trend(args: &SizedCommon) -> Result<()> {
    check_sizes(&args.sizes)?;
    let spec = args.gallery.sequence_spec()?;
    let seq = gallery::truncation_sequence(&spec, &args.sizes)?;
    let rows: Vec<TrendDoc> = frames::semiframe_trend(seq.builder(), seq.sizes())?.iter().map(TrendDoc::from).collect();
    emit_table(&args.output, &SequenceReport { gallery: spec.kind(), rows: &rows }, &rows)
}

#[derive(Serialize)]
struct ProbeRow {
    size: usize,
    nodes: usize,
    dim: usize,
    redundancy: usize,
}

fn probe(args: &SizedCommon) -> Result<()> {
    check_sizes(&args.sizes)?;
    let spec = args.gallery.sequence_spec()?;
    let seq = gallery::truncation_sequence(&spec, &args.sizes)?;
    let rows: Vec<ProbeRow> = pairs::redundancy_probe(seq.builder(), seq.sizes())?
        .into_iter()
        .map(|(size, nodes, dim, redundancy)| ProbeRow { size, nodes, dim, redundancy })
        .collect();
    emit_table(&args.output, &SequenceReport { gallery: spec.kind(), rows: &rows }, &rows)
}

pub fn run(cli: &Cli) -> Result<()> {
    let rank = rank_policy()?;
    match &cli.command {
        Command::Inspect(c) => inspect(c),
        Command::Bounds(c) => bounds(c, rank),
        Command::Dual { common, method } => dual(common, *method),
        Command::Kernel { common, phi } => kernel(common, phi.as_deref()),
        Command::Redundancy(c) => redundancy(c, rank),
        Command::Split { common, row_tol } => split(common, *row_tol),
        Command::PairCheck { common, phi } => pair_check(common, phi, rank),
        Command::Partner(c) => partner(c),
        Command::Experiment { which } => match which {
            Experiment::Blowup { sizes, output } => blowup(sizes, output),
            Experiment::Trend(a) => trend(a),
            Experiment::Probe(a) => probe(a),
        },
    }
}

pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("framelab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
