//! Subcommand parameters and their execution.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use b2disc::bloch::{
    area_function_truncated, bloch_seminorm, counterexample_report, little_bloch_profile, AreaQuadrature, BlochGrid,
    CounterexampleSettings,
};
use b2disc::carleson::{Arc, BoxQuadrature, CarlesonSquare, QuadScheme};
use b2disc::extension::{
    build_net, decompose, distance_sandwich, s_norm_upper, DecomposeSettings, SandwichSettings, SandwichStatus,
};
use b2disc::numerics::seeded_rng;
use b2disc::operators::{
    cesaro_matrix, conformal_identity_residual, project, spectral_radius_b2, spectral_radius_eps,
    truncation_spectral_radius, ProjectionQuadrature, SpectrumSettings, SpectrumStatus,
};
use b2disc::weights::{
    b1star_ratio, b2_characteristic, bmo_disc_norm, conformal_sweep, epsilon_condition, gamma, jn_bound, jn_profile,
    oscillation_constant, random_sarason_space, sarason_check, vanishing_b2_profile,
};
use b2disc::MetricConvention;
use clap::{Args, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::spec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Divergent,
    Inconclusive,
}

/// A CSV grid: one header row, float columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

pub struct Outcome {
    pub status: Status,
    pub result: Value,
    pub table: Option<Table>,
}

impl Outcome {
    fn new(status: Status, result: impl Serialize) -> Result<Self> {
        Ok(Outcome { status, result: serde_json::to_value(result)?, table: None })
    }

    fn with_table(mut self, header: Vec<&'static str>, rows: Vec<Vec<f64>>) -> Self {
        self.table = Some(Table { header, rows });
        self
    }
}

fn status_if(bad: bool, status: Status) -> Status {
    if bad {
        status
    } else {
        Status::Ok
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    Squared,
    Standard,
}

impl From<Convention> for MetricConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Squared => MetricConvention::Squared,
            Convention::Standard => MetricConvention::Standard,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct QuadArgs {
    /// Dyadic generations resolved below each square.
    #[arg(long, default_value_t = 10)]
    pub radial_levels: u32,
    /// Gauss nodes per tile in angle.
    #[arg(long, default_value_t = 6)]
    pub angular_nodes: usize,
    /// Gauss nodes per tile in radius.
    #[arg(long, default_value_t = 3)]
    pub radial_nodes: usize,
}

impl From<QuadArgs> for BoxQuadrature {
    fn from(q: QuadArgs) -> Self {
        BoxQuadrature {
            radial_levels: q.radial_levels,
            angular_nodes: q.angular_nodes,
            radial_nodes: q.radial_nodes,
            scheme: QuadScheme::TopHalfTiling,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct SplitArgs {
    /// Radius of the truncated disc carrying the net.
    #[arg(long, default_value_t = 0.999)]
    pub r_max: f64,
    #[arg(long, default_value_t = 20_000)]
    pub pair_budget: usize,
    #[arg(long, default_value_t = 4000)]
    pub probes: usize,
    /// Dyadic depth of the B₂ precondition check.
    #[arg(long, default_value_t = 8)]
    pub b2_level: u32,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

impl From<SplitArgs> for DecomposeSettings {
    fn from(s: SplitArgs) -> Self {
        DecomposeSettings {
            r_max: s.r_max,
            pair_budget: s.pair_budget,
            probes: s.probes,
            b2_level: s.b2_level,
            seed: s.seed,
            ..DecomposeSettings::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct ProjQuadArgs {
    #[arg(long, default_value_t = 12)]
    pub panels: u32,
    #[arg(long, default_value_t = 12)]
    pub panel_nodes: usize,
    #[arg(long, default_value_t = 256)]
    pub angles: usize,
}

impl From<ProjQuadArgs> for ProjectionQuadrature {
    fn from(q: ProjQuadArgs) -> Self {
        ProjectionQuadrature { radial_panels: q.panels, radial_nodes: q.panel_nodes, angular_nodes: q.angles }
    }
}

const DEFAULT_POINTS: &str = "0,0;0.5,0;0,0.5;-0.8,0";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct B2CharArgs {
    /// Weight spec, e.g. `radial:0.5` or `point:1:0`.
    #[arg(long)]
    pub weight: String,
    #[arg(long, default_value_t = 10)]
    pub max_level: u32,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct GammaArgs {
    /// Spec of the weight `e^f` whose log is `f`.
    #[arg(long)]
    pub weight: String,
    #[arg(long, default_value_t = 0.01)]
    pub tol: f64,
    #[arg(long, default_value_t = 12)]
    pub max_level: u32,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct OscConstArgs {
    #[arg(long)]
    pub weight: String,
    #[arg(long, default_value_t = 20_000)]
    pub budget: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Convention::Squared)]
    pub convention: Convention,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct JnProfileArgs {
    #[arg(long)]
    pub weight: String,
    /// Arc start as a fraction of the circle.
    #[arg(long, default_value_t = 0.0)]
    pub arc_start: f64,
    /// Arc length as a fraction of the circle.
    #[arg(long, default_value_t = 1.0)]
    pub arc_length: f64,
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,1.5,2,2.5,3,3.5,4")]
    pub lambdas: Vec<f64>,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Also compute `[w]²` at this depth and report the bound `2e²[w]²e^{−λ}`.
    #[arg(long)]
    pub bound_level: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct BmoNormArgs {
    #[arg(long)]
    pub weight: String,
    #[arg(long, default_value_t = 1000)]
    pub discs: usize,
    #[arg(long, default_value_t = 400)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct EpsCondArgs {
    #[arg(long)]
    pub weight: String,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, default_value_t = 20_000)]
    pub budget: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Convention::Squared)]
    pub convention: Convention,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct SarasonArgs {
    #[arg(long, default_value_t = 1000)]
    pub spaces: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct PointGridArgs {
    #[arg(long)]
    pub weight: String,
    /// Points as `re,im;re,im;…`.
    #[arg(long, default_value = DEFAULT_POINTS)]
    pub points: String,
    #[arg(long, default_value_t = 8)]
    pub max_level: u32,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct VanishingArgs {
    #[arg(long)]
    pub weight: String,
    #[arg(long, default_value_t = 8)]
    pub max_level: u32,
    /// Strictly decreasing area thresholds; default `2·4^{−k}`, `k = 0..=max_level`.
    #[arg(long, value_delimiter = ',')]
    pub deltas: Vec<f64>,
    #[command(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct BlochNormArgs {
    /// Symbol spec, e.g. `neg-log` or `factorial:10`.
    #[arg(long)]
    pub g: String,
    #[arg(long, default_value_t = 16)]
    pub levels: u32,
    #[arg(long, default_value_t = 8)]
    pub per_octave: u32,
    #[arg(long, default_value_t = 8.0)]
    pub angular_factor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct CounterexampleArgs {
    /// `factorial`, `super-lacunary` or `custom:n1,n2,…`.
    #[arg(long, default_value = "factorial")]
    pub spec: String,
    #[arg(long, default_value_t = 10)]
    pub terms: usize,
    #[arg(long, default_value_t = 10_000)]
    pub floor_samples: usize,
    #[arg(long, value_delimiter = ',', default_value = "3,5,8")]
    pub m_values: Vec<f64>,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct AreaFunctionArgs {
    #[arg(long)]
    pub g: String,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.0)]
    pub xi_angle: f64,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0.125,0.0625,0.03125,0.015625,0.0078125,0.00390625,0.001953125"
    )]
    pub deltas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct NetArgs {
    #[arg(long)]
    pub separation: f64,
    #[arg(long, default_value_t = 0.99)]
    pub r_max: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct DecomposeArgs {
    #[arg(long)]
    pub weight: String,
    #[arg(long)]
    pub eps: f64,
    #[arg(long)]
    pub eta: f64,
    #[command(flatten)]
    pub split: SplitArgs,
    /// Writes the full decomposition (net and values) as JSON.
    #[arg(long)]
    pub save: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct SandwichArgs {
    #[arg(long)]
    pub weight: String,
    #[arg(long, default_value_t = 0.01)]
    pub tol: f64,
    #[arg(long, default_value_t = 10)]
    pub gamma_level: u32,
    #[arg(long, default_value_t = 4000)]
    pub osc_budget: usize,
    #[command(flatten)]
    pub split: SplitArgs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct SNormArgs {
    #[arg(long)]
    pub weight: String,
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,2,4")]
    pub eps: Vec<f64>,
    /// `η = eta_rel·ε`.
    #[arg(long, default_value_t = 0.05)]
    pub eta_rel: f64,
    #[command(flatten)]
    pub split: SplitArgs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct ProjectArgs {
    /// `abs2`, `conj`, `analytic:G` or `log-weight:W`.
    #[arg(long)]
    pub function: String,
    #[arg(long, default_value = DEFAULT_POINTS)]
    pub points: String,
    #[command(flatten)]
    pub quad: ProjQuadArgs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct ConfidArgs {
    #[arg(long)]
    pub function: String,
    /// Base point `re,im` of the automorphism.
    #[arg(long)]
    pub z: String,
    #[arg(long, default_value = "0.3,0;0,0.45;-0.6,0.2;0.1,-0.7")]
    pub points: String,
    #[command(flatten)]
    pub quad: ProjQuadArgs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct CesaroMatrixArgs {
    #[arg(long)]
    pub g: String,
    #[arg(long, default_value_t = 16)]
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct SpectrumArgs {
    #[command(subcommand)]
    pub method: SpectrumCommand,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Subcommand)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SpectrumCommand {
    /// Least λ with exp(p·Re(g/(λξ))) in B₂ for every direction ξ.
    B2 {
        #[arg(long)]
        g: String,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 64)]
        xi: usize,
        #[arg(long, default_value_t = 0.02)]
        tol: f64,
        #[arg(long, default_value_t = 8)]
        max_level: u32,
        #[arg(long, default_value_t = 8)]
        radial_levels: u32,
    },
    /// Smallest ε whose ε-condition constant is stable under budget doubling.
    Eps {
        #[arg(long)]
        g: String,
        #[arg(long, default_value_t = 20_000)]
        budget: usize,
        #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.75,1,1.5,2,3,4")]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Convention::Squared)]
        convention: Convention,
    },
    /// Eigenvalue radius of matrix truncations (a heuristic cross-check).
    Truncation {
        #[arg(long)]
        g: String,
        #[arg(long, default_value_t = 256)]
        n_max: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct MergeArgs {
    /// Report files to merge.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Subcommand)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// B₂ characteristic over the shifted dyadic squares.
    B2Char(B2CharArgs),
    /// γ(f) = inf{t : e^{f/t} ∈ B₂}.
    Gamma(GammaArgs),
    /// Bounded hyperbolic oscillation constant of log w.
    OscConst(OscConstArgs),
    /// Tail profile of |log w − mean| on one square.
    JnProfile(JnProfileArgs),
    /// Sampled BMO norm of log w over discs.
    BmoNorm(BmoNormArgs),
    /// Constant of the ε-condition.
    EpsCond(EpsCondArgs),
    /// Variance bound on random finite probability spaces.
    Sarason(SarasonArgs),
    /// Conformally invariant B1* ratio.
    B1star(PointGridArgs),
    /// B₂ characteristics of w∘φ_z.
    ConfSweep(PointGridArgs),
    /// Supremum of the B₂ product over small squares.
    VanishingProfile(VanishingArgs),
    /// Bloch seminorm and little-Bloch profile.
    BlochNorm(BlochNormArgs),
    /// Diagnostics of the lacunary counterexample.
    Counterexample(CounterexampleArgs),
    /// Truncated area function at a boundary point.
    AreaFunction(AreaFunctionArgs),
    /// Separated hyperbolic net.
    Net(NetArgs),
    /// Split log w into bounded and hyperbolic Lipschitz parts.
    Decompose(DecomposeArgs),
    /// Two-sided distance check around γ.
    Sandwich(SandwichArgs),
    /// Upper bound for the decomposition norm over an ε grid.
    SNorm(SNormArgs),
    /// Bergman projection at points.
    Project(ProjectArgs),
    /// Residual of the conformal identity of the projection.
    ConfidResidual(ConfidArgs),
    /// Truncated Cesàro matrix and its eigenvalues.
    CesaroMatrix(CesaroMatrixArgs),
    /// Spectral radius of the Cesàro operator.
    Spectrum(SpectrumArgs),
    /// Combines report files into one.
    ReportMerge(MergeArgs),
}

fn cumulative(v: &[f64]) -> Vec<f64> {
    v.iter()
        .scan(0.0f64, |acc, &x| {
            *acc = acc.max(x);
            Some(*acc)
        })
        .collect()
}

pub fn run(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::B2Char(a) => {
            let w = spec::weight("weight", &a.weight)?;
            let r = b2_characteristic(&w, Arc::full_circle(), a.max_level, &a.quad.into())?;
            let rows = r
                .level_sups
                .iter()
                .zip(cumulative(&r.level_sups))
                .enumerate()
                .map(|(k, (&s, c))| vec![k as f64, s, c])
                .collect();
            let status = if r.divergent {
                Status::Divergent
            } else {
                status_if(r.unsupported || !r.in_b2, Status::Inconclusive)
            };
            Ok(Outcome::new(status, &r)?.with_table(vec!["level", "level_sup", "cumulative_sup"], rows))
        }
        Command::Gamma(a) => {
            let f = spec::weight("weight", &a.weight)?;
            let r = gamma(&f, a.tol, a.max_level, &a.quad.into())?;
            let rows = r.trace.iter().map(|&(t, ok)| vec![t, f64::from(u8::from(ok))]).collect();
            Ok(Outcome::new(Status::Ok, &r)?.with_table(vec!["t", "in_b2"], rows))
        }
        Command::OscConst(a) => {
            let w = spec::weight("weight", &a.weight)?;
            let c = oscillation_constant(&w, a.budget, a.seed, a.convention.into())?;
            Outcome::new(status_if(!c.is_finite(), Status::Divergent), json!({ "constant": c }))
        }
        Command::JnProfile(a) => {
            let w = spec::weight("weight", &a.weight)?;
            let arc = b2disc::carleson::Arc::from_start(a.arc_start, a.arc_length).context("arc_length")?;
            let square = CarlesonSquare::new(arc);
            let p = jn_profile(&w, &square, &a.lambdas, a.samples, a.seed)?;
            let char_sq = match a.bound_level {
                Some(level) => Some(b2_characteristic(&w, Arc::full_circle(), level, &BoxQuadrature::default())?),
                None => None,
            };
            let bounds: Vec<f64> = match &char_sq {
                Some(r) => a.lambdas.iter().map(|&l| jn_bound(r.characteristic_sq, l)).collect(),
                None => vec![f64::NAN; a.lambdas.len()],
            };
            let rows =
                a.lambdas.iter().zip(&p.tail_fraction).zip(&bounds).map(|((&l, &t), &b)| vec![l, t, b]).collect();
            let divergent = char_sq.as_ref().is_some_and(|r| !r.characteristic_sq.is_finite());
            let result = json!({
                "profile": p,
                "characteristic_sq": char_sq.as_ref().map(|r| r.characteristic_sq),
                "bounds": char_sq.as_ref().map(|_| bounds.clone()),
            });
            Ok(Outcome::new(status_if(divergent, Status::Divergent), result)?
                .with_table(vec!["lambda", "tail", "bound"], rows))
        }
        Command::BmoNorm(a) => {
            let w = spec::weight("weight", &a.weight)?;
            let n = bmo_disc_norm(&w, a.discs, a.samples, a.seed)?;
            Outcome::new(status_if(!n.is_finite(), Status::Divergent), json!({ "norm": n }))
        }
        Command::EpsCond(a) => {
            let w = spec::weight("weight", &a.weight)?;
            let c = epsilon_condition(&w, a.eps, a.budget, a.seed, a.convention.into())?;
            Outcome::new(status_if(!c.is_finite(), Status::Divergent), json!({ "constant": c }))
        }
        Command::Sarason(a) => {
            let mut rng = seeded_rng(a.seed);
            let mut rows = Vec::with_capacity(a.spaces);
            let mut violations = 0usize;
            for _ in 0..a.spaces {
                let (w, m) = random_sarason_space(&mut rng);
                let r = sarason_check(&w, &m)?;
                violations += usize::from(!r.bound_ok);
                rows.push(vec![r.epsilon, r.variance, f64::from(u8::from(r.bound_ok))]);
            }
            let worst = rows.iter().map(|r| r[1] / (4.0 * r[0])).fold(0.0, f64::max);
            let result = json!({ "spaces": a.spaces, "violations": violations, "max_variance_over_4eps": worst });
            Ok(Outcome::new(status_if(violations > 0, Status::Inconclusive), result)?
                .with_table(vec!["epsilon", "variance", "bound_ok"], rows))
        }
        Command::B1star(a) => {
            let w = spec::weight("weight", &a.weight)?;
            let pts = spec::points("points", &a.points)?;
            let r = b1star_ratio(&w, &pts, &a.quad.into())?;
            let rows = r.points.iter().map(|p| vec![p.z.re(), p.z.im(), p.ratio]).collect();
            Ok(Outcome::new(status_if(r.divergent, Status::Divergent), &r)?.with_table(vec!["re", "im", "ratio"], rows))
        }
        Command::ConfSweep(a) => {
            let w = spec::weight("weight", &a.weight)?;
            let pts = spec::points("points", &a.points)?;
            let reports = conformal_sweep(&w, &pts, a.max_level, &a.quad.into())?;
            let rows = pts
                .iter()
                .zip(&reports)
                .map(|(p, r)| vec![p.re(), p.im(), r.characteristic_sq, f64::from(u8::from(r.in_b2))])
                .collect();
            let divergent = reports.iter().any(|r| r.divergent);
            Ok(Outcome::new(status_if(divergent, Status::Divergent), &reports)?
                .with_table(vec!["re", "im", "characteristic_sq", "in_b2"], rows))
        }
        Command::VanishingProfile(a) => {
            let w = spec::weight("weight", &a.weight)?;
            let deltas = if a.deltas.is_empty() {
                (0..=a.max_level as i32).map(|k| 2.0 * 0.25f64.powi(k)).collect()
            } else {
                a.deltas.clone()
            };
            let (profile, report) = vanishing_b2_profile(&w, &deltas, a.max_level, &a.quad.into())?;
            let rows = profile.iter().map(|&(d, s)| vec![d, s]).collect();
            let result = json!({ "profile": profile, "report": report });
            Ok(Outcome::new(status_if(report.divergent, Status::Divergent), result)?
                .with_table(vec!["delta", "sup_product"], rows))
        }
        Command::BlochNorm(a) => {
            let g = spec::analytic("g", &a.g)?;
            let grid = BlochGrid {
                levels: a.levels,
                per_octave: a.per_octave,
                angular_factor: a.angular_factor,
                ..BlochGrid::default()
            };
            let norm = bloch_seminorm(&g, &grid)?;
            let radii: Vec<f64> = (1..=a.levels as i32).map(|k| 1.0 - 0.5f64.powi(k)).collect();
            let profile = little_bloch_profile(&g, &radii)?;
            let rows = profile.iter().map(|&(r, s)| vec![r, s]).collect();
            let result = json!({ "seminorm": norm, "bounded_symbol": g.is_bounded(), "profile": profile });
            Ok(Outcome::new(status_if(!norm.is_finite(), Status::Divergent), result)?
                .with_table(vec!["radius", "sup_density"], rows))
        }
        Command::Counterexample(a) => {
            let seq = spec::sequence("spec", &a.spec)?;
            let settings = CounterexampleSettings {
                floor_indices: (1..=a.terms).collect(),
                floor_samples: a.floor_samples,
                m_values: a.m_values.clone(),
                seed: a.seed,
                ..CounterexampleSettings::default()
            };
            let r = counterexample_report(&seq, a.terms, &settings)?;
            let rows =
                r.floors.iter().map(|f| vec![f.j as f64, f.floor, f.lower_correction, f.upper_correction]).collect();
            Ok(Outcome::new(Status::Ok, &r)?
                .with_table(vec!["j", "floor", "lower_correction", "upper_correction"], rows))
        }
        Command::AreaFunction(a) => {
            let g = spec::analytic("g", &a.g)?;
            let table = a
                .deltas
                .iter()
                .map(|&d| Ok((d, area_function_truncated(&g, a.eps, a.xi_angle, d, &AreaQuadrature::default())?)))
                .collect::<Result<Vec<_>>>()?;
            let rows = table.iter().map(|&(d, v)| vec![d, v]).collect();
            Ok(Outcome::new(Status::Ok, json!({ "table": table }))?.with_table(vec!["delta", "area_function"], rows))
        }
        Command::Net(a) => {
            let net = build_net(a.separation, a.r_max, a.seed)?;
            let rows = net.points.iter().map(|p| vec![p.re(), p.im()]).collect();
            let result = json!({
                "size": net.len(),
                "separation": net.separation,
                "covering": net.covering,
                "r_max": net.r_max,
                "candidates": net.candidates,
                "probes": net.probes,
                "coverage_warning": net.coverage_warning,
            });
            Ok(Outcome::new(status_if(net.coverage_warning, Status::Inconclusive), result)?
                .with_table(vec!["re", "im"], rows))
        }
        Command::Decompose(a) => {
            let f = spec::weight("weight", &a.weight)?;
            let d = decompose(&f, a.eps, a.eta, None, &a.split.into())?;
            if let Some(path) = &a.save {
                d.save(path).with_context(|| format!("save: cannot write {}", path.display()))?;
            }
            let result = json!({
                "eps": d.eps,
                "eta": d.eta,
                "c_eps": d.c_eps,
                "separation": d.separation,
                "net_size": d.net_size,
                "covering": d.covering,
                "coverage_warning": d.coverage_warning,
                "u_sup": d.u_sup,
                "v_lip": d.v_lip,
                "lipschitz": d.lipschitz_part.as_ref().map(|m| m.lipschitz()),
            });
            Outcome::new(status_if(d.coverage_warning, Status::Inconclusive), result)
        }
        Command::Sandwich(a) => {
            let f = spec::weight("weight", &a.weight)?;
            let settings = SandwichSettings {
                gamma_level: a.gamma_level,
                osc_budget: a.osc_budget,
                decompose: a.split.into(),
                ..SandwichSettings::default()
            };
            let r = distance_sandwich(&f, a.tol, &settings)?;
            let status = match r.status {
                SandwichStatus::Ok => Status::Ok,
                SandwichStatus::Failed | SandwichStatus::Inconclusive => Status::Inconclusive,
            };
            Outcome::new(status, &r)
        }
        Command::SNorm(a) => {
            let f = spec::weight("weight", &a.weight)?;
            let r = s_norm_upper(&f, &a.eps, a.eta_rel, &a.split.into())?;
            let rows = r.entries.iter().map(|e| vec![e.eps, e.total.unwrap_or(f64::NAN), e.u_sup, e.v_lip]).collect();
            Ok(Outcome::new(status_if(!r.value.is_finite(), Status::Divergent), &r)?
                .with_table(vec!["eps", "total", "u_sup", "v_lip"], rows))
        }
        Command::Project(a) => {
            let f = spec::function("function", &a.function)?;
            let pts: Vec<Complex64> = spec::points("points", &a.points)?.iter().map(|p| p.z()).collect();
            let r = project(f, &pts, &a.quad.into())?;
            let rows = pts.iter().zip(&r.values).map(|(z, v)| vec![z.re, z.im, v.re, v.im]).collect();
            Ok(Outcome::new(status_if(r.divergent, Status::Divergent), &r)?
                .with_table(vec!["re", "im", "value_re", "value_im"], rows))
        }
        Command::ConfidResidual(a) => {
            let f = spec::function("function", &a.function)?;
            let z = spec::point("z", &a.z)?;
            let pts: Vec<Complex64> = spec::points("points", &a.points)?.iter().map(|p| p.z()).collect();
            let quad: ProjectionQuadrature = a.quad.into();
            let base = conformal_identity_residual(&f, z, &pts, &quad)?;
            let refined = conformal_identity_residual(&f, z, &pts, &quad.refined())?;
            Outcome::new(Status::Ok, json!({ "residual": base, "refined_residual": refined }))
        }
        Command::CesaroMatrix(a) => {
            let g = spec::analytic("g", &a.g)?;
            if a.n == 0 {
                bail!("n: need N ≥ 1");
            }
            let m = cesaro_matrix(&g, a.n);
            let eig = m.eigenvalues()?;
            let radius = eig.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let mut rows = Vec::new();
            for k in 0..a.n {
                for j in 0..a.n {
                    let e = m.matrix[(k, j)];
                    rows.push(vec![k as f64, j as f64, e.re, e.im]);
                }
            }
            let result = json!({
                "n": a.n,
                "strictly_lower": m.is_strictly_lower(),
                "eigenvalues": eig,
                "eigenvalue_radius": radius,
            });
            Ok(Outcome::new(Status::Ok, result)?.with_table(vec!["row", "col", "re", "im"], rows))
        }
        Command::Spectrum(s) => {
            let r = match &s.method {
                SpectrumCommand::B2 { g, p, xi, tol, max_level, radial_levels } => {
                    let g = spec::analytic("g", g)?;
                    let settings = SpectrumSettings {
                        max_level: *max_level,
                        quad: BoxQuadrature { radial_levels: *radial_levels, ..BoxQuadrature::default() },
                    };
                    spectral_radius_b2(&g, *p, *xi, *tol, &settings)?
                }
                SpectrumCommand::Eps { g, budget, eps, seed, convention } => {
                    spectral_radius_eps(&spec::analytic("g", g)?, *budget, eps, *seed, (*convention).into())?
                }
                SpectrumCommand::Truncation { g, n_max } => {
                    truncation_spectral_radius(&spec::analytic("g", g)?, *n_max)?
                }
            };
            let rows = r
                .trace
                .iter()
                .map(|t| {
                    let mut row = vec![t.param];
                    row.extend(t.values.iter().copied());
                    row.resize(3, f64::NAN);
                    row.push(t.passed.map_or(f64::NAN, |p| f64::from(u8::from(p))));
                    row
                })
                .collect();
            let bad = r.status == SpectrumStatus::Inconclusive || !r.radius.is_finite();
            Ok(Outcome::new(status_if(bad, Status::Inconclusive), &r)?
                .with_table(vec!["param", "value_1", "value_2", "passed"], rows))
        }
        Command::ReportMerge(a) => {
            let reports = a
                .inputs
                .iter()
                .map(|p| {
                    let text =
                        std::fs::read_to_string(p).with_context(|| format!("inputs: cannot read {}", p.display()))?;
                    serde_json::from_str::<Value>(&text).with_context(|| format!("inputs: {} is not JSON", p.display()))
                })
                .collect::<Result<Vec<_>>>()?;
            let worst = reports
                .iter()
                .filter_map(|r| r.get("status").and_then(Value::as_str))
                .map(|s| match s {
                    "divergent" => Status::Divergent,
                    "inconclusive" => Status::Inconclusive,
                    _ => Status::Ok,
                })
                .find(|&s| s != Status::Ok)
                .unwrap_or(Status::Ok);
            Outcome::new(worst, json!({ "reports": reports }))
        }
    }
}
