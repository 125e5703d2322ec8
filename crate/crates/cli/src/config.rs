//! Command-line arguments. Every subcommand's arguments double as its
//! serializable run configuration.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

pub const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (", env!("FRACSCREEN_GIT_DESCRIBE"), ")");

/// Environment variable naming the output directory when `--out-dir` is absent.
pub const OUT_DIR_ENV: &str = "FRACSCREEN_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "fracscreen", version = VERSION, about = "Acoustic scattering by self-similar fractal screens")]
pub struct Cli {
    /// Directory for output files [default: $FRACSCREEN_OUT_DIR, else the
    /// current directory]
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,

    /// Maximum number of worker threads [default: one per core]
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: RunConfig,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunConfig {
    /// Attractor properties, meshes and rasters
    #[command(subcommand)]
    Attractor(AttractorCmd),
    /// Raster-based geometry diagnostics
    #[command(subcommand)]
    Geom(GeomCmd),
    /// Piecewise-constant projection and its convergence
    #[command(subcommand)]
    Approx(ApproxCmd),
    /// Galerkin boundary element solver
    #[command(subcommand)]
    Bem(BemCmd),
    /// Run the configuration stored in a summary.json (its "config" field)
    /// or in a bare configuration file
    Replay {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Source {
    /// Built-in attractor: unit_square, two_touching_squares,
    /// two_separated_squares, infinite_components, gamma_1d, unit_interval,
    /// koch_snowflake
    #[arg(long, default_value = "unit_square")]
    pub attractor: String,

    /// IFS definition file (JSON); takes precedence over --attractor
    #[arg(long)]
    pub ifs: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[group(required = true, multiple = false)]
pub struct MeshArgs {
    /// Mesh of cells with diameter at most h whose parents exceed h
    #[arg(long)]
    pub h: Option<f64>,

    /// Uniform mesh of all words of this length
    #[arg(long)]
    pub level: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttractorCmd {
    /// Dimension, diameter, measure and barycenter
    Info(InfoArgs),
    /// Export a mesh as CSV (index;diameter;measure;barycenter)
    Mesh(MeshCmdArgs),
    /// Classify raster pixels as outside, boundary or inside
    Render(RenderArgs),
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InfoArgs {
    #[command(flatten)]
    pub source: Source,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshCmdArgs {
    #[command(flatten)]
    pub source: Source,
    #[command(flatten)]
    pub mesh: MeshArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenderArgs {
    #[command(flatten)]
    pub source: Source,
    /// Pixel size [default: the largest power of two not above h0/256]
    #[arg(long)]
    pub pixel: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeomCmd {
    /// Box-counting dimension of the raster boundary
    Dim(DimArgs),
    /// Porosity of the boundary by empty-ball search
    Porosity(PorosityArgs),
    /// Open set condition and pairwise overlaps of the first-level copies
    Osc(OscArgs),
    /// Membership probe for the class D^t
    Dt(DtArgs),
    /// Aikawa-type distance integral
    Aikawa(AikawaArgs),
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimArgs {
    #[command(flatten)]
    pub source: Source,
    /// Pixel size
    #[arg(long, default_value_t = 1.0 / 1024.0)]
    pub pixel: f64,
    /// Largest box size is 2^-j_min
    #[arg(long, default_value_t = 3)]
    pub j_min: i32,
    /// Smallest box size is 2^-j_max
    #[arg(long, default_value_t = 7)]
    pub j_max: i32,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PorosityArgs {
    #[command(flatten)]
    pub source: Source,
    /// Pixel size
    #[arg(long, default_value_t = 1.0 / 512.0)]
    pub pixel: f64,
    /// Number of random balls
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    /// Smallest ball radius
    #[arg(long, default_value_t = 1.0 / 32.0)]
    pub r_min: f64,
    /// Largest ball radius
    #[arg(long, default_value_t = 0.5)]
    pub r_max: f64,
    /// Random seed (required)
    #[arg(long)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscArgs {
    #[command(flatten)]
    pub source: Source,
    /// Pixel size
    #[arg(long, default_value_t = 1.0 / 512.0)]
    pub pixel: f64,
    /// Inside pixels sampled per map
    #[arg(long, default_value_t = 20_000)]
    pub samples: usize,
    /// Random seed (required)
    #[arg(long)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeArgs {
    /// Pixel size
    #[arg(long, default_value_t = 1.0 / 1024.0)]
    pub pixel: f64,
    /// Ball radii, comma separated
    #[arg(long, value_delimiter = ',', default_value = "0.5,0.25,0.125,0.0625,0.03125,0.015625")]
    pub radii: Vec<f64>,
    /// Ball centers drawn from the boundary pixels
    #[arg(long, default_value_t = 32)]
    pub centers: usize,
    /// Monte-Carlo samples per ball
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    /// Random seed (required)
    #[arg(long)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DtArgs {
    #[command(flatten)]
    pub source: Source,
    /// Exponent in (0, 1)
    #[arg(long)]
    pub t: f64,
    #[command(flatten)]
    pub probe: ProbeArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AikawaArgs {
    #[command(flatten)]
    pub source: Source,
    /// Positive exponent
    #[arg(long)]
    pub s: f64,
    #[command(flatten)]
    pub probe: ProbeArgs,
}

/// Test functions for the projection commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestFunction {
    /// f = 1
    One,
    /// f = x1
    X1,
    /// f = sin(pi x1) sin(pi x2), or sin(pi x1) on the line
    SineBump,
    /// f = exp(-|x - b|^2) around the barycenter b
    Gaussian,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApproxCmd {
    /// L2 projection onto piecewise constants with the Poincare bound check
    Project(ProjectArgs),
    /// Grid fractional-norm error of the projection over several h
    Converge(ApproxConvergeArgs),
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectArgs {
    #[command(flatten)]
    pub source: Source,
    #[command(flatten)]
    pub mesh: MeshArgs,
    #[arg(long, value_enum, default_value_t = TestFunction::X1)]
    pub function: TestFunction,
    /// Quadrature sub-cell size relative to the mesh size
    #[arg(long, default_value_t = 0.125)]
    pub quad_rel: f64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApproxConvergeArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, value_enum, default_value_t = TestFunction::One)]
    pub function: TestFunction,
    /// Mesh sizes, comma separated (at least 3)
    #[arg(long, value_delimiter = ',', required = true)]
    pub h_list: Vec<f64>,
    /// Norm index of the error, in [-1, 0]
    #[arg(long, default_value_t = -0.5, allow_negative_numbers = true)]
    pub s1: f64,
    /// Assumed regularity of f, in [0, 1]; the expected slope is s2 - s1
    #[arg(long, default_value_t = 0.0)]
    pub s2: f64,
    /// Grid spacing [default: the largest power of two not above
    /// rho_min h_min / 4]
    #[arg(long)]
    pub grid: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveArgs {
    /// Wavenumber
    #[arg(long, default_value_t = 5.0)]
    pub k: f64,
    /// Angle in degrees between the incident direction and the downward
    /// normal
    #[arg(long, default_value_t = 0.0)]
    pub theta: f64,
    /// Azimuth in degrees of the tangential direction (n = 2 only)
    #[arg(long, default_value_t = 0.0)]
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BemCmd {
    /// Assemble and solve on one mesh
    Solve(BemSolveArgs),
    /// Self-convergence study against a fine reference mesh
    Converge(BemConvergeArgs),
    /// Scattered field on a box grid, as CSV
    Field(BemFieldArgs),
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BemSolveArgs {
    #[command(flatten)]
    pub source: Source,
    #[command(flatten)]
    pub mesh: MeshArgs,
    #[command(flatten)]
    pub wave: WaveArgs,
    /// Solution file name inside the output directory
    #[arg(long, default_value = "solution.json")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BemConvergeArgs {
    #[command(flatten)]
    pub source: Source,
    #[command(flatten)]
    pub wave: WaveArgs,
    /// Diameter mesh sizes, comma separated (at least 4)
    #[arg(long, value_delimiter = ',', conflicts_with = "levels", required_unless_present = "levels")]
    pub h_list: Option<Vec<f64>>,
    /// Uniform mesh levels, comma separated (at least 4)
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<usize>>,
    /// Reference mesh size [default: h_min/4]
    #[arg(long, conflicts_with = "reference_level")]
    pub reference_h: Option<f64>,
    /// Reference mesh level [default: finest level + 2]
    #[arg(long)]
    pub reference_level: Option<usize>,
    /// Grid spacing of the fractional-norm track [default: the largest power
    /// of two not above rho_min h_ref / 4]
    #[arg(long)]
    pub grid: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    /// Subdivide cells relative to the distance to each point
    Adaptive,
    /// Fixed sub-cells of size h_rel for every point
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BemFieldArgs {
    #[command(flatten)]
    pub source: Source,
    #[command(flatten)]
    pub mesh: MeshArgs,
    #[command(flatten)]
    pub wave: WaveArgs,
    /// Grid points per axis as nx,ny,nz
    #[arg(long, value_delimiter = ',', num_args = 1, default_value = "11,11,5")]
    pub grid: Vec<usize>,
    /// Box as x0,x1,y0,y1,z0,z1; no grid point may lie on the screen plane.
    /// For n = 1 the y range is normal to the screen and z is ignored
    #[arg(long = "box", value_delimiter = ',', allow_hyphen_values = true, default_value = "-1,2,-1,2,0.25,1.25")]
    pub bbox: Vec<f64>,
    #[arg(long, value_enum, default_value_t = RuleKind::Adaptive)]
    pub rule: RuleKind,
    /// Sub-cell size relative to each cell for the fixed rule
    #[arg(long, default_value_t = 0.125)]
    pub h_rel: f64,
}
