use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "symcap", version, about = "Certified capacity bounds, billiard actions and embedding checks")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Write the JSON report to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Symplectic defect tolerance.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tol: f64,
    /// Samples per verified map or certificate.
    #[arg(long, global = true, default_value_t = 10_000)]
    pub samples: usize,
    /// Samples for Monte Carlo volumes.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub mc_samples: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certified capacity interval of a Lagrangian product.
    Capacity(CapacityArgs),
    /// Minimal-action closed billiard orbit.
    Billiard(BilliardArgs),
    /// Symplecticity and containment checks for an explicit map.
    VerifyMap(VerifyMapArgs),
    /// Volume of a convex body.
    Volume(VolumeArgs),
    /// Capacity bounds for the disk cotangent bundle of a cylinder.
    Cylinder(CylinderArgs),
    /// Reproduction table of the main capacity values.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct CapacityArgs {
    /// Standard domain id, e.g. annulus_disk.
    #[arg(conflicts_with_all = ["domain", "domain_file"])]
    pub id: Option<String>,
    /// Standard domain id (same as the positional form).
    #[arg(long, conflicts_with = "domain_file")]
    pub domain: Option<String>,
    /// JSON domain file.
    #[arg(long)]
    pub domain_file: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Parameter of a_r_diamond.
    #[arg(long)]
    pub r: Option<f64>,
    /// Rectangle half-widths of rect_diamond.
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    pub eps: f64,
    /// Bounce limit of the attached billiard search (0 skips it).
    #[arg(long, default_value_t = 6)]
    pub k_max: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableKind {
    /// Disk minus a concentric disk of radius delta.
    Annulus,
    /// Unit cube with a scatterer at the origin, cross-polytope geometry.
    PuncturedCube,
    /// Unit disk with scatterers at ±((k−1)/k, 0).
    TwoScatterers,
    /// Table and geometry read from body files.
    File,
}

#[derive(Debug, Args)]
pub struct BilliardArgs {
    #[arg(long, value_enum)]
    pub table: TableKind,
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Scatterer parameter of two-scatterers.
    #[arg(long, default_value_t = 2.0)]
    pub k: f64,
    #[arg(long, required_if_eq("table", "file"))]
    pub table_file: Option<PathBuf>,
    /// Geometry body file; defaults to the unit ball.
    #[arg(long)]
    pub geometry_file: Option<PathBuf>,
    #[arg(long, default_value_t = 6)]
    pub k_max: usize,
    /// Trajectory CSV path.
    #[arg(long, default_value = "trajectories.csv")]
    pub csv: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MapKind {
    /// Annulus product into a cylinder over a disk.
    AnnulusSqueeze,
    /// Disk-square product onto the cube-diamond product.
    FactorSwap,
    RectToDisk,
    /// Nested-rectangle map of the disk of area 4.
    Sigma,
    /// Punctured cube product into the ball of area 4.
    BiranCube,
    CylinderF,
    CylinderSqueeze,
    Camel,
}

#[derive(Debug, Args)]
pub struct VerifyMapArgs {
    #[arg(long, value_enum)]
    pub map: MapKind,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 0.5)]
    pub delta: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.9)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long = "R", default_value_t = std::f64::consts::PI)]
    pub big_r: f64,
}

#[derive(Debug, Args)]
pub struct VolumeArgs {
    /// JSON body file.
    #[arg(long)]
    pub body: PathBuf,
    /// Closed form where available instead of Monte Carlo.
    #[arg(long)]
    pub exact: bool,
    /// Also estimate √(Vol(K) Vol(K°)).
    #[arg(long)]
    pub mahler: bool,
}

#[derive(Debug, Args)]
pub struct CylinderArgs {
    /// Area enclosed by the base circle.
    #[arg(long = "R", default_value_t = std::f64::consts::PI)]
    pub big_r: f64,
    /// Half-height; omit for the unbounded cylinder.
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    pub eps: f64,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long, default_value_t = 1e-3)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.5)]
    pub delta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, default_value_t = 6)]
    pub k_max: usize,
}
