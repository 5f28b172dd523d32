//! `ergofit` subcommands.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ergofit_core::analytics::{
    classify, coretrieve, cost_vectors, distance_matrix, evaluate, mds_embed, rank, Category,
    Metric, OutlierRule, PipelineConfig,
};
use ergofit_core::avatar::{Avatar, AvatarDoc, PoseName};
use ergofit_core::ergo::derive_constraints;
use ergofit_core::shape::generator::{
    generate_chair, generate_monitor, generate_table, ChairParams, ChairStyle,
};
use ergofit_core::shape::{load_shape_with, save_shape, GraphConfig, Shape};
use serde::Serialize;

use crate::report::{
    classify_csv, dump_constraints, embed_csv, load_collection, ranking_csv, DeformReport,
};
use crate::AppError;

#[derive(Debug, Parser)]
#[command(
    name = "ergofit",
    version,
    about = "Reshape and rank furniture to fit a posable avatar"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write procedural shapes as shape files.
    Generate(GenerateArgs),
    /// Reshape one shape for one avatar pose.
    Deform(DeformArgs),
    /// Rank a collection by deformation energy (CSV).
    Rank(RankArgs),
    /// Label each shape with its cheapest pose (CSV).
    Classify(ClassifyArgs),
    /// Embed cost vectors in the plane (CSV).
    Embed(EmbedArgs),
    /// Pick, reshape and place a chair, table and monitor for one avatar.
    Coretrieve(CoretrieveArgs),
    /// Serve the /v1 HTTP API over a collection.
    Serve(ServeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenerateKind {
    Office,
    Bench,
    Beach,
    Bar,
    /// Every chair style, `--count` of each.
    All,
    Table,
    Monitor,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub style: GenerateKind,
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Contact distance for the relation graph (default: 1% of the shape diagonal).
    #[arg(long)]
    pub epsilon: Option<f64>,
}

/// Avatar selection shared by most subcommands.
#[derive(Debug, Args)]
pub struct AvatarArgs {
    /// Avatar document (JSON). Defaults to the standard adult body.
    #[arg(long)]
    pub avatar: Option<PathBuf>,
    /// Preset pose applied to the avatar's body.
    #[arg(long, value_parser = parse_pose)]
    pub pose: Option<PoseName>,
    /// Contact distance used when loading shape files.
    #[arg(long)]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Args)]
pub struct DeformArgs {
    #[arg(long)]
    pub shape: PathBuf,
    #[command(flatten)]
    pub avatar: AvatarArgs,
    /// Deformed shape file.
    #[arg(long)]
    pub out: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Print the derived constraint set before reshaping.
    #[arg(long)]
    pub dump_constraints: bool,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[arg(long)]
    pub collection: PathBuf,
    #[command(flatten)]
    pub avatar: AvatarArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CostArgs {
    #[arg(long)]
    pub collection: PathBuf,
    #[command(flatten)]
    pub avatar: AvatarArgs,
    /// Comma-separated pose list.
    #[arg(long, value_delimiter = ',', value_parser = parse_pose,
          default_value = "normal_sitting,bench_sitting,beach_lying,bar_sitting")]
    pub poses: Vec<PoseName>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub cost: CostArgs,
    /// Fixed none-of-the-above threshold on the minimum cost.
    #[arg(long, conflicts_with_all = ["outlier_k", "no_outliers"])]
    pub threshold: Option<f64>,
    /// MAD multiplier of the default outlier rule.
    #[arg(long, default_value_t = 3.0)]
    pub outlier_k: f64,
    #[arg(long)]
    pub no_outliers: bool,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    #[command(flatten)]
    pub cost: CostArgs,
    #[arg(long, value_parser = parse_metric, default_value = "euclidean")]
    pub metric: Metric,
}

#[derive(Debug, Args)]
pub struct CoretrieveArgs {
    #[arg(long)]
    pub chairs: PathBuf,
    #[arg(long)]
    pub tables: Option<PathBuf>,
    #[arg(long)]
    pub monitors: Option<PathBuf>,
    #[command(flatten)]
    pub avatar: AvatarArgs,
    /// Directory for the placed shapes.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub collection: PathBuf,
    #[arg(long, env = "ERGOFIT_PORT", default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub bind: String,
    #[arg(long)]
    pub epsilon: Option<f64>,
}

fn parse_pose(s: &str) -> Result<PoseName, String> {
    s.parse().map_err(|e: ergofit_core::Error| e.to_string())
}

fn parse_metric(s: &str) -> Result<Metric, String> {
    s.parse().map_err(|e: ergofit_core::Error| e.to_string())
}

pub fn graph_config(epsilon: Option<f64>) -> Result<GraphConfig, AppError> {
    match epsilon {
        Some(e) if !(e.is_finite() && e > 0.0) => Err(AppError::Usage(format!(
            "--epsilon must be positive, got {e}"
        ))),
        Some(e) => Ok(GraphConfig::with_epsilon(e)),
        None => Ok(GraphConfig::default()),
    }
}

impl AvatarArgs {
    fn load(&self) -> Result<Avatar, AppError> {
        let avatar = match &self.avatar {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
                let doc: AvatarDoc = serde_json::from_str(&text)
                    .map_err(|e| AppError::Usage(format!("{}: {e}", path.display())))?;
                doc.into_avatar()?
            }
            None => Avatar::default(),
        };
        Ok(match self.pose {
            Some(p) => avatar.with_preset(p)?,
            None => avatar,
        })
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), AppError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| AppError::io(p, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
            {
                // A closed pipe (`| head`) is not an error.
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    Err(AppError::io(Path::new("<stdout>"), e))
                }
                _ => Ok(()),
            }
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report types serialise") + "\n"
}

pub fn execute(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Generate(a) => generate(a),
        Command::Deform(a) => deform(a),
        Command::Rank(a) => {
            let shapes = load_collection(&a.collection, &graph_config(a.avatar.epsilon)?)?;
            let ranking = rank(&shapes, &a.avatar.load()?, &PipelineConfig::default());
            write_output(a.out.as_deref(), &ranking_csv(&ranking)?)
        }
        Command::Classify(a) => {
            let (shapes, avatar) = cost_inputs(&a.cost)?;
            let vectors =
                cost_vectors(&shapes, &avatar, &a.cost.poses, &PipelineConfig::default())?;
            let rule = match (a.threshold, a.no_outliers) {
                (Some(threshold), _) => OutlierRule::Fixed { threshold },
                (None, true) => OutlierRule::Off,
                (None, false) => OutlierRule::Mad {
                    base: 2.0,
                    k: a.outlier_k,
                },
            };
            let c = classify(&vectors, rule);
            write_output(a.cost.out.as_deref(), &classify_csv(&vectors, &c.labels)?)
        }
        Command::Embed(a) => {
            let (shapes, avatar) = cost_inputs(&a.cost)?;
            let vectors =
                cost_vectors(&shapes, &avatar, &a.cost.poses, &PipelineConfig::default())?;
            let emb = mds_embed(&distance_matrix(&vectors, a.metric)?)?;
            write_output(a.cost.out.as_deref(), &embed_csv(&vectors, &emb)?)
        }
        Command::Coretrieve(a) => coretrieve_cmd(a),
        Command::Serve(a) => {
            let shapes = load_collection(&a.collection, &graph_config(a.epsilon)?)?;
            crate::service::serve_blocking(shapes, &a.bind, a.port)
        }
    }
}

fn cost_inputs(a: &CostArgs) -> Result<(Vec<Shape>, Avatar), AppError> {
    if a.poses.is_empty() {
        return Err(AppError::Usage(
            "--poses must name at least one pose".into(),
        ));
    }
    if a.poses.contains(&PoseName::Custom) {
        return Err(AppError::Usage("--poses takes preset poses only".into()));
    }
    Ok((
        load_collection(&a.collection, &graph_config(a.avatar.epsilon)?)?,
        a.avatar.load()?,
    ))
}

fn regraph(shape: Shape, graph: &GraphConfig, custom: bool) -> Result<Shape, AppError> {
    if !custom {
        return Ok(shape);
    }
    Ok(Shape::new(
        shape.id,
        shape.components,
        shape.style_label,
        graph,
    )?)
}

fn generate(a: GenerateArgs) -> Result<(), AppError> {
    let graph = graph_config(a.epsilon)?;
    std::fs::create_dir_all(&a.out).map_err(|e| AppError::io(&a.out, e))?;
    let seeds = a.seed..a.seed + a.count as u64;
    let mut shapes = Vec::new();
    let styles: Vec<ChairStyle> = match a.style {
        GenerateKind::Office => vec![ChairStyle::Office],
        GenerateKind::Bench => vec![ChairStyle::Bench],
        GenerateKind::Beach => vec![ChairStyle::Beach],
        GenerateKind::Bar => vec![ChairStyle::Bar],
        GenerateKind::All => ChairStyle::ALL.to_vec(),
        GenerateKind::Table | GenerateKind::Monitor => Vec::new(),
    };
    for style in styles {
        for seed in seeds.clone() {
            shapes.push(generate_chair(style, &ChairParams::default(), seed)?);
        }
    }
    for seed in seeds.clone() {
        match a.style {
            GenerateKind::Table => shapes.push(generate_table(seed)?),
            GenerateKind::Monitor => shapes.push(generate_monitor(seed)?),
            _ => {}
        }
    }
    let mut listing = String::new();
    for s in shapes {
        let s = regraph(s, &graph, a.epsilon.is_some())?;
        let path = a.out.join(format!("{}.json", s.id));
        save_shape(&s, &path)?;
        listing += &format!("{}\n", path.display());
    }
    write_output(None, &listing)
}

fn deform(a: DeformArgs) -> Result<(), AppError> {
    let graph = graph_config(a.avatar.epsilon)?;
    let shape = load_shape_with(&a.shape, &graph)?;
    let avatar = a.avatar.load()?;
    let cfg = PipelineConfig::default();
    if a.dump_constraints {
        let groups = derive_constraints(&avatar.measure(), &shape, &cfg.ergo)?;
        eprint!("{}", dump_constraints(&groups));
    }
    let eval = evaluate(&shape, &avatar.measure(), &cfg)?;
    save_shape(&eval.reshaped.shape, &a.out)?;
    let report = DeformReport::new(&eval)?;
    write_output(a.report.as_deref(), &to_json(&report))
}

#[derive(Serialize)]
struct Placed {
    category: Category,
    shape_id: String,
    energy: f64,
    placement: [f64; 3],
    file: Option<String>,
    report: DeformReport,
}

fn coretrieve_cmd(a: CoretrieveArgs) -> Result<(), AppError> {
    let graph = graph_config(a.avatar.epsilon)?;
    let avatar = a.avatar.load()?;
    let mut collections = vec![(Category::Chair, load_collection(&a.chairs, &graph)?)];
    if let Some(dir) = &a.tables {
        collections.push((Category::Table, load_collection(dir, &graph)?));
    }
    if let Some(dir) = &a.monitors {
        collections.push((Category::Monitor, load_collection(dir, &graph)?));
    }
    let out = coretrieve(&avatar, &collections, &PipelineConfig::default())?;
    if let Some(dir) = &a.out {
        std::fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))?;
    }
    let mut placed = Vec::new();
    for r in &out {
        let file = match &a.out {
            Some(dir) => {
                let path = dir.join(format!("{}_{}.json", r.category, r.placed.id));
                save_shape(&r.placed, &path)?;
                Some(path.display().to_string())
            }
            None => None,
        };
        placed.push(Placed {
            category: r.category,
            shape_id: r.original.id.clone(),
            energy: r.evaluation.energy,
            placement: [r.placement.x, r.placement.y, r.placement.z],
            file,
            report: DeformReport::new(&r.evaluation)?,
        });
    }
    write_output(None, &to_json(&placed))
}
