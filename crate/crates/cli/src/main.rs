use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pocketforge_core::advisor::{advise_pocket, long_axis, report_markdown, Rules};
use pocketforge_core::geometry::{opening, Region, DEFAULT_TOL};
use pocketforge_core::kinematics::{simulate, MachineParams};
use pocketforge_core::pocket::{classify_pocket, mask_specific_entities, promote_negative_islands, Pocket};
use pocketforge_core::report::{
    histogram_csv, parse_feed, profile_csv, toolpath_svg, zones_svg, ClassifyOut, DecomposeOut, Document,
    PathgenOut, SimulateOut, SCHEMA,
};
use pocketforge_core::selection::{
    diameter_bounds, dichotomy_decompose, snap_to_catalog, validate_catalog, DichotomyParams, Tool,
};
use pocketforge_core::toolpath::{generate, path_length, to_gcode, Mode, PathContext, StrategyParams, Toolpath};
use pocketforge_core::{Error, ErrorCategory};
use serde::de::DeserializeOwned;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "pocketforge", version, about = "2.5D pocket machining decision support")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closure, floor, wall and island flags of a pocket.
    Classify {
        #[arg(long)]
        pocket: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Tool selection by diameter dichotomy and zone assignment.
    Decompose {
        #[arg(long)]
        pocket: PathBuf,
        #[arg(long)]
        tools: PathBuf,
        /// MRR gain needed to keep an upper diameter interval.
        #[arg(long, default_value_t = 0.05)]
        threshold: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Toolpath for one tool over the area it can reach.
    Pathgen {
        #[command(flatten)]
        path: PathArgs,
        /// Also write G-code.
        #[arg(long)]
        gcode: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Feed-rate planning and cycle time of a toolpath.
    Simulate {
        #[arg(long)]
        machine: PathBuf,
        /// Toolpath JSON (a pathgen output or a bare toolpath); generated from
        /// --pocket/--tools when absent.
        #[arg(long)]
        toolpath: Option<PathBuf>,
        #[command(flatten)]
        path: OptPathArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Ranks machining strategies for every selected tool.
    Advise {
        #[arg(long)]
        pocket: PathBuf,
        #[arg(long)]
        tools: PathBuf,
        #[arg(long)]
        machine: PathBuf,
        /// Rule file overriding the default knowledge base.
        #[arg(long)]
        rules: Option<PathBuf>,
        /// Feed for every tool, e.g. "10 m/min"; defaults to each tool's own.
        #[arg(long)]
        feed: Option<String>,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args)]
struct OutArgs {
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct PathArgs {
    #[arg(long)]
    pocket: PathBuf,
    #[arg(long)]
    tools: PathBuf,
    /// StrategyParams JSON; defaults to a spiral at half-diameter stepover.
    #[arg(long)]
    strategy: Option<PathBuf>,
    /// Catalog tool to use; defaults to the largest one that reaches the whole pocket.
    #[arg(long)]
    tool_diameter: Option<f64>,
    /// Programmed feed, e.g. "10 m/min"; defaults to the tool's own.
    #[arg(long)]
    feed: Option<String>,
}

#[derive(Args)]
struct OptPathArgs {
    #[arg(long, requires = "tools")]
    pocket: Option<PathBuf>,
    #[arg(long)]
    tools: Option<PathBuf>,
    #[arg(long)]
    strategy: Option<PathBuf>,
    #[arg(long)]
    tool_diameter: Option<f64>,
    #[arg(long)]
    feed: Option<String>,
}

enum Failure {
    Core(Error),
    Usage(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn kind_and_code(&self) -> (&'static str, u8) {
        match self {
            Failure::Core(e) => match e.category() {
                ErrorCategory::Validation => ("validation", 1),
                ErrorCategory::Infeasible => ("infeasible", 2),
            },
            Failure::Usage(_) => ("validation", 1),
            Failure::Io(_) => ("io", 3),
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Core(e) => e.to_string(),
            Failure::Usage(m) | Failure::Io(m) => m.clone(),
        }
    }
}

type Run<T> = Result<T, Failure>;

fn read_json<T: DeserializeOwned>(path: &Path) -> Run<T> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("cannot parse {}: {e}", path.display())))
}

fn stem(path: &Path) -> String {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("pocket");
    name.split('.').next().filter(|s| !s.is_empty()).unwrap_or("pocket").to_string()
}

struct Writer {
    dir: PathBuf,
    stem: String,
    command: &'static str,
    written: Vec<String>,
}

impl Writer {
    fn new(out: &OutArgs, stem: String, command: &'static str) -> Run<Self> {
        fs::create_dir_all(&out.out)
            .map_err(|e| Failure::Io(format!("cannot create {}: {e}", out.out.display())))?;
        Ok(Writer {
            dir: out.out.clone(),
            stem,
            command,
            written: vec![],
        })
    }

    fn text(&mut self, ext: &str, content: &str) -> Run<()> {
        let path = self.dir.join(format!("{}.{}.{ext}", self.stem, self.command));
        fs::write(&path, content).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))?;
        self.written.push(path.display().to_string());
        Ok(())
    }

    fn json<T: Serialize>(&mut self, body: T) -> Run<()> {
        let doc = Document::new(self.command, body);
        let text = serde_json::to_string_pretty(&doc).map_err(|e| Failure::Io(format!("cannot serialize output: {e}")))?;
        self.text("json", &(text + "\n"))
    }

    fn finish(self) {
        let summary = serde_json::json!({
            "schema": SCHEMA,
            "command": self.command,
            "written": self.written,
        });
        println!("{summary}");
    }
}

fn load_pocket(path: &Path) -> Run<Pocket> {
    let mut p: Pocket = read_json(path)?;
    p.validate()?;
    if p.name.is_none() {
        p.name = Some(stem(path));
    }
    Ok(p)
}

fn load_tools(path: &Path) -> Run<Vec<Tool>> {
    let tools: Vec<Tool> = read_json(path)?;
    validate_catalog(&tools)?;
    Ok(tools)
}

fn load_machine(path: &Path) -> Run<MachineParams> {
    let m: MachineParams = read_json(path)?;
    m.validate()?;
    Ok(m)
}

fn smallest_radius(tools: &[Tool]) -> f64 {
    tools.iter().map(|t| t.radius()).fold(f64::INFINITY, f64::min)
}

/// Masked machinable area of the pocket after splitting off negative islands.
fn machinable(pocket: &Pocket, tools: &[Tool]) -> Run<(Pocket, Region, Region)> {
    let (parent, _) = promote_negative_islands(pocket)?;
    let masked = mask_specific_entities(&parent, smallest_radius(tools))?;
    Ok((parent, masked.machinable, masked.reserved))
}

fn classify(pocket: &Path, out: &OutArgs) -> Run<()> {
    let p = load_pocket(pocket)?;
    let (parent, children) = promote_negative_islands(&p)?;
    let mut w = Writer::new(out, stem(pocket), "classify")?;
    w.json(ClassifyOut {
        class: classify_pocket(&parent),
        promoted: children.iter().filter_map(|c| c.name.clone()).collect(),
    })?;
    w.finish();
    Ok(())
}

fn decompose(pocket: &Path, tools: &Path, threshold: f64, out: &OutArgs) -> Run<()> {
    if !(threshold >= 0.0) {
        return Err(Failure::Usage("threshold must be non-negative".into()));
    }
    let p = load_pocket(pocket)?;
    let catalog = load_tools(tools)?;
    let (parent, area, reserved) = machinable(&p, &catalog)?;
    let bounds = diameter_bounds(&area)?;
    let params = DichotomyParams {
        threshold,
        ..DichotomyParams::for_catalog(&catalog)
    };
    let decomposition = dichotomy_decompose(&area, parent.depth, bounds, &catalog, params)?;
    let mut zones: Vec<(String, Region)> = decomposition
        .chosen
        .iter()
        .map(|z| (format!("D{}", z.tool.diameter), z.zone.clone()))
        .collect();
    zones.push(("residual".to_string(), decomposition.residual.clone()));
    let mut w = Writer::new(out, stem(pocket), "decompose")?;
    w.json(DecomposeOut {
        class: classify_pocket(&parent),
        machinable_area: area.area(),
        reserved_area: reserved.area() + 0.0,
        decomposition,
    })?;
    w.text("svg", &zones_svg(&parent.region(), &zones))?;
    w.finish();
    Ok(())
}

struct Generated {
    tool: Tool,
    zone: Region,
    path: Toolpath,
}

fn build_path(
    pocket: &Path,
    tools: &Path,
    strategy: Option<&Path>,
    tool_diameter: Option<f64>,
    feed: Option<&str>,
) -> Run<Generated> {
    let p = load_pocket(pocket)?;
    let catalog = load_tools(tools)?;
    let (parent, area, _) = machinable(&p, &catalog)?;
    let tool = match tool_diameter {
        Some(d) => catalog
            .iter()
            .find(|t| (t.diameter - d).abs() < 1e-9)
            .cloned()
            .ok_or_else(|| Failure::Usage(format!("no catalog tool with diameter {d}")))?,
        None => {
            let b = diameter_bounds(&area)?;
            snap_to_catalog(&catalog, b.d0)
                .or_else(|| snap_to_catalog(&catalog, b.dx))
                .cloned()
                .ok_or(Error::NoInsertableTool { max_diameter: b.dx })?
        }
    };
    let zone = opening(&area, tool.diameter, DEFAULT_TOL)?;
    if zone.is_empty() {
        return Err(Error::NoInsertableTool { max_diameter: tool.diameter }.into());
    }
    let class = classify_pocket(&parent);
    let rules = Rules::default();
    let params = match strategy {
        Some(s) => read_json(s)?,
        None => StrategyParams {
            entry: rules.entry_for(class.closure),
            ..StrategyParams::spiral(rules.stepover_ratio * tool.diameter)
        },
    };
    let params = if params.mode == Mode::Zigzag && strategy.is_none() {
        StrategyParams { zigzag_direction: long_axis(&zone), ..params }
    } else {
        params
    };
    let vf = match feed {
        Some(f) => parse_feed(f)?,
        None => tool.vc_mm_s,
    };
    let ctx = PathContext {
        closure: class.closure,
        open_edges: parent.open_edge_segments(),
        depth: parent.depth,
    };
    let path = generate(&zone, &tool, vf, &params, &ctx)?;
    Ok(Generated { tool, zone, path })
}

fn pathgen(a: &PathArgs, gcode: bool, out: &OutArgs) -> Run<()> {
    let g = build_path(&a.pocket, &a.tools, a.strategy.as_deref(), a.tool_diameter, a.feed.as_deref())?;
    let mut w = Writer::new(out, stem(&a.pocket), "pathgen")?;
    w.text("svg", &toolpath_svg(&g.zone, &g.path))?;
    if gcode {
        w.text("nc", &to_gcode(&g.path))?;
    }
    w.json(PathgenOut {
        tool: g.tool,
        zone: g.zone,
        length: path_length(&g.path),
        toolpath: g.path,
    })?;
    w.finish();
    Ok(())
}

fn read_toolpath(path: &Path) -> Run<Toolpath> {
    let v: serde_json::Value = read_json(path)?;
    let inner = match v.get("toolpath") {
        Some(t) => t.clone(),
        None => v,
    };
    let tp: Toolpath =
        serde_json::from_value(inner).map_err(|e| Failure::Usage(format!("cannot parse {}: {e}", path.display())))?;
    tp.validate()?;
    Ok(tp)
}

fn simulate_cmd(machine: &Path, toolpath: Option<&Path>, a: &OptPathArgs, out: &OutArgs) -> Run<()> {
    let m = load_machine(machine)?;
    let (path, name) = match (toolpath, &a.pocket, &a.tools) {
        (Some(t), _, _) => (read_toolpath(t)?, stem(t)),
        (None, Some(p), Some(tools)) => {
            let g = build_path(p, tools, a.strategy.as_deref(), a.tool_diameter, a.feed.as_deref())?;
            (g.path, stem(p))
        }
        _ => return Err(Failure::Usage("simulate needs --toolpath or --pocket with --tools".into())),
    };
    let vf = match (&a.feed, toolpath) {
        (Some(f), Some(_)) => parse_feed(f)?,
        _ => path.feed,
    };
    let result = simulate(&path, &m, vf)?;
    let mut w = Writer::new(out, name, "simulate")?;
    w.text("profile.csv", &profile_csv(&result))?;
    w.text("histogram.csv", &histogram_csv(&result))?;
    w.json(SimulateOut { machine: m, feed: vf, result })?;
    w.finish();
    Ok(())
}

fn advise(
    pocket: &Path,
    tools: &Path,
    machine: &Path,
    rules: Option<&Path>,
    feed: Option<&str>,
    out: &OutArgs,
) -> Run<()> {
    let p = load_pocket(pocket)?;
    let catalog = load_tools(tools)?;
    let m = load_machine(machine)?;
    let rules: Rules = match rules {
        Some(r) => read_json(r)?,
        None => Rules::default(),
    };
    let feed = feed.map(parse_feed).transpose()?;
    let advice = advise_pocket(&p, &catalog, &m, feed, &rules)?;
    let name = stem(pocket);
    let mut w = Writer::new(out, name.clone(), "advise")?;
    w.text("md", &report_markdown(&name, &advice))?;
    w.json(advice)?;
    w.finish();
    Ok(())
}

fn configure_threads() -> Run<()> {
    let Ok(v) = std::env::var("POCKETFORGE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("POCKETFORGE_THREADS must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(format!("cannot configure thread pool: {e}")))
}

fn run(cli: Cli) -> Run<()> {
    configure_threads()?;
    match cli.command {
        Command::Classify { pocket, out } => classify(&pocket, &out),
        Command::Decompose {
            pocket,
            tools,
            threshold,
            out,
        } => decompose(&pocket, &tools, threshold, &out),
        Command::Pathgen { path, gcode, out } => pathgen(&path, gcode, &out),
        Command::Simulate {
            machine,
            toolpath,
            path,
            out,
        } => simulate_cmd(&machine, toolpath.as_deref(), &path, &out),
        Command::Advise {
            pocket,
            tools,
            machine,
            rules,
            feed,
            out,
        } => advise(&pocket, &tools, &machine, rules.as_deref(), feed.as_deref(), &out),
    }
}

fn report(f: Failure) -> ExitCode {
    let (kind, code) = f.kind_and_code();
    let err = serde_json::json!({
        "schema": SCHEMA,
        "error": { "kind": kind, "message": f.message() },
    });
    eprintln!("{err}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return report(Failure::Usage(e.to_string())),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => report(f),
    }
}
