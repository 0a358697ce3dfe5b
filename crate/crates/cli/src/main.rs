use std::fs;
use std::io::IsTerminal;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use topoknit::random::{random_pattern, Template};
use topoknit::suite::{run_case, summarize};
use topoknit::{bench, follow_the_yarn, oracle, CnGrid, Error, RenderStyle, StitchPattern};

const OK: u8 = 0;
const INVALID: u8 = 1;
const PARSE: u8 = 2;
const EVAL: u8 = 3;

#[derive(Parser)]
#[command(name = "topoknit", version, about = "Yarn-level topology of weft-knit stitch patterns")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a pattern against the knittability rules.
    Validate { file: PathBuf },
    /// Populate the CN grid and follow the yarn.
    Eval {
        file: PathBuf,
        /// Print the grid before and/or after evaluation. Repeatable.
        #[arg(long, value_enum)]
        dump_grid: Vec<Stage>,
        /// Write the yarn path here instead of stdout.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Evaluate even if validation fails.
        #[arg(long)]
        force: bool,
    },
    /// Draw the topology graph.
    Render {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Svg)]
        format: Format,
        /// Write one file per stitch-row prefix 1..=ROWS into the --out directory.
        #[arg(long)]
        rows: Option<usize>,
        /// Output file, or directory with --rows. Defaults to stdout.
        #[arg(long, short)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 40.0)]
        spacing: f64,
        #[arg(long, default_value_t = 7.0)]
        node_radius: f64,
        #[arg(long, default_value_t = 10.0)]
        square_size: f64,
        #[arg(long)]
        no_arrows: bool,
        #[arg(long)]
        force: bool,
    },
    /// Time evaluation of a block tiled to square sizes.
    Bench {
        /// Block to tile; defaults to the built-in mixed block.
        #[arg(long)]
        block: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_values_t = bench::DEFAULT_SIZES.to_vec())]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 7)]
        reps: usize,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate seeded random 5×5 patterns and check invariants and the simulator.
    RandomSuite {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// teal randomizes every interior cell, magenta a checkerboard of them.
        /// Without it the two alternate.
        #[arg(long, value_enum)]
        template: Option<TemplateArg>,
        #[arg(long)]
        json: bool,
    },
    /// Compare evaluator contacts with the loop simulator.
    #[command(hide = true)]
    Oracle { file: PathBuf },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Stage {
    Pre,
    Post,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Svg,
    Dot,
    Json,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Svg => "svg",
            Format::Dot => "dot",
            Format::Json => "json",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TemplateArg {
    Teal,
    Magenta,
}

impl From<TemplateArg> for Template {
    fn from(t: TemplateArg) -> Template {
        match t {
            TemplateArg::Teal => Template::Full,
            TemplateArg::Magenta => Template::Checker,
        }
    }
}

/// A failure that maps onto the exit-code contract.
struct Failure {
    code: u8,
    err: anyhow::Error,
}

impl Failure {
    fn new(code: u8, err: impl Into<anyhow::Error>) -> Failure {
        Failure { code, err: err.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = if matches!(e, Error::Pattern(_)) { PARSE } else { EVAL };
        Failure::new(code, e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure::new(EVAL, e)
    }
}

type Outcome = Result<u8, Failure>;

struct Paint(bool);

impl Paint {
    fn detect() -> Paint {
        let off = std::env::var("TOPOKNIT_COLOR").is_ok_and(|v| v == "0");
        Paint(!off && std::io::stdout().is_terminal())
    }

    fn status(&self, ok: bool) -> String {
        match (self.0, ok) {
            (false, true) => "ok".into(),
            (false, false) => "FAIL".into(),
            (true, true) => "\x1b[32mok\x1b[0m".into(),
            (true, false) => "\x1b[31mFAIL\x1b[0m".into(),
        }
    }
}

fn load(file: &Path) -> Result<StitchPattern, Failure> {
    let text = fs::read_to_string(file)
        .with_context(|| format!("reading {}", file.display()))
        .map_err(|e| Failure::new(PARSE, e))?;
    StitchPattern::parse(&text)
        .map_err(|e| Failure::new(PARSE, anyhow::Error::new(e).context(file.display().to_string())))
}

fn require_valid(p: &StitchPattern, force: bool) -> Result<(), Failure> {
    let report = topoknit::validate(p);
    if report.ok || force {
        return Ok(());
    }
    Err(Failure::new(
        INVALID,
        anyhow::anyhow!("pattern is not knittable (use --force to evaluate anyway)\n{report}"),
    ))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(|e| Failure::new(EVAL, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn validate(file: &Path) -> Outcome {
    let p = load(file)?;
    let report = topoknit::validate(&p);
    println!("{} {}", file.display(), Paint::detect().status(report.ok));
    print!("{report}");
    Ok(if report.ok { OK } else { INVALID })
}

fn eval(file: &Path, dump: &[Stage], json: Option<&Path>, force: bool) -> Outcome {
    let p = load(file)?;
    require_valid(&p, force)?;
    let pre = CnGrid::build(&p)?;
    let mut post = pre.clone();
    let path = follow_the_yarn(&mut post)?;
    if dump.contains(&Stage::Pre) {
        println!("# grid before evaluation");
        print!("{}", pre.dump());
    }
    if dump.contains(&Stage::Post) {
        println!("# grid after evaluation");
        print!("{}", post.dump());
        println!("# changed by evaluation");
        for ((i, j), before, after) in pre.diff(&post) {
            println!("({i}, {j}) {before} -> {after}");
        }
    }
    let text = path.to_json() + "\n";
    match json {
        Some(out) => emit(Some(out), &text)?,
        None if dump.is_empty() => emit(None, &text)?,
        None => {}
    }
    Ok(OK)
}

fn render(
    file: &Path,
    format: Format,
    rows: Option<usize>,
    out: Option<&Path>,
    style: RenderStyle,
    force: bool,
) -> Outcome {
    let p = load(file)?;
    require_valid(&p, force)?;
    style.check()?;
    let draw = |g: &topoknit::TopologyGraph| -> Result<String, Failure> {
        Ok(match format {
            Format::Svg => topoknit::to_svg(g, &style)?,
            Format::Dot => topoknit::to_dot(g),
            Format::Json => g.to_json() + "\n",
        })
    };
    match rows {
        None => {
            let (_, _, graph) = topoknit::topology(&p)?;
            emit(out, &draw(&graph)?)?;
        }
        Some(r) => {
            let dir = out.ok_or_else(|| Failure::new(INVALID, anyhow::anyhow!("--rows needs --out DIR")))?;
            fs::create_dir_all(dir)?;
            let stem = file.file_stem().and_then(|s| s.to_str()).unwrap_or("pattern");
            for (k, graph) in topoknit::row_snapshots(&p, r)?.iter().enumerate() {
                let name = dir.join(format!("{stem}_rows{:02}.{}", k + 1, format.ext()));
                fs::write(&name, draw(graph)?)?;
                println!("{}", name.display());
            }
        }
    }
    Ok(OK)
}

fn run_bench(block: Option<&Path>, sizes: &[usize], reps: usize, json: bool) -> Outcome {
    let block = match block {
        Some(f) => load(f)?,
        None => StitchPattern::parse(bench::MIXED_BLOCK)?,
    };
    let report = bench::run(&block, sizes, reps)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&report).map_err(|e| Failure::new(EVAL, e))?);
        return Ok(OK);
    }
    println!("{:>6} {:>9} {:>12}", "size", "stitches", "seconds");
    for s in &report.samples {
        println!("{:>6} {:>9} {:>12.6}", s.size, s.stitches, s.seconds);
    }
    if report.samples.len() >= 2 {
        println!(
            "slope {:.3e} s/stitch, intercept {:.3e} s, R² {:.4}",
            report.slope, report.intercept, report.r_squared
        );
    } else {
        println!("no fit: need at least two sizes");
    }
    if let Some(r) = report.ratio_150_50 {
        println!("time(150×150) / time(50×50) = {r:.2}");
    }
    Ok(OK)
}

fn random_suite(count: usize, seed: u64, template: Option<TemplateArg>, json: bool) -> Outcome {
    let reports: Vec<_> = (0..count as u64)
        .map(|k| {
            let t = match template {
                Some(t) => t.into(),
                None if k % 2 == 0 => Template::Full,
                None => Template::Checker,
            };
            run_case(&random_pattern(seed.wrapping_add(k), t))
        })
        .collect();
    let summary = summarize(&reports);
    let ok = summary.passed == summary.count;
    if json {
        println!("{}", serde_json::to_string_pretty(&summary).map_err(|e| Failure::new(EVAL, e))?);
    } else {
        let paint = Paint::detect();
        println!(
            "{} {}/{} passed, {} exact oracle matches, {} with every head anchored",
            paint.status(ok),
            summary.passed,
            summary.count,
            summary.exact,
            summary.sound
        );
        for k in &summary.failures {
            let r = &reports[*k];
            let why = r.error.clone().unwrap_or_else(|| format!("{:?}", r.agreement));
            println!("  case {k} (seed {}): {why}", seed.wrapping_add(*k as u64));
        }
    }
    Ok(if ok { OK } else { EVAL })
}

fn run_oracle(file: &Path) -> Outcome {
    let p = load(file)?;
    let d = oracle::differential(&p)?;
    println!("{}", serde_json::to_string_pretty(&d).map_err(|e| Failure::new(EVAL, e))?);
    Ok(if d.agreement.agrees() { OK } else { EVAL })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Validate { file } => validate(file),
        Command::Eval { file, dump_grid, json, force } => eval(file, dump_grid, json.as_deref(), *force),
        Command::Render { file, format, rows, out, spacing, node_radius, square_size, no_arrows, force } => {
            let style = RenderStyle {
                spacing: *spacing,
                node_radius: *node_radius,
                square_size: *square_size,
                arrowheads: !no_arrows,
            };
            render(file, *format, *rows, out.as_deref(), style, *force)
        }
        Command::Bench { block, sizes, reps, json } => run_bench(block.as_deref(), sizes, *reps, *json),
        Command::RandomSuite { count, seed, template, json } => random_suite(*count, *seed, *template, *json),
        Command::Oracle { file } => run_oracle(file),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(Failure { code, err }) => {
            eprintln!("error: {err:#}");
            ExitCode::from(code)
        }
    }
}
