//! Command-line front end for the `bratteli` library.
//!
//! Exit codes: 0 success or property holds, 1 property fails or no
//! isomorphism, 2 input error, 3 depth cap exceeded, 4 undecided.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bratteli::{
    build_kr, build_kr_canonical, canonical_w, check_pa_axioms, equiv_search, gen, iso_check, parse_diagram,
    render_dot, serialize_diagram, succ_fiber, pred_fiber, telescope, vershik, vershik_inv, BvModel, EquivOutcome,
    Error, EventuallyPeriodicPath, Extreme, FinitePath, OrderedDiagram, Telescoping, DEFAULT_CAP,
};
use clap::{Parser, Subcommand};

const PATH_HELP: &str = "Path text: comma-separated 0-based edge ids, one per level starting at level 1. \
An edge id is the position of the edge in its level's `edges` list in the JSON file. \
Infinite paths are written HEAD|CYCLE, e.g. `1,0|1,1`; a path without `|` is finite.";

#[derive(Parser)]
#[command(name = "bratteli", version, about = "Ordered Bratteli diagrams and their Vershik maps", after_help = PATH_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the structural invariants of a diagram file.
    Validate { file: PathBuf },
    /// Successor of a path (fiber successor for finite paths).
    #[command(after_help = PATH_HELP)]
    Succ {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        path: String,
    },
    /// Predecessor of a path (fiber predecessor for finite paths).
    #[command(after_help = PATH_HELP)]
    Pred {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        path: String,
    },
    /// Print the orbit of an infinite path; negative steps go backwards.
    #[command(after_help = PATH_HELP)]
    Orbit {
        file: PathBuf,
        #[arg(long)]
        path: String,
        #[arg(long, allow_hyphen_values = true)]
        steps: i64,
    },
    /// List the maximal and minimal paths.
    Extrema { file: PathBuf },
    /// Telescope to the given comma-separated levels (starting at 0).
    Telescope {
        file: PathBuf,
        #[arg(long)]
        levels: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Diagram rebuilt from the canonical KR partitions of levels 0..=N, or
    /// of an explicit comma-separated level list.
    Rebuild {
        file: PathBuf,
        #[arg(long)]
        levels: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the edge labels and tower heights.
        #[arg(long)]
        audit: bool,
    },
    /// Test two diagrams for graded order isomorphism.
    Iso {
        a: PathBuf,
        b: PathBuf,
        /// Truncation depth used for infinite inputs.
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
    /// Bounded search for a telescoping equivalence.
    Equiv {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        budget: usize,
    },
    /// KR conditions, partial-action axioms and the conjugacy round trip.
    Verify {
        file: PathBuf,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Write a Graphviz rendering of the first levels.
    Render {
        file: PathBuf,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate `odometer`, `twomax` or `random`.
    Gen {
        name: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Lib(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type Outcome = Result<u8, Failure>;

fn read_input(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
    }
}

fn load(path: &Path) -> Result<OrderedDiagram, Failure> {
    Ok(parse_diagram(&read_input(path)?)?)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn parse_levels(s: &str) -> Result<Vec<usize>, Failure> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Failure::Io(format!("`{t}` is not a level number")))
        })
        .collect()
}

fn step(d: &OrderedDiagram, path: &str, forward: bool) -> Outcome {
    if path.contains('|') {
        let x = EventuallyPeriodicPath::parse(d, path)?;
        let y = if forward { vershik(d, &x)? } else { vershik_inv(d, &x)? };
        println!("{y}");
    } else {
        let p: FinitePath = path.parse()?;
        let q = if forward { succ_fiber(d, &p)? } else { pred_fiber(d, &p)? };
        println!("{q}");
    }
    Ok(0)
}

fn orbit(d: &OrderedDiagram, path: &str, steps: i64) -> Outcome {
    let mut x = EventuallyPeriodicPath::parse(d, path)?;
    let mut out = String::new();
    out.push_str(&format!("{x}\n"));
    for i in 0..steps.unsigned_abs() {
        let next = if steps > 0 { vershik(d, &x) } else { vershik_inv(d, &x) };
        match next {
            Ok(y) => {
                out.push_str(&format!("{y}\n"));
                x = y;
            }
            Err(Error::Domain(msg)) => {
                io::stdout().write_all(out.as_bytes())?;
                eprintln!("orbit stops after {i} steps: {msg}");
                return Ok(0);
            }
            Err(e) => return Err(e.into()),
        }
    }
    io::stdout().write_all(out.as_bytes())?;
    Ok(0)
}

fn extrema(d: &OrderedDiagram) -> Outcome {
    for (kind, name) in [(Extreme::Max, "max"), (Extreme::Min, "min")] {
        let paths: Vec<String> = d.extreme_paths(kind)?.iter().map(ToString::to_string).collect();
        println!("{name}: {}", paths.join(" "));
    }
    Ok(0)
}

fn rebuild(d: &OrderedDiagram, levels: &str, out: &Option<PathBuf>, audit: bool) -> Outcome {
    let list = parse_levels(levels)?;
    let model = if list.len() == 1 {
        BvModel::canonical(d, list[0])?
    } else {
        BvModel::at_levels(d, &list)?
    };
    if audit {
        print!("{}", model.rebuilt().audit_log());
    }
    if out.is_some() || !audit {
        emit(out, &serialize_diagram(model.rebuilt().diagram()))?;
    }
    Ok(0)
}

fn truncated(d: OrderedDiagram, depth: usize) -> Result<OrderedDiagram, Failure> {
    if d.is_finite() {
        Ok(d)
    } else {
        Ok(d.truncate(depth)?)
    }
}

fn iso(a: OrderedDiagram, b: OrderedDiagram, depth: usize) -> Outcome {
    let (a, b) = (truncated(a, depth)?, truncated(b, depth)?);
    match iso_check(&a, &b) {
        Some(w) => {
            println!("isomorphic");
            println!("vertex_maps: {:?}", w.vertex_maps);
            Ok(0)
        }
        None => {
            println!("not isomorphic");
            Ok(1)
        }
    }
}

fn verify(d: &OrderedDiagram, depth: usize, cap: usize) -> Outcome {
    let mut ok = true;
    let mut report = |label: String, pass: bool| {
        println!("{label}: {}", if pass { "ok" } else { "FAIL" });
        ok &= pass;
    };
    for n in 0..=depth {
        let canon = build_kr_canonical(d, n)?;
        let failures = canon.check_conditions(d, cap)?;
        for f in &failures {
            eprintln!("canonical partition {n}: {f}");
        }
        report(format!("kr canonical n={n}"), failures.is_empty());
        match canonical_w(d, n) {
            Ok(w) => {
                let built = build_kr(d, &w, cap);
                let pass = match built {
                    Ok(p) => p == canon.merge_equal_heights(d),
                    Err(Error::KrConditionsFailed(msg)) => {
                        eprintln!("partition over base {n}: {msg}");
                        false
                    }
                    Err(e) => return Err(e.into()),
                };
                report(format!("kr base n={n}"), pass);
            }
            Err(Error::DegenerateDiagram(msg)) => eprintln!("kr base n={n}: skipped, {msg}"),
            Err(e) => return Err(e.into()),
        }
    }
    let pa_cap = depth.max(1);
    let mut pa = true;
    for s in -2..=2 {
        for t in -2..=2 {
            pa &= check_pa_axioms(d, s, t, pa_cap)?;
        }
    }
    report(format!("partial action cap={pa_cap}"), pa);
    let model = BvModel::canonical(d, depth)?;
    let source = d.truncate(depth)?;
    report(
        format!("rebuild isomorphic depth={depth}"),
        iso_check(model.rebuilt().diagram(), &source).is_some(),
    );
    let conj = model.verify_conjugacy(d, depth)?;
    for f in &conj.failures {
        eprintln!("conjugacy: {f}");
    }
    report(format!("conjugacy depth={depth}"), conj.passed());
    Ok(if ok { 0 } else { 1 })
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Validate { file } => {
            let text = read_input(&file)?;
            let (prefix, block) = bratteli::parse_document(&text)?;
            let report = bratteli::diagram::validate(&prefix, &block);
            if report.is_valid() {
                println!("valid");
                Ok(0)
            } else {
                for v in &report.violations {
                    println!("{v}");
                }
                Ok(1)
            }
        }
        Command::Succ { file, path } => step(&load(&file)?, &path, true),
        Command::Pred { file, path } => step(&load(&file)?, &path, false),
        Command::Orbit { file, path, steps } => orbit(&load(&file)?, &path, steps),
        Command::Extrema { file } => extrema(&load(&file)?),
        Command::Telescope { file, levels, out } => {
            let d = load(&file)?;
            let t = Telescoping::new(parse_levels(&levels)?)?;
            emit(&out, &serialize_diagram(&telescope(&d, &t)?))?;
            Ok(0)
        }
        Command::Rebuild {
            file,
            levels,
            out,
            audit,
        } => rebuild(&load(&file)?, &levels, &out, audit),
        Command::Iso { a, b, depth } => iso(load(&a)?, load(&b)?, depth),
        Command::Equiv { a, b, budget } => match equiv_search(&load(&a)?, &load(&b)?, budget)? {
            EquivOutcome::Certificate(c) => {
                println!("{}", c.to_json());
                Ok(0)
            }
            EquivOutcome::Undecided => {
                println!("undecided");
                Ok(4)
            }
        },
        Command::Verify { file, depth, cap } => verify(&load(&file)?, depth, cap),
        Command::Render { file, depth, out } => {
            emit(&out, &render_dot(&load(&file)?, depth)?)?;
            Ok(0)
        }
        Command::Gen { name, seed, out } => {
            let g: gen::Generator = name.parse()?;
            emit(&out, &serialize_diagram(&gen::generate(g, seed)))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Lib(Error::CapExceeded { cap })) => {
            eprintln!("error: depth cap {cap} exceeded; retry with a larger --cap");
            ExitCode::from(3)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
