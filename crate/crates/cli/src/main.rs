use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use frameproof::selftest::{self, SelftestConfig};
use frameproof::verify::DEFAULT_BUDGET;
use frameproof::{
    augment_infinity, base_code, build_oa_strength2, compose, execute_plan, oa_family, oa_pipeline, plan, verify_oa,
    BaseCodeId, BoundReport, Code, Compose, Document, Error, OrthogonalArray, VerifyOptions, VerifyReport, Witness,
};

const EXIT_VIOLATION: u8 = 1;
const EXIT_RESOURCE: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "frameproof", version, about = "Build and verify q-ary c-frameproof codes")]
struct Cli {
    /// Seed for randomized checks
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Maximum (coalition, candidate) checks for the naive verifier
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Verifier worker threads
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: u64,
    /// Print only summary lines
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a code from a base fixture or a composition recipe
    Construct(ConstructArgs),
    /// Check that a code is c-frameproof
    Verify {
        #[arg(long)]
        c: usize,
        #[arg(long, value_enum, default_value_t = Algorithm::Cover)]
        algorithm: Algorithm,
        file: PathBuf,
    },
    /// Print (and optionally run) the recursive plan for a length c+2 code
    Plan {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..=3))]
        c: u64,
        #[arg(long)]
        q: u64,
        #[arg(long, requires = "out")]
        execute: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Skip re-verification of intermediate codes
        #[arg(long)]
        trust: bool,
    },
    /// Emit the strength-2 orthogonal array OA(2, s+1, s)
    Oa {
        #[arg(long)]
        s: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check an orthogonal array file
    OaVerify { file: PathBuf },
    /// Report size bounds for (c, l, q), optionally against a code
    Bounds {
        #[arg(long)]
        c: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        code: Option<PathBuf>,
    },
    /// Run the built-in fixture, array and verifier checks
    Selftest {
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Validate a .fpc or .oa file and summarize it
    Import { file: PathBuf },
    /// Validate a .fpc or .oa file and write it in canonical form
    Export {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct ConstructArgs {
    #[arg(long, value_enum)]
    recipe: Recipe,
    /// Field order for composition
    #[arg(long)]
    m: Option<u64>,
    /// Coalition size
    #[arg(long)]
    c: Option<usize>,
    /// P(t) strength
    #[arg(long, default_value_t = 2)]
    t: usize,
    /// Orthogonal array order
    #[arg(long)]
    s: Option<u64>,
    /// Parent code to compose
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Add the all-infinity word
    #[arg(long)]
    augment_inf: bool,
    /// Skip re-verification of the parent code
    #[arg(long)]
    trust: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Recipe {
    Ex1,
    Ex2,
    Lem4,
    Lem5,
    #[value(name = "lemma2")]
    Compose,
    #[value(name = "lemma7")]
    ArrayCompose,
    #[value(name = "cor-oa")]
    ArrayFamily,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Algorithm {
    Naive,
    Cover,
    Both,
}

/// A failure together with its exit status.
struct Failure {
    status: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            status: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::BudgetExceeded { .. }
            | Error::DescendantCapExceeded { .. }
            | Error::FieldTooLarge(_)
            | Error::Overflow(_) => EXIT_RESOURCE,
            _ => EXIT_USAGE,
        };
        Failure {
            status,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure {
        status: EXIT_RESOURCE,
        message: format!("{}: {e}", path.display()),
    })
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure {
        status: EXIT_RESOURCE,
        message: format!("{}: {e}", path.display()),
    })
}

fn load_code(path: &Path) -> Result<Code, Failure> {
    read(path)?
        .parse()
        .map_err(|e: Error| Failure::usage(format!("{}: {e}", path.display())))
}

fn print_witness(code: Option<&Code>, witness: &Witness) {
    let word = |w: &[u32]| match code {
        Some(c) => c.display_word(w).to_string(),
        None => w.iter().map(u32::to_string).collect::<Vec<_>>().join(" "),
    };
    match witness {
        Witness::Framed { coalition, framed } => {
            println!("framed word: {}", word(framed));
            println!("coalition:");
            for y in coalition {
                println!("  {}", word(y));
            }
        }
        Witness::PtViolation(v) => println!("P(t) violation: {v:?}"),
        Witness::OaViolation {
            rows,
            tuple,
            count,
            expected,
        } => {
            let expected = expected.map_or("a non-integral index".to_string(), |e| e.to_string());
            println!(
                "rows {rows:?}: tuple ({}) appears {count} times, expected {expected}",
                word(tuple)
            );
        }
    }
}

fn report_line(name: &str, c: usize, r: &VerifyReport) -> String {
    format!(
        "{name}: {} (c={c}, {} checks, {:.3}s)",
        if r.verdict { "frameproof" } else { "witness found" },
        r.subsets_examined,
        r.elapsed.as_secs_f64()
    )
}

fn construct(args: &ConstructArgs, quiet: bool) -> Outcome {
    let base = match args.recipe {
        Recipe::Ex1 => Some(BaseCodeId::Ex1),
        Recipe::Ex2 => Some(BaseCodeId::Ex2),
        Recipe::Lem4 => Some(BaseCodeId::Lem4),
        Recipe::Lem5 => Some(BaseCodeId::Lem5),
        _ => None,
    };
    let need = |v: Option<u64>, flag: &str| v.ok_or_else(|| Failure::usage(format!("this recipe needs --{flag}")));
    let reject = |present: bool, flag: &str| {
        if present {
            Err(Failure::usage(format!("--{flag} does not apply to this recipe")))
        } else {
            Ok(())
        }
    };

    let (code, c) = match (args.recipe, base) {
        (_, Some(id)) => {
            reject(args.m.is_some(), "m")?;
            reject(args.s.is_some(), "s")?;
            reject(args.input.is_some(), "in")?;
            (base_code(id), args.c.unwrap_or(id.coalition()))
        }
        (Recipe::Compose, None) => {
            reject(args.s.is_some(), "s")?;
            let input = args
                .input
                .as_deref()
                .ok_or_else(|| Failure::usage("this recipe needs --in"))?;
            let parent = load_code(input)?;
            let c = need(args.c.map(|c| c as u64), "c")? as usize;
            let params = Compose {
                trust: args.trust,
                ..Compose::new(need(args.m, "m")?, args.t, c)
            };
            (compose(&parent, &params)?, c)
        }
        (Recipe::ArrayCompose, None) => {
            reject(args.input.is_some(), "in")?;
            let s = need(args.s, "s")?;
            let c = need(args.c.map(|c| c as u64), "c")? as usize;
            let l = s as usize + 1;
            (oa_pipeline(s, args.t, l, need(args.m, "m")?, c, args.trust)?, c)
        }
        (Recipe::ArrayFamily, None) => {
            reject(args.input.is_some(), "in")?;
            reject(args.s.is_some(), "s")?;
            let c = need(args.c.map(|c| c as u64), "c")? as usize;
            (oa_family(c, need(args.m, "m")?, args.trust)?, c)
        }
        _ => unreachable!("base recipes handled above"),
    };
    let code = if args.augment_inf {
        augment_infinity(&code, c, args.t, args.trust)?
    } else {
        code
    };
    write(&args.out, &code.to_string())?;
    if !quiet {
        println!(
            "wrote {}: q={} l={} M={}",
            args.out.display(),
            code.alphabet(),
            code.length(),
            code.len()
        );
    }
    Ok(0)
}

fn verify(path: &Path, c: usize, algorithm: Algorithm, opts: VerifyOptions, quiet: bool) -> Outcome {
    let code = load_code(path)?;
    let mut runs: Vec<(&str, VerifyReport)> = Vec::new();
    if matches!(algorithm, Algorithm::Naive | Algorithm::Both) {
        runs.push(("naive", frameproof::is_frameproof_naive(&code, c, opts)?));
    }
    if matches!(algorithm, Algorithm::Cover | Algorithm::Both) {
        runs.push(("cover", frameproof::is_frameproof_cover(&code, c, opts)?));
    }
    for (name, r) in &runs {
        println!("{}", report_line(name, c, r));
        if let (Some(w), false) = (&r.witness, quiet) {
            print_witness(Some(&code), w);
        }
    }
    if runs.windows(2).any(|w| w[0].1.verdict != w[1].1.verdict) {
        eprintln!("error: verifiers disagree");
    }
    Ok(if runs.iter().all(|(_, r)| r.verdict) {
        0
    } else {
        EXIT_VIOLATION
    })
}

fn run(cli: Cli) -> Outcome {
    let opts = VerifyOptions {
        budget: cli.budget,
        jobs: cli.jobs as usize,
    };
    match &cli.command {
        Command::Construct(args) => construct(args, cli.quiet),
        Command::Verify { c, algorithm, file } => verify(file, *c, *algorithm, opts, cli.quiet),
        Command::Plan {
            c,
            q,
            execute,
            out,
            trust,
        } => {
            let p = plan(*c as usize, *q)?;
            if !cli.quiet {
                print!("{p}");
            }
            println!("plan: {}", p.to_line());
            if *execute {
                let code = execute_plan(&p, *trust)?;
                let out = out.as_deref().expect("clap enforces --out with --execute");
                write(out, &code.to_string())?;
                println!(
                    "wrote {}: q={} l={} M={}",
                    out.display(),
                    code.alphabet(),
                    code.length(),
                    code.len()
                );
            } else if out.is_some() {
                return Err(Failure::usage("--out requires --execute"));
            }
            Ok(0)
        }
        Command::Oa { s, out } => {
            let text = build_oa_strength2(*s)?.to_string();
            match out {
                Some(path) => write(path, &text)?,
                None => print!("{text}"),
            }
            Ok(0)
        }
        Command::OaVerify { file } => {
            let array: OrthogonalArray = read(file)?
                .parse()
                .map_err(|e: Error| Failure::usage(format!("{}: {e}", file.display())))?;
            let r = verify_oa(&array);
            println!(
                "OA(N={}, k={}, s={}, t={}): {}",
                array.runs(),
                array.constraints(),
                array.levels(),
                array.strength(),
                if r.verdict { "valid" } else { "invalid" }
            );
            if let Some(w) = &r.witness {
                print_witness(None, w);
            }
            Ok(if r.verdict { 0 } else { EXIT_VIOLATION })
        }
        Command::Bounds { c, l, q, code } => {
            let achieved = match code {
                Some(path) => {
                    let code = load_code(path)?;
                    if (code.length(), code.alphabet() as u64) != (*l, *q) {
                        return Err(Failure::usage(format!(
                            "code has l={} q={}, flags say l={l} q={q}",
                            code.length(),
                            code.alphabet()
                        )));
                    }
                    Some(code.len() as u128)
                }
                None => None,
            };
            let report = BoundReport::new(*c, *l, *q, achieved)?;
            if !cli.quiet {
                print!("{report}");
            }
            println!("{}", report.machine_line());
            Ok(0)
        }
        Command::Selftest { trials } => {
            let report = selftest::run(&SelftestConfig {
                seed: cli.seed,
                trials: *trials,
                jobs: opts.jobs,
            });
            if cli.quiet {
                println!("{}", report.summary());
            } else {
                print!("{report}");
            }
            Ok(if report.passed() { 0 } else { EXIT_VIOLATION })
        }
        Command::Import { file } => {
            let doc: Document = read(file)?
                .parse()
                .map_err(|e: Error| Failure::usage(format!("{}: {e}", file.display())))?;
            match doc {
                Document::Code(c) => println!(
                    "code: q={} l={} M={} inf={}",
                    c.alphabet(),
                    c.length(),
                    c.len(),
                    c.inf().map_or("none".into(), |i| i.to_string())
                ),
                Document::Array(a) => println!(
                    "orthogonal array: N={} k={} s={} t={}",
                    a.runs(),
                    a.constraints(),
                    a.levels(),
                    a.strength()
                ),
            }
            Ok(0)
        }
        Command::Export { file, out } => {
            let doc: Document = read(file)?
                .parse()
                .map_err(|e: Error| Failure::usage(format!("{}: {e}", file.display())))?;
            let text = doc.to_string();
            match out {
                Some(path) => write(path, &text)?,
                None => print!("{text}"),
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let status = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(status);
        }
    };
    match run(cli) {
        Ok(status) => ExitCode::from(status),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.status)
        }
    }
}
