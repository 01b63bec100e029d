//! `fraisse`: command-line front end.
//!
//! Exit codes: 0 success, 1 malformed input or usage error, 2 a well-formed
//! negative answer (invalid structure, rejected certificate, violations).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use fraisse_core::embedding::Embedding;
use fraisse_core::format::{
    parse_embedding, parse_structure, parse_structures, write_embedding, write_structure, Layout,
    Writer,
};
use fraisse_core::limit::{parse_created, Approximation, PartialIso, Schedule};
use fraisse_core::refuter::{
    check_certificate, control_lo, parse_certificate, refute, strategy_by_name, write_certificate,
};
use fraisse_core::{amalgamate, apply_k, enumerate_types, iterate_k, validate, FinStruct, OnePointType, Validity};

#[derive(Parser)]
#[command(name = "fraisse", version, about = "Edge-colored linear orders, their extension functor and limit")]
struct Cli {
    /// Output whitespace layout; the token stream is the same either way.
    #[arg(long, value_enum, global = true, default_value_t = Format::Compact)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Compact,
    Pretty,
}

#[derive(Subcommand)]
enum Command {
    /// Check every structure in a file for level violations and monochromatic triangles.
    Validate { file: PathBuf },
    /// Amalgamate two structures over a shared one.
    Amalgamate(AmalgamateArgs),
    /// List the one-point types over a structure.
    Types {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        level: u32,
        #[arg(long)]
        budget: u64,
    },
    /// Apply the extension functor once.
    KApply {
        file: PathBuf,
        #[arg(long)]
        budget: u64,
    },
    /// Apply the extension functor repeatedly, one budget per stage.
    KIterate {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        budgets: Vec<u64>,
    },
    /// Grow an approximation of the limit.
    LimitBuild {
        #[arg(long)]
        steps: usize,
        /// Largest budget the schedule will reach.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        seed_file: Option<PathBuf>,
    },
    /// Extend a partial isomorphism of an approximation by one point.
    LimitExtendIso {
        /// Approximation, optionally with its ledger.
        #[arg(long)]
        structure: PathBuf,
        /// `pair <id> <id>` lines.
        #[arg(long)]
        iso: PathBuf,
        #[arg(long)]
        point: String,
        /// Add the point to the range instead of the domain.
        #[arg(long)]
        back: bool,
    },
    /// Embed a structure into an approximation, growing it as needed.
    Embed {
        file: PathBuf,
        /// Approximation to embed into; empty when omitted.
        #[arg(long)]
        into: Option<PathBuf>,
    },
    /// Run the refutation procedure against a strategy.
    Refute(RefuteArgs),
    /// Re-verify a certificate.
    CheckCert {
        file: PathBuf,
        /// Strategy to replay against; defaults to the one named in the certificate.
        #[arg(long)]
        strategy: Option<String>,
    },
    /// Sample the equivariant strategy on pure linear orders.
    ControlLo {
        #[arg(long)]
        size: usize,
        #[arg(long)]
        cut: usize,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct AmalgamateArgs {
    #[arg(long)]
    left: PathBuf,
    #[arg(long)]
    right: PathBuf,
    #[arg(long)]
    over: PathBuf,
    /// Embedding of the shared structure into the left one; by point names when omitted.
    #[arg(long)]
    left_map: Option<PathBuf>,
    #[arg(long)]
    right_map: Option<PathBuf>,
}

#[derive(Args)]
struct RefuteArgs {
    #[arg(long)]
    base: PathBuf,
    /// Type in text form, e.g. `type supp=a cut=1 colors=b:0:1 level=0`.
    #[arg(long = "type")]
    target: String,
    /// Bundled strategy name or `program:<command>`.
    #[arg(long)]
    strategy: String,
    #[arg(long, default_value_t = 3)]
    depth: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Malformed(anyhow::Error),
    Negative,
}

type Outcome = Result<String, (String, Failure)>;

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn structure_file(path: &Path) -> anyhow::Result<FinStruct> {
    parse_structure(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

/// Embedding of `src` into `tgt` sending each point to the point of the same name.
fn by_names(src: &FinStruct, tgt: &FinStruct) -> anyhow::Result<Embedding> {
    src.points()
        .iter()
        .map(|p| {
            tgt.position(p)
                .ok_or_else(|| anyhow!("`{p}` missing from `{}`", tgt.name()))
        })
        .collect::<anyhow::Result<Vec<_>>>()
        .map(Embedding::new)
}

fn run(cli: Cli) -> Outcome {
    let layout = match cli.format {
        Format::Compact => Layout::Compact,
        Format::Pretty => Layout::Pretty,
    };
    let mut w = Writer::new(layout);
    let negative = |w: Writer| Err((w.finish(), Failure::Negative));
    let malformed = |e: anyhow::Error| (String::new(), Failure::Malformed(e));

    match cli.command {
        Command::Validate { file } => {
            let text = read(&file).map_err(malformed)?;
            let all = parse_structures(&text)
                .with_context(|| format!("parsing {}", file.display()))
                .map_err(malformed)?;
            let mut ok = true;
            for s in &all {
                let line = match validate(s) {
                    Validity::Valid => format!("valid {}", s.name()),
                    Validity::ColorAboveLevel(i, j) => {
                        format!("invalid {} level {} {}", s.name(), s.point(i), s.point(j))
                    }
                    Validity::Monochromatic(i, j, k) => format!(
                        "invalid {} monochromatic {} {} {} {}",
                        s.name(),
                        s.point(i),
                        s.point(j),
                        s.point(k),
                        s.color(i, j)
                    ),
                };
                ok &= line.starts_with("valid");
                w.item(line);
            }
            if !ok {
                return negative(w);
            }
        }
        Command::Amalgamate(a) => {
            let left = structure_file(&a.left).map_err(malformed)?;
            let right = structure_file(&a.right).map_err(malformed)?;
            let over = structure_file(&a.over).map_err(malformed)?;
            let map = |path: &Option<PathBuf>, tgt: &FinStruct| -> anyhow::Result<Embedding> {
                match path {
                    Some(p) => Ok(parse_embedding(&read(p)?, &over, tgt)?),
                    None => by_names(&over, tgt),
                }
            };
            let el = map(&a.left_map, &left).map_err(malformed)?;
            let er = map(&a.right_map, &right).map_err(malformed)?;
            match amalgamate(&left, &right, &over, &el, &er) {
                Ok(am) => {
                    write_structure(&mut w, &am.structure);
                    write_embedding(&mut w, "left", &left, &am.structure, &am.left);
                    write_embedding(&mut w, "right", &right, &am.structure, &am.right);
                }
                Err(e) => {
                    w.item(format!("error {e}"));
                    return negative(w);
                }
            }
        }
        Command::Types {
            file,
            level,
            budget,
        } => {
            let x = structure_file(&file).map_err(malformed)?;
            if !validate(&x).is_valid() {
                w.item(format!("invalid {}", x.name()));
                return negative(w);
            }
            let types = enumerate_types(&x, level, budget);
            w.header(format!(
                "types {} level {level} budget {budget} count {}",
                x.name(),
                types.len()
            ));
            for t in &types {
                w.item(t.to_text(&x));
            }
            w.end_block();
        }
        Command::KApply { file, budget } => {
            let x = structure_file(&file).map_err(malformed)?;
            match apply_k(&x, budget) {
                Ok(k) => k.write(&mut w),
                Err(e) => {
                    w.item(format!("error {e}"));
                    return negative(w);
                }
            }
        }
        Command::KIterate { file, budgets } => {
            let x = structure_file(&file).map_err(malformed)?;
            match iterate_k(&x, budgets.len(), &budgets) {
                Ok(chain) => {
                    for k in &chain {
                        k.write(&mut w);
                    }
                }
                Err(e) => {
                    w.item(format!("error {e}"));
                    return negative(w);
                }
            }
        }
        Command::LimitBuild {
            steps,
            budget,
            seed_file,
        } => {
            let seed = match seed_file {
                Some(p) => structure_file(&p).map_err(malformed)?,
                None => FinStruct::empty("approx", 0),
            };
            let mut approx = match Approximation::with_schedule(seed, Schedule::new(budget)) {
                Ok(a) => a,
                Err(e) => {
                    w.item(format!("error {e}"));
                    return negative(w);
                }
            };
            approx
                .grow(steps)
                .map_err(|e| malformed(anyhow!(e)))?;
            approx.write(&mut w);
        }
        Command::LimitExtendIso {
            structure,
            iso,
            point,
            back,
        } => {
            let text = read(&structure).map_err(malformed)?;
            let s = parse_structure(&text).map_err(|e| malformed(e.into()))?;
            let mut approx = Approximation::from_parts(s, parse_created(&text), None)
                .map_err(|e| malformed(anyhow!("{}: {e}", structure.display())))?;
            let p = PartialIso::parse(&read(&iso).map_err(malformed)?)
                .map_err(|e| malformed(e.into()))?;
            let extended = if back {
                approx.extend_partial_iso_back(&p, &point)
            } else {
                approx.extend_partial_iso(&p, &point)
            };
            match extended {
                Ok(q) => {
                    approx.write(&mut w);
                    w.header("iso");
                    for line in q.to_lines() {
                        w.item(line);
                    }
                    w.end_block();
                }
                Err(e) => {
                    w.item(format!("error {e}"));
                    return negative(w);
                }
            }
        }
        Command::Embed { file, into } => {
            let s = structure_file(&file).map_err(malformed)?;
            let mut approx = match into {
                Some(p) => {
                    let text = read(&p).map_err(malformed)?;
                    let a = parse_structure(&text).map_err(|e| malformed(e.into()))?;
                    Approximation::from_parts(a, parse_created(&text), None)
                        .map_err(|e| malformed(anyhow!("{}: {e}", p.display())))?
                }
                None => Approximation::new(),
            };
            match approx.embed(&s) {
                Ok(e) => {
                    approx.write(&mut w);
                    write_embedding(&mut w, "embed", &s, approx.current(), &e);
                }
                Err(e) => {
                    w.item(format!("error {e}"));
                    return negative(w);
                }
            }
        }
        Command::Refute(r) => {
            let x = structure_file(&r.base).map_err(malformed)?;
            let tau = OnePointType::parse(&r.target, &x).map_err(|e| malformed(e.into()))?;
            let mut strategy = strategy_by_name(&r.strategy).map_err(|e| malformed(e.into()))?;
            let cert = refute(&x, &tau, strategy.as_mut(), r.depth).map_err(|e| malformed(e.into()))?;
            let mut cw = Writer::new(layout);
            write_certificate(&mut cw, &cert);
            let text = cw.finish();
            match r.out {
                Some(path) => {
                    fs::write(&path, text)
                        .with_context(|| format!("writing {}", path.display()))
                        .map_err(malformed)?;
                    w.item(format!("verdict {}", cert.verdict.kind()));
                }
                None => return Ok(text),
            }
        }
        Command::CheckCert { file, strategy } => {
            let cert = parse_certificate(&read(&file).map_err(malformed)?)
                .with_context(|| format!("parsing {}", file.display()))
                .map_err(malformed)?;
            let name = strategy.unwrap_or_else(|| cert.strategy.clone());
            let mut s = strategy_by_name(&name).map_err(|e| malformed(e.into()))?;
            match check_certificate(&cert, s.as_mut()) {
                Ok(()) => w.item(format!("accepted {}", cert.verdict.kind())),
                Err(reason) => {
                    w.item(format!("rejected {reason}"));
                    return negative(w);
                }
            }
        }
        Command::ControlLo {
            size,
            cut,
            depth,
            samples,
            seed,
        } => {
            if cut > size {
                return Err(malformed(anyhow!("cut {cut} exceeds size {size}")));
            }
            let report = control_lo(size, cut, depth, samples, seed);
            let mut lines = report.to_lines().into_iter();
            w.header(lines.next().expect("header line"));
            for line in lines {
                w.item(line);
            }
            w.end_block();
            if report.violations > 0 {
                return negative(w);
            }
        }
    }
    Ok(w.finish())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err((out, Failure::Negative)) => {
            print!("{out}");
            ExitCode::from(2)
        }
        Err((_, Failure::Malformed(e))) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
