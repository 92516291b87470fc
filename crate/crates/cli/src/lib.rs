//! Command-line front end. [`run`] is the whole program minus process exit,
//! so it can be driven from tests.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use postnikov_core::classify::{classify_three_stage, classify_two_stage, GroupDegree};
use postnikov_core::em_cohomology::{
    degree_basis, monomial_label, operation_label, parse_class, BasisCache, Factor, Poly,
};
use postnikov_core::lifts::{compare, thom_moller};
use postnikov_core::serre_ss::{compute_pages, render_chart, FibrationSpec};
use postnikov_core::{adem_reduce, CohomologyClass, Error, SpaceDescriptor};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

/// Environment variable naming the basis cache directory.
pub const CACHE_ENV: &str = "POSTNIKOV_CACHE_DIR";
const CACHE_FILE: &str = "bases.json";

#[derive(Parser, Debug)]
#[command(name = "postnikov", version, about = "Mod 2 Postnikov pieces: cohomology, spectral sequences, classification")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Basis cache file; defaults to bases.json under $POSTNIKOV_CACHE_DIR when set.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reduce a composite of squares to admissible form.
    Adem {
        #[arg(required = true, num_args = 1..)]
        word: Vec<u32>,
    },
    /// Basis of H*(K((Z/2)^s, n)).
    EmBasis {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 1)]
        s: u32,
        #[arg(long)]
        deg: u32,
        #[arg(long)]
        max_deg: Option<u32>,
    },
    /// Basis of the cohomology of a product, e.g. K(1,2)xK(1,3).
    Kunneth {
        #[arg(long)]
        space: String,
        #[arg(long)]
        deg: u32,
        #[arg(long)]
        max_deg: Option<u32>,
    },
    /// Serre spectral sequence of a principal fibration.
    SerreSs {
        #[arg(long)]
        base: String,
        /// Fiber as `t,n` for K((Z/2)^t, n).
        #[arg(long, value_parser = parse_group)]
        fiber: GroupDegree,
        /// k-invariant component; repeat once per fiber summand. Defaults to zero.
        #[arg(long)]
        k: Vec<String>,
        #[arg(long)]
        max_deg: u32,
        #[arg(long)]
        chart: bool,
    },
    /// Homotopy of the space of lifts with an Eilenberg–Mac Lane fiber.
    Lifts {
        #[arg(long)]
        source: String,
        #[arg(long, value_parser = parse_group)]
        fiber: GroupDegree,
    },
    /// Two-stage classification.
    Classify2(TwoStageArgs),
    /// Three-stage classification.
    Classify3(ThreeStageArgs),
    /// Classical and global counts side by side.
    Compare(ThreeStageArgs),
}

#[derive(Args, Debug)]
struct TwoStageArgs {
    #[arg(long = "A", value_parser = parse_group)]
    a: GroupDegree,
    #[arg(long = "B", value_parser = parse_group)]
    b: GroupDegree,
    /// Also quotient by automorphisms of the base.
    #[arg(long)]
    pairs: bool,
}

#[derive(Args, Debug)]
struct ThreeStageArgs {
    #[arg(long = "A", value_parser = parse_group)]
    a: GroupDegree,
    #[arg(long = "B", value_parser = parse_group)]
    b: GroupDegree,
    #[arg(long = "C", value_parser = parse_group)]
    c: GroupDegree,
    #[arg(long)]
    pairs: bool,
}

fn parse_group(s: &str) -> Result<GroupDegree, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [rank, degree] => Ok(GroupDegree::new(
            rank.parse().map_err(|_| format!("bad rank '{rank}'"))?,
            degree.parse().map_err(|_| format!("bad degree '{degree}'"))?,
        )),
        _ => Err(format!("expected 'rank,degree', got '{s}'")),
    }
}

/// Serializes through `serde_json::Value`, whose maps are sorted, so output is canonical.
pub fn to_canonical_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    serde_json::to_string_pretty(&serde_json::to_value(value)?)
}

struct Outcome {
    text: String,
    json: serde_json::Value,
    code: i32,
}

impl Outcome {
    fn ok<T: Serialize>(text: String, value: &T) -> anyhow::Result<Self> {
        Ok(Self {
            text,
            json: serde_json::to_value(value)?,
            code: EXIT_OK,
        })
    }
}

fn exit_code_for(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<Error>() {
        Some(
            Error::InvalidParameters(_) | Error::Parse(_) | Error::DegreeMismatch { .. } | Error::MissingFactor(_),
        ) => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

/// Runs the program on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(outcome) => {
            let written = match cli.format {
                Format::Text => write!(out, "{}", outcome.text),
                Format::Json => serde_json::to_string_pretty(&outcome.json)
                    .map_err(std::io::Error::other)
                    .and_then(|s| writeln!(out, "{s}")),
            };
            match written {
                Ok(()) => outcome.code,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    EXIT_FAILURE
                }
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            exit_code_for(&e)
        }
    }
}

fn open_cache(cli: &Cli) -> anyhow::Result<Option<BasisCache>> {
    let path = match (&cli.cache, std::env::var_os(CACHE_ENV)) {
        (Some(p), _) => p.clone(),
        (None, Some(dir)) => PathBuf::from(dir).join(CACHE_FILE),
        (None, None) => return Ok(None),
    };
    Ok(Some(
        BasisCache::open(&path).with_context(|| format!("opening cache {}", path.display()))?,
    ))
}

fn space_arg(text: &str) -> Result<SpaceDescriptor, Error> {
    SpaceDescriptor::parse(text)
}

#[derive(Serialize)]
struct AdemOutput {
    word: Vec<u32>,
    degree: u32,
    admissible: Vec<String>,
}

#[derive(Serialize)]
struct DegreeBasisOutput {
    degree: u32,
    dim: usize,
    labels: Vec<String>,
    /// `Sq[I]i{n}` forms of basis elements that are a single operation on a fundamental class.
    equivalents: Vec<Option<String>>,
}

#[derive(Serialize)]
struct BasisOutput {
    space: String,
    degrees: Vec<DegreeBasisOutput>,
}

fn basis_output(
    cache: &mut Option<BasisCache>,
    space: &SpaceDescriptor,
    lo: u32,
    hi: u32,
) -> anyhow::Result<Outcome> {
    if hi < lo {
        return Err(Error::InvalidParameters(format!("--max-deg {hi} is below --deg {lo}")).into());
    }
    let mut degrees = Vec::new();
    for t in lo..=hi {
        let basis = degree_basis(space, t);
        let labels = match cache.as_mut() {
            Some(c) => c.labels(space, t),
            None => basis.monomials.iter().map(|m| monomial_label(space, m)).collect(),
        };
        let equivalents = basis
            .monomials
            .iter()
            .zip(&labels)
            .map(|(m, l)| operation_label(space, &Poly::from(m.clone())).filter(|op| op != l))
            .collect();
        degrees.push(DegreeBasisOutput {
            degree: t,
            dim: labels.len(),
            labels,
            equivalents,
        });
    }
    if let Some(c) = cache.as_mut() {
        c.save()?;
    }
    let mut text = String::new();
    for d in &degrees {
        let shown: Vec<String> = d
            .labels
            .iter()
            .zip(&d.equivalents)
            .map(|(l, e)| match e {
                Some(op) => format!("\"{op}-equivalent: {l}\""),
                None => format!("\"{l}\""),
            })
            .collect();
        text.push_str(&format!("H^{} [{}], dim {}\n", d.degree, shown.join(", "), d.dim));
    }
    Outcome::ok(
        text,
        &BasisOutput {
            space: space.to_string(),
            degrees,
        },
    )
}

#[derive(Serialize)]
struct SerreOutput {
    base: String,
    fiber: String,
    k: Vec<String>,
    max_degree: u32,
    survivors: Vec<postnikov_core::serre_ss::SurvivorReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    chart: Option<String>,
}

fn dispatch(cli: &Cli) -> anyhow::Result<Outcome> {
    let mut cache = open_cache(cli)?;
    match &cli.command {
        Command::Adem { word } => {
            let reduced = adem_reduce(word);
            let admissible: Vec<String> = reduced.terms.iter().map(|t| t.label()).collect();
            let text = if admissible.is_empty() {
                "0\n".to_string()
            } else {
                format!("{}\n", admissible.join(" + "))
            };
            Outcome::ok(
                text,
                &AdemOutput {
                    word: word.clone(),
                    degree: word.iter().sum(),
                    admissible,
                },
            )
        }
        Command::EmBasis { n, s, deg, max_deg } => {
            if *n == 0 || *s == 0 {
                return Err(Error::InvalidParameters("--n and --s must be positive".into()).into());
            }
            let space = SpaceDescriptor::new(vec![Factor::new(*s, *n)])?;
            basis_output(&mut cache, &space, *deg, max_deg.unwrap_or(*deg))
        }
        Command::Kunneth { space, deg, max_deg } => {
            let space = space_arg(space)?;
            basis_output(&mut cache, &space, *deg, max_deg.unwrap_or(*deg))
        }
        Command::SerreSs {
            base,
            fiber,
            k,
            max_deg,
            chart,
        } => {
            let base = space_arg(base)?;
            if fiber.rank == 0 || fiber.degree == 0 {
                return Err(Error::InvalidParameters("fiber needs positive rank and degree".into()).into());
            }
            let k_classes = if k.is_empty() {
                vec![CohomologyClass::zero(&base, fiber.degree + 1); fiber.rank as usize]
            } else {
                k.iter()
                    .map(|text| CohomologyClass::from_poly(&base, fiber.degree + 1, &parse_class(&base, text)?))
                    .collect::<Result<Vec<_>, Error>>()?
            };
            let spec = FibrationSpec::new(base.clone(), fiber.rank, fiber.degree, k_classes)?;
            let ss = compute_pages(&spec, *max_deg)?;
            let chart_text = chart.then(|| render_chart(&ss.pages));
            let mut text = String::new();
            if let Some(c) = &chart_text {
                text.push_str(c);
            }
            for r in &ss.survivors {
                text.push_str(&format!(
                    "degree {}: total {}, positive filtration {}\n",
                    r.degree, r.total_dim, r.positive_filtration_dim
                ));
                for c in &r.cells {
                    text.push_str(&format!("  ({},{}) dim {}: {}\n", c.p, c.q, c.dim, c.labels.join(", ")));
                }
            }
            Outcome::ok(
                text,
                &SerreOutput {
                    base: base.to_string(),
                    fiber: fiber.to_string(),
                    k: spec.k.iter().map(CohomologyClass::label).collect(),
                    max_degree: *max_deg,
                    survivors: ss.survivors,
                    chart: chart_text,
                },
            )
        }
        Command::Lifts { source, fiber } => {
            let x = space_arg(source)?;
            let h = thom_moller(&x, fiber.rank, fiber.degree)?;
            let mut text = format!("space of lifts over {} with fiber {}\n", h.source, fiber);
            for l in &h.levels {
                text.push_str(&format!("  pi_{}: dim {}\n", l.i, l.dim));
            }
            Outcome::ok(text, &h)
        }
        Command::Classify2(args) => {
            let report = classify_two_stage(args.a, args.b, args.pairs)?;
            let mut text = format!("{} classes, {} orbits\n", report.size, report.count());
            for o in &report.orbits {
                text.push_str(&format!("  {} (size {})\n", o.rep, o.size));
            }
            #[derive(Serialize)]
            struct Orbits<'a> {
                size: usize,
                fixed_points: usize,
                orbits: &'a [postnikov_core::classify::Orbit<String>],
            }
            Outcome::ok(
                text,
                &Orbits {
                    size: report.size,
                    fixed_points: report.fixed_points,
                    orbits: &report.orbits,
                },
            )
        }
        Command::Classify3(args) => {
            let report = classify_three_stage(args.a, args.b, args.c, args.pairs)?;
            let mut text = String::new();
            for b in &report.branches {
                text.push_str(&format!(
                    "k1 = {}: {} candidates, {} orbits{}\n",
                    b.k1,
                    b.candidates,
                    b.orbits,
                    match b.interval {
                        Some([lo, hi]) => format!(" (ambiguous, between {lo} and {hi})"),
                        None => String::new(),
                    }
                ));
            }
            text.push_str(&format!("total {}\n", report.total));
            Outcome::ok(text, &report)
        }
        Command::Compare(args) => {
            let report = compare(args.a, args.b, args.c, args.pairs)?;
            let mut text = format!("{:<24} {:>9} {:>9} {:>9}  equal\n", "k1", "classical", "global", "kunneth");
            for r in &report.rows {
                text.push_str(&format!(
                    "{:<24} {:>9} {:>9} {:>9}  {}\n",
                    r.k1,
                    r.classical,
                    r.global,
                    r.kunneth.map_or("-".to_string(), |k| k.to_string()),
                    r.equal
                ));
            }
            let mut outcome = Outcome::ok(text, &report)?;
            if !report.all_equal {
                outcome.code = EXIT_MISMATCH;
            }
            Ok(outcome)
        }
    }
}
