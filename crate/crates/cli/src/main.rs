use clap::{Parser, Subcommand};
use qha_cli::report::{render_reports, Cell, Format, ResultTable};
use qha_cli::verify::{count_config, run_suite, SuiteConfig};
use qha_core::gkm::{
    associative_dims, bps_character, km_root_mult, lie_dims, pbw_character, GkmConfig, GkmDatum,
    GradedDims,
};
use qha_core::quiver::hbar;
use qha_core::repcount::{default_sample_fields, kac_polynomial_cached, CountCache, CountConfig};
use qha_core::shuffle::{
    expand, shuffle_comul, shuffle_mul, shuffle_mul_allowing_asymmetric, LocalizedElement,
    ShuffleElement,
};
use qha_core::{
    parse_poly, positive_roots, DimVector, Error, FiniteField, Quiver, QuiverDocument, Result,
    Var, Weighting,
};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

fn parse_format(s: &str) -> std::result::Result<Format, String> {
    s.parse()
}

/// Exact computations for quiver root systems, finite-field count
/// polynomials, the symbolic shuffle algebra, and graded Lie algebras.
#[derive(Parser)]
#[command(name = "qha", version, disable_help_subcommand = true)]
struct Cli {
    /// Output format: pretty, csv, or json.
    #[arg(long, global = true, default_value = "pretty", value_parser = parse_format)]
    format: Format,
    /// Worker threads, 0 = machine parallelism (falls back to QHA_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Count cache file (falls back to QHA_CACHE, then ~/.qha/counts.jsonl).
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the positive roots inside a coordinate box.
    Roots {
        /// Quiver description file (JSON).
        #[arg(long)]
        quiver: PathBuf,
        /// Box bound, comma-separated: --bound 2,2.
        #[arg(long)]
        bound: String,
    },
    /// Count polynomials at the given dimension vectors.
    Kac {
        /// Quiver description file (JSON).
        #[arg(long)]
        quiver: PathBuf,
        /// Dimension vector, repeatable: --dim 1,1 --dim 2,1.
        #[arg(long = "dim", required = true)]
        dims: Vec<String>,
        /// Sample primes, comma-separated (default: chosen from the degree bound).
        #[arg(long)]
        primes: Option<String>,
    },
    /// Shuffle-algebra products, coproducts, and expansions.
    Shuffle {
        #[command(subcommand)]
        op: ShuffleOp,
    },
    /// Graded dimensions of generators-and-relations algebras.
    Gkm {
        #[command(subcommand)]
        op: GkmOp,
    },
    /// Run a verification suite and report per-check outcomes.
    Verify {
        /// One of: kac, shuffle, bialgebra, multprop, constexp, gkm, hausel,
        /// ade, pbw, all.
        suite: String,
    },
}

#[derive(Subcommand)]
enum ShuffleOp {
    /// Product of two elements given as polynomial expressions.
    Mul {
        lhs: String,
        rhs: String,
        /// Quiver description file (JSON, may carry arrow weights).
        #[arg(long)]
        quiver: PathBuf,
        /// Degrees of the two factors: --dim a --dim b.
        #[arg(long = "dim")]
        dims: Vec<String>,
        /// Skip the reversal-closure gate on the weighting.
        #[arg(long)]
        allow_asymmetric: bool,
    },
    /// Coproduct of an element at a split of its degree.
    Comul {
        elem: String,
        #[arg(long)]
        quiver: PathBuf,
        /// Degree of the element.
        #[arg(long)]
        dim: String,
        /// The two legs of the split: --split d1 --split d2.
        #[arg(long = "split")]
        splits: Vec<String>,
    },
    /// Laurent expansion of a localized element in one variable.
    Expand {
        #[arg(long)]
        quiver: PathBuf,
        /// Numerator polynomial.
        #[arg(long)]
        num: String,
        /// Denominator factor, repeatable.
        #[arg(long = "den")]
        dens: Vec<String>,
        /// Bidegree of the element: --dim d1 --dim d2.
        #[arg(long = "dim")]
        dims: Vec<String>,
        /// Expansion variable, e.g. x[2,1,1].
        #[arg(long)]
        var: String,
        /// Largest inverse power kept.
        #[arg(long, default_value_t = 0)]
        order: i64,
    },
    /// Coefficient of the first inverse power of the expansion variable.
    Residue {
        #[arg(long)]
        quiver: PathBuf,
        #[arg(long)]
        num: String,
        #[arg(long = "den")]
        dens: Vec<String>,
        #[arg(long = "dim")]
        dims: Vec<String>,
        #[arg(long)]
        var: String,
        /// Truncation order of the underlying expansion (at least 1).
        #[arg(long, default_value_t = 1)]
        order: i64,
    },
}

#[derive(Subcommand)]
enum GkmOp {
    /// Graded dimensions of the word algebra modulo its defining relations.
    Dims {
        /// Quiver file, or a datum file carrying a "generators" list.
        #[arg(long)]
        quiver: PathBuf,
        /// Degree box bound: --cutoff 2,2.
        #[arg(long)]
        cutoff: String,
    },
    /// Graded dimensions of the bracket layer inside the word algebra.
    LieDims {
        #[arg(long)]
        quiver: PathBuf,
        #[arg(long)]
        cutoff: String,
    },
    /// Multiplicity of one degree in the algebra on one generator per vertex.
    RootMult {
        #[arg(long)]
        quiver: PathBuf,
        #[arg(long)]
        dim: String,
        /// Degree box for the computation (default: the dimension itself).
        #[arg(long)]
        cutoff: Option<String>,
    },
    /// Character of a count polynomial in half-integer powers of q.
    BpsChar {
        #[arg(long)]
        quiver: PathBuf,
        #[arg(long)]
        dim: String,
        /// Sample primes, comma-separated (default: chosen from the degree bound).
        #[arg(long)]
        primes: Option<String>,
    },
    /// Symmetric-algebra character built from count polynomials on a box.
    PbwChar {
        #[arg(long)]
        quiver: PathBuf,
        #[arg(long)]
        cutoff: String,
        /// Tail truncation: how many extra character layers per generator.
        #[arg(long, default_value_t = 1)]
        u: u32,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 0 success, 1 failed check or computation, 2 usage or input parsing, 3
/// refused resource limits.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::ResourceLimit { .. } => 3,
        Error::Parse { .. }
        | Error::Json(_)
        | Error::Io(_)
        | Error::InvalidQuiver(_)
        | Error::InvalidWeighting(_)
        | Error::InvalidDatum(_)
        | Error::DegreeMismatch(_)
        | Error::NotSymmetric(_)
        | Error::InsufficientOrder { .. }
        | Error::VarAbsentFromFactor { .. } => 2,
        _ => 1,
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Parse {
        pos: 0,
        msg: msg.into(),
    }
}

fn resolve_threads(cli: &Cli) -> Result<usize> {
    if let Some(t) = cli.threads {
        return Ok(t);
    }
    match std::env::var("QHA_THREADS") {
        Ok(s) => s
            .parse()
            .map_err(|_| usage(format!("QHA_THREADS is not a thread count: {s:?}"))),
        Err(_) => Ok(0),
    }
}

fn resolve_cache(cli: &Cli) -> PathBuf {
    if let Some(p) = &cli.cache {
        return p.clone();
    }
    if let Ok(p) = std::env::var("QHA_CACHE") {
        return PathBuf::from(p);
    }
    let home = std::env::var("HOME").unwrap_or_else(|_| ".".into());
    Path::new(&home).join(".qha").join("counts.jsonl")
}

fn load_quiver(path: &Path) -> Result<(Quiver, Option<Weighting>)> {
    QuiverDocument::parse(&std::fs::read_to_string(path)?)
}

/// A datum file is recognized by its "generators" key; a plain quiver file
/// gets the one-generator-per-vertex datum.
fn load_datum(path: &Path) -> Result<GkmDatum> {
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    if value.get("generators").is_some() {
        GkmDatum::from_value(&value)
    } else {
        let (q, _) = QuiverDocument::parse(&text)?;
        GkmDatum::simple_generators(&q)
    }
}

fn parse_dim(s: &str) -> Result<DimVector> {
    DimVector::parse(s)
}

fn parse_primes(s: &str) -> Result<Vec<FiniteField>> {
    s.split(',')
        .map(|p| {
            let p: u64 = p
                .trim()
                .parse()
                .map_err(|_| usage(format!("bad prime {p:?}")))?;
            FiniteField::prime(p)
        })
        .collect()
}

/// Print a one-value result: bare for pretty output, a one-row table
/// otherwise.
fn emit_value(format: Format, column: &str, value: &str) {
    match format {
        Format::Pretty => println!("{value}"),
        _ => {
            let mut t = ResultTable::new(&[column]);
            t.push(vec![Cell::text(value)]);
            print!("{}", t.render(format));
        }
    }
}

fn dims_table(dims: &GradedDims) -> ResultTable {
    let mut t = ResultTable::new(&["degree", "coh-degree", "dim"]);
    for (d, coh, dim) in dims.iter() {
        t.push(vec![
            Cell::text(d.to_string()),
            Cell::Int(coh.into()),
            Cell::Int(dim.into()),
        ]);
    }
    t
}

fn run(cli: Cli) -> Result<ExitCode> {
    let format = cli.format;
    let threads = resolve_threads(&cli)?;
    let cache_path = resolve_cache(&cli);
    let count_cfg = count_config(threads);

    match &cli.command {
        Command::Roots { quiver, bound } => {
            let (q, _) = load_quiver(quiver)?;
            let bound = parse_dim(bound)?;
            let roots = positive_roots(&q, &bound)?;
            let mut t = ResultTable::new(&["root", "class", "primitive", "(d,d)"]);
            for (d, info) in roots.iter() {
                t.push(vec![
                    Cell::text(d.to_string()),
                    Cell::text(info.class.label()),
                    Cell::text(if info.primitive { "yes" } else { "no" }),
                    Cell::Int(q.sym_form(d, d)?.into()),
                ]);
            }
            print!("{}", t.render(format));
            Ok(ExitCode::SUCCESS)
        }
        Command::Kac {
            quiver,
            dims,
            primes,
        } => {
            let (q, _) = load_quiver(quiver)?;
            let mut cache = CountCache::open(&cache_path)?;
            let mut t = ResultTable::new(&["dim", "count-polynomial"]);
            for dim in dims {
                let d = parse_dim(dim)?;
                let fields = match primes {
                    Some(p) => parse_primes(p)?,
                    None => default_sample_fields(&q, &d, &count_cfg)?,
                };
                let kac = kac_polynomial_cached(&q, &d, &fields, &count_cfg, &mut cache)?;
                t.push(vec![Cell::text(d.to_string()), Cell::text(kac.to_string())]);
            }
            match format {
                Format::Pretty if t.len() == 1 => {
                    // Single query: print the polynomial itself.
                    if let Cell::Text(s) = &t.rows()[0][1] {
                        println!("{s}");
                    }
                }
                _ => print!("{}", t.render(format)),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Shuffle { op } => run_shuffle(op, format),
        Command::Gkm { op } => run_gkm(op, format, &count_cfg, &cache_path),
        Command::Verify { suite } => {
            let cfg = SuiteConfig {
                threads,
                cache: Some(cache_path),
            };
            let reports = run_suite(suite, &cfg)?;
            print!("{}", render_reports(&reports, format));
            if reports.iter().all(|r| r.passed()) {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(1))
            }
        }
    }
}

fn element(
    q: &Quiver,
    hbar: Option<&[i64]>,
    degree: &DimVector,
    src: &str,
) -> Result<ShuffleElement> {
    degree.expect_len(q.num_vertices)?;
    ShuffleElement::new(degree.clone(), parse_poly(src, hbar)?)
}

fn run_shuffle(op: &ShuffleOp, format: Format) -> Result<ExitCode> {
    match op {
        ShuffleOp::Mul {
            lhs,
            rhs,
            quiver,
            dims,
            allow_asymmetric,
        } => {
            let (q, weights) = load_quiver(quiver)?;
            let wt = weights.unwrap_or_else(|| Weighting::zeros(q.arrows.len(), 1));
            let h = hbar(&q, &wt).ok();
            if dims.len() != 2 {
                return Err(usage("mul needs exactly two --dim degrees"));
            }
            let d1 = parse_dim(&dims[0])?;
            let d2 = parse_dim(&dims[1])?;
            let a = element(&q, h.as_deref(), &d1, lhs)?;
            let b = element(&q, h.as_deref(), &d2, rhs)?;
            let prod = if *allow_asymmetric {
                shuffle_mul_allowing_asymmetric(&q, &wt, &a, &b)?
            } else {
                shuffle_mul(&q, &wt, &a, &b)?
            };
            emit_value(format, "product", &prod.poly().to_string());
            Ok(ExitCode::SUCCESS)
        }
        ShuffleOp::Comul {
            elem,
            quiver,
            dim,
            splits,
        } => {
            let (q, weights) = load_quiver(quiver)?;
            let wt = weights.unwrap_or_else(|| Weighting::zeros(q.arrows.len(), 1));
            let h = hbar(&q, &wt).ok();
            if splits.len() != 2 {
                return Err(usage("comul needs exactly two --split legs"));
            }
            let d = parse_dim(dim)?;
            let d1 = parse_dim(&splits[0])?;
            let d2 = parse_dim(&splits[1])?;
            let c = element(&q, h.as_deref(), &d, elem)?;
            let result = shuffle_comul(&q, &wt, &c, &d1, &d2)?;
            emit_value(format, "coproduct", &result.to_string());
            Ok(ExitCode::SUCCESS)
        }
        ShuffleOp::Expand {
            quiver,
            num,
            dens,
            dims,
            var,
            order,
        } => {
            let series = build_expansion(quiver, num, dens, dims, var, *order)?;
            let mut t = ResultTable::new(&["inverse-power", "coefficient"]);
            for (k, coeff) in series.terms() {
                t.push(vec![Cell::Int(k.into()), Cell::text(coeff.to_string())]);
            }
            match format {
                Format::Pretty => println!("{series}"),
                _ => print!("{}", t.render(format)),
            }
            Ok(ExitCode::SUCCESS)
        }
        ShuffleOp::Residue {
            quiver,
            num,
            dens,
            dims,
            var,
            order,
        } => {
            let series = build_expansion(quiver, num, dens, dims, var, *order)?;
            let residue = series.residue()?;
            emit_value(format, "residue", &residue.to_string());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn build_expansion(
    quiver: &Path,
    num: &str,
    dens: &[String],
    dims: &[String],
    var: &str,
    order: i64,
) -> Result<qha_core::LaurentSeries> {
    let (q, weights) = load_quiver(quiver)?;
    let wt = weights.unwrap_or_else(|| Weighting::zeros(q.arrows.len(), 1));
    let h = hbar(&q, &wt).ok();
    if dims.len() != 2 {
        return Err(usage("expansion needs a bidegree: --dim d1 --dim d2"));
    }
    let d1 = parse_dim(&dims[0])?;
    let d2 = parse_dim(&dims[1])?;
    d1.expect_len(q.num_vertices)?;
    d2.expect_len(q.num_vertices)?;
    let numerator = parse_poly(num, h.as_deref())?;
    let denominator: Vec<_> = dens
        .iter()
        .map(|f| parse_poly(f, h.as_deref()))
        .collect::<Result<_>>()?;
    let e = LocalizedElement::new((d1, d2), numerator, denominator)?;
    let v = Var::parse_name(var)?;
    expand(&e, v, order)
}

fn run_gkm(
    op: &GkmOp,
    format: Format,
    count_cfg: &CountConfig,
    cache_path: &Path,
) -> Result<ExitCode> {
    let config = GkmConfig::default();
    match op {
        GkmOp::Dims { quiver, cutoff } => {
            let datum = load_datum(quiver)?;
            let cutoff = parse_dim(cutoff)?;
            let dims = associative_dims(&datum, &cutoff, &config)?;
            print!("{}", dims_table(&dims).render(format));
            Ok(ExitCode::SUCCESS)
        }
        GkmOp::LieDims { quiver, cutoff } => {
            let datum = load_datum(quiver)?;
            let cutoff = parse_dim(cutoff)?;
            let dims = lie_dims(&datum, &cutoff, &config)?;
            print!("{}", dims_table(&dims).render(format));
            Ok(ExitCode::SUCCESS)
        }
        GkmOp::RootMult {
            quiver,
            dim,
            cutoff,
        } => {
            let (q, _) = load_quiver(quiver)?;
            let d = parse_dim(dim)?;
            let cutoff = match cutoff {
                Some(c) => parse_dim(c)?,
                None => d.clone(),
            };
            let mult = km_root_mult(&q, &d, &cutoff, &config)?;
            emit_value(format, "multiplicity", &mult.to_string());
            Ok(ExitCode::SUCCESS)
        }
        GkmOp::BpsChar {
            quiver,
            dim,
            primes,
        } => {
            let (q, _) = load_quiver(quiver)?;
            let d = parse_dim(dim)?;
            let fields = match primes {
                Some(p) => parse_primes(p)?,
                None => default_sample_fields(&q, &d, count_cfg)?,
            };
            let mut cache = CountCache::open(cache_path)?;
            let kac = kac_polynomial_cached(&q, &d, &fields, count_cfg, &mut cache)?;
            let character = bps_character(&q, &d, &kac)?;
            emit_value(format, "character", &character.to_string());
            Ok(ExitCode::SUCCESS)
        }
        GkmOp::PbwChar { quiver, cutoff, u } => {
            let (q, _) = load_quiver(quiver)?;
            let cutoff = parse_dim(cutoff)?;
            cutoff.expect_len(q.num_vertices)?;
            let mut cache = CountCache::open(cache_path)?;
            let mut family = BTreeMap::new();
            for d in DimVector::boxed_nonzero(&cutoff) {
                let fields = default_sample_fields(&q, &d, count_cfg)?;
                let kac = kac_polynomial_cached(&q, &d, &fields, count_cfg, &mut cache)?;
                family.insert(d, kac);
            }
            let characters = pbw_character(&q, &family, &cutoff, *u)?;
            let mut t = ResultTable::new(&["degree", "character"]);
            for (d, c) in &characters {
                t.push(vec![Cell::text(d.to_string()), Cell::text(c.to_string())]);
            }
            print!("{}", t.render(format));
            Ok(ExitCode::SUCCESS)
        }
    }
}
