//! Single-binary CLI. Machine-readable JSON goes to stdout, diagnostics to
//! stderr. Exit codes: 0 success/true verdict, 1 checked-false verdict,
//! 2 precondition or usage error, 3 budget refusal.

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use phi_sidon::bounds::{density_check, refute_bounded, thm1_bound_holds, WindowCertificate};
use phi_sidon::constructor::{construct_bounded, construct_poly};
use phi_sidon::error::Error;
use phi_sidon::linear_form::{LinearForm, DEFAULT_ARITY_CEILING};
use phi_sidon::sequence::{trace_to_csv, trace_to_json, write_output, IntSequence};
use phi_sidon::sidon::{is_sidon, FiniteSet, DEFAULT_VALUE_BUDGET};

const BUDGET_ENV: &str = "PHI_SIDON_BUDGET";
const MAX_ARITY_ENV: &str = "PHI_SIDON_MAX_ARITY";

#[derive(Parser)]
#[command(
    name = "phi-sidon",
    version,
    about = "Construct and verify Sidon sets for integer linear forms",
    after_help = "Budgets may also be set via the environment: \
                  PHI_SIDON_BUDGET and PHI_SIDON_MAX_ARITY. Flags take precedence."
)]
struct Cli {
    /// Worker threads; 0 means all available. Output is identical for any value.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Pretty-print JSON output.
    #[arg(long, global = true)]
    pretty: bool,

    /// Max values a single enumeration may visit [default: 100000000]
    #[arg(long, global = true)]
    budget: Option<u128>,

    /// Arity ceiling for exhaustive property-N checks [default: 20]
    #[arg(long, global = true)]
    max_arity: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Poly,
    Bounded,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Decide property N for a linear form.
    CheckForm {
        /// Comma-separated integer coefficients, e.g. 1,-2,4
        #[arg(long)]
        form: String,
    },
    /// Brute-force Sidon verification of a finite set.
    Verify {
        #[arg(long)]
        form: String,
        /// The set: `list:<csv>`, `file:<path>`, or a bare csv list
        #[arg(long)]
        set: String,
        /// Prefix length when the set spec is a generator
        #[arg(long)]
        terms: Option<usize>,
    },
    /// Greedy perturbation construction (polynomial or bounded mode).
    Construct {
        #[arg(long)]
        form: String,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Sequence spec, e.g. squares, primes, geom:2,5, list:..., file:...
        #[arg(long)]
        sequence: String,
        /// Number of terms to construct
        #[arg(long)]
        terms: usize,
        /// Growth allowance m (bounded mode) [default: 0]
        #[arg(long)]
        m: Option<BigInt>,
        /// Perturbation bound m0, integer or p/q (bounded mode) [default: max(m,1)]
        #[arg(long)]
        m0: Option<String>,
        /// Output destination; `-` is stdout [default: -]
        #[arg(long, default_value = "-")]
        out: String,
        /// Trace format [default: json]
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Search for a counting certificate refuting bounded perturbations.
    Refute {
        #[arg(long)]
        form: String,
        #[arg(long)]
        sequence: String,
        /// Asserted perturbation bound (positive integer)
        #[arg(long)]
        m0: BigInt,
        /// Largest window end index to try
        #[arg(long)]
        limit: usize,
    },
    /// Check the density hypothesis |b_t - b_s| <= (t-s+1)^(h-eps) on a prefix.
    Density {
        #[arg(long)]
        sequence: String,
        /// Arity h of the linear form the hypothesis refers to
        #[arg(long)]
        h: usize,
        /// Exact rational epsilon, written p/q or as an integer
        #[arg(long)]
        epsilon: String,
        #[arg(long)]
        terms: usize,
    },
    /// Verify 4^h n^(2h-1) + n < (n+1)^(4h) over a grid of h and n.
    BoundSweep {
        /// Largest arity to check [default: 6]
        #[arg(long, default_value_t = 6)]
        h_max: usize,
        /// Largest step index to check [default: 10000]
        #[arg(long, default_value_t = 10_000)]
        n_max: u64,
    },
}

#[derive(Serialize)]
struct WitnessJson {
    #[serde(rename = "I1")]
    i1: Vec<usize>,
    #[serde(rename = "I2")]
    i2: Vec<usize>,
    sum: String,
}

#[derive(Serialize)]
struct CheckFormOut {
    #[serde(rename = "property_N")]
    property_n: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<WitnessJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    zero_sum_subset: Option<Vec<usize>>,
    #[serde(rename = "C")]
    c: String,
    h: usize,
}

#[derive(Serialize)]
struct CollisionJson {
    tuple1: Vec<String>,
    tuple2: Vec<String>,
    value: String,
}

#[derive(Serialize)]
struct VerifyOut {
    sidon: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<CollisionJson>,
    distinct: usize,
    total: u128,
}

#[derive(Serialize)]
struct CertificateJson {
    s: u64,
    t: u64,
    lhs: String,
    rhs: String,
    m0: String,
}

#[derive(Serialize)]
struct RefuteOut {
    found: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<CertificateJson>,
}

#[derive(Serialize)]
struct DensityOut {
    pass: bool,
    epsilon: String,
    violations: Vec<(u64, u64)>,
}

#[derive(Serialize)]
struct SweepOut {
    all_hold: bool,
    h_max: usize,
    n_max: u64,
    checked: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    first_failure: Option<(usize, u64)>,
}

fn env_override<T: std::str::FromStr>(name: &str) -> Option<T> {
    std::env::var(name).ok().and_then(|v| v.parse().ok())
}

fn parse_rational(text: &str) -> Result<BigRational, Error> {
    let parse_int = |tok: &str| {
        tok.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("`{tok}` is not an integer")))
    };
    match text.split_once('/') {
        None => Ok(BigRational::from(parse_int(text)?)),
        Some((p, q)) => {
            let q = parse_int(q)?;
            if q == BigInt::from(0) {
                return Err(Error::Parse("rational denominator is zero".into()));
            }
            Ok(BigRational::new(parse_int(p)?, q))
        }
    }
}

/// Parses the `--set` argument: a sequence spec or a bare csv list, taken as
/// a finite set.
fn parse_set(spec: &str, terms: Option<usize>) -> Result<FiniteSet, Error> {
    let seq = if spec.contains(':') {
        IntSequence::parse(spec)?
    } else {
        IntSequence::parse(&format!("list:{spec}"))?
    };
    let count = match (terms, seq.len()) {
        (Some(k), _) => k,
        (None, Some(len)) => len,
        (None, None) => {
            return Err(Error::InvalidParameter(
                "generator set specs need --terms".into(),
            ))
        }
    };
    FiniteSet::new(seq.prefix(count)?)
}

fn emit<T: Serialize>(value: &T, pretty: bool) {
    let text = if pretty {
        serde_json::to_string_pretty(value).expect("serialization cannot fail")
    } else {
        serde_json::to_string(value).expect("serialization cannot fail")
    };
    println!("{text}");
}

fn certificate_json(c: &WindowCertificate) -> CertificateJson {
    CertificateJson {
        s: c.s,
        t: c.t,
        lhs: c.lhs.to_string(),
        rhs: c.rhs.to_string(),
        m0: c.m0.to_string(),
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    let budget = cli
        .budget
        .or_else(|| env_override(BUDGET_ENV))
        .unwrap_or(DEFAULT_VALUE_BUDGET);
    let max_arity = cli
        .max_arity
        .or_else(|| env_override(MAX_ARITY_ENV))
        .unwrap_or(DEFAULT_ARITY_CEILING);

    match cli.command {
        Command::CheckForm { form } => {
            let form = LinearForm::parse(&form)?;
            let result = form.property_n(max_arity)?;
            let out = CheckFormOut {
                property_n: result.holds(),
                witness: result.witness.as_ref().map(|w| WitnessJson {
                    i1: w.i1.positions(),
                    i2: w.i2.positions(),
                    sum: w.common_sum.to_string(),
                }),
                zero_sum_subset: result.zero_sum_subset.map(|s| s.positions()),
                c: form.norm().to_string(),
                h: form.arity(),
            };
            emit(&out, cli.pretty);
            Ok(if out.property_n { 0 } else { 1 })
        }
        Command::Verify { form, set, terms } => {
            let form = LinearForm::parse(&form)?;
            let a = parse_set(&set, terms)?;
            let total = (a.len() as u128).pow(form.arity() as u32);
            let verdict = is_sidon(&form, &a, budget)?;
            let img = phi_sidon::sidon::phi_image(&form, &a, budget)?;
            let out = VerifyOut {
                sidon: verdict.holds(),
                witness: verdict.witness().map(|w| CollisionJson {
                    tuple1: w.tuple1.iter().map(|x| x.to_string()).collect(),
                    tuple2: w.tuple2.iter().map(|x| x.to_string()).collect(),
                    value: w.value.to_string(),
                }),
                distinct: img.distinct,
                total,
            };
            emit(&out, cli.pretty);
            Ok(if out.sidon { 0 } else { 1 })
        }
        Command::Construct { form, mode, sequence, terms, m, m0, out, format } => {
            let form = LinearForm::parse(&form)?;
            let b = IntSequence::parse(&sequence)?.prefix(terms)?;
            let trace = match mode {
                Mode::Poly => construct_poly(&form, &b, budget)?,
                Mode::Bounded => {
                    let m = m.unwrap_or_else(|| BigInt::from(0));
                    let m0 = match m0 {
                        Some(text) => parse_rational(&text)?,
                        None => BigRational::from(m.clone().max(BigInt::one())),
                    };
                    construct_bounded(&form, &b, &m, &m0, budget)?
                }
            };
            let rendered = match format {
                Format::Json => {
                    let mut text = trace_to_json(&trace, cli.pretty);
                    text.push('\n');
                    text
                }
                Format::Csv => trace_to_csv(&trace),
            };
            write_output(&out, &rendered)?;
            Ok(0)
        }
        Command::Refute { form, sequence, m0, limit } => {
            let form = LinearForm::parse(&form)?;
            let b = IntSequence::parse(&sequence)?.prefix(limit)?;
            let cert = refute_bounded(&form, &b, &m0, limit)?;
            let out = RefuteOut {
                found: cert.is_some(),
                certificate: cert.as_ref().map(certificate_json),
            };
            emit(&out, cli.pretty);
            Ok(if out.found { 0 } else { 1 })
        }
        Command::Density { sequence, h, epsilon, terms } => {
            let epsilon = parse_rational(&epsilon)?;
            let b = IntSequence::parse(&sequence)?.prefix(terms)?;
            let check = density_check(&b, h, &epsilon, terms)?;
            let out = DensityOut {
                pass: check.passes(),
                epsilon: check.epsilon.to_string(),
                violations: check.violations,
            };
            emit(&out, cli.pretty);
            Ok(if out.pass { 0 } else { 1 })
        }
        Command::BoundSweep { h_max, n_max } => {
            if h_max == 0 || n_max == 0 {
                return Err(Error::InvalidParameter("h_max and n_max must be >= 1".into()));
            }
            let mut first_failure = None;
            let mut checked = 0u64;
            'outer: for h in 1..=h_max {
                for n in 1..=n_max {
                    checked += 1;
                    if !thm1_bound_holds(h, n) {
                        first_failure = Some((h, n));
                        break 'outer;
                    }
                }
            }
            let out = SweepOut {
                all_hold: first_failure.is_none(),
                h_max,
                n_max,
                checked,
                first_failure,
            };
            emit(&out, cli.pretty);
            Ok(if out.all_hold { 0 } else { 1 })
        }
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::BudgetExceeded { .. } | Error::ArityTooLarge { .. } => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        // Ignore the error if a pool already exists (e.g. under tests).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
