//! expcover: scan primes, run covering experiments, evaluate densities and
//! moment statistics for shifted exponential sequences a^n - b.

use std::fs::File;
use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use expcover::covering::{cover_sieve, ExponentDomain};
use expcover::density::global_density;
use expcover::galois::{classes_fixing_kr, conjugacy_classes, verify_disjointness};
use expcover::moments;
use expcover::primeset::{read_records_csv, stream_records, write_records_csv, Mode, Params};
use expcover::{Error, PrimeRecord};

const DEFAULT_PRIME_BOUND: u64 = 100_000;
const DEFAULT_EPS: f64 = 0.5;
const DEFAULT_BUDGET: u64 = 100_000;

#[derive(Parser)]
#[command(name = "expcover", version, about)]
struct Cli {
    /// Worker threads for scans and sieves (0 = available parallelism)
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// n ranges over all integers
    All,
    /// n ranges over primes (W-trick set S)
    Prime,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::All => Mode::AllExponents,
            ModeArg::Prime => Mode::PrimeExponents,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DomainArg {
    /// cover all integers n <= xlimit
    All,
    /// cover only prime n <= xlimit
    Primes,
}

#[derive(Clone, Copy, ValueEnum)]
enum StatArg {
    Mu,
    Ratio,
    Sigma,
    Bt,
    Phitail,
}

#[derive(Clone, Copy, ValueEnum)]
enum GaloisCheck {
    Classes,
    Fixing,
    Disjoint,
}

#[derive(Args)]
struct SequenceArgs {
    /// Base of the sequence a^n - b (a > 1)
    #[arg(long)]
    a: i64,
    /// Shift of the sequence a^n - b (nonzero)
    #[arg(long, allow_hyphen_values = true)]
    b: i64,
}

#[derive(Subcommand)]
enum Command {
    /// Scan primes and emit one CSV record per prime (p,ord,ell,in_S)
    Scan {
        #[command(flatten)]
        seq: SequenceArgs,
        /// Exponent mode
        #[arg(long, value_enum, default_value = "all")]
        mode: ModeArg,
        /// Smoothness cut for the W-trick (prime-exponent mode)
        #[arg(long, default_value_t = 0)]
        w: u64,
        /// Scan primes p < xmax
        #[arg(long)]
        xmax: u64,
        /// Output file (stdout when omitted)
        #[arg(long)]
        out: Option<String>,
    },
    /// Coverage of exponents by the scanned congruence classes
    Cover {
        /// Record CSV produced by scan
        #[arg(long)]
        records: String,
        /// Count coverage of n <= xlimit
        #[arg(long)]
        xlimit: u64,
        /// Use only records with p <= cutoff
        #[arg(long)]
        cutoff: u64,
        /// Exponent domain
        #[arg(long, value_enum, default_value = "all")]
        domain: DomainArg,
        /// JSON output file (stdout when omitted)
        #[arg(long)]
        json: Option<String>,
    },
    /// Analytic density of S_{m,d,r} with optional empirical comparison
    Density {
        #[command(flatten)]
        seq: SequenceArgs,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        d: u64,
        #[arg(long)]
        r: u64,
        /// Truncate the Euler product at this prime
        #[arg(long, default_value_t = DEFAULT_PRIME_BOUND)]
        prime_bound: u64,
        /// Also scan primes <= this bound for the empirical density
        #[arg(long)]
        empirical_x: Option<u64>,
    },
    /// Moment statistics over scanned records (CSV rows on stdout)
    Moments {
        /// Record CSV produced by scan (required for mu, ratio, sigma)
        #[arg(long)]
        records: Option<String>,
        /// Event-space size x (mu, ratio, sigma count primes p <= sqrt(x))
        #[arg(long)]
        x: Option<u64>,
        #[arg(long, value_enum)]
        stat: StatArg,
        /// Sequence base (bt, phitail)
        #[arg(long)]
        a: Option<i64>,
        /// Sequence shift (bt, phitail)
        #[arg(long, allow_hyphen_values = true)]
        b: Option<i64>,
        #[arg(long)]
        m: Option<u64>,
        #[arg(long)]
        d: Option<u64>,
        #[arg(long)]
        mprime: Option<u64>,
        #[arg(long)]
        y: Option<u64>,
        /// Exponent in the conjectured bound shape
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
        #[arg(long)]
        k: Option<u64>,
        #[arg(long)]
        w: Option<u64>,
        #[arg(long)]
        lambda: Option<f64>,
    },
    /// Conjugacy-class computations in the triple group
    Galois {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        mprime: u64,
        /// Residue r for the fixing check
        #[arg(long, default_value_t = 0)]
        r: u64,
        #[arg(long, value_enum)]
        check: GaloisCheck,
    },
    /// Construct a counterexample pair (a, b) for the given prime
    Construct {
        #[arg(long)]
        p: u64,
        /// Search budget
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Emit the default parameter values as JSON
    #[command(hide = true)]
    Defaults,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            if let Some(io) = err.downcast_ref::<io::Error>() {
                if io.kind() == io::ErrorKind::BrokenPipe {
                    return ExitCode::SUCCESS;
                }
            }
            eprintln!("error: {err}");
            match err.downcast_ref::<Error>() {
                Some(Error::Precondition(_) | Error::Budget(_) | Error::Record(_)) => {
                    ExitCode::from(2)
                }
                _ => ExitCode::from(1),
            }
        }
    }
}

fn out_writer(path: &Option<String>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn load_records(path: &str) -> anyhow::Result<Vec<PrimeRecord>> {
    let mut buf = Vec::new();
    File::open(path)?.read_to_end(&mut buf)?;
    Ok(read_records_csv(&buf[..])?)
}

fn need<T: Copy>(v: Option<T>, flag: &str, stat: &str) -> anyhow::Result<T> {
    v.ok_or_else(|| Error::pre(format!("--{flag} is required for --stat {stat}")).into())
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Scan {
            seq,
            mode,
            w,
            xmax,
            out,
        } => {
            let params = Params::new(seq.a, seq.b, mode.into(), w)?;
            let records = stream_records(&params, 0, xmax)?;
            write_records_csv(&records, out_writer(&out)?)?;
        }
        Command::Cover {
            records,
            xlimit,
            cutoff,
            domain,
            json,
        } => {
            let all = load_records(&records)?;
            let subset: Vec<PrimeRecord> = all
                .into_iter()
                .filter(|r| r.in_s && r.p <= cutoff)
                .collect();
            let domain = match domain {
                DomainArg::All => ExponentDomain::AllIntegers,
                DomainArg::Primes => ExponentDomain::PrimesOnly,
            };
            let report = cover_sieve(&subset, xlimit, cutoff, domain)?;
            let mut w = out_writer(&json)?;
            writeln!(w, "{}", report.to_json())?;
        }
        Command::Density {
            seq,
            m,
            d,
            r,
            prime_bound,
            empirical_x,
        } => {
            let params = Params::new(seq.a, seq.b, Mode::AllExponents, 0)?;
            let mut est = global_density(m, d, r, &params, prime_bound)?;
            if let Some(x) = empirical_x {
                let (emp, _, _) = expcover::density::empirical_mdr_density(&params, m, d, r, x)?;
                est.empirical = Some(emp);
                est.sample_x = Some(x);
            }
            println!("{}", serde_json::to_string(&est)?);
        }
        Command::Moments {
            records,
            x,
            stat,
            a,
            b,
            m,
            d,
            mprime,
            y,
            eps,
            k,
            w,
            lambda,
        } => {
            let mut rows: Vec<(String, String, f64)> = Vec::new();
            match stat {
                StatArg::Mu => {
                    let recs = load_records(need(records.as_deref(), "records", "mu")?)?;
                    let x = need(x, "x", "mu")?;
                    rows.push(("mu".into(), format!("x={x}"), moments::mu_sum(&recs, x)));
                }
                StatArg::Ratio => {
                    let recs =
                        load_records(need(records.as_deref(), "records", "ratio")?)?;
                    let x = need(x, "x", "ratio")?;
                    rows.push((
                        "ratio".into(),
                        format!("x={x}"),
                        moments::second_moment_ratio(&recs, x)?,
                    ));
                }
                StatArg::Sigma => {
                    let recs =
                        load_records(need(records.as_deref(), "records", "sigma")?)?;
                    let x = need(x, "x", "sigma")?;
                    let m = need(m, "m", "sigma")?;
                    let d = need(d, "d", "sigma")?;
                    if m == 0 || d == 0 {
                        return Err(Error::pre("--m and --d must be positive").into());
                    }
                    let mut total = 0.0;
                    for r in 0..m {
                        let v = moments::sigma_mdr(&recs, m, d, r, x);
                        total += v;
                        rows.push(("sigma".into(), format!("m={m};d={d};r={r};x={x}"), v));
                    }
                    rows.push(("sigma_total".into(), format!("m={m};d={d};x={x}"), total));
                }
                StatArg::Bt => {
                    let params = Params::new(
                        need(a, "a", "bt")?,
                        need(b, "b", "bt")?,
                        Mode::AllExponents,
                        0,
                    )?;
                    let m = need(m, "m", "bt")?;
                    let mprime = need(mprime, "mprime", "bt")?;
                    let y = need(y, "y", "bt")?;
                    let bt = moments::bt_average(&params, m, mprime, y, eps)?;
                    let tag = format!("m={m};mprime={mprime};y={y};eps={eps}");
                    for (r, &c) in bt.per_r.iter().enumerate() {
                        rows.push(("bt_count".into(), format!("{tag};r={r}"), c as f64));
                    }
                    rows.push(("bt_lhs".into(), tag.clone(), bt.lhs));
                    rows.push(("bt_rhs_shape".into(), tag.clone(), bt.rhs_shape));
                    rows.push(("bt_ratio".into(), tag, bt.ratio));
                }
                StatArg::Phitail => {
                    let params = Params::new(
                        need(a, "a", "phitail")?,
                        need(b, "b", "phitail")?,
                        Mode::AllExponents,
                        0,
                    )?;
                    let k = need(k, "k", "phitail")?;
                    let w = need(w, "w", "phitail")?;
                    let lambda = need(lambda, "lambda", "phitail")?;
                    let x = need(x, "x", "phitail")?;
                    rows.push((
                        "phitail".into(),
                        format!("k={k};w={w};lambda={lambda};x={x}"),
                        moments::phi_tail(&params, k, w, lambda, x)?,
                    ));
                }
            }
            let mut out = io::stdout().lock();
            writeln!(out, "statistic,params,value")?;
            for (stat, params, value) in rows {
                writeln!(out, "{stat},{params},{value}")?;
            }
        }
        Command::Galois {
            m,
            mprime,
            r,
            check,
        } => match check {
            GaloisCheck::Classes => {
                let classes = conjugacy_classes(m, mprime)?;
                println!("{}", serde_json::to_string(&classes)?);
            }
            GaloisCheck::Fixing => {
                let classes = classes_fixing_kr(m, mprime, r)?;
                println!("{}", serde_json::to_string(&classes)?);
            }
            GaloisCheck::Disjoint => {
                let ok = verify_disjointness(m, mprime)?;
                println!(
                    "{}",
                    serde_json::json!({"m": m, "mprime": mprime, "disjoint": ok})
                );
            }
        },
        Command::Construct { p, budget } => {
            let ce = expcover::construct::construct_counterexample(p, budget)?;
            println!("{}", serde_json::to_string(&ce)?);
        }
        Command::Defaults => {
            println!(
                "{}",
                serde_json::json!({
                    "mode": "all",
                    "w": 0,
                    "domain": "all",
                    "prime_bound": DEFAULT_PRIME_BOUND,
                    "eps": DEFAULT_EPS,
                    "budget": DEFAULT_BUDGET,
                    "threads": 0,
                    "r": 0,
                    "out": "stdout",
                    "json": "stdout"
                })
            );
        }
    }
    Ok(())
}
