use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use monalg::growth::{Family, GrowthSpec};
use monalg::locnil::{check_locally_nilpotent, check_prime_tilde, rebuild_tilde, verify_growth_tilde, verify_lambda, verify_locnil, verify_tilde_structure};
use monalg::prime::{check_prime, primeness_claims, verify_entropy_corollary, verify_nonprime_example};
use monalg::primitive::{rebuild_hat, verify_growth_hat, verify_primitive};
use monalg::report::{config_hash, VerificationReport};
use monalg::words::factors::DimEngine;
use monalg::words::persist::{dump_level, load, save, write_atomic};
use monalg::words::verify::verify_growth_bounds;
use monalg::words::{build, extend, ConstructionState, Limits, StrategySpec, Word};
use monalg::Error;

#[derive(Parser)]
#[command(name = "monalg", version, about = "Build monomial algebras of prescribed growth and check them up to a finite depth")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a state, extending a shallower saved state of the same configuration.
    Build(Config),
    /// Run a verification suite; exit 1 if any claim fails.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[command(flatten)]
        config: Config,
        #[command(flatten)]
        opts: VerifyOpts,
    },
    /// CSV of dim(n) brackets for n in a range.
    Dims {
        #[command(flatten)]
        config: Config,
        #[arg(long, default_value_t = 1)]
        from: usize,
        /// Defaults to 2^depth.
        #[arg(long)]
        to: Option<usize>,
    },
    /// List the C and W words of one level.
    Dump {
        #[command(flatten)]
        config: Config,
        #[arg(long)]
        level: usize,
        #[arg(long, default_value_t = 1 << 16)]
        max_words: usize,
    },
}

#[derive(Args, Clone)]
struct Config {
    /// Growth function, e.g. exproot:d=2,beta=1/2 or nearexp:d=2,eps=1/2.
    #[arg(long = "f", default_value = "exproot:d=2,beta=1/2")]
    f: String,
    #[arg(long, default_value_t = 8)]
    depth: usize,
    /// plain, prime, nonprime, primitive, tilde or random.
    #[arg(long, default_value = "plain")]
    strategy: String,
    /// First term 1/2^k of the eps sequence.
    #[arg(long)]
    eps: Option<String>,
    /// eps sequence as pow2:<k>, meaning eps_i = 1/2^(i+k).
    #[arg(long = "eps-seq")]
    eps_seq: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Letter avoided by the nonprime strategy, numbered from 1.
    #[arg(long, default_value_t = 1)]
    letter: u8,
    /// Bytes one explicit C level may use.
    #[arg(long = "mem-cap")]
    mem_cap: Option<u64>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Read the state from this file instead of building it.
    #[arg(long)]
    state: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args, Clone)]
struct VerifyOpts {
    #[arg(long = "max-len")]
    max_len: Option<usize>,
    #[arg(long = "min-witnesses", default_value_t = 3)]
    min_witnesses: usize,
    #[arg(long = "max-deg", default_value_t = 32)]
    max_deg: usize,
    /// Comma-separated generator words for the nilpotency search.
    #[arg(long)]
    gens: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Growth,
    Prime,
    Nonprime,
    Entropy,
    Primitive,
    Lambda,
    Locnil,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Csv,
}

const STATE_FILE: &str = "state.monalg";

impl Config {
    fn growth(&self) -> Result<GrowthSpec, Error> {
        self.f.parse()
    }

    fn limits(&self) -> Limits {
        let mut l = Limits::default();
        if let Some(m) = self.mem_cap {
            l.mem_bytes = m;
        }
        l
    }

    fn shift(&self, default: u32) -> Result<u32, Error> {
        if let Some(s) = &self.eps_seq {
            return s
                .strip_prefix("pow2:")
                .and_then(|k| k.parse().ok())
                .ok_or_else(|| Error::Parse(format!("--eps-seq must look like pow2:<k>, got {s:?}")));
        }
        if let Some(e) = &self.eps {
            let r = monalg::growth::parse_rational(e)?;
            let d = r.denom().magnitude();
            if !num_is_one(r.numer()) || d.count_ones() != 1 {
                return Err(Error::Parse(format!("--eps must be 1/2^k, got {e}")));
            }
            return Ok(d.trailing_zeros().unwrap_or(0) as u32);
        }
        Ok(default)
    }

    fn strategy(&self) -> Result<StrategySpec, Error> {
        Ok(match self.strategy.as_str() {
            "plain" | "lex-first" => StrategySpec::LexFirst,
            "prime" => StrategySpec::Prime,
            "nonprime" | "nonprime-example" => {
                if self.letter == 0 {
                    return Err(Error::Parse("letters are numbered from 1".into()));
                }
                StrategySpec::NonPrime { letter: self.letter - 1 }
            }
            "primitive" => StrategySpec::Primitive { shift: self.shift(2)? },
            "tilde" => StrategySpec::Tilde { shift: self.shift(0)? },
            "random" | "seeded-random" => StrategySpec::SeededRandom { seed: self.seed.unwrap_or(0) },
            other => return Err(Error::Parse(format!("unknown strategy {other:?}"))),
        })
    }

    /// Growth recorded in a state of this configuration.
    fn state_growth(&self) -> Result<GrowthSpec, Error> {
        let g = self.growth()?;
        Ok(match self.strategy()? {
            StrategySpec::Tilde { .. } => g.plus_letter(),
            _ => g,
        })
    }

    fn describe(&self) -> String {
        format!(
            "f={} depth={} strategy={} eps={:?} eps_seq={:?} seed={:?} letter={} mem_cap={:?}",
            self.f, self.depth, self.strategy, self.eps, self.eps_seq, self.seed, self.letter, self.mem_cap
        )
    }

    fn state(&self) -> Result<ConstructionState, Error> {
        match &self.state {
            Some(p) => load(p),
            None => build(&self.growth()?, self.depth, &self.strategy()?, &self.limits()),
        }
    }
}

fn num_is_one(x: &num_bigint::BigInt) -> bool {
    *x == num_bigint::BigInt::from(1)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Capacity(_) | Error::Budget(_) | Error::HorizonExhausted(_) | Error::Infeasible { .. } => 3,
        Error::Assertion(_) => 1,
        _ => 2,
    }
}

fn ensure_dir(p: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(p)?;
    Ok(())
}

fn cmd_build(c: &Config) -> Result<u8, Error> {
    let growth = c.growth()?;
    let strategy = c.strategy()?;
    let limits = c.limits();
    ensure_dir(&c.out)?;
    let path = c.out.join(STATE_FILE);
    let mut resumed = None;
    if path.exists() && strategy.is_base() {
        if let Ok(st) = load(&path) {
            let same = st.growth == c.state_growth()? && st.strategy == strategy && st.limits == limits;
            if same && st.depth() <= c.depth {
                resumed = Some(st);
            }
        }
    }
    let (st, how) = match resumed {
        Some(mut st) => {
            let from = st.depth();
            extend(&mut st, c.depth)?;
            (st, format!("resumed from depth {from}"))
        }
        None => (build(&growth, c.depth, &strategy, &limits)?, "fresh build".to_string()),
    };
    save(&st, &path)?;
    let mut log = format!(
        "monalg {} config {}\n{}\n{how}\n",
        env!("CARGO_PKG_VERSION"),
        &config_hash(&c.describe())[..12],
        st.describe()
    );
    for line in &st.log {
        log.push_str(line);
        log.push('\n');
    }
    write_atomic(&c.out.join("build.log"), log.as_bytes())?;
    println!("{} -> {} ({how})", st.describe(), path.display());
    Ok(0)
}

fn applicable(st: &ConstructionState) -> Vec<Suite> {
    let mut v = vec![Suite::Growth];
    match &st.strategy {
        StrategySpec::Prime => {
            v.push(Suite::Prime);
            if matches!(st.growth.family, Family::NearOneExp { .. }) {
                v.push(Suite::Entropy);
            }
        }
        StrategySpec::NonPrime { .. } => v.push(Suite::Nonprime),
        StrategySpec::Primitive { .. } => v.push(Suite::Primitive),
        StrategySpec::Tilde { .. } => v.extend([Suite::Lambda, Suite::Locnil, Suite::Prime]),
        _ => {}
    }
    v
}

fn run_suite(suite: Suite, st: &ConstructionState, o: &VerifyOpts) -> Result<VerificationReport, Error> {
    let tilde = matches!(st.strategy, StrategySpec::Tilde { .. });
    Ok(match suite {
        Suite::Growth if tilde => verify_growth_tilde(&rebuild_tilde(st)?, 16)?,
        Suite::Growth => match st.strategy {
            StrategySpec::Primitive { .. } => verify_growth_hat(&rebuild_hat(st, 64)?)?,
            _ => verify_growth_bounds(st)?,
        },
        Suite::Prime if tilde => check_prime_tilde(&rebuild_tilde(st)?, o.max_len.unwrap_or(4))?.0,
        Suite::Prime => {
            let rep = check_prime(st, o.max_len.unwrap_or(4))?;
            primeness_claims(&rep, "primeness", &st.describe())
        }
        Suite::Nonprime => {
            let x = match st.strategy {
                StrategySpec::NonPrime { letter } => letter,
                _ => 0,
            };
            verify_nonprime_example(st, x)?
        }
        Suite::Entropy => verify_entropy_corollary(&st.growth, st.depth(), &st.limits)?,
        Suite::Primitive => verify_primitive(&rebuild_hat(st, 64)?, o.max_len.unwrap_or(4), o.min_witnesses)?,
        Suite::Lambda => {
            let sys = rebuild_tilde(st)?;
            let mut rep = verify_tilde_structure(&sys)?;
            rep.merge(verify_lambda(&sys)?.0);
            rep
        }
        Suite::Locnil => {
            let sys = rebuild_tilde(st)?;
            match &o.gens {
                Some(g) => {
                    let gens = g
                        .split(',')
                        .map(|s| Word::parse(s.trim(), st.alphabet).map(|w| w.0))
                        .collect::<Result<Vec<_>, _>>()?;
                    let rec = check_locally_nilpotent(st, &gens, o.max_deg)?;
                    let mut rep = VerificationReport::new("local nilpotence", &st.describe(), st.depth());
                    let mut claim = monalg::report::ClaimRecord::new(
                        format!("{{{}}} is nilpotent within the a priori degree", rec.gens.join(",")),
                        rec.degree.map_or("none".to_string(), |e| e.to_string()),
                        rec.a_priori,
                        rec.pass,
                    )
                    .with_witness(format!("longest nonzero product {}", rec.longest_nonzero));
                    if let Some(r) = &rec.reason {
                        claim = claim.with_witness(r.clone());
                    }
                    rep.push(claim);
                    rep
                }
                None => verify_locnil(&sys, o.max_len.unwrap_or(6), 2, o.max_deg)?.0,
            }
        }
        Suite::All => {
            let mut rep = VerificationReport::new("all suites", &st.describe(), st.depth());
            for s in applicable(st) {
                rep.merge(run_suite(s, st, o)?);
            }
            rep
        }
    })
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn report_csv(rep: &VerificationReport) -> String {
    let mut s = format!(
        "# {} v{} config {} horizon {}\nclaim,level,length,lhs,rhs,verdict,witness\n",
        rep.subject, rep.tool_version, rep.config_hash, rep.horizon
    );
    for c in &rep.claims {
        let cells = [
            csv_field(&c.claim),
            c.level.map_or(String::new(), |x| x.to_string()),
            c.length.map_or(String::new(), |x| x.to_string()),
            csv_field(&c.lhs),
            csv_field(&c.rhs),
            if c.passed() { "pass" } else { "fail" }.to_string(),
            csv_field(c.witness.as_deref().unwrap_or("")),
        ];
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

fn suite_name(s: Suite) -> String {
    s.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
}

fn cmd_verify(suite: Suite, c: &Config, o: &VerifyOpts) -> Result<u8, Error> {
    let st = c.state()?;
    let rep = run_suite(suite, &st, o)?;
    ensure_dir(&c.out)?;
    let name = suite_name(suite);
    write_atomic(&c.out.join(format!("report-{name}.json")), rep.to_json().as_bytes())?;
    write_atomic(&c.out.join(format!("report-{name}.txt")), rep.to_text().as_bytes())?;
    match c.format {
        Format::Json => println!("{}", rep.to_json()),
        Format::Text => print!("{}", rep.to_text()),
        Format::Csv => print!("{}", report_csv(&rep)),
    }
    Ok(if rep.pass() { 0 } else { 1 })
}

fn cmd_dims(c: &Config, from: usize, to: Option<usize>) -> Result<u8, Error> {
    let st = c.state()?;
    let to = to.unwrap_or(1 << st.depth());
    let lengths: Vec<usize> = (from.max(1)..=to).collect();
    let dims = DimEngine::new(&st).dims(&lengths)?;
    let mut s = format!(
        "# monalg v{} config {} horizon {}\nn,dim_lower,dim_upper,exact,f\n",
        env!("CARGO_PKG_VERSION"),
        &config_hash(&st.describe())[..12],
        st.depth()
    );
    for d in &dims {
        s.push_str(&format!("{},{},{},{},{}\n", d.length, d.lower, d.upper, d.exact, st.growth.eval(d.length)?));
    }
    ensure_dir(&c.out)?;
    write_atomic(&c.out.join("dims.csv"), s.as_bytes())?;
    print!("{s}");
    Ok(0)
}

fn cmd_dump(c: &Config, level: usize, max_words: usize) -> Result<u8, Error> {
    let st = c.state()?;
    print!("{}", dump_level(&st, level, max_words)?);
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Cmd::Build(c) => cmd_build(c),
        Cmd::Verify { suite, config, opts } => cmd_verify(*suite, config, opts),
        Cmd::Dims { config, from, to } => cmd_dims(config, *from, *to),
        Cmd::Dump { config, level, max_words } => cmd_dump(config, *level, *max_words),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
