use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use redei_core::catalog;
use redei_core::families::{self, FamilyPrediction};
use redei_core::numthy;
use redei_core::redei;
use redei_core::verify;
use redei_core::{Chi, CycleStructure, Execution, Field, Modulus};

const ORACLE_LIMIT: u64 = 1_000_000;
const DESK_SCALE: u64 = 1_000_000_000_000;

#[derive(Parser)]
#[command(
    name = "redei",
    version,
    about = "Cycle structures of Rédei permutations over P^1(F_q)"
)]
struct Cli {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Cycle structure of one permutation
    Structure {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        m: u64,
        /// Also decompose the permutation point by point
        #[arg(long)]
        verify: bool,
        /// Explicit `a` as colon-separated coefficients, constant first
        #[arg(long)]
        a: Option<String>,
    },
    /// Exponents grouped by cycle structure
    Classes {
        #[command(flatten)]
        field: FieldArgs,
    },
    /// Pairs with equal cycle structure
    Pairs {
        #[command(flatten)]
        field: FieldArgs,
    },
    /// Permutations whose structure no other permutation shares
    Isolated {
        #[command(flatten)]
        field: FieldArgs,
    },
    /// Closed-form families of pairs
    Family {
        #[arg(value_enum)]
        name: FamilyName,
        #[command(flatten)]
        params: FamilyArgs,
        /// Cross-check against the general theorem when q is small enough
        #[arg(long)]
        verify: bool,
    },
    /// Run every exhaustive sweep up to qmax
    Verify {
        #[arg(long, default_value_t = 400)]
        qmax: u64,
    },
}

#[derive(Args)]
struct FieldArgs {
    #[arg(long, conflicts_with_all = ["p", "k"])]
    q: Option<u64>,
    #[arg(long, requires = "k")]
    p: Option<u64>,
    #[arg(long, requires = "p")]
    k: Option<u32>,
    /// Quadratic character of `a`, 1 or -1
    #[arg(long, allow_negative_numbers = true)]
    chi: i64,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyName {
    Frobenius,
    #[value(name = "p-qmp1")]
    PQmp1,
    Quarter,
    Pm2,
}

#[derive(Args)]
struct FamilyArgs {
    /// q in decimal; may exceed 64 bits
    #[arg(long)]
    q: Option<String>,
    /// Odd prime; with --k or --twok gives q
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    k: Option<u32>,
    /// Even exponent: q = p^twok
    #[arg(long, conflicts_with_all = ["q", "k"])]
    twok: Option<u32>,
    /// 1 or -1; p-qmp1 with --twok defaults to -1
    #[arg(long, allow_negative_numbers = true)]
    chi: Option<i64>,
    /// Frobenius exponents of the pair (p^l1, p^l2)
    #[arg(long)]
    l1: Option<u32>,
    #[arg(long)]
    l2: Option<u32>,
}

enum Failure {
    Invalid(String),
    Verification(String),
    Family(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 2,
            Failure::Verification(_) => 3,
            Failure::Family(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Invalid(m) | Failure::Verification(m) | Failure::Family(m) => m,
        }
    }
}

fn invalid(e: impl ToString) -> Failure {
    Failure::Invalid(e.to_string())
}

type Outcome = Result<String, (String, Failure)>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err((out, failure)) => {
            print!("{out}");
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}

fn configure_threads() {
    #[cfg(feature = "parallel")]
    if let Some(n) = std::env::var("REDEI_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

fn run(cli: &Cli) -> Outcome {
    let fmt = cli.format;
    let bare = |r: Result<String, Failure>| r.map_err(|f| (String::new(), f));
    match &cli.command {
        Command::Structure {
            field,
            m,
            verify,
            a,
        } => cmd_structure(fmt, field, *m, *verify, a.as_deref()),
        Command::Classes { field } => bare(cmd_classes(fmt, field)),
        Command::Pairs { field } => bare(cmd_pairs(fmt, field)),
        Command::Isolated { field } => bare(cmd_isolated(fmt, field)),
        Command::Family {
            name,
            params,
            verify,
        } => cmd_family(fmt, *name, params, *verify),
        Command::Verify { qmax } => cmd_verify(fmt, *qmax),
    }
}

struct FieldSpec {
    q: u64,
    p: u64,
    k: u32,
    chi: Chi,
}

fn resolve_field(args: &FieldArgs) -> Result<FieldSpec, Failure> {
    let chi = Chi::from_sign(args.chi).map_err(invalid)?;
    let q = match (args.q, args.p, args.k) {
        (Some(q), _, _) => q,
        (None, Some(p), Some(k)) => p
            .checked_pow(k)
            .ok_or_else(|| invalid(format!("{p}^{k} exceeds 64 bits")))?,
        _ => return Err(invalid("give --q or both --p and --k")),
    };
    match numthy::prime_power_of(&BigUint::from(q)) {
        Some((p, k)) if p != 2 => Ok(FieldSpec { q, p, k, chi }),
        _ => Err(invalid(format!("{q} is not an odd prime power"))),
    }
}

fn structure_csv(s: &CycleStructure) -> String {
    let mut out = String::from("length,count\n");
    for (len, count) in s.iter() {
        let _ = writeln!(out, "{len},{count}");
    }
    out
}

fn cmd_structure(fmt: Format, args: &FieldArgs, m: u64, verify: bool, a: Option<&str>) -> Outcome {
    let spec = resolve_field(args).map_err(|f| (String::new(), f))?;
    let modulus = Modulus::new(spec.q, spec.chi).map_err(|e| (String::new(), invalid(e)))?;
    let structure = modulus
        .structure(m)
        .map_err(|e| (String::new(), invalid(e)))?;
    let oracle = if verify {
        Some(oracle_check(&spec, m, a, &structure).map_err(|f| (String::new(), f))?)
    } else {
        None
    };
    let out = match fmt {
        Format::Text => {
            let mut out = format!("{structure}\n");
            if let Some(o) = &oracle {
                let _ = writeln!(out, "oracle: {}", o.label());
            }
            out
        }
        Format::Json => {
            let mut v = json!({
                "q": spec.q,
                "chi": spec.chi.sign(),
                "m": m,
                "structure": structure.to_json(),
            });
            if let Some(o) = &oracle {
                v["oracle"] = o.label().into();
            }
            format!("{v}\n")
        }
        Format::Csv => structure_csv(&structure),
    };
    match oracle {
        Some(Oracle::Disagree(brute)) => Err((
            out,
            Failure::Verification(format!("oracle found {brute}, formula gives {structure}")),
        )),
        _ => Ok(out),
    }
}

enum Oracle {
    Agree,
    Disagree(CycleStructure),
    Skipped,
}

impl Oracle {
    fn label(&self) -> &'static str {
        match self {
            Oracle::Agree => "agree",
            Oracle::Disagree(_) => "disagree",
            Oracle::Skipped => "skipped",
        }
    }
}

fn oracle_check(
    spec: &FieldSpec,
    m: u64,
    a: Option<&str>,
    formula: &CycleStructure,
) -> Result<Oracle, Failure> {
    if spec.q + 1 > ORACLE_LIMIT {
        return Ok(Oracle::Skipped);
    }
    let field = Field::build(spec.p, spec.k).map_err(invalid)?;
    let a = match a {
        Some(s) => {
            let a = field.parse_element(s).map_err(invalid)?;
            let chi = field.quadratic_character(a).map_err(invalid)?;
            if chi != spec.chi {
                return Err(invalid(format!("χ({s}) = {chi}, not {}", spec.chi)));
            }
            a
        }
        None => field.canonical_a(spec.chi),
    };
    let table = redei::build_permutation(&field, m, a).map_err(invalid)?;
    let brute = redei::cycle_decomposition(&table);
    Ok(if brute == *formula {
        Oracle::Agree
    } else {
        Oracle::Disagree(brute)
    })
}

fn cmd_classes(fmt: Format, args: &FieldArgs) -> Result<String, Failure> {
    let spec = resolve_field(args)?;
    let classes = catalog::enumerate_classes(spec.q, spec.chi).map_err(invalid)?;
    Ok(match fmt {
        Format::Json => format!("{}\n", catalog::classes_json(spec.q, spec.chi, &classes)),
        Format::Csv => {
            let mut out = String::from("class,members,structure\n");
            for (i, c) in classes.iter().enumerate() {
                let members: Vec<String> = c.members.iter().map(u64::to_string).collect();
                let _ = writeln!(
                    out,
                    "{},{},{}",
                    i + 1,
                    members.join(" "),
                    c.structure.pretty()
                );
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            for c in &classes {
                let members: Vec<String> = c.members.iter().map(u64::to_string).collect();
                let _ = writeln!(out, "{{{}}}: {}", members.join(","), c.structure.pretty());
            }
            out
        }
    })
}

fn cmd_pairs(fmt: Format, args: &FieldArgs) -> Result<String, Failure> {
    let spec = resolve_field(args)?;
    let cat = catalog::enumerate_pairs(spec.q, spec.chi).map_err(invalid)?;
    Ok(match fmt {
        Format::Json => format!("{}\n", cat.to_json()),
        Format::Csv => cat.to_csv(),
        Format::Text => {
            let mut out = String::new();
            for (offset, pairs) in cat.line_groups() {
                let ps: Vec<String> = pairs.iter().map(|(m, n)| format!("({m},{n})")).collect();
                let _ = writeln!(out, "y = x + {offset}: {}", ps.join(" "));
            }
            let _ = writeln!(out, "{} pairs", cat.len());
            out
        }
    })
}

fn cmd_isolated(fmt: Format, args: &FieldArgs) -> Result<String, Failure> {
    let spec = resolve_field(args)?;
    let list = catalog::isolated_list(spec.q, spec.chi).map_err(invalid)?;
    let formula = catalog::isolated_count_formula(spec.q, spec.chi).map_err(invalid)?;
    Ok(match fmt {
        Format::Json => format!(
            "{}\n",
            json!({ "q": spec.q, "chi": spec.chi.sign(), "isolated": list, "formula": formula })
        ),
        Format::Csv => {
            let mut out = String::from("m\n");
            for m in &list {
                let _ = writeln!(out, "{m}");
            }
            out
        }
        Format::Text => {
            let ms: Vec<String> = list.iter().map(u64::to_string).collect();
            format!("isolated: {}\nformula: {formula}\n", ms.join(" "))
        }
    })
}

fn family_q(params: &FamilyArgs) -> Result<BigUint, Failure> {
    match (&params.q, params.p, params.k, params.twok) {
        (Some(q), _, _, _) => q
            .parse::<BigUint>()
            .map_err(|_| invalid(format!("cannot parse q = {q}"))),
        (None, Some(p), Some(k), None) => Ok(BigUint::from(p).pow(k)),
        (None, Some(p), None, Some(twok)) => {
            if twok == 0 || twok % 2 == 1 {
                return Err(invalid(format!(
                    "--twok {twok} is not a positive even number"
                )));
            }
            Ok(BigUint::from(p).pow(twok))
        }
        _ => Err(invalid("give --q, --p with --k, or --p with --twok")),
    }
}

fn family_chi(params: &FamilyArgs, default: Option<Chi>) -> Result<Chi, Failure> {
    match (params.chi, default) {
        (Some(s), _) => Chi::from_sign(s).map_err(invalid),
        (None, Some(chi)) => Ok(chi),
        (None, None) => Err(invalid("--chi is required")),
    }
}

fn need<T: Copy>(v: Option<T>, flag: &str) -> Result<T, Failure> {
    v.ok_or_else(|| invalid(format!("--{flag} is required")))
}

fn predict(name: FamilyName, params: &FamilyArgs) -> Result<FamilyPrediction, Failure> {
    let family = |e: redei_core::Error| Failure::Family(e.to_string());
    match name {
        FamilyName::Frobenius => {
            let chi = family_chi(params, None)?;
            families::frobenius_family(
                need(params.p, "p")?,
                need(params.k, "k")?,
                need(params.l1, "l1")?,
                need(params.l2, "l2")?,
                chi,
            )
            .map_err(family)
        }
        FamilyName::PQmp1 => {
            let default = params.twok.map(|_| Chi::NonSquare);
            let chi = family_chi(params, default)?;
            let q = family_q(params)?;
            let p = match params.p {
                Some(p) => p,
                None => numthy::prime_power_of(&q)
                    .map(|(p, _)| p)
                    .ok_or_else(|| invalid(format!("{q} is not a prime power")))?,
            };
            families::p_qmp1_family(p, &q, chi).map_err(family)
        }
        FamilyName::Quarter => {
            let chi = family_chi(params, None)?;
            families::quarter_family(&family_q(params)?, chi).map_err(family)
        }
        FamilyName::Pm2 => {
            let chi = family_chi(params, None)?;
            families::pm2_family(&family_q(params)?, chi).map_err(family)
        }
    }
}

// Theorem membership and structure formula for both coordinates.
fn cross_check(f: &FamilyPrediction) -> Result<Option<bool>, Failure> {
    let Some(q) = f.q.to_u64().filter(|&q| q <= DESK_SCALE) else {
        return Ok(None);
    };
    let Some((m, n)) = f.pair_u64() else {
        return Ok(None);
    };
    let modulus = Modulus::new(q, f.chi).map_err(invalid)?;
    let (sm, sn) = (modulus.structure(m).ok(), modulus.structure(n).ok());
    let equal = sm.is_some() && sm == sn;
    let mut ok = modulus.in_s(m, n) == equal && equal == f.applicable;
    if let (Some(p), Some(s)) = (&f.predicted_structure, &sm) {
        ok &= p == s;
    }
    Ok(Some(ok))
}

fn cmd_family(fmt: Format, name: FamilyName, params: &FamilyArgs, verify: bool) -> Outcome {
    let f = predict(name, params).map_err(|e| (String::new(), e))?;
    let check = if verify {
        cross_check(&f).map_err(|e| (String::new(), e))?
    } else {
        None
    };
    let check_label = |c: Option<bool>| match c {
        Some(true) => "agree",
        Some(false) => "disagree",
        None => "skipped",
    };
    let out = match fmt {
        Format::Json => {
            let mut v = f.to_json();
            if verify {
                v["verify"] = check_label(check).into();
            }
            format!("{v}\n")
        }
        Format::Csv => format!(
            "family,q,chi,m,n,applicable\n{},{},{},{},{},{}\n",
            f.family, f.q, f.chi, f.pair.0, f.pair.1, f.applicable
        ),
        Format::Text => {
            let mut out = format!(
                "family: {}\nq: {}\nchi: {}\npair: ({}, {})\napplicable: {}\nreason: {}\n",
                f.family, f.q, f.chi, f.pair.0, f.pair.1, f.applicable, f.reason
            );
            if let Some(s) = &f.predicted_structure {
                let _ = writeln!(out, "structure: {}", s.pretty());
                for (len, count) in s.iter().filter(|&(len, _)| len > 1) {
                    let _ = writeln!(out, "N_{len} = {count}");
                }
            }
            if verify {
                let _ = writeln!(out, "verify: {}", check_label(check));
            }
            out
        }
    };
    if check == Some(false) {
        return Err((
            out,
            Failure::Verification("family disagrees with the theorem".into()),
        ));
    }
    if !f.applicable {
        return Err((out, Failure::Family(f.reason.clone())));
    }
    Ok(out)
}

fn cmd_verify(fmt: Format, qmax: u64) -> Outcome {
    if qmax > ORACLE_LIMIT {
        return Err((String::new(), invalid(format!("qmax {qmax} is too large"))));
    }
    let reports = verify::run_all(qmax, Execution::Parallel);
    let out = match fmt {
        Format::Json => {
            let v: Vec<Value> = reports
                .iter()
                .map(|r| json!({ "name": r.name, "checked": r.checked, "counterexample": r.counterexample }))
                .collect();
            format!("{}\n", Value::Array(v))
        }
        Format::Csv => {
            let mut out = String::from("property,checked,passed\n");
            for r in &reports {
                let _ = writeln!(out, "{},{},{}", r.name, r.checked, r.passed());
            }
            out
        }
        Format::Text => reports.iter().map(|r| format!("{r}\n")).collect(),
    };
    match reports.iter().find(|r| !r.passed()) {
        Some(r) => Err((
            out,
            Failure::Verification(format!(
                "{}: {}",
                r.name,
                r.counterexample.as_deref().unwrap_or_default()
            )),
        )),
        None => Ok(out),
    }
}
