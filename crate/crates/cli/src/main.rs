//! `pak`: JSON reports over the toolkit's checkers.
//!
//! Exit codes: 0 all requested identities hold, 2 bad input, 3 precision
//! exhausted, 4 an identity failed.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pak_core::coleman::{global_double_index, MeromorphicForm};
use pak_core::cube::{dd_n, random_samples, recursion_check, restriction_vanishing, GroupFunction, MPoly};
use pak_core::curvature::{check_identities, phi, DeRhamSpace};
use pak_core::forms::parse_form;
use pak_core::green::{random_element, synthetic_formula_case, FormulaCase, GreenTable};
use pak_core::ledger::{
    adjunction_check, codifferent_and_chi, rr_delta_check, rr_rescale_invariance, synthetic_surface,
    validate_character, IdeleCharacter, RescaleState,
};
use pak_core::padic::serial::element_to_json;
use pak_core::padic::{assert_equal, parse_scalar, LocalField, LogBranch, PadicElement, PrimeConfig};
use pak_core::qpoly::{QPoly, Q};
use pak_core::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

#[derive(Parser, Debug)]
#[command(name = "pak", version, about = "p-adic heights and Arakelov bookkeeping checks")]
struct Cli {
    #[command(flatten)]
    cfg: RunConfig,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug, Clone)]
struct RunConfig {
    /// Residue characteristic.
    #[arg(long, global = true, default_value_t = 5)]
    prime: u32,
    /// Relative precision in p-digits.
    #[arg(long, global = true, default_value_t = 32)]
    precision: u32,
    /// Value of log p, as a scalar token.
    #[arg(long = "log-branch", global = true, default_value = "0")]
    log_branch: String,
    /// Seed for synthetic inputs.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Global double index of two forms on P^1.
    DoubleIndex {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
    },
    /// Curvature identities for the canonical Green function.
    Curvature {
        #[arg(long)]
        genus: usize,
    },
    /// Green tables: inspect, reproduce entries, emit synthetic cases.
    Green {
        #[arg(long)]
        table: Option<PathBuf>,
        /// Recover G(P,Q) through the Green formula and compare.
        #[arg(long)]
        check_formula: bool,
        /// Emit a synthetic table with formula data for this genus.
        #[arg(long, value_name = "GENUS", conflicts_with = "table")]
        emit_synthetic: Option<u32>,
    },
    /// Arithmetic intersection ledger.
    Ledger {
        #[command(subcommand)]
        cmd: LedgerCmd,
    },
    /// Cube difference operators on Z^rank.
    CubeDiff {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        degree: u32,
        #[arg(long, default_value_t = 2)]
        rank: usize,
        #[arg(long, default_value_t = 16)]
        samples: usize,
    },
}

#[derive(Subcommand, Debug)]
enum LedgerCmd {
    /// Product formula for an idele class character read from TOML.
    ValidateCharacter {
        file: PathBuf,
        /// Comma-separated rationals; defaults to -1, p and the listed primes.
        #[arg(long)]
        generators: Option<String>,
    },
    /// Invariance of the Riemann-Roch comparison under G -> G + c.
    RiemannRoch {
        /// `c=TOKEN`.
        #[arg(long)]
        rescale: String,
        #[arg(long)]
        genus: Option<u32>,
        #[arg(long, allow_hyphen_values = true)]
        degree: Option<i64>,
    },
    /// Adjunction and Riemann-Roch two-path checks on a synthetic surface.
    Surface {
        #[arg(long, default_value_t = 2)]
        genus: u32,
        /// Green table JSON replacing the synthetic one at the place above p.
        #[arg(long)]
        oracle: Option<PathBuf>,
    },
    /// Codifferent degree and chi of Z for Q(sqrt d).
    Codifferent {
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
    },
}

enum Failure {
    Input(String),
    Precision(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::PrecisionExhausted(_) | Error::WindowUnderflow(_) => Failure::Precision(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type Outcome = Result<(Value, bool), Failure>;

struct Ctx {
    cfg: RunConfig,
    field: LocalField,
    branch: LogBranch,
}

impl Ctx {
    fn new(cfg: RunConfig) -> Result<Self, Failure> {
        let field = LocalField::qp(PrimeConfig::new(cfg.prime, cfg.precision)?);
        let lambda = parse_scalar(&field, &cfg.log_branch, &LogBranch::iwasawa(&field))?;
        Ok(Ctx {
            cfg,
            branch: LogBranch::new(lambda),
            field,
        })
    }

    fn target(&self) -> i64 {
        self.cfg.precision as i64 - 4
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.cfg.seed)
    }

    fn scalar(&self, s: &str) -> Result<PadicElement, Failure> {
        Ok(parse_scalar(&self.field, s, &self.branch)?)
    }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_json(path: &PathBuf) -> Result<Value, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// Element JSON plus a short rational reading when one exists.
fn el(x: &PadicElement) -> Value {
    let mut v = element_to_json(x);
    if let Some(r) = x.to_small_rational(1_000_000) {
        v["approx"] = json!(r.to_string());
    }
    v
}

fn double_index(ctx: &Ctx, f: &str, g: &str) -> Outcome {
    let parse = |s: &str| -> Result<(MeromorphicForm, Value), Failure> {
        let r = parse_form(s)?;
        let coeffs = |p: &QPoly| -> Value { p.coeffs().iter().map(|c| json!(c.to_string())).collect() };
        let js = json!({ "num": coeffs(&r.num), "den": coeffs(&r.den), "text": r.render() });
        Ok((MeromorphicForm::from_q(&ctx.field, &r.num, &r.den)?, js))
    };
    let ((w, wj), (eta, ej)) = (parse(f)?, parse(g)?);
    let gi = global_double_index(&w, &eta, &ctx.branch)?;
    let pass = gi.vanishes(ctx.target());
    let points: Vec<Value> = gi
        .locals
        .iter()
        .map(|(x, v)| json!({ "point": x.to_string(), "local_index": el(v) }))
        .collect();
    Ok((
        json!({
            "forms": { "f": wj, "g": ej },
            "splitting_degree": gi.field.degree(),
            "points": points,
            "global": el(&gi.total),
            "identities": { "global_sum_vanishes": pass },
        }),
        pass,
    ))
}

fn curvature(genus: usize) -> Outcome {
    let r = check_identities(genus)?;
    let s = DeRhamSpace::new(genus)?;
    let pass = r.all();
    Ok((
        json!({
            "genus": genus,
            "arithmetic": "exact rational",
            "phi_nonzero_entries": phi(&s).nonzero_entries(),
            "identities": {
                "diagonal_pullback": r.diagonal,
                "section_pullback": r.section,
                "cup_is_diagonal_class": r.cup_is_diagonal,
            },
        }),
        pass,
    ))
}

fn green(ctx: &Ctx, table: Option<&PathBuf>, check_formula: bool, emit: Option<u32>) -> Outcome {
    if let Some(g) = emit {
        let case = synthetic_formula_case(&ctx.field, g, &mut ctx.rng())?;
        return Ok((json!({ "case": case.to_json() }), true));
    }
    let path = table.ok_or_else(|| Failure::Input("green needs --table or --emit-synthetic".into()))?;
    let v = read_json(path)?;
    let t = GreenTable::from_json(&ctx.field, &v)?;
    let mut out = json!({
        "genus": t.genus(),
        "labels": t.labels(),
        "entries": t.entries().count(),
        "anchor": t.anchor().map(|(a, b)| json!([a, b])),
    });
    if !check_formula {
        return Ok((out, true));
    }
    let case = FormulaCase::from_json(&ctx.field, &v)?;
    let got = case.evaluate()?;
    let want = case.expected()?;
    let pass = assert_equal(&got, &want, ctx.target());
    out["formula"] = json!({
        "P": case.p, "Q": case.q,
        "recovered": el(&got),
        "table": el(&want),
    });
    out["identities"] = json!({ "green_formula_reproduction": pass });
    Ok((out, pass))
}

fn validate(ctx: &Ctx, file: &PathBuf, gens: Option<&str>) -> Outcome {
    let ell = IdeleCharacter::from_toml(&read(file)?, ctx.cfg.precision)?;
    let gens: Vec<Q> = match gens {
        Some(s) => s
            .split(',')
            .map(|x| x.trim().parse::<Q>().map_err(|_| Failure::Input(format!("bad generator {x:?}"))))
            .collect::<Result<_, _>>()?,
        None => {
            let mut g = vec![Q::from_integer((-1).into()), Q::from_integer(ell.p().into())];
            g.extend(ell.finite.keys().map(|&q| Q::from_integer(q.into())));
            g
        }
    };
    let rep = validate_character(&ell, &gens)?;
    let pass = rep.pass();
    let mut v = rep.to_json();
    v["identities"] = json!({ "product_formula": pass });
    Ok((v, pass))
}

fn riemann_roch(ctx: &Ctx, rescale: &str, genus: Option<u32>, degree: Option<i64>) -> Outcome {
    let tok = rescale
        .strip_prefix("c=")
        .ok_or_else(|| Failure::Input(format!("--rescale expects c=TOKEN, got {rescale:?}")))?;
    let c = ctx.scalar(tok)?;
    let mut rng = ctx.rng();
    let k = &ctx.field;
    let st = RescaleState {
        field: k.clone(),
        place: "p".into(),
        ll: random_element(k, &mut rng),
        lw: random_element(k, &mut rng),
        ww: random_element(k, &mut rng),
    };
    let gs: Vec<u32> = genus.map_or((1..=5).collect(), |g| vec![g]);
    let ds: Vec<i64> = degree.map_or((-5..=5).collect(), |d| vec![d]);
    let mut rows = Vec::new();
    let mut pass = true;
    for &g in &gs {
        for &d in &ds {
            let r = rr_rescale_invariance(&st, "p", &c, d, g)?;
            let ok = assert_equal(&r.delta_lhs, &r.delta_rhs, ctx.target());
            pass &= ok;
            let mut row = r.to_json();
            row["genus"] = json!(g);
            row["degree"] = json!(d);
            row["pass"] = json!(ok);
            rows.push(row);
        }
    }
    Ok((
        json!({
            "c": el(&c),
            "rows": rows,
            "identities": { "delta_lhs_equals_delta_rhs": pass },
        }),
        pass,
    ))
}

fn surface(ctx: &Ctx, genus: u32, oracle: Option<&PathBuf>) -> Outcome {
    let (mut st, d) = synthetic_surface(&ctx.field, genus, &mut ctx.rng())?;
    if let Some(path) = oracle {
        let t = GreenTable::from_json(&ctx.field, &read_json(path)?)?;
        *st.curve.table_mut("p")? = t;
    }
    let adj = adjunction_check(&st)?;
    let rr = rr_delta_check(&d, &st)?;
    let zero = ctx.field.zero();
    let a_ok = assert_equal(&adj.residual, &zero, ctx.target());
    let r_ok = assert_equal(&rr.residual, &zero, ctx.target());
    Ok((
        json!({
            "genus": genus,
            "adjunction": adj.to_json(),
            "riemann_roch_delta": rr.to_json(),
            "identities": { "adjunction": a_ok, "riemann_roch_delta": r_ok },
        }),
        a_ok && r_ok,
    ))
}

fn codifferent(ctx: &Ctx, d: i64) -> Outcome {
    let primes: Vec<u64> = (2..200u64).filter(|n| (2..*n).take_while(|k| k * k <= *n).all(|k| n % k != 0)).collect();
    let ell = IdeleCharacter::standard(&ctx.field, &primes)?;
    let r = codifferent_and_chi(d, &ell)?;
    let pass = r.consistent();
    let mut v = r.to_json();
    v["identities"] = json!({ "norm_and_gram_agree": pass });
    Ok((v, pass))
}

fn cube_diff(ctx: &Ctx, n: usize, degree: u32, rank: usize, samples: usize) -> Outcome {
    if n == 0 || rank == 0 || samples == 0 {
        return Err(Failure::Input("--n, --rank and --samples must be positive".into()));
    }
    let mut rng = ctx.rng();
    let model = pak_core::cube::AbelianModel { rank };
    let pts = random_samples(model, n, samples, &mut rng);
    let expect_zero = (degree as usize) < n;
    let mut rows = Vec::new();
    let mut pass = true;
    for e in MPoly::exponents(rank, degree) {
        let m = MPoly::monomial(&e, Q::from_integer(1.into()));
        let f = GroupFunction::polynomial(m.clone());
        let nonzero = pts.iter().filter(|(x, h)| dd_n(&f, x, h) != Q::from_integer(0.into())).count();
        let ok = (nonzero == 0) == expect_zero;
        pass &= ok;
        rows.push(json!({
            "monomial": m.render(),
            "nonzero_samples": nonzero,
            "expected_zero": expect_zero,
            "pass": ok,
        }));
    }
    let f = GroupFunction::polynomial(MPoly::random(rank, degree, &mut rng));
    let rec = recursion_check(&f, &pts);
    pass &= rec.pass();
    let mut restriction = Vec::new();
    for i in 0..n {
        let r = restriction_vanishing(&f, i, &pts)?;
        pass &= r.pass();
        restriction.push(r.to_json());
    }
    Ok((
        json!({
            "n": n,
            "degree": degree,
            "rank": rank,
            "samples": samples,
            "annihilation": rows,
            "recursion": rec.to_json(),
            "restriction": restriction,
            "identities": { "cube_difference": pass },
        }),
        pass,
    ))
}

fn run(cli: &Cli) -> Result<(&'static str, Value, bool), Failure> {
    let ctx = Ctx::new(cli.cfg.clone())?;
    let (name, (body, pass)) = match &cli.cmd {
        Command::DoubleIndex { f, g } => ("double-index", double_index(&ctx, f, g)?),
        Command::Curvature { genus } => ("curvature", curvature(*genus)?),
        Command::Green {
            table,
            check_formula,
            emit_synthetic,
        } => ("green", green(&ctx, table.as_ref(), *check_formula, *emit_synthetic)?),
        Command::Ledger { cmd } => match cmd {
            LedgerCmd::ValidateCharacter { file, generators } => {
                ("ledger validate-character", validate(&ctx, file, generators.as_deref())?)
            }
            LedgerCmd::RiemannRoch { rescale, genus, degree } => {
                ("ledger riemann-roch", riemann_roch(&ctx, rescale, *genus, *degree)?)
            }
            LedgerCmd::Surface { genus, oracle } => ("ledger surface", surface(&ctx, *genus, oracle.as_ref())?),
            LedgerCmd::Codifferent { d } => ("ledger codifferent", codifferent(&ctx, *d)?),
        },
        Command::CubeDiff {
            n,
            degree,
            rank,
            samples,
        } => ("cube-diff", cube_diff(&ctx, *n, *degree, *rank, *samples)?),
    };
    Ok((name, body, pass))
}

fn header(cfg: &RunConfig, command: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema".into(), json!("pak/1"));
    m.insert("command".into(), json!(command));
    m.insert(
        "config".into(),
        json!({
            "prime": cfg.prime,
            "precision": cfg.precision,
            "target": cfg.precision as i64 - 4,
            "log_branch": cfg.log_branch,
            "seed": cfg.seed,
        }),
    );
    m
}

fn emit(cfg: &RunConfig, report: &Value) -> Result<(), String> {
    let text = serde_json::to_string_pretty(report).map_err(|e| e.to_string())? + "\n";
    match &cfg.out {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (code, report) = match run(&cli) {
        Ok((name, body, pass)) => {
            let mut m = header(&cli.cfg, name);
            if let Value::Object(b) = body {
                m.extend(b);
            }
            m.insert("pass".into(), json!(pass));
            (if pass { 0 } else { 4 }, Value::Object(m))
        }
        Err(f) => {
            let (code, kind, msg) = match f {
                Failure::Input(m) => (2, "input", m),
                Failure::Precision(m) => (3, "precision", m),
            };
            eprintln!("pak: {msg}");
            let mut m = header(&cli.cfg, "error");
            m.insert("error".into(), json!({ "kind": kind, "message": msg }));
            m.insert("pass".into(), json!(false));
            (code, Value::Object(m))
        }
    };
    if let Err(e) = emit(&cli.cfg, &report) {
        eprintln!("pak: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
