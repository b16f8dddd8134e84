use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use wittop::embed::{decode, embed, membership};
use wittop::exactnum::Zmod;
use wittop::frob_phi::{
    delta_embedded, delta_order_check, gamma_approx, phi_apply, projector_normal_form, FrobLift, ProjectorMode,
};
use wittop::hs_lift::{canonical_lift_embed, canonical_lift_orbit, HSDerivation, LiftChoice};
use wittop::poly::{mono_deg, monomials_up_to, parse_poly, parse_poly_with_p, MultiPoly};
use wittop::verify::{run_suite, SuiteConfig};
use wittop::wdo::{compose, compose_symbolic, format_normal_form, parse_operator, WittOperator, WorkingContext};
use wittop::{WittError, WittVec};

#[derive(Parser)]
#[command(name = "wittop", version, about = "Exact Witt vector and Witt differential operator calculator")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Prime; a comma separated list for `verify`
    #[arg(long, global = true)]
    p: Option<String>,
    /// Truncation length L (maximum length for `verify`)
    #[arg(long, global = true)]
    len: Option<usize>,
    /// Number of variables (maximum for `verify`)
    #[arg(long, global = true)]
    vars: Option<usize>,
    /// Degree bound D of the working context (maximum for `verify`)
    #[arg(long = "max-deg", global = true)]
    max_deg: Option<u32>,
    /// Level m of the working context
    #[arg(long, global = true, default_value_t = 0)]
    level: u32,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Write JSON output to this path ("-" for stdout)
    #[arg(long, global = true)]
    json: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Witt vector arithmetic
    #[command(subcommand)]
    Witt(WittCmd),
    /// Embed a Witt vector into (Z/p^L)[T]
    Embed { w: String },
    /// Decode an element of the embedded image
    Decode { g: String },
    /// Test membership in the embedded image
    Member { g: String },
    /// Hasse-Schmidt derivations
    #[command(subcommand)]
    Hs(HsCmd),
    /// Witt differential operators
    #[command(subcommand)]
    Op(OpCmd),
    /// Frobenius lifts and the map Phi
    #[command(subcommand)]
    Phi(PhiCmd),
    /// Run a property suite
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum WittCmd {
    /// Sum
    Add { a: String, b: String },
    /// Product
    Mul { a: String, b: String },
    /// Frobenius F^k
    Frob {
        a: String,
        #[arg(long, default_value_t = 1)]
        k: u32,
    },
    /// Verschiebung V^k
    Versch {
        a: String,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Restriction to a shorter length
    Restrict {
        a: String,
        #[arg(long)]
        to: usize,
    },
    /// Teichmuller representative of a polynomial over F_p
    Teich { f: String },
    /// Ghost components, component s modulo p^(s+1)
    Ghost { a: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum Route {
    Embed,
    Orbit,
}

#[derive(Subcommand)]
enum HsCmd {
    /// Canonical lift D~_j applied to a Witt vector
    Lift {
        /// `T1: D1(T1), D2(T1), ...; T2: ...` or `d<l>`
        #[arg(long)]
        hs: String,
        #[arg(long)]
        j: usize,
        #[arg(long, value_enum, default_value_t = Route::Embed)]
        route: Route,
        w: String,
    },
}

#[derive(Subcommand)]
enum OpCmd {
    /// Apply an operator to a Witt vector
    Apply { op: String, w: String },
    /// Normal form of q1 after q2
    Compose {
        q1: String,
        q2: String,
        #[arg(long)]
        symbolic: bool,
    },
    /// Normal form of an operator expression
    Normalform { op: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Mahler,
    Reconstruct,
}

#[derive(Subcommand)]
enum PhiCmd {
    /// Phi(a) for a in (Z/p^L)[T]
    Apply {
        #[arg(long, default_value = "")]
        lift: String,
        a: String,
    },
    /// Normal form of the projector onto Phi(A), with its checks
    Projector {
        #[arg(long, value_enum, default_value_t = Mode::Mahler)]
        mode: Mode,
    },
    /// Order bounds for the iterated difference of two lifts
    Delta {
        #[arg(long)]
        lift1: String,
        #[arg(long)]
        lift2: String,
        /// Largest n for the order check (default L - 1)
        #[arg(long)]
        nmax: Option<u32>,
        /// Also print delta(b)
        #[arg(long)]
        b: Option<String>,
    },
    /// Successive approximations of the difference of two lifts
    Gamma {
        #[arg(long)]
        lift1: String,
        #[arg(long)]
        lift2: String,
        #[arg(long, default_value_t = 2)]
        steps: u32,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// ghost-oracle, canonical-lift, identities, operators, projectors, delta, filtrations or all
    suite: String,
    #[arg(long)]
    samples: Option<usize>,
    /// Include wall times in the report
    #[arg(long)]
    timings: bool,
    #[arg(long, hide = true)]
    inject_fault: bool,
}

enum Failure {
    Usage(String),
    Check(String),
}

impl From<WittError> for Failure {
    fn from(e: WittError) -> Self {
        match e {
            WittError::Parse(_) | WittError::InvalidInput(_) => Failure::Usage(e.to_string()),
            _ => Failure::Check(e.to_string()),
        }
    }
}

type Out = Result<(String, serde_json::Value, bool), Failure>;

struct Env {
    p: u64,
    len: usize,
    vars: usize,
    max_deg: u32,
    level: u32,
}

impl Env {
    fn from(g: &Global) -> Result<Self, Failure> {
        let p = match &g.p {
            None => 2,
            Some(s) => s
                .trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("--p expects a prime, got '{s}'")))?,
        };
        if !wittop::exactnum::is_prime(p) {
            return Err(Failure::Usage(format!("{p} is not prime")));
        }
        Ok(Env {
            p,
            len: g.len.unwrap_or(2),
            vars: g.vars.unwrap_or(1),
            max_deg: g.max_deg.unwrap_or(4),
            level: g.level,
        })
    }

    fn witt(&self, s: &str) -> Result<WittVec, Failure> {
        Ok(WittVec::parse(s, self.p, self.vars, self.len)?)
    }

    fn ring(&self) -> Zmod {
        Zmod::new(self.p, self.len as u32)
    }

    fn ctx(&self) -> Result<WorkingContext, Failure> {
        Ok(WorkingContext::new(self.p, self.vars, self.len, self.max_deg, self.level)?)
    }

    fn lift(&self, s: &str) -> Result<FrobLift, Failure> {
        Ok(FrobLift::parse(s, self.p, self.vars, self.len)?)
    }
}

fn text(s: impl Into<String>) -> Out {
    let s = s.into();
    let v = serde_json::Value::String(s.clone());
    Ok((s, v, true))
}

fn witt_cmd(env: &Env, cmd: &WittCmd) -> Out {
    let w = match cmd {
        WittCmd::Add { a, b } => env.witt(a)?.add(&env.witt(b)?)?,
        WittCmd::Mul { a, b } => env.witt(a)?.mul(&env.witt(b)?)?,
        WittCmd::Frob { a, k } => env.witt(a)?.frobenius_pow(*k),
        WittCmd::Versch { a, k } => env.witt(a)?.verschiebung(*k),
        WittCmd::Restrict { a, to } => env.witt(a)?.restrict(*to)?,
        WittCmd::Teich { f } => WittVec::teichmuller(&parse_poly(f, Zmod::new(env.p, 1), env.vars)?, env.len)?,
        WittCmd::Ghost { a } => {
            let g = env.witt(a)?.ghost();
            let comps: Vec<String> = g.comps.iter().map(|c| c.to_string()).collect();
            return Ok((g.to_string(), json!(comps), true));
        }
    };
    text(w.to_string())
}

fn op_cmd(env: &Env, cmd: &OpCmd) -> Out {
    let ctx = env.ctx()?;
    match cmd {
        OpCmd::Apply { op, w } => {
            let q = parse_operator(op, &ctx)?;
            text(q.apply(&env.witt(w)?)?.to_string())
        }
        OpCmd::Compose { q1, q2, symbolic } => {
            let (a, b) = (parse_operator(q1, &ctx)?, parse_operator(q2, &ctx)?);
            let c = if *symbolic { compose_symbolic(&a, &b)? } else { compose(&a, &b)? };
            text(format_normal_form(&c))
        }
        OpCmd::Normalform { op } => text(format_normal_form(&parse_operator(op, &ctx)?)),
    }
}

fn phi_cmd(env: &Env, cmd: &PhiCmd) -> Out {
    match cmd {
        PhiCmd::Apply { lift, a } => {
            let lift = env.lift(lift)?;
            let a = parse_poly_with_p(a, env.ring(), env.vars)?;
            text(phi_apply(&lift, &a)?.to_string())
        }
        PhiCmd::Projector { mode } => {
            let ctx = env.ctx()?;
            let mode = match mode {
                Mode::Mahler => ProjectorMode::Mahler,
                Mode::Reconstruct => ProjectorMode::Reconstruct,
            };
            let report = wittop::frob_phi::check_projector(&ctx, &[])?;
            let nf = format_normal_form(&projector_normal_form(&ctx, mode)?);
            let ok = report.passed();
            let s = format!("{nf}\n{}", if ok { "projector checks pass" } else { "projector checks FAIL" });
            Ok((s, json!({"normal_form": nf, "report": report}), ok))
        }
        PhiCmd::Delta { lift1, lift2, nmax, b } => {
            let (x, y) = (env.lift(lift1)?, env.lift(lift2)?);
            let ring = env.ring();
            let n = env.vars;
            let gens: Vec<MultiPoly> = monomials_up_to(n, 2)
                .into_iter()
                .filter(|&m| mono_deg(m) > 0)
                .map(|m| MultiPoly::monomial(ring, n, m, 1))
                .collect();
            let mut bs = gens.clone();
            bs.push(MultiPoly::one(ring, n));
            let nmax = nmax.unwrap_or(env.len as u32 - 1);
            let fail = delta_order_check(&x, &y, nmax, &gens, &bs)?;
            let mut lines = Vec::new();
            if let Some(b) = b {
                let b = parse_poly_with_p(b, ring, n)?;
                let d = delta_embedded(&x, &y, &b);
                lines.push(format!("delta(b) = {} = {}", d, decode(&d, env.len)?));
            }
            match &fail {
                None => lines.push(format!("iterated delta order bounds hold for n <= {nmax}")),
                Some(f) => lines.push(format!("order bound fails at n = {}: a = {:?}, b = {}", f.n, f.seq, f.b)),
            }
            Ok((lines.join("\n"), json!({"nmax": nmax, "failure": fail}), fail.is_none()))
        }
        PhiCmd::Gamma { lift1, lift2, steps } => {
            let (x, y) = (env.lift(lift1)?, env.lift(lift2)?);
            let r = gamma_approx(&x, &y, *steps, env.level, env.max_deg)?;
            let mut lines = Vec::new();
            for s in &r.steps {
                let terms: Vec<String> = s
                    .terms
                    .iter()
                    .map(|t| format!("J={:?} a=({}) gain={}", t.j, t.coeff, t.gain))
                    .collect();
                lines.push(format!("n={}: {}", s.n, if terms.is_empty() { "0".into() } else { terms.join(", ") }));
            }
            let ok = r.final_ok && r.orders_ok;
            lines.push(format!(
                "gamma_{steps} - delta in p^{steps}: {}",
                if r.final_ok { "yes" } else { "no" }
            ));
            Ok((lines.join("\n"), json!({"steps": r.steps, "final_ok": r.final_ok, "orders_ok": r.orders_ok}), ok))
        }
    }
}

fn verify_cmd(g: &Global, args: &VerifyArgs) -> Out {
    let mut cfg = SuiteConfig::default();
    if let Some(ps) = &g.p {
        cfg.primes = ps
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.trim().parse::<u64>())
            .collect::<Result<_, _>>()
            .map_err(|_| Failure::Usage(format!("--p expects a list of primes, got '{ps}'")))?;
    }
    if let Some(l) = g.len {
        cfg.max_len = l;
    }
    if let Some(n) = g.vars {
        cfg.max_vars = n;
    }
    if let Some(d) = g.max_deg {
        cfg.max_deg = d;
    }
    cfg.seed = g.seed;
    cfg.samples = args.samples;
    cfg.timings = args.timings;
    cfg.inject_fault = args.inject_fault;
    let report = run_suite(&cfg, &args.suite)?;
    let mut lines = Vec::new();
    for c in &report.checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        let mut line = format!("{status} {} [{}] {} cases", c.check, c.point, c.cases);
        if let Some(ms) = c.millis {
            line += &format!(" {ms} ms");
        }
        lines.push(line);
        if let Some(ce) = &c.counterexample {
            lines.push(format!("  {}", ce.detail));
            for (k, v) in &ce.inputs {
                lines.push(format!("  {k} = {v}"));
            }
            lines.push(format!("  replay: {}", ce.replay));
        }
    }
    let failed = report.failures().count();
    lines.push(format!(
        "{}: {} checks, {} failed",
        report.suite,
        report.checks.len(),
        failed
    ));
    let v = serde_json::to_value(&report).expect("report serializes");
    Ok((lines.join("\n"), v, report.passed))
}

fn run(cli: &Cli) -> Out {
    if let Cmd::Verify(args) = &cli.cmd {
        return verify_cmd(&cli.global, args);
    }
    let env = Env::from(&cli.global)?;
    match &cli.cmd {
        Cmd::Witt(c) => witt_cmd(&env, c),
        Cmd::Embed { w } => text(embed(&env.witt(w)?).to_string()),
        Cmd::Decode { g } => text(decode(&parse_poly_with_p(g, env.ring(), env.vars)?, env.len)?.to_string()),
        Cmd::Member { g } => {
            let ok = membership(&parse_poly_with_p(g, env.ring(), env.vars)?, env.len);
            Ok((ok.to_string(), json!(ok), true))
        }
        Cmd::Hs(HsCmd::Lift { hs, j, route, w }) => {
            let d = HSDerivation::parse(hs, env.p, env.vars, *j)?;
            let w = env.witt(w)?;
            let out = match route {
                Route::Embed => canonical_lift_embed(&d, *j, &w, LiftChoice::Canonical)?,
                Route::Orbit => canonical_lift_orbit(&d, *j, &w)?,
            };
            text(out.to_string())
        }
        Cmd::Op(c) => op_cmd(&env, c),
        Cmd::Phi(c) => phi_cmd(&env, c),
        Cmd::Verify(_) => unreachable!(),
    }
}

fn command_name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Witt(_) => "witt",
        Cmd::Embed { .. } => "embed",
        Cmd::Decode { .. } => "decode",
        Cmd::Member { .. } => "member",
        Cmd::Hs(_) => "hs",
        Cmd::Op(_) => "op",
        Cmd::Phi(_) => "phi",
        Cmd::Verify(_) => "verify",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok((txt, value, ok)) => {
            let payload = if matches!(cli.cmd, Cmd::Verify(_)) {
                value
            } else {
                json!({"schema": 1, "command": command_name(&cli.cmd), "ok": ok, "output": value})
            };
            match cli.global.json.as_deref() {
                Some("-") => println!("{}", serde_json::to_string_pretty(&payload).unwrap()),
                Some(path) => {
                    if let Err(e) = std::fs::write(path, serde_json::to_string_pretty(&payload).unwrap() + "\n") {
                        eprintln!("cannot write {path}: {e}");
                        return ExitCode::from(2);
                    }
                    println!("{txt}");
                }
                None => println!("{txt}"),
            }
            ExitCode::from(if ok { 0 } else { 1 })
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Check(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
