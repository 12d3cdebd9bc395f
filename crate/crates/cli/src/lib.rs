//! Batch front end for kanpos.
//!
//! Every invocation loads a workspace (the built-in prelude plus any `-w`
//! files), runs one subcommand and exits with 0 when the verdict is true,
//! 1 when it is false and 2 on any error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use kanpos::constructions::{self, ColimitSquare};
use kanpos::kan::{self, Counterexample, ExtensionVerdict, InjectivityReport, Side, Subject};
use kanpos::monads;
use kanpos::oracles::{self, ReflectionFailure};
use kanpos::reflection::{self, Mode, ReflectionConfig, ReflectionTrace};
use kanpos::text::{format_assignment, format_map, format_poset, Workspace};
use kanpos::{Error, FinPoset, MonotoneMap};

pub const EXIT_TRUE: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

/// Declarations available unless `--no-prelude` is given.
pub const PRELUDE: &str = "\
poset empty { elements: ; order: }
poset point { elements: pt ; order: }
poset chain2 { elements: 0 1 ; order: 0<1 }
poset chain3 { elements: 0 1 2 ; order: 0<1 1<2 }
poset antichain2 { elements: a b ; order: }
poset antichain3 { elements: a b c ; order: }
poset V { elements: a b t ; order: a<t b<t }
poset Lambda { elements: t a b ; order: t<a t<b }
poset diamond { elements: bot a b top ; order: bot<a bot<b a<top b<top }
map emb_2_V : antichain2 -> V { a->a b->b }
map collapse_2_1 : antichain2 -> point { a->pt b->pt }
map collapse_chain2 : chain2 -> point { 0->pt 1->pt }
map emb_0_1 : empty -> point { }
";

#[derive(Debug, Parser)]
#[command(
    name = "kanpos",
    version,
    about = "Kan extensions and Kan-injective reflections of finite posets"
)]
pub struct Cli {
    /// Workspace file to load; repeatable.
    #[arg(short = 'w', long = "workspace", global = true)]
    pub workspace: Vec<PathBuf>,

    /// Emit a JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    /// Do not preload the built-in posets and maps.
    #[arg(long, global = true)]
    pub no_prelude: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Least (or greatest) extension of F along H.
    #[command(disable_help_flag = true)]
    Lan(LanArgs),
    /// Kan-injectivity of an object or morphism.
    Check(CheckArgs),
    /// Reflect X into the Kan-injective posets.
    Reflect(ReflectArgs),
    /// Limits and colimits.
    #[command(subcommand)]
    Colimit(ColimitCommand),
    /// The lowerset monad.
    #[command(subcommand)]
    Monad(MonadCommand),
    /// Check a reflection against target posets.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct LanArgs {
    #[arg(short = 'h', value_name = "H")]
    pub h: String,
    #[arg(short = 'f', value_name = "F")]
    pub f: String,
    /// Greatest extension instead.
    #[arg(long, conflicts_with = "weak")]
    pub right: bool,
    /// Only require existence; the triangle may be lax.
    #[arg(long)]
    pub weak: bool,
    #[arg(long, action = ArgAction::Help)]
    pub help: Option<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Left,
    Right,
    WeakLeft,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Self {
        match s {
            SideArg::Left => Side::Left,
            SideArg::Right => Side::Right,
            SideArg::WeakLeft => Side::WeakLeft,
        }
    }
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Name of a poset or a map.
    pub subject: String,
    #[arg(short = 'H', required = true, value_delimiter = ',')]
    pub h: Vec<String>,
    #[arg(long, value_enum, default_value = "left")]
    pub side: SideArg,
}

#[derive(Debug, Args)]
pub struct ReflectArgs {
    pub x: String,
    #[arg(short = 'H', required = true, value_delimiter = ',')]
    pub h: Vec<String>,
    #[arg(long)]
    pub weak: bool,
    #[arg(long, default_value_t = reflection::DEFAULT_BUDGET)]
    pub budget: usize,
    #[arg(long, default_value_t = reflection::DEFAULT_STAGE_LIMIT)]
    pub stage_limit: usize,
    /// Write every stage and connecting map to DIR/trace.txt.
    #[arg(long, value_name = "DIR")]
    pub dump_trace: Option<PathBuf>,
    /// Name given to the reflection in the output.
    #[arg(long, default_value = "R")]
    pub name: String,
}

#[derive(Debug, Subcommand)]
pub enum ColimitCommand {
    /// Subposet where U <= V.
    Inserter {
        u: String,
        v: String,
    },
    /// Least quotient of the codomain forcing c U <= c V.
    Coinserter {
        u: String,
        v: String,
    },
    /// Pushout of the span cod(F) <- A -> cod(H).
    Pushout {
        f: String,
        h: String,
    },
    /// Cocomma object of P, Q with a shared domain.
    Cocomma {
        p: String,
        q: String,
    },
    Product {
        factors: Vec<String>,
    },
    Coproduct {
        summands: Vec<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum MonadCommand {
    /// Unit and associativity laws of the lowerset monad at X.
    Laws { x: String },
    /// The Kock-Zöberlein inequality at X.
    Kz { x: String },
    /// The algebra structure on X, if any.
    Algebra { x: String },
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub x: String,
    #[arg(short = 'H', required = true, value_delimiter = ',')]
    pub h: Vec<String>,
    #[arg(long, required = true, value_delimiter = ',')]
    pub targets: Vec<String>,
    /// Candidate unit X -> C; computed by reflection when omitted.
    #[arg(long)]
    pub unit: Option<String>,
    #[arg(long, default_value_t = reflection::DEFAULT_BUDGET)]
    pub budget: usize,
}

/// Outcome of one command.
#[derive(Debug)]
pub struct Report {
    pub exit: i32,
    pub text: String,
    pub counterexample: Option<String>,
    pub stages: Option<Vec<usize>>,
    pub converged_at: Option<usize>,
}

impl Report {
    fn verdict(ok: bool, text: String) -> Self {
        Report {
            exit: if ok { EXIT_TRUE } else { EXIT_FALSE },
            text,
            counterexample: None,
            stages: None,
            converged_at: None,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "verdict": self.exit == EXIT_TRUE,
            "counterexample": self.counterexample,
            "stages": self.stages,
            "converged_at": self.converged_at,
            "output": self.text,
        })
    }
}

/// Loads the prelude (optionally) and then every file, in order.
pub fn parse_workspace<P: AsRef<Path>>(paths: &[P], prelude: bool) -> kanpos::Result<Workspace> {
    let mut ws = if prelude {
        Workspace::from_source(PRELUDE)?
    } else {
        Workspace::new()
    };
    for path in paths {
        let path = path.as_ref();
        let src = std::fs::read_to_string(path).map_err(|e| Error::Parse {
            line: 0,
            column: 0,
            message: format!("{}: {e}", path.display()),
        })?;
        ws.add_source(&src)?;
    }
    Ok(ws)
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit status with everything that should go to stdout and stderr.
pub fn run<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_ERROR
            } else {
                EXIT_TRUE
            };
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                (code, String::new(), rendered)
            } else {
                (code, rendered, String::new())
            };
        }
    };
    let result = parse_workspace(&cli.workspace, !cli.no_prelude)
        .and_then(|ws| run_command(&ws, &cli.command));
    match (result, cli.json) {
        (Ok(report), false) => (report.exit, report.text, String::new()),
        (Ok(report), true) => (
            report.exit,
            format!("{:#}\n", report.to_json()),
            String::new(),
        ),
        (Err(e), json) => {
            let message = render_error(&e);
            if json {
                let mut value = json!({
                    "verdict": Value::Null,
                    "counterexample": Value::Null,
                    "stages": Value::Null,
                    "converged_at": Value::Null,
                    "error": message,
                });
                if let Error::BudgetExceeded { sizes, .. } = &e {
                    value["stages"] = json!(sizes);
                }
                (EXIT_ERROR, format!("{value:#}\n"), String::new())
            } else {
                (EXIT_ERROR, String::new(), format!("error: {message}\n"))
            }
        }
    }
}

pub fn render_error(e: &Error) -> String {
    let mut out = e.to_string();
    let mut source = std::error::Error::source(e);
    while let Some(s) = source {
        write!(out, ": {s}").unwrap();
        source = s.source();
    }
    out
}

pub fn run_command(ws: &Workspace, command: &Command) -> kanpos::Result<Report> {
    match command {
        Command::Lan(args) => lan(ws, args),
        Command::Check(args) => check(ws, args),
        Command::Reflect(args) => reflect(ws, args),
        Command::Colimit(c) => colimit(ws, c),
        Command::Monad(m) => monad(ws, m),
        Command::Verify(args) => verify(ws, args),
    }
}

fn maps(ws: &Workspace, names: &[String]) -> kanpos::Result<Vec<MonotoneMap>> {
    names.iter().map(|n| ws.map(n)).collect()
}

fn endpoints(ws: &Workspace, name: &str) -> kanpos::Result<(String, String)> {
    let m = ws
        .maps
        .get(name)
        .ok_or_else(|| Error::UnknownName(name.to_string()))?;
    Ok((m.dom.clone(), m.cod.clone()))
}

fn describe(c: &Counterexample) -> String {
    format!(
        "{:?} at {:?} for f = {{ {} }}",
        c.failure,
        c.at,
        format_assignment(&c.f)
    )
}

fn lan(ws: &Workspace, args: &LanArgs) -> kanpos::Result<Report> {
    let h = ws.map(&args.h)?;
    let f = ws.map(&args.f)?;
    let (_, target) = endpoints(ws, &args.h)?;
    let (_, x) = endpoints(ws, &args.f)?;
    let verdict = if args.right {
        kan::greatest_extension(&h, &f)?
    } else {
        kan::least_extension(&h, &f)?
    };
    let kind = if args.right { "Ran" } else { "Lan" };
    let mut report = match &verdict {
        ExtensionVerdict::Exists { extension, strict } => {
            let ok = *strict || args.weak;
            let mut text = format_map(
                &format!("{}_{}", kind.to_lowercase(), args.f),
                &target,
                &x,
                extension,
            );
            text.push('\n');
            writeln!(
                text,
                "# {kind} exists; triangle {}",
                if *strict { "commutes" } else { "is lax" }
            )
            .unwrap();
            let mut r = Report::verdict(ok, text);
            if !ok {
                r.counterexample = Some("NotStrict".into());
            }
            r
        }
        ExtensionVerdict::NoExtension => {
            let mut r = Report::verdict(
                false,
                format!("# no monotone extension of {} along {}\n", args.f, args.h),
            );
            r.counterexample = Some("NoExtension".into());
            r
        }
        ExtensionVerdict::NoLeast => {
            let which = if args.right { "greatest" } else { "least" };
            let mut r = Report::verdict(false, format!("# extensions exist but none is {which}\n"));
            r.counterexample = Some("NoLeast".into());
            r
        }
    };
    report.text = report.text.trim_start().to_string();
    Ok(report)
}

fn subject(ws: &Workspace, name: &str) -> kanpos::Result<Subject> {
    if let Ok(p) = ws.poset(name) {
        return Ok(Subject::Object(p));
    }
    ws.map(name).map(Subject::Morphism)
}

fn report_membership(names: &[String], report: &InjectivityReport) -> Report {
    let mut text = String::new();
    for e in &report.entries {
        match e.verdict.counterexample() {
            None => writeln!(text, "{}: holds", names[e.h_index]).unwrap(),
            Some(c) => writeln!(text, "{}: fails ({})", names[e.h_index], describe(c)).unwrap(),
        }
    }
    let mut r = Report::verdict(report.holds(), text);
    r.counterexample = report
        .first_failure()
        .and_then(|e| e.verdict.counterexample())
        .map(|c| {
            format!(
                "{}: {}",
                names[report.first_failure().unwrap().h_index],
                describe(c)
            )
        });
    r
}

fn check(ws: &Workspace, args: &CheckArgs) -> kanpos::Result<Report> {
    let s = subject(ws, &args.subject)?;
    let hs = maps(ws, &args.h)?;
    let report = kan::membership(&s, &hs, args.side.into());
    Ok(report_membership(&args.h, &report))
}

fn config(budget: usize, weak: bool, stage_limit: usize) -> ReflectionConfig {
    ReflectionConfig {
        budget,
        mode: if weak { Mode::Weak } else { Mode::Strong },
        stage_limit,
    }
}

pub fn format_trace(trace: &ReflectionTrace) -> String {
    let mut out = String::new();
    for (i, stage) in trace.stages.iter().enumerate() {
        out.push_str(&format_poset(&format!("X{i}"), stage));
        out.push('\n');
        if i > 0 {
            writeln!(
                out,
                "connect {} {} : {}",
                i - 1,
                i,
                format_assignment(&trace.steps[i - 1])
            )
            .unwrap();
        }
    }
    out
}

fn dump(dir: &Path, trace: &ReflectionTrace) -> kanpos::Result<()> {
    let io = |e: std::io::Error| Error::Parse {
        line: 0,
        column: 0,
        message: format!("{}: {e}", dir.display()),
    };
    std::fs::create_dir_all(dir).map_err(io)?;
    std::fs::write(dir.join("trace.txt"), format_trace(trace)).map_err(io)
}

fn reflect(ws: &Workspace, args: &ReflectArgs) -> kanpos::Result<Report> {
    let x = ws.poset(&args.x)?;
    let hs = maps(ws, &args.h)?;
    let result =
        reflection::run_reflection_with(x, hs, config(args.budget, args.weak, args.stage_limit));
    let trace = match result {
        Ok(trace) => trace,
        Err(Error::BudgetExceeded {
            budget,
            sizes,
            trace,
        }) => {
            if let Some(dir) = &args.dump_trace {
                dump(dir, &trace)?;
            }
            return Err(Error::BudgetExceeded {
                budget,
                sizes,
                trace,
            });
        }
        Err(e) => return Err(e),
    };
    if let Some(dir) = &args.dump_trace {
        dump(dir, &trace)?;
    }
    let (object, unit) = trace.reflection().expect("run returns converged traces");
    let mut text = format_poset(&args.name, &object);
    text.push('\n');
    text.push_str(&format_map("unit", &args.x, &args.name, &unit));
    text.push('\n');
    let sizes = trace.stage_sizes();
    let k = trace.converged_at;
    writeln!(
        text,
        "# converged at stage {}; stage sizes {}",
        k.unwrap_or_default(),
        sizes
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    )
    .unwrap();
    let mut r = Report::verdict(true, text);
    r.stages = Some(sizes);
    r.converged_at = k;
    Ok(r)
}

fn square_text(name: &str, left: (&str, &str), right: (&str, &str), sq: &ColimitSquare) -> String {
    let mut text = format_poset(name, &sq.apex);
    text.push('\n');
    text.push_str(&format_map(
        &format!("{name}_left"),
        left.1,
        name,
        &sq.left_leg,
    ));
    text.push('\n');
    text.push_str(&format_map(
        &format!("{name}_right"),
        right.1,
        name,
        &sq.right_leg,
    ));
    text.push('\n');
    text
}

fn colimit(ws: &Workspace, c: &ColimitCommand) -> kanpos::Result<Report> {
    let text = match c {
        ColimitCommand::Inserter { u, v } => {
            let ins = constructions::inserter(&ws.map(u)?, &ws.map(v)?)?;
            let (dom, _) = endpoints(ws, u)?;
            format!(
                "{}\n{}\n",
                format_poset("Ins", &ins.object),
                format_map("ins", "Ins", &dom, &ins.arrow)
            )
        }
        ColimitCommand::Coinserter { u, v } => {
            let q = constructions::coinserter(&ws.map(u)?, &ws.map(v)?)?;
            let (_, cod) = endpoints(ws, u)?;
            format!(
                "{}\n{}\n",
                format_poset("Coins", &q.quotient),
                format_map("coins", &cod, "Coins", &q.projection)
            )
        }
        ColimitCommand::Pushout { f, h } => {
            let sq = constructions::pushout(&ws.map(f)?, &ws.map(h)?)?;
            let (fd, fc) = endpoints(ws, f)?;
            let (hd, hc) = endpoints(ws, h)?;
            square_text("Push", (&fd, &fc), (&hd, &hc), &sq)
        }
        ColimitCommand::Cocomma { p, q } => {
            let sq = constructions::cocomma(&ws.map(p)?, &ws.map(q)?)?;
            let (pd, pc) = endpoints(ws, p)?;
            let (qd, qc) = endpoints(ws, q)?;
            square_text("Cocomma", (&pd, &pc), (&qd, &qc), &sq)
        }
        ColimitCommand::Product { factors } => {
            let ps = factors
                .iter()
                .map(|n| ws.poset(n))
                .collect::<kanpos::Result<Vec<_>>>()?;
            let prod = constructions::product(&ps);
            let mut text = format_poset("Prod", &prod.object);
            text.push('\n');
            for (i, (name, pr)) in factors.iter().zip(&prod.projections).enumerate() {
                text.push_str(&format_map(&format!("pr{i}"), "Prod", name, pr));
                text.push('\n');
            }
            text
        }
        ColimitCommand::Coproduct { summands } => {
            let ps = summands
                .iter()
                .map(|n| ws.poset(n))
                .collect::<kanpos::Result<Vec<_>>>()?;
            let co = constructions::coproduct(&ps);
            let mut text = format_poset("Coprod", &co.object);
            text.push('\n');
            for (i, (name, inj)) in summands.iter().zip(&co.injections).enumerate() {
                text.push_str(&format_map(&format!("in{i}"), name, "Coprod", inj));
                text.push('\n');
            }
            text
        }
    };
    Ok(Report::verdict(true, text))
}

fn set_names(p: &FinPoset, set: &kanpos::FixedBitSet) -> String {
    let names: Vec<&str> = set.ones().map(|i| p.name(i)).collect();
    format!("{{{}}}", names.join(" "))
}

fn monad(ws: &Workspace, m: &MonadCommand) -> kanpos::Result<Report> {
    match m {
        MonadCommand::Laws { x } => {
            let r = monads::monad_laws_check(&ws.poset(x)?);
            let text = format!(
                "left unit: {}\nright unit: {}\nassociativity: {}{}\n",
                r.left_unit,
                r.right_unit,
                r.associativity,
                if r.exhaustive { "" } else { " (on generators)" }
            );
            Ok(Report::verdict(r.holds(), text))
        }
        MonadCommand::Kz { x } => {
            let ok = monads::kz_check(&ws.poset(x)?);
            Ok(Report::verdict(ok, format!("T eta <= eta T: {ok}\n")))
        }
        MonadCommand::Algebra { x } => {
            let p = ws.poset(x)?;
            let t = monads::lowerset(&p);
            match monads::algebra_structure(&t) {
                Ok(alpha) => {
                    let tname = format!("T{x}");
                    let text = format!(
                        "{}\n{}\n",
                        format_poset(&tname, &t.tx),
                        format_map("alpha", &tname, x, &alpha)
                    );
                    Ok(Report::verdict(true, text))
                }
                Err(set) => {
                    let witness = set_names(&p, &set);
                    let mut r = Report::verdict(
                        false,
                        format!("# no algebra structure: {witness} has no join\n"),
                    );
                    r.counterexample = Some(witness);
                    Ok(r)
                }
            }
        }
    }
}

fn describe_failure(f: &ReflectionFailure, targets: &[String]) -> String {
    match f {
        ReflectionFailure::CandidateNotMember {
            h_index,
            counterexample,
        } => format!(
            "candidate is not Kan-injective for h #{h_index}{}",
            counterexample
                .as_ref()
                .map(|c| format!(" ({})", describe(c)))
                .unwrap_or_default()
        ),
        ReflectionFailure::TargetNotMember { target } => {
            format!("target {} is not Kan-injective", targets[*target])
        }
        ReflectionFailure::NoFactorization { target, p } => format!(
            "p = {{ {} }} into {} does not factor through the unit",
            format_assignment(p),
            targets[*target]
        ),
        ReflectionFailure::NotUnique { target, p, count } => format!(
            "p = {{ {} }} into {} has {count}+ factorizations",
            format_assignment(p),
            targets[*target]
        ),
    }
}

fn verify(ws: &Workspace, args: &VerifyArgs) -> kanpos::Result<Report> {
    let x = ws.poset(&args.x)?;
    let hs = maps(ws, &args.h)?;
    let targets: Vec<Arc<FinPoset>> = args
        .targets
        .iter()
        .map(|t| ws.poset(t))
        .collect::<kanpos::Result<_>>()?;
    let unit = match &args.unit {
        Some(u) => {
            let unit = ws.map(u)?;
            if **unit.dom() != *x {
                return Err(Error::DomainMismatch);
            }
            unit
        }
        None => {
            let trace = reflection::run_reflection(x, hs.clone(), args.budget, Mode::Strong)?;
            trace.reflection().expect("run returns converged traces").1
        }
    };
    Ok(match oracles::verify_reflection(&unit, &hs, &targets) {
        Ok(()) => Report::verdict(
            true,
            format!("reflection verified against {} target(s)\n", targets.len()),
        ),
        Err(f) => {
            let why = describe_failure(&f, &args.targets);
            let mut r = Report::verdict(false, format!("rejected: {why}\n"));
            r.counterexample = Some(why);
            r
        }
    })
}
