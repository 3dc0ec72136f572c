//! `hecke`: command-line access to the reduction engine.
//!
//! Exit codes: 0 on success, 1 for domain errors (or failed checks), 2 for
//! usage and parse errors. Without a positional input, inputs are read one
//! per line from stdin; two-input commands take `first | second` lines.

mod commands;

use std::io::{self, BufRead, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use commands::Output;
use hecke_core::{Error, FieldContext, FieldOptions, Result};

#[derive(Parser)]
#[command(
    name = "hecke",
    version,
    about = "Reduction theory of lambda-forms for Hecke groups"
)]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Opts {
    /// Index of the Hecke group G_p.
    #[arg(long, global = true)]
    p: Option<u32>,
    /// Emit JSON (one value per input line).
    #[arg(long, global = true)]
    json: bool,
    /// Iteration bound for expansions, reductions and orbits.
    #[arg(long, global = true, default_value_t = hecke_core::DEFAULT_MAX_STEPS as u64,
          value_parser = clap::value_parser!(u64).range(1..))]
    max_steps: u64,
    /// Starting precision in bits for sign determination.
    #[arg(long, global = true, default_value_t = 64)]
    precision_start: u32,
    /// Largest accepted p.
    #[arg(long, global = true, default_value_t = 40)]
    max_p: u32,
    /// Worker threads for batch input.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Group relations.
    #[command(subcommand)]
    Group(GroupCmd),
    /// Lambda-continued fractions.
    #[command(subcommand)]
    Cf(CfCmd),
    /// Forms.
    #[command(subcommand)]
    Form(FormCmd),
    /// Numbers attached to forms.
    #[command(subcommand)]
    Number(NumberCmd),
    /// Simple forms and numbers.
    #[command(subcommand)]
    Simple(SimpleCmd),
    /// The map Phi_p.
    #[command(subcommand)]
    Phi(PhiCmd),
    /// Stabilizer of a hyperbolic point.
    Stabilizer {
        #[arg(allow_hyphen_values = true)]
        surd: Option<String>,
    },
}

#[derive(Subcommand)]
enum GroupCmd {
    /// Check T^2 = U^p = I and the U^k(0) chain.
    Check,
}

#[derive(Subcommand)]
enum CfCmd {
    /// Expand a surd.
    Expand {
        #[arg(allow_hyphen_values = true)]
        surd: Option<String>,
    },
    /// Evaluate a continued fraction.
    Eval {
        #[arg(allow_hyphen_values = true)]
        cf: Option<String>,
    },
}

#[derive(Subcommand)]
enum FormCmd {
    /// Reduce a form, printing each step.
    Reduce {
        #[arg(allow_hyphen_values = true)]
        form: Option<String>,
    },
    /// The reduced cycle of a form's class.
    Cycle {
        #[arg(allow_hyphen_values = true)]
        form: Option<String>,
    },
    /// Test two forms for equivalence.
    Equiv {
        #[arg(allow_hyphen_values = true)]
        first: Option<String>,
        #[arg(allow_hyphen_values = true)]
        second: Option<String>,
    },
    /// Act on a form by a matrix or a word.
    Act {
        #[arg(allow_hyphen_values = true)]
        form: Option<String>,
        #[arg(allow_hyphen_values = true)]
        by: Option<String>,
    },
    /// The form of a hyperbolic point.
    OfNumber {
        #[arg(allow_hyphen_values = true)]
        surd: Option<String>,
    },
}

#[derive(Subcommand)]
enum NumberCmd {
    /// The first root of a form.
    OfForm {
        #[arg(allow_hyphen_values = true)]
        form: Option<String>,
    },
}

#[derive(Subcommand)]
enum SimpleCmd {
    /// The simple forms and numbers of a form's class.
    Set {
        #[arg(allow_hyphen_values = true)]
        form: Option<String>,
    },
}

#[derive(Subcommand)]
enum PhiCmd {
    /// One step of Phi_p.
    Apply {
        #[arg(allow_hyphen_values = true)]
        surd: Option<String>,
    },
    /// The orbit of a simple number.
    Orbit {
        #[arg(allow_hyphen_values = true)]
        surd: Option<String>,
    },
}

type Handler = Box<dyn Fn(&FieldContext, &str) -> Result<Output> + Sync>;
type Single = Box<dyn Fn(&FieldContext) -> Result<Output>>;

/// A handler plus the positional inputs, if any were given.
enum Job {
    Once(Single),
    Lines(Handler, Option<String>),
}

fn unary(
    input: Option<String>,
    f: impl Fn(&FieldContext, &str) -> Result<Output> + Sync + 'static,
) -> Job {
    Job::Lines(Box::new(f), input)
}

fn binary(
    a: Option<String>,
    b: Option<String>,
    f: impl Fn(&FieldContext, &str, &str) -> Result<Output> + Sync + 'static,
) -> std::result::Result<Job, String> {
    let h: Handler = Box::new(move |ctx, line| {
        let (x, y) = commands::split_pair(line)?;
        f(ctx, x, y)
    });
    match (a, b) {
        (Some(x), Some(y)) => Ok(Job::Lines(h, Some(format!("{x}|{y}")))),
        (None, None) => Ok(Job::Lines(h, None)),
        _ => Err("give both inputs, or none to read 'first | second' lines from stdin".into()),
    }
}

fn job(cmd: Cmd, max: usize) -> std::result::Result<Job, String> {
    use commands as c;
    Ok(match cmd {
        Cmd::Group(GroupCmd::Check) => Job::Once(Box::new(c::group_check)),
        Cmd::Cf(CfCmd::Expand { surd }) => unary(surd, move |k, s| c::cf_expand(k, s, max)),
        Cmd::Cf(CfCmd::Eval { cf }) => unary(cf, move |k, s| c::cf_eval(k, s, max)),
        Cmd::Form(FormCmd::Reduce { form }) => unary(form, move |k, s| c::form_reduce(k, s, max)),
        Cmd::Form(FormCmd::Cycle { form }) => unary(form, move |k, s| c::form_cycle(k, s, max)),
        Cmd::Form(FormCmd::Equiv { first, second }) => {
            binary(first, second, move |k, a, b| c::form_equiv(k, a, b, max))?
        }
        Cmd::Form(FormCmd::Act { form, by }) => binary(form, by, c::form_act)?,
        Cmd::Form(FormCmd::OfNumber { surd }) => {
            unary(surd, move |k, s| c::form_of_number(k, s, max))
        }
        Cmd::Number(NumberCmd::OfForm { form }) => unary(form, c::number_of_form),
        Cmd::Simple(SimpleCmd::Set { form }) => unary(form, move |k, s| c::simple(k, s, max)),
        Cmd::Phi(PhiCmd::Apply { surd }) => unary(surd, c::phi_apply_cmd),
        Cmd::Phi(PhiCmd::Orbit { surd }) => unary(surd, move |k, s| c::phi_orbit_cmd(k, s, max)),
        Cmd::Stabilizer { surd } => unary(surd, move |k, s| c::stabilizer_cmd(k, s, max)),
    })
}

fn exit_code(e: &Error) -> u8 {
    if e.is_input_error() {
        2
    } else {
        1
    }
}

/// Prints one result and returns its exit code.
fn emit(out: &mut impl Write, json: bool, line: Option<usize>, r: &Result<Output>) -> u8 {
    match r {
        Ok(o) => {
            let s = if json {
                o.json.to_string()
            } else {
                o.text.clone()
            };
            let _ = writeln!(out, "{s}");
            u8::from(o.failed)
        }
        Err(e) => {
            match line {
                Some(n) => eprintln!("line {n}: error: {e}"),
                None => eprintln!("error: {e}"),
            }
            exit_code(e)
        }
    }
}

fn run_lines(ctx: &FieldContext, h: &Handler, opts: &Opts) -> io::Result<u8> {
    let mut lines = Vec::new();
    for (i, l) in io::stdin().lock().lines().enumerate() {
        let l = l?;
        let t = l.trim();
        if !t.is_empty() && !t.starts_with('#') {
            lines.push((i + 1, t.to_string()));
        }
    }
    let f = |(_, l): &(usize, String)| h(ctx, l);
    let results = match opts.jobs {
        Some(n) => fan_out(n as usize, &lines, f),
        None => hecke_core::parallel::seq_map(&lines, f),
    };
    let mut out = io::stdout().lock();
    let mut code = 0;
    for ((n, _), r) in lines.iter().zip(&results) {
        code = code.max(emit(&mut out, opts.json, Some(*n), r));
    }
    Ok(code)
}

#[cfg(feature = "parallel")]
fn fan_out<T, R, F>(n: usize, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
        Ok(pool) => pool.install(|| hecke_core::parallel::par_map(items, f)),
        Err(_) => hecke_core::parallel::seq_map(items, f),
    }
}

#[cfg(not(feature = "parallel"))]
fn fan_out<T, R, F>(_n: usize, items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    hecke_core::parallel::seq_map(items, f)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let Some(p) = cli.opts.p else {
        eprintln!("error: --p is required");
        return ExitCode::from(2);
    };
    let opts = FieldOptions {
        max_p: cli.opts.max_p,
        precision_start: cli.opts.precision_start,
    };
    let ctx = match FieldContext::with_options(p, opts) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let max = usize::try_from(cli.opts.max_steps).unwrap_or(usize::MAX);
    let job = match job(cli.cmd, max) {
        Ok(j) => j,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let code = match job {
        Job::Once(f) => emit(&mut io::stdout().lock(), cli.opts.json, None, &f(&ctx)),
        Job::Lines(h, Some(input)) => emit(
            &mut io::stdout().lock(),
            cli.opts.json,
            None,
            &h(&ctx, &input),
        ),
        Job::Lines(h, None) => match run_lines(&ctx, &h, &cli.opts) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: reading stdin: {e}");
                2
            }
        },
    };
    ExitCode::from(code)
}
