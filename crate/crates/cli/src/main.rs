//! Command-line surface for the Siegel form evaluator.
//!
//! Subcommands: `eval` (Igusa values at a point), `coeffs` (build or show
//! coefficient tables), `reduce` (fundamental-domain reduction), `bound`
//! (the truncation/precision plan without evaluating), and `verify` (the
//! self-check suites).
//!
//! Points are entered as six exact decimal literals: re/im of tau1, z,
//! tau2. Numeric output is always decimal strings, never binary floats;
//! JSON mode (`--json`) emits the same data with stable keys. Exit codes:
//! 0 success, 1 certification/verification failure, 2 usage error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use igusa_core::bounds::{make_plan, BoundParams};
use igusa_core::cnum::{decimal_string, digits_to_bits, parse_decimal, CNum};
use igusa_core::evaluator::igusa;
use igusa_core::point::{reduce, SiegelPoint};
use igusa_core::tables::{CoeffTable, FormId, TableStore};
use igusa_core::verify::{
    bound_domination, denominator_discipline, oracle_equivalence, spezialschar_consistency,
};
use igusa_core::waldspurger::ratio_check;

#[derive(Parser)]
#[command(
    name = "igusa",
    version,
    about = "Genus-2 Siegel modular forms and Igusa functions"
)]
struct Cli {
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Table cache directory (default: $IGUSA_CACHE_DIR if set).
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct PointArgs {
    /// Six decimal literals: re(tau1) im(tau1) re(z) im(z) re(tau2) im(tau2).
    #[arg(num_args = 6, value_names = ["RE_T1", "IM_T1", "RE_Z", "IM_Z", "RE_T2", "IM_T2"])]
    point: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the Igusa functions j1, j2, j3 at a point.
    Eval {
        #[command(flatten)]
        point: PointArgs,
        /// Requested certified decimal digits.
        #[arg(long, default_value_t = 50)]
        digits: u32,
        /// Override the trace bound B instead of solving the tail
        /// inequality.
        #[arg(long)]
        trace_bound: Option<i64>,
    },
    /// Build (or load from cache) a coefficient table and print rows.
    Coeffs {
        /// Which form: e4, e6, e10, e12, chi10, chi12.
        #[arg(long)]
        form: String,
        /// Largest discriminant value N = 4ac - b^2 to tabulate.
        #[arg(long)]
        nmax: i64,
        /// Largest rank-1 trace to tabulate.
        #[arg(long, default_value_t = 0)]
        tmax: i64,
        /// Print only the row for this N (default: the whole table).
        #[arg(long)]
        row: Option<i64>,
    },
    /// Reduce a point towards the fundamental domain.
    Reduce {
        #[command(flatten)]
        point: PointArgs,
    },
    /// Show the truncation/precision plan for a point without evaluating.
    Bound {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, default_value_t = 1)]
        digits: u32,
    },
    /// Run the self-check suites.
    Verify {
        /// all, oracle, denominators, bounds, waldspurger, consistency.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Range ceiling for the oracle/denominator/bound suites.
        #[arg(long, default_value_t = 500)]
        nmax: i64,
    },
}

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cache_dir = cli
        .cache
        .clone()
        .or_else(|| std::env::var_os("IGUSA_CACHE_DIR").map(PathBuf::from));
    match run(cli, cache_dir) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}

enum CliError {
    Usage(String),
    Failure(String),
}

impl From<igusa_core::Error> for CliError {
    fn from(e: igusa_core::Error) -> CliError {
        use igusa_core::Error::*;
        match e {
            BadPointLiteral(_)
            | NotInUpperHalfPlane
            | UnsupportedWeight(_)
            | InputPrecision { .. }
            | NegativeDiscriminant(_)
            | NotSemiDefinite { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Failure(e.to_string()),
        }
    }
}

/// Parse the six point literals at a working precision that comfortably
/// covers both the stated digits and the requested output digits.
/// Returns the point and the certified-digit cap the literals support.
fn parse_point(args: &PointArgs, want_digits: u32) -> Result<(SiegelPoint, Option<u32>), CliError> {
    if args.point.len() != 6 {
        return Err(CliError::Usage(
            "a point needs exactly six decimal literals".into(),
        ));
    }
    let mut stated_min = u32::MAX;
    let work_digits = want_digits.max(40) + 20;
    let bits = digits_to_bits(work_digits);
    let mut vals = Vec::with_capacity(6);
    for s in &args.point {
        let (v, stated) = parse_decimal(s, bits)?;
        stated_min = stated_min.min(stated);
        vals.push(v);
    }
    let point = SiegelPoint::new(
        CNum::from_parts(vals[0].clone(), vals[1].clone()),
        CNum::from_parts(vals[2].clone(), vals[3].clone()),
        CNum::from_parts(vals[4].clone(), vals[5].clone()),
        work_digits,
    )?;
    let cap = if stated_min == u32::MAX {
        None
    } else {
        Some(stated_min)
    };
    Ok((point, cap))
}

fn cnum_strings(v: &CNum, digits: usize) -> (String, String) {
    (decimal_string(&v.re, digits), decimal_string(&v.im, digits))
}

fn print_complex(name: &str, v: &CNum, digits: usize) {
    let (re, im) = cnum_strings(v, digits);
    if v.im.to_f64().abs() < 1e-300 {
        println!("{name} = {re}");
    } else {
        println!("{name} = {re} + {im} i");
    }
}

fn run(cli: Cli, cache_dir: Option<PathBuf>) -> Result<ExitCode, CliError> {
    match &cli.command {
        Command::Eval {
            point,
            digits,
            trace_bound,
        } => {
            let (p, cap) = parse_point(point, *digits)?;
            if let Some(c) = cap {
                eprintln!("note: input literals carry {c} significant digits");
            }
            let mut store = TableStore::new(cache_dir);
            let out = igusa(&p, *digits, cap, &mut store, *trace_bound)?;
            let k = *digits as usize;
            if cli.json {
                let (j1re, j1im) = cnum_strings(&out.values.j1, k);
                let (j2re, j2im) = cnum_strings(&out.values.j2, k);
                let (j3re, j3im) = cnum_strings(&out.values.j3, k);
                let json = serde_json::json!({
                    "j1": {"re": j1re, "im": j1im},
                    "j2": {"re": j2re, "im": j2im},
                    "j3": {"re": j3re, "im": j3im},
                    "certified_digits": out.values.certified_digits,
                    "plan": {
                        "delta": format!("{:.6}", out.plan.delta.to_f64()),
                        "n": out.plan.n,
                        "certified": out.plan.certified,
                        "chi12_gain": out.plan.chi12_gain,
                        "l": out.plan.l,
                        "trace_bound": out.plan.b,
                        "coeff_bound_digits": out.plan.coeff_bound_digits,
                        "point_digits": out.plan.point_digits,
                    },
                    "reduction": out.reduction.0,
                });
                println!("{}", serde_json::to_string_pretty(&json).expect("json"));
            } else {
                print_complex("j1", &out.values.j1, k);
                print_complex("j2", &out.values.j2, k);
                print_complex("j3", &out.values.j3, k);
                println!("certified digits: {}", out.values.certified_digits);
                println!(
                    "plan: delta >= {:.6}, n = {}, certified = {}, l = {}, B = {}, point digits = {}",
                    out.plan.delta.to_f64(),
                    out.plan.n,
                    out.plan.certified,
                    out.plan.l,
                    out.plan.b,
                    out.plan.point_digits
                );
                println!("reduction matrix: {:?}", out.reduction.0);
            }
            if !out.plan.certified {
                eprintln!("error: |chi10| lower bound is best-effort, not certified");
                return Ok(ExitCode::from(EXIT_FAILURE));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Coeffs {
            form,
            nmax,
            tmax,
            row,
        } => {
            let form = FormId::parse(form)
                .ok_or_else(|| CliError::Usage(format!("unknown form {form}")))?;
            if *nmax < 0 {
                return Err(CliError::Usage("nmax must be >= 0".into()));
            }
            let mut store = TableStore::new(cache_dir);
            let table = store.get(form, *nmax, *tmax)?;
            match row {
                Some(n) => {
                    let entries = table.row(*n).map_err(CliError::from)?;
                    if cli.json {
                        let vals: Vec<String> = entries.iter().map(|v| v.to_string()).collect();
                        println!(
                            "{}",
                            serde_json::json!({"form": form.name(), "n": n, "row": vals})
                        );
                    } else {
                        for (i, v) in entries.iter().enumerate() {
                            if v.cmp0() != std::cmp::Ordering::Equal {
                                println!("P {} {} {}/{}", n, i + 1, v.numer(), v.denom());
                            }
                        }
                    }
                }
                None => {
                    print!("{}", table_text(table, *nmax, *tmax)?);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Reduce { point } => {
            let (p, _) = parse_point(point, 40)?;
            let red = reduce(&p)?;
            let digits = 40usize;
            let delta = red.point.delta().map_err(CliError::from)?;
            if cli.json {
                let (t1re, t1im) = cnum_strings(&red.point.tau1, digits);
                let (zre, zim) = cnum_strings(&red.point.z, digits);
                let (t2re, t2im) = cnum_strings(&red.point.tau2, digits);
                println!(
                    "{}",
                    serde_json::to_string_pretty(&serde_json::json!({
                        "tau1": {"re": t1re, "im": t1im},
                        "z": {"re": zre, "im": zim},
                        "tau2": {"re": t2re, "im": t2im},
                        "delta": format!("{:.10}", delta.to_f64()),
                        "matrix": red.matrix.0,
                        "converged": red.converged,
                    }))
                    .expect("json")
                );
            } else {
                print_complex("tau1", &red.point.tau1, digits);
                print_complex("z", &red.point.z, digits);
                print_complex("tau2", &red.point.tau2, digits);
                println!("delta >= {:.10}", delta.to_f64());
                println!("matrix: {:?}", red.matrix.0);
                if !red.converged {
                    eprintln!("warning: iteration cap reached; best point so far");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Bound { point, digits } => {
            let (p, _) = parse_point(point, *digits)?;
            let red = reduce(&p)?;
            let mut store = TableStore::new(cache_dir);
            let cap = igusa_core::bounds::CERTIFICATION_TRACE_CAP;
            let chi10 = store.get(FormId::Chi10, cap * cap, cap)?.clone();
            let chi12 = store.get(FormId::Chi12, cap * cap, cap)?.clone();
            let plan = make_plan(&red.point, *digits, &chi10, &chi12)?;
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&serde_json::json!({
                        "delta": format!("{:.10}", plan.delta.to_f64()),
                        "n": plan.n,
                        "certified": plan.certified,
                        "chi12_gain": plan.chi12_gain,
                        "l": plan.l,
                        "trace_bound": plan.b,
                        "coeff_bound_digits": plan.coeff_bound_digits,
                        "point_digits": plan.point_digits,
                        "certification_traces": plan.t0,
                    }))
                    .expect("json")
                );
            } else {
                println!("delta >= {:.10}", plan.delta.to_f64());
                println!(
                    "chi10 lower bound: 10^-{} (certified: {})",
                    plan.n, plan.certified
                );
                println!("chi12 gain: {} digits per factor", plan.chi12_gain);
                println!("working digits l = {}", plan.l);
                println!("trace bound B = {}", plan.b);
                println!("coefficient bound digits = {}", plan.coeff_bound_digits);
                println!("point precision = {} digits", plan.point_digits);
            }
            if !plan.certified {
                return Ok(ExitCode::from(EXIT_FAILURE));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite, nmax } => {
            let mut all_pass = true;
            let run_oracle = matches!(suite.as_str(), "all" | "oracle");
            let run_denoms = matches!(suite.as_str(), "all" | "denominators");
            let run_bounds = matches!(suite.as_str(), "all" | "bounds");
            let run_wald = matches!(suite.as_str(), "all" | "waldspurger");
            let run_consistency = matches!(suite.as_str(), "all" | "consistency");
            if !(run_oracle || run_denoms || run_bounds || run_wald || run_consistency) {
                return Err(CliError::Usage(format!("unknown suite {suite}")));
            }
            if run_oracle {
                let r = oracle_equivalence((*nmax).max(0) as usize)?;
                report_line("oracle equivalence", r.passes(), &mut all_pass);
            }
            if run_denoms {
                let r = denominator_discipline((*nmax).min(1000))?;
                report_line("denominator discipline", r.passes(), &mut all_pass);
            }
            if run_bounds {
                let r = bound_domination(
                    (*nmax).clamp(4, 2000),
                    BoundParams {
                        epsilon: 0.1,
                        eta: 1.45,
                    },
                )?;
                report_line("bound domination", r.passes(), &mut all_pass);
            }
            if run_wald {
                for form in [FormId::Chi10, FormId::Chi12] {
                    let r = ratio_check(form, &[-3, -4, -7, -8])?;
                    println!(
                        "waldspurger {}: max ratio {:.6e} (bound {:.0}), spread {:.2e}",
                        form.name(),
                        r.max_ratio.to_f64(),
                        r.bound,
                        r.relative_spread.to_f64()
                    );
                    report_line(
                        &format!("waldspurger {}", form.name()),
                        r.passes(),
                        &mut all_pass,
                    );
                }
            }
            if run_consistency {
                let r = spezialschar_consistency(60.min(*nmax), 20.min(*nmax))?;
                println!(
                    "consistency: chi10 checked {} pairs, chi12 checked {} pairs (E6^2 reading)",
                    r.chi10_checked, r.chi12_checked
                );
                report_line("spezialschar consistency", r.passes(), &mut all_pass);
            }
            if all_pass {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(EXIT_FAILURE))
            }
        }
    }
}

fn report_line(what: &str, passed: bool, all_pass: &mut bool) {
    if passed {
        println!("{what}: PASS");
    } else {
        println!("{what}: FAIL");
        *all_pass = false;
    }
}

/// The table body in the save format (header, C/D/P lines), for display.
fn table_text(table: &CoeffTable, nmax: i64, tmax: i64) -> Result<String, CliError> {
    use std::fmt::Write as _;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "SIEGEL-COEFFS v1 {} {} {} {}",
        table.form().name(),
        table.form().weight(),
        nmax,
        tmax
    );
    let c = table.constant();
    let _ = writeln!(s, "C {}/{}", c.numer(), c.denom());
    for t in 1..=tmax.min(table.tmax()) {
        let v = table.degenerate(t).map_err(CliError::from)?;
        if v.cmp0() != std::cmp::Ordering::Equal {
            let _ = writeln!(s, "D {} {}/{}", t, v.numer(), v.denom());
        }
    }
    for n in 1..=nmax.min(table.nmax()) {
        for (i, v) in table.row(n).map_err(CliError::from)?.iter().enumerate() {
            if v.cmp0() != std::cmp::Ordering::Equal {
                let _ = writeln!(s, "P {} {} {}/{}", n, i + 1, v.numer(), v.denom());
            }
        }
    }
    Ok(s)
}
