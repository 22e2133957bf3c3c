//! Command-line surface: cohomology of lattice files, flasque checks,
//! resolution verification, R-equivalence class counts, connector
//! polynomials, and the aggregate `verify-paper` run over the scenario
//! catalog.
//!
//! Exit codes: 0 success/verified, 1 a mathematical check came back false,
//! 2 input error.

use clap::{Args, Parser, Subcommand};
use flasque_core::arith::{BaseField, FieldTowerSpec, TowerVariant};
use flasque_core::brauer::{dihedral_connector, r_count};
use flasque_core::family::{build_xq, build_xt};
use flasque_core::gmod::Subgroup;
use flasque_core::tate::{check_flasque_resolution, is_flasque, tate_cohomology};
use flasque_core::GLatticeMap;
use flasque_kit::catalog::{
    builtin_catalog, catalog_from_value, catalog_to_value, run_scenario, Scenario,
};
use flasque_kit::json;
use serde_json::{json, Value};

const EXIT_OK: i32 = 0;
const EXIT_FALSE: i32 = 1;
const EXIT_INPUT: i32 = 2;

#[derive(Parser)]
#[command(
    name = "flasque-kit",
    version,
    about = "Tate cohomology of G-lattices, flasque resolutions, and R-equivalence class counts"
)]
struct Cli {
    /// Emit machine-readable JSON instead of text
    #[arg(long, global = true)]
    json: bool,
    /// Suppress detail lines; print verdicts only
    #[arg(long, global = true)]
    quiet: bool,
    /// Override the built-in scenario catalog with a JSON file
    #[arg(long, global = true, value_name = "FILE")]
    catalog: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tate cohomology of a lattice file at selected subgroups
    Tate(TateArgs),
    /// Test whether a lattice file is flasque (exit 1 with a witness if not)
    FlasqueCheck(FlasqueArgs),
    /// Verify a flasque resolution, built-in (--s0) or from files
    Resolution(ResolutionArgs),
    /// Count R-equivalence classes for a tower
    Rclasses(RclassesArgs),
    /// Connector polynomial pair for endpoints (a, b)
    Connector(ConnectorArgs),
    /// Print the scenario catalog
    Catalog,
    /// Run every scenario in the catalog
    VerifyPaper,
}

#[derive(Args)]
struct TateArgs {
    /// Lattice JSON file
    #[arg(long, value_name = "FILE")]
    lattice: String,
    /// "all", "full", "trivial", or a comma list of element indices
    #[arg(long, default_value = "all")]
    subgroup: String,
    /// Cohomology degree: -1, 0, or 1
    #[arg(long, allow_hyphen_values = true)]
    degree: i8,
}

#[derive(Args)]
struct FlasqueArgs {
    #[arg(long, value_name = "FILE")]
    lattice: String,
}

#[derive(Args)]
struct ResolutionArgs {
    /// Build and check the built-in family for this s0
    #[arg(long, conflicts_with_all = ["xt", "xq", "xs"])]
    s0: Option<u32>,
    /// Kernel lattice X(T) file
    #[arg(long, value_name = "FILE", requires_all = ["xq", "xs", "inclusion", "restriction"])]
    xt: Option<String>,
    /// Middle lattice X(Q) file
    #[arg(long, value_name = "FILE")]
    xq: Option<String>,
    /// Quotient lattice X(S) file
    #[arg(long, value_name = "FILE")]
    xs: Option<String>,
    /// Matrix file for X(T) -> X(Q)
    #[arg(long, value_name = "FILE")]
    inclusion: Option<String>,
    /// Matrix file for X(Q) -> X(S)
    #[arg(long, value_name = "FILE")]
    restriction: Option<String>,
}

#[derive(Args)]
struct RclassesArgs {
    /// Base field: Q, "Q(sqrt D)", or Qp:P
    #[arg(long)]
    base: String,
    /// Cyclotomic level exponent (2^s-th roots of unity)
    #[arg(long)]
    s: u32,
    /// Twist a (omit for the constant tower)
    #[arg(long, allow_hyphen_values = true)]
    a: Option<i64>,
}

#[derive(Args)]
struct ConnectorArgs {
    /// Endpoint a as an integer or fraction n/d
    #[arg(long, allow_hyphen_values = true)]
    a: String,
    /// Endpoint b as an integer or fraction n/d
    #[arg(long, allow_hyphen_values = true)]
    b: String,
}

fn main() {
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FALSE,
        Err(msg) => {
            eprintln!("error: {}", msg);
            EXIT_INPUT
        }
    };
    std::process::exit(code);
}

fn run(cli: &Cli) -> Result<bool, String> {
    match &cli.command {
        Command::Tate(args) => cmd_tate(cli, args),
        Command::FlasqueCheck(args) => cmd_flasque_check(cli, args),
        Command::Resolution(args) => cmd_resolution(cli, args),
        Command::Rclasses(args) => cmd_rclasses(cli, args),
        Command::Connector(args) => cmd_connector(cli, args),
        Command::Catalog => cmd_catalog(cli),
        Command::VerifyPaper => cmd_verify_paper(cli),
    }
}

fn load_json(path: &str) -> Result<Value, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {}", path, e))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {}", path, e))
}

fn load_lattice(path: &str) -> Result<flasque_core::GLattice, String> {
    json::lattice_from_value(&load_json(path)?).map_err(|e| format!("{}: {}", path, e))
}

fn parse_subgroup_selector(
    selector: &str,
    lattice: &flasque_core::GLattice,
) -> Result<Vec<Subgroup>, String> {
    let group = lattice.group();
    match selector {
        "all" => Ok(group.subgroups()),
        "full" => Ok(vec![(0..group.order()).collect()]),
        "trivial" => Ok(vec![vec![group.identity()]]),
        list => {
            let mut h: Subgroup = list
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|_| format!("bad index {:?}", t))
                })
                .collect::<Result<_, _>>()?;
            h.sort_unstable();
            h.dedup();
            if !group.is_subgroup(&h) {
                return Err(format!("{:?} is not a subgroup", h));
            }
            Ok(vec![h])
        }
    }
}

fn cmd_tate(cli: &Cli, args: &TateArgs) -> Result<bool, String> {
    if ![-1, 0, 1].contains(&args.degree) {
        return Err(format!("degree must be -1, 0, or 1, got {}", args.degree));
    }
    let lattice = load_lattice(&args.lattice)?;
    let subgroups = parse_subgroup_selector(&args.subgroup, &lattice)?;
    let reports: Vec<_> = subgroups
        .iter()
        .map(|h| tate_cohomology(&lattice, h, args.degree))
        .collect();
    if cli.json {
        let items: Vec<Value> = reports
            .iter()
            .map(|r| {
                json!({
                    "group": json::group_to_value(lattice.group()),
                    "subgroup": r.subgroup,
                    "degree": r.degree,
                    "result": json::abelian_group_to_value(&r.result),
                })
            })
            .collect();
        println!(
            "{}",
            serde_json::to_string_pretty(&Value::Array(items)).unwrap()
        );
    } else {
        for r in &reports {
            println!("H^{}({:?}) = {}", r.degree, r.subgroup, r.result);
        }
    }
    Ok(true)
}

fn cmd_flasque_check(cli: &Cli, args: &FlasqueArgs) -> Result<bool, String> {
    let lattice = load_lattice(&args.lattice)?;
    let evidence = is_flasque(&lattice);
    if cli.json {
        let items: Vec<Value> = evidence
            .evidence
            .iter()
            .map(|(h, g)| json!({"subgroup": h, "tate_minus1": json::abelian_group_to_value(g)}))
            .collect();
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "flasque": evidence.flasque,
                "evidence": items,
            }))
            .unwrap()
        );
    } else if evidence.flasque {
        println!(
            "flasque: H^-1(H, X) trivial for all {} subgroups",
            evidence.evidence.len()
        );
    } else if let Some((h, g)) = evidence.witness() {
        println!("not flasque: H^-1({:?}, X) = {}", h, g);
    }
    Ok(evidence.flasque)
}

fn cmd_resolution(cli: &Cli, args: &ResolutionArgs) -> Result<bool, String> {
    let (inclusion, restriction) = match (&args.s0, &args.xt) {
        (Some(s0), None) => {
            let (_, restriction) = build_xq(*s0).map_err(|e| e.to_string())?;
            let (_, inclusion) = build_xt(*s0).map_err(|e| e.to_string())?;
            (inclusion, restriction)
        }
        (None, Some(_)) => {
            let xt = load_lattice(args.xt.as_ref().unwrap())?;
            let xq = load_lattice(args.xq.as_ref().unwrap())?;
            let xs = load_lattice(args.xs.as_ref().unwrap())?;
            let inc_m = json::matrix_from_value(
                &load_json(args.inclusion.as_ref().unwrap())?,
                Some(xt.rank()),
            )
            .map_err(|e| e.to_string())?;
            let res_m = json::matrix_from_value(
                &load_json(args.restriction.as_ref().unwrap())?,
                Some(xq.rank()),
            )
            .map_err(|e| e.to_string())?;
            let inclusion = GLatticeMap::new(xt, xq.clone(), inc_m).map_err(|e| e.to_string())?;
            let restriction = GLatticeMap::new(xq, xs, res_m).map_err(|e| e.to_string())?;
            (inclusion, restriction)
        }
        _ => return Err("pass either --s0 N or the five lattice/map files".into()),
    };
    let check = check_flasque_resolution(&inclusion, &restriction);
    if cli.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&json::resolution_check_to_value(&check)).unwrap()
        );
    } else if check.pass() {
        println!(
            "resolution verified: exact, permutation middle term, dual invariants surjective, \
             kernel flasque"
        );
    } else {
        for failure in check.failures() {
            println!("FAIL: {}", failure);
        }
    }
    Ok(check.pass())
}

fn cmd_rclasses(cli: &Cli, args: &RclassesArgs) -> Result<bool, String> {
    let base: BaseField = json::parse_base(&args.base).map_err(|e| e.to_string())?;
    let variant = match args.a {
        Some(a) => TowerVariant::Twisted { a },
        None => TowerVariant::Constant,
    };
    let tower = FieldTowerSpec::new(base, args.s, variant).map_err(|e| e.to_string())?;
    let report = r_count(&tower).map_err(|e| e.to_string())?;
    if cli.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&json::rclass_report_to_value(&report)).unwrap()
        );
    } else {
        println!("r = {}", report.r);
        if !cli.quiet {
            for line in &report.trace {
                println!("  {}", line);
            }
            for (i, v) in report.representatives.iter().enumerate() {
                let body = if v.entries.is_empty() {
                    "0".to_string()
                } else {
                    v.entries
                        .iter()
                        .map(|(l, q)| format!("{}: {}", l, json::fraction_to_string(q)))
                        .collect::<Vec<_>>()
                        .join(", ")
                };
                println!("  representative {}: {{{}}}", i, body);
            }
        }
    }
    Ok(true)
}

fn cmd_connector(cli: &Cli, args: &ConnectorArgs) -> Result<bool, String> {
    let a = json::fraction_from_string(&args.a).map_err(|e| e.to_string())?;
    let b = json::fraction_from_string(&args.b).map_err(|e| e.to_string())?;
    let c = dihedral_connector(&a, &b).map_err(|e| e.to_string())?;
    if cli.json {
        let coeffs = |p: &flasque_core::brauer::Poly| -> Vec<String> {
            p.0.iter().map(json::fraction_to_string).collect()
        };
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "q": coeffs(&c.q),
                "p": coeffs(&c.p),
                "linear_factor": coeffs(&c.linear_factor),
            }))
            .unwrap()
        );
    } else {
        println!("q(t) = {}", c.q);
        println!("p(t) = {}", c.p);
    }
    Ok(true)
}

fn load_catalog(cli: &Cli) -> Result<Vec<Scenario>, String> {
    match &cli.catalog {
        None => Ok(builtin_catalog()),
        Some(path) => catalog_from_value(&load_json(path)?).map_err(|e| e.to_string()),
    }
}

fn cmd_catalog(cli: &Cli) -> Result<bool, String> {
    let scenarios = load_catalog(cli)?;
    if cli.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&catalog_to_value(&scenarios)).unwrap()
        );
    } else {
        for s in &scenarios {
            println!("{}", s.name);
        }
    }
    Ok(true)
}

fn thread_budget() -> usize {
    match std::env::var("FLASQUE_KIT_THREADS") {
        Ok(v) => v.parse().unwrap_or(1).max(1),
        Err(_) => std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
            .min(8),
    }
}

/// Runs the closure over every item on up to `threads` workers; results are
/// merged back in input order.
fn fan_out<T, R, F>(items: &[T], threads: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let threads = threads.clamp(1, items.len().max(1));
    if threads <= 1 {
        return items.iter().map(&f).collect();
    }
    let mut keyed: Vec<(usize, R)> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|w| {
                let f = &f;
                scope.spawn(move || {
                    items
                        .iter()
                        .enumerate()
                        .skip(w)
                        .step_by(threads)
                        .map(|(i, t)| (i, f(t)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("scenario worker"))
            .collect()
    });
    keyed.sort_by_key(|(i, _)| *i);
    keyed.into_iter().map(|(_, r)| r).collect()
}

fn cmd_verify_paper(cli: &Cli) -> Result<bool, String> {
    let scenarios = load_catalog(cli)?;
    let outcomes = fan_out(&scenarios, thread_budget(), run_scenario);
    let all_pass = outcomes.iter().all(|o| o.pass);
    if cli.json {
        let items: Vec<Value> = outcomes
            .iter()
            .map(|o| json!({"name": o.name, "pass": o.pass, "detail": o.detail}))
            .collect();
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({"pass": all_pass, "items": items})).unwrap()
        );
    } else {
        for o in &outcomes {
            let verdict = if o.pass { "PASS" } else { "FAIL" };
            if cli.quiet {
                println!("{}  {}", verdict, o.name);
            } else {
                println!("{}  {:<28} {}", verdict, o.name, o.detail);
            }
        }
        println!(
            "{} of {} scenarios passed",
            outcomes.iter().filter(|o| o.pass).count(),
            outcomes.len()
        );
    }
    Ok(all_pass)
}
