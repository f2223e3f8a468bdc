use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dpdelta::catalog::{self, default_catalog_dir, find_case, verify_all, verify_case, CaseRecord};
use dpdelta::config::{self, SurfaceConfig};
use dpdelta::delta::{flag_report_from, s_from, s_w_from, FlagReport};
use dpdelta::oracle::random_equivalence;
use dpdelta::threefold::{evaluate_table, kstability_verdict, main_theorem_delta, parse_singularities};
use dpdelta::zariski::parametric_decompose;
use dpdelta::{Error, Result};
use serde_json::json;

#[derive(Parser)]
#[command(name = "dpdelta", version, about = "Exact delta-invariant computations on degree one del Pezzo surfaces")]
struct Cli {
    /// Catalog directory (defaults to $DPDELTA_CATALOG, then ./catalog)
    #[arg(long, global = true)]
    catalog: Option<PathBuf>,
    /// Emit JSON instead of text
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Source {
    /// Configuration file
    #[arg(long, conflicts_with = "case")]
    config: Option<PathBuf>,
    /// Catalog case; the config is the first one listed for the flag
    #[arg(long)]
    case: Option<String>,
    /// Config reference inside the case (file name or blowup:<id>)
    #[arg(long, requires = "case")]
    variant: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Chamber decomposition of -K - vF
    Decompose {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        flag: String,
    },
    /// S-invariant of a flag curve
    S {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        flag: String,
    },
    /// S(W;P) for a point on the flag curve
    Sw {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        flag: String,
        #[arg(long)]
        point: String,
    },
    /// Flag reports and certified delta of a catalog case
    DeltaCase {
        #[arg(long)]
        case: String,
    },
    /// Check catalog cases against their recorded values
    Verify {
        #[arg(long, conflicts_with = "case")]
        all: bool,
        #[arg(long)]
        case: Option<String>,
    },
    /// Delta by singularity type, e.g. "A2:cusp+4A1:nodal"; no argument prints the table
    Table {
        #[arg(long)]
        singularities: Option<String>,
    },
    /// Blow up a smooth configuration at one of its points
    Blowup {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        point: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the sweep engine with subset enumeration at random v
    Oracle {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        flag: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

enum Outcome {
    Ok,
    Failed,
}

fn catalog_dir(cli: &Cli) -> PathBuf {
    cli.catalog.clone().unwrap_or_else(default_catalog_dir)
}

fn resolve(cli: &Cli, src: &Source, flag: &str) -> Result<SurfaceConfig> {
    if let Some(p) = &src.config {
        return config::load(p);
    }
    let Some(name) = &src.case else {
        return Err(Error::Precondition("one of --config or --case is required".into()));
    };
    let case = find_case(&catalog_dir(cli), name)?;
    let mut configs = case.resolve_configs()?;
    let key = match &src.variant {
        Some(v) => v.clone(),
        None => case
            .flags
            .iter()
            .find(|f| f.flag == flag)
            .and_then(|f| f.configs.first().cloned())
            .unwrap_or_else(|| case.base_config.clone()),
    };
    configs.remove(&key).ok_or_else(|| Error::Schema(format!("case {} has no config {key}", case.name)))
}

fn print_json(v: &impl serde::Serialize) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn print_report(r: &FlagReport) {
    println!("flag {}: A = {}, S = {}, A/S = {}", r.flag, r.a, r.s, r.upper_delta);
    for p in &r.point_rows {
        println!("  point {}: A = {}, S_W = {}, ratio = {}", p.point, p.a_o, p.s_w, p.ratio);
    }
    let eq = if r.certified_equal { " (equal)" } else { "" };
    println!("  lower bound {}{eq}", r.lower_delta);
}

fn delta_case(cli: &Cli, name: &str) -> Result<Outcome> {
    let case: CaseRecord = find_case(&catalog_dir(cli), name)?;
    let data = catalog::compute_case(&case)?;
    let mut reports = vec![];
    for (i, c, d) in &data.decomps {
        let cfg = &data.configs[c];
        let pts = case.flags[*i].points.iter().map(|p| cfg.point(p)).collect::<Result<Vec<_>>>()?;
        reports.push(flag_report_from(cfg, d, &pts)?);
    }
    let delta = dpdelta::delta::certify(&case.name, &reports);
    if cli.json {
        print_json(&json!({
            "case": case.name,
            "reports": reports,
            "delta": delta.as_ref().ok(),
            "error": delta.as_ref().err().map(|e| e.to_string()),
        }));
    } else {
        reports.iter().for_each(print_report);
        match &delta {
            Ok(d) => println!("delta({}) = {d}", case.name),
            Err(e) => println!("{e}"),
        }
    }
    Ok(if delta.is_ok() { Outcome::Ok } else { Outcome::Failed })
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Decompose { src, flag } => {
            let cfg = resolve(cli, src, flag)?;
            let d = parametric_decompose(&cfg, flag)?;
            if cli.json {
                print_json(&d);
            } else {
                print!("{d}");
            }
        }
        Command::S { src, flag } => {
            let cfg = resolve(cli, src, flag)?;
            let d = parametric_decompose(&cfg, flag)?;
            let s = s_from(&d, &cfg.norm);
            if cli.json {
                print_json(&json!({ "flag": flag, "S": s, "A": cfg.discrepancy_of(flag) }));
            } else {
                println!("S({flag}) = {s}");
            }
        }
        Command::Sw { src, flag, point } => {
            let cfg = resolve(cli, src, flag)?;
            let p = cfg.point(point)?;
            if p.on_curve != *flag {
                return Err(Error::Precondition(format!("point {point} lies on {}, not {flag}", p.on_curve)));
            }
            let d = parametric_decompose(&cfg, flag)?;
            let s_w = s_w_from(&d, p, &cfg.norm);
            let h = dpdelta::delta::h_from(&d, p);
            if cli.json {
                print_json(&json!({ "flag": flag, "point": point, "S_W": s_w, "A": p.a_o(), "h": h.pieces() }));
            } else {
                println!("h(v) =\n{h}");
                println!("S(W;{point}) = {s_w}");
            }
        }
        Command::DeltaCase { case } => return delta_case(cli, case),
        Command::Verify { all, case } => {
            let root = catalog_dir(cli);
            let summary = match (all, case) {
                (_, Some(name)) => {
                    let c = find_case(&root, name)?;
                    catalog::CatalogSummary { cases: vec![verify_case(&c)], load_errors: vec![] }
                }
                (true, None) => verify_all(&root),
                (false, None) => return Err(Error::Precondition("verify needs --all or --case".into())),
            };
            if !summary.load_errors.is_empty() && summary.cases.is_empty() {
                return Err(Error::Schema(summary.load_errors.join("; ")));
            }
            if cli.json {
                print_json(&summary);
            } else {
                for c in &summary.cases {
                    print!("{c}");
                }
                for e in &summary.load_errors {
                    println!("load error: {e}");
                }
                if summary.cases.len() > 1 {
                    let n = summary.cases.iter().filter(|c| c.passed()).count();
                    println!("{n}/{} cases pass", summary.cases.len());
                }
            }
            return Ok(if summary.passed() { Outcome::Ok } else { Outcome::Failed });
        }
        Command::Table { singularities: Some(s) } => {
            let d = main_theorem_delta(&parse_singularities(s)?)?;
            let verdict = kstability_verdict(&d);
            if cli.json {
                print_json(&json!({ "singularities": s, "delta": d, "verdict": verdict }));
            } else {
                println!("{d}");
            }
        }
        Command::Table { singularities: None } => {
            let cells = evaluate_table()?;
            let ok = cells.iter().all(|c| c.consistent());
            if cli.json {
                print_json(&cells);
            } else {
                for c in &cells {
                    let cond = if c.condition.is_empty() { String::new() } else { format!(" ({})", c.condition) };
                    let mark = if c.consistent() { "" } else { "  MISMATCH" };
                    println!("{}{cond}: {}{mark}", c.types, c.printed);
                }
            }
            return Ok(if ok { Outcome::Ok } else { Outcome::Failed });
        }
        Command::Blowup { config: path, point, out } => {
            let cfg = config::load(path)?;
            let res = dpdelta::blowup::blowup(&cfg, cfg.point(point)?)?;
            let text = config::to_json(&res.config);
            match out {
                Some(o) => {
                    config::save(&res.config, o)?;
                    if !cli.json {
                        println!("{} with A = {} written to {}", res.e_p_name, res.a_e_p, o.display());
                    }
                }
                None => print!("{text}"),
            }
        }
        Command::Oracle { src, flag, trials, seed } => {
            let cfg = resolve(cli, src, flag)?;
            let rep = random_equivalence(&cfg, flag, *trials, *seed)?;
            if cli.json {
                print_json(&rep);
            } else {
                println!("{rep}");
            }
            return Ok(if rep.ok() { Outcome::Ok } else { Outcome::Failed });
        }
    }
    Ok(Outcome::Ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
