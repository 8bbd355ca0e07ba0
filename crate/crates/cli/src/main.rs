use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use detvol_core::diagram::{Diagram, PdCode};
use detvol_core::families::{Family, FamilySpec};
use detvol_core::hypvol::{bipyramid_volume, constants, Real};
use detvol_core::verify::{
    self, BoundReport, EnumerationReport, SweepPattern, ThresholdRule, Verdict, VerifyConfig,
};

#[derive(Parser)]
#[command(name = "detvol", version, about = "Determinants and volume bounds of alternating links")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,

    /// Worker threads for sweeps and enumeration.
    #[arg(long, env = "DETVOL_WORKERS", value_parser = clap::value_parser!(u16).range(1..), global = true)]
    workers: Option<u16>,

    /// Digits after the decimal point in table output.
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u8).range(6..=15), global = true)]
    precision: u8,

    /// Largest crossing number whose determinant is re-derived by matrix-tree.
    #[arg(long, default_value_t = 40, global = true)]
    oracle_cap: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum Rule {
    General,
    Montesinos,
}

impl From<Rule> for ThresholdRule {
    fn from(r: Rule) -> Self {
        match r {
            Rule::General => ThresholdRule::General,
            Rule::Montesinos => ThresholdRule::Montesinos,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check one link, e.g. `R(3,3,2)`, `B(2,1,3,2)`, `P(2,3,7)`, `W(5)`.
    Check { spec: String },
    /// Print the numerical constants and bipyramid volumes.
    Constants,
    /// Check every pretzel link with 3 to `--t-max` strands.
    Enumerate {
        #[arg(long, default_value_t = 6)]
        t_max: u32,
        /// Required for `--t-max` above 8; runs can take hours.
        #[arg(long)]
        allow_large: bool,
    },
    /// Check every member of the given families up to a crossing budget.
    Sweep {
        /// Family letters: R, B, P, W (comma separated).
        #[arg(long, value_delimiter = ',', required = true)]
        family: Vec<String>,
        #[arg(long)]
        sum_max: u32,
        /// Skip generated links with more crossings than this.
        #[arg(long)]
        max_crossings: Option<u64>,
    },
    /// Faces, checkerboard spanning-tree counts and twist regions of a PD code file.
    Pd { file: PathBuf },
    /// Crossing threshold above which a twist count alone certifies the inequality.
    Threshold {
        #[arg(long)]
        t: u32,
        #[arg(long, value_enum, default_value_t = Rule::General)]
        rule: Rule,
        /// Also evaluate the determinant-lower-bound certificate at this crossing number.
        #[arg(long)]
        c: Option<u64>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let cfg = VerifyConfig {
        oracle_cap: cli.oracle_cap,
        workers: cli.workers.map_or(0, usize::from),
    };
    let out = &mut io::stdout().lock();
    match &cli.command {
        Command::Check { spec } => {
            let spec: FamilySpec = spec.parse()?;
            let report = verify::check_with(&spec, &cfg)?;
            print_reports(out, cli, std::slice::from_ref(&report), false)?;
            Ok(match report.verdict {
                Verdict::BoundInconclusive => ExitCode::from(2),
                _ => ExitCode::SUCCESS,
            })
        }
        Command::Constants => {
            print_constants(out, cli)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Enumerate { t_max, allow_large } => {
            if *t_max > 8 && !allow_large {
                bail!("--t-max {t_max} can take hours; pass --allow-large to run it anyway");
            }
            if *t_max > 8 {
                eprintln!("warning: enumerating up to t = {t_max}; expect a very long run");
            }
            let report = verify::enumerate_pretzels(*t_max, &cfg)?;
            print_enumeration(out, cli, &report)?;
            Ok(if report.violations.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
        Command::Sweep {
            family,
            sum_max,
            max_crossings,
        } => {
            let families = family
                .iter()
                .map(|f| parse_family(f))
                .collect::<Result<Vec<_>>>()?;
            let pattern = SweepPattern {
                families,
                sum_max: *sum_max,
                max_crossings: *max_crossings,
            };
            let outcome = verify::sweep(&pattern, &cfg)?;
            for (spec, reason) in &outcome.skipped {
                eprintln!("skipped {spec}: {reason}");
            }
            print_reports(out, cli, &outcome.reports, true)?;
            let inconclusive = outcome
                .reports
                .iter()
                .any(|r| r.verdict == Verdict::BoundInconclusive);
            Ok(if inconclusive { ExitCode::from(2) } else { ExitCode::SUCCESS })
        }
        Command::Pd { file } => {
            let text = std::fs::read_to_string(file)
                .with_context(|| format!("reading {}", file.display()))?;
            let diagram = Diagram::from_pd(PdCode::parse(&text)?)?;
            print_pd(out, cli, &diagram)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Threshold { t, rule, c } => {
            let rule = ThresholdRule::from(*rule);
            let result = verify::high_twist_threshold(*t, rule)?;
            let certificate = c
                .map(|c| verify::stoimenow_certificate(*t, c, rule))
                .transpose()?;
            print_threshold(out, cli, &result, *c, certificate)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn parse_family(s: &str) -> Result<Family> {
    let mut chars = s.trim().chars();
    match (chars.next().and_then(Family::from_letter), chars.next()) {
        (Some(f), None) => Ok(f),
        _ => bail!("unknown family {s:?}; expected one of R, B, P, W"),
    }
}

fn fixed(v: f64, digits: u8) -> String {
    format!("{v:.*}", digits as usize)
}

fn print_reports(
    out: &mut impl Write,
    cli: &Cli,
    reports: &[BoundReport],
    as_list: bool,
) -> Result<()> {
    match cli.format {
        Format::Csv => verify::write_csv(reports, &mut *out)?,
        Format::Json => {
            let rows: Vec<_> = reports.iter().map(BoundReport::row).collect();
            if !as_list && rows.len() == 1 {
                serde_json::to_writer_pretty(&mut *out, &rows[0])?;
            } else {
                serde_json::to_writer_pretty(&mut *out, &rows)?;
            }
            writeln!(out)?;
        }
        Format::Table if !as_list && reports.len() == 1 => {
            let r = &reports[0];
            let p = cli.precision;
            let row = r.row();
            writeln!(out, "spec               {}", row.spec)?;
            writeln!(out, "family             {}", row.family)?;
            writeln!(out, "crossings          {}", row.c)?;
            writeln!(out, "twist regions      {}", row.t)?;
            writeln!(out, "faces              {}", r.faces)?;
            writeln!(out, "det                {}", row.det)?;
            writeln!(out, "2π log det         {}", fixed(row.two_pi_log_det, p))?;
            for (kind, value) in &r.bounds {
                writeln!(out, "{:<18} {}", kind.as_str(), fixed(value.value, p))?;
            }
            writeln!(out, "best bound         {} ({})", fixed(row.best_bound, p), r.best_kind.as_str())?;
            writeln!(out, "margin             {}", fixed(row.margin, p))?;
            writeln!(out, "hyperbolic status  {}", row.hyperbolic_status)?;
            writeln!(out, "verdict            {}", row.verdict)?;
        }
        Format::Table => {
            let p = cli.precision;
            writeln!(
                out,
                "{:<24} {:>4} {:>4} {:>22} {:>w$} {:>w$} {:<20}",
                "spec",
                "t",
                "c",
                "det",
                "2π log det",
                "best bound",
                "verdict",
                w = p as usize + 5
            )?;
            for r in reports {
                let row = r.row();
                writeln!(
                    out,
                    "{:<24} {:>4} {:>4} {:>22} {:>w$} {:>w$} {:<20}",
                    row.spec,
                    row.t,
                    row.c,
                    row.det,
                    fixed(row.two_pi_log_det, p),
                    fixed(row.best_bound, p),
                    row.verdict,
                    w = p as usize + 5
                )?;
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ConstantRow {
    name: String,
    value: f64,
    abs_err: f64,
    quoted: Option<&'static str>,
}

fn constant_rows() -> Result<Vec<ConstantRow>> {
    let k = constants();
    let row = |name: &str, r: Real, quoted| ConstantRow {
        name: name.to_string(),
        value: r.value,
        abs_err: r.abs_err,
        quoted,
    };
    let mut rows = vec![
        row("v4", k.v4, Some("1.01494")),
        row("v8", k.v8, Some("3.66386237")),
        row("gamma", k.gamma, Some("1.4253")),
        row("xi", k.xi, Some("5.0296")),
        row("zeta", k.zeta, Some("3.2099")),
    ];
    for n in 2..=12 {
        let quoted = match n {
            2 => Some("0"),
            _ => None,
        };
        rows.push(row(&format!("vol(B{n})"), bipyramid_volume(n)?, quoted));
    }
    Ok(rows)
}

fn print_constants(out: &mut impl Write, cli: &Cli) -> Result<()> {
    let rows = constant_rows()?;
    match cli.format {
        Format::Csv => write_csv_rows(out, &rows)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &rows)?;
            writeln!(out)?;
        }
        Format::Table => {
            writeln!(out, "{:<10} {:>22} {:>12}", "name", "computed", "quoted")?;
            for r in &rows {
                writeln!(
                    out,
                    "{:<10} {:>22} {:>12}",
                    r.name,
                    fixed(r.value, cli.precision),
                    r.quoted.unwrap_or("")
                )?;
            }
        }
    }
    Ok(())
}

fn write_csv_rows<T: Serialize>(out: &mut impl Write, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn print_enumeration(out: &mut impl Write, cli: &Cli, report: &EnumerationReport) -> Result<()> {
    match cli.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, report)?;
            writeln!(out)?;
        }
        Format::Csv => write_csv_rows(out, &report.tiers)?,
        Format::Table => {
            writeln!(
                out,
                "{:>3} {:>10} {:>10} {:>10} {:>14}",
                "t", "below", "checked", "frontier", "c threshold"
            )?;
            for s in &report.tiers {
                writeln!(
                    out,
                    "{:>3} {:>10} {:>10} {:>10} {:>14.2}",
                    s.t, s.downset_tuples, s.checked, s.frontier_tuples, s.c_threshold
                )?;
            }
            writeln!(out, "checked     {}", report.checked)?;
            writeln!(out, "certified   {} frontier tuples", report.certified)?;
            writeln!(out, "vacuous     {}", report.vacuous)?;
            writeln!(out, "violations  {}", report.violations.len())?;
            for v in &report.violations {
                writeln!(out, "  {} margin {}", v.spec, fixed(v.margin.value, cli.precision))?;
            }
            writeln!(out, "wall time   {:.3} s", report.wall_time_secs)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct PdSummary {
    faces: String,
    crossings: usize,
    twist_regions: usize,
    tau_shaded: String,
    tau_white: String,
}

fn print_pd(out: &mut impl Write, cli: &Cli, d: &Diagram) -> Result<()> {
    let summary = PdSummary {
        faces: d.faces.to_string(),
        crossings: d.crossing_count,
        twist_regions: d.twist_count,
        tau_shaded: d.shaded.spanning_tree_count().to_string(),
        tau_white: d.white.spanning_tree_count().to_string(),
    };
    match cli.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &summary)?;
            writeln!(out)?;
        }
        Format::Csv => write_csv_rows(out, &[summary])?,
        Format::Table => {
            writeln!(out, "faces          {}", summary.faces)?;
            writeln!(out, "crossings      {}", summary.crossings)?;
            writeln!(out, "twist regions  {}", summary.twist_regions)?;
            writeln!(out, "tau shaded     {}", summary.tau_shaded)?;
            writeln!(out, "tau white      {}", summary.tau_white)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ThresholdRow {
    t: u32,
    rule: ThresholdRule,
    c_threshold: f64,
    c: Option<u64>,
    certificate: Option<bool>,
}

fn print_threshold(
    out: &mut impl Write,
    cli: &Cli,
    result: &verify::ThresholdResult,
    c: Option<u64>,
    certificate: Option<bool>,
) -> Result<()> {
    let row = ThresholdRow {
        t: result.t,
        rule: result.rule,
        c_threshold: result.c_threshold.value,
        c,
        certificate,
    };
    match cli.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &row)?;
            writeln!(out)?;
        }
        Format::Csv => write_csv_rows(out, &[row])?,
        Format::Table => {
            writeln!(out, "t            {}", row.t)?;
            writeln!(out, "c threshold  {}", fixed(row.c_threshold, cli.precision))?;
            if let (Some(c), Some(cert)) = (c, certificate) {
                writeln!(out, "certificate  {cert} at c = {c}")?;
            }
        }
    }
    Ok(())
}
