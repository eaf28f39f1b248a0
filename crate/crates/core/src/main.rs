use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qedwall::asymptotics::{TailBreakdown, TailConvention};
use qedwall::config;
use qedwall::hydrogen::{AtomicConstants, GapConvention, LevelLabel};
use qedwall::nonretarded::{commensurability_distances, doubling_distance, Measure};
use qedwall::oracle;
use qedwall::scan::{self, Quantity, Settings};

#[derive(Parser)]
#[command(name = "qedwall", version, about = "Hydrogen n = 2 levels near a conducting wall")]
struct Cli {
    #[command(flatten)]
    constants: ConstantArgs,
    /// Log level (error, warn, info, debug)
    #[arg(long, global = true, default_value = "warn")]
    log_level: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConstantArgs {
    /// key = value config file (default: $QEDWALL_CONFIG)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    lamb_shift_au: Option<f64>,
    #[arg(long, global = true)]
    fine_structure_au: Option<f64>,
    #[arg(long, global = true)]
    gamma_2s_au: Option<f64>,
    #[arg(long, global = true)]
    gamma_2p_au: Option<f64>,
    #[arg(long, global = true)]
    gap_convention: Option<ConventionArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    Nominal,
    Physical,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Units {
    Au,
    Mhz,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Table,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum QuantityArg {
    Energy,
    Mixing,
    Admixtures,
    Gamma,
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureArg {
    All,
    DiagonalShift,
    DiagonalSplitting,
    OffDiagonalP12,
    OffDiagonalP32,
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("must be finite and > 0, got {v}"))
    }
}

fn level(s: &str) -> std::result::Result<LevelLabel, String> {
    s.parse::<LevelLabel>().map_err(|e| e.to_string())
}

fn n_max(s: &str) -> std::result::Result<u32, String> {
    let v: u32 = s.parse().map_err(|_| format!("`{s}` is not an integer"))?;
    if (2..=6).contains(&v) {
        Ok(v)
    } else {
        Err(format!("must be between 2 and 6, got {v}"))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Wall-induced energy shift of one state
    Energy {
        #[arg(long, default_value = "2S", value_parser = level)]
        state: LevelLabel,
        #[arg(long, value_parser = positive)]
        z: f64,
        #[arg(long, default_value = "2", value_parser = n_max)]
        nmax: u32,
        #[arg(long, value_enum, default_value = "au")]
        units: Units,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Parity-mixing element with its long-range breakdown
    Mixing {
        #[arg(long, default_value = "2P12", value_parser = level)]
        from: LevelLabel,
        #[arg(long, default_value = "2S", value_parser = level)]
        to: LevelLabel,
        #[arg(long, value_parser = positive)]
        z: f64,
        #[arg(long, default_value = "2", value_parser = n_max)]
        nmax: u32,
        /// Use the literal coefficient for the flagged tail terms
        #[arg(long, value_enum, default_value = "off")]
        strict_paper_tail: Switch,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Tabulate a quantity over a distance grid
    Scan {
        #[arg(long, value_enum)]
        quantity: QuantityArg,
        #[arg(long, value_parser = positive)]
        zmin: f64,
        #[arg(long, value_parser = positive)]
        zmax: f64,
        #[arg(long, default_value = "50")]
        points: usize,
        /// Logarithmic spacing
        #[arg(long)]
        log: bool,
        /// Output file (stdout if absent); `.json` selects JSON
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long, default_value = "2S", value_parser = level)]
        state: LevelLabel,
        #[arg(long, default_value = "2P12", value_parser = level)]
        from: LevelLabel,
        #[arg(long, default_value = "2S", value_parser = level)]
        to: LevelLabel,
        #[arg(long, default_value = "2", value_parser = n_max)]
        nmax: u32,
        #[arg(long, value_enum, default_value = "off")]
        strict_paper_tail: Switch,
    },
    /// Distance at which the 2S width doubles
    Doubling,
    /// Distances where a wall matrix element equals ℒ or ℱ
    Commensurability {
        #[arg(long, value_enum, default_value = "all")]
        measure: MeasureArg,
        #[arg(long, default_value = "4")]
        order: u32,
    },
    /// Compare closed forms with the brute-force oracles
    OracleAudit {
        /// CSV destination (stdout if absent)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
enum Failure {
    Usage(anyhow::Error),
    Io(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        let usage = e.chain().any(|c| {
            matches!(
                c.downcast_ref::<qedwall::Error>(),
                Some(qedwall::Error::Domain { .. } | qedwall::Error::Degenerate { .. })
            )
        });
        if usage {
            Failure::Usage(e)
        } else {
            Failure::Io(e)
        }
    }
}

fn constants(args: &ConstantArgs) -> Result<AtomicConstants> {
    let mut c = config::resolve(args.config.as_deref()).context("loading configuration")?;
    if let Some(v) = args.lamb_shift_au {
        c.lamb_shift = v;
    }
    if let Some(v) = args.fine_structure_au {
        c.fine_structure = v;
    }
    if let Some(v) = args.gamma_2s_au {
        c.gamma_2s = v;
    }
    if let Some(v) = args.gamma_2p_au {
        c.gamma_2p = v;
    }
    if let Some(v) = args.gap_convention {
        c.convention = match v {
            ConventionArg::Nominal => GapConvention::Nominal,
            ConventionArg::Physical => GapConvention::Physical,
        };
    }
    c.validate().context("checking constants")?;
    Ok(c)
}

fn convention(s: Switch) -> TailConvention {
    match s {
        Switch::On => TailConvention::Literal,
        Switch::Off => TailConvention::Consistent,
    }
}

fn num(v: Option<f64>) -> String {
    v.map_or_else(|| scan::OUT_OF_REGIME.to_owned(), |x| format!("{x:e}"))
}

fn energy(out: &mut impl Write, c: &AtomicConstants, s: &Settings, z: f64, units: Units, format: Format) -> Result<()> {
    let p = scan::energy_point(z, s, c)?;
    let rows = [
        ("retarded", Some(p.retarded_au)),
        ("nonretarded", Some(p.nonretarded_au)),
        ("tail", p.tail.as_ref().map(|t| t.total)),
    ];
    match format {
        Format::Json => {
            let doc: Vec<Value> = rows
                .iter()
                .map(|(method, v)| {
                    json!({
                        "z_au": z,
                        "energy_au": v,
                        "energy_mhz": v.map(|x| x * c.au_to_mhz),
                        "method": method,
                    })
                })
                .collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
        }
        Format::Csv => {
            writeln!(out, "z_au,method,energy_au,energy_mhz")?;
            for (method, v) in rows {
                writeln!(out, "{z:e},{method},{},{}", num(v), num(v.map(|x| x * c.au_to_mhz)))?;
            }
        }
        Format::Table => {
            let unit = if units == Units::Mhz { "MHz" } else { "a.u." };
            writeln!(out, "state {}  z = {z} a.u.  n_max = {}", s.state, s.n_max)?;
            for (method, v) in rows {
                let shown = v.map(|x| if units == Units::Mhz { x * c.au_to_mhz } else { x });
                writeln!(out, "  {method:<12} {:>24} {unit}", num(shown))?;
            }
        }
    }
    Ok(())
}

fn tail_terms_json(t: &TailBreakdown) -> Value {
    Value::Array(
        t.terms
            .iter()
            .map(|x| {
                json!({
                    "channel": x.channel,
                    "power": x.power,
                    "oscillator": x.oscillator.to_string(),
                    "coefficient": x.coefficient,
                    "value_au": x.value(t.z),
                    "flagged": x.flagged,
                })
            })
            .collect(),
    )
}

fn mixing(out: &mut impl Write, c: &AtomicConstants, s: &Settings, z: f64, format: Format) -> Result<()> {
    let p = scan::mixing_point(z, s, c)?;
    let strict = s.convention == TailConvention::Literal;
    match format {
        Format::Json => {
            let doc = json!({
                "z_au": z,
                "from": s.from.to_string(),
                "to": s.to.to_string(),
                "mixing_au": p.retarded_au,
                "tail_au": p.tail.as_ref().map(|t| t.total),
                "tail_terms": p.tail.as_ref().map(tail_terms_json),
                "p12_cancellation": p.p12_cancels(),
                "literal_flagged_term": strict,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
        }
        Format::Csv => {
            writeln!(out, "z_au,component,channel,power,oscillator,coefficient,value_au,flagged")?;
            writeln!(out, "{z:e},retarded,,,,,{:e},", p.retarded_au)?;
            writeln!(out, "{z:e},tail,,,,,{},", num(p.tail.as_ref().map(|t| t.total)))?;
            if let Some(t) = &p.tail {
                for x in &t.terms {
                    writeln!(
                        out,
                        "{z:e},term,{},{},{},{:e},{:e},{}",
                        x.channel,
                        x.power,
                        x.oscillator,
                        x.coefficient,
                        x.value(z),
                        x.flagged
                    )?;
                }
            }
        }
        Format::Table => {
            writeln!(out, "<{}|ΔM|{}>  z = {z} a.u.  n_max = {}", s.from, s.to, s.n_max)?;
            writeln!(out, "  retarded     {:>24e} a.u.", p.retarded_au)?;
            writeln!(out, "  tail         {:>24} a.u.", num(p.tail.as_ref().map(|t| t.total)))?;
            writeln!(out, "  2P1/2 oscillating terms cancel: {}", p.p12_cancels())?;
            writeln!(out, "  flagged term uses literal coefficient: {strict}")?;
            if let Some(t) = &p.tail {
                for x in &t.terms {
                    let flag = if x.flagged { " *" } else { "" };
                    writeln!(
                        out,
                        "    {:<8} 1/Z^{} {:<4} coeff {:>14.6e}  value {:>14.6e}{flag}",
                        x.channel,
                        x.power,
                        x.oscillator.to_string(),
                        x.coefficient,
                        x.value(z)
                    )?;
                }
            }
        }
    }
    Ok(())
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> std::result::Result<(), Failure> {
    let c = constants(&cli.constants).map_err(Failure::from)?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Energy {
            state,
            z,
            nmax,
            units,
            format,
        } => {
            let s = Settings {
                state,
                n_max: nmax,
                ..Default::default()
            };
            energy(&mut out, &c, &s, z, units, format)?;
        }
        Command::Mixing {
            from,
            to,
            z,
            nmax,
            strict_paper_tail,
            format,
        } => {
            let s = Settings {
                from,
                to,
                n_max: nmax,
                convention: convention(strict_paper_tail),
                ..Default::default()
            };
            mixing(&mut out, &c, &s, z, format)?;
        }
        Command::Scan {
            quantity,
            zmin,
            zmax,
            points,
            log,
            out: path,
            format,
            state,
            from,
            to,
            nmax,
            strict_paper_tail,
        } => {
            let quantity = match quantity {
                QuantityArg::Energy => Quantity::Energy,
                QuantityArg::Mixing => Quantity::Mixing,
                QuantityArg::Admixtures => Quantity::Admixtures,
                QuantityArg::Gamma => Quantity::Gamma,
            };
            let s = Settings {
                state,
                from,
                to,
                n_max: nmax,
                convention: convention(strict_paper_tail),
            };
            let g = scan::grid(zmin, zmax, points, log).map_err(|e| Failure::Usage(e.into()))?;
            let table = scan::run_scan(quantity, &g, &s, &c)?;
            let json_ext = path
                .as_deref()
                .and_then(|p| p.extension())
                .is_some_and(|e| e.eq_ignore_ascii_case("json"));
            let format = format.unwrap_or(if json_ext { Format::Json } else { Format::Csv });
            let mut w = open_output(path.as_deref()).map_err(Failure::Io)?;
            let written: io::Result<()> = match format {
                Format::Json => serde_json::to_writer_pretty(&mut w, &scan::to_json(&table))
                    .map_err(io::Error::from)
                    .and_then(|_| writeln!(w)),
                _ => scan::write_csv(&table, &mut w),
            };
            written
                .and_then(|_| w.flush())
                .context("writing scan output")
                .map_err(Failure::Io)?;
        }
        Command::Doubling => {
            let z0 = doubling_distance(&c)?;
            for line in config::render(&c) {
                writeln!(out, "# {line}").map_err(|e| Failure::Io(e.into()))?;
            }
            writeln!(out, "z0_au = {z0}").map_err(|e| Failure::Io(e.into()))?;
        }
        Command::Commensurability { measure, order } => {
            let measures: Vec<Measure> = match measure {
                MeasureArg::All => Measure::ALL.to_vec(),
                MeasureArg::DiagonalShift => vec![Measure::DiagonalShift],
                MeasureArg::DiagonalSplitting => vec![Measure::DiagonalSplitting],
                MeasureArg::OffDiagonalP12 => vec![Measure::OffDiagonalP12],
                MeasureArg::OffDiagonalP32 => vec![Measure::OffDiagonalP32],
            };
            writeln!(out, "measure,order,z_lamb_au,z_fine_au").map_err(|e| Failure::Io(e.into()))?;
            for m in measures {
                let line = match commensurability_distances(m, order, &c) {
                    Ok(r) => format!("{m},{order},{},{}", r.z_lamb, r.z_fine),
                    Err(e @ qedwall::Error::NoRoot { .. }) => {
                        log::warn!("{m}: {e}");
                        format!("{m},{order},none,none")
                    }
                    Err(e) => return Err(anyhow::Error::from(e).into()),
                };
                writeln!(out, "{line}").map_err(|e| Failure::Io(e.into()))?;
            }
        }
        Command::OracleAudit { out: path } => {
            let rows = oracle::full_audit(&c)?;
            let worst = rows.iter().map(|r| r.rel_error).fold(0.0_f64, f64::max);
            let w = open_output(path.as_deref()).map_err(Failure::Io)?;
            oracle::write_audit_csv(&rows, w)
                .context("writing audit")
                .map_err(Failure::Io)?;
            eprintln!("{} comparisons, largest relative error {worst:e}", rows.len());
        }
    }
    Ok(())
}

impl From<qedwall::Error> for Failure {
    fn from(e: qedwall::Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.into())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Io(e.into())
    }
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain()
        .any(|c| c.downcast_ref::<io::Error>().is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new().parse_filters(&cli.log_level).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
