//! Command-line front end: configuration loading, the four subcommands and
//! their file artifacts.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use ieeabr_core::harvester::{embedded_curve, load_curves, recharge_time, HarvestCurve};
use ieeabr_core::rf_link::{
    directional_power_density, friis_received_power, watts_to_dbm, wavelength,
};
use ieeabr_core::sim::{
    compare_protocols, comparison_csv, run_detailed, tables_csv, timeline_csv, Comparison,
    RunSummary, Scenario,
};
use ieeabr_core::{Antenna, AntennaGain, CurveId, LinkBudget, ProtocolKind, Receiver};

pub const TIMELINE_FILE: &str = "timeline.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const TABLES_FILE: &str = "tables.csv";
pub const COMPARISON_FILE: &str = "comparison.csv";

#[derive(Debug, Parser)]
#[command(
    name = "ieeabr",
    version,
    about = "Energy-harvesting sensor network routing simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one scenario and write its timeline, summary and routing tables.
    Run(RunArgs),
    /// Run several protocols over paired seeds and write a comparison table.
    Compare(CompareArgs),
    /// Free-space link budget at one distance.
    Linkbudget(LinkArgs),
    /// Harvested power and recharge time from a measured curve.
    Harvest(HarvestArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// TOML configuration file; built-in defaults when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides `scenario.seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides `output.dir`.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Suppress the report on stdout.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comma-separated protocol names.
    #[arg(long, value_delimiter = ',', default_value = "IEEABR,EEABR,MinHop")]
    pub protocols: Vec<String>,
    /// Seeds per protocol, starting at the configured seed.
    #[arg(long, default_value_t = 20)]
    pub reps: usize,
}

#[derive(Debug, Clone, Args)]
pub struct LinkArgs {
    /// Transmit power, W.
    #[arg(long, default_value_t = 3.0)]
    pub tx_power: f64,
    /// Transmit antenna gain, dBi.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub tx_gain: f64,
    /// Receive antenna gain, dBi.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub rx_gain: f64,
    /// Carrier frequency, Hz.
    #[arg(long, default_value_t = 915e6)]
    pub frequency: f64,
    /// Antenna separation, m.
    #[arg(long, allow_negative_numbers = true)]
    pub distance: f64,
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Args)]
pub struct HarvestArgs {
    /// P2110 or P1110.
    pub receiver: String,
    /// dipole or patch.
    pub antenna: String,
    /// Distance from the transmitter, ft.
    #[arg(long, allow_negative_numbers = true)]
    pub distance: f64,
    /// Charge to put back, mAh.
    #[arg(long, default_value_t = 264.5)]
    pub drawn_mah: f64,
    /// Curve file replacing the built-in tables.
    #[arg(long)]
    pub curves: Option<PathBuf>,
    #[arg(long)]
    pub quiet: bool,
}

/// Contents of a configuration file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub quiet: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            quiet: false,
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Loads the file (or defaults) and applies command-line overrides.
    pub fn resolve(common: &CommonArgs) -> Result<Self> {
        let mut cfg = match &common.config {
            Some(path) => Self::load(path)?,
            None => Self::default(),
        };
        if let Some(seed) = common.seed {
            cfg.scenario.seed = seed;
        }
        if let Some(dir) = &common.out_dir {
            cfg.output.dir = dir.clone();
        }
        cfg.output.quiet |= common.quiet;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }
}

/// What `summary.json` holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryFile {
    pub seed: u64,
    pub config: RunConfig,
    pub summary: RunSummary,
}

/// Runs a parsed command line; returns the text meant for stdout.
pub fn execute(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Run(args) => cmd_run(&RunConfig::resolve(&args.common)?),
        Command::Compare(args) => {
            let protocols = parse_protocols(&args.protocols)?;
            cmd_compare(&RunConfig::resolve(&args.common)?, &protocols, args.reps)
        }
        Command::Linkbudget(args) => quiet_or(args.quiet, cmd_linkbudget(args)),
        Command::Harvest(args) => quiet_or(args.quiet, cmd_harvest(args)),
    }
}

fn quiet_or(quiet: bool, report: Result<String>) -> Result<String> {
    report.map(|r| if quiet { String::new() } else { r })
}

pub fn cmd_run(cfg: &RunConfig) -> Result<String> {
    cfg.scenario.validate()?;
    let out = run_detailed(&cfg.scenario)?;
    let dir = &cfg.output.dir;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write(dir, TIMELINE_FILE, &timeline_csv(&out.timeline))?;
    write(dir, TABLES_FILE, &tables_csv(&out.tables))?;
    let file = SummaryFile {
        seed: cfg.scenario.seed,
        config: cfg.clone(),
        summary: out.summary,
    };
    write(
        dir,
        SUMMARY_FILE,
        &(serde_json::to_string_pretty(&file)? + "\n"),
    )?;

    if cfg.output.quiet {
        return Ok(String::new());
    }
    let s = &file.summary;
    let mut r = String::new();
    let _ = writeln!(r, "protocol          {}", s.protocol.name());
    let _ = writeln!(r, "seed              {}", s.seed);
    let _ = writeln!(r, "nodes             {}", s.nodes.len());
    let _ = writeln!(r, "avg residual      {:.6}", s.final_avg_residual);
    let _ = writeln!(r, "min residual      {:.6}", s.final_min_residual);
    let _ = writeln!(
        r,
        "messages          {} generated, {} delivered, {} dropped, {} in flight",
        s.messages.generated, s.messages.delivered, s.messages.dropped, s.messages.in_flight
    );
    if s.protocol.uses_ants() {
        let _ = writeln!(
            r,
            "ants              {} launched, {} completed",
            s.ants_launched, s.ants_completed
        );
    }
    let _ = writeln!(r, "output            {}", dir.display());
    Ok(r)
}

pub fn parse_protocols(names: &[String]) -> Result<Vec<ProtocolKind>> {
    let names: Vec<&str> = names
        .iter()
        .map(|n| n.trim())
        .filter(|n| !n.is_empty())
        .collect();
    if names.is_empty() {
        bail!("at least one protocol is required ({})", valid_protocols());
    }
    names
        .into_iter()
        .map(|n| {
            n.parse::<ProtocolKind>().map_err(|_| {
                anyhow::anyhow!(
                    "unknown protocol {n:?}; valid options: {}",
                    valid_protocols()
                )
            })
        })
        .collect()
}

fn valid_protocols() -> String {
    ProtocolKind::ALL
        .iter()
        .map(|p| p.name())
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn cmd_compare(cfg: &RunConfig, protocols: &[ProtocolKind], reps: usize) -> Result<String> {
    if reps == 0 {
        bail!("--reps must be at least 1");
    }
    cfg.scenario.validate()?;
    let cmp: Comparison = compare_protocols(&cfg.scenario, protocols, reps)?;
    let dir = &cfg.output.dir;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write(dir, COMPARISON_FILE, &comparison_csv(&cmp))?;

    if cfg.output.quiet {
        return Ok(String::new());
    }
    let mut r = String::new();
    let _ = writeln!(
        r,
        "seeds {}..={}",
        cfg.scenario.seed,
        cfg.scenario.seed + reps as u64 - 1
    );
    let _ = writeln!(
        r,
        "{:<8} {:>12} {:>12}",
        "protocol", "avg_residual", "min_residual"
    );
    for a in &cmp.aggregates {
        let _ = writeln!(
            r,
            "{:<8} {:>12.6} {:>12.6}",
            a.protocol.name(),
            a.mean_avg_residual,
            a.mean_min_residual
        );
    }
    for (i, a) in protocols.iter().enumerate() {
        for b in &protocols[i + 1..] {
            let _ = writeln!(
                r,
                "{} beats {} on {} of {reps} seeds",
                a.name(),
                b.name(),
                cmp.wins(*a, *b)
            );
        }
    }
    let _ = writeln!(r, "output {}", dir.join(COMPARISON_FILE).display());
    Ok(r)
}

pub fn cmd_linkbudget(args: &LinkArgs) -> Result<String> {
    let tx_gain = AntennaGain::from_dbi(args.tx_gain)?;
    let rx_gain = AntennaGain::from_dbi(args.rx_gain)?;
    let link = LinkBudget::new(
        args.tx_power,
        tx_gain,
        rx_gain,
        args.frequency,
        args.distance,
    )?;
    let received = friis_received_power(&link)?;
    let density = directional_power_density(link.tx_power, link.tx_gain, link.distance)?;
    let lambda = wavelength(link.frequency)?;

    let mut r = String::new();
    let _ = writeln!(r, "eirp              {:.6} W", link.eirp());
    let _ = writeln!(
        r,
        "tx gain           {:.3} dBi = {:.6}",
        args.tx_gain,
        tx_gain.linear()
    );
    let _ = writeln!(
        r,
        "rx gain           {:.3} dBi = {:.6}",
        args.rx_gain,
        rx_gain.linear()
    );
    let _ = writeln!(r, "wavelength        {:.6} m", lambda);
    let _ = writeln!(r, "power density     {:.6e} W/m^2", density);
    let _ = writeln!(
        r,
        "received power    {:.6e} W ({:.3} dBm)",
        received,
        watts_to_dbm(received)
    );
    Ok(r)
}

fn parse_pair(receiver: &str, antenna: &str) -> Result<CurveId> {
    match (receiver.parse::<Receiver>(), antenna.parse::<Antenna>()) {
        (Ok(r), Ok(a)) => Ok(CurveId::new(r, a)),
        _ => {
            let valid: Vec<String> = CurveId::ALL.iter().map(ToString::to_string).collect();
            bail!(
                "unknown receiver/antenna pair \"{receiver} {antenna}\"; valid pairs: {}",
                valid.join(", ")
            )
        }
    }
}

pub fn cmd_harvest(args: &HarvestArgs) -> Result<String> {
    let id = parse_pair(&args.receiver, &args.antenna)?;
    if !args.distance.is_finite() || args.distance < 0.0 {
        bail!("--distance must be a non-negative number of feet");
    }
    let curve: HarvestCurve = match &args.curves {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let curves =
                load_curves(&text).with_context(|| format!("parsing {}", path.display()))?;
            match curves.into_iter().find(|c| c.id == id) {
                Some(c) => c,
                None => embedded_curve(id),
            }
        }
        None => embedded_curve(id),
    };
    let h = curve.harvest_at(args.distance);

    let mut r = String::new();
    let _ = writeln!(r, "curve             {id}");
    let _ = writeln!(r, "distance          {} ft", args.distance);
    let _ = writeln!(r, "power             {:.1} uW", h.power_uw);
    let _ = writeln!(r, "current           {:.1} uA", h.current_ua);
    if args.distance > curve.max_distance_ft() {
        let _ = writeln!(
            r,
            "note              out of range: beyond the last measured point at {} ft",
            curve.max_distance_ft()
        );
    }
    match recharge_time(args.drawn_mah, h.current_ua) {
        Ok(hours) => {
            let _ = writeln!(
                r,
                "recharge          {:.2} h for {} mAh",
                hours, args.drawn_mah
            );
        }
        Err(ieeabr_core::harvester::HarvestError::NoHarvest) => {
            let _ = writeln!(r, "recharge          never (no charging current)");
        }
        Err(e) => return Err(e.into()),
    }
    Ok(r)
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}
