use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use i2v_latency::channel::{link_budget, max_range, LinkGeometry, NoiseModel, ReceiverOptics, SnrForm, TransmitterParams, DEFAULT_SNR_MIN};
use i2v_latency::io::{read_latency_csv, write_summary_json, write_trace, ReportBundle};
use i2v_latency::scenario::load_scenario;
use i2v_latency::sim::{run, summarize};
use i2v_latency::stats::Family;

#[derive(Parser)]
#[command(name = "i2vsim", version, about = "Traffic-light VLC latency simulator and fitting tool")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate a scenario file or bundled scenario and write a trace.
    Run(RunArgs),
    /// Fit candidate distributions to a latency column and rank them by BIC.
    Fit(FitArgs),
    /// Print gain, SNR, BER and PER of a single link.
    LinkBudget(LinkArgs),
    /// Check a scenario and list every problem found.
    Validate {
        /// Path, or one of: paper-default, paper-overall, city-grid
        scenario: String,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Path, or one of: paper-default, paper-overall, city-grid
    scenario: String,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Seconds; overrides the scenario duration.
    #[arg(long)]
    duration: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    bins_ms: f64,
    /// Independent runs with seeds seed, seed+1, ...; each gets its own
    /// directory.
    #[arg(long, default_value_t = 1)]
    replications: u32,
}

#[derive(Args)]
struct FitArgs {
    /// CSV of latencies in ms, or a trace written by `run`.
    csv: PathBuf,
    /// Column name or index.
    #[arg(long)]
    column: Option<String>,
    /// Comma-separated candidates.
    #[arg(long, value_delimiter = ',', default_value = "t-location-scale,normal,logistic,log-normal")]
    families: Vec<String>,
    #[arg(long, default_value_t = 1.0)]
    bins_ms: f64,
    /// Directory for report.json and the pdf/cdf/cdf_error grids.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Form {
    Linear,
    Squared,
}

#[derive(Args)]
struct LinkArgs {
    /// Transmitter to receiver distance, m.
    #[arg(long, default_value_t = 10.0)]
    distance: f64,
    /// Irradiance angle, degrees.
    #[arg(long, default_value_t = 0.0)]
    phi: f64,
    /// Incidence angle, degrees.
    #[arg(long, default_value_t = 0.0)]
    psi: f64,
    /// Optical power, W.
    #[arg(long, default_value_t = 1.0)]
    power: f64,
    /// Half-power semiangle, degrees.
    #[arg(long, default_value_t = 60.0)]
    half_angle: f64,
    /// Detector area, m².
    #[arg(long, default_value_t = 1e-4)]
    area: f64,
    #[arg(long, default_value_t = 1.0)]
    filter: f64,
    /// Concentrator refractive index.
    #[arg(long, default_value_t = 1.5)]
    index: f64,
    /// Receiver field of view (half angle), degrees.
    #[arg(long, default_value_t = 30.0)]
    fov: f64,
    /// A/W.
    #[arg(long, default_value_t = 0.4)]
    responsivity: f64,
    /// Noise power, W.
    #[arg(long, default_value_t = 3.17e-9)]
    noise: f64,
    #[arg(long, default_value_t = 240)]
    frame_bits: usize,
    #[arg(long, value_enum, default_value_t = Form::Linear)]
    snr_form: Form,
    /// SNR threshold used for the range estimate.
    #[arg(long, default_value_t = DEFAULT_SNR_MIN)]
    snr_min: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Run(a) => cmd_run(a),
        Cmd::Fit(a) => cmd_fit(a),
        Cmd::LinkBudget(a) => cmd_link(a),
        Cmd::Validate { scenario } => cmd_validate(&scenario),
    };
    match res {
        Ok(text) => {
            // a closed pipe (`| head`) is not an error
            match std::io::stdout().lock().write_all(text.as_bytes()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    eprintln!("error: {e}");
                    ExitCode::FAILURE
                }
                _ => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn cmd_validate(name: &str) -> Result<String> {
    let s = load_scenario(name)?;
    Ok(format!(
        "ok: '{}' with {} lights, {} vehicles, {} sources\n",
        s.name,
        s.lights.len(),
        s.vehicles.len(),
        s.sources.len()
    ))
}

fn cmd_run(a: RunArgs) -> Result<String> {
    if a.replications == 0 {
        bail!("--replications must be at least 1");
    }
    if !(a.bins_ms.is_finite() && a.bins_ms > 0.0) {
        bail!("--bins-ms must be > 0, got {}", a.bins_ms);
    }
    let scenario = load_scenario(&a.scenario)?;
    let base = a.seed.unwrap_or(scenario.seed);
    let duration = a.duration.unwrap_or(scenario.duration);
    if !(duration.is_finite() && duration >= 0.0) {
        bail!("--duration must be >= 0, got {duration}");
    }
    std::fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;

    let seeds: Vec<u64> = (0..a.replications as u64).map(|i| base.wrapping_add(i)).collect();
    let one = seeds.len() == 1;
    let results: Vec<Result<String>> = std::thread::scope(|scope| {
        let handles: Vec<_> = seeds
            .iter()
            .map(|&seed| {
                let dir = if one { a.out.clone() } else { a.out.join(format!("seed-{seed}")) };
                let scenario = &scenario;
                scope.spawn(move || replicate(scenario, seed, duration, a.bins_ms, &dir))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("replication thread panicked"))
            .collect()
    });
    let mut text = String::new();
    for r in results {
        writeln!(text, "{}", r?)?;
    }
    Ok(text)
}

fn replicate(scenario: &i2v_latency::sim::Scenario, seed: u64, duration: f64, bins_ms: f64, dir: &Path) -> Result<String> {
    let out = run(scenario, seed, duration)?;
    std::fs::create_dir_all(dir)?;
    let trace = dir.join("trace.csv");
    let mut w = BufWriter::new(File::create(&trace).with_context(|| format!("creating {}", trace.display()))?);
    write_trace(&mut w, &out)?;
    w.flush()?;

    let mut line = format!("seed {seed}: {} records, {} delivered", out.records.len(), out.delivered);
    if !out.records.is_empty() {
        let sum = summarize(&out.records, &out.segment_names, bins_ms / 1e3)?;
        let path = dir.join("summary.json");
        let mut w = BufWriter::new(File::create(&path)?);
        write_summary_json(&mut w, &scenario.name, seed, duration, &sum)?;
        w.flush()?;
        if let Some(t) = &sum.total {
            line.push_str(&format!(", median {:.3} ms, modal bin {:.3} ms", t.median_ms, t.modal_bin_ms));
        }
    }
    line.push_str(&format!(" -> {}", dir.display()));
    Ok(line)
}

fn cmd_fit(a: FitArgs) -> Result<String> {
    let families = a
        .families
        .iter()
        .map(|f| f.trim().parse::<Family>())
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let file = File::open(&a.csv).with_context(|| format!("opening {}", a.csv.display()))?;
    let data = read_latency_csv(file, a.column.as_deref())?;
    let report = ReportBundle::build(&data, &families, a.bins_ms / 1e3)?;
    let mut text = report.ranking_text();
    if let Some(dir) = &a.out {
        report.write_dir(dir)?;
        writeln!(text, "report written to {}", dir.display())?;
    }
    Ok(text)
}

fn cmd_link(a: LinkArgs) -> Result<String> {
    let tx = TransmitterParams {
        power: a.power,
        half_power_semiangle: a.half_angle.to_radians(),
    };
    let rx = ReceiverOptics {
        area: a.area,
        filter_transmission: a.filter,
        concentrator_index: a.index,
        fov: a.fov.to_radians(),
        responsivity: a.responsivity,
    };
    let noise = NoiseModel { noise_power: a.noise };
    let geom = LinkGeometry {
        distance: a.distance,
        irradiance_angle: a.phi.to_radians(),
        incidence_angle: a.psi.to_radians(),
    };
    let mut problems = Vec::new();
    for r in [tx.validate(), rx.validate(), noise.validate(), geom.validate()] {
        match r {
            Err(i2v_latency::Error::Validation(v)) => problems.extend(v),
            Err(e) => problems.push(e.to_string()),
            Ok(()) => {}
        }
    }
    if !problems.is_empty() {
        bail!("invalid link parameters:\n  {}", problems.join("\n  "));
    }
    let form = match a.snr_form {
        Form::Linear => SnrForm::Linear,
        Form::Squared => SnrForm::Squared,
    };
    let b = link_budget(&geom, &tx, &rx, &noise, a.frame_bits, form);
    let mut text = format!(
        "H = {:.5e}\ngamma = {:.5e}\nBER = {:.5e}\nPER = {:.5e}\n",
        b.gain, b.snr, b.ber, b.per
    );
    match max_range(&tx, &rx, &noise, a.snr_min, form) {
        Ok(r) => writeln!(text, "range = {r:.3} m (SNR >= {})", a.snr_min)?,
        Err(e) => writeln!(text, "range: {e}")?,
    }
    Ok(text)
}
