use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use serde::Deserialize;

use korobov_tract::complexity::{
    avg_error, info_complexity_avg, info_complexity_worst, worst_error, Criterion,
};
use korobov_tract::approx::{mc_avg_error, GaussianDrawConfig};
use korobov_tract::entropy::{chain_check, grid_count, FinitePointSet, LpBallQuery, PackingMode};
use korobov_tract::output::{Format, OutputTable, Value};
use korobov_tract::spectrum::EigenStream;
use korobov_tract::tractability::{classify, probe_ratio, LimitClass, Notion, Outcome, Setting};
use korobov_tract::{Error, ResourceCaps, Result, SequenceFamily, WeightSpec};

#[derive(Parser)]
#[command(name = "korobov-tract", version, about = "Spectral quantities, information complexity, \
minimal errors, and exponential-convergence tractability for analytic Korobov kernels")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct SpecArg {
    /// Path to a JSON problem spec: {"omega": .., "a": "..", "b": "..",
    /// "caps": {..}?}
    #[arg(long)]
    spec: PathBuf,
}

#[derive(Subcommand)]
enum Cmd {
    /// Top of the eigenvalue sequence: rank, exponent, eigenvalue.
    Spectrum {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        d: usize,
        /// Number of ranks to emit.
        #[arg(long)]
        n: u64,
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Information complexity n(eps, d).
    Complexity {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        eps: f64,
        /// worst | avg
        #[arg(long, default_value = "worst")]
        setting: String,
        /// abs | nor
        #[arg(long, default_value = "abs")]
        criterion: String,
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Minimal errors e(n, d) for n = 0..=n_max.
    ErrorCurve {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        d: usize,
        #[arg(long = "n-max")]
        n_max: u64,
        /// worst | avg | both
        #[arg(long, default_value = "both")]
        setting: String,
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Monte-Carlo estimate of the average case error against the oracle.
    SampleAvg {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        /// Neglected eigenvalue tail per draw, as a fraction of the trace.
        #[arg(long, default_value_t = 1e-6)]
        threshold: f64,
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Lattice counts and packing/covering checks.
    Entropy {
        #[command(subcommand)]
        cmd: EntropyCmd,
    },
    /// Tractability classification and the ratio probe.
    Tractability {
        #[command(subcommand)]
        cmd: TractCmd,
    },
}

#[derive(Subcommand)]
enum EntropyCmd {
    /// #{h in Z^d : sum |h_k|^p <= m}.
    GridCount {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        m: f64,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Packing/covering sandwich on a finite point set.
    ChainCheck {
        /// File with one point per line, coordinates space-separated.
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value = "csv")]
        format: String,
    },
}

#[derive(Subcommand)]
enum TractCmd {
    Classify {
        #[command(flatten)]
        spec: SpecArg,
        /// EC-SPT | EC-PT | EC-QPT | EC-UWT | EC-WT | EC-(s,t)-WT
        #[arg(long)]
        notion: String,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        t: Option<f64>,
        /// worst | avg-abs | avg-nor
        #[arg(long)]
        setting: String,
        #[arg(long, default_value = "csv")]
        format: String,
    },
    Probe {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        setting: String,
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        d: Vec<usize>,
        #[arg(long, default_value = "csv")]
        format: String,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    omega: f64,
    a: String,
    b: String,
    #[serde(default)]
    caps: Option<BTreeMap<String, u64>>,
}

fn load_spec(path: &Path) -> Result<(WeightSpec, ResourceCaps)> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::InvalidArgument(format!("cannot read spec file {}: {e}", path.display()))
    })?;
    let file: SpecFile = serde_json::from_str(&text).map_err(|e| {
        Error::InvalidSpec(format!("{}: {e}", path.display()))
    })?;
    let a: SequenceFamily = file.a.parse()?;
    let b: SequenceFamily = file.b.parse()?;
    let spec = WeightSpec::new(file.omega, a, b)?;
    spec.validate(1_000)?;
    let mut caps = ResourceCaps::default();
    if let Some(overrides) = &file.caps {
        for (key, value) in overrides {
            caps.apply_overrides(&format!("{key}={value}"))?;
        }
    }
    // environment overrides take precedence over the spec file
    if let Ok(text) = std::env::var("KOROBOV_TRACT_CAPS") {
        caps.apply_overrides(&text)?;
    }
    Ok((spec, caps))
}

fn outcome_str(o: Outcome) -> &'static str {
    match o {
        Outcome::Holds => "holds",
        Outcome::Fails => "fails",
        Outcome::Unknown => "unknown",
    }
}

fn limit_class_str(c: LimitClass) -> &'static str {
    match c {
        LimitClass::Zero => "zero",
        LimitClass::FinitePositive => "finite-positive",
        LimitClass::Infinite => "infinite",
        LimitClass::Undecidable => "undecidable",
    }
}

fn packing_mode_str(m: PackingMode) -> &'static str {
    match m {
        PackingMode::Exact => "exact",
        PackingMode::GreedyLowerBound => "greedy-lower-bound",
    }
}

fn emit(table: &OutputTable, format: &str) -> Result<()> {
    print!("{}", table.render(Format::parse(format)?));
    Ok(())
}

fn run(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Spectrum { spec, d, n, format } => {
            let (spec, caps) = load_spec(&spec.spec)?;
            let mut table = OutputTable::new(["rank", "exponent", "eigenvalue"]);
            let mut stream = EigenStream::new(&spec, d, caps)?;
            let mut rank: u64 = 0;
            'outer: while rank < n {
                let group = stream.next_group()?;
                let lambda = group.eigenvalue(&spec);
                for _ in 0..group.multiplicity {
                    rank += 1;
                    table.push_row([
                        Value::UInt(rank),
                        Value::Float(group.exponent),
                        Value::Float(lambda),
                    ])?;
                    if rank == n {
                        break 'outer;
                    }
                }
            }
            emit(&table, &format)
        }
        Cmd::Complexity { spec, d, eps, setting, criterion, format } => {
            let (spec, caps) = load_spec(&spec.spec)?;
            let criterion_tag = criterion.to_ascii_lowercase();
            let crit = match criterion_tag.as_str() {
                "abs" => Criterion::Abs,
                "nor" => Criterion::Nor,
                other => {
                    return Err(Error::InvalidArgument(format!("unknown criterion `{other}`")));
                }
            };
            let setting_tag = setting.to_ascii_lowercase();
            let n: BigUint = match setting_tag.as_str() {
                "worst" => info_complexity_worst(&spec, d, eps, caps)?,
                "avg" => BigUint::from(info_complexity_avg(&spec, d, eps, crit, caps)?),
                other => {
                    return Err(Error::InvalidArgument(format!("unknown setting `{other}`")));
                }
            };
            let mut table = OutputTable::new(["setting", "criterion", "d", "eps", "n"]);
            table.push_row([
                Value::from(setting_tag),
                Value::from(criterion_tag),
                Value::UInt(d as u64),
                Value::Float(eps),
                Value::Count(n),
            ])?;
            emit(&table, &format)
        }
        Cmd::ErrorCurve { spec, d, n_max, setting, format } => {
            let (spec, caps) = load_spec(&spec.spec)?;
            let (want_wor, want_avg) = match setting.to_ascii_lowercase().as_str() {
                "worst" => (true, false),
                "avg" => (false, true),
                "both" => (true, true),
                other => {
                    return Err(Error::InvalidArgument(format!("unknown setting `{other}`")));
                }
            };
            let mut columns = vec!["n".to_string()];
            if want_wor {
                columns.push("e_wor".to_string());
            }
            if want_avg {
                columns.push("e_avg".to_string());
            }
            let mut table = OutputTable::new(columns);
            for n in 0..=n_max {
                let mut row = vec![Value::UInt(n)];
                if want_wor {
                    row.push(Value::Float(worst_error(&spec, d, n, caps)?));
                }
                if want_avg {
                    row.push(Value::Float(avg_error(&spec, d, n, caps)?));
                }
                table.push_row(row)?;
            }
            emit(&table, &format)
        }
        Cmd::SampleAvg { spec, d, n, samples, seed, threshold, format } => {
            let (spec, caps) = load_spec(&spec.spec)?;
            let cfg = GaussianDrawConfig { threshold, seed, samples };
            let est = mc_avg_error(&spec, d, n, &cfg, caps)?;
            let oracle = avg_error(&spec, d, n, caps)?;
            let z = if est.std_error > 0.0 {
                (est.estimate - oracle) / est.std_error
            } else {
                0.0
            };
            let mut table = OutputTable::new([
                "d",
                "n",
                "samples",
                "seed",
                "estimate",
                "std_error",
                "oracle",
                "z_score",
                "neglected_variance",
            ]);
            table.push_row([
                Value::UInt(d as u64),
                Value::UInt(n),
                Value::UInt(samples as u64),
                Value::UInt(seed),
                Value::Float(est.estimate),
                Value::Float(est.std_error),
                Value::Float(oracle),
                Value::Float(z),
                Value::Float(est.neglected_variance),
            ])?;
            emit(&table, &format)
        }
        Cmd::Entropy { cmd } => match cmd {
            EntropyCmd::GridCount { p, m, d, format } => {
                let caps = ResourceCaps::from_env()?;
                let count = grid_count(LpBallQuery::new(p, m, d)?, caps)?;
                let mut table = OutputTable::new(["p", "m", "d", "count"]);
                table.push_row([
                    Value::Float(p),
                    Value::Float(m),
                    Value::UInt(d as u64),
                    Value::Count(count),
                ])?;
                emit(&table, &format)
            }
            EntropyCmd::ChainCheck { points, eps, format } => {
                let caps = ResourceCaps::from_env()?;
                let text = std::fs::read_to_string(&points).map_err(|e| {
                    Error::InvalidArgument(format!(
                        "cannot read points file {}: {e}",
                        points.display()
                    ))
                })?;
                let set = FinitePointSet::parse(&text)?;
                let report = chain_check(&set, eps, caps)?;
                let mut table = OutputTable::new([
                    "eps",
                    "packing_2eps",
                    "packing_2eps_mode",
                    "covering",
                    "packing_eps",
                    "packing_eps_mode",
                    "chain_holds",
                ]);
                table.push_row([
                    Value::Float(eps),
                    Value::UInt(report.packing_two_eps.size as u64),
                    Value::from(packing_mode_str(report.packing_two_eps.mode)),
                    Value::UInt(report.covering as u64),
                    Value::UInt(report.packing_eps.size as u64),
                    Value::from(packing_mode_str(report.packing_eps.mode)),
                    Value::from(if report.chain_holds() { "true" } else { "false" }),
                ])?;
                emit(&table, &format)
            }
        },
        Cmd::Tractability { cmd } => match cmd {
            TractCmd::Classify { spec, notion, s, t, setting, format } => {
                let (spec, _caps) = load_spec(&spec.spec)?;
                let parsed_notion = Notion::parse(&notion, s, t)?;
                let parsed_setting = Setting::parse(&setting)?;
                let verdict = classify(&spec, parsed_notion, parsed_setting)?;
                let limits = verdict
                    .limit_values
                    .iter()
                    .map(|(label, class)| format!("{label} = {}", limit_class_str(*class)))
                    .collect::<Vec<_>>()
                    .join("; ");
                let mut table = OutputTable::new([
                    "notion",
                    "setting",
                    "s",
                    "t",
                    "outcome",
                    "condition",
                    "limits",
                ]);
                table.push_row([
                    Value::from(notion),
                    Value::from(setting.to_ascii_lowercase()),
                    s.map(Value::Float).unwrap_or_else(|| Value::from("")),
                    t.map(Value::Float).unwrap_or_else(|| Value::from("")),
                    Value::from(outcome_str(verdict.outcome)),
                    Value::from(verdict.governing_condition),
                    Value::from(limits),
                ])?;
                emit(&table, &format)
            }
            TractCmd::Probe { spec, s, t, setting, eps, d, format } => {
                let (spec, caps) = load_spec(&spec.spec)?;
                let parsed_setting = Setting::parse(&setting)?;
                let probe = probe_ratio(&spec, s, t, parsed_setting, &eps, &d, caps)?;
                let mut table = OutputTable::new(["kind", "eps", "d", "value"]);
                for (i, &eps) in probe.eps_grid.iter().enumerate() {
                    for (j, &d) in probe.d_grid.iter().enumerate() {
                        table.push_row([
                            Value::from("ratio"),
                            Value::Float(eps),
                            Value::UInt(d as u64),
                            Value::Float(probe.ratios[i][j]),
                        ])?;
                    }
                }
                for (k, (&max, &min)) in probe
                    .antidiagonal_max
                    .iter()
                    .zip(&probe.antidiagonal_min)
                    .enumerate()
                {
                    table.push_row([
                        Value::from("antidiag_max"),
                        Value::from(""),
                        Value::UInt(k as u64),
                        Value::Float(max),
                    ])?;
                    table.push_row([
                        Value::from("antidiag_min"),
                        Value::from(""),
                        Value::UInt(k as u64),
                        Value::Float(min),
                    ])?;
                }
                emit(&table, &format)
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Resource(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
