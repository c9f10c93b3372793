use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use afrelay::experiment::{
    self, expand_series, linear_to_db, load_experiment, presets, RunOptions,
};
use afrelay::{analysis, sir};

#[derive(Parser)]
#[command(
    name = "afrelay",
    about = "Outage bounds and diversity/coding gains for interference-limited multi-hop AF relaying",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config (a TOML file path or a preset name) and
    /// write the CSV report
    Run {
        /// Config file path or preset name
        config: String,
        /// CSV output path (overrides the config's output.path)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Monte-Carlo seed override
        #[arg(long)]
        seed: Option<u64>,
        /// Monte-Carlo trial count override
        #[arg(long)]
        trials: Option<u64>,
        /// Skip the Monte-Carlo pass; emit closed forms only
        #[arg(long)]
        analysis_only: bool,
        /// Worker threads for the Monte-Carlo chunks (0 = all cores);
        /// never affects the results, only wall time
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Print the diversity and coding gains of a config
    Gains {
        /// Config file path or preset name
        config: String,
    },
    /// Built-in preset configs
    Presets {
        #[command(subcommand)]
        command: PresetCommand,
    },
}

#[derive(Subcommand)]
enum PresetCommand {
    /// List preset names and what they model
    List,
    /// Print a preset's TOML so it can be copied and edited
    Show { name: String },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };

    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> afrelay::Result<u8> {
    match cli.command {
        Command::Run { config, out, seed, trials, analysis_only, workers } => {
            let exp = load_experiment(&config)?;
            let opts = RunOptions { seed, trials, analysis_only, workers, out };
            let (report, written) = experiment::run_experiment(&exp, &opts)?;

            println!("threshold: {} dB", report.threshold_db);
            for series in &report.series {
                println!(
                    "{}: G_d = {:.6}, G_c = {:.6} ({:.3} dB){}",
                    series.label,
                    series.gains.diversity,
                    series.gains.coding,
                    linear_to_db(series.gains.coding),
                    if series.symmetric { "" } else { " [worst-hop]" },
                );
            }
            let flags = report.flag_count();
            if flags > 0 {
                eprintln!("warning: {flags} point(s) fell outside the closed-form bracket");
            }
            match written {
                Some(path) => println!("wrote {}", path.display()),
                None => println!("no output path configured; nothing written"),
            }
            Ok(report.exit_code() as u8)
        }
        Command::Gains { config } => {
            let exp = load_experiment(&config)?;
            let power = experiment::db_to_linear(exp.system.power_db);
            for series in expand_series(&exp.system)? {
                let k = series.hops.len();
                let config = series.config_at(exp.sweep.snr_db[0], power, exp.system.mod_const)?;
                let hop = config.hops[sir::worst_hop(&config)];
                let gains = analysis::gains(&hop, power, k, exp.system.mod_const)?;
                println!(
                    "{}: G_d = {:.6}, G_c = {:.6} ({:.3} dB)",
                    series.label,
                    gains.diversity,
                    gains.coding,
                    linear_to_db(gains.coding)
                );
                if hop.alpha == 1.0 {
                    let special = analysis::gains_rayleigh_desired(&hop, power, k, exp.system.mod_const);
                    println!("  rayleigh-desired form: G_c = {:.6}", special.coding);
                }
                if hop.beta == 1.0 {
                    let special =
                        analysis::gains_rayleigh_interference(&hop, power, k, exp.system.mod_const)?;
                    println!("  rayleigh-interference form: G_c = {:.6}", special.coding);
                }
            }
            Ok(0)
        }
        Command::Presets { command } => {
            match command {
                PresetCommand::List => {
                    for (name, summary, _) in presets() {
                        println!("{name:8} {summary}");
                    }
                }
                PresetCommand::Show { name } => match experiment::preset(&name) {
                    Some(text) => print!("{text}"),
                    None => {
                        return Err(afrelay::Error::Config(format!("no preset named '{name}'")))
                    }
                },
            }
            Ok(0)
        }
    }
}
