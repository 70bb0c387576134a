use std::path::PathBuf;
use std::process::ExitCode;

use thinfilm::config::{parse_config, Model, Overrides};
use thinfilm::run::{run, RunError};

const USAGE: &str = "\
usage: thinfilm <geometry|lubricate|shallow> --config <path> [--out <dir>] [--grid N1xN2] [--tol X]

subcommands:
  geometry    evaluate and dump the surface geometry (and coefficients)
  lubricate   solve the generalized thin-film pressure equation
  shallow     time-integrate the traction-driven gap/velocity system

options:
  --config <path>   run configuration file (required)
  --out <dir>       output directory (overrides the config)
  --grid N1xN2      grid dimensions (overrides the config)
  --tol X           linear-solver relative residual (overrides the config)

environment:
  THINFILM_THREADS  worker threads for geometry table evaluation (default 1;
                    the result is identical for any thread count)
";

fn parse_args() -> Result<(Model, PathBuf, Overrides), String> {
    let mut args = std::env::args().skip(1);
    let sub = args
        .next()
        .ok_or_else(|| "missing subcommand".to_string())?;
    if sub == "--help" || sub == "-h" || sub == "help" {
        return Err(String::new());
    }
    let model = Model::from_name(&sub)
        .ok_or_else(|| format!("unknown subcommand '{sub}' (geometry, lubricate, shallow)"))?;
    let mut config: Option<PathBuf> = None;
    let mut overrides = Overrides::default();
    while let Some(flag) = args.next() {
        let mut value = |name: &str| {
            args.next()
                .ok_or_else(|| format!("flag {name} needs a value"))
        };
        match flag.as_str() {
            "--config" => config = Some(PathBuf::from(value("--config")?)),
            "--out" => overrides.out_dir = Some(PathBuf::from(value("--out")?)),
            "--grid" => {
                let v = value("--grid")?;
                let parts: Vec<&str> = v.split('x').collect();
                let parsed = (parts.len() == 2)
                    .then(|| {
                        Some((
                            parts[0].parse::<usize>().ok()?,
                            parts[1].parse::<usize>().ok()?,
                        ))
                    })
                    .flatten();
                match parsed {
                    Some(dims) => overrides.grid = Some(dims),
                    None => return Err(format!("--grid expects N1xN2, found '{v}'")),
                }
            }
            "--tol" => {
                let v = value("--tol")?;
                match v.parse::<f64>() {
                    Ok(x) => overrides.tol = Some(x),
                    Err(_) => return Err(format!("--tol expects a number, found '{v}'")),
                }
            }
            other => return Err(format!("unknown flag '{other}'")),
        }
    }
    let config = config.ok_or_else(|| "missing --config <path>".to_string())?;
    Ok((model, config, overrides))
}

fn main() -> ExitCode {
    let (model, config_path, overrides) = match parse_args() {
        Ok(v) => v,
        Err(msg) => {
            if msg.is_empty() {
                print!("{USAGE}");
                return ExitCode::SUCCESS;
            }
            eprintln!("error: {msg}");
            eprint!("{USAGE}");
            return ExitCode::from(2);
        }
    };

    let cfg = match parse_config(&config_path, model, &overrides) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            let code = RunError::Config(e).exit_code();
            return ExitCode::from(code as u8);
        }
    };

    match run(&cfg) {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
