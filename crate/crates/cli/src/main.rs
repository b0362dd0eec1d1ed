//! `rmt-edgelab`: command-line front end for the edgelab experiments.
//!
//! Every subcommand reads an optional JSON config (`--config`), applies the
//! command-line flags on top of it, validates the result and writes
//! plot-ready CSV. See `docs/config.md` for the schema.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 validation failure, 3 numerical
//! non-convergence.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use edgelab::harness::experiments::{self as exp};
use edgelab::harness::{rate_scan, write_rate_csv, EnsembleConfig, ExperimentConfig};
use edgelab::Error;
use serde_json::{json, Map, Value};

#[derive(Parser)]
#[command(name = "rmt-edgelab", version, about = "Edge statistics of Wigner matrices: sampling, Tracy-Widom laws and convergence rates")]
struct Cli {
    /// JSON config for the subcommand; flags override its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed (ignored by deterministic subcommands).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for output files; without it the main CSV goes to stdout.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Default)]
struct GridArgs {
    #[arg(long, allow_hyphen_values = true)]
    rmin: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    rmax: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
    /// Gauss-Legendre order of the Fredholm discretization.
    #[arg(long)]
    quad_order: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample matrices and their eigenvalues.
    Sample {
        /// `gue`, `goe` or `<law>[(<params>)]/<beta>`.
        #[arg(long)]
        ensemble: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        count: Option<usize>,
        /// `container` or `csv`.
        #[arg(long)]
        format: Option<String>,
    },
    /// Tracy-Widom CDF on a grid.
    Tw {
        #[arg(long)]
        beta: Option<u8>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Finite-N GUE edge CDF against TW_2.
    FiniteN {
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Kolmogorov distance to Tracy-Widom over N, with a rate fit.
    RateScan {
        #[arg(long)]
        ensemble: Option<String>,
        /// Comma-separated dimensions.
        #[arg(long, value_delimiter = ',')]
        n_list: Option<Vec<usize>>,
        #[arg(long)]
        replicas: Option<usize>,
        /// Comma-separated subset of `mc,fredholm`.
        #[arg(long, value_delimiter = ',')]
        channels: Option<Vec<String>>,
        /// `standard` or `goe_refined`.
        #[arg(long)]
        mode: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        r0: Option<f64>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Finite-N edge kernel against the Airy kernel.
    KernelCheck {
        #[arg(long, value_delimiter = ',')]
        n_list: Option<Vec<usize>>,
        /// Point `x,y`; repeatable.
        #[arg(long, allow_hyphen_values = true)]
        point: Vec<String>,
    },
    /// Smoothed-count identities and sandwich bounds per seed.
    BridgeCheck {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        seeds: Option<usize>,
        #[arg(long)]
        ensemble: Option<String>,
    },
    /// Observables along the coupled Ornstein-Uhlenbeck flow.
    FlowScan {
        #[arg(long)]
        ensemble: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        replicas: Option<usize>,
        /// `im_mN`, `F_of_X` or `type0_trace`.
        #[arg(long)]
        observable: Option<String>,
        #[arg(long)]
        t_points: Option<usize>,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Decay of the unmatched resolvent average over N.
    Unmatched {
        #[arg(long)]
        ensemble: Option<String>,
        #[arg(long, value_delimiter = ',')]
        n_list: Option<Vec<usize>>,
        #[arg(long)]
        replicas: Option<usize>,
        /// `unmatched` or `diagonal_analogue`.
        #[arg(long)]
        term: Option<String>,
    },
    /// Weingarten function table with Catalan asymptotics.
    Weingarten {
        /// Permutation order.
        #[arg(long)]
        n: Option<usize>,
        /// Comma-separated matrix dimensions.
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
        /// Permutation in cycle notation, e.g. `(1 2)(3)`; repeatable.
        #[arg(long)]
        gamma: Vec<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// Config JSON with flags layered on top.
struct Layered(Map<String, Value>);

impl Layered {
    fn load(path: Option<&Path>) -> Result<Self, Error> {
        let Some(path) = path else { return Ok(Layered(Map::new())) };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Validation(format!("cannot read config {}: {e}", path.display())))?;
        match serde_json::from_str::<Value>(&text)? {
            Value::Object(m) => Ok(Layered(m)),
            _ => Err(Error::Validation("config must be a JSON object".into())),
        }
    }

    fn set<T: Into<Value>>(&mut self, key: &str, v: Option<T>) {
        if let Some(v) = v {
            self.0.insert(key.into(), v.into());
        }
    }

    fn set_ensemble(&mut self, s: Option<String>) -> Result<(), Error> {
        if let Some(s) = s {
            let e = EnsembleConfig::parse_short(&s)?;
            self.0.insert("ensemble".into(), serde_json::to_value(e)?);
        }
        Ok(())
    }

    fn set_grid(&mut self, g: GridArgs) {
        self.set("order", g.quad_order);
        if g.rmin.is_none() && g.rmax.is_none() && g.step.is_none() {
            return;
        }
        let mut grid = match self.0.remove("grid") {
            Some(Value::Object(m)) => m,
            _ => match serde_json::to_value(edgelab::harness::GridSpec::default()) {
                Ok(Value::Object(m)) => m,
                _ => Map::new(),
            },
        };
        for (k, v) in [("r_min", g.rmin), ("r_max", g.rmax), ("step", g.step)] {
            if let Some(v) = v {
                grid.insert(k.into(), json!(v));
            }
        }
        self.0.insert("grid".into(), Value::Object(grid));
    }

    fn finish<T: serde::de::DeserializeOwned>(self) -> Result<T, Error> {
        Ok(serde_json::from_value(Value::Object(self.0))?)
    }
}

struct Sink {
    out_dir: Option<PathBuf>,
}

impl Sink {
    /// Main CSV: a file in the output directory, or stdout.
    fn main(&self, name: &str) -> Result<Box<dyn Write>, Error> {
        Ok(match &self.out_dir {
            Some(d) => Box::new(BufWriter::new(File::create(d.join(name))?)),
            None => Box::new(BufWriter::new(std::io::stdout().lock())),
        })
    }

    /// Side JSON: written only when an output directory is given.
    fn json<T: serde::Serialize>(&self, name: &str, v: &T) -> Result<(), Error> {
        if let Some(d) = &self.out_dir {
            let mut f = BufWriter::new(File::create(d.join(name))?);
            serde_json::to_writer_pretty(&mut f, v)?;
            writeln!(f)?;
            f.flush()?;
        }
        Ok(())
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    if let Some(d) = &cli.out_dir {
        std::fs::create_dir_all(d)?;
    }
    if cli.threads == Some(0) {
        return Err(Error::Validation("--threads must be >= 1".into()));
    }
    let sink = Sink { out_dir: cli.out_dir.clone() };
    let mut cfg = Layered::load(cli.config.as_deref())?;
    let seeded = |cfg: &mut Layered| {
        cfg.set("seed", cli.seed);
        cfg.set("threads", cli.threads);
    };
    match cli.cmd {
        Cmd::Sample { ensemble, n, count, format } => {
            cfg.set_ensemble(ensemble)?;
            cfg.set("n", n);
            cfg.set("count", count);
            cfg.set("format", format);
            cfg.set("seed", cli.seed);
            let c: exp::SampleConfig = cfg.finish()?;
            let dir = cli.out_dir.unwrap_or_else(|| PathBuf::from("."));
            for f in exp::run_sample(&c, &dir)? {
                println!("{}", dir.join(f).display());
            }
        }
        Cmd::Tw { beta, grid } => {
            cfg.set("beta", beta);
            cfg.set_grid(grid);
            cfg.set("threads", cli.threads);
            let c: exp::TwConfig = cfg.finish()?;
            let mut w = sink.main("tw.csv")?;
            exp::run_tw(&c, &mut w)?;
            w.flush()?;
        }
        Cmd::FiniteN { n, grid } => {
            cfg.set("n", n);
            cfg.set_grid(grid);
            cfg.set("threads", cli.threads);
            let c: exp::FiniteNConfig = cfg.finish()?;
            let mut w = sink.main("finite_n.csv")?;
            let sup = exp::run_finite_n(&c, &mut w)?;
            w.flush()?;
            sink.json("finite_n.json", &json!({ "n": c.n, "r0": c.r0, "sup_gap": sup }))?;
            eprintln!("N = {}: sup_(r >= {}) |F_N - TW_2| = {sup:.3e}", c.n, c.r0);
        }
        Cmd::RateScan { ensemble, n_list, replicas, channels, mode, r0, grid } => {
            cfg.set_ensemble(ensemble)?;
            cfg.set("n_list", n_list);
            cfg.set("replicas", replicas);
            cfg.set("channels", channels);
            cfg.set("mode", mode);
            cfg.set("r0", r0);
            cfg.set_grid(grid);
            seeded(&mut cfg);
            let c: ExperimentConfig = cfg.finish()?;
            let res = rate_scan(&c)?;
            let mut w = sink.main("rate_scan.csv")?;
            write_rate_csv(&mut w, &res.rows)?;
            w.flush()?;
            sink.json("rate_scan.json", &res)?;
            for f in &res.fits {
                match (&f.fit, &f.refused) {
                    (Some(fit), _) => eprintln!(
                        "{}: exponent {:.3} +/- {:.3} (rms residual {:.3})",
                        f.channel.as_str(),
                        fit.exponent,
                        fit.half_width,
                        fit.residual
                    ),
                    (None, Some(why)) => eprintln!("{}: no exponent reported: {why}", f.channel.as_str()),
                    (None, None) => {}
                }
            }
        }
        Cmd::KernelCheck { n_list, point } => {
            cfg.set("n_list", n_list);
            if !point.is_empty() {
                let pts = point.iter().map(|p| parse_point(p)).collect::<Result<Vec<_>, _>>()?;
                cfg.set("points", Some(json!(pts)));
            }
            let c: exp::KernelCheckConfig = cfg.finish()?;
            let (rows, fits) = exp::run_kernel_check(&c)?;
            let mut w = sink.main("kernel_check.csv")?;
            exp::write_kernel_csv(&mut w, &rows)?;
            w.flush()?;
            sink.json("kernel_check.json", &fits)?;
        }
        Cmd::BridgeCheck { n, epsilon, seeds, ensemble } => {
            cfg.set("n", n);
            cfg.set("epsilon", epsilon);
            cfg.set("seeds", seeds);
            cfg.set_ensemble(ensemble)?;
            seeded(&mut cfg);
            let c: exp::BridgeCheckConfig = cfg.finish()?;
            let (records, summary) = exp::run_bridge_check(&c)?;
            let mut w = sink.main("bridge_check.jsonl")?;
            for r in &records {
                serde_json::to_writer(&mut w, r)?;
                writeln!(w)?;
            }
            serde_json::to_writer(&mut w, &json!({ "summary": summary }))?;
            writeln!(w)?;
            w.flush()?;
        }
        Cmd::FlowScan { ensemble, n, replicas, observable, t_points, epsilon } => {
            cfg.set_ensemble(ensemble)?;
            cfg.set("n", n);
            cfg.set("replicas", replicas);
            cfg.set("observable", observable);
            cfg.set("t_points", t_points);
            cfg.set("epsilon", epsilon);
            seeded(&mut cfg);
            let c: exp::FlowScanConfig = cfg.finish()?;
            let res = exp::run_flow_scan(&c)?;
            let mut w = sink.main("flow_scan.csv")?;
            exp::write_flow_csv(&mut w, &res.rows)?;
            w.flush()?;
            sink.json("flow_scan.json", &res.flatness)?;
            for f in &res.flatness {
                eprintln!(
                    "z = {:.5}{:+.5}i: max |mean(t) - mean(0)| = {:.3e} (SE {:.1e}) at t = {:.3}",
                    f.z.re, f.z.im, f.max_dev, f.se_at_max, f.t_at_max
                );
            }
        }
        Cmd::Unmatched { ensemble, n_list, replicas, term } => {
            cfg.set_ensemble(ensemble)?;
            cfg.set("n_list", n_list);
            cfg.set("replicas", replicas);
            cfg.set("term", term);
            seeded(&mut cfg);
            let c: exp::UnmatchedConfig = cfg.finish()?;
            let (rows, summary) = exp::run_unmatched(&c)?;
            let mut w = sink.main("unmatched.csv")?;
            exp::write_unmatched_csv(&mut w, &rows)?;
            w.flush()?;
            sink.json("unmatched.json", &summary)?;
        }
        Cmd::Weingarten { n, dims, gamma } => {
            cfg.set("n", n);
            cfg.set("dims", dims);
            if !gamma.is_empty() {
                cfg.set("gammas", Some(gamma));
            }
            let c: exp::WeingartenConfig = cfg.finish()?;
            let (rows, residuals) = exp::run_weingarten(&c)?;
            let mut w = sink.main("weingarten.csv")?;
            exp::write_weingarten_csv(&mut w, &rows)?;
            w.flush()?;
            sink.json("weingarten.json", &json!({ "dims": c.dims, "orthogonality_residual": residuals }))?;
        }
    }
    Ok(())
}

fn parse_point(s: &str) -> Result<[f64; 2], Error> {
    let bad = || Error::Validation(format!("point `{s}` is not of the form x,y"));
    let (x, y) = s.split_once(',').ok_or_else(bad)?;
    Ok([x.trim().parse().map_err(|_| bad())?, y.trim().parse().map_err(|_| bad())?])
}
