use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use heat_smc::harness::{
    gain_table, run_experiment, run_reduced, sweep, write_reduced, write_sweep_csv, ConfigDocument, ExperimentConfig,
    LawKind, ParamGrid,
};
use heat_smc::spectral::solve_eigenvalue;

/// Boundary sliding-mode control experiments on the 1D heat equation.
#[derive(Debug, Parser)]
#[command(name = "heat-smc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Config file (TOML with dotted keys).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for output files; stdout when omitted (except simulations).
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Override a config key, e.g. `--set gains.k=3.0`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    c0: Option<f64>,
    /// Grid nodes.
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    branch: Option<usize>,
}

impl Common {
    fn document(&self) -> Result<ConfigDocument> {
        let mut doc = match &self.config {
            Some(p) => ConfigDocument::load(p)?,
            None => ConfigDocument::default(),
        };
        let flags = [
            ("c0", self.c0.map(|v| v.to_string())),
            ("nx", self.nx.map(|v| v.to_string())),
            ("dt", self.dt.map(|v| v.to_string())),
            ("horizon", self.horizon.map(|v| v.to_string())),
            ("branch", self.branch.map(|v| v.to_string())),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                doc.set(key, &v)?;
            }
        }
        doc.apply_overrides(self.set.iter().map(String::as_str))?;
        Ok(doc)
    }

    fn experiment(&self) -> Result<ExperimentConfig> {
        Ok(self.document()?.to_config()?)
    }

    /// Writes to `out_dir/name`, or stdout.
    fn output(&self, name: &str) -> Result<Box<dyn Write>> {
        match &self.out_dir {
            Some(dir) => {
                std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                let path = dir.join(name);
                let f = std::fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                Ok(Box::new(std::io::BufWriter::new(f)))
            }
            None => Ok(Box::new(std::io::stdout().lock())),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SignArg {
    Implicit,
    Explicit,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReducedLaw {
    Smc,
    St,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the eigenproblem; prints `r,lambda,b_star_phi,residual`.
    Eigen(Common),
    /// Check both laws' gain conditions; prints `law,condition,lhs,rhs,margin,pass`.
    ValidateGains(Common),
    /// Closed-loop run with the discontinuous law.
    SimulateSmc {
        #[command(flatten)]
        common: Common,
        /// Selection of sign(σ) at σ = 0.
        #[arg(long, value_enum)]
        sign: Option<SignArg>,
    },
    /// Closed-loop run with the super-twisting law.
    SimulateSt(Common),
    /// Scalar sliding-variable dynamics; prints `t,sigma[,w],selection`.
    ReducedOde {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        law: ReducedLaw,
    },
    /// Run the cartesian product of `--grid key=v1,v2,...` axes.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "KEY=V1,V2,...")]
        grid: Vec<String>,
    },
}

fn eigen(common: &Common) -> Result<bool> {
    let c = common.experiment()?;
    let pair = solve_eigenvalue(c.sim.c0, c.sim.branch)?;
    let mut out = common.output("eigen.csv")?;
    if common.out_dir.is_some() {
        writeln!(out, "r,lambda,b_star_phi,residual")?;
    }
    writeln!(out, "{},{},{},{}", pair.r(), pair.lambda(), pair.b_star_phi(), pair.residual())?;
    out.flush()?;
    Ok(true)
}

fn validate_gains(common: &Common) -> Result<bool> {
    let rows = gain_table(&common.experiment()?)?;
    let mut out = common.output("gains.csv")?;
    writeln!(out, "law,condition,lhs,rhs,margin,pass")?;
    for r in &rows {
        writeln!(out, "{},{},{},{},{},{}", r.law, r.condition, r.lhs, r.rhs, r.margin(), r.pass())?;
    }
    out.flush()?;
    Ok(rows.iter().all(|r| r.pass()))
}

fn simulate(common: &Common, law: LawKind, sign: Option<SignArg>) -> Result<bool> {
    let mut doc = common.document()?;
    doc.set("law", law.as_str())?;
    if let Some(s) = sign {
        doc.set(
            "sign",
            match s {
                SignArg::Implicit => "implicit",
                SignArg::Explicit => "explicit",
            },
        )?;
    }
    let config = doc.to_config()?;
    let record = run_experiment(&config)?;
    let dir = common.out_dir.clone().unwrap_or_else(|| PathBuf::from("out"));
    let files = record.export(&dir)?;
    let m = &record.metrics;
    let fmt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_else(|| "-".into());
    println!("law            {}", law.as_str());
    println!("t_reach        {}", fmt(m.t_reach));
    println!("reach_bound    {}", fmt(m.reach_bound));
    println!("decay_rate     {}", fmt(m.decay_rate));
    println!("chattering     {}", fmt(m.chattering_index));
    println!("sigma_defect   {}", m.sigma_defect);
    for f in files {
        println!("wrote          {}", f.display());
    }
    Ok(true)
}

fn reduced(common: &Common, law: ReducedLaw) -> Result<bool> {
    let config = common.experiment()?;
    let (kind, name) = match law {
        ReducedLaw::Smc => (LawKind::Smc, "reduced_smc.csv"),
        ReducedLaw::St => (LawKind::St, "reduced_st.csv"),
    };
    let traj = run_reduced(&config, kind)?;
    write_reduced(common.output(name)?, &traj, config.reduced.stride)?;
    Ok(true)
}

fn run_sweep(common: &Common, axes: &[String]) -> Result<bool> {
    let base = common.document()?;
    // Catch config errors in the base before fanning out.
    base.to_config()?;
    let mut grid = ParamGrid::new();
    for a in axes {
        grid.push_spec(a)?;
    }
    let rows = sweep(&base, &grid);
    write_sweep_csv(common.output("sweep.csv")?, &grid, &rows)?;
    Ok(rows.iter().all(|r| r.metrics().is_some()))
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Eigen(c) => eigen(c),
        Command::ValidateGains(c) => validate_gains(c),
        Command::SimulateSmc { common, sign } => simulate(common, LawKind::Smc, *sign),
        Command::SimulateSt(c) => simulate(c, LawKind::St, None),
        Command::ReducedOde { common, law } => reduced(common, *law),
        Command::Sweep { common, grid } => run_sweep(common, grid),
    }
}

fn is_gate_failure(e: &anyhow::Error) -> bool {
    matches!(
        e.downcast_ref::<heat_smc::Error>(),
        Some(heat_smc::Error::GainsRejected { .. } | heat_smc::Error::MissingDerivativeBound)
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if is_gate_failure(&e) => {
            eprintln!("gate failed: {e:#}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
