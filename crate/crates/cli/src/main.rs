//! `smells` — equality-pattern Bell polytopes from the command line.

mod commands;
mod repo;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use smells_core::ResourceCaps;

#[derive(Parser)]
#[command(
    name = "smells",
    about = "Vertices, facets, symmetry classes, and bounds of equality-pattern Bell polytopes",
    version
)]
struct Cli {
    /// Worker thread cap for parallel sections (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(flatten)]
    caps: CapsArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
struct CapsArgs {
    /// Cap on brute-force strategy enumeration.
    #[arg(long, global = true)]
    max_vertices: Option<u64>,
    /// Cap on live rays inside double description.
    #[arg(long, global = true)]
    max_dd_rays: Option<u64>,
    /// Cap on the total Hilbert dimension d^n.
    #[arg(long, global = true)]
    max_hilbert_dim: Option<u64>,
    /// Config file with `caps.max_vertices = N` style lines.
    #[arg(long, global = true)]
    caps_file: Option<PathBuf>,
}

impl CapsArgs {
    fn resolve(&self) -> anyhow::Result<ResourceCaps> {
        let mut caps = ResourceCaps::default();
        if let Some(path) = &self.caps_file {
            let text = std::fs::read_to_string(path)?;
            for (ln, raw) in text.lines().enumerate() {
                let line = raw.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let (key, value) = line
                    .split_once('=')
                    .ok_or_else(|| anyhow::anyhow!("{}:{}: expected key = value", path.display(), ln + 1))?;
                let value: u64 = value.trim().parse().map_err(|_| {
                    anyhow::anyhow!("{}:{}: bad number {value:?}", path.display(), ln + 1)
                })?;
                match key.trim() {
                    "caps.max_vertices" => caps.max_vertices = value,
                    "caps.max_dd_rays" => caps.max_dd_rays = value,
                    "caps.max_hilbert_dim" => caps.max_hilbert_dim = value,
                    other => anyhow::bail!(
                        "{}:{}: unknown key {other:?}",
                        path.display(),
                        ln + 1
                    ),
                }
            }
        }
        if let Some(v) = self.max_vertices {
            caps.max_vertices = v;
        }
        if let Some(v) = self.max_dd_rays {
            caps.max_dd_rays = v;
        }
        if let Some(v) = self.max_hilbert_dim {
            caps.max_hilbert_dim = v;
        }
        Ok(caps)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Saturating outcome count of a scenario.
    Kstar {
        #[arg(long)]
        parties: usize,
        /// Input count (homogeneous), or a comma list for unanimous scenarios.
        #[arg(long)]
        inputs: String,
        /// Use the unanimous saturation threshold min(m_i) + 1.
        #[arg(long)]
        unanimous: bool,
    },
    /// Enumerate the local vertices of a scenario.
    Vertices {
        /// Scenario spec, e.g. "n=3 m=2,2,2 k=3 mode=smells".
        #[arg(long)]
        scenario: String,
        #[arg(long, default_value = "csv", value_parser = ["csv", "text"])]
        format: String,
        /// Enumerate at the stated k even beyond the saturation threshold.
        #[arg(long)]
        no_saturation_cap: bool,
        /// Use the direct construction (unanimous mode only).
        #[arg(long)]
        constructive: bool,
        /// Drop the all-different (all-zero) behavior from the output.
        #[arg(long)]
        drop_all_different: bool,
    },
    /// Closed-form vertex count next to the brute-force count.
    Counts {
        #[arg(long)]
        scenario: String,
    },
    /// Full facet enumeration (double description) of a scenario polytope.
    Facets {
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        no_saturation_cap: bool,
        #[arg(long)]
        drop_all_different: bool,
    },
    /// Facet classes by symmetry-reduced adjacency decomposition.
    Classify {
        #[arg(long)]
        scenario: String,
        /// Write one .ineq + .meta per class under this directory
        /// (defaults to $SMELLS_REPO when set).
        #[arg(long)]
        repo: Option<PathBuf>,
        #[arg(long)]
        drop_all_different: bool,
        /// Skip the per-class standard-polytope facet checks.
        #[arg(long)]
        no_standard_checks: bool,
    },
    /// Bounds of an inequality file.
    Bound {
        #[arg(long = "type", value_parser = ["local", "signaling", "ns", "bilocal-ns"])]
        bound_type: String,
        /// Outcome count (defaults to the inequality's native k).
        #[arg(long)]
        k: Option<usize>,
        file: PathBuf,
    },
    /// Unanimous inequality -> deterministic game transform.
    Game {
        #[arg(long)]
        transform: PathBuf,
    },
    /// Emit a named inequality family as .ineq.
    Family {
        #[arg(long, value_parser = ["f-n2"])]
        name: String,
        #[arg(long)]
        parties: usize,
        /// Output path (stdout when absent).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Built-in inequality catalog.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Seesaw lower bound on the quantum value of an inequality.
    Seesaw {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 50)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Hold the state fixed at the density matrix in this file.
        #[arg(long)]
        state: Option<PathBuf>,
        /// Hold the state fixed at rho_{p,theta}: two comma-separated floats.
        #[arg(long)]
        rho: Option<String>,
        /// Write the optimizing strategy here.
        #[arg(short, long)]
        output: Option<PathBuf>,
        file: PathBuf,
    },
    /// Quantum state and strategy diagnostics.
    Quantum {
        /// rho_{p,theta} parameters "p,theta".
        #[arg(long)]
        rho: Option<String>,
        /// Density matrix file.
        #[arg(long)]
        state: Option<PathBuf>,
        /// Strategy file to re-evaluate.
        #[arg(long)]
        strategy: Option<PathBuf>,
        /// Inequality to evaluate the strategy against.
        #[arg(long)]
        ineq: Option<PathBuf>,
    },
    /// Verification suites over the reference tables or the catalog.
    Verify {
        #[arg(long, value_parser = ["paper-tables", "catalog"])]
        suite: String,
        /// small: bipartite plus (3,2,x); full: adds the (4,2,2) unanimous run.
        #[arg(long, default_value = "small", value_parser = ["small", "full"])]
        max_scenario: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Skip seesaw checks in the catalog suite.
        #[arg(long)]
        skip_quantum: bool,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// All entry names.
    List,
    /// Print one entry in .ineq form.
    Show { name: String },
    /// Recompute an entry's expected values and report.
    VerifyEntry {
        name: String,
        #[arg(long)]
        skip_quantum: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    // die quietly when a pipe closes under us (e.g. piping into head)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    if cli.threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    let caps = match cli.caps.resolve() {
        Ok(caps) => caps,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Kstar { parties, inputs, unanimous } => {
            commands::kstar(parties, &inputs, unanimous)
        }
        Command::Vertices {
            scenario,
            format,
            no_saturation_cap,
            constructive,
            drop_all_different,
        } => commands::vertices(
            &scenario,
            &format,
            no_saturation_cap,
            constructive,
            drop_all_different,
            &caps,
        ),
        Command::Counts { scenario } => commands::counts(&scenario, &caps),
        Command::Facets { scenario, no_saturation_cap, drop_all_different } => {
            commands::facets(&scenario, no_saturation_cap, drop_all_different, &caps)
        }
        Command::Classify {
            scenario,
            repo,
            drop_all_different,
            no_standard_checks,
        } => commands::classify(&scenario, repo, drop_all_different, no_standard_checks, &caps),
        Command::Bound { bound_type, k, file } => commands::bound(&bound_type, k, &file, &caps),
        Command::Game { transform } => commands::game(&transform),
        Command::Family { name, parties, output } => {
            commands::family(&name, parties, output.as_deref())
        }
        Command::Catalog { action } => match action {
            CatalogAction::List => commands::catalog_list(),
            CatalogAction::Show { name } => commands::catalog_show(&name),
            CatalogAction::VerifyEntry { name, skip_quantum, seed } => {
                verify::verify_entry(&name, skip_quantum, seed, &caps)
            }
        },
        Command::Seesaw { dim, restarts, seed, state, rho, output, file } => {
            commands::seesaw(dim, restarts, seed, state.as_deref(), rho.as_deref(), output.as_deref(), &file, &caps)
        }
        Command::Quantum { rho, state, strategy, ineq } => {
            commands::quantum(rho.as_deref(), state.as_deref(), strategy.as_deref(), ineq.as_deref())
        }
        Command::Verify { suite, max_scenario, seed, skip_quantum } => {
            verify::run_suite(&suite, &max_scenario, seed, skip_quantum, &caps)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
