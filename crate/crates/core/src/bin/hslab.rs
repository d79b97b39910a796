use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hslab::cli::execute;
use hslab::compare::StudySetup;
use hslab::config::{Command, RunConfig};
use hslab::erosion::ClockMode;
use hslab::Error;

#[derive(Parser)]
#[command(name = "hslab", version, about = "Competitive Hele-Shaw numerical laboratory")]
struct Cli {
    /// TOML or JSON configuration; its fields override the flags
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Skip SVG output
    #[arg(long, global = true)]
    no_svg: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Critical graph of the three-source quadratic differential
    TraceQd {
        #[arg(long)]
        a0: Option<f64>,
        #[arg(long)]
        a1: Option<f64>,
        #[arg(long)]
        a_inf: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
    },
    /// Level line of a logarithmic potential
    Lemniscate {
        #[arg(long)]
        level: Option<f64>,
    },
    /// Level curves of the four-droplet potential
    FourDroplet {
        #[arg(long, allow_hyphen_values = true)]
        x1: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        x2: Option<f64>,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        b: Option<f64>,
    },
    /// Reduced Green's energy of a disc
    Energy {
        #[arg(long, num_args = 2, allow_hyphen_values = true)]
        center: Option<Vec<f64>>,
        #[arg(long)]
        radius: Option<f64>,
    },
    /// Hadamard gradient and area variation on a circle
    Variation {
        #[arg(long, num_args = 2, allow_hyphen_values = true)]
        center: Option<Vec<f64>>,
        #[arg(long)]
        radius: Option<f64>,
    },
    /// Layout and Green's function of a Green's surface
    Surface {
        #[arg(long, allow_hyphen_values = true)]
        x_min: Option<f64>,
    },
    /// Interface erosion run
    Erode(ErodeArgs),
    /// Mesh-ladder comparison with the continuum interface
    Compare {
        #[arg(long, value_delimiter = ',')]
        meshes: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        torus: bool,
        #[arg(long)]
        threads: Option<usize>,
    },
}

#[derive(Args)]
struct ErodeArgs {
    #[arg(long)]
    mesh: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    torus: bool,
    #[arg(long)]
    round_robin: bool,
    #[arg(long, value_delimiter = ',')]
    snapshots: Option<Vec<f64>>,
    #[arg(long)]
    check_every: Option<u64>,
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn point(v: Option<Vec<f64>>) -> Option<[f64; 2]> {
    v.map(|p| [p[0], p[1]])
}

fn resolve(cli: Cli) -> Result<RunConfig, Error> {
    let mut c = RunConfig::default();
    set(&mut c.output_dir, cli.output_dir);
    set(&mut c.seed, cli.seed);
    c.svg = !cli.no_svg;
    let command = match cli.command {
        Cmd::TraceQd { a0, a1, a_inf, step } => {
            set(&mut c.trace_qd.a0, a0);
            set(&mut c.trace_qd.a1, a1);
            set(&mut c.trace_qd.a_inf, a_inf);
            set(&mut c.trace_qd.step, step);
            Command::TraceQd
        }
        Cmd::Lemniscate { level } => {
            c.lemniscate.level = level.or(c.lemniscate.level);
            Command::Lemniscate
        }
        Cmd::FourDroplet { x1, x2, a, b } => {
            set(&mut c.four_droplet.x1, x1);
            set(&mut c.four_droplet.x2, x2);
            set(&mut c.four_droplet.a, a);
            set(&mut c.four_droplet.b, b);
            Command::FourDroplet
        }
        Cmd::Energy { center, radius } => {
            set(&mut c.energy.center, point(center));
            set(&mut c.energy.radius, radius);
            Command::Energy
        }
        Cmd::Variation { center, radius } => {
            set(&mut c.variation.center, point(center));
            set(&mut c.variation.radius, radius);
            Command::Variation
        }
        Cmd::Surface { x_min } => {
            set(&mut c.surface.x_min, x_min);
            Command::Surface
        }
        Cmd::Erode(a) => {
            let e = &mut c.erode;
            set(&mut e.mesh, a.mesh);
            set(&mut e.t_end, a.t_end);
            set(&mut e.radius, a.radius);
            set(&mut e.snapshot_times, a.snapshots);
            set(&mut e.check_every, a.check_every);
            if a.torus {
                e.setup = StudySetup::TorusPair;
            }
            if a.round_robin {
                e.mode = ClockMode::RoundRobin;
            }
            if e.snapshot_times.iter().any(|&s| s > e.t_end) {
                e.snapshot_times.retain(|&s| s <= e.t_end);
            }
            Command::Erode
        }
        Cmd::Compare { meshes, seeds, t_end, torus, threads } => {
            let k = &mut c.compare;
            set(&mut k.meshes, meshes);
            set(&mut k.seeds, seeds);
            set(&mut k.t_end, t_end);
            k.threads = threads.or(k.threads);
            if torus {
                k.setup = StudySetup::TorusPair;
                k.target = hslab::config::Target::None;
                k.droplet = 0;
            }
            Command::Compare
        }
    };
    c.command = Some(command);
    match cli.config {
        Some(path) => {
            let mut merged = c.overlay_file(&path)?;
            merged.command = Some(command);
            Ok(merged)
        }
        None => {
            c.validate()?;
            Ok(c)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = resolve(cli).and_then(|c| execute(&c));
    match result {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("hslab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
