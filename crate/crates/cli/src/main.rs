//! `mipt`: batch runs of the monitored-circuit simulations.
//!
//! Every subcommand takes its parameters from flags, optionally layered over
//! a flat `key = value` file given by `--config`. Results go to a CSV table
//! plus a one-line JSON manifest holding the effective configuration.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "mipt", version, about = "Monitored random circuit simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Flat `key = value` file; flags override its entries
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Output CSV path (manifest goes to <stem>.manifest.jsonl)
    #[arg(long, value_name = "FILE")]
    out: Option<String>,
    /// Master seed
    #[arg(long, value_name = "N")]
    seed: Option<String>,
    /// Worker threads [default: $MIPT_WORKERS or all cores]
    #[arg(long, value_name = "N")]
    workers: Option<String>,
}

impl Common {
    fn flags(&self) -> Vec<(&'static str, Option<String>)> {
        vec![("out", self.out.clone()), ("seed", self.seed.clone()), ("workers", self.workers.clone())]
    }
}

/// Declares a subcommand's argument struct: every key is an optional string
/// flag so that flags and config entries share one parser.
macro_rules! params {
    ($name:ident { $($(#[doc = $doc:literal])* $field:ident = $key:literal),* $(,)? }) => {
        #[derive(Args, Debug)]
        pub struct $name {
            #[command(flatten)]
            common: Common,
            $(
                $(#[doc = $doc])*
                #[arg(long = $key, value_name = "VALUE")]
                $field: Option<String>,
            )*
        }

        impl $name {
            fn flags(&self) -> Vec<(&'static str, Option<String>)> {
                let mut v = self.common.flags();
                $(v.push(($key, self.$field.clone()));)*
                v
            }
        }
    };
}

params!(MrcArgs {
    /// System size [default: 64]
    len = "L",
    /// Layers [default: 4L]
    depth = "depth",
    /// Measurement probability per site and layer [default: 0.16]
    p = "p",
    /// Trajectories [default: 100]
    traj = "traj",
    /// brickwork | random [default: brickwork]
    layout = "layout",
    /// periodic | open [default: periodic]
    boundary = "boundary",
    /// stabilizer | dense [default: stabilizer]
    engine = "engine",
    /// Comma-separated cut positions, region 0..c [default: L/2]
    cuts = "cuts",
    /// Record I3 every this many layers, 0 disables [default: 0]
    i3_stride = "i3-stride",
});

params!(PurifyArgs {
    /// System size [default: 64]
    len = "L",
    /// Layers [default: 4L]
    depth = "depth",
    /// Measurement probability [default: 0.3]
    p = "p",
    /// Trajectories [default: 100]
    traj = "traj",
    /// periodic | open [default: periodic]
    boundary = "boundary",
});

params!(AncillaArgs {
    /// Comma-separated system sizes [default: 16,32,64]
    sizes = "sizes",
    /// Comma-separated measurement probabilities [default: 0.10,0.12,...,0.22]
    ps = "ps",
    /// Trajectories per point [default: 100]
    traj = "traj",
});

params!(SpinglassArgs {
    /// System size [default: 64]
    len = "L",
    /// Comma-separated ZZ probabilities [default: 0.1,0.3,0.5,0.7,0.9]
    rs = "rs",
    /// Sweeps of L measurements [default: 4L]
    sweeps = "sweeps",
    /// Trajectories [default: 50]
    traj = "traj",
});

params!(KpzArgs {
    /// Number of sites [default: 1024]
    len = "L",
    /// Sweeps [default: 1000]
    sweeps = "sweeps",
    /// Independent runs [default: 16]
    runs = "runs",
    /// random | brickwork | sequential [default: random]
    placement = "placement",
    /// periodic | pinned [default: periodic]
    boundary = "boundary",
});

params!(OpspreadArgs {
    /// Number of sites [default: 128]
    len = "L",
    /// Half-layers [default: 100]
    depth = "depth",
    /// Local dimension for the exact kernel [default: 2]
    d = "d",
    /// Clifford circuits for the empirical profile, needs d = 2 [default: 0]
    circuits = "circuits",
});

params!(MincutArgs {
    /// Comma-separated system sizes [default: 32,64,128]
    sizes = "sizes",
    /// Comma-separated measurement probabilities [default: 0.40,0.42,...,0.60]
    ps = "ps",
    /// Lattices per point [default: 200]
    samples = "samples",
    /// Depth T = factor * L [default: 2]
    depth_factor = "depth-factor",
    /// periodic | open [default: periodic]
    boundary = "boundary",
});

params!(WeingartenArgs {
    /// Number of replicas [default: 3]
    q = "Q",
    /// Hilbert-space dimension [default: 4]
    d = "D",
});

params!(ChargeArgs {
    /// diffusion | dead [default: diffusion]
    mode = "mode",
    /// Number of sites [default: 256]
    len = "L",
    /// Gate layers, diffusion mode [default: 1000]
    t_max = "t-max",
    /// Runs, diffusion mode [default: 200]
    runs = "runs",
    /// domain-wall | tagged [default: domain-wall]
    probe = "probe",
    /// Comma-separated region sizes, dead mode [default: 1,2,...,12]
    ells = "ells",
    /// Samples, dead mode [default: 1000000]
    samples = "samples",
});

params!(CollapseArgs {
    /// Input CSV with size, parameter, value and sem columns
    input = "input",
    /// Size column [default: L]
    size_col = "size-col",
    /// Parameter column [default: p]
    param_col = "param-col",
    /// Value column [default: value]
    value_col = "value-col",
    /// Standard-error column [default: <value-col>_sem]
    sem_col = "sem-col",
    /// Critical point search range lo,hi [default: 0,1]
    pc_range = "pc-range",
    /// Exponent search range lo,hi [default: 0.5,3]
    nu_range = "nu-range",
    /// Grid points per axis [default: 41]
    grid = "grid",
    /// Bootstrap resamples [default: 100]
    bootstrap = "bootstrap",
});

#[derive(Subcommand)]
enum Command {
    /// Monitored random Clifford circuit trajectories
    Mrc(MrcArgs),
    /// Purification of a maximally mixed initial state
    Purify(PurifyArgs),
    /// Reference-qubit entropy and I3 scan over sizes and rates
    Ancilla(AncillaArgs),
    /// Edwards-Anderson order of measurement-only dynamics
    Spinglass(SpinglassArgs),
    /// Minimal surface-growth model of entanglement
    Kpz(KpzArgs),
    /// Operator-front distribution, exact kernel and Clifford circuits
    Opspread(OpspreadArgs),
    /// Minimal cuts on measurement-diluted lattices
    Mincut(MincutArgs),
    /// Exact Weingarten table
    Weingarten(WeingartenArgs),
    /// Charge transport under U(1) gates
    Charge(ChargeArgs),
    /// Finite-size-scaling collapse of a CSV table
    Collapse(CollapseArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
