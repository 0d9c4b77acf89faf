use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use dgtd::driver::{
    benchmark_and_tune, convergence_study, default_candidates, run_simulation, Config, Discretization,
};
use dgtd::layout::LayoutSpec;

#[derive(Parser)]
#[command(name = "dgtd", version, about = "Nodal DG time-domain solver for 2D TM Maxwell")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate to the final time, writing snapshots and report.csv
    Run(Problem),
    /// Measure L² convergence on a sequence of rectangular meshes
    Converge {
        #[command(flatten)]
        problem: Problem,
        /// Cells per side for each level
        #[arg(long, num_args = 1.., value_delimiter = ',', default_values_t = [4, 8, 16])]
        levels: Vec<usize>,
    },
    /// Time every layout and kernel variant and report the fastest
    Tune(Problem),
    /// Print mesh, element and layout statistics
    MeshInfo(Problem),
}

/// Every option is also a config-file key of the same name.
#[derive(Args)]
struct Problem {
    /// Flat `key = value` file applied before the flags
    #[arg(long)]
    config: Option<PathBuf>,
    /// Triangle mesh file
    #[arg(long, conflicts_with = "rect")]
    mesh: Option<String>,
    /// Structured mesh of the unit square with NX x NY cells
    #[arg(long, num_args = 2, value_names = ["NX", "NY"])]
    rect: Option<Vec<String>>,
    #[arg(long, value_name = "N")]
    degree: Option<String>,
    #[arg(long, value_name = "A")]
    alpha: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    mu: Option<String>,
    #[arg(long, value_name = "C")]
    cfl: Option<String>,
    #[arg(long, value_name = "T")]
    final_time: Option<String>,
    #[arg(long, value_name = "G")]
    align: Option<String>,
    #[arg(long)]
    waste_threshold: Option<String>,
    /// Elements per microblock: auto or a count
    #[arg(long, value_name = "auto|k")]
    mb: Option<String>,
    #[arg(long, value_name = "S")]
    snap_every: Option<String>,
    #[arg(long, value_name = "DIR")]
    out: Option<String>,
    #[arg(long, num_args = 2, value_names = ["M", "N"])]
    mode: Option<Vec<String>>,
    /// cavity, pulse or uniform
    #[arg(long)]
    init: Option<String>,
    /// single or double
    #[arg(long)]
    precision: Option<String>,
    /// element, interleaved or fused
    #[arg(long)]
    variant: Option<String>,
    #[arg(long)]
    tune_reps: Option<String>,
    /// Worker threads (defaults to all cores)
    #[arg(long)]
    threads: Option<usize>,
}

impl Problem {
    fn config(&self) -> Result<Config> {
        let mut cfg = Config::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        let joined = |v: &Option<Vec<String>>| v.as_ref().map(|v| v.join(" "));
        let flags = [
            ("mesh", self.mesh.clone()),
            ("rect", joined(&self.rect)),
            ("degree", self.degree.clone()),
            ("alpha", self.alpha.clone()),
            ("epsilon", self.epsilon.clone()),
            ("mu", self.mu.clone()),
            ("cfl", self.cfl.clone()),
            ("final-time", self.final_time.clone()),
            ("align", self.align.clone()),
            ("waste-threshold", self.waste_threshold.clone()),
            ("mb", self.mb.clone()),
            ("snap-every", self.snap_every.clone()),
            ("out", self.out.clone()),
            ("mode", joined(&self.mode)),
            ("init", self.init.clone()),
            ("precision", self.precision.clone()),
            ("variant", self.variant.clone()),
            ("tune-reps", self.tune_reps.clone()),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, &v).with_context(|| format!("--{key}"))?;
            }
        }
        cfg.validate()?;
        if let Some(n) = self.threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .context("configuring the worker pool")?;
        }
        Ok(cfg)
    }
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Run(p) => {
            let cfg = p.config()?;
            let report = run_simulation(&cfg)?;
            report.write_csv(&mut out)?;
            writeln!(
                out,
                "# {} steps, dt = {:.4e}, {} dofs, {:.3e} dof*rhs/s, {:.3} GFLOP/s",
                report.steps, report.dt, report.dofs, report.throughput, report.gflops
            )?;
        }
        Command::Converge { problem, levels } => {
            let cfg = problem.config()?;
            let table = convergence_study(&cfg, &levels)?;
            table.write_csv(&mut out)?;
            if let Some(dir) = &cfg.out {
                std::fs::create_dir_all(dir)?;
                let path = dir.join("converge.csv");
                let mut w = BufWriter::new(File::create(&path).with_context(|| path.display().to_string())?);
                table.write_csv(&mut w)?;
            }
        }
        Command::Tune(p) => {
            let cfg = p.config()?;
            let report = benchmark_and_tune(&cfg, &default_candidates())?;
            report.write_csv(&mut out)?;
            for (c, err) in &report.disqualified {
                writeln!(out, "# disqualified {c}: oracle error {err:.3e}")?;
            }
            writeln!(out, "# chosen {}", report.chosen)?;
            if let Some(dir) = &cfg.out {
                std::fs::create_dir_all(dir)?;
                let path = dir.join("tune.csv");
                let mut w = BufWriter::new(File::create(&path).with_context(|| path.display().to_string())?);
                report.write_csv(&mut w)?;
            }
        }
        Command::MeshInfo(p) => {
            let cfg = p.config()?;
            let disc = Discretization::from_config(&cfg)?;
            let mesh = &disc.mesh;
            let k = mesh.num_elements();
            let b = mesh.bounding_box();
            let areas: Vec<f64> = (0..k).map(|e| mesh.element_area(e)).collect();
            let layout: LayoutSpec = cfg.microblock().layout(disc.reference.np, k, cfg.align)?;
            let (steps, dt) = disc.time_steps(&cfg);
            writeln!(out, "vertices        {}", mesh.vertices.len())?;
            writeln!(out, "elements        {k}")?;
            writeln!(out, "boundary faces  {}", mesh.boundary_face_count())?;
            writeln!(out, "bounding box    [{}, {}] x [{}, {}]", b.x0, b.x1, b.y0, b.y1)?;
            writeln!(out, "area            {}", mesh.area())?;
            writeln!(
                out,
                "element area    min {:.4e} max {:.4e}",
                areas.iter().copied().fold(f64::INFINITY, f64::min),
                areas.iter().copied().fold(0.0, f64::max)
            )?;
            writeln!(out, "degree          {} (Np = {}, Nfp = {})", cfg.degree, disc.reference.np, disc.reference.nfp)?;
            writeln!(out, "dofs per field  {}", disc.num_dofs())?;
            writeln!(
                out,
                "layout          mb = {}, microblock = {} slots, {} microblocks, waste {:.1}%",
                layout.mb_elems,
                layout.mb_size,
                layout.num_microblocks(),
                100.0 * layout.waste_fraction()
            )?;
            writeln!(out, "time step       {dt:.4e} ({steps} steps to t = {})", cfg.final_time)?;
        }
    }
    Ok(())
}
