use std::fmt;
use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{Config, MbChoice, MeshSource, Precision};
use super::run::Discretization;
use crate::error::{Error, Result};
use crate::kernels::{dense_oracle_rhs, KernelVariant, Material};
use crate::mesh::Mesh;
use crate::real::Real;

/// Relative tolerance of the oracle spot check.
pub const GATE_TOLERANCE: f64 = 1e-10;
/// Meshes larger than this are gated on a small stand-in mesh.
const GATE_MAX_ELEMENTS: usize = 512;
const WARMUP: usize = 3;
const GATE_SEED: u64 = 0x5eed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Candidate {
    pub mb: MbChoice,
    pub variant: KernelVariant,
}

impl fmt::Display for Candidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "mb={} variant={}", self.mb, self.variant)
    }
}

/// `{auto, 1, 2, 4, 8}` crossed with every kernel variant.
pub fn default_candidates() -> Vec<Candidate> {
    let mbs = [
        MbChoice::Auto,
        MbChoice::Fixed(1),
        MbChoice::Fixed(2),
        MbChoice::Fixed(4),
        MbChoice::Fixed(8),
    ];
    mbs.iter()
        .flat_map(|&mb| KernelVariant::ALL.iter().map(move |&variant| Candidate { mb, variant }))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct TuneRow {
    pub candidate: Candidate,
    /// Elements per microblock after resolving `auto`.
    pub mb_elems: usize,
    pub oracle_error: f64,
    pub median_seconds: f64,
    /// DOF * RHS evaluations per second.
    pub throughput: f64,
    pub gflops: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TuneReport {
    /// Timed candidates, in input order.
    pub rows: Vec<TuneRow>,
    /// Candidates that failed the oracle gate, with their relative error.
    pub disqualified: Vec<(Candidate, f64)>,
    pub chosen: Candidate,
}

impl TuneReport {
    pub fn chosen_row(&self) -> &TuneRow {
        self.rows
            .iter()
            .find(|r| r.candidate == self.chosen)
            .expect("the chosen candidate was timed")
    }

    pub fn write_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(w, "mb,variant,mb_elems,oracle_error,median_ms,throughput,gflops,chosen")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{:e},{:.6},{:.6e},{:.4},{}",
                r.candidate.mb,
                r.candidate.variant,
                r.mb_elems,
                r.oracle_error,
                r.median_seconds * 1e3,
                r.throughput,
                r.gflops,
                r.candidate == self.chosen
            )?;
        }
        Ok(())
    }
}

/// Gates every candidate against the dense oracle, times the survivors on
/// the configured problem and selects the fastest.
pub fn benchmark_and_tune(cfg: &Config, candidates: &[Candidate]) -> Result<TuneReport> {
    if candidates.is_empty() {
        return Err(Error::Config("no tuning candidates given".into()));
    }
    cfg.validate()?;
    let disc = Discretization::from_config(cfg)?;
    let gate = GateProblem::new(cfg, &disc)?;

    let mut passed = Vec::new();
    let mut disqualified = Vec::new();
    for &c in candidates {
        let err = gate.error(cfg, c)?;
        if err < GATE_TOLERANCE {
            passed.push((c, err));
        } else {
            log::warn!("{c} disqualified: oracle relative error {err:.3e}");
            disqualified.push((c, err));
        }
    }
    if passed.is_empty() {
        return Err(Error::Config("every tuning candidate failed the oracle check".into()));
    }

    let mut rows = Vec::with_capacity(passed.len());
    for (c, err) in passed {
        let row = match cfg.precision {
            Precision::Single => time_candidate::<f32>(cfg, &disc, c, err)?,
            Precision::Double => time_candidate::<f64>(cfg, &disc, c, err)?,
        };
        log::info!("{c}: median {:.4} ms", row.median_seconds * 1e3);
        rows.push(row);
    }
    let chosen = rows
        .iter()
        .min_by(|a, b| a.median_seconds.total_cmp(&b.median_seconds))
        .map(|r| r.candidate)
        .expect("at least one candidate was timed");
    Ok(TuneReport {
        rows,
        disqualified,
        chosen,
    })
}

fn with_candidate(cfg: &Config, c: Candidate) -> Config {
    let mut cfg = cfg.clone();
    cfg.mb = c.mb;
    cfg.variant = c.variant;
    cfg
}

/// Random state and oracle RHS in double precision, unit material.
struct GateProblem {
    disc: Discretization,
    state: [Vec<f64>; 3],
    expected: [Vec<f64>; 3],
    scale: f64,
}

impl GateProblem {
    fn new(cfg: &Config, disc: &Discretization) -> Result<Self> {
        let disc = if disc.mesh.num_elements() <= GATE_MAX_ELEMENTS {
            disc.clone()
        } else {
            let extent = match &cfg.mesh {
                MeshSource::Rect { extent, .. } => *extent,
                MeshSource::File(_) => disc.mesh.bounding_box(),
            };
            Discretization::new(Mesh::rectangle(4, 4, extent)?, cfg.degree)?
        };
        let n = disc.num_dofs();
        let mut rng = ChaCha8Rng::seed_from_u64(GATE_SEED);
        let state: [Vec<f64>; 3] = std::array::from_fn(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let expected = dense_oracle_rhs(
            [&state[0], &state[1], &state[2]],
            &disc.mesh,
            &disc.reference,
            cfg.alpha,
        );
        let scale = expected
            .iter()
            .flatten()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(f64::MIN_POSITIVE);
        Ok(Self {
            disc,
            state,
            expected,
            scale,
        })
    }

    fn error(&self, cfg: &Config, c: Candidate) -> Result<f64> {
        let mut cfg = with_candidate(cfg, c);
        cfg.epsilon = Material::default().epsilon;
        cfg.mu = Material::default().mu;
        let op = self.disc.operator::<f64>(&cfg)?;
        let mut q = op.zeros();
        q.scatter([&self.state[0], &self.state[1], &self.state[2]])?;
        let got = op.rhs(&q).gather();
        let diff = got
            .iter()
            .zip(&self.expected)
            .flat_map(|(g, e)| g.iter().zip(e).map(|(a, b)| (a - b).abs()))
            .fold(0.0f64, f64::max);
        Ok(diff / self.scale)
    }
}

fn time_candidate<T: Real>(cfg: &Config, disc: &Discretization, c: Candidate, oracle_error: f64) -> Result<TuneRow> {
    let op = disc.operator::<T>(&with_candidate(cfg, c))?;
    let mut q = op.zeros();
    let n = disc.num_dofs();
    let mut rng = ChaCha8Rng::seed_from_u64(GATE_SEED);
    let fields: [Vec<f64>; 3] = std::array::from_fn(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect());
    q.scatter([&fields[0], &fields[1], &fields[2]])?;
    let mut out = op.zeros();
    let mut flux = op.flux_buffer();
    for _ in 0..WARMUP {
        op.compute_rhs(&q, &mut out, &mut flux)?;
    }
    let reps = cfg.tune_reps.max(1);
    let mut times = Vec::with_capacity(reps);
    for _ in 0..reps {
        let start = Instant::now();
        op.compute_rhs(&q, &mut out, &mut flux)?;
        times.push(start.elapsed().as_secs_f64());
    }
    times.sort_by(f64::total_cmp);
    let median = if reps % 2 == 1 {
        times[reps / 2]
    } else {
        0.5 * (times[reps / 2 - 1] + times[reps / 2])
    };
    let per_sec = |x: f64| if median > 0.0 { x / median } else { f64::INFINITY };
    Ok(TuneRow {
        candidate: c,
        mb_elems: op.layout().mb_elems,
        oracle_error,
        median_seconds: median,
        throughput: per_sec(n as f64),
        gflops: per_sec(op.flops_per_rhs()) * 1e-9,
    })
}

