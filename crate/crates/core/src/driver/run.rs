use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use super::cavity::CavityMode;
use super::config::{Config, InitialCondition, Precision};
use super::vtk::write_vtk;
use crate::error::{Error, Result};
use crate::kernels::{FluxBuffer, MaxwellOperator, UpwindFlux};
use crate::layout::FieldSet;
use crate::mesh::{GeomFactors, Mesh, SurfInfo};
use crate::real::Real;
use crate::refelem::{jacobi_gq, ReferenceElement};
use crate::timeint::{estimate_dt, LowStorageRk, RkScheme};

/// Mesh, reference element and the geometry derived from them.
#[derive(Clone, Debug)]
pub struct Discretization {
    pub mesh: Mesh,
    pub reference: ReferenceElement,
    pub geom: GeomFactors,
    pub surf: SurfInfo,
}

impl Discretization {
    pub fn new(mesh: Mesh, degree: usize) -> Result<Self> {
        let reference = ReferenceElement::new(degree)?;
        let geom = GeomFactors::new(&mesh, &reference)?;
        let surf = SurfInfo::new(&mesh, &geom, &reference)?;
        Ok(Self {
            mesh,
            reference,
            geom,
            surf,
        })
    }

    pub fn from_config(cfg: &Config) -> Result<Self> {
        Self::new(cfg.mesh.load()?, cfg.degree)
    }

    pub fn num_dofs(&self) -> usize {
        self.mesh.num_elements() * self.reference.np
    }

    /// Operator with the layout, flux and kernel variant requested by `cfg`.
    pub fn operator<T: Real>(&self, cfg: &Config) -> Result<MaxwellOperator<T>> {
        let layout = cfg
            .microblock()
            .layout(self.reference.np, self.mesh.num_elements(), cfg.align)?;
        let flux = UpwindFlux {
            alpha: cfg.alpha,
            material: cfg.material(),
        };
        MaxwellOperator::from_parts(&self.reference, &self.geom, &self.surf, layout, flux, cfg.variant)
    }

    /// Step count and uniform step that land exactly on `final_time`.
    pub fn time_steps(&self, cfg: &Config) -> (usize, f64) {
        let dt_max = estimate_dt(&self.geom, &self.reference, cfg.cfl) / cfg.material().speed();
        if cfg.final_time == 0.0 {
            return (0, dt_max);
        }
        let n = (cfg.final_time / dt_max).ceil().max(1.0) as usize;
        (n, cfg.final_time / n as f64)
    }
}

/// Initial data together with the exact solution it generates, if known.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Solution {
    Cavity(CavityMode),
    Uniform { hx: f64, hy: f64 },
    Pulse { center: [f64; 2], width: f64 },
}

impl Solution {
    pub fn resolve(cfg: &Config, mesh: &Mesh) -> Result<Self> {
        let (m, n) = cfg.mode;
        let init = match cfg.init {
            Some(init) => init,
            None => match CavityMode::on_mesh(m, n, cfg.material(), mesh) {
                Ok(mode) => return Ok(Solution::Cavity(mode)),
                Err(Error::UnsupportedReference(_)) => InitialCondition::Pulse,
                Err(e) => return Err(e),
            },
        };
        Ok(match init {
            InitialCondition::Cavity => Solution::Cavity(CavityMode::on_mesh(m, n, cfg.material(), mesh)?),
            InitialCondition::Uniform { hx, hy } => Solution::Uniform { hx, hy },
            InitialCondition::Pulse => {
                let b = mesh.bounding_box();
                Solution::Pulse {
                    center: [0.5 * (b.x0 + b.x1), 0.5 * (b.y0 + b.y1)],
                    width: 0.1 * b.width().min(b.height()),
                }
            }
        })
    }

    /// Initial `(Hx, Hy, Ez)` at a point.
    pub fn initial(&self, x: f64, y: f64) -> [f64; 3] {
        match *self {
            Solution::Cavity(mode) => mode.eval(x, y, 0.0),
            Solution::Uniform { hx, hy } => [hx, hy, 0.0],
            Solution::Pulse { center, width } => {
                let r2 = (x - center[0]).powi(2) + (y - center[1]).powi(2);
                [0.0, 0.0, (-r2 / (2.0 * width * width)).exp()]
            }
        }
    }

    pub fn exact(&self, x: f64, y: f64, t: f64) -> Option<[f64; 3]> {
        match *self {
            Solution::Cavity(mode) => Some(mode.eval(x, y, t)),
            Solution::Uniform { hx, hy } => Some([hx, hy, 0.0]),
            Solution::Pulse { .. } => None,
        }
    }

    pub fn has_reference(&self) -> bool {
        !matches!(self, Solution::Pulse { .. })
    }
}

/// Collapsed Gauss rule mapped to every element, used for L² errors.
#[derive(Clone, Debug)]
struct Cubature {
    nq: usize,
    weights: Vec<f64>,
    /// Row-major `nq x Np` interpolation from nodal values.
    interp: Vec<f64>,
    x: Vec<f64>,
    y: Vec<f64>,
}

impl Cubature {
    fn new(disc: &Discretization) -> Self {
        let order = disc.reference.degree + 3;
        let (a, wa) = jacobi_gq(0, 0, order);
        let (b, wb) = jacobi_gq(1, 0, order);
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (bj, wbj) in b.iter().zip(&wb) {
            for (ai, wai) in a.iter().zip(&wa) {
                points.push([0.5 * (1.0 + ai) * (1.0 - bj) - 1.0, *bj]);
                weights.push(0.5 * wai * wbj);
            }
        }
        let np = disc.reference.np;
        let im = disc.reference.interpolation_matrix(&points);
        let nq = points.len();
        let interp: Vec<f64> = (0..nq).flat_map(|q| (0..np).map(move |j| (q, j))).map(|(q, j)| im[(q, j)]).collect();
        let k = disc.mesh.num_elements();
        let mut x = Vec::with_capacity(k * nq);
        let mut y = Vec::with_capacity(k * nq);
        for e in 0..k {
            let (xe, ye) = (&disc.geom.x[e * np..(e + 1) * np], &disc.geom.y[e * np..(e + 1) * np]);
            for row in interp.chunks(np) {
                x.push(row.iter().zip(xe).map(|(a, b)| a * b).sum());
                y.push(row.iter().zip(ye).map(|(a, b)| a * b).sum());
            }
        }
        Self {
            nq,
            weights,
            interp,
            x,
            y,
        }
    }

    /// Per-field L² norms of `q - exact(t)`.
    fn errors<T: Real>(&self, q: &FieldSet<T>, det: &[f64], solution: &Solution, t: f64) -> Option<[f64; 3]> {
        if !solution.has_reference() {
            return None;
        }
        let np = q.layout().np;
        let mut err = [0.0; 3];
        for (e, &jac) in det.iter().enumerate() {
            let local = [q.element(0, e), q.element(1, e), q.element(2, e)];
            for qi in 0..self.nq {
                let row = &self.interp[qi * np..(qi + 1) * np];
                let g = e * self.nq + qi;
                let exact = solution.exact(self.x[g], self.y[g], t)?;
                for f in 0..3 {
                    let uh: f64 = row.iter().zip(local[f]).map(|(a, u)| a * u.wide()).sum();
                    err[f] += jac * self.weights[qi] * (uh - exact[f]).powi(2);
                }
            }
        }
        Some(err.map(f64::sqrt))
    }
}

/// Time-stepping state for one configuration and precision.
pub struct Simulation<T: Real> {
    disc: Discretization,
    op: MaxwellOperator<T>,
    q: FieldSet<T>,
    rk: LowStorageRk<FieldSet<T>>,
    flux: FluxBuffer<T>,
    solution: Solution,
    cubature: Cubature,
    dt: f64,
    n_steps: usize,
    rhs_time: Duration,
    rhs_evals: usize,
}

impl<T: Real> Simulation<T> {
    pub fn new(cfg: &Config) -> Result<Self> {
        cfg.validate()?;
        Self::with_discretization(Discretization::from_config(cfg)?, cfg)
    }

    pub fn with_discretization(disc: Discretization, cfg: &Config) -> Result<Self> {
        let op = disc.operator::<T>(cfg)?;
        let solution = Solution::resolve(cfg, &disc.mesh)?;
        let mut q = op.zeros();
        let init: Vec<[f64; 3]> = disc
            .geom
            .x
            .iter()
            .zip(&disc.geom.y)
            .map(|(&x, &y)| solution.initial(x, y))
            .collect();
        let fields: [Vec<f64>; 3] = std::array::from_fn(|f| init.iter().map(|v| v[f]).collect());
        q.scatter([&fields[0], &fields[1], &fields[2]])?;
        let rk = LowStorageRk::new(RkScheme::lsrk54(), &q, 0.0);
        let flux = op.flux_buffer();
        let cubature = Cubature::new(&disc);
        let (n_steps, dt) = disc.time_steps(cfg);
        Ok(Self {
            disc,
            op,
            q,
            rk,
            flux,
            solution,
            cubature,
            dt,
            n_steps,
            rhs_time: Duration::ZERO,
            rhs_evals: 0,
        })
    }

    pub fn discretization(&self) -> &Discretization {
        &self.disc
    }

    pub fn operator(&self) -> &MaxwellOperator<T> {
        &self.op
    }

    pub fn state(&self) -> &FieldSet<T> {
        &self.q
    }

    pub fn solution(&self) -> &Solution {
        &self.solution
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Overrides the step size; the planned step count is kept.
    pub fn set_dt(&mut self, dt: f64) {
        self.dt = dt;
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn steps(&self) -> usize {
        self.rk.steps()
    }

    pub fn time(&self) -> f64 {
        self.rk.time()
    }

    pub fn rhs_evals(&self) -> usize {
        self.rhs_evals
    }

    pub fn rhs_time(&self) -> Duration {
        self.rhs_time
    }

    pub fn step(&mut self) -> Result<()> {
        let Self {
            op,
            q,
            rk,
            flux,
            rhs_time,
            rhs_evals,
            dt,
            ..
        } = self;
        rk.step(q, *dt, |_, s, out| {
            let start = Instant::now();
            op.compute_rhs(s, out, flux)
                .expect("integrator registers share the operator layout");
            *rhs_time += start.elapsed();
            *rhs_evals += 1;
        })
    }

    /// Runs the remaining planned steps.
    pub fn run_to_end(&mut self) -> Result<()> {
        while self.steps() < self.n_steps {
            self.step()?;
        }
        Ok(())
    }

    pub fn energy(&self) -> f64 {
        self.op.energy(&self.q)
    }

    /// Per-field L² errors against the exact solution, when one is known.
    pub fn errors(&self) -> Option<[f64; 3]> {
        self.cubature
            .errors(&self.q, &self.disc.geom.det, &self.solution, self.time())
    }

    pub fn write_snapshot(&self, path: &Path) -> Result<()> {
        write_vtk(path, &self.q, &self.disc.mesh, &self.disc.reference)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub time: f64,
    pub err: Option<[f64; 3]>,
    pub energy: f64,
    /// Mean wall-clock per RHS evaluation since the previous row.
    pub rhs_ms: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub rows: Vec<ReportRow>,
    pub steps: usize,
    pub dt: f64,
    pub dofs: usize,
    pub rhs_evals: usize,
    pub rhs_seconds: f64,
    /// DOF * RHS evaluations per second.
    pub throughput: f64,
    pub gflops: f64,
    pub snapshots: Vec<PathBuf>,
}

impl RunReport {
    pub fn last(&self) -> &ReportRow {
        self.rows.last().expect("a report always holds the initial row")
    }

    pub fn write_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(w, "time,err_Hx,err_Hy,err_Ez,energy,rhs_ms")?;
        for r in &self.rows {
            let err = match r.err {
                Some([a, b, c]) => format!("{a:e},{b:e},{c:e}"),
                None => ",,".to_string(),
            };
            writeln!(w, "{:e},{err},{:e},{:.6}", r.time, r.energy, r.rhs_ms)?;
        }
        Ok(())
    }
}

pub fn run_simulation(cfg: &Config) -> Result<RunReport> {
    match cfg.precision {
        Precision::Single => run_typed::<f32>(cfg),
        Precision::Double => run_typed::<f64>(cfg),
    }
}

fn run_typed<T: Real>(cfg: &Config) -> Result<RunReport> {
    let mut sim = Simulation::<T>::new(cfg)?;
    if let Some(dir) = &cfg.out {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    log::info!(
        "K = {}, N = {}, {} steps of dt = {:.4e}, precision {}, layout mb = {}",
        sim.disc.mesh.num_elements(),
        cfg.degree,
        sim.n_steps,
        sim.dt,
        T::NAME,
        sim.op.layout().mb_elems
    );

    let mut rows = Vec::new();
    let mut snapshots = Vec::new();
    let mut last = (Duration::ZERO, 0usize);
    let mut record = |sim: &Simulation<T>, rows: &mut Vec<ReportRow>| -> Result<()> {
        let evals = sim.rhs_evals - last.1;
        let rhs_ms = if evals == 0 {
            0.0
        } else {
            (sim.rhs_time - last.0).as_secs_f64() * 1e3 / evals as f64
        };
        last = (sim.rhs_time, sim.rhs_evals);
        rows.push(ReportRow {
            time: sim.time(),
            err: sim.errors(),
            energy: sim.energy(),
            rhs_ms,
        });
        if let Some(dir) = &cfg.out {
            let path = dir.join(format!("snap_{:06}.vtk", sim.steps()));
            sim.write_snapshot(&path)?;
            snapshots.push(path);
        }
        Ok(())
    };

    record(&sim, &mut rows)?;
    while sim.steps() < sim.n_steps {
        sim.step()?;
        let s = sim.steps();
        if (cfg.snap_every > 0 && s % cfg.snap_every == 0) || s == sim.n_steps {
            record(&sim, &mut rows)?;
        }
    }

    let rhs_seconds = sim.rhs_time.as_secs_f64();
    let dofs = sim.disc.num_dofs();
    let per_sec = |x: f64| if rhs_seconds > 0.0 { x / rhs_seconds } else { 0.0 };
    let report = RunReport {
        rows,
        steps: sim.steps(),
        dt: sim.dt,
        dofs,
        rhs_evals: sim.rhs_evals,
        rhs_seconds,
        throughput: per_sec((dofs * sim.rhs_evals) as f64),
        gflops: per_sec(sim.op.flops_per_rhs() * sim.rhs_evals as f64) * 1e-9,
        snapshots,
    };
    if let Some(dir) = &cfg.out {
        let path = dir.join("report.csv");
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut w = BufWriter::new(file);
        report
            .write_csv(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(&path, e))?;
    }
    Ok(report)
}
