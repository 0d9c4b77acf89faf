use std::f64::consts::PI;

use dgtd::driver::{
    analytic_cavity, benchmark_and_tune, convergence_study, default_candidates, run_simulation, write_vtk,
    Candidate, CavityMode, Config, InitialCondition, MbChoice, MeshSource, Precision, Simulation,
};
use dgtd::kernels::{KernelVariant, Material, MaxwellOperator};
use dgtd::mesh::{Mesh, Rect};
use dgtd::refelem::ReferenceElement;
use dgtd::Error;

fn rect(n: usize) -> MeshSource {
    MeshSource::Rect {
        nx: n,
        ny: n,
        extent: Rect::unit(),
    }
}

fn base(n: usize, degree: usize) -> Config {
    Config {
        mesh: rect(n),
        degree,
        precision: Precision::Double,
        ..Config::default()
    }
}

#[test]
fn cavity_initial_values() {
    let mode = CavityMode::new(1, 1);
    let pts: Vec<[f64; 2]> = (0..20).map(|i| [i as f64 / 19.0, (i * 7 % 19) as f64 / 19.0]).collect();
    let [hx, hy, _] = analytic_cavity(&mode, 0.0, &pts);
    assert!(hx.iter().chain(&hy).all(|&v| v == 0.0));
    let [_, _, ez] = analytic_cavity(&mode, 0.0, &[[0.5, 0.5]]);
    assert!((ez[0] - 1.0).abs() < 1e-15);
}

#[test]
fn cavity_solves_maxwell() {
    for (m, n) in [(1, 1), (2, 1), (1, 3)] {
        let mode = CavityMode::new(m, n);
        let (mp, np) = (m as f64 * PI, n as f64 * PI);
        let w = PI * ((m * m + n * n) as f64).sqrt();
        assert!((mode.omega() - w).abs() < 1e-14);
        for i in 0..25 {
            let (x, y, t) = ((i as f64 * 0.137) % 1.0, (i as f64 * 0.291) % 1.0, i as f64 * 0.05);
            let (sx, cx, sy, cy, st, ct) =
                ((mp * x).sin(), (mp * x).cos(), (np * y).sin(), (np * y).cos(), (w * t).sin(), (w * t).cos());
            let fields = [-(np / w) * sx * cy * st, (mp / w) * cx * sy * st, sx * sy * ct];
            let got = mode.eval(x, y, t);
            for (a, b) in got.iter().zip(&fields) {
                assert!((a - b).abs() < 1e-14);
            }
            // hand-differentiated fields
            let hx_t = -np * sx * cy * ct;
            let hy_t = mp * cx * sy * ct;
            let ez_t = -w * sx * sy * st;
            let ez_x = mp * cx * sy * ct;
            let ez_y = np * sx * cy * ct;
            let hy_x = -(mp * mp / w) * sx * sy * st;
            let hx_y = (np * np / w) * sx * sy * st;
            assert!((hx_t + ez_y).abs() < 1e-12);
            assert!((hy_t - ez_x).abs() < 1e-12);
            assert!((ez_t - (hy_x - hx_y)).abs() < 1e-12);
            // tie the derivatives to the implementation by central differences
            let h = 1e-5;
            let d = |dx: f64, dy: f64, dt: f64, f: usize| {
                (mode.eval(x + dx, y + dy, t + dt)[f] - mode.eval(x - dx, y - dy, t - dt)[f]) / (2.0 * h)
            };
            assert!((d(0.0, 0.0, h, 2) - ez_t).abs() < 1e-6);
            assert!((d(h, 0.0, 0.0, 1) - hy_x).abs() < 1e-6);
            assert!((d(0.0, h, 0.0, 0) - hx_y).abs() < 1e-6);
        }
    }
}

#[test]
fn cavity_rejects_other_domains() {
    let mesh = Mesh::rectangle(2, 3, Rect::new(0.0, 1.0, 0.0, 2.0)).unwrap();
    assert!(matches!(
        CavityMode::on_mesh(1, 1, Material::default(), &mesh),
        Err(Error::UnsupportedReference(_))
    ));
    let mut cfg = base(2, 2);
    cfg.mesh = MeshSource::Rect {
        nx: 2,
        ny: 2,
        extent: Rect::new(0.0, 2.0, 0.0, 1.0),
    };
    cfg.init = Some(InitialCondition::Cavity);
    assert!(matches!(run_simulation(&cfg), Err(Error::UnsupportedReference(_))));
}

#[test]
fn non_square_domain_uses_pulse() {
    let mut cfg = base(3, 2);
    cfg.mesh = MeshSource::Rect {
        nx: 4,
        ny: 2,
        extent: Rect::new(-1.0, 1.0, 0.0, 1.0),
    };
    cfg.final_time = 0.05;
    let report = run_simulation(&cfg).unwrap();
    assert!(report.rows.iter().all(|r| r.err.is_none()));
    assert!(report.last().energy > 0.0 && report.last().energy <= report.rows[0].energy);
}

#[test]
fn zero_final_time_reports_interpolation_error() {
    let mut cfg = base(4, 3);
    cfg.final_time = 0.0;
    let report = run_simulation(&cfg).unwrap();
    assert_eq!(report.rows.len(), 1);
    assert_eq!(report.steps, 0);
    let err = report.rows[0].err.unwrap();
    assert_eq!(err[0], 0.0);
    assert_eq!(err[1], 0.0);
    assert!(err[2] > 0.0 && err[2] < 1e-3);
    let sim = Simulation::<f64>::new(&cfg).unwrap();
    assert_eq!(sim.errors().unwrap(), err);
}

#[test]
fn one_period_regression_anchor() {
    let mut cfg = base(8, 4);
    cfg.final_time = CavityMode::new(1, 1).period();
    let report = run_simulation(&cfg).unwrap();
    let last = report.last();
    assert!((last.time - cfg.final_time).abs() < 1e-12);
    assert!(last.err.unwrap()[2] < 1e-4);
    cfg.precision = Precision::Single;
    assert!(run_simulation(&cfg).unwrap().last().err.unwrap()[2] < 1e-4);
}

#[test]
fn central_flux_conserves_energy() {
    let mut cfg = base(4, 3);
    cfg.alpha = 0.0;
    let mut sim = Simulation::<f64>::new(&cfg).unwrap();
    let e0 = sim.energy();
    for _ in 0..1000 {
        sim.step().unwrap();
    }
    assert!(((sim.energy() - e0) / e0).abs() < 1e-6);
}

#[test]
fn reports_are_deterministic() {
    let mut cfg = base(4, 3);
    cfg.final_time = 0.2;
    cfg.snap_every = 5;
    let (a, b) = (run_simulation(&cfg).unwrap(), run_simulation(&cfg).unwrap());
    assert!(a.rows.len() > 2);
    for (x, y) in a.rows.iter().zip(&b.rows) {
        assert_eq!((x.time, x.err, x.energy), (y.time, y.err, y.energy));
    }
    assert!(a.rows.windows(2).all(|w| w[1].time > w[0].time));
}

#[test]
fn outputs_written() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = base(2, 2);
    cfg.final_time = 0.1;
    cfg.snap_every = 4;
    cfg.out = Some(dir.path().to_path_buf());
    let report = run_simulation(&cfg).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("time,err_Hx,err_Hy,err_Ez,energy,rhs_ms"));
    assert_eq!(lines.count(), report.rows.len());
    assert!(dir.path().join("snap_000000.vtk").exists());
    assert!(dir.path().join("snap_000004.vtk").exists());
    assert!(dir.path().join(format!("snap_{:06}.vtk", report.steps)).exists());
    assert_eq!(report.snapshots.len(), report.rows.len());
}

#[test]
fn divergence_aborts_with_step() {
    let mut cfg = base(2, 3);
    cfg.cfl = 40.0;
    cfg.final_time = 100.0;
    cfg.precision = Precision::Single;
    match run_simulation(&cfg) {
        Err(Error::Divergence { step, time }) => assert!(step > 0 && time > 0.0),
        other => panic!("{other:?}"),
    }
}

#[test]
fn convergence_examples() {
    let mut cfg = base(4, 1);
    cfg.final_time = 0.5;
    cfg.cfl = 0.5;
    let t = convergence_study(&cfg, &[4, 8, 16]).unwrap();
    assert_eq!(t.rows.len(), 3);
    assert!(t.rows[0].order.is_none());
    assert!(t.final_order() >= 1.5, "{t:?}");

    cfg.degree = 3;
    let t = convergence_study(&cfg, &[2, 4, 8]).unwrap();
    assert!(t.final_order() >= 3.5, "{t:?}");
}

#[test]
fn constant_fields_are_exact() {
    let mut cfg = base(2, 2);
    cfg.init = Some(InitialCondition::Uniform { hx: 1.0, hy: -0.5 });
    cfg.final_time = 0.3;
    let t = convergence_study(&cfg, &[2, 4, 8]).unwrap();
    assert!(t.rows.iter().all(|r| r.error < 1e-12), "{t:?}");
}

#[test]
fn convergence_needs_three_levels() {
    assert!(matches!(convergence_study(&base(2, 1), &[2, 4]), Err(Error::Config(_))));
}

#[test]
fn tuner_single_candidate() {
    let mut cfg = base(3, 2);
    cfg.tune_reps = 3;
    let c = Candidate {
        mb: MbChoice::Fixed(2),
        variant: KernelVariant::Fused,
    };
    let r = benchmark_and_tune(&cfg, &[c]).unwrap();
    assert_eq!(r.chosen, c);
    assert_eq!(r.rows.len(), 1);
    assert!(benchmark_and_tune(&cfg, &[]).is_err());
}

#[test]
fn tuner_rows_and_gate() {
    let mut cfg = base(4, 3);
    cfg.tune_reps = 3;
    let cands = default_candidates();
    assert_eq!(cands.len(), 15);
    let r = benchmark_and_tune(&cfg, &cands).unwrap();
    assert_eq!(r.rows.len() + r.disqualified.len(), cands.len());
    assert!(r.disqualified.is_empty());
    for row in &r.rows {
        assert!(row.oracle_error < 1e-10);
        assert!(row.median_seconds > 0.0 && row.throughput > 0.0);
    }
    let mut csv = Vec::new();
    r.write_csv(&mut csv).unwrap();
    assert_eq!(String::from_utf8(csv).unwrap().lines().count(), r.rows.len() + 1);
}

fn parse_scalars(text: &str, name: &str, n: usize) -> Vec<f64> {
    let mut lines = text.lines().skip_while(|l| *l != format!("SCALARS {name} float 1"));
    lines.next();
    assert_eq!(lines.next(), Some("LOOKUP_TABLE default"));
    lines.take(n).map(|l| l.parse().unwrap()).collect()
}

#[test]
fn vtk_single_element() {
    let mesh = Mesh::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[0, 1, 2]]).unwrap();
    let re = ReferenceElement::new(1).unwrap();
    let op = MaxwellOperator::<f32>::builder(&mesh, &re).build().unwrap();
    let mut q = op.zeros();
    q.ez[..3].copy_from_slice(&[0.5, -1.25, 3.0]);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.vtk");
    write_vtk(&path, &q, &mesh, &re).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# vtk DataFile Version 3.0\n"));
    assert!(text.contains("POINTS 3 double"));
    assert!(text.contains("CELLS 1 4"));
    assert_eq!(parse_scalars(&text, "Ez", 3), vec![0.5, -1.25, 3.0]);
}

#[test]
fn vtk_round_trip_to_printed_precision() {
    let mesh = Mesh::rectangle(2, 2, Rect::unit()).unwrap();
    let re = ReferenceElement::new(3).unwrap();
    let mut cfg = base(2, 3);
    cfg.final_time = 0.1;
    let mut sim = Simulation::<f64>::new(&cfg).unwrap();
    sim.run_to_end().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.vtk");
    write_vtk(&path, sim.state(), &mesh, &re).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let npts = mesh.num_elements() * re.np;
    assert!(text.contains(&format!("CELLS {} {}", 8 * 9, 4 * 8 * 9)));
    let ez = parse_scalars(&text, "Ez", npts);
    let exact = &sim.state().gather()[2];
    for (a, b) in ez.iter().zip(exact) {
        assert_eq!(*a, format!("{b:.5e}").parse::<f64>().unwrap());
    }
}

#[test]
fn vtk_io_error_names_path() {
    let mesh = Mesh::rectangle(1, 1, Rect::unit()).unwrap();
    let re = ReferenceElement::new(1).unwrap();
    let op = MaxwellOperator::<f64>::builder(&mesh, &re).build().unwrap();
    match write_vtk("/nonexistent/dir/x.vtk", &op.zeros(), &mesh, &re) {
        Err(Error::Io { path, .. }) => assert!(path.ends_with("x.vtk")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn config_file_and_keys() {
    let mut cfg = Config::default();
    cfg.apply_text("# comment\ndegree = 3\nrect = 5 6\nmb = 4\nfinal_time = 0.25\nmode = 2 1\nprecision = double\nvariant = fused\n")
        .unwrap();
    assert_eq!(cfg.degree, 3);
    assert_eq!(cfg.mb, MbChoice::Fixed(4));
    assert_eq!(cfg.mode, (2, 1));
    assert_eq!(cfg.final_time, 0.25);
    assert_eq!(cfg.precision, Precision::Double);
    assert_eq!(cfg.variant, KernelVariant::Fused);
    assert_eq!(cfg.mesh, MeshSource::Rect { nx: 5, ny: 6, extent: Rect::unit() });
    assert!(cfg.apply_text("bogus = 1").is_err());
    assert!(cfg.apply_text("degree 3").is_err());
    cfg.cfl = -1.0;
    assert!(cfg.validate().is_err());
}
