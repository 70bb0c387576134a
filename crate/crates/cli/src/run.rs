//! Orchestration: build the chart, grid and fields from a validated config,
//! run the selected pipeline, and serialize the results.

use std::path::{Path, PathBuf};

use crate::config::{Bc, ChartKind, ConfigError, Model, RunConfig};
use crate::expr::Expr;
use crate::output;

use thinfilm_core::chart::{
    ChartDomain, Cylinder, Paraboloid, Plane, Sphere, SurfaceChart, TranslatingPlane,
};
use thinfilm_core::coeffs::{FrictionSpec, GapCoeffs, SurfaceCoeffs};
use thinfilm_core::error::Error as CoreError;
use thinfilm_core::gap::GapTables;
use thinfilm_core::geometry::{GeometrySample, GeometryTables};
use thinfilm_core::grid::{BoundaryKind, Field, FieldTag, Grid};
use thinfilm_core::math::{solve3, Vec3};
use thinfilm_core::reynolds::{solve_lubrication, LubricationProblem};
use thinfilm_core::shallow::{
    continuity_rhs, first_order_fields, mass_functional, recover_pressure, ShallowProblem,
    ShallowSolver, ShallowState,
};

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Core(CoreError),
    Io(std::io::Error),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "{e}"),
            RunError::Core(e) => write!(f, "{e}"),
            RunError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl From<CoreError> for RunError {
    fn from(e: CoreError) -> Self {
        RunError::Core(e)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

impl RunError {
    /// Stable exit codes, one per error family.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(ConfigError::Io(_)) => 3,
            RunError::Config(ConfigError::Parse(_)) => 3,
            RunError::Config(ConfigError::Validation(_)) => 4,
            RunError::Core(e) => match e {
                CoreError::DegenerateChart { .. }
                | CoreError::SingularJacobian
                | CoreError::NumericalInconsistency { .. }
                | CoreError::InvalidGrid(_)
                | CoreError::NonFiniteField
                | CoreError::GapTooSmall { .. } => 5,
                CoreError::SingularSystem | CoreError::NoConvergence { .. } => 6,
                CoreError::CflViolation { .. }
                | CoreError::BlowUp { .. }
                | CoreError::GapCollapse { .. } => 7,
            },
            RunError::Io(_) => 8,
        }
    }
}

enum BuiltChart {
    Plane(Plane),
    Cylinder(Cylinder),
    Sphere(Sphere),
    Paraboloid(Paraboloid),
    TranslatingPlane(TranslatingPlane),
}

impl BuiltChart {
    fn as_dyn(&self) -> &(dyn SurfaceChart + Sync) {
        match self {
            BuiltChart::Plane(c) => c,
            BuiltChart::Cylinder(c) => c,
            BuiltChart::Sphere(c) => c,
            BuiltChart::Paraboloid(c) => c,
            BuiltChart::TranslatingPlane(c) => c,
        }
    }

    fn label(&self) -> String {
        match self {
            BuiltChart::Plane(_) => "plane".into(),
            BuiltChart::Cylinder(c) => format!("cylinder(R={})", c.radius),
            BuiltChart::Sphere(c) => format!("sphere(R={})", c.radius),
            BuiltChart::Paraboloid(c) => format!("paraboloid(a={}, b={})", c.a, c.b),
            BuiltChart::TranslatingPlane(c) => format!("translating-plane(c={})", c.speed),
        }
    }
}

fn build_chart(cfg: &RunConfig) -> BuiltChart {
    match cfg.chart.kind {
        ChartKind::Plane => BuiltChart::Plane(Plane),
        ChartKind::Cylinder => BuiltChart::Cylinder(Cylinder {
            radius: cfg.chart.radius,
        }),
        ChartKind::Sphere => BuiltChart::Sphere(Sphere {
            radius: cfg.chart.radius,
        }),
        ChartKind::Paraboloid => BuiltChart::Paraboloid(Paraboloid {
            a: cfg.chart.a,
            b: cfg.chart.b,
        }),
        ChartKind::TranslatingPlane => BuiltChart::TranslatingPlane(TranslatingPlane {
            speed: cfg.chart.speed,
        }),
    }
}

fn build_grid(cfg: &RunConfig, domain: ChartDomain) -> Result<Grid, CoreError> {
    let to_bc = |bc: Bc| match bc {
        Bc::Dirichlet => BoundaryKind::Dirichlet,
        Bc::Periodic => BoundaryKind::Periodic,
    };
    Grid::new(
        cfg.grid.n1,
        cfg.grid.n2,
        cfg.grid.xi1.unwrap_or(domain.xi1),
        cfg.grid.xi2.unwrap_or(domain.xi2),
        to_bc(cfg.grid.bc1),
        to_bc(cfg.grid.bc2),
    )
}

fn thread_count() -> usize {
    std::env::var("THINFILM_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|n| *n >= 1)
        .unwrap_or(1)
}

/// Geometry tables, split over rows across worker threads. Every node value
/// is computed independently, so the result is identical for any thread
/// count.
fn build_tables(
    chart: &(dyn SurfaceChart + Sync),
    grid: &Grid,
    t: f64,
) -> Result<GeometryTables, CoreError> {
    let threads = thread_count().min(grid.n2);
    if threads <= 1 {
        return GeometryTables::build(chart, grid, t);
    }
    let rows_per = grid.n2.div_ceil(threads);
    let chunks: Vec<(usize, usize)> = (0..threads)
        .map(|k| (k * rows_per, ((k + 1) * rows_per).min(grid.n2)))
        .collect();
    let results: Vec<Result<Vec<GeometrySample>, CoreError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = chunks
            .iter()
            .map(|&(j0, j1)| {
                scope.spawn(move || {
                    let mut rows = Vec::with_capacity((j1 - j0) * grid.n1);
                    for j in j0..j1 {
                        for i in 0..grid.n1 {
                            rows.push(GeometrySample::at(chart, [grid.xi1(i), grid.xi2(j)], t)?);
                        }
                    }
                    Ok(rows)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    let mut samples = Vec::with_capacity(grid.len());
    for r in results {
        samples.extend(r?);
    }
    Ok(GeometryTables::from_samples(samples, t))
}

fn scaled_gap_tables(
    cfg: &RunConfig,
    grid: &Grid,
    t: f64,
    scale: f64,
) -> Result<GapTables, RunError> {
    let floor = cfg.gap.floor * scale;
    if let Some(path) = &cfg.gap.h_file {
        let values = output::read_field(path, grid)?;
        let data: Vec<f64> = values.iter().map(|v| v * scale).collect();
        let h = Field::ingest(grid, data, FieldTag::Gap, t)?;
        let dh = &cfg.gap.dh_dt;
        let h_t = Field::from_fn(grid, |x1, x2| scale * dh.eval(x1, x2, t));
        return Ok(GapTables::from_fields(grid, h, h_t, floor)?);
    }
    let h_expr = cfg.gap.h.as_ref().expect("validated config has a gap");
    let dh_expr = &cfg.gap.dh_dt;
    Ok(GapTables::from_functions(
        grid,
        t,
        |x1, x2, tt| scale * h_expr.eval(x1, x2, tt),
        |x1, x2, tt| scale * dh_expr.eval(x1, x2, tt),
        floor,
    )?)
}

fn eval_field(grid: &Grid, expr: &Expr, t: f64) -> Field {
    Field::from_fn(grid, |x1, x2| expr.eval(x1, x2, t))
}

struct Artifacts {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Artifacts {
    fn new(dir: &Path) -> Result<Self, RunError> {
        std::fs::create_dir_all(dir)?;
        Ok(Artifacts {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        self.files.push(p.clone());
        p
    }
}

pub fn run(cfg: &RunConfig) -> Result<Vec<PathBuf>, RunError> {
    let chart = build_chart(cfg);
    let grid = build_grid(cfg, chart.as_dyn().domain())?;
    let mut artifacts = Artifacts::new(&cfg.out_dir)?;
    match cfg.model {
        Model::Geometry => run_geometry(cfg, &chart, &grid, &mut artifacts)?,
        Model::Lubricate => run_lubricate(cfg, &chart, &grid, &mut artifacts)?,
        Model::Shallow => run_shallow(cfg, &chart, &grid, &mut artifacts)?,
    }
    Ok(artifacts.files)
}

// ---------------------------------------------------------------------------

fn run_geometry(
    cfg: &RunConfig,
    chart: &BuiltChart,
    grid: &Grid,
    artifacts: &mut Artifacts,
) -> Result<(), RunError> {
    let t = cfg.lubricate.t;
    let tables = build_tables(chart.as_dyn(), grid, t)?;

    let columns: Vec<(&str, Field)> = vec![
        ("E", tables.field(grid, |s| s.forms.E)),
        ("F", tables.field(grid, |s| s.forms.F)),
        ("G", tables.field(grid, |s| s.forms.G)),
        ("e", tables.field(grid, |s| s.forms.e)),
        ("f", tables.field(grid, |s| s.forms.f)),
        ("g", tables.field(grid, |s| s.forms.g)),
        ("A0", tables.field(grid, |s| s.area0)),
        ("A1", tables.field(grid, |s| s.area1)),
        ("A2", tables.field(grid, |s| s.area2)),
        ("K_G", tables.field(grid, |s| s.curv.gauss)),
        ("K_m", tables.field(grid, |s| s.curv.mean)),
        ("kappa_max", tables.field(grid, |s| s.curv.kappa_max)),
        ("kappa_min", tables.field(grid, |s| s.curv.kappa_min)),
    ];
    let names: Vec<&str> = columns.iter().map(|(n, _)| *n).collect();
    let fields: Vec<&Field> = columns.iter().map(|(_, f)| f).collect();
    let path = artifacts.path("geometry.csv");
    output::write_columns(&path, grid, &names, &fields)?;

    if cfg.output.dump_coefficients {
        dump_coefficients(cfg, grid, &tables, artifacts)?;
    }

    let kg = &columns[9].1;
    let summary = vec![
        ("mode".to_string(), "geometry".to_string()),
        ("chart".to_string(), chart.label()),
        ("nodes".to_string(), format!("{}", grid.len())),
        ("t".to_string(), output::fmt_f64(t)),
        (
            "gauss_curvature_min".to_string(),
            output::fmt_f64(kg.data.iter().cloned().fold(f64::INFINITY, f64::min)),
        ),
        (
            "gauss_curvature_max".to_string(),
            output::fmt_f64(kg.data.iter().cloned().fold(f64::NEG_INFINITY, f64::max)),
        ),
    ];
    output::write_summary(&artifacts.path("summary.txt"), &summary)?;
    write_equations(cfg.model, &artifacts.path("equations.txt"))?;
    Ok(())
}

fn dump_coefficients(
    cfg: &RunConfig,
    grid: &Grid,
    tables: &GeometryTables,
    artifacts: &mut Artifacts,
) -> Result<(), RunError> {
    let t = cfg.lubricate.t;
    let gap = scaled_gap_tables(cfg, grid, t, 1.0)?;
    let body = &cfg.physics.body_force;

    let mut names: Vec<String> = Vec::new();
    let mut rows: Vec<Vec<f64>> = vec![Vec::new(); grid.len()];
    let mut first = true;
    for j in 0..grid.n2 {
        for i in 0..grid.n1 {
            let idx = grid.idx(i, j);
            let gs = &tables.samples[idx];
            let sc = SurfaceCoeffs::at(gs);
            let jet = gap.jet(idx);
            let body_local = [
                body[0].eval(gs.xi[0], gs.xi[1], t),
                body[1].eval(gs.xi[0], gs.xi[1], t),
            ];
            let gc = GapCoeffs::at(
                gs,
                &sc,
                &jet,
                Vec3::ZERO,
                Vec3::ZERO,
                body_local,
                cfg.physics.rho0,
                cfg.chart.orientation,
            );
            let mut push = |name: String, value: f64| {
                if first {
                    names.push(name);
                }
                rows[idx].push(value);
            };
            for a in 0..2 {
                for b in 0..2 {
                    push(format!("B{}{}", a + 1, b + 1), sc.b[a][b]);
                }
            }
            for a in 0..2 {
                push(format!("C{}", a + 1), sc.c[a]);
            }
            for a in 0..2 {
                for l in 0..2 {
                    for k in 0..3 {
                        push(format!("H{}{}{}", a + 1, l + 1, k + 1), sc.h[a][l][k]);
                    }
                }
            }
            push("I".to_string(), sc.i);
            for a in 0..2 {
                for b in 0..2 {
                    push(format!("J{}{}", a + 1, b + 1), sc.j[a][b]);
                }
            }
            for k in 0..3 {
                for l in 0..2 {
                    for a in 0..2 {
                        push(format!("L{}{}{}", k + 1, l + 1, a + 1), sc.l[k][l][a]);
                    }
                }
            }
            for a in 0..2 {
                for k in 0..3 {
                    push(format!("Q{}{}", a + 1, k + 1), sc.q[a][k]);
                }
            }
            for a in 0..2 {
                for b in 0..2 {
                    push(format!("R{}{}", a + 1, b + 1), sc.r[a][b]);
                }
            }
            for a in 0..2 {
                for b in 0..2 {
                    push(format!("S{}{}", a + 1, b + 1), sc.s[a][b]);
                }
            }
            for a in 0..2 {
                push(format!("Fh{}", a + 1), gc.f[a]);
            }
            push("eta_x".to_string(), gc.eta.x);
            push("eta_y".to_string(), gc.eta.y);
            push("eta_z".to_string(), gc.eta.z);
            for a in 0..2 {
                for b in 0..2 {
                    for l in 0..2 {
                        push(format!("psi{}{}{}", a + 1, b + 1, l + 1), gc.psi[a][b][l]);
                    }
                }
            }
            for a in 0..2 {
                for k in 0..3 {
                    push(format!("chi{}{}", a + 1, k + 1), gc.chi[a][k]);
                }
            }
            for a in 0..2 {
                push(format!("kappa{}", a + 1), gc.kappa[a]);
            }
            for a in 0..2 {
                push(format!("kappa_hat{}", a + 1), gc.kappa_hat[a]);
            }
            first = false;
        }
    }

    let path = artifacts.path("coefficients.csv");
    let mut header = vec!["xi1".to_string(), "xi2".to_string()];
    header.extend(names.iter().cloned());
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut w = output::CsvWriter::create(&path, &header_refs)?;
    for j in 0..grid.n2 {
        for i in 0..grid.n1 {
            let idx = grid.idx(i, j);
            let mut row = vec![grid.xi1(i), grid.xi2(j)];
            row.extend_from_slice(&rows[idx]);
            w.row(&row)?;
        }
    }
    w.finish()?;
    Ok(())
}

// ---------------------------------------------------------------------------

fn run_lubricate(
    cfg: &RunConfig,
    chart: &BuiltChart,
    grid: &Grid,
    artifacts: &mut Artifacts,
) -> Result<(), RunError> {
    let t = cfg.lubricate.t;
    let scale = if cfg.lubricate.rescaled {
        cfg.lubricate.eps
    } else {
        1.0
    };
    let tables = build_tables(chart.as_dyn(), grid, t)?;
    let gap = scaled_gap_tables(cfg, grid, t, scale)?;

    let problem = LubricationProblem {
        mu: cfg.physics.mu,
        lower_velocity: (
            eval_field(grid, &cfg.lubricate.v[0], t),
            eval_field(grid, &cfg.lubricate.v[1], t),
        ),
        upper_velocity: (
            eval_field(grid, &cfg.lubricate.w[0], t),
            eval_field(grid, &cfg.lubricate.w[1], t),
        ),
        boundary_pressure: eval_field(grid, &cfg.lubricate.p_boundary, t),
    };
    let max_iter = if cfg.solver.max_iter == 0 {
        40_000.max(200 * grid.n1.max(grid.n2))
    } else {
        cfg.solver.max_iter
    };
    let solution = solve_lubrication(&problem, grid, &tables, &gap, cfg.solver.tol, max_iter)?;

    output::write_field(&artifacts.path("pressure.csv"), grid, &solution.pressure)?;

    for &xi3 in &cfg.lubricate.slices {
        let mut u1 = Field::zeros(grid);
        let mut u2 = Field::zeros(grid);
        let mut u3 = Field::zeros(grid);
        for idx in 0..grid.len() {
            let u = solution.velocity(idx, xi3);
            u1.data[idx] = u[0];
            u2.data[idx] = u[1];
            u3.data[idx] = u[2];
        }
        let path = artifacts.path(&format!("velocity_xi3={xi3}.csv"));
        output::write_columns(&path, grid, &["u1", "u2", "u3"], &[&u1, &u2, &u3])?;
    }

    let diag = vec![
        (
            "iterations".to_string(),
            format!("{}", solution.stats.iterations),
        ),
        (
            "residual".to_string(),
            output::fmt_f64(solution.stats.residual),
        ),
        (
            "converged".to_string(),
            format!("{}", solution.stats.converged),
        ),
        ("nodes".to_string(), format!("{}", grid.len())),
        ("tolerance".to_string(), output::fmt_f64(cfg.solver.tol)),
        (
            "rescaled".to_string(),
            format!("{}", cfg.lubricate.rescaled),
        ),
        ("eps".to_string(), output::fmt_f64(cfg.lubricate.eps)),
        ("mu".to_string(), output::fmt_f64(cfg.physics.mu)),
        (
            "pressure_min".to_string(),
            output::fmt_f64(
                solution
                    .pressure
                    .data
                    .iter()
                    .cloned()
                    .fold(f64::INFINITY, f64::min),
            ),
        ),
        (
            "pressure_max".to_string(),
            output::fmt_f64(
                solution
                    .pressure
                    .data
                    .iter()
                    .cloned()
                    .fold(f64::NEG_INFINITY, f64::max),
            ),
        ),
    ];
    output::write_json(&artifacts.path("diagnostics.json"), &diag)?;
    write_equations(cfg.model, &artifacts.path("equations.txt"))?;
    Ok(())
}

// ---------------------------------------------------------------------------

fn run_shallow(
    cfg: &RunConfig,
    chart: &BuiltChart,
    grid: &Grid,
    artifacts: &mut Artifacts,
) -> Result<(), RunError> {
    let chart_dyn: &dyn SurfaceChart = chart.as_dyn();
    let gap0 = scaled_gap_tables(cfg, grid, 0.0, 1.0)?;

    let pi_expr = cfg.shallow.pi0.clone();
    let body = cfg.physics.body_force.clone();
    let cartesian = cfg.physics.body_force_cartesian;
    let body_closure: Box<dyn Fn(f64, f64, f64) -> [f64; 3]> = if cartesian {
        Box::new(move |x1, x2, t| {
            let f = [
                body[0].eval(x1, x2, t),
                body[1].eval(x1, x2, t),
                body[2].eval(x1, x2, t),
            ];
            match GeometrySample::at(chart_dyn, [x1, x2], t) {
                Ok(gs) => {
                    let m = [
                        [gs.a1.x, gs.a2.x, gs.a3.x],
                        [gs.a1.y, gs.a2.y, gs.a3.y],
                        [gs.a1.z, gs.a2.z, gs.a3.z],
                    ];
                    solve3(m, f, 1e-14).unwrap_or([0.0; 3])
                }
                Err(_) => [0.0; 3],
            }
        })
    } else {
        Box::new(move |x1, x2, t| {
            [
                body[0].eval(x1, x2, t),
                body[1].eval(x1, x2, t),
                body[2].eval(x1, x2, t),
            ]
        })
    };

    let mut problem = ShallowProblem::new(chart_dyn, *grid);
    problem.rho0 = cfg.physics.rho0;
    problem.nu = cfg.physics.nu;
    problem.s0 = cfg.chart.orientation;
    problem.friction = FrictionSpec {
        c_r1: cfg.physics.c_r1,
    };
    problem.h_floor = cfg.gap.floor;
    problem.applied_pressure = Box::new(move |x1, x2, t| pi_expr.eval(x1, x2, t));
    problem.body_force = body_closure;

    let solver = ShallowSolver::new(problem)?;
    let grid = &solver.problem.grid;

    let mut state = ShallowState {
        t: 0.0,
        h: gap0.h.clone(),
        v1: eval_field(grid, &cfg.shallow.v_init[0], 0.0),
        v2: eval_field(grid, &cfg.shallow.v_init[1], 0.0),
    };

    let mu = cfg.physics.rho0 * cfg.physics.nu;
    let mut snapshots: Vec<(String, String)> = Vec::new();
    let mut dt_min = f64::INFINITY;
    let mut dt_max: f64 = 0.0;
    let mut steps = 0usize;

    let snapshot = |state: &ShallowState,
                    artifacts: &mut Artifacts,
                    snapshots: &mut Vec<(String, String)>,
                    dt_window: Option<(f64, f64)>|
     -> Result<(), RunError> {
        let label = format!("{:.6}", state.t);
        solver.with_tables(state.t, |tables| -> Result<(), RunError> {
            let state_path = artifacts.path(&format!("state_{label}.csv"));
            // Optional physical-gap reporting; the integration state itself
            // stays in reference variables.
            let h_out = match cfg.shallow.output_scale_eps {
                Some(eps) => state.h.map(|v| eps * v),
                None => state.h.clone(),
            };
            output::write_columns(
                &state_path,
                grid,
                &["h", "v1", "v2"],
                &[&h_out, &state.v1, &state.v2],
            )?;
            let pi = Field::from_fn(grid, |x1, x2| {
                (solver.problem.applied_pressure)(x1, x2, state.t)
            });
            let h_rate = continuity_rhs(grid, tables, state);
            let rec = recover_pressure(grid, tables, state, &pi, &h_rate, mu);
            let pressure_path = artifacts.path(&format!("pressure_{label}.csv"));
            output::write_columns(&pressure_path, grid, &["p0", "pi1"], &[&rec.p0, &rec.pi1])?;
            let mass = mass_functional(grid, tables, state);
            snapshots.push((format!("snapshot_t_{label}.mass"), output::fmt_f64(mass)));
            snapshots.push((
                format!("snapshot_t_{label}.p0_form_gap"),
                output::fmt_f64(rec.discrepancy),
            ));
            if let Some((lo, hi)) = dt_window {
                snapshots.push((format!("snapshot_t_{label}.dt_min"), output::fmt_f64(lo)));
                snapshots.push((format!("snapshot_t_{label}.dt_max"), output::fmt_f64(hi)));
            }
            Ok(())
        })?
    };

    snapshot(&state, artifacts, &mut snapshots, None)?;

    let t_end = cfg.shallow.t_end;
    let mut window_min = f64::INFINITY;
    let mut window_max: f64 = 0.0;
    while state.t < t_end - 1e-13 {
        let bounds = solver.cfl_bounds(&state)?;
        let dt_auto = 0.9 * bounds.limit();
        let dt = cfg.shallow.dt.unwrap_or(dt_auto).min(t_end - state.t);
        state = solver.step(&state, dt)?;
        steps += 1;
        dt_min = dt_min.min(dt);
        dt_max = dt_max.max(dt);
        window_min = window_min.min(dt);
        window_max = window_max.max(dt);
        let is_last = state.t >= t_end - 1e-13;
        if steps % cfg.shallow.output_every == 0 || is_last {
            snapshot(
                &state,
                artifacts,
                &mut snapshots,
                Some((window_min, window_max)),
            )?;
            window_min = f64::INFINITY;
            window_max = 0.0;
        }
    }

    // First-order recoverable fields at the final time, gauge V_i^1 = 0.
    solver.with_tables(state.t, |tables| -> Result<(), RunError> {
        let derived = first_order_fields(grid, tables, &state);
        let path = artifacts.path("first_order_final.csv");
        output::write_columns(
            &path,
            grid,
            &["jump1", "jump2", "dh_dt"],
            &[&derived.jump1, &derived.jump2, &derived.dh_dt],
        )?;
        Ok(())
    })??;

    let mut summary = vec![
        ("mode".to_string(), "shallow".to_string()),
        ("chart".to_string(), chart.label()),
        ("nodes".to_string(), format!("{}", grid.len())),
        ("steps".to_string(), format!("{steps}")),
        ("t_end".to_string(), output::fmt_f64(state.t)),
        ("dt_min".to_string(), output::fmt_f64(dt_min)),
        ("dt_max".to_string(), output::fmt_f64(dt_max)),
        (
            "first_order_gauge".to_string(),
            "V1^1 = V2^1 = 0 (additive first-order constants are not determined)".to_string(),
        ),
    ];
    summary.extend(snapshots);
    output::write_summary(&artifacts.path("summary.txt"), &summary)?;
    write_equations(cfg.model, &artifacts.path("equations.txt"))?;
    Ok(())
}

// ---------------------------------------------------------------------------

/// Maps each artifact to the governing equation it discretizes.
fn write_equations(model: Model, path: &Path) -> std::io::Result<()> {
    let text = match model {
        Model::Geometry => {
            "geometry.csv:\n\
             \x20 E = a1.a1, F = a1.a2, G = a2.a2 with a_i = dX/dxi_i\n\
             \x20 e = a3 . d2X/dxi1^2, f = a3 . d2X/dxi1 dxi2, g = a3 . d2X/dxi2^2\n\
             \x20 A0 = E G - F^2, A1 = -e G - g E + 2 f F, A2 = e g - f^2\n\
             \x20 K_G = A2 / A0, K_m = -A1 / (2 A0)\n\
             \x20 kappa_max/min solve A0 k^2 + A1 k + A2 = 0\n\
             coefficients.csv (optional): the coefficient families contracted\n\
             \x20 from the basis derivatives and the inverse-metric rows\n\
             \x20 alpha0 = (G, -F)/A0, beta0 = (-F, E)/A0.\n"
        }
        Model::Lubricate => {
            "pressure.csv: p solves the anisotropic thin-film equation\n\
             \x20 (1/sqrt(A0)) div( (h^3/sqrt(A0)) M grad p )\n\
             \x20   = 12 mu dh/dt + 12 mu (h A1/A0) (dX/dt . a3)\n\
             \x20     - 6 mu grad h . (W - V)\n\
             \x20     + (6 mu h / sqrt(A0)) div( sqrt(A0) (W + V) )\n\
             \x20 with M = [[G, -F], [-F, E]]; on a flat chart this reduces to\n\
             \x20 div(h^3 grad p) = 12 mu dh/dt + 6 mu s dh/dxi1 for V = (s, 0), W = 0.\n\
             velocity_xi3=*.csv: through-gap profile\n\
             \x20 u1 = h^2 (xi3^2 - xi3)/(2 mu A0) (G dp/dxi1 - F dp/dxi2) + xi3 (W1 - V1) + V1\n\
             \x20 u2 = h^2 (xi3^2 - xi3)/(2 mu A0) (E dp/dxi2 - F dp/dxi1) + xi3 (W2 - V2) + V2\n\
             \x20 u3 = dX/dt . a3 (constant across the gap)\n"
        }
        Model::Shallow => {
            "state_*.csv: (h, V1, V2) solve\n\
             \x20 dh/dt = -(h/sqrt(A0)) div( sqrt(A0) V ) - (h A1/A0) (dX/dt . a3)\n\
             \x20 dVi/dt = -(V_l - C_l) dVi/dxi_l - (R_ik + H_ilk V_l) V_k\n\
             \x20          - (1/rho0)(alpha0_i dpi/dxi1 + beta0_i dpi/dxi2)\n\
             \x20          + nu [ d2Vi J + dVk (L + psi) + Vk (S + chi) + kappa_hat ]\n\
             \x20          + F_i(h) - Q_i3 (dX/dt . a3)\n\
             pressure_*.csv: p0 = (2 mu / h) dh/dt + pi0 and pi1 = pi0.\n\
             first_order_final.csv: W_i^1 - V_i^1 = -h [ pick_l d(dX/dt . a3)/dxi_l + B_ik V_k / A0 ],\n\
             \x20 u3^1 = xi3 dh/dt (gauge V_i^1 = 0).\n"
        }
    };
    std::fs::write(path, text)
}
