//! End-to-end behavior of the CLI layer: pipeline outputs against known
//! geometry, distinct exit codes per error family, and the tabulated-gap
//! path.

use std::path::{Path, PathBuf};
use std::process::Command;

use thinfilm::config::{Model, Overrides};
use thinfilm::{parse_config_str, run};

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("thinfilm_cli_{tag}_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn read_column(path: &Path, name: &str) -> Vec<f64> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header
        .iter()
        .position(|h| *h == name)
        .unwrap_or_else(|| panic!("no column {name}"));
    lines
        .map(|l| l.split(',').nth(col).unwrap().parse::<f64>().unwrap())
        .collect()
}

#[test]
fn geometry_mode_reports_constant_gauss_curvature_on_sphere() {
    let dir = temp_dir("sphere");
    let text = "
[run]
model = geometry
[chart]
name = sphere
radius = 2.0
[grid]
n1 = 24
n2 = 24
xi1 = 0.5, 2.6
xi2 = 0.0, 6.283185307179586
bc_xi1 = dirichlet
bc_xi2 = periodic
";
    let overrides = Overrides {
        out_dir: Some(dir.clone()),
        ..Default::default()
    };
    let cfg = parse_config_str(text, Model::Geometry, &overrides, None).unwrap();
    run(&cfg).unwrap();
    let kg = read_column(&dir.join("geometry.csv"), "K_G");
    for v in kg {
        assert!((v - 0.25).abs() <= 1e-10, "K_G = {v}");
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn shallow_fixed_point_snapshots_are_constant() {
    let dir = temp_dir("fixed_point");
    let text = "
[run]
model = shallow
[chart]
name = plane
[grid]
n1 = 12
n2 = 12
xi1 = 0.0, 1.0
xi2 = 0.0, 1.0
bc_xi1 = periodic
bc_xi2 = periodic
[gap]
h = 1
[physics]
rho0 = 1
nu = 0.1
[shallow]
v_init = 0.2, -0.1
t_end = 0.05
output_every = 5
";
    let overrides = Overrides {
        out_dir: Some(dir.clone()),
        ..Default::default()
    };
    let cfg = parse_config_str(text, Model::Shallow, &overrides, None).unwrap();
    let files = run(&cfg).unwrap();
    let states: Vec<&PathBuf> = files
        .iter()
        .filter(|p| {
            p.file_name()
                .unwrap()
                .to_string_lossy()
                .starts_with("state_")
        })
        .collect();
    assert!(states.len() >= 2, "expected several snapshots");
    for state in &states {
        for (name, want) in [("h", 1.0), ("v1", 0.2), ("v2", -0.1)] {
            for v in read_column(state, name) {
                assert!((v - want).abs() <= 1e-12, "{name} drifted to {v}");
            }
        }
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn tabulated_gap_matches_expression_gap() {
    let dir = temp_dir("tabulated");
    // First run with an expression gap, then feed the written pressure run a
    // tabulated copy of the same gap and compare.
    let base = "
[run]
model = lubricate
[chart]
name = plane
[grid]
n1 = 32
n2 = 6
xi1 = 0.0, 1.0
xi2 = 0.0, 1.0
bc_xi1 = dirichlet
bc_xi2 = periodic
[physics]
mu = 1.0
[lubricate]
v = 1, 0
";
    let with_expr = format!("{base}\n[gap]\nh = 2 - xi1\n");
    let out_a = dir.join("expr");
    let overrides = Overrides {
        out_dir: Some(out_a.clone()),
        ..Default::default()
    };
    let cfg = parse_config_str(&with_expr, Model::Lubricate, &overrides, None).unwrap();
    run(&cfg).unwrap();

    // Tabulate h on the same grid layout.
    let gap_path = dir.join("gap.csv");
    {
        use std::io::Write;
        let mut f = std::fs::File::create(&gap_path).unwrap();
        writeln!(f, "xi1,xi2,value").unwrap();
        for j in 0..6 {
            for i in 0..32 {
                let x = i as f64 / 31.0;
                let y = j as f64 / 6.0;
                writeln!(f, "{x:.16e},{y:.16e},{:.16e}", 2.0 - x).unwrap();
            }
        }
    }
    let with_file = format!("{base}\n[gap]\nh_file = {}\n", gap_path.display());
    let out_b = dir.join("file");
    let overrides = Overrides {
        out_dir: Some(out_b.clone()),
        ..Default::default()
    };
    let cfg = parse_config_str(&with_file, Model::Lubricate, &overrides, None).unwrap();
    run(&cfg).unwrap();

    let pa = read_column(&out_a.join("pressure.csv"), "value");
    let pb = read_column(&out_b.join("pressure.csv"), "value");
    let diff = pa
        .iter()
        .zip(&pb)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    assert!(
        diff <= 1e-12,
        "tabulated vs expression gap pressure differs by {diff:e}"
    );
    std::fs::remove_dir_all(&dir).ok();
}

// ---------------------------------------------------------------------------
// Exit codes through the real binary.

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_thinfilm"))
}

#[test]
fn exit_codes_distinguish_error_families() {
    let dir = temp_dir("exit_codes");

    // Usage error.
    let status = binary().arg("lubricate").status().unwrap();
    assert_eq!(status.code(), Some(2), "missing --config should exit 2");

    // Parse error (3).
    let bad_syntax = dir.join("syntax.cfg");
    std::fs::write(&bad_syntax, "[run\nmodel = lubricate\n").unwrap();
    let status = binary()
        .args(["lubricate", "--config"])
        .arg(&bad_syntax)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3), "syntax error should exit 3");

    // Missing config file also belongs to the config-read family (3).
    let status = binary()
        .args(["lubricate", "--config", "/nonexistent/nowhere.cfg"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));

    // Validation error (4).
    let invalid = dir.join("invalid.cfg");
    std::fs::write(
        &invalid,
        "[run]\nmodel = lubricate\n[chart]\nname = plane\n[grid]\nn1 = 16\nn2 = 8\n\
         [gap]\nh = 1\n[physics]\nmu = -1\n",
    )
    .unwrap();
    let status = binary()
        .args(["lubricate", "--config"])
        .arg(&invalid)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(4), "validation error should exit 4");

    // Geometry failure (5): degenerate gap below its floor.
    let collapsed = dir.join("collapsed.cfg");
    std::fs::write(
        &collapsed,
        "[run]\nmodel = lubricate\n[chart]\nname = plane\n[grid]\nn1 = 16\nn2 = 8\n\
         [gap]\nh = xi1 - 0.5\n[physics]\nmu = 1\n",
    )
    .unwrap();
    let out = dir.join("out5");
    let status = binary()
        .args(["lubricate", "--config"])
        .arg(&collapsed)
        .args(["--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(5), "gap floor violation should exit 5");

    // Time-stepping failure (7): fixed dt far beyond the CFL bound.
    let cfl = dir.join("cfl.cfg");
    std::fs::write(
        &cfl,
        "[run]\nmodel = shallow\n[chart]\nname = plane\n[grid]\nn1 = 12\nn2 = 12\n\
         bc_xi1 = periodic\nbc_xi2 = periodic\n[gap]\nh = 1\n[physics]\nnu = 1.0\n\
         [shallow]\nt_end = 1.0\ndt = 10.0\nv_init = 0.5, 0\n",
    )
    .unwrap();
    let out = dir.join("out7");
    let status = binary()
        .args(["shallow", "--config"])
        .arg(&cfl)
        .args(["--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(7), "CFL violation should exit 7");

    // Success (0) and artifacts written.
    let ok = dir.join("ok.cfg");
    std::fs::write(
        &ok,
        "[run]\nmodel = lubricate\n[chart]\nname = plane\n[grid]\nn1 = 16\nn2 = 8\n\
         [gap]\nh = 2 - xi1\n[physics]\nmu = 1\n[lubricate]\nv = 1, 0\n",
    )
    .unwrap();
    let out = dir.join("out0");
    let status = binary()
        .args(["lubricate", "--config"])
        .arg(&ok)
        .args(["--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(out.join("pressure.csv").exists());
    assert!(out.join("diagnostics.json").exists());

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn grid_and_tol_overrides_apply() {
    let dir = temp_dir("overrides");
    let cfgp = dir.join("run.cfg");
    std::fs::write(
        &cfgp,
        "[run]\nmodel = lubricate\n[chart]\nname = plane\n[grid]\nn1 = 16\nn2 = 8\n\
         [gap]\nh = 2 - xi1\n[physics]\nmu = 1\n[lubricate]\nv = 1, 0\n",
    )
    .unwrap();
    let out = dir.join("out");
    let status = binary()
        .args(["lubricate", "--config"])
        .arg(&cfgp)
        .args(["--out"])
        .arg(&out)
        .args(["--grid", "24x5", "--tol", "1e-8"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let rows = std::fs::read_to_string(out.join("pressure.csv"))
        .unwrap()
        .lines()
        .count();
    assert_eq!(rows, 1 + 24 * 5);
    std::fs::remove_dir_all(&dir).ok();
}
