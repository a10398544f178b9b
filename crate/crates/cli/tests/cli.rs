//! End-to-end tests of the compiled binary: exit codes, CSV shapes,
//! determinism, and the documented invariance properties surfaced through
//! the command line.

use std::io::Write;
use std::process::{Command, Output};

use tempfile::NamedTempFile;

const BIN: &str = env!("CARGO_BIN_EXE_bbfriction");

const BASE_CONFIG: &str = r#"
[bath]
T2_K = 0.2

[particle]
mass_kg = 1.0
radius_m = 1e-9
T1_K = 0.6

[particle.model]
kind = "lorentz"
alpha0_m3 = 1.0
omega0_rad_s = 1.0
gamma_d_rad_s = 0.05

[state]
beta = 0.3
omega_rad_s = 0.4
theta_rad = 0.7

[constants]
hbar_j_s = 1.0
k_B_J_per_K = 1.0
c_m_per_s = 1.0
"#;

fn config_file(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f.flush().unwrap();
    f
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

/// Data rows of a CSV output: everything that is neither comment nor header.
fn data_rows(stdout: &[u8]) -> Vec<Vec<String>> {
    let text = String::from_utf8_lossy(stdout);
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn header(stdout: &[u8]) -> String {
    let text = String::from_utf8_lossy(stdout);
    text.lines()
        .find(|l| !l.starts_with('#') && !l.is_empty())
        .unwrap_or_default()
        .to_string()
}

#[test]
fn force_emits_the_documented_header_and_identity() {
    let f = config_file(BASE_CONFIG);
    let out = run(&["force", "--config", f.path().to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(
        header(&out.stdout),
        "beta,omega,theta,T1,T2,F_x,Q_dot,F_prime_lab_combo,F_prime_direct,err_est"
    );
    let rows = data_rows(&out.stdout);
    assert_eq!(rows.len(), 1);
    let row: Vec<f64> = rows[0].iter().map(|s| s.parse().unwrap()).collect();
    let (combo, direct, err) = (row[7], row[8], row[9]);
    assert!(
        (combo - direct).abs() <= err,
        "identity violated beyond printed err_est: {combo} vs {direct} (err {err})"
    );
}

#[test]
fn force_at_rest_in_equilibrium_is_all_zero() {
    let text = BASE_CONFIG
        .replace("beta = 0.3", "beta = 0.0")
        .replace("omega_rad_s = 0.4", "omega_rad_s = 0.0")
        .replace("T1_K = 0.6", "T1_K = 0.2");
    let f = config_file(&text);
    let out = run(&["force", "--config", f.path().to_str().unwrap()]);
    assert!(out.status.success());
    let row: Vec<f64> = data_rows(&out.stdout)[0]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    assert_eq!(row[5], 0.0, "F_x");
    assert!(row[6].abs() <= row[9].max(1e-18), "Q_dot: {}", row[6]);
    assert_eq!(row[7], 0.0, "F_prime_lab_combo");
    assert_eq!(row[8], 0.0, "F_prime_direct");
}

#[test]
fn unknown_config_key_exits_2_naming_the_key() {
    let text = BASE_CONFIG.replace("beta = 0.3", "betaa = 0.3");
    let f = config_file(&text);
    let out = run(&["force", "--config", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("betaa"),
        "stderr must name the key: {stderr}"
    );
}

#[test]
fn delta_model_is_rejected_for_quadrature_commands() {
    let text = BASE_CONFIG
        .replace("kind = \"lorentz\"", "kind = \"delta\"")
        .replace("gamma_d_rad_s = 0.05\n", "");
    let f = config_file(&text);
    let out = run(&["force", "--config", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn threshold_row_carries_value_and_window() {
    let out = run(&["threshold", "--chi", "2.5"]);
    assert!(out.status.success());
    assert_eq!(
        header(&out.stdout),
        "chi,theta,u_star,chi_window_lo,chi_window_hi"
    );
    let rows = data_rows(&out.stdout);
    assert_eq!(rows.len(), 1);
    let u_star: f64 = rows[0][2].parse().unwrap();
    assert!((u_star - 0.7329).abs() < 1e-3);
    let lo: f64 = rows[0][3].parse().unwrap();
    let hi: f64 = rows[0][4].parse().unwrap();
    assert!((lo - 1.3158).abs() < 1e-3);
    assert!((hi - 3.6040).abs() < 1e-3);
}

#[test]
fn threshold_below_window_has_empty_u_star() {
    let out = run(&["threshold", "--chi", "0.5"]);
    assert!(out.status.success());
    let rows = data_rows(&out.stdout);
    assert_eq!(
        rows[0][2], "",
        "u_star must be empty when no threshold exists"
    );
}

#[test]
fn fig2_grid_shape_and_anchors() {
    let out = run(&[
        "fig2",
        "--u-max",
        "1.0",
        "--n-points",
        "11",
        "--chi",
        "1.5,2.5",
    ]);
    assert!(out.status.success());
    let rows = data_rows(&out.stdout);
    assert_eq!(rows.len(), 22, "|chi| * n_points rows");
    // chi-major, u-minor; u = 0 anchors equal −χ/sinh²χ for both forms.
    for (start, chi) in [(0usize, 1.5f64), (11, 2.5)] {
        let row = &rows[start];
        assert_eq!(row[0].parse::<f64>().unwrap(), chi);
        assert_eq!(row[1].parse::<f64>().unwrap(), 0.0);
        let anchor = -chi / chi.sinh().powi(2);
        let fq: f64 = row[2].parse().unwrap();
        let fe: f64 = row[3].parse().unwrap();
        assert!((fq - anchor).abs() < 1e-12);
        assert!((fe - anchor).abs() < 1e-12);
    }
}

#[test]
fn sweep_grid_is_emitted_in_grid_order() {
    let f = config_file(BASE_CONFIG);
    let out = run(&[
        "sweep",
        "--config",
        f.path().to_str().unwrap(),
        "--axis",
        "beta:0.1:0.3:3",
        "--axis",
        "theta:0:1.2:4",
        "--quantity",
        "F_prime",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(header(&out.stdout), "beta,theta,F_prime,err_est,error_flag");
    let rows = data_rows(&out.stdout);
    assert_eq!(rows.len(), 12);
    // Row-major: beta slowest, theta fastest.
    let beta0: f64 = rows[0][0].parse().unwrap();
    let beta3: f64 = rows[3][0].parse().unwrap();
    let beta4: f64 = rows[4][0].parse().unwrap();
    assert_eq!(beta0, 0.1);
    assert_eq!(beta3, 0.1);
    assert_eq!(beta4, 0.2);
    let theta1: f64 = rows[1][1].parse().unwrap();
    assert!((theta1 - 0.4).abs() < 1e-12);
    for row in &rows {
        assert_eq!(row[4], "0", "no point should fail");
    }
}

#[test]
fn sweep_over_tilt_is_flat_without_rotation() {
    let text = BASE_CONFIG.replace("omega_rad_s = 0.4", "omega_rad_s = 0.0");
    let f = config_file(&text);
    let out = run(&[
        "sweep",
        "--config",
        f.path().to_str().unwrap(),
        "--axis",
        "theta:0:1.5:4",
        "--quantity",
        "F_prime",
    ]);
    assert!(out.status.success());
    let rows = data_rows(&out.stdout);
    let values: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    for v in &values[1..] {
        assert!(
            ((v - values[0]) / values[0]).abs() < 1e-8,
            "tilt leaked into zero-rotation force: {values:?}"
        );
    }
}

#[test]
fn sweep_over_particle_temperature_is_flat() {
    let f = config_file(BASE_CONFIG);
    let out = run(&[
        "sweep",
        "--config",
        f.path().to_str().unwrap(),
        "--axis",
        "T1:0.1:1.0:4",
        "--quantity",
        "F_prime",
    ]);
    assert!(out.status.success());
    let rows = data_rows(&out.stdout);
    let values: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    for v in &values[1..] {
        assert!(
            ((v - values[0]) / values[0]).abs() < 1e-8,
            "T1 leaked into F_prime: {values:?}"
        );
    }
}

#[test]
fn sweep_normalized_requires_motion() {
    let text = BASE_CONFIG.replace("beta = 0.3", "beta = 0.0");
    let f = config_file(&text);
    let out = run(&[
        "sweep",
        "--config",
        f.path().to_str().unwrap(),
        "--axis",
        "u:0:1:3",
        "--quantity",
        "f_normalized",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn evolve_emits_strictly_increasing_times() {
    let text = format!("{BASE_CONFIG}\n[solver]\nt_span_s = 1.0\nsample_interval_s = 0.25\n");
    let f = config_file(&text);
    let out = run(&["evolve", "--config", f.path().to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(header(&out.stdout), "t,beta,F_prime_x,Q_dot");
    let rows = data_rows(&out.stdout);
    assert!(rows.len() >= 4);
    let times: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    for pair in times.windows(2) {
        assert!(pair[1] > pair[0], "times must increase strictly: {times:?}");
    }
}

#[test]
fn evolve_from_rest_stays_at_rest() {
    let text = format!(
        "{}\n[solver]\nt_span_s = 1.0\nsample_interval_s = 0.5\n",
        BASE_CONFIG.replace("beta = 0.3", "beta = 0.0")
    );
    let f = config_file(&text);
    let out = run(&["evolve", "--config", f.path().to_str().unwrap()]);
    assert!(out.status.success());
    for row in data_rows(&out.stdout) {
        assert_eq!(row[1].parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn evolve_small_beta_decay_is_exponential() {
    // Narrow line at χ = 2.5 in reduced units: the decay constant is the
    // closed-form linear drag coefficient, τ = m/κ with
    // κ = α(0)ω₀⁵χ/(3c⁵sinh²χ).
    let chi = 2.5_f64;
    let kappa = chi / (3.0 * chi.sinh().powi(2));
    let tau = 10.0;
    let text = format!(
        r#"
[bath]
T2_K = {t2}

[particle]
mass_kg = {mass}
radius_m = 1e-9
T1_K = {t2}

[particle.model]
kind = "lorentz"
alpha0_m3 = 1.0
omega0_rad_s = 1.0
gamma_d_rad_s = 1e-4

[state]
beta = 0.01
omega_rad_s = 0.0
theta_rad = 0.0

[solver]
t_span_s = 10.0
rel_tol = 1e-8
abs_tol = 1e-14
sample_interval_s = 2.5

[constants]
hbar_j_s = 1.0
k_B_J_per_K = 1.0
c_m_per_s = 1.0
"#,
        t2 = 1.0 / (2.0 * chi),
        mass = kappa * tau,
    );
    let f = config_file(&text);
    let out = run(&["evolve", "--config", f.path().to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = data_rows(&out.stdout);
    assert!(rows.len() >= 4);
    let first = &rows[0];
    let last = rows.last().unwrap();
    let t0: f64 = first[0].parse().unwrap();
    let t1: f64 = last[0].parse().unwrap();
    let b0: f64 = first[1].parse().unwrap();
    let b1: f64 = last[1].parse().unwrap();
    let slope = (b1.ln() - b0.ln()) / (t1 - t0);
    assert!(
        (slope * tau + 1.0).abs() < 0.01,
        "log-beta slope {slope} vs -1/tau = {}",
        -1.0 / tau
    );
}

#[test]
fn evolve_without_solver_section_is_a_config_error() {
    let f = config_file(BASE_CONFIG);
    let out = run(&["evolve", "--config", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn outputs_are_byte_reproducible() {
    let f = config_file(BASE_CONFIG);
    let args = [
        "sweep",
        "--config",
        f.path().to_str().unwrap(),
        "--axis",
        "beta:0.1:0.5:3",
        "--quantity",
        "Q_dot",
        "--seed",
        "42",
    ];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn out_flag_writes_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("threshold.csv");
    let out = run(&["threshold", "--chi", "2.0", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("chi,theta,u_star"));
}

#[test]
fn precision_digits_are_honored() {
    let text = format!("{BASE_CONFIG}\n[output]\nprecision_digits = 3\n");
    let f = config_file(&text);
    let out = run(&["force", "--config", f.path().to_str().unwrap()]);
    assert!(out.status.success());
    let rows = data_rows(&out.stdout);
    assert!(
        rows[0][5].contains('e'),
        "fixed precision uses scientific notation: {}",
        rows[0][5]
    );
}
