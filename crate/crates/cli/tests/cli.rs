//! End-to-end runs of the `lwt` binary: outputs, exit codes and determinism.

use std::collections::HashMap;
use std::f64::consts::{E, PI};
use std::path::PathBuf;
use std::process::{Command, Output};

fn lwt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lwt"))
        .args(args)
        .output()
        .expect("binary runs")
}

/// Writes `body` to a fresh config file under the target temp directory.
fn config(name: &str, body: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli-configs");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn run_ok(args: &[&str]) -> String {
    let out = lwt(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn rows(csv_text: &str) -> Vec<HashMap<String, String>> {
    let mut r = csv::Reader::from_reader(csv_text.as_bytes());
    let header = r.headers().unwrap().clone();
    r.records()
        .map(|rec| {
            let rec = rec.unwrap();
            header
                .iter()
                .zip(rec.iter())
                .map(|(h, v)| (h.to_string(), v.to_string()))
                .collect()
        })
        .collect()
}

fn num(row: &HashMap<String, String>, key: &str) -> f64 {
    row[key]
        .parse()
        .unwrap_or_else(|_| panic!("{key} = {:?}", row[key]))
}

#[test]
fn audit_reports_catalog_invariants() {
    let c = config("audit-qi.toml", "lattice = \"q-i\"\nmaster_seed = 5\n");
    let r = rows(&run_ok(&["lattice-audit", "--config", c.to_str().unwrap()]));
    assert_eq!(r.len(), 1);
    assert_eq!(r[0]["master_seed"], "5");
    assert_eq!(r[0]["dual_check"], "true");
    assert!((num(&r[0], "np") - 1.0).abs() < 1e-9);
    assert!(num(&r[0], "np_margin").abs() < 1e-9);

    let c = config("audit-z5.toml", "lattice = \"q-zeta5\"\n");
    let r = rows(&run_ok(&["lattice-audit", "--config", c.to_str().unwrap()]));
    assert!((num(&r[0], "hermite") - 4.0 / 125f64.powf(0.25)).abs() < 1e-9);

    let c = config("audit-golden.toml", "lattice = \"golden\"\n");
    let r = rows(&run_ok(&["lattice-audit", "--config", c.to_str().unwrap()]));
    assert!((num(&r[0], "pdet_min") - 1.0).abs() < 1e-9);
    assert_eq!(r[0]["np"], "");
    assert_eq!(r[0]["dual_check"], "true");
}

#[test]
fn config_errors_exit_with_two() {
    let c = config("bad-key.toml", "lattice = \"q-i\"\nlatice = \"q-i\"\n");
    assert_eq!(
        lwt(&["lattice-audit", "--config", c.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    let c = config("bad-ref.toml", "lattice = \"no-such-field\"\n");
    assert_eq!(
        lwt(&["lattice-audit", "--config", c.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(lwt(&["rates"]).status.code(), Some(2));
    assert_eq!(lwt(&["verify", "no-such-suite"]).status.code(), Some(2));
    let c = config(
        "bad-rate.toml",
        "k_list = [1]\nrate_aux = 2.0\nrate_aux_margin = 0.5\nsnr_b_db = 20.0\nsnr_e_db = 0.0\n\
         law_b = \"static\"\nlaw_e = \"static\"\n",
    );
    assert_eq!(
        lwt(&["simulate", "--config", c.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn verify_writes_a_report_and_succeeds() {
    let r = rows(&run_ok(&["verify", "lattice", "--seed", "3"]));
    assert!(!r.is_empty());
    assert!(r
        .iter()
        .all(|x| x["passed"] == "true" && x["master_seed"] == "3"));
}

#[test]
fn gaussian_rates_match_hand_arithmetic() {
    let c = config(
        "rates-gauss.toml",
        "mode = \"gaussian\"\nsnr_e_db = 5.0\nsnr_b_db = [10.0, 20.0]\n\
         constant_sets = [\"conway-thompson\"]\n",
    );
    let r = rows(&run_ok(&["rates", "--config", c.to_str().unwrap()]));
    assert_eq!(r.len(), 2);
    for (row, db) in r.iter().zip([10.0f64, 20.0]) {
        let rho_b = 10f64.powf(db / 10.0);
        let rho_e = 10f64.powf(0.5);
        let want = (1.0 + rho_b).ln() - (1.0 + rho_e).ln() - (4.0 * E / PI).ln();
        assert!((num(row, "r_max_nats") - want).abs() < 1e-12);
        assert!((num(row, "r_max_bits") - want / 2f64.ln()).abs() < 1e-12);
    }
}

#[test]
fn vanishing_gap_constants_give_the_capacity_difference() {
    // κ = ln(4/(π² t_b t_e)) vanishes at t_b = t_e = 2/π (root discriminant π).
    let t = 2.0 / PI;
    let c = config(
        "rates-kappa0.toml",
        &format!(
            "mode = \"rayleigh\"\nsnr_e_db = 5.0\nsnr_b_db = [15.0, 30.0]\n\
             constant_sets = [\"user\"]\nuser_g_b = {t}\nuser_g_e = {t}\n"
        ),
    );
    for row in rows(&run_ok(&["rates", "--config", c.to_str().unwrap()])) {
        let diff = num(&row, "c_b_nats") - num(&row, "c_e_nats");
        assert!((num(&row, "r_max_nats") - diff).abs() < 1e-12);
    }
}

const SIM: &str = "k_list = [1, 2]\nrate_aux_margin = 0.5\nsnr_b_db = 20.0\nsnr_e_db = 0.0\n\
                   law_b = \"rayleigh\"\nlaw_e = \"static\"\ntrials = 5000\nleakage_trials = 20000\n\
                   master_seed = 9\n";

#[test]
fn simulate_is_byte_identical_across_thread_counts() {
    let c = config("sim-det.toml", SIM);
    let p = c.to_str().unwrap();
    let one = run_ok(&["simulate", "--config", p, "--threads", "1"]);
    let many = run_ok(&["simulate", "--config", p, "--threads", "4"]);
    let again = run_ok(&["simulate", "--config", p, "--threads", "4"]);
    assert_eq!(one, many);
    assert_eq!(many, again);
    // A different seed changes the Monte Carlo columns but not the hash of a fixed config.
    let other = run_ok(&["simulate", "--config", p, "--seed", "10"]);
    assert_ne!(one, other);
    let r = rows(&one);
    assert!(r
        .iter()
        .all(|x| x["master_seed"] == "9" && x["config_hash"] == r[0]["config_hash"]));
}

#[test]
fn simulate_out_flag_writes_the_same_bytes() {
    let c = config("sim-out.toml", SIM);
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("sim-out.csv");
    let p = c.to_str().unwrap();
    run_ok(&["simulate", "--config", p, "--out", out.to_str().unwrap()]);
    assert_eq!(
        std::fs::read_to_string(&out).unwrap(),
        run_ok(&["simulate", "--config", p])
    );
}

#[test]
fn epsilon_k_decreases_with_the_field_degree() {
    let c = config(
        "sim-eps.toml",
        "k_list = [1, 2, 3, 4]\nrate_aux_margin = 0.5\nsnr_b_db = 20.0\nsnr_e_db = 0.0\n\
         law_b = \"static\"\nlaw_e = \"static\"\n",
    );
    let r = rows(&run_ok(&["simulate", "--config", c.to_str().unwrap()]));
    assert_eq!(r.len(), 4);
    for w in r.windows(2) {
        assert!(num(&w[1], "epsilon_k") < num(&w[0], "epsilon_k"));
    }
    assert!(r.iter().all(|x| x["condition_met"] == "true"));
}

#[test]
fn absurd_rates_decode_at_chance_level() {
    let c = config(
        "sim-chance.toml",
        "k_list = [1]\nrate_aux = 2.0\nsnr_b_db = -20.0\nsnr_e_db = 0.0\n\
         law_b = \"static\"\nlaw_e = \"static\"\ntrials = 4000\n",
    );
    let r = rows(&run_ok(&["simulate", "--config", c.to_str().unwrap()]));
    assert!((num(&r[0], "p_e") - 0.75).abs() < 0.05);
}
