use std::fs;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;

use softpart_cli::commands::write_harmonic_target;
use softpart_cli::config::ParticleParams;
use softpart_cli::{cmd_design, cmd_forward, cmd_simulate, CliError, PipelineConfig};
use softpart_core::geometry::dot;
use softpart_core::io as sio;
use softpart_core::{ComplexField, DomainGrid, FieldRole};

fn small_config(dir: &Path) -> PipelineConfig {
    let mut cfg = PipelineConfig::default();
    cfg.resolution = 10;
    cfg.quadrature_order = 8;
    cfg.output_dir = dir.join("out");
    cfg
}

fn write_potential(path: &Path, cfg: &PipelineConfig, f: impl Fn(&[f64; 3]) -> Complex64) {
    let grid = Arc::new(DomainGrid::build(cfg.domain_spec.clone(), cfg.resolution).unwrap());
    let q = ComplexField::from_fn(grid, FieldRole::PotentialQ, |x| f(x));
    let mut w = sio::create(path).unwrap();
    sio::write_field(&mut w, &q, Some(cfg.k), Some(cfg.alpha)).unwrap();
    use std::io::Write;
    w.flush().unwrap();
}

#[test]
fn forward_zero_potential_gives_zero_pattern() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let q = dir.path().join("q.csv");
    write_potential(&q, &cfg, |_| Complex64::new(0.0, 0.0));
    let r = cmd_forward(&cfg, &q).unwrap();
    assert_eq!(r.pattern_norm, 0.0);
    let p = sio::read_pattern(sio::open(&cfg.output_dir.join("pattern.csv")).unwrap()).unwrap();
    assert!(p.values.iter().all(|v| v.norm() == 0.0));
    assert!(cfg.output_dir.join("forward_report.json").exists());
}

#[test]
fn forward_weak_potential_matches_born() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let q = dir.path().join("q.csv");
    write_potential(&q, &cfg, |x| Complex64::from(1e-3 * (1.0 - dot(x, x))));
    let r = cmd_forward(&cfg, &q).unwrap();
    assert!(r.pattern_norm > 0.0);
    assert!(r.born_relative_diff <= 0.01, "{}", r.born_relative_diff);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(cfg.output_dir.join("forward_report.json")).unwrap()).unwrap();
    assert_eq!(json["resolution"], 10);
}

#[test]
fn forward_truncated_file_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let q = dir.path().join("q.csv");
    write_potential(&q, &cfg, |_| Complex64::from(0.5));
    let text = fs::read_to_string(&q).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    let bad_line = 5;
    let cut = lines[bad_line - 1].rsplit_once(',').unwrap().0.to_string();
    lines[bad_line - 1] = &cut;
    fs::write(&q, lines.join("\n")).unwrap();
    let err = cmd_forward(&cfg, &q).unwrap_err();
    assert_eq!(err.exit_code(), 4, "{err}");
    assert!(err.to_string().contains(&bad_line.to_string()), "{err}");
}

#[test]
fn invalid_config_fails_before_work() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config(dir.path());
    cfg.k = -1.0;
    let err = cmd_simulate(&cfg, None).unwrap_err();
    assert!(matches!(err, CliError::Validation(_)));
    assert!(err.to_string().contains('k'), "{err}");
    assert!(!cfg.output_dir.exists());
}

#[test]
fn design_zero_target_gives_zero_fields() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config(dir.path());
    cfg.particle = Some(ParticleParams {
        radius: None,
        c0: Some(0.5),
        zeta: None,
    });
    let target = dir.path().join("target.csv");
    write_harmonic_target(&target, &cfg, &[]).unwrap();
    let r = cmd_design(&cfg, &target).unwrap();
    assert_eq!(r.synthesis.final_error, 0.0);
    assert_eq!(r.total_particles, Some(0.0));
    for name in ["h.csv", "q.csv"] {
        let (f, _) = sio::read_field(sio::open(&cfg.output_dir.join(name)).unwrap()).unwrap();
        assert_eq!(f.max_abs(), 0.0, "{name}");
    }
    let n = sio::read_density(sio::open(&cfg.output_dir.join("N.csv")).unwrap()).unwrap();
    assert!(n.values.iter().all(|v| *v == 0.0));
}

#[test]
fn design_harmonic_target_meets_budget() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config(dir.path());
    cfg.eps.eps1 = 1e-3;
    cfg.eps.eps = 5e-2;
    let target = dir.path().join("target.csv");
    let f = write_harmonic_target(&target, &cfg, &[(0, 0, Complex64::from(0.05))]).unwrap();
    let r = cmd_design(&cfg, &target).unwrap();
    assert!(r.synthesis.eps1 <= 1e-3);
    assert!(r.synthesis.final_error <= r.synthesis.bound * 1.1);
    assert!(r.synthesis.final_error / f.norm() <= 0.05);
    assert!(!cfg.output_dir.join("N.csv").exists());
    assert!(cfg.output_dir.join("synthesis_report.json").exists());
}

#[test]
fn design_unrealizable_target_names_impedance() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config(dir.path());
    cfg.eps.eps1 = 1e-3;
    cfg.eps.eps = 5e-2;
    cfg.particle = Some(ParticleParams {
        radius: None,
        c0: Some(0.5),
        zeta: None,
    });
    let target = dir.path().join("target.csv");
    // A positive-strength monopole needs q < 0, which positive capacitances cannot supply.
    write_harmonic_target(&target, &cfg, &[(0, 0, Complex64::from(0.05))]).unwrap();
    let err = cmd_design(&cfg, &target).unwrap_err();
    assert_eq!(err.exit_code(), 3, "{err}");
    assert!(err.to_string().contains("zeta"), "{err}");
    assert!(cfg.output_dir.join("synthesis_report.json").exists());
}

#[test]
fn design_rejects_mismatched_wavenumber() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let target = dir.path().join("target.csv");
    write_harmonic_target(&target, &cfg, &[(0, 0, Complex64::from(0.05))]).unwrap();
    let mut other = cfg.clone();
    other.k = 2.0;
    assert_eq!(cmd_design(&other, &target).unwrap_err().exit_code(), 2);
}

#[test]
fn simulate_without_particles_gives_zero_patterns() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config(dir.path());
    cfg.m_list = vec![0];
    cfg.seeds = vec![3];
    let r = cmd_simulate(&cfg, None).unwrap();
    assert_eq!(r.records.len(), 1);
    assert!((r.records[0].error - 1.0).abs() < 1e-12, "{}", r.records[0].error);
    let p = sio::read_pattern(sio::open(&cfg.output_dir.join("pattern_M0_seed3.csv")).unwrap()).unwrap();
    assert!(p.values.iter().all(|v| v.norm() == 0.0));
}

#[test]
fn simulate_reports_packing_limit() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config(dir.path());
    cfg.contrast = 1e4;
    cfg.m_list = vec![10];
    cfg.seeds = vec![0];
    let err = cmd_simulate(&cfg, None).unwrap_err();
    assert_eq!(err.exit_code(), 3, "{err}");
    assert!(err.to_string().contains("densit"), "{err}");
}

#[test]
fn simulate_accepts_designed_potential_file() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config(dir.path());
    cfg.m_list = vec![200];
    cfg.seeds = vec![1, 2];
    let q = dir.path().join("q.csv");
    write_potential(&q, &cfg, |x| Complex64::from(1.0 - dot(x, x)));
    let r = cmd_simulate(&cfg, Some(&q)).unwrap();
    assert_eq!(r.records.len(), 2);
    assert!(r.records.iter().all(|rec| rec.error < 0.5));
    let side: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(cfg.output_dir.join("ensemble_M200_seed2.json")).unwrap()).unwrap();
    assert_eq!(side["M"], 200);
    assert_eq!(side["seed"], 2);
}
