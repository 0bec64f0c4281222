use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fermi_absorption::output::parse_file;
use fermi_absorption::scenario::Format;

const BIN: &str = env!("CARGO_BIN_EXE_fermi-absorption");

const TF_FINITE: &str = r#"route = "tf_finite"
N = 2000
T = "0.3 EF"
alpha = 3.0
lambda_y = 1.0
lambda_z = 1.0
omega_ratio = 1.0
excited = [{ offset = "0 Omega", dipole_sq = 1.0 }]
grid = "-80:100:361"
"#;

fn workdir(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn repo_configs() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut v: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "toml"))
        .collect();
    v.sort();
    v
}

#[test]
fn shipped_configs_validate() {
    let configs = repo_configs();
    assert!(configs.len() >= 4);
    for c in configs {
        let out = run(&["validate", c.to_str().unwrap()]);
        assert!(out.status.success(), "{}: {}", c.display(), String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn removing_any_required_field_is_a_named_config_error() {
    let dir = workdir("missing_fields");
    for (i, line) in TF_FINITE.lines().enumerate() {
        let key = line.split(" = ").next().unwrap();
        if key == "grid" {
            continue;
        }
        let text: String = TF_FINITE
            .lines()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, l)| format!("{l}\n"))
            .collect();
        let path = write_config(&dir, &format!("no_{key}.toml"), &text);
        let out = run(&["validate", &path]);
        assert_eq!(out.status.code(), Some(2), "{key}");
        let stderr = String::from_utf8_lossy(&out.stderr);
        assert!(stderr.contains(&format!("`{key}`")), "{key}: {stderr}");
    }
}

#[test]
fn unknown_keys_and_missing_units_exit_with_2() {
    let dir = workdir("bad_keys");
    let path = write_config(&dir, "extra.toml", &format!("{TF_FINITE}temperature = 3\n"));
    assert_eq!(run(&["validate", &path]).status.code(), Some(2));
    let path = write_config(&dir, "units.toml", &TF_FINITE.replace("0.3 EF", "0.3"));
    let out = run(&["validate", &path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`T`"));
    assert_eq!(run(&["validate", "/nonexistent/config.toml"]).status.code(), Some(2));
}

#[test]
fn unsupported_combination_exits_with_3() {
    let dir = workdir("unsupported");
    let text = TF_FINITE
        .replace("tf_finite", "exact")
        .replace("0.3 EF", "0 EF")
        .replace("omega_ratio = 1.0", "omega_ratio = 1.2")
        .replace("grid = \"-80:100:361\"\n", "");
    let path = write_config(&dir, "exact.toml", &text);
    let out = run(&["run", &path]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn run_writes_file_that_parses_and_integrates_to_n() {
    let dir = workdir("run_csv");
    let cfg = write_config(&dir, "s.toml", TF_FINITE);
    let out_path = dir.join("s.csv");
    let out = run(&["run", &cfg, "--out", out_path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let file = parse_file(&fs::read(&out_path).unwrap(), Format::Csv).unwrap();
    let total = file.block("total").unwrap();
    assert!((total.integral() / 2000.0 - 1.0).abs() < 1e-9);
    assert!(file.header.contains_key("W") && file.header.contains_key("delta_paper"));
    assert!(file.config.contains("T = \"0.3 EF\""));
}

#[test]
fn stdout_json_and_flag_overrides() {
    let dir = workdir("stdout_json");
    let cfg = write_config(&dir, "s.toml", TF_FINITE);
    let out = run(&["run", &cfg, "--format", "json", "--grid", "-50:70:121"]);
    assert!(out.status.success());
    let file = parse_file(&out.stdout, Format::Json).unwrap();
    let total = file.block("total").unwrap();
    assert_eq!(total.len(), 121);
    assert_eq!(total.grid[0], -50.0);
    let out = run(&["run", &cfg, "--grid", "3:1:10"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["run", &cfg, "--broaden", "gaussian:0.5"]);
    assert_eq!(out.status.code(), Some(2), "broadening is rejected for tf_finite");
}

#[test]
fn monte_carlo_runs_are_byte_identical_and_record_the_seed() {
    let dir = workdir("mc");
    let text = TF_FINITE.replace("tf_finite", "mc_oracle") + "seed = 5\nsamples = 20000\n";
    let cfg = write_config(&dir, "mc.toml", &text);
    let a = run(&["run", &cfg]);
    let b = run(&["run", &cfg]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let file = parse_file(&a.stdout, Format::Csv).unwrap();
    assert_eq!(file.header["seed"], 5.0);
    let c = run(&["run", &cfg, "--seed", "6"]);
    assert_ne!(a.stdout, c.stdout);
    let missing = write_config(&dir, "noseed.toml", &text.replace("seed = 5\n", ""));
    assert_eq!(run(&["validate", &missing]).status.code(), Some(2));
}

#[test]
fn preset_fig2_writes_compare_blocks_and_line_sidecar() {
    let dir = workdir("fig2");
    let out = run(&["preset", "fig2", "--out", dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let file = parse_file(&fs::read(dir.join("fig2.csv")).unwrap(), Format::Csv).unwrap();
    let names: Vec<&str> = file.blocks.iter().map(|b| b.name.as_str()).collect();
    assert_eq!(names, ["exact", "tf", "difference"]);
    for name in ["exact", "tf"] {
        let s = file.block(name).unwrap();
        assert!((s.integral() / 35.0 - 1.0).abs() < 1e-3, "{name}: {}", s.integral());
    }
    let sidecar = fs::read_to_string(dir.join("fig2.lines.csv")).unwrap();
    assert!(sidecar.contains("excited,m,detuning,weight"));
    assert_eq!(run(&["preset", "fig9"]).status.code(), Some(2));
}
