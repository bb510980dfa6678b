use std::fs;
use std::path::Path;
use std::process::Command;

use curvplateau::cli::{
    parse_config, run, run_file, RunOptions, EXIT_ADMISSIBILITY, EXIT_CHECK_FAILURE, EXIT_CONFIG, EXIT_CONVERGENCE,
    EXIT_OK, MANIFEST_FILE, REPORT_FILE,
};

const SOLVE: &str = r#"
command = "solve"
function = { kind = "gauss", n = 2 }
domain = { shape = "disk", radius = 1.0, nodes = 21 }
kappa = { kind = "constant", value = 0.5 }
"#;

fn write(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn quiet(out: &Path) -> RunOptions {
    RunOptions {
        out_dir: out.to_path_buf(),
        quiet: true,
    }
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn binary_reports_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_curvplateau");
    let cases = [
        ("ok.toml", SOLVE.to_string(), EXIT_OK),
        ("syntax.toml", "command = ".to_string(), EXIT_CONFIG),
        ("unknown.toml", format!("{SOLVE}colour = 1\n"), EXIT_CONFIG),
        ("adm.toml", SOLVE.replace("value = 0.5", "value = 2.0"), EXIT_ADMISSIBILITY),
        ("conv.toml", format!("{SOLVE}[newton]\nmax_iters = 1\ntol = 1e-14\n"), EXIT_CONVERGENCE),
        (
            "check.toml",
            format!("{SOLVE}[checks]\nrequested = [\"radial_oracle\"]\nradial = {{ nodes = 2001, tol = 1e-12 }}\n"),
            EXIT_CHECK_FAILURE,
        ),
    ];
    for (name, body, code) in cases {
        let cfg = write(tmp.path(), name, &body);
        let out = tmp.path().join(format!("out_{name}"));
        let status = Command::new(bin)
            .args(["--quiet", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .env("CURVPLATEAU_THREADS", "2")
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(code), "{name}");
        if code != EXIT_CONFIG {
            assert!(out.join(MANIFEST_FILE).exists() && out.join(REPORT_FILE).exists(), "{name}");
        }
    }
}

#[test]
fn missing_config_file_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_file(&tmp.path().join("absent.toml"), None, &quiet(tmp.path()));
    assert_eq!(out.exit_code, EXIT_CONFIG);
}

#[test]
fn semantic_errors_are_all_listed() {
    let body = r#"
command = "solve"
function = { kind = "quotient", n = 3, k = 3 }
kappa = { kind = "constant", value = -1.0 }
"#;
    let err = parse_config(body).unwrap_err();
    assert!(err.errors.len() >= 2, "{:?}", err.errors);
    assert!(err.errors.iter().any(|e| e.starts_with("function.k")));
    assert!(err.errors.iter().any(|e| e.starts_with("kappa.value")));
}

#[test]
fn manifest_replays_byte_identically() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.toml", &format!("{SOLVE}[checks]\nrequested = [\"radial_oracle\", \"uniqueness\"]\n"));
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(run_file(&cfg, Some(11), &quiet(&a)).exit_code, EXIT_OK);
    assert_eq!(run_file(&a.join(MANIFEST_FILE), None, &quiet(&b)).exit_code, EXIT_OK);
    assert_eq!(files(&a), files(&b));
    assert!(fs::read_to_string(a.join(MANIFEST_FILE)).unwrap().contains("seed = 11"));
}

#[test]
fn manifest_lists_every_default() {
    let cfg = parse_config(SOLVE).unwrap();
    let manifest = cfg.to_manifest();
    for key in ["seed", "[newton]", "[continuation]", "[checks.stability]", "[checks.ordering]", "[axioms]", "[mu_inf]"] {
        assert!(manifest.contains(key), "{key} missing from\n{manifest}");
    }
    assert_eq!(parse_config(&manifest).unwrap(), cfg);
}

#[test]
fn sample_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    for e in fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        let text = fs::read_to_string(&p).unwrap();
        assert!(parse_config(&text).is_ok(), "{}", p.display());
    }
}

#[test]
fn axiom_and_mu_commands_write_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let axioms = parse_config("command = \"check-axioms\"\nfunction = { kind = \"quotient\", n = 3, k = 2 }\n").unwrap();
    let out = run(&axioms, &quiet(&tmp.path().join("ax")));
    assert_eq!(out.exit_code, EXIT_OK);
    assert!(out.reports.iter().all(|r| r.name.starts_with("axiom_")));

    let mu = parse_config("command = \"mu-inf\"\nfunction = { kind = \"gauss\", n = 2 }\n").unwrap();
    let out = run(&mu, &quiet(&tmp.path().join("mu")));
    assert_eq!(out.exit_code, EXIT_OK);
    assert!(out.reports[0].detail.starts_with("divergent"), "{}", out.reports[0].detail);
}
