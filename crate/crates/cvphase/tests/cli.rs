use std::process::Command;

fn cvphase(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_cvphase")).args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn data_rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

fn footer<'a>(csv: &'a str, key: &str) -> &'a str {
    let prefix = format!("# {key} = ");
    csv.lines().find_map(|l| l.strip_prefix(prefix.as_str())).unwrap()
}

#[test]
fn discord_curve_columns_and_header() {
    let (code, out, _) = cvphase(&["discord-curve", "--r-max", "5", "--points", "100"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("# cvphase "));
    assert!(out.contains("# param r_max = 5.0") && out.contains("# param points = 100"));
    assert!(out.contains("\nr,discord_bits,asymptote_bits\n"));
    let rows = data_rows(&out);
    assert_eq!(rows.len(), 100);
    assert_eq!(rows[0][1], 0.0);
    assert!(rows.windows(2).all(|w| w[1][1] > w[0][1]));
    let last = rows.last().unwrap();
    assert!((last[1] - last[2]).abs() < 1e-3);
}

#[test]
fn output_is_deterministic_and_lossless() {
    let args = ["chsh-johansen", "--points", "31"];
    let (_, a, _) = cvphase(&args);
    let (_, b, _) = cvphase(&args);
    assert_eq!(a, b);
    let line = a.lines().find(|l| !l.starts_with('#') && l.starts_with(|c: char| c.is_ascii_digit() || c == '-')).unwrap();
    for cell in line.split(',') {
        let mantissa = cell.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
        assert_eq!(mantissa.len(), 17, "{cell}");
        let v: f64 = cell.parse().unwrap();
        assert_eq!(format!("{v:.16e}"), cell);
    }
}

#[test]
fn chsh_bell_reports_root() {
    let (code, out, _) = cvphase(&["chsh-bell", "--x-min", "0", "--x-max", "2", "--points", "400"]);
    assert_eq!(code, 0);
    assert!(out.contains("x,two_minus_B_over_N2,threeF_minus_F3"));
    let root: f64 = footer(&out, "root").parse().unwrap();
    assert!((root - 0.989761).abs() < 1e-4);
    let rows = data_rows(&out);
    assert_eq!(rows.len(), 400);
    assert!(rows.iter().any(|r| r[2] < 0.0));
}

#[test]
fn pseudospin_json() {
    let (code, out, _) = cvphase(&["pseudospin-bell", "--family", "bw", "--r", "2", "--phi", "0"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let value = v["result"]["value"].as_f64().unwrap();
    assert!(value > 2.0 && value <= 2.0 * 2f64.sqrt() + 1e-6, "{value}");
    assert_eq!(v["result"]["settings"].as_array().unwrap().len(), 4);
    assert_eq!(v["parameters"]["family"], "bw");
}

#[test]
fn config_errors_exit_two() {
    let dir = std::env::temp_dir().join(format!("cvphase-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, r#"{"parameters": {"r_maxx": 3}}"#).unwrap();
    let (code, _, err) = cvphase(&["discord-curve", "--config", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("r_maxx"), "{err}");

    std::fs::write(&bad, r#"{"paramters": {}}"#).unwrap();
    let (code, _, err) = cvphase(&["discord-curve", "--config", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("paramters"), "{err}");

    std::fs::write(&bad, r#"{"command": "chsh-epr"}"#).unwrap();
    let (code, _, _) = cvphase(&["discord-curve", "--config", bad.to_str().unwrap()]);
    assert_eq!(code, 2);

    let (code, _, err) = cvphase(&["discord-curve", "--points", "1"]);
    assert_eq!(code, 2);
    assert!(err.contains("points"));
}

#[test]
fn config_overrides_flags() {
    let dir = std::env::temp_dir().join(format!("cvphase-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("c.json");
    let out = dir.join("out.csv");
    std::fs::write(
        &cfg,
        format!(r#"{{"command": "discord-curve", "parameters": {{"points": 7}}, "output": "{}"}}"#, out.display()),
    )
    .unwrap();
    let (code, stdout, _) = cvphase(&["discord-curve", "--points", "50", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    assert_eq!(data_rows(&std::fs::read_to_string(&out).unwrap()).len(), 7);

    let (code, _, _) = cvphase(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(data_rows(&std::fs::read_to_string(&out).unwrap()).len(), 7);
}

#[test]
fn numerical_failure_exits_three() {
    let (code, _, err) = cvphase(&["pseudospin-bell", "--r", "3"]);
    assert_eq!(code, 3);
    assert!(err.contains("pseudospin-bell"));
}

#[test]
fn weyl_check_is_seeded() {
    let (code, a, _) = cvphase(&["weyl-check", "--count", "6", "--seed", "5"]);
    assert_eq!(code, 0);
    assert!(a.contains("# seed: 5"));
    let (_, b, _) = cvphase(&["weyl-check", "--count", "6", "--seed", "5"]);
    assert_eq!(a, b);
    let worst: f64 = footer(&a, "max_rel_diff").parse().unwrap();
    assert!(worst < 1e-7);
}

#[test]
fn other_commands_run() {
    for args in [
        vec!["squeeze-evolve", "--samples", "20"],
        vec!["power-spectrum"],
        vec!["wigner-cat", "--points", "11"],
        vec!["wigner-tmss", "--points", "5", "--phi", "0.4"],
        vec!["wigner-wkb", "--points", "9"],
        vec!["wigner-wkb", "--mode", "berry", "--points", "9"],
        vec!["chsh-epr", "--points", "10"],
        vec!["pseudospin-bell", "--family", "larsson", "--r", "1", "--ell", "2"],
    ] {
        let (code, out, err) = cvphase(&args);
        assert_eq!(code, 0, "{args:?}: {err}");
        assert!(!out.is_empty());
    }
    let (_, out, _) = cvphase(&["wigner-tmss", "--points", "5", "--phi", "0.4", "--r", "1.2"]);
    for r in data_rows(&out) {
        assert!((r[2] - r[3]).abs() < 1e-12);
    }
    let (_, out, _) = cvphase(&["power-spectrum"]);
    let ns: f64 = footer(&out, "n_s").parse().unwrap();
    assert!((ns - 1.0).abs() < 0.01);
}

#[test]
fn verify_lists_every_criterion() {
    let (code, out, _) = cvphase(&["verify", "fast"]);
    for id in 1..=12 {
        assert!(out.lines().any(|l| l.split_whitespace().nth(1) == Some(&id.to_string())), "missing {id}");
    }
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("12/12 passed"));
}
