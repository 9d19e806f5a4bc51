use std::process::{Command, Output};

fn stoploss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stoploss")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn tvar_on_independence_fixture() {
    let o = stoploss(&["tvar", "--fixture", "independence", "--p", "0.99"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("p,var,tvar"));
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|c| c.parse().unwrap()).collect();
    assert!((row[2] - 46.85).abs() <= 0.02, "{row:?}");
    assert_eq!(lines.next(), None);
}

#[test]
fn digits_flag_and_value_lists() {
    let o = stoploss(&["cdf", "--fixture", "independence", "--s", "0,10,20", "--digits", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0], "s,cdf");
    assert!(rows[1].starts_with("0.000,0."));
    assert!(rows.iter().skip(1).all(|r| r.split(',').all(|c| c.split('.').nth(1).unwrap().len() == 3)));
}

#[test]
fn inadmissible_model_needs_force() {
    let o = stoploss(&["joint-tail", "--fixture", "fgm", "--u1", "25", "--u2", "20"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--force"));
    let o = stoploss(&["joint-tail", "--fixture", "fgm", "--u1", "25", "--u2", "20", "--force", "--digits", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("warning"));
    assert_eq!(stdout(&o), "u1,u2,joint_tail\n25.0000,20.0000,0.1573\n");
}

#[test]
fn validate_reports_the_worst_corner() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pair.json");
    std::fs::write(
        &path,
        r#"{"schema": 1,
            "risks": [{"beta": 0.12, "weights": [0.4, 0.6]}, {"beta": 0.14, "weights": [0.3, 0.7]}],
            "kernel": {"family": "fgm"},
            "alphas": [{"indices": [1, 2], "value": 2.0}],
            "portfolios": [[1], [2]],
            "deductibles": {"d1": 10, "d2": 10}}"#,
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let o = stoploss(&["validate", "--model", p]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(
        stdout(&o),
        "status,min_bracket,max_bracket,worst_corner\nviolation,-1.00000,3.00000,1.00000;-1.00000\n"
    );
    let o = stoploss(&["tvar", "--model", p, "--p", "0.9"]);
    assert_eq!(o.status.code(), Some(2));

    let o = stoploss(&["validate", "--fixture", "independence"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().nth(1).unwrap().starts_with("ok,1.00000,1.00000,"));
}

#[test]
fn malformed_file_reports_field_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let text = stoploss_core::model_file::fixtures::INDEPENDENCE.replace("\"portfolios\"", "\"portfolio\"");
    std::fs::write(&path, text).unwrap();
    let o = stoploss(&["validate", "--model", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown field `portfolio`"), "{}", stderr(&o));
    let o = stoploss(&["validate", "--model", "/nonexistent/model.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_64() {
    for args in [
        &["frobnicate"][..],
        &["tvar", "--fixture", "independence"],
        &["tvar", "--fixture", "independence", "--p", "0.9", "--bogus"],
        &["tvar", "--fixture", "nope", "--p", "0.9"],
        &["tvar", "--fixture", "independence", "--p", "1.5"],
        &["unpaid", "--fixture", "independence", "--k1", "1,2", "--k2", "1"],
        &["reproduce-tables", "--table", "8"],
        &["mc", "--fixture", "independence", "--quantity", "tvar(0.9", "--n", "10"],
    ] {
        let o = stoploss(args);
        assert_eq!(o.status.code(), Some(64), "{args:?}: {}", stderr(&o));
        assert!(!stderr(&o).is_empty());
    }
    let o = stoploss(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("reproduce-tables"));
}

#[test]
fn reproduce_tables_is_stable() {
    let a = stoploss(&["reproduce-tables"]);
    let b = stoploss(&["reproduce-tables"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert_eq!(text.split("\n\n").count(), 5);
    let t3 = stoploss(&["reproduce-tables", "--table", "3"]);
    let t3 = stdout(&t3);
    assert!(text.starts_with(&t3));
    assert!(t3.lines().any(|l| l == "3,25,20,0.1494,0.1589,0.1573"), "{t3}");
    let wide = stdout(&stoploss(&["reproduce-tables", "--table", "4", "--digits", "8"]));
    assert!(wide.lines().nth(1).unwrap().split(',').nth(2).unwrap().split('.').nth(1).unwrap().len() == 8);
}

#[test]
fn other_commands_have_headers() {
    let cases: [(&[&str], &str); 6] = [
        (&["var", "--p", "0.9"], "p,var"),
        (&["allocate", "--p", "0.9"], "p,tvar,k1,k2"),
        (&["default", "--capital", "30.1"], "capital,default_prob,default_value"),
        (&["unpaid", "--k1", "19.69", "--k2", "10.41"], "k1,k2,unpaid_1,unpaid_2"),
        (&["diversify", "--p", "0.95"], "p,tvar_r,tvar_t1,tvar_t2,benefit_pct"),
        (&["joint-tail", "--u1", "0", "--u2", "0"], "u1,u2,joint_tail"),
    ];
    for (args, header) in cases {
        let mut full = vec![args[0], "--fixture", "independence"];
        full.extend_from_slice(&args[1..]);
        let o = stoploss(&full);
        assert_eq!(o.status.code(), Some(0), "{full:?}: {}", stderr(&o));
        let text = stdout(&o);
        assert_eq!(text.lines().next(), Some(header));
        assert_eq!(text.lines().count(), 2);
    }
    let o = stoploss(&["diversify", "--fixture", "independence", "--p", "0.95", "--digits", "2"]);
    assert!(stdout(&o).ends_with(",30.19\n"), "{}", stdout(&o));
}

#[test]
fn monte_carlo_command() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("draws.csv");
    let o = stoploss(&[
        "mc",
        "--fixture",
        "independence",
        "--n",
        "2e5",
        "--seed",
        "7",
        "--quantity",
        "joint-tail(25,20)",
        "--quantity",
        "alloc(0.95,2)",
        "--dump",
        dump.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "quantity,n,seed,scheme,estimate,stderr,closed_form,z");
    assert!(lines[1].starts_with("joint-tail(25;20),200000,7,rejection,"));
    for l in &lines[1..] {
        let z: f64 = l.rsplit(',').next().unwrap().parse().unwrap();
        assert!(z.abs() < 4.0, "{l}");
    }
    let draws = std::fs::read_to_string(&dump).unwrap();
    assert!(draws.starts_with("x1,x2,x3,x4\n"));
    assert_eq!(draws.lines().count(), 200_001);

    let o = stoploss(&["mc", "--fixture", "laplace", "--force", "--n", "1e4", "--quantity", "mean(1)"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains(",weighted,"));
    let o = stoploss(&["mc", "--fixture", "laplace", "--force", "--n", "1e4", "--quantity", "mean(1)", "--scheme", "rejection"]);
    assert_eq!(o.status.code(), Some(2));
}
