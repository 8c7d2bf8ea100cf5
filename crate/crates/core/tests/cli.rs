use std::fs;

use chancap::capacity::{qec_closed_forms, CapacityResult};
use chancap::channels::{ChannelSpec, KrausChannel};
use chancap::cli::main_with_args;

fn chancap(args: &[&str]) -> i32 {
    let mut full = vec!["chancap"];
    full.extend_from_slice(args);
    main_with_args(full)
}

#[test]
fn capcurve_closed_forms_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("curve.csv");
    let code = chancap(&[
        "capcurve",
        "--channel",
        "erasure:d=3,eps=0.1",
        "--grid",
        "0:3:1",
        "--skip-optimize",
        "--seed",
        "0",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "y,chi_L_I_closed,chi_L_I_optimized,C1,C_E");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4);
    for row in rows {
        let y: f64 = row[0].parse().unwrap();
        let expect = qec_closed_forms(0.1, 3, y).unwrap();
        assert!((row[1].parse::<f64>().unwrap() - expect.chi_l_i).abs() < 1e-11);
        assert_eq!(row[2], "nan");
        assert!((row[4].parse::<f64>().unwrap() - expect.c_e).abs() < 1e-11);
    }
    assert!(!text.contains('\r'));
}

#[test]
fn eve_bound_json_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("eve.json");
    let args = [
        "eve-bound",
        "--channel",
        "depolarizing:lam=0.3",
        "--encoding",
        "weyl",
        "--y",
        "1",
        "--budget",
        "300",
        "--seed",
        "11",
        "--format",
        "json",
        "-o",
        out.to_str().unwrap(),
    ];
    assert_eq!(chancap(&args), 0);
    let result: CapacityResult = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(result.seed, 11);
    assert_eq!(result.argmax_params.len(), 4);
    assert!(result.samples_evaluated > 0 && result.samples_evaluated <= 300);
    assert!(result.value.is_finite());
    let first = fs::read(&out).unwrap();
    assert_eq!(chancap(&args), 0);
    assert_eq!(first, fs::read(&out).unwrap());
}

#[test]
fn unreachable_constraint_exits_infeasible() {
    // With a pure W marginal no state carries any S:W correlation.
    let code = chancap(&[
        "eve-bound",
        "--channel",
        "erasure:eps=0.25",
        "--y",
        "2",
        "--tol",
        "0.01",
        "--rho-w",
        "1,0",
        "--budget",
        "100",
        "--seed",
        "1",
    ]);
    assert_eq!(code, 3);
}

#[test]
fn info_reports_covariance() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("amp.json");
    let g = 0.3f64;
    let amp = KrausChannel::new(
        2,
        2,
        vec![
            chancap::densemath::ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, (1.0 - g).sqrt()]).unwrap(),
            chancap::densemath::ComplexMatrix::from_real(2, 2, &[0.0, g.sqrt(), 0.0, 0.0]).unwrap(),
        ],
    )
    .unwrap();
    fs::write(&path, serde_json::to_string(&ChannelSpec::from_channel(&amp)).unwrap()).unwrap();

    let out = dir.path().join("info.csv");
    let spec = format!("@{}", path.display());
    assert_eq!(chancap(&["info", "--channel", &spec, "-o", out.to_str().unwrap()]), 0);
    let text = fs::read_to_string(&out).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(&row[..4], ["2", "2", "2", "false"]);

    assert_eq!(chancap(&["info", "--channel", "depolarizing:lam=0.4", "-o", out.to_str().unwrap()]), 0);
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("2,2,4,true,"));
}

#[test]
fn verify_writes_one_row_per_check() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("verify.csv");
    let code = chancap(&[
        "verify", "--check", "dpi", "--check", "lemma1", "--n", "20", "--seed", "5", "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "name,instances,min_slack,failures,seed");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("dpi,20,"));
    assert!(lines[2].starts_with("lemma1["));
    assert!(lines.iter().skip(1).all(|l| l.ends_with(",0,5")));
}

#[test]
fn bad_input_exits_two() {
    assert_eq!(
        chancap(&["capcurve", "--channel", "erasure:eps=1.5", "--grid", "0:1:0.5", "--seed", "1"]),
        2
    );
    assert_eq!(chancap(&["scan", "--channel", "warp:x=1", "--n", "10", "--seed", "1"]), 2);
    assert_eq!(chancap(&["scan", "--channel", "depolarizing:lam=0.2", "--n", "0", "--seed", "1"]), 2);
    assert_eq!(chancap(&["capcurve", "--channel", "erasure:eps=0.2", "--grid", "0:1:0.5"]), 2);
    assert_eq!(chancap(&["no-such-command"]), 2);
    assert_eq!(chancap(&["info", "--channel", "{\"din\": 2"]), 2);
}
