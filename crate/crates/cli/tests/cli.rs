//! End-to-end tests against the compiled binary: exit-code contract,
//! command output shapes, and JSON round-trips for every artifact.

use flasque_kit::catalog::{builtin_catalog, catalog_from_value, catalog_to_value};
use flasque_kit::json;
use serde_json::Value;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_flasque-kit"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

fn write_temp(name: &str, content: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join("flasque-kit-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

fn sign_lattice_json() -> String {
    serde_json::to_string(&serde_json::json!({
        "group": {
            "order": 2,
            "table": [[0, 1], [1, 0]],
            "generators": [{"name": "g0", "index": 1}],
        },
        "rank": 1,
        "action": {"g0": [[-1]]},
    }))
    .unwrap()
}

#[test]
fn tate_on_sign_lattice() {
    let path = write_temp("sign.json", &sign_lattice_json());
    let out = run(&[
        "tate",
        "--lattice",
        path.to_str().unwrap(),
        "--degree",
        "-1",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("Z/2"), "{}", text);

    // degree 0 on the trivial lattice
    let trivial = serde_json::to_string(&serde_json::json!({
        "group": {
            "order": 2,
            "table": [[0, 1], [1, 0]],
            "generators": [{"name": "g0", "index": 1}],
        },
        "rank": 1,
        "action": {"g0": [[1]]},
    }))
    .unwrap();
    let path = write_temp("trivial.json", &trivial);
    let out = run(&[
        "tate",
        "--lattice",
        path.to_str().unwrap(),
        "--degree",
        "0",
        "--subgroup",
        "full",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("Z/2"));
}

#[test]
fn tate_rejects_malformed_input_with_exit_2() {
    let path = write_temp("garbage.json", "{ not json ");
    let out = run(&[
        "tate",
        "--lattice",
        path.to_str().unwrap(),
        "--degree",
        "-1",
    ]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&[
        "tate",
        "--lattice",
        "/nonexistent/file.json",
        "--degree",
        "-1",
    ]);
    assert_eq!(out.status.code(), Some(2));

    // invalid subgroup
    let path = write_temp("sign2.json", &sign_lattice_json());
    let out = run(&[
        "tate",
        "--lattice",
        path.to_str().unwrap(),
        "--degree",
        "-1",
        "--subgroup",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn flasque_check_exit_codes() {
    let path = write_temp("sign3.json", &sign_lattice_json());
    let out = run(&["flasque-check", "--lattice", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("not flasque"));

    // a permutation lattice is flasque
    let perm = serde_json::to_string(&serde_json::json!({
        "group": {
            "order": 2,
            "table": [[0, 1], [1, 0]],
            "generators": [{"name": "g0", "index": 1}],
        },
        "rank": 2,
        "action": {"g0": [[0, 1], [1, 0]]},
    }))
    .unwrap();
    let path = write_temp("perm.json", &perm);
    let out = run(&["flasque-check", "--lattice", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));

    // the rank-5 family lattice for s0 = 2 is flasque
    let xs = flasque_core::family::build_xs(2).unwrap();
    let path = write_temp(
        "xs2.json",
        &serde_json::to_string(&json::lattice_to_value(&xs)).unwrap(),
    );
    let out = run(&["flasque-check", "--lattice", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));

    // rank-0 lattice passes
    let empty = serde_json::to_string(&serde_json::json!({
        "group": {
            "order": 2,
            "table": [[0, 1], [1, 0]],
            "generators": [{"name": "g0", "index": 1}],
        },
        "rank": 0,
        "action": {"g0": []},
    }))
    .unwrap();
    let path = write_temp("empty.json", &empty);
    let out = run(&["flasque-check", "--lattice", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn resolution_builtin_family() {
    for s0 in ["1", "2", "4"] {
        let out = run(&["resolution", "--s0", s0]);
        assert_eq!(out.status.code(), Some(0), "s0 = {}", s0);
    }
}

#[test]
fn resolution_from_files_and_corruption() {
    // export the s0 = 1 family through the library, write files, verify
    let (xq, restriction) = flasque_core::family::build_xq(1).unwrap();
    let (xt, inclusion) = flasque_core::family::build_xt(1).unwrap();
    let xs = restriction.target.clone();
    let paths = [
        ("xt.json", json::lattice_to_value(&xt)),
        ("xq.json", json::lattice_to_value(&xq)),
        ("xs.json", json::lattice_to_value(&xs)),
        ("inc.json", json::matrix_to_value(&inclusion.matrix)),
        ("res.json", json::matrix_to_value(&restriction.matrix)),
    ]
    .map(|(name, v)| write_temp(name, &serde_json::to_string(&v).unwrap()));
    let arg = |i: usize| paths[i].to_str().unwrap();
    let out = run(&[
        "resolution",
        "--xt",
        arg(0),
        "--xq",
        arg(1),
        "--xs",
        arg(2),
        "--inclusion",
        arg(3),
        "--restriction",
        arg(4),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));

    // corrupt the restriction map: double it -> exactness failure, exit 1
    let doubled = {
        let m = &restriction.matrix;
        let entries: Vec<num_bigint::BigInt> = (0..m.rows())
            .flat_map(|i| {
                (0..m.cols())
                    .map(move |j| m.at(i, j) * 2)
                    .collect::<Vec<_>>()
            })
            .collect();
        flasque_core::IntMatrix::new(m.rows(), m.cols(), entries)
    };
    let bad = write_temp(
        "res_bad.json",
        &serde_json::to_string(&json::matrix_to_value(&doubled)).unwrap(),
    );
    let out = run(&[
        "resolution",
        "--xt",
        arg(0),
        "--xq",
        arg(1),
        "--xs",
        arg(2),
        "--inclusion",
        arg(3),
        "--restriction",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1), "{}", stdout(&out));
    assert!(stdout(&out).contains("exact"));
}

#[test]
fn rclasses_examples() {
    let out = run(&["rclasses", "--base", "Q(sqrt 17)", "--s", "3"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("r = 2"), "{}", stdout(&out));

    let out = run(&["rclasses", "--base", "Q", "--s", "3"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("r = 1"));

    let out = run(&["rclasses", "--base", "Qp:3", "--s", "3", "--a", "3"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("r = 2"));

    let out = run(&["rclasses", "--base", "F_9", "--s", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rclasses_json_shape() {
    let out = run(&["rclasses", "--base", "Q(sqrt 17)", "--s", "3", "--json"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["r"], 2);
    assert_eq!(v["S"].as_array().unwrap().len(), 2);
    assert_eq!(v["representatives"].as_array().unwrap().len(), 2);
    // representative fractions serialize as "num/den"
    let rep = &v["representatives"][1];
    assert!(rep
        .as_object()
        .unwrap()
        .values()
        .all(|x| x.as_str().unwrap().contains('/')));
}

#[test]
fn connector_command() {
    let out = run(&["connector", "--a", "6", "--b", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("q(t)"));
    assert!(text.contains("p(t)"));

    let out = run(&["connector", "--a", "0", "--b", "3"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["connector", "--a", "-1", "--b", "1", "--json"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["q"].as_array().unwrap().len(), 1);
}

#[test]
fn catalog_round_trip_and_override() {
    let scenarios = builtin_catalog();
    let v = catalog_to_value(&scenarios);
    let back = catalog_from_value(&v).unwrap();
    assert_eq!(scenarios, back);

    // names are unique
    let names: std::collections::BTreeSet<_> = scenarios.iter().map(|s| &s.name).collect();
    assert_eq!(names.len(), scenarios.len());

    // --catalog FILE with a small list drives verify-paper
    let small = serde_json::json!([
        {"name": "only_connector", "kind": {"connector": {"a": "6/1", "b": "3/1"}}}
    ]);
    let path = write_temp(
        "catalog_small.json",
        &serde_json::to_string(&small).unwrap(),
    );
    let out = run(&["verify-paper", "--catalog", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("only_connector"));

    // a failing scenario flips the exit code and names the item
    let failing = serde_json::json!([
        {"name": "expected_to_fail", "kind": {"rclasses": {
            "tower": {"base": "Q", "s": 3, "variant": "constant"},
            "expected_r": 99,
        }}}
    ]);
    let path = write_temp(
        "catalog_fail.json",
        &serde_json::to_string(&failing).unwrap(),
    );
    let out = run(&["verify-paper", "--catalog", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL  expected_to_fail"));
}

#[test]
fn json_round_trips() {
    // lattice
    let xs = flasque_core::family::build_xs(2).unwrap();
    let v = json::lattice_to_value(&xs);
    let back = json::lattice_from_value(&v).unwrap();
    assert_eq!(back.generator_action(), xs.generator_action());
    assert_eq!(back.labels(), xs.labels());

    // matrix with an entry outside 53 bits serializes as a string
    let big = num_bigint::BigInt::from(1u64 << 60);
    let m = flasque_core::IntMatrix::new(1, 1, vec![big.clone()]);
    let v = json::matrix_to_value(&m);
    assert!(v[0][0].is_string());
    assert_eq!(json::matrix_from_value(&v, None).unwrap(), m);

    // tower
    for tower in [
        flasque_core::arith::FieldTowerSpec::new(
            flasque_core::arith::BaseField::Quadratic(17),
            3,
            flasque_core::arith::TowerVariant::Constant,
        )
        .unwrap(),
        flasque_core::arith::FieldTowerSpec::new(
            flasque_core::arith::BaseField::PAdic(3),
            4,
            flasque_core::arith::TowerVariant::Twisted { a: -6 },
        )
        .unwrap(),
    ] {
        let v = json::tower_to_value(&tower);
        assert_eq!(json::tower_from_value(&v).unwrap(), tower);
    }

    // invariant vectors
    let report = flasque_core::brauer::r_count(
        &flasque_core::arith::FieldTowerSpec::new(
            flasque_core::arith::BaseField::Quadratic(17),
            3,
            flasque_core::arith::TowerVariant::Constant,
        )
        .unwrap(),
    )
    .unwrap();
    for rep in &report.representatives {
        let v = json::invariant_vector_to_value(rep);
        assert_eq!(&json::invariant_vector_from_value(&v).unwrap(), rep);
    }
}

#[test]
fn verify_paper_quiet_and_threads() {
    // single-thread run through the env knob, quiet mode prints verdicts only
    let out = bin()
        .args(["verify-paper", "--quiet"])
        .env("FLASQUE_KIT_THREADS", "1")
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(
        text.lines().filter(|l| l.starts_with("PASS")).count() >= 8,
        "{}",
        text
    );
}
