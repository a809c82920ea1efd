use middleconv_cli::{run_args, EXIT_OK};
use serde_json::Value;

fn schema(name: &str) -> jsonschema::Validator {
    let path = format!("{}/schemas/{name}.schema.json", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(path).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn check(name: &str, args: &[&str]) {
    let v = schema(name);
    let mut argv = vec!["--json"];
    argv.extend_from_slice(args);
    let out = run_args(argv, "");
    assert!(!out.stdout.is_empty(), "{args:?}: {}", out.stderr);
    for line in out.stdout.lines() {
        let doc: Value = serde_json::from_str(line).unwrap();
        let errors: Vec<String> = v.iter_errors(&doc).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{name} {args:?}: {errors:?}");
    }
}

#[test]
fn outputs_match_schemas() {
    check("analyze", &["analyze", "411,411,42,33", "22,22,1111", "22,22,22,22", "1"]);
    check("reduce", &["reduce", "211,211,1111", "22,22,1111"]);
    check("enumerate", &["enumerate-rigid", "-n", "6"]);
    check("enumerate", &["enumerate-basic", "-p", "-4"]);
    check("decompose", &["decompose", "1111,31,1111"]);
    check("connect", &["connect", "111,21,111", "211,211,31"]);
    check("diagram", &["diagram", "33,222,111111", "1"]);
    check("counts", &["counts", "-n", "6", "-p", "-2"]);
    check("mc-demo", &["mc-demo", "21,111,111", "--seed", "2"]);
}

#[test]
fn schemas_reject_wrong_shapes() {
    let v = schema("analyze");
    let out = run_args(["--json", "reduce", "11,11,11"], "");
    assert_eq!(out.code, EXIT_OK);
    let doc: Value = serde_json::from_str(out.stdout.trim()).unwrap();
    assert!(!v.is_valid(&doc));
}
