use bfcalc::class::linear_order;
use bfcalc::cli::run;
use bfcalc::structure::Structure;
use std::fs;
use std::path::Path;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["bfcalc".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write_lo(dir: &Path, n: usize) -> String {
    let p = dir.join(format!("lo{n}.struct"));
    fs::write(&p, linear_order(n).unwrap().serialize()).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn documented_examples() {
    let dir = tempfile::tempdir().unwrap();
    let (lo1, lo2) = (write_lo(dir.path(), 1), write_lo(dir.path(), 2));
    assert_eq!(call(&["compare", "--level", "1", &lo1, &lo2]), (0, "geq\n".into(), String::new()));
    assert_eq!(call(&["count", "--class", "linord", "--max-size", "3", "--level", "1", "--arity", "0"]).1, "3\n");
    let (code, out, _) = call(&["scott", &lo2]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("SR 2"));
}

#[test]
fn output_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let lo3 = write_lo(dir.path(), 3);
    let args = ["type", "--level", "1", "--class", "linord", "--max-size", "3", &lo3, "--tuple", "1"];
    assert_eq!(call(&args), call(&args));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let lo2 = write_lo(dir.path(), 2);
    let (code, _, err) = call(&["compare", "--level", "1", &lo2, "missing.struct"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error: "));
    assert_eq!(call(&["compare", &lo2]).0, 2);
    assert_eq!(call(&["frobnicate"]).0, 2);
    assert_eq!(call(&["--help"]).0, 0);
    let (lo4, lo5) = (write_lo(dir.path(), 4), write_lo(dir.path(), 5));
    assert_eq!(call(&["--budget", "2", "compare", "--level", "4", &lo4, &lo5]).0, 3);
    assert_eq!(call(&["compare", "--level", "1", &lo2, &lo2, "--tuple-a", "0,9"]).0, 1);
}

#[test]
fn commands_compose() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let (bfs, theory, model, chain) = (p("lo.bfs"), p("t.txt"), p("m.struct"), p("chain.txt"));

    let (code, _, err) =
        call(&["structure", "--class", "linord", "--max-size", "3", "--level", "2", "--arity-bound", "1", "-o", &bfs]);
    assert_eq!(code, 0, "{err}");
    let (code, out, _) = call(&["verify", &bfs, "--class", "linord", "--max-size", "3"]);
    assert_eq!(code, 0, "{out}");

    assert_eq!(call(&["axioms", &bfs, "--sigma", "1", "1", "0", "-o", &theory]).0, 0);
    assert!(fs::read_to_string(&theory).unwrap().contains("T-sigma-phi"));

    let (code, out, err) =
        call(&["build", "--bfs", &bfs, "--sigma", "1", "1", "0", "--max-stages", "20", "--max-domain", "6", "-o", &model]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("comparison equiv"), "{out}");
    Structure::parse(&fs::read_to_string(&model).unwrap()).unwrap();

    let axioms = dir.path().join("lo.txt");
    fs::write(
        &axioms,
        "(forall (x) (not (atom < x x)))\n\
         (forall (x y z) (or (not (atom < x y)) (not (atom < y z)) (atom < x z)))\n\
         (forall (x y) (or (atom < x y) (= x y) (atom < y x)))\n\
         (forall (x) (exists (y) (atom < x y)))\n",
    )
    .unwrap();
    let (code, out, err) = call(&[
        "henkin", "--theory", axioms.to_str().unwrap(), "--class", "linord", "--max-stages", "3", "-o", &model, "--chain", &chain,
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.starts_with("stages 3\n"), "{out}");
    assert_eq!(Structure::parse(&fs::read_to_string(&model).unwrap()).unwrap().size(), 4);
    assert!(fs::read_to_string(&chain).unwrap().starts_with("chain v1\n"));
}
