use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bimatrix::json::{parse_equilibrium, parse_tree, ReportJson};
use bimatrix::text::{parse_game, write_game};
use bimatrix_core::compose::product;
use bimatrix_core::{BimatrixGame, Matrix};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bimatrix"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("commands").join(name);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

const PENNIES: &str = "bimatrix 2 2\n1 -1\n-1 1\n-1 1\n1 -1\n";

#[test]
fn verify_accepts_uniform_pennies_and_rejects_a_pure_profile() {
    let dir = scratch("verify");
    let game = dir.join("mp.txt");
    std::fs::write(&game, PENNIES).unwrap();
    let good = dir.join("good.json");
    std::fs::write(&good, r#"{"x":["1/2","1/2"],"y":["1/2","1/2"],"p1_payoff":"0","p2_payoff":"0"}"#).unwrap();
    assert_eq!(code(&run(&["verify", path(&game), path(&good)])), 0);

    let bad = dir.join("bad.json");
    std::fs::write(&bad, r#"{"x":["1","0"],"y":["1/2","1/2"],"p1_payoff":"0","p2_payoff":"0"}"#).unwrap();
    let out = run(&["verify", path(&game), path(&bad)]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not an equilibrium"));

    let short = dir.join("short.json");
    std::fs::write(&short, r#"{"x":["1"],"y":["1/2","1/2"],"p1_payoff":"0","p2_payoff":"0"}"#).unwrap();
    assert_eq!(code(&run(&["verify", path(&game), path(&short)])), 3);

    let garbled = dir.join("garbled.json");
    std::fs::write(&garbled, r#"{"x":[0.5,0.5]}"#).unwrap();
    assert_eq!(code(&run(&["verify", path(&game), path(&garbled)])), 2);
}

#[test]
fn solving_the_worked_product_reports_lambda_16() {
    let dir = scratch("solve");
    let a = BimatrixGame::zero_sum(Matrix::from_integers(&[&[1, 2, 3, 4], &[0, 1, 0, 1], &[2, 2, 2, 2], &[4, 1, 2, 3]]).unwrap());
    let b = BimatrixGame::zero_sum(Matrix::from_integers(&[&[0, 0, 0], &[1, 0, 1], &[1, 2, 3]]).unwrap());
    let game = dir.join("product.txt");
    std::fs::write(&game, write_game(&product(&a, &b))).unwrap();
    let report = dir.join("report.json");

    let out = run(&["solve", path(&game), "--no-eliminate", "--report", path(&report)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let eq = dir.join("eq.json");
    std::fs::write(&eq, &out.stdout).unwrap();
    parse_equilibrium(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(code(&run(&["verify", path(&game), path(&eq)])), 0);

    let report: ReportJson = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(report.lambda, 16);
    assert_eq!(report.size, 144);
    assert_eq!(report.leaf_sizes, vec![9, 16]);

    // with elimination the dominated strategies of the 4x4 factor go first
    let out = run(&["solve", path(&game), "--report", path(&dir.join("reduced.json"))]);
    assert_eq!(code(&out), 0);
    std::fs::write(&eq, &out.stdout).unwrap();
    assert_eq!(code(&run(&["verify", path(&game), path(&eq)])), 0);
    let reduced: ReportJson = serde_json::from_str(&std::fs::read_to_string(dir.join("reduced.json")).unwrap()).unwrap();
    assert!(reduced.lambda < 16 && reduced.node_counts.elim >= 1, "{reduced:?}");

    // support enumeration on the whole game also yields a valid equilibrium
    let direct = run(&["solve", path(&game), "--no-decompose"]);
    assert_eq!(code(&direct), 0);
    std::fs::write(&eq, &direct.stdout).unwrap();
    assert_eq!(code(&run(&["verify", path(&game), path(&eq)])), 0);
}

#[test]
fn outputs_do_not_depend_on_threads() {
    let dir = scratch("threads");
    let game = dir.join("g.txt");
    assert_eq!(code(&run(&["generate", "--seed", "11", "--min-strategies", "30", "--max-strategies", "40", "-o", path(&game)])), 0);
    for command in ["solve", "decompose"] {
        let one = run(&[command, path(&game)]);
        let four = run(&[command, path(&game), "--threads", "4"]);
        assert_eq!(code(&one), 0);
        assert_eq!(one.stdout, four.stdout, "{command}");
    }
}

#[test]
fn decompose_prints_a_tree_of_the_game() {
    let dir = scratch("decompose");
    let game = dir.join("g.txt");
    assert_eq!(code(&run(&["generate", "--seed", "5", "--min-strategies", "20", "--max-strategies", "25", "-o", path(&game)])), 0);
    let parsed = parse_game(&std::fs::read_to_string(&game).unwrap()).unwrap();
    for flags in [&[][..], &["--no-eliminate"][..]] {
        let mut args = vec!["decompose", path(&game)];
        args.extend_from_slice(flags);
        let out = run(&args);
        assert_eq!(code(&out), 0);
        let tree = parse_tree(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
        assert_eq!(tree.recompose().unwrap(), parsed);
    }
}

#[test]
fn generate_is_deterministic_and_writes_the_planned_tree() {
    let dir = scratch("generate");
    let (g1, g2, tree) = (dir.join("1.txt"), dir.join("2.txt"), dir.join("tree.json"));
    let args = |out: &Path| -> Vec<String> {
        ["generate", "--seed", "42", "--min-strategies", "15", "--max-strategies", "18", "-o", path(out)]
            .map(String::from)
            .to_vec()
    };
    let mut first = args(&g1);
    first.extend(["--tree".into(), path(&tree).into()]);
    assert_eq!(code(&bin().args(&first).output().unwrap()), 0);
    assert_eq!(code(&bin().args(args(&g2)).output().unwrap()), 0);
    let text = std::fs::read_to_string(&g1).unwrap();
    assert_eq!(text, std::fs::read_to_string(&g2).unwrap());

    let game = parse_game(&text).unwrap();
    assert!((15..=18).contains(&game.rows()) && (15..=18).contains(&game.cols()));
    let tree = parse_tree(&std::fs::read_to_string(&tree).unwrap()).unwrap();
    assert_eq!(tree.recompose().unwrap(), game);
    assert!(tree.lambda() <= 6);
}

#[test]
fn bench_on_the_default_corpus_keeps_lambda_at_most_6() {
    let dir = scratch("bench");
    let csv = dir.join("bench.csv");
    let out = run(&["bench", "--count", "100", "--seed", "1", "-o", path(&csv)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().unwrap().clone();
    let lambda = headers.iter().position(|h| h == "lambda").unwrap();
    let verified = headers.iter().position(|h| h == "verified").unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 100);
    for row in &rows {
        assert!(row[lambda].parse::<usize>().unwrap() <= 6);
        assert_eq!(&row[verified], "true");
    }
    assert_eq!(&rows[0][0], "1");
    assert_eq!(&rows[99][0], "100");
}

#[test]
fn bench_with_baseline_reports_a_median_speedup() {
    let out = run(&[
        "bench",
        "--count",
        "3",
        "--seed",
        "7",
        "--min-strategies",
        "6",
        "--max-strategies",
        "8",
        "--baseline",
        "--baseline-timeout",
        "2",
    ]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].ends_with("baseline_ms,baseline_status,speedup"));
    assert!(lines[1..4].iter().all(|l| l.contains(",ok,") || l.contains(",timeout,")));
    assert!(lines[4].starts_with("# median_speedup="));
}

#[test]
fn exit_codes() {
    let dir = scratch("exit");
    let broken = dir.join("broken.txt");
    std::fs::write(&broken, "bimatrix 2 2\n1 2\n3\n4 5\n6 7\n8 9\n").unwrap();
    let out = run(&["solve", path(&broken)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3, column 2: row 2 of A has 1 entry, expected 2"));

    assert_eq!(code(&run(&["solve", path(&dir.join("missing.txt"))])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&[])), 1);
    assert_eq!(code(&run(&["solve"])), 1);
    assert_eq!(code(&run(&["solve", path(&broken), "--threads", "0"])), 1);
    assert_eq!(code(&run(&["generate", "--seed", "1", "--p-sum", "0.9", "-o", path(&dir.join("g.txt"))])), 1);
    assert_eq!(code(&run(&["generate", "--seed", "1", "--min-strategies", "9", "--max-strategies", "3", "-o", path(&dir.join("g.txt"))])), 1);

    let help = run(&["--help"]);
    assert_eq!(code(&help), 0);
    assert!(String::from_utf8_lossy(&help.stdout).contains("verify"));
    assert_eq!(code(&run(&["--version"])), 0);
}
