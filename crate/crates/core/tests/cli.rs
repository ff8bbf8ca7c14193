use std::path::Path;
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_cpt-rl");

const SMALL: &str = r#"
name = "small"
seed = 3

[environment]
width = 4
height = 3
start = [0, 0]
goal = [3, 0]
obstacles = [{ cells = [[1, 0], [2, 0]], cost = 6.0 }]

[agent]
kind = "sarsa"
gamma = 0.9
alpha_mode = { fixed = 0.2 }
N_max = 20
T_max = 60

[evaluation]
n_paths = 12
max_steps = 100
"#;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(BIN).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("small.cfg");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn first_line(path: &Path) -> String {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .next()
        .unwrap()
        .to_string()
}

#[test]
fn train_then_evaluate_from_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let train_dir = dir.path().join("train");
    let eval_dir = dir.path().join("eval");
    let (code, stdout, stderr) = run(&["train", "--config", &cfg, "--out", train_dir.to_str().unwrap()]);
    assert_eq!(code, 0, "{stderr}");
    assert!(stdout.contains("q.csv"));
    for f in ["q.csv", "policy.csv", "curve.csv"] {
        let head = first_line(&train_dir.join(f));
        assert!(
            head.starts_with("# config_digest=") && head.ends_with(",seed=3"),
            "{f}: {head}"
        );
    }

    let args = [
        "evaluate",
        "--config",
        &cfg,
        "--tables",
        train_dir.to_str().unwrap(),
        "--out",
        eval_dir.to_str().unwrap(),
    ];
    let (code, stdout, stderr) = run(&args);
    assert_eq!(code, 0, "{stderr}");
    assert!(stdout.starts_with("12 paths"), "{stdout}");
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(eval_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["n_paths"], 12);
    assert_eq!(summary["seed"], 3);

    // Evaluating straight from the config trains the same agent in-process.
    let direct = dir.path().join("direct");
    let (code, _, stderr) = run(&["evaluate", "--config", &cfg, "--out", direct.to_str().unwrap()]);
    assert_eq!(code, 0, "{stderr}");
    assert_eq!(
        std::fs::read(eval_dir.join("paths.csv")).unwrap(),
        std::fs::read(direct.join("paths.csv")).unwrap()
    );
}

#[test]
fn seed_flag_changes_stamp_but_not_digest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(run(&["train", "--config", &cfg, "--out", a.to_str().unwrap()]).0, 0);
    assert_eq!(
        run(&["train", "--config", &cfg, "--seed", "8", "--out", b.to_str().unwrap()]).0,
        0
    );
    let (ha, hb) = (first_line(&a.join("q.csv")), first_line(&b.join("q.csv")));
    assert!(hb.ends_with(",seed=8"));
    assert_eq!(ha.split(',').next(), hb.split(',').next());
}

#[test]
fn dp_solve_writes_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("dp");
    let (code, stdout, stderr) = run(&["dp-solve", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{stderr}");
    assert!(stdout.starts_with("converged in"), "{stdout}");
    let v = std::fs::read_to_string(out.join("v.csv")).unwrap();
    assert_eq!(v.lines().count(), 2 + 12);
    // The goal row of the value table is zero.
    assert!(v.lines().any(|l| l == "3,0,0"), "{v}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("dp.json")).unwrap()).unwrap();
    assert!(report["iterations"].as_u64().unwrap() > 0);
}

#[test]
fn reproduce_accepts_custom_configs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("rep");
    let (code, stdout, stderr) = run(&["reproduce", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{stderr}");
    assert_eq!(stdout.lines().filter(|l| l.starts_with("small")).count(), 3);
    let table = std::fs::read_to_string(out.join("comparison.csv")).unwrap();
    let mut lines = table.lines();
    assert!(lines.next().unwrap().starts_with("# "));
    assert_eq!(
        lines.next().unwrap(),
        "environment,agent,seed,config_digest,n_paths,visits_obs_1,mean_cost,goal_rate"
    );
    assert_eq!(lines.count(), 3);
    for agent in ["sarsa", "actor_critic", "q_learning"] {
        assert!(out.join("small").join(agent).join("paths.csv").exists());
    }
}

#[test]
fn invalid_input_exit_codes() {
    let dir = tempfile::tempdir().unwrap();

    let cfg = write_config(dir.path(), &SMALL.replace("gamma = 0.9", "gamma = 1.2"));
    let (code, _, stderr) = run(&["train", "--config", &cfg]);
    assert_eq!(code, 1);
    assert!(stderr.contains("gamma"), "{stderr}");

    let cfg = write_config(dir.path(), &SMALL.replace("seed = 3", "seed = 3\ncolour = 1"));
    let (code, _, stderr) = run(&["train", "--config", &cfg]);
    assert_eq!(code, 1);
    assert!(stderr.contains("colour"), "{stderr}");

    let cfg = write_config(dir.path(), SMALL);
    let bogus = dir.path().join("bogus");
    std::fs::create_dir(&bogus).unwrap();
    std::fs::write(bogus.join("q.csv"), "state_x,state_y,action,value\n0,0,left,1\n").unwrap();
    let (code, _, stderr) = run(&["evaluate", "--config", &cfg, "--tables", bogus.to_str().unwrap()]);
    assert_eq!(code, 1, "{stderr}");

    assert_eq!(run(&["train"]).0, 1);
    assert_eq!(run(&["launch"]).0, 1);
    assert_eq!(run(&["--version"]).0, 0);
}

#[test]
fn evaluate_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(run(&["evaluate", "--config", &cfg, "--out", a.to_str().unwrap()]).0, 0);
    assert_eq!(run(&["evaluate", "--config", &cfg, "--out", b.to_str().unwrap()]).0, 0);
    for f in ["paths.csv", "summary.json"] {
        assert_eq!(
            std::fs::read(a.join(f)).unwrap(),
            std::fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn dp_solve_on_chain_matches_linear_system() {
    use nalgebra::{Matrix2, Vector2};

    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"
[environment]
width = 3
height = 1
start = [0, 0]
goal = [2, 0]

[risk]
kind = "expected"

[dp]
policy = "uniform"
tolerance = 1e-13
"#,
    );
    let out = dir.path().join("dp");
    let (code, _, stderr) = run(&["dp-solve", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{stderr}");

    // Kernel written out by hand for slip 0.1, actions left/right/up/down.
    // Off-grid moves stay put w.p. 0.9 and share 0.1 over the neighbors; a
    // move with no alternative neighbor keeps its slip mass in place.
    let rows: [[[f64; 3]; 4]; 2] = [
        [[0.9, 0.1, 0.0], [0.1, 0.9, 0.0], [0.9, 0.1, 0.0], [0.9, 0.1, 0.0]],
        [[0.9, 0.0, 0.1], [0.1, 0.0, 0.9], [0.05, 0.9, 0.05], [0.05, 0.9, 0.05]],
    ];
    let cost = [1.0, 1.0, 0.0];
    let gamma = 0.9;
    let mut a = Matrix2::identity();
    let mut r = Vector2::zeros();
    for (s, actions) in rows.iter().enumerate() {
        for row in actions {
            for next in 0..3 {
                r[s] += 0.25 * row[next] * cost[next];
                if next < 2 {
                    a[(s, next)] -= gamma * 0.25 * row[next];
                }
            }
        }
    }
    let v = a.lu().solve(&r).unwrap();
    let value = |next: usize| if next < 2 { v[next] } else { 0.0 };

    let grid = cpt_rl::env::GridSpec::open(3, 1);
    let q = cpt_rl::cli::read_q_table(&out.join("q.csv"), &grid).unwrap();
    for (s, actions) in rows.iter().enumerate() {
        for (act, row) in actions.iter().enumerate() {
            let expected: f64 = (0..3).map(|n| row[n] * (cost[n] + gamma * value(n))).sum();
            assert!(
                (q.get(s, act) - expected).abs() < 1e-9,
                "Q({s},{act}) = {} vs {expected}",
                q.get(s, act)
            );
        }
    }
    assert!(q.row(2).iter().all(|&x| x == 0.0));
}
