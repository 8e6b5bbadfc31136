use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ringsynth"))
}

fn specs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../specs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn spec(name: &str) -> String {
    specs().join(name).display().to_string()
}

#[test]
fn synth_arbiter_writes_verified_model() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("arb.json");
    let dot = dir.path().join("arb.dot");
    let o = run(&[
        "synth",
        &spec("arbiter.spec"),
        "--bound",
        "2..6",
        "--solver",
        "builtin",
        "--opt",
        "hardcode-token,hub",
        "--out-json",
        json.to_str().unwrap(),
        "--out-dot",
        dot.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let log = String::from_utf8_lossy(&o.stderr);
    assert!(log.contains("0 not passed"), "{log}");
    assert!(std::fs::read_to_string(&dot).unwrap().starts_with("digraph"));

    let v = run(&["verify", json.to_str().unwrap(), &spec("arbiter.spec")]);
    assert_eq!(code(&v), 0);
    let report = String::from_utf8_lossy(&v.stdout);
    assert!(report.contains("n=2") && report.contains("n=4"), "{report}");
}

#[test]
fn synth_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for k in 0..2 {
        let json = dir.path().join(format!("m{k}.json"));
        let o = run(&[
            "synth",
            &spec("arbiter.spec"),
            "--bound",
            "2..4",
            "--opt",
            "gr1-direct",
            "--out-json",
            json.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0);
        outputs.push(std::fs::read(&json).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn unrealizable_exits_one() {
    let o = run(&["synth", &spec("unreal.spec"), "--bound", "2..3"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("not found up to 3"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&run(&["synth", &spec("arbiter.spec"), "--bound", "4..2"])), 2);
    assert_eq!(code(&run(&["synth", &spec("arbiter.spec"), "--solver", "external:"])), 2);
    assert_eq!(code(&run(&["synth", "/nonexistent.spec"])), 2);
    assert_eq!(code(&run(&["synth"])), 2);
    let o = run(&[
        "synth",
        &spec("arbiter.spec"),
        "--solver",
        "external:/nonexistent/solver -in",
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn translate_fig1_gives_the_process_spec() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("i.spec");
    let o = run(&["translate", &spec("amba_fig1.spec"), "-o", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let got = ringsynth::ltl::parse_spec(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let want =
        ringsynth::ltl::parse_spec(&std::fs::read_to_string(specs().join("amba_i.spec")).unwrap())
            .unwrap();
    assert_eq!(got.assumptions, want.assumptions);
    assert_eq!(got.fairness, want.fairness);
    assert_eq!(got.guarantees, want.guarantees);

    let z = run(&["translate", out.to_str().unwrap(), "--step", "specialize-zero"]);
    assert_eq!(code(&z), 0);
    let zero = ringsynth::ltl::parse_spec(&String::from_utf8_lossy(&z.stdout)).unwrap();
    assert_eq!(zero.role, ringsynth::ltl::Role::ZeroProcess);
    let twice = run(&["translate", &spec("amba_0.spec"), "--step", "specialize-zero"]);
    assert_eq!(code(&twice), 2);
}

#[test]
fn mc_and_compose() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("arb.json");
    let o = run(&[
        "synth",
        &spec("arbiter.spec"),
        "--bound",
        "2..4",
        "--out-json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let m = json.to_str().unwrap();
    assert_eq!(code(&run(&["mc", m, "-n", "3", "-f", "G(g_i -> tok_i)"])), 0);
    assert_eq!(code(&run(&["mc", m, "-n", "3", "-f", "G !g_i"])), 1);
    assert_eq!(
        code(&run(&["mc", m, "-n", "4", "-f", "G !(g_i & g_j)", "-i", "0", "-j", "2"])),
        0
    );
    let verdict = dir.path().join("v.json");
    run(&["mc", m, "-f", "G F tok_i", "--timing", "interleaving", "--out-json", verdict.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&verdict).unwrap()).unwrap();
    assert_eq!(v["status"], "Pass");

    let dot = dir.path().join("ring.dot");
    let rj = dir.path().join("ring.json");
    let c = run(&[
        "compose",
        m,
        "-n",
        "3",
        "--out-dot",
        dot.to_str().unwrap(),
        "--out-json",
        rj.to_str().unwrap(),
    ]);
    assert_eq!(code(&c), 0);
    let ring: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&rj).unwrap()).unwrap();
    assert_eq!(ring["n"], 3);
    assert!(!ring["states"].as_array().unwrap().is_empty());
}

#[test]
fn emit_smt_script() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("arb.smt2");
    let o = run(&["emit-smt", &spec("arbiter.spec"), "--bound", "3", "-o", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("(check-sat)"));
    assert!(text.contains("(declare-fun delta (Int Int) Int)"));

    let prefix = dir.path().join("s.smt2");
    let o = run(&[
        "synth",
        &spec("arbiter.spec"),
        "--bound",
        "2..3",
        "--emit-smt",
        prefix.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(dir.path().join("s.2.smt2").exists());
    assert!(dir.path().join("s.3.smt2").exists());
}

#[test]
fn staged_synthesis_on_the_arbiter() {
    let dir = tempfile::tempdir().unwrap();
    let stages = dir.path().join("arb.stages");
    std::fs::write(
        &stages,
        format!(
            "[STAGE busy]\nspec: {0}\nassume: G r_i\n[STAGE full]\nspec: {0}\n",
            spec("arbiter.spec")
        ),
    )
    .unwrap();
    let json = dir.path().join("m.json");
    let o = run(&[
        "synth",
        "--stages",
        stages.to_str().unwrap(),
        "--bound",
        "2..4",
        "--out-json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(json.exists());
    assert!(dir.path().join("m.busy.json").exists());
    assert!(dir.path().join("m.full.json").exists());
}
