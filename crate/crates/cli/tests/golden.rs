use std::path::{Path, PathBuf};
use std::process::Command;

use kanpos::text::{tokenize, Token, Workspace};
use kanpos::Error;
use kanpos_cli::{parse_workspace, run, EXIT_ERROR, EXIT_FALSE, EXIT_TRUE};

fn golden() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn golden_files() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(golden())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "pos"))
        .collect();
    files.sort();
    files
}

fn tokens(src: &str) -> Vec<Token> {
    tokenize(src)
        .unwrap()
        .into_iter()
        .map(|s| s.token)
        .collect()
}

fn kanpos(args: &[&str]) -> std::process::Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_kanpos"));
    for f in golden_files() {
        cmd.arg("-w").arg(f);
    }
    cmd.args(args).output().unwrap()
}

#[test]
fn golden_files_round_trip() {
    let files = golden_files();
    assert!(files.len() >= 2);
    for path in files {
        let src = std::fs::read_to_string(&path).unwrap();
        let mut ws = parse_workspace(&[] as &[PathBuf], true).unwrap();
        let before: Vec<String> = ws.posets.keys().chain(ws.maps.keys()).cloned().collect();
        ws.add_source(&src).unwrap();
        // Only the declarations from this file.
        let mut own = Workspace::new();
        for (name, p) in &ws.posets {
            if !before.contains(name) {
                own.insert_poset(name, p.clone()).unwrap();
            }
        }
        for (name, m) in &ws.maps {
            if !before.contains(name) {
                own.insert_map(name, &m.dom, &m.cod, m.map.clone()).unwrap();
            }
        }
        assert_eq!(tokens(&own.to_text()), tokens(&src), "{}", path.display());
    }
}

#[test]
fn prelude_round_trips() {
    let ws = Workspace::from_source(kanpos_cli::PRELUDE).unwrap();
    assert_eq!(tokens(&ws.to_text()), tokens(kanpos_cli::PRELUDE));
}

#[test]
fn golden_commands_exit_as_recorded() {
    let listing = std::fs::read_to_string(golden().join("commands.txt")).unwrap();
    let mut seen = 0;
    for line in listing
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
    {
        let mut parts = line.split_whitespace();
        let expected: i32 = parts.next().unwrap().parse().unwrap();
        let args: Vec<&str> = parts.collect();
        let out = kanpos(&args);
        assert_eq!(
            out.status.code(),
            Some(expected),
            "`kanpos {}`\nstdout: {}\nstderr: {}",
            args.join(" "),
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        );
        seen += 1;
    }
    assert!(seen > 30);
}

#[test]
fn check_diamond() {
    let out = kanpos(&["check", "diamond", "-H", "emb_2_V"]);
    assert_eq!(out.status.code(), Some(EXIT_TRUE));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "emb_2_V: holds\n");
}

#[test]
fn reflect_prints_three_element_poset() {
    let out = kanpos(&["reflect", "antichain2", "-H", "emb_2_V"]);
    assert_eq!(out.status.code(), Some(EXIT_TRUE));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let ws = Workspace::from_source(&format!("{}{stdout}", kanpos_cli::PRELUDE)).unwrap();
    let r = ws.poset("R").unwrap();
    assert_eq!(r.len(), 3);
    assert!(r.is_join_semilattice());
    assert!(ws.map("unit").unwrap().is_embedding());
}

#[test]
fn budget_two_is_an_error() {
    let out = kanpos(&["reflect", "antichain2", "-H", "emb_2_V", "--budget", "2"]);
    assert_eq!(out.status.code(), Some(EXIT_ERROR));
    assert!(String::from_utf8_lossy(&out.stderr).contains("did not converge within 2 stages"));
}

#[test]
fn json_fields_are_stable() {
    let out = kanpos(&["--json", "reflect", "V", "-H", "emb_2_V"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], true);
    assert_eq!(v["converged_at"], 2);
    assert_eq!(v["stages"], serde_json::json!([3, 12, 4, 20, 4]));
    assert!(v["counterexample"].is_null());

    let out = kanpos(&["check", "W", "-H", "emb_2_V", "--json"]);
    assert_eq!(out.status.code(), Some(EXIT_FALSE));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], false);
    assert!(v["counterexample"]
        .as_str()
        .unwrap()
        .contains("NoExtension"));

    let out = kanpos(&[
        "--json",
        "reflect",
        "antichain2",
        "-H",
        "emb_2_V",
        "--budget",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(EXIT_ERROR));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["verdict"].is_null());
    assert_eq!(v["stages"], serde_json::json!([2, 6, 3]));
}

#[test]
fn trace_dump_lists_every_stage() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = kanpos(&["reflect", "antichain2", "-H", "emb_2_V", "--dump-trace", d]);
    assert_eq!(out.status.code(), Some(EXIT_TRUE));
    let trace = std::fs::read_to_string(dir.path().join("trace.txt")).unwrap();
    let posets: Vec<&str> = trace.lines().filter(|l| l.starts_with("poset ")).collect();
    let connects: Vec<&str> = trace
        .lines()
        .filter(|l| l.starts_with("connect "))
        .collect();
    assert_eq!(posets.len(), 5);
    assert_eq!(connects.len(), 4);
    assert!(connects[0].starts_with("connect 0 1 : a->"));
    let stages = Workspace::from_source(&posets.join("\n")).unwrap();
    let sizes: Vec<usize> = stages.posets.values().map(|p| p.len()).collect();
    assert_eq!(sizes, [2, 6, 3, 12, 3]);
}

#[test]
fn trace_dump_survives_budget_errors() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = kanpos(&[
        "reflect",
        "antichain2",
        "-H",
        "emb_2_V",
        "--budget",
        "2",
        "--dump-trace",
        d,
    ]);
    assert_eq!(out.status.code(), Some(EXIT_ERROR));
    let trace = std::fs::read_to_string(dir.path().join("trace.txt")).unwrap();
    assert_eq!(trace.lines().filter(|l| l.starts_with("poset ")).count(), 3);
}

#[test]
fn workspace_errors() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, src: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, src).unwrap();
        p
    };
    let vee = write(
        "v.pos",
        "poset V2 { elements: 0 1 top ; order: 0<top 1<top }\n",
    );
    let ws = parse_workspace(&[&vee], false).unwrap();
    assert_eq!((ws.posets.len(), ws.maps.len()), (1, 0));

    let bad_map = write(
        "m.pos",
        "poset C { elements: 0 1 ; order: 0<1 }\nmap f : C -> C { 0->1 1->0 }\n",
    );
    assert!(
        matches!(parse_workspace(&[&bad_map], false), Err(Error::Validation { name, .. }) if name == "f")
    );

    let twice = write("p.pos", "poset P { elements: a }\n");
    assert!(
        matches!(parse_workspace(&[&twice, &twice], false), Err(Error::NameCollision(n)) if n == "P")
    );

    let broken = write("b.pos", "poset Q {\n  elements: a b ;\n  order: a < }\n");
    assert!(matches!(
        parse_workspace(&[&broken], false),
        Err(Error::Parse { line: 3, .. })
    ));
}

#[test]
fn lan_keeps_dash_h_for_the_map() {
    let (code, out, _) = run(["kanpos", "lan", "-h", "emb_2_V", "-f", "emb_2_V"]);
    assert_eq!(code, EXIT_TRUE);
    assert!(
        out.starts_with("map lan_emb_2_V : V -> V { a->a b->b t->t }"),
        "{out}"
    );
    let (code, out, _) = run(["kanpos", "lan", "--help"]);
    assert_eq!(code, EXIT_TRUE);
    assert!(out.contains("--right"));
}

#[test]
fn unknown_command_is_an_error() {
    let (code, _, err) = run(["kanpos", "bogus"]);
    assert_eq!(code, EXIT_ERROR);
    assert!(err.contains("unrecognized subcommand"));
}
