use std::io::Write;
use std::process::{Command, Output, Stdio};

use connexive::natded::NdSystemId;
use connexive::random::{seeded, DerivationGen};
use connexive::parse_sequent;
use connexive::sequent::{Principal, RuleId, SequentProof};

fn cxk(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_cxk"))
        .args(args)
        .env_remove("CXK_BUDGET")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn temp(contents: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

fn assert_valid(kind: &str, system: &str, json: &str) {
    let f = temp(json);
    let o = cxk(&["check", kind, system, f.path().to_str().unwrap()], "");
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).starts_with("valid"));
}

#[test]
fn prove_and_check_round_trip() {
    for (calc, text) in [
        ("sc", "(p -> q) -> ~(p -> ~q)"),
        ("sc3", "=> ~p | p"),
        ("smc", "((p -> q) -> p) -> p"),
        ("scn-star", "~p | p"),
        ("ljp-peirce", "((p -> q) -> p) -> p"),
        ("ljp", "p', p' -> q => q"),
    ] {
        let o = cxk(&["prove", calc, text], "");
        assert_eq!(code(&o), 0, "{calc} {text}");
        assert_valid("sc", calc, &stdout(&o));
    }
    let o = cxk(&["prove", "sc", "~p | p", "--quiet"], "");
    assert_eq!((code(&o), stdout(&o).trim()), (1, "unprovable"));
    let o = cxk(&["prove", "smc", "~p | p", "--quiet"], "");
    assert_eq!(code(&o), 1);
    let o = cxk(&["prove", "ljp", "~p"], "");
    assert_eq!(code(&o), 2);
}

#[test]
fn budget_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_cxk")).args(["prove", "sc3", "~p | p"]).env("CXK_BUDGET", "1").output().unwrap();
    assert_eq!(code(&o), 3);
    let o = cxk(&["prove", "sc", "p", "--budget", "zero"], "");
    assert_eq!(code(&o), 2);
}

#[test]
fn check_rejects_foreign_rule_and_broken_input() {
    let proof = stdout(&cxk(&["prove", "smc", "((p -> q) -> p) -> p"], ""));
    let f = temp(&proof);
    let o = cxk(&["check", "sc", "sc", f.path().to_str().unwrap()], "");
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("rule not in calculus"), "{}", stdout(&o));

    let o = cxk(&["check", "sc", "smc", "-"], &proof[..proof.len() / 3]);
    assert_eq!(code(&o), 2);
    let o = cxk(&["check", "sc", "smc", "/nonexistent/proof.json"], "");
    assert_eq!(code(&o), 2);
    let o = cxk(&["check", "nd", "nq", "-"], "{}");
    assert_eq!(code(&o), 2);
}

#[test]
fn sc2nd_refuses_cut() {
    let s = parse_sequent("p => p").unwrap();
    let id = SequentProof::leaf(s.clone(), RuleId::Init1);
    let cut = SequentProof::new(s, RuleId::Cut, Principal::One(connexive::parse("p").unwrap()), vec![id.clone(), id]);
    let json = cut.to_json_string();
    assert_valid("sc", "sc", &json);
    let o = cxk(&["transform", "sc2nd", "--calculus", "sc", "-"], &json);
    assert_eq!(code(&o), 1);

    let o = cxk(&["transform", "cutfree", "--calculus", "sc", "-"], &json);
    assert_eq!(code(&o), 0);
    let q = SequentProof::from_json_str(&stdout(&o), false).unwrap();
    assert!(q.is_cut_free());
    assert_valid("sc", "sc", &stdout(&o));
    let o = cxk(&["transform", "sc2nd", "--calculus", "sc", "-"], &stdout(&o));
    assert_eq!(code(&o), 0);
    assert_valid("nd", "nc", &stdout(&o));
}

#[test]
fn transforms_emit_valid_objects() {
    let gen = DerivationGen::default();
    let mut rng = seeded(11);
    for sys in NdSystemId::ALL {
        let name = sys.to_string();
        let calc = sys.paired().to_string();
        for _ in 0..5 {
            let d = gen.with_detour(&mut rng, sys).to_json_string();
            let file = temp(&d);
            let path = file.path().to_str().unwrap();

            let o = cxk(&["transform", "nd2sc", "--system", &name, path], "");
            assert_eq!(code(&o), 0);
            assert_valid("sc", &calc, &stdout(&o));
            let sc = stdout(&o);

            let o = cxk(&["transform", "sc2nd", "--calculus", &calc, "-"], &sc);
            assert_eq!(code(&o), 1, "a translated derivation carries cuts");

            let o = cxk(&["transform", "normalize", "--system", &name, path], "");
            assert_eq!(code(&o), 0);
            assert_valid("nd", &name, &stdout(&o));

            let o = cxk(&["transform", "reduce", "--system", &name, path], "");
            assert_eq!(code(&o), 0);
            assert_valid("nd", &name, &stdout(&o));

            let o = cxk(&["transform", "reduce", "--system", &name, "--steps", "0", path], "");
            assert_eq!(code(&o), 3);
        }
    }
}

#[test]
fn weaken_and_translate() {
    let proof = stdout(&cxk(&["prove", "sc", "p & q => q"], ""));
    let o = cxk(&["transform", "weaken", "--calculus", "sc", "--with", "r, ~s", "-"], &proof);
    assert_eq!(code(&o), 0);
    assert_valid("sc", "sc", &stdout(&o));
    let w = SequentProof::from_json_str(&stdout(&o), false).unwrap();
    assert_eq!(w.conclusion, parse_sequent("p & q, r, ~s => q").unwrap());

    let o = cxk(&["transform", "translate", "~(p -> q)"], "");
    assert_eq!((code(&o), stdout(&o).trim()), (0, "p -> q'"));
    let o = cxk(&["transform", "translate", "p ->"], "");
    assert_eq!(code(&o), 2);
}

#[test]
fn matrix_file() {
    let f = temp("~p | p\n((p -> q) -> p) -> p\n(p -> q) -> ~(p -> ~q)\n");
    let o = cxk(&["matrix", f.path().to_str().unwrap()], "");
    assert_eq!(code(&o), 0);
    let lines: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    assert_eq!(lines[0], "formula,sC,sC3,sMC,sCN");
    assert_eq!(lines[1], "~p | p,N,Y,N,Y");
    assert_eq!(lines[2], "((p -> q) -> p) -> p,N,N,Y,Y");
    assert_eq!(lines[3], "(p -> q) -> ~(p -> ~q),Y,Y,Y,Y");
    let o = cxk(&["matrix", "-", "--budget", "1"], "~p | p\n");
    assert_eq!(code(&o), 3);
    assert!(stdout(&o).contains(",T"));
}

#[test]
fn usage_errors() {
    assert_eq!(code(&cxk(&[], "")), 2);
    assert_eq!(code(&cxk(&["frobnicate"], "")), 2);
    assert_eq!(code(&cxk(&["--help"], "")), 0);
}
