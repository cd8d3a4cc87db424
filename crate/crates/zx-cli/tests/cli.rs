use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zx::circuit::{circuit_to_diagram, emit_qasm, parse_qasm, Circuit, Gate, ToffoliMode};
use zx::rules::{replay, trace_from_jsonl};
use zx::simplify::full_reduce;
use zx::tensor::circuit_state;

fn zx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zx")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn put(dir: &Path, name: &str, c: &Circuit) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, emit_qasm(c)).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn random_clifford(seed: u64, n: usize, len: usize) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Circuit::new(n);
    for _ in 0..len {
        let q = rng.gen_range(0..n);
        let r = (q + rng.gen_range(1..n)) % n;
        c.push(match rng.gen_range(0..6) {
            0 => Gate::H(q),
            1 => Gate::S(q),
            2 => Gate::Z(q),
            3 => Gate::CX(q, r),
            4 => Gate::CZ(q, r),
            _ => Gate::Sdg(q),
        });
    }
    c
}

fn ghz() -> Circuit {
    Circuit::new(3).with(Gate::H(0)).with(Gate::CX(0, 1)).with(Gate::CX(1, 2))
}

#[test]
fn opt_clifford_circuit_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let c = random_clifford(4, 6, 60);
    let input = put(dir.path(), "c.qasm", &c);
    let out = dir.path().join("c.opt.qasm");
    let o = zx(&["opt", s(&input), "-o", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("before") && err.contains("after"));
    let v = zx(&["verify", s(&input), s(&out)]);
    assert!(stdout(&v).starts_with("equal"), "{}", stdout(&v));
}

#[test]
fn opt_identity_is_empty() {
    let dir = tempfile::tempdir().unwrap();
    let input = put(dir.path(), "id.qasm", &Circuit::new(3));
    let o = zx(&["opt", s(&input)]);
    assert_eq!(code(&o), 0);
    let c = parse_qasm(&stdout(&o)).unwrap();
    assert_eq!((c.qubits, c.gates.len()), (3, 0));
}

#[test]
fn opt_with_t_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = put(dir.path(), "t.qasm", &Circuit::new(2).with(Gate::H(0)).with(Gate::T(0)).with(Gate::CX(0, 1)));
    let o = zx(&["opt", s(&input)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("not extractable"));
    let tof = put(dir.path(), "ccx.qasm", &Circuit::new(3).with(Gate::CCX(0, 1, 2)));
    assert_eq!(code(&zx(&["opt", s(&tof)])), 2);
}

#[test]
fn verify_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let c = ghz().with(Gate::T(2));
    let a = put(dir.path(), "a.qasm", &c);
    let stray = put(dir.path(), "b.qasm", &c.clone().with(Gate::Z(1)));
    let cx3 = put(dir.path(), "cx3.qasm", &Circuit::new(2).with(Gate::CX(0, 1)).with(Gate::CX(1, 0)).with(Gate::CX(0, 1)));
    let swap = put(dir.path(), "swap.qasm", &Circuit::new(2).with(Gate::Swap(0, 1)));
    assert_eq!(stdout(&zx(&["verify", s(&a), s(&a)])).trim(), "equal (proved)");
    assert_eq!(stdout(&zx(&["verify", s(&cx3), s(&swap)])).trim(), "equal (proved)");
    let o = zx(&["verify", s(&a), s(&stray)]);
    assert_eq!((code(&o), stdout(&o).trim().to_string()), (0, "different".to_string()));
    assert_eq!(code(&zx(&["verify", s(&a), s(&swap)])), 1);
}

#[test]
fn verify_too_wide_is_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let a = put(dir.path(), "a.qasm", &Circuit::new(11).with(Gate::T(0)));
    let b = put(dir.path(), "b.qasm", &Circuit::new(11).with(Gate::Tdg(0)));
    let o = zx(&["verify", s(&a), s(&b)]);
    assert_eq!(code(&o), 3);
    assert_eq!(stdout(&o).trim(), "inconclusive");
}

fn parse_complex(s: &str) -> Complex64 {
    let s = s.trim().trim_end_matches('i');
    let split = s[1..].find(['+', '-']).unwrap() + 1;
    Complex64::new(s[..split].parse().unwrap(), s[split..].parse().unwrap())
}

#[test]
fn amplitudes() {
    let dir = tempfile::tempdir().unwrap();
    let g = put(dir.path(), "ghz.qasm", &ghz());
    let dense = circuit_state(&ghz(), 0).unwrap();
    for (out, idx) in [("111", 7), ("010", 2), ("000", 0)] {
        let o = zx(&["amp", s(&g), "000", out]);
        assert_eq!(code(&o), 0);
        assert!((parse_complex(&stdout(&o)) - dense[idx]).norm() < 1e-9, "{out}: {}", stdout(&o));
    }
    let empty = put(dir.path(), "e.qasm", &Circuit::new(1));
    assert!((parse_complex(&stdout(&zx(&["amp", s(&empty), "0", "0"]))) - 1.0).norm() < 1e-12);
    assert_eq!(code(&zx(&["amp", s(&g), "00", "000"])), 1);
    let wide = put(dir.path(), "w.qasm", &Circuit::new(11).with(Gate::T(0)));
    assert_eq!(code(&zx(&["amp", s(&wide), "00000000000", "00000000000"])), 3);
}

#[test]
fn convert_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let c = random_clifford(9, 4, 30);
    let q = put(dir.path(), "c.qasm", &c);
    let j = dir.path().join("c.zx.json");
    let back = dir.path().join("back.qasm");
    assert_eq!(code(&zx(&["convert", s(&q), s(&j)])), 0);
    let d = zx::json::from_json(&std::fs::read_to_string(&j).unwrap()).unwrap();
    assert!(d.is_isomorphic_by_id(&circuit_to_diagram(&c, ToffoliMode::Hbox)));
    assert_eq!(code(&zx(&["convert", s(&j), s(&back)])), 0);
    assert!(stdout(&zx(&["verify", s(&q), s(&back)])).starts_with("equal"));
}

#[test]
fn render_cnot() {
    let dir = tempfile::tempdir().unwrap();
    let q = put(dir.path(), "cx.qasm", &Circuit::new(2).with(Gate::CX(0, 1)));
    let dot = dir.path().join("cx.dot");
    assert_eq!(code(&zx(&["render", s(&q), s(&dot)])), 0);
    let text = std::fs::read_to_string(&dot).unwrap();
    // two boundaries per wire, one Z and one X spider, joined once
    let nodes = text.lines().filter(|l| l.trim_start().starts_with('v') && l.contains(" [")).count();
    let edges = text.lines().filter(|l| l.contains(" -- ")).count();
    assert_eq!((nodes, edges), (6, 5));
    let tikz = dir.path().join("cx.tikz");
    assert_eq!(code(&zx(&["render", s(&q), s(&tikz)])), 0);
    assert!(std::fs::read_to_string(&tikz).unwrap().contains("\\begin{tikzpicture}"));
}

#[test]
fn input_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let q = put(dir.path(), "cx.qasm", &Circuit::new(2).with(Gate::CX(0, 1)));
    assert_eq!(code(&zx(&["render", s(&q), s(&dir.path().join("cx.png"))])), 1);
    assert_eq!(code(&zx(&["convert", s(&q), s(&dir.path().join("cx.txt"))])), 1);
    let bad = dir.path().join("bad.qasm");
    std::fs::write(&bad, "OPENQASM 2.0;\nqreg q[1];\nfoo q[0];\n").unwrap();
    let o = zx(&["opt", s(&bad)]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
    assert_eq!(code(&zx(&["opt", s(&q), "--tol", "0"])), 1);
    assert_eq!(code(&zx(&["opt", s(&q), "--strategy", "nonsense"])), 1);
    assert_eq!(code(&zx(&["stats", s(&dir.path().join("missing.qasm"))])), 1);
}

#[test]
fn opt_is_deterministic_and_traced() {
    let dir = tempfile::tempdir().unwrap();
    let c = random_clifford(21, 5, 50);
    let input = put(dir.path(), "c.qasm", &c);
    let (o1, o2) = (dir.path().join("1.qasm"), dir.path().join("2.qasm"));
    assert_eq!(code(&zx(&["opt", s(&input), "-o", s(&o1), "--trace"])), 0);
    assert_eq!(code(&zx(&["opt", s(&input), "-o", s(&o2)])), 0);
    assert_eq!(std::fs::read(&o1).unwrap(), std::fs::read(&o2).unwrap());
    let trace = trace_from_jsonl(&std::fs::read_to_string(dir.path().join("1.qasm.trace.jsonl")).unwrap()).unwrap();
    let start = circuit_to_diagram(&c, ToffoliMode::Hbox);
    let mut reduced = start.clone();
    full_reduce(&mut reduced);
    assert!(replay(&start, &trace).unwrap().is_isomorphic_by_id(&reduced));
}

#[test]
fn batch_mode() {
    let dir = tempfile::tempdir().unwrap();
    let inputs: Vec<PathBuf> =
        (0..6).map(|i| put(dir.path(), &format!("c{i}.qasm"), &random_clifford(i, 3 + i as usize % 3, 25))).collect();
    let out = dir.path().join("out");
    std::fs::create_dir(&out).unwrap();
    let mut args = vec!["opt", "--jobs", "3", "--out-dir", s(&out)];
    args.extend(inputs.iter().map(|p| s(p)));
    assert_eq!(code(&zx(&args)), 0);
    for (i, p) in inputs.iter().enumerate() {
        let o = out.join(format!("c{i}.opt.qasm"));
        assert!(stdout(&zx(&["verify", s(p), s(&o)])).starts_with("equal"));
    }
    // one bad file sets the exit code but the rest still run
    let t = put(dir.path(), "t.qasm", &Circuit::new(1).with(Gate::T(0)));
    let o = zx(&["opt", "--jobs", "2", "--out-dir", s(&out), s(&t), s(&inputs[0])]);
    assert_eq!(code(&o), 2);
    let st = zx(&["stats", "--jobs", "2", s(&inputs[0]), s(&t)]);
    assert_eq!(stdout(&st).lines().count(), 2);
}
