use std::path::PathBuf;
use std::process::{Command, Output};

use l2int::textio::{parse_formula, parse_term, print_derivation_json};
use l2int::typing::check;
use l2int::{Basis, Polarity};

fn l2i(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_l2i")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn write_derivation(name: &str, pol: Polarity, term: &str, ty: &str) -> PathBuf {
    let d = check(&Basis::new(), pol, &parse_term(term).unwrap(), &parse_formula(ty).unwrap()).unwrap();
    let dir = std::env::temp_dir().join(format!("l2i-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, print_derivation_json(&d, true)).unwrap();
    path
}

#[test]
fn infer_identity() {
    let o = l2i(&["infer", "-e", "(\\x+. x+)+"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "(;) =>+ : ?A -> ?A\n"));
    let o = l2i(&["infer", "-e", "(\\x-. x-)-"]);
    assert_eq!(stdout(&o), "(;) =>- : ?A -< ?A\n");
}

#[test]
fn infer_rejects_self_application() {
    let o = l2i(&["infer", "-e", "app+(x+, x+)+"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (1, "untypable\n"));
}

#[test]
fn syntax_errors_exit_2() {
    assert_eq!(code(&l2i(&["infer", "-e", "top-"])), 2);
    assert_eq!(code(&l2i(&["infer", "-e", "(\\x+. "])), 2);
    assert_eq!(code(&l2i(&["frobnicate"])), 2);
}

#[test]
fn dualize_formula_and_term() {
    let o = l2i(&["dualize", "--formula", "(a -< b) -> (top -< (a -> b))"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "((b -< a) -> bot) -< (b -> a)\n"));
    let o = l2i(&["dualize", "-e", "(\\x+. {top+, {p1+(x+), p2-(x+)}-}+)+"]);
    assert_eq!(stdout(&o), "(\\x-. {{p1+(x-), p2-(x-)}+, bot-}-)-\n");
}

#[test]
fn equal_verdicts() {
    let o = l2i(&["equal", "-e", "(\\x+. x+)+", "-e", "(\\x-. x-)-"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (1, "distinct\n"));
    let o = l2i(&["equal", "-e", "(\\x+. x+)+", "-e", "(\\x-. x-)-", "--modulo-duality"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "identical-modulo-duality\n"));
    let o = l2i(&["equal", "-e", "app+((\\y+. y+)+, (\\x+. x+)+)+", "-e", "(\\z+. z+)+"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "identical\n"));
}

#[test]
fn normalize_with_trace() {
    let o = l2i(&["normalize", "--trace", "-e", "p1+(case z- {x-. {top+, x-}- | y-. {top+, y-}-}-)+"]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o),
        "perm-Pi1@root  case z- {x-. p1+({top+, x-}-) | y-. p1+({top+, y-}-)}+\n\
         beta-Pi1@1  case z- {x-. top+ | y-. p1+({top+, y-}-)}+\n\
         beta-Pi1@2  case z- {x-. top+ | y-. top+}+\n\
         simp-left@root  top+\n\
         top+\n"
    );
}

#[test]
fn normalize_out_of_fuel() {
    let omega = "(\\x+. app+(x+, x+)+)+";
    let o = l2i(&["normalize", "--fuel", "20", "-e", &format!("app+({omega}, {omega})+")]);
    assert_eq!(code(&o), 3);
}

#[test]
fn check_dualize_and_sense_on_files() {
    let proof = write_derivation("proof.json", Polarity::Pos, "(\\x+. {top+, {p1+(x+), p2-(x+)}-}+)+", "(a -< b) -> (top -< (a -> b))");
    let proof = proof.to_str().unwrap();
    let o = l2i(&["check", proof]);
    assert_eq!((code(&o), stdout(&o)), (0, format!("{proof}: valid, height 4\n")));

    let o = l2i(&["dualize", proof]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8(o.stderr.clone()).unwrap(), "height: original 4, dual 4\n");
    let dual = l2int::textio::parse_derivation_json(&stdout(&o)).unwrap();
    assert_eq!(dual.concl.term.to_string(), "(\\x-. {{p1+(x-), p2-(x-)}+, bot-}-)-");
    assert_eq!(dual.concl.ty.to_string(), "((b -< a) -> bot) -< (b -> a)");

    let p1 = write_derivation("id-rho.json", Polarity::Pos, "(\\x+. x+)+", "rho -> rho");
    let p2 = write_derivation("id-sigma.json", Polarity::Pos, "(\\y+. y+)+", "sigma -> sigma");
    let n1 = write_derivation("coid-rho.json", Polarity::Neg, "(\\x-. x-)-", "rho -< rho");
    let o = l2i(&["sense", p1.to_str().unwrap(), p2.to_str().unwrap()]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "synonymous\n"));
    let o = l2i(&["sense", p1.to_str().unwrap(), n1.to_str().unwrap()]);
    assert_eq!((code(&o), stdout(&o).as_str()), (1, "non-synonymous\n"));
}

#[test]
fn check_reports_invalid_files() {
    let path = write_derivation("broken.json", Polarity::Pos, "top+", "top");
    let text = std::fs::read_to_string(&path).unwrap().replace("\"top\"", "\"bot\"");
    std::fs::write(&path, text).unwrap();
    let o = l2i(&["check", path.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("invalid"));
    assert_eq!(code(&l2i(&["check", "/nonexistent/file.json"])), 2);
}

#[test]
fn gen_is_deterministic_and_valid() {
    let a = l2i(&["gen", "--seed", "9", "--max-height", "4", "--count", "3"]);
    let b = l2i(&["gen", "--seed", "9", "--max-height", "4", "--count", "3"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let lines: Vec<String> = stdout(&a).lines().map(String::from).collect();
    assert_eq!(lines.len(), 3);
    for line in lines {
        let d = l2int::textio::parse_derivation_json(&line).unwrap();
        assert!(d.validate().is_ok());
        assert!(d.height() <= 4);
    }
}
