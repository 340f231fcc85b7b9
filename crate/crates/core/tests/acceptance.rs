//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion, and exits non-zero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use l2int::derivation::Rule;
use l2int::duality::{dual_basis, dual_derivation, dual_formula, dual_judgment, dual_term};
use l2int::meaning::{compare, synonymous, Verdict};
use l2int::rewrite::{find_redexes, normal_form, normalize, step, Clause, RedexKind, RedexPosition, DEFAULT_FUEL};
use l2int::syntax::{alpha_eq, canonical, substitute, Basis, Polarity, Term};
use l2int::testkit::{gen_basis, gen_derivation, gen_derivation_for, gen_formula, gen_term, oracle_reduce_all, GenConfig};
use l2int::textio::{parse_derivation_json, parse_formula, parse_term, print_formula, print_term};
use l2int::typing::{check, infer_principal, TypeError, UnifyError};
use l2int::Derivation;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn node(rule: &str, gamma: &[(&str, &str)], delta: &[(&str, &str)], pol: &str, term: &str, ty: &str, prems: Vec<Value>) -> Value {
    json!({
        "rule": rule,
        "concl": { "gamma": gamma, "delta": delta, "pol": pol, "term": term, "type": ty },
        "prems": prems,
    })
}

/// The displayed proof, transcribed node by node with A = a, B = b.
fn displayed_proof() -> Derivation {
    let g = [("x", "a -< b")];
    let hyp = || node("Hyp+", &g, &[], "+", "x+", "a -< b", vec![]);
    let v = node(
        "ImpI",
        &[],
        &[],
        "+",
        "(\\x+. {top+, {p1+(x+), p2-(x+)}-}+)+",
        "(a -< b) -> (top -< (a -> b))",
        vec![node(
            "CoImpI",
            &g,
            &[],
            "+",
            "{top+, {p1+(x+), p2-(x+)}-}+",
            "top -< (a -> b)",
            vec![
                node("TopI", &[], &[], "+", "top+", "top", vec![]),
                node(
                    "ImpI_d",
                    &g,
                    &[],
                    "-",
                    "{p1+(x+), p2-(x+)}-",
                    "a -> b",
                    vec![
                        node("CoImpE1", &g, &[], "+", "p1+(x+)", "a", vec![hyp()]),
                        node("CoImpE2", &g, &[], "-", "p2-(x+)", "b", vec![hyp()]),
                    ],
                ),
            ],
        )],
    );
    parse_derivation_json(&v.to_string()).expect("transcription parses")
}

/// The displayed refutation that mirrors it.
fn displayed_refutation() -> Derivation {
    let d = [("x", "b -> a")];
    let hyp = || node("Hyp-", &[], &d, "-", "x-", "b -> a", vec![]);
    let v = node(
        "CoImpI_d",
        &[],
        &[],
        "-",
        "(\\x-. {{p1+(x-), p2-(x-)}+, bot-}-)-",
        "((b -< a) -> bot) -< (b -> a)",
        vec![node(
            "ImpI_d",
            &[],
            &d,
            "-",
            "{{p1+(x-), p2-(x-)}+, bot-}-",
            "(b -< a) -> bot",
            vec![
                node(
                    "CoImpI",
                    &[],
                    &d,
                    "+",
                    "{p1+(x-), p2-(x-)}+",
                    "b -< a",
                    vec![
                        node("ImpE_d1", &[], &d, "+", "p1+(x-)", "b", vec![hyp()]),
                        node("ImpE_d2", &[], &d, "-", "p2-(x-)", "a", vec![hyp()]),
                    ],
                ),
                node("BotI_d", &[], &[], "-", "bot-", "bot", vec![]),
            ],
        )],
    );
    parse_derivation_json(&v.to_string()).expect("transcription parses")
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let proof = displayed_proof();
    let refutation = displayed_refutation();
    let mut errs = Vec::new();
    if let Err(v) = proof.validate() {
        errs.push(format!("proof invalid: {v:?}"));
    }
    if let Err(v) = refutation.validate() {
        errs.push(format!("refutation invalid: {v:?}"));
    }
    match dual_derivation(&proof) {
        Err(e) => errs.push(e.to_string()),
        Ok(dual) => {
            if !dual.alpha_eq(&refutation) {
                errs.push("dual is not the displayed refutation".into());
            }
            if print_term(&dual.concl.term) != "(\\x-. {{p1+(x-), p2-(x-)}+, bot-}-)-" {
                errs.push(format!("end-term {}", dual.concl.term));
            }
            if print_formula(&dual.concl.ty) != "((b -< a) -> bot) -< (b -> a)" {
                errs.push(format!("end-type {}", dual.concl.ty));
            }
            if proof.height() != 4 || dual.height() != 4 || dual.height() > proof.height() {
                errs.push(format!("heights {} and {}", proof.height(), dual.height()));
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(1) {
        errs.push(format!("took {elapsed:?}"));
    }
    let pass = errs.is_empty();
    outcome(pass, if pass { format!("heights 4/4, exact strings match, {elapsed:?}") } else { errs.join("; ") })
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut seen: BTreeMap<Rule, usize> = BTreeMap::new();
    let mut errs = Vec::new();
    let (mut equal_heights, n) = (0usize, 10_000u64);
    for seed in 0..n {
        let d = gen_derivation(&GenConfig::with_seed(seed, 8)).expect("generator");
        for node in d.nodes() {
            *seen.entry(node.rule).or_default() += 1;
        }
        let dual = match dual_derivation(&d) {
            Ok(x) => x,
            Err(e) => {
                errs.push(format!("seed {seed}: {e}"));
                continue;
            }
        };
        if dual.validate().is_err() {
            errs.push(format!("seed {seed}: dual does not validate"));
        }
        let want = dual_judgment(&d.concl);
        if dual.concl != want || dual.concl.basis != dual_basis(&d.concl.basis) || dual.concl.pol != d.concl.pol.flip() {
            errs.push(format!("seed {seed}: wrong dual conclusion"));
        }
        if dual.height() > d.height() {
            errs.push(format!("seed {seed}: height grew"));
        }
        if dual.height() == d.height() {
            equal_heights += 1;
        }
    }
    let missing: Vec<_> = Rule::logical().filter(|r| !seen.contains_key(r)).collect();
    if !missing.is_empty() {
        errs.push(format!("rules never generated: {missing:?}"));
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(60) {
        errs.push(format!("took {elapsed:?}"));
    }
    let rarest = Rule::logical().map(|r| seen.get(&r).copied().unwrap_or(0)).min().unwrap_or(0);
    let pass = errs.is_empty() && equal_heights == n as usize;
    outcome(
        pass,
        format!(
            "{n} derivations, 26/26 rules (rarest seen {rarest} times), equal height {equal_heights}/{n}, {elapsed:?}{}",
            errs.first().map(|e| format!("; first error: {e}")).unwrap_or_default()
        ),
    )
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut per_clause: BTreeMap<Clause, usize> = BTreeMap::new();
    let mut errs = Vec::new();
    let mut steps = 0usize;
    let n = 10_000u64;
    for seed in 0..n {
        let d = gen_derivation(&GenConfig::with_seed(1_000_000 + seed, 6)).expect("generator");
        let j = &d.concl;
        for pos in find_redexes(&j.term) {
            let reduct = step(&j.term, &pos).expect("listed redex");
            steps += 1;
            *per_clause.entry(pos.clause).or_default() += 1;
            if let Err(e) = check(&j.basis, j.pol, &reduct, &j.ty) {
                errs.push(format!("seed {seed} {pos}: {e}"));
            }
        }
    }
    let thin: Vec<String> = Clause::ALL
        .iter()
        .filter(|c| c.kind() != RedexKind::Simp && per_clause.get(c).copied().unwrap_or(0) < 100)
        .map(|c| format!("{c}={}", per_clause.get(c).copied().unwrap_or(0)))
        .collect();
    let simp: usize = [Clause::SimpLeft, Clause::SimpRight].iter().map(|c| per_clause.get(c).copied().unwrap_or(0)).sum();
    let rarest = Clause::ALL.iter().map(|c| per_clause.get(c).copied().unwrap_or(0)).min().unwrap_or(0);
    let pass = errs.is_empty() && thin.is_empty() && simp >= 100;
    outcome(
        pass,
        format!(
            "{n} terms, {steps} one-step reducts re-checked, {} failures, rarest clause {rarest}, simp {simp}, {:?}{}{}",
            errs.len(),
            start.elapsed(),
            if thin.is_empty() { String::new() } else { format!("; under-covered: {}", thin.join(", ")) },
            errs.first().map(|e| format!("; first error: {e}")).unwrap_or_default()
        ),
    )
}

/// Path of the subterm of `dual_term(t)` corresponding to `path` in `t`:
/// mixed pairs swap their components.
fn dual_path(t: &Term, path: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut cur = t;
    for &i in path {
        out.push(if matches!(cur, Term::MPair(..)) { 1 - i } else { i });
        cur = cur.children()[i];
    }
    out
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let atoms: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
    let mut errs = Vec::new();
    for i in 0..10_000 {
        let f = gen_formula(&mut rng, 4, &atoms);
        if dual_formula(&dual_formula(&f)) != f {
            errs.push(format!("formula {f}"));
        }
        let p = if rng.gen() { Polarity::Pos } else { Polarity::Neg };
        let t = gen_term(&mut rng, 5, p);
        let dt = dual_term(&t);
        if dual_term(&dt) != t || dt.pol() != p.flip() || l2int::syntax::check_polarities(&dt).is_err() {
            errs.push(format!("term {t}"));
        }
        let b = gen_basis(&mut rng, &atoms);
        if dual_basis(&dual_basis(&b)) != b {
            errs.push(format!("basis #{i}"));
        }
    }
    let mut sampled = 0usize;
    let mut kinds: BTreeMap<RedexKind, usize> = BTreeMap::new();
    let mut seed = 0u64;
    while sampled < 5_000 {
        seed += 1;
        let d = gen_derivation(&GenConfig::with_seed(2_000_000 + seed, 6)).expect("generator");
        let t = &d.concl.term;
        let redexes = find_redexes(t);
        if redexes.is_empty() {
            continue;
        }
        let pos = &redexes[seed as usize % redexes.len()];
        let after = step(t, pos).expect("listed redex");
        let dpos = RedexPosition { path: dual_path(t, &pos.path), clause: pos.clause.dual() };
        match step(&dual_term(t), &dpos) {
            Ok(dafter) if alpha_eq(&dafter, &dual_term(&after)) && dpos.kind() == pos.kind() => {}
            Ok(_) => errs.push(format!("seed {seed} {pos}: dual step differs")),
            Err(e) => errs.push(format!("seed {seed} {pos}: {e}")),
        }
        *kinds.entry(pos.kind()).or_default() += 1;
        sampled += 1;
    }
    outcome(
        errs.is_empty(),
        format!(
            "10000 formulas/terms/bases involutive, {sampled} reductions commute ({} beta, {} perm, {} simp), {} failures, {:?}{}",
            kinds.get(&RedexKind::Beta).unwrap_or(&0),
            kinds.get(&RedexKind::Perm).unwrap_or(&0),
            kinds.get(&RedexKind::Simp).unwrap_or(&0),
            errs.len(),
            start.elapsed(),
            errs.first().map(|e| format!("; first error: {e}")).unwrap_or_default()
        ),
    )
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut counts = [0usize; 2];
    let mut errs = Vec::new();
    let mut seed = 0u64;
    while counts[0] < 1_000 || counts[1] < 1_000 {
        seed += 1;
        let d = gen_derivation(&GenConfig::with_seed(3_000_000 + seed, 5)).expect("generator");
        let want = if counts[0] <= counts[1] { Polarity::Pos } else { Polarity::Neg };
        let Some((x, a)) = d.concl.basis.vars().find(|(v, _)| v.pol == want).map(|(v, f)| (v, f.clone())) else {
            continue;
        };
        let cfg = GenConfig { hyp_prefix: "k".into(), ..GenConfig::with_seed(seed, 4) };
        let ds = gen_derivation_for(&cfg, x.pol, &a).expect("generator");
        let mut rest = d.concl.basis.clone();
        rest.remove(&x);
        let basis = rest.union(&ds.concl.basis).expect("disjoint hypothesis names");
        let t = substitute(&d.concl.term, &x, &ds.concl.term).expect("polarities agree");
        if let Err(e) = check(&basis, d.concl.pol, &t, &d.concl.ty) {
            errs.push(format!("seed {seed} [{x}]: {e}"));
        }
        counts[if want == Polarity::Pos { 0 } else { 1 }] += 1;
    }
    outcome(
        errs.is_empty(),
        format!(
            "{} instances ({} assumption, {} counterassumption), {} failures, {:?}{}",
            counts[0] + counts[1],
            counts[0],
            counts[1],
            errs.len(),
            start.elapsed(),
            errs.first().map(|e| format!("; first error: {e}")).unwrap_or_default()
        ),
    )
}

fn identity(pol: Polarity, binder: &str, atom: &str) -> Derivation {
    let (term, ty) = match pol {
        Polarity::Pos => (format!("(\\{binder}+. {binder}+)+"), format!("{atom} -> {atom}")),
        Polarity::Neg => (format!("(\\{binder}-. {binder}-)-"), format!("{atom} -< {atom}")),
    };
    check(&Basis::new(), pol, &parse_term(&term).unwrap(), &parse_formula(&ty).unwrap()).expect("identity checks")
}

fn criterion_6() -> Outcome {
    let rows = [("x", "rho"), ("x", "sigma"), ("y", "sigma")];
    let plus: Vec<_> = rows.iter().map(|(b, a)| identity(Polarity::Pos, b, a)).collect();
    let minus: Vec<_> = rows.iter().map(|(b, a)| identity(Polarity::Neg, b, a)).collect();
    let mut errs = Vec::new();
    for group in [&plus, &minus] {
        for a in group.iter() {
            for b in group.iter() {
                if !synonymous(a, b).unwrap() {
                    errs.push(format!("{} / {} not synonymous", a.concl.term, b.concl.term));
                }
                if compare(&a.concl.term, &b.concl.term, false, DEFAULT_FUEL).unwrap() != Verdict::Identical {
                    errs.push(format!("{} / {} not identical", a.concl.term, b.concl.term));
                }
            }
        }
    }
    for a in &plus {
        for b in &minus {
            if synonymous(a, b).unwrap() {
                errs.push(format!("{} / {} synonymous", a.concl.term, b.concl.term));
            }
            if compare(&a.concl.term, &b.concl.term, true, DEFAULT_FUEL).unwrap() != Verdict::IdenticalModuloDuality {
                errs.push(format!("{} / {} not identical modulo duality", a.concl.term, b.concl.term));
            }
            if compare(&a.concl.term, &b.concl.term, false, DEFAULT_FUEL).unwrap() != Verdict::Distinct {
                errs.push(format!("{} / {} not distinct", a.concl.term, b.concl.term));
            }
        }
    }
    let pass = errs.is_empty();
    outcome(pass, if pass { "6 derivations, 36 pairs classified as expected".into() } else { errs.join("; ") })
}

fn criterion_7() -> Outcome {
    let mut errs = Vec::new();
    let ty = |s: &str| infer_principal(&parse_term(s).unwrap()).map(|p| print_formula(&p.scheme().body));
    match ty("(\\x+. x+)+") {
        Ok(s) if s == "?A -> ?A" => {}
        other => errs.push(format!("positive identity: {other:?}")),
    }
    match ty("(\\x-. x-)-") {
        Ok(s) if s == "?A -< ?A" => {}
        other => errs.push(format!("negative identity: {other:?}")),
    }
    match infer_principal(&parse_term("app+(x+, x+)+").unwrap()) {
        Err(TypeError::Untypable { reason: UnifyError::OccursCheck(..), .. }) => {}
        other => errs.push(format!("self-application: {other:?}")),
    }
    let pass = errs.is_empty();
    outcome(pass, if pass { "?A -> ?A, ?A -< ?A, occurs check rejects app+(x+, x+)+".into() } else { errs.join("; ") })
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let mut samples = 0usize;
    let mut with_redexes = 0usize;
    let mut findings = Vec::new();
    let mut errs = Vec::new();
    let mut seen = BTreeSet::new();
    let mut seed = 0u64;
    while samples < 5_000 && seed < 1_000_000 {
        seed += 1;
        let cfg = GenConfig { max_nodes: 14, ..GenConfig::with_seed(4_000_000 + seed, 4) };
        let t = gen_derivation(&cfg).expect("generator").concl.term;
        if t.size() > 12 || !seen.insert(canonical(&t)) {
            continue;
        }
        samples += 1;
        if !find_redexes(&t).is_empty() {
            with_redexes += 1;
        }
        let nf = canonical(&normal_form(&t, DEFAULT_FUEL).expect("small typable terms normalize"));
        match oracle_reduce_all(&t, 64) {
            Ok(r) => {
                if !r.normal_forms.contains(&nf) {
                    errs.push(format!("{t}: canonical normal form {nf} not reached by the oracle"));
                }
                if r.normal_forms.len() != 1 {
                    let nfs: Vec<String> = r.normal_forms.iter().map(|n| n.to_string()).collect();
                    findings.push(format!("{t} has {} normal forms: {}", nfs.len(), nfs.join(" , ")));
                }
            }
            Err(e) => errs.push(format!("{t}: {e}")),
        }
    }
    for f in findings.iter().take(5) {
        println!("    finding: {f}");
    }
    let elapsed = start.elapsed();
    if samples < 5_000 {
        errs.push(format!("only {samples} distinct terms of size <= 12"));
    }
    if elapsed >= Duration::from_secs(300) {
        errs.push(format!("took {elapsed:?}"));
    }
    outcome(
        errs.is_empty(),
        format!(
            "{samples} distinct terms ({with_redexes} with redexes), canonical normal form always reached: {}, \
             {} terms with several normal forms logged, {elapsed:?}{}",
            errs.is_empty(),
            findings.len(),
            errs.first().map(|e| format!("; first error: {e}")).unwrap_or_default()
        ),
    )
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let mut errs = Vec::new();
    let (mut tested, mut max_steps, mut total_steps) = (0usize, 0usize, 0usize);
    for seed in 0..10_000u64 {
        let d = gen_derivation(&GenConfig::with_seed(5_000_000 + seed, 8)).expect("generator");
        let t = &d.concl.term;
        if t.size() > 60 {
            continue;
        }
        tested += 1;
        match normalize(t, DEFAULT_FUEL) {
            Ok((_, tr)) => {
                max_steps = max_steps.max(tr.len());
                total_steps += tr.len();
            }
            Err(e) => errs.push(format!("seed {seed}: {e}")),
        }
    }
    outcome(
        errs.is_empty() && tested > 0,
        format!(
            "{tested} terms of size <= 60, {total_steps} steps in total, longest {max_steps}, {} exhausted fuel, {:?}",
            errs.len(),
            start.elapsed()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("golden proof/refutation pair", criterion_1),
        ("dualization theorem", criterion_2),
        ("subject reduction", criterion_3),
        ("involution and commutation", criterion_4),
        ("substitution lemma", criterion_5),
        ("identity and synonymy matrix", criterion_6),
        ("principal types", criterion_7),
        ("confluence probe", criterion_8),
        ("fuel adequacy", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        println!("criterion {} [{name}]: {} ({})", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {}/9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
