//! The duality map on formulas, terms, bases and derivations.
//!
//! Duality swaps proofs and refutations: every polarity flips, `&` and `|`
//! trade places, `top` and `bot` trade places, and implication and
//! co-implication are exchanged with their arguments reversed. Variable
//! names are kept, so applying the map twice gives back the input exactly.

use thiserror::Error;

use crate::derivation::{Derivation, Judgment, Rule, Violation};
use crate::syntax::{Basis, Formula, Term, Var};

pub fn dual_formula(a: &Formula) -> Formula {
    match a {
        Formula::Atom(_) | Formula::Meta(_) => a.clone(),
        Formula::Verum => Formula::Falsum,
        Formula::Falsum => Formula::Verum,
        Formula::And(l, r) => Formula::or(dual_formula(l), dual_formula(r)),
        Formula::Or(l, r) => Formula::and(dual_formula(l), dual_formula(r)),
        Formula::Imp(l, r) => Formula::coimp(dual_formula(r), dual_formula(l)),
        Formula::CoImp(b, s) => Formula::imp(dual_formula(s), dual_formula(b)),
    }
}

fn dual_var(v: &Var) -> Var {
    Var { name: v.name.clone(), pol: v.pol.flip() }
}

pub fn dual_term(t: &Term) -> Term {
    match t {
        Term::Var(v) => Term::Var(dual_var(v)),
        Term::Top => Term::Bot,
        Term::Bot => Term::Top,
        Term::Abort(b, p) => Term::abort(dual_term(b), p.flip()),
        Term::Pair(l, r, p) => Term::pair(dual_term(l), dual_term(r), p.flip()),
        Term::Fst(b, p) => Term::fst(dual_term(b), p.flip()),
        Term::Snd(b, p) => Term::snd(dual_term(b), p.flip()),
        Term::Inl(b, p) => Term::inl(dual_term(b), p.flip()),
        Term::Inr(b, p) => Term::inr(dual_term(b), p.flip()),
        Term::Case { scrutinee, left, left_body, right, right_body, pol } => Term::case(
            dual_term(scrutinee),
            dual_var(left),
            dual_term(left_body),
            dual_var(right),
            dual_term(right_body),
            pol.flip(),
        ),
        Term::Lam(x, b, p) => Term::lam(dual_var(x), dual_term(b), p.flip()),
        Term::App(f, a, p) => Term::app(dual_term(f), dual_term(a), p.flip()),
        Term::MPair(s, u, p) => Term::mpair(dual_term(u), dual_term(s), p.flip()),
        Term::Pi1(b, p) => Term::pi2(dual_term(b), p.flip()),
        Term::Pi2(b, p) => Term::pi1(dual_term(b), p.flip()),
    }
}

/// Swaps assumptions and counterassumptions, dualizing every formula.
pub fn dual_basis(b: &Basis) -> Basis {
    let mut out = Basis::new();
    for (v, f) in b.vars() {
        out.insert(&dual_var(&v), dual_formula(f));
    }
    out
}

pub fn dual_judgment(j: &Judgment) -> Judgment {
    Judgment {
        basis: dual_basis(&j.basis),
        pol: j.pol.flip(),
        term: dual_term(&j.term),
        ty: dual_formula(&j.ty),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid derivation: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
pub struct InvalidDerivation(pub Vec<Violation>);

/// The dual derivation: same shape, dual judgments, dual rules. The two
/// premises of a mixed-pair rule trade places, following the swap of
/// components in the dual term.
pub fn dual_derivation(d: &Derivation) -> Result<Derivation, InvalidDerivation> {
    d.validate().map_err(InvalidDerivation)?;
    Ok(dualize(d))
}

fn dualize(d: &Derivation) -> Derivation {
    let mut prems: Vec<Derivation> = d.prems.iter().map(dualize).collect();
    if matches!(d.rule, Rule::ImpId | Rule::CoImpI) {
        prems.reverse();
    }
    Derivation { rule: d.rule.dual(), concl: dual_judgment(&d.concl), prems }
}
