//! One-step reduction and normalization.
//!
//! Three families of redexes are recognised at any position of a term:
//! β-redexes, permutation redexes (an eliminator applied to a `case`), and
//! simplification redexes (a `case` whose chosen branch ignores both
//! binders). [`normalize`] contracts redexes deterministically: the first
//! β-redex in leftmost-outermost order, otherwise the first permutation
//! redex, otherwise the first simplification redex.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::syntax::{all_names, free_vars, rename_free, substitute, Name, Polarity, Term, Var};

pub const DEFAULT_FUEL: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RedexKind {
    Beta,
    Perm,
    Simp,
}

impl RedexKind {
    pub fn name(self) -> &'static str {
        match self {
            RedexKind::Beta => "beta",
            RedexKind::Perm => "perm",
            RedexKind::Simp => "simp",
        }
    }
}

impl fmt::Display for RedexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Clause {
    BetaApp,
    BetaPi1,
    BetaPi2,
    BetaFst,
    BetaSnd,
    BetaCaseInl,
    BetaCaseInr,
    PermApp,
    PermPi1,
    PermPi2,
    PermFst,
    PermSnd,
    PermCaseCasePos,
    PermCaseCaseNeg,
    SimpLeft,
    SimpRight,
}

impl Clause {
    pub const ALL: [Clause; 16] = [
        Clause::BetaApp,
        Clause::BetaPi1,
        Clause::BetaPi2,
        Clause::BetaFst,
        Clause::BetaSnd,
        Clause::BetaCaseInl,
        Clause::BetaCaseInr,
        Clause::PermApp,
        Clause::PermPi1,
        Clause::PermPi2,
        Clause::PermFst,
        Clause::PermSnd,
        Clause::PermCaseCasePos,
        Clause::PermCaseCaseNeg,
        Clause::SimpLeft,
        Clause::SimpRight,
    ];

    pub fn kind(self) -> RedexKind {
        use Clause::*;
        match self {
            BetaApp | BetaPi1 | BetaPi2 | BetaFst | BetaSnd | BetaCaseInl | BetaCaseInr => RedexKind::Beta,
            PermApp | PermPi1 | PermPi2 | PermFst | PermSnd | PermCaseCasePos | PermCaseCaseNeg => RedexKind::Perm,
            SimpLeft | SimpRight => RedexKind::Simp,
        }
    }

    pub fn name(self) -> &'static str {
        use Clause::*;
        match self {
            BetaApp => "beta-App",
            BetaPi1 => "beta-Pi1",
            BetaPi2 => "beta-Pi2",
            BetaFst => "beta-Fst",
            BetaSnd => "beta-Snd",
            BetaCaseInl => "beta-CaseInl",
            BetaCaseInr => "beta-CaseInr",
            PermApp => "perm-App",
            PermPi1 => "perm-Pi1",
            PermPi2 => "perm-Pi2",
            PermFst => "perm-Fst",
            PermSnd => "perm-Snd",
            PermCaseCasePos => "perm-CaseCase+",
            PermCaseCaseNeg => "perm-CaseCase-",
            SimpLeft => "simp-left",
            SimpRight => "simp-right",
        }
    }

    /// The clause of the same kind that matches the dual redex.
    pub fn dual(self) -> Clause {
        use Clause::*;
        match self {
            BetaPi1 => BetaPi2,
            BetaPi2 => BetaPi1,
            PermPi1 => PermPi2,
            PermPi2 => PermPi1,
            PermCaseCasePos => PermCaseCaseNeg,
            PermCaseCaseNeg => PermCaseCasePos,
            other => other,
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RedexPosition {
    pub path: Vec<usize>,
    pub clause: Clause,
}

impl RedexPosition {
    pub fn kind(&self) -> RedexKind {
        self.clause.kind()
    }
}

impl fmt::Display for RedexPosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.clause, crate::render_path(&self.path))
    }
}

/// Steps taken by a reduction, each paired with the whole term after it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trace {
    pub steps: Vec<(RedexPosition, Term)>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (pos, t) in &self.steps {
            writeln!(f, "{pos}  {t}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no {} redex at {}", .clause, crate::render_path(.path))]
pub struct NotARedex {
    pub path: Vec<usize>,
    pub clause: Clause,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("fuel exhausted after {fuel} steps")]
pub struct FuelExhausted {
    pub fuel: usize,
    /// The term reached when fuel ran out.
    pub last: Term,
    /// Steps taken so far; empty when the caller did not ask for a trace.
    pub trace: Trace,
}

fn is_case(t: &Term) -> bool {
    matches!(t, Term::Case { .. })
}

/// Clauses whose left-hand side matches `t` at its root, in the order
/// β, permutation, simplification.
pub fn root_clauses(t: &Term) -> Vec<Clause> {
    use Clause::*;
    let mut out = Vec::new();
    match t {
        Term::App(f, _, _) => {
            if matches!(**f, Term::Lam(..)) {
                out.push(BetaApp);
            }
            if is_case(f) {
                out.push(PermApp);
            }
        }
        Term::Pi1(b, _) => {
            if matches!(**b, Term::MPair(..)) {
                out.push(BetaPi1);
            }
            if is_case(b) {
                out.push(PermPi1);
            }
        }
        Term::Pi2(b, _) => {
            if matches!(**b, Term::MPair(..)) {
                out.push(BetaPi2);
            }
            if is_case(b) {
                out.push(PermPi2);
            }
        }
        Term::Fst(b, _) => {
            if matches!(**b, Term::Pair(..)) {
                out.push(BetaFst);
            }
            if is_case(b) {
                out.push(PermFst);
            }
        }
        Term::Snd(b, _) => {
            if matches!(**b, Term::Pair(..)) {
                out.push(BetaSnd);
            }
            if is_case(b) {
                out.push(PermSnd);
            }
        }
        Term::Case { scrutinee, left, left_body, right, right_body, pol } => {
            match **scrutinee {
                Term::Inl(..) => out.push(BetaCaseInl),
                Term::Inr(..) => out.push(BetaCaseInr),
                Term::Case { .. } => out.push(if *pol == Polarity::Pos { PermCaseCasePos } else { PermCaseCaseNeg }),
                _ => {}
            }
            let fv_l = free_vars(left_body);
            if !fv_l.contains(left) && !fv_l.contains(right) {
                out.push(SimpLeft);
            }
            let fv_r = free_vars(right_body);
            if !fv_r.contains(left) && !fv_r.contains(right) {
                out.push(SimpRight);
            }
        }
        _ => {}
    }
    out
}

/// Every redex of `t`, in leftmost-outermost (pre-order) order.
pub fn find_redexes(t: &Term) -> Vec<RedexPosition> {
    let mut out = Vec::new();
    for (path, sub) in t.subterms() {
        for clause in root_clauses(sub) {
            out.push(RedexPosition { path: path.clone(), clause });
        }
    }
    out
}

pub fn is_normal(t: &Term) -> bool {
    t.subterms().iter().all(|(_, s)| root_clauses(s).is_empty())
}

/// Renames binder `x` of `body` when it would capture one of `outside`,
/// a set of variables about to be moved into its scope.
fn guard_binder(x: &Var, body: &Term, outside: &BTreeSet<Var>, extra: &BTreeSet<Name>) -> (Var, Term) {
    if !outside.contains(x) {
        return (x.clone(), body.clone());
    }
    let mut names = BTreeSet::new();
    all_names(body, &mut names);
    let fresh = crate::syntax::fresh_name(&x.name, |c| {
        names.contains(c) || extra.contains(c) || outside.iter().any(|v| v.name.as_str() == c)
    });
    let nx = Var { name: fresh, pol: x.pol };
    let renamed = rename_free(body, x, &nx);
    (nx, renamed)
}

/// Pushes `wrap` into both branches of the case `c`, renaming the case's
/// binders away from `outside` (the free variables of the moved context).
fn push_into_case(c: &Term, pol: Polarity, outside: &BTreeSet<Var>, extra: &BTreeSet<Name>, wrap: impl Fn(Term) -> Term) -> Term {
    let Term::Case { scrutinee, left, left_body, right, right_body, .. } = c else { unreachable!() };
    let (x, s) = guard_binder(left, left_body, outside, extra);
    let (y, t) = guard_binder(right, right_body, outside, extra);
    Term::case((**scrutinee).clone(), x, wrap(s), y, wrap(t), pol)
}

fn names_of(t: &Term) -> BTreeSet<Name> {
    let mut n = BTreeSet::new();
    all_names(t, &mut n);
    n
}

/// The contractum of `t` under `clause`, or `None` when the clause does
/// not match at the root.
pub fn contract(t: &Term, clause: Clause) -> Option<Term> {
    use Clause::*;
    if !root_clauses(t).contains(&clause) {
        return None;
    }
    let bad = "polarity well-formed redex";
    Some(match (clause, t) {
        (BetaApp, Term::App(f, s, _)) => {
            let Term::Lam(x, body, _) = &**f else { unreachable!() };
            substitute(body, x, s).expect(bad)
        }
        (BetaPi1, Term::Pi1(b, _)) | (BetaPi2, Term::Pi2(b, _)) => {
            let Term::MPair(s, u, _) = &**b else { unreachable!() };
            if clause == BetaPi1 { (**s).clone() } else { (**u).clone() }
        }
        (BetaFst, Term::Fst(b, _)) | (BetaSnd, Term::Snd(b, _)) => {
            let Term::Pair(s, u, _) = &**b else { unreachable!() };
            if clause == BetaFst { (**s).clone() } else { (**u).clone() }
        }
        (BetaCaseInl | BetaCaseInr, Term::Case { scrutinee, left, left_body, right, right_body, .. }) => {
            match &**scrutinee {
                Term::Inl(r, _) => substitute(left_body, left, r).expect(bad),
                Term::Inr(r, _) => substitute(right_body, right, r).expect(bad),
                _ => unreachable!(),
            }
        }
        (PermApp, Term::App(c, u, p)) => {
            let fv = free_vars(u);
            push_into_case(c, *p, &fv, &names_of(u), |b| Term::app(b, (**u).clone(), *p))
        }
        (PermPi1, Term::Pi1(c, p)) => push_into_case(c, *p, &BTreeSet::new(), &BTreeSet::new(), |b| Term::pi1(b, *p)),
        (PermPi2, Term::Pi2(c, p)) => push_into_case(c, *p, &BTreeSet::new(), &BTreeSet::new(), |b| Term::pi2(b, *p)),
        (PermFst, Term::Fst(c, p)) => push_into_case(c, *p, &BTreeSet::new(), &BTreeSet::new(), |b| Term::fst(b, *p)),
        (PermSnd, Term::Snd(c, p)) => push_into_case(c, *p, &BTreeSet::new(), &BTreeSet::new(), |b| Term::snd(b, *p)),
        (PermCaseCasePos | PermCaseCaseNeg, Term::Case { scrutinee, left, left_body, right, right_body, pol }) => {
            let mut fv = free_vars(left_body);
            fv.remove(left);
            let mut fv_r = free_vars(right_body);
            fv_r.remove(right);
            fv.extend(fv_r);
            let mut extra = names_of(left_body);
            extra.extend(names_of(right_body));
            extra.insert(left.name.clone());
            extra.insert(right.name.clone());
            push_into_case(scrutinee, *pol, &fv, &extra, |b| {
                Term::case(b, left.clone(), (**left_body).clone(), right.clone(), (**right_body).clone(), *pol)
            })
        }
        (SimpLeft, Term::Case { left_body, .. }) => (**left_body).clone(),
        (SimpRight, Term::Case { right_body, .. }) => (**right_body).clone(),
        _ => unreachable!(),
    })
}

/// Contracts the redex at `pos`.
pub fn step(t: &Term, pos: &RedexPosition) -> Result<Term, NotARedex> {
    let err = || NotARedex { path: pos.path.clone(), clause: pos.clause };
    let sub = t.subterm(&pos.path).ok_or_else(err)?;
    let new = contract(sub, pos.clause).ok_or_else(err)?;
    let mut out = t.clone();
    *out.subterm_mut(&pos.path).expect("path checked above") = new;
    Ok(out)
}

/// The redex `normalize` contracts next, if any.
pub fn next_redex(t: &Term) -> Option<RedexPosition> {
    let mut best: Option<RedexPosition> = None;
    for (path, sub) in t.subterms() {
        for clause in root_clauses(sub) {
            if clause.kind() == RedexKind::Beta {
                return Some(RedexPosition { path, clause });
            }
            if best.as_ref().is_none_or(|b| clause.kind() < b.kind()) {
                best = Some(RedexPosition { path: path.clone(), clause });
            }
        }
    }
    best
}

/// Normalizes `t` within `fuel` steps, recording every step.
pub fn normalize(t: &Term, fuel: usize) -> Result<(Term, Trace), FuelExhausted> {
    run(t, fuel, true)
}

/// Like [`normalize`] without recording a trace.
pub fn normal_form(t: &Term, fuel: usize) -> Result<Term, FuelExhausted> {
    run(t, fuel, false).map(|(t, _)| t)
}

fn run(t: &Term, fuel: usize, record: bool) -> Result<(Term, Trace), FuelExhausted> {
    let mut cur = t.clone();
    let mut trace = Trace::default();
    for _ in 0..fuel {
        let Some(pos) = next_redex(&cur) else {
            return Ok((cur, trace));
        };
        cur = step(&cur, &pos).expect("next_redex returns a redex");
        if record {
            trace.steps.push((pos, cur.clone()));
        }
    }
    if is_normal(&cur) {
        return Ok((cur, trace));
    }
    Err(FuelExhausted { fuel, last: cur, trace })
}
