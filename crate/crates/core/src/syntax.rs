//! Formulas, polarities, two-sorted terms and bases.
//!
//! Every term constructor carries a [`Polarity`]: `+` marks a proof, `-` a
//! refutation (dual proof). Variables are identified by name *and*
//! polarity, so `x+` and `x-` are unrelated.

use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use thiserror::Error;

/// Sort tag of terms and judgments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    /// Proof.
    Pos,
    /// Refutation.
    Neg,
}

impl Polarity {
    pub fn flip(self) -> Polarity {
        match self {
            Polarity::Pos => Polarity::Neg,
            Polarity::Neg => Polarity::Pos,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Polarity::Pos => '+',
            Polarity::Neg => '-',
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// Interned-ish identifier shared between term copies.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name(Arc<str>);

impl Name {
    pub fn new(s: &str) -> Name {
        Name(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl Deref for Name {
    type Target = str;
    fn deref(&self) -> &str {
        &self.0
    }
}

impl Borrow<str> for Name {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Name {
        Name::new(s)
    }
}

impl From<String> for Name {
    fn from(s: String) -> Name {
        Name(Arc::from(s))
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Types of the calculus: formulas of the bi-intuitionistic language,
/// extended with metavariables used by principal-type inference.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(Name),
    Falsum,
    Verum,
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    /// `CoImp(b, a)` is `b -< a`: a proof of `b` together with a refutation of `a`.
    CoImp(Box<Formula>, Box<Formula>),
    /// Inference metavariable, printed `?A`, `?B`, ..., `?Z`, `?A1`, ...
    Meta(u32),
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(Name::new(name))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    pub fn coimp(body: Formula, subtrahend: Formula) -> Formula {
        Formula::CoImp(Box::new(body), Box::new(subtrahend))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Formula::Meta(_) => false,
            Formula::Atom(_) | Formula::Falsum | Formula::Verum => true,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) | Formula::CoImp(a, b) => {
                a.is_ground() && b.is_ground()
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Falsum | Formula::Verum | Formula::Meta(_) => 1,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) | Formula::CoImp(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    /// Applies `f` to every atom name, leaving the shape untouched.
    pub fn map_atoms(&self, f: &impl Fn(&Name) -> Name) -> Formula {
        match self {
            Formula::Atom(n) => Formula::Atom(f(n)),
            Formula::Falsum | Formula::Verum | Formula::Meta(_) => self.clone(),
            Formula::And(a, b) => Formula::and(a.map_atoms(f), b.map_atoms(f)),
            Formula::Or(a, b) => Formula::or(a.map_atoms(f), b.map_atoms(f)),
            Formula::Imp(a, b) => Formula::imp(a.map_atoms(f), b.map_atoms(f)),
            Formula::CoImp(a, b) => Formula::coimp(a.map_atoms(f), b.map_atoms(f)),
        }
    }
}

/// A polarized term variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub name: Name,
    pub pol: Polarity,
}

impl Var {
    pub fn new(name: &str, pol: Polarity) -> Var {
        Var { name: Name::new(name), pol }
    }

    pub fn pos(name: &str) -> Var {
        Var::new(name, Polarity::Pos)
    }

    pub fn neg(name: &str) -> Var {
        Var::new(name, Polarity::Neg)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.name, self.pol)
    }
}

/// Two-sorted proof/refutation terms.
///
/// Child indices used by paths: unary constructors have child `0`;
/// `Pair`, `App` and `MPair` have `0` and `1`; `Case` has the scrutinee at
/// `0` and its branches at `1` and `2`; `Lam` has its body at `0`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Var),
    /// `top+`
    Top,
    /// `bot-`
    Bot,
    Abort(Box<Term>, Polarity),
    Pair(Box<Term>, Box<Term>, Polarity),
    Fst(Box<Term>, Polarity),
    Snd(Box<Term>, Polarity),
    Inl(Box<Term>, Polarity),
    Inr(Box<Term>, Polarity),
    Case {
        scrutinee: Box<Term>,
        left: Var,
        left_body: Box<Term>,
        right: Var,
        right_body: Box<Term>,
        pol: Polarity,
    },
    Lam(Var, Box<Term>, Polarity),
    App(Box<Term>, Box<Term>, Polarity),
    /// `{s+, t-}`: pairs a proof with a refutation.
    MPair(Box<Term>, Box<Term>, Polarity),
    Pi1(Box<Term>, Polarity),
    Pi2(Box<Term>, Polarity),
}

impl Term {
    pub fn var(name: &str, pol: Polarity) -> Term {
        Term::Var(Var::new(name, pol))
    }

    pub fn abort(t: Term, pol: Polarity) -> Term {
        Term::Abort(Box::new(t), pol)
    }

    pub fn pair(l: Term, r: Term, pol: Polarity) -> Term {
        Term::Pair(Box::new(l), Box::new(r), pol)
    }

    pub fn fst(t: Term, pol: Polarity) -> Term {
        Term::Fst(Box::new(t), pol)
    }

    pub fn snd(t: Term, pol: Polarity) -> Term {
        Term::Snd(Box::new(t), pol)
    }

    pub fn inl(t: Term, pol: Polarity) -> Term {
        Term::Inl(Box::new(t), pol)
    }

    pub fn inr(t: Term, pol: Polarity) -> Term {
        Term::Inr(Box::new(t), pol)
    }

    pub fn case(scrutinee: Term, left: Var, left_body: Term, right: Var, right_body: Term, pol: Polarity) -> Term {
        Term::Case {
            scrutinee: Box::new(scrutinee),
            left,
            left_body: Box::new(left_body),
            right,
            right_body: Box::new(right_body),
            pol,
        }
    }

    pub fn lam(binder: Var, body: Term, pol: Polarity) -> Term {
        Term::Lam(binder, Box::new(body), pol)
    }

    pub fn app(f: Term, a: Term, pol: Polarity) -> Term {
        Term::App(Box::new(f), Box::new(a), pol)
    }

    pub fn mpair(pos: Term, neg: Term, pol: Polarity) -> Term {
        Term::MPair(Box::new(pos), Box::new(neg), pol)
    }

    pub fn pi1(t: Term, pol: Polarity) -> Term {
        Term::Pi1(Box::new(t), pol)
    }

    pub fn pi2(t: Term, pol: Polarity) -> Term {
        Term::Pi2(Box::new(t), pol)
    }

    /// Polarity annotation of the outermost constructor.
    pub fn pol(&self) -> Polarity {
        match self {
            Term::Var(v) => v.pol,
            Term::Top => Polarity::Pos,
            Term::Bot => Polarity::Neg,
            Term::Abort(_, p)
            | Term::Pair(_, _, p)
            | Term::Fst(_, p)
            | Term::Snd(_, p)
            | Term::Inl(_, p)
            | Term::Inr(_, p)
            | Term::Case { pol: p, .. }
            | Term::Lam(_, _, p)
            | Term::App(_, _, p)
            | Term::MPair(_, _, p)
            | Term::Pi1(_, p)
            | Term::Pi2(_, p) => *p,
        }
    }

    /// Immediate subterms in path-index order.
    pub fn children(&self) -> Vec<&Term> {
        match self {
            Term::Var(_) | Term::Top | Term::Bot => vec![],
            Term::Abort(t, _)
            | Term::Fst(t, _)
            | Term::Snd(t, _)
            | Term::Inl(t, _)
            | Term::Inr(t, _)
            | Term::Lam(_, t, _)
            | Term::Pi1(t, _)
            | Term::Pi2(t, _) => vec![t],
            Term::Pair(a, b, _) | Term::App(a, b, _) | Term::MPair(a, b, _) => vec![a, b],
            Term::Case { scrutinee, left_body, right_body, .. } => vec![scrutinee, left_body, right_body],
        }
    }

    fn children_mut(&mut self) -> Vec<&mut Term> {
        match self {
            Term::Var(_) | Term::Top | Term::Bot => vec![],
            Term::Abort(t, _)
            | Term::Fst(t, _)
            | Term::Snd(t, _)
            | Term::Inl(t, _)
            | Term::Inr(t, _)
            | Term::Lam(_, t, _)
            | Term::Pi1(t, _)
            | Term::Pi2(t, _) => vec![t],
            Term::Pair(a, b, _) | Term::App(a, b, _) | Term::MPair(a, b, _) => vec![a, b],
            Term::Case { scrutinee, left_body, right_body, .. } => vec![scrutinee, left_body, right_body],
        }
    }

    /// Number of constructor nodes.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Term::size).sum::<usize>()
    }

    pub fn subterm(&self, path: &[usize]) -> Option<&Term> {
        let mut cur = self;
        for &i in path {
            cur = *cur.children().get(i)?;
        }
        Some(cur)
    }

    pub fn subterm_mut(&mut self, path: &[usize]) -> Option<&mut Term> {
        let mut cur = self;
        for &i in path {
            cur = cur.children_mut().into_iter().nth(i)?;
        }
        Some(cur)
    }

    /// Pre-order listing of every subterm together with its path.
    pub fn subterms(&self) -> Vec<(Vec<usize>, &Term)> {
        fn go<'a>(t: &'a Term, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, &'a Term)>) {
            out.push((path.clone(), t));
            for (i, c) in t.children().into_iter().enumerate() {
                path.push(i);
                go(c, path, out);
                path.pop();
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }
}

/// Assumptions (`gamma`, positive variables) and counterassumptions
/// (`delta`, negative variables).
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Basis {
    pub gamma: BTreeMap<Name, Formula>,
    pub delta: BTreeMap<Name, Formula>,
}

impl Basis {
    pub fn new() -> Basis {
        Basis::default()
    }

    pub fn side(&self, pol: Polarity) -> &BTreeMap<Name, Formula> {
        match pol {
            Polarity::Pos => &self.gamma,
            Polarity::Neg => &self.delta,
        }
    }

    pub fn side_mut(&mut self, pol: Polarity) -> &mut BTreeMap<Name, Formula> {
        match pol {
            Polarity::Pos => &mut self.gamma,
            Polarity::Neg => &mut self.delta,
        }
    }

    pub fn lookup(&self, v: &Var) -> Option<&Formula> {
        self.side(v.pol).get(v.name.as_str())
    }

    pub fn contains(&self, v: &Var) -> bool {
        self.lookup(v).is_some()
    }

    /// Adds `v : a`, replacing any previous entry for `v`.
    pub fn insert(&mut self, v: &Var, a: Formula) -> Option<Formula> {
        self.side_mut(v.pol).insert(v.name.clone(), a)
    }

    pub fn remove(&mut self, v: &Var) -> Option<Formula> {
        self.side_mut(v.pol).remove(v.name.as_str())
    }

    pub fn with(&self, v: &Var, a: Formula) -> Basis {
        let mut b = self.clone();
        b.insert(v, a);
        b
    }

    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty() && self.delta.is_empty()
    }

    pub fn len(&self) -> usize {
        self.gamma.len() + self.delta.len()
    }

    /// True if every entry of `self` appears, with the same formula, in `other`.
    pub fn is_subset_of(&self, other: &Basis) -> bool {
        let sub = |a: &BTreeMap<Name, Formula>, b: &BTreeMap<Name, Formula>| {
            a.iter().all(|(k, v)| b.get(k) == Some(v))
        };
        sub(&self.gamma, &other.gamma) && sub(&self.delta, &other.delta)
    }

    /// Union of two bases, or the first conflicting variable.
    pub fn union(&self, other: &Basis) -> Result<Basis, Var> {
        let mut out = self.clone();
        for pol in [Polarity::Pos, Polarity::Neg] {
            for (k, v) in other.side(pol) {
                match out.side(pol).get(k) {
                    Some(existing) if existing != v => {
                        return Err(Var { name: k.clone(), pol });
                    }
                    _ => {
                        out.side_mut(pol).insert(k.clone(), v.clone());
                    }
                }
            }
        }
        Ok(out)
    }

    /// All variables of the basis, positive ones first.
    pub fn vars(&self) -> impl Iterator<Item = (Var, &Formula)> {
        self.gamma
            .iter()
            .map(|(n, f)| (Var { name: n.clone(), pol: Polarity::Pos }, f))
            .chain(self.delta.iter().map(|(n, f)| (Var { name: n.clone(), pol: Polarity::Neg }, f)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("polarity mismatch: cannot substitute a {found} term for {var}")]
    PolarityMismatch { var: Var, found: Polarity },
}

/// Words the term grammar reserves; fresh names never collide with them.
pub const KEYWORDS: &[&str] = &["top", "bot", "abort", "fst", "snd", "inl", "inr", "case", "app", "p1", "p2"];

pub fn free_vars(t: &Term) -> BTreeSet<Var> {
    let mut out = BTreeSet::new();
    collect_free(t, &mut Vec::new(), &mut out);
    out
}

fn collect_free<'a>(t: &'a Term, bound: &mut Vec<&'a Var>, out: &mut BTreeSet<Var>) {
    match t {
        Term::Var(v) => {
            if !bound.contains(&v) {
                out.insert(v.clone());
            }
        }
        Term::Lam(x, body, _) => {
            bound.push(x);
            collect_free(body, bound, out);
            bound.pop();
        }
        Term::Case { scrutinee, left, left_body, right, right_body, .. } => {
            collect_free(scrutinee, bound, out);
            bound.push(left);
            collect_free(left_body, bound, out);
            bound.pop();
            bound.push(right);
            collect_free(right_body, bound, out);
            bound.pop();
        }
        _ => {
            for c in t.children() {
                collect_free(c, bound, out);
            }
        }
    }
}

pub fn occurs_free(v: &Var, t: &Term) -> bool {
    match t {
        Term::Var(w) => w == v,
        Term::Lam(x, body, _) => x != v && occurs_free(v, body),
        Term::Case { scrutinee, left, left_body, right, right_body, .. } => {
            occurs_free(v, scrutinee)
                || (left != v && occurs_free(v, left_body))
                || (right != v && occurs_free(v, right_body))
        }
        _ => t.children().into_iter().any(|c| occurs_free(v, c)),
    }
}

/// Names (of either polarity) that occur anywhere in `t`, bound or free.
pub fn all_names(t: &Term, out: &mut BTreeSet<Name>) {
    match t {
        Term::Var(v) => {
            out.insert(v.name.clone());
        }
        Term::Lam(x, _, _) => {
            out.insert(x.name.clone());
        }
        Term::Case { left, right, .. } => {
            out.insert(left.name.clone());
            out.insert(right.name.clone());
        }
        _ => {}
    }
    for c in t.children() {
        all_names(c, out);
    }
}

/// Deterministic fresh name: `base` with its trailing digits replaced by the
/// least numeric suffix `n >= 1` that is neither avoided nor a keyword.
pub fn fresh_name(base: &str, avoid: impl Fn(&str) -> bool) -> Name {
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
    let stem = if stem.is_empty() { "v" } else { stem };
    let mut n = 1u64;
    loop {
        let cand = format!("{stem}{n}");
        if !avoid(&cand) && !KEYWORDS.contains(&cand.as_str()) {
            return Name::from(cand);
        }
        n += 1;
    }
}

/// Capture-avoiding substitution `t[s/x]`.
pub fn substitute(t: &Term, x: &Var, s: &Term) -> Result<Term, SyntaxError> {
    if s.pol() != x.pol {
        return Err(SyntaxError::PolarityMismatch { var: x.clone(), found: s.pol() });
    }
    let fv = free_vars(s);
    Ok(subst(t, x, s, &fv))
}

fn subst(t: &Term, x: &Var, s: &Term, fv_s: &BTreeSet<Var>) -> Term {
    match t {
        Term::Var(v) => {
            if v == x {
                s.clone()
            } else {
                t.clone()
            }
        }
        Term::Top | Term::Bot => t.clone(),
        Term::Lam(y, body, p) => {
            let (y, body) = subst_under(y, body, x, s, fv_s);
            Term::Lam(y, Box::new(body), *p)
        }
        Term::Case { scrutinee, left, left_body, right, right_body, pol } => {
            let scrutinee = subst(scrutinee, x, s, fv_s);
            let (left, left_body) = subst_under(left, left_body, x, s, fv_s);
            let (right, right_body) = subst_under(right, right_body, x, s, fv_s);
            Term::case(scrutinee, left, left_body, right, right_body, *pol)
        }
        _ => map_children(t, |c| subst(c, x, s, fv_s)),
    }
}

/// Substitutes into the scope of binder `y`, renaming `y` if it would
/// capture a free variable of `s`.
fn subst_under(y: &Var, body: &Term, x: &Var, s: &Term, fv_s: &BTreeSet<Var>) -> (Var, Term) {
    if y == x || !occurs_free(x, body) {
        return (y.clone(), body.clone());
    }
    if fv_s.contains(y) {
        let fresh = fresh_binder(y, body, |cand| fv_s.iter().any(|v| v.name.as_str() == cand) || *x.name == *cand);
        let renamed = rename_free(body, y, &fresh);
        (fresh.clone(), subst(&renamed, x, s, fv_s))
    } else {
        (y.clone(), subst(body, x, s, fv_s))
    }
}

/// Picks a replacement for binder `y` whose name occurs nowhere in `body`
/// and is not rejected by `avoid`.
pub(crate) fn fresh_binder(y: &Var, body: &Term, avoid: impl Fn(&str) -> bool) -> Var {
    let mut names = BTreeSet::new();
    all_names(body, &mut names);
    let name = fresh_name(&y.name, |c| names.contains(c) || avoid(c));
    Var { name, pol: y.pol }
}

/// Replaces free occurrences of `from` by the variable `to`. `to` must not
/// occur in `t` at all.
pub(crate) fn rename_free(t: &Term, from: &Var, to: &Var) -> Term {
    match t {
        Term::Var(v) if v == from => Term::Var(to.clone()),
        Term::Var(_) | Term::Top | Term::Bot => t.clone(),
        Term::Lam(y, body, p) => {
            if y == from {
                t.clone()
            } else {
                Term::Lam(y.clone(), Box::new(rename_free(body, from, to)), *p)
            }
        }
        Term::Case { scrutinee, left, left_body, right, right_body, pol } => Term::case(
            rename_free(scrutinee, from, to),
            left.clone(),
            if left == from { (**left_body).clone() } else { rename_free(left_body, from, to) },
            right.clone(),
            if right == from { (**right_body).clone() } else { rename_free(right_body, from, to) },
            *pol,
        ),
        _ => map_children(t, |c| rename_free(c, from, to)),
    }
}

/// Rebuilds `t` with each child replaced by `f(child)`; binders are kept.
pub fn map_children(t: &Term, mut f: impl FnMut(&Term) -> Term) -> Term {
    match t {
        Term::Var(_) | Term::Top | Term::Bot => t.clone(),
        Term::Abort(a, p) => Term::abort(f(a), *p),
        Term::Pair(a, b, p) => Term::pair(f(a), f(b), *p),
        Term::Fst(a, p) => Term::fst(f(a), *p),
        Term::Snd(a, p) => Term::snd(f(a), *p),
        Term::Inl(a, p) => Term::inl(f(a), *p),
        Term::Inr(a, p) => Term::inr(f(a), *p),
        Term::Case { scrutinee, left, left_body, right, right_body, pol } => {
            let s = f(scrutinee);
            let l = f(left_body);
            let r = f(right_body);
            Term::case(s, left.clone(), l, right.clone(), r, *pol)
        }
        Term::Lam(x, body, p) => Term::lam(x.clone(), f(body), *p),
        Term::App(a, b, p) => Term::app(f(a), f(b), *p),
        Term::MPair(a, b, p) => Term::mpair(f(a), f(b), *p),
        Term::Pi1(a, p) => Term::pi1(f(a), *p),
        Term::Pi2(a, p) => Term::pi2(f(a), *p),
    }
}

/// Equality up to consistent renaming of bound variables.
pub fn alpha_eq(t: &Term, u: &Term) -> bool {
    alpha(t, u, &mut Vec::new())
}

fn alpha<'a>(t: &'a Term, u: &'a Term, env: &mut Vec<(&'a Var, &'a Var)>) -> bool {
    match (t, u) {
        (Term::Var(a), Term::Var(b)) => {
            let ia = env.iter().rposition(|(l, _)| *l == a);
            let ib = env.iter().rposition(|(_, r)| *r == b);
            match (ia, ib) {
                (Some(i), Some(j)) => i == j,
                (None, None) => a == b,
                _ => false,
            }
        }
        (Term::Top, Term::Top) | (Term::Bot, Term::Bot) => true,
        (Term::Lam(x, b1, p), Term::Lam(y, b2, q)) => {
            if p != q || x.pol != y.pol {
                return false;
            }
            env.push((x, y));
            let r = alpha(b1, b2, env);
            env.pop();
            r
        }
        (
            Term::Case { scrutinee: s1, left: l1, left_body: lb1, right: r1, right_body: rb1, pol: p1 },
            Term::Case { scrutinee: s2, left: l2, left_body: lb2, right: r2, right_body: rb2, pol: p2 },
        ) => {
            if p1 != p2 || l1.pol != l2.pol || r1.pol != r2.pol || !alpha(s1, s2, env) {
                return false;
            }
            env.push((l1, l2));
            let ok = alpha(lb1, lb2, env);
            env.pop();
            if !ok {
                return false;
            }
            env.push((r1, r2));
            let ok = alpha(rb1, rb2, env);
            env.pop();
            ok
        }
        (Term::Abort(a, p), Term::Abort(b, q))
        | (Term::Fst(a, p), Term::Fst(b, q))
        | (Term::Snd(a, p), Term::Snd(b, q))
        | (Term::Inl(a, p), Term::Inl(b, q))
        | (Term::Inr(a, p), Term::Inr(b, q))
        | (Term::Pi1(a, p), Term::Pi1(b, q))
        | (Term::Pi2(a, p), Term::Pi2(b, q)) => p == q && alpha(a, b, env),
        (Term::Pair(a1, a2, p), Term::Pair(b1, b2, q))
        | (Term::App(a1, a2, p), Term::App(b1, b2, q))
        | (Term::MPair(a1, a2, p), Term::MPair(b1, b2, q)) => {
            p == q && alpha(a1, b1, env) && alpha(a2, b2, env)
        }
        _ => false,
    }
}

/// Representative of the α-class of `t`: binders are renamed, in pre-order,
/// to `v0`, `v1`, ... skipping free names of `t`. Two terms are α-equal iff
/// their canonical forms are structurally equal.
pub fn canonical(t: &Term) -> Term {
    let free: BTreeSet<Name> = free_vars(t).into_iter().map(|v| v.name).collect();
    let mut counter = 0u64;
    let mut env: Vec<(Var, Var)> = Vec::new();
    canon(t, &free, &mut counter, &mut env)
}

fn canon(t: &Term, free: &BTreeSet<Name>, counter: &mut u64, env: &mut Vec<(Var, Var)>) -> Term {
    let next = |v: &Var, counter: &mut u64| loop {
        let cand = format!("v{counter}");
        *counter += 1;
        if !free.contains(cand.as_str()) {
            return Var { name: Name::from(cand), pol: v.pol };
        }
    };
    match t {
        Term::Var(v) => match env.iter().rev().find(|(from, _)| from == v) {
            Some((_, to)) => Term::Var(to.clone()),
            None => t.clone(),
        },
        Term::Lam(x, body, p) => {
            let nx = next(x, counter);
            env.push((x.clone(), nx.clone()));
            let b = canon(body, free, counter, env);
            env.pop();
            Term::lam(nx, b, *p)
        }
        Term::Case { scrutinee, left, left_body, right, right_body, pol } => {
            let s = canon(scrutinee, free, counter, env);
            let nl = next(left, counter);
            env.push((left.clone(), nl.clone()));
            let lb = canon(left_body, free, counter, env);
            env.pop();
            let nr = next(right, counter);
            env.push((right.clone(), nr.clone()));
            let rb = canon(right_body, free, counter, env);
            env.pop();
            Term::case(s, nl, lb, nr, rb, *pol)
        }
        _ => map_children(t, |c| canon(c, free, counter, env)),
    }
}

/// A broken polarity constraint, located by its path from the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarityViolation {
    pub path: Vec<usize>,
    pub message: String,
}

impl fmt::Display for PolarityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at {}: {}", crate::render_path(&self.path), self.message)
    }
}

/// Checks the polarity well-formedness constraints at every node.
pub fn check_polarities(t: &Term) -> Result<(), Vec<PolarityViolation>> {
    let mut out = Vec::new();
    for (path, node) in t.subterms() {
        if let Some(message) = local_violation(node) {
            out.push(PolarityViolation { path, message });
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// The constraint broken at the root constructor of `t`, if any.
pub(crate) fn local_violation(t: &Term) -> Option<String> {
    use Polarity::*;
    let same = |what: &str, sub: &Term, p: Polarity| {
        (sub.pol() != p).then(|| format!("{what} component has polarity {} but the whole is {p}", sub.pol()))
    };
    match t {
        Term::Var(_) | Term::Top | Term::Bot | Term::Abort(..) => None,
        Term::Pair(l, r, p) => {
            if l.pol() != *p || r.pol() != *p {
                Some(format!(
                    "pair components ({}, {}) must share the pair's polarity {p}",
                    l.pol(),
                    r.pol()
                ))
            } else {
                None
            }
        }
        Term::MPair(s, u, _) => {
            if s.pol() != Pos || u.pol() != Neg {
                Some(format!("mixed pair needs a + then a - component, found {} and {}", s.pol(), u.pol()))
            } else {
                None
            }
        }
        Term::Fst(b, p) => same("fst", b, *p),
        Term::Snd(b, p) => same("snd", b, *p),
        Term::Inl(b, p) => same("inl", b, *p),
        Term::Inr(b, p) => same("inr", b, *p),
        Term::Lam(x, b, p) => {
            if x.pol != *p {
                Some(format!("binder {x} must have the abstraction's polarity {p}"))
            } else {
                same("abstraction body", b, *p)
            }
        }
        Term::App(f, a, p) => {
            if f.pol() != *p || a.pol() != *p {
                Some(format!("application parts ({}, {}) must share the polarity {p}", f.pol(), a.pol()))
            } else {
                None
            }
        }
        Term::Pi1(_, p) => (*p != Pos).then(|| "p1 always concludes with polarity +".to_string()),
        Term::Pi2(_, p) => (*p != Neg).then(|| "p2 always concludes with polarity -".to_string()),
        Term::Case { scrutinee, left, left_body, right, right_body, pol } => {
            let sp = scrutinee.pol();
            if left.pol != sp || right.pol != sp {
                Some(format!("case binders {left}, {right} must have the scrutinee's polarity {sp}"))
            } else if left_body.pol() != *pol || right_body.pol() != *pol {
                Some(format!(
                    "case branches ({}, {}) must have the case's polarity {pol}",
                    left_body.pol(),
                    right_body.pol()
                ))
            } else {
                None
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textio::parse_term;
    use Polarity::*;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn flip_is_involutive() {
        for p in [Pos, Neg] {
            assert_eq!(p.flip().flip(), p);
            assert_ne!(p.flip(), p);
        }
    }

    #[test]
    fn free_vars_examples() {
        assert!(free_vars(&t("(\\x+. x+)+")).is_empty());
        let fv = free_vars(&t("app+(x+, y+)"));
        assert_eq!(fv, [Var::pos("x"), Var::pos("y")].into_iter().collect());
        let fv = free_vars(&t("case z- {x-. x- | y-. w-}-"));
        assert_eq!(fv, [Var::neg("z"), Var::neg("w")].into_iter().collect());
    }

    #[test]
    fn substitution_examples() {
        let r = substitute(&t("app+(x+, y+)"), &Var::pos("x"), &t("(\\z+. z+)+")).unwrap();
        assert_eq!(r, t("app+((\\z+. z+)+, y+)"));

        // capture: the binder y is renamed
        let r = substitute(&t("(\\y+. x+)+"), &Var::pos("x"), &t("y+")).unwrap();
        match &r {
            Term::Lam(b, body, Pos) => {
                assert_ne!(b.name.as_str(), "y");
                assert_eq!(**body, t("y+"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(alpha_eq(&r, &t("(\\q+. y+)+")));

        let r = substitute(&t("x-"), &Var::pos("x"), &Term::Top).unwrap();
        assert_eq!(r, t("x-"));
    }

    #[test]
    fn substitution_rejects_polarity_mismatch() {
        let err = substitute(&t("x+"), &Var::pos("x"), &Term::Bot).unwrap_err();
        assert!(matches!(err, SyntaxError::PolarityMismatch { .. }));
    }

    #[test]
    fn substitution_stops_at_shadowing_binder() {
        let r = substitute(&t("(\\x+. x+)+"), &Var::pos("x"), &Term::Top).unwrap();
        assert_eq!(r, t("(\\x+. x+)+"));
        let r = substitute(&t("case z+ {x+. x+ | y+. x+}+"), &Var::pos("x"), &Term::Top).unwrap();
        assert_eq!(r, t("case z+ {x+. x+ | y+. top+}+"));
    }

    #[test]
    fn capture_in_case_branch_is_avoided() {
        let r = substitute(&t("case z+ {y+. x+ | w+. w+}+"), &Var::pos("x"), &t("y+")).unwrap();
        assert!(alpha_eq(&r, &t("case z+ {q+. y+ | w+. w+}+")));
        assert!(free_vars(&r).contains(&Var::pos("y")));
    }

    #[test]
    fn fresh_names_skip_keywords() {
        let n = fresh_name("p", |_| false);
        assert_eq!(n.as_str(), "p3");
        let n = fresh_name("y", |c| c == "y1");
        assert_eq!(n.as_str(), "y2");
    }

    #[test]
    fn alpha_examples() {
        assert!(alpha_eq(&t("(\\x+. x+)+"), &t("(\\y+. y+)+")));
        assert!(!alpha_eq(&t("(\\x+. x+)+"), &t("(\\x-. x-)-")));
        assert!(!alpha_eq(&t("x+"), &t("y+")));
        // a bound variable never matches a free one with the same name
        assert!(!alpha_eq(&t("(\\x+. y+)+"), &t("(\\y+. y+)+")));
        assert!(alpha_eq(&t("case z+ {x+. x+ | y+. y+}+"), &t("case z+ {a+. a+ | a+. a+}+")));
    }

    #[test]
    fn canonical_agrees_with_alpha() {
        let a = t("(\\x+. (\\y+. app+(x+, y+))+)+");
        let b = t("(\\p+. (\\q+. app+(p+, q+))+)+");
        assert_eq!(canonical(&a), canonical(&b));
        let c = t("(\\v0+. app+(v0+, v1+))+");
        // free v1 must not be captured by canonical naming
        assert_eq!(free_vars(&canonical(&c)), free_vars(&c));
    }

    #[test]
    fn polarity_examples() {
        let bad = Term::pair(Term::Top, Term::Bot, Pos);
        let v = check_polarities(&bad).unwrap_err();
        assert_eq!(v[0].path, Vec::<usize>::new());

        assert!(check_polarities(&Term::mpair(Term::Top, Term::Bot, Neg)).is_ok());

        let v = check_polarities(&Term::pi1(Term::var("x", Neg), Neg)).unwrap_err();
        assert_eq!(v.len(), 1);
    }

    #[test]
    fn polarity_violations_carry_paths() {
        let bad = Term::lam(Var::pos("x"), Term::app(Term::var("x", Pos), Term::Bot, Pos), Pos);
        let v = check_polarities(&bad).unwrap_err();
        assert_eq!(v[0].path, vec![0]);
    }

    #[test]
    fn basis_subset_and_union() {
        let mut a = Basis::new();
        a.insert(&Var::pos("x"), Formula::atom("a"));
        let mut b = a.clone();
        b.insert(&Var::neg("x"), Formula::atom("b"));
        assert!(a.is_subset_of(&b));
        assert!(!b.is_subset_of(&a));
        assert_eq!(a.union(&b).unwrap(), b);
        let mut c = Basis::new();
        c.insert(&Var::pos("x"), Formula::Verum);
        assert_eq!(a.union(&c).unwrap_err(), Var::pos("x"));
    }
}
