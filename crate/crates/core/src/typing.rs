//! Curry-style type assignment.
//!
//! Inference walks the term once; each constructor, together with its
//! polarity, selects exactly one rule and contributes that rule's equations
//! between formula metavariables. Checking reuses the same walk against a
//! ground basis and materialises the result as an explicit [`Derivation`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::derivation::{Derivation, Judgment, Rule};
use crate::syntax::{all_names, check_polarities, fresh_name, Basis, Formula, Polarity, PolarityViolation, Term, Var};

/// Finite map from metavariables to formulas, kept idempotent.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    map: BTreeMap<u32, Formula>,
}

impl Substitution {
    pub fn get(&self, meta: u32) -> Option<&Formula> {
        self.map.get(&meta)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&u32, &Formula)> {
        self.map.iter()
    }

    pub fn apply(&self, f: &Formula) -> Formula {
        apply_map(f, &|m| self.map.get(&m).cloned())
    }
}

fn apply_map(f: &Formula, lookup: &impl Fn(u32) -> Option<Formula>) -> Formula {
    match f {
        Formula::Meta(m) => lookup(*m).unwrap_or_else(|| f.clone()),
        Formula::Atom(_) | Formula::Falsum | Formula::Verum => f.clone(),
        Formula::And(a, b) => Formula::and(apply_map(a, lookup), apply_map(b, lookup)),
        Formula::Or(a, b) => Formula::or(apply_map(a, lookup), apply_map(b, lookup)),
        Formula::Imp(a, b) => Formula::imp(apply_map(a, lookup), apply_map(b, lookup)),
        Formula::CoImp(a, b) => Formula::coimp(apply_map(a, lookup), apply_map(b, lookup)),
    }
}

fn metas(f: &Formula, out: &mut Vec<u32>) {
    match f {
        Formula::Meta(m) => {
            if !out.contains(m) {
                out.push(*m);
            }
        }
        Formula::Atom(_) | Formula::Falsum | Formula::Verum => {}
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) | Formula::CoImp(a, b) => {
            metas(a, out);
            metas(b, out);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnifyError {
    #[error("cannot unify `{0}` with `{1}`")]
    Clash(Formula, Formula),
    #[error("occurs check: {m} occurs in `{f}`", m = crate::textio::meta_name(*.0), f = .1)]
    OccursCheck(u32, Formula),
}

/// Triangular unifier used by inference.
#[derive(Debug, Default)]
struct Unifier {
    bindings: BTreeMap<u32, Formula>,
    next: u32,
}

impl Unifier {
    fn starting_after(fs: &[&Formula]) -> Unifier {
        let mut ms = Vec::new();
        for f in fs {
            metas(f, &mut ms);
        }
        Unifier { bindings: BTreeMap::new(), next: ms.into_iter().max().map_or(0, |m| m + 1) }
    }

    fn fresh(&mut self) -> Formula {
        let m = self.next;
        self.next += 1;
        Formula::Meta(m)
    }

    fn shallow(&self, f: &Formula) -> Formula {
        let mut cur = f.clone();
        while let Formula::Meta(m) = cur {
            match self.bindings.get(&m) {
                Some(next) => cur = next.clone(),
                None => break,
            }
        }
        cur
    }

    fn resolve(&self, f: &Formula) -> Formula {
        match self.shallow(f) {
            Formula::And(a, b) => Formula::and(self.resolve(&a), self.resolve(&b)),
            Formula::Or(a, b) => Formula::or(self.resolve(&a), self.resolve(&b)),
            Formula::Imp(a, b) => Formula::imp(self.resolve(&a), self.resolve(&b)),
            Formula::CoImp(a, b) => Formula::coimp(self.resolve(&a), self.resolve(&b)),
            other => other,
        }
    }

    fn occurs(&self, m: u32, f: &Formula) -> bool {
        match self.shallow(f) {
            Formula::Meta(n) => n == m,
            Formula::Atom(_) | Formula::Falsum | Formula::Verum => false,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) | Formula::CoImp(a, b) => {
                self.occurs(m, &a) || self.occurs(m, &b)
            }
        }
    }

    fn unify(&mut self, a: &Formula, b: &Formula) -> Result<(), UnifyError> {
        let (a, b) = (self.shallow(a), self.shallow(b));
        match (&a, &b) {
            (Formula::Meta(m), Formula::Meta(n)) if m == n => Ok(()),
            (Formula::Meta(m), other) | (other, Formula::Meta(m)) => {
                if self.occurs(*m, other) {
                    return Err(UnifyError::OccursCheck(*m, self.resolve(other)));
                }
                self.bindings.insert(*m, other.clone());
                Ok(())
            }
            (Formula::Atom(x), Formula::Atom(y)) if x == y => Ok(()),
            (Formula::Falsum, Formula::Falsum) | (Formula::Verum, Formula::Verum) => Ok(()),
            (Formula::And(a1, a2), Formula::And(b1, b2))
            | (Formula::Or(a1, a2), Formula::Or(b1, b2))
            | (Formula::Imp(a1, a2), Formula::Imp(b1, b2))
            | (Formula::CoImp(a1, a2), Formula::CoImp(b1, b2)) => {
                self.unify(a1, b1)?;
                self.unify(a2, b2)
            }
            _ => Err(UnifyError::Clash(self.resolve(&a), self.resolve(&b))),
        }
    }

    fn into_substitution(self) -> Substitution {
        let map = self.bindings.keys().map(|&m| (m, self.resolve(&Formula::Meta(m)))).collect();
        Substitution { map }
    }
}

/// Most general unifier of `a` and `b`.
pub fn unify(a: &Formula, b: &Formula) -> Result<Substitution, UnifyError> {
    let mut u = Unifier::starting_after(&[a, b]);
    u.unify(a, b)?;
    Ok(u.into_substitution())
}

/// One-way matching: a substitution `s` of the metavariables of `pattern`
/// with `s(pattern) == target`, treating metavariables of `target` as
/// constants.
pub fn match_formula(pattern: &Formula, target: &Formula, s: &mut BTreeMap<u32, Formula>) -> bool {
    match (pattern, target) {
        (Formula::Meta(m), _) => match s.get(m) {
            Some(bound) => bound == target,
            None => {
                s.insert(*m, target.clone());
                true
            }
        },
        (Formula::Atom(x), Formula::Atom(y)) => x == y,
        (Formula::Falsum, Formula::Falsum) | (Formula::Verum, Formula::Verum) => true,
        (Formula::And(a1, a2), Formula::And(b1, b2))
        | (Formula::Or(a1, a2), Formula::Or(b1, b2))
        | (Formula::Imp(a1, a2), Formula::Imp(b1, b2))
        | (Formula::CoImp(a1, a2), Formula::CoImp(b1, b2)) => {
            match_formula(a1, b1, s) && match_formula(a2, b2, s)
        }
        _ => false,
    }
}

/// A formula over metavariables, compared up to renaming of those
/// metavariables. Construction renumbers them in order of first occurrence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeScheme {
    pub vars: Vec<u32>,
    pub body: Formula,
}

impl TypeScheme {
    pub fn new(body: &Formula) -> TypeScheme {
        let mut ms = Vec::new();
        metas(body, &mut ms);
        let renaming: BTreeMap<u32, u32> = ms.iter().enumerate().map(|(i, m)| (*m, i as u32)).collect();
        let body = apply_map(body, &|m| renaming.get(&m).map(|i| Formula::Meta(*i)));
        TypeScheme { vars: (0..ms.len() as u32).collect(), body }
    }

    /// True if `f` is obtained from the scheme by instantiating its variables.
    pub fn has_instance(&self, f: &Formula) -> bool {
        match_formula(&self.body, f, &mut BTreeMap::new())
    }
}

impl fmt::Display for TypeScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.body)
    }
}

/// Principal basis, polarity and type of a term.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrincipalTyping {
    pub basis: Basis,
    pub pol: Polarity,
    pub ty: Formula,
}

impl PrincipalTyping {
    pub fn scheme(&self) -> TypeScheme {
        TypeScheme::new(&self.ty)
    }

    /// Renumbers metavariables by first occurrence: type first, then the
    /// positive and negative basis entries in name order.
    fn canonicalize(self) -> PrincipalTyping {
        let mut ms = Vec::new();
        metas(&self.ty, &mut ms);
        for (_, f) in self.basis.vars() {
            metas(f, &mut ms);
        }
        let renaming: BTreeMap<u32, u32> = ms.iter().enumerate().map(|(i, m)| (*m, i as u32)).collect();
        let ren = |f: &Formula| apply_map(f, &|m| renaming.get(&m).map(|i| Formula::Meta(*i)));
        let mut basis = Basis::new();
        for (v, f) in self.basis.vars() {
            basis.insert(&v, ren(f));
        }
        PrincipalTyping { basis, pol: self.pol, ty: ren(&self.ty) }
    }

    /// Whether `(basis, pol, ty)` is an instance of this typing, i.e. one
    /// substitution maps the principal type to `ty` and every principal
    /// basis entry to the corresponding entry of `basis`.
    pub fn has_instance(&self, basis: &Basis, pol: Polarity, ty: &Formula) -> bool {
        if pol != self.pol {
            return false;
        }
        let mut s = BTreeMap::new();
        if !match_formula(&self.ty, ty, &mut s) {
            return false;
        }
        self.basis.vars().all(|(v, f)| match basis.lookup(&v) {
            Some(g) => match_formula(f, g, &mut s),
            None => false,
        })
    }
}

impl fmt::Display for PrincipalTyping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} =>{} : {}", self.basis, self.pol, self.ty)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("term is not polarity well-formed: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    IllFormed(Vec<PolarityViolation>),
    #[error("untypable at {}: {reason}", crate::render_path(path))]
    Untypable { reason: UnifyError, path: Vec<usize> },
    #[error("unbound variable {var} at {}", crate::render_path(path))]
    UnboundVariable { var: Var, path: Vec<usize> },
    #[error("type mismatch: the term has type `{found}`, which does not match `{expected}`")]
    TypeMismatch { expected: Formula, found: Formula },
    #[error("polarity mismatch: the term has polarity {found}, not {expected}")]
    PolarityMismatch { expected: Polarity, found: Polarity },
    #[error("checking needs ground formulas, found metavariables in `{0}`")]
    NotGround(Formula),
}

/// Types assigned to every node during one inference pass.
struct Typed {
    ty: Formula,
    binders: Vec<Formula>,
    children: Vec<Typed>,
}

enum FreeVars<'a> {
    Ground(&'a Basis),
    Open(BTreeMap<Var, Formula>),
}

struct Engine<'a> {
    u: Unifier,
    free: FreeVars<'a>,
    scope: Vec<(Var, Formula)>,
    path: Vec<usize>,
}

impl Engine<'_> {
    fn eq(&mut self, a: &Formula, b: &Formula) -> Result<(), TypeError> {
        self.u.unify(a, b).map_err(|reason| TypeError::Untypable { reason, path: self.path.clone() })
    }

    fn child(&mut self, i: usize, t: &Term) -> Result<Typed, TypeError> {
        self.path.push(i);
        let r = self.infer(t);
        self.path.pop();
        r
    }

    fn bound_child(&mut self, i: usize, x: &Var, ty: Formula, t: &Term) -> Result<Typed, TypeError> {
        self.scope.push((x.clone(), ty));
        let r = self.child(i, t);
        self.scope.pop();
        r
    }

    fn lookup(&mut self, v: &Var) -> Result<Formula, TypeError> {
        if let Some((_, f)) = self.scope.iter().rev().find(|(w, _)| w == v) {
            return Ok(f.clone());
        }
        match &mut self.free {
            FreeVars::Ground(b) => b
                .lookup(v)
                .cloned()
                .ok_or_else(|| TypeError::UnboundVariable { var: v.clone(), path: self.path.clone() }),
            FreeVars::Open(map) => {
                if let Some(f) = map.get(v) {
                    return Ok(f.clone());
                }
                let f = self.u.fresh();
                map.insert(v.clone(), f.clone());
                Ok(f)
            }
        }
    }

    fn infer(&mut self, t: &Term) -> Result<Typed, TypeError> {
        use Polarity::*;
        let leaf = |ty: Formula| Typed { ty, binders: vec![], children: vec![] };
        match t {
            Term::Var(v) => Ok(leaf(self.lookup(v)?)),
            Term::Top => Ok(leaf(Formula::Verum)),
            Term::Bot => Ok(leaf(Formula::Falsum)),
            Term::Abort(b, _) => {
                let tb = self.child(0, b)?;
                let want = if b.pol() == Pos { Formula::Falsum } else { Formula::Verum };
                self.eq(&tb.ty, &want)?;
                let ty = self.u.fresh();
                Ok(Typed { ty, binders: vec![], children: vec![tb] })
            }
            Term::Pair(l, r, p) => {
                let tl = self.child(0, l)?;
                let tr = self.child(1, r)?;
                let ty = match p {
                    Pos => Formula::and(tl.ty.clone(), tr.ty.clone()),
                    Neg => Formula::or(tl.ty.clone(), tr.ty.clone()),
                };
                Ok(Typed { ty, binders: vec![], children: vec![tl, tr] })
            }
            Term::Fst(b, p) | Term::Snd(b, p) => {
                let tb = self.child(0, b)?;
                let (a, c) = (self.u.fresh(), self.u.fresh());
                let shape = match p {
                    Pos => Formula::and(a.clone(), c.clone()),
                    Neg => Formula::or(a.clone(), c.clone()),
                };
                self.eq(&tb.ty, &shape)?;
                let ty = if matches!(t, Term::Fst(..)) { a } else { c };
                Ok(Typed { ty, binders: vec![], children: vec![tb] })
            }
            Term::Inl(b, p) | Term::Inr(b, p) => {
                let tb = self.child(0, b)?;
                let other = self.u.fresh();
                let (l, r) = if matches!(t, Term::Inl(..)) { (tb.ty.clone(), other) } else { (other, tb.ty.clone()) };
                let ty = match p {
                    Pos => Formula::or(l, r),
                    Neg => Formula::and(l, r),
                };
                Ok(Typed { ty, binders: vec![], children: vec![tb] })
            }
            Term::Case { scrutinee, left, left_body, right, right_body, .. } => {
                let ts = self.child(0, scrutinee)?;
                let (a, b) = (self.u.fresh(), self.u.fresh());
                let shape = match scrutinee.pol() {
                    Pos => Formula::or(a.clone(), b.clone()),
                    Neg => Formula::and(a.clone(), b.clone()),
                };
                self.eq(&ts.ty, &shape)?;
                let tl = self.bound_child(1, left, a.clone(), left_body)?;
                let tr = self.bound_child(2, right, b.clone(), right_body)?;
                self.path.push(2);
                let r = self.eq(&tl.ty, &tr.ty);
                self.path.pop();
                r?;
                Ok(Typed { ty: tl.ty.clone(), binders: vec![a, b], children: vec![ts, tl, tr] })
            }
            Term::Lam(x, body, p) => {
                let a = self.u.fresh();
                let tb = self.bound_child(0, x, a.clone(), body)?;
                let ty = match p {
                    Pos => Formula::imp(a.clone(), tb.ty.clone()),
                    Neg => Formula::coimp(tb.ty.clone(), a.clone()),
                };
                Ok(Typed { ty, binders: vec![a], children: vec![tb] })
            }
            Term::App(f, a, p) => {
                let tf = self.child(0, f)?;
                let ta = self.child(1, a)?;
                let res = self.u.fresh();
                let shape = match p {
                    Pos => Formula::imp(ta.ty.clone(), res.clone()),
                    Neg => Formula::coimp(res.clone(), ta.ty.clone()),
                };
                self.eq(&tf.ty, &shape)?;
                Ok(Typed { ty: res, binders: vec![], children: vec![tf, ta] })
            }
            Term::MPair(s, u, p) => {
                let ts = self.child(0, s)?;
                let tu = self.child(1, u)?;
                let ty = match p {
                    Neg => Formula::imp(ts.ty.clone(), tu.ty.clone()),
                    Pos => Formula::coimp(ts.ty.clone(), tu.ty.clone()),
                };
                Ok(Typed { ty, binders: vec![], children: vec![ts, tu] })
            }
            Term::Pi1(b, _) | Term::Pi2(b, _) => {
                let tb = self.child(0, b)?;
                let (l, r) = (self.u.fresh(), self.u.fresh());
                let shape = match b.pol() {
                    Neg => Formula::imp(l.clone(), r.clone()),
                    Pos => Formula::coimp(l.clone(), r.clone()),
                };
                self.eq(&tb.ty, &shape)?;
                let ty = if matches!(t, Term::Pi1(..)) { l } else { r };
                Ok(Typed { ty, binders: vec![], children: vec![tb] })
            }
        }
    }
}

/// Principal typing of `t`: the most general basis and type under which
/// it is derivable.
pub fn infer_principal(t: &Term) -> Result<PrincipalTyping, TypeError> {
    check_polarities(t).map_err(TypeError::IllFormed)?;
    let mut e = Engine { u: Unifier::default(), free: FreeVars::Open(BTreeMap::new()), scope: vec![], path: vec![] };
    let typed = e.infer(t)?;
    let FreeVars::Open(free) = &e.free else { unreachable!() };
    let mut basis = Basis::new();
    for (v, f) in free {
        basis.insert(v, e.u.resolve(f));
    }
    Ok(PrincipalTyping { basis, pol: t.pol(), ty: e.u.resolve(&typed.ty) }.canonicalize())
}

/// Renames binders that would shadow a variable already in scope (the
/// basis or an enclosing binder), so every discharge removes a fresh
/// variable. The result is α-equal to `t`.
pub fn freshen_binders(t: &Term, basis: &Basis) -> Term {
    let mut taken: BTreeSet<String> = basis.vars().map(|(v, _)| v.name.to_string()).collect();
    let mut names = BTreeSet::new();
    all_names(t, &mut names);
    taken.extend(names.iter().map(|n| n.to_string()));
    let scope: Vec<Var> = basis.vars().map(|(v, _)| v).collect();
    freshen(t, &mut scope.clone(), &mut taken)
}

fn freshen(t: &Term, scope: &mut Vec<Var>, taken: &mut BTreeSet<String>) -> Term {
    let pick = |x: &Var, scope: &Vec<Var>, taken: &mut BTreeSet<String>| -> Var {
        if scope.contains(x) {
            let name = fresh_name(&x.name, |c| taken.contains(c));
            taken.insert(name.to_string());
            Var { name, pol: x.pol }
        } else {
            x.clone()
        }
    };
    match t {
        Term::Lam(x, body, p) => {
            let nx = pick(x, scope, taken);
            let body = if nx != *x { crate::syntax::rename_free(body, x, &nx) } else { (**body).clone() };
            scope.push(nx.clone());
            let b = freshen(&body, scope, taken);
            scope.pop();
            Term::lam(nx, b, *p)
        }
        Term::Case { scrutinee, left, left_body, right, right_body, pol } => {
            let s = freshen(scrutinee, scope, taken);
            let nl = pick(left, scope, taken);
            let lb = if nl != *left { crate::syntax::rename_free(left_body, left, &nl) } else { (**left_body).clone() };
            scope.push(nl.clone());
            let lb = freshen(&lb, scope, taken);
            scope.pop();
            let nr = pick(right, scope, taken);
            let rb =
                if nr != *right { crate::syntax::rename_free(right_body, right, &nr) } else { (**right_body).clone() };
            scope.push(nr.clone());
            let rb = freshen(&rb, scope, taken);
            scope.pop();
            Term::case(s, nl, lb, nr, rb, *pol)
        }
        _ => crate::syntax::map_children(t, |c| freshen(c, scope, taken)),
    }
}

/// Checks `basis =>pol t : a` and returns the derivation.
///
/// Every premise receives the whole basis. Binders that clash with the
/// basis are renamed first, so the end-term of the result is α-equal
/// (not always identical) to `t`. Metavariables left open by the term,
/// e.g. the unused summand of an injection under a projection, are
/// instantiated with `top`.
pub fn check(basis: &Basis, pol: Polarity, t: &Term, a: &Formula) -> Result<Derivation, TypeError> {
    if !a.is_ground() {
        return Err(TypeError::NotGround(a.clone()));
    }
    if let Some((_, f)) = basis.vars().find(|(_, f)| !f.is_ground()) {
        return Err(TypeError::NotGround(f.clone()));
    }
    check_polarities(t).map_err(TypeError::IllFormed)?;
    if t.pol() != pol {
        return Err(TypeError::PolarityMismatch { expected: pol, found: t.pol() });
    }
    let t = freshen_binders(t, basis);
    let mut e = Engine { u: Unifier::default(), free: FreeVars::Ground(basis), scope: vec![], path: vec![] };
    let typed = e.infer(&t)?;
    if e.u.unify(&typed.ty, a).is_err() {
        return Err(TypeError::TypeMismatch { expected: a.clone(), found: e.u.resolve(&typed.ty) });
    }
    let u = e.u;
    let ground = |f: &Formula| {
        let r = u.resolve(f);
        apply_map(&r, &|_| Some(Formula::Verum))
    };
    Ok(build(basis, &t, &typed, &ground))
}

fn build(basis: &Basis, t: &Term, typed: &Typed, ground: &impl Fn(&Formula) -> Formula) -> Derivation {
    let concl = Judgment { basis: basis.clone(), pol: t.pol(), term: t.clone(), ty: ground(&typed.ty) };
    let kids = t.children();
    let prems = match t {
        Term::Lam(x, body, _) => {
            vec![build(&basis.with(x, ground(&typed.binders[0])), body, &typed.children[0], ground)]
        }
        Term::Case { scrutinee, left, left_body, right, right_body, .. } => vec![
            build(basis, scrutinee, &typed.children[0], ground),
            build(&basis.with(left, ground(&typed.binders[0])), left_body, &typed.children[1], ground),
            build(&basis.with(right, ground(&typed.binders[1])), right_body, &typed.children[2], ground),
        ],
        _ => kids.iter().zip(&typed.children).map(|(k, tk)| build(basis, k, tk, ground)).collect(),
    };
    Derivation { rule: Rule::for_term(t), concl, prems }
}

/// Checks the conclusion of an existing judgment.
pub fn check_judgment(j: &Judgment) -> Result<Derivation, TypeError> {
    check(&j.basis, j.pol, &j.term, &j.ty)
}
