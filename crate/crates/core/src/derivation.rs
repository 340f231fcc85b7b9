//! Explicit derivation trees and their rule-by-rule validation.

use std::fmt;
use std::str::FromStr;

use crate::syntax::{Basis, Formula, Polarity, Term, Var};

/// Inference rules: the 26 logical rules plus the two assumption leaves.
///
/// `_d` marks a dual-proof rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    HypPos,
    HypNeg,
    BotId,
    BotE,
    TopI,
    TopEd,
    AndI,
    AndE1,
    AndE2,
    AndId1,
    AndId2,
    AndEd,
    OrI1,
    OrI2,
    OrE,
    OrId,
    OrEd1,
    OrEd2,
    ImpI,
    ImpE,
    ImpId,
    ImpEd1,
    ImpEd2,
    CoImpI,
    CoImpE1,
    CoImpE2,
    CoImpId,
    CoImpEd,
}

/// Rule pairs exchanged by the duality map.
pub const DUAL_RULES: [(Rule, Rule); 14] = [
    (Rule::HypPos, Rule::HypNeg),
    (Rule::TopI, Rule::BotId),
    (Rule::BotE, Rule::TopEd),
    (Rule::AndI, Rule::OrId),
    (Rule::AndE1, Rule::OrEd1),
    (Rule::AndE2, Rule::OrEd2),
    (Rule::AndId1, Rule::OrI1),
    (Rule::AndId2, Rule::OrI2),
    (Rule::AndEd, Rule::OrE),
    (Rule::ImpI, Rule::CoImpId),
    (Rule::ImpE, Rule::CoImpEd),
    (Rule::ImpId, Rule::CoImpI),
    (Rule::ImpEd1, Rule::CoImpE2),
    (Rule::ImpEd2, Rule::CoImpE1),
];

impl Rule {
    pub const ALL: [Rule; 28] = [
        Rule::HypPos,
        Rule::HypNeg,
        Rule::BotId,
        Rule::BotE,
        Rule::TopI,
        Rule::TopEd,
        Rule::AndI,
        Rule::AndE1,
        Rule::AndE2,
        Rule::AndId1,
        Rule::AndId2,
        Rule::AndEd,
        Rule::OrI1,
        Rule::OrI2,
        Rule::OrE,
        Rule::OrId,
        Rule::OrEd1,
        Rule::OrEd2,
        Rule::ImpI,
        Rule::ImpE,
        Rule::ImpId,
        Rule::ImpEd1,
        Rule::ImpEd2,
        Rule::CoImpI,
        Rule::CoImpE1,
        Rule::CoImpE2,
        Rule::CoImpId,
        Rule::CoImpEd,
    ];

    /// The 26 logical rules (everything but the assumption leaves).
    pub fn logical() -> impl Iterator<Item = Rule> {
        Rule::ALL.into_iter().filter(|r| !r.is_hyp())
    }

    pub fn name(self) -> &'static str {
        match self {
            Rule::HypPos => "Hyp+",
            Rule::HypNeg => "Hyp-",
            Rule::BotId => "BotI_d",
            Rule::BotE => "BotE",
            Rule::TopI => "TopI",
            Rule::TopEd => "TopE_d",
            Rule::AndI => "AndI",
            Rule::AndE1 => "AndE1",
            Rule::AndE2 => "AndE2",
            Rule::AndId1 => "AndI_d1",
            Rule::AndId2 => "AndI_d2",
            Rule::AndEd => "AndE_d",
            Rule::OrI1 => "OrI1",
            Rule::OrI2 => "OrI2",
            Rule::OrE => "OrE",
            Rule::OrId => "OrI_d",
            Rule::OrEd1 => "OrE_d1",
            Rule::OrEd2 => "OrE_d2",
            Rule::ImpI => "ImpI",
            Rule::ImpE => "ImpE",
            Rule::ImpId => "ImpI_d",
            Rule::ImpEd1 => "ImpE_d1",
            Rule::ImpEd2 => "ImpE_d2",
            Rule::CoImpI => "CoImpI",
            Rule::CoImpE1 => "CoImpE1",
            Rule::CoImpE2 => "CoImpE2",
            Rule::CoImpId => "CoImpI_d",
            Rule::CoImpEd => "CoImpE_d",
        }
    }

    pub fn is_hyp(self) -> bool {
        matches!(self, Rule::HypPos | Rule::HypNeg)
    }

    pub fn arity(self) -> usize {
        match self {
            Rule::HypPos | Rule::HypNeg | Rule::TopI | Rule::BotId => 0,
            Rule::AndI | Rule::OrId | Rule::ImpE | Rule::CoImpEd | Rule::ImpId | Rule::CoImpI => 2,
            Rule::OrE | Rule::AndEd => 3,
            _ => 1,
        }
    }

    /// Polarity of the conclusion, when the rule fixes it. Abort and case
    /// rules conclude at either polarity.
    pub fn concl_pol(self) -> Option<Polarity> {
        use Polarity::*;
        match self {
            Rule::BotE | Rule::TopEd | Rule::OrE | Rule::AndEd => None,
            Rule::HypPos
            | Rule::TopI
            | Rule::AndI
            | Rule::AndE1
            | Rule::AndE2
            | Rule::OrI1
            | Rule::OrI2
            | Rule::ImpI
            | Rule::ImpE
            | Rule::ImpEd1
            | Rule::CoImpI
            | Rule::CoImpE1 => Some(Pos),
            _ => Some(Neg),
        }
    }

    pub fn dual(self) -> Rule {
        DUAL_RULES
            .iter()
            .find_map(|&(a, b)| {
                if a == self {
                    Some(b)
                } else if b == self {
                    Some(a)
                } else {
                    None
                }
            })
            .expect("every rule has a dual")
    }

    /// The unique rule whose conclusion has the shape of `t`.
    pub fn for_term(t: &Term) -> Rule {
        use Polarity::*;
        match t {
            Term::Var(v) => match v.pol {
                Pos => Rule::HypPos,
                Neg => Rule::HypNeg,
            },
            Term::Top => Rule::TopI,
            Term::Bot => Rule::BotId,
            Term::Abort(b, _) => match b.pol() {
                Pos => Rule::BotE,
                Neg => Rule::TopEd,
            },
            Term::Pair(_, _, Pos) => Rule::AndI,
            Term::Pair(_, _, Neg) => Rule::OrId,
            Term::Fst(_, Pos) => Rule::AndE1,
            Term::Fst(_, Neg) => Rule::OrEd1,
            Term::Snd(_, Pos) => Rule::AndE2,
            Term::Snd(_, Neg) => Rule::OrEd2,
            Term::Inl(_, Pos) => Rule::OrI1,
            Term::Inl(_, Neg) => Rule::AndId1,
            Term::Inr(_, Pos) => Rule::OrI2,
            Term::Inr(_, Neg) => Rule::AndId2,
            Term::Case { scrutinee, .. } => match scrutinee.pol() {
                Pos => Rule::OrE,
                Neg => Rule::AndEd,
            },
            Term::Lam(_, _, Pos) => Rule::ImpI,
            Term::Lam(_, _, Neg) => Rule::CoImpId,
            Term::App(_, _, Pos) => Rule::ImpE,
            Term::App(_, _, Neg) => Rule::CoImpEd,
            Term::MPair(_, _, Neg) => Rule::ImpId,
            Term::MPair(_, _, Pos) => Rule::CoImpI,
            Term::Pi1(b, _) => match b.pol() {
                Neg => Rule::ImpEd1,
                Pos => Rule::CoImpE1,
            },
            Term::Pi2(b, _) => match b.pol() {
                Neg => Rule::ImpEd2,
                Pos => Rule::CoImpE2,
            },
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownRule(pub String);

impl FromStr for Rule {
    type Err = UnknownRule;
    fn from_str(s: &str) -> Result<Rule, UnknownRule> {
        Rule::ALL.into_iter().find(|r| r.name() == s).ok_or_else(|| UnknownRule(s.to_string()))
    }
}

/// `basis =>pol term : ty`
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Judgment {
    pub basis: Basis,
    pub pol: Polarity,
    pub term: Term,
    pub ty: Formula,
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} =>{} {} : {}", self.basis, self.pol, self.term, self.ty)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Derivation {
    pub rule: Rule,
    pub concl: Judgment,
    pub prems: Vec<Derivation>,
}

/// Path of premise indices from the root node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub path: Vec<usize>,
    pub rule: Rule,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at {} ({}): {}", crate::render_path(&self.path), self.rule, self.message)
    }
}

impl Derivation {
    pub fn leaf(rule: Rule, concl: Judgment) -> Derivation {
        Derivation { rule, concl, prems: Vec::new() }
    }

    /// Assumptions have height 0; every rule application adds one.
    pub fn height(&self) -> usize {
        if self.rule.is_hyp() {
            0
        } else {
            1 + self.prems.iter().map(Derivation::height).max().unwrap_or(0)
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self.prems.iter().map(Derivation::node_count).sum::<usize>()
    }

    /// Breadth-first walk over all nodes, root first.
    pub fn nodes(&self) -> Vec<&Derivation> {
        let mut out = vec![self];
        let mut i = 0;
        while i < out.len() {
            let cur = out[i];
            out.extend(cur.prems.iter());
            i += 1;
        }
        out
    }

    /// Checks that every node instantiates its rule schema.
    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let mut out = Vec::new();
        validate_node(self, &mut Vec::new(), &mut out);
        if out.is_empty() {
            Ok(())
        } else {
            Err(out)
        }
    }

    /// Structural equality with terms compared up to α.
    pub fn alpha_eq(&self, other: &Derivation) -> bool {
        self.rule == other.rule
            && self.concl.basis == other.concl.basis
            && self.concl.pol == other.concl.pol
            && self.concl.ty == other.concl.ty
            && crate::syntax::alpha_eq(&self.concl.term, &other.concl.term)
            && self.prems.len() == other.prems.len()
            && self.prems.iter().zip(&other.prems).all(|(a, b)| a.alpha_eq(b))
    }
}

pub fn height(d: &Derivation) -> usize {
    d.height()
}

pub fn validate(d: &Derivation) -> Result<(), Vec<Violation>> {
    d.validate()
}

/// What a premise has to look like.
struct Expect<'a> {
    term: &'a Term,
    pol: Polarity,
    /// `None` when the schema leaves the premise type partly open; the
    /// caller checks it separately.
    ty: Option<Formula>,
    discharge: Option<(&'a Var, Formula)>,
}

fn validate_node(d: &Derivation, path: &mut Vec<usize>, out: &mut Vec<Violation>) {
    let mut errs: Vec<String> = Vec::new();
    check_rule(d, &mut errs);
    out.extend(errs.into_iter().map(|message| Violation { path: path.clone(), rule: d.rule, message }));
    for (i, p) in d.prems.iter().enumerate() {
        path.push(i);
        validate_node(p, path, out);
        path.pop();
    }
}

fn check_rule(d: &Derivation, errs: &mut Vec<String>) {
    use Polarity::*;
    let c = &d.concl;
    if c.pol != c.term.pol() {
        errs.push(format!("judgment polarity {} differs from the term's polarity {}", c.pol, c.term.pol()));
    }
    if let Some(msg) = crate::syntax::local_violation(&c.term) {
        errs.push(msg);
    }
    if d.prems.len() != d.rule.arity() {
        errs.push(format!("{} takes {} premises, found {}", d.rule, d.rule.arity(), d.prems.len()));
        return;
    }
    if Rule::for_term(&c.term) != d.rule {
        errs.push(format!(
            "term `{}` is the conclusion of {}, not {}",
            c.term,
            Rule::for_term(&c.term),
            d.rule
        ));
        return;
    }
    let ty = &c.ty;
    let mismatch = |want: &str| format!("conclusion type `{ty}` does not have the form {want}");
    let prem_ty = |i: usize| &d.prems[i].concl.ty;

    // Per-rule: expected premises, plus any constraint on the conclusion type.
    let expects: Vec<Expect> = match (&c.term, d.rule) {
        (Term::Var(v), _) => {
            match c.basis.lookup(v) {
                None => errs.push(format!("assumption {v} is not in the basis")),
                Some(f) if f != ty => errs.push(format!("assumption {v} has type `{f}` in the basis, not `{ty}`")),
                Some(_) => {}
            }
            vec![]
        }
        (Term::Top, _) => {
            if *ty != Formula::Verum {
                errs.push(mismatch("top"));
            }
            vec![]
        }
        (Term::Bot, _) => {
            if *ty != Formula::Falsum {
                errs.push(mismatch("bot"));
            }
            vec![]
        }
        (Term::Abort(b, _), Rule::BotE) => vec![Expect { term: b, pol: Pos, ty: Some(Formula::Falsum), discharge: None }],
        (Term::Abort(b, _), _) => vec![Expect { term: b, pol: Neg, ty: Some(Formula::Verum), discharge: None }],
        (Term::Pair(l, r, p), _) => match (ty, p) {
            (Formula::And(a, b), Pos) | (Formula::Or(a, b), Neg) => vec![
                Expect { term: l, pol: *p, ty: Some((**a).clone()), discharge: None },
                Expect { term: r, pol: *p, ty: Some((**b).clone()), discharge: None },
            ],
            _ => {
                errs.push(mismatch(if *p == Pos { "A & B" } else { "A | B" }));
                return;
            }
        },
        (Term::Fst(b, p), _) | (Term::Snd(b, p), _) => {
            let first = matches!(c.term, Term::Fst(..));
            match (prem_ty(0), p) {
                (Formula::And(l, r), Pos) | (Formula::Or(l, r), Neg) => {
                    let proj = if first { l } else { r };
                    if **proj != *ty {
                        errs.push(format!("premise type `{}` does not project to `{ty}`", prem_ty(0)));
                    }
                }
                _ => errs.push(format!(
                    "premise type `{}` must be a {}",
                    prem_ty(0),
                    if *p == Pos { "conjunction" } else { "disjunction" }
                )),
            }
            vec![Expect { term: b, pol: *p, ty: None, discharge: None }]
        }
        (Term::Inl(b, p), _) | (Term::Inr(b, p), _) => {
            let first = matches!(c.term, Term::Inl(..));
            match (ty, p) {
                (Formula::Or(l, r), Pos) | (Formula::And(l, r), Neg) => {
                    let inj = if first { l } else { r };
                    vec![Expect { term: b, pol: *p, ty: Some((**inj).clone()), discharge: None }]
                }
                _ => {
                    errs.push(mismatch(if *p == Pos { "A | B" } else { "A & B" }));
                    return;
                }
            }
        }
        (Term::Case { scrutinee, left, left_body, right, right_body, pol }, _) => {
            let sp = scrutinee.pol();
            let (a, b) = match (prem_ty(0), sp) {
                (Formula::Or(a, b), Pos) | (Formula::And(a, b), Neg) => ((**a).clone(), (**b).clone()),
                _ => {
                    errs.push(format!(
                        "scrutinee type `{}` must be a {}",
                        prem_ty(0),
                        if sp == Pos { "disjunction" } else { "conjunction" }
                    ));
                    return;
                }
            };
            vec![
                Expect { term: scrutinee, pol: sp, ty: None, discharge: None },
                Expect { term: left_body, pol: *pol, ty: Some(ty.clone()), discharge: Some((left, a)) },
                Expect { term: right_body, pol: *pol, ty: Some(ty.clone()), discharge: Some((right, b)) },
            ]
        }
        (Term::Lam(x, body, p), _) => match (ty, p) {
            (Formula::Imp(a, b), Pos) => {
                vec![Expect { term: body, pol: Pos, ty: Some((**b).clone()), discharge: Some((x, (**a).clone())) }]
            }
            (Formula::CoImp(b, a), Neg) => {
                vec![Expect { term: body, pol: Neg, ty: Some((**b).clone()), discharge: Some((x, (**a).clone())) }]
            }
            _ => {
                errs.push(mismatch(if *p == Pos { "A -> B" } else { "B -< A" }));
                return;
            }
        },
        (Term::App(f, a, p), _) => {
            let want = match p {
                Pos => Formula::imp(prem_ty(1).clone(), ty.clone()),
                Neg => Formula::coimp(ty.clone(), prem_ty(1).clone()),
            };
            vec![
                Expect { term: f, pol: *p, ty: Some(want), discharge: None },
                Expect { term: a, pol: *p, ty: None, discharge: None },
            ]
        }
        (Term::MPair(s, t, p), _) => match (ty, p) {
            (Formula::Imp(a, b), Neg) | (Formula::CoImp(a, b), Pos) => {
                // {s+ : A, t- : B}- : A -> B   and   {s+ : B, t- : A}+ : B -< A
                vec![
                    Expect { term: s, pol: Pos, ty: Some((**a).clone()), discharge: None },
                    Expect { term: t, pol: Neg, ty: Some((**b).clone()), discharge: None },
                ]
            }
            _ => {
                errs.push(mismatch(if *p == Neg { "A -> B" } else { "B -< A" }));
                return;
            }
        },
        (Term::Pi1(b, _), _) | (Term::Pi2(b, _), _) => {
            let first = matches!(c.term, Term::Pi1(..));
            let bp = b.pol();
            // p1 picks the antecedent of A -> B or the body of B -< A;
            // p2 picks the consequent or the subtrahend.
            let picked = match (prem_ty(0), bp) {
                (Formula::Imp(l, r), Neg) | (Formula::CoImp(l, r), Pos) => Some(if first { l } else { r }),
                _ => None,
            };
            match picked {
                Some(f) if **f == *ty => {}
                Some(_) => errs.push(format!("premise type `{}` does not project to `{ty}`", prem_ty(0))),
                None => errs.push(format!(
                    "premise type `{}` must be {}",
                    prem_ty(0),
                    if bp == Neg { "an implication" } else { "a co-implication" }
                )),
            }
            vec![Expect { term: b, pol: bp, ty: None, discharge: None }]
        }
    };

    for (i, e) in expects.iter().enumerate() {
        let p = &d.prems[i].concl;
        if p.term != *e.term {
            errs.push(format!("premise {i} has term `{}`, expected the subterm `{}`", p.term, e.term));
        }
        if p.pol != e.pol {
            errs.push(format!("premise {i} has polarity {}, expected {}", p.pol, e.pol));
        }
        if let Some(t) = &e.ty {
            if p.ty != *t {
                errs.push(format!("premise {i} has type `{}`, expected `{t}`", p.ty));
            }
        }
        match &e.discharge {
            None => {
                if !p.basis.is_subset_of(&c.basis) {
                    errs.push(format!("premise {i} basis {} is not contained in {}", p.basis, c.basis));
                }
            }
            Some((x, a)) => {
                if c.basis.contains(x) {
                    errs.push(format!("discharged variable {x} still occurs in the conclusion basis"));
                }
                if let Some(found) = p.basis.lookup(x) {
                    if found != a {
                        errs.push(format!("discharged {x} has type `{found}`, expected `{a}`"));
                    }
                }
                let mut rest = p.basis.clone();
                rest.remove(x);
                if !rest.is_subset_of(&c.basis) {
                    errs.push(format!("premise {i} basis {} is not contained in {} plus {x}", p.basis, c.basis));
                }
            }
        }
    }
}
