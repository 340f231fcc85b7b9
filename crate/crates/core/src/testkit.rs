//! Random generation of well-typed derivations and brute-force oracles.
//!
//! [`gen_derivation`] works top-down from a goal `(polarity, formula)`: it
//! picks a rule whose conclusion fits the goal, invents the side formulas
//! the rule leaves open, and recurses on the premises with a smaller height
//! budget. The result is valid by construction. Free hypotheses are named
//! `h0`, `h1`, ... (one per polarity and type), bound variables come from a
//! small pool so that shadowing occurs.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::derivation::{Derivation, Judgment, Rule};
use crate::rewrite::{find_redexes, step};
use crate::syntax::{canonical, Basis, Formula, Name, Polarity, Term, Var};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenConfig {
    pub seed: u64,
    pub max_height: usize,
    pub atom_pool: Vec<String>,
    /// Relative weight of each rule; missing rules get weight 1, weight 0
    /// disables a rule except where a leaf is forced.
    pub rule_weights: BTreeMap<Rule, u32>,
    /// Soft bound on the number of nodes; past it only leaves are chosen.
    pub max_nodes: usize,
    /// Prefix of free hypothesis names.
    pub hyp_prefix: String,
}

impl Default for GenConfig {
    fn default() -> GenConfig {
        GenConfig {
            seed: 0,
            max_height: 5,
            atom_pool: vec!["a".into(), "b".into(), "c".into()],
            rule_weights: BTreeMap::new(),
            max_nodes: 120,
            hyp_prefix: "h".into(),
        }
    }
}

impl GenConfig {
    pub fn with_seed(seed: u64, max_height: usize) -> GenConfig {
        GenConfig { seed, max_height, ..GenConfig::default() }
    }

    fn weight(&self, r: Rule) -> u32 {
        self.rule_weights.get(&r).copied().unwrap_or(1)
    }

    fn validate(&self) -> Result<(), GenError> {
        if self.atom_pool.is_empty() {
            return Err(GenError::InvalidConfig("atom pool is empty".into()));
        }
        if !Rule::ALL.iter().any(|r| r.arity() == 0 && self.weight(*r) > 0) {
            return Err(GenError::InvalidConfig("every zero-premise rule has weight 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("invalid generator configuration: {0}")]
    InvalidConfig(String),
    #[error("no valid derivation after {attempts} attempts")]
    GenerationFailed { attempts: usize },
}

const BINDERS: [&str; 4] = ["x", "y", "z", "w"];
const ATTEMPTS: usize = 8;

/// Random formula of depth at most `depth` over `atoms`.
pub fn gen_formula(rng: &mut impl Rng, depth: usize, atoms: &[String]) -> Formula {
    let leaf = |rng: &mut dyn rand::RngCore| match rng.gen_range(0..10) {
        0 => Formula::Verum,
        1 => Formula::Falsum,
        _ => Formula::atom(atoms.choose(rng).expect("non-empty atom pool")),
    };
    if depth == 0 || rng.gen_range(0..3) == 0 {
        return leaf(rng);
    }
    let a = gen_formula(rng, depth - 1, atoms);
    let b = gen_formula(rng, depth - 1, atoms);
    match rng.gen_range(0..4) {
        0 => Formula::and(a, b),
        1 => Formula::or(a, b),
        2 => Formula::imp(a, b),
        _ => Formula::coimp(a, b),
    }
}

/// Random polarity well-formed term, not necessarily typable.
pub fn gen_term(rng: &mut impl Rng, depth: usize, pol: Polarity) -> Term {
    use Polarity::*;
    fn var(rng: &mut impl Rng, p: Polarity) -> Var {
        Var::new(BINDERS[rng.gen_range(0..BINDERS.len())], p)
    }
    fn any(rng: &mut impl Rng) -> Polarity {
        if rng.gen() {
            Polarity::Pos
        } else {
            Polarity::Neg
        }
    }
    if depth == 0 || rng.gen_range(0..4) == 0 {
        return match (rng.gen_range(0..3), pol) {
            (0, Pos) => Term::Top,
            (0, Neg) => Term::Bot,
            _ => Term::Var(var(rng, pol)),
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..11) {
        0 => {
            let p = any(rng);
            Term::abort(gen_term(rng, d, p), pol)
        }
        1 => Term::pair(gen_term(rng, d, pol), gen_term(rng, d, pol), pol),
        2 => Term::fst(gen_term(rng, d, pol), pol),
        3 => Term::snd(gen_term(rng, d, pol), pol),
        4 => Term::inl(gen_term(rng, d, pol), pol),
        5 => Term::inr(gen_term(rng, d, pol), pol),
        6 => {
            let p = any(rng);
            let s = gen_term(rng, d, p);
            let (x, y) = (var(rng, p), var(rng, p));
            Term::case(s, x, gen_term(rng, d, pol), y, gen_term(rng, d, pol), pol)
        }
        7 => Term::lam(var(rng, pol), gen_term(rng, d, pol), pol),
        8 => Term::app(gen_term(rng, d, pol), gen_term(rng, d, pol), pol),
        9 => Term::mpair(gen_term(rng, d, Pos), gen_term(rng, d, Neg), pol),
        _ => {
            let p = any(rng);
            match pol {
                Pos => Term::pi1(gen_term(rng, d, p), Pos),
                Neg => Term::pi2(gen_term(rng, d, p), Neg),
            }
        }
    }
}

/// Random basis over the binder pool.
pub fn gen_basis(rng: &mut impl Rng, atoms: &[String]) -> Basis {
    let mut b = Basis::new();
    for _ in 0..rng.gen_range(0..5) {
        let p = if rng.gen() { Polarity::Pos } else { Polarity::Neg };
        let v = Var::new(BINDERS.choose(rng).expect("non-empty"), p);
        let f = gen_formula(rng, 2, atoms);
        b.insert(&v, f);
    }
    b
}

struct Gen<'a> {
    cfg: &'a GenConfig,
    rng: ChaCha8Rng,
    /// Binders in scope, innermost last.
    scope: Vec<(Var, Formula)>,
    hyps: BTreeMap<(Polarity, Formula), Name>,
    nodes: usize,
}

impl Gen<'_> {
    fn side(&mut self) -> Formula {
        gen_formula(&mut self.rng, 2, &self.cfg.atom_pool)
    }

    fn visible(&self, pol: Polarity, ty: &Formula) -> Vec<Var> {
        let mut out = Vec::new();
        for (i, (v, f)) in self.scope.iter().enumerate() {
            let shadowed = self.scope[i + 1..].iter().any(|(w, _)| w == v);
            if !shadowed && v.pol == pol && f == ty {
                out.push(v.clone());
            }
        }
        out
    }

    fn hyp(&mut self, pol: Polarity, ty: &Formula) -> Derivation {
        let bound = self.visible(pol, ty);
        let v = if !bound.is_empty() && self.rng.gen_range(0..4) != 0 {
            bound.choose(&mut self.rng).expect("non-empty").clone()
        } else {
            let n = self.hyps.len();
            let prefix = &self.cfg.hyp_prefix;
            let name = self.hyps.entry((pol, ty.clone())).or_insert_with(|| Name::from(format!("{prefix}{n}")));
            Var { name: name.clone(), pol }
        };
        let mut basis = Basis::new();
        basis.insert(&v, ty.clone());
        let rule = if pol == Polarity::Pos { Rule::HypPos } else { Rule::HypNeg };
        Derivation::leaf(rule, Judgment { basis, pol, term: Term::Var(v), ty: ty.clone() })
    }

    fn applicable(pol: Polarity, ty: &Formula) -> Vec<Rule> {
        use Polarity::*;
        use Rule::*;
        let mut out = vec![BotE, TopEd, OrE, AndEd];
        match pol {
            Pos => out.extend([HypPos, AndE1, AndE2, ImpE, ImpEd1, CoImpE1]),
            Neg => out.extend([HypNeg, OrEd1, OrEd2, CoImpEd, ImpEd2, CoImpE2]),
        }
        match (pol, ty) {
            (Pos, Formula::Verum) => out.push(TopI),
            (Neg, Formula::Falsum) => out.push(BotId),
            (Pos, Formula::And(..)) => out.push(AndI),
            (Neg, Formula::Or(..)) => out.push(OrId),
            (Neg, Formula::And(..)) => out.extend([AndId1, AndId2]),
            (Pos, Formula::Or(..)) => out.extend([OrI1, OrI2]),
            (Pos, Formula::Imp(..)) => out.push(ImpI),
            (Neg, Formula::Imp(..)) => out.push(ImpId),
            (Neg, Formula::CoImp(..)) => out.push(CoImpId),
            (Pos, Formula::CoImp(..)) => out.push(CoImpI),
            _ => {}
        }
        out
    }

    fn pick(&mut self, pol: Polarity, ty: &Formula, budget: usize) -> Rule {
        let hyp = if pol == Polarity::Pos { Rule::HypPos } else { Rule::HypNeg };
        let cands: Vec<Rule> = Self::applicable(pol, ty)
            .into_iter()
            .filter(|r| budget > 0 || r.is_hyp())
            .filter(|r| self.nodes < self.cfg.max_nodes || r.arity() == 0)
            .collect();
        let weights: Vec<u32> = cands.iter().map(|r| self.cfg.weight(*r)).collect();
        let total: u32 = weights.iter().sum();
        if total == 0 {
            return hyp;
        }
        let mut x = self.rng.gen_range(0..total);
        for (r, w) in cands.iter().zip(&weights) {
            if x < *w {
                return *r;
            }
            x -= w;
        }
        hyp
    }

    /// Binder name for a `case`: never one already in scope, so that
    /// the discharged variable cannot also be free outside its branch.
    fn case_binder(&mut self, pol: Polarity) -> Var {
        let free: Vec<&str> =
            BINDERS.iter().copied().filter(|n| !self.scope.iter().any(|(v, _)| v.pol == pol && *v.name == **n)).collect();
        match free.choose(&mut self.rng) {
            Some(n) => Var::new(n, pol),
            None => {
                let k = self.scope.len();
                Var::new(&format!("u{k}"), pol)
            }
        }
    }

    fn lam_binder(&mut self, pol: Polarity) -> Var {
        Var::new(BINDERS.choose(&mut self.rng).expect("non-empty"), pol)
    }

    fn under(&mut self, x: &Var, ty: &Formula, pol: Polarity, goal: &Formula, budget: usize) -> Derivation {
        self.scope.push((x.clone(), ty.clone()));
        let d = self.gen(pol, goal, budget);
        self.scope.pop();
        d
    }

    fn gen(&mut self, pol: Polarity, ty: &Formula, budget: usize) -> Derivation {
        use Polarity::*;
        use Rule::*;
        self.nodes += 1;
        let rule = self.pick(pol, ty, budget);
        if rule.is_hyp() {
            return self.hyp(pol, ty);
        }
        let b = budget - 1;
        let mut discharged: Vec<(usize, Var)> = Vec::new();
        let (term, prems) = match rule {
            TopI => (Term::Top, vec![]),
            BotId => (Term::Bot, vec![]),
            BotE | TopEd => {
                let (p, f) = if rule == BotE { (Pos, Formula::Falsum) } else { (Neg, Formula::Verum) };
                let d = self.gen(p, &f, b);
                (Term::abort(d.concl.term.clone(), pol), vec![d])
            }
            AndI | OrId => {
                let (Formula::And(l, r) | Formula::Or(l, r)) = ty else { unreachable!() };
                let dl = self.gen(pol, l, b);
                let dr = self.gen(pol, r, b);
                (Term::pair(dl.concl.term.clone(), dr.concl.term.clone(), pol), vec![dl, dr])
            }
            AndE1 | AndE2 | OrEd1 | OrEd2 => {
                let other = self.side();
                let first = matches!(rule, AndE1 | OrEd1);
                let (l, r) = if first { (ty.clone(), other) } else { (other, ty.clone()) };
                let f = if pol == Pos { Formula::and(l, r) } else { Formula::or(l, r) };
                let d = self.gen(pol, &f, b);
                let t = if first { Term::fst(d.concl.term.clone(), pol) } else { Term::snd(d.concl.term.clone(), pol) };
                (t, vec![d])
            }
            OrI1 | OrI2 | AndId1 | AndId2 => {
                let (Formula::Or(l, r) | Formula::And(l, r)) = ty else { unreachable!() };
                let left = matches!(rule, OrI1 | AndId1);
                let d = self.gen(pol, if left { l } else { r }, b);
                let t = if left { Term::inl(d.concl.term.clone(), pol) } else { Term::inr(d.concl.term.clone(), pol) };
                (t, vec![d])
            }
            OrE | AndEd => {
                let sp = if rule == OrE { Pos } else { Neg };
                let (l, r) = (self.side(), self.side());
                let f = if sp == Pos { Formula::or(l.clone(), r.clone()) } else { Formula::and(l.clone(), r.clone()) };
                let ds = self.gen(sp, &f, b);
                let x = self.case_binder(sp);
                let y = self.case_binder(sp);
                let dl = self.under(&x, &l, pol, ty, b);
                let dr = self.under(&y, &r, pol, ty, b);
                discharged.push((1, x.clone()));
                discharged.push((2, y.clone()));
                let t = Term::case(
                    ds.concl.term.clone(),
                    x,
                    dl.concl.term.clone(),
                    y,
                    dr.concl.term.clone(),
                    pol,
                );
                (t, vec![ds, dl, dr])
            }
            ImpI | CoImpId => {
                let (arg, res) = match ty {
                    Formula::Imp(a, r) => (a, r),
                    Formula::CoImp(r, a) => (a, r),
                    _ => unreachable!(),
                };
                let x = self.lam_binder(pol);
                let d = self.under(&x, arg, pol, res, b);
                discharged.push((0, x.clone()));
                (Term::lam(x, d.concl.term.clone(), pol), vec![d])
            }
            ImpE | CoImpEd => {
                let arg = self.side();
                let f = if pol == Pos { Formula::imp(arg.clone(), ty.clone()) } else { Formula::coimp(ty.clone(), arg.clone()) };
                let df = self.gen(pol, &f, b);
                let da = self.gen(pol, &arg, b);
                (Term::app(df.concl.term.clone(), da.concl.term.clone(), pol), vec![df, da])
            }
            ImpId | CoImpI => {
                let (Formula::Imp(s, u) | Formula::CoImp(s, u)) = ty else { unreachable!() };
                let ds = self.gen(Pos, s, b);
                let du = self.gen(Neg, u, b);
                (Term::mpair(ds.concl.term.clone(), du.concl.term.clone(), pol), vec![ds, du])
            }
            ImpEd1 | ImpEd2 | CoImpE1 | CoImpE2 => {
                let other = self.side();
                let (f, bp) = match rule {
                    ImpEd1 => (Formula::imp(ty.clone(), other), Neg),
                    ImpEd2 => (Formula::imp(other, ty.clone()), Neg),
                    CoImpE1 => (Formula::coimp(ty.clone(), other), Pos),
                    _ => (Formula::coimp(other, ty.clone()), Pos),
                };
                let d = self.gen(bp, &f, b);
                let t = if pol == Pos { Term::pi1(d.concl.term.clone(), Pos) } else { Term::pi2(d.concl.term.clone(), Neg) };
                (t, vec![d])
            }
            HypPos | HypNeg => unreachable!(),
        };
        let mut basis = Basis::new();
        for (i, p) in prems.iter().enumerate() {
            let mut pb = p.concl.basis.clone();
            for (j, x) in &discharged {
                if *j == i {
                    pb.remove(x);
                }
            }
            basis = basis.union(&pb).expect("hypothesis names are unique per type");
        }
        Derivation { rule, concl: Judgment { basis, pol, term, ty: ty.clone() }, prems }
    }
}

fn run_gen(cfg: &GenConfig, goal: Option<(Polarity, Formula)>) -> Result<Derivation, GenError> {
    cfg.validate()?;
    for attempt in 0..ATTEMPTS {
        let seed = cfg.seed.wrapping_add((attempt as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut g = Gen { cfg, rng: ChaCha8Rng::seed_from_u64(seed), scope: vec![], hyps: BTreeMap::new(), nodes: 0 };
        let (pol, ty) = match &goal {
            Some(goal) => goal.clone(),
            None => {
                let pol = if g.rng.gen() { Polarity::Pos } else { Polarity::Neg };
                let depth = g.rng.gen_range(0..4);
                (pol, gen_formula(&mut g.rng, depth, &cfg.atom_pool))
            }
        };
        let d = g.gen(pol, &ty, cfg.max_height);
        if d.validate().is_ok() {
            return Ok(d);
        }
    }
    Err(GenError::GenerationFailed { attempts: ATTEMPTS })
}

/// A random valid derivation of height at most `cfg.max_height`,
/// determined by `cfg.seed`.
pub fn gen_derivation(cfg: &GenConfig) -> Result<Derivation, GenError> {
    run_gen(cfg, None)
}

/// Like [`gen_derivation`] with a fixed conclusion polarity and type.
pub fn gen_derivation_for(cfg: &GenConfig, pol: Polarity, ty: &Formula) -> Result<Derivation, GenError> {
    run_gen(cfg, Some((pol, ty.clone())))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    /// Every term reachable in any number of steps, up to α.
    pub reachable: BTreeSet<Term>,
    pub normal_forms: BTreeSet<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("reduction graph not closed within depth {max_depth}")]
pub struct DepthExhausted {
    pub max_depth: usize,
    /// What was explored before giving up.
    pub partial: OracleResult,
}

/// Explores every reduction sequence from `t` breadth-first, contracting
/// all redexes at every position. Terms are kept in α-canonical form.
pub fn oracle_reduce_all(t: &Term, max_depth: usize) -> Result<OracleResult, DepthExhausted> {
    let start = canonical(t);
    let mut reachable = BTreeSet::from([start.clone()]);
    let mut normal_forms = BTreeSet::new();
    let mut frontier = VecDeque::from([(start, 0usize)]);
    let mut exhausted = false;
    while let Some((cur, depth)) = frontier.pop_front() {
        let redexes = find_redexes(&cur);
        if redexes.is_empty() {
            normal_forms.insert(cur);
            continue;
        }
        if depth == max_depth {
            exhausted = true;
            continue;
        }
        for pos in &redexes {
            let next = canonical(&step(&cur, pos).expect("listed redex"));
            if reachable.insert(next.clone()) {
                frontier.push_back((next, depth + 1));
            }
        }
    }
    let result = OracleResult { reachable, normal_forms };
    if exhausted {
        Err(DepthExhausted { max_depth, partial: result })
    } else {
        Ok(result)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::check_polarities;
    use crate::textio::parse_term;

    #[test]
    fn generated_derivations_validate() {
        for seed in 0..300 {
            let cfg = GenConfig::with_seed(seed, 5);
            let d = gen_derivation(&cfg).unwrap();
            assert!(d.validate().is_ok(), "seed {seed}: {:?}", d.validate());
            assert!(d.height() <= 5);
            assert!(check_polarities(&d.concl.term).is_ok());
        }
        assert!(gen_derivation(&GenConfig::with_seed(7, 5)).unwrap().validate().is_ok());
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = GenConfig::with_seed(42, 6);
        assert_eq!(gen_derivation(&cfg).unwrap(), gen_derivation(&cfg).unwrap());
    }

    #[test]
    fn goal_directed_generation() {
        let f = crate::textio::parse_formula("(a -> b) & c").unwrap();
        let d = gen_derivation_for(&GenConfig::with_seed(3, 4), Polarity::Pos, &f).unwrap();
        assert_eq!(d.concl.ty, f);
        assert!(d.validate().is_ok());
    }

    #[test]
    fn invalid_configs() {
        let cfg = GenConfig { atom_pool: vec![], ..GenConfig::default() };
        assert!(matches!(gen_derivation(&cfg), Err(GenError::InvalidConfig(_))));
        let mut cfg = GenConfig::default();
        for r in Rule::ALL {
            if r.arity() == 0 {
                cfg.rule_weights.insert(r, 0);
            }
        }
        assert!(matches!(gen_derivation(&cfg), Err(GenError::InvalidConfig(_))));
    }

    #[test]
    fn random_terms_are_well_polarized() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..500 {
            let p = if rng.gen() { Polarity::Pos } else { Polarity::Neg };
            let t = gen_term(&mut rng, 4, p);
            assert_eq!(t.pol(), p);
            assert!(check_polarities(&t).is_ok(), "{t}");
        }
    }

    #[test]
    fn oracle_examples() {
        let t = parse_term("app+((\\x+. x+)+, top+)+").unwrap();
        let r = oracle_reduce_all(&t, 10).unwrap();
        assert_eq!(r.reachable.len(), 2);
        assert_eq!(r.normal_forms, BTreeSet::from([Term::Top]));

        let r = oracle_reduce_all(&Term::Top, 0).unwrap();
        assert_eq!(r.reachable, BTreeSet::from([Term::Top]));

        let t = parse_term("case z+ {x+. top+ | y+. top+}+").unwrap();
        let r = oracle_reduce_all(&t, 10).unwrap();
        assert_eq!(r.normal_forms, BTreeSet::from([Term::Top]));
    }

    #[test]
    fn oracle_reports_depth_exhaustion() {
        let omega = "(\\x+. app+(x+, x+)+)+";
        let t = parse_term(&format!("app+({omega}, {omega})+")).unwrap();
        // the term reduces to itself, so the closure is complete but has no normal form
        let r = oracle_reduce_all(&t, 3).unwrap();
        assert!(r.normal_forms.is_empty());
        let t = parse_term("fst+(<fst+(<top+, top+>+)+, top+>+)+").unwrap();
        assert!(oracle_reduce_all(&t, 1).is_err());
        assert_eq!(oracle_reduce_all(&t, 2).unwrap().normal_forms, BTreeSet::from([Term::Top]));
    }
}
