//! Denotation and sense of derivations.
//!
//! The denotation of a derivation is represented by the normal form of its
//! end-term under the fixed strategy of [`crate::rewrite::normalize`]; two
//! derivations are identical when those normal forms are α-equal, or, with
//! duality allowed, when one is α-equal to the dual of the other.
//!
//! The sense is the set of terms occurring in the derivation, each with its
//! polarity and principal type scheme. Subterms are taken from the
//! α-canonical end-term, so the choice of bound names does not matter, and
//! schemes come from the terms alone, so the choice of atoms in the type
//! annotations does not matter either.

use std::collections::BTreeSet;
use std::fmt;

use crate::derivation::Derivation;
use crate::duality::{dual_term, InvalidDerivation};
use crate::rewrite::{normal_form, FuelExhausted};
use crate::syntax::{alpha_eq, canonical, Polarity, Term};
use crate::typing::{infer_principal, TypeScheme};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Identical,
    IdenticalModuloDuality,
    Distinct,
    Synonymous,
    NonSynonymous,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Identical => "identical",
            Verdict::IdenticalModuloDuality => "identical-modulo-duality",
            Verdict::Distinct => "distinct",
            Verdict::Synonymous => "synonymous",
            Verdict::NonSynonymous => "non-synonymous",
        }
    }

    pub fn is_affirmative(self) -> bool {
        !matches!(self, Verdict::Distinct | Verdict::NonSynonymous)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Canonical representative of the denotation of `t`.
pub fn denotation(t: &Term, fuel: usize) -> Result<Term, FuelExhausted> {
    normal_form(t, fuel)
}

/// Compares the denotations of `t` and `u`.
pub fn compare(t: &Term, u: &Term, modulo_duality: bool, fuel: usize) -> Result<Verdict, FuelExhausted> {
    let nt = denotation(t, fuel)?;
    let nu = denotation(u, fuel)?;
    Ok(if alpha_eq(&nt, &nu) {
        Verdict::Identical
    } else if modulo_duality && alpha_eq(&nt, &dual_term(&nu)) {
        Verdict::IdenticalModuloDuality
    } else {
        Verdict::Distinct
    })
}

pub fn identical(t: &Term, u: &Term, modulo_duality: bool, fuel: usize) -> Result<bool, FuelExhausted> {
    compare(t, u, modulo_duality, fuel).map(Verdict::is_affirmative)
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SenseEntry {
    pub term: Term,
    pub pol: Polarity,
    pub scheme: TypeScheme,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct SenseDescriptor {
    pub entries: BTreeSet<SenseEntry>,
}

impl fmt::Display for SenseDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(f, "{}  {}  {}", e.pol, e.term, e.scheme)?;
        }
        Ok(())
    }
}

/// Sense of the terms occurring in a derivation whose end-term is `t`.
pub fn sense_of_term(t: &Term) -> SenseDescriptor {
    let t = canonical(t);
    let mut entries = BTreeSet::new();
    for (_, sub) in t.subterms() {
        if let Ok(p) = infer_principal(sub) {
            entries.insert(SenseEntry { term: sub.clone(), pol: sub.pol(), scheme: p.scheme() });
        }
    }
    SenseDescriptor { entries }
}

/// Every judgment of a valid derivation has a subterm of the end-term as
/// its subject, so the sense is read off the end-term.
pub fn sense(d: &Derivation) -> Result<SenseDescriptor, InvalidDerivation> {
    d.validate().map_err(InvalidDerivation)?;
    Ok(sense_of_term(&d.concl.term))
}

pub fn synonymous(d1: &Derivation, d2: &Derivation) -> Result<bool, InvalidDerivation> {
    Ok(sense(d1)? == sense(d2)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewrite::DEFAULT_FUEL;
    use crate::syntax::{Basis, Formula};
    use crate::textio::{parse_formula, parse_term};
    use crate::typing::check;
    use Polarity::*;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn identity(pol: Polarity, binder: &str, atom: &str) -> Derivation {
        let a = Formula::atom(atom);
        let (term, ty) = match pol {
            Pos => (format!("(\\{binder}+. {binder}+)+"), Formula::imp(a.clone(), a)),
            Neg => (format!("(\\{binder}-. {binder}-)-"), Formula::coimp(a.clone(), a)),
        };
        check(&Basis::new(), pol, &t(&term), &ty).unwrap()
    }

    #[test]
    fn denotations() {
        assert_eq!(denotation(&t("app+((\\x+. x+)+, top+)+"), DEFAULT_FUEL).unwrap(), Term::Top);
        assert_eq!(denotation(&t("(\\x+. x+)+"), DEFAULT_FUEL).unwrap(), t("(\\x+. x+)+"));
        assert_eq!(denotation(&t("fst+(<top+, top+>+)+"), DEFAULT_FUEL).unwrap(), Term::Top);
    }

    #[test]
    fn identity_verdicts() {
        let (p, q, n) = (t("(\\x+. x+)+"), t("(\\y+. y+)+"), t("(\\x-. x-)-"));
        assert_eq!(compare(&p, &q, false, 100).unwrap(), Verdict::Identical);
        assert_eq!(compare(&p, &n, true, 100).unwrap(), Verdict::IdenticalModuloDuality);
        assert_eq!(compare(&p, &n, false, 100).unwrap(), Verdict::Distinct);
        assert!(!identical(&p, &n, false, 100).unwrap());
    }

    #[test]
    fn sense_of_identity() {
        let s = sense(&identity(Pos, "x", "rho")).unwrap();
        let rendered: Vec<String> = s.entries.iter().map(|e| format!("{} {} {}", e.term, e.pol, e.scheme)).collect();
        assert_eq!(rendered.len(), 2);
        assert!(rendered.contains(&"v0+ + ?A".to_string()));
        assert!(rendered.contains(&"(\\v0+. v0+)+ + ?A -> ?A".to_string()));
    }

    #[test]
    fn meaning_matrix() {
        let plus = [identity(Pos, "x", "rho"), identity(Pos, "x", "sigma"), identity(Pos, "y", "sigma")];
        let minus = [identity(Neg, "x", "rho"), identity(Neg, "x", "sigma"), identity(Neg, "y", "sigma")];
        for group in [&plus, &minus] {
            for a in group.iter() {
                for b in group.iter() {
                    assert!(synonymous(a, b).unwrap());
                    assert!(identical(&a.concl.term, &b.concl.term, false, 100).unwrap());
                }
            }
        }
        for a in &plus {
            for b in &minus {
                assert!(!synonymous(a, b).unwrap());
                let sa = sense(a).unwrap();
                let sb = sense(b).unwrap();
                assert!(sa.entries.iter().all(|e| e.pol == Pos));
                assert!(sb.entries.iter().all(|e| e.pol == Neg));
                assert_eq!(compare(&a.concl.term, &b.concl.term, true, 100).unwrap(), Verdict::IdenticalModuloDuality);
                assert_eq!(compare(&a.concl.term, &b.concl.term, false, 100).unwrap(), Verdict::Distinct);
            }
        }
    }

    #[test]
    fn sense_ignores_annotations() {
        let d = check(&Basis::new(), Pos, &t("(\\x+. x+)+"), &parse_formula("(a & b) -> (a & b)").unwrap()).unwrap();
        assert!(synonymous(&d, &identity(Pos, "z", "c")).unwrap());
    }
}
