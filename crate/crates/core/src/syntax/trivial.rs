//! Removal of matches whose outcome is fixed by the program text.

use std::collections::BTreeMap;

use super::ast::*;

/// Statically matches a constructor term against a pattern. `None` means
/// the outcome depends on the value of some variable of the term.
fn static_match(p: &Pattern, e: &Expr, out: &mut BTreeMap<Name, Expr>) -> Option<bool> {
    match (p, e) {
        (Pattern::Var(x), _) => {
            out.insert(x.clone(), e.clone());
            Some(true)
        }
        (Pattern::Con(c, ps), Expr::Con(d, es)) => {
            if c != d || ps.len() != es.len() {
                return Some(false);
            }
            for (p, e) in ps.iter().zip(es) {
                match static_match(p, e, out)? {
                    true => {}
                    false => return Some(false),
                }
            }
            Some(true)
        }
        _ => None,
    }
}

fn simplify(p: &Process) -> Process {
    match p {
        Process::Nil | Process::Call(..) | Process::Emit(..) => p.clone(),
        Process::Present(pr) => Process::Present(Box::new(Present { body: simplify(&pr.body), ..(**pr).clone() })),
        Process::NameMatch { left, right, then, otherwise } => {
            if left == right {
                simplify(then)
            } else {
                Process::NameMatch {
                    left: left.clone(),
                    right: right.clone(),
                    then: Box::new(simplify(then)),
                    otherwise: Box::new(simplify(otherwise)),
                }
            }
        }
        Process::Match { scrutinee, pattern, then, otherwise } => {
            if !matches!(scrutinee, Expr::Var(_)) {
                let mut s = BTreeMap::new();
                match static_match(pattern, scrutinee, &mut s) {
                    Some(true) => return simplify(&then.subst(&s)),
                    Some(false) => return simplify(otherwise),
                    None => {}
                }
            }
            Process::Match {
                scrutinee: scrutinee.clone(),
                pattern: pattern.clone(),
                then: Box::new(simplify(then)),
                otherwise: Box::new(simplify(otherwise)),
            }
        }
        Process::New { name, ty, body } => Process::New {
            name: name.clone(),
            ty: ty.clone(),
            body: Box::new(simplify(body)),
        },
        Process::Par(l, r) => Process::par(simplify(l), simplify(r)),
    }
}

/// Replaces `if s = s then P else Q` by `P`, and a match on a constructor
/// term by the branch it selects.
pub fn remove_trivial_matches(sys: &EquationSystem) -> EquationSystem {
    let mut out = sys.clone();
    for eq in &mut out.equations {
        eq.body = simplify(&eq.body);
    }
    out
}

/// Whether a body still contains a statically decided match.
pub fn has_trivial_match(p: &Process) -> bool {
    match p {
        Process::Nil | Process::Call(..) | Process::Emit(..) => false,
        Process::Present(pr) => has_trivial_match(&pr.body),
        Process::NameMatch { left, right, then, otherwise } => {
            left == right || has_trivial_match(then) || has_trivial_match(otherwise)
        }
        Process::Match { scrutinee, pattern, then, otherwise } => {
            let decided = !matches!(scrutinee, Expr::Var(_))
                && static_match(pattern, scrutinee, &mut BTreeMap::new()).is_some();
            decided || has_trivial_match(then) || has_trivial_match(otherwise)
        }
        Process::New { body, .. } => has_trivial_match(body),
        Process::Par(l, r) => has_trivial_match(l) || has_trivial_match(r),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_program;

    #[test]
    fn identical_names_select_then_branch() {
        let sys = parse_program(
            "region r; def A(s: sig[r](unit)) = if s = s then emit s * else 0",
        )
        .unwrap();
        let out = remove_trivial_matches(&sys);
        assert_eq!(out.equations[0].body, Process::Emit(Name::new("s"), Expr::Con("*".into(), vec![])));
    }

    #[test]
    fn constructor_scrutinee_is_substituted() {
        let sys = parse_program(
            "region r;
             def A(a: sig[r](unit), s: sig[r](sig[r](unit))) =
               match [a] with cons(x, l) then emit s x else 0",
        )
        .unwrap();
        let out = remove_trivial_matches(&sys);
        assert_eq!(out.equations[0].body, Process::Emit(Name::new("s"), Expr::var("a")));
        assert!(!has_trivial_match(&out.equations[0].body));
    }

    #[test]
    fn bodies_without_trivial_matches_are_unchanged() {
        let sys = parse_program(
            "region r; def A(s: sig[r](unit), t: sig[r](unit)) = if s = t then 0 else A(s, t)",
        )
        .unwrap();
        assert_eq!(remove_trivial_matches(&sys), sys);
    }
}
