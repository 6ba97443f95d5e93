//! Syntactic well-formedness of equation bodies: finite control and the
//! shape conditions on identifiers that end a cycle.

use serde::Serialize;

use crate::syntax::*;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ControlViolation {
    pub thread: ThreadId,
    pub line: usize,
    /// The offending parallel composition, printed.
    pub site: String,
}

/// Every body must not spawn two recursive calls in parallel: no `P | Q`
/// where both sides contain a call or a present continuation.
pub fn check_finite_control(sys: &EquationSystem) -> Vec<ControlViolation> {
    let mut out = Vec::new();
    for eq in &sys.equations {
        scan_par(&eq.body, &mut |p| {
            out.push(ControlViolation { thread: eq.name.clone(), line: eq.line, site: p.to_string() })
        });
    }
    out
}

fn scan_par(p: &Process, bad: &mut impl FnMut(&Process)) {
    match p {
        Process::Nil | Process::Call(..) | Process::Emit(..) => {}
        Process::Present(pr) => scan_par(&pr.body, bad),
        Process::NameMatch { then, otherwise, .. } | Process::Match { then, otherwise, .. } => {
            scan_par(then, bad);
            scan_par(otherwise, bad);
        }
        Process::New { body, .. } => scan_par(body, bad),
        Process::Par(l, r) => {
            if l.has_call() && r.has_call() {
                bad(p);
            }
            scan_par(l, bad);
            scan_par(r, bad);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResetViolation {
    pub thread: ThreadId,
    /// Equations in which the identifier is called inside an instant.
    pub called_from: Vec<ThreadId>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ResetReport {
    pub violations: Vec<ResetViolation>,
    pub warnings: Vec<String>,
}

impl ResetReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A reset identifier must either have a body `pause.K` or occur only as
/// the else-continuation of present statements. Calls in the initial
/// configuration are not occurrences in the program.
pub fn validate_reset(sys: &EquationSystem) -> ResetReport {
    let mut report = ResetReport::default();
    for eq in sys.equations.iter().filter(|e| e.annotation.reset) {
        if eq.body.as_pause().is_some() {
            continue;
        }
        let mut called_from = Vec::new();
        for other in &sys.equations {
            let mut direct = false;
            other.body.visit_calls(&mut |id, cont| direct |= id == &eq.name && !cont);
            if direct {
                called_from.push(other.name.clone());
            }
        }
        if !called_from.is_empty() {
            report.violations.push(ResetViolation { thread: eq.name.clone(), called_from });
        }
    }
    if let Some(init) = &sys.init {
        for (id, _) in &init.threads {
            if !sys.is_reset(id) {
                report.warnings.push(format!(
                    "initial thread `{id}` does not start a cycle: it is not declared reset"
                ));
            }
        }
    }
    report.warnings.dedup();
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_calls_are_rejected() {
        let sys = parse_program("region r; def A(s: sig[r](unit)) = B(s) | B(s); def B(s: sig[r](unit)) = 0;").unwrap();
        let v = check_finite_control(&sys);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].thread, ThreadId::new("A"));
    }

    #[test]
    fn parallel_emissions_are_fine() {
        let sys = parse_program("region r; def A(s: sig[r](unit), x: unit) = emit s x | emit s x;").unwrap();
        assert!(check_finite_control(&sys).is_empty());
    }
}
