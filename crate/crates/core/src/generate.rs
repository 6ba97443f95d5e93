//! Random finite-control programs for property tests.
//!
//! Programs are produced as source text over a fixed vocabulary (two
//! regions, naturals, lists of naturals, signals carrying naturals and
//! signals carrying signals) and parsed back, so that labels and pause
//! desugaring come from the parser.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::analysis::{analyze, Analysis};
use crate::syntax::{parse_program, EquationSystem};

#[derive(Clone, Copy, Debug)]
pub struct GenConfig {
    pub max_equations: usize,
    /// Nesting depth of process constructors in a body.
    pub max_depth: usize,
    /// Keep only systems accepted by the analysis (finite control, reset
    /// discipline, read-once, consistent F-order).
    pub require_accepted: bool,
    pub max_attempts: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { max_equations: 5, max_depth: 4, require_accepted: true, max_attempts: 10_000 }
    }
}

pub struct Generated {
    pub source: String,
    pub sys: EquationSystem,
    pub analysis: Analysis,
}

const PRELUDE: &str = "region r0;\nregion r1 > r0;\n\ntype nat = z | succ(nat);\n\n\
fun pred(nat) -> nat {\n    (z) => z;\n    (succ(n)) => n;\n}\n\n";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Ty {
    Nat,
    List,
    /// `sig[r1](nat)`
    Sig,
    /// `sig[r0](sig[r1](nat))`
    SigSig,
}

impl Ty {
    fn text(self) -> &'static str {
        match self {
            Ty::Nat => "nat",
            Ty::List => "list(nat)",
            Ty::Sig => "sig[r1](nat)",
            Ty::SigSig => "sig[r0](sig[r1](nat))",
        }
    }

    fn payload(self) -> Option<Ty> {
        match self {
            Ty::Sig => Some(Ty::Nat),
            Ty::SigSig => Some(Ty::Sig),
            _ => None,
        }
    }
}

const PALETTE: [(&str, Ty); 4] = [("s", Ty::Sig), ("t", Ty::SigSig), ("x", Ty::Nat), ("l", Ty::List)];

struct Signature {
    params: Vec<(&'static str, Ty)>,
    reset: bool,
}

#[derive(Clone, Default)]
struct Scope {
    vars: Vec<(String, Ty)>,
}

impl Scope {
    fn of(&self, ty: Ty) -> Vec<&str> {
        self.vars.iter().filter(|(_, t)| *t == ty).map(|(n, _)| n.as_str()).collect()
    }

    fn without(&self, name: &str) -> Scope {
        Scope { vars: self.vars.iter().filter(|(n, _)| n != name).cloned().collect() }
    }

    fn with(&self, name: String, ty: Ty) -> Scope {
        let mut s = self.clone();
        s.vars.push((name, ty));
        s
    }
}

struct BodyGen<'a, R> {
    rng: &'a mut R,
    sigs: &'a [Signature],
    fresh: usize,
}

impl<R: Rng> BodyGen<'_, R> {
    fn fresh(&mut self, base: &str) -> String {
        self.fresh += 1;
        format!("{base}{}", self.fresh)
    }

    fn expr(&mut self, ty: Ty, scope: &Scope, depth: usize, deref: bool) -> Option<String> {
        let vars = scope.of(ty);
        match ty {
            Ty::Nat => {
                let roll = self.rng.gen_range(0..6);
                if depth > 0 && roll == 0 {
                    return Some(format!("succ({})", self.expr(Ty::Nat, scope, depth - 1, deref)?));
                }
                if depth > 0 && roll == 1 {
                    return Some(format!("pred({})", self.expr(Ty::Nat, scope, depth - 1, deref)?));
                }
                Some(vars.choose(self.rng).map_or("z".to_string(), |v| v.to_string()))
            }
            Ty::List => {
                let sigs = scope.of(Ty::Sig);
                let roll = self.rng.gen_range(0..6);
                if deref && !sigs.is_empty() && roll < 2 {
                    return Some(format!("!{}", sigs.choose(self.rng)?));
                }
                if depth > 0 && roll == 2 {
                    let h = self.expr(Ty::Nat, scope, depth - 1, deref)?;
                    let t = self.expr(Ty::List, scope, depth - 1, deref)?;
                    return Some(format!("cons({h}, {t})"));
                }
                Some(vars.choose(self.rng).map_or("[]".to_string(), |v| v.to_string()))
            }
            Ty::Sig | Ty::SigSig => vars.choose(self.rng).map(|v| v.to_string()),
        }
    }

    /// A call to a random equation. Signals of missing types are restricted
    /// on the spot; the last component tells whether that happened.
    fn call(&mut self, scope: &Scope, deref: bool) -> (String, String, bool) {
        let j = self.rng.gen_range(0..self.sigs.len());
        let mut prefix = String::new();
        let mut args = Vec::new();
        let params = self.sigs[j].params.clone();
        let mut scope = scope.clone();
        for (_, ty) in params {
            let e = match self.expr(ty, &scope, 1, deref) {
                Some(e) => e,
                None => {
                    let n = self.fresh("m");
                    let _ = write!(prefix, "nu {n}: {}. ", ty.text());
                    scope = scope.with(n.clone(), ty);
                    n
                }
            };
            args.push(e);
        }
        let restricted = !prefix.is_empty();
        (prefix, format!("E{j}({})", args.join(", ")), restricted)
    }

    /// A continuation may only use signals already in scope.
    fn continuation(&mut self, scope: &Scope) -> Option<String> {
        for _ in 0..8 {
            let (_, k, restricted) = self.call(scope, true);
            if !restricted {
                return Some(k);
            }
        }
        None
    }

    fn leaf(&mut self, scope: &Scope, allow_call: bool) -> String {
        match self.rng.gen_range(0..5) {
            0 => "0".to_string(),
            1 | 2 if allow_call => {
                let (prefix, c, _) = self.call(scope, false);
                format!("{prefix}{c}")
            }
            3 => match self.continuation(scope) {
                Some(k) => format!("pause.{k}"),
                None => "0".to_string(),
            },
            _ => self.emit(scope).unwrap_or_else(|| "0".to_string()),
        }
    }

    fn emit(&mut self, scope: &Scope) -> Option<String> {
        let sigs: Vec<(String, Ty)> =
            scope.vars.iter().filter(|(_, t)| t.payload().is_some()).cloned().collect();
        let (s, ty) = sigs.choose(self.rng)?.clone();
        let e = self.expr(ty.payload()?, scope, 2, false)?;
        Some(format!("emit {s} {e}"))
    }

    fn process(&mut self, scope: &Scope, depth: usize, allow_call: bool) -> String {
        if depth == 0 {
            return self.leaf(scope, allow_call);
        }
        let d = depth - 1;
        match self.rng.gen_range(0..9) {
            0 | 1 => {
                let Some(e) = self.emit(scope) else { return self.leaf(scope, allow_call) };
                let rest = self.process(scope, d, allow_call);
                format!("({e} | {rest})")
            }
            2 => {
                let sigs: Vec<(String, Ty)> =
                    scope.vars.iter().filter(|(_, t)| t.payload().is_some()).cloned().collect();
                let Some((s, ty)) = sigs.choose(self.rng).cloned() else { return self.leaf(scope, allow_call) };
                let Some(k) = self.continuation(scope) else { return self.leaf(scope, allow_call) };
                let v = self.fresh("v");
                let inner = scope.with(v.clone(), ty.payload().expect("signal type"));
                let body = self.process(&inner, d, allow_call);
                format!("present {s}({v}). ({body}) else {k}")
            }
            3 => {
                let nats = scope.of(Ty::Nat);
                let Some(x) = nats.choose(self.rng).map(|x| x.to_string()) else {
                    return self.process(scope, d, allow_call);
                };
                let n = self.fresh("n");
                // The matched variable is consumed by the then-branch.
                let then = self.process(&scope.without(&x).with(n.clone(), Ty::Nat), d, allow_call);
                let otherwise = self.process(scope, d, allow_call);
                format!("match {x} with succ({n}) then ({then}) else ({otherwise})")
            }
            4 => {
                let lists = scope.of(Ty::List);
                let Some(l) = lists.choose(self.rng).map(|x| x.to_string()) else {
                    return self.process(scope, d, allow_call);
                };
                let (h, tl) = (self.fresh("h"), self.fresh("tl"));
                let inner = scope.without(&l).with(h.clone(), Ty::Nat).with(tl.clone(), Ty::List);
                let then = self.process(&inner, d, allow_call);
                let otherwise = self.process(scope, d, allow_call);
                format!("match {l} with cons({h}, {tl}) then ({then}) else ({otherwise})")
            }
            5 => {
                let sigs = scope.of(Ty::Sig);
                if sigs.len() < 2 {
                    return self.process(scope, d, allow_call);
                }
                let a = sigs.choose(self.rng).expect("non-empty").to_string();
                let b = sigs.choose(self.rng).expect("non-empty").to_string();
                let then = self.process(scope, d, allow_call);
                let otherwise = self.process(scope, d, allow_call);
                format!("if {a} = {b} then ({then}) else ({otherwise})")
            }
            6 => {
                let n = self.fresh("k");
                let body = self.process(&scope.with(n.clone(), Ty::Sig), d, allow_call);
                format!("nu {n}: {}. ({body})", Ty::Sig.text())
            }
            _ => self.leaf(scope, allow_call),
        }
    }
}

/// One candidate program, not necessarily accepted by the analysis.
pub fn random_source<R: Rng>(rng: &mut R, cfg: &GenConfig) -> String {
    let n = rng.gen_range(1..=cfg.max_equations.max(1));
    let sigs: Vec<Signature> = (0..n)
        .map(|i| {
            let mut params = vec![PALETTE[0]];
            params.extend(PALETTE[1..].iter().copied().filter(|_| rng.gen_bool(0.5)));
            Signature { params, reset: i == 0 || rng.gen_bool(0.25) }
        })
        .collect();
    let mut out = String::from(PRELUDE);
    for (i, sig) in sigs.iter().enumerate() {
        let scope = Scope { vars: sig.params.iter().map(|(n, t)| (n.to_string(), *t)).collect() };
        let params: Vec<String> = sig.params.iter().map(|(n, t)| format!("{n}: {}", t.text())).collect();
        let mut g = BodyGen { rng, sigs: &sigs, fresh: 0 };
        let (annotation, body) = if sig.reset {
            let own: Vec<&str> = sig.params.iter().map(|(n, _)| *n).collect();
            let k = g.continuation(&scope).unwrap_or_else(|| format!("E{i}({})", own.join(", ")));
            ("[reset]".to_string(), format!("pause.{k}"))
        } else {
            let depth = g.rng.gen_range(1..=cfg.max_depth.max(1));
            let body = g.process(&scope, depth, true);
            let status = if g.rng.gen_bool(0.5) { "lex" } else { "mset" };
            let arity = sig.params.len();
            let mut mask: Vec<String> = (1..=arity).filter(|_| g.rng.gen_bool(0.6)).map(|k| k.to_string()).collect();
            if mask.is_empty() {
                mask.push(g.rng.gen_range(1..=arity).to_string());
            }
            (format!("[status={status}, mask={{{}}}]", mask.join(", ")), body)
        };
        let _ = writeln!(out, "def E{i}({}) {annotation} =\n    {body};\n", params.join(", "));
    }
    let init_args: Vec<&str> = sigs[0]
        .params
        .iter()
        .map(|(_, t)| match t {
            Ty::Sig => "in1",
            Ty::SigSig => "in2",
            Ty::Nat => "z",
            Ty::List => "[]",
        })
        .collect();
    let _ = writeln!(out, "init E0({});", init_args.join(", "));
    out
}

/// Samples candidates until one parses, type-checks and, if required, is
/// accepted by the analysis. `None` after `max_attempts` failures.
pub fn random_system<R: Rng>(rng: &mut R, cfg: &GenConfig) -> Option<Generated> {
    for _ in 0..cfg.max_attempts {
        let source = random_source(rng, cfg);
        let Ok(sys) = parse_program(&source) else { continue };
        let Ok(analysis) = analyze(&sys) else { continue };
        if cfg.require_accepted && !analysis.accepted() {
            continue;
        }
        return Some(Generated { source, sys, analysis });
    }
    None
}
