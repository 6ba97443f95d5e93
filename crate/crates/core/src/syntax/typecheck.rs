//! First-order type checking with region-sensitive signal types, plus the
//! orthogonality and completeness checks on function rules.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::ast::*;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TypeError {
    pub site: String,
    pub line: usize,
    pub msg: String,
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {} ({}): {}", self.line, self.site, self.msg)
    }
}

/// What a read label stands for: the region of the signal read and the
/// type of the value bound to the label (the payload type for a present
/// statement, the list of payloads for a dereference).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LabelType {
    pub region: RegionId,
    pub ty: TypeExpr,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TypeReport {
    pub label_types: BTreeMap<Label, LabelType>,
    /// Types of the names of the initial configuration, restricted or free.
    pub init_types: BTreeMap<Name, TypeExpr>,
    /// Regions of the signals each equation body may emit on.
    pub emit_regions: BTreeMap<ThreadId, BTreeSet<RegionId>>,
}

impl TypeReport {
    pub fn label_region(&self, l: Label) -> Option<&RegionId> {
        self.label_types.get(&l).map(|t| &t.region)
    }
}

pub type TypeEnv = BTreeMap<Name, TypeExpr>;
type Env = TypeEnv;

struct Checker<'a> {
    sys: &'a EquationSystem,
    errors: Vec<TypeError>,
    site: String,
    line: usize,
    owner: Option<ThreadId>,
    report: TypeReport,
}

impl<'a> Checker<'a> {
    fn new(sys: &'a EquationSystem) -> Self {
        Checker {
            sys,
            errors: Vec::new(),
            site: String::new(),
            line: 0,
            owner: None,
            report: TypeReport::default(),
        }
    }
}

pub fn typecheck(sys: &EquationSystem) -> Result<TypeReport, Vec<TypeError>> {
    let mut c = Checker::new(sys);
    c.declarations();
    for f in &sys.functions {
        c.function(f);
    }
    for eq in &sys.equations {
        c.equation(eq);
    }
    if let Some(init) = &sys.init {
        c.init(init);
    }
    if c.errors.is_empty() {
        Ok(c.report)
    } else {
        Err(c.errors)
    }
}

/// Checks a single process under a typing of its free names. Used on
/// runtime configurations, whose names carry stamps.
pub fn check_process(sys: &EquationSystem, env: &TypeEnv, p: &Process) -> Result<(), Vec<TypeError>> {
    let mut c = Checker::new(sys);
    c.site = "process".into();
    c.process(env, p);
    if c.errors.is_empty() {
        Ok(())
    } else {
        Err(c.errors)
    }
}

/// The type of an expression, if it is well typed.
pub fn infer_expr(sys: &EquationSystem, env: &TypeEnv, e: &Expr) -> Option<TypeExpr> {
    let mut c = Checker::new(sys);
    let t = c.infer(env, e);
    if c.errors.is_empty() {
        t
    } else {
        None
    }
}

/// Extends `out` with the types of the variables of a pattern matched
/// against a value of type `ty`. False if the pattern does not fit.
pub fn bind_pattern(sys: &EquationSystem, p: &Pattern, ty: &TypeExpr, out: &mut TypeEnv) -> bool {
    let mut c = Checker::new(sys);
    c.pattern(p, ty, out);
    c.errors.is_empty()
}

impl Checker<'_> {
    fn error(&mut self, msg: impl Into<String>) {
        self.errors.push(TypeError { site: self.site.clone(), line: self.line, msg: msg.into() });
    }

    fn well_formed(&mut self, ty: &TypeExpr) {
        match ty {
            TypeExpr::Unit => {}
            TypeExpr::Sig(r, t) => {
                if !r.is_local() && !self.sys.regions.contains(r) {
                    self.error(format!("undeclared region `{r}`"));
                }
                self.well_formed(t);
            }
            TypeExpr::List(t) => self.well_formed(t),
            TypeExpr::Named(n) => {
                if self.sys.type_decl(n).is_none() {
                    self.error(format!("undeclared type `{n}`"));
                }
            }
        }
    }

    fn declarations(&mut self) {
        self.site = "declarations".into();
        let mut tys = Vec::new();
        for t in &self.sys.types {
            for c in &t.ctors {
                tys.extend(c.args.iter().cloned());
            }
        }
        for t in &tys {
            self.well_formed(t);
        }
        for (g, l) in &self.sys.region_order {
            if g == l {
                self.error(format!("region `{g}` declared below itself"));
            }
        }
    }

    fn infer(&mut self, env: &Env, e: &Expr) -> Option<TypeExpr> {
        match e {
            Expr::Var(n) => match env.get(n) {
                Some(t) => Some(t.clone()),
                None => {
                    self.error(format!("unbound name `{n}`"));
                    None
                }
            },
            Expr::Deref(s, l) => match env.get(s) {
                Some(TypeExpr::Sig(r, t)) => {
                    let ty = TypeExpr::List(t.clone());
                    self.report.label_types.insert(*l, LabelType { region: r.clone(), ty: ty.clone() });
                    Some(ty)
                }
                Some(t) => {
                    self.error(format!("`!{s}` dereferences a name of non-signal type {t}"));
                    None
                }
                None => {
                    self.error(format!("unbound name `{s}`"));
                    None
                }
            },
            Expr::Con(c, args) => match self.sys.constructor(c) {
                Some(CtorSig::Unit) => Some(TypeExpr::Unit),
                Some(CtorSig::Nil) => {
                    self.error("cannot infer the element type of `[]` here");
                    None
                }
                Some(CtorSig::Cons) => {
                    let head = self.infer(env, &args[0])?;
                    let ty = TypeExpr::list(head);
                    self.check(env, &args[1], &ty);
                    Some(ty)
                }
                Some(CtorSig::User { ty, args: params }) => {
                    for (a, p) in args.iter().zip(params) {
                        self.check(env, a, p);
                    }
                    Some(TypeExpr::Named(ty.to_string()))
                }
                None => {
                    self.error(format!("undeclared constructor `{c}`"));
                    None
                }
            },
            Expr::App(f, args) => match self.sys.function(f) {
                Some(decl) => {
                    if decl.params.len() != args.len() {
                        self.error(format!("`{f}` expects {} argument(s)", decl.params.len()));
                        return None;
                    }
                    for (a, p) in args.iter().zip(&decl.params) {
                        self.check(env, a, p);
                    }
                    Some(decl.result.clone())
                }
                None => {
                    self.error(format!("undeclared function `{f}`"));
                    None
                }
            },
        }
    }

    fn check(&mut self, env: &Env, e: &Expr, expected: &TypeExpr) {
        if let Expr::Con(c, args) = e {
            match (c.as_str(), expected) {
                (NIL, TypeExpr::List(_)) if args.is_empty() => return,
                (CONS, TypeExpr::List(elem)) if args.len() == 2 => {
                    self.check(env, &args[0], elem);
                    self.check(env, &args[1], expected);
                    return;
                }
                (NIL, _) | (CONS, _) => {
                    self.error(format!("list `{e}` used where {expected} is expected"));
                    return;
                }
                _ => {}
            }
        }
        if let Some(found) = self.infer(env, e) {
            if &found != expected {
                self.error(format!("`{e}` has type {found}, expected {expected}"));
            }
        }
    }

    fn value_type(&mut self, env: &Env, v: &Expr, pattern: &Pattern, then: &Process) -> Option<TypeExpr> {
        let mut quiet = Checker::new(self.sys);
        if let Some(t) = quiet.infer(env, v) {
            if quiet.errors.is_empty() {
                return Some(t);
            }
        }
        for t in mentioned_types(self.sys) {
            let mut c = Checker::new(self.sys);
            c.check(env, v, &t);
            let mut inner = env.clone();
            c.pattern(pattern, &t, &mut inner);
            c.process(&inner, then);
            if c.errors.is_empty() {
                return Some(t);
            }
        }
        self.error(format!("no type fits the value `{v}` and the branch matching {pattern}"));
        None
    }

    fn pattern(&mut self, p: &Pattern, ty: &TypeExpr, out: &mut Env) {
        match p {
            Pattern::Var(n) => {
                if out.insert(n.clone(), ty.clone()).is_some() {
                    self.error(format!("variable `{n}` bound twice in a pattern"));
                }
            }
            Pattern::Con(c, args) => {
                let ok = match (self.sys.constructor(c), ty) {
                    (Some(CtorSig::Unit), TypeExpr::Unit) => true,
                    (Some(CtorSig::Nil), TypeExpr::List(_)) => true,
                    (Some(CtorSig::Cons), TypeExpr::List(elem)) => {
                        self.pattern(&args[0], elem, out);
                        self.pattern(&args[1], ty, out);
                        true
                    }
                    (Some(CtorSig::User { ty: owner, args: params }), TypeExpr::Named(n)) if owner == n => {
                        for (a, t) in args.iter().zip(params) {
                            self.pattern(a, t, out);
                        }
                        true
                    }
                    _ => false,
                };
                if !ok {
                    self.error(format!("pattern `{p}` does not have type {ty}"));
                }
            }
        }
    }

    fn function(&mut self, f: &FunDecl) {
        self.site = format!("fun {}", f.name);
        self.line = f.line;
        self.owner = None;
        for t in f.params.iter().chain([&f.result]) {
            self.well_formed(t);
        }
        for rule in &f.rules {
            let mut env = Env::new();
            for (p, t) in rule.patterns.iter().zip(&f.params) {
                self.pattern(p, t, &mut env);
            }
            self.check(&env, &rule.body, &f.result);
        }
        for (i, a) in f.rules.iter().enumerate() {
            for b in &f.rules[i + 1..] {
                if a.patterns.iter().zip(&b.patterns).all(|(p, q)| unifiable(p, q)) {
                    self.error(format!(
                        "overlapping rules ({}) and ({})",
                        join_patterns(&a.patterns),
                        join_patterns(&b.patterns)
                    ));
                }
            }
        }
        let rows: Vec<Vec<Pattern>> = f.rules.iter().map(|r| r.patterns.clone()).collect();
        if !exhaustive(self.sys, &rows, &f.params) {
            self.error("rules do not cover every input");
        }
    }

    fn equation(&mut self, eq: &Equation) {
        self.site = format!("def {}", eq.name);
        self.line = eq.line;
        self.owner = Some(eq.name.clone());
        let mut env = Env::new();
        for p in &eq.params {
            self.well_formed(&p.ty);
            if env.insert(p.name.clone(), p.ty.clone()).is_some() {
                self.error(format!("duplicate parameter `{}`", p.name));
            }
        }
        let n = eq.arity();
        if eq.annotation.reset && eq.annotation.mask.len() != n {
            self.error("a reset identifier cannot mask any parameter");
        }
        self.process(&env, &eq.body);
    }

    fn call(&mut self, env: &Env, id: &ThreadId, args: &[Expr]) {
        let Some(target) = self.sys.equation(id) else {
            self.error(format!("undefined thread identifier `{id}`"));
            return;
        };
        if target.arity() != args.len() {
            self.error(format!("`{id}` expects {} argument(s), found {}", target.arity(), args.len()));
            return;
        }
        for (a, p) in args.iter().zip(&target.params) {
            self.check(env, a, &p.ty);
        }
    }

    fn signal_type(&mut self, env: &Env, s: &Name) -> Option<(RegionId, TypeExpr)> {
        match env.get(s) {
            Some(TypeExpr::Sig(r, t)) => Some((r.clone(), (**t).clone())),
            Some(t) => {
                self.error(format!("`{s}` has type {t}, expected a signal"));
                None
            }
            None => {
                self.error(format!("unbound name `{s}`"));
                None
            }
        }
    }

    fn process(&mut self, env: &Env, p: &Process) {
        match p {
            Process::Nil => {}
            Process::Call(id, args) => self.call(env, id, args),
            Process::Emit(s, e) => {
                if let Some((r, t)) = self.signal_type(env, s) {
                    if let Some(owner) = &self.owner {
                        self.report.emit_regions.entry(owner.clone()).or_default().insert(r);
                    }
                    self.check(env, e, &t);
                }
            }
            Process::Present(pr) => {
                let payload = self.signal_type(env, &pr.signal);
                let mut inner = env.clone();
                if let Some((r, t)) = payload {
                    if let Some(l) = pr.label {
                        self.report.label_types.insert(l, LabelType { region: r, ty: t.clone() });
                    }
                    inner.insert(pr.bound.clone(), t);
                }
                self.process(&inner, &pr.body);
                self.call(env, &pr.cont.target, &pr.cont.args);
            }
            Process::NameMatch { left, right, then, otherwise } => {
                let a = self.signal_type(env, left);
                let b = self.signal_type(env, right);
                if let (Some(a), Some(b)) = (a, b) {
                    if a != b {
                        self.error(format!("comparing `{left}` and `{right}` of different signal types"));
                    }
                }
                self.process(env, then);
                self.process(env, otherwise);
            }
            Process::Match { scrutinee, pattern, then, otherwise } => {
                if let Expr::Var(x) = scrutinee {
                    if then.free_vars().contains(x) && !pattern.var_set().contains(x) {
                        self.error(format!("matched variable `{x}` occurs in the then-branch"));
                    }
                }
                if scrutinee.has_deref() || matches!(scrutinee, Expr::App(..)) {
                    self.error("the scrutinee of a match must be a variable or a value");
                }
                let mut inner = env.clone();
                let ty = match scrutinee.to_value() {
                    // Values reached at run time may contain `[]` of any
                    // element type; any type under which the branch checks
                    // will do.
                    Some(_) => self.value_type(env, scrutinee, pattern, then),
                    None => self.infer(env, scrutinee),
                };
                if let Some(t) = ty {
                    let mut binds = Env::new();
                    self.pattern(pattern, &t, &mut binds);
                    inner.extend(binds);
                }
                self.process(&inner, then);
                self.process(env, otherwise);
            }
            Process::New { name, ty, body } => {
                self.well_formed(ty);
                if !ty.is_signal() {
                    self.error(format!("restricted name `{name}` must have a signal type, found {ty}"));
                }
                let mut inner = env.clone();
                inner.insert(name.clone(), ty.clone());
                self.process(&inner, body);
            }
            Process::Par(l, r) => {
                self.process(env, l);
                self.process(env, r);
            }
        }
    }

    fn init_value(&mut self, e: &Expr, expected: &TypeExpr, names: &mut Env) {
        match e {
            Expr::Var(n) => {
                if !expected.is_signal() {
                    self.error(format!("name `{n}` used at non-signal type {expected}"));
                }
                match names.get(n) {
                    Some(t) if t != expected => {
                        self.error(format!("`{n}` used at types {t} and {expected}"));
                    }
                    Some(_) => {}
                    None => {
                        names.insert(n.clone(), expected.clone());
                    }
                }
            }
            Expr::Con(c, args) => match (self.sys.constructor(c), expected) {
                (Some(CtorSig::Unit), TypeExpr::Unit) => {}
                (Some(CtorSig::Nil), TypeExpr::List(_)) => {}
                (Some(CtorSig::Cons), TypeExpr::List(elem)) => {
                    self.init_value(&args[0], elem, names);
                    self.init_value(&args[1], expected, names);
                }
                (Some(CtorSig::User { ty, args: params }), TypeExpr::Named(n)) if ty == n => {
                    for (a, t) in args.iter().zip(params) {
                        self.init_value(a, t, names);
                    }
                }
                _ => self.error(format!("`{e}` does not have type {expected}")),
            },
            _ => self.error(format!("initial arguments must be values, found `{e}`")),
        }
    }

    fn init(&mut self, init: &InitConfig) {
        self.site = "init".into();
        self.line = 0;
        self.owner = None;
        let mut names = Env::new();
        for (n, ty) in &init.restricted {
            if let Some(t) = ty {
                self.well_formed(t);
                if !t.is_signal() {
                    self.error(format!("restricted name `{n}` must have a signal type"));
                }
                names.insert(n.clone(), t.clone());
            }
        }
        for (id, args) in &init.threads {
            let Some(eq) = self.sys.equation(id) else {
                self.error(format!("undefined thread identifier `{id}`"));
                continue;
            };
            if eq.arity() != args.len() {
                self.error(format!("`{id}` expects {} argument(s)", eq.arity()));
                continue;
            }
            for (a, p) in args.iter().zip(&eq.params) {
                self.init_value(a, &p.ty, &mut names);
            }
        }
        for (n, _) in &init.restricted {
            if !names.contains_key(n) {
                self.error(format!("cannot infer the type of restricted name `{n}`"));
            }
        }
        self.report.init_types = names;
    }
}

fn join_patterns(ps: &[Pattern]) -> String {
    ps.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ")
}

/// Two linear patterns with disjoint variables unify iff their constructor
/// skeletons agree wherever both are constructors.
fn unifiable(p: &Pattern, q: &Pattern) -> bool {
    match (p, q) {
        (Pattern::Var(_), _) | (_, Pattern::Var(_)) => true,
        (Pattern::Con(c, a), Pattern::Con(d, b)) => {
            c == d && a.len() == b.len() && a.iter().zip(b).all(|(x, y)| unifiable(x, y))
        }
    }
}

/// Pattern-matrix completeness: every tuple of values of the given types
/// matches some row.
pub fn exhaustive(sys: &EquationSystem, rows: &[Vec<Pattern>], tys: &[TypeExpr]) -> bool {
    if tys.is_empty() {
        return !rows.is_empty();
    }
    let any_con = rows.iter().any(|r| matches!(r[0], Pattern::Con(..)));
    let ctors = if any_con { sys.constructors_of(&tys[0]) } else { None };
    let Some(ctors) = ctors else {
        let tails: Vec<Vec<Pattern>> = rows
            .iter()
            .filter(|r| matches!(r[0], Pattern::Var(_)))
            .map(|r| r[1..].to_vec())
            .collect();
        return exhaustive(sys, &tails, &tys[1..]);
    };
    ctors.iter().all(|(c, arg_tys)| {
        let wild = Pattern::Var(Name::new("_"));
        let spec: Vec<Vec<Pattern>> = rows
            .iter()
            .filter_map(|r| match &r[0] {
                Pattern::Var(_) => {
                    let mut row = vec![wild.clone(); arg_tys.len()];
                    row.extend_from_slice(&r[1..]);
                    Some(row)
                }
                Pattern::Con(d, args) if d == c => {
                    let mut row = args.clone();
                    row.extend_from_slice(&r[1..]);
                    Some(row)
                }
                Pattern::Con(..) => None,
            })
            .collect();
        let mut next_tys = arg_tys.clone();
        next_tys.extend_from_slice(&tys[1..]);
        exhaustive(sys, &spec, &next_tys)
    })
}

/// Names occurring free in a body but not among its parameters.
pub fn unbound_names(eq: &Equation) -> BTreeSet<Name> {
    let params: BTreeSet<Name> = eq.params.iter().map(|p| p.name.clone()).collect();
    eq.body.free_vars().difference(&params).cloned().collect()
}

/// Every type written in the program, with its component types.
fn mentioned_types(sys: &EquationSystem) -> BTreeSet<TypeExpr> {
    fn add(t: &TypeExpr, out: &mut BTreeSet<TypeExpr>) {
        if !out.insert(t.clone()) {
            return;
        }
        match t {
            TypeExpr::Sig(_, u) | TypeExpr::List(u) => add(u, out),
            TypeExpr::Unit | TypeExpr::Named(_) => {}
        }
    }
    let mut out = BTreeSet::new();
    for eq in &sys.equations {
        for p in &eq.params {
            add(&p.ty, &mut out);
        }
    }
    for f in &sys.functions {
        for t in f.params.iter().chain([&f.result]) {
            add(t, &mut out);
        }
    }
    for d in &sys.types {
        out.insert(TypeExpr::Named(d.name.clone()));
        for c in &d.ctors {
            for t in &c.args {
                add(t, &mut out);
            }
        }
    }
    out
}
