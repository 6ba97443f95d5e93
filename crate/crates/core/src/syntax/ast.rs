//! Abstract syntax of annotated Sπ programs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

/// Name of the built-in unit constant.
pub const UNIT_CTOR: &str = "*";
pub const NIL: &str = "nil";
pub const CONS: &str = "cons";

/// A variable or signal name.
///
/// Names written in source carry no stamp. Names created while running a
/// program (restricted signals, environment signals) always carry one, so a
/// runtime value can never be captured by a binder of the source text.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Name {
    pub text: String,
    pub stamp: Option<u32>,
}

impl Name {
    pub fn new(text: impl Into<String>) -> Self {
        Name { text: text.into(), stamp: None }
    }

    pub fn stamped(text: impl Into<String>, stamp: u32) -> Self {
        Name { text: text.into(), stamp: Some(stamp) }
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.stamp {
            None => f.write_str(&self.text),
            Some(k) => write!(f, "{}#{}", self.text, k),
        }
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A thread identifier (the `A` of an equation `A(x) = P`).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ThreadId(pub String);

impl ThreadId {
    pub fn new(s: impl Into<String>) -> Self {
        ThreadId(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ThreadId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for ThreadId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RegionId(pub String);

impl RegionId {
    pub fn new(s: impl Into<String>) -> Self {
        RegionId(s.into())
    }

    /// Region of the private signal introduced by `pause`. It is never
    /// emitted on and takes no part in the region order.
    pub fn local() -> Self {
        RegionId("_local".into())
    }

    pub fn is_local(&self) -> bool {
        self.0 == "_local"
    }
}

impl fmt::Display for RegionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for RegionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A read label: position in the global ordered sequence `y1..ym`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Label(pub u32);

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y{}", self.0)
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TypeExpr {
    Unit,
    Sig(RegionId, Box<TypeExpr>),
    List(Box<TypeExpr>),
    Named(String),
}

impl TypeExpr {
    pub fn sig(region: RegionId, payload: TypeExpr) -> Self {
        TypeExpr::Sig(region, Box::new(payload))
    }

    pub fn list(elem: TypeExpr) -> Self {
        TypeExpr::List(Box::new(elem))
    }

    pub fn is_signal(&self) -> bool {
        matches!(self, TypeExpr::Sig(..))
    }

    /// Region and payload of a signal type.
    pub fn as_sig(&self) -> Option<(&RegionId, &TypeExpr)> {
        match self {
            TypeExpr::Sig(r, t) => Some((r, t)),
            _ => None,
        }
    }
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeExpr::Unit => f.write_str("unit"),
            TypeExpr::Sig(r, t) => write!(f, "sig[{r}]({t})"),
            TypeExpr::List(t) => write!(f, "list({t})"),
            TypeExpr::Named(n) => f.write_str(n),
        }
    }
}

impl fmt::Debug for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Closed data: signal names and constructor terms.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Value {
    Sig(Name),
    Con(String, Vec<Value>),
}

impl Value {
    pub fn nil() -> Self {
        Value::Con(NIL.into(), vec![])
    }

    pub fn cons(head: Value, tail: Value) -> Self {
        Value::Con(CONS.into(), vec![head, tail])
    }

    pub fn unit() -> Self {
        Value::Con(UNIT_CTOR.into(), vec![])
    }

    pub fn constant(c: impl Into<String>) -> Self {
        Value::Con(c.into(), vec![])
    }

    /// Builds `[v1; ...; vn]`.
    pub fn list(items: impl IntoIterator<Item = Value, IntoIter: DoubleEndedIterator>) -> Self {
        items
            .into_iter()
            .rev()
            .fold(Value::nil(), |tail, head| Value::cons(head, tail))
    }

    /// Elements of a proper list, or `None` if this is not a cons chain.
    pub fn as_list(&self) -> Option<Vec<&Value>> {
        let mut out = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                Value::Con(c, args) if c == NIL && args.is_empty() => return Some(out),
                Value::Con(c, args) if c == CONS && args.len() == 2 => {
                    out.push(&args[0]);
                    cur = &args[1];
                }
                _ => return None,
            }
        }
    }

    /// Size: zero for names and constants, one plus the sum of the
    /// arguments' sizes for a constructor with arguments.
    pub fn size(&self) -> u64 {
        match self {
            Value::Sig(_) => 0,
            Value::Con(_, args) if args.is_empty() => 0,
            Value::Con(_, args) => 1 + args.iter().map(Value::size).sum::<u64>(),
        }
    }

    pub fn node_count(&self) -> u64 {
        match self {
            Value::Sig(_) => 1,
            Value::Con(_, args) => 1 + args.iter().map(Value::node_count).sum::<u64>(),
        }
    }

    pub fn names(&self, out: &mut BTreeSet<Name>) {
        match self {
            Value::Sig(n) => {
                out.insert(n.clone());
            }
            Value::Con(_, args) => args.iter().for_each(|a| a.names(out)),
        }
    }

    pub fn to_expr(&self) -> Expr {
        match self {
            Value::Sig(n) => Expr::Var(n.clone()),
            Value::Con(c, args) => Expr::Con(c.clone(), args.iter().map(Value::to_expr).collect()),
        }
    }
}

fn write_args<T: fmt::Display>(f: &mut fmt::Formatter<'_>, args: &[T]) -> fmt::Result {
    f.write_str("(")?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{a}")?;
    }
    f.write_str(")")
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Sig(n) => write!(f, "{n}"),
            Value::Con(c, args) if args.is_empty() => {
                if c == NIL {
                    f.write_str("[]")
                } else {
                    f.write_str(c)
                }
            }
            Value::Con(c, args) => {
                if let Some(items) = self.as_list() {
                    f.write_str("[")?;
                    for (i, v) in items.iter().enumerate() {
                        if i > 0 {
                            f.write_str("; ")?;
                        }
                        write!(f, "{v}")?;
                    }
                    return f.write_str("]");
                }
                f.write_str(c)?;
                write_args(f, args)
            }
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Expressions, including dereferenced signals `!s` (which only occur in
/// the arguments of a present statement's continuation).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Expr {
    Var(Name),
    Con(String, Vec<Expr>),
    App(String, Vec<Expr>),
    Deref(Name, Label),
}

impl Expr {
    pub fn var(n: &str) -> Self {
        Expr::Var(Name::new(n))
    }

    pub fn free_vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            Expr::Var(n) | Expr::Deref(n, _) => {
                out.insert(n.clone());
            }
            Expr::Con(_, args) | Expr::App(_, args) => args.iter().for_each(|a| a.free_vars(out)),
        }
    }

    pub fn labels(&self, out: &mut BTreeSet<Label>) {
        match self {
            Expr::Var(_) => {}
            Expr::Deref(_, l) => {
                out.insert(*l);
            }
            Expr::Con(_, args) | Expr::App(_, args) => args.iter().for_each(|a| a.labels(out)),
        }
    }

    pub fn has_deref(&self) -> bool {
        match self {
            Expr::Var(_) => false,
            Expr::Deref(..) => true,
            Expr::Con(_, args) | Expr::App(_, args) => args.iter().any(Expr::has_deref),
        }
    }

    /// Constructor terms over names only (the "values" of source text).
    pub fn is_constructor_term(&self) -> bool {
        match self {
            Expr::Var(_) => true,
            Expr::Con(_, args) => args.iter().all(Expr::is_constructor_term),
            _ => false,
        }
    }

    /// Reads a constructor term as a value, names becoming signals.
    pub fn to_value(&self) -> Option<Value> {
        match self {
            Expr::Var(n) => Some(Value::Sig(n.clone())),
            Expr::Con(c, args) => Some(Value::Con(
                c.clone(),
                args.iter().map(Expr::to_value).collect::<Option<_>>()?,
            )),
            _ => None,
        }
    }

    pub fn subst(&self, s: &BTreeMap<Name, Expr>) -> Expr {
        match self {
            Expr::Var(n) => s.get(n).cloned().unwrap_or_else(|| self.clone()),
            Expr::Deref(n, l) => match s.get(n) {
                Some(Expr::Var(m)) => Expr::Deref(m.clone(), *l),
                _ => self.clone(),
            },
            Expr::Con(c, args) => Expr::Con(c.clone(), args.iter().map(|a| a.subst(s)).collect()),
            Expr::App(f, args) => Expr::App(f.clone(), args.iter().map(|a| a.subst(s)).collect()),
        }
    }

    fn as_list(&self) -> Option<Vec<&Expr>> {
        let mut out = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                Expr::Con(c, args) if c == NIL && args.is_empty() => return Some(out),
                Expr::Con(c, args) if c == CONS && args.len() == 2 => {
                    out.push(&args[0]);
                    cur = &args[1];
                }
                _ => return None,
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var(n) => write!(f, "{n}"),
            Expr::Deref(n, _) => write!(f, "!{n}"),
            Expr::Con(c, args) if args.is_empty() => {
                if c == NIL {
                    f.write_str("[]")
                } else {
                    f.write_str(c)
                }
            }
            Expr::Con(c, args) => {
                if let Some(items) = self.as_list() {
                    f.write_str("[")?;
                    for (i, v) in items.iter().enumerate() {
                        if i > 0 {
                            f.write_str("; ")?;
                        }
                        write!(f, "{v}")?;
                    }
                    return f.write_str("]");
                }
                f.write_str(c)?;
                write_args(f, args)
            }
            Expr::App(g, args) => {
                f.write_str(g)?;
                write_args(f, args)
            }
        }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pattern {
    Var(Name),
    Con(String, Vec<Pattern>),
}

impl Pattern {
    pub fn vars(&self, out: &mut Vec<Name>) {
        match self {
            Pattern::Var(n) => out.push(n.clone()),
            Pattern::Con(_, args) => args.iter().for_each(|a| a.vars(out)),
        }
    }

    pub fn var_set(&self) -> BTreeSet<Name> {
        let mut v = Vec::new();
        self.vars(&mut v);
        v.into_iter().collect()
    }

    pub fn is_linear(&self) -> bool {
        let mut v = Vec::new();
        self.vars(&mut v);
        let n = v.len();
        v.sort();
        v.dedup();
        v.len() == n
    }

    pub fn to_expr(&self) -> Expr {
        match self {
            Pattern::Var(n) => Expr::Var(n.clone()),
            Pattern::Con(c, args) => Expr::Con(c.clone(), args.iter().map(Pattern::to_expr).collect()),
        }
    }

    pub fn rename(&self, s: &BTreeMap<Name, Name>) -> Pattern {
        match self {
            Pattern::Var(n) => Pattern::Var(s.get(n).cloned().unwrap_or_else(|| n.clone())),
            Pattern::Con(c, args) => Pattern::Con(c.clone(), args.iter().map(|a| a.rename(s)).collect()),
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_expr().fmt(f)
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// The `else` branch of a present statement: a call whose arguments may
/// dereference signals.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Continuation {
    pub target: ThreadId,
    pub args: Vec<Expr>,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Debug)]
pub struct Present {
    pub signal: Name,
    /// `None` exactly for the private present statement produced by `pause`.
    pub label: Option<Label>,
    pub bound: Name,
    pub body: Process,
    pub cont: Continuation,
    pub pause: bool,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Process {
    Nil,
    Call(ThreadId, Vec<Expr>),
    Emit(Name, Expr),
    Present(Box<Present>),
    NameMatch {
        left: Name,
        right: Name,
        then: Box<Process>,
        otherwise: Box<Process>,
    },
    Match {
        scrutinee: Expr,
        pattern: Pattern,
        then: Box<Process>,
        otherwise: Box<Process>,
    },
    New {
        name: Name,
        ty: TypeExpr,
        body: Box<Process>,
    },
    Par(Box<Process>, Box<Process>),
}

impl Process {
    pub fn par(left: Process, right: Process) -> Process {
        Process::Par(Box::new(left), Box::new(right))
    }

    /// `pause.K`, spelled out as a private signal that is never emitted.
    pub fn pause(signal: Name, bound: Name, cont: Continuation) -> Process {
        Process::New {
            name: signal.clone(),
            ty: TypeExpr::sig(RegionId::local(), TypeExpr::Unit),
            body: Box::new(Process::Present(Box::new(Present {
                signal,
                label: None,
                bound,
                body: Process::Nil,
                cont,
                pause: true,
            }))),
        }
    }

    /// The continuation of a body of the shape `pause.K`.
    pub fn as_pause(&self) -> Option<&Continuation> {
        match self {
            Process::New { name, body, .. } => match body.as_ref() {
                Process::Present(p) if p.pause && &p.signal == name => Some(&p.cont),
                _ => None,
            },
            _ => None,
        }
    }

    /// Whether the process syntactically contains a thread call, counting
    /// the continuations of present statements.
    pub fn has_call(&self) -> bool {
        match self {
            Process::Nil | Process::Emit(..) => false,
            Process::Call(..) | Process::Present(_) => true,
            Process::NameMatch { then, otherwise, .. } | Process::Match { then, otherwise, .. } => {
                then.has_call() || otherwise.has_call()
            }
            Process::New { body, .. } => body.has_call(),
            Process::Par(l, r) => l.has_call() || r.has_call(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<Name>) {
        match self {
            Process::Nil => {}
            Process::Call(_, args) => args.iter().for_each(|a| a.free_vars(out)),
            Process::Emit(s, e) => {
                out.insert(s.clone());
                e.free_vars(out);
            }
            Process::Present(p) => {
                out.insert(p.signal.clone());
                let mut inner = p.body.free_vars();
                inner.remove(&p.bound);
                out.extend(inner);
                p.cont.args.iter().for_each(|a| a.free_vars(out));
            }
            Process::NameMatch { left, right, then, otherwise } => {
                out.insert(left.clone());
                out.insert(right.clone());
                then.collect_free(out);
                otherwise.collect_free(out);
            }
            Process::Match { scrutinee, pattern, then, otherwise } => {
                scrutinee.free_vars(out);
                let mut inner = then.free_vars();
                for v in pattern.var_set() {
                    inner.remove(&v);
                }
                out.extend(inner);
                otherwise.collect_free(out);
            }
            Process::New { name, body, .. } => {
                let mut inner = body.free_vars();
                inner.remove(name);
                out.extend(inner);
            }
            Process::Par(l, r) => {
                l.collect_free(out);
                r.collect_free(out);
            }
        }
    }

    /// Calls visited in source order, with the continuation calls of
    /// present statements flagged.
    pub fn visit_calls<'a>(&'a self, f: &mut impl FnMut(&'a ThreadId, bool)) {
        match self {
            Process::Nil | Process::Emit(..) => {}
            Process::Call(id, _) => f(id, false),
            Process::Present(p) => {
                p.body.visit_calls(f);
                f(&p.cont.target, true);
            }
            Process::NameMatch { then, otherwise, .. } | Process::Match { then, otherwise, .. } => {
                then.visit_calls(f);
                otherwise.visit_calls(f);
            }
            Process::New { body, .. } => body.visit_calls(f),
            Process::Par(l, r) => {
                l.visit_calls(f);
                r.visit_calls(f);
            }
        }
    }

    /// Emissions in source order, with the name of the signal emitted on.
    pub fn visit_emits<'a>(&'a self, f: &mut impl FnMut(&'a Name, &'a Expr)) {
        match self {
            Process::Nil | Process::Call(..) => {}
            Process::Emit(s, e) => f(s, e),
            Process::Present(p) => p.body.visit_emits(f),
            Process::NameMatch { then, otherwise, .. } | Process::Match { then, otherwise, .. } => {
                then.visit_emits(f);
                otherwise.visit_emits(f);
            }
            Process::New { body, .. } => body.visit_emits(f),
            Process::Par(l, r) => {
                l.visit_emits(f);
                r.visit_emits(f);
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Debug, Default)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    #[default]
    Lex,
    Mset,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Lex => "lex",
            Status::Mset => "mset",
        })
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ThreadAnnotation {
    pub reset: bool,
    pub status: Status,
    /// Parameter positions (1-based) counted in size comparisons.
    pub mask: BTreeSet<usize>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Param {
    pub name: Name,
    pub ty: TypeExpr,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Equation {
    pub name: ThreadId,
    pub params: Vec<Param>,
    pub annotation: ThreadAnnotation,
    pub body: Process,
    #[serde(skip)]
    pub line: usize,
}

// Source positions are not part of a declaration's identity.
impl PartialEq for Equation {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.params == other.params
            && self.annotation == other.annotation
            && self.body == other.body
    }
}

impl Eq for Equation {}

impl PartialEq for FunDecl {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.params == other.params
            && self.result == other.result
            && self.rules == other.rules
    }
}

impl Eq for FunDecl {}

impl Equation {
    pub fn arity(&self) -> usize {
        self.params.len()
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct FunRule {
    pub patterns: Vec<Pattern>,
    pub body: Expr,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FunDecl {
    pub name: String,
    pub params: Vec<TypeExpr>,
    pub result: TypeExpr,
    pub rules: Vec<FunRule>,
    #[serde(skip)]
    pub line: usize,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CtorDecl {
    pub name: String,
    pub args: Vec<TypeExpr>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct TypeDecl {
    pub name: String,
    pub ctors: Vec<CtorDecl>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelKind {
    Present,
    Deref,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct LabelInfo {
    pub label: Label,
    pub signal: Name,
    pub kind: LabelKind,
    pub owner: ThreadId,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct InitConfig {
    pub restricted: Vec<(Name, Option<TypeExpr>)>,
    pub threads: Vec<(ThreadId, Vec<Expr>)>,
}

/// A parsed program: declarations, equations and the initial configuration.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct EquationSystem {
    pub regions: Vec<RegionId>,
    /// Pairs `(greater, lesser)` of the declared strict order.
    pub region_order: Vec<(RegionId, RegionId)>,
    pub types: Vec<TypeDecl>,
    pub functions: Vec<FunDecl>,
    pub equations: Vec<Equation>,
    pub init: Option<InitConfig>,
    pub labels: Vec<LabelInfo>,
}

/// Signature of a constructor: argument types and result type. `None` in
/// an argument slot stands for the element type of a list constructor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CtorSig<'a> {
    Nil,
    Cons,
    Unit,
    User { ty: &'a str, args: &'a [TypeExpr] },
}

impl EquationSystem {
    pub fn equation(&self, id: &ThreadId) -> Option<&Equation> {
        self.equations.iter().find(|e| &e.name == id)
    }

    pub fn function(&self, name: &str) -> Option<&FunDecl> {
        self.functions.iter().find(|f| f.name == name)
    }

    pub fn type_decl(&self, name: &str) -> Option<&TypeDecl> {
        self.types.iter().find(|t| t.name == name)
    }

    pub fn constructor(&self, name: &str) -> Option<CtorSig<'_>> {
        match name {
            NIL => return Some(CtorSig::Nil),
            CONS => return Some(CtorSig::Cons),
            UNIT_CTOR => return Some(CtorSig::Unit),
            _ => {}
        }
        self.types.iter().find_map(|t| {
            t.ctors
                .iter()
                .find(|c| c.name == name)
                .map(|c| CtorSig::User { ty: &t.name, args: &c.args })
        })
    }

    pub fn constructor_arity(&self, name: &str) -> Option<usize> {
        self.constructor(name).map(|c| match c {
            CtorSig::Nil | CtorSig::Unit => 0,
            CtorSig::Cons => 2,
            CtorSig::User { args, .. } => args.len(),
        })
    }

    pub fn is_reset(&self, id: &ThreadId) -> bool {
        self.equation(id).is_some_and(|e| e.annotation.reset)
    }

    pub fn label_info(&self, l: Label) -> Option<&LabelInfo> {
        self.labels.iter().find(|i| i.label == l)
    }

    /// Constructors of a type, used by pattern completeness and value
    /// enumeration. `None` for signal types, which have no constructors.
    pub fn constructors_of(&self, ty: &TypeExpr) -> Option<Vec<(String, Vec<TypeExpr>)>> {
        match ty {
            TypeExpr::Unit => Some(vec![(UNIT_CTOR.into(), vec![])]),
            TypeExpr::List(t) => Some(vec![
                (NIL.into(), vec![]),
                (CONS.into(), vec![(**t).clone(), ty.clone()]),
            ]),
            TypeExpr::Named(n) => self
                .type_decl(n)
                .map(|d| d.ctors.iter().map(|c| (c.name.clone(), c.args.clone())).collect()),
            TypeExpr::Sig(..) => None,
        }
    }

    /// Whether every value of the type has size zero.
    pub fn is_size_zero_type(&self, ty: &TypeExpr) -> bool {
        match ty {
            TypeExpr::Unit | TypeExpr::Sig(..) => true,
            TypeExpr::List(_) => false,
            TypeExpr::Named(n) => self
                .type_decl(n)
                .is_some_and(|d| d.ctors.iter().all(|c| c.args.is_empty())),
        }
    }
}
