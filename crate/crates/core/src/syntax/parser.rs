//! Recursive-descent parser for the `.spi` format (grammar in `docs/grammar.md`).

use std::collections::{BTreeMap, BTreeSet};

use super::ast::*;
use super::error::SyntaxError;
use super::lexer::{tokenize, Tok, Token, KEYWORDS};

/// Parses a complete program. `pause.K` is desugared into a private
/// signal and a present statement that can never fire.
pub fn parse_program(src: &str) -> Result<EquationSystem, SyntaxError> {
    let toks = tokenize(src)?;
    let mut p = Parser::new(toks);
    p.program()?;
    let mut sys = p.sys;
    resolve(&mut sys)?;
    Ok(sys)
}

/// Parses a single closed value such as `req(s#1, succ(zero))` against the
/// constructors of `sys`. Unstamped names are read as stamp 0.
pub fn parse_value(sys: &EquationSystem, src: &str) -> Result<Value, SyntaxError> {
    let toks = tokenize(src)?;
    let mut p = Parser::new(toks);
    let mut e = p.expr(false)?;
    p.expect_eof()?;
    resolve_expr(sys, &mut e, 1)?;
    fn stamp(e: &Expr) -> Expr {
        match e {
            Expr::Var(n) if n.stamp.is_none() => Expr::Var(Name::stamped(n.text.clone(), 0)),
            Expr::Con(c, args) => Expr::Con(c.clone(), args.iter().map(stamp).collect()),
            other => other.clone(),
        }
    }
    stamp(&e)
        .to_value()
        .ok_or_else(|| SyntaxError::at(1, 1, "expected a value (constructors and names only)"))
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    sys: EquationSystem,
    next_label: u32,
    pauses: u32,
    owner: Option<ThreadId>,
}

impl Parser {
    fn new(toks: Vec<Token>) -> Self {
        Parser {
            toks,
            pos: 0,
            sys: EquationSystem::default(),
            next_label: 1,
            pauses: 0,
            owner: None,
        }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, SyntaxError> {
        let (l, c) = self.here();
        Err(SyntaxError::at(l, c, msg))
    }

    fn describe(&self) -> String {
        match self.peek() {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Stamped(s, k) => format!("`{s}#{k}`"),
            Tok::Num(n) => format!("`{n}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == kw)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), SyntaxError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.err(format!("expected `{s}`, found {}", self.describe()))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> Result<(), SyntaxError> {
        if self.is_kw(kw) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected `{kw}`, found {}", self.describe()))
        }
    }

    fn expect_eof(&self) -> Result<(), SyntaxError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.err(format!("unexpected {}", self.describe()))
        }
    }

    fn ident(&mut self) -> Result<String, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            _ => self.err(format!("expected an identifier, found {}", self.describe())),
        }
    }

    fn name(&mut self) -> Result<Name, SyntaxError> {
        match self.peek().clone() {
            Tok::Stamped(s, k) => {
                self.bump();
                Ok(Name::stamped(s, k))
            }
            _ => self.ident().map(Name::new),
        }
    }

    fn comma_list<T>(
        &mut self,
        close: &str,
        mut item: impl FnMut(&mut Self) -> Result<T, SyntaxError>,
    ) -> Result<Vec<T>, SyntaxError> {
        let mut out = Vec::new();
        if self.eat_sym(close) {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.eat_sym(close) {
                return Ok(out);
            }
            self.expect_sym(",")?;
        }
    }

    fn program(&mut self) -> Result<(), SyntaxError> {
        if *self.peek() == Tok::Eof {
            return self.err("empty program");
        }
        while *self.peek() != Tok::Eof {
            let line = self.here().0;
            match self.peek().clone() {
                Tok::Ident(kw) if kw == "region" => self.region_decl(line)?,
                Tok::Ident(kw) if kw == "type" => self.type_decl(line)?,
                Tok::Ident(kw) if kw == "fun" => self.fun_decl(line)?,
                Tok::Ident(kw) if kw == "def" => self.def_decl(line)?,
                Tok::Ident(kw) if kw == "init" => self.init_decl(line)?,
                _ => {
                    return self.err(format!(
                        "expected `region`, `type`, `fun`, `def` or `init`, found {}",
                        self.describe()
                    ))
                }
            }
            self.eat_sym(";");
        }
        Ok(())
    }

    fn region_decl(&mut self, line: usize) -> Result<(), SyntaxError> {
        self.expect_kw("region")?;
        let r = RegionId::new(self.ident()?);
        if self.sys.regions.contains(&r) {
            return Err(SyntaxError::Duplicate { line, what: "region", name: r.0 });
        }
        let mut below = Vec::new();
        if self.eat_sym(">") {
            loop {
                let lower = RegionId::new(self.ident()?);
                if !self.sys.regions.contains(&lower) {
                    return Err(SyntaxError::UndeclaredRegion { line, region: lower.0 });
                }
                below.push(lower);
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
        self.sys.regions.push(r.clone());
        for lower in below {
            self.sys.region_order.push((r.clone(), lower));
        }
        Ok(())
    }

    fn type_decl(&mut self, line: usize) -> Result<(), SyntaxError> {
        self.expect_kw("type")?;
        let name = self.ident()?;
        if matches!(name.as_str(), "unit" | "sig" | "list") || self.sys.type_decl(&name).is_some() {
            return Err(SyntaxError::Duplicate { line, what: "type", name });
        }
        self.expect_sym("=")?;
        let mut ctors = Vec::new();
        loop {
            let cname = self.ident()?;
            let known = self.sys.constructor(&cname).is_some()
                || ctors.iter().any(|c: &CtorDecl| c.name == cname);
            if known {
                return Err(SyntaxError::Duplicate { line, what: "constructor", name: cname });
            }
            let args = if self.eat_sym("(") {
                self.comma_list(")", |p| p.type_expr())?
            } else {
                Vec::new()
            };
            ctors.push(CtorDecl { name: cname, args });
            if !self.eat_sym("|") {
                break;
            }
        }
        self.sys.types.push(TypeDecl { name, ctors });
        Ok(())
    }

    fn type_expr(&mut self) -> Result<TypeExpr, SyntaxError> {
        let line = self.here().0;
        if let Tok::Num(1) = self.peek() {
            self.bump();
            return Ok(TypeExpr::Unit);
        }
        let name = self.ident()?;
        match name.as_str() {
            "unit" => Ok(TypeExpr::Unit),
            "list" => {
                self.expect_sym("(")?;
                let t = self.type_expr()?;
                self.expect_sym(")")?;
                Ok(TypeExpr::list(t))
            }
            "sig" => {
                self.expect_sym("[")?;
                let r = RegionId::new(self.ident()?);
                if !self.sys.regions.contains(&r) {
                    return Err(SyntaxError::UndeclaredRegion { line, region: r.0 });
                }
                self.expect_sym("]")?;
                self.expect_sym("(")?;
                let t = self.type_expr()?;
                self.expect_sym(")")?;
                Ok(TypeExpr::sig(r, t))
            }
            _ => Ok(TypeExpr::Named(name)),
        }
    }

    fn fun_decl(&mut self, line: usize) -> Result<(), SyntaxError> {
        self.expect_kw("fun")?;
        let name = self.ident()?;
        if self.sys.function(&name).is_some() {
            return Err(SyntaxError::Duplicate { line, what: "function", name });
        }
        self.expect_sym("(")?;
        let params = self.comma_list(")", |p| p.type_expr())?;
        self.expect_sym("->")?;
        let result = self.type_expr()?;
        self.expect_sym("{")?;
        let mut rules = Vec::new();
        while !self.eat_sym("}") {
            self.expect_sym("(")?;
            let patterns = self.comma_list(")", |p| p.pattern())?;
            self.expect_sym("=>")?;
            let body = self.expr(false)?;
            self.expect_sym(";")?;
            rules.push(FunRule { patterns, body });
        }
        self.sys.functions.push(FunDecl { name, params, result, rules, line });
        Ok(())
    }

    fn def_decl(&mut self, line: usize) -> Result<(), SyntaxError> {
        self.expect_kw("def")?;
        let name = ThreadId::new(self.ident()?);
        if self.sys.equation(&name).is_some() {
            return Err(SyntaxError::Duplicate { line, what: "equation", name: name.0 });
        }
        self.expect_sym("(")?;
        let params = self.comma_list(")", |p| {
            let name = p.name()?;
            p.expect_sym(":")?;
            Ok(Param { name, ty: p.type_expr()? })
        })?;
        let arity = params.len();
        let mut annotation = ThreadAnnotation {
            reset: false,
            status: Status::Lex,
            mask: (1..=arity).collect(),
        };
        if self.eat_sym("[") {
            let mut explicit_mask = false;
            loop {
                let key = self.ident()?;
                match key.as_str() {
                    "reset" => annotation.reset = true,
                    "status" => {
                        self.expect_sym("=")?;
                        annotation.status = match self.ident()?.as_str() {
                            "lex" => Status::Lex,
                            "mset" => Status::Mset,
                            other => return self.err(format!("unknown status `{other}`")),
                        };
                    }
                    "mask" => {
                        self.expect_sym("=")?;
                        self.expect_sym("{")?;
                        let positions = self.comma_list("}", |p| match p.bump() {
                            Tok::Num(n) => Ok(n as usize),
                            _ => p.err("expected a parameter position"),
                        })?;
                        if let Some(bad) = positions.iter().find(|&&i| i == 0 || i > arity) {
                            return self.err(format!("mask position {bad} out of range 1..{arity}"));
                        }
                        annotation.mask = positions.into_iter().collect();
                        explicit_mask = true;
                    }
                    other => return self.err(format!("unknown annotation `{other}`")),
                }
                if self.eat_sym("]") {
                    break;
                }
                self.expect_sym(",")?;
            }
            if annotation.reset && explicit_mask && annotation.mask.len() != arity {
                return self.err("a reset identifier cannot mask any parameter");
            }
        }
        self.expect_sym("=")?;
        self.owner = Some(name.clone());
        let body = self.process()?;
        self.owner = None;
        self.sys.equations.push(Equation { name, params, annotation, body, line });
        Ok(())
    }

    fn init_decl(&mut self, line: usize) -> Result<(), SyntaxError> {
        self.expect_kw("init")?;
        if self.sys.init.is_some() {
            return Err(SyntaxError::Duplicate { line, what: "init", name: "init".into() });
        }
        let mut restricted = Vec::new();
        if self.is_kw("nu") {
            self.bump();
            loop {
                let n = self.name()?;
                let ty = if self.eat_sym(":") { Some(self.type_expr()?) } else { None };
                restricted.push((n, ty));
                if !self.eat_sym(",") {
                    break;
                }
            }
            self.expect_sym(".")?;
        }
        let mut threads = Vec::new();
        if let Tok::Num(0) = self.peek() {
            self.bump();
            self.sys.init = Some(InitConfig { restricted, threads });
            return Ok(());
        }
        loop {
            let id = ThreadId::new(self.ident()?);
            self.expect_sym("(")?;
            let args = self.comma_list(")", |p| p.expr(false))?;
            threads.push((id, args));
            if !self.eat_sym("|") {
                break;
            }
        }
        self.sys.init = Some(InitConfig { restricted, threads });
        Ok(())
    }

    fn process(&mut self) -> Result<Process, SyntaxError> {
        let left = self.prefix()?;
        if self.eat_sym("|") {
            let right = self.process()?;
            Ok(Process::par(left, right))
        } else {
            Ok(left)
        }
    }

    fn fresh_label(&mut self, signal: &Name, kind: LabelKind) -> Label {
        let l = Label(self.next_label);
        self.next_label += 1;
        self.sys.labels.push(LabelInfo {
            label: l,
            signal: signal.clone(),
            kind,
            owner: self.owner.clone().unwrap_or_else(|| ThreadId::new("")),
        });
        l
    }

    fn prefix(&mut self) -> Result<Process, SyntaxError> {
        if let Tok::Num(0) = self.peek() {
            self.bump();
            return Ok(Process::Nil);
        }
        if self.eat_sym("(") {
            let p = self.process()?;
            self.expect_sym(")")?;
            return Ok(p);
        }
        let kw = match self.peek() {
            Tok::Ident(s) => s.clone(),
            _ => return self.err(format!("expected a process, found {}", self.describe())),
        };
        match kw.as_str() {
            "emit" => {
                self.bump();
                let s = self.name()?;
                let e = self.expr(false)?;
                Ok(Process::Emit(s, e))
            }
            "present" => {
                self.bump();
                let signal = self.name()?;
                self.expect_sym("(")?;
                let bound = self.name()?;
                self.expect_sym(")")?;
                self.expect_sym(".")?;
                let label = self.fresh_label(&signal, LabelKind::Present);
                let body = self.prefix()?;
                self.expect_kw("else")?;
                let cont = self.continuation()?;
                Ok(Process::Present(Box::new(Present {
                    signal,
                    label: Some(label),
                    bound,
                    body,
                    cont,
                    pause: false,
                })))
            }
            "pause" => {
                self.bump();
                self.expect_sym(".")?;
                let cont = self.continuation()?;
                let k = self.pauses;
                self.pauses += 1;
                Ok(Process::pause(Name::new(format!("_pause{k}")), Name::new(format!("_x{k}")), cont))
            }
            "match" => {
                self.bump();
                let scrutinee = self.expr(false)?;
                self.expect_kw("with")?;
                let pattern = self.pattern()?;
                self.expect_kw("then")?;
                let then = self.prefix()?;
                self.expect_kw("else")?;
                let otherwise = self.prefix()?;
                Ok(Process::Match {
                    scrutinee,
                    pattern,
                    then: Box::new(then),
                    otherwise: Box::new(otherwise),
                })
            }
            "if" => {
                self.bump();
                let left = self.name()?;
                self.expect_sym("=")?;
                let right = self.name()?;
                self.expect_kw("then")?;
                let then = self.prefix()?;
                self.expect_kw("else")?;
                let otherwise = self.prefix()?;
                Ok(Process::NameMatch {
                    left,
                    right,
                    then: Box::new(then),
                    otherwise: Box::new(otherwise),
                })
            }
            "nu" => {
                self.bump();
                let mut binders = Vec::new();
                loop {
                    let n = self.name()?;
                    self.expect_sym(":")?;
                    binders.push((n, self.type_expr()?));
                    if !self.eat_sym(",") {
                        break;
                    }
                }
                self.expect_sym(".")?;
                let body = self.prefix()?;
                Ok(binders.into_iter().rev().fold(body, |body, (name, ty)| Process::New {
                    name,
                    ty,
                    body: Box::new(body),
                }))
            }
            _ => {
                let id = ThreadId::new(self.ident()?);
                self.expect_sym("(")?;
                let args = self.comma_list(")", |p| p.expr(false))?;
                Ok(Process::Call(id, args))
            }
        }
    }

    fn continuation(&mut self) -> Result<Continuation, SyntaxError> {
        let target = ThreadId::new(self.ident()?);
        self.expect_sym("(")?;
        let args = self.comma_list(")", |p| p.expr(true))?;
        Ok(Continuation { target, args })
    }

    fn expr(&mut self, deref: bool) -> Result<Expr, SyntaxError> {
        if self.eat_sym("*") {
            return Ok(Expr::Con(UNIT_CTOR.into(), vec![]));
        }
        if self.is_sym("!") {
            if !deref {
                return self.err("`!s` may only appear in the continuation of a present statement");
            }
            self.bump();
            let s = self.name()?;
            let l = self.fresh_label(&s, LabelKind::Deref);
            return Ok(Expr::Deref(s, l));
        }
        if self.eat_sym("[") {
            let items = self.list_items(deref)?;
            return Ok(items
                .into_iter()
                .rev()
                .fold(Expr::Con(NIL.into(), vec![]), |tail, head| {
                    Expr::Con(CONS.into(), vec![head, tail])
                }));
        }
        if let Tok::Stamped(..) = self.peek() {
            return Ok(Expr::Var(self.name()?));
        }
        let id = self.ident()?;
        if self.is_sym("(") {
            self.bump();
            let args = self.comma_list(")", |p| p.expr(deref))?;
            Ok(Expr::App(id, args))
        } else {
            Ok(Expr::Var(Name::new(id)))
        }
    }

    fn list_items(&mut self, deref: bool) -> Result<Vec<Expr>, SyntaxError> {
        let mut items = Vec::new();
        if self.eat_sym("]") {
            return Ok(items);
        }
        loop {
            items.push(self.expr(deref)?);
            if self.eat_sym("]") {
                return Ok(items);
            }
            self.expect_sym(";")?;
        }
    }

    fn pattern(&mut self) -> Result<Pattern, SyntaxError> {
        let (line, col) = self.here();
        let e = self.expr(false)?;
        to_pattern(&e).ok_or_else(|| SyntaxError::at(line, col, "invalid pattern"))
    }
}

fn to_pattern(e: &Expr) -> Option<Pattern> {
    match e {
        Expr::Var(n) => Some(Pattern::Var(n.clone())),
        Expr::Con(c, args) | Expr::App(c, args) => Some(Pattern::Con(
            c.clone(),
            args.iter().map(to_pattern).collect::<Option<_>>()?,
        )),
        Expr::Deref(..) => None,
    }
}

/// Distinguishes constructors from functions and nullary constructors
/// from variables, and checks arities.
fn resolve(sys: &mut EquationSystem) -> Result<(), SyntaxError> {
    let snapshot = sys.clone();
    let arities: BTreeMap<ThreadId, usize> =
        sys.equations.iter().map(|e| (e.name.clone(), e.arity())).collect();
    for f in &mut sys.functions {
        let line = f.line;
        for rule in &mut f.rules {
            if rule.patterns.len() != f.params.len() {
                return Err(SyntaxError::Arity {
                    line,
                    name: f.name.clone(),
                    expected: f.params.len(),
                    found: rule.patterns.len(),
                });
            }
            for p in &mut rule.patterns {
                resolve_pattern(&snapshot, p, line)?;
            }
            resolve_expr(&snapshot, &mut rule.body, line)?;
        }
    }
    for eq in &mut sys.equations {
        let line = eq.line;
        for p in &eq.params {
            if p.name.stamp.is_none() && snapshot.constructor(&p.name.text).is_some() {
                return Err(SyntaxError::at(line, 1, format!("parameter `{}` names a constructor", p.name)));
            }
        }
        resolve_process(&snapshot, &arities, &mut eq.body, line)?;
    }
    if let Some(init) = &mut sys.init {
        let mut seen = BTreeSet::new();
        for (n, _) in &init.restricted {
            if !seen.insert(n.clone()) {
                return Err(SyntaxError::Duplicate { line: 0, what: "restricted name", name: n.to_string() });
            }
        }
        for (id, args) in &mut init.threads {
            check_call_arity(&arities, id, args.len(), 0)?;
            for a in args {
                resolve_expr(&snapshot, a, 0)?;
            }
        }
    }
    Ok(())
}

fn check_call_arity(
    arities: &BTreeMap<ThreadId, usize>,
    id: &ThreadId,
    found: usize,
    line: usize,
) -> Result<(), SyntaxError> {
    match arities.get(id) {
        Some(&expected) if expected != found => Err(SyntaxError::Arity {
            line,
            name: id.0.clone(),
            expected,
            found,
        }),
        _ => Ok(()),
    }
}

fn resolve_process(
    sys: &EquationSystem,
    arities: &BTreeMap<ThreadId, usize>,
    p: &mut Process,
    line: usize,
) -> Result<(), SyntaxError> {
    match p {
        Process::Nil => Ok(()),
        Process::Call(id, args) => {
            check_call_arity(arities, id, args.len(), line)?;
            args.iter_mut().try_for_each(|a| resolve_expr(sys, a, line))
        }
        Process::Emit(_, e) => resolve_expr(sys, e, line),
        Process::Present(pr) => {
            resolve_process(sys, arities, &mut pr.body, line)?;
            check_call_arity(arities, &pr.cont.target, pr.cont.args.len(), line)?;
            pr.cont.args.iter_mut().try_for_each(|a| resolve_expr(sys, a, line))
        }
        Process::NameMatch { then, otherwise, .. } => {
            resolve_process(sys, arities, then, line)?;
            resolve_process(sys, arities, otherwise, line)
        }
        Process::Match { scrutinee, pattern, then, otherwise } => {
            resolve_expr(sys, scrutinee, line)?;
            resolve_pattern(sys, pattern, line)?;
            resolve_process(sys, arities, then, line)?;
            resolve_process(sys, arities, otherwise, line)
        }
        Process::New { body, .. } => resolve_process(sys, arities, body, line),
        Process::Par(l, r) => {
            resolve_process(sys, arities, l, line)?;
            resolve_process(sys, arities, r, line)
        }
    }
}

fn resolve_expr(sys: &EquationSystem, e: &mut Expr, line: usize) -> Result<(), SyntaxError> {
    match e {
        Expr::Var(n) => {
            match sys.constructor_arity(&n.text).filter(|_| n.stamp.is_none()) {
                Some(0) => *e = Expr::Con(n.text.clone(), vec![]),
                Some(expected) => {
                    return Err(SyntaxError::Arity { line, name: n.text.clone(), expected, found: 0 })
                }
                None => {}
            }
            Ok(())
        }
        Expr::Deref(..) => Ok(()),
        Expr::Con(_, args) => args.iter_mut().try_for_each(|a| resolve_expr(sys, a, line)),
        Expr::App(name, args) => {
            args.iter_mut().try_for_each(|a| resolve_expr(sys, a, line))?;
            if let Some(expected) = sys.constructor_arity(name) {
                if expected != args.len() {
                    return Err(SyntaxError::Arity { line, name: name.clone(), expected, found: args.len() });
                }
                *e = Expr::Con(std::mem::take(name), std::mem::take(args));
            } else if let Some(f) = sys.function(name) {
                if f.params.len() != args.len() {
                    return Err(SyntaxError::Arity {
                        line,
                        name: name.clone(),
                        expected: f.params.len(),
                        found: args.len(),
                    });
                }
            }
            Ok(())
        }
    }
}

fn resolve_pattern(sys: &EquationSystem, p: &mut Pattern, line: usize) -> Result<(), SyntaxError> {
    match p {
        Pattern::Var(n) => {
            match sys.constructor_arity(&n.text).filter(|_| n.stamp.is_none()) {
                Some(0) => *p = Pattern::Con(n.text.clone(), vec![]),
                Some(expected) => {
                    return Err(SyntaxError::Arity { line, name: n.text.clone(), expected, found: 0 })
                }
                None => {}
            }
            Ok(())
        }
        Pattern::Con(c, args) => {
            match sys.constructor_arity(c) {
                Some(expected) if expected != args.len() => {
                    return Err(SyntaxError::Arity { line, name: c.clone(), expected, found: args.len() })
                }
                None => return Err(SyntaxError::at(line, 1, format!("`{c}` is not a constructor"))),
                _ => {}
            }
            args.iter_mut().try_for_each(|a| resolve_pattern(sys, a, line))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_program() {
        let sys = parse_program("def A() = 0").unwrap();
        assert_eq!(sys.equations.len(), 1);
        assert_eq!(sys.equations[0].body, Process::Nil);
    }

    #[test]
    fn empty_source_is_an_error() {
        assert!(parse_program("").is_err());
        assert!(parse_program("  // nothing\n").is_err());
    }

    #[test]
    fn pause_desugars_to_private_present() {
        let sys = parse_program("def A(s: sig[r](unit)) = pause.A(s)").unwrap_err();
        assert!(matches!(sys, SyntaxError::UndeclaredRegion { .. }));
        let sys = parse_program("region r; def A(s: sig[r](unit)) = pause.A(s)").unwrap();
        match &sys.equations[0].body {
            Process::New { name, body, .. } => match body.as_ref() {
                Process::Present(p) => {
                    assert!(p.pause);
                    assert_eq!(&p.signal, name);
                    assert_eq!(p.body, Process::Nil);
                    assert_ne!(p.bound, p.signal);
                    assert_eq!(p.cont.target, ThreadId::new("A"));
                }
                other => panic!("unexpected {other:?}"),
            },
            other => panic!("unexpected {other:?}"),
        }
        assert!(sys.labels.is_empty());
    }

    #[test]
    fn labels_follow_source_order() {
        let src = "region r;
            def A(s: sig[r](unit), t: sig[r](unit)) = present s(x). present t(z). 0 else A(s, t) else B(!t, !s);
            def B(l: list(unit), m: list(unit)) = 0;";
        let sys = parse_program(src).unwrap();
        let got: Vec<_> = sys.labels.iter().map(|l| (l.label.0, l.signal.text.clone(), l.kind)).collect();
        assert_eq!(
            got,
            vec![
                (1, "s".into(), LabelKind::Present),
                (2, "t".into(), LabelKind::Present),
                (3, "t".into(), LabelKind::Deref),
                (4, "s".into(), LabelKind::Deref),
            ]
        );
    }

    #[test]
    fn duplicate_and_arity_errors() {
        assert!(matches!(
            parse_program("def A() = 0; def A() = 0;"),
            Err(SyntaxError::Duplicate { what: "equation", .. })
        ));
        assert!(matches!(
            parse_program("def A() = B(*); def B() = 0;"),
            Err(SyntaxError::Arity { expected: 0, found: 1, .. })
        ));
        assert!(matches!(
            parse_program("type t = c(t) | d; def A() = match c with d then 0 else 0;"),
            Err(SyntaxError::Arity { .. })
        ));
    }

    #[test]
    fn deref_outside_continuation_is_rejected() {
        let err = parse_program("region r; def A(s: sig[r](unit)) = emit s !s").unwrap_err();
        assert_eq!(err.position().map(|p| p.0), Some(1));
    }

    #[test]
    fn constructors_resolve() {
        let sys = parse_program(
            "type state = q0 | q1; fun id(state) -> state { (q) => q; }
             def A(q: state) = A(id(q0))",
        )
        .unwrap();
        assert_eq!(
            sys.equations[0].body,
            Process::Call(
                ThreadId::new("A"),
                vec![Expr::App("id".into(), vec![Expr::Con("q0".into(), vec![])])]
            )
        );
    }
}
