//! Printing programs back to the `.spi` format. `parse_program` after
//! `pretty_program` yields the same system.

use std::fmt::{self, Write};

use super::ast::*;

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for Continuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.target, join(&self.args))
    }
}

impl Process {
    fn write_prefix(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Process::Par(..) => write!(f, "({self})"),
            _ => write!(f, "{self}"),
        }
    }
}

impl fmt::Display for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(k) = self.as_pause() {
            return write!(f, "pause.{k}");
        }
        match self {
            Process::Nil => f.write_str("0"),
            Process::Call(id, args) => write!(f, "{id}({})", join(args)),
            Process::Emit(s, e) => write!(f, "emit {s} {e}"),
            Process::Present(p) => {
                write!(f, "present {}({}). ", p.signal, p.bound)?;
                p.body.write_prefix(f)?;
                write!(f, " else {}", p.cont)
            }
            Process::NameMatch { left, right, then, otherwise } => {
                write!(f, "if {left} = {right} then ")?;
                then.write_prefix(f)?;
                f.write_str(" else ")?;
                otherwise.write_prefix(f)
            }
            Process::Match { scrutinee, pattern, then, otherwise } => {
                write!(f, "match {scrutinee} with {pattern} then ")?;
                then.write_prefix(f)?;
                f.write_str(" else ")?;
                otherwise.write_prefix(f)
            }
            Process::New { name, ty, body } => {
                write!(f, "nu {name}: {ty}. ")?;
                body.write_prefix(f)
            }
            Process::Par(l, r) => {
                l.write_prefix(f)?;
                write!(f, " | {r}")
            }
        }
    }
}

impl fmt::Display for ThreadAnnotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        if self.reset {
            f.write_str("reset, ")?;
        }
        let mask: Vec<_> = self.mask.iter().collect();
        write!(f, "status={}, mask={{{}}}]", self.status, join(&mask))
    }
}

pub fn pretty_equation(eq: &Equation) -> String {
    let params: Vec<String> = eq.params.iter().map(|p| format!("{}: {}", p.name, p.ty)).collect();
    format!("def {}({}) {} =\n    {};", eq.name, params.join(", "), eq.annotation, eq.body)
}

pub fn pretty_program(sys: &EquationSystem) -> String {
    let mut out = String::new();
    for r in &sys.regions {
        let lower: Vec<_> = sys
            .region_order
            .iter()
            .filter(|(g, _)| g == r)
            .map(|(_, l)| l.clone())
            .collect();
        if lower.is_empty() {
            let _ = writeln!(out, "region {r};");
        } else {
            let _ = writeln!(out, "region {r} > {};", join(&lower));
        }
    }
    for t in &sys.types {
        let ctors: Vec<String> = t
            .ctors
            .iter()
            .map(|c| {
                if c.args.is_empty() {
                    c.name.clone()
                } else {
                    format!("{}({})", c.name, join(&c.args))
                }
            })
            .collect();
        let _ = writeln!(out, "type {} = {};", t.name, ctors.join(" | "));
    }
    for fun in &sys.functions {
        let _ = writeln!(out, "fun {}({}) -> {} {{", fun.name, join(&fun.params), fun.result);
        for r in &fun.rules {
            let _ = writeln!(out, "    ({}) => {};", join(&r.patterns), r.body);
        }
        out.push_str("}\n");
    }
    for eq in &sys.equations {
        let _ = writeln!(out, "{}", pretty_equation(eq));
    }
    if let Some(init) = &sys.init {
        out.push_str("init ");
        if !init.restricted.is_empty() {
            let binders: Vec<String> = init
                .restricted
                .iter()
                .map(|(n, t)| match t {
                    Some(t) => format!("{n}: {t}"),
                    None => n.to_string(),
                })
                .collect();
            let _ = write!(out, "nu {}. ", binders.join(", "));
        }
        let threads: Vec<String> =
            init.threads.iter().map(|(id, args)| format!("{id}({})", join(args))).collect();
        if threads.is_empty() {
            out.push_str("0;\n");
        } else {
            let _ = writeln!(out, "{};", threads.join(" | "));
        }
    }
    out
}

impl fmt::Debug for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Debug for Continuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
