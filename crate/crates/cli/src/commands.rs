use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;
use spi_core::analysis::{analyze, Analysis};
use spi_core::assignments::{
    check_quasi_interpretation, validate_assignment, CheckOptions, CheckVerdict, Overall, ValidateOptions,
};
use spi_core::constraints::gen_constraints;
use spi_core::monitor::{generate_inputs, monitor, InputSpec, Trend};
use spi_core::runtime::{run_computation, EnvSchedule, SchedulerPolicy};
use spi_core::syntax::{parse_program, pretty_program, typecheck, EquationSystem};
use spi_core::trs::rewrite_rules;
use spi_core::Assignment;

use crate::{Cli, Command, Failure, Format, RunArgs, SCHEMA_VERSION};

type Outcome = Result<String, (String, Failure)>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<EquationSystem, Failure> {
    let src = read(path)?;
    parse_program(&src).map_err(|e| Failure::Check(format!("{}: {e}", path.display())))
}

fn load_analyzed(path: &Path) -> Result<(EquationSystem, Analysis), Failure> {
    let sys = load(path)?;
    let an = analyze(&sys).map_err(|e| Failure::Check(format!("{}: {e}", path.display())))?;
    Ok((sys, an))
}

/// Refuses programs the analysis rejects, listing why.
fn require_accepted(an: &Analysis) -> Result<(), Failure> {
    if an.accepted() {
        Ok(())
    } else {
        Err(Failure::Check(format!("the analysis rejects the program:\n  {}", an.problems().join("\n  "))))
    }
}

fn document(mut v: serde_json::Value) -> String {
    if let Some(obj) = v.as_object_mut() {
        obj.insert("schema_version".into(), SCHEMA_VERSION.into());
    }
    format!("{}\n", serde_json::to_string_pretty(&v).expect("JSON values serialize"))
}

pub fn dispatch(cli: &Cli) -> Outcome {
    let json = cli.format == Format::Json;
    let lift = |r: Result<String, Failure>| r.map_err(|f| (String::new(), f));
    match &cli.command {
        Command::Parse(p) => lift(parse(&p.path, json)),
        Command::Typecheck(p) => lift(check_types(&p.path, json)),
        Command::Analyze { program, dot } => lift(analyze_cmd(&program.path, dot.as_deref(), json)),
        Command::Constraints(p) => lift(constraints(&p.path, json)),
        Command::Abstract(p) => lift(abstract_cmd(&p.path, json)),
        Command::CheckQi { program, qi, bound } => check_qi(&program.path, qi.as_deref(), *bound, json),
        Command::Run { program, run: args } => run(&program.path, args, json),
        Command::Monitor { program, run: args, value_size, count } => {
            let spec = InputSpec { value_size: *value_size, count: *count };
            monitor_cmd(&program.path, args, spec, json)
        }
    }
}

fn parse(path: &Path, json: bool) -> Result<String, Failure> {
    let sys = load(path)?;
    Ok(if json {
        document(json!({
            "regions": sys.regions.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
            "equations": sys.equations.iter().map(|e| json!({
                "name": e.name.to_string(),
                "arity": e.arity(),
                "annotation": e.annotation.to_string(),
                "body": e.body.to_string(),
            })).collect::<Vec<_>>(),
            "program": pretty_program(&sys),
        }))
    } else {
        pretty_program(&sys)
    })
}

fn check_types(path: &Path, json: bool) -> Result<String, Failure> {
    let sys = load(path)?;
    let report = typecheck(&sys).map_err(|errs| {
        let lines: Vec<String> = errs.iter().map(|e| e.to_string()).collect();
        Failure::Check(format!("{}: ill typed\n  {}", path.display(), lines.join("\n  ")))
    })?;
    if json {
        return Ok(document(json!({
            "well_typed": true,
            "labels": report.label_types.iter().map(|(l, t)| json!({
                "label": l.to_string(),
                "region": t.region.to_string(),
                "type": t.ty.to_string(),
            })).collect::<Vec<_>>(),
            "init": report.init_types.iter().map(|(n, t)| (n.to_string(), t.to_string().into()))
                .collect::<serde_json::Map<String, serde_json::Value>>(),
        })));
    }
    let mut out = String::from("well typed\n");
    for (l, t) in &report.label_types {
        let _ = writeln!(out, "  {l}: {} (region {})", t.ty, t.region);
    }
    for (n, t) in &report.init_types {
        let _ = writeln!(out, "  {n}: {t}");
    }
    Ok(out)
}

fn analyze_cmd(path: &Path, dot: Option<&Path>, json: bool) -> Result<String, Failure> {
    let (sys, an) = load_analyzed(path)?;
    if let Some(dot) = dot {
        let text = format!("{}{}", an.cycle_graph.to_dot("cycle"), an.instant_graph.to_dot("instant"));
        fs::write(dot, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", dot.display())))?;
    }
    let out = if json {
        let mut v = serde_json::to_value(&an).expect("the analysis serializes");
        v["accepted"] = an.accepted().into();
        v["problems"] = an.problems().into();
        document(v)
    } else {
        let mut out = String::new();
        let edges = |g: &spi_core::analysis::CallGraph| g.edges().map(|e| format!("  {e}\n")).collect::<String>();
        let _ = write!(out, "cycle graph:\n{}", edges(&an.cycle_graph));
        let _ = write!(out, "instant graph:\n{}", edges(&an.instant_graph));
        match &an.read_once {
            Ok(()) => out.push_str("read-once: ok\n"),
            Err(cycle) => {
                let es: Vec<String> = cycle.iter().map(|e| e.to_string()).collect();
                let _ = writeln!(out, "read-once: fails on {}", es.join(" "));
            }
        }
        out.push_str("auxiliary parameters:\n");
        for eq in &sys.equations {
            let ys: Vec<String> = an.aux[&eq.name].iter().map(|l| l.to_string()).collect();
            let mask: Vec<String> = an.mask(&sys, &eq.name).iter().map(|i| i.to_string()).collect();
            let _ = writeln!(out, "  {}: ({})  mask {{{}}}", eq.name, ys.join(", "), mask.join(","));
        }
        out.push_str("=F classes:\n");
        for class in &an.f_order.classes {
            let ids: Vec<String> = class.iter().map(|t| t.to_string()).collect();
            let st = an.f_order.status.get(&class[0]).map(|s| s.to_string()).unwrap_or_default();
            let _ = writeln!(out, "  {{{}}} {st}", ids.join(", "));
        }
        for w in &an.reset.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        if an.accepted() {
            out.push_str("accepted\n");
        }
        out
    };
    if an.accepted() {
        Ok(out)
    } else {
        Err(Failure::Check(format!("{out}rejected:\n  {}", an.problems().join("\n  "))))
    }
}

fn constraints(path: &Path, json: bool) -> Result<String, Failure> {
    let (sys, an) = load_analyzed(path)?;
    require_accepted(&an)?;
    let cs = gen_constraints(&sys, &an);
    if json {
        return Ok(document(json!({ "constraints": cs.iter().map(|c| c.to_json()).collect::<Vec<_>>() })));
    }
    let mut out = String::new();
    for index in 0..=2 {
        let _ = writeln!(out, "index {index}:");
        for c in cs.iter().filter(|c| c.index == index) {
            let _ = writeln!(out, "  {c}");
        }
    }
    Ok(out)
}

fn abstract_cmd(path: &Path, json: bool) -> Result<String, Failure> {
    let (sys, an) = load_analyzed(path)?;
    require_accepted(&an)?;
    let rules = rewrite_rules(&sys, &an);
    if json {
        return Ok(document(json!({ "rules": rules.iter().map(|r| r.to_json()).collect::<Vec<_>>() })));
    }
    Ok(rules.iter().map(|r| format!("{}  {r}\n", r.shape)).collect())
}

fn default_qi(program: &Path) -> PathBuf {
    program.with_extension("qi.json")
}

fn check_qi(path: &Path, qi: Option<&Path>, bound: u64, json: bool) -> Outcome {
    let fail = |f| (String::new(), f);
    let (sys, an) = load_analyzed(path).map_err(fail)?;
    require_accepted(&an).map_err(fail)?;
    let qi_path = qi.map(Path::to_path_buf).unwrap_or_else(|| default_qi(path));
    let text = read(&qi_path).map_err(fail)?;
    let q = Assignment::from_json(&text)
        .map_err(|e| fail(Failure::Usage(format!("{}: {e}", qi_path.display()))))?;
    let violations = validate_assignment(&q, &sys, |id| an.hatted_arity(&sys, id), ValidateOptions::default());
    let cs = gen_constraints(&sys, &an);
    let report = check_quasi_interpretation(&q, &sys, &cs, CheckOptions { bound, ..Default::default() });
    let ok = violations.is_empty() && matches!(report.overall(), Overall::Proven | Overall::Satisfied);
    let out = if json {
        let mut v = report.to_json();
        v["assignment_violations"] = violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().into();
        document(v)
    } else {
        let mut out = String::new();
        for v in &violations {
            let _ = writeln!(out, "assignment: {v}");
        }
        for r in &report.results {
            let _ = write!(out, "{:<12} {}", r.verdict.name(), r.constraint);
            match &r.verdict {
                CheckVerdict::Satisfied { bound, checked } => {
                    let _ = write!(out, "  (bound {bound}, {checked} substitutions)");
                }
                CheckVerdict::Inconclusive { reason, .. } => {
                    let _ = write!(out, "  ({reason})");
                }
                CheckVerdict::Refuted(f) => {
                    let w: Vec<String> = f.witness.iter().map(|(k, v)| format!("{k} = {v}")).collect();
                    let _ = write!(out, "\n             witness {}: {:?} vs {:?}", w.join(", "), f.lhs, f.rhs);
                }
                CheckVerdict::SymbolicallyProven => {}
            }
            out.push('\n');
        }
        let overall = match report.overall() {
            Overall::Proven => "proven",
            Overall::Satisfied => "satisfied",
            Overall::Refuted => "refuted",
            Overall::Inconclusive => "inconclusive",
        };
        let _ = writeln!(out, "overall: {overall}");
        out
    };
    if ok {
        Ok(out)
    } else {
        Err((out, Failure::Check(String::new())))
    }
}

fn schedule(sys: &EquationSystem, args: &RunArgs) -> Result<Option<EnvSchedule>, Failure> {
    let Some(path) = &args.env else { return Ok(None) };
    let text = read(path)?;
    EnvSchedule::from_json(sys, &text).map(Some).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn run(path: &Path, args: &RunArgs, json: bool) -> Outcome {
    let fail = |f| (String::new(), f);
    let sys = load(path).map_err(fail)?;
    let env = schedule(&sys, args).map_err(fail)?.unwrap_or_default();
    let instants = args.instants.unwrap_or(10) as usize;
    let traces = run_computation(&sys, instants, &env, SchedulerPolicy::seeded(args.seed), args.step_cap)
        .map_err(|e| fail(Failure::Check(e.to_string())))?;
    let mut out = String::new();
    for t in &traces {
        if json {
            let _ = writeln!(out, "{}", t.to_json());
            continue;
        }
        let status = if t.suspended { "suspended" } else { "step cap reached" };
        let _ = writeln!(
            out,
            "instant {}: {} steps, {status}, configSize {}, inputSize {}",
            t.instant, t.steps, t.config_size, t.input_size
        );
        for (s, vs) in &t.signals {
            let vs: Vec<String> = vs.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "  {s} = [{}]", vs.join("; "));
        }
        if !t.extruded.is_empty() {
            let ns: Vec<String> = t.extruded.iter().map(|n| n.to_string()).collect();
            let _ = writeln!(out, "  extruded {}", ns.join(", "));
        }
    }
    match traces.last() {
        Some(t) if !t.suspended => {
            Err((out, Failure::Check(format!("instant {} did not suspend within {} steps", t.instant, args.step_cap))))
        }
        _ => Ok(out),
    }
}

fn monitor_cmd(path: &Path, args: &RunArgs, spec: InputSpec, json: bool) -> Outcome {
    use rand::SeedableRng;

    let fail = |f| (String::new(), f);
    let sys = load(path).map_err(fail)?;
    let instants = args.instants.unwrap_or(50) as usize;
    let env = match schedule(&sys, args).map_err(fail)? {
        Some(env) => env,
        None => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(args.seed);
            generate_inputs(&sys, instants, spec, &mut rng)
        }
    };
    let report = monitor(&sys, instants, &env, SchedulerPolicy::seeded(args.seed), args.step_cap)
        .map_err(|e| fail(Failure::Check(e.to_string())))?;
    let out = if json {
        format!("{}\n", serde_json::to_string_pretty(&report.to_json()).expect("JSON values serialize"))
    } else {
        format!("{report}\n")
    };
    match report.verdict {
        Trend::NonSuspending { .. } => Err((out, Failure::Check(String::new()))),
        _ => Ok(out),
    }
}
