use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use ringsynth::ltl::{
    hub_reduce, localize_assumptions, localize_outputs, parse_formula, parse_spec,
    specialize_zero, LocalRule, OutputLocalization, ParamSpec, Role,
};
use ringsynth::machine::{
    compose_ring, template_from_json, template_to_dot, template_to_json, ProcessTemplate,
    RingSystem,
};
use ringsynth::solve::{emit_smtlib, BuiltinOptions};
use ringsynth::synth::{
    build_system, decompose_synthesize, parse_stage_file, synthesize, BoundStatus, Outcome,
    SolverChoice, Stage, SynthOptions, SynthesisResult,
};
use ringsynth::verify::{model_check, verify_parameterized, Status, VerifyOptions};

use crate::args::*;
use crate::CliError;

pub fn run(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Translate(a) => translate(a),
        Command::Synth(a) => synth(a),
        Command::Verify(a) => verify(a),
        Command::Mc(a) => mc(a),
        Command::Compose(a) => compose(a),
        Command::EmitSmt(a) => emit_smt(a),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_spec(path: &Path) -> Result<ParamSpec, CliError> {
    parse_spec(&read(path)?).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn load_template(path: &Path) -> Result<ProcessTemplate, CliError> {
    template_from_json(&read(path)?)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn translate(a: TranslateArgs) -> Result<(), CliError> {
    let mut spec = load_spec(&a.spec)?;
    let steps = if a.step.is_empty() {
        vec![Step::LocalizeOutputs, Step::LocalizeAssumptions]
    } else {
        a.step.clone()
    };
    let mut rules = OutputLocalization::default();
    for step in steps {
        spec = match step {
            Step::LocalizeOutputs => {
                let globals: Vec<String> = if a.globals.is_empty() {
                    spec.global_outputs.clone()
                } else {
                    a.globals.clone()
                };
                let names: Vec<&str> = globals.iter().map(String::as_str).collect();
                let (s, r) = localize_outputs(&spec, &names)?;
                rules.rules.extend(r.rules);
                s
            }
            Step::LocalizeAssumptions => localize_assumptions(&spec)?,
            Step::SpecializeZero => specialize_zero(&spec)?,
            Step::Hub => hub_reduce(&spec)?,
        };
        log::info!("applied {step:?}");
    }
    let mut text = String::new();
    for (name, rule) in &rules.rules {
        let rule = match rule {
            LocalRule::MasterIndex => format!("{name} = i while {name}_i is set"),
            LocalRule::ExistsTokenAndLocal => format!("{name} = {name}_i of the token holder"),
        };
        let _ = writeln!(text, "# localized output: {rule}");
    }
    text.push_str(&spec.to_spec_text());
    write_or_print(a.out.as_deref(), &text)
}

fn options(opt: &[Opt], solver: &SolverFlags, timing: TimingArg, verify: bool) -> SynthOptions {
    let solver = match &solver.solver {
        SolverArg::Builtin => SolverChoice::Builtin(BuiltinOptions {
            node_limit: solver.node_limit,
            ..BuiltinOptions::default()
        }),
        SolverArg::External(cmd) => SolverChoice::External {
            cmd: cmd.clone(),
            timeout: solver.timeout(),
        },
    };
    SynthOptions {
        gr1_direct: opt.contains(&Opt::Gr1Direct),
        hardcode_token: opt.contains(&Opt::HardcodeToken),
        solver,
        verify,
        timing: timing.into(),
    }
}

/// Hub-reduces a process spec; monolithic specs pass through.
fn monolithic(spec: ParamSpec, opt: &[Opt]) -> Result<ParamSpec, CliError> {
    if spec.role == Role::MonolithicAfterHub {
        return Ok(spec);
    }
    if !opt.contains(&Opt::Hub) {
        log::info!("applying the hub abstraction (the only synthesis route for ring specs)");
    }
    Ok(hub_reduce(&spec)?)
}

fn log_stats(label: &str, r: &SynthesisResult) {
    for s in &r.stats {
        let status = match s.status {
            BoundStatus::Sat => "sat",
            BoundStatus::Unsat => "unsat",
            BoundStatus::Unknown => "unknown",
        };
        log::info!(
            "{label}bound {:>2}{} {:<7} {:>8} ms  {} constraints, {} automaton states",
            s.bound,
            if s.gr1_direct { " gr1" } else { "    " },
            status,
            s.millis,
            s.constraints,
            s.automaton_states
        );
    }
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let ext = path.extension().and_then(|s| s.to_str());
    let name = match ext {
        Some(e) => format!("{stem}.{suffix}.{e}"),
        None => format!("{stem}.{suffix}"),
    };
    path.with_file_name(name)
}

fn write_model(t: &ProcessTemplate, json: Option<&Path>, dot: Option<&Path>) -> Result<(), CliError> {
    write_or_print(json, &template_to_json(t))?;
    if let Some(p) = dot {
        write(p, &template_to_dot(t))?;
    }
    Ok(())
}

fn emit_scripts(spec: &ParamSpec, a: &SynthArgs, opts: &SynthOptions, target: &Path) -> Result<(), CliError> {
    for bound in a.bound.clone() {
        let cs = build_system(spec, bound, opts.gr1_direct, opts.hardcode_token, &[])?;
        let ext = with_suffix(target, &bound.to_string());
        write(&ext, &emit_smtlib(&cs))?;
    }
    Ok(())
}

fn outcome_error(o: &Outcome) -> CliError {
    match o {
        Outcome::Model { .. } => unreachable!("callers handle models"),
        Outcome::NotFoundUpTo(b) => CliError::Negative(format!("not found up to {b}")),
        Outcome::Unknown { bound, reason } => {
            CliError::Negative(format!("unknown at bound {bound}: {reason}"))
        }
    }
}

fn synth(a: SynthArgs) -> Result<(), CliError> {
    let opts = options(&a.opt, &a.solver, a.timing, !a.no_verify);
    if let Some(stage_path) = &a.stages {
        return synth_staged(&a, stage_path, &opts);
    }
    let path = a
        .spec
        .as_ref()
        .ok_or_else(|| CliError::Usage("synth needs a spec file or --stages".into()))?;
    let spec = monolithic(load_spec(path)?, &a.opt)?;
    if let Some(target) = &a.emit_smt {
        emit_scripts(&spec, &a, &opts, target)?;
    }
    let r = synthesize(&spec, a.bound.clone(), &opts)?;
    log_stats("", &r);
    match &r.outcome {
        Outcome::Model { template, bound } => {
            log::info!("model with {bound} states");
            if let Some(rep) = &r.report {
                for line in rep.to_text().lines() {
                    log::info!("{line}");
                }
            }
            write_model(template, a.out_json.as_deref(), a.out_dot.as_deref())
        }
        other => Err(outcome_error(other)),
    }
}

fn synth_staged(a: &SynthArgs, stage_path: &Path, opts: &SynthOptions) -> Result<(), CliError> {
    let base = stage_path.parent().unwrap_or(Path::new("."));
    let defs = parse_stage_file(&read(stage_path)?, base)?;
    let mut stages = Vec::new();
    for d in defs {
        let model = match &d.model_path {
            Some(p) => Some(load_template(p)?),
            None => None,
        };
        stages.push(Stage {
            label: d.label,
            spec: load_spec(&d.spec_path)?,
            extra: d.extra,
            model,
        });
    }
    let results = decompose_synthesize(&stages, a.bound.clone(), opts)?;
    let solved: Vec<&Stage> = stages.iter().filter(|s| s.model.is_none()).collect();
    for (stage, r) in solved.iter().zip(&results) {
        log_stats(&format!("[{}] ", stage.label), r);
        if let (Some(t), Some(json)) = (r.model(), &a.out_json) {
            write(&with_suffix(json, &stage.label), &template_to_json(t))?;
        }
    }
    let last = results
        .last()
        .ok_or_else(|| CliError::Usage("every stage carries a model; nothing to do".into()))?;
    if results.len() < solved.len() {
        return Err(outcome_error(&last.outcome));
    }
    match &last.outcome {
        Outcome::Model { template, bound } => {
            log::info!("final model with {bound} states");
            write_model(template, a.out_json.as_deref(), a.out_dot.as_deref())
        }
        other => Err(outcome_error(other)),
    }
}

fn verify(a: VerifyArgs) -> Result<(), CliError> {
    let t = load_template(&a.model)?;
    let spec = load_spec(&a.spec)?;
    let zero = match (&a.zero, &a.zero_spec) {
        (Some(m), Some(s)) => Some((load_template(m)?, load_spec(s)?)),
        _ => None,
    };
    let opts = VerifyOptions {
        timing: a.timing.into(),
        all_instances: a.all_instances,
    };
    let report = verify_parameterized(&t, zero.as_ref().map(|(t, s)| (t, s)), &spec, opts)?;
    print!("{}", report.to_text());
    if let Some(p) = &a.out_json {
        write(p, &pretty(&report.to_json()))?;
    }
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Negative(format!(
            "{} of {} checks did not pass",
            report.failures().count(),
            report.verdicts.len()
        )))
    }
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON value serializes");
    s.push('\n');
    s
}

fn load_ring(r: &RingFlags) -> Result<RingSystem, CliError> {
    let t = load_template(&r.model)?;
    let zero = match &r.zero {
        Some(p) => Some(load_template(p)?),
        None => None,
    };
    Ok(compose_ring(&t, zero.as_ref(), r.n, r.timing.into())?)
}

fn mc(a: McArgs) -> Result<(), CliError> {
    let ring = load_ring(&a.ring)?;
    let prop = parse_formula(&a.formula)?;
    let ass = a
        .assume
        .iter()
        .map(|s| parse_formula(s))
        .collect::<Result<Vec<_>, _>>()?;
    let v = model_check(&ring, &a.formula, &prop, a.i, a.j, &ass);
    let status = match v.status {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::Unsupported => "UNSUPPORTED",
    };
    println!("{status} {} n={} {:?} at {:?}", a.formula, ring.n, ring.timing, v.vertices);
    if let Some(note) = &v.note {
        println!("note: {note}");
    }
    if let Some(p) = &a.out_json {
        write(p, &pretty(&serde_json::to_value(&v).expect("verdict serializes")))?;
    }
    match v.status {
        Status::Pass => Ok(()),
        Status::Fail => Err(CliError::Negative("property fails".into())),
        Status::Unsupported => Err(CliError::Usage(
            v.note.unwrap_or_else(|| "unsupported check".into()),
        )),
    }
}

/// Reachable global states and their edges, labeled by who moved.
fn ring_graph(ring: &RingSystem) -> (Vec<Vec<usize>>, BTreeSet<(usize, usize, u64)>) {
    let states = ring.reachable_states();
    let index: BTreeMap<&Vec<usize>, usize> = states.iter().enumerate().map(|(k, s)| (s, k)).collect();
    let mut edges = BTreeSet::new();
    for (k, s) in states.iter().enumerate() {
        for tr in ring.transitions(s) {
            if let Some(&to) = index.get(&tr.target) {
                edges.insert((k, to, tr.moved));
            }
        }
    }
    (states, edges)
}

fn moved_names(mask: u64, n: usize) -> String {
    let v: Vec<String> = (0..n).filter(|v| mask >> v & 1 == 1).map(|v| v.to_string()).collect();
    v.join(",")
}

fn compose(a: ComposeArgs) -> Result<(), CliError> {
    let ring = load_ring(&a.ring)?;
    let (states, edges) = ring_graph(&ring);
    log::info!(
        "ring of {} vertices, {:?}: {} reachable states, {} edges",
        ring.n,
        ring.timing,
        states.len(),
        edges.len()
    );
    let initial: BTreeSet<Vec<usize>> = ring.initial_states().into_iter().collect();
    if let Some(p) = &a.out_dot {
        let mut dot = String::from("digraph ring {\n  rankdir=LR;\n");
        for (k, s) in states.iter().enumerate() {
            let holder = ring.token_holders(s);
            let shape = if initial.contains(s) { "doublecircle" } else { "circle" };
            let _ = writeln!(
                dot,
                "  s{k} [shape={shape}, label=\"{:?}\\ntok@{:?}\"];",
                s, holder
            );
        }
        for (from, to, moved) in &edges {
            let _ = writeln!(dot, "  s{from} -> s{to} [label=\"{}\"];", moved_names(*moved, ring.n));
        }
        dot.push_str("}\n");
        write(p, &dot)?;
    }
    let json = serde_json::json!({
        "n": ring.n,
        "timing": ring.timing,
        "global_inputs": ring.global_inputs,
        "states": states,
        "initial": states.iter().enumerate().filter(|(_, s)| initial.contains(*s)).map(|(k, _)| k).collect::<Vec<_>>(),
        "edges": edges.iter().map(|(f, t, m)| serde_json::json!({"from": f, "to": t, "moved": moved_names(*m, ring.n)})).collect::<Vec<_>>(),
    });
    match &a.out_json {
        Some(p) => write(p, &pretty(&json)),
        None if a.out_dot.is_none() => {
            print!("{}", pretty(&json));
            Ok(())
        }
        None => Ok(()),
    }
}

fn emit_smt(a: EmitSmtArgs) -> Result<(), CliError> {
    let spec = monolithic(load_spec(&a.spec)?, &a.opt)?;
    let cs = build_system(
        &spec,
        a.bound,
        a.opt.contains(&Opt::Gr1Direct),
        a.opt.contains(&Opt::HardcodeToken),
        &[],
    )?;
    log::info!(
        "bound {}: {} constraints, {} automaton states",
        a.bound,
        cs.constraints.len(),
        cs.nba.num_states()
    );
    write_or_print(a.out.as_deref(), &emit_smtlib(&cs))
}
