use std::collections::HashMap;
use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use wait_timeout::ChildExt;

use super::{Assignment, SolveError, SolverOutcome, SolverStatus};
use crate::synth::ConstraintSystem;

/// Key of a function cell such as `(delta 0 3)`: name plus arguments.
type Cell = (String, Vec<i64>);

fn as_int(v: &lexpr::Value) -> Option<i64> {
    if let Some(x) = v.as_i64() {
        return Some(x);
    }
    // negative literals come back as (- k)
    let items = v.to_vec()?;
    match items.as_slice() {
        [op, k] if op.as_symbol() == Some("-") => k.as_i64().map(|k| -k),
        _ => None,
    }
}

fn as_bool(v: &lexpr::Value) -> Option<bool> {
    match v.as_symbol() {
        Some("true") => Some(true),
        Some("false") => Some(false),
        _ => v.as_bool(),
    }
}

fn collect_cells(text: &str) -> Result<HashMap<Cell, lexpr::Value>, SolveError> {
    let mut cells = HashMap::new();
    let mut parser = lexpr::Parser::from_str(text);
    for value in parser.value_iter() {
        let value = value.map_err(|e| SolveError::MalformedModel(e.to_string()))?;
        let Some(pairs) = value.to_vec() else {
            return Err(SolveError::MalformedModel(format!("unexpected datum {value}")));
        };
        if pairs.first().and_then(|p| p.as_symbol()) == Some("error") {
            return Err(SolveError::MalformedModel(value.to_string()));
        }
        for pair in pairs {
            let entry = pair
                .to_vec()
                .filter(|v| v.len() == 2)
                .ok_or_else(|| SolveError::MalformedModel(format!("bad model entry {pair}")))?;
            let (key, val) = (&entry[0], entry[1].clone());
            let parts = key
                .to_vec()
                .ok_or_else(|| SolveError::MalformedModel(format!("bad cell {key}")))?;
            let name = parts
                .first()
                .and_then(|p| p.as_symbol())
                .ok_or_else(|| SolveError::MalformedModel(format!("bad cell {key}")))?
                .to_string();
            let args = parts[1..]
                .iter()
                .map(as_int)
                .collect::<Option<Vec<i64>>>()
                .ok_or_else(|| SolveError::MalformedModel(format!("bad cell {key}")))?;
            cells.insert((name, args), val);
        }
    }
    Ok(cells)
}

/// Reads the `(get-value ...)` responses that follow `sat`.
pub fn parse_model(cs: &ConstraintSystem, text: &str) -> Result<Assignment, SolveError> {
    let cells = collect_cells(text)?;
    let n = cs.bound;
    let letters = cs.num_letters() as i64;
    let missing = |c: &str| SolveError::MalformedModel(format!("no value for {c}"));
    let get = |name: &str, args: Vec<i64>| -> Result<&lexpr::Value, SolveError> {
        let label = format!("({name} {args:?})");
        cells.get(&(name.to_string(), args)).ok_or_else(|| missing(&label))
    };
    let mut delta = vec![vec![0usize; letters as usize]; n];
    for q in 0..n {
        for i in 0..letters {
            let v = get("delta", vec![q as i64, i])?;
            let t = as_int(v).filter(|&t| t >= 0 && (t as usize) < n).ok_or_else(|| {
                SolveError::MalformedModel(format!("delta {q} {i} = {v}"))
            })?;
            delta[q][i as usize] = t as usize;
        }
    }
    let mut out = vec![0u64; n];
    for k in 0..cs.num_outputs() {
        for (q, o) in out.iter_mut().enumerate() {
            let name = format!("out{k}");
            let v = get(&name, vec![q as i64])?;
            let b = as_bool(v)
                .ok_or_else(|| SolveError::MalformedModel(format!("{name} {q} = {v}")))?;
            if b {
                *o |= 1 << k;
            }
        }
    }
    let mut rank = vec![vec![0i64; n]; cs.nba.num_states()];
    for (a, row) in rank.iter_mut().enumerate() {
        for (q, r) in row.iter_mut().enumerate() {
            let v = get("rho", vec![a as i64, q as i64])?;
            *r = as_int(v).ok_or_else(|| SolveError::MalformedModel(format!("rho {a} {q} = {v}")))?;
        }
    }
    Ok(Assignment { delta, out, rank })
}

/// Pipes `script` into the solver command and reads its answer. The process
/// is killed after `timeout`, which yields an unknown result.
pub fn run_external(
    cs: &ConstraintSystem,
    cmd: &str,
    script: &str,
    timeout: Duration,
) -> Result<SolverOutcome, SolveError> {
    let spawn_err = |message: String| SolveError::Spawn {
        cmd: cmd.to_string(),
        message,
    };
    let argv = shlex::split(cmd).filter(|v| !v.is_empty()).ok_or_else(|| spawn_err("empty or unparsable command".into()))?;
    let start = Instant::now();
    let mut child = Command::new(&argv[0])
        .args(&argv[1..])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| spawn_err(e.to_string()))?;
    let mut stdin = child.stdin.take().expect("piped stdin");
    let script = script.to_string();
    let writer = std::thread::spawn(move || {
        // a solver that exits early closes the pipe; that is not our error
        let _ = stdin.write_all(script.as_bytes());
    });
    let mut stdout = child.stdout.take().expect("piped stdout");
    let reader = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = stdout.read_to_string(&mut s);
        s
    });
    let finished = child
        .wait_timeout(timeout)
        .map_err(|e| spawn_err(e.to_string()))?;
    if finished.is_none() {
        let _ = child.kill();
        let _ = child.wait();
        let _ = writer.join();
        let _ = reader.join();
        return Ok(SolverOutcome {
            status: SolverStatus::Unknown(format!("timeout after {} s", timeout.as_secs())),
            millis: start.elapsed().as_millis(),
            backend: cmd.to_string(),
        });
    }
    let _ = writer.join();
    let text = reader.join().unwrap_or_default();
    let mut lines = text.splitn(2, '\n');
    let first = lines.next().unwrap_or("").trim();
    let rest = lines.next().unwrap_or("");
    let status = match first {
        "sat" => SolverStatus::Sat(parse_model(cs, rest)?),
        "unsat" => SolverStatus::Unsat,
        "unknown" => SolverStatus::Unknown("solver answered unknown".into()),
        other => {
            return Err(SolveError::MalformedModel(format!(
                "expected sat/unsat/unknown, got '{other}'"
            )))
        }
    };
    Ok(SolverOutcome {
        status,
        millis: start.elapsed().as_millis(),
        backend: cmd.to_string(),
    })
}
