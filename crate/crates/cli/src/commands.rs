use std::collections::BTreeMap;
use std::f64::consts::PI;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Value};

use lieforge::catalogue::{self, PrintedBracket, PrintedOde};
use lieforge::expr::parse_expr;
use lieforge::hierarchy::{audit_member, complex_split, hierarchy_member};
use lieforge::liealg::{algebra_signature, compare_with_printed, jacobi_check, structure_constants, StructureTable};
use lieforge::reduce::{
    eliminate_to_second_order, emit_series_csv, fig1_checks, fig1_path, fig1_series, integrate_system,
    order_reduce, proportional, rows_from_trajectory, same_equations, travelling_wave_reduce, verify_solution,
    clear_denominators, Component, ExplicitSystem, NumericCheck, OdeSystem, SampleDomain, SolutionCandidate, VerifyMode,
};
use lieforge::symmetry::{discover_symmetries, verify_generator, AnsatzBasis, AnsatzSpec, DiffSystem, VectorField};
use lieforge::{Expr, JetSpec, ZeroTest};

use crate::{AlgebraArgs, Command, Fig1Args, IntegrateArgs, Params, SymmetryCommand, Target, VerifySolutionArgs};

pub struct Outcome {
    pub json: Value,
    /// False when a verification the command performs failed.
    pub verified: bool,
}

fn ok(command: &str, body: Value) -> Outcome {
    with_status(command, body, true)
}

fn with_status(command: &str, mut body: Value, verified: bool) -> Outcome {
    body["schema"] = json!(1);
    body["command"] = json!(command);
    body["seed"] = json!(lieforge::expr::seed_from_env());
    Outcome { json: body, verified }
}

pub fn run(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Member { k, split } => member(*k, *split),
        Command::Audit { k } => audit(*k),
        Command::Symmetries(SymmetryCommand::Find {
            member,
            degree,
            trig,
            expw,
            trig_on_xi,
        }) => {
            let mut spec = AnsatzSpec::default_for_member(*member);
            spec.degree = degree.unwrap_or(spec.degree);
            spec.trig = trig.unwrap_or(spec.trig);
            spec.expw = expw.unwrap_or(spec.expw);
            spec.trig_on_xi = trig_on_xi.unwrap_or(spec.trig_on_xi);
            find(*member, &spec)
        }
        Command::Symmetries(SymmetryCommand::Verify { target, field, family }) => verify(target, field, *family),
        Command::Brackets(a) => brackets(a),
        Command::Classify(a) => classify(a),
        Command::Reduce {
            member,
            c,
            order_reduce,
            eliminate,
        } => reduce(*member, c, *order_reduce, *eliminate),
        Command::VerifySolution(a) => verify_solution_cmd(a),
        Command::Integrate(a) => integrate(a),
        Command::Fig1(a) => fig1(a),
    }
}

fn check_member(k: usize) -> Result<()> {
    if !(1..=4).contains(&k) {
        bail!("member must be between 1 and 4, got {k}");
    }
    Ok(())
}

fn member(k: usize, split: bool) -> Result<Outcome> {
    if k == 0 {
        bail!("members are numbered from 1");
    }
    let e = hierarchy_member(k - 1)?;
    let mut body = json!({ "member": k, "complex": e.to_string() });
    if split {
        let (v, w) = complex_split(&e)?;
        body["split"] = json!({ "v_t": v.to_string(), "w_t": w.to_string() });
    }
    Ok(ok("member", body))
}

fn audit(k: usize) -> Result<Outcome> {
    check_member(k)?;
    let report = audit_member(k)?;
    let matches = report.matches;
    Ok(with_status("audit", serde_json::to_value(&report)?, matches))
}

fn field_json(x: &VectorField) -> Value {
    let labels = VectorField::labels(&x.jet);
    let mut comps = serde_json::Map::new();
    for (i, c) in x.components().enumerate() {
        if !c.is_zero() {
            comps.insert(labels[i].clone(), json!(c.to_string()));
        }
    }
    json!({ "text": x.to_string(), "operator": x.operator_string(), "components": comps })
}

fn status(z: ZeroTest) -> &'static str {
    match z {
        ZeroTest::Zero => "zero",
        ZeroTest::ProbablyZero => "probably-zero",
        ZeroTest::Nonzero => "nonzero",
    }
}

fn find(k: usize, spec: &AnsatzSpec) -> Result<Outcome> {
    check_member(k)?;
    let sys = catalogue::member(k)?;
    let basis = AnsatzBasis::new(&sys.jet, spec)?;
    let d = discover_symmetries(&sys, &basis)?;
    let fields: Vec<Value> = d
        .fields
        .iter()
        .zip(&d.reports)
        .map(|(f, r)| {
            let mut v = field_json(f);
            v["status"] = json!(status(r.status));
            v["characteristic"] = json!(status(r.characteristic));
            v
        })
        .collect();
    let printed = catalogue::member_generators(k)?
        .iter()
        .map(|g| Ok(json!({ "field": g.to_string(), "in_span": d.spans(&basis, g)? })))
        .collect::<Result<Vec<_>>>()?;
    let all = d.all_verified();
    Ok(with_status(
        "symmetries find",
        json!({
            "member": k,
            "ansatz": {
                "degree": spec.degree,
                "trig": spec.trig,
                "expw": spec.expw,
                "trig_on_xi": spec.trig_on_xi,
                "size": basis.len(),
            },
            "rank": d.system.rank(),
            "dimension": d.dimension(),
            "fields": fields,
            "printed_generators": printed,
            "all_verified": all,
        }),
        all,
    ))
}

enum System {
    Pde(lieforge::hierarchy::PdeSystem),
    Ode(OdeSystem),
}

impl System {
    fn as_dyn(&self) -> &dyn DiffSystem {
        match self {
            System::Pde(p) => p,
            System::Ode(o) => o,
        }
    }

    fn jet(&self) -> &JetSpec {
        self.as_dyn().jet()
    }
}

fn resolve(target: &Target) -> Result<(System, String)> {
    match (&target.member, &target.system) {
        (Some(k), None) => {
            check_member(*k)?;
            Ok((System::Pde(catalogue::member(*k)?), format!("member{k}")))
        }
        (None, Some(name)) => Ok((System::Ode(PrintedOde::from_name(name)?.system()?), name.clone())),
        _ => bail!("give exactly one of --member and --system"),
    }
}

fn printed_generators(name: &str) -> Result<Vec<VectorField>> {
    Ok(match name {
        "member2" => catalogue::member2_generators()?,
        "member3" => catalogue::member3_generators()?,
        "member4" => catalogue::member4_generators()?,
        "member2-wave" => catalogue::member2_wave_generators()?,
        "member3-wave" => catalogue::member3_wave_generators()?,
        _ => bail!("no published generators for {name}; pass --field"),
    })
}

fn verify(target: &Target, texts: &[String], family: bool) -> Result<Outcome> {
    let (sys, name) = resolve(target)?;
    let fields = if family {
        if !texts.is_empty() {
            bail!("--family and --field are exclusive");
        }
        match name.as_str() {
            "member2" => vec![catalogue::member2_family()?],
            "member3" => vec![catalogue::member3_family()?],
            _ => bail!("no infinite family is published for {name}"),
        }
    } else if texts.is_empty() {
        printed_generators(&name)?
    } else {
        texts
            .iter()
            .map(|t| VectorField::parse(t, sys.jet()).with_context(|| format!("parsing field `{t}`")))
            .collect::<Result<_>>()?
    };
    let mut all = true;
    let reports = fields
        .iter()
        .map(|f| {
            let r = verify_generator(sys.as_dyn(), f)?;
            all &= r.is_symmetry();
            let mut v = field_json(f);
            v["constraints"] = json!(f.constraints.iter().map(|c| c.to_string()).collect::<Vec<_>>());
            v["status"] = json!(status(r.status));
            v["characteristic"] = json!(status(r.characteristic));
            v["remainders"] = json!(r.remainders);
            Ok(v)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(with_status(
        "symmetries verify",
        json!({ "target": name, "generators": reports, "all_verified": all }),
        all,
    ))
}

/// Generators behind `brackets` and `classify`, with the published table
/// if there is one and a note on substitutions made.
fn algebra_basis(a: &AlgebraArgs) -> Result<(Vec<VectorField>, Option<Vec<PrintedBracket>>, Vec<String>)> {
    check_member(a.member)?;
    let mut notes = Vec::new();
    Ok(match (a.member, a.reduced) {
        (2, false) => (catalogue::member2_generators()?, Some(catalogue::member2_printed_brackets()?), notes),
        (3, false) => {
            let mut g = catalogue::member3_generators()?;
            g[1] = catalogue::member3_scaling()?;
            notes.push(format!("X2 replaced by {}", g[1].operator_string()));
            (g, Some(catalogue::member3_printed_brackets()?), notes)
        }
        (4, false) => (catalogue::member4_generators()?, None, notes),
        (2, true) => (catalogue::member2_wave_generators()?, None, notes),
        (3, true) => (catalogue::member3_wave_generators()?, None, notes),
        (k, _) => bail!("no published generator list for member {k}{}", if a.reduced { " (reduced)" } else { "" }),
    })
}

fn table_json(t: &StructureTable) -> Value {
    json!({
        "dimension": t.dimension(),
        "generators": t.basis.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
        "closed": t.is_closed(),
        "brackets": t.lines(),
        "constants": t.constant_strings(),
    })
}

fn brackets(a: &AlgebraArgs) -> Result<Outcome> {
    let (basis, printed, notes) = algebra_basis(a)?;
    let t = structure_constants(&basis)?;
    let mut body = table_json(&t);
    body["member"] = json!(a.member);
    body["reduced"] = json!(a.reduced);
    body["notes"] = json!(notes);
    body["jacobi"] = json!(t.is_closed() && jacobi_check(&t)?);
    if a.member == 3 && a.reduced {
        let sub = structure_constants(&basis[2..5])?;
        let shifted: Vec<PrintedBracket> = catalogue::member3_wave_printed_brackets()?
            .into_iter()
            .map(|b| PrintedBracket {
                left: b.left - 2,
                right: b.right - 2,
                combination: b.combination.into_iter().map(|(e, k)| (e, k - 2)).collect(),
            })
            .collect();
        body["subalgebra_3_4_5"] = json!({
            "brackets": sub.lines(),
            "disagreements": serde_json::to_value(compare_with_printed(&sub, &shifted)?)?,
        });
    }
    if let Some(p) = printed {
        body["disagreements"] = serde_json::to_value(compare_with_printed(&t, &p)?)?;
    }
    Ok(ok("brackets", body))
}

fn classify(a: &AlgebraArgs) -> Result<Outcome> {
    let (basis, _, notes) = algebra_basis(a)?;
    let t = structure_constants(&basis)?;
    if !t.is_closed() {
        let mut body = table_json(&t);
        body["notes"] = json!(notes);
        body["error"] = json!("generators do not close under brackets");
        return Ok(with_status("classify", body, false));
    }
    let sig = algebra_signature(&t)?;
    Ok(ok(
        "classify",
        json!({
            "member": a.member,
            "reduced": a.reduced,
            "notes": notes,
            "brackets": t.lines(),
            "signature": serde_json::to_value(&sig)?,
        }),
    ))
}

fn reduce(k: usize, c: &str, lower: bool, eliminate: bool) -> Result<Outcome> {
    check_member(k)?;
    let pde = catalogue::member(k)?;
    let speed = parse_expr(c, &pde.jet.clone().with_parameters(&["c"])).context("parsing --c")?;
    let r = travelling_wave_reduce(&pde, &speed)?;
    let symbolic = speed == Expr::sym("c");
    let printed_wave = match k {
        2 => Some(PrintedOde::Member2Wave),
        3 => Some(PrintedOde::Member3Wave),
        4 => Some(PrintedOde::Member4Wave),
        _ => None,
    };
    let compare = |sys: &OdeSystem, p: Option<PrintedOde>| -> Result<Value> {
        Ok(match p {
            Some(p) if symbolic => json!({
                "system": p.name(),
                "matches": same_equations(&sys.equations, &p.system()?.equations),
            }),
            _ => Value::Null,
        })
    };
    let eqs = |sys: &OdeSystem| sys.equations.iter().map(|e| e.to_string()).collect::<Vec<_>>();
    let mut body = json!({
        "member": k,
        "c": speed.to_string(),
        "similarity_variable": r.map.s.to_string(),
        "removed_factors": r.removed_factors,
        "wave": { "equations": eqs(&r.system), "printed": compare(&r.system, printed_wave)? },
    });
    if lower || eliminate {
        let first = order_reduce(&r.system)?;
        let printed = match k {
            2 => Some(PrintedOde::Member2FirstOrder),
            3 => Some(PrintedOde::Member3Reduced),
            _ => None,
        };
        body["order_reduced"] = json!({ "equations": eqs(&first), "printed": compare(&first, printed)? });
        if eliminate {
            if k != 2 {
                bail!("--eliminate applies to member 2 only");
            }
            let e = eliminate_to_second_order(&first)?;
            let mut out = json!({ "equation": e.to_string() });
            if symbolic {
                let p = PrintedOde::SecondOrderF.system()?;
                let target = clear_denominators(&p.equations[0])?;
                out["printed"] = json!({
                    "system": p.label,
                    "proportional": proportional(&e, &target, &first.jet)?,
                });
            }
            body["eliminated"] = out;
        }
    }
    Ok(ok("reduce", body))
}

fn solution(name: &str) -> Result<(SolutionCandidate, PrintedOde)> {
    Ok(match name {
        "tan" => (catalogue::tan_solution()?, PrintedOde::Member2FirstOrder),
        "rational-exp" => (catalogue::rational_exp_solution()?, PrintedOde::Member2FirstOrder),
        "rational-trig" => (catalogue::rational_trig_solution()?, PrintedOde::Member3Reduced),
        "sn" => (catalogue::elliptic_solution()?, PrintedOde::Member3Reduced),
        "linear" => (catalogue::linear_solution()?, PrintedOde::Member4Wave),
        _ => bail!("unknown solution `{name}` (tan, rational-exp, rational-trig, sn, linear)"),
    })
}

fn bindings(p: &Params) -> BTreeMap<String, f64> {
    [
        ("c", p.c),
        ("F0", p.f0_upper),
        ("F1", p.f1_upper),
        ("G0", p.g0_upper),
        ("G1", p.g1_upper),
        ("s0", p.s0),
        ("k", p.k),
        ("f0", p.f0),
        ("f1", p.f1),
        ("g0", p.g0),
    ]
    .into_iter()
    .filter_map(|(k, v)| v.map(|v| (k.to_string(), v)))
    .collect()
}

fn require(params: &BTreeMap<String, f64>, names: &[String]) -> Result<()> {
    let missing: Vec<&str> = names
        .iter()
        .filter(|n| !params.contains_key(*n))
        .map(String::as_str)
        .collect();
    if !missing.is_empty() {
        bail!("missing parameter values: {}", missing.join(", "));
    }
    Ok(())
}

fn parse_range(text: &str) -> Result<(f64, f64)> {
    let (a, b) = text
        .split_once(':')
        .ok_or_else(|| anyhow!("range must look like a:b, got `{text}`"))?;
    let (a, b): (f64, f64) = (a.trim().parse()?, b.trim().parse()?);
    if !(b > a) {
        bail!("empty range {a}:{b}");
    }
    Ok((a, b))
}

fn verify_solution_cmd(a: &VerifySolutionArgs) -> Result<Outcome> {
    let (cand, home) = solution(&a.solution)?;
    let system = match &a.system {
        Some(n) => PrintedOde::from_name(n)?,
        None => home,
    };
    let sys = system.system()?;
    let numeric = match a.mode.as_deref() {
        Some("symbolic") => false,
        Some("numeric") => true,
        Some(m) => bail!("mode must be symbolic or numeric, got `{m}`"),
        None => !matches!(a.solution.as_str(), "tan" | "linear"),
    };
    let params = bindings(&a.params);
    let mode = if numeric {
        if !(a.tol > 0.0) {
            bail!("tolerance must be positive");
        }
        require(&params, &cand.jet.parameters.iter().cloned().collect::<Vec<_>>())?;
        let (lo, hi) = match &a.range {
            Some(r) => parse_range(r)?,
            None => (0.0, 2.0 * PI),
        };
        VerifyMode::Numeric(NumericCheck {
            params: params.clone(),
            domain: SampleDomain {
                lo,
                hi,
                samples: a.samples,
            },
            tol: a.tol,
        })
    } else {
        VerifyMode::Symbolic
    };
    let report = verify_solution(&sys, &cand, &mode)?;
    let passed = report.passed;
    let mut body = serde_json::to_value(&report)?;
    body["solution"] = json!(a.solution);
    body["system"] = json!(system.name());
    body["mode"] = json!(if numeric { "numeric" } else { "symbolic" });
    if numeric {
        body["params"] = json!(params);
        body["tol"] = json!(a.tol);
    }
    Ok(with_status("verify-solution", body, passed))
}

fn integrate(a: &IntegrateArgs) -> Result<Outcome> {
    let sys = PrintedOde::from_name(&a.system)?.system()?;
    let (cand, _) = solution(&a.from)?;
    let params = bindings(&a.params);
    require(&params, &sys.jet.parameters)?;
    require(&params, &cand.jet.parameters)?;
    let range = parse_range(&a.range)?;
    let ex = ExplicitSystem::new(&sys, &params)?;
    let init = ex.initial_state(&cand, range.0, &params)?;
    let traj = integrate_system(&ex, init, range, a.h)?;
    let mut exact = Vec::with_capacity(traj.labels.len());
    for label in &traj.labels {
        let var = label.trim_end_matches('\'');
        let order = label.len() - var.len();
        let closed = match cand.component(var) {
            Some(Component::Closed(_)) => Some(cand.compile_closed(var, order, &params)?),
            _ => None,
        };
        exact.push((var, order, closed));
    }
    let mut max_error: f64 = 0.0;
    for (s, y) in traj.s.iter().zip(&traj.states) {
        for (i, (var, order, closed)) in exact.iter().enumerate() {
            let value = match closed {
                Some(ev) => ev.at(*s),
                None => cand.derivatives(var, *order, *s, &params),
            };
            match value {
                Ok(d) => max_error = max_error.max((y[i] - d[*order]).norm()),
                Err(lieforge::Error::Pole(_)) => {}
                Err(e) => return Err(e.into()),
            }
        }
    }
    if let Some(path) = &a.csv {
        emit_series_csv(&rows_from_trajectory(&traj), path)?;
    }
    Ok(ok(
        "integrate",
        json!({
            "system": sys.label,
            "from": a.from,
            "params": params,
            "method": traj.method,
            "h": a.h,
            "range": [range.0, range.1],
            "steps": traj.len().saturating_sub(1),
            "labels": traj.labels,
            "stopped_at_pole": traj.pole,
            "max_error_vs_solution": max_error,
            "final_state": traj.states.last().map(|y| y.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>()),
            "csv": a.csv.as_ref().map(|p| p.display().to_string()),
        }),
    ))
}

fn fig1(a: &Fig1Args) -> Result<Outcome> {
    if a.c == 0.0 {
        bail!("c must be nonzero");
    }
    let period = 2.0 * PI / a.c.abs();
    let range = (0.0, a.periods * period);
    let mut files = Vec::new();
    if let Some(base) = &a.csv {
        for &f1 in &a.f1 {
            let rows = fig1_series(a.c, a.f0, f1, range, a.samples)?;
            let path = fig1_path(base, f1);
            emit_series_csv(&rows, &path)?;
            files.push(json!({ "F1": f1, "path": path.display().to_string(), "rows": rows.len() }));
        }
    }
    let checks = fig1_checks(a.c, a.f0, &a.f1)?;
    Ok(ok(
        "fig1",
        json!({
            "c": a.c,
            "F0": a.f0,
            "range": [range.0, range.1],
            "files": files,
            "checks": serde_json::to_value(&checks)?,
        }),
    ))
}
