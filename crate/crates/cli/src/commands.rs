//! Command dispatch: builds algebra objects from a job and turns results
//! into reports.

use serde_json::{json, Value};

use iwasawa_core::fpmod::{
    char_ideal, fitting0, is_pseudo_null, pseudo_null_certificate, PrimeDescriptor,
};
use iwasawa_core::oracle::{coker_cardinality, cross_validate, FiniteQuotientSpec, OracleOptions, DEFAULT_CAP};
use iwasawa_core::powerseries::weierstrass_prepare;
use iwasawa_core::structure::{decompose, decompose_split, determinantal_divisors, elementary_divisors, Decomposition};
use iwasawa_core::tower::{
    check_compatibility, fixed_part_check, levelwise_char, noncompleteness_demo, pro_char, Tower,
};
use iwasawa_core::{AbelianGroupSpec, Error, PrecisionContext, Presentation, PrincipalIdeal, Series};

use crate::job::Job;
use crate::report::{Report, Status};

/// Every command the front-end understands, by its CLI name.
pub const COMMANDS: [&str; 13] = [
    "char",
    "prep",
    "fit0",
    "snf",
    "decompose",
    "pseudonull",
    "tower-check",
    "tower-char",
    "pro-char",
    "fixed-part",
    "demo-noncomplete",
    "oracle-card",
    "cross-validate",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Options {
    pub parallel: bool,
    /// `(N, D)` replacing the job's context.
    pub precision_override: Option<(u32, u32)>,
    /// Oracle memory budget in bytes of membership bitmap.
    pub cap: Option<u64>,
}

/// Input problems found while building objects from a job.
enum Failure {
    Algebra(Error),
    Input(String, String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Algebra(e)
    }
}

fn input(field: &str, message: impl Into<String>) -> Failure {
    Failure::Input(field.to_string(), message.into())
}

type Outcome = std::result::Result<(Status, Value, Vec<String>), Failure>;

/// Runs `command` on `job`; never panics on bad input.
pub fn run(command: &str, job: &Job, options: &Options) -> Report {
    let outcome = dispatch(command, job, options);
    match outcome {
        Ok((status, result, lines)) => Report::new(command, status, result, lines),
        Err(Failure::Algebra(e)) => Report::from_error(command, &e),
        Err(Failure::Input(field, message)) => Report::failure(
            command,
            Status::InputError,
            "InputError",
            format!("{field}: {message}"),
        ),
    }
}

fn dispatch(command: &str, job: &Job, options: &Options) -> Outcome {
    let ctx = context(job, options)?;
    let group = AbelianGroupSpec::new(if job.group.is_empty() { vec![] } else { job.group.clone() })?;
    match command {
        "char" => cmd_char(&presentation(job, &ctx, &group)?),
        "prep" => cmd_prep(job, &ctx),
        "fit0" => cmd_fit0(&presentation(job, &ctx, &group)?),
        "snf" => cmd_snf(&presentation(job, &ctx, &group)?),
        "decompose" => cmd_decompose(&presentation(job, &ctx, &group)?),
        "pseudonull" => cmd_pseudonull(&presentation(job, &ctx, &group)?),
        "tower-check" => cmd_tower_check(&tower(job, &ctx, &group)?),
        "tower-char" => cmd_tower_char(&tower(job, &ctx, &group)?, options),
        "pro-char" => cmd_pro_char(&tower(job, &ctx, &group)?, options),
        "fixed-part" => cmd_fixed_part(&tower(job, &ctx, &group)?, job),
        "demo-noncomplete" => cmd_demo(&ctx, job),
        "oracle-card" => cmd_oracle_card(&presentation(job, &ctx, &group)?, job, options),
        "cross-validate" => cmd_cross_validate(&presentation(job, &ctx, &group)?, job, options),
        other => Err(input("command", format!("unknown command '{other}'"))),
    }
}

fn context(job: &Job, options: &Options) -> Result<PrecisionContext, Failure> {
    let (n, d) = options
        .precision_override
        .unwrap_or((job.context.precision, job.context.degree_cap));
    Ok(PrecisionContext::new(job.context.p, n, d)?)
}

fn presentation(job: &Job, ctx: &PrecisionContext, group: &AbelianGroupSpec) -> Result<Presentation, Failure> {
    let block = job
        .presentation
        .as_ref()
        .ok_or_else(|| input("presentation", "this command needs a presentation block"))?;
    let texts: Vec<&str> = block.entries.iter().map(String::as_str).collect();
    Ok(Presentation::parse(ctx, block.level, group, block.rows, block.cols, &texts)?)
}

fn tower(job: &Job, ctx: &PrecisionContext, group: &AbelianGroupSpec) -> Result<Tower, Failure> {
    let block = job
        .tower
        .as_ref()
        .ok_or_else(|| input("tower", "this command needs a tower block"))?;
    let levels = block
        .levels
        .iter()
        .enumerate()
        .map(|(j, entries)| {
            let texts: Vec<&str> = entries.iter().map(String::as_str).collect();
            Presentation::parse(ctx, j + 1, group, block.rows, block.rows, &texts)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Tower::new(levels)?)
}

fn param_u32(job: &Job, key: &str, default: u32) -> Result<u32, Failure> {
    match job.param(key) {
        None => Ok(default),
        Some(v) => v
            .parse()
            .map_err(|_| input(&format!("param {key}"), format!("'{v}' is not a number"))),
    }
}

/// A comma-separated list of numbers, e.g. `a=1,2,3`.
fn param_list(job: &Job, key: &str, default: u32) -> Result<Vec<u32>, Failure> {
    match job.param(key) {
        None => Ok(vec![default]),
        Some(v) => v
            .split(',')
            .map(|x| {
                x.trim()
                    .parse()
                    .map_err(|_| input(&format!("param {key}"), format!("'{x}' is not a number")))
            })
            .collect(),
    }
}

fn ideal_json(ideal: &PrincipalIdeal) -> Value {
    match ideal {
        PrincipalIdeal::Level1(c) => json!({
            "kind": "level1",
            "generator": c.to_string(),
            "mu": c.mu(),
            "lambda": c.lambda(),
            "precision": c.precision(),
        }),
        PrincipalIdeal::Normalized(s) => json!({
            "kind": "normalized",
            "level": s.level(),
            "generator": s.to_string(),
        }),
        PrincipalIdeal::Split(parts) => json!({
            "kind": "split",
            "components": parts
                .iter()
                .map(|(chi, i)| json!({"character": chi.label(), "ideal": ideal_json(i)}))
                .collect::<Vec<_>>(),
        }),
    }
}

fn ideal_lines(prefix: &str, ideal: &PrincipalIdeal) -> Vec<String> {
    match ideal {
        PrincipalIdeal::Level1(c) => vec![
            format!("{prefix} = {c}"),
            format!("mu = {}, lambda = {}", c.mu(), c.lambda()),
        ],
        PrincipalIdeal::Normalized(s) => vec![format!("{prefix} = {s}")],
        PrincipalIdeal::Split(parts) => parts
            .iter()
            .flat_map(|(chi, i)| ideal_lines(&format!("{prefix}[{}]", chi.label()), i))
            .collect(),
    }
}

fn cmd_char(p: &Presentation) -> Outcome {
    let c = char_ideal(p)?;
    Ok((Status::Ok, json!({"char": ideal_json(&c)}), ideal_lines("char", &c)))
}

fn cmd_prep(job: &Job, ctx: &PrecisionContext) -> Outcome {
    let series: Vec<Series> = if let Some(ideal) = &job.ideal {
        ideal
            .generators
            .iter()
            .map(|g| Series::parse(ctx, ideal.level, g))
            .collect::<Result<_, _>>()?
    } else if let Some(p) = &job.presentation {
        // Zero entries carry no Weierstrass data and are skipped.
        let entries: Vec<Series> = p
            .entries
            .iter()
            .map(|e| Series::parse(ctx, p.level, e))
            .collect::<Result<_, _>>()?;
        let nonzero: Vec<Series> = entries.into_iter().filter(|s| !s.is_zero()).collect();
        if nonzero.is_empty() {
            return Err(input("presentation", "every entry is zero"));
        }
        nonzero
    } else {
        return Err(input("ideal", "prep needs an ideal or presentation block"));
    };
    let mut results = Vec::new();
    let mut lines = Vec::new();
    for f in &series {
        let w = weierstrass_prepare(f)?;
        let c = w.canonical();
        lines.push(format!("f = {f}"));
        lines.push(format!("mu = {}, lambda = {}", w.mu, w.lambda));
        lines.push(format!("distinguished = {}", w.distinguished));
        lines.push(format!("unit = {}", w.unit));
        lines.push(format!("canonical = {c}"));
        results.push(json!({
            "input": f.to_string(),
            "mu": w.mu,
            "lambda": w.lambda,
            "distinguished": w.distinguished.to_string(),
            "unit": w.unit.to_string(),
            "precision": w.precision,
            "canonical": c.to_string(),
        }));
    }
    Ok((Status::Ok, json!({"preparations": results}), lines))
}

fn cmd_fit0(p: &Presentation) -> Outcome {
    let gens: Vec<String> = fitting0(p).iter().map(ToString::to_string).collect();
    let mut lines = vec![format!("Fit0 has {} generator(s)", gens.len())];
    lines.extend(gens.iter().enumerate().map(|(i, g)| format!("g{} = {g}", i + 1)));
    Ok((Status::Ok, json!({"generators": gens}), lines))
}

fn cmd_snf(p: &Presentation) -> Outcome {
    let g = determinantal_divisors(p)?;
    let d = elementary_divisors(&g)?;
    let mut lines = Vec::new();
    for (k, (gk, dk)) in g.iter().zip(&d).enumerate() {
        lines.push(format!("g_{} = {gk}    d_{} = {dk}", k + 1, k + 1));
    }
    let strings = |v: &[iwasawa_core::CanonicalForm]| v.iter().map(ToString::to_string).collect::<Vec<_>>();
    Ok((
        Status::Ok,
        json!({"determinantal_divisors": strings(&g), "elementary_divisors": strings(&d)}),
        lines,
    ))
}

fn prime_label(q: &PrimeDescriptor) -> String {
    q.to_string()
}

fn decomposition_json(d: &Decomposition) -> Value {
    json!({
        "primes": d
            .primes
            .iter()
            .map(|(q, e)| json!({"prime": prime_label(q), "exponents": e}))
            .collect::<Vec<_>>(),
        "residual_blocks": d
            .residuals
            .iter()
            .map(|r| json!({"block": r.poly.to_string(), "exponents": r.exponents, "warning": r.warning}))
            .collect::<Vec<_>>(),
    })
}

fn decomposition_lines(prefix: &str, d: &Decomposition) -> Vec<String> {
    if d.is_empty() {
        return vec![format!("{prefix}pseudo-null (no height-one summands)")];
    }
    let mut lines: Vec<String> = d
        .primes
        .iter()
        .map(|(q, e)| format!("{prefix}{q}: exponents {e:?}"))
        .collect();
    lines.extend(d.residuals.iter().map(|r| {
        format!(
            "{prefix}unfactored block ({}): exponents {:?} (warning: not a certified prime)",
            r.poly, r.exponents
        )
    }));
    lines
}

fn cmd_decompose(p: &Presentation) -> Outcome {
    if p.group().is_trivial() {
        let d = decompose(p)?;
        return Ok((Status::Ok, json!({"decomposition": decomposition_json(&d)}), decomposition_lines("", &d)));
    }
    let parts = decompose_split(p)?;
    let mut lines = Vec::new();
    let mut items = Vec::new();
    for (chi, d) in &parts {
        lines.extend(decomposition_lines(&format!("{}: ", chi.label()), d));
        items.push(json!({"character": chi.label(), "decomposition": decomposition_json(d)}));
    }
    Ok((Status::Ok, json!({"components": items}), lines))
}

fn cmd_pseudonull(p: &Presentation) -> Outcome {
    if p.level() == 1 {
        let v = is_pseudo_null(p)?;
        let line = if v.value { "pseudo-null" } else { "not pseudo-null" };
        let status = if v.value { Status::Ok } else { Status::VerdictFailure };
        return Ok((status, json!({"pseudo_null": v.value, "exact": v.exact}), vec![line.to_string()]));
    }
    match pseudo_null_certificate(p)? {
        Some(cert) => Ok((
            Status::Ok,
            json!({
                "pseudo_null": true,
                "certificate": {
                    "first": cert.first,
                    "second": cert.second,
                    "first_specialized": cert.first_specialized.to_string(),
                    "second_specialized": cert.second_specialized.to_string(),
                },
            }),
            vec![
                "pseudo-null (certified)".to_string(),
                format!(
                    "Fit0 generators {} and {} specialise to coprime {} and {}",
                    cert.first + 1,
                    cert.second + 1,
                    cert.first_specialized,
                    cert.second_specialized
                ),
            ],
        )),
        None => Ok((
            Status::VerdictFailure,
            json!({"pseudo_null": Value::Null, "certificate": Value::Null}),
            vec!["not certified: no pair of Fit0 generators with coprime specialisations".to_string()],
        )),
    }
}

fn cmd_tower_check(t: &Tower) -> Outcome {
    let v = check_compatibility(t);
    match v.first_failure {
        None => Ok((
            Status::Ok,
            json!({"compatible": true}),
            vec![format!("compatible ({} levels)", t.height())],
        )),
        Some(f) => Ok((
            Status::VerdictFailure,
            json!({"compatible": false, "first_failure": {
                "level": f.level, "row": f.row + 1, "col": f.col + 1,
                "projected": f.projected, "expected": f.expected,
            }}),
            vec![
                "incompatible".to_string(),
                format!(
                    "first failure: level {}, entry ({}, {}): projected {} but level {} has {}",
                    f.level,
                    f.row + 1,
                    f.col + 1,
                    f.projected,
                    f.level - 1,
                    f.expected
                ),
            ],
        )),
    }
}

fn cmd_tower_char(t: &Tower, options: &Options) -> Outcome {
    let family = levelwise_char(t, options.parallel)?;
    let mut lines = Vec::new();
    let mut levels = Vec::new();
    for j in 1..=t.height() {
        match family.at(j) {
            Some(c) => {
                lines.extend(ideal_lines(&format!("level {j}: char"), c));
                levels.push(json!({"level": j, "torsion": true, "char": ideal_json(c)}));
            }
            None => {
                lines.push(format!("level {j}: not torsion at precision"));
                levels.push(json!({"level": j, "torsion": false}));
            }
        }
    }
    match family.stabilization_level {
        Some(n0) => lines.push(format!("descent verified from level {n0}")),
        None => lines.push("top level is not torsion".to_string()),
    }
    Ok((
        Status::Ok,
        json!({"levels": levels, "stabilization_level": family.stabilization_level}),
        lines,
    ))
}

fn cmd_pro_char(t: &Tower, options: &Options) -> Outcome {
    let pc = pro_char(t, options.parallel)?;
    let mut lines = vec![format!("n0 = {}, top level = {}", pc.stabilization_level, pc.top_level)];
    lines.extend(ideal_lines("generator", &pc.generator));
    lines.push(format!("verified descents at levels {:?}", pc.verified_descents));
    Ok((
        Status::Ok,
        json!({
            "stabilization_level": pc.stabilization_level,
            "top_level": pc.top_level,
            "generator": ideal_json(&pc.generator),
            "verified_descents": pc.verified_descents,
        }),
        lines,
    ))
}

fn cmd_fixed_part(t: &Tower, job: &Job) -> Outcome {
    let levels: Vec<usize> = match job.param("j") {
        Some(_) => vec![param_u32(job, "j", 1)? as usize],
        None => (1..t.height()).collect(),
    };
    let mut lines = Vec::new();
    let mut items = Vec::new();
    for j in levels {
        let v = fixed_part_check(t, j)?;
        lines.push(format!(
            "level {} over {j}: rho(char) = {} = char_{j}; fixed part pseudo-null certified",
            v.level, v.projected
        ));
        items.push(json!({"level": v.level, "projected": v.projected, "expected": v.expected}));
    }
    Ok((Status::Ok, json!({"certified": items}), lines))
}

fn cmd_demo(ctx: &PrecisionContext, job: &Job) -> Outcome {
    let m = param_u32(job, "m", 4)? as usize;
    let report = noncompleteness_demo(ctx, m)?;
    let mut lines = vec![format!(
        "K = ({}) at level {}",
        report.source.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "),
        m + 1
    )];
    let mut levels = Vec::new();
    for l in &report.levels {
        let gens: Vec<String> = l.generators.iter().map(ToString::to_string).collect();
        let labelled: Vec<String> = gens.iter().enumerate().map(|(k, g)| format!("g{k} = {g}")).collect();
        lines.push(format!("K'_{} = ({})", l.level, labelled.join(", ")));
        for c in &l.certificates {
            let mark = if c.verified { "verified" } else { "FAILED" };
            lines.push(format!("  {c}  [{mark}]"));
        }
        lines.push(format!(
            "  1 not in K'_{}: {}",
            l.level,
            if l.unit_excluded { "certified (all generators lie in the maximal ideal)" } else { "NOT certified" }
        ));
        levels.push(json!({
            "level": l.level,
            "generators": gens,
            "certificates": l.certificates.iter().map(|c| json!({
                "target": c.target.to_string(),
                "combination": c.combination.iter().map(|(s, k)| json!({"coefficient": s.to_string(), "generator": k})).collect::<Vec<_>>(),
                "verified": c.verified,
            })).collect::<Vec<_>>(),
            "unit_excluded": l.unit_excluded,
        }));
    }
    let status = if report.passed() { Status::Ok } else { Status::VerdictFailure };
    Ok((status, json!({"m": m, "levels": levels, "passed": report.passed()}), lines))
}

fn oracle_options(options: &Options) -> OracleOptions {
    OracleOptions {
        // the membership bitmap stores eight elements per byte
        cap: options.cap.map_or(DEFAULT_CAP, |bytes| bytes.saturating_mul(8)),
        parallel: options.parallel,
        method: None,
    }
}

fn quotient(p: &Presentation, a: u32, b: u32) -> FiniteQuotientSpec {
    FiniteQuotientSpec {
        p: p.ctx().p(),
        a,
        b,
        level: p.level(),
        group: p.group().clone(),
    }
}

fn cmd_oracle_card(p: &Presentation, job: &Job, options: &Options) -> Outcome {
    let (az, bz) = (param_list(job, "a", 2)?, param_list(job, "b", 2)?);
    let opts = oracle_options(options);
    let mut lines = Vec::new();
    let mut items = Vec::new();
    for &a in &az {
        for &b in &bz {
            let c = coker_cardinality(p, &quotient(p, a, b), &opts)?;
            lines.push(format!("a={a} b={b}: |coker| = {c}"));
            items.push(json!({"a": a, "b": b, "p": c.p, "exponent": c.exponent}));
        }
    }
    Ok((Status::Ok, json!({"cardinalities": items}), lines))
}

fn cmd_cross_validate(p: &Presentation, job: &Job, options: &Options) -> Outcome {
    let (az, bz) = (param_list(job, "a", 2)?, param_list(job, "b", 2)?);
    let opts = oracle_options(options);
    let mut lines = Vec::new();
    let mut items = Vec::new();
    for &a in &az {
        for &b in &bz {
            let v = cross_validate(p, &quotient(p, a, b), &opts)?;
            lines.push(format!(
                "a={a} b={b}: predicted {} = enumerated {}",
                v.predicted, v.enumerated
            ));
            items.push(json!({"a": a, "b": b, "exponent": v.enumerated.exponent}));
        }
    }
    Ok((Status::Ok, json!({"agreements": items}), lines))
}
