//! Acceptance gate: runs every criterion at its stated size and tolerance and
//! prints one pass/fail line per criterion. Exits non-zero if any fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use iwasawa_cli::commands::{self, Options, COMMANDS};
use iwasawa_cli::job::Job;
use iwasawa_cli::report::Report;
use iwasawa_core::fpmod::{char_ideal, check_multiplicativity, det_quadratic};
use iwasawa_core::groupring::split_idempotents;
use iwasawa_core::powerseries::weierstrass_prepare;
use iwasawa_core::tower::{check_compatibility, fixed_part_check, levelwise_char, noncompleteness_demo, Tower};
use iwasawa_core::{
    sample, AbelianGroupSpec, CanonicalForm, Error, GroupRingElement, PrecisionContext, Presentation,
    PrincipalIdeal, Series,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn fixtures(sub: &str) -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(sub);
    let mut files: Vec<PathBuf> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "job"))
        .collect();
    files.sort();
    files
}

fn within(elapsed: Duration, limit: Duration, summary: String) -> Outcome {
    if elapsed <= limit {
        Ok(format!("{summary} in {:.2}s", elapsed.as_secs_f64()))
    } else {
        Err(format!("{summary} but took {:.2}s (limit {}s)", elapsed.as_secs_f64(), limit.as_secs()))
    }
}

fn weierstrass_roundtrip() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut count = 0;
    for p in [2u64, 3, 5] {
        let ctx = PrecisionContext::new(p, 16, 32).unwrap();
        let runs = if p == 5 { 334 } else { 333 };
        for _ in 0..runs {
            // mu = 0 and lambda <= 15 put a unit coefficient below degree 16
            let f = sample::level1_with_invariants(&mut rng, &ctx, 0, 15, 31);
            let w = weierstrass_prepare(&f).map_err(|e| format!("{f}: {e}"))?;
            let back = w.unit.mul(&w.distinguished).unwrap().scale(ctx.p_pow(w.mu));
            if back != f || !w.unit.is_unit() {
                return Err(format!("roundtrip failed for {f}"));
            }
            count += 1;
        }
    }
    within(start.elapsed(), Duration::from_secs(10), format!("{count}/{count} roundtrips exact"))
}

fn char_equals_det() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for n in 0..500 {
        let p = [2u64, 3, 5][n % 3];
        // D above the determinant degree, so nothing is truncated
        let ctx = PrecisionContext::new(p, 8, 16).unwrap();
        let theta = sample::torsion_square(&mut rng, &ctx, 1, 2, 3).unwrap();
        let det = det_quadratic(&theta).unwrap().as_series().unwrap();
        let expected = CanonicalForm::of(&det).map_err(|e| e.to_string())?;
        let got = char_ideal(&theta).map_err(|e| format!("{theta:?}: {e}"))?;
        if got.as_level1() != Some(&expected) {
            return Err(format!("case {n}: char {got} but det gives {expected}"));
        }
    }
    Ok("500/500 canonical char = canonical det".into())
}

fn multiplicativity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 0..200 {
        let p = [2u64, 3, 5][n % 3];
        let ctx = PrecisionContext::new(p, 8, 16).unwrap();
        let first = sample::torsion_square(&mut rng, &ctx, 1, 2, 2).unwrap();
        let third = sample::torsion_square(&mut rng, &ctx, 1, 2, 2).unwrap();
        let v = check_multiplicativity(&first, &third, &mut rng).map_err(|e| format!("case {n}: {e}"))?;
        if !v.product_holds {
            return Err(format!("case {n}: {} != {} * {}", v.char_assembled, v.char_first, v.char_third));
        }
        if !v.inclusion_holds {
            return Err(format!("case {n}: {} does not divide {}", v.char_third, v.char_assembled));
        }
    }
    Ok("200/200 block-triangular 4x4 products and inclusions hold".into())
}

fn oracle_cross_validation() -> Outcome {
    let start = Instant::now();
    let files = fixtures("corpus");
    if files.len() < 100 {
        return Err(format!("corpus has only {} fixtures", files.len()));
    }
    let mut grids = 0;
    for f in &files {
        let job = Job::parse(&std::fs::read_to_string(f).unwrap()).map_err(|e| e.to_string())?;
        if job.context.p > 3 || job.presentation.as_ref().is_none_or(|b| b.level != 1 || b.rows > 2) {
            return Err(format!("{} is outside the corpus bounds", f.display()));
        }
        let report = commands::run("cross-validate", &job, &Options::default());
        if report.exit_code != 0 {
            return Err(format!("{}: {}", f.display(), report.lines.join("; ")));
        }
        let agreements = report.result["agreements"].as_array().map_or(0, Vec::len);
        if agreements != 9 {
            return Err(format!("{}: expected the full a,b <= 3 grid, got {agreements}", f.display()));
        }
        grids += agreements;
    }
    within(
        start.elapsed(),
        Duration::from_secs(60),
        format!("{} fixtures, {grids} (a, b) shadows agree", files.len()),
    )
}

fn sum_tower(ctx: &PrecisionContext, m: usize) -> Presentation {
    let mut f = Series::from_i64(ctx, m, ctx.p() as i64);
    for i in 1..=m {
        f = f.add(&Series::variable(ctx, m, i).unwrap()).unwrap();
    }
    Presentation::from_series(1, 1, vec![f]).unwrap()
}

/// A level-1 torsion matrix lifted to level `m` plus `X_m` times noise.
fn perturbed_tower(rng: &mut ChaCha8Rng, ctx: &PrecisionContext, m: usize, d: usize) -> Presentation {
    let g = AbelianGroupSpec::trivial();
    let base = sample::torsion_square(rng, ctx, 1, d, 2).unwrap().include_up(m).unwrap();
    let noise = sample::presentation(rng, ctx, m, &g, d, d, 1).unwrap();
    let x_top = Series::variable(ctx, m, m).unwrap();
    let scaled = noise.map_entries(m, |e| e.scale_series(&x_top)).unwrap();
    let entries: Vec<GroupRingElement> =
        base.entries().iter().zip(scaled.entries()).map(|(a, b)| a.add(b).unwrap()).collect();
    Presentation::new(ctx, m, &g, d, d, entries).unwrap()
}

fn check_tower(top: &Presentation, label: &str) -> Result<usize, String> {
    let tower = Tower::from_top(top).map_err(|e| format!("{label}: {e}"))?;
    if !check_compatibility(&tower).compatible {
        return Err(format!("{label}: not compatible"));
    }
    let family = levelwise_char(&tower, false).map_err(|e| format!("{label}: {e}"))?;
    if family.ideals.iter().any(Option::is_none) {
        return Err(format!("{label}: a level is not torsion"));
    }
    for j in 1..tower.height() {
        fixed_part_check(&tower, j).map_err(|e| format!("{label}, pair {j}/{}: {e}", j + 1))?;
    }
    Ok(tower.height() - 1)
}

fn tower_descent() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut towers, mut pairs) = (0, 0);
    for p in [3u64, 5] {
        let ctx = PrecisionContext::new(p, 6, 6).unwrap();
        let g = AbelianGroupSpec::trivial();
        for m in 2..=6 {
            pairs += check_tower(&sum_tower(&ctx, m), &format!("[p + sum X_i] p={p} m={m}"))?;
            for d in 1..=3 {
                let top = perturbed_tower(&mut rng, &ctx, m, d);
                pairs += check_tower(&top, &format!("perturbed p={p} m={m} d={d}"))?;
            }
            let first = sum_tower(&ctx, m);
            let third = perturbed_tower(&mut rng, &ctx, m, 2);
            let coupling = sample::presentation(&mut rng, &ctx, m, &g, 1, 2, 1).unwrap();
            let block = Presentation::block_upper(&first, &coupling, &third).unwrap();
            pairs += check_tower(&block, &format!("block-triangular p={p} m={m}"))?;
            towers += 5;
        }
    }
    Ok(format!("{towers} towers up to level 6, d <= 3: descent and fixed part certified at {pairs} adjacent pairs"))
}

fn counterexample() -> Outcome {
    let ctx = PrecisionContext::new(3, 8, 8).unwrap();
    let report = noncompleteness_demo(&ctx, 4).map_err(|e| e.to_string())?;
    if report.levels.len() != 4 {
        return Err(format!("expected 4 levels, got {}", report.levels.len()));
    }
    for level in &report.levels {
        let targets: Vec<Series> = (1..=level.level).map(|i| Series::variable(&ctx, level.level, i).unwrap()).collect();
        for t in &targets {
            if !level.certificates.iter().any(|c| c.verified && &c.target == t) {
                return Err(format!("K'_{}: no verified certificate for {t}", level.level));
            }
        }
        if !level.unit_excluded {
            return Err(format!("K'_{}: 1 not excluded", level.level));
        }
    }
    if !report.passed() {
        return Err("report does not pass".into());
    }
    Ok("m = 4: X_1..X_j in K'_j certified and 1 not in K'_j for j <= 4".into())
}

fn group_split() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let ctx = PrecisionContext::new(5, 6, 12).unwrap();
    let mut checked = 0;
    for order in [2u32, 4] {
        let g = AbelianGroupSpec::new(vec![order]).unwrap();
        let es = split_idempotents(&g, &ctx, 1).map_err(|e| e.to_string())?;
        let mut total = GroupRingElement::zero(&ctx, 1, &g);
        for (i, a) in es.iter().enumerate() {
            total = total.add(&a.idempotent).unwrap();
            for (j, b) in es.iter().enumerate() {
                let prod = a.idempotent.convolve(&b.idempotent).unwrap();
                let expected = if i == j { a.idempotent.clone() } else { GroupRingElement::zero(&ctx, 1, &g) };
                if prod != expected {
                    return Err(format!("Z/{order}: e_{i} * e_{j} wrong"));
                }
            }
        }
        if total != GroupRingElement::one(&ctx, 1, &g) {
            return Err(format!("Z/{order}: idempotents do not sum to 1"));
        }
        for case in 0..20 {
            let diag: Vec<GroupRingElement> = (0..2)
                .map(|_| loop {
                    let e = sample::presentation(&mut rng, &ctx, 1, &g, 1, 1, 3).unwrap().entries()[0].clone();
                    if !e.is_zero() {
                        break e;
                    }
                })
                .collect();
            let theta = Presentation::diagonal(diag.clone()).unwrap();
            let parts = match char_ideal(&theta) {
                Ok(PrincipalIdeal::Split(parts)) => parts,
                Err(Error::NotTorsionAtPrecision) => continue,
                other => return Err(format!("Z/{order} case {case}: {other:?}")),
            };
            for (chi, ideal) in &parts {
                let mut expected = CanonicalForm::unit_ideal(5, ctx.precision());
                for e in &diag {
                    let c = CanonicalForm::of(&e.component(chi).unwrap()).map_err(|e| e.to_string())?;
                    expected = expected.mul(&c);
                }
                if ideal.as_level1() != Some(&expected) {
                    return Err(format!("Z/{order} case {case}, {}: {ideal} vs {expected}", chi.label()));
                }
            }
            checked += 1;
        }
    }
    let ctx2 = PrecisionContext::new(2, 6, 12).unwrap();
    let z2 = AbelianGroupSpec::new(vec![2]).unwrap();
    match split_idempotents(&z2, &ctx2, 1) {
        Err(Error::GroupNotSplit(_)) => {}
        other => return Err(format!("p = 2, Z/2: expected GroupNotSplit, got {other:?}")),
    }
    if checked < 30 {
        return Err(format!("only {checked} torsion diagonal cases"));
    }
    Ok(format!("Z/2, Z/4 at p = 5 split exactly, {checked} diagonal chars match; p = 2, Z/2 refused"))
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_iwasawa")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn determinism() -> Outcome {
    let files: Vec<PathBuf> = fixtures("corpus").into_iter().chain(fixtures("handwritten")).collect();
    let jobs: Vec<(String, PathBuf)> = files
        .iter()
        .flat_map(|f| COMMANDS.iter().map(move |c| (c.to_string(), f.clone())))
        .collect();
    let workers = std::thread::available_parallelism().map_or(4, |n| n.get());
    let chunk = jobs.len().div_ceil(workers);
    let failures: Vec<String> = std::thread::scope(|s| {
        let handles: Vec<_> = jobs
            .chunks(chunk)
            .map(|part| {
                s.spawn(move || {
                    let mut bad = Vec::new();
                    for (cmd, f) in part {
                        let path = f.to_str().unwrap();
                        let text = [run_cli(&[cmd, path]), run_cli(&[cmd, path])];
                        let json = [run_cli(&[cmd, path, "--json"]), run_cli(&[cmd, path, "--json", "--parallel"])];
                        let name = format!("{cmd} {}", f.file_name().unwrap().to_string_lossy());
                        if text[0] != text[1] {
                            bad.push(format!("{name}: text differs between runs"));
                        }
                        if json[0] != json[1] {
                            bad.push(format!("{name}: --parallel changes the report"));
                        }
                        let raw = String::from_utf8_lossy(&json[0].1).into_owned();
                        match Report::from_json(&raw) {
                            Ok(r) if r.to_json() == raw && r.exit_code == json[0].0 => {}
                            _ => bad.push(format!("{name}: JSON report does not round-trip")),
                        }
                    }
                    bad
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().unwrap()).collect()
    });
    match failures.first() {
        None => Ok(format!("{} command/fixture pairs byte-identical across runs and --parallel", jobs.len())),
        Some(f) => Err(format!("{} failures, first: {f}", failures.len())),
    }
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("weierstrass roundtrip", weierstrass_roundtrip),
        ("char equals Fit0 on 2x2", char_equals_det),
        ("multiplicativity", multiplicativity),
        ("oracle cross-validation", oracle_cross_validation),
        ("tower descent", tower_descent),
        ("counterexample reproduction", counterexample),
        ("group split", group_split),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(msg) => println!("criterion {}: PASS {name}: {msg}", k + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {msg}", k + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
