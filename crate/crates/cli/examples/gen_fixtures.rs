//! Regenerates the seeded fixture corpus under `fixtures/corpus`.
//!
//! Each fixture is `U * diag(d1, d1 * c) * V` (or a 1x1 `[d1]`) over
//! `Z_p[[X1]]` with unimodular `U`, `V`, so its cokernel is isomorphic to
//! `A/(d1) ⊕ A/(d1 c)` and finite-shadow counts are predictable.
//!
//! Run with `cargo run -p iwasawa-cli --example gen_fixtures`.

use std::fs;
use std::path::Path;

use iwasawa_core::{sample, AbelianGroupSpec, GroupRingElement, PrecisionContext, Presentation, Series};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PER_PRIME: usize = 60;

/// Elementary divisors whose primes the factoriser certifies.
const BUILDING_BLOCKS: [&str; 9] = ["1", "P", "X1", "X1 + P", "P*X1", "X1^2", "X1 + 2*P", "X1^2 + P*X1 + P", "P^2"];

fn block(p: u64, i: usize) -> String {
    BUILDING_BLOCKS[i].replace('P', &p.to_string())
}

fn elementary(rng: &mut ChaCha8Rng, ctx: &PrecisionContext, upper: bool) -> Presentation {
    let g = AbelianGroupSpec::trivial();
    let one = GroupRingElement::one(ctx, 1, &g);
    let zero = GroupRingElement::zero(ctx, 1, &g);
    let t = GroupRingElement::from_series(&g, sample::series(rng, ctx, 1, 2, 2));
    let entries = if upper {
        vec![one.clone(), t, zero, one]
    } else {
        vec![one.clone(), zero, t, one]
    };
    Presentation::new(ctx, 1, &g, 2, 2, entries).unwrap()
}

fn job_text(p: u64, ctx: &PrecisionContext, theta: &Presentation, note: &str) -> String {
    let mut out = format!(
        "format iwasawa-job/1\n# {note}\ncontext p={p} N={} D={}\npresentation level=1 rows={} cols={}\n",
        ctx.precision(),
        ctx.degree_cap(),
        theta.rows(),
        theta.cols()
    );
    for i in 0..theta.rows() {
        let row: Vec<String> = (0..theta.cols()).map(|j| theta.entry(i, j).to_string()).collect();
        out += &row.join(" | ");
        out.push('\n');
    }
    out += "end\nparam a=1,2,3\nparam b=1,2,3\n";
    out
}

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/corpus");
    fs::create_dir_all(&dir).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(20_261_019);
    let g = AbelianGroupSpec::trivial();
    for p in [2u64, 3] {
        let ctx = PrecisionContext::new(p, 8, 16).unwrap();
        for n in 0..PER_PRIME {
            let i = rng.gen_range(0..BUILDING_BLOCKS.len());
            let d1 = Series::parse(&ctx, 1, &block(p, i)).unwrap();
            let (theta, note) = if n % 6 == 0 {
                let theta = Presentation::from_series(1, 1, vec![d1]).unwrap();
                (theta, format!("[{}]", block(p, i)))
            } else {
                let j = rng.gen_range(0..BUILDING_BLOCKS.len());
                let d2 = d1.mul(&Series::parse(&ctx, 1, &block(p, j)).unwrap()).unwrap();
                let diag = Presentation::diagonal(vec![
                    GroupRingElement::from_series(&g, d1),
                    GroupRingElement::from_series(&g, d2),
                ])
                .unwrap();
                let u = elementary(&mut rng, &ctx, true).matmul(&elementary(&mut rng, &ctx, false)).unwrap();
                let v = elementary(&mut rng, &ctx, false).matmul(&elementary(&mut rng, &ctx, true)).unwrap();
                let theta = u.matmul(&diag).unwrap().matmul(&v).unwrap();
                (theta, format!("U * diag({}, ({}) * ({})) * V", block(p, i), block(p, i), block(p, j)))
            };
            let name = format!("p{p}_{n:03}.job");
            fs::write(dir.join(name), job_text(p, &ctx, &theta, &note)).unwrap();
        }
    }
    println!("wrote {} fixtures to {}", 2 * PER_PRIME, dir.display());
}
