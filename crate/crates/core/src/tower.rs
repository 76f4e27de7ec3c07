//! Towers of square presentations `theta_1, ..., theta_m` over rising
//! levels, linked by `X_{j+1} -> 0`, and the descent of their
//! characteristic ideals.
//!
//! Since the determinant commutes with ring maps, a compatible tower has
//! `rho(det theta_{j+1}) = det theta_j` exactly, so characteristic ideals
//! descend level by level; the limit ideal is represented by the top level.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fpmod::{char_ideal, normalize, Presentation, PrincipalIdeal};
use crate::groupring::AbelianGroupSpec;
use crate::padic::PrecisionContext;
use crate::powerseries::{CanonicalForm, Series};

/// Largest level accepted by [`noncompleteness_demo`].
pub const DEMO_MAX: usize = 6;

/// `levels[j - 1]` is a `d x d` presentation at level `j`.
#[derive(Clone, Debug)]
pub struct Tower {
    ctx: PrecisionContext,
    group: AbelianGroupSpec,
    levels: Vec<Presentation>,
}

impl Tower {
    /// Compatibility is not enforced here; see [`check_compatibility`].
    pub fn new(levels: Vec<Presentation>) -> Result<Self> {
        let first = levels
            .first()
            .ok_or_else(|| Error::UnsupportedShape("a tower needs at least one level".into()))?;
        let d = first.rows();
        for (j, theta) in levels.iter().enumerate() {
            if theta.level() != j + 1 {
                return Err(Error::UnsupportedShape(format!(
                    "tower entry {} sits at level {}",
                    j + 1,
                    theta.level()
                )));
            }
            if !theta.is_quadratic() || theta.rows() != d {
                return Err(Error::UnsupportedShape(format!(
                    "every level must be {d}x{d}, level {} is {}x{}",
                    j + 1,
                    theta.rows(),
                    theta.cols()
                )));
            }
            if theta.ctx() != first.ctx() || theta.group() != first.group() {
                return Err(Error::ContextMismatch);
            }
        }
        Ok(Tower {
            ctx: first.ctx().clone(),
            group: first.group().clone(),
            levels,
        })
    }

    /// The compatible tower obtained by projecting `top` down to level 1.
    pub fn from_top(top: &Presentation) -> Result<Self> {
        let mut levels = vec![top.clone()];
        while levels.last().expect("nonempty").level() > 1 {
            let next = levels.last().expect("nonempty").project_down()?;
            levels.push(next);
        }
        levels.reverse();
        Tower::new(levels)
    }

    pub fn ctx(&self) -> &PrecisionContext {
        &self.ctx
    }

    pub fn group(&self) -> &AbelianGroupSpec {
        &self.group
    }

    /// Number of levels `m`.
    pub fn height(&self) -> usize {
        self.levels.len()
    }

    pub fn dim(&self) -> usize {
        self.levels[0].rows()
    }

    /// The presentation at level `j` (1-based).
    pub fn level(&self, j: usize) -> &Presentation {
        &self.levels[j - 1]
    }

    pub fn levels(&self) -> &[Presentation] {
        &self.levels
    }

    /// Keeps levels `1..=j`.
    pub fn truncate(&self, j: usize) -> Result<Self> {
        Tower::new(self.levels[..j.min(self.levels.len())].to_vec())
    }
}

/// First entry where `rho(theta_j) != theta_{j-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatibilityFailure {
    pub level: usize,
    pub row: usize,
    pub col: usize,
    pub projected: String,
    pub expected: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatibilityVerdict {
    pub compatible: bool,
    pub first_failure: Option<CompatibilityFailure>,
}

/// Checks `project_down(theta_j) = theta_{j-1}` entrywise for every `j >= 2`.
pub fn check_compatibility(t: &Tower) -> CompatibilityVerdict {
    for j in 2..=t.height() {
        let upper = t.level(j);
        let lower = t.level(j - 1);
        for row in 0..upper.rows() {
            for col in 0..upper.cols() {
                let projected = upper.entry(row, col).project_down().expect("level >= 2");
                if &projected != lower.entry(row, col) {
                    return CompatibilityVerdict {
                        compatible: false,
                        first_failure: Some(CompatibilityFailure {
                            level: j,
                            row,
                            col,
                            projected: projected.to_string(),
                            expected: lower.entry(row, col).to_string(),
                        }),
                    };
                }
            }
        }
    }
    CompatibilityVerdict {
        compatible: true,
        first_failure: None,
    }
}

/// Characteristic ideals per level; `None` marks a level that is not
/// torsion at precision.
#[derive(Clone, Debug)]
pub struct IdealFamily {
    pub ideals: Vec<Option<PrincipalIdeal>>,
    /// First level from which every level is torsion and descends.
    pub stabilization_level: Option<usize>,
}

impl IdealFamily {
    pub fn at(&self, j: usize) -> Option<&PrincipalIdeal> {
        self.ideals[j - 1].as_ref()
    }

    pub fn non_torsion_levels(&self) -> Vec<usize> {
        (1..=self.ideals.len())
            .filter(|&j| self.ideals[j - 1].is_none())
            .collect()
    }
}

/// `rho(gen)` re-expressed in the canonical form of the level below.
pub fn project_generator(gen: &PrincipalIdeal) -> Result<PrincipalIdeal> {
    match gen {
        PrincipalIdeal::Normalized(s) => {
            let down = s.project_down()?;
            if down.is_zero() {
                return Err(Error::PrecisionExhausted(
                    "characteristic generator projects to zero".into(),
                ));
            }
            match down.level() {
                1 => Ok(PrincipalIdeal::Level1(CanonicalForm::of(&down)?)),
                _ => Ok(PrincipalIdeal::Normalized(normalize(&down)?)),
            }
        }
        PrincipalIdeal::Split(parts) => parts
            .iter()
            .map(|(chi, i)| Ok((chi.clone(), project_generator(i)?)))
            .collect::<Result<Vec<_>>>()
            .map(PrincipalIdeal::Split),
        PrincipalIdeal::Level1(_) => Err(Error::LevelUnderflow),
    }
}

fn torsion_char(theta: &Presentation) -> Result<Option<PrincipalIdeal>> {
    match char_ideal(theta) {
        Ok(c) => Ok(Some(c)),
        Err(Error::NotTorsionAtPrecision) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Characteristic ideal at every level, with the descent
/// `rho(char_j) = char_{j-1}` verified wherever both levels are torsion.
pub fn levelwise_char(t: &Tower, parallel: bool) -> Result<IdealFamily> {
    let ideals: Vec<Option<PrincipalIdeal>> = if parallel {
        t.levels.par_iter().map(torsion_char).collect::<Result<_>>()?
    } else {
        t.levels.iter().map(torsion_char).collect::<Result<_>>()?
    };
    let mut stabilization_level = None;
    for j in 1..=ideals.len() {
        match (j, &ideals[j - 1]) {
            (_, None) => stabilization_level = None,
            (1, Some(_)) => stabilization_level = Some(1),
            (_, Some(upper)) => {
                if let Some(lower) = &ideals[j - 2] {
                    let projected = project_generator(upper)?;
                    if &projected != lower {
                        return Err(Error::DescentViolation {
                            level: j,
                            detail: format!("rho(char_{j}) = {projected} but char_{} = {lower}", j - 1),
                        });
                    }
                }
                stabilization_level.get_or_insert(j);
            }
        }
    }
    Ok(IdealFamily {
        ideals,
        stabilization_level,
    })
}

/// The limit ideal, represented by its top-level generator.
#[derive(Clone, Debug)]
pub struct ProChar {
    pub stabilization_level: usize,
    pub top_level: usize,
    pub generator: PrincipalIdeal,
    /// Levels `j > n_0` whose descent to `j - 1` was verified.
    pub verified_descents: Vec<usize>,
}

pub fn pro_char(t: &Tower, parallel: bool) -> Result<ProChar> {
    let family = levelwise_char(t, parallel)?;
    let n0 = family
        .stabilization_level
        .ok_or(Error::NotTorsionAtPrecision)?;
    let top_level = t.height();
    Ok(ProChar {
        stabilization_level: n0,
        top_level,
        generator: family.at(top_level).expect("torsion above n0").clone(),
        verified_descents: (n0 + 1..=top_level).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedPartVerdict {
    pub level: usize,
    pub projected: String,
    pub expected: String,
}

/// Certifies that the `X_{j+1} = 0` fixed part of the level-`(j+1)` module
/// is pseudo-null, by checking `rho(char_{j+1}) = char_j`: the fixed part's
/// characteristic ideal is then the unit ideal.
pub fn fixed_part_check(t: &Tower, j: usize) -> Result<FixedPartVerdict> {
    if j == 0 || j >= t.height() {
        return Err(Error::UnsupportedShape(format!(
            "fixed part needs 1 <= j < {}, got {j}",
            t.height()
        )));
    }
    let lower = char_ideal(t.level(j))?;
    let upper = char_ideal(t.level(j + 1))?;
    let projected = project_generator(&upper)?;
    if projected != lower {
        return Err(Error::CertificateFailed {
            level: j + 1,
            projected: projected.to_string(),
            expected: lower.to_string(),
        });
    }
    Ok(FixedPartVerdict {
        level: j + 1,
        projected: projected.to_string(),
        expected: lower.to_string(),
    })
}

/// Images of the generators at level `n`, zeros removed.
pub fn project_ideal(generators: &[Series], n: usize) -> Result<Vec<Series>> {
    let mut out = Vec::new();
    for g in generators {
        let image = g.project_to(n)?;
        if !image.is_zero() {
            out.push(image);
        }
    }
    Ok(out)
}

/// `target = Σ coefficient_k * generators[index_k]`, checked by ring arithmetic.
#[derive(Clone, Debug)]
pub struct MembershipCertificate {
    pub target: Series,
    pub combination: Vec<(Series, usize)>,
    pub verified: bool,
}

impl MembershipCertificate {
    fn new(target: Series, combination: Vec<(Series, usize)>, generators: &[Series]) -> Result<Self> {
        let mut sum = Series::zero(target.ctx(), target.level());
        for (c, k) in &combination {
            sum = sum.add(&c.mul(&generators[*k])?)?;
        }
        let verified = sum == target;
        Ok(MembershipCertificate {
            target,
            combination,
            verified,
        })
    }
}

impl fmt::Display for MembershipCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .combination
            .iter()
            .map(|(c, k)| format!("({c}) * g{k}"))
            .collect();
        write!(f, "{} = {}", self.target, terms.join(" + "))
    }
}

#[derive(Clone, Debug)]
pub struct DemoLevel {
    pub level: usize,
    /// Generators of the image ideal `K'_j`.
    pub generators: Vec<Series>,
    /// One certificate per `X_i`, `i <= j`.
    pub certificates: Vec<MembershipCertificate>,
    /// Every generator has zero constant term, so `K'_j` lies in the maximal
    /// ideal and misses `1`.
    pub unit_excluded: bool,
}

impl DemoLevel {
    pub fn passed(&self) -> bool {
        self.unit_excluded && self.certificates.iter().all(|c| c.verified)
    }
}

#[derive(Clone, Debug)]
pub struct DemoReport {
    pub m: usize,
    /// The ideal `{p X_1} ∪ {X_i - p X_{i+1} : i <= m}` at level `m + 1`.
    pub source: Vec<Series>,
    pub levels: Vec<DemoLevel>,
}

impl DemoReport {
    pub fn passed(&self) -> bool {
        self.levels.iter().all(DemoLevel::passed)
    }
}

/// Projects `K = (p X_1, X_1 - p X_2, ..., X_m - p X_{m+1})` to each level
/// `j <= m` and certifies `X_i ∈ K'_j` via
/// `X_i = Σ_{k=i}^{j} p^{k-i} * image(X_k - p X_{k+1})`, while `1 ∉ K'_j`.
pub fn noncompleteness_demo(ctx: &PrecisionContext, m: usize) -> Result<DemoReport> {
    if m == 0 || m > DEMO_MAX {
        return Err(Error::TooLarge(format!("demo supports 1 <= m <= {DEMO_MAX}, got {m}")));
    }
    let top = m + 1;
    let x = |i: usize, level: usize| Series::variable(ctx, level, i);
    let p = ctx.p() as i64;
    let mut source = vec![x(1, top)?.scale_i64(p)];
    for i in 1..=m {
        source.push(x(i, top)?.sub(&x(i + 1, top)?.scale_i64(p))?);
    }
    let mut levels = Vec::with_capacity(m);
    for j in 1..=m {
        // Generator k of the image is the image of source[k], so
        // X_k - p X_{k+1} sits at index k and p X_1 at index 0.
        let generators: Vec<Series> = source
            .iter()
            .map(|g| g.project_to(j))
            .collect::<Result<_>>()?;
        let mut certificates = Vec::with_capacity(j);
        for i in 1..=j {
            let combination = (i..=j)
                .map(|k| {
                    let c = Series::constant(ctx, j, &num_bigint::BigInt::from(p).pow((k - i) as u32));
                    (c, k)
                })
                .collect();
            certificates.push(MembershipCertificate::new(x(i, j)?, combination, &generators)?);
        }
        let unit_excluded = generators.iter().all(|g| g.constant_term() == 0u32.into());
        let generators = project_ideal(&source, j)?;
        levels.push(DemoLevel {
            level: j,
            generators,
            certificates,
            unit_excluded,
        });
    }
    Ok(DemoReport { m, source, levels })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(3, 6, 8).unwrap()
    }

    fn one_by_one(level: usize, text: &str) -> Presentation {
        Presentation::parse(&ctx(), level, &AbelianGroupSpec::trivial(), 1, 1, &[text]).unwrap()
    }

    fn sum_tower(m: usize) -> Tower {
        let levels = (1..=m)
            .map(|j| {
                let text = (1..=j).fold("3".to_string(), |acc, i| format!("{acc} + X{i}"));
                one_by_one(j, &text)
            })
            .collect();
        Tower::new(levels).unwrap()
    }

    #[test]
    fn compatibility_examples() {
        assert!(check_compatibility(&sum_tower(4)).compatible);
        let diag = Presentation::parse(
            &ctx(),
            1,
            &AbelianGroupSpec::trivial(),
            2,
            2,
            &["3", "0", "0", "X1"],
        )
        .unwrap();
        let constant = Tower::new((1..=3).map(|j| diag.include_up(j).unwrap()).collect()).unwrap();
        assert!(check_compatibility(&constant).compatible);

        let bad = Tower::new(vec![one_by_one(1, "1"), one_by_one(2, "X2")]).unwrap();
        let v = check_compatibility(&bad);
        assert!(!v.compatible);
        let f = v.first_failure.unwrap();
        assert_eq!((f.level, f.row, f.col), (2, 0, 0));
    }

    #[test]
    fn levelwise_char_examples() {
        let fam = levelwise_char(&sum_tower(4), false).unwrap();
        assert_eq!(fam.stabilization_level, Some(1));
        let top = fam.at(4).unwrap();
        let expected = Series::parse(&ctx(), 4, "X1 + X2 + X3 + X4 + 3").unwrap();
        assert_eq!(top, &PrincipalIdeal::Normalized(normalize(&expected).unwrap()));

        // level 1 is [0], level 2 is [X2 (1 + X1)]
        let t = Tower::new(vec![one_by_one(1, "0"), one_by_one(2, "X2 + X1*X2")]).unwrap();
        let fam = levelwise_char(&t, false).unwrap();
        assert_eq!(fam.non_torsion_levels(), vec![1]);
        assert_eq!(fam.stabilization_level, Some(2));
    }

    #[test]
    fn pro_char_and_fixed_part() {
        let t = sum_tower(3);
        let pc = pro_char(&t, true).unwrap();
        assert_eq!((pc.stabilization_level, pc.top_level), (1, 3));
        for j in 1..3 {
            assert!(fixed_part_check(&t, j).is_ok());
        }
        // [9 + X2] over [3]: incompatible, and the descent picks up a p
        let bad = Tower::new(vec![one_by_one(1, "3"), one_by_one(2, "9 + X2")]).unwrap();
        assert_eq!(fixed_part_check(&bad, 1).unwrap_err().name(), "CertificateFailed");
        // [3 + X2] over [3] is compatible and certified
        let fine = Tower::new(vec![one_by_one(1, "3"), one_by_one(2, "3 + X2")]).unwrap();
        assert!(fixed_part_check(&fine, 1).is_ok());
    }

    #[test]
    fn project_ideal_examples() {
        let c = ctx();
        let x2 = Series::variable(&c, 2, 2).unwrap();
        assert!(project_ideal(std::slice::from_ref(&x2), 1).unwrap().is_empty());
        assert_eq!(project_ideal(std::slice::from_ref(&x2), 2).unwrap(), vec![x2]);
    }

    #[test]
    fn demo_small_cases() {
        let c = ctx();
        let r = noncompleteness_demo(&c, 1).unwrap();
        assert!(r.passed());
        assert_eq!(
            r.levels[0].generators,
            vec![Series::parse(&c, 1, "3*X1").unwrap(), Series::parse(&c, 1, "X1").unwrap()]
        );
        let r = noncompleteness_demo(&c, 2).unwrap();
        assert!(r.passed());
        let cert = &r.levels[1].certificates[0];
        assert_eq!(cert.combination.len(), 2);
        assert!(noncompleteness_demo(&c, 7).is_err());
    }
}
