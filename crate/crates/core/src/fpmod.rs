//! Finitely presented modules over `A_n = R_n[G]`, given as cokernels of
//! `d x e` matrices, with their Fitting and characteristic ideals.
//!
//! At level 1 the characteristic ideal of a torsion module is the
//! divisorial hull of `Fit^0`, computed as the gcd of the canonical forms of
//! the maximal minors: over each height-one localisation (a DVR) the Fitting
//! ideal and the characteristic ideal agree. For quadratic presentations this
//! is the principal ideal of the determinant.

use std::fmt;

use num_bigint::BigUint;
use rand::Rng;

use crate::error::{Error, Result};
use crate::groupring::{characters, AbelianGroupSpec, Character, GroupRingElement};
use crate::matrix::{leibniz_det, subsets, MinorCache};
use crate::padic::{invert_mod, PrecisionContext};
use crate::powerseries::{
    factor_distinguished, gcd_level1, split_x_power, CanonicalForm, DistinguishedPoly, Series,
};
use crate::sample;

/// Largest supported number of rows or columns.
pub const MAX_DIM: usize = 8;

/// A `d x e` matrix over `A_n` presenting `M = coker(A^e -> A^d)`.
#[derive(Clone, PartialEq, Eq)]
pub struct Presentation {
    ctx: PrecisionContext,
    level: usize,
    group: AbelianGroupSpec,
    rows: usize,
    cols: usize,
    entries: Vec<GroupRingElement>,
}

impl Presentation {
    pub fn new(
        ctx: &PrecisionContext,
        level: usize,
        group: &AbelianGroupSpec,
        rows: usize,
        cols: usize,
        entries: Vec<GroupRingElement>,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::UnsupportedShape(format!(
                "presentation must be at least 1x1, got {rows}x{cols}"
            )));
        }
        if rows > MAX_DIM || cols > MAX_DIM {
            return Err(Error::TooLarge(format!(
                "{rows}x{cols} exceeds the {MAX_DIM}x{MAX_DIM} limit"
            )));
        }
        if entries.len() != rows * cols {
            return Err(Error::UnsupportedShape(format!(
                "expected {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        let template = GroupRingElement::zero(ctx, level, group);
        if entries.iter().any(|e| !e.compatible(&template)) {
            return Err(Error::ContextMismatch);
        }
        Ok(Presentation {
            ctx: ctx.clone(),
            level,
            group: group.clone(),
            rows,
            cols,
            entries,
        })
    }

    /// Presentation over the trivial group from row-major series entries.
    pub fn from_series(rows: usize, cols: usize, entries: Vec<Series>) -> Result<Self> {
        let first = entries
            .first()
            .ok_or_else(|| Error::UnsupportedShape("no entries".into()))?;
        let (ctx, level) = (first.ctx().clone(), first.level());
        let g = AbelianGroupSpec::trivial();
        let entries = entries
            .into_iter()
            .map(|s| GroupRingElement::from_series(&g, s))
            .collect();
        Self::new(&ctx, level, &g, rows, cols, entries)
    }

    /// Parses row-major entries in the term format.
    pub fn parse(
        ctx: &PrecisionContext,
        level: usize,
        group: &AbelianGroupSpec,
        rows: usize,
        cols: usize,
        texts: &[&str],
    ) -> Result<Self> {
        let entries = texts
            .iter()
            .map(|t| GroupRingElement::parse(ctx, level, group, t))
            .collect::<Result<Vec<_>>>()?;
        Self::new(ctx, level, group, rows, cols, entries)
    }

    pub fn diagonal(entries: Vec<GroupRingElement>) -> Result<Self> {
        let first = entries
            .first()
            .ok_or_else(|| Error::UnsupportedShape("no entries".into()))?
            .clone();
        let d = entries.len();
        let mut all = vec![first.zero_like_pub(); d * d];
        for (i, e) in entries.into_iter().enumerate() {
            all[i * d + i] = e;
        }
        Self::new(first.ctx(), first.level(), first.group(), d, d, all)
    }

    pub fn identity(ctx: &PrecisionContext, level: usize, group: &AbelianGroupSpec, d: usize) -> Result<Self> {
        Self::diagonal(vec![GroupRingElement::one(ctx, level, group); d])
    }

    /// `[[top_left, coupling], [0, bottom_right]]`.
    pub fn block_upper(top_left: &Self, coupling: &Self, bottom_right: &Self) -> Result<Self> {
        let (d1, d3) = (top_left.rows, bottom_right.rows);
        if !top_left.is_quadratic()
            || !bottom_right.is_quadratic()
            || coupling.rows != d1
            || coupling.cols != d3
        {
            return Err(Error::UnsupportedShape("block shapes do not fit".into()));
        }
        let d = d1 + d3;
        let zero = GroupRingElement::zero(&top_left.ctx, top_left.level, &top_left.group);
        let mut entries = vec![zero; d * d];
        for i in 0..d1 {
            for j in 0..d1 {
                entries[i * d + j] = top_left.entry(i, j).clone();
            }
            for j in 0..d3 {
                entries[i * d + d1 + j] = coupling.entry(i, j).clone();
            }
        }
        for i in 0..d3 {
            for j in 0..d3 {
                entries[(d1 + i) * d + d1 + j] = bottom_right.entry(i, j).clone();
            }
        }
        Self::new(&top_left.ctx, top_left.level, &top_left.group, d, d, entries)
    }

    pub fn ctx(&self) -> &PrecisionContext {
        &self.ctx
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn group(&self) -> &AbelianGroupSpec {
        &self.group
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_quadratic(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> &GroupRingElement {
        &self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[GroupRingElement] {
        &self.entries
    }

    /// Entry as a series; only meaningful over the trivial group.
    pub fn series_entry(&self, i: usize, j: usize) -> Option<Series> {
        self.entry(i, j).as_series()
    }

    pub fn map_entries(
        &self,
        level: usize,
        f: impl Fn(&GroupRingElement) -> Result<GroupRingElement>,
    ) -> Result<Self> {
        let entries = self.entries.iter().map(f).collect::<Result<Vec<_>>>()?;
        Self::new(&self.ctx, level, &self.group, self.rows, self.cols, entries)
    }

    /// Entrywise `rho_n`.
    pub fn project_down(&self) -> Result<Self> {
        if self.level == 0 {
            return Err(Error::LevelUnderflow);
        }
        self.map_entries(self.level - 1, GroupRingElement::project_down)
    }

    pub fn project_to(&self, n: usize) -> Result<Self> {
        self.map_entries(n, |e| e.project_to(n))
    }

    pub fn include_up(&self, m: usize) -> Result<Self> {
        self.map_entries(m, |e| e.include_up(m))
    }

    /// The `chi`-component matrix over `R_n` (trivial group).
    pub fn component(&self, chi: &Character) -> Result<Self> {
        let series = self
            .entries
            .iter()
            .map(|e| e.component(chi))
            .collect::<Result<Vec<_>>>()?;
        Self::from_series(self.rows, self.cols, series)
    }

    /// Matrix product `self * other`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::UnsupportedShape("inner dimensions differ".into()));
        }
        let mut entries = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = GroupRingElement::zero(&self.ctx, self.level, &self.group);
                for k in 0..self.cols {
                    acc = acc.add(&self.entry(i, k).convolve(other.entry(k, j))?)?;
                }
                entries.push(acc);
            }
        }
        Self::new(&self.ctx, self.level, &self.group, self.rows, other.cols, entries)
    }

    /// All `k x k` minors, rows and columns in lexicographic subset order.
    pub fn minors(&self, k: usize) -> Vec<GroupRingElement> {
        let mut cache = MinorCache::new(&self.entries, self.cols);
        let mut out = Vec::new();
        for rows in subsets(self.rows, k) {
            for cols in subsets(self.cols, k) {
                out.push(cache.minor(&rows, &cols));
            }
        }
        out
    }
}

impl GroupRingElement {
    fn zero_like_pub(&self) -> GroupRingElement {
        GroupRingElement::zero(self.ctx(), self.level(), self.group())
    }
}

impl fmt::Debug for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Presentation {}x{} at level {}", self.rows, self.cols, self.level)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.entry(i, j).to_string()).collect();
            writeln!(f, "  {}", row.join(" | "))?;
        }
        Ok(())
    }
}

/// Generators of `Fit^0(M)`: the nonzero `d x d` minors, deduplicated.
pub fn fitting0(p: &Presentation) -> Vec<GroupRingElement> {
    let mut out: Vec<GroupRingElement> = Vec::new();
    if p.cols < p.rows {
        return out;
    }
    for m in p.minors(p.rows) {
        if !m.is_zero() && !out.contains(&m) {
            out.push(m);
        }
    }
    out
}

/// Determinant of a square presentation (Leibniz expansion).
pub fn det_quadratic(p: &Presentation) -> Result<GroupRingElement> {
    if !p.is_quadratic() {
        return Err(Error::NotQuadratic {
            rows: p.rows,
            cols: p.cols,
        });
    }
    Ok(leibniz_det(&p.entries, p.rows))
}

/// A yes/no answer that may be undecidable at the working precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionVerdict {
    pub value: bool,
    /// False when the answer rests on quantities that vanish at precision.
    pub exact: bool,
}

/// Torsion test: `Fit^0` must contain a non-zero-divisor.
///
/// Over a split group ring this is checked per character; otherwise a
/// minor is a non-zero-divisor when its norm down to `R_n` is nonzero.
pub fn is_torsion(p: &Presentation) -> PrecisionVerdict {
    let fit = fitting0(p);
    if fit.is_empty() {
        return PrecisionVerdict { value: false, exact: false };
    }
    if p.group.is_trivial() {
        return PrecisionVerdict { value: true, exact: true };
    }
    if let Ok(chars) = characters(&p.group, &p.ctx) {
        let all = chars.iter().all(|chi| {
            fit.iter()
                .any(|m| m.component(chi).map(|s| !s.is_zero()).unwrap_or(false))
        });
        return PrecisionVerdict { value: all, exact: all };
    }
    let any = fit.iter().any(|m| !norm(m).is_zero());
    PrecisionVerdict { value: any, exact: any }
}

/// Norm of a group-ring element down to `R_n`: the determinant of
/// multiplication by `a` on the basis `G`.
pub fn norm(a: &GroupRingElement) -> Series {
    let elements = a.group().elements();
    let n = elements.len();
    let mut entries = Vec::with_capacity(n * n);
    for h in &elements {
        for g in &elements {
            // coefficient of h in a * g is a_{h g^-1}
            let idx = a.group().op(h, &a.group().inverse(g));
            entries.push(a.coeff(&idx));
        }
    }
    MinorCache::new(&entries, n).minor(&(0..n).collect::<Vec<_>>(), &(0..n).collect::<Vec<_>>())
}

/// A principal characteristic ideal in canonical form.
///
/// Equality is equality of ideals at precision: normalised generators whose
/// leading coefficient is `p^v` are fixed only up to a unit `1 + O(p^(N-v))`,
/// so they are compared modulo `p^(N-v)`.
#[derive(Clone)]
pub enum PrincipalIdeal {
    /// `p^mu * P` in `Z_p[[X]]`.
    Level1(CanonicalForm),
    /// Normalised determinant at level `0` or `>= 2`: the graded-lex-leading
    /// coefficient of the lowest-degree part is a power of `p`.
    Normalized(Series),
    /// One ideal per character of a split group ring.
    Split(Vec<(Character, PrincipalIdeal)>),
}

impl PartialEq for PrincipalIdeal {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (PrincipalIdeal::Level1(a), PrincipalIdeal::Level1(b)) => a == b,
            (PrincipalIdeal::Normalized(a), PrincipalIdeal::Normalized(b)) => {
                same_normalized(a, b)
            }
            (PrincipalIdeal::Split(a), PrincipalIdeal::Split(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for PrincipalIdeal {}

fn leading_valuation(f: &Series) -> Option<u32> {
    let order = f.order()?;
    let (_, lead) = f.terms().rfind(|(m, _)| m.degree() == order)?;
    Some(f.ctx().valuation(lead))
}

fn same_normalized(a: &Series, b: &Series) -> bool {
    if a.ctx() != b.ctx() || a.level() != b.level() {
        return false;
    }
    match (leading_valuation(a), leading_valuation(b)) {
        (None, None) => true,
        (Some(va), Some(vb)) if va == vb && a.order() == b.order() => {
            let ctx = a.ctx();
            let digits = ctx.precision() - va;
            let diff = a.sub(b).expect("same context");
            let close = diff.terms().all(|(_, c)| ctx.valuation(c) >= digits);
            close
        }
        _ => false,
    }
}

impl PrincipalIdeal {
    pub fn is_unit_ideal(&self) -> bool {
        match self {
            PrincipalIdeal::Level1(c) => c.is_unit_ideal(),
            PrincipalIdeal::Normalized(s) => s.is_unit(),
            PrincipalIdeal::Split(parts) => parts.iter().all(|(_, i)| i.is_unit_ideal()),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (PrincipalIdeal::Level1(a), PrincipalIdeal::Level1(b)) => {
                Ok(PrincipalIdeal::Level1(a.mul(b)))
            }
            (PrincipalIdeal::Normalized(a), PrincipalIdeal::Normalized(b)) => {
                Ok(PrincipalIdeal::Normalized(normalize(&a.mul(b)?)?))
            }
            (PrincipalIdeal::Split(a), PrincipalIdeal::Split(b)) if a.len() == b.len() => a
                .iter()
                .zip(b)
                .map(|((chi, x), (psi, y))| {
                    if chi != psi {
                        return Err(Error::ContextMismatch);
                    }
                    Ok((chi.clone(), x.mul(y)?))
                })
                .collect::<Result<Vec<_>>>()
                .map(PrincipalIdeal::Split),
            _ => Err(Error::ContextMismatch),
        }
    }

    /// `self | other`, i.e. `(other) ⊆ (self)`. At levels `>= 2` this needs
    /// a witness `w` with `self * w = other`.
    pub fn divides(&self, other: &Self, witness: Option<&Self>) -> Result<bool> {
        match (self, other) {
            (PrincipalIdeal::Level1(a), PrincipalIdeal::Level1(b)) => Ok(a.divides(b)),
            (PrincipalIdeal::Split(a), PrincipalIdeal::Split(b)) if a.len() == b.len() => {
                let witnesses: Vec<Option<&PrincipalIdeal>> = match witness {
                    Some(PrincipalIdeal::Split(w)) => w.iter().map(|(_, x)| Some(x)).collect(),
                    _ => vec![None; a.len()],
                };
                for (((_, x), (_, y)), w) in a.iter().zip(b).zip(witnesses) {
                    if !x.divides(y, w)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            (PrincipalIdeal::Normalized(_), PrincipalIdeal::Normalized(_)) => match witness {
                Some(w) => Ok(&self.mul(w)? == other),
                None => Err(Error::UnsupportedShape(
                    "divisibility at level >= 2 needs a witness".into(),
                )),
            },
            _ => Err(Error::ContextMismatch),
        }
    }

    pub fn as_level1(&self) -> Option<&CanonicalForm> {
        match self {
            PrincipalIdeal::Level1(c) => Some(c),
            _ => None,
        }
    }
}

impl fmt::Display for PrincipalIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrincipalIdeal::Level1(c) => write!(f, "{c}"),
            PrincipalIdeal::Normalized(s) => write!(f, "{s}"),
            PrincipalIdeal::Split(parts) => {
                let items: Vec<String> = parts
                    .iter()
                    .map(|(chi, i)| format!("{}: {}", chi.label(), i))
                    .collect();
                write!(f, "{}", items.join("; "))
            }
        }
    }
}

impl fmt::Debug for PrincipalIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

/// Multiplies `f` by the constant unit that turns the graded-lex-leading
/// coefficient of its lowest-degree homogeneous part into `p^v`.
pub fn normalize(f: &Series) -> Result<Series> {
    let ctx = f.ctx();
    let order = f
        .order()
        .ok_or_else(|| Error::PrecisionExhausted("cannot normalise zero".into()))?;
    let (_, lead) = f
        .terms().rfind(|(m, _)| m.degree() == order)
        .expect("order is attained");
    let v = ctx.valuation(lead);
    let unit = lead / ctx.p_pow(v);
    let inv = invert_mod(&unit, ctx.modulus(), ctx.p())?;
    Ok(f.scale(&inv))
}

/// Characteristic ideal of a torsion presentation.
pub fn char_ideal(p: &Presentation) -> Result<PrincipalIdeal> {
    let torsion = is_torsion(p);
    if !(torsion.value && torsion.exact) {
        return Err(Error::NotTorsionAtPrecision);
    }
    if !p.group.is_trivial() {
        let chars = characters(&p.group, &p.ctx)?;
        let parts = chars
            .into_iter()
            .map(|chi| {
                let comp = p.component(&chi)?;
                Ok((chi, char_ideal(&comp)?))
            })
            .collect::<Result<Vec<_>>>()?;
        return Ok(PrincipalIdeal::Split(parts));
    }
    if p.level == 1 {
        let gens: Vec<Series> = fitting0(p)
            .iter()
            .map(|m| m.as_series().expect("trivial group"))
            .collect();
        return Ok(PrincipalIdeal::Level1(gcd_of(&gens)?));
    }
    if !p.is_quadratic() {
        return Err(Error::UnsupportedShape(format!(
            "characteristic ideal at level {} needs a square presentation, got {}x{}",
            p.level, p.rows, p.cols
        )));
    }
    let det = det_quadratic(p)?.as_series().expect("trivial group");
    Ok(PrincipalIdeal::Normalized(normalize(&det)?))
}

/// Gcd of the canonical forms of nonzero level-1 series.
pub fn gcd_of(gens: &[Series]) -> Result<CanonicalForm> {
    let mut acc: Option<CanonicalForm> = None;
    for g in gens.iter().filter(|g| !g.is_zero()) {
        let c = CanonicalForm::of(g)?;
        acc = Some(match acc {
            None => c,
            Some(a) => gcd_level1(&a, &c)?,
        });
        if acc.as_ref().is_some_and(CanonicalForm::is_unit_ideal) {
            break;
        }
    }
    acc.ok_or(Error::NotTorsionAtPrecision)
}

/// Pseudo-nullity at level 1 or over a split group ring: `char(M) = (1)`.
pub fn is_pseudo_null(p: &Presentation) -> Result<PrecisionVerdict> {
    if p.level != 1 {
        return Err(Error::UnsupportedShape(
            "pseudo-nullity is decided only at level 1; see pseudo_null_certificate".into(),
        ));
    }
    let c = char_ideal(p)?;
    Ok(PrecisionVerdict {
        value: c.is_unit_ideal(),
        exact: true,
    })
}

/// Witness that `Fit^0` has height at least two: two generators whose
/// specialisations `X_i := 0 (i >= 2)` are coprime in `Z_p[[X_1]]`.
#[derive(Debug, Clone)]
pub struct PseudoNullCertificate {
    /// Indices into [`fitting0`].
    pub first: usize,
    pub second: usize,
    pub first_specialized: CanonicalForm,
    pub second_specialized: CanonicalForm,
}

/// Sufficient condition for pseudo-nullity at any level `>= 1` (trivial
/// group). `None` means "not certified", never "not pseudo-null".
pub fn pseudo_null_certificate(p: &Presentation) -> Result<Option<PseudoNullCertificate>> {
    if !p.group.is_trivial() || p.level == 0 {
        return Err(Error::UnsupportedShape(
            "certificate needs level >= 1 over the trivial group".into(),
        ));
    }
    let specialized: Vec<Option<CanonicalForm>> = fitting0(p)
        .iter()
        .map(|m| {
            let s = m.as_series().expect("trivial group").project_to(1).ok()?;
            CanonicalForm::of(&s).ok()
        })
        .collect();
    for i in 0..specialized.len() {
        for j in i + 1..specialized.len() {
            if let (Some(a), Some(b)) = (&specialized[i], &specialized[j]) {
                if gcd_level1(a, b)?.is_unit_ideal() {
                    return Ok(Some(PseudoNullCertificate {
                        first: i,
                        second: j,
                        first_specialized: a.clone(),
                        second_specialized: b.clone(),
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// A height-one prime of `Z_p[[X]]` or of a character component.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum PrimeDescriptor {
    P(u64),
    Poly(DistinguishedPoly),
    Character { index: Vec<u32>, prime: Box<PrimeDescriptor> },
}

impl fmt::Display for PrimeDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimeDescriptor::P(p) => write!(f, "({p})"),
            PrimeDescriptor::Poly(q) => write!(f, "({q})"),
            PrimeDescriptor::Character { index, prime } => {
                let idx: Vec<String> = index.iter().map(u32::to_string).collect();
                write!(f, "chi({}):{}", idx.join(","), prime)
            }
        }
    }
}

impl fmt::Debug for PrimeDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A distinguished factor the factoriser could not certify.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnfactoredBlock {
    pub character: Option<Vec<u32>>,
    pub poly: DistinguishedPoly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportReport {
    pub primes: Vec<(PrimeDescriptor, u32)>,
    pub unfactored_blocks: Vec<UnfactoredBlock>,
}

/// Factors a level-1 canonical generator into primes (and residual blocks).
pub fn factor_canonical(c: &CanonicalForm) -> SupportReport {
    let mut primes = Vec::new();
    let mut blocks = Vec::new();
    if c.mu() > 0 {
        primes.push((PrimeDescriptor::P(c.p()), c.mu()));
    }
    let (k, rest) = split_x_power(c.poly());
    if k > 0 {
        primes.push((
            PrimeDescriptor::Poly(DistinguishedPoly::x(c.p(), c.precision())),
            k,
        ));
    }
    match factor_distinguished(&rest) {
        Ok(fs) => primes.extend(fs.into_iter().map(|(f, m)| (PrimeDescriptor::Poly(f), m))),
        Err(_) => blocks.push(UnfactoredBlock {
            character: None,
            poly: rest,
        }),
    }
    primes.sort_by(|a, b| a.0.cmp(&b.0));
    SupportReport {
        primes,
        unfactored_blocks: blocks,
    }
}

/// Support of `M_tor` at height-one primes, from the characteristic ideal.
pub fn support_primes(p: &Presentation) -> Result<SupportReport> {
    match char_ideal(p)? {
        PrincipalIdeal::Level1(c) => Ok(factor_canonical(&c)),
        PrincipalIdeal::Split(parts) => {
            let mut primes = Vec::new();
            let mut blocks = Vec::new();
            for (chi, ideal) in parts {
                let c = ideal.as_level1().ok_or_else(|| {
                    Error::UnsupportedShape("support needs level-1 components".into())
                })?;
                let r = factor_canonical(c);
                primes.extend(r.primes.into_iter().map(|(q, m)| {
                    (
                        PrimeDescriptor::Character {
                            index: chi.index().to_vec(),
                            prime: Box::new(q),
                        },
                        m,
                    )
                }));
                blocks.extend(r.unfactored_blocks.into_iter().map(|b| UnfactoredBlock {
                    character: Some(chi.index().to_vec()),
                    poly: b.poly,
                }));
            }
            Ok(SupportReport {
                primes,
                unfactored_blocks: blocks,
            })
        }
        PrincipalIdeal::Normalized(_) => Err(Error::UnsupportedShape(
            "prime support is only computed at level 1".into(),
        )),
    }
}

/// Outcome of [`check_multiplicativity`].
#[derive(Clone, Debug)]
pub struct MultiplicativityVerdict {
    pub assembled: Presentation,
    pub char_first: PrincipalIdeal,
    pub char_third: PrincipalIdeal,
    pub char_assembled: PrincipalIdeal,
    /// `char(M_2) = char(M_1) * char(M_3)`.
    pub product_holds: bool,
    /// `char(M_2) ⊆ char(M_3)`.
    pub inclusion_holds: bool,
}

impl MultiplicativityVerdict {
    pub fn passed(&self) -> bool {
        self.product_holds && self.inclusion_holds
    }
}

/// Builds `P_2 = [[theta_1, B], [0, theta_3]]` with a random coupling block
/// `B`, which presents an extension `0 -> M_1 -> M_2 -> M_3 -> 0`, and checks
/// multiplicativity and inclusion of characteristic ideals.
pub fn check_multiplicativity<R: Rng>(
    first: &Presentation,
    third: &Presentation,
    rng: &mut R,
) -> Result<MultiplicativityVerdict> {
    if !first.is_quadratic() || !third.is_quadratic() {
        return Err(Error::NotQuadratic {
            rows: first.rows.max(third.rows),
            cols: first.cols.min(third.cols),
        });
    }
    let coupling = sample::presentation(
        rng,
        &first.ctx,
        first.level,
        &first.group,
        first.rows,
        third.rows,
        2,
    )?;
    let assembled = Presentation::block_upper(first, &coupling, third)?;
    let char_first = char_ideal(first)?;
    let char_third = char_ideal(third)?;
    let char_assembled = char_ideal(&assembled)?;
    let product = char_first.mul(&char_third)?;
    let product_holds = product == char_assembled;
    let inclusion_holds = char_third.divides(&char_assembled, Some(&char_first))?;
    Ok(MultiplicativityVerdict {
        assembled,
        char_first,
        char_third,
        char_assembled,
        product_holds,
        inclusion_holds,
    })
}

/// `p^k` as a `BigUint`, handy for building test data.
pub fn p_power(ctx: &PrecisionContext, k: u32) -> BigUint {
    BigUint::from(ctx.p()).pow(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(5, 6, 10).unwrap()
    }

    fn pres(rows: usize, cols: usize, texts: &[&str]) -> Presentation {
        let c = ctx();
        let level = if texts.iter().any(|t| t.contains("X2")) { 2 } else { 1 };
        Presentation::parse(&c, level, &AbelianGroupSpec::trivial(), rows, cols, texts).unwrap()
    }

    fn series(t: &str) -> GroupRingElement {
        GroupRingElement::parse(&ctx(), 1, &AbelianGroupSpec::trivial(), t).unwrap()
    }

    fn canon(t: &str) -> CanonicalForm {
        CanonicalForm::of(&Series::parse(&ctx(), 1, t).unwrap()).unwrap()
    }

    #[test]
    fn fitting_examples() {
        assert_eq!(fitting0(&pres(2, 2, &["5", "0", "0", "X1"])), vec![series("5*X1")]);
        assert_eq!(fitting0(&pres(1, 2, &["5", "X1"])), vec![series("5"), series("X1")]);
        assert!(fitting0(&pres(2, 2, &["0", "0", "0", "0"])).is_empty());
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(det_quadratic(&pres(2, 2, &["5", "0", "0", "X1"])).unwrap(), series("5*X1"));
        assert_eq!(det_quadratic(&pres(2, 2, &["X1", "5", "0", "X1"])).unwrap(), series("X1^2"));
        assert!(matches!(
            det_quadratic(&pres(1, 2, &["5", "X1"])),
            Err(Error::NotQuadratic { rows: 1, cols: 2 })
        ));
        // block triangular: det = det(t1) * det(t3)
        let p = pres(
            3,
            3,
            &["X1", "5", "1 + X1", "1", "X1", "7", "0", "0", "25 + X1^2"],
        );
        let t1 = det_quadratic(&pres(2, 2, &["X1", "5", "1", "X1"])).unwrap();
        assert_eq!(det_quadratic(&p).unwrap(), t1.convolve(&series("25 + X1^2")).unwrap());
    }

    #[test]
    fn torsion_examples() {
        let v = is_torsion(&pres(2, 2, &["5", "0", "0", "X1"]));
        assert_eq!(v, PrecisionVerdict { value: true, exact: true });
        let v = is_torsion(&pres(1, 1, &["0"]));
        assert_eq!(v, PrecisionVerdict { value: false, exact: false });
        assert!(is_torsion(&pres(1, 2, &["5", "X1"])).value);
    }

    #[test]
    fn char_examples() {
        let c = char_ideal(&pres(2, 2, &["5", "0", "0", "X1"])).unwrap();
        let c = c.as_level1().unwrap();
        assert_eq!((c.mu(), c.lambda()), (1, 1));
        assert_eq!(c, &canon("5*X1"));

        let c = char_ideal(&pres(2, 2, &["X1", "5", "0", "X1"])).unwrap();
        let c = c.as_level1().unwrap();
        assert_eq!((c.mu(), c.lambda()), (0, 2));

        let c = char_ideal(&pres(1, 2, &["5", "X1"])).unwrap();
        assert!(c.is_unit_ideal());

        assert_eq!(
            char_ideal(&pres(1, 1, &["0"])),
            Err(Error::NotTorsionAtPrecision)
        );
        assert!(matches!(
            char_ideal(&pres(1, 2, &["5", "X2"])),
            Err(Error::UnsupportedShape(_))
        ));
    }

    #[test]
    fn pseudo_null_examples() {
        assert!(is_pseudo_null(&pres(1, 2, &["5", "X1"])).unwrap().value);
        assert!(!is_pseudo_null(&pres(2, 2, &["5", "0", "0", "X1"])).unwrap().value);
        assert!(is_pseudo_null(&pres(2, 2, &["1", "0", "0", "1"])).unwrap().value);
        for a in 1..4 {
            for b in 1..4 {
                let pa = format!("{}", 5i64.pow(a));
                let xb = format!("X1^{b}");
                assert!(is_pseudo_null(&pres(1, 2, &[&pa, &xb])).unwrap().value);
            }
        }
    }

    #[test]
    fn pseudo_null_certificate_at_level_two() {
        let cert = pseudo_null_certificate(&pres(1, 2, &["5 + X2", "X1"])).unwrap();
        assert!(cert.is_some());
        // (X1, X1 + X2) specialise to X1 twice: not certified
        let cert = pseudo_null_certificate(&pres(1, 2, &["X1", "X1 + X2"])).unwrap();
        assert!(cert.is_none());
    }

    #[test]
    fn support_examples() {
        let r = support_primes(&pres(2, 2, &["5", "0", "0", "X1"])).unwrap();
        assert_eq!(r.primes.len(), 2);
        assert_eq!(r.primes[0], (PrimeDescriptor::P(5), 1));
        assert_eq!(r.primes[1].1, 1);
        assert!(matches!(&r.primes[1].0, PrimeDescriptor::Poly(q) if q.is_x()));

        let r = support_primes(&pres(1, 1, &["X1^2 + 5*X1"])).unwrap();
        assert_eq!(r.primes.len(), 2);
        let degs: Vec<usize> = r
            .primes
            .iter()
            .map(|(q, _)| match q {
                PrimeDescriptor::Poly(q) => q.degree(),
                _ => 0,
            })
            .collect();
        assert_eq!(degs, vec![1, 1]);
        assert!(r.unfactored_blocks.is_empty());

        let r = support_primes(&pres(1, 1, &["1 + X1"])).unwrap();
        assert!(r.primes.is_empty() && r.unfactored_blocks.is_empty());

        // (X + 5)(X + 10) is not certifiable: residual block
        let r = support_primes(&pres(1, 1, &["X1^2 + 15*X1 + 50"])).unwrap();
        assert!(r.primes.is_empty());
        assert_eq!(r.unfactored_blocks.len(), 1);
    }

    #[test]
    fn multiplicativity_examples() {
        use rand::SeedableRng;
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let v = check_multiplicativity(&pres(1, 1, &["5"]), &pres(1, 1, &["X1"]), &mut rng).unwrap();
        assert!(v.passed());
        assert_eq!(v.char_assembled.as_level1().unwrap(), &canon("5*X1"));

        let id = Presentation::identity(&ctx(), 1, &AbelianGroupSpec::trivial(), 2).unwrap();
        let t3 = pres(2, 2, &["X1 + 5", "1", "0", "X1"]);
        let v = check_multiplicativity(&id, &t3, &mut rng).unwrap();
        assert!(v.passed());
        assert_eq!(v.char_assembled, v.char_third);
    }

    #[test]
    fn level_two_normalization() {
        let c = ctx();
        // det = 3*(X2 + X1) + ...: leading coefficient of the degree-1 part is at X1
        let f = Series::parse(&c, 2, "3*X2 + 3*X1 + X1^2").unwrap();
        let n = normalize(&f).unwrap();
        assert_eq!(n.coeff(&[1, 0]).residue(), &BigUint::from(1u32));
        let g = Series::parse(&c, 2, "10*X1 + X2").unwrap();
        let n = normalize(&g).unwrap();
        assert_eq!(n.coeff(&[1, 0]).residue(), &BigUint::from(5u32));
        let char2 = char_ideal(&pres(1, 1, &["2*X2 + 4*X1*X2"])).unwrap();
        assert_eq!(char2, PrincipalIdeal::Normalized(Series::parse(&c, 2, "X2 + 2*X1*X2").unwrap()));
    }
}
