//! Hempel relators for `<x, y, z_1..z_d | [x,y]u, r>` and the HNN
//! decomposition of the resulting group.
//!
//! Generator layout of the ambient free group is fixed: index 0 is `x`,
//! index 1 is `y`, and index `1 + j` is `z_j` for `j = 1..=d`. Left
//! conjugation is `^g f = g f g^-1` and `[a, b] = a b a^-1 b^-1`, so the
//! surface relator gives `y x y^-1 = u x`.

use std::fmt;

use thiserror::Error;

use crate::free_group::{cyclic_split, free_reduce, is_rotation, Alphabet, FreeLetter, GeneratorId, Letter, Word};
use crate::presentation::Presentation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HempelError {
    #[error("not in the normal closure of x, z_1..z_d: y-exponent sum is {y_exponent}")]
    NotInKernel { y_exponent: i64 },
    #[error("not a Hempel-form presentation: {0}")]
    NotHempelForm(String),
    #[error("relator is not a Hempel relator: {0}")]
    NotHempelRelator(String),
    #[error("Magnus subgroup certificate failed: {0}")]
    MagnusCertificate(String),
}

pub const X: GeneratorId = GeneratorId(0);
pub const Y: GeneratorId = GeneratorId(1);

/// The surface-type relator data: `d >= 1` and `u` over the z-generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HempelContext {
    d: usize,
    u: Word,
}

impl HempelContext {
    pub fn new(d: usize, u: Word) -> Result<Self, HempelError> {
        if d == 0 {
            return Err(HempelError::NotHempelForm("need at least one z generator".into()));
        }
        if u.letters().iter().any(|l| l.gen.0 < 2 || l.gen.0 > d + 1) {
            return Err(HempelError::NotHempelForm("u must be a word in z_1..z_d".into()));
        }
        Ok(HempelContext { d, u })
    }

    /// Reads the context and the candidate relator `r` from a two-relator
    /// presentation whose first relator is `[x,y]u`.
    pub fn from_presentation(p: &Presentation) -> Result<(Self, Word), HempelError> {
        let n = p.alphabet().len();
        if n < 3 {
            return Err(HempelError::NotHempelForm("need generators x, y and at least one z".into()));
        }
        if p.relators().len() != 2 {
            return Err(HempelError::NotHempelForm(format!("expected 2 relators, found {}", p.relators().len())));
        }
        let w = &p.relators()[0];
        let head = [Letter::pos(0), Letter::pos(1), Letter::neg(0), Letter::neg(1)];
        if w.len() < 4 || w.letters()[..4] != head {
            return Err(HempelError::NotHempelForm("first relator does not start with [x,y]".into()));
        }
        let u = Word::from_letters(w.letters()[4..].iter().copied());
        let ctx = HempelContext::new(n - 2, u)
            .map_err(|_| HempelError::NotHempelForm("first relator is not [x,y]u with u over z_1..z_d".into()))?;
        Ok((ctx, p.relators()[1].clone()))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn u(&self) -> &Word {
        &self.u
    }

    /// `[x,y]u`.
    pub fn surface_relator(&self) -> Word {
        Word::from_letters([Letter::pos(0), Letter::pos(1), Letter::neg(0), Letter::neg(1)]).multiply(&self.u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Base {
    X,
    /// 1-based z index.
    Z(usize),
}

/// The basis element `y^level * base * y^-level`, or its inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisLetter {
    pub base: Base,
    pub level: i64,
    pub inverse: bool,
}

impl FreeLetter for BasisLetter {
    fn inverse(&self) -> Self {
        BasisLetter { inverse: !self.inverse, ..*self }
    }
}

/// A freely reduced word in the basis `{y^i x y^-i, y^i z_j y^-i : i in Z}`
/// of the normal closure of `x, z_1..z_d`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct X1Expression {
    letters: Vec<BasisLetter>,
}

impl X1Expression {
    pub fn from_letters(letters: impl IntoIterator<Item = BasisLetter>) -> Self {
        X1Expression { letters: free_reduce(letters) }
    }

    pub fn letters(&self) -> &[BasisLetter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn multiply(&self, other: &Self) -> Self {
        Self::from_letters(self.letters.iter().chain(&other.letters).copied())
    }

    pub fn inverse(&self) -> Self {
        X1Expression { letters: self.letters.iter().rev().map(FreeLetter::inverse).collect() }
    }

    pub fn pow(&self, k: i64) -> Self {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        (0..k.unsigned_abs()).fold(Self::default(), |acc, _| acc.multiply(&base))
    }

    pub fn cyclic_core(&self) -> Self {
        let k = cyclic_split(&self.letters);
        X1Expression { letters: self.letters[k..self.letters.len() - k].to_vec() }
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        cyclic_split(&self.letters) == 0
    }

    fn z_levels(&self) -> impl Iterator<Item = i64> + '_ {
        self.letters.iter().filter(|l| matches!(l.base, Base::Z(_))).map(|l| l.level)
    }

    /// Maps back into the ambient free group, sending `^1 x` to `x_image`
    /// when given and every other basis element to its defining conjugate.
    pub fn evaluate(&self, x_level_one: Option<&Word>) -> Word {
        let mut out = Word::identity();
        for l in &self.letters {
            let g = match l.base {
                Base::X => X,
                Base::Z(j) => GeneratorId(1 + j),
            };
            let elem = match (l.base, x_level_one) {
                (Base::X, Some(img)) if l.level == 1 => img.clone(),
                _ => Word::generator(g).conjugate_by(&Word::generator(Y).pow(l.level)),
            };
            out = out.multiply(&if l.inverse { elem.inverse() } else { elem });
        }
        out
    }
}

impl fmt::Display for X1Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|l| {
                let b = match l.base {
                    Base::X => "x".to_string(),
                    Base::Z(j) => format!("z{j}"),
                };
                let s = if l.level == 0 { b } else { format!("^{}{b}", l.level) };
                if l.inverse {
                    format!("({s})^-1")
                } else {
                    s
                }
            })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Rewrites `r` in the conjugate basis by tracking the running y-exponent.
pub fn rewrite_in_normal_closure_basis(r: &Word, ctx: &HempelContext) -> Result<X1Expression, HempelError> {
    let y_exponent = r.exponent_sum(Y);
    if y_exponent != 0 {
        return Err(HempelError::NotInKernel { y_exponent });
    }
    let mut level = 0i64;
    let mut out = Vec::with_capacity(r.len());
    for l in r.letters() {
        if l.gen == Y {
            level += l.sign();
            continue;
        }
        let base = match l.gen.0 {
            0 => Base::X,
            j if j >= 2 && j <= ctx.d + 1 => Base::Z(j - 1),
            _ => return Err(HempelError::NotHempelForm(format!("generator index {} outside the alphabet", l.gen.0))),
        };
        out.push(BasisLetter { base, level, inverse: l.inverse });
    }
    Ok(X1Expression::from_letters(out))
}

/// `(^0 u)^-1 * ^1 x` written in the conjugate basis.
pub fn h2_generator(ctx: &HempelContext) -> X1Expression {
    let yxy = Word::from_letters([Letter::pos(1), Letter::pos(0), Letter::neg(1)]);
    rewrite_in_normal_closure_basis(&ctx.u.inverse().multiply(&yxy), ctx).expect("y-exponent is zero")
}

/// True iff `r` is conjugate, in the free group on the basis, into the
/// cyclic subgroup generated by `c`.
pub fn conjugate_into_cyclic(r: &X1Expression, c: &X1Expression) -> bool {
    let rc = r.cyclic_core();
    let cc = c.cyclic_core();
    if rc.is_empty() {
        return true;
    }
    if cc.is_empty() || !rc.len().is_multiple_of(cc.len()) {
        return false;
    }
    let k = (rc.len() / cc.len()) as i64;
    is_rotation(&rc.letters, &cc.pow(k).letters) || is_rotation(&rc.letters, &cc.pow(-k).letters)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub detail: String,
}

impl Verdict {
    fn new(holds: bool, detail: impl Into<String>) -> Self {
        Verdict { holds, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HempelReport {
    pub h1: Verdict,
    pub h2: Verdict,
    pub h3: Verdict,
    pub h4: Verdict,
    /// Least `nu` with `r` in `<^1 x, ^i z_j : 0 <= i <= nu>`; present iff (H1) holds.
    pub nu: Option<i64>,
    pub expression: Option<X1Expression>,
}

impl HempelReport {
    pub fn all_hold(&self) -> bool {
        self.h1.holds && self.h2.holds && self.h3.holds && self.h4.holds
    }

    fn failures(&self) -> String {
        [("H1", &self.h1), ("H2", &self.h2), ("H3", &self.h3), ("H4", &self.h4)]
            .iter()
            .filter(|(_, v)| !v.holds)
            .map(|(n, v)| format!("{n}: {}", v.detail))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

pub fn check_hempel(r: &Word, ctx: &HempelContext) -> HempelReport {
    let skipped = || Verdict::new(false, "not evaluated: (H1) fails");
    let expr = match rewrite_in_normal_closure_basis(r, ctx) {
        Ok(e) => e,
        Err(e) => {
            return HempelReport {
                h1: Verdict::new(false, e.to_string()),
                h2: skipped(),
                h3: skipped(),
                h4: skipped(),
                nu: None,
                expression: None,
            }
        }
    };
    let bad_x = expr.letters.iter().find(|l| l.base == Base::X && l.level != 1);
    let bad_z = expr.letters.iter().find(|l| matches!(l.base, Base::Z(_)) && l.level < 0);
    let h1 = match (bad_x, bad_z) {
        (Some(l), _) => Verdict::new(false, format!("x-letter at level {} (only level 1 allowed)", l.level)),
        (None, Some(l)) => Verdict::new(false, format!("z-letter at negative level {}", l.level)),
        (None, None) => Verdict::new(true, format!("r = {expr}")),
    };
    if !h1.holds {
        return HempelReport { h1, h2: skipped(), h3: skipped(), h4: skipped(), nu: None, expression: Some(expr) };
    }
    let c = h2_generator(ctx);
    let h2 = if conjugate_into_cyclic(&expr, &c) {
        Verdict::new(false, format!("r is conjugate into <{c}>"))
    } else {
        Verdict::new(true, format!("r is not conjugate into <{c}>"))
    };
    let h3 = if expr.is_cyclically_reduced() {
        Verdict::new(true, "cyclically reduced")
    } else {
        Verdict::new(false, "first and last letters cancel cyclically")
    };
    let h4 = if expr.z_levels().any(|lv| lv == 0) {
        Verdict::new(true, "involves a level-0 z-letter")
    } else {
        Verdict::new(false, "no level-0 z-letter")
    };
    let nu = Some(expr.z_levels().max().unwrap_or(0));
    HempelReport { h1, h2, h3, h4, nu, expression: Some(expr) }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HnnGenerator {
    X,
    Y,
    /// `z_{j,level}`, standing for `y^level z_j y^-level`.
    Z {
        j: usize,
        level: i64,
    },
}

/// Why the associated subgroups are Magnus subgroups of the base group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MagnusCertificate {
    /// Rewritten `r` involves some `z_{*,nu}`, so it is not a word in `x, z_{*,0..nu-1}`.
    pub involves_top_level: bool,
    /// `r` involves some `^0 z_*`, so it is not a word in `^1 x, z_{*,1..nu}`.
    pub involves_bottom_level: bool,
}

/// `<x, y, z_{j,i} (0 <= i <= nu) | r', y x y^-1 = u_0 x, y z_{j,i-1} y^-1 = z_{j,i}>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HnnPresentation {
    alphabet: Alphabet,
    layout: Vec<HnnGenerator>,
    nu: i64,
    relator: Word,
    conjugation_relators: Vec<Word>,
    certificate: MagnusCertificate,
}

impl HnnPresentation {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn layout(&self) -> &[HnnGenerator] {
        &self.layout
    }

    pub fn nu(&self) -> i64 {
        self.nu
    }

    pub fn stable_letter(&self) -> &str {
        self.alphabet.name(Y)
    }

    /// `r` rewritten over `x, z_{j,i}`, indexed in the full alphabet.
    pub fn relator(&self) -> &Word {
        &self.relator
    }

    pub fn conjugation_relators(&self) -> &[Word] {
        &self.conjugation_relators
    }

    pub fn certificate(&self) -> &MagnusCertificate {
        &self.certificate
    }

    /// The one-relator base group over `x, z_{j,i}`.
    pub fn base_presentation(&self) -> Presentation {
        let keep: Vec<usize> = (0..self.layout.len()).filter(|&i| self.layout[i] != HnnGenerator::Y).collect();
        let names: Vec<String> = keep.iter().map(|&i| self.alphabet.names()[i].clone()).collect();
        let reindex = |g: GeneratorId| GeneratorId(keep.iter().position(|&k| k == g.0).expect("no y in base relator"));
        let r = Word::from_letters(
            self.relator.letters().iter().map(|l| Letter { gen: reindex(l.gen), inverse: l.inverse }),
        );
        Presentation::new(Alphabet::new(names).expect("distinct names"), vec![r]).expect("relator is non-trivial")
    }

    /// The whole HNN presentation: base relator first, then the conjugation relators.
    pub fn presentation(&self) -> Presentation {
        let mut rels = vec![self.relator.clone()];
        rels.extend(self.conjugation_relators.iter().cloned());
        Presentation::new(self.alphabet.clone(), rels).expect("relators are non-trivial")
    }

    /// `x -> x`, `y -> y`, `z_{j,i} -> y^i z_j y^-i`.
    pub fn substitute(&self, w: &Word) -> Word {
        w.substitute(|g| match self.layout[g.0] {
            HnnGenerator::X => Word::generator(X),
            HnnGenerator::Y => Word::generator(Y),
            HnnGenerator::Z { j, level } => {
                Word::generator(GeneratorId(1 + j)).conjugate_by(&Word::generator(Y).pow(level))
            }
        })
    }

    #[cfg(test)]
    pub(crate) fn conjugation_relators_mut(&mut self) -> &mut Vec<Word> {
        &mut self.conjugation_relators
    }
}

/// Builds the HNN decomposition. `names` are the ambient generator names
/// (x, y, z_1..z_d); x and y keep theirs, the new generators are `z<j>_<i>`.
pub fn build_hnn(r: &Word, ctx: &HempelContext, names: &Alphabet) -> Result<HnnPresentation, HempelError> {
    let report = check_hempel(r, ctx);
    if !report.all_hold() {
        return Err(HempelError::NotHempelRelator(report.failures()));
    }
    let expr = report.expression.expect("present when (H1) holds");
    let nu = report.nu.expect("present when (H1) holds");

    let mut layout = vec![HnnGenerator::X, HnnGenerator::Y];
    let mut gen_names = vec![names.name(X).to_string(), names.name(Y).to_string()];
    for j in 1..=ctx.d {
        for level in 0..=nu {
            layout.push(HnnGenerator::Z { j, level });
            gen_names.push(format!("z{j}_{level}"));
        }
    }
    let alphabet = Alphabet::new(gen_names).map_err(|e| HempelError::NotHempelForm(e.to_string()))?;
    let z = |j: usize, level: i64| -> Word {
        let idx = 2 + (j - 1) * (nu as usize + 1) + level as usize;
        Word::generator(GeneratorId(idx))
    };
    let x = Word::generator(X);
    let y = Word::generator(Y);
    // u written in z_{j,0}
    let u0 = ctx.u.substitute(|g| z(g.0 - 1, 0));
    let u0x = u0.multiply(&x);

    let mut relator = Word::identity();
    for l in expr.letters() {
        let elem = match l.base {
            Base::X => u0x.clone(),
            Base::Z(j) => z(j, l.level),
        };
        relator = relator.multiply(&if l.inverse { elem.inverse() } else { elem });
    }

    let mut conjugation_relators = vec![x.conjugate_by(&y).multiply(&u0x.inverse())];
    for j in 1..=ctx.d {
        for level in 1..=nu {
            conjugation_relators.push(z(j, level - 1).conjugate_by(&y).multiply(&z(j, level).inverse()));
        }
    }

    let top: Vec<GeneratorId> = (1..=ctx.d).map(|j| z(j, nu).letters()[0].gen).collect();
    let certificate = MagnusCertificate {
        involves_top_level: top.iter().any(|&g| relator.involves_generator(g)),
        involves_bottom_level: expr.z_levels().any(|lv| lv == 0),
    };
    if !certificate.involves_top_level {
        return Err(HempelError::MagnusCertificate(format!(
            "rewritten relator avoids every z_*_{nu}, so it lies in an associated subgroup"
        )));
    }
    if !certificate.involves_bottom_level {
        return Err(HempelError::MagnusCertificate("relator avoids every level-0 z-letter".into()));
    }
    if relator.is_identity() {
        return Err(HempelError::NotHempelRelator("relator rewrites to the identity".into()));
    }

    Ok(HnnPresentation { alphabet, layout, nu, relator, conjugation_relators, certificate })
}

/// Substitutes `z_{j,i} -> y^i z_j y^-i` into every relator of `h` and checks
/// the result against `original = <x,y,z | [x,y]u, r>`: the conjugation
/// relators for the z-family collapse to the identity, the x-relator becomes
/// a conjugate of `([x,y]u)^±1`, and the base relator becomes a conjugate of
/// `r^±1` with `^1 x` read as `u x`.
pub fn hnn_roundtrip_check(h: &HnnPresentation, original: &Presentation) -> bool {
    let Ok((ctx, r)) = HempelContext::from_presentation(original) else {
        return false;
    };
    let Ok(expr) = rewrite_in_normal_closure_basis(&r, &ctx) else {
        return false;
    };
    let ux = ctx.u.multiply(&Word::generator(X));
    let expected_r = expr.evaluate(Some(&ux));
    let surface = ctx.surface_relator();
    let conj_pm = |a: &Word, b: &Word| a.is_conjugate_to(b) || a.is_conjugate_to(&b.inverse());

    let z_family = h.conjugation_relators.len().saturating_sub(1);
    if z_family as i64 != ctx.d as i64 * h.nu {
        return false;
    }
    let images: Vec<Word> =
        std::iter::once(&h.relator).chain(&h.conjugation_relators).map(|w| h.substitute(w)).collect();
    let trivial = images.iter().filter(|w| w.is_identity()).count();
    let nontrivial: Vec<&Word> = images.iter().filter(|w| !w.is_identity()).collect();
    if trivial != z_family || nontrivial.len() != 2 {
        return false;
    }
    let (a, b) = (nontrivial[0], nontrivial[1]);
    (conj_pm(a, &expected_r) && conj_pm(b, &surface)) || (conj_pm(a, &surface) && conj_pm(b, &expected_r))
}
