//! Bredon homology `H_i(G; R_C)` over the family of finite subgroups, and the
//! K-groups `K_0`, `K_1` of the classifying space for proper actions.
//!
//! Inputs are presentations whose finite subgroups are, up to conjugacy, the
//! cyclic groups generated by relator roots (or by declared torsion
//! generators). For these groups
//!
//! * `H_0` is the product of the representation rings of the maximal finite
//!   cyclic subgroups, so free of rank `sum of orders`, or `Z` when there is no
//!   torsion;
//! * `H_1` is the abelianization of `G / Tor(G)`;
//! * `H_i` for `i >= 2` is ordinary homology of the orbit space, which for an
//!   aspherical presentation is the kernel of the exponent-sum matrix in degree
//!   2 and zero above.

use std::fmt;

use thiserror::Error;

use crate::finite_oracle::character_count;
use crate::free_group::Word;
use crate::hempel::{check_hempel, HempelContext};
use crate::int_linalg::{cokernel_invariants, kernel_rank, AbelianGroupInvariants};
use crate::presentation::{Presentation, PresentationError, TorsionMode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BredonError {
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error("K-theory needs a model of dimension at most 2 (presentation not known to be aspherical)")]
    NotTwoDimensional,
    #[error("the direct-sum formula only applies in degrees above 2, got {0}")]
    CombinatorDegree(usize),
    #[error("literal R_C(G) reading is only available when G is finite cyclic")]
    LiteralUnavailable,
}

/// The finite cyclic subgroup attached to one relator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorsionDatum {
    pub relator_index: usize,
    pub root: Word,
    /// 1 marks a torsion-free relator.
    pub order: u64,
}

pub fn torsion_data(p: &Presentation) -> Result<Vec<TorsionDatum>, BredonError> {
    p.relators()
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let (root, log) = r.root().map_err(PresentationError::from)?;
            let order = match p.mode() {
                TorsionMode::DeriveFromRoots => log,
                TorsionMode::Declared => p.declared_order(i).unwrap_or(1),
            };
            Ok(TorsionDatum { relator_index: i, root, order })
        })
        .collect()
}

pub fn bredon_h0(data: &[TorsionDatum]) -> AbelianGroupInvariants {
    let torsion: Vec<u64> = data.iter().map(|d| d.order).filter(|&o| o > 1).collect();
    if torsion.is_empty() {
        AbelianGroupInvariants::free(1)
    } else {
        AbelianGroupInvariants::free(torsion.iter().map(|&n| character_count(n) as usize).sum())
    }
}

/// Presentation of `G / Tor(G)`: relators replaced by roots, or declared
/// torsion generators killed.
pub fn torsion_free_quotient(p: &Presentation) -> Result<Presentation, BredonError> {
    Ok(match p.mode() {
        TorsionMode::DeriveFromRoots => p.root_presentation()?,
        TorsionMode::Declared => p.kill_torsion_presentation()?,
    })
}

pub fn bredon_h1(p: &Presentation) -> Result<AbelianGroupInvariants, BredonError> {
    Ok(cokernel_invariants(&torsion_free_quotient(p)?.exponent_matrix()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AsphericalSource {
    /// No relators: a free group.
    Free,
    OneRelator,
    Hempel,
    UserAsserted,
}

impl AsphericalSource {
    pub fn as_str(self) -> &'static str {
        match self {
            AsphericalSource::Free => "free",
            AsphericalSource::OneRelator => "one-relator",
            AsphericalSource::Hempel => "hempel",
            AsphericalSource::UserAsserted => "user-asserted",
        }
    }
}

/// Decides whether the presentation is known to be aspherical.
pub fn asphericity(p: &Presentation, user_asserted: bool) -> Option<AsphericalSource> {
    match p.relators().len() {
        0 => return Some(AsphericalSource::Free),
        1 => return Some(AsphericalSource::OneRelator),
        2 => {
            if let Ok((ctx, r)) = HempelContext::from_presentation(p) {
                if check_hempel(&r, &ctx).all_hold() {
                    return Some(AsphericalSource::Hempel);
                }
            }
        }
        _ => {}
    }
    user_asserted.then_some(AsphericalSource::UserAsserted)
}

/// Kernel of the exponent-sum matrix when the presentation is aspherical;
/// `None` stands for the uncomputed `H_2` of the orbit space.
pub fn bredon_h2(p: &Presentation, source: Option<AsphericalSource>) -> Option<AbelianGroupInvariants> {
    source.map(|_| AbelianGroupInvariants::free(kernel_rank(&p.exponent_matrix())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Higher {
    /// Two-dimensional model: everything above degree 2 vanishes.
    AllZero,
    /// `H_i = H_i(orbit space; Z)` for `i >= 2`, not computed.
    EqualsHBG,
}

impl Higher {
    pub fn as_str(self) -> &'static str {
        match self {
            Higher::AllZero => "ALL_ZERO",
            Higher::EqualsHBG => "EQUALS_H_BG",
        }
    }

    pub fn note(self) -> &'static str {
        match self {
            Higher::AllZero => "H_i = 0 for i > 2",
            Higher::EqualsHBG => "H_i = H_i(B̲G;ℤ) for i ≥ 2, not computed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BredonResult {
    pub h0: AbelianGroupInvariants,
    pub h1: AbelianGroupInvariants,
    pub h2: Option<AbelianGroupInvariants>,
    pub higher: Higher,
    pub aspherical_source: Option<AsphericalSource>,
    pub torsion: Vec<TorsionDatum>,
    /// `Some(n)` when the group itself is `Z/n` (one generator, one relator).
    pub finite_cyclic_order: Option<u64>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BredonOptions {
    pub assert_aspherical: bool,
}

pub fn bredon_full(p: &Presentation, opts: BredonOptions) -> Result<BredonResult, BredonError> {
    let torsion = torsion_data(p)?;
    let h0 = bredon_h0(&torsion);
    let h1 = bredon_h1(p)?;
    let source = asphericity(p, opts.assert_aspherical);
    let h2 = bredon_h2(p, source);
    let higher = if source.is_some() { Higher::AllZero } else { Higher::EqualsHBG };

    let mut warnings = Vec::new();
    if source == Some(AsphericalSource::UserAsserted) {
        warnings.push("asphericity asserted by the user and not verified".to_string());
    }
    let with_torsion: Vec<&TorsionDatum> = torsion.iter().filter(|d| d.order > 1).collect();
    for (a, da) in with_torsion.iter().enumerate() {
        for db in &with_torsion[a + 1..] {
            if da.root.is_conjugate_to(&db.root) || da.root.is_conjugate_to(&db.root.inverse()) {
                warnings.push(format!(
                    "relators {} and {} have conjugate roots in the free group; H0 may count one torsion subgroup twice",
                    da.relator_index, db.relator_index
                ));
            }
        }
    }

    let finite_cyclic_order =
        (p.alphabet().len() == 1 && p.relators().len() == 1 && p.mode() == TorsionMode::DeriveFromRoots)
            .then(|| p.relators()[0].len() as u64);

    Ok(BredonResult { h0, h1, h2, higher, aspherical_source: source, torsion, finite_cyclic_order, warnings })
}

/// `H_i(A) + H_i(B)` for `i > 2`; missing degrees count as zero.
pub fn one_relator_product_homology(
    ha: &[AbelianGroupInvariants],
    hb: &[AbelianGroupInvariants],
    i: usize,
) -> Result<AbelianGroupInvariants, BredonError> {
    if i <= 2 {
        return Err(BredonError::CombinatorDegree(i));
    }
    let zero = AbelianGroupInvariants::trivial();
    Ok(ha.get(i).unwrap_or(&zero).direct_sum(hb.get(i).unwrap_or(&zero)))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum H0Interpretation {
    /// Degree-0 term of `K_0` is Bredon `H_0`.
    #[default]
    BredonH0,
    /// Degree-0 term is the representation ring of `G` itself.
    LiteralRcG,
}

impl H0Interpretation {
    pub fn as_str(self) -> &'static str {
        match self {
            H0Interpretation::BredonH0 => "BREDON_H0",
            H0Interpretation::LiteralRcG => "LITERAL_RC_G",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KTheoryResult {
    pub k0: AbelianGroupInvariants,
    pub k1: AbelianGroupInvariants,
    pub h0_interpretation: H0Interpretation,
}

/// `K_0 = (degree-0 term) + H_2` (the sequence splits), `K_1 = H_1`.
pub fn ktheory(b: &BredonResult, interpretation: H0Interpretation) -> Result<KTheoryResult, BredonError> {
    if b.higher != Higher::AllZero {
        return Err(BredonError::NotTwoDimensional);
    }
    let h2 = b.h2.as_ref().ok_or(BredonError::NotTwoDimensional)?;
    let degree0 = match interpretation {
        H0Interpretation::BredonH0 => b.h0.clone(),
        H0Interpretation::LiteralRcG => {
            let n = b.finite_cyclic_order.ok_or(BredonError::LiteralUnavailable)?;
            AbelianGroupInvariants::free(character_count(n) as usize)
        }
    };
    Ok(KTheoryResult { k0: degree0.direct_sum(h2), k1: b.h1.clone(), h0_interpretation: interpretation })
}

impl fmt::Display for BredonResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "H0 = {}", self.h0)?;
        writeln!(f, "H1 = {}", self.h1)?;
        match &self.h2 {
            Some(h2) => writeln!(f, "H2 = {h2}")?,
            None => writeln!(f, "H2 = H2(BG;Z) (not computed)")?,
        }
        write!(f, "higher: {}", self.higher.note())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn parse(s: &str) -> Presentation {
        Presentation::parse(s).unwrap()
    }

    fn g(rank: usize, torsion: &[i64]) -> AbelianGroupInvariants {
        AbelianGroupInvariants::new(rank, torsion.iter().map(|&d| BigInt::from(d)).collect()).unwrap()
    }

    fn nec() -> Presentation {
        parse("<c1, c2, a1 | c1^2, c2^3, c1^-1*c2^-1*a1^2>\n!torsion rel=0 order=2\n!torsion rel=1 order=3")
    }

    #[test]
    fn torsion_data_examples() {
        let d = torsion_data(&parse("<x | x^3>")).unwrap();
        assert_eq!(d, vec![TorsionDatum { relator_index: 0, root: Word::from_signed(&[1]), order: 3 }]);
        let d = torsion_data(&parse("<x, y | [x, y]>")).unwrap();
        assert_eq!(d[0].order, 1);
        let d = torsion_data(&nec()).unwrap();
        assert_eq!(d.iter().map(|t| t.order).collect::<Vec<_>>(), [2, 3, 1]);
        assert_eq!(d[0].root, Word::from_signed(&[1]));
        assert_eq!(d[1].root, Word::from_signed(&[2]));
    }

    #[test]
    fn h0_examples() {
        assert_eq!(bredon_h0(&torsion_data(&parse("<x | x^3>")).unwrap()), g(3, &[]));
        assert_eq!(bredon_h0(&torsion_data(&parse("<x, y | [x, y]>")).unwrap()), g(1, &[]));
        assert_eq!(bredon_h0(&torsion_data(&nec()).unwrap()), g(5, &[]));
    }

    #[test]
    fn h1_examples() {
        assert_eq!(bredon_h1(&parse("<x, y | (x*y)^3>")).unwrap(), g(1, &[]));
        assert_eq!(bredon_h1(&parse("<x | x^3>")).unwrap(), g(0, &[]));
        assert_eq!(bredon_h1(&nec()).unwrap(), g(0, &[2]));
        // Klein bottle: no proper powers, H1 = ordinary abelianization
        assert_eq!(bredon_h1(&parse("<x, y | x*y*x^-1*y>")).unwrap(), g(1, &[2]));
    }

    #[test]
    fn h2_examples() {
        let s = Some(AsphericalSource::OneRelator);
        assert_eq!(bredon_h2(&parse("<x1, y1, x2, y2 | [x1, y1][x2, y2]>"), s), Some(g(1, &[])));
        assert_eq!(bredon_h2(&parse("<x | x^5>"), s), Some(g(0, &[])));
        let hempel = parse("<x, y, z1, z2 | [x,y][z1,z2], z1>");
        assert_eq!(asphericity(&hempel, false), Some(AsphericalSource::Hempel));
        assert_eq!(bredon_h2(&hempel, asphericity(&hempel, false)), Some(g(1, &[])));
        assert_eq!(asphericity(&nec(), false), None);
        assert_eq!(bredon_h2(&nec(), None), None);
        assert_eq!(asphericity(&nec(), true), Some(AsphericalSource::UserAsserted));
    }

    #[test]
    fn full_examples() {
        let b = bredon_full(&parse("<x | x^6>"), BredonOptions::default()).unwrap();
        assert_eq!(
            (b.h0.clone(), b.h1.clone(), b.h2.clone(), b.higher),
            (g(6, &[]), g(0, &[]), Some(g(0, &[])), Higher::AllZero)
        );
        assert_eq!(b.finite_cyclic_order, Some(6));

        let b =
            bredon_full(&parse("<a1, b1, a2, b2, a3, b3 | [a1,b1][a2,b2][a3,b3]>"), BredonOptions::default()).unwrap();
        assert_eq!((b.h0, b.h1, b.h2, b.higher), (g(1, &[]), g(6, &[]), Some(g(1, &[])), Higher::AllZero));

        let b = bredon_full(&nec(), BredonOptions::default()).unwrap();
        assert_eq!(b.higher, Higher::EqualsHBG);
        assert_eq!(b.h2, None);
        assert_eq!(ktheory(&b, H0Interpretation::BredonH0), Err(BredonError::NotTwoDimensional));

        let b = bredon_full(&nec(), BredonOptions { assert_aspherical: true }).unwrap();
        assert_eq!(b.higher, Higher::AllZero);
        assert!(!b.warnings.is_empty());
    }

    #[test]
    fn conjugate_roots_are_flagged() {
        let p = parse("<x, y | x^2, (y*x*y^-1)^3>");
        let b = bredon_full(&p, BredonOptions { assert_aspherical: true }).unwrap();
        assert!(b.warnings.iter().any(|w| w.contains("relators 0 and 1")));
    }

    #[test]
    fn combinator_examples() {
        let ha = vec![g(0, &[]), g(0, &[]), g(0, &[]), g(1, &[])];
        let hb = vec![g(0, &[]), g(0, &[]), g(0, &[]), g(0, &[2])];
        assert_eq!(one_relator_product_homology(&ha, &hb, 3).unwrap(), g(1, &[2]));
        assert_eq!(one_relator_product_homology(&[], &[], 5).unwrap(), g(0, &[]));
        let ha4 = vec![g(0, &[]), g(0, &[]), g(0, &[]), g(0, &[]), g(2, &[])];
        let hb4 = vec![g(0, &[]), g(0, &[]), g(0, &[]), g(0, &[]), g(0, &[2, 4])];
        assert_eq!(one_relator_product_homology(&ha4, &hb4, 4).unwrap(), g(2, &[2, 4]));
        assert_eq!(one_relator_product_homology(&ha, &hb, 2), Err(BredonError::CombinatorDegree(2)));
    }

    #[test]
    fn ktheory_examples() {
        let b = bredon_full(&parse("<x | x^5>"), BredonOptions::default()).unwrap();
        let k = ktheory(&b, H0Interpretation::BredonH0).unwrap();
        assert_eq!((k.k0, k.k1), (g(5, &[]), g(0, &[])));
        let k = ktheory(&b, H0Interpretation::LiteralRcG).unwrap();
        assert_eq!(k.k0, g(5, &[]));
        assert_eq!(k.h0_interpretation, H0Interpretation::LiteralRcG);

        let b = bredon_full(&parse("<x1, y1, x2, y2 | [x1, y1][x2, y2]>"), BredonOptions::default()).unwrap();
        let k = ktheory(&b, H0Interpretation::BredonH0).unwrap();
        assert_eq!((k.k0, k.k1), (g(2, &[]), g(4, &[])));
        assert_eq!(ktheory(&b, H0Interpretation::LiteralRcG), Err(BredonError::LiteralUnavailable));

        let b = bredon_full(&parse("<x, y, z1, z2 | [x,y][z1,z2], z1>"), BredonOptions::default()).unwrap();
        let k = ktheory(&b, H0Interpretation::BredonH0).unwrap();
        assert_eq!((k.k0, k.k1), (g(2, &[]), g(3, &[])));
    }

    #[test]
    fn torsion_free_inputs_match_untwisted_case() {
        for s in ["<x, y | x*y*x^-1*y>", "<a, b | a^2*b^3>", "<a, b, c | [a,b]*c^2>"] {
            let p = parse(s);
            let b = bredon_full(&p, BredonOptions::default()).unwrap();
            assert_eq!(b.h0, g(1, &[]));
            assert_eq!(b.h1, cokernel_invariants(&p.exponent_matrix()));
            let k = ktheory(&b, H0Interpretation::BredonH0).unwrap();
            assert_eq!(k.k0, g(1, &[]).direct_sum(b.h2.as_ref().unwrap()));
            assert_eq!(k.k1, b.h1);
        }
    }
}
