//! Brute-force checks over the finite cyclic group `Z/n = <x | x^n>`.
//!
//! Elements of `Z[Z/n]` act on row vectors through the regular
//! representation: `x^k` is the permutation matrix sending basis vector
//! `e_j` to `e_{j+k mod n}`. Chain complexes of free `Z[Z/n]`-modules become
//! integer block matrices, and exactness is read off Smith normal forms.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::fox::{fox_derivative, FreeRingElement};
use crate::free_group::{GeneratorId, Word};
use crate::int_linalg::{cokernel_invariants, kernel_rank, rank, smith_normal_form, AbelianGroupInvariants, IntMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("only single-generator ring elements can be embedded")]
    MultiGenerator,
    #[error("group order must be positive")]
    ZeroOrder,
}

/// Regular-representation block of a ring element, with `x` sent to the
/// shift raised to `gen_image`.
pub fn embed(e: &FreeRingElement, n: usize, gen_image: i64) -> Result<IntMatrix, OracleError> {
    if n == 0 {
        return Err(OracleError::ZeroOrder);
    }
    let mut m = IntMatrix::zeros(n, n);
    for (w, c) in e.terms() {
        if w.letters().iter().any(|l| l.gen != GeneratorId(0)) {
            return Err(OracleError::MultiGenerator);
        }
        let shift = (w.exponent_sum(GeneratorId(0)) * gen_image).rem_euclid(n as i64) as usize;
        for j in 0..n {
            m[(j, (j + shift) % n)] += c;
        }
    }
    Ok(m)
}

/// A matrix over `Z[Z/n]` stored through the regular representation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicRingMatrix {
    n: usize,
    block_rows: usize,
    block_cols: usize,
    matrix: IntMatrix,
}

impl CyclicRingMatrix {
    pub fn from_elements(n: usize, elements: &[Vec<FreeRingElement>]) -> Result<Self, OracleError> {
        let blocks: Vec<Vec<IntMatrix>> = elements
            .iter()
            .map(|row| row.iter().map(|e| embed(e, n, 1)).collect::<Result<_, _>>())
            .collect::<Result<_, _>>()?;
        let refs: Vec<Vec<&IntMatrix>> = blocks.iter().map(|r| r.iter().collect()).collect();
        let block_cols = elements.first().map_or(0, Vec::len);
        Ok(CyclicRingMatrix { n, block_rows: elements.len(), block_cols, matrix: IntMatrix::block(&refs) })
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    /// Every `n x n` block is circulant.
    pub fn is_circulant(&self) -> bool {
        let n = self.n;
        (0..self.block_rows).all(|bi| {
            (0..self.block_cols).all(|bj| {
                (0..n).all(|i| {
                    (0..n).all(|j| {
                        self.matrix[(bi * n + i, bj * n + j)] == self.matrix[(bi * n, bj * n + (j + n - i) % n)]
                    })
                })
            })
        })
    }
}

/// Homology `ker(out) / im(inc)` at one spot of a complex `A --inc--> B --out--> C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageReport {
    pub name: String,
    pub composite_zero: bool,
    pub kernel_rank: usize,
    pub image_rank: usize,
    pub homology: AbelianGroupInvariants,
}

fn stage(name: &str, inc: &IntMatrix, out: &IntMatrix) -> StageReport {
    let composite_zero = inc.mul(out).is_zero();
    let kernel = kernel_rank(out);
    let image = rank(inc);
    // B / ker(out) is free, so the torsion of ker(out)/im(inc) is that of B/im(inc).
    let torsion = cokernel_invariants(inc).torsion;
    let free = kernel.saturating_sub(image);
    StageReport {
        name: name.to_string(),
        composite_zero,
        kernel_rank: kernel,
        image_rank: image,
        homology: AbelianGroupInvariants { rank: free, torsion },
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolutionReport {
    pub n: usize,
    /// The Fox image is invariant under the finite subgroup, so it defines a
    /// map out of the coset module.
    pub theta_well_defined: bool,
    pub stages: Vec<StageReport>,
}

impl ResolutionReport {
    pub fn exact(&self) -> bool {
        self.theta_well_defined && self.stages.iter().all(|s| s.composite_zero && s.homology.is_trivial())
    }
}

fn ones(rows: usize, cols: usize) -> IntMatrix {
    IntMatrix::new(rows, cols, vec![BigInt::one(); rows * cols]).expect("shape")
}

fn ring(terms: &[(i64, i64)]) -> FreeRingElement {
    terms.iter().fold(FreeRingElement::zero(), |acc, &(k, c)| {
        acc + FreeRingElement::from_term(Word::generator(GeneratorId(0)).pow(k), BigInt::from(c))
    })
}

/// Both complexes for `<x | x^n>`: the relation-module sequence
/// `0 -> Z[G/G_r] -> ZG -> ZG -> Z -> 0` with the given Fox image, and the
/// subdivided Cayley complex `0 -> ZG -> ZG^2 -> ZG + Z -> Z -> 0`.
pub fn cyclic_resolution_report(n: usize, theta: &FreeRingElement) -> Result<ResolutionReport, OracleError> {
    let one = ring(&[(0, 1)]);
    let x_minus_one = ring(&[(1, 1), (0, -1)]);
    let one_minus_x = ring(&[(0, 1), (1, -1)]);

    let theta_block = embed(theta, n, 1)?;
    let theta_well_defined = (1..n).all(|i| theta_block.row(i) == theta_block.row(0));
    let theta_row = IntMatrix::new(1, n, theta_block.row(0).to_vec()).expect("shape");
    let boundary = embed(&x_minus_one, n, 1)?;
    let augmentation = ones(n, 1);

    let mut stages = vec![
        stage("relation module", &IntMatrix::zeros(0, 1), &theta_row),
        stage("edges", &theta_row, &boundary),
        stage("vertices", &boundary, &augmentation),
        stage("augmentation", &augmentation, &IntMatrix::zeros(1, 0)),
    ];

    // faces -> edges + spokes -> vertices + centre -> Z
    let d2 = IntMatrix::block(&[vec![&embed(&one, n, 1)?, &embed(&one_minus_x, n, 1)?]]);
    let minus_ones = IntMatrix::new(n, 1, vec![-BigInt::one(); n]).expect("shape");
    let d1 = IntMatrix::block(&[vec![&boundary, &IntMatrix::zeros(n, 1)], vec![&embed(&one, n, 1)?, &minus_ones]]);
    let eps = ones(n + 1, 1);
    stages.push(stage("model: 2-cells", &IntMatrix::zeros(0, n), &d2));
    stages.push(stage("model: 1-cells", &d2, &d1));
    stages.push(stage("model: 0-cells", &d1, &eps));
    stages.push(stage("model: augmentation", &eps, &IntMatrix::zeros(1, 0)));

    Ok(ResolutionReport { n, theta_well_defined, stages })
}

/// Exactness of both complexes for `<x | x^n>`, with the Fox image computed
/// from the relator `x^n`.
pub fn verify_cyclic_resolution(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let x = Word::generator(GeneratorId(0));
    let theta = fox_derivative(&x.pow(n as i64), GeneratorId(0));
    cyclic_resolution_report(n, &theta).is_ok_and(|r| r.exact())
}

/// The one-dimensional characters of `Z/n`, as exponent tuples: entry `j`
/// of character `k` is `e` with `chi_k(x^j) = omega^e`, `omega = exp(2 pi i / n)`.
pub fn characters(n: u64) -> Vec<Vec<u64>> {
    let mut out: Vec<Vec<u64>> = Vec::new();
    for k in 0..n {
        let chi: Vec<u64> = (0..n).map(|j| (j * k) % n).collect();
        let homomorphism =
            (0..n).all(|a| (0..n).all(|b| chi[((a + b) % n) as usize] == (chi[a as usize] + chi[b as usize]) % n));
        if homomorphism && !out.contains(&chi) {
            out.push(chi);
        }
    }
    out
}

/// Number of irreducible complex characters of `Z/n`.
pub fn character_count(n: u64) -> u64 {
    assert!(n >= 1, "group order must be positive");
    characters(n).len() as u64
}

/// Multiplicity of each irreducible character in a class function given by
/// integer traces `trace[j] = tr(x^j)`, via `<f, chi> = (1/n) sum_j f(j) conj(chi(j))`.
/// Sums of roots of unity are collected as coefficients of `omega^e`; an
/// integer result requires all non-trivial coefficients to agree.
pub fn multiplicities(trace: &[i64]) -> Option<Vec<i64>> {
    let n = trace.len() as u64;
    characters(n)
        .iter()
        .map(|chi| {
            let mut coeff = vec![0i64; n as usize];
            for (j, t) in trace.iter().enumerate() {
                coeff[((n - chi[j]) % n) as usize] += t;
            }
            let base = if n > 1 { coeff[1] } else { 0 };
            if coeff[1..].iter().any(|&c| c != base) {
                return None;
            }
            let total = coeff[0] - base;
            (total % n as i64 == 0).then(|| total / n as i64)
        })
        .collect()
}

/// Bredon chains of the subdivided Cayley complex of `<x | x^n>` with
/// coefficients in the representation ring, and their homology in degrees 0..=2.
pub fn bredon_homology_of_cyclic_model(n: usize) -> Result<[AbelianGroupInvariants; 3], OracleError> {
    if n == 0 {
        return Err(OracleError::ZeroOrder);
    }
    // free orbits contribute R_C(1) = Z; the centre contributes R_C(Z/n)
    let regular: Vec<i64> = (0..n).map(|j| if j == 0 { n as i64 } else { 0 }).collect();
    let induction = multiplicities(&regular).expect("regular character decomposes");
    let r = induction.len();

    let aug = |e: &FreeRingElement| e.augment();
    let one = ring(&[(0, 1)]);
    let x_minus_one = ring(&[(1, 1), (0, -1)]);
    let one_minus_x = ring(&[(0, 1), (1, -1)]);

    // faces -> (edges, spokes)
    let d2 = IntMatrix::new(1, 2, vec![aug(&one), aug(&one_minus_x)]).expect("shape");
    // (edges, spokes) -> (free vertex, R_C(Z/n))
    let mut d1 = IntMatrix::zeros(2, 1 + r);
    d1[(0, 0)] = aug(&x_minus_one);
    d1[(1, 0)] = aug(&one);
    for (k, m) in induction.iter().enumerate() {
        d1[(1, 1 + k)] = BigInt::from(-m);
    }
    let h0 = cokernel_invariants(&d1);
    let h1 = stage("bredon 1", &d2, &d1).homology;
    let h2 = AbelianGroupInvariants::free(kernel_rank(&d2));
    debug_assert!(smith_normal_form(&d2).d.entries().iter().all(|d| d.is_zero() || d.is_one()));
    Ok([h0, h1, h2])
}
