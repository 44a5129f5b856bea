//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line; exits non-zero if any fails.

use std::time::Instant;

use bredon::bredon::{
    bredon_full, bredon_h1, ktheory, one_relator_product_homology, torsion_data, AsphericalSource, BredonOptions,
    H0Interpretation, Higher,
};
use bredon::finite_oracle::verify_cyclic_resolution;
use bredon::fox::{fox_derivative, fundamental_identity_check, FreeRingElement};
use bredon::hempel::{
    build_hnn, check_hempel, hnn_roundtrip_check, rewrite_in_normal_closure_basis, HempelContext, HempelError,
};
use bredon::int_linalg::smith_normal_form;
use bredon::{AbelianGroupInvariants, Alphabet, GeneratorId, IntMatrix, Letter, Presentation, Word};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::Value;

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn group(rank: usize, torsion: &[i64]) -> AbelianGroupInvariants {
    AbelianGroupInvariants::new(rank, torsion.iter().map(|&d| BigInt::from(d)).collect()).unwrap()
}

fn random_letters(rng: &mut StdRng, n_gens: usize, max_len: usize) -> Vec<Letter> {
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| Letter { gen: GeneratorId(rng.gen_range(0..n_gens)), inverse: rng.gen_bool(0.5) }).collect()
}

/// Fox derivative straight from the definition, on an unreduced letter string.
fn fox_by_definition(letters: &[Letter], g: GeneratorId) -> FreeRingElement {
    let mut out = FreeRingElement::zero();
    let mut prefix: Vec<Letter> = Vec::new();
    for l in letters {
        if l.gen == g {
            if l.inverse {
                let mut w = prefix.clone();
                w.push(*l);
                out.add_term(Word::from_letters(w), -BigInt::one());
            } else {
                out.add_term(Word::from_letters(prefix.clone()), BigInt::one());
            }
        }
        prefix.push(*l);
    }
    out
}

fn criterion_1() -> Outcome {
    let mut rng = StdRng::seed_from_u64(1);
    for i in 0..1000 {
        let n = rng.gen_range(1..=5);
        let lu = random_letters(&mut rng, n, 64);
        let lv = random_letters(&mut rng, n, 64);
        let (u, v) = (Word::from_letters(lu.clone()), Word::from_letters(lv));
        let uv = u.multiply(&v);
        for g in (0..n).map(GeneratorId) {
            let du = fox_derivative(&u, g);
            let product =
                fox_derivative(&uv, g) == du.clone() + &FreeRingElement::from_word(u.clone()) * &fox_derivative(&v, g);
            let inverse = fox_derivative(&u.inverse(), g) == -(&FreeRingElement::from_word(u.inverse()) * &du);
            let definition = fox_by_definition(&lu, g) == du;
            let augment = du.augment() == BigInt::from(u.exponent_sum(g));
            ensure(product && inverse && definition && augment, || {
                format!("word #{i}: product {product}, inverse {inverse}, definition {definition}, augment {augment}")
            })?;
        }
        ensure(fundamental_identity_check(&u, n), || format!("word #{i}: fundamental identity"))?;
    }
    Ok(())
}

fn det(m: &[Vec<BigInt>]) -> BigInt {
    if m.is_empty() {
        return BigInt::one();
    }
    let mut total = BigInt::zero();
    for (j, a) in m[0].iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let minor: Vec<Vec<BigInt>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| x.clone()).collect())
            .collect();
        let term = a * det(&minor);
        total = if j % 2 == 0 { total + term } else { total - term };
    }
    total
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    (k - 1..n)
        .flat_map(|last| {
            subsets(last, k - 1).into_iter().map(move |mut s| {
                s.push(last);
                s
            })
        })
        .collect()
}

/// Invariant factors `D_k / D_{k-1}`, where `D_k` is the gcd of the k x k minors.
fn invariant_factors_by_minors(m: &IntMatrix) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut prev = BigInt::one();
    for k in 1..=m.rows().min(m.cols()) {
        let mut g = BigInt::zero();
        for rs in subsets(m.rows(), k) {
            for cs in subsets(m.cols(), k) {
                let sub: Vec<Vec<BigInt>> =
                    rs.iter().map(|&r| cs.iter().map(|&c| m[(r, c)].clone()).collect()).collect();
                g = g.gcd(&det(&sub));
            }
        }
        if g.is_zero() {
            break;
        }
        out.push(&g / &prev);
        prev = g;
    }
    out
}

fn criterion_2() -> Outcome {
    let mut rng = StdRng::seed_from_u64(2);
    for i in 0..500 {
        let (r, c) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
        let rows: Vec<Vec<i64>> = (0..r).map(|_| (0..c).map(|_| rng.gen_range(-9..=9)).collect()).collect();
        let m = IntMatrix::from_rows(&rows);
        let s = smith_normal_form(&m);
        ensure(s.u.mul(&m).mul(&s.v) == s.d, || format!("matrix #{i}: UMV != D"))?;
        ensure(s.u.determinant().abs().is_one() && s.v.determinant().abs().is_one(), || {
            format!("matrix #{i}: not unimodular")
        })?;
        for a in 0..r {
            for b in 0..c {
                ensure(a == b || s.d[(a, b)].is_zero(), || format!("matrix #{i}: D not diagonal"))?;
            }
        }
        let nonzero: Vec<BigInt> = s.d.diag().into_iter().take_while(|d| !d.is_zero()).collect();
        ensure(nonzero.iter().all(|d| d.is_positive()), || format!("matrix #{i}: negative invariant factor"))?;
        ensure(s.d.diag().iter().skip(nonzero.len()).all(Zero::is_zero), || {
            format!("matrix #{i}: zeros out of order")
        })?;
        ensure(nonzero == invariant_factors_by_minors(&m), || {
            format!("matrix #{i}: {nonzero:?} disagrees with minors")
        })?;
    }
    Ok(())
}

fn cli_json(args: &[&str]) -> Result<Value, String> {
    let o = bredon::cli::run(std::iter::once("bredon").chain(args.iter().copied()));
    if o.status != 0 {
        return Err(format!("{args:?} exited {}: {}", o.status, o.stderr));
    }
    serde_json::from_str(&o.stdout).map_err(|e| e.to_string())
}

fn rank_json(v: &Value) -> Option<(u64, usize)> {
    Some((v["rank"].as_u64()?, v["torsion"].as_array()?.len()))
}

fn criterion_3() -> Outcome {
    for n in 2..=12u64 {
        let input = format!("<x|x^{n}>");
        let v = cli_json(&["ktheory", "--in", &input, "--format", "json"])?;
        let expect = [("H0", n), ("H1", 0), ("H2", 0), ("K0", n), ("K1", 0)];
        for (key, rank) in expect {
            ensure(rank_json(&v[key]) == Some((rank, 0)), || format!("n = {n}: {key} = {}", v[key]))?;
        }
        let b = cli_json(&["bredon", "--in", &input])?;
        ensure(rank_json(&b["H0"]) == Some((n, 0)), || format!("n = {n}: bredon H0 = {}", b["H0"]))?;
        ensure(verify_cyclic_resolution(n as usize), || format!("n = {n}: resolution not exact"))?;
    }
    Ok(())
}

fn check_bredon_k(
    p: &Presentation,
    h: [&AbelianGroupInvariants; 3],
    k: [&AbelianGroupInvariants; 2],
    label: &str,
) -> Outcome {
    let b = bredon_full(p, BredonOptions::default()).map_err(|e| format!("{label}: {e}"))?;
    ensure(b.h0 == *h[0] && b.h1 == *h[1] && b.h2.as_ref() == Some(h[2]), || {
        format!("{label}: H0 = {}, H1 = {}, H2 = {:?}", b.h0, b.h1, b.h2)
    })?;
    let kt = ktheory(&b, H0Interpretation::BredonH0).map_err(|e| format!("{label}: {e}"))?;
    ensure(kt.k0 == *k[0] && kt.k1 == *k[1], || format!("{label}: K0 = {}, K1 = {}", kt.k0, kt.k1))
}

fn criterion_4() -> Outcome {
    for g in 2..=3usize {
        let names: Vec<String> = (1..=g).flat_map(|i| [format!("a{i}"), format!("b{i}")]).collect();
        let rel: Vec<String> = (1..=g).map(|i| format!("[a{i},b{i}]")).collect();
        let p =
            Presentation::parse(&format!("<{} | {}>", names.join(", "), rel.join(" "))).map_err(|e| e.to_string())?;
        ensure(p.exponent_matrix().is_zero(), || "exponent sums not zero".into())?;
        let (z, z2g, z2) = (group(1, &[]), group(2 * g, &[]), group(2, &[]));
        check_bredon_k(&p, [&z, &z2g, &z], [&z2, &z2g], &format!("genus {g}"))?;
    }
    Ok(())
}

fn criterion_5() -> Outcome {
    for n in 2..=6usize {
        let p = Presentation::parse(&format!("<x, y | (x*y)^{n}>")).map_err(|e| e.to_string())?;
        let (zn, z, zero) = (group(n, &[]), group(1, &[]), group(0, &[]));
        check_bredon_k(&p, [&zn, &z, &zero], [&zn, &z], &format!("n = {n}"))?;
    }
    Ok(())
}

fn criterion_6() -> Outcome {
    let p = Presentation::parse("<x, y, z1, z2 | [x,y][z1,z2], z1>").map_err(|e| e.to_string())?;
    let (ctx, r) = HempelContext::from_presentation(&p).map_err(|e| e.to_string())?;
    let report = check_hempel(&r, &ctx);
    ensure(report.all_hold() && report.nu == Some(0), || format!("report {report:?}"))?;
    let h = build_hnn(&r, &ctx, p.alphabet()).map_err(|e| e.to_string())?;
    ensure(h.nu() == 0 && h.stable_letter() == "y", || "stable letter / nu".into())?;
    // one x-relator, no z-relators when nu = 0
    ensure(h.conjugation_relators().len() == 1, || format!("{} conjugation relators", h.conjugation_relators().len()))?;
    ensure(h.base_presentation().to_string() == "<x, z1_0, z2_0 | z1_0>", || h.base_presentation().to_string())?;
    ensure(h.certificate().involves_top_level && h.certificate().involves_bottom_level, || "certificate".into())?;
    ensure(hnn_roundtrip_check(&h, &p), || "roundtrip".into())?;
    // exponent matrix rows (0,0,0,0) and (0,0,1,0): rank 1, so H1 = Z^3 and H2 = Z
    let b = bredon_full(&p, BredonOptions::default()).map_err(|e| e.to_string())?;
    ensure(b.aspherical_source == Some(AsphericalSource::Hempel), || format!("source {:?}", b.aspherical_source))?;
    ensure(b.h0 == group(1, &[]) && b.h1 == group(3, &[]) && b.h2 == Some(group(1, &[])), || {
        format!("H0 = {}, H1 = {}, H2 = {:?}", b.h0, b.h1, b.h2)
    })
}

fn criterion_7() -> Outcome {
    let ctx = HempelContext::new(2, Word::from_signed(&[3, 4, -3, -4])).map_err(|e| e.to_string())?;
    let x = Word::from_signed(&[1]);
    let r = check_hempel(&x, &ctx);
    ensure(!r.h1.holds, || "r = x passes H1".into())?;
    let r = check_hempel(&Word::from_signed(&[2, 1, -2]), &ctx);
    ensure(r.h1.holds && !r.h4.holds, || format!("r = yxy^-1: H1 {}, H4 {}", r.h1.holds, r.h4.holds))?;
    let err = rewrite_in_normal_closure_basis(&Word::from_signed(&[2, 3]), &ctx);
    ensure(matches!(err, Err(HempelError::NotInKernel { y_exponent: 1 })), || format!("{err:?}"))
}

fn criterion_8() -> Outcome {
    let p = Presentation::parse(
        "<a1, c1, c2 | c1^2, c2^3, c1^-1 c2^-1 a1^2>\n!torsion rel=0 order=2\n!torsion rel=1 order=3",
    )
    .map_err(|e| e.to_string())?;
    let b = bredon_full(&p, BredonOptions::default()).map_err(|e| e.to_string())?;
    ensure(b.h0 == group(5, &[]) && b.h1 == group(0, &[2]), || format!("H0 = {}, H1 = {}", b.h0, b.h1))?;
    ensure(b.higher == Higher::EqualsHBG && b.h2.is_none(), || format!("higher {:?}", b.higher))
}

fn criterion_9() -> Outcome {
    let mut rng = StdRng::seed_from_u64(9);
    let mut done = 0;
    while done < 50 {
        let n = rng.gen_range(1..=3);
        let r = Word::from_letters(random_letters(&mut rng, n, 12));
        if r.is_identity() {
            continue;
        }
        let names: Vec<String> = (0..n).map(|i| format!("g{i}")).collect();
        let alphabet = Alphabet::new(names).map_err(|e| e.to_string())?;
        let p = Presentation::new(alphabet.clone(), vec![r.clone()]).map_err(|e| e.to_string())?;
        let p2 = Presentation::new(alphabet, vec![r.pow(2)]).map_err(|e| e.to_string())?;
        let (t, t2) = (torsion_data(&p).map_err(|e| e.to_string())?, torsion_data(&p2).map_err(|e| e.to_string())?);
        ensure(t2[0].order == 2 * t[0].order && t2[0].root == t[0].root, || format!("r = {r:?}: {t:?} vs {t2:?}"))?;
        let (h, h2) = (bredon_h1(&p).map_err(|e| e.to_string())?, bredon_h1(&p2).map_err(|e| e.to_string())?);
        ensure(h == h2, || format!("r = {r:?}: H1 {h} vs {h2}"))?;
        done += 1;
    }
    Ok(())
}

fn criterion_10() -> Outcome {
    let zero = AbelianGroupInvariants::trivial();
    let ha = vec![zero.clone(), zero.clone(), zero.clone(), group(2, &[])];
    let hb = vec![zero.clone(), zero.clone(), zero.clone(), group(0, &[2, 4])];
    let h = one_relator_product_homology(&ha, &hb, 3).map_err(|e| e.to_string())?;
    ensure(h == group(2, &[2, 4]), || format!("merged to {h}"))?;
    let mut rng = StdRng::seed_from_u64(10);
    let random_group = |rng: &mut StdRng| {
        let orders: Vec<BigInt> = (0..rng.gen_range(0..4)).map(|_| BigInt::from(rng.gen_range(1..=12))).collect();
        AbelianGroupInvariants::from_cyclic_orders(rng.gen_range(0..4), &orders)
    };
    for i in 0..100 {
        let ha: Vec<_> = (0..5).map(|_| random_group(&mut rng)).collect();
        let hb: Vec<_> = (0..rng.gen_range(3..6)).map(|_| random_group(&mut rng)).collect();
        for deg in 3..6 {
            let ab = one_relator_product_homology(&ha, &hb, deg).map_err(|e| e.to_string())?;
            let ba = one_relator_product_homology(&hb, &ha, deg).map_err(|e| e.to_string())?;
            ensure(ab == ba, || format!("pair #{i}, degree {deg}: {ab} vs {ba}"))?;
        }
    }
    Ok(())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("Fox calculus identities on 1000 random words", criterion_1),
        ("Smith normal form on 500 random matrices", criterion_2),
        ("cyclic groups Z/n, n = 2..12", criterion_3),
        ("surface groups of genus 2 and 3", criterion_4),
        ("proper powers (xy)^n, n = 2..6", criterion_5),
        ("Hempel pipeline for [x,y][z1,z2], r = z1", criterion_6),
        ("negative Hempel cases", criterion_7),
        ("NEC family with declared torsion", criterion_8),
        ("torsion scaling r -> r^2 on 50 relators", criterion_9),
        ("one-relator product combinator", criterion_10),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        match f() {
            Ok(()) => println!("criterion {:>2}: PASS  {name} ({:.2?})", i + 1, t.elapsed()),
            Err(e) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {name}: {e}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} passed in {:.2?}", criteria.len() - failed, criteria.len(), start.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}
