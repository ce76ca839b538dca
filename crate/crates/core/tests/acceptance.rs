//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use qlens_core::{
    count_admissible, enumerate_admissible, graph_k_theory, k7_case, lens_construction, lens_graph,
    lens_k_theory, minor_gcds, oracle_lens_k, oracle_multiplicities, smith_normal_form, wp1_graph,
    wp_hypothesis, wp_k_theory, AbelianGroup, BigInt, IntegerMatrix, K7Case, K7Parameters,
    LensFamily, Multiplicity, WeightVector, WprojError,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn weights(v: &[u64]) -> WeightVector {
    WeightVector::new(v.to_vec()).expect("positive weights")
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let spent = start.elapsed();
    check(spent < limit, || format!("took {spent:?}, limit {limit:?}"))
}

fn multiplicity_formulas() -> Outcome {
    let start = Instant::now();
    let mut compared = 0usize;
    for family in LensFamily::ALL {
        for k in 1..=6u64 {
            for l in 1..=6u64 {
                let m = family.weights(l);
                let c = lens_construction(family.sphere_dimension(), k * l, &m)
                    .map_err(|e| format!("{family} k={k} l={l}: {e}"))?;
                let oracle = oracle_multiplicities(family, k, l).map_err(|e| e.to_string())?;
                check(oracle.labels() == c.counts.labels(), || {
                    format!("{family} k={k} l={l}: vertex sets differ")
                })?;
                for i in 0..oracle.dim() {
                    for j in 0..oracle.dim() {
                        let (got, want) = (c.counts.get(i, j), oracle.get(i, j));
                        check(got == want, || {
                            format!(
                                "{family} k={k} l={l}: {} -> {} counted {got}, closed form {want}",
                                oracle.labels()[i],
                                oracle.labels()[j]
                            )
                        })?;
                        compared += 1;
                    }
                }
            }
        }
    }
    within(start, Duration::from_secs(10))?;
    Ok(format!("{compared} entries equal in {:?}", start.elapsed()))
}

fn k0_tables() -> Outcome {
    let start = Instant::now();
    let mut l5a_branches = BTreeSet::new();
    let mut l5b_branches = BTreeSet::new();
    let mut l7_cases = BTreeSet::new();
    for family in [LensFamily::L5A, LensFamily::L5B, LensFamily::L7] {
        for k in 1..=6u64 {
            for l in 1..=6u64 {
                let got = lens_k_theory(family.sphere_dimension(), k * l, &family.weights(l))
                    .map_err(|e| e.to_string())?;
                let want = oracle_lens_k(family, k, l)
                    .map_err(|e| format!("{family} k={k} l={l}: {e}"))?;
                check(got == want, || {
                    format!("{family} k={k} l={l}: computed {got}, closed form {want}")
                })?;
                check(got.k1.torsion().is_empty(), || {
                    format!("{family} k={k} l={l}: K1 torsion")
                })?;
                check(got.k0.free_rank() == got.k1.free_rank(), || {
                    format!("{family} k={k} l={l}: K0/K1 free ranks differ")
                })?;
                match family {
                    LensFamily::L5A => {
                        l5a_branches.insert(k % 2 == 0 && l % 2 == 1);
                        let order = BigInt::from(k * k);
                        check(got.k0.torsion_order() == order, || {
                            format!("L5A k={k} l={l}: torsion order is not k^2")
                        })?;
                    }
                    LensFamily::L5B => {
                        l5b_branches.insert(k % 2 == 0);
                    }
                    LensFamily::L7 => {
                        let case = k7_case(&K7Parameters::new(k, l)).map_err(|e| e.to_string())?;
                        if l == 1 {
                            check(
                                !matches!(case, K7Case::SixthResidue | K7Case::HalfResidue),
                                || format!("L7 k={k} l=1 selects case {}", case.number()),
                            )?;
                        }
                        l7_cases.insert(case.number());
                    }
                    LensFamily::L3 => unreachable!(),
                }
            }
        }
    }
    check(l5a_branches.len() == 2, || {
        "L5A parity branches not both exercised".into()
    })?;
    check(l5b_branches.len() == 2, || {
        "L5B parity branches not both exercised".into()
    })?;
    check(l7_cases.len() >= 4, || {
        format!("only L7 cases {l7_cases:?} exercised")
    })?;
    within(start, Duration::from_secs(20))?;
    Ok(format!(
        "108 groups equal, L7 cases {l7_cases:?} in {:?}",
        start.elapsed()
    ))
}

fn sphere_consistency(rng: &mut ChaCha8Rng) -> Outcome {
    let sphere = format!("{}", AbelianGroup::free(1));
    let mut runs = 0;
    for n in 0..=4usize {
        for _ in 0..5 {
            let m: Vec<u64> = (0..=n).map(|_| rng.gen_range(1..=40)).collect();
            let kt = lens_k_theory(n, 1, &weights(&m)).map_err(|e| e.to_string())?;
            check(
                kt.k0 == AbelianGroup::free(1) && kt.k1 == AbelianGroup::free(1),
                || format!("n={n} m={m:?}: {kt}, expected K0 = K1 = {sphere}"),
            )?;
            runs += 1;
        }
    }
    Ok(format!("{runs} instances give (Z, Z)"))
}

fn coprime_degeneration(rng: &mut ChaCha8Rng) -> Outcome {
    let mut found = 0;
    while found < 20 {
        let n = rng.gen_range(0..=3usize);
        let modulus = rng.gen_range(1..=60u64);
        let m: Vec<u64> = (0..=n).map(|_| rng.gen_range(1..=3 * modulus)).collect();
        if m.iter().any(|&x| x.gcd(&modulus) != 1) {
            continue;
        }
        found += 1;
        let g = lens_graph(n, modulus, &weights(&m)).map_err(|e| e.to_string())?;
        check(g.vertex_count() == n + 1, || {
            format!("N={modulus} m={m:?}: {} vertices", g.vertex_count())
        })?;
        for v in 0..g.vertex_count() {
            let loops = g.find_edge(v, v).map(|e| g.edges()[e].multiplicity.clone());
            check(loops == Some(Multiplicity::one()), || {
                format!(
                    "N={modulus} m={m:?}: vertex {} lacks a single loop",
                    g.vertex(v)
                )
            })?;
            let levels: BTreeSet<u32> = g.vertices().iter().map(|v| v.level).collect();
            check(levels.len() == n + 1, || {
                format!("N={modulus} m={m:?}: levels {levels:?}")
            })?;
        }
    }
    Ok("20 coprime instances have n+1 vertices with one loop each".into())
}

fn top_level_count(rng: &mut ChaCha8Rng) -> Outcome {
    for _ in 0..50 {
        let n = rng.gen_range(0..=3usize);
        let modulus = rng.gen_range(1..=36u64);
        let m: Vec<u64> = (0..=n).map(|_| rng.gen_range(1..=2 * modulus)).collect();
        let g = lens_graph(n, modulus, &weights(&m)).map_err(|e| e.to_string())?;
        let top = g
            .vertices()
            .iter()
            .filter(|v| v.level as usize == n)
            .count() as u64;
        let want = m[n].gcd(&modulus);
        check(top == want, || {
            format!("N={modulus} m={m:?}: {top} top-level vertices, gcd is {want}")
        })?;
    }
    Ok("50 instances have gcd(m_n, N) top-level vertices".into())
}

fn counting_matches_enumeration() -> Outcome {
    let mut instances = 0usize;
    let mut pairs = 0usize;
    for n in 0..=2usize {
        for modulus in 1..=8u64 {
            let total = (modulus as usize).pow(n as u32 + 1);
            for code in 0..total {
                let mut rest = code;
                let m: Vec<u64> = (0..=n)
                    .map(|_| {
                        let w = (rest % modulus as usize) as u64 + 1;
                        rest /= modulus as usize;
                        w
                    })
                    .collect();
                let c = lens_construction(n, modulus, &weights(&m))
                    .map_err(|e| format!("n={n} N={modulus} m={m:?}: {e}"))?;
                let counts = count_admissible(&c.skew, &c.distinguished)
                    .map_err(|e| format!("n={n} N={modulus} m={m:?}: {e}"))?;
                let d = c.distinguished.vertices();
                for (i, src) in d.iter().enumerate() {
                    for (j, tgt) in d.iter().enumerate() {
                        let paths = enumerate_admissible(&c.skew, &c.distinguished, src, tgt)
                            .map_err(|e| format!("n={n} N={modulus} m={m:?}: {e}"))?;
                        let listed = Multiplicity::from(paths.len() as u64);
                        check(counts.get(i, j) == &listed, || {
                            format!(
                                "n={n} N={modulus} m={m:?} {src} -> {tgt}: DP {} vs {} paths",
                                counts.get(i, j),
                                paths.len()
                            )
                        })?;
                        pairs += 1;
                    }
                }
                instances += 1;
            }
        }
    }
    Ok(format!("{instances} instances, {pairs} vertex pairs agree"))
}

fn random_matrix(rng: &mut ChaCha8Rng, max_dim: usize) -> IntegerMatrix {
    let rows = rng.gen_range(1..=max_dim);
    let cols = rng.gen_range(1..=max_dim);
    let entries: Vec<BigInt> = (0..rows * cols)
        .map(|_| BigInt::from(rng.gen_range(-10..=10i64)))
        .collect();
    IntegerMatrix::new(rows, cols, entries).expect("entry count matches")
}

fn snf_suite(rng: &mut ChaCha8Rng) -> Outcome {
    let start = Instant::now();
    let mut minor_checked = 0;
    for trial in 0..200 {
        let a = random_matrix(rng, 6);
        let snf = smith_normal_form(&a);
        let product = snf.left.mul(&a).and_then(|la| la.mul(&snf.right));
        check(product.as_ref() == Ok(&snf.diagonal), || {
            format!("trial {trial}: U A V != D for\n{a}")
        })?;
        check(snf.diagonal.is_diagonal(), || {
            format!("trial {trial}: D not diagonal")
        })?;
        for u in [&snf.left, &snf.right] {
            let det = u.determinant().map_err(|e| e.to_string())?;
            check(det.abs().is_one(), || {
                format!("trial {trial}: transform has det {det}")
            })?;
        }
        let factors = snf.invariant_factors();
        check(factors.iter().all(|d| d.is_positive()), || {
            format!("trial {trial}: sign")
        })?;
        check(
            factors.windows(2).all(|w| w[1].is_multiple_of(&w[0])),
            || format!("trial {trial}: {factors:?} is not a divisibility chain"),
        )?;
        let tail_zero =
            (factors.len()..a.rows().min(a.cols())).all(|i| snf.diagonal[(i, i)].is_zero());
        check(tail_zero, || format!("trial {trial}: zeros interleaved"))?;
        let transposed = smith_normal_form(&a.transpose()).invariant_factors();
        check(transposed == factors, || {
            format!("trial {trial}: transpose changes factors")
        })?;

        if a.rows() <= 4 && a.cols() <= 4 {
            let size = a.rows().min(a.cols());
            let deltas = minor_gcds(&a, size).map_err(|e| e.to_string())?;
            let mut expected = Vec::with_capacity(size);
            let mut running = BigInt::one();
            for i in 0..size {
                running *= factors.get(i).cloned().unwrap_or_else(BigInt::zero);
                expected.push(running.clone());
            }
            check(deltas == expected, || {
                format!("trial {trial}: minor gcds {deltas:?} vs factor products {expected:?}")
            })?;
            minor_checked += 1;
        }
    }
    within(start, Duration::from_secs(5))?;
    Ok(format!(
        "200 matrices, {minor_checked} minor-gcd comparisons in {:?}",
        start.elapsed()
    ))
}

fn weighted_projective_lines() -> Outcome {
    for m0 in 1..=12u64 {
        for m1 in 1..=12u64 {
            let g = wp1_graph(m0, m1).map_err(|e| e.to_string())?;
            let kt = graph_k_theory(&g);
            let rank = 1 + (m1 / m0.gcd(&m1)) as usize;
            check(
                kt.k0 == AbelianGroup::free(rank) && kt.k1.is_trivial(),
                || format!("WP({m0},{m1}): {kt}, expected K0 = Z^{rank}, K1 = 0"),
            )?;
            check(g.is_acyclic(), || format!("W_1({m0},{m1}) has a cycle"))?;
            let wp = wp_k_theory(&weights(&[m0, m1])).map_err(|e| e.to_string())?;
            check(wp.af == Some(true) && wp.k_theory == kt, || {
                format!("WP({m0},{m1}): flag {:?}, groups {}", wp.af, wp.k_theory)
            })?;
        }
    }
    Ok("144 weight pairs give (Z^{1+m1/g}, 0), all AF".into())
}

fn weighted_projective_spaces() -> Outcome {
    let good: [&[u64]; 10] = [
        &[1, 2, 3],
        &[2, 3, 4],
        &[1, 1, 1],
        &[3, 5, 7],
        &[4, 9, 25],
        &[2, 3, 4, 5],
        &[1, 6, 10, 15],
        &[6, 35, 4, 9],
        &[1, 2, 3, 4, 5],
        &[5, 7, 11, 13, 17],
    ];
    let bad: [(&[u64], usize); 5] = [
        (&[2, 4, 3], 1),
        (&[6, 10, 15], 1),
        (&[3, 5, 15], 2),
        (&[2, 3, 6], 2),
        (&[2, 3, 5, 30], 3),
    ];
    for m in good {
        let w = weights(m);
        check(wp_hypothesis(&w).holds, || {
            format!("{m:?} should satisfy the hypothesis")
        })?;
        let kt = wp_k_theory(&w).map_err(|e| format!("{m:?}: {e}"))?;
        let rank = 1 + m[1..].iter().sum::<u64>() as usize;
        check(
            kt.k_theory.k0 == AbelianGroup::free(rank) && kt.k_theory.k1.is_trivial(),
            || format!("{m:?}: {}, expected K0 = Z^{rank}, K1 = 0", kt.k_theory),
        )?;
        let n = m.len() - 1;
        let listed: Vec<usize> = kt.steps.iter().map(|s| s.n).collect();
        check(listed == (2..=n).rev().collect::<Vec<_>>(), || {
            format!("{m:?}: steps {listed:?}")
        })?;
        for step in &kt.steps {
            let upper = wp_k_theory(&weights(&m[..=step.n])).map_err(|e| e.to_string())?;
            let lower = wp_k_theory(&weights(&m[..step.n])).map_err(|e| e.to_string())?;
            let diff = upper.k_theory.k0.free_rank() - lower.k_theory.k0.free_rank();
            check(
                diff as u64 == m[step.n] && step.ideal_copies == m[step.n],
                || {
                    format!(
                        "{m:?} step {}: rank difference {diff}, m_n = {}",
                        step.n, m[step.n]
                    )
                },
            )?;
        }
    }
    for (m, j) in bad {
        let got = wp_k_theory(&weights(m));
        check(got == Err(WprojError::HypothesisNotSatisfied { j }), || {
            format!("{m:?}: expected failure at j = {j}, got {got:?}")
        })?;
    }
    Ok("10 admissible vectors match, 5 violating vectors refused".into())
}

fn beta_residues() -> Outcome {
    for k in 1..=50u64 {
        for l in 1..=50u64 {
            let p = K7Parameters::new(k, l);
            let kb = BigInt::from(k);
            let six_beta = p.beta.mod_floor(&kb) * 6u32;
            check(six_beta.is_multiple_of(&kb), || {
                format!(
                    "k={k} l={l}: beta mod k = {} is not a multiple of k/6",
                    p.beta.mod_floor(&kb)
                )
            })?;
            if k % 2 == 0 {
                let half = BigInt::from(k / 2);
                let r = p.beta.mod_floor(&half);
                check((&r * 6u32).is_multiple_of(&kb), || {
                    format!("k={k} l={l}: beta mod k/2 = {r} is not a multiple of k/6")
                })?;
            }
        }
    }
    Ok("2500 (k, l) pairs, all residues in the listed classes".into())
}

fn main() -> ExitCode {
    let mut rng = ChaCha8Rng::seed_from_u64(0x51ea_2024);
    let criteria: Vec<(&str, Outcome)> = vec![
        ("multiplicity formulas", multiplicity_formulas()),
        ("K0 tables", k0_tables()),
        ("sphere consistency", sphere_consistency(&mut rng)),
        ("coprime degeneration", coprime_degeneration(&mut rng)),
        ("top-level vertex count", top_level_count(&mut rng)),
        ("counting vs enumeration", counting_matches_enumeration()),
        ("Smith normal form", snf_suite(&mut rng)),
        ("weighted projective lines", weighted_projective_lines()),
        ("weighted projective spaces", weighted_projective_spaces()),
        ("beta residues", beta_residues()),
    ];
    let mut failed = 0;
    for (i, (name, outcome)) in criteria.iter().enumerate() {
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
