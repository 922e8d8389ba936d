//! Acceptance criteria 1–9. Runs without the libtest harness so each
//! criterion prints exactly one PASS/FAIL line with its time budget.
//!
//! Run alone with `cargo test -p robust-coin --test acceptance`.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use robust_coin::arith::{make_algebraic, FieldElement, NumberField, Polynomial, Rational};
use robust_coin::construction::{
    approximate_hypermatrix, build_trilinear, construct_for_algebraic, cooperative_substitution, shift_scale,
    ConstructOptions, Stage, DEFAULT_BINARY_CAP, DEFAULT_REFINE_CAP,
};
use robust_coin::hypermatrix::json::Protocol;
use robust_coin::hypermatrix::{
    check_mystery, check_robust_binary, find_mystery_value_2d, rational_vector, Hypermatrix, MysteryCertificate,
};
use robust_coin::majority::{coloring_census, required_depth, synthesize_majority, MajorityTree, DEFAULT_MAX_TRIALS};
use robust_coin::rng::{trial_rng, uniform_below};
use robust_coin::sim::{
    compose_robust, exact_bias_under_adversary, flip_sample, group_simulate, independence_check, AdversaryConfig,
    GroupProtocol, JointDistribution,
};

type Check = Result<(), String>;

fn r(n: i64, d: i64) -> Rational {
    BigRational::new(n.into(), d.into())
}

fn ensure(cond: bool, msg: impl Into<String>) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// `|freq − p| ≤ 4σ` with `σ = √(p(1−p)/n)`.
fn within_4_sigma(heads: u64, n: u64, p: f64) -> bool {
    let sigma = (p * (1.0 - p) / n as f64).sqrt();
    (heads as f64 / n as f64 - p).abs() <= 4.0 * sigma
}

fn q() -> robust_coin::arith::FieldRef {
    NumberField::rationals()
}

/// Evaluates `A(x₁, …, x_p)` by a plain loop over all entries.
fn brute_evaluate(a: &Hypermatrix, xs: &[Vec<Rational>]) -> Rational {
    let f = a.format();
    let mut total = Rational::zero();
    let mut idx = vec![0usize; f.len()];
    for e in a.entries() {
        let mut term = e.as_rational().expect("rational entry");
        for (ax, &i) in idx.iter().enumerate() {
            term *= &xs[ax][i];
        }
        total += term;
        for ax in (0..f.len()).rev() {
            idx[ax] += 1;
            if idx[ax] < f[ax] {
                break;
            }
            idx[ax] = 0;
        }
    }
    total
}

fn criterion_1() -> Check {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/die_coin.json");
    let p = Protocol::from_json_str(&std::fs::read_to_string(path).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let a = &p.hypermatrix;
    let coin = vec![r(1, 2), r(1, 2)];
    let fair = vec![r(1, 6); 6];
    let skewed = vec![r(1, 12), r(1, 10), r(1, 6), r(1, 4), r(1, 15), r(1, 3)];
    ensure(skewed.iter().sum::<Rational>() == Rational::one(), "miscalibrated die is a distribution")?;
    for die in [&fair, &skewed] {
        let lib = a
            .evaluate(&[rational_vector(&q(), die), rational_vector(&q(), &coin)])
            .map_err(|e| e.to_string())?;
        ensure(lib.as_rational() == Some(r(1, 2)), format!("library evaluation {lib}"))?;
        let oracle = brute_evaluate(a, &[die.clone(), coin.clone()]);
        ensure(oracle == r(1, 2), format!("loop evaluation {oracle}"))?;
    }
    let cert = p.certificate.ok_or("fixture has a certificate")?;
    ensure(check_mystery(a, &cert).map_err(|e| e.to_string())?.is_valid(), "fixture certificate")
}

fn criterion_2() -> Check {
    let g = GroupProtocol::new(5, 2, [0, 1]).map_err(|e| e.to_string())?;
    let real = g.realize(1000).map_err(|e| e.to_string())?;
    // Heads iff (i + j) mod 5 ∈ {0, 1}: the count of heads cells is 10 of 25.
    let heads_cells = real.a.entries().iter().filter(|e| e.is_one()).count();
    ensure(heads_cells == 10, format!("{heads_cells} heads cells"))?;
    ensure(check_robust_binary(&real.a, &real.cert).map_err(|e| e.to_string())?, "robust binary check")?;
    ensure(independence_check(5, 2, 1000).map_err(|e| e.to_string())?, "independence over 25 outcomes")?;
    let n = 100_000;
    let s = group_simulate(5, 2, n, 20_240_501);
    let heads = s.heads(&BTreeSet::from([0, 1]));
    ensure(within_4_sigma(heads, n, 0.4), format!("group simulation: {heads}/{n}"))?;
    let flips = flip_sample(&real.a, &real.cert, n, 20_240_502).map_err(|e| e.to_string())?;
    ensure(within_4_sigma(flips.heads, n, 0.4), format!("hypermatrix flips: {}/{n}", flips.heads))
}

fn criterion_3() -> Check {
    let f = Polynomial::from_ints(&[-1, 1, 1]);
    let alpha = make_algebraic(f, r(0, 1), r(1, 1)).map_err(|e| e.to_string())?;
    let c = construct_for_algebraic(&alpha, Stage::RationalEntries, &ConstructOptions::default())
        .map_err(|e| e.to_string())?;
    ensure(c.a.arity() == 3, "three axes")?;
    let entries = c.a.rational_entries().ok_or("entries are rational")?;
    ensure(
        entries.iter().all(|e| !e.is_negative() && *e <= Rational::one()),
        "entries in [0, 1]",
    )?;
    let field = c.cert.field().clone();
    ensure(field.degree() == 2 && field.minpoly() == &Polynomial::from_ints(&[-1, 1, 1]), "field ℚ[x]/(x²+x−1)")?;
    ensure(c.cert.alpha == FieldElement::generator(&field), "α is the field generator")?;
    ensure(c.cert.is_stochastic(), "betas are probability vectors")?;
    ensure(check_mystery(&c.a, &c.cert).map_err(|e| e.to_string())?.is_valid(), "library residual check")?;

    // Independent residuals: one pass over the entries accumulating every
    // axis functional at once.
    let fmt = c.a.format().to_vec();
    let zero = FieldElement::zero(&field);
    let mut functionals: Vec<Vec<FieldElement>> = fmt.iter().map(|&n| vec![zero.clone(); n]).collect();
    let b = &c.cert.betas;
    let mut idx = [0usize; 3];
    for e in c.a.entries() {
        let e = e.in_field(&field).map_err(|e| e.to_string())?;
        if !e.is_zero() {
            let (x0, x1, x2) = (&b[0][idx[0]], &b[1][idx[1]], &b[2][idx[2]]);
            functionals[0][idx[0]] = &functionals[0][idx[0]] + &(&e * &(x1 * x2));
            functionals[1][idx[1]] = &functionals[1][idx[1]] + &(&e * &(x0 * x2));
            functionals[2][idx[2]] = &functionals[2][idx[2]] + &(&e * &(x0 * x1));
        }
        for ax in (0..3).rev() {
            idx[ax] += 1;
            if idx[ax] < fmt[ax] {
                break;
            }
            idx[ax] = 0;
        }
    }
    for (j, fj) in functionals.iter().enumerate() {
        for (k, v) in fj.iter().enumerate() {
            // Betas have mass one, so the expected functional is α.
            ensure((v - &c.cert.alpha).is_zero(), format!("residual on axis {j}, index {k}"))?;
        }
    }
    Ok(())
}

fn criterion_4() -> Check {
    let k = NumberField::new(&robust_coin::arith::AlgebraicNumber::from_rational(r(2, 5)));
    let one = vec![FieldElement::one(&k)];
    let build = build_trilinear(&[vec![r(2, 5)]], &k, &one, &one, &BigInt::from(2)).map_err(|e| e.to_string())?;
    // Entry-scan oracle for the shift and scale.
    let e = build.a.rational_entries().ok_or("rational build")?;
    let min = e.iter().min().cloned().ok_or("nonempty")?;
    let max = e.iter().max().cloned().ok_or("nonempty")?;
    let mut shift = 0i64;
    while min.clone() + Rational::from_integer(shift.into()) < Rational::zero() {
        shift += 1;
    }
    let mut scale = 1i64;
    while max.clone() + Rational::from_integer(shift.into()) > Rational::from_integer(scale.into()) {
        scale += 1;
    }
    ensure((shift, scale) == (2, 4), format!("oracle r = {shift}, s = {scale}"))?;
    let ss = shift_scale(&build.a, &build.cert).map_err(|e| e.to_string())?;
    ensure(ss.r == BigInt::from(2) && ss.s == BigInt::from(4), "shift_scale r = 2, s = 4")?;
    ensure(ss.cert.alpha.as_rational() == Some(r(3, 5)), "α = 3/5 after shift_scale")?;
    let approx = approximate_hypermatrix(&ss.a, &ss.cert, &r(1, 10), DEFAULT_REFINE_CAP).map_err(|e| e.to_string())?;
    let entries = approx.a.rational_entries().ok_or("rational entries")?;
    ensure(
        entries.iter().all(|x| *x >= r(1, 2) && *x <= r(7, 10)),
        "entries within [1/2, 7/10]",
    )?;
    ensure(approx.cert.alpha.as_rational() == Some(r(3, 5)), "approximated α = 3/5")?;
    ensure(
        check_mystery(&approx.a, &approx.cert).map_err(|e| e.to_string())?.is_valid(),
        "approximated certificate",
    )
}

fn criterion_5() -> Check {
    let a = Hypermatrix::from_rationals(vec![2, 2], vec![r(1, 2), r(0, 1), r(0, 1), r(1, 2)]).map_err(|e| e.to_string())?;
    let half = rational_vector(&q(), &[r(1, 2), r(1, 2)]);
    let cert = MysteryCertificate::new(FieldElement::from_rational(&q(), r(1, 4)), vec![half.clone(), half])
        .map_err(|e| e.to_string())?;
    // Oracle: the mystery-value of a 2×2 matrix with uniform vectors is the
    // average entry when both line averages agree.
    ensure(brute_evaluate(&a, &[vec![r(1, 2); 2], vec![r(1, 2); 2]]) == r(1, 4), "α = 1/4")?;
    let (b, bc) = cooperative_substitution(&a, &cert, None, DEFAULT_BINARY_CAP).map_err(|e| e.to_string())?;
    ensure(b.is_binary(), "entries in {0, 1}")?;
    ensure(check_mystery(&b, &bc).map_err(|e| e.to_string())?.is_valid(), "binary certificate")?;
    ensure(check_robust_binary(&b, &bc).map_err(|e| e.to_string())?, "single-axis robustness")?;
    // Every basis substitution on either axis, evaluated by brute force.
    let betas: Vec<Vec<Rational>> = bc.betas.iter().map(|v| v.iter().map(|x| x.as_rational().unwrap()).collect()).collect();
    for ax in 0..2 {
        for k in 0..b.format()[ax] {
            let mut xs = betas.clone();
            xs[ax] = (0..b.format()[ax]).map(|i| if i == k { r(1, 1) } else { r(0, 1) }).collect();
            ensure(brute_evaluate(&b, &xs) == r(1, 4), format!("axis {ax} basis {k}"))?;
        }
    }
    Ok(())
}

/// Recursive evaluation of a ternary tree, independent of the library.
fn eval_tree(coloring: &[usize], input: &[bool]) -> bool {
    if coloring.len() == 1 {
        return input[coloring[0] - 1];
    }
    let k = coloring.len() / 3;
    (0..3).filter(|&i| eval_tree(&coloring[i * k..(i + 1) * k], input)).count() >= 2
}

fn oracle_depth(p: i64) -> usize {
    let f = |x: &Rational| x * x * (r(3, 1) - r(2, 1) * x);
    let t: i64 = (0..(p + 1) / 2).fold(1, |acc, i| acc * (p - i) / (i + 1));
    let threshold = r(1, 1) - r(1, t);
    let mut x = r(p + 1, 2 * p);
    let mut n = 0;
    while x <= threshold {
        x = f(&x);
        n += 1;
    }
    n
}

fn criterion_6() -> Check {
    ensure(oracle_depth(3) == 1 && oracle_depth(5) == 5, "oracle depths 1 and 5")?;
    ensure(required_depth(3) == 1, format!("required_depth(3) = {}", required_depth(3)))?;
    ensure(required_depth(5) == 5, format!("required_depth(5) = {}", required_depth(5)))?;
    let tree: MajorityTree = synthesize_majority(5, 20_240_506, DEFAULT_MAX_TRIALS).map_err(|e| e.to_string())?;
    ensure(tree.depth == 5 && tree.coloring.len() == 243, "depth-5 tree")?;
    for x in 0u32..32 {
        let input: Vec<bool> = (0..5).map(|i| x >> i & 1 == 1).collect();
        let ones = input.iter().filter(|&&b| b).count();
        ensure(eval_tree(&tree.coloring, &input) == (ones >= 3), format!("input {x:05b}"))?;
    }
    let census = coloring_census(3, 1, &[true, true, false], 1000).map_err(|e| e.to_string())?;
    // Direct count over all 27 colorings.
    let direct = (0..27)
        .filter(|&c| eval_tree(&[c / 9 + 1, c / 3 % 3 + 1, c % 3 + 1], &[true, true, false]))
        .count();
    ensure(direct == 20, format!("direct census {direct}/27"))?;
    ensure(census == r(20, 27), format!("census {census}"))
}

/// Kernel of a rational matrix by Gauss–Jordan elimination.
fn oracle_kernel(m: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let rows = m.len();
    let cols = m[0].len();
    let mut a = m.to_vec();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let inv = a[row][col].recip();
        for x in a[row].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != row && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in 0..cols {
                    let d = &f * &a[row][j];
                    a[i][j] -= d;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Rational::zero(); cols];
            v[free] = Rational::one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[i][free].clone();
            }
            v
        })
        .collect()
}

/// A mass-one kernel vector, if any kernel vector has nonzero mass.
fn mass_one(kernel: Vec<Vec<Rational>>) -> Option<Vec<Rational>> {
    kernel.into_iter().find_map(|v| {
        let m: Rational = v.iter().sum();
        (!m.is_zero()).then(|| v.iter().map(|x| x / &m).collect())
    })
}

fn criterion_7() -> Check {
    let mut returned = 0;
    for seed in 0..240u64 {
        let mut rng = trial_rng(20_240_507, seed);
        let n = 1 + uniform_below(&mut rng, 4) as usize;
        let mut m: Vec<Vec<Rational>> = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| r(uniform_below(&mut rng, 9) as i64 - 4, 1 + uniform_below(&mut rng, 4) as i64))
                    .collect()
            })
            .collect();
        // Every fourth matrix is a cyclic-group protocol, which always has one.
        if seed % 4 == 0 {
            let k = uniform_below(&mut rng, n as u64 + 1) as usize;
            m = (0..n).map(|i| (0..n).map(|j| r(((i + j) % n < k) as i64, 1)).collect()).collect();
        }
        let Some(pair) = find_mystery_value_2d(&m) else {
            continue;
        };
        returned += 1;
        // Independent certificate: kernels of αJ − A and its transpose.
        let shifted: Vec<Vec<Rational>> = m.iter().map(|row| row.iter().map(|x| &pair.alpha - x).collect()).collect();
        let transposed: Vec<Vec<Rational>> = (0..n).map(|j| (0..n).map(|i| shifted[i][j].clone()).collect()).collect();
        let right = mass_one(oracle_kernel(&shifted)).ok_or(format!("seed {seed}: no mass-one right kernel"))?;
        let left = mass_one(oracle_kernel(&transposed)).ok_or(format!("seed {seed}: no mass-one left kernel"))?;
        let a = Hypermatrix::from_rationals(vec![n, n], m.concat()).map_err(|e| e.to_string())?;
        let cert = MysteryCertificate::new(
            FieldElement::from_rational(&q(), pair.alpha.clone()),
            vec![rational_vector(&q(), &left), rational_vector(&q(), &right)],
        )
        .map_err(|e| e.to_string())?;
        ensure(
            check_mystery(&a, &cert).map_err(|e| e.to_string())?.is_valid(),
            format!("seed {seed}: oracle certificate rejected"),
        )?;
        // leftᵀ·A·right equals α from either side; a second mystery-value
        // would have to equal it too.
        ensure(brute_evaluate(&a, &[left, right]) == pair.alpha, format!("seed {seed}: value mismatch"))?;
    }
    ensure(returned >= 60, format!("only {returned} matrices had a mystery-value"))
}

fn criterion_8() -> Check {
    let g = GroupProtocol::new(5, 2, [0, 1]).map_err(|e| e.to_string())?;
    let real = g.realize(1000).map_err(|e| e.to_string())?;
    let full = AdversaryConfig::point_mass(vec![0, 1], vec![0, 0]);
    let b = exact_bias_under_adversary(&real.a, &real.cert, &full).map_err(|e| e.to_string())?;
    ensure(b.as_rational() == Some(r(1, 1)), format!("full coalition bias {b}"))?;
    let mut rng = trial_rng(20_240_508, 0);
    for ax in 0..2 {
        for i in 0..5 {
            let adv = AdversaryConfig::point_mass(vec![ax], vec![i]);
            let b = exact_bias_under_adversary(&real.a, &real.cert, &adv).map_err(|e| e.to_string())?;
            ensure(b.as_rational() == Some(r(2, 5)), format!("axis {ax} point {i}: {b}"))?;
        }
        // A random full-support joint on the single axis.
        let w: Vec<i64> = (0..5).map(|_| 1 + uniform_below(&mut rng, 20) as i64).collect();
        let total: i64 = w.iter().sum();
        let adv = AdversaryConfig {
            coalition: vec![ax],
            joint: JointDistribution {
                outcomes: (0..5).map(|i| vec![i]).collect(),
                masses: w.iter().map(|&x| r(x, total)).collect(),
            },
        };
        let b = exact_bias_under_adversary(&real.a, &real.cert, &adv).map_err(|e| e.to_string())?;
        ensure(b.as_rational() == Some(r(2, 5)), format!("axis {ax} random joint: {b}"))?;
    }
    Ok(())
}

fn criterion_9() -> Check {
    let node = robust_coin::construction::rational_to_binary(1, 2, 3).map_err(|e| e.to_string())?;
    let tree = synthesize_majority(5, 20_240_509, DEFAULT_MAX_TRIALS).map_err(|e| e.to_string())?;
    let c = compose_robust(&node, &tree, 5, 2).map_err(|e| e.to_string())?;
    ensure(c.certificate.is_valid(), "compositional certificate")?;
    let n = 100_000;
    for player in 0..5 {
        let rep = c
            .monte_carlo(n, 20_240_509 + player as u64, &[(player, player % 2 == 0)])
            .map_err(|e| e.to_string())?;
        ensure(
            within_4_sigma(rep.heads, n, 0.5),
            format!("player {} pinned: {}/{n}", player + 1, rep.heads),
        )?;
    }
    Ok(())
}

fn main() {
    let criteria: [(&str, fn() -> Check, u64); 9] = [
        ("die×coin fixture evaluates to exactly 1/2", criterion_1, 1),
        ("ℤ/5 bias-2/5 protocol: robust, independent, sampled", criterion_2, 5),
        ("golden-ratio construction certified exactly", criterion_3, 60),
        ("approximation of the 2/5 trilinear build", criterion_4, 30),
        ("binary expansion of a 2×2 protocol with α = 1/4", criterion_5, 10),
        ("majority gates: depths, synthesis, census", criterion_6, 60),
        ("two-player mystery-values over random matrices", criterion_7, 30),
        ("robustness boundary for the 2/5 protocol", criterion_8, 1),
        ("composition p = 5, r = 2 with parity nodes", criterion_9, 60),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let result = result.and_then(|()| {
            ensure(
                elapsed < Duration::from_secs(*limit),
                format!("took {:.2}s, limit {limit}s", elapsed.as_secs_f64()),
            )
        });
        match result {
            Ok(()) => println!("criterion {}: PASS  {name} ({:.2}s < {limit}s)", i + 1, elapsed.as_secs_f64()),
            Err(e) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({:.2}s): {e}", i + 1, elapsed.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 9 acceptance criteria passed");
}
