//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::{BTreeSet, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use permuton_core::analysis::{
    certify_avoidance, cut_distance_bruteforce, density_monte_carlo, rect_distance_interval, sw_generate, SwMode,
};
use permuton_core::models::{
    build_zigzag, difference_quotients, is_involution_at_depth, prefix_pattern_count, sample_permutation, Direction,
    Permuton, StepPermuton,
};
use permuton_core::perm::{avoids, count_occurrences};
use permuton_core::rational::{q, qi, Rational};
use permuton_core::removal::{exact_removal, perturb, removal_experiment, resnap, PerturbationSpec, ResnapOptions};
use permuton_core::Permutation;

/// Frozen result of the exhaustive n = 12 generator run on the stripes model.
const SW_DISTINCT_N12: u64 = 4084;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn uniform_perm(n: usize, seed: u64) -> Permutation {
    sample_permutation(&Permuton::Uniform, n, seed).unwrap()
}

/// Occurrences by visiting every k-subset of positions in lexicographic order.
fn naive_occurrences(pattern: &[usize], text: &[usize]) -> u128 {
    let (k, n) = (pattern.len(), text.len());
    let mut idx: Vec<usize> = (0..k).collect();
    let mut count = 0;
    loop {
        let induced = (0..k).all(|a| (0..k).all(|b| (text[idx[a]] < text[idx[b]]) == (pattern[a] < pattern[b])));
        count += u128::from(induced);
        // next subset
        let mut i = k;
        loop {
            if i == 0 {
                return count;
            }
            i -= 1;
            if idx[i] < n - k + i {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn lis_quadratic(v: &[usize]) -> usize {
    let mut best = vec![1; v.len()];
    for i in 0..v.len() {
        for j in 0..i {
            if v[j] < v[i] {
                best[i] = best[i].max(best[j] + 1);
            }
        }
    }
    best.into_iter().max().unwrap_or(0)
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len().is_multiple_of(2) {
        (v[m - 1] + v[m]) / 2.0
    } else {
        v[m]
    }
}

fn model_file(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("models").join(name)
}

fn load_model(name: &str) -> Permuton {
    Permuton::from_json(&std::fs::read_to_string(model_file(name)).unwrap()).unwrap()
}

fn stripes() -> Permuton {
    Permuton::Tracks(build_zigzag(&Permutation::identity(3)).unwrap().transpose().unwrap())
}

fn counting() -> Outcome {
    for i in 0..500u64 {
        let n = 1 + (i as usize * 7) % 10;
        let k = (1 + i as usize % 4).min(n);
        let text = uniform_perm(n, 2 * i);
        let pattern = uniform_perm(k, 2 * i + 1);
        let got = count_occurrences(&pattern, &text).unwrap();
        let want = naive_occurrences(pattern.values(), text.values());
        check(got.occurrences == want, || {
            format!("{pattern} in {text}: {} vs naive {want}", got.occurrences)
        })?;
        check(got.total_subsets == binomial(n, k), || {
            format!("subset total for n={n}, k={k}")
        })?;
    }
    for seed in 0..20 {
        let text = uniform_perm(9, 1000 + seed);
        for k in 1..=4 {
            let total: u128 = Permutation::all(k)
                .iter()
                .map(|a| count_occurrences(a, &text).unwrap().occurrences)
                .sum();
            check(total == binomial(9, k), || {
                format!("densities of order {k} in {text} sum to {total}/{}", binomial(9, k))
            })?;
        }
    }
    Ok("500 pairs match the naive enumerator; densities of each order sum to 1".into())
}

fn zigzags() -> Outcome {
    let patterns: Vec<Permutation> = Permutation::all(3).into_iter().chain(Permutation::all(4)).collect();
    for sigma in &patterns {
        let z = build_zigzag(sigma).unwrap();
        check(certify_avoidance(sigma, &z).unwrap().certified, || {
            format!("{sigma} not certified")
        })?;
        let m = z.validate_marginals();
        check(m.x_ok && m.y_ok && m.max_deviation == qi(0), || {
            format!("{sigma} marginals off")
        })?;
    }
    Ok(format!(
        "{} patterns certified with exact uniform marginals",
        patterns.len()
    ))
}

fn molecules() -> Outcome {
    for k in 3..=5 {
        let z = build_zigzag(&Permutation::identity(k)).unwrap();
        let p = z.molecule_profile(Direction::Horizontal).unwrap();
        check(p.max_atoms == k - 1, || format!("k={k}: max atoms {}", p.max_atoms))?;
        check(p.histogram.get(&(k - 1)) == Some(&qi(1)), || {
            format!("k={k}: histogram {:?}", p.histogram)
        })?;
    }
    Ok("horizontal fibers of zigzag(identity_k) are (k-1)-molecules on full measure, k = 3, 4, 5".into())
}

fn monte_carlo() -> Outcome {
    let id3 = Permutation::identity(3);
    for seed in 0..5 {
        let e = density_monte_carlo(&id3, &stripes(), 1_000_000, seed).unwrap();
        check(e.hits == 0 && e.estimate == 0.0, || {
            format!("stripes seed {seed}: {} hits", e.hits)
        })?;
    }
    let mut worst = 5;
    for a in Permutation::all(3) {
        let inside = (0..5)
            .filter(|&seed| {
                let e = density_monte_carlo(&a, &Permuton::Uniform, 1_000_000, seed).unwrap();
                (e.estimate - 1.0 / 6.0).abs() <= e.ci_half_width
            })
            .count();
        check(inside >= 4, || {
            format!("uniform, pattern {a}: {inside} of 5 seeds within the interval")
        })?;
        worst = worst.min(inside);
    }
    Ok(format!("stripes: 0 hits in 5 x 10^6 samples; uniform: every order-3 pattern within the interval in >= {worst} of 5 seeds"))
}

/// Base-4 digits of `v` at `depth`, most significant first.
fn digits(mut v: u64, depth: u32) -> Vec<u8> {
    let mut d = vec![0u8; depth as usize];
    for slot in d.iter_mut().rev() {
        *slot = (v % 4) as u8;
        v /= 4;
    }
    d
}

fn undigits(d: &[u8]) -> u64 {
    d.iter().fold(0, |acc, &x| acc * 4 + x as u64)
}

fn f_digits(d: &[u8]) -> Vec<u8> {
    d.iter().map(|&x| [0, 2, 1, 3][x as usize]).collect()
}

fn digit_swap() -> Outcome {
    // (a) images of the 64 depth-3 prefixes, every increasing quadruple
    let img: Vec<u64> = (0..64).map(|v| undigits(&f_digits(&digits(v, 3)))).collect();
    let (mut tuples, mut hits) = (0u64, 0u64);
    for a in 0..64 {
        for b in a + 1..64 {
            for c in b + 1..64 {
                for d in c + 1..64 {
                    tuples += 1;
                    // 3142: f(x2) < f(x4) < f(x1) < f(x3)
                    if img[b] < img[d] && img[d] < img[a] && img[a] < img[c] {
                        hits += 1;
                    }
                }
            }
        }
    }
    check(tuples == 635_376 && hits == 0, || {
        format!("{hits} occurrences among {tuples} tuples")
    })?;
    let lib = prefix_pattern_count(3, &Permutation::new(vec![3, 1, 4, 2]).unwrap()).unwrap();
    check(lib.occurrences == 0 && lib.total_subsets == 635_376, || {
        "library scan disagrees".into()
    })?;

    // (b) quotients between points agreeing on the first n-1 digits
    let allowed: BTreeSet<Rational> = [q(-2, 1), q(-1, 1), q(-1, 2), q(1, 2), qi(1), qi(2)]
        .into_iter()
        .collect();
    let mut seen = BTreeSet::new();
    for depth in 1..=5u32 {
        for v in 0..4u64.pow(depth) {
            let dv = digits(v, depth);
            for i in [-3i64, -2, -1, 1, 2, 3] {
                let last = dv[depth as usize - 1] as i64 + i;
                if !(0..4).contains(&last) {
                    continue;
                }
                let mut dw = dv.clone();
                dw[depth as usize - 1] = last as u8;
                let (fv, fw) = (undigits(&f_digits(&dv)) as i64, undigits(&f_digits(&dw)) as i64);
                seen.insert(q(fv - fw, i));
            }
        }
    }
    check(seen.is_subset(&allowed), || format!("quotients {seen:?}"))?;
    check(seen == difference_quotients(5), || "library quotients disagree".into())?;

    // (c) involution on depth-6 strings
    let involution = (0..4u64.pow(6)).all(|v| {
        let d = digits(v, 6);
        f_digits(&f_digits(&d)) == d
    });
    check(involution && is_involution_at_depth(6), || {
        "not an involution at depth 6".into()
    })?;
    let shown: Vec<String> = seen.iter().map(|r| r.to_string()).collect();
    Ok(format!(
        "0 of 635376 quadruples show 3142; quotients {{{}}}; involution at depth 6",
        shown.join(", ")
    ))
}

fn removal_end_to_end() -> Outcome {
    let id3 = Permutation::identity(3);
    let model = load_model("stripes2.json");
    check(model == stripes(), || {
        "stripes2.json is not transpose(zigzag(123))".into()
    })?;
    let opts = ResnapOptions {
        pattern: Some(id3.clone()),
        ..Default::default()
    };
    let r = resnap(&id3, &model, &opts).unwrap();
    check(r.output.values() == [2, 1, 3] && r.cost == 2, || {
        format!("worked example gave {} cost {}", r.output, r.cost)
    })?;

    let rates = [q(1, 5), q(1, 10), q(1, 20), qi(0)];
    let seeds: Vec<u64> = (0..20).collect();
    let rows = removal_experiment(&id3, &model, &[500], &rates, &seeds).unwrap();
    check(rows.len() == 80, || format!("{} rows", rows.len()))?;
    for row in &rows {
        // rebuild the output and check it with the quadratic LIS
        let sample = sample_permutation(&model, 500, row.seed).unwrap();
        let pi = perturb(&sample, &PerturbationSpec::new(row.rho.clone(), row.seed).unwrap());
        let out = resnap(&pi, &model, &ResnapOptions::default()).unwrap();
        check(out.cost == row.cost, || {
            format!("row rho={} seed={} not reproducible", row.rho, row.seed)
        })?;
        check(lis_quadratic(out.output.values()) < 3, || {
            format!("rho={} seed={} contains 123", row.rho, row.seed)
        })?;
        check(row.avoidance_verified == Some(true), || "row not verified".into())?;
    }
    let medians: Vec<f64> = rates
        .iter()
        .map(|rho| {
            median(
                rows.iter()
                    .filter(|r| &r.rho == rho)
                    .map(|r| r.normalized_cost)
                    .collect(),
            )
        })
        .collect();
    check(medians.windows(2).all(|w| w[1] <= w[0]), || {
        format!("medians {medians:?}")
    })?;
    check(medians[3] < medians[0], || format!("medians {medians:?}"))?;
    Ok(format!(
        "worked example (2,1,3) cost 2; n=500, 80 rows avoid 123; median normalized cost {:.5} {:.5} {:.5} {:.5} for rho 0.2 0.1 0.05 0",
        medians[0], medians[1], medians[2], medians[3]
    ))
}

fn oracle_dominance() -> Outcome {
    let patterns = Permutation::all(3);
    let mut zero = 0;
    for i in 0..200u64 {
        let a = &patterns[i as usize % 6];
        let pi = uniform_perm(6 + i as usize % 3, 5000 + i);
        let exact = exact_removal(a, &pi).unwrap();
        let snapped = resnap(
            &pi,
            &Permuton::Tracks(build_zigzag(a).unwrap()),
            &ResnapOptions::default(),
        )
        .unwrap();
        check(exact.cost <= snapped.cost, || {
            format!("{a} {pi}: exact {} > resnap {}", exact.cost, snapped.cost)
        })?;
        let free = naive_occurrences(a.values(), pi.values()) == 0;
        check((exact.cost == 0) == free, || {
            format!("{a} {pi}: cost {} but avoids = {free}", exact.cost)
        })?;
        check(avoids(a, &exact.output).unwrap(), || {
            format!("{a} {pi}: exact output contains the pattern")
        })?;
        zero += usize::from(free);
    }
    Ok(format!(
        "200 instances, exact <= resnap everywhere; {zero} already avoiding, all at cost 0"
    ))
}

fn stanley_wilf() -> Outcome {
    let model = load_model("stripes2.json");
    let id3 = Permutation::identity(3);
    let r = sw_generate(&model, 12, SwMode::Exhaustive, Some(&id3)).unwrap();
    let again = sw_generate(&model, 12, SwMode::Exhaustive, Some(&id3)).unwrap();
    check(r == again, || "two runs differ".into())?;

    // at x = (2i-1)/24 the two tracks sit at (25-2i)/48 and (49-2i)/48
    for i in 1..=12i64 {
        let heights: Vec<Rational> = model
            .fiber_at(&q(2 * i - 1, 24))
            .unwrap()
            .atoms()
            .iter()
            .map(|a| a.y.clone())
            .collect();
        check(heights == vec![q(25 - 2 * i, 48), q(49 - 2 * i, 48)], || {
            format!("fiber {i}: {heights:?}")
        })?;
    }
    let mut distinct = HashSet::new();
    for mask in 0u32..4096 {
        let h: Vec<i64> = (1..=12i64)
            .map(|i| {
                if mask >> (i - 1) & 1 == 0 {
                    25 - 2 * i
                } else {
                    49 - 2 * i
                }
            })
            .collect();
        let mut sorted = h.clone();
        sorted.sort_unstable();
        let p: Vec<usize> = h.iter().map(|y| sorted.binary_search(y).unwrap() + 1).collect();
        check(lis_quadratic(&p) < 3, || format!("choice {mask:#x} gives {p:?}"))?;
        distinct.insert(p);
    }
    check(r.per_choice_total == 4096 && r.valid_choices == 4096, || {
        format!("{r:?}")
    })?;
    check(r.all_avoiding == Some(true), || {
        "a generated permutation contains 123".into()
    })?;
    check(r.distinct_count == distinct.len() as u64, || {
        format!("{} vs oracle {}", r.distinct_count, distinct.len())
    })?;
    check(r.distinct_count == SW_DISTINCT_N12, || {
        format!("distinct count {} changed", r.distinct_count)
    })?;
    Ok(format!(
        "4096 choices, {} distinct avoiders, 12th root {:.5}",
        r.distinct_count, r.nth_root
    ))
}

fn distances() -> Outcome {
    let step = |v: Vec<usize>| StepPermuton::new(Permutation::new(v).unwrap());
    let (a, b) = (step(vec![1, 2]), step(vec![2, 1]));
    let d = rect_distance_interval(&Permuton::Step(a.clone()), &Permuton::Step(b.clone())).unwrap();
    check(d.value == q(1, 2), || format!("(1,2) vs (2,1): {}", d.value))?;

    let lcm = |x: usize, y: usize| {
        let g = (1..=x.min(y))
            .rev()
            .find(|&d| x.is_multiple_of(d) && y.is_multiple_of(d))
            .unwrap();
        x / g * y
    };
    let (mut pairs, mut seed) = (0, 0u64);
    while pairs < 50 {
        let (m, n) = (1 + (seed * 3 % 10) as usize, 1 + (seed * 7 % 10) as usize);
        seed += 1;
        if lcm(m, n) > 14 {
            continue;
        }
        let (sa, sb) = (
            StepPermuton::new(uniform_perm(m, 9000 + seed)),
            StepPermuton::new(uniform_perm(n, 9500 + seed)),
        );
        let interval = rect_distance_interval(&Permuton::Step(sa.clone()), &Permuton::Step(sb.clone())).unwrap();
        let cut = cut_distance_bruteforce(&sa, &sb).unwrap();
        check(cut.value >= interval.value, || {
            format!("orders {m},{n}: cut {} < interval {}", cut.value, interval.value)
        })?;
        for s in [&sa, &sb] {
            let zero_i = rect_distance_interval(&Permuton::Step(s.clone()), &Permuton::Step(s.clone())).unwrap();
            let zero_c = cut_distance_bruteforce(s, s).unwrap();
            check(zero_i.value == qi(0) && zero_c.value == qi(0), || {
                "non-zero self distance".into()
            })?;
        }
        pairs += 1;
    }
    Ok("(1,2) vs (2,1) = 1/2; cut >= interval on 50 pairs; self distances 0".into())
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let perm = dir.path().join("pi.txt");
    std::fs::write(&perm, "5 3 1 4 2 8 6 7\n").unwrap();
    let (p, m) = (perm.to_str().unwrap().to_owned(), |n: &str| {
        model_file(n).to_str().unwrap().to_owned()
    });
    let matrix: Vec<Vec<String>> = [
        vec!["count", "--pattern", "213", "--perm", &p],
        vec![
            "density",
            "--pattern",
            "21",
            "--model",
            &m("stripes2.json"),
            "--samples",
            "200000",
            "--seed",
            "7",
        ],
        vec![
            "density",
            "--pattern",
            "132",
            "--model",
            &m("uniform.json"),
            "--samples",
            "100000",
            "--format",
            "json",
        ],
        vec![
            "certify",
            "--pattern",
            "123",
            "--model",
            &m("stripes2.json"),
            "--format",
            "json",
        ],
        vec!["certify", "--pattern", "123", "--model", &m("nonavoiding.json")],
        vec![
            "removal",
            "--pattern",
            "123",
            "--model",
            &m("stripes2.json"),
            "--n",
            "60,120",
            "--rho",
            "0.1,0",
            "--seeds",
            "3",
        ],
        vec![
            "removal",
            "--pattern",
            "123",
            "--model",
            &m("stripes2.json"),
            "--perm",
            &p,
            "--x-mode",
            "random",
            "--seed",
            "4",
            "--format",
            "json",
        ],
        vec!["sample", "--model", &m("zigzag_id3.json"), "--n", "50", "--seed", "11"],
        vec!["sample", "--model", &m("digit_swap.json"), "--n", "30", "--seed", "2"],
        vec!["distance", "--a", &m("step_2413.json"), "--b", &m("stripes2.json")],
        vec!["lp", "--model", &m("zigzag_id3.json"), "--grid", "6"],
        vec![
            "swbound",
            "--model",
            &m("stripes2.json"),
            "--n",
            "14",
            "--trials",
            "500",
            "--seed",
            "3",
        ],
        vec!["molecules", "--model", &m("stripes2.json"), "--format", "json"],
        vec!["marginals", "--model", &m("nonavoiding.json")],
        vec!["zigzag", "--pattern", "2413", "--transpose"],
        vec!["digitswap-check", "--depth", "2"],
    ]
    .iter()
    .map(|v| v.iter().map(|s| s.to_string()).collect())
    .collect();
    for args in &matrix {
        let go = || {
            Command::new(env!("CARGO_BIN_EXE_permuton"))
                .args(args)
                .output()
                .unwrap()
        };
        let (x, y) = (go(), go());
        check(
            x.stdout == y.stdout && x.stderr == y.stderr && x.status == y.status,
            || format!("`{}` differs between runs", args.join(" ")),
        )?;
        check(!x.stdout.is_empty(), || format!("`{}` printed nothing", args.join(" ")))?;
    }
    Ok(format!("{} invocations byte-identical across two runs", matrix.len()))
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome, u64);
    let criteria: [Criterion; 10] = [
        ("exact counting", counting, 10),
        ("zigzag certification", zigzags, 60),
        ("molecule optimality", molecules, 5),
        ("Monte Carlo consistency", monte_carlo, 60),
        ("digit-swap", digit_swap, 30),
        ("removal end-to-end", removal_end_to_end, 120),
        ("oracle dominance", oracle_dominance, 120),
        ("Stanley-Wilf generator", stanley_wilf, 60),
        ("distances", distances, 60),
        ("CLI determinism", determinism, 120),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(_) if took > Duration::from_secs(limit) => Err(format!("took {took:.1?}, limit {limit} s")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{took:.1?}, limit {limit} s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{took:.1?}]", i + 1);
            }
        }
    }
    println!("{} of 10 acceptance criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
