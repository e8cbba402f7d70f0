//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any fails.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;

use tfkit::extension::{
    bound_certificate, extend_signed, lemma1_partition, norm_preservation_counterexample, series_decompose,
    uniqueness_probe_strong, verify_extension_properties, Clause, DecompositionShift, JordanExtension,
    PositivePartOnly, SeriesRepresentation, SeriesTerm, VectorExtension,
};
use tfkit::measure::{total_variation, AtomSet, BanachSpace, MeasurableSpace, Norm, PositiveMeasure, VectorMeasure};
use tfkit::ring::{empty_representation_check, ring_closure, RingSetFunction};
use tfkit::sample;
use tfkit::transfunction::{replay, NormMethod, SamplerConfig, Transfunction, Verdict, Witness};

const SUITE_BUDGET: Duration = Duration::from_secs(300);

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let start = Instant::now();
    let criteria: [Criterion; 10] = [
        ("variation matches partition supremum", variation_oracle),
        ("variation is additive and monotone", variation_is_a_measure),
        ("representations of the empty set sum to zero", empty_representations),
        ("simultaneous step approximation", step_approximation),
        ("series decomposition round trip", series_round_trip),
        ("property transfer to the signed extension", property_transfer),
        ("norm preservation counterexample", norm_counterexample),
        ("vector extension is well defined and bounded", vector_extension),
        ("uniqueness probes", uniqueness),
        ("cli determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = run();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({secs:.2}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} ({secs:.2}s)", i + 1);
            }
        }
    }
    let total = start.elapsed();
    if total < SUITE_BUDGET {
        println!("PASS    suite runtime {:.2}s under {}s", total.as_secs_f64(), SUITE_BUDGET.as_secs());
    } else {
        failed += 1;
        println!("FAIL    suite runtime {:.2}s over {}s", total.as_secs_f64(), SUITE_BUDGET.as_secs());
    }
    if failed > 0 {
        println!("{failed} acceptance check(s) failed");
        std::process::exit(1);
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn atomic(n: usize) -> MeasurableSpace {
    MeasurableSpace::atomic(n).unwrap()
}

fn random_codomain(rng: &mut impl Rng) -> BanachSpace {
    let norm = Norm::ALL[rng.random_range(0..3)];
    BanachSpace::new(rng.random_range(1..=3), norm).unwrap()
}

fn mask_set(mask: u64) -> AtomSet {
    AtomSet::from_mask(mask)
}

/// Supremum of `Σ ||Σ_{a∈B} values[a]||` over every partition of `items`,
/// enumerated as restricted growth strings.
fn brute_force_variation(items: &[&[f64]], codomain: &BanachSpace) -> f64 {
    let n = items.len();
    if n == 0 {
        return 0.0;
    }
    let dim = codomain.dim();
    let mut labels = vec![0usize; n];
    let mut best = f64::NEG_INFINITY;
    loop {
        let blocks = labels.iter().max().unwrap() + 1;
        let mut sums = vec![vec![0.0; dim]; blocks];
        for (item, &b) in items.iter().zip(&labels) {
            for (s, x) in sums[b].iter_mut().zip(item.iter()) {
                *s += x;
            }
        }
        best = best.max(sums.iter().map(|s| codomain.norm(s)).sum());
        // next restricted growth string
        let mut i = n - 1;
        loop {
            if i == 0 {
                return best;
            }
            let cap = labels[..i].iter().max().unwrap() + 1;
            if labels[i] < cap {
                labels[i] += 1;
                labels[i + 1..].iter_mut().for_each(|l| *l = 0);
                break;
            }
            i -= 1;
        }
    }
}

fn variation_oracle() -> Outcome {
    let deadline = Duration::from_secs(30);
    let start = Instant::now();
    let mut rng = sample::rng(101);
    let mut sets = 0usize;
    let mut worst: f64 = 0.0;
    for k in 0..500 {
        let n = rng.random_range(1..=8);
        let omega = sample::vector(&atomic(n), random_codomain(&mut rng), 2.0, &mut rng);
        let tv = total_variation(&omega);
        for mask in 0..(1u64 << n) {
            let set = mask_set(mask);
            let items: Vec<&[f64]> = set.iter().map(|a| omega.value(a)).collect();
            let expected = brute_force_variation(&items, omega.codomain());
            let got = tv.measure_of(&set).unwrap();
            let err = (got - expected).abs();
            worst = worst.max(err);
            ensure(err <= 1e-12, || format!("instance {k}, set {mask:#b}: {got} vs oracle {expected}"))?;
            sets += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < deadline, || format!("took {:.2}s", elapsed.as_secs_f64()))?;
    Ok(format!("500 measures, {sets} atom sets, max error {worst:.1e}"))
}

fn variation_is_a_measure() -> Outcome {
    let mut rng = sample::rng(102);
    let mut assertions = 0usize;
    while assertions < 10_000 {
        let n = rng.random_range(1..=8);
        let omega = sample::vector(&atomic(n), random_codomain(&mut rng), 2.0, &mut rng);
        let tv = total_variation(&omega);
        let full = (1u64 << n) - 1;
        for _ in 0..25 {
            // a random disjoint family of up to four sets
            let parts = rng.random_range(2..=4);
            let mut family = vec![0u64; parts];
            for a in 0..n {
                let slot = rng.random_range(0..=parts);
                if slot < parts {
                    family[slot] |= 1 << a;
                }
            }
            let union = family.iter().fold(0, |u, m| u | m);
            let whole = tv.measure_of(&mask_set(union)).unwrap();
            let pieces: f64 = family.iter().map(|&m| tv.measure_of(&mask_set(m)).unwrap()).sum();
            ensure((whole - pieces).abs() <= 1e-12, || format!("additivity: {whole} vs {pieces}"))?;
            let sub = union & rng.random_range(0..=full);
            let inner = tv.measure_of(&mask_set(sub)).unwrap();
            ensure(inner <= whole + 1e-12, || format!("monotonicity: {inner} > {whole}"))?;
            ensure(inner >= 0.0, || format!("negative variation {inner}"))?;
            assertions += 3;
        }
    }
    Ok(format!("{assertions} assertions, zero violations"))
}

fn empty_representations() -> Outcome {
    let mut rng = sample::rng(103);
    let mut found = 0usize;
    let mut worst: f64 = 0.0;
    let mut ring_index = 0u64;
    while found < 200 {
        ring_index += 1;
        ensure(ring_index < 10_000, || format!("only {found} representations found"))?;
        let n = rng.random_range(2..=8);
        let ground = atomic(n);
        let generators: Vec<AtomSet> = (0..rng.random_range(1..=4))
            .map(|_| mask_set(rng.random_range(1..(1u64 << n))))
            .collect();
        let ring = ring_closure(&ground, &generators).map_err(|e| e.to_string())?;
        let codomain = random_codomain(&mut rng);
        let weights: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..codomain.dim()).map(|_| rng.random_range(-3.0..3.0)).collect())
            .collect();
        let f = RingSetFunction::induced(ring, codomain, &weights).map_err(|e| e.to_string())?;
        let report = empty_representation_check(&f, 5, ring_index, 8);
        for case in report.cases.iter().take(200 - found) {
            let rep = &case.representation;
            // independent validity check: every atom is covered net zero times
            let mut net = vec![0i64; n];
            let mut value = vec![0.0; codomain.dim()];
            for t in &rep.terms {
                for a in t.set.iter() {
                    net[a] += i64::from(t.sign);
                }
                let v = f.value(&t.set).ok_or("term outside the ring")?;
                for (acc, x) in value.iter_mut().zip(v) {
                    *acc += t.sign as f64 * x;
                }
            }
            ensure(net.iter().all(|&c| c == 0), || format!("{rep:?} is not a representation of the empty set"))?;
            let norm = codomain.norm(&value);
            worst = worst.max(norm);
            ensure(norm <= 1e-12, || format!("{rep:?} sums to {value:?}"))?;
            found += 1;
        }
    }
    Ok(format!("{found} representations over {ring_index} rings, max norm {worst:.1e}"))
}

fn step_approximation() -> Outcome {
    let mut rng = sample::rng(104);
    let mut worst_total: f64 = 0.0;
    let mut worst_recon: f64 = 0.0;
    for k in 0..200 {
        let n = [1, 2, 3, 5][rng.random_range(0..4)];
        let cells = [16, 64, 256][rng.random_range(0..3)];
        let eps = [0.1, 0.01, 0.001][rng.random_range(0..3)];
        let space = MeasurableSpace::grid(cells).unwrap();
        let scale = 10f64.powi(rng.random_range(-2..=2));
        let measures: Vec<PositiveMeasure> = (0..n).map(|_| sample::positive(&space, scale, &mut rng)).collect();
        let approx = lemma1_partition(&measures, eps).map_err(|e| e.to_string())?;
        let tag = || format!("instance {k} (n={n}, N={cells}, eps={eps})");
        for class in &approx.classes {
            ensure(class.coefficients.iter().all(|&c| c >= 0.0), || format!("{}: negative coefficient", tag()))?;
        }
        for (i, mu) in measures.iter().enumerate() {
            let kappa = &approx.remainders[i];
            ensure(kappa.mass().iter().all(|&m| m >= 0.0), || format!("{}: negative remainder", tag()))?;
            for a in 0..cells {
                // Σ_S α_{i,S} μ|_S(a) + κ_i(a), with μ = Σ_j μ_j recomputed here
                let reference: f64 = measures.iter().map(|m| m.mass()[a]).sum();
                let step = match approx.labels[a] {
                    Some(s) => {
                        ensure(approx.classes[s].atoms.contains(a), || format!("{}: atom {a} mislabelled", tag()))?;
                        approx.classes[s].coefficients[i] * reference
                    }
                    None => 0.0,
                };
                let err = (step + kappa.mass()[a] - mu.mass()[a]).abs();
                worst_recon = worst_recon.max(err);
                ensure(err <= 1e-12, || format!("{}: measure {i}, atom {a} off by {err:e}", tag()))?;
            }
        }
        let total: f64 = approx.remainders.iter().map(|k| k.total()).sum();
        ensure(total < eps, || format!("{}: remainders total {total}", tag()))?;
        worst_total = worst_total.max(total / eps);
    }
    Ok(format!(
        "200 instances, max reconstruction error {worst_recon:.1e}, max remainder/eps {worst_total:.3}"
    ))
}

fn series_round_trip() -> Outcome {
    let mut rng = sample::rng(105);
    let mut worst: f64 = 0.0;
    for k in 0..200 {
        let n = rng.random_range(1..=8);
        let codomain = random_codomain(&mut rng);
        let mut omega = sample::vector(&atomic(n), codomain, 2.0, &mut rng);
        if k % 2 == 1 {
            // repeat directions so grouping has something to merge
            let values: Vec<Vec<f64>> = (0..n)
                .map(|a| omega.value(a % 2).iter().map(|x| x * (1.0 + a as f64)).collect())
                .collect();
            omega = VectorMeasure::new(atomic(n), codomain, values).unwrap();
        }
        let rep = series_decompose(&omega, 1e-9).map_err(|e| e.to_string())?;
        for mask in 0..(1u64 << n) {
            let set = mask_set(mask);
            let mut direct = vec![0.0; codomain.dim()];
            for a in set.iter() {
                for (d, x) in direct.iter_mut().zip(omega.value(a)) {
                    *d += x;
                }
            }
            let mut via_series = vec![0.0; codomain.dim()];
            for term in rep.terms() {
                let m = term.measure.measure_of(&set).unwrap();
                for (s, v) in via_series.iter_mut().zip(&term.vector) {
                    *s += v * m;
                }
            }
            let err = direct.iter().zip(&via_series).fold(0.0f64, |e, (x, y)| e.max((x - y).abs()));
            worst = worst.max(err);
            ensure(err <= 1e-9, || format!("instance {k}, set {mask:#b}: off by {err:e}"))?;
        }
    }
    Ok(format!("200 instances, every atom set, max error {worst:.1e}"))
}

fn property_transfer() -> Outcome {
    let config = SamplerConfig::default().with_trials(200);
    let mut rng = sample::rng(106);
    let checked = [Clause::A, Clause::B, Clause::C, Clause::D, Clause::F, Clause::G, Clause::H];
    for k in 0..50 {
        let (rows, cols) = (rng.random_range(1..=6), rng.random_range(1..=6));
        let matrix = sample::stochastic_kernel(rows, cols, &mut rng);
        let phi = Transfunction::kernel(atomic(rows), atomic(cols), matrix).unwrap();
        let report = verify_extension_properties(&phi, &config.with_seed(k)).map_err(|e| e.to_string())?;
        for clause in checked {
            let e = report.clause(clause);
            ensure(e.observed == Verdict::HoldsOnSample && e.trials_run == 200, || {
                format!("kernel {k} ({rows}x{cols}), clause {}: {:?}", clause.label(), e.observed)
            })?;
        }
    }
    for k in 0..10 {
        let n = rng.random_range(1..=5);
        let m = n + rng.random_range(0..=3);
        let phi = Transfunction::pushforward(atomic(n), atomic(m), sample::injective_map(n, m, &mut rng)).unwrap();
        let report = verify_extension_properties(&phi, &config.with_seed(k)).map_err(|e| e.to_string())?;
        let e = report.clause(Clause::E);
        ensure(e.observed.holds(), || format!("injective pushforward {k}: {:?}", e.observed))?;
    }
    let spread = Transfunction::uniform_spread(atomic(3), MeasurableSpace::grid(4).unwrap());
    let report = verify_extension_properties(&spread, &config).map_err(|e| e.to_string())?;
    let e = report.clause(Clause::E);
    let Some(witness @ Witness::NormChange { measure }) = e.observed.witness() else {
        return Err(format!("uniform spread: expected a norm witness, got {:?}", e.observed));
    };
    let eval = |mu: &tfkit::measure::SignedMeasure| extend_signed(&spread, mu);
    ensure(replay(&eval, witness, 1e-9).unwrap_or(false), || "witness does not replay".into())?;
    let image = extend_signed(&spread, measure).unwrap();
    // the spread keeps only total mass, so |μ(X)| is the image norm
    let net: f64 = measure.mass().iter().sum();
    ensure((image.norm() - net.abs()).abs() <= 1e-12 && measure.norm() > net.abs() + 1e-9, || {
        format!("witness norms {} -> {}", measure.norm(), image.norm())
    })?;
    Ok(format!(
        "50 kernels x 7 clauses at T=200; 10 injective pushforwards keep norms; spread witness {:.3} -> {:.3}",
        measure.norm(),
        image.norm()
    ))
}

fn norm_counterexample() -> Outcome {
    let c = norm_preservation_counterexample();
    ensure(c.measure_norm == 2.0 && c.image_norm == 0.0, || {
        format!("got ({}, {})", c.measure_norm, c.image_norm)
    })?;
    let recomputed = extend_signed(&c.transfunction, &c.measure).map_err(|e| e.to_string())?;
    ensure(c.measure.norm() == 2.0 && recomputed.norm() == 0.0, || "recomputed norms differ".into())?;
    Ok("||mu|| = 2, ||extension(mu)|| = 0".into())
}

fn random_series(space: &MeasurableSpace, codomain: BanachSpace, rng: &mut impl Rng) -> SeriesRepresentation {
    let terms = (0..rng.random_range(1..=4))
        .map(|_| SeriesTerm {
            vector: (0..codomain.dim()).map(|_| rng.random_range(-2.0..2.0)).collect(),
            measure: sample::positive(space, 1.0, rng),
        })
        .collect();
    SeriesRepresentation::new(space.clone(), codomain, terms).unwrap()
}

/// Same vector measure, different terms: each term split along a random set,
/// plus a cancelling pair.
fn resplit(rep: &SeriesRepresentation, rng: &mut impl Rng) -> SeriesRepresentation {
    let space = rep.space();
    let side = mask_set(rng.random_range(0..(1u64 << space.count())));
    let other = side.complement(space.count());
    let mut terms = Vec::new();
    for t in rep.terms() {
        terms.push(SeriesTerm { vector: t.vector.clone(), measure: t.measure.restrict(&side).unwrap() });
        terms.push(SeriesTerm { vector: t.vector.clone(), measure: t.measure.restrict(&other).unwrap() });
    }
    let w: Vec<f64> = (0..rep.codomain().dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let nu = sample::positive(space, 1.0, rng);
    terms.push(SeriesTerm { vector: w.clone(), measure: nu.clone() });
    terms.push(SeriesTerm { vector: w.iter().map(|x| -x).collect(), measure: nu });
    terms.shuffle(rng);
    SeriesRepresentation::new(space.clone(), *rep.codomain(), terms).unwrap()
}

fn vector_extension() -> Outcome {
    let mut rng = sample::rng(108);
    let config = SamplerConfig::default();
    let mut worst_pair: f64 = 0.0;
    let mut worst_slack = f64::INFINITY;
    for k in 0..200 {
        let (rows, cols) = (rng.random_range(1..=5), rng.random_range(1..=5));
        let scale = rng.random_range(0.5..3.0);
        let matrix: Vec<Vec<f64>> = (0..rows)
            .map(|_| (0..cols).map(|_| rng.random_range(0.0..scale)).collect())
            .collect();
        let phi = Transfunction::kernel(atomic(rows), atomic(cols), matrix.clone()).unwrap();
        let ext = VectorExtension::new(phi, &config.with_seed(k)).map_err(|e| e.to_string())?;
        let norm = ext.operator_norm();
        ensure(norm.method == NormMethod::Exact, || format!("kernel {k}: norm method {:?}", norm.method))?;
        let expected_norm = matrix.iter().map(|r| r.iter().sum::<f64>()).fold(0.0, f64::max);
        ensure((norm.value - expected_norm).abs() <= 1e-12, || format!("kernel {k}: norm {}", norm.value))?;

        let codomain = random_codomain(&mut rng);
        let first = random_series(&atomic(rows), codomain, &mut rng);
        let second = if k % 2 == 0 {
            resplit(&first, &mut rng)
        } else {
            series_decompose(&first.evaluate(), 1e-9).map_err(|e| e.to_string())?
        };
        ensure(first != second, || format!("pair {k}: representations coincide"))?;
        let a = ext.extend(&first).map_err(|e| e.to_string())?;
        let b = ext.extend(&second).map_err(|e| e.to_string())?;

        // Σ_i v_i Φμ_i for a kernel is Σ_x ω(x) K[x][·]
        let mut omega = vec![vec![0.0; codomain.dim()]; rows];
        for t in first.terms() {
            for (x, &m) in t.measure.mass().iter().enumerate() {
                for (o, v) in omega[x].iter_mut().zip(&t.vector) {
                    *o += v * m;
                }
            }
        }
        let mut image = vec![vec![0.0; codomain.dim()]; cols];
        for (x, row) in matrix.iter().enumerate() {
            for (y, &w) in row.iter().enumerate() {
                for (o, v) in image[y].iter_mut().zip(&omega[x]) {
                    *o += w * v;
                }
            }
        }
        let oracle = VectorMeasure::new(atomic(cols), codomain, image).unwrap();
        let pair = a.max_abs_diff(&b).unwrap();
        let off = a.max_abs_diff(&oracle).unwrap();
        worst_pair = worst_pair.max(pair);
        ensure(pair <= 1e-9 && off <= 1e-9, || format!("pair {k}: disagreement {pair:e}, oracle error {off:e}"))?;

        let source: f64 = omega.iter().map(|v| codomain.norm(v)).sum();
        for (rep, out) in [(&first, &a), (&second, &b)] {
            let slack = norm.value * source - out.norm();
            worst_slack = worst_slack.min(slack);
            ensure(slack >= -1e-9, || format!("pair {k}: ||image|| {} > {} * {source}", out.norm(), norm.value))?;
            let cert = bound_certificate(&ext, rep, 1e-6).map_err(|e| e.to_string())?;
            ensure(cert.bound_holds, || format!("pair {k}: certificate {cert:?}"))?;
        }
    }
    Ok(format!("200 pairs, max disagreement {worst_pair:.1e}, min bound slack {worst_slack:.2e}"))
}

fn uniqueness() -> Outcome {
    let mut rng = sample::rng(109);
    let config = SamplerConfig {
        tolerance: 1e-12,
        ..SamplerConfig::default()
    };
    let mut worst: f64 = 0.0;
    let mut detected = 0;
    for k in 0..100 {
        let (rows, cols) = (rng.random_range(2..=5), rng.random_range(1..=5));
        let phi = Transfunction::kernel(atomic(rows), atomic(cols), sample::stochastic_kernel(rows, cols, &mut rng)).unwrap();
        let shift = DecompositionShift {
            eta: sample::positive(&atomic(rows), rng.random_range(0.1..5.0), &mut rng),
        };
        let report = uniqueness_probe_strong(&phi, &[&JordanExtension, &shift, &PositivePartOnly], &config.with_seed(k))
            .map_err(|e| e.to_string())?;
        ensure(report.consistent(), || format!("trial {k}: uniqueness contradicted"))?;
        let shifted = &report.candidates[1];
        worst = worst.max(shifted.max_deviation);
        ensure(shifted.agrees && shifted.max_deviation <= 1e-12, || {
            format!("trial {k}: shift deviates by {:e}", shifted.max_deviation)
        })?;
        if !report.candidates[2].agrees {
            detected += 1;
        }
    }
    ensure(detected == 100, || format!("planted candidate detected in {detected}/100 trials"))?;
    Ok(format!("100 shifts agree (max deviation {worst:.1e}); planted candidate detected 100/100"))
}

fn examples_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/examples")
}

fn run_cli(args: &[&str]) -> Result<(Vec<u8>, i32), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_tfkit"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    Ok((out.stdout, out.status.code().unwrap_or(-1)))
}

fn cli_determinism() -> Outcome {
    let dir = examples_dir();
    let jobs = [
        ("check", "kernel.json"),
        ("check", "square.json"),
        ("extend-signed", "signed.json"),
        ("extend-vector", "vector.json"),
        ("lemma1", "three-measures.json"),
        ("ring", "ring.json"),
    ];
    let mut bytes = 0;
    for (command, file) in jobs {
        let input = dir.join(file);
        let input = input.to_str().ok_or("non-utf8 path")?;
        let args = [command, "--input", input, "--seed", "7"];
        let (first, code_a) = run_cli(&args)?;
        let (second, code_b) = run_cli(&args)?;
        ensure(!first.is_empty(), || format!("{command} {file}: empty report"))?;
        ensure(first == second && code_a == code_b, || format!("{command} {file}: reports differ"))?;
        bytes += first.len();
    }
    Ok(format!("{} jobs run twice, {bytes} bytes identical", jobs.len()))
}
