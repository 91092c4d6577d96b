//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.
//!
//! Runs without the libtest harness so the summary is always printed.

use std::f64::consts::{PI, TAU};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mub6_core::analysis::{
    block_rank, count_h2_submatrices, count_real_entries, find_real_submatrices, lemma_block,
    max_product_columns, product_triple_exists, submatrix_rank, SubmatrixLoc,
};
use mub6_core::equivalence::{apply, dephase};
use mub6_core::families::{b6, fourier_f6, m6, m6_grid, s6};
use mub6_core::linalg::{inner, is_hadamard, N};
use mub6_core::musearch::{certify_triple, extract_bases, find_mu_vectors, mu_objective, OptimConfig, FREE};
use mub6_core::refutation::{run_counterexample, verify_tail_structure};
use mub6_core::{CMat6, Tolerances, TransformRecord, C64};

const BIN: &str = env!("CARGO_BIN_EXE_mub6");

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn tol() -> Tolerances {
    Tolerances::default()
}

fn r6() -> f64 {
    6f64.sqrt()
}

/// Refutation reproduction at four admissible points, library and CLI.
fn c1() -> Verdict {
    let mut slowest = Duration::ZERO;
    for t in [2.0 * PI / 3.0, 0.9 * PI, PI, 1.9 * PI] {
        let clock = Instant::now();
        let r = run_counterexample(t, &tol()).map_err(|e| format!("t={t}: {e}"))?;
        let cli = Command::new(BIN)
            .args(["--json", "refute", "--t", &t.to_string()])
            .output()
            .map_err(|e| e.to_string())?;
        let elapsed = clock.elapsed();
        slowest = slowest.max(elapsed);
        ensure(r.refuted(), || format!("t={t}: verdict {}", r.verdict))?;
        ensure(r.hadamard_residual < 1e-9, || format!("t={t}: residual {:e}", r.hadamard_residual))?;
        let blk = [(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0), (2, 0, 1.0), (2, 1, -1.0)];
        for (i, j, v) in blk {
            let z = r.matrix[(i, j)] * r6();
            ensure((z - v).norm() < 1e-9, || format!("t={t}: block entry ({i},{j}) = {z}"))?;
        }
        let s = C64::from_polar(1.0, -t);
        let tail = [r.matrix[(3, 1)] * r6(), r.matrix[(4, 1)] * r6(), r.matrix[(5, 1)] * r6()];
        ensure(
            (tail[0] + 1.0).norm() < 1e-9 && (tail[1] - s).norm() < 1e-9 && (tail[2] + s).norm() < 1e-9,
            || format!("t={t}: tail {tail:?}"),
        )?;
        let min = (0..N).map(|i| r.matrix[(i, 2)].norm()).fold(f64::INFINITY, f64::min);
        ensure(min > 1.0 / r6() - 1e-9, || format!("t={t}: min third-column modulus {min}"))?;
        ensure(cli.status.code() == Some(0), || format!("t={t}: CLI exit {:?}", cli.status.code()))?;
        ensure(String::from_utf8_lossy(&cli.stdout).contains("\"LEMMA_CLAIM_REFUTED\""), || {
            format!("t={t}: CLI verdict missing")
        })?;
        ensure(elapsed < Duration::from_secs(1), || format!("t={t}: {elapsed:?}"))?;
    }
    Ok(format!("4 points refuted, slowest {slowest:.2?}"))
}

/// M6 family integrity on the 50-point grid.
fn c2() -> Verdict {
    let clock = Instant::now();
    let mut worst: f64 = 0.0;
    for t in m6_grid(50) {
        let h = m6(t, &tol()).map_err(|e| format!("t={t}: {e}"))?;
        worst = worst.max(h.hadamard_residual());
        ensure(is_hadamard(&h, &tol()) && h.hadamard_residual() < 1e-9, || format!("t={t}: not Hadamard"))?;
        ensure(h.is_symmetric(&tol()), || format!("t={t}: not symmetric"))?;
        let a = C64::new(t.cos(), t.sin());
        let one = C64::new(1.0, 0.0);
        let want = [one, -one, a, a, -a, -a].map(|z| z * (1.0 / r6()));
        for i in 0..N {
            let got = h[(i, 1)];
            ensure(got.re.to_bits() == want[i].re.to_bits() && got.im.to_bits() == want[i].im.to_bits(), || {
                format!("t={t}: column 2 entry {i} = {got}, want {}", want[i])
            })?;
        }
    }
    let elapsed = clock.elapsed();
    ensure(elapsed < Duration::from_secs(5), || format!("{elapsed:?}"))?;
    Ok(format!("50 points, max residual {worst:.1e}, column 2 bit-exact, {elapsed:.2?}"))
}

/// B6 points with no real 3×2 submatrix but more than 18 2×2 Hadamard submatrices.
fn c3() -> Verdict {
    let clock = Instant::now();
    let mut found = Vec::new();
    for theta in [1.5, 2.0, 2.5, -2.0] {
        let h = b6::<f64>(theta).map_err(|e| e.to_string())?;
        let real = find_real_submatrices(&h, 3, 2, &tol()).map_err(|e| e.to_string())?;
        let h2 = count_h2_submatrices(&h, &tol());
        if real.is_empty() && h2 > 18 {
            found.push(format!("θ={theta}: {h2}"));
        }
    }
    let elapsed = clock.elapsed();
    ensure(found.len() >= 3, || format!("only {} witnesses: {found:?}", found.len()))?;
    ensure(elapsed < Duration::from_secs(1), || format!("{elapsed:?}"))?;
    Ok(format!("{} witnesses ({}), {elapsed:.2?}", found.len(), found.join(", ")))
}

/// Real entries of F6(0,0) against the exponent-parity oracle.
fn c4() -> Verdict {
    let f = fourier_f6::<f64>(0.0, 0.0);
    let rc = count_real_entries(&f, &tol());
    let oracle = (0..N).flat_map(|j| (0..N).map(move |k| (j * k) % 6)).filter(|e| *e == 0 || *e == 3).count();
    ensure(rc.count == 20 && oracle == 20, || format!("count {} oracle {oracle}", rc.count))?;
    ensure(!rc.exceeds_bound, || "exceeds_bound set".into())?;
    Ok(format!("count {} = oracle {oracle}, exceeds_bound false", rc.count))
}

/// Rank of the normalized 3×2 block for (1,1) and (1,−1).
fn c5() -> Verdict {
    let loc = SubmatrixLoc::new(vec![0, 1, 2], vec![0, 1]).map_err(|e| e.to_string())?;
    let mut ranks = Vec::new();
    for (y, x, want) in [(1i8, 1i8, 1usize), (1, -1, 2)] {
        let blk = lemma_block::<f64>(y, x);
        let embedded = CMat6::from_fn(|i, j| if i < 3 && j < 2 { blk[2 * i + j] } else { C64::new(0.0, 0.0) });
        let r1 = block_rank(&blk, 3, 2, &tol());
        let r2 = submatrix_rank(&embedded, &loc, &tol());
        ensure(r1 == want && r2 == want, || format!("(y,x)=({y},{x}): ranks {r1}/{r2}, want {want}"))?;
        ranks.push(format!("({y},{x})→{r1}"));
    }
    // The pipeline's own block.
    let r = run_counterexample(2.0 * PI / 3.0, &tol()).map_err(|e| e.to_string())?;
    let rr = submatrix_rank(&r.matrix, &loc, &tol());
    ensure(rr == 2, || format!("pipeline block rank {rr}"))?;
    Ok(ranks.join(", "))
}

/// Tail recognition on 10⁴ conditioned and 10⁴ unconditioned triples.
fn c6() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let one = C64::new(1.0, 0.0);
    for _ in 0..10_000 {
        let s = C64::from_polar(1.0, rng.gen_range(0.0..TAU));
        let mut triple = [-one, s, -s];
        let k = rng.gen_range(0..6);
        // One of the six orderings.
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        triple = perms[k].map(|i| triple[i]);
        let got = verify_tail_structure(triple, &tol())
            .map_err(|e| e.to_string())?
            .ok_or_else(|| format!("rejected {triple:?}"))?;
        let err = (got - s).norm().min((got + s).norm());
        ensure(err < 1e-9, || format!("recovered {got} for s = {s}"))?;
        ensure(got.im > -1e-9, || format!("not canonical: {got}"))?;
    }
    let mut rejected = 0;
    while rejected < 10_000 {
        let triple: [C64; 3] = std::array::from_fn(|_| C64::from_polar(1.0, rng.gen_range(0.0..TAU)));
        let sum: C64 = triple.iter().sum();
        if (sum + 1.0).norm() <= 1e-6 {
            continue;
        }
        let got = verify_tail_structure(triple, &tol()).map_err(|e| e.to_string())?;
        ensure(got.is_none(), || format!("accepted {triple:?}"))?;
        rejected += 1;
    }
    Ok("10000 conditioned recognized, 10000 unconditioned rejected".into())
}

/// Analytic vs central-difference gradient; error relative to max(1, |fd|).
fn c7() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for case in 0..100 {
        let h = match case % 3 {
            0 => fourier_f6(rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU)),
            1 => {
                let t = rng.gen_range(PI / 2.0 + 1e-3..PI);
                m6(t, &tol()).map_err(|e| e.to_string())?
            }
            _ => {
                let th = rng.gen_range(1.2..PI) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                b6(th).map_err(|e| e.to_string())?
            }
        };
        let x: [f64; FREE] = std::array::from_fn(|_| rng.gen_range(0.0..TAU));
        let (_, g) = mu_objective(&h, &x);
        for k in 0..FREE {
            let (mut xp, mut xm) = (x, x);
            xp[k] += 1e-6;
            xm[k] -= 1e-6;
            let fd = (mu_objective(&h, &xp).0 - mu_objective(&h, &xm).0) / 2e-6;
            worst = worst.max((g[k] - fd).abs() / fd.abs().max(1.0));
        }
    }
    ensure(worst < 1e-5, || format!("worst relative error {worst:e}"))?;
    Ok(format!("100 cases, worst relative error {worst:.1e}"))
}

/// Random equivalences preserve Hadamard, H2 count; dephasing idempotent; replay exact.
fn c8() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let families: [(&str, CMat6); 4] = [
        ("F6", fourier_f6(0.0, 0.0)),
        ("M6", m6(2.0 * PI / 3.0, &tol()).map_err(|e| e.to_string())?),
        ("B6", b6(2.0).map_err(|e| e.to_string())?),
        ("S6", s6()),
    ];
    let mut worst_replay: f64 = 0.0;
    for (name, h) in &families {
        let h2 = count_h2_submatrices(h, &tol());
        for _ in 0..100 {
            let r1 = TransformRecord::random(&mut rng);
            let r2 = TransformRecord::random(&mut rng);
            let g = apply(h, &r1);
            ensure(is_hadamard(&g, &tol()), || format!("{name}: Hadamard lost"))?;
            ensure(count_h2_submatrices(&g, &tol()) == h2, || format!("{name}: H2 count changed"))?;
            let (d, rec) = dephase(&g).map_err(|e| e.to_string())?;
            let (dd, _) = dephase(&d).map_err(|e| e.to_string())?;
            ensure(dd.max_abs_diff(&d) < 1e-12, || format!("{name}: dephase not idempotent"))?;
            let replay = apply(&g, &rec).max_abs_diff(&d).max(apply(&g, &r2).max_abs_diff(&apply(h, &r1.then(&r2))));
            worst_replay = worst_replay.max(replay);
            ensure(replay < 1e-12, || format!("{name}: replay error {replay:e}"))?;
        }
    }
    Ok(format!("4 families x 100 records, worst replay {worst_replay:.1e}"))
}

/// MU-search soundness on F6(0,0) with the default configuration.
fn c9() -> Verdict {
    let f = fourier_f6::<f64>(0.0, 0.0);
    let cfg = OptimConfig::default();
    let vs = find_mu_vectors(&f, &cfg);
    ensure(!vs.is_empty(), || "no vectors".into())?;
    for v in &vs {
        let direct = (0..N)
            .map(|j| (6.0 * inner(&f.col(j), &v.vector).norm_sqr() - 1.0).abs())
            .fold(0.0, f64::max);
        ensure(direct < 1e-8, || format!("residual {direct:e}"))?;
    }
    let bases = extract_bases(&vs, &cfg.tol);
    for b in &bases {
        let vecs = b.map(|k| vs[k].vector);
        ensure(certify_triple(&f, &vecs, &cfg.tol).valid, || format!("basis {b:?} not certified"))?;
    }
    ensure(vs == find_mu_vectors(&f, &cfg), || "second run differs".into())?;
    Ok(format!("{} vectors, {} certified triples, repeat identical", vs.len(), bases.len()))
}

/// 50-point, 2000-start scan twice through the CLI: byte-identical, each under 10 minutes.
fn c10() -> Verdict {
    let dir = std::env::temp_dir().join(format!("mub6-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    let mut times = Vec::new();
    for run in 0..2 {
        let path = dir.join(format!("scan{run}.csv"));
        let clock = Instant::now();
        let o = Command::new(BIN)
            .args(["--seed", "2024", "scan", "--family", "m6", "--t-from", "1.6", "--t-to"])
            .arg(PI.to_string())
            .args(["--steps", "50", "--starts", "2000", "--out"])
            .arg(&path)
            .output()
            .map_err(|e| e.to_string())?;
        times.push(clock.elapsed());
        ensure(o.status.success(), || String::from_utf8_lossy(&o.stderr).into_owned())?;
        outputs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    let _ = std::fs::remove_dir_all(&dir);
    ensure(outputs[0] == outputs[1], || "CSV differs between runs".into())?;
    ensure(times.iter().all(|t| *t < Duration::from_secs(600)), || format!("{times:?}"))?;
    let text = String::from_utf8_lossy(&outputs[0]);
    let rows = text.lines().count() - 1;
    ensure(rows == 50 && !text.contains("NA"), || format!("{rows} rows"))?;
    let triples: usize = text.lines().skip(1).filter_map(|l| l.split(',').nth(5)?.parse::<usize>().ok()).sum();
    Ok(format!("50 rows byte-identical, {:.1?} / {:.1?}, {triples} triples found", times[0], times[1]))
}

/// Three product-vector columns: present in F6, absent from M6 on ≥ 90% of the grid.
fn c11() -> Verdict {
    ensure(product_triple_exists(&fourier_f6::<f64>(0.0, 0.0), &tol()), || "F6 has no product triple".into())?;
    let grid = m6_grid(50);
    let mut exceptions = Vec::new();
    for &t in &grid {
        let h = m6(t, &tol()).map_err(|e| e.to_string())?;
        if product_triple_exists(&h, &tol()) {
            let (n, _) = max_product_columns(&h, &tol());
            exceptions.push(format!("t={t:.6} ({n} product columns)"));
        }
    }
    let ok = grid.len() - exceptions.len();
    ensure(ok * 10 >= grid.len() * 9, || format!("only {ok}/{} grid points without a triple", grid.len()))?;
    Ok(format!(
        "F6 true; M6 false on {ok}/{} points; flagged: [{}]",
        grid.len(),
        exceptions.join("; ")
    ))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("refutation reproduction", c1),
        ("M6 family integrity", c2),
        ("B6 real-block / H2 witness", c3),
        ("real-entry count of F6", c4),
        ("rank case split", c5),
        ("tail-structure property", c6),
        ("gradient correctness", c7),
        ("equivalence invariance", c8),
        ("MU-search soundness", c9),
        ("scan determinism and throughput", c10),
        ("product-column check", c11),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let clock = Instant::now();
        let outcome = f();
        let elapsed = clock.elapsed();
        match outcome {
            Ok(detail) => println!("PASS  {:>2}. {name}: {detail} [{elapsed:.2?}]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {:>2}. {name}: {detail} [{elapsed:.2?}]", k + 1);
            }
        }
    }
    println!("acceptance: {}/{} passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
