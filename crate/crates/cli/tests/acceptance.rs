//! Acceptance criteria. Each criterion prints one `[PASS]`/`[FAIL]` line;
//! all criteria run before the test asserts.

mod common;

use std::f64::consts::{PI, TAU};
use std::time::{Duration, Instant};

use gaussian_coherence::testing::{
    equivalent_pair, perturbed_pair, random_incoherent_unitary, random_state, RandomStateRecipe,
};
use gaussian_coherence::zoo::{
    self, displaced_squeezed, displaced_squeezed_equivalent, partial_transpose_cov, standard_form_spectra,
    two_mode_standard_form, DisplacedSqueezedParams, StandardFormParams,
};
use gaussian_coherence::{
    apply_channel, brute_force_equivalence, certificate_residual, decide_equivalence, is_frozen, petz_recovery,
    random_igo, relative_entropy_coherence, relative_entropy_to_thermal, williamson_spectrum, Channel, Complex, Error,
    IgoBlock, IgoSpec, State,
};
use nalgebra::Matrix2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
/// Name, check and optional runtime limit.
type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c_r(s: &State) -> f64 {
    relative_entropy_coherence(s, 1e-9).unwrap().c_rel_ent
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn recipe(modes: usize, seed: u64) -> RandomStateRecipe {
    RandomStateRecipe { thermal_min: 1.2, ..RandomStateRecipe::new(modes, seed) }
}

fn closed_form_coherence() -> Outcome {
    let coherent = zoo::coherent(Complex::new(1.0, 0.0)).unwrap();
    let c = c_r(&coherent);
    ensure((c - 2.0).abs() <= 1e-9, || format!("C_R(|α|=1) = {c}"))?;
    let mut r = rng(1);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let m = r.gen_range(1..=4);
        let n: Vec<f64> = (0..m).map(|_| r.gen_range(0.0..5.0)).collect();
        worst = worst.max(c_r(&zoo::thermal(&n).unwrap()).abs());
    }
    ensure(worst <= 1e-12, || format!("thermal C_R up to {worst:e}"))?;
    Ok(format!("C_R(coherent) = {c:.12}, max |C_R(thermal)| = {worst:.1e}"))
}

/// Minimizes `f` over `[lo, hi]` by golden-section search.
fn golden(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let k = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    for _ in 0..100 {
        let (c, d) = (b - k * (b - a), a + k * (b - a));
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    (a + b) / 2.0
}

/// Minimum of `S(ρ‖δ(n'))` over thermal references: a logarithmic grid in
/// each occupation followed by coordinate-wise golden-section refinement in
/// `log n'`.
fn grid_minimum(s: &State) -> f64 {
    let m = s.modes();
    let grid: Vec<f64> = (0..=120).map(|k| 10f64.powf(-4.0 + 7.0 * k as f64 / 120.0)).collect();
    let f = |n: &[f64]| relative_entropy_to_thermal(s, n, 1e-9).unwrap();
    let mut best = (f64::INFINITY, vec![1.0; m]);
    let mut idx = vec![0usize; m];
    loop {
        let n: Vec<f64> = idx.iter().map(|&k| grid[k]).collect();
        let v = f(&n);
        if v < best.0 {
            best = (v, n);
        }
        let Some(pos) = (0..m).find(|&p| idx[p] + 1 < grid.len()) else { break };
        idx[pos] += 1;
        idx[..pos].fill(0);
    }
    let step = 7.0 / 120.0 * std::f64::consts::LN_10;
    let mut n = best.1;
    for _ in 0..4 {
        for i in 0..m {
            let center = n[i].ln();
            let t = golden(
                |x| {
                    let mut trial = n.clone();
                    trial[i] = x.exp();
                    f(&trial)
                },
                center - step,
                center + step,
            );
            n[i] = t.exp();
        }
    }
    f(&n)
}

fn grid_oracle() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..100u64 {
        let s: State = random_state(&RandomStateRecipe {
            hypothesis: false,
            ..RandomStateRecipe::new(1 + seed as usize % 2, seed)
        })
        .unwrap();
        let gap = (grid_minimum(&s) - c_r(&s)).abs();
        worst = worst.max(gap);
    }
    ensure(worst <= 1e-6, || format!("grid minimum differs by {worst:e}"))?;
    Ok(format!("100 states, max |grid min − C_R| = {worst:.1e}"))
}

fn monotonicity() -> Outcome {
    let mut r = rng(3);
    let mut worst = f64::NEG_INFINITY;
    for k in 0..1000u64 {
        let m = 1 + k as usize % 4;
        let s: State =
            random_state(&RandomStateRecipe { hypothesis: false, ..RandomStateRecipe::new(m, 10_000 + k) }).unwrap();
        let phi = random_igo::<f64, _>(m, r.gen_bool(0.5), &mut r).unwrap();
        let out = apply_channel(&phi, &s, 1e-9).unwrap();
        worst = worst.max(c_r(&out) - c_r(&s));
    }
    ensure(worst <= 1e-7, || format!("C_R increased by {worst:e}"))?;
    Ok(format!("1000 pairs, max C_R(Φ(ρ)) − C_R(ρ) = {worst:.3e}"))
}

fn planted_soundness() -> Outcome {
    let mut worst = 0.0f64;
    for k in 0..200u64 {
        let m = 2 + k as usize % 5;
        let mut r = recipe(m, 20_000 + k);
        if k % 4 == 0 {
            r.mean_scale = 0.0;
        }
        let (rho, sigma, _) = equivalent_pair::<f64>(&r).unwrap();
        let v = decide_equivalence(&rho, &sigma, 1e-8).unwrap();
        let cert = v.certificate().ok_or_else(|| format!("planted pair {k} (m = {m}): {v:?}"))?;
        let res = certificate_residual(cert, &rho, &sigma).unwrap();
        ensure(res <= 1e-8, || format!("planted pair {k}: residual {res:e}"))?;
        worst = worst.max(res);
    }
    for k in 0..100u64 {
        let m = 2 + k as usize % 5;
        let (rho, sigma) = perturbed_pair::<f64>(&recipe(m, 30_000 + k), 0.05).unwrap();
        let v = decide_equivalence(&rho, &sigma, 1e-8).unwrap();
        ensure(!v.is_equivalent(), || format!("perturbed pair {k} accepted: {v:?}"))?;
    }
    Ok(format!("200/200 planted recovered (max residual {worst:.1e}), 100/100 perturbed rejected"))
}

fn oracle_agreement() -> Outcome {
    let mut equivalent = 0;
    for k in 0..200u64 {
        let m = 1 + k as usize % 3;
        let mut r = recipe(m, 40_000 + k);
        if k % 3 == 0 {
            r.mean_scale = 0.0;
        }
        let (rho, sigma) = if k % 2 == 0 {
            let (a, b, _) = equivalent_pair::<f64>(&r).unwrap();
            (a, b)
        } else {
            perturbed_pair::<f64>(&r, 0.05).unwrap()
        };
        let fast = decide_equivalence(&rho, &sigma, 1e-8).unwrap();
        let slow = brute_force_equivalence(&rho, &sigma, 360, 60, 1e-8).unwrap();
        ensure(fast.is_equivalent() == slow.is_equivalent(), || {
            format!("pair {k} (m = {m}): decider {} vs oracle {}", fast.label(), slow.label())
        })?;
        equivalent += usize::from(fast.is_equivalent());
    }
    Ok(format!("200 pairs, 0 disagreements ({equivalent} equivalent)"))
}

fn frozen_equivalence() -> Outcome {
    let mut r = rng(6);
    let (mut frozen, mut worst_unitary) = (0, 0.0f64);
    for k in 0..200u64 {
        let m = 1 + k as usize % 3;
        let rho: State = random_state(&recipe(m, 50_000 + k)).unwrap();
        let unitary = k % 2 == 0;
        let phi = if unitary {
            random_incoherent_unitary::<f64, _>(m, &mut r).unwrap().to_channel().unwrap()
        } else {
            random_igo::<f64, _>(m, true, &mut r).unwrap()
        };
        let report = is_frozen(&rho, &phi, 1e-9).unwrap();
        let verdict = decide_equivalence(&rho, &report.output, 1e-8).unwrap();
        ensure(report.frozen == verdict.is_equivalent(), || {
            format!("sample {k}: frozen = {} but verdict {}", report.frozen, verdict.label())
        })?;
        if unitary {
            let delta = (report.c_after - report.c_before).abs();
            ensure(report.frozen && delta <= 1e-9, || format!("unitary sample {k}: ΔC_R = {delta:e}"))?;
            worst_unitary = worst_unitary.max(delta);
        }
        frozen += usize::from(report.frozen);
    }
    Ok(format!("200 channels ({frozen} frozen), unitary max |ΔC_R| = {worst_unitary:.1e}"))
}

fn petz() -> Outcome {
    let mut r = rng(7);
    let mut worst = 0.0f64;
    for k in 0..200 {
        let m = 1 + k % 4;
        let phi = random_igo::<f64, _>(m, k % 2 == 0, &mut r).unwrap();
        let n: Vec<f64> = (0..m).map(|_| r.gen_range(0.05..3.0)).collect();
        let delta = zoo::thermal(&n).unwrap();
        let psi = petz_recovery(&phi, &n, 1e-9).map_err(|e| format!("sample {k}: {e}"))?;
        let back = apply_channel(&psi, &apply_channel(&phi, &delta, 1e-9).unwrap(), 1e-9).unwrap();
        let res = (back.cov() - delta.cov()).norm().max(back.mean().norm());
        ensure(res <= 1e-10, || format!("sample {k}: residual {res:e}"))?;
        worst = worst.max(res);
    }
    let att = IgoSpec::<f64> {
        blocks: vec![IgoBlock { source: 0, target: 0, scale: 0.5, orth: Matrix2::identity() }],
        noise: vec![0.75],
        strict: true,
    }
    .reconstruct(1e-9)
    .unwrap();
    let psi = petz_recovery(&att, &[1.0], 1e-9).unwrap();
    let (t, nn) = (psi.t()[(0, 0)], psi.n()[(0, 0)]);
    ensure((t - 1.26491).abs() < 5e-6 && (nn - 0.6).abs() < 5e-6, || format!("worked example T_Ψ = {t}, N_Ψ = {nn}"))?;
    ensure(psi.t()[(0, 1)] == 0.0 && psi.t()[(1, 0)] == 0.0 && (psi.t()[(1, 1)] - t).abs() < 1e-15, || {
        "T_Ψ not scalar".into()
    })?;
    let collapse: Channel = IgoSpec {
        blocks: vec![IgoBlock { source: 0, target: 0, scale: 0.0, orth: Matrix2::identity() }],
        noise: vec![1.0],
        strict: true,
    }
    .reconstruct(1e-9)
    .unwrap();
    let err = petz_recovery(&collapse, &[1.0], 1e-9);
    ensure(matches!(err, Err(Error::NotFaithful { .. })), || format!("collapse gave {err:?}"))?;
    Ok(format!("200 pairs max residual {worst:.1e}; T_Ψ = {t:.5}, N_Ψ = {nn:.5}; not-faithful raised"))
}

fn standard_form() -> Outcome {
    let mut r = rng(8);
    let mut worst = 0.0f64;
    let mut count = 0;
    while count < 1000 {
        let (a, b): (f64, f64) = (r.gen_range(1.0..5.0), r.gen_range(1.0..5.0));
        let bound = ((a - 1.0) * (b - 1.0)).sqrt() + 1.0;
        let p = StandardFormParams::new(a, b, r.gen_range(-bound..bound), r.gen_range(-bound..bound));
        let Ok(state) = two_mode_standard_form(&p) else { continue };
        count += 1;
        let s = standard_form_spectra(&p, 1e-9).unwrap();
        let w = state.williamson_spectrum().values().to_vec();
        let pt = williamson_spectrum(&partial_transpose_cov(state.cov(), 1).unwrap(), 1e-8).unwrap();
        let pw = pt.values();
        for (x, y) in [(s.v_minus, w[0]), (s.v_plus, w[1]), (s.pt_v_minus, pw[0]), (s.pt_v_plus, pw[1])] {
            worst = worst.max((x - y).abs());
        }
    }
    ensure(worst <= 1e-9, || format!("closed form off by {worst:e}"))?;
    let s3 = 3f64.sqrt();
    for (p, (vp, vm)) in [
        (StandardFormParams::new(2.0, 3.0, 0.0, 0.0), (3.0, 2.0)),
        (StandardFormParams::new(2.0, 2.0, 1.0, 1.0), (3.0, 1.0)),
        (StandardFormParams::new(2.0, 2.0, s3, -s3), (1.0, 1.0)),
    ] {
        let s = standard_form_spectra(&p, 1e-9).unwrap();
        ensure((s.v_plus - vp).abs() <= 1e-10 && (s.v_minus - vm).abs() <= 1e-10, || {
            format!("{p:?}: ({}, {})", s.v_plus, s.v_minus)
        })?;
    }
    Ok(format!("1000 parameter sets, max deviation {worst:.1e}; worked triples exact"))
}

fn displaced_squeezed_criterion() -> Outcome {
    let mut agree = 0;
    let mut equivalent = 0;
    for bi in 0..5 {
        let b = 0.25 * bi as f64;
        let p = DisplacedSqueezedParams::new(Complex::new(1.0, 0.0), Complex::new(b, 0.0));
        let rho = displaced_squeezed(&p).unwrap();
        for gi in 0..20 {
            for ti in 0..20 {
                let (g, t) = (TAU * gi as f64 / 20.0, TAU * ti as f64 / 20.0);
                let q = DisplacedSqueezedParams::new(Complex::from_polar(1.0, g), Complex::from_polar(b, t));
                let sigma = displaced_squeezed(&q).unwrap();
                let criterion = displaced_squeezed_equivalent(&p, &q, 1e-9);
                let decided = decide_equivalence(&rho, &sigma, 1e-8).unwrap().is_equivalent();
                ensure(criterion == decided, || format!("|β| = {b}, γ' = {g}, θ' = {t}: {criterion} vs {decided}"))?;
                agree += 1;
                equivalent += usize::from(decided);
            }
        }
    }
    let p = DisplacedSqueezedParams::new(Complex::new(1.0, 0.0), Complex::new(0.5, 0.0));
    let q = DisplacedSqueezedParams::new(Complex::new(0.0, 1.0), Complex::from_polar(0.5, PI));
    let v = decide_equivalence(&displaced_squeezed(&p).unwrap(), &displaced_squeezed(&q).unwrap(), 1e-8).unwrap();
    ensure(v.is_equivalent() && displaced_squeezed_equivalent(&p, &q, 1e-9), || format!("worked instance: {v:?}"))?;
    Ok(format!("{agree} grid points agree ({equivalent} equivalent); worked instance Equivalent"))
}

fn cli_golden() -> Outcome {
    let failures: Vec<String> = common::CASES.iter().filter_map(|c| common::check(c).err()).collect();
    ensure(failures.is_empty(), || failures.join("; "))?;
    Ok(format!("{} cases byte-stable with expected exit codes", common::CASES.len()))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("1 closed-form coherence", closed_form_coherence, Some(Duration::from_secs(1))),
        ("2 grid oracle", grid_oracle, Some(Duration::from_secs(10))),
        ("3 monotonicity", monotonicity, Some(Duration::from_secs(30))),
        ("4 planted soundness", planted_soundness, Some(Duration::from_secs(60))),
        ("5 oracle agreement", oracle_agreement, Some(Duration::from_secs(300))),
        ("6 frozen coherence", frozen_equivalence, None),
        ("7 Petz recovery", petz, None),
        ("8 standard-form spectra", standard_form, None),
        ("9 displaced-squeezed criterion", displaced_squeezed_criterion, None),
        ("10 CLI golden files", cli_golden, None),
    ];
    let mut failed = Vec::new();
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let outcome = run().and_then(|msg| match limit {
            Some(l) if start.elapsed() > l => Err(format!("{msg}; took {:?}, limit {l:?}", start.elapsed())),
            _ => Ok(msg),
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("[PASS] {name}: {msg} ({secs:.2}s)"),
            Err(msg) => {
                println!("[FAIL] {name}: {msg} ({secs:.2}s)");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
