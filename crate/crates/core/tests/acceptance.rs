//! One line per acceptance criterion: status, measured value, margin and runtime.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use localp2::chamber::*;
use localp2::exceptional::*;
use localp2::ktheory::*;
use localp2::mirror::verify::*;
use localp2::mirror::*;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

/// Criteria that cannot be met; each entry carries the recorded reason.
const KNOWN_RED: &[(u32, &str)] = &[(
    2,
    "the sum converges to 1.5662..., so the stated 1.558 ± 0.001 is out of reach at any order",
)];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn sum_c() -> Outcome {
    let s = series_constants(&build_series(2000).unwrap()).sum_c;
    let bound = 1.0 / (PI * 3f64.sqrt());
    let margin = 1e-3 - (s - 0.129).abs();
    outcome(
        margin > 0.0 && s < bound,
        format!("S1 = {s:.9}, |S1 − 0.129| margin {margin:.2e}, bound 1/(π√3) = {bound:.6}"),
    )
}

fn sum_abs_l() -> Outcome {
    let s = series_constants(&build_series(2000).unwrap()).sum_abs_l;
    let margin = 1e-3 - (s - 1.558).abs();
    outcome(
        margin > 0.0 && s < 3.0,
        format!("S2 = {s:.9}, |S2 − 1.558| margin {margin:.2e}, S2 < 3: {}", s < 3.0),
    )
}

fn conifold() -> Outcome {
    let series = conifold_b_series(&build_series(4000).unwrap()).norm();
    let m = Mirror::new(500).unwrap();
    let ode = conifold_b_ode(&m, &OdeOptions::default()).unwrap().norm();
    outcome(
        series < 1e-3 && ode < 1e-6,
        format!("series |b| = {series:.3e} (< 1e-3), ODE |b| = {ode:.3e} (< 1e-6)"),
    )
}

fn orbifold() -> Outcome {
    let m = Mirror::new(500).unwrap();
    let p = m.mirror_ab(&MirrorPoint::psi(c(0.0, 0.0))).unwrap();
    let exact = p.a == c(-0.5, 0.0) && p.b == c(-1.0 / 3.0, 0.0);
    let simples = [
        ch_line_bundle(0),
        shift(ChernClass::from_twice(2, -1, -1), 1),
        shift(ch_line_bundle(-1), 2),
    ];
    let err = simples
        .iter()
        .map(|&x| (central_charge(&p, x) + 1.0 / 3.0).norm())
        .fold(0.0, f64::max);
    outcome(
        exact && err < 1e-12,
        format!("(a, b) = ({}, {}), max |Z + 1/3| = {err:.1e}", p.a, p.b),
    )
}

fn sweep() -> Outcome {
    let m = Mirror::new(500).unwrap();
    let r = verify_appendix_c(1000, 0, 10, &m).unwrap();
    outcome(
        r.all_passed(),
        format!(
            "{} failures; Im a {}/{}, B range {}/{}, step 3 {}/{} + {}/{} (worst margins {:.3e}, {:.3e}), chamber {}/{}",
            r.failures.len(),
            r.im_a_pass,
            r.samples,
            r.b_range_pass,
            r.samples,
            r.step3_pass_upper,
            r.step3_total_upper,
            r.step3_pass_lower,
            r.step3_total_lower,
            r.worst_step3_upper,
            r.worst_step3_lower,
            r.chamber_pass,
            r.samples
        ),
    )
}

fn kalgebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut bad_phi = 0;
    let mut bad_skew = 0;
    for _ in 0..10_000 {
        let mut draw = || {
            ChernClass::from_twice(
                rng.gen_range(-1000..1000),
                rng.gen_range(-1000..1000),
                rng.gen_range(-2000..2000),
            )
        };
        let (x, y) = (draw(), draw());
        if phi_composite_k(phi_composite_k(phi_composite_k(x))) != x {
            bad_phi += 1;
        }
        if euler_skew(x, y) != -euler_skew(y, x) {
            bad_skew += 1;
        }
    }
    let st = gamma13_matrix(&"STSTST".parse().unwrap()) == [[1, 0], [0, 1]];
    outcome(
        bad_phi == 0 && bad_skew == 0 && st,
        format!("φ³ ≠ id: {bad_phi}/10000, skew asymmetric: {bad_skew}/10000, (ST)³ = I: {st}"),
    )
}

fn intersections() -> Outcome {
    let w = window(8);
    let mut checked = 0;
    let mut bad = 0;
    for level in 1..=8u32 {
        let step = 1usize << (8 - level + 1);
        for k in (0..w.len() - 1).step_by(step) {
            let (a, b, mid) = (w.get(k), w.get(k + step), w.get(k + step / 2));
            checked += 1;
            if p_alpha_exact(a, &mid.alpha) != mid.disc || p_alpha_exact(b, &mid.alpha) != mid.disc {
                bad += 1;
            }
        }
    }
    outcome(
        bad == 0 && checked == 255,
        format!("{checked} midpoints on levels 1..=8, {bad} mismatches"),
    )
}

fn delta_boundary() -> Outcome {
    let dp = DpBoundary::new(10);
    let n = 1000;
    let values: Vec<BigRational> = (0..=n)
        .map(|k| dp.eval_exact(&BigRational::new(k.into(), n.into())).value)
        .collect();
    let in_range = values
        .iter()
        .all(|v| *v >= BigRational::new(1.into(), 2.into()) && *v <= int(1));
    let periodic = (0..n as usize).all(|k| {
        dp.eval_exact(&(BigRational::new((k as i64).into(), n.into()) + int(1)))
            .value
            == values[k]
    });
    let lip = BigRational::new(3.into(), (2 * n).into());
    let worst = values.windows(2).map(|p| (&p[1] - &p[0]).abs()).max().unwrap();
    let ratio = (&worst / &lip).to_f64().unwrap();
    outcome(
        in_range && periodic && worst <= lip,
        format!("range ok: {in_range}, period-1 exact: {periodic}, max |Δδ|/(3/2·h) = {ratio:.4}"),
    )
}

fn mutations() -> Outcome {
    let orbit = braid_orbit(&CollectionTriple::standard(), 6);
    let mut bundles = std::collections::BTreeSet::new();
    for (_, t) in &orbit {
        if let Some(e) = t.bundle_data {
            bundles.extend(e.iter().map(|x| (x.r, x.d, x.c_twice())));
        }
    }
    let mut bad = Vec::new();
    for &(r, d, c2) in &bundles {
        let mu = BigRational::new(d.into(), r.into());
        let disc = &mu * &mu / int(2) - BigRational::new(c2.into(), (2 * r).into());
        let hit = find_exceptional(&mu, 10);
        let ok = hit.is_some_and(|s| s.rank == BigInt::from(r) && s.disc == disc);
        if !ok {
            bad.push(format!("{r},{d},{c2}"));
        }
    }
    outcome(
        bad.is_empty() && !bundles.is_empty(),
        format!(
            "{} orbit triples, {} distinct bundles, {} unmatched {:?}",
            orbit.len(),
            bundles.len(),
            bad.len(),
            bad
        ),
    )
}

fn semicircles() -> Outcome {
    let s = semicircle(&CollectionTriple::standard()).unwrap();
    let standard = s.center == BigRational::new((-1).into(), 2.into()) && s.rho == BigRational::new(1.into(), 4.into());
    let mut count = 0;
    let mut worst_r: f64 = 0.0;
    let mut all = true;
    for (_, t) in braid_orbit(&CollectionTriple::standard(), 6) {
        if t.bundle_data.is_none() {
            continue;
        }
        let sc = semicircle(&t).unwrap();
        count += 1;
        worst_r = worst_r.max(sc.radius());
        all &= sc.rho > BigRational::zero() && sc.radius() < 3.0 / 2f64.sqrt();
    }
    outcome(
        standard && all,
        format!(
            "standard (C, R) = ({}, {}), {count} orbit collections, max R = {worst_r:.6} < {:.6}",
            s.center,
            s.radius(),
            3.0 / 2f64.sqrt()
        ),
    )
}

fn residuals() -> Outcome {
    let ex = build_series_exact(500);
    let q = |m: i64| int(3 * m * (3 * m + 1) * (3 * m + 2));
    let dq = |m: i64| int(81 * m * m + 54 * m + 6);
    let f = |n: usize| {
        if n == 0 {
            BigRational::zero()
        } else {
            int(if n.is_multiple_of(2) { 3 } else { -3 }) * &ex.c[n]
        }
    };
    let mut exact = true;
    for n in 1..=500usize {
        let m = n as i64;
        exact &= n == 1 || int(m * m * m) * f(n) + q(m - 1) * f(n - 1) == BigRational::zero();
        let mut rhs = -(int(2) * (int(3 * m * m) * f(n) + dq(m - 1) * f(n - 1)));
        if n == 1 {
            rhs -= int(54);
        }
        exact &= int(m * m * m) * &ex.l[n] + q(m - 1) * &ex.l[n - 1] == rhs;
    }
    let m = Mirror::new(500).unwrap();
    let mut worst_z: f64 = 0.0;
    let mut worst_psi: f64 = 0.0;
    for k in 0..100 {
        let t = (k as f64 + 0.5) / 100.0;
        let z = Complex64::from_polar(
            0.9 * t / 27.0,
            PI * (2.0 * ((k * 37) % 100) as f64 / 100.0 - 1.0) + 0.01,
        );
        for j in 0..3 {
            worst_z = worst_z.max(residual_z(z, &m.z.omega_jet(j, z, 0)).norm());
        }
        let psi = Complex64::from_polar(0.9 * t, 2.0 * PI * ((k * 41) % 100) as f64 / 100.0);
        for j in 1..=2 {
            worst_psi = worst_psi.max(residual_psi(psi, &m.psi.varpi_jet(j, psi)).norm());
        }
    }
    outcome(
        exact && worst_z < 1e-9 && worst_psi < 1e-9,
        format!("exact recursion to 500: {exact}, max residual z {worst_z:.2e}, ψ {worst_psi:.2e}"),
    )
}

fn monodromy() -> Outcome {
    let m = Mirror::new(500).unwrap();
    let opts = OdeOptions::default();
    let con = conifold_loop(&m, 64, &opts).unwrap().error;
    let lv = large_volume_loop(&m, 64, &opts).unwrap().error;
    outcome(
        con < 1e-6 && lv < 1e-8,
        format!("conifold loop error {con:.2e} (< 1e-6), large-volume loop error {lv:.2e} (< 1e-8)"),
    )
}

fn invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let chamber = GeometricChamber::new(10, DEFAULT_TOL);
    let mut members = 0;
    let mut mismatches = 0;
    for _ in 0..1000 {
        let a = c(rng.gen_range(-2.0..2.0), rng.gen_range(-0.5..2.0));
        let b = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let p = ChargeParams::new(a, b);
        let v = chamber.verdict(&p);
        let w = chamber.verdict(&p.tensor_shift());
        members += v.member as usize;
        if v.member != w.member || v.failed_rule != w.failed_rule {
            mismatches += 1;
        }
    }
    outcome(
        mismatches == 0 && members > 0 && members < 1000,
        format!(
            "{members} members, {} non-members, {mismatches} mismatches",
            1000 - members
        ),
    )
}

#[test]
fn acceptance() {
    let criteria = [
        Criterion {
            id: 1,
            name: "series constant Σc_n27⁻ⁿ",
            budget: Duration::from_secs(1),
            run: sum_c,
        },
        Criterion {
            id: 2,
            name: "series constant Σ|l_n|27⁻ⁿ",
            budget: Duration::from_secs(5),
            run: sum_abs_l,
        },
        Criterion {
            id: 3,
            name: "conifold vanishing of b",
            budget: Duration::from_secs(10),
            run: conifold,
        },
        Criterion {
            id: 4,
            name: "orbifold values",
            budget: Duration::from_secs(1),
            run: orbifold,
        },
        Criterion {
            id: 5,
            name: "random sweep",
            budget: Duration::from_secs(60),
            run: sweep,
        },
        Criterion {
            id: 6,
            name: "K-theory algebra",
            budget: Duration::from_secs(1),
            run: kalgebra,
        },
        Criterion {
            id: 7,
            name: "ε-tree intersection identity",
            budget: Duration::from_secs(5),
            run: intersections,
        },
        Criterion {
            id: 8,
            name: "δ boundary properties",
            budget: Duration::from_secs(10),
            run: delta_boundary,
        },
        Criterion {
            id: 9,
            name: "mutation/DP cross-validation",
            budget: Duration::from_secs(30),
            run: mutations,
        },
        Criterion {
            id: 10,
            name: "semicircle data",
            budget: Duration::from_secs(10),
            run: semicircles,
        },
        Criterion {
            id: 11,
            name: "ODE residuals",
            budget: Duration::from_secs(20),
            run: residuals,
        },
        Criterion {
            id: 12,
            name: "monodromy oracle",
            budget: Duration::from_secs(30),
            run: monodromy,
        },
        Criterion {
            id: 13,
            name: "chamber invariance",
            budget: Duration::from_secs(10),
            run: invariance,
        },
    ];
    let mut unexpected = Vec::new();
    for cr in &criteria {
        let start = Instant::now();
        let out = (cr.run)();
        let elapsed = start.elapsed();
        let in_time = elapsed <= cr.budget;
        let pass = out.pass && in_time;
        let known = KNOWN_RED.iter().find(|(id, _)| *id == cr.id);
        println!(
            "[{}] {:>2} {}: {} ({:.2} s of {} s)",
            if pass { "PASS" } else { "FAIL" },
            cr.id,
            cr.name,
            out.detail,
            elapsed.as_secs_f64(),
            cr.budget.as_secs()
        );
        match (pass, known) {
            (false, Some((_, reason))) => println!("           known red: {reason}"),
            (false, None) => unexpected.push(cr.id),
            (true, Some(_)) => println!("           listed as known red but passed"),
            (true, None) => {}
        }
    }
    assert!(unexpected.is_empty(), "criteria failed: {unexpected:?}");
}

#[test]
fn known_red_are_genuine() {
    let s = series_constants(&build_series(4000).unwrap()).sum_abs_l;
    let at_2000 = series_constants(&build_series(2000).unwrap()).sum_abs_l;
    assert!(s > at_2000 && (s - 1.558).abs() > 1e-3);
}
