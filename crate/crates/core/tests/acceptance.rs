//! Acceptance suite: ten criteria, one PASS/FAIL line each.
//!
//! Run with `cargo test --test acceptance`; pass criterion numbers to run a subset
//! (`cargo test --test acceptance -- 1 7`).

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shintani::arith::{q, qf, Q};
use shintani::cli;
use shintani::cones::{cocycle_characteristic, shintani_fan, Cone};
use shintani::cyclo::CycloNum;
use shintani::exact::gen::{apply_tau, gen_cocycle_residual, ConeRational};
use shintani::exact::hecke::{hecke_l_neg, hecke_l_unrolled, main_identity_exact};
use shintani::exact::lerch::lerch_fan;
use shintani::field::{make_field, Elem, Field, FieldSpec, Ideal, RayClassGroup};
use shintani::padic::kl::coleman_reference;
use shintani::padic::lp::{ctx_for, verify_main};
use shintani::padic::measure::check_measure;
use shintani::padic::polylog::{kummer_level, polylog_kummer, polylog_value, LiPath};
use shintani::padic::PadicCtx;
use shintani::torsion::{char_value, fold_classes, primitive_torsion_points, torsion_points, TorsionPoint};
use std::time::Instant;

/// Wall-clock budgets in seconds, per criterion.
const BUDGET: [f64; 10] = [1.0, 30.0, 10.0, 120.0, 300.0, 900.0, 120.0, 120.0, 300.0, 30.0];
/// p-adic comparisons in criteria 4 and 6: congruence modulo p^M with these M.
const MEASURE_PRECISION: u32 = 4;
const MAIN_PRECISION: u32 = 3;
const COLEMAN_PRECISION: u32 = 4;
const SEED: u64 = 20240601;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn field(spec: FieldSpec) -> Field {
    make_field(&spec).unwrap()
}

fn group(f: &Field, m: &Ideal) -> RayClassGroup {
    RayClassGroup::new(f, m).unwrap()
}

fn principal(f: &Field, n: i64) -> Ideal {
    Ideal::principal(f, &f.int(n))
}

fn base_points(f: &Field, g: &RayClassGroup) -> Vec<TorsionPoint> {
    let o = Ideal::unit(f);
    fold_classes(f, g).entries.into_iter().filter(|(_, t)| t.owner == o).map(|(_, t)| t).collect()
}

fn random_tp(f: &Field, rng: &mut ChaCha8Rng, den: i64) -> Elem {
    random_tp_in(f, rng, den, 60)
}

fn random_tp_in(f: &Field, rng: &mut ChaCha8Rng, den: i64, size: i64) -> Elem {
    loop {
        let d = rng.gen_range(1..=den);
        let x = f.elem(qf(rng.gen_range(1..size), d), qf(rng.gen_range(-2 * size / 3..2 * size / 3), d));
        if x.is_totally_positive() {
            return x;
        }
    }
}

// ---------------------------------------------------------------- criterion 1

/// B_{n,χ} from Σ_{a=1}^{N} χ(a) t e^{at}/(e^{Nt} - 1) = Σ B_{n,χ} tⁿ/n!, by power-series division.
fn generalized_bernoulli(chi: &dyn Fn(i64) -> i64, n_mod: i64, terms: usize) -> Vec<Q> {
    let fact: Vec<Q> = (0..=terms + 1).scan(Q::one(), |acc, i| {
        if i > 0 {
            *acc *= q(i as i64);
        }
        Some(acc.clone())
    }).collect();
    // numerator Σ χ(a) e^{at}, denominator (e^{Nt} - 1)/t
    let num: Vec<Q> = (0..=terms)
        .map(|i| (1..=n_mod).fold(Q::zero(), |s, a| s + q(chi(a)) * Q::from_integer(BigInt::from(a).pow(i as u32))) / &fact[i])
        .collect();
    let den: Vec<Q> = (0..=terms).map(|i| Q::from_integer(BigInt::from(n_mod).pow(i as u32 + 1)) / &fact[i + 1]).collect();
    let mut quot = vec![Q::zero(); terms + 1];
    for i in 0..=terms {
        let mut s = num[i].clone();
        for j in 1..=i {
            s -= &den[j] * &quot[i - j];
        }
        quot[i] = s / &den[0];
    }
    quot.iter().zip(&fact).map(|(c, f)| c * f).collect()
}

fn criterion_1() -> Outcome {
    let f = field(FieldSpec::Rational);
    let odd3 = |a: i64| [0i64, 1, -1][a.rem_euclid(3) as usize];
    let odd4 = |a: i64| [0i64, 1, 0, -1][a.rem_euclid(4) as usize];
    let mut checked = 0;
    for (n, chi_fn) in [(3i64, &odd3 as &dyn Fn(i64) -> i64), (4, &odd4)] {
        let g = group(&f, &principal(&f, n));
        let chi = (0..g.chars.len()).find(|&c| {
            (1..n).filter(|a| num_integer::gcd(*a, n) == 1).all(|a| {
                char_value(&g, c, g.class_of(&f, &principal(&f, a))) == CycloNum::from_q(1, &q(chi_fn(a)))
            })
        });
        let Some(chi) = chi else {
            return outcome(false, format!("no character mod {n} matches the odd quadratic character"));
        };
        let b = generalized_bernoulli(chi_fn, n, 7);
        for k in 0..=5u32 {
            let expected = -&b[k as usize + 1] / q(k as i64 + 1);
            let got = hecke_l_neg(&f, &g, chi, k, None).unwrap();
            if got.to_rational() != Some(expected.clone()) {
                return outcome(false, format!("mod {n}, k = {k}: {got} against {expected}"));
            }
            checked += 1;
        }
    }
    outcome(true, format!("{checked}/12 values exact"))
}

// ---------------------------------------------------------------- criterion 2

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut points, mut series, mut skipped) = (0, 0, 0);
    for (d, m) in [(3u64, 7i64), (5, 7)] {
        let f = field(FieldSpec::Quadratic(d));
        let o = Ideal::unit(&f);
        let xis = primitive_torsion_points(&f, &o, &principal(&f, m));
        for t in 0..100 {
            let al: Vec<Elem> = (0..3).map(|_| random_tp_in(&f, &mut rng, 1, 16)).collect();
            for _ in 0..50 {
                let u = random_tp(&f, &mut rng, 7);
                let c = cocycle_characteristic(&al, &u);
                if c != 0 {
                    return outcome(false, format!("D = {d}: characteristic sum {c} at {u} for {al:?}"));
                }
                points += 1;
            }
            // the series identity at full degree on every fifth tuple
            let cap = if t % 5 == 0 { 8 } else { 4 };
            match xis.iter().find(|x| al.iter().all(|a| x.admissible_at(&f, a, None))) {
                Some(xi) => {
                    if !gen_cocycle_residual(&f, &al, xi, cap).is_zero() {
                        return outcome(false, format!("D = {d}: generating-class residual nonzero for {al:?}"));
                    }
                    series += 1;
                }
                None => skipped += 1,
            }
        }
    }
    outcome(true, format!("{points} point evaluations vanish; {series} series residuals vanish ({skipped} tuples without an admissible ξ)"))
}

// ---------------------------------------------------------------- criterion 3

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let mut total = 0;
    for (d, m, p) in [(2u64, 3i64, 5u64), (3, 5, 2), (5, 3, 2)] {
        let f = field(FieldSpec::Quadratic(d));
        let o = Ideal::unit(&f);
        let xi = primitive_torsion_points(&f, &o, &principal(&f, m))[0].clone();
        let fans = [shintani_fan(&f, &o), lerch_fan(&f, &xi, Some(p)).unwrap()];
        for _ in 0..1000 {
            let u = random_tp(&f, &mut rng, 9);
            for (i, fan) in fans.iter().enumerate() {
                let hits = fan.locate(&f, &u).len();
                if hits != 1 {
                    let which = if i == 0 { "base" } else { "refined" };
                    return outcome(false, format!("D = {d}: {u} lies in {hits} cones of the {which} fan"));
                }
            }
            total += 1;
        }
    }
    outcome(true, format!("{total} points, each in exactly one cone before and after refinement"))
}

// ---------------------------------------------------------------- criterion 4

fn criterion_4() -> Outcome {
    let mut worst = i64::MAX;
    let mut count = 0;
    for (spec, m, p) in [(FieldSpec::Rational, 4i64, 5u64), (FieldSpec::Quadratic(2), 5, 3), (FieldSpec::Quadratic(5), 4, 3)] {
        let f = field(spec);
        let o = Ideal::unit(&f);
        let xis = primitive_torsion_points(&f, &o, &principal(&f, m));
        let twists: Vec<TorsionPoint> = [p as i64, (p * p) as i64].iter().flat_map(|&pe| torsion_points(&f, &o, &principal(&f, pe))).collect();
        let mut done = 0;
        let mut i = 0;
        while done < 10 {
            let xi = &xis[i % xis.len()];
            let tw = &twists[(7 * i + 1) % twists.len()];
            let k = (i % 3) as u32;
            i += 1;
            let x = xi.times(&f, tw);
            let r = check_measure(&f, &x, k, p, MEASURE_PRECISION).unwrap();
            if !r.passed {
                return outcome(false, format!("{}: valuation {} < {} at k = {k}", f.describe(), r.valuation, r.target));
            }
            worst = worst.min(r.valuation);
            done += 1;
            count += 1;
        }
    }
    let worst = if worst == i64::MAX { "exact".to_string() } else { format!("p^{worst}") };
    outcome(true, format!("{count} triples agree modulo p^{MEASURE_PRECISION} (worst difference {worst})"))
}

// ---------------------------------------------------------------- criterion 5

fn identity_config(f: &Field, m: &Ideal, p: u64, ns: &[u32]) -> Result<(usize, usize), String> {
    let g = group(f, m);
    let chis = g.primitive_chars(f);
    let pts = base_points(f, &g);
    let (mut ok, mut nonzero) = (0, 0);
    for &chi in &chis {
        for xi in &pts {
            for &n in ns {
                let r = main_identity_exact(f, &g, chi, xi, n, p).map_err(|e| e.to_string())?;
                if !(r.holds && r.euler_holds) {
                    return Err(format!("{} mod {}, p = {p}, n = {n}: {} vs {}", f.describe(), m.to_string_hnf(), r.lhs, r.rhs));
                }
                ok += 1;
                nonzero += (!r.lhs.is_zero()) as usize;
            }
        }
    }
    Ok((ok, nonzero))
}

fn criterion_5() -> Outcome {
    let q_ = field(FieldSpec::Rational);
    let q2 = field(FieldSpec::Quadratic(2));
    let q3 = field(FieldSpec::Quadratic(3));
    let mut lines = Vec::new();
    let sqrt3 = Ideal::principal(&q3, &Elem::sqrt_d(3));
    let vacuous = group(&q3, &sqrt3).primitive_chars(&q3).is_empty();
    // n ≡ -1 mod p-1, plus exponents where odd characters give nonzero values
    let configs: [(&Field, Ideal, u64, Vec<u32>); 3] = [
        (&q_, principal(&q_, 3), 5, vec![3, 7, 0, 2, 4]),
        (&q_, principal(&q_, 4), 3, vec![1, 3, 5, 0, 2]),
        (&q2, principal(&q2, 3), 5, vec![3, 7, 0, 1, 2]),
    ];
    for (f, m, p, ns) in &configs {
        match identity_config(f, m, *p, ns) {
            Ok((ok, nz)) => lines.push(format!("{} mod {} p={p}: {ok} exact ({nz} nonzero)", f.describe(), m.min_rational())),
            Err(e) => return outcome(false, e),
        }
    }
    let note = if vacuous { "Q(√3) 𝔤=(√3): vacuous, no primitive character" } else { "Q(√3) 𝔤=(√3): has primitive characters" };
    if !vacuous {
        if let Err(e) = identity_config(&q3, &sqrt3, 5, &[3, 7]) {
            return outcome(false, e);
        }
    }
    lines.push(note.to_string());
    outcome(true, lines.join("; "))
}

// ---------------------------------------------------------------- criterion 6

fn criterion_6() -> Outcome {
    let q_ = field(FieldSpec::Rational);
    let q2 = field(FieldSpec::Quadratic(2));
    let mut total = 0;
    for (f, m, p) in [(&q_, 3i64, 5u64), (&q_, 4, 3), (&q2, 3, 5)] {
        let g = group(f, &principal(f, m));
        for chi in g.primitive_chars(f) {
            let ctx = ctx_for(f, &g, chi, p, MAIN_PRECISION).unwrap();
            for xi in base_points(f, &g) {
                for k in -3..=3 {
                    for path in [LiPath::Truncation, LiPath::KummerLimit] {
                        let r = verify_main(f, &g, chi, &xi, k, &ctx, path).unwrap();
                        if !r.agree {
                            return outcome(false, format!("{} mod {m}, p = {p}, k = {k}, {path:?}: {:?} vs {:?}", f.describe(), r.lhs, r.rhs));
                        }
                        total += 1;
                    }
                }
            }
        }
    }
    outcome(true, format!("{total} comparisons agree modulo p^{MAIN_PRECISION}"))
}

// ---------------------------------------------------------------- criterion 7

fn criterion_7() -> Outcome {
    let m = COLEMAN_PRECISION.to_string();
    let report = cli::run(["shintani", "verify-coleman", "--N", "3", "--p", "5", "--k", "-3..3", "--M", &m]);
    if report.exit_code() != 0 || report.items.len() != 7 {
        return outcome(false, format!("verify-coleman: {}", report.summary()));
    }
    // the Bernoulli construction again, outside the CLI
    let f = field(FieldSpec::Rational);
    let g = group(&f, &principal(&f, 3));
    let chi = g.primitive_chars(&f)[0];
    let ctx = ctx_for(&f, &g, chi, 5, COLEMAN_PRECISION).unwrap();
    let xi = &base_points(&f, &g)[0];
    for k in -3..=3 {
        let r = verify_main(&f, &g, chi, xi, k, &ctx, LiPath::Truncation).unwrap();
        let kl = coleman_reference(&f, &g, chi, k, &ctx).unwrap();
        if !ctx.ar.congruent(&r.lhs, &kl, COLEMAN_PRECISION as i64) {
            return outcome(false, format!("k = {k}: L_p {:?} vs Bernoulli {:?}", r.lhs, kl));
        }
    }
    outcome(true, format!("7/7 k agree with the polylogarithm sum and the Bernoulli construction modulo 5^{COLEMAN_PRECISION}"))
}

// ---------------------------------------------------------------- criterion 8

fn kummer_pairs(f: &Field, m: i64, p: u64, ks: &[i64], limit: usize, out: &mut Vec<String>) -> Result<usize, String> {
    let o = Ideal::unit(f);
    let xis = primitive_torsion_points(f, &o, &principal(f, m));
    let n = xis.iter().fold(1, |a, x| shintani::arith::lcm_u64(a, x.n));
    let r = 1;
    let tight = if p == 2 { r + 2 } else { r + 1 };
    let ctx = PadicCtx::new(f, p, n, tight + 2, 4).map_err(|e| e.to_string())?;
    let mut done = 0;
    'outer: for xi in &xis {
        for &k in ks {
            if done == limit {
                break 'outer;
            }
            let a = polylog_kummer(f, &ctx, xi, k, r).map_err(|e| e.to_string())?;
            let b = polylog_kummer(f, &ctx, xi, k, r + 1).map_err(|e| e.to_string())?;
            if !ctx.ar.congruent(&a, &b, tight as i64) {
                return Err(format!("{} mod {m}, p = {p}, k = {k}: levels {r} and {} differ mod p^{tight}", f.describe(), r + 1));
            }
            done += 1;
        }
    }
    out.push(format!("{} mod {m} p={p}: {done}", f.describe()));
    Ok(done)
}

fn criterion_8() -> Outcome {
    let q_ = field(FieldSpec::Rational);
    let q2 = field(FieldSpec::Quadratic(2));
    let mut parts = Vec::new();
    let mut total = 0;
    for (f, m, p, ks, limit) in [
        (&q_, 4i64, 3u64, vec![-2, -1, 0, 1, 2], 10),
        (&q_, 3, 5, vec![-1, 0, 1, 2], 8),
        (&q_, 3, 2, vec![1], 1),
        (&q2, 3, 5, vec![1], 1),
    ] {
        match kummer_pairs(f, m, p, &ks, limit, &mut parts) {
            Ok(n) => total += n,
            Err(e) => return outcome(false, e),
        }
    }
    outcome(total == 20, format!("{total}/20 pairs congruent at consecutive levels ({})", parts.join(", ")))
}

// ---------------------------------------------------------------- criterion 9

fn criterion_9() -> Outcome {
    let q_ = field(FieldSpec::Rational);
    let q2 = field(FieldSpec::Quadratic(2));
    let q5 = field(FieldSpec::Quadratic(5));
    let mut values = 0;
    for (f, m, p, ks, limit) in [
        (&q_, 4i64, 3u64, vec![-2, -1, 0, 1, 2], 10),
        (&q_, 3, 5, vec![-1, 1, 2], 6),
        (&q5, 3, 2, vec![0, 1], 2),
        (&q2, 3, 5, vec![1, 2], 2),
    ] {
        let o = Ideal::unit(f);
        let xis = primitive_torsion_points(f, &o, &principal(f, m));
        let n = xis.iter().fold(1, |a, x| shintani::arith::lcm_u64(a, x.n));
        let ctx = PadicCtx::new(f, p, n, MAIN_PRECISION, 4).unwrap();
        let mut done = 0;
        'outer: for xi in &xis {
            for &k in &ks {
                if done == limit {
                    break 'outer;
                }
                let a = polylog_value(f, &ctx, xi, k, LiPath::Truncation).unwrap();
                let b = polylog_value(f, &ctx, xi, k, LiPath::KummerLimit).unwrap();
                let prec = (kummer_level(&ctx) + if p == 2 { 2 } else { 1 }).min(ctx.m);
                if !ctx.ar.congruent(&a, &b, prec as i64) {
                    return outcome(false, format!("{} mod {m}, p = {p}, k = {k}: paths disagree", f.describe()));
                }
                done += 1;
            }
        }
        values += done;
    }
    let mut chars = 0;
    let q3 = field(FieldSpec::Quadratic(3));
    for (f, m) in [(&q_, 3i64), (&q_, 4), (&q_, 5), (&q_, 7), (&q2, 3), (&q5, 3), (&q5, 4), (&q3, 5)] {
        let g = group(f, &principal(f, m));
        for chi in g.primitive_chars(f) {
            for k in 0..=3 {
                let a = hecke_l_neg(f, &g, chi, k, None).unwrap();
                let b = hecke_l_unrolled(f, &g, chi, k).unwrap();
                if a != b {
                    return outcome(false, format!("{} mod {m}, χ{chi}, k = {k}: Fourier {a} vs unrolled {b}", f.describe()));
                }
            }
            chars += 1;
        }
    }
    outcome(values == 20, format!("{values}/20 polylogarithms agree across paths; Fourier = unrolled for {chars} characters, k ≤ 3"))
}

// ---------------------------------------------------------------- criterion 10

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 10);
    let mut done = 0;
    let cap = 3;
    for (d, m) in [(5u64, 4i64), (2, 3)] {
        let f = field(FieldSpec::Quadratic(d));
        let o = Ideal::unit(&f);
        let xis = primitive_torsion_points(&f, &o, &principal(&f, m));
        let mut here = 0;
        while here < 10 {
            let small = |rng: &mut ChaCha8Rng| loop {
                let x = f.elem(q(rng.gen_range(1..8)), q(rng.gen_range(-4..5)));
                if x.is_totally_positive() {
                    return x;
                }
            };
            let cone = Cone::new(vec![small(&mut rng), small(&mut rng)]);
            if cone.orientation() == 0 {
                continue;
            }
            let Some(xi) = xis.iter().find(|x| cone.gens.iter().all(|a| x.admissible_at(&f, a, None))) else { continue };
            let r = ConeRational::of_cone(&f, &cone, &o);
            let base = r.expand(&f, xi, cap + 1);
            for tau in 0..2 {
                if r.differentiate(tau).expand(&f, xi, cap) != apply_tau(&f, &o, &base, tau) {
                    return outcome(false, format!("D = {d}: cone {:?}, τ = {tau}", cone.gens));
                }
            }
            here += 1;
        }
        done += here;
    }
    outcome(true, format!("{done} random cones, both embeddings, exact to degree {cap}"))
}

const CRITERIA: [(&str, fn() -> Outcome); 10] = [
    ("Bernoulli oracle", criterion_1),
    ("cocycle identities", criterion_2),
    ("Shintani cover", criterion_3),
    ("measure interpolation", criterion_4),
    ("exact main identity", criterion_5),
    ("p-adic main theorem", criterion_6),
    ("Coleman recovery", criterion_7),
    ("Kummer congruences", criterion_8),
    ("path independence", criterion_9),
    ("differential relation", criterion_10),
];

fn main() {
    let wanted: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, run)) in CRITERIA.iter().enumerate() {
        let n = i + 1;
        if !wanted.is_empty() && !wanted.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let res = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        let in_time = secs <= BUDGET[i];
        let ok = res.passed && in_time;
        failed += (!ok) as usize;
        let timing = if in_time { format!("{secs:.2}s of {}s", BUDGET[i]) } else { format!("{secs:.2}s OVER BUDGET {}s", BUDGET[i]) };
        println!("criterion {n:>2} {} {name}: {} [{timing}]", if ok { "PASS" } else { "FAIL" }, res.detail);
    }
    if failed > 0 {
        println!("{failed} criterion/criteria failed");
        std::process::exit(1);
    }
}
