//! Fast module-qualified checks run by the `selftest` subcommand.

use super::config::RunConfig;
use super::Report;
use crate::arith::{bernoulli_numbers, bernoulli_poly, q, qf, Q};
use crate::cones::shintani_fan;
use crate::cyclo::CycloNum;
use crate::exact::hecke::{hecke_l_neg, hecke_l_unrolled, main_identity_exact};
use crate::exact::lerch::{lerch_neg_p, PRoute};
use crate::field::{abs_norm_u64, make_field, Elem, Field, FieldSpec, Ideal, NarrowClassGroup, RayClassGroup};
use crate::padic::lp::{ctx_for, verify_interpolation, verify_main};
use crate::padic::polylog::LiPath;
use crate::padic::PadicCtx;
use crate::torsion::{fold_classes, gauss_sum, primitive_torsion_points};
use crate::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

type Check = fn(&mut ChaCha8Rng) -> Result<String, String>;

const CHECKS: &[(&str, Check)] = &[
    ("field_core::units", units),
    ("field_core::ray_class_orders", ray_class_orders),
    ("torsion_chars::gauss_sums", gauss_sums),
    ("torsion_chars::simple_transitivity", simple_transitivity),
    ("cones_shintani::fan_partition", fan_partition),
    ("exact_values::bernoulli", bernoulli),
    ("exact_values::p_routes", p_routes),
    ("exact_values::main_identity", main_identity),
    ("padic_engine::embedding", embedding),
    ("padic_engine::interpolation", interpolation),
    ("padic_engine::polylog_formula", polylog_formula),
];

pub fn run(cfg: &RunConfig, r: &mut Report) -> Result<(), Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.unwrap_or(0));
    for (name, check) in CHECKS {
        match check(&mut rng) {
            Ok(detail) => r.check(*name, json!(detail), true),
            Err(witness) => {
                r.check(*name, json!(witness), false);
                return Err(Error::Verification(format!("{name}: {witness}")));
            }
        }
    }
    Ok(())
}

fn field(spec: FieldSpec) -> Field {
    make_field(&spec).expect("built-in field")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn units(_: &mut ChaCha8Rng) -> Result<String, String> {
    for (d, h) in [(2u64, 1usize), (3, 2), (5, 1), (6, 2), (7, 2)] {
        let f = field(FieldSpec::Quadratic(d));
        let e = &f.eps_plus;
        ensure(e.norm() == q(1) && e.is_totally_positive() && f.is_integral(e), || format!("ε₊ = {e} for D = {d}"))?;
        let cl = NarrowClassGroup::new(&f).map_err(|e| e.to_string())?;
        ensure(cl.order() == h, || format!("h⁺ = {} for D = {d}, expected {h}", cl.order()))?;
    }
    let f = field(FieldSpec::Quadratic(3));
    ensure(f.eps_plus == f.elem(q(2), q(1)), || format!("ε₊ = {} for D = 3", f.eps_plus))?;
    Ok("D = 2, 3, 5, 6, 7".into())
}

fn ray_class_orders(_: &mut ChaCha8Rng) -> Result<String, String> {
    let f = field(FieldSpec::Rational);
    for n in [3i64, 4, 5, 7, 8, 12] {
        let g = RayClassGroup::new(&f, &Ideal::principal(&f, &f.int(n))).map_err(|e| e.to_string())?;
        let phi = crate::arith::euler_phi(n as u64) as usize;
        ensure(g.order() == phi, || format!("|Cl⁺(ℚ, {n})| = {}, expected {phi}", g.order()))?;
    }
    Ok("ℚ, N ≤ 12".into())
}

fn gauss_sums(_: &mut ChaCha8Rng) -> Result<String, String> {
    for (spec, m) in [(FieldSpec::Rational, 5i64), (FieldSpec::Rational, 12), (FieldSpec::Quadratic(2), 3)] {
        let f = field(spec);
        let md = Ideal::principal(&f, &f.int(m));
        let g = RayClassGroup::new(&f, &md).map_err(|e| e.to_string())?;
        let xi = primitive_torsion_points(&f, &Ideal::unit(&f), &md)[0].clone();
        for chi in g.primitive_chars(&f) {
            let s = gauss_sum(&f, &g, chi, &xi);
            let nn = CycloNum::from_q(1, &q(abs_norm_u64(&md) as i64));
            ensure(s.mul(&s.conj()) == nn, || format!("|g(χ{chi})|² ≠ N𝔤 over {} mod {m}", f.describe()))?;
        }
    }
    Ok("|g(χ)|² = N𝔤".into())
}

fn simple_transitivity(_: &mut ChaCha8Rng) -> Result<String, String> {
    for (spec, m) in [(FieldSpec::Rational, 12i64), (FieldSpec::Quadratic(3), 5), (FieldSpec::Quadratic(5), 4)] {
        let f = field(spec);
        let g = RayClassGroup::new(&f, &Ideal::principal(&f, &f.int(m))).map_err(|e| e.to_string())?;
        let tc = fold_classes(&f, &g);
        let mut map = tc.action_map(&f, &g, &tc.entries[0].1);
        map.sort();
        ensure(map == (0..g.order()).collect::<Vec<_>>(), || format!("Cl⁺(𝔤) does not act simply transitively over {} mod {m}", f.describe()))?;
    }
    Ok("three moduli".into())
}

fn random_totally_positive(f: &Field, rng: &mut ChaCha8Rng) -> Elem {
    loop {
        let x = f.elem(qf(rng.gen_range(1..60), rng.gen_range(1..5)), qf(rng.gen_range(-40..40), rng.gen_range(1..5)));
        if x.is_totally_positive() {
            return x;
        }
    }
}

fn fan_partition(rng: &mut ChaCha8Rng) -> Result<String, String> {
    for d in [2u64, 3, 5] {
        let f = field(FieldSpec::Quadratic(d));
        let fan = shintani_fan(&f, &Ideal::unit(&f));
        for _ in 0..200 {
            let u = random_totally_positive(&f, rng);
            let hits = fan.locate(&f, &u).len();
            ensure(hits == 1, || format!("{u} lies in {hits} cones of the fan for D = {d}"))?;
        }
    }
    Ok("600 random points".into())
}

/// L(χ, -k) = -B_{k+1,χ}/(k+1) with B_{m,χ} = N^{m-1} Σ_a χ(a) B_m(a/N).
fn bernoulli(_: &mut ChaCha8Rng) -> Result<String, String> {
    let f = field(FieldSpec::Rational);
    let bern = bernoulli_numbers(8);
    for n in [3i64, 4, 5] {
        let g = RayClassGroup::new(&f, &Ideal::principal(&f, &f.int(n))).map_err(|e| e.to_string())?;
        for chi in g.primitive_chars(&f) {
            for k in 0..4u32 {
                let m = k as usize + 1;
                let mut b = CycloNum::zero(g.chars[chi].n);
                for a in 1..n {
                    if num_integer::gcd(a, n) != 1 {
                        continue;
                    }
                    let x = qf(a, n);
                    let val = bernoulli_poly(m, &x, &bern);
                    let c = g.class_of(&f, &Ideal::principal(&f, &f.int(a)));
                    b = b.add(&crate::torsion::char_value(&g, chi, c).scale(&val));
                }
                let expected = b.scale(&(Q::from_integer(n.into()).pow(m as i32 - 1) * qf(-1, m as i64)));
                let got = hecke_l_neg(&f, &g, chi, k, None).map_err(|e| e.to_string())?;
                ensure(got == expected, || format!("L(χ{chi} mod {n}, -{k}) = {got}, Bernoulli gives {expected}"))?;
            }
        }
    }
    Ok("N = 3, 4, 5; k ≤ 3".into())
}

fn p_routes(_: &mut ChaCha8Rng) -> Result<String, String> {
    let f = field(FieldSpec::Quadratic(2));
    let md = Ideal::principal(&f, &f.int(3));
    for xi in primitive_torsion_points(&f, &Ideal::unit(&f), &md).iter().take(2) {
        for k in 0..2 {
            let v: Vec<CycloNum> = [PRoute::Series, PRoute::JSum, PRoute::Restriction]
                .iter()
                .map(|&rt| lerch_neg_p(&f, xi, k, 5, rt))
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?;
            ensure(v[0] == v[1] && v[1] == v[2], || format!("p-modified routes disagree at k = {k}"))?;
        }
    }
    let g = RayClassGroup::new(&f, &md).map_err(|e| e.to_string())?;
    for chi in g.primitive_chars(&f) {
        let a = hecke_l_neg(&f, &g, chi, 1, None).map_err(|e| e.to_string())?;
        let b = hecke_l_unrolled(&f, &g, chi, 1).map_err(|e| e.to_string())?;
        ensure(a == b, || format!("Fourier and unrolled L(χ{chi}, -1) disagree"))?;
    }
    Ok("ℚ(√2), 𝔤 = (3), p = 5".into())
}

fn main_identity(_: &mut ChaCha8Rng) -> Result<String, String> {
    let f = field(FieldSpec::Rational);
    let md = Ideal::principal(&f, &f.int(4));
    let g = RayClassGroup::new(&f, &md).map_err(|e| e.to_string())?;
    let chi = g.primitive_chars(&f)[0];
    let xi = primitive_torsion_points(&f, &Ideal::unit(&f), &md)[0].clone();
    for n in 0..4 {
        let rep = main_identity_exact(&f, &g, chi, &xi, n, 3).map_err(|e| e.to_string())?;
        ensure(rep.holds && rep.euler_holds, || format!("exact identity fails at n = {n}: {} vs {}", rep.lhs, rep.rhs))?;
    }
    Ok("ℚ mod 4, p = 3".into())
}

fn embedding(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let f = field(FieldSpec::Quadratic(5));
    let ctx = PadicCtx::new(&f, 7, 12, 6, 4).map_err(|e| e.to_string())?;
    let ar = &ctx.ar;
    let random = |rng: &mut ChaCha8Rng| {
        let mut x = CycloNum::zero(12);
        for _ in 0..3 {
            x = x.add(&CycloNum::root(12, rng.gen_range(0..12)).scale(&qf(rng.gen_range(-9..10), rng.gen_range(1..7))));
        }
        x
    };
    for _ in 0..30 {
        let (a, b) = (random(rng), random(rng));
        let (ea, eb) = (ctx.embed(&a).map_err(|e| e.to_string())?, ctx.embed(&b).map_err(|e| e.to_string())?);
        let lhs = ctx.embed(&a.mul(&b)).map_err(|e| e.to_string())?;
        ensure(ar.congruent(&lhs, &ar.mul(&ea, &eb), 6), || format!("embedding is not multiplicative on {a}, {b}"))?;
        let lhs = ctx.embed(&a.add(&b)).map_err(|e| e.to_string())?;
        ensure(ar.congruent(&lhs, &ar.add(&ea, &eb), 6), || format!("embedding is not additive on {a}, {b}"))?;
    }
    Ok("30 random pairs in ℚ(ζ₁₂) at p = 7".into())
}

fn interpolation(_: &mut ChaCha8Rng) -> Result<String, String> {
    let f = field(FieldSpec::Rational);
    let g = RayClassGroup::new(&f, &Ideal::principal(&f, &f.int(3))).map_err(|e| e.to_string())?;
    let chi = g.primitive_chars(&f)[0];
    let ctx = ctx_for(&f, &g, chi, 5, 3).map_err(|e| e.to_string())?;
    for k in 0..3 {
        let rep = verify_interpolation(&f, &g, chi, k, &ctx).map_err(|e| e.to_string())?;
        ensure(rep.agree, || format!("interpolation fails at k = {k}"))?;
    }
    Ok("ℚ mod 3, p = 5, M = 3".into())
}

fn polylog_formula(_: &mut ChaCha8Rng) -> Result<String, String> {
    let f = field(FieldSpec::Rational);
    let md = Ideal::principal(&f, &f.int(4));
    let g = RayClassGroup::new(&f, &md).map_err(|e| e.to_string())?;
    let chi = g.primitive_chars(&f)[0];
    let ctx = ctx_for(&f, &g, chi, 3, 3).map_err(|e| e.to_string())?;
    let xi = primitive_torsion_points(&f, &Ideal::unit(&f), &md)[0].clone();
    for k in -1..=1 {
        for path in [LiPath::Truncation, LiPath::KummerLimit] {
            let rep = verify_main(&f, &g, chi, &xi, k, &ctx, path).map_err(|e| e.to_string())?;
            ensure(rep.agree, || format!("polylogarithm formula fails at k = {k} along {path:?}"))?;
        }
    }
    Ok("ℚ mod 4, p = 3, M = 3".into())
}
