//! Property tests for the p-adic layer.

use proptest::prelude::*;
use shintani::arith::q;
use shintani::cones::{refine_for, RefineOptions};
use shintani::cyclo::CycloNum;
use shintani::exact::lerch::{cone_value, lerch_neg_p, PRoute};
use shintani::field::{make_field, Field, FieldSpec, Ideal, RayClassGroup};
use shintani::padic::lp::{ctx_for, lp_value};
use shintani::padic::measure::{coordinate_valuation, riemann_sum};
use shintani::padic::polylog::{polylog_value, LiPath};
use shintani::padic::PadicCtx;
use shintani::torsion::primitive_torsion_points;
use std::sync::OnceLock;

fn rational() -> &'static Field {
    static F: OnceLock<Field> = OnceLock::new();
    F.get_or_init(|| make_field(&FieldSpec::Rational).unwrap())
}

fn sqrt2() -> &'static Field {
    static F: OnceLock<Field> = OnceLock::new();
    F.get_or_init(|| make_field(&FieldSpec::Quadratic(2)).unwrap())
}

fn cyclo(n: u64, coeffs: &[i64], den: i64) -> CycloNum {
    coeffs
        .iter()
        .enumerate()
        .fold(CycloNum::zero(n), |acc, (i, &c)| acc.add(&CycloNum::root(n, i as i64).scale(&q(c))))
        .scale(&shintani::arith::qf(1, den))
}

fn without_timings(v: &serde_json::Value) -> serde_json::Value {
    match v {
        serde_json::Value::Object(m) => m.iter().filter(|(k, _)| !k.ends_with("seconds")).map(|(k, x)| (k.clone(), without_timings(x))).collect(),
        other => other.clone(),
    }
}

fn in_pool<T: Send>(threads: usize, job: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(job)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn embedding_is_a_ring_homomorphism(
        a in prop::collection::vec(-40i64..40, 4),
        b in prop::collection::vec(-40i64..40, 4),
        da in prop::sample::select(vec![1i64, 2, 3, 4, 6, 7]),
        db in prop::sample::select(vec![1i64, 2, 3, 4, 6, 7]),
    ) {
        // ℚ(ζ_8) at p = 5 sits in the unramified quadratic extension
        let ctx = PadicCtx::new(rational(), 5, 8, 4, 4).unwrap();
        let (x, y) = (cyclo(8, &a, da), cyclo(8, &b, db));
        let (ex, ey) = (ctx.embed(&x).unwrap(), ctx.embed(&y).unwrap());
        let ar = &ctx.ar;
        prop_assert!(ar.congruent(&ctx.embed(&x.add(&y)).unwrap(), &ar.add(&ex, &ey), 4));
        prop_assert!(ar.congruent(&ctx.embed(&x.mul(&y)).unwrap(), &ar.mul(&ex, &ey), 4));
    }

    #[test]
    fn teichmuller_split_recombines(c in prop::collection::vec(0u128..1_000_000, 2), p in prop::sample::select(vec![3u64, 5, 7])) {
        // p² ≡ 1 mod 8: the 8th roots of unity generate the unramified quadratic extension
        let ctx = PadicCtx::new(rational(), p, 8, 5, 4).unwrap();
        let ar = &ctx.ar;
        let x = ar.from_coeffs(c.clone());
        prop_assume!(x.v == 0 && !x.is_zero());
        let (w, rest) = ctx.teich_split(&x).unwrap();
        prop_assert!(ar.congruent(&ar.mul(&w, &rest), &x, 5));
        prop_assert!(ar.congruent(&rest, &ar.one(), 1));
        let q_ = p.pow(ar.d as u32);
        prop_assert!(ar.congruent(&ar.pow(&w, q_ - 1), &ar.one(), 5));
    }

    #[test]
    fn teichmuller_split_at_two(n in 1i64..10_000) {
        let x = 2 * n + 1;
        let ctx = PadicCtx::new(rational(), 2, 1, 6, 4).unwrap();
        let ar = &ctx.ar;
        let (w, rest) = ctx.teich_split(&ar.from_int(x)).unwrap();
        prop_assert!(ar.congruent(&ar.mul(&w, &rest), &ar.from_int(x), 6));
        prop_assert!(ar.congruent(&rest, &ar.one(), 2));
        prop_assert!(ar.congruent(&ar.mul(&w, &w), &ar.one(), 6));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn higher_precision_refines_lower(k in -2i64..=3, t in 0i64..4, extra in 1u32..3) {
        let f = rational();
        let g = RayClassGroup::new(f, &Ideal::principal(f, &f.int(4))).unwrap();
        let chi = g.primitive_chars(f)[0];
        let lo = ctx_for(f, &g, chi, 3, 3).unwrap();
        let hi = ctx_for(f, &g, chi, 3, 3 + extra).unwrap();
        let a = lp_value(f, &g, chi, t, &q(k), &lo).unwrap();
        let b = lp_value(f, &g, chi, t, &q(k), &hi).unwrap();
        prop_assert_eq!(lo.ar.to_int_mod(&a, 3), hi.ar.to_int_mod(&b, 3));
    }

    #[test]
    fn polylog_precision_monotone(k in 1i64..=3, xi_idx in 0usize..2) {
        let f = rational();
        let xis = primitive_torsion_points(f, &Ideal::unit(f), &Ideal::principal(f, &f.int(3)));
        let xi = &xis[xi_idx % xis.len()];
        let lo = PadicCtx::new(f, 5, 3, 2, 4).unwrap();
        let hi = PadicCtx::new(f, 5, 3, 3, 4).unwrap();
        let a = polylog_value(f, &lo, xi, k, LiPath::Truncation).unwrap();
        let b = polylog_value(f, &hi, xi, k, LiPath::Truncation).unwrap();
        prop_assert_eq!(lo.ar.to_int_mod(&a, 2), hi.ar.to_int_mod(&b, 2));
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let args = ["shintani", "verify-main", "--D", "rational", "--modulus", "4", "--p", "3", "--k", "-1..2", "--M", "3"];
    let one = in_pool(1, || shintani::cli::run(args));
    let three = in_pool(3, || shintani::cli::run(args));
    assert_eq!(one.exit_code(), 0, "{}", one.summary());
    let strip = |r: &shintani::cli::Report| r.items.iter().map(|i| (i.key.clone(), without_timings(&i.value), i.passed)).collect::<Vec<_>>();
    assert_eq!(strip(&one), strip(&three));

    let f = sqrt2();
    let g = RayClassGroup::new(f, &Ideal::principal(f, &f.int(3))).unwrap();
    let chi = g.primitive_chars(f)[0];
    let ctx = ctx_for(f, &g, chi, 5, 2).unwrap();
    let a = in_pool(1, || lp_value(f, &g, chi, 1, &q(-1), &ctx).unwrap());
    let b = in_pool(4, || lp_value(f, &g, chi, 1, &q(-1), &ctx).unwrap());
    assert_eq!(a, b);
}

#[test]
fn unit_restricted_sums_approach_p_modified_values() {
    let f = sqrt2();
    let xis = primitive_torsion_points(f, &Ideal::unit(f), &Ideal::principal(f, &f.int(3)));
    for xi in xis.iter().take(2) {
        for k in 0..=2u32 {
            let target = lerch_neg_p(f, xi, k, 5, PRoute::JSum).unwrap();
            let approx = riemann_sum(f, xi, k, 5, 1, true).unwrap();
            assert!(coordinate_valuation(&approx.sub(&target), 5) >= 1, "ξ = {xi:?}, k = {k}");
        }
    }
}

#[test]
fn fan_refinement_does_not_change_values() {
    let f = sqrt2();
    let xis = primitive_torsion_points(f, &Ideal::unit(f), &Ideal::principal(f, &f.int(5)));
    for xi in xis.iter().take(3) {
        for k in 0..=2u32 {
            let sum = |depth| {
                let fan = refine_for(f, xi, None, RefineOptions { depth, max_tries: 64 }).unwrap();
                fan.cones.iter().fold(CycloNum::zero(xi.n), |a, c| a.add(&cone_value(f, c, xi, k)))
            };
            let base = sum(0);
            assert_eq!(base, sum(1), "ξ = {xi:?}, k = {k}");
            assert_eq!(base, sum(2), "ξ = {xi:?}, k = {k}");
        }
    }
}
