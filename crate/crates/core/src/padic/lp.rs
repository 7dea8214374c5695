//! p-adic Hecke L-values L_p(χω^t, s) = ∫ ω(N̂)^{t-1} ⟨N̂⟩^{-s} dμ_χ over the p-units, and the
//! verification of the polylogarithm formula and of interpolation.

use super::polylog::{polylog_value, LiPath};
use super::{PadicCtx, PadicNum};
use crate::arith::{lcm_u64, q, q_val, Q};
use crate::cyclo::CycloNum;
use crate::exact::hecke::{euler_factor, hecke_l_unrolled};
use crate::exact::lerch::{cone_value, lerch_fan};
use crate::field::{abs_norm_u64, Field, Ideal, RayClassGroup};
use crate::torsion::{char_value, check_modulus_prime_to_p, fold_classes, fourier_coefficient, gauss_sum, torsion_points, TorsionPoint};
use crate::Error;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;
use std::time::Instant;

/// Context able to embed every value attached to χ on 𝔤 at p.
pub fn ctx_for(f: &Field, group: &RayClassGroup, chi: usize, p: u64, m: u32) -> Result<PadicCtx, Error> {
    check_modulus_prime_to_p(f, &group.modulus, p)?;
    let mut n = group.chars.get(chi).ok_or_else(|| Error::Config(format!("character index {chi} out of range")))?.n;
    for (_, xi) in fold_classes(f, group).entries {
        n = lcm_u64(n, xi.n);
    }
    PadicCtx::new(f, p, n, m, 4)
}

/// Number of terms of the binomial expansion of ⟨N̂⟩^{-s}: each term gains a factor 𝐩.
pub fn expansion_length(ctx: &PadicCtx) -> u32 {
    if ctx.p == 2 {
        ctx.m.div_ceil(2)
    } else {
        ctx.m
    }
}

/// (1/𝐩^g) Σ_{x ∈ 𝔞/𝐩𝔞, N̂(x) unit} ω(N̂(x))^a ξ_p(x)^{-1}: Fourier coefficient of ω^a∘N̂ at ξ_p.
fn omega_coefficients(f: &Field, ctx: &PadicCtx, owner: &Ideal, a: u64, twists: &[TorsionPoint]) -> Vec<CycloNum> {
    let bp = ctx.bold_p as i128;
    let tame = ctx.tame_order();
    let l = lcm_u64(tame, ctx.bold_p);
    let na = owner.norm();
    let coords: Vec<Vec<i128>> = (0..bp.pow(f.g as u32))
        .map(|mut idx| {
            (0..f.g)
                .map(|_| {
                    let c = idx % bp;
                    idx /= bp;
                    c
                })
                .collect()
        })
        .collect();
    let units: Vec<(Vec<i128>, u64)> = coords
        .into_iter()
        .filter_map(|m| {
            let x = owner.from_coords(f, &m);
            let nh = x.norm() / &na;
            if nh.is_zero() || q_val(&nh, ctx.p) != 0 {
                return None;
            }
            let r = crate::arith::to_i64(&nh.to_integer().mod_floor(&BigInt::from(ctx.bold_p)));
            Some((m, ctx.omega_exp(r)))
        })
        .collect();
    let den = BigInt::from(ctx.bold_p).pow(f.g as u32);
    twists
        .iter()
        .map(|t| {
            let mut sums = vec![BigInt::zero(); l as usize];
            for (m, w) in &units {
                let xe = t.eval_coords(m) * (l / t.n);
                let e = (a * w % tame * (l / tame) + l - xe % l) % l;
                sums[e as usize] += 1;
            }
            CycloNum::from_exponent_sums(l, &sums, den.clone())
        })
        .collect()
}

/// I(a, i) = ∫ ω(N̂)^a N̂^i dμ_χ over the p-units, exactly.
pub fn unit_integral_exact(f: &Field, group: &RayClassGroup, chi: usize, a: u64, i: u32, ctx: &PadicCtx) -> Result<CycloNum, Error> {
    let classes = fold_classes(f, group);
    let bold = Ideal::principal(f, &f.int(ctx.bold_p as i64));
    let terms: Result<Vec<CycloNum>, Error> = classes
        .entries
        .par_iter()
        .map(|(_, xi)| {
            let fan = lerch_fan(f, xi, Some(ctx.p))?;
            let twists = torsion_points(f, &xi.owner, &bold);
            let coeffs = omega_coefficients(f, ctx, &xi.owner, a % ctx.tame_order(), &twists);
            let mut inner = CycloNum::zero(1);
            for (t, c) in twists.iter().zip(&coeffs) {
                if c.is_zero() {
                    continue;
                }
                let x = xi.times(f, t);
                let s = fan.cones.iter().fold(CycloNum::zero(x.n), |acc, cone| acc.add(&cone_value(f, cone, &x, i)));
                inner = inner.add(&c.mul(&s));
            }
            let scale = xi.owner.norm().pow(-(i as i32));
            Ok(fourier_coefficient(f, group, chi, xi).mul(&inner).scale(&scale))
        })
        .collect();
    let total = terms?.iter().fold(CycloNum::zero(1), |a, b| a.add(b));
    let m = total.minimal_conductor();
    Ok(total.descend(m).unwrap_or(total))
}

/// binom(x, j) for rational x.
fn binom_q(x: &Q, j: u32) -> Q {
    let mut out = q(1);
    for l in 0..j {
        out = out * (x - q(l as i64)) / q(l as i64 + 1);
    }
    out
}

/// L_p(χω^t, s) for s ∈ ℚ ∩ ℤ_p, modulo p^M.
pub fn lp_value(f: &Field, group: &RayClassGroup, chi: usize, t: i64, s: &Q, ctx: &PadicCtx) -> Result<PadicNum, Error> {
    if !group.is_primitive(f, chi) {
        return Err(Error::Precondition("χ must be primitive of conductor 𝔤".into()));
    }
    check_modulus_prime_to_p(f, &group.modulus, ctx.p)?;
    if !s.is_zero() && q_val(s, ctx.p) < 0 {
        return Err(Error::Precondition("s must be a p-adic integer".into()));
    }
    let ar = &ctx.ar;
    let tame = ctx.tame_order() as i64;
    let jn = expansion_length(ctx);
    let ints: Result<Vec<PadicNum>, Error> = (0..jn)
        .map(|i| {
            let a = (t - 1 - i as i64).rem_euclid(tame) as u64;
            ctx.embed(&unit_integral_exact(f, group, chi, a, i, ctx)?)
        })
        .collect();
    let ints = ints?;
    let ms = -s.clone();
    let mut acc = ar.zero();
    for j in 0..jn {
        let mut inner = ar.zero();
        for (i, v) in ints.iter().enumerate().take(j as usize + 1) {
            let mut c = binom_q(&q(j as i64), i as u32);
            if (j as usize - i) % 2 == 1 {
                c = -c;
            }
            inner = ar.add(&inner, &ar.mul(&ar.from_q(&c), v));
        }
        acc = ar.add(&acc, &ar.mul(&ar.from_q(&binom_q(&ms, j)), &inner));
    }
    Ok(ar.cap(&acc, ctx.m as i64))
}

#[derive(Clone, Debug, Serialize)]
pub struct PadicReport {
    pub lhs: PadicNum,
    pub rhs: PadicNum,
    pub agree: bool,
    pub precision: u32,
    pub lhs_seconds: f64,
    pub rhs_seconds: f64,
}

/// L_p(χω^{1-k}, k) against (g(χ,ξ)/N𝔤) Σ_𝔟 χ(𝔟)⁻¹ Li_k(ξ^𝔟).
pub fn verify_main(
    f: &Field,
    group: &RayClassGroup,
    chi: usize,
    xi: &TorsionPoint,
    k: i64,
    ctx: &PadicCtx,
    path: LiPath,
) -> Result<PadicReport, Error> {
    if !xi.is_primitive(f) || xi.modulus != group.modulus {
        return Err(Error::Precondition("ξ must be a primitive 𝔤-torsion point".into()));
    }
    let ar = &ctx.ar;
    let t0 = Instant::now();
    let lhs = lp_value(f, group, chi, 1 - k, &q(k), ctx)?;
    let lhs_seconds = t0.elapsed().as_secs_f64();
    let t1 = Instant::now();
    let pid = Ideal::principal(f, &f.int(ctx.p as i64));
    let terms: Result<Vec<PadicNum>, Error> = (0..group.order())
        .into_par_iter()
        .map(|c| {
            let b = group.rep_coprime_to(f, c, &pid);
            let li = polylog_value(f, ctx, &xi.restrict(f, &b), k, path)?;
            Ok(ar.mul(&ctx.embed(&char_value(group, chi, c).conj())?, &li))
        })
        .collect();
    let sum = terms?.iter().fold(ar.zero(), |a, b| ar.add(&a, b));
    let ng = abs_norm_u64(&group.modulus);
    let g = ctx.embed(&gauss_sum(f, group, chi, xi).scale(&crate::arith::qf(1, ng as i64)))?;
    let rhs = ar.cap(&ar.mul(&g, &sum), ctx.m as i64);
    let rhs_seconds = t1.elapsed().as_secs_f64();
    let agree = ar.congruent(&lhs, &rhs, ctx.m as i64);
    Ok(PadicReport { lhs, rhs, agree, precision: ctx.m, lhs_seconds, rhs_seconds })
}

/// L_p(χω^{k+1}, -k) against Π_{𝔭|p}(1 - χ(𝔭)N𝔭^k)·L(χ, -k).
pub fn verify_interpolation(f: &Field, group: &RayClassGroup, chi: usize, k: u32, ctx: &PadicCtx) -> Result<PadicReport, Error> {
    let t0 = Instant::now();
    let lhs = lp_value(f, group, chi, k as i64 + 1, &q(-(k as i64)), ctx)?;
    let lhs_seconds = t0.elapsed().as_secs_f64();
    let t1 = Instant::now();
    let exact = euler_factor(f, group, chi, k, ctx.p).mul(&hecke_l_unrolled(f, group, chi, k)?);
    let rhs = ctx.ar.cap(&ctx.embed(&exact)?, ctx.m as i64);
    let rhs_seconds = t1.elapsed().as_secs_f64();
    let agree = ctx.ar.congruent(&lhs, &rhs, ctx.m as i64);
    Ok(PadicReport { lhs, rhs, agree, precision: ctx.m, lhs_seconds, rhs_seconds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::hecke::hecke_l_neg;
    use crate::field::{make_field, FieldSpec};

    fn rational(n: i64) -> (Field, RayClassGroup, usize) {
        let f = make_field(&FieldSpec::Rational).unwrap();
        let g = RayClassGroup::new(&f, &Ideal::principal(&f, &f.int(n))).unwrap();
        let chi = g.primitive_chars(&f)[0];
        (f, g, chi)
    }

    #[test]
    fn trivial_twist_is_p_modified_value() {
        let (f, g, chi) = rational(3);
        let ctx = ctx_for(&f, &g, chi, 5, 3).unwrap();
        for i in 0..3 {
            let a = unit_integral_exact(&f, &g, chi, 0, i, &ctx).unwrap();
            assert_eq!(a, hecke_l_neg(&f, &g, chi, i, Some(5)).unwrap());
        }
    }

    #[test]
    fn interpolation_mod_3_at_5() {
        let (f, g, chi) = rational(3);
        let ctx = ctx_for(&f, &g, chi, 5, 4).unwrap();
        for k in 0..4 {
            let r = verify_interpolation(&f, &g, chi, k, &ctx).unwrap();
            assert!(r.agree, "k={k} {r:?}");
        }
    }

    #[test]
    fn interpolation_at_two() {
        let (f, g, chi) = rational(3);
        let ctx = ctx_for(&f, &g, chi, 2, 4).unwrap();
        for k in 0..3 {
            let r = verify_interpolation(&f, &g, chi, k, &ctx).unwrap();
            assert!(r.agree, "k={k} {r:?}");
        }
    }

    #[test]
    fn coleman_mod_3_at_5() {
        let (f, g, chi) = rational(3);
        let ctx = ctx_for(&f, &g, chi, 5, 3).unwrap();
        let xi = fold_classes(&f, &g).entries[0].1.clone();
        for k in -3..=3 {
            let r = verify_main(&f, &g, chi, &xi, k, &ctx, LiPath::Truncation).unwrap();
            assert!(r.agree, "k={k} {r:?}");
        }
    }

    #[test]
    fn matches_bernoulli_reference() {
        let (f, g, chi) = rational(3);
        let ctx = ctx_for(&f, &g, chi, 5, 4).unwrap();
        for k in -3..=3 {
            let ours = lp_value(&f, &g, chi, 1 - k, &q(k), &ctx).unwrap();
            let kl = crate::padic::kl::coleman_reference(&f, &g, chi, k, &ctx).unwrap();
            assert!(ctx.ar.congruent(&ours, &kl, 4), "k={k} {ours:?} {kl:?}");
        }
    }
}
