//! Kubota–Leopoldt p-adic L-functions of Dirichlet characters through Bernoulli numbers,
//! used as an independent reference for the g = 1 case.

use super::{PadicCtx, PadicNum};
use crate::arith::{bernoulli_numbers, lcm_u64, q, qf, Q};
use crate::field::{Field, Ideal, RayClassGroup};
use crate::torsion::char_value;
use crate::Error;

fn binom_q(x: &Q, j: usize) -> Q {
    let mut out = q(1);
    for l in 0..j {
        out = out * (x - q(l as i64)) / q(l as i64 + 1);
    }
    out
}

/// L_p(s, ψ) = (1/F)(1/(s-1)) Σ_{a ≤ F, p ∤ a} ψ(a)⟨a⟩^{1-s} Σ_j binom(1-s, j) B_j (F/a)^j,
/// with the derivative formula at s = 1. `psi(a)` is ψ(a) for p ∤ a; F must be divisible by 𝐩
/// and by the conductor of ψ.
pub fn kubota_leopoldt(ctx: &PadicCtx, psi: &dyn Fn(u64) -> PadicNum, big_f: u64, s: i64) -> Result<PadicNum, Error> {
    if big_f % ctx.bold_p != 0 {
        return Err(Error::Config(format!("F = {big_f} must be divisible by {}", ctx.bold_p)));
    }
    let ar = &ctx.ar;
    let terms = 2 * (ctx.ar.w as usize + 4);
    let bern = bernoulli_numbers(terms);
    let mut total = ar.zero();
    for a in 1..=big_f {
        if a % ctx.p == 0 {
            continue;
        }
        let pa = psi(a);
        if pa.is_zero() && pa.rel == 0 {
            continue;
        }
        let (_, bracket) = ctx.teich_split(&ar.from_int(a as i64))?;
        let ratio = qf(big_f as i64, a as i64);
        let mut rp = q(1);
        let term = if s == 1 {
            // -log⟨a⟩ + Σ_{j≥1} (-1)^j B_j (F/a)^j / j
            let y = ar.sub(&bracket, &ar.one());
            let mut log = ar.zero();
            let mut yp = ar.one();
            for m in 1..=(3 * terms) {
                yp = ar.mul(&yp, &y);
                let c = if m % 2 == 1 { qf(1, m as i64) } else { qf(-1, m as i64) };
                log = ar.add(&log, &ar.mul(&ar.from_q(&c), &yp));
            }
            let mut rest = q(0);
            for (j, bj) in bern.iter().enumerate().skip(1) {
                rp *= &ratio;
                let sign = if j % 2 == 0 { q(1) } else { q(-1) };
                rest += sign * bj * &rp / q(j as i64);
            }
            ar.sub(&ar.from_q(&rest), &log)
        } else {
            let e = q(1 - s);
            let mut inner = q(0);
            for (j, bj) in bern.iter().enumerate() {
                if j > 0 {
                    rp *= &ratio;
                }
                inner += binom_q(&e, j) * bj * &rp;
            }
            ar.mul(&ar.pow_i(&bracket, 1 - s), &ar.from_q(&inner))
        };
        total = ar.add(&total, &ar.mul(&pa, &term));
    }
    let scale = if s == 1 { qf(1, big_f as i64) } else { qf(1, big_f as i64) / q(s - 1) };
    Ok(ar.cap(&ar.mul(&total, &ar.from_q(&scale)), ctx.m as i64))
}

/// L_p(s, χ·ω^t) for a narrow ray class character χ of ℚ, with ω from Teichmüller lifts.
pub fn dirichlet_reference(f: &Field, group: &RayClassGroup, chi: usize, t: i64, s: i64, ctx: &PadicCtx) -> Result<PadicNum, Error> {
    if f.g != 1 {
        return Err(Error::Config("the Bernoulli reference is defined over ℚ only".into()));
    }
    let n = crate::arith::to_i64(&group.modulus.min_rational().to_integer()) as u64;
    let big_f = lcm_u64(n, ctx.bold_p);
    let ar = &ctx.ar;
    let e = t.rem_euclid(ctx.tame_order() as i64) as u64;
    let psi = |a: u64| -> PadicNum {
        if crate::arith::gcd_i128(a as i128, n as i128) != 1 {
            return ar.zero();
        }
        let class = group.class_of(f, &Ideal::principal(f, &f.int(a as i64)));
        let chi_a = ctx.embed(&char_value(group, chi, class)).expect("character values embed");
        let (w, _) = ctx.teich_split(&ar.from_int(a as i64)).expect("a is a unit");
        ar.mul(&chi_a, &ar.pow(&w, e))
    };
    kubota_leopoldt(ctx, &psi, big_f, s)
}

/// L_p(k, χω^{1-k}).
pub fn coleman_reference(f: &Field, group: &RayClassGroup, chi: usize, k: i64, ctx: &PadicCtx) -> Result<PadicNum, Error> {
    dirichlet_reference(f, group, chi, 1 - k, k, ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_field, FieldSpec};

    #[test]
    fn interpolates_bernoulli_values() {
        // L_p(0, χω) = -(1 - χ(3)) B_{1,χ} with B_{1,χ} = -1/2 and χ(3) = -1
        let f = make_field(&FieldSpec::Rational).unwrap();
        let g = RayClassGroup::new(&f, &Ideal::principal(&f, &f.int(4))).unwrap();
        let chi = g.primitive_chars(&f)[0];
        let ctx = PadicCtx::new(&f, 3, 4, 4, 4).unwrap();
        let v = coleman_reference(&f, &g, chi, 0, &ctx).unwrap();
        assert!(ctx.ar.congruent(&v, &ctx.ar.from_int(1), 4), "{v:?}");
    }
}
