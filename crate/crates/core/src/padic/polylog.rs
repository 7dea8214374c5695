//! p-adic polylogarithm values Li_k(ξ) = ∫ N̂^{-k} dμ at torsion points, for any integer k.

use super::{PadicCtx, PadicNum};
use crate::arith::{q, q_val, Q};
use crate::cones::Cone;
use crate::exact::cone_zeta;
use crate::exact::lerch::{lerch_fan, prime_subsets};
use crate::field::{Elem, Field, Ideal};
use crate::torsion::TorsionPoint;
use crate::Error;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LiPath {
    /// Riemann sums f_m over the units of p^m-scaled parallelepipeds.
    Truncation,
    /// Exact p-modified value at -k + (p-1)p^r, embedded.
    KummerLimit,
}

fn check_point(ctx: &PadicCtx, xi: &TorsionPoint) -> Result<(), Error> {
    if xi.order() % ctx.p == 0 {
        return Err(Error::Precondition(format!("ord(ξ) = {} is divisible by p = {}", xi.order(), ctx.p)));
    }
    if !ctx.supports_order(xi.n) {
        return Err(Error::Precondition(format!("ζ_{} is not embedded in the context", xi.n)));
    }
    Ok(())
}

/// Integer quadratic (or linear) form n ↦ c·N(β + Σ n_j α_j), stored as numerators over `den`.
struct NormPoly {
    g: usize,
    /// [c0, c1, c2, c11, c12, c22] (only c0, c1 for g = 1).
    num: [i128; 6],
    den: i128,
}

impl NormPoly {
    fn new(beta: &Elem, gens: &[Elem], scale: &Q) -> NormPoly {
        let g = gens.len();
        let coeffs: Vec<Q> = if g == 1 {
            vec![beta.a.clone(), gens[0].a.clone()]
        } else {
            let (a1, a2) = (&gens[0], &gens[1]);
            vec![
                beta.norm(),
                (beta * &a1.conj()).trace(),
                (beta * &a2.conj()).trace(),
                a1.norm(),
                (a1 * &a2.conj()).trace(),
                a2.norm(),
            ]
        };
        let coeffs: Vec<Q> = coeffs.iter().map(|c| c * scale).collect();
        let den = coeffs.iter().fold(num_bigint::BigInt::from(1), |acc, c| acc.lcm(c.denom()));
        let mut num = [0i128; 6];
        for (i, c) in coeffs.iter().enumerate() {
            num[i] = (c * Q::from_integer(den.clone())).to_integer().to_i128().expect("norm coefficient overflow");
        }
        NormPoly { g, num, den: den.to_i128().unwrap() }
    }

    fn eval(&self, n: &[i128]) -> i128 {
        let c = &self.num;
        let v = if self.g == 1 {
            c[0] + c[1] * n[0]
        } else {
            c[0] + c[1] * n[0] + c[2] * n[1] + c[3] * n[0] * n[0] + c[4] * n[0] * n[1] + c[5] * n[1] * n[1]
        };
        debug_assert_eq!(v % self.den, 0);
        v / self.den
    }
}

/// Totally positive u ∈ 𝔞⁻¹ with u𝔞 integral and prime to p, smallest first.
pub fn admissible_multipliers(f: &Field, owner: &Ideal, p: u64, count: usize) -> Vec<Elem> {
    let inv = owner.inv(f);
    let basis = inv.basis(f);
    let mut out: Vec<(Q, Elem)> = Vec::new();
    let bound = 6i64;
    let ranges: Vec<Vec<i64>> = if f.g == 1 { vec![(1..=bound * 4).collect()] } else { vec![(-bound..=bound).collect(), (-bound..=bound).collect()] };
    let mut push = |x: Elem| {
        if !f.is_totally_positive(&x) {
            return;
        }
        let ua = owner.scale(f, &x);
        if !ua.is_integral() || q_val(&ua.norm(), p) != 0 {
            return;
        }
        out.push(((&x + &x.conj()).a.clone().abs() + x.norm().abs(), x));
    };
    if f.g == 1 {
        for &a in &ranges[0] {
            push(basis[0].scale(&q(a)));
        }
    } else {
        for &a in &ranges[0] {
            for &b in &ranges[1] {
                push(&basis[0].scale(&q(a)) + &basis[1].scale(&q(b)));
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| (a.1.a.clone(), a.1.b.clone()).cmp(&(b.1.a.clone(), b.1.b.clone()))));
    out.dedup_by(|a, b| a.1 == b.1);
    out.into_iter().take(count).map(|x| x.1).collect()
}

fn inv_pow_mod(x: u128, k: i64, m: u128, phi: u128) -> u128 {
    let base = if k >= 0 { super::num::pow_mod(x, phi - 1, m) } else { x % m };
    super::num::pow_mod(base, k.unsigned_abs() as u128, m)
}

/// f_m(ξ): Σ_σ Σ_{α ∈ R_m, α𝔞⁻¹ prime to p} N̂(α)^{-k} ξ(α) / Π_j (1 - ξ(α_j)^{p^m}), valid modulo p^m.
/// With `u`, norms are taken of uα and rescaled by N(u)N𝔞.
pub fn polylog_truncated(f: &Field, ctx: &PadicCtx, xi: &TorsionPoint, k: i64, m: u32, u: Option<&Elem>) -> Result<PadicNum, Error> {
    check_point(ctx, xi)?;
    let p = ctx.p;
    let ar = &ctx.ar;
    let fan = lerch_fan(f, xi, Some(p))?;
    let (mult, scale) = match u {
        Some(u) => {
            let ua = xi.owner.scale(f, u);
            if !f.is_totally_positive(u) || !ua.is_integral() || q_val(&ua.norm(), p) != 0 {
                return Err(Error::Precondition("u must be totally positive with u𝔞 integral and prime to p".into()));
            }
            (u.clone(), (u.norm() * xi.owner.norm()).recip())
        }
        None => (f.one(), xi.owner.norm().recip()),
    };
    let w = ar.w;
    let pw = ar.pow_p(w);
    let phi = pw / p as u128 * (p as u128 - 1);
    let side = (p as i128).pow(m);
    let pm = (p as u64).pow(m);
    let g = f.g;
    let per_cone: Vec<PadicNum> = fan
        .cones
        .par_iter()
        .map(|cone| {
            let gens_e: Vec<u64> = cone.gens.iter().map(|a| xi.eval_exp(f, a)).collect();
            let ugens: Vec<Elem> = cone.gens.iter().map(|a| a * &mult).collect();
            let mut sums = vec![0u128; xi.n as usize];
            for pt in cone.breve_points(f, &xi.owner) {
                let poly = NormPoly::new(&(&pt.elem * &mult), &ugens, &scale);
                let e0 = xi.eval_exp(f, &pt.elem);
                let mut n = vec![0i128; g];
                let total = side.pow(g as u32);
                for idx in 0..total {
                    let mut r = idx;
                    for nj in n.iter_mut() {
                        *nj = r % side;
                        r /= side;
                    }
                    let v = poly.eval(&n);
                    if v % p as i128 == 0 {
                        continue;
                    }
                    let e = (e0 as i128 + n.iter().zip(&gens_e).map(|(a, &b)| a * b as i128).sum::<i128>()).rem_euclid(xi.n as i128) as usize;
                    let x = v.rem_euclid(pw as i128) as u128;
                    sums[e] = (sums[e] + inv_pow_mod(x, k, pw, phi)) % pw;
                }
            }
            let mut acc = ar.zero();
            for (e, s) in sums.iter().enumerate() {
                if *s == 0 {
                    continue;
                }
                let c = ar.from_coeffs({
                    let mut v = vec![0u128; ar.d];
                    v[0] = *s;
                    v
                });
                acc = ar.add(&acc, &ar.mul(&c, &ctx.zeta_pow(xi.n, e as u64)));
            }
            let mut den = ar.one();
            for &e in &gens_e {
                den = ar.mul(&den, &ar.sub(&ar.one(), &ctx.zeta_pow(xi.n, e * pm % xi.n)));
            }
            ar.div(&acc, &den)
        })
        .collect();
    let total = per_cone.iter().fold(ar.zero(), |a, b| ar.add(&a, b));
    Ok(ar.cap(&total, m as i64))
}

/// Level r with x^{(p-1)p^r} ≡ 1 mod p^M on units (mod 2^{r+2} when p = 2).
pub fn kummer_level(ctx: &PadicCtx) -> u32 {
    if ctx.p == 2 {
        ctx.m.saturating_sub(2).max(1)
    } else {
        ctx.m.saturating_sub(1)
    }
}

/// Li_{-n}^{(p)}(ξ) evaluated in the context: Σ_J (-1)^{|J|} [Δ_ξ : Δ_{ξ|}] Σ_σ ζ_σ(ξ|_{𝔭_J𝔞}, -n), times N𝔞^{-n}.
pub fn lerch_p_in_ctx(f: &Field, ctx: &PadicCtx, xi: &TorsionPoint, n: u64) -> Result<PadicNum, Error> {
    check_point(ctx, xi)?;
    let ar = &ctx.ar;
    let h = xi.stabilizer_index(f);
    let nk = u32::try_from(n).map_err(|_| Error::Config("exponent too large".into()))?;
    let mut acc = ar.zero();
    for (pj, size) in prime_subsets(f, ctx.p) {
        let r = xi.restrict(f, &pj);
        let fan = lerch_fan(f, &r, Some(ctx.p))?;
        let hr = r.stabilizer_index(f);
        let vals: Vec<PadicNum> = fan.cones.par_iter().map(|c: &Cone| cone_zeta(ctx, f, c, &r, nk)).collect();
        let mut v = vals.iter().fold(ar.zero(), |a, b| ar.add(&a, b));
        v = ar.scale_int(&v, (h / hr) as i64);
        if size % 2 == 1 {
            v = ar.neg(&v);
        }
        acc = ar.add(&acc, &v);
    }
    let scale = ar.from_q(&xi.owner.norm().pow(-(nk as i32)));
    Ok(ar.mul(&acc, &scale))
}

/// Kummer-limit approximant at level r: Li_{k-(p-1)p^r}, valid modulo p^{r+1} (2^{r+2} when p = 2).
pub fn polylog_kummer(f: &Field, ctx: &PadicCtx, xi: &TorsionPoint, k: i64, r: u32) -> Result<PadicNum, Error> {
    let period = (ctx.p - 1) as i64 * (ctx.p as i64).pow(r);
    let mut n = period - k;
    while n < 0 {
        n += period;
    }
    let v = lerch_p_in_ctx(f, ctx, xi, n as u64)?;
    let prec = if ctx.p == 2 { r + 2 } else { r + 1 };
    Ok(ctx.ar.cap(&v, prec.min(ctx.m) as i64))
}

/// Li_k^{(p)}(ξ) modulo p^M along the chosen path.
pub fn polylog_value(f: &Field, ctx: &PadicCtx, xi: &TorsionPoint, k: i64, path: LiPath) -> Result<PadicNum, Error> {
    match path {
        LiPath::Truncation => polylog_truncated(f, ctx, xi, k, ctx.m, None),
        LiPath::KummerLimit => polylog_kummer(f, ctx, xi, k, kummer_level(ctx)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::hecke::polylog_exact_neg;
    use crate::field::{make_field, FieldSpec};
    use crate::torsion::primitive_torsion_points;

    fn zeta3() -> (Field, TorsionPoint) {
        let f = make_field(&FieldSpec::Rational).unwrap();
        let o = Ideal::unit(&f);
        let xi = primitive_torsion_points(&f, &o, &Ideal::principal(&f, &f.int(3)))[0].clone();
        (f, xi)
    }

    #[test]
    fn nonpositive_k_matches_exact() {
        let (f, xi) = zeta3();
        let ctx = PadicCtx::new(&f, 5, 3, 4, 4).unwrap();
        for n in 0..3u32 {
            let exact = ctx.embed(&polylog_exact_neg(&f, &xi, n, 5).unwrap()).unwrap();
            let t = polylog_truncated(&f, &ctx, &xi, -(n as i64), 4, None).unwrap();
            assert!(ctx.ar.congruent(&t, &exact, 4), "n={n}");
        }
    }

    #[test]
    fn truncation_matches_kummer_over_q() {
        let (f, xi) = zeta3();
        let ctx = PadicCtx::new(&f, 5, 3, 3, 4).unwrap();
        for k in -2..=3i64 {
            let a = polylog_value(&f, &ctx, &xi, k, LiPath::Truncation).unwrap();
            let b = polylog_value(&f, &ctx, &xi, k, LiPath::KummerLimit).unwrap();
            assert!(ctx.ar.congruent(&a, &b, 3), "k={k} {a:?} {b:?}");
        }
    }

    #[test]
    fn multiplier_independence() {
        let f = make_field(&FieldSpec::Quadratic(2)).unwrap();
        let o = Ideal::unit(&f);
        let xi = primitive_torsion_points(&f, &o, &Ideal::principal(&f, &f.int(3)))[0].clone();
        let ctx = PadicCtx::new(&f, 5, 3, 2, 4).unwrap();
        let us = admissible_multipliers(&f, &o, 5, 3);
        assert!(us.len() >= 2);
        let base = polylog_truncated(&f, &ctx, &xi, 2, 2, None).unwrap();
        for u in &us {
            let v = polylog_truncated(&f, &ctx, &xi, 2, 2, Some(u)).unwrap();
            assert!(ctx.ar.congruent(&base, &v, 2));
        }
    }
}
