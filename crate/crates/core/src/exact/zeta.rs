//! Cone zeta values at nonpositive integers.
//!
//! Two independent evaluations are provided. The closed form expands the
//! regularised cone sum Σ ξ(x) N(x)^k over x = β + Σ n_j α_j into sums
//! A_l(c) = Σ_n n^l c^n, which are rational in c = ξ(α_j) ≠ 1; it runs over any
//! [`ValueRing`] so the p-adic engine reuses it. The Bernoulli form evaluates
//! the partial zeta function of a shifted lattice cone with no character,
//! through Bernoulli polynomials of the breve coordinates.

use crate::arith::{bernoulli_numbers, bernoulli_poly, factorial, q, Q};
use crate::cones::Cone;
use crate::cyclo::CycloNum;
use crate::field::{Elem, Field, Ideal};
use crate::torsion::TorsionPoint;
use dashmap::DashMap;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::sync::{Arc, OnceLock};

/// Scalars in which cone sums can be evaluated.
pub trait ValueRing {
    type E: Clone;
    fn from_q(&self, x: &Q) -> Self::E;
    /// ζ_n^e.
    fn root(&self, n: u64, e: u64) -> Self::E;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn inv(&self, a: &Self::E) -> Self::E;
}

/// Exact values in ℚ(ζ_n); mixed conductors lift automatically.
#[derive(Clone, Copy, Debug)]
pub struct Exact;

impl ValueRing for Exact {
    type E = CycloNum;
    fn from_q(&self, x: &Q) -> CycloNum {
        CycloNum::from_q(1, x)
    }
    fn root(&self, n: u64, e: u64) -> CycloNum {
        CycloNum::root(n, e as i64)
    }
    fn add(&self, a: &CycloNum, b: &CycloNum) -> CycloNum {
        a.add(b)
    }
    fn sub(&self, a: &CycloNum, b: &CycloNum) -> CycloNum {
        a.sub(b)
    }
    fn mul(&self, a: &CycloNum, b: &CycloNum) -> CycloNum {
        a.mul(b)
    }
    fn inv(&self, a: &CycloNum) -> CycloNum {
        a.inv()
    }
}

type NormFormMemo = DashMap<(Vec<Elem>, u32), Arc<Vec<(Vec<usize>, Q)>>>;

fn norm_form_memo(cone: &Cone, k: u32) -> Arc<Vec<(Vec<usize>, Q)>> {
    static MEMO: OnceLock<NormFormMemo> = OnceLock::new();
    let memo = MEMO.get_or_init(DashMap::new);
    let key = (cone.gens.clone(), k);
    if let Some(v) = memo.get(&key) {
        return v.clone();
    }
    let v = Arc::new(norm_form_power(cone, k));
    memo.insert(key, v.clone());
    v
}

/// Coefficients q_e of N(y₁α₁ + y₂α₂)^k (or (αy)^k when g = 1), keyed by the y-exponents.
pub fn norm_form_power(cone: &Cone, k: u32) -> Vec<(Vec<usize>, Q)> {
    let k = k as usize;
    if cone.dim() == 1 {
        let a = &cone.gens[0].a;
        let mut p = Q::one();
        for _ in 0..k {
            p *= a;
        }
        return vec![(vec![k], p)];
    }
    let (a1, a2) = (&cone.gens[0], &cone.gens[1]);
    let ca = a1.norm();
    let cb = (a1 * &a2.conj()).trace();
    let cc = a2.norm();
    let powers = |x: &Q| {
        let mut v = vec![Q::one()];
        for _ in 0..k {
            let t = v.last().unwrap() * x;
            v.push(t);
        }
        v
    };
    let (pa, pb, pc) = (powers(&ca), powers(&cb), powers(&cc));
    let fact: Vec<BigInt> = (0..=k as u64).map(factorial).collect();
    let mut coef = vec![Q::zero(); 2 * k + 1];
    for i in 0..=k {
        for j in 0..=(k - i) {
            let l = k - i - j;
            let m = Q::from_integer(&fact[k] / (&fact[i] * &fact[j] * &fact[l]));
            coef[2 * i + j] += m * &pa[i] * &pb[j] * &pc[l];
        }
    }
    coef.into_iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(e1, c)| (vec![e1, 2 * k - e1], c))
        .collect()
}

/// ζ_σ(ξ, -k·I) = Σ_{x ∈ σ̆ ∩ 𝔞} ξ(x) N(x)^k, regularised; requires ξ(α_j) ≠ 1.
pub fn cone_zeta<R: ValueRing>(r: &R, f: &Field, cone: &Cone, xi: &TorsionPoint, k: u32) -> R::E {
    let g = cone.dim();
    let top = g * k as usize;
    let zero = r.from_q(&q(0));
    let one = r.from_q(&q(1));
    let mut binom: Vec<Vec<R::E>> = vec![vec![one.clone()]];
    for l in 1..=top {
        let prev = &binom[l - 1];
        let row: Vec<R::E> = (0..=l)
            .map(|i| match (i, i == l) {
                (0, _) | (_, true) => one.clone(),
                _ => r.add(&prev[i - 1], &prev[i]),
            })
            .collect();
        binom.push(row);
    }
    let sums: Vec<Vec<R::E>> = cone
        .gens
        .iter()
        .map(|a| {
            let e = xi.eval_exp(f, a);
            assert!(e != 0, "ξ is trivial on a cone generator");
            let c = r.root(xi.n, e);
            let inv = r.inv(&r.sub(&one, &c));
            let cq = r.mul(&c, &inv);
            let mut al = vec![inv];
            for l in 1..=top {
                let mut s = zero.clone();
                for i in 0..l {
                    s = r.add(&s, &r.mul(&binom[l][i], &al[i]));
                }
                al.push(r.mul(&cq, &s));
            }
            al
        })
        .collect();
    let qe: Vec<(Vec<usize>, R::E)> = norm_form_memo(cone, k).iter().map(|(e, c)| (e.clone(), r.from_q(c))).collect();
    let mut total = zero.clone();
    for pt in cone.breve_points(f, &xi.owner) {
        let h: Vec<Vec<R::E>> = (0..g)
            .map(|j| {
                let b = r.from_q(&pt.x[j]);
                let mut bp = vec![one.clone()];
                for _ in 0..top {
                    bp.push(r.mul(bp.last().unwrap(), &b));
                }
                (0..=top)
                    .map(|e| {
                        let mut s = zero.clone();
                        for l in 0..=e {
                            s = r.add(&s, &r.mul(&binom[e][l], &r.mul(&bp[e - l], &sums[j][l])));
                        }
                        s
                    })
                    .collect()
            })
            .collect();
        let mut s = zero.clone();
        for (e, c) in &qe {
            let mut term = c.clone();
            for j in 0..g {
                term = r.mul(&term, &h[j][e[j]]);
            }
            s = r.add(&s, &term);
        }
        let xb = r.root(xi.n, xi.eval_exp(f, &pt.elem));
        total = r.add(&total, &r.mul(&xb, &s));
    }
    total
}

fn poly_mul(a: &[Elem], b: &[Elem], m: usize, d: u64) -> Vec<Elem> {
    let mut out = vec![Elem::int(d, 0); m + 1];
    for (i, x) in a.iter().enumerate().take(m + 1) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(m + 1 - i) {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    out
}

/// (a + b y)^e truncated at degree m, for e ≥ -1.
fn linear_pow(a: &Elem, b: &Elem, e: i64, m: usize) -> Vec<Elem> {
    let d = a.d;
    if e < 0 {
        let ai = a.inv();
        let r = -&(b * &ai);
        let mut out = vec![ai];
        for _ in 0..m {
            out.push(out.last().unwrap() * &r);
        }
        return out;
    }
    let mut out = vec![Elem::int(d, 1)];
    let lin = vec![a.clone(), b.clone()];
    for _ in 0..e {
        out = poly_mul(&out, &lin, m, d);
    }
    out.resize(m + 1, Elem::int(d, 0));
    out
}

/// Σ_{x ∈ σ̆ ∩ (ρ + L)} N(x)^k for a sublattice L of 𝔞 (an ideal), by the
/// Bernoulli-polynomial formula in the breve coordinates of each coset point.
pub fn cone_zeta_coset(f: &Field, cone: &Cone, owner: &Ideal, lattice: &Ideal, rho: &Elem, k: u32) -> Q {
    let m = k as usize;
    let v = Cone::new(cone.gens.iter().map(|a| lattice.primitive_on_ray(f, a)).collect());
    let bern = bernoulli_numbers(2 * m + 3);
    let pts: Vec<_> = v
        .breve_points(f, owner)
        .into_iter()
        .filter(|p| lattice.contains(f, &(&p.elem - rho)))
        .collect();
    let mut total = Q::zero();
    if f.g == 1 {
        let vm = (0..m).fold(Q::one(), |acc, _| acc * &v.gens[0].a);
        for p in &pts {
            total -= &vm * bernoulli_poly(m + 1, &p.x[0], &bern) / q(m as i64 + 1);
        }
        return total;
    }
    let (v1, v2) = (&v.gens[0], &v.gens[1]);
    let lam = [(v1.clone(), v1.conj()), (v2.clone(), v2.conj())];
    let powers: Vec<Vec<Vec<Elem>>> = lam
        .iter()
        .map(|(a, b)| (0..=(2 * m + 2)).map(|l| linear_pow(a, b, l as i64 - 1, m)).collect())
        .collect();
    let mut coeff = vec![Elem::int(f.d, 0); 2 * m + 3];
    // [y^m] Π_i λ_i(y)^{l_i - 1}, indexed by l_1
    for (l1, c) in coeff.iter_mut().enumerate() {
        let l2 = 2 * m + 2 - l1;
        *c = poly_mul(&powers[0][l1], &powers[1][l2], m, f.d)[m].clone();
    }
    let mf = factorial(m as u64);
    let scale = Q::from_integer(&mf * &mf);
    for p in &pts {
        let y: Vec<Q> = p.x.iter().map(|x| q(1) - x).collect();
        let b1: Vec<Q> = (0..=(2 * m + 2)).map(|l| bernoulli_poly(l, &y[0], &bern) / Q::from_integer(factorial(l as u64))).collect();
        let b2: Vec<Q> = (0..=(2 * m + 2)).map(|l| bernoulli_poly(l, &y[1], &bern) / Q::from_integer(factorial(l as u64))).collect();
        for l1 in 0..=(2 * m + 2) {
            let l2 = 2 * m + 2 - l1;
            total += &b1[l1] * &b2[l2] * &coeff[l1].a * &scale;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qf;
    use crate::field::{make_field, FieldSpec};
    use crate::torsion::torsion_points;

    #[test]
    fn rational_alternating_sum() {
        let f = make_field(&FieldSpec::Rational).unwrap();
        let o = Ideal::unit(&f);
        let m = Ideal::principal(&f, &f.int(2));
        let xi = torsion_points(&f, &o, &m)[1].clone();
        let c = Cone::new(vec![f.one()]);
        assert_eq!(cone_zeta(&Exact, &f, &c, &xi, 0), CycloNum::from_q(1, &qf(-1, 2)));
        // Σ (-1)^n n = -1/4 (Abel)
        assert_eq!(cone_zeta(&Exact, &f, &c, &xi, 1), CycloNum::from_q(1, &qf(-1, 4)));
    }

    #[test]
    fn hurwitz_values() {
        // Σ_{n ≡ 1 mod 3, n > 0} n^k = 3^k ζ(-k, 1/3) = -3^k B_{k+1}(1/3)/(k+1)
        let f = make_field(&FieldSpec::Rational).unwrap();
        let o = Ideal::unit(&f);
        let l = Ideal::principal(&f, &f.int(3));
        let c = Cone::new(vec![f.one()]);
        let bern = bernoulli_numbers(8);
        for k in 0..5u32 {
            let want = -Q::from_integer(num_bigint::BigInt::from(3).pow(k)) * bernoulli_poly(k as usize + 1, &qf(1, 3), &bern) / q(k as i64 + 1);
            assert_eq!(cone_zeta_coset(&f, &c, &o, &l, &f.one(), k), want);
        }
    }

    #[test]
    fn norm_form_matches_product() {
        let f = make_field(&FieldSpec::Quadratic(5)).unwrap();
        let c = Cone::new(vec![f.elem(q(3), q(1)), f.elem(q(4), q(1))]);
        let qe = norm_form_power(&c, 2);
        // evaluate at y = (1, 2)
        let y = [q(1), q(2)];
        let x = &c.gens[0].scale(&y[0]) + &c.gens[1].scale(&y[1]);
        let want = x.norm() * x.norm();
        let got: Q = qe.iter().map(|(e, c)| c * y[0].pow(e[0] as i32) * y[1].pow(e[1] as i32)).sum();
        assert_eq!(got, want);
    }
}
