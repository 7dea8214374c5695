//! p-adic values: embedding of cyclotomic data into an unramified extension of ℚ_p,
//! polylogarithm values at torsion points and p-adic Hecke L-values.

pub mod kl;
pub mod lp;
pub mod measure;
pub mod num;
pub mod polylog;

pub use num::{Arith, PadicNum};

use crate::arith::{euler_phi, lcm_u64, mult_order, Q};
use crate::cyclo::{CompositumNum, CycloNum};
use crate::field::Field;
use crate::Error;
use num_bigint::BigInt;
use serde::Serialize;

/// Working context: K = ℚ_p[x]/(P) of degree d with chosen images of ζ_n and √D.
#[derive(Clone, Debug)]
pub struct PadicCtx {
    pub p: u64,
    /// Target precision exponent M.
    pub m: u32,
    /// 𝐩 = p for odd p and 4 for p = 2.
    pub bold_p: u64,
    /// Root-of-unity order embedded (prime to p, divisible by p - 1 or 2).
    pub n: u64,
    pub ar: Arith,
    zetas: Vec<PadicNum>,
    pub sqrt_d: Option<PadicNum>,
    pub field_d: u64,
    /// Residue of the image of ζ_{p-1} (a primitive root mod p); 1 when p = 2.
    pub omega_gen: u64,
}

/// Reproducibility data of a context.
#[derive(Clone, Debug, Serialize)]
pub struct CtxInfo {
    pub p: u64,
    pub precision: u32,
    pub degree: usize,
    pub defining_polynomial: Vec<u128>,
    pub root_order: u64,
    pub zeta_image: Vec<u128>,
    pub sqrt_d_image: Option<Vec<u128>>,
}

fn poly_divides(p: u64, a: &[u64], b: &[u64]) -> bool {
    // whether monic b divides a over F_p (coefficients low to high)
    let mut r: Vec<u64> = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let top = *r.last().unwrap();
        let sh = r.len() - 1 - db;
        for (i, &c) in b.iter().enumerate() {
            r[sh + i] = (r[sh + i] + p * p - top * c % p) % p;
        }
        r.pop();
    }
    r.iter().all(|&x| x == 0)
}

fn monic_polys(p: u64, deg: usize) -> impl Iterator<Item = Vec<u64>> {
    let total = p.pow(deg as u32);
    (0..total).map(move |mut idx| {
        let mut c = Vec::with_capacity(deg + 1);
        for _ in 0..deg {
            c.push(idx % p);
            idx /= p;
        }
        c.push(1);
        c
    })
}

/// Lexicographically smallest (by c_0, c_1, …) monic irreducible polynomial of degree d over F_p.
pub fn smallest_irreducible(p: u64, d: usize) -> Vec<u64> {
    if d == 1 {
        return vec![0, 1];
    }
    let mut cands: Vec<Vec<u64>> = monic_polys(p, d).collect();
    cands.sort_by(|a, b| a[..d].cmp(&b[..d]));
    cands
        .into_iter()
        .find(|a| (1..=d / 2).all(|e| monic_polys(p, e).all(|b| !poly_divides(p, a, &b))))
        .expect("irreducible polynomials exist in every degree")
}

impl PadicCtx {
    /// Context for F at p containing ζ_n, with target precision M and `guard` extra digits.
    pub fn new(f: &Field, p: u64, n: u64, m: u32, guard: u32) -> Result<PadicCtx, Error> {
        if !crate::arith::is_prime(p) {
            return Err(Error::Config(format!("{p} is not prime")));
        }
        if m == 0 {
            return Err(Error::Config("precision M must be at least 1".into()));
        }
        if f.g == 2 && f.is_ramified(p) {
            return Err(Error::Precondition(format!("p = {p} ramifies in {}", f.describe())));
        }
        let tame = if p == 2 { 1 } else { p - 1 };
        let mut n = lcm_u64(n.max(1), tame);
        if p == 2 && n % 2 == 0 {
            n /= 2;
        }
        if n % p == 0 {
            return Err(Error::Precondition(format!("root order {n} is divisible by p = {p}")));
        }
        let d_cyc = if n == 1 { 1 } else { mult_order(p % n, n) } as usize;
        let d_f = if f.g == 2 { f.inertia_degree(p) as usize } else { 1 };
        let d = lcm_u64(d_cyc as u64, d_f as u64) as usize;
        let w = m + guard;
        if (w as f64) * (p as f64).log2() > 60.0 {
            return Err(Error::Config(format!("precision {w} digits at p = {p} exceeds the 60-bit arithmetic range")));
        }
        let poly: Vec<u128> = smallest_irreducible(p, d)[..d].iter().map(|&c| c as u128).collect();
        let ar = Arith::new(p, d, w, poly.clone());
        let residues: Vec<Vec<u128>> = (0..(p as u128).pow(d as u32))
            .map(|mut idx| {
                (0..d)
                    .map(|_| {
                        let c = idx % p as u128;
                        idx /= p as u128;
                        c
                    })
                    .collect()
            })
            .collect();
        let mut sorted = residues.clone();
        sorted.sort();
        let lift_teich = |res: &Vec<u128>| {
            let q = (p as u64).pow(d as u32);
            let mut y = ar.from_coeffs(res.clone());
            for _ in 0..=w {
                y = ar.pow(&y, q);
            }
            y
        };
        let res1 = Arith::new(p, d, 1, poly.clone());
        let order_is = |res: &Vec<u128>, n: u64| {
            let x = res1.from_coeffs(res.clone());
            if x.v != 0 {
                return false;
            }
            let one = res1.one();
            let is_one = |y: &PadicNum| res1.congruent(y, &one, 1);
            is_one(&res1.pow(&x, n)) && crate::arith::factor_u64(n).iter().all(|(q, _)| !is_one(&res1.pow(&x, n / q)))
        };
        let zeta_res = sorted
            .iter()
            .find(|r| order_is(r, n))
            .ok_or_else(|| Error::Verification(format!("no element of order {n} in the residue field")))?;
        let zeta = lift_teich(zeta_res);
        let mut zetas = vec![ar.one()];
        for _ in 1..n {
            zetas.push(ar.mul(zetas.last().unwrap(), &zeta));
        }
        let sqrt_d = if f.g == 2 { Some(Self::lift_sqrt(f, &ar, &sorted)?) } else { None };
        let omega_gen = if p == 2 {
            1
        } else {
            let z = &zetas[(n / (p - 1)) as usize % n as usize];
            (z.c[0] % p as u128) as u64
        };
        Ok(PadicCtx { p, m, bold_p: if p == 2 { 4 } else { p }, n, ar, zetas, sqrt_d, field_d: f.d, omega_gen })
    }

    fn lift_sqrt(f: &Field, ar: &Arith, sorted: &[Vec<u128>]) -> Result<PadicNum, Error> {
        let (c1, c0) = f.omega_minpoly();
        let res1 = Arith::new(ar.p, ar.d, 1, ar.poly.clone());
        let poly_at = |a: &Arith, y: &PadicNum| a.add(&a.add(&a.mul(y, y), &a.scale_int(y, c1)), &a.from_int(c0));
        let root = sorted
            .iter()
            .find(|r| {
                let y = res1.from_coeffs((*r).clone());
                poly_at(&res1, &y).is_zero()
            })
            .ok_or_else(|| Error::Verification("ω has no root in the residue field".into()))?;
        let mut y = ar.from_coeffs(root.clone());
        for _ in 0..8 {
            let fy = poly_at(ar, &y);
            let dy = ar.add(&ar.scale_int(&y, 2), &ar.from_int(c1));
            y = ar.sub(&y, &ar.div(&fy, &dy));
        }
        // √D = (ω - a)/b with ω = a + b√D
        let om = f.omega();
        Ok(ar.div(&ar.sub(&y, &ar.from_q(&om.a)), &ar.from_q(&om.b)))
    }

    pub fn info(&self) -> CtxInfo {
        let unit_coeffs = |x: &PadicNum| {
            let s = self.ar.pow_p(x.v.max(0) as u32);
            x.c.iter().map(|c| c * s).collect()
        };
        CtxInfo {
            p: self.p,
            precision: self.m,
            degree: self.ar.d,
            defining_polynomial: self.ar.poly.clone(),
            root_order: self.n,
            zeta_image: unit_coeffs(&self.zetas[1 % self.zetas.len()]),
            sqrt_d_image: self.sqrt_d.as_ref().map(unit_coeffs),
        }
    }

    /// Image of ζ_k^e; k must divide the embedded order (times 2 when p = 2).
    pub fn zeta_pow(&self, k: u64, e: u64) -> PadicNum {
        let n = self.n;
        if n % k == 0 {
            return self.zetas[((e % k) * (n / k)) as usize].clone();
        }
        if self.p == 2 && k % 2 == 0 && n % (k / 2) == 0 && (k / 2) % 2 == 1 {
            // ζ_{2m} = -ζ_m^{(m+1)/2}
            let h = k / 2;
            let base = self.zeta_pow(h, (e % k) * h.div_ceil(2) % h);
            return if e % 2 == 1 { self.ar.neg(&base) } else { base };
        }
        panic!("ζ_{k} is not available in this context (embedded order {n})")
    }

    pub fn supports_order(&self, k: u64) -> bool {
        self.n % k == 0 || self.p == 2 && k % 4 == 2 && self.n % (k / 2) == 0
    }

    pub fn embed_q(&self, x: &Q) -> PadicNum {
        self.ar.from_q(x)
    }

    /// Image of an exact cyclotomic number; p-power parts of the conductor must descend away.
    pub fn embed(&self, x: &CycloNum) -> Result<PadicNum, Error> {
        let mut x = x.clone();
        if !self.supports_order(x.n) {
            let m = x.minimal_conductor();
            x = x
                .descend(m)
                .filter(|_| self.supports_order(m))
                .ok_or_else(|| Error::Precondition(format!("value of conductor {m} cannot be embedded at p = {}", self.p)))?;
        }
        let den = Q::from_integer(x.den.clone());
        let mut acc = self.ar.zero();
        for (i, c) in x.num.iter().enumerate() {
            if c.is_zero_big() {
                continue;
            }
            let t = self.ar.mul(&self.ar.from_q(&(Q::from_integer(c.clone()) / &den)), &self.zeta_pow(x.n, i as u64));
            acc = self.ar.add(&acc, &t);
        }
        if acc.v < -(self.m as i64) && acc.rel > 0 {
            return Err(Error::Precondition(format!("denominator valuation {} below -M", acc.v)));
        }
        Ok(acc)
    }

    pub fn embed_compositum(&self, x: &CompositumNum) -> Result<PadicNum, Error> {
        let u = self.embed(&x.u)?;
        if x.v.is_zero() {
            return Ok(u);
        }
        let s = self.sqrt_d.as_ref().ok_or_else(|| Error::Precondition("√D is not embedded for F = ℚ".into()))?;
        Ok(self.ar.add(&u, &self.ar.mul(&self.embed(&x.v)?, s)))
    }

    /// (ω_p(x), ⟨x⟩) with x = ω_p(x)⟨x⟩ and ⟨x⟩ ≡ 1 mod 𝐩.
    pub fn teich_split(&self, x: &PadicNum) -> Result<(PadicNum, PadicNum), Error> {
        if x.v != 0 || x.rel == 0 {
            return Err(Error::Precondition("Teichmüller splitting needs a unit".into()));
        }
        let ar = &self.ar;
        let w = if self.p == 2 {
            let r = ar.to_int_mod(x, 2).ok_or_else(|| Error::Precondition("p = 2 splitting is only defined on ℤ_2".into()))?;
            ar.from_int(if r % 4 == 1 { 1 } else { -1 })
        } else {
            let q = self.p.pow(ar.d as u32);
            let mut y = x.clone();
            for _ in 0..=ar.w {
                y = ar.pow(&y, q);
            }
            y
        };
        let rest = ar.div(x, &w);
        Ok((w, rest))
    }

    /// Exponent e with ω_p(x) = ζ_{p-1}^e (for p = 2: ω(x) = (-1)^e), x a p-adic unit integer.
    pub fn omega_exp(&self, x: i64) -> u64 {
        let p = self.p as i64;
        if self.p == 2 {
            return if x.rem_euclid(4) == 1 { 0 } else { 1 };
        }
        let r = x.rem_euclid(p) as u64;
        assert!(r != 0, "ω is evaluated on units only");
        let mut acc = 1u64;
        for e in 0..self.p - 1 {
            if acc == r {
                return e;
            }
            acc = acc * self.omega_gen % self.p;
        }
        unreachable!("omega generator is a primitive root")
    }

    /// Order of the Teichmüller character's values: p - 1, or 2 when p = 2.
    pub fn tame_order(&self) -> u64 {
        if self.p == 2 {
            2
        } else {
            self.p - 1
        }
    }

    pub fn phi_n(&self) -> u64 {
        euler_phi(self.n)
    }
}

trait IsZeroBig {
    fn is_zero_big(&self) -> bool;
}

impl IsZeroBig for BigInt {
    fn is_zero_big(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q;
    use crate::field::{make_field, FieldSpec};

    #[test]
    fn one_minus_zeta3_is_unit_at_7() {
        let f = make_field(&FieldSpec::Rational).unwrap();
        let c = PadicCtx::new(&f, 7, 3, 4, 4).unwrap();
        let x = c.embed(&CycloNum::one(3).sub(&CycloNum::root(3, 1))).unwrap();
        assert_eq!(x.v, 0);
    }

    #[test]
    fn sqrt5_at_11() {
        let f = make_field(&FieldSpec::Quadratic(5)).unwrap();
        let c = PadicCtx::new(&f, 11, 1, 4, 4).unwrap();
        let s = c.sqrt_d.clone().unwrap();
        let r = c.ar.to_int_mod(&s, 1).unwrap();
        assert!(r == 4 || r == 7);
        assert!(c.ar.congruent(&c.ar.mul(&s, &s), &c.ar.from_int(5), 8));
    }

    #[test]
    fn teichmuller_of_two_mod_25() {
        let f = make_field(&FieldSpec::Rational).unwrap();
        let c = PadicCtx::new(&f, 5, 1, 2, 4).unwrap();
        let (w, rest) = c.teich_split(&c.ar.from_int(2)).unwrap();
        assert_eq!(c.ar.to_int_mod(&w, 2), Some(7));
        assert_eq!(c.ar.to_int_mod(&rest, 1), Some(1));
        let (w1, r1) = c.teich_split(&c.ar.one()).unwrap();
        assert!(c.ar.congruent(&w1, &c.ar.one(), 6) && c.ar.congruent(&r1, &c.ar.one(), 6));
        assert_eq!(c.omega_exp(1), 0);
        let _ = q(0);
    }

    #[test]
    fn embedding_is_multiplicative() {
        let f = make_field(&FieldSpec::Quadratic(2)).unwrap();
        let c = PadicCtx::new(&f, 5, 12, 4, 4).unwrap();
        let a = CycloNum::root(12, 5).add(&CycloNum::from_q(12, &q(3)));
        let b = CycloNum::root(12, 7).sub(&CycloNum::root(12, 2));
        let lhs = c.embed(&a.mul(&b)).unwrap();
        let rhs = c.ar.mul(&c.embed(&a).unwrap(), &c.embed(&b).unwrap());
        assert!(c.ar.congruent(&lhs, &rhs, 8));
        let z4 = c.embed(&CycloNum::root(4, 1)).unwrap();
        assert!(c.ar.congruent(&c.ar.mul(&z4, &z4), &c.ar.from_int(-1), 8));
    }
}
