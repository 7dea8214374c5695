//! Arithmetic in an unramified extension K = ℚ_p[x]/(P) with capped relative precision.

use crate::arith::{q_val, Q};
use crate::exact::ValueRing;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

/// Valuation used for an exact zero.
pub const EXACT_ZERO_V: i64 = 1 << 40;

/// p^v · Σ c_i x^i, known modulo p^{v + rel}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PadicNum {
    pub v: i64,
    pub rel: u32,
    pub c: Vec<u128>,
}

impl PadicNum {
    /// Absolute precision: the value is known modulo p^prec.
    pub fn prec(&self) -> i64 {
        self.v + self.rel as i64
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    /// Valuation, or the absolute precision when no nonzero digit is known.
    pub fn valuation(&self) -> i64 {
        self.v
    }
}

/// Parameters of K and of the embedding of ℚ(ζ_n, √D).
#[derive(Clone, Debug)]
pub struct Arith {
    pub p: u64,
    pub d: usize,
    /// Relative working precision in digits.
    pub w: u32,
    /// P = x^d + Σ_{i<d} poly[i] x^i.
    pub poly: Vec<u128>,
    pw: Vec<u128>,
}

impl Arith {
    pub fn new(p: u64, d: usize, w: u32, poly: Vec<u128>) -> Arith {
        let mut pw = vec![1u128];
        for _ in 0..w + 1 {
            pw.push(pw.last().unwrap() * p as u128);
        }
        Arith { p, d, w, poly, pw }
    }

    pub fn pow_p(&self, e: u32) -> u128 {
        self.pw[e as usize]
    }

    pub fn zero(&self) -> PadicNum {
        PadicNum { v: EXACT_ZERO_V, rel: 0, c: vec![0; self.d] }
    }

    pub fn one(&self) -> PadicNum {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> PadicNum {
        self.from_q(&Q::from_integer(BigInt::from(n)))
    }

    fn big_mod(&self, x: &BigInt, rel: u32) -> u128 {
        let m = BigInt::from(self.pow_p(rel));
        x.mod_floor(&m).to_u128().unwrap()
    }

    pub fn from_q(&self, x: &Q) -> PadicNum {
        if x.is_zero() {
            return self.zero();
        }
        let v = q_val(x, self.p);
        let pb = BigInt::from(self.p);
        let (mut n, mut dn) = (x.numer().clone(), x.denom().clone());
        if v > 0 {
            n /= pb.pow(v as u32);
        } else if v < 0 {
            dn /= pb.pow((-v) as u32);
        }
        let rel = self.w;
        let m = BigInt::from(self.pow_p(rel));
        let inv = dn.mod_floor(&m).extended_gcd(&m).x.mod_floor(&m);
        let mut c = vec![0u128; self.d];
        c[0] = self.big_mod(&(n * inv), rel);
        PadicNum { v, rel, c }
    }

    /// Element with integer coordinates (unit scale), reduced to full relative precision.
    pub fn from_coeffs(&self, c: Vec<u128>) -> PadicNum {
        self.normalize(PadicNum { v: 0, rel: self.w, c })
    }

    pub fn normalize(&self, mut a: PadicNum) -> PadicNum {
        let p = self.p as u128;
        let m = self.pow_p(a.rel);
        for x in a.c.iter_mut() {
            *x %= m;
        }
        while a.rel > 0 && a.c.iter().all(|&x| x % p == 0) {
            for x in a.c.iter_mut() {
                *x /= p;
            }
            a.v += 1;
            a.rel -= 1;
        }
        if a.rel == 0 && a.v >= EXACT_ZERO_V / 2 {
            a.v = EXACT_ZERO_V;
        }
        a
    }

    pub fn add(&self, a: &PadicNum, b: &PadicNum) -> PadicNum {
        let prec = a.prec().min(b.prec());
        let v = a.v.min(b.v);
        if prec <= v {
            return PadicNum { v: prec, rel: 0, c: vec![0; self.d] };
        }
        let rel = (prec - v).min(self.w as i64) as u32;
        let prec = v + rel as i64;
        let m = self.pow_p(rel);
        let lift = |x: &PadicNum| -> Vec<u128> {
            let sh = x.v - v;
            if sh >= rel as i64 || x.rel == 0 {
                return vec![0; self.d];
            }
            let s = self.pow_p(sh as u32);
            x.c.iter().map(|&c| (c % m) * s % m).collect()
        };
        let (la, lb) = (lift(a), lift(b));
        let c = la.iter().zip(&lb).map(|(x, y)| (x + y) % m).collect();
        let _ = prec;
        self.normalize(PadicNum { v, rel, c })
    }

    pub fn neg(&self, a: &PadicNum) -> PadicNum {
        let m = self.pow_p(a.rel);
        PadicNum { v: a.v, rel: a.rel, c: a.c.iter().map(|&x| (m - x % m) % m).collect() }
    }

    pub fn sub(&self, a: &PadicNum, b: &PadicNum) -> PadicNum {
        self.add(a, &self.neg(b))
    }

    fn poly_mul(&self, a: &[u128], b: &[u128], m: u128) -> Vec<u128> {
        let d = self.d;
        let mut t = vec![0u128; 2 * d];
        for i in 0..d {
            if a[i] == 0 {
                continue;
            }
            for j in 0..d {
                t[i + j] = (t[i + j] + a[i] * b[j]) % m;
            }
        }
        for k in (d..2 * d - 1).rev() {
            let top = t[k];
            if top == 0 {
                continue;
            }
            t[k] = 0;
            for i in 0..d {
                t[k - d + i] = (t[k - d + i] + m - top * (self.poly[i] % m) % m) % m;
            }
        }
        t.truncate(d);
        t
    }

    pub fn mul(&self, a: &PadicNum, b: &PadicNum) -> PadicNum {
        let rel = a.rel.min(b.rel);
        let v = a.v.saturating_add(b.v).min(EXACT_ZERO_V);
        if rel == 0 {
            let prec = (a.prec() + b.v).min(b.prec() + a.v);
            return PadicNum { v: prec.min(EXACT_ZERO_V), rel: 0, c: vec![0; self.d] };
        }
        let m = self.pow_p(rel);
        let ra: Vec<u128> = a.c.iter().map(|x| x % m).collect();
        let rb: Vec<u128> = b.c.iter().map(|x| x % m).collect();
        let c = self.poly_mul(&ra, &rb, m);
        self.normalize(PadicNum { v, rel, c })
    }

    pub fn scale_int(&self, a: &PadicNum, n: i64) -> PadicNum {
        self.mul(a, &self.from_int(n))
    }

    pub fn pow(&self, a: &PadicNum, mut e: u64) -> PadicNum {
        let mut base = a.clone();
        let mut out = self.one();
        while e > 0 {
            if e & 1 == 1 {
                out = self.mul(&out, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        out
    }

    pub fn pow_i(&self, a: &PadicNum, e: i64) -> PadicNum {
        if e >= 0 {
            self.pow(a, e as u64)
        } else {
            self.inv(&self.pow(a, (-e) as u64))
        }
    }

    /// Inverse of a nonzero element; panics when no nonzero digit is known.
    pub fn inv(&self, a: &PadicNum) -> PadicNum {
        assert!(a.rel > 0, "inverse of an element indistinguishable from zero");
        // residue inverse in F_{p^d}, then Newton iteration y ← y(2 - a y)
        let p = self.p as u128;
        let unit = PadicNum { v: 0, rel: 1, c: a.c.iter().map(|x| x % p).collect() };
        let q = (self.p as u128).pow(self.d as u32);
        let mut y = self.pow(&unit, (q - 2) as u64);
        y.v = 0;
        let u = PadicNum { v: 0, rel: a.rel, c: a.c.clone() };
        let two = self.from_int(2);
        let mut have = 1u32;
        while have < a.rel {
            have = (have * 2).min(a.rel);
            let yy = PadicNum { v: 0, rel: have, c: y.c.clone() };
            let uu = PadicNum { v: 0, rel: have, c: u.c.clone() };
            y = self.mul(&yy, &self.sub(&two, &self.mul(&uu, &yy)));
            y = PadicNum { v: 0, rel: have, c: y.c.clone() };
        }
        PadicNum { v: -a.v, rel: a.rel, c: y.c }
    }

    pub fn div(&self, a: &PadicNum, b: &PadicNum) -> PadicNum {
        self.mul(a, &self.inv(b))
    }

    /// Forget digits at or beyond p^prec.
    pub fn cap(&self, a: &PadicNum, prec: i64) -> PadicNum {
        if a.prec() <= prec {
            return a.clone();
        }
        if prec <= a.v {
            return PadicNum { v: prec, rel: 0, c: vec![0; self.d] };
        }
        let rel = (prec - a.v) as u32;
        self.normalize(PadicNum { v: a.v, rel, c: a.c.clone() })
    }

    /// Whether a ≡ b modulo p^m, with both known to at least that precision.
    pub fn congruent(&self, a: &PadicNum, b: &PadicNum, m: i64) -> bool {
        let d = self.sub(a, b);
        d.prec() >= m && d.v >= m
    }

    /// Reduction of a p-integral element to residues in F_{p^d}.
    pub fn residue(&self, a: &PadicNum) -> Vec<u128> {
        assert!(a.v >= 0);
        if a.v > 0 || a.rel == 0 {
            return vec![0; self.d];
        }
        a.c.iter().map(|x| x % self.p as u128).collect()
    }

    /// Integer representative of an element of ℤ_p modulo p^m (requires v ≥ 0 and no x-part).
    pub fn to_int_mod(&self, a: &PadicNum, m: u32) -> Option<u128> {
        if a.c.iter().skip(1).any(|&x| x != 0) || a.v < 0 {
            return None;
        }
        if a.v >= m as i64 {
            return Some(0);
        }
        let mm = self.pow_p(m);
        Some(a.c[0] % mm * self.pow_p(a.v as u32) % mm)
    }
}

/// Modular helpers on integers mod p^w.
pub fn inv_mod(a: u128, m: u128) -> u128 {
    let r = BigInt::from(a).extended_gcd(&BigInt::from(m));
    assert!(r.gcd == BigInt::from(1), "not invertible");
    r.x.mod_floor(&BigInt::from(m)).to_u128().unwrap()
}

pub fn pow_mod(mut b: u128, mut e: u128, m: u128) -> u128 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

impl ValueRing for super::PadicCtx {
    type E = PadicNum;
    fn from_q(&self, x: &Q) -> PadicNum {
        self.ar.from_q(x)
    }
    fn root(&self, n: u64, e: u64) -> PadicNum {
        self.zeta_pow(n, e)
    }
    fn add(&self, a: &PadicNum, b: &PadicNum) -> PadicNum {
        self.ar.add(a, b)
    }
    fn sub(&self, a: &PadicNum, b: &PadicNum) -> PadicNum {
        self.ar.sub(a, b)
    }
    fn mul(&self, a: &PadicNum, b: &PadicNum) -> PadicNum {
        self.ar.mul(a, b)
    }
    fn inv(&self, a: &PadicNum) -> PadicNum {
        self.ar.inv(a)
    }
}
