//! Truncated power series in g ≤ 2 variables T_j with exact coefficients.

use crate::arith::Q;
use crate::cyclo::{CompositumNum, CycloNum};
use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Coefficient ring for [`TruncSeries`].
pub trait Coeff: Clone + PartialEq + std::fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn inv(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn scale_q(&self, c: &Q) -> Self;
}

impl Coeff for CycloNum {
    fn zero_like(&self) -> Self {
        CycloNum::zero(self.n)
    }
    fn one_like(&self) -> Self {
        CycloNum::one(self.n)
    }
    fn add(&self, o: &Self) -> Self {
        CycloNum::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        CycloNum::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        CycloNum::mul(self, o)
    }
    fn inv(&self) -> Self {
        CycloNum::inv(self)
    }
    fn is_zero(&self) -> bool {
        CycloNum::is_zero(self)
    }
    fn scale_q(&self, c: &Q) -> Self {
        self.scale(c)
    }
}

impl Coeff for CompositumNum {
    fn zero_like(&self) -> Self {
        CompositumNum::zero(self.d, self.u.n)
    }
    fn one_like(&self) -> Self {
        CompositumNum::from_cyclo(self.d, CycloNum::one(self.u.n))
    }
    fn add(&self, o: &Self) -> Self {
        CompositumNum::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        CompositumNum::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        CompositumNum::mul(self, o)
    }
    fn inv(&self) -> Self {
        CompositumNum::inv(self)
    }
    fn is_zero(&self) -> bool {
        CompositumNum::is_zero(self)
    }
    fn scale_q(&self, c: &Q) -> Self {
        self.scale(c)
    }
}

/// Generalised binomial coefficient C(m, i) for integer m.
pub fn binom_i(m: i64, i: usize) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for t in 0..i as i64 {
        num *= m - t;
        den *= t + 1;
    }
    num / den
}

/// Series Σ c_μ T^μ over monomials of total degree ≤ cap.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncSeries<C: Coeff> {
    pub g: usize,
    pub cap: usize,
    coeffs: Vec<C>,
}

fn len_for(g: usize, cap: usize) -> usize {
    if g == 1 {
        cap + 1
    } else {
        (cap + 1) * (cap + 2) / 2
    }
}

fn index(g: usize, mu: &[usize]) -> usize {
    if g == 1 {
        mu[0]
    } else {
        let d = mu[0] + mu[1];
        d * (d + 1) / 2 + mu[1]
    }
}

impl<C: Coeff> TruncSeries<C> {
    pub fn zero(g: usize, cap: usize, like: &C) -> Self {
        TruncSeries { g, cap, coeffs: vec![like.zero_like(); len_for(g, cap)] }
    }

    pub fn constant(g: usize, cap: usize, c: C) -> Self {
        let mut s = Self::zero(g, cap, &c);
        s.coeffs[0] = c;
        s
    }

    /// Monomials of total degree ≤ cap in canonical order.
    pub fn monomials(&self) -> Vec<Vec<usize>> {
        monomials(self.g, self.cap)
    }

    pub fn coeff(&self, mu: &[usize]) -> &C {
        &self.coeffs[index(self.g, mu)]
    }

    pub fn set(&mut self, mu: &[usize], c: C) {
        let i = index(self.g, mu);
        self.coeffs[i] = c;
    }

    pub fn constant_term(&self) -> &C {
        &self.coeffs[0]
    }

    /// c · Π_j (1+T_j)^{m_j}.
    pub fn shifted_monomial(g: usize, cap: usize, c: &C, m: &[i64]) -> Self {
        let mut s = Self::zero(g, cap, c);
        let binoms: Vec<Vec<Q>> = m.iter().map(|&mj| (0..=cap).map(|i| Q::from_integer(binom_i(mj, i))).collect()).collect();
        for mu in monomials(g, cap) {
            let mut q = Q::one();
            for (j, &e) in mu.iter().enumerate() {
                q *= &binoms[j][e];
            }
            if !q.is_zero() {
                s.set(&mu, c.scale_q(&q));
            }
        }
        s
    }

    pub fn truncate(&self, cap: usize) -> Self {
        assert!(cap <= self.cap);
        let mut s = Self::zero(self.g, cap, &self.coeffs[0]);
        for mu in monomials(self.g, cap) {
            s.set(&mu, self.coeff(&mu).clone());
        }
        s
    }

    fn zip(&self, o: &Self, f: impl Fn(&C, &C) -> C) -> Self {
        assert_eq!(self.g, o.g);
        let cap = self.cap.min(o.cap);
        let n = len_for(self.g, cap);
        TruncSeries { g: self.g, cap, coeffs: (0..n).map(|i| f(&self.coeffs[i], &o.coeffs[i])).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.add(b))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a.sub(b))
    }

    pub fn scale(&self, c: &C) -> Self {
        TruncSeries { g: self.g, cap: self.cap, coeffs: self.coeffs.iter().map(|x| x.mul(c)).collect() }
    }

    pub fn scale_q(&self, c: &Q) -> Self {
        TruncSeries { g: self.g, cap: self.cap, coeffs: self.coeffs.iter().map(|x| x.scale_q(c)).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.g, o.g);
        let cap = self.cap.min(o.cap);
        let mut out = Self::zero(self.g, cap, &self.coeffs[0]);
        let mons = monomials(self.g, cap);
        for a in &mons {
            let ca = self.coeff(a);
            if ca.is_zero() {
                continue;
            }
            for b in &mons {
                let deg: usize = a.iter().sum::<usize>() + b.iter().sum::<usize>();
                if deg > cap {
                    continue;
                }
                let cb = o.coeff(b);
                if cb.is_zero() {
                    continue;
                }
                let mu: Vec<usize> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                let i = index(self.g, &mu);
                out.coeffs[i] = out.coeffs[i].add(&ca.mul(cb));
            }
        }
        out
    }

    /// Multiplicative inverse; the constant term must be invertible.
    pub fn inv(&self) -> Self {
        let c0 = &self.coeffs[0];
        assert!(!c0.is_zero(), "series with zero constant term is not invertible");
        let c0i = c0.inv();
        let mons = monomials(self.g, self.cap);
        let mut out = Self::zero(self.g, self.cap, c0);
        out.coeffs[0] = c0i.clone();
        for mu in mons.iter().skip(1) {
            let mut acc = c0.zero_like();
            for nu in &mons {
                if nu.iter().zip(mu).any(|(a, b)| a > b) || nu == mu {
                    continue;
                }
                let rest: Vec<usize> = mu.iter().zip(nu).map(|(a, b)| a - b).collect();
                let f = self.coeff(&rest);
                if f.is_zero() {
                    continue;
                }
                acc = acc.add(&f.mul(out.coeff(nu)));
            }
            let v = acc.mul(&c0i);
            out.set(mu, c0.zero_like().sub(&v));
        }
        out
    }

    /// (1+T_j) ∂/∂T_j; the valid cap drops by one.
    pub fn d_log(&self, j: usize) -> Self {
        assert!(self.cap >= 1, "truncation cap exhausted");
        let cap = self.cap - 1;
        let mut out = Self::zero(self.g, cap, &self.coeffs[0]);
        for mu in monomials(self.g, cap) {
            let mut up = mu.clone();
            up[j] += 1;
            let a = self.coeff(&up).scale_q(&Q::from_integer(BigInt::from(up[j])));
            let b = self.coeff(&mu).scale_q(&Q::from_integer(BigInt::from(mu[j])));
            out.set(&mu, a.add(&b));
        }
        out
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> TruncSeries<D> {
        TruncSeries { g: self.g, cap: self.cap, coeffs: self.coeffs.iter().map(f).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

pub fn monomials(g: usize, cap: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(len_for(g, cap));
    for d in 0..=cap {
        if g == 1 {
            out.push(vec![d]);
        } else {
            for b in 0..=d {
                out.push(vec![d - b, b]);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q;

    #[test]
    fn binomials() {
        assert_eq!(binom_i(5, 2), BigInt::from(10));
        assert_eq!(binom_i(-1, 3), BigInt::from(-1));
        assert_eq!(binom_i(-2, 2), BigInt::from(3));
    }

    #[test]
    fn inverse_and_dlog() {
        // 1/(1 - ζ3 (1+T)) times itself inverse is 1
        let z = CycloNum::root(3, 1);
        let m = TruncSeries::shifted_monomial(2, 5, &z, &[1, 2]);
        let one = TruncSeries::constant(2, 5, CycloNum::one(3));
        let f = one.sub(&m);
        assert_eq!(f.mul(&f.inv()), one);
        // D_j acts on (1+T)^m by multiplication with m
        let d = m.d_log(1);
        assert_eq!(d, m.truncate(4).scale_q(&q(2)));
    }
}
