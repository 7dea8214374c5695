use crate::arith::{q, Q};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Element a + b·√d of Q(√d); `d = 0` encodes Q itself (then `b = 0`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Elem {
    pub d: u64,
    #[serde(with = "crate::arith::qstr")]
    pub a: Q,
    #[serde(with = "crate::arith::qstr")]
    pub b: Q,
}

impl Elem {
    pub fn new(d: u64, a: Q, b: Q) -> Elem {
        debug_assert!(d != 0 || b.is_zero());
        Elem { d, a, b }
    }

    pub fn rat(d: u64, a: Q) -> Elem {
        Elem { d, a, b: Q::zero() }
    }

    pub fn int(d: u64, n: i64) -> Elem {
        Elem::rat(d, q(n))
    }

    pub fn sqrt_d(d: u64) -> Elem {
        assert!(d != 0);
        Elem { d, a: Q::zero(), b: Q::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn conj(&self) -> Elem {
        Elem { d: self.d, a: self.a.clone(), b: -&self.b }
    }

    pub fn norm(&self) -> Q {
        if self.d == 0 {
            return self.a.clone();
        }
        &self.a * &self.a - &self.b * &self.b * q(self.d as i64)
    }

    pub fn trace(&self) -> Q {
        if self.d == 0 {
            return self.a.clone();
        }
        &self.a * q(2)
    }

    pub fn scale(&self, c: &Q) -> Elem {
        Elem { d: self.d, a: &self.a * c, b: &self.b * c }
    }

    pub fn inv(&self) -> Elem {
        assert!(!self.is_zero(), "inverse of zero");
        if self.d == 0 {
            return Elem::rat(0, self.a.recip());
        }
        let n = self.norm();
        self.conj().scale(&n.recip())
    }

    pub fn pow(&self, e: i64) -> Elem {
        let base = if e < 0 { self.inv() } else { self.clone() };
        let mut r = Elem::int(self.d, 1);
        let mut b = base;
        let mut e = e.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                r = &r * &b;
            }
            b = &b * &b;
            e >>= 1;
        }
        r
    }

    /// Exact sign of the image under embedding `tau` (0: √d > 0, 1: √d < 0).
    pub fn sign_at(&self, tau: usize) -> i8 {
        let b = if tau == 0 { self.b.clone() } else { -&self.b };
        let sa = sign(&self.a);
        let sb = sign(&b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        let a2 = &self.a * &self.a;
        let b2 = &b * &b * q(self.d as i64);
        match a2.cmp(&b2) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn degree(&self) -> usize {
        if self.d == 0 {
            1
        } else {
            2
        }
    }

    pub fn is_totally_positive(&self) -> bool {
        (0..self.degree()).all(|t| self.sign_at(t) > 0)
    }

    pub fn emb_f64(&self, tau: usize) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        if self.d == 0 {
            return a;
        }
        let b = self.b.to_f64().unwrap_or(f64::NAN) * (self.d as f64).sqrt();
        if tau == 0 {
            a + b
        } else {
            a - b
        }
    }

    /// Compare the real images under `tau` exactly.
    pub fn cmp_at(&self, other: &Elem, tau: usize) -> Ordering {
        match (self - other).sign_at(tau) {
            1 => Ordering::Greater,
            -1 => Ordering::Less,
            _ => Ordering::Equal,
        }
    }

    pub fn denominator_lcm(&self) -> BigInt {
        num_integer::Integer::lcm(self.a.denom(), self.b.denom())
    }
}

fn sign(x: &Q) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

impl<'a> Add<&'a Elem> for &'a Elem {
    type Output = Elem;
    fn add(self, o: &Elem) -> Elem {
        debug_assert_eq!(self.d, o.d);
        Elem { d: self.d, a: &self.a + &o.a, b: &self.b + &o.b }
    }
}

impl<'a> Sub<&'a Elem> for &'a Elem {
    type Output = Elem;
    fn sub(self, o: &Elem) -> Elem {
        debug_assert_eq!(self.d, o.d);
        Elem { d: self.d, a: &self.a - &o.a, b: &self.b - &o.b }
    }
}

impl<'a> Mul<&'a Elem> for &'a Elem {
    type Output = Elem;
    fn mul(self, o: &Elem) -> Elem {
        debug_assert_eq!(self.d, o.d);
        let dd = q(self.d as i64);
        Elem {
            d: self.d,
            a: &self.a * &o.a + &self.b * &o.b * dd,
            b: &self.a * &o.b + &self.b * &o.a,
        }
    }
}

impl Neg for &Elem {
    type Output = Elem;
    fn neg(self) -> Elem {
        Elem { d: self.d, a: -&self.a, b: -&self.b }
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let sq = format!("√{}", self.d);
        let bpart = if self.b.is_one() {
            sq
        } else if (-&self.b).is_one() {
            format!("-{sq}")
        } else {
            format!("{}{}", self.b, sq)
        };
        if self.a.is_zero() {
            write!(f, "{bpart}")
        } else if bpart.starts_with('-') {
            write!(f, "{}{}", self.a, bpart)
        } else {
            write!(f, "{}+{}", self.a, bpart)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qf;
    use proptest::prelude::*;

    fn el(a: i64, b: i64) -> Elem {
        Elem::new(3, q(a), q(b))
    }

    #[test]
    fn display_and_units() {
        let e = el(2, 1);
        assert_eq!(e.to_string(), "2+√3");
        assert_eq!(e.norm(), q(1));
        assert!(e.is_totally_positive());
        assert_eq!(&e * &e.inv(), Elem::int(3, 1));
        assert_eq!(Elem::new(3, qf(1, 2), q(-1)).to_string(), "1/2-√3");
    }

    proptest! {
        #[test]
        fn sign_matches_float(a in -40i64..40, b in -40i64..40, tau in 0usize..2) {
            let x = el(a, b);
            let f = x.emb_f64(tau);
            let s = x.sign_at(tau);
            if f.abs() > 1e-9 {
                prop_assert_eq!(s, if f > 0.0 { 1 } else { -1 });
            }
        }

        #[test]
        fn norm_is_multiplicative(a in -30i64..30, b in -30i64..30, c in -30i64..30, d in -30i64..30) {
            let x = el(a, b);
            let y = el(c, d);
            prop_assert_eq!((&x * &y).norm(), x.norm() * y.norm());
        }
    }
}
