use super::{Elem, Field};
use crate::arith::{factor_u64, q, Hnf, Q};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Fractional ideal as (1/den)·L where L ⊂ Z^g is in Hermite normal form with
/// respect to the integral basis (1, ω). The form is canonical, so equality
/// and hashing are structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ideal {
    pub den: i128,
    pub rows: Vec<Vec<i128>>,
}

fn lcm_big(a: &BigInt, b: &BigInt) -> BigInt {
    a.lcm(b)
}

impl Ideal {
    fn normalize(den: i128, hnf: Hnf) -> Ideal {
        let mut g = den;
        for r in &hnf.rows {
            for &x in r {
                g = g.gcd(&x);
            }
        }
        let rows = hnf.rows.iter().map(|r| r.iter().map(|x| x / g).collect()).collect();
        Ideal { den: den / g, rows }
    }

    /// Z-span of the given elements (must have full rank).
    pub fn from_zbasis(f: &Field, xs: &[Elem]) -> Ideal {
        let coords: Vec<Vec<Q>> = xs.iter().map(|x| f.coords(x)).collect();
        let mut l = BigInt::one();
        for c in coords.iter().flatten() {
            l = lcm_big(&l, c.denom());
        }
        let lq = Q::from_integer(l.clone());
        let gens: Vec<Vec<i128>> = coords
            .iter()
            .map(|c| c.iter().map(|x| (x * &lq).to_integer().to_i128().expect("ideal entry overflow")).collect())
            .collect();
        let den = l.to_i128().expect("ideal denominator overflow");
        Ideal::normalize(den, Hnf::from_generators(f.g, &gens))
    }

    /// O-module generated by the given elements.
    pub fn from_gens(f: &Field, xs: &[Elem]) -> Ideal {
        let mut all = Vec::new();
        for x in xs {
            all.push(x.clone());
            if f.g == 2 {
                all.push(x * &f.omega());
            }
        }
        Ideal::from_zbasis(f, &all)
    }

    pub fn unit(f: &Field) -> Ideal {
        Ideal::from_gens(f, &[f.one()])
    }

    pub fn principal(f: &Field, x: &Elem) -> Ideal {
        Ideal::from_gens(f, &[x.clone()])
    }

    pub fn hnf(&self) -> Hnf {
        Hnf { rows: self.rows.clone() }
    }

    /// The Z-basis read off the HNF rows.
    pub fn basis(&self, f: &Field) -> Vec<Elem> {
        let den = Q::from_integer(BigInt::from(self.den));
        self.rows
            .iter()
            .map(|r| {
                let c: Vec<Q> = r.iter().map(|&x| Q::from_integer(BigInt::from(x)) / &den).collect();
                f.from_coords(&c)
            })
            .collect()
    }

    pub fn norm(&self) -> Q {
        let g = self.rows.len() as u32;
        let num: i128 = (0..self.rows.len()).map(|i| self.rows[i][i]).product();
        Q::new(BigInt::from(num), BigInt::from(self.den).pow(g))
    }

    pub fn is_integral(&self) -> bool {
        self.den == 1
    }

    pub fn mul(&self, f: &Field, o: &Ideal) -> Ideal {
        let a = self.basis(f);
        let b = o.basis(f);
        let prods: Vec<Elem> = a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect();
        Ideal::from_zbasis(f, &prods)
    }

    pub fn pow(&self, f: &Field, e: u32) -> Ideal {
        (0..e).fold(Ideal::unit(f), |acc, _| acc.mul(f, self))
    }

    pub fn add(&self, f: &Field, o: &Ideal) -> Ideal {
        let mut xs = self.basis(f);
        xs.extend(o.basis(f));
        Ideal::from_zbasis(f, &xs)
    }

    pub fn scale(&self, f: &Field, x: &Elem) -> Ideal {
        let xs: Vec<Elem> = self.basis(f).iter().map(|b| b * x).collect();
        Ideal::from_zbasis(f, &xs)
    }

    pub fn conj(&self, f: &Field) -> Ideal {
        let xs: Vec<Elem> = self.basis(f).iter().map(|b| b.conj()).collect();
        Ideal::from_zbasis(f, &xs)
    }

    pub fn inv(&self, f: &Field) -> Ideal {
        if f.g == 1 {
            return Ideal::principal(f, &Elem::rat(f.d, self.norm().recip()));
        }
        let c = self.conj(f);
        let n = self.norm();
        c.scale(f, &Elem::rat(f.d, n.recip()))
    }

    pub fn div(&self, f: &Field, o: &Ideal) -> Ideal {
        self.mul(f, &o.inv(f))
    }

    /// Rational coordinates of x in the HNF basis.
    pub fn coords_q(&self, f: &Field, x: &Elem) -> Vec<Q> {
        let c = f.coords(x);
        let den = Q::from_integer(BigInt::from(self.den));
        let g = self.rows.len();
        // lower-triangular system m · (rows/den) = c solved from the last column
        let mut m = vec![Q::zero(); g];
        let mut rest: Vec<Q> = c.iter().map(|t| t * &den).collect();
        for i in (0..g).rev() {
            let d = Q::from_integer(BigInt::from(self.rows[i][i]));
            let mi = &rest[i] / d;
            for j in 0..=i {
                rest[j] = &rest[j] - &mi * Q::from_integer(BigInt::from(self.rows[i][j]));
            }
            m[i] = mi;
        }
        m
    }

    pub fn coords(&self, f: &Field, x: &Elem) -> Option<Vec<i128>> {
        self.coords_q(f, x)
            .iter()
            .map(|t| t.is_integer().then(|| t.to_integer().to_i128()).flatten())
            .collect()
    }

    pub fn contains(&self, f: &Field, x: &Elem) -> bool {
        self.coords(f, x).is_some()
    }

    pub fn is_subset_of(&self, f: &Field, o: &Ideal) -> bool {
        self.basis(f).iter().all(|b| o.contains(f, b))
    }

    pub fn from_coords(&self, f: &Field, m: &[i128]) -> Elem {
        let b = self.basis(f);
        let mut s = Elem::int(f.d, 0);
        for (bi, &mi) in b.iter().zip(m) {
            s = &s + &bi.scale(&q(mi as i64));
        }
        s
    }

    /// HNF of a full-rank sub-ideal in the coordinates of this ideal's basis.
    pub fn sublattice(&self, f: &Field, sub: &Ideal) -> Hnf {
        let gens: Vec<Vec<i128>> = sub
            .basis(f)
            .iter()
            .map(|b| self.coords(f, b).expect("not a sub-ideal"))
            .collect();
        Hnf::from_generators(f.g, &gens)
    }

    /// Smallest positive rational number in the ideal.
    pub fn min_rational(&self) -> Q {
        Q::new(BigInt::from(self.rows[0][0]), BigInt::from(self.den))
    }

    /// Primitive element of this ideal on the ray through x (x nonzero).
    pub fn primitive_on_ray(&self, f: &Field, x: &Elem) -> Elem {
        let c = self.coords_q(f, x);
        let mut l = BigInt::one();
        for t in &c {
            l = lcm_big(&l, t.denom());
        }
        let ints: Vec<BigInt> = c.iter().map(|t| (t * Q::from_integer(l.clone())).to_integer()).collect();
        let mut g = BigInt::zero();
        for t in &ints {
            g = g.gcd(t);
        }
        let m: Vec<i128> = ints.iter().map(|t| (t / &g).to_i128().unwrap()).collect();
        self.from_coords(f, &m)
    }

    pub fn to_string_hnf(&self) -> String {
        format!("{:?}/{}", self.rows, self.den)
    }
}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_hnf())
    }
}

/// Prime ideals above the rational prime p with their ramification indices.
pub fn primes_above(f: &Field, p: u64) -> Vec<(Ideal, u32)> {
    if f.g == 1 {
        return vec![(Ideal::principal(f, &f.int(p as i64)), 1)];
    }
    let (c1, c0) = f.omega_minpoly();
    let pi = p as i64;
    let roots: Vec<i64> = (0..pi).filter(|&r| (r * r + c1 * r + c0).rem_euclid(pi) == 0).collect();
    let w = f.omega();
    let mk = |r: i64| Ideal::from_gens(f, &[f.int(pi), &w - &f.int(r)]);
    match roots.len() {
        0 => vec![(Ideal::principal(f, &f.int(pi)), 1)],
        1 => vec![(mk(roots[0]), 2)],
        _ => {
            let a = mk(roots[0]);
            let b = mk(roots[1]);
            if a == b {
                vec![(a, 2)]
            } else {
                vec![(a, 1), (b, 1)]
            }
        }
    }
}

/// Factorisation of an integral ideal into prime ideals.
pub fn factor_ideal(f: &Field, a: &Ideal) -> Vec<(Ideal, u32)> {
    assert!(a.is_integral());
    let n = a.norm().to_integer().to_u64().expect("norm overflow");
    let mut out = Vec::new();
    for (p, _) in factor_u64(n) {
        for (pr, _) in primes_above(f, p) {
            let mut e = 0;
            let mut pw = pr.clone();
            while a.is_subset_of(f, &pw) {
                e += 1;
                pw = pw.mul(f, &pr);
            }
            if e > 0 {
                out.push((pr, e));
            }
        }
    }
    out
}

/// All integral ideals of norm exactly n.
pub fn ideals_of_norm(f: &Field, n: u64) -> Vec<Ideal> {
    let n = n as i128;
    if f.g == 1 {
        return vec![Ideal { den: 1, rows: vec![vec![n]] }];
    }
    let mut out = Vec::new();
    for a in 1..=n {
        if n % a != 0 {
            continue;
        }
        let c = n / a;
        for b in 0..a {
            let cand = Ideal { den: 1, rows: vec![vec![a, 0], vec![b, c]] };
            let w = f.omega();

            if cand.basis(f).iter().all(|x| cand.contains(f, &(x * &w))) {
                out.push(cand);
            }
        }
    }
    out
}

/// Whether two integral ideals are coprime.
pub fn coprime(f: &Field, a: &Ideal, b: &Ideal) -> bool {
    a.add(f, b) == Ideal::unit(f)
}

pub fn abs_norm_u64(a: &Ideal) -> u64 {
    a.norm().abs().to_integer().to_u64().expect("norm overflow")
}
