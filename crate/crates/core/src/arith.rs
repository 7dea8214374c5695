//! Integer, rational and small-lattice helpers shared by every layer.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

/// Serde adapter writing rationals as decimal strings "n" or "n/d".
pub mod qstr {
    use super::Q;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: &BigInt) -> Q {
    Q::from_integer(n.clone())
}

pub fn gcd_i128(a: i128, b: i128) -> i128 {
    a.gcd(&b)
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

/// Prime factorisation by trial division.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factor_u64(n) == vec![(n, 1)]
}

pub fn is_squarefree(n: u64) -> bool {
    n >= 1 && factor_u64(n).iter().all(|&(_, e)| e == 1)
}

pub fn euler_phi(n: u64) -> u64 {
    factor_u64(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

pub fn is_prime_power_of(n: u64, p: u64) -> bool {
    let mut n = n;
    while n % p == 0 {
        n /= p;
    }
    n == 1
}

pub fn mod_pow(b: u64, mut e: u64, m: u64) -> u64 {
    let m = m as u128;
    let mut b = b as u128 % m;
    let mut r = 1u128 % m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r as u64
}

/// Multiplicative order of `a` modulo `n` (requires gcd(a, n) = 1).
pub fn mult_order(a: u64, n: u64) -> u64 {
    if n == 1 {
        return 1;
    }
    let mut k = 1u64;
    let mut x = a % n;
    while x != 1 {
        x = (x as u128 * a as u128 % n as u128) as u64;
        k += 1;
    }
    k
}

/// Returns (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let qt = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - qt * r1);
        (s0, s1) = (s1, s0 - qt * s1);
        (t0, t1) = (t1, t0 - qt * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

pub fn isqrt_u128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

pub fn is_square_u128(n: u128) -> Option<u128> {
    let r = isqrt_u128(n);
    (r * r == n).then_some(r)
}

pub fn to_i64(x: &BigInt) -> i64 {
    x.to_i64().expect("integer does not fit in i64")
}

/// Exact integer value of a rational known to be integral.
pub fn q_to_int(x: &Q) -> Option<BigInt> {
    x.is_integer().then(|| x.to_integer())
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Bernoulli numbers B_0..=B_n with B_1 = -1/2.
pub fn bernoulli_numbers(n: usize) -> Vec<Q> {
    let mut b = vec![Q::one()];
    for m in 1..=n {
        let mut s = Q::zero();
        for (k, bk) in b.iter().enumerate() {
            s += qi(&binomial(m as u64 + 1, k as u64)) * bk;
        }
        b.push(-s / q(m as i64 + 1));
    }
    b
}

/// Bernoulli polynomial B_n(x) = sum_k C(n,k) B_k x^{n-k}.
pub fn bernoulli_poly(n: usize, x: &Q, bern: &[Q]) -> Q {
    let mut s = Q::zero();
    let mut xp = Q::one();
    for k in (0..=n).rev() {
        s += qi(&binomial(n as u64, k as u64)) * &bern[k] * &xp;
        xp *= x;
    }
    s
}

/// p-adic valuation of a nonzero rational.
pub fn q_val(x: &Q, p: u64) -> i64 {
    assert!(!x.is_zero(), "valuation of zero");
    let p = BigInt::from(p);
    let count = |mut n: BigInt| {
        let mut v = 0i64;
        while (&n % &p).is_zero() {
            n /= &p;
            v += 1;
        }
        v
    };
    count(x.numer().abs()) - count(x.denom().abs())
}

/// Full-rank sublattice of Z^g in lower-triangular Hermite normal form:
/// row i has zeros beyond column i, a positive diagonal, and entries
/// left of the diagonal reduced modulo the diagonal of their column.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hnf {
    pub rows: Vec<Vec<i128>>,
}

impl Hnf {
    pub fn from_generators(g: usize, gens: &[Vec<i128>]) -> Hnf {
        let mut pool: Vec<Vec<i128>> = gens.iter().filter(|v| v.iter().any(|&x| x != 0)).cloned().collect();
        let mut rows = vec![vec![0i128; g]; g];
        for col in (0..g).rev() {
            let mut pivot: Option<Vec<i128>> = None;
            let mut rest = Vec::new();
            for v in pool.drain(..) {
                if v[col] == 0 {
                    rest.push(v);
                    continue;
                }
                match pivot.take() {
                    None => pivot = Some(v),
                    Some(pv) => {
                        let (gg, x, y) = ext_gcd(pv[col], v[col]);
                        let a = pv[col] / gg;
                        let b = v[col] / gg;
                        let new_p: Vec<i128> = (0..g).map(|i| x * pv[i] + y * v[i]).collect();
                        let other: Vec<i128> = (0..g).map(|i| b * pv[i] - a * v[i]).collect();
                        debug_assert_eq!(other[col], 0);
                        if other.iter().any(|&t| t != 0) {
                            rest.push(other);
                        }
                        pivot = Some(new_p);
                    }
                }
            }
            let mut pv = pivot.expect("generators do not span a full-rank lattice");
            if pv[col] < 0 {
                pv.iter_mut().for_each(|t| *t = -*t);
            }
            rows[col] = pv;
            pool = rest;
        }
        for i in 0..g {
            for j in (0..i).rev() {
                let d = rows[j][j];
                let t = rows[i][j].div_euclid(d);
                if t != 0 {
                    let rj = rows[j].clone();
                    for c in 0..=j {
                        rows[i][c] -= t * rj[c];
                    }
                }
            }
        }
        Hnf { rows }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn index(&self) -> i128 {
        (0..self.dim()).map(|i| self.rows[i][i]).product()
    }

    /// Canonical coset representative with 0 <= v[i] < diag[i].
    pub fn reduce(&self, v: &[i128]) -> Vec<i128> {
        let mut v = v.to_vec();
        for i in (0..self.dim()).rev() {
            let t = v[i].div_euclid(self.rows[i][i]);
            if t != 0 {
                for c in 0..=i {
                    v[c] -= t * self.rows[i][c];
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[i128]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// All canonical coset representatives of Z^g / L.
    pub fn coset_reps(&self) -> Vec<Vec<i128>> {
        let g = self.dim();
        let mut out = vec![vec![]];
        for i in 0..g {
            let mut next = Vec::new();
            for v in &out {
                for x in 0..self.rows[i][i] {
                    let mut w = v.clone();
                    w.push(x);
                    next.push(w);
                }
            }
            out = next;
        }
        out
    }
}

/// Smith normal form: returns (diag, u, v) with u * a * v = diag(d), d_i | d_{i+1},
/// for a square integer matrix of full rank.
pub fn smith(a: &[Vec<i128>]) -> (Vec<i128>, Vec<Vec<i128>>, Vec<Vec<i128>>) {
    let n = a.len();
    let mut m = a.to_vec();
    let mut u = identity(n);
    let mut v = identity(n);
    for t in 0..n {
        loop {
            // move the smallest nonzero entry of the trailing block to (t, t)
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if m[i][j] != 0 && best.map_or(true, |(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let (bi, bj) = best.expect("matrix is singular");
            m.swap(t, bi);
            u.swap(t, bi);
            for row in m.iter_mut() {
                row.swap(t, bj);
            }
            for row in v.iter_mut() {
                row.swap(t, bj);
            }
            let mut clean = true;
            for i in t + 1..n {
                let f = m[i][t].div_euclid(m[t][t]);
                if f != 0 {
                    for c in 0..n {
                        m[i][c] -= f * m[t][c];
                        u[i][c] -= f * u[t][c];
                    }
                }
                if m[i][t] != 0 {
                    clean = false;
                }
            }
            for j in t + 1..n {
                let f = m[t][j].div_euclid(m[t][t]);
                if f != 0 {
                    for r in 0..n {
                        m[r][j] -= f * m[r][t];
                        v[r][j] -= f * v[r][t];
                    }
                }
                if m[t][j] != 0 {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility: fold any trailing entry not divisible by the pivot into row t
            let mut fixed = true;
            'outer: for i in t + 1..n {
                for j in t + 1..n {
                    if m[i][j] % m[t][t] != 0 {
                        for c in 0..n {
                            m[t][c] += m[i][c];
                            u[t][c] += u[i][c];
                        }
                        fixed = false;
                        break 'outer;
                    }
                }
            }
            if fixed {
                break;
            }
        }
        if m[t][t] < 0 {
            for c in 0..n {
                m[t][c] = -m[t][c];
                u[t][c] = -u[t][c];
            }
        }
    }
    ((0..n).map(|i| m[i][i]).collect(), u, v)
}

pub fn identity(n: usize) -> Vec<Vec<i128>> {
    (0..n).map(|i| (0..n).map(|j| (i == j) as i128).collect()).collect()
}

pub fn mat_mul(a: &[Vec<i128>], b: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let n = a.len();
    let k = b.len();
    let m = b[0].len();
    (0..n)
        .map(|i| (0..m).map(|j| (0..k).map(|t| a[i][t] * b[t][j]).sum()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bernoulli_small() {
        let b = bernoulli_numbers(8);
        assert_eq!(b[1], qf(-1, 2));
        assert_eq!(b[2], qf(1, 6));
        assert_eq!(b[4], qf(-1, 30));
        assert_eq!(b[8], qf(-1, 30));
        assert!(b[3].is_zero() && b[5].is_zero());
    }

    #[test]
    fn bernoulli_poly_reflection() {
        let b = bernoulli_numbers(10);
        let x = qf(2, 7);
        for n in 0..10 {
            let lhs = bernoulli_poly(n, &(q(1) - &x), &b);
            let rhs = bernoulli_poly(n, &x, &b) * q(if n % 2 == 0 { 1 } else { -1 });
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn hnf_reps_and_reduce() {
        let h = Hnf::from_generators(2, &[vec![4, 2], vec![0, 6], vec![2, 0]]);
        assert_eq!(h.index(), 4);
        assert_eq!(h.coset_reps().len(), 4);
        assert!(h.contains(&[4, 2]));
        assert!(!h.contains(&[1, 0]));
        assert!(h.contains(&[0, 2]));
    }

    proptest! {
        #[test]
        fn smith_is_a_factorisation(a in -20i128..20, b in -20i128..20, c in -20i128..20, d in -20i128..20) {
            prop_assume!(a * d - b * c != 0);
            let m = vec![vec![a, b], vec![c, d]];
            let (diag, u, v) = smith(&m);
            let prod = mat_mul(&mat_mul(&u, &m), &v);
            prop_assert_eq!(prod, vec![vec![diag[0], 0], vec![0, diag[1]]]);
            prop_assert!(diag[0] > 0 && diag[1] % diag[0] == 0);
            prop_assert_eq!(diag[0] * diag[1], (a * d - b * c).abs());
        }

        #[test]
        fn hnf_reduce_is_canonical(x in -50i128..50, y in -50i128..50, s in -3i128..3, t in -3i128..3) {
            let h = Hnf::from_generators(2, &[vec![3, 1], vec![1, 5]]);
            let base = h.reduce(&[x, y]);
            let shifted = h.reduce(&[x + s * 3 + t, y + s + 5 * t]);
            prop_assert_eq!(base, shifted);
        }
    }
}
