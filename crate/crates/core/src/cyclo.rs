//! Exact arithmetic in Q(ζ_n) and in the compositum Q(ζ_n, √D).

use crate::arith::{euler_phi, lcm_u64, Q};
use dashmap::DashMap;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::{Arc, OnceLock};

/// Reduction data for Q(ζ_n): x^j mod Φ_n for 0 <= j < n.
struct CycloTables {
    phi: usize,
    powers: Vec<Vec<i64>>,
}

fn tables(n: u64) -> Arc<CycloTables> {
    static CACHE: OnceLock<DashMap<u64, Arc<CycloTables>>> = OnceLock::new();
    let cache = CACHE.get_or_init(DashMap::new);
    if let Some(t) = cache.get(&n) {
        return t.clone();
    }
    let phi_poly = cyclotomic_poly(n);
    let phi = phi_poly.len() - 1;
    let mut powers = Vec::with_capacity(n as usize);
    let mut cur = vec![0i64; phi];
    if phi > 0 {
        cur[0] = 1;
    }
    for _ in 0..n {
        powers.push(cur.clone());
        // multiply by x and reduce with the monic Φ_n
        let top = cur[phi - 1];
        for i in (1..phi).rev() {
            cur[i] = cur[i - 1] - top * phi_poly[i];
        }
        cur[0] = -top * phi_poly[0];
    }
    let t = Arc::new(CycloTables { phi, powers });
    cache.insert(n, t.clone());
    t
}

/// Integer coefficients of Φ_n, constant term first.
pub fn cyclotomic_poly(n: u64) -> Vec<i64> {
    static MEMO: OnceLock<DashMap<u64, Vec<i64>>> = OnceLock::new();
    let memo = MEMO.get_or_init(DashMap::new);
    if let Some(p) = memo.get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by Φ_d for every proper divisor d
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n % d == 0 {
            let den = cyclotomic_poly(d);
            num = poly_div_exact(&num, &den);
        }
    }
    memo.insert(n, num.clone());
    num
}

fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut r = num.to_vec();
    let dn = den.len() - 1;
    let qn = r.len() - 1 - dn;
    let mut qt = vec![0i64; qn + 1];
    for i in (0..=qn).rev() {
        let c = r[i + dn];
        qt[i] = c;
        for j in 0..=dn {
            r[i + j] -= c * den[j];
        }
    }
    qt
}

/// Element of Q(ζ_n) as (Σ num_i ζ_n^i) / den in the power basis, i < φ(n).
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(into = "ExactTriple", try_from = "ExactTriple")]
pub struct CycloNum {
    pub n: u64,
    pub num: Vec<BigInt>,
    pub den: BigInt,
}

/// Wire form: conductor, power-basis numerators and common denominator, in decimal.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExactTriple {
    pub conductor: u64,
    pub numerators: Vec<String>,
    pub denominator: String,
}

impl From<CycloNum> for ExactTriple {
    fn from(x: CycloNum) -> ExactTriple {
        ExactTriple {
            conductor: x.n,
            numerators: x.num.iter().map(|c| c.to_string()).collect(),
            denominator: x.den.to_string(),
        }
    }
}

impl TryFrom<ExactTriple> for CycloNum {
    type Error = String;
    fn try_from(t: ExactTriple) -> Result<CycloNum, String> {
        let parse = |s: &String| s.parse::<BigInt>().map_err(|e| format!("bad integer {s:?}: {e}"));
        let num = t.numerators.iter().map(parse).collect::<Result<Vec<_>, _>>()?;
        if t.conductor == 0 || num.len() != euler_phi(t.conductor) as usize {
            return Err(format!("{} numerators do not match conductor {}", num.len(), t.conductor));
        }
        let den = parse(&t.denominator)?;
        if den.is_zero() {
            return Err("zero denominator".into());
        }
        Ok(CycloNum { n: t.conductor, num, den }.normalized())
    }
}

impl CycloNum {
    pub fn zero(n: u64) -> CycloNum {
        let phi = euler_phi(n) as usize;
        CycloNum { n, num: vec![BigInt::zero(); phi], den: BigInt::one() }
    }

    pub fn from_q(n: u64, x: &Q) -> CycloNum {
        let mut c = CycloNum::zero(n);
        c.num[0] = x.numer().clone();
        c.den = x.denom().clone();
        c.normalized()
    }

    pub fn one(n: u64) -> CycloNum {
        CycloNum::from_q(n, &Q::one())
    }

    /// ζ_n^e.
    pub fn root(n: u64, e: i64) -> CycloNum {
        let t = tables(n);
        let j = e.rem_euclid(n as i64) as usize;
        CycloNum { n, num: t.powers[j].iter().map(|&x| BigInt::from(x)).collect(), den: BigInt::one() }
    }

    /// Σ_j sums[j]·ζ_n^j / den for an exponent-indexed vector (length n).
    pub fn from_exponent_sums(n: u64, sums: &[BigInt], den: BigInt) -> CycloNum {
        let t = tables(n);
        let mut num = vec![BigInt::zero(); t.phi];
        for (j, s) in sums.iter().enumerate() {
            if s.is_zero() {
                continue;
            }
            for (i, &c) in t.powers[j % n as usize].iter().enumerate() {
                if c != 0 {
                    num[i] += s * c;
                }
            }
        }
        CycloNum { n, num, den }.normalized()
    }

    fn normalized(mut self) -> CycloNum {
        if self.den.is_negative() {
            self.den = -self.den;
            self.num.iter_mut().for_each(|x| *x = -&*x);
        }
        let mut g = self.den.clone();
        for x in &self.num {
            if g.is_one() {
                break;
            }
            g = g.gcd(x);
        }
        if self.num.iter().all(|x| x.is_zero()) {
            self.den = BigInt::one();
            return self;
        }
        if !g.is_one() {
            self.num.iter_mut().for_each(|x| *x = &*x / &g);
            self.den = &self.den / &g;
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|x| x.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.num.iter().skip(1).all(|x| x.is_zero())
    }

    pub fn to_rational(&self) -> Option<Q> {
        self.is_rational().then(|| Q::new(self.num[0].clone(), self.den.clone()))
    }

    /// Re-express in Q(ζ_m) for a multiple m of n.
    pub fn lift(&self, m: u64) -> CycloNum {
        if m == self.n {
            return self.clone();
        }
        assert!(m % self.n == 0, "conductor {} does not divide {}", self.n, m);
        let step = m / self.n;
        let mut sums = vec![BigInt::zero(); m as usize];
        for (i, c) in self.num.iter().enumerate() {
            sums[(i as u64 * step) as usize] = c.clone();
        }
        CycloNum::from_exponent_sums(m, &sums, self.den.clone())
    }

    fn common(a: &CycloNum, b: &CycloNum) -> (CycloNum, CycloNum) {
        if a.n == b.n {
            return (a.clone(), b.clone());
        }
        let m = lcm_u64(a.n, b.n);
        (a.lift(m), b.lift(m))
    }

    pub fn add(&self, o: &CycloNum) -> CycloNum {
        if self.n != o.n {
            let (a, b) = CycloNum::common(self, o);
            return a.add(&b);
        }
        if self.den == o.den {
            let num = self.num.iter().zip(&o.num).map(|(x, y)| x + y).collect();
            return CycloNum { n: self.n, num, den: self.den.clone() }.normalized();
        }
        let num = self.num.iter().zip(&o.num).map(|(x, y)| x * &o.den + y * &self.den).collect();
        CycloNum { n: self.n, num, den: &self.den * &o.den }.normalized()
    }

    pub fn neg(&self) -> CycloNum {
        CycloNum { n: self.n, num: self.num.iter().map(|x| -x).collect(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &CycloNum) -> CycloNum {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &CycloNum) -> CycloNum {
        if self.n != o.n {
            let (a, b) = CycloNum::common(self, o);
            return a.mul(&b);
        }
        let n = self.n as usize;
        let mut sums = vec![BigInt::zero(); n];
        for (i, x) in self.num.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in o.num.iter().enumerate() {
                if !y.is_zero() {
                    sums[(i + j) % n] += x * y;
                }
            }
        }
        CycloNum::from_exponent_sums(self.n, &sums, &self.den * &o.den)
    }

    pub fn scale(&self, c: &Q) -> CycloNum {
        CycloNum {
            n: self.n,
            num: self.num.iter().map(|x| x * c.numer()).collect(),
            den: &self.den * c.denom(),
        }
        .normalized()
    }

    pub fn scale_int(&self, c: &BigInt) -> CycloNum {
        CycloNum { n: self.n, num: self.num.iter().map(|x| x * c).collect(), den: self.den.clone() }.normalized()
    }

    /// Image under ζ ↦ ζ^a (gcd(a, n) = 1).
    pub fn galois(&self, a: u64) -> CycloNum {
        let n = self.n;
        let mut sums = vec![BigInt::zero(); n as usize];
        for (i, c) in self.num.iter().enumerate() {
            sums[((i as u64 * a) % n) as usize] += c;
        }
        CycloNum::from_exponent_sums(n, &sums, self.den.clone())
    }

    pub fn conj(&self) -> CycloNum {
        self.galois(self.n - 1)
    }

    pub fn inv(&self) -> CycloNum {
        assert!(!self.is_zero(), "inverse of zero");
        if self.is_rational() {
            return CycloNum::from_q(self.n, &Q::new(self.den.clone(), self.num[0].clone()));
        }
        let mut prod = CycloNum::one(self.n);
        for a in 2..self.n {
            if a.gcd(&self.n) == 1 {
                prod = prod.mul(&self.galois(a));
            }
        }
        let norm = prod.mul(self).to_rational().expect("norm must be rational");
        prod.scale(&norm.recip())
    }

    /// 1/(1 - ζ_n^e) for ζ_n^e ≠ 1, via 1/(1-ζ) = -(1/m)·Σ_{j<m} j·ζ^j (ζ of order m).
    pub fn inv_one_minus_root(n: u64, e: i64) -> CycloNum {
        let e = e.rem_euclid(n as i64) as u64;
        assert!(e != 0, "1 - ζ^e vanishes");
        let m = n / e.gcd(&n);
        let mut sums = vec![BigInt::zero(); n as usize];
        for j in 1..m {
            sums[((j * e) % n) as usize] -= BigInt::from(j);
        }
        CycloNum::from_exponent_sums(n, &sums, BigInt::from(m))
    }

    pub fn pow(&self, e: u64) -> CycloNum {
        let mut r = CycloNum::one(self.n);
        let mut b = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        r
    }

    /// Average over Gal(Q(ζ_n)/Q(ζ_m)) followed by re-expression in Q(ζ_m);
    /// None if the element does not lie in Q(ζ_m).
    pub fn descend(&self, m: u64) -> Option<CycloNum> {
        if m == self.n {
            return Some(self.clone());
        }
        if self.n % m != 0 {
            let big = lcm_u64(self.n, m);
            return self.lift(big).descend(m);
        }
        if self.is_rational() {
            return Some(CycloNum::from_q(m, &self.to_rational().unwrap()));
        }
        // the image of Q(ζ_m) is spanned by lifts of ζ_m^i; solve by elimination
        let phi_m = euler_phi(m) as usize;
        let basis: Vec<CycloNum> = (0..phi_m).map(|i| CycloNum::root(m, i as i64).lift(self.n)).collect();
        let cols = self.num.len();
        let mut rows: Vec<Vec<Q>> = (0..cols)
            .map(|r| {
                let mut row: Vec<Q> = basis.iter().map(|b| Q::from_integer(b.num[r].clone())).collect();
                row.push(Q::new(self.num[r].clone(), self.den.clone()));
                row
            })
            .collect();
        let mut piv_row = 0;
        let mut pivots = Vec::new();
        for c in 0..phi_m {
            let Some(r) = (piv_row..cols).find(|&r| !rows[r][c].is_zero()) else { continue };
            rows.swap(piv_row, r);
            let inv = rows[piv_row][c].recip();
            for x in rows[piv_row].iter_mut() {
                *x = &*x * &inv;
            }
            for r2 in 0..cols {
                if r2 != piv_row && !rows[r2][c].is_zero() {
                    let fct = rows[r2][c].clone();
                    let src = rows[piv_row].clone();
                    for (x, s) in rows[r2].iter_mut().zip(&src) {
                        *x = &*x - &fct * s;
                    }
                }
            }
            pivots.push(c);
            piv_row += 1;
        }
        if rows[piv_row..].iter().any(|r| !r[phi_m].is_zero()) {
            return None;
        }
        let mut coeffs = vec![Q::zero(); phi_m];
        for (i, &c) in pivots.iter().enumerate() {
            coeffs[c] = rows[i][phi_m].clone();
        }
        let mut out = CycloNum::zero(m);
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                out = out.add(&CycloNum::root(m, i as i64).scale(c));
            }
        }
        Some(out)
    }

    /// Smallest conductor m | n with the element in Q(ζ_m).
    pub fn minimal_conductor(&self) -> u64 {
        let mut best = self.n;
        for m in 1..self.n {
            if self.n % m == 0 && m < best && self.descend(m).is_some() {
                best = m;
            }
        }
        best
    }

    pub fn equals(&self, o: &CycloNum) -> bool {
        self.sub(o).is_zero()
    }
}

impl PartialEq for CycloNum {
    fn eq(&self, o: &CycloNum) -> bool {
        self.equals(o)
    }
}

impl Eq for CycloNum {}

impl fmt::Display for CycloNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.to_rational() {
            return write!(f, "{r}");
        }
        let terms: Vec<String> = self
            .num
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("{c}·ζ{}^{i}", self.n))
            .collect();
        write!(f, "({})/{}", terms.join(" + "), self.den)
    }
}

/// Element u + v·√D of Q(ζ_n, √D) with √D kept formal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompositumNum {
    pub d: u64,
    pub u: CycloNum,
    pub v: CycloNum,
}

impl CompositumNum {
    pub fn from_cyclo(d: u64, u: CycloNum) -> CompositumNum {
        let v = CycloNum::zero(u.n);
        CompositumNum { d, u, v }
    }

    pub fn zero(d: u64, n: u64) -> CompositumNum {
        CompositumNum::from_cyclo(d, CycloNum::zero(n))
    }

    pub fn from_quadratic(d: u64, n: u64, a: &Q, b: &Q) -> CompositumNum {
        CompositumNum { d, u: CycloNum::from_q(n, a), v: CycloNum::from_q(n, b) }
    }

    pub fn add(&self, o: &CompositumNum) -> CompositumNum {
        CompositumNum { d: self.d, u: self.u.add(&o.u), v: self.v.add(&o.v) }
    }

    pub fn sub(&self, o: &CompositumNum) -> CompositumNum {
        CompositumNum { d: self.d, u: self.u.sub(&o.u), v: self.v.sub(&o.v) }
    }

    pub fn mul(&self, o: &CompositumNum) -> CompositumNum {
        let dq = Q::from_integer(BigInt::from(self.d));
        let uu = self.u.mul(&o.u).add(&self.v.mul(&o.v).scale(&dq));
        let vv = self.u.mul(&o.v).add(&self.v.mul(&o.u));
        CompositumNum { d: self.d, u: uu, v: vv }
    }

    pub fn scale_cyclo(&self, c: &CycloNum) -> CompositumNum {
        CompositumNum { d: self.d, u: self.u.mul(c), v: self.v.mul(c) }
    }

    pub fn scale(&self, c: &Q) -> CompositumNum {
        CompositumNum { d: self.d, u: self.u.scale(c), v: self.v.scale(c) }
    }

    /// Inverse through the formal conjugate: (u - v√D)/(u² - D v²).
    pub fn inv(&self) -> CompositumNum {
        let dq = Q::from_integer(BigInt::from(self.d));
        let n = self.u.mul(&self.u).sub(&self.v.mul(&self.v).scale(&dq));
        let ni = n.inv();
        CompositumNum { d: self.d, u: self.u.mul(&ni), v: self.v.neg().mul(&ni) }
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    /// The value when the √D part vanishes.
    pub fn to_cyclo(&self) -> Option<CycloNum> {
        self.v.is_zero().then(|| self.u.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{q, qf};
    use proptest::prelude::*;

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(cyclotomic_poly(3), vec![1, 1, 1]);
        assert_eq!(cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(cyclotomic_poly(15), vec![1, -1, 0, 1, -1, 1, 0, -1, 1]);
    }

    #[test]
    fn root_sums_vanish() {
        for n in [3u64, 4, 5, 12, 15] {
            let mut s = CycloNum::zero(n);
            for e in 0..n as i64 {
                s = s.add(&CycloNum::root(n, e));
            }
            assert!(s.is_zero(), "n = {n}");
        }
    }

    #[test]
    fn descend_and_lift() {
        let x = CycloNum::root(3, 1).add(&CycloNum::from_q(3, &qf(2, 5)));
        let y = x.lift(15);
        assert_eq!(y.descend(3).unwrap(), x);
        assert!(CycloNum::root(15, 1).descend(3).is_none());
        assert_eq!(y.minimal_conductor(), 3);
    }

    #[test]
    fn sqrt_three_lives_in_twelfth_roots() {
        // ζ12 + ζ12^{-1} = √3
        let s = CycloNum::root(12, 1).add(&CycloNum::root(12, -1));
        assert_eq!(s.mul(&s), CycloNum::from_q(12, &q(3)));
    }

    proptest! {
        #[test]
        fn field_axioms(a in proptest::collection::vec(-5i64..5, 8), b in proptest::collection::vec(-5i64..5, 8)) {
            let n = 15u64;
            let mk = |v: &Vec<i64>| CycloNum { n, num: v.iter().map(|&x| BigInt::from(x)).collect(), den: BigInt::one() };
            let x = mk(&a);
            let y = mk(&b);
            prop_assert_eq!(x.mul(&y), y.mul(&x));
            if !x.is_zero() {
                prop_assert_eq!(x.mul(&x.inv()), CycloNum::one(n));
            }
            let z = x.add(&y).mul(&x);
            prop_assert_eq!(z, x.mul(&x).add(&x.mul(&y)));
        }

        #[test]
        fn one_minus_root_inverse(e in 1i64..12) {
            let n = 12u64;
            let w = CycloNum::one(n).sub(&CycloNum::root(n, e));
            prop_assert_eq!(w.mul(&CycloNum::inv_one_minus_root(n, e)), CycloNum::one(n));
        }
    }
}
