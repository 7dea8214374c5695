//! Base fields: Q and real quadratic fields Q(√D), their ideals, narrow
//! class groups and narrow ray class groups.

mod elem;
mod ideal;
mod narrow;
mod ray;

pub use elem::Elem;
pub use ideal::{abs_norm_u64, coprime, factor_ideal, ideals_of_norm, primes_above, Ideal};
pub use narrow::{narrow_generator, principal_generator, NarrowClassGroup};
pub use ray::{CharTable, RayClass, RayClassGroup};

use crate::arith::{is_square_u128, is_squarefree, q, qf, Q};
use crate::Error;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldSpec {
    Rational,
    Quadratic(u64),
}

impl FieldSpec {
    pub fn parse(s: &str) -> Result<FieldSpec, Error> {
        let t = s.trim().trim_matches('"');
        if t.eq_ignore_ascii_case("rational") || t.eq_ignore_ascii_case("q") || t == "1" {
            return Ok(FieldSpec::Rational);
        }
        t.parse::<u64>()
            .map(FieldSpec::Quadratic)
            .map_err(|_| Error::Config(format!("field must be \"rational\" or a squarefree integer D > 1, got {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Field {
    /// 0 for Q, otherwise the squarefree D with F = Q(√D).
    pub d: u64,
    pub g: usize,
    /// Fundamental unit > 1 (for Q the trivial unit 1).
    pub eps: Elem,
    /// Generator of the totally positive units.
    pub eps_plus: Elem,
    pub norm_eps: i8,
}

pub fn make_field(spec: &FieldSpec) -> Result<Field, Error> {
    match *spec {
        FieldSpec::Rational => Ok(Field {
            d: 0,
            g: 1,
            eps: Elem::int(0, 1),
            eps_plus: Elem::int(0, 1),
            norm_eps: 1,
        }),
        FieldSpec::Quadratic(d) => {
            if d < 2 || !is_squarefree(d) {
                return Err(Error::Precondition(format!("D = {d} must be a squarefree integer > 1")));
            }
            let (eps, norm_eps) = fundamental_unit(d);
            let eps_plus = if norm_eps == 1 { eps.clone() } else { &eps * &eps };
            Ok(Field { d, g: 2, eps, eps_plus, norm_eps })
        }
    }
}

/// Smallest unit > 1 found by an exhaustive Pell search over y.
fn fundamental_unit(d: u64) -> (Elem, i8) {
    let one_mod4 = d % 4 == 1;
    let c: u128 = if one_mod4 { 4 } else { 1 };
    let dd = d as u128;
    let mut y: u128 = 1;
    loop {
        let base = dd * y * y;
        for (sgn, target) in [(-1i8, base.checked_sub(c)), (1, Some(base + c))] {
            if let Some(t) = target {
                if t == 0 {
                    continue;
                }
                if let Some(x) = is_square_u128(t) {
                    let (a, b) = if one_mod4 {
                        (qf(x as i64, 2), qf(y as i64, 2))
                    } else {
                        (q(x as i64), q(y as i64))
                    };
                    return (Elem::new(d, a, b), sgn);
                }
            }
        }
        y += 1;
    }
}

impl Field {
    pub fn is_rational(&self) -> bool {
        self.d == 0
    }

    pub fn one(&self) -> Elem {
        Elem::int(self.d, 1)
    }

    pub fn int(&self, n: i64) -> Elem {
        Elem::int(self.d, n)
    }

    pub fn elem(&self, a: Q, b: Q) -> Elem {
        Elem::new(self.d, a, b)
    }

    fn one_mod4(&self) -> bool {
        self.d % 4 == 1
    }

    /// The second element of the integral basis (1, ω).
    pub fn omega(&self) -> Elem {
        if self.one_mod4() {
            self.elem(qf(1, 2), qf(1, 2))
        } else {
            self.elem(Q::zero(), Q::one())
        }
    }

    /// Minimal polynomial x² + c1·x + c0 of ω as (c1, c0).
    pub fn omega_minpoly(&self) -> (i64, i64) {
        if self.one_mod4() {
            (-1, -((self.d as i64 - 1) / 4))
        } else {
            (0, -(self.d as i64))
        }
    }

    pub fn discriminant(&self) -> i64 {
        match self.d {
            0 => 1,
            d if d % 4 == 1 => d as i64,
            d => 4 * d as i64,
        }
    }

    /// Coordinates of x in the basis (1, ω) (just (x) for Q).
    pub fn coords(&self, x: &Elem) -> Vec<Q> {
        if self.g == 1 {
            return vec![x.a.clone()];
        }
        if self.one_mod4() {
            let x1 = &x.b * q(2);
            vec![&x.a - &x.b, x1]
        } else {
            vec![x.a.clone(), x.b.clone()]
        }
    }

    pub fn from_coords(&self, c: &[Q]) -> Elem {
        if self.g == 1 {
            return Elem::rat(0, c[0].clone());
        }
        let w = self.omega();
        &self.elem(c[0].clone(), Q::zero()) + &w.scale(&c[1])
    }

    pub fn is_integral(&self, x: &Elem) -> bool {
        self.coords(x).iter().all(|c| c.is_integer())
    }

    pub fn embeddings(&self) -> usize {
        self.g
    }

    /// Whether p divides the discriminant.
    pub fn is_ramified(&self, p: u64) -> bool {
        self.g == 2 && self.discriminant() % p as i64 == 0
    }

    /// Residue degree of the primes above an unramified p.
    pub fn inertia_degree(&self, p: u64) -> u32 {
        if self.g == 1 {
            return 1;
        }
        let (c1, c0) = self.omega_minpoly();
        let has_root = (0..p as i64).any(|r| (r * r + c1 * r + c0).rem_euclid(p as i64) == 0);
        if has_root {
            1
        } else {
            2
        }
    }

    pub fn is_totally_positive(&self, x: &Elem) -> bool {
        x.is_totally_positive()
    }

    pub fn describe(&self) -> String {
        if self.is_rational() {
            "Q".to_string()
        } else {
            format!("Q(√{})", self.d)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_by_continued_fraction(d: u64) -> (i128, i128) {
        // convergents of √d until x² - d y² = ±1, an independent route for D ≢ 1 mod 4
        let a0 = (d as f64).sqrt() as i128;
        let (mut m, mut den, mut a) = (0i128, 1i128, a0);
        let (mut p0, mut p1) = (1i128, a0);
        let (mut q0, mut q1) = (0i128, 1i128);
        loop {
            if (p1 * p1 - d as i128 * q1 * q1).abs() == 1 {
                return (p1, q1);
            }
            m = den * a - m;
            den = (d as i128 - m * m) / den;
            a = (a0 + m) / den;
            (p0, p1) = (p1, a * p1 + p0);
            (q0, q1) = (q1, a * q1 + q0);
        }
    }

    #[test]
    fn units_of_small_fields() {
        let f = make_field(&FieldSpec::Quadratic(3)).unwrap();
        assert_eq!(f.eps_plus.to_string(), "2+√3");
        let f = make_field(&FieldSpec::Quadratic(5)).unwrap();
        assert_eq!(f.eps.to_string(), "1/2+1/2√5");
        assert_eq!(f.norm_eps, -1);
        assert_eq!(f.eps_plus.to_string(), "3/2+1/2√5");
        let f = make_field(&FieldSpec::Quadratic(2)).unwrap();
        assert_eq!(f.eps_plus.to_string(), "3+2√2");
    }

    #[test]
    fn pell_search_agrees_with_continued_fractions() {
        for d in [2u64, 3, 6, 7, 10, 11, 14, 15, 19, 22, 23, 31, 43, 46] {
            let f = make_field(&FieldSpec::Quadratic(d)).unwrap();
            let (x, y) = unit_by_continued_fraction(d);
            assert_eq!(f.eps, f.elem(q(x as i64), q(y as i64)), "D = {d}");
        }
    }

    #[test]
    fn rejects_non_squarefree() {
        assert!(make_field(&FieldSpec::Quadratic(12)).is_err());
        assert!(make_field(&FieldSpec::Quadratic(1)).is_err());
    }

    #[test]
    fn coords_round_trip() {
        for d in [3u64, 5] {
            let f = make_field(&FieldSpec::Quadratic(d)).unwrap();
            let x = f.elem(qf(7, 2), qf(3, 2));
            assert_eq!(f.from_coords(&f.coords(&x)), x);
        }
    }
}
