use super::ideal::{coprime, ideals_of_norm};
use super::{Elem, Field, Ideal};
use crate::arith::isqrt_u128;
use crate::Error;
use num_traits::{Signed, ToPrimitive};

/// Some generator of a principal ideal, found by enumerating the lattice
/// points x with x₁² + x₂² <= N(𝔠)·max(4, ε + 1/ε). Every principal ideal
/// has a generator in that ellipse, since multiplying by ε moves |x₁/x₂|
/// into [1/ε, ε).
pub fn principal_generator(f: &Field, c: &Ideal) -> Option<Elem> {
    if f.g == 1 {
        return Some(Elem::rat(0, c.min_rational()));
    }
    let n = c.norm().abs();
    let nf = n.to_f64().unwrap();
    let e1 = f.eps.emb_f64(0);
    let bound = nf * (e1 + 1.0 / e1).max(4.0) * (1.0 + 1e-9) + 1e-9;
    let basis = c.basis(f);
    let v: Vec<[f64; 2]> = basis.iter().map(|b| [b.emb_f64(0), b.emb_f64(1)]).collect();
    let g11 = v[0][0] * v[0][0] + v[0][1] * v[0][1];
    let g12 = v[0][0] * v[1][0] + v[0][1] * v[1][1];
    let g22 = v[1][0] * v[1][0] + v[1][1] * v[1][1];
    let det = g11 * g22 - g12 * g12;
    let n2max = ((bound * g11 / det).sqrt() + 1.0).floor() as i64;
    for n2 in -n2max..=n2max {
        let rest = bound - (n2 as f64).powi(2) * det / g11;
        if rest < -1e-6 * bound {
            continue;
        }
        let center = -(n2 as f64) * g12 / g11;
        let rad = (rest.max(0.0) / g11).sqrt() + 1.0;
        let lo = (center - rad).floor() as i64;
        let hi = (center + rad).ceil() as i64;
        for n1 in lo..=hi {
            if n1 == 0 && n2 == 0 {
                continue;
            }
            let x = c.from_coords(f, &[n1 as i128, n2 as i128]);
            if x.norm().abs() == n {
                return Some(x);
            }
        }
    }
    None
}

/// Totally positive generator, normalised so that 1 <= x₁/x₂ < ε₊₁/ε₊₂.
pub fn narrow_generator(f: &Field, c: &Ideal) -> Option<Elem> {
    let x = principal_generator(f, c)?;
    if f.g == 1 {
        return Some(x);
    }
    let cands = [x.clone(), -&x, &x * &f.eps, -&(&x * &f.eps)];
    let mut y = cands.into_iter().find(|y| y.is_totally_positive())?;
    let ep_inv = f.eps_plus.inv();
    while y.b.is_negative() {
        y = &y * &f.eps_plus;
    }
    while !(&y * &ep_inv).b.is_negative() {
        y = &y * &ep_inv;
    }
    Some(y)
}

/// Narrow class group with representatives; `reps[0]` is the unit ideal.
#[derive(Clone, Debug)]
pub struct NarrowClassGroup {
    pub reps: Vec<Ideal>,
    /// reps[i]·reps[j] = x·reps[k] with x totally positive.
    pub mult: Vec<Vec<(usize, Elem)>>,
}

impl NarrowClassGroup {
    pub fn new(f: &Field) -> Result<NarrowClassGroup, Error> {
        Self::with_coprime(f, &Ideal::unit(f))
    }

    /// Representatives chosen integral and coprime to `m`.
    pub fn with_coprime(f: &Field, m: &Ideal) -> Result<NarrowClassGroup, Error> {
        let unit = Ideal::unit(f);
        let mut reps = vec![unit.clone()];
        if f.g == 2 {
            let target = class_number_narrow(f)?;
            let cap = 64 * (f.discriminant() as u64) * crate::field::ideal::abs_norm_u64(&m.add(f, &unit)).max(1) + 1000;
            let mut n = 2u64;
            while reps.len() < target {
                if n > cap {
                    return Err(Error::Precondition("narrow class representative search exhausted".into()));
                }
                for a in ideals_of_norm(f, n) {
                    if !coprime(f, &a, m) {
                        continue;
                    }
                    if reps.iter().all(|r| narrow_generator(f, &a.div(f, r)).is_none()) {
                        reps.push(a);
                    }
                }
                n += 1;
            }
        }
        let mut g = NarrowClassGroup { reps, mult: vec![] };
        let h = g.reps.len();
        let mut mult = vec![vec![]; h];
        for i in 0..h {
            for j in 0..h {
                let p = g.reps[i].mul(f, &g.reps[j]);
                mult[i].push(g.class_of(f, &p));
            }
        }
        g.mult = mult;
        Ok(g)
    }

    pub fn order(&self) -> usize {
        self.reps.len()
    }

    /// (k, x) with 𝔟 = x·reps[k], x totally positive.
    pub fn class_of(&self, f: &Field, b: &Ideal) -> (usize, Elem) {
        for (k, r) in self.reps.iter().enumerate() {
            if let Some(x) = narrow_generator(f, &b.div(f, r)) {
                return (k, x);
            }
        }
        panic!("ideal {b} is in no known narrow class");
    }
}

/// Narrow class number from a Minkowski-bounded search of ordinary classes.
fn class_number_narrow(f: &Field) -> Result<usize, Error> {
    let mb = isqrt_u128(f.discriminant() as u128 / 4) as u64 + 1;
    let mut reps: Vec<Ideal> = vec![Ideal::unit(f)];
    for n in 2..=mb {
        for a in ideals_of_norm(f, n) {
            if reps.iter().all(|r| principal_generator(f, &a.div(f, r)).is_none()) {
                reps.push(a);
            }
        }
    }
    let h = reps.len();
    Ok(if f.norm_eps == -1 { h } else { 2 * h })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q;
    use crate::field::{make_field, FieldSpec};

    #[test]
    fn narrow_class_numbers() {
        // Q(√3): h = 1, N(ε) = +1 so h⁺ = 2; Q(√5), Q(√2): h⁺ = 1; Q(√10): h = 2, N(ε) = -1
        for (d, h) in [(3u64, 2usize), (5, 1), (2, 1), (6, 2), (10, 2), (15, 4), (7, 2)] {
            let f = make_field(&FieldSpec::Quadratic(d)).unwrap();
            assert_eq!(NarrowClassGroup::new(&f).unwrap().order(), h, "D = {d}");
        }
    }

    #[test]
    fn generator_search_finds_balanced_generators() {
        let f = make_field(&FieldSpec::Quadratic(3)).unwrap();
        let x = f.elem(q(7), q(4)).pow(3);
        let a = Ideal::principal(&f, &(&x * &f.int(5)));
        let g = narrow_generator(&f, &a).unwrap();
        assert!(g.is_totally_positive());
        assert_eq!(Ideal::principal(&f, &g), a);
        let two = Ideal::from_gens(&f, &[f.int(2), f.elem(q(1), q(1))]);
        assert!(narrow_generator(&f, &two).is_none());
        assert!(principal_generator(&f, &two).is_some());
    }

    #[test]
    fn coprime_representatives() {
        let f = make_field(&FieldSpec::Quadratic(3)).unwrap();
        let m = Ideal::principal(&f, &f.int(10));
        let g = NarrowClassGroup::with_coprime(&f, &m).unwrap();
        assert_eq!(g.order(), 2);
        assert!(coprime(&f, &g.reps[1], &m));
    }
}
