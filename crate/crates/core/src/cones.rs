//! Simplicial cones in the totally positive orthant, the half-open "breve"
//! convention, parallelepiped lattice points and Shintani decompositions.

use crate::arith::{q, Hnf, Q};
use crate::field::{Elem, Field, Ideal};
use crate::torsion::TorsionPoint;
use crate::Error;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cone {
    pub gens: Vec<Elem>,
}

/// A lattice point of a parallelepiped with its cone coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PPoint {
    pub elem: Elem,
    pub x: Vec<Q>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    Cone,
    Parallelepiped,
}

impl Cone {
    pub fn new(gens: Vec<Elem>) -> Cone {
        debug_assert!(gens.iter().all(|a| a.is_totally_positive()));
        Cone { gens }
    }

    pub fn dim(&self) -> usize {
        self.gens.len()
    }

    /// Sign of det(α_j^{τ_i}).
    pub fn orientation(&self) -> i8 {
        orientation(&self.gens)
    }

    /// Coordinates x with u = Σ x_i α_i; None if the generators are dependent.
    pub fn coords(&self, u: &Elem) -> Option<Vec<Q>> {
        match self.gens.len() {
            1 => {
                let a = &self.gens[0];
                if a.a.is_zero() {
                    return None;
                }
                Some(vec![&u.a / &a.a])
            }
            2 => {
                let (a1, b1, a2, b2) = (&self.gens[0].a, &self.gens[0].b, &self.gens[1].a, &self.gens[1].b);
                let det = a1 * b2 - a2 * b1;
                if det.is_zero() {
                    return None;
                }
                Some(vec![(&u.a * b2 - a2 * &u.b) / &det, (a1 * &u.b - &u.a * b1) / &det])
            }
            _ => None,
        }
    }

    pub fn point(&self, x: &[Q]) -> Elem {
        let d = self.gens[0].d;
        x.iter().zip(&self.gens).fold(Elem::int(d, 0), |acc, (t, a)| &acc + &a.scale(t))
    }

    /// Signs of the coordinates of the last standard direction: true when positive.
    pub fn direction_signs(&self) -> Vec<bool> {
        match self.gens.len() {
            1 => vec![self.gens[0].sign_at(0) > 0],
            _ => {
                let s = self.orientation();
                let s1 = -s * self.gens[1].sign_at(0);
                let s2 = s * self.gens[0].sign_at(0);
                vec![s1 > 0, s2 > 0]
            }
        }
    }

    /// Membership in the breve of the cone or of the parallelepiped P = {Σ x_i α_i : 0 ≤ x_i < 1}.
    pub fn breve_member(&self, u: &Elem, region: Region) -> bool {
        if self.orientation() == 0 || !u.is_totally_positive() {
            return false;
        }
        let x = self.coords(u).expect("independent generators");
        let c = self.direction_signs();
        let one = Q::one();
        x.iter().zip(&c).all(|(xi, &ci)| match region {
            Region::Cone => xi.is_positive() || (xi.is_zero() && !ci),
            Region::Parallelepiped => {
                (xi.is_positive() && *xi < one) || (xi.is_zero() && !ci) || (*xi == one && ci)
            }
        })
    }

    fn sublattice(&self, f: &Field, owner: &Ideal) -> Hnf {
        let gens: Vec<Vec<i128>> = self
            .gens
            .iter()
            .map(|a| owner.coords(f, a).expect("cone generator outside the owner"))
            .collect();
        Hnf::from_generators(f.g, &gens)
    }

    /// [𝔞 : ℤα₁ + … + ℤα_g].
    pub fn index(&self, f: &Field, owner: &Ideal) -> i128 {
        self.sublattice(f, owner).index()
    }

    fn lattice_points(&self, f: &Field, owner: &Ideal, breve: bool) -> Vec<PPoint> {
        assert!(self.orientation() != 0, "degenerate generator tuple");
        let c = self.direction_signs();
        let mut out: Vec<PPoint> = self
            .sublattice(f, owner)
            .coset_reps()
            .iter()
            .map(|v| {
                let r = owner.from_coords(f, v);
                let x: Vec<Q> = self
                    .coords(&r)
                    .unwrap()
                    .iter()
                    .zip(&c)
                    .map(|(t, &ci)| if breve && ci { t - t.ceil() + q(1) } else { t - t.floor() })
                    .collect();
                PPoint { elem: self.point(&x), x }
            })
            .collect();
        out.sort_by(|a, b| a.x.cmp(&b.x));
        out
    }

    /// Lattice points of the breve parallelepiped.
    pub fn breve_points(&self, f: &Field, owner: &Ideal) -> Vec<PPoint> {
        self.lattice_points(f, owner, true)
    }

    /// Lattice points of the half-open parallelepiped [0,1)^g; their number is the index.
    pub fn closed_points(&self, f: &Field, owner: &Ideal) -> Vec<PPoint> {
        self.lattice_points(f, owner, false)
    }

    pub fn scaled(&self, x: &Elem) -> Cone {
        Cone { gens: self.gens.iter().map(|a| a * x).collect() }
    }
}

pub fn orientation(gens: &[Elem]) -> i8 {
    match gens.len() {
        1 => gens[0].sign_at(0),
        2 => {
            let x = &gens[0] * &gens[1].conj();
            if x.b.is_positive() {
                1
            } else if x.b.is_negative() {
                -1
            } else {
                0
            }
        }
        _ => 0,
    }
}

/// Cones whose Δ_ξ-translates form a Shintani decomposition: `cones` represent
/// Δ_ξ\Φ where Δ_ξ is generated by ε₊^unfold.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fan {
    pub owner: Ideal,
    pub unfold: usize,
    pub cones: Vec<Cone>,
    pub bisections: usize,
}

/// The two-ray fan of 1 and ε₊ (g = 2) or the positive ray (g = 1).
pub fn shintani_fan(f: &Field, owner: &Ideal) -> Fan {
    seated_fan(f, owner, &f.one())
}

fn seated_fan(f: &Field, owner: &Ideal, x: &Elem) -> Fan {
    let a = owner.primitive_on_ray(f, x);
    let gens = if f.g == 1 { vec![a] } else { vec![a.clone(), &a * &f.eps_plus] };
    Fan { owner: owner.clone(), unfold: 1, cones: vec![Cone::new(gens)], bisections: 0 }
}

impl Fan {
    pub fn generator_unit(&self, f: &Field) -> Elem {
        f.eps_plus.pow(self.unfold as i64)
    }

    /// (n, cone index) with u ∈ (ε₊^unfold)^n · breve(cone).
    pub fn locate(&self, f: &Field, u: &Elem) -> Vec<(i64, usize)> {
        if f.g == 1 {
            return (0..self.cones.len())
                .filter(|&j| self.cones[j].breve_member(u, Region::Cone))
                .map(|j| (0, j))
                .collect();
        }
        let e = self.generator_unit(f);
        let r = (u.emb_f64(0) / u.emb_f64(1)).ln();
        let step = 2.0 * e.emb_f64(0).ln();
        let n0 = (r / step).floor() as i64;
        let mut out = Vec::new();
        for n in n0 - 2..=n0 + 2 {
            let v = u * &e.pow(-n);
            for (j, c) in self.cones.iter().enumerate() {
                if c.breve_member(&v, Region::Cone) {
                    out.push((n, j));
                }
            }
        }
        out
    }
}

fn bisectors() -> impl Iterator<Item = (i64, i64)> {
    // primitive pairs ordered by height, (1,1) first
    (2i64..).flat_map(|s| {
        let mut v: Vec<(i64, i64)> = (1..s).map(|a| (a, s - a)).filter(|&(a, b)| num_integer::gcd(a, b) == 1).collect();
        v.sort_by_key(|&(a, b)| ((a - b).abs(), -a));
        v
    })
}

/// Options for [`refine_for`].
#[derive(Clone, Copy, Debug)]
pub struct RefineOptions {
    /// Extra uniform bisection rounds applied after admissibility is reached.
    pub depth: u32,
    /// Maximum number of candidate rays tried for a single seat or bisection.
    pub max_tries: usize,
}

impl Default for RefineOptions {
    fn default() -> Self {
        RefineOptions { depth: 0, max_tries: 64 }
    }
}

/// A fan for Δ_ξ\Φ_ξ on the owner of ξ whose cone generators α all satisfy the
/// admissibility test of ξ(α) (order not a power of p; ξ(α) ≠ 1 when p is None).
pub fn refine_for(f: &Field, xi: &TorsionPoint, p: Option<u64>, opts: RefineOptions) -> Result<Fan, Error> {
    if let Some(p) = p {
        if crate::arith::is_prime_power_of(xi.order(), p) {
            return Err(Error::Precondition(format!("ξ has order {} which is a power of p = {p}", xi.order())));
        }
    } else if xi.is_trivial() {
        return Err(Error::Precondition("ξ must be nontrivial".into()));
    }
    let owner = &xi.owner;
    let ok = |a: &Elem| xi.admissible_at(f, a, p);
    if f.g == 1 {
        let fan = shintani_fan(f, owner);
        if !ok(&fan.cones[0].gens[0]) {
            return Err(Error::Precondition("ξ is not admissible on the positive ray".into()));
        }
        return Ok(fan);
    }
    let h = xi.stabilizer_index(f);
    // one admissible ray in each sector [ε₊^i, ε₊^{i+1}), closed up by ε₊^h
    let mut rays = Vec::with_capacity(h + 1);
    for i in 0..h {
        let e = f.eps_plus.pow(i as i64);
        let ray = std::iter::once((1, 0))
            .chain(bisectors())
            .take(opts.max_tries)
            .map(|(a, b)| owner.primitive_on_ray(f, &(&e * &(&f.int(a) + &f.eps_plus.scale(&q(b))))))
            .find(|x| ok(x))
            .ok_or_else(|| Error::Config(format!("no admissible ray found in {} tries", opts.max_tries)))?;
        rays.push(ray);
    }
    rays.push(&rays[0] * &f.eps_plus.pow(h as i64));
    let cones = rays.windows(2).map(|w| Cone::new(w.to_vec())).collect();
    let mut fan = Fan { owner: owner.clone(), unfold: h, cones, bisections: 0 };
    for _ in 0..opts.depth {
        let mut cones = Vec::new();
        for c in &fan.cones {
            let (a1, a2) = (&c.gens[0], &c.gens[1]);
            let beta = bisectors()
                .take(opts.max_tries)
                .map(|(s, t)| owner.primitive_on_ray(f, &(&a1.scale(&q(s)) + &a2.scale(&q(t)))))
                .find(|b| ok(b))
                .ok_or_else(|| Error::Config("refinement depth cap exceeded".into()))?;
            cones.push(Cone::new(vec![a1.clone(), beta.clone()]));
            cones.push(Cone::new(vec![beta, a2.clone()]));
            fan.bisections += 1;
        }
        fan.cones = cones;
    }
    if let Some(p) = p {
        let mut cones = Vec::new();
        let before = fan.cones.len();
        for c in std::mem::take(&mut fan.cones) {
            split_to_coprime_index(f, owner, c, p as i128, &ok, opts.max_tries * 4, 16, &mut cones)?;
        }
        fan.bisections += cones.len() - before;
        fan.cones = cones;
    }
    Ok(fan)
}

/// Subdivides `c` until every cone has index in the owner prime to p.
fn split_to_coprime_index(
    f: &Field,
    owner: &Ideal,
    c: Cone,
    p: i128,
    ok: &dyn Fn(&Elem) -> bool,
    tries: usize,
    depth: u32,
    out: &mut Vec<Cone>,
) -> Result<(), Error> {
    if c.index(f, owner) % p != 0 {
        out.push(c);
        return Ok(());
    }
    let (a1, a2) = (&c.gens[0], &c.gens[1]);
    let coprime = |x: &Elem, y: &Elem| Cone::new(vec![x.clone(), y.clone()]).index(f, owner) % p != 0;
    let pick = |need_both: bool| {
        bisectors()
            .take(tries)
            .map(|(s, t)| owner.primitive_on_ray(f, &(&a1.scale(&q(s)) + &a2.scale(&q(t)))))
            .find(|y| {
                let (l, r) = (coprime(a1, y), coprime(y, a2));
                ok(y) && if need_both { l && r } else { l || r }
            })
    };
    if depth == 0 {
        return Err(Error::Config(format!("no subdivision with index prime to {p}")));
    }
    let y = pick(true)
        .or_else(|| pick(false))
        .ok_or_else(|| Error::Config(format!("no subdivision with index prime to {p} in {tries} tries")))?;
    split_to_coprime_index(f, owner, Cone::new(vec![a1.clone(), y.clone()]), p, ok, tries, depth - 1, out)?;
    split_to_coprime_index(f, owner, Cone::new(vec![y, a2.clone()]), p, ok, tries, depth - 1, out)
}

/// Σ_j (-1)^j sgn(α̂_j) 1_{breve σ(α̂_j)}(u) for a tuple of g+1 generators.
pub fn cocycle_characteristic(alphas: &[Elem], u: &Elem) -> i64 {
    (0..alphas.len())
        .map(|j| {
            let rest: Vec<Elem> = alphas.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, a)| a.clone()).collect();
            let s = orientation(&rest) as i64;
            if s == 0 {
                return 0;
            }
            let sign = if j % 2 == 0 { 1 } else { -1 };
            let member = Cone { gens: rest }.breve_member(u, Region::Cone) as i64;
            sign * s * member
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qf;
    use crate::field::{make_field, FieldSpec};
    use proptest::prelude::*;

    fn tp(f: &Field, a: i64, b: i64, d: i64) -> Option<Elem> {
        let x = f.elem(qf(a, d), qf(b, d));
        x.is_totally_positive().then_some(x)
    }

    #[test]
    fn rational_ray() {
        let f = make_field(&FieldSpec::Rational).unwrap();
        let c = Cone::new(vec![f.one()]);
        assert!(!c.breve_member(&f.int(0), Region::Cone));
        assert!(c.breve_member(&f.elem(qf(3, 7), q(0)), Region::Cone));
        let pts = c.breve_points(&f, &Ideal::unit(&f));
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].elem, f.one());
    }

    #[test]
    fn sqrt2_parallelepiped() {
        let f = make_field(&FieldSpec::Quadratic(2)).unwrap();
        let c = Cone::new(vec![f.one(), f.eps_plus.clone()]);
        let u = f.elem(q(2), q(1));
        assert_eq!(c.coords(&u).unwrap(), vec![qf(1, 2), qf(1, 2)]);
        assert!(c.breve_member(&u, Region::Cone));
        let o = Ideal::unit(&f);
        assert_eq!(c.closed_points(&f, &o).len(), 2);
        assert_eq!(c.index(&f, &o), 2);
        let shifted: Vec<Elem> = c.scaled(&f.eps_plus).breve_points(&f, &o).into_iter().map(|p| p.elem).collect();
        for p in c.breve_points(&f, &o) {
            assert!(shifted.contains(&(&p.elem * &f.eps_plus)));
        }
        for p in c.breve_points(&f, &o) {
            assert!(c.breve_member(&p.elem, Region::Parallelepiped));
        }
    }

    #[test]
    fn sqrt3_base_fan_covers_grid() {
        let f = make_field(&FieldSpec::Quadratic(3)).unwrap();
        let fan = shintani_fan(&f, &Ideal::unit(&f));
        assert_eq!(fan.cones[0].gens, vec![f.one(), f.elem(q(2), q(1))]);
        let mut n = 0;
        for a in 1..=20 {
            for b in -10..=10 {
                if let Some(u) = tp(&f, a, b, 2) {
                    assert_eq!(fan.locate(&f, &u).len(), 1, "{u}");
                    n += 1;
                }
            }
        }
        assert!(n >= 100);
    }

    #[test]
    fn dependent_generators_have_empty_breve() {
        let f = make_field(&FieldSpec::Quadratic(5)).unwrap();
        let a = f.elem(q(3), q(1));
        let c = Cone::new(vec![a.clone(), a.scale(&q(2))]);
        assert_eq!(c.orientation(), 0);
        assert!(!c.breve_member(&a, Region::Cone));
    }

    #[test]
    fn refine_rejects_p_power_order() {
        let f = make_field(&FieldSpec::Rational).unwrap();
        let m = Ideal::principal(&f, &f.int(3));
        let xi = crate::torsion::primitive_torsion_points(&f, &Ideal::unit(&f), &m)[0].clone();
        assert!(refine_for(&f, &xi, Some(3), RefineOptions::default()).is_err());
    }

    #[test]
    fn refined_fans_are_admissible_and_cover() {
        let f = make_field(&FieldSpec::Quadratic(5)).unwrap();
        let m = Ideal::principal(&f, &f.int(6));
        let o = Ideal::unit(&f);
        for xi in crate::torsion::primitive_torsion_points(&f, &o, &m).iter().take(6) {
            let fan = refine_for(&f, xi, Some(3), RefineOptions { depth: 2, max_tries: 64 }).unwrap_or_else(|e| panic!("{e} {xi:?} {}", xi.stabilizer_index(&f)));
            for c in &fan.cones {
                assert!(c.gens.iter().all(|a| xi.admissible_at(&f, a, Some(3))));
                assert_ne!(c.index(&f, &o) % 3, 0);
            }
            for a in 1..=8 {
                for b in -6..=6 {
                    if let Some(u) = tp(&f, a, b, 3) {
                        assert_eq!(fan.locate(&f, &u).len(), 1);
                    }
                }
            }
        }
    }

    fn sample(f: &Field) -> impl Strategy<Value = Elem> + '_ {
        (1i64..60, -40i64..40, 1i64..9).prop_filter_map("totally positive", move |(a, b, d)| tp(f, a, b, d))
    }

    proptest! {
        #[test]
        fn cocycle_vanishes(x in (1i64..30, -20i64..20), y in (1i64..30, -20i64..20), z in (1i64..30, -20i64..20), u in (1i64..80, -50i64..50, 1i64..7)) {
            let f = make_field(&FieldSpec::Quadratic(5)).unwrap();
            let mk = |(a, b): (i64, i64)| tp(&f, a, b, 1);
            if let (Some(a0), Some(a1), Some(a2), Some(u)) = (mk(x), mk(y), mk(z), tp(&f, u.0, u.1, u.2)) {
                prop_assert_eq!(cocycle_characteristic(&[a0, a1, a2], &u), 0);
            }
        }

        #[test]
        fn breve_is_scale_invariant(a in (1i64..20, -12i64..12), b in (1i64..20, -12i64..12), u in (1i64..50, -30i64..30, 1i64..5), s in (1i64..10, -6i64..6)) {
            let f = make_field(&FieldSpec::Quadratic(2)).unwrap();
            if let (Some(a), Some(b), Some(u), Some(s)) = (tp(&f, a.0, a.1, 1), tp(&f, b.0, b.1, 1), tp(&f, u.0, u.1, u.2), tp(&f, s.0, s.1, 1)) {
                let c = Cone::new(vec![a, b]);
                prop_assert_eq!(c.breve_member(&u, Region::Cone), c.scaled(&s).breve_member(&(&u * &s), Region::Cone));
            }
        }

        #[test]
        fn orientation_is_alternating(a in (1i64..20, -12i64..12), b in (1i64..20, -12i64..12)) {
            let f = make_field(&FieldSpec::Quadratic(3)).unwrap();
            if let (Some(a), Some(b)) = (tp(&f, a.0, a.1, 1), tp(&f, b.0, b.1, 1)) {
                prop_assert_eq!(orientation(&[a.clone(), b.clone()]), -orientation(&[b, a]));
            }
        }

        #[test]
        fn cover_is_disjoint(u in sample(&make_field(&FieldSpec::Quadratic(2)).unwrap())) {
            let f = make_field(&FieldSpec::Quadratic(2)).unwrap();
            let fan = shintani_fan(&f, &Ideal::unit(&f));
            prop_assert_eq!(fan.locate(&f, &u).len(), 1);
        }
    }
}
