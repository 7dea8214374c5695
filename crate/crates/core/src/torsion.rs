//! Torsion points of the algebraic torus attached to an ideal: additive
//! characters of 𝔞/𝔤𝔞, their unit and ideal actions, Hecke characters of
//! the narrow ray class group and their finite Fourier coefficients.

use crate::arith::{is_prime_power_of, smith};
use crate::cyclo::CycloNum;
use crate::field::{factor_ideal, Elem, Field, Ideal, RayClassGroup};
use crate::Error;
use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

/// Character ξ: 𝔞 → μ_n, ξ(Σ m_i γ_i) = ζ_n^{Σ m_i e_i} for the HNF basis γ of the owner 𝔞.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorsionPoint {
    pub owner: Ideal,
    pub modulus: Ideal,
    pub n: u64,
    pub exps: Vec<u64>,
}

impl TorsionPoint {
    /// Exponent e with ξ(x) = ζ_n^e; panics if x is outside the owner.
    pub fn eval_exp(&self, f: &Field, x: &Elem) -> u64 {
        let m = self.owner.coords(f, x).expect("argument outside the owner ideal");
        self.eval_coords(&m)
    }

    pub fn eval_coords(&self, m: &[i128]) -> u64 {
        let n = self.n as i128;
        let s: i128 = m.iter().zip(&self.exps).map(|(&a, &e)| (a.rem_euclid(n)) * e as i128).sum();
        s.rem_euclid(n) as u64
    }

    pub fn eval(&self, f: &Field, x: &Elem) -> CycloNum {
        CycloNum::root(self.n, self.eval_exp(f, x) as i64)
    }

    pub fn order(&self) -> u64 {
        let g = self.exps.iter().fold(self.n, |acc, &e| acc.gcd(&e));
        self.n / g
    }

    pub fn is_trivial(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    fn with_owner(&self, f: &Field, owner: Ideal, value_exp: impl Fn(&Elem) -> u64) -> TorsionPoint {
        let exps = owner.basis(f).iter().map(value_exp).collect();
        TorsionPoint { owner, modulus: self.modulus.clone(), n: self.n, exps }
    }

    /// ξ^x on x⁻¹𝔞: α ↦ ξ(xα).
    pub fn act_elem(&self, f: &Field, x: &Elem) -> TorsionPoint {
        let owner = self.owner.scale(f, &x.inv());
        self.with_owner(f, owner, |b| self.eval_exp(f, &(x * b)))
    }

    /// Restriction to 𝔞𝔟 for an integral ideal 𝔟.
    pub fn restrict(&self, f: &Field, b: &Ideal) -> TorsionPoint {
        let owner = self.owner.mul(f, b);
        self.with_owner(f, owner, |x| self.eval_exp(f, x))
    }

    /// Product of two characters on the same owner.
    pub fn times(&self, f: &Field, o: &TorsionPoint) -> TorsionPoint {
        assert_eq!(self.owner, o.owner);
        let n = self.n.lcm(&o.n);
        let modulus = self.modulus.mul(f, &o.modulus);
        let (s1, s2) = (n / self.n, n / o.n);
        let exps = self.exps.iter().zip(&o.exps).map(|(&a, &b)| (a * s1 + b * s2) % n).collect();
        TorsionPoint { owner: self.owner.clone(), modulus, n, exps }
    }

    /// Δ-orbit {ξ^{ε₊^i}}; its length h gives the stabiliser Δ_ξ = ⟨ε₊^h⟩.
    pub fn delta_orbit(&self, f: &Field) -> Vec<TorsionPoint> {
        let mut out = vec![self.clone()];
        if f.g == 1 {
            return out;
        }
        loop {
            let next = out.last().unwrap().act_elem(f, &f.eps_plus);
            if next == *self {
                return out;
            }
            out.push(next);
        }
    }

    pub fn stabilizer_index(&self, f: &Field) -> usize {
        self.delta_orbit(f).len()
    }

    /// Smallest orbit member by exponent vector.
    pub fn delta_canonical(&self, f: &Field) -> TorsionPoint {
        self.delta_orbit(f).into_iter().min_by(|a, b| a.exps.cmp(&b.exps)).unwrap()
    }

    /// Whether ξ is nontrivial on 𝔤𝔭⁻¹𝔞 for every prime 𝔭 | 𝔤.
    pub fn is_primitive(&self, f: &Field) -> bool {
        factor_ideal(f, &self.modulus).iter().all(|(pr, _)| {
            let sub = self.modulus.div(f, pr).mul(f, &self.owner);
            sub.basis(f).iter().any(|b| self.eval_exp(f, b) != 0)
        })
    }

    /// Whether ξ(α) has order not a power of p (order 1 counts as p⁰);
    /// with p = None only ξ(α) ≠ 1 is required.
    pub fn admissible_at(&self, f: &Field, alpha: &Elem, p: Option<u64>) -> bool {
        let e = self.eval_exp(f, alpha);
        let ord = self.n / self.n.gcd(&e);
        match p {
            None => ord != 1,
            Some(p) => !is_prime_power_of(ord, p),
        }
    }
}

/// All characters of 𝔞/𝔪𝔞 (the 𝔪-torsion points on 𝔞), sorted by exponent vector.
pub fn torsion_points(f: &Field, owner: &Ideal, modulus: &Ideal) -> Vec<TorsionPoint> {
    let sub = owner.sublattice(f, &modulus.mul(f, owner));
    let (diag, _u, v) = smith(&sub.rows);
    let diag: Vec<i128> = diag.iter().map(|d| d.abs()).collect();
    let n = *diag.last().unwrap() as u64;
    let g = f.g;
    let mut out = Vec::new();
    let total: i128 = diag.iter().product();
    for idx in 0..total {
        let mut rem = idx;
        let mut fv = vec![0i128; g];
        for i in 0..g {
            let t = rem % diag[i];
            rem /= diag[i];
            fv[i] = (n as i128 / diag[i]) * t;
        }
        let exps = (0..g)
            .map(|r| (0..g).map(|c| v[r][c] * fv[c]).sum::<i128>().rem_euclid(n as i128) as u64)
            .collect();
        out.push(TorsionPoint { owner: owner.clone(), modulus: modulus.clone(), n, exps });
    }
    out.sort_by(|a, b| a.exps.cmp(&b.exps));
    out
}

pub fn primitive_torsion_points(f: &Field, owner: &Ideal, modulus: &Ideal) -> Vec<TorsionPoint> {
    torsion_points(f, owner, modulus).into_iter().filter(|t| t.is_primitive(f)).collect()
}

/// Primitive 𝔤-torsion points modulo Δ on every narrow class representative.
#[derive(Clone, Debug)]
pub struct TorsionClasses {
    /// (representative index, Δ-canonical torsion point)
    pub entries: Vec<(usize, TorsionPoint)>,
}

pub fn fold_classes(f: &Field, group: &RayClassGroup) -> TorsionClasses {
    let mut entries = Vec::new();
    for (r, a) in group.narrow.reps.iter().enumerate() {
        let mut seen = std::collections::HashSet::new();
        for t in primitive_torsion_points(f, a, &group.modulus) {
            let c = t.delta_canonical(f);
            if seen.insert(c.exps.clone()) {
                entries.push((r, c));
            }
        }
    }
    TorsionClasses { entries }
}

impl TorsionClasses {
    /// Index of the class of ξ (any owner) after transport to a representative.
    pub fn locate(&self, f: &Field, group: &RayClassGroup, xi: &TorsionPoint) -> usize {
        let (k, x) = group.narrow.class_of(f, &xi.owner);
        let moved = xi.act_elem(f, &x).delta_canonical(f);
        debug_assert_eq!(moved.owner, group.narrow.reps[k]);
        self.entries
            .iter()
            .position(|(r, t)| *r == k && t.exps == moved.exps)
            .expect("torsion point is not primitive")
    }

    /// For a base point ξ₀, the map class ↦ index of ξ₀^𝔟; a bijection when the action is simply transitive.
    pub fn action_map(&self, f: &Field, group: &RayClassGroup, base: &TorsionPoint) -> Vec<usize> {
        (0..group.order())
            .map(|c| {
                let b = group.rep_coprime_to(f, c, &Ideal::unit(f));
                self.locate(f, group, &base.restrict(f, &b))
            })
            .collect()
    }
}

/// c_χ(ξ) = N𝔤⁻¹ Σ_{β ∈ 𝔞/𝔤𝔞} χ_𝔞(β) ξ(-β).
pub fn fourier_coefficient(f: &Field, group: &RayClassGroup, chi: usize, xi: &TorsionPoint) -> CycloNum {
    let ch = &group.chars[chi];
    let m = xi.n.lcm(&ch.n);
    let frame = group.frame(f, &xi.owner);
    let sub = xi.owner.sublattice(f, &group.modulus.mul(f, &xi.owner));
    let mut sums = vec![BigInt::from(0); m as usize];
    for v in sub.coset_reps() {
        let beta = xi.owner.from_coords(f, &v);
        if let Some(ce) = group.char_on_owner(f, chi, &frame, &beta) {
            let xe = (xi.n - xi.eval_coords(&v)) % xi.n;
            let e = (ce * (m / ch.n) + xe * (m / xi.n)) % m;
            sums[e as usize] += 1;
        }
    }
    let ng = crate::field::abs_norm_u64(&group.modulus);
    CycloNum::from_exponent_sums(m, &sums, BigInt::from(ng))
}

/// g(χ, ξ) = N𝔤 · c_χ(ξ).
pub fn gauss_sum(f: &Field, group: &RayClassGroup, chi: usize, xi: &TorsionPoint) -> CycloNum {
    let ng = crate::field::abs_norm_u64(&group.modulus);
    fourier_coefficient(f, group, chi, xi).scale_int(&BigInt::from(ng))
}

/// Exact value χ(class) as a root of unity.
pub fn char_value(group: &RayClassGroup, chi: usize, class: usize) -> CycloNum {
    let ch = &group.chars[chi];
    CycloNum::root(ch.n, ch.vals[class] as i64)
}

pub fn check_modulus_prime_to_p(f: &Field, modulus: &Ideal, p: u64) -> Result<(), Error> {
    // 𝔤 divides a power of (p) exactly when every prime factor of 𝔤 lies above p
    let primes = factor_ideal(f, modulus);
    if primes.is_empty() {
        return Err(Error::Precondition("the modulus must be a proper ideal".into()));
    }
    let all_above_p = primes
        .iter()
        .all(|(pr, _)| crate::field::abs_norm_u64(pr) % p == 0);
    if all_above_p {
        return Err(Error::Precondition(format!("𝔤 must not divide any power of (p) for p = {p}")));
    }
    Ok(())
}
