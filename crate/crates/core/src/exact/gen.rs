//! Generating functions of cones expanded at a torsion point.
//!
//! Around ξ we write t^x = ξ(x)·Π_j (1+T_j)^{m_j} where x = Σ m_j γ_j in the
//! basis γ of the owner. The operator D_j = (1+T_j)∂/∂T_j multiplies t^x by
//! m_j, so Σ_j γ_j^τ D_j multiplies it by x^τ.

use crate::cones::Cone;
use crate::cyclo::{CompositumNum, CycloNum};
use crate::field::{Elem, Field, Ideal};
use crate::series::TruncSeries;
use crate::torsion::TorsionPoint;
use std::collections::HashMap;

fn exponents(f: &Field, owner: &Ideal, x: &Elem) -> Vec<i64> {
    owner.coords(f, x).expect("element outside the owner").iter().map(|&c| c as i64).collect()
}

fn term(f: &Field, xi: &TorsionPoint, x: &Elem, cap: usize) -> TruncSeries<CycloNum> {
    TruncSeries::shifted_monomial(f.g, cap, &xi.eval(f, x), &exponents(f, &xi.owner, x))
}

/// Expansion of 𝒢_σ(t) = Σ_{β ∈ P̆ ∩ 𝔞} t^β / Π_j (1 - t^{α_j}) at ξ, to total degree `cap`.
pub fn gen_series(f: &Field, cone: &Cone, xi: &TorsionPoint, cap: usize) -> TruncSeries<CycloNum> {
    let one = CycloNum::one(xi.n);
    let mut num = TruncSeries::zero(f.g, cap, &one);
    for pt in cone.breve_points(f, &xi.owner) {
        num = num.add(&term(f, xi, &pt.elem, cap));
    }
    for a in &cone.gens {
        let den = TruncSeries::constant(f.g, cap, one.clone()).sub(&term(f, xi, a, cap));
        num = num.mul(&den.inv());
    }
    num
}

/// Applies the norm-form operator N(Σ_j γ_j D_j) `k` times; each application uses g degrees.
pub fn apply_norm_form(f: &Field, owner: &Ideal, s: &TruncSeries<CycloNum>, k: u32) -> TruncSeries<CycloNum> {
    let gam = owner.basis(f);
    let mut s = s.clone();
    for _ in 0..k {
        s = if f.g == 1 {
            s.d_log(0).scale_q(&gam[0].a)
        } else {
            let c11 = gam[0].norm();
            let c22 = gam[1].norm();
            let c12 = (&gam[0] * &gam[1].conj()).trace();
            let d1 = s.d_log(0);
            let d2 = s.d_log(1);
            d1.d_log(0).scale_q(&c11).add(&d1.d_log(1).scale_q(&c12)).add(&d2.d_log(1).scale_q(&c22))
        };
    }
    s
}

/// The embedding x ↦ x^τ as an element of F (τ = 0 identity, τ = 1 conjugation).
pub fn embed_tau(x: &Elem, tau: usize) -> Elem {
    if tau == 0 {
        x.clone()
    } else {
        x.conj()
    }
}

pub fn to_compositum(d: u64, n: u64, x: &Elem) -> CompositumNum {
    CompositumNum::from_quadratic(d.max(1), n, &x.a, &x.b)
}

/// Applies D_τ = Σ_j γ_j^τ D_j once.
pub fn apply_tau(f: &Field, owner: &Ideal, s: &TruncSeries<CompositumNum>, tau: usize) -> TruncSeries<CompositumNum> {
    let gam = owner.basis(f);
    let n = s.constant_term().u.n;
    let mut out: Option<TruncSeries<CompositumNum>> = None;
    for (j, g) in gam.iter().enumerate() {
        let t = s.d_log(j).scale(&to_compositum(f.d, n, &embed_tau(g, tau)));
        out = Some(match out {
            None => t,
            Some(o) => o.add(&t),
        });
    }
    out.unwrap()
}

/// ζ_σ(ξ, -𝐤) = Σ_{x ∈ σ̆ ∩ 𝔞} ξ(x) Π_τ (x^τ)^{k_τ} via the series operators.
pub fn cone_zeta_series(f: &Field, cone: &Cone, xi: &TorsionPoint, kv: &[u32]) -> CompositumNum {
    let cap: u32 = kv.iter().sum();
    let mut s = gen_series(f, cone, xi, cap as usize).map(|c| CompositumNum::from_cyclo(f.d.max(1), c.clone()));
    for (tau, &k) in kv.iter().enumerate() {
        for _ in 0..k {
            s = apply_tau(f, &xi.owner, &s, tau);
        }
    }
    s.constant_term().clone()
}

/// Diagonal value ζ_σ(ξ, -k·I) via the norm-form operator.
pub fn cone_zeta_series_diag(f: &Field, cone: &Cone, xi: &TorsionPoint, k: u32) -> CycloNum {
    let s = gen_series(f, cone, xi, f.g * k as usize);
    apply_norm_form(f, &xi.owner, &s, k).constant_term().clone()
}

/// Σ_j (-1)^j sgn(α̂_j) 𝒢_{σ(α̂_j)} at ξ; vanishes identically by the cocycle relation.
/// Degenerate faces contribute nothing.
pub fn gen_cocycle_residual(f: &Field, alphas: &[Elem], xi: &TorsionPoint, cap: usize) -> TruncSeries<CycloNum> {
    let mut acc = TruncSeries::zero(f.g, cap, &CycloNum::one(xi.n));
    for j in 0..alphas.len() {
        let hat: Vec<Elem> = alphas.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, a)| a.clone()).collect();
        let c = Cone::new(hat);
        let o = c.orientation();
        if o == 0 {
            continue;
        }
        let s = gen_series(f, &c, xi, cap);
        acc = if (j % 2 == 0) == (o > 0) { acc.add(&s) } else { acc.sub(&s) };
    }
    acc
}

/// Σ_x c_x t^x / Π_j (1 - t^{α_j})^{m_j} with coefficients c_x in F.
#[derive(Clone, Debug)]
pub struct ConeRational {
    pub gens: Vec<Elem>,
    pub pows: Vec<u32>,
    pub numer: HashMap<Elem, Elem>,
}

fn push(m: &mut HashMap<Elem, Elem>, x: Elem, c: Elem) {
    let e = m.entry(x).or_insert_with(|| Elem::int(c.d, 0));
    *e = &*e + &c;
}

impl ConeRational {
    pub fn of_cone(f: &Field, cone: &Cone, owner: &Ideal) -> ConeRational {
        let mut numer = HashMap::new();
        for pt in cone.breve_points(f, owner) {
            push(&mut numer, pt.elem, f.one());
        }
        ConeRational { gens: cone.gens.clone(), pows: vec![1; cone.dim()], numer }
    }

    /// The derivative ∂_τ with t^x ↦ x^τ t^x, over the common denominator Π(1 - t^{α_j})^{m_j + 1}.
    pub fn differentiate(&self, tau: usize) -> ConeRational {
        let g = self.gens.len();
        // Π_j (1 - t^{α_j}) and, for each j, α_j^τ t^{α_j} Π_{i≠j} (1 - t^{α_i}), as group-ring elements
        let factor = |skip: Option<usize>| {
            let d = self.gens[0].d;
            let mut poly: HashMap<Elem, Elem> = HashMap::new();
            poly.insert(Elem::int(d, 0), Elem::int(d, 1));
            for (i, a) in self.gens.iter().enumerate() {
                let mut next = HashMap::new();
                for (x, c) in &poly {
                    if Some(i) == skip {
                        push(&mut next, x + a, c * &embed_tau(a, tau));
                    } else {
                        push(&mut next, x.clone(), c.clone());
                        push(&mut next, x + a, -c);
                    }
                }
                poly = next;
            }
            poly
        };
        let mut numer = HashMap::new();
        let full = factor(None);
        for (x, c) in &self.numer {
            let dc = c * &embed_tau(x, tau);
            for (y, e) in &full {
                push(&mut numer, x + y, &dc * e);
            }
            for j in 0..g {
                let m = Elem::int(c.d, self.pows[j] as i64);
                for (y, e) in factor(Some(j)) {
                    push(&mut numer, x + &y, &(c * &m) * &e);
                }
            }
        }
        numer.retain(|_, c| !c.is_zero());
        ConeRational { gens: self.gens.clone(), pows: self.pows.iter().map(|m| m + 1).collect(), numer }
    }

    /// Expansion at ξ to total degree `cap`.
    pub fn expand(&self, f: &Field, xi: &TorsionPoint, cap: usize) -> TruncSeries<CompositumNum> {
        let d = f.d.max(1);
        let to_c = |s: TruncSeries<CycloNum>| s.map(|c| CompositumNum::from_cyclo(d, c.clone()));
        let mut num = TruncSeries::zero(f.g, cap, &CompositumNum::zero(d, xi.n));
        for (x, c) in &self.numer {
            num = num.add(&to_c(term(f, xi, x, cap)).scale(&to_compositum(d, xi.n, c)));
        }
        let one = CycloNum::one(xi.n);
        for (a, &m) in self.gens.iter().zip(&self.pows) {
            let den = to_c(TruncSeries::constant(f.g, cap, one.clone()).sub(&term(f, xi, a, cap))).inv();
            for _ in 0..m {
                num = num.mul(&den);
            }
        }
        num
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::q;
    use crate::exact::zeta::{cone_zeta, Exact};
    use crate::field::{make_field, FieldSpec};
    use crate::torsion::primitive_torsion_points;

    #[test]
    fn series_matches_closed_form() {
        let f = make_field(&FieldSpec::Quadratic(2)).unwrap();
        let o = Ideal::unit(&f);
        let m = Ideal::principal(&f, &f.int(3));
        let cone = Cone::new(vec![f.one(), f.elem(q(3), q(2))]);
        for xi in primitive_torsion_points(&f, &o, &m).iter().take(4) {
            if !cone.gens.iter().all(|a| xi.admissible_at(&f, a, None)) {
                continue;
            }
            for k in 0..3 {
                assert_eq!(cone_zeta_series_diag(&f, &cone, xi, k), cone_zeta(&Exact, &f, &cone, xi, k));
            }
            let mixed = cone_zeta_series(&f, &cone, xi, &[1, 1]).to_cyclo().unwrap();
            assert_eq!(mixed, cone_zeta(&Exact, &f, &cone, xi, 1));
        }
    }

    #[test]
    fn differentiation_commutes_with_expansion() {
        let f = make_field(&FieldSpec::Quadratic(5)).unwrap();
        let o = Ideal::unit(&f);
        let m = Ideal::principal(&f, &f.int(4));
        let cone = Cone::new(vec![f.int(1), f.elem(q(3), q(1))]);
        let xi = primitive_torsion_points(&f, &o, &m)
            .into_iter()
            .find(|x| cone.gens.iter().all(|a| x.admissible_at(&f, a, None)))
            .unwrap();
        let r = ConeRational::of_cone(&f, &cone, &o);
        for tau in 0..2 {
            let lhs = r.differentiate(tau).expand(&f, &xi, 3);
            let rhs = apply_tau(&f, &o, &r.expand(&f, &xi, 4), tau);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn generating_cocycle_vanishes() {
        let f = make_field(&FieldSpec::Quadratic(3)).unwrap();
        let o = Ideal::unit(&f);
        let m = Ideal::principal(&f, &f.int(5));
        let al = [f.int(1), f.elem(q(2), q(1)), f.elem(q(5), q(2))];
        let xi = primitive_torsion_points(&f, &o, &m)
            .into_iter()
            .find(|x| al.iter().all(|a| x.admissible_at(&f, a, None)))
            .unwrap();
        assert!(gen_cocycle_residual(&f, &al, &xi, 4).is_zero());
    }
}
