//! Shintani–Lerch values ℒ(ξΔ, -k) and their p-modified versions.

use super::gen::{apply_norm_form, gen_series};
use super::zeta::{cone_zeta, Exact};
use crate::cones::{refine_for, Cone, Fan, RefineOptions};
use crate::cyclo::CycloNum;
use crate::field::{primes_above, Field, Ideal};
use crate::series::TruncSeries;
use crate::torsion::{torsion_points, TorsionPoint};
use crate::Error;
use dashmap::DashMap;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct ConeKey {
    gens: Vec<crate::field::Elem>,
    xi: TorsionPoint,
    k: u32,
}

fn cache() -> &'static DashMap<ConeKey, CycloNum> {
    static C: OnceLock<DashMap<ConeKey, CycloNum>> = OnceLock::new();
    C.get_or_init(DashMap::new)
}

/// Memoised closed-form cone value.
pub fn cone_value(f: &Field, cone: &Cone, xi: &TorsionPoint, k: u32) -> CycloNum {
    let key = ConeKey { gens: cone.gens.clone(), xi: xi.clone(), k };
    if let Some(v) = cache().get(&key) {
        if let Some(c) = crate::cache::global() {
            c.note_hit();
        }
        return v.clone();
    }
    let disk = crate::cache::global().map(|c| {
        let h = crate::cache::DiskCache::key(&("cone-zeta", &xi.owner, &cone.gens, xi.n, &xi.exps, k, "closed-form"));
        (c, h)
    });
    if let Some((c, h)) = &disk {
        if let Some(v) = c.get::<CycloNum>(h) {
            cache().insert(key, v.clone());
            return v;
        }
    }
    let v = cone_zeta(&Exact, f, cone, xi, k);
    if let Some((c, h)) = &disk {
        if let Err(e) = c.put(h, &v) {
            eprintln!("warning: {e}");
        }
    }
    cache().insert(key, v.clone());
    v
}

/// How the p-modified value is assembled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PRoute {
    /// Twist the generating series by the p-power torsion before differentiating.
    Series,
    /// Inclusion–exclusion over subsets of primes above p, with closed-form cone values.
    JSum,
    /// Sum of unmodified values of ξ restricted to 𝔭_J𝔞.
    Restriction,
}

fn norm_scale(owner: &Ideal, k: u32) -> crate::arith::Q {
    owner.norm().pow(-(k as i32))
}

fn fan_sum(f: &Field, fan: &Fan, xi: &TorsionPoint, k: u32) -> CycloNum {
    fan.cones.iter().fold(CycloNum::zero(xi.n), |acc, c| acc.add(&cone_value(f, c, xi, k)))
}

pub fn lerch_fan(f: &Field, xi: &TorsionPoint, p: Option<u64>) -> Result<Fan, Error> {
    refine_for(f, xi, p, RefineOptions::default())
}

/// ℒ(ξΔ, -k) = N𝔞^{-k} Σ_{σ ∈ Δ_ξ\Φ_ξ} ζ_σ(ξ, -k).
pub fn lerch_neg(f: &Field, xi: &TorsionPoint, k: u32) -> Result<CycloNum, Error> {
    let fan = lerch_fan(f, xi, None)?;
    Ok(fan_sum(f, &fan, xi, k).scale(&norm_scale(&xi.owner, k)))
}

/// Subsets J of the primes above p as (𝔭_J, |J|).
pub fn prime_subsets(f: &Field, p: u64) -> Vec<(Ideal, usize)> {
    let primes: Vec<Ideal> = primes_above(f, p).into_iter().map(|(pr, _)| pr).collect();
    (0..1usize << primes.len())
        .map(|mask| {
            let mut ideal = Ideal::unit(f);
            let mut size = 0;
            for (i, pr) in primes.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    ideal = ideal.mul(f, pr);
                    size += 1;
                }
            }
            (ideal, size)
        })
        .collect()
}

/// The twists (ξ·ξ_J, (-1)^{|J|}/N𝔭_J) over all J and all ξ_J ∈ 𝕋^𝔞[𝔭_J].
fn twists(f: &Field, xi: &TorsionPoint, p: u64) -> Vec<(TorsionPoint, crate::arith::Q)> {
    let mut out = Vec::new();
    for (pj, size) in prime_subsets(f, p) {
        let sign = if size % 2 == 0 { 1 } else { -1 };
        let w = crate::arith::q(sign) / pj.norm();
        for t in torsion_points(f, &xi.owner, &pj) {
            out.push((xi.times(f, &t), w.clone()));
        }
    }
    out
}

/// ℒ^{(p)}(ξΔ, -k): the sum restricted to α with α𝔞⁻¹ prime to p.
pub fn lerch_neg_p(f: &Field, xi: &TorsionPoint, k: u32, p: u64, route: PRoute) -> Result<CycloNum, Error> {
    let scale = norm_scale(&xi.owner, k);
    match route {
        PRoute::JSum => {
            let fan = lerch_fan(f, xi, Some(p))?;
            let mut acc = CycloNum::zero(xi.n);
            for (t, w) in twists(f, xi, p) {
                acc = acc.add(&fan_sum(f, &fan, &t, k).scale(&w));
            }
            Ok(acc.scale(&scale))
        }
        PRoute::Series => {
            let fan = lerch_fan(f, xi, Some(p))?;
            let cap = f.g * k as usize;
            let tw = twists(f, xi, p);
            let mut acc = CycloNum::zero(xi.n);
            for c in &fan.cones {
                let mut s: Option<TruncSeries<CycloNum>> = None;
                for (t, w) in &tw {
                    let g = gen_series(f, c, t, cap).scale_q(w);
                    s = Some(match s {
                        None => g,
                        Some(s) => s.add(&g),
                    });
                }
                acc = acc.add(apply_norm_form(f, &xi.owner, &s.unwrap(), k).constant_term());
            }
            Ok(acc.scale(&scale))
        }
        PRoute::Restriction => {
            let h = xi.stabilizer_index(f);
            let mut acc = CycloNum::zero(xi.n);
            for (pj, size) in prime_subsets(f, p) {
                let r = xi.restrict(f, &pj);
                let fan = lerch_fan(f, &r, Some(p))?;
                let hr = r.stabilizer_index(f);
                let mut v = fan_sum(f, &fan, &r, k).scale(&crate::arith::q((h / hr) as i64));
                if size % 2 == 1 {
                    v = v.neg();
                }
                acc = acc.add(&v);
            }
            Ok(acc.scale(&scale))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{q, qf};
    use crate::field::{make_field, FieldSpec};
    use crate::torsion::primitive_torsion_points;

    #[test]
    fn rational_lerch_values() {
        // Σ_{n ≥ 1} ζ₃^n = ζ₃/(1-ζ₃) regularised
        let f = make_field(&FieldSpec::Rational).unwrap();
        let o = Ideal::unit(&f);
        let xi = primitive_torsion_points(&f, &o, &Ideal::principal(&f, &f.int(3)))[0].clone();
        let z = xi.eval(&f, &f.one());
        let want = z.mul(&CycloNum::one(3).sub(&z).inv());
        assert_eq!(lerch_neg(&f, &xi, 0).unwrap(), want);
        let half = primitive_torsion_points(&f, &o, &Ideal::principal(&f, &f.int(2)))[0].clone();
        assert_eq!(lerch_neg(&f, &half, 0).unwrap(), CycloNum::from_q(1, &qf(-1, 2)));
    }

    #[test]
    fn p_modified_routes_agree() {
        for (spec, n, p) in [(FieldSpec::Rational, 4, 3), (FieldSpec::Quadratic(3), 5, 2), (FieldSpec::Quadratic(5), 3, 2)] {
            let f = make_field(&spec).unwrap();
            let o = Ideal::unit(&f);
            let m = Ideal::principal(&f, &f.int(n));
            for xi in primitive_torsion_points(&f, &o, &m).iter().take(3) {
                for k in 0..2 {
                    let a = lerch_neg_p(&f, xi, k, p, PRoute::JSum).unwrap();
                    let b = lerch_neg_p(&f, xi, k, p, PRoute::Series).unwrap();
                    let c = lerch_neg_p(&f, xi, k, p, PRoute::Restriction).unwrap();
                    assert_eq!(a, b, "{spec:?} {xi:?} {k}");
                    assert_eq!(a, c, "{spec:?} {xi:?} {k}");
                }
            }
        }
    }

    #[test]
    fn p_modification_removes_multiples() {
        // ℚ, ξ = ζ₄: Σ_{3 ∤ n} i^n n^k = Σ i^n n^k - 3^k Σ i^{3n} n^k
        let f = make_field(&FieldSpec::Rational).unwrap();
        let o = Ideal::unit(&f);
        let pts = primitive_torsion_points(&f, &o, &Ideal::principal(&f, &f.int(4)));
        let xi = &pts[0];
        let cube = xi.restrict(&f, &Ideal::principal(&f, &f.int(3))).act_elem(&f, &f.int(3));
        for k in 0..3 {
            let full = lerch_neg(&f, xi, k).unwrap();
            let sub = lerch_neg(&f, &cube, k).unwrap().scale(&q(3).pow(k as i32));
            assert_eq!(lerch_neg_p(&f, xi, k, 3, PRoute::JSum).unwrap(), full.sub(&sub));
        }
    }
}
