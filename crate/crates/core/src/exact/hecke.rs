//! Hecke L-values at nonpositive integers and the exact polylogarithm identity.

use super::lerch::{lerch_neg, lerch_neg_p, PRoute};
use super::zeta::cone_zeta_coset;
use crate::cones::shintani_fan;
use crate::cyclo::CycloNum;
use crate::field::{primes_above, Field, Ideal, RayClassGroup};
use crate::torsion::{char_value, fold_classes, fourier_coefficient, gauss_sum, TorsionPoint};
use crate::Error;
use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

fn require_primitive(f: &Field, group: &RayClassGroup, chi: usize) -> Result<(), Error> {
    if chi >= group.chars.len() {
        return Err(Error::Config(format!("character index {chi} out of range")));
    }
    if !group.is_primitive(f, chi) {
        return Err(Error::Precondition("χ must be primitive of conductor 𝔤".into()));
    }
    Ok(())
}

/// L(χ, -k), or L^{(p)}(χ, -k) when `p` is given, through the Fourier expansion
/// χ_𝔞 = Σ_ξ c_χ(ξ) ξ over primitive torsion points modulo Δ.
pub fn hecke_l_neg(f: &Field, group: &RayClassGroup, chi: usize, k: u32, p: Option<u64>) -> Result<CycloNum, Error> {
    require_primitive(f, group, chi)?;
    let classes = fold_classes(f, group);
    let terms: Result<Vec<CycloNum>, Error> = classes
        .entries
        .par_iter()
        .map(|(_, xi)| {
            let v = match p {
                None => lerch_neg(f, xi, k)?,
                Some(p) => lerch_neg_p(f, xi, k, p, PRoute::JSum)?,
            };
            Ok(fourier_coefficient(f, group, chi, xi).mul(&v))
        })
        .collect();
    Ok(terms?.iter().fold(CycloNum::zero(1), |a, t| a.add(t)))
}

/// L(χ, -k) as Σ_𝔞 N𝔞^{-k} Σ_σ Σ_ρ χ_𝔞(ρ) Z_σ(ρ, k), with Z the Bernoulli coset value; no Fourier step.
pub fn hecke_l_unrolled(f: &Field, group: &RayClassGroup, chi: usize, k: u32) -> Result<CycloNum, Error> {
    require_primitive(f, group, chi)?;
    let ch = &group.chars[chi];
    let mut sums = vec![crate::arith::Q::from_integer(BigInt::from(0)); ch.n as usize];
    for a in &group.narrow.reps {
        let frame = group.frame(f, a);
        let ga = group.modulus.mul(f, a);
        let scale = a.norm().pow(-(k as i32));
        let reps = a.sublattice(f, &ga).coset_reps();
        for cone in &shintani_fan(f, a).cones {
            for v in &reps {
                let rho = a.from_coords(f, v);
                if let Some(e) = group.char_on_owner(f, chi, &frame, &rho) {
                    sums[e as usize] += cone_zeta_coset(f, cone, a, &ga, &rho, k) * &scale;
                }
            }
        }
    }
    Ok(sums
        .iter()
        .enumerate()
        .fold(CycloNum::zero(ch.n), |acc, (e, c)| acc.add(&CycloNum::root(ch.n, e as i64).scale(c))))
}

/// Π_{𝔭 | p} (1 - χ(𝔭) N𝔭^k).
pub fn euler_factor(f: &Field, group: &RayClassGroup, chi: usize, k: u32, p: u64) -> CycloNum {
    let mut out = CycloNum::one(1);
    for (pr, _) in primes_above(f, p) {
        let c = char_value(group, chi, group.class_of(f, &pr));
        out = out.mul(&CycloNum::one(1).sub(&c.scale(&pr.norm().pow(k as i32))));
    }
    out
}

/// Li^{(p)}_{-n}(ξ) = ℒ^{(p)}(ξΔ, -n).
pub fn polylog_exact_neg(f: &Field, xi: &TorsionPoint, n: u32, p: u64) -> Result<CycloNum, Error> {
    lerch_neg_p(f, xi, n, p, PRoute::JSum)
}

#[derive(Clone, Debug, Serialize)]
pub struct MainIdentityReport {
    pub lhs: CycloNum,
    pub rhs: CycloNum,
    pub holds: bool,
    /// Π(1 - χ(𝔭)N𝔭^n)·L(χ, -n) with L from the unrolled Bernoulli route.
    pub euler_side: CycloNum,
    pub euler_holds: bool,
}

/// L^{(p)}(χ, -n) against (g(χ,ξ)/N𝔤) Σ_𝔟 χ(𝔟)⁻¹ Li^{(p)}_{-n}(ξ^𝔟).
pub fn main_identity_exact(
    f: &Field,
    group: &RayClassGroup,
    chi: usize,
    xi: &TorsionPoint,
    n: u32,
    p: u64,
) -> Result<MainIdentityReport, Error> {
    crate::torsion::check_modulus_prime_to_p(f, &group.modulus, p)?;
    if !xi.is_primitive(f) || xi.modulus != group.modulus {
        return Err(Error::Precondition("ξ must be a primitive 𝔤-torsion point".into()));
    }
    let lhs = hecke_l_neg(f, group, chi, n, Some(p))?;
    let pid = Ideal::principal(f, &f.int(p as i64));
    let terms: Result<Vec<CycloNum>, Error> = (0..group.order())
        .into_par_iter()
        .map(|c| {
            let b = group.rep_coprime_to(f, c, &pid);
            let v = polylog_exact_neg(f, &xi.restrict(f, &b), n, p)?;
            Ok(char_value(group, chi, c).conj().mul(&v))
        })
        .collect();
    let sum = terms?.iter().fold(CycloNum::zero(1), |a, t| a.add(t));
    let ng = crate::field::abs_norm_u64(&group.modulus);
    let rhs = gauss_sum(f, group, chi, xi).mul(&sum).scale(&crate::arith::qf(1, ng as i64));
    let euler_side = euler_factor(f, group, chi, n, p).mul(&hecke_l_unrolled(f, group, chi, n)?);
    Ok(MainIdentityReport { holds: lhs == rhs, euler_holds: lhs == euler_side, lhs, rhs, euler_side })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qf;
    use crate::field::{make_field, Elem, FieldSpec};
    use crate::torsion::primitive_torsion_points;

    fn setup(spec: FieldSpec, g: &dyn Fn(&Field) -> Ideal) -> (Field, RayClassGroup) {
        let f = make_field(&spec).unwrap();
        let m = g(&f);
        let grp = RayClassGroup::new(&f, &m).unwrap();
        (f, grp)
    }

    #[test]
    fn small_rational_values() {
        let (f, g3) = setup(FieldSpec::Rational, &|f| Ideal::principal(f, &f.int(3)));
        let chi = g3.primitive_chars(&f)[0];
        assert_eq!(hecke_l_neg(&f, &g3, chi, 0, None).unwrap(), CycloNum::from_q(1, &qf(1, 3)));
        let (f, g4) = setup(FieldSpec::Rational, &|f| Ideal::principal(f, &f.int(4)));
        let chi = g4.primitive_chars(&f)[0];
        assert_eq!(hecke_l_neg(&f, &g4, chi, 0, None).unwrap(), CycloNum::from_q(1, &qf(1, 2)));
    }

    #[test]
    fn fourier_and_unrolled_agree() {
        let cases: Vec<(FieldSpec, Box<dyn Fn(&Field) -> Ideal>)> = vec![
            (FieldSpec::Rational, Box::new(|f: &Field| Ideal::principal(f, &f.int(5)))),
            (FieldSpec::Quadratic(3), Box::new(|f: &Field| Ideal::principal(f, &Elem::sqrt_d(3)))),
            (FieldSpec::Quadratic(2), Box::new(|f: &Field| Ideal::principal(f, &f.int(3)))),
            (FieldSpec::Quadratic(5), Box::new(|f: &Field| Ideal::principal(f, &f.int(3)))),
        ];
        for (spec, g) in cases {
            let (f, grp) = setup(spec, &*g);
            for chi in grp.primitive_chars(&f) {
                for k in 0..3 {
                    let a = hecke_l_neg(&f, &grp, chi, k, None).unwrap();
                    let b = hecke_l_unrolled(&f, &grp, chi, k).unwrap();
                    assert_eq!(a, b, "{} χ{chi} k={k}", f.describe());
                }
            }
        }
    }

    #[test]
    fn main_identity_small() {
        let (f, grp) = setup(FieldSpec::Rational, &|f| Ideal::principal(f, &f.int(4)));
        let chi = grp.primitive_chars(&f)[0];
        for xi in primitive_torsion_points(&f, &Ideal::unit(&f), &grp.modulus) {
            for n in [0, 1, 2] {
                let r = main_identity_exact(&f, &grp, chi, &xi, n, 3).unwrap();
                assert!(r.holds && r.euler_holds, "{r:?}");
            }
        }
    }

}
