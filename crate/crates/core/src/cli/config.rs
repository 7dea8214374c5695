//! Run configuration: file and flag merging, validation, and parsing of field data.

use crate::arith::{q, Q};
use crate::exact::lerch::PRoute;
use crate::field::{make_field, Elem, Field, FieldSpec, Ideal, RayClassGroup};
use crate::padic::polylog::LiPath;
use crate::torsion::{fold_classes, primitive_torsion_points, TorsionPoint};
use crate::Error;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// Every input of a run; echoed verbatim into its report.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub field: Option<String>,
    pub modulus: Option<String>,
    pub owner: Option<String>,
    pub chi: Option<usize>,
    pub chi_exponents: Option<Vec<u64>>,
    pub xi: Option<usize>,
    pub p: Option<u64>,
    pub precision: Option<u32>,
    pub k: Option<String>,
    pub s: Option<String>,
    pub twist: Option<i64>,
    pub path: Option<LiPath>,
    pub route: Option<PRoute>,
    pub cache_dir: Option<PathBuf>,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn from_file(path: &std::path::Path) -> Result<RunConfig, Error> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("config {}: {e}", path.display())))
    }

    /// Fields set in `o` take precedence.
    pub fn overlay(self, o: RunConfig) -> RunConfig {
        macro_rules! pick {
            ($($f:ident),*) => { RunConfig { $($f: o.$f.or(self.$f)),* } };
        }
        pick!(field, modulus, owner, chi, chi_exponents, xi, p, precision, k, s, twist, path, route, cache_dir, threads, seed)
    }

    pub fn field(&self) -> Result<Field, Error> {
        make_field(&FieldSpec::parse(self.field.as_deref().unwrap_or("rational"))?)
    }

    pub fn need_p(&self) -> Result<u64, Error> {
        let p = self.p.ok_or_else(|| Error::Config("--p is required".into()))?;
        if !crate::arith::is_prime(p) {
            return Err(Error::Config(format!("p = {p} is not prime")));
        }
        Ok(p)
    }

    pub fn precision(&self) -> Result<u32, Error> {
        let m = self.precision.unwrap_or(4);
        if m == 0 {
            return Err(Error::Config("precision M must be at least 1".into()));
        }
        Ok(m)
    }

    pub fn modulus(&self, f: &Field) -> Result<Ideal, Error> {
        let s = self.modulus.as_deref().ok_or_else(|| Error::Config("--modulus is required".into()))?;
        parse_ideal(f, s)
    }

    pub fn owner(&self, f: &Field) -> Result<Ideal, Error> {
        match &self.owner {
            None => Ok(Ideal::unit(f)),
            Some(s) => parse_ideal(f, s),
        }
    }

    pub fn k_values(&self, default: &str) -> Result<Vec<i64>, Error> {
        parse_range(self.k.as_deref().unwrap_or(default))
    }

    pub fn nonnegative_k(&self, default: &str) -> Result<Vec<u32>, Error> {
        self.k_values(default)?
            .into_iter()
            .map(|k| u32::try_from(k).map_err(|_| Error::Precondition(format!("k = {k} must be nonnegative here"))))
            .collect()
    }

    pub fn s_value(&self) -> Result<Q, Error> {
        let s = self.s.as_deref().ok_or_else(|| Error::Config("--s is required".into()))?;
        s.trim().parse::<Q>().map_err(|e| Error::Config(format!("s = {s:?}: {e}")))
    }

    pub fn group(&self, f: &Field) -> Result<RayClassGroup, Error> {
        RayClassGroup::new(f, &self.modulus(f)?)
    }

    /// Selected character: explicit exponent table, index, or the first primitive one.
    pub fn character(&self, f: &Field, g: &RayClassGroup) -> Result<usize, Error> {
        if let Some(t) = &self.chi_exponents {
            return g
                .chars
                .iter()
                .position(|c| {
                    let o = c.order();
                    c.vals.len() == t.len() && c.vals.iter().zip(t).all(|(&a, &b)| a * o / c.n == b % o)
                })
                .ok_or_else(|| Error::Config("no character matches the exponent table".into()));
        }
        match self.chi {
            Some(i) if i < g.chars.len() => Ok(i),
            Some(i) => Err(Error::Config(format!("character index {i} out of range (group has {} characters)", g.chars.len()))),
            None => g
                .primitive_chars(f)
                .first()
                .copied()
                .ok_or_else(|| Error::Precondition("no character is primitive of conductor 𝔤".into())),
        }
    }

    /// Primitive 𝔤-torsion points on the owner, or the one selected by --xi.
    pub fn torsion_points(&self, f: &Field) -> Result<Vec<TorsionPoint>, Error> {
        let pts = primitive_torsion_points(f, &self.owner(f)?, &self.modulus(f)?);
        select(pts, self.xi, "torsion point")
    }

    /// Base points ξ ∈ 𝒯₀[𝔤] on O modulo Δ, or the one selected by --xi.
    pub fn base_points(&self, f: &Field, g: &RayClassGroup) -> Result<Vec<TorsionPoint>, Error> {
        let pts: Vec<TorsionPoint> = fold_classes(f, g).entries.into_iter().filter(|(r, _)| *r == 0).map(|(_, t)| t).collect();
        select(pts, self.xi, "base point")
    }
}

fn select(pts: Vec<TorsionPoint>, idx: Option<usize>, what: &str) -> Result<Vec<TorsionPoint>, Error> {
    match idx {
        None if pts.is_empty() => Err(Error::Precondition(format!("no primitive {what} exists for this modulus"))),
        None => Ok(pts),
        Some(i) => pts.get(i).cloned().map(|t| vec![t]).ok_or_else(|| Error::Config(format!("{what} index {i} out of range ({} available)", pts.len()))),
    }
}

/// "a..b" (inclusive), "a,b,c" or a single integer.
pub fn parse_range(s: &str) -> Result<Vec<i64>, Error> {
    let bad = |_| Error::Config(format!("cannot parse range {s:?}"));
    let t = s.trim();
    if let Some((a, b)) = t.split_once("..") {
        let a: i64 = a.trim().parse().map_err(bad)?;
        let b: i64 = b.trim().trim_start_matches('=').parse().map_err(bad)?;
        if b < a {
            return Err(Error::Config(format!("empty range {s:?}")));
        }
        return Ok((a..=b).collect());
    }
    t.split(',').map(|x| x.trim().parse::<i64>().map_err(bad)).collect()
}

/// Element in the notation "a", "b*sqrt", "a+b*sqrt", "a-sqrt" (sqrt stands for √D).
pub fn parse_elem(f: &Field, s: &str) -> Result<Elem, Error> {
    let bad = || Error::Config(format!("cannot parse element {s:?}"));
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(bad());
    }
    let mut terms = Vec::new();
    let mut cur = String::new();
    for (i, c) in t.chars().enumerate() {
        if (c == '+' || c == '-') && i > 0 {
            terms.push(std::mem::take(&mut cur));
        }
        cur.push(c);
    }
    terms.push(cur);
    let (mut a, mut b) = (q(0), q(0));
    for term in terms {
        let (sign, body) = match term.strip_prefix('-') {
            Some(r) => (-1, r.to_string()),
            None => (1, term.trim_start_matches('+').to_string()),
        };
        if let Some(coef) = body.strip_suffix("sqrt") {
            if f.is_rational() {
                return Err(Error::Config("sqrt is undefined over Q".into()));
            }
            let coef = coef.trim_end_matches('*');
            let c: Q = if coef.is_empty() { q(1) } else { coef.parse().map_err(|_| bad())? };
            b += c * q(sign);
        } else {
            let c: Q = body.parse().map_err(|_| bad())?;
            a += c * q(sign);
        }
    }
    Ok(f.elem(a, b))
}

/// Ideal from a generator list "x, y, ..." or "hnf:a,b,c" (Z-basis a + bω, cω).
pub fn parse_ideal(f: &Field, s: &str) -> Result<Ideal, Error> {
    let t = s.trim();
    if let Some(rest) = t.strip_prefix("hnf:") {
        let v: Vec<i64> = rest.split(',').map(|x| x.trim().parse::<i64>().map_err(|_| Error::Config(format!("cannot parse {s:?}")))).collect::<Result<_, _>>()?;
        let basis: Vec<Elem> = match (f.g, v.as_slice()) {
            (1, [a]) => vec![f.int(*a)],
            (2, [a, b, c]) => vec![f.from_coords(&[q(*a), q(*b)]), f.from_coords(&[q(0), q(*c)])],
            _ => return Err(Error::Config(format!("HNF {s:?} has the wrong number of entries"))),
        };
        if basis.iter().any(|x| x.is_zero()) {
            return Err(Error::Config("HNF basis must be nondegenerate".into()));
        }
        return Ok(Ideal::from_zbasis(f, &basis));
    }
    let gens: Vec<Elem> = t.split(',').map(|x| parse_elem(f, x)).collect::<Result<_, _>>()?;
    if gens.iter().all(|x| x.is_zero()) {
        return Err(Error::Config("the zero ideal is not allowed".into()));
    }
    if gens.iter().any(|x| !f.is_integral(x)) {
        return Err(Error::Config(format!("{s:?} is not an integral ideal")));
    }
    Ok(Ideal::from_gens(f, &gens))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("-3..3").unwrap(), vec![-3, -2, -1, 0, 1, 2, 3]);
        assert_eq!(parse_range("1, 4").unwrap(), vec![1, 4]);
        assert_eq!(parse_range("5").unwrap(), vec![5]);
        assert!(parse_range("3..1").is_err());
    }

    #[test]
    fn elements_and_ideals() {
        let f = make_field(&FieldSpec::Quadratic(3)).unwrap();
        assert_eq!(parse_elem(&f, "2+sqrt").unwrap(), f.elem(q(2), q(1)));
        assert_eq!(parse_elem(&f, "-1-3*sqrt").unwrap(), f.elem(q(-1), q(-3)));
        assert_eq!(parse_ideal(&f, "sqrt").unwrap(), Ideal::principal(&f, &Elem::sqrt_d(3)));
        assert_eq!(parse_ideal(&f, "hnf:3,0,1").unwrap(), Ideal::principal(&f, &Elem::sqrt_d(3)));
    }

    #[test]
    fn overlay_prefers_flags() {
        let file = RunConfig { p: Some(5), precision: Some(3), ..Default::default() };
        let flags = RunConfig { p: Some(7), ..Default::default() };
        let m = file.overlay(flags);
        assert_eq!((m.p, m.precision), (Some(7), Some(3)));
    }
}
