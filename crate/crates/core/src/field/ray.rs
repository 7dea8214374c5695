use super::ideal::{factor_ideal, Ideal};
use super::narrow::NarrowClassGroup;
use super::{Elem, Field};
use crate::arith::{smith, Hnf};
use crate::Error;
use std::collections::HashMap;

/// A class of Cl⁺(𝔤) written as 𝔞⁻¹·α with 𝔞 a narrow class representative
/// and α a totally positive element of 𝔞 that is a unit modulo 𝔤𝔞.
#[derive(Clone, Debug)]
pub struct RayClass {
    pub rep: usize,
    pub alpha: Elem,
}

#[derive(Clone, Debug)]
struct RepResidues {
    ideal: Ideal,
    /// 𝔤𝔞 in the coordinates of the basis of 𝔞.
    sub: Hnf,
    class_of_residue: HashMap<Vec<i128>, usize>,
}

/// Character of a finite abelian group: χ(c) = exp(2πi·vals[c]/n).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharTable {
    pub n: u64,
    pub vals: Vec<u64>,
}

impl CharTable {
    pub fn order(&self) -> u64 {
        let g = self.vals.iter().fold(self.n, |acc, &v| num_integer::Integer::gcd(&acc, &v));
        self.n / g
    }

    pub fn is_trivial(&self) -> bool {
        self.vals.iter().all(|&v| v == 0)
    }

    pub fn conj(&self) -> CharTable {
        CharTable { n: self.n, vals: self.vals.iter().map(|&v| (self.n - v) % self.n).collect() }
    }
}

/// Narrow ray class group Cl⁺(𝔤) with multiplication table and characters.
#[derive(Clone, Debug)]
pub struct RayClassGroup {
    pub modulus: Ideal,
    pub narrow: NarrowClassGroup,
    pub classes: Vec<RayClass>,
    pub table: Vec<Vec<usize>>,
    pub identity: usize,
    pub invariants: Vec<u64>,
    pub chars: Vec<CharTable>,
    residues: Vec<RepResidues>,
}

fn is_unit_residue(f: &Field, a: &Ideal, ga: &Ideal, rho: &Elem) -> bool {
    let mut gens = ga.basis(f);
    gens.push(rho.clone());
    if f.g == 2 {
        gens.push(rho * &f.omega());
    }
    Ideal::from_zbasis(f, &gens) == *a
}

/// Totally positive element congruent to x modulo the lattice `m` (given by a positive rational in it).
fn positive_lift(x: &Elem, step: &Elem) -> Elem {
    let mut y = x.clone();
    while !y.is_totally_positive() {
        y = &y + step;
    }
    y
}

impl RayClassGroup {
    pub fn new(f: &Field, modulus: &Ideal) -> Result<RayClassGroup, Error> {
        Self::with_narrow(f, modulus, NarrowClassGroup::new(f)?)
    }

    pub fn with_narrow(f: &Field, modulus: &Ideal, narrow: NarrowClassGroup) -> Result<RayClassGroup, Error> {
        if !modulus.is_integral() {
            return Err(Error::Precondition("the modulus must be an integral ideal".into()));
        }
        let mut classes = Vec::new();
        let mut residues = Vec::new();
        for (r, a) in narrow.reps.iter().enumerate() {
            let ga = modulus.mul(f, a);
            let sub = a.sublattice(f, &ga);
            let step = Elem::rat(f.d, ga.min_rational());
            let mut class_of_residue = HashMap::new();
            for v in sub.coset_reps() {
                if class_of_residue.contains_key(&v) {
                    continue;
                }
                let rho = a.from_coords(f, &v);
                if !is_unit_residue(f, a, &ga, &rho) {
                    continue;
                }
                let idx = classes.len();
                let mut w = v.clone();
                loop {
                    class_of_residue.insert(w.clone(), idx);
                    let x = &a.from_coords(f, &w) * &f.eps_plus;
                    w = sub.reduce(&a.coords(f, &x).unwrap());
                    if w == v {
                        break;
                    }
                }
                classes.push(RayClass { rep: r, alpha: positive_lift(&rho, &step) });
            }
            residues.push(RepResidues { ideal: a.clone(), sub, class_of_residue });
        }
        let mut g = RayClassGroup {
            modulus: modulus.clone(),
            narrow,
            classes,
            table: vec![],
            identity: 0,
            invariants: vec![],
            chars: vec![],
            residues,
        };
        g.identity = g.class_in_rep(f, 0, &f.one());
        let n = g.classes.len();
        let mut table = vec![vec![0; n]; n];
        for i in 0..n {
            for j in 0..n {
                let (ci, cj) = (&g.classes[i], &g.classes[j]);
                let (k, x) = g.narrow.mult[ci.rep][cj.rep].clone();
                let y = &(&ci.alpha * &cj.alpha) * &x.inv();
                table[i][j] = g.class_in_rep(f, k, &y);
            }
        }
        g.table = table;
        g.build_characters();
        Ok(g)
    }

    pub fn order(&self) -> usize {
        self.classes.len()
    }

    /// The ideal 𝔞⁻¹α representing class `c`.
    pub fn class_ideal(&self, f: &Field, c: usize) -> Ideal {
        let cl = &self.classes[c];
        self.narrow.reps[cl.rep].inv(f).scale(f, &cl.alpha)
    }

    /// Class of 𝔞_k⁻¹·y for y in 𝔞_k a unit modulo 𝔤𝔞_k.
    pub fn class_in_rep(&self, f: &Field, k: usize, y: &Elem) -> usize {
        let rr = &self.residues[k];
        let v = rr.sub.reduce(&rr.ideal.coords(f, y).expect("element outside the representative"));
        *rr.class_of_residue.get(&v).expect("element is not a unit modulo the modulus")
    }

    /// Class of 𝔞_k⁻¹·y if y is a unit modulo 𝔤𝔞_k, None otherwise.
    pub fn try_class_in_rep(&self, f: &Field, k: usize, y: &Elem) -> Option<usize> {
        let rr = &self.residues[k];
        let v = rr.sub.reduce(&rr.ideal.coords(f, y)?);
        rr.class_of_residue.get(&v).copied()
    }

    /// Class of a fractional ideal coprime to the modulus.
    pub fn class_of(&self, f: &Field, b: &Ideal) -> usize {
        let b = self.integral_in_class(f, b);
        let (k, x) = self.narrow.class_of(f, &b);
        let kinv = (0..self.narrow.order()).find(|&j| self.narrow.mult[j][k].0 == 0).unwrap();
        let x2 = &self.narrow.mult[kinv][k].1;
        // reps[kinv]·b = reps[kinv]·x·reps[k] = (x·x2)
        let y = &x * x2;
        self.class_in_rep(f, kinv, &y)
    }

    /// An integral ideal in the same ray class as b.
    fn integral_in_class(&self, f: &Field, b: &Ideal) -> Ideal {
        if b.is_integral() {
            return b.clone();
        }
        let unit = Ideal::unit(f);
        let dden = b.add(f, &unit).inv(f);
        let dg = dden.mul(f, &self.modulus);
        let sub = dden.sublattice(f, &dg);
        let one = f.one();
        for v in sub.coset_reps() {
            let z = dden.from_coords(f, &v);
            if self.modulus.contains(f, &(&z - &one)) {
                let z = positive_lift(&z, &Elem::rat(f.d, dg.min_rational()));
                let out = b.scale(f, &z);
                debug_assert!(out.is_integral());
                return out;
            }
        }
        panic!("ideal is not coprime to the modulus");
    }

    pub fn inverse(&self, c: usize) -> usize {
        (0..self.order()).find(|&j| self.table[c][j] == self.identity).unwrap()
    }

    fn build_characters(&mut self) {
        let n = self.order();
        let e = self.identity;
        let mut order = vec![0u64; n];
        for c in 0..n {
            let (mut x, mut k) = (c, 1u64);
            while x != e {
                x = self.table[x][c];
                k += 1;
            }
            order[c] = k;
        }
        let exponent = order.iter().fold(1u64, |acc, &o| num_integer::Integer::lcm(&acc, &o));
        // coordinates of subgroup elements in terms of the generators chosen so far
        let mut coords: HashMap<usize, Vec<i128>> = HashMap::new();
        coords.insert(e, vec![]);
        let mut gens: Vec<usize> = Vec::new();
        let mut rel_orders: Vec<u64> = Vec::new();
        let mut relations: Vec<Vec<i128>> = Vec::new();
        let mut chars: Vec<Vec<u64>> = vec![vec![]];
        for c in 0..n {
            if coords.contains_key(&c) {
                continue;
            }
            let r = gens.len();
            let (mut x, mut m) = (c, 1u64);
            while !coords.contains_key(&x) {
                x = self.table[x][c];
                m += 1;
            }
            // c^m = x with x in the old subgroup
            let x_coords = coords[&x].clone();
            let mut rel: Vec<i128> = x_coords.iter().map(|&t| -t).collect();
            rel.push(m as i128);
            relations.push(rel);
            let mut next_chars = Vec::new();
            for ch in &chars {
                let cval: u64 = x_coords
                    .iter()
                    .zip(ch)
                    .map(|(&t, &v)| (t as u64 % exponent) * v % exponent)
                    .sum::<u64>()
                    % exponent;
                for t in 0..m {
                    let num = cval + exponent * t;
                    if num % m == 0 {
                        let mut nc = ch.clone();
                        nc.push(num / m % exponent);
                        next_chars.push(nc);
                    }
                }
            }
            chars = next_chars;
            let old: Vec<(usize, Vec<i128>)> = coords.iter().map(|(k, v)| (*k, v.clone())).collect();
            let mut power = e;
            for t in 0..m {
                for (h, hc) in &old {
                    let y = self.table[power][*h];
                    let mut yc = hc.clone();
                    yc.resize(r, 0);
                    yc.push(t as i128);
                    coords.entry(y).or_insert(yc);
                }
                power = self.table[power][c];
            }
            for v in coords.values_mut() {
                v.resize(r + 1, 0);
            }
            gens.push(c);
            rel_orders.push(m);
        }
        let r = gens.len();
        let mut invariants = Vec::new();
        if r > 0 {
            let mat: Vec<Vec<i128>> = relations
                .iter()
                .map(|row| {
                    let mut v = row.clone();
                    v.resize(r, 0);
                    v
                })
                .collect();
            let (diag, _, _) = smith(&mat);
            invariants = diag.into_iter().filter(|&d| d > 1).map(|d| d as u64).collect();
        }
        let mut tables: Vec<(Vec<u64>, CharTable)> = chars
            .into_iter()
            .map(|gv| {
                let vals = (0..n)
                    .map(|c| {
                        let cc = &coords[&c];
                        cc.iter().zip(&gv).map(|(&t, &v)| (t as u64) * v % exponent).sum::<u64>() % exponent
                    })
                    .collect();
                (gv, CharTable { n: exponent, vals })
            })
            .collect();
        tables.sort_by(|a, b| a.0.cmp(&b.0));
        self.invariants = invariants;
        self.chars = tables.into_iter().map(|t| t.1).collect();
        let _ = rel_orders;
    }

    /// χ(class) exponent, in units of 1/n.
    pub fn char_exp(&self, chi: usize, class: usize) -> u64 {
        self.chars[chi].vals[class]
    }

    /// Whether character `chi` does not factor through Cl⁺(𝔤𝔭⁻¹) for any 𝔭 | 𝔤.
    pub fn is_primitive(&self, f: &Field, chi: usize) -> bool {
        let unit = Ideal::unit(f);
        let ch = &self.chars[chi];
        for (pr, _) in factor_ideal(f, &self.modulus) {
            let smaller = self.modulus.div(f, &pr);
            let rr = &self.residues[0];
            let mut trivial_on_kernel = true;
            for (v, &c) in &rr.class_of_residue {
                let beta = unit.from_coords(f, v);
                if smaller.contains(f, &(&beta - &f.one())) && ch.vals[c] != 0 {
                    trivial_on_kernel = false;
                    break;
                }
            }
            if trivial_on_kernel {
                return false;
            }
        }
        true
    }

    pub fn primitive_chars(&self, f: &Field) -> Vec<usize> {
        (0..self.chars.len()).filter(|&i| self.is_primitive(f, i)).collect()
    }

    /// An integral ideal in class `c` coprime to `m` (and to the modulus).
    pub fn rep_coprime_to(&self, f: &Field, c: usize, m: &Ideal) -> Ideal {
        let base = self.class_ideal(f, c);
        let avoid = m.mul(f, &self.modulus);
        if base.is_integral() && super::coprime(f, &base, &avoid) {
            return base;
        }
        let mut n = 1u64;
        loop {
            for a in super::ideals_of_norm(f, n) {
                if super::coprime(f, &a, &avoid) && self.class_of(f, &a) == c {
                    return a;
                }
            }
            n += 1;
            assert!(n < 100_000, "no small representative of the ray class");
        }
    }

    /// χ_𝔞(α) exponent for α in 𝔞 (any owner), or None if α is not a unit mod 𝔤𝔞.
    pub fn char_on_owner(&self, f: &Field, chi: usize, frame: &OwnerFrame, alpha: &Elem) -> Option<u64> {
        let y = alpha * &frame.x_inv;
        self.try_class_in_rep(f, frame.rep, &y).map(|c| self.chars[chi].vals[c])
    }

    pub fn frame(&self, f: &Field, owner: &Ideal) -> OwnerFrame {
        let (rep, x) = self.narrow.class_of(f, owner);
        OwnerFrame { owner: owner.clone(), rep, x_inv: x.inv() }
    }
}

/// Identification owner = x·𝔞_rep with x totally positive.
#[derive(Clone, Debug)]
pub struct OwnerFrame {
    pub owner: Ideal,
    pub rep: usize,
    pub x_inv: Elem,
}
