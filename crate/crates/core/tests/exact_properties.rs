//! Exact-layer properties that are checked empirically.

use shintani::exact::lerch::lerch_neg;
use shintani::field::{make_field, FieldSpec, Ideal};
use shintani::torsion::{primitive_torsion_points, torsion_points};

/// Swapping the two real embeddings is the same as transporting ξ along the Galois
/// conjugation: ξ' on σ𝔞 with ξ'(σα) = ξ(α). Lerch values must not notice.
#[test]
fn lerch_values_ignore_embedding_order() {
    for (d, owner, m) in [(2, "1", 3), (3, "1", 5), (5, "1", 4), (2, "sqrt", 5)] {
        let f = make_field(&FieldSpec::Quadratic(d)).unwrap();
        let a = match owner {
            "1" => Ideal::unit(&f),
            _ => Ideal::principal(&f, &f.elem(shintani::arith::q(0), shintani::arith::q(1))),
        };
        let g = Ideal::principal(&f, &f.int(m));
        let (a_c, g_c) = (a.conj(&f), g.conj(&f));
        let basis = a_c.basis(&f);
        let candidates = torsion_points(&f, &a_c, &g_c);
        for xi in primitive_torsion_points(&f, &a, &g).iter().take(4) {
            let target: Vec<u64> = basis.iter().map(|b| xi.eval_exp(&f, &b.conj())).collect();
            let twin = candidates
                .iter()
                .find(|t| t.n == xi.n && basis.iter().map(|b| t.eval_exp(&f, b)).eq(target.iter().copied()))
                .expect("conjugate torsion point exists");
            for k in 0..=2 {
                assert_eq!(lerch_neg(&f, xi, k).unwrap(), lerch_neg(&f, twin, k).unwrap(), "D = {d}, 𝔤 = ({m}), ξ = {xi:?}, k = {k}");
            }
        }
    }
}
