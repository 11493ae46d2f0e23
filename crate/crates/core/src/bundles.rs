//! Bundled example families: the full context posets of ℂⁿ, the six-context
//! family generated by the Pauli-product observable square in M₄ (whose
//! spectral presheaf has no global sections), and a three-context fan in M₂
//! witnessing why two-dimensional algebras are excluded from the rigidity
//! results.

use std::sync::Arc;

use crate::algebra::{StarAlgebra, UnitalStarHom};
use crate::context::Context;
use crate::correspond::{PartialAlgebraIso, QuasiJordanIso};
use crate::error::{Error, Result};
use crate::matrix::BlockMatrix;
use crate::morphism::BaseMap;
use crate::poset::{ContextPoset, Limits};
use crate::scalar::GaussianRational;

fn g(n: i64) -> GaussianRational {
    GaussianRational::from_int(n)
}

fn gi() -> GaussianRational {
    GaussianRational::i()
}

/// 2×2 Pauli matrices as single-block matrices.
pub fn pauli(which: char) -> BlockMatrix {
    let z = GaussianRational::zero;
    let entries = match which {
        'i' | '1' => vec![g(1), z(), z(), g(1)],
        'x' => vec![z(), g(1), g(1), z()],
        'y' => vec![z(), -gi(), gi(), z()],
        'z' => vec![g(1), z(), z(), g(-1)],
        _ => panic!("unknown Pauli label {which}"),
    };
    BlockMatrix::new(vec![2], vec![entries]).expect("2x2 block")
}

/// Kronecker product of two single-block square matrices.
pub fn kron(a: &BlockMatrix, b: &BlockMatrix) -> BlockMatrix {
    assert_eq!(a.shape().len(), 1);
    assert_eq!(b.shape().len(), 1);
    let (n, m) = (a.shape()[0], b.shape()[0]);
    let mut out = BlockMatrix::zeros(&[n * m]);
    for i in 0..n {
        for j in 0..n {
            for k in 0..m {
                for l in 0..m {
                    out.set_entry(0, i * m + k, j * m + l, a.entry(0, i, j) * b.entry(0, k, l));
                }
            }
        }
    }
    out
}

/// The nine Pauli-product observables of the magic square, labeled row-major:
/// rows are (X⊗1, 1⊗X, X⊗X), (1⊗Y, Y⊗1, Y⊗Y), (X⊗Y, Y⊗X, Z⊗Z).
/// Every row and every column is a commuting triple; the row products are
/// all +1 while the column products multiply to −1, which is the source of
/// the Kochen–Specker obstruction carried by this family.
pub fn mermin_peres_observables() -> Vec<(String, BlockMatrix)> {
    let (x, y, z, one) = (pauli('x'), pauli('y'), pauli('z'), pauli('1'));
    vec![
        ("X1".to_string(), kron(&x, &one)),
        ("1X".to_string(), kron(&one, &x)),
        ("XX".to_string(), kron(&x, &x)),
        ("1Y".to_string(), kron(&one, &y)),
        ("Y1".to_string(), kron(&y, &one)),
        ("YY".to_string(), kron(&y, &y)),
        ("XY".to_string(), kron(&x, &y)),
        ("YX".to_string(), kron(&y, &x)),
        ("ZZ".to_string(), kron(&z, &z)),
    ]
}

/// The six maximal contexts of the magic square: one per row and per column,
/// each generated by its triple of commuting observables (4 joint eigen-atoms
/// each). Returned with the observable labels that generate them.
pub fn mermin_peres_contexts() -> Result<Vec<(Vec<String>, Context)>> {
    let m4 = StarAlgebra::full_matrix(4);
    let obs = mermin_peres_observables();
    let lines: [[usize; 3]; 6] = [
        [0, 1, 2], // rows
        [3, 4, 5],
        [6, 7, 8],
        [0, 3, 6], // columns
        [1, 4, 7],
        [2, 5, 8],
    ];
    let mut out = Vec::with_capacity(6);
    for line in lines {
        let labels: Vec<String> = line.iter().map(|&k| obs[k].0.clone()).collect();
        let involutions: Vec<BlockMatrix> = line.iter().map(|&k| obs[k].1.clone()).collect();
        let ctx = Context::from_involutions(m4.clone(), &involutions)?;
        out.push((labels, ctx));
    }
    Ok(out)
}

/// The intersection closure of the six magic-square contexts.
pub fn mermin_peres_poset(limits: &Limits) -> Result<ContextPoset> {
    let contexts: Vec<Context> = mermin_peres_contexts()?
        .into_iter()
        .map(|(_, c)| c)
        .collect();
    ContextPoset::closure(StarAlgebra::full_matrix(4), &contexts, limits)
}

/// The self-adjoint involution (3X + 4Z)/5 of M₂: a spin axis that is
/// neither orthogonal nor parallel to the X and Z axes, with exact rational
/// entries.
pub fn tilted_involution() -> BlockMatrix {
    let three_fifths = GaussianRational::from_ratio(3, 5);
    let four_fifths = GaussianRational::from_ratio(4, 5);
    pauli('x')
        .scale(&three_fifths)
        .add(&pauli('z').scale(&four_fifths))
        .expect("same shape")
}

/// A fan of pairwise incomparable two-atom contexts in M₂ along the axes
/// X, Z and (3X+4Z)/5, plus the trivial context. The three axes have
/// pairwise distinct angles, so very few algebra automorphisms preserve the
/// family while the poset itself is completely symmetric.
pub fn m2_fan_poset(limits: &Limits) -> Result<ContextPoset> {
    let m2 = StarAlgebra::full_matrix(2);
    let contexts = vec![
        Context::from_involutions(m2.clone(), &[pauli('x')])?,
        Context::from_involutions(m2.clone(), &[pauli('z')])?,
        Context::from_involutions(m2.clone(), &[tilted_involution()])?,
    ];
    ContextPoset::closure(m2, &contexts, limits)
}

/// Conjugation by the rational unitary [[0,−1],[1,0]] (rotation by π about
/// the y-axis): X ↦ −X, Z ↦ −Z, Y ↦ Y. It maps each fan context to itself,
/// swapping the two atoms.
pub fn m2_y_rotation() -> Result<UnitalStarHom> {
    let m2 = StarAlgebra::full_matrix(2);
    let u = BlockMatrix::new(vec![2], vec![vec![g(0), g(-1), g(1), g(0)]])?;
    UnitalStarHom::conjugation(m2, &u)
}

/// The patchwork map on the M₂ fan: swap the X-axis context with the tilted
/// context (matching spectral signs), fix the Z-axis context. Every
/// per-context restriction is a unital *-isomorphism, but no linear map on
/// M₂ agrees with it, so it is quasi-Jordan without being Jordan.
pub fn m2_fan_patchwork(poset: &Arc<ContextPoset>) -> Result<QuasiJordanIso> {
    let m2 = poset.algebra().clone();
    let unit = m2.unit();
    let half = GaussianRational::from_ratio(1, 2);
    let plus = |a: &BlockMatrix| unit.add(a).map(|s| s.scale(&half));
    let minus = |a: &BlockMatrix| unit.sub(a).map(|s| s.scale(&half));

    let x = pauli('x');
    let w = tilted_involution();
    let x_ctx = Context::from_involutions(m2.clone(), &[x.clone()])?;
    let w_ctx = Context::from_involutions(m2.clone(), &[w.clone()])?;
    let x_idx = poset.index_of(&x_ctx).ok_or_else(|| Error::Invariant {
        detail: "fan poset is missing the X-axis context".into(),
    })?;
    let w_idx = poset.index_of(&w_ctx).ok_or_else(|| Error::Invariant {
        detail: "fan poset is missing the tilted context".into(),
    })?;

    let mut base_table: Vec<usize> = (0..poset.len()).collect();
    base_table.swap(x_idx, w_idx);
    let base = BaseMap::new(poset.clone(), poset.clone(), base_table)?;

    // κ on the X context sends (1±X)/2 to (1±W)/2, and conversely.
    let pos = |ctx: &Context, m: &BlockMatrix| {
        ctx.atoms()
            .iter()
            .position(|a| a == m)
            .expect("spectral projection is an atom")
    };
    let mut kappas: Vec<Vec<usize>> = poset
        .contexts()
        .iter()
        .map(|c| (0..c.atom_count()).collect())
        .collect();
    let mut x_to_w = vec![0; 2];
    x_to_w[pos(&x_ctx, &plus(&x)?)] = pos(&w_ctx, &plus(&w)?);
    x_to_w[pos(&x_ctx, &minus(&x)?)] = pos(&w_ctx, &minus(&w)?);
    let mut w_to_x = vec![0; 2];
    w_to_x[pos(&w_ctx, &plus(&w)?)] = pos(&x_ctx, &plus(&x)?);
    w_to_x[pos(&w_ctx, &minus(&w)?)] = pos(&x_ctx, &minus(&x)?);
    kappas[x_idx] = x_to_w;
    kappas[w_idx] = w_to_x;

    Ok(QuasiJordanIso::new(PartialAlgebraIso::new(base, kappas)?))
}

/// A sample pair (A, B) of noncommuting self-adjoint elements of the fan
/// whose sum lies in the tilted context, on which the patchwork map fails
/// additivity outright.
pub fn m2_fan_additivity_witness() -> Result<(BlockMatrix, BlockMatrix)> {
    let m2 = StarAlgebra::full_matrix(2);
    let unit = m2.unit();
    let half = GaussianRational::from_ratio(1, 2);
    let x = pauli('x');
    let p_plus = unit.add(&x)?.scale(&half);
    let p_minus = unit.sub(&x)?.scale(&half);
    // A = 4/5·p₊ + 1/5·p₋ in the X context.
    let a = p_plus
        .scale(&GaussianRational::from_ratio(4, 5))
        .add(&p_minus.scale(&GaussianRational::from_ratio(1, 5)))?;
    // B = 2/5·e₁₁ − 2/5·e₂₂ in the Z context; A + B = (1 + W)/2.
    let e11 = BlockMatrix::diagonal(&[2], &[g(1), g(0)])?;
    let e22 = BlockMatrix::diagonal(&[2], &[g(0), g(1)])?;
    let b = e11
        .scale(&GaussianRational::from_ratio(2, 5))
        .add(&e22.scale(&GaussianRational::from_ratio(-2, 5)))?;
    Ok((a, b))
}

/// Named bundled posets: `c1`…`c5` (full abelian context posets), `mermin`
/// (the magic-square closure in M₄), `m2fan` (the tilted fan in M₂).
pub fn bundle_poset(name: &str, limits: &Limits) -> Result<ContextPoset> {
    match name {
        "c1" => ContextPoset::full_abelian(1, limits),
        "c2" => ContextPoset::full_abelian(2, limits),
        "c3" => ContextPoset::full_abelian(3, limits),
        "c4" => ContextPoset::full_abelian(4, limits),
        "c5" => ContextPoset::full_abelian(5, limits),
        "mermin" => mermin_peres_poset(limits),
        "m2fan" => m2_fan_poset(limits),
        _ => Err(Error::Parse(format!(
            "unknown bundle {name:?}; expected one of c1..c5, mermin, m2fan"
        ))),
    }
}

pub const BUNDLE_NAMES: [&str; 7] = ["c1", "c2", "c3", "c4", "c5", "mermin", "m2fan"];

/// The shipped magic-square document (observables + generating contexts).
pub fn mermin_peres_json() -> &'static str {
    include_str!("../data/mermin_peres.json")
}

/// Shipped full-abelian poset dumps for n = 2..5.
pub fn cn_partitions_json(n: usize) -> Option<&'static str> {
    match n {
        2 => Some(include_str!("../data/cn_partitions/c2.json")),
        3 => Some(include_str!("../data/cn_partitions/c3.json")),
        4 => Some(include_str!("../data/cn_partitions/c4.json")),
        5 => Some(include_str!("../data/cn_partitions/c5.json")),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn observables_are_involutions_with_line_products() {
        let m4 = StarAlgebra::full_matrix(4);
        let obs = mermin_peres_observables();
        let unit = m4.unit();
        for (_, a) in &obs {
            assert_eq!(a.adjoint(), *a);
            assert_eq!(a.mul(a).unwrap(), unit);
        }
        let prod = |i: usize, j: usize, k: usize| {
            obs[i].1.mul(&obs[j].1).unwrap().mul(&obs[k].1).unwrap()
        };
        // Row products are +1, column products are +1, +1, −1.
        assert_eq!(prod(0, 1, 2), unit);
        assert_eq!(prod(3, 4, 5), unit);
        assert_eq!(prod(6, 7, 8), unit);
        assert_eq!(prod(0, 3, 6), unit);
        assert_eq!(prod(1, 4, 7), unit);
        assert_eq!(prod(2, 5, 8), unit.scale(&g(-1)));
    }

    #[test]
    fn six_contexts_with_four_atoms_each() {
        let contexts = mermin_peres_contexts().unwrap();
        assert_eq!(contexts.len(), 6);
        for (_, c) in &contexts {
            assert_eq!(c.atom_count(), 4);
        }
    }

    #[test]
    fn mermin_closure_has_sixteen_contexts() {
        let poset = mermin_peres_poset(&Limits::default()).unwrap();
        // 6 maximal + 9 single-observable intersections + trivial.
        assert_eq!(poset.len(), 16);
        assert_eq!(poset.maximal_indices().len(), 6);
    }

    #[test]
    fn fan_poset_shape() {
        let poset = m2_fan_poset(&Limits::default()).unwrap();
        assert_eq!(poset.len(), 4);
        assert_eq!(poset.maximal_indices().len(), 3);
    }

    #[test]
    fn tilted_axis_is_an_involution() {
        let m2 = StarAlgebra::full_matrix(2);
        let w = tilted_involution();
        assert_eq!(w.adjoint(), w);
        assert_eq!(w.mul(&w).unwrap(), m2.unit());
    }

    #[test]
    fn y_rotation_preserves_fan_contexts() {
        let poset = Arc::new(m2_fan_poset(&Limits::default()).unwrap());
        let rot = m2_y_rotation().unwrap();
        for c in poset.contexts() {
            let images: Vec<BlockMatrix> = c
                .atoms()
                .iter()
                .map(|a| rot.apply(a).unwrap())
                .collect();
            let img = Context::new(poset.algebra().clone(), images).unwrap();
            assert_eq!(&img, c);
        }
    }

    #[test]
    fn patchwork_additivity_fails_on_witness() {
        let poset = Arc::new(m2_fan_poset(&Limits::default()).unwrap());
        let q = m2_fan_patchwork(&poset).unwrap();
        let (a, b) = m2_fan_additivity_witness().unwrap();
        let sum = a.add(&b).unwrap();
        let ta = q.apply(&a).unwrap();
        let tb = q.apply(&b).unwrap();
        let tsum = q.apply(&sum).unwrap();
        assert_ne!(tsum, ta.add(&tb).unwrap());
    }

    #[test]
    fn unknown_bundle_name_errors() {
        assert!(bundle_poset("nope", &Limits::default()).is_err());
    }

    #[test]
    fn shipped_data_files_match_constructions() {
        use crate::io::{mermin_peres_bundle_doc, to_canonical_json, BundleDoc, PosetDoc};
        let doc: BundleDoc = serde_json::from_str(mermin_peres_json()).unwrap();
        let loaded = doc.to_contexts().unwrap();
        let built: Vec<Context> = mermin_peres_contexts()
            .unwrap()
            .into_iter()
            .map(|(_, c)| c)
            .collect();
        assert_eq!(loaded, built);
        assert_eq!(
            to_canonical_json(&mermin_peres_bundle_doc().unwrap()).unwrap(),
            mermin_peres_json()
        );
        for n in 2..=5usize {
            let doc: PosetDoc = serde_json::from_str(cn_partitions_json(n).unwrap()).unwrap();
            let poset = doc.to_poset().unwrap();
            let built = ContextPoset::full_abelian(n, &Limits::default()).unwrap();
            assert_eq!(poset, built);
        }
    }
}
