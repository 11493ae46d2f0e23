//! The spectral presheaf over a context poset, the tautological copresheaf,
//! global-section search, and local Gelfand duality for finite abelian
//! algebras.
//!
//! A character of a finite-dimensional abelian algebra is evaluation against
//! a unique atom, so each component is the context's atom index set and the
//! restriction along C' ⊆ C sends an atom of C to the unique atom of C'
//! above it. Global sections are compatible choices, one character per
//! context; their nonexistence over a finite family certifies nonexistence
//! over any larger family containing it.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::StarAlgebra;
use crate::context::Context;
use crate::error::{Error, Result};
use crate::matrix::{solve_membership, BlockMatrix};
use crate::poset::ContextPoset;
use crate::scalar::GaussianRational;

#[derive(Clone)]
pub struct SpectralPresheaf {
    poset: Arc<ContextPoset>,
    /// Component sizes: components[i] = number of characters at context i.
    components: Vec<usize>,
    /// For every pair lower ≤ upper: table sending each atom of the upper
    /// context to the unique atom of the lower context above it.
    restrictions: BTreeMap<(usize, usize), Vec<usize>>,
}

impl SpectralPresheaf {
    /// Builds the presheaf: components are atom sets, restrictions computed
    /// by the exact summand test.
    pub fn build(poset: Arc<ContextPoset>) -> Result<Self> {
        let n = poset.len();
        let components: Vec<usize> =
            (0..n).map(|i| poset.context(i).atom_count()).collect();
        let mut restrictions = BTreeMap::new();
        for lower in 0..n {
            for upper in 0..n {
                if !poset.leq(lower, upper) {
                    continue;
                }
                let table = restriction_table(poset.context(lower), poset.context(upper))?;
                restrictions.insert((lower, upper), table);
            }
        }
        Ok(Self { poset, components, restrictions })
    }

    pub fn poset(&self) -> &Arc<ContextPoset> {
        &self.poset
    }

    pub fn component_size(&self, i: usize) -> usize {
        self.components[i]
    }

    pub fn component_sizes(&self) -> &[usize] {
        &self.components
    }

    /// The restriction table for lower ≤ upper.
    pub fn restriction(&self, lower: usize, upper: usize) -> Option<&[usize]> {
        self.restrictions.get(&(lower, upper)).map(|t| t.as_slice())
    }

    pub fn restrictions(&self) -> &BTreeMap<(usize, usize), Vec<usize>> {
        &self.restrictions
    }

    /// Checks the presheaf laws exhaustively over all stored order pairs:
    /// identity restrictions, composition of restrictions, and surjectivity.
    pub fn check_laws(&self) -> Result<()> {
        let n = self.poset.len();
        for i in 0..n {
            let table = self.restriction(i, i).ok_or_else(|| Error::Invariant {
                detail: format!("missing identity restriction at context {i}"),
            })?;
            if table.iter().enumerate().any(|(a, &b)| a != b) {
                return Err(Error::Invariant {
                    detail: format!("restriction at {i} ≤ {i} is not the identity"),
                });
            }
        }
        for ((lower, upper), table) in &self.restrictions {
            let mut hit = vec![false; self.components[*lower]];
            for &img in table {
                hit[img] = true;
            }
            if hit.iter().any(|h| !h) {
                return Err(Error::Invariant {
                    detail: format!("restriction {upper} -> {lower} is not surjective"),
                });
            }
        }
        for mid in 0..n {
            for lower in 0..n {
                if !self.poset.leq(lower, mid) {
                    continue;
                }
                for upper in 0..n {
                    if !self.poset.leq(mid, upper) {
                        continue;
                    }
                    let t_mu = self.restriction(mid, upper).unwrap();
                    let t_lm = self.restriction(lower, mid).unwrap();
                    let t_lu = self.restriction(lower, upper).unwrap();
                    for a in 0..self.components[upper] {
                        if t_lm[t_mu[a]] != t_lu[a] {
                            return Err(Error::Invariant {
                                detail: format!(
                                    "restrictions do not compose on {lower} ≤ {mid} ≤ {upper}"
                                ),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Enumerates all global sections by backtracking over maximal contexts
    /// (largest components first) with immediate propagation downward. The
    /// result is sorted, and an empty result is an exhaustive certificate for
    /// the stored family.
    pub fn global_sections(&self) -> Vec<GlobalSection> {
        let n = self.poset.len();
        let mut maximals = self.poset.maximal_indices();
        maximals.sort_by_key(|&m| std::cmp::Reverse(self.components[m]));

        // below[m] = contexts lying below maximal m.
        let below: Vec<Vec<usize>> = maximals
            .iter()
            .map(|&m| (0..n).filter(|&d| d != m && self.poset.leq(d, m)).collect())
            .collect();

        let mut sections = Vec::new();
        let mut assignment: Vec<Option<usize>> = vec![None; n];
        self.search(&maximals, &below, 0, &mut assignment, &mut sections);
        for s in &mut sections {
            debug_assert!(self.is_global_section(s));
        }
        sections.sort();
        sections
    }

    fn search(
        &self,
        maximals: &[usize],
        below: &[Vec<usize>],
        depth: usize,
        assignment: &mut Vec<Option<usize>>,
        out: &mut Vec<GlobalSection>,
    ) {
        if depth == maximals.len() {
            let full: Vec<usize> = assignment
                .iter()
                .map(|v| v.expect("every context lies below a maximal context"))
                .collect();
            out.push(GlobalSection { assignment: full });
            return;
        }
        let m = maximals[depth];
        for choice in 0..self.components[m] {
            let mut touched = Vec::new();
            let mut ok = true;
            if let Some(prev) = assignment[m] {
                ok = prev == choice;
            } else {
                assignment[m] = Some(choice);
                touched.push(m);
            }
            if ok {
                for &d in &below[depth] {
                    let implied = self.restriction(d, m).unwrap()[choice];
                    match assignment[d] {
                        Some(v) if v != implied => {
                            ok = false;
                            break;
                        }
                        Some(_) => {}
                        None => {
                            assignment[d] = Some(implied);
                            touched.push(d);
                        }
                    }
                }
            }
            if ok {
                self.search(maximals, below, depth + 1, assignment, out);
            }
            for t in touched {
                assignment[t] = None;
            }
        }
    }

    /// Validates compatibility of an assignment against every stored
    /// restriction.
    pub fn is_global_section(&self, s: &GlobalSection) -> bool {
        if s.assignment.len() != self.poset.len() {
            return false;
        }
        if s
            .assignment
            .iter()
            .enumerate()
            .any(|(i, &v)| v >= self.components[i])
        {
            return false;
        }
        self.restrictions
            .iter()
            .all(|((lower, upper), table)| table[s.assignment[*upper]] == s.assignment[*lower])
    }
}

fn restriction_table(lower: &Context, upper: &Context) -> Result<Vec<usize>> {
    let mut table = Vec::with_capacity(upper.atom_count());
    for (ai, atom) in upper.atoms().iter().enumerate() {
        let mut found = None;
        for (bi, bigger) in lower.atoms().iter().enumerate() {
            // atom ≤ bigger, both projections: bigger·atom = atom.
            if bigger.mul(atom)? == *atom {
                if found.is_some() {
                    return Err(Error::Invariant {
                        detail: format!(
                            "atom {ai} lies under two atoms of a smaller context; corrupted poset"
                        ),
                    });
                }
                found = Some(bi);
            }
        }
        table.push(found.ok_or_else(|| Error::Invariant {
            detail: format!("atom {ai} lies under no atom of a smaller context; corrupted poset"),
        })?);
    }
    Ok(table)
}

/// One character per context, compatible with every restriction.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GlobalSection {
    /// assignment[i] = atom index chosen at context i.
    pub assignment: Vec<usize>,
}

/// The tautological copresheaf: the context itself at every stage, with
/// inclusions along the order. Componentwise Gelfand duality pairs it with
/// the spectral presheaf.
#[derive(Clone)]
pub struct Bohrification {
    poset: Arc<ContextPoset>,
}

impl Bohrification {
    pub fn new(poset: Arc<ContextPoset>) -> Self {
        Self { poset }
    }

    pub fn poset(&self) -> &Arc<ContextPoset> {
        &self.poset
    }

    /// The component at stage i is the context itself.
    pub fn component(&self, i: usize) -> &Context {
        self.poset.context(i)
    }

    /// Verifies that the arrows really are inclusions: along every order
    /// pair, each atom of the smaller context is an exact subset-sum of
    /// atoms of the larger one.
    pub fn check_inclusions(&self) -> Result<()> {
        let n = self.poset.len();
        for lower in 0..n {
            for upper in 0..n {
                if !self.poset.leq(lower, upper) {
                    continue;
                }
                for (k, atom) in self.poset.context(lower).atoms().iter().enumerate() {
                    if self.poset.context(upper).as_subset_sum(atom)?.is_none() {
                        return Err(Error::Invariant {
                            detail: format!(
                                "atom {k} of context {lower} is not a sum of atoms of {upper}"
                            ),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Componentwise duality against the spectral presheaf: the character
    /// set at each stage has exactly as many points as the component algebra
    /// has atoms.
    pub fn matches_spectrum(&self, sigma: &SpectralPresheaf) -> bool {
        self.poset.len() == sigma.poset().len()
            && (0..self.poset.len())
                .all(|i| self.component(i).atom_count() == sigma.component_size(i))
    }
}

/// Checks local Gelfand duality at one context, exactly:
/// the coefficient map x ↦ (atom-basis coefficients) is a unital
/// *-isomorphism onto the function algebra on the atom set, and the double
/// dual returns the original character set.
pub fn local_duality_roundtrip(c: &Context) -> Result<bool> {
    let k = c.atom_count();
    let atoms = c.atoms();
    let basis: Vec<&BlockMatrix> = atoms.iter().collect();

    // Gelfand transform of the atom basis: p_i ↦ indicator function e_i.
    let mut transforms = Vec::with_capacity(k);
    for p in atoms {
        match solve_membership(p, &basis)? {
            Some(coeffs) => transforms.push(coeffs),
            None => return Ok(false),
        }
    }
    for (i, t) in transforms.iter().enumerate() {
        for (j, coeff) in t.iter().enumerate() {
            let expected = if i == j {
                GaussianRational::one()
            } else {
                GaussianRational::zero()
            };
            if *coeff != expected {
                return Ok(false);
            }
        }
    }

    // Unit maps to the all-ones function.
    let unit_coeffs = solve_membership(&c.algebra().unit(), &basis)?;
    match unit_coeffs {
        Some(cs) if cs.iter().all(|x| x.is_one()) => {}
        _ => return Ok(false),
    }

    // Multiplicativity and involution on the spanning basis: transform of
    // p_i·p_j is the pointwise product of transforms; p_i* transforms to the
    // conjugate. Bilinearity extends this to the whole context.
    for i in 0..k {
        for j in 0..k {
            let prod = atoms[i].mul(&atoms[j])?;
            let lhs = if prod.is_zero() {
                vec![GaussianRational::zero(); k]
            } else {
                match solve_membership(&prod, &basis)? {
                    Some(cs) => cs,
                    None => return Ok(false),
                }
            };
            let rhs: Vec<GaussianRational> = transforms[i]
                .iter()
                .zip(&transforms[j])
                .map(|(a, b)| a * b)
                .collect();
            if lhs != rhs {
                return Ok(false);
            }
        }
        let adj = atoms[i].adjoint();
        match solve_membership(&adj, &basis)? {
            Some(cs) => {
                let conj: Vec<GaussianRational> =
                    transforms[i].iter().map(|a| a.conj()).collect();
                if cs != conj {
                    return Ok(false);
                }
            }
            None => return Ok(false),
        }
    }

    // Double dual: the function algebra on k points is ℂᵏ; the atoms of its
    // unique maximal context are the indicator functions, and pulling each
    // back through the inverse transform must return the original atom.
    let fn_algebra = StarAlgebra::abelian(k);
    let fn_top = Context::new(
        fn_algebra.clone(),
        (0..k)
            .map(|i| {
                let entries: Vec<GaussianRational> = (0..k)
                    .map(|j| {
                        if i == j {
                            GaussianRational::one()
                        } else {
                            GaussianRational::zero()
                        }
                    })
                    .collect();
                BlockMatrix::diagonal(fn_algebra.shape(), &entries)
            })
            .collect::<Result<Vec<_>>>()?,
    )?;
    if fn_top.atom_count() != k {
        return Ok(false);
    }
    for indicator in fn_top.atoms() {
        // Read the indicator's coefficient vector and reconstruct in c.
        let mut reconstructed = c.algebra().zero();
        for (j, atom) in atoms.iter().enumerate() {
            let coeff = indicator.entry(j, 0, 0).clone();
            reconstructed = reconstructed.add(&atom.scale(&coeff))?;
        }
        if !atoms.contains(&reconstructed) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::Limits;

    fn presheaf_of_cn(n: usize) -> SpectralPresheaf {
        let poset = ContextPoset::full_abelian(n, &Limits::default()).unwrap();
        SpectralPresheaf::build(Arc::new(poset)).unwrap()
    }

    #[test]
    fn trivial_poset_has_one_character() {
        let poset = ContextPoset::closure(
            StarAlgebra::abelian(2),
            &[],
            &Limits::default(),
        )
        .unwrap();
        let sigma = SpectralPresheaf::build(Arc::new(poset)).unwrap();
        assert_eq!(sigma.component_sizes(), &[1]);
        assert_eq!(sigma.global_sections().len(), 1);
    }

    #[test]
    fn c3_component_sizes() {
        let sigma = presheaf_of_cn(3);
        let mut sizes = sigma.component_sizes().to_vec();
        sizes.sort();
        assert_eq!(sizes, vec![1, 2, 2, 2, 3]);
        sigma.check_laws().unwrap();
    }

    #[test]
    fn cn_has_n_sections() {
        for n in 2..=5 {
            let sigma = presheaf_of_cn(n);
            let sections = sigma.global_sections();
            assert_eq!(sections.len(), n, "sections of the ℂ^{n} presheaf");
            for s in &sections {
                assert!(sigma.is_global_section(s));
            }
        }
    }

    #[test]
    fn local_duality_on_cn_contexts() {
        let poset = ContextPoset::full_abelian(3, &Limits::default()).unwrap();
        for c in poset.contexts() {
            assert!(local_duality_roundtrip(c).unwrap());
        }
    }

    #[test]
    fn bohrification_matches_spectrum() {
        let poset = Arc::new(ContextPoset::full_abelian(4, &Limits::default()).unwrap());
        let sigma = SpectralPresheaf::build(poset.clone()).unwrap();
        let bohr = Bohrification::new(poset);
        bohr.check_inclusions().unwrap();
        assert!(bohr.matches_spectrum(&sigma));
    }
}
