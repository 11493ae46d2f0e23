//! Morphisms of spectral presheaves over different posets: a monotone base
//! map together with a natural transformation of components, the induced-map
//! construction from verified algebra homomorphisms, the composition law,
//! and functoriality checks for the spectrum functor (contravariant) and the
//! tautological-copresheaf functor (covariant).

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::UnitalStarHom;
use crate::context::Context;
use crate::error::{Error, Result};
use crate::poset::ContextPoset;
use crate::presheaf::SpectralPresheaf;

/// A monotone map of context posets, stored as a context index table.
#[derive(Clone)]
pub struct BaseMap {
    source: Arc<ContextPoset>,
    target: Arc<ContextPoset>,
    table: Vec<usize>,
}

impl PartialEq for BaseMap {
    fn eq(&self, other: &Self) -> bool {
        self.table == other.table
            && *self.source == *other.source
            && *self.target == *other.target
    }
}
impl Eq for BaseMap {}

impl BaseMap {
    /// Builds and verifies monotonicity.
    pub fn new(
        source: Arc<ContextPoset>,
        target: Arc<ContextPoset>,
        table: Vec<usize>,
    ) -> Result<Self> {
        if table.len() != source.len() || table.iter().any(|&t| t >= target.len()) {
            return Err(Error::Invariant {
                detail: "base map table does not match the posets".into(),
            });
        }
        for i in 0..source.len() {
            for j in 0..source.len() {
                if source.leq(i, j) && !target.leq(table[i], table[j]) {
                    return Err(Error::Invariant {
                        detail: format!("base map is not monotone on {i} ≤ {j}"),
                    });
                }
            }
        }
        Ok(Self { source, target, table })
    }

    pub fn identity(poset: Arc<ContextPoset>) -> Self {
        let table = (0..poset.len()).collect();
        Self { source: poset.clone(), target: poset, table }
    }

    pub fn source(&self) -> &Arc<ContextPoset> {
        &self.source
    }

    pub fn target(&self) -> &Arc<ContextPoset> {
        &self.target
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, i: usize) -> usize {
        self.table[i]
    }

    /// Monotone bijection whose inverse is monotone.
    pub fn is_order_iso(&self) -> bool {
        if self.source.len() != self.target.len() {
            return false;
        }
        let n = self.source.len();
        let mut seen = vec![false; n];
        for &t in &self.table {
            if seen[t] {
                return false;
            }
            seen[t] = true;
        }
        for i in 0..n {
            for j in 0..n {
                if self.source.leq(i, j) != self.target.leq(self.table[i], self.table[j]) {
                    return false;
                }
            }
        }
        true
    }

    /// Inverse of an order-isomorphism.
    pub fn inverse(&self) -> Result<BaseMap> {
        if !self.is_order_iso() {
            return Err(Error::NotIsomorphism {
                detail: "base map is not an order-isomorphism".into(),
            });
        }
        let mut table = vec![0; self.table.len()];
        for (i, &t) in self.table.iter().enumerate() {
            table[t] = i;
        }
        BaseMap::new(self.target.clone(), self.source.clone(), table)
    }

    /// g ∘ f (f applied first).
    pub fn compose(g: &BaseMap, f: &BaseMap) -> Result<BaseMap> {
        if *f.target != *g.source {
            return Err(Error::NotComposable {
                detail: "base maps do not share the middle poset".into(),
            });
        }
        let table = f.table.iter().map(|&i| g.table[i]).collect();
        BaseMap::new(f.source.clone(), g.target.clone(), table)
    }
}

impl fmt::Debug for BaseMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BaseMap{:?}", self.table)
    }
}

/// The image context φ(C): atoms are the minimal nonzero products of the
/// images of C's atoms (images of atoms are commuting projections).
fn image_context(h: &UnitalStarHom, c: &Context) -> Result<Context> {
    let images: Vec<_> = c
        .atoms()
        .iter()
        .map(|a| h.apply(a))
        .collect::<Result<_>>()?;
    Context::from_projections(h.target().clone(), &images)
}

/// The base map C ↦ φ(C) induced by a verified homomorphism. Every image
/// context must already be present in the target poset.
pub fn induce_base_map(
    h: &UnitalStarHom,
    source_poset: &Arc<ContextPoset>,
    target_poset: &Arc<ContextPoset>,
) -> Result<BaseMap> {
    if source_poset.algebra() != h.source() || target_poset.algebra() != h.target() {
        return Err(Error::AlgebraMismatch {
            left: format!("{} -> {}", h.source(), h.target()),
            right: format!("{} -> {}", source_poset.algebra(), target_poset.algebra()),
        });
    }
    let mut table = Vec::with_capacity(source_poset.len());
    for c in source_poset.contexts() {
        let img = image_context(h, c)?;
        match target_poset.index_of(&img) {
            Some(idx) => table.push(idx),
            None => {
                return Err(Error::ImageContextMissing {
                    detail: format!("image of {c:?} under {h:?}"),
                })
            }
        }
    }
    BaseMap::new(source_poset.clone(), target_poset.clone(), table)
}

/// A morphism of spectral presheaves Σ_B → Σ_A: a base map γ: C(A) → C(B)
/// together with, for each C in C(A), a component sending characters of
/// Σ_B at γ(C) to characters of Σ_A at C. Naturality is verified at
/// construction.
#[derive(Clone)]
pub struct PresheafMorphism {
    /// Σ_B, the presheaf the arrow maps from. Its poset is `base.target()`.
    domain: Arc<SpectralPresheaf>,
    /// Σ_A, the presheaf the arrow maps to. Its poset is `base.source()`.
    codomain: Arc<SpectralPresheaf>,
    base: BaseMap,
    /// components[i]: characters of domain at base(i) → characters of
    /// codomain at i.
    components: Vec<Vec<usize>>,
}

impl PartialEq for PresheafMorphism {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base && self.components == other.components
    }
}
impl Eq for PresheafMorphism {}

impl PresheafMorphism {
    pub fn new(
        domain: Arc<SpectralPresheaf>,
        codomain: Arc<SpectralPresheaf>,
        base: BaseMap,
        components: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if *base.source() != *codomain.poset() || *base.target() != *domain.poset() {
            return Err(Error::Invariant {
                detail: "base map does not connect the presheaf posets".into(),
            });
        }
        let m = Self { domain, codomain, base, components };
        m.check_shapes()?;
        m.check_naturality()?;
        Ok(m)
    }

    fn check_shapes(&self) -> Result<()> {
        let n = self.codomain.poset().len();
        if self.components.len() != n {
            return Err(Error::Invariant {
                detail: "one component per codomain context required".into(),
            });
        }
        for (i, comp) in self.components.iter().enumerate() {
            let from = self.domain.component_size(self.base.apply(i));
            let to = self.codomain.component_size(i);
            if comp.len() != from || comp.iter().any(|&v| v >= to) {
                return Err(Error::Invariant {
                    detail: format!("component {i} has wrong shape"),
                });
            }
        }
        Ok(())
    }

    /// Naturality: for C' ≤ C, restricting after mapping equals mapping
    /// after restricting, exhaustively over stored order pairs and
    /// characters.
    pub fn check_naturality(&self) -> Result<()> {
        let poset_a = self.codomain.poset();
        for lower in 0..poset_a.len() {
            for upper in 0..poset_a.len() {
                if !poset_a.leq(lower, upper) {
                    continue;
                }
                let r_a = self
                    .codomain
                    .restriction(lower, upper)
                    .expect("stored order pair");
                let (gl, gu) = (self.base.apply(lower), self.base.apply(upper));
                let r_b = self
                    .domain
                    .restriction(gl, gu)
                    .expect("base map is monotone");
                for ch in 0..self.domain.component_size(gu) {
                    let via_a = r_a[self.components[upper][ch]];
                    let via_b = self.components[lower][r_b[ch]];
                    if via_a != via_b {
                        return Err(Error::Invariant {
                            detail: format!(
                                "naturality fails at {lower} ≤ {upper}, character {ch}"
                            ),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn identity(sigma: Arc<SpectralPresheaf>) -> Self {
        let base = BaseMap::identity(sigma.poset().clone());
        let components = (0..sigma.poset().len())
            .map(|i| (0..sigma.component_size(i)).collect())
            .collect();
        Self {
            domain: sigma.clone(),
            codomain: sigma,
            base,
            components,
        }
    }

    /// The canonical morphism Σ_B → Σ_A induced by a verified hom φ: A → B.
    /// The component at C sends the character at an atom b of φ(C) to the
    /// unique atom a of C with φ(a) ≥ b (precomposition with φ|_C).
    pub fn induce(
        h: &UnitalStarHom,
        sigma_a: &Arc<SpectralPresheaf>,
        sigma_b: &Arc<SpectralPresheaf>,
    ) -> Result<Self> {
        let base = induce_base_map(h, sigma_a.poset(), sigma_b.poset())?;
        let poset_a = sigma_a.poset();
        let poset_b = sigma_b.poset();
        let mut components = Vec::with_capacity(poset_a.len());
        for (i, c) in poset_a.contexts().iter().enumerate() {
            let img = poset_b.context(base.apply(i));
            let mut table = Vec::with_capacity(img.atom_count());
            for (bi, b_atom) in img.atoms().iter().enumerate() {
                let mut found = None;
                for (ai, a_atom) in c.atoms().iter().enumerate() {
                    let image = h.apply(a_atom)?;
                    if image.mul(b_atom)? == *b_atom {
                        if found.is_some() {
                            return Err(Error::Invariant {
                                detail: format!(
                                    "character {bi} of image context {i} precomposes ambiguously"
                                ),
                            });
                        }
                        found = Some(ai);
                    }
                }
                table.push(found.ok_or_else(|| Error::Invariant {
                    detail: format!("character {bi} of image context {i} has no precomposition"),
                })?);
            }
            components.push(table);
        }
        Self::new(sigma_b.clone(), sigma_a.clone(), base, components)
    }

    pub fn domain(&self) -> &Arc<SpectralPresheaf> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<SpectralPresheaf> {
        &self.codomain
    }

    pub fn base(&self) -> &BaseMap {
        &self.base
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    /// outer ∘ inner (inner applied first): bases compose the other way
    /// round, and the composite component at J is
    /// outerⱼ ∘ inner_{base_outer(J)}.
    pub fn compose(outer: &PresheafMorphism, inner: &PresheafMorphism) -> Result<PresheafMorphism> {
        if inner.codomain.poset().as_ref() != outer.domain.poset().as_ref() {
            return Err(Error::NotComposable {
                detail: "presheaf morphisms do not share the middle presheaf".into(),
            });
        }
        let base = BaseMap::compose(inner.base(), outer.base())?;
        let components = (0..outer.codomain.poset().len())
            .map(|j| {
                let mid = outer.base.apply(j);
                inner.components[mid]
                    .iter()
                    .map(|&ch| outer.components[j][ch])
                    .collect()
            })
            .collect();
        Self::new(inner.domain.clone(), outer.codomain.clone(), base, components)
    }

    /// Base map is an order-isomorphism and every component is a bijection.
    pub fn is_isomorphism(&self) -> bool {
        if !self.base.is_order_iso() {
            return false;
        }
        self.components.iter().enumerate().all(|(i, comp)| {
            let to = self.codomain.component_size(i);
            if comp.len() != to {
                return false;
            }
            let mut seen = vec![false; to];
            for &v in comp {
                if seen[v] {
                    return false;
                }
                seen[v] = true;
            }
            true
        })
    }

    /// Inverse of an isomorphism.
    pub fn inverse(&self) -> Result<PresheafMorphism> {
        if !self.is_isomorphism() {
            return Err(Error::NotIsomorphism {
                detail: "presheaf morphism is not an isomorphism".into(),
            });
        }
        let base_inv = self.base.inverse()?;
        // Component of the inverse at D (context of the domain poset):
        // invert the component at γ⁻¹(D).
        let n = self.domain.poset().len();
        let mut components = Vec::with_capacity(n);
        for d in 0..n {
            let i = base_inv.apply(d);
            debug_assert_eq!(self.base.apply(i), d);
            let fwd = &self.components[i];
            let mut inv = vec![0; fwd.len()];
            for (ch, &v) in fwd.iter().enumerate() {
                inv[v] = ch;
            }
            components.push(inv);
        }
        Self::new(self.codomain.clone(), self.domain.clone(), base_inv, components)
    }
}

impl fmt::Debug for PresheafMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "PresheafMorphism(base {:?}, components {:?})",
            self.base.table, self.components
        )
    }
}

/// A morphism of tautological copresheaves (the Bohrification direction):
/// the base map goes the same way as the algebra morphism, and the component
/// at C is the abelian-algebra map C → γ(C), stored atomwise: entry b of
/// `components[i]` names the atom a of C whose image contains atom b of γ(C).
#[derive(Clone)]
pub struct CopresheafMorphism {
    base: BaseMap,
    components: Vec<Vec<usize>>,
}

impl PartialEq for CopresheafMorphism {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base && self.components == other.components
    }
}
impl Eq for CopresheafMorphism {}

impl CopresheafMorphism {
    /// Builds the induced morphism: the component at C is φ|_C, computed by
    /// decomposing each φ(atom) as an exact subset-sum of image atoms.
    pub fn induce(
        h: &UnitalStarHom,
        source_poset: &Arc<ContextPoset>,
        target_poset: &Arc<ContextPoset>,
    ) -> Result<Self> {
        let base = induce_base_map(h, source_poset, target_poset)?;
        let mut components = Vec::with_capacity(source_poset.len());
        for (i, c) in source_poset.contexts().iter().enumerate() {
            let img = target_poset.context(base.apply(i));
            let mut table = vec![usize::MAX; img.atom_count()];
            for (ai, atom) in c.atoms().iter().enumerate() {
                let image = h.apply(atom)?;
                let mask = img.as_subset_sum(&image)?.ok_or_else(|| Error::Invariant {
                    detail: format!("image of atom {ai} is not a sum of image-context atoms"),
                })?;
                for (bi, slot) in table.iter_mut().enumerate() {
                    if mask & (1 << bi) != 0 {
                        if *slot != usize::MAX {
                            return Err(Error::Invariant {
                                detail: format!("atom images overlap at image atom {bi}"),
                            });
                        }
                        *slot = ai;
                    }
                }
            }
            if table.contains(&usize::MAX) {
                return Err(Error::Invariant {
                    detail: "atom images do not cover the image context".into(),
                });
            }
            components.push(table);
        }
        let m = Self { base, components };
        m.check_naturality()?;
        Ok(m)
    }

    pub fn identity(poset: Arc<ContextPoset>) -> Self {
        let components = poset
            .contexts()
            .iter()
            .map(|c| (0..c.atom_count()).collect())
            .collect();
        Self { base: BaseMap::identity(poset), components }
    }

    pub fn base(&self) -> &BaseMap {
        &self.base
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    /// The image of `atom_idx` of source context `i` as an element of the
    /// image context, reconstructed from the stored table.
    fn atom_image(&self, i: usize, atom_idx: usize) -> Result<crate::matrix::BlockMatrix> {
        let img = self.base.target().context(self.base.apply(i));
        let mut acc = self.base.target().algebra().zero();
        for (bi, &a) in self.components[i].iter().enumerate() {
            if a == atom_idx {
                acc = acc.add(&img.atoms()[bi])?;
            }
        }
        Ok(acc)
    }

    /// Covariant naturality at the element level: for C' ≤ C, applying the
    /// component at C to an atom of C' (a sum of atoms of C) agrees with the
    /// component at C'.
    pub fn check_naturality(&self) -> Result<()> {
        let poset = self.base.source();
        for lower in 0..poset.len() {
            for upper in 0..poset.len() {
                if !poset.leq(lower, upper) {
                    continue;
                }
                let lower_ctx = poset.context(lower);
                let upper_ctx = poset.context(upper);
                for (ai, atom) in lower_ctx.atoms().iter().enumerate() {
                    let via_lower = self.atom_image(lower, ai)?;
                    // Decompose the atom in the upper context and push each
                    // summand through the upper component.
                    let mask = upper_ctx.as_subset_sum(atom)?.ok_or_else(|| {
                        Error::Invariant {
                            detail: "order pair without subset-sum decomposition".into(),
                        }
                    })?;
                    let mut via_upper = self.base.target().algebra().zero();
                    for (ui, _) in upper_ctx.atoms().iter().enumerate() {
                        if mask & (1 << ui) != 0 {
                            via_upper = via_upper.add(&self.atom_image(upper, ui)?)?;
                        }
                    }
                    if via_lower != via_upper {
                        return Err(Error::Invariant {
                            detail: format!(
                                "covariant naturality fails at {lower} ≤ {upper}, atom {ai}"
                            ),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// outer ∘ inner (inner applied first), covariant:
    /// the composite component at J is outer_{base_inner(J)} ∘ innerⱼ.
    pub fn compose(outer: &CopresheafMorphism, inner: &CopresheafMorphism) -> Result<CopresheafMorphism> {
        if *inner.base.target() != *outer.base.source() {
            return Err(Error::NotComposable {
                detail: "copresheaf morphisms do not share the middle poset".into(),
            });
        }
        let base = BaseMap::compose(outer.base(), inner.base())?;
        let components = (0..inner.base.source().len())
            .map(|j| {
                let mid = inner.base.apply(j);
                outer.components[mid]
                    .iter()
                    .map(|&b| inner.components[j][b])
                    .collect()
            })
            .collect();
        Ok(Self { base, components })
    }

    /// Componentwise Gelfand duality: the spectrum map dual to the algebra
    /// map C → γ(C) is, atom for atom, the same table. Returns the tables in
    /// presheaf-component orientation.
    pub fn gelfand_dual_components(&self) -> Vec<Vec<usize>> {
        self.components.clone()
    }
}

impl fmt::Debug for CopresheafMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "CopresheafMorphism(base {:?}, components {:?})",
            self.base.table, self.components
        )
    }
}

/// One line of a functoriality or verification report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckEntry {
    pub name: String,
    /// The mathematical statement this check instantiates.
    pub statement: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct CheckReport {
    pub entries: Vec<CheckEntry>,
}

impl CheckReport {
    pub fn push(&mut self, name: impl Into<String>, statement: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.entries.push(CheckEntry {
            name: name.into(),
            statement: statement.into(),
            pass,
            detail: detail.into(),
        });
    }

    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }
}

/// A homomorphism together with the spectral presheaves of its endpoint
/// algebras, over pre-closed posets.
pub struct FunctorCheckItem {
    pub hom: UnitalStarHom,
    pub source_sigma: Arc<SpectralPresheaf>,
    pub target_sigma: Arc<SpectralPresheaf>,
}

/// Verifies that the spectrum assignment is a contravariant functor on the
/// supplied arrows: identities map to identities and composites flip order,
/// table-exactly.
pub fn functor_s_check(items: &[FunctorCheckItem]) -> Result<CheckReport> {
    let mut report = CheckReport::default();
    let statement = "contravariant spectrum functor";
    for (k, item) in items.iter().enumerate() {
        let induced = PresheafMorphism::induce(&item.hom, &item.source_sigma, &item.target_sigma)?;
        report.push(
            format!("S(hom {k}) well-defined"),
            statement,
            true,
            format!("{} -> {}", item.hom.source(), item.hom.target()),
        );
        if item.hom.source() == item.hom.target()
            && item.hom == UnitalStarHom::identity(item.hom.source().clone())
        {
            let id = PresheafMorphism::identity(item.source_sigma.clone());
            report.push(
                format!("S(id) = id (hom {k})"),
                statement,
                induced == id,
                String::new(),
            );
        }
    }
    for (i, f) in items.iter().enumerate() {
        for (j, g) in items.iter().enumerate() {
            if f.hom.target() != g.hom.source()
                || f.target_sigma.poset().as_ref() != g.source_sigma.poset().as_ref()
            {
                continue;
            }
            let gf = UnitalStarHom::compose(&g.hom, &f.hom)?;
            let s_gf = PresheafMorphism::induce(&gf, &f.source_sigma, &g.target_sigma)?;
            let s_f = PresheafMorphism::induce(&f.hom, &f.source_sigma, &f.target_sigma)?;
            let s_g = PresheafMorphism::induce(&g.hom, &g.source_sigma, &g.target_sigma)?;
            let composed = PresheafMorphism::compose(&s_f, &s_g)?;
            report.push(
                format!("S(g∘f) = S(f)∘S(g) for pair ({i}, {j})"),
                statement,
                s_gf == composed,
                format!(
                    "{} -> {} -> {}",
                    f.hom.source(),
                    f.hom.target(),
                    g.hom.target()
                ),
            );
        }
    }
    Ok(report)
}

/// Verifies that the tautological-copresheaf assignment is a covariant
/// functor on the supplied arrows, that each component is the restriction of
/// the hom, and that componentwise duality reproduces the spectrum
/// morphism's tables.
pub fn functor_b_check(items: &[FunctorCheckItem]) -> Result<CheckReport> {
    let mut report = CheckReport::default();
    let statement = "covariant tautological-copresheaf functor";
    for (k, item) in items.iter().enumerate() {
        let induced = CopresheafMorphism::induce(
            &item.hom,
            item.source_sigma.poset(),
            item.target_sigma.poset(),
        )?;
        report.push(
            format!("B(hom {k}) well-defined"),
            statement,
            true,
            format!("{} -> {}", item.hom.source(), item.hom.target()),
        );
        // Component check: for each context, the stored component applied to
        // each atom reproduces the hom's matrix image.
        let mut component_ok = true;
        'outer: for (i, c) in item.source_sigma.poset().contexts().iter().enumerate() {
            for (ai, atom) in c.atoms().iter().enumerate() {
                let via_table = induced.atom_image(i, ai)?;
                let via_hom = item.hom.apply(atom)?;
                if via_table != via_hom {
                    component_ok = false;
                    break 'outer;
                }
            }
        }
        report.push(
            format!("B(hom {k}) components equal the hom restricted to each context"),
            statement,
            component_ok,
            String::new(),
        );
        // Local duality consistency: dualizing B's components gives S's.
        let s = PresheafMorphism::induce(&item.hom, &item.source_sigma, &item.target_sigma)?;
        report.push(
            format!("duality: Gelfand dual of B(hom {k}) components equals S(hom {k}) components"),
            "local duality",
            induced.gelfand_dual_components() == s.components(),
            String::new(),
        );
        if item.hom.source() == item.hom.target()
            && item.hom == UnitalStarHom::identity(item.hom.source().clone())
        {
            let id = CopresheafMorphism::identity(item.source_sigma.poset().clone());
            report.push(
                format!("B(id) = id (hom {k})"),
                statement,
                induced == id,
                String::new(),
            );
        }
    }
    for (i, f) in items.iter().enumerate() {
        for (j, g) in items.iter().enumerate() {
            if f.hom.target() != g.hom.source()
                || f.target_sigma.poset().as_ref() != g.source_sigma.poset().as_ref()
            {
                continue;
            }
            let gf = UnitalStarHom::compose(&g.hom, &f.hom)?;
            let b_gf =
                CopresheafMorphism::induce(&gf, f.source_sigma.poset(), g.target_sigma.poset())?;
            let b_f =
                CopresheafMorphism::induce(&f.hom, f.source_sigma.poset(), f.target_sigma.poset())?;
            let b_g =
                CopresheafMorphism::induce(&g.hom, g.source_sigma.poset(), g.target_sigma.poset())?;
            let composed = CopresheafMorphism::compose(&b_g, &b_f)?;
            report.push(
                format!("B(g∘f) = B(g)∘B(f) for pair ({i}, {j})"),
                statement,
                b_gf == composed,
                format!(
                    "{} -> {} -> {}",
                    f.hom.source(),
                    f.hom.target(),
                    g.hom.target()
                ),
            );
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::StarAlgebra;
    use crate::poset::Limits;

    fn sigma_cn(n: usize) -> Arc<SpectralPresheaf> {
        let poset = ContextPoset::full_abelian(n, &Limits::default()).unwrap();
        Arc::new(SpectralPresheaf::build(Arc::new(poset)).unwrap())
    }

    #[test]
    fn identity_hom_induces_identity_base_map() {
        let sigma = sigma_cn(3);
        let id = UnitalStarHom::identity(StarAlgebra::abelian(3));
        let base = induce_base_map(&id, sigma.poset(), sigma.poset()).unwrap();
        assert_eq!(base, BaseMap::identity(sigma.poset().clone()));
    }

    #[test]
    fn diagonal_embedding_base_map() {
        // (a,b) -> (a,a,b) sends the top of C(ℂ²) to the context {{1,2},{3}}.
        let sigma2 = sigma_cn(2);
        let sigma3 = sigma_cn(3);
        let h = UnitalStarHom::abelian_from_coordinate_map(2, &[0, 0, 1]).unwrap();
        let base = induce_base_map(&h, sigma2.poset(), sigma3.poset()).unwrap();
        let p2 = sigma2.poset();
        let p3 = sigma3.poset();
        let top2 = p2
            .contexts()
            .iter()
            .position(|c| c.atom_count() == 2)
            .unwrap();
        let image = p3.context(base.apply(top2));
        assert_eq!(image.atom_count(), 2);
        // Trivial goes to trivial.
        assert!(p3.context(base.apply(p2.trivial_index())).is_trivial());
        // Image atoms are e1+e2 and e3.
        use crate::matrix::BlockMatrix;
        use crate::scalar::GaussianRational as G;
        let e12 = BlockMatrix::diagonal(
            p3.algebra().shape(),
            &[G::one(), G::one(), G::zero()],
        )
        .unwrap();
        assert!(image.atoms().contains(&e12));
    }

    #[test]
    fn identity_hom_induces_identity_morphism() {
        let sigma = sigma_cn(3);
        let id = UnitalStarHom::identity(StarAlgebra::abelian(3));
        let m = PresheafMorphism::induce(&id, &sigma, &sigma).unwrap();
        assert_eq!(m, PresheafMorphism::identity(sigma.clone()));
        assert!(m.is_isomorphism());
    }

    #[test]
    fn precomposition_on_characters() {
        // (a,b) -> (a,a,b): at the top context of C(ℂ²), the character at
        // the image atom e3 pulls back to the atom e2, and at e1+e2 to e1.
        let sigma2 = sigma_cn(2);
        let sigma3 = sigma_cn(3);
        let h = UnitalStarHom::abelian_from_coordinate_map(2, &[0, 0, 1]).unwrap();
        let m = PresheafMorphism::induce(&h, &sigma2, &sigma3).unwrap();
        let p2 = sigma2.poset();
        let p3 = sigma3.poset();
        let top2 = p2
            .contexts()
            .iter()
            .position(|c| c.atom_count() == 2)
            .unwrap();
        let img_idx = m.base().apply(top2);
        let img = p3.context(img_idx);
        use crate::matrix::BlockMatrix;
        use crate::scalar::GaussianRational as G;
        let e3 = BlockMatrix::diagonal(p3.algebra().shape(), &[G::zero(), G::zero(), G::one()])
            .unwrap();
        let e1 = BlockMatrix::diagonal(p2.algebra().shape(), &[G::one(), G::zero()]).unwrap();
        let e2 = BlockMatrix::diagonal(p2.algebra().shape(), &[G::zero(), G::one()]).unwrap();
        let pos_e3 = img.atoms().iter().position(|a| *a == e3).unwrap();
        let pulled = m.components()[top2][pos_e3];
        assert_eq!(p2.context(top2).atoms()[pulled], e2);
        let pos_e12 = (0..img.atom_count()).find(|&i| i != pos_e3).unwrap();
        let pulled2 = m.components()[top2][pos_e12];
        assert_eq!(p2.context(top2).atoms()[pulled2], e1);
    }

    #[test]
    fn compose_with_identity() {
        let sigma2 = sigma_cn(2);
        let sigma3 = sigma_cn(3);
        let h = UnitalStarHom::abelian_from_coordinate_map(2, &[0, 0, 1]).unwrap();
        let m = PresheafMorphism::induce(&h, &sigma2, &sigma3).unwrap();
        let id_b = PresheafMorphism::identity(sigma3.clone());
        let id_a = PresheafMorphism::identity(sigma2.clone());
        assert_eq!(PresheafMorphism::compose(&m, &id_b).unwrap(), m);
        assert_eq!(PresheafMorphism::compose(&id_a, &m).unwrap(), m);
    }

    #[test]
    fn contravariant_composition() {
        // S(ψ∘φ) = S(φ)∘S(ψ) for φ: ℂ²→ℂ³, ψ: ℂ³→ℂ⁴.
        let sigma2 = sigma_cn(2);
        let sigma3 = sigma_cn(3);
        let sigma4 = sigma_cn(4);
        let phi = UnitalStarHom::abelian_from_coordinate_map(2, &[0, 0, 1]).unwrap();
        let psi = UnitalStarHom::abelian_from_coordinate_map(3, &[0, 1, 2, 2]).unwrap();
        let psiphi = UnitalStarHom::compose(&psi, &phi).unwrap();
        let s_phi = PresheafMorphism::induce(&phi, &sigma2, &sigma3).unwrap();
        let s_psi = PresheafMorphism::induce(&psi, &sigma3, &sigma4).unwrap();
        let s_both = PresheafMorphism::induce(&psiphi, &sigma2, &sigma4).unwrap();
        assert_eq!(PresheafMorphism::compose(&s_phi, &s_psi).unwrap(), s_both);
    }

    #[test]
    fn collapse_hom_is_not_isomorphism() {
        // (a,b,c) -> (a,b) collapses; the base map is not an order-iso.
        let sigma3 = sigma_cn(3);
        let sigma2 = sigma_cn(2);
        let h = UnitalStarHom::abelian_from_coordinate_map(3, &[0, 1]).unwrap();
        let m = PresheafMorphism::induce(&h, &sigma3, &sigma2).unwrap();
        assert!(!m.is_isomorphism());
    }

    #[test]
    fn automorphism_induces_isomorphism() {
        let sigma3 = sigma_cn(3);
        let swap = UnitalStarHom::abelian_from_coordinate_map(3, &[1, 0, 2]).unwrap();
        let m = PresheafMorphism::induce(&swap, &sigma3, &sigma3).unwrap();
        assert!(m.is_isomorphism());
        let inv = m.inverse().unwrap();
        assert_eq!(
            PresheafMorphism::compose(&m, &inv).unwrap(),
            PresheafMorphism::identity(sigma3.clone())
        );
    }

    #[test]
    fn functor_checks_pass_on_chain() {
        let sigma2 = sigma_cn(2);
        let sigma3 = sigma_cn(3);
        let sigma4 = sigma_cn(4);
        let phi = UnitalStarHom::abelian_from_coordinate_map(2, &[0, 0, 1]).unwrap();
        let psi = UnitalStarHom::abelian_from_coordinate_map(3, &[0, 1, 2, 2]).unwrap();
        let items = vec![
            FunctorCheckItem {
                hom: UnitalStarHom::identity(StarAlgebra::abelian(2)),
                source_sigma: sigma2.clone(),
                target_sigma: sigma2.clone(),
            },
            FunctorCheckItem {
                hom: phi,
                source_sigma: sigma2.clone(),
                target_sigma: sigma3.clone(),
            },
            FunctorCheckItem {
                hom: psi,
                source_sigma: sigma3.clone(),
                target_sigma: sigma4.clone(),
            },
        ];
        let s_report = functor_s_check(&items).unwrap();
        assert!(s_report.all_passed(), "{:?}", s_report);
        let b_report = functor_b_check(&items).unwrap();
        assert!(b_report.all_passed(), "{:?}", b_report);
    }

    #[test]
    fn involution_squares_to_identity() {
        let sigma2 = sigma_cn(2);
        let swap = UnitalStarHom::abelian_from_coordinate_map(2, &[1, 0]).unwrap();
        let s = PresheafMorphism::induce(&swap, &sigma2, &sigma2).unwrap();
        let square = PresheafMorphism::compose(&s, &s).unwrap();
        assert_eq!(square, PresheafMorphism::identity(sigma2.clone()));
    }

    #[test]
    fn missing_image_context_errors() {
        // Target poset lacking the image context must fail loudly.
        let sigma2 = sigma_cn(2);
        let h = UnitalStarHom::abelian_from_coordinate_map(2, &[0, 0, 1]).unwrap();
        let bare = Arc::new(
            ContextPoset::closure(StarAlgebra::abelian(3), &[], &Limits::default()).unwrap(),
        );
        let err = induce_base_map(&h, sigma2.poset(), &bare);
        assert!(matches!(err, Err(Error::ImageContextMissing { .. })));
    }
}
