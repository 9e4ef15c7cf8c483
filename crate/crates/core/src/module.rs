//! Persistence modules as commutative representations of the Hasse quiver,
//! and morphisms between them.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{Fp, Mat};
use crate::poset::{hook_support, ElemSet, Poset, Spread, SubPoset};

struct ModuleData {
    poset: Arc<Poset>,
    field: Fp,
    dims: Vec<usize>,
    cover_maps: Vec<Mat>,
    /// `along[a * n + b]` is `M(a, b)` for `a <= b`.
    along: Vec<Option<Mat>>,
    /// Set when the module was built as a spread module.
    spread: Option<Spread>,
}

/// A validated persistence module. Cloning is cheap; the data is shared.
#[derive(Clone)]
pub struct PersistenceModule(Arc<ModuleData>);

impl fmt::Debug for PersistenceModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PersistenceModule")
            .field("dims", &self.0.dims)
            .field("cover_maps", &self.0.cover_maps)
            .finish()
    }
}

impl PersistenceModule {
    /// Validates shapes and commutativity. For every `a < b` all cover paths
    /// from `a` to `b` must compose to the same matrix; this is checked by
    /// comparing, for each pair, the composites through every upper cover of
    /// `a`, which by induction covers all paths.
    pub fn new(
        poset: Arc<Poset>,
        field: Fp,
        dims: Vec<usize>,
        cover_maps: Vec<Mat>,
    ) -> Result<Self> {
        Self::build(poset, field, dims, cover_maps, None)
    }

    fn build(
        poset: Arc<Poset>,
        field: Fp,
        dims: Vec<usize>,
        cover_maps: Vec<Mat>,
        spread: Option<Spread>,
    ) -> Result<Self> {
        let n = poset.len();
        if dims.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "{} dimensions for {} elements",
                dims.len(),
                n
            )));
        }
        if cover_maps.len() != poset.covers().len() {
            return Err(Error::ShapeMismatch(format!(
                "{} maps for {} covers",
                cover_maps.len(),
                poset.covers().len()
            )));
        }
        for (ci, &(a, b)) in poset.covers().iter().enumerate() {
            let m = &cover_maps[ci];
            if m.field() != field {
                return Err(Error::PosetMismatch);
            }
            if m.shape() != (dims[b], dims[a]) {
                return Err(Error::ShapeMismatch(format!(
                    "map {} -> {} is {}x{}, expected {}x{}",
                    poset.label(a),
                    poset.label(b),
                    m.rows(),
                    m.cols(),
                    dims[b],
                    dims[a]
                )));
            }
        }

        let mut along: Vec<Option<Mat>> = vec![None; n * n];
        for &a in poset.topo_order().iter().rev() {
            along[a * n + a] = Some(Mat::identity(field, dims[a]));
            for &b in poset.topo_order() {
                if b == a || !poset.leq(a, b) {
                    continue;
                }
                let mut value: Option<Mat> = None;
                for &ci in poset.upper_covers(a) {
                    let c = poset.covers()[ci].1;
                    if !poset.leq(c, b) {
                        continue;
                    }
                    let via = along[c * n + b]
                        .as_ref()
                        .expect("upper elements are processed first")
                        .mul(&cover_maps[ci]);
                    match &value {
                        None => value = Some(via),
                        Some(v) if *v != via => {
                            return Err(Error::NotCommutative(
                                poset.label(a).to_string(),
                                poset.label(b).to_string(),
                            ))
                        }
                        Some(_) => {}
                    }
                }
                along[a * n + b] = value;
            }
        }

        Ok(PersistenceModule(Arc::new(ModuleData {
            poset,
            field,
            dims,
            cover_maps,
            along,
            spread,
        })))
    }

    /// Builds a module from maps given per cover as `(a, b, matrix)`; covers
    /// left out get the zero map.
    pub fn from_cover_list(
        poset: Arc<Poset>,
        field: Fp,
        dims: Vec<usize>,
        maps: &[(usize, usize, Mat)],
    ) -> Result<Self> {
        if dims.len() != poset.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} dimensions for {} elements",
                dims.len(),
                poset.len()
            )));
        }
        let mut cover_maps: Vec<Mat> = poset
            .covers()
            .iter()
            .map(|&(a, b)| Mat::zeros(field, dims[b], dims[a]))
            .collect();
        for (a, b, m) in maps {
            let ci = poset.cover_index(*a, *b).ok_or_else(|| {
                Error::ShapeMismatch(format!(
                    "{} -> {} is not a cover",
                    poset.label(*a),
                    poset.label(*b)
                ))
            })?;
            cover_maps[ci] = m.clone();
        }
        Self::new(poset, field, dims, cover_maps)
    }

    pub fn zero(poset: Arc<Poset>, field: Fp) -> Self {
        let n = poset.len();
        let maps = poset
            .covers()
            .iter()
            .map(|_| Mat::zeros(field, 0, 0))
            .collect();
        Self::new(poset, field, vec![0; n], maps).expect("zero module is valid")
    }

    /// The thin module with `K` on the support and identities inside it.
    pub fn spread_module(poset: Arc<Poset>, field: Fp, s: &Spread) -> Self {
        Self::thin(poset, field, s.support(), Some(*s))
    }

    fn thin(poset: Arc<Poset>, field: Fp, support: ElemSet, spread: Option<Spread>) -> Self {
        let dims: Vec<usize> = (0..poset.len())
            .map(|x| usize::from(support.contains(x)))
            .collect();
        let maps = poset
            .covers()
            .iter()
            .map(|&(a, b)| {
                let mut m = Mat::zeros(field, dims[b], dims[a]);
                if dims[a] == 1 && dims[b] == 1 {
                    m.set(0, 0, 1);
                }
                m
            })
            .collect();
        Self::build(poset, field, dims, maps, spread).expect("thin modules on convex sets commute")
    }

    /// Hook module `<a, b<`; `b = None` gives the projective at `a`.
    pub fn hook_module(poset: Arc<Poset>, field: Fp, a: usize, b: Option<usize>) -> Result<Self> {
        let support = hook_support(&poset, a, b)?;
        let s = Spread::from_convex(&poset, support)?;
        Ok(Self::spread_module(poset, field, &s))
    }

    pub fn projective(poset: Arc<Poset>, field: Fp, a: usize) -> Self {
        let s = Spread::principal_upset(&poset, a);
        Self::spread_module(poset, field, &s)
    }

    pub fn simple(poset: Arc<Poset>, field: Fp, a: usize) -> Self {
        Self::spread_module(poset, field, &Spread::point(a))
    }

    pub fn injective(poset: Arc<Poset>, field: Fp, a: usize) -> Self {
        let s = Spread::from_convex(&poset, poset.down_set(a)).expect("downsets are convex");
        Self::spread_module(poset, field, &s)
    }

    /// Block-diagonal sum. An empty list is rejected since it has no poset.
    pub fn direct_sum(ms: &[PersistenceModule]) -> Result<Self> {
        let first = ms.first().ok_or(Error::PosetMismatch)?;
        for m in ms {
            if !first.same_base(m) {
                return Err(Error::PosetMismatch);
            }
        }
        if ms.len() == 1 {
            return Ok(first.clone());
        }
        let poset = first.poset_arc();
        let field = first.field();
        let n = poset.len();
        let dims = (0..n).map(|x| ms.iter().map(|m| m.dim(x)).sum()).collect();
        let maps = (0..poset.covers().len())
            .map(|ci| {
                let blocks: Vec<&Mat> = ms.iter().map(|m| &m.0.cover_maps[ci]).collect();
                Mat::block_diag(field, &blocks)
            })
            .collect();
        Self::new(poset, field, dims, maps)
    }

    pub fn poset(&self) -> &Poset {
        &self.0.poset
    }

    pub fn poset_arc(&self) -> Arc<Poset> {
        self.0.poset.clone()
    }

    pub fn field(&self) -> Fp {
        self.0.field
    }

    /// Same poset (by identity or structure) and same field.
    pub fn same_base(&self, other: &PersistenceModule) -> bool {
        self.field() == other.field()
            && (Arc::ptr_eq(&self.0.poset, &other.0.poset) || *self.0.poset == *other.0.poset)
    }

    pub fn dim(&self, x: usize) -> usize {
        self.0.dims[x]
    }

    pub fn dims(&self) -> &[usize] {
        &self.0.dims
    }

    pub fn total_dim(&self) -> usize {
        self.0.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    /// The spread this module was built from, if any.
    pub fn as_spread(&self) -> Option<&Spread> {
        self.0.spread.as_ref()
    }

    pub fn cover_map(&self, ci: usize) -> &Mat {
        &self.0.cover_maps[ci]
    }

    pub fn cover_maps(&self) -> &[Mat] {
        &self.0.cover_maps
    }

    /// `M(a, b)`, the composite along any cover path; identity when `a = b`.
    pub fn map_along(&self, a: usize, b: usize) -> Result<&Mat> {
        let n = self.poset().len();
        if a >= n || b >= n {
            return Err(Error::OutOfRange(a.max(b)));
        }
        self.0.along[a * n + b].as_ref().ok_or_else(|| {
            Error::NotComparable(
                self.poset().label(a).to_string(),
                self.poset().label(b).to_string(),
            )
        })
    }

    pub fn dimension_vector(&self) -> Vec<usize> {
        self.0.dims.clone()
    }

    /// `{x : M(x) != 0}`.
    pub fn support(&self) -> ElemSet {
        ElemSet::from_elems((0..self.poset().len()).filter(|&x| self.dim(x) > 0))
    }

    /// The diagram `M` restricted to a subposet.
    pub fn restrict(&self, sub: &SubPoset) -> Diagram {
        let elements: Vec<usize> = sub.elements.iter().collect();
        let dims = elements.iter().map(|&x| self.dim(x)).collect();
        let maps = sub
            .covers
            .iter()
            .map(|&(a, b)| ((a, b), self.map_along(a, b).expect("induced covers are comparable").clone()))
            .collect();
        Diagram {
            elements,
            dims,
            maps,
        }
    }
}

/// A module restricted to a subposet: dimensions and maps along the induced covers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagram {
    pub elements: Vec<usize>,
    pub dims: Vec<usize>,
    pub maps: Vec<((usize, usize), Mat)>,
}

/// A natural transformation `source -> target`, one matrix per element.
#[derive(Clone)]
pub struct Morphism {
    source: PersistenceModule,
    target: PersistenceModule,
    components: Vec<Mat>,
}

impl fmt::Debug for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Morphism")
            .field("components", &self.components)
            .finish()
    }
}

impl Morphism {
    /// Checks shapes and naturality along every cover.
    pub fn new(
        source: PersistenceModule,
        target: PersistenceModule,
        components: Vec<Mat>,
    ) -> Result<Self> {
        if !source.same_base(&target) {
            return Err(Error::PosetMismatch);
        }
        let p = source.poset();
        if components.len() != p.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} components for {} elements",
                components.len(),
                p.len()
            )));
        }
        for (x, c) in components.iter().enumerate() {
            if c.shape() != (target.dim(x), source.dim(x)) {
                return Err(Error::ShapeMismatch(format!(
                    "component at {} is {}x{}, expected {}x{}",
                    p.label(x),
                    c.rows(),
                    c.cols(),
                    target.dim(x),
                    source.dim(x)
                )));
            }
        }
        for (ci, &(a, b)) in p.covers().iter().enumerate() {
            let lhs = target.cover_map(ci).mul(&components[a]);
            let rhs = components[b].mul(source.cover_map(ci));
            if lhs != rhs {
                return Err(Error::NotNatural(
                    p.label(a).to_string(),
                    p.label(b).to_string(),
                ));
            }
        }
        Ok(Morphism {
            source,
            target,
            components,
        })
    }

    /// Skips the naturality check; for components produced by a solver.
    pub(crate) fn new_unchecked(
        source: PersistenceModule,
        target: PersistenceModule,
        components: Vec<Mat>,
    ) -> Self {
        debug_assert!(Morphism::new(source.clone(), target.clone(), components.clone()).is_ok());
        Morphism {
            source,
            target,
            components,
        }
    }

    pub fn zero(source: PersistenceModule, target: PersistenceModule) -> Self {
        let f = source.field();
        let components = (0..source.poset().len())
            .map(|x| Mat::zeros(f, target.dim(x), source.dim(x)))
            .collect();
        Morphism {
            source,
            target,
            components,
        }
    }

    pub fn identity(m: PersistenceModule) -> Self {
        let f = m.field();
        let components = (0..m.poset().len())
            .map(|x| Mat::identity(f, m.dim(x)))
            .collect();
        Morphism {
            source: m.clone(),
            target: m,
            components,
        }
    }

    pub fn source(&self) -> &PersistenceModule {
        &self.source
    }

    pub fn target(&self) -> &PersistenceModule {
        &self.target
    }

    pub fn component(&self, x: usize) -> &Mat {
        &self.components[x]
    }

    pub fn components(&self) -> &[Mat] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Mat::is_zero)
    }

    /// `self ∘ g`: first `g`, then `self`.
    pub fn after(&self, g: &Morphism) -> Result<Morphism> {
        if !g.target.same_base(&self.source) || g.target.dims() != self.source.dims() {
            return Err(Error::PosetMismatch);
        }
        let components = self
            .components
            .iter()
            .zip(&g.components)
            .map(|(a, b)| a.mul(b))
            .collect();
        Ok(Morphism {
            source: g.source.clone(),
            target: self.target.clone(),
            components,
        })
    }

    /// Pointwise surjective.
    pub fn is_epi(&self) -> bool {
        self.components
            .iter()
            .enumerate()
            .all(|(x, c)| c.rank() == self.target.dim(x))
    }

    /// Pointwise injective.
    pub fn is_mono(&self) -> bool {
        self.components
            .iter()
            .enumerate()
            .all(|(x, c)| c.rank() == self.source.dim(x))
    }

    /// Entries stacked element by element, each component column-major.
    /// This is the coordinate system of Hom-space computations.
    pub fn to_vector(&self) -> Vec<u32> {
        let mut v = Vec::new();
        for c in &self.components {
            for j in 0..c.cols() {
                for i in 0..c.rows() {
                    v.push(c.get(i, j));
                }
            }
        }
        v
    }

    /// Inverse of [`Morphism::to_vector`]; does not check naturality.
    pub(crate) fn from_vector(
        source: PersistenceModule,
        target: PersistenceModule,
        v: &[u32],
    ) -> Morphism {
        let f = source.field();
        let mut pos = 0;
        let components = (0..source.poset().len())
            .map(|x| {
                let mut c = Mat::zeros(f, target.dim(x), source.dim(x));
                for j in 0..c.cols() {
                    for i in 0..c.rows() {
                        c.set(i, j, v[pos]);
                        pos += 1;
                    }
                }
                c
            })
            .collect();
        Morphism {
            source,
            target,
            components,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    fn grid22() -> Arc<Poset> {
        Arc::new(gen::grid(2, 2, 0))
    }

    #[test]
    fn recvrk_module_accepted() {
        let p = grid22();
        let f = Fp::default();
        let i = |s: &str| p.index_of(s).unwrap();
        let m = PersistenceModule::from_cover_list(
            p.clone(),
            f,
            vec![2, 1, 1, 0],
            &[
                (i("00"), i("01"), Mat::from_rows(f, 2, &[vec![1, 0]])),
                (i("00"), i("10"), Mat::from_rows(f, 2, &[vec![0, 1]])),
            ],
        )
        .unwrap();
        let top = m.map_along(i("00"), i("11")).unwrap();
        assert_eq!(top.shape(), (0, 2));
        assert_eq!(m.dimension_vector(), vec![2, 1, 1, 0]);
    }

    #[test]
    fn non_commuting_square_rejected() {
        let p = grid22();
        let f = Fp::default();
        let i = |s: &str| p.index_of(s).unwrap();
        let one = Mat::identity(f, 1);
        let err = PersistenceModule::from_cover_list(
            p.clone(),
            f,
            vec![1, 1, 1, 1],
            &[
                (i("00"), i("01"), one.clone()),
                (i("00"), i("10"), one.clone()),
                (i("01"), i("11"), one.clone()),
                (i("10"), i("11"), Mat::zeros(f, 1, 1)),
            ],
        )
        .unwrap_err();
        assert_eq!(err, Error::NotCommutative("00".into(), "11".into()));
    }

    #[test]
    fn zero_module() {
        let m = PersistenceModule::zero(grid22(), Fp::default());
        assert!(m.is_zero());
    }

    #[test]
    fn shape_mismatch() {
        let p = grid22();
        let f = Fp::default();
        let err = PersistenceModule::from_cover_list(
            p.clone(),
            f,
            vec![1, 1, 0, 0],
            &[(0, 1, Mat::identity(f, 2))],
        )
        .unwrap_err();
        assert!(matches!(err, Error::ShapeMismatch(_)));
    }

    #[test]
    fn spread_modules() {
        let p = Arc::new(gen::chain(4));
        let f = Fp::default();
        let s = PersistenceModule::simple(p.clone(), f, 2);
        assert_eq!(s.dims(), &[0, 0, 1, 0]);
        let pr = PersistenceModule::projective(p.clone(), f, 1);
        assert_eq!(pr.dims(), &[0, 1, 1, 1]);
        let whole = PersistenceModule::spread_module(
            p.clone(),
            f,
            &Spread::from_convex(&p, p.all()).unwrap(),
        );
        for a in 0..4 {
            for b in a..4 {
                assert_eq!(whole.map_along(a, b).unwrap(), &Mat::identity(f, 1));
            }
        }
        let inj = PersistenceModule::injective(p, f, 1);
        assert_eq!(inj.dims(), &[1, 1, 0, 0]);
    }

    #[test]
    fn hook_modules() {
        let p = grid22();
        let f = Fp::default();
        let i = |s: &str| p.index_of(s).unwrap();
        let h = PersistenceModule::hook_module(p.clone(), f, i("00"), Some(i("11"))).unwrap();
        assert_eq!(h.dims(), &[1, 1, 1, 0]);
        let pr = PersistenceModule::hook_module(p.clone(), f, i("00"), None).unwrap();
        assert_eq!(pr.dims(), &[1, 1, 1, 1]);
        assert!(matches!(
            PersistenceModule::hook_module(p.clone(), f, i("01"), Some(i("10"))),
            Err(Error::NotGreater(..))
        ));
        let c = Arc::new(gen::chain(3));
        let adj = PersistenceModule::hook_module(c.clone(), f, 0, Some(1)).unwrap();
        assert_eq!(adj.dims(), &[1, 0, 0]);
    }

    #[test]
    fn direct_sums() {
        let p = grid22();
        let f = Fp::default();
        let s = PersistenceModule::simple(p.clone(), f, 1);
        let z = PersistenceModule::zero(p.clone(), f);
        assert_eq!(
            PersistenceModule::direct_sum(&[s.clone(), z]).unwrap().dims(),
            s.dims()
        );
        let k3 = PersistenceModule::direct_sum(&[s.clone(), s.clone(), s]).unwrap();
        assert_eq!(k3.dims(), &[0, 3, 0, 0]);
        let other = PersistenceModule::zero(Arc::new(gen::chain(4)), f);
        assert_eq!(
            PersistenceModule::direct_sum(&[k3, other]).unwrap_err(),
            Error::PosetMismatch
        );
    }

    #[test]
    fn restrict_whole_and_support() {
        let p = Arc::new(gen::grid(3, 2, 1));
        let f = Fp::default();
        let s = Spread::from_labels(&p, &["11"], &["22"]).unwrap();
        let m = PersistenceModule::spread_module(p.clone(), f, &s);
        let d = m.restrict(&p.sub_poset(s.support()));
        assert!(d.dims.iter().all(|&x| x == 1));
        assert!(d.maps.iter().all(|(_, mat)| *mat == Mat::identity(f, 1)));
        let full = m.restrict(&p.sub_poset(p.all()));
        assert_eq!(full.dims, m.dims());
        assert_eq!(full.maps.len(), p.covers().len());
    }

    #[test]
    fn morphism_naturality() {
        let p = Arc::new(gen::chain(2));
        let f = Fp::default();
        let s0 = PersistenceModule::simple(p.clone(), f, 0);
        let p0 = PersistenceModule::projective(p.clone(), f, 0);
        // The inclusion S_0 -> P_0 is not natural; the projection P_0 -> S_0 is.
        let bad = Morphism::new(
            s0.clone(),
            p0.clone(),
            vec![Mat::identity(f, 1), Mat::zeros(f, 1, 0)],
        );
        assert!(matches!(bad, Err(Error::NotNatural(..))));
        let good = Morphism::new(
            p0.clone(),
            s0.clone(),
            vec![Mat::identity(f, 1), Mat::zeros(f, 0, 1)],
        )
        .unwrap();
        assert!(good.is_epi());
        assert!(!good.is_mono());
        let v = good.to_vector();
        let back = Morphism::from_vector(p0, s0, &v);
        assert_eq!(back.components(), good.components());
    }
}
