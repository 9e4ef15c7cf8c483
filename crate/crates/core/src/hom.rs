//! Hom spaces between persistence modules, the combinatorial formula for Hom
//! between spread modules, and kernels, images and cokernels of morphisms.

use crate::error::{Error, Result};
use crate::field::Mat;
use crate::module::{Morphism, PersistenceModule};
use crate::poset::{ElemSet, Poset, Spread};

/// A basis of `Hom(source, target)`.
#[derive(Clone, Debug)]
pub struct HomBasis {
    pub source: PersistenceModule,
    pub target: PersistenceModule,
    pub basis: Vec<Morphism>,
}

impl HomBasis {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Basis vectors as the columns of a matrix, in the coordinates of
    /// [`Morphism::to_vector`].
    pub fn as_columns(&self) -> Mat {
        let f = self.source.field();
        let cols: Vec<Vec<u32>> = self.basis.iter().map(Morphism::to_vector).collect();
        Mat::from_columns(f, hom_space_len(&self.source, &self.target), &cols)
    }
}

/// Length of the coordinate vector of a morphism `m -> n`.
pub fn hom_space_len(m: &PersistenceModule, n: &PersistenceModule) -> usize {
    (0..m.poset().len()).map(|x| m.dim(x) * n.dim(x)).sum()
}

/// The naturality system `N(a,b) f_a - f_b M(a,b) = 0` over all covers, in
/// the unknowns `(f_x)` stacked element-major with column-major entries.
fn naturality_system(m: &PersistenceModule, n: &PersistenceModule) -> Mat {
    let p = m.poset();
    let field = m.field();
    let mut offset = Vec::with_capacity(p.len());
    let mut total = 0;
    for x in 0..p.len() {
        offset.push(total);
        total += m.dim(x) * n.dim(x);
    }
    let rows: usize = p
        .covers()
        .iter()
        .map(|&(a, b)| n.dim(b) * m.dim(a))
        .sum();
    let mut sys = Mat::zeros(field, rows, total);
    let mut row = 0;
    for (ci, &(a, b)) in p.covers().iter().enumerate() {
        let nm = n.cover_map(ci);
        let mm = m.cover_map(ci);
        let (dna, dnb, dma, dmb) = (n.dim(a), n.dim(b), m.dim(a), m.dim(b));
        for i in 0..dnb {
            for j in 0..dma {
                for k in 0..dna {
                    let v = nm.get(i, k);
                    if v != 0 {
                        let col = offset[a] + j * dna + k;
                        sys.set(row, col, field.add(sys.get(row, col), v));
                    }
                }
                for l in 0..dmb {
                    let v = mm.get(l, j);
                    if v != 0 {
                        let col = offset[b] + l * dnb + i;
                        sys.set(row, col, field.sub(sys.get(row, col), v));
                    }
                }
                row += 1;
            }
        }
    }
    sys
}

/// Solves the naturality system and returns a deterministic basis.
pub fn hom_basis(m: &PersistenceModule, n: &PersistenceModule) -> Result<HomBasis> {
    if !m.same_base(n) {
        return Err(Error::PosetMismatch);
    }
    let kernel = naturality_system(m, n).kernel_basis();
    let basis = (0..kernel.cols())
        .map(|j| Morphism::from_vector(m.clone(), n.clone(), &kernel.column(j)))
        .collect();
    Ok(HomBasis {
        source: m.clone(),
        target: n.clone(),
        basis,
    })
}

/// `dim Hom(m, n)`, taking the combinatorial route when both are spread modules.
pub fn dim_hom(m: &PersistenceModule, n: &PersistenceModule) -> Result<usize> {
    if !m.same_base(n) {
        return Err(Error::PosetMismatch);
    }
    if let (Some(s), Some(t)) = (m.as_spread(), n.as_spread()) {
        return Ok(spread_hom_dim(m.poset(), s, t));
    }
    let sys = naturality_system(m, n);
    Ok(sys.cols() - sys.rank())
}

/// Components of `supp(s) ∩ supp(t)` satisfying the boundary condition:
/// every source of `s` below the component lies in it, and every target of
/// `t` above the component lies in it.
pub fn hom_components(p: &Poset, s: &Spread, t: &Spread) -> Vec<ElemSet> {
    let inter = s.support().intersection(t.support());
    p.components(inter)
        .into_iter()
        .filter(|&comp| {
            let below = |a: usize| comp.iter().any(|x| p.leq(a, x));
            let above = |d: usize| comp.iter().any(|x| p.leq(x, d));
            s.sources()
                .iter()
                .filter(|&a| below(a))
                .all(|a| comp.contains(a))
                && t.targets()
                    .iter()
                    .filter(|&d| above(d))
                    .all(|d| comp.contains(d))
        })
        .collect()
}

/// `dim Hom(M_s, M_t)` by counting admissible intersection components.
pub fn spread_hom_dim(p: &Poset, s: &Spread, t: &Spread) -> usize {
    hom_components(p, s, t).len()
}

/// One morphism per admissible component, acting as the identity there and
/// zero elsewhere.
pub fn spread_hom_basis(m: &PersistenceModule, n: &PersistenceModule) -> Option<Vec<Morphism>> {
    let (s, t) = (m.as_spread()?, n.as_spread()?);
    let f = m.field();
    let p = m.poset();
    Some(
        hom_components(p, s, t)
            .into_iter()
            .map(|comp| {
                let comps = (0..p.len())
                    .map(|x| {
                        let mut c = Mat::zeros(f, n.dim(x), m.dim(x));
                        if comp.contains(x) {
                            c.set(0, 0, 1);
                        }
                        c
                    })
                    .collect();
                Morphism::new_unchecked(m.clone(), n.clone(), comps)
            })
            .collect(),
    )
}

/// Pointwise kernel of `f` in the bases chosen by `kernel_basis`, and its
/// inclusion into the source.
pub fn kernel_module(f: &Morphism) -> (PersistenceModule, Morphism) {
    let m = f.source();
    let p = m.poset();
    let field = m.field();
    let bases: Vec<Mat> = (0..p.len())
        .map(|x| f.component(x).kernel_basis())
        .collect();
    let maps = p
        .covers()
        .iter()
        .enumerate()
        .map(|(ci, &(a, b))| {
            let pushed = m.cover_map(ci).mul(&bases[a]);
            bases[b]
                .solve_matrix(&pushed)
                .expect("kernels are preserved by the structure maps")
        })
        .collect();
    let dims = bases.iter().map(Mat::cols).collect();
    let k = PersistenceModule::new(m.poset_arc(), field, dims, maps)
        .expect("kernel of a natural map is a module");
    let incl = Morphism::new_unchecked(k.clone(), m.clone(), bases);
    (k, incl)
}

/// Pointwise image of `f` spanned by the pivot columns of each component,
/// and its inclusion into the target.
pub fn image_module(f: &Morphism) -> (PersistenceModule, Morphism) {
    let n = f.target();
    let p = n.poset();
    let field = n.field();
    let bases: Vec<Mat> = (0..p.len())
        .map(|x| {
            let c = f.component(x);
            c.select_columns(&c.independent_columns())
        })
        .collect();
    let maps = p
        .covers()
        .iter()
        .enumerate()
        .map(|(ci, &(a, b))| {
            let pushed = n.cover_map(ci).mul(&bases[a]);
            bases[b]
                .solve_matrix(&pushed)
                .expect("images are preserved by the structure maps")
        })
        .collect();
    let dims = bases.iter().map(Mat::cols).collect();
    let im = PersistenceModule::new(n.poset_arc(), field, dims, maps)
        .expect("image of a natural map is a module");
    let incl = Morphism::new_unchecked(im.clone(), n.clone(), bases);
    (im, incl)
}

/// Pointwise cokernel of `f` and the projection from the target.
pub fn cokernel_module(f: &Morphism) -> (PersistenceModule, Morphism) {
    let n = f.target();
    let p = n.poset();
    let field = n.field();
    // Rows of q_x span the annihilator of im f_x, so ker q_x = im f_x.
    let proj: Vec<Mat> = (0..p.len())
        .map(|x| f.component(x).transpose().kernel_basis().transpose())
        .collect();
    let maps = p
        .covers()
        .iter()
        .enumerate()
        .map(|(ci, &(a, b))| {
            // Solve C q_a = q_b N(a,b) through transposes.
            let rhs = proj[b].mul(n.cover_map(ci));
            proj[a]
                .transpose()
                .solve_matrix(&rhs.transpose())
                .expect("cokernels inherit structure maps")
                .transpose()
        })
        .collect();
    let dims = proj.iter().map(Mat::rows).collect();
    let c = PersistenceModule::new(n.poset_arc(), field, dims, maps)
        .expect("cokernel of a natural map is a module");
    let q = Morphism::new_unchecked(n.clone(), c.clone(), proj);
    (c, q)
}
