//! Invariants of persistence modules: dim-hom vectors, relative classes,
//! rank invariants, generalized ranks, signed diagrams and barcodes.

use std::sync::Arc;

use rayon::prelude::*;

use crate::approx::{order_or_cycle, resolve, Family, ResolutionStatus};
use crate::error::{Error, Result};
use crate::field::{Fp, Mat};
use crate::hom::dim_hom;
use crate::module::PersistenceModule;
use crate::poset::{containment_poset, enumerate_spreads, Poset, Spread, SpreadKind};

/// Depth used where a resolution is known to be short.
const BARCODE_DEPTH: usize = 8;

/// A class in the Grothendieck group relative to a family, in the basis of
/// its members.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrothClass {
    pub members: Vec<Spread>,
    pub coeffs: Vec<i64>,
}

impl GrothClass {
    fn new(family: &Family, coeffs: Vec<i64>) -> Self {
        GrothClass {
            members: family.members().to_vec(),
            coeffs,
        }
    }

    /// Nonzero terms as `(member, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (&Spread, i64)> {
        self.members
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, &c)| c != 0)
            .map(|(s, &c)| (s, c))
    }

    pub fn add(&self, other: &GrothClass) -> GrothClass {
        assert_eq!(self.members, other.members, "classes over different families");
        GrothClass {
            members: self.members.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

/// Ranks of all structure maps `M(a, b)`, `a <= b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankInvariant {
    n: usize,
    entries: Vec<Option<usize>>,
}

impl RankInvariant {
    fn empty(n: usize) -> Self {
        RankInvariant {
            n,
            entries: vec![None; n * n],
        }
    }

    /// `None` when `a` is not below `b`.
    pub fn get(&self, a: usize, b: usize) -> Option<usize> {
        self.entries[a * self.n + b]
    }

    /// All comparable pairs with their ranks.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        (0..self.n * self.n).filter_map(move |k| self.entries[k].map(|r| (k / self.n, k % self.n, r)))
    }
}

/// Möbius inversion of a generalized rank function over a spread collection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedDiagram {
    pub spreads: Vec<Spread>,
    pub coeffs: Vec<i64>,
    /// The generalized ranks that were inverted.
    pub ranks: Vec<usize>,
}

impl SignedDiagram {
    /// Recovers each generalized rank as the sum of coefficients over
    /// supersets in the collection.
    pub fn reconstruct_ranks(&self) -> Vec<i64> {
        self.spreads
            .iter()
            .map(|x| {
                self.spreads
                    .iter()
                    .zip(&self.coeffs)
                    .filter(|(y, _)| x.support().is_subset(y.support()))
                    .map(|(_, &c)| c)
                    .sum()
            })
            .collect()
    }
}

/// `(dim Hom(R, m))` for every member `R`.
pub fn dim_hom_vector(x: &Family, m: &PersistenceModule) -> Result<Vec<usize>> {
    x.modules().par_iter().map(|r| dim_hom(r, m)).collect()
}

/// Alternating sum of the terms of a minimal resolution.
pub fn class_via_resolution(x: &Family, m: &PersistenceModule, max_depth: usize) -> Result<GrothClass> {
    let res = resolve(x, m, max_depth)?;
    if let ResolutionStatus::Truncated(depth) = res.status {
        return Err(Error::ResolutionTruncated {
            depth,
            terms: res.terms,
        });
    }
    let mut coeffs = vec![0i64; x.len()];
    for (k, t) in res.terms.iter().enumerate() {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        for (c, &v) in coeffs.iter_mut().zip(t) {
            *c += sign * v as i64;
        }
    }
    Ok(GrothClass::new(x, coeffs))
}

/// Solves `dim Hom(R', m) = sum_R c_R dim Hom(R', R)` by back substitution
/// along a topological order of the Hom relation.
pub fn class_via_hom_matrix(x: &Family, m: &PersistenceModule) -> Result<GrothClass> {
    let h = x.hom_dims();
    let order = match order_or_cycle(&h) {
        (Some(order), _) => order,
        (None, cycle) => {
            let names = cycle
                .unwrap_or_default()
                .iter()
                .map(|&i| x.members()[i].display(x.poset()))
                .collect::<Vec<_>>()
                .join(" -> ");
            return Err(Error::HomMatrixSingular(names));
        }
    };
    let v = dim_hom_vector(x, m)?;
    let mut c = vec![0i64; x.len()];
    for &i in order.iter().rev() {
        let later: i64 = order
            .iter()
            .filter(|&&j| j != i && h[i][j] > 0)
            .map(|&j| h[i][j] as i64 * c[j])
            .sum();
        // Members are bricks, so the diagonal entry is 1.
        c[i] = v[i] as i64 - later;
    }
    Ok(GrothClass::new(x, c))
}

/// Class through the Hom matrix when the family is acyclic, else through a
/// resolution.
pub fn class_of(x: &Family, m: &PersistenceModule, max_depth: usize) -> Result<GrothClass> {
    match class_via_hom_matrix(x, m) {
        Err(Error::HomMatrixSingular(_)) => class_via_resolution(x, m, max_depth),
        r => r,
    }
}

pub fn rank_invariant(m: &PersistenceModule) -> RankInvariant {
    let p = m.poset();
    let mut r = RankInvariant::empty(p.len());
    for a in 0..p.len() {
        for b in 0..p.len() {
            if p.leq(a, b) {
                r.entries[a * p.len() + b] =
                    Some(m.map_along(a, b).expect("comparable").rank());
            }
        }
    }
    r
}

/// The rank invariant computed only from dimensions of Hom spaces out of
/// hook modules.
pub fn rank_via_hooks(m: &PersistenceModule) -> RankInvariant {
    let p = m.poset_arc();
    let f = m.field();
    let n = p.len();
    let proj: Vec<usize> = (0..n)
        .into_par_iter()
        .map(|a| dim_hom(&PersistenceModule::projective(p.clone(), f, a), m).expect("same base"))
        .collect();
    let entries: Vec<Option<usize>> = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (a, b) = (k / n, k % n);
            if !p.leq(a, b) {
                None
            } else if a == b {
                Some(proj[a])
            } else {
                let hook = PersistenceModule::hook_module(p.clone(), f, a, Some(b)).expect("a < b");
                Some(proj[a] - dim_hom(&hook, m).expect("same base"))
            }
        })
        .collect();
    RankInvariant { n, entries }
}

/// Rank of the canonical map from the limit to the colimit of `m` restricted
/// to the support of `s`.
pub fn generalized_rank(m: &PersistenceModule, s: &Spread) -> Result<usize> {
    let p = m.poset();
    if !s.is_connected(p) {
        return Err(Error::NotConnected);
    }
    let f = m.field();
    let elems: Vec<usize> = s.support().iter().collect();
    let mut offset = vec![0usize; p.len()];
    let mut total = 0;
    for &x in &elems {
        offset[x] = total;
        total += m.dim(x);
    }
    if total == 0 {
        return Ok(0);
    }
    let covers = p.induced_covers(s.support());

    // Compatibility system: M(x, y) v_x - v_y = 0 on every induced cover.
    let rows: usize = covers.iter().map(|&(_, y)| m.dim(y)).sum();
    let mut c = Mat::zeros(f, rows, total);
    // Relations spanning the colimit's denominator, one column per basis
    // vector of the source of each cover.
    let mut rel_cols: Vec<Vec<u32>> = Vec::new();
    let mut r0 = 0;
    for &(x, y) in &covers {
        let ci = p.cover_index(x, y).expect("induced covers are covers");
        let a = m.cover_map(ci);
        for i in 0..m.dim(y) {
            for j in 0..m.dim(x) {
                c.set(r0 + i, offset[x] + j, a.get(i, j));
            }
            c.set(r0 + i, offset[y] + i, f.neg(1));
        }
        r0 += m.dim(y);
        for j in 0..m.dim(x) {
            let mut col = vec![0u32; total];
            for i in 0..m.dim(y) {
                col[offset[y] + i] = a.get(i, j);
            }
            col[offset[x] + j] = f.sub(col[offset[x] + j], 1);
            rel_cols.push(col);
        }
    }
    let limit = c.kernel_basis();
    if limit.cols() == 0 {
        return Ok(0);
    }
    // Any component of a compatible family represents its class.
    let x0 = elems[0];
    let image_cols: Vec<Vec<u32>> = (0..limit.cols())
        .map(|k| {
            let col = limit.column(k);
            let mut v = vec![0u32; total];
            for i in 0..m.dim(x0) {
                v[offset[x0] + i] = col[offset[x0] + i];
            }
            v
        })
        .collect();
    let rel = Mat::from_columns(f, total, &rel_cols);
    let both = rel.hstack(&Mat::from_columns(f, total, &image_cols));
    Ok(both.rank() - rel.rank())
}

/// Generalized ranks over a collection, computed in parallel.
pub fn generalized_rank_vector(m: &PersistenceModule, r: &[Spread]) -> Result<Vec<usize>> {
    r.par_iter().map(|s| generalized_rank(m, s)).collect()
}

/// `delta(X) = sum_{Y in r, Y ⊇ X} mu(X, Y) rk(m, Y)` with `mu` the Möbius
/// function of `r` ordered by inclusion.
pub fn signed_diagram(m: &PersistenceModule, r: &[Spread]) -> Result<SignedDiagram> {
    let p = m.poset();
    if r.iter().any(|s| !s.is_connected(p)) {
        return Err(Error::NotConnected);
    }
    let cp = containment_poset(r).map_err(|e| match e {
        Error::DuplicateSpread(_) => {
            let mut seen = std::collections::HashSet::new();
            let dup = r.iter().find(|s| !seen.insert(s.support())).unwrap();
            Error::DuplicateSpread(dup.display(p))
        }
        e => e,
    })?;
    let ranks = generalized_rank_vector(m, r)?;
    let coeffs = (0..r.len())
        .map(|x| {
            cp.mobius_row(x)
                .iter()
                .zip(&ranks)
                .map(|(&mu, &rk)| mu * rk as i64)
                .sum()
        })
        .collect();
    Ok(SignedDiagram {
        spreads: r.to_vec(),
        coeffs,
        ranks,
    })
}

/// Interval multiplicities of a module over a type-A poset.
pub fn barcode(m: &PersistenceModule) -> Result<GrothClass> {
    if !m.poset().is_type_a() {
        return Err(Error::NotTypeA);
    }
    let family = Family::builtin(m.poset_arc(), m.field(), SpreadKind::ConnectedAll, usize::MAX)?;
    class_via_resolution(&family, m, BARCODE_DEPTH)
}

/// A named invariant with whatever data it needs.
#[derive(Clone, Debug)]
pub enum Invariant {
    DimVec,
    Rank,
    Class(Family),
    DimHom(Family),
    GenRank(Vec<Spread>),
    Diagram(Vec<Spread>),
}

/// Value of an [`Invariant`] on one module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InvariantValue {
    DimVec(Vec<usize>),
    Rank(RankInvariant),
    Class(GrothClass),
    Counts(Vec<usize>),
    Signed(SignedDiagram),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Comparison {
    Equal,
    Distinguished,
}

impl Invariant {
    /// Parses `dimvec`, `rank`, or `class(F)`, `dimhom(F)`, `genrank(F)`,
    /// `diagram(F)` where `F` is a builtin family name.
    pub fn parse(name: &str, poset: &Arc<Poset>, field: Fp, cap: usize) -> Result<Invariant> {
        let unknown = || Error::UnknownInvariant(name.to_string());
        let name_t = name.trim();
        match name_t {
            "dimvec" => return Ok(Invariant::DimVec),
            "rank" => return Ok(Invariant::Rank),
            _ => {}
        }
        let (head, rest) = name_t.split_once('(').ok_or_else(unknown)?;
        let arg = rest.strip_suffix(')').ok_or_else(unknown)?.trim();
        let kind = SpreadKind::from_name(arg).ok_or_else(unknown)?;
        let family = || Family::builtin(poset.clone(), field, kind, cap);
        let spreads = || enumerate_spreads(poset, kind, cap);
        match head.trim() {
            "class" => Ok(Invariant::Class(family()?)),
            "dimhom" => Ok(Invariant::DimHom(family()?)),
            "genrank" => Ok(Invariant::GenRank(spreads()?)),
            "diagram" => Ok(Invariant::Diagram(spreads()?)),
            _ => Err(unknown()),
        }
    }

    pub fn evaluate(&self, m: &PersistenceModule, max_depth: usize) -> Result<InvariantValue> {
        Ok(match self {
            Invariant::DimVec => InvariantValue::DimVec(m.dimension_vector()),
            Invariant::Rank => InvariantValue::Rank(rank_invariant(m)),
            Invariant::Class(x) => InvariantValue::Class(class_of(x, m, max_depth)?),
            Invariant::DimHom(x) => InvariantValue::Counts(dim_hom_vector(x, m)?),
            Invariant::GenRank(r) => InvariantValue::Counts(generalized_rank_vector(m, r)?),
            Invariant::Diagram(r) => InvariantValue::Signed(signed_diagram(m, r)?),
        })
    }
}

/// Whether `inv` takes the same value on `m` and `n`.
pub fn compare(
    inv: &Invariant,
    m: &PersistenceModule,
    n: &PersistenceModule,
    max_depth: usize,
) -> Result<Comparison> {
    if !m.same_base(n) {
        return Err(Error::PosetMismatch);
    }
    let (a, b) = (inv.evaluate(m, max_depth)?, inv.evaluate(n, max_depth)?);
    Ok(if a == b {
        Comparison::Equal
    } else {
        Comparison::Distinguished
    })
}
