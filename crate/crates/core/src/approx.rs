//! Right approximations by a finite family of spread modules, minimal
//! resolutions, relative dimension and generalized Betti numbers.
//!
//! Minimal multiplicities come from the top of the Hom functor: the
//! multiplicity of a member `R` in the minimal approximation of `M` is the
//! dimension of `Hom(R, M)` modulo all composites `R -> R' -> M` through other
//! members. Members are connected spread modules, hence bricks, which is what
//! makes this count correct.

use std::sync::{Arc, OnceLock};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{Fp, Mat};
use crate::hom::{dim_hom, hom_basis, kernel_module, spread_hom_basis};
use crate::module::{Morphism, PersistenceModule};
use crate::poset::{enumerate_spreads, ElemSet, Poset, Spread, SpreadKind};

/// A finite family of pairwise distinct connected spread modules.
pub struct Family {
    poset: Arc<Poset>,
    field: Fp,
    members: Vec<Spread>,
    modules: Vec<PersistenceModule>,
    contains_projectives: bool,
    quotient_closed: bool,
    /// When set, the family came from [`support_restrict`] and only
    /// approximates modules supported inside this set.
    restricted_to: Option<ElemSet>,
    homs: OnceLock<Vec<Vec<Vec<Morphism>>>>,
}

impl Clone for Family {
    fn clone(&self) -> Self {
        Family {
            poset: self.poset.clone(),
            field: self.field,
            members: self.members.clone(),
            modules: self.modules.clone(),
            contains_projectives: self.contains_projectives,
            quotient_closed: self.quotient_closed,
            restricted_to: self.restricted_to,
            homs: OnceLock::new(),
        }
    }
}

impl std::fmt::Debug for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let names: Vec<String> = self.members.iter().map(|s| s.display(&self.poset)).collect();
        f.debug_struct("Family").field("members", &names).finish()
    }
}

/// Result of [`Family::check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyDiagnostics {
    /// `hom_dims[i][j] = dim Hom(X_i, X_j)`.
    pub hom_dims: Vec<Vec<usize>>,
    /// Whether `Hom != 0` has an acyclic transitive closure.
    pub acyclic: bool,
    /// A cycle of member indices when not acyclic.
    pub cycle: Option<Vec<usize>>,
    /// Members ordered so that nonzero Hom only goes forward, when acyclic.
    pub topo_order: Option<Vec<usize>>,
}

impl Family {
    /// Members must be connected and pairwise distinct.
    pub fn new(
        poset: Arc<Poset>,
        field: Fp,
        members: Vec<Spread>,
        quotient_closed: bool,
    ) -> Result<Self> {
        poset.check_subset_capable()?;
        let mut seen = std::collections::HashSet::new();
        for s in &members {
            if !seen.insert(s.support()) {
                return Err(Error::DuplicateMember(s.display(&poset)));
            }
            if !s.is_connected(&poset) {
                return Err(Error::NotConnected);
            }
        }
        let contains_projectives =
            (0..poset.len()).all(|a| seen.contains(&poset.up_set(a)));
        let modules = members
            .iter()
            .map(|s| PersistenceModule::spread_module(poset.clone(), field, s))
            .collect();
        Ok(Family {
            poset,
            field,
            members,
            modules,
            contains_projectives,
            quotient_closed,
            restricted_to: None,
            homs: OnceLock::new(),
        })
    }

    /// A named family. Only the single-source family is flagged as containing
    /// every quotient of its members.
    pub fn builtin(poset: Arc<Poset>, field: Fp, kind: SpreadKind, cap: usize) -> Result<Self> {
        let members = enumerate_spreads(&poset, kind, cap)?;
        Family::new(poset, field, members, kind == SpreadKind::SingleSource)
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn poset_arc(&self) -> Arc<Poset> {
        self.poset.clone()
    }

    pub fn field(&self) -> Fp {
        self.field
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Spread] {
        &self.members
    }

    pub fn module(&self, i: usize) -> &PersistenceModule {
        &self.modules[i]
    }

    pub fn modules(&self) -> &[PersistenceModule] {
        &self.modules
    }

    pub fn contains_projectives(&self) -> bool {
        self.contains_projectives
    }

    pub fn quotient_closed(&self) -> bool {
        self.quotient_closed
    }

    pub fn index_of(&self, s: &Spread) -> Option<usize> {
        self.members.iter().position(|t| t.support() == s.support())
    }

    /// Member display names, e.g. `[{1,2},{4,6}]`.
    pub fn member_names(&self) -> Vec<String> {
        self.members.iter().map(|s| s.display(&self.poset)).collect()
    }

    /// Bases of `Hom(X_i, X_j)` for all member pairs.
    pub fn member_homs(&self) -> &Vec<Vec<Vec<Morphism>>> {
        self.homs.get_or_init(|| {
            self.modules
                .par_iter()
                .map(|a| {
                    self.modules
                        .iter()
                        .map(|b| spread_hom_basis(a, b).expect("members are spread modules"))
                        .collect()
                })
                .collect()
        })
    }

    pub fn hom_dims(&self) -> Vec<Vec<usize>> {
        self.member_homs()
            .iter()
            .map(|row| row.iter().map(Vec::len).collect())
            .collect()
    }

    /// Projective coverage, distinctness, and acyclicity of the Hom relation.
    pub fn check(&self) -> Result<FamilyDiagnostics> {
        let mut seen = std::collections::HashSet::new();
        for s in &self.members {
            if !seen.insert(s.support()) {
                return Err(Error::DuplicateMember(s.display(&self.poset)));
            }
        }
        if let Some(a) = (0..self.poset.len()).find(|&a| !seen.contains(&self.poset.up_set(a))) {
            return Err(Error::MissingProjectives(self.poset.label(a).to_string()));
        }
        let hom_dims = self.hom_dims();
        let (topo_order, cycle) = order_or_cycle(&hom_dims);
        Ok(FamilyDiagnostics {
            acyclic: cycle.is_none(),
            hom_dims,
            cycle,
            topo_order,
        })
    }

    /// The family can approximate `m` by epimorphisms.
    fn require_epi_capable(&self, m: &PersistenceModule) -> Result<()> {
        if m.field() != self.field || m.poset() != &*self.poset {
            return Err(Error::PosetMismatch);
        }
        match self.restricted_to {
            Some(s) if m.support().is_subset(s) => Ok(()),
            Some(_) => Err(Error::MissingProjectives(
                "support outside the restricted family".into(),
            )),
            None if self.contains_projectives => Ok(()),
            None => {
                let a = (0..self.poset.len())
                    .find(|&a| self.index_of(&Spread::principal_upset(&self.poset, a)).is_none())
                    .unwrap();
                Err(Error::MissingProjectives(self.poset.label(a).to_string()))
            }
        }
    }
}

/// Topological order of the relation `i -> j` when `d[i][j] > 0`, `i != j`,
/// or a cycle if there is none.
pub(crate) fn order_or_cycle(d: &[Vec<usize>]) -> (Option<Vec<usize>>, Option<Vec<usize>>) {
    let n = d.len();
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state = vec![0u8; n];
    let mut post = Vec::with_capacity(n);
    let mut stack_path: Vec<usize> = Vec::new();

    fn dfs(
        v: usize,
        d: &[Vec<usize>],
        state: &mut [u8],
        post: &mut Vec<usize>,
        path: &mut Vec<usize>,
    ) -> Option<Vec<usize>> {
        state[v] = 1;
        path.push(v);
        for w in 0..d.len() {
            if w == v || d[v][w] == 0 {
                continue;
            }
            if state[w] == 1 {
                let start = path.iter().position(|&x| x == w).unwrap();
                return Some(path[start..].to_vec());
            }
            if state[w] == 0 {
                if let Some(c) = dfs(w, d, state, post, path) {
                    return Some(c);
                }
            }
        }
        path.pop();
        state[v] = 2;
        post.push(v);
        None
    }

    for v in 0..n {
        if state[v] == 0 {
            if let Some(c) = dfs(v, d, &mut state, &mut post, &mut stack_path) {
                return (None, Some(c));
            }
        }
    }
    post.reverse();
    (Some(post), None)
}

/// An approximation `⊕ X_i^{m_i} -> M`.
#[derive(Clone, Debug)]
pub struct Approximation {
    /// Multiplicity of each family member in the domain.
    pub multiplicities: Vec<usize>,
    /// Member index of each summand of the domain, in order.
    pub summands: Vec<usize>,
    pub map: Morphism,
}

impl Approximation {
    pub fn domain(&self) -> &PersistenceModule {
        self.map.source()
    }
}

fn assemble(
    family: &Family,
    m: &PersistenceModule,
    chosen: Vec<(usize, Morphism)>,
) -> Result<Approximation> {
    let mut multiplicities = vec![0; family.len()];
    for (i, _) in &chosen {
        multiplicities[*i] += 1;
    }
    let summands: Vec<usize> = chosen.iter().map(|(i, _)| *i).collect();
    if chosen.is_empty() {
        let zero = PersistenceModule::zero(m.poset_arc(), m.field());
        return Ok(Approximation {
            multiplicities,
            summands,
            map: Morphism::zero(zero, m.clone()),
        });
    }
    let parts: Vec<PersistenceModule> = summands.iter().map(|&i| family.module(i).clone()).collect();
    let domain = PersistenceModule::direct_sum(&parts)?;
    let f = m.field();
    let comps = (0..m.poset().len())
        .map(|x| {
            chosen.iter().fold(Mat::zeros(f, m.dim(x), 0), |acc, (_, g)| {
                acc.hstack(g.component(x))
            })
        })
        .collect();
    Ok(Approximation {
        multiplicities,
        summands,
        map: Morphism::new(domain, m.clone(), comps)?,
    })
}

/// Hom bases from every member to `m`.
fn member_homs_to(family: &Family, m: &PersistenceModule) -> Result<Vec<Vec<Morphism>>> {
    family
        .modules()
        .par_iter()
        .map(|r| hom_basis(r, m).map(|h| h.basis))
        .collect()
}

/// `⊕_R R^{dim Hom(R, M)} -> M` using a full Hom basis for every member.
pub fn universal_approximation(family: &Family, m: &PersistenceModule) -> Result<Approximation> {
    family.require_epi_capable(m)?;
    let homs = member_homs_to(family, m)?;
    let chosen = homs
        .into_iter()
        .enumerate()
        .flat_map(|(i, basis)| basis.into_iter().map(move |g| (i, g)))
        .collect();
    assemble(family, m, chosen)
}

/// Minimal right approximation: for each member, Hom basis vectors that
/// complement the span of composites through other members.
pub fn minimal_approximation(family: &Family, m: &PersistenceModule) -> Result<Approximation> {
    family.require_epi_capable(m)?;
    let to_m = member_homs_to(family, m)?;
    let between = family.member_homs();
    let f = m.field();
    let chosen: Vec<(usize, Morphism)> = (0..family.len())
        .into_par_iter()
        .map(|i| {
            let len = crate::hom::hom_space_len(family.module(i), m);
            let mut radical: Vec<Vec<u32>> = Vec::new();
            for (j, gs) in to_m.iter().enumerate() {
                if j == i {
                    continue;
                }
                for h in &between[i][j] {
                    for g in gs {
                        radical.push(g.after(h).expect("composable").to_vector());
                    }
                }
            }
            let mut span = Mat::from_columns(f, len, &radical);
            let mut rank = span.rank();
            let mut picked = Vec::new();
            for g in &to_m[i] {
                let cand = span.hstack(&Mat::from_columns(f, len, &[g.to_vector()]));
                let r = cand.rank();
                if r > rank {
                    span = cand;
                    rank = r;
                    picked.push((i, g.clone()));
                }
            }
            picked
        })
        .flatten()
        .collect();
    assemble(family, m, chosen)
}

/// Outcome of a resolution computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResolutionStatus {
    /// Some kernel vanished.
    Finite,
    /// `max_depth` terms were computed and the last kernel is nonzero.
    Truncated(usize),
}

/// A minimal resolution `... -> R_1 -> R_0 -> M`.
#[derive(Clone, Debug)]
pub struct Resolution {
    /// Multiplicity vector of each term over the family members.
    pub terms: Vec<Vec<usize>>,
    /// Term modules `R_k`.
    pub modules: Vec<PersistenceModule>,
    /// `maps[0]: R_0 -> M`, `maps[k]: R_k -> R_{k-1}`.
    pub maps: Vec<Morphism>,
    pub status: ResolutionStatus,
    /// Heuristic: when a kernel has the same dimension vector and Hom profile
    /// against the family as an earlier one, the distance between them.
    /// Evidence of periodicity, not a proof.
    pub periodicity_hint: Option<usize>,
    family_len: usize,
}

impl Resolution {
    /// Number of the last nonzero term; 0 for a member or the zero module.
    pub fn length(&self) -> usize {
        self.terms.len().saturating_sub(1)
    }

    /// Consecutive maps compose to zero and each map is onto the kernel of
    /// the previous one.
    pub fn is_exact(&self, m: &PersistenceModule) -> bool {
        let n = m.poset().len();
        for k in 0..self.maps.len() {
            let target = if k == 0 { m } else { &self.modules[k - 1] };
            if k == 0 && !self.maps[0].is_epi() {
                return false;
            }
            if k >= 1 {
                let comp = self.maps[k - 1].after(&self.maps[k]).expect("composable");
                if !comp.is_zero() {
                    return false;
                }
                // im q_k = ker q_{k-1}: compare dimensions pointwise.
                for x in 0..n {
                    let ker = target.dim(x) - self.maps[k - 1].component(x).rank();
                    if self.maps[k].component(x).rank() != ker {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Iterates minimal approximations on successive kernels, computing at most
/// `max_depth` terms.
pub fn resolve(family: &Family, m: &PersistenceModule, max_depth: usize) -> Result<Resolution> {
    family.require_epi_capable(m)?;
    let mut terms = Vec::new();
    let mut modules = Vec::new();
    let mut maps: Vec<Morphism> = Vec::new();
    let mut signatures: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    let mut periodicity_hint = None;
    let mut cur = m.clone();
    let mut incl: Option<Morphism> = None;
    for _ in 0..max_depth {
        if cur.is_zero() {
            break;
        }
        let approx = minimal_approximation(family, &cur)?;
        assert!(approx.map.is_epi(), "approximation by a family with projectives is onto");
        let q = match &incl {
            None => approx.map.clone(),
            Some(i) => i.after(&approx.map)?,
        };
        terms.push(approx.multiplicities.clone());
        modules.push(approx.domain().clone());
        maps.push(q);
        let (k, k_incl) = kernel_module(&approx.map);
        if periodicity_hint.is_none() && !k.is_zero() {
            let profile = family
                .modules()
                .iter()
                .map(|r| dim_hom(r, &k))
                .collect::<Result<Vec<_>>>()?;
            let sig = (k.dimension_vector(), profile);
            if let Some(pos) = signatures.iter().position(|s| *s == sig) {
                periodicity_hint = Some(signatures.len() - pos);
            }
            signatures.push(sig);
        }
        cur = k;
        incl = Some(k_incl);
    }
    let status = if cur.is_zero() {
        ResolutionStatus::Finite
    } else {
        ResolutionStatus::Truncated(max_depth)
    };
    Ok(Resolution {
        terms,
        modules,
        maps,
        status,
        periodicity_hint,
        family_len: family.len(),
    })
}

/// Relative dimension: the resolution length when it terminates in time.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XDimension {
    Finite(usize),
    /// No claim either way; the resolution was cut off.
    Unknown,
}

pub fn x_dimension(family: &Family, m: &PersistenceModule, max_depth: usize) -> Result<XDimension> {
    let res = resolve(family, m, max_depth)?;
    Ok(match res.status {
        ResolutionStatus::Finite => XDimension::Finite(res.length()),
        ResolutionStatus::Truncated(_) => XDimension::Unknown,
    })
}

/// The `k`-th generalized Betti numbers: multiplicities of term `k`.
pub fn betti(res: &Resolution, k: usize) -> Result<Vec<usize>> {
    if let Some(t) = res.terms.get(k) {
        return Ok(t.clone());
    }
    match res.status {
        ResolutionStatus::Finite => Ok(vec![0; res.family_len]),
        ResolutionStatus::Truncated(_) => Err(Error::OutOfRange(k)),
    }
}

/// Members supported inside `supp(m)`. Minimal approximations of `m` (and of
/// its syzygies) through the result agree with those through `family` when
/// every quotient of a member lies in `add(family)`.
pub fn support_restrict(family: &Family, m: &PersistenceModule) -> Result<Family> {
    if !family.quotient_closed {
        return Err(Error::NotQuotientClosed);
    }
    let supp = m.support();
    let members: Vec<Spread> = family
        .members
        .iter()
        .filter(|s| s.support().is_subset(supp))
        .copied()
        .collect();
    let mut sub = Family::new(family.poset.clone(), family.field, members, true)?;
    sub.restricted_to = Some(supp);
    Ok(sub)
}

/// Expands a sub-family multiplicity vector back to the indices of `family`.
pub fn lift_multiplicities(family: &Family, sub: &Family, mult: &[usize]) -> Vec<usize> {
    let mut out = vec![0; family.len()];
    for (i, &k) in mult.iter().enumerate() {
        if k > 0 {
            out[family.index_of(&sub.members()[i]).expect("sub-family member")] += k;
        }
    }
    out
}
