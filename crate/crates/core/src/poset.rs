//! Finite posets given by their Hasse covers, subsets of them, spreads, and
//! Möbius functions.
//!
//! Elements are dense ids `0..n`. Labels are kept only for input and output.
//! Subsets are 64-bit masks, so every operation that handles subsets needs
//! `n <= 64`; the order relation itself works for any `n` (containment posets
//! of spread collections routinely exceed 64 elements).

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Hard limit on poset size for subset-valued operations.
pub const MAX_SUBSET_ELEMENTS: usize = 64;

/// A subset of poset elements stored as a bitmask.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElemSet(pub u64);

impl ElemSet {
    pub const EMPTY: ElemSet = ElemSet(0);

    pub fn singleton(a: usize) -> Self {
        ElemSet(1 << a)
    }

    pub fn from_elems<I: IntoIterator<Item = usize>>(it: I) -> Self {
        it.into_iter().fold(ElemSet::EMPTY, |s, a| s.with(a))
    }

    pub fn contains(self, a: usize) -> bool {
        a < 64 && self.0 >> a & 1 == 1
    }

    pub fn with(self, a: usize) -> Self {
        ElemSet(self.0 | 1 << a)
    }

    pub fn without(self, a: usize) -> Self {
        ElemSet(self.0 & !(1 << a))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, o: Self) -> Self {
        ElemSet(self.0 | o.0)
    }

    pub fn intersection(self, o: Self) -> Self {
        ElemSet(self.0 & o.0)
    }

    pub fn difference(self, o: Self) -> Self {
        ElemSet(self.0 & !o.0)
    }

    pub fn is_subset(self, o: Self) -> bool {
        self.0 & !o.0 == 0
    }

    /// Elements in increasing id order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    pub fn first(self) -> Option<usize> {
        self.iter().next()
    }
}

impl fmt::Debug for ElemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Fixed-width bit rows for the order relation.
#[derive(Clone, Debug)]
struct BitRows {
    words: usize,
    bits: Vec<u64>,
}

impl BitRows {
    fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        BitRows {
            words,
            bits: vec![0; n * words],
        }
    }

    fn get(&self, r: usize, c: usize) -> bool {
        self.bits[r * self.words + c / 64] >> (c % 64) & 1 == 1
    }

    fn set(&mut self, r: usize, c: usize) {
        self.bits[r * self.words + c / 64] |= 1 << (c % 64);
    }

    fn or_row(&mut self, dst: usize, src: usize) {
        for w in 0..self.words {
            let v = self.bits[src * self.words + w];
            self.bits[dst * self.words + w] |= v;
        }
    }

    fn mask(&self, r: usize) -> u64 {
        self.bits[r * self.words]
    }
}

/// A finite poset presented by its Hasse covers.
pub struct Poset {
    names: Vec<String>,
    covers: Vec<(usize, usize)>,
    upper_covers: Vec<Vec<usize>>,
    lower_covers: Vec<Vec<usize>>,
    /// Row `a` holds `{b : a <= b}`.
    up: BitRows,
    /// Row `b` holds `{a : a <= b}`.
    down: BitRows,
    topo: Vec<usize>,
    index: HashMap<String, usize>,
    mobius_rows: Vec<OnceLock<Vec<i64>>>,
}

impl Clone for Poset {
    fn clone(&self) -> Self {
        Poset::with_labels(self.names.clone(), &self.covers).expect("cloning a valid poset")
    }
}

impl PartialEq for Poset {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.covers == other.covers
    }
}

impl Eq for Poset {}

impl fmt::Debug for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let covers: Vec<String> = self
            .covers
            .iter()
            .map(|&(a, b)| format!("{}->{}", self.names[a], self.names[b]))
            .collect();
        f.debug_struct("Poset")
            .field("elements", &self.names)
            .field("covers", &covers)
            .finish()
    }
}

impl Poset {
    /// Poset on `0..n` with labels `"0"`, `"1"`, ...
    pub fn new(n: usize, covers: &[(usize, usize)]) -> Result<Self> {
        Poset::with_labels((0..n).map(|i| i.to_string()).collect(), covers)
    }

    /// Poset from labels and covers given by label.
    pub fn from_labels(names: &[&str], covers: &[(&str, &str)]) -> Result<Self> {
        let names: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let idx: HashMap<&str, usize> = names
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let lookup = |s: &str| {
            idx.get(s)
                .copied()
                .ok_or_else(|| Error::UnknownElement(s.to_string()))
        };
        let covers = covers
            .iter()
            .map(|&(a, b)| Ok((lookup(a)?, lookup(b)?)))
            .collect::<Result<Vec<_>>>()?;
        Poset::with_labels(names, &covers)
    }

    /// Validates the cover relation: acyclic, no duplicates, no transitive edges.
    pub fn with_labels(names: Vec<String>, covers: &[(usize, usize)]) -> Result<Self> {
        let n = names.len();
        let mut index = HashMap::with_capacity(n);
        for (i, s) in names.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::DuplicateLabel(s.clone()));
            }
        }
        let mut upper_covers = vec![Vec::new(); n];
        let mut lower_covers = vec![Vec::new(); n];
        let mut seen = HashSet::new();
        for (ci, &(a, b)) in covers.iter().enumerate() {
            if a >= n {
                return Err(Error::UnknownElement(a.to_string()));
            }
            if b >= n {
                return Err(Error::UnknownElement(b.to_string()));
            }
            if a == b {
                return Err(Error::CycleDetected(names[a].clone()));
            }
            if !seen.insert((a, b)) {
                return Err(Error::DuplicateCover(names[a].clone(), names[b].clone()));
            }
            upper_covers[a].push(ci);
            lower_covers[b].push(ci);
        }

        // Kahn's algorithm; ties broken by smallest id for determinism.
        let mut indeg: Vec<usize> = lower_covers.iter().map(Vec::len).collect();
        let mut ready: std::collections::BTreeSet<usize> =
            (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut topo = Vec::with_capacity(n);
        while let Some(&a) = ready.iter().next() {
            ready.remove(&a);
            topo.push(a);
            for &ci in &upper_covers[a] {
                let b = covers[ci].1;
                indeg[b] -= 1;
                if indeg[b] == 0 {
                    ready.insert(b);
                }
            }
        }
        if topo.len() < n {
            let stuck = (0..n).find(|&i| indeg[i] > 0).unwrap();
            return Err(Error::CycleDetected(names[stuck].clone()));
        }

        let mut up = BitRows::new(n);
        for &a in topo.iter().rev() {
            up.set(a, a);
            for &ci in &upper_covers[a] {
                up.or_row(a, covers[ci].1);
            }
        }
        let mut down = BitRows::new(n);
        for a in 0..n {
            for b in 0..n {
                if up.get(a, b) {
                    down.set(b, a);
                }
            }
        }

        for &(a, b) in covers {
            let between = (0..n).find(|&c| c != a && c != b && up.get(a, c) && up.get(c, b));
            if between.is_some() {
                return Err(Error::RedundantCover(names[a].clone(), names[b].clone()));
            }
        }

        Ok(Poset {
            names,
            covers: covers.to_vec(),
            upper_covers,
            lower_covers,
            up,
            down,
            topo,
            index,
            mobius_rows: (0..n).map(|_| OnceLock::new()).collect(),
        })
    }

    /// Poset from an order relation given as a predicate; covers are its
    /// transitive reduction. `leq` must be a partial order.
    pub fn from_order(names: Vec<String>, leq: impl Fn(usize, usize) -> bool) -> Result<Self> {
        let n = names.len();
        let lt = |a: usize, b: usize| a != b && leq(a, b);
        let mut covers = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if lt(a, b) && !(0..n).any(|c| lt(a, c) && lt(c, b)) {
                    covers.push((a, b));
                }
            }
        }
        Poset::with_labels(names, &covers)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn label(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn labels(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownElement(label.to_string()))
    }

    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    /// Index of the cover `a -> b`, if it is one.
    pub fn cover_index(&self, a: usize, b: usize) -> Option<usize> {
        self.upper_covers[a]
            .iter()
            .copied()
            .find(|&ci| self.covers[ci].1 == b)
    }

    /// Cover indices with `a` at the bottom.
    pub fn upper_covers(&self, a: usize) -> &[usize] {
        &self.upper_covers[a]
    }

    /// Cover indices with `b` at the top.
    pub fn lower_covers(&self, b: usize) -> &[usize] {
        &self.lower_covers[b]
    }

    /// A linear extension, deterministic.
    pub fn topo_order(&self) -> &[usize] {
        &self.topo
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.up.get(a, b)
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq(a, b)
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.leq(a, b) || self.leq(b, a)
    }

    /// Errors with `TooLarge` when subsets cannot be represented.
    pub fn check_subset_capable(&self) -> Result<()> {
        if self.len() > MAX_SUBSET_ELEMENTS {
            Err(Error::TooLarge(self.len()))
        } else {
            Ok(())
        }
    }

    pub fn all(&self) -> ElemSet {
        debug_assert!(self.len() <= MAX_SUBSET_ELEMENTS);
        if self.len() == 64 {
            ElemSet(u64::MAX)
        } else {
            ElemSet((1u64 << self.len()) - 1)
        }
    }

    /// Principal upset `{x : a <= x}`.
    pub fn up_set(&self, a: usize) -> ElemSet {
        ElemSet(self.up.mask(a))
    }

    /// Principal downset `{x : x <= b}`.
    pub fn down_set(&self, b: usize) -> ElemSet {
        ElemSet(self.down.mask(b))
    }

    /// `{x : x >= some element of s}`.
    pub fn up_closure(&self, s: ElemSet) -> ElemSet {
        s.iter().fold(ElemSet::EMPTY, |acc, a| acc.union(self.up_set(a)))
    }

    /// `{x : x <= some element of s}`.
    pub fn down_closure(&self, s: ElemSet) -> ElemSet {
        s.iter().fold(ElemSet::EMPTY, |acc, b| acc.union(self.down_set(b)))
    }

    /// Smallest convex set containing `s`.
    pub fn convex_closure(&self, s: ElemSet) -> ElemSet {
        self.up_closure(s).intersection(self.down_closure(s))
    }

    pub fn minimal_elements(&self, s: ElemSet) -> ElemSet {
        ElemSet::from_elems(s.iter().filter(|&x| !s.iter().any(|y| self.lt(y, x))))
    }

    pub fn maximal_elements(&self, s: ElemSet) -> ElemSet {
        ElemSet::from_elems(s.iter().filter(|&x| !s.iter().any(|y| self.lt(x, y))))
    }

    /// First comparable pair, if any.
    pub fn antichain_violation(&self, s: ElemSet) -> Option<(usize, usize)> {
        for a in s.iter() {
            for b in s.iter() {
                if self.lt(a, b) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    pub fn is_antichain(&self, s: ElemSet) -> bool {
        self.antichain_violation(s).is_none()
    }

    /// A witness `(x, z, y)` with `x <= z <= y`, `x, y` in `s`, `z` not in `s`.
    pub fn convexity_violation(&self, s: ElemSet) -> Option<(usize, usize, usize)> {
        let missing = self.convex_closure(s).difference(s);
        let z = missing.first()?;
        let x = s.iter().find(|&x| self.leq(x, z)).unwrap();
        let y = s.iter().find(|&y| self.leq(z, y)).unwrap();
        Some((x, z, y))
    }

    pub fn is_convex(&self, s: ElemSet) -> bool {
        self.convex_closure(s) == s
    }

    /// Connectivity of the undirected Hasse graph restricted to `s`. The empty
    /// set is not connected.
    pub fn is_connected(&self, s: ElemSet) -> bool {
        let Some(start) = s.first() else {
            return false;
        };
        let mut seen = ElemSet::singleton(start);
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for y in self.hasse_neighbors(x) {
                if s.contains(y) && !seen.contains(y) {
                    seen = seen.with(y);
                    queue.push_back(y);
                }
            }
        }
        seen == s
    }

    /// Connected components of `s` in the Hasse graph, ordered by smallest element.
    pub fn components(&self, s: ElemSet) -> Vec<ElemSet> {
        let mut rest = s;
        let mut out = Vec::new();
        while let Some(start) = rest.first() {
            let mut comp = ElemSet::singleton(start);
            let mut queue = VecDeque::from([start]);
            while let Some(x) = queue.pop_front() {
                for y in self.hasse_neighbors(x) {
                    if rest.contains(y) && !comp.contains(y) {
                        comp = comp.with(y);
                        queue.push_back(y);
                    }
                }
            }
            rest = rest.difference(comp);
            out.push(comp);
        }
        out
    }

    pub fn hasse_neighbors(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        self.upper_covers[x]
            .iter()
            .map(|&ci| self.covers[ci].1)
            .chain(self.lower_covers[x].iter().map(|&ci| self.covers[ci].0))
    }

    /// Covers of the subposet induced on a convex set `s`. For convex `s`
    /// these are exactly the covers of the parent with both ends in `s`.
    pub fn induced_covers(&self, s: ElemSet) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in s.iter() {
            for b in s.iter() {
                if self.lt(a, b) && !s.iter().any(|c| self.lt(a, c) && self.lt(c, b)) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn sub_poset(&self, s: ElemSet) -> SubPoset {
        SubPoset {
            elements: s,
            covers: self.induced_covers(s),
        }
    }

    /// Comma separated labels in braces, e.g. `{13,41}`.
    pub fn format_set(&self, s: ElemSet) -> String {
        let parts: Vec<&str> = s.iter().map(|a| self.label(a)).collect();
        format!("{{{}}}", parts.join(","))
    }

    pub fn set_from_labels(&self, labels: &[&str]) -> Result<ElemSet> {
        self.check_subset_capable()?;
        labels
            .iter()
            .try_fold(ElemSet::EMPTY, |s, l| Ok(s.with(self.index_of(l)?)))
    }

    /// True iff every principal upset is a chain.
    pub fn principal_upsets_totally_ordered(&self) -> bool {
        let n = self.len();
        (0..n).all(|a| {
            let ups: Vec<usize> = (0..n).filter(|&x| self.leq(a, x)).collect();
            ups.iter()
                .all(|&x| ups.iter().all(|&y| self.comparable(x, y)))
        })
    }

    /// Möbius function `mu(x, y)` with `mu(x, x) = 1` and
    /// `mu(x, y) = -sum_{x <= z < y} mu(x, z)`. Rows are memoized.
    pub fn mobius(&self, x: usize, y: usize) -> Result<i64> {
        if x >= self.len() {
            return Err(Error::OutOfRange(x));
        }
        if y >= self.len() {
            return Err(Error::OutOfRange(y));
        }
        if !self.leq(x, y) {
            return Err(Error::NotComparable(
                self.label(x).to_string(),
                self.label(y).to_string(),
            ));
        }
        Ok(self.mobius_row(x)[y])
    }

    /// `mu(x, .)` for all elements; zero where `x` is not below.
    pub fn mobius_row(&self, x: usize) -> &[i64] {
        self.mobius_rows[x].get_or_init(|| {
            let n = self.len();
            let mut row = vec![0i64; n];
            for &y in &self.topo {
                if !self.leq(x, y) {
                    continue;
                }
                if y == x {
                    row[y] = 1;
                } else {
                    let s: i64 = (0..n)
                        .filter(|&z| z != y && self.leq(x, z) && self.leq(z, y))
                        .map(|z| row[z])
                        .sum();
                    row[y] = -s;
                }
            }
            row
        })
    }

    /// Whether the Hasse graph is a path (Dynkin type A, any orientation).
    pub fn is_type_a(&self) -> bool {
        let n = self.len();
        if n == 0 {
            return false;
        }
        if self.covers.len() != n - 1 {
            return false;
        }
        if (0..n).any(|x| self.hasse_neighbors(x).count() > 2) {
            return false;
        }
        if n > MAX_SUBSET_ELEMENTS {
            return false;
        }
        self.is_connected(self.all())
    }

    /// The elements along the path when the poset is of type A, starting from
    /// the smallest-id endpoint.
    pub fn path_order(&self) -> Option<Vec<usize>> {
        if !self.is_type_a() {
            return None;
        }
        let n = self.len();
        let start = (0..n)
            .find(|&x| self.hasse_neighbors(x).count() <= 1)
            .unwrap();
        let mut order = vec![start];
        let mut prev = usize::MAX;
        let mut cur = start;
        while order.len() < n {
            let next = self.hasse_neighbors(cur).find(|&y| y != prev).unwrap();
            prev = cur;
            cur = next;
            order.push(cur);
        }
        Some(order)
    }
}

/// A subset of a poset with its induced covers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubPoset {
    pub elements: ElemSet,
    pub covers: Vec<(usize, usize)>,
}

/// A convex subset `[A, B]` in canonical form: `sources` are its minimal
/// elements and `targets` its maximal elements. Equality and ordering are by
/// support bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Spread {
    support: ElemSet,
    sources: ElemSet,
    targets: ElemSet,
}

impl fmt::Debug for Spread {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Spread{:?}->{:?}", self.sources, self.targets)
    }
}

impl Spread {
    /// The spread `[A, B] = {x : a <= x <= b for some a in A, b in B}`.
    pub fn from_antichains(p: &Poset, sources: ElemSet, targets: ElemSet) -> Result<Spread> {
        p.check_subset_capable()?;
        if sources.is_empty() || targets.is_empty() {
            return Err(Error::EmptyAntichain);
        }
        for s in [sources, targets] {
            if let Some((a, b)) = p.antichain_violation(s) {
                return Err(Error::NotAntichain(
                    p.label(a).to_string(),
                    p.label(b).to_string(),
                ));
            }
        }
        for a in sources.iter() {
            if !targets.iter().any(|b| p.leq(a, b)) {
                return Err(Error::OrderViolated(format!(
                    "source {} lies below no target",
                    p.label(a)
                )));
            }
        }
        for b in targets.iter() {
            if !sources.iter().any(|a| p.leq(a, b)) {
                return Err(Error::OrderViolated(format!(
                    "target {} lies above no source",
                    p.label(b)
                )));
            }
        }
        let support = p.up_closure(sources).intersection(p.down_closure(targets));
        Ok(Spread {
            support,
            sources,
            targets,
        })
    }

    /// Convenience wrapper taking labels.
    pub fn from_labels(p: &Poset, sources: &[&str], targets: &[&str]) -> Result<Spread> {
        Spread::from_antichains(p, p.set_from_labels(sources)?, p.set_from_labels(targets)?)
    }

    /// Canonical spread of a nonempty convex set.
    pub fn from_convex(p: &Poset, s: ElemSet) -> Result<Spread> {
        p.check_subset_capable()?;
        if s.is_empty() {
            return Err(Error::EmptyAntichain);
        }
        if let Some((x, z, y)) = p.convexity_violation(s) {
            return Err(Error::NotConvex(
                p.label(x).to_string(),
                p.label(z).to_string(),
                p.label(y).to_string(),
            ));
        }
        Ok(Spread {
            support: s,
            sources: p.minimal_elements(s),
            targets: p.maximal_elements(s),
        })
    }

    /// The principal upset `[a, oo]`, support of the projective at `a`.
    pub fn principal_upset(p: &Poset, a: usize) -> Spread {
        Spread::from_convex(p, p.up_set(a)).expect("principal upsets are convex")
    }

    /// The singleton `[a, a]`.
    pub fn point(a: usize) -> Spread {
        let s = ElemSet::singleton(a);
        Spread {
            support: s,
            sources: s,
            targets: s,
        }
    }

    pub fn support(&self) -> ElemSet {
        self.support
    }

    pub fn sources(&self) -> ElemSet {
        self.sources
    }

    pub fn targets(&self) -> ElemSet {
        self.targets
    }

    pub fn contains(&self, x: usize) -> bool {
        self.support.contains(x)
    }

    pub fn is_connected(&self, p: &Poset) -> bool {
        p.is_connected(self.support)
    }

    pub fn is_single_source(&self) -> bool {
        self.sources.len() == 1
    }

    pub fn is_interval(&self) -> bool {
        self.sources.len() == 1 && self.targets.len() == 1
    }

    pub fn is_upset(&self, p: &Poset) -> bool {
        p.up_closure(self.support) == self.support
    }

    pub fn is_downset(&self, p: &Poset) -> bool {
        p.down_closure(self.support) == self.support
    }

    /// `[{13,41},{43}]` style rendering.
    pub fn display(&self, p: &Poset) -> String {
        format!("[{},{}]", p.format_set(self.sources), p.format_set(self.targets))
    }
}

/// Support of the hook `<a, b<`: `{c : a <= c, not b <= c}`. With `b` absent
/// this is the full principal upset of `a`.
pub fn hook_support(p: &Poset, a: usize, b: Option<usize>) -> Result<ElemSet> {
    p.check_subset_capable()?;
    match b {
        None => Ok(p.up_set(a)),
        Some(b) => {
            if !p.lt(a, b) {
                return Err(Error::NotGreater(
                    p.label(a).to_string(),
                    p.label(b).to_string(),
                ));
            }
            Ok(p.up_set(a).difference(p.up_set(b)))
        }
    }
}

/// Which spreads to enumerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpreadKind {
    /// All connected convex subsets.
    ConnectedAll,
    /// Spreads with exactly one source.
    SingleSource,
    /// Classical intervals `[a, b]`.
    Interval,
    /// Hooks `<a, b<`, including `b` absent.
    Hook,
    /// Connected upsets.
    ConnectedUpset,
    /// Principal upsets `[a, oo]`.
    Projective,
}

impl SpreadKind {
    pub fn name(self) -> &'static str {
        match self {
            SpreadKind::ConnectedAll => "connected_spreads",
            SpreadKind::SingleSource => "single_source",
            SpreadKind::Interval => "intervals",
            SpreadKind::Hook => "hooks",
            SpreadKind::ConnectedUpset => "connected_upsets",
            SpreadKind::Projective => "projectives",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "connected_spreads" | "connected_all" => SpreadKind::ConnectedAll,
            "single_source" => SpreadKind::SingleSource,
            "intervals" | "interval" => SpreadKind::Interval,
            "hooks" | "hook" => SpreadKind::Hook,
            "connected_upsets" | "connected_upset" => SpreadKind::ConnectedUpset,
            "projectives" | "projective" => SpreadKind::Projective,
            _ => return None,
        })
    }
}

/// Nonempty antichains inside `within`, each reported once.
fn antichains_in(p: &Poset, within: ElemSet, cap: usize) -> Result<Vec<ElemSet>> {
    let elems: Vec<usize> = within.iter().collect();
    let mut out = Vec::new();
    fn rec(
        p: &Poset,
        elems: &[usize],
        i: usize,
        cur: ElemSet,
        out: &mut Vec<ElemSet>,
        cap: usize,
    ) -> Result<()> {
        if i == elems.len() {
            if !cur.is_empty() {
                if out.len() >= cap {
                    return Err(Error::CapExceeded(cap));
                }
                out.push(cur);
            }
            return Ok(());
        }
        rec(p, elems, i + 1, cur, out, cap)?;
        let x = elems[i];
        if cur.iter().all(|y| !p.comparable(x, y)) {
            rec(p, elems, i + 1, cur.with(x), out, cap)?;
        }
        Ok(())
    }
    rec(p, &elems, 0, ElemSet::EMPTY, &mut out, cap)?;
    Ok(out)
}

/// Complete, duplicate-free list of spreads of the requested kind, sorted by
/// support bitmask. Fails with `CapExceeded` past `cap` results.
pub fn enumerate_spreads(p: &Poset, kind: SpreadKind, cap: usize) -> Result<Vec<Spread>> {
    p.check_subset_capable()?;
    let n = p.len();
    let mut supports: Vec<ElemSet> = Vec::new();
    let push = |supports: &mut Vec<ElemSet>, s: ElemSet| -> Result<()> {
        if supports.len() >= cap {
            return Err(Error::CapExceeded(cap));
        }
        supports.push(s);
        Ok(())
    };
    match kind {
        SpreadKind::Interval => {
            for a in 0..n {
                for b in 0..n {
                    if p.leq(a, b) {
                        push(&mut supports, p.up_set(a).intersection(p.down_set(b)))?;
                    }
                }
            }
        }
        SpreadKind::Projective => {
            for a in 0..n {
                push(&mut supports, p.up_set(a))?;
            }
        }
        SpreadKind::Hook => {
            for a in 0..n {
                push(&mut supports, hook_support(p, a, None)?)?;
                for b in 0..n {
                    if p.lt(a, b) {
                        push(&mut supports, hook_support(p, a, Some(b))?)?;
                    }
                }
            }
        }
        SpreadKind::SingleSource => {
            for a in 0..n {
                let up = p.up_set(a);
                for targets in antichains_in(p, up, cap)? {
                    push(&mut supports, up.intersection(p.down_closure(targets)))?;
                }
            }
        }
        SpreadKind::ConnectedUpset => {
            for sources in antichains_in(p, p.all(), cap)? {
                let s = p.up_closure(sources);
                if p.is_connected(s) {
                    push(&mut supports, s)?;
                }
            }
        }
        SpreadKind::ConnectedAll => {
            // Grow from singletons by one Hasse neighbour at a time, closing
            // convexly after each step. Every connected convex set is reached
            // from any of its elements.
            let mut seen: HashSet<ElemSet> = HashSet::new();
            let mut queue: VecDeque<ElemSet> = VecDeque::new();
            for a in 0..n {
                let s = ElemSet::singleton(a);
                seen.insert(s);
                queue.push_back(s);
            }
            while let Some(s) = queue.pop_front() {
                if seen.len() > cap {
                    return Err(Error::CapExceeded(cap));
                }
                let mut nbrs = ElemSet::EMPTY;
                for x in s.iter() {
                    for y in p.hasse_neighbors(x) {
                        nbrs = nbrs.with(y);
                    }
                }
                for y in nbrs.difference(s).iter() {
                    let t = p.convex_closure(s.with(y));
                    if seen.insert(t) {
                        queue.push_back(t);
                    }
                }
            }
            if seen.len() > cap {
                return Err(Error::CapExceeded(cap));
            }
            supports.extend(seen);
        }
    }
    supports.sort();
    supports.dedup();
    supports
        .into_iter()
        .map(|s| Spread::from_convex(p, s))
        .collect()
}

/// Poset on `0..k` ordered by support inclusion of the given spreads.
pub fn containment_poset(spreads: &[Spread]) -> Result<Poset> {
    let mut seen = HashSet::new();
    for s in spreads {
        if !seen.insert(s.support()) {
            return Err(Error::DuplicateSpread(format!("{:?}", s.support())));
        }
    }
    let names = (0..spreads.len()).map(|i| i.to_string()).collect();
    Poset::from_order(names, |i, j| {
        spreads[i].support().is_subset(spreads[j].support())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    #[test]
    fn chain_of_two() {
        let p = Poset::new(2, &[(0, 1)]).unwrap();
        assert!(p.leq(0, 1));
        assert!(!p.leq(1, 0));
    }

    #[test]
    fn grid_2x2_order() {
        let p = gen::grid(2, 2, 0);
        let i = |s: &str| p.index_of(s).unwrap();
        assert!(p.leq(i("00"), i("11")));
        assert!(!p.comparable(i("01"), i("10")));
    }

    #[test]
    fn rejects_cycles_and_redundant_covers() {
        assert!(matches!(
            Poset::new(2, &[(0, 1), (1, 0)]),
            Err(Error::CycleDetected(_))
        ));
        assert!(matches!(
            Poset::new(3, &[(0, 1), (1, 2), (0, 2)]),
            Err(Error::RedundantCover(..))
        ));
        assert!(matches!(
            Poset::new(1, &[(0, 0)]),
            Err(Error::CycleDetected(_))
        ));
    }

    #[test]
    fn point_spread() {
        let p = gen::chain(3);
        let s = Spread::from_antichains(&p, ElemSet::singleton(1), ElemSet::singleton(1)).unwrap();
        assert_eq!(s.support(), ElemSet::singleton(1));
    }

    #[test]
    fn spread_on_3x5_grid() {
        let p = gen::grid(5, 3, 1);
        let s = Spread::from_labels(&p, &["13", "41"], &["43"]).unwrap();
        let expected = p
            .set_from_labels(&["13", "23", "33", "43", "41", "42"])
            .unwrap();
        assert_eq!(s.support(), expected);
    }

    #[test]
    fn spread_on_a5_tilde() {
        let p = gen::a5_tilde();
        let s = Spread::from_labels(&p, &["1", "2"], &["4", "6"]).unwrap();
        assert_eq!(s.support(), p.set_from_labels(&["1", "2", "4", "6"]).unwrap());
    }

    #[test]
    fn spread_errors() {
        let p = gen::chain(3);
        assert!(matches!(
            Spread::from_antichains(&p, ElemSet::from_elems([0, 1]), ElemSet::singleton(2)),
            Err(Error::NotAntichain(..))
        ));
        assert!(matches!(
            Spread::from_antichains(&p, ElemSet::singleton(2), ElemSet::singleton(0)),
            Err(Error::OrderViolated(_))
        ));
        assert!(matches!(
            Spread::from_antichains(&p, ElemSet::EMPTY, ElemSet::singleton(0)),
            Err(Error::EmptyAntichain)
        ));
        assert!(matches!(
            Spread::from_convex(&p, ElemSet::from_elems([0, 2])),
            Err(Error::NotConvex(..))
        ));
    }

    #[test]
    fn whole_poset_as_spread() {
        let p = gen::grid(2, 3, 1);
        let s = Spread::from_convex(&p, p.all()).unwrap();
        assert_eq!(s.sources(), p.set_from_labels(&["11"]).unwrap());
        assert_eq!(s.targets(), p.set_from_labels(&["23"]).unwrap());
    }

    #[test]
    fn connectivity() {
        let p = gen::grid(2, 2, 0);
        assert!(p.is_connected(ElemSet::singleton(0)));
        assert!(!p.is_connected(p.set_from_labels(&["01", "10"]).unwrap()));
        assert!(!p.is_connected(ElemSet::EMPTY));
    }

    #[test]
    fn interval_count_on_chain() {
        for n in 1..7 {
            let p = gen::chain(n);
            let iv = enumerate_spreads(&p, SpreadKind::Interval, 1000).unwrap();
            assert_eq!(iv.len(), n * (n + 1) / 2);
            let all = enumerate_spreads(&p, SpreadKind::ConnectedAll, 1000).unwrap();
            assert_eq!(all, iv);
        }
    }

    #[test]
    fn hooks_on_2x2_grid() {
        let p = gen::grid(2, 2, 0);
        let hooks = enumerate_spreads(&p, SpreadKind::Hook, 100).unwrap();
        let pairs = (0..4)
            .flat_map(|a| (0..4).map(move |b| (a, b)))
            .filter(|&(a, b)| p.leq(a, b))
            .count();
        assert_eq!(hooks.len(), pairs);
        // Oracle: evaluate the defining condition directly.
        let mut expected: Vec<ElemSet> = Vec::new();
        for a in 0..4 {
            expected.push(ElemSet::from_elems((0..4).filter(|&c| p.leq(a, c))));
            for b in 0..4 {
                if p.lt(a, b) {
                    expected.push(ElemSet::from_elems(
                        (0..4).filter(|&c| p.leq(a, c) && !p.leq(b, c)),
                    ));
                }
            }
        }
        expected.sort();
        let got: Vec<ElemSet> = hooks.iter().map(|s| s.support()).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn cap_is_enforced() {
        let p = gen::grid(3, 3, 0);
        assert!(matches!(
            enumerate_spreads(&p, SpreadKind::ConnectedAll, 10),
            Err(Error::CapExceeded(10))
        ));
    }

    #[test]
    fn principal_upsets() {
        assert!(gen::chain(4).principal_upsets_totally_ordered());
        let p = Poset::from_labels(
            &["1", "2", "3", "4", "5"],
            &[("1", "2"), ("2", "4"), ("3", "4"), ("4", "5")],
        )
        .unwrap();
        assert!(p.principal_upsets_totally_ordered());
        assert!(!gen::grid(2, 2, 0).principal_upsets_totally_ordered());
    }

    #[test]
    fn mobius_basics() {
        let c = gen::chain(3);
        assert_eq!(c.mobius(1, 1).unwrap(), 1);
        assert_eq!(c.mobius(0, 1).unwrap(), -1);
        assert_eq!(c.mobius(0, 2).unwrap(), 0);
        // Boolean lattice of rank 2: mu(bottom, top) = -(1 - 1 - 1) = 1.
        let b = gen::grid(2, 2, 0);
        assert_eq!(b.mobius(0, 3).unwrap(), 1);
        assert!(matches!(c.mobius(2, 0), Err(Error::NotComparable(..))));
    }

    #[test]
    fn containment_of_chain_intervals() {
        let p = gen::chain(4);
        let iv = enumerate_spreads(&p, SpreadKind::Interval, 100).unwrap();
        let q = containment_poset(&iv).unwrap();
        let ends = |s: &Spread| (s.sources().first().unwrap(), s.targets().first().unwrap());
        for (i, s) in iv.iter().enumerate() {
            for (j, t) in iv.iter().enumerate() {
                let (a, b) = ends(s);
                let (c, d) = ends(t);
                assert_eq!(q.leq(i, j), c <= a && a <= b && b <= d);
            }
        }
        assert!(matches!(
            containment_poset(&[iv[0], iv[0]]),
            Err(Error::DuplicateSpread(_))
        ));
    }

    #[test]
    fn antichain_family_is_discrete() {
        let pts: Vec<Spread> = (0..3).map(Spread::point).collect();
        let q = containment_poset(&pts).unwrap();
        assert!(q.covers().is_empty());
    }

    #[test]
    fn type_a_detection() {
        assert!(gen::chain(4).is_type_a());
        let zigzag = Poset::new(3, &[(0, 1), (2, 1)]).unwrap();
        assert!(zigzag.is_type_a());
        assert_eq!(zigzag.path_order().unwrap(), vec![0, 1, 2]);
        assert!(!gen::grid(2, 2, 0).is_type_a());
        assert!(!gen::a5_tilde().is_type_a());
    }
}
