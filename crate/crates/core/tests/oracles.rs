//! Independent brute-force checks of the library's combinatorics and linear
//! algebra.

#![allow(clippy::needless_range_loop)]

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spreadmod::approx::{minimal_approximation, Approximation};
use spreadmod::gen;
use spreadmod::hom::{hom_basis, hom_space_len};
use spreadmod::{
    containment_poset, enumerate_spreads, Family, Fp, Mat, PersistenceModule, Poset, SpreadKind,
};

fn subsets(p: &Poset) -> impl Iterator<Item = u64> {
    1u64..(1u64 << p.len())
}

fn has(s: u64, x: usize) -> bool {
    s >> x & 1 == 1
}

fn convex(p: &Poset, s: u64) -> bool {
    let n = p.len();
    (0..n).all(|a| {
        (0..n).all(|c| {
            !(has(s, a) && has(s, c))
                || (0..n).all(|b| !(p.leq(a, b) && p.leq(b, c)) || has(s, b))
        })
    })
}

/// Connectivity through comparable pairs, which matches Hasse connectivity
/// on convex sets.
fn connected(p: &Poset, s: u64) -> bool {
    let elems: Vec<usize> = (0..p.len()).filter(|&x| has(s, x)).collect();
    let mut seen = vec![elems[0]];
    let mut i = 0;
    while i < seen.len() {
        let x = seen[i];
        for &y in &elems {
            if !seen.contains(&y) && p.comparable(x, y) {
                seen.push(y);
            }
        }
        i += 1;
    }
    seen.len() == elems.len()
}

fn minima(p: &Poset, s: u64) -> usize {
    (0..p.len())
        .filter(|&x| has(s, x) && (0..p.len()).all(|y| y == x || !has(s, y) || !p.leq(y, x)))
        .count()
}

fn maxima(p: &Poset, s: u64) -> usize {
    (0..p.len())
        .filter(|&x| has(s, x) && (0..p.len()).all(|y| y == x || !has(s, y) || !p.leq(x, y)))
        .count()
}

fn upset(p: &Poset, s: u64) -> bool {
    (0..p.len()).all(|x| !has(s, x) || (0..p.len()).all(|y| !p.leq(x, y) || has(s, y)))
}

fn brute(p: &Poset, kind: SpreadKind) -> BTreeSet<u64> {
    let n = p.len();
    match kind {
        SpreadKind::Hook => {
            let mut out = BTreeSet::new();
            for a in 0..n {
                let up: u64 = (0..n).filter(|&c| p.leq(a, c)).map(|c| 1 << c).sum();
                out.insert(up);
                for b in 0..n {
                    if p.lt(a, b) {
                        out.insert((0..n).filter(|&c| p.leq(a, c) && !p.leq(b, c)).map(|c| 1u64 << c).sum());
                    }
                }
            }
            out
        }
        SpreadKind::Projective => (0..n)
            .map(|a| (0..n).filter(|&c| p.leq(a, c)).map(|c| 1u64 << c).sum())
            .collect(),
        _ => subsets(p)
            .filter(|&s| convex(p, s) && connected(p, s))
            .filter(|&s| match kind {
                SpreadKind::ConnectedAll => true,
                SpreadKind::SingleSource => minima(p, s) == 1,
                SpreadKind::Interval => minima(p, s) == 1 && maxima(p, s) == 1,
                SpreadKind::ConnectedUpset => upset(p, s),
                _ => unreachable!(),
            })
            .collect(),
    }
}

#[test]
fn spread_enumeration_matches_subset_search() {
    let kinds = [
        SpreadKind::ConnectedAll,
        SpreadKind::SingleSource,
        SpreadKind::Interval,
        SpreadKind::Hook,
        SpreadKind::ConnectedUpset,
        SpreadKind::Projective,
    ];
    for (name, p) in gen::small_posets() {
        for kind in kinds {
            let got: BTreeSet<u64> = enumerate_spreads(&p, kind, 1 << 20)
                .unwrap()
                .iter()
                .map(|s| s.support().0)
                .collect();
            assert_eq!(got, brute(&p, kind), "{name} {}", kind.name());
        }
    }
}

/// Integer inverse of the zeta matrix.
fn mobius_by_inversion(q: &Poset) -> Vec<Vec<i64>> {
    let n = q.len();
    let order = q.topo_order().to_vec();
    let mut mu = vec![vec![0i64; n]; n];
    // sum_{x <= z <= y} mu(z, y) = delta(x, y), solved from the top down.
    for y in 0..n {
        for &x in order.iter().rev() {
            if !q.leq(x, y) {
                continue;
            }
            let rest: i64 = (0..n)
                .filter(|&z| z != x && q.leq(x, z) && q.leq(z, y))
                .map(|z| mu[z][y])
                .sum();
            mu[x][y] = i64::from(x == y) - rest;
        }
    }
    mu
}

#[test]
fn mobius_matches_zeta_inverse() {
    for (name, p) in gen::small_posets() {
        let spreads = enumerate_spreads(&p, SpreadKind::ConnectedAll, 1 << 20).unwrap();
        let q = containment_poset(&spreads).unwrap();
        let mu = mobius_by_inversion(&q);
        for x in 0..q.len() {
            for y in 0..q.len() {
                if q.leq(x, y) {
                    assert_eq!(q.mobius(x, y).unwrap(), mu[x][y], "{name} {x} {y}");
                }
            }
        }
    }
}

/// Counts natural transformations over a tiny field by enumeration.
fn count_homs(m: &PersistenceModule, n: &PersistenceModule) -> u64 {
    let f = m.field();
    let p = m.poset();
    let shapes: Vec<(usize, usize)> = (0..p.len()).map(|x| (n.dim(x), m.dim(x))).collect();
    let len: usize = shapes.iter().map(|(r, c)| r * c).sum();
    let q = f.prime() as u64;
    let mut count = 0;
    let mut digits = vec![0u32; len];
    for _ in 0..q.pow(len as u32) {
        let mut comps = Vec::new();
        let mut at = 0;
        for &(r, c) in &shapes {
            let mut a = Mat::zeros(f, r, c);
            for j in 0..c {
                for i in 0..r {
                    a.set(i, j, digits[at]);
                    at += 1;
                }
            }
            comps.push(a);
        }
        let natural = p.covers().iter().enumerate().all(|(ci, &(a, b))| {
            n.cover_map(ci).mul(&comps[a]) == comps[b].mul(m.cover_map(ci))
        });
        count += u64::from(natural);
        for d in digits.iter_mut() {
            *d += 1;
            if *d < q as u32 {
                break;
            }
            *d = 0;
        }
    }
    count
}

#[test]
fn hom_dimension_matches_enumeration_over_small_fields() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for prime in [2, 3] {
        let f = Fp::new(prime).unwrap();
        for p in [Arc::new(gen::grid(2, 2, 0)), Arc::new(gen::up_fan(2)), Arc::new(gen::chain(3))] {
            let mut checked = 0;
            while checked < 12 {
                let a = gen::random_module(&p, f, &mut rng, 2);
                let b = gen::random_module(&p, f, &mut rng, 2);
                let len = hom_space_len(&a, &b);
                if (prime as u64).pow(len as u32) > 70_000 {
                    continue;
                }
                let d = hom_basis(&a, &b).unwrap().dim();
                assert_eq!(count_homs(&a, &b), (prime as u64).pow(d as u32));
                checked += 1;
            }
        }
    }
}

fn lifts_everything(fam: &Family, a: &Approximation, m: &PersistenceModule) -> bool {
    fam.modules().iter().all(|r| {
        let through = hom_basis(r, a.domain()).unwrap();
        let cols: Vec<Vec<u32>> = through
            .basis
            .iter()
            .map(|h| a.map.after(h).unwrap().to_vector())
            .collect();
        let rank = Mat::from_columns(m.field(), hom_space_len(r, m), &cols).rank();
        rank == hom_basis(r, m).unwrap().dim()
    })
}

/// Dropping any summand of a minimal approximation destroys the lifting
/// property.
#[test]
fn minimal_approximations_have_no_superfluous_summand() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let f = Fp::default();
    for p in [Arc::new(gen::grid(2, 2, 0)), Arc::new(gen::grid(3, 2, 1))] {
        for kind in [SpreadKind::Interval, SpreadKind::SingleSource, SpreadKind::ConnectedAll] {
            let fam = Family::builtin(p.clone(), f, kind, 10_000).unwrap();
            for _ in 0..6 {
                let m = gen::random_module(&p, f, &mut rng, 3);
                let a = minimal_approximation(&fam, &m).unwrap();
                assert!(lifts_everything(&fam, &a, &m));
                let k = a.summands.len();
                let mut offsets = vec![0usize; p.len()];
                let mut starts = Vec::new();
                for &i in &a.summands {
                    starts.push(offsets.clone());
                    for (x, o) in offsets.iter_mut().enumerate() {
                        *o += fam.module(i).dim(x);
                    }
                }
                for drop in 0..k {
                    let keep: Vec<usize> = (0..k).filter(|&j| j != drop).collect();
                    let parts: Vec<PersistenceModule> =
                        keep.iter().map(|&j| fam.module(a.summands[j]).clone()).collect();
                    let domain = if parts.is_empty() {
                        PersistenceModule::zero(p.clone(), f)
                    } else {
                        PersistenceModule::direct_sum(&parts).unwrap()
                    };
                    let comps = (0..p.len())
                        .map(|x| {
                            let cols: Vec<usize> = keep
                                .iter()
                                .flat_map(|&j| {
                                    let s = starts[j][x];
                                    s..s + fam.module(a.summands[j]).dim(x)
                                })
                                .collect();
                            a.map.component(x).select_columns(&cols)
                        })
                        .collect();
                    let g = spreadmod::Morphism::new(domain, m.clone(), comps).unwrap();
                    let smaller = Approximation {
                        multiplicities: vec![],
                        summands: keep.iter().map(|&j| a.summands[j]).collect(),
                        map: g,
                    };
                    assert!(!lifts_everything(&fam, &smaller, &m));
                }
            }
        }
    }
}

#[test]
fn members_in_sums_are_recovered() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let f = Fp::default();
    let p = Arc::new(gen::grid(3, 2, 1));
    let fam = Family::builtin(p.clone(), f, SpreadKind::ConnectedAll, 10_000).unwrap();
    for _ in 0..10 {
        let (m, mult) = gen::random_spread_sum(&p, f, fam.members(), &mut rng, 3);
        assert_eq!(minimal_approximation(&fam, &m).unwrap().multiplicities, mult);
    }
}
