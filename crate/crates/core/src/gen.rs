//! Standard posets, worked example modules, and random module generators.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::field::{Fp, Mat};
use crate::hom::cokernel_module;
use crate::module::{Morphism, PersistenceModule};
use crate::poset::{ElemSet, Poset, Spread};

/// The product of chains `{base..base+w} x {base..base+h}`. Element `(x, y)`
/// is labelled `"{x}{y}"` and has id `(x - base) * h + (y - base)`.
pub fn grid(w: usize, h: usize, base: usize) -> Poset {
    let names: Vec<String> = (0..w)
        .flat_map(|x| (0..h).map(move |y| format!("{}{}", x + base, y + base)))
        .collect();
    let id = |x: usize, y: usize| x * h + y;
    let mut covers = Vec::new();
    for x in 0..w {
        for y in 0..h {
            if y + 1 < h {
                covers.push((id(x, y), id(x, y + 1)));
            }
            if x + 1 < w {
                covers.push((id(x, y), id(x + 1, y)));
            }
        }
    }
    Poset::with_labels(names, &covers).expect("grids are posets")
}

/// `0 < 1 < ... < n-1`.
pub fn chain(n: usize) -> Poset {
    let covers: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
    Poset::new(n, &covers).expect("chains are posets")
}

/// One bottom element `0` covered by `1..=k`.
pub fn up_fan(k: usize) -> Poset {
    let covers: Vec<(usize, usize)> = (1..=k).map(|i| (0, i)).collect();
    Poset::new(k + 1, &covers).expect("fans are posets")
}

/// Elements `1..=k` all covered by one top element `0`.
pub fn down_fan(k: usize) -> Poset {
    let covers: Vec<(usize, usize)> = (1..=k).map(|i| (i, 0)).collect();
    Poset::new(k + 1, &covers).expect("fans are posets")
}

/// Crown with `m` minima and `m` maxima whose Hasse graph is a `2m`-cycle
/// (type `Ã_{2m-1}`). Minima are `1..=m`, maxima `m+1..=2m`; for `m = 3`
/// this is the hexagon 1-4-2-5-3-6-1 of [`a5_tilde`].
pub fn crown(m: usize) -> Poset {
    assert!(m >= 2);
    let names: Vec<String> = (1..=2 * m).map(|i| i.to_string()).collect();
    let mut covers = Vec::new();
    for i in 0..m {
        covers.push((i, m + i));
        covers.push((i, m + (i + m - 1) % m));
    }
    covers.sort();
    Poset::with_labels(names, &covers).expect("crowns are posets")
}

/// The hexagon with minima 1, 2, 3 and maxima 4, 5, 6: 1 < 4, 6; 2 < 4, 5;
/// 3 < 5, 6.
pub fn a5_tilde() -> Poset {
    Poset::from_labels(
        &["1", "2", "3", "4", "5", "6"],
        &[
            ("1", "4"),
            ("1", "6"),
            ("2", "4"),
            ("2", "5"),
            ("3", "5"),
            ("3", "6"),
        ],
    )
    .expect("hexagon is a poset")
}

/// A path `0 - 1 - ... - n-1` with each edge oriented at random.
pub fn random_type_a<R: Rng>(n: usize, rng: &mut R) -> Poset {
    let covers: Vec<(usize, usize)> = (1..n)
        .map(|i| {
            if rng.gen_bool(0.5) {
                (i - 1, i)
            } else {
                (i, i - 1)
            }
        })
        .collect();
    Poset::new(n, &covers).expect("paths are posets")
}

/// A fixed family of small posets (at most six elements): chains, grids,
/// fans, crowns, zigzags and a tree whose principal upsets are chains.
pub fn small_posets() -> Vec<(String, Poset)> {
    let mut out = Vec::new();
    for n in 1..=6 {
        out.push((format!("chain{n}"), chain(n)));
    }
    out.push(("grid2x2".into(), grid(2, 2, 0)));
    out.push(("grid2x3".into(), grid(3, 2, 1)));
    for k in 2..=4 {
        out.push((format!("upfan{k}"), up_fan(k)));
        out.push((format!("downfan{k}"), down_fan(k)));
    }
    out.push(("crown2".into(), crown(2)));
    out.push(("hexagon".into(), a5_tilde()));
    out.push((
        "zigzag5".into(),
        Poset::new(5, &[(0, 1), (2, 1), (2, 3), (4, 3)]).unwrap(),
    ));
    out.push((
        "zigzag6".into(),
        Poset::new(6, &[(1, 0), (1, 2), (3, 2), (3, 4), (5, 4)]).unwrap(),
    ));
    out.push((
        "tree5".into(),
        Poset::from_labels(
            &["1", "2", "3", "4", "5"],
            &[("1", "2"), ("2", "4"), ("3", "4"), ("4", "5")],
        )
        .unwrap(),
    ));
    out.push((
        "diamond_tail".into(),
        Poset::new(5, &[(0, 1), (0, 2), (1, 3), (2, 3), (3, 4)]).unwrap(),
    ));
    out
}

/// The module `M` on the 2x2 grid with `K^2` at 00 mapping to 01 by `[1 0]`
/// and to 10 by `[0 1]`; a direct sum of two interval modules.
pub fn recvrk_m(p: &Arc<Poset>, f: Fp) -> PersistenceModule {
    recvrk(p, f, [0, 1])
}

/// The module `M'`: as `M` but both maps out of 00 are `[1 0]`.
pub fn recvrk_mprime(p: &Arc<Poset>, f: Fp) -> PersistenceModule {
    recvrk(p, f, [1, 0])
}

fn recvrk(p: &Arc<Poset>, f: Fp, right: [i64; 2]) -> PersistenceModule {
    let i = |s: &str| p.index_of(s).unwrap();
    PersistenceModule::from_cover_list(
        p.clone(),
        f,
        vec![2, 1, 1, 0],
        &[
            (i("00"), i("01"), Mat::from_rows(f, 2, &[vec![1, 0]])),
            (i("00"), i("10"), Mat::from_rows(f, 2, &[right.to_vec()])),
        ],
    )
    .expect("example module commutes")
}

/// Support on the 2x3 grid `grid(3, 2, 1)` from a matrix whose first row is
/// the top row (`y = 2`) and second row the bottom row (`y = 1`).
pub fn grid23_support(p: &Poset, rows: [[u8; 3]; 2]) -> ElemSet {
    let mut s = ElemSet::EMPTY;
    for (row, y) in rows.iter().zip([2, 1]) {
        for (x, &bit) in row.iter().enumerate() {
            if bit == 1 {
                s = s.with(p.index_of(&format!("{}{y}", x + 1)).unwrap());
            }
        }
    }
    s
}

/// Spread module on the 2x3 grid given by its support matrix.
pub fn grid23_spread_module(p: &Arc<Poset>, f: Fp, rows: [[u8; 3]; 2]) -> PersistenceModule {
    let s = Spread::from_convex(p, grid23_support(p, rows)).expect("convex support");
    PersistenceModule::spread_module(p.clone(), f, &s)
}

/// The indecomposable on the 2x3 grid with dimension vector `[1 1 0; 1 2 1]`.
pub fn gen_rk_m(p: &Arc<Poset>, f: Fp) -> PersistenceModule {
    let i = |s: &str| p.index_of(s).unwrap();
    let m = |cols: usize, rows: &[Vec<i64>]| Mat::from_rows(f, cols, rows);
    let mut dims = vec![0; p.len()];
    for (l, d) in [("11", 1), ("21", 2), ("31", 1), ("12", 1), ("22", 1), ("32", 0)] {
        dims[i(l)] = d;
    }
    PersistenceModule::from_cover_list(
        p.clone(),
        f,
        dims,
        &[
            (i("11"), i("21"), m(1, &[vec![1], vec![1]])),
            (i("21"), i("31"), m(2, &[vec![0, 1]])),
            (i("11"), i("12"), m(1, &[vec![1]])),
            (i("21"), i("22"), m(2, &[vec![1, 0]])),
            (i("12"), i("22"), m(1, &[vec![1]])),
        ],
    )
    .expect("example module commutes")
}

/// Random finitely presented module: the cokernel of a random map between
/// sums of indecomposable projectives. Resamples until every dimension is at
/// most `max_dim`.
pub fn random_module<R: Rng>(
    p: &Arc<Poset>,
    f: Fp,
    rng: &mut R,
    max_dim: usize,
) -> PersistenceModule {
    let n = p.len();
    loop {
        let gens: Vec<usize> = (0..rng.gen_range(1..=4)).map(|_| rng.gen_range(0..n)).collect();
        let rels: Vec<usize> = (0..rng.gen_range(0..=3)).map(|_| rng.gen_range(0..n)).collect();
        let coef: Vec<Vec<i64>> = gens
            .iter()
            .map(|_| {
                rels.iter()
                    .map(|_| *[0, 0, 1, 1, -1, 2, 3].choose(rng).unwrap())
                    .collect()
            })
            .collect();
        let m = presented_module(p, f, &gens, &rels, &coef);
        if !m.is_zero() && m.dims().iter().all(|&d| d <= max_dim) {
            return m;
        }
    }
}

/// Cokernel of the map `⊕_j P_{rels[j]} -> ⊕_i P_{gens[i]}` whose `(i, j)`
/// entry is `coef[i][j]` when `gens[i] <= rels[j]` and zero otherwise.
pub fn presented_module(
    p: &Arc<Poset>,
    f: Fp,
    gens: &[usize],
    rels: &[usize],
    coef: &[Vec<i64>],
) -> PersistenceModule {
    let proj_sum = |pts: &[usize]| {
        if pts.is_empty() {
            PersistenceModule::zero(p.clone(), f)
        } else {
            let ps: Vec<PersistenceModule> = pts
                .iter()
                .map(|&a| PersistenceModule::projective(p.clone(), f, a))
                .collect();
            PersistenceModule::direct_sum(&ps).unwrap()
        }
    };
    let g = proj_sum(gens);
    let r = proj_sum(rels);
    let comps = (0..p.len())
        .map(|x| {
            let gi: Vec<usize> = (0..gens.len()).filter(|&i| p.leq(gens[i], x)).collect();
            let rj: Vec<usize> = (0..rels.len()).filter(|&j| p.leq(rels[j], x)).collect();
            let mut c = Mat::zeros(f, gi.len(), rj.len());
            for (row, &i) in gi.iter().enumerate() {
                for (col, &j) in rj.iter().enumerate() {
                    if p.leq(gens[i], rels[j]) {
                        c.set(row, col, f.reduce(coef[i][j]));
                    }
                }
            }
            c
        })
        .collect();
    let phi = Morphism::new(r, g, comps).expect("maps between projectives are natural");
    cokernel_module(&phi).0
}

/// Random direct sum of spread modules drawn from `pool`.
pub fn random_spread_sum<R: Rng>(
    p: &Arc<Poset>,
    f: Fp,
    pool: &[Spread],
    rng: &mut R,
    max_summands: usize,
) -> (PersistenceModule, Vec<usize>) {
    let k = rng.gen_range(1..=max_summands);
    let mut mult = vec![0; pool.len()];
    let mut parts = Vec::new();
    for _ in 0..k {
        let i = rng.gen_range(0..pool.len());
        mult[i] += 1;
        parts.push(PersistenceModule::spread_module(p.clone(), f, &pool[i]));
    }
    (PersistenceModule::direct_sum(&parts).unwrap(), mult)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_labels_and_order() {
        let g = grid(5, 3, 1);
        assert_eq!(g.len(), 15);
        assert!(g.leq(g.index_of("11").unwrap(), g.index_of("53").unwrap()));
        assert!(!g.comparable(g.index_of("13").unwrap(), g.index_of("41").unwrap()));
    }

    #[test]
    fn crown3_is_the_hexagon() {
        assert_eq!(crown(3), a5_tilde());
    }

    #[test]
    fn small_posets_fit_bitmasks() {
        for (name, p) in small_posets() {
            assert!(p.len() <= 6, "{name}");
        }
    }

    #[test]
    fn gen_rk_example_dims() {
        let p = Arc::new(grid(3, 2, 1));
        let m = gen_rk_m(&p, Fp::default());
        let dims: Vec<(String, usize)> = (0..6).map(|x| (p.label(x).to_string(), m.dim(x))).collect();
        let want = [("11", 1), ("12", 1), ("21", 2), ("22", 1), ("31", 1), ("32", 0)];
        for (l, d) in want {
            assert!(dims.contains(&(l.to_string(), d)));
        }
    }

    #[test]
    fn random_modules_respect_bound() {
        use rand::SeedableRng;
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        let p = Arc::new(grid(3, 3, 0));
        for _ in 0..20 {
            let m = random_module(&p, Fp::default(), &mut rng, 3);
            assert!(m.dims().iter().all(|&d| d <= 3));
        }
    }
}
