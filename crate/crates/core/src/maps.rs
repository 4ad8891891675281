//! Brute-force enumeration of maps as rotation systems: darts `(i, 1..j)` at
//! vertex `i` of valence `j`, `sigma` the cyclic shift at each vertex, and
//! every fixed-point-free involution `alpha` as an edge set.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::algebra::Rational;
use crate::specialize::{free_energy_series, map_count, Potential, SpecializeError, TExp};

pub const MAX_DARTS: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapsError {
    #[error("the gluing is disconnected")]
    Disconnected,
    #[error("{0} darts exceed the enumeration bound of {MAX_DARTS}")]
    TooLarge(usize),
    #[error("total valence {0} is odd")]
    OddDarts(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotationSystem {
    pub sigma: Vec<usize>,
    pub alpha: Vec<usize>,
    vertex_of: Vec<usize>,
}

/// Vertices in order of increasing valence, as `(valence, count)`.
pub type Profile = Vec<(usize, u32)>;

pub fn profile_of(t: &TExp) -> Profile {
    t.profile().into_iter().map(|(j, n)| (j, n as u32)).collect()
}

/// `sigma` and the dart-to-vertex map for a valence profile.
fn vertex_structure(profile: &[(usize, u32)]) -> (Vec<usize>, Vec<usize>) {
    let mut sigma = Vec::new();
    let mut vertex_of = Vec::new();
    let mut vertex = 0;
    for &(j, n) in profile {
        for _ in 0..n {
            let start = sigma.len();
            for k in 0..j {
                sigma.push(start + (k + 1) % j);
                vertex_of.push(vertex);
            }
            vertex += 1;
        }
    }
    (sigma, vertex_of)
}

impl RotationSystem {
    pub fn new(profile: &[(usize, u32)], alpha: Vec<usize>) -> Self {
        let (sigma, vertex_of) = vertex_structure(profile);
        assert_eq!(sigma.len(), alpha.len(), "pairing must cover every dart");
        RotationSystem { sigma, alpha, vertex_of }
    }

    pub fn vertices(&self) -> usize {
        self.vertex_of.last().map_or(0, |v| v + 1)
    }

    pub fn edges(&self) -> usize {
        self.alpha.len() / 2
    }

    /// Cycles of `sigma . alpha`.
    pub fn faces(&self) -> usize {
        count_faces(&self.sigma, &self.alpha)
    }

    pub fn is_connected(&self) -> bool {
        connected(&self.vertex_of, &self.alpha, self.vertices())
    }
}

fn count_faces(sigma: &[usize], alpha: &[usize]) -> usize {
    let mut seen = vec![false; sigma.len()];
    let mut faces = 0;
    for start in 0..sigma.len() {
        if seen[start] {
            continue;
        }
        faces += 1;
        let mut d = start;
        while !seen[d] {
            seen[d] = true;
            d = sigma[alpha[d]];
        }
    }
    faces
}

fn find(parent: &mut [usize], mut v: usize) -> usize {
    while parent[v] != v {
        parent[v] = parent[parent[v]];
        v = parent[v];
    }
    v
}

fn connected(vertex_of: &[usize], alpha: &[usize], vertices: usize) -> bool {
    let mut parent: Vec<usize> = (0..vertices).collect();
    let mut components = vertices;
    for (d, &e) in alpha.iter().enumerate() {
        let (a, b) = (find(&mut parent, vertex_of[d]), find(&mut parent, vertex_of[e]));
        if a != b {
            parent[a] = b;
            components -= 1;
        }
    }
    components <= 1
}

/// `g = (2 - V + E - F) / 2`.
pub fn genus_of(rs: &RotationSystem) -> Result<u32, MapsError> {
    if !rs.is_connected() {
        return Err(MapsError::Disconnected);
    }
    let chi = rs.vertices() as i64 - rs.edges() as i64 + rs.faces() as i64;
    Ok(((2 - chi) / 2) as u32)
}

/// Connected gluings per `(genus, faces)`.
pub fn census(profile: &[(usize, u32)]) -> Result<BTreeMap<(u32, u32), u64>, MapsError> {
    let (sigma, vertex_of) = vertex_structure(profile);
    let n = sigma.len();
    if n > MAX_DARTS {
        return Err(MapsError::TooLarge(n));
    }
    if n % 2 == 1 {
        return Err(MapsError::OddDarts(n));
    }
    if n == 0 {
        return Ok(BTreeMap::new());
    }
    let vertices = vertex_of.last().map_or(0, |v| v + 1);
    let merge = |mut a: BTreeMap<(u32, u32), u64>, b: BTreeMap<(u32, u32), u64>| {
        for (k, v) in b {
            *a.entry(k).or_default() += v;
        }
        a
    };
    // dart 0 is paired first; each partner is an independent subtree
    let counts = (1..n)
        .into_par_iter()
        .map(|partner| {
            let mut alpha = vec![usize::MAX; n];
            alpha[0] = partner;
            alpha[partner] = 0;
            let mut acc = BTreeMap::new();
            let ctx = Ctx { sigma: &sigma, vertex_of: &vertex_of, vertices };
            ctx.backtrack(&mut alpha, &mut acc);
            acc
        })
        .reduce(BTreeMap::new, merge);
    Ok(counts)
}

struct Ctx<'a> {
    sigma: &'a [usize],
    vertex_of: &'a [usize],
    vertices: usize,
}

impl Ctx<'_> {
    fn backtrack(&self, alpha: &mut [usize], acc: &mut BTreeMap<(u32, u32), u64>) {
        let Some(first) = alpha.iter().position(|&a| a == usize::MAX) else {
            if connected(self.vertex_of, alpha, self.vertices) {
                let faces = count_faces(self.sigma, alpha);
                let chi = self.vertices as i64 - (alpha.len() / 2) as i64 + faces as i64;
                *acc.entry((((2 - chi) / 2) as u32, faces as u32)).or_default() += 1;
            }
            return;
        };
        for other in first + 1..alpha.len() {
            if alpha[other] != usize::MAX {
                continue;
            }
            alpha[first] = other;
            alpha[other] = first;
            self.backtrack(alpha, acc);
            alpha[first] = usize::MAX;
            alpha[other] = usize::MAX;
        }
    }
}

/// Connected gluings of the given genus, per face count.
pub fn enumerate_maps(profile: &[(usize, u32)], genus: u32) -> Result<BTreeMap<u32, u64>, MapsError> {
    Ok(census(profile)?.into_iter().filter(|((g, _), _)| *g == genus).map(|((_, f), c)| (f, c)).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComparisonRow {
    pub profile: Profile,
    pub genus: u32,
    pub faces: u32,
    pub series: Rational,
    pub oracle: u64,
}

impl ComparisonRow {
    pub fn matches(&self) -> bool {
        self.series == Rational::from_integer(self.oracle as i64)
    }

    pub fn to_json(&self) -> Value {
        let profile: BTreeMap<String, u32> = self.profile.iter().map(|(j, n)| (j.to_string(), *n)).collect();
        json!({
            "profile": profile,
            "genus": self.genus,
            "faces": self.faces,
            "count": self.oracle,
            "series": self.series.to_string(),
        })
    }
}

#[derive(Debug, Error)]
pub enum CompareError {
    #[error(transparent)]
    Specialize(#[from] SpecializeError),
    #[error(transparent)]
    Maps(#[from] MapsError),
}

/// Vertex profiles over the symbolic couplings of `v` with between 1 and
/// `max_vertices` vertices and an even number of at most `MAX_DARTS` darts.
pub fn profiles(v: &Potential, max_vertices: u32) -> Vec<TExp> {
    let valences: Vec<usize> = (2..=crate::specialize::MAX_COUPLING).filter(|j| v.scale_of(*j).is_some()).collect();
    let mut out = Vec::new();
    let mut stack = vec![(0usize, TExp::default())];
    while let Some((idx, t)) = stack.pop() {
        if idx == valences.len() {
            let darts: usize = t.profile().iter().map(|(j, n)| j * *n as usize).sum();
            if t.degree() >= 1 && darts % 2 == 0 && darts <= MAX_DARTS {
                out.push(t);
            }
            continue;
        }
        for n in 0..=(max_vertices - t.degree()) {
            let mut next = t;
            next.0[valences[idx] - 1] = n as u8;
            stack.push((idx + 1, next));
        }
    }
    out.sort_by_key(|t| (t.degree(), *t));
    out
}

/// Series coefficients of `F^(g)` against enumerated counts for every
/// profile within bounds. Rows where both sides vanish are omitted.
pub fn compare(v: &Potential, genus: u32, max_vertices: u32) -> Result<Vec<ComparisonRow>, CompareError> {
    let f = free_energy_series(v, genus, max_vertices)?;
    let mut rows = Vec::new();
    for t in profiles(v, max_vertices) {
        let profile = profile_of(&t);
        let series = map_count(&f, v, &t)?;
        let oracle = enumerate_maps(&profile, genus)?;
        let mut faces: Vec<i64> = series.keys().copied().collect();
        faces.extend(oracle.keys().map(|f| *f as i64));
        faces.sort_unstable();
        faces.dedup();
        for face in faces {
            let s = series.get(&face).cloned().unwrap_or_default();
            let o = oracle.get(&(face as u32)).copied().unwrap_or(0);
            if s.is_zero() && o == 0 {
                continue;
            }
            rows.push(ComparisonRow { profile: profile.clone(), genus, faces: face as u32, series: s, oracle: o });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn double_factorial(n: u64) -> u64 {
        (1..=n).rev().step_by(2).product()
    }

    #[test]
    fn one_quartic_vertex() {
        // pairings of darts 0..4: (01)(23), (03)(12) planar; (02)(13) crossing
        let planar = RotationSystem::new(&[(4, 1)], vec![1, 0, 3, 2]);
        assert_eq!(planar.faces(), 3);
        assert_eq!(genus_of(&planar), Ok(0));
        let crossing = RotationSystem::new(&[(4, 1)], vec![2, 3, 0, 1]);
        assert_eq!(crossing.faces(), 1);
        assert_eq!(genus_of(&crossing), Ok(1));
        assert_eq!(enumerate_maps(&[(4, 1)], 0).unwrap(), BTreeMap::from([(3, 2)]));
        assert_eq!(enumerate_maps(&[(4, 1)], 1).unwrap(), BTreeMap::from([(1, 1)]));
    }

    #[test]
    fn segment_map() {
        let seg = RotationSystem::new(&[(1, 2)], vec![1, 0]);
        assert_eq!(seg.faces(), 1);
        assert_eq!(genus_of(&seg), Ok(0));
    }

    #[test]
    fn disconnected_gluing() {
        let rs = RotationSystem::new(&[(2, 2)], vec![1, 0, 3, 2]);
        assert_eq!(genus_of(&rs), Err(MapsError::Disconnected));
    }

    #[test]
    fn two_cubic_vertices() {
        // odd valences cannot close up on one vertex, so all 15 pairings connect
        let all = census(&[(3, 2)]).unwrap();
        assert_eq!(all.values().sum::<u64>(), 15);
        assert!(all.keys().all(|(g, f)| 2 - 2 * *g as i64 == 2 - 3 + *f as i64));
    }

    #[test]
    fn cycles_are_planar() {
        for n in 1..=5 {
            let c = census(&[(2, n)]).unwrap();
            assert!(c.keys().all(|(g, f)| *g == 0 && *f == 2));
        }
    }

    #[test]
    fn single_vertex_totals() {
        // one vertex is always connected: every pairing counts
        for j in [2u64, 4, 6, 8] {
            let c = census(&[(j as usize, 1)]).unwrap();
            assert_eq!(c.values().sum::<u64>(), double_factorial(j - 1));
        }
    }

    #[test]
    fn limits() {
        assert_eq!(census(&[(3, 1)]), Err(MapsError::OddDarts(3)));
        assert_eq!(census(&[(4, 5)]), Err(MapsError::TooLarge(20)));
    }
}
