//! Finite simplicial sets stored by their nondegenerate cells.
//!
//! A simplex at level `n` is held canonically as a nondegenerate cell `x`
//! of dimension `k` together with a monotone surjection `σ: [n] → [k]`; it
//! stands for `σ^* x`. The degeneracy word `s_{i_1}…s_{i_m}` with
//! `i_1 > … > i_m` is the set of `j` with `σ(j) = σ(j+1)`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::chains::ChainComplex;
use crate::error::{Error, Result};
use crate::linalg::SparseVec;
use crate::scalar::Field;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex {
    pub cell: usize,
    /// Values of the surjection onto the cell's vertices.
    pub map: Vec<u32>,
}

impl Simplex {
    pub fn nondegenerate(cell: usize, dim: usize) -> Simplex {
        Simplex {
            cell,
            map: (0..=dim as u32).collect(),
        }
    }

    pub fn level(&self) -> usize {
        self.map.len() - 1
    }

    pub fn is_degenerate(&self) -> bool {
        self.map.windows(2).any(|w| w[0] == w[1])
    }

    /// Degeneracy indices, decreasing.
    pub fn word(&self) -> Vec<usize> {
        let mut w: Vec<usize> = self
            .map
            .windows(2)
            .enumerate()
            .filter(|(_, p)| p[0] == p[1])
            .map(|(j, _)| j)
            .collect();
        w.reverse();
        w
    }

    fn degenerate(&self, j: usize) -> Simplex {
        let mut map = self.map.clone();
        map.insert(j, map[j]);
        Simplex { cell: self.cell, map }
    }

    /// `self ∘ ρ` for a monotone surjection `ρ` given by its values.
    fn precompose(&self, rho: &[u32]) -> Simplex {
        Simplex {
            cell: self.cell,
            map: rho.iter().map(|&v| self.map[v as usize]).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub name: String,
    pub dim: usize,
    /// `faces[i] = d_i` of this cell, empty for vertices.
    pub faces: Vec<Simplex>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialSet {
    cells: Vec<Cell>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FaceSpec {
    pub base: String,
    pub word: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CellSpec {
    pub dim: usize,
    pub name: String,
    #[serde(default)]
    pub faces: Vec<FaceSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimplicialSpec {
    pub cells: Vec<CellSpec>,
}

/// Monotone surjections `[n] → [k]` in lexicographic order of their
/// decreasing degeneracy words.
fn surjections(n: usize, k: usize) -> Vec<Vec<u32>> {
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    // choose the n-k positions j where σ(j) = σ(j+1)
    let mut chosen = Vec::new();
    fn rec(start: usize, left: usize, n: usize, chosen: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(chosen.clone());
            return;
        }
        for j in start..n {
            chosen.push(j);
            rec(j + 1, left - 1, n, chosen, out);
            chosen.pop();
        }
    }
    let mut sets = Vec::new();
    rec(0, n - k, n, &mut chosen, &mut sets);
    for set in sets {
        let mut map = vec![0u32; n + 1];
        for j in 1..=n {
            map[j] = map[j - 1] + u32::from(!set.contains(&(j - 1)));
        }
        let mut word = set;
        word.reverse();
        out.push((word, map));
    }
    out.sort();
    out.into_iter().map(|(_, m)| m).collect()
}

impl SimplicialSet {
    /// Validates face data and the simplicial identities on every cell.
    pub fn new(cells: Vec<Cell>) -> Result<SimplicialSet> {
        for (ci, c) in cells.iter().enumerate() {
            let expected = if c.dim == 0 { 0 } else { c.dim + 1 };
            if c.faces.len() != expected {
                return Err(Error::invalid(format!(
                    "cell {} needs {expected} faces, has {}",
                    c.name,
                    c.faces.len()
                )));
            }
            for f in &c.faces {
                let Some(base) = cells.get(f.cell) else {
                    return Err(Error::invalid(format!("cell {} has a face on an unknown cell", c.name)));
                };
                if f.cell == ci || base.dim >= c.dim || f.level() + 1 != c.dim {
                    return Err(Error::invalid(format!(
                        "cell {} has a face of the wrong dimension",
                        c.name
                    )));
                }
                let valid = f.map.first() == Some(&0)
                    && f.map.last() == Some(&(base.dim as u32))
                    && f.map.windows(2).all(|w| w[1] == w[0] || w[1] == w[0] + 1);
                if !valid {
                    return Err(Error::invalid(format!("cell {} has a malformed face", c.name)));
                }
            }
        }
        let x = SimplicialSet { cells };
        for (ci, c) in x.cells.iter().enumerate() {
            if c.dim < 2 {
                continue;
            }
            let top = Simplex::nondegenerate(ci, c.dim);
            for j in 1..=c.dim {
                for i in 0..j {
                    let lhs = x.face_unchecked(i, &x.face_unchecked(j, &top));
                    let rhs = x.face_unchecked(j - 1, &x.face_unchecked(i, &top));
                    if lhs != rhs {
                        return Err(Error::invalid(format!(
                            "simplicial identity d_{i} d_{j} = d_{} d_{i} fails on cell {}",
                            j - 1,
                            c.name
                        )));
                    }
                }
            }
        }
        Ok(x)
    }

    pub fn from_spec(spec: &SimplicialSpec) -> Result<SimplicialSet> {
        let mut names = HashMap::new();
        for (i, c) in spec.cells.iter().enumerate() {
            if names.insert(c.name.as_str(), i).is_some() {
                return Err(Error::invalid(format!("duplicate cell name {}", c.name)));
            }
        }
        let mut cells = Vec::with_capacity(spec.cells.len());
        for c in &spec.cells {
            let mut faces = Vec::new();
            for f in &c.faces {
                let Some(&b) = names.get(f.base.as_str()) else {
                    return Err(Error::invalid(format!(
                        "cell {} refers to unknown cell {}",
                        c.name, f.base
                    )));
                };
                let mut s = Simplex::nondegenerate(b, spec.cells[b].dim);
                for &j in f.word.iter().rev() {
                    if j > s.level() {
                        return Err(Error::invalid(format!(
                            "degeneracy s_{j} out of range in a face of {}",
                            c.name
                        )));
                    }
                    s = s.degenerate(j);
                }
                faces.push(s);
            }
            cells.push(Cell {
                name: c.name.clone(),
                dim: c.dim,
                faces,
            });
        }
        SimplicialSet::new(cells)
    }

    pub fn from_json(text: &str) -> Result<SimplicialSet> {
        SimplicialSet::from_spec(&serde_json::from_str(text)?)
    }

    pub fn to_spec(&self) -> SimplicialSpec {
        SimplicialSpec {
            cells: self
                .cells
                .iter()
                .map(|c| CellSpec {
                    dim: c.dim,
                    name: c.name.clone(),
                    faces: c
                        .faces
                        .iter()
                        .map(|f| FaceSpec {
                            base: self.cells[f.cell].name.clone(),
                            word: f.word(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn top_dim(&self) -> usize {
        self.cells.iter().map(|c| c.dim).max().unwrap_or(0)
    }

    /// All simplices at level `n`, degenerate ones included, ordered by base
    /// cell and then by degeneracy word.
    pub fn level_simplices(&self, n: usize) -> Vec<Simplex> {
        let mut cache: HashMap<usize, Vec<Vec<u32>>> = HashMap::new();
        let mut out = Vec::new();
        for (ci, c) in self.cells.iter().enumerate() {
            let maps = cache.entry(c.dim).or_insert_with(|| surjections(n, c.dim));
            out.extend(maps.iter().map(|m| Simplex {
                cell: ci,
                map: m.clone(),
            }));
        }
        out
    }

    fn face_unchecked(&self, i: usize, x: &Simplex) -> Simplex {
        let mut tau = x.map.clone();
        tau.remove(i);
        let k = self.cells[x.cell].dim as u32;
        // τ misses at most one value j of [k]
        let missing = (0..=k).find(|v| tau.binary_search(v).is_err());
        match missing {
            None => Simplex { cell: x.cell, map: tau },
            Some(j) => {
                let lowered: Vec<u32> = tau.iter().map(|&v| if v > j { v - 1 } else { v }).collect();
                self.cells[x.cell].faces[j as usize].precompose(&lowered)
            }
        }
    }

    pub fn face(&self, i: usize, x: &Simplex) -> Result<Simplex> {
        let n = x.level();
        if n == 0 || i > n {
            return Err(Error::usage(format!("face d_{i} undefined at level {n}")));
        }
        Ok(self.face_unchecked(i, x))
    }

    pub fn degeneracy(&self, j: usize, x: &Simplex) -> Result<Simplex> {
        if j > x.level() {
            return Err(Error::usage(format!(
                "degeneracy s_{j} undefined at level {}",
                x.level()
            )));
        }
        Ok(x.degenerate(j))
    }

    /// Level sets and face/degeneracy index tables through level `n_max`.
    pub fn levels(&self, n_max: usize) -> Levels {
        let simplices: Vec<Vec<Simplex>> = (0..=n_max).map(|n| self.level_simplices(n)).collect();
        let index: Vec<HashMap<Simplex, usize>> = simplices
            .iter()
            .map(|l| l.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect())
            .collect();
        let faces = (0..=n_max)
            .map(|n| {
                if n == 0 {
                    return Vec::new();
                }
                (0..=n)
                    .map(|i| {
                        simplices[n]
                            .iter()
                            .map(|x| index[n - 1][&self.face_unchecked(i, x)])
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let degeneracies = (0..n_max)
            .map(|n| {
                (0..=n)
                    .map(|j| simplices[n].iter().map(|x| index[n + 1][&x.degenerate(j)]).collect())
                    .collect()
            })
            .collect();
        Levels {
            simplices,
            faces,
            degeneracies,
        }
    }

    /// Normalized chains with constant coefficients, levels `0..=n_max`.
    pub fn moore_complex(&self, field: Field, n_max: usize) -> ChainComplex {
        let lv = self.levels(n_max);
        let gens: Vec<Vec<i64>> = (0..=n_max).map(|n| vec![0; lv.len(n)]).collect();
        let diffs = (0..=n_max)
            .map(|n| {
                (0..lv.len(n))
                    .map(|x| {
                        if n == 0 {
                            return SparseVec::new();
                        }
                        SparseVec::from_terms((0..=n).map(|i| (lv.faces[n][i][x], field.sign(i % 2 == 1))))
                    })
                    .collect()
            })
            .collect();
        ChainComplex::new(field, gens, diffs, n_max.saturating_sub(1)).expect("simplicial identities give d² = 0")
    }
}

/// Enumerated levels of a simplicial set with face and degeneracy tables.
#[derive(Clone, Debug)]
pub struct Levels {
    pub simplices: Vec<Vec<Simplex>>,
    /// `faces[n][i][x]` is the index of `d_i x` at level `n-1`.
    pub faces: Vec<Vec<Vec<usize>>>,
    /// `degeneracies[n][j][x]` is the index of `s_j x` at level `n+1`.
    pub degeneracies: Vec<Vec<Vec<usize>>>,
}

impl Levels {
    pub fn n_max(&self) -> usize {
        self.simplices.len() - 1
    }

    pub fn len(&self, n: usize) -> usize {
        self.simplices[n].len()
    }
}

fn vertex(name: &str) -> Cell {
    Cell {
        name: name.into(),
        dim: 0,
        faces: Vec::new(),
    }
}

fn point_set() -> SimplicialSet {
    SimplicialSet {
        cells: vec![vertex("v")],
    }
}

/// A vertex, or the maximally degenerate `(d-1)`-simplex on it.
fn on_vertex(d: usize) -> Simplex {
    Simplex {
        cell: 0,
        map: vec![0; d],
    }
}

pub fn point() -> SimplicialSet {
    point_set()
}

pub fn interval() -> SimplicialSet {
    simplex(1)
}

/// One vertex and one 1-cell.
pub fn circle_min() -> SimplicialSet {
    sphere_min(1).expect("d = 1")
}

/// One vertex and one `d`-cell with every face collapsed to the vertex.
pub fn sphere_min(d: usize) -> Result<SimplicialSet> {
    if d < 1 {
        return Err(Error::usage("sphere dimension must be at least 1"));
    }
    let top = Cell {
        name: format!("c{d}"),
        dim: d,
        faces: vec![on_vertex(d); d + 1],
    };
    SimplicialSet::new(vec![vertex("v"), top])
}

fn subsets_cells(n: usize, include_top: bool) -> SimplicialSet {
    let mut subsets: Vec<Vec<usize>> = (1u32..(1 << (n + 1)))
        .map(|mask| (0..=n).filter(|i| mask & (1 << i) != 0).collect())
        .filter(|s: &Vec<usize>| include_top || s.len() <= n)
        .collect();
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    let index: HashMap<Vec<usize>, usize> = subsets.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
    let cells = subsets
        .iter()
        .map(|s| {
            let dim = s.len() - 1;
            let faces = if dim == 0 {
                Vec::new()
            } else {
                (0..=dim)
                    .map(|i| {
                        let mut f = s.clone();
                        f.remove(i);
                        Simplex::nondegenerate(index[&f], dim - 1)
                    })
                    .collect()
            };
            Cell {
                name: s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(""),
                dim,
                faces,
            }
        })
        .collect();
    SimplicialSet { cells }
}

/// The standard `n`-simplex.
pub fn simplex(n: usize) -> SimplicialSet {
    subsets_cells(n, true)
}

/// The boundary of the standard `n`-simplex.
pub fn boundary(n: usize) -> Result<SimplicialSet> {
    if n < 1 {
        return Err(Error::usage("boundary needs n >= 1"));
    }
    Ok(subsets_cells(n, false))
}

/// The `m`-gon: vertices `v_i` and edges `e_i` from `v_i` to `v_{i+1}`.
pub fn circle_subdiv(m: usize) -> Result<SimplicialSet> {
    if m < 3 {
        return Err(Error::usage("circle subdivision needs m >= 3"));
    }
    let mut cells: Vec<Cell> = (0..m).map(|i| vertex(&format!("v{i}"))).collect();
    for i in 0..m {
        cells.push(Cell {
            name: format!("e{i}"),
            dim: 1,
            faces: vec![Simplex::nondegenerate((i + 1) % m, 0), Simplex::nondegenerate(i, 0)],
        });
    }
    SimplicialSet::new(cells)
}

/// Disjoint union; cells of the `k`-th summand are renamed `k.name`.
pub fn disjoint_union(parts: &[SimplicialSet]) -> SimplicialSet {
    let mut cells = Vec::new();
    for (k, x) in parts.iter().enumerate() {
        let offset = cells.len();
        cells.extend(x.cells.iter().map(|c| {
            Cell {
                name: format!("{k}.{}", c.name),
                dim: c.dim,
                faces: c
                    .faces
                    .iter()
                    .map(|f| Simplex {
                        cell: f.cell + offset,
                        map: f.map.clone(),
                    })
                    .collect(),
            }
        }));
    }
    SimplicialSet { cells }
}

/// Parses a space descriptor: `point`, `interval`, `circle:min`,
/// `circle:<m>`, `sphere:<d>`, `simplex:<n>`, `boundary:<n>`,
/// `union:<a>+<b>+…`.
pub fn builtin(descriptor: &str) -> Result<SimplicialSet> {
    if let Some(rest) = descriptor.strip_prefix("union:") {
        let parts = rest.split('+').map(builtin).collect::<Result<Vec<_>>>()?;
        if parts.len() < 2 {
            return Err(Error::usage("union needs at least two summands"));
        }
        return Ok(disjoint_union(&parts));
    }
    let num = |s: &str| -> Result<usize> {
        s.parse()
            .map_err(|_| Error::usage(format!("bad number {s:?} in space descriptor {descriptor:?}")))
    };
    match descriptor.split_once(':') {
        None if descriptor == "point" => Ok(point()),
        None if descriptor == "interval" => Ok(interval()),
        Some(("circle", "min")) => Ok(circle_min()),
        Some(("circle", m)) => circle_subdiv(num(m)?),
        Some(("sphere", d)) => sphere_min(num(d)?),
        Some(("simplex", n)) => Ok(simplex(num(n)?)),
        Some(("boundary", n)) => boundary(num(n)?),
        _ => Err(Error::usage(format!("unknown space {descriptor:?}"))),
    }
}

/// A simplicial map given by the images of the nondegenerate cells.
#[derive(Clone, Debug)]
pub struct SimplicialMap {
    pub source: SimplicialSet,
    pub target: SimplicialSet,
    images: Vec<Simplex>,
}

impl SimplicialMap {
    pub fn new(source: SimplicialSet, target: SimplicialSet, images: Vec<Simplex>) -> Result<SimplicialMap> {
        if images.len() != source.cells.len() {
            return Err(Error::invalid("simplicial map needs one image per cell"));
        }
        for (c, img) in source.cells.iter().zip(&images) {
            if img.cell >= target.cells.len()
                || img.level() != c.dim
                || img.map.last().copied() != Some(target.cells[img.cell].dim as u32)
            {
                return Err(Error::invalid(format!("image of {} has the wrong dimension", c.name)));
            }
        }
        let f = SimplicialMap { source, target, images };
        for (ci, c) in f.source.cells.iter().enumerate() {
            for (i, face) in c.faces.iter().enumerate() {
                if f.apply(face) != f.target.face_unchecked(i, &f.images[ci]) {
                    return Err(Error::invalid(format!(
                        "simplicial map does not commute with d_{i} on {}",
                        c.name
                    )));
                }
            }
        }
        Ok(f)
    }

    pub fn apply(&self, x: &Simplex) -> Simplex {
        self.images[x.cell].precompose(&x.map)
    }

    /// `level_map(lv_src, lv_tgt, n)[x]` is the index of `f(x)` at level `n`.
    pub fn level_map(&self, src: &Levels, tgt: &Levels, n: usize) -> Vec<usize> {
        let index: HashMap<&Simplex, usize> = tgt.simplices[n].iter().enumerate().map(|(i, s)| (s, i)).collect();
        src.simplices[n].iter().map(|x| index[&self.apply(x)]).collect()
    }

    pub fn identity(x: &SimplicialSet) -> SimplicialMap {
        let images = x
            .cells
            .iter()
            .enumerate()
            .map(|(i, c)| Simplex::nondegenerate(i, c.dim))
            .collect();
        SimplicialMap {
            source: x.clone(),
            target: x.clone(),
            images,
        }
    }

    pub fn compose(&self, after: &SimplicialMap) -> Result<SimplicialMap> {
        if self.target != after.source {
            return Err(Error::usage("maps are not composable"));
        }
        let images = self.images.iter().map(|s| after.apply(s)).collect();
        SimplicialMap::new(self.source.clone(), after.target.clone(), images)
    }
}

/// The codiagonal `X ⊔ X → X`.
pub fn fold_map(x: &SimplicialSet) -> SimplicialMap {
    let n = x.cells.len();
    let images = (0..2 * n)
        .map(|i| Simplex::nondegenerate(i % n, x.cells[i % n].dim))
        .collect();
    SimplicialMap::new(disjoint_union(&[x.clone(), x.clone()]), x.clone(), images).expect("fold is simplicial")
}

/// `f ⊔ g`.
pub fn union_map(f: &SimplicialMap, g: &SimplicialMap) -> SimplicialMap {
    let offset = f.target.cells.len();
    let mut images = f.images.clone();
    images.extend(g.images.iter().map(|s| Simplex {
        cell: s.cell + offset,
        map: s.map.clone(),
    }));
    SimplicialMap::new(
        disjoint_union(&[f.source.clone(), g.source.clone()]),
        disjoint_union(&[f.target.clone(), g.target.clone()]),
        images,
    )
    .expect("union of simplicial maps is simplicial")
}

/// Collapses the `m`-gon onto the minimal circle: every vertex goes to the
/// basepoint, `e_0` to the 1-cell and the other edges to the degenerate
/// 1-simplex.
pub fn polygon_collapse(m: usize) -> Result<SimplicialMap> {
    let source = circle_subdiv(m)?;
    let target = circle_min();
    let mut images = vec![Simplex::nondegenerate(0, 0); m];
    images.push(Simplex::nondegenerate(1, 1));
    images.extend((1..m).map(|_| on_vertex(2)));
    SimplicialMap::new(source, target, images)
}
