//! Polyhedral cones in `F^d` carried in both generator (V) and halfspace (H)
//! representations.
//!
//! Conversion between the two is an in-repo double description: halfspaces
//! are inserted one at a time into a lineality basis plus a set of extreme
//! rays, with the combinatorial adjacency test deciding which pairs of rays
//! spawn a new one. Both representations are kept minimal and canonical:
//! lineality (resp. implicit equalities) appears as `±v` pairs of primitive
//! integer vectors taken from the reduced echelon basis, and pointed rays are
//! projected onto the orthogonal complement of the lineality space before
//! being scaled to primitive integers.

use std::fmt;

use thiserror::Error;

use crate::linalg;
use crate::lp::{LinearProgram, Relation, Sense};
use crate::scalar::Scalar;
use crate::vector::Vector;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConeError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("cone has a generator with negative coordinate {coord}; the section at that coordinate is undefined")]
    SectionPrecondition { coord: usize },
    #[error("conic hull of an empty family")]
    EmptyFamily,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representation {
    Generators,
    Halfspaces,
}

/// A closed convex polyhedral cone `{x : n.x >= 0 for all normals n}`
/// `= cone(generators)`.
#[derive(Clone)]
pub struct PolyhedralCone<F> {
    dim: usize,
    generators: Vec<Vector<F>>,
    halfspaces: Vec<Vector<F>>,
}

/// The slice `{x in base : x[level_coord] = 1}` as `conv(vertices) + cone(rays)`.
#[derive(Clone)]
pub struct ConeSection<F> {
    pub base: PolyhedralCone<F>,
    pub level_coord: usize,
    pub vertices: Vec<Vector<F>>,
    pub rays: Vec<Vector<F>>,
}

impl<F: fmt::Display> fmt::Debug for ConeSection<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConeSection")
            .field("level_coord", &self.level_coord)
            .field("vertices", &self.vertices)
            .field("rays", &self.rays)
            .finish()
    }
}

impl<F: Scalar> ConeSection<F> {
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_bounded(&self) -> bool {
        self.rays.is_empty()
    }
}

fn check_dims<F: Scalar>(dim: usize, vectors: &[Vector<F>]) -> Result<(), ConeError> {
    match vectors.iter().find(|v| v.dim() != dim) {
        Some(v) => Err(ConeError::DimensionMismatch { expected: dim, found: v.dim() }),
        None => Ok(()),
    }
}

impl<F: Scalar> PolyhedralCone<F> {
    /// `cone(generators)`. Zero vectors are ignored; the empty list gives `{0}`.
    pub fn from_generators(dim: usize, generators: Vec<Vector<F>>) -> Result<Self, ConeError> {
        check_dims(dim, &generators)?;
        let halfspaces = minimal_rays(dim, &generators);
        let generators = minimal_rays(dim, &halfspaces);
        Ok(PolyhedralCone { dim, generators, halfspaces })
    }

    /// `{x : n.x >= 0 for every n}`. The empty list gives the whole space.
    pub fn from_halfspaces(dim: usize, halfspaces: Vec<Vector<F>>) -> Result<Self, ConeError> {
        check_dims(dim, &halfspaces)?;
        let generators = minimal_rays(dim, &halfspaces);
        let halfspaces = minimal_rays(dim, &generators);
        Ok(PolyhedralCone { dim, generators, halfspaces })
    }

    pub fn full(dim: usize) -> Self {
        Self::from_halfspaces(dim, Vec::new()).expect("no vectors")
    }

    pub fn zero(dim: usize) -> Self {
        Self::from_generators(dim, Vec::new()).expect("no vectors")
    }

    pub fn orthant(dim: usize) -> Self {
        Self::from_generators(dim, (0..dim).map(|i| Vector::unit(dim, i)).collect())
            .expect("units have the right dimension")
    }

    pub fn ray(v: Vector<F>) -> Self {
        let dim = v.dim();
        Self::from_generators(dim, vec![v]).expect("single vector")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Minimal generators; lineality directions appear as `±v` pairs.
    pub fn generators(&self) -> &[Vector<F>] {
        &self.generators
    }

    /// Minimal inner normals; implicit equalities appear as `±n` pairs.
    pub fn halfspaces(&self) -> &[Vector<F>] {
        &self.halfspaces
    }

    /// Recomputes the `target` representation from the other one.
    pub fn convert(&self, target: Representation) -> Self {
        match target {
            Representation::Generators => {
                Self::from_halfspaces(self.dim, self.halfspaces.clone()).expect("same dimension")
            }
            Representation::Halfspaces => {
                Self::from_generators(self.dim, self.generators.clone()).expect("same dimension")
            }
        }
    }

    /// Checks that the stored representations describe the same set.
    pub fn is_synced(&self) -> bool {
        self.generators.iter().all(|g| g.dim() == self.dim && !g.is_zero())
            && self.generators.iter().all(|g| self.halfspaces.iter().all(|n| !n.dot(g).is_negative()))
            && {
                let from_h = minimal_rays(self.dim, &self.halfspaces);
                let cone_h = PolyhedralCone {
                    dim: self.dim,
                    generators: from_h,
                    halfspaces: self.halfspaces.clone(),
                };
                cone_h.generators.iter().all(|g| self.contains_by_generators(g))
            }
    }

    fn contains_by_generators(&self, x: &Vector<F>) -> bool {
        // membership in cone(generators) by a feasibility LP
        let mut lp = LinearProgram::new(Sense::Minimize);
        let vars: Vec<usize> = self.generators.iter().map(|_| lp.add_nonneg(F::zero())).collect();
        for i in 0..self.dim {
            let coeffs = vars
                .iter()
                .zip(&self.generators)
                .map(|(&v, g)| (v, g[i].clone()))
                .collect();
            lp.add_constraint(coeffs, Relation::Eq, x[i].clone());
        }
        lp.solve().solution().is_some()
    }

    /// `{y : y.x >= 0 for all x in self}`; the two representations swap.
    pub fn dual(&self) -> Self {
        PolyhedralCone {
            dim: self.dim,
            generators: self.halfspaces.clone(),
            halfspaces: self.generators.clone(),
        }
    }

    pub fn intersect(&self, other: &Self) -> Result<Self, ConeError> {
        if other.dim != self.dim {
            return Err(ConeError::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let mut hs = self.halfspaces.clone();
        hs.extend(other.halfspaces.iter().cloned());
        Self::from_halfspaces(self.dim, hs)
    }

    pub fn minkowski_sum(&self, other: &Self) -> Result<Self, ConeError> {
        if other.dim != self.dim {
            return Err(ConeError::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let mut gs = self.generators.clone();
        gs.extend(other.generators.iter().cloned());
        Self::from_generators(self.dim, gs)
    }

    /// Closed convex conic hull of a union of cones, i.e. their sum.
    pub fn conic_hull_of_union<'a, I>(cones: I) -> Result<Self, ConeError>
    where
        I: IntoIterator<Item = &'a Self>,
    {
        let mut iter = cones.into_iter().peekable();
        let dim = iter.peek().ok_or(ConeError::EmptyFamily)?.dim;
        let mut gs = Vec::new();
        for c in iter {
            if c.dim != dim {
                return Err(ConeError::DimensionMismatch { expected: dim, found: c.dim });
            }
            gs.extend(c.generators.iter().cloned());
        }
        Self::from_generators(dim, gs)
    }

    pub fn contains(&self, x: &Vector<F>) -> bool {
        debug_assert_eq!(x.dim(), self.dim);
        self.halfspaces.iter().all(|n| !n.dot(x).is_negative())
    }

    /// Strict membership in the interior: every normal evaluates positively.
    /// Only meaningful for full-dimensional cones.
    pub fn contains_in_interior(&self, x: &Vector<F>) -> bool {
        self.halfspaces.iter().all(|n| n.dot(x).is_positive())
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.dim == other.dim && self.generators.iter().all(|g| other.contains(g))
    }

    pub fn same_set(&self, other: &Self) -> bool {
        self.is_subset(other) && other.is_subset(self)
    }

    pub fn is_zero_cone(&self) -> bool {
        self.generators.is_empty()
    }

    /// Solves `n.x >= 1` for every normal `n`; a solution is strictly inside.
    pub fn interior_witness(&self) -> Option<Vector<F>> {
        let mut lp = LinearProgram::new(Sense::Minimize);
        let vars: Vec<usize> = (0..self.dim).map(|_| lp.add_free(F::zero())).collect();
        for n in &self.halfspaces {
            let coeffs = vars.iter().zip(n.iter()).map(|(&v, c)| (v, c.clone())).collect();
            lp.add_constraint(coeffs, Relation::Ge, F::one());
        }
        lp.solve().solution().map(|x| Vector::new(x.to_vec()))
    }

    pub fn has_nonempty_interior(&self) -> bool {
        self.interior_witness().is_some()
    }

    /// `{x in self : x[coord] = 1}`. Requires every generator to have a
    /// nonnegative `coord` entry.
    pub fn normalized_section(&self, coord: usize) -> Result<ConeSection<F>, ConeError> {
        if coord >= self.dim {
            return Err(ConeError::DimensionMismatch { expected: self.dim, found: coord + 1 });
        }
        if self.generators.iter().any(|g| g[coord].is_negative()) {
            return Err(ConeError::SectionPrecondition { coord });
        }
        let mut vertices = Vec::new();
        let mut rays = Vec::new();
        for g in &self.generators {
            if g[coord].is_zero() {
                rays.push(g.clone());
            } else {
                let inv = F::one() / g[coord].clone();
                vertices.push(g.scale(&inv));
            }
        }
        vertices.sort();
        Ok(ConeSection { base: self.clone(), level_coord: coord, vertices, rays })
    }

    /// `self x R_+` (appends a nonnegative coordinate).
    pub fn times_halfline(&self) -> Self {
        let d = self.dim + 1;
        let mut gs: Vec<Vector<F>> = self.generators.iter().map(|g| g.extended(F::zero())).collect();
        gs.push(Vector::unit(d, self.dim));
        Self::from_generators(d, gs).expect("consistent dimension")
    }

    /// `self x R` (appends a free coordinate).
    pub fn times_line(&self) -> Self {
        let d = self.dim + 1;
        let mut gs: Vec<Vector<F>> = self.generators.iter().map(|g| g.extended(F::zero())).collect();
        gs.push(Vector::unit(d, self.dim));
        gs.push(Vector::unit(d, self.dim).neg());
        Self::from_generators(d, gs).expect("consistent dimension")
    }
}

impl<F: Scalar> PartialEq for PolyhedralCone<F> {
    fn eq(&self, other: &Self) -> bool {
        self.same_set(other)
    }
}

impl<F: fmt::Display> fmt::Debug for PolyhedralCone<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PolyhedralCone")
            .field("dim", &self.dim)
            .field("generators", &self.generators)
            .field("halfspaces", &self.halfspaces)
            .finish()
    }
}

/// Minimal canonical generators of `{x : n.x >= 0 for n in normals}`.
fn minimal_rays<F: Scalar>(dim: usize, normals: &[Vector<F>]) -> Vec<Vector<F>> {
    let (lineality, rays) = double_description(dim, normals);
    canonical_generators(dim, lineality, rays)
}

fn canonical_generators<F: Scalar>(
    dim: usize,
    lineality: Vec<Vector<F>>,
    rays: Vec<Vector<F>>,
) -> Vec<Vector<F>> {
    let (basis, _) = linalg::rref(&lineality, dim);
    let basis: Vec<Vector<F>> = basis.into_iter().map(|b| b.primitive()).collect();
    let mut out = Vec::with_capacity(rays.len() + 2 * basis.len());
    for r in rays {
        let p = linalg::project_out(&r, &basis);
        if !p.is_zero() {
            out.push(p.primitive());
        }
    }
    for b in basis {
        out.push(b.neg());
        out.push(b);
    }
    out.sort();
    out.dedup();
    out
}

#[derive(Clone)]
struct BitSet(Vec<u64>);

impl BitSet {
    fn new(len: usize) -> Self {
        BitSet(vec![0; len.div_ceil(64).max(1)])
    }

    fn insert(&mut self, i: usize) {
        let w = i / 64;
        if w >= self.0.len() {
            self.0.resize(w + 1, 0);
        }
        self.0[w] |= 1 << (i % 64);
    }

    fn intersection(&self, other: &Self) -> Self {
        BitSet(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn is_subset(&self, other: &Self) -> bool {
        self.0
            .iter()
            .enumerate()
            .all(|(i, a)| a & !other.0.get(i).copied().unwrap_or(0) == 0)
    }
}

struct Ray<F> {
    v: Vector<F>,
    tight: BitSet,
}

/// Double description of `{x : n.x >= 0}`: returns a lineality basis and the
/// extreme rays of the pointed part.
fn double_description<F: Scalar>(
    dim: usize,
    normals: &[Vector<F>],
) -> (Vec<Vector<F>>, Vec<Vector<F>>) {
    let mut lineality: Vec<Vector<F>> = (0..dim).map(|i| Vector::unit(dim, i)).collect();
    let mut rays: Vec<Ray<F>> = Vec::new();
    let total = normals.len();
    let mut processed = 0usize;

    for n in normals {
        if n.is_zero() {
            continue;
        }
        let k = processed;
        processed += 1;

        if let Some(p) = lineality.iter().position(|l| !n.dot(l).is_zero()) {
            let mut l0 = lineality.swap_remove(p);
            let mut s = n.dot(&l0);
            if s.is_negative() {
                l0 = l0.neg();
                s = -s;
            }
            for l in lineality.iter_mut() {
                let f = -(n.dot(l) / s.clone());
                l.add_scaled(&f, &l0);
            }
            for r in rays.iter_mut() {
                let f = -(n.dot(&r.v) / s.clone());
                r.v.add_scaled(&f, &l0);
                r.tight.insert(k);
            }
            // l0 is tight on every earlier constraint (they vanish on the
            // lineality space) but not on n.
            let mut tight = BitSet::new(total);
            for j in 0..k {
                tight.insert(j);
            }
            rays.push(Ray { v: l0, tight });
            continue;
        }

        let values: Vec<F> = rays.iter().map(|r| n.dot(&r.v)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_negative()).collect();
        if neg.is_empty() {
            for (r, v) in rays.iter_mut().zip(&values) {
                if v.is_zero() {
                    r.tight.insert(k);
                }
            }
            continue;
        }

        let mut fresh: Vec<Ray<F>> = Vec::new();
        for &i in &pos {
            for &j in &neg {
                let common = rays[i].tight.intersection(&rays[j].tight);
                let adjacent = (0..rays.len())
                    .all(|r| r == i || r == j || !common.is_subset(&rays[r].tight));
                if !adjacent {
                    continue;
                }
                // values[i] * v_j - values[j] * v_i vanishes on n
                let mut v = rays[j].v.scale(&values[i]);
                v.add_scaled(&(-values[j].clone()), &rays[i].v);
                let mut tight = common;
                tight.insert(k);
                fresh.push(Ray { v: v.primitive(), tight });
            }
        }
        let mut kept = Vec::with_capacity(rays.len() - neg.len() + fresh.len());
        for (mut r, v) in rays.into_iter().zip(values) {
            if v.is_negative() {
                continue;
            }
            if v.is_zero() {
                r.tight.insert(k);
            }
            kept.push(r);
        }
        kept.extend(fresh);
        rays = kept;
    }
    (lineality, rays.into_iter().map(|r| r.v).collect())
}
