use serde::{Deserialize, Serialize};

use super::matrix::{combine, is_zero_vector, zero_vector, Vector};
use super::{Rat, RatMat};
use crate::error::{Error, Result};

/// Linear subspace of Q^n given by a linearly independent basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SubspaceRepr", into = "SubspaceRepr")]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vector>,
}

#[derive(Serialize, Deserialize)]
struct SubspaceRepr {
    ambient: usize,
    basis: Vec<Vector>,
}

impl TryFrom<SubspaceRepr> for Subspace {
    type Error = Error;
    fn try_from(r: SubspaceRepr) -> Result<Self> {
        Subspace::new(r.ambient, r.basis)
    }
}

impl From<Subspace> for SubspaceRepr {
    fn from(s: Subspace) -> Self {
        SubspaceRepr {
            ambient: s.ambient,
            basis: s.basis,
        }
    }
}

impl Subspace {
    /// Keeps the given basis; fails if the vectors are dependent.
    pub fn new(ambient: usize, basis: Vec<Vector>) -> Result<Self> {
        for v in &basis {
            if v.len() != ambient {
                return Err(Error::DimensionMismatch {
                    expected: ambient,
                    got: v.len(),
                });
            }
        }
        if !basis.is_empty() && RatMat::from_rows(basis.clone())?.rank() < basis.len() {
            return Err(Error::LinearlyDependent);
        }
        Ok(Subspace { ambient, basis })
    }

    /// Span of arbitrary vectors, with the reduced row echelon basis.
    pub fn span(ambient: usize, vectors: &[Vector]) -> Self {
        let vectors: Vec<Vector> = vectors
            .iter()
            .filter(|v| !is_zero_vector(v))
            .cloned()
            .collect();
        if vectors.is_empty() {
            return Subspace::zero(ambient);
        }
        let (r, pivots) = RatMat::from_rows(vectors)
            .expect("span: ragged vectors")
            .rref();
        Subspace {
            ambient,
            basis: (0..pivots.len()).map(|i| r.row(i).to_vec()).collect(),
        }
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: vec![],
        }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: (0..ambient)
                .map(|i| super::unit_vector(ambient, i))
                .collect(),
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn into_basis(self) -> Vec<Vector> {
        self.basis
    }

    /// Same span, reduced row echelon basis.
    pub fn canonical(&self) -> Self {
        Subspace::span(self.ambient, &self.basis)
    }

    pub fn solver(&self) -> SpanSolver {
        SpanSolver::new(self.ambient, &self.basis)
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        self.solver().coordinates(v).is_some()
    }

    pub fn coordinates(&self, v: &[Rat]) -> Option<Vector> {
        self.solver().coordinates(v)
    }

    pub fn contains_space(&self, other: &Subspace) -> bool {
        let s = self.solver();
        other.basis.iter().all(|v| s.coordinates(v).is_some())
    }

    pub fn same_span(&self, other: &Subspace) -> bool {
        self.dim() == other.dim() && self.contains_space(other)
    }

    pub fn sum(&self, other: &Subspace) -> Self {
        let mut all = self.basis.clone();
        all.extend(other.basis.iter().cloned());
        Subspace::span(self.ambient, &all)
    }

    /// True iff `self ∩ other = 0`.
    pub fn is_independent_of(&self, other: &Subspace) -> bool {
        self.sum(other).dim() == self.dim() + other.dim()
    }

    pub fn intersection(&self, other: &Subspace) -> Self {
        if self.is_zero() || other.is_zero() {
            return Subspace::zero(self.ambient);
        }
        // Solve sum a_i s_i - sum b_j o_j = 0.
        let mut cols = self.basis.clone();
        cols.extend(other.basis.iter().map(|v| v.iter().map(|x| -x).collect()));
        let m = RatMat::from_columns(self.ambient, &cols);
        let vectors: Vec<Vector> = m
            .kernel()
            .into_iter()
            .map(|k| combine(self.ambient, &k[..self.dim()], &self.basis))
            .collect();
        Subspace::span(self.ambient, &vectors)
    }

    /// `{ y : x^T G y = 0 for all x in self }`.
    pub fn orthogonal_complement(&self, gram: &RatMat) -> Self {
        if self.is_zero() {
            return Subspace::full(self.ambient);
        }
        let rows: Vec<Vector> = self
            .basis
            .iter()
            .map(|x| gram.transpose().mul_vec(x))
            .collect();
        let m = RatMat::from_rows(rows).expect("orthogonal complement");
        Subspace::span(self.ambient, &m.kernel())
    }

    /// Extends `self` greedily by candidates (in order) that are independent
    /// of everything chosen so far. Returns the indices of accepted candidates.
    pub fn extend_greedy<'a>(
        &self,
        candidates: impl IntoIterator<Item = &'a Vector>,
    ) -> (Self, Vec<usize>) {
        let mut acc = self.clone();
        let mut taken = Vec::new();
        for (i, c) in candidates.into_iter().enumerate() {
            if acc.contains(c) {
                continue;
            }
            acc.basis.push(c.clone());
            taken.push(i);
        }
        (acc, taken)
    }

    /// Image under a linear map given as a square matrix.
    pub fn image_under(&self, m: &RatMat) -> Self {
        let v: Vec<Vector> = self.basis.iter().map(|b| m.mul_vec(b)).collect();
        Subspace::span(self.ambient, &v)
    }

    /// True iff `m` maps the subspace into itself.
    pub fn is_invariant_under(&self, m: &RatMat) -> bool {
        let s = self.solver();
        self.basis
            .iter()
            .all(|b| s.coordinates(&m.mul_vec(b)).is_some())
    }

    /// Matrix of `m` restricted to this (invariant) subspace, in its basis.
    pub fn restrict(&self, m: &RatMat) -> Result<RatMat> {
        let s = self.solver();
        let mut cols = Vec::with_capacity(self.dim());
        for b in &self.basis {
            let c = s
                .coordinates(&m.mul_vec(b))
                .ok_or_else(|| Error::invariant("subspace is not invariant under the map"))?;
            cols.push(c);
        }
        Ok(RatMat::from_columns(self.dim(), &cols))
    }
}

/// Precomputed coordinate solver for a fixed family of independent vectors.
#[derive(Clone, Debug)]
pub struct SpanSolver {
    ambient: usize,
    reduced: Vec<Vector>,
    pivots: Vec<usize>,
    transform: RatMat,
}

impl SpanSolver {
    pub fn new(ambient: usize, basis: &[Vector]) -> Self {
        let k = basis.len();
        if k == 0 {
            return SpanSolver {
                ambient,
                reduced: vec![],
                pivots: vec![],
                transform: RatMat::zeros(0, 0),
            };
        }
        let mut aug = RatMat::zeros(k, ambient + k);
        for (i, b) in basis.iter().enumerate() {
            for (j, x) in b.iter().enumerate() {
                aug[(i, j)] = x.clone();
            }
            aug[(i, ambient + i)] = Rat::one();
        }
        let (r, pivots) = aug.rref();
        assert!(
            pivots.len() == k && pivots.iter().all(|&p| p < ambient),
            "SpanSolver: basis vectors are dependent"
        );
        let reduced = (0..k).map(|i| r.row(i)[..ambient].to_vec()).collect();
        let mut transform = RatMat::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                transform[(i, j)] = r[(i, ambient + j)].clone();
            }
        }
        SpanSolver {
            ambient,
            reduced,
            pivots,
            transform,
        }
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    /// Coordinates of `v` in the original basis, or `None` if outside the span.
    pub fn coordinates(&self, v: &[Rat]) -> Option<Vector> {
        assert_eq!(v.len(), self.ambient);
        let c: Vector = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let recon = combine(self.ambient, &c, &self.reduced);
        if recon.as_slice() != v {
            return None;
        }
        // v = c R = c T B
        let k = self.dim();
        let mut out = zero_vector(k);
        for (i, ci) in c.iter().enumerate() {
            if ci.is_zero() {
                continue;
            }
            for j in 0..k {
                let t = &self.transform[(i, j)];
                if !t.is_zero() {
                    out[j] += ci * t;
                }
            }
        }
        Some(out)
    }
}

/// Splitting of the ambient space into a direct sum of parts, with the
/// projections onto each part along the others.
#[derive(Clone, Debug)]
pub struct DirectSum {
    parts: Vec<Subspace>,
    solver: SpanSolver,
}

impl DirectSum {
    pub fn new(parts: Vec<Subspace>) -> Result<Self> {
        let ambient = parts.first().map_or(0, Subspace::ambient);
        let all: Vec<Vector> = parts.iter().flat_map(|p| p.basis.iter().cloned()).collect();
        if all.len() != ambient {
            return Err(Error::invariant(format!(
                "parts have total dimension {} in an ambient space of dimension {ambient}",
                all.len()
            )));
        }
        if !all.is_empty() && RatMat::from_rows(all.clone())?.rank() < ambient {
            return Err(Error::invariant("parts do not form a direct sum"));
        }
        Ok(DirectSum {
            solver: SpanSolver::new(ambient, &all),
            parts,
        })
    }

    pub fn parts(&self) -> &[Subspace] {
        &self.parts
    }

    /// Components of `v` in each part (as ambient vectors).
    pub fn components(&self, v: &[Rat]) -> Vec<Vector> {
        let c = self
            .solver
            .coordinates(v)
            .expect("direct sum spans the space");
        let mut offset = 0;
        self.parts
            .iter()
            .map(|p| {
                let k = p.dim();
                let comp = combine(p.ambient(), &c[offset..offset + k], p.basis());
                offset += k;
                comp
            })
            .collect()
    }

    /// Coefficients of `v` in the concatenated basis of all parts.
    pub fn coefficients(&self, v: &[Rat]) -> Vector {
        self.solver
            .coordinates(v)
            .expect("direct sum spans the space")
    }

    /// Matrix (in the ambient basis) of the projection onto part `i`.
    pub fn projection(&self, i: usize) -> RatMat {
        let n = self.solver.ambient;
        let cols: Vec<Vector> = (0..n)
            .map(|j| self.components(&super::unit_vector(n, j)).swap_remove(i))
            .collect();
        RatMat::from_columns(n, &cols)
    }
}
