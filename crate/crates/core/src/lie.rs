//! Lie algebras over Q given by structure constants, optionally with a
//! faithful matrix realization, and their subalgebras.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{
    combine, is_zero_vector, zero_vector, Rat, RatMat, SpanSolver, Subspace, Vector,
};

/// Real Lie algebra with rational structure constants
/// `[e_i, e_j] = sum_k c[i][j][k] e_k`.
pub struct LieAlgebra {
    name: String,
    dim: usize,
    sc: Vec<Rat>,
    /// Nonzero entries of `[e_i, e_j]`, indexed by `i * dim + j`.
    sparse: Vec<Vec<(usize, Rat)>>,
    realization: Option<Vec<RatMat>>,
    reductive: OnceLock<bool>,
}

impl fmt::Debug for LieAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LieAlgebra")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("realized", &self.realization.is_some())
            .finish()
    }
}

impl LieAlgebra {
    /// Validates antisymmetry and the Jacobi identity exactly.
    pub fn from_structure_constants(
        name: impl Into<String>,
        sc: Vec<Vec<Vec<Rat>>>,
    ) -> Result<Self> {
        let dim = sc.len();
        let mut flat = Vec::with_capacity(dim * dim * dim);
        for (i, plane) in sc.into_iter().enumerate() {
            if plane.len() != dim {
                return Err(Error::InvalidAlgebra(format!(
                    "sc[{i}] has {} rows, expected {dim}",
                    plane.len()
                )));
            }
            for (j, row) in plane.into_iter().enumerate() {
                if row.len() != dim {
                    return Err(Error::InvalidAlgebra(format!(
                        "sc[{i}][{j}] has {} entries, expected {dim}",
                        row.len()
                    )));
                }
                flat.extend(row);
            }
        }
        let g = Self::assemble(name.into(), dim, flat, None);
        g.validate()?;
        Ok(g)
    }

    /// Structure constants from the commutators of linearly independent
    /// matrices spanning a bracket-closed space.
    pub fn from_matrices(name: impl Into<String>, basis: Vec<RatMat>) -> Result<Self> {
        let name = name.into();
        let dim = basis.len();
        let Some(first) = basis.first() else {
            return Ok(Self::assemble(name, 0, vec![], Some(basis)));
        };
        let n = first.rows();
        for (i, m) in basis.iter().enumerate() {
            if m.rows() != n || m.cols() != n {
                return Err(Error::InvalidAlgebra(format!(
                    "basis[{i}] is {}x{}, expected {n}x{n}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        let flat: Vec<Vector> = basis.iter().map(RatMat::to_vector).collect();
        if RatMat::from_rows(flat.clone())?.rank() < dim {
            return Err(Error::InvalidAlgebra(
                "basis matrices are linearly dependent".into(),
            ));
        }
        let solver = SpanSolver::new(n * n, &flat);
        let mut sc = vec![Rat::zero(); dim * dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                let c = basis[i].commutator(&basis[j]);
                let coords = solver.coordinates(&c.to_vector()).ok_or_else(|| {
                    Error::InvalidAlgebra(format!("[basis[{i}], basis[{j}]] leaves the span"))
                })?;
                for (k, x) in coords.into_iter().enumerate() {
                    sc[(i * dim + j) * dim + k] = x;
                }
            }
        }
        let g = Self::assemble(name, dim, sc, Some(basis));
        g.validate()?;
        Ok(g)
    }

    fn assemble(name: String, dim: usize, sc: Vec<Rat>, realization: Option<Vec<RatMat>>) -> Self {
        let sparse = (0..dim * dim)
            .map(|ij| {
                (0..dim)
                    .filter_map(|k| {
                        let c = &sc[ij * dim + k];
                        (!c.is_zero()).then(|| (k, c.clone()))
                    })
                    .collect()
            })
            .collect();
        LieAlgebra {
            name,
            dim,
            sc,
            sparse,
            realization,
            reductive: OnceLock::new(),
        }
    }

    fn validate(&self) -> Result<()> {
        let d = self.dim;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    if self.sc[(i * d + j) * d + k] != -&self.sc[(j * d + i) * d + k] {
                        return Err(Error::InvalidAlgebra(format!(
                            "antisymmetry fails at c[{i}][{j}][{k}]"
                        )));
                    }
                }
            }
        }
        for i in 0..d {
            for j in i + 1..d {
                for k in j + 1..d {
                    let a = self.bracket_basis_vec(i, &self.basis_bracket(j, k));
                    let b = self.bracket_basis_vec(j, &self.basis_bracket(k, i));
                    let c = self.bracket_basis_vec(k, &self.basis_bracket(i, j));
                    if !(0..d).all(|m| (&a[m] + &b[m] + &c[m]).is_zero()) {
                        return Err(Error::InvalidAlgebra(format!(
                            "Jacobi identity fails for basis triple ({i}, {j}, {k})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn realization(&self) -> Option<&[RatMat]> {
        self.realization.as_deref()
    }

    /// `c[i][j][k]`
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> &Rat {
        &self.sc[(i * self.dim + j) * self.dim + k]
    }

    pub fn structure_constants(&self) -> Vec<Vec<Vec<Rat>>> {
        let d = self.dim;
        (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        (0..d)
                            .map(|k| self.structure_constant(i, j, k).clone())
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }

    fn basis_bracket(&self, i: usize, j: usize) -> Vector {
        let mut out = zero_vector(self.dim);
        for (k, c) in &self.sparse[i * self.dim + j] {
            out[*k] = c.clone();
        }
        out
    }

    fn bracket_basis_vec(&self, i: usize, y: &[Rat]) -> Vector {
        let mut out = zero_vector(self.dim);
        for (j, yj) in y.iter().enumerate() {
            if yj.is_zero() {
                continue;
            }
            for (k, c) in &self.sparse[i * self.dim + j] {
                out[*k] += yj * c;
            }
        }
        out
    }

    fn check_len(&self, x: &[Rat]) -> Result<()> {
        if x.len() == self.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            })
        }
    }

    pub fn bracket(&self, x: &[Rat], y: &[Rat]) -> Vector {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        let mut out = zero_vector(self.dim);
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let xy = xi * yj;
                for (k, c) in &self.sparse[i * self.dim + j] {
                    out[*k] += &xy * c;
                }
            }
        }
        out
    }

    /// Matrix of `y -> [x, y]`.
    pub fn ad(&self, x: &[Rat]) -> Result<RatMat> {
        self.check_len(x)?;
        let d = self.dim;
        let mut m = RatMat::zeros(d, d);
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for j in 0..d {
                for (k, c) in &self.sparse[i * d + j] {
                    m[(*k, j)] += xi * c;
                }
            }
        }
        Ok(m)
    }

    /// `kappa(e_i, e_j) = tr(ad e_i ad e_j)`.
    pub fn killing_form(&self) -> BilinearForm {
        let d = self.dim;
        let ads: Vec<RatMat> = (0..d)
            .map(|i| {
                self.ad(&crate::exact::unit_vector(d, i))
                    .expect("basis vector")
            })
            .collect();
        let mut gram = RatMat::zeros(d, d);
        for i in 0..d {
            for j in i..d {
                let t = trace_of_product(&ads[i], &ads[j]);
                gram[(i, j)] = t.clone();
                gram[(j, i)] = t;
            }
        }
        BilinearForm { gram }
    }

    /// Matrix of an element in the realization, if there is one.
    pub fn element_matrix(&self, x: &[Rat]) -> Option<RatMat> {
        let basis = self.realization.as_ref()?;
        let n = basis.first().map_or(0, RatMat::rows);
        let mut m = RatMat::zeros(n, n);
        for (c, b) in x.iter().zip(basis) {
            if !c.is_zero() {
                m = m.add(&b.scale(c));
            }
        }
        Some(m)
    }

    /// Coordinates of a matrix in the realization basis.
    pub fn coordinates_of_matrix(&self, m: &RatMat) -> Option<Vector> {
        let basis = self.realization.as_ref()?;
        let flat: Vec<Vector> = basis.iter().map(RatMat::to_vector).collect();
        SpanSolver::new(m.rows() * m.cols(), &flat).coordinates(&m.to_vector())
    }

    pub fn whole(&self) -> Subalgebra<'_> {
        Subalgebra {
            parent: self,
            space: Subspace::full(self.dim),
        }
    }

    /// `rad(g) = z(g)`, computed once.
    pub fn is_reductive(&self) -> bool {
        *self.reductive.get_or_init(|| {
            let g = self.whole();
            g.radical().space.same_span(&g.center().space)
        })
    }

    pub fn require_reductive(&self) -> Result<()> {
        if self.is_reductive() {
            Ok(())
        } else {
            let g = self.whole();
            Err(Error::NotReductive {
                radical: g.radical().dim(),
                center: g.center().dim(),
            })
        }
    }

    /// `{ y in g : [y, s] = 0 for all s in S }`.
    pub fn centralizer(&self, s: &Subspace) -> Subspace {
        if s.is_zero() {
            return Subspace::full(self.dim);
        }
        let mut stacked: Option<RatMat> = None;
        for b in s.basis() {
            let a = self.ad(b).expect("dimension checked by Subspace");
            stacked = Some(match stacked {
                None => a,
                Some(m) => m.vstack(&a),
            });
        }
        Subspace::span(self.dim, &stacked.unwrap().kernel())
    }

    /// `{ y in g : [y, S] ⊂ S }`.
    pub fn normalizer(&self, s: &Subspace) -> Subspace {
        let ann = if s.is_zero() {
            return Subspace::full(self.dim);
        } else {
            RatMat::from_rows(s.basis().to_vec()).unwrap().kernel()
        };
        if ann.is_empty() {
            return Subspace::full(self.dim);
        }
        let mut rows = Vec::new();
        for b in s.basis() {
            let a = self.ad(b).expect("dimension checked by Subspace");
            for w in &ann {
                // w . [b, y] = 0
                rows.push(a.transpose().mul_vec(w));
            }
        }
        Subspace::span(self.dim, &RatMat::from_rows(rows).unwrap().kernel())
    }

    /// True iff every element of `s` acts nilpotently on `g` (checked on the
    /// associative envelope: iterated images of `g` reach zero).
    pub fn acts_nilpotently(&self, s: &Subspace) -> bool {
        let ads: Vec<RatMat> = s.basis().iter().map(|b| self.ad(b).unwrap()).collect();
        let mut v = Subspace::full(self.dim);
        for _ in 0..=self.dim {
            if v.is_zero() {
                return true;
            }
            let images: Vec<Vector> = ads
                .iter()
                .flat_map(|a| v.basis().iter().map(move |x| a.mul_vec(x)))
                .collect();
            let next = Subspace::span(self.dim, &images);
            if next.dim() == v.dim() && next.same_span(&v) {
                return false;
            }
            v = next;
        }
        v.is_zero()
    }

    /// Exact check that `ad x` is nilpotent: `(ad x)^dim = 0`.
    pub fn is_ad_nilpotent(&self, x: &[Rat]) -> Result<bool> {
        Ok(self.ad(x)?.pow(self.dim as u32).is_zero())
    }
}

fn trace_of_product(a: &RatMat, b: &RatMat) -> Rat {
    let n = a.rows();
    let mut t = Rat::zero();
    for i in 0..n {
        for k in 0..n {
            let x = &a[(i, k)];
            let y = &b[(k, i)];
            if !x.is_zero() && !y.is_zero() {
                t += x * y;
            }
        }
    }
    t
}

/// Symmetric bilinear form on g given by its Gram matrix in the basis of g.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BilinearForm {
    pub gram: RatMat,
}

impl BilinearForm {
    pub fn eval(&self, x: &[Rat], y: &[Rat]) -> Rat {
        crate::exact::dot(x, &self.gram.mul_vec(y))
    }

    pub fn is_symmetric(&self) -> bool {
        self.gram == self.gram.transpose()
    }

    pub fn is_zero(&self) -> bool {
        self.gram.is_zero()
    }

    /// Sylvester: every leading principal minor is positive.
    pub fn is_positive_definite(&self) -> bool {
        let n = self.gram.rows();
        self.is_symmetric()
            && (1..=n).all(|k| {
                let rows: Vec<Vector> = (0..k).map(|i| self.gram.row(i)[..k].to_vec()).collect();
                RatMat::from_rows(rows)
                    .unwrap()
                    .determinant()
                    .unwrap()
                    .is_positive()
            })
    }

    /// `B([x,y],z) + B(y,[x,z]) = 0` on all basis triples.
    pub fn is_invariant(&self, g: &LieAlgebra) -> bool {
        let d = g.dim();
        (0..d).all(|i| {
            let ad = g.ad(&crate::exact::unit_vector(d, i)).unwrap();
            // ad^T G + G ad = 0
            ad.transpose()
                .mul(&self.gram)
                .add(&self.gram.mul(&ad))
                .is_zero()
        })
    }
}

/// Bracket-closed subspace of a parent algebra, stored in the parent's
/// coordinates.
#[derive(Clone, Debug)]
pub struct Subalgebra<'g> {
    parent: &'g LieAlgebra,
    space: Subspace,
}

impl<'g> Subalgebra<'g> {
    /// Keeps the given (independent) basis and checks bracket closure.
    pub fn new(parent: &'g LieAlgebra, basis: Vec<Vector>) -> Result<Self> {
        let space = Subspace::new(parent.dim(), basis)?;
        Self::from_space(parent, space)
    }

    pub fn from_space(parent: &'g LieAlgebra, space: Subspace) -> Result<Self> {
        if space.ambient() != parent.dim() {
            return Err(Error::DimensionMismatch {
                expected: parent.dim(),
                got: space.ambient(),
            });
        }
        let solver = space.solver();
        let b = space.basis();
        for i in 0..b.len() {
            for j in i + 1..b.len() {
                if solver.coordinates(&parent.bracket(&b[i], &b[j])).is_none() {
                    return Err(Error::NotClosed(format!("[b{i}, b{j}] is not in the span")));
                }
            }
        }
        Ok(Subalgebra { parent, space })
    }

    pub fn parent(&self) -> &'g LieAlgebra {
        self.parent
    }

    pub fn space(&self) -> &Subspace {
        &self.space
    }

    pub fn basis(&self) -> &[Vector] {
        self.space.basis()
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Coordinates (in this basis) of `[b_i, b_j]`.
    pub fn structure_in_basis(&self) -> Vec<Vec<Vector>> {
        let s = self.space.solver();
        let b = self.basis();
        b.iter()
            .map(|x| {
                b.iter()
                    .map(|y| {
                        s.coordinates(&self.parent.bracket(x, y))
                            .expect("closure checked at construction")
                    })
                    .collect()
            })
            .collect()
    }

    /// `ad_h(b_i)` as a `dim h x dim h` matrix, for every basis element.
    pub fn intrinsic_ads(&self) -> Vec<RatMat> {
        let st = self.structure_in_basis();
        let k = self.dim();
        (0..k).map(|i| RatMat::from_columns(k, &st[i])).collect()
    }

    /// Killing form of h as an abstract algebra, in the basis of h.
    pub fn intrinsic_killing(&self) -> RatMat {
        let ads = self.intrinsic_ads();
        let k = self.dim();
        let mut gram = RatMat::zeros(k, k);
        for i in 0..k {
            for j in i..k {
                let t = trace_of_product(&ads[i], &ads[j]);
                gram[(i, j)] = t.clone();
                gram[(j, i)] = t;
            }
        }
        gram
    }

    fn from_coords(&self, coords: &[Vector]) -> Subalgebra<'g> {
        let vectors: Vec<Vector> = coords
            .iter()
            .map(|c| combine(self.parent.dim(), c, self.basis()))
            .collect();
        Subalgebra {
            parent: self.parent,
            space: Subspace::span(self.parent.dim(), &vectors),
        }
    }

    /// `{ x in h : [x, h] = 0 }`
    pub fn center(&self) -> Subalgebra<'g> {
        let k = self.dim();
        if k == 0 {
            return self.clone();
        }
        let st = self.structure_in_basis();
        // sum_i a_i [b_i, b_j] = 0 for every j, in h coordinates
        let mut rows = Vec::new();
        for j in 0..k {
            for r in 0..k {
                rows.push((0..k).map(|i| st[i][j][r].clone()).collect::<Vector>());
            }
        }
        let kernel = RatMat::from_rows(rows).unwrap().kernel();
        self.from_coords(&kernel)
    }

    /// `[h, h]`
    pub fn derived(&self) -> Subalgebra<'g> {
        let b = self.basis();
        let mut brackets = Vec::new();
        for i in 0..b.len() {
            for j in i + 1..b.len() {
                let c = self.parent.bracket(&b[i], &b[j]);
                if !is_zero_vector(&c) {
                    brackets.push(c);
                }
            }
        }
        Subalgebra {
            parent: self.parent,
            space: Subspace::span(self.parent.dim(), &brackets),
        }
    }

    /// Solvable radical via Cartan's criterion:
    /// `rad(h) = { x : kappa_h(x, [h,h]) = 0 }`.
    pub fn radical(&self) -> Subalgebra<'g> {
        let k = self.dim();
        if k == 0 {
            return self.clone();
        }
        let kappa = self.intrinsic_killing();
        let solver = self.space.solver();
        let derived: Vec<Vector> = self
            .derived()
            .basis()
            .iter()
            .map(|d| solver.coordinates(d).expect("[h,h] lies in h"))
            .collect();
        if derived.is_empty() {
            return self.clone();
        }
        let rows: Vec<Vector> = derived.iter().map(|d| kappa.mul_vec(d)).collect();
        let kernel = RatMat::from_rows(rows).unwrap().kernel();
        self.from_coords(&kernel)
    }

    pub fn is_abelian(&self) -> bool {
        self.derived().space.is_zero()
    }

    /// `tr(ad_h b_i)` for each basis element.
    pub fn intrinsic_traces(&self) -> Vec<Rat> {
        self.intrinsic_ads().iter().map(RatMat::trace).collect()
    }

    /// Any basis change of the same span.
    pub fn with_basis(&self, basis: Vec<Vector>) -> Result<Subalgebra<'g>> {
        let s = Subspace::new(self.parent.dim(), basis)?;
        if !s.same_span(&self.space) {
            return Err(Error::invariant("new basis spans a different subspace"));
        }
        Ok(Subalgebra {
            parent: self.parent,
            space: s,
        })
    }
}

/// Outcome of the unimodularity test, with the offending basis element when
/// it fails.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Unimodularity {
    pub unimodular: bool,
    /// `tr(ad_h b_i)` for every basis element of h.
    pub traces: Vec<Rat>,
}

/// For reductive g, `G/H` carries an invariant measure iff
/// `tr(ad_h x) = 0` for all `x in h`.
pub fn unimodularity(g: &LieAlgebra, h: &Subalgebra<'_>) -> Result<Unimodularity> {
    g.require_reductive()?;
    let traces = h.intrinsic_traces();
    Ok(Unimodularity {
        unimodular: traces.iter().all(Rat::is_zero),
        traces,
    })
}

pub fn is_unimodular_pair(g: &LieAlgebra, h: &Subalgebra<'_>) -> Result<bool> {
    Ok(unimodularity(g, h)?.unimodular)
}

pub fn ad(g: &LieAlgebra, x: &[Rat]) -> Result<RatMat> {
    g.ad(x)
}

pub fn killing_form(g: &LieAlgebra) -> BilinearForm {
    g.killing_form()
}

pub fn center<'g>(h: &Subalgebra<'g>) -> Subalgebra<'g> {
    h.center()
}

pub fn derived_subalgebra<'g>(h: &Subalgebra<'g>) -> Subalgebra<'g> {
    h.derived()
}

pub fn radical<'g>(h: &Subalgebra<'g>) -> Subalgebra<'g> {
    h.radical()
}
