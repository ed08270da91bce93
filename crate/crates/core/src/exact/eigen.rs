use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::matrix::{sub_vec, Vector};
use super::{Poly, Rat, RatMat, Subspace};
use crate::error::{Error, Result};

fn require_square(m: &RatMat) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        })
    }
}

/// Monic annihilating polynomial of least degree: the first linear
/// dependence among `1, m, m^2, ...`.
pub fn minimal_polynomial(m: &RatMat) -> Result<Poly> {
    require_square(m)?;
    let n = m.rows();
    // (reduced vector, pivot position, combination of powers)
    let mut stored: Vec<(Vector, usize, Vector)> = Vec::new();
    let mut power = RatMat::identity(n);
    for k in 0..=n {
        let mut r = power.to_vector();
        let mut combo = vec![Rat::zero(); k + 1];
        combo[k] = Rat::one();
        for (ri, p, ci) in &stored {
            if r[*p].is_zero() {
                continue;
            }
            let f = &r[*p] / &ri[*p];
            for (x, y) in r.iter_mut().zip(ri) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
            for (x, y) in combo.iter_mut().zip(ci) {
                *x -= &f * y;
            }
        }
        match r.iter().position(|x| !x.is_zero()) {
            None => return Ok(Poly::new(combo)),
            Some(p) => stored.push((r, p, combo)),
        }
        power = power.mul(m);
    }
    unreachable!("Cayley-Hamilton bounds the degree by n")
}

/// Characteristic polynomial `det(x I - m)` (Faddeev-LeVerrier).
pub fn characteristic_polynomial(m: &RatMat) -> Result<Poly> {
    require_square(m)?;
    let n = m.rows();
    let mut c = vec![Rat::zero(); n + 1];
    c[n] = Rat::one();
    let mut mk = RatMat::zeros(n, n);
    for k in 1..=n {
        mk = m.mul(&mk).add(&RatMat::identity(n).scale(&c[n - k + 1]));
        let t = m.mul(&mk).trace();
        c[n - k] = -t / Rat::from_int(k as i64);
    }
    Ok(Poly::new(c))
}

/// Eigenspaces for every rational eigenvalue plus the invariant subspace
/// on which the characteristic polynomial has no rational root.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigenDecomposition {
    pub eigenspaces: BTreeMap<Rat, Subspace>,
    pub residual: Subspace,
}

impl EigenDecomposition {
    pub fn total_dim(&self) -> usize {
        self.eigenspaces.values().map(Subspace::dim).sum::<usize>() + self.residual.dim()
    }
}

pub fn rational_eigen_decomposition(m: &RatMat) -> Result<EigenDecomposition> {
    require_square(m)?;
    let n = m.rows();
    let charpoly = characteristic_polynomial(m)?;
    let roots = charpoly.rational_roots()?;
    let mut rest = charpoly;
    let mut eigenspaces = BTreeMap::new();
    for r in roots {
        let lin = Poly::linear(&r);
        loop {
            let (q, rem) = rest.div_rem(&lin);
            if !rem.is_zero() {
                break;
            }
            rest = q;
        }
        let shifted = m.sub(&RatMat::identity(n).scale(&r));
        eigenspaces.insert(r, Subspace::span(n, &shifted.kernel()));
    }
    let residual = if rest.degree() == Some(0) {
        Subspace::zero(n)
    } else {
        Subspace::span(n, &rest.eval_matrix(m).kernel())
    };
    Ok(EigenDecomposition {
        eigenspaces,
        residual,
    })
}

/// Checks `m v = lambda v` exactly.
pub fn is_eigenvector(m: &RatMat, lambda: &Rat, v: &[Rat]) -> bool {
    let mv = m.mul_vec(v);
    let lv: Vector = v.iter().map(|x| lambda * x).collect();
    sub_vec(&mv, &lv).iter().all(Rat::is_zero)
}
