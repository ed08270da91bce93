//! Boundedness of `M_t = ‖Ad(a_t) π_v Ad(a_t)^{-1}‖` for `t ≤ 0`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{default_inner, DecayWitness};
use crate::error::{Error, Result};
use crate::exact::{RatMat, Vector};
use crate::lie::LieAlgebra;

/// Sampled grid is `t = 0, -1, ..., MT_GRID_MIN`.
pub const MT_GRID_MIN: i32 = -40;
/// Window whose smallest sample bounds the sequence (up to a factor 2).
pub const MT_TAIL: (f64, f64) = (-40.0, -30.0);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MtReport {
    pub structural: bool,
    /// One line per failed eigenvalue comparison.
    pub violations: Vec<String>,
    /// `(t, M_t)` samples.
    pub samples: Vec<(f64, f64)>,
    pub numeric: bool,
}

impl MtReport {
    pub fn holds(&self) -> bool {
        self.structural && self.numeric
    }
}

pub fn check_mt_bounded(g: &LieAlgebra, witness: &DecayWitness) -> Result<bool> {
    Ok(mt_report(g, witness)?.holds())
}

pub fn mt_report(g: &LieAlgebra, witness: &DecayWitness) -> Result<MtReport> {
    let grading = witness.grading(g)?;
    let split = witness.splitting();
    let n1 = witness.n1.solver();
    let mut violations = Vec::new();
    for u in witness.h.basis() {
        for (lambda, y) in grading.components(u) {
            if lambda.is_negative() {
                violations.push(format!("h has a component of eigenvalue {lambda} < 0"));
                continue;
            }
            if lambda.is_zero() || n1.coordinates(&y).is_some() {
                continue;
            }
            let pv = split.components(&y).swap_remove(1);
            if n1.coordinates(&pv).is_none() {
                violations.push(format!(
                    "projection of the eigenvalue-{lambda} component leaves n1"
                ));
                continue;
            }
            for mu in grading.components(&pv).into_keys() {
                if mu < lambda {
                    violations.push(format!(
                        "eigenvalue-{lambda} component projects onto eigenvalue {mu} < {lambda} in n1"
                    ));
                }
            }
        }
    }

    // Projection in the exact eigenbasis; the t-dependence is a scaling of
    // entry (i, j) by exp(t (λ_i - λ_j)).
    let d = g.dim();
    let mut cols: Vec<Vector> = Vec::with_capacity(d);
    let mut eigen: Vec<f64> = Vec::with_capacity(d);
    for (lambda, space) in &grading.parts {
        for b in space.basis() {
            cols.push(b.clone());
            eigen.push(lambda.to_f64());
        }
    }
    let e = RatMat::from_columns(d, &cols);
    let e_inv = e
        .inverse()
        .ok_or_else(|| Error::invariant("eigenbasis is singular"))?;
    let p_eig = e_inv.mul(&witness.projection_v()).mul(&e).to_f64();
    let e_f = e.to_f64();
    let e_inv_f = e_inv.to_f64();
    let gram = default_inner(g).gram.to_f64();
    let chol = nalgebra::Cholesky::new(gram)
        .ok_or_else(|| Error::invariant("inner product is not positive definite"))?;
    let lt = chol.l().transpose();
    let lt_inv = lt
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::invariant("Cholesky factor is singular"))?;
    let mut samples = Vec::new();
    for k in (MT_GRID_MIN..=0).rev() {
        let t = f64::from(k);
        let scaled = DMatrix::from_fn(d, d, |i, j| {
            p_eig[(i, j)] * (t * (eigen[i] - eigen[j])).exp()
        });
        let m = &e_f * scaled * &e_inv_f;
        let op = &lt * m * &lt_inv;
        let norm = op.singular_values().max();
        samples.push((t, norm));
    }
    let max_all = samples
        .iter()
        .map(|s| s.1)
        .fold(f64::NEG_INFINITY, f64::max);
    let min_tail = samples
        .iter()
        .filter(|(t, _)| *t >= MT_TAIL.0 && *t <= MT_TAIL.1)
        .map(|s| s.1)
        .fold(f64::INFINITY, f64::min);
    let numeric = max_all.is_finite() && max_all <= 2.0 * min_tail;
    Ok(MtReport {
        structural: violations.is_empty(),
        violations,
        samples,
        numeric,
    })
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::{build_n1, build_n1_ordered, GreedyOrder};
    use super::*;
    use crate::catalog::{e, sl};
    use crate::exact::add_vec;
    use crate::lie::Subalgebra;

    #[test]
    fn sl2_constant() {
        let (g, w) = sl2_witness();
        let r = mt_report(&g, &w).unwrap();
        assert!(r.holds());
        for (_, m) in &r.samples {
            assert!((m - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sl3_flag_vacuous() {
        let g = sl(3);
        let p = sl3_flag(&g);
        let h = Subalgebra::new(&g, vec![e(&g, 0, 1)]).unwrap();
        let w = build_n1(&g, &h, &p).unwrap();
        assert!(check_mt_bounded(&g, &w).unwrap());
    }

    #[test]
    fn ascending_greedy_is_caught() {
        let g = sl(3);
        let p = sl3_borel(&g);
        let h = Subalgebra::new(&g, vec![add_vec(&e(&g, 0, 1), &e(&g, 0, 2))]).unwrap();
        let good = mt_report(&g, &build_n1(&g, &h, &p).unwrap()).unwrap();
        assert!(good.holds(), "{good:?}");
        let bad = mt_report(
            &g,
            &build_n1_ordered(&g, &h, &p, GreedyOrder::Ascending).unwrap(),
        )
        .unwrap();
        assert!(!bad.structural);
        assert!(!bad.numeric);
        assert_eq!(bad.violations.len(), 1);
    }
}
