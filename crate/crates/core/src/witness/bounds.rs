//! Growth exponents for pairs of reductive type.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{Rat, Subspace, Vector};
use crate::grading::{grading_of, trace_on};
use crate::lie::{LieAlgebra, Subalgebra};
use crate::reductivity::{
    check_theta_stable, is_symmetric_pair, vai_verdict_with_theta, CartanData, Verdict,
};

/// `v_B(exp(tX) z0) ≥ c cosh(λ t) ≥ c` with the constant `c` left symbolic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowerBoundCert {
    /// The direction as given (not normalized; see `x_norm_squared`).
    pub x: Vector,
    /// `<x, x>` for the Cartan inner product.
    pub x_norm_squared: Rat,
    /// ad x-stable complement of h.
    pub vx: Subspace,
    /// Eigenvalue of each basis vector of `vx`, in order.
    pub eigenvalues: Vec<Rat>,
    pub lambda: Rat,
    pub cosh_exponent: Rat,
}

pub fn predict_lower_bound(
    g: &LieAlgebra,
    h: &Subalgebra<'_>,
    cartan: &CartanData,
    x: &[Rat],
) -> Result<LowerBoundCert> {
    let report = vai_verdict_with_theta(g, h, cartan)?;
    if report.vai != Verdict::Holds {
        return Err(Error::NotReductiveType);
    }
    let neg: Vector = x.iter().map(|c| -c).collect();
    if cartan.apply(x) != neg {
        return Err(Error::InvalidArgument(
            "x is not in p (theta x != -x)".into(),
        ));
    }
    if h.basis().iter().any(|b| !cartan.inner.eval(x, b).is_zero()) {
        return Err(Error::InvalidArgument("x is not orthogonal to h".into()));
    }
    let grading = grading_of(g, x)?;
    let d = g.dim();
    let mut acc = h.space().clone();
    let mut chosen = Vec::new();
    let mut eigenvalues = Vec::new();
    for (lambda, space) in grading.parts.iter().rev() {
        for b in space.basis() {
            if !acc.contains(b) {
                acc = acc.sum(&Subspace::span(d, std::slice::from_ref(b)));
                chosen.push(b.clone());
                eigenvalues.push(lambda.clone());
            }
        }
    }
    let vx = Subspace::new(d, chosen)?;
    if vx.dim() + h.dim() != d {
        return Err(Error::invariant("vx is not a complement of h"));
    }
    let lambda: Rat = -eigenvalues
        .iter()
        .filter(|l| l.is_positive())
        .cloned()
        .sum::<Rat>();
    Ok(LowerBoundCert {
        x: x.to_vec(),
        x_norm_squared: cartan.inner.eval(x, x),
        vx,
        cosh_exponent: lambda.abs(),
        lambda,
        eigenvalues,
    })
}

/// `2ρ(x) = tr(ad x|u)` for the nilradical u of a σθ-stable parabolic.
pub fn predict_symmetric_exponent(
    g: &LieAlgebra,
    h: &Subalgebra<'_>,
    cartan: &CartanData,
    u: &Subspace,
    x: &[Rat],
) -> Result<Rat> {
    if !check_theta_stable(g, h, cartan)?.stable || !is_symmetric_pair(g, h, cartan)? {
        return Err(Error::NotSymmetric);
    }
    if !g.acts_nilpotently(u) {
        return Err(Error::InvalidArgument("u is not ad-nilpotent".into()));
    }
    trace_on(g, x, u)
}
