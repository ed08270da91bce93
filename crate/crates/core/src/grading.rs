//! Gradings of g by a semisimple element and Jacobson-Morozov triples.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{
    minimal_polynomial, rational_eigen_decomposition, scale_vec, DirectSum, Rat, RatMat, Subspace,
    Vector,
};
use crate::lie::{LieAlgebra, Subalgebra};

/// Eigenspace decomposition `g = ⊕ g_X^λ` of `ad x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grading {
    pub x: Vector,
    pub parts: BTreeMap<Rat, Subspace>,
    pub positive: Subspace,
    pub zero: Subspace,
    pub negative: Subspace,
}

impl Grading {
    pub fn eigenvalues(&self) -> Vec<Rat> {
        self.parts.keys().cloned().collect()
    }

    pub fn part(&self, lambda: &Rat) -> Option<&Subspace> {
        self.parts.get(lambda)
    }

    fn splitting(&self) -> DirectSum {
        DirectSum::new(self.parts.values().cloned().collect()).expect("grading parts span g")
    }

    /// Nonzero eigencomponents of `v`.
    pub fn components(&self, v: &[Rat]) -> BTreeMap<Rat, Vector> {
        let comps = self.splitting().components(v);
        self.parts
            .keys()
            .cloned()
            .zip(comps)
            .filter(|(_, c)| c.iter().any(|x| !x.is_zero()))
            .collect()
    }

    /// `g_X^+ + g_X^0`.
    pub fn nonnegative(&self) -> Subspace {
        self.positive.sum(&self.zero)
    }
}

/// Exact grading by `ad x`. Needs `ad x` semisimple with rational spectrum.
pub fn grading_of(g: &LieAlgebra, x: &[Rat]) -> Result<Grading> {
    let adx = g.ad(x)?;
    let mp = minimal_polynomial(&adx)?;
    if !mp.is_squarefree()? {
        return Err(Error::NotSemisimple {
            minpoly: mp.to_string(),
        });
    }
    let dec = rational_eigen_decomposition(&adx)?;
    if !dec.residual.is_zero() {
        return Err(Error::IrrationalSpectrum {
            residual_dim: dec.residual.dim(),
        });
    }
    let n = g.dim();
    let mut positive = Subspace::zero(n);
    let mut negative = Subspace::zero(n);
    for (lambda, space) in &dec.eigenspaces {
        if lambda.is_positive() {
            positive = positive.sum(space);
        } else if lambda.is_negative() {
            negative = negative.sum(space);
        }
    }
    let zero = dec
        .eigenspaces
        .get(&Rat::zero())
        .cloned()
        .unwrap_or_else(|| Subspace::zero(n));
    let grading = Grading {
        x: x.to_vec(),
        parts: dec.eigenspaces,
        positive,
        zero,
        negative,
    };
    check_bracket_compatible(g, &grading)?;
    Ok(grading)
}

/// Asserts `[g^λ, g^μ] ⊂ g^{λ+μ}` for all pairs of parts.
pub fn check_bracket_compatible(g: &LieAlgebra, grading: &Grading) -> Result<()> {
    let n = g.dim();
    let parts: Vec<(&Rat, &Subspace)> = grading.parts.iter().collect();
    for (i, (l, a)) in parts.iter().enumerate() {
        for (m, b) in &parts[i..] {
            let target = grading.parts.get(&(*l + *m));
            let solver = target.map(Subspace::solver);
            for x in a.basis() {
                let adx = g.ad(x)?;
                for y in b.basis() {
                    let z = adx.mul_vec(y);
                    let ok = match &solver {
                        Some(s) => s.coordinates(&z).is_some(),
                        None => z.iter().all(Rat::is_zero),
                    };
                    if !ok {
                        return Err(Error::invariant(format!(
                            "[g^{l}, g^{m}] is not contained in g^{} (ambient dimension {n})",
                            *l + *m
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

/// `[x,u] = 2u`, `[x,v] = -2v`, `[u,v] = x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SL2Triple {
    x: Vector,
    u: Vector,
    v: Vector,
}

impl SL2Triple {
    /// Validates the three relations exactly.
    pub fn new(g: &LieAlgebra, x: Vector, u: Vector, v: Vector) -> Result<Self> {
        let two = Rat::from_int(2);
        let xu = g.bracket(&x, &u);
        let xv = g.bracket(&x, &v);
        let uv = g.bracket(&u, &v);
        if xu != scale_vec(&two, &u) {
            return Err(Error::invariant("[x, u] != 2u"));
        }
        if xv != scale_vec(&-two, &v) {
            return Err(Error::invariant("[x, v] != -2v"));
        }
        if uv != x {
            return Err(Error::invariant("[u, v] != x"));
        }
        if u.iter().all(Rat::is_zero) {
            return Err(Error::ZeroElement);
        }
        Ok(SL2Triple { x, u, v })
    }

    pub fn x(&self) -> &[Rat] {
        &self.x
    }

    pub fn u(&self) -> &[Rat] {
        &self.u
    }

    pub fn v(&self) -> &[Rat] {
        &self.v
    }
}

/// Completes a nilpotent `u` to a triple. First `x = [u, w]` with
/// `[x, u] = 2u`, then `v` with `[u, v] = x` and `[x, v] = -2v`; both linear
/// systems take the rref particular solution (free variables zero).
pub fn jacobson_morozov(g: &LieAlgebra, u: &[Rat]) -> Result<SL2Triple> {
    if u.len() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            got: u.len(),
        });
    }
    if u.iter().all(Rat::is_zero) {
        return Err(Error::ZeroElement);
    }
    if !g.is_ad_nilpotent(u)? {
        return Err(Error::NotNilpotent);
    }
    let n = g.dim();
    let adu = g.ad(u)?;
    let two = Rat::from_int(2);
    // [[u, w], u] = -ad_u^2 w = 2u
    let sys = adu.mul(&adu).scale(&Rat::from_int(-1));
    let w = sys
        .solve(&scale_vec(&two, u))
        .ok_or_else(|| Error::Unsolvable("[x, u] = 2u with x in [u, g]".into()))?;
    let x = adu.mul_vec(&w);
    // ad_u v = x and (ad_x + 2) v = 0, stacked.
    let shifted = g.ad(&x)?.add(&RatMat::identity(n).scale(&two));
    let stacked = adu.vstack(&shifted);
    let mut rhs = x.clone();
    rhs.extend(std::iter::repeat_n(Rat::zero(), n));
    let v = stacked
        .solve(&rhs)
        .ok_or_else(|| Error::Unsolvable("[u, v] = x, [x, v] = -2v".into()))?;
    SL2Triple::new(g, x, u.to_vec(), v)
}

/// Outcome of the graded-containment check for `n` and a triple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemRReport {
    /// `n ⊂ g_X^+ + g_X^0`.
    pub n_contained: bool,
    /// `z_g(u) ⊂ g_X^+ + g_X^0`.
    pub centralizer_contained: bool,
    /// Eigenvalues of `ad x` occurring in the basis vectors of n.
    pub eigencomponents: BTreeSet<Rat>,
}

impl LemRReport {
    pub fn holds(&self) -> bool {
        self.n_contained && self.centralizer_contained
    }
}

/// Checks `u ∈ z(n)` and the containments `n, z_g(u) ⊂ g_X^+ + g_X^0`.
pub fn lem_r_report(g: &LieAlgebra, n: &Subalgebra<'_>, triple: &SL2Triple) -> Result<LemRReport> {
    if !n.center().space().contains(triple.u()) {
        return Err(Error::InvalidArgument(
            "u does not lie in the center of n".into(),
        ));
    }
    if !g.acts_nilpotently(n.space()) {
        return Err(Error::NotNilpotent);
    }
    let grading = grading_of(g, triple.x())?;
    let nonneg = grading.nonnegative();
    let mut eigencomponents = BTreeSet::new();
    for b in n.basis() {
        eigencomponents.extend(grading.components(b).into_keys());
    }
    let zu = g.centralizer(&Subspace::span(g.dim(), &[triple.u().to_vec()]));
    Ok(LemRReport {
        n_contained: nonneg.contains_space(n.space()),
        centralizer_contained: nonneg.contains_space(&zu),
        eigencomponents,
    })
}

pub fn verify_lem_r(g: &LieAlgebra, n: &Subalgebra<'_>, triple: &SL2Triple) -> Result<bool> {
    Ok(lem_r_report(g, n, triple)?.holds())
}

/// `n ⊂ g_X^+ + g_X^0` for an arbitrary semisimple `x`. Used to exhibit the
/// negative case: a wrong grading element fails this test.
pub fn graded_containment(g: &LieAlgebra, n: &Subspace, x: &[Rat]) -> Result<bool> {
    Ok(grading_of(g, x)?.nonnegative().contains_space(n))
}

/// `ad x` restricted to an invariant subspace has trace `tr(ad x|s)`.
pub fn trace_on(g: &LieAlgebra, x: &[Rat], s: &Subspace) -> Result<Rat> {
    Ok(s.restrict(&g.ad(x)?)?.trace())
}
