//! Reductive-type decision for a pair `(g, h)` and the resulting VAI verdict.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{minimal_polynomial, Poly, Rat, RatMat, Subspace, Vector};
use crate::lie::{unimodularity, BilinearForm, LieAlgebra, Subalgebra};

/// A Cartan involution of g together with its eigenspaces and the inner
/// product `<X, Y> = -B(theta X, Y)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CartanData {
    /// Column `j` is `theta(e_j)`.
    pub theta: RatMat,
    pub k_part: Subspace,
    pub p_part: Subspace,
    pub inner: BilinearForm,
}

impl CartanData {
    /// Validates `theta^2 = 1`, the automorphism property on basis brackets
    /// and positive definiteness of the inner product. The invariant form is
    /// the Killing form when it is nondegenerate, otherwise the trace form
    /// of the matrix realization.
    pub fn new(g: &LieAlgebra, theta: RatMat) -> Result<Self> {
        let d = g.dim();
        if theta.rows() != d || theta.cols() != d {
            return Err(Error::InvalidCartan(format!(
                "theta is {}x{}, expected {d}x{d}",
                theta.rows(),
                theta.cols()
            )));
        }
        if theta.mul(&theta) != RatMat::identity(d) {
            return Err(Error::InvalidCartan("theta^2 is not the identity".into()));
        }
        for i in 0..d {
            for j in i + 1..d {
                let ei = crate::exact::unit_vector(d, i);
                let ej = crate::exact::unit_vector(d, j);
                let lhs = theta.mul_vec(&g.bracket(&ei, &ej));
                let rhs = g.bracket(&theta.column(i), &theta.column(j));
                if lhs != rhs {
                    return Err(Error::InvalidCartan(format!(
                        "theta is not an automorphism on basis pair ({i}, {j})"
                    )));
                }
            }
        }
        let form = invariant_form(g)?;
        let inner = BilinearForm {
            gram: theta.transpose().mul(&form.gram).scale(&Rat::from_int(-1)),
        };
        if !inner.is_positive_definite() {
            return Err(Error::InvalidCartan(
                "-B(theta x, y) is not positive definite".into(),
            ));
        }
        let id = RatMat::identity(d);
        let k_part = Subspace::span(d, &theta.sub(&id).kernel());
        let p_part = Subspace::span(d, &theta.add(&id).kernel());
        Ok(CartanData {
            theta,
            k_part,
            p_part,
            inner,
        })
    }

    /// `theta(X) = -X^T` on a matrix realization.
    pub fn negative_transpose(g: &LieAlgebra) -> Result<Self> {
        let theta = crate::catalog::negative_transpose(g).ok_or_else(|| {
            Error::InvalidCartan("algebra has no matrix realization closed under transpose".into())
        })?;
        Self::new(g, theta)
    }

    pub fn apply(&self, x: &[Rat]) -> Vector {
        self.theta.mul_vec(x)
    }
}

/// Nondegenerate invariant symmetric form: Killing form if nondegenerate,
/// else `tr(XY)` on the realization.
pub fn invariant_form(g: &LieAlgebra) -> Result<BilinearForm> {
    let kappa = g.killing_form();
    if kappa.gram.rank() == g.dim() {
        return Ok(kappa);
    }
    let basis = g.realization().ok_or_else(|| {
        Error::InvalidCartan("Killing form is degenerate and there is no matrix realization".into())
    })?;
    let d = g.dim();
    let mut gram = RatMat::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            gram[(i, j)] = basis[i].mul(&basis[j]).trace();
        }
    }
    if gram.rank() < d {
        return Err(Error::InvalidCartan("trace form is degenerate".into()));
    }
    Ok(BilinearForm { gram })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Fails,
    NoInvariantMeasure,
}

impl Verdict {
    /// Process exit code used by the CLI.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Holds => 0,
            Verdict::Fails => 3,
            Verdict::NoInvariantMeasure => 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    /// `theta(h) = h`; `q = h^perp` with `[h, q] ⊂ q`.
    ThetaStable { q: Subspace },
    /// `rad(h) = z(h)` and every basis element of `z(h)` has a squarefree
    /// minimal ad-polynomial (used when no involution is supplied).
    CenterSemisimple { center: Subspace },
    /// A central element of h that does not act semisimply on g.
    CenterWitness {
        element: Vector,
        minimal_polynomial: Poly,
    },
    /// h itself is not reductive.
    RadicalWitness { radical: Subspace, center: Subspace },
}

impl Certificate {
    pub fn certifies_reductive(&self) -> bool {
        matches!(
            self,
            Certificate::ThetaStable { .. } | Certificate::CenterSemisimple { .. }
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductivityReport {
    pub unimodular: bool,
    /// `tr(ad_h b_i)` per basis element of h.
    pub traces: Vec<Rat>,
    pub reductive_in_g: bool,
    pub vai: Verdict,
    pub certificate: Certificate,
    /// `None` when no involution was supplied.
    pub theta_stable: Option<bool>,
    pub symmetric_pair: bool,
}

/// h is reductive in g iff `rad(h) = z(h)` and `z(h)` acts semisimply.
pub fn is_reductive_in_g(g: &LieAlgebra, h: &Subalgebra<'_>) -> Result<(bool, Certificate)> {
    g.require_reductive()?;
    let radical = h.radical();
    let center = h.center();
    if !radical.space().same_span(center.space()) {
        return Ok((
            false,
            Certificate::RadicalWitness {
                radical: radical.space().clone(),
                center: center.space().clone(),
            },
        ));
    }
    for z in center.basis() {
        let mp = minimal_polynomial(&g.ad(z)?)?;
        if !mp.is_squarefree()? {
            return Ok((
                false,
                Certificate::CenterWitness {
                    element: z.clone(),
                    minimal_polynomial: mp,
                },
            ));
        }
    }
    Ok((
        true,
        Certificate::CenterSemisimple {
            center: center.space().clone(),
        },
    ))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaStability {
    pub stable: bool,
    /// Orthogonal complement of h; present iff `stable`.
    pub q: Option<Subspace>,
}

/// `theta(h) = h`, and if so `q = h^perp` with `h + q = g` and `[h,q] ⊂ q`
/// asserted exactly.
pub fn check_theta_stable(
    g: &LieAlgebra,
    h: &Subalgebra<'_>,
    cartan: &CartanData,
) -> Result<ThetaStability> {
    let image = h.space().image_under(&cartan.theta);
    if !image.same_span(h.space()) {
        return Ok(ThetaStability {
            stable: false,
            q: None,
        });
    }
    let q = h.space().orthogonal_complement(&cartan.inner.gram);
    if q.dim() + h.dim() != g.dim() || !q.is_independent_of(h.space()) {
        return Err(Error::invariant("h + q is not a direct sum equal to g"));
    }
    let qs = q.solver();
    for x in h.basis() {
        for y in q.basis() {
            if qs.coordinates(&g.bracket(x, y)).is_none() {
                return Err(Error::invariant("[h, q] is not contained in q"));
            }
        }
    }
    Ok(ThetaStability {
        stable: true,
        q: Some(q),
    })
}

/// `[q, q] ⊂ h` for a theta-stable h.
pub fn is_symmetric_pair(g: &LieAlgebra, h: &Subalgebra<'_>, cartan: &CartanData) -> Result<bool> {
    let ts = check_theta_stable(g, h, cartan)?;
    let q = ts.q.ok_or(Error::NotThetaStable)?;
    let hs = h.space().solver();
    let b = q.basis();
    for i in 0..b.len() {
        for j in i + 1..b.len() {
            if hs.coordinates(&g.bracket(&b[i], &b[j])).is_none() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn vai_verdict(g: &LieAlgebra, h: &Subalgebra<'_>) -> Result<ReductivityReport> {
    verdict(g, h, None)
}

/// Verdict plus theta certificates. Fails with an invariant violation if the
/// algebraic criterion and theta-stability disagree.
pub fn vai_verdict_with_theta(
    g: &LieAlgebra,
    h: &Subalgebra<'_>,
    cartan: &CartanData,
) -> Result<ReductivityReport> {
    verdict(g, h, Some(cartan))
}

fn verdict(
    g: &LieAlgebra,
    h: &Subalgebra<'_>,
    cartan: Option<&CartanData>,
) -> Result<ReductivityReport> {
    let uni = unimodularity(g, h)?;
    let (reductive, mut certificate) = is_reductive_in_g(g, h)?;
    let mut theta_stable = None;
    let mut symmetric_pair = false;
    if let Some(c) = cartan {
        let ts = check_theta_stable(g, h, c)?;
        if ts.stable && !reductive {
            return Err(Error::invariant(
                "h is theta-stable but the center-acts-semisimply criterion says it is not reductive in g",
            ));
        }
        theta_stable = Some(ts.stable);
        if let Some(q) = ts.q {
            symmetric_pair = is_symmetric_pair(g, h, c)?;
            certificate = Certificate::ThetaStable { q };
        }
    }
    let vai = if !uni.unimodular {
        Verdict::NoInvariantMeasure
    } else if reductive {
        Verdict::Holds
    } else {
        Verdict::Fails
    };
    Ok(ReductivityReport {
        unimodular: uni.unimodular,
        traces: uni.traces,
        reductive_in_g: reductive,
        vai,
        certificate,
        theta_stable,
        symmetric_pair,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{self, e, sl};
    use crate::exact::ints;

    #[test]
    fn reductive_in_sl2() {
        let g = sl(2);
        let so2 = Subalgebra::new(&g, vec![ints(&[0, 1, -1])]).unwrap();
        assert!(is_reductive_in_g(&g, &so2).unwrap().0);

        let n = Subalgebra::new(&g, vec![ints(&[0, 1, 0])]).unwrap();
        let (ok, cert) = is_reductive_in_g(&g, &n).unwrap();
        assert!(!ok);
        match cert {
            Certificate::CenterWitness {
                element,
                minimal_polynomial,
            } => {
                assert_eq!(element, ints(&[0, 1, 0]));
                assert_eq!(minimal_polynomial, Poly::from_ints(&[0, 0, 0, 1]));
            }
            other => panic!("unexpected certificate {other:?}"),
        }

        let a = Subalgebra::new(&g, vec![ints(&[1, 0, 0])]).unwrap();
        assert!(is_reductive_in_g(&g, &a).unwrap().0);
        assert_eq!(
            minimal_polynomial(&g.ad(&ints(&[1, 0, 0])).unwrap()).unwrap(),
            Poly::from_ints(&[0, -4, 0, 1])
        );
    }

    #[test]
    fn theta_stability_sl2() {
        let g = sl(2);
        let c = CartanData::negative_transpose(&g).unwrap();
        let so2 = Subalgebra::new(&g, vec![ints(&[0, 1, -1])]).unwrap();
        let ts = check_theta_stable(&g, &so2, &c).unwrap();
        assert!(ts.stable);
        assert!(ts
            .q
            .unwrap()
            .same_span(&Subspace::span(3, &[ints(&[1, 0, 0]), ints(&[0, 1, 1])])));

        let n = Subalgebra::new(&g, vec![ints(&[0, 1, 0])]).unwrap();
        assert!(!check_theta_stable(&g, &n, &c).unwrap().stable);
        assert!(matches!(
            is_symmetric_pair(&g, &n, &c),
            Err(Error::NotThetaStable)
        ));

        let a = Subalgebra::new(&g, vec![ints(&[1, 0, 0])]).unwrap();
        let ts = check_theta_stable(&g, &a, &c).unwrap();
        assert!(ts
            .q
            .unwrap()
            .same_span(&Subspace::span(3, &[ints(&[0, 1, 0]), ints(&[0, 0, 1])])));
        assert!(is_symmetric_pair(&g, &so2, &c).unwrap());
        assert!(is_symmetric_pair(&g, &a, &c).unwrap());
    }

    #[test]
    fn non_symmetric_so2_in_sl3() {
        let g = sl(3);
        let c = CartanData::negative_transpose(&g).unwrap();
        let rot: Vec<Rat> = crate::exact::sub_vec(&e(&g, 0, 1), &e(&g, 1, 0));
        let h = Subalgebra::new(&g, vec![rot]).unwrap();
        assert!(check_theta_stable(&g, &h, &c).unwrap().stable);
        assert!(!is_symmetric_pair(&g, &h, &c).unwrap());
    }

    #[test]
    fn verdicts_sl2() {
        let g = sl(2);
        let so2 = Subalgebra::new(&g, vec![ints(&[0, 1, -1])]).unwrap();
        let r = vai_verdict(&g, &so2).unwrap();
        assert!(r.unimodular && r.reductive_in_g);
        assert_eq!(r.vai, Verdict::Holds);

        let n = Subalgebra::new(&g, vec![ints(&[0, 1, 0])]).unwrap();
        let r = vai_verdict(&g, &n).unwrap();
        assert!(r.unimodular && !r.reductive_in_g);
        assert_eq!(r.vai, Verdict::Fails);

        let b = Subalgebra::new(&g, vec![ints(&[1, 0, 0]), ints(&[0, 1, 0])]).unwrap();
        let r = vai_verdict(&g, &b).unwrap();
        assert!(!r.unimodular);
        assert_eq!(r.vai, Verdict::NoInvariantMeasure);
    }

    #[test]
    fn cartan_validation() {
        let g = sl(2);
        assert!(matches!(
            CartanData::new(&g, RatMat::identity(3).scale(&Rat::from_int(-1))),
            Err(Error::InvalidCartan(_))
        ));
        // identity is an automorphism but the form is not positive definite
        assert!(matches!(
            CartanData::new(&g, RatMat::identity(3)),
            Err(Error::InvalidCartan(_))
        ));
        let c = CartanData::negative_transpose(&g).unwrap();
        assert_eq!(c.k_part.dim(), 1);
        assert_eq!(c.p_part.dim(), 2);
    }

    #[test]
    fn gl2_uses_trace_form() {
        let g = catalog::gl(2);
        let c = CartanData::negative_transpose(&g).unwrap();
        assert_eq!(c.p_part.dim(), 3);
    }
}
