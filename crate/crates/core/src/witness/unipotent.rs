//! Exact decay rates for ad-nilpotent subalgebras.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{Rat, Subspace, Vector};
use crate::grading::{grading_of, jacobson_morozov, lem_r_report, trace_on, SL2Triple};
use crate::lie::{LieAlgebra, Subalgebra};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnipotentWitness {
    pub x: Vector,
    /// `tr(ad x|n1)`.
    pub gamma: Rat,
    /// `n1 = n` when x normalizes n; `n1 = R u` for the averaged construction.
    pub n1: Subspace,
    /// Set when the rate belongs to `G/N1` and is transported to `G/N` by
    /// averaging over `N/N1`.
    pub averaged: bool,
    pub triple: Option<SL2Triple>,
    /// `tr(ad y|n) = 0` for every `y` in the normalizer of n: no element
    /// normalizing n can have n inside its positive part.
    pub normalizer_trace_vanishes: bool,
}

fn normalizes_positively(g: &LieAlgebra, n: &Subspace, x: &[Rat]) -> Result<bool> {
    let adx = g.ad(x)?;
    if !n.is_invariant_under(&adx) {
        return Ok(false);
    }
    match grading_of(g, x) {
        Ok(gr) => Ok(gr.positive.contains_space(n)),
        Err(Error::NotSemisimple { .. } | Error::IrrationalSpectrum { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

/// With `x` given it must normalize n with `n ⊂ g_x^+`. Otherwise `x` comes
/// from the Jacobson-Morozov triple of the first basis vector of `z(n)`;
/// if that x does not normalize n the averaged certificate is returned.
pub fn unipotent_witness(
    g: &LieAlgebra,
    n: &Subalgebra<'_>,
    x: Option<&[Rat]>,
) -> Result<UnipotentWitness> {
    if n.dim() == 0 {
        return Err(Error::ZeroElement);
    }
    if !g.acts_nilpotently(n.space()) {
        return Err(Error::NotNilpotent);
    }
    let normalizer = g.normalizer(n.space());
    let traces = normalizer
        .basis()
        .iter()
        .map(|y| trace_on(g, y, n.space()))
        .collect::<Result<Vec<_>>>()?;
    let normalizer_trace_vanishes = traces.iter().all(Rat::is_zero);
    if let Some(x) = x {
        if !normalizes_positively(g, n.space(), x)? {
            return Err(Error::NoNormalizer(
                "supplied x does not normalize n with n in g_x^+".into(),
            ));
        }
        return Ok(UnipotentWitness {
            x: x.to_vec(),
            gamma: trace_on(g, x, n.space())?,
            n1: n.space().clone(),
            averaged: false,
            triple: None,
            normalizer_trace_vanishes,
        });
    }
    let center = n.center().space().canonical();
    let u = center
        .basis()
        .first()
        .cloned()
        .ok_or_else(|| Error::invariant("nilpotent n has trivial center"))?;
    let triple = jacobson_morozov(g, &u)?;
    if normalizes_positively(g, n.space(), triple.x())? {
        return Ok(UnipotentWitness {
            x: triple.x().to_vec(),
            gamma: trace_on(g, triple.x(), n.space())?,
            n1: n.space().clone(),
            averaged: false,
            triple: Some(triple),
            normalizer_trace_vanishes,
        });
    }
    let report = lem_r_report(g, n, &triple)?;
    if !report.holds() {
        return Err(Error::NoNormalizer(
            "Jacobson-Morozov grading does not contain n in g_x^+ + g_x^0".into(),
        ));
    }
    let n1 = Subspace::span(g.dim(), &[u]);
    Ok(UnipotentWitness {
        x: triple.x().to_vec(),
        gamma: trace_on(g, triple.x(), &n1)?,
        n1,
        averaged: true,
        triple: Some(triple),
        normalizer_trace_vanishes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{coords, diag, e, principal_nilpotent, sl};
    use crate::exact::ints;

    #[test]
    fn sl2_span_e() {
        let g = sl(2);
        let n = Subalgebra::new(&g, vec![ints(&[0, 1, 0])]).unwrap();
        let w = unipotent_witness(&g, &n, None).unwrap();
        assert_eq!(w.x, ints(&[1, 0, 0]));
        assert_eq!(w.gamma, Rat::from_int(2));
        assert!(!w.averaged);
        assert!(!w.normalizer_trace_vanishes);
    }

    #[test]
    fn sl3_flag_nilradical() {
        let g = sl(3);
        let n = Subalgebra::new(&g, vec![e(&g, 0, 1), e(&g, 0, 2)]).unwrap();
        let x = diag(&g, &[2, -1, -1]);
        let w = unipotent_witness(&g, &n, Some(&x)).unwrap();
        assert_eq!(w.gamma, Rat::from_int(6));
        // the grading element of the triple for E12 also works, with rate 3
        let auto = unipotent_witness(&g, &n, None).unwrap();
        assert_eq!(auto.gamma, Rat::from_int(3));
        assert!(matches!(
            unipotent_witness(&g, &n, Some(&diag(&g, &[-1, 1, 0]))),
            Err(Error::NoNormalizer(_))
        ));
    }

    #[test]
    fn sl5_averaged() {
        let g = sl(5);
        let um = principal_nilpotent(5);
        let u = coords(&g, &um);
        let n =
            Subalgebra::new(&g, vec![u.clone(), coords(&g, &um.pow(2).add(&um.pow(3)))]).unwrap();
        let w = unipotent_witness(&g, &n, None).unwrap();
        assert!(w.averaged);
        assert!(w.normalizer_trace_vanishes);
        assert_eq!(w.gamma, Rat::from_int(2));
        assert!(w.n1.same_span(&Subspace::span(24, &[u])));
        assert_eq!(w.x, diag(&g, &[4, 2, 0, -2, -4]));
    }

    #[test]
    fn rate_is_log_derivative_of_det() {
        let g = sl(3);
        let n = Subalgebra::new(&g, vec![e(&g, 0, 1), e(&g, 0, 2)]).unwrap();
        let x = diag(&g, &[2, -1, -1]);
        let w = unipotent_witness(&g, &n, Some(&x)).unwrap();
        let adx = n.space().restrict(&g.ad(&x).unwrap()).unwrap().to_f64();
        for t in [-2.0, -0.5, 0.7] {
            let det = (adx.clone() * t).exp().determinant();
            assert!((det.ln() / t - w.gamma.to_f64()).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_non_nilpotent() {
        let g = sl(2);
        let h = Subalgebra::new(&g, vec![ints(&[1, 0, 0])]).unwrap();
        assert!(matches!(
            unipotent_witness(&g, &h, None),
            Err(Error::NotNilpotent)
        ));
    }
}
