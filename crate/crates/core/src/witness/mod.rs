//! Decay witnesses for non-reductive pairs and growth certificates for
//! reductive ones.

mod beta;
mod bounds;
mod mt;
mod unipotent;

use serde::{Deserialize, Serialize};

pub use beta::{beta_f64, beta_map, phi_jacobian_sandwich, BetaMap, Sandwich};
pub use bounds::{predict_lower_bound, predict_symmetric_exponent, LowerBoundCert};
pub use mt::{check_mt_bounded, mt_report, MtReport, MT_GRID_MIN, MT_TAIL};
pub use unipotent::{unipotent_witness, UnipotentWitness};

use crate::error::{Error, RecursionPayload, Result};
use crate::exact::{DirectSum, Rat, RatMat, Subspace, Vector};
use crate::grading::{grading_of, trace_on, Grading};
use crate::io::ParabolicFile;
use crate::lie::{BilinearForm, LieAlgebra, Subalgebra};
use crate::reductivity::CartanData;

/// Validated parabolic data `p0 = l0 ⊕ n0` with opposite nilradical and a
/// grading element `x ∈ z(l0)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParabolicData {
    pub p0: Subspace,
    pub l0: Subspace,
    pub n0: Subspace,
    pub nbar0: Subspace,
    pub x: Vector,
}

impl ParabolicData {
    pub fn new(
        g: &LieAlgebra,
        p0: Subspace,
        l0: Subspace,
        n0: Subspace,
        nbar0: Subspace,
        x: Vector,
    ) -> Result<Self> {
        let data = ParabolicData {
            p0,
            l0,
            n0,
            nbar0,
            x,
        };
        data.validate(g)?;
        Ok(data)
    }

    pub fn from_file(g: &LieAlgebra, f: &ParabolicFile) -> Result<Self> {
        let d = g.dim();
        let sub = |vs: &[Vector]| Subspace::new(d, vs.to_vec());
        Self::new(
            g,
            sub(&f.p0)?,
            sub(&f.l0)?,
            sub(&f.n0)?,
            sub(&f.nbar0)?,
            f.x.clone(),
        )
    }

    fn validate(&self, g: &LieAlgebra) -> Result<()> {
        let bad = |m: &str| Err(Error::invariant(format!("parabolic data: {m}")));
        let sum = self.l0.sum(&self.n0);
        if !self.l0.is_independent_of(&self.n0) || !sum.same_span(&self.p0) {
            return bad("p0 is not l0 ⊕ n0");
        }
        Subalgebra::from_space(g, self.p0.clone())
            .map_err(|_| Error::invariant("parabolic data: p0 is not a subalgebra"))?;
        let n0s = self.n0.solver();
        for a in self.p0.basis() {
            for b in self.n0.basis() {
                if n0s.coordinates(&g.bracket(a, b)).is_none() {
                    return bad("n0 is not an ideal of p0");
                }
            }
        }
        if !self.l0.contains(&self.x) {
            return bad("x is not in l0");
        }
        for b in self.l0.basis() {
            if g.bracket(&self.x, b).iter().any(|c| !c.is_zero()) {
                return bad("x does not centralize l0");
            }
        }
        if DirectSum::new(vec![self.nbar0.clone(), self.l0.clone(), self.n0.clone()]).is_err() {
            return bad("g is not nbar0 ⊕ l0 ⊕ n0");
        }
        let grading = grading_of(g, &self.x)?;
        if !grading.positive.contains_space(&self.n0) {
            return bad("n0 is not contained in g_x^+");
        }
        if !grading.negative.contains_space(&self.nbar0) {
            return bad("nbar0 is not contained in g_x^-");
        }
        Ok(())
    }

    /// Projection `pr_{l0}` along `nbar0 ⊕ n0`, as a matrix on g.
    pub fn projection_l0(&self) -> RatMat {
        DirectSum::new(vec![self.nbar0.clone(), self.l0.clone(), self.n0.clone()])
            .expect("validated")
            .projection(1)
    }
}

/// Eigenvalue order used by the greedy choice of n1. Only `Descending`
/// produces a valid witness; `Ascending` exists to exercise the checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GreedyOrder {
    Descending,
    Ascending,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecayWitness {
    pub parabolic: ParabolicData,
    pub h: Subspace,
    pub n1: Subspace,
    pub l1: Subspace,
    pub gamma: Rat,
    /// `nbar0 ⊕ l1 ⊕ n1`, complementary to h.
    pub v: Subspace,
    /// Facts used by the decay argument but not verified here.
    pub assumptions: Vec<String>,
}

pub const ESCAPE_ASSUMPTION: &str =
    "a_t z0 leaves every compact set of G/H as |t| grows (not verified computationally)";

impl DecayWitness {
    pub fn grading(&self, g: &LieAlgebra) -> Result<Grading> {
        grading_of(g, &self.parabolic.x)
    }

    /// `g = h ⊕ v` as a splitting.
    pub fn splitting(&self) -> DirectSum {
        DirectSum::new(vec![self.h.clone(), self.v.clone()]).expect("g = h ⊕ v checked")
    }

    /// `π_v`, projection onto v along h, as a matrix on g.
    pub fn projection_v(&self) -> RatMat {
        self.splitting().projection(1)
    }

    /// Basis of v in the order `nbar0, l1, n1` with the split sizes.
    pub fn v_blocks(&self) -> (Vec<Vector>, [usize; 3]) {
        let p = &self.parabolic;
        let mut basis = p.nbar0.basis().to_vec();
        basis.extend(self.l1.basis().iter().cloned());
        basis.extend(self.n1.basis().iter().cloned());
        (basis, [p.nbar0.dim(), self.l1.dim(), self.n1.dim()])
    }
}

/// Inner product on g: `-B(theta ., .)` for the negative-transpose involution
/// when available, else the Killing form.
pub fn default_inner(g: &LieAlgebra) -> BilinearForm {
    CartanData::negative_transpose(g)
        .map(|c| c.inner)
        .unwrap_or_else(|_| g.killing_form())
}

pub fn build_n1(
    g: &LieAlgebra,
    h: &Subalgebra<'_>,
    parabolic: &ParabolicData,
) -> Result<DecayWitness> {
    build_n1_ordered(g, h, parabolic, GreedyOrder::Descending)
}

/// Greedy construction of `n1 ⊂ n0` with `h + n0 = h ⊕ n1`, followed by
/// `l1 = pr_{l0}(h)^⊥ ∩ l0`, `γ` and `v`.
pub fn build_n1_ordered(
    g: &LieAlgebra,
    h: &Subalgebra<'_>,
    parabolic: &ParabolicData,
    order: GreedyOrder,
) -> Result<DecayWitness> {
    let d = g.dim();
    let hs = h.space();
    if !parabolic.p0.contains_space(hs) {
        return Err(Error::invariant("h is not contained in p0"));
    }
    let grading = grading_of(g, &parabolic.x)?;
    let target = hs.sum(&parabolic.n0);
    let mut eigen: Vec<(&Rat, &Subspace)> = grading
        .parts
        .iter()
        .filter(|(l, _)| l.is_positive())
        .collect();
    if order == GreedyOrder::Descending {
        eigen.reverse();
    }
    let mut acc = hs.clone();
    let mut chosen: Vec<Vector> = Vec::new();
    'outer: for (_, space) in eigen {
        let candidates = space.intersection(&parabolic.n0);
        for c in candidates.basis() {
            if acc.contains_space(&target) {
                break 'outer;
            }
            if !acc.contains(c) {
                acc = acc.sum(&Subspace::span(d, std::slice::from_ref(c)));
                chosen.push(c.clone());
            }
        }
    }
    if !acc.contains_space(&target) {
        return Err(Error::invariant("greedy choice did not reach h + n0"));
    }
    let n1 = Subspace::new(d, chosen)?;
    let pr_h = hs.image_under(&parabolic.projection_l0());
    if n1.dim() == parabolic.n0.dim() {
        return Err(Error::GammaNotPositive(Box::new(RecursionPayload {
            reason: "h meets n0 trivially; recurse on (l0, pr_l0(h))".into(),
            ambient: parabolic.l0.clone(),
            sub: pr_h,
        })));
    }
    let inner = default_inner(g);
    let l1 = pr_h
        .orthogonal_complement(&inner.gram)
        .intersection(&parabolic.l0);
    let p0_dim = l1.dim() + hs.dim() + n1.dim();
    if p0_dim != parabolic.p0.dim() || !l1.sum(hs).sum(&n1).same_span(&parabolic.p0) {
        return Err(Error::invariant("p0 is not l1 ⊕ h ⊕ n1"));
    }
    let gamma = trace_on(g, &parabolic.x, &parabolic.n0)? - trace_on(g, &parabolic.x, &n1)?;
    if !gamma.is_positive() {
        return Err(Error::invariant(format!(
            "gamma = {gamma} with n1 proper in n0"
        )));
    }
    let mut vbasis = parabolic.nbar0.basis().to_vec();
    vbasis.extend(l1.basis().iter().cloned());
    vbasis.extend(n1.basis().iter().cloned());
    let v = Subspace::new(d, vbasis)
        .map_err(|_| Error::invariant("nbar0, l1, n1 are not independent"))?;
    if DirectSum::new(vec![hs.clone(), v.clone()]).is_err() {
        return Err(Error::invariant("g is not h ⊕ v"));
    }
    Ok(DecayWitness {
        parabolic: parabolic.clone(),
        h: hs.clone(),
        n1,
        l1,
        gamma,
        v,
        assumptions: vec![ESCAPE_ASSUMPTION.to_string()],
    })
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::catalog::{diag, e, sl};
    use crate::exact::{add_vec, ints};

    #[test]
    fn sl2_borel_witness() {
        let (_, w) = sl2_witness();
        assert!(w.n1.is_zero());
        assert_eq!(w.gamma, Rat::from_int(2));
        assert!(w
            .v
            .same_span(&Subspace::span(3, &[ints(&[0, 0, 1]), ints(&[1, 0, 0])])));
        assert_eq!(w.l1.dim(), 1);
    }

    #[test]
    fn sl3_flag_e12() {
        let g = sl(3);
        let p = sl3_flag(&g);
        let h = Subalgebra::new(&g, vec![e(&g, 0, 1)]).unwrap();
        let w = build_n1(&g, &h, &p).unwrap();
        assert!(w.n1.same_span(&Subspace::span(8, &[e(&g, 0, 2)])));
        assert_eq!(w.gamma, Rat::from_int(3));
        assert_eq!(w.l1.dim(), 4);
    }

    #[test]
    fn n0_inside_h() {
        let g = sl(3);
        let p = sl3_flag(&g);
        let h = Subalgebra::new(&g, vec![e(&g, 0, 1), e(&g, 0, 2)]).unwrap();
        let w = build_n1(&g, &h, &p).unwrap();
        assert!(w.n1.is_zero());
        assert_eq!(w.gamma, Rat::from_int(6));
    }

    #[test]
    fn gamma_not_positive_carries_payload() {
        let g = sl(3);
        let p = sl3_flag(&g);
        let h = Subalgebra::new(&g, vec![diag(&g, &[1, -1, 0])]).unwrap();
        match build_n1(&g, &h, &p) {
            Err(Error::GammaNotPositive(payload)) => {
                assert!(payload.ambient.same_span(&p.l0));
                assert!(payload.sub.same_span(h.space()));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn greedy_order_matters() {
        let g = sl(3);
        let p = sl3_borel(&g);
        let h = Subalgebra::new(&g, vec![add_vec(&e(&g, 0, 1), &e(&g, 0, 2))]).unwrap();
        let down = build_n1(&g, &h, &p).unwrap();
        assert!(down
            .n1
            .same_span(&Subspace::span(8, &[e(&g, 0, 2), e(&g, 1, 2)])));
        assert_eq!(down.gamma, Rat::from_int(1));
        let up = build_n1_ordered(&g, &h, &p, GreedyOrder::Ascending).unwrap();
        assert!(up
            .n1
            .same_span(&Subspace::span(8, &[e(&g, 0, 1), e(&g, 1, 2)])));
    }

    #[test]
    fn parabolic_validation() {
        let g = sl(2);
        let s = |v: &[i64]| Subspace::new(3, vec![ints(v)]).unwrap();
        let p0 = Subspace::new(3, vec![ints(&[1, 0, 0]), ints(&[0, 1, 0])]).unwrap();
        // x = -H puts n0 in the negative part
        let r = ParabolicData::new(
            &g,
            p0.clone(),
            s(&[1, 0, 0]),
            s(&[0, 1, 0]),
            s(&[0, 0, 1]),
            ints(&[-1, 0, 0]),
        );
        assert!(matches!(r, Err(Error::InvariantViolation(_))));
        let r = ParabolicData::new(
            &g,
            p0,
            s(&[1, 0, 0]),
            s(&[0, 0, 1]),
            s(&[0, 1, 0]),
            ints(&[1, 0, 0]),
        );
        assert!(matches!(r, Err(Error::InvariantViolation(_))));
    }

    #[test]
    fn catalog_parabolics_load() {
        for (alg, file) in [
            ("sl2", "sl2-borel-parabolic"),
            ("sl3", "flag-parabolic"),
            ("sl3", "sl3-borel-parabolic"),
        ] {
            let g = crate::io::parse_algebra(crate::catalog::file(alg).unwrap(), alg).unwrap();
            let f =
                crate::io::parse_parabolic(crate::catalog::file(file).unwrap(), file, &g).unwrap();
            ParabolicData::from_file(&g, &f).unwrap();
        }
    }
}
