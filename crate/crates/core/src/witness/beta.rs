//! `β(T) = (1 - e^{-ad T}) / ad T` and the chart Jacobian `dΦ_t`.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::DecayWitness;
use crate::error::{Error, Result};
use crate::exact::{DirectSum, Rat, RatMat, Vector};
use crate::lie::LieAlgebra;

/// Series terms below this Frobenius norm end the summation.
pub const SERIES_CUTOFF: f64 = 1e-14;
/// Hard cap on the number of series terms.
pub const SERIES_MAX_TERMS: usize = 60;
/// Term norm past which the series is rejected.
pub const SERIES_GUARD: f64 = 1e6;
/// Samples per random substream in the sandwich.
const BATCH: usize = 256;

#[derive(Clone, Debug, PartialEq)]
pub enum BetaMap {
    /// `ad T` nilpotent: the series is a polynomial.
    Exact(RatMat),
    Numeric(DMatrix<f64>),
}

impl BetaMap {
    pub fn to_f64(&self) -> DMatrix<f64> {
        match self {
            BetaMap::Exact(m) => m.to_f64(),
            BetaMap::Numeric(m) => m.clone(),
        }
    }
}

pub fn beta_map(g: &LieAlgebra, t: &[Rat]) -> Result<BetaMap> {
    let a = g.ad(t)?;
    if a.pow(g.dim() as u32).is_zero() {
        let n = g.dim();
        let mut sum = RatMat::identity(n);
        let mut term = RatMat::identity(n);
        for k in 1..=n {
            // term_k = (-1)^k a^k / (k+1)!
            term = term.mul(&a).scale(&Rat::new(-1, k as i64 + 1));
            if term.is_zero() {
                break;
            }
            sum = sum.add(&term);
        }
        Ok(BetaMap::Exact(sum))
    } else {
        Ok(BetaMap::Numeric(beta_f64(&a.to_f64())?))
    }
}

/// Floating-point series for `β` given the matrix of `ad T`.
pub fn beta_f64(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let mut sum = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..SERIES_MAX_TERMS {
        term = &term * a * (-1.0 / (k as f64 + 1.0));
        let norm = term.norm();
        if norm > SERIES_GUARD {
            return Err(Error::SeriesDivergenceGuard(norm));
        }
        sum += &term;
        if norm < SERIES_CUTOFF {
            break;
        }
    }
    Ok(sum)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sandwich {
    pub t: Vec<f64>,
    /// `sup_Y |det dΦ_t(Y)|` over the sampled points.
    pub sups: Vec<f64>,
    /// `sups[i] / e^{t_i γ}` with the witness's γ.
    pub normalized: Vec<f64>,
    pub ratio_max_min: f64,
}

struct ChartData {
    d: usize,
    ad_basis: Vec<DMatrix<f64>>,
    vbasis: DMatrix<f64>,
    blocks: [usize; 3],
    coeff: DMatrix<f64>,
    adx: DMatrix<f64>,
}

impl ChartData {
    fn new(g: &LieAlgebra, w: &DecayWitness) -> Result<Self> {
        let d = g.dim();
        let ad_basis = (0..d)
            .map(|k| g.ad(&crate::exact::unit_vector(d, k)).map(|m| m.to_f64()))
            .collect::<Result<Vec<_>>>()?;
        let (vb, blocks) = w.v_blocks();
        let vbasis = RatMat::from_columns(d, &vb).to_f64();
        // Coordinates along v (after the h block) of each standard basis vector.
        let split = DirectSum::new(vec![
            w.h.clone(),
            crate::exact::Subspace::new(d, vb.clone())?,
        ])?;
        let hd = w.h.dim();
        let cols: Vec<Vector> = (0..d)
            .map(|j| split.coefficients(&crate::exact::unit_vector(d, j))[hd..].to_vec())
            .collect();
        let coeff = RatMat::from_columns(vb.len(), &cols).to_f64();
        let adx = g.ad(&w.parabolic.x)?.to_f64();
        Ok(ChartData {
            d,
            ad_basis,
            vbasis,
            blocks,
            coeff,
            adx,
        })
    }

    fn ad(&self, y: &DVector<f64>) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.d, self.d);
        for (k, a) in self.ad_basis.iter().enumerate() {
            if y[k] != 0.0 {
                m += a * y[k];
            }
        }
        m
    }

    /// `det dΦ_t(Y)` for `Y` given by its coordinates in the v basis.
    fn det(&self, ad_t_inv: &DMatrix<f64>, coords: &[f64]) -> Result<f64> {
        let [a, b, c] = self.blocks;
        let part = |lo: usize, len: usize| {
            let mut y = DVector::zeros(self.d);
            for i in lo..lo + len {
                y += self.vbasis.column(i) * coords[i];
            }
            y
        };
        let ym = self.ad(&part(0, a));
        let y0 = self.ad(&part(a, b));
        let yp = self.ad(&part(a + b, c));
        let inv_p = (-&yp).exp();
        let inv_0p = &inv_p * (-&y0).exp();
        let m = a + b + c;
        let mut s = DMatrix::zeros(self.d, m);
        let bm = beta_f64(&ym)?;
        let b0 = beta_f64(&y0)?;
        let bp = beta_f64(&yp)?;
        for j in 0..m {
            let xj = self.vbasis.column(j);
            let col = if j < a {
                &inv_0p * (&bm * xj)
            } else if j < a + b {
                &inv_p * (&b0 * xj)
            } else {
                &bp * xj
            };
            s.set_column(j, &col);
        }
        let jac = &self.coeff * ad_t_inv * s;
        Ok(jac.determinant())
    }
}

/// Monte Carlo sup of `|det dΦ_t|` over the box `Q = [-w, w]^{dim v}` in the
/// v basis, for each `t`. The point `Y = 0` is always included.
pub fn phi_jacobian_sandwich(
    g: &LieAlgebra,
    witness: &DecayWitness,
    half_width: f64,
    t_grid: &[f64],
    samples: usize,
    seed: u64,
) -> Result<Sandwich> {
    if t_grid.iter().any(|t| *t > 0.0) {
        return Err(Error::InvalidArgument(
            "t grid must lie in (-inf, 0]".into(),
        ));
    }
    if !(half_width > 0.0) || samples == 0 {
        return Err(Error::InvalidArgument(
            "need half_width > 0 and samples > 0".into(),
        ));
    }
    let chart = ChartData::new(g, witness)?;
    let m = witness.v.dim();
    let det0 = chart.det(&DMatrix::identity(chart.d, chart.d), &vec![0.0; m])?;
    if det0.abs() < f64::EPSILON || (det0 - 1.0).abs() > 1e-9 {
        return Err(Error::SingularChart(det0));
    }
    let batches = samples.div_ceil(BATCH);
    let tasks: Vec<(usize, usize)> = (0..t_grid.len())
        .flat_map(|i| (0..batches).map(move |b| (i, b)))
        .collect();
    let ad_t_inv: Vec<DMatrix<f64>> = t_grid.iter().map(|t| (&chart.adx * -t).exp()).collect();
    let maxima: Vec<Result<f64>> = tasks
        .par_iter()
        .map(|&(i, b)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(((i as u64) << 32) | b as u64);
            let count = BATCH.min(samples - b * BATCH);
            let mut best = if b == 0 {
                chart.det(&ad_t_inv[i], &vec![0.0; m])?.abs()
            } else {
                0.0
            };
            let mut y = vec![0.0; m];
            for _ in 0..count {
                for c in y.iter_mut() {
                    *c = rng.random_range(-half_width..=half_width);
                }
                best = best.max(chart.det(&ad_t_inv[i], &y)?.abs());
            }
            Ok(best)
        })
        .collect();
    let gamma = witness.gamma.to_f64();
    let mut sups = vec![0.0f64; t_grid.len()];
    for ((i, _), r) in tasks.iter().zip(maxima) {
        sups[*i] = sups[*i].max(r?);
    }
    let normalized: Vec<f64> = sups
        .iter()
        .zip(t_grid)
        .map(|(s, t)| s / (t * gamma).exp())
        .collect();
    let max = normalized.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = normalized.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(Sandwich {
        t: t_grid.to_vec(),
        sups,
        normalized,
        ratio_max_min: max / min,
    })
}
