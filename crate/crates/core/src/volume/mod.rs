//! Monte Carlo volume estimates on concrete space models.

pub mod models;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use models::{
    model_by_name, Mat2, Point, Sl2ModN, Sl2OrbitCone, Sl2OrbitHyperboloid, SpaceModel, Spd2,
    MODEL_NAMES,
};

use crate::error::{Error, Result};
use models::{basis_flow, inv_sl2, mul, IDENTITY};

pub const MIN_SAMPLES: usize = 1000;
pub const DEFAULT_RADIUS: f64 = 0.3;
pub const DEFAULT_SAMPLES: usize = 100_000;
const BATCH: usize = 4096;
/// A hit beyond this fraction of the box half-width doubles the box.
const EDGE: f64 = 0.9;
const MAX_ENLARGE: u64 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub estimate: f64,
    pub stderr: f64,
}

/// Axis-aligned box `center ± half`.
#[derive(Clone, Copy, Debug)]
struct SampleBox {
    center: Point,
    half: Point,
}

impl SampleBox {
    fn area(&self) -> f64 {
        4.0 * self.half[0] * self.half[1]
    }
}

/// Box around `(c B c^{-1}) z` from the linearization at the identity,
/// half-width `2 r |row|` per chart coordinate.
fn linear_box(model: &dyn SpaceModel, z: Point, conj: &Mat2, r: f64) -> Result<SampleBox> {
    let eps = 1e-6;
    let c_inv = inv_sl2(conj);
    let mut rows = [0.0f64; 2];
    for k in 0..3 {
        let flow = |s: f64| mul(&mul(conj, &basis_flow(k, s)), &c_inv);
        let fwd = model.act(&flow(eps), z);
        let bwd = model.act(&flow(-eps), z);
        for (i, row) in rows.iter_mut().enumerate() {
            *row += ((fwd[i] - bwd[i]) / (2.0 * eps)).powi(2);
        }
    }
    let half = [2.0 * r * rows[0].sqrt(), 2.0 * r * rows[1].sqrt()];
    let b = SampleBox { center: z, half };
    let area = b.area();
    if !(z[0].is_finite() && z[1].is_finite()) || !(area.is_normal() && area > 0.0) {
        return Err(Error::EmptyBox(z));
    }
    Ok(b)
}

#[derive(Clone, Copy, Default)]
struct Tally {
    sum: f64,
    sum_sq: f64,
    n: usize,
    edge: f64,
}

impl Tally {
    fn merge(&mut self, o: &Tally) {
        self.sum += o.sum;
        self.sum_sq += o.sum_sq;
        self.n += o.n;
        self.edge = self.edge.max(o.edge);
    }

    fn finish(&self, area: f64) -> Estimate {
        let n = self.n as f64;
        let mean = self.sum / n;
        let var = ((self.sum_sq / n - mean * mean) * n / (n - 1.0)).max(0.0);
        Estimate {
            estimate: area * mean,
            stderr: area * (var / n).sqrt(),
        }
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn draw(rng: &mut ChaCha8Rng, b: &SampleBox) -> Point {
    [
        b.center[0] + rng.random_range(-b.half[0]..=b.half[0]),
        b.center[1] + rng.random_range(-b.half[1]..=b.half[1]),
    ]
}

/// Estimate of `μ((c B_r c^{-1}) z)`. Batches run in parallel; each has its
/// own ChaCha stream `(point << 32) | (attempt << 24) | batch` and the
/// tallies are merged in batch order.
fn estimate_in(
    model: &dyn SpaceModel,
    z: Point,
    conj: &Mat2,
    r: f64,
    samples: usize,
    seed: u64,
    point: u64,
) -> Result<Estimate> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "radius must be positive, got {r}"
        )));
    }
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_SAMPLES} samples, got {samples}"
        )));
    }
    let c_inv = inv_sl2(conj);
    let base = model.act(&c_inv, z);
    let mut b = linear_box(model, z, conj, r)?;
    let batches = samples.div_ceil(BATCH);
    for attempt in 0..=MAX_ENLARGE {
        let tallies: Vec<Tally> = (0..batches)
            .into_par_iter()
            .map(|i| {
                let mut rng = rng_for(seed, (point << 32) | (attempt << 24) | i as u64);
                let mut t = Tally::default();
                for _ in 0..BATCH.min(samples - i * BATCH) {
                    let w = draw(&mut rng, &b);
                    t.n += 1;
                    let dens = model.density(w);
                    if dens > 0.0 && model.contains(base, model.act(&c_inv, w), r) {
                        t.sum += dens;
                        t.sum_sq += dens * dens;
                        let off = ((w[0] - b.center[0]) / b.half[0])
                            .abs()
                            .max(((w[1] - b.center[1]) / b.half[1]).abs());
                        t.edge = t.edge.max(off);
                    }
                }
                t
            })
            .collect();
        let mut total = Tally::default();
        for t in &tallies {
            total.merge(t);
        }
        if total.edge <= EDGE || attempt == MAX_ENLARGE {
            return Ok(total.finish(b.area()));
        }
        b.half = [2.0 * b.half[0], 2.0 * b.half[1]];
    }
    unreachable!("loop returns on the last attempt")
}

/// `v_B(z) = μ(B_r z)` by hit-or-miss sampling.
pub fn estimate_volume(
    model: &dyn SpaceModel,
    z: Point,
    radius: f64,
    samples: usize,
    seed: u64,
) -> Result<Estimate> {
    estimate_in(model, z, &IDENTITY, radius, samples, seed, 0)
}

/// `μ(g B_r z)`, sampled around `g z` with membership pulled back by `g`.
/// Equal to [`estimate_volume`] in expectation by invariance of μ.
pub fn estimate_translated_volume(
    model: &dyn SpaceModel,
    g: &Mat2,
    z: Point,
    radius: f64,
    samples: usize,
    seed: u64,
) -> Result<Estimate> {
    estimate_in(model, model.act(g, z), g, radius, samples, seed, 0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    /// Twice the standard error.
    pub slope_half_width: f64,
    pub intercept_half_width: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeSeries {
    pub space: String,
    pub radius: f64,
    pub t: Vec<f64>,
    pub estimates: Vec<f64>,
    pub stderrs: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub fit: Option<Fit>,
}

/// Estimates along the model's curve; grid point `i` uses substream `i`.
pub fn volume_along_curve(
    model: &dyn SpaceModel,
    t_grid: &[f64],
    radius: f64,
    samples: usize,
    seed: u64,
) -> Result<VolumeSeries> {
    let mut estimates = Vec::with_capacity(t_grid.len());
    let mut stderrs = Vec::with_capacity(t_grid.len());
    for (i, t) in t_grid.iter().enumerate() {
        let e = estimate_in(
            model,
            model.curve(*t),
            &IDENTITY,
            radius,
            samples,
            seed,
            i as u64,
        )?;
        estimates.push(e.estimate);
        stderrs.push(e.stderr);
    }
    let mut series = VolumeSeries {
        space: model.name().to_string(),
        radius,
        t: t_grid.to_vec(),
        estimates,
        stderrs,
        samples,
        seed,
        fit: None,
    };
    series.fit = ols(&series).ok();
    Ok(series)
}

fn ols(series: &VolumeSeries) -> Result<Fit> {
    let pts: Vec<(f64, f64)> = series
        .t
        .iter()
        .zip(&series.estimates)
        .filter(|(_, v)| **v > 0.0)
        .map(|(t, v)| (*t, v.ln()))
        .collect();
    if pts.len() < 4 {
        return Err(Error::TooFewPoints {
            needed: 4,
            got: pts.len(),
        });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let s2 = ssr / (n - 2.0);
    Ok(Fit {
        slope,
        intercept,
        slope_half_width: 2.0 * (s2 / sxx).sqrt(),
        intercept_half_width: 2.0 * (s2 * (1.0 / n + mx * mx / sxx)).sqrt(),
        points: pts.len(),
    })
}

/// OLS slope of `log v` against `t` and twice its standard error.
pub fn fit_log_slope(series: &VolumeSeries) -> Result<(f64, f64)> {
    let f = ols(series)?;
    Ok((f.slope, f.slope_half_width))
}

/// `t,estimate,stderr,samples,seed`, floats with 17 significant digits.
pub fn series_csv(series: &VolumeSeries) -> String {
    let mut out = String::from("t,estimate,stderr,samples,seed\n");
    for i in 0..series.t.len() {
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{},{}\n",
            series.t[i], series.estimates[i], series.stderrs[i], series.samples, series.seed
        ));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiPartial {
    pub p: f64,
    /// `‖Σ_{k ≤ K'} k χ_k‖_p` for `K' = 1..=K`.
    pub norms: Vec<f64>,
    /// `‖χ_k‖_p` for `k = 1..=K`.
    pub term_norms: Vec<f64>,
    /// Largest value of the partial sum at the points `a_{-k} z0`.
    pub sup_value: f64,
    /// `K ‖χ_K‖_p / ((K - 1) ‖χ_{K-1}‖_p)`.
    pub tail_ratio: f64,
    /// `max_k ‖χ_k‖_p e^{γ k / p}`.
    pub measured_c: f64,
    /// `c Σ_{k ≤ K} k e^{-γ k / p}`.
    pub geometric_bound: f64,
}

/// Partial sums of `χ = Σ k χ_k`, `χ_k` the indicator of `B_r a_{-k} z0`.
///
/// Each `k` gets its own box and `samples` draws; a point lying in `m`
/// boxes is weighted by `1/m`, so the boxes may overlap.
pub fn chi_partial(
    model: &dyn SpaceModel,
    k_max: usize,
    radius: f64,
    p: f64,
    gamma: f64,
    samples: usize,
    seed: u64,
) -> Result<ChiPartial> {
    if k_max < 3 {
        return Err(Error::InvalidArgument(format!("need K >= 3, got {k_max}")));
    }
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!("need p >= 1, got {p}")));
    }
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_SAMPLES} samples, got {samples}"
        )));
    }
    let centers: Vec<Point> = (1..=k_max).map(|k| model.curve(-(k as f64))).collect();
    let boxes = centers
        .iter()
        .map(|z| {
            let mut b = linear_box(model, *z, &IDENTITY, radius)?;
            // one fixed enlargement keeps the patch well inside
            b.half = [1.5 * b.half[0], 1.5 * b.half[1]];
            Ok(b)
        })
        .collect::<Result<Vec<_>>>()?;
    let inside = |b: &SampleBox, w: Point| {
        (w[0] - b.center[0]).abs() <= b.half[0] && (w[1] - b.center[1]).abs() <= b.half[1]
    };
    // per box: integrals of each partial sum, and of the box's own indicator
    let per_box: Vec<(Vec<f64>, f64)> = boxes
        .par_iter()
        .enumerate()
        .map(|(bi, b)| {
            let mut rng = rng_for(seed, (1u64 << 40) | bi as u64);
            let mut partial = vec![0.0; k_max];
            let mut own = 0.0;
            for _ in 0..samples {
                let w = draw(&mut rng, b);
                let dens = model.density(w);
                if dens <= 0.0 {
                    continue;
                }
                let m = boxes.iter().filter(|o| inside(o, w)).count() as f64;
                let mut acc = 0.0;
                for (j, (c, o)) in centers.iter().zip(&boxes).enumerate() {
                    if inside(o, w) && model.contains(*c, w, radius) {
                        acc += (j + 1) as f64;
                        if j == bi {
                            own += dens;
                        }
                    }
                    partial[j] += acc.powf(p) * dens / m;
                }
            }
            let scale = b.area() / samples as f64;
            (partial.iter().map(|v| v * scale).collect(), own * scale)
        })
        .collect();
    let mut integrals = vec![0.0; k_max];
    for (partial, _) in &per_box {
        for (acc, v) in integrals.iter_mut().zip(partial) {
            *acc += v;
        }
    }
    let norms: Vec<f64> = integrals.iter().map(|v| v.powf(1.0 / p)).collect();
    let term_norms: Vec<f64> = per_box.iter().map(|(_, own)| own.powf(1.0 / p)).collect();
    let sup_value = centers
        .iter()
        .map(|w| {
            centers
                .iter()
                .enumerate()
                .filter(|(_, c)| model.contains(**c, *w, radius))
                .map(|(j, _)| (j + 1) as f64)
                .sum::<f64>()
        })
        .fold(0.0, f64::max);
    let k = k_max as f64;
    let tail_ratio = k * term_norms[k_max - 1] / ((k - 1.0) * term_norms[k_max - 2]);
    let measured_c = term_norms
        .iter()
        .enumerate()
        .map(|(j, n)| n * (gamma * (j + 1) as f64 / p).exp())
        .fold(0.0, f64::max);
    let geometric_bound = measured_c
        * (1..=k_max)
            .map(|j| j as f64 * (-gamma * j as f64 / p).exp())
            .sum::<f64>();
    Ok(ChiPartial {
        p,
        norms,
        term_norms,
        sup_value,
        tail_ratio,
        measured_c,
        geometric_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::models::{rotation, torus};
    use super::*;

    fn grid(a: f64, b: f64, step: f64) -> Vec<f64> {
        let n = ((b - a) / step).round() as usize;
        (0..=n).map(|i| a + step * i as f64).collect()
    }

    fn within(a: Estimate, b: Estimate, k: f64) -> bool {
        (a.estimate - b.estimate).abs() <= k * (a.stderr.hypot(b.stderr))
    }

    #[test]
    fn sl2_mod_n_reference_and_scaling() {
        let e1 = estimate_volume(&Sl2ModN, [1.0, 0.0], 0.3, 100_000, 42).unwrap();
        let dense = estimate_volume(&Sl2ModN, [1.0, 0.0], 0.3, 2_000_000, 4242).unwrap();
        assert!(within(e1, dense, 3.0), "{e1:?} vs {dense:?}");
        assert!(e1.stderr / e1.estimate < 0.02);
        let small = estimate_volume(&Sl2ModN, [(-2f64).exp(), 0.0], 0.3, 100_000, 42).unwrap();
        let ratio = small.estimate / e1.estimate;
        assert!((ratio / (-4f64).exp() - 1.0).abs() < 0.15, "{ratio}");
    }

    #[test]
    fn empty_box_far_from_float_range() {
        assert!(matches!(
            estimate_volume(&Sl2ModN, [1e-200, 0.0], 0.3, 1000, 1),
            Err(Error::EmptyBox(_))
        ));
        assert!(matches!(
            estimate_volume(&Sl2ModN, [1.0, 0.0], 0.3, 999, 1),
            Err(Error::InvalidArgument(_))
        ));
        assert!(estimate_volume(&Sl2ModN, [1.0, 0.0], 0.0, 1000, 1).is_err());
    }

    #[test]
    fn sl2_mod_n_slope() {
        let s = volume_along_curve(&Sl2ModN, &grid(-4.0, 0.0, 0.5), 0.3, 100_000, 42).unwrap();
        let (slope, hw) = fit_log_slope(&s).unwrap();
        assert!((slope - 2.0).abs() <= 0.2, "{slope} ± {hw}");
        assert!(s.estimates.iter().all(|v| *v >= 0.0));
        assert!(s.stderrs.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn spd2_growth() {
        let s = volume_along_curve(&Spd2, &grid(0.0, 4.0, 0.5), 0.3, 100_000, 42).unwrap();
        let (slope, _) = fit_log_slope(&s).unwrap();
        assert!((slope - 2.0).abs() <= 0.2, "{slope}");
        let min = s.estimates.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(min >= 0.5 * s.estimates[0]);
    }

    #[test]
    fn cone_slope() {
        let s = volume_along_curve(&Sl2OrbitCone, &grid(-3.0, 0.0, 0.5), 0.3, 50_000, 5).unwrap();
        let (slope, _) = fit_log_slope(&s).unwrap();
        assert!((slope - 2.0).abs() <= 0.3, "{slope}");
    }

    #[test]
    fn hyperboloid_growth_is_bounded_below() {
        let s =
            volume_along_curve(&Sl2OrbitHyperboloid, &grid(0.0, 2.0, 0.5), 0.3, 20_000, 5).unwrap();
        assert!(s.estimates.iter().all(|v| *v > 0.5 * s.estimates[0]));
        let (slope, _) = fit_log_slope(&s).unwrap();
        assert!(slope >= -0.2, "{slope}");
    }

    #[test]
    fn rotation_invariance() {
        // rotations fix the Frobenius ball under conjugation
        for m in MODEL_NAMES.map(|n| model_by_name(n).unwrap()) {
            let z = m.curve(0.3);
            let a = estimate_volume(m, z, 0.3, 50_000, 11).unwrap();
            let b = estimate_volume(m, m.act(&rotation(0.7), z), 0.3, 50_000, 12).unwrap();
            assert!(within(a, b, 3.0), "{}: {a:?} vs {b:?}", m.name());
        }
    }

    #[test]
    fn translated_set_has_same_measure() {
        let g = mul(&mul(&rotation(0.4), &torus(0.6)), &basis_flow(1, -0.8));
        for m in MODEL_NAMES.map(|n| model_by_name(n).unwrap()) {
            let z = m.base_point();
            let a = estimate_volume(m, z, 0.3, 50_000, 21).unwrap();
            let b = estimate_translated_volume(m, &g, z, 0.3, 50_000, 22).unwrap();
            assert!(within(a, b, 3.0), "{}: {a:?} vs {b:?}", m.name());
        }
    }

    #[test]
    fn ball_monotone_and_comparable() {
        for m in MODEL_NAMES.map(|n| model_by_name(n).unwrap()) {
            let mut ratios = Vec::new();
            for t in [0.0, 0.5, 1.0] {
                let z = m.curve(if m.name() == "sl2-mod-n" || m.name() == "sl2-orbit-cone" {
                    -t
                } else {
                    t
                });
                let v: Vec<Estimate> = [0.2, 0.3, 0.4]
                    .iter()
                    .map(|r| estimate_volume(m, z, *r, 20_000, 3).unwrap())
                    .collect();
                for w in v.windows(2) {
                    assert!(w[0].estimate <= w[1].estimate + 3.0 * w[0].stderr.hypot(w[1].stderr));
                }
                ratios.push(v[2].estimate / v[0].estimate);
            }
            let (lo, hi) = ratios
                .iter()
                .fold((f64::INFINITY, 0.0f64), |(a, b), r| (a.min(*r), b.max(*r)));
            assert!(hi / lo < 2.0, "{}: {ratios:?}", m.name());
        }
    }

    #[test]
    fn determinism_across_pools() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| volume_along_curve(&Spd2, &[0.0, 1.0, 2.0], 0.3, 10_000, 9).unwrap())
        };
        let a = run(1);
        let b = run(4);
        assert_eq!(series_csv(&a), series_csv(&b));
        assert_eq!(a, b);
    }

    fn synthetic(t: &[f64], f: impl Fn(f64) -> f64) -> VolumeSeries {
        VolumeSeries {
            space: "synthetic".into(),
            radius: 0.0,
            t: t.to_vec(),
            estimates: t.iter().map(|t| f(*t)).collect(),
            stderrs: vec![0.0; t.len()],
            samples: 0,
            seed: 0,
            fit: None,
        }
    }

    #[test]
    fn fit_examples() {
        let t = grid(-4.0, 0.0, 0.5);
        let (s, hw) = fit_log_slope(&synthetic(&t, |t| (2.0 * t).exp())).unwrap();
        assert!((s - 2.0).abs() < 1e-12 && hw < 1e-9);
        let mut rng = rng_for(3, 0);
        let noise: Vec<f64> = t.iter().map(|_| rng.random_range(-1.0..1.0)).collect();
        let noisy = synthetic(&t, |x| {
            let i = ((x + 4.0) / 0.5).round() as usize;
            7.0 * (-3.0 * x).exp() * (1.0 + 0.01 * noise[i])
        });
        let (s, _) = fit_log_slope(&noisy).unwrap();
        assert!((s + 3.0).abs() < 0.05);
        let (s, _) = fit_log_slope(&synthetic(&t, |_| 5.0)).unwrap();
        assert!(s.abs() < 1e-12);
        let few = synthetic(&[0.0, 1.0, 2.0, 3.0], |t| if t > 0.5 { 1.0 } else { 0.0 });
        assert!(matches!(
            fit_log_slope(&few),
            Err(Error::TooFewPoints { needed: 4, got: 3 })
        ));
    }

    #[test]
    fn csv_format() {
        let s = synthetic(&[0.0, -0.5], |t| (2.0 * t).exp());
        let csv = series_csv(&s);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,estimate,stderr,samples,seed");
        assert_eq!(
            lines[1],
            "0.0000000000000000e0,1.0000000000000000e0,0.0000000000000000e0,0,0"
        );
        let back: f64 = lines[2].split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(back, (-1f64).exp());
    }

    #[test]
    fn chi_partial_sums() {
        let c = chi_partial(&Sl2ModN, 10, 0.3, 2.0, 2.0, 20_000, 8).unwrap();
        assert!(
            (c.tail_ratio - (-1f64).exp()).abs() <= 0.15,
            "{}",
            c.tail_ratio
        );
        assert!(c.sup_value >= 10.0);
        assert!(c.norms.windows(2).all(|w| w[0] <= w[1]));
        assert!((c.norms[9] - c.norms[5]) / c.norms[5] < 0.05);
        assert!(c.norms[9] <= c.geometric_bound * (1.0 + 1e-12));
        assert!(chi_partial(&Sl2ModN, 2, 0.3, 2.0, 2.0, 20_000, 8).is_err());
        assert!(chi_partial(&Sl2ModN, 5, 0.3, 0.5, 2.0, 20_000, 8).is_err());
    }
}
