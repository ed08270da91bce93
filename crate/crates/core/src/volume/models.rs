//! Concrete `SL(2,R)`-spaces with two-dimensional charts.
//!
//! Each model exposes the action, the invariant density in its chart and
//! the closest-point distance `min { ‖g - 1‖_F^2 : g z = w }`, which turns
//! ball membership into a one-dimensional (or closed-form) minimization.

use std::f64::consts::PI;

/// Row-major 2x2 matrix.
pub type Mat2 = [[f64; 2]; 2];
pub type Point = [f64; 2];

pub const IDENTITY: Mat2 = [[1.0, 0.0], [0.0, 1.0]];

pub fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

/// Inverse of a determinant-one matrix.
pub fn inv_sl2(a: &Mat2) -> Mat2 {
    [[a[1][1], -a[0][1]], [-a[1][0], a[0][0]]]
}

pub fn det(a: &Mat2) -> f64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

fn dot(a: &Mat2, b: &Mat2) -> f64 {
    a[0][0] * b[0][0] + a[0][1] * b[0][1] + a[1][0] * b[1][0] + a[1][1] * b[1][1]
}

fn trace(a: &Mat2) -> f64 {
    a[0][0] + a[1][1]
}

/// `‖a - 1‖_F^2`.
pub fn dist_sq_identity(a: &Mat2) -> f64 {
    (a[0][0] - 1.0).powi(2) + a[0][1].powi(2) + a[1][0].powi(2) + (a[1][1] - 1.0).powi(2)
}

/// `diag(e^t, e^{-t})`.
pub fn torus(t: f64) -> Mat2 {
    [[t.exp(), 0.0], [0.0, (-t).exp()]]
}

pub fn rotation(phi: f64) -> Mat2 {
    let (s, c) = phi.sin_cos();
    [[c, -s], [s, c]]
}

/// `exp(t (E + F))`.
pub fn boost(t: f64) -> Mat2 {
    [[t.cosh(), t.sinh()], [t.sinh(), t.cosh()]]
}

/// Frobenius-orthonormal basis `H/√2, E, F` of sl(2) as one-parameter
/// subgroups, evaluated at `s`.
pub fn basis_flow(k: usize, s: f64) -> Mat2 {
    match k {
        0 => torus(s / std::f64::consts::SQRT_2),
        1 => [[1.0, s], [0.0, 1.0]],
        2 => [[1.0, 0.0], [s, 1.0]],
        _ => panic!("sl(2) has three basis directions"),
    }
}

/// Golden-section minimization of `f` on `[a, b]`, `iters` steps.
pub fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    fc.min(fd)
}

/// Grid search followed by golden-section refinement around the best node.
/// Stops early once a value `<= stop` is seen.
fn grid_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64, nodes: usize, stop: f64) -> f64 {
    let step = (hi - lo) / (nodes - 1) as f64;
    let mut best = (f64::INFINITY, lo);
    for i in 0..nodes {
        let x = lo + step * i as f64;
        let v = f(x);
        if v <= stop {
            return v;
        }
        if v < best.0 {
            best = (v, x);
        }
    }
    golden_min(&f, best.1 - step, best.1 + step, 40).min(best.0)
}

/// A homogeneous space of `SL(2,R)` in a two-dimensional chart.
pub trait SpaceModel: Sync {
    fn name(&self) -> &'static str;
    /// Chart coordinates of the base point `z0`.
    fn base_point(&self) -> Point;
    /// `a_t z0` for the model's one-parameter curve.
    fn curve(&self, t: f64) -> Point;
    fn act(&self, g: &Mat2, z: Point) -> Point;
    /// Invariant density in chart coordinates; zero outside the chart.
    fn density(&self, w: Point) -> f64;
    /// `min ‖g - 1‖_F^2` over `g` with `g z = w`; infinite if none. May stop
    /// early and return any value `<= stop` once one is found.
    fn min_dist_sq(&self, z: Point, w: Point, stop: f64) -> f64;

    /// `w ∈ B_r z`.
    fn contains(&self, z: Point, w: Point, r: f64) -> bool {
        self.min_dist_sq(z, w, r * r) <= r * r
    }
}

/// `R^2 \ {0}` with the linear action; stabilizer of `(1, 0)` is `N`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sl2ModN;

impl Sl2ModN {
    /// Closed form: the coset `{g : g z = w}` is `g0 + s w (Jz)^T`, and the
    /// distance is a quadratic in `s`.
    pub fn dist_sq(z: Point, w: Point) -> f64 {
        let nz = z[0] * z[0] + z[1] * z[1];
        let nw = w[0] * w[0] + w[1] * w[1];
        if !(nz > 0.0 && nw > 0.0) || !nz.is_finite() || !nw.is_finite() {
            return f64::INFINITY;
        }
        let mz_inv = [[z[0] / nz, z[1] / nz], [-z[1], z[0]]];
        let mw = [[w[0], -w[1] / nw], [w[1], w[0] / nw]];
        let g0 = mul(&mw, &mz_inv);
        let a = [[g0[0][0] - 1.0, g0[0][1]], [g0[1][0], g0[1][1] - 1.0]];
        let b = [[-w[0] * z[1], w[0] * z[0]], [-w[1] * z[1], w[1] * z[0]]];
        let ab = dot(&a, &b);
        (dot(&a, &a) - ab * ab / dot(&b, &b)).max(0.0)
    }
}

impl SpaceModel for Sl2ModN {
    fn name(&self) -> &'static str {
        "sl2-mod-n"
    }
    fn base_point(&self) -> Point {
        [1.0, 0.0]
    }
    fn curve(&self, t: f64) -> Point {
        self.act(&torus(t), self.base_point())
    }
    fn act(&self, g: &Mat2, z: Point) -> Point {
        [
            g[0][0] * z[0] + g[0][1] * z[1],
            g[1][0] * z[0] + g[1][1] * z[1],
        ]
    }
    fn density(&self, _w: Point) -> f64 {
        1.0
    }
    fn min_dist_sq(&self, z: Point, w: Point, _stop: f64) -> f64 {
        Self::dist_sq(z, w)
    }
}

/// Unit-determinant positive matrices `P = [[a, b], [b, (1 + b^2)/a]]`,
/// action `g P g^T`, density `1/a`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Spd2;

impl Spd2 {
    pub fn matrix(z: Point) -> Mat2 {
        let [a, b] = z;
        [[a, b], [b, (1.0 + b * b) / a]]
    }

    fn cholesky(z: Point) -> Mat2 {
        let s = z[0].sqrt();
        [[s, 0.0], [z[1] / s, 1.0 / s]]
    }
}

impl SpaceModel for Spd2 {
    fn name(&self) -> &'static str {
        "spd2"
    }
    fn base_point(&self) -> Point {
        [1.0, 0.0]
    }
    fn curve(&self, t: f64) -> Point {
        self.act(&torus(t), self.base_point())
    }
    fn act(&self, g: &Mat2, z: Point) -> Point {
        let p = Self::matrix(z);
        let gt = [[g[0][0], g[1][0]], [g[0][1], g[1][1]]];
        let q = mul(&mul(g, &p), &gt);
        [q[0][0], q[0][1]]
    }
    fn density(&self, w: Point) -> f64 {
        if w[0] > 0.0 {
            1.0 / w[0]
        } else {
            0.0
        }
    }
    /// `g = q R(φ) p^{-1}`; the distance is a trigonometric polynomial of
    /// degree two in `φ`, minimized numerically.
    fn min_dist_sq(&self, z: Point, w: Point, stop: f64) -> f64 {
        if !(z[0] > 0.0 && w[0] > 0.0) {
            return f64::INFINITY;
        }
        let p_inv = inv_sl2(&Self::cholesky(z));
        let q = Self::cholesky(w);
        let c = mul(&q, &p_inv);
        let s = mul(&mul(&q, &[[0.0, -1.0], [1.0, 0.0]]), &p_inv);
        let (cc, ss, cs, tc, ts) = (dot(&c, &c), dot(&s, &s), dot(&c, &s), trace(&c), trace(&s));
        let f = |phi: f64| {
            let (sn, cn) = phi.sin_cos();
            cn * cn * cc + sn * sn * ss + 2.0 * cn * sn * cs - 2.0 * cn * tc - 2.0 * sn * ts + 2.0
        };
        grid_min(f, -PI, PI, 73, stop)
    }
}

/// Nilpotent orbit of `E` in sl(2): `X = [[h, e], [-h^2/e, -h]]`, `e > 0`,
/// chart `(e, h)`, density `1/(2e)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sl2OrbitCone;

impl Sl2OrbitCone {
    /// `v` with `X = v (Jv)^T`-type factorization, `v = (√e, -h/√e)`.
    pub fn lift(z: Point) -> Point {
        let s = z[0].sqrt();
        [s, -z[1] / s]
    }
}

impl SpaceModel for Sl2OrbitCone {
    fn name(&self) -> &'static str {
        "sl2-orbit-cone"
    }
    fn base_point(&self) -> Point {
        [1.0, 0.0]
    }
    fn curve(&self, t: f64) -> Point {
        self.act(&torus(t), self.base_point())
    }
    fn act(&self, g: &Mat2, z: Point) -> Point {
        let [e, h] = z;
        let x = [[h, e], [-h * h / e, -h]];
        let y = mul(&mul(g, &x), &inv_sl2(g));
        [y[0][1], y[0][0]]
    }
    fn density(&self, w: Point) -> f64 {
        if w[0] > 0.0 {
            0.5 / w[0]
        } else {
            0.0
        }
    }
    fn min_dist_sq(&self, z: Point, w: Point, _stop: f64) -> f64 {
        if !(z[0] > 0.0 && w[0] > 0.0) {
            return f64::INFINITY;
        }
        let vz = Self::lift(z);
        let vw = Self::lift(w);
        Sl2ModN::dist_sq(vz, vw).min(Sl2ModN::dist_sq(vz, [-vw[0], -vw[1]]))
    }
}

/// Orbit of `H` in sl(2): `X = h H + y (E + F) + s (E - F)` with
/// `h^2 + y^2 - s^2 = 1`; chart `(s, θ)` with `h + i y = √(1+s^2) e^{iθ}`;
/// the invariant density is uniform.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sl2OrbitHyperboloid;

impl Sl2OrbitHyperboloid {
    pub fn matrix(z: Point) -> Mat2 {
        let [s, theta] = z;
        let rho = (1.0 + s * s).sqrt();
        let (h, y) = (rho * theta.cos(), rho * theta.sin());
        [[h, y + s], [y - s, -h]]
    }

    fn chart(x: &Mat2) -> Point {
        let h = x[0][0];
        let y = (x[0][1] + x[1][0]) / 2.0;
        let s = (x[0][1] - x[1][0]) / 2.0;
        [s, y.atan2(h)]
    }

    /// `m` with `m H m^{-1} = X`, `det m = 1`.
    fn frame(x: &Mat2) -> Mat2 {
        let col = |m: &Mat2| {
            let c0 = [m[0][0], m[1][0]];
            let c1 = [m[0][1], m[1][1]];
            if c0[0].hypot(c0[1]) >= c1[0].hypot(c1[1]) {
                c0
            } else {
                c1
            }
        };
        let plus = col(&[[1.0 + x[0][0], x[0][1]], [x[1][0], 1.0 + x[1][1]]]);
        let minus = col(&[[1.0 - x[0][0], -x[0][1]], [-x[1][0], 1.0 - x[1][1]]]);
        let d = plus[0] * minus[1] - plus[1] * minus[0];
        [[plus[0], minus[0] / d], [plus[1], minus[1] / d]]
    }
}

impl SpaceModel for Sl2OrbitHyperboloid {
    fn name(&self) -> &'static str {
        "sl2-orbit-hyperboloid"
    }
    fn base_point(&self) -> Point {
        [0.0, 0.0]
    }
    fn curve(&self, t: f64) -> Point {
        self.act(&boost(t), self.base_point())
    }
    fn act(&self, g: &Mat2, z: Point) -> Point {
        let x = Self::matrix(z);
        Self::chart(&mul(&mul(g, &x), &inv_sl2(g)))
    }
    fn density(&self, w: Point) -> f64 {
        if w[1].abs() < PI {
            1.0
        } else {
            0.0
        }
    }
    /// The coset is `λ P + λ^{-1} Q` with `λ ∈ R \ {0}` (stabilizer `±A`);
    /// minimized over `u = ln |λ|` for both signs.
    fn min_dist_sq(&self, z: Point, w: Point, stop: f64) -> f64 {
        let mz_inv = inv_sl2(&Self::frame(&Self::matrix(z)));
        let mw = Self::frame(&Self::matrix(w));
        let p = [
            [mw[0][0] * mz_inv[0][0], mw[0][0] * mz_inv[0][1]],
            [mw[1][0] * mz_inv[0][0], mw[1][0] * mz_inv[0][1]],
        ];
        let q = [
            [mw[0][1] * mz_inv[1][0], mw[0][1] * mz_inv[1][1]],
            [mw[1][1] * mz_inv[1][0], mw[1][1] * mz_inv[1][1]],
        ];
        let (pp, qq, pq, tp, tq) = (dot(&p, &p), dot(&q, &q), dot(&p, &q), trace(&p), trace(&q));
        if !(pp > 0.0 && qq > 0.0) {
            return f64::INFINITY;
        }
        let u0 = 0.25 * (qq / pp).ln();
        let mut best = f64::INFINITY;
        for sign in [1.0, -1.0] {
            let f = |u: f64| {
                let (l, li) = (u.exp(), (-u).exp());
                l * l * pp + li * li * qq + 2.0 * pq - 2.0 * sign * (l * tp + li * tq) + 2.0
            };
            best = best.min(grid_min(f, u0 - 4.0, u0 + 4.0, 81, stop));
            if best <= stop {
                break;
            }
        }
        best
    }
}

/// Model by CLI name.
pub fn model_by_name(name: &str) -> Option<&'static dyn SpaceModel> {
    match name {
        "sl2-mod-n" => Some(&Sl2ModN),
        "spd2" => Some(&Spd2),
        "sl2-orbit-cone" => Some(&Sl2OrbitCone),
        "sl2-orbit-hyperboloid" => Some(&Sl2OrbitHyperboloid),
        _ => None,
    }
}

pub const MODEL_NAMES: [&str; 4] = [
    "sl2-mod-n",
    "spd2",
    "sl2-orbit-cone",
    "sl2-orbit-hyperboloid",
];
