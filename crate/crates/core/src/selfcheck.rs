//! Randomized consistency checks of the exact layer on sl(3) and sl(4).
//!
//! An [`Instance`] fixes a nilpotent and a semisimple element, both
//! conjugated by a unimodular matrix, and a change of basis of the whole
//! algebra; [`check_instance`] verifies Jacobi, Killing-form invariance,
//! minimal-polynomial annihilation, grading compatibility and
//! basis-independence of the verdicts on it.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use crate::catalog::sl;
use crate::exact::{minimal_polynomial, Rat, RatMat, Vector};
use crate::grading::grading_of;
use crate::lie::{LieAlgebra, Subalgebra};
use crate::reductivity::vai_verdict;

#[derive(Clone, Debug)]
pub struct Instance {
    /// 3 or 4.
    pub n: usize,
    /// Strictly upper triangular entries, row by row; not all zero.
    pub nilpotent: Vec<i64>,
    /// First `n - 1` diagonal entries; the last makes the trace vanish.
    pub diagonal: Vec<i64>,
    /// Conjugator `L U`, both unit triangular.
    pub lower: Vec<i64>,
    pub upper: Vec<i64>,
    /// Column operations `col[t] += c col[s]`, applied after `permutation`.
    pub shears: Vec<(usize, usize, i64)>,
    pub permutation: Vec<usize>,
    /// Final column scalings, nonzero.
    pub scales: Vec<i64>,
    /// Three vectors of length `n^2 - 1` for the triple identities.
    pub probe: Vec<i64>,
}

impl Instance {
    pub fn random(rng: &mut impl Rng) -> Self {
        let n = if rng.random_bool(0.5) { 3 } else { 4 };
        let d = n * n - 1;
        let tri = n * (n - 1) / 2;
        let mut ints = |len: usize, lo: i64, hi: i64| -> Vec<i64> {
            (0..len).map(|_| rng.random_range(lo..=hi)).collect()
        };
        let mut nilpotent = ints(tri, -3, 3);
        if nilpotent.iter().all(|c| *c == 0) {
            nilpotent[0] = 1;
        }
        let diagonal = ints(n - 1, -3, 3);
        let lower = ints(tri, -2, 2);
        let upper = ints(tri, -2, 2);
        let probe = ints(3 * d, -3, 3);
        let count = rng.random_range(4..10);
        let shears = (0..count)
            .map(|_| {
                (
                    rng.random_range(0..d),
                    rng.random_range(0..d),
                    [-2, -1, 1, 2][rng.random_range(0..4)],
                )
            })
            .collect();
        let mut permutation: Vec<usize> = (0..d).collect();
        permutation.shuffle(rng);
        let scales = (0..d)
            .map(|_| [1, -1, 2, 3][rng.random_range(0..4)])
            .collect();
        Instance {
            n,
            nilpotent,
            diagonal,
            lower,
            upper,
            shears,
            permutation,
            scales,
            probe,
        }
    }
}

fn triangular(n: usize, entries: &[i64], upper: bool, unit: bool) -> RatMat {
    let mut rows = vec![vec![Rat::zero(); n]; n];
    let mut it = entries.iter();
    for i in 0..n {
        for j in (i + 1)..n {
            let (r, c) = if upper { (i, j) } else { (j, i) };
            rows[r][c] = Rat::from_int(*it.next().expect("enough entries"));
        }
        if unit {
            rows[i][i] = Rat::one();
        }
    }
    RatMat::from_rows(rows).expect("square")
}

fn ints(v: &[i64]) -> Vector {
    v.iter().map(|c| Rat::from_int(*c)).collect()
}

fn change_of_basis(d: usize, inst: &Instance) -> RatMat {
    let mut cols: Vec<Vector> = inst
        .permutation
        .iter()
        .map(|&i| {
            (0..d)
                .map(|k| if k == i { Rat::one() } else { Rat::zero() })
                .collect()
        })
        .collect();
    for &(t, s, c) in &inst.shears {
        if t != s {
            let c = Rat::from_int(c);
            let add: Vec<Rat> = cols[s].iter().map(|v| v * &c).collect();
            cols[t] = cols[t].iter().zip(&add).map(|(a, b)| a + b).collect();
        }
    }
    for (col, k) in cols.iter_mut().zip(&inst.scales) {
        let k = Rat::from_int(*k);
        *col = col.iter().map(|v| v * &k).collect();
    }
    RatMat::from_columns(d, &cols)
}

/// Same algebra in the basis given by the columns of `c`.
fn rebase(g: &LieAlgebra, c: &RatMat, c_inv: &RatMat) -> Result<LieAlgebra, String> {
    let d = g.dim();
    let cols: Vec<Vector> = (0..d).map(|j| c.column(j)).collect();
    let sc = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| c_inv.mul_vec(&g.bracket(&cols[i], &cols[j])))
                .collect()
        })
        .collect();
    LieAlgebra::from_structure_constants("rebased", sc)
        .map_err(|e| format!("Jacobi validation rejected a change of basis: {e}"))
}

fn ensure(ok: bool, what: &str) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.to_string())
    }
}

pub fn check_instance(inst: &Instance) -> Result<(), String> {
    let n = inst.n;
    let g = sl(n);
    let d = g.dim();
    let err = |e: crate::Error| e.to_string();
    let p = triangular(n, &inst.lower, false, true).mul(&triangular(n, &inst.upper, true, true));
    let p_inv = p.inverse().ok_or("unit triangular product is singular")?;
    let nil = p
        .mul(&triangular(n, &inst.nilpotent, true, false))
        .mul(&p_inv);
    let mut diag = ints(&inst.diagonal);
    diag.push(-diag.iter().cloned().sum::<Rat>());
    let semi = p.mul(&RatMat::diagonal(&diag)).mul(&p_inv);
    let u = g
        .coordinates_of_matrix(&nil)
        .ok_or("nilpotent is not in sl(n)")?;
    let x = g
        .coordinates_of_matrix(&semi)
        .ok_or("semisimple is not in sl(n)")?;

    let c = change_of_basis(d, inst);
    let c_inv = c.inverse().ok_or("change of basis is singular")?;
    let g2 = rebase(&g, &c, &c_inv)?;
    let u2 = c_inv.mul_vec(&u);
    let x2 = c_inv.mul_vec(&x);

    let probe: Vec<Vector> = inst.probe.chunks(d).map(ints).collect();
    let (a, b, e) = (&probe[0], &probe[1], &probe[2]);
    let jac = |p: &Vector, q: &Vector, r: &Vector| g2.bracket(p, &g2.bracket(q, r));
    let (j1, j2, j3) = (jac(a, b, e), jac(b, e, a), jac(e, a, b));
    ensure(
        (0..d).all(|k| (&(&j1[k] + &j2[k]) + &j3[k]).is_zero()),
        "Jacobi identity on a random triple",
    )?;

    let k2 = g2.killing_form();
    ensure(k2.is_invariant(&g2), "Killing form invariance")?;
    ensure(
        k2.gram == c.transpose().mul(&g.killing_form().gram).mul(&c),
        "Killing form transforms as C^T K C",
    )?;
    ensure(
        k2.eval(&g2.bracket(a, b), e) == -k2.eval(b, &g2.bracket(a, e)),
        "Killing form invariance on a random triple",
    )?;

    for y in [&u2, &x2] {
        let ad = g2.ad(y).map_err(err)?;
        let mp = minimal_polynomial(&ad).map_err(err)?;
        ensure(
            mp.eval_matrix(&ad).is_zero(),
            "minimal polynomial annihilates",
        )?;
    }
    let mpu = minimal_polynomial(&g2.ad(&u2).map_err(err)?).map_err(err)?;
    let deg = mpu.degree().ok_or("zero minimal polynomial")?;
    ensure(
        mpu.coeffs()[..deg].iter().all(Rat::is_zero),
        "minimal polynomial of ad u is a power of t",
    )?;
    ensure(g2.is_ad_nilpotent(&u2).map_err(err)?, "u is ad-nilpotent")?;

    let gr = grading_of(&g2, &x2).map_err(err)?;
    ensure(
        gr.parts.values().map(|s| s.dim()).sum::<usize>() == d,
        "eigenspaces span g",
    )?;
    for (la, sa) in &gr.parts {
        for (lb, sb) in &gr.parts {
            let target = gr.parts.get(&(la + lb)).map(|t| t.solver());
            for va in sa.basis() {
                let ad = g2.ad(va).map_err(err)?;
                for vb in sb.basis() {
                    let br = ad.mul_vec(vb);
                    let ok = match &target {
                        Some(t) => t.coordinates(&br).is_some(),
                        None => br.iter().all(Rat::is_zero),
                    };
                    ensure(ok, "grading is bracket-compatible")?;
                }
            }
        }
    }

    for (h, h2) in [(&u, &u2), (&x, &x2)] {
        if h.iter().all(Rat::is_zero) {
            continue;
        }
        let v1 =
            vai_verdict(&g, &Subalgebra::new(&g, vec![h.clone()]).map_err(err)?).map_err(err)?;
        let v2 =
            vai_verdict(&g2, &Subalgebra::new(&g2, vec![h2.clone()]).map_err(err)?).map_err(err)?;
        ensure(
            v1.vai == v2.vai
                && v1.unimodular == v2.unimodular
                && v1.reductive_in_g == v2.reductive_in_g,
            "verdict is basis-independent",
        )?;
    }
    Ok(())
}

/// Checks `count` instances drawn from one seeded stream; on failure returns
/// the index, the instance and the failed property.
pub fn check_random(count: usize, seed: u64) -> Result<(), (usize, Box<Instance>, String)> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for i in 0..count {
        let inst = Instance::random(&mut rng);
        check_instance(&inst).map_err(|e| (i, Box::new(inst.clone()), e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a_few_seeded_instances() {
        check_random(5, 0).unwrap();
    }

    #[test]
    fn change_of_basis_is_invertible() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let inst = Instance::random(&mut rng);
        let d = inst.n * inst.n - 1;
        assert!(change_of_basis(d, &inst).inverse().is_some());
    }
}
