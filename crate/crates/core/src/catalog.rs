//! Bundled algebras, subalgebras, Cartan involutions and parabolic data.
//!
//! Matrix algebras are built in code; the JSON fixtures under `catalog/` are
//! the same objects in the on-disk format and are embedded here so the CLI
//! can refer to them as `catalog:NAME`.

use crate::exact::{Rat, RatMat, Vector};
use crate::lie::LieAlgebra;

/// `E_ij` in `n x n` matrices (zero-based indices).
pub fn elementary(n: usize, i: usize, j: usize) -> RatMat {
    let mut m = RatMat::zeros(n, n);
    m[(i, j)] = Rat::one();
    m
}

/// Basis of sl(n): `H_i = E_ii - E_{i+1,i+1}` first, then the `E_ij`
/// (`i != j`) in lexicographic order. Putting the Cartan first makes the
/// Jacobson-Morozov solver land on diagonal neutral elements.
pub fn sl_basis(n: usize) -> Vec<RatMat> {
    let mut basis = Vec::with_capacity(n * n - 1);
    for i in 0..n - 1 {
        basis.push(elementary(n, i, i).sub(&elementary(n, i + 1, i + 1)));
    }
    for i in 0..n {
        for j in 0..n {
            if i != j {
                basis.push(elementary(n, i, j));
            }
        }
    }
    basis
}

pub fn sl(n: usize) -> LieAlgebra {
    LieAlgebra::from_matrices(format!("sl{n}"), sl_basis(n)).expect("sl(n) is a Lie algebra")
}

/// gl(n) with the identity prepended to the sl(n) basis.
pub fn gl(n: usize) -> LieAlgebra {
    let mut basis = vec![RatMat::identity(n)];
    basis.extend(sl_basis(n));
    LieAlgebra::from_matrices(format!("gl{n}"), basis).expect("gl(n) is a Lie algebra")
}

/// so(3) by structure constants `[e_i, e_j] = eps_ijk e_k`.
pub fn so3_abstract() -> LieAlgebra {
    let mut sc = vec![vec![vec![Rat::zero(); 3]; 3]; 3];
    for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        sc[i][j][k] = Rat::one();
        sc[j][i][k] = Rat::from_int(-1);
    }
    LieAlgebra::from_structure_constants("so3", sc).expect("so(3) is a Lie algebra")
}

/// Coordinates of a matrix in the realization of `g`; panics if outside.
pub fn coords(g: &LieAlgebra, m: &RatMat) -> Vector {
    g.coordinates_of_matrix(m)
        .unwrap_or_else(|| panic!("matrix is not in {}", g.name()))
}

/// Coordinates of `diag(entries)`.
pub fn diag(g: &LieAlgebra, entries: &[i64]) -> Vector {
    let d: Vec<Rat> = entries.iter().map(|&x| Rat::from_int(x)).collect();
    coords(g, &RatMat::diagonal(&d))
}

/// Coordinates of `E_ij` (zero-based) in sl(n)/gl(n).
pub fn e(g: &LieAlgebra, i: usize, j: usize) -> Vector {
    let n = g.realization().expect("matrix algebra")[0].rows();
    coords(g, &elementary(n, i, j))
}

/// Principal nilpotent `sum_i E_{i,i+1}` as a matrix.
pub fn principal_nilpotent(n: usize) -> RatMat {
    let mut m = RatMat::zeros(n, n);
    for i in 0..n - 1 {
        m[(i, i + 1)] = Rat::one();
    }
    m
}

/// `X -> -X^T` written in the basis of a matrix realization: column `j` is
/// the image of `e_j`.
pub fn negative_transpose(g: &LieAlgebra) -> Option<RatMat> {
    let basis = g.realization()?;
    let cols: Option<Vec<Vector>> = basis
        .iter()
        .map(|b| g.coordinates_of_matrix(&b.transpose().scale(&Rat::from_int(-1))))
        .collect();
    Some(RatMat::from_columns(g.dim(), &cols?))
}

/// Embedded fixture files, `(file name, contents)`.
pub const FILES: &[(&str, &str)] = &[
    ("sl2.json", include_str!("../catalog/sl2.json")),
    ("sl3.json", include_str!("../catalog/sl3.json")),
    ("sl5.json", include_str!("../catalog/sl5.json")),
    ("so2.json", include_str!("../catalog/so2.json")),
    ("so11.json", include_str!("../catalog/so11.json")),
    ("nE.json", include_str!("../catalog/nE.json")),
    ("borel.json", include_str!("../catalog/borel.json")),
    ("sl3-so3.json", include_str!("../catalog/sl3-so3.json")),
    ("sl3-so2.json", include_str!("../catalog/sl3-so2.json")),
    (
        "sl3-principal-so2.json",
        include_str!("../catalog/sl3-principal-so2.json"),
    ),
    ("e12.json", include_str!("../catalog/e12.json")),
    ("sl3-n0.json", include_str!("../catalog/sl3-n0.json")),
    (
        "sl3-e12-plus-e13.json",
        include_str!("../catalog/sl3-e12-plus-e13.json"),
    ),
    ("sl3-diag.json", include_str!("../catalog/sl3-diag.json")),
    ("sl5-u-u23.json", include_str!("../catalog/sl5-u-u23.json")),
    ("theta-sl2.json", include_str!("../catalog/theta-sl2.json")),
    ("theta-sl3.json", include_str!("../catalog/theta-sl3.json")),
    ("theta-sl5.json", include_str!("../catalog/theta-sl5.json")),
    (
        "sl2-borel-parabolic.json",
        include_str!("../catalog/sl2-borel-parabolic.json"),
    ),
    (
        "flag-parabolic.json",
        include_str!("../catalog/flag-parabolic.json"),
    ),
    (
        "sl3-borel-parabolic.json",
        include_str!("../catalog/sl3-borel-parabolic.json"),
    ),
    (
        "sl2-so2-bound.json",
        include_str!("../catalog/sl2-so2-bound.json"),
    ),
    (
        "sl2-so11-bound.json",
        include_str!("../catalog/sl2-so11-bound.json"),
    ),
    (
        "sl3-so3-bound.json",
        include_str!("../catalog/sl3-so3-bound.json"),
    ),
];

/// Looks up an embedded fixture by file name, with or without `.json`.
pub fn file(name: &str) -> Option<&'static str> {
    let want = if name.ends_with(".json") {
        name.to_string()
    } else {
        format!("{name}.json")
    };
    FILES.iter().find(|(n, _)| *n == want).map(|(_, c)| *c)
}

/// Expected verdict class for a bundled pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expected {
    Holds,
    Fails,
    NoInvariantMeasure,
}

/// A bundled `(g, h, theta)` triple.
#[derive(Clone, Copy, Debug)]
pub struct Pair {
    pub algebra: &'static str,
    pub subalgebra: &'static str,
    pub theta: &'static str,
    pub expected: Expected,
}

pub const PAIRS: &[Pair] = &[
    Pair {
        algebra: "sl2",
        subalgebra: "so2",
        theta: "theta-sl2",
        expected: Expected::Holds,
    },
    Pair {
        algebra: "sl2",
        subalgebra: "so11",
        theta: "theta-sl2",
        expected: Expected::Holds,
    },
    Pair {
        algebra: "sl3",
        subalgebra: "sl3-so3",
        theta: "theta-sl3",
        expected: Expected::Holds,
    },
    Pair {
        algebra: "sl3",
        subalgebra: "sl3-so2",
        theta: "theta-sl3",
        expected: Expected::Holds,
    },
    Pair {
        algebra: "sl3",
        subalgebra: "sl3-principal-so2",
        theta: "theta-sl3",
        expected: Expected::Holds,
    },
    Pair {
        algebra: "sl3",
        subalgebra: "sl3-diag",
        theta: "theta-sl3",
        expected: Expected::Holds,
    },
    Pair {
        algebra: "sl2",
        subalgebra: "nE",
        theta: "theta-sl2",
        expected: Expected::Fails,
    },
    Pair {
        algebra: "sl3",
        subalgebra: "e12",
        theta: "theta-sl3",
        expected: Expected::Fails,
    },
    Pair {
        algebra: "sl3",
        subalgebra: "sl3-n0",
        theta: "theta-sl3",
        expected: Expected::Fails,
    },
    Pair {
        algebra: "sl3",
        subalgebra: "sl3-e12-plus-e13",
        theta: "theta-sl3",
        expected: Expected::Fails,
    },
    Pair {
        algebra: "sl5",
        subalgebra: "sl5-u-u23",
        theta: "theta-sl5",
        expected: Expected::Fails,
    },
    Pair {
        algebra: "sl2",
        subalgebra: "borel",
        theta: "theta-sl2",
        expected: Expected::NoInvariantMeasure,
    },
];
