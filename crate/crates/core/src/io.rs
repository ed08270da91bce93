//! On-disk formats. Rationals are canonical strings (`"3"`, `"-1/2"`); a
//! non-canonical entry is a load error, reported with its line and column.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{Rat, RatMat, Vector};
use crate::lie::LieAlgebra;
use crate::reductivity::ReductivityReport;
use crate::volume::VolumeSeries;
use crate::witness::{DecayWitness, LowerBoundCert, MtReport, UnipotentWitness};

/// Lie algebra by matrix basis or by structure constants (exactly one).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    pub name: String,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<Vec<Vec<Rat>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sc: Option<Vec<Vec<Vec<Rat>>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubalgebraFile {
    pub name: String,
    pub algebra: String,
    pub basis: Vec<Vector>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaFile {
    pub name: String,
    pub algebra: String,
    /// Matrix of theta in the basis of g; column `j` is `theta(e_j)`.
    pub theta: Vec<Vec<Rat>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParabolicFile {
    pub name: String,
    pub algebra: String,
    pub p0: Vec<Vector>,
    pub l0: Vec<Vector>,
    pub n0: Vec<Vector>,
    pub nbar0: Vec<Vector>,
    pub x: Vector,
}

/// Direction `x ∈ q ∩ p` and the nilradical `u` used for growth exponents.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundFile {
    pub name: String,
    pub algebra: String,
    pub subalgebra: String,
    pub x: Vector,
    pub u: Vec<Vector>,
}

/// Parses JSON, turning serde errors into `Parse` errors naming the source.
pub fn parse_json<T: DeserializeOwned>(text: &str, source: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        context: source.to_string(),
        message: e.to_string(),
    })
}

fn check_len(source: &str, what: &str, got: usize, want: usize) -> Result<()> {
    if got == want {
        Ok(())
    } else {
        Err(Error::Parse {
            context: source.to_string(),
            message: format!("{what} has length {got}, expected {want}"),
        })
    }
}

fn check_vectors(source: &str, what: &str, vs: &[Vector], dim: usize) -> Result<()> {
    for (i, v) in vs.iter().enumerate() {
        check_len(source, &format!("{what}[{i}]"), v.len(), dim)?;
    }
    Ok(())
}

impl AlgebraFile {
    pub fn into_algebra(self, source: &str) -> Result<LieAlgebra> {
        let err = |message: String| Error::Parse {
            context: source.to_string(),
            message,
        };
        match (self.basis, self.sc) {
            (Some(basis), None) => {
                check_len(source, "basis", basis.len(), self.dim)?;
                let mats = basis
                    .into_iter()
                    .enumerate()
                    .map(|(i, rows)| {
                        RatMat::from_rows(rows).map_err(|e| err(format!("basis[{i}]: {e}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                LieAlgebra::from_matrices(self.name, mats).map_err(|e| err(e.to_string()))
            }
            (None, Some(sc)) => {
                check_len(source, "sc", sc.len(), self.dim)?;
                for (i, plane) in sc.iter().enumerate() {
                    check_len(source, &format!("sc[{i}]"), plane.len(), self.dim)?;
                    for (j, row) in plane.iter().enumerate() {
                        check_len(source, &format!("sc[{i}][{j}]"), row.len(), self.dim)?;
                    }
                }
                LieAlgebra::from_structure_constants(self.name, sc).map_err(|e| err(e.to_string()))
            }
            (Some(_), Some(_)) => {
                Err(err("both `basis` and `sc` given; supply exactly one".into()))
            }
            (None, None) => Err(err("one of `basis` or `sc` is required".into())),
        }
    }
}

pub fn parse_algebra(text: &str, source: &str) -> Result<LieAlgebra> {
    parse_json::<AlgebraFile>(text, source)?.into_algebra(source)
}

pub fn parse_subalgebra(text: &str, source: &str, g: &LieAlgebra) -> Result<SubalgebraFile> {
    let f: SubalgebraFile = parse_json(text, source)?;
    check_vectors(source, "basis", &f.basis, g.dim())?;
    Ok(f)
}

pub fn parse_theta(text: &str, source: &str, g: &LieAlgebra) -> Result<RatMat> {
    let f: ThetaFile = parse_json(text, source)?;
    check_vectors(source, "theta", &f.theta, g.dim())?;
    check_len(source, "theta", f.theta.len(), g.dim())?;
    RatMat::from_rows(f.theta)
}

pub fn parse_parabolic(text: &str, source: &str, g: &LieAlgebra) -> Result<ParabolicFile> {
    let f: ParabolicFile = parse_json(text, source)?;
    for (what, vs) in [
        ("p0", &f.p0),
        ("l0", &f.l0),
        ("n0", &f.n0),
        ("nbar0", &f.nbar0),
    ] {
        check_vectors(source, what, vs, g.dim())?;
    }
    check_len(source, "x", f.x.len(), g.dim())?;
    Ok(f)
}

pub fn parse_bound(text: &str, source: &str, g: &LieAlgebra) -> Result<BoundFile> {
    let f: BoundFile = parse_json(text, source)?;
    check_vectors(source, "u", &f.u, g.dim())?;
    check_len(source, "x", f.x.len(), g.dim())?;
    Ok(f)
}

/// SHA-256 of one input file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputHash {
    pub path: String,
    pub sha256: String,
}

/// Outcome of comparing a fitted slope with its predicted exponent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitCheck {
    /// `"exact"` for a two-sided comparison, `"lower-bound"` for `slope >= predicted - tol`.
    pub mode: String,
    pub predicted: Rat,
    pub tolerance: f64,
    pub slope: f64,
    pub slope_half_width: f64,
    /// Exponent reported for reference only (the hyperboloid's `2ρ`).
    pub reference: Option<Rat>,
    /// `min v / v(t_0)` stays above one half (symmetric spaces only).
    pub bounded_below: Option<bool>,
    pub verdict: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ReportPayload {
    Reductivity(ReductivityReport),
    DecayWitness {
        witness: DecayWitness,
        mt: MtReport,
    },
    UnipotentWitness(UnipotentWitness),
    LowerBound {
        cert: LowerBoundCert,
        /// `2ρ(x)` when the pair is symmetric.
        symmetric_exponent: Option<Rat>,
    },
    VolumeSeries {
        series: VolumeSeries,
        fit_check: Option<FitCheck>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: Vec<String>,
    pub inputs: Vec<InputHash>,
    pub version: String,
    pub payload: ReportPayload,
}

impl Report {
    pub fn new(command: Vec<String>, inputs: Vec<InputHash>, payload: ReportPayload) -> Self {
        Report {
            command,
            inputs,
            version: env!("CARGO_PKG_VERSION").to_string(),
            payload,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports contain only finite values")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        parse_json(text, "report")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn catalog_algebras_match_builders() {
        for (name, n) in [("sl2", 2), ("sl3", 3), ("sl5", 5)] {
            let g = parse_algebra(catalog::file(name).unwrap(), name).unwrap();
            assert_eq!(
                g.structure_constants(),
                catalog::sl(n).structure_constants()
            );
        }
    }

    #[test]
    fn catalog_theta_is_negative_transpose() {
        for (name, n) in [("theta-sl2", 2), ("theta-sl3", 3), ("theta-sl5", 5)] {
            let g = catalog::sl(n);
            let t = parse_theta(catalog::file(name).unwrap(), name, &g).unwrap();
            assert_eq!(Some(t), catalog::negative_transpose(&g));
        }
    }

    #[test]
    fn non_canonical_rational_reports_position() {
        let text = "{\n  \"name\": \"a\",\n  \"dim\": 1,\n  \"sc\": [[[\"2/4\"]]]\n}";
        let e = parse_algebra(text, "bad.json").unwrap_err().to_string();
        assert!(e.contains("bad.json"), "{e}");
        assert!(e.contains("line 4"), "{e}");
        assert!(e.contains("1/2"), "{e}");
    }

    #[test]
    fn basis_xor_sc() {
        let text = r#"{"name": "a", "dim": 1}"#;
        assert!(matches!(parse_algebra(text, "x"), Err(Error::Parse { .. })));
        let text = r#"{"name": "a", "dim": 1, "sc": [[["0"]]], "basis": [[["1"]]]}"#;
        assert!(matches!(parse_algebra(text, "x"), Err(Error::Parse { .. })));
    }

    #[test]
    fn jacobi_failure_is_a_load_error() {
        // [e0,e1] = e1, [e0,e2] = e1, [e1,e2] = e0 violates Jacobi
        let text = r#"{"name":"bad","dim":3,"sc":[
            [["0","0","0"],["0","1","0"],["0","1","0"]],
            [["0","-1","0"],["0","0","0"],["1","0","0"]],
            [["0","-1","0"],["-1","0","0"],["0","0","0"]]]}"#;
        let e = parse_algebra(text, "bad.json").unwrap_err();
        assert!(matches!(e, Error::Parse { .. }), "{e}");
    }

    #[test]
    fn wrong_vector_length() {
        let g = catalog::sl(2);
        let text = r#"{"name":"h","algebra":"sl2","basis":[["1","0"]]}"#;
        let e = parse_subalgebra(text, "h.json", &g)
            .unwrap_err()
            .to_string();
        assert!(e.contains("basis[0]"), "{e}");
    }

    #[test]
    fn reports_round_trip() {
        use crate::catalog::sl;
        use crate::exact::ints;
        use crate::lie::Subalgebra;
        let g = sl(2);
        let n = Subalgebra::new(&g, vec![ints(&[0, 1, 0])]).unwrap();
        let so2 = Subalgebra::new(&g, vec![ints(&[0, 1, -1])]).unwrap();
        let series = crate::volume::volume_along_curve(
            &crate::volume::Sl2ModN,
            &[-1.0, -0.5, 0.0, 0.5],
            0.3,
            1000,
            1,
        )
        .unwrap();
        let payloads = vec![
            ReportPayload::Reductivity(crate::reductivity::vai_verdict(&g, &so2).unwrap()),
            ReportPayload::UnipotentWitness(
                crate::witness::unipotent_witness(&g, &n, None).unwrap(),
            ),
            ReportPayload::VolumeSeries {
                series,
                fit_check: None,
            },
        ];
        for p in payloads {
            let r = Report::new(
                vec!["vai".into(), "check".into()],
                vec![InputHash {
                    path: "a".into(),
                    sha256: "00".into(),
                }],
                p,
            );
            let back = Report::from_json(&r.to_json()).unwrap();
            assert_eq!(back, r);
        }
    }
}
