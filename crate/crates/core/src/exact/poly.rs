use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{Rat, RatMat};
use crate::error::{Error, Result};

/// Univariate polynomial over Q, coefficients lowest degree first. The zero
/// polynomial has no coefficients; otherwise the last one is nonzero.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<Rat>", into = "Vec<Rat>")]
pub struct Poly {
    coeffs: Vec<Rat>,
}

impl From<Vec<Rat>> for Poly {
    fn from(coeffs: Vec<Rat>) -> Self {
        Poly::new(coeffs)
    }
}

impl From<Poly> for Vec<Rat> {
    fn from(p: Poly) -> Self {
        p.coeffs
    }
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(Rat::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Poly::new(c.iter().map(|&x| Rat::from_int(x)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn x() -> Self {
        Poly::from_ints(&[0, 1])
    }

    /// `x - r`
    pub fn linear(r: &Rat) -> Self {
        Poly::new(vec![-r, Rat::one()])
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Poly::zero(),
            Some(l) => {
                let inv = l.recip();
                Poly::new(self.coeffs.iter().map(|c| c * &inv).collect())
            }
        }
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rat::from_int(k as i64))
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Rat::zero();
        Poly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) + other.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Rat::zero();
        Poly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) - other.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// Euclidean division; panics when dividing by zero.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let d = divisor.degree().expect("division by the zero polynomial");
        let lead_inv = divisor.coeffs[d].recip();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rat::zero(); self.coeffs.len().saturating_sub(d)];
        while rem.len() > d && !rem.is_empty() {
            let k = rem.len() - 1 - d;
            let c = &rem[rem.len() - 1] * &lead_inv;
            for (i, b) in divisor.coeffs.iter().enumerate() {
                let t = &c * b;
                rem[k + i] -= t;
            }
            quot[k] = c;
            rem.pop();
            while rem.last().is_some_and(Rat::is_zero) {
                rem.pop();
            }
        }
        (Poly::new(quot), Poly::new(rem))
    }

    /// Monic greatest common divisor (zero only if both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        self.coeffs
            .iter()
            .rev()
            .fold(Rat::zero(), |acc, c| acc * x + c)
    }

    /// Evaluates at a square matrix by Horner's rule.
    pub fn eval_matrix(&self, m: &RatMat) -> RatMat {
        let n = m.rows();
        let mut acc = RatMat::zeros(n, n);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(m).add(&RatMat::identity(n).scale(c));
        }
        acc
    }

    /// True iff `gcd(p, p')` is constant.
    pub fn is_squarefree(&self) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(self.gcd(&self.derivative()).degree() == Some(0))
    }

    /// `p / gcd(p, p')`, monic.
    pub fn squarefree_part(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let g = self.gcd(&self.derivative());
        Ok(self.div_rem(&g).0.monic())
    }

    /// Distinct rational roots in increasing order (rational root theorem).
    pub fn rational_roots(&self) -> Result<Vec<Rat>> {
        let sf = self.squarefree_part()?;
        let mut ints = integer_coefficients(&sf);
        let mut roots = Vec::new();
        while ints.len() > 1 && ints[0].is_zero() {
            roots.push(Rat::zero());
            ints.remove(0);
        }
        if ints.len() > 1 {
            let int_poly = Poly::new(ints.iter().cloned().map(Rat::from).collect());
            let ps = divisors(&ints[0]);
            let qs = divisors(ints.last().unwrap());
            let mut seen = std::collections::BTreeSet::new();
            for p in &ps {
                for q in &qs {
                    for sign in [1i64, -1] {
                        let cand = Rat::from_bigints(p * BigInt::from(sign), q.clone());
                        if seen.insert(cand.clone()) && int_poly.eval(&cand).is_zero() {
                            roots.push(cand);
                        }
                    }
                }
            }
        }
        roots.sort();
        roots.dedup();
        Ok(roots)
    }
}

/// Scales a polynomial by the lcm of its denominators.
fn integer_coefficients(p: &Poly) -> Vec<BigInt> {
    let lcm = p
        .coeffs
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(&c.denom()));
    p.coeffs
        .iter()
        .map(|c| c.numer() * (&lcm / c.denom()))
        .collect()
}

/// Positive divisors of |n| (n nonzero), by trial division.
fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    if let Some(mut m) = n.to_u128() {
        let mut d: u128 = 2;
        while d * d <= m {
            let mut e = 0;
            while m % d == 0 {
                m /= d;
                e += 1;
            }
            if e > 0 {
                factors.push((BigInt::from(d), e));
            }
            d += if d == 2 { 1 } else { 2 };
        }
        if m > 1 {
            factors.push((BigInt::from(m), 1));
        }
    } else {
        let mut m = n.clone();
        let mut d = BigInt::from(2);
        while &d * &d <= m {
            let mut e = 0;
            while (&m % &d).is_zero() {
                m /= &d;
                e += 1;
            }
            if e > 0 {
                factors.push((d.clone(), e));
            }
            d += 1;
        }
        if m > BigInt::one() {
            factors.push((m, 1));
        }
    }
    let mut divs = vec![BigInt::one()];
    for (p, e) in factors {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d in &divs {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        divs = next;
    }
    divs
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let coef = if a.is_integer() {
                a.to_string()
            } else {
                format!("({a})")
            };
            match k {
                0 => write!(f, "{coef}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{coef}")?;
                    }
                    if k == 1 {
                        write!(f, "x")?;
                    } else {
                        write!(f, "x^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squarefree_examples() {
        assert!(Poly::from_ints(&[0, 4, 0, 1]).is_squarefree().unwrap());
        assert!(!Poly::from_ints(&[0, 0, 0, 1]).is_squarefree().unwrap());
        assert!(Poly::x().is_squarefree().unwrap());
        assert!(matches!(
            Poly::zero().is_squarefree(),
            Err(Error::ZeroPolynomial)
        ));
    }

    #[test]
    fn display() {
        assert_eq!(Poly::from_ints(&[0, 4, 0, 1]).to_string(), "x^3 + 4x");
        assert_eq!(Poly::from_ints(&[-2, 0, 1]).to_string(), "x^2 - 2");
        assert_eq!(Poly::x().to_string(), "x");
    }

    #[test]
    fn division_identity() {
        let a = Poly::from_ints(&[5, -3, 0, 2, 7]);
        let b = Poly::from_ints(&[1, 0, 3]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.degree().unwrap_or(0) < 2);
    }

    #[test]
    fn rational_roots_found() {
        // (x - 1/2)(x + 3)^2 x (x^2 + 1)
        let p = Poly::linear(&Rat::new(1, 2))
            .mul(&Poly::linear(&Rat::from_int(-3)))
            .mul(&Poly::linear(&Rat::from_int(-3)))
            .mul(&Poly::x())
            .mul(&Poly::from_ints(&[1, 0, 1]));
        assert_eq!(
            p.rational_roots().unwrap(),
            vec![Rat::from_int(-3), Rat::zero(), Rat::new(1, 2)]
        );
        assert!(Poly::from_ints(&[4, 0, 1])
            .rational_roots()
            .unwrap()
            .is_empty());
    }

    #[test]
    fn divisors_small() {
        let mut d = divisors(&BigInt::from(12));
        d.sort();
        let want: Vec<BigInt> = [1, 2, 3, 4, 6, 12]
            .iter()
            .map(|&x| BigInt::from(x))
            .collect();
        assert_eq!(d, want);
    }
}
