use super::complex::{ExactComplex, Rational};
use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Dense univariate polynomial over the Gaussian rationals.
///
/// Coefficients are indexed by power and kept normalized: the vector never
/// ends in a zero, and the zero polynomial is the empty vector. `degree()`
/// returns `None` for the zero polynomial (the `-inf` sentinel).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<ExactComplex>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<ExactComplex>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(ExactComplex::one())
    }

    pub fn constant(c: ExactComplex) -> Self {
        Poly::new(vec![c])
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&v| ExactComplex::from_int(v)).collect())
    }

    /// The monomial `c * z^k`.
    pub fn monomial(c: ExactComplex, k: usize) -> Self {
        let mut v = vec![ExactComplex::zero(); k];
        v.push(c);
        Poly::new(v)
    }

    pub fn identity() -> Self {
        Poly::monomial(ExactComplex::one(), 1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeff(&self, k: usize) -> ExactComplex {
        self.coeffs.get(k).cloned().unwrap_or_else(ExactComplex::zero)
    }

    pub fn coeffs(&self) -> &[ExactComplex] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&ExactComplex> {
        self.coeffs.last()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn scale(&self, c: &ExactComplex) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Poly::zero();
        }
        Poly::new(self.coeffs.iter().map(|a| a.scale(r)).collect())
    }

    /// Exact division by a nonzero integer; used by trace recursions.
    pub fn div_int(&self, k: i64) -> Self {
        assert!(k != 0);
        let inv = ExactComplex::from_ratio(1, k);
        self.scale(&inv)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.scale(&Rational::from_integer((k as i64).into())))
                .collect(),
        )
    }

    pub fn eval(&self, z: &ExactComplex) -> ExactComplex {
        let mut acc = ExactComplex::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * z) + c;
        }
        acc
    }

    pub fn eval_f64(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c.to_f64();
        }
        acc
    }

    pub fn to_f64_coeffs(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(|c| c.to_f64()).collect()
    }

    /// Substitute `z -> c*z` leaving degrees unchanged.
    pub fn compose_scale(&self, c: &ExactComplex) -> Self {
        let mut pow = ExactComplex::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            out.push(a * &pow);
            pow = &pow * c;
        }
        Poly::new(out)
    }

    /// Quotient and remainder with respect to a nonzero divisor.
    pub fn div_rem(&self, div: &Poly) -> (Poly, Poly) {
        assert!(!div.is_zero(), "division by zero polynomial");
        let dd = div.coeffs.len() - 1;
        if self.coeffs.len() < div.coeffs.len() {
            return (Poly::zero(), self.clone());
        }
        let lead_inv = div.coeffs[dd].inv();
        let mut rem = self.coeffs.clone();
        let qlen = rem.len() - dd;
        let mut quot = vec![ExactComplex::zero(); qlen];
        for k in (0..qlen).rev() {
            let c = &rem[k + dd] * &lead_inv;
            if c.is_zero() {
                continue;
            }
            for j in 0..dd {
                let t = &div.coeffs[j] * &c;
                rem[k + j] -= &t;
            }
            rem[k + dd] = ExactComplex::zero();
            quot[k] = c;
        }
        (Poly::new(quot), Poly::new(rem))
    }

    /// Division that must leave no remainder; `None` when it does.
    pub fn div_exact(&self, div: &Poly) -> Option<Poly> {
        let (q, r) = self.div_rem(div);
        if r.is_zero() {
            Some(q)
        } else {
            None
        }
    }

    /// Render with the given variable name, for report strings.
    pub fn render(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let coeff = format!("{c}");
            let part = match k {
                0 => coeff,
                1 if coeff == "1" => var.to_string(),
                1 if coeff == "-1" => format!("-{var}"),
                1 => format!("{coeff}*{var}"),
                _ if coeff == "1" => format!("{var}^{k}"),
                _ if coeff == "-1" => format!("-{var}^{k}"),
                _ => format!("{coeff}*{var}^{k}"),
            };
            parts.push(part);
        }
        parts.join(" + ").replace("+ -", "- ")
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(&self.coeff(k) + &rhs.coeff(k));
        }
        Poly::new(out)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(&self.coeff(k) - &rhs.coeff(k));
        }
        Poly::new(out)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![ExactComplex::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                let t = a * b;
                out[i + j] += &t;
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($trait:ident, $method:ident) => {
        impl $trait for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render("z"))
    }
}

/// Wire format: array of coefficient quadruples by ascending power; the zero
/// polynomial is the empty array.
impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.coeffs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let coeffs = Vec::<ExactComplex>::deserialize(deserializer)?;
        Ok(Poly::new(coeffs))
    }
}
