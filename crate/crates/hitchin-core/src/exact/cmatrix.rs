use super::complex::ExactComplex;
use super::poly::Poly;
use super::pmatrix::PolyMatrix;
use serde::{Deserialize, Deserializer, Serialize};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Dense matrix with constant Gaussian-rational entries. Used for residues,
/// structural matrices, conjugators and moment-map blocks.
#[derive(Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct CMatrix {
    rows: Vec<Vec<ExactComplex>>,
}

impl CMatrix {
    pub fn new(rows: Vec<Vec<ExactComplex>>) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        CMatrix { rows }
    }

    pub fn zeros(r: usize, c: usize) -> Self {
        CMatrix { rows: vec![vec![ExactComplex::zero(); c]; r] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m.rows[i][i] = ExactComplex::one();
        }
        m
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        CMatrix::new(
            rows.iter()
                .map(|r| r.iter().map(|&v| ExactComplex::from_int(v)).collect())
                .collect(),
        )
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len())
    }

    pub fn is_square(&self) -> bool {
        self.nrows() == self.ncols()
    }

    pub fn get(&self, i: usize, j: usize) -> &ExactComplex {
        &self.rows[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: ExactComplex) {
        self.rows[i][j] = v;
    }

    pub fn rows(&self) -> &[Vec<ExactComplex>] {
        &self.rows
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.iter().all(|c| c.is_zero()))
    }

    pub fn transpose(&self) -> Self {
        let (r, c) = (self.nrows(), self.ncols());
        let mut out = CMatrix::zeros(c, r);
        for i in 0..r {
            for j in 0..c {
                out.rows[j][i] = self.rows[i][j].clone();
            }
        }
        out
    }

    pub fn conj_transpose(&self) -> Self {
        let (r, c) = (self.nrows(), self.ncols());
        let mut out = CMatrix::zeros(c, r);
        for i in 0..r {
            for j in 0..c {
                out.rows[j][i] = self.rows[i][j].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> ExactComplex {
        assert!(self.is_square());
        let mut t = ExactComplex::zero();
        for i in 0..self.nrows() {
            t += &self.rows[i][i];
        }
        t
    }

    pub fn scale(&self, c: &ExactComplex) -> Self {
        CMatrix::new(
            self.rows
                .iter()
                .map(|r| r.iter().map(|v| v * c).collect())
                .collect(),
        )
    }

    /// Trace-free part `A - (tr A / n) I` of a square matrix.
    pub fn trace_free_part(&self) -> Self {
        let n = self.nrows();
        assert!(self.is_square() && n > 0);
        let shift = &self.trace() * &ExactComplex::from_ratio(1, n as i64);
        let mut out = self.clone();
        for i in 0..n {
            out.rows[i][i] = &out.rows[i][i] - &shift;
        }
        out
    }

    /// Row rank over the Gaussian rationals, by exact elimination.
    pub fn rank(&self) -> usize {
        let mut m = self.rows.clone();
        let (nr, nc) = (self.nrows(), self.ncols());
        let mut rank = 0;
        let mut col = 0;
        while rank < nr && col < nc {
            let pivot = (rank..nr).find(|&i| !m[i][col].is_zero());
            let Some(p) = pivot else {
                col += 1;
                continue;
            };
            m.swap(rank, p);
            let inv = m[rank][col].inv();
            for j in col..nc {
                m[rank][j] = &m[rank][j] * &inv;
            }
            for i in 0..nr {
                if i != rank && !m[i][col].is_zero() {
                    let f = m[i][col].clone();
                    for j in col..nc {
                        let t = &m[rank][j] * &f;
                        m[i][j] = &m[i][j] - &t;
                    }
                }
            }
            rank += 1;
            col += 1;
        }
        rank
    }

    pub fn det(&self) -> ExactComplex {
        assert!(self.is_square());
        let n = self.nrows();
        let mut m = self.rows.clone();
        let mut det = ExactComplex::one();
        for k in 0..n {
            let pivot = (k..n).find(|&i| !m[i][k].is_zero());
            let Some(p) = pivot else {
                return ExactComplex::zero();
            };
            if p != k {
                m.swap(k, p);
                det = -det;
            }
            det = &det * &m[k][k];
            let inv = m[k][k].inv();
            for i in k + 1..n {
                if m[i][k].is_zero() {
                    continue;
                }
                let f = &m[i][k] * &inv;
                for j in k..n {
                    let t = &m[k][j] * &f;
                    m[i][j] = &m[i][j] - &t;
                }
            }
        }
        det
    }

    /// Exact inverse; `None` for singular input.
    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square());
        let n = self.nrows();
        let mut m = self.rows.clone();
        let mut inv = CMatrix::identity(n).rows;
        for k in 0..n {
            let p = (k..n).find(|&i| !m[i][k].is_zero())?;
            m.swap(k, p);
            inv.swap(k, p);
            let piv = m[k][k].inv();
            for j in 0..n {
                m[k][j] = &m[k][j] * &piv;
                inv[k][j] = &inv[k][j] * &piv;
            }
            for i in 0..n {
                if i != k && !m[i][k].is_zero() {
                    let f = m[i][k].clone();
                    for j in 0..n {
                        let tm = &m[k][j] * &f;
                        m[i][j] = &m[i][j] - &tm;
                        let ti = &inv[k][j] * &f;
                        inv[i][j] = &inv[i][j] - &ti;
                    }
                }
            }
        }
        Some(CMatrix { rows: inv })
    }

    /// Lift to a polynomial matrix with constant entries.
    pub fn to_poly_matrix(&self) -> PolyMatrix {
        PolyMatrix::new(
            self.rows
                .iter()
                .map(|r| r.iter().map(|c| Poly::constant(c.clone())).collect())
                .collect(),
        )
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.nrows(), self.ncols()), (rhs.nrows(), rhs.ncols()));
        CMatrix::new(
            self.rows
                .iter()
                .zip(&rhs.rows)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
                .collect(),
        )
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.nrows(), self.ncols()), (rhs.nrows(), rhs.ncols()));
        CMatrix::new(
            self.rows
                .iter()
                .zip(&rhs.rows)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
                .collect(),
        )
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.ncols(), rhs.nrows(), "dimension mismatch");
        let (r, k, c) = (self.nrows(), self.ncols(), rhs.ncols());
        let mut out = CMatrix::zeros(r, c);
        for i in 0..r {
            for j in 0..c {
                let mut acc = ExactComplex::zero();
                for l in 0..k {
                    let t = &self.rows[i][l] * &rhs.rows[l][j];
                    acc += &t;
                }
                out.rows[i][j] = acc;
            }
        }
        out
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        CMatrix::new(
            self.rows
                .iter()
                .map(|r| r.iter().map(|c| -c).collect())
                .collect(),
        )
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for r in &self.rows {
            writeln!(
                f,
                "  [{}]",
                r.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ")
            )?;
        }
        write!(f, "]")
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<ExactComplex>>::deserialize(deserializer)?;
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(serde::de::Error::custom("ragged matrix"));
        }
        Ok(CMatrix { rows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_det() {
        let m = CMatrix::from_ints(&[&[1, 2], &[2, 4]]);
        assert_eq!(m.rank(), 1);
        assert_eq!(m.det(), ExactComplex::zero());
        let m = CMatrix::from_ints(&[&[1, 2], &[3, 4]]);
        assert_eq!(m.rank(), 2);
        assert_eq!(m.det(), ExactComplex::from_int(-2));
    }

    #[test]
    fn inverse_round_trip() {
        let m = CMatrix::from_ints(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 1]]);
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, CMatrix::identity(3));
        let s = CMatrix::from_ints(&[&[1, 1], &[1, 1]]);
        assert!(s.inverse().is_none());
    }

    #[test]
    fn trace_free() {
        let m = CMatrix::from_ints(&[&[3, 1], &[0, 5]]);
        let t = m.trace_free_part();
        assert_eq!(t.trace(), ExactComplex::zero());
        assert_eq!(t, CMatrix::from_ints(&[&[-1, 1], &[0, 1]]));
    }
}
