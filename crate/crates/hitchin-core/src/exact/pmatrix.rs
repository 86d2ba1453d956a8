use super::cmatrix::CMatrix;
use super::complex::ExactComplex;
use super::poly::Poly;
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

/// Square or rectangular matrix with polynomial entries: the chart-level
/// form of a twisted endomorphism.
#[derive(Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct PolyMatrix {
    rows: Vec<Vec<Poly>>,
}

impl PolyMatrix {
    pub fn new(rows: Vec<Vec<Poly>>) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        PolyMatrix { rows }
    }

    pub fn zeros(r: usize, c: usize) -> Self {
        PolyMatrix { rows: vec![vec![Poly::zero(); c]; r] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = PolyMatrix::zeros(n, n);
        for i in 0..n {
            m.rows[i][i] = Poly::one();
        }
        m
    }

    pub fn from_int_consts(rows: &[&[i64]]) -> Self {
        PolyMatrix::new(
            rows.iter()
                .map(|r| r.iter().map(|&v| Poly::from_ints(&[v])).collect())
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

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.rows[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Poly) {
        self.rows[i][j] = p;
    }

    pub fn rows(&self) -> &[Vec<Poly>] {
        &self.rows
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.iter().all(|p| p.is_zero()))
    }

    pub fn transpose(&self) -> Self {
        let (r, c) = (self.nrows(), self.ncols());
        let mut out = PolyMatrix::zeros(c, r);
        for i in 0..r {
            for j in 0..c {
                out.rows[j][i] = self.rows[i][j].clone();
            }
        }
        out
    }

    pub fn trace(&self) -> Poly {
        assert!(self.is_square());
        let mut t = Poly::zero();
        for i in 0..self.nrows() {
            t = &t + &self.rows[i][i];
        }
        t
    }

    pub fn scale(&self, c: &ExactComplex) -> Self {
        PolyMatrix::new(
            self.rows
                .iter()
                .map(|r| r.iter().map(|p| p.scale(c)).collect())
                .collect(),
        )
    }

    pub fn scale_poly(&self, f: &Poly) -> Self {
        PolyMatrix::new(
            self.rows
                .iter()
                .map(|r| r.iter().map(|p| p * f).collect())
                .collect(),
        )
    }

    /// Largest entry degree, `None` when the matrix is zero.
    pub fn max_degree(&self) -> Option<usize> {
        self.rows
            .iter()
            .flat_map(|r| r.iter())
            .filter_map(|p| p.degree())
            .max()
    }

    pub fn eval(&self, z: &ExactComplex) -> CMatrix {
        CMatrix::new(
            self.rows
                .iter()
                .map(|r| r.iter().map(|p| p.eval(z)).collect())
                .collect(),
        )
    }

    pub fn eval_f64(&self, z: Complex64) -> Vec<Vec<Complex64>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|p| p.eval_f64(z)).collect())
            .collect()
    }

    /// Characteristic polynomial coefficients `[c_1, ..., c_n]` of
    /// `det(x I - M) = x^n + c_1 x^{n-1} + ... + c_n`, by the trace
    /// recursion: `N_1 = M`, `c_k = -tr(N_k)/k`, `N_k = M (N_{k-1} + c_{k-1} I)`.
    /// Exact: the only divisions are by the integers `1..=n`.
    pub fn char_poly(&self) -> Vec<Poly> {
        assert!(self.is_square(), "characteristic polynomial of a non-square matrix");
        let n = self.nrows();
        let mut coeffs = Vec::with_capacity(n);
        if n == 0 {
            return coeffs;
        }
        let mut nk = self.clone();
        let mut c = (-&nk.trace()).div_int(1);
        coeffs.push(c.clone());
        for k in 2..=n {
            let mut shifted = nk;
            for i in 0..n {
                shifted.rows[i][i] = &shifted.rows[i][i] + &c;
            }
            nk = self * &shifted;
            c = (-&nk.trace()).div_int(k as i64);
            coeffs.push(c.clone());
        }
        coeffs
    }

    /// Power traces `[tr M, tr M^2, ..., tr M^k]`.
    pub fn power_traces(&self, k: usize) -> Vec<Poly> {
        assert!(self.is_square());
        let mut out = Vec::with_capacity(k);
        let mut p = self.clone();
        for step in 0..k {
            out.push(p.trace());
            if step + 1 < k {
                p = &p * self;
            }
        }
        out
    }

    /// Determinant by fraction-free elimination; all intermediate divisions
    /// are exact in the polynomial ring.
    pub fn det(&self) -> Poly {
        assert!(self.is_square());
        let n = self.nrows();
        if n == 0 {
            return Poly::one();
        }
        let mut a = self.rows.clone();
        let mut sign = false;
        let mut prev = Poly::one();
        for k in 0..n - 1 {
            let pivot = (k..n).find(|&i| !a[i][k].is_zero());
            let Some(p) = pivot else {
                return Poly::zero();
            };
            if p != k {
                a.swap(k, p);
                sign = !sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &(&a[k][k] * &a[i][j]) - &(&a[i][k] * &a[k][j]);
                    a[i][j] = num
                        .div_exact(&prev)
                        .expect("fraction-free elimination step must divide exactly");
                }
                a[i][k] = Poly::zero();
            }
            prev = a[k][k].clone();
        }
        let d = a[n - 1][n - 1].clone();
        if sign {
            -&d
        } else {
            d
        }
    }

    /// Pfaffian of a skew-symmetric matrix, by expansion over perfect
    /// matchings. Rejects odd sizes and non-skew input.
    pub fn pfaffian(&self) -> Result<Poly> {
        if !self.is_square() {
            return Err(Error::structure("pfaffian needs a square matrix"));
        }
        let n = self.nrows();
        if n % 2 != 0 {
            return Err(Error::structure(format!("pfaffian needs even size, got {n}")));
        }
        for i in 0..n {
            for j in 0..=i {
                let sum = &self.rows[i][j] + &self.rows[j][i];
                if !sum.is_zero() {
                    return Err(Error::structure(format!(
                        "matrix is not skew-symmetric at ({i},{j})"
                    )));
                }
            }
        }
        let idx: Vec<usize> = (0..n).collect();
        Ok(self.pf_rec(&idx))
    }

    fn pf_rec(&self, idx: &[usize]) -> Poly {
        if idx.is_empty() {
            return Poly::one();
        }
        let a = idx[0];
        let mut acc = Poly::zero();
        for (t, &b) in idx.iter().enumerate().skip(1) {
            let entry = &self.rows[a][b];
            if entry.is_zero() {
                continue;
            }
            let rest: Vec<usize> = idx
                .iter()
                .enumerate()
                .filter(|&(p, _)| p != 0 && p != t)
                .map(|(_, &v)| v)
                .collect();
            let term = entry * &self.pf_rec(&rest);
            if t % 2 == 1 {
                acc = &acc + &term;
            } else {
                acc = &acc - &term;
            }
        }
        acc
    }

    /// Action induced on the k-th exterior power by a derivation: eigenvalues
    /// of the result are the k-fold sums of eigenvalues of `M`. Basis:
    /// k-element subsets of row indices in lexicographic order.
    pub fn exterior_power(&self, k: usize) -> Result<PolyMatrix> {
        if !self.is_square() {
            return Err(Error::structure("exterior power needs a square matrix"));
        }
        let n = self.nrows();
        if k > n {
            return Err(Error::domain(format!("exterior power {k} exceeds size {n}")));
        }
        let subsets = k_subsets(n, k);
        let dim = subsets.len();
        let mut out = PolyMatrix::zeros(dim, dim);
        for (s_idx, s) in subsets.iter().enumerate() {
            for t in 0..k {
                let from = s[t];
                for i in 0..n {
                    let entry = &self.rows[i][from];
                    if entry.is_zero() {
                        continue;
                    }
                    if i != from && s.contains(&i) {
                        continue; // repeated factor kills the wedge
                    }
                    let mut replaced = s.clone();
                    replaced[t] = i;
                    let sign = sort_parity(&mut replaced);
                    let u_idx = subsets
                        .binary_search(&replaced)
                        .expect("sorted subset must be a basis element");
                    let cur = out.get(u_idx, s_idx).clone();
                    out.set(
                        u_idx,
                        s_idx,
                        if sign { &cur - entry } else { &cur + entry },
                    );
                }
            }
        }
        Ok(out)
    }

    /// Companion matrix of the monic polynomial
    /// `x^n + c_1 x^{n-1} + ... + c_n` with `coeffs = [c_1, ..., c_n]`.
    pub fn companion(coeffs: &[Poly]) -> PolyMatrix {
        let n = coeffs.len();
        let mut m = PolyMatrix::zeros(n, n);
        for i in 1..n {
            m.rows[i][i - 1] = Poly::one();
        }
        for i in 0..n {
            m.rows[i][n - 1] = -&coeffs[n - 1 - i];
        }
        m
    }
}

/// All k-element subsets of `{0, ..., n-1}` in lexicographic order.
pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            rec(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Sort in place; `true` when the permutation applied was odd.
fn sort_parity(v: &mut [usize]) -> bool {
    let mut swaps = 0;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            swaps += 1;
            j -= 1;
        }
    }
    swaps % 2 == 1
}

/// Newton identity recursion from power traces `[p_1, ..., p_n]` to monic
/// characteristic coefficients `[c_1, ..., c_n]`:
/// `c_k = -(p_k + sum_{i=1}^{k-1} c_i p_{k-i}) / k`.
pub fn traces_to_coeffs(traces: &[Poly]) -> Vec<Poly> {
    let n = traces.len();
    let mut c: Vec<Poly> = Vec::with_capacity(n);
    for k in 1..=n {
        let mut acc = traces[k - 1].clone();
        for i in 1..k {
            acc = &acc + &(&c[i - 1] * &traces[k - i - 1]);
        }
        c.push((-&acc).div_int(k as i64));
    }
    c
}

/// Inverse Newton recursion from coefficients to power traces:
/// `p_k = -(k c_k + sum_{i=1}^{k-1} c_i p_{k-i})`.
pub fn coeffs_to_traces(coeffs: &[Poly]) -> Vec<Poly> {
    let n = coeffs.len();
    let mut p: Vec<Poly> = Vec::with_capacity(n);
    for k in 1..=n {
        let mut acc = coeffs[k - 1].scale(&ExactComplex::from_int(k as i64));
        for i in 1..k {
            acc = &acc + &(&coeffs[i - 1] * &p[k - i - 1]);
        }
        p.push(-&acc);
    }
    p
}

impl Add for &PolyMatrix {
    type Output = PolyMatrix;
    fn add(self, rhs: &PolyMatrix) -> PolyMatrix {
        assert_eq!((self.nrows(), self.ncols()), (rhs.nrows(), rhs.ncols()));
        PolyMatrix::new(
            self.rows
                .iter()
                .zip(&rhs.rows)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
                .collect(),
        )
    }
}

impl Sub for &PolyMatrix {
    type Output = PolyMatrix;
    fn sub(self, rhs: &PolyMatrix) -> PolyMatrix {
        assert_eq!((self.nrows(), self.ncols()), (rhs.nrows(), rhs.ncols()));
        PolyMatrix::new(
            self.rows
                .iter()
                .zip(&rhs.rows)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
                .collect(),
        )
    }
}

impl Mul for &PolyMatrix {
    type Output = PolyMatrix;
    fn mul(self, rhs: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.ncols(), rhs.nrows(), "dimension mismatch");
        let (r, k, c) = (self.nrows(), self.ncols(), rhs.ncols());
        let mut out = PolyMatrix::zeros(r, c);
        for i in 0..r {
            for j in 0..c {
                let mut acc = Poly::zero();
                for l in 0..k {
                    if self.rows[i][l].is_zero() || rhs.rows[l][j].is_zero() {
                        continue;
                    }
                    acc = &acc + &(&self.rows[i][l] * &rhs.rows[l][j]);
                }
                out.rows[i][j] = acc;
            }
        }
        out
    }
}

impl Neg for &PolyMatrix {
    type Output = PolyMatrix;
    fn neg(self) -> PolyMatrix {
        PolyMatrix::new(
            self.rows
                .iter()
                .map(|r| r.iter().map(|p| -p).collect())
                .collect(),
        )
    }
}

impl std::fmt::Debug for PolyMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "[")?;
        for r in &self.rows {
            writeln!(
                f,
                "  [{}]",
                r.iter().map(|p| p.render("z")).collect::<Vec<_>>().join(", ")
            )?;
        }
        write!(f, "]")
    }
}

impl<'de> Deserialize<'de> for PolyMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<Poly>>::deserialize(deserializer)?;
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(serde::de::Error::custom("ragged matrix"));
        }
        Ok(PolyMatrix { rows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn omega() -> Poly {
        // A stand-in quadratic differential on the chart: z^3 - z.
        Poly::from_ints(&[0, -1, 0, 1])
    }

    #[test]
    fn char_poly_of_twisted_nilpotent_frame() {
        // [[0, w], [1, 0]] has char poly x^2 - w.
        let mut m = PolyMatrix::zeros(2, 2);
        m.set(0, 1, omega());
        m.set(1, 0, Poly::one());
        let c = m.char_poly();
        assert_eq!(c.len(), 2);
        assert!(c[0].is_zero());
        assert_eq!(c[1], -&omega());
    }

    #[test]
    fn char_poly_matches_linear_factor_oracle() {
        // Oracle: product of (x - d_i) for diag(1, 2, -3, 0) expanded by hand
        // gives x^4 - 7x^2 + 6x, so coefficients (0, -7, 6, 0).
        let m = PolyMatrix::from_int_consts(&[
            &[1, 0, 0, 0],
            &[0, 2, 0, 0],
            &[0, 0, -3, 0],
            &[0, 0, 0, 0],
        ]);
        let c = m.char_poly();
        let expect = [0i64, -7, 6, 0];
        for (ck, ek) in c.iter().zip(expect) {
            assert_eq!(ck, &Poly::from_ints(&[ek]));
        }
    }

    #[test]
    fn newton_round_trip_small() {
        // (p_1, p_2) = (0, 2w) corresponds to (c_1, c_2) = (0, -w).
        let traces = vec![Poly::zero(), omega().scale(&ExactComplex::from_int(2))];
        let c = traces_to_coeffs(&traces);
        assert!(c[0].is_zero());
        assert_eq!(c[1], -&omega());
        let back = coeffs_to_traces(&c);
        assert_eq!(back, traces);
    }

    #[test]
    fn exterior_power_diagonal_pair_sums() {
        let m = PolyMatrix::from_int_consts(&[
            &[1, 0, 0, 0],
            &[0, 2, 0, 0],
            &[0, 0, -3, 0],
            &[0, 0, 0, 0],
        ]);
        let w = m.exterior_power(2).unwrap();
        assert_eq!(w.nrows(), 6);
        // Lex order of pairs: {0,1},{0,2},{0,3},{1,2},{1,3},{2,3}.
        let expect = [3i64, -2, 1, -1, 2, -3];
        for (i, e) in expect.iter().enumerate() {
            assert_eq!(w.get(i, i), &Poly::from_ints(&[*e]));
            for j in 0..6 {
                if j != i {
                    assert!(w.get(i, j).is_zero());
                }
            }
        }
    }

    #[test]
    fn exterior_power_edge_cases() {
        let m = PolyMatrix::from_int_consts(&[&[1, 2], &[3, 4]]);
        // k = 1 is the matrix itself, k = n is the trace.
        assert_eq!(m.exterior_power(1).unwrap(), m);
        let top = m.exterior_power(2).unwrap();
        assert_eq!(top.get(0, 0), &m.trace());
    }

    #[test]
    fn exterior_power_trace_is_wedge_trace_of_nonsymmetric() {
        // tr of the induced map on wedge^2 equals (n-1) * tr M for the
        // derivation action: each diagonal entry appears in n-1 pairs.
        let m = PolyMatrix::from_int_consts(&[&[1, 5, 0], &[2, -1, 7], &[0, 3, 4]]);
        let w = m.exterior_power(2).unwrap();
        let expected = m.trace().scale(&ExactComplex::from_int(2));
        assert_eq!(w.trace(), expected);
    }

    #[test]
    fn pfaffian_canonical_and_errors() {
        let mut j = PolyMatrix::zeros(2, 2);
        j.set(0, 1, Poly::one());
        j.set(1, 0, -&Poly::one());
        assert_eq!(j.pfaffian().unwrap(), Poly::one());

        let mut odd = PolyMatrix::zeros(3, 3);
        odd.set(0, 1, Poly::one());
        odd.set(1, 0, -&Poly::one());
        assert!(matches!(odd.pfaffian(), Err(Error::Structure(_))));

        let not_skew = PolyMatrix::from_int_consts(&[&[0, 1], &[1, 0]]);
        assert!(matches!(not_skew.pfaffian(), Err(Error::Structure(_))));
    }

    #[test]
    fn pfaffian_squares_to_det() {
        let a = omega();
        let b = Poly::from_ints(&[2, 1]);
        let c = Poly::from_ints(&[-1, 0, 1]);
        let d = Poly::from_ints(&[3]);
        let e = Poly::from_ints(&[0, 5]);
        let f = Poly::from_ints(&[1, 1, 1]);
        let mut m = PolyMatrix::zeros(4, 4);
        let entries = [(0, 1, a), (0, 2, b), (0, 3, c), (1, 2, d), (1, 3, e), (2, 3, f)];
        for (i, j, p) in entries {
            m.set(i, j, p.clone());
            m.set(j, i, -&p);
        }
        let pf = m.pfaffian().unwrap();
        assert_eq!(&pf * &pf, m.det());
    }

    #[test]
    fn det_bareiss_matches_eval() {
        let m = PolyMatrix::new(vec![
            vec![Poly::from_ints(&[1, 1]), Poly::from_ints(&[0, 2]), Poly::from_ints(&[3])],
            vec![Poly::from_ints(&[-1]), Poly::from_ints(&[4, 0, 1]), Poly::zero()],
            vec![Poly::from_ints(&[0, 1]), Poly::one(), Poly::from_ints(&[2, -1])],
        ]);
        let d = m.det();
        for z in [0i64, 1, -2, 5] {
            let zc = ExactComplex::from_int(z);
            assert_eq!(d.eval(&zc), m.eval(&zc).det());
        }
    }

    #[test]
    fn companion_round_trip() {
        let coeffs = vec![
            Poly::from_ints(&[0, 1]),
            Poly::from_ints(&[-2]),
            Poly::from_ints(&[1, 0, 3]),
        ];
        let c = PolyMatrix::companion(&coeffs);
        assert_eq!(c.char_poly(), coeffs);
    }

    mod newton {
        use super::*;
        use proptest::prelude::*;

        fn square_matrix() -> impl Strategy<Value = PolyMatrix> {
            (1usize..=4).prop_flat_map(|n| {
                proptest::collection::vec(
                    proptest::collection::vec(
                        proptest::collection::vec(-4i64..=4, 0..3)
                            .prop_map(|c| Poly::from_ints(&c)),
                        n,
                    ),
                    n,
                )
                .prop_map(PolyMatrix::new)
            })
        }

        proptest! {
            // Newton's identities tie power traces to characteristic
            // coefficients in both directions; the Faddeev-LeVerrier
            // char_poly and the direct trace powers are independent
            // computations, so agreement pins both conversions.
            #[test]
            fn trace_and_coefficient_conversions_invert(m in square_matrix()) {
                let n = m.nrows();
                let traces = m.power_traces(n);
                let coeffs = m.char_poly();
                prop_assert_eq!(traces_to_coeffs(&traces), coeffs.clone());
                prop_assert_eq!(coeffs_to_traces(&coeffs), traces);
            }
        }
    }
}
