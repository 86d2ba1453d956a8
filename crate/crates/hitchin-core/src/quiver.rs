//! Star-shaped quivers and their doubled (hyperpolygon) data: exact slope
//! stability for representations, the polygon semistability inequality,
//! exact real and complex moment maps, a damped Gauss-Newton solver for
//! moment-map level sets, and the passage from a hyperpolygon point to a
//! parabolic Higgs field with minimal nilpotent residues.

use crate::error::{Error, Result};
use crate::exact::numeric::DEFAULT_TOL;
use crate::exact::{
    deserialize_rational, deserialize_rational_vec, serialize_rational, serialize_rational_vec,
    CMatrix, ExactComplex, PolyMatrix, Rational,
};
use crate::exec;
use crate::parabolic::{
    check_minimal_residues, ParabolicBundle, ParabolicHiggs, ParabolicPoint, ResidueReport,
};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{FromPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// One central vertex of dimension r with n outer vertices of dimension 1,
/// every arrow pointing inward.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarQuiver {
    pub n: usize,
    pub r: usize,
}

impl StarQuiver {
    pub fn new(n: usize, r: usize) -> Result<Self> {
        if n == 0 || r == 0 {
            return Err(Error::domain("star quiver needs n >= 1 arms and r >= 1"));
        }
        Ok(StarQuiver { n, r })
    }

    /// Dimension vector (r, 1, ..., 1), central vertex first.
    pub fn dims(&self) -> Vec<usize> {
        let mut d = vec![1; self.n + 1];
        d[0] = self.r;
        d
    }
}

/// A representation of the star quiver: the arm maps ℂ → ℂʳ, recorded as n
/// column vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuiverRep {
    pub quiver: StarQuiver,
    pub x: Vec<Vec<ExactComplex>>,
}

impl QuiverRep {
    pub fn new(quiver: StarQuiver, x: Vec<Vec<ExactComplex>>) -> Result<Self> {
        let rep = QuiverRep { quiver, x };
        rep.validate()?;
        Ok(rep)
    }

    pub fn validate(&self) -> Result<()> {
        if self.x.len() != self.quiver.n {
            return Err(Error::structure(format!(
                "{} arm vectors for a quiver with {} arms",
                self.x.len(),
                self.quiver.n
            )));
        }
        for (i, xi) in self.x.iter().enumerate() {
            if xi.len() != self.quiver.r {
                return Err(Error::structure(format!(
                    "arm vector {i} has length {}, expected {}",
                    xi.len(),
                    self.quiver.r
                )));
            }
        }
        Ok(())
    }
}

/// Stability parameter: one value for the central vertex, one per arm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Alpha {
    #[serde(serialize_with = "serialize_rational", deserialize_with = "deserialize_rational")]
    pub center: Rational,
    #[serde(
        serialize_with = "serialize_rational_vec",
        deserialize_with = "deserialize_rational_vec"
    )]
    pub arms: Vec<Rational>,
}

impl Alpha {
    pub fn from_ints(center: i64, arms: &[i64]) -> Self {
        Alpha {
            center: Rational::from_integer(BigInt::from(center)),
            arms: arms.iter().map(|&a| Rational::from_integer(BigInt::from(a))).collect(),
        }
    }

    fn check_arms(&self, n: usize) -> Result<()> {
        if self.arms.len() != n {
            return Err(Error::structure(format!(
                "{} arm parameters for {} arms",
                self.arms.len(),
                n
            )));
        }
        Ok(())
    }
}

/// Weighted average of the stability parameter over a dimension vector.
pub fn alpha_slope(dims: &[usize], alpha: &[Rational]) -> Result<Rational> {
    if dims.len() != alpha.len() {
        return Err(Error::structure(format!(
            "{} dimensions against {} parameters",
            dims.len(),
            alpha.len()
        )));
    }
    let total: usize = dims.iter().sum();
    if total == 0 {
        return Err(Error::domain("slope of the zero dimension vector"));
    }
    let mut num = Rational::zero();
    for (d, a) in dims.iter().zip(alpha) {
        num += a * &Rational::from_integer(BigInt::from(*d));
    }
    Ok(num / Rational::from_integer(BigInt::from(total)))
}

/// A destabilizing (or slope-matching) subrepresentation: which arms it
/// keeps and the dimension of its central subspace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubRep {
    pub arms: Vec<usize>,
    pub central_dim: usize,
    #[serde(serialize_with = "serialize_rational", deserialize_with = "deserialize_rational")]
    pub slope: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum QuiverVerdict {
    Stable,
    Semistable { witness: SubRep },
    Unstable { witness: SubRep },
}

impl QuiverVerdict {
    pub fn semistable(&self) -> bool {
        !matches!(self, QuiverVerdict::Unstable { .. })
    }
}

const MAX_ENUM_ARMS: usize = 20;

fn sub_slope(alpha: &Alpha, mask: u32, arm_count: usize, dim0: usize) -> Rational {
    let mut num = &alpha.center * &Rational::from_integer(BigInt::from(dim0));
    let mut total = dim0;
    for i in 0..arm_count {
        if mask & (1 << i) != 0 {
            num += &alpha.arms[i];
            total += 1;
        }
    }
    num / Rational::from_integer(BigInt::from(total))
}

fn span_dim(rep: &QuiverRep, mask: u32) -> usize {
    let r = rep.quiver.r;
    let cols: Vec<usize> = (0..rep.quiver.n).filter(|i| mask & (1 << i) != 0).collect();
    if cols.is_empty() {
        return 0;
    }
    let rows: Vec<Vec<ExactComplex>> = (0..r)
        .map(|a| cols.iter().map(|&i| rep.x[i][a].clone()).collect())
        .collect();
    CMatrix::new(rows).rank()
}

fn witness_from(mask: u32, arm_count: usize, dim0: usize, slope: Rational) -> SubRep {
    SubRep {
        arms: (0..arm_count).filter(|i| mask & (1 << i) != 0).collect(),
        central_dim: dim0,
        slope,
    }
}

/// Slope stability of a star-quiver representation against proper nonzero
/// subrepresentations.
///
/// For a fixed arm set S the slope of an admissible subrepresentation only
/// depends on the dimension of its central subspace, and as a function of
/// that dimension it is monotone, so the maximum over all subrepresentations
/// is attained either at the span of the kept arm vectors or at the full
/// central space. Enumerating both fillings for every S is therefore
/// exhaustive.
pub fn star_stability(rep: &QuiverRep, alpha: &Alpha) -> Result<QuiverVerdict> {
    star_stability_impl(rep, alpha, true)
}

/// Always-sequential variant, for benchmarking against the parallel path.
pub fn star_stability_seq(rep: &QuiverRep, alpha: &Alpha) -> Result<QuiverVerdict> {
    star_stability_impl(rep, alpha, false)
}

fn star_stability_impl(rep: &QuiverRep, alpha: &Alpha, parallel: bool) -> Result<QuiverVerdict> {
    rep.validate()?;
    alpha.check_arms(rep.quiver.n)?;
    let n = rep.quiver.n;
    let r = rep.quiver.r;
    if n > MAX_ENUM_ARMS {
        return Err(Error::config(format!(
            "subset enumeration over {n} arms exceeds the {MAX_ENUM_ARMS}-arm limit"
        )));
    }
    let masks: Vec<u32> = (0..(1u32 << n)).collect();
    let candidates_for = |mask: &u32| -> Vec<(Rational, u32, usize)> {
        let mask = *mask;
        let arm_count = mask.count_ones() as usize;
        let span = span_dim(rep, mask);
        let mut out = Vec::new();
        for dim0 in [span, r] {
            if dim0 == r && out.iter().any(|(_, _, d)| *d == r) {
                continue;
            }
            if dim0 + arm_count == 0 {
                continue; // the zero subrepresentation carries no slope
            }
            if dim0 == r && arm_count == n {
                continue; // the full representation is not a proper sub
            }
            out.push((sub_slope(alpha, mask, n, dim0), mask, dim0));
        }
        out
    };
    let per_mask = if parallel {
        exec::map_slice(&masks, candidates_for)
    } else {
        exec::map_slice_seq(&masks, candidates_for)
    };
    let mut best: Option<(Rational, u32, usize)> = None;
    for cand in per_mask.into_iter().flatten() {
        let better = match &best {
            None => true,
            Some((s, _, _)) => cand.0 > *s,
        };
        if better {
            best = Some(cand);
        }
    }
    let (slope, mask, dim0) = best.expect("a star quiver always has a proper subrepresentation");
    let full = vec![alpha.center.clone()]
        .into_iter()
        .chain(alpha.arms.iter().cloned())
        .collect::<Vec<_>>();
    let total = alpha_slope(&rep.quiver.dims(), &full)?;
    Ok(if slope > total {
        QuiverVerdict::Unstable { witness: witness_from(mask, n, dim0, slope) }
    } else if slope == total {
        QuiverVerdict::Semistable { witness: witness_from(mask, n, dim0, slope) }
    } else {
        QuiverVerdict::Stable
    })
}

/// Reference verdict that walks every admissible central dimension for every
/// arm subset instead of only the two extremes. Used to cross-check
/// `star_stability`; slower but independent of the monotonicity argument.
pub fn star_stability_oracle(rep: &QuiverRep, alpha: &Alpha) -> Result<QuiverVerdict> {
    rep.validate()?;
    alpha.check_arms(rep.quiver.n)?;
    let n = rep.quiver.n;
    let r = rep.quiver.r;
    if n > MAX_ENUM_ARMS {
        return Err(Error::config("too many arms for the oracle"));
    }
    let mut best: Option<(Rational, u32, usize)> = None;
    for mask in 0..(1u32 << n) {
        let arm_count = mask.count_ones() as usize;
        let span = span_dim(rep, mask);
        for dim0 in span..=r {
            if dim0 + arm_count == 0 || (dim0 == r && arm_count == n) {
                continue;
            }
            let s = sub_slope(alpha, mask, n, dim0);
            let better = match &best {
                None => true,
                Some((bs, _, _)) => s > *bs,
            };
            if better {
                best = Some((s, mask, dim0));
            }
        }
    }
    let (slope, mask, dim0) = best.expect("nonempty candidate set");
    let full = vec![alpha.center.clone()]
        .into_iter()
        .chain(alpha.arms.iter().cloned())
        .collect::<Vec<_>>();
    let total = alpha_slope(&rep.quiver.dims(), &full)?;
    Ok(if slope > total {
        QuiverVerdict::Unstable { witness: witness_from(mask, n, dim0, slope) }
    } else if slope == total {
        QuiverVerdict::Semistable { witness: witness_from(mask, n, dim0, slope) }
    } else {
        QuiverVerdict::Stable
    })
}

/// A labeled point of the projective line: a chart value or the point at
/// infinity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum P1Point {
    #[serde(rename = "finite")]
    Finite { value: ExactComplex },
    #[serde(rename = "infinity")]
    Infinity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PolygonVerdict {
    Stable,
    Semistable,
    Unstable,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusterCheck {
    pub representative: P1Point,
    pub weight_at: u64,
    pub weight_away: u64,
    pub satisfied: bool,
    pub tight: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolygonReport {
    pub verdict: PolygonVerdict,
    pub semistable: bool,
    pub clusters: Vec<ClusterCheck>,
}

/// Weighted point configurations on the projective line: at every
/// coincidence cluster the weight sitting there must not exceed the weight
/// everywhere else. Strict inequalities at all clusters give a stable
/// configuration; an equality somewhere makes it strictly semistable.
pub fn polygon_semistable_points(points: &[P1Point], weights: &[u64]) -> Result<PolygonReport> {
    if points.is_empty() {
        return Err(Error::domain("need at least one labeled point"));
    }
    if points.len() != weights.len() {
        return Err(Error::structure(format!(
            "{} points against {} weights",
            points.len(),
            weights.len()
        )));
    }
    if weights.iter().any(|&w| w == 0) {
        return Err(Error::domain("weights must be positive"));
    }
    let total: u64 = weights.iter().sum();
    let mut clusters: Vec<ClusterCheck> = Vec::new();
    let mut seen: Vec<&P1Point> = Vec::new();
    for (p, _) in points.iter().zip(weights) {
        if seen.contains(&p) {
            continue;
        }
        seen.push(p);
        let weight_at: u64 = points
            .iter()
            .zip(weights)
            .filter(|(q, _)| *q == p)
            .map(|(_, w)| *w)
            .sum();
        let weight_away = total - weight_at;
        clusters.push(ClusterCheck {
            representative: p.clone(),
            weight_at,
            weight_away,
            satisfied: weight_at <= weight_away,
            tight: weight_at == weight_away,
        });
    }
    let semistable = clusters.iter().all(|c| c.satisfied);
    let verdict = if !semistable {
        PolygonVerdict::Unstable
    } else if clusters.iter().any(|c| c.tight) {
        PolygonVerdict::Semistable
    } else {
        PolygonVerdict::Stable
    };
    Ok(PolygonReport { verdict, semistable, clusters })
}

/// Doubled-quiver data: the arm maps x_i (columns), the return maps y_i
/// (rows), and the stability parameter the point is meant for.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperpolygonPoint {
    pub quiver: StarQuiver,
    pub x: Vec<Vec<ExactComplex>>,
    pub y: Vec<Vec<ExactComplex>>,
    pub alpha: Alpha,
}

impl HyperpolygonPoint {
    pub fn new(
        quiver: StarQuiver,
        x: Vec<Vec<ExactComplex>>,
        y: Vec<Vec<ExactComplex>>,
        alpha: Alpha,
    ) -> Result<Self> {
        let p = HyperpolygonPoint { quiver, x, y, alpha };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        QuiverRep { quiver: self.quiver, x: self.x.clone() }.validate()?;
        if self.y.len() != self.quiver.n {
            return Err(Error::structure(format!(
                "{} return vectors for {} arms",
                self.y.len(),
                self.quiver.n
            )));
        }
        for (i, yi) in self.y.iter().enumerate() {
            if yi.len() != self.quiver.r {
                return Err(Error::structure(format!(
                    "return vector {i} has length {}, expected {}",
                    yi.len(),
                    self.quiver.r
                )));
            }
        }
        self.alpha.check_arms(self.quiver.n)
    }
}

/// Values of the two moment maps, exact in the input data.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentValues {
    /// Trace-free part of xx* - y*y.
    pub real_matrix: CMatrix,
    /// |x_i|^2 - |y_i|^2 per arm.
    #[serde(serialize_with = "serialize_rational_vec")]
    pub real_scalars: Vec<Rational>,
    /// Trace-free part of xy.
    pub complex_matrix: CMatrix,
    /// y_i x_i per arm.
    pub complex_scalars: Vec<ExactComplex>,
}

pub fn moment_maps(p: &HyperpolygonPoint) -> Result<MomentValues> {
    p.validate()?;
    let r = p.quiver.r;
    let n = p.quiver.n;
    let mut real = CMatrix::zeros(r, r);
    let mut complex = CMatrix::zeros(r, r);
    let mut real_scalars = Vec::with_capacity(n);
    let mut complex_scalars = Vec::with_capacity(n);
    for i in 0..n {
        let xi = &p.x[i];
        let yi = &p.y[i];
        for a in 0..r {
            for b in 0..r {
                let hermitian = &(&xi[a] * &xi[b].conj()) - &(&yi[a].conj() * &yi[b]);
                real.set(a, b, real.get(a, b) + &hermitian);
                let holo = &xi[a] * &yi[b];
                complex.set(a, b, complex.get(a, b) + &holo);
            }
        }
        let mut norm = Rational::zero();
        let mut scalar = ExactComplex::zero();
        for a in 0..r {
            norm += xi[a].norm_sqr() - yi[a].norm_sqr();
            scalar = &scalar + &(&yi[a] * &xi[a]);
        }
        real_scalars.push(norm);
        complex_scalars.push(scalar);
    }
    Ok(MomentValues {
        real_matrix: real.trace_free_part(),
        real_scalars,
        complex_matrix: complex.trace_free_part(),
        complex_scalars,
    })
}

const SOLVER_MAX_ITERS: usize = 10_000;
const SOLVER_MAX_ATTEMPTS: usize = 8;

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub point: HyperpolygonPoint,
    pub residual: f64,
    pub iterations: usize,
    pub attempts: usize,
}

fn unpack(v: &[f64], n: usize, r: usize) -> (Vec<Complex64>, Vec<Complex64>) {
    let xs: Vec<Complex64> = (0..n * r).map(|i| Complex64::new(v[2 * i], v[2 * i + 1])).collect();
    let off = 2 * n * r;
    let ys: Vec<Complex64> =
        (0..n * r).map(|i| Complex64::new(v[off + 2 * i], v[off + 2 * i + 1])).collect();
    (xs, ys)
}

fn level_residual(v: &[f64], n: usize, r: usize, arms: &[f64]) -> Vec<f64> {
    let (xs, ys) = unpack(v, n, r);
    let xi = |i: usize, a: usize| xs[i * r + a];
    let yi = |i: usize, a: usize| ys[i * r + a];
    let mut out = Vec::with_capacity(4 * r * r + 3 * n);
    let mut herm = vec![Complex64::new(0.0, 0.0); r * r];
    let mut holo = vec![Complex64::new(0.0, 0.0); r * r];
    for i in 0..n {
        for a in 0..r {
            for b in 0..r {
                herm[a * r + b] += xi(i, a) * xi(i, b).conj() - yi(i, a).conj() * yi(i, b);
                holo[a * r + b] += xi(i, a) * yi(i, b);
            }
        }
    }
    let rf = r as f64;
    let herm_tr: Complex64 = (0..r).map(|a| herm[a * r + a]).sum();
    let holo_tr: Complex64 = (0..r).map(|a| holo[a * r + a]).sum();
    for a in 0..r {
        for b in 0..r {
            let mut h = herm[a * r + b];
            let mut c = holo[a * r + b];
            if a == b {
                h -= herm_tr / rf;
                c -= holo_tr / rf;
            }
            out.push(h.re);
            out.push(h.im);
            out.push(c.re);
            out.push(c.im);
        }
    }
    for i in 0..n {
        let mut norm = 0.0;
        let mut scalar = Complex64::new(0.0, 0.0);
        for a in 0..r {
            norm += xi(i, a).norm_sqr() - yi(i, a).norm_sqr();
            scalar += yi(i, a) * xi(i, a);
        }
        out.push(norm - arms[i]);
        out.push(scalar.re);
        out.push(scalar.im);
    }
    out
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Dense LU solve with partial pivoting; small systems only.
fn lu_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let (pivot, pval) = (col..n)
            .map(|row| (row, a[row][col].abs()))
            .fold((col, -1.0), |acc, c| if c.1 > acc.1 { c } else { acc });
        if pval < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut s = b[col];
        for k in col + 1..n {
            s -= a[col][k] * x[k];
        }
        x[col] = s / a[col][col];
    }
    Some(x)
}

struct Attempt {
    v: Vec<f64>,
    residual: f64,
    iterations: usize,
    converged: bool,
}

fn gauss_newton(
    mut v: Vec<f64>,
    n: usize,
    r: usize,
    arms: &[f64],
    budget: usize,
) -> Attempt {
    let p = v.len();
    let mut f = level_residual(&v, n, r, arms);
    let mut fnorm = norm2(&f);
    let mut lambda = 1e-3;
    let mut iterations = 0;
    while iterations < budget {
        if fnorm <= DEFAULT_TOL {
            return Attempt { v, residual: fnorm, iterations, converged: true };
        }
        iterations += 1;
        // Forward-difference Jacobian, column by column.
        let m = f.len();
        let mut jt = vec![vec![0.0; m]; p];
        for j in 0..p {
            let h = 1e-7 * (1.0 + v[j].abs());
            let mut vj = v.clone();
            vj[j] += h;
            let fj = level_residual(&vj, n, r, arms);
            for k in 0..m {
                jt[j][k] = (fj[k] - f[k]) / h;
            }
        }
        let mut gram = vec![vec![0.0; p]; p];
        let mut grad = vec![0.0; p];
        for a in 0..p {
            for b in a..p {
                let s: f64 = (0..m).map(|k| jt[a][k] * jt[b][k]).sum();
                gram[a][b] = s;
                gram[b][a] = s;
            }
            grad[a] = (0..m).map(|k| jt[a][k] * f[k]).sum();
        }
        let mut accepted = false;
        for _ in 0..40 {
            let mut damped = gram.clone();
            for d in 0..p {
                damped[d][d] += lambda;
            }
            let rhs: Vec<f64> = grad.iter().map(|g| -g).collect();
            if let Some(step) = lu_solve(damped, rhs) {
                let v2: Vec<f64> = v.iter().zip(&step).map(|(a, s)| a + s).collect();
                let f2 = level_residual(&v2, n, r, arms);
                let f2norm = norm2(&f2);
                if f2norm < fnorm {
                    v = v2;
                    f = f2;
                    fnorm = f2norm;
                    lambda = (lambda / 10.0).max(1e-14);
                    accepted = true;
                    break;
                }
            }
            lambda = (lambda * 10.0).min(1e14);
        }
        if !accepted {
            break; // stalled on this start
        }
    }
    Attempt { v, residual: fnorm, iterations, converged: fnorm <= DEFAULT_TOL }
}

fn f64_to_exact(x: f64) -> Rational {
    Rational::from_f64(x).expect("finite solver iterate")
}

/// Seeded multistart Gauss-Newton search for a point on the moment-map
/// level set: trace-free blocks at zero, arm scalars of the real map at the
/// given parameters. Deterministic for a fixed seed.
pub fn solve_level_set(quiver: &StarQuiver, alpha: &Alpha, seed: u64) -> Result<SolveReport> {
    alpha.check_arms(quiver.n)?;
    let n = quiver.n;
    let r = quiver.r;
    let arms: Vec<f64> = alpha
        .arms
        .iter()
        .map(|a| crate::exact::rational_to_f64(a))
        .collect();
    let mut total_iters = 0usize;
    let mut best = f64::INFINITY;
    for attempt in 0..SOLVER_MAX_ATTEMPTS {
        let budget = (SOLVER_MAX_ITERS - total_iters).min(SOLVER_MAX_ITERS / 4);
        if budget == 0 {
            break;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(
            seed.wrapping_add((attempt as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
        );
        let mut v = vec![0.0; 4 * n * r];
        for i in 0..n {
            // Bias the start toward the arm scalar constraints: positive
            // parameters want mass on x, negative on y.
            let target = arms[i];
            let xs = target.max(0.0).sqrt().max(0.1);
            let ys = (-target).max(0.0).sqrt().max(0.1);
            for a in 0..r {
                v[2 * (i * r + a)] = xs * rng.gen_range(-1.0..1.0);
                v[2 * (i * r + a) + 1] = xs * rng.gen_range(-1.0..1.0);
                v[2 * (n * r + i * r + a)] = ys * rng.gen_range(-1.0..1.0);
                v[2 * (n * r + i * r + a) + 1] = ys * rng.gen_range(-1.0..1.0);
            }
        }
        let run = gauss_newton(v, n, r, &arms, budget);
        total_iters += run.iterations;
        best = best.min(run.residual);
        if run.converged {
            let (xs, ys) = unpack(&run.v, n, r);
            let to_vecs = |vals: &[Complex64]| -> Vec<Vec<ExactComplex>> {
                (0..n)
                    .map(|i| {
                        (0..r)
                            .map(|a| {
                                let z = vals[i * r + a];
                                ExactComplex::new(f64_to_exact(z.re), f64_to_exact(z.im))
                            })
                            .collect()
                    })
                    .collect()
            };
            let point = HyperpolygonPoint::new(*quiver, to_vecs(&xs), to_vecs(&ys), alpha.clone())?;
            return Ok(SolveReport {
                point,
                residual: run.residual,
                iterations: total_iters,
                attempts: attempt + 1,
            });
        }
    }
    Err(Error::numeric(
        format!("level-set search did not reach {DEFAULT_TOL:e} within {total_iters} iterations"),
        best,
    ))
}

/// Result of turning a hyperpolygon point into a parabolic Higgs field on
/// the trivial bundle: simple poles at the marked points with residues
/// x_i y_i, plus the nilpotency report and the closure check at infinity.
#[derive(Clone, Debug, Serialize)]
pub struct HiggsConstruction {
    pub higgs: ParabolicHiggs,
    pub residue_report: ResidueReport,
    pub residues_sum_zero: bool,
    pub sum_residue_norm: f64,
}

fn frobenius_norm(m: &CMatrix) -> f64 {
    let mut s = 0.0;
    for a in 0..m.nrows() {
        for b in 0..m.ncols() {
            s += crate::exact::rational_to_f64(&m.get(a, b).norm_sqr());
        }
    }
    s.sqrt()
}

/// Canonical flag data used for the constructed bundle: a one-dimensional
/// flag step of weight 1/2 over a zero-weight complement.
fn canonical_point(rank: usize, at: ExactComplex) -> Result<ParabolicPoint> {
    let half = Rational::new(BigInt::from(1), BigInt::from(2));
    if rank == 1 {
        ParabolicPoint::new(at, vec![1], vec![half])
    } else {
        ParabolicPoint::new(at, vec![1, rank - 1], vec![half, Rational::zero()])
    }
}

/// Build the parabolic Higgs field with residue x_i y_i at each marked
/// point. Precondition: the scalar parts of the complex moment map vanish
/// (within `tol` for approximate points, exactly for exact ones); the
/// matrix part is not required to vanish but its failure is reported, since
/// a nonzero residue sum obstructs extending the field over infinity.
pub fn hyperpolygon_to_higgs(
    p: &HyperpolygonPoint,
    marked_points: &[ExactComplex],
    tol: f64,
) -> Result<HiggsConstruction> {
    p.validate()?;
    let n = p.quiver.n;
    let r = p.quiver.r;
    if marked_points.len() != n {
        return Err(Error::structure(format!(
            "{} marked points for {} arms",
            marked_points.len(),
            n
        )));
    }
    for i in 0..n {
        for j in 0..i {
            if marked_points[i] == marked_points[j] {
                return Err(Error::domain(format!(
                    "marked points must be distinct, {} repeats",
                    marked_points[i]
                )));
            }
        }
    }
    for i in 0..n {
        let mut scalar = ExactComplex::zero();
        for a in 0..r {
            scalar = &scalar + &(&p.y[i][a] * &p.x[i][a]);
        }
        let size = scalar.to_f64().norm();
        if size > tol {
            return Err(Error::domain(format!(
                "complex moment scalar at arm {i} is {scalar} (|.| = {size:.3e}), not zero within {tol:e}"
            )));
        }
    }
    let mut residues = Vec::with_capacity(n);
    let mut sum = CMatrix::zeros(r, r);
    for i in 0..n {
        let mut res = CMatrix::zeros(r, r);
        for a in 0..r {
            for b in 0..r {
                res.set(a, b, &p.x[i][a] * &p.y[i][b]);
            }
        }
        sum = &sum + &res;
        residues.push(res);
    }
    let points: Result<Vec<ParabolicPoint>> = marked_points
        .iter()
        .map(|z| canonical_point(r, z.clone()))
        .collect();
    let bundle = ParabolicBundle::new(r, 0, points?)?;
    let higgs = ParabolicHiggs::new(bundle, residues, PolyMatrix::zeros(r, r))?;
    let residue_report = check_minimal_residues(&higgs);
    let sum_residue_norm = frobenius_norm(&sum);
    Ok(HiggsConstruction {
        higgs,
        residue_report,
        residues_sum_zero: sum_residue_norm <= tol,
        sum_residue_norm,
    })
}
