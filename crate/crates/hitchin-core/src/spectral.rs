//! Spectral curves attached to chart-level pairs: coefficient data with
//! degree bounds, exact shape diagnostics (sheet involution, eta-power
//! factors, perfect squares), the quotient construction for involution
//! curves, and a numeric sheet-monodromy engine that certifies transitivity
//! by continuing root branches around the discriminant zeros.

use crate::error::{Error, Result};
use crate::exact::numeric::{poly_roots, poly_roots_from};
use crate::exact::{ExactComplex, Poly, PolyMatrix};
use crate::exec;
use crate::formulas;
use crate::higgs::HiggsPair;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Exact shape evidence read off the coefficient list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeFlags {
    /// All odd-index coefficients vanish: the curve is invariant under
    /// negating the tautological coordinate.
    pub has_involution: bool,
    /// Largest q with a_n = ... = a_{n-q+1} = 0: the characteristic
    /// polynomial is divisible by the q-th power of the coordinate.
    pub eta_power_factor: usize,
    /// The characteristic polynomial is an exact square.
    pub is_perfect_square: bool,
}

/// An n-sheeted spectral curve on a chart: `coeffs[i-1]` is the coefficient
/// `a_i` of `eta^{n-i}`, a section of the i-th power of the twist, with
/// declared degree bound `twist_degrees[i-1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralCurve {
    pub n: usize,
    pub coeffs: Vec<Poly>,
    pub twist_degrees: Vec<i64>,
    pub shape: ShapeFlags,
}

impl SpectralCurve {
    /// Build and validate: one coefficient and degree bound per sheet index,
    /// and every coefficient degree within its bound.
    pub fn new(coeffs: Vec<Poly>, twist_degrees: Vec<i64>) -> Result<Self> {
        let n = coeffs.len();
        if n == 0 {
            return Err(Error::domain("a spectral curve needs at least one coefficient"));
        }
        if twist_degrees.len() != n {
            return Err(Error::domain(format!(
                "expected {} twist degrees, got {}",
                n,
                twist_degrees.len()
            )));
        }
        for (i, (c, bound)) in coeffs.iter().zip(&twist_degrees).enumerate() {
            if let Some(d) = c.degree() {
                if (d as i64) > *bound {
                    return Err(Error::geometry(format!(
                        "coefficient a_{} has degree {} exceeding its bound {}",
                        i + 1,
                        d,
                        bound
                    )));
                }
            }
        }
        let shape = compute_shape(&coeffs);
        Ok(SpectralCurve { n, coeffs, twist_degrees, shape })
    }

    /// Ascending coefficients (in the tautological coordinate) of the fibre
    /// polynomial `eta^n + a_1 eta^{n-1} + ... + a_n`.
    pub fn fibre_poly(&self) -> Vec<Poly> {
        let n = self.n;
        let mut f = vec![Poly::zero(); n + 1];
        f[n] = Poly::one();
        for (i, a) in self.coeffs.iter().enumerate() {
            f[n - 1 - i] = a.clone();
        }
        f
    }
}

fn compute_shape(coeffs: &[Poly]) -> ShapeFlags {
    let has_involution = coeffs
        .iter()
        .enumerate()
        .all(|(idx, c)| (idx + 1) % 2 == 0 || c.is_zero());
    let eta_power_factor = coeffs.iter().rev().take_while(|c| c.is_zero()).count();
    ShapeFlags {
        has_involution,
        eta_power_factor,
        is_perfect_square: exact_square_root(coeffs).is_some(),
    }
}

/// Try to write `eta^n + a_1 eta^{n-1} + ... + a_n` as the exact square of a
/// monic half-degree polynomial; returns its coefficients on success.
/// The candidate is forced term by term (dividing by 2 is exact) and then
/// verified against the full product.
pub fn exact_square_root(coeffs: &[Poly]) -> Option<Vec<Poly>> {
    let n = coeffs.len();
    if n == 0 || n % 2 != 0 {
        return None;
    }
    let m = n / 2;
    let half = ExactComplex::from_ratio(1, 2);
    let mut b: Vec<Poly> = Vec::with_capacity(m);
    for k in 1..=m {
        // Coefficient of eta^{2m-k}: a_k = 2 b_k + sum_{i=1}^{k-1} b_i b_{k-i}.
        let mut acc = coeffs[k - 1].clone();
        for i in 1..k {
            acc = &acc - &(&b[i - 1] * &b[k - i - 1]);
        }
        b.push(acc.scale(&half));
    }
    // Verify the remaining coefficients a_{m+1}..a_{2m}.
    for k in m + 1..=n {
        let mut acc = Poly::zero();
        for i in k - m..=m {
            // b_i b_{k-i} with both indices in 1..=m.
            acc = &acc + &(&b[i - 1] * &b[k - i - 1]);
        }
        if acc != coeffs[k - 1] {
            return None;
        }
    }
    Some(b)
}

/// Extract the spectral curve of a pair. Degree bounds come from the pair's
/// twist degree; exceeding them is a geometry error.
pub fn from_higgs(pair: &HiggsPair) -> Result<SpectralCurve> {
    let coeffs = pair.entries.char_poly();
    let twist_degrees = (1..=pair.n as i64).map(|i| i * pair.twist_degree).collect();
    SpectralCurve::new(coeffs, twist_degrees)
}

/// Coefficient list (a_1..a_n) of a product of monic fibre polynomials,
/// each factor given by its own (a_1..a_k) list. Used to build curves with
/// known reducible structure.
pub fn monic_eta_product(factors: &[Vec<Poly>]) -> Vec<Poly> {
    let mut acc = vec![Poly::one()]; // descending coefficients, monic
    for f in factors {
        let mut fd = vec![Poly::one()];
        fd.extend(f.iter().cloned());
        let mut out = vec![Poly::zero(); acc.len() + fd.len() - 1];
        for (i, a) in acc.iter().enumerate() {
            for (j, b) in fd.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        acc = out;
    }
    acc.remove(0);
    acc
}

/// Classification outcome for a curve's place in the base.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum Diagnosis {
    #[serde(rename = "generic")]
    Generic { has_involution: bool },
    #[serde(rename = "split_torsion_locus")]
    SplitTorsionLocus { torsion_count: u128 },
    #[serde(rename = "reducible_by_shape")]
    ReducibleByShape { reason: String },
}

/// Shape-level classification: reducible when an eta power divides or the
/// polynomial is a perfect square, generic otherwise with the involution
/// noted. Count-level refinement of the involution case lives in
/// [`split_locus`].
pub fn classify(curve: &SpectralCurve) -> Diagnosis {
    let s = &curve.shape;
    if s.eta_power_factor >= 1 {
        return Diagnosis::ReducibleByShape {
            reason: format!(
                "characteristic polynomial is divisible by eta^{}",
                s.eta_power_factor
            ),
        };
    }
    if s.is_perfect_square {
        return Diagnosis::ReducibleByShape {
            reason: "characteristic polynomial is an exact square".to_string(),
        };
    }
    Diagnosis::Generic { has_involution: s.has_involution }
}

/// For a generic involution curve over a genus-g base, the split-form locus
/// meets the fibre in its order-two points; report how many.
pub fn split_locus(curve: &SpectralCurve, genus: u64) -> Result<Diagnosis> {
    match classify(curve) {
        Diagnosis::ReducibleByShape { reason } => Err(Error::domain(format!(
            "split locus needs an irreducible-shape curve ({reason})"
        ))),
        Diagnosis::Generic { has_involution: false } => Err(Error::domain(
            "split locus needs the sheet involution (odd coefficients must vanish)",
        )),
        _ => {
            let gs = formulas::spectral_genus(curve.n as u64, genus)?;
            let prym_dim = gs - genus;
            Ok(Diagnosis::SplitTorsionLocus {
                torsion_count: formulas::torsion_two_count(prym_dim)?,
            })
        }
    }
}

/// Quotient of an involution curve by the sheet involution: substitute
/// `xi = eta^2`, halving the sheet count and doubling the twist degrees.
pub fn quotient_curve_upp(curve: &SpectralCurve) -> Result<SpectralCurve> {
    if !curve.shape.has_involution {
        return Err(Error::structure(
            "quotient needs the sheet involution (odd coefficients must vanish)",
        ));
    }
    if curve.n % 2 != 0 {
        return Err(Error::domain("quotient needs an even number of sheets"));
    }
    let p = curve.n / 2;
    let coeffs: Vec<Poly> = (1..=p).map(|j| curve.coeffs[2 * j - 1].clone()).collect();
    let twist_degrees: Vec<i64> = (1..=p).map(|j| curve.twist_degrees[2 * j - 1]).collect();
    SpectralCurve::new(coeffs, twist_degrees)
}

/// Substitute `xi = eta^2` back into a quotient curve's coefficients,
/// reproducing a full involution coefficient list. Inverse check for
/// [`quotient_curve_upp`].
pub fn resubstitute_quotient(quotient: &SpectralCurve) -> Vec<Poly> {
    let p = quotient.n;
    let mut out = vec![Poly::zero(); 2 * p];
    for j in 1..=p {
        out[2 * j - 1] = quotient.coeffs[j - 1].clone();
    }
    out
}

/// Exact discriminant (in the chart coordinate) of the fibre polynomial with
/// respect to the tautological coordinate, via a fraction-free Sylvester
/// determinant.
pub fn discriminant(curve: &SpectralCurve) -> Poly {
    let n = curve.n;
    if n == 1 {
        return Poly::one();
    }
    let f = curve.fibre_poly();
    let fp: Vec<Poly> = (1..=n)
        .map(|k| f[k].scale(&ExactComplex::from_int(k as i64)))
        .collect();
    // Sylvester matrix of (f, f'): (2n-1) square, first n-1 rows carry f
    // descending, the next n rows carry f' descending.
    let size = 2 * n - 1;
    let mut s = PolyMatrix::zeros(size, size);
    for row in 0..n - 1 {
        for (t, k) in (0..=n).rev().enumerate() {
            s.set(row, row + t, f[k].clone());
        }
    }
    for row in 0..n {
        for (t, k) in (0..n).rev().enumerate() {
            s.set(n - 1 + row, row + t, fp[k].clone());
        }
    }
    let res = s.det();
    // disc = (-1)^{n(n-1)/2} Res(f, f') for monic f.
    if (n * (n - 1) / 2) % 2 == 1 {
        -&res
    } else {
        res
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum MonodromyOutcome {
    #[serde(rename = "transitive")]
    Transitive,
    #[serde(rename = "intransitive")]
    Intransitive { orbits: Vec<Vec<usize>> },
    #[serde(rename = "inconclusive")]
    Inconclusive { reason: String },
}

/// Full record of a monodromy run: loop parameters are included so a run can
/// be reproduced bit for bit.
#[derive(Clone, Debug, Serialize)]
pub struct MonodromyReport {
    pub outcome: MonodromyOutcome,
    pub base_point: [f64; 2],
    pub branch_points: Vec<[f64; 2]>,
    pub loop_radii: Vec<f64>,
    pub steps_per_loop: usize,
    /// One permutation per branch point, in image form: sheet i is carried
    /// to `perm[i]` by the counterclockwise loop.
    pub permutations: Vec<Vec<usize>>,
    pub infinity_permutation: Vec<usize>,
    /// The composite of the branch-point loops (ordered by tail angle)
    /// equals the loop around infinity.
    pub product_relation_ok: bool,
}

const STEPS_PER_LOOP: usize = 64;
const INFINITY_STEPS: usize = 256;

/// Sheet monodromy with the batch over branch points run through the
/// configured execution strategy.
pub fn monodromy_transitive(curve: &SpectralCurve) -> Result<MonodromyReport> {
    monodromy_impl(curve, true)
}

/// Always-sequential variant, for benchmarking against the parallel path.
pub fn monodromy_transitive_seq(curve: &SpectralCurve) -> Result<MonodromyReport> {
    monodromy_impl(curve, false)
}

fn empty_report(outcome: MonodromyOutcome) -> MonodromyReport {
    MonodromyReport {
        outcome,
        base_point: [0.0, 0.0],
        branch_points: Vec::new(),
        loop_radii: Vec::new(),
        steps_per_loop: STEPS_PER_LOOP,
        permutations: Vec::new(),
        infinity_permutation: Vec::new(),
        product_relation_ok: true,
    }
}

fn monodromy_impl(curve: &SpectralCurve, parallel: bool) -> Result<MonodromyReport> {
    let n = curve.n;
    if n == 1 {
        let mut r = empty_report(MonodromyOutcome::Transitive);
        r.infinity_permutation = vec![0];
        r.permutations = Vec::new();
        return Ok(r);
    }
    let disc = discriminant(curve);
    if disc.is_zero() {
        return Ok(empty_report(MonodromyOutcome::Inconclusive {
            reason: "discriminant vanishes identically (repeated spectral component)".to_string(),
        }));
    }
    let fibre: Vec<Vec<Complex64>> = curve
        .fibre_poly()
        .iter()
        .map(|p| p.to_f64_coeffs())
        .collect();
    if disc.is_constant() {
        // No branch points at all: every sheet is globally defined.
        let orbits: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        let mut r = empty_report(MonodromyOutcome::Intransitive { orbits });
        r.infinity_permutation = (0..n).collect();
        return Ok(r);
    }

    let raw_roots = poly_roots(&disc.to_f64_coeffs());
    let scale = 1.0 + raw_roots.iter().map(|r| r.norm()).fold(0.0, f64::max);
    let reps = cluster(&raw_roots, 1e-7 * scale);
    for i in 0..reps.len() {
        for j in 0..i {
            if (reps[i] - reps[j]).norm() < 1e-5 * scale {
                return Ok(empty_report(MonodromyOutcome::Inconclusive {
                    reason: format!(
                        "branch points {} and {} closer than the step resolution",
                        fmt_c(reps[j]),
                        fmt_c(reps[i])
                    ),
                }));
            }
        }
    }
    let rmax = reps.iter().map(|r| r.norm()).fold(0.0, f64::max);
    let base = Complex64::new(2.0 * rmax.max(1.0), 0.0);
    let base_roots = match sheets_at(&fibre, base, None) {
        Ok(r) => r,
        Err(reason) => {
            return Ok(empty_report(MonodromyOutcome::Inconclusive {
                reason: format!("at the base point: {reason}"),
            }))
        }
    };

    let radii: Vec<f64> = reps
        .iter()
        .enumerate()
        .map(|(k, z)| {
            let nearest_other = reps
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, w)| (z - w).norm())
                .fold(f64::INFINITY, f64::min);
            0.25 * nearest_other.min((z - base).norm())
        })
        .collect();

    let comb = match build_comb(&reps, &radii, base) {
        Some(c) => c,
        None => {
            let mut rep = empty_report(MonodromyOutcome::Inconclusive {
                reason: "no tail direction clears every branch disk".to_string(),
            });
            rep.base_point = [base.re, base.im];
            rep.branch_points = reps.iter().map(|z| [z.re, z.im]).collect();
            rep.loop_radii = radii;
            return Ok(rep);
        }
    };

    let run_loop = |k: &usize| -> std::result::Result<Vec<usize>, String> {
        let k = *k;
        let path = loop_path(&comb, k, &reps, &radii, base);
        let values = continue_path(&fibre, base_roots.clone(), &path)?;
        match_to_base(&values, &base_roots)
    };
    let idx: Vec<usize> = (0..reps.len()).collect();
    let results = if parallel {
        exec::map_slice(&idx, run_loop)
    } else {
        exec::map_slice_seq(&idx, run_loop)
    };
    let mut permutations = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(p) => permutations.push(p),
            Err(reason) => {
                let mut rep = empty_report(MonodromyOutcome::Inconclusive { reason });
                rep.base_point = [base.re, base.im];
                rep.branch_points = reps.iter().map(|z| [z.re, z.im]).collect();
                rep.loop_radii = radii;
                return Ok(rep);
            }
        }
    }

    let inf_perm = match infinity_loop(&fibre, &base_roots, base) {
        Ok(p) => p,
        Err(reason) => {
            let mut rep = empty_report(MonodromyOutcome::Inconclusive {
                reason: format!("on the loop around infinity: {reason}"),
            });
            rep.base_point = [base.re, base.im];
            rep.branch_points = reps.iter().map(|z| [z.re, z.im]).collect();
            rep.loop_radii = radii;
            return Ok(rep);
        }
    };

    // Boundary relation: traversing the tails rightmost-foot-first, the
    // composite of the branch loops equals the counterclockwise loop around
    // everything.
    let mut order: Vec<usize> = (0..reps.len()).collect();
    order.sort_by(|&a, &b| comb.feet[b].partial_cmp(&comb.feet[a]).unwrap());
    let mut composite: Vec<usize> = (0..n).collect();
    for &k in &order {
        composite = compose(&permutations[k], &composite);
    }
    let product_relation_ok = composite == inf_perm;

    let orbits = orbit_partition(n, &permutations);
    let outcome = if orbits.len() == 1 {
        MonodromyOutcome::Transitive
    } else {
        MonodromyOutcome::Intransitive { orbits }
    };
    Ok(MonodromyReport {
        outcome,
        base_point: [base.re, base.im],
        branch_points: reps.iter().map(|z| [z.re, z.im]).collect(),
        loop_radii: radii,
        steps_per_loop: STEPS_PER_LOOP,
        permutations,
        infinity_permutation: inf_perm,
        product_relation_ok,
    })
}

fn fmt_c(z: Complex64) -> String {
    format!("{:.6}{:+.6}i", z.re, z.im)
}

/// `perm_after[perm_before[i]]`: apply `before` first.
fn compose(after: &[usize], before: &[usize]) -> Vec<usize> {
    before.iter().map(|&i| after[i]).collect()
}

fn orbit_partition(n: usize, perms: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    for p in perms {
        for (i, &j) in p.iter().enumerate() {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a] = b;
            }
        }
    }
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    let mut root_of: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        match root_of[r] {
            Some(idx) => orbits[idx].push(i),
            None => {
                root_of[r] = Some(orbits.len());
                orbits.push(vec![i]);
            }
        }
    }
    orbits
}

fn cluster(points: &[Complex64], eps: f64) -> Vec<Complex64> {
    let m = points.len();
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    for i in 0..m {
        for j in 0..i {
            if (points[i] - points[j]).norm() <= eps {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut sums: Vec<(Complex64, usize)> = vec![(Complex64::new(0.0, 0.0), 0); m];
    for i in 0..m {
        let r = find(&mut parent, i);
        sums[r].0 += points[i];
        sums[r].1 += 1;
    }
    let mut reps: Vec<Complex64> = sums
        .into_iter()
        .filter(|(_, c)| *c > 0)
        .map(|(s, c)| s / c as f64)
        .collect();
    reps.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    reps
}

/// Fibre polynomial coefficients (ascending in the tautological coordinate)
/// at a chart point.
fn eta_coeffs_at(fibre: &[Vec<Complex64>], z: Complex64) -> Vec<Complex64> {
    fibre
        .iter()
        .map(|c| {
            let mut acc = Complex64::new(0.0, 0.0);
            for v in c.iter().rev() {
                acc = acc * z + v;
            }
            acc
        })
        .collect()
}

/// Solve for the sheets at `z`, optionally warm-starting; rejects collided
/// sheet values.
fn sheets_at(
    fibre: &[Vec<Complex64>],
    z: Complex64,
    warm: Option<&[Complex64]>,
) -> std::result::Result<Vec<Complex64>, String> {
    let coeffs = eta_coeffs_at(fibre, z);
    let roots = match warm {
        Some(prev) => poly_roots_from(&coeffs, prev),
        None => poly_roots(&coeffs),
    };
    let scale = 1.0 + roots.iter().map(|r| r.norm()).fold(0.0, f64::max);
    for i in 0..roots.len() {
        for j in 0..i {
            if (roots[i] - roots[j]).norm() < 1e-9 * scale {
                return Err(format!("sheets collide near z = {}", fmt_c(z)));
            }
        }
    }
    Ok(roots)
}

/// Tail geometry shared by all loops: every tail drops from the base point
/// to a horizontal highway below the whole branch cloud, runs along it, and
/// rises to its loop circle along one common direction. With tails that
/// never cross, the loops form a fan whose composite (rightmost highway foot
/// first) is the loop around everything.
struct Comb {
    highway_y: f64,
    feet: Vec<f64>,
    entries: Vec<Complex64>,
}

/// Candidate riser tilts (radians off vertical), tried in order until every
/// riser clears every other branch disk.
const TILT_CANDIDATES: [f64; 33] = [
    0.0, 0.2, -0.2, 0.35, -0.35, 0.5, -0.5, 0.65, -0.65, 0.1, -0.1, 0.28, -0.28, 0.45, -0.45,
    0.6, -0.6, 0.05, -0.05, 0.15, -0.15, 0.24, -0.24, 0.4, -0.4, 0.55, -0.55, 0.75, -0.75, 0.9,
    -0.9, 1.05, -1.05,
];

fn point_segment_distance(a: Complex64, b: Complex64, p: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).re * ab.re + (p - a).im * ab.im) / len2;
    let t = t.clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

fn build_comb(reps: &[Complex64], radii: &[f64], base: Complex64) -> Option<Comb> {
    let rmax = reps.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let safety = radii.iter().copied().fold(0.0, f64::max);
    let lowest = reps.iter().map(|z| z.im).fold(0.0, f64::min);
    let highway_y = lowest - 1.0 - rmax.max(1.0) * 0.5 - 1.5 * safety;
    'tilt: for &psi in &TILT_CANDIDATES {
        let dir = Complex64::new(psi.sin(), psi.cos());
        let mut feet = Vec::with_capacity(reps.len());
        let mut entries = Vec::with_capacity(reps.len());
        for (k, z) in reps.iter().enumerate() {
            entries.push(z - dir * radii[k]);
            let run = (z.im - highway_y) / dir.im;
            feet.push(z.re - dir.re * run);
        }
        // Risers must clear every other branch disk with margin.
        for k in 0..reps.len() {
            let foot = Complex64::new(feet[k], highway_y);
            for (j, z) in reps.iter().enumerate() {
                if j != k && point_segment_distance(foot, entries[k], *z) <= 1.35 * radii[j] {
                    continue 'tilt;
                }
            }
        }
        // Feet must stay clear of the drop at the base and of each other so
        // the traversal order is unambiguous.
        let sep = 1e-9 * (1.0 + rmax);
        if feet.iter().any(|a| *a >= base.re - 0.25 * base.re.max(1.0)) {
            continue 'tilt;
        }
        let mut sorted = feet.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if sorted.windows(2).any(|w| w[1] - w[0] <= sep) {
            continue 'tilt;
        }
        return Some(Comb { highway_y, feet, entries });
    }
    None
}

/// Subdivide a straight course so each step is short relative to the
/// distance from the branch points; emits the subdivision endpoints
/// excluding `from`.
fn adaptive_segment(from: Complex64, to: Complex64, reps: &[Complex64], out: &mut Vec<Complex64>) {
    fn rec(a: Complex64, b: Complex64, reps: &[Complex64], out: &mut Vec<Complex64>, depth: u32) {
        let len = (b - a).norm();
        let mid = (a + b) / 2.0;
        let clear = reps
            .iter()
            .map(|z| (mid - z).norm())
            .fold(f64::INFINITY, f64::min);
        if depth >= 26 || len <= 0.35 * clear || len < 1e-12 {
            out.push(b);
        } else {
            rec(a, mid, reps, out, depth + 1);
            rec(mid, b, reps, out, depth + 1);
        }
    }
    rec(from, to, reps, out, 0);
}

/// Full loop for branch point `k`: comb tail out, 64-step counterclockwise
/// circle, tail back. The base point is implicit at both ends.
fn loop_path(
    comb: &Comb,
    k: usize,
    reps: &[Complex64],
    radii: &[f64],
    base: Complex64,
) -> Vec<Complex64> {
    let drop_to = Complex64::new(base.re, comb.highway_y);
    let foot = Complex64::new(comb.feet[k], comb.highway_y);
    let entry = comb.entries[k];
    let mut approach = Vec::new();
    adaptive_segment(base, drop_to, reps, &mut approach);
    adaptive_segment(drop_to, foot, reps, &mut approach);
    adaptive_segment(foot, entry, reps, &mut approach);

    let mut path = approach.clone();
    let theta0 = (entry - reps[k]).arg();
    for t in 1..=STEPS_PER_LOOP {
        let theta = theta0 + 2.0 * std::f64::consts::PI * (t as f64) / (STEPS_PER_LOOP as f64);
        path.push(reps[k] + Complex64::from_polar(radii[k], theta));
    }
    let mut back = approach[..approach.len() - 1].to_vec();
    back.reverse();
    back.push(base);
    path.extend(back);
    path
}

/// Continue all sheet values along the path, nearest-neighbor matching with
/// a factor-2 margin at each step.
fn continue_path(
    fibre: &[Vec<Complex64>],
    start: Vec<Complex64>,
    path: &[Complex64],
) -> std::result::Result<Vec<Complex64>, String> {
    let mut cur = start;
    for &z in path {
        let next = sheets_at(fibre, z, Some(&cur))?;
        cur = match_margin(&cur, &next, z)?;
    }
    Ok(cur)
}

/// For each previous value pick the nearest new root; demand a factor-2
/// margin over the second-nearest and global injectivity.
fn match_margin(
    prev: &[Complex64],
    next: &[Complex64],
    z: Complex64,
) -> std::result::Result<Vec<Complex64>, String> {
    let n = prev.len();
    let mut chosen = vec![usize::MAX; n];
    for i in 0..n {
        let mut best = (f64::INFINITY, usize::MAX);
        let mut second = f64::INFINITY;
        for (j, r) in next.iter().enumerate() {
            let d = (prev[i] - r).norm();
            if d < best.0 {
                second = best.0;
                best = (d, j);
            } else if d < second {
                second = d;
            }
        }
        if best.0 * 2.0 > second {
            return Err(format!(
                "root tracking lost the factor-2 matching margin near z = {}",
                fmt_c(z)
            ));
        }
        chosen[i] = best.1;
    }
    let mut seen = vec![false; n];
    for &j in &chosen {
        if seen[j] {
            return Err(format!(
                "root tracking became non-injective near z = {}",
                fmt_c(z)
            ));
        }
        seen[j] = true;
    }
    Ok(chosen.into_iter().map(|j| next[j]).collect())
}

/// Permutation taking each starting sheet to the sheet its continuation
/// lands on.
fn match_to_base(
    values: &[Complex64],
    base_roots: &[Complex64],
) -> std::result::Result<Vec<usize>, String> {
    let n = values.len();
    let mut perm = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    for i in 0..n {
        let mut best = (f64::INFINITY, usize::MAX);
        let mut second = f64::INFINITY;
        for (j, r) in base_roots.iter().enumerate() {
            let d = (values[i] - r).norm();
            if d < best.0 {
                second = best.0;
                best = (d, j);
            } else if d < second {
                second = d;
            }
        }
        if best.0 * 2.0 > second {
            return Err("closing the loop lost the factor-2 matching margin".to_string());
        }
        if seen[best.1] {
            return Err("closing the loop became non-injective".to_string());
        }
        seen[best.1] = true;
        perm[i] = best.1;
    }
    Ok(perm)
}

fn infinity_loop(
    fibre: &[Vec<Complex64>],
    base_roots: &[Complex64],
    base: Complex64,
) -> std::result::Result<Vec<usize>, String> {
    let radius = base.re;
    let mut path = Vec::with_capacity(INFINITY_STEPS);
    for t in 1..=INFINITY_STEPS {
        let theta = 2.0 * std::f64::consts::PI * (t as f64) / (INFINITY_STEPS as f64);
        path.push(Complex64::from_polar(radius, theta));
    }
    let values = continue_path(fibre, base_roots.to_vec(), &path)?;
    match_to_base(&values, base_roots)
}
