//! Parabolic structures on a chart: marked points with weighted flags,
//! exact parabolic degree and slope, semistability tested against every
//! weight-selection candidate under caller-supplied sub-degree bounds, and
//! the minimal-residue conditions for parabolic fields with simple poles.

use crate::error::{Error, Result};
use crate::exact::{
    deserialize_rational, deserialize_rational_vec, serialize_rational, serialize_rational_vec,
    CMatrix, ExactComplex, PolyMatrix, Rational,
};
use crate::exec;
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// A marked point with its flag data: step multiplicities and strictly
/// decreasing weights, one weight per step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParabolicPoint {
    pub point: ExactComplex,
    pub multiplicities: Vec<usize>,
    #[serde(
        serialize_with = "serialize_rational_vec",
        deserialize_with = "deserialize_rational_vec"
    )]
    pub weights: Vec<Rational>,
}

impl ParabolicPoint {
    pub fn new(
        point: ExactComplex,
        multiplicities: Vec<usize>,
        weights: Vec<Rational>,
    ) -> Result<Self> {
        let p = ParabolicPoint { point, multiplicities, weights };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if self.multiplicities.is_empty() || self.multiplicities.len() != self.weights.len() {
            return Err(Error::domain(
                "marked point needs matching nonempty multiplicity and weight lists",
            ));
        }
        if self.multiplicities.iter().any(|&m| m == 0) {
            return Err(Error::domain("step multiplicities must be positive"));
        }
        if self.weights[0] > rat_int(1) {
            return Err(Error::domain("leading weight must not exceed 1"));
        }
        if self.weights.last().unwrap() < &rat_int(0) {
            return Err(Error::domain("weights must be nonnegative"));
        }
        if self.weights.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::domain("weights must be strictly decreasing"));
        }
        Ok(())
    }

    fn flag_rank(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    /// Weight contribution of this point to the parabolic degree.
    fn weight_sum(&self) -> Rational {
        self.multiplicities
            .iter()
            .zip(&self.weights)
            .map(|(&m, a)| a * rat_int(m as i64))
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParabolicBundle {
    pub rank: usize,
    pub degree: i64,
    pub points: Vec<ParabolicPoint>,
}

impl ParabolicBundle {
    pub fn new(rank: usize, degree: i64, points: Vec<ParabolicPoint>) -> Result<Self> {
        if rank == 0 {
            return Err(Error::domain("rank must be at least 1"));
        }
        for p in &points {
            p.validate()?;
            if p.flag_rank() != rank {
                return Err(Error::domain(format!(
                    "flag multiplicities at {} sum to {}, expected the rank {}",
                    p.point,
                    p.flag_rank(),
                    rank
                )));
            }
        }
        for i in 0..points.len() {
            for j in 0..i {
                if points[i].point == points[j].point {
                    return Err(Error::domain(format!(
                        "marked points must be pairwise distinct, {} repeats",
                        points[i].point
                    )));
                }
            }
        }
        Ok(ParabolicBundle { rank, degree, points })
    }
}

/// Underlying degree plus the multiplicity-weighted sum of all weights.
pub fn parabolic_degree(b: &ParabolicBundle) -> Rational {
    rat_int(b.degree) + b.points.iter().map(ParabolicPoint::weight_sum).sum::<Rational>()
}

pub fn parabolic_slope(b: &ParabolicBundle) -> Rational {
    parabolic_degree(b) / rat_int(b.rank as i64)
}

/// A candidate subbundle: its rank, degree, and the selected weight steps
/// per marked point (step indices, repeated up to their multiplicity).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubCandidate {
    pub sub_rank: usize,
    pub sub_degree: i64,
    pub selection: Vec<Vec<usize>>,
    #[serde(
        serialize_with = "serialize_rational",
        deserialize_with = "deserialize_rational"
    )]
    pub slope: Rational,
}

/// The parabolic bundle a weight selection induces on a subbundle of the
/// given rank and degree: selected steps keep their weights, with
/// multiplicities given by how often each step was chosen.
pub fn induced_sub_structure(
    b: &ParabolicBundle,
    sub_rank: usize,
    sub_degree: i64,
    selection: &[Vec<usize>],
) -> Result<ParabolicBundle> {
    if sub_rank == 0 || sub_rank >= b.rank {
        return Err(Error::domain(format!(
            "sub-rank must lie strictly between 0 and {}, got {sub_rank}",
            b.rank
        )));
    }
    if selection.len() != b.points.len() {
        return Err(Error::domain(format!(
            "selection covers {} points, bundle has {}",
            selection.len(),
            b.points.len()
        )));
    }
    let mut points = Vec::with_capacity(b.points.len());
    for (p, chosen) in b.points.iter().zip(selection) {
        if chosen.len() != sub_rank {
            return Err(Error::domain(format!(
                "selection at {} picks {} weights, expected {sub_rank}",
                p.point,
                chosen.len()
            )));
        }
        let mut counts = vec![0usize; p.weights.len()];
        for &idx in chosen {
            if idx >= p.weights.len() {
                return Err(Error::domain(format!(
                    "weight step {idx} out of range at {}",
                    p.point
                )));
            }
            counts[idx] += 1;
        }
        for (idx, (&c, &m)) in counts.iter().zip(&p.multiplicities).enumerate() {
            if c > m {
                return Err(Error::domain(format!(
                    "weight step {idx} at {} selected {c} times, multiplicity is {m}",
                    p.point
                )));
            }
        }
        let mut mult = Vec::new();
        let mut weights = Vec::new();
        for (idx, &c) in counts.iter().enumerate() {
            if c > 0 {
                mult.push(c);
                weights.push(p.weights[idx].clone());
            }
        }
        points.push(ParabolicPoint::new(p.point.clone(), mult, weights)?);
    }
    ParabolicBundle::new(sub_rank, sub_degree, points)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict")]
pub enum StabilityVerdict {
    Stable,
    Semistable { witness: SubCandidate },
    Unstable { witness: SubCandidate },
}

impl StabilityVerdict {
    pub fn semistable(&self) -> bool {
        !matches!(self, StabilityVerdict::Unstable { .. })
    }
}

/// All ways to pick `k` weight steps at a point, each step at most its
/// multiplicity; selections are expanded sorted index lists.
fn weight_selections(p: &ParabolicPoint, k: usize) -> Vec<Vec<usize>> {
    fn rec(
        mult: &[usize],
        step: usize,
        left: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        if step >= mult.len() {
            return;
        }
        let take_max = left.min(mult[step]);
        // Descending count first keeps the lexicographically smallest
        // expanded encoding (smallest indices) first in the output.
        for take in (0..=take_max).rev() {
            let mark = cur.len();
            cur.extend(std::iter::repeat(step).take(take));
            rec(mult, step + 1, left - take, cur, out);
            cur.truncate(mark);
        }
    }
    let mut out = Vec::new();
    rec(&p.multiplicities, 0, k, &mut Vec::new(), &mut out);
    out
}

const MAX_CANDIDATES: usize = 200_000;

/// Exhaustive semistability check against every candidate subbundle:
/// sub-ranks 1..rank, caller-supplied maximal degree per sub-rank, every
/// weight selection per point. Returns the maximizing candidate as witness.
/// Candidates of lower degree than the bound are dominated (same weights,
/// smaller slope), so only the bound degree is materialized.
pub fn parabolic_semistable(b: &ParabolicBundle, bounds: &[i64]) -> Result<StabilityVerdict> {
    semistable_impl(b, bounds, true)
}

/// Always-sequential variant, for benchmarking against the parallel path.
pub fn parabolic_semistable_seq(b: &ParabolicBundle, bounds: &[i64]) -> Result<StabilityVerdict> {
    semistable_impl(b, bounds, false)
}

fn semistable_impl(b: &ParabolicBundle, bounds: &[i64], parallel: bool) -> Result<StabilityVerdict> {
    if bounds.len() != b.rank - 1 {
        return Err(Error::config(format!(
            "need one sub-degree bound per sub-rank 1..{}, got {}",
            b.rank - 1,
            bounds.len()
        )));
    }
    let total = parabolic_slope(b);

    let mut candidates: Vec<(usize, i64, Vec<Vec<usize>>)> = Vec::new();
    for sub_rank in 1..b.rank {
        let sub_degree = bounds[sub_rank - 1];
        let per_point: Vec<Vec<Vec<usize>>> = b
            .points
            .iter()
            .map(|p| weight_selections(p, sub_rank))
            .collect();
        let count: usize = per_point.iter().map(Vec::len).product();
        if candidates.len().saturating_add(count) > MAX_CANDIDATES {
            return Err(Error::config(format!(
                "candidate enumeration exceeds the supported size of {MAX_CANDIDATES}"
            )));
        }
        // Cartesian product across points, lexicographic order.
        let mut stack: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
        for options in &per_point {
            let mut next = Vec::with_capacity(stack.len() * options.len());
            for partial in &stack {
                for opt in options {
                    let mut sel = partial.clone();
                    sel.push(opt.clone());
                    next.push(sel);
                }
            }
            stack = next;
        }
        for sel in stack {
            candidates.push((sub_rank, sub_degree, sel));
        }
    }

    if candidates.is_empty() {
        return Ok(StabilityVerdict::Stable);
    }

    let slope_of = |c: &(usize, i64, Vec<Vec<usize>>)| -> Rational {
        let (sub_rank, sub_degree, sel) = c;
        let mut acc = rat_int(*sub_degree);
        for (p, chosen) in b.points.iter().zip(sel) {
            for &idx in chosen {
                acc += p.weights[idx].clone();
            }
        }
        acc / rat_int(*sub_rank as i64)
    };
    let slopes = if parallel {
        exec::map_slice(&candidates, slope_of)
    } else {
        exec::map_slice_seq(&candidates, slope_of)
    };

    // Deterministic max-reduction: larger slope wins; ties keep the earlier
    // candidate, which is the lexicographically smallest encoding.
    let mut best = 0usize;
    for i in 1..candidates.len() {
        if slopes[i] > slopes[best] {
            best = i;
        }
    }
    let (sub_rank, sub_degree, selection) = candidates[best].clone();
    let witness = SubCandidate { sub_rank, sub_degree, selection, slope: slopes[best].clone() };

    Ok(if witness.slope > total {
        StabilityVerdict::Unstable { witness }
    } else if witness.slope == total {
        StabilityVerdict::Semistable { witness }
    } else {
        StabilityVerdict::Stable
    })
}

/// A parabolic field with declared simple poles: one residue matrix per
/// marked point plus a polynomial part.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParabolicHiggs {
    pub bundle: ParabolicBundle,
    pub residues: Vec<CMatrix>,
    pub regular_part: PolyMatrix,
}

impl ParabolicHiggs {
    pub fn new(bundle: ParabolicBundle, residues: Vec<CMatrix>, regular_part: PolyMatrix) -> Result<Self> {
        if residues.len() != bundle.points.len() {
            return Err(Error::structure(format!(
                "{} residues for {} marked points",
                residues.len(),
                bundle.points.len()
            )));
        }
        let r = bundle.rank;
        for (i, res) in residues.iter().enumerate() {
            if !res.is_square() || res.nrows() != r {
                return Err(Error::structure(format!(
                    "residue {i} must be {r}x{r}"
                )));
            }
        }
        if !regular_part.is_square() || regular_part.nrows() != r {
            return Err(Error::structure(format!("polynomial part must be {r}x{r}")));
        }
        Ok(ParabolicHiggs { bundle, residues, regular_part })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidueCheck {
    pub index: usize,
    pub trace_zero: bool,
    pub square_zero: bool,
    pub rank_le_one: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_violation: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidueReport {
    pub pass: bool,
    pub residues: Vec<ResidueCheck>,
}

/// Verify each residue lands in the smallest nonzero nilpotent class:
/// trace zero, square zero, rank at most one.
pub fn check_minimal_residues(h: &ParabolicHiggs) -> ResidueReport {
    let mut checks = Vec::with_capacity(h.residues.len());
    for (index, res) in h.residues.iter().enumerate() {
        let trace_zero = res.trace().is_zero();
        let square_zero = (res * res).is_zero();
        let rank_le_one = res.rank() <= 1;
        let first_violation = [
            ("trace_zero", trace_zero),
            ("square_zero", square_zero),
            ("rank_le_one", rank_le_one),
        ]
        .iter()
        .find(|(_, ok)| !ok)
        .map(|(name, _)| name.to_string());
        checks.push(ResidueCheck { index, trace_zero, square_zero, rank_le_one, first_violation });
    }
    ResidueReport { pass: checks.iter().all(|c| c.first_violation.is_none()), residues: checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn pt(loc: i64, mult: &[usize], weights: &[(i64, i64)]) -> ParabolicPoint {
        ParabolicPoint::new(
            ExactComplex::from_int(loc),
            mult.to_vec(),
            weights.iter().map(|&(n, d)| rat(n, d)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn degree_and_slope_formula() {
        let b = ParabolicBundle::new(2, 0, vec![pt(0, &[1, 1], &[(2, 3), (1, 3)])]).unwrap();
        assert_eq!(parabolic_degree(&b), rat_int(1));
        assert_eq!(parabolic_slope(&b), rat(1, 2));

        let bare = ParabolicBundle::new(3, -2, vec![]).unwrap();
        assert_eq!(parabolic_degree(&bare), rat_int(-2));

        let two = ParabolicBundle::new(
            2,
            -1,
            vec![pt(0, &[2], &[(1, 4)]), pt(1, &[2], &[(1, 4)])],
        )
        .unwrap();
        assert_eq!(parabolic_degree(&two), rat_int(0));
    }

    #[test]
    fn degree_additive_over_marked_points() {
        let p = pt(0, &[1, 2], &[(3, 4), (1, 8)]);
        let q = pt(1, &[3], &[(1, 2)]);
        let both = ParabolicBundle::new(3, 5, vec![p.clone(), q.clone()]).unwrap();
        let only_p = ParabolicBundle::new(3, 5, vec![p]).unwrap();
        let only_q = ParabolicBundle::new(3, 5, vec![q]).unwrap();
        assert_eq!(
            parabolic_degree(&both) - rat_int(5),
            (parabolic_degree(&only_p) - rat_int(5)) + (parabolic_degree(&only_q) - rat_int(5))
        );
    }

    #[test]
    fn point_validation() {
        assert!(ParabolicPoint::new(ExactComplex::zero(), vec![1], vec![]).is_err());
        // Not strictly decreasing.
        assert!(ParabolicPoint::new(
            ExactComplex::zero(),
            vec![1, 1],
            vec![rat(1, 3), rat(1, 3)]
        )
        .is_err());
        // Weight above 1.
        assert!(ParabolicPoint::new(ExactComplex::zero(), vec![1], vec![rat(3, 2)]).is_err());
        // Repeated marked point.
        let b = ParabolicBundle::new(
            1,
            0,
            vec![pt(2, &[1], &[(1, 2)]), pt(2, &[1], &[(1, 3)])],
        );
        assert!(b.is_err());
        // Multiplicities must sum to the rank.
        assert!(ParabolicBundle::new(3, 0, vec![pt(0, &[1, 1], &[(1, 2), (1, 3)])]).is_err());
    }

    #[test]
    fn induced_structure_selects_weights() {
        let b = ParabolicBundle::new(2, 0, vec![pt(0, &[1, 1], &[(2, 3), (1, 3)])]).unwrap();
        let line = induced_sub_structure(&b, 1, 0, &[vec![0]]).unwrap();
        assert_eq!(line.rank, 1);
        assert_eq!(line.points[0].weights, vec![rat(2, 3)]);
        assert_eq!(parabolic_slope(&line), rat(2, 3));

        // Arity mismatch and multiplicity overflow are domain errors.
        assert!(induced_sub_structure(&b, 1, 0, &[vec![]]).is_err());
        assert!(induced_sub_structure(&b, 1, 0, &[vec![0], vec![0]]).is_err());
        let c = ParabolicBundle::new(2, 0, vec![pt(0, &[1, 1], &[(1, 2), (1, 4)])]).unwrap();
        assert!(induced_sub_structure(&c, 1, 0, &[vec![0, 0]]).is_err());
    }

    #[test]
    fn full_flag_selection_count() {
        let p = pt(0, &[1, 1, 1], &[(3, 4), (1, 2), (1, 4)]);
        assert_eq!(weight_selections(&p, 2).len(), 3);
        assert_eq!(weight_selections(&p, 1).len(), 3);
        let fat = pt(0, &[2, 1], &[(1, 2), (1, 4)]);
        // Two of {step0 x2, step1}: {0,0}, {0,1}.
        assert_eq!(weight_selections(&fat, 2), vec![vec![0, 0], vec![0, 1]]);
    }

    #[test]
    fn semistability_witnesses() {
        let b = ParabolicBundle::new(2, 0, vec![pt(0, &[1, 1], &[(2, 3), (1, 3)])]).unwrap();
        match parabolic_semistable(&b, &[0]).unwrap() {
            StabilityVerdict::Unstable { witness } => {
                assert_eq!(witness.sub_rank, 1);
                assert_eq!(witness.selection, vec![vec![0]]);
                assert_eq!(witness.slope, rat(2, 3));
            }
            other => panic!("expected unstable, got {other:?}"),
        }

        let b2 = ParabolicBundle::new(2, 0, vec![pt(0, &[1, 1], &[(1, 3), (1, 4)])]).unwrap();
        match parabolic_semistable(&b2, &[0]).unwrap() {
            StabilityVerdict::Unstable { witness } => {
                assert_eq!(witness.slope, rat(1, 3));
                assert_eq!(parabolic_slope(&b2), rat(7, 24));
            }
            other => panic!("expected unstable, got {other:?}"),
        }

        let plain = ParabolicBundle::new(2, 0, vec![]).unwrap();
        assert_eq!(parabolic_semistable(&plain, &[-1]).unwrap(), StabilityVerdict::Stable);
        assert!(parabolic_semistable(&plain, &[]).is_err());
    }

    #[test]
    fn zero_weights_degenerate_to_ordinary_slope() {
        // A single full-multiplicity step of weight 0 contributes nothing:
        // the check reduces to degree bounds against the plain slope.
        let b = ParabolicBundle::new(2, 0, vec![pt(0, &[2], &[(0, 1)])]).unwrap();
        match parabolic_semistable(&b, &[0]).unwrap() {
            StabilityVerdict::Semistable { witness } => {
                assert_eq!(witness.slope, rat_int(0));
            }
            other => panic!("expected semistable, got {other:?}"),
        }
        assert_eq!(
            parabolic_semistable(&b, &[-1]).unwrap(),
            StabilityVerdict::Stable
        );
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let b = ParabolicBundle::new(
            3,
            -1,
            vec![
                pt(0, &[1, 1, 1], &[(5, 6), (1, 2), (1, 6)]),
                pt(1, &[2, 1], &[(3, 4), (1, 4)]),
            ],
        )
        .unwrap();
        let a = parabolic_semistable(&b, &[0, 0]).unwrap();
        let s = parabolic_semistable_seq(&b, &[0, 0]).unwrap();
        assert_eq!(a, s);
    }

    #[test]
    fn minimal_residue_checks() {
        let bundle = ParabolicBundle::new(2, 0, vec![pt(0, &[1, 1], &[(1, 2), (1, 4)])]).unwrap();
        let nil = CMatrix::from_ints(&[&[0, 1], &[0, 0]]);
        let h = ParabolicHiggs::new(bundle.clone(), vec![nil], PolyMatrix::zeros(2, 2)).unwrap();
        let rep = check_minimal_residues(&h);
        assert!(rep.pass);

        let diag = CMatrix::from_ints(&[&[1, 0], &[0, -1]]);
        let h2 = ParabolicHiggs::new(bundle, vec![diag], PolyMatrix::zeros(2, 2)).unwrap();
        let rep2 = check_minimal_residues(&h2);
        assert!(!rep2.pass);
        assert_eq!(rep2.residues[0].first_violation.as_deref(), Some("square_zero"));
        assert!(rep2.residues[0].trace_zero);
    }

    #[test]
    fn rank_one_nilpotent_outer_product() {
        // col * row with row . col = 0 is trace-free, rank 1, square zero.
        let col = [1i64, 2, -1];
        let row = [2i64, 1, 4];
        let mut m = CMatrix::zeros(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                m.set(i, j, ExactComplex::from_int(col[i] * row[j]));
            }
        }
        let bundle = ParabolicBundle::new(3, 0, vec![pt(0, &[1, 2], &[(1, 2), (1, 4)])]).unwrap();
        let h = ParabolicHiggs::new(bundle, vec![m.clone()], PolyMatrix::zeros(3, 3)).unwrap();
        let rep = check_minimal_residues(&h);
        assert!(rep.pass, "{rep:?}");
        // Consistency: rank <= 1 and cube zero forces square zero.
        assert!((&(&m * &m) * &m).is_zero());
    }

    #[test]
    fn json_round_trip() {
        let b = ParabolicBundle::new(
            2,
            -1,
            vec![pt(0, &[2], &[(1, 4)]), pt(1, &[1, 1], &[(2, 3), (1, 3)])],
        )
        .unwrap();
        let s = serde_json::to_string(&b).unwrap();
        let back: ParabolicBundle = serde_json::from_str(&s).unwrap();
        assert_eq!(b, back);
    }
}
