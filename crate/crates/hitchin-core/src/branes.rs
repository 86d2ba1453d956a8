//! Involution calculators for real forms: the structural matrices, the
//! Cartan action on Higgs fields, conjugation evidence for fixed points,
//! component counts for the induced involutions on fibres, and the two
//! low-rank isogeny maps with their eigenvalue correspondences.

use crate::error::{Error, Result};
use crate::exact::{CMatrix, ExactComplex, PolyMatrix};
use crate::higgs::{base_involution_action, hitchin_map, HiggsPair};
use serde::{Deserialize, Serialize};

/// The three block matrices every involution in the table is built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum StructuralKind {
    #[serde(rename = "I")]
    Ipq { p: usize, q: usize },
    #[serde(rename = "J")]
    Jn { n: usize },
    #[serde(rename = "K")]
    Kpq { p: usize, q: usize },
}

/// diag(-I_p, I_q), the split rotation [[0, I_n], [-I_n, 0]], or the
/// doubled signature matrix diag(-I_p, I_q, -I_p, I_q).
pub fn structural_matrix(kind: StructuralKind) -> Result<CMatrix> {
    match kind {
        StructuralKind::Ipq { p, q } => {
            if p == 0 || q == 0 {
                return Err(Error::domain("signature parameters must be positive"));
            }
            let mut m = CMatrix::identity(p + q);
            for i in 0..p {
                m.set(i, i, -&ExactComplex::one());
            }
            Ok(m)
        }
        StructuralKind::Jn { n } => {
            if n == 0 {
                return Err(Error::domain("block size must be positive"));
            }
            let mut m = CMatrix::zeros(2 * n, 2 * n);
            for i in 0..n {
                m.set(i, n + i, ExactComplex::one());
                m.set(n + i, i, -&ExactComplex::one());
            }
            Ok(m)
        }
        StructuralKind::Kpq { p, q } => {
            if p == 0 || q == 0 {
                return Err(Error::domain("signature parameters must be positive"));
            }
            let s = p + q;
            let mut m = CMatrix::identity(2 * s);
            for b in 0..2 {
                for i in 0..p {
                    m.set(b * s + i, b * s + i, -&ExactComplex::one());
                }
            }
            Ok(m)
        }
    }
}

/// Which noncompact real form the Cartan involution belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "form")]
pub enum RealFormSpec {
    #[serde(rename = "sl_n_R")]
    SlnR { n: usize },
    #[serde(rename = "su_star_2m")]
    SuStar2m { m: usize },
    #[serde(rename = "su_p_q")]
    SuPQ { p: usize, q: usize },
    #[serde(rename = "so_p_q")]
    SoPQ { p: usize, q: usize },
    #[serde(rename = "sp_2n_R")]
    Sp2nR { n: usize },
    #[serde(rename = "sp_2p_2q")]
    Sp2p2q { p: usize, q: usize },
    #[serde(rename = "so_star_2m")]
    SoStar2m { m: usize },
}

impl RealFormSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            RealFormSpec::SlnR { n } | RealFormSpec::Sp2nR { n } => n > 0,
            RealFormSpec::SuStar2m { m } | RealFormSpec::SoStar2m { m } => m > 0,
            RealFormSpec::SuPQ { p, q }
            | RealFormSpec::SoPQ { p, q }
            | RealFormSpec::Sp2p2q { p, q } => p > 0 && q > 0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain("real-form parameters must be positive"))
        }
    }

    /// Size of the matrices the involution acts on.
    pub fn matrix_size(&self) -> usize {
        match *self {
            RealFormSpec::SlnR { n } => n,
            RealFormSpec::SuStar2m { m } | RealFormSpec::SoStar2m { m } => 2 * m,
            RealFormSpec::SuPQ { p, q } | RealFormSpec::SoPQ { p, q } => p + q,
            RealFormSpec::Sp2nR { n } => 2 * n,
            RealFormSpec::Sp2p2q { p, q } => 2 * (p + q),
        }
    }

    /// The conjugating matrix of the involution, when there is one.
    fn conjugator(&self) -> Option<(String, CMatrix)> {
        let kind = match *self {
            RealFormSpec::SlnR { .. } => return None,
            RealFormSpec::SuStar2m { m } | RealFormSpec::SoStar2m { m } => {
                StructuralKind::Jn { n: m }
            }
            RealFormSpec::SuPQ { p, q } | RealFormSpec::SoPQ { p, q } => {
                StructuralKind::Ipq { p, q }
            }
            RealFormSpec::Sp2nR { n } => StructuralKind::Jn { n },
            RealFormSpec::Sp2p2q { p, q } => StructuralKind::Kpq { p, q },
        };
        let label = match kind {
            StructuralKind::Ipq { .. } => "I_pq",
            StructuralKind::Jn { .. } => "J_n",
            StructuralKind::Kpq { .. } => "K_pq",
        };
        Some((label.to_string(), structural_matrix(kind).expect("validated parameters")))
    }
}

/// The Cartan involution of the real form applied entrywise-exactly to a
/// polynomial matrix, one table row per variant.
pub fn apply_theta(spec: RealFormSpec, x: &PolyMatrix) -> Result<PolyMatrix> {
    spec.validate()?;
    let size = spec.matrix_size();
    if !x.is_square() || x.nrows() != size {
        return Err(Error::domain(format!(
            "matrix of size {} for a form acting on size {size}",
            x.nrows()
        )));
    }
    let conj = |g: &CMatrix, m: &PolyMatrix| -> PolyMatrix {
        let gp = g.to_poly_matrix();
        let gi = g.inverse().expect("structural matrices are invertible").to_poly_matrix();
        &(&gp * m) * &gi
    };
    Ok(match spec {
        RealFormSpec::SlnR { .. } => -&x.transpose(),
        RealFormSpec::SuStar2m { m } => {
            let j = structural_matrix(StructuralKind::Jn { n: m })?;
            -&conj(&j, &x.transpose())
        }
        RealFormSpec::SuPQ { p, q } | RealFormSpec::SoPQ { p, q } => {
            let i = structural_matrix(StructuralKind::Ipq { p, q })?;
            conj(&i, x)
        }
        RealFormSpec::Sp2nR { n } => {
            let j = structural_matrix(StructuralKind::Jn { n })?;
            conj(&j, x)
        }
        RealFormSpec::Sp2p2q { p, q } => {
            let k = structural_matrix(StructuralKind::Kpq { p, q })?;
            conj(&k, x)
        }
        RealFormSpec::SoStar2m { m } => {
            let j = structural_matrix(StructuralKind::Jn { n: m })?;
            conj(&j, x)
        }
    })
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind")]
pub enum FixedPointOutcome {
    #[serde(rename = "pass")]
    Pass { label: String, conjugator: CMatrix },
    #[serde(rename = "not_found")]
    NotFound { candidates_tried: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct FixedPointReport {
    /// Whether the invariant coefficients are already fixed by the base
    /// involution; a failure here rules the field out before any search.
    pub base_fixed: bool,
    pub outcome: FixedPointOutcome,
}

/// Evidence that a Higgs field is fixed by the involution of the given real
/// form: searches a finite conjugator set (the form's structural matrix,
/// the identity, then any user-supplied candidates) for g with
/// -theta(Phi) = g Phi g^{-1}, checked as the exact polynomial identity
/// g Phi = Phi' g. A Pass is a witness; NotFound is not a disproof.
///
/// `base_fixed` records the necessary condition on characteristic
/// invariants. For the forms whose involution conjugates, -theta(Phi) has
/// the invariants of -Phi, so the odd-degree coefficients must vanish and
/// a failure rules out every conjugator. For the transpose-built forms
/// -theta(Phi) shares Phi's invariants outright and the condition holds
/// automatically.
pub fn theta_fixed_point_check(
    spec: RealFormSpec,
    pair: &HiggsPair,
    extra_conjugators: &[CMatrix],
) -> Result<FixedPointReport> {
    spec.validate()?;
    if pair.entries.nrows() != spec.matrix_size() {
        return Err(Error::domain(format!(
            "field acts on size {}, the form on size {}",
            pair.entries.nrows(),
            spec.matrix_size()
        )));
    }
    // Validates the pair's structure claims before any search.
    hitchin_map(pair)?;
    let c = pair.entries.char_poly();
    let base_fixed = match spec {
        RealFormSpec::SlnR { .. } | RealFormSpec::SuStar2m { .. } => true,
        _ => base_involution_action(&c) == c,
    };
    if !base_fixed {
        return Ok(FixedPointReport {
            base_fixed,
            outcome: FixedPointOutcome::NotFound { candidates_tried: 0 },
        });
    }
    let target = -&apply_theta(spec, &pair.entries)?;
    let mut candidates: Vec<(String, CMatrix)> = Vec::new();
    if let Some(c) = spec.conjugator() {
        candidates.push(c);
    }
    candidates.push(("identity".to_string(), CMatrix::identity(spec.matrix_size())));
    for (i, g) in extra_conjugators.iter().enumerate() {
        candidates.push((format!("user[{i}]"), g.clone()));
    }
    let mut tried = 0;
    for (label, g) in candidates {
        if !g.is_square() || g.nrows() != spec.matrix_size() || g.det().is_zero() {
            continue;
        }
        tried += 1;
        let gp = g.to_poly_matrix();
        if &gp * &pair.entries == &target * &gp {
            return Ok(FixedPointReport {
                base_fixed,
                outcome: FixedPointOutcome::Pass { label, conjugator: g },
            });
        }
    }
    Ok(FixedPointReport {
        base_fixed,
        outcome: FixedPointOutcome::NotFound { candidates_tried: tried },
    })
}

/// Topological invariants of a real structure on the base curve, as far as
/// the component-count formulas consume them. The analytic hypotheses
/// behind the formulas (simple zeros, compatibility of the differential
/// with the structure) are asserted by the caller, not re-derived here.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealStructureInvariants {
    /// Fixed circles of the structure on the curve.
    pub n_circles: usize,
    /// 0 when the complement of the fixed locus is connected, 1 otherwise.
    pub a: u8,
    /// Fixed circles on which the quadratic invariant stays positive.
    pub n_plus: usize,
    /// Fixed circles free of branch points.
    pub n_zero: usize,
    /// Zeros of the invariant fixed by the structure.
    pub u: usize,
}

impl RealStructureInvariants {
    pub fn validate(&self) -> Result<()> {
        if self.a > 1 {
            return Err(Error::domain("the invariant a takes values 0 or 1"));
        }
        if self.n_plus > self.n_circles || self.n_zero > self.n_circles {
            return Err(Error::domain(
                "circle subcounts cannot exceed the number of fixed circles",
            ));
        }
        Ok(())
    }

    fn half_u(&self) -> Result<usize> {
        if self.u % 2 != 0 {
            return Err(Error::domain("the fixed zero count u must be even"));
        }
        Ok(self.u / 2)
    }
}

fn two_to(d: u32) -> Result<u128> {
    1u128
        .checked_shl(d)
        .ok_or_else(|| Error::domain(format!("component count 2^{d} exceeds 128 bits")))
}

/// Number of components of the fibre involution over a real base point:
/// 2^d with d = 2 n_plus + u/2 - 1 when that quantity is positive, and
/// d = 1 otherwise.
pub fn aba_component_count(inv: &RealStructureInvariants) -> Result<u128> {
    inv.validate()?;
    let half = inv.half_u()?;
    let raw = 2 * inv.n_plus + half;
    let d = if raw > 0 { raw - 1 } else { 1 };
    two_to(d as u32)
}

/// Number of components of the fixed locus inside the torsion-translated
/// fibre: 2^{n_zero + u/2 - 1}. Requires at least one fixed branch point,
/// so u = 0 is rejected as an unmet hypothesis.
pub fn prym_fixed_component_count(inv: &RealStructureInvariants) -> Result<u128> {
    inv.validate()?;
    let half = inv.half_u()?;
    if inv.u == 0 {
        return Err(Error::domain(
            "the count assumes at least one branch point is fixed (u > 0)",
        ));
    }
    let d = inv.n_zero + half - 1;
    two_to(d as u32)
}

fn require_trace_free(m: &PolyMatrix, who: &str) -> Result<()> {
    if !m.trace().is_zero() {
        return Err(Error::structure(format!("{who} must be trace-free")));
    }
    Ok(())
}

/// Tensor-product map on rank-2 fields: the Kronecker sum
/// phi1 (x) 1 + 1 (x) phi2 in the lexicographic tensor basis
/// e_0(x)f_0, e_0(x)f_1, e_1(x)f_0, e_1(x)f_1. Eigenvalues of the image
/// are the pairwise sums.
pub fn isogeny_i2(phi1: &PolyMatrix, phi2: &PolyMatrix) -> Result<PolyMatrix> {
    for (m, who) in [(phi1, "first field"), (phi2, "second field")] {
        if !m.is_square() || m.nrows() != 2 {
            return Err(Error::structure(format!("{who} must be 2x2")));
        }
        require_trace_free(m, who)?;
    }
    let mut out = PolyMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    let mut v = out.get(2 * i + j, 2 * k + l).clone();
                    if j == l {
                        v = &v + phi1.get(i, k);
                    }
                    if i == k {
                        v = &v + phi2.get(j, l);
                    }
                    out.set(2 * i + j, 2 * k + l, v);
                }
            }
        }
    }
    Ok(out)
}

/// Wedge-square map on rank-4 fields: the derivation action on the six
/// coordinate 2-planes, whose eigenvalues are the sums of eigenvalue pairs.
pub fn isogeny_i3(phi: &PolyMatrix) -> Result<PolyMatrix> {
    if !phi.is_square() || phi.nrows() != 4 {
        return Err(Error::structure("wedge-square input must be 4x4"));
    }
    require_trace_free(phi, "field")?;
    phi.exterior_power(2)
}

/// The symmetric pairing on the wedge square picking out the top form:
/// Q(u ^ v, w ^ t) is the coefficient of e_0^e_1^e_2^e_3 in u^v^w^t.
/// Images of the wedge-square map are exactly anti-self-adjoint for it.
pub fn wedge_pairing_so6() -> CMatrix {
    let mut q = CMatrix::zeros(6, 6);
    let one = ExactComplex::one();
    // Basis order (01, 02, 03, 12, 13, 23); complementary pairs carry the
    // sign of the shuffle putting them back in order.
    q.set(0, 5, one.clone());
    q.set(5, 0, one.clone());
    q.set(1, 4, -&one);
    q.set(4, 1, -&one);
    q.set(2, 3, one.clone());
    q.set(3, 2, one);
    q
}

/// Exact check that a matrix is anti-self-adjoint for the wedge pairing,
/// the structural condition cutting out the orthogonal algebra on the
/// wedge square.
pub fn wedge_pairing_antisymmetric(m: &PolyMatrix) -> bool {
    if !m.is_square() || m.nrows() != 6 {
        return false;
    }
    let q = wedge_pairing_so6().to_poly_matrix();
    let lhs = &q * m;
    let rhs = &m.transpose() * &q;
    (&lhs + &rhs).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::numeric::{eigenvalues_numeric, multiset_close};
    use crate::exact::Poly;
    use crate::higgs::{GroupTag, StructureData};
    use num_complex::Complex64;
    use proptest::prelude::*;

    #[test]
    fn structural_matrix_displays() {
        assert_eq!(
            structural_matrix(StructuralKind::Ipq { p: 1, q: 1 }).unwrap(),
            CMatrix::from_ints(&[&[-1, 0], &[0, 1]])
        );
        assert_eq!(
            structural_matrix(StructuralKind::Jn { n: 1 }).unwrap(),
            CMatrix::from_ints(&[&[0, 1], &[-1, 0]])
        );
        assert_eq!(
            structural_matrix(StructuralKind::Kpq { p: 1, q: 1 }).unwrap(),
            CMatrix::from_ints(&[
                &[-1, 0, 0, 0],
                &[0, 1, 0, 0],
                &[0, 0, -1, 0],
                &[0, 0, 0, 1]
            ])
        );
        assert!(structural_matrix(StructuralKind::Ipq { p: 0, q: 2 }).is_err());
        for n in 1..=5 {
            let j = structural_matrix(StructuralKind::Jn { n }).unwrap();
            let mut minus_one = CMatrix::identity(2 * n);
            minus_one = minus_one.scale(&-&ExactComplex::one());
            assert_eq!(&j * &j, minus_one);
        }
    }

    #[test]
    fn theta_on_symmetric_matrices() {
        let x = PolyMatrix::from_int_consts(&[&[1, 2], &[2, -1]]);
        let out = apply_theta(RealFormSpec::SlnR { n: 2 }, &x).unwrap();
        assert_eq!(out, -&x);
    }

    #[test]
    fn theta_fixes_block_diagonals_for_signature_forms() {
        let x = PolyMatrix::from_int_consts(&[&[3, 0, 0], &[0, 1, 2], &[0, 5, -4]]);
        let out = apply_theta(RealFormSpec::SuPQ { p: 1, q: 2 }, &x).unwrap();
        assert_eq!(out, x);
        // An off-diagonal block flips sign instead.
        let y = PolyMatrix::from_int_consts(&[&[0, 1, 1], &[1, 0, 0], &[1, 0, 0]]);
        let flipped = apply_theta(RealFormSpec::SuPQ { p: 1, q: 2 }, &y).unwrap();
        assert_eq!(flipped, -&y);
    }

    #[test]
    fn theta_fixes_its_own_rotation_matrix() {
        let j = structural_matrix(StructuralKind::Jn { n: 2 }).unwrap().to_poly_matrix();
        let out = apply_theta(RealFormSpec::SoStar2m { m: 2 }, &j).unwrap();
        assert_eq!(out, j);
    }

    #[test]
    fn theta_rejects_size_mismatch() {
        let x = PolyMatrix::from_int_consts(&[&[0, 1], &[1, 0]]);
        assert!(apply_theta(RealFormSpec::SuPQ { p: 2, q: 1 }, &x).is_err());
        assert!(apply_theta(RealFormSpec::SlnR { n: 0 }, &x).is_err());
    }

    fn small_poly() -> impl Strategy<Value = Poly> {
        proptest::collection::vec(-3i64..=3, 0..3).prop_map(|c| Poly::from_ints(&c))
    }

    fn form_and_matrix() -> impl Strategy<Value = (RealFormSpec, PolyMatrix)> {
        let specs = prop_oneof![
            Just(RealFormSpec::SlnR { n: 3 }),
            Just(RealFormSpec::SuStar2m { m: 1 }),
            Just(RealFormSpec::SuPQ { p: 1, q: 2 }),
            Just(RealFormSpec::SoPQ { p: 2, q: 1 }),
            Just(RealFormSpec::Sp2nR { n: 1 }),
            Just(RealFormSpec::Sp2p2q { p: 1, q: 1 }),
            Just(RealFormSpec::SoStar2m { m: 1 }),
        ];
        specs.prop_flat_map(|spec| {
            let size = spec.matrix_size();
            proptest::collection::vec(
                proptest::collection::vec(small_poly(), size),
                size,
            )
            .prop_map(move |rows| (spec, PolyMatrix::new(rows)))
        })
    }

    proptest! {
        #[test]
        fn theta_is_an_involution((spec, x) in form_and_matrix()) {
            let once = apply_theta(spec, &x).unwrap();
            let twice = apply_theta(spec, &once).unwrap();
            prop_assert_eq!(twice, x);
        }
    }

    fn sl2_pair(entries: PolyMatrix) -> HiggsPair {
        HiggsPair::new(
            GroupTag::Sl,
            2,
            entries,
            Some(StructureData::DetTrivial { asserted: true }),
        )
        .unwrap()
    }

    #[test]
    fn fixed_point_witness_for_split_rank_two() {
        // Phi = [[0, w], [1, 0]]: -theta(Phi) is the transpose, and the
        // coordinate swap conjugates one into the other.
        let w = Poly::from_ints(&[0, 1]);
        let entries = PolyMatrix::new(vec![
            vec![Poly::zero(), w],
            vec![Poly::one(), Poly::zero()],
        ]);
        let pair = sl2_pair(entries);
        let swap = CMatrix::from_ints(&[&[0, 1], &[1, 0]]);
        let report =
            theta_fixed_point_check(RealFormSpec::SlnR { n: 2 }, &pair, &[swap.clone()]).unwrap();
        assert!(report.base_fixed);
        match report.outcome {
            FixedPointOutcome::Pass { label, conjugator } => {
                assert_eq!(label, "user[0]");
                assert_eq!(conjugator, swap);
            }
            other => panic!("expected a witness, got {other:?}"),
        }
    }

    #[test]
    fn nonzero_trace_blocks_the_search_for_conjugation_forms() {
        let entries = PolyMatrix::from_int_consts(&[&[1, 0], &[0, 1]]);
        let pair = HiggsPair::new(GroupTag::Gl, 2, entries, None).unwrap();
        let report = theta_fixed_point_check(RealFormSpec::SuPQ { p: 1, q: 1 }, &pair, &[]).unwrap();
        assert!(!report.base_fixed);
        match report.outcome {
            FixedPointOutcome::NotFound { candidates_tried } => {
                assert_eq!(candidates_tried, 0);
            }
            other => panic!("search should have been skipped, got {other:?}"),
        }
    }

    #[test]
    fn transpose_forms_have_no_base_obstruction() {
        // -theta is transpose-conjugation for the split form, so even a
        // traceful field keeps its invariants; diag(1,1) is literally
        // fixed and the identity witnesses it.
        let entries = PolyMatrix::from_int_consts(&[&[1, 0], &[0, 1]]);
        let pair = HiggsPair::new(GroupTag::Gl, 2, entries, None).unwrap();
        let report = theta_fixed_point_check(RealFormSpec::SlnR { n: 2 }, &pair, &[]).unwrap();
        assert!(report.base_fixed);
        match report.outcome {
            FixedPointOutcome::Pass { label, .. } => assert_eq!(label, "identity"),
            other => panic!("expected the identity to witness, got {other:?}"),
        }
    }

    #[test]
    fn signature_form_fixes_off_diagonal_fields() {
        // theta negates a block-off-diagonal field, so -theta fixes it
        // entrywise and the identity is the witness; the signature matrix
        // itself anticommutes and cannot be one.
        let w = Poly::from_ints(&[2, 3]);
        let entries = PolyMatrix::new(vec![
            vec![Poly::zero(), w],
            vec![Poly::from_ints(&[5]), Poly::zero()],
        ]);
        let pair = sl2_pair(entries);
        let report = theta_fixed_point_check(RealFormSpec::SuPQ { p: 1, q: 1 }, &pair, &[]).unwrap();
        assert!(report.base_fixed);
        match report.outcome {
            FixedPointOutcome::Pass { label, .. } => assert_eq!(label, "identity"),
            other => panic!("expected an entrywise fixed field to pass, got {other:?}"),
        }
    }

    #[test]
    fn component_count_case_split() {
        let base = RealStructureInvariants { n_circles: 3, a: 0, n_plus: 0, n_zero: 0, u: 0 };
        let count = |n_plus, u| {
            aba_component_count(&RealStructureInvariants { n_plus, u, ..base }).unwrap()
        };
        assert_eq!(count(1, 0), 2);
        assert_eq!(count(0, 2), 1);
        assert_eq!(count(0, 0), 2); // the fallback branch
        assert_eq!(count(2, 4), 32); // d = 4 + 2 - 1
        assert!(aba_component_count(&RealStructureInvariants { u: 3, ..base }).is_err());
        assert!(aba_component_count(&RealStructureInvariants { n_plus: 4, ..base }).is_err());
    }

    #[test]
    fn prym_count_and_hypothesis_gate() {
        let base = RealStructureInvariants { n_circles: 3, a: 0, n_plus: 0, n_zero: 0, u: 0 };
        let count = |n_zero, u| {
            prym_fixed_component_count(&RealStructureInvariants { n_zero, u, ..base })
        };
        assert_eq!(count(2, 2).unwrap(), 4);
        assert_eq!(count(0, 2).unwrap(), 1);
        assert!(count(1, 0).is_err(), "u = 0 contradicts a fixed branch point");
        assert!(count(1, 3).is_err());
        // Monotone in the circle count.
        assert!(count(3, 2).unwrap() > count(2, 2).unwrap());
    }

    fn diag_poly(vals: &[i64]) -> PolyMatrix {
        let n = vals.len();
        let mut m = PolyMatrix::zeros(n, n);
        for (i, &v) in vals.iter().enumerate() {
            m.set(i, i, Poly::from_ints(&[v]));
        }
        m
    }

    #[test]
    fn kronecker_sum_eigenvalues() {
        let phi1 = diag_poly(&[1, -1]);
        let phi2 = diag_poly(&[2, -2]);
        let image = isogeny_i2(&phi1, &phi2).unwrap();
        assert!(image.trace().is_zero());
        // Char poly (x-3)(x-1)(x+1)(x+3) = x^4 - 10x^2 + 9.
        let cp = image.char_poly();
        assert_eq!(cp[0], Poly::zero());
        assert_eq!(cp[1], Poly::from_ints(&[-10]));
        assert_eq!(cp[2], Poly::zero());
        assert_eq!(cp[3], Poly::from_ints(&[9]));
    }

    #[test]
    fn kronecker_sum_on_polynomial_fields() {
        let w = Poly::from_ints(&[0, 1]);
        let phi1 = PolyMatrix::new(vec![
            vec![Poly::zero(), w.clone()],
            vec![Poly::one(), Poly::zero()],
        ]);
        let phi2 = PolyMatrix::new(vec![
            vec![Poly::zero(), Poly::from_ints(&[1, 0, 2])],
            vec![Poly::one(), Poly::zero()],
        ]);
        let image = isogeny_i2(&phi1, &phi2).unwrap();
        let z0 = ExactComplex::from_ratio(3, 2);
        let e1 = eigenvalues_numeric(&phi1, &z0, 1e-9).unwrap();
        let e2 = eigenvalues_numeric(&phi2, &z0, 1e-9).unwrap();
        let mut sums: Vec<Complex64> = Vec::new();
        for a in &e1 {
            for b in &e2 {
                sums.push(a + b);
            }
        }
        let image_eigs = eigenvalues_numeric(&image, &z0, 1e-9).unwrap();
        assert!(multiset_close(&sums, &image_eigs, 1e-6));
    }

    #[test]
    fn wedge_square_pairwise_sums() {
        let phi = diag_poly(&[1, 2, -3, 0]);
        let image = isogeny_i3(&phi).unwrap();
        assert!(image.trace().is_zero());
        // Eigenvalues {3, -2, 1, -1, 2, -3}: closed under negation, char
        // poly (x^2-9)(x^2-4)(x^2-1) = x^6 - 14x^4 + 49x^2 - 36.
        let cp = image.char_poly();
        let expect = [0i64, -14, 0, 49, 0, -36];
        for (c, e) in cp.iter().zip(expect) {
            assert_eq!(c, &Poly::from_ints(&[e]));
        }
        assert!(wedge_pairing_antisymmetric(&image));
    }

    #[test]
    fn wedge_square_orthogonality_for_polynomial_fields() {
        let mut phi = PolyMatrix::zeros(4, 4);
        phi.set(0, 1, Poly::from_ints(&[1, 2]));
        phi.set(1, 0, Poly::one());
        phi.set(2, 3, Poly::from_ints(&[0, 0, 1]));
        phi.set(3, 2, Poly::from_ints(&[-1]));
        phi.set(0, 0, Poly::from_ints(&[4]));
        phi.set(1, 1, Poly::from_ints(&[-4]));
        let image = isogeny_i3(&phi).unwrap();
        assert!(wedge_pairing_antisymmetric(&image));
        let z0 = ExactComplex::from_int(2);
        let eigs = eigenvalues_numeric(&phi, &z0, 1e-9).unwrap();
        let mut sums = Vec::new();
        for i in 0..4 {
            for j in i + 1..4 {
                sums.push(eigs[i] + eigs[j]);
            }
        }
        let image_eigs = eigenvalues_numeric(&image, &z0, 1e-9).unwrap();
        assert!(multiset_close(&sums, &image_eigs, 1e-6));
    }

    #[test]
    fn isogenies_reject_traces_and_zero_maps_to_zero() {
        let traceful = PolyMatrix::from_int_consts(&[&[1, 0], &[0, 0]]);
        let zero2 = PolyMatrix::zeros(2, 2);
        assert!(isogeny_i2(&traceful, &zero2).is_err());
        assert!(isogeny_i2(&zero2, &traceful).is_err());
        assert!(isogeny_i2(&zero2, &zero2).unwrap().is_zero());
        assert!(isogeny_i3(&PolyMatrix::zeros(4, 4)).unwrap().is_zero());
        assert!(isogeny_i3(&PolyMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn real_form_wire_format() {
        let spec = RealFormSpec::SuPQ { p: 1, q: 2 };
        let v = serde_json::to_value(spec).unwrap();
        assert_eq!(v, serde_json::json!({"form": "su_p_q", "p": 1, "q": 2}));
        let back: RealFormSpec = serde_json::from_value(v).unwrap();
        assert_eq!(back, spec);
    }
}
