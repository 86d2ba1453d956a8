//! Chart-level Higgs pairs: a square polynomial matrix together with a
//! structure-group tag and the data needed to check membership in the
//! corresponding isotropy condition. Provides the structure checks, the
//! Hitchin map per group, the companion-matrix section, the involution on
//! the base, and a one-sided stability certificate backed by spectral
//! monodromy.

use crate::error::{Error, Result};
use crate::exact::{CMatrix, ExactComplex, Poly, PolyMatrix};
use crate::spectral;
use serde::{Deserialize, Serialize};

/// Structure group of a pair. Block variants refer to the splitting used by
/// the off-diagonal condition; sizes travel in `StructureData::Blocks`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum GroupTag {
    #[serde(rename = "GL")]
    Gl,
    #[serde(rename = "SL")]
    Sl,
    #[serde(rename = "SO_odd")]
    SoOdd,
    #[serde(rename = "SO_even")]
    SoEven,
    #[serde(rename = "Sp")]
    Sp,
    #[serde(rename = "SU_block")]
    SuBlock,
    #[serde(rename = "Sp_block")]
    SpBlock,
}

/// Extra data a tag needs: a declared determinant-trivialization for SL, a
/// bilinear form for the orthogonal tags, block sizes for the off-diagonal
/// tags. `StandardSymplectic` selects the standard form `J` for `Sp`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum StructureData {
    #[serde(rename = "det_trivial")]
    DetTrivial { asserted: bool },
    #[serde(rename = "bilinear")]
    Bilinear { q: CMatrix },
    #[serde(rename = "standard_symplectic")]
    StandardSymplectic,
    #[serde(rename = "blocks")]
    Blocks { p: usize, q: usize },
}

/// A Higgs pair on a chart: `entries` is the field matrix, `twist_degree`
/// the degree budget of the twisting line bundle (entry degrees live under
/// `i * twist_degree` constraints only at the spectral-curve stage).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HiggsPair {
    pub n: usize,
    pub group: GroupTag,
    pub twist_degree: i64,
    pub entries: PolyMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure: Option<StructureData>,
}

impl HiggsPair {
    pub fn new(
        group: GroupTag,
        twist_degree: i64,
        entries: PolyMatrix,
        structure: Option<StructureData>,
    ) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(Error::structure("field matrix must be square and nonempty"));
        }
        let pair = HiggsPair { n: entries.nrows(), group, twist_degree, entries, structure };
        pair.validate_shape()?;
        Ok(pair)
    }

    fn validate_shape(&self) -> Result<()> {
        if self.entries.nrows() != self.n {
            return Err(Error::structure(format!(
                "declared size {} does not match matrix size {}",
                self.n,
                self.entries.nrows()
            )));
        }
        match self.group {
            GroupTag::Gl => Ok(()),
            GroupTag::Sl => match self.structure {
                Some(StructureData::DetTrivial { .. }) => Ok(()),
                _ => Err(Error::structure("SL pair needs det_trivial structure data")),
            },
            GroupTag::SoOdd | GroupTag::SoEven => {
                let want_odd = self.group == GroupTag::SoOdd;
                if (self.n % 2 == 1) != want_odd {
                    return Err(Error::structure(format!(
                        "size {} has the wrong parity for {:?}",
                        self.n, self.group
                    )));
                }
                match &self.structure {
                    Some(StructureData::Bilinear { q })
                        if q.is_square() && q.nrows() == self.n =>
                    {
                        Ok(())
                    }
                    Some(StructureData::Bilinear { .. }) => {
                        Err(Error::structure("bilinear form size mismatch"))
                    }
                    _ => Err(Error::structure("orthogonal pair needs a bilinear form")),
                }
            }
            GroupTag::Sp => {
                if self.n % 2 != 0 {
                    return Err(Error::structure("symplectic pair needs even size"));
                }
                match &self.structure {
                    Some(StructureData::StandardSymplectic) => Ok(()),
                    Some(StructureData::Bilinear { q })
                        if q.is_square() && q.nrows() == self.n =>
                    {
                        Ok(())
                    }
                    _ => Err(Error::structure(
                        "symplectic pair needs standard_symplectic or a bilinear form",
                    )),
                }
            }
            GroupTag::SuBlock => match self.structure {
                Some(StructureData::Blocks { p, q }) if p + q == self.n && p > 0 && q > 0 => Ok(()),
                Some(StructureData::Blocks { .. }) => {
                    Err(Error::structure("block sizes must be positive and sum to n"))
                }
                _ => Err(Error::structure("block pair needs block sizes")),
            },
            GroupTag::SpBlock => match self.structure {
                Some(StructureData::Blocks { p, q })
                    if 2 * (p + q) == self.n && p > 0 && q > 0 =>
                {
                    Ok(())
                }
                Some(StructureData::Blocks { .. }) => {
                    Err(Error::structure("block sizes must be positive with 2(p+q) = n"))
                }
                _ => Err(Error::structure("block pair needs block sizes")),
            },
        }
    }
}

/// The standard symplectic form `[[0, I], [-I, 0]]` of size 2m.
pub fn standard_symplectic_form(m: usize) -> CMatrix {
    let mut j = CMatrix::zeros(2 * m, 2 * m);
    for i in 0..m {
        j.set(i, m + i, ExactComplex::one());
        j.set(m + i, i, -&ExactComplex::one());
    }
    j
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionCheck {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StructureReport {
    pub group: GroupTag,
    pub pass: bool,
    pub conditions: Vec<ConditionCheck>,
}

fn condition(name: &str, pass: bool, detail: Option<String>) -> ConditionCheck {
    ConditionCheck { name: name.to_string(), pass, detail }
}

/// First nonzero entry of a matrix, as a human-readable location.
fn first_nonzero(m: &PolyMatrix) -> Option<String> {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if !m.get(i, j).is_zero() {
                return Some(format!("entry ({i},{j}) = {}", m.get(i, j).render("z")));
            }
        }
    }
    None
}

/// Check the exact structure conditions of the declared group. Returns a
/// per-condition report; malformed data (missing forms, wrong parity) is an
/// error instead.
pub fn check_structure(pair: &HiggsPair) -> Result<StructureReport> {
    pair.validate_shape()?;
    let phi = &pair.entries;
    let mut conditions = Vec::new();
    match pair.group {
        GroupTag::Gl => {}
        GroupTag::Sl => {
            let tr = phi.trace();
            conditions.push(condition(
                "trace_zero",
                tr.is_zero(),
                (!tr.is_zero()).then(|| format!("trace = {}", tr.render("z"))),
            ));
            let asserted = matches!(
                pair.structure,
                Some(StructureData::DetTrivial { asserted: true })
            );
            conditions.push(condition(
                "det_trivial_declared",
                asserted,
                (!asserted).then(|| "determinant trivialization not asserted".to_string()),
            ));
        }
        GroupTag::SoOdd | GroupTag::SoEven => {
            let Some(StructureData::Bilinear { q }) = &pair.structure else {
                unreachable!("validated above")
            };
            let sym = q.transpose() == *q;
            conditions.push(condition("form_symmetric", sym, None));
            let nondeg = !q.det().is_zero();
            conditions.push(condition(
                "form_nondegenerate",
                nondeg,
                (!nondeg).then(|| "det Q = 0".to_string()),
            ));
            if sym && nondeg {
                let qp = q.to_poly_matrix();
                let skew = &(&qp * phi) + &(&phi.transpose() * &qp);
                conditions.push(condition(
                    "orthogonal_condition",
                    skew.is_zero(),
                    first_nonzero(&skew).map(|s| format!("Q phi + phi^T Q has {s}")),
                ));
            }
        }
        GroupTag::Sp => {
            let j = symplectic_form_of(pair)?;
            let skew_ok = j.transpose() == (-&j) && !j.det().is_zero();
            conditions.push(condition(
                "form_skew_nondegenerate",
                skew_ok,
                (!skew_ok).then(|| "J must be skew and nondegenerate".to_string()),
            ));
            if skew_ok {
                let jp = j.to_poly_matrix();
                let jphi = &jp * phi;
                let diff = &jphi - &jphi.transpose();
                conditions.push(condition(
                    "symplectic_condition",
                    diff.is_zero(),
                    first_nonzero(&diff).map(|s| format!("J phi - (J phi)^T has {s}")),
                ));
            }
        }
        GroupTag::SuBlock => {
            let Some(StructureData::Blocks { p, .. }) = pair.structure else {
                unreachable!("validated above")
            };
            let bad = diagonal_block_violation(phi, p);
            conditions.push(condition(
                "off_diagonal_blocks",
                bad.is_none(),
                bad.map(|s| format!("diagonal block has {s}")),
            ));
        }
        GroupTag::SpBlock => {
            let Some(StructureData::Blocks { p, q }) = pair.structure else {
                unreachable!("validated above")
            };
            let bad = diagonal_block_violation(phi, 2 * p);
            conditions.push(condition(
                "off_diagonal_blocks",
                bad.is_none(),
                bad.map(|s| format!("diagonal block has {s}")),
            ));
            // Symplectic form arranged per block: J = diag(J_p, J_q).
            let mut j = CMatrix::zeros(pair.n, pair.n);
            let jp = standard_symplectic_form(p);
            let jq = standard_symplectic_form(q);
            for i in 0..2 * p {
                for k in 0..2 * p {
                    j.set(i, k, jp.get(i, k).clone());
                }
            }
            for i in 0..2 * q {
                for k in 0..2 * q {
                    j.set(2 * p + i, 2 * p + k, jq.get(i, k).clone());
                }
            }
            let jpm = j.to_poly_matrix();
            let jphi = &jpm * phi;
            let diff = &jphi - &jphi.transpose();
            conditions.push(condition(
                "symplectic_condition",
                diff.is_zero(),
                first_nonzero(&diff).map(|s| format!("J phi - (J phi)^T has {s}")),
            ));
        }
    }
    let pass = conditions.iter().all(|c| c.pass);
    Ok(StructureReport { group: pair.group, pass, conditions })
}

fn symplectic_form_of(pair: &HiggsPair) -> Result<CMatrix> {
    match &pair.structure {
        Some(StructureData::StandardSymplectic) => Ok(standard_symplectic_form(pair.n / 2)),
        Some(StructureData::Bilinear { q }) => Ok(q.clone()),
        _ => Err(Error::structure("symplectic pair needs a form")),
    }
}

/// `None` when both diagonal blocks (split at `p`) vanish; otherwise a
/// description of the first offending entry.
fn diagonal_block_violation(phi: &PolyMatrix, p: usize) -> Option<String> {
    let n = phi.nrows();
    for i in 0..n {
        for j in 0..n {
            let same_block = (i < p) == (j < p);
            if same_block && !phi.get(i, j).is_zero() {
                return Some(format!("entry ({i},{j}) = {}", phi.get(i, j).render("z")));
            }
        }
    }
    None
}

/// The Hitchin map: invariant-polynomial values of the field, ordered by
/// increasing twist degree. GL returns all characteristic coefficients; SL
/// and the block tags drop the vanishing trace; the orthogonal and
/// symplectic tags return the even-degree coefficients, with the Pfaffian
/// replacing the top one in the even orthogonal case.
pub fn hitchin_map(pair: &HiggsPair) -> Result<Vec<Poly>> {
    let report = check_structure(pair)?;
    if !report.pass {
        let failing = report
            .conditions
            .iter()
            .find(|c| !c.pass)
            .map(|c| c.name.clone())
            .unwrap_or_default();
        return Err(Error::structure(format!("structure condition failed: {failing}")));
    }
    let c = pair.entries.char_poly();
    let n = pair.n;
    match pair.group {
        GroupTag::Gl => Ok(c),
        GroupTag::Sl | GroupTag::SuBlock => {
            if !c[0].is_zero() {
                return Err(Error::internal("traceless field has nonzero first coefficient"));
            }
            Ok(c[1..].to_vec())
        }
        GroupTag::SoOdd => {
            // det(x - phi) = x (x^{2m} + a_1 x^{2m-2} + ... + a_m):
            // odd coefficients and the constant term vanish identically.
            for (idx, ck) in c.iter().enumerate() {
                let i = idx + 1;
                if (i % 2 == 1 || i == n) && !ck.is_zero() {
                    return Err(Error::internal(format!(
                        "odd orthogonal field has nonvanishing coefficient a_{i}"
                    )));
                }
            }
            Ok((1..=(n - 1) / 2).map(|j| c[2 * j - 1].clone()).collect())
        }
        GroupTag::SoEven => {
            for (idx, ck) in c.iter().enumerate() {
                let i = idx + 1;
                if i % 2 == 1 && !ck.is_zero() {
                    return Err(Error::internal(format!(
                        "even orthogonal field has nonvanishing odd coefficient a_{i}"
                    )));
                }
            }
            let Some(StructureData::Bilinear { q }) = &pair.structure else {
                return Err(Error::structure("even orthogonal pair needs a bilinear form"));
            };
            // Q phi is skew by the structure condition; its Pfaffian replaces
            // the determinant coefficient.
            let qphi = &q.to_poly_matrix() * &pair.entries;
            let pf = qphi.pfaffian()?;
            let mut out: Vec<Poly> = (1..n / 2).map(|j| c[2 * j - 1].clone()).collect();
            out.push(pf);
            Ok(out)
        }
        GroupTag::Sp | GroupTag::SpBlock => {
            for (idx, ck) in c.iter().enumerate() {
                let i = idx + 1;
                if i % 2 == 1 && !ck.is_zero() {
                    return Err(Error::internal(format!(
                        "symplectic field has nonvanishing odd coefficient a_{i}"
                    )));
                }
            }
            Ok((1..=n / 2).map(|j| c[2 * j - 1].clone()).collect())
        }
    }
}

/// Companion-matrix section of the Hitchin map for the type-A groups:
/// given `(a_2, ..., a_n)`, produce the pair whose characteristic polynomial
/// is `x^n + a_2 x^{n-2} + ... + a_n`.
pub fn hitchin_section(
    group: GroupTag,
    n: usize,
    a: &[Poly],
    twist_degree: i64,
) -> Result<HiggsPair> {
    match group {
        GroupTag::Gl | GroupTag::Sl => {}
        other => {
            return Err(Error::config(format!(
                "section only implemented for the type-A tags, got {other:?}"
            )))
        }
    }
    if n < 2 {
        return Err(Error::domain("section needs n >= 2"));
    }
    if a.len() != n - 1 {
        return Err(Error::domain(format!(
            "expected {} coefficients (a_2..a_n), got {}",
            n - 1,
            a.len()
        )));
    }
    let mut coeffs = Vec::with_capacity(n);
    coeffs.push(Poly::zero());
    coeffs.extend(a.iter().cloned());
    let m = PolyMatrix::companion(&coeffs);
    let structure = match group {
        GroupTag::Sl => Some(StructureData::DetTrivial { asserted: true }),
        _ => None,
    };
    HiggsPair::new(group, twist_degree, m, structure)
}

/// The involution on base coordinates induced by `phi -> -phi`:
/// `a_i -> (-1)^i a_i`.
pub fn base_involution_action(coeffs: &[Poly]) -> Vec<Poly> {
    coeffs
        .iter()
        .enumerate()
        .map(|(idx, p)| if (idx + 1) % 2 == 1 { -p } else { p.clone() })
        .collect()
}

/// One-sided stability evidence. `Stable` is only issued on a transitivity
/// proof; everything else stays `Unknown` with the reason recorded.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict")]
pub enum Certificate {
    Stable { witness: String },
    Unknown { reason: String },
}

/// Certify stability of a pair through its spectral curve: an irreducible
/// spectral curve forces stability, and transitive sheet monodromy proves
/// irreducibility. Never claims instability.
pub fn stability_certificate(pair: &HiggsPair) -> Result<Certificate> {
    let curve = spectral::from_higgs(pair)?;
    if let spectral::Diagnosis::ReducibleByShape { reason } = spectral::classify(&curve) {
        return Ok(Certificate::Unknown {
            reason: format!("spectral curve is reducible by shape: {reason}"),
        });
    }
    let report = spectral::monodromy_transitive(&curve)?;
    Ok(match report.outcome {
        spectral::MonodromyOutcome::Transitive => Certificate::Stable {
            witness: format!(
                "sheet monodromy generated by {} branch-point loops acts transitively on {} sheets",
                report.permutations.len(),
                curve.n
            ),
        },
        spectral::MonodromyOutcome::Intransitive { orbits } => Certificate::Unknown {
            reason: format!(
                "sheet monodromy is intransitive with orbit partition {orbits:?}; \
                 the characteristic polynomial likely factors"
            ),
        },
        spectral::MonodromyOutcome::Inconclusive { reason } => {
            Certificate::Unknown { reason: format!("monodromy inconclusive: {reason}") }
        }
    })
}
