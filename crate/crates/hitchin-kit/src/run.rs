//! Dispatch from a parsed task to the library and back to a JSON report.

use crate::task::{Command, Settings, TaskFile};
use hitchin_core::branes::{
    aba_component_count, apply_theta, isogeny_i2, isogeny_i3, prym_fixed_component_count,
    structural_matrix, theta_fixed_point_check, wedge_pairing_antisymmetric, RealFormSpec,
    RealStructureInvariants, StructuralKind,
};
use hitchin_core::exact::numeric::{eigenvalues_numeric, multiset_close};
use hitchin_core::exact::{
    coeffs_to_traces, serialize_rational, traces_to_coeffs, CMatrix, ExactComplex, Poly,
    PolyMatrix, Rational,
};
use hitchin_core::formulas::{
    h0_canonical_power, hitchin_base_dim, moduli_dim, parabolic_moduli_dim, spectral_genus,
    torsion_two_count, upp_genera, Group,
};
use hitchin_core::higgs::{
    base_involution_action, check_structure, hitchin_map, hitchin_section, stability_certificate,
    GroupTag, HiggsPair,
};
use hitchin_core::parabolic::{
    check_minimal_residues, induced_sub_structure, parabolic_degree, parabolic_semistable,
    parabolic_slope, ParabolicBundle, ParabolicHiggs,
};
use hitchin_core::quiver::{
    alpha_slope, hyperpolygon_to_higgs, moment_maps, polygon_semistable_points, solve_level_set,
    star_stability, Alpha, HyperpolygonPoint, P1Point, QuiverRep, StarQuiver,
};
use hitchin_core::spectral::{classify, from_higgs, monodromy_transitive, quotient_curve_upp};
use hitchin_core::wild::{factor_matrix, stokes_report, PolarData};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// Multiset-matching tolerance for the isogeny eigenvalue correspondence;
/// looser than root refinement because sums amplify root error.
const EIGEN_MATCH_TOL: f64 = 1e-6;

/// Why a task did not produce a report, mapped to the exit-code taxonomy:
/// rejected input is 2, numeric non-convergence is 3, library faults are 4.
#[derive(Debug)]
pub enum Failure {
    Schema(String),
    Numeric { msg: String, residual: f64 },
    Internal(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Schema(_) => 2,
            Failure::Numeric { .. } => 3,
            Failure::Internal(_) => 4,
        }
    }

    pub fn message(&self) -> String {
        match self {
            Failure::Schema(m) => m.clone(),
            Failure::Numeric { msg, residual } => format!("{msg} (residual {residual:e})"),
            Failure::Internal(m) => m.clone(),
        }
    }
}

impl From<hitchin_core::Error> for Failure {
    fn from(e: hitchin_core::Error) -> Self {
        use hitchin_core::Error as E;
        match e {
            E::Domain(_) | E::Structure(_) | E::Geometry(_) | E::Config(_) => {
                Failure::Schema(e.to_string())
            }
            E::Numeric { msg, residual } => Failure::Numeric { msg, residual },
            E::Internal(m) => Failure::Internal(m),
        }
    }
}

/// Deserialize a payload with a JSON-path pointer in the error message.
fn decode<'de, T: Deserialize<'de>>(payload: &'de Value) -> Result<T, Failure> {
    serde_path_to_error::deserialize(payload)
        .map_err(|e| Failure::Schema(format!("payload.{}: {}", e.path(), e.inner())))
}

fn to_value<T: Serialize>(x: &T) -> Result<Value, Failure> {
    serde_json::to_value(x).map_err(|e| Failure::Internal(format!("report serialization: {e}")))
}

fn count_value(c: u128) -> Result<Value, Failure> {
    u64::try_from(c)
        .map(Value::from)
        .map_err(|_| Failure::Schema(format!("count {c} exceeds the representable range")))
}

#[derive(Serialize)]
struct RationalValue(#[serde(serialize_with = "serialize_rational")] Rational);

/// One permutation in one-line cycle notation, fixed points omitted;
/// the identity prints as "()".
fn cycle_notation(perm: &[usize]) -> String {
    let n = perm.len();
    let mut seen = vec![false; n];
    let mut out = String::new();
    for start in 0..n {
        if seen[start] || perm[start] == start {
            seen[start] = true;
            continue;
        }
        let mut cycle = Vec::new();
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            cycle.push(i.to_string());
            i = perm[i];
        }
        out.push('(');
        out.push_str(&cycle.join(" "));
        out.push(')');
    }
    if out.is_empty() {
        out.push_str("()");
    }
    out
}

/// Rebuild a deserialized pair through the validating constructor.
fn revalidate_pair(pair: HiggsPair) -> Result<HiggsPair, Failure> {
    Ok(HiggsPair::new(pair.group, pair.twist_degree, pair.entries, pair.structure)?)
}

fn revalidate_bundle(b: ParabolicBundle) -> Result<ParabolicBundle, Failure> {
    Ok(ParabolicBundle::new(b.rank, b.degree, b.points)?)
}

pub fn run_task(task: &TaskFile, settings: &Settings) -> Result<Value, Failure> {
    match task.command {
        Command::Formulas => run_formulas(&task.payload),
        Command::Higgs => run_higgs(&task.payload),
        Command::Spectral => run_spectral(&task.payload),
        Command::Parabolic => run_parabolic(&task.payload),
        Command::Wild => run_wild(&task.payload),
        Command::Quiver => run_quiver(&task.payload, settings),
        Command::Branes => run_branes(&task.payload),
        Command::Isogeny => run_isogeny(&task.payload, settings),
    }
}

#[derive(Deserialize)]
#[serde(tag = "action", deny_unknown_fields)]
enum FormulasTask {
    #[serde(rename = "dims")]
    Dims { group: Group, genus: u64 },
    #[serde(rename = "h0")]
    H0 { genus: u64, power: u64 },
    #[serde(rename = "spectral_genus")]
    SpectralGenus { n: u64, genus: u64 },
    #[serde(rename = "upp_genera")]
    UppGenera { p: u64, genus: u64 },
    #[serde(rename = "parabolic_dim")]
    ParabolicDim { genus: u64, rank: u64, marked_points: u64 },
    #[serde(rename = "torsion")]
    Torsion { prym_dim: u64 },
}

fn run_formulas(payload: &Value) -> Result<Value, Failure> {
    Ok(match decode::<FormulasTask>(payload)? {
        FormulasTask::Dims { group, genus } => json!({
            "moduli_dim": moduli_dim(group, genus)?,
            "base_dim": hitchin_base_dim(group, genus)?,
        }),
        FormulasTask::H0 { genus, power } => {
            json!({ "dimension": h0_canonical_power(genus, power)? })
        }
        FormulasTask::SpectralGenus { n, genus } => {
            json!({ "genus": spectral_genus(n, genus)? })
        }
        FormulasTask::UppGenera { p, genus } => {
            let (g_s, g_s_bar) = upp_genera(p, genus)?;
            json!({ "g_s": g_s, "g_s_bar": g_s_bar })
        }
        FormulasTask::ParabolicDim { genus, rank, marked_points } => {
            json!({ "dimension": parabolic_moduli_dim(genus, rank, marked_points)? })
        }
        FormulasTask::Torsion { prym_dim } => {
            json!({ "count": count_value(torsion_two_count(prym_dim)?)? })
        }
    })
}

#[derive(Deserialize)]
#[serde(tag = "action", deny_unknown_fields)]
enum HiggsTask {
    #[serde(rename = "check")]
    Check { pair: HiggsPair },
    #[serde(rename = "map")]
    Map { pair: HiggsPair },
    #[serde(rename = "section")]
    Section { group: GroupTag, n: usize, coefficients: Vec<Poly>, twist_degree: i64 },
    #[serde(rename = "certificate")]
    Certificate { pair: HiggsPair },
    #[serde(rename = "involution")]
    Involution { coefficients: Vec<Poly> },
}

fn run_higgs(payload: &Value) -> Result<Value, Failure> {
    Ok(match decode::<HiggsTask>(payload)? {
        HiggsTask::Check { pair } => to_value(&check_structure(&revalidate_pair(pair)?)?)?,
        HiggsTask::Map { pair } => {
            json!({ "coefficients": hitchin_map(&revalidate_pair(pair)?)? })
        }
        HiggsTask::Section { group, n, coefficients, twist_degree } => {
            to_value(&hitchin_section(group, n, &coefficients, twist_degree)?)?
        }
        HiggsTask::Certificate { pair } => {
            to_value(&stability_certificate(&revalidate_pair(pair)?)?)?
        }
        HiggsTask::Involution { coefficients } => {
            json!({ "coefficients": base_involution_action(&coefficients) })
        }
    })
}

fn default_true() -> bool {
    true
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectralTask {
    pair: HiggsPair,
    #[serde(default = "default_true")]
    monodromy: bool,
    #[serde(default)]
    quotient: bool,
}

fn run_spectral(payload: &Value) -> Result<Value, Failure> {
    let t: SpectralTask = decode(payload)?;
    let pair = revalidate_pair(t.pair)?;
    let curve = from_higgs(&pair)?;
    let mut report = json!({
        "curve": to_value(&curve)?,
        "classification": to_value(&classify(&curve))?,
    });
    if t.quotient {
        report["quotient_curve"] = to_value(&quotient_curve_upp(&curve)?)?;
    }
    if t.monodromy {
        let m = monodromy_transitive(&curve)?;
        let cycles: Vec<String> = m.permutations.iter().map(|p| cycle_notation(p)).collect();
        report["monodromy"] = to_value(&m)?;
        report["cycles"] = json!({
            "branch_loops": cycles,
            "infinity": cycle_notation(&m.infinity_permutation),
        });
    }
    Ok(report)
}

#[derive(Deserialize)]
#[serde(tag = "action", deny_unknown_fields)]
enum ParabolicTask {
    #[serde(rename = "slope")]
    Slope { bundle: ParabolicBundle },
    #[serde(rename = "sub")]
    Sub { bundle: ParabolicBundle, sub_rank: usize, sub_degree: i64, selection: Vec<Vec<usize>> },
    #[serde(rename = "stability")]
    Stability { bundle: ParabolicBundle, bounds: Vec<i64> },
    #[serde(rename = "residues")]
    Residues { higgs: ParabolicHiggs },
}

fn run_parabolic(payload: &Value) -> Result<Value, Failure> {
    Ok(match decode::<ParabolicTask>(payload)? {
        ParabolicTask::Slope { bundle } => {
            let b = revalidate_bundle(bundle)?;
            json!({
                "degree": to_value(&RationalValue(parabolic_degree(&b)))?,
                "slope": to_value(&RationalValue(parabolic_slope(&b)))?,
            })
        }
        ParabolicTask::Sub { bundle, sub_rank, sub_degree, selection } => {
            let b = revalidate_bundle(bundle)?;
            let sub = induced_sub_structure(&b, sub_rank, sub_degree, &selection)?;
            json!({
                "bundle": to_value(&sub)?,
                "degree": to_value(&RationalValue(parabolic_degree(&sub)))?,
                "slope": to_value(&RationalValue(parabolic_slope(&sub)))?,
            })
        }
        ParabolicTask::Stability { bundle, bounds } => {
            let b = revalidate_bundle(bundle)?;
            to_value(&parabolic_semistable(&b, &bounds)?)?
        }
        ParabolicTask::Residues { higgs } => {
            let bundle = revalidate_bundle(higgs.bundle)?;
            let h = ParabolicHiggs::new(bundle, higgs.residues, higgs.regular_part)?;
            to_value(&check_minimal_residues(&h))?
        }
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WildTask {
    data: PolarData,
    /// Stokes parameter for the example factor matrices; unit by default.
    #[serde(default)]
    factor_parameter: Option<ExactComplex>,
}

fn run_wild(payload: &Value) -> Result<Value, Failure> {
    let t: WildTask = decode(payload)?;
    t.data.validate()?;
    let report = stokes_report(&t.data)?;
    let param = t.factor_parameter.unwrap_or_else(ExactComplex::one);
    let factors: Vec<Vec<CMatrix>> = report
        .poles
        .iter()
        .map(|p| p.directions.iter().map(|d| factor_matrix(d.root, &param)).collect())
        .collect();
    let mut out = to_value(&report)?;
    out["factor_matrices"] = to_value(&factors)?;
    Ok(out)
}

#[derive(Deserialize)]
#[serde(tag = "action", deny_unknown_fields)]
enum QuiverTask {
    #[serde(rename = "slope")]
    Slope { dims: Vec<usize>, alpha: Alpha },
    #[serde(rename = "stability")]
    Stability { rep: QuiverRep, alpha: Alpha },
    #[serde(rename = "polygon")]
    Polygon { points: Vec<P1Point>, weights: Vec<u64> },
    #[serde(rename = "moments")]
    Moments { point: HyperpolygonPoint },
    #[serde(rename = "solve")]
    Solve { quiver: StarQuiver, alpha: Alpha },
    #[serde(rename = "tohiggs")]
    ToHiggs { point: HyperpolygonPoint, marked_points: Vec<ExactComplex> },
}

fn run_quiver(payload: &Value, settings: &Settings) -> Result<Value, Failure> {
    Ok(match decode::<QuiverTask>(payload)? {
        QuiverTask::Slope { dims, alpha } => {
            let mut flat = vec![alpha.center];
            flat.extend(alpha.arms);
            json!({ "slope": to_value(&RationalValue(alpha_slope(&dims, &flat)?))? })
        }
        QuiverTask::Stability { rep, alpha } => {
            rep.validate()?;
            to_value(&star_stability(&rep, &alpha)?)?
        }
        QuiverTask::Polygon { points, weights } => {
            to_value(&polygon_semistable_points(&points, &weights)?)?
        }
        QuiverTask::Moments { point } => {
            point.validate()?;
            to_value(&moment_maps(&point)?)?
        }
        QuiverTask::Solve { quiver, alpha } => {
            let q = StarQuiver::new(quiver.n, quiver.r)?;
            to_value(&solve_level_set(&q, &alpha, settings.seed)?)?
        }
        QuiverTask::ToHiggs { point, marked_points } => {
            point.validate()?;
            to_value(&hyperpolygon_to_higgs(&point, &marked_points, settings.tolerance)?)?
        }
    })
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
enum CountKind {
    Aba,
    Prym,
}

#[derive(Deserialize)]
#[serde(tag = "action", deny_unknown_fields)]
enum BranesTask {
    #[serde(rename = "matrix")]
    Matrix { kind: StructuralKind },
    #[serde(rename = "theta")]
    Theta { spec: RealFormSpec, matrix: PolyMatrix },
    #[serde(rename = "fixed_point")]
    FixedPoint {
        spec: RealFormSpec,
        pair: HiggsPair,
        #[serde(default)]
        conjugators: Vec<CMatrix>,
    },
    #[serde(rename = "components")]
    Components { which: CountKind, invariants: RealStructureInvariants },
}

fn run_branes(payload: &Value) -> Result<Value, Failure> {
    Ok(match decode::<BranesTask>(payload)? {
        BranesTask::Matrix { kind } => json!({ "matrix": to_value(&structural_matrix(kind)?)? }),
        BranesTask::Theta { spec, matrix } => {
            json!({ "matrix": to_value(&apply_theta(spec, &matrix)?)? })
        }
        BranesTask::FixedPoint { spec, pair, conjugators } => {
            let pair = revalidate_pair(pair)?;
            to_value(&theta_fixed_point_check(spec, &pair, &conjugators)?)?
        }
        BranesTask::Components { which, invariants } => {
            let count = match which {
                CountKind::Aba => aba_component_count(&invariants)?,
                CountKind::Prym => prym_fixed_component_count(&invariants)?,
            };
            json!({ "count": count_value(count)? })
        }
    })
}

#[derive(Deserialize)]
#[serde(tag = "map", deny_unknown_fields)]
enum IsogenyTask {
    #[serde(rename = "i2")]
    I2 { phi1: PolyMatrix, phi2: PolyMatrix, sample_point: Option<ExactComplex> },
    #[serde(rename = "i3")]
    I3 { phi: PolyMatrix, sample_point: Option<ExactComplex> },
}

/// Numeric eigenvalue correspondence plus the exact Newton cross-check on
/// the image's invariants; every isogeny report carries both.
fn isogeny_report(
    image: PolyMatrix,
    expected_sums: Vec<Complex64>,
    z0: &ExactComplex,
    orthogonal: Option<bool>,
    tol: f64,
) -> Result<Value, Failure> {
    let size = image.nrows();
    let coeffs = image.char_poly();
    let traces = image.power_traces(size);
    let newton_consistent =
        traces_to_coeffs(&traces) == coeffs && coeffs_to_traces(&coeffs) == traces;
    let image_eigs = eigenvalues_numeric(&image, z0, tol)?;
    let pass = multiset_close(&expected_sums, &image_eigs, EIGEN_MATCH_TOL);
    let mut out = json!({
        "image": to_value(&image)?,
        "char_poly": to_value(&coeffs)?,
        "newton_consistent": newton_consistent,
        "eigenvalue_correspondence": {
            "at": to_value(z0)?,
            "tolerance": EIGEN_MATCH_TOL,
            "pass": pass,
        },
    });
    if let Some(orth) = orthogonal {
        out["orthogonal"] = json!(orth);
    }
    Ok(out)
}

fn run_isogeny(payload: &Value, settings: &Settings) -> Result<Value, Failure> {
    let default_z0 = || ExactComplex::from_ratio(3, 2);
    match decode::<IsogenyTask>(payload)? {
        IsogenyTask::I2 { phi1, phi2, sample_point } => {
            let image = isogeny_i2(&phi1, &phi2)?;
            let z0 = sample_point.unwrap_or_else(default_z0);
            let e1 = eigenvalues_numeric(&phi1, &z0, settings.tolerance)?;
            let e2 = eigenvalues_numeric(&phi2, &z0, settings.tolerance)?;
            let mut sums = Vec::with_capacity(e1.len() * e2.len());
            for a in &e1 {
                for b in &e2 {
                    sums.push(a + b);
                }
            }
            isogeny_report(image, sums, &z0, None, settings.tolerance)
        }
        IsogenyTask::I3 { phi, sample_point } => {
            let image = isogeny_i3(&phi)?;
            let z0 = sample_point.unwrap_or_else(default_z0);
            let eigs = eigenvalues_numeric(&phi, &z0, settings.tolerance)?;
            let mut sums = Vec::new();
            for i in 0..eigs.len() {
                for j in i + 1..eigs.len() {
                    sums.push(eigs[i] + eigs[j]);
                }
            }
            let orthogonal = wedge_pairing_antisymmetric(&image);
            isogeny_report(image, sums, &z0, Some(orthogonal), settings.tolerance)
        }
    }
}

/// Library operation -> the call in this file that reaches it. Operations
/// used inside another listed call name that call as their route; the test
/// suite asserts every route actually appears in the dispatch source.
pub const OPERATION_COVERAGE: &[(&str, &str)] = &[
    ("char_poly", "char_poly"),
    ("traces_to_coeffs", "traces_to_coeffs"),
    ("coeffs_to_traces", "coeffs_to_traces"),
    ("exterior_power", "isogeny_i3"),
    ("pfaffian", "hitchin_map"),
    ("eigenvalues_numeric", "eigenvalues_numeric"),
    ("h0_canonical_power", "h0_canonical_power"),
    ("hitchin_base_dim", "hitchin_base_dim"),
    ("moduli_dim", "moduli_dim"),
    ("spectral_genus", "spectral_genus"),
    ("upp_genera", "upp_genera"),
    ("parabolic_moduli_dim", "parabolic_moduli_dim"),
    ("torsion_two_count", "torsion_two_count"),
    ("check_structure", "check_structure"),
    ("hitchin_map", "hitchin_map"),
    ("hitchin_section", "hitchin_section"),
    ("stability_certificate", "stability_certificate"),
    ("base_involution_action", "base_involution_action"),
    ("from_higgs", "from_higgs"),
    ("classify", "classify"),
    ("quotient_curve_upp", "quotient_curve_upp"),
    ("monodromy_transitive", "monodromy_transitive"),
    ("parabolic_degree", "parabolic_degree"),
    ("parabolic_slope", "parabolic_slope"),
    ("induced_sub_structure", "induced_sub_structure"),
    ("parabolic_semistable", "parabolic_semistable"),
    ("check_minimal_residues", "check_minimal_residues"),
    ("leading_difference", "stokes_report"),
    ("anti_stokes", "stokes_report"),
    ("half_periods", "stokes_report"),
    ("sectors", "stokes_report"),
    ("stokes_factor_shape", "stokes_report"),
    ("factor_matrix", "factor_matrix"),
    ("formal_monodromy", "stokes_report"),
    ("alpha_slope", "alpha_slope"),
    ("star_stability", "star_stability"),
    ("polygon_semistable_points", "polygon_semistable_points"),
    ("moment_maps", "moment_maps"),
    ("solve_level_set", "solve_level_set"),
    ("hyperpolygon_to_higgs", "hyperpolygon_to_higgs"),
    ("structural_matrix", "structural_matrix"),
    ("apply_theta", "apply_theta"),
    ("theta_fixed_point_check", "theta_fixed_point_check"),
    ("aba_component_count", "aba_component_count"),
    ("prym_fixed_component_count", "prym_fixed_component_count"),
    ("isogeny_i2", "isogeny_i2"),
    ("isogeny_i3", "isogeny_i3"),
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_notation_forms() {
        assert_eq!(cycle_notation(&[0, 1, 2]), "()");
        assert_eq!(cycle_notation(&[1, 0]), "(0 1)");
        assert_eq!(cycle_notation(&[1, 2, 0]), "(0 1 2)");
        assert_eq!(cycle_notation(&[1, 0, 3, 2]), "(0 1)(2 3)");
    }

    #[test]
    fn schema_error_names_the_missing_field() {
        // Tagged-enum payloads buffer their content, so the path stops at
        // the payload root; the message still names the offending field.
        let payload = json!({"action": "dims", "group": {"family": "GL"}, "genus": 2});
        let err = run_formulas(&payload).unwrap_err();
        match err {
            Failure::Schema(msg) => assert!(msg.contains("missing field `n`"), "{msg}"),
            other => panic!("expected schema failure, got {other:?}"),
        }
    }

    #[test]
    fn schema_error_carries_path_for_struct_payloads() {
        let payload = json!({"pair": {"n": 2, "group": {"family": "GL"},
            "twist_degree": 2, "entries": "nope"}});
        let err = run_spectral(&payload).unwrap_err();
        match err {
            Failure::Schema(msg) => assert!(msg.contains("payload.pair.entries"), "{msg}"),
            other => panic!("expected schema failure, got {other:?}"),
        }
    }

    #[test]
    fn formulas_dims_example() {
        let payload = json!({"action": "dims", "group": {"family": "GL", "n": 2}, "genus": 2});
        let out = run_formulas(&payload).unwrap();
        assert_eq!(out, json!({"moduli_dim": 10, "base_dim": 5}));
    }

    #[test]
    fn error_taxonomy_maps_to_exit_codes() {
        use hitchin_core::Error;
        let cases = [
            (Error::domain("d"), 2),
            (Error::structure("s"), 2),
            (Error::geometry("g"), 2),
            (Error::config("c"), 2),
            (Error::numeric("n", 1e-3), 3),
            (Error::internal("i"), 4),
        ];
        for (err, code) in cases {
            assert_eq!(Failure::from(err).exit_code(), code);
        }
    }
}
