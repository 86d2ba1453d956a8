//! Every library operation must stay reachable from the dispatch in
//! `run.rs`. The table in that file names, for each operation, the call it
//! rides on; this test pins the table against the canonical operation list
//! and checks the named calls still exist in the dispatch source.

use hitchin_kit::run::OPERATION_COVERAGE;

/// The full set of public library operations the tool is expected to expose.
const REQUIRED_OPS: &[&str] = &[
    // exact layer
    "char_poly",
    "traces_to_coeffs",
    "coeffs_to_traces",
    "exterior_power",
    "pfaffian",
    "eigenvalues_numeric",
    // closed-form counts
    "h0_canonical_power",
    "hitchin_base_dim",
    "moduli_dim",
    "spectral_genus",
    "upp_genera",
    "parabolic_moduli_dim",
    "torsion_two_count",
    // Higgs pairs
    "check_structure",
    "hitchin_map",
    "hitchin_section",
    "stability_certificate",
    "base_involution_action",
    // spectral curves
    "from_higgs",
    "classify",
    "quotient_curve_upp",
    "monodromy_transitive",
    // parabolic structures
    "parabolic_degree",
    "parabolic_slope",
    "induced_sub_structure",
    "parabolic_semistable",
    "check_minimal_residues",
    // irregular singularities
    "leading_difference",
    "anti_stokes",
    "half_periods",
    "sectors",
    "stokes_factor_shape",
    "factor_matrix",
    "formal_monodromy",
    // quivers and hyperpolygons
    "alpha_slope",
    "star_stability",
    "polygon_semistable_points",
    "moment_maps",
    "solve_level_set",
    "hyperpolygon_to_higgs",
    // involutions and component counts
    "structural_matrix",
    "apply_theta",
    "theta_fixed_point_check",
    "aba_component_count",
    "prym_fixed_component_count",
    "isogeny_i2",
    "isogeny_i3",
];

#[test]
fn every_operation_has_a_cli_route() {
    for op in REQUIRED_OPS {
        assert!(
            OPERATION_COVERAGE.iter().any(|(name, _)| name == op),
            "operation {op} has no route in OPERATION_COVERAGE"
        );
    }
}

#[test]
fn every_route_exists_in_the_dispatch_source() {
    let source = include_str!("../src/run.rs");
    // Ignore the coverage table itself so a stale route cannot satisfy the
    // check by appearing only in its own row.
    let dispatch = source.split("OPERATION_COVERAGE").next().unwrap();
    for (op, route) in OPERATION_COVERAGE {
        assert!(
            dispatch.contains(route),
            "route {route} for operation {op} does not appear in run.rs"
        );
    }
}
