use approx::{assert_abs_diff_eq, assert_relative_eq};
use proptest::prelude::*;

use super::*;

fn healthy_nc() -> ParameterSet {
    ParameterSet::healthy(Variant::NonCapillary)
}

fn healthy_c() -> ParameterSet {
    ParameterSet::healthy(Variant::Capillary)
}

const T_HB: f64 = 60.0 / 64.0;

#[test]
fn elastance_at_onset_is_passive() {
    let p = healthy_nc();
    let lv = &p.chambers[Chamber::LeftVentricle];
    assert_relative_eq!(elastance(lv, 0.0, T_HB), 0.126, max_relative = 1e-14);
}

#[test]
fn elastance_at_peak_is_passive_plus_active() {
    let p = healthy_nc();
    let lv = &p.chambers[Chamber::LeftVentricle];
    let e = elastance(lv, lv.contraction_duration, T_HB);
    assert_relative_eq!(e, 0.126 + 8.442, max_relative = 1e-14);
    assert_relative_eq!(e, 8.568, max_relative = 1e-12);
}

#[test]
fn elastance_half_cosine_midpoints() {
    let p = healthy_nc();
    let lv = &p.chambers[Chamber::LeftVentricle];
    let half = 0.126 + 0.5 * 8.442;
    let mid_up = elastance(lv, lv.contraction_duration / 2.0, T_HB);
    let mid_down =
        elastance(lv, lv.contraction_duration + lv.relaxation_duration / 2.0, T_HB);
    assert_relative_eq!(mid_up, half, max_relative = 1e-12);
    assert_relative_eq!(mid_down, half, max_relative = 1e-12);
    assert_relative_eq!(mid_up, 4.347, max_relative = 1e-12);
}

#[test]
fn elastance_is_periodic_and_bounded() {
    let p = healthy_nc();
    for c in Chamber::ALL {
        let ch = &p.chambers[c];
        for k in 0..400 {
            let t = 0.011 * k as f64;
            let e = elastance(ch, t, T_HB);
            assert!(e >= ch.passive_elastance - 1e-15);
            assert!(e <= ch.passive_elastance + ch.active_elastance + 1e-15);
            assert_abs_diff_eq!(e, elastance(ch, t + T_HB, T_HB), epsilon = 1e-10);
        }
    }
}

#[test]
fn elastance_is_continuous_across_the_cycle_wrap() {
    // NC left atrium has T_C + T_R = 0.95 s > T_HB; the clamped relaxation
    // must still bring the activation back to zero at the wrap point.
    let p = healthy_nc();
    let la = &p.chambers[Chamber::LeftAtrium];
    let eps = 1e-9;
    let before = elastance(la, la.contraction_onset - eps, T_HB);
    let after = elastance(la, la.contraction_onset + eps, T_HB);
    assert_abs_diff_eq!(before, la.passive_elastance, epsilon = 1e-6);
    assert_abs_diff_eq!(before, after, epsilon = 1e-5);
}

#[test]
fn chamber_pressure_examples() {
    let ch = ChamberParams {
        active_elastance: 1.0,
        passive_elastance: 1.0,
        contraction_duration: 0.1,
        relaxation_duration: 0.1,
        contraction_onset: 0.0,
        resting_volume: 10.0,
    };
    assert_eq!(chamber_pressure(&ch, 3.0, 10.0, 0.0), 0.0);
    assert_relative_eq!(chamber_pressure(&ch, 8.568, 110.0, 0.0), 856.8, max_relative = 1e-14);
    assert_relative_eq!(chamber_pressure(&ch, 2.0, 20.0, 5.0), 25.0, max_relative = 1e-14);
}

#[test]
fn valve_law_examples() {
    let v = ValveParams { r_min: 7.5e-3, r_max: 75006.2 };
    // open: forward Ohm law
    let q_open = (10.0 - 5.0) / valve_resistance(&v, 10.0, 5.0);
    assert_relative_eq!(q_open, 5.0 / 7.5e-3, max_relative = 1e-14);
    // closed: near-zero backflow leak
    let q_closed = (5.0 - 10.0) / valve_resistance(&v, 5.0, 10.0);
    assert_relative_eq!(q_closed, -5.0 / 75006.2, max_relative = 1e-14);
    // tie opens the valve and carries zero flux
    assert_eq!(valve_resistance(&v, 7.0, 7.0), v.r_min);
    assert_eq!((7.0 - 7.0) / valve_resistance(&v, 7.0, 7.0), 0.0);
}

#[test]
fn smooth_valve_law_blends_between_regimes() {
    let v = ValveParams { r_min: 7.5e-3, r_max: 75006.2 };
    let law = ValveLaw::Smooth { steepness: 80.0 };
    let r_mid = valve_resistance_with(&v, 7.0, 7.0, law);
    assert!(r_mid > v.r_min && r_mid < v.r_max);
    assert_relative_eq!(valve_resistance_with(&v, 27.0, 7.0, law), v.r_min, max_relative = 1e-6);
    assert_relative_eq!(valve_resistance_with(&v, 7.0, 27.0, law), v.r_max, max_relative = 1e-3);
}

/// State used by the frozen straight-line oracle below.
fn oracle_state_nc() -> StateVector {
    let mut s = StateVector::zeros(Variant::NonCapillary);
    s[V_LA] = 65.0;
    s[V_LV] = 120.0;
    s[V_RA] = 75.0;
    s[V_RV] = 130.0;
    s[P_AR_SYS] = 80.0;
    s[P_VEN_SYS] = 32.0;
    s[P_AR_PUL] = 16.0;
    s[P_VEN_PUL] = 7.0;
    s
}

#[test]
fn algebraic_matches_hand_computed_oracle_at_t0() {
    // Expected values computed independently (straight-line evaluation of
    // the pressure/flux relations on paper), frozen here.
    let p = healthy_nc();
    let alg = algebraic(&p, 0.0, &oracle_state_nc()).unwrap();
    assert_relative_eq!(alg[P_LA], 24.691331750965936, max_relative = 1e-13);
    assert_relative_eq!(alg[P_LV], 9.8280, max_relative = 1e-13);
    assert_relative_eq!(alg[P_RA], 9.19990526944384, max_relative = 1e-13);
    assert_relative_eq!(alg[P_RV], 7.980, max_relative = 1e-13);
    assert_relative_eq!(alg[Q_MV], 1981.7775667954584, max_relative = 1e-13);
    assert_relative_eq!(alg[Q_AV], -0.0009355493279222251, max_relative = 1e-13);
    assert_relative_eq!(alg[Q_TV], 162.6540359258454, max_relative = 1e-13);
    assert_relative_eq!(alg[Q_PV], -0.00010692449424180934, max_relative = 1e-13);
}

#[test]
fn rhs_matches_hand_computed_oracle_at_t0() {
    let p = healthy_nc();
    let d = rhs(&p, 0.0, &oracle_state_nc()).unwrap();
    assert_relative_eq!(d[V_LA], -1981.7775667954584, max_relative = 1e-13);
    assert_relative_eq!(d[V_LV], 1981.7785023447864, max_relative = 1e-13);
    assert_relative_eq!(d[V_RA], -162.6540359258454, max_relative = 1e-13);
    assert_relative_eq!(d[V_RV], 162.65414285033964, max_relative = 1e-13);
    assert_relative_eq!(d[P_AR_SYS], -0.0009745305499189845, max_relative = 1e-13);
    assert_eq!(d[P_VEN_SYS], 0.0);
    assert_relative_eq!(d[P_AR_PUL], -2.1384898848361868e-05, max_relative = 1e-13);
    assert_eq!(d[P_VEN_PUL], 0.0);
    assert_relative_eq!(d[Q_AR_SYS], 9600.0, max_relative = 1e-13);
    assert_relative_eq!(d[Q_VEN_SYS], 45600.18946111233, max_relative = 1e-13);
    assert_relative_eq!(d[Q_AR_PUL], 18000.0, max_relative = 1e-13);
    assert_relative_eq!(d[Q_VEN_PUL], -35382.66350193187, max_relative = 1e-13);
}

#[test]
fn ventricular_volume_balance_is_literal() {
    // dV_LV/dt = Q_MV - Q_AV with imposed fluxes.
    let p = healthy_nc();
    let state = oracle_state_nc();
    let mut alg = algebraic(&p, 0.0, &state).unwrap();
    alg[Q_MV] = 400.0;
    alg[Q_AV] = 300.0;
    let d = rhs_from_algebraic(&p, &state, &alg);
    assert_eq!(d[V_LV], 100.0);
}

#[test]
fn stationary_state_is_a_fixed_point() {
    // All chamber volumes at rest, all node pressures zero, all fluxes zero:
    // every pressure gradient vanishes, so the right-hand side is zero.
    for variant in [Variant::NonCapillary, Variant::Capillary] {
        let p = ParameterSet::healthy(variant);
        let mut s = StateVector::zeros(variant);
        for (i, c) in Chamber::ALL.iter().enumerate() {
            s[i] = p.chambers[*c].resting_volume;
        }
        // elastance value is irrelevant at V = V0: stressed volume is zero
        let d = rhs(&p, 0.0, &s).unwrap();
        for i in 0..s.dim() {
            assert_abs_diff_eq!(d[i], 0.0, epsilon = 1e-12);
        }
    }
}

#[test]
fn capillary_zero_gradient_gives_zero_fluxes() {
    let p = healthy_c();
    let mut s = StateVector::zeros(Variant::Capillary);
    s[V_LA] = 40.0;
    s[V_LV] = 110.0;
    s[V_RA] = 60.0;
    s[V_RV] = 130.0;
    s[P_VEN_PUL] = 9.0;
    s[P_C_PUL] = 9.0;
    let alg = algebraic(&p, 0.3, &s).unwrap();
    assert_eq!(alg[Q_C_PUL], 0.0);
    assert_eq!(alg[Q_SH], 0.0);
}

#[test]
fn dimension_mismatch_is_reported() {
    let p = healthy_c();
    let s = StateVector::zeros(Variant::NonCapillary);
    assert!(matches!(algebraic(&p, 0.0, &s), Err(crate::error::Error::VariantMismatch(_))));
    assert!(matches!(rhs(&p, 0.0, &s), Err(crate::error::Error::VariantMismatch(_))));
}

fn pseudo_random_state(variant: Variant, seed: u64) -> StateVector {
    // small deterministic LCG; adequate to scatter test states
    let mut x = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut next = || {
        x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (x >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut s = StateVector::zeros(variant);
    for i in 0..4 {
        s[i] = 5.0 + 200.0 * next();
    }
    for i in 4..8 {
        s[i] = -10.0 + 120.0 * next();
    }
    for i in 8..12 {
        s[i] = -300.0 + 600.0 * next();
    }
    if variant == Variant::Capillary {
        s[P_C_SYS] = -10.0 + 120.0 * next();
        s[P_C_PUL] = -10.0 + 120.0 * next();
    }
    s
}

#[test]
fn closed_loop_conserves_stressed_volume_at_random_states() {
    for variant in [Variant::NonCapillary, Variant::Capillary] {
        let p = ParameterSet::healthy(variant);
        for seed in 0..100u64 {
            let s = pseudo_random_state(variant, seed + 1);
            let t = 0.9 * (seed as f64 / 100.0);
            let d = rhs(&p, t, &s).unwrap();
            let rate = stressed_volume_rate(&p, &d);
            // scale by the gross volume turnover of the same rhs
            let scale: f64 = (0..4).map(|i| d[i].abs()).sum::<f64>() + 1.0;
            assert!(
                rate.abs() <= 1e-12 * scale,
                "variant {variant}, seed {seed}: rate {rate} vs scale {scale}"
            );
        }
    }
}

#[test]
fn parameter_paths_resolve_read_write() {
    let mut p = healthy_c();
    assert_eq!(p.get_path("chambers.LV.Ea").unwrap(), 2.7);
    assert_eq!(p.get_path("circ.SYS.AR.R").unwrap(), 0.5911);
    assert_eq!(p.get_path("capillary.R_SH").unwrap(), 0.35174);
    p.scale_path("circ.SYS.AR.R", 1.1).unwrap();
    assert_relative_eq!(p.get_path("circ.SYS.AR.R").unwrap(), 0.65021, max_relative = 1e-12);
    p.set_path("valves.Rmin", 0.01).unwrap();
    for v in Valve::ALL {
        assert_eq!(p.valves[v].r_min, 0.01);
    }
    assert_eq!(p.get_path("valves.Rmin").unwrap(), 0.01);
    p.set_path("valves.AV.Rmin", 0.02).unwrap();
    assert!(p.get_path("valves.Rmin").is_err(), "broadcast read with differing values");
}

#[test]
fn unknown_and_variant_errors_from_paths() {
    let mut nc = healthy_nc();
    assert!(matches!(
        nc.get_path("chambers.LV.nope"),
        Err(crate::error::Error::UnknownParameter(_))
    ));
    assert!(matches!(
        nc.set_path("capillary.R_SH", 1.0),
        Err(crate::error::Error::VariantMismatch(_))
    ));
}

#[test]
fn analysis_paths_counts_match_the_two_variants() {
    let nc = ParameterSet::analysis_paths(Variant::NonCapillary);
    let c = ParameterSet::analysis_paths(Variant::Capillary);
    assert_eq!(nc.len(), 26);
    assert_eq!(c.len(), 32);
    let base = ParameterSet::healthy(Variant::Capillary);
    for path in &c {
        base.get_path(path).unwrap();
    }
}

#[test]
fn healthy_documents_validate_and_round_trip() {
    for variant in [Variant::NonCapillary, Variant::Capillary] {
        let p = ParameterSet::healthy(variant);
        p.validate().unwrap();
        let text = p.to_toml();
        let back = ParameterSet::from_toml(&text).unwrap();
        assert_eq!(p, back);
    }
}

#[test]
fn validation_rejects_broken_documents() {
    let mut p = healthy_nc();
    p.heart_rate = 0.0;
    assert!(p.validate().is_err());

    let mut p = healthy_nc();
    p.valves.av.r_min = p.valves.av.r_max + 1.0;
    assert!(p.validate().is_err());

    let mut p = healthy_nc();
    p.capillary = Some(CapillaryParams {
        r_sys: 1.0,
        c_sys: 1.0,
        r_pul: 1.0,
        c_pul: 1.0,
        r_shunt: 1.0,
        c_shunt: 1.0,
    });
    assert!(matches!(p.validate(), Err(crate::error::Error::VariantMismatch(_))));

    let mut p = healthy_c();
    p.capillary = None;
    assert!(matches!(p.validate(), Err(crate::error::Error::VariantMismatch(_))));
}

proptest! {
    #[test]
    fn valve_flux_is_monotone_in_the_gradient(
        d1 in -50.0f64..50.0,
        d2 in -50.0f64..50.0,
        p_down in -20.0f64..120.0,
    ) {
        let v = ValveParams { r_min: 7.5e-3, r_max: 75006.2 };
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        let q = |delta: f64| (delta) / valve_resistance(&v, p_down + delta, p_down);
        prop_assert!(q(lo) <= q(hi) + 1e-12);
    }

    #[test]
    fn elastance_stays_within_band(t in 0.0f64..10.0) {
        let p = ParameterSet::healthy(Variant::Capillary);
        for c in Chamber::ALL {
            let ch = &p.chambers[c];
            let e = elastance(ch, t, T_HB);
            prop_assert!(e >= ch.passive_elastance - 1e-12);
            prop_assert!(e <= ch.passive_elastance + ch.active_elastance + 1e-12);
        }
    }
}
