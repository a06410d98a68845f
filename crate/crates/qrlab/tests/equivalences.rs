//! Equivalences between dense channel algebra and coset enumeration, and
//! ordering relations between decoder families.

mod common;

use qrlab::channels::{KrausChannel, SiteChannelSpec};
use qrlab::codes::{build_code, joint_distribution, SiteNoise};
use qrlab::diagnostics::entanglement_fidelity;
use qrlab::recovery::{decoder_channel, petz_for_code, sdp_optimal, DecoderRule, SdpParams};

fn dense_fe_petz(code_name: &str, site: &KrausChannel) -> f64 {
    let code = build_code(code_name).unwrap();
    let channel = site.tensor_power(code.n()).unwrap();
    let petz = petz_for_code(&channel, &code, None).unwrap();
    entanglement_fidelity(&petz, &channel, &code).unwrap()
}

/// Petz recovery of Pauli noise on a CSS code acts like syndrome
/// measurement plus Bayes sampling: its dense fidelity equals
/// `sqrt(sum p(l, s) p(l | s))` from enumeration.
#[test]
fn petz_equals_bayes_sampler_on_bit_flip_codes() {
    for (name, ps) in [
        ("rep3", [0.05, 0.1, 0.2, 0.3, 0.45]),
        ("rep5", [0.05, 0.1, 0.2, 0.3, 0.45]),
    ] {
        let code = build_code(name).unwrap();
        for p in ps {
            let noise = SiteNoise::bit_flip(p).unwrap();
            let joint = joint_distribution(&code, &noise).unwrap();
            let expected = joint.success_sampler(1.0).sqrt();
            let site = KrausChannel::bit_flip(p).unwrap();
            let fe = dense_fe_petz(name, &site);
            assert!(
                (fe - expected).abs() < 1e-8,
                "{name} p={p}: dense {fe} vs enumeration {expected}"
            );
        }
    }
}

#[test]
fn petz_equals_bayes_sampler_on_css422_xz_noise() {
    let code = build_code("css422").unwrap();
    for p in [0.02, 0.08, 0.15, 0.25, 0.4] {
        let noise = SiteNoise::independent_xz(p, p).unwrap();
        let joint = joint_distribution(&code, &noise).unwrap();
        let expected = joint.success_sampler(1.0).sqrt();
        let site = KrausChannel::from_site_noise(&noise, "xz").unwrap();
        let channel = site.tensor_power(4).unwrap();
        let petz = petz_for_code(&channel, &code, None).unwrap();
        let fe = entanglement_fidelity(&petz, &channel, &code).unwrap();
        assert!(
            (fe - expected).abs() < 1e-8,
            "p={p}: dense {fe} vs enumeration {expected}"
        );
    }
}

/// The alpha-tilted decoder channel reproduces the enumeration success for
/// every alpha, including the SW value at alpha = 2.
#[test]
fn sampler_channels_match_enumeration_success() {
    let code = build_code("rep3").unwrap();
    let p = 0.12;
    let noise = SiteNoise::bit_flip(p).unwrap();
    let joint = joint_distribution(&code, &noise).unwrap();
    let channel = KrausChannel::bit_flip(p).unwrap().tensor_power(3).unwrap();
    for alpha in [0.5, 1.0, 2.0, 4.0] {
        let decoder = decoder_channel(&code, &joint, DecoderRule::Sampler { alpha }).unwrap();
        let fe = entanglement_fidelity(&decoder, &channel, &code).unwrap();
        let expected = joint.success_sampler(alpha).sqrt();
        assert!(
            (fe - expected).abs() < 1e-8,
            "alpha={alpha}: dense {fe} vs enumeration {expected}"
        );
    }
}

/// ML dominates every alpha-tilted sampler pointwise on the grid.
#[test]
fn ml_dominates_tilted_samplers() {
    let code = build_code("rep3").unwrap();
    for i in 1..=9 {
        let p = 0.05 * i as f64;
        let joint = joint_distribution(&code, &SiteNoise::bit_flip(p).unwrap()).unwrap();
        let ml = joint.success_ml();
        for alpha in [0.5, 1.0, 2.0, 4.0] {
            let s = joint.success_sampler(alpha);
            assert!(
                ml >= s - 1e-12,
                "p={p} alpha={alpha}: ml {ml} < sampler {s}"
            );
        }
    }
}

/// Petz two-way bound against the SDP optimum on SDP-scale instances.
#[test]
fn petz_two_way_bound_on_small_instances() {
    let params = SdpParams::default();
    let cases: Vec<(&str, KrausChannel)> = vec![
        ("trivial1", KrausChannel::amplitude_damping(0.25).unwrap()),
        ("trivial1", KrausChannel::depolarizing(0.3).unwrap()),
        (
            "rep2",
            KrausChannel::bit_flip(0.15)
                .unwrap()
                .tensor_power(2)
                .unwrap(),
        ),
        (
            "rep3",
            KrausChannel::amplitude_damping(0.2)
                .unwrap()
                .tensor_power(3)
                .unwrap(),
        ),
    ];
    for (name, channel) in cases {
        let code = build_code(name).unwrap();
        let petz = petz_for_code(&channel, &code, None).unwrap();
        let fe_petz = entanglement_fidelity(&petz, &channel, &code).unwrap();
        let sol = sdp_optimal(&channel, &code, &params).unwrap();
        assert!(sol.converged, "{name}: solver did not converge");
        let fe_opt = sol.fe();
        assert!(
            fe_opt * fe_opt - 1e-6 <= fe_petz && fe_petz <= fe_opt + 1e-6,
            "{name}: petz {fe_petz} outside [{}, {}]",
            fe_opt * fe_opt,
            fe_opt
        );
    }
}

/// Tensor powers of the flip channel act on the codespace exactly as the
/// coset enumeration predicts.
#[test]
fn tensor_power_reproduces_joint_statistics() {
    let code = build_code("rep3").unwrap();
    let p = 0.2;
    let channel = KrausChannel::bit_flip(p).unwrap().tensor_power(3).unwrap();
    let joint = joint_distribution(&code, &SiteNoise::bit_flip(p).unwrap()).unwrap();
    // Project channel output of the codespace state onto syndrome sectors.
    let pi = code.codespace_projector().unwrap();
    let rho = pi.scaled(num_complex::Complex64::new(0.5, 0.0));
    let out = channel.apply(&rho);
    for s in 0..4u64 {
        let sector = code
            .syndrome_sector_projector(qrlab::codes::SyndromeSet::All, s)
            .unwrap();
        let weight = sector.matmul(&out).trace().re;
        let expected = joint.syndrome_marginal(s as usize);
        assert!(
            (weight - expected).abs() < 1e-12,
            "s={s}: {weight} vs {expected}"
        );
    }
}

/// Spectrum of the noisy codespace projector: for bit flips on rep3,
/// `E(Pi)` is diagonal with the syndrome marginal on each basis state, so
/// its eigenvalue multiset is the syndrome probabilities, twice each.
#[test]
fn noisy_projector_spectrum_matches_coset_probabilities() {
    let code = build_code("rep3").unwrap();
    let p = 0.1;
    let channel = KrausChannel::bit_flip(p).unwrap().tensor_power(3).unwrap();
    let pi = code.codespace_projector().unwrap();
    let noisy = channel.apply(&pi).hermitian_part();
    let (mut vals, _) = qrlab::qlinalg::eig_hermitian(&noisy).unwrap();
    let joint = joint_distribution(&code, &SiteNoise::bit_flip(p).unwrap()).unwrap();
    let mut expected: Vec<f64> = (0..4)
        .flat_map(|s| {
            let m = joint.syndrome_marginal(s);
            [m, m]
        })
        .collect();
    vals.sort_by(f64::total_cmp);
    expected.sort_by(f64::total_cmp);
    for (v, e) in vals.iter().zip(expected.iter()) {
        assert!((v - e).abs() < 1e-12, "{v} vs {e}");
    }
}

/// A mismatched Bayes sampler with an optimistic noise estimate can beat
/// its own matched diagonal at finite size: the sampling posterior
/// sharpens towards the ML choice as the assumed rate shrinks. Pointwise
/// diagonal dominance therefore holds for the ML classifier, which
/// dominates every student, matched or not.
#[test]
fn mismatched_sampler_exceeds_its_diagonal_but_not_ml() {
    let code = build_code("rep3").unwrap();
    let p_star = 0.1;
    let truth = joint_distribution(&code, &SiteNoise::bit_flip(p_star).unwrap()).unwrap();
    let diag_success = truth.success_sampler(1.0);

    // Student assumes much cleaner noise.
    let student = joint_distribution(&code, &SiteNoise::bit_flip(0.02).unwrap()).unwrap();
    let mut cross_success = 0.0;
    for s in 0..truth.n_syndromes() {
        let q = student.posterior(s, 1.0);
        for c in 0..truth.n_classes() {
            cross_success += truth.prob(c, s) * q[c];
        }
    }
    assert!(
        cross_success > diag_success + 1e-3,
        "expected the optimistic student to beat the matched sampler: {cross_success} vs {diag_success}"
    );
    // Nothing beats the matched ML decoder.
    assert!(cross_success <= truth.success_ml() + 1e-12);
}

/// The channel spec vocabulary builds consistent product channels.
#[test]
fn channel_specs_round_trip_through_products() {
    for name in ["bitflip", "phaseflip", "depol", "xz"] {
        let spec: SiteChannelSpec = name.parse().unwrap();
        let p = 0.17;
        let site = spec.channel(p).unwrap();
        let noise = spec.site_noise(p).unwrap().unwrap();
        let direct = KrausChannel::from_site_noise(&noise, "direct").unwrap();
        assert!(
            qrlab::channels::channel_distance(&site, &direct).unwrap() < 1e-12,
            "{name}"
        );
    }
}
