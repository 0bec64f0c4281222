use fermi_absorption::exact::{
    degeneracy_kx, degeneracy_kx_cylindric, exact_line_list, franck_condon_factor, shell_filling, Truncation,
};
use fermi_absorption::finite_temperature::spectrum_finite_t;
use fermi_absorption::model::{atom_number, chemical_potential, fermi_energy};
use fermi_absorption::oracles::enumerate_states;
use fermi_absorption::output::{parse_file, serialize_spectrum};
use fermi_absorption::scenario::Format;
use fermi_absorption::spectrum::SpectrumMeta;
use fermi_absorption::thomas_fermi::tf_lineshape_t0;
use fermi_absorption::{GasState, GridSpec, LightSpec, Spectrum, TrapSpec};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fc_detailed_balance(n in 0u32..60, m in -30i64..60, alpha in 0.05f64..9.0) {
        prop_assume!(n as i64 + m >= 0);
        let up = franck_condon_factor(n, m, alpha).unwrap();
        let down = franck_condon_factor((n as i64 + m) as u32, -m, alpha).unwrap();
        prop_assert!((0.0..=1.0).contains(&up));
        prop_assert!((up - down).abs() <= 1e-12 * up.max(1e-300) + 1e-300, "{} vs {}", up, down);
    }

    #[test]
    fn fc_rows_sum_to_one(n in 0u32..30, alpha in 0.1f64..6.0) {
        let m_max = (alpha * alpha + 20.0 * alpha * (n as f64 + 1.0).sqrt() + 40.0) as i64;
        let total: f64 = (-(n as i64)..=m_max).map(|m| franck_condon_factor(n, m, alpha).unwrap()).sum();
        prop_assert!((total - 1.0).abs() < 1e-10, "{}", total);
    }

    #[test]
    fn fc_mean_sideband_is_recoil(n in 0u32..25, alpha in 0.1f64..5.0) {
        let m_max = (alpha * alpha + 20.0 * alpha * (n as f64 + 1.0).sqrt() + 40.0) as i64;
        let mean: f64 = (-(n as i64)..=m_max).map(|m| m as f64 * franck_condon_factor(n, m, alpha).unwrap()).sum();
        prop_assert!((mean - alpha * alpha).abs() < 1e-8 * (1.0 + alpha * alpha), "{}", mean);
    }

    #[test]
    fn cylindric_degeneracy_matches_count(n_x in 0u32..40, n_f in 0u32..40, lambda in 1u32..8) {
        let l = lambda as f64;
        prop_assert_eq!(degeneracy_kx_cylindric(n_x, n_f, l), degeneracy_kx(n_x, n_f, l, l));
    }

    #[test]
    fn enumeration_matches_degeneracy_sum(bound in 0u32..12, ly in 1u32..4, lz in 1u32..4) {
        let states = enumerate_states(bound as f64, ly as f64, lz as f64).unwrap();
        let expected: u64 = (0..=bound).map(|nx| degeneracy_kx(nx, bound, ly as f64, lz as f64)).sum();
        prop_assert_eq!(states.len() as u64, expected);
    }

    #[test]
    fn shell_filling_holds_n_atoms(n in 1u64..400, ly in 1u32..6, lz in 1u32..6) {
        let f = shell_filling(n, ly as f64, lz as f64).unwrap();
        prop_assert!((f.total() - n as f64).abs() < 1e-9 * n as f64);
        prop_assert!(f.top_shell_fraction > 0.0 && f.top_shell_fraction <= 1.0);
    }

    #[test]
    fn exact_sum_rule(n in 1u64..120, lambda in 1u32..6, alpha in 0.5f64..6.0, dipole in 0.1f64..3.0) {
        let trap = TrapSpec::cylindrical(lambda as f64).unwrap();
        let light = LightSpec::new(alpha, vec![fermi_absorption::ExcitedLine { offset: 0.0, dipole_sq: dipole }]).unwrap();
        let lines = exact_line_list(&trap, &light, n, Truncation::default()).unwrap();
        let target = n as f64 * dipole;
        prop_assert!((lines.total_weight / target - 1.0).abs() < 1e-6);
        prop_assert!(lines.lines.iter().all(|l| l.weight >= 0.0));
    }

    #[test]
    fn chemical_potential_recovers_n_and_falls_with_t(n in 10u64..100_000, t1 in 0.02f64..3.0, dt in 0.01f64..1.0) {
        let ef = fermi_energy(n, 1.5, 0.7).unwrap();
        let (ta, tb) = (t1 * ef, (t1 + dt) * ef);
        let mu_a = chemical_potential(n, ta, 1.5, 0.7).unwrap();
        let mu_b = chemical_potential(n, tb, 1.5, 0.7).unwrap();
        prop_assert!(mu_b < mu_a);
        prop_assert!(mu_a < ef);
        prop_assert!((atom_number(mu_a, ta, 1.5, 0.7) / n as f64 - 1.0).abs() < 1e-8);
    }

    #[test]
    fn lineshape_depends_on_anisotropy_product_only(a in 0.3f64..4.0, b in 0.3f64..4.0, t in 0.05f64..1.0) {
        let light = LightSpec::single(3.0).unwrap();
        let split = TrapSpec::new(a, b, 1.0).unwrap();
        let merged = TrapSpec::new(a * b, 1.0, 1.0).unwrap();
        let grid = GridSpec::new(-60.0, 80.0, 141).unwrap().values();
        let g1 = GasState::with_reduced_temperature(800, t, &split).unwrap();
        let g2 = GasState::with_reduced_temperature(800, t, &merged).unwrap();
        let s1 = spectrum_finite_t(&grid, &split, &light, &g1).unwrap();
        let s2 = spectrum_finite_t(&grid, &merged, &light, &g2).unwrap();
        let peak = s1.peak_value();
        for (x, y) in s1.intensity.iter().zip(&s2.intensity) {
            prop_assert!((x - y).abs() <= 1e-8 * peak);
        }
        let z1 = tf_lineshape_t0(&grid, &split, &light, 800).unwrap();
        let z2 = tf_lineshape_t0(&grid, &merged, &light, 800).unwrap();
        for (x, y) in z1.intensity.iter().zip(&z2.intensity) {
            prop_assert!((x - y).abs() <= 1e-12 * z1.peak_value());
        }
    }

    #[test]
    fn equal_frequency_lineshape_is_symmetric_about_recoil(t in 0.05f64..2.0, alpha in 1.0f64..9.0) {
        let trap = TrapSpec::isotropic();
        let light = LightSpec::single(alpha).unwrap();
        let gas = GasState::with_reduced_temperature(2000, t, &trap).unwrap();
        let c = alpha * alpha;
        let grid: Vec<f64> = (-40..=40).map(|i| c + i as f64 * 1.7).collect();
        let s = spectrum_finite_t(&grid, &trap, &light, &gas).unwrap();
        let n = s.len();
        for i in 0..n / 2 {
            let (l, r) = (s.intensity[i], s.intensity[n - 1 - i]);
            prop_assert!((l - r).abs() <= 1e-7 * s.peak_value(), "{} {}", l, r);
        }
    }

    #[test]
    fn serialization_round_trip(values in prop::collection::vec(-1e300f64..1e300, 0..200), lo in -1e3f64..1e3) {
        let grid: Vec<f64> = (0..values.len()).map(|i| lo + i as f64 * 0.37).collect();
        let mut meta = SpectrumMeta { method: "prop".into(), ..SpectrumMeta::default() };
        meta.extras.insert("lo".into(), lo);
        let s = Spectrum::new(grid, values.iter().map(|v| v.abs()).collect(), meta).unwrap();
        for format in [Format::Csv, Format::Json] {
            let back = parse_file(&serialize_spectrum(&s, format), format).unwrap();
            prop_assert_eq!(&back.blocks[0].spectrum.grid, &s.grid);
            prop_assert_eq!(&back.blocks[0].spectrum.intensity, &s.intensity);
        }
    }
}
