use proptest::prelude::*;
use toa_core::scenario::*;
use toa_core::Statistics;

/// Reference values for every preset.
struct PresetRow {
    preset: &'static str,
    x_arrival: f64,
    mass: f64,
    orbitals: Option<[(f64, f64, f64); 2]>,
    cm: Option<(f64, f64, f64)>,
    omega: Option<f64>,
    selector: Option<InternalSelector>,
    statistics: &'static [Statistics],
    flux: bool,
}

fn reference_table() -> Vec<PresetRow> {
    use Statistics::*;
    let levels = || Some(InternalSelector::Levels(vec![0, 1, 2, 3]));
    let coherent = || Some(InternalSelector::Coherent { re: 0.0, im: 1.0 });
    vec![
        PresetRow {
            preset: "fig1",
            x_arrival: 3.0,
            mass: 1.0,
            orbitals: Some([(-3.5, 3.0, 1.0), (0.0, 3.0, 1.0)]),
            cm: None,
            omega: None,
            selector: None,
            statistics: &[Boson, Fermion, Distinguishable],
            flux: false,
        },
        PresetRow {
            preset: "fig2",
            x_arrival: 3.0,
            mass: 1.0,
            orbitals: None,
            cm: Some((0.0, 4.0, 0.5)),
            omega: Some(0.02f64.sqrt()),
            selector: levels(),
            statistics: &[Boson, Fermion],
            flux: false,
        },
        PresetRow {
            preset: "fig3",
            x_arrival: 3.0,
            mass: 1.0,
            orbitals: None,
            cm: Some((0.0, 1.0, 1.0)),
            omega: Some(2f64.sqrt()),
            selector: levels(),
            statistics: &[Boson, Fermion],
            flux: false,
        },
        PresetRow {
            preset: "fig4",
            x_arrival: 3.0,
            mass: 1.0,
            orbitals: None,
            cm: Some((0.0, 4.0, 0.5)),
            omega: Some(0.02f64.sqrt()),
            selector: coherent(),
            statistics: &[Boson, Fermion],
            flux: true,
        },
        PresetRow {
            preset: "fig5",
            x_arrival: 3.0,
            mass: 1.0,
            orbitals: None,
            cm: Some((0.0, 1.0, 1.0)),
            omega: Some(2f64.sqrt()),
            selector: coherent(),
            statistics: &[Boson, Fermion],
            flux: false,
        },
    ]
}

#[test]
fn presets_match_reference_table() {
    let table = reference_table();
    assert_eq!(table.len(), PRESET_NAMES.len());
    for row in table {
        let c = figure_preset(row.preset).unwrap();
        assert_eq!(c.arrival_point, row.x_arrival, "{}", row.preset);
        assert_eq!(c.mass, row.mass, "{}", row.preset);
        assert_eq!(c.statistics, row.statistics, "{}", row.preset);
        assert_eq!(c.output.flux, row.flux, "{}", row.preset);
        match row.orbitals {
            Some([a, b]) => {
                assert_eq!(c.kind, ScenarioKind::PairOrbitals);
                let (ca, cb) = (c.orbital_a.unwrap(), c.orbital_b.unwrap());
                assert_eq!((ca.x0, ca.p0, ca.delta_x), a);
                assert_eq!((cb.x0, cb.p0, cb.delta_x), b);
            }
            None => assert!(c.orbital_a.is_none() && c.orbital_b.is_none()),
        }
        match row.cm {
            Some(cm) => {
                assert_eq!(c.kind, ScenarioKind::PairCmRel);
                let p = c.center_of_mass.unwrap();
                assert_eq!((p.x0, p.p0, p.delta_x), cm);
                let internal = c.internal.as_ref().unwrap();
                assert!((internal.omega - row.omega.unwrap()).abs() < 1e-15);
                assert_eq!(Some(internal.selector.clone()), row.selector);
            }
            None => assert!(c.center_of_mass.is_none() && c.internal.is_none()),
        }
    }
}

#[test]
fn fig2_preset_has_documented_internal_parameters() {
    let c = figure_preset("fig2").unwrap();
    let internal = c.internal.unwrap();
    assert_eq!(internal.selector, InternalSelector::Levels(vec![0, 1, 2, 3]));
    // Reduced mass m/2 is derived from the particle mass.
    assert_eq!(c.mass / 2.0, 0.5);
    assert!((internal.omega * internal.omega - 0.02).abs() < 1e-15);
}

#[test]
fn preset_windows_pass_the_boundary_audit_where_possible() {
    let mut c = figure_preset("fig4").unwrap();
    c.numerics.convergence_audit = false;
    let run = run_scenario(&c).unwrap();
    assert!(run.window_warnings().is_empty(), "{:?}", run.window_warnings());
}

#[test]
fn determinism_identical_csv_bytes() {
    let mut c = figure_preset("fig1").unwrap();
    c.numerics.convergence_audit = false;
    let bytes = |c: &ScenarioConfig| {
        let run = run_scenario(c).unwrap();
        run.series
            .iter()
            .map(|s| {
                let mut buf = Vec::new();
                write_csv(s, &mut buf).unwrap();
                buf
            })
            .collect::<Vec<_>>()
    };
    assert_eq!(bytes(&c), bytes(&c));
}

#[test]
fn csv_contract() {
    let mut c = figure_preset("fig1").unwrap();
    c.numerics.convergence_audit = false;
    c.time.steps = 2;
    let run = run_scenario(&c).unwrap();
    let series = &run.series[0];
    let mut buf = Vec::new();
    write_csv(series, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.ends_with('\n'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0], "t,pi,pi_plus,pi_minus,flux");
    let rows = read_csv(&text).unwrap();
    for (row, p) in rows.iter().zip(&series.points) {
        for (a, b) in row.iter().zip([p.t, p.pi, p.pi_plus, p.pi_minus, p.flux]) {
            assert!((a - b).abs() <= 1e-10 * b.abs().max(1e-300), "{a} vs {b}");
        }
    }
}

#[test]
fn outputs_land_on_disk_and_bad_sinks_fail() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = figure_preset("fig1").unwrap();
    c.numerics.convergence_audit = false;
    c.time.steps = 20;
    let run = run_scenario(&c).unwrap();
    let files = write_outputs(dir.path(), "fig1", &run.series, &run.reports).unwrap();
    assert_eq!(files.series.len(), 3);
    assert!(files.series[1].ends_with("fig1_fermion.csv"));
    let kv = std::fs::read_to_string(&files.summary_kv).unwrap();
    assert!(kv.contains("boson.integral="));
    assert!(kv.contains("distinguishable.peak_count="));
    let txt = std::fs::read_to_string(&files.summary_text).unwrap();
    assert!(txt.contains("== fermion =="));

    let blocker = dir.path().join("not_a_dir");
    std::fs::write(&blocker, "x").unwrap();
    let err = emit_csv(&run.series[0], &blocker.join("out.csv")).unwrap_err();
    assert!(matches!(err, ScenarioError::Sink { .. }));
    let err = write_outputs(&blocker, "x", &run.series, &run.reports).unwrap_err();
    assert!(matches!(err, ScenarioError::Sink { .. }));
}

#[test]
fn fig1_run_reports_normalized_integrals() {
    let c = figure_preset("fig1").unwrap();
    let run = run_scenario(&c).unwrap();
    assert_eq!(run.reports.len(), 3);
    for r in &run.reports {
        assert!((r.integral - 2.0).abs() < 0.02, "{}: {}", r.label, r.integral);
        assert!(r.peaks.windows(2).all(|w| w[0].t < w[1].t));
        assert!(r.audit.convergence.as_ref().unwrap().ok);
    }
    assert!(!run.convergence_failed());
}

// Fuzz over the schema: anything that validates must run.

fn number() -> impl Strategy<Value = String> {
    prop_oneof![
        60 => (-12.0f64..12.0).prop_map(|x| format!("{x:?}")),
        20 => (1i64..6).prop_map(|i| i.to_string()),
        1 => Just("0.0".to_string()),
        1 => Just("-1".to_string()),
        1 => Just("1e5".to_string()),
        1 => Just("\"three\"".to_string()),
        1 => Just("nan".to_string()),
    ]
}

fn positive() -> impl Strategy<Value = String> {
    prop_oneof![
        40 => (0.05f64..4.0).prop_map(|x| format!("{x:?}")),
        1 => number(),
    ]
}

fn maybe(key: &'static str, value: impl Strategy<Value = String>) -> impl Strategy<Value = String> {
    prop_oneof![
        1 => Just(String::new()),
        40 => value.prop_map(move |v| format!("{key} = {v}\n")),
    ]
}

fn packet(name: &'static str) -> impl Strategy<Value = String> {
    (
        maybe("x0", number()),
        maybe("p0", number()),
        maybe("delta_x", positive()),
    )
        .prop_map(move |(a, b, c)| format!("\n[{name}]\n{a}{b}{c}"))
}

fn statistics_list() -> impl Strategy<Value = String> {
    prop_oneof![
        8 => proptest::sample::subsequence(vec!["\"boson\"", "\"fermion\"", "\"distinguishable\""], 1..=3),
        1 => proptest::sample::subsequence(vec!["\"boson\"", "\"anyon\""], 0..=2),
    ]
    .prop_map(|v| format!("[{}]", v.join(", ")))
}

fn internal() -> impl Strategy<Value = String> {
    let selector = prop_oneof![
        proptest::collection::vec(0usize..6, 0..4).prop_map(|v| format!(
            "levels = [{}]\n",
            v.iter().map(usize::to_string).collect::<Vec<_>>().join(", ")
        )),
        (prop_oneof![4 => Just("0.0".to_string()), 1 => number()], number())
            .prop_map(|(re, im)| format!("coherent_re = {re}\ncoherent_im = {im}\n")),
    ];
    (
        maybe("omega", positive()),
        selector,
        maybe("n_max", (0i64..40).prop_map(|s| s.to_string())),
    )
        .prop_map(|(a, b, c)| format!("\n[internal]\n{a}{b}{c}"))
}

/// Sections for the chosen kind, occasionally with a stray one.
fn state_sections(kind: &'static str) -> BoxedStrategy<String> {
    let stray = prop_oneof![
        30 => Just(String::new()),
        1 => packet("orbital"),
        1 => packet("center_of_mass"),
    ];
    match kind {
        "\"single\"" => (packet("orbital"), stray).prop_map(|(a, b)| a + &b).boxed(),
        "\"pair-orbitals\"" => (packet("orbital_a"), packet("orbital_b"), stray)
            .prop_map(|(a, b, c)| a + &b + &c)
            .boxed(),
        "\"pair-cm-rel\"" => (packet("center_of_mass"), internal(), stray)
            .prop_map(|(a, b, c)| a + &b + &c)
            .boxed(),
        _ => Just(String::new()).boxed(),
    }
}

fn document() -> impl Strategy<Value = String> {
    let kind = prop_oneof![
        4 => Just("\"single\""),
        4 => Just("\"pair-orbitals\""),
        4 => Just("\"pair-cm-rel\""),
        1 => Just("\"triple\""),
    ];
    kind.prop_flat_map(|kind| {
        let statistics = if kind == "\"single\"" {
            prop_oneof![5 => Just(String::new()), 1 => maybe("statistics", statistics_list())].boxed()
        } else {
            maybe("statistics", statistics_list()).boxed()
        };
        let scenario = (statistics, maybe("mass", positive()), maybe("arrival_point", number()))
            .prop_map(move |(s, m, x)| format!("[scenario]\nkind = {kind}\n{s}{m}{x}"));
        let time = (-3.0f64..1.0, prop_oneof![6 => 0.5f64..6.0, 1 => -1.0f64..0.0], 1i64..8)
            .prop_map(|(t0, len, n)| format!("\n[time]\nt_min = {t0:?}\nt_max = {:?}\nsteps = {n}\n", t0 + len));
        let numerics =
            maybe("n_points", (16i64..80).prop_map(|n| n.to_string())).prop_map(|n| format!("\n[numerics]\n{n}"));
        (
            maybe(
                "version",
                prop_oneof![30 => Just("1".to_string()), 1 => Just("2".to_string())],
            ),
            scenario,
            time,
            state_sections(kind),
            numerics,
        )
            .prop_map(|(v, s, t, st, num)| format!("{v}\n{s}{t}{st}{num}"))
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 512, ..ProptestConfig::default() })]

    #[test]
    fn validated_configs_always_run(doc in document()) {
        match parse_config(&doc) {
            Err(e) => prop_assert!(!e.violations.is_empty()),
            Ok(mut config) => {
                config.numerics.convergence_audit = false;
                let run = run_scenario(&config);
                prop_assert!(run.is_ok(), "{doc}\n{:?}", run.err());
                let run = run.unwrap();
                prop_assert_eq!(run.reports.len(), config.variant_labels().len());
            }
        }
    }
}

#[test]
fn fuzz_generator_reaches_valid_configs() {
    use proptest::strategy::ValueTree;
    use proptest::test_runner::TestRunner;
    let mut runner = TestRunner::deterministic();
    let strategy = document();
    let valid = (0..2000)
        .filter(|_| parse_config(&strategy.new_tree(&mut runner).unwrap().current()).is_ok())
        .count();
    assert!(valid > 400, "only {valid} valid documents");
}
