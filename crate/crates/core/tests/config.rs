use proptest::prelude::*;
use semiclassical::config::*;

fn model_path() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("models/landau_zener.conf")
}

#[test]
fn bundled_file_loads_from_disk() {
    let m = load_model(model_path()).unwrap();
    assert!(matches!(m, LoadedModel::Channels(ref s) if s.mass == 10.0 && s.r_max == 15.5));
}

#[test]
fn non_positive_mass_names_the_invariant() {
    let text = LANDAU_ZENER_MODEL.replace("mass = 10", "mass = 0");
    let err = parse_model(&text).unwrap_err();
    assert!(matches!(err, ConfigError::Validation(ref m) if m.contains("M > 0")), "{err}");
}

#[test]
fn unknown_and_missing_keys() {
    let err = parse_model(&LANDAU_ZENER_MODEL.replace("alpha = 0.4", "alpah = 0.4")).unwrap_err();
    assert!(matches!(err, ConfigError::Validation(ref m) if m.contains("`alpha`")), "{err}");
    let err = parse_model("[potential]\nkind = cubic\ng = 0.1\nomega = 2\n").unwrap_err();
    assert!(matches!(err, ConfigError::Parse { line: 4, column: 1, .. }), "{err}");
    let err = parse_model("[potential]\nkind = quartic\n").unwrap_err();
    assert!(matches!(err, ConfigError::Parse { line: 2, column: 8, .. }), "{err}");
}

#[test]
fn missing_file_is_an_io_error() {
    assert!(matches!(load_model("/nonexistent/model.conf"), Err(ConfigError::Io { .. })));
}

#[test]
fn potential_files_round_trip() {
    for text in [
        "[potential]\nkind = harmonic\nomega = 1.5\n",
        "[potential]\nkind = cubic\ng = 0.05\n",
        "[potential]\nkind = power_wall\nhalf_width = 1\ndepth = 50\nexponent = 8\n",
    ] {
        let a = parse_model(text).unwrap();
        let b = parse_model(&serialize_model(&a).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}

proptest! {
    #[test]
    fn channel_models_round_trip(
        delta in 1e-3f64..1.0,
        alpha in 1e-2f64..2.0,
        width in 0.1f64..1.0,
        r_x in 0.5f64..3.0,
        mass in 0.5f64..1e4,
        l in 0u32..50,
        energy in 1e-2f64..100.0,
        rabi in any::<bool>(),
    ) {
        let body = if rabi {
            format!("model = rabi\ngap = {delta}\nstrength = {alpha}\nr_c = {r_x}\nwidth = {width}\n")
        } else {
            format!("model = landau_zener\ndelta = {delta}\nalpha = {alpha}\nwidth = {width}\nr_x = {r_x}\n")
        };
        let text = format!("[channels]\n{body}mass = {mass}\nl = {l}\nenergy = {energy}\nr_max = 40\n");
        let a = parse_model(&text).unwrap();
        let again = serialize_model(&a).unwrap();
        let b = parse_model(&again).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(serialize_model(&b).unwrap(), again);
    }
}
