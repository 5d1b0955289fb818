use proptest::prelude::*;
use tubersg_core::io::{
    read_dataset, read_rows, read_rows_from_path, write_dataset, write_report_dir, write_rows,
    FitReportRow, OverallRow, SgResultRow, TypeRow, WeightRow, OVERALL_FILE, PER_FREQUENCY_FILE,
    PER_TYPE_FILE, SUMMARY_FILE,
};
use tubersg_core::metrics::FrequencyErrors;
use tubersg_core::{
    gen_inverse_model, load_model, per_type_report, published_model, save_model, FrequencyGrid,
    SynthConfig,
};

fn round_trip<R: tubersg_core::io::CsvRow + Clone + PartialEq + std::fmt::Debug>(
    rows: &[R],
) -> Vec<R> {
    let mut buf = Vec::new();
    write_rows(&mut buf, rows, std::path::Path::new("mem")).unwrap();
    read_rows(buf.as_slice(), std::path::Path::new("mem")).unwrap()
}

fn finite() -> impl Strategy<Value = f64> {
    prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO
}

proptest! {
    #[test]
    fn fit_rows_exact(v in prop::array::uniform6(finite())) {
        let row = FitReportRow { f_ghz: v[0], c1: v[1], c2: v[2], r2: v[3], c1_fit: v[4], c2_fit: v[5] };
        let back = round_trip(&[row]);
        prop_assert_eq!(back[0], row);
    }

    #[test]
    fn frequency_rows_exact(f in finite(), mae in finite(), mape in finite()) {
        let row = FrequencyErrors { f_ghz: f, mae, mape_pct: mape };
        let back = round_trip(std::slice::from_ref(&row));
        prop_assert_eq!(back[0].mae.to_bits(), mae.to_bits());
        prop_assert_eq!(back[0].mape_pct.to_bits(), mape.to_bits());
    }

    #[test]
    fn weight_rows_exact(id in "[a-z][a-z0-9,\" -]{0,12}[a-z0-9]", w in 1.0f64..1000.0, u in prop::option::of(0.0f64..900.0)) {
        let row = WeightRow { id, w_air_g: w, w_uww_g: u, f_float_g: None };
        let back = round_trip(std::slice::from_ref(&row));
        prop_assert_eq!(&back[0], &row);
    }
}

#[test]
fn sg_rows_six_decimals() {
    let rows = vec![
        SgResultRow {
            id: "a".into(),
            sg: Some(1.0812345678),
            verdict: "Ok".into(),
        },
        SgResultRow {
            id: "b".into(),
            sg: None,
            verdict: "Error".into(),
        },
    ];
    let mut buf = Vec::new();
    write_rows(&mut buf, &rows, std::path::Path::new("mem")).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert_eq!(text, "id,sg,verdict\na,1.081235,Ok\nb,,Error\n");
    let back: Vec<SgResultRow> = read_rows(buf.as_slice(), std::path::Path::new("mem")).unwrap();
    assert_eq!(back[0].sg, Some(1.081235));
    assert_eq!(back[1].sg, None);
}

#[test]
fn report_directory_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let m = published_model();
    let cfg = SynthConfig {
        n_per_type: 4,
        ..SynthConfig::default()
    };
    let ds = gen_inverse_model(&cfg, &m, &FrequencyGrid::uniform(0.3, 3.0, 20).unwrap()).unwrap();
    let report = per_type_report(&m, &ds).unwrap();
    write_report_dir(&report, dir.path()).unwrap();

    let overall: Vec<OverallRow> = read_rows_from_path(dir.path().join(OVERALL_FILE)).unwrap();
    assert_eq!(overall, vec![OverallRow::from_report(&report)]);
    let types: Vec<TypeRow> = read_rows_from_path(dir.path().join(PER_TYPE_FILE)).unwrap();
    assert_eq!(types, TypeRow::from_report(&report));
    assert_eq!(types[0].ptype, "Total");
    assert_eq!(types.len(), 6);
    let freq: Vec<FrequencyErrors> =
        read_rows_from_path(dir.path().join(PER_FREQUENCY_FILE)).unwrap();
    assert_eq!(freq, report.per_frequency);
    let summary = std::fs::read_to_string(dir.path().join(SUMMARY_FILE)).unwrap();
    assert!(summary.contains("Total"));
}

#[test]
fn dataset_and_model_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = SynthConfig {
        n_per_type: 3,
        ..SynthConfig::default().with_seed(77)
    };
    let ds = gen_inverse_model(&cfg, &published_model(), &FrequencyGrid::default_band()).unwrap();
    let path = dir.path().join("set");
    write_dataset(&ds, &path).unwrap();
    let back = read_dataset(&path).unwrap();
    assert_eq!(back.samples(), ds.samples());
    assert_eq!(back.grid(), ds.grid());

    let model_path = dir.path().join("m.txt");
    save_model(&published_model(), &model_path).unwrap();
    let first = std::fs::read(&model_path).unwrap();
    save_model(&load_model(&model_path).unwrap(), &model_path).unwrap();
    assert_eq!(std::fs::read(&model_path).unwrap(), first);
}

#[test]
fn missing_required_column_is_parse_error() {
    let err =
        read_rows::<FitReportRow, _>("f_ghz,c1\n1,2\n".as_bytes(), std::path::Path::new("x.csv"))
            .unwrap_err();
    assert!(matches!(err, tubersg_core::Error::Parse { .. }), "{err}");
}
