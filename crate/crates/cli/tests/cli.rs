use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn hcr(out: &Path, args: &[&str]) -> (i32, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_hcr"))
        .args(args)
        .arg("--out-dir")
        .arg(out)
        .output()
        .unwrap();
    let text = format!("{}{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr));
    (o.status.code().unwrap(), text)
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn two_countries_is_a_precondition_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let table = write(tmp.path(), "two.csv", "country_code,wos_hcr,ibb_hcr\nUSA,10,100\nGBR,5,40\n");
    let (code, text) = hcr(tmp.path(), &["validate", "--countries", &table, "--validate-x", "wos_hcr"]);
    assert_eq!(code, 2, "{text}");
    assert!(text.contains("need at least 3"), "{text}");
}

#[test]
fn pearson_exclusion_can_drop_below_three() {
    let tmp = tempfile::tempdir().unwrap();
    let table = write(
        tmp.path(),
        "three.csv",
        "country_code,wos_hcr,ibb_hcr\nUSA,10,100\nGBR,5,40\nDEU,3,30\n",
    );
    let (code, _) = hcr(tmp.path(), &["validate", "--countries", &table, "--validate-x", "wos_hcr"]);
    assert_eq!(code, 2);
    let (code, text) = hcr(
        tmp.path(),
        &["validate", "--countries", &table, "--validate-x", "wos_hcr", "--pearson-exclude", ""],
    );
    assert_eq!(code, 0, "{text}");
}

#[test]
fn missing_input_is_an_io_error() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, text) = hcr(tmp.path(), &["predict-wos", "--countries", "/nonexistent/table.csv"]);
    assert_eq!(code, 1, "{text}");
    let (code, _) = hcr(tmp.path(), &["predict-wos"]);
    assert_eq!(code, 1);
}

#[test]
fn bad_config_and_usage_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "bad.json", r#"{"not_a_key": 1}"#);
    let (code, text) = hcr(tmp.path(), &["rank", "--config", &cfg]);
    assert_eq!(code, 1, "{text}");
    let (code, _) = hcr(tmp.path(), &["no-such-command"]);
    assert_eq!(code, 1);
    let (code, text) = hcr(tmp.path(), &["--help"]);
    assert_eq!(code, 0);
    assert!(text.contains("predict-wos"));
}

#[test]
fn empty_grid_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "grid.json", r#"{"y_grid": []}"#);
    let t3 = data("table3_predict.csv");
    let (code, text) = hcr(tmp.path(), &["sweep-y", "--config", &cfg, "--countries", t3.to_str().unwrap()]);
    assert_eq!(code, 1, "{text}");
    assert!(text.contains("grid is empty"));
}

#[test]
fn sweep_single_element_and_upward_levels() {
    let tmp = tempfile::tempdir().unwrap();
    let t3 = data("table3_predict.csv");
    let (code, text) = hcr(tmp.path(), &["sweep-y", "--countries", t3.to_str().unwrap(), "--grid", "0.1"]);
    assert_eq!(code, 0, "{text}");
    let v = json(&tmp.path().join("sweep_y.json"));
    assert_eq!(v["minimizer_y"], 0.1);
    assert_eq!(v["rows"][0]["minimizer"], true);

    // y above x inflates the count instead of failing
    let (code, text) = hcr(tmp.path(), &["sweep-y", "--countries", t3.to_str().unwrap(), "--grid", "10,0.05"]);
    assert_eq!(code, 0, "{text}");
    let v = json(&tmp.path().join("sweep_y.json"));
    assert_eq!(v["minimizer_y"], 0.05);
    assert!(v["rows"][0]["sum_abs_deviation"].as_f64().unwrap() > 1e4);
}

#[test]
fn predict_without_reported_has_no_correlation_block() {
    let tmp = tempfile::tempdir().unwrap();
    let table = write(
        tmp.path(),
        "t.csv",
        "country_code,ibb_hcr,P,p_top10\nAUS,5441,71777,7673\nGBR,15001,166306,22338\nXXA,100,0,0\n",
    );
    let (code, text) = hcr(tmp.path(), &["predict-wos", "--countries", &table]);
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("XXA"), "degenerate row is warned about: {text}");
    let v = json(&tmp.path().join("predict_wos.json"));
    assert_eq!(v["countries"], 2);
    assert!(v.get("correlations").is_none());
    let csv = fs::read_to_string(tmp.path().join("predict_wos.csv")).unwrap();
    assert!(csv.lines().nth(2).unwrap().starts_with("GBR,15001,166306,22338,0.134,"));
    assert!(csv.lines().nth(2).unwrap().contains(",271,"));
    assert!(!tmp.path().join("predict_wos_ranks.csv").exists());
}

fn ambiguous_inputs(dir: &Path) -> Vec<String> {
    let registry = write(
        dir,
        "registry.csv",
        "institution_id,canonical_name,country_code,kind\n\
         A,University of Abcde,USA,UNIVERSITY\n\
         B,University of Abcdf,USA,UNIVERSITY\n\
         C,University of Zurich,CHE,UNIVERSITY\n",
    );
    let roster = write(
        dir,
        "roster.csv",
        "researcher_id,full_name,raw_affiliation,country_code,first_pub_year,list_source,list_year\n\
         r1,One,University of Abcdg,USA,1990,IBB,2020\n\
         r2,Two,University of Zurich,CHE,1985,IBB,2020\n\
         r3,Three,University of Abcde,USA,1980,IBB,2020\n",
    );
    let metrics = write(
        dir,
        "metrics.csv",
        "institution_raw_name,country_code,period,counting_mode,field_label,P,p_top1,p_top5,p_top10,p_top50\n\
         University of Abcde,USA,2006-2009,FRACTIONAL,All sciences,1000,10,50,100,500\n\
         University of Zurich,CHE,2006-2009,FRACTIONAL,All sciences,800,9,45,90,400\n",
    );
    vec![
        "aggregate".into(),
        "--registry".into(),
        registry,
        "--roster-ibb".into(),
        roster,
        "--metrics".into(),
        metrics,
    ]
}

#[test]
fn ambiguous_affiliations_exit_three_unless_allowed() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ambiguous_inputs(tmp.path());
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    let (code, text) = hcr(tmp.path(), &args);
    assert_eq!(code, 3, "{text}");
    assert!(text.contains("--allow-unmatched"));

    let mut allowed = args.clone();
    allowed.push("--allow-unmatched");
    let (code, text) = hcr(tmp.path(), &allowed);
    assert_eq!(code, 0, "{text}");
    let audit = fs::read_to_string(tmp.path().join("aggregate_audit.csv")).unwrap();
    assert!(audit.contains("University of Abcdg,AMBIGUOUS"), "{audit}");
    let agg = fs::read_to_string(tmp.path().join("aggregate.csv")).unwrap();
    assert!(agg.contains("USA,2006-2009,2,0,1000,"), "{agg}");
}

#[test]
fn period_without_metrics_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ambiguous_inputs(tmp.path());
    let mut args: Vec<&str> = args.iter().map(String::as_str).collect();
    args.extend(["--allow-unmatched", "--period", "2015-2018"]);
    let (code, text) = hcr(tmp.path(), &args);
    assert_eq!(code, 1, "{text}");
    assert!(text.contains("2015-2018"));
}

#[test]
fn manifest_echoes_config_and_digests() {
    let tmp = tempfile::tempdir().unwrap();
    let t3 = data("table3_predict.csv");
    let (code, _) = hcr(tmp.path(), &["predict-wos", "--countries", t3.to_str().unwrap(), "--y", "0.1"]);
    assert_eq!(code, 0);
    let m = json(&tmp.path().join("predict_wos.manifest.json"));
    assert_eq!(m["command"], "predict-wos");
    assert_eq!(m["config"]["y"], 0.1);
    assert_eq!(m["config"]["x"], 5.0);
    assert_eq!(m["config"]["period"], "2006-2009");
    assert_eq!(m["config"]["min_wos"], 3);
    assert_eq!(m["config"]["filter_exclusions"][0], "CHN");
    assert_eq!(m["inputs"][0]["role"], "countries");
    assert_eq!(m["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    let outputs: Vec<&str> = m["outputs"].as_array().unwrap().iter().map(|o| o["path"].as_str().unwrap()).collect();
    assert!(outputs.contains(&"predict_wos.csv"));
    assert!(!fs::read_to_string(tmp.path().join("predict_wos.manifest.json")).unwrap().contains("fetched_at"));
}

#[test]
fn single_country_rank_share() {
    let tmp = tempfile::tempdir().unwrap();
    let table = write(tmp.path(), "one.csv", "country_code,ibb_hcr\nUSA,68016\n");
    let (code, text) = hcr(tmp.path(), &["rank", "--countries", &table]);
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("no indicator_cache"));
    let raw = fs::read_to_string(tmp.path().join("rank_raw.csv")).unwrap();
    let row = raw.lines().nth(1).unwrap();
    let share = 68016.0 / 159684.0;
    assert!(row.starts_with(&format!("1,USA,68016,42.6,{share},42.6,{share},")), "{row}");
}

#[test]
fn offline_fetch_reports_sources() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, text) = hcr(
        tmp.path(),
        &[
            "fetch-indicators",
            "--offline",
            "--country",
            "CHE,gbr,TWN",
            "--indicator-cache",
            data("worldbank_2019.csv").to_str().unwrap(),
            "--indicator-override",
            data("indicator_overrides.csv").to_str().unwrap(),
        ],
    );
    assert_eq!(code, 0, "{text}");
    let csv = fs::read_to_string(tmp.path().join("indicators.csv")).unwrap();
    assert!(csv.contains("\nCHE,2019,"));
    assert!(csv.contains(",CACHE\n"));
    assert!(csv.contains("TWN,2019,23603121,611396000000,OVERRIDE"));
}
