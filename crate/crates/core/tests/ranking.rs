use std::path::Path;

use hcr_core::country::read_country_table;
use hcr_core::ranking::{
    comparison_filter, normalize, rank_countries, rank_scatter, rank_values, rerank, Basis, Metric,
    RankOptions, IBB_GLOBAL_TOTAL,
};
use hcr_core::worldbank::read_snapshot;
use hcr_core::CountryRecord;
use proptest::prelude::*;

fn data(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn country(code: &str, wos: f64) -> CountryRecord {
    CountryRecord {
        wos_hcr: Some(wos),
        ibb_hcr: Some(wos * 100.0),
        ..CountryRecord::new(code)
    }
}

/// Synthetic codes `A00`..; `eligible` of them have at least three.
fn filter_fixture(eligible: usize) -> Vec<CountryRecord> {
    let mut out: Vec<CountryRecord> = (0..eligible).map(|i| country(&format!("E{i:02}"), 3.0 + i as f64)).collect();
    out.extend((0..9).map(|i| country(&format!("O{i:02}"), 1.0)));
    out.extend((0..8).map(|i| country(&format!("T{i:02}"), 2.0)));
    out.push(country("CHN", 280.0));
    out
}

#[test]
fn filter_with_stated_composition() {
    // 33 kept + 9 + 8 + China is 51 rows; with 49 rows the same composition keeps 31.
    let full = filter_fixture(33);
    assert_eq!(full.len(), 51);
    assert_eq!(comparison_filter(&full, 3, &["CHN"]).len(), 33);
    let forty_nine = filter_fixture(31);
    assert_eq!(forty_nine.len(), 49);
    assert_eq!(comparison_filter(&forty_nine, 3, &["CHN"]).len(), 31);
}

#[test]
fn filter_is_idempotent_subset() {
    let all = filter_fixture(33);
    let once = comparison_filter(&all, 3, &["CHN"]);
    let twice = comparison_filter(&once, 3, &["CHN"]);
    assert_eq!(once, twice);
    assert!(once.iter().all(|c| all.contains(c)));
    assert!(comparison_filter(&all, 0, &[] as &[&str]).len() == all.len());
}

#[test]
fn table1_shares() {
    let rows = read_country_table(data("table1_ibb_hcr.csv")).unwrap();
    let ranked = rank_countries(&rows, Metric::IbbHcr, &RankOptions::default()).unwrap();
    assert_eq!(ranked.len(), 46);
    assert_eq!(ranked[0].country_code, "USA");
    assert!((ranked[0].cumulative_share - 0.42594).abs() < 5e-6);
    assert!((ranked[1].cumulative_share - ranked[0].cumulative_share - 0.09394).abs() < 5e-6);
    assert!((ranked[9].cumulative_share - 0.80452).abs() < 5e-6);
}

#[test]
fn normalization_matches_published_values() {
    let rows = read_country_table(data("table1_ibb_hcr.csv")).unwrap();
    let ranked = rank_countries(&rows, Metric::IbbHcr, &RankOptions::default()).unwrap();
    let mut snap = read_snapshot(&data("worldbank_2019.csv"), 2019).unwrap();
    for row in hcr_core::worldbank::read_rows(&data("indicator_overrides.csv")).unwrap() {
        snap.population.insert(row.country_code.clone(), row.population.unwrap());
        snap.gdp_usd.insert(row.country_code, row.gdp_usd.unwrap());
    }
    let pop = normalize(&ranked, &snap, Basis::Population).unwrap();
    assert!(pop.warnings.is_empty(), "{:?}", pop.warnings);
    let both = normalize(&pop.entries, &snap, Basis::Gdp).unwrap();
    for (a, b) in ranked.iter().zip(&both.entries) {
        assert_eq!((a.value, a.rank, &a.country_code), (b.value, b.rank, &b.country_code));
    }
    let per_m = rerank(&both.entries, Basis::Population, IBB_GLOBAL_TOTAL);
    let per_g = rerank(&both.entries, Basis::Gdp, IBB_GLOBAL_TOTAL);

    let mut rdr = csv::Reader::from_path(data("table1_expected.csv")).unwrap();
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let i: usize = rec[0].parse::<usize>().unwrap() - 1;
        assert_eq!(per_m[i].country_code, &rec[3]);
        let pm: f64 = rec[4].parse().unwrap();
        assert!((per_m[i].per_million.unwrap() / pm - 1.0).abs() < 0.01, "{}", &rec[3]);
        // the published table breaks the SWE/CHE tie differently; compare values
        assert_eq!(ranked[i].value, rec[2].parse::<f64>().unwrap());
        let g: f64 = rec[6].parse().unwrap();
        assert!((per_g[i].per_billion_gdp.unwrap() / g - 1.0).abs() < 0.025, "{}", &rec[5]);
    }
}

#[test]
fn scatter_over_table2() {
    let rows = read_country_table(data("table2_wos_ibb.csv")).unwrap();
    let left: Vec<_> = rows.iter().map(|r| (r.country_code.clone(), r.wos_hcr.unwrap())).collect();
    let right: Vec<_> = rows.iter().map(|r| (r.country_code.clone(), r.ibb_hcr.unwrap())).collect();
    let scatter = rank_scatter(&left, &right).unwrap();
    assert_eq!(scatter.len(), 33);
    assert_eq!(scatter[0].country_code, "USA");
    assert_eq!(scatter[0].deviation, 0.0);
    let sum: f64 = scatter.iter().map(|r| r.deviation).sum();
    assert!(sum.abs() < 1e-9);
}

fn values() -> impl Strategy<Value = Vec<(String, f64)>> {
    prop::collection::btree_map("[A-Z]{3}", 0.0f64..1e5, 0..40).prop_map(|m| m.into_iter().collect())
}

proptest! {
    #[test]
    fn ranking_invariants(v in values(), threshold in 0.0f64..1e4) {
        let total: f64 = v.iter().map(|x| x.1).sum::<f64>() + 1.0;
        let r = rank_values(&v, threshold, Some(total)).unwrap();
        for (i, e) in r.iter().enumerate() {
            prop_assert_eq!(e.rank, i + 1);
            prop_assert!(e.value >= threshold);
        }
        for w in r.windows(2) {
            prop_assert!(w[0].value >= w[1].value);
            prop_assert!(w[1].cumulative_share >= w[0].cumulative_share);
        }
        if let Some(last) = r.last() {
            prop_assert!(last.cumulative_share <= 1.0 + 1e-12);
        }
        prop_assert_eq!(r.len(), v.iter().filter(|x| x.1 >= threshold).count());
    }

    #[test]
    fn threshold_is_monotone(v in values(), a in 0.0f64..1e5, b in 0.0f64..1e5) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let r_lo = rank_values(&v, lo, None).unwrap();
        let r_hi = rank_values(&v, hi, None).unwrap();
        prop_assert!(r_hi.len() <= r_lo.len());
    }
}
