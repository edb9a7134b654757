use std::path::Path;

use hcr_core::ingest::{
    parse_metrics, parse_roster, write_metrics, write_roster, CountingMode, InstitutionMetrics,
    ListSource, Period, ResearcherRecord,
};
use proptest::prelude::*;

fn text() -> impl Strategy<Value = String> {
    "[A-Za-z0-9 ,.\"'éüñ-]{0,24}"
}

fn record() -> impl Strategy<Value = ResearcherRecord> {
    (text(), text(), text(), "[A-Z]{3}", prop::option::of(1900i32..=2020)).prop_map(
        |(id, name, aff, cc, year)| ResearcherRecord {
            researcher_id: id,
            full_name: name,
            raw_affiliation: aff,
            country_code: cc,
            first_pub_year: year,
            list_source: ListSource::Ibb,
            list_year: 2020,
        },
    )
}

fn metrics_row() -> impl Strategy<Value = InstitutionMetrics> {
    (text(), "[A-Z]{3}", 2006i32..2016, prop::array::uniform5(0.0f64..1e6)).prop_map(|(name, cc, y, mut v)| {
        v.sort_by(f64::total_cmp);
        InstitutionMetrics {
            institution_raw_name: name,
            country_code: cc,
            period: Period::new(y),
            counting_mode: CountingMode::Fractional,
            field_label: "All sciences".into(),
            p_top1: v[0],
            p_top5: v[1],
            p_top10: v[2],
            p_top50: v[3],
            p: v[4],
        }
    })
}

proptest! {
    #[test]
    fn roster_round_trip(records in prop::collection::vec(record(), 0..20)) {
        let mut buf = Vec::new();
        write_roster(&records, &mut buf).unwrap();
        let (back, report) = parse_roster(buf.as_slice(), Path::new("mem"), ListSource::Ibb, 2020).unwrap();
        prop_assert_eq!(back, records.clone());
        prop_assert_eq!(report.rows_read, records.len());
        prop_assert!(report.is_balanced());
    }

    #[test]
    fn metrics_round_trip(rows in prop::collection::vec(metrics_row(), 0..20)) {
        let mut buf = Vec::new();
        write_metrics(&rows, &mut buf).unwrap();
        let (back, report) = parse_metrics(buf.as_slice(), Path::new("mem")).unwrap();
        prop_assert_eq!(back, rows);
        prop_assert!(report.is_balanced());
    }

    #[test]
    fn report_balances_on_arbitrary_rows(lines in prop::collection::vec("[a-zA-Z0-9,]{0,40}", 0..30)) {
        let body = format!("researcher_id,full_name,raw_affiliation,country_code,first_pub_year,list_source,list_year\n{}", lines.join("\n"));
        let (recs, report) = parse_roster(body.as_bytes(), Path::new("mem"), ListSource::Ibb, 2020).unwrap();
        prop_assert!(report.is_balanced());
        prop_assert_eq!(recs.len(), report.rows_accepted);
        // deterministic
        let again = parse_roster(body.as_bytes(), Path::new("mem"), ListSource::Ibb, 2020).unwrap();
        prop_assert_eq!(again.0, recs);
        prop_assert_eq!(again.1, report);
    }
}
