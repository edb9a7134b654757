//! Institution name resolution and country-level aggregation.
//!
//! Raw affiliation strings are normalized, then resolved against a registry of
//! canonical institutions plus alias rules. Rule precedence is EXACT, then
//! DEPARTMENT_OF, then FUZZY; fuzzy ties are reported as ambiguous and never
//! picked silently.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};
use crate::ingest::{
    is_nested, normalize_country_code, CountingMode, InstitutionMetrics, ListSource, Period,
    ResearcherRecord, DEFAULT_FIELD, UNKNOWN_COUNTRY,
};

pub const INSTITUTION_HEADER: [&str; 4] = ["institution_id", "canonical_name", "country_code", "kind"];
pub const ALIAS_HEADER: [&str; 4] = ["pattern", "target_institution_id", "rule_kind", "fuzzy_budget"];
pub const AUDIT_HEADER: [&str; 4] = ["raw_affiliation", "outcome", "institution_id", "distance"];

pub const DEFAULT_FUZZY_BUDGET: f64 = 0.1;
pub const MAX_FUZZY_BUDGET: f64 = 0.2;

/// Lowercase, strip diacritics, turn punctuation into single spaces and trim.
pub fn normalize_name(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut pending_space = false;
    for c in raw.nfd().filter(|c| !is_combining_mark(*c)) {
        if c.is_alphanumeric() {
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            out.extend(c.to_lowercase());
        } else {
            pending_space = true;
        }
    }
    out
}

/// Levenshtein distance over chars divided by the longer length.
pub fn normalized_edit_distance(a: &str, b: &str) -> f64 {
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        return 0.0;
    }
    strsim::levenshtein(a, b) as f64 / longest as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InstitutionKind {
    #[serde(rename = "UNIVERSITY")]
    University,
    #[serde(rename = "HOSPITAL")]
    Hospital,
    #[serde(rename = "OTHER")]
    Other,
}

impl FromStr for InstitutionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "UNIVERSITY" => Ok(InstitutionKind::University),
            "HOSPITAL" => Ok(InstitutionKind::Hospital),
            "OTHER" => Ok(InstitutionKind::Other),
            other => Err(Error::Invalid(format!("unknown institution kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RuleKind {
    #[serde(rename = "EXACT")]
    Exact,
    #[serde(rename = "DEPARTMENT_OF")]
    DepartmentOf,
    #[serde(rename = "FUZZY")]
    Fuzzy,
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleKind::Exact => "EXACT",
            RuleKind::DepartmentOf => "DEPARTMENT_OF",
            RuleKind::Fuzzy => "FUZZY",
        })
    }
}

impl FromStr for RuleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "EXACT" => Ok(RuleKind::Exact),
            "DEPARTMENT_OF" => Ok(RuleKind::DepartmentOf),
            "FUZZY" => Ok(RuleKind::Fuzzy),
            other => Err(Error::Invalid(format!("unknown rule kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalInstitution {
    pub institution_id: String,
    pub canonical_name: String,
    pub country_code: String,
    pub kind: InstitutionKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AliasRule {
    /// Stored normalized.
    pub pattern: String,
    pub target_institution_id: String,
    pub rule_kind: RuleKind,
    /// Only meaningful for FUZZY rules; `None` means the registry default.
    pub fuzzy_budget: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum MatchOutcome {
    Matched {
        institution_id: String,
        rule: RuleKind,
        distance: f64,
    },
    Unmatched,
    Ambiguous {
        candidates: Vec<String>,
    },
}

impl MatchOutcome {
    pub fn label(&self) -> String {
        match self {
            MatchOutcome::Matched { rule, .. } => rule.to_string(),
            MatchOutcome::Unmatched => "UNMATCHED".into(),
            MatchOutcome::Ambiguous { .. } => "AMBIGUOUS".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Pattern {
    text: String,
    target: usize,
    budget: f64,
}

/// Immutable after construction.
#[derive(Debug, Clone)]
pub struct Registry {
    institutions: Vec<CanonicalInstitution>,
    by_id: HashMap<String, usize>,
    exact: HashMap<String, BTreeSet<usize>>,
    departments: Vec<Pattern>,
    fuzzy: Vec<Pattern>,
}

impl Registry {
    /// Canonical names act as EXACT rules and as FUZZY rules with the
    /// default budget, in addition to the explicit aliases.
    pub fn new(institutions: Vec<CanonicalInstitution>, aliases: Vec<AliasRule>) -> Result<Self> {
        let mut by_id = HashMap::new();
        for (i, inst) in institutions.iter().enumerate() {
            if inst.canonical_name.trim().is_empty() {
                return Err(Error::Invalid(format!(
                    "institution {} has an empty canonical name",
                    inst.institution_id
                )));
            }
            if by_id.insert(inst.institution_id.clone(), i).is_some() {
                return Err(Error::Invalid(format!(
                    "duplicate institution id {}",
                    inst.institution_id
                )));
            }
        }

        let mut exact: HashMap<String, BTreeSet<usize>> = HashMap::new();
        let mut departments = Vec::new();
        let mut fuzzy = Vec::new();
        for (i, inst) in institutions.iter().enumerate() {
            let name = normalize_name(&inst.canonical_name);
            exact.entry(name.clone()).or_default().insert(i);
            fuzzy.push(Pattern {
                text: name,
                target: i,
                budget: DEFAULT_FUZZY_BUDGET,
            });
        }
        for rule in aliases {
            let target = *by_id.get(&rule.target_institution_id).ok_or_else(|| {
                Error::Invalid(format!(
                    "alias `{}` targets unknown institution {}",
                    rule.pattern, rule.target_institution_id
                ))
            })?;
            let text = normalize_name(&rule.pattern);
            if text.is_empty() {
                return Err(Error::Invalid("alias with empty pattern".into()));
            }
            match rule.rule_kind {
                RuleKind::Exact => {
                    exact.entry(text).or_default().insert(target);
                }
                RuleKind::DepartmentOf => departments.push(Pattern {
                    text,
                    target,
                    budget: 0.0,
                }),
                RuleKind::Fuzzy => {
                    let budget = rule.fuzzy_budget.unwrap_or(DEFAULT_FUZZY_BUDGET);
                    if !(0.0..=MAX_FUZZY_BUDGET).contains(&budget) {
                        return Err(Error::Invalid(format!(
                            "fuzzy budget {budget} outside [0, {MAX_FUZZY_BUDGET}]"
                        )));
                    }
                    fuzzy.push(Pattern {
                        text,
                        target,
                        budget,
                    });
                }
            }
        }
        Ok(Registry {
            institutions,
            by_id,
            exact,
            departments,
            fuzzy,
        })
    }

    pub fn from_csv(institutions: impl AsRef<Path>, aliases: Option<&Path>) -> Result<Self> {
        let institutions = read_institutions(institutions)?;
        let aliases = match aliases {
            Some(p) => read_aliases(p)?,
            None => Vec::new(),
        };
        Registry::new(institutions, aliases)
    }

    pub fn institutions(&self) -> &[CanonicalInstitution] {
        &self.institutions
    }

    pub fn get(&self, institution_id: &str) -> Option<&CanonicalInstitution> {
        self.by_id.get(institution_id).map(|&i| &self.institutions[i])
    }

    fn id(&self, i: usize) -> String {
        self.institutions[i].institution_id.clone()
    }

    fn ambiguous(&self, set: impl IntoIterator<Item = usize>) -> MatchOutcome {
        let mut candidates: Vec<String> = set.into_iter().map(|i| self.id(i)).collect();
        candidates.sort();
        candidates.dedup();
        MatchOutcome::Ambiguous { candidates }
    }

    pub fn resolve(&self, raw_affiliation: &str) -> MatchOutcome {
        let name = normalize_name(raw_affiliation);
        if name.is_empty() {
            return MatchOutcome::Unmatched;
        }

        if let Some(targets) = self.exact.get(&name) {
            return if targets.len() == 1 {
                let &t = targets.iter().next().unwrap();
                MatchOutcome::Matched {
                    institution_id: self.id(t),
                    rule: RuleKind::Exact,
                    distance: 0.0,
                }
            } else {
                self.ambiguous(targets.iter().copied())
            };
        }

        // Most specific (longest) department pattern wins.
        let padded = format!(" {name} ");
        let mut best_len = 0;
        let mut best: BTreeSet<usize> = BTreeSet::new();
        for p in &self.departments {
            if !padded.contains(&format!(" {} ", p.text)) {
                continue;
            }
            let len = p.text.chars().count();
            if len > best_len {
                best_len = len;
                best.clear();
            }
            if len == best_len {
                best.insert(p.target);
            }
        }
        match best.len() {
            0 => {}
            1 => {
                return MatchOutcome::Matched {
                    institution_id: self.id(*best.iter().next().unwrap()),
                    rule: RuleKind::DepartmentOf,
                    distance: 0.0,
                }
            }
            _ => return self.ambiguous(best),
        }

        let mut best_distance = f64::INFINITY;
        let mut best: BTreeSet<usize> = BTreeSet::new();
        for p in &self.fuzzy {
            let d = normalized_edit_distance(&name, &p.text);
            if d > p.budget {
                continue;
            }
            if d < best_distance {
                best_distance = d;
                best.clear();
            }
            if d == best_distance {
                best.insert(p.target);
            }
        }
        match best.len() {
            0 => MatchOutcome::Unmatched,
            1 => MatchOutcome::Matched {
                institution_id: self.id(*best.iter().next().unwrap()),
                rule: RuleKind::Fuzzy,
                distance: best_distance,
            },
            _ => self.ambiguous(best),
        }
    }
}

fn csv_reader(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new().from_reader(file))
}

fn expect_header<R: Read>(rdr: &mut csv::Reader<R>, expected: &[&str], path: &Path) -> Result<()> {
    let found: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    if found != expected {
        return Err(Error::Header {
            path: path.to_path_buf(),
            expected: expected.join(","),
            found: found.join(","),
        });
    }
    Ok(())
}

pub fn read_institutions(path: impl AsRef<Path>) -> Result<Vec<CanonicalInstitution>> {
    let path = path.as_ref();
    let mut rdr = csv_reader(path)?;
    expect_header(&mut rdr, &INSTITUTION_HEADER, path)?;
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let (country_code, _) = normalize_country_code(&row[2]).ok_or_else(|| {
            Error::Invalid(format!("{}:{line}: invalid country code", path.display()))
        })?;
        out.push(CanonicalInstitution {
            institution_id: row[0].trim().to_string(),
            canonical_name: row[1].to_string(),
            country_code,
            kind: row[3].parse()?,
        });
    }
    Ok(out)
}

pub fn read_aliases(path: impl AsRef<Path>) -> Result<Vec<AliasRule>> {
    let path = path.as_ref();
    let mut rdr = csv_reader(path)?;
    expect_header(&mut rdr, &ALIAS_HEADER, path)?;
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let fuzzy_budget = match row[3].trim() {
            "" => None,
            s => Some(s.parse::<f64>().map_err(|_| {
                Error::Invalid(format!("{}:{line}: fuzzy_budget is not a number", path.display()))
            })?),
        };
        out.push(AliasRule {
            pattern: normalize_name(&row[0]),
            target_institution_id: row[1].trim().to_string(),
            rule_kind: row[2].parse()?,
            fuzzy_budget,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountryAggregate {
    pub country_code: String,
    pub ibb_hcr: u64,
    pub wos_hcr: u64,
    #[serde(rename = "P")]
    pub p: f64,
    pub p_top1: f64,
    pub p_top5: f64,
    pub p_top10: f64,
    pub p_top50: f64,
    pub period: Period,
    pub matched_institutions: usize,
}

impl CountryAggregate {
    pub fn is_nested(&self) -> bool {
        is_nested([self.p_top1, self.p_top5, self.p_top10, self.p_top50, self.p])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregationPolicy {
    pub use_record_country_on_unmatched: bool,
    /// Count AMBIGUOUS as UNMATCHED instead of aborting.
    pub allow_unmatched: bool,
    /// `None` accepts every counting mode.
    pub counting_mode: Option<CountingMode>,
    /// `None` accepts every field.
    pub field_label: Option<String>,
    /// Applied to every country code before aggregation, e.g. HKG -> CHN.
    pub country_remap: BTreeMap<String, String>,
}

impl Default for AggregationPolicy {
    fn default() -> Self {
        AggregationPolicy {
            use_record_country_on_unmatched: true,
            allow_unmatched: false,
            counting_mode: Some(CountingMode::Fractional),
            field_label: Some(DEFAULT_FIELD.to_string()),
            country_remap: BTreeMap::new(),
        }
    }
}

impl AggregationPolicy {
    fn remap<'a>(&'a self, code: &'a str) -> &'a str {
        self.country_remap.get(code).map(String::as_str).unwrap_or(code)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditEntry {
    pub raw_affiliation: String,
    pub outcome: MatchOutcome,
}

/// Where every roster row ended up.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RosterTally {
    pub roster_size: usize,
    pub counted: usize,
    pub hospital_excluded: usize,
    pub unmatched_no_country: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregation {
    pub aggregates: Vec<CountryAggregate>,
    pub audit: Vec<AuditEntry>,
    pub tally: RosterTally,
    pub metrics_rows_used: usize,
    pub metrics_rows_unmatched: usize,
}

#[derive(Default)]
struct Accumulator {
    ibb: u64,
    wos: u64,
    amounts: [Vec<f64>; 5],
    institutions: BTreeSet<String>,
}

/// Order-independent sum.
fn stable_sum(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    values.iter().sum()
}

pub fn aggregate_country(
    records: &[ResearcherRecord],
    metrics: &[InstitutionMetrics],
    registry: &Registry,
    period: Period,
    policy: &AggregationPolicy,
) -> Result<Aggregation> {
    if !metrics.iter().any(|m| m.period == period) {
        return Err(Error::PeriodAbsent(period.to_string()));
    }

    let mut outcomes: BTreeMap<String, MatchOutcome> = BTreeMap::new();
    let mut resolve = |raw: &str| -> MatchOutcome {
        outcomes
            .entry(raw.to_string())
            .or_insert_with(|| registry.resolve(raw))
            .clone()
    };

    let mut ambiguous = BTreeSet::new();
    let mut countries: BTreeMap<String, Accumulator> = BTreeMap::new();
    let mut tally = RosterTally {
        roster_size: records.len(),
        ..Default::default()
    };

    let mut roster_countries = BTreeSet::new();
    for r in records {
        let outcome = resolve(&r.raw_affiliation);
        let country = match outcome {
            MatchOutcome::Matched { institution_id, .. } => {
                let inst = registry.get(&institution_id).expect("resolved id exists");
                if inst.kind == InstitutionKind::Hospital {
                    tally.hospital_excluded += 1;
                    continue;
                }
                Some(policy.remap(&inst.country_code).to_string())
            }
            MatchOutcome::Ambiguous { .. } if !policy.allow_unmatched => {
                ambiguous.insert(r.raw_affiliation.clone());
                continue;
            }
            MatchOutcome::Ambiguous { .. } | MatchOutcome::Unmatched => {
                let code = policy.remap(&r.country_code);
                (policy.use_record_country_on_unmatched && code != UNKNOWN_COUNTRY)
                    .then(|| code.to_string())
            }
        };
        let Some(country) = country else {
            tally.unmatched_no_country += 1;
            continue;
        };
        tally.counted += 1;
        roster_countries.insert(country.clone());
        let acc = countries.entry(country).or_default();
        match r.list_source {
            ListSource::Ibb => acc.ibb += 1,
            ListSource::Wos => acc.wos += 1,
        }
    }

    let mut metric_countries = BTreeSet::new();
    let mut used = 0;
    let mut unmatched = 0;
    let selected = metrics.iter().filter(|m| {
        m.period == period
            && policy.counting_mode.is_none_or(|c| c == m.counting_mode)
            && policy.field_label.as_deref().is_none_or(|f| f == m.field_label)
    });
    for m in selected {
        let outcome = resolve(&m.institution_raw_name);
        let inst = match outcome {
            MatchOutcome::Matched { institution_id, .. } => {
                registry.get(&institution_id).expect("resolved id exists")
            }
            MatchOutcome::Ambiguous { .. } if !policy.allow_unmatched => {
                ambiguous.insert(m.institution_raw_name.clone());
                continue;
            }
            _ => {
                unmatched += 1;
                continue;
            }
        };
        if inst.kind != InstitutionKind::University {
            unmatched += 1;
            continue;
        }
        used += 1;
        let country = policy.remap(&inst.country_code).to_string();
        metric_countries.insert(country.clone());
        let acc = countries.entry(country).or_default();
        for (slot, v) in acc
            .amounts
            .iter_mut()
            .zip([m.p, m.p_top1, m.p_top5, m.p_top10, m.p_top50])
        {
            slot.push(v);
        }
        acc.institutions.insert(inst.institution_id.clone());
    }

    if !ambiguous.is_empty() {
        return Err(Error::Ambiguous(ambiguous.into_iter().collect()));
    }
    if !roster_countries.is_empty()
        && !metric_countries.is_empty()
        && roster_countries.is_disjoint(&metric_countries)
    {
        return Err(Error::EmptyIntersection);
    }

    let aggregates = countries
        .into_iter()
        .map(|(country_code, mut acc)| {
            let [p, p1, p5, p10, p50] = &mut acc.amounts;
            CountryAggregate {
                country_code,
                ibb_hcr: acc.ibb,
                wos_hcr: acc.wos,
                p: stable_sum(p),
                p_top1: stable_sum(p1),
                p_top5: stable_sum(p5),
                p_top10: stable_sum(p10),
                p_top50: stable_sum(p50),
                period,
                matched_institutions: acc.institutions.len(),
            }
        })
        .collect();

    let audit = outcomes
        .into_iter()
        .map(|(raw_affiliation, outcome)| AuditEntry {
            raw_affiliation,
            outcome,
        })
        .collect();

    Ok(Aggregation {
        aggregates,
        audit,
        tally,
        metrics_rows_used: used,
        metrics_rows_unmatched: unmatched,
    })
}

pub fn write_audit<W: Write>(audit: &[AuditEntry], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(AUDIT_HEADER)?;
    for e in audit {
        let (id, distance) = match &e.outcome {
            MatchOutcome::Matched {
                institution_id,
                distance,
                ..
            } => (institution_id.clone(), distance.to_string()),
            MatchOutcome::Ambiguous { candidates } => (candidates.join(";"), String::new()),
            MatchOutcome::Unmatched => (String::new(), String::new()),
        };
        w.write_record([e.raw_affiliation.as_str(), &e.outcome.label(), &id, &distance])?;
    }
    w.flush().map_err(|e| Error::io("<audit output>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(id: &str, name: &str, cc: &str, kind: InstitutionKind) -> CanonicalInstitution {
        CanonicalInstitution {
            institution_id: id.into(),
            canonical_name: name.into(),
            country_code: cc.into(),
            kind,
        }
    }

    fn alias(pattern: &str, target: &str, kind: RuleKind, budget: Option<f64>) -> AliasRule {
        AliasRule {
            pattern: pattern.into(),
            target_institution_id: target.into(),
            rule_kind: kind,
            fuzzy_budget: budget,
        }
    }

    #[test]
    fn normalization_examples() {
        assert_eq!(
            normalize_name("Universidad Politécnica de Madrid"),
            "universidad politecnica de madrid"
        );
        assert_eq!(normalize_name("  ETH—Zürich "), "eth zurich");
        assert_eq!(normalize_name(""), "");
        assert_eq!(normalize_name("Dept. of Physics, Univ. X"), "dept of physics univ x");
    }

    #[test]
    fn department_rollup() {
        let reg = Registry::new(
            vec![inst("X", "University X", "USA", InstitutionKind::University)],
            vec![alias("Univ X", "X", RuleKind::DepartmentOf, None)],
        )
        .unwrap();
        match reg.resolve("Dept. of Physics, Univ. X") {
            MatchOutcome::Matched {
                institution_id,
                rule,
                ..
            } => {
                assert_eq!(institution_id, "X");
                assert_eq!(rule, RuleKind::DepartmentOf);
            }
            other => panic!("{other:?}"),
        }
        // whole-token match only
        assert_eq!(reg.resolve("Univ Xavier"), MatchOutcome::Unmatched);
    }

    #[test]
    fn exact_canonical_name() {
        let reg = Registry::new(
            vec![inst("M", "Universidad Politécnica de Madrid", "ESP", InstitutionKind::University)],
            vec![],
        )
        .unwrap();
        assert!(matches!(
            reg.resolve("UNIVERSIDAD POLITECNICA DE MADRID"),
            MatchOutcome::Matched { rule: RuleKind::Exact, .. }
        ));
    }

    #[test]
    fn exact_beats_department_beats_fuzzy() {
        let reg = Registry::new(
            vec![
                inst("A", "Alpha University", "USA", InstitutionKind::University),
                inst("B", "Beta University", "USA", InstitutionKind::University),
            ],
            vec![
                alias("alpha university chemistry", "B", RuleKind::Exact, None),
                alias("alpha university", "A", RuleKind::DepartmentOf, None),
            ],
        )
        .unwrap();
        let id = |o: MatchOutcome| match o {
            MatchOutcome::Matched { institution_id, rule, .. } => (institution_id, rule),
            other => panic!("{other:?}"),
        };
        assert_eq!(id(reg.resolve("Alpha University, Chemistry")), ("B".into(), RuleKind::Exact));
        assert_eq!(
            id(reg.resolve("Physics, Alpha University")),
            ("A".into(), RuleKind::DepartmentOf)
        );
        assert_eq!(id(reg.resolve("Alpha Universty")), ("A".into(), RuleKind::Fuzzy));
    }

    #[test]
    fn fuzzy_tie_is_ambiguous() {
        let reg = Registry::new(
            vec![
                inst("A", "university of abcde", "USA", InstitutionKind::University),
                inst("B", "university of abcdf", "USA", InstitutionKind::University),
            ],
            vec![],
        )
        .unwrap();
        match reg.resolve("university of abcdg") {
            MatchOutcome::Ambiguous { candidates } => assert_eq!(candidates, vec!["A", "B"]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn fuzzy_budget_is_bounded() {
        let err = Registry::new(
            vec![inst("A", "Alpha", "USA", InstitutionKind::University)],
            vec![alias("alfa", "A", RuleKind::Fuzzy, Some(0.3))],
        );
        assert!(err.is_err());
        let err = Registry::new(
            vec![inst("A", "Alpha", "USA", InstitutionKind::University)],
            vec![alias("alfa", "Z", RuleKind::Exact, None)],
        );
        assert!(err.is_err());
    }

    #[test]
    fn edit_distance() {
        assert_eq!(normalized_edit_distance("", ""), 0.0);
        assert_eq!(normalized_edit_distance("abcd", "abce"), 0.25);
        assert_eq!(normalized_edit_distance("zürich", "zurich"), 1.0 / 6.0);
    }
}
