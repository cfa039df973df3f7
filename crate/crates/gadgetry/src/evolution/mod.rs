//! Version-identifier cleaning and ordering, serializability time-series
//! statistics (Pearson over release date and version index, plus a sampled
//! corpus-wide correlation), and dataset bucket classification.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::hierarchy::{ChangeEvent, ChangeKind};

#[derive(Debug, Error)]
pub enum EvolutionError {
    #[error("series lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("no series covers every year of the requested range")]
    EmptyAfterFilter,
    #[error("relocation chain starting at {name} loops")]
    RelocationCycle { name: String },
    #[error("bad date {raw:?}, expected YYYY-MM-DD")]
    BadDate { raw: String },
}

/// Why a version identifier was dropped from a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RemovalReason {
    AlphaTag,
    DateMinority,
    Unparseable,
}

/// A raw version identifier and its cleaned, sortable form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VersionId {
    pub raw: String,
    /// Dot-joined numeric segments; absent iff `removed_reason` is set.
    pub cleaned: Option<String>,
    pub segments: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub removed_reason: Option<RemovalReason>,
}

impl VersionId {
    pub fn is_retained(&self) -> bool {
        self.removed_reason.is_none()
    }

    fn removed(raw: &str, reason: RemovalReason) -> VersionId {
        VersionId {
            raw: raw.to_string(),
            cleaned: None,
            segments: Vec::new(),
            removed_reason: Some(reason),
        }
    }
}

/// Tags that mark a non-release version; their presence rejects the whole
/// identifier. Matched case-insensitively at non-letter boundaries, plus the
/// `M<digit>` milestone shorthand.
const PRE_RELEASE_TAGS: &[&str] = &["alpha", "beta", "rc", "dev", "snapshot", "milestone", "cr", "ea"];

/// Tags that decorate a plain release; they are stripped, not rejected.
const RELEASE_TAGS: &[&str] = &["final", "release", "ga"];

fn has_tag_at_boundary(lower: &str, tag: &str) -> bool {
    let bytes = lower.as_bytes();
    let mut from = 0;
    while let Some(pos) = lower[from..].find(tag) {
        let start = from + pos;
        let end = start + tag.len();
        let left_ok = start == 0 || !bytes[start - 1].is_ascii_alphabetic();
        let right_ok = end == bytes.len() || !bytes[end].is_ascii_alphabetic();
        if left_ok && right_ok {
            return true;
        }
        from = start + 1;
    }
    false
}

fn has_milestone_shorthand(lower: &str) -> bool {
    let bytes = lower.as_bytes();
    bytes.iter().enumerate().any(|(i, &b)| {
        b == b'm'
            && (i == 0 || !bytes[i - 1].is_ascii_alphabetic())
            && bytes.get(i + 1).map(|n| n.is_ascii_digit()).unwrap_or(false)
    })
}

/// Cleans one raw version identifier: pre-release tags reject it outright;
/// release tags are stripped; `-`/`_` and letter runs sandwiched between
/// digits become dot separators; finally the leading dot-separated numeric
/// segments are kept and any residue is truncated. No numeric segment at all
/// means the identifier is unparseable.
pub fn clean_version(raw: &str) -> VersionId {
    let lower = raw.to_ascii_lowercase();
    if PRE_RELEASE_TAGS.iter().any(|t| has_tag_at_boundary(&lower, t))
        || has_milestone_shorthand(&lower)
    {
        return VersionId::removed(raw, RemovalReason::AlphaTag);
    }

    let mut stripped = lower;
    for tag in RELEASE_TAGS {
        while let Some(pos) = find_tag_at_boundary(&stripped, tag) {
            stripped.replace_range(pos..pos + tag.len(), "");
        }
    }

    let normalized = normalize_separators(&stripped);
    let segments = leading_segments(&normalized);
    if segments.is_empty() {
        return VersionId::removed(raw, RemovalReason::Unparseable);
    }
    let cleaned = segments.iter().map(u64::to_string).collect::<Vec<_>>().join(".");
    VersionId { raw: raw.to_string(), cleaned: Some(cleaned), segments, removed_reason: None }
}

fn find_tag_at_boundary(lower: &str, tag: &str) -> Option<usize> {
    let bytes = lower.as_bytes();
    let mut from = 0;
    while let Some(pos) = lower[from..].find(tag) {
        let start = from + pos;
        let end = start + tag.len();
        let left_ok = start == 0 || !bytes[start - 1].is_ascii_alphabetic();
        let right_ok = end == bytes.len() || !bytes[end].is_ascii_alphabetic();
        if left_ok && right_ok {
            return Some(start);
        }
        from = start + 1;
    }
    None
}

fn normalize_separators(s: &str) -> String {
    let chars: Vec<char> = s.chars().collect();
    let mut out = String::with_capacity(s.len());
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '-' || c == '_' {
            out.push('.');
            i += 1;
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphabetic() {
                i += 1;
            }
            let prev_digit = start > 0 && chars[start - 1].is_ascii_digit();
            let next_digit = i < chars.len() && chars[i].is_ascii_digit();
            if prev_digit && next_digit {
                out.push('.');
            } else {
                out.extend(&chars[start..i]);
            }
        } else {
            out.push(c);
            i += 1;
        }
    }
    out
}

fn leading_segments(s: &str) -> Vec<u64> {
    let mut segments = Vec::new();
    let mut rest = s;
    loop {
        let digits = rest.chars().take_while(char::is_ascii_digit).count();
        if digits == 0 {
            break;
        }
        let Ok(value) = rest[..digits].parse::<u64>() else { break };
        segments.push(value);
        rest = &rest[digits..];
        match rest.strip_prefix('.') {
            Some(r) if r.starts_with(|c: char| c.is_ascii_digit()) => rest = r,
            _ => break,
        }
    }
    segments
}

/// True for a cleaned identifier that is a single plausible yyyymmdd value.
pub fn is_date_version(id: &VersionId) -> bool {
    let [n] = id.segments[..] else { return false };
    let (y, m, d) = (n / 10_000, n / 100 % 100, n % 100);
    id.cleaned.as_deref().map(str::len) == Some(8)
        && (1990..=2099).contains(&y)
        && (1..=12).contains(&m)
        && (1..=31).contains(&d)
}

/// Removes date-formatted identifiers when they are a minority (at most 20%
/// of the retained series); a series that mostly uses dates keeps them all.
pub fn filter_date_versions(ids: &[VersionId]) -> Vec<VersionId> {
    let total = ids.iter().filter(|v| v.is_retained()).count();
    let dates = ids.iter().filter(|v| v.is_retained() && is_date_version(v)).count();
    let remove = dates > 0 && dates * 5 <= total;
    ids.iter()
        .map(|v| {
            if remove && v.is_retained() && is_date_version(v) {
                VersionId::removed(&v.raw, RemovalReason::DateMinority)
            } else {
                v.clone()
            }
        })
        .collect()
}

/// Segment-wise numeric order; the shorter tuple is padded with zeros, so
/// `1.0` and `1.0.0` compare equal.
pub fn compare_versions(a: &[u64], b: &[u64]) -> Ordering {
    let n = a.len().max(b.len());
    for i in 0..n {
        let (x, y) = (a.get(i).copied().unwrap_or(0), b.get(i).copied().unwrap_or(0));
        match x.cmp(&y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// Calendar date; ordinal() maps it onto a continuous day count for
/// correlation against class counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Date {
    pub year: i32,
    pub month: u32,
    pub day: u32,
}

impl Date {
    pub fn new(year: i32, month: u32, day: u32) -> Date {
        Date { year, month, day }
    }

    pub fn parse(raw: &str) -> Result<Date, EvolutionError> {
        let bad = || EvolutionError::BadDate { raw: raw.to_string() };
        let mut parts = raw.splitn(3, '-');
        let year: i32 = parts.next().and_then(|p| p.parse().ok()).ok_or_else(bad)?;
        let month: u32 = parts.next().and_then(|p| p.parse().ok()).ok_or_else(bad)?;
        let day: u32 = parts.next().and_then(|p| p.parse().ok()).ok_or_else(bad)?;
        if !(1..=12).contains(&month) || !(1..=31).contains(&day) {
            return Err(bad());
        }
        Ok(Date { year, month, day })
    }

    /// Days since 1970-01-01 (proleptic Gregorian).
    pub fn ordinal(&self) -> i64 {
        let y = i64::from(self.year) - i64::from(self.month <= 2);
        let era = if y >= 0 { y } else { y - 399 } / 400;
        let yoe = y - era * 400;
        let mp = i64::from((self.month + 9) % 12);
        let doy = (153 * mp + 2) / 5 + i64::from(self.day) - 1;
        let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
        era * 146_097 + doe - 719_468
    }
}

impl fmt::Display for Date {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}-{:02}", self.year, self.month, self.day)
    }
}

impl Serialize for Date {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// One retained release of a dependency.
#[derive(Debug, Clone, Serialize)]
pub struct SeriesPoint {
    pub version: VersionId,
    pub release_date: Date,
    pub serializable_count: u64,
}

/// A dependency's cleaned release history, sorted by version order.
#[derive(Debug, Clone, Serialize)]
pub struct VersionSeries {
    pub dependency: String,
    pub points: Vec<SeriesPoint>,
    pub relocated_from: Vec<String>,
    pub warnings: Vec<String>,
}

/// Cleans, date-filters, orders, and deduplicates a dependency's raw release
/// rows into a series. Versions that compare equal after cleaning keep their
/// first occurrence; later ties are dropped with a warning.
pub fn build_series(dependency: &str, rows: Vec<(String, Date, u64)>) -> VersionSeries {
    let ids: Vec<VersionId> = rows.iter().map(|(raw, _, _)| clean_version(raw)).collect();
    let ids = filter_date_versions(&ids);

    let mut warnings = Vec::new();
    let mut points: Vec<SeriesPoint> = Vec::new();
    for (id, (raw, date, count)) in ids.into_iter().zip(rows) {
        match id.removed_reason {
            Some(reason) => {
                warnings.push(format!("version {raw:?} removed ({reason:?})"));
            }
            None => points.push(SeriesPoint {
                version: id,
                release_date: date,
                serializable_count: count,
            }),
        }
    }

    points.sort_by(|a, b| compare_versions(&a.version.segments, &b.version.segments));
    let mut deduped: Vec<SeriesPoint> = Vec::with_capacity(points.len());
    for p in points {
        match deduped.last() {
            Some(prev)
                if compare_versions(&prev.version.segments, &p.version.segments)
                    == Ordering::Equal =>
            {
                warnings.push(format!(
                    "version {:?} compares equal to {:?}; first kept",
                    p.version.raw, prev.version.raw
                ));
            }
            _ => deduped.push(p),
        }
    }

    VersionSeries {
        dependency: dependency.to_string(),
        points: deduped,
        relocated_from: Vec::new(),
        warnings,
    }
}

/// Pearson correlation coefficient; `None` when either series has zero
/// standard deviation (including series shorter than two points).
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<Option<f64>, EvolutionError> {
    if xs.len() != ys.len() {
        return Err(EvolutionError::LengthMismatch { left: xs.len(), right: ys.len() });
    }
    if xs.len() < 2 {
        return Ok(None);
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut cov, mut vx, mut vy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        cov += dx * dy;
        vx += dx * dx;
        vy += dy * dy;
    }
    if vx == 0.0 || vy == 0.0 {
        return Ok(None);
    }
    Ok(Some(cov / (vx.sqrt() * vy.sqrt())))
}

pub const ZERO_STD_REASON: &str = "zero standard deviation";

/// Per-dependency correlation of serializable-class count against release
/// date and against version index.
#[derive(Debug, Clone, Serialize)]
pub struct CorrelationReport {
    pub rho_date: Option<f64>,
    pub rho_version: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub na_reason: Option<String>,
}

pub fn correlation_report(series: &VersionSeries) -> CorrelationReport {
    let counts: Vec<f64> = series.points.iter().map(|p| p.serializable_count as f64).collect();
    let dates: Vec<f64> = series.points.iter().map(|p| p.release_date.ordinal() as f64).collect();
    let index: Vec<f64> = (0..series.points.len()).map(|i| i as f64).collect();
    let rho_date = pearson(&dates, &counts).expect("equal lengths");
    let rho_version = pearson(&index, &counts).expect("equal lengths");
    let na_reason =
        (rho_date.is_none() || rho_version.is_none()).then(|| ZERO_STD_REASON.to_string());
    CorrelationReport { rho_date, rho_version, na_reason }
}

/// Mean over `samples` draws of the pooled year-vs-count correlation, taking
/// one random release per dependency-year. Series that lack a release in any
/// year of the range are excluded up front; draws whose pooled series has
/// zero standard deviation are skipped, and if every draw is skipped the
/// result is `None`.
pub fn overall_correlation(
    series: &[VersionSeries],
    years: RangeInclusive<i32>,
    samples: usize,
    seed: u64,
) -> Result<Option<f64>, EvolutionError> {
    let retained: Vec<&VersionSeries> = series
        .iter()
        .filter(|s| {
            years
                .clone()
                .all(|y| s.points.iter().any(|p| p.release_date.year == y))
        })
        .collect();
    if retained.is_empty() {
        return Err(EvolutionError::EmptyAfterFilter);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(samples);
    for _ in 0..samples {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for s in &retained {
            for year in years.clone() {
                let candidates: Vec<&SeriesPoint> =
                    s.points.iter().filter(|p| p.release_date.year == year).collect();
                let pick = candidates[rng.gen_range(0..candidates.len())];
                xs.push(f64::from(year));
                ys.push(pick.serializable_count as f64);
            }
        }
        if let Some(r) = pearson(&xs, &ys)? {
            values.push(r);
        }
    }
    if values.is_empty() {
        Ok(None)
    } else {
        Ok(Some(values.iter().sum::<f64>() / values.len() as f64))
    }
}

/// Nested dependency buckets: D ⊆ C ⊆ B ⊆ A.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Dataset {
    A,
    B,
    C,
    D,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DatasetLabel {
    pub labels: BTreeSet<Dataset>,
}

impl DatasetLabel {
    pub fn contains(&self, d: Dataset) -> bool {
        self.labels.contains(&d)
    }
}

fn is_marker_event(kind: ChangeKind) -> bool {
    matches!(
        kind,
        ChangeKind::DirectAdd
            | ChangeKind::DirectRemove
            | ChangeKind::IndirectAdd
            | ChangeKind::IndirectRemove
    )
}

/// Buckets one dependency: A = ever has a serializable class; B = A plus a
/// release in `now_year` or the year before; C = B plus a non-constant count
/// series; D = C plus at least one serializability marker change event.
pub fn classify_dataset(
    series: &VersionSeries,
    events: &[Vec<ChangeEvent>],
    now_year: i32,
) -> DatasetLabel {
    let a = series.points.iter().any(|p| p.serializable_count >= 1);
    let b = a
        && series
            .points
            .iter()
            .any(|p| p.release_date.year == now_year || p.release_date.year == now_year - 1);
    let c = b && {
        let counts = series.points.iter().map(|p| p.serializable_count);
        counts.clone().min() != counts.max()
    };
    let d = c && events.iter().flatten().any(|e| is_marker_event(e.kind));

    let mut labels = BTreeSet::new();
    if a {
        labels.insert(Dataset::A);
    }
    if b {
        labels.insert(Dataset::B);
    }
    if c {
        labels.insert(Dataset::C);
    }
    if d {
        labels.insert(Dataset::D);
    }
    DatasetLabel { labels }
}

/// Follows each relocation chain to its terminal name.
pub fn resolve_relocations(
    listing: &BTreeMap<String, Option<String>>,
) -> Result<BTreeMap<String, String>, EvolutionError> {
    let mut out = BTreeMap::new();
    for name in listing.keys() {
        let mut visited = BTreeSet::new();
        visited.insert(name.as_str());
        let mut cur = name.as_str();
        while let Some(Some(next)) = listing.get(cur) {
            if !visited.insert(next.as_str()) {
                return Err(EvolutionError::RelocationCycle { name: name.clone() });
            }
            cur = next;
        }
        out.insert(name.clone(), cur.to_string());
    }
    Ok(out)
}

/// Corpus-level bucket counts and percentages.
#[derive(Debug, Clone, Serialize)]
pub struct CorpusSummary {
    pub total: usize,
    pub counts: BTreeMap<Dataset, usize>,
    pub percentages: BTreeMap<Dataset, f64>,
}

pub fn summarize(labels: &[DatasetLabel]) -> CorpusSummary {
    let mut counts = BTreeMap::new();
    for d in [Dataset::A, Dataset::B, Dataset::C, Dataset::D] {
        counts.insert(d, labels.iter().filter(|l| l.contains(d)).count());
    }
    let total = labels.len();
    let percentages = counts
        .iter()
        .map(|(&d, &c)| (d, if total == 0 { 0.0 } else { c as f64 * 100.0 / total as f64 }))
        .collect();
    CorpusSummary { total, counts, percentages }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn retained(raw: &str) -> String {
        clean_version(raw).cleaned.expect("retained")
    }

    #[test]
    fn cleaning_rule_goldens() {
        assert_eq!(retained("5.2.25.FINAL"), "5.2.25");
        assert_eq!(
            clean_version("1.6.0-dev01").removed_reason,
            Some(RemovalReason::AlphaTag)
        );
        assert_eq!(retained("1.5R4"), "1.5.4");
        assert_eq!(retained("2686.v7c37e0578401"), "2686");
        assert_eq!(retained("1.0.0"), "1.0.0");
    }

    #[test]
    fn cleaning_handles_tag_variants() {
        assert_eq!(retained("1.0.0.RELEASE"), "1.0.0");
        assert_eq!(retained("2.3-ga"), "2.3");
        assert_eq!(clean_version("4.0.0.CR1").removed_reason, Some(RemovalReason::AlphaTag));
        assert_eq!(clean_version("1.0.M2").removed_reason, Some(RemovalReason::AlphaTag));
        assert_eq!(clean_version("3.0.0-SNAPSHOT").removed_reason, Some(RemovalReason::AlphaTag));
        assert_eq!(clean_version("2.0-beta1").removed_reason, Some(RemovalReason::AlphaTag));
        assert_eq!(clean_version("1.1-ea").removed_reason, Some(RemovalReason::AlphaTag));
        // "release" contains "ea" without a letter boundary; it must strip,
        // not reject.
        assert_eq!(retained("7.ophelia"), "7");
        assert_eq!(clean_version("nodigits").removed_reason, Some(RemovalReason::Unparseable));
        assert_eq!(retained("1_2_3"), "1.2.3");
    }

    #[test]
    fn cleaning_is_idempotent_on_cleaned_forms() {
        for raw in ["5.2.25.FINAL", "1.5R4", "2686.v7c37e0578401", "1.0.0", "1_2-3.x4y5"] {
            let once = clean_version(raw);
            if let Some(c) = once.cleaned.as_deref() {
                let twice = clean_version(c);
                assert_eq!(twice.cleaned.as_deref(), Some(c), "{raw}");
                assert_eq!(twice.segments, once.segments, "{raw}");
            }
        }
    }

    #[test]
    fn date_minority_removed_majority_kept() {
        // Expansion of the abbreviated golden series [3.2.2, 3.2.1, ...,
        // 20040616]: one date among five retained entries sits exactly at the
        // 20% boundary and is removed.
        let ids: Vec<VersionId> = ["3.2.2", "3.2.1", "3.2.0", "3.1.0", "20040616"]
            .iter()
            .map(|r| clean_version(r))
            .collect();
        let filtered = filter_date_versions(&ids);
        assert_eq!(filtered[4].removed_reason, Some(RemovalReason::DateMinority));
        assert!(filtered[..4].iter().all(VersionId::is_retained));

        // A date-majority scheme keeps every entry.
        let dates: Vec<VersionId> =
            ["20200101", "20210101", "20220101"].iter().map(|r| clean_version(r)).collect();
        let kept = filter_date_versions(&dates);
        assert!(kept.iter().all(VersionId::is_retained));

        // Above the threshold (1 of 2) nothing is removed.
        let half: Vec<VersionId> = ["1.0", "20200101"].iter().map(|r| clean_version(r)).collect();
        assert!(filter_date_versions(&half).iter().all(VersionId::is_retained));

        // No dates at all: unchanged.
        let plain: Vec<VersionId> = ["1.0", "2.0"].iter().map(|r| clean_version(r)).collect();
        assert_eq!(filter_date_versions(&plain), plain);
    }

    #[test]
    fn series_sorts_numerically_and_dedups_ties() {
        let d = Date::new(2020, 1, 1);
        let rows = vec![
            ("1.10".to_string(), d, 3),
            ("1.9".to_string(), d, 2),
            ("1.0.0".to_string(), d, 1),
            ("1.0".to_string(), d, 9),
            ("0.9-beta1".to_string(), d, 7),
        ];
        let series = build_series("demo", rows);
        let order: Vec<&str> =
            series.points.iter().map(|p| p.version.raw.as_str()).collect();
        // 1.0.0 appears before 1.10 despite "1.10" < "1.9" lexicographically;
        // the tie 1.0 vs 1.0.0 keeps the first occurrence (1.0.0).
        assert_eq!(order, ["1.0.0", "1.9", "1.10"]);
        assert_eq!(series.warnings.len(), 2); // beta removal + tie
        assert!(series.warnings.iter().any(|w| w.contains("first kept")));
    }

    #[test]
    fn pearson_matches_textbook_values() {
        let r = pearson(&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 3.0, 4.0]).unwrap().unwrap();
        assert!((r - 1.0).abs() < 1e-12);

        // Hand computation: deviations dx=[-1,0,1], dy=[1,-1,0], cov=-1,
        // vx=vy=2, r = -1/2.
        let r = pearson(&[1.0, 2.0, 3.0], &[3.0, 1.0, 2.0]).unwrap().unwrap();
        assert!((r - (-0.5)).abs() < 1e-12);

        assert_eq!(pearson(&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0]).unwrap(), None);
        assert!(matches!(
            pearson(&[1.0], &[1.0, 2.0]),
            Err(EvolutionError::LengthMismatch { left: 1, right: 2 })
        ));

        // Symmetry and positive-affine invariance.
        let xs = [1.0, 4.0, 2.0, 8.0];
        let ys = [3.0, 1.0, 7.0, 2.0];
        let a = pearson(&xs, &ys).unwrap().unwrap();
        let b = pearson(&ys, &xs).unwrap().unwrap();
        assert!((a - b).abs() < 1e-12);
        let scaled: Vec<f64> = xs.iter().map(|x| 3.0 * x + 11.0).collect();
        let c = pearson(&scaled, &ys).unwrap().unwrap();
        assert!((a - c).abs() < 1e-12);
    }

    fn yearly_series(name: &str, years: RangeInclusive<i32>, count_of: impl Fn(i32) -> u64) -> VersionSeries {
        let mut rows = Vec::new();
        for (i, y) in years.enumerate() {
            // Two releases per year so sampling has a real choice.
            rows.push((format!("{}.0", i + 1), Date::new(y, 3, 1), count_of(y)));
            rows.push((format!("{}.1", i + 1), Date::new(y, 9, 1), count_of(y)));
        }
        build_series(name, rows)
    }

    #[test]
    fn overall_correlation_is_seeded_and_handles_degenerate_input() {
        let rising = yearly_series("up", 2015..=2024, |y| (y - 2000) as u64);
        let r = overall_correlation(std::slice::from_ref(&rising), 2015..=2024, 100, 7)
            .unwrap()
            .unwrap();
        assert!((r - 1.0).abs() < 1e-12);
        let r2 = overall_correlation(std::slice::from_ref(&rising), 2015..=2024, 100, 12345)
            .unwrap()
            .unwrap();
        assert!((r2 - 1.0).abs() < 1e-12);

        // Bit-reproducible for a fixed seed on noisy data.
        let noisy = yearly_series("noisy", 2015..=2024, |y| ((y * 37) % 11) as u64);
        let both = [&rising, &noisy].map(|s| s.clone());
        let a = overall_correlation(&both, 2015..=2024, 100, 42).unwrap().unwrap();
        let b = overall_correlation(&both, 2015..=2024, 100, 42).unwrap().unwrap();
        assert_eq!(a.to_bits(), b.to_bits());

        // Constant counts everywhere: zero standard deviation propagates.
        let flat = yearly_series("flat", 2015..=2024, |_| 5);
        assert!(overall_correlation(std::slice::from_ref(&flat), 2015..=2024, 10, 1)
            .unwrap()
            .is_none());

        // A series missing a year is filtered; nothing left is an error.
        let gappy = yearly_series("gappy", 2016..=2024, |y| y as u64);
        assert!(matches!(
            overall_correlation(std::slice::from_ref(&gappy), 2015..=2024, 10, 1),
            Err(EvolutionError::EmptyAfterFilter)
        ));
    }

    fn series_with(points: Vec<(i32, u64)>) -> VersionSeries {
        let rows = points
            .into_iter()
            .enumerate()
            .map(|(i, (year, count))| (format!("{}.0", i + 1), Date::new(year, 6, 1), count))
            .collect();
        build_series("demo", rows)
    }

    #[test]
    fn dataset_labels_nest_and_match_definitions() {
        let now = 2025;
        let never = series_with(vec![(2015, 0), (2025, 0)]);
        assert!(classify_dataset(&never, &[], now).labels.is_empty());

        let stale = series_with(vec![(2015, 3), (2016, 4)]);
        let l = classify_dataset(&stale, &[], now);
        assert!(l.contains(Dataset::A) && !l.contains(Dataset::B));

        let steady = series_with(vec![(2015, 3), (2025, 3)]);
        let l = classify_dataset(&steady, &[], now);
        assert!(l.contains(Dataset::B) && !l.contains(Dataset::C));

        let class_churn = series_with(vec![(2015, 3), (2025, 9)]);
        let churn_events = vec![vec![ChangeEvent {
            kind: ChangeKind::ClassAdded,
            class_name: "a/B".to_string(),
            cause_class: None,
        }]];
        let l = classify_dataset(&class_churn, &churn_events, now);
        assert!(l.contains(Dataset::C) && !l.contains(Dataset::D));

        let marker_events = vec![vec![ChangeEvent {
            kind: ChangeKind::DirectAdd,
            class_name: "a/B".to_string(),
            cause_class: None,
        }]];
        let l = classify_dataset(&class_churn, &marker_events, now);
        assert!(l.contains(Dataset::D));

        // Nesting holds on every constructed label.
        for label in [
            classify_dataset(&never, &[], now),
            classify_dataset(&stale, &[], now),
            classify_dataset(&steady, &[], now),
            classify_dataset(&class_churn, &marker_events, now),
        ] {
            if label.contains(Dataset::D) {
                assert!(label.contains(Dataset::C));
            }
            if label.contains(Dataset::C) {
                assert!(label.contains(Dataset::B));
            }
            if label.contains(Dataset::B) {
                assert!(label.contains(Dataset::A));
            }
        }
    }

    #[test]
    fn relocations_resolve_chains_and_reject_cycles() {
        let mut listing = BTreeMap::new();
        listing.insert("javax.servlet-api".to_string(), Some("jakarta.servlet-api".to_string()));
        listing.insert("jakarta.servlet-api".to_string(), Some("jakarta.servlet".to_string()));
        listing.insert("jakarta.servlet".to_string(), None);
        listing.insert("org.junit".to_string(), None);
        let resolved = resolve_relocations(&listing).unwrap();
        assert_eq!(resolved["javax.servlet-api"], "jakarta.servlet");
        assert_eq!(resolved["jakarta.servlet-api"], "jakarta.servlet");
        assert_eq!(resolved["org.junit"], "org.junit");

        let mut cyclic = BTreeMap::new();
        cyclic.insert("a".to_string(), Some("b".to_string()));
        cyclic.insert("b".to_string(), Some("a".to_string()));
        assert!(matches!(
            resolve_relocations(&cyclic),
            Err(EvolutionError::RelocationCycle { .. })
        ));
    }

    #[test]
    fn correlation_report_flags_zero_std() {
        let flat = series_with(vec![(2015, 5), (2016, 5), (2017, 5)]);
        let report = correlation_report(&flat);
        assert!(report.rho_date.is_none() && report.rho_version.is_none());
        assert_eq!(report.na_reason.as_deref(), Some(ZERO_STD_REASON));

        let rising = series_with(vec![(2015, 1), (2016, 2), (2017, 3)]);
        let report = correlation_report(&rising);
        assert!((report.rho_version.unwrap() - 1.0).abs() < 1e-12);
        assert!(report.rho_date.unwrap() > 0.99);
        assert!(report.na_reason.is_none());
    }

    #[test]
    fn dates_parse_and_order() {
        let d = Date::parse("2004-06-16").unwrap();
        assert_eq!((d.year, d.month, d.day), (2004, 6, 16));
        assert_eq!(d.to_string(), "2004-06-16");
        assert_eq!(Date::new(1970, 1, 1).ordinal(), 0);
        assert_eq!(Date::new(1970, 1, 2).ordinal(), 1);
        assert_eq!(Date::new(1969, 12, 31).ordinal(), -1);
        assert_eq!(Date::new(2000, 3, 1).ordinal() - Date::new(2000, 2, 28).ordinal(), 2);
        assert!(Date::parse("2004-13-01").is_err());
        assert!(Date::parse("junk").is_err());
    }

    #[test]
    fn summary_counts_buckets() {
        let labels: Vec<DatasetLabel> = vec![
            DatasetLabel { labels: BTreeSet::from([Dataset::A]) },
            DatasetLabel { labels: BTreeSet::from([Dataset::A, Dataset::B]) },
            DatasetLabel { labels: BTreeSet::new() },
            DatasetLabel {
                labels: BTreeSet::from([Dataset::A, Dataset::B, Dataset::C, Dataset::D]),
            },
        ];
        let s = summarize(&labels);
        assert_eq!(s.total, 4);
        assert_eq!(s.counts[&Dataset::A], 3);
        assert_eq!(s.counts[&Dataset::B], 2);
        assert_eq!(s.counts[&Dataset::C], 1);
        assert_eq!(s.counts[&Dataset::D], 1);
        assert!((s.percentages[&Dataset::A] - 75.0).abs() < 1e-12);
    }
}
