use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{
    bonferroni, correlate, exclude_fast, likert_summary, pairs, pairwise_compare, LikertRecord,
    Part, Prototype, ScoreRow, StatsError,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub threshold_sec: f64,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            threshold_sec: super::DEFAULT_THRESHOLD_SEC,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Score,
    TimeSec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub pair: (Prototype, Prototype),
    pub coef: f64,
    pub t: f64,
    pub p: f64,
    pub corrected_p: f64,
    pub cohens_d: f64,
    pub n_a: usize,
    pub n_b: usize,
}

/// Pairwise comparisons corrected together.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Family {
    pub metric: Metric,
    pub task: u8,
    pub part: Part,
    /// Number of tests in the family, the Bonferroni multiplier.
    pub m: usize,
    pub rows: Vec<ComparisonRow>,
}

/// Time against score for one prototype on one part of a task. `r` is absent
/// when either series is constant or has fewer than two points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationCell {
    pub prototype: Prototype,
    pub task: u8,
    pub part: Part,
    pub n: usize,
    pub r: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LikertRow {
    pub prototype: Prototype,
    pub question_id: String,
    pub n: usize,
    pub agree: usize,
    pub percent_agree: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exclusion {
    pub participant_id: String,
    pub task: u8,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub threshold_sec: f64,
    pub participants: usize,
    pub excluded: Vec<Exclusion>,
    pub families: Vec<Family>,
    pub correlations: Vec<CorrelationCell>,
    pub likert: Vec<LikertRow>,
}

/// Excludes fast participants, then compares every pair of prototypes on
/// score and on time for each part of each task.
pub fn build_report(
    rows: &[ScoreRow],
    likert: &[LikertRecord],
    cfg: &ReportConfig,
) -> Result<Report, StatsError> {
    let (kept, dropped) = exclude_fast(rows, cfg.threshold_sec);
    let excluded: BTreeSet<(String, u8)> = dropped
        .iter()
        .map(|r| (r.participant_id.clone(), r.task))
        .collect();
    let participants = rows
        .iter()
        .map(|r| r.participant_id.as_str())
        .collect::<BTreeSet<_>>()
        .len();

    let mut groups: BTreeMap<(u8, Part), BTreeMap<Prototype, Vec<&ScoreRow>>> = BTreeMap::new();
    for row in &kept {
        groups
            .entry((row.task, row.part))
            .or_default()
            .entry(row.prototype)
            .or_default()
            .push(row);
    }
    if groups.is_empty() {
        let k = rows
            .iter()
            .map(|r| r.prototype)
            .collect::<BTreeSet<_>>()
            .len();
        return Err(StatsError::InsufficientGroups(k));
    }

    let mut families = Vec::new();
    let mut correlations = Vec::new();
    for (&(task, part), by_proto) in &groups {
        let protos: Vec<Prototype> = by_proto.keys().copied().collect();
        if protos.len() < 2 {
            return Err(StatsError::InsufficientGroups(protos.len()));
        }
        let tests = pairs(&protos);
        for metric in [Metric::Score, Metric::TimeSec] {
            let values = |p: &Prototype| -> Vec<f64> {
                by_proto[p]
                    .iter()
                    .map(|r| match metric {
                        Metric::Score => f64::from(r.score),
                        Metric::TimeSec => r.total_time_sec,
                    })
                    .collect()
            };
            let mut out = Vec::with_capacity(tests.len());
            for &(a, b) in &tests {
                let c = pairwise_compare(&values(&a), &values(&b)).map_err(|e| {
                    StatsError::InFamily {
                        context: format!("{metric:?} task {task} part {part} {a} vs {b}"),
                        source: Box::new(e),
                    }
                })?;
                out.push(ComparisonRow {
                    pair: (a, b),
                    coef: c.coef,
                    t: c.t,
                    p: c.p,
                    corrected_p: bonferroni(c.p, tests.len()),
                    cohens_d: c.cohens_d,
                    n_a: c.n_a,
                    n_b: c.n_b,
                });
            }
            families.push(Family {
                metric,
                task,
                part,
                m: tests.len(),
                rows: out,
            });
        }
        for (&prototype, rows) in by_proto {
            let times: Vec<f64> = rows.iter().map(|r| r.total_time_sec).collect();
            let scores: Vec<f64> = rows.iter().map(|r| f64::from(r.score)).collect();
            correlations.push(CorrelationCell {
                prototype,
                task,
                part,
                n: rows.len(),
                r: correlate(&times, &scores).ok(),
            });
        }
    }
    families.sort_by_key(|f| (f.metric, f.task, f.part));

    let mut ratings: BTreeMap<(Prototype, &str), Vec<u8>> = BTreeMap::new();
    for rec in likert {
        ratings
            .entry((rec.prototype, &rec.question_id))
            .or_default()
            .push(rec.rating);
    }
    let mut likert_rows = Vec::new();
    for ((prototype, question_id), rs) in ratings {
        likert_rows.push(LikertRow {
            prototype,
            question_id: question_id.into(),
            n: rs.len(),
            agree: rs.iter().filter(|&&r| r >= 4).count(),
            percent_agree: likert_summary(&rs)?,
        });
    }

    Ok(Report {
        threshold_sec: cfg.threshold_sec,
        participants,
        excluded: excluded
            .into_iter()
            .map(|(participant_id, task)| Exclusion {
                participant_id,
                task,
            })
            .collect(),
        families,
        correlations,
        likert: likert_rows,
    })
}

impl Report {
    /// Plain-text tables, one per family, then correlations and Likert
    /// agreement.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "Participants: {}  Excluded (mean < {} s per question): {}",
            self.participants,
            fmt_num(self.threshold_sec, 1),
            self.excluded.len()
        );
        for fam in &self.families {
            let what = match fam.metric {
                Metric::Score => "Score",
                Metric::TimeSec => "Completion time (s)",
            };
            let _ = writeln!(
                out,
                "\n{what}, Task {}, Part {} (m = {})",
                fam.task, fam.part, fam.m
            );
            let mut table = vec![row_of(&[
                "Pair",
                "Coef",
                "t",
                "P>|t|",
                "Corrected p",
                "Cohen's d",
                "n_a",
                "n_b",
            ])];
            for r in &fam.rows {
                table.push(vec![
                    format!("{} vs {}", r.pair.0, r.pair.1),
                    fmt_num(r.coef, 4),
                    fmt_num(r.t, 3),
                    fmt_num(r.p, 3),
                    fmt_num(r.corrected_p, 3),
                    fmt_num(r.cohens_d, 3),
                    format!("{}", r.n_a),
                    format!("{}", r.n_b),
                ]);
            }
            write_table(&mut out, &table);
        }
        if !self.correlations.is_empty() {
            out.push_str("\nTime vs score (Pearson r)\n");
            let mut table = vec![row_of(&["Prototype", "Task", "Part", "n", "r"])];
            for c in &self.correlations {
                table.push(vec![
                    format!("{}", c.prototype),
                    format!("{}", c.task),
                    format!("{}", c.part),
                    format!("{}", c.n),
                    c.r.map_or_else(|| String::from("-"), |r| fmt_num(r, 3)),
                ]);
            }
            write_table(&mut out, &table);
        }
        if !self.likert.is_empty() {
            out.push_str("\nAgreement (rating 4 or 5)\n");
            let mut table = vec![row_of(&["Prototype", "Question", "n", "Agree", "%"])];
            for l in &self.likert {
                table.push(vec![
                    format!("{}", l.prototype),
                    l.question_id.clone(),
                    format!("{}", l.n),
                    format!("{}", l.agree),
                    fmt_num(l.percent_agree, 1),
                ]);
            }
            write_table(&mut out, &table);
        }
        out
    }
}

use alloc::vec;

fn row_of(cells: &[&str]) -> Vec<String> {
    cells.iter().map(|&c| String::from(c)).collect()
}

fn fmt_num(x: f64, decimals: usize) -> String {
    let s = format!("{x:.decimals$}");
    // "-0.000" reads as a sign error in a table
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].into()
    } else {
        s
    }
}

/// First column left aligned, the rest right aligned.
fn write_table(out: &mut String, rows: &[Vec<String>]) {
    let cols = rows[0].len();
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    for row in rows {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c == 0 {
                let _ = write!(line, "{cell:<w$}", w = widths[c]);
            } else {
                let _ = write!(line, "  {cell:>w$}", w = widths[c]);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(protos: &[Prototype]) -> Vec<ScoreRow> {
        let mut out = Vec::new();
        for (pi, &prototype) in protos.iter().enumerate() {
            for i in 0..5u32 {
                for task in 1..=2u8 {
                    for part in [Part::A, Part::B] {
                        let answered = 8;
                        let total = f64::from(300 + 17 * i + 11 * pi as u32);
                        out.push(ScoreRow {
                            participant_id: format!("{prototype}-{i}"),
                            prototype,
                            task,
                            part,
                            score: (i * 3 + pi as u32 + u32::from(task)) % 9,
                            answered,
                            total_time_sec: total,
                            mean_time_per_q: total / f64::from(answered),
                        });
                    }
                }
            }
        }
        out
    }

    #[test]
    fn four_prototypes_give_six_rows_per_family() {
        let report = build_report(&rows(&Prototype::ALL), &[], &ReportConfig::default()).unwrap();
        assert_eq!(report.families.len(), 8);
        for fam in &report.families {
            assert_eq!(fam.m, 6);
            assert_eq!(fam.rows.len(), 6);
            for r in &fam.rows {
                assert!((r.corrected_p - (6.0 * r.p).min(1.0)).abs() < 1e-15);
                assert!(r.corrected_p >= r.p);
            }
        }
        assert_eq!(report.correlations.len(), 16);
        let text = report.to_text();
        assert!(
            text.contains("Coef       t  P>|t|  Corrected p  Cohen's d  n_a  n_b"),
            "{text}"
        );
        assert!(text.contains("P1 vs P2"));
    }

    #[test]
    fn two_prototypes_give_uncorrected_single_row() {
        let report = build_report(
            &rows(&[Prototype::P1, Prototype::P3]),
            &[],
            &ReportConfig::default(),
        )
        .unwrap();
        for fam in &report.families {
            assert_eq!(fam.m, 1);
            assert_eq!(fam.rows.len(), 1);
            assert_eq!(fam.rows[0].corrected_p, fam.rows[0].p);
        }
    }

    #[test]
    fn insufficient_groups() {
        let err = build_report(&rows(&[Prototype::P2]), &[], &ReportConfig::default()).unwrap_err();
        assert_eq!(err, StatsError::InsufficientGroups(1));
        assert_eq!(
            build_report(&[], &[], &ReportConfig::default()).unwrap_err(),
            StatsError::InsufficientGroups(0)
        );
    }

    #[test]
    fn exclusions_are_reported_and_applied() {
        let mut rs = rows(&Prototype::ALL);
        for r in rs
            .iter_mut()
            .filter(|r| r.participant_id == "P1-0" && r.task == 2)
        {
            r.total_time_sec = 80.0;
        }
        let report = build_report(&rs, &[], &ReportConfig::default()).unwrap();
        assert_eq!(
            report.excluded,
            vec![Exclusion {
                participant_id: "P1-0".into(),
                task: 2
            }]
        );
        let fam = report
            .families
            .iter()
            .find(|f| f.task == 2 && f.metric == Metric::Score)
            .unwrap();
        assert_eq!(fam.rows[0].n_a, 4);
        let fam = report
            .families
            .iter()
            .find(|f| f.task == 1 && f.metric == Metric::Score)
            .unwrap();
        assert_eq!(fam.rows[0].n_a, 5);
    }

    #[test]
    fn likert_rows() {
        let mut likert = Vec::new();
        for i in 0..40 {
            likert.push(LikertRecord {
                participant_id: format!("p{i}"),
                prototype: Prototype::P4,
                question_id: "Q1".into(),
                rating: if i < 23 { 4 } else { 2 },
            });
        }
        let report =
            build_report(&rows(&Prototype::ALL), &likert, &ReportConfig::default()).unwrap();
        assert_eq!(report.likert.len(), 1);
        assert_eq!(
            (report.likert[0].agree, report.likert[0].percent_agree),
            (23, 57.5)
        );
        assert!(report.to_text().contains("57.5"));
    }

    #[test]
    fn number_formatting() {
        assert_eq!(fmt_num(-0.0001, 3), "0.000");
        assert_eq!(fmt_num(-0.442, 3), "-0.442");
        assert_eq!(fmt_num(0.7066, 4), "0.7066");
    }
}
