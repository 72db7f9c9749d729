//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. Golden files live in tests/golden; set
//! VPR_UPDATE_GOLDEN=1 to rewrite them.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, StudentsT};
use vpr::io::{read_log, write_file, DirAssets};
use vpr::VIEWER_STUB;
use vpr_core::event::ParseOptions;
use vpr_core::mining::{compute_variants, mine_patterns, sectionize, StepSequence};
use vpr_core::model::{build_document, DocumentParts};
use vpr_core::render::{render, Format, RenderConfig};
use vpr_core::stats::{
    bonferroni, likert_summary, pairwise_compare, score_responses, AnswerKey, KeyEntry, Part,
    Prototype, ResponseRecord,
};
use vpr_core::step::{AssetKind, ContextAsset, Span, Step};
use vpr_core::synth::synth_assets;
use vpr_core::{
    build_from_logs, map_steps, serialize_log, synth_log, taxonomy, MappingRules, MineOptions,
    Profile, StepKind, VprDocument,
};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

fn bonferroni_known_answers() -> Outcome {
    let cases = [(0.054, 0.324), (0.076, 0.456), (0.162, 0.972)];
    let start = Instant::now();
    let got: Vec<f64> = cases.iter().map(|&(p, _)| bonferroni(p, 6)).collect();
    let elapsed = start.elapsed();
    for (&(p, want), &g) in cases.iter().zip(&got) {
        ensure(round3(g) == want, || {
            format!("bonferroni({p}, 6) = {g}, want {want}")
        })?;
    }
    ensure(elapsed < Duration::from_millis(1), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!("3 values exact to 3 dp in {elapsed:?}"))
}

/// Student's pooled two-sample t written out from the textbook formula.
fn textbook_t(a: &[f64], b: &[f64]) -> f64 {
    let mean = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
    let ss = |x: &[f64]| {
        let m = mean(x);
        x.iter().map(|v| (v - m).powi(2)).sum::<f64>()
    };
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let sp2 = (ss(a) + ss(b)) / (na + nb - 2.0);
    (mean(b) - mean(a)) / (sp2 * (1.0 / na + 1.0 / nb)).sqrt()
}

fn ols_matches_t_test() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst_t: f64 = 0.0;
    let mut worst_p: f64 = 0.0;
    for i in 0..1000 {
        let na = rng.gen_range(3..=50);
        let nb = rng.gen_range(3..=50);
        let shift = rng.gen_range(-3.0..3.0);
        let a: Vec<f64> = (0..na).map(|_| rng.gen_range(0.0..10.0)).collect();
        let b: Vec<f64> = (0..nb).map(|_| rng.gen_range(0.0..10.0) + shift).collect();
        let c = pairwise_compare(&a, &b).map_err(|e| format!("dataset {i}: {e}"))?;
        let t = textbook_t(&a, &b);
        let df = (na + nb - 2) as f64;
        let p = 2.0 * StudentsT::new(0.0, 1.0, df).unwrap().cdf(-t.abs());
        ensure(c.df == na + nb - 2, || format!("dataset {i}: df {}", c.df))?;
        worst_t = worst_t.max((c.t - t).abs());
        worst_p = worst_p.max((c.p - p).abs());
    }
    ensure(worst_t <= 1e-9, || {
        format!("max |t_ols - t_pooled| = {worst_t:e}")
    })?;
    ensure(worst_p <= 1e-9, || format!("max |p - p_ref| = {worst_p:e}"))?;
    Ok(format!(
        "1000 datasets, max |dt| = {worst_t:.1e}, max |dp| = {worst_p:.1e}"
    ))
}

fn effect_size_oracle() -> Outcome {
    let c = pairwise_compare(&[1.0, 2.0, 3.0], &[3.0, 4.0, 5.0]).map_err(|e| e.to_string())?;
    ensure(c.cohens_d == -2.0, || format!("d = {}", c.cohens_d))?;
    let same = pairwise_compare(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).map_err(|e| e.to_string())?;
    ensure(same.cohens_d == 0.0 && same.t == 0.0, || {
        format!("identical groups: d = {}, t = {}", same.cohens_d, same.t)
    })?;
    Ok(String::from("d = -2.0; identical groups d = 0, t = 0"))
}

fn is_subseq(needle: &[StepKind], hay: &[StepKind]) -> bool {
    let mut j = 0;
    for h in hay {
        if j < needle.len() && needle[j] == *h {
            j += 1;
        }
    }
    j == needle.len()
}

/// Every distinct subsequence of every trace with its trace support.
fn brute_force(db: &[Vec<StepKind>], min_support: usize) -> BTreeMap<Vec<StepKind>, usize> {
    let mut candidates = BTreeSet::new();
    for trace in db {
        for mask in 1u32..(1 << trace.len()) {
            candidates.insert(
                trace
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, k)| *k)
                    .collect::<Vec<_>>(),
            );
        }
    }
    candidates
        .into_iter()
        .map(|c| {
            let s = db.iter().filter(|t| is_subseq(&c, t)).count();
            (c, s)
        })
        .filter(|(_, s)| *s >= min_support)
        .collect()
}

struct SpmStats {
    anti_monotone_violations: usize,
    patterns_checked: usize,
}

fn spm_oracle(stats: &mut SpmStats) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let start = Instant::now();
    for case in 0..500 {
        let alphabet = &StepKind::ALL[..rng.gen_range(1..=5)];
        let min_support = rng.gen_range(1..=3);
        let n_traces = rng.gen_range(min_support..=8);
        let db: Vec<Vec<StepKind>> = (0..n_traces)
            .map(|_| {
                (0..rng.gen_range(1..=6))
                    .map(|_| alphabet[rng.gen_range(0..alphabet.len())])
                    .collect()
            })
            .collect();
        let seqs: Vec<StepSequence> = db
            .iter()
            .enumerate()
            .map(|(i, k)| StepSequence::new(format!("t{i}"), k.clone()))
            .collect();
        let mined =
            mine_patterns(&seqs, min_support, 6).map_err(|e| format!("case {case}: {e}"))?;
        let got: BTreeMap<Vec<StepKind>, usize> =
            mined.iter().map(|p| (p.kinds.clone(), p.support)).collect();
        ensure(got.len() == mined.len(), || {
            format!("case {case}: duplicate patterns")
        })?;
        let want = brute_force(&db, min_support);
        ensure(got == want, || {
            format!(
                "case {case}: mined {} patterns, oracle {}",
                got.len(),
                want.len()
            )
        })?;
        for p in &mined {
            stats.patterns_checked += 1;
            for k in 1..p.kinds.len() {
                let prefix_support = db.iter().filter(|t| is_subseq(&p.kinds[..k], t)).count();
                if prefix_support < p.support {
                    stats.anti_monotone_violations += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(10), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "500 databases set-equal to brute force in {elapsed:.2?}"
    ))
}

fn anti_monotonicity(stats: &SpmStats) -> Outcome {
    ensure(stats.patterns_checked > 0, || {
        String::from("no patterns checked")
    })?;
    ensure(stats.anti_monotone_violations == 0, || {
        format!("{} prefix violations", stats.anti_monotone_violations)
    })?;
    Ok(format!(
        "{} mined patterns, no prefix has lower support",
        stats.patterns_checked
    ))
}

fn partition_fuzzing() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    let rules = MappingRules::default();
    let mut db = Vec::new();
    for seed in 0..500u64 {
        let profile = if seed % 2 == 0 {
            Profile::MarkingCorrection
        } else {
            Profile::PollCreation
        };
        let n = rng.gen_range(1..=200);
        let log = synth_log(seed, n, profile).map_err(|e| e.to_string())?;
        let steps = map_steps(&log, &rules).map_err(|e| e.to_string())?;
        let mut next = 0;
        for s in &steps {
            ensure(
                s.event_span.start == next && s.event_span.end > next,
                || format!("seed {seed}: span {:?} after {next}", s.event_span),
            )?;
            next = s.event_span.end;
        }
        ensure(next == log.len(), || {
            format!("seed {seed}: spans cover {next} of {} events", log.len())
        })?;
        let sections = sectionize(&steps).map_err(|e| e.to_string())?;
        let mut covered = 0;
        for (i, sec) in sections.iter().enumerate() {
            ensure(sec.steps.start == covered, || {
                format!("seed {seed}: section {i} does not follow on")
            })?;
            covered = sec.steps.end;
            ensure(
                steps[sec.steps.start..sec.steps.end]
                    .iter()
                    .all(|s| s.subprocess == sec.subprocess),
                || format!("seed {seed}: section {i} is mixed"),
            )?;
            ensure(
                i == 0 || sections[i - 1].subprocess != sec.subprocess,
                || format!("seed {seed}: sections {} and {i} could merge", i - 1),
            )?;
        }
        ensure(covered == steps.len(), || {
            format!(
                "seed {seed}: sections cover {covered} of {} steps",
                steps.len()
            )
        })?;
        db.push(StepSequence::from_steps(format!("s{seed}"), &steps));
    }
    let variants = compute_variants(&db).map_err(|e| e.to_string())?;
    let total: usize = variants.iter().map(|v| v.count).sum();
    ensure(total == db.len(), || {
        format!("variant counts sum to {total}, database has {}", db.len())
    })?;
    Ok(format!(
        "500 logs partitioned; {} variants cover {total} traces",
        variants.len()
    ))
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Compares against (or with VPR_UPDATE_GOLDEN=1, rewrites) a golden file.
fn check_golden(name: &str, actual: &str) -> Result<(), String> {
    let path = golden_dir().join(name);
    if std::env::var_os("VPR_UPDATE_GOLDEN").is_some_and(|v| v == "1") {
        write_file(&path, actual.as_bytes()).map_err(|e| e.to_string())?;
        return Ok(());
    }
    let expected = std::fs::read_to_string(&path).map_err(|e| {
        format!(
            "{}: {e} (run with VPR_UPDATE_GOLDEN=1 to create)",
            path.display()
        )
    })?;
    ensure(expected == actual, || {
        format!("{name} differs from golden file")
    })
}

fn step(
    index: usize,
    kind: StepKind,
    url: &str,
    summary: &str,
    context: Vec<ContextAsset>,
) -> Step {
    Step {
        index,
        kind,
        subprocess: taxonomy(kind),
        event_span: Span::new(index * 2, index * 2 + 2),
        primary_url: url.into(),
        summary: summary.into(),
        start_ts: 1_000 + index as u64 * 5_000,
        end_ts: 3_000 + index as u64 * 5_000,
        context,
    }
}

fn asset(kind: AssetKind, payload: &str) -> ContextAsset {
    ContextAsset {
        kind,
        payload: payload.into(),
        anchor: None,
    }
}

fn ten_step_fixture() -> (VprDocument, BTreeMap<String, Vec<u8>>) {
    use AssetKind::*;
    use StepKind::*;
    let lms = "https://lms.example.edu/course/EDU200";
    let steps = vec![
        step(
            0,
            Navigate,
            lms,
            "Go to lms.example.edu/course/EDU200",
            vec![asset(Screenshot, "s1.png"), asset(Link, lms)],
        ),
        step(
            1,
            Navigate,
            "https://lms.example.edu/course/EDU200/quiz",
            "Go to lms.example.edu/course/EDU200/quiz",
            vec![asset(Link, "https://lms.example.edu/course/EDU200/quiz")],
        ),
        step(
            2,
            Search,
            "https://lms.example.edu/search?q=rubric",
            "Find \"rubric\" on lms.example.edu/search",
            vec![asset(Link, "https://lms.example.edu/search?q=rubric")],
        ),
        step(
            3,
            Highlight,
            "https://policy.example.edu/reader",
            "Highlight text on policy.example.edu/reader",
            vec![
                asset(Screenshot, "s2.png"),
                asset(HighlightedText, "policy \u{a7}3 <late work>"),
            ],
        ),
        step(
            4,
            Annotate,
            "https://policy.example.edu/reader",
            "Annotate a document on policy.example.edu/reader",
            vec![asset(Annotation, "ask the coordinator & check")],
        ),
        step(
            5,
            Navigate,
            lms,
            "Go to lms.example.edu/course/EDU200",
            vec![],
        ),
        step(
            6,
            Fill,
            "https://lms.example.edu/course/EDU200/edit",
            "Fill in \"title\" on lms.example.edu/course/EDU200/edit",
            vec![],
        ),
        step(
            7,
            Upload,
            "https://lms.example.edu/course/EDU200/upload",
            "Upload rubric.pdf on lms.example.edu/course/EDU200/upload",
            vec![asset(Screenshot, "s3.png")],
        ),
        step(
            8,
            ApplyResource,
            "https://lms.example.edu/help",
            "Use resource \"Help video\" on lms.example.edu/help",
            vec![asset(Link, "https://lms.example.edu/help")],
        ),
        step(
            9,
            Unknown,
            lms,
            "Other action (close) on lms.example.edu/course/EDU200",
            vec![],
        ),
    ];
    let sections = sectionize(&steps).expect("fixture sections");
    let doc = build_document(DocumentParts {
        title: String::from("Publish a marking rubric"),
        actor_id: String::from("expert-fixture"),
        steps,
        sections,
        patterns: Vec::new(),
        variants: Vec::new(),
    })
    .expect("fixture document");
    let assets = ["s1.png", "s2.png", "s3.png"]
        .iter()
        .enumerate()
        .map(|(i, n)| (n.to_string(), vec![0x89, b'P', b'N', b'G', i as u8]))
        .collect();
    (doc, assets)
}

/// Drops every `<div class="vpr-context" ...>...</div>` block.
fn strip_context(html: &str) -> String {
    let mut out = String::with_capacity(html.len());
    let mut rest = html;
    while let Some(i) = rest.find("<div class=\"vpr-context\"") {
        out.push_str(&rest[..i]);
        let end = rest[i..]
            .find("</div>")
            .expect("unterminated context block");
        rest = &rest[i + end + "</div>".len()..];
    }
    out.push_str(rest);
    out
}

fn renderer_structure() -> Outcome {
    let (doc, assets) = ten_step_fixture();
    let mut out = BTreeMap::new();
    for format in Format::ALL {
        let cfg = RenderConfig::new(format);
        let html = render(&doc, &cfg, &assets, VIEWER_STUB).map_err(|e| e.to_string())?;
        let again = render(&doc, &cfg, &assets, VIEWER_STUB).map_err(|e| e.to_string())?;
        ensure(html == again, || format!("{format}: two renders differ"))?;
        let items = html.matches("<li class=\"vpr-step").count();
        let panels = html.matches("<figure class=\"vpr-panel").count();
        let want = if format.is_pictorial() {
            (0, 10)
        } else {
            (10, 0)
        };
        ensure((items, panels) == want, || {
            format!("{format}: {items} list items, {panels} panels")
        })?;
        check_golden(&format!("fixture10.{format}.html"), &html)?;
        out.insert(format, html);
    }
    for (plain, rich) in [(Format::P1, Format::P3), (Format::P2, Format::P4)] {
        let blocks = out[&rich].matches("<div class=\"vpr-context\"").count();
        ensure(blocks == 7, || {
            format!("{rich}: {blocks} context blocks, want 7")
        })?;
        let stripped = strip_context(&out[&rich]).replace(
            &format!("data-vpr-format=\"{rich}\""),
            &format!("data-vpr-format=\"{plain}\""),
        );
        ensure(stripped == out[&plain], || {
            format!("{rich} minus context blocks differs from {plain}")
        })?;
    }
    Ok(String::from(
        "10 items / 10 panels; P3-P1 and P4-P2 differ only in context blocks; golden match",
    ))
}

fn end_to_end() -> Outcome {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let log_path = dir.path().join("seed7.jsonl");
    let log = synth_log(7, 60, Profile::MarkingCorrection).map_err(|e| e.to_string())?;
    write_file(&log_path, serialize_log(&log).as_bytes()).map_err(|e| e.to_string())?;
    for (name, bytes) in synth_assets(&log) {
        write_file(&dir.path().join("assets").join(name), &bytes).map_err(|e| e.to_string())?;
    }
    let log = read_log(&log_path, ParseOptions::default()).map_err(|e| e.to_string())?;
    let doc = build_from_logs(
        &[(String::from("seed7.jsonl"), log)],
        &MappingRules::default(),
        &MineOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    let assets = DirAssets::new(dir.path().join("assets"));
    for format in Format::ALL {
        let cfg = RenderConfig::new(format);
        let html = render(&doc, &cfg, &assets, VIEWER_STUB).map_err(|e| e.to_string())?;
        check_golden(&format!("seed7.{format}.html"), &html)?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(5), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "{} steps, 4 artifacts byte-stable in {elapsed:.2?}",
        doc.steps.len()
    ))
}

fn scoring_and_likert() -> Outcome {
    let mut entries = Vec::new();
    for (task, n) in [(1u8, 18usize), (2, 16)] {
        for i in 0..n {
            entries.push(KeyEntry {
                question_id: format!("t{task}-q{i:02}"),
                correct_answer: ["a", "b", "c", "d"][(i * 7 + task as usize) % 4].into(),
                task,
                part: if i < n / 2 { Part::A } else { Part::B },
            });
        }
    }
    let key = AnswerKey::new(entries.clone()).map_err(|e| e.to_string())?;
    let mut records = Vec::new();
    for (pi, prototype) in Prototype::ALL.into_iter().enumerate() {
        for e in &entries {
            records.push(ResponseRecord {
                participant_id: format!("perfect-{pi}"),
                prototype,
                task: e.task,
                part: e.part,
                question_id: e.question_id.clone(),
                answer: e.correct_answer.clone(),
                time_sec: 45.0,
            });
        }
    }
    let rows = score_responses(&records, &key).map_err(|e| e.to_string())?;
    for pi in 0..4 {
        for (task, want) in [(1u8, 18u32), (2, 16)] {
            let got: u32 = rows
                .iter()
                .filter(|r| r.participant_id == format!("perfect-{pi}") && r.task == task)
                .map(|r| r.score)
                .sum();
            ensure(got == want, || {
                format!("participant {pi} task {task}: {got}, want {want}")
            })?;
        }
    }
    let mut ratings = vec![4u8; 23];
    ratings.extend([2u8; 17]);
    let pct = likert_summary(&ratings).map_err(|e| e.to_string())?;
    ensure(pct == 57.5, || format!("likert 23/40 = {pct}"))?;
    Ok(String::from(
        "task scores 18 and 16; 23 of 40 agree = 57.5%",
    ))
}

fn main() {
    let mut spm = SpmStats {
        anti_monotone_violations: 0,
        patterns_checked: 0,
    };
    let spm_result = spm_oracle(&mut spm);
    let results: Vec<(&str, Outcome)> = vec![
        ("bonferroni known answers", bonferroni_known_answers()),
        ("ols equals pooled t-test", ols_matches_t_test()),
        ("effect size oracle", effect_size_oracle()),
        ("spm oracle equivalence", spm_result),
        ("spm anti-monotonicity", anti_monotonicity(&spm)),
        ("partition fuzzing", partition_fuzzing()),
        ("renderer structural counts", renderer_structure()),
        ("end-to-end determinism", end_to_end()),
        ("scoring ceiling and likert", scoring_and_likert()),
    ];
    let mut failed = 0;
    for (name, r) in &results {
        match r {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
