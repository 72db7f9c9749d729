//! Deterministic synthetic captures for tests and demos.
//!
//! Each profile is a cycle of phases modelled on a teaching workflow. The
//! generator walks the phases in order, repeating the cycle, until it has
//! produced the requested number of events. Screenshots are referenced as
//! `shot-NNN.svg`; [`synth_assets`] produces matching placeholder images.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

use crate::event::{EventKind, EventLog, ParseError, RawEvent};

const BASE_TS: u64 = 1_700_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    MarkingCorrection,
    PollCreation,
}

impl Profile {
    pub const ALL: [Profile; 2] = [Profile::MarkingCorrection, Profile::PollCreation];

    pub fn name(self) -> &'static str {
        match self {
            Profile::MarkingCorrection => "marking_correction",
            Profile::PollCreation => "poll_creation",
        }
    }

    pub fn task_title(self) -> &'static str {
        match self {
            Profile::MarkingCorrection => "Correct exam marks consistently",
            Profile::PollCreation => "Create an online poll activity",
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Profile {
    type Err = SynthError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Profile::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| SynthError::UnknownProfile(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error("unknown profile {0:?} (expected marking_correction or poll_creation)")]
    UnknownProfile(String),
    #[error(transparent)]
    Log(#[from] ParseError),
}

struct Gen {
    rng: ChaCha8Rng,
    ts: u64,
    actor: String,
    events: Vec<RawEvent>,
    limit: usize,
    shots: usize,
    phase_start: bool,
}

impl Gen {
    fn range(&mut self, lo: u64, hi: u64) -> u64 {
        lo + self.rng.next_u64() % (hi - lo + 1)
    }

    fn chance(&mut self, percent: u64) -> bool {
        self.rng.next_u64() % 100 < percent
    }

    fn full(&self) -> bool {
        self.events.len() >= self.limit
    }

    /// Starts a phase: a longer pause, and the next event gets a screenshot.
    fn phase(&mut self) {
        self.ts += self.range(4_000, 25_000);
        self.phase_start = true;
    }

    fn emit(&mut self, kind: EventKind, url: &str, fill: impl FnOnce(&mut RawEvent)) {
        if self.full() {
            return;
        }
        self.ts += match kind {
            EventKind::Keyup => self.range(120, 450),
            _ => self.range(400, 3_000),
        };
        let mut e = RawEvent::new(kind, self.ts, url, self.actor.clone());
        match kind {
            EventKind::Click => {
                e.coords = Some((self.range(20, 1200) as u32, self.range(60, 800) as u32))
            }
            EventKind::Scroll => e.scroll_dy = Some(self.range(80, 900) as i64),
            _ => {}
        }
        fill(&mut e);
        if self.phase_start {
            self.phase_start = false;
            self.shots += 1;
            e.screenshot_ref = Some(format!("shot-{:03}.svg", self.shots));
        }
        self.events.push(e);
    }

    fn navigate(&mut self, url: &str) {
        self.emit(EventKind::Navigate, url, |_| {});
    }

    fn scrolls(&mut self, url: &str, max: u64) {
        for _ in 0..self.range(0, max) {
            self.emit(EventKind::Scroll, url, |_| {});
        }
    }

    fn click(&mut self, url: &str, el_kind: &str, text: &str) {
        self.emit(EventKind::Click, url, |e| {
            e.element_kind = Some(el_kind.into());
            e.element_text = Some(text.into());
        });
    }

    fn type_text(&mut self, url: &str, el_name: &str, el_kind: &str, text: &str) {
        self.emit(EventKind::Focus, url, |e| {
            e.element_name = Some(el_name.into());
            e.element_kind = Some(el_kind.into());
        });
        let words: Vec<&str> = text.split(' ').collect();
        let take = self.range(1, words.len() as u64) as usize;
        let typed = words[..take].join(" ");
        for ch in typed.chars() {
            self.emit(EventKind::Keyup, url, |e| {
                e.key_value = Some(ch.to_string());
                e.element_name = Some(el_name.into());
                e.element_kind = Some(el_kind.into());
            });
        }
        self.emit(EventKind::Change, url, |e| {
            e.element_name = Some(el_name.into());
            e.element_kind = Some(el_kind.into());
            e.new_value = Some(typed.clone());
        });
    }

    fn select(&mut self, url: &str, text: &str) {
        self.emit(EventKind::Select, url, |e| {
            e.selected_text = Some(text.into())
        });
    }
}

fn marking_cycle(g: &mut Gen) {
    let course = "https://lms.example.edu/course/FIT1001";
    let students = "https://lms.example.edu/course/FIT1001/students";
    let search = "https://policy.example.edu/search";
    let reader = "https://policy.example.edu/reader/assessment-policy";
    let procedure = "https://lms.example.edu/course/FIT1001/feedback-procedure";
    let grades = "https://lms.example.edu/course/FIT1001/grades/edit";
    let upload = "https://lms.example.edu/course/FIT1001/upload";

    g.phase();
    g.navigate(course);
    g.scrolls(course, 2);
    g.click(course, "a", "Student list");
    g.navigate(students);
    g.scrolls(students, 3);

    g.phase();
    g.navigate(search);
    g.emit(EventKind::Click, search, |e| {
        e.element_kind = Some("input".into());
        e.element_name = Some("search".into());
    });
    for ch in "special consideration"
        .chars()
        .take(g.range(4, 21) as usize)
    {
        g.emit(EventKind::Keyup, search, |e| {
            e.key_value = Some(ch.to_string())
        });
    }

    g.phase();
    g.navigate(reader);
    g.scrolls(reader, 2);
    g.select(reader, "Marks must be moderated by a second examiner");
    if g.chance(70) {
        g.type_text(
            reader,
            "comment",
            "textarea",
            "check moderation rule before release",
        );
    }

    g.phase();
    g.navigate(procedure);
    g.scrolls(procedure, 2);
    g.click(procedure, "button", "Watch the feedback tutorial video");

    g.phase();
    g.navigate(grades);
    g.type_text(grades, "mark", "input", "17 out of 20");
    if g.chance(50) {
        g.click(grades, "button", "Use recommended rubric");
    }

    g.phase();
    g.navigate(upload);
    g.emit(EventKind::Change, upload, |e| {
        e.element_name = Some("feedback".into());
        e.element_kind = Some("file".into());
        e.new_value = Some("feedback.pdf".into());
    });
    g.emit(EventKind::Submit, upload, |_| {});

    g.phase();
    g.emit(EventKind::SwitchTab, course, |_| {});
    g.emit(EventKind::Close, upload, |e| {
        e.element_name = Some("tab".into());
        e.element_kind = Some("window".into());
    });
}

fn poll_cycle(g: &mut Gen) {
    let home = "https://pollev.example.com/home";
    let new = "https://pollev.example.com/activities/new";
    let media = "https://pollev.example.com/activities/new/media";
    let upload = "https://pollev.example.com/activities/upload";
    let preview = "https://pollev.example.com/activities/preview";
    let search = "https://pollev.example.com/search";
    let help = "https://help.example.com/video/polls";

    g.phase();
    g.navigate(home);
    g.emit(EventKind::SwitchTab, home, |_| {});
    g.click(home, "button", "Create activity");

    g.phase();
    g.navigate(new);
    g.type_text(new, "title", "input", "Week 3 feedback poll");
    g.type_text(new, "option", "input", "The pace of lectures is right");

    g.phase();
    g.click(new, "button", "Use recommended question type");

    g.phase();
    g.click(new, "button", "Help: polling video");
    g.navigate(help);
    g.scrolls(help, 2);

    g.phase();
    g.navigate(search);
    g.emit(EventKind::Click, search, |e| {
        e.element_kind = Some("input".into());
        e.element_name = Some("search-box".into());
    });
    for ch in "likert scale".chars().take(g.range(3, 12) as usize) {
        g.emit(EventKind::Keyup, search, |e| {
            e.key_value = Some(ch.to_string())
        });
    }

    g.phase();
    g.navigate(media);
    g.emit(EventKind::Change, media, |e| {
        e.element_name = Some("image".into());
        e.element_kind = Some("file".into());
        e.new_value = Some("poll-banner.png".into());
    });
    g.emit(EventKind::Submit, upload, |_| {});

    g.phase();
    g.navigate(preview);
    g.select(preview, "Results are visible to students");
    g.emit(EventKind::Close, preview, |e| {
        e.element_name = Some("tab".into());
        e.element_kind = Some("window".into());
    });
}

/// Generates `n_events` events for `profile`. The same arguments always
/// produce the same log.
pub fn synth_log(seed: u64, n_events: usize, profile: Profile) -> Result<EventLog, SynthError> {
    if n_events == 0 {
        return Err(ParseError::EmptyLog.into());
    }
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed),
        ts: BASE_TS,
        actor: format!("expert-{seed:04}"),
        events: Vec::with_capacity(n_events),
        limit: n_events,
        shots: 0,
        phase_start: false,
    };
    while !g.full() {
        match profile {
            Profile::MarkingCorrection => marking_cycle(&mut g),
            Profile::PollCreation => poll_cycle(&mut g),
        }
    }
    let notes = format!("synthetic capture: profile={profile} seed={seed} events={n_events}");
    Ok(EventLog::new(
        g.actor,
        profile.task_title(),
        Some(notes),
        g.events,
    )?)
}

/// Placeholder screenshot images for every `shot` referenced by `log`, as
/// `(relative path, bytes)` in first-reference order.
pub fn synth_assets(log: &EventLog) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = Vec::new();
    for e in log.events() {
        let Some(shot) = &e.screenshot_ref else {
            continue;
        };
        if out.iter().any(|(p, _)| p == shot) {
            continue;
        }
        let page = crate::url::page(&e.url);
        let svg = format!(
            concat!(
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"270\" viewBox=\"0 0 480 270\">",
                "<rect width=\"480\" height=\"270\" fill=\"#f4f5f7\" stroke=\"#9aa0a6\"/>",
                "<rect width=\"480\" height=\"28\" fill=\"#dadce0\"/>",
                "<text x=\"12\" y=\"19\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#202124\">{}</text>",
                "<text x=\"240\" y=\"150\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\" fill=\"#5f6368\">{} ({})</text>",
                "</svg>\n"
            ),
            crate::render::escape(page),
            crate::render::escape(shot),
            e.kind,
        );
        out.push((shot.clone(), svg.into_bytes()));
    }
    out
}
