//! Event-sourced player progress.
//!
//! Every state change is an [`Event`]. A [`Tracker`] validates a command
//! against its current state and hands back the event it would produce
//! without changing anything; the caller persists the event and then
//! [`Tracker::apply`]s it. Replaying a log through `apply` therefore
//! rebuilds exactly the state the live service had.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::io::BufRead;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::exercise::{DifficultyLevel, Exercise, ExerciseBank, ExerciseType, Response};
use crate::text::Language;

/// Default session budget: twenty minutes. Recorded, not enforced.
pub const DEFAULT_GAME_LENGTH_SECS: u64 = 20 * 60;

#[derive(Debug, thiserror::Error)]
pub enum ProgressError {
    #[error("unknown player {0}")]
    UnknownPlayer(String),
    #[error("player {0} already exists")]
    DuplicatePlayer(String),
    #[error("unknown session {0}")]
    UnknownSession(String),
    #[error("session {0} is no longer active")]
    SessionInactive(String),
    #[error("exercise {0} was not issued in this session")]
    UnknownExercise(String),
    #[error("exercise {0} was already answered")]
    DuplicateAnswer(String),
    #[error("no unused exercises left at level {0}")]
    BankExhausted(DifficultyLevel),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("event log line {line}: {message}")]
    CorruptLog { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl ProgressError {
    /// Stable machine-readable name.
    pub fn code(&self) -> &'static str {
        match self {
            ProgressError::UnknownPlayer(_) => "unknown_player",
            ProgressError::DuplicatePlayer(_) => "duplicate_player",
            ProgressError::UnknownSession(_) => "unknown_session",
            ProgressError::SessionInactive(_) => "session_inactive",
            ProgressError::UnknownExercise(_) => "unknown_exercise",
            ProgressError::DuplicateAnswer(_) => "duplicate_answer",
            ProgressError::BankExhausted(_) => "bank_exhausted",
            ProgressError::InvalidRequest(_) => "invalid_request",
            ProgressError::CorruptLog { .. } => "corrupt_log",
            ProgressError::Io(_) => "io",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgeGroup {
    Junior,
    Senior,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Player {
    pub id: String,
    pub display_name: String,
    pub language: Language,
    pub age_group: AgeGroup,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Session {
    pub id: String,
    pub player_id: String,
    pub started_at: DateTime<Utc>,
    pub game_length_secs: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnswerEvent {
    pub session_id: String,
    pub exercise_id: String,
    pub exercise_type: ExerciseType,
    pub response: Response,
    pub correct: bool,
    pub at: DateTime<Utc>,
    /// Time since the exercise was issued.
    pub latency_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    PlayerCreated {
        player: Player,
        at: DateTime<Utc>,
    },
    SessionStarted {
        session: Session,
    },
    ExerciseIssued {
        session_id: String,
        exercise_id: String,
        exercise_type: ExerciseType,
        level: DifficultyLevel,
        at: DateTime<Utc>,
    },
    AnswerRecorded {
        answer: AnswerEvent,
    },
}

/// Level movement over a sliding window of answers. After a level change
/// the window starts empty, so the next change needs a full window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProgressRules {
    pub window: usize,
    /// Promote when at least this share of a full window is correct.
    pub promote_at: f64,
    /// Demote when less than this share of a full window is correct.
    pub demote_below: f64,
}

impl Default for ProgressRules {
    fn default() -> Self {
        ProgressRules {
            window: 20,
            promote_at: 0.8,
            demote_below: 0.4,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeTotals {
    pub answered: u32,
    pub correct: u32,
}

pub const STREAK_BADGES: [(u32, &str); 2] = [(5, "streak-5"), (10, "streak-10")];
/// Badges for total correct answers.
pub const TOTAL_BADGES: [(u32, &str); 2] = [(50, "total-50"), (100, "total-100")];

/// Badge for first reaching `level`.
pub fn level_badge(level: DifficultyLevel) -> String {
    format!("level-up-{}", level.name())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgressState {
    pub player_id: String,
    pub current_level: DifficultyLevel,
    /// Most recent outcomes, oldest first.
    pub window: VecDeque<bool>,
    pub totals: BTreeMap<ExerciseType, TypeTotals>,
    /// Earned badge ids in the order they were earned.
    pub achievements: Vec<String>,
    pub streak: u32,
    pub answered: u32,
    pub correct: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgressDelta {
    pub level_before: DifficultyLevel,
    pub level_after: DifficultyLevel,
    pub window_correct: usize,
    pub window_len: usize,
    pub new_achievements: Vec<String>,
}

impl ProgressState {
    pub fn new(player_id: &str) -> Self {
        ProgressState {
            player_id: player_id.to_string(),
            current_level: DifficultyLevel::Initial,
            window: VecDeque::new(),
            totals: BTreeMap::new(),
            achievements: Vec::new(),
            streak: 0,
            answered: 0,
            correct: 0,
        }
    }

    fn earn(&mut self, badge: String, new: &mut Vec<String>) {
        if !self.achievements.contains(&badge) {
            self.achievements.push(badge.clone());
            new.push(badge);
        }
    }

    /// Fold one answer into the state.
    pub fn record(&mut self, exercise_type: ExerciseType, correct: bool, rules: &ProgressRules) -> ProgressDelta {
        let level_before = self.current_level;
        let mut new = Vec::new();

        let totals = self.totals.entry(exercise_type).or_default();
        totals.answered += 1;
        self.answered += 1;
        if correct {
            totals.correct += 1;
            self.correct += 1;
            self.streak += 1;
        } else {
            self.streak = 0;
        }

        self.window.push_back(correct);
        while self.window.len() > rules.window {
            self.window.pop_front();
        }
        if self.window.len() == rules.window {
            let share = self.window.iter().filter(|&&c| c).count() as f64 / rules.window as f64;
            let next = if share >= rules.promote_at {
                self.current_level.up()
            } else if share < rules.demote_below {
                self.current_level.down()
            } else {
                self.current_level
            };
            if next != self.current_level {
                self.current_level = next;
                self.window.clear();
                if next > level_before {
                    self.earn(level_badge(next), &mut new);
                }
            }
        }

        for (n, badge) in STREAK_BADGES {
            if self.streak == n {
                self.earn(badge.to_string(), &mut new);
            }
        }
        for (n, badge) in TOTAL_BADGES {
            if self.correct == n {
                self.earn(badge.to_string(), &mut new);
            }
        }

        ProgressDelta {
            level_before,
            level_after: self.current_level,
            window_correct: self.window.iter().filter(|&&c| c).count(),
            window_len: self.window.len(),
            new_achievements: new,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IssuedExercise {
    pub exercise_type: ExerciseType,
    pub level: DifficultyLevel,
    pub at: DateTime<Utc>,
    pub answered: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionState {
    pub session: Session,
    pub issued: BTreeMap<String, IssuedExercise>,
    /// Index into [`ExerciseType::ALL`] of the next type to offer.
    pub next_type: usize,
    pub last_at: DateTime<Utc>,
}

/// The full service state, rebuilt from the event log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tracker {
    pub rules: ProgressRules,
    pub players: BTreeMap<String, Player>,
    pub progress: BTreeMap<String, ProgressState>,
    pub sessions: BTreeMap<String, SessionState>,
    /// Player id → their active session.
    pub active: BTreeMap<String, String>,
    /// Player id → exercises ever issued to them.
    pub seen: BTreeMap<String, BTreeSet<String>>,
    /// Events applied so far.
    pub events: u64,
}

/// What applying an event changed, when it was an answer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Applied {
    Other,
    Answer(ProgressDelta),
}

fn check_id(kind: &str, id: &str) -> Result<(), ProgressError> {
    let ok = !id.is_empty()
        && id.len() <= 64
        && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_');
    if ok {
        Ok(())
    } else {
        Err(ProgressError::InvalidRequest(format!(
            "{kind} id must be 1-64 characters of [A-Za-z0-9_-]"
        )))
    }
}

impl Tracker {
    pub fn new(rules: ProgressRules) -> Self {
        Tracker {
            rules,
            players: BTreeMap::new(),
            progress: BTreeMap::new(),
            sessions: BTreeMap::new(),
            active: BTreeMap::new(),
            seen: BTreeMap::new(),
            events: 0,
        }
    }

    pub fn progress(&self, player_id: &str) -> Result<&ProgressState, ProgressError> {
        self.progress
            .get(player_id)
            .ok_or_else(|| ProgressError::UnknownPlayer(player_id.to_string()))
    }

    pub fn session(&self, session_id: &str) -> Result<&SessionState, ProgressError> {
        self.sessions
            .get(session_id)
            .ok_or_else(|| ProgressError::UnknownSession(session_id.to_string()))
    }

    /// Event for a new player. Without an explicit id the next free
    /// `p<number>` is used.
    pub fn create_player(
        &self,
        id: Option<String>,
        display_name: &str,
        language: Language,
        age_group: AgeGroup,
        now: DateTime<Utc>,
    ) -> Result<Event, ProgressError> {
        let id = match id {
            Some(id) => {
                check_id("player", &id)?;
                id
            }
            None => (self.players.len() + 1..)
                .map(|n| format!("p{n}"))
                .find(|id| !self.players.contains_key(id))
                .expect("unbounded range"),
        };
        if self.players.contains_key(&id) {
            return Err(ProgressError::DuplicatePlayer(id));
        }
        let display_name = display_name.trim();
        if display_name.is_empty() {
            return Err(ProgressError::InvalidRequest("display_name is empty".into()));
        }
        Ok(Event::PlayerCreated {
            player: Player {
                id,
                display_name: display_name.to_string(),
                language,
                age_group,
            },
            at: now,
        })
    }

    /// Event for a new session; it supersedes the player's active one.
    pub fn start_session(
        &self,
        player_id: &str,
        game_length_secs: Option<u64>,
        now: DateTime<Utc>,
    ) -> Result<Event, ProgressError> {
        if !self.players.contains_key(player_id) {
            return Err(ProgressError::UnknownPlayer(player_id.to_string()));
        }
        let game_length_secs = game_length_secs.unwrap_or(DEFAULT_GAME_LENGTH_SECS);
        if game_length_secs == 0 {
            return Err(ProgressError::InvalidRequest("game_length_secs must be positive".into()));
        }
        Ok(Event::SessionStarted {
            session: Session {
                id: format!("s{}", self.sessions.len() + 1),
                player_id: player_id.to_string(),
                started_at: now,
                game_length_secs,
            },
        })
    }

    /// Pick the next exercise for a session: the player's current level,
    /// the next type in round-robin order that still has an exercise not
    /// yet issued in this session, preferring ones the player has never
    /// seen.
    pub fn next_exercise<'b>(
        &self,
        session_id: &str,
        bank: &'b ExerciseBank,
        now: DateTime<Utc>,
    ) -> Result<(Event, &'b Exercise), ProgressError> {
        let state = self.session(session_id)?;
        let player = &state.session.player_id;
        if self.active.get(player).map(String::as_str) != Some(session_id) {
            return Err(ProgressError::SessionInactive(session_id.to_string()));
        }
        let level = self.progress(player)?.current_level;
        let empty = BTreeSet::new();
        let seen = self.seen.get(player).unwrap_or(&empty);
        let n = ExerciseType::ALL.len();
        for k in 0..n {
            let ty = ExerciseType::ALL[(state.next_type + k) % n];
            let mut fresh = bank.exercises.iter().filter(|e| {
                e.exercise_type == ty && e.level == level && !state.issued.contains_key(&e.id)
            });
            let Some(first) = fresh.next() else { continue };
            let pick = if seen.contains(&first.id) {
                std::iter::once(first)
                    .chain(fresh)
                    .find(|e| !seen.contains(&e.id))
                    .unwrap_or(first)
            } else {
                first
            };
            let event = Event::ExerciseIssued {
                session_id: session_id.to_string(),
                exercise_id: pick.id.clone(),
                exercise_type: ty,
                level,
                at: now.max(state.last_at),
            };
            return Ok((event, pick));
        }
        Err(ProgressError::BankExhausted(level))
    }

    /// Judge a response and build the answer event.
    pub fn submit_answer<'b>(
        &self,
        session_id: &str,
        exercise_id: &str,
        response: Response,
        bank: &'b ExerciseBank,
        now: DateTime<Utc>,
    ) -> Result<(Event, &'b Exercise), ProgressError> {
        let state = self.session(session_id)?;
        let issued = state
            .issued
            .get(exercise_id)
            .ok_or_else(|| ProgressError::UnknownExercise(exercise_id.to_string()))?;
        if issued.answered {
            return Err(ProgressError::DuplicateAnswer(exercise_id.to_string()));
        }
        let exercise = bank
            .get(exercise_id)
            .ok_or_else(|| ProgressError::UnknownExercise(exercise_id.to_string()))?;
        let at = now.max(state.last_at);
        let latency_ms = (at - issued.at).num_milliseconds().max(0) as u64;
        let event = Event::AnswerRecorded {
            answer: AnswerEvent {
                session_id: session_id.to_string(),
                exercise_id: exercise_id.to_string(),
                exercise_type: exercise.exercise_type,
                correct: exercise.judge(&response),
                response,
                at,
                latency_ms,
            },
        };
        Ok((event, exercise))
    }

    /// Fold an event into the state. Events that contradict the state
    /// (unknown ids, repeats, time running backwards) are rejected and
    /// leave it unchanged.
    pub fn apply(&mut self, event: &Event) -> Result<Applied, ProgressError> {
        let applied = match event {
            Event::PlayerCreated { player, .. } => {
                if self.players.contains_key(&player.id) {
                    return Err(ProgressError::DuplicatePlayer(player.id.clone()));
                }
                self.players.insert(player.id.clone(), player.clone());
                self.progress
                    .insert(player.id.clone(), ProgressState::new(&player.id));
                Applied::Other
            }
            Event::SessionStarted { session } => {
                if !self.players.contains_key(&session.player_id) {
                    return Err(ProgressError::UnknownPlayer(session.player_id.clone()));
                }
                if self.sessions.contains_key(&session.id) {
                    return Err(ProgressError::InvalidRequest(format!(
                        "session {} already exists",
                        session.id
                    )));
                }
                self.active
                    .insert(session.player_id.clone(), session.id.clone());
                self.sessions.insert(
                    session.id.clone(),
                    SessionState {
                        session: session.clone(),
                        issued: BTreeMap::new(),
                        next_type: 0,
                        last_at: session.started_at,
                    },
                );
                Applied::Other
            }
            Event::ExerciseIssued {
                session_id,
                exercise_id,
                exercise_type,
                level,
                at,
            } => {
                let state = self
                    .sessions
                    .get_mut(session_id)
                    .ok_or_else(|| ProgressError::UnknownSession(session_id.clone()))?;
                if *at < state.last_at {
                    return Err(ProgressError::InvalidRequest("timestamp went backwards".into()));
                }
                if state.issued.contains_key(exercise_id) {
                    return Err(ProgressError::InvalidRequest(format!(
                        "exercise {exercise_id} issued twice"
                    )));
                }
                state.issued.insert(
                    exercise_id.clone(),
                    IssuedExercise {
                        exercise_type: *exercise_type,
                        level: *level,
                        at: *at,
                        answered: false,
                    },
                );
                let idx = ExerciseType::ALL
                    .iter()
                    .position(|t| t == exercise_type)
                    .expect("every type is listed");
                state.next_type = (idx + 1) % ExerciseType::ALL.len();
                state.last_at = *at;
                self.seen
                    .entry(state.session.player_id.clone())
                    .or_default()
                    .insert(exercise_id.clone());
                Applied::Other
            }
            Event::AnswerRecorded { answer } => {
                let state = self
                    .sessions
                    .get_mut(&answer.session_id)
                    .ok_or_else(|| ProgressError::UnknownSession(answer.session_id.clone()))?;
                if answer.at < state.last_at {
                    return Err(ProgressError::InvalidRequest("timestamp went backwards".into()));
                }
                let issued = state
                    .issued
                    .get_mut(&answer.exercise_id)
                    .ok_or_else(|| ProgressError::UnknownExercise(answer.exercise_id.clone()))?;
                if issued.answered {
                    return Err(ProgressError::DuplicateAnswer(answer.exercise_id.clone()));
                }
                issued.answered = true;
                state.last_at = answer.at;
                let progress = self
                    .progress
                    .get_mut(&state.session.player_id)
                    .expect("sessions belong to known players");
                Applied::Answer(progress.record(answer.exercise_type, answer.correct, &self.rules))
            }
        };
        self.events += 1;
        Ok(applied)
    }

    /// Apply the lines of a JSON-lines event log, numbering them from
    /// `first_line`. Any line that does not parse or does not fit the
    /// state is a [`ProgressError::CorruptLog`].
    pub fn replay_lines<R: BufRead>(&mut self, log: R, first_line: usize) -> Result<(), ProgressError> {
        for (i, line) in log.lines().enumerate() {
            let line_no = first_line + i;
            let line = line?;
            let corrupt = |message: String| ProgressError::CorruptLog {
                line: line_no,
                message,
            };
            let event: Event = serde_json::from_str(&line).map_err(|e| corrupt(e.to_string()))?;
            self.apply(&event).map_err(|e| corrupt(e.to_string()))?;
        }
        Ok(())
    }
}

/// Rebuild the tracker from a complete event log.
pub fn replay<R: BufRead>(log: R, rules: ProgressRules) -> Result<Tracker, ProgressError> {
    let mut tracker = Tracker::new(rules);
    tracker.replay_lines(log, 1)?;
    Ok(tracker)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn feed(state: &mut ProgressState, outcomes: impl IntoIterator<Item = bool>) -> Vec<ProgressDelta> {
        let rules = ProgressRules::default();
        outcomes
            .into_iter()
            .map(|c| state.record(ExerciseType::AddLetter, c, &rules))
            .collect()
    }

    #[test]
    fn sixteen_of_twenty_at_easy_promotes() {
        let mut s = ProgressState::new("p");
        s.current_level = DifficultyLevel::Easy;
        let outcomes = (0..20).map(|i| i % 5 != 0); // 16 of 20
        let deltas = feed(&mut s, outcomes);
        assert!(deltas[..19].iter().all(|d| d.level_after == DifficultyLevel::Easy));
        assert_eq!(deltas[19].level_after, DifficultyLevel::Medium);
        assert!(s.window.is_empty());
        assert!(deltas[19].new_achievements.contains(&"level-up-medium".to_string()));
    }

    #[test]
    fn fifteen_of_twenty_stays() {
        let mut s = ProgressState::new("p");
        s.current_level = DifficultyLevel::Easy;
        feed(&mut s, (0..20).map(|i| i % 4 != 0));
        assert_eq!(s.current_level, DifficultyLevel::Easy);
        assert_eq!(s.window.len(), 20);
    }

    #[test]
    fn demotion_and_clamping() {
        let mut s = ProgressState::new("p");
        feed(&mut s, [false; 20]);
        assert_eq!(s.current_level, DifficultyLevel::Initial);
        s.current_level = DifficultyLevel::Medium;
        s.window.clear();
        // 8 of 20 = 40% is not below 40%
        feed(&mut s, (0..20).map(|i| i < 8));
        assert_eq!(s.current_level, DifficultyLevel::Medium);
        feed(&mut s, [false]); // window now holds 7 of 20
        assert_eq!(s.current_level, DifficultyLevel::Easy);
        s.current_level = DifficultyLevel::Expert;
        s.window.clear();
        feed(&mut s, [true; 20]);
        assert_eq!(s.current_level, DifficultyLevel::Expert);
    }

    #[test]
    fn badges_are_earned_once() {
        let mut s = ProgressState::new("p");
        let deltas = feed(&mut s, [true; 5].into_iter().chain([false]).chain([true; 5]));
        assert_eq!(deltas[4].new_achievements, ["streak-5"]);
        assert!(deltas[10].new_achievements.is_empty());
        feed(&mut s, [true; 100]);
        for b in ["streak-5", "streak-10", "total-50", "total-100"] {
            assert_eq!(s.achievements.iter().filter(|a| *a == b).count(), 1, "{b}");
        }
    }

    #[test]
    fn empty_log_is_empty_state() {
        let t = replay(&b""[..], ProgressRules::default()).unwrap();
        assert_eq!(t, Tracker::new(ProgressRules::default()));
        assert_eq!(ProgressState::new("x").current_level, DifficultyLevel::Initial);
    }

    #[test]
    fn truncated_line_is_corrupt() {
        let now = DateTime::<Utc>::from_timestamp(0, 0).unwrap();
        let t = Tracker::new(ProgressRules::default());
        let ev = t
            .create_player(None, "Ana", Language::Es, AgeGroup::Junior, now)
            .unwrap();
        let line = serde_json::to_string(&ev).unwrap();
        let log = format!("{line}\n{}\n", &line[..line.len() / 2]);
        match replay(log.as_bytes(), ProgressRules::default()) {
            Err(ProgressError::CorruptLog { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
    }
}
