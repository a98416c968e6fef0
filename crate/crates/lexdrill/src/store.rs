//! Durable store: an append-only JSON-lines event log plus a periodic
//! snapshot of the replayed state.

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use lexdrill_core::progress::{Applied, Event, ProgressError, ProgressRules, Tracker};

pub const LOG_FILE: &str = "events.jsonl";
pub const SNAPSHOT_FILE: &str = "snapshot.json";
pub const RULES_FILE: &str = "rules.json";

/// Events between snapshots.
pub const SNAPSHOT_EVERY: u64 = 200;

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Invalid { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Replay {
        path: PathBuf,
        source: ProgressError,
    },
    #[error("store was created with different progression rules ({stored:?})")]
    RulesMismatch { stored: ProgressRules },
}

pub struct Store {
    dir: PathBuf,
    log: File,
    tracker: Tracker,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    }
}

impl Store {
    /// Open or create the store in `dir`. `rules` must match the ones the
    /// store was created with; `None` takes the stored rules (or the
    /// defaults for a new store).
    pub fn open(dir: &Path, rules: Option<ProgressRules>) -> Result<Self, StoreError> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let rules_path = dir.join(RULES_FILE);
        let rules = if rules_path.exists() {
            let text = fs::read_to_string(&rules_path).map_err(io_err(&rules_path))?;
            let stored: ProgressRules =
                serde_json::from_str(&text).map_err(|e| StoreError::Invalid {
                    path: rules_path.clone(),
                    message: e.to_string(),
                })?;
            if rules.is_some_and(|r| r != stored) {
                return Err(StoreError::RulesMismatch { stored });
            }
            stored
        } else {
            let rules = rules.unwrap_or_default();
            let json = serde_json::to_string_pretty(&rules).expect("rules serialize");
            fs::write(&rules_path, json).map_err(io_err(&rules_path))?;
            rules
        };

        let snap_path = dir.join(SNAPSHOT_FILE);
        let mut tracker = if snap_path.exists() {
            let text = fs::read_to_string(&snap_path).map_err(io_err(&snap_path))?;
            let t: Tracker = serde_json::from_str(&text).map_err(|e| StoreError::Invalid {
                path: snap_path.clone(),
                message: e.to_string(),
            })?;
            if t.rules != rules {
                return Err(StoreError::Invalid {
                    path: snap_path,
                    message: "snapshot rules differ from the store rules".into(),
                });
            }
            t
        } else {
            Tracker::new(rules)
        };

        let log_path = dir.join(LOG_FILE);
        if log_path.exists() {
            let file = File::open(&log_path).map_err(io_err(&log_path))?;
            let mut lines = BufReader::new(file);
            let skip = tracker.events;
            let mut buf = String::new();
            for n in 0..skip {
                buf.clear();
                let read = lines.read_line(&mut buf).map_err(io_err(&log_path))?;
                if read == 0 {
                    return Err(StoreError::Invalid {
                        path: log_path,
                        message: format!("snapshot covers {skip} events but the log ends after {n}"),
                    });
                }
            }
            tracker
                .replay_lines(lines, skip as usize + 1)
                .map_err(|source| StoreError::Replay {
                    path: log_path.clone(),
                    source,
                })?;
        }
        let log = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&log_path)
            .map_err(io_err(&log_path))?;
        Ok(Store {
            dir: dir.to_path_buf(),
            log,
            tracker,
        })
    }

    pub fn tracker(&self) -> &Tracker {
        &self.tracker
    }

    pub fn log_path(&self) -> PathBuf {
        self.dir.join(LOG_FILE)
    }

    /// Persist `event` (flushed to disk) and then fold it into the state.
    /// The event is checked against the state first, so the log never
    /// holds an event that replay would reject.
    pub fn commit(&mut self, event: &Event) -> Result<Applied, ProgressError> {
        let mut next = self.tracker.clone();
        let applied = next.apply(event)?;
        let mut line = serde_json::to_string(event).expect("events serialize");
        line.push('\n');
        self.log.write_all(line.as_bytes())?;
        self.log.sync_data()?;
        self.tracker = next;
        if self.tracker.events.is_multiple_of(SNAPSHOT_EVERY) {
            if let Err(e) = self.snapshot() {
                tracing::warn!("snapshot failed: {e}");
            }
        }
        Ok(applied)
    }

    /// Write the current state atomically next to the log.
    pub fn snapshot(&self) -> std::io::Result<()> {
        let tmp = self.dir.join(format!("{SNAPSHOT_FILE}.tmp"));
        let json = serde_json::to_vec(&self.tracker).expect("tracker serializes");
        let mut f = File::create(&tmp)?;
        f.write_all(&json)?;
        f.sync_all()?;
        fs::rename(&tmp, self.dir.join(SNAPSHOT_FILE))
    }
}
