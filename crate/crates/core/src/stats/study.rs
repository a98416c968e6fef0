use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{choose_and_run, GatedResult, Method, StatsError};

/// Crossover arm. Group A plays the experimental condition between tests
/// 1 and 2 and the control condition between tests 2 and 3; group B the
/// other way round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Group {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Experimental,
    Control,
}

impl Condition {
    pub fn name(self) -> &'static str {
        match self {
            Condition::Experimental => "experimental",
            Condition::Control => "control",
        }
    }
}

impl Group {
    /// (pre test, post test) bracketing the phase in which this group
    /// played `condition`.
    pub fn tests_for(self, condition: Condition) -> (u8, u8) {
        match (self, condition) {
            (Group::A, Condition::Experimental) | (Group::B, Condition::Control) => (1, 2),
            (Group::A, Condition::Control) | (Group::B, Condition::Experimental) => (2, 3),
        }
    }
}

/// One `child_id,group,test_index,variable,value` record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub child_id: String,
    pub group: Group,
    pub test_index: u8,
    pub variable: String,
    pub value: f64,
}

#[derive(Debug, Deserialize)]
struct RawRow {
    child_id: String,
    group: String,
    test_index: String,
    variable: String,
    value: String,
}

/// Parse the study CSV. The header row is required.
pub fn parse_scores(text: &str) -> Result<Vec<ScoreRow>, StatsError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    let mut groups: BTreeMap<String, Group> = BTreeMap::new();
    let headers = reader
        .headers()
        .map_err(|e| StatsError::MalformedScores {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    for record in reader.records() {
        let bad = |line: usize, message: String| StatsError::MalformedScores { line, message };
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            bad(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let raw: RawRow = record
            .deserialize(Some(&headers))
            .map_err(|e| bad(line, e.to_string()))?;
        let group = match raw.group.to_ascii_uppercase().as_str() {
            "A" => Group::A,
            "B" => Group::B,
            other => return Err(bad(line, format!("group must be A or B, got {other:?}"))),
        };
        let test_index: u8 = match raw.test_index.parse() {
            Ok(i @ 1..=3) => i,
            _ => return Err(bad(line, format!("test_index must be 1, 2 or 3, got {:?}", raw.test_index))),
        };
        let value: f64 = raw
            .value
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| bad(line, format!("value {:?} is not a finite number", raw.value)))?;
        if *groups.entry(raw.child_id.clone()).or_insert(group) != group {
            return Err(bad(line, format!("child {} appears in both groups", raw.child_id)));
        }
        if !seen.insert((raw.child_id.clone(), test_index, raw.variable.clone())) {
            return Err(bad(
                line,
                format!("duplicate score for child {} test {test_index} {}", raw.child_id, raw.variable),
            ));
        }
        rows.push(ScoreRow {
            child_id: raw.child_id,
            group,
            test_index,
            variable: raw.variable,
            value,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionSummary {
    pub condition: Condition,
    pub n: usize,
    pub pre_mean: f64,
    pub post_mean: f64,
    pub change_mean: f64,
    /// Sample standard deviation of the changes.
    pub change_sd: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableSummary {
    pub variable: String,
    /// Change values entering the analysis: two per included child.
    pub data_points: usize,
    pub conditions: Vec<ConditionSummary>,
    /// Experimental vs control changes, paired by child.
    pub test: Option<GatedResult>,
    /// Why the test could not run, when it could not.
    pub test_error: Option<String>,
}

/// A child left out because some test score is missing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exclusion {
    pub child_id: String,
    pub missing: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudySummary {
    pub alpha: f64,
    pub included_children: usize,
    pub excluded: Vec<Exclusion>,
    pub variables: Vec<VariableSummary>,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sample_sd(xs: &[f64]) -> Option<f64> {
    (xs.len() >= 2).then(|| {
        let m = mean(xs);
        (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
    })
}

/// Per variable and condition: mean pre, mean post, mean change and its
/// SD, using for each child the phase in which it played that condition;
/// then the gated paired test of experimental against control changes.
///
/// A child missing any of the three tests for any variable is excluded
/// from every variable, so each variable has two change points per
/// included child.
pub fn summarize_study(rows: &[ScoreRow], alpha: f64) -> Result<StudySummary, StatsError> {
    let mut variables: Vec<String> = Vec::new();
    for r in rows {
        if !variables.contains(&r.variable) {
            variables.push(r.variable.clone());
        }
    }
    // child -> (group, (variable, test) -> score)
    type Scores<'a> = BTreeMap<(&'a str, u8), f64>;
    let mut children: BTreeMap<&str, (Group, Scores)> = BTreeMap::new();
    for r in rows {
        children
            .entry(&r.child_id)
            .or_insert_with(|| (r.group, BTreeMap::new()))
            .1
            .insert((&r.variable, r.test_index), r.value);
    }

    let mut excluded = Vec::new();
    let mut included = Vec::new();
    for (id, (group, scores)) in &children {
        let missing: Vec<String> = variables
            .iter()
            .flat_map(|v| (1..=3u8).map(move |t| (v, t)))
            .filter(|(v, t)| !scores.contains_key(&(v.as_str(), *t)))
            .map(|(v, t)| format!("{v} test {t}"))
            .collect();
        if missing.is_empty() {
            included.push((*group, scores));
        } else {
            excluded.push(Exclusion {
                child_id: id.to_string(),
                missing,
            });
        }
    }
    if included.is_empty() {
        return Err(StatsError::NoCompleteChildren);
    }

    let mut out = Vec::new();
    for v in &variables {
        let mut conditions = Vec::new();
        let mut changes: BTreeMap<Condition, Vec<f64>> = BTreeMap::new();
        for cond in [Condition::Experimental, Condition::Control] {
            let (mut pre, mut post) = (Vec::new(), Vec::new());
            for (group, scores) in &included {
                let (a, b) = group.tests_for(cond);
                pre.push(scores[&(v.as_str(), a)]);
                post.push(scores[&(v.as_str(), b)]);
            }
            let change: Vec<f64> = pre.iter().zip(&post).map(|(a, b)| b - a).collect();
            conditions.push(ConditionSummary {
                condition: cond,
                n: change.len(),
                pre_mean: mean(&pre),
                post_mean: mean(&post),
                change_mean: mean(&change),
                change_sd: sample_sd(&change),
            });
            changes.insert(cond, change);
        }
        let (test, test_error) = match choose_and_run(
            &changes[&Condition::Experimental],
            &changes[&Condition::Control],
            alpha,
        ) {
            Ok(t) => (Some(t), None),
            Err(e) => (None, Some(e.to_string())),
        };
        out.push(VariableSummary {
            variable: v.clone(),
            data_points: changes.values().map(Vec::len).sum(),
            conditions,
            test,
            test_error,
        });
    }
    Ok(StudySummary {
        alpha,
        included_children: included.len(),
        excluded,
        variables: out,
    })
}

impl StudySummary {
    /// Aligned plain-text table, one block per variable.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<28} {:<13} {:>4} {:>9} {:>9} {:>9} {:>8}   {:<9} {:>9} {:>7} {:>6}",
            "variable", "condition", "n", "pre", "post", "change", "(SD)", "test", "stat", "p", "r"
        );
        for v in &self.variables {
            for (i, c) in v.conditions.iter().enumerate() {
                let sd = c.change_sd.map_or("-".to_string(), |x| format!("({x:.3})"));
                let _ = write!(
                    s,
                    "{:<28} {:<13} {:>4} {:>9.3} {:>9.3} {:>+9.3} {:>8}",
                    if i == 0 { v.variable.as_str() } else { "" },
                    c.condition.name(),
                    c.n,
                    c.pre_mean,
                    c.post_mean,
                    c.change_mean,
                    sd
                );
                if i == 0 {
                    match (&v.test, &v.test_error) {
                        (Some(t), _) => {
                            let r = &t.result;
                            let name = match r.method {
                                Method::PairedT => "paired-t",
                                Method::Wilcoxon => "wilcoxon",
                            };
                            let eff = r.effect_r.map_or("-".to_string(), |x| format!("{x:.3}"));
                            let _ = write!(
                                s,
                                "   {:<9} {:>9.3} {:>7.4} {:>6}",
                                name, r.statistic, r.p, eff
                            );
                        }
                        (None, Some(e)) => {
                            let _ = write!(s, "   untested: {e}");
                        }
                        (None, None) => {}
                    }
                }
                s.push('\n');
            }
        }
        let _ = writeln!(
            s,
            "children included: {}, excluded: {}",
            self.included_children,
            self.excluded.len()
        );
        s
    }
}
