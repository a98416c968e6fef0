//! Restricted Damerau-Levenshtein (optimal string alignment) distance and
//! its edit script.

use super::{EditKind, EditOp};

/// Full OSA cost table for `wrong` (rows) against `correct` (columns).
fn osa_table(wrong: &[char], correct: &[char]) -> Vec<Vec<usize>> {
    let (m, n) = (wrong.len(), correct.len());
    let mut d = vec![vec![0usize; n + 1]; m + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    d[0] = (0..=n).collect();
    for i in 1..=m {
        for j in 1..=n {
            let sub = usize::from(wrong[i - 1] != correct[j - 1]);
            let mut best = (d[i - 1][j - 1] + sub)
                .min(d[i - 1][j] + 1)
                .min(d[i][j - 1] + 1);
            if i > 1
                && j > 1
                && wrong[i - 1] == correct[j - 2]
                && wrong[i - 2] == correct[j - 1]
            {
                best = best.min(d[i - 2][j - 2] + 1);
            }
            d[i][j] = best;
        }
    }
    d
}

/// Edit count where insertion, deletion, substitution and adjacent
/// transposition each cost one, and no substring is edited twice.
pub fn damerau_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    damerau_chars(&a, &b)
}

pub(crate) fn damerau_chars(a: &[char], b: &[char]) -> usize {
    if a.is_empty() || b.is_empty() {
        return a.len().max(b.len());
    }
    // Three rolling rows are enough for the distance alone.
    let n = b.len();
    let mut prev2 = vec![0usize; n + 1];
    let mut prev: Vec<usize> = (0..=n).collect();
    let mut cur = vec![0usize; n + 1];
    for i in 1..=a.len() {
        cur[0] = i;
        for j in 1..=n {
            let sub = usize::from(a[i - 1] != b[j - 1]);
            let mut best = (prev[j - 1] + sub).min(prev[j] + 1).min(cur[j - 1] + 1);
            if i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1] {
                best = best.min(prev2[j - 2] + 1);
            }
            cur[j] = best;
        }
        std::mem::swap(&mut prev2, &mut prev);
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[n]
}

/// Minimal edit script turning `wrong` into `correct`, ordered by position.
///
/// Positions index into `correct`. Backtracking prefers, in order:
/// transposition, substitution/match, deletion, insertion.
pub fn align(wrong: &str, correct: &str) -> Vec<EditOp> {
    let w: Vec<char> = wrong.chars().collect();
    let c: Vec<char> = correct.chars().collect();
    let d = osa_table(&w, &c);
    let (mut i, mut j) = (w.len(), c.len());
    let mut ops = Vec::new();
    while i > 0 || j > 0 {
        if i > 1
            && j > 1
            && w[i - 1] == c[j - 2]
            && w[i - 2] == c[j - 1]
            && w[i - 1] != w[i - 2]
            && d[i][j] == d[i - 2][j - 2] + 1
        {
            ops.push(EditOp {
                kind: EditKind::Transpose,
                position: j - 2,
                expected: c[j - 2..j].iter().collect(),
                written: w[i - 2..i].iter().collect(),
            });
            i -= 2;
            j -= 2;
        } else if i > 0 && j > 0 && d[i][j] == d[i - 1][j - 1] + usize::from(w[i - 1] != c[j - 1])
        {
            if w[i - 1] != c[j - 1] {
                ops.push(EditOp {
                    kind: EditKind::Substitute,
                    position: j - 1,
                    expected: c[j - 1].to_string(),
                    written: w[i - 1].to_string(),
                });
            }
            i -= 1;
            j -= 1;
        } else if i > 0 && d[i][j] == d[i - 1][j] + 1 {
            ops.push(EditOp {
                kind: EditKind::Delete,
                position: j,
                expected: String::new(),
                written: w[i - 1].to_string(),
            });
            i -= 1;
        } else {
            ops.push(EditOp {
                kind: EditKind::Insert,
                position: j - 1,
                expected: c[j - 1].to_string(),
                written: String::new(),
            });
            j -= 1;
        }
    }
    ops.reverse();
    ops
}

/// Replay an edit script produced by [`align`] on `wrong`.
///
/// Letters between edits are copied through unchanged.
pub fn apply_script(wrong: &str, ops: &[EditOp]) -> String {
    let w: Vec<char> = wrong.chars().collect();
    let mut out = String::with_capacity(wrong.len() + ops.len());
    let (mut i, mut j) = (0usize, 0usize);
    for op in ops {
        while j < op.position && i < w.len() {
            out.push(w[i]);
            i += 1;
            j += 1;
        }
        match op.kind {
            EditKind::Substitute => {
                out.push_str(&op.expected);
                i += 1;
                j += 1;
            }
            EditKind::Insert => {
                out.push_str(&op.expected);
                j += op.expected.chars().count();
            }
            EditKind::Delete => {
                i += op.written.chars().count();
            }
            EditKind::Transpose => {
                out.push_str(&op.expected);
                i += 2;
                j += 2;
            }
        }
    }
    out.extend(w.iter().skip(i));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_examples() {
        assert_eq!(damerau_distance("casa", "casa"), 0);
        assert_eq!(damerau_distance("ab", "ba"), 1);
        assert_eq!(damerau_distance("litel", "little"), 2);
        assert_eq!(damerau_distance("", "abc"), 3);
        // OSA, not unrestricted Damerau: "ca" -> "abc" needs 3 here.
        assert_eq!(damerau_distance("ca", "abc"), 3);
    }

    #[test]
    fn table_and_rolling_rows_agree() {
        for (a, b) in [("probley", "probably"), ("littel", "little"), ("ca", "abc")] {
            let (x, y): (Vec<char>, Vec<char>) = (a.chars().collect(), b.chars().collect());
            assert_eq!(osa_table(&x, &y)[x.len()][y.len()], damerau_chars(&x, &y));
        }
    }

    #[test]
    fn align_examples() {
        assert_eq!(
            align("littel", "little"),
            vec![EditOp {
                kind: EditKind::Transpose,
                position: 4,
                expected: "le".into(),
                written: "el".into(),
            }]
        );
        assert_eq!(
            align("emty", "empty"),
            vec![EditOp {
                kind: EditKind::Insert,
                position: 2,
                expected: "p".into(),
                written: String::new(),
            }]
        );
        assert!(align("x", "x").is_empty());
    }

    #[test]
    fn replay_reconstructs() {
        for (w, c) in [
            ("arround", "around"),
            ("litel", "little"),
            ("probley", "probably"),
            ("", "abc"),
            ("abc", ""),
            ("scholl", "school"),
        ] {
            let ops = align(w, c);
            assert_eq!(ops.len(), damerau_distance(w, c), "{w} -> {c}");
            assert_eq!(apply_script(w, &ops), c, "{w} -> {c}");
        }
    }
}
