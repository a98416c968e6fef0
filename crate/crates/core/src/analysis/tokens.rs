//! Word-level alignment that understands run-ons and split words.

use std::ops::Range;

use super::distance::damerau_chars;

/// Largest number of words merged into a single run-on or split.
pub const MAX_GROUP: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenLink {
    /// One written word against one reference word.
    Pair { wrong: usize, correct: usize },
    /// One written word covering several reference words (*alot).
    RunOn { wrong: usize, correct: Range<usize> },
    /// Several written words covering one reference word (*mis understanding).
    Split { wrong: Range<usize>, correct: usize },
    /// Written word with no reference counterpart.
    Added { wrong: usize },
    /// Reference word missing from the written text.
    Omitted { correct: usize },
}

fn chars_of(tokens: &[String]) -> Vec<char> {
    tokens.iter().flat_map(|t| t.chars()).collect()
}

/// A merged group is only plausible when the joined spellings are close.
fn merge_cost(joined_written: &[char], joined_reference: &[char]) -> Option<usize> {
    let d = damerau_chars(joined_written, joined_reference);
    let bound = (joined_reference.len() / 3).max(1);
    (d <= bound).then_some(1 + d)
}

/// Align written tokens to reference tokens minimizing total letter edits.
///
/// `pair_cost` prices a one-to-one pairing (callers use it to count a
/// morphology error as one). Boundary groups cost one plus the letter edits
/// of the joined spellings. With `allow_gaps`, an added or omitted word costs
/// its letter count. Ties go to the leftmost choice in the order pair,
/// run-on, split, omitted, added. Returns `None` when the tokens cannot be
/// covered.
pub fn align_tokens<F>(
    wrong: &[String],
    correct: &[String],
    allow_gaps: bool,
    pair_cost: F,
) -> Option<Vec<TokenLink>>
where
    F: Fn(&str, &str) -> usize,
{
    let (m, n) = (wrong.len(), correct.len());
    const INF: usize = usize::MAX / 4;
    // best[i][j]: cheapest alignment of wrong[i..] with correct[j..]
    let mut best = vec![vec![INF; n + 1]; m + 1];
    best[m][n] = 0;

    let moves = |i: usize, j: usize, best: &Vec<Vec<usize>>| -> Vec<(TokenLink, usize)> {
        let mut out = Vec::new();
        if i < m && j < n {
            let c = pair_cost(&wrong[i], &correct[j]);
            out.push((TokenLink::Pair { wrong: i, correct: j }, c + best[i + 1][j + 1]));
        }
        if i < m {
            let w: Vec<char> = wrong[i].chars().collect();
            for k in 2..=MAX_GROUP {
                if j + k > n {
                    break;
                }
                if let Some(c) = merge_cost(&w, &chars_of(&correct[j..j + k])) {
                    out.push((
                        TokenLink::RunOn {
                            wrong: i,
                            correct: j..j + k,
                        },
                        c + best[i + 1][j + k],
                    ));
                }
            }
        }
        if j < n {
            let c: Vec<char> = correct[j].chars().collect();
            for k in 2..=MAX_GROUP {
                if i + k > m {
                    break;
                }
                if let Some(cost) = merge_cost(&chars_of(&wrong[i..i + k]), &c) {
                    out.push((
                        TokenLink::Split {
                            wrong: i..i + k,
                            correct: j,
                        },
                        cost + best[i + k][j + 1],
                    ));
                }
            }
        }
        if allow_gaps {
            if j < n {
                out.push((
                    TokenLink::Omitted { correct: j },
                    correct[j].chars().count() + best[i][j + 1],
                ));
            }
            if i < m {
                out.push((
                    TokenLink::Added { wrong: i },
                    wrong[i].chars().count() + best[i + 1][j],
                ));
            }
        }
        out
    };

    for i in (0..=m).rev() {
        for j in (0..=n).rev() {
            if i == m && j == n {
                continue;
            }
            best[i][j] = moves(i, j, &best)
                .into_iter()
                .map(|(_, c)| c)
                .min()
                .unwrap_or(INF)
                .min(INF);
        }
    }
    if best[0][0] >= INF {
        return None;
    }

    let mut links = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < m || j < n {
        let (link, _) = moves(i, j, &best)
            .into_iter()
            .find(|(_, c)| *c == best[i][j])?;
        (i, j) = match &link {
            TokenLink::Pair { .. } => (i + 1, j + 1),
            TokenLink::RunOn { correct, .. } => (i + 1, correct.end),
            TokenLink::Split { wrong, .. } => (wrong.end, j + 1),
            TokenLink::Added { .. } => (i + 1, j),
            TokenLink::Omitted { .. } => (i, j + 1),
        };
        links.push(link);
    }
    Some(links)
}
