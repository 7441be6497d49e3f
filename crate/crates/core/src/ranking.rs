//! Competition rankings, Kendall's coefficient and score statistics.

use std::fmt;
use std::io::{self, Write};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RankingError {
    #[error("score at index {0} is not finite")]
    NonFinite(usize),
    #[error("rankings have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least two items, got {0}")]
    TooSmall(usize),
}

/// Competition ("1224") ranking: the highest score gets position 1, ties share
/// the better position and the following positions are skipped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ranking {
    pub positions: Vec<u64>,
}

impl Ranking {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

pub fn make_ranking(scores: &[f64]) -> Result<Ranking, RankingError> {
    if let Some(i) = scores.iter().position(|s| !s.is_finite()) {
        return Err(RankingError::NonFinite(i));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut positions = vec![0u64; scores.len()];
    let mut current = 0u64;
    for (k, &i) in order.iter().enumerate() {
        // `==` rather than total_cmp so that -0.0 and 0.0 tie.
        if k == 0 || scores[i] != scores[order[k - 1]] {
            current = k as u64 + 1;
        }
        positions[i] = current;
    }
    Ok(Ranking { positions })
}

/// `K = 1/(n(n-1)) * sum_i sum_j sgn(x_j - x_i) sgn(y_j - y_i)` over position
/// arrays, ties contributing zero.
///
/// Evaluated in `O(n log n)`: sort by `(x, y)`, count tied pairs, and count
/// discordant pairs as inversions of the `y` sequence with a merge sort.
pub fn kendall(x: &Ranking, y: &Ranking) -> Result<f64, RankingError> {
    kendall_positions(&x.positions, &y.positions)
}

pub fn kendall_positions(x: &[u64], y: &[u64]) -> Result<f64, RankingError> {
    if x.len() != y.len() {
        return Err(RankingError::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if n < 2 {
        return Err(RankingError::TooSmall(n));
    }
    let mut pairs: Vec<(u64, u64)> = x.iter().copied().zip(y.iter().copied()).collect();
    pairs.sort_unstable();

    let tied_x = tied_pairs(pairs.iter().map(|p| p.0));
    let tied_xy = tied_pairs(pairs.iter().copied());

    let mut ys: Vec<u64> = pairs.iter().map(|p| p.1).collect();
    let mut buf = vec![0u64; n];
    let discordant = count_inversions(&mut ys, &mut buf);
    // `ys` is now sorted.
    let tied_y = tied_pairs(ys.iter().copied());

    let total = n as u64 * (n as u64 - 1) / 2;
    // concordant - discordant
    let net = total as i128 - tied_x as i128 - tied_y as i128 + tied_xy as i128 - 2 * discordant as i128;
    Ok(net as f64 / total as f64)
}

/// Number of pairs within runs of equal consecutive values.
fn tied_pairs<T: PartialEq>(sorted: impl Iterator<Item = T>) -> u64 {
    let mut total = 0u64;
    let mut run = 0u64;
    let mut last: Option<T> = None;
    for v in sorted {
        if last.as_ref() == Some(&v) {
            run += 1;
        } else {
            total += run * (run.saturating_sub(1)) / 2;
            run = 1;
            last = Some(v);
        }
    }
    total + run * run.saturating_sub(1) / 2
}

/// Strict inversions (`i < j`, `a[i] > a[j]`); sorts `a` in place.
fn count_inversions(a: &mut [u64], buf: &mut [u64]) -> u64 {
    let n = a.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut inv = {
        let (l, r) = a.split_at_mut(mid);
        let (bl, br) = buf.split_at_mut(mid);
        count_inversions(l, bl) + count_inversions(r, br)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if a[i] <= a[j] {
            buf[k] = a[i];
            i += 1;
        } else {
            buf[k] = a[j];
            inv += (mid - i) as u64;
            j += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&a[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&a[j..n]);
    a.copy_from_slice(&buf[..n]);
    inv
}

pub const CLASS_LABELS: [&str; 5] = ["SP <= 1", "1 < SP < 10", "10 <= SP < 100", "100 <= SP < 1000", "SP >= 1000"];

/// Class index of one score.
pub fn sp_class(v: f64) -> usize {
    if v <= 1.0 {
        0
    } else if v < 10.0 {
        1
    } else if v < 100.0 {
        2
    } else if v < 1000.0 {
        3
    } else {
        4
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionReport {
    pub class_counts: [usize; 5],
    pub class_percentages: [f64; 5],
    pub mean: f64,
    /// Population standard deviation.
    pub std_dev: f64,
    pub min: f64,
    pub max: f64,
}

pub fn sp_distribution(scores: &[f64]) -> DistributionReport {
    let n = scores.len();
    let mut class_counts = [0usize; 5];
    for &v in scores {
        class_counts[sp_class(v)] += 1;
    }
    if n == 0 {
        return DistributionReport {
            class_counts,
            class_percentages: [0.0; 5],
            mean: 0.0,
            std_dev: 0.0,
            min: 0.0,
            max: 0.0,
        };
    }
    let class_percentages = class_counts.map(|c| 100.0 * c as f64 / n as f64);
    let mean = scores.iter().sum::<f64>() / n as f64;
    let var = scores.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    DistributionReport {
        class_counts,
        class_percentages,
        mean,
        std_dev: var.sqrt(),
        min: scores.iter().copied().fold(f64::INFINITY, f64::min),
        max: scores.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}

impl fmt::Display for DistributionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<20}{:>16}", "Average SP", format!("{:.6}", self.mean))?;
        writeln!(f, "{:<20}{:>16}", "Std. Dev. SP", format!("{:.6}", self.std_dev))?;
        writeln!(f, "{:<20}{:>16}", "Min SP value", format!("{:.6}", self.min))?;
        writeln!(f, "{:<20}{:>16}", "Max SP value", format!("{:.6}", self.max))?;
        writeln!(f)?;
        writeln!(f, "{:<20}{:>16}{:>12}", "Class", "Members", "Percent")?;
        for (k, label) in CLASS_LABELS.iter().enumerate() {
            writeln!(
                f,
                "{:<20}{:>16}{:>12}",
                label,
                self.class_counts[k],
                format!("{:.2}%", self.class_percentages[k])
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DuplicateReport {
    pub members: usize,
    pub distinct: usize,
    pub duplicates: usize,
    pub percentage: f64,
}

/// `duplicates = n - |distinct values|` under exact equality.
pub fn duplicate_stats(scores: &[f64]) -> DuplicateReport {
    let mut sorted: Vec<f64> = scores.iter().map(|&v| if v == 0.0 { 0.0 } else { v }).collect();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup_by(|a, b| a == b);
    let n = scores.len();
    let distinct = sorted.len();
    let duplicates = n - distinct;
    DuplicateReport {
        members: n,
        distinct,
        duplicates,
        percentage: if n == 0 { 0.0 } else { 100.0 * duplicates as f64 / n as f64 },
    }
}

impl fmt::Display for DuplicateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<20}{:>16}", "Members", self.members)?;
        writeln!(f, "{:<20}{:>16}", "Distinct values", self.distinct)?;
        writeln!(f, "{:<20}{:>16}", "Duplicates", self.duplicates)?;
        writeln!(f, "{:<20}{:>16}", "Duplicates [%]", format!("{:.2}", self.percentage))
    }
}

/// `member;score;position` rows.
pub fn write_ranking<W: Write>(rows: &[(String, f64)], ranking: &Ranking, mut w: W) -> io::Result<()> {
    writeln!(w, "member;score;position")?;
    for ((member, score), pos) in rows.iter().zip(&ranking.positions) {
        writeln!(w, "{member};{score};{pos}")?;
    }
    Ok(())
}
