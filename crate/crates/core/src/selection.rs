//! Automatic timeline-length selection.
//!
//! Ranked item scores are min-max normalized, and for every prefix length
//! `c` the selection confidence
//!
//! ```text
//! SC(c) = -ln( mean(score[0..c]) + alpha )
//! ```
//!
//! is computed. Because the scores are sorted descending the prefix mean
//! never increases, so `SC` never decreases in `c`. The timeline length is
//! the knee of this curve, found with Kneedle:
//!
//! 1. Normalize `c` and `SC` to `[0, 1]`.
//! 2. Take the difference curve (`y - x` for concave curves; the mirrored
//!    `x - y`, scanned right to left, for convex ones).
//! 3. Walk the local maxima of the difference curve. Each sets a threshold
//!    `d_max - sensitivity / (m - 1)`; the first maximum whose curve later
//!    falls below its threshold, before a higher maximum shows up, is the
//!    knee.
//!
//! When no knee qualifies the global maximum of the difference curve is
//! used instead.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_ALPHA: f64 = 0.01;
pub const DEFAULT_SENSITIVITY: f64 = 1.0;

/// Scores sorted in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedScores(Vec<f64>);

impl SortedScores {
    /// Sorts a copy of the scores, largest first.
    pub fn from_unsorted(mut scores: Vec<f64>) -> Self {
        scores.sort_by(|a, b| b.total_cmp(a));
        SortedScores(scores)
    }

    /// Accepts scores that are already in descending order.
    pub fn try_from_sorted(scores: Vec<f64>) -> Result<Self> {
        if scores.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Unsorted);
        }
        Ok(SortedScores(scores))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Min-max normalization keeps the order, so the result stays sorted.
    pub fn normalized(&self) -> SortedScores {
        SortedScores(normalize_scores(&self.0))
    }
}

/// Min-max normalizes to `[0, 1]`; a constant input maps to all ones.
pub fn normalize_scores(scores: &[f64]) -> Vec<f64> {
    let (lo, hi) = scores
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &s| (lo.min(s), hi.max(s)));
    let range = hi - lo;
    if !(range > 0.0) {
        return vec![1.0; scores.len()];
    }
    scores.iter().map(|s| (s - lo) / range).collect()
}

/// `-ln(mean of the top c scores + alpha)`, natural logarithm.
pub fn selection_confidence(sorted_scores: &SortedScores, c: usize, alpha: f64) -> Result<f64> {
    let s = sorted_scores.as_slice();
    if c == 0 || c > s.len() {
        return Err(Error::BadConstraint { c, len: s.len() });
    }
    let sum: f64 = s[..c].iter().sum();
    Ok(-(sum / c as f64 + alpha).ln())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreCurve {
    /// `(c, sc)` for `c = 1, 2, ...`.
    pub points: Vec<(usize, f64)>,
    pub alpha: f64,
}

impl ScoreCurve {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn xs(&self) -> Vec<f64> {
        self.points.iter().map(|&(c, _)| c as f64).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        self.points.iter().map(|&(_, y)| y).collect()
    }
}

/// Selection confidence for `c = 1..=min(c_max, len)`. The scores should
/// already be normalized.
pub fn sc_curve(scores: &SortedScores, c_max: usize, alpha: f64) -> Result<ScoreCurve> {
    if scores.is_empty() || c_max == 0 {
        return Err(Error::EmptyInput);
    }
    let m = c_max.min(scores.len());
    let mut sum = 0.0;
    let points = scores.as_slice()[..m]
        .iter()
        .enumerate()
        .map(|(i, s)| {
            sum += s;
            let c = i + 1;
            (c, -(sum / c as f64 + alpha).ln())
        })
        .collect();
    Ok(ScoreCurve { points, alpha })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveShape {
    /// Rises fast then flattens (e.g. `1 - 1/c`).
    ConcaveIncreasing,
    /// Stays flat then rises (e.g. a few dominant items followed by a tail).
    ConvexIncreasing,
}

impl CurveShape {
    /// Picks the shape whose side of the chord holds the larger deviation.
    /// A curve exactly on its chord counts as concave.
    pub fn infer(curve: &ScoreCurve) -> Self {
        let (x, y) = normalized_axes(curve);
        let (mut above, mut below) = (0.0f64, 0.0f64);
        for (xi, yi) in x.iter().zip(&y) {
            above = above.max(yi - xi);
            below = below.max(xi - yi);
        }
        if below > above {
            CurveShape::ConvexIncreasing
        } else {
            CurveShape::ConcaveIncreasing
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KneePoint {
    pub c_star: usize,
    /// Difference-curve value at the knee.
    pub difference: f64,
    pub fallback_used: bool,
    pub shape: CurveShape,
}

fn minmax(v: &[f64]) -> Vec<f64> {
    let (lo, hi) = v
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &s| (lo.min(s), hi.max(s)));
    let range = hi - lo;
    if !(range > 0.0) {
        return vec![0.0; v.len()];
    }
    v.iter().map(|s| (s - lo) / range).collect()
}

fn normalized_axes(curve: &ScoreCurve) -> (Vec<f64>, Vec<f64>) {
    (minmax(&curve.xs()), minmax(&curve.ys()))
}

/// Kneedle difference curve in the original point order.
pub fn difference_curve(curve: &ScoreCurve, shape: CurveShape) -> Vec<f64> {
    let (x, y) = normalized_axes(curve);
    x.iter()
        .zip(&y)
        .map(|(xi, yi)| match shape {
            CurveShape::ConcaveIncreasing => yi - xi,
            CurveShape::ConvexIncreasing => xi - yi,
        })
        .collect()
}

/// Kneedle on a concave increasing curve.
pub fn detect_knee(curve: &ScoreCurve, sensitivity: f64) -> Result<Option<KneePoint>> {
    detect_knee_with_shape(curve, sensitivity, CurveShape::ConcaveIncreasing)
}

/// Kneedle for either increasing shape. Convex curves are mirrored, which
/// amounts to scanning the `x - y` difference from the last point back.
pub fn detect_knee_with_shape(
    curve: &ScoreCurve,
    sensitivity: f64,
    shape: CurveShape,
) -> Result<Option<KneePoint>> {
    let m = curve.len();
    if m < 3 {
        return Err(Error::TooFewPoints(m));
    }
    let diff = difference_curve(curve, shape);
    let order: Vec<usize> = match shape {
        CurveShape::ConcaveIncreasing => (0..m).collect(),
        CurveShape::ConvexIncreasing => (0..m).rev().collect(),
    };
    let d: Vec<f64> = order.iter().map(|&i| diff[i]).collect();
    let step = 1.0 / (m - 1) as f64;

    // (scan position, threshold) of the active local maximum
    let mut active: Option<(usize, f64)> = None;
    for i in 1..m {
        if i + 1 < m && d[i] > d[i - 1] && d[i] >= d[i + 1] {
            let higher = active.map_or(true, |(k, _)| d[i] > d[k]);
            if higher {
                active = Some((i, d[i] - sensitivity * step));
                continue;
            }
        }
        if let Some((k, threshold)) = active {
            if d[i] < threshold {
                return Ok(Some(KneePoint {
                    c_star: curve.points[order[k]].0,
                    difference: d[k],
                    fallback_used: false,
                    shape,
                }));
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SelectionParams {
    pub alpha: f64,
    pub sensitivity: f64,
    /// Upper bound on the curve length; `None` uses every item.
    pub c_max: Option<usize>,
}

impl Default for SelectionParams {
    fn default() -> Self {
        SelectionParams {
            alpha: DEFAULT_ALPHA,
            sensitivity: DEFAULT_SENSITIVITY,
            c_max: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthChoice {
    pub length: usize,
    pub curve: ScoreCurve,
    pub knee: KneePoint,
}

/// Chooses the timeline length for items ranked best-first.
///
/// Fewer than three curve points short-circuit to taking them all. If the
/// Kneedle scan finds nothing, the global maximum of the difference curve
/// (earliest on ties) is used.
pub fn choose_length(scores: &SortedScores, params: &SelectionParams) -> Result<LengthChoice> {
    if scores.is_empty() {
        return Err(Error::EmptyInput);
    }
    let normalized = scores.normalized();
    let c_max = params.c_max.unwrap_or(scores.len()).clamp(1, scores.len());
    let curve = sc_curve(&normalized, c_max, params.alpha)?;
    let m = curve.len();
    if m < 3 {
        let knee = KneePoint {
            c_star: m,
            difference: 0.0,
            fallback_used: true,
            shape: CurveShape::ConcaveIncreasing,
        };
        return Ok(LengthChoice {
            length: m,
            curve,
            knee,
        });
    }
    let shape = CurveShape::infer(&curve);
    let knee = match detect_knee_with_shape(&curve, params.sensitivity, shape)? {
        Some(k) => k,
        None => {
            let diff = difference_curve(&curve, shape);
            let (best, value) = diff
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });
            KneePoint {
                c_star: curve.points[best].0,
                difference: value,
                fallback_used: true,
                shape,
            }
        }
    };
    Ok(LengthChoice {
        length: knee.c_star,
        curve,
        knee,
    })
}
