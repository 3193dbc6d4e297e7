//! Walking direction and speed from per-cell time series.
//!
//! Every cell's background-subtracted history is a time series. Zero-mean
//! normalized cross-correlation between two series peaks at the lag by which
//! one trails the other; adjacent cells lighting up one after another vote
//! for a direction, and the average adjacent-cell lag gives the speed.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::frames::{subtract_background, BackgroundModel, SceneSequence};
use crate::grid::{Cell, Grid, CELLS, COLS, ROWS};
use crate::scalar::Scalar;

/// Ground distance covered by the sensor's field of view, in metres.
pub const FIELD_OF_VIEW_M: f64 = 2.5;
/// Ground distance per cell, in metres.
pub const CELL_PITCH_M: f64 = FIELD_OF_VIEW_M / COLS as f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    LeftToRight,
    RightToLeft,
    UpToDown,
    DownToUp,
    None,
}

impl Direction {
    pub const MOVING: [Direction; 4] = [
        Direction::LeftToRight,
        Direction::RightToLeft,
        Direction::UpToDown,
        Direction::DownToUp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::LeftToRight => "left_to_right",
            Direction::RightToLeft => "right_to_left",
            Direction::UpToDown => "up_to_down",
            Direction::DownToUp => "down_to_up",
            Direction::None => "none",
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            Direction::LeftToRight => Direction::RightToLeft,
            Direction::RightToLeft => Direction::LeftToRight,
            Direction::UpToDown => Direction::DownToUp,
            Direction::DownToUp => Direction::UpToDown,
            Direction::None => Direction::None,
        }
    }

    /// Direction after swapping rows and columns.
    pub fn transposed(self) -> Self {
        match self {
            Direction::LeftToRight => Direction::UpToDown,
            Direction::UpToDown => Direction::LeftToRight,
            Direction::RightToLeft => Direction::DownToUp,
            Direction::DownToUp => Direction::RightToLeft,
            Direction::None => Direction::None,
        }
    }

    fn vote_index(self) -> Option<usize> {
        Self::MOVING.iter().position(|&d| d == self)
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Direction::None]
            .into_iter()
            .chain(Self::MOVING)
            .find(|d| d.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown direction {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PixelTimeSeries<T> {
    pub cell: Cell,
    /// Background-subtracted deltas, one per frame.
    pub samples: Vec<T>,
    pub sample_rate: f64,
}

/// The 64 per-cell series of one sequence, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesGrid<T> {
    series: Vec<PixelTimeSeries<T>>,
}

impl<T: Scalar> SeriesGrid<T> {
    pub fn get(&self, (r, c): Cell) -> &PixelTimeSeries<T> {
        &self.series[r * COLS + c]
    }

    pub fn iter(&self) -> impl Iterator<Item = &PixelTimeSeries<T>> {
        self.series.iter()
    }

    /// Number of samples per series.
    pub fn len(&self) -> usize {
        self.series[0].samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn sample_rate(&self) -> f64 {
        self.series[0].sample_rate
    }
}

/// Per-cell background-subtracted time series.
pub fn pixel_series<T: Scalar>(
    seq: &SceneSequence<T>,
    bg: &BackgroundModel<T>,
) -> Result<SeriesGrid<T>> {
    if seq.is_empty() {
        return Err(Error::EmptyInput("scene sequence"));
    }
    let mut series: Vec<PixelTimeSeries<T>> = (0..CELLS)
        .map(|i| PixelTimeSeries {
            cell: (i / COLS, i % COLS),
            samples: Vec::with_capacity(seq.len()),
            sample_rate: seq.sample_rate(),
        })
        .collect();
    for frame in seq.frames() {
        let fg = subtract_background(frame, bg, T::zero())?;
        for ((_, v), s) in fg.values().indexed().zip(series.iter_mut()) {
            s.samples.push(v);
        }
    }
    Ok(SeriesGrid { series })
}

/// Best lag of a normalized cross-correlation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XcorrPeak<T> {
    /// Peak correlation, in [-1, 1].
    pub correlation: T,
    /// Integer lag in samples; positive means `b` trails `a`.
    pub delay: i32,
    /// `delay` refined to sub-sample precision from the neighbouring lags.
    pub refined_delay: T,
}

fn is_constant<T: Scalar>(x: &[T]) -> bool {
    x.iter().all(|&v| v == x[0])
}

/// Pearson correlation of two equal-length windows; 0 when either is flat.
fn pearson<T: Scalar>(a: &[T], b: &[T]) -> T {
    let n = T::from_count(a.len());
    let ma = a.iter().copied().sum::<T>() / n;
    let mb = b.iter().copied().sum::<T>() / n;
    let (mut s, mut ea, mut eb) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        s += dx * dy;
        ea += dx * dx;
        eb += dy * dy;
    }
    let norm = (ea * eb).sqrt();
    if norm > T::zero() {
        (s / norm).max(-T::one()).min(T::one())
    } else {
        T::zero()
    }
}

/// Lags visited in tie-break order: 0, -1, +1, -2, +2, ...
fn lag_order(max_lag: usize) -> impl Iterator<Item = i32> {
    std::iter::once(0).chain((1..=max_lag as i32).flat_map(|l| [-l, l]))
}

/// Zero-mean normalized cross-correlation of `a` and `b` over lags in
/// `[-max_lag, max_lag]`. At each lag `L` the overlapping samples `a(t)`,
/// `b(t + L)` are centred on their own means and normalized by their own
/// energies, so an exact shifted copy scores 1.
///
/// Equal correlations prefer the smaller |lag|, then the negative one. A
/// constant input yields correlation 0 at delay 0.
pub fn normalized_xcorr<T: Scalar>(a: &[T], b: &[T], max_lag: usize) -> Result<XcorrPeak<T>> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::invalid("cross-correlation needs at least 2 samples"));
    }
    if max_lag >= n {
        return Err(Error::invalid(format!("max_lag {max_lag} must be < {n}")));
    }
    if is_constant(a) || is_constant(b) {
        return Ok(XcorrPeak {
            correlation: T::zero(),
            delay: 0,
            refined_delay: T::zero(),
        });
    }
    // b trails a by `lag`: a[t] pairs with b[t + lag] over the overlap
    let r = |lag: i32| -> T {
        let k = lag.unsigned_abs() as usize;
        if lag >= 0 {
            pearson(&a[..n - k], &b[k..])
        } else {
            pearson(&a[k..], &b[..n - k])
        }
    };
    let span = 2 * max_lag + 1;
    let mut values = vec![T::zero(); span];
    let mut best = (0i32, T::neg_infinity());
    for lag in lag_order(max_lag) {
        let v = r(lag);
        values[(lag + max_lag as i32) as usize] = v;
        if v > best.1 {
            best = (lag, v);
        }
    }
    let (delay, correlation) = best;
    let at = (delay + max_lag as i32) as usize;
    let offset = if at == 0 || at + 1 == span {
        T::zero()
    } else {
        subsample_offset(values[at - 1], values[at], values[at + 1])
    };
    Ok(XcorrPeak {
        correlation,
        delay,
        refined_delay: T::from_i32(delay).unwrap() + offset,
    })
}

/// Vertex offset of the peak through three equally spaced samples. Uses a
/// Gaussian fit (parabola through the logs) when all three are positive,
/// otherwise a plain parabola. Clamped to half a sample.
fn subsample_offset<T: Scalar>(left: T, centre: T, right: T) -> T {
    let half = T::lit(0.5);
    let (l, c, r) = if left > T::zero() && centre > T::zero() && right > T::zero() {
        (left.ln(), centre.ln(), right.ln())
    } else {
        (left, centre, right)
    };
    let denom = l - (c + c) + r;
    if !(denom < T::zero()) {
        return T::zero();
    }
    ((l - r) / (denom + denom)).max(-half).min(half)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionConfig<T> {
    /// Largest lag searched; `None` means half the sequence length.
    pub max_lag: Option<usize>,
    /// Minimum peak correlation for a cell pair to count.
    pub corr_threshold: T,
    /// Largest adjacent-cell lag, in samples, that still votes.
    pub delay_threshold: i32,
    pub min_votes: usize,
    /// When set, only cells whose series exceeds this delta somewhere take
    /// part.
    pub activity_threshold: Option<T>,
    pub cell_pitch_m: f64,
}

impl<T: Scalar> Default for MotionConfig<T> {
    fn default() -> Self {
        MotionConfig {
            max_lag: None,
            corr_threshold: T::lit(0.5),
            delay_threshold: 2,
            min_votes: 3,
            activity_threshold: None,
            cell_pitch_m: CELL_PITCH_M,
        }
    }
}

impl<T: Scalar> MotionConfig<T> {
    fn resolve_max_lag(&self, len: usize) -> Result<usize> {
        if len < 2 {
            return Err(Error::invalid(format!(
                "motion analysis needs at least 2 frames, got {len}"
            )));
        }
        let lag = self.max_lag.unwrap_or(len / 2);
        if lag >= len {
            return Err(Error::invalid(format!("max_lag {lag} must be < {len}")));
        }
        Ok(lag)
    }

    fn validate(&self) -> Result<()> {
        if !(self.corr_threshold > T::zero() && self.corr_threshold < T::one()) {
            return Err(Error::invalid("corr_threshold must be in (0, 1)"));
        }
        if self.delay_threshold < 1 {
            return Err(Error::invalid("delay_threshold must be >= 1"));
        }
        Ok(())
    }
}

/// Correlation and delay of every cell against one reference cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossCorrResult<T> {
    pub reference: Cell,
    pub peak_correlation: Grid<T>,
    /// Lag of each cell behind the reference; [`Self::sentinel`] where the
    /// correlation is below threshold.
    pub delay: Grid<i32>,
    pub max_lag: usize,
}

impl<T> CrossCorrResult<T> {
    /// Delay reported for cells that do not correlate with the reference.
    pub fn sentinel(&self) -> i32 {
        -(self.max_lag as i32 + 1)
    }
}

pub fn delay_analysis<T: Scalar>(
    series: &SeriesGrid<T>,
    reference: Cell,
    cfg: &MotionConfig<T>,
) -> Result<CrossCorrResult<T>> {
    if reference.0 >= ROWS || reference.1 >= COLS {
        return Err(Error::invalid(format!("reference cell {reference:?} outside grid")));
    }
    cfg.validate()?;
    let max_lag = cfg.resolve_max_lag(series.len())?;
    let sentinel = -(max_lag as i32 + 1);
    let a = &series.get(reference).samples;
    let mut peak_correlation = Grid::filled(T::zero());
    let mut delay = Grid::filled(sentinel);
    for s in series.iter() {
        let p = normalized_xcorr(a, &s.samples, max_lag)?;
        peak_correlation[s.cell] = p.correlation;
        if p.correlation >= cfg.corr_threshold {
            delay[s.cell] = p.delay;
        }
    }
    Ok(CrossCorrResult {
        reference,
        peak_correlation,
        delay,
        max_lag,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MotionEstimate<T> {
    pub direction: Direction,
    /// Mean |lag| between adjacent cells over the winning votes, in samples.
    pub mean_adjacent_lag: Option<T>,
    /// Metres per second; only reported with a direction.
    pub speed: Option<T>,
    /// Share of voting pairs that voted for the winner.
    pub confidence: f64,
    /// Votes per direction, in [`Direction::MOVING`] order.
    pub votes: [usize; 4],
}

impl<T: Scalar> MotionEstimate<T> {
    pub fn none(votes: [usize; 4]) -> Self {
        MotionEstimate {
            direction: Direction::None,
            mean_adjacent_lag: None,
            speed: None,
            confidence: 0.0,
            votes,
        }
    }

    pub fn to_text(&self) -> String {
        let opt = |v: Option<T>| v.map_or_else(|| "-".to_string(), |x| format!("{:.4}", x.as_f64()));
        format!(
            "direction {}\nmean_lag_samples {}\nspeed_mps {}\nconfidence {:.4}\nvotes {}\n",
            self.direction,
            opt(self.mean_adjacent_lag),
            opt(self.speed),
            self.confidence,
            Direction::MOVING
                .iter()
                .zip(&self.votes)
                .map(|(d, v)| format!("{d}:{v}"))
                .collect::<Vec<_>>()
                .join(" ")
        )
    }
}

/// Adjacent-pair voting.
///
/// Horizontal pairs whose right cell trails the left by 1..=delay_threshold
/// samples vote left_to_right, the mirror image right_to_left; vertical pairs
/// vote up_to_down / down_to_up the same way. A winner needs `min_votes` and
/// a strict plurality.
pub fn infer_direction<T: Scalar>(
    series: &SeriesGrid<T>,
    cfg: &MotionConfig<T>,
) -> Result<MotionEstimate<T>> {
    cfg.validate()?;
    let max_lag = cfg.resolve_max_lag(series.len())?;
    let active = |cell: Cell| match cfg.activity_threshold {
        None => true,
        Some(t) => series.get(cell).samples.iter().any(|&v| v > t),
    };

    let mut votes = [0usize; 4];
    let mut lags: [Vec<T>; 4] = Default::default();
    let mut cast = |a: Cell, b: Cell, forward: Direction| -> Result<()> {
        if !(active(a) && active(b)) {
            return Ok(());
        }
        let p = normalized_xcorr(&series.get(a).samples, &series.get(b).samples, max_lag)?;
        if p.correlation < cfg.corr_threshold || p.delay == 0 || p.delay.abs() > cfg.delay_threshold
        {
            return Ok(());
        }
        let dir = if p.delay > 0 { forward } else { forward.opposite() };
        let k = dir.vote_index().unwrap();
        votes[k] += 1;
        lags[k].push(p.refined_delay.abs());
        Ok(())
    };
    for r in 0..ROWS {
        for c in 0..COLS {
            if c + 1 < COLS {
                cast((r, c), (r, c + 1), Direction::LeftToRight)?;
            }
            if r + 1 < ROWS {
                cast((r, c), (r + 1, c), Direction::UpToDown)?;
            }
        }
    }

    let (win, &top) = votes
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .unwrap();
    let strict = votes.iter().enumerate().all(|(i, &v)| i == win || v < top);
    if top < cfg.min_votes || !strict {
        return Ok(MotionEstimate::none(votes));
    }
    let total: usize = votes.iter().sum();
    let lag = lags[win].iter().copied().sum::<T>() / T::from_count(lags[win].len());
    let seconds_per_cell = lag.as_f64() / series.sample_rate();
    Ok(MotionEstimate {
        direction: Direction::MOVING[win],
        mean_adjacent_lag: Some(lag),
        speed: Some(T::lit(cfg.cell_pitch_m / seconds_per_cell)),
        confidence: top as f64 / total as f64,
        votes,
    })
}
