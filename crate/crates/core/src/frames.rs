//! Frame data model, CSV ingestion, background modelling and background
//! subtraction.
//!
//! Every frame is an 8x8 grid of temperatures in degrees Fahrenheit. The
//! background model is a frozen per-cell mean (plus population std) over a
//! batch of person-free frames; foreground deltas are `frame - mean`.

use crate::error::{Error, Result};
use crate::grid::{Grid, CELLS};
use crate::scalar::Scalar;

/// Lowest temperature the sensor reports, in F.
pub const SENSOR_MIN_F: f64 = -4.0;
/// Highest temperature the sensor reports, in F.
pub const SENSOR_MAX_F: f64 = 212.0;
pub const DEFAULT_SAMPLE_RATE: f64 = 10.0;
/// Floor of the default activity threshold, in F.
pub const MIN_DEFAULT_THRESHOLD_F: f64 = 4.0;

fn check_range<T: Scalar>(v: T, line: Option<usize>) -> Result<()> {
    let f = v.as_f64();
    if !(SENSOR_MIN_F..=SENSOR_MAX_F).contains(&f) {
        return Err(Error::OutOfRange { value: f, line });
    }
    Ok(())
}

/// One 8x8 sample of the sensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalFrame<T> {
    cells: Grid<T>,
    timestamp_ms: f64,
}

impl<T: Scalar> ThermalFrame<T> {
    pub fn new(cells: Grid<T>, timestamp_ms: f64) -> Result<Self> {
        for v in cells.values() {
            check_range(v, None)?;
        }
        Ok(ThermalFrame {
            cells,
            timestamp_ms,
        })
    }

    pub fn cells(&self) -> &Grid<T> {
        &self.cells
    }

    pub fn timestamp_ms(&self) -> f64 {
        self.timestamp_ms
    }

    pub fn transposed(&self) -> Self {
        ThermalFrame {
            cells: self.cells.transposed(),
            timestamp_ms: self.timestamp_ms,
        }
    }
}

/// Ordered frames sampled at a fixed rate.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneSequence<T> {
    frames: Vec<ThermalFrame<T>>,
    sample_rate: f64,
}

impl<T: Scalar> SceneSequence<T> {
    pub fn new(frames: Vec<ThermalFrame<T>>, sample_rate: f64) -> Result<Self> {
        if !(sample_rate.is_finite() && sample_rate > 0.0) {
            return Err(Error::invalid(format!("sample rate {sample_rate}")));
        }
        if frames
            .windows(2)
            .any(|w| w[1].timestamp_ms <= w[0].timestamp_ms)
        {
            return Err(Error::invalid("timestamps must be strictly increasing"));
        }
        Ok(SceneSequence {
            frames,
            sample_rate,
        })
    }

    /// Wraps grids, synthesizing timestamps at `1000 / sample_rate` ms steps.
    pub fn from_grids(grids: Vec<Grid<T>>, sample_rate: f64) -> Result<Self> {
        let step = 1000.0 / sample_rate;
        let frames = grids
            .into_iter()
            .enumerate()
            .map(|(i, g)| ThermalFrame::new(g, i as f64 * step))
            .collect::<Result<Vec<_>>>()?;
        Self::new(frames, sample_rate)
    }

    pub fn frames(&self) -> &[ThermalFrame<T>] {
        &self.frames
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Same grids in reverse order, timestamps re-synthesized.
    pub fn reversed(&self) -> Self {
        let grids = self.frames.iter().rev().map(|f| f.cells).collect();
        Self::from_grids(grids, self.sample_rate).expect("valid frames stay valid")
    }

    /// Every frame transposed (rows become columns).
    pub fn transposed(&self) -> Self {
        SceneSequence {
            frames: self.frames.iter().map(ThermalFrame::transposed).collect(),
            sample_rate: self.sample_rate,
        }
    }
}

fn parse_row<T: Scalar>(line: &str, lineno: usize) -> Result<Grid<T>> {
    let mut values = Vec::with_capacity(CELLS);
    for field in line.split(',') {
        let v: T = field.trim().parse().map_err(|_| Error::Parse {
            line: lineno,
            msg: format!("not a number: {:?}", field.trim()),
        })?;
        if !v.is_finite() {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("non-finite value {:?}", field.trim()),
            });
        }
        values.push(v);
    }
    if values.len() != CELLS {
        return Err(Error::Parse {
            line: lineno,
            msg: format!("expected {CELLS} fields, found {}", values.len()),
        });
    }
    for &v in &values {
        check_range(v, Some(lineno))?;
    }
    Ok(Grid::from_row_major(&values).expect("length checked"))
}

/// Parses the frame CSV format: one frame per line, 64 comma-separated
/// values in row-major order. Lines starting with `#` and blank lines are
/// skipped.
pub fn parse_sequence<T: Scalar>(content: &str, sample_rate: f64) -> Result<SceneSequence<T>> {
    let mut grids = Vec::new();
    for (i, line) in content.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        grids.push(parse_row(line, i + 1)?);
    }
    SceneSequence::from_grids(grids, sample_rate)
}

/// Inverse of [`parse_sequence`].
pub fn write_sequence<T: Scalar>(frames: &[ThermalFrame<T>]) -> String {
    let mut out = String::new();
    for f in frames {
        out.push_str(&f.cells.to_csv_line());
        out.push('\n');
    }
    out
}

/// Per-cell long-term mean and population standard deviation over
/// person-free frames.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackgroundModel<T> {
    mean: Grid<T>,
    std: Grid<T>,
    n_frames: usize,
}

impl<T: Scalar> BackgroundModel<T> {
    pub fn from_parts(mean: Grid<T>, std: Grid<T>, n_frames: usize) -> Result<Self> {
        if n_frames == 0 {
            return Err(Error::invalid("background model needs n_frames >= 1"));
        }
        if std.values().any(|s| !(s >= T::zero())) {
            return Err(Error::invalid("background std must be >= 0"));
        }
        if mean.values().any(|m| !m.is_finite()) {
            return Err(Error::invalid("background mean must be finite"));
        }
        Ok(BackgroundModel { mean, std, n_frames })
    }

    pub fn mean(&self) -> &Grid<T> {
        &self.mean
    }

    pub fn std(&self) -> &Grid<T> {
        &self.std
    }

    pub fn n_frames(&self) -> usize {
        self.n_frames
    }

    pub fn transposed(&self) -> Self {
        BackgroundModel {
            mean: self.mean.transposed(),
            std: self.std.transposed(),
            n_frames: self.n_frames,
        }
    }

    /// Twice the average per-cell std, never below 4 F.
    pub fn default_threshold(&self) -> T {
        let avg = self.std.values().sum::<T>() / T::from_count(CELLS);
        (avg + avg).max(T::lit(MIN_DEFAULT_THRESHOLD_F))
    }

    /// Serializes as `#n_frames=<n>`, `#mean` + one grid line, `#std` + one
    /// grid line.
    pub fn to_file_string(&self) -> String {
        format!(
            "#n_frames={}\n#mean\n{}\n#std\n{}\n",
            self.n_frames,
            self.mean.to_csv_line(),
            self.std.to_csv_line()
        )
    }

    pub fn parse(content: &str) -> Result<Self> {
        enum Section {
            None,
            Mean,
            Std,
        }
        let mut section = Section::None;
        let (mut mean, mut std, mut n_frames) = (None, None, None);
        for (i, line) in content.lines().enumerate() {
            let lineno = i + 1;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(tag) = line.strip_prefix('#') {
                let tag = tag.trim();
                if let Some(n) = tag.strip_prefix("n_frames=") {
                    n_frames = Some(n.trim().parse::<usize>().map_err(|_| Error::Parse {
                        line: lineno,
                        msg: format!("bad n_frames {n:?}"),
                    })?);
                } else if tag == "mean" {
                    section = Section::Mean;
                } else if tag == "std" {
                    section = Section::Std;
                }
                continue;
            }
            let slot = match section {
                Section::Mean => &mut mean,
                Section::Std => &mut std,
                Section::None => {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: "grid row outside #mean/#std section".into(),
                    })
                }
            };
            if slot.is_some() {
                return Err(Error::Parse {
                    line: lineno,
                    msg: "duplicate grid row in section".into(),
                });
            }
            *slot = Some(parse_grid_unchecked::<T>(line, lineno)?);
        }
        let missing = |what: &str| Error::Format(format!("background file missing {what}"));
        Self::from_parts(
            mean.ok_or_else(|| missing("#mean"))?,
            std.ok_or_else(|| missing("#std"))?,
            n_frames.ok_or_else(|| missing("#n_frames"))?,
        )
    }
}

// Background statistics are not sensor readings, so no range check here.
fn parse_grid_unchecked<T: Scalar>(line: &str, lineno: usize) -> Result<Grid<T>> {
    let values = line
        .split(',')
        .map(|f| {
            f.trim().parse::<T>().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("not a number: {:?}", f.trim()),
            })
        })
        .collect::<Result<Vec<T>>>()?;
    Grid::from_row_major(&values).ok_or(Error::Parse {
        line: lineno,
        msg: format!("expected {CELLS} fields, found {}", values.len()),
    })
}

/// Builds the frozen batch background model.
pub fn build_background<T: Scalar>(frames: &[ThermalFrame<T>]) -> Result<BackgroundModel<T>> {
    if frames.is_empty() {
        return Err(Error::EmptyInput("background frames"));
    }
    let n = T::from_count(frames.len());
    let mut sum = Grid::filled(T::zero());
    for f in frames {
        sum = sum.zip_map(&f.cells, |s, v| s + v);
    }
    let mean = sum.map(|s| s / n);
    let mut sq = Grid::filled(T::zero());
    for f in frames {
        sq = sq.zip_map(&f.cells.zip_map(&mean, |v, m| v - m), |s, d| s + d * d);
    }
    let std = sq.map(|s| (s / n).sqrt());
    BackgroundModel::from_parts(mean, std, frames.len())
}

/// Background-subtracted frame with its activity mask.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForegroundFrame<T> {
    values: Grid<T>,
    active: Grid<bool>,
    threshold_used: T,
}

impl<T: Scalar> ForegroundFrame<T> {
    /// A cell is active iff its delta is strictly above `threshold`.
    pub fn from_deltas(values: Grid<T>, threshold: T) -> Result<Self> {
        if !(threshold >= T::zero()) || !threshold.is_finite() {
            return Err(Error::invalid(format!("threshold {threshold} must be >= 0")));
        }
        Ok(ForegroundFrame {
            active: values.map(|v| v > threshold),
            values,
            threshold_used: threshold,
        })
    }

    /// Mask-only foreground: active cells get `delta`, others zero, with a
    /// zero threshold.
    pub fn from_mask(mask: &Grid<bool>, delta: T) -> Self {
        Self::from_deltas(mask.map(|a| if a { delta } else { T::zero() }), T::zero())
            .expect("zero threshold is valid")
    }

    pub fn values(&self) -> &Grid<T> {
        &self.values
    }

    pub fn active(&self) -> &Grid<bool> {
        &self.active
    }

    pub fn threshold_used(&self) -> T {
        self.threshold_used
    }

    pub fn active_count(&self) -> usize {
        self.active.values().filter(|&a| a).count()
    }

    /// Multiplies deltas and threshold by `k > 0`.
    pub fn scaled(&self, k: T) -> Result<Self> {
        if !(k > T::zero()) {
            return Err(Error::invalid("scale must be positive"));
        }
        Self::from_deltas(self.values.map(|v| v * k), self.threshold_used * k)
    }
}

/// `frame - bg.mean` per cell, with the activity mask at `threshold`.
/// Negative deltas are kept as-is and can never be active.
pub fn subtract_background<T: Scalar>(
    frame: &ThermalFrame<T>,
    bg: &BackgroundModel<T>,
    threshold: T,
) -> Result<ForegroundFrame<T>> {
    ForegroundFrame::from_deltas(frame.cells.zip_map(&bg.mean, |p, m| p - m), threshold)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant(v: f64) -> ThermalFrame<f64> {
        ThermalFrame::new(Grid::filled(v), 0.0).unwrap()
    }

    #[test]
    fn parse_single_row_of_zeros() {
        let line = vec!["0"; 64].join(",");
        let seq = parse_sequence::<f64>(&line, 10.0).unwrap();
        assert_eq!(seq.len(), 1);
        assert!(seq.frames()[0].cells().values().all(|v| v == 0.0));
    }

    #[test]
    fn parse_synthesizes_timestamps() {
        let line = vec!["97.5"; 64].join(",");
        let text = format!("# header\n{line}\n{line}\n");
        let seq = parse_sequence::<f64>(&text, 10.0).unwrap();
        let ts: Vec<f64> = seq.frames().iter().map(|f| f.timestamp_ms()).collect();
        assert_eq!(ts, vec![0.0, 100.0]);
    }

    #[test]
    fn parse_rejects_short_row_with_line_number() {
        let line = vec!["0"; 63].join(",");
        match parse_sequence::<f64>(&line, 10.0) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_out_of_range_and_garbage() {
        let mut fields = vec!["0"; 64];
        fields[10] = "250";
        let text = format!("#x\n{}", fields.join(","));
        assert_eq!(
            parse_sequence::<f64>(&text, 10.0),
            Err(Error::OutOfRange {
                value: 250.0,
                line: Some(2)
            })
        );
        fields[10] = "abc";
        assert!(matches!(
            parse_sequence::<f64>(&fields.join(","), 10.0),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn frame_rejects_out_of_range() {
        assert!(ThermalFrame::new(Grid::filled(-4.5f64), 0.0).is_err());
        assert!(ThermalFrame::new(Grid::filled(212.0f64), 0.0).is_ok());
    }

    #[test]
    fn sequence_requires_increasing_timestamps() {
        let f = constant(90.0);
        assert!(SceneSequence::new(vec![f, f], 10.0).is_err());
    }

    #[test]
    fn background_of_constant_frames() {
        let frames = vec![constant(97.0); 164];
        let bg = build_background(&frames).unwrap();
        assert!(bg.mean().values().all(|v| v == 97.0));
        assert!(bg.std().values().all(|v| v == 0.0));
        assert_eq!(bg.n_frames(), 164);
        assert_eq!(bg.default_threshold(), 4.0);
    }

    #[test]
    fn background_two_point_mean_and_std() {
        let bg = build_background(&[constant(96.0), constant(98.0)]).unwrap();
        assert!(bg.mean().values().all(|v| v == 97.0));
        assert!(bg.std().values().all(|v| v == 1.0));
    }

    #[test]
    fn background_empty_input() {
        assert_eq!(
            build_background::<f64>(&[]),
            Err(Error::EmptyInput("background frames"))
        );
    }

    #[test]
    fn subtract_own_background_is_zero() {
        let f = ThermalFrame::new(Grid::from_fn(|r, c| 90.0 + (r * 8 + c) as f64 * 0.25), 0.0)
            .unwrap();
        let bg = build_background(&[f]).unwrap();
        let fg = subtract_background(&f, &bg, 0.0).unwrap();
        assert!(fg.values().values().all(|v| v == 0.0));
        assert_eq!(fg.active_count(), 0);
    }

    #[test]
    fn head_temperatures_against_threshold() {
        let bg = build_background(&[constant(97.0)]).unwrap();
        let mut cells = Grid::filled(97.0);
        cells[(3, 3)] = 106.0;
        cells[(5, 5)] = 113.0;
        let fg = subtract_background(&ThermalFrame::new(cells, 0.0).unwrap(), &bg, 10.0).unwrap();
        assert_eq!(fg.values()[(3, 3)], 9.0);
        assert!(!fg.active()[(3, 3)]);
        assert_eq!(fg.values()[(5, 5)], 16.0);
        assert!(fg.active()[(5, 5)]);
        assert_eq!(fg.threshold_used(), 10.0);
    }

    #[test]
    fn negative_threshold_rejected() {
        let bg = build_background(&[constant(97.0)]).unwrap();
        assert!(subtract_background(&constant(97.0), &bg, -1.0).is_err());
    }

    #[test]
    fn background_file_roundtrip() {
        let frames: Vec<_> = (0..5)
            .map(|k| {
                ThermalFrame::new(Grid::from_fn(|r, c| 95.0 + (k * r + c) as f64 / 3.0), 0.0)
                    .unwrap()
            })
            .collect();
        let bg = build_background(&frames).unwrap();
        let text = bg.to_file_string();
        assert!(text.starts_with("#n_frames=5\n#mean\n"));
        assert_eq!(BackgroundModel::<f64>::parse(&text).unwrap(), bg);
        assert!(BackgroundModel::<f64>::parse("#mean\n1,2\n").is_err());
    }

    #[test]
    fn sequence_write_parse_roundtrip() {
        let grids = vec![Grid::from_fn(|r, c| 96.25 + r as f64 - c as f64 * 0.5); 3];
        let seq = SceneSequence::from_grids(grids, 10.0).unwrap();
        let back = parse_sequence::<f64>(&write_sequence(seq.frames()), 10.0).unwrap();
        assert_eq!(back, seq);
    }

    #[test]
    fn works_in_single_precision() {
        let bg = build_background(&[ThermalFrame::new(Grid::filled(96.0f32), 0.0).unwrap()])
            .unwrap();
        let f = ThermalFrame::new(Grid::filled(110.0f32), 0.0).unwrap();
        let fg = subtract_background(&f, &bg, bg.default_threshold()).unwrap();
        assert_eq!(fg.active_count(), 64);
    }
}
