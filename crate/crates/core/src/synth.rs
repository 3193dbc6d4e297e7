//! Labelled synthetic scenes: noisy backgrounds, people as Gaussian heat
//! bumps, walks across the field of view and balanced occupancy corpora.
//!
//! All randomness comes from a ChaCha stream seeded by [`SynthConfig::seed`].

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::blobs::{extract_features, FeatureConfig};
use crate::classify::{ClassLabel, Dataset, CLASSES};
use crate::error::{Error, Result};
use crate::frames::{
    build_background, subtract_background, BackgroundModel, SceneSequence, ThermalFrame,
    SENSOR_MAX_F, SENSOR_MIN_F,
};
use crate::grid::{Grid, COLS, ROWS};
use crate::motion::{Direction, MotionEstimate, CELL_PITCH_M};
use crate::scalar::Scalar;

/// Background frames drawn to build a corpus' background model.
pub const CORPUS_BACKGROUND_FRAMES: usize = 164;
pub const DEFAULT_PERSON_SIGMA: f64 = 0.7;
/// Head-over-background range used for corpus scenes, in F.
pub const PEAK_DELTA_RANGE: (f64, f64) = (8.0, 16.0);
/// Candidate minimum separations between people in a corpus scene, in cells.
pub const SEPARATIONS: [f64; 4] = [0.5, 1.0, 2.0, 3.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig<T> {
    pub bg_mean: T,
    pub bg_std: T,
    pub sample_rate: f64,
    pub seed: u64,
    pub quantize: bool,
    pub quant_step: T,
}

impl<T: Scalar> Default for SynthConfig<T> {
    fn default() -> Self {
        SynthConfig {
            bg_mean: T::lit(97.0),
            bg_std: T::lit(5.0),
            sample_rate: 10.0,
            seed: 0,
            quantize: true,
            quant_step: T::lit(0.25),
        }
    }
}

impl<T: Scalar> SynthConfig<T> {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn noiseless(mut self) -> Self {
        self.bg_std = T::zero();
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.bg_std >= T::zero()) {
            return Err(Error::invalid("bg_std must be >= 0"));
        }
        if !(self.sample_rate > 0.0) {
            return Err(Error::invalid("sample_rate must be > 0"));
        }
        if self.quantize && !(self.quant_step > T::zero()) {
            return Err(Error::invalid("quant_step must be > 0"));
        }
        Ok(())
    }
}

/// A person as an isotropic Gaussian bump above the background.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersonSpec<T> {
    /// (row, col) in cell units; cell centres sit on integers.
    pub position: (T, T),
    pub peak_delta: T,
    pub sigma: T,
}

impl<T: Scalar> PersonSpec<T> {
    pub fn new(position: (T, T), peak_delta: T) -> Self {
        PersonSpec {
            position,
            peak_delta,
            sigma: T::lit(DEFAULT_PERSON_SIGMA),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.peak_delta > T::zero()) || !(self.sigma > T::zero()) {
            return Err(Error::invalid("person needs peak_delta > 0 and sigma > 0"));
        }
        Ok(())
    }

    fn heat(&self, r: usize, c: usize) -> T {
        let dr = T::from_count(r) - self.position.0;
        let dc = T::from_count(c) - self.position.1;
        self.peak_delta * (-(dr * dr + dc * dc) / (T::lit(2.0) * self.sigma * self.sigma)).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkSpec<T> {
    pub direction: Direction,
    /// Metres per second.
    pub speed: T,
    /// Only the coordinate across the walking axis is used for position.
    pub person: PersonSpec<T>,
}

/// Frames and labels of a generated corpus, before feature extraction.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusScenes<T> {
    pub background_frames: Vec<ThermalFrame<T>>,
    pub background: BackgroundModel<T>,
    pub frames: Vec<ThermalFrame<T>>,
    pub labels: Vec<ClassLabel>,
}

impl<T: Scalar> CorpusScenes<T> {
    /// Features at the background model's default threshold.
    pub fn dataset(&self, features: &FeatureConfig) -> Result<Dataset<T>> {
        let threshold = self.background.default_threshold();
        let mut data = Dataset::default();
        for (f, &label) in self.frames.iter().zip(&self.labels) {
            let fg = subtract_background(f, &self.background, threshold)?;
            data.push(&extract_features(&fg, features), label)?;
        }
        Ok(data)
    }
}

/// Stateful generator; successive calls continue one random stream.
pub struct SceneGenerator<T> {
    cfg: SynthConfig<T>,
    rng: ChaCha8Rng,
}

impl<T: Scalar> SceneGenerator<T> {
    pub fn new(cfg: SynthConfig<T>) -> Result<Self> {
        cfg.validate()?;
        Ok(SceneGenerator {
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            cfg,
        })
    }

    fn noise_grid(&mut self) -> Grid<T> {
        let (mean, std) = (self.cfg.bg_mean, self.cfg.bg_std);
        Grid::from_fn(|_, _| {
            let z: f64 = self.rng.sample(StandardNormal);
            mean + std * T::lit(z)
        })
    }

    fn finish(&self, g: Grid<T>) -> Grid<T> {
        let (lo, hi) = (T::lit(SENSOR_MIN_F), T::lit(SENSOR_MAX_F));
        g.map(|v| {
            let v = if self.cfg.quantize {
                (v / self.cfg.quant_step).round() * self.cfg.quant_step
            } else {
                v
            };
            v.max(lo).min(hi)
        })
    }

    fn scene_grid(&mut self, persons: &[PersonSpec<T>]) -> Grid<T> {
        let mut g = self.noise_grid();
        for p in persons {
            g = g.zip_map(&Grid::from_fn(|r, c| p.heat(r, c)), |a, b| a + b);
        }
        self.finish(g)
    }

    pub fn background(&mut self, n_frames: usize) -> Result<Vec<ThermalFrame<T>>> {
        if n_frames == 0 {
            return Err(Error::invalid("n_frames must be >= 1"));
        }
        let step = 1000.0 / self.cfg.sample_rate;
        (0..n_frames)
            .map(|i| {
                let g = self.scene_grid(&[]);
                ThermalFrame::new(g, i as f64 * step)
            })
            .collect()
    }

    pub fn static_scene(&mut self, persons: &[PersonSpec<T>]) -> Result<ThermalFrame<T>> {
        let (lo, hi_r, hi_c) = (T::lit(-0.5), T::lit(ROWS as f64 - 0.5), T::lit(COLS as f64 - 0.5));
        for p in persons {
            p.validate()?;
            let (r, c) = p.position;
            if !(r >= lo && r <= hi_r && c >= lo && c <= hi_c) {
                return Err(Error::invalid(format!("person at ({r}, {c}) outside grid")));
            }
        }
        let g = self.scene_grid(persons);
        ThermalFrame::new(g, 0.0)
    }

    /// One person crossing the field along an axis. Their centre starts on
    /// the entry edge at frame 0 and advances `speed / pitch / rate` cells per
    /// frame; it keeps going (and leaves) if the duration allows.
    pub fn walk(
        &mut self,
        walk: &WalkSpec<T>,
        duration_s: f64,
    ) -> Result<(SceneSequence<T>, MotionEstimate<T>)> {
        walk.person.validate()?;
        if !(walk.speed > T::zero()) {
            return Err(Error::invalid("walking speed must be > 0"));
        }
        if walk.direction == Direction::None {
            return Err(Error::invalid("walk needs a direction"));
        }
        if !(duration_s > 0.0) {
            return Err(Error::invalid("duration must be > 0"));
        }
        let rate = self.cfg.sample_rate;
        let n_frames = ((duration_s * rate).round() as usize).max(1);
        let cells_per_frame = walk.speed.as_f64() / CELL_PITCH_M / rate;
        let horizontal = matches!(walk.direction, Direction::LeftToRight | Direction::RightToLeft);
        let extent = if horizontal { COLS } else { ROWS } as f64;
        let forward = matches!(walk.direction, Direction::LeftToRight | Direction::UpToDown);

        let mut grids = Vec::with_capacity(n_frames);
        for k in 0..n_frames {
            let travelled = cells_per_frame * k as f64;
            let along = if forward {
                -0.5 + travelled
            } else {
                extent - 0.5 - travelled
            };
            let mut p = walk.person;
            if horizontal {
                p.position.1 = T::lit(along);
            } else {
                p.position.0 = T::lit(along);
            }
            grids.push(self.scene_grid(&[p]));
        }
        let seq = SceneSequence::from_grids(grids, rate)?;
        let truth = MotionEstimate {
            direction: walk.direction,
            mean_adjacent_lag: Some(T::lit(1.0 / cells_per_frame)),
            speed: Some(walk.speed),
            confidence: 1.0,
            votes: [0; 4],
        };
        Ok((seq, truth))
    }

    fn random_persons(&mut self, count: usize) -> Vec<PersonSpec<T>> {
        let sep = *SEPARATIONS.choose(&mut self.rng).unwrap();
        let max = (ROWS.min(COLS) - 1) as f64;
        'attempt: loop {
            let mut pos: Vec<(f64, f64)> = Vec::with_capacity(count);
            while pos.len() < count {
                let p = (self.rng.gen_range(0.0..=max), self.rng.gen_range(0.0..=max));
                if pos.iter().any(|q| (p.0 - q.0).hypot(p.1 - q.1) < sep) {
                    continue 'attempt;
                }
                pos.push(p);
            }
            return pos
                .into_iter()
                .map(|(r, c)| {
                    let peak = self.rng.gen_range(PEAK_DELTA_RANGE.0..=PEAK_DELTA_RANGE.1);
                    PersonSpec::new((T::lit(r), T::lit(c)), T::lit(peak))
                })
                .collect();
        }
    }

    /// `per_class` scenes for each occupancy 1..=4, grouped by class, plus a
    /// background batch and its model.
    pub fn corpus_scenes(&mut self, per_class: usize) -> Result<CorpusScenes<T>> {
        if per_class == 0 {
            return Err(Error::invalid("per_class must be >= 1"));
        }
        let background_frames = self.background(CORPUS_BACKGROUND_FRAMES)?;
        let background = build_background(&background_frames)?;
        let mut frames = Vec::with_capacity(per_class * CLASSES.len());
        let mut labels = Vec::with_capacity(per_class * CLASSES.len());
        for &label in &CLASSES {
            for _ in 0..per_class {
                let persons = self.random_persons(label as usize);
                frames.push(self.static_scene(&persons)?);
                labels.push(label);
            }
        }
        Ok(CorpusScenes {
            background_frames,
            background,
            frames,
            labels,
        })
    }
}

pub fn gen_background<T: Scalar>(cfg: &SynthConfig<T>, n_frames: usize) -> Result<Vec<ThermalFrame<T>>> {
    SceneGenerator::new(*cfg)?.background(n_frames)
}

pub fn gen_static_scene<T: Scalar>(
    cfg: &SynthConfig<T>,
    persons: &[PersonSpec<T>],
) -> Result<ThermalFrame<T>> {
    SceneGenerator::new(*cfg)?.static_scene(persons)
}

pub fn gen_walk_sequence<T: Scalar>(
    cfg: &SynthConfig<T>,
    walk: &WalkSpec<T>,
    duration_s: f64,
) -> Result<(SceneSequence<T>, MotionEstimate<T>)> {
    SceneGenerator::new(*cfg)?.walk(walk, duration_s)
}

/// Balanced labelled feature corpus.
pub fn gen_corpus<T: Scalar>(cfg: &SynthConfig<T>, per_class: usize) -> Result<Dataset<T>> {
    SceneGenerator::new(*cfg)?
        .corpus_scenes(per_class)?
        .dataset(&FeatureConfig::default())
}

/// Labels sidecar: `<frame_index>,<label>` per line.
pub fn write_labels(labels: &[ClassLabel]) -> String {
    labels
        .iter()
        .enumerate()
        .map(|(i, l)| format!("{i},{l}\n"))
        .collect()
}

pub fn parse_labels(text: &str) -> Result<Vec<ClassLabel>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |msg: &str| Error::Parse {
            line: i + 1,
            msg: msg.to_string(),
        };
        let (idx, label) = line.split_once(',').ok_or_else(|| bad("expected <index>,<label>"))?;
        let idx: usize = idx.trim().parse().map_err(|_| bad("bad frame index"))?;
        let label: ClassLabel = label.trim().parse().map_err(|_| bad("bad label"))?;
        if idx != out.len() {
            return Err(bad("frame indices must be consecutive from 0"));
        }
        if !CLASSES.contains(&label) {
            return Err(bad("label outside 1..=4"));
        }
        out.push(label);
    }
    Ok(out)
}

/// Walk sidecar: a `#direction,speed_mps` header and one value line.
pub fn write_walk_truth<T: Scalar>(truth: &MotionEstimate<T>) -> String {
    let speed = truth.speed.map_or_else(String::new, |s| s.to_string());
    format!("#direction,speed_mps\n{},{}\n", truth.direction, speed)
}

pub fn parse_walk_truth(text: &str) -> Result<(Direction, f64)> {
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = || Error::Parse {
            line: i + 1,
            msg: "expected <direction>,<speed_mps>".into(),
        };
        let (d, s) = line.split_once(',').ok_or_else(bad)?;
        return Ok((d.trim().parse()?, s.trim().parse().map_err(|_| bad())?));
    }
    Err(Error::Format("empty walk sidecar".into()))
}
