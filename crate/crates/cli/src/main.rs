use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use thermal_track::blobs::{extract_features, label_components, Connectivity, FeatureConfig};
use thermal_track::classify::{
    cross_validate, default_c_grid, default_gamma_grid, evaluate, load_model, save_model,
    train_svm, ClassLabel, Dataset, SvmModel, SvmParams,
};
use thermal_track::frames::{
    build_background, parse_sequence, subtract_background, write_sequence, BackgroundModel,
    SceneSequence,
};
use thermal_track::motion::{delay_analysis, infer_direction, pixel_series, Direction, MotionConfig};
use thermal_track::render::{ascii_heatmap, ascii_labels, pgm, pgm_labels};
use thermal_track::synth::{
    parse_labels, write_labels, write_walk_truth, PersonSpec, SceneGenerator, SynthConfig,
    WalkSpec, CORPUS_BACKGROUND_FRAMES,
};
use thermal_track::Cell;

mod output;

use output::{check_input, check_output_dir, check_output_file, read, Outputs};

#[derive(Parser)]
#[command(
    name = "thermal-track",
    version,
    about = "Occupancy counting and walking-direction estimation from 8x8 thermal frames"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a labelled corpus, a walk, a static scene or background frames
    Synth(SynthArgs),
    /// Build a background model from person-free frames
    Background(BackgroundArgs),
    /// Train the occupancy classifier
    Train(TrainArgs),
    /// Predict occupancy for every frame of a file
    Predict(PredictArgs),
    /// Score a model on labelled frames
    Evaluate(EvaluateArgs),
    /// Estimate walking direction and speed from a sequence
    Motion(MotionArgs),
    /// Draw a frame, its foreground or its component labels
    Render(RenderArgs),
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

fn non_negative(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a number >= 0, got {s:?}")),
    }
}

fn parse_cell(s: &str) -> std::result::Result<Cell, String> {
    let bad = || format!("expected ROW,COL with both in 0..8, got {s:?}");
    let (r, c) = s.split_once(',').ok_or_else(bad)?;
    let r: usize = r.trim().parse().map_err(|_| bad())?;
    let c: usize = c.trim().parse().map_err(|_| bad())?;
    if r >= 8 || c >= 8 {
        return Err(bad());
    }
    Ok((r, c))
}

fn parse_person(s: &str) -> std::result::Result<PersonSpec<f64>, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|f| f.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| format!("expected ROW,COL,PEAK, got {s:?}"))?;
    match v[..] {
        [r, c, peak] if peak > 0.0 => Ok(PersonSpec::new((r, c), peak)),
        _ => Err(format!("expected ROW,COL,PEAK with PEAK > 0, got {s:?}")),
    }
}

fn parse_grid_list(s: &str) -> Result<Vec<f64>> {
    let vals = s
        .split(',')
        .map(|f| positive(f.trim()).map_err(anyhow::Error::msg))
        .collect::<Result<Vec<f64>>>()?;
    Ok(vals)
}

#[derive(Args)]
#[command(group(
    ArgGroup::new("mode")
        .required(true)
        .args(["corpus", "walk", "static_frames", "background_frames"])
))]
struct SynthArgs {
    /// Balanced corpus: frames.csv, labels.csv and background.csv in the output directory
    #[arg(long)]
    corpus: bool,
    /// Training scenes per occupancy class
    #[arg(long, default_value_t = 150)]
    per_class: usize,
    /// Extra held-out scenes per class, written to test_frames.csv / test_labels.csv
    #[arg(long, default_value_t = 0)]
    test_per_class: usize,
    /// One person walking across the field: left_to_right, right_to_left, up_to_down or down_to_up
    #[arg(long, value_name = "DIRECTION")]
    walk: Option<Direction>,
    /// Walking speed in m/s
    #[arg(long, default_value_t = 2.5, value_parser = positive)]
    speed: f64,
    /// Walk length in seconds
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    duration: f64,
    /// Head temperature over background for the walker, F
    #[arg(long, default_value_t = 12.0, value_parser = positive)]
    peak: f64,
    /// Walker's position across the walking axis, in cells
    #[arg(long, default_value_t = 3.5)]
    cross: f64,
    /// Sequence of this many frames with people standing still (see --person)
    #[arg(long = "static", value_name = "FRAMES")]
    static_frames: Option<usize>,
    /// Person for --static, repeatable
    #[arg(long = "person", value_name = "ROW,COL,PEAK", value_parser = parse_person)]
    persons: Vec<PersonSpec<f64>>,
    /// Person-free frames only
    #[arg(long = "background-frames", value_name = "FRAMES")]
    background_frames: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Background temperature, F
    #[arg(long, default_value_t = 97.0)]
    bg_mean: f64,
    /// Per-cell background noise std, F
    #[arg(long, default_value_t = 5.0, value_parser = non_negative)]
    bg_std: f64,
    /// Keep full precision instead of 0.25 F steps
    #[arg(long)]
    no_quantize: bool,
    #[arg(long, default_value_t = 10.0, value_parser = positive)]
    sample_rate: f64,
    /// Output directory for --corpus, output file otherwise
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct BackgroundArgs {
    /// Person-free frames
    #[arg(long)]
    frames: PathBuf,
    #[arg(long, default_value_t = 10.0, value_parser = positive)]
    sample_rate: f64,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConnectivityArg {
    #[value(name = "4")]
    Four,
    #[value(name = "8")]
    Eight,
}

#[derive(Args)]
struct FeatureArgs {
    /// Activity threshold, F; defaults to the background model's own
    #[arg(long, value_parser = non_negative)]
    threshold: Option<f64>,
    /// Multiplier applied to the raw peak count
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    correction_factor: f64,
    #[arg(long, value_enum, default_value = "8")]
    connectivity: ConnectivityArg,
    #[arg(long, default_value_t = 10.0, value_parser = positive)]
    sample_rate: f64,
}

impl FeatureArgs {
    fn config(&self) -> FeatureConfig {
        FeatureConfig {
            connectivity: match self.connectivity {
                ConnectivityArg::Four => Connectivity::Four,
                ConnectivityArg::Eight => Connectivity::Eight,
            },
            correction_factor: self.correction_factor,
        }
    }

    fn threshold(&self, bg: &BackgroundModel<f64>) -> f64 {
        self.threshold.unwrap_or_else(|| bg.default_threshold())
    }
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    frames: PathBuf,
    #[arg(long)]
    labels: PathBuf,
    #[arg(long)]
    background: PathBuf,
    #[command(flatten)]
    features: FeatureArgs,
    /// Fixed penalty; skips cross-validation (needs --gamma)
    #[arg(long = "C", value_parser = positive, requires = "gamma")]
    c: Option<f64>,
    /// Fixed RBF width; skips cross-validation (needs --C)
    #[arg(long, value_parser = positive, requires = "c")]
    gamma: Option<f64>,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    /// Comma-separated C values searched by cross-validation
    #[arg(long, value_name = "LIST")]
    c_grid: Option<String>,
    /// Comma-separated gamma values searched by cross-validation
    #[arg(long, value_name = "LIST")]
    gamma_grid: Option<String>,
    /// Solver stopping tolerance on the KKT violation
    #[arg(long, default_value_t = 1e-3, value_parser = positive)]
    tol: f64,
    /// Seeds the fold assignment
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Model file to write
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    frames: PathBuf,
    #[arg(long)]
    background: PathBuf,
    #[command(flatten)]
    features: FeatureArgs,
    /// `index,label` lines; printed when absent
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    frames: PathBuf,
    #[arg(long)]
    labels: PathBuf,
    #[arg(long)]
    background: PathBuf,
    #[command(flatten)]
    features: FeatureArgs,
    /// Also write a key=value report with a [confusion] block
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct MotionArgs {
    #[arg(long)]
    frames: PathBuf,
    #[arg(long)]
    background: PathBuf,
    #[arg(long, default_value_t = 10.0, value_parser = positive)]
    sample_rate: f64,
    /// Cells must exceed this delta at some frame to take part; defaults to
    /// the background model's threshold
    #[arg(long, value_parser = non_negative)]
    threshold: Option<f64>,
    /// Let every cell take part
    #[arg(long, conflicts_with = "threshold")]
    no_gate: bool,
    /// Largest lag searched, in samples (default: half the sequence)
    #[arg(long)]
    max_lag: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    corr_threshold: f64,
    /// Largest adjacent-cell lag that still votes, in samples
    #[arg(long, default_value_t = 2)]
    delay_threshold: i32,
    #[arg(long, default_value_t = 3)]
    min_votes: usize,
    /// Delay matrix of every cell against this reference (0-based)
    #[arg(long, value_name = "ROW,COL", value_parser = parse_cell)]
    dump_delay: Option<Cell>,
    /// Where the delay matrix goes; printed when absent
    #[arg(short, long, requires = "dump_delay")]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum RenderMode {
    Frame,
    Foreground,
    Labels,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum RenderFormat {
    Ascii,
    Pgm,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    frames: PathBuf,
    /// 0-based frame index
    #[arg(long, default_value_t = 0)]
    index: usize,
    /// Needed for foreground and labels
    #[arg(long)]
    background: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = RenderMode::Frame)]
    mode: RenderMode,
    #[arg(long, value_enum, default_value_t = RenderFormat::Ascii)]
    format: RenderFormat,
    /// Pixels per cell in PGM output
    #[arg(long, default_value_t = 8)]
    scale: usize,
    #[command(flatten)]
    features: FeatureArgs,
    /// Required for PGM; ASCII is printed when absent
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth(a) => synth(a),
        Command::Background(a) => background(a),
        Command::Train(a) => train(a),
        Command::Predict(a) => predict(a),
        Command::Evaluate(a) => evaluate_cmd(a),
        Command::Motion(a) => motion(a),
        Command::Render(a) => render(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", format!("{e:#}").replace('\n', " "));
            ExitCode::FAILURE
        }
    }
}

fn load_frames(path: &Path, sample_rate: f64) -> Result<SceneSequence<f64>> {
    parse_sequence(&read(path)?, sample_rate).with_context(|| path.display().to_string())
}

fn load_background(path: &Path) -> Result<BackgroundModel<f64>> {
    BackgroundModel::parse(&read(path)?).with_context(|| path.display().to_string())
}

fn load_labels(path: &Path) -> Result<Vec<ClassLabel>> {
    parse_labels(&read(path)?).with_context(|| path.display().to_string())
}

fn load_svm(path: &Path) -> Result<SvmModel<f64>> {
    load_model(&read(path)?).with_context(|| path.display().to_string())
}

fn feature_dataset(
    seq: &SceneSequence<f64>,
    labels: &[ClassLabel],
    bg: &BackgroundModel<f64>,
    features: &FeatureArgs,
) -> Result<Dataset<f64>> {
    if seq.len() != labels.len() {
        bail!("{} frames but {} labels", seq.len(), labels.len());
    }
    let (t, cfg) = (features.threshold(bg), features.config());
    let mut data = Dataset::default();
    for (f, &l) in seq.frames().iter().zip(labels) {
        let fg = subtract_background(f, bg, t)?;
        data.push(&extract_features(&fg, &cfg), l)?;
    }
    Ok(data)
}

fn synth(a: SynthArgs) -> Result<()> {
    if a.corpus {
        check_output_dir(&a.output)?;
    } else {
        check_output_file(&a.output)?;
    }
    let cfg = SynthConfig {
        bg_mean: a.bg_mean,
        bg_std: a.bg_std,
        sample_rate: a.sample_rate,
        seed: a.seed,
        quantize: !a.no_quantize,
        ..SynthConfig::default()
    };
    let mut gen = SceneGenerator::new(cfg)?;
    let mut out = Outputs::default();

    if a.corpus {
        if a.per_class == 0 {
            bail!("--per-class must be >= 1");
        }
        let scenes = gen.corpus_scenes(a.per_class + a.test_per_class)?;
        let mut seen = [0usize; 4];
        let (mut train, mut test) = ((vec![], vec![]), (vec![], vec![]));
        for (f, &l) in scenes.frames.iter().zip(&scenes.labels) {
            let k = &mut seen[l as usize - 1];
            let side = if *k < a.per_class { &mut train } else { &mut test };
            side.0.push(*f);
            side.1.push(l);
            *k += 1;
        }
        out.add(a.output.join("frames.csv"), write_sequence(&train.0));
        out.add(a.output.join("labels.csv"), write_labels(&train.1));
        out.add(a.output.join("background.csv"), scenes.background.to_file_string());
        if a.test_per_class > 0 {
            out.add(a.output.join("test_frames.csv"), write_sequence(&test.0));
            out.add(a.output.join("test_labels.csv"), write_labels(&test.1));
        }
        out.commit()?;
        println!(
            "corpus: {} training scenes, {} test scenes, {} background frames -> {}",
            train.0.len(),
            test.0.len(),
            CORPUS_BACKGROUND_FRAMES,
            a.output.display()
        );
    } else if let Some(n) = a.background_frames {
        let frames = gen.background(n)?;
        out.add(&a.output, write_sequence(&frames));
        out.commit()?;
        println!("background: {n} frames -> {}", a.output.display());
    } else {
        let bg = build_background(&gen.background(CORPUS_BACKGROUND_FRAMES)?)?;
        let (seq, what) = if let Some(direction) = a.walk {
            let walk = WalkSpec {
                direction,
                speed: a.speed,
                person: PersonSpec::new((a.cross, a.cross), a.peak),
            };
            let (seq, truth) = gen.walk(&walk, a.duration)?;
            out.add(a.output.with_extension("truth.csv"), write_walk_truth(&truth));
            (seq, format!("{direction} walk at {} m/s", a.speed))
        } else {
            let n = a.static_frames.unwrap_or(0);
            if n == 0 {
                bail!("--static needs at least 1 frame");
            }
            let frames = (0..n)
                .map(|_| gen.static_scene(&a.persons).map(|f| *f.cells()))
                .collect::<thermal_track::Result<Vec<_>>>()?;
            let seq = SceneSequence::from_grids(frames, a.sample_rate)?;
            (seq, format!("static scene with {} people", a.persons.len()))
        };
        out.add(&a.output, write_sequence(seq.frames()));
        out.add(a.output.with_extension("background.csv"), bg.to_file_string());
        out.commit()?;
        println!("{what}: {} frames -> {}", seq.len(), a.output.display());
    }
    Ok(())
}

fn background(a: BackgroundArgs) -> Result<()> {
    check_input(&a.frames)?;
    check_output_file(&a.output)?;
    let seq = load_frames(&a.frames, a.sample_rate)?;
    let bg = build_background(seq.frames())?;
    let mut out = Outputs::default();
    out.add(&a.output, bg.to_file_string());
    out.commit()?;
    println!(
        "background model from {} frames, default threshold {:.4} F -> {}",
        bg.n_frames(),
        bg.default_threshold(),
        a.output.display()
    );
    Ok(())
}

fn train(a: TrainArgs) -> Result<()> {
    for p in [&a.frames, &a.labels, &a.background] {
        check_input(p)?;
    }
    check_output_file(&a.output)?;
    let c_grid = a.c_grid.as_deref().map(parse_grid_list).transpose()?;
    let gamma_grid = a.gamma_grid.as_deref().map(parse_grid_list).transpose()?;

    let bg = load_background(&a.background)?;
    let seq = load_frames(&a.frames, a.features.sample_rate)?;
    let labels = load_labels(&a.labels)?;
    let data = feature_dataset(&seq, &labels, &bg, &a.features)?;
    if data.classes().len() < 2 {
        bail!("training labels contain a single class; need at least two");
    }

    let (c, gamma) = match (a.c, a.gamma) {
        (Some(c), Some(g)) => {
            println!("C={c} gamma={g} (fixed, no cross-validation)");
            (c, g)
        }
        _ => {
            let cv = cross_validate(
                &data,
                &c_grid.unwrap_or_else(default_c_grid),
                &gamma_grid.unwrap_or_else(default_gamma_grid),
                a.folds,
                a.seed,
                a.tol,
            )?;
            println!("C={} gamma={} (cross-validated, {} folds)", cv.best_c, cv.best_gamma, a.folds);
            let folds: Vec<String> = cv.fold_accuracies.iter().map(|v| format!("{v:.4}")).collect();
            println!("fold accuracies {}", folds.join(" "));
            println!("cv accuracy {:.4}", cv.mean_accuracy);
            (cv.best_c, cv.best_gamma)
        }
    };
    let model = train_svm(&data, &SvmParams::new(c, gamma).with_tol(a.tol))?;
    let fit = evaluate(&model, &data)?;
    println!(
        "training accuracy {:.4}, {} support vectors",
        fit.accuracy,
        model.n_support()
    );
    let mut out = Outputs::default();
    out.add(&a.output, save_model(&model));
    out.commit()?;
    println!("model -> {}", a.output.display());
    Ok(())
}

fn predict(a: PredictArgs) -> Result<()> {
    for p in [&a.model, &a.frames, &a.background] {
        check_input(p)?;
    }
    if let Some(o) = &a.output {
        check_output_file(o)?;
    }
    let model = load_svm(&a.model)?;
    let bg = load_background(&a.background)?;
    let seq = load_frames(&a.frames, a.features.sample_rate)?;
    let (t, cfg) = (a.features.threshold(&bg), a.features.config());
    let mut text = String::new();
    for (i, f) in seq.frames().iter().enumerate() {
        let fv = extract_features(&subtract_background(f, &bg, t)?, &cfg);
        text.push_str(&format!("{i},{}\n", model.predict(&fv)));
    }
    match &a.output {
        Some(o) => {
            let mut out = Outputs::default();
            out.add(o, text);
            out.commit()?;
            println!("{} predictions -> {}", seq.len(), o.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn evaluate_cmd(a: EvaluateArgs) -> Result<()> {
    for p in [&a.model, &a.frames, &a.labels, &a.background] {
        check_input(p)?;
    }
    if let Some(r) = &a.report {
        check_output_file(r)?;
    }
    let model = load_svm(&a.model)?;
    let bg = load_background(&a.background)?;
    let seq = load_frames(&a.frames, a.features.sample_rate)?;
    let labels = load_labels(&a.labels)?;
    let data = feature_dataset(&seq, &labels, &bg, &a.features)?;
    let report = evaluate(&model, &data)?;
    if let Some(r) = &a.report {
        let mut out = Outputs::default();
        out.add(r, report.to_structured());
        out.commit()?;
    }
    print!("{}", report.to_text());
    Ok(())
}

fn motion(a: MotionArgs) -> Result<()> {
    check_input(&a.frames)?;
    check_input(&a.background)?;
    if let Some(o) = &a.output {
        check_output_file(o)?;
    }
    let bg = load_background(&a.background)?;
    let seq = load_frames(&a.frames, a.sample_rate)?;
    if seq.len() < 2 {
        bail!("motion analysis needs at least 2 frames, {} has {}", a.frames.display(), seq.len());
    }
    let cfg = MotionConfig {
        max_lag: a.max_lag,
        corr_threshold: a.corr_threshold,
        delay_threshold: a.delay_threshold,
        min_votes: a.min_votes,
        activity_threshold: if a.no_gate {
            None
        } else {
            Some(a.threshold.unwrap_or_else(|| bg.default_threshold()))
        },
        ..MotionConfig::default()
    };
    let series = pixel_series(&seq, &bg)?;
    let est = infer_direction(&series, &cfg)?;
    print!("{}", est.to_text());
    if let Some(reference) = a.dump_delay {
        let d = delay_analysis(&series, reference, &cfg)?;
        let csv = d.delay.to_csv_matrix();
        match &a.output {
            Some(o) => {
                let mut out = Outputs::default();
                out.add(o, csv);
                out.commit()?;
                println!("delay matrix -> {}", o.display());
            }
            None => {
                println!(
                    "delay matrix vs ({},{}), sentinel {}",
                    reference.0,
                    reference.1,
                    d.sentinel()
                );
                print!("{csv}");
            }
        }
    }
    Ok(())
}

fn render(a: RenderArgs) -> Result<()> {
    check_input(&a.frames)?;
    if let Some(b) = &a.background {
        check_input(b)?;
    }
    match &a.output {
        Some(o) => check_output_file(o)?,
        None if a.format == RenderFormat::Pgm => bail!("PGM output needs -o/--output"),
        None => {}
    }
    if a.mode != RenderMode::Frame && a.background.is_none() {
        bail!("rendering the foreground or labels needs --background");
    }
    let seq = load_frames(&a.frames, a.features.sample_rate)?;
    let Some(frame) = seq.frames().get(a.index) else {
        bail!(
            "frame index {} out of range: {} has {} frames",
            a.index,
            a.frames.display(),
            seq.len()
        );
    };
    let fg = match &a.background {
        Some(b) => {
            let bg = load_background(b)?;
            Some(subtract_background(frame, &bg, a.features.threshold(&bg))?)
        }
        None => None,
    };
    let bytes: Vec<u8> = match (a.mode, a.format, &fg) {
        (RenderMode::Frame, RenderFormat::Ascii, _) => ascii_heatmap(frame.cells()).into_bytes(),
        (RenderMode::Frame, RenderFormat::Pgm, _) => pgm(frame.cells(), a.scale),
        (RenderMode::Foreground, RenderFormat::Ascii, Some(fg)) => {
            ascii_heatmap(fg.values()).into_bytes()
        }
        (RenderMode::Foreground, RenderFormat::Pgm, Some(fg)) => pgm(fg.values(), a.scale),
        (RenderMode::Labels, format, Some(fg)) => {
            let (labels, _) = label_components(fg, a.features.config().connectivity);
            if format == RenderFormat::Ascii {
                ascii_labels(&labels).into_bytes()
            } else {
                pgm_labels(&labels, a.scale)
            }
        }
        (_, _, None) => unreachable!("background checked above"),
    };
    match &a.output {
        Some(o) => {
            let mut out = Outputs::default();
            out.add(o, bytes);
            out.commit()?;
        }
        None => print!("{}", String::from_utf8(bytes).expect("ascii output")),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_argument_bounds() {
        assert_eq!(parse_cell("1,4"), Ok((1, 4)));
        assert!(parse_cell("8,0").is_err());
        assert!(parse_cell("3").is_err());
    }

    #[test]
    fn person_argument() {
        let p = parse_person("2.5,3,12").unwrap();
        assert_eq!(p.position, (2.5, 3.0));
        assert_eq!(p.peak_delta, 12.0);
        assert!(parse_person("1,2,0").is_err());
        assert!(parse_person("1,2").is_err());
    }

    #[test]
    fn grid_list_rejects_non_positive() {
        assert_eq!(parse_grid_list("0.5, 2").unwrap(), vec![0.5, 2.0]);
        assert!(parse_grid_list("1,0").is_err());
    }

    #[test]
    fn command_line_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
