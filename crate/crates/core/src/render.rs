//! Text and portable graymap rendering of 8x8 grids.
//!
//! Values are mapped linearly from the grid's own [min, max] onto the output
//! range; a flat grid maps everything to the lowest level.

use crate::blobs::LabelGrid;
use crate::grid::{Grid, COLS, ROWS};
use crate::scalar::Scalar;

const RAMP: &[u8] = b" .:-=+*#%@";
const LABEL_GLYPHS: &[u8] = b"123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";

fn levels<T: Scalar>(grid: &Grid<T>, n_levels: usize) -> Grid<usize> {
    let (lo, hi) = grid
        .values()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let span = hi - lo;
    grid.map(|v| {
        if !(span > T::zero()) {
            return 0;
        }
        let t = ((v - lo) / span).as_f64();
        ((t * (n_levels - 1) as f64).round() as usize).min(n_levels - 1)
    })
}

/// One character per cell, ten intensity levels, one line per row.
pub fn ascii_heatmap<T: Scalar>(grid: &Grid<T>) -> String {
    let lv = levels(grid, RAMP.len());
    let mut out = String::with_capacity(ROWS * (2 * COLS + 1));
    for row in lv.rows() {
        for &l in row {
            out.push(RAMP[l] as char);
            out.push(RAMP[l] as char);
        }
        out.push('\n');
    }
    out
}

/// `.` for background, then `1`-`9`, `A`-`Z`, `a`-`z` per label.
pub fn ascii_labels(labels: &LabelGrid) -> String {
    let mut out = String::new();
    for row in labels.labels.rows() {
        for &l in row {
            let ch = if l == 0 {
                '.'
            } else {
                LABEL_GLYPHS
                    .get(l as usize - 1)
                    .map_or('#', |&b| b as char)
            };
            out.push(ch);
        }
        out.push('\n');
    }
    out
}

/// Binary (P5) graymap, each cell drawn as a `scale` x `scale` block.
pub fn pgm<T: Scalar>(grid: &Grid<T>, scale: usize) -> Vec<u8> {
    encode_pgm(&levels(grid, 256), scale)
}

/// Labels spread evenly over the gray range, background black.
pub fn pgm_labels(labels: &LabelGrid, scale: usize) -> Vec<u8> {
    let n = labels.n_components.max(1);
    let lv = labels.labels.map(|l| (l as usize * 255) / n);
    encode_pgm(&lv, scale)
}

fn encode_pgm(levels: &Grid<usize>, scale: usize) -> Vec<u8> {
    let scale = scale.max(1);
    let (w, h) = (COLS * scale, ROWS * scale);
    let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
    for row in levels.rows() {
        for _ in 0..scale {
            for &v in row {
                out.extend(std::iter::repeat_n(v as u8, scale));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blobs::{label_mask, Connectivity};

    #[test]
    fn flat_grid_renders_uniformly() {
        let g = Grid::filled(97.0f64);
        let s = ascii_heatmap(&g);
        assert!(s.lines().all(|l| l == "                "));
        let img = pgm(&g, 2);
        assert!(img.starts_with(b"P5\n16 16\n255\n"));
        assert!(img[13..].iter().all(|&b| b == 0));
        assert_eq!(img.len(), 13 + 256);
    }

    #[test]
    fn extremes_map_to_ends_of_ramp() {
        let mut g = Grid::filled(0.0f64);
        g[(0, 0)] = 10.0;
        let s = ascii_heatmap(&g);
        assert!(s.starts_with("@@ "));
        assert_eq!(pgm(&g, 1)[b"P5\n8 8\n255\n".len()], 255);
    }

    #[test]
    fn labels_get_distinct_glyphs() {
        let mut m = Grid::filled(false);
        m[(0, 0)] = true;
        m[(0, 3)] = true;
        m[(7, 7)] = true;
        let s = ascii_labels(&label_mask(&m, Connectivity::Eight));
        assert_eq!(s.lines().next().unwrap(), "1..2....");
        assert_eq!(s.lines().last().unwrap(), ".......3");
    }
}
