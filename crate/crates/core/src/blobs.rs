//! Connected-component labelling, local peak counting and the 4-D scene
//! descriptor.

use crate::frames::ForegroundFrame;
use crate::grid::{Cell, Grid, COLS, ROWS};
use crate::scalar::Scalar;

/// Which neighbours of a cell count as connected to it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Connectivity {
    Four,
    #[default]
    Eight,
}

/// Per-cell component labels; 0 is background, components are `1..=n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabelGrid {
    pub labels: Grid<u32>,
    pub n_components: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Blob<T> {
    pub label: u32,
    pub size: usize,
    pub cells: Vec<Cell>,
    /// Largest foreground delta inside the blob.
    pub peak_value: T,
}

/// Minimal union-find over provisional labels.
struct Equivalences {
    parent: Vec<u32>,
}

impl Equivalences {
    fn new() -> Self {
        // slot 0 is the background label
        Equivalences { parent: vec![0] }
    }

    fn make(&mut self) -> u32 {
        let l = self.parent.len() as u32;
        self.parent.push(l);
        l
    }

    fn find(&mut self, mut l: u32) -> u32 {
        while self.parent[l as usize] != l {
            let up = self.parent[self.parent[l as usize] as usize];
            self.parent[l as usize] = up;
            l = up;
        }
        l
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // keep the smaller label as root
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }
}

/// Two-pass labelling of an activity mask.
///
/// The first raster pass looks at the already-visited neighbours (left, and
/// above-left/above/above-right for 8-connectivity) and records label
/// equivalences; the second pass resolves them. Final labels are dense and
/// numbered in order of first appearance in raster order.
pub fn label_mask(mask: &Grid<bool>, connectivity: Connectivity) -> LabelGrid {
    let mut provisional = Grid::filled(0u32);
    let mut eq = Equivalences::new();

    for r in 0..ROWS {
        for c in 0..COLS {
            if !mask[(r, c)] {
                continue;
            }
            let mut prior = [0u32; 4];
            let mut n = 0;
            let mut push = |cell: Cell| {
                let l = provisional[cell];
                if l != 0 {
                    prior[n] = l;
                    n += 1;
                }
            };
            if c > 0 {
                push((r, c - 1));
            }
            if r > 0 {
                push((r - 1, c));
                if connectivity == Connectivity::Eight {
                    if c > 0 {
                        push((r - 1, c - 1));
                    }
                    if c + 1 < COLS {
                        push((r - 1, c + 1));
                    }
                }
            }
            let label = match prior[..n].iter().min() {
                None => eq.make(),
                Some(&m) => {
                    for &l in &prior[..n] {
                        eq.union(m, l);
                    }
                    m
                }
            };
            provisional[(r, c)] = label;
        }
    }

    let mut dense = vec![0u32; eq.parent.len()];
    let mut next = 0u32;
    let mut labels = Grid::filled(0u32);
    for r in 0..ROWS {
        for c in 0..COLS {
            let l = provisional[(r, c)];
            if l == 0 {
                continue;
            }
            let root = eq.find(l) as usize;
            if dense[root] == 0 {
                next += 1;
                dense[root] = next;
            }
            labels[(r, c)] = dense[root];
        }
    }
    LabelGrid {
        labels,
        n_components: next as usize,
    }
}

/// Labels the active cells of `fg` and returns the blobs, largest first
/// (ties by lower label).
pub fn label_components<T: Scalar>(
    fg: &ForegroundFrame<T>,
    connectivity: Connectivity,
) -> (LabelGrid, Vec<Blob<T>>) {
    let grid = label_mask(fg.active(), connectivity);
    let mut blobs: Vec<Blob<T>> = (1..=grid.n_components as u32)
        .map(|label| Blob {
            label,
            size: 0,
            cells: Vec::new(),
            peak_value: T::neg_infinity(),
        })
        .collect();
    for (cell, l) in grid.labels.indexed() {
        if l == 0 {
            continue;
        }
        let b = &mut blobs[l as usize - 1];
        b.size += 1;
        b.cells.push(cell);
        b.peak_value = b.peak_value.max(fg.values()[cell]);
    }
    blobs.sort_by(|a, b| b.size.cmp(&a.size).then(a.label.cmp(&b.label)));
    (grid, blobs)
}

/// Cells that are active and whose delta exceeds the global maximum delta
/// divided by 1.2.
pub fn peak_qualified<T: Scalar>(fg: &ForegroundFrame<T>) -> Grid<bool> {
    if fg.active_count() == 0 {
        return Grid::filled(false);
    }
    let global_max = fg
        .values()
        .values()
        .fold(T::neg_infinity(), |m, v| m.max(v));
    let cut = global_max / T::lit(1.2);
    fg.values()
        .zip_map(fg.active(), |v, a| a && v > cut)
}

/// Number of local peaks.
///
/// Hot cells sharing a 2x2 window belong to the same person, so qualified
/// cells are merged as 8-connected groups and each group counts once. The
/// raw count is scaled by `correction_factor` and rounded.
pub fn detect_peaks<T: Scalar>(fg: &ForegroundFrame<T>, correction_factor: f64) -> usize {
    assert!(correction_factor > 0.0, "correction factor must be positive");
    let qualified = peak_qualified(fg);
    let raw = label_mask(&qualified, Connectivity::Eight).n_components;
    (raw as f64 * correction_factor).round() as usize
}

/// Per-scene descriptor fed to the classifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct FeatureVector {
    pub active_pixels: usize,
    pub n_components: usize,
    pub max_component_size: usize,
    pub n_peaks: usize,
}

impl FeatureVector {
    pub fn to_array<T: Scalar>(&self) -> [T; 4] {
        [
            T::from_count(self.active_pixels),
            T::from_count(self.n_components),
            T::from_count(self.max_component_size),
            T::from_count(self.n_peaks),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureConfig {
    pub connectivity: Connectivity,
    pub correction_factor: f64,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            connectivity: Connectivity::Eight,
            correction_factor: 1.0,
        }
    }
}

pub fn extract_features<T: Scalar>(fg: &ForegroundFrame<T>, cfg: &FeatureConfig) -> FeatureVector {
    let active_pixels = fg.active_count();
    if active_pixels == 0 {
        return FeatureVector::default();
    }
    let (grid, blobs) = label_components(fg, cfg.connectivity);
    FeatureVector {
        active_pixels,
        n_components: grid.n_components,
        max_component_size: blobs.first().map_or(0, |b| b.size),
        n_peaks: detect_peaks(fg, cfg.correction_factor),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::neighbours;
    use proptest::prelude::*;

    /// Breadth-first flood fill, independent of the union-find labelling.
    fn flood_fill_partition(mask: &Grid<bool>, connectivity: Connectivity) -> Vec<Vec<Cell>> {
        let mut seen = Grid::filled(false);
        let mut parts = Vec::new();
        for (start, on) in mask.indexed() {
            if !on || seen[start] {
                continue;
            }
            let mut part = vec![];
            let mut queue = std::collections::VecDeque::from([start]);
            seen[start] = true;
            while let Some(cell) = queue.pop_front() {
                part.push(cell);
                for n in neighbours(cell, connectivity == Connectivity::Eight) {
                    if mask[n] && !seen[n] {
                        seen[n] = true;
                        queue.push_back(n);
                    }
                }
            }
            part.sort_unstable();
            parts.push(part);
        }
        parts.sort();
        parts
    }

    /// Partition induced by a label grid, same canonical form as the flood fill.
    fn label_partition(grid: &LabelGrid) -> Vec<Vec<Cell>> {
        let mut parts = vec![Vec::new(); grid.n_components];
        for (cell, l) in grid.labels.indexed() {
            if l > 0 {
                parts[l as usize - 1].push(cell);
            }
        }
        for p in &mut parts {
            p.sort_unstable();
        }
        parts.sort();
        parts
    }

    fn mask(cells: &[Cell]) -> Grid<bool> {
        let mut m = Grid::filled(false);
        for &c in cells {
            m[c] = true;
        }
        m
    }

    fn fg_from(deltas: &[(Cell, f64)], threshold: f64) -> ForegroundFrame<f64> {
        let mut g = Grid::filled(0.0);
        for &(c, v) in deltas {
            g[c] = v;
        }
        ForegroundFrame::from_deltas(g, threshold).unwrap()
    }

    #[test]
    fn empty_mask_has_no_components() {
        let fg = ForegroundFrame::from_mask(&Grid::filled(false), 1.0f64);
        let (grid, blobs) = label_components(&fg, Connectivity::Eight);
        assert_eq!(grid.n_components, 0);
        assert!(blobs.is_empty());
    }

    #[test]
    fn diagonal_neighbours_join_under_eight_connectivity() {
        let m = mask(&[(0, 0), (1, 1)]);
        assert_eq!(label_mask(&m, Connectivity::Eight).n_components, 1);
        assert_eq!(label_mask(&m, Connectivity::Four).n_components, 2);
    }

    #[test]
    fn u_shape_needs_equivalence_resolution() {
        // two arms that only meet on the bottom row
        let m = mask(&[(0, 0), (1, 0), (2, 0), (2, 1), (2, 2), (1, 2), (0, 2)]);
        let g = label_mask(&m, Connectivity::Four);
        assert_eq!(g.n_components, 1);
        assert!(m.indexed().filter(|&(_, on)| on).all(|(c, _)| g.labels[c] == 1));
    }

    #[test]
    fn anti_diagonal_above_right() {
        let m = mask(&[(0, 5), (1, 4), (2, 3)]);
        assert_eq!(label_mask(&m, Connectivity::Eight).n_components, 1);
    }

    #[test]
    fn blobs_sorted_by_size_then_label() {
        let fg = ForegroundFrame::from_mask(
            &mask(&[(0, 0), (0, 4), (0, 5), (7, 7), (6, 6), (5, 0)]),
            2.0f64,
        );
        let (grid, blobs) = label_components(&fg, Connectivity::Eight);
        assert_eq!(grid.n_components, 4);
        let order: Vec<(usize, u32)> = blobs.iter().map(|b| (b.size, b.label)).collect();
        assert_eq!(order, vec![(2, 2), (2, 4), (1, 1), (1, 3)]);
        assert_eq!(blobs[0].cells, vec![(0, 4), (0, 5)]);
        assert_eq!(blobs[0].peak_value, 2.0);
    }

    #[test]
    fn peaks_of_inactive_frame() {
        let fg = fg_from(&[((1, 1), 3.0)], 5.0);
        assert_eq!(detect_peaks(&fg, 1.0), 0);
    }

    #[test]
    fn lone_global_max_is_one_peak() {
        let fg = fg_from(&[((4, 4), 16.0)], 4.0);
        assert_eq!(detect_peaks(&fg, 1.0), 1);
    }

    #[test]
    fn separated_vs_adjacent_qualified_cells() {
        // brute force: the only qualified cells are the two hot ones
        let far = fg_from(&[((2, 2), 15.0), ((6, 6), 14.0)], 4.0);
        assert_eq!(detect_peaks(&far, 1.0), 2);
        let near = fg_from(&[((2, 2), 15.0), ((2, 3), 14.0)], 4.0);
        assert_eq!(detect_peaks(&near, 1.0), 1);
    }

    #[test]
    fn correction_factor_scales_and_rounds() {
        let fg = fg_from(&[((0, 0), 10.0), ((0, 4), 10.0), ((4, 0), 10.0)], 1.0);
        assert_eq!(detect_peaks(&fg, 1.0), 3);
        assert_eq!(detect_peaks(&fg, 0.5), 2);
        assert_eq!(detect_peaks(&fg, 2.0), 6);
    }

    #[test]
    fn features_of_empty_mask() {
        let fg = ForegroundFrame::from_mask(&Grid::filled(false), 1.0f64);
        assert_eq!(
            extract_features(&fg, &FeatureConfig::default()),
            FeatureVector::default()
        );
    }

    #[test]
    fn features_of_two_by_two_block() {
        let fg = fg_from(
            &[((3, 3), 12.0), ((3, 4), 6.0), ((4, 3), 6.0), ((4, 4), 5.0)],
            4.0,
        );
        let fv = extract_features(&fg, &FeatureConfig::default());
        assert_eq!(
            fv,
            FeatureVector {
                active_pixels: 4,
                n_components: 1,
                max_component_size: 4,
                n_peaks: 1
            }
        );
    }

    fn arb_mask() -> impl Strategy<Value = Grid<bool>> {
        (0.05f64..0.6, proptest::collection::vec(0.0f64..1.0, 64)).prop_map(|(density, u)| {
            Grid::from_row_major(&u.iter().map(|&x| x < density).collect::<Vec<_>>()).unwrap()
        })
    }

    fn arb_fg() -> impl Strategy<Value = ForegroundFrame<f64>> {
        (proptest::collection::vec(-5.0f64..20.0, 64), 0.0f64..8.0).prop_map(|(v, t)| {
            ForegroundFrame::from_deltas(Grid::from_row_major(&v).unwrap(), t).unwrap()
        })
    }

    proptest! {
        #[test]
        fn labels_dense_and_match_flood_fill(m in arb_mask(), four in any::<bool>()) {
            let conn = if four { Connectivity::Four } else { Connectivity::Eight };
            let g = label_mask(&m, conn);
            for l in 1..=g.n_components as u32 {
                prop_assert!(g.labels.values().any(|x| x == l));
            }
            prop_assert_eq!(label_partition(&g), flood_fill_partition(&m, conn));
        }

        #[test]
        fn blob_sizes_sum_to_active(fg in arb_fg()) {
            let (_, blobs) = label_components(&fg, Connectivity::Eight);
            prop_assert_eq!(blobs.iter().map(|b| b.size).sum::<usize>(), fg.active_count());
            let fv = extract_features(&fg, &FeatureConfig::default());
            prop_assert!(fv.max_component_size <= fv.active_pixels);
            prop_assert!(fv.n_components <= fv.active_pixels);
            prop_assert!(fv.n_peaks <= fv.active_pixels);
        }
    }
}
