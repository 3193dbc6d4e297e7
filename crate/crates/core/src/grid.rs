//! Fixed 8x8 cell grid shared by frames, masks, label maps and delay matrices.

use std::fmt::Display;
use std::ops::{Index, IndexMut};

pub const ROWS: usize = 8;
pub const COLS: usize = 8;
pub const CELLS: usize = ROWS * COLS;

/// (row, col), row 0 at the top, col 0 at the left.
pub type Cell = (usize, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Grid<V> {
    cells: [[V; COLS]; ROWS],
}

impl<V: Copy> Grid<V> {
    pub fn filled(v: V) -> Self {
        Grid {
            cells: [[v; COLS]; ROWS],
        }
    }

    pub fn from_rows(cells: [[V; COLS]; ROWS]) -> Self {
        Grid { cells }
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> V) -> Self {
        let mut cells = [[f(0, 0); COLS]; ROWS];
        for (r, row) in cells.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = f(r, c);
            }
        }
        Grid { cells }
    }

    /// Builds a grid from 64 values in row-major order.
    pub fn from_row_major(values: &[V]) -> Option<Self> {
        if values.len() != CELLS {
            return None;
        }
        Some(Self::from_fn(|r, c| values[r * COLS + c]))
    }

    pub fn rows(&self) -> &[[V; COLS]; ROWS] {
        &self.cells
    }

    pub fn map<U: Copy>(&self, mut f: impl FnMut(V) -> U) -> Grid<U> {
        Grid::from_fn(|r, c| f(self.cells[r][c]))
    }

    pub fn zip_map<W: Copy, U: Copy>(&self, other: &Grid<W>, mut f: impl FnMut(V, W) -> U) -> Grid<U> {
        Grid::from_fn(|r, c| f(self.cells[r][c], other.cells[r][c]))
    }

    /// Values in row-major order.
    pub fn values(&self) -> impl Iterator<Item = V> + '_ {
        self.cells.iter().flat_map(|row| row.iter().copied())
    }

    /// `((row, col), value)` pairs in row-major order.
    pub fn indexed(&self) -> impl Iterator<Item = (Cell, V)> + '_ {
        self.cells
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().enumerate().map(move |(c, &v)| ((r, c), v)))
    }

    pub fn transposed(&self) -> Self {
        Grid::from_fn(|r, c| self.cells[c][r])
    }
}

impl<V: Display> Grid<V> {
    /// One CSV line of 64 values, row-major.
    pub fn to_csv_line(&self) -> String {
        let mut out = String::new();
        for (i, v) in self.cells.iter().flat_map(|row| row.iter()).enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&v.to_string());
        }
        out
    }

    /// Eight CSV lines of eight values each, for human-readable matrix dumps.
    pub fn to_csv_matrix(&self) -> String {
        let mut out = String::new();
        for row in &self.cells {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

impl<V> Index<Cell> for Grid<V> {
    type Output = V;

    fn index(&self, (r, c): Cell) -> &V {
        &self.cells[r][c]
    }
}

impl<V> IndexMut<Cell> for Grid<V> {
    fn index_mut(&mut self, (r, c): Cell) -> &mut V {
        &mut self.cells[r][c]
    }
}

/// In-grid 8-neighbourhood (or 4-neighbourhood when `diagonals` is false).
pub fn neighbours((r, c): Cell, diagonals: bool) -> impl Iterator<Item = Cell> {
    const OFFSETS: [(isize, isize); 8] = [
        (-1, 0),
        (0, -1),
        (0, 1),
        (1, 0),
        (-1, -1),
        (-1, 1),
        (1, -1),
        (1, 1),
    ];
    let n = if diagonals { 8 } else { 4 };
    OFFSETS[..n].iter().filter_map(move |&(dr, dc)| {
        let nr = r as isize + dr;
        let nc = c as isize + dc;
        if (0..ROWS as isize).contains(&nr) && (0..COLS as isize).contains(&nc) {
            Some((nr as usize, nc as usize))
        } else {
            None
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_major_layout() {
        let values: Vec<u32> = (0..64).collect();
        let g = Grid::from_row_major(&values).unwrap();
        assert_eq!(g[(0, 7)], 7);
        assert_eq!(g[(1, 0)], 8);
        assert_eq!(g.values().collect::<Vec<_>>(), values);
        assert_eq!(g.transposed()[(0, 7)], 56);
        assert!(Grid::from_row_major(&values[..63]).is_none());
    }

    #[test]
    fn corner_neighbour_counts() {
        assert_eq!(neighbours((0, 0), true).count(), 3);
        assert_eq!(neighbours((0, 0), false).count(), 2);
        assert_eq!(neighbours((4, 4), true).count(), 8);
    }
}
