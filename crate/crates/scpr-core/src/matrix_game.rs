//! Finite two-player zero-sum matrix games in mixed strategies.
//!
//! The payoff entry is the amount the row player (maximizer) receives from
//! the column player (minimizer). `solve` returns the game value together
//! with one optimal mixed strategy per side.
//!
//! Games with a pure saddle point are solved exactly by enumeration. The
//! rest go through a self-contained dense simplex on the standard
//! linear-programming formulation: entries are shifted strictly positive,
//! the column player's normalized strategy is the primal solution, the row
//! player's falls out of the duals, and the shift is subtracted from the
//! value at the end. Bland's rule guards against cycling. Matrices here are
//! tiny (one action per closed neighborhood), so no sparsity or scaling
//! tricks are needed.

use thiserror::Error;

/// Strategies are accepted as optimal when their guarantees are within this
/// distance of the value.
pub const GUARANTEE_TOL: f64 = 1e-9;

const PIVOT_EPS: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum MatrixGameError {
    #[error("payoff matrix must have at least one row and one column")]
    Empty,
    #[error("payoff matrix rows have differing lengths")]
    Ragged,
    #[error("payoff entry at ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
}

/// Payoff matrix of a zero-sum game, row player maximizing.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixGame {
    rows: usize,
    cols: usize,
    payoff: Vec<f64>,
}

/// Value and one optimal mixed-strategy pair.
#[derive(Debug, Clone)]
pub struct MatrixGameSolution {
    pub value: f64,
    pub row_strategy: Vec<f64>,
    pub col_strategy: Vec<f64>,
}

impl MatrixGame {
    pub fn new(payoff: Vec<Vec<f64>>) -> Result<Self, MatrixGameError> {
        if payoff.is_empty() || payoff[0].is_empty() {
            return Err(MatrixGameError::Empty);
        }
        let cols = payoff[0].len();
        let rows = payoff.len();
        let mut flat = Vec::with_capacity(rows * cols);
        for (i, row) in payoff.iter().enumerate() {
            if row.len() != cols {
                return Err(MatrixGameError::Ragged);
            }
            for (j, &e) in row.iter().enumerate() {
                if !e.is_finite() {
                    return Err(MatrixGameError::NonFinite { row: i, col: j });
                }
                flat.push(e);
            }
        }
        Ok(MatrixGame {
            rows,
            cols,
            payoff: flat,
        })
    }

    /// Builds from a row-major flat payoff vector.
    pub fn from_flat(rows: usize, cols: usize, payoff: Vec<f64>) -> Result<Self, MatrixGameError> {
        if rows == 0 || cols == 0 || payoff.len() != rows * cols {
            return Err(MatrixGameError::Empty);
        }
        for (idx, &e) in payoff.iter().enumerate() {
            if !e.is_finite() {
                return Err(MatrixGameError::NonFinite {
                    row: idx / cols,
                    col: idx % cols,
                });
            }
        }
        Ok(MatrixGame { rows, cols, payoff })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.payoff[i * self.cols + j]
    }

    /// `max_i min_j` over pure actions.
    pub fn pure_maxmin(&self) -> f64 {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.entry(i, j))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `min_j max_i` over pure actions.
    pub fn pure_minmax(&self) -> f64 {
        (0..self.cols)
            .map(|j| {
                (0..self.rows)
                    .map(|i| self.entry(i, j))
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// First (lexicographically smallest) entry that is simultaneously the
    /// minimum of its row and the maximum of its column, if any.
    pub fn pure_saddle_point(&self) -> Option<(usize, usize)> {
        for i in 0..self.rows {
            for j in 0..self.cols {
                let e = self.entry(i, j);
                let row_min = (0..self.cols).all(|j2| self.entry(i, j2) >= e);
                if !row_min {
                    continue;
                }
                let col_max = (0..self.rows).all(|i2| self.entry(i2, j) <= e);
                if col_max {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Value and optimal mixed strategies.
    pub fn solve(&self) -> MatrixGameSolution {
        if let Some((i, j)) = self.pure_saddle_point() {
            let mut row_strategy = vec![0.0; self.rows];
            let mut col_strategy = vec![0.0; self.cols];
            row_strategy[i] = 1.0;
            col_strategy[j] = 1.0;
            return MatrixGameSolution {
                value: self.entry(i, j),
                row_strategy,
                col_strategy,
            };
        }
        self.solve_by_simplex()
    }

    /// Simplex on: maximize Σx subject to Γ'x ≤ 1, x ≥ 0, where Γ' is the
    /// payoff shifted so every entry is at least 1 and x is the column
    /// player's strategy scaled by the shifted value.
    fn solve_by_simplex(&self) -> MatrixGameSolution {
        let m = self.rows;
        let k = self.cols;
        let min_entry = self.payoff.iter().copied().fold(f64::INFINITY, f64::min);
        let shift = 1.0 - min_entry;

        // Tableau layout: k structural columns, m slack columns, rhs.
        let width = k + m + 1;
        let mut tab = vec![0.0; m * width];
        for i in 0..m {
            for j in 0..k {
                tab[i * width + j] = self.entry(i, j) + shift;
            }
            tab[i * width + k + i] = 1.0;
            tab[i * width + k + m] = 1.0;
        }
        // Reduced-cost row for the maximization objective Σx.
        let mut obj = vec![0.0; width];
        for cell in obj.iter_mut().take(k) {
            *cell = 1.0;
        }
        let mut basis: Vec<usize> = (k..k + m).collect();

        let max_pivots = 64 * (k + m).max(8);
        for _ in 0..max_pivots {
            // Bland: entering column is the smallest improving index.
            let Some(enter) = (0..k + m).find(|&j| obj[j] > PIVOT_EPS) else {
                break;
            };
            // Ratio test; ties resolved toward the smallest basis variable.
            let mut leave: Option<usize> = None;
            let mut best_ratio = f64::INFINITY;
            for r in 0..m {
                let a = tab[r * width + enter];
                if a > PIVOT_EPS {
                    let ratio = tab[r * width + k + m] / a;
                    let better = ratio < best_ratio - PIVOT_EPS
                        || (ratio < best_ratio + PIVOT_EPS
                            && leave.is_some_and(|l| basis[r] < basis[l]));
                    if leave.is_none() || better {
                        best_ratio = ratio;
                        leave = Some(r);
                    }
                }
            }
            let Some(leave) = leave else {
                // Bounded feasible region: an improving column always has a
                // positive coefficient somewhere.
                debug_assert!(false, "zero-sum game LP reported unbounded");
                break;
            };

            let pivot = tab[leave * width + enter];
            for j in 0..width {
                tab[leave * width + j] /= pivot;
            }
            for r in 0..m {
                if r != leave {
                    let factor = tab[r * width + enter];
                    if factor != 0.0 {
                        for j in 0..width {
                            tab[r * width + j] -= factor * tab[leave * width + j];
                        }
                    }
                }
            }
            let factor = obj[enter];
            if factor != 0.0 {
                for j in 0..width {
                    obj[j] -= factor * tab[leave * width + j];
                }
            }
            basis[leave] = enter;
        }

        // Primal solution: the column player's scaled strategy.
        let mut x = vec![0.0; k];
        for (r, &b) in basis.iter().enumerate() {
            if b < k {
                x[b] = tab[r * width + k + m].max(0.0);
            }
        }
        // Dual solution from the slack reduced costs: the row player's
        // scaled strategy.
        let mut y = vec![0.0; m];
        for i in 0..m {
            y[i] = (-obj[k + i]).max(0.0);
        }

        let sum_x: f64 = x.iter().sum();
        let sum_y: f64 = y.iter().sum();
        debug_assert!(sum_x > 0.0 && sum_y > 0.0);
        let value = 1.0 / sum_x - shift;
        let col_strategy: Vec<f64> = x.iter().map(|v| v / sum_x).collect();
        let row_strategy: Vec<f64> = y.iter().map(|v| v / sum_y).collect();

        MatrixGameSolution {
            value,
            row_strategy,
            col_strategy,
        }
    }
}

impl MatrixGameSolution {
    /// Worst case over columns for the row strategy (what the row player is
    /// guaranteed regardless of the opponent).
    pub fn row_guarantee(&self, game: &MatrixGame) -> f64 {
        (0..game.cols())
            .map(|j| {
                (0..game.rows())
                    .map(|i| self.row_strategy[i] * game.entry(i, j))
                    .sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Worst case over rows for the column strategy.
    pub fn col_guarantee(&self, game: &MatrixGame) -> f64 {
        (0..game.rows())
            .map(|i| {
                (0..game.cols())
                    .map(|j| self.col_strategy[j] * game.entry(i, j))
                    .sum::<f64>()
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }
}
