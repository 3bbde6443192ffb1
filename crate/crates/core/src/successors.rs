//! Successors arrays: for each symbol (or partition cell), the sequence of symbols observed
//! immediately after its successive visits.

use serde::Serialize;

use crate::model::{Alphabet, Symbol};
use crate::sim::Trajectory;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowKeys {
    Symbols,
    /// Row `j` is cell E_{j+1} of the partition.
    Cells,
}

/// Ragged rows; the last position of the trajectory has no successor and is not counted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuccessorsArray {
    pub keys: RowKeys,
    pub rows: Vec<Vec<Symbol>>,
    pub trajectory_len: usize,
}

impl SuccessorsArray {
    pub fn row(&self, key: usize) -> &[Symbol] {
        &self.rows[key]
    }

    pub fn total_len(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }
}

pub fn extract(t: &Trajectory, alphabet: &Alphabet) -> Result<SuccessorsArray> {
    let key: Vec<usize> = (0..alphabet.len()).collect();
    extract_keyed(t, &key, alphabet.len(), RowKeys::Symbols)
}

/// Rows keyed by cell; `cells[j]` lists the symbols of E_{j+1}.
pub fn extract_partitioned(t: &Trajectory, alphabet: &Alphabet, cells: &[Vec<Symbol>]) -> Result<SuccessorsArray> {
    let mut key = vec![usize::MAX; alphabet.len()];
    for (j, members) in cells.iter().enumerate() {
        for &s in members {
            key[s] = j;
        }
    }
    if let Some(&y) = t.symbols.iter().find(|&&y| key[y] == usize::MAX) {
        return Err(Error::SymbolOutsidePartition(alphabet.label(y).to_string()));
    }
    extract_keyed(t, &key, cells.len(), RowKeys::Cells)
}

fn extract_keyed(t: &Trajectory, key: &[usize], n_rows: usize, keys: RowKeys) -> Result<SuccessorsArray> {
    if t.len() < 2 {
        return Err(Error::TrajectoryTooShort { min: 2, got: t.len() });
    }
    let mut rows = vec![Vec::new(); n_rows];
    for w in t.symbols.windows(2) {
        rows[key[w[0]]].push(w[1]);
    }
    Ok(SuccessorsArray { keys, rows, trajectory_len: t.len() })
}

/// Lines `<row label>: <successor labels...>`.
pub fn format_successors(arr: &SuccessorsArray, alphabet: &Alphabet) -> String {
    let mut out = String::new();
    for (key, row) in arr.rows.iter().enumerate() {
        let label = match arr.keys {
            RowKeys::Symbols => alphabet.label(key).to_string(),
            RowKeys::Cells => format!("E{}", key + 1),
        };
        out.push_str(&label);
        out.push(':');
        for &y in row {
            out.push(' ');
            out.push_str(alphabet.label(y));
        }
        out.push('\n');
    }
    out
}
