//! The two built-in simulation grids and their golden reference risks.
//!
//! Table 1 covers p=2 over seven eigenvalue patterns, table 2 covers p=3
//! over nine; both run nu in {5, 20, 50} and report psi and phi risks per
//! cell. The golden values serve as regression references for the
//! reproduction tests; cells whose psi risk exceeds [`DIVERGENT_THRESHOLD`]
//! sit in the heavy-tailed regime where the simulated value is dominated by
//! rare huge losses, and reproduction there is order-of-magnitude only.

use crate::error::{Error, Result};

/// Degrees-of-freedom column shared by both tables.
pub const TABLE_NUS: [f64; 3] = [5.0, 20.0, 50.0];

/// Eigenvalue patterns of table 1 (p=2), largest first.
pub const TABLE1_PATTERNS: [&[f64]; 7] = [
    &[1.0, 1.0],
    &[1.0, 0.8],
    &[1.0, 0.6],
    &[1.0, 0.4],
    &[1.0, 0.2],
    &[1.0, 0.01],
    &[1.0, 0.001],
];

/// Eigenvalue patterns of table 2 (p=3), largest first.
pub const TABLE2_PATTERNS: [&[f64]; 9] = [
    &[1.0, 1.0, 1.0],
    &[1.0, 0.5, 0.25],
    &[1.0, 0.1, 0.01],
    &[1.0, 1.0, 0.5],
    &[1.0, 0.5, 0.5],
    &[1.0, 1.0, 0.1],
    &[1.0, 0.1, 0.1],
    &[1.0, 1.0, 0.01],
    &[1.0, 0.01, 0.01],
];

/// Golden risks for table 1, indexed [pattern][nu][estimator] with
/// estimator order (psi, phi).
pub const TABLE1_RISK: [[[f64; 2]; 3]; 7] = [
    [[0.623, 0.776], [0.184, 0.263], [0.077, 0.114]],
    [[0.584, 0.689], [0.160, 0.203], [0.065, 0.078]],
    [[0.565, 0.637], [0.169, 0.180], [0.080, 0.074]],
    [[0.587, 0.624], [0.199, 0.185], [0.086, 0.078]],
    [[0.628, 0.634], [0.197, 0.186], [0.077, 0.077]],
    [[0.643, 0.633], [0.240, 0.188], [0.151, 0.079]],
    [[23.271, 0.632], [15.299, 0.188], [14.044, 0.078]],
];

/// Golden risks for table 2, same layout.
pub const TABLE2_RISK: [[[f64; 2]; 3]; 9] = [
    [[0.942, 1.475], [0.261, 0.523], [0.102, 0.226]],
    [[0.820, 1.060], [0.279, 0.278], [0.145, 0.114]],
    [[5.281, 1.079], [9.666, 0.294], [13.246, 0.120]],
    [[0.866, 1.269], [0.258, 0.369], [0.132, 0.154]],
    [[0.863, 1.092], [0.270, 0.335], [0.135, 0.149]],
    [[1.002, 1.234], [0.353, 0.367], [0.198, 0.155]],
    [[1.006, 1.120], [0.276, 0.360], [0.127, 0.153]],
    [[41.145, 1.233], [20.654, 0.370], [18.899, 0.156]],
    [[11.869, 1.135], [9.718, 0.365], [7.173, 0.155]],
];

/// A cell whose golden psi risk exceeds this sits in the divergent regime.
pub const DIVERGENT_THRESHOLD: f64 = 2.0;

/// Static description of one built-in grid.
#[derive(Debug, Clone, Copy)]
pub struct TableSpec {
    pub table: u8,
    pub p: usize,
    pub patterns: &'static [&'static [f64]],
    pub nus: [f64; 3],
}

impl TableSpec {
    pub fn cell_count(&self) -> usize {
        self.patterns.len() * self.nus.len()
    }

    /// Golden (psi, phi) risks for one cell.
    pub fn golden(&self, pattern: usize, nu_idx: usize) -> [f64; 2] {
        match self.table {
            1 => TABLE1_RISK[pattern][nu_idx],
            _ => TABLE2_RISK[pattern][nu_idx],
        }
    }

    /// Whether the golden psi risk marks this cell as heavy-tailed.
    pub fn is_divergent(&self, pattern: usize, nu_idx: usize) -> bool {
        self.golden(pattern, nu_idx)[0] > DIVERGENT_THRESHOLD
    }
}

pub fn table_spec(table: u8) -> Result<TableSpec> {
    match table {
        1 => Ok(TableSpec {
            table: 1,
            p: 2,
            patterns: &TABLE1_PATTERNS,
            nus: TABLE_NUS,
        }),
        2 => Ok(TableSpec {
            table: 2,
            p: 3,
            patterns: &TABLE2_PATTERNS,
            nus: TABLE_NUS,
        }),
        other => Err(Error::InvalidParameter(format!(
            "unknown table {other}; available tables are 1 and 2"
        ))),
    }
}
