//! UCA candidate worksheet: control actions crossed with failure modes.

use serde::Serialize;

use super::Ratio;
use crate::model::{FailureMode, Identifier, SafetyModel};

/// The control-action × failure-mode matrix.
///
/// One row per control action in declaration order; each row has exactly
/// four cells in the fixed mode order not provided, provided improperly,
/// mistimed, inappropriate duration. Every declared UCA lands in exactly
/// one cell; empty cells are listed in [`UcaWorksheet::gaps`] so they get
/// either documented or explicitly waived.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UcaWorksheet {
    pub rows: Vec<WorksheetRow>,
    pub gaps: Vec<WorksheetGap>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WorksheetRow {
    pub action: Identifier,
    /// Exactly four cells, one per failure mode in fixed order.
    pub cells: Vec<WorksheetCell>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WorksheetCell {
    pub mode: FailureMode,
    /// Documented UCAs for this (action, mode), in declaration order.
    pub ucas: Vec<Identifier>,
}

/// An undocumented worksheet cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WorksheetGap {
    pub action: Identifier,
    pub mode: FailureMode,
}

impl UcaWorksheet {
    /// Total cell count: `4 × |actions|`.
    pub fn cell_count(&self) -> usize {
        self.rows.len() * FailureMode::ALL.len()
    }

    /// Cells with at least one documented UCA.
    pub fn documented_count(&self) -> usize {
        self.rows
            .iter()
            .flat_map(|row| &row.cells)
            .filter(|cell| !cell.ucas.is_empty())
            .count()
    }

    /// Documented cells over total cells.
    pub fn coverage(&self) -> Ratio {
        Ratio::new(self.documented_count() as u64, self.cell_count() as u64)
    }
}

/// Builds the worksheet for a valid model.
pub fn uca_worksheet(model: &SafetyModel) -> UcaWorksheet {
    let mut rows = Vec::with_capacity(model.actions().len());
    let mut gaps = Vec::new();
    for action in model.actions() {
        let mut cells = Vec::with_capacity(FailureMode::ALL.len());
        for mode in FailureMode::ALL {
            let ucas: Vec<Identifier> = model
                .ucas()
                .iter()
                .filter(|uca| uca.action == action.id && uca.mode == mode)
                .map(|uca| uca.id.clone())
                .collect();
            if ucas.is_empty() {
                gaps.push(WorksheetGap { action: action.id.clone(), mode });
            }
            cells.push(WorksheetCell { mode, ucas });
        }
        rows.push(WorksheetRow { action: action.id.clone(), cells });
    }
    UcaWorksheet { rows, gaps }
}
