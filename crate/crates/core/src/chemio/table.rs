use std::collections::HashSet;
use std::io::Read;

use thiserror::Error;

use super::smiles::{parse_smiles, SmilesError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskType {
    Classification,
    Regression,
}

impl std::str::FromStr for TaskType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "classification" => Ok(TaskType::Classification),
            "regression" => Ok(TaskType::Regression),
            other => Err(format!("unknown task type {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MoleculeRecord {
    pub id: String,
    pub smiles: String,
    pub labels: Vec<Option<f64>>,
}

/// A data row skipped because its SMILES did not parse.
#[derive(Debug, Clone, PartialEq)]
pub struct DroppedRow {
    /// 1-based line of the row in the input, counting the header as line 1.
    pub line: u64,
    pub smiles: String,
    pub error: SmilesError,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MoleculeTable {
    pub records: Vec<MoleculeRecord>,
    pub task_names: Vec<String>,
    pub task_type: TaskType,
    pub dropped: Vec<DroppedRow>,
}

impl MoleculeTable {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn dropped_count(&self) -> usize {
        self.dropped.len()
    }
}

#[derive(Debug, Error)]
pub enum TableError {
    #[error("header has no \"smiles\" column")]
    MissingSmilesColumn,
    #[error("table has no data rows")]
    EmptyTable,
    #[error("duplicate id {id:?} on line {line}")]
    DuplicateId { id: String, line: u64 },
    #[error("bad number {value:?} in column {column:?} on line {line}")]
    BadNumber { column: String, value: String, line: u64 },
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

/// Reads a header-first CSV table. The `smiles` column (case-insensitive) is
/// required; an `id` column is used when present, otherwise ids are the
/// 0-based data-row index. Every other column is a task label.
pub fn load_molecule_table<R: Read>(reader: R, task_type: TaskType) -> Result<MoleculeTable, TableError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let smiles_col = headers
        .iter()
        .position(|h| h.trim().eq_ignore_ascii_case("smiles"))
        .ok_or(TableError::MissingSmilesColumn)?;
    let id_col = headers.iter().position(|h| h.trim().eq_ignore_ascii_case("id"));
    let task_cols: Vec<usize> = (0..headers.len())
        .filter(|&c| c != smiles_col && Some(c) != id_col)
        .collect();
    let task_names: Vec<String> = task_cols.iter().map(|&c| headers[c].trim().to_string()).collect();

    let mut records = Vec::new();
    let mut dropped = Vec::new();
    let mut ids = HashSet::new();
    let mut rows = 0usize;
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let index = rows;
        rows += 1;
        let smiles = row.get(smiles_col).unwrap_or("").trim().to_string();
        if let Err(error) = parse_smiles(&smiles) {
            dropped.push(DroppedRow { line, smiles, error });
            continue;
        }
        let id = match id_col {
            Some(c) => row.get(c).unwrap_or("").trim().to_string(),
            None => index.to_string(),
        };
        if !ids.insert(id.clone()) {
            return Err(TableError::DuplicateId { id, line });
        }
        let mut labels = Vec::with_capacity(task_cols.len());
        for (&c, name) in task_cols.iter().zip(&task_names) {
            let cell = row.get(c).unwrap_or("").trim();
            if cell.is_empty() {
                labels.push(None);
                continue;
            }
            let v = cell.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| TableError::BadNumber {
                column: name.clone(),
                value: cell.to_string(),
                line,
            })?;
            labels.push(Some(v));
        }
        records.push(MoleculeRecord { id, smiles, labels });
    }
    if rows == 0 {
        return Err(TableError::EmptyTable);
    }
    Ok(MoleculeTable {
        records,
        task_names,
        task_type,
        dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(s: &str) -> Result<MoleculeTable, TableError> {
        load_molecule_table(s.as_bytes(), TaskType::Classification)
    }

    #[test]
    fn blank_label_is_absent() {
        let t = load("smiles,p_np\nCCO,1\nc1ccccc1,\nCC(=O)O,0\n").unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.task_names, vec!["p_np"]);
        let absent = t.records.iter().flat_map(|r| &r.labels).filter(|l| l.is_none()).count();
        assert_eq!(absent, 1);
        assert_eq!(t.records[1].id, "1");
    }

    #[test]
    fn invalid_smiles_dropped() {
        let t = load("smiles,y\nC1CC,1\nCC,0\n").unwrap();
        assert_eq!(t.dropped_count(), 1);
        assert_eq!(t.dropped[0].line, 2);
        assert_eq!(t.records.len(), 1);
        assert_eq!(t.records[0].id, "1");
    }

    #[test]
    fn header_errors() {
        assert!(matches!(load("mol,y\nCC,1\n"), Err(TableError::MissingSmilesColumn)));
        assert!(matches!(load("smiles,y\n"), Err(TableError::EmptyTable)));
    }

    #[test]
    fn id_column_and_quoting() {
        let t = load("id,SMILES,a,b\nm1,\"CCO\",1.5,\nm2,C,,2\n").unwrap();
        assert_eq!(t.task_names, vec!["a", "b"]);
        assert_eq!(t.records[0].id, "m1");
        assert_eq!(t.records[0].labels, vec![Some(1.5), None]);
        assert_eq!(t.records[1].labels, vec![None, Some(2.0)]);
        assert!(matches!(load("id,smiles\nx,C\nx,CC\n"), Err(TableError::DuplicateId { .. })));
        assert!(matches!(load("smiles,y\nC,abc\n"), Err(TableError::BadNumber { .. })));
    }
}
