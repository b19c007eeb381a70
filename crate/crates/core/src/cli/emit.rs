use serde_json::Value;

use crate::analysis::Table;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// A command's result: a structured record for JSON and a flat table for CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct CommandOutput {
    pub passed: bool,
    pub value: Value,
    pub table: Table,
}

/// Render losslessly: exact values stay integer strings in both formats.
pub fn emit(out: &CommandOutput, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&out.value).expect("json values always serialize");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&out.table.columns).expect("writing to memory");
            for row in &out.table.rows {
                w.write_record(row).expect("writing to memory");
            }
            String::from_utf8(w.into_inner().expect("flushing to memory")).expect("csv of utf-8 fields")
        }
    }
}
