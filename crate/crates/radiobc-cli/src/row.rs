//! The one output schema every experiment emits.

use serde::Serialize;

pub const SCHEMA_VERSION: &str = "radiobc.v1";

/// One simulated run. Wall time is measured but never written to output
/// files: identical experiment specs must produce byte-identical bytes.
#[derive(Debug, Clone, Serialize)]
pub struct ResultRow {
    pub n: usize,
    pub d: u32,
    pub delta: usize,
    pub c: usize,
    pub r: usize,
    pub protocol: String,
    pub family_size: usize,
    pub completion_slot: Option<u64>,
    pub termination_slot: Option<u64>,
    pub phases: Option<u64>,
    #[serde(skip_serializing)]
    pub wall_ms: Option<u128>,
}

pub const CSV_HEADER: &str =
    "n,d,delta,c,r,protocol,family_size,completion_slot,termination_slot,phases,wall_ms";

fn opt(v: Option<u64>) -> String {
    v.map_or_else(|| "none".into(), |x| x.to_string())
}

impl ResultRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},",
            self.n,
            self.d,
            self.delta,
            self.c,
            self.r,
            self.protocol,
            self.family_size,
            opt(self.completion_slot),
            opt(self.termination_slot),
            opt(self.phases),
        )
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("row serializes");
        v["wall_ms"] = serde_json::Value::Null;
        v
    }
}

pub fn csv_document(rows: &[ResultRow], summaries: &[String]) -> String {
    let mut out = format!("# {SCHEMA_VERSION}\n{CSV_HEADER}\n");
    for row in rows {
        out.push_str(&row.to_csv());
        out.push('\n');
    }
    for s in summaries {
        out.push_str("# summary ");
        out.push_str(s);
        out.push('\n');
    }
    out
}

pub fn json_document(rows: &[ResultRow], summaries: &[String]) -> String {
    let doc = serde_json::json!({
        "schema": SCHEMA_VERSION,
        "rows": rows.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
        "summaries": summaries,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("document serializes");
    s.push('\n');
    s
}
