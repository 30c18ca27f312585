//! JSON interchange format `obd-v1`.
//!
//! ```json
//! {"format":"obd-v1",
//!  "prefix":[{"vertex_count":1,"edges":[{"src":0,"dst":0,"ord":0}]}],
//!  "block":[...]}
//! ```
//!
//! Edge ids are positions in each `edges` array, so parsing keeps the file
//! order. Serialization writes edges sorted by `(dst, ord)`.

use serde::{Deserialize, Serialize};

use crate::diagram::{LevelSpec, OrderedDiagram};
use crate::error::{Error, Result};

pub const FORMAT_TAG: &str = "obd-v1";

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    format: String,
    prefix: Vec<LevelSpec>,
    #[serde(default)]
    block: Vec<LevelSpec>,
}

fn malformed(e: serde_json::Error) -> Error {
    Error::Malformed {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

/// Raw prefix and block, without structural validation.
pub fn parse_document(text: &str) -> Result<(Vec<LevelSpec>, Vec<LevelSpec>)> {
    let doc: Document = serde_json::from_str(text).map_err(malformed)?;
    if doc.format != FORMAT_TAG {
        return Err(Error::Malformed {
            line: 1,
            column: 1,
            message: format!("unsupported format `{}`, expected `{FORMAT_TAG}`", doc.format),
        });
    }
    Ok((doc.prefix, doc.block))
}

pub fn parse_diagram(text: &str) -> Result<OrderedDiagram> {
    let (prefix, block) = parse_document(text)?;
    OrderedDiagram::new(prefix, block)
}

pub fn serialize_diagram(d: &OrderedDiagram) -> String {
    let doc = Document {
        format: FORMAT_TAG.to_string(),
        prefix: d.prefix_specs().iter().map(LevelSpec::canonical).collect(),
        block: d.block_specs().iter().map(LevelSpec::canonical).collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
    s.push('\n');
    s
}
