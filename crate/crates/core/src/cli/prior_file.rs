//! Prior files: `{"support": [[n, w], …]}` or `{"geometric": {"theta": t}}`.

use std::path::Path;

use serde::Deserialize;

use crate::error::{invalid, Result};
use crate::prior::SampleSizeDistribution;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Geometric {
    theta: f64,
}

#[derive(Debug, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
enum PriorDocument {
    Support { support: Vec<(u64, f64)> },
    Geometric { geometric: Geometric },
}

pub fn parse_prior(text: &str) -> Result<SampleSizeDistribution> {
    let doc: PriorDocument = serde_json::from_str(text).map_err(|e| {
        invalid(format!(
            "prior document must be {{\"support\":[[n,w],...]}} or {{\"geometric\":{{\"theta\":t}}}}: {e}"
        ))
    })?;
    match doc {
        PriorDocument::Support { support } => SampleSizeDistribution::finite(support),
        PriorDocument::Geometric { geometric } => SampleSizeDistribution::geometric(geometric.theta),
    }
}

pub fn load_prior(path: &Path) -> Result<SampleSizeDistribution> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| invalid(format!("cannot read prior file {}: {e}", path.display())))?;
    parse_prior(&text)
}
