//! JSON reports written by the `bottlenecks` subcommand.

use bottleneck_core::bottleneck::RunReport;
use serde::{Deserialize, Serialize};

use crate::config::RunConfigFile;
use crate::InputError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BottleneckOutput {
    pub config_echo: RunConfigFile,
    #[serde(flatten)]
    pub report: RunReport,
}

impl BottleneckOutput {
    pub fn from_json(text: &str) -> Result<Self, InputError> {
        serde_json::from_str(text)
            .map_err(|e| InputError::Value(format!("not a bottlenecks report: {e}")))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}
