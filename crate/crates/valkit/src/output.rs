//! Output envelopes. Every file carries the run configuration and the library version.

use serde::Serialize;

use crate::{Cli, CliError};

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    config: &'a Cli,
    result: &'a T,
}

pub fn json<T: Serialize>(cli: &Cli, result: &T) -> Result<String, CliError> {
    let env = Envelope { tool: "valkit", version: valkit_core::VERSION, config: cli, result };
    let mut s = serde_json::to_string_pretty(&env).map_err(|e| CliError::Numeric(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// CSV table preceded by `#` comment lines with the version and the configuration.
pub struct CsvTable {
    out: String,
}

impl CsvTable {
    pub fn new(cli: &Cli) -> Result<Self, CliError> {
        let config = serde_json::to_string(cli).map_err(|e| CliError::Numeric(e.to_string()))?;
        Ok(CsvTable { out: format!("# valkit {}\n# config {config}\n", valkit_core::VERSION) })
    }

    pub fn comment(&mut self, text: &str) {
        self.out.push_str(&format!("# {text}\n"));
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(fields).map_err(|e| CliError::Numeric(e.to_string()))?;
        let bytes = w.into_inner().map_err(|e| CliError::Numeric(e.to_string()))?;
        self.out.push_str(&String::from_utf8_lossy(&bytes));
        Ok(())
    }

    pub fn finish(self) -> String {
        self.out
    }
}
