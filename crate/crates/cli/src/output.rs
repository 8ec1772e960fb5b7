//! Result files: embedded configuration, atomic writes, plotting scripts.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};

pub const CONFIG_PREFIX: &str = "# config: ";
pub const TIMESTAMP_PREFIX: &str = "# generated_unix_s: ";
pub const TIMESTAMP_KEY: &str = "generated_unix_s";

fn now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn compact<T: Serialize>(x: &T) -> String {
    serde_json::to_string(x).expect("serializable")
}

/// CSV with the configuration and a timestamp as leading comment lines.
pub fn csv_document<C: Serialize>(config: &C, body: &str) -> String {
    format!(
        "{CONFIG_PREFIX}{}\n{TIMESTAMP_PREFIX}{}\n{body}",
        compact(config),
        now()
    )
}

pub fn json_document<C: Serialize>(
    config: &C,
    columns: Vec<String>,
    rows: Value,
    metadata: Value,
) -> String {
    let doc = json!({
        "config": config,
        TIMESTAMP_KEY: now(),
        "columns": columns,
        "rows": rows,
        "metadata": metadata,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
    s.push('\n');
    s
}

/// Content with the timestamp line or field removed, for comparisons.
pub fn strip_timestamp(content: &str) -> String {
    if content.starts_with('#') {
        return content
            .lines()
            .filter(|l| !l.starts_with(TIMESTAMP_PREFIX))
            .map(|l| format!("{l}\n"))
            .collect();
    }
    match serde_json::from_str::<Value>(content) {
        Ok(Value::Object(mut m)) => {
            m.remove(TIMESTAMP_KEY);
            serde_json::to_string_pretty(&Value::Object(m)).expect("serializable")
        }
        _ => content.to_string(),
    }
}

/// Write through a temporary file in the target directory and rename.
pub fn write_atomic(path: &Path, content: &str) -> CliResult<()> {
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    tmp.write_all(content.as_bytes())
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    tmp.persist(path)
        .map_err(|e| CliError::Io(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}

/// Matplotlib script that plots the first numeric column against `y`.
pub fn plot_script(csv_name: &str, x: &str, y: &str, group: Option<&str>) -> String {
    let group_block = match group {
        Some(g) => format!(
            "for key, part in df.groupby(\"{g}\"):\n    ax.plot(part[\"{x}\"], part[\"{y}\"], label=f\"{g}={{key}}\")\nax.legend()\n"
        ),
        None => format!("ax.plot(df[\"{x}\"], df[\"{y}\"])\n"),
    };
    format!(
        "import pandas as pd\nimport matplotlib.pyplot as plt\n\ndf = pd.read_csv(\"{csv_name}\", comment=\"#\")\nfig, ax = plt.subplots()\n{group_block}ax.set_xlabel(\"{x}\")\nax.set_ylabel(\"{y}\")\nfig.savefig(\"{}\")\n",
        csv_name.replace(".csv", ".png")
    )
}

pub fn out_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}
