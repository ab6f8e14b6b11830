use std::fs;
use std::io::{self, Read};
use std::path::Path;

use clap::ValueEnum;
use diamcrit::Graph;
use serde::Serialize;

use crate::Failure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Graph6,
    Json,
}

/// Reads a graph from a file, or stdin for `-`. JSON is recognized by a
/// leading `{`; anything else is the first line of a graph6 file.
pub fn read_graph(path: &Path) -> Result<Graph, Failure> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::usage(format!("reading stdin: {e}")))?;
        s
    } else {
        fs::read_to_string(path).map_err(|e| Failure::usage(format!("reading {}: {e}", path.display())))?
    };
    let trimmed = text.trim_start();
    let g = if trimmed.starts_with('{') {
        Graph::from_json_str(trimmed)
    } else {
        let line = trimmed.lines().next().unwrap_or("").trim();
        let line = line.strip_prefix(">>graph6<<").unwrap_or(line);
        Graph::from_graph6(line.as_bytes())
    };
    g.map_err(Failure::from)
}

pub fn render_graph(g: &Graph, format: Format) -> String {
    match format {
        Format::Graph6 => format!("{}\n", g.to_graph6()),
        Format::Json => format!("{}\n", serde_json::to_string(&g.to_json()).expect("serializable")),
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    if path == Path::new("-") {
        print!("{text}");
        Ok(())
    } else {
        fs::write(path, text).map_err(|e| Failure::usage(format!("writing {}: {e}", path.display())))
    }
}
