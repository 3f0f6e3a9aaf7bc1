use std::fs;
use std::path::PathBuf;

pub fn workspace_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .canonicalize()
        .expect("workspace root")
}

pub fn svg_dir() -> PathBuf {
    workspace_root().join("fixtures/svg")
}

pub fn llm_fixture_dir() -> PathBuf {
    workspace_root().join("fixtures/llm")
}

/// `(file stem, text)` for every corpus drawing, sorted by name.
pub fn svg_corpus() -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = fs::read_dir(svg_dir())
        .expect("fixtures/svg")
        .filter_map(|e| {
            let p = e.ok()?.path();
            if p.extension()? != "svg" {
                return None;
            }
            let name = p.file_stem()?.to_string_lossy().into_owned();
            Some((name, fs::read_to_string(&p).ok()?))
        })
        .collect();
    out.sort();
    out
}

pub fn svg(name: &str) -> String {
    fs::read_to_string(svg_dir().join(format!("{name}.svg"))).expect("corpus drawing")
}
