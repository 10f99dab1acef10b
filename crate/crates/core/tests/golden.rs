//! Byte-for-byte comparison of the predefined figures against checked-in SVGs.
//!
//! Run with `UPDATE_GOLDEN=1` to rewrite the files after an intentional
//! rendering change, then review the diff.

use std::fs;
use std::path::PathBuf;

use harmonic_sieve::plot::{render_predefined, FigureId, PlotSpec};

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("golden")
}

#[test]
fn predefined_figures_match_golden_files() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some_and(|v| v == "1");
    let mut mismatched = Vec::new();
    for id in FigureId::ALL {
        let svg = render_predefined(&PlotSpec::for_figure(id)).unwrap();
        let path = golden_dir().join(id.file_name());
        if update {
            fs::write(&path, &svg).unwrap();
            continue;
        }
        let golden = fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        if golden != svg.as_bytes() {
            mismatched.push(id.file_name());
        }
    }
    assert!(
        mismatched.is_empty(),
        "figures differ from golden files: {mismatched:?}"
    );
}

#[test]
fn rendering_is_deterministic() {
    for id in FigureId::ALL {
        let spec = PlotSpec::for_figure(id);
        assert_eq!(
            render_predefined(&spec).unwrap(),
            render_predefined(&spec).unwrap()
        );
    }
}
