//! Regenerates the shipped scenario files from the bundled presets.
//!
//! Run from anywhere in the workspace:
//!
//! ```text
//! cargo run -p ptpsim-core --example dump_scenarios [out_dir]
//! ```
//!
//! Without an argument the files land in `scenarios/` at the repository
//! root. A test compares the shipped files against the presets, so rerun
//! this after changing a preset.

use std::path::PathBuf;

use ptpsim_core::harness::{bundled_scenario, bundled_scenario_names};

fn main() -> std::io::Result<()> {
    let out_dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
    });
    std::fs::create_dir_all(&out_dir)?;
    for name in bundled_scenario_names() {
        let scenario = bundled_scenario(name).expect("bundled name");
        let path = out_dir.join(format!("{name}.scn"));
        std::fs::write(&path, scenario.to_text())?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
