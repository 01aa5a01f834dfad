use std::path::PathBuf;

use anyhow::{bail, Context};
use num_complex::Complex64;
use q2pc_core::harness::named_input;
use q2pc_core::mbqc::{library, BrickworkPattern};
use q2pc_core::qsim::StateVector;

/// Bob's input: comma-separated named states, one per row (zero, one, plus,
/// iplus, random), or a JSON file holding a list of [re, im] amplitudes.
pub fn load_input(names: &str, file: Option<&PathBuf>, seed: u64, rows: usize) -> anyhow::Result<StateVector> {
    let state = match file {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let pairs: Vec<[f64; 2]> = serde_json::from_str(&text).context("input file must be a JSON list of [re, im] pairs")?;
            StateVector::from_amplitudes(pairs.iter().map(|[re, im]| Complex64::new(*re, *im)).collect())?
        }
        None => {
            let parts: Vec<&str> = names.split(',').map(str::trim).collect();
            let mut st = StateVector::empty();
            for (k, name) in parts.iter().enumerate() {
                let q = named_input(name, seed.wrapping_add(k as u64)).with_context(|| format!("unknown input state {name}"))?;
                st = st.tensor(&q)?;
            }
            st
        }
    };
    if state.num_qubits() != rows {
        bail!("input has {} qubits, the computation takes {rows}", state.num_qubits());
    }
    Ok(state)
}

/// A library pattern name or a path to a pattern file.
pub fn load_pattern(spec: &str) -> anyhow::Result<BrickworkPattern> {
    if let Some(p) = library::by_name(spec) {
        return Ok(p);
    }
    let text = std::fs::read_to_string(spec).with_context(|| format!("{spec} is neither a library pattern nor a readable file"))?;
    Ok(BrickworkPattern::from_json(&text)?)
}
