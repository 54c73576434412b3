//! Resolves command-line sample references: `A:<index>` or `B:<index>` into
//! the generated dataset, or a `.png` / `.json` file.

use std::fs;
use std::path::Path;

use latentswap::imageio;
use latentswap::synthworld::{Datasets, Domain, Sample, IMAGE_SIDE};
use latentswap::World;
use serde::Deserialize;

use crate::CliError;

#[derive(Deserialize)]
#[serde(untagged)]
enum VectorFile {
    Bare(Vec<f64>),
    /// What `transfer` and `remove` write, so outputs can be fed back in.
    Output { output: Vec<f64> },
}

fn dataset_ref(s: &str) -> Option<(Domain, usize)> {
    let (d, i) = s.split_once(':')?;
    let d = match d {
        "A" | "a" => Domain::A,
        "B" | "b" => Domain::B,
        _ => return None,
    };
    Some((d, i.parse().ok()?))
}

/// Reads a file input; its hidden parameters are the world's nearest fit.
fn from_file(world: &World, path: &Path) -> Result<Sample, CliError> {
    let data = match path.extension().and_then(|e| e.to_str()) {
        Some("png") => {
            let (w, h, px) = imageio::read_gray(path)?;
            if world.as_image().is_none() || (w as usize, h as usize) != (IMAGE_SIDE, IMAGE_SIDE) {
                return Err(CliError::Config(format!(
                    "{}: {w}×{h} image does not fit this world",
                    path.display()
                )));
            }
            px
        }
        Some("json") => {
            let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            match serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))? {
                VectorFile::Bare(v) | VectorFile::Output { output: v } => v,
            }
        }
        _ => {
            return Err(CliError::Config(format!(
                "{}: inputs are A:<i>, B:<i>, .png or .json",
                path.display()
            )))
        }
    };
    let fit = world.decompose_data(&data)?;
    Ok(Sample {
        data,
        domain: Domain::B,
        hidden_content: fit.content,
        hidden_spec: Some(fit.spec),
    })
}

pub fn resolve(world: &World, data: &Datasets, s: &str) -> Result<Sample, CliError> {
    match dataset_ref(s) {
        Some((d, i)) => {
            let pool = data.domain(d);
            pool.get(i).cloned().ok_or_else(|| {
                CliError::Config(format!("{s}: domain {} has {} samples", d.label(), pool.len()))
            })
        }
        None => from_file(world, Path::new(s)),
    }
}
