use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{gen_world, ContentParams, Domain, Family, Sample, SpecParams, World, WorldConfig, IMAGE_SIDE};
use crate::imageio;
use crate::{Error, Result};

/// Version of the on-disk dataset layout.
pub const DATASET_FORMAT: u32 = 1;

/// Unpaired samples of both domains.
#[derive(Debug, Clone, PartialEq)]
pub struct Datasets {
    pub a: Vec<Sample>,
    pub b: Vec<Sample>,
}

impl Datasets {
    /// Draws `n_a` and `n_b` samples from independent seed streams.
    pub fn generate(world: &World, n_a: usize, n_b: usize, seed: u64) -> Self {
        Self {
            a: world.sample_domain(Domain::A, n_a, seed),
            b: world.sample_domain(Domain::B, n_b, seed),
        }
    }

    pub fn domain(&self, d: Domain) -> &[Sample] {
        match d {
            Domain::A => &self.a,
            Domain::B => &self.b,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct WorldFile {
    format_version: u32,
    seed: u64,
    config: WorldConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    config_hash: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct Row {
    data: Vec<f64>,
    hidden_content: ContentParams,
    hidden_spec: Option<SpecParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    config_hash: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    config_hash: Option<String>,
    samples: BTreeMap<String, ManifestEntry>,
}

#[derive(Serialize, Deserialize)]
struct ManifestEntry {
    hidden_content: ContentParams,
    hidden_spec: Option<SpecParams>,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::format(path, e))?;
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::format(path, e))
}

/// Writes `world.json` plus one directory per domain. `stamp` (typically a
/// config hash) is recorded in every file written.
pub fn write_dataset(root: &Path, world: &World, data: &Datasets, stamp: Option<&str>) -> Result<()> {
    write_json(
        &root.join("world.json"),
        &WorldFile {
            format_version: DATASET_FORMAT,
            seed: world.seed(),
            config: world.config().clone(),
            config_hash: stamp.map(str::to_string),
        },
    )?;
    for d in [Domain::A, Domain::B] {
        let dir = root.join(d.label());
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let samples = data.domain(d);
        match world.family() {
            Family::Vector => {
                let path = dir.join("samples.jsonl");
                let mut f = BufWriter::new(File::create(&path).map_err(|e| Error::io(&path, e))?);
                for s in samples {
                    let row = Row {
                        data: s.data.clone(),
                        hidden_content: s.hidden_content.clone(),
                        hidden_spec: s.hidden_spec.clone(),
                        config_hash: stamp.map(str::to_string),
                    };
                    let line = serde_json::to_string(&row).map_err(|e| Error::format(&path, e))?;
                    writeln!(f, "{line}").map_err(|e| Error::io(&path, e))?;
                }
                f.flush().map_err(|e| Error::io(&path, e))?;
            }
            Family::Image => {
                let text: Vec<(&str, &str)> = stamp.iter().map(|h| ("config_hash", *h)).collect();
                let mut manifest = BTreeMap::new();
                for (i, s) in samples.iter().enumerate() {
                    let name = format!("{i:06}.png");
                    let side = IMAGE_SIDE as u32;
                    imageio::write_gray(&dir.join(&name), side, side, &s.data, &text)?;
                    manifest.insert(
                        name,
                        ManifestEntry {
                            hidden_content: s.hidden_content.clone(),
                            hidden_spec: s.hidden_spec.clone(),
                        },
                    );
                }
                write_json(
                    &dir.join("manifest.json"),
                    &Manifest {
                        config_hash: stamp.map(str::to_string),
                        samples: manifest,
                    },
                )?;
            }
        }
    }
    Ok(())
}

/// Reads a directory written by [`write_dataset`], rebuilding its world.
pub fn read_dataset(root: &Path) -> Result<(World, Datasets)> {
    let wpath = root.join("world.json");
    let wf: WorldFile = read_json(&wpath)?;
    if wf.format_version != DATASET_FORMAT {
        return Err(Error::format(
            &wpath,
            format!("format version {} (expected {DATASET_FORMAT})", wf.format_version),
        ));
    }
    let world = gen_world(&wf.config, wf.seed)?;
    let mut out = Datasets { a: vec![], b: vec![] };
    for d in [Domain::A, Domain::B] {
        let dir = root.join(d.label());
        let rows: Vec<(Vec<f64>, ContentParams, Option<SpecParams>)> = match world.family() {
            Family::Vector => {
                let path = dir.join("samples.jsonl");
                let f = File::open(&path).map_err(|e| Error::io(&path, e))?;
                let mut rows = vec![];
                for line in BufReader::new(f).lines() {
                    let line = line.map_err(|e| Error::io(&path, e))?;
                    if line.trim().is_empty() {
                        continue;
                    }
                    let r: Row = serde_json::from_str(&line).map_err(|e| Error::format(&path, e))?;
                    rows.push((r.data, r.hidden_content, r.hidden_spec));
                }
                rows
            }
            Family::Image => {
                let manifest: Manifest = read_json(&dir.join("manifest.json"))?;
                let mut rows = vec![];
                for (name, e) in manifest.samples {
                    let (_, _, px) = imageio::read_gray(&dir.join(&name))?;
                    rows.push((px, e.hidden_content, e.hidden_spec));
                }
                rows
            }
        };
        for (data, hidden_content, hidden_spec) in rows {
            if data.len() != world.ambient_dim() {
                return Err(Error::format(&dir, format!("sample of length {}", data.len())));
            }
            if hidden_spec.is_some() != (d == Domain::B) {
                return Err(Error::format(&dir, "specification presence does not match domain"));
            }
            let s = Sample {
                data,
                domain: d,
                hidden_content,
                hidden_spec,
            };
            match d {
                Domain::A => out.a.push(s),
                Domain::B => out.b.push(s),
            }
        }
    }
    Ok((world, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vector_dataset_roundtrip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let w = gen_world(&WorldConfig::default(), 4).unwrap();
        let d = Datasets::generate(&w, 20, 30, 1);
        write_dataset(dir.path(), &w, &d, Some("abc")).unwrap();
        let (w2, d2) = read_dataset(dir.path()).unwrap();
        assert_eq!(w2.config(), w.config());
        assert_eq!(d2, d);
        let first = fs::read(dir.path().join("B/samples.jsonl")).unwrap();
        write_dataset(dir.path(), &w, &d, Some("abc")).unwrap();
        assert_eq!(fs::read(dir.path().join("B/samples.jsonl")).unwrap(), first);
    }

    #[test]
    fn image_dataset_roundtrip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let w = gen_world(&WorldConfig::image(), 4).unwrap();
        let d = Datasets::generate(&w, 5, 6, 2);
        write_dataset(dir.path(), &w, &d, None).unwrap();
        let (_, d2) = read_dataset(dir.path()).unwrap();
        assert_eq!(d2, d);
    }

    #[test]
    fn missing_dataset_is_an_io_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(read_dataset(&dir.path().join("nope")), Err(Error::Io { .. })));
    }

    /// Uniform prior: mean 1/2, standard error sqrt(1/12 / n).
    #[test]
    fn content_mean_matches_prior() {
        let w = gen_world(&WorldConfig::default(), 1).unwrap();
        let n = 10_000;
        let b = w.sample_domain(Domain::B, n, 21);
        let se = (1.0 / 12.0 / n as f64).sqrt();
        for j in 0..w.content_dim() {
            let m = b.iter().map(|s| s.hidden_content.values()[j]).sum::<f64>() / n as f64;
            assert!((m - 0.5).abs() < 3.0 * se, "component {j}: mean {m}");
        }
    }

    #[test]
    fn content_and_spec_are_uncorrelated() {
        let w = gen_world(&WorldConfig::default(), 1).unwrap();
        let n = 10_000;
        let b = w.sample_domain(Domain::B, n, 22);
        let col = |f: &dyn Fn(&Sample) -> f64| -> Vec<f64> { b.iter().map(f).collect() };
        let corr = |x: &[f64], y: &[f64]| {
            let (mx, my) = (x.iter().sum::<f64>() / n as f64, y.iter().sum::<f64>() / n as f64);
            let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
            let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
            let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
            sxy / (sxx * syy).sqrt()
        };
        for i in 0..w.content_dim() {
            let c = col(&|s| s.hidden_content.values()[i]);
            for j in 0..w.spec_dim() {
                let s = col(&|s| s.hidden_spec.as_ref().unwrap().values()[j]);
                let r = corr(&c, &s);
                assert!(r.abs() < 3.0 / (n as f64).sqrt(), "({i},{j}): {r}");
            }
        }
    }
}
