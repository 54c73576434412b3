use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use latentswap::evaluate::{self, Oracle, Translator};
use latentswap::imageio;
use latentswap::lemma_lab::{format_summary, run_suite, summarize};
use latentswap::synthworld::{gen_world, read_dataset, write_dataset, Datasets, Family, Sample, IMAGE_SIDE};
use latentswap::trainer::{Checkpoint, RunFiles, TrainData, Trainer};
use latentswap::{Error, ModelBundle, World};
use serde::Serialize;

use crate::config::RunConfig;
use crate::inputs::resolve;
use crate::CliError;

#[derive(Serialize)]
struct Stamped<'a, T: Serialize> {
    config_hash: &'a str,
    #[serde(flatten)]
    body: T,
}

pub struct Context {
    cfg: RunConfig,
    hash: String,
    root: PathBuf,
}

impl Context {
    pub fn new(cfg: RunConfig) -> Self {
        Self {
            hash: cfg.hash(),
            root: cfg.output_dir.clone(),
            cfg,
        }
    }

    fn data_dir(&self) -> PathBuf {
        self.root.join("data")
    }

    fn train_dir(&self) -> PathBuf {
        self.root.join("train")
    }

    fn mkdir(&self, dir: &Path) -> Result<(), CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
    }

    fn write_json<T: Serialize>(&self, name: &str, body: T) -> Result<PathBuf, CliError> {
        self.mkdir(&self.root)?;
        let path = self.root.join(name);
        let doc = Stamped {
            config_hash: &self.hash,
            body,
        };
        let text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Config(e.to_string()))?;
        fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }

    fn write_png(&self, name: &str, w: usize, h: usize, px: &[f64]) -> Result<PathBuf, CliError> {
        self.mkdir(&self.root)?;
        let path = self.root.join(name);
        imageio::write_gray(&path, w as u32, h as u32, px, &[("config_hash", &self.hash)])?;
        Ok(path)
    }

    /// The generated dataset, which must come from the configured world.
    fn load_data(&self) -> Result<(World, Datasets), CliError> {
        let (world, data) = read_dataset(&self.data_dir())?;
        if world.config() != &self.cfg.world || world.seed() != self.cfg.data.seed {
            return Err(CliError::Config(format!(
                "{} was generated for a different world; rerun gen-data",
                self.data_dir().display()
            )));
        }
        Ok((world, data))
    }

    fn load_model(&self, checkpoint: Option<&Path>) -> Result<ModelBundle, CliError> {
        let path = checkpoint.map_or_else(|| self.train_dir().join("latest.json"), Path::to_path_buf);
        let ck = Checkpoint::load(&path)?;
        if ck.model.config != self.cfg.model {
            return Err(Error::CheckpointMismatch(format!(
                "{} holds a model with a different configuration",
                path.display()
            ))
            .into());
        }
        Ok(ck.model)
    }

    pub fn gen_data(&self) -> Result<(), CliError> {
        let world = gen_world(&self.cfg.world, self.cfg.data.seed)?;
        let data = Datasets::generate(&world, self.cfg.data.n_a, self.cfg.data.n_b, self.cfg.data.seed);
        let dir = self.data_dir();
        for sub in ["A", "B"] {
            let d = dir.join(sub);
            if d.exists() {
                fs::remove_dir_all(&d).map_err(|e| CliError::io(&d, e))?;
            }
        }
        self.mkdir(&dir)?;
        write_dataset(&dir, &world, &data, Some(&self.hash))?;
        println!("wrote {} A and {} B samples to {}", data.a.len(), data.b.len(), dir.display());
        Ok(())
    }

    pub fn train(&self, resume: bool) -> Result<(), CliError> {
        let (_, data) = self.load_data()?;
        let data = TrainData::from_datasets(&data)?;
        let files = RunFiles::new(self.train_dir())?.stamped(&self.hash);
        let mut trainer = if resume {
            let ck = Checkpoint::load(&files.latest())?;
            if ck.model.config != self.cfg.model {
                return Err(Error::CheckpointMismatch("model configuration differs from the checkpoint's".into()).into());
            }
            Trainer::resume(ck, self.cfg.train.clone())?
        } else {
            clear_run(&files.dir)?;
            Trainer::new(ModelBundle::new(self.cfg.model.clone())?, self.cfg.train.clone())?
        };
        trainer.run(&data, Some(&files))?;
        if let Some(r) = trainer.reports().last() {
            println!(
                "step {}: L_A {:.5} L_B {:.5} L_D {:.5} tc {:.4} probe {:.3}",
                r.step, r.l_a, r.l_b, r.l_d, r.gaussian_tc_proxy, r.probe_accuracy
            );
        }
        println!("checkpoints in {}", files.dir.display());
        Ok(())
    }

    pub fn eval(&self, checkpoint: Option<&Path>, oracle: bool) -> Result<(), CliError> {
        let (world, data) = self.load_data()?;
        let (model, ideal);
        let (t, name): (&dyn Translator, String) = if oracle {
            ideal = Oracle(&world);
            (&ideal, "oracle".into())
        } else {
            model = self.load_model(checkpoint)?;
            (&model, format!("checkpoint at step {}", model.step))
        };
        let report = evaluate::evaluate(t, &world, &data, &self.cfg.eval)?;
        #[derive(Serialize)]
        struct Body<'a> {
            translator: &'a str,
            report: &'a evaluate::EvalReport,
        }
        let path = self.write_json("eval.json", Body { translator: &name, report: &report })?;
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
        println!("wrote {}", path.display());
        Ok(())
    }

    /// Vector results as JSON, images as PNG.
    fn emit(&self, world: &World, stem: &str, inputs: &[(&str, &Sample)], output: &[f64]) -> Result<(), CliError> {
        let path = match world.family() {
            Family::Image => self.write_png(&format!("{stem}.png"), IMAGE_SIDE, IMAGE_SIDE, output)?,
            Family::Vector => {
                #[derive(Serialize)]
                struct Body<'a> {
                    inputs: BTreeMap<&'a str, &'a [f64]>,
                    output: &'a [f64],
                }
                let inputs = inputs.iter().map(|(k, s)| (*k, s.data.as_slice())).collect();
                self.write_json(&format!("{stem}.json"), Body { inputs, output })?
            }
        };
        println!("wrote {}", path.display());
        Ok(())
    }

    pub fn transfer(&self, checkpoint: Option<&Path>, source: &str, guide: &str) -> Result<(), CliError> {
        let (world, data) = self.load_data()?;
        let model = self.load_model(checkpoint)?;
        let (a, b) = (resolve(&world, &data, source)?, resolve(&world, &data, guide)?);
        let y = model.translate(&a.data, &b.data)?;
        self.emit(&world, "transfer", &[("source", &a), ("guide", &b)], &y)
    }

    pub fn remove(&self, checkpoint: Option<&Path>, input: &str) -> Result<(), CliError> {
        let (world, data) = self.load_data()?;
        let model = self.load_model(checkpoint)?;
        let x = resolve(&world, &data, input)?;
        let y = model.remove(&x.data)?;
        self.emit(&world, "remove", &[("input", &x)], &y)
    }

    pub fn interpolate(
        &self,
        checkpoint: Option<&Path>,
        source: &str,
        guide: &str,
        guide2: &str,
        steps: usize,
    ) -> Result<(), CliError> {
        let (world, data) = self.load_data()?;
        let model = self.load_model(checkpoint)?;
        let a = resolve(&world, &data, source)?;
        let (b1, b2) = (resolve(&world, &data, guide)?, resolve(&world, &data, guide2)?);
        let path = match world.family() {
            Family::Image => {
                let path = self.root.join("interpolate.png");
                self.mkdir(&self.root)?;
                evaluate::export_interpolation(&model, &world, &a, &b1, &b2, steps, &path, Some(&self.hash))?;
                path
            }
            Family::Vector => {
                let frames = evaluate::interpolation_frames(&model, &a, &b1, &b2, steps)?;
                #[derive(Serialize)]
                struct Body {
                    steps: usize,
                    frames: Vec<Vec<f64>>,
                }
                self.write_json("interpolate.json", Body { steps, frames })?
            }
        };
        println!("wrote {}", path.display());
        Ok(())
    }

    pub fn grid(&self, checkpoint: Option<&Path>, sources: Vec<String>, guides: Vec<String>, size: usize) -> Result<(), CliError> {
        let (world, data) = self.load_data()?;
        let model = self.load_model(checkpoint)?;
        let pick = |given: Vec<String>, d: &str| -> Result<Vec<Sample>, CliError> {
            let refs = if given.is_empty() {
                (0..size).map(|i| format!("{d}:{i}")).collect()
            } else {
                given
            };
            refs.iter().map(|r| resolve(&world, &data, r)).collect()
        };
        let (src, gd) = (pick(sources, "A")?, pick(guides, "B")?);
        if src.is_empty() || gd.is_empty() {
            return Err(CliError::Config("grid needs at least one source and one guide".into()));
        }
        let path = match world.family() {
            Family::Image => {
                let path = self.root.join("grid.png");
                self.mkdir(&self.root)?;
                evaluate::export_grid(&model, &world, &src, &gd, &path, Some(&self.hash))?;
                path
            }
            Family::Vector => {
                let cells = gd
                    .iter()
                    .map(|g| src.iter().map(|s| model.translate(&s.data, &g.data)).collect())
                    .collect::<latentswap::Result<Vec<Vec<_>>>>()?;
                #[derive(Serialize)]
                struct Body {
                    sources: Vec<Vec<f64>>,
                    guides: Vec<Vec<f64>>,
                    /// `cells[guide][source]`
                    cells: Vec<Vec<Vec<f64>>>,
                }
                let data = |v: &[Sample]| v.iter().map(|s| s.data.clone()).collect();
                self.write_json(
                    "grid.json",
                    Body {
                        sources: data(&src),
                        guides: data(&gd),
                        cells,
                    },
                )?
            }
        };
        println!("wrote {}", path.display());
        Ok(())
    }

    pub fn verify_lemmas(&self) -> Result<(), CliError> {
        let reports = run_suite(&self.cfg.lemmas)?;
        let summary = summarize(&reports);
        #[derive(Serialize)]
        struct Body<'a, S, R> {
            seed: u64,
            summary: &'a S,
            reports: &'a R,
        }
        let path = self.write_json(
            "lemmas.json",
            Body {
                seed: self.cfg.lemmas.seed,
                summary: &summary,
                reports: &reports,
            },
        )?;
        print!("{}", format_summary(&summary));
        println!("wrote {}", path.display());
        match reports.iter().filter(|r| r.failed()).count() {
            0 => Ok(()),
            n => Err(CliError::Verification(n)),
        }
    }
}

/// Removes the files of an earlier run so a fresh one leaves no stale
/// checkpoints behind.
fn clear_run(dir: &Path) -> Result<(), CliError> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
    for e in entries {
        let path = e.map_err(|e| CliError::io(dir, e))?.path();
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
        let ours = (name.starts_with("checkpoint-") && name.ends_with(".json"))
            || name == "latest.json"
            || name == "metrics.jsonl";
        if ours {
            fs::remove_file(&path).map_err(|e| CliError::io(&path, e))?;
        }
    }
    Ok(())
}
