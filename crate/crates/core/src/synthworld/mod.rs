//! Synthetic worlds with a known content/specification split.
//!
//! A [`World`] owns an invertible map between parameter pairs
//! `(content, spec)` and ambient samples. Domain `A` samples are rendered
//! without a specification, domain `B` samples with one. Because the map is
//! known, the ideal transfer `y(a, b)` (content of `a`, specification of `b`)
//! is available as an oracle for evaluation.
//!
//! Hidden parameters travel with each [`Sample`] for oracle and evaluation
//! code only; training consumes [`crate::trainer::TrainData`], which drops
//! them.

mod dataset;
mod image;
mod vector;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::seeding::{stream, tag};
use crate::{Error, Result};

pub use dataset::{read_dataset, write_dataset, Datasets, DATASET_FORMAT};
pub use image::{ImageWorld, GLYPHS, IMAGE_SIDE, TOP_ROWS};
pub use vector::{VectorWorld, LATTICE_BITS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Domain {
    A,
    B,
}

impl Domain {
    pub fn label(self) -> &'static str {
        match self {
            Domain::A => "A",
            Domain::B => "B",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Vector,
    Image,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mixing {
    /// Parameters are written straight into the first coordinates.
    Identity,
    /// A seeded orthogonal rotation followed by `½ + ½ tanh(·)`.
    Orthogonal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WorldConfig {
    pub family: Family,
    pub content_dim: usize,
    pub spec_dim: usize,
    pub ambient_dim: usize,
    pub mixing: Mixing,
    /// Value written into the specification slots of domain `A` samples
    /// (vector family). Outside `[0, 1]` so the attribute's absence is
    /// distinguishable from any drawn specification.
    pub absent_spec_value: f64,
}

impl Default for WorldConfig {
    fn default() -> Self {
        Self::vector(4, 2, 8)
    }
}

impl WorldConfig {
    pub fn vector(content_dim: usize, spec_dim: usize, ambient_dim: usize) -> Self {
        Self {
            family: Family::Vector,
            content_dim,
            spec_dim,
            ambient_dim,
            mixing: Mixing::Orthogonal,
            absent_spec_value: -0.5,
        }
    }

    pub fn image() -> Self {
        Self {
            family: Family::Image,
            content_dim: image::CONTENT_DIM,
            spec_dim: image::SPEC_DIM,
            ambient_dim: IMAGE_SIDE * IMAGE_SIDE,
            mixing: Mixing::Identity,
            absent_spec_value: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.content_dim == 0 || self.spec_dim == 0 {
            return Err(Error::InvalidDimensions(
                "content_dim and spec_dim must be at least 1".into(),
            ));
        }
        match self.family {
            Family::Vector => {
                if self.ambient_dim < self.content_dim + self.spec_dim {
                    return Err(Error::InvalidDimensions(format!(
                        "ambient_dim {} < content_dim {} + spec_dim {}",
                        self.ambient_dim, self.content_dim, self.spec_dim
                    )));
                }
                if !self.absent_spec_value.is_finite() {
                    return Err(Error::Config("absent_spec_value must be finite".into()));
                }
            }
            Family::Image => {
                let want = Self::image();
                if (self.content_dim, self.spec_dim, self.ambient_dim)
                    != (want.content_dim, want.spec_dim, want.ambient_dim)
                {
                    return Err(Error::InvalidDimensions(format!(
                        "image worlds have content_dim {}, spec_dim {}, ambient_dim {}",
                        want.content_dim, want.spec_dim, want.ambient_dim
                    )));
                }
            }
        }
        Ok(())
    }
}

macro_rules! unit_params {
    ($name:ident, $what:literal) => {
        #[doc = concat!("Components in `[0, 1]` describing the ", $what, " of a sample.")]
        #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(Vec<f64>);

        impl $name {
            pub fn new(values: Vec<f64>) -> Result<Self> {
                if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                    return Err(Error::OutOfRange(format!(
                        concat!($what, " component {} outside [0, 1]"),
                        v
                    )));
                }
                Ok(Self(values))
            }

            pub fn values(&self) -> &[f64] {
                &self.0
            }

            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }

            /// Mean absolute per-component difference.
            pub fn mean_abs_diff(&self, other: &Self) -> f64 {
                let n = self.0.len().max(1) as f64;
                self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).sum::<f64>() / n
            }
        }
    };
}

unit_params!(ContentParams, "content");
unit_params!(SpecParams, "specification");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub data: Vec<f64>,
    pub domain: Domain,
    pub hidden_content: ContentParams,
    pub hidden_spec: Option<SpecParams>,
}

/// Parameters recovered from an ambient vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub content: ContentParams,
    pub spec: SpecParams,
    /// Mean absolute per-coordinate gap between the input and the rendering
    /// of the recovered parameters.
    pub residual: f64,
    /// True when the input was not an exact rendering and the parameters are
    /// a nearest fit.
    pub projected: bool,
}

#[derive(Debug, Clone)]
enum Renderer {
    Vector(VectorWorld),
    Image(ImageWorld),
}

/// A seeded generative world.
#[derive(Debug, Clone)]
pub struct World {
    config: WorldConfig,
    seed: u64,
    renderer: Renderer,
}

const CONTENT_STREAM: u64 = tag("content");
const SPEC_STREAM: u64 = tag("spec");

/// Builds the world described by `config`; deterministic in `(config, seed)`.
pub fn gen_world(config: &WorldConfig, seed: u64) -> Result<World> {
    config.validate()?;
    let renderer = match config.family {
        Family::Vector => Renderer::Vector(VectorWorld::new(config, seed)),
        Family::Image => Renderer::Image(ImageWorld),
    };
    Ok(World {
        config: config.clone(),
        seed,
        renderer,
    })
}

impl World {
    pub fn config(&self) -> &WorldConfig {
        &self.config
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn family(&self) -> Family {
        self.config.family
    }

    pub fn content_dim(&self) -> usize {
        self.config.content_dim
    }

    pub fn spec_dim(&self) -> usize {
        self.config.spec_dim
    }

    pub fn ambient_dim(&self) -> usize {
        self.config.ambient_dim
    }

    /// Draws `n` i.i.d. samples. Sample `i` depends only on
    /// `(seed, domain, i)`; content and specification come from separate
    /// sub-streams, and the content prior is the same in both domains.
    pub fn sample_domain(&self, domain: Domain, n: usize, seed: u64) -> Vec<Sample> {
        (0..n)
            .map(|i| self.sample_at(domain, seed, i as u64))
            .collect()
    }

    pub fn sample_at(&self, domain: Domain, seed: u64, index: u64) -> Sample {
        let dtag = tag(domain.label());
        let mut crng = stream(seed, &[CONTENT_STREAM, dtag, index]);
        let content = ContentParams(self.draw_params(&mut crng, self.content_dim(), true));
        match domain {
            Domain::A => self.render_a(&content),
            Domain::B => {
                let mut srng = stream(seed, &[SPEC_STREAM, dtag, index]);
                let spec = SpecParams(self.draw_params(&mut srng, self.spec_dim(), false));
                self.render_b(&content, &spec)
            }
        }
    }

    fn draw_params<R: Rng>(&self, rng: &mut R, n: usize, content: bool) -> Vec<f64> {
        match &self.renderer {
            Renderer::Vector(_) => (0..n).map(|_| vector::draw_lattice(rng)).collect(),
            Renderer::Image(w) => w.draw(rng, content),
        }
    }

    fn render_a(&self, content: &ContentParams) -> Sample {
        let data = match &self.renderer {
            Renderer::Vector(v) => v.render(content.values(), None),
            Renderer::Image(w) => w.render(content.values(), None),
        };
        Sample {
            data,
            domain: Domain::A,
            hidden_content: content.clone(),
            hidden_spec: None,
        }
    }

    fn render_b(&self, content: &ContentParams, spec: &SpecParams) -> Sample {
        let data = match &self.renderer {
            Renderer::Vector(v) => v.render(content.values(), Some(spec.values())),
            Renderer::Image(w) => w.render(content.values(), Some(spec.values())),
        };
        Sample {
            data,
            domain: Domain::B,
            hidden_content: content.clone(),
            hidden_spec: Some(spec.clone()),
        }
    }

    fn check_dims(&self, content: &ContentParams, spec: Option<&SpecParams>) -> Result<()> {
        if content.len() != self.content_dim() {
            return Err(Error::DimensionMismatch {
                what: "content",
                expected: self.content_dim(),
                got: content.len(),
            });
        }
        if let Some(s) = spec {
            if s.len() != self.spec_dim() {
                return Err(Error::DimensionMismatch {
                    what: "spec",
                    expected: self.spec_dim(),
                    got: s.len(),
                });
            }
        }
        Ok(())
    }

    /// Renders a domain `B` sample from parameters (the inverse of
    /// [`World::decompose`]).
    pub fn compose(&self, content: &ContentParams, spec: &SpecParams) -> Result<Sample> {
        self.check_dims(content, Some(spec))?;
        Ok(self.render_b(content, spec))
    }

    /// Renders a domain `A` sample: the content without any specification.
    pub fn compose_a(&self, content: &ContentParams) -> Result<Sample> {
        self.check_dims(content, None)?;
        Ok(self.render_a(content))
    }

    /// Recovers `(content, spec)` from a domain `B` sample using only its
    /// data. Exact renderings decode exactly; anything else is projected to
    /// the nearest parameters and flagged.
    pub fn decompose(&self, b: &Sample) -> Result<Decomposition> {
        if b.domain != Domain::B {
            return Err(Error::SpecMissing);
        }
        self.decompose_data(&b.data)
    }

    /// [`World::decompose`] on a bare ambient vector, such as a model output.
    pub fn decompose_data(&self, data: &[f64]) -> Result<Decomposition> {
        if data.len() != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                what: "sample data",
                expected: self.ambient_dim(),
                got: data.len(),
            });
        }
        let (content, spec, residual) = match &self.renderer {
            Renderer::Vector(v) => v.decompose(data),
            Renderer::Image(w) => w.decompose(data),
        };
        Ok(Decomposition {
            content: ContentParams(content),
            spec: SpecParams(spec),
            projected: residual > 1e-12,
            residual,
        })
    }

    /// The ideal transfer: content of `x1`, specification of `x2`.
    pub fn oracle_y(&self, x1: &Sample, x2: &Sample) -> Result<Sample> {
        let spec = x2.hidden_spec.as_ref().ok_or(Error::SpecMissing)?;
        self.compose(&x1.hidden_content, spec)
    }

    /// The ideal removal: the content of `x` rendered without specification.
    pub fn oracle_remove(&self, x: &Sample) -> Sample {
        self.render_a(&x.hidden_content)
    }

    /// Largest per-parameter error [`World::decompose`] can make on an exact
    /// rendering of off-lattice parameters.
    pub fn param_tolerance(&self) -> (Vec<f64>, Vec<f64>) {
        match &self.renderer {
            Renderer::Vector(_) => {
                let t = 0.5 / (1u64 << LATTICE_BITS) as f64;
                (vec![t; self.content_dim()], vec![t; self.spec_dim()])
            }
            Renderer::Image(w) => w.tolerances(),
        }
    }

    pub fn as_image(&self) -> Option<&ImageWorld> {
        match &self.renderer {
            Renderer::Image(w) => Some(w),
            Renderer::Vector(_) => None,
        }
    }
}
