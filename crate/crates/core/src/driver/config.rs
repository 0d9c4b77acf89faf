use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::kernels::{KernelVariant, Material, Microblock};
use crate::layout;
use crate::mesh::{self, Mesh, Rect};

#[derive(Clone, Debug, PartialEq)]
pub enum MeshSource {
    File(PathBuf),
    Rect { nx: usize, ny: usize, extent: Rect },
}

impl MeshSource {
    pub fn load(&self) -> Result<Mesh> {
        match self {
            MeshSource::File(p) => mesh::read_mesh(p),
            MeshSource::Rect { nx, ny, extent } => Mesh::rectangle(*nx, *ny, *extent),
        }
    }
}

/// Microblock size: chosen from the padding-waste threshold, or fixed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MbChoice {
    Auto,
    Fixed(usize),
}

impl fmt::Display for MbChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MbChoice::Auto => f.write_str("auto"),
            MbChoice::Fixed(k) => write!(f, "{k}"),
        }
    }
}

impl FromStr for MbChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(MbChoice::Auto);
        }
        match s.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(MbChoice::Fixed(k)),
            _ => Err(Error::Config(format!("mb must be 'auto' or a positive integer, got '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Precision {
    #[default]
    Single,
    Double,
}

impl FromStr for Precision {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" | "f32" => Ok(Precision::Single),
            "double" | "f64" => Ok(Precision::Double),
            _ => Err(Error::Config(format!("precision must be single or double, got '{s}'"))),
        }
    }
}

/// Initial data for a run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InitialCondition {
    /// Resonant PEC mode of the unit square; the analytic solution is tracked.
    Cavity,
    /// Gaussian `Ez` pulse at the domain center with zero `H`; no reference.
    Pulse,
    /// Spatially uniform magnetic field with `Ez = 0`, a steady PEC solution.
    Uniform { hx: f64, hy: f64 },
}

impl FromStr for InitialCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cavity" => Ok(Self::Cavity),
            "pulse" => Ok(Self::Pulse),
            "uniform" => Ok(Self::Uniform { hx: 1.0, hy: -0.5 }),
            _ => Err(Error::Config(format!(
                "init must be cavity, pulse or uniform, got '{s}'"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub mesh: MeshSource,
    pub degree: usize,
    pub alpha: f64,
    pub epsilon: f64,
    pub mu: f64,
    pub cfl: f64,
    pub final_time: f64,
    pub align: usize,
    pub waste_threshold: f64,
    pub mb: MbChoice,
    /// Steps between snapshots; 0 records only the initial and final state.
    pub snap_every: usize,
    pub out: Option<PathBuf>,
    pub mode: (usize, usize),
    /// `None` picks the cavity mode on the unit square and a pulse elsewhere.
    pub init: Option<InitialCondition>,
    pub precision: Precision,
    pub variant: KernelVariant,
    pub tune_reps: usize,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            mesh: MeshSource::Rect {
                nx: 8,
                ny: 8,
                extent: Rect::unit(),
            },
            degree: 4,
            alpha: 1.0,
            epsilon: 1.0,
            mu: 1.0,
            cfl: 1.0,
            final_time: 1.0,
            align: layout::DEFAULT_ALIGN,
            waste_threshold: layout::DEFAULT_WASTE_THRESHOLD,
            mb: MbChoice::Auto,
            snap_every: 0,
            out: None,
            mode: (1, 1),
            init: None,
            precision: Precision::Single,
            variant: KernelVariant::ElementWise,
            tune_reps: 20,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("invalid value '{value}' for '{key}'")))
}

impl Config {
    pub fn material(&self) -> Material {
        Material {
            epsilon: self.epsilon,
            mu: self.mu,
        }
    }

    pub fn microblock(&self) -> Microblock {
        match self.mb {
            MbChoice::Auto => Microblock::Auto {
                waste_threshold: self.waste_threshold,
                mb_max: layout::DEFAULT_MB_MAX,
            },
            MbChoice::Fixed(k) => Microblock::Fixed(k),
        }
    }

    /// Sets one key. Keys match the CLI flag names; `_` and `-` are interchangeable.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('_', "-");
        let words: Vec<&str> = value.split_whitespace().collect();
        match key.as_str() {
            "mesh" => self.mesh = MeshSource::File(PathBuf::from(value.trim())),
            "rect" => {
                let nums = words
                    .iter()
                    .map(|w| parse::<f64>("rect", w))
                    .collect::<Result<Vec<_>>>()?;
                let cells = |x: f64| {
                    if x >= 1.0 && x.fract() == 0.0 {
                        Ok(x as usize)
                    } else {
                        Err(Error::Config(format!("rect cell count must be a positive integer, got {x}")))
                    }
                };
                self.mesh = match nums.as_slice() {
                    [nx, ny] => MeshSource::Rect {
                        nx: cells(*nx)?,
                        ny: cells(*ny)?,
                        extent: Rect::unit(),
                    },
                    [nx, ny, x0, x1, y0, y1] => MeshSource::Rect {
                        nx: cells(*nx)?,
                        ny: cells(*ny)?,
                        extent: Rect::new(*x0, *x1, *y0, *y1),
                    },
                    _ => {
                        return Err(Error::Config(
                            "rect expects 'NX NY' or 'NX NY X0 X1 Y0 Y1'".into(),
                        ))
                    }
                };
            }
            "degree" => self.degree = parse(&key, value)?,
            "alpha" => self.alpha = parse(&key, value)?,
            "epsilon" => self.epsilon = parse(&key, value)?,
            "mu" => self.mu = parse(&key, value)?,
            "cfl" => self.cfl = parse(&key, value)?,
            "final-time" => self.final_time = parse(&key, value)?,
            "align" => self.align = parse(&key, value)?,
            "waste-threshold" => self.waste_threshold = parse(&key, value)?,
            "mb" => self.mb = value.trim().parse()?,
            "snap-every" => self.snap_every = parse(&key, value)?,
            "out" => self.out = Some(PathBuf::from(value.trim())),
            "mode" => match words.as_slice() {
                [m, n] => self.mode = (parse(&key, m)?, parse(&key, n)?),
                _ => return Err(Error::Config("mode expects 'M N'".into())),
            },
            "init" => self.init = Some(value.trim().parse()?),
            "precision" => self.precision = value.trim().parse()?,
            "variant" => self.variant = value.trim().parse()?,
            "tune-reps" => self.tune_reps = parse(&key, value)?,
            _ => return Err(Error::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Applies a flat `key = value` file on top of `self`. `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected 'key = value'", i + 1))
            })?;
            self.set(k, v)
                .map_err(|e| Error::Config(format!("line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.apply_text(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("epsilon", self.epsilon),
            ("mu", self.mu),
            ("cfl", self.cfl),
            ("waste-threshold", self.waste_threshold),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.waste_threshold >= 1.0 {
            return Err(Error::Config("waste-threshold must be below 1".into()));
        }
        if !(self.final_time >= 0.0 && self.final_time.is_finite()) {
            return Err(Error::Config(format!(
                "final-time must be non-negative, got {}",
                self.final_time
            )));
        }
        if !(self.alpha >= 0.0) {
            return Err(Error::Config(format!("alpha must be >= 0, got {}", self.alpha)));
        }
        if self.alpha > 1.0 {
            log::warn!("alpha = {} lies outside [0, 1]", self.alpha);
        }
        if self.align == 0 {
            return Err(Error::Config("align must be positive".into()));
        }
        if self.mode.0 == 0 || self.mode.1 == 0 {
            return Err(Error::Config("mode indices must be >= 1".into()));
        }
        if !(1..=crate::refelem::MAX_DEGREE).contains(&self.degree) {
            return Err(Error::UnsupportedDegree(self.degree));
        }
        Ok(())
    }
}
