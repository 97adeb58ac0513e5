use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;

use cluster_theta::fixtures::{a2_seed, kronecker_extension_seed, kronecker_seed, three_wall_seed, torus_seed};
use cluster_theta::io::parse_seed;
use cluster_theta::lattice::{default_eps1, default_eps2, LatticeVec, RationalVec};
use cluster_theta::seed::SeedDatum;

use crate::CliError;

#[derive(Parser, Debug)]
#[command(name = "cluster-theta", version, about = "Scattering diagrams, broken lines and theta functions for rank-2 seeds")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Seed JSON file, or one of: a2, kronecker, torus, three-wall, kronecker-ext.
    #[arg(long, global = true, default_value = "a2")]
    pub seed: String,
    /// Truncation order k (at least 2).
    #[arg(long, global = true, default_value_t = 6)]
    pub order: u32,
    /// Half-width of the sampling box (lattice points in [-b, b]²), or of the drawing.
    #[arg(long = "box", global = true, default_value_t = 2)]
    pub bx: i64,
    /// Output path prefix; without it the main artifact goes to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Basepoint: `+`, `-`, or a point `x,y` with rational coordinates.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub chamber: Option<String>,
    /// Perturbation directions `a,b;c,d` for the first and second ε-levels.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub perturb: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Complete the seed's diagram and write it as JSON (and SVG with --out).
    Scatter,
    /// Theta function at a basepoint, with its broken-line trace.
    Theta {
        #[arg(long, allow_hyphen_values = true)]
        index: String,
    },
    /// Certified valuation of a theta function along a covector.
    Val {
        #[arg(long, allow_hyphen_values = true)]
        index: String,
        #[arg(long, allow_hyphen_values = true)]
        covector: String,
    },
    /// Tropicalization samples along rays, as CSV.
    Trop {
        #[arg(long, allow_hyphen_values = true)]
        index: String,
        /// Number of sampled ray directions.
        #[arg(long, default_value_t = 8)]
        rays: usize,
    },
    /// Run a verification and write its report.
    Check {
        #[arg(value_enum)]
        which: CheckKind,
        #[arg(long, value_enum, default_value_t = DualityArg::Chiral)]
        duality: DualityArg,
        /// Extension seed for `extension` (file or built-in name).
        #[arg(long, default_value = "kronecker-ext")]
        extension: String,
        /// Indices for `extension`, separated by `;`.
        #[arg(long, allow_hyphen_values = true)]
        index: Option<String>,
        /// Lattice map `a,b;c,d` for `adjunction`.
        #[arg(long, allow_hyphen_values = true, default_value = "1,1;0,1")]
        matrix: String,
    },
    /// Draw the diagram with the broken lines of the given indices.
    Render {
        /// Indices separated by `;`.
        #[arg(long, allow_hyphen_values = true)]
        index: Option<String>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckKind {
    Vit,
    Reciprocity,
    Extension,
    Newton,
    Specialize,
    Adjunction,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DualityArg {
    Chiral,
    ChiralLanglands,
    Langlands,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChamberArg {
    Plus,
    Minus,
    Point(RationalVec),
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn load_seed(spec: &str) -> Result<SeedDatum, CliError> {
    Ok(match spec {
        "a2" => a2_seed(),
        "kronecker" => kronecker_seed(),
        "torus" => torus_seed(),
        "three-wall" => three_wall_seed(),
        "kronecker-ext" => kronecker_extension_seed(),
        path => {
            let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read seed file {path}: {e}")))?;
            parse_seed(&text)?
        }
    })
}

pub fn parse_rvec(text: &str) -> Result<RationalVec, CliError> {
    let v = text
        .split(',')
        .map(|x| x.trim().parse::<BigRational>().map_err(|e| usage(format!("bad rational {x:?} in {text:?}: {e}"))))
        .collect::<Result<RationalVec, _>>()?;
    if v.len() != 2 {
        return Err(usage(format!("expected two coordinates, got {text:?}")));
    }
    Ok(v)
}

pub fn parse_lvec(text: &str) -> Result<LatticeVec, CliError> {
    let v = parse_rvec(text)?;
    if v.iter().any(|x| !x.is_integer()) {
        return Err(usage(format!("expected integer coordinates, got {text:?}")));
    }
    Ok(v.iter().map(|x| x.to_integer()).collect())
}

pub fn parse_lvecs(text: &str) -> Result<Vec<LatticeVec>, CliError> {
    text.split(';').map(parse_lvec).collect()
}

pub fn parse_int_matrix(text: &str) -> Result<Vec<Vec<i64>>, CliError> {
    let rows: Vec<Vec<i64>> = text
        .split(';')
        .map(|row| row.split(',').map(|x| x.trim().parse::<i64>().map_err(|e| usage(format!("bad entry {x:?}: {e}")))).collect())
        .collect::<Result<_, _>>()?;
    if rows.len() != 2 || rows.iter().any(|r| r.len() != 2) {
        return Err(usage(format!("expected a 2×2 matrix `a,b;c,d`, got {text:?}")));
    }
    Ok(rows)
}

pub fn parse_chamber(text: &str) -> Result<ChamberArg, CliError> {
    match text.trim() {
        "+" => Ok(ChamberArg::Plus),
        "-" | "−" => Ok(ChamberArg::Minus),
        point => Ok(ChamberArg::Point(parse_rvec(point)?)),
    }
}

pub fn parse_perturb(text: Option<&str>) -> Result<(RationalVec, RationalVec), CliError> {
    let Some(text) = text else {
        return Ok((default_eps1(), default_eps2()));
    };
    let parts: Vec<&str> = text.split(';').collect();
    if parts.len() != 2 {
        return Err(usage(format!("--perturb expects `a,b;c,d`, got {text:?}")));
    }
    let (e1, e2) = (parse_rvec(parts[0])?, parse_rvec(parts[1])?);
    if e1.iter().chain(&e2).all(|x| x == &BigRational::from_integer(0.into())) {
        return Err(usage("--perturb directions must not both vanish"));
    }
    Ok((e1, e2))
}

impl Common {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.order < 2 {
            return Err(usage(format!("--order must be at least 2, got {}", self.order)));
        }
        if self.bx < 1 {
            return Err(usage(format!("--box must be at least 1, got {}", self.bx)));
        }
        Ok(())
    }
}
