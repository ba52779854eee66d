use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use sepnet_core::construct::DensityField;
use sepnet_core::growth::GrowthFunction;
use sepnet_core::{NetError, Result};

/// Every experiment parameter; the JSON config file and the command-line flags both
/// fill this, flags taking precedence.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, clap::Args)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Net family: lattice, halfspace, patched, radial, onedim, identity.
    #[arg(long)]
    pub net: Option<String>,
    /// Growth function: sqrt, log, identity, const:K, power:A,BETA,
    /// power-log:A,BETA,ALPHA,C0, or a JSON file.
    #[arg(long)]
    pub phi: Option<String>,
    #[arg(long)]
    pub schedule_n: Option<usize>,
    /// Window radius.
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Criteria to verify: "all" or a comma list such as 1,3,7.
    #[arg(long)]
    pub suite: Option<String>,
    #[arg(long)]
    pub dim: Option<usize>,
    /// Lattice spacing.
    #[arg(long)]
    pub scale: Option<f64>,
    /// Halfspace density parameter in (1, 2).
    #[arg(long)]
    pub c: Option<f64>,
    /// Patch side lengths, comma separated.
    #[arg(long)]
    pub sides: Option<String>,
    /// Gap function ψ for patched nets (same syntax as --phi).
    #[arg(long)]
    pub psi: Option<String>,
    /// Density for patched nets: uniform or checkerboard:SIDE,LOW,HIGH.
    #[arg(long)]
    pub density: Option<String>,
    #[arg(long)]
    pub k_max: Option<usize>,
    /// Schedule constant K.
    #[arg(long)]
    pub schedule_k: Option<f64>,
    /// Largest radius at which bottleneck matchings are computed.
    #[arg(long)]
    pub bottleneck_max: Option<f64>,
    /// Fault injection for verify: INDEX,RBAR,R replaces a profile breakpoint.
    #[arg(long)]
    pub corrupt_slope: Option<String>,
    /// Skip SVG rendering.
    #[arg(long)]
    pub no_plots: bool,
}

impl ExperimentConfig {
    /// `self` with unset fields taken from `base`.
    pub fn over(self, base: ExperimentConfig) -> ExperimentConfig {
        ExperimentConfig {
            net: self.net.or(base.net),
            phi: self.phi.or(base.phi),
            schedule_n: self.schedule_n.or(base.schedule_n),
            radius: self.radius.or(base.radius),
            out: self.out.or(base.out),
            seed: self.seed.or(base.seed),
            suite: self.suite.or(base.suite),
            dim: self.dim.or(base.dim),
            scale: self.scale.or(base.scale),
            c: self.c.or(base.c),
            sides: self.sides.or(base.sides),
            psi: self.psi.or(base.psi),
            density: self.density.or(base.density),
            k_max: self.k_max.or(base.k_max),
            schedule_k: self.schedule_k.or(base.schedule_k),
            bottleneck_max: self.bottleneck_max.or(base.bottleneck_max),
            corrupt_slope: self.corrupt_slope.or(base.corrupt_slope),
            no_plots: self.no_plots || base.no_plots,
        }
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn dim(&self) -> usize {
        self.dim.unwrap_or(2)
    }

    pub fn net_name(&self, default: &str) -> String {
        self.net.clone().unwrap_or_else(|| default.to_string())
    }

    pub fn growth(&self, arg: Option<&str>, default: &str) -> Result<GrowthFunction> {
        parse_growth(arg.unwrap_or(default))
    }

    pub fn sides(&self, default: &[u64]) -> Result<Vec<u64>> {
        match &self.sides {
            None => Ok(default.to_vec()),
            Some(s) => parse_list(s),
        }
    }

    pub fn density_field(&self) -> Result<DensityField> {
        let dim = self.dim();
        match self.density.as_deref().unwrap_or("uniform") {
            "uniform" => Ok(DensityField::uniform(dim)),
            other => match other.strip_prefix("checkerboard:") {
                Some(args) => {
                    let v: Vec<f64> = parse_list(args)?;
                    if v.len() != 3 {
                        return Err(NetError::InvalidParameter(
                            "checkerboard needs SIDE,LOW,HIGH".into(),
                        ));
                    }
                    DensityField::checkerboard(dim, v[0] as usize, v[1], v[2])
                }
                None => Err(NetError::InvalidParameter(format!("unknown density {other:?}"))),
            },
        }
    }
}

pub fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| NetError::InvalidParameter(format!("bad list entry {t:?}")))
        })
        .collect()
}

pub fn parse_growth(arg: &str) -> Result<GrowthFunction> {
    let args = |s: &str, n: usize| -> Result<Vec<f64>> {
        let v: Vec<f64> = parse_list(s)?;
        if v.len() != n {
            return Err(NetError::InvalidParameter(format!(
                "{arg:?} needs {n} parameters"
            )));
        }
        Ok(v)
    };
    if arg.ends_with(".json") {
        let text = std::fs::read_to_string(arg)?;
        return Ok(serde_json::from_str(&text)?);
    }
    match arg.split_once(':') {
        None => match arg {
            "sqrt" => Ok(GrowthFunction::sqrt()),
            "log" => Ok(GrowthFunction::log()),
            "identity" => Ok(GrowthFunction::identity()),
            _ => Err(NetError::InvalidParameter(format!("unknown growth function {arg:?}"))),
        },
        Some(("const", a)) => GrowthFunction::constant(args(a, 1)?[0]),
        Some(("power", a)) => {
            let v = args(a, 2)?;
            GrowthFunction::power(v[0], v[1])
        }
        Some(("power-log", a)) => {
            let v = args(a, 4)?;
            GrowthFunction::power_log(v[0], v[1], v[2], v[3])
        }
        _ => Err(NetError::InvalidParameter(format!("unknown growth function {arg:?}"))),
    }
}
