//! Built-in benchmark problems with fixed parameters and independent oracles.

pub mod oracle;

use crate::error::{Error, Result};
use crate::load::{BvLoad, JumpValue, Segment};
use crate::model::{Dissipation, Nonlinearity, SemilinearEnergy, SpdOperator, System};
use crate::viscosity::{MeshRule, SweepOptions};

pub use oracle::{DoubleWellOracle, PlayOracle, SnapEvent};

/// Names accepted by [`Scenario::by_name`] (chains accept any size `n >= 2`).
pub const REGISTRY: &[&str] = &[
    "play1d",
    "play1d-constant",
    "play1d-step",
    "doublewell1d",
    "chain16",
    "chain16-symmetric",
    "chain16-zero",
];

pub const DEFAULT_LADDER: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

#[derive(Debug, Clone)]
pub enum Oracle {
    Play(PlayOracle),
    DoubleWell {
        kappa: f64,
        beta: f64,
        r: f64,
        z0: f64,
        dt: f64,
    },
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub system: System,
    pub z0: Vec<f64>,
    pub eps_ladder: Vec<f64>,
    pub mesh: MeshRule,
    pub oracle: Option<Oracle>,
}

impl Scenario {
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "play1d" => play1d(),
            "play1d-constant" => play1d_with(BvLoad::constant(1.0, vec![0.5])?, "play1d-constant"),
            "play1d-step" => play1d_step(),
            "doublewell1d" => doublewell1d(),
            _ => {
                let rest = name
                    .strip_prefix("chain")
                    .ok_or_else(|| Error::UnknownScenario(name.into()))?;
                let (n, variant) = match rest.split_once('-') {
                    Some((n, v)) => (n, v),
                    None => (rest, ""),
                };
                let n: usize = n.parse().map_err(|_| Error::UnknownScenario(name.into()))?;
                match variant {
                    "" => chain(n),
                    "symmetric" => chain_symmetric(n),
                    "zero" => chain_zero(n),
                    _ => Err(Error::UnknownScenario(name.into())),
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.system.dim()
    }

    /// Default sweep options with this scenario's ladder and mesh rule.
    pub fn sweep_options(&self) -> SweepOptions {
        SweepOptions {
            eps_ladder: self.eps_ladder.clone(),
            mesh: self.mesh,
            ..SweepOptions::default()
        }
    }

    /// Same problem on the time interval stretched by `factor`.
    pub fn time_scaled(&self, factor: f64) -> Result<Self> {
        let load = self.system.load().time_scaled(factor)?;
        let mut out = self.clone();
        out.system = self.system.with_load(load)?;
        if let Some(Oracle::Play(p)) = &mut out.oracle {
            p.load = out.system.load().clone();
        }
        out.oracle = match &self.oracle {
            Some(Oracle::DoubleWell { .. }) => None,
            _ => out.oracle,
        };
        Ok(out)
    }

    /// Builds the doublewell reference; `None` for scenarios without one.
    pub fn doublewell_oracle(&self) -> Option<DoubleWellOracle> {
        match self.oracle {
            Some(Oracle::DoubleWell {
                kappa,
                beta,
                r,
                z0,
                dt,
            }) => Some(DoubleWellOracle::compute(
                kappa,
                beta,
                r,
                self.system.load(),
                z0,
                dt,
            )),
            _ => None,
        }
    }
}

fn scalar_system(a: f64, f: Nonlinearity, r: f64, load: BvLoad) -> Result<System> {
    let e = SemilinearEnergy::new(SpdOperator::scalar(1, a)?, f, load)?;
    System::new(e, Dissipation::uniform(1, r)?, SpdOperator::identity(1))
}

fn play1d_with(load: BvLoad, name: &str) -> Result<Scenario> {
    let (a, r, z0) = (1.0, 1.0, 0.0);
    Ok(Scenario {
        name: name.into(),
        system: scalar_system(a, Nonlinearity::None, r, load.clone())?,
        z0: vec![z0],
        eps_ladder: DEFAULT_LADDER.to_vec(),
        mesh: MeshRule::linear(0.5),
        oracle: Some(Oracle::Play(PlayOracle { a, r, z0, load })),
    })
}

/// `a = r = 1`, `z_0 = 0`, load ramp `0 -> 3` on `[0, 1]`; `z(1) = 2`.
pub fn play1d() -> Result<Scenario> {
    play1d_with(BvLoad::ramp(1.0, vec![0.0], vec![3.0])?, "play1d")
}

/// Play operator under a step `0 -> 3` at `t = 0.5`. A finer ladder resolves
/// the relaxation tail of the jump, which lasts `ε ln(1/δ_G)`.
pub fn play1d_step() -> Result<Scenario> {
    let mut s = play1d_with(BvLoad::step(1.0, 0.5, vec![0.0], vec![3.0])?, "play1d-step")?;
    s.eps_ladder = vec![0.02, 0.01, 0.005, 0.0025];
    Ok(s)
}

pub const DOUBLEWELL_KAPPA: f64 = 0.1;
pub const DOUBLEWELL_R: f64 = 0.1;

/// `E = κ z²/2 + (z² - 1)²/4 - l z` with `κ = 0.1`, `r = 0.1`, ramp `0 -> 0.8`
/// on `[0, 1]`, starting in the left well. The left branch loses stability at
/// `t ≈ 0.536` and the state snaps to the right well.
pub fn doublewell1d() -> Result<Scenario> {
    let (kappa, beta, r) = (DOUBLEWELL_KAPPA, 1.0, DOUBLEWELL_R);
    let z0 = -(1.0 - kappa / beta).sqrt();
    let load = BvLoad::ramp(1.0, vec![0.0], vec![0.8])?;
    Ok(Scenario {
        name: "doublewell1d".into(),
        system: scalar_system(kappa, Nonlinearity::DoubleWell { scale: beta }, r, load)?,
        z0: vec![z0],
        eps_ladder: vec![2e-3, 1e-3, 5e-4, 2.5e-4],
        mesh: MeshRule::linear(0.5),
        oracle: Some(Oracle::DoubleWell {
            kappa,
            beta,
            r,
            z0,
            dt: 1e-5,
        }),
    })
}

const CHAIN_STIFFNESS: f64 = 1.0;
const CHAIN_WELL: f64 = 0.5;
const CHAIN_R: f64 = 0.5;
const CHAIN_JUMP: f64 = 1.5;

fn chain_profile(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 1.0 + 0.5 * (std::f64::consts::PI * (i as f64 + 0.5) / n as f64).sin())
        .collect()
}

fn chain_with(n: usize, load: BvLoad, name: String) -> Result<Scenario> {
    if n < 2 {
        return Err(Error::UnknownScenario(format!(
            "{name} (chains need n >= 2)"
        )));
    }
    let a = SpdOperator::laplacian_plus_shift(n, CHAIN_STIFFNESS, 1.0)?;
    let e = SemilinearEnergy::new(a, Nonlinearity::DoubleWell { scale: CHAIN_WELL }, load)?;
    let system = System::new(
        e,
        Dissipation::uniform(n, CHAIN_R)?,
        SpdOperator::identity(n),
    )?;
    Ok(Scenario {
        name,
        system,
        z0: vec![0.0; n],
        eps_ladder: DEFAULT_LADDER.to_vec(),
        // The contact-potential defect along affine pieces scales with (Δ/ε)²
        // across a jump, so the step shrinks faster than ε.
        mesh: MeshRule { c: 2.5, power: 2.0 },
        oracle: None,
    })
}

/// `A` = second difference plus identity, `V = I`, `F = 0.5 Σ (z_i² - 1)²/4`,
/// load ramp along a smooth profile with a jump of 1.5 in the middle coordinate at `t = 0.5`.
pub fn chain(n: usize) -> Result<Scenario> {
    let g = chain_profile(n);
    let mut after: Vec<f64> = g.iter().map(|x| 0.5 * x).collect();
    after[n / 2] += CHAIN_JUMP;
    let load = BvLoad::new(
        vec![0.0, 0.5, 1.0],
        vec![
            Segment::Affine {
                start: vec![0.0; n],
                slope: g.clone(),
            },
            Segment::Affine {
                start: after,
                slope: g,
            },
        ],
        vec![JumpValue::Right],
    )?;
    chain_with(n, load, format!("chain{n}"))
}

/// Mirror-symmetric ramp without jump.
pub fn chain_symmetric(n: usize) -> Result<Scenario> {
    let load = BvLoad::ramp(1.0, vec![0.0; n], chain_profile(n))?;
    chain_with(n, load, format!("chain{n}-symmetric"))
}

pub fn chain_zero(n: usize) -> Result<Scenario> {
    chain_with(
        n,
        BvLoad::constant(1.0, vec![0.0; n])?,
        format!("chain{n}-zero"),
    )
}
