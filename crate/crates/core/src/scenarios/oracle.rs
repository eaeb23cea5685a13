//! Reference solutions built without the incremental solver.

use crate::load::{BvLoad, Side};

/// Exact play (stop) operator for a scalar piecewise affine load:
/// `z` is clamped into `[(l - r)/a, (l + r)/a]`, which is exact on monotone pieces.
#[derive(Debug, Clone)]
pub struct PlayOracle {
    pub a: f64,
    pub r: f64,
    pub z0: f64,
    pub load: BvLoad,
}

impl PlayOracle {
    fn clamp(&self, z: f64, l: f64) -> f64 {
        z.clamp((l - self.r) / self.a, (l + self.r) / self.a)
    }

    /// State at `t`; `side` selects the one-sided value at a load jump.
    pub fn state(&self, t: f64, side: Side) -> f64 {
        let load = &self.load;
        let mut z = self.clamp(self.z0, load.at(load.start())[0]);
        for &b in &load.breakpoints()[1..load.breakpoints().len() - 1] {
            if b > t || (b == t && side == Side::Left) {
                break;
            }
            z = self.clamp(z, load.eval_unchecked(b, Side::Left)[0]);
            if b == t && side == Side::At {
                return self.clamp(z, load.eval_unchecked(b, Side::At)[0]);
            }
            z = self.clamp(z, load.eval_unchecked(b, Side::At)[0]);
            z = self.clamp(z, load.eval_unchecked(b, Side::Right)[0]);
        }
        self.clamp(z, load.eval_unchecked(t, side)[0])
    }
}

/// Loss of stability of the left branch of a scalar double-well problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapEvent {
    pub t: f64,
    pub z_minus: f64,
    pub z_plus: f64,
}

/// Dense local-descent incremental scheme for
/// `E = κ z²/2 + β (z² - 1)²/4 - l z`, `R = r |·|` at zero viscosity.
///
/// Each step keeps the state if `|l - φ(z)| <= r` with `φ = κ z + β (z³ - z)`,
/// and otherwise moves to the first root of `φ(y) = l ∓ r` in the descent
/// direction. This follows the locally stable branch (global minimization would
/// jump earlier, at the Maxwell load). The spinodal load is located in closed form.
#[derive(Debug, Clone)]
pub struct DoubleWellOracle {
    pub kappa: f64,
    pub beta: f64,
    pub r: f64,
    pub times: Vec<f64>,
    pub states: Vec<f64>,
    pub event: Option<SnapEvent>,
}

impl DoubleWellOracle {
    pub fn phi(&self, z: f64) -> f64 {
        self.kappa * z + self.beta * (z * z * z - z)
    }

    pub fn compute(kappa: f64, beta: f64, r: f64, load: &BvLoad, z0: f64, dt: f64) -> Self {
        let mut o = DoubleWellOracle {
            kappa,
            beta,
            r,
            times: Vec::new(),
            states: Vec::new(),
            event: None,
        };
        let (t0, t1) = (load.start(), load.horizon());
        let steps = ((t1 - t0) / dt).ceil() as usize;
        let l = |t: f64| load.at(t)[0];
        let z_fold = -((1.0 - kappa / beta) / 3.0).sqrt();
        let mut z = z0;
        o.times.push(t0);
        o.states.push(z);
        for k in 1..=steps {
            let t = if k == steps { t1 } else { t0 + k as f64 * dt };
            let target = l(t);
            if target - o.phi(z) > r
                && o.event.is_none()
                && z <= z_fold
                && target - r >= o.phi(z_fold)
            {
                // The left branch ends at the fold: locate the load crossing.
                let (mut lo, mut hi) = (o.times[o.times.len() - 1], t);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if l(mid) - r >= o.phi(z_fold) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                let z_plus = -2.0 * z_fold;
                o.event = Some(SnapEvent {
                    t: hi,
                    z_minus: z_fold,
                    z_plus,
                });
                o.times.push(hi);
                o.states.push(z_fold);
                o.times.push(hi);
                o.states.push(z_plus);
                z = z_plus;
            }
            z = o.descend(z, target);
            o.times.push(t);
            o.states.push(z);
        }
        o
    }

    fn descend(&self, z: f64, l: f64) -> f64 {
        let force = l - self.phi(z);
        if force.abs() <= self.r {
            return z;
        }
        let dir = force.signum();
        let level = l - dir * self.r;
        let g = |y: f64| dir * (level - self.phi(y));
        // March in the descent direction until the driving force changes sign.
        let h = 1e-3;
        let mut a = z;
        let mut b = z + dir * h;
        while g(b) > 0.0 {
            a = b;
            b += dir * h;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if g(m) > 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    /// Linear interpolation of the dense states; left of the event the left
    /// branch is used and from the event on the right branch.
    pub fn state(&self, t: f64) -> f64 {
        let i = self.times.partition_point(|x| *x <= t);
        if i == 0 {
            return self.states[0];
        }
        if i >= self.times.len() {
            return *self.states.last().unwrap();
        }
        let (ta, tb) = (self.times[i - 1], self.times[i]);
        if tb == ta {
            return self.states[i];
        }
        let theta = (t - ta) / (tb - ta);
        self.states[i - 1] + theta * (self.states[i] - self.states[i - 1])
    }
}
