//! The radial cutoff of the concentration analysis: phi(x) = psi(|X_x|^2)
//! with psi = 1 on the annulus [(1-eta)^2, (1+eta)^2]/h^2 and support in
//! [(1-2eta)^2, (1+2eta)^2]/h^2, ramped by a quintic smoothstep.
//!
//! With these bands the construction's derivative bounds
//! |psi'| <= 4 h^2 / eta and |psi''| <= 8 h^4 / eta^2 hold for eta <= 0.35
//! (smoothstep extrema 15/8 and 10/sqrt(3) over a ramp of width
//! ~2 eta / h^2); `derivative_bounds_ok` reports whether they do.

#[derive(Debug, Clone, Copy)]
pub struct Cutoff {
    /// ||H||_2 of the immersion; the comparison sphere has radius 1/h2.
    pub h2: f64,
    pub eta: f64,
    lo_out: f64,
    lo_in: f64,
    hi_in: f64,
    hi_out: f64,
}

fn smoothstep(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)
    }
}

fn smoothstep_d(t: f64) -> f64 {
    if !(0.0..=1.0).contains(&t) {
        0.0
    } else {
        30.0 * t * t * (1.0 - t) * (1.0 - t)
    }
}

fn smoothstep_dd(t: f64) -> f64 {
    if !(0.0..=1.0).contains(&t) {
        0.0
    } else {
        60.0 * t * (1.0 - t) * (1.0 - 2.0 * t)
    }
}

impl Cutoff {
    pub fn new(h2: f64, eta: f64) -> Self {
        assert!(h2 > 0.0 && eta > 0.0 && eta < 0.5);
        let s = 1.0 / (h2 * h2);
        Cutoff {
            h2,
            eta,
            lo_out: (1.0 - 2.0 * eta).max(0.0).powi(2) * s,
            lo_in: (1.0 - eta).powi(2) * s,
            hi_in: (1.0 + eta).powi(2) * s,
            hi_out: (1.0 + 2.0 * eta).powi(2) * s,
        }
    }

    /// psi evaluated at t = |X|^2.
    pub fn phi(&self, t: f64) -> f64 {
        if t < self.lo_out || t > self.hi_out {
            0.0
        } else if t < self.lo_in {
            smoothstep((t - self.lo_out) / (self.lo_in - self.lo_out))
        } else if t <= self.hi_in {
            1.0
        } else {
            smoothstep((self.hi_out - t) / (self.hi_out - self.hi_in))
        }
    }

    pub fn phi_d(&self, t: f64) -> f64 {
        if t < self.lo_out || t > self.hi_out {
            0.0
        } else if t < self.lo_in {
            smoothstep_d((t - self.lo_out) / (self.lo_in - self.lo_out)) / (self.lo_in - self.lo_out)
        } else if t <= self.hi_in {
            0.0
        } else {
            -smoothstep_d((self.hi_out - t) / (self.hi_out - self.hi_in))
                / (self.hi_out - self.hi_in)
        }
    }

    pub fn phi_dd(&self, t: f64) -> f64 {
        if t < self.lo_out || t > self.hi_out {
            0.0
        } else if t < self.lo_in {
            let w = self.lo_in - self.lo_out;
            smoothstep_dd((t - self.lo_out) / w) / (w * w)
        } else if t <= self.hi_in {
            0.0
        } else {
            let w = self.hi_out - self.hi_in;
            smoothstep_dd((self.hi_out - t) / w) / (w * w)
        }
    }

    /// Whether sup|psi'| <= 4 h^2/eta and sup|psi''| <= 8 h^4/eta^2 hold for
    /// this band geometry (they do for eta <= ~0.35).
    pub fn derivative_bounds_ok(&self) -> bool {
        let w = (self.lo_in - self.lo_out).min(self.hi_out - self.hi_in);
        let sup_d = 1.875 / w;
        let sup_dd = 10.0 / 3f64.sqrt() / (w * w);
        sup_d <= 4.0 * self.h2 * self.h2 / self.eta
            && sup_dd <= 8.0 * self.h2.powi(4) / (self.eta * self.eta)
    }
}
