//! Parameter families `S_λ(t) = B_λ + K_λ(t)` of symmetric matrices and the
//! builtin catalog.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::symplectic::{standard_space, SymplecticSpace};

use super::splitting::hyperbolicity_margin;

pub type MatFn = Arc<dyn Fn(f64) -> Mat + Send + Sync>;
pub type MatFn2 = Arc<dyn Fn(f64, f64) -> Mat + Send + Sync>;

/// Tolerance on `||S - S^T||` at sampled points.
pub const TOL_SYMMETRY: f64 = 1e-12;
/// Asymptotic generators need `min |Re μ|` above this.
pub const TOL_HYPERBOLIC: f64 = 1e-6;

/// `u' = J S_λ(t) u` with `S_λ(t) = B_λ + K_λ(t)` and `K_λ(t) → K_λ(±∞)`.
#[derive(Clone)]
pub struct HamiltonianFamily {
    name: String,
    space: SymplecticSpace,
    b: MatFn,
    k: MatFn2,
    k_minus: MatFn,
    k_plus: MatFn,
    decay_scale: f64,
}

impl fmt::Debug for HamiltonianFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HamiltonianFamily")
            .field("name", &self.name)
            .field("n", &self.space.n())
            .field("decay_scale", &self.decay_scale)
            .finish()
    }
}

impl HamiltonianFamily {
    pub fn new(
        name: impl Into<String>,
        n: usize,
        b: MatFn,
        k: MatFn2,
        k_minus: MatFn,
        k_plus: MatFn,
        decay_scale: f64,
    ) -> Result<Self> {
        if !(decay_scale > 0.0 && decay_scale.is_finite()) {
            return Err(Error::InvalidArgument(format!("decay scale {decay_scale} must be positive")));
        }
        let space = standard_space(n)?;
        let fam = Self { name: name.into(), space, b, k, k_minus, k_plus, decay_scale };
        let d = 2 * n;
        for m in [fam.b(0.0), fam.k(0.0, 0.0), fam.k_limit(0.0, -1.0), fam.k_limit(0.0, 1.0)] {
            if m.shape() != (d, d) {
                return Err(Error::DimensionMismatch(format!("coefficient of shape {:?}, expected {d}x{d}", m.shape())));
            }
        }
        Ok(fam)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn space(&self) -> &SymplecticSpace {
        &self.space
    }

    pub fn decay_scale(&self) -> f64 {
        self.decay_scale
    }

    /// `10 x decay_scale`.
    pub fn default_truncation(&self) -> f64 {
        10.0 * self.decay_scale
    }

    pub fn b(&self, lam: f64) -> Mat {
        (self.b)(lam)
    }

    pub fn k(&self, lam: f64, t: f64) -> Mat {
        (self.k)(lam, t)
    }

    /// `K_λ(-∞)` for negative `side`, `K_λ(+∞)` otherwise.
    pub fn k_limit(&self, lam: f64, side: f64) -> Mat {
        if side < 0.0 {
            (self.k_minus)(lam)
        } else {
            (self.k_plus)(lam)
        }
    }

    pub fn s(&self, lam: f64, t: f64) -> Mat {
        self.b(lam) + self.k(lam, t)
    }

    pub fn s_minus(&self, lam: f64) -> Mat {
        self.b(lam) + self.k_limit(lam, -1.0)
    }

    pub fn s_plus(&self, lam: f64) -> Mat {
        self.b(lam) + self.k_limit(lam, 1.0)
    }

    /// `J S_λ(t)`.
    pub fn generator(&self, lam: f64, t: f64) -> Mat {
        self.space.j() * self.s(lam, t)
    }

    /// `(J S_λ(-∞), J S_λ(+∞))`.
    pub fn asymptotic_generators(&self, lam: f64) -> (Mat, Mat) {
        (self.space.j() * self.s_minus(lam), self.space.j() * self.s_plus(lam))
    }

    /// `||K_λ(t) - K_λ(±∞)||` with the limit on the side of `t`.
    pub fn envelope(&self, lam: f64, t: f64) -> f64 {
        linalg::spectral_norm(&(self.k(lam, t) - self.k_limit(lam, t)))
    }

    /// Check symmetry on a `t` sample set and asymptotic hyperbolicity at each `λ`.
    pub fn validate(&self, lambdas: &[f64]) -> Result<()> {
        let tmax = 2.0 * self.default_truncation();
        for &lam in lambdas {
            for k in 0..=40 {
                let t = -tmax + 2.0 * tmax * k as f64 / 40.0;
                let s = self.s(lam, t);
                let r = linalg::max_abs(&(&s - s.transpose()));
                if r > TOL_SYMMETRY * linalg::max_abs(&s).max(1.0) {
                    return Err(Error::Structure { what: "symmetry of S", residual: r, tol: TOL_SYMMETRY });
                }
            }
            let (gm, gp) = self.asymptotic_generators(lam);
            let margin = hyperbolicity_margin(&gm).min(hyperbolicity_margin(&gp));
            if margin <= TOL_HYPERBOLIC {
                return Err(Error::NotHyperbolic { margin });
            }
        }
        Ok(())
    }

    /// Largest `||S_0(t) - S_1(t)||` over a sample of `t` including both limits.
    pub fn periodicity_defect(&self) -> f64 {
        let tmax = 4.0 * self.default_truncation();
        let mut d = linalg::max_abs(&(self.s_minus(0.0) - self.s_minus(1.0)))
            .max(linalg::max_abs(&(self.s_plus(0.0) - self.s_plus(1.0))));
        for k in 0..=200 {
            let t = -tmax + 2.0 * tmax * k as f64 / 200.0;
            d = d.max(linalg::max_abs(&(self.s(0.0, t) - self.s(1.0, t))));
        }
        d
    }

    pub fn is_periodic(&self, tol: f64) -> bool {
        self.periodicity_defect() <= tol
    }

    /// `S_λ(t) + δ I`.
    pub fn shifted(&self, delta: f64) -> Self {
        let b = self.b.clone();
        let d = self.dim();
        let shifted: MatFn = Arc::new(move |l| b(l) + Mat::identity(d, d) * delta);
        Self { name: format!("{}+shift", self.name), b: shifted, ..self.clone() }
    }

    /// `R S_λ(-t) R` with the reflection `R = diag(I, -I)`, which reverses `J`.
    /// Solutions map by `u ↦ R u(-t)`, so stable and unstable spaces trade places.
    pub fn time_reversed(&self) -> Self {
        let r = reflection(self.n());
        let (b, k, km, kp) = (self.b.clone(), self.k.clone(), self.k_minus.clone(), self.k_plus.clone());
        let (r1, r2, r3, r4) = (r.clone(), r.clone(), r.clone(), r);
        Self {
            name: format!("{}-reversed", self.name),
            space: self.space.clone(),
            b: Arc::new(move |l| &r1 * b(l) * &r1),
            k: Arc::new(move |l, t| &r2 * k(l, -t) * &r2),
            k_minus: Arc::new(move |l| &r3 * kp(l) * &r3),
            k_plus: Arc::new(move |l| &r4 * km(l) * &r4),
            decay_scale: self.decay_scale,
        }
    }
}

/// `diag(I_n, -I_n)`.
pub fn reflection(n: usize) -> Mat {
    let mut r = Mat::identity(2 * n, 2 * n);
    for i in n..2 * n {
        r[(i, i)] = -1.0;
    }
    r
}

/// `diag(I_n, -I_n)` is also the standard hyperbolic constant part.
fn saddle(n: usize) -> Mat {
    reflection(n)
}

fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

/// `cos θ I + sin θ J`, orthogonal and commuting with `J`.
pub fn j_rotation(n: usize, theta: f64) -> Mat {
    let j = crate::symplectic::standard_j(n);
    Mat::identity(2 * n, 2 * n) * theta.cos() + j * theta.sin()
}

/// `S ≡ diag(I, -I)`: no `λ` or `t` dependence.
pub fn autonomous(n: usize) -> Result<HamiltonianFamily> {
    let b = saddle(n);
    let z = Mat::zeros(2 * n, 2 * n);
    let (z1, z2, z3) = (z.clone(), z.clone(), z);
    HamiltonianFamily::new(
        "autonomous",
        n,
        Arc::new(move |_| b.clone()),
        Arc::new(move |_, _| z1.clone()),
        Arc::new(move |_| z2.clone()),
        Arc::new(move |_| z3.clone()),
        1.0,
    )
}

/// `S_λ(t) = diag(I, -I) + c λ sech(t/d) I`.
pub fn sech_perturbation(n: usize, amplitude: f64, decay: f64) -> Result<HamiltonianFamily> {
    let b = saddle(n);
    let d2 = 2 * n;
    let z = Mat::zeros(d2, d2);
    let (z1, z2) = (z.clone(), z);
    HamiltonianFamily::new(
        "sech-perturbation",
        n,
        Arc::new(move |_| b.clone()),
        Arc::new(move |l, t| Mat::identity(d2, d2) * (amplitude * l * sech(t / decay))),
        Arc::new(move |_| z1.clone()),
        Arc::new(move |_| z2.clone()),
        decay,
    )
}

/// `S_λ(t) = (1 - χ(t)) B + χ(t) R(pπλ)^T B R(pπλ)` with `χ = (1 + tanh(t/d))/2`
/// and `R` the `J`-rotation. Since `R(π) = -I` the family is `1`-periodic in `λ`.
pub fn rotating_asymptotics(n: usize, winding: i32, decay: f64) -> Result<HamiltonianFamily> {
    let b = saddle(n);
    let plus = move |l: f64| {
        let r = j_rotation(n, winding as f64 * PI * l);
        r.transpose() * saddle(n) * r
    };
    let d2 = 2 * n;
    let (b1, b2) = (b.clone(), b);
    let plus1 = plus;
    HamiltonianFamily::new(
        "rotating-asymptotics",
        n,
        Arc::new(move |_| b1.clone()),
        Arc::new(move |l, t| {
            let chi = 0.5 * (1.0 + (t / decay).tanh());
            (plus1(l) - &b2) * chi
        }),
        Arc::new(move |_| Mat::zeros(d2, d2)),
        Arc::new(move |l| plus(l) - saddle(n)),
        decay,
    )
}

/// `S_λ(t) = diag(I, -I) + πλ sech²(t/w)/(2w) I`: a rotation by `πλ`
/// concentrated in a layer of width `w` around `t = 0`.
pub fn gamma_nor_embedding(n: usize, width: f64) -> Result<HamiltonianFamily> {
    let b = saddle(n);
    let d2 = 2 * n;
    let z = Mat::zeros(d2, d2);
    let (z1, z2) = (z.clone(), z);
    HamiltonianFamily::new(
        "gamma-nor-embedding",
        n,
        Arc::new(move |_| b.clone()),
        Arc::new(move |l, t| Mat::identity(d2, d2) * (PI * l * sech(t / width).powi(2) / (2.0 * width))),
        Arc::new(move |_| z1.clone()),
        Arc::new(move |_| z2.clone()),
        width,
    )
}

/// Knobs shared by the builtin families; each family reads the ones it needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyParams {
    pub n: usize,
    pub amplitude: f64,
    pub decay_scale: Option<f64>,
    pub winding: i32,
}

impl Default for FamilyParams {
    fn default() -> Self {
        Self { n: 1, amplitude: DEFAULT_SECH_AMPLITUDE, decay_scale: None, winding: 1 }
    }
}

/// One crossing of the sech family lies inside `(0, 1)` at this amplitude.
pub const DEFAULT_SECH_AMPLITUDE: f64 = 2.0;
pub const DEFAULT_GAMMA_WIDTH: f64 = 0.1;

/// Catalog row for `families`.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub summary: &'static str,
    pub parameters: &'static str,
    /// Asymptotic generators hyperbolic by construction.
    pub hyperbolic: bool,
    /// `K_λ(t)` converges exponentially to its limits.
    pub decaying: bool,
    /// `S_0 ≡ S_1`.
    pub periodic: bool,
}

pub fn catalog() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            id: "autonomous",
            summary: "S = diag(I, -I), constant in lambda and t",
            parameters: "n >= 1",
            hyperbolic: true,
            decaying: true,
            periodic: true,
        },
        CatalogEntry {
            id: "sech-perturbation",
            summary: "S = diag(I, -I) + amplitude * lambda * sech(t/d) * I",
            parameters: "n >= 1, amplitude in [-20, 20], d in (0, 10] (default 1)",
            hyperbolic: true,
            decaying: true,
            periodic: false,
        },
        CatalogEntry {
            id: "rotating-asymptotics",
            summary: "S interpolates from B to R(p*pi*lambda)^T B R(p*pi*lambda) across t = 0",
            parameters: "n >= 1, winding p in [-4, 4], d in (0, 10] (default 1)",
            hyperbolic: true,
            decaying: true,
            periodic: true,
        },
        CatalogEntry {
            id: "gamma-nor-embedding",
            summary: "S = diag(I, -I) + pi * lambda * sech^2(t/w) / (2w) * I",
            parameters: "n >= 1, width w in (0, 1] (default 0.1)",
            hyperbolic: true,
            decaying: true,
            periodic: false,
        },
    ]
}

/// Build a catalog family by id.
pub fn builtin(id: &str, p: &FamilyParams) -> Result<HamiltonianFamily> {
    if p.n == 0 || p.n > 8 {
        return Err(Error::InvalidArgument(format!("n = {} outside [1, 8]", p.n)));
    }
    let check_decay = |d: f64, hi: f64| {
        if d > 0.0 && d <= hi {
            Ok(d)
        } else {
            Err(Error::InvalidArgument(format!("decay scale {d} outside (0, {hi}]")))
        }
    };
    match id {
        "autonomous" => autonomous(p.n),
        "sech-perturbation" => {
            if !(p.amplitude.abs() <= 20.0) {
                return Err(Error::InvalidArgument(format!("amplitude {} outside [-20, 20]", p.amplitude)));
            }
            sech_perturbation(p.n, p.amplitude, check_decay(p.decay_scale.unwrap_or(1.0), 10.0)?)
        }
        "rotating-asymptotics" => {
            if p.winding.abs() > 4 {
                return Err(Error::InvalidArgument(format!("winding {} outside [-4, 4]", p.winding)));
            }
            rotating_asymptotics(p.n, p.winding, check_decay(p.decay_scale.unwrap_or(1.0), 10.0)?)
        }
        "gamma-nor-embedding" => {
            gamma_nor_embedding(p.n, check_decay(p.decay_scale.unwrap_or(DEFAULT_GAMMA_WIDTH), 1.0)?)
        }
        other => Err(Error::InvalidArgument(format!("unknown family '{other}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_has_four_hyperbolic_entries() {
        let c = catalog();
        assert_eq!(c.len(), 4);
        assert!(c.iter().all(|e| e.hyperbolic));
        assert!(c.iter().find(|e| e.id == "rotating-asymptotics").unwrap().periodic);
        for e in &c {
            builtin(e.id, &FamilyParams::default()).unwrap().validate(&[0.0, 0.5, 1.0]).unwrap();
        }
        assert!(builtin("nope", &FamilyParams::default()).is_err());
    }

    #[test]
    fn periodicity_flags() {
        assert!(rotating_asymptotics(1, 1, 1.0).unwrap().is_periodic(1e-10));
        assert!(rotating_asymptotics(1, 2, 1.0).unwrap().is_periodic(1e-10));
        assert!(!sech_perturbation(1, 2.0, 1.0).unwrap().is_periodic(1e-10));
        assert!(autonomous(2).unwrap().is_periodic(0.0));
    }

    #[test]
    fn limits_and_envelope() {
        let f = sech_perturbation(1, 3.0, 1.0).unwrap();
        assert!(f.envelope(1.0, 30.0) < 1e-11);
        assert!((f.envelope(1.0, 0.0) - 3.0).abs() < 1e-12);
        let r = rotating_asymptotics(1, 1, 1.0).unwrap();
        assert!(linalg::max_abs(&(r.s(0.3, 40.0) - r.s_plus(0.3))) < 1e-12);
        assert!(linalg::max_abs(&(r.s(0.3, -40.0) - r.s_minus(0.3))) < 1e-12);
    }

    #[test]
    fn gamma_layer_integrates_to_rotation_angle() {
        // ∫ sech²(t/w)/(2w) dt = 1, so the I-coefficient integrates to πλ.
        let f = gamma_nor_embedding(1, 0.1).unwrap();
        let h = 1e-4;
        let total: f64 = (0..20000).map(|k| -1.0 + (k as f64 + 0.5) * h).map(|t| f.k(0.5, t)[(0, 0)] * h).sum();
        assert!((total - 0.5 * PI).abs() < 1e-6);
    }
}
