//! Entropy–entropy flux pairs `(η, q)` with `q(u) = −∫₀ᵘ (ξ²/2) η'(ξ) dξ`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EntropyKind {
    /// `η = (u − k)²`, closed-form flux.
    Quadratic { k: f64 },
    /// `η = √((u − k)² + δ²)`, a smooth convex stand-in for `|u − k|`;
    /// flux by adaptive quadrature.
    KruzkovSmooth { k: f64, delta: f64 },
    /// `η = u`. Convex but not strictly; its flux is the physical flux.
    Affine,
    /// User-supplied `η`; flux by adaptive quadrature.
    Custom { label: String },
}

/// Absolute tolerance of the adaptive flux quadrature.
pub const FLUX_QUADRATURE_TOL: f64 = 1e-10;
/// Samples used by the convexity check.
pub const CONVEXITY_SAMPLES: usize = 1000;

#[derive(Clone)]
enum FluxRepr {
    Closed(ScalarFn),
    Quadrature(Option<Arc<FluxTable>>),
}

#[derive(Clone)]
pub struct EntropyPair {
    pub kind: EntropyKind,
    eta: ScalarFn,
    eta_prime: ScalarFn,
    eta_second: ScalarFn,
    flux: FluxRepr,
}

impl fmt::Debug for EntropyPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EntropyPair").field("kind", &self.kind).finish_non_exhaustive()
    }
}

impl EntropyPair {
    /// Builds the pair; `range` is the value range over which convexity is
    /// sampled and the quadrature flux is tabulated.
    pub fn new(kind: EntropyKind, range: (f64, f64)) -> Result<Self> {
        let pair = match kind {
            EntropyKind::Quadratic { k } => Self {
                kind,
                eta: Arc::new(move |u| (u - k) * (u - k)),
                eta_prime: Arc::new(move |u| 2.0 * (u - k)),
                eta_second: Arc::new(|_| 2.0),
                flux: FluxRepr::Closed(Arc::new(move |u: f64| -(u.powi(4) / 4.0 - k * u.powi(3) / 3.0))),
            },
            EntropyKind::Affine => Self {
                kind,
                eta: Arc::new(|u| u),
                eta_prime: Arc::new(|_| 1.0),
                eta_second: Arc::new(|_| 0.0),
                flux: FluxRepr::Closed(Arc::new(|u: f64| -u.powi(3) / 6.0)),
            },
            EntropyKind::KruzkovSmooth { k, delta } => {
                if !(delta > 0.0) {
                    return Err(Error::InvalidParams(format!("kruzkov delta = {delta} must be positive")));
                }
                let d2 = delta * delta;
                Self {
                    kind,
                    eta: Arc::new(move |u| ((u - k) * (u - k) + d2).sqrt()),
                    eta_prime: Arc::new(move |u| (u - k) / ((u - k) * (u - k) + d2).sqrt()),
                    eta_second: Arc::new(move |u| d2 / ((u - k) * (u - k) + d2).powf(1.5)),
                    flux: FluxRepr::Quadrature(None),
                }
            }
            EntropyKind::Custom { .. } => {
                return Err(Error::InvalidParams("custom entropies are built with EntropyPair::custom".into()))
            }
        };
        pair.with_table(range)
    }

    /// Pair from a user-supplied convex `η` (with `η'`, `η''`).
    pub fn custom(label: &str, eta: ScalarFn, eta_prime: ScalarFn, eta_second: ScalarFn, range: (f64, f64)) -> Result<Self> {
        Self {
            kind: EntropyKind::Custom { label: label.to_string() },
            eta,
            eta_prime,
            eta_second,
            flux: FluxRepr::Quadrature(None),
        }
        .with_table(range)
    }

    fn with_table(mut self, range: (f64, f64)) -> Result<Self> {
        let (lo, hi) = range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidParams(format!("invalid value range [{lo}, {hi}]")));
        }
        self.check_convex(range)?;
        if let FluxRepr::Quadrature(_) = self.flux {
            let table = FluxTable::build(&self, lo, hi);
            self.flux = FluxRepr::Quadrature(Some(Arc::new(table)));
        }
        Ok(self)
    }

    fn check_convex(&self, (lo, hi): (f64, f64)) -> Result<()> {
        for i in 0..CONVEXITY_SAMPLES {
            let u = lo + (hi - lo) * i as f64 / (CONVEXITY_SAMPLES - 1) as f64;
            let d2 = (self.eta_second)(u);
            if !(d2 >= -1e-12) {
                return Err(Error::NotConvex(format!("{:?}: eta''({u}) = {d2}", self.kind)));
            }
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        match &self.kind {
            EntropyKind::Quadratic { k } => format!("quadratic(k={k:.6})"),
            EntropyKind::KruzkovSmooth { k, delta } => format!("kruzkov(k={k:.6},delta={delta:.6})"),
            EntropyKind::Affine => "affine".to_string(),
            EntropyKind::Custom { label } => format!("custom({label})"),
        }
    }

    #[inline]
    pub fn eta(&self, u: f64) -> f64 {
        (self.eta)(u)
    }

    #[inline]
    pub fn eta_prime(&self, u: f64) -> f64 {
        (self.eta_prime)(u)
    }

    #[inline]
    pub fn eta_second(&self, u: f64) -> f64 {
        (self.eta_second)(u)
    }

    /// Integrand `−(u²/2)η'(u)`, i.e. `q'(u)`.
    #[inline]
    pub fn q_prime(&self, u: f64) -> f64 {
        -0.5 * u * u * self.eta_prime(u)
    }

    /// `q(u)` by direct adaptive quadrature of the defining integral.
    pub fn q_quadrature(&self, u: f64) -> f64 {
        adaptive_simpson(&|x| self.q_prime(x), 0.0, u, FLUX_QUADRATURE_TOL)
    }

    pub fn q(&self, u: f64) -> f64 {
        match &self.flux {
            FluxRepr::Closed(q) => q(u),
            FluxRepr::Quadrature(Some(table)) if table.contains(u) => table.eval(self, u),
            FluxRepr::Quadrature(_) => self.q_quadrature(u),
        }
    }

    pub fn has_closed_flux(&self) -> bool {
        matches!(self.flux, FluxRepr::Closed(_))
    }
}

/// Cubic Hermite table of a quadrature flux; the slopes are the exact `q'`.
struct FluxTable {
    lo: f64,
    step: f64,
    values: Vec<f64>,
}

const TABLE_INTERVALS: usize = 4096;

impl FluxTable {
    fn build(pair: &EntropyPair, lo: f64, hi: f64) -> Self {
        let step = (hi - lo) / TABLE_INTERVALS as f64;
        let nodes: Vec<f64> = (0..=TABLE_INTERVALS).map(|i| lo + step * i as f64).collect();
        // anchor at the node nearest 0, then accumulate interval integrals both ways
        let anchor = nodes
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(i, _)| i)
            .unwrap();
        let mut values = vec![0.0; nodes.len()];
        values[anchor] = pair.q_quadrature(nodes[anchor]);
        let f = |x: f64| pair.q_prime(x);
        let tol = FLUX_QUADRATURE_TOL / TABLE_INTERVALS as f64;
        for i in anchor + 1..nodes.len() {
            values[i] = values[i - 1] + adaptive_simpson(&f, nodes[i - 1], nodes[i], tol);
        }
        for i in (0..anchor).rev() {
            values[i] = values[i + 1] - adaptive_simpson(&f, nodes[i], nodes[i + 1], tol);
        }
        Self { lo, step, values }
    }

    fn contains(&self, u: f64) -> bool {
        u >= self.lo && u <= self.lo + self.step * (self.values.len() - 1) as f64
    }

    fn eval(&self, pair: &EntropyPair, u: f64) -> f64 {
        let pos = (u - self.lo) / self.step;
        let i = (pos.floor() as usize).min(self.values.len() - 2);
        let s = pos - i as f64;
        let (x0, x1) = (self.lo + self.step * i as f64, self.lo + self.step * (i + 1) as f64);
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (pair.q_prime(x0) * self.step, pair.q_prime(x1) * self.step);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * m0 + (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * m1
    }
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` (either orientation).
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}
