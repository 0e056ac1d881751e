//! The two-level model in closed form: spin states along directions, singlet
//! correlations, CHSH, a local sign model for contrast, and a sampling probe
//! of how well rotated states cover the Bloch sphere.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{Matrix2, Vector2, Vector4};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::random::{random_unit3, stream};

const UNIT_TOL: f64 = 1e-12;

/// A unit vector in space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction([f64; 3]);

impl Direction {
    /// Requires unit norm to 1e-12.
    pub fn new(v: [f64; 3]) -> Result<Self> {
        let n = norm3(v);
        if (n - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidArgument(format!("direction has norm {n}")));
        }
        Ok(Direction(v))
    }

    /// Scales any nonzero vector to unit length.
    pub fn normalized(v: [f64; 3]) -> Result<Self> {
        let n = norm3(v);
        if !n.is_finite() || n <= 0.0 {
            return Err(Error::InvalidArgument("zero or non-finite direction".into()));
        }
        Ok(Direction([v[0] / n, v[1] / n, v[2] / n]))
    }

    /// In-plane direction `(cos θ, sin θ, 0)` for `θ` in degrees.
    pub fn from_planar_degrees(deg: f64) -> Self {
        let (s, c) = sin_cos_degrees(deg);
        Direction([c, s, 0.0])
    }

    pub fn z() -> Self {
        Direction([0.0, 0.0, 1.0])
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    pub fn dot(&self, other: &Direction) -> f64 {
        dot3(self.0, other.0)
    }

    /// Angle to `other` in radians.
    pub fn angle(&self, other: &Direction) -> f64 {
        self.dot(other).clamp(-1.0, 1.0).acos()
    }

    pub fn rotated(&self, r: &Rotation3) -> Direction {
        Direction(r.apply(self.0))
    }

    pub fn negated(&self) -> Direction {
        Direction([-self.0[0], -self.0[1], -self.0[2]])
    }
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm3(v: [f64; 3]) -> f64 {
    dot3(v, v).sqrt()
}

fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// `(sin, cos)` of an angle in degrees, reduced to `[-45°, 45°]` first so
/// multiples of 45° give symmetric values and multiples of 90° exact ones.
pub fn sin_cos_degrees(deg: f64) -> (f64, f64) {
    let d = deg.rem_euclid(360.0);
    let q = (d / 90.0).round();
    let r = d - 90.0 * q;
    let (s, c) = if r.abs() == 45.0 {
        (FRAC_1_SQRT_2.copysign(r), FRAC_1_SQRT_2)
    } else {
        r.to_radians().sin_cos()
    };
    match (q as i64).rem_euclid(4) {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    }
}

/// A rotation of space as a 3×3 matrix (Rodrigues form).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation3([[f64; 3]; 3]);

impl Rotation3 {
    pub fn about(axis: Direction, angle: f64) -> Self {
        let [x, y, z] = axis.0;
        let (s, c) = angle.sin_cos();
        let t = 1.0 - c;
        Rotation3([
            [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
            [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
            [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
        ])
    }

    /// Haar-random rotation from a uniform unit quaternion.
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        let q = random_quaternion(rng);
        let [w, x, y, z] = q;
        Rotation3([
            [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
            [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
            [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
        ])
    }

    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let m = &self.0;
        [dot3(m[0], v), dot3(m[1], v), dot3(m[2], v)]
    }
}

fn random_quaternion<R: Rng>(rng: &mut R) -> [f64; 4] {
    loop {
        let q: [f64; 4] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let n = (q.iter().map(|x| x * x).sum::<f64>()).sqrt();
        if n > 1e-12 {
            return [q[0] / n, q[1] / n, q[2] / n, q[3] / n];
        }
    }
}

pub type Spinor = Vector2<Complex64>;
pub type SpinMatrix = Matrix2<Complex64>;

fn pauli() -> [SpinMatrix; 3] {
    let o = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    [
        SpinMatrix::new(o, one, one, o),
        SpinMatrix::new(o, -i, i, o),
        SpinMatrix::new(one, o, o, -one),
    ]
}

/// `exp(-i θ/2 n·σ)`: the two-dimensional image of the rotation by `θ`
/// about `n`.
pub fn su2(axis: Direction, angle: f64) -> SpinMatrix {
    let [sx, sy, sz] = pauli();
    let [x, y, z] = axis.0;
    let ns = sx * Complex64::new(x, 0.0) + sy * Complex64::new(y, 0.0) + sz * Complex64::new(z, 0.0);
    let (s, c) = (angle / 2.0).sin_cos();
    SpinMatrix::identity() * Complex64::new(c, 0.0) - ns * Complex64::new(0.0, s)
}

/// `SU(2)` element mapping `+z` to `n` along the shortest great circle.
pub fn su2_from_z(n: Direction) -> SpinMatrix {
    let z = Direction::z();
    let axis = cross3(z.0, n.0);
    let sin = norm3(axis);
    let cos = z.dot(&n);
    if sin < 1e-15 {
        return if cos > 0.0 {
            SpinMatrix::identity()
        } else {
            su2(Direction([1.0, 0.0, 0.0]), PI)
        };
    }
    let axis = Direction([axis[0] / sin, axis[1] / sin, axis[2] / sin]);
    su2(axis, sin.atan2(cos))
}

/// `λ^a = s`: the spin state along `a` with sign `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    pub bloch: Direction,
    pub sign: i8,
    pub amplitudes: Spinor,
}

impl QubitState {
    pub fn new(a: Direction, sign: i8) -> Result<Self> {
        let basis = match sign {
            1 => Spinor::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
            -1 => Spinor::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)),
            _ => return Err(Error::InvalidArgument(format!("sign must be +1 or -1, got {sign}"))),
        };
        let v = su2_from_z(a) * basis;
        Ok(QubitState { bloch: a, sign, amplitudes: phase_fixed(v) })
    }

    /// `(2 Re ᾱβ, 2 Im ᾱβ, |α|² - |β|²)`
    pub fn bloch_vector(&self) -> [f64; 3] {
        bloch_of(&self.amplitudes)
    }
}

fn phase_fixed(v: Spinor) -> Spinor {
    match v.iter().find(|z| z.norm() > 1e-12) {
        Some(z) => v * (z.conj() / z.norm()),
        None => v,
    }
}

pub fn bloch_of(v: &Spinor) -> [f64; 3] {
    let ab = v[0].conj() * v[1];
    [2.0 * ab.re, 2.0 * ab.im, v[0].norm_sqr() - v[1].norm_sqr()]
}

/// `|<a,s|b,t>|²` from explicit spinors.
pub fn qubit_transition(a: Direction, s: i8, b: Direction, t: i8) -> Result<f64> {
    let u = QubitState::new(a, s)?;
    let v = QubitState::new(b, t)?;
    Ok(u.amplitudes.dotc(&v.amplitudes).norm_sqr())
}

/// `(1 + s t a·b)/2`
pub fn qubit_transition_closed_form(a: Direction, s: i8, b: Direction, t: i8) -> f64 {
    (1.0 + f64::from(s) * f64::from(t) * a.dot(&b)) / 2.0
}

/// Two subsystems whose total parameters satisfy `φ₂ = -φ₁`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SingletPair;

impl SingletPair {
    /// `(|+-> - |-+>)/√2` in the `z` product basis.
    pub fn state() -> Vector4<Complex64> {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let o = Complex64::new(0.0, 0.0);
        Vector4::new(o, h, -h, o)
    }

    /// `P(λ^a = s, μ^b = t)` from the tensor-product state, indexed
    /// `[s = +, -][t = +, -]`.
    pub fn joint(a: Direction, b: Direction) -> [[f64; 2]; 2] {
        let psi = Self::state();
        let mut out = [[0.0; 2]; 2];
        for (i, s) in [1i8, -1].into_iter().enumerate() {
            for (j, t) in [1i8, -1].into_iter().enumerate() {
                let u = QubitState::new(a, s).expect("valid sign").amplitudes;
                let v = QubitState::new(b, t).expect("valid sign").amplitudes;
                let uv = Vector4::new(u[0] * v[0], u[0] * v[1], u[1] * v[0], u[1] * v[1]);
                out[i][j] = uv.dotc(&psi).norm_sqr();
            }
        }
        out
    }

    /// `(1 - s t a·b)/4`
    pub fn joint_closed_form(a: Direction, b: Direction, s: i8, t: i8) -> f64 {
        (1.0 - f64::from(s) * f64::from(t) * a.dot(&b)) / 4.0
    }
}

/// `E(λ^a μ^b) = -a·b`
pub fn epr_correlation(a: Direction, b: Direction) -> f64 {
    -a.dot(&b)
}

/// Empirical mean of a ±1 product with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampledCorrelation {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
    /// Fraction of `+1` outcomes on each side.
    pub plus_fraction: [f64; 2],
}

const SHARD: u64 = 1 << 14;

#[derive(Default, Clone, Copy)]
struct Tally {
    n: u64,
    product_sum: i64,
    plus: [u64; 2],
}

impl Tally {
    fn merge(self, o: Tally) -> Tally {
        Tally {
            n: self.n + o.n,
            product_sum: self.product_sum + o.product_sum,
            plus: [self.plus[0] + o.plus[0], self.plus[1] + o.plus[1]],
        }
    }

    fn finish(self) -> SampledCorrelation {
        let n = self.n as f64;
        let mean = self.product_sum as f64 / n;
        // Products are ±1, so the sample variance is 1 - mean².
        let var = (1.0 - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
        SampledCorrelation {
            mean,
            std_error: (var / n).sqrt(),
            samples: self.n,
            plus_fraction: [self.plus[0] as f64 / n, self.plus[1] as f64 / n],
        }
    }
}

/// Sharded sampling: shard `k` covers draws `[k·SHARD, (k+1)·SHARD)` and
/// uses stream `(seed, stream_base + k)`.
fn sharded<F>(samples: u64, seed: u64, stream_base: u64, draw: F) -> Tally
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> (i8, i8) + Sync,
{
    let shards = samples.div_ceil(SHARD);
    (0..shards)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream(seed, stream_base + k);
            let count = SHARD.min(samples - k * SHARD);
            let mut t = Tally::default();
            for _ in 0..count {
                let (s, u) = draw(&mut rng);
                t.n += 1;
                t.product_sum += i64::from(s * u);
                t.plus[0] += u64::from(s > 0);
                t.plus[1] += u64::from(u > 0);
            }
            t
        })
        .reduce(Tally::default, Tally::merge)
}

/// Joint outcomes drawn from `P(s, t) = (1 - s t a·b)/4`.
pub fn epr_correlation_sampled(a: Direction, b: Direction, samples: u64, seed: u64) -> Result<SampledCorrelation> {
    sampled_pair(a, b, samples, seed, 0)
}

fn sampled_pair(a: Direction, b: Direction, samples: u64, seed: u64, stream_base: u64) -> Result<SampledCorrelation> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let c = a.dot(&b);
    let p_same = (1.0 - c) / 2.0;
    Ok(sharded(samples, seed, stream_base, |rng| {
        let s: i8 = if rng.gen::<bool>() { 1 } else { -1 };
        let t = if rng.gen::<f64>() < p_same { s } else { -s };
        (s, t)
    })
    .finish())
}

/// `λ = sign(a·φ)`, `μ = -sign(b·φ)` with `φ` uniform on the sphere.
pub fn classical_sign_model(a: Direction, b: Direction, samples: u64, seed: u64) -> Result<SampledCorrelation> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    Ok(sharded(samples, seed, 0, |rng| {
        let phi = random_unit3(rng);
        (sign(dot3(a.0, phi)), -sign(dot3(b.0, phi)))
    })
    .finish())
}

/// Limit of [`classical_sign_model`]: `-1 + 2θ/π`.
pub fn classical_correlation(a: Direction, b: Direction) -> f64 {
    -1.0 + 2.0 * a.angle(&b) / PI
}

fn sign(x: f64) -> i8 {
    if x >= 0.0 {
        1
    } else {
        -1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChshMode {
    QuantumAnalytic,
    QuantumSampled,
    Classical,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChshResult {
    pub mode: ChshMode,
    /// `E(a,b), E(a,b'), E(a',b), E(a',b')`
    pub correlations: [f64; 4],
    pub std_errors: Option<[f64; 4]>,
    pub s: f64,
    pub s_std_error: Option<f64>,
    pub violation: bool,
    pub samples: Option<u64>,
}

/// `S = |E(a,b) - E(a,b') + E(a',b) + E(a',b')|`
pub fn chsh_value(e: [f64; 4]) -> f64 {
    (e[0] - e[1] + e[2] + e[3]).abs()
}

/// CHSH for directions `(a, a', b, b')`.
pub fn chsh(dirs: [Direction; 4], mode: ChshMode, samples: u64, seed: u64) -> Result<ChshResult> {
    let [a, a2, b, b2] = dirs;
    let pairs = [(a, b), (a, b2), (a2, b), (a2, b2)];
    match mode {
        ChshMode::QuantumAnalytic => {
            let e = pairs.map(|(x, y)| epr_correlation(x, y));
            let s = chsh_value(e);
            Ok(ChshResult { mode, correlations: e, std_errors: None, s, s_std_error: None, violation: s > 2.0, samples: None })
        }
        ChshMode::QuantumSampled => {
            let mut e = [0.0; 4];
            let mut se = [0.0; 4];
            for (i, (x, y)) in pairs.into_iter().enumerate() {
                // Disjoint stream ranges per pair.
                let r = sampled_pair(x, y, samples, seed, (i as u64) << 40)?;
                e[i] = r.mean;
                se[i] = r.std_error;
            }
            let s = chsh_value(e);
            let s_se = se.iter().map(|x| x * x).sum::<f64>().sqrt();
            Ok(ChshResult { mode, correlations: e, std_errors: Some(se), s, s_std_error: Some(s_se), violation: s > 2.0, samples: Some(samples) })
        }
        ChshMode::Classical => classical_chsh(dirs, samples, seed),
    }
}

/// All four correlations from the same `φ` draws; the standard error of `S`
/// comes from the per-draw combination.
fn classical_chsh(dirs: [Direction; 4], samples: u64, seed: u64) -> Result<ChshResult> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let [a, a2, b, b2] = dirs;
    let shards = samples.div_ceil(SHARD);
    let (sums, moments) = (0..shards)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream(seed, k);
            let count = SHARD.min(samples - k * SHARD);
            let mut sums = [0i64; 4];
            // Sum of the per-draw CHSH combination and of its square.
            let mut combo_moments = [0i64; 2];
            for _ in 0..count {
                let phi = random_unit3(&mut rng);
                let la = i64::from(sign(dot3(a.0, phi)));
                let la2 = i64::from(sign(dot3(a2.0, phi)));
                let mb = -i64::from(sign(dot3(b.0, phi)));
                let mb2 = -i64::from(sign(dot3(b2.0, phi)));
                let prods = [la * mb, la * mb2, la2 * mb, la2 * mb2];
                for i in 0..4 {
                    sums[i] += prods[i];
                }
                let combo = prods[0] - prods[1] + prods[2] + prods[3];
                combo_moments[0] += combo;
                combo_moments[1] += combo * combo;
            }
            (sums, combo_moments)
        })
        .reduce(
            || ([0i64; 4], [0i64; 2]),
            |(s1, q1), (s2, q2)| {
                let mut s = s1;
                for i in 0..4 {
                    s[i] += s2[i];
                }
                (s, [q1[0] + q2[0], q1[1] + q2[1]])
            },
        );
    let n = samples as f64;
    let e = sums.map(|x| x as f64 / n);
    let se = e.map(|m| ((1.0 - m * m).max(0.0) / n).sqrt());
    let mean_combo = moments[0] as f64 / n;
    let var_combo = (moments[1] as f64 / n - mean_combo * mean_combo).max(0.0);
    let s = chsh_value(e);
    Ok(ChshResult {
        mode: ChshMode::Classical,
        correlations: e,
        std_errors: Some(se),
        s,
        s_std_error: Some((var_combo / n).sqrt()),
        violation: s > 2.0,
        samples: Some(samples),
    })
}

/// Maximum over a 1000-point grid of the distance to the nearest sampled
/// Bloch vector `R|↑>`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coverage {
    pub samples: u64,
    pub grid_size: usize,
    pub statistic: f64,
}

pub const GRID_SIZE: usize = 1000;

/// Fibonacci lattice on the unit sphere.
pub fn sphere_grid(n: usize) -> Vec<[f64; 3]> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let (s, c) = (golden * i as f64).sin_cos();
            [r * c, r * s, z]
        })
        .collect()
}

/// `max_g min_p |g - p|` over grid points `g` and samples `p`.
pub fn coverage_statistic(points: &[[f64; 3]], grid: &[[f64; 3]]) -> f64 {
    grid.par_iter()
        .map(|g| {
            points.iter().fold(f64::INFINITY, |m, p| {
                let d = [g[0] - p[0], g[1] - p[1], g[2] - p[2]];
                m.min(dot3(d, d))
            })
        })
        .reduce(|| 0.0, f64::max)
        .sqrt()
}

/// Haar-random `SU(2)` elements applied to `|↑>`.
pub fn bloch_coverage(samples: u64, seed: u64) -> Result<Coverage> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let mut rng = stream(seed, 0);
    let up = Spinor::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    let points: Vec<[f64; 3]> = (0..samples)
        .map(|_| {
            let [w, x, y, z] = random_quaternion(&mut rng);
            // q = w + xi + yj + zk  ↦  [[w - iz, -y - ix], [y - ix, w + iz]]
            let u = SpinMatrix::new(
                Complex64::new(w, -z),
                Complex64::new(-y, -x),
                Complex64::new(y, -x),
                Complex64::new(w, z),
            );
            bloch_of(&(u * up))
        })
        .collect();
    let grid = sphere_grid(GRID_SIZE);
    Ok(Coverage { samples, grid_size: grid.len(), statistic: coverage_statistic(&points, &grid) })
}
