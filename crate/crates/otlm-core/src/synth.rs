//! Reproducible synthetic problems: skew-Gaussian mixture targets over
//! Gaussian dictionaries, at benchmark scale and at demonstration scale.
//!
//! Randomness is split into one ChaCha stream per component family
//! (means, widths, amplitudes, skews, noise), so changing one
//! perturbation level never reshuffles the other draws.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::dictionary::{Dictionary, Target};
use crate::error::{OtlmError, Result};

/// Skew-normal component: location, scale, shape, and mixture amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkewGaussianParams {
    pub mu: f64,
    pub sigma: f64,
    pub gamma: f64,
    pub amplitude: f64,
}

/// Skew-normal density (2/sigma) phi(z) Phi(gamma z) with z = (x - mu)/sigma.
/// Reduces to the normal density at gamma = 0 and integrates to one for
/// every gamma.
pub fn skew_gaussian_pdf(x: f64, mu: f64, sigma: f64, gamma: f64) -> f64 {
    let z = (x - mu) / sigma;
    let phi = (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let cap = 0.5 * libm::erfc(-gamma * z * std::f64::consts::FRAC_1_SQRT_2);
    2.0 / sigma * phi * cap
}

/// Benchmark-scale generator settings. Defaults reproduce the scaling test
/// construction: component means uniform over the grid, widths |N(2, 0.2)|,
/// amplitudes |N(1, 0.2)| + 0.01, skews N(0, 2), folded Gaussian noise with
/// scale 0.002, and unit-amplitude Gaussian basis atoms of width 2 at
/// regular intervals, truncated at five widths.
#[derive(Debug, Clone)]
pub struct SynthSpec {
    pub n_samples: usize,
    pub n_atoms: usize,
    pub seed: u64,
    /// 1 draws component means uniformly over the grid; 0 pins them to the
    /// atom centers; in between interpolates toward the drawn position.
    pub mean_jitter: f64,
    pub sigma_mean: f64,
    pub sigma_sd: f64,
    pub amp_sd: f64,
    pub skew_sd: f64,
    pub noise_sd: f64,
    pub basis_sigma: f64,
    /// Atom support half-width in units of `basis_sigma`.
    pub basis_trunc: f64,
}

impl SynthSpec {
    pub fn new(n_samples: usize, n_atoms: usize, seed: u64) -> Self {
        Self {
            n_samples,
            n_atoms,
            seed,
            mean_jitter: 1.0,
            sigma_mean: 2.0,
            sigma_sd: 0.2,
            amp_sd: 0.2,
            skew_sd: 2.0,
            noise_sd: 0.002,
            basis_sigma: 2.0,
            basis_trunc: 5.0,
        }
    }

    /// All perturbations zeroed: the target sits in the positive span of
    /// the dictionary with the drawn amplitudes.
    pub fn exact(n_samples: usize, n_atoms: usize, seed: u64) -> Self {
        Self {
            mean_jitter: 0.0,
            sigma_sd: 0.0,
            skew_sd: 0.0,
            noise_sd: 0.0,
            ..Self::new(n_samples, n_atoms, seed)
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_atoms == 0 || self.n_samples < self.n_atoms {
            return Err(OtlmError::InvalidValue(format!(
                "need n_samples >= n_atoms >= 1, got ({}, {})",
                self.n_samples, self.n_atoms
            )));
        }
        if self.basis_sigma.is_nan()
            || self.basis_sigma <= 0.0
            || self.sigma_mean.is_nan()
            || self.sigma_mean <= 0.0
        {
            return Err(OtlmError::InvalidValue("widths must be positive".into()));
        }
        for (name, v) in [
            ("mean_jitter", self.mean_jitter),
            ("sigma_sd", self.sigma_sd),
            ("amp_sd", self.amp_sd),
            ("skew_sd", self.skew_sd),
            ("noise_sd", self.noise_sd),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(OtlmError::InvalidValue(format!(
                    "{name} must be finite and >= 0, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// A generated problem: dictionary, target, the amplitudes that built the
/// target, the grid, and the component parameters.
#[derive(Debug, Clone)]
pub struct SynthProblem {
    pub dictionary: Dictionary,
    pub target: Target,
    pub true_weights: Vec<f64>,
    pub grid: Vec<f64>,
    pub components: Vec<SkewGaussianParams>,
}

fn stream(seed: u64, k: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k);
    rng
}

fn folded_normal(rng: &mut ChaCha8Rng, mean: f64, sd: f64) -> f64 {
    let n = Normal::new(mean, sd).expect("validated sd");
    n.sample(rng).abs()
}

/// Builds the scaling-benchmark problem on the integer grid 0..N.
pub fn gen_scaling_problem(spec: &SynthSpec) -> Result<SynthProblem> {
    spec.validate()?;
    let n = spec.n_samples;
    let m = spec.n_atoms;
    let grid: Vec<f64> = (0..n).map(|i| i as f64).collect();

    let mut rng_mu = stream(spec.seed, 0);
    let mut rng_sigma = stream(spec.seed, 1);
    let mut rng_amp = stream(spec.seed, 2);
    let mut rng_skew = stream(spec.seed, 3);
    let mut rng_noise = stream(spec.seed, 4);

    let centers: Vec<f64> = (0..m)
        .map(|k| (k + 1) as f64 * n as f64 / m as f64)
        .collect();

    let mut components = Vec::with_capacity(m);
    for &center in &centers {
        let drawn_mu = rng_mu.random_range(0.0..n as f64);
        let mu = center + spec.mean_jitter * (drawn_mu - center);
        let sigma = folded_normal(&mut rng_sigma, spec.sigma_mean, spec.sigma_sd);
        let amplitude = folded_normal(&mut rng_amp, 1.0, spec.amp_sd) + 0.01;
        let gamma = Normal::new(0.0, spec.skew_sd)
            .expect("validated sd")
            .sample(&mut rng_skew);
        components.push(SkewGaussianParams {
            mu,
            sigma,
            gamma,
            amplitude,
        });
    }

    let mut y = vec![0.0; n];
    for c in &components {
        add_component(&mut y, &grid, c);
    }
    for (i, v) in y.iter_mut().enumerate() {
        let _ = i;
        *v += folded_normal(&mut rng_noise, 0.0, spec.noise_sd);
    }

    let half = spec.basis_trunc * spec.basis_sigma;
    let columns: Vec<Vec<(usize, f64)>> = centers
        .iter()
        .map(|&c| {
            let lo = ((c - half).ceil().max(0.0)) as usize;
            let hi = ((c + half).floor().min((n - 1) as f64)) as usize;
            (lo..=hi)
                .map(|i| (i, skew_gaussian_pdf(grid[i], c, spec.basis_sigma, 0.0)))
                .collect()
        })
        .collect();
    let dictionary = Dictionary::from_columns(n, columns)?;
    let true_weights = components.iter().map(|c| c.amplitude).collect();
    let target = Target::new(y)?;
    Ok(SynthProblem {
        dictionary,
        target,
        true_weights,
        grid,
        components,
    })
}

/// Adds amplitude * pdf over the window where the density is non-zero in
/// f64; the Gaussian factor underflows to exact zero past |z| ~ 38.6, so
/// skipping |z| > 45 changes nothing.
fn add_component(y: &mut [f64], grid: &[f64], c: &SkewGaussianParams) {
    let reach = 45.0 * c.sigma;
    for (i, &x) in grid.iter().enumerate() {
        if (x - c.mu).abs() <= reach {
            y[i] += c.amplitude * skew_gaussian_pdf(x, c.mu, c.sigma, c.gamma);
        }
    }
}

/// Demonstration-scale settings: three unit-mass Gaussian atoms and a
/// target built from three skewed, shifted, widened components. Shift
/// magnitudes default to about one atom width and variance ratios to about
/// 1.3; both are drawn per seed within the configured ranges.
#[derive(Debug, Clone)]
pub struct DemoSpec {
    pub n_samples: usize,
    pub spacing: f64,
    pub atom_centers: Vec<f64>,
    pub atom_sigma: f64,
    /// Multiplies the drawn mean shifts; 0 aligns target and atoms.
    pub shift_scale: f64,
    /// Shift magnitude range in units of `atom_sigma`.
    pub shift_range: (f64, f64),
    /// Variance ratio range between target components and atoms.
    pub width_ratio_range: (f64, f64),
    /// Skewness magnitude range (signs set per `skew_direction`).
    pub skew_range: (f64, f64),
    pub skew_direction: SkewDirection,
    pub weight_range: (f64, f64),
    pub seed: u64,
}

/// How the sign of a component's skewness relates to its mean shift.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkewDirection {
    /// Independent random sign.
    Drawn,
    /// Tail points back toward the atom (sign opposite the shift).
    TowardAtom,
    /// Tail points away from the atom (sign of the shift).
    AwayFromAtom,
}

impl DemoSpec {
    pub fn new(seed: u64) -> Self {
        Self {
            n_samples: 200,
            spacing: 1.0,
            atom_centers: vec![40.0, 100.0, 160.0],
            atom_sigma: 10.0,
            shift_scale: 1.0,
            shift_range: (0.7, 1.1),
            width_ratio_range: (1.2, 1.4),
            skew_range: (1.5, 3.0),
            skew_direction: SkewDirection::Drawn,
            weight_range: (40.0, 120.0),
            seed,
        }
    }

    /// Sanity mode: components coincide with the atoms.
    pub fn aligned(seed: u64) -> Self {
        Self {
            shift_scale: 0.0,
            width_ratio_range: (1.0, 1.0),
            skew_range: (0.0, 0.0),
            ..Self::new(seed)
        }
    }

    pub fn generate(&self) -> Result<SynthProblem> {
        if self.atom_centers.is_empty()
            || self.atom_sigma.is_nan()
            || self.atom_sigma <= 0.0
            || self.spacing.is_nan()
            || self.spacing <= 0.0
        {
            return Err(OtlmError::InvalidValue(
                "demo spec needs atoms, a positive width, and positive spacing".into(),
            ));
        }
        let n = self.n_samples;
        let grid: Vec<f64> = (0..n).map(|i| i as f64 * self.spacing).collect();

        let mut rng_shift = stream(self.seed, 10);
        let mut rng_width = stream(self.seed, 11);
        let mut rng_skew = stream(self.seed, 12);
        let mut rng_weight = stream(self.seed, 13);
        let draw = |rng: &mut ChaCha8Rng, range: (f64, f64)| -> f64 {
            if range.0 == range.1 {
                // keep the stream moving so ranges can be varied independently
                let _ = rng.random::<f64>();
                range.0
            } else {
                rng.random_range(range.0..range.1)
            }
        };
        let sign = |rng: &mut ChaCha8Rng| -> f64 {
            if rng.random::<f64>() < 0.5 {
                -1.0
            } else {
                1.0
            }
        };

        let mut components = Vec::with_capacity(self.atom_centers.len());
        for &center in &self.atom_centers {
            let shift_sign = sign(&mut rng_shift);
            let shift = self.shift_scale
                * self.atom_sigma
                * draw(&mut rng_shift, self.shift_range)
                * shift_sign;
            let ratio = draw(&mut rng_width, self.width_ratio_range);
            let skew_sign = sign(&mut rng_skew);
            let gamma = match self.skew_direction {
                SkewDirection::Drawn => skew_sign,
                SkewDirection::TowardAtom => -shift.signum(),
                SkewDirection::AwayFromAtom => shift.signum(),
            } * draw(&mut rng_skew, self.skew_range);
            let amplitude = draw(&mut rng_weight, self.weight_range);
            components.push(SkewGaussianParams {
                mu: center + shift,
                sigma: self.atom_sigma * ratio.sqrt(),
                gamma,
                amplitude,
            });
        }

        // Atoms and components are both normalized to unit grid mass.
        let columns: Vec<Vec<f64>> = self
            .atom_centers
            .iter()
            .map(|&c| {
                normalize(
                    grid.iter()
                        .map(|&x| skew_gaussian_pdf(x, c, self.atom_sigma, 0.0))
                        .collect(),
                )
            })
            .collect();
        let mut y = vec![0.0; n];
        for comp in &components {
            let profile = normalize(
                grid.iter()
                    .map(|&x| skew_gaussian_pdf(x, comp.mu, comp.sigma, comp.gamma))
                    .collect(),
            );
            for (t, p) in y.iter_mut().zip(&profile) {
                *t += comp.amplitude * p;
            }
        }

        let dictionary = Dictionary::from_dense_columns(columns)?;
        let true_weights = components.iter().map(|c| c.amplitude).collect();
        let target = Target::new(y)?;
        Ok(SynthProblem {
            dictionary,
            target,
            true_weights,
            grid,
            components,
        })
    }
}

fn normalize(mut v: Vec<f64>) -> Vec<f64> {
    let s: f64 = v.iter().sum();
    for x in &mut v {
        *x /= s;
    }
    v
}

/// Default demonstration problem for a seed.
pub fn gen_demo_problem(seed: u64) -> Result<SynthProblem> {
    DemoSpec::new(seed).generate()
}
