//! Two-channel spin eigenproblem in a magnetic field, the total matrix
//! Hamiltonian and its Dirac linearization.

use std::f64::consts::PI;

use nalgebra::{Complex, Matrix4};
use serde::Serialize;

use crate::dynamics::{integrate, Mode, Trajectory};
use crate::error::{domain, Result};
use crate::SystemParams;

pub type C64 = Complex<f64>;
pub type Matrix4c = Matrix4<C64>;

/// Elementwise tolerance of the Dirac algebra identities.
pub const ALGEBRA_TOLERANCE: f64 = 1e-12;
/// Relative tolerance of the Dirac spectrum.
pub const SPECTRUM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Up,
    Down,
}

impl Channel {
    /// `+1` for up, `-1` for down.
    pub fn sign(self) -> f64 {
        match self {
            Channel::Up => 1.0,
            Channel::Down => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpinContext {
    pub channel: Channel,
    /// Electric charge `e`.
    pub charge: f64,
    pub b_z: f64,
    /// Vector potential components `(A_x, A_y, A_z)`.
    pub vector_potential: [f64; 3],
    pub hbar: f64,
    #[serde(rename = "M")]
    pub mass: f64,
}

impl SpinContext {
    /// Same context in the opposite channel.
    pub fn flipped(self) -> Self {
        let channel = match self.channel {
            Channel::Up => Channel::Down,
            Channel::Down => Channel::Up,
        };
        Self { channel, ..self }
    }
}

/// `e_alpha e hbar B_z / 2M`.
pub fn spin_eigenvalue(ctx: &SpinContext) -> Result<f64> {
    if !(ctx.mass > 0.0) {
        return Err(domain(format!("mass must be positive, got {}", ctx.mass)));
    }
    // the channel sign multiplies last so both channels differ only in sign
    Ok(ctx.channel.sign() * (ctx.charge * ctx.hbar * ctx.b_z / (2.0 * ctx.mass)))
}

/// Exponent form of the spin eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChiVariant {
    /// Exponent linear in `pi_x - e A_x`, as printed.
    #[default]
    Literal,
    /// Exponent quadratic in `pi_x - e A_x`.
    Gaussian,
}

pub fn chi_eigenfunction(ctx: &SpinContext, pi_x: f64, variant: ChiVariant) -> Result<f64> {
    let scale = ctx.charge * ctx.hbar * ctx.b_z;
    if scale == 0.0 || !scale.is_finite() {
        return Err(domain(format!(
            "e hbar B_z must be nonzero and finite, got {scale:e}"
        )));
    }
    let shift = pi_x - ctx.charge * ctx.vector_potential[0];
    let numerator = match variant {
        ChiVariant::Literal => shift,
        ChiVariant::Gaussian => shift * shift,
    };
    Ok(PI.powf(-0.25) * (-numerator / (2.0 * scale)).exp())
}

/// Spin projections `(S_z, S_x, S_y)` for a channel.
pub fn spin_projection(channel: Channel, hbar: f64) -> (f64, f64, f64) {
    (channel.sign() * 0.5 * hbar, 0.0, 0.0)
}

/// `c sqrt(p^2 + pi^2 + M0^2 c^2)`.
pub fn total_hamiltonian(p: [f64; 3], pi: [f64; 3], rest_mass: f64, c: f64) -> f64 {
    let p2: f64 = p.iter().map(|x| x * x).sum();
    let pi2: f64 = pi.iter().map(|x| x * x).sum();
    c * (p2 + pi2 + rest_mass * rest_mass * c * c).sqrt()
}

fn re(x: f64) -> C64 {
    Complex::new(x, 0.0)
}

fn im(x: f64) -> C64 {
    Complex::new(0.0, x)
}

/// Pauli matrices `sigma_x, sigma_y, sigma_z`.
fn pauli() -> [[[C64; 2]; 2]; 3] {
    let (o, l) = (re(0.0), re(1.0));
    [
        [[o, l], [l, o]],
        [[o, im(-1.0)], [im(1.0), o]],
        [[l, o], [o, re(-1.0)]],
    ]
}

/// `alpha_1, alpha_2, alpha_3` in the standard representation.
pub fn alpha_matrices() -> [Matrix4c; 3] {
    let s = pauli();
    let mut out = [Matrix4c::zeros(); 3];
    for (k, m) in out.iter_mut().enumerate() {
        for i in 0..2 {
            for j in 0..2 {
                m[(i, j + 2)] = s[k][i][j];
                m[(i + 2, j)] = s[k][i][j];
            }
        }
    }
    out
}

/// `rho_3 = diag(1, 1, -1, -1)`.
pub fn rho3() -> Matrix4c {
    Matrix4c::from_diagonal(&nalgebra::Vector4::new(
        re(1.0),
        re(1.0),
        re(-1.0),
        re(-1.0),
    ))
}

/// `c alpha . p + rho_3 M0 c^2` with its construction data.
#[derive(Debug, Clone, PartialEq)]
pub struct DiracOperator {
    pub matrix: Matrix4c,
    pub momentum: [f64; 3],
    pub rest_mass: f64,
    pub c: f64,
    pub representation: &'static str,
}

pub fn dirac_hamiltonian(p: [f64; 3], rest_mass: f64, c: f64) -> DiracOperator {
    let alpha = alpha_matrices();
    let mut matrix = rho3() * re(rest_mass * c * c);
    for k in 0..3 {
        matrix += alpha[k] * re(c * p[k]);
    }
    DiracOperator {
        matrix,
        momentum: p,
        rest_mass,
        c,
        representation: "standard",
    }
}

fn max_abs(m: &Matrix4c) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Maximum elementwise deviation of one identity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityDeviation {
    pub identity: String,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiracReport {
    pub representation: &'static str,
    pub momentum: [f64; 3],
    pub rest_mass: f64,
    pub c: f64,
    /// The ten anticommutator identities among `alpha_1..3` and `rho_3`.
    pub identities: Vec<IdentityDeviation>,
    /// `max |H^2 - (c^2 p^2 + M0^2 c^4) I|` relative to `c^2 p^2 + M0^2 c^4`.
    pub h_squared_deviation: f64,
    pub hermitian_deviation: f64,
    pub trace: f64,
    pub eigenvalues: [f64; 4],
    /// Largest relative deviation of the sorted spectrum from `-E, -E, E, E`.
    pub spectrum_deviation: f64,
    pub passed: bool,
}

impl DiracOperator {
    /// `c^2 p^2 + M0^2 c^4`.
    pub fn energy_squared(&self) -> f64 {
        let p2: f64 = self.momentum.iter().map(|x| x * x).sum();
        let c2 = self.c * self.c;
        c2 * p2 + self.rest_mass * self.rest_mass * c2 * c2
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let eig = self.matrix.symmetric_eigenvalues();
        let mut out = [eig[0], eig[1], eig[2], eig[3]];
        out.sort_by(f64::total_cmp);
        out
    }

    pub fn verify(&self) -> DiracReport {
        let alpha = alpha_matrices();
        let beta = rho3();
        let names = ["alpha1", "alpha2", "alpha3", "rho3"];
        let mats = [alpha[0], alpha[1], alpha[2], beta];
        let id = Matrix4c::identity();
        let mut identities = Vec::with_capacity(10);
        for i in 0..4 {
            for j in i..4 {
                let anti = mats[i] * mats[j] + mats[j] * mats[i];
                let expected = if i == j {
                    id * re(2.0)
                } else {
                    Matrix4c::zeros()
                };
                identities.push(IdentityDeviation {
                    identity: format!("{{{}, {}}}", names[i], names[j]),
                    max_deviation: max_abs(&(anti - expected)),
                });
            }
        }

        let e2 = self.energy_squared();
        let h2 = self.matrix * self.matrix;
        let h_squared_deviation = max_abs(&(h2 - id * re(e2))) / e2.max(f64::MIN_POSITIVE);
        let hermitian_deviation = max_abs(&(self.matrix - self.matrix.adjoint()));
        let trace = self.matrix.trace().norm();

        let eigenvalues = self.eigenvalues();
        let e = e2.sqrt();
        let expected = [-e, -e, e, e];
        let spectrum_deviation = eigenvalues
            .iter()
            .zip(expected)
            .map(|(got, want)| (got - want).abs() / e.max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max);

        let scale = self.matrix.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let passed = identities
            .iter()
            .all(|d| d.max_deviation <= ALGEBRA_TOLERANCE)
            && h_squared_deviation <= ALGEBRA_TOLERANCE
            && hermitian_deviation <= ALGEBRA_TOLERANCE * scale
            && trace <= ALGEBRA_TOLERANCE * scale
            && spectrum_deviation <= SPECTRUM_TOLERANCE;
        DiracReport {
            representation: self.representation,
            momentum: self.momentum,
            rest_mass: self.rest_mass,
            c: self.c,
            identities,
            h_squared_deviation,
            hermitian_deviation,
            trace,
            eigenvalues,
            spectrum_deviation,
            passed,
        }
    }
}

/// Direction of the inerton wave associated with a spectral branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InertonWave {
    /// Positive branch: the cloud moves away from the particle.
    Outgoing,
    /// Negative branch: the cloud comes back to the particle.
    Incoming,
}

pub fn classify_inerton_wave(energy: f64) -> Result<InertonWave> {
    if energy > 0.0 {
        Ok(InertonWave::Outgoing)
    } else if energy < 0.0 {
        Ok(InertonWave::Incoming)
    } else {
        Err(domain(format!("cannot classify spectral value {energy}")))
    }
}

/// Intrinsic-coordinate trajectory of one channel.
///
/// The up channel is the ordinary aggregate trajectory. The down channel
/// mirrors the particle coordinate and velocity, which is the exact solution
/// with `v0 -> -v0`; the cloud separation is unchanged.
pub fn intrinsic_trajectory(
    channel: Channel,
    params: &SystemParams,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    let mut traj = integrate(params, t_end, dt, &Mode::Aggregate)?;
    let sign = channel.sign();
    for s in &mut traj.samples {
        s.particle_x *= sign;
        s.particle_v *= sign;
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{ELECTRON_MASS, ELEMENTARY_CHARGE, HBAR};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ctx(channel: Channel, e: f64, hbar: f64, b: f64, m: f64) -> SpinContext {
        SpinContext {
            channel,
            charge: e,
            b_z: b,
            vector_potential: [0.0; 3],
            hbar,
            mass: m,
        }
    }

    /// Characteristic polynomial coefficients by Faddeev-LeVerrier, then
    /// roots of the resulting real quartic by Durand-Kerner.
    fn oracle_eigenvalues(m: &Matrix4c) -> Vec<f64> {
        let n = 4;
        let id = Matrix4c::identity();
        let mut coeffs = vec![re(1.0)];
        let mut mk = Matrix4c::zeros();
        for k in 1..=n {
            mk = m * mk + id * coeffs[k - 1];
            let ck = -(m * mk).trace() / re(k as f64);
            coeffs.push(ck);
        }
        let poly = |z: C64| coeffs.iter().fold(re(0.0), |acc, &c| acc * z + c);
        let mut roots: Vec<C64> = (0..n).map(|k| C64::new(0.4, 0.9).powu(k as u32)).collect();
        for _ in 0..500 {
            for i in 0..n {
                let denom = (0..n)
                    .filter(|&j| j != i)
                    .fold(re(1.0), |acc, j| acc * (roots[i] - roots[j]));
                let step = poly(roots[i]) / denom;
                roots[i] -= step;
            }
        }
        let mut out: Vec<f64> = roots.iter().map(|z| z.re).collect();
        out.sort_by(f64::total_cmp);
        out
    }

    #[test]
    fn spin_eigenvalue_examples() {
        assert_eq!(
            spin_eigenvalue(&ctx(Channel::Up, 2.0, 1.0, 3.0, 1.0)).unwrap(),
            3.0
        );
        let up = spin_eigenvalue(&ctx(
            Channel::Up,
            ELEMENTARY_CHARGE,
            HBAR,
            1.0,
            ELECTRON_MASS,
        ))
        .unwrap();
        assert_relative_eq!(up, 9.274e-24, max_relative = 1e-4);
        for ch in [Channel::Up, Channel::Down] {
            assert_eq!(spin_eigenvalue(&ctx(ch, 1.0, 1.0, 0.0, 1.0)).unwrap(), 0.0);
        }
        assert!(spin_eigenvalue(&ctx(Channel::Up, 1.0, 1.0, 1.0, 0.0)).is_err());
    }

    #[test]
    fn channels_are_antisymmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let c = ctx(
                Channel::Up,
                rng.gen_range(-5.0..5.0),
                rng.gen_range(0.1..3.0),
                rng.gen_range(-10.0..10.0),
                rng.gen_range(0.1..4.0),
            );
            assert_eq!(
                spin_eigenvalue(&c).unwrap(),
                -spin_eigenvalue(&c.flipped()).unwrap()
            );
        }
    }

    #[test]
    fn chi_examples() {
        let c = ctx(Channel::Up, 1.0, 1.0, 1.0, 1.0);
        let norm = PI.powf(-0.25);
        assert_relative_eq!(norm, 0.75113, max_relative = 1e-5);
        for v in [ChiVariant::Literal, ChiVariant::Gaussian] {
            assert_eq!(chi_eigenfunction(&c, 0.0, v).unwrap(), norm);
        }
        assert_relative_eq!(
            chi_eigenfunction(&c, 2.0, ChiVariant::Literal).unwrap(),
            0.27633,
            max_relative = 1e-4
        );
        assert_relative_eq!(
            chi_eigenfunction(&c, 2.0, ChiVariant::Gaussian).unwrap(),
            0.10165,
            max_relative = 1e-4
        );
        let mut shifted = c;
        shifted.vector_potential = [0.5, 0.0, 0.0];
        assert_eq!(
            chi_eigenfunction(&shifted, 0.5, ChiVariant::Literal).unwrap(),
            norm
        );
        assert!(chi_eigenfunction(
            &ctx(Channel::Up, 1.0, 1.0, 0.0, 1.0),
            1.0,
            ChiVariant::Literal
        )
        .is_err());
    }

    #[test]
    fn projections() {
        assert_eq!(spin_projection(Channel::Up, 2.0), (1.0, 0.0, 0.0));
        assert_eq!(spin_projection(Channel::Down, 2.0), (-1.0, 0.0, 0.0));
    }

    #[test]
    fn total_hamiltonian_examples() {
        assert_eq!(total_hamiltonian([0.0; 3], [0.0; 3], 2.0, 3.0), 18.0);
        assert_eq!(
            total_hamiltonian([3.0, 0.0, 0.0], [0.0, 4.0, 0.0], 0.0, 1.0),
            5.0
        );
        let mut last = 0.0;
        for k in 0..20 {
            let h = total_hamiltonian(
                [0.1 * k as f64, 0.0, 0.0],
                [0.05 * k as f64, 0.0, 0.0],
                1.0,
                1.0,
            );
            assert!(h >= last);
            last = h;
        }
    }

    #[test]
    fn dirac_examples() {
        let d = dirac_hamiltonian([0.0; 3], 1.0, 1.0);
        assert_eq!(d.matrix, rho3());
        let ev = d.eigenvalues();
        for (got, want) in ev.iter().zip([-1.0, -1.0, 1.0, 1.0]) {
            assert_relative_eq!(*got, want, max_relative = 1e-12);
        }

        let d = dirac_hamiltonian([1.0, 0.0, 0.0], 1.0, 1.0);
        let r = 2f64.sqrt();
        for (got, want) in d.eigenvalues().iter().zip([-r, -r, r, r]) {
            assert_relative_eq!(*got, want, max_relative = 1e-12);
        }
        let report = d.verify();
        assert!(report.passed, "{report:?}");
        assert_eq!(report.identities.len(), 10);
    }

    #[test]
    fn dirac_spectrum_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let p = [
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
            ];
            let m0 = rng.gen_range(0.1..2.0);
            let c = rng.gen_range(0.5..2.0);
            let d = dirac_hamiltonian(p, m0, c);
            let report = d.verify();
            assert!(report.passed, "{report:?}");
            let e = total_hamiltonian(p, [0.0; 3], m0, c);
            assert_relative_eq!(d.energy_squared().sqrt(), e, max_relative = 1e-14);
            let oracle = oracle_eigenvalues(&d.matrix);
            for (a, b) in d.eigenvalues().iter().zip(&oracle) {
                // repeated roots converge only to ~sqrt(eps) in Durand-Kerner
                assert!((a - b).abs() <= 1e-6 * e, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn wave_classification() {
        assert_eq!(classify_inerton_wave(1.0).unwrap(), InertonWave::Outgoing);
        assert_eq!(classify_inerton_wave(-1.0).unwrap(), InertonWave::Incoming);
        assert!(classify_inerton_wave(0.0).is_err());
    }

    #[test]
    fn down_channel_mirrors_particle() {
        let p = SystemParams::natural();
        let up = intrinsic_trajectory(Channel::Up, &p, 2.0, 1e-3).unwrap();
        let down = intrinsic_trajectory(Channel::Down, &p, 2.0, 1e-3).unwrap();
        for (u, d) in up.samples.iter().zip(&down.samples) {
            assert_eq!(u.particle_v, -d.particle_v);
            assert_eq!(u.cloud_x, d.cloud_x);
            assert!(d.particle_v <= 1e-9 && d.particle_v >= -p.v0 - 1e-9);
        }
    }
}
