use serde::Serialize;

/// Particle coordinate and velocity together with the cloud separation and
/// its rate, at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct AggregateState {
    pub t: f64,
    /// Particle coordinate `X`.
    #[serde(rename = "X")]
    pub particle_x: f64,
    /// Particle velocity `dX/dt`.
    #[serde(rename = "dXdt")]
    pub particle_v: f64,
    /// Cloud-particle separation `x`.
    #[serde(rename = "x")]
    pub cloud_x: f64,
    /// Cloud velocity `dx/dt`.
    #[serde(rename = "dxdt")]
    pub cloud_v: f64,
}

impl AggregateState {
    pub fn new(t: f64, particle_x: f64, particle_v: f64, cloud_x: f64, cloud_v: f64) -> Self {
        Self {
            t,
            particle_x,
            particle_v,
            cloud_x,
            cloud_v,
        }
    }

    pub(crate) fn vector(&self) -> [f64; 4] {
        [self.particle_x, self.particle_v, self.cloud_x, self.cloud_v]
    }

    pub(crate) fn from_vector(t: f64, y: [f64; 4]) -> Self {
        Self::new(t, y[0], y[1], y[2], y[3])
    }
}
