//! Observer and target motion, bearing geometry and synthetic observations.
//!
//! Angles are degrees measured clockwise from north (+Y). A bearing is
//! `atan2(dx, dy)` folded into `[0, 360)`, so a unit step along course `c`
//! moves `(sin c, cos c)`.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Result, TmaError};

/// Folds an angle in degrees into `[0, 360)`.
pub fn wrap_360(deg: f64) -> f64 {
    let r = deg.rem_euclid(360.0);
    // rem_euclid rounds tiny negatives up to exactly 360.0
    if r >= 360.0 {
        0.0
    } else {
        r
    }
}

/// Planar position in meters, x east and y north.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Constant-course, constant-speed segment of the observer path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Leg {
    /// Degrees clockwise from north.
    pub course: f64,
    /// Meters per second.
    pub speed: f64,
    /// Seconds.
    pub duration: f64,
}

/// Ground-truth target motion relative to the observer start.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetTruth {
    /// Initial range in meters.
    pub r0: f64,
    /// Initial bearing in degrees.
    pub b0: f64,
    pub course: f64,
    pub speed: f64,
}

fn default_observable() -> bool {
    true
}

/// One engagement: observer path, target truth, sampling and noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub observer_start: Point,
    pub legs: Vec<Leg>,
    pub truth: TargetTruth,
    /// Sample interval in seconds.
    pub dt: f64,
    pub n_samples: usize,
    /// Bearing noise standard deviation in degrees.
    pub noise_sigma: f64,
    pub seed: u64,
    /// Requires an observer maneuver (two legs with distinct courses).
    #[serde(default = "default_observable")]
    pub observable: bool,
}

impl Scenario {
    /// Checks every structural invariant, naming the first one violated.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(TmaError::InvalidScenario(msg));
        if !self.observer_start.is_finite() {
            return bad("observer_start must be finite".into());
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("dt must be > 0 (got {})", self.dt));
        }
        if self.n_samples < 2 {
            return bad(format!("n_samples must be >= 2 (got {})", self.n_samples));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return bad(format!("noise_sigma must be >= 0 (got {})", self.noise_sigma));
        }
        let t = &self.truth;
        if !(t.r0.is_finite() && t.r0 > 0.0) {
            return bad(format!("truth.r0 must be > 0 (got {})", t.r0));
        }
        if !(t.speed.is_finite() && t.speed >= 0.0) {
            return bad(format!("truth.speed must be >= 0 (got {})", t.speed));
        }
        if !(t.b0.is_finite() && t.course.is_finite()) {
            return bad("truth.b0 and truth.course must be finite".into());
        }
        if self.legs.is_empty() {
            return bad("observer needs at least one leg".into());
        }
        for (i, leg) in self.legs.iter().enumerate() {
            if !(leg.duration.is_finite() && leg.duration > 0.0) {
                return bad(format!("leg {i}: duration must be > 0 (got {})", leg.duration));
            }
            if !(leg.speed.is_finite() && leg.speed >= 0.0) {
                return bad(format!("leg {i}: speed must be >= 0 (got {})", leg.speed));
            }
            if !leg.course.is_finite() {
                return bad(format!("leg {i}: course must be finite"));
            }
        }
        let window = (self.n_samples - 1) as f64 * self.dt;
        let total: f64 = self.legs.iter().map(|l| l.duration).sum();
        if total < window {
            return bad(format!(
                "total leg duration {total} s is shorter than the observation window {window} s"
            ));
        }
        if self.observable {
            let first = wrap_360(self.legs[0].course);
            let maneuvers = self.legs.iter().any(|l| wrap_360(l.course) != first);
            if self.legs.len() < 2 || !maneuvers {
                return bad(
                    "leg requirement: an observable scenario needs at least two legs with distinct courses"
                        .into(),
                );
            }
        }
        Ok(())
    }

    /// Sample times `k * dt`, `k = 0..n_samples`.
    pub fn times(&self) -> Vec<f64> {
        (0..self.n_samples).map(|k| k as f64 * self.dt).collect()
    }

    /// Copy of the scenario with a different noise level.
    pub fn with_noise(&self, sigma: f64) -> Self {
        Self {
            noise_sigma: sigma,
            ..self.clone()
        }
    }

    /// Initial target position implied by the truth block.
    pub fn target_start(&self) -> Result<Point> {
        initial_target_position(self.observer_start, self.truth.b0, self.truth.r0)
    }
}

/// Time-indexed positions.
#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    pub times: Vec<f64>,
    pub positions: Vec<Point>,
}

impl Track {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Time-indexed bearings in degrees, each in `[0, 360)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BearingSeries {
    pub times: Vec<f64>,
    pub bearings_deg: Vec<f64>,
}

impl BearingSeries {
    pub fn len(&self) -> usize {
        self.bearings_deg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bearings_deg.is_empty()
    }
}

/// Target position at range `r0` along bearing `b0` from `obs0`.
pub fn initial_target_position(obs0: Point, b0: f64, r0: f64) -> Result<Point> {
    if !obs0.is_finite() {
        return Err(TmaError::NonFinite("observer position"));
    }
    if !b0.is_finite() {
        return Err(TmaError::NonFinite("initial bearing"));
    }
    if !r0.is_finite() {
        return Err(TmaError::NonFinite("initial range"));
    }
    if r0 <= 0.0 {
        return Err(TmaError::Domain(format!("initial range must be > 0 (got {r0})")));
    }
    let (s, c) = b0.to_radians().sin_cos();
    Ok(Point::new(obs0.x + r0 * s, obs0.y + r0 * c))
}

/// Position reached after moving `distance` meters along `(sin, cos)`.
#[inline]
pub(crate) fn advance(start: Point, sin_c: f64, cos_c: f64, distance: f64) -> Point {
    Point::new(start.x + distance * sin_c, start.y + distance * cos_c)
}

/// Constant-velocity track sampled at `k * dt` for `k = 0..n`.
pub fn propagate_linear(start: Point, course: f64, speed: f64, dt: f64, n: usize) -> Result<Track> {
    if !(start.is_finite() && course.is_finite() && speed.is_finite() && dt.is_finite()) {
        return Err(TmaError::NonFinite("linear propagation input"));
    }
    if n == 0 || dt <= 0.0 {
        return Err(TmaError::Config(format!(
            "propagation needs n >= 1 and dt > 0 (got n={n}, dt={dt})"
        )));
    }
    let (s, c) = course.to_radians().sin_cos();
    let times: Vec<f64> = (0..n).map(|k| k as f64 * dt).collect();
    let positions = (0..n)
        .map(|k| advance(start, s, c, speed * (k as f64 * dt)))
        .collect();
    Ok(Track { times, positions })
}

/// Observer position at elapsed time `t`, splitting any step that straddles a
/// leg boundary at the exact boundary time.
fn observer_position_at(start: Point, legs: &[Leg], t: f64) -> Point {
    let mut pos = start;
    let mut leg_start = 0.0;
    for leg in legs {
        if t <= leg_start {
            break;
        }
        let active = (t - leg_start).min(leg.duration);
        let (s, c) = leg.course.to_radians().sin_cos();
        pos = advance(pos, s, c, active * leg.speed);
        leg_start += leg.duration;
    }
    pos
}

/// Piecewise-linear observer path sampled at the scenario times.
pub fn observer_track(scenario: &Scenario) -> Result<Track> {
    scenario.validate()?;
    let times = scenario.times();
    let positions = times
        .iter()
        .map(|&t| observer_position_at(scenario.observer_start, &scenario.legs, t))
        .collect();
    Ok(Track { times, positions })
}

/// True target path sampled at the scenario times.
pub fn target_track(scenario: &Scenario) -> Result<Track> {
    scenario.validate()?;
    propagate_linear(
        scenario.target_start()?,
        scenario.truth.course,
        scenario.truth.speed,
        scenario.dt,
        scenario.n_samples,
    )
}

/// Bearing from `from` to `to` in `[0, 360)`.
pub fn bearing_from_to(from: Point, to: Point) -> Result<f64> {
    let dx = to.x - from.x;
    let dy = to.y - from.y;
    if dx == 0.0 && dy == 0.0 {
        return Err(TmaError::Domain(format!(
            "observer collocated with target at ({}, {})",
            from.x, from.y
        )));
    }
    Ok(wrap_360(dx.atan2(dy).to_degrees()))
}

/// Bearings from each observer sample to the matching target sample.
pub fn bearings_between(observer: &Track, target: &Track) -> Result<BearingSeries> {
    if observer.len() != target.len() {
        return Err(TmaError::LengthMismatch {
            left: observer.len(),
            right: target.len(),
        });
    }
    let bearings_deg = observer
        .positions
        .iter()
        .zip(&target.positions)
        .map(|(o, t)| bearing_from_to(*o, *t))
        .collect::<Result<Vec<_>>>()?;
    Ok(BearingSeries {
        times: observer.times.clone(),
        bearings_deg,
    })
}

/// Output of [`synthesize_bearings`].
#[derive(Debug, Clone)]
pub struct Observation {
    pub observer: Track,
    pub target: Track,
    pub clean: BearingSeries,
    pub noisy: BearingSeries,
}

/// Clean bearings plus an iid Gaussian-corrupted copy drawn from `rng`.
///
/// With `noise_sigma == 0` the noisy series is the clean one and `rng` is
/// left untouched.
pub fn synthesize_bearings<R: Rng + ?Sized>(scenario: &Scenario, rng: &mut R) -> Result<Observation> {
    let observer = observer_track(scenario)?;
    let target = target_track(scenario)?;
    let clean = bearings_between(&observer, &target)?;
    let noisy = if scenario.noise_sigma == 0.0 {
        clean.clone()
    } else {
        let normal = Normal::new(0.0, scenario.noise_sigma)
            .map_err(|e| TmaError::InvalidScenario(format!("noise_sigma: {e}")))?;
        BearingSeries {
            times: clean.times.clone(),
            bearings_deg: clean
                .bearings_deg
                .iter()
                .map(|b| wrap_360(b + normal.sample(rng)))
                .collect(),
        }
    };
    Ok(Observation {
        observer,
        target,
        clean,
        noisy,
    })
}
