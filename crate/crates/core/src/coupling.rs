//! Interpretation between the two levels.
//!
//! Emergence turns a bird snapshot into flock observations: birds are linked
//! when they are both within `d_prox` of each other and headed within
//! `theta` degrees, and every connected component of at least `min_size`
//! birds is reified at its torus centroid with the mean member heading.
//!
//! Immergence goes the other way: each flock displacement becomes one
//! command per member bird, split linearly over the `r` micro ticks of a
//! macro step.

use std::collections::{BTreeSet, HashSet, VecDeque};

use thiserror::Error;

use crate::boids::{BirdId, Command, CommandSet, MicroObservation};
use crate::flocks::Displacement;
use crate::geometry::{
    circular_mean, heading_diff, torus_centroid, torus_distance, HeadingDeg, Position, TorusWorld,
    Vec2,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CouplingError {
    #[error("invalid cluster parameters: {0}")]
    InvalidParams(String),
    #[error("bird {0} belongs to more than one flock displacement")]
    OverlappingMembers(BirdId),
    #[error("step ratio must be at least 1")]
    ZeroRatio,
    #[error("member {0} is not present in the observation")]
    MissingMember(BirdId),
    #[error("cannot reify an empty member set")]
    EmptyCluster,
}

/// How a flock's size is derived from the spread of its members.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RadiusRule {
    /// Mean member distance to the centroid.
    #[default]
    Mean,
    /// Largest member distance to the centroid.
    Max,
    /// Root-mean-square member distance to the centroid.
    Rms,
}

impl std::str::FromStr for RadiusRule {
    type Err = CouplingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mean" => Ok(RadiusRule::Mean),
            "max" => Ok(RadiusRule::Max),
            "rms" | "std" => Ok(RadiusRule::Rms),
            other => Err(CouplingError::InvalidParams(format!(
                "unknown radius rule {other:?} (expected mean, max or std)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterParams {
    pub d_prox: f64,
    /// Degrees, in `[0, 180]`.
    pub theta: f64,
    pub min_size: usize,
    pub radius_rule: RadiusRule,
}

impl Default for ClusterParams {
    fn default() -> Self {
        Self {
            d_prox: 5.0,
            theta: 30.0,
            min_size: 3,
            radius_rule: RadiusRule::Mean,
        }
    }
}

impl ClusterParams {
    pub fn validate(&self) -> Result<(), CouplingError> {
        if !(self.d_prox.is_finite() && self.d_prox > 0.0) {
            return Err(CouplingError::InvalidParams(format!(
                "d_prox must be positive, got {}",
                self.d_prox
            )));
        }
        if !(0.0..=180.0).contains(&self.theta) {
            return Err(CouplingError::InvalidParams(format!(
                "theta must lie in [0, 180], got {}",
                self.theta
            )));
        }
        if self.min_size < 2 {
            return Err(CouplingError::InvalidParams(format!(
                "min_size must be at least 2, got {}",
                self.min_size
            )));
        }
        Ok(())
    }

    fn linked(&self, a: &crate::boids::Bird, b: &crate::boids::Bird, world: &TorusWorld) -> bool {
        torus_distance(a.pos, b.pos, world) <= self.d_prox
            && heading_diff(a.heading, b.heading) <= self.theta
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlockObservation {
    pub members: BTreeSet<BirdId>,
    pub centroid: Position,
    pub heading: HeadingDeg,
    pub radius: f64,
}

/// Connected components of the proximity/orientation graph with at least
/// `min_size` birds, each as ascending ids, ordered by smallest member.
pub fn detect_clusters(
    obs: &MicroObservation,
    params: &ClusterParams,
    world: &TorusWorld,
) -> Vec<Vec<BirdId>> {
    let n = obs.len();
    let mut adjacency = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if params.linked(&obs[i], &obs[j], world) {
                adjacency[i].push(j);
                adjacency[j].push(i);
            }
        }
    }

    let mut visited = vec![false; n];
    let mut clusters = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..n {
        if visited[start] {
            continue;
        }
        visited[start] = true;
        queue.push_back(start);
        let mut component = Vec::new();
        while let Some(i) = queue.pop_front() {
            component.push(obs[i].id);
            for &j in &adjacency[i] {
                if !visited[j] {
                    visited[j] = true;
                    queue.push_back(j);
                }
            }
        }
        if component.len() >= params.min_size {
            component.sort_unstable();
            clusters.push(component);
        }
    }
    clusters.sort_by_key(|c| c[0]);
    clusters
}

/// Promotes a set of birds to a flock observation.
pub fn reify(
    members: &[BirdId],
    obs: &MicroObservation,
    world: &TorusWorld,
    rule: RadiusRule,
) -> Result<FlockObservation, CouplingError> {
    let mut birds = Vec::with_capacity(members.len());
    for &id in members {
        let b = obs
            .iter()
            .find(|b| b.id == id)
            .ok_or(CouplingError::MissingMember(id))?;
        birds.push(*b);
    }
    birds.sort_by_key(|b| b.id);
    let Some(lowest) = birds.first() else {
        return Err(CouplingError::EmptyCluster);
    };

    let positions: Vec<Position> = birds.iter().map(|b| b.pos).collect();
    let centroid = torus_centroid(&positions, world).map_err(|_| CouplingError::EmptyCluster)?;
    let headings: Vec<HeadingDeg> = birds.iter().map(|b| b.heading).collect();
    let heading = circular_mean(&headings).unwrap_or(lowest.heading);

    let dists = positions
        .iter()
        .map(|p| torus_distance(centroid, *p, world));
    let n = birds.len() as f64;
    let radius = match rule {
        RadiusRule::Mean => dists.sum::<f64>() / n,
        RadiusRule::Max => dists.fold(0.0, f64::max),
        RadiusRule::Rms => (dists.map(|d| d * d).sum::<f64>() / n).sqrt(),
    };

    Ok(FlockObservation {
        members: birds.iter().map(|b| b.id).collect(),
        centroid,
        heading,
        radius,
    })
}

pub fn emergence_transform(
    obs: &MicroObservation,
    params: &ClusterParams,
    world: &TorusWorld,
) -> Vec<FlockObservation> {
    detect_clusters(obs, params, world)
        .iter()
        .map(|members| {
            reify(members, obs, world, params.radius_rule)
                .expect("cluster members come from the observation")
        })
        .collect()
}

/// Splits every flock displacement into `r` equal per-bird commands.
pub fn immergence_transform(
    displacements: &[Displacement],
    r: u32,
) -> Result<Vec<CommandSet>, CouplingError> {
    if r == 0 {
        return Err(CouplingError::ZeroRatio);
    }
    let mut seen = HashSet::new();
    for d in displacements {
        if let Some(&dup) = d.members.iter().find(|id| !seen.insert(**id)) {
            return Err(CouplingError::OverlappingMembers(dup));
        }
    }
    let parts = f64::from(r);
    let set: CommandSet = displacements
        .iter()
        .flat_map(|d| {
            let cmd = Command {
                v: Vec2::new(d.v.dx / parts, d.v.dy / parts),
                heading: d.heading,
            };
            d.members.iter().map(move |&id| (id, cmd))
        })
        .collect();
    Ok(vec![set; r as usize])
}
