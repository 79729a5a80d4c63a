//! Mass transfer towards the minimizer, elimination of light agents and
//! merging of coincident agents.
//!
//! Per-agent vectors here (`TransferFractions::eta`, relative masses) are
//! aligned with [`SwarmState::active_indices`].

use crate::error::{Error, Result};
use crate::problem::distance;
use crate::swarm::SwarmState;

/// Fraction of its mass each active agent hands to the minimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferFractions {
    pub eta: Vec<f64>,
}

/// `ηᵢ = ((Fᵢ - Fmin) / (Fmax - Fmin + ε))^q`.
///
/// A flat swarm (`Fmax = Fmin`) yields all zeros.
pub fn transfer_fractions(f_values: &[f64], q: f64, epsilon: f64) -> Result<TransferFractions> {
    if let Some((agent, &value)) = f_values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite { agent, value });
    }
    let f_min = f_values.iter().copied().fold(f64::INFINITY, f64::min);
    let f_max = f_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = f_max - f_min + epsilon;
    let eta = f_values.iter().map(|&f| ((f - f_min) / span).powf(q).min(1.0)).collect();
    Ok(TransferFractions { eta })
}

/// Moves `ηᵢmᵢ` from every non-minimizer to the minimizer. Total mass is unchanged.
pub fn apply_transfer(swarm: &mut SwarmState, eta: &TransferFractions) -> Result<()> {
    let active = swarm.active_indices();
    if active.len() != eta.eta.len() {
        return Err(Error::LengthMismatch { expected: active.len(), got: eta.eta.len() });
    }
    let target = swarm.minimizer_index;
    let mut gained = 0.0;
    for (&i, &e) in active.iter().zip(&eta.eta) {
        if i == target {
            continue;
        }
        let shed = e * swarm.agents[i].mass;
        swarm.agents[i].mass -= shed;
        gained += shed;
    }
    swarm.agents[target].mass += gained;
    Ok(())
}

/// Deactivates every non-minimizer lighter than `tolm / n_initial` and hands
/// its mass to the minimizer. Returns the number of eliminated agents.
pub fn eliminate_light(swarm: &mut SwarmState, tolm: f64, n_initial: usize) -> usize {
    let threshold = tolm / n_initial as f64;
    let target = swarm.minimizer_index;
    let mut freed = 0.0;
    let mut count = 0;
    for (i, agent) in swarm.agents.iter_mut().enumerate() {
        if i != target && agent.active && agent.mass < threshold {
            freed += agent.mass;
            agent.mass = 0.0;
            agent.active = false;
            count += 1;
        }
    }
    swarm.agents[target].mass += freed;
    if count > 0 {
        swarm.refresh_indices();
    }
    count
}

/// Collapses every pair of active agents closer than `tolmerge` into the
/// member with the lower objective value, which inherits the summed mass.
///
/// Pairs are visited in index order and passes repeat until no pair
/// qualifies. Returns the number of merges performed.
pub fn merge_close(swarm: &mut SwarmState, tolmerge: f64) -> usize {
    let mut merges = 0;
    loop {
        let mut merged_this_pass = false;
        let n = swarm.agents.len();
        for i in 0..n {
            if !swarm.agents[i].active {
                continue;
            }
            for j in (i + 1)..n {
                if !swarm.agents[j].active {
                    continue;
                }
                if distance(&swarm.agents[i].position, &swarm.agents[j].position) >= tolmerge {
                    continue;
                }
                let (keep, drop) = if swarm.f_values[j] < swarm.f_values[i] { (j, i) } else { (i, j) };
                let mass = swarm.agents[drop].mass;
                swarm.agents[drop].mass = 0.0;
                swarm.agents[drop].active = false;
                swarm.agents[keep].mass += mass;
                merges += 1;
                merged_this_pass = true;
                if drop == i {
                    break;
                }
            }
        }
        if !merged_this_pass {
            break;
        }
    }
    if merges > 0 {
        swarm.refresh_indices();
    }
    merges
}

/// `m̃ᵢ = mᵢ / max_j m_j` for the active agents.
pub fn relative_masses(swarm: &SwarmState) -> Vec<f64> {
    let active = swarm.active_indices();
    let heaviest = active.iter().map(|&i| swarm.agents[i].mass).fold(0.0, f64::max);
    active.iter().map(|&i| swarm.agents[i].mass / heaviest).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{Problem, SearchBox};
    use crate::swarm::Agent;

    fn line_problem() -> Problem {
        // F(x) = x₀, so an agent's objective value is its first coordinate.
        Problem::from_fns(|x: &[f64]| x[0], |x: &[f64]| vec![1.0; x.len()], SearchBox::cube(2, -10.0, 10.0).unwrap())
            .unwrap()
    }

    fn swarm(points: &[(f64, f64)], masses: &[f64]) -> SwarmState {
        let agents = points
            .iter()
            .zip(masses)
            .map(|(&(a, b), &m)| Agent { position: vec![a, b], mass: m, active: true })
            .collect();
        SwarmState::from_agents(&line_problem(), agents).unwrap()
    }

    #[test]
    fn fractions_at_extremes() {
        let t = transfer_fractions(&[0.0, 1.0], 2.0, 1e-12).unwrap();
        assert_eq!(t.eta[0], 0.0);
        assert!((t.eta[1] - (1.0 / (1.0 + 1e-12f64)).powi(2)).abs() < 1e-15);
    }

    #[test]
    fn fractions_midpoint_and_flat() {
        let t = transfer_fractions(&[0.0, 0.5, 1.0], 2.0, 1e-12).unwrap();
        assert!((t.eta[1] - 0.25).abs() < 1e-11);
        assert!((t.eta[2] - 1.0).abs() < 1e-11);
        let flat = transfer_fractions(&[3.0, 3.0, 3.0], 5.0, 1e-12).unwrap();
        assert_eq!(flat.eta, vec![0.0; 3]);
    }

    #[test]
    fn fractions_reject_non_finite() {
        assert!(matches!(
            transfer_fractions(&[0.0, f64::NAN], 2.0, 1e-12),
            Err(Error::NonFinite { agent: 1, .. })
        ));
        assert!(transfer_fractions(&[f64::INFINITY], 2.0, 1e-12).is_err());
    }

    #[test]
    fn full_and_partial_transfer() {
        let mut s = swarm(&[(0.0, 0.0), (1.0, 0.0)], &[0.5, 0.5]);
        apply_transfer(&mut s, &TransferFractions { eta: vec![0.0, 1.0] }).unwrap();
        assert_eq!((s.agents[0].mass, s.agents[1].mass), (1.0, 0.0));

        let mut s = swarm(&[(0.0, 0.0), (1.0, 0.0)], &[0.5, 0.5]);
        apply_transfer(&mut s, &TransferFractions { eta: vec![0.0, 0.25] }).unwrap();
        assert_eq!((s.agents[0].mass, s.agents[1].mass), (0.625, 0.375));
        assert_eq!(relative_masses(&s), vec![1.0, 0.6]);

        let before = s.clone();
        apply_transfer(&mut s, &TransferFractions { eta: vec![0.0, 0.0] }).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn transfer_rejects_misaligned_fractions() {
        let mut s = swarm(&[(0.0, 0.0), (1.0, 0.0)], &[0.5, 0.5]);
        assert!(apply_transfer(&mut s, &TransferFractions { eta: vec![0.0] }).is_err());
    }

    #[test]
    fn elimination_uses_strict_threshold() {
        let mut s = swarm(&[(0.0, 0.0), (1.0, 0.0)], &[0.99995, 0.00005]);
        assert_eq!(eliminate_light(&mut s, 1e-4, 2), 0);
        assert!(s.agents[1].active);
    }

    #[test]
    fn elimination_hands_mass_to_minimizer() {
        let mut s = swarm(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)], &[0.9999, 1e-6, 1.0 - 0.9999 - 1e-6]);
        let before = s.agents[0].mass;
        assert_eq!(eliminate_light(&mut s, 1e-4, 3), 1);
        assert!(!s.agents[1].active);
        assert_eq!(s.agents[1].mass, 0.0);
        assert!((s.agents[0].mass - (before + 1e-6)).abs() < 1e-16);
        assert!((s.total_mass() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_agent_is_never_eliminated() {
        let mut s = swarm(&[(0.0, 0.0)], &[1e-9]);
        assert_eq!(eliminate_light(&mut s, 1e-4, 1), 0);
        assert!(s.agents[0].active);
    }

    #[test]
    fn merge_keeps_lower_objective_member() {
        // F = first coordinate, so the agent at x₀ = 5 beats the one at 5.0001.
        let mut s = swarm(&[(5.0001, 0.0), (5.0, 0.0)], &[0.7, 0.3]);
        assert_eq!(merge_close(&mut s, 1e-3), 1);
        assert_eq!(s.n_active(), 1);
        assert!(s.agents[1].active);
        assert_eq!(s.agents[1].position, vec![5.0, 0.0]);
        assert_eq!(s.agents[1].mass, 1.0);
        assert_eq!(s.minimizer_index, 1);
    }

    #[test]
    fn merge_is_identity_for_spread_swarm() {
        let mut s = swarm(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)], &[0.2, 0.3, 0.5]);
        let before = s.clone();
        assert_eq!(merge_close(&mut s, 1e-3), 0);
        assert_eq!(s, before);
    }

    #[test]
    fn three_colocated_agents_collapse() {
        let mut s = swarm(&[(1.0, 1.0), (1.0, 1.0), (1.0, 1.0)], &[0.2, 0.3, 0.5]);
        assert_eq!(merge_close(&mut s, 1e-3), 2);
        assert_eq!(s.n_active(), 1);
        assert_eq!(s.total_mass(), 1.0);
    }

    #[test]
    fn chains_merge_transitively() {
        // 0-1 and 1-2 are close, 0-2 is not; the pass repeats until stable.
        let mut s = swarm(&[(0.0, 0.0), (0.0, 0.0008), (0.0, 0.0016)], &[0.2, 0.3, 0.5]);
        merge_close(&mut s, 1e-3);
        assert!(s.n_active() <= 2);
        let active = s.active_indices();
        for (a, &i) in active.iter().enumerate() {
            for &j in &active[a + 1..] {
                assert!(distance(&s.agents[i].position, &s.agents[j].position) >= 1e-3);
            }
        }
    }

    #[test]
    fn relative_mass_ratios() {
        let s = swarm(&[(0.0, 0.0), (1.0, 0.0)], &[0.2, 0.8]);
        assert_eq!(relative_masses(&s), vec![0.25, 1.0]);
        let s = swarm(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)], &[1.0 / 3.0; 3]);
        assert_eq!(relative_masses(&s), vec![1.0; 3]);
    }
}
