//! Three-valued simplicity analysis.
//!
//! A diagram is simple when, from every vertex, the set of vertices reachable
//! at some later level is the whole level. A vertex whose forward orbit never
//! covers a level is a certificate of non-simplicity.

use std::collections::HashSet;

use crate::diagram::BratteliDiagram;

/// A vertex set at one level whose forward propagation never covers a level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub level: usize,
    pub vertices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SimplicityVerdict {
    Simple,
    NotSimple(Certificate),
    UnknownAtBound(usize),
}

/// Outcome of pushing a vertex set forward level by level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Propagation {
    Covers(usize),
    Dies(usize),
    /// Entered a cycle of tail states without covering.
    Cycles,
    /// Ran off the end of a finite prefix (or the level budget) first.
    Undetermined,
}

fn propagate(d: &BratteliDiagram, level: usize, set: &[bool], max_level: usize) -> Propagation {
    let mut current = set.to_vec();
    let mut n = level;
    let mut seen_tail_states: HashSet<Vec<bool>> = HashSet::new();
    loop {
        if current.iter().all(|&b| !b) {
            return Propagation::Dies(n);
        }
        if n > level && current.iter().all(|&b| b) {
            return Propagation::Covers(n);
        }
        if let Some(t) = d.tail_start() {
            // tail levels are indistinguishable, so a repeated set means a cycle
            if n >= t && !seen_tail_states.insert(current.clone()) {
                return Propagation::Cycles;
            }
        } else if n >= max_level {
            return Propagation::Undetermined;
        }
        let m = d.step_matrix(n).expect("level inside diagram").support();
        current = m.image(&current);
        n += 1;
    }
}

/// Classifies the diagram, looking at most `depth_bound` levels down a
/// prefix-only diagram. Stationary diagrams always get a definite verdict.
pub fn simplicity(d: &BratteliDiagram, depth_bound: usize) -> SimplicityVerdict {
    let depth_bound = depth_bound.max(1);
    match d.tail_start() {
        Some(t) => {
            for level in 0..=t {
                let k = d.level_size(level).unwrap();
                for v in 0..k {
                    let set = singleton(k, v);
                    match propagate(d, level, &set, usize::MAX) {
                        Propagation::Covers(_) => {}
                        _ => {
                            return SimplicityVerdict::NotSimple(Certificate {
                                level,
                                vertices: vec![v],
                            })
                        }
                    }
                }
            }
            SimplicityVerdict::Simple
        }
        None => {
            let horizon = depth_bound.min(d.last_level());
            for level in 0..=horizon {
                let k = d.level_size(level).unwrap();
                for v in 0..k {
                    if let Propagation::Dies(_) = propagate(d, level, &singleton(k, v), horizon) {
                        return SimplicityVerdict::NotSimple(Certificate {
                            level,
                            vertices: vec![v],
                        });
                    }
                }
            }
            SimplicityVerdict::UnknownAtBound(horizon)
        }
    }
}

/// Checks that a certificate really never covers a later level. Prefix-only
/// diagrams can only confirm certificates whose propagation dies out.
pub fn certificate_holds(d: &BratteliDiagram, cert: &Certificate) -> bool {
    let Ok(k) = d.level_size(cert.level) else {
        return false;
    };
    if cert.vertices.is_empty() || cert.vertices.len() >= k || cert.vertices.iter().any(|&v| v >= k)
    {
        return false;
    }
    let mut set = vec![false; k];
    for &v in &cert.vertices {
        set[v] = true;
    }
    matches!(
        propagate(d, cert.level, &set, d.last_level()),
        Propagation::Dies(_) | Propagation::Cycles
    )
}

fn singleton(k: usize, v: usize) -> Vec<bool> {
    let mut s = vec![false; k];
    s[v] = true;
    s
}
